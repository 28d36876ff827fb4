use evenbly_core::symplectic::{
    min_weight_coset_element, rref, Pauli, PauliString, SymplecticMatrix,
};
use proptest::prelude::*;

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (proptest::collection::vec(0u8..4, n), any::<bool>()).prop_map(move |(ops, neg)| {
        let mut p = PauliString::identity(n);
        for (q, &o) in ops.iter().enumerate() {
            p.set(q, Pauli::from_bits(o & 1 == 1, o & 2 == 2));
        }
        p.with_sign(neg)
    })
}

fn p(s: &str) -> PauliString {
    s.parse().unwrap()
}

/// Lowest weight over every element of the coset, by enumeration.
fn exhaustive_min(e: &PauliString, gens: &[PauliString]) -> usize {
    (0u32..1 << gens.len())
        .map(|mask| {
            let mut v = e.clone();
            for (i, g) in gens.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v.mul_assign_unsigned(g);
                }
            }
            v.weight()
        })
        .min()
        .unwrap()
}

#[test]
fn composition_examples() {
    assert_eq!(p("XI").compose(&p("IX")).unwrap(), p("XX"));
    assert_eq!(p("XXXX").compose(&p("XXXX")).unwrap(), p("IIII"));
    let zz = p("ZIZI").compose(&p("IIZZ")).unwrap();
    assert_eq!(zz, p("ZIIZ"));
    assert_eq!(zz.sign(), 1);
    assert!(p("X").compose(&p("Z")).is_err());
    assert!(p("XX").compose(&p("X")).is_err());
}

#[test]
fn commutation_examples() {
    assert_eq!(p("X").symplectic_product(&p("Z")).unwrap(), 1);
    assert_eq!(p("XXXX").symplectic_product(&p("ZIZI")).unwrap(), 0);
}

#[test]
fn rank_examples() {
    let m = |rows: &[&str]| {
        SymplecticMatrix::new(rows[0].len(), rows.iter().map(|s| p(s)).collect()).unwrap()
    };
    assert_eq!(m(&["XXXX", "ZIZI", "IZIZ"]).rank(), 3);
    assert_eq!(m(&["IIII"]).rank(), 0);
    assert_eq!(m(&["XXXX", "XXXX"]).rank(), 1);
}

#[test]
fn coset_examples() {
    let seed = SymplecticMatrix::new(4, vec![p("XXXX"), p("ZIZI"), p("IZIZ")]).unwrap();
    assert_eq!(min_weight_coset_element(&p("ZZII"), &seed).unwrap().weight(), 2);
    let one = SymplecticMatrix::new(4, vec![p("XXXX")]).unwrap();
    assert!(min_weight_coset_element(&p("XXXX"), &one).unwrap().is_identity());
    assert!(min_weight_coset_element(&p("IIII"), &seed).unwrap().is_identity());
}

proptest! {
    #[test]
    fn symplectic_product_is_symmetric(a in pauli_string(9), b in pauli_string(9)) {
        prop_assert_eq!(a.symplectic_product(&b).unwrap(), b.symplectic_product(&a).unwrap());
        prop_assert_eq!(a.symplectic_product(&a).unwrap(), 0);
    }

    #[test]
    fn composition_is_associative(a in pauli_string(70), b in pauli_string(70), c in pauli_string(70)) {
        let (ab, e1) = a.compose_with_phase(&b).unwrap();
        let (left, e2) = ab.compose_with_phase(&c).unwrap();
        let (bc, e3) = b.compose_with_phase(&c).unwrap();
        let (right, e4) = a.compose_with_phase(&bc).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!((e1 + e2) % 4, (e3 + e4) % 4);
    }

    #[test]
    fn squares_are_trivial(a in pauli_string(13)) {
        let sq = a.compose(&a).unwrap();
        prop_assert!(sq.is_identity());
    }

    #[test]
    fn weight_counts_support(a in pauli_string(80)) {
        prop_assert_eq!(a.weight(), (0..80).filter(|&q| a.get(q) != Pauli::I).count());
        prop_assert_eq!(a.to_string().parse::<PauliString>().unwrap(), a);
    }

    #[test]
    fn rref_is_idempotent_and_keeps_row_space(
        rows in proptest::collection::vec(pauli_string(7), 1..10),
        shuffle in Just(()).prop_perturb(|_, mut rng| {
            let mut order: Vec<usize> = (0..14).collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.random_range(0..=i));
            }
            order
        }),
    ) {
        let m = SymplecticMatrix::new(7, rows).unwrap();
        let (r1, piv1) = rref(&m, &shuffle).unwrap();
        let (r2, piv2) = rref(&r1, &shuffle).unwrap();
        prop_assert_eq!(r1.rows(), r2.rows());
        prop_assert_eq!(&piv1, &piv2);
        prop_assert!(r1.same_row_space(&m));
        prop_assert_eq!(r1.len(), m.rank());
        for (i, &c) in piv1.iter().enumerate() {
            let hits = r1.rows().iter().filter(|row| {
                let (x, z) = row.get(c % 7).bits();
                if c < 7 { x } else { z }
            }).count();
            prop_assert_eq!(hits, 1, "pivot {} of row {}", c, i);
        }
    }

    #[test]
    fn coset_search_matches_enumeration(
        e in pauli_string(10),
        gens in proptest::collection::vec(pauli_string(10), 0..12),
    ) {
        let m = SymplecticMatrix::new(10, gens.clone()).unwrap();
        let found = min_weight_coset_element(&e, &m).unwrap();
        prop_assert_eq!(found.weight(), exhaustive_min(&e, &gens));
        let mut diff = found.clone();
        diff.mul_assign_unsigned(&e);
        prop_assert!(diff.is_identity() || m.spans(&diff));
    }
}
