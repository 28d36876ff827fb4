use super::bits;
use super::matrix::{rref, SymplecticMatrix};
use super::{PauliString, SymplecticError};

/// Default limit on the number of independent generators searched.
pub const DEFAULT_COSET_CAP: usize = 30;

/// Minimum-weight element of `{e · g : g ∈ span(generators)}` with the
/// default cap of [`DEFAULT_COSET_CAP`] independent generators.
pub fn min_weight_coset_element(
    e: &PauliString,
    generators: &SymplecticMatrix,
) -> Result<PauliString, SymplecticError> {
    min_weight_coset_element_with_cap(e, generators, DEFAULT_COSET_CAP)
}

/// Exact branch-and-bound search over GF(2) combinations of the generators.
///
/// Products are phase-free; the result keeps the sign of `e`. Generators
/// are reduced to an independent set first, and the search refuses when
/// more than `cap` of them remain.
pub fn min_weight_coset_element_with_cap(
    e: &PauliString,
    generators: &SymplecticMatrix,
    cap: usize,
) -> Result<PauliString, SymplecticError> {
    if e.n() != generators.n() {
        return Err(SymplecticError::LengthMismatch {
            left: e.n(),
            right: generators.n(),
        });
    }
    let n = e.n();
    let (basis, _) = rref(generators, &SymplecticMatrix::natural_order(n))?;
    let r = basis.len();
    if r > cap {
        return Err(SymplecticError::CosetTooLarge { free: r, cap });
    }
    let gens: Vec<(Vec<u64>, Vec<u64>)> = basis
        .rows()
        .iter()
        .map(|g| (g.x_words().to_vec(), g.z_words().to_vec()))
        .collect();
    let order = search_order(&gens, n);
    let words = bits::words_for(n);

    // settled[i]: qubits no generator at position >= i touches.
    let mut settled = vec![vec![0u64; words]; r + 1];
    let mut cover = vec![0u64; words];
    for i in (0..=r).rev() {
        for w in 0..words {
            settled[i][w] = !cover[w];
        }
        if let Some(last) = bits::words_for(n).checked_sub(1) {
            let extra = words * 64 - n;
            if extra > 0 {
                settled[i][last] &= !0u64 >> extra;
            }
        }
        if i > 0 {
            let (gx, gz) = &gens[order[i - 1]];
            for w in 0..words {
                cover[w] |= gx[w] | gz[w];
            }
        }
    }

    let ordered: Vec<&(Vec<u64>, Vec<u64>)> = order.iter().map(|&i| &gens[i]).collect();
    let mut search = Search {
        gens: ordered,
        settled,
        best_weight: weight(e.x_words(), e.z_words()),
        best: (e.x_words().to_vec(), e.z_words().to_vec()),
    };
    let mut x = e.x_words().to_vec();
    let mut z = e.z_words().to_vec();
    search.dfs(0, &mut x, &mut z);

    let (bx, bz) = search.best;
    let mut out = PauliString::from_words(n, bx, bz);
    if e.is_negative() {
        out.negate();
    }
    Ok(out)
}

fn weight(x: &[u64], z: &[u64]) -> usize {
    x.iter().zip(z).map(|(a, b)| (a | b).count_ones() as usize).sum()
}

fn masked_weight(x: &[u64], z: &[u64], mask: &[u64]) -> usize {
    x.iter()
        .zip(z)
        .zip(mask)
        .map(|((a, b), m)| ((a | b) & m).count_ones() as usize)
        .sum()
}

/// Greedy order: next is the generator covering the most qubits no other
/// remaining generator covers, ties broken by larger weight. This lets the
/// settled region grow as early as possible.
fn search_order(gens: &[(Vec<u64>, Vec<u64>)], n: usize) -> Vec<usize> {
    let words = bits::words_for(n);
    let supp: Vec<Vec<u64>> = gens
        .iter()
        .map(|(x, z)| x.iter().zip(z).map(|(a, b)| a | b).collect())
        .collect();
    let mut remaining: Vec<usize> = (0..gens.len()).collect();
    let mut order = Vec::with_capacity(gens.len());
    while !remaining.is_empty() {
        let mut best = (0usize, 0usize, 0usize);
        for (pos, &g) in remaining.iter().enumerate() {
            let mut others = vec![0u64; words];
            for &h in &remaining {
                if h != g {
                    for w in 0..words {
                        others[w] |= supp[h][w];
                    }
                }
            }
            let unique: usize = (0..words)
                .map(|w| (supp[g][w] & !others[w]).count_ones() as usize)
                .sum();
            let wt = bits::count_ones(&supp[g]);
            if pos == 0 || (unique, wt) > (best.1, best.2) {
                best = (pos, unique, wt);
            }
        }
        order.push(remaining.remove(best.0));
    }
    order
}

struct Search<'a> {
    gens: Vec<&'a (Vec<u64>, Vec<u64>)>,
    settled: Vec<Vec<u64>>,
    best_weight: usize,
    best: (Vec<u64>, Vec<u64>),
}

impl Search<'_> {
    fn dfs(&mut self, depth: usize, x: &mut [u64], z: &mut [u64]) {
        if masked_weight(x, z, &self.settled[depth]) >= self.best_weight {
            return;
        }
        if depth == self.gens.len() {
            self.best_weight = weight(x, z);
            self.best = (x.to_vec(), z.to_vec());
            return;
        }
        let (gx, gz) = self.gens[depth];
        let before = weight(x, z);
        bits::xor_into(x, gx);
        bits::xor_into(z, gz);
        let after = weight(x, z);
        // Visit the child with the lower current weight first.
        if after < before {
            self.dfs(depth + 1, x, z);
            bits::xor_into(x, gx);
            bits::xor_into(z, gz);
            self.dfs(depth + 1, x, z);
        } else {
            bits::xor_into(x, gx);
            bits::xor_into(z, gz);
            self.dfs(depth + 1, x, z);
            bits::xor_into(x, gx);
            bits::xor_into(z, gz);
            self.dfs(depth + 1, x, z);
            bits::xor_into(x, gx);
            bits::xor_into(z, gz);
        }
    }
}
