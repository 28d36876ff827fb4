use std::collections::HashMap;

use crate::symplectic::{bits, Pauli, PauliString, SymplecticError, XorBasis};

/// Packs a Pauli string with `x_i` at bit `2i` and `z_i` at bit `2i + 1`.
pub(crate) fn interleave(p: &PauliString) -> Vec<u64> {
    let mut v = vec![0u64; bits::words_for(2 * p.n()).max(1)];
    for q in bits::ones(p.x_words()) {
        bits::set(&mut v, 2 * q);
    }
    for q in bits::ones(p.z_words()) {
        bits::set(&mut v, 2 * q + 1);
    }
    v
}

pub(crate) fn deinterleave(v: &[u64], n: usize) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        let (x, z) = (bits::get(v, 2 * q), bits::get(v, 2 * q + 1));
        if x || z {
            p.set(q, Pauli::from_bits(x, z));
        }
    }
    p
}

fn last_one(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Minimum weights of the four (or more) logical classes of a coset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMinima {
    /// `weights[c]` is the lowest weight in class `c`, where bit `j` of `c`
    /// says whether class generator `j` is applied.
    pub weights: Vec<usize>,
}

impl ClassMinima {
    /// Lowest-weight class (lowest index on ties) and whether it was tied.
    pub fn best(&self) -> (usize, bool) {
        let min = *self.weights.iter().min().expect("at least one class");
        let first = self.weights.iter().position(|&w| w == min).unwrap();
        let tie = self.weights.iter().filter(|&&w| w == min).count() > 1;
        (first, tie)
    }
}

#[derive(Debug, Clone)]
struct Row {
    bits: Vec<u64>,
    start: usize,
    end: usize,
}

enum Step {
    Add(usize),
    Remove { gen: usize, slot: usize, choice: Vec<u64> },
}

/// Qubit-by-qubit trellis over `offset · span(free) · span(classes)`.
///
/// Free generators are brought to minimal-span form, so a generator only
/// occupies state bits between its first and last qubit. Class generators
/// stay in the state throughout, which lets one Viterbi pass return the
/// minimum weight of every logical class at once.
#[derive(Debug, Clone)]
pub struct CosetTrellis {
    n: usize,
    classes: Vec<Vec<u64>>,
    free: Vec<Row>,
    starts: Vec<Vec<usize>>,
    ends: Vec<Vec<usize>>,
    width: usize,
}

impl CosetTrellis {
    pub fn new(
        n: usize,
        free: &[PauliString],
        classes: &[PauliString],
    ) -> Result<Self, SymplecticError> {
        for p in free.iter().chain(classes) {
            if p.n() != n {
                return Err(SymplecticError::LengthMismatch { left: n, right: p.n() });
            }
        }
        let mut basis = XorBasis::new(2 * n.max(1));
        for p in free {
            basis.insert(interleave(p));
        }
        let mut rows: Vec<Vec<u64>> = basis.rows().to_vec();

        let mut owner: HashMap<usize, usize> = HashMap::new();
        let mut stack: Vec<usize> = (0..rows.len()).collect();
        while let Some(r) = stack.pop() {
            let e = last_one(&rows[r]).unwrap();
            match owner.get(&e).copied() {
                None => {
                    owner.insert(e, r);
                }
                Some(o) if o == r => {}
                Some(o) => {
                    let early_r = bits::first_one(&rows[r]) < bits::first_one(&rows[o]);
                    let (a, b) = if early_r { (r, o) } else { (o, r) };
                    let src = rows[b].clone();
                    bits::xor_into(&mut rows[a], &src);
                    if a == o {
                        owner.insert(e, r);
                    }
                    stack.push(a);
                }
            }
        }

        let free: Vec<Row> = rows
            .into_iter()
            .map(|bits_| Row {
                start: bits::first_one(&bits_).unwrap() / 2,
                end: last_one(&bits_).unwrap() / 2,
                bits: bits_,
            })
            .collect();
        let mut starts = vec![Vec::new(); n];
        let mut ends = vec![Vec::new(); n];
        for (i, r) in free.iter().enumerate() {
            starts[r.start].push(i);
            ends[r.end].push(i);
        }
        let mut active = 0usize;
        let mut width = 0usize;
        for q in 0..n {
            active += starts[q].len();
            width = width.max(active);
            active -= ends[q].len();
        }
        Ok(Self {
            n,
            classes: classes.iter().map(interleave).collect(),
            free,
            starts,
            ends,
            width: width + classes.len(),
        })
    }

    /// Largest number of state bits.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_free(&self) -> usize {
        self.free.len()
    }

    /// Minimum weight of each class of `offset`.
    pub fn minima(&self, offset: &PauliString) -> ClassMinima {
        self.run(offset, false).0
    }

    /// Class minima together with a minimum-weight element of the best class.
    pub fn decode(&self, offset: &PauliString) -> (ClassMinima, PauliString) {
        let (m, p) = self.run(offset, true);
        (m, p.expect("backtracking requested"))
    }

    fn gen_bits(&self, g: usize) -> &[u64] {
        let c = self.classes.len();
        if g < c {
            &self.classes[g]
        } else {
            &self.free[g - c].bits
        }
    }

    fn run(&self, offset: &PauliString, backtrack: bool) -> (ClassMinima, Option<PauliString>) {
        assert_eq!(offset.n(), self.n, "offset length");
        let c = self.classes.len();
        let e = interleave(offset);
        let mut slots: Vec<usize> = (0..c).collect();
        let mut costs: Vec<u32> = vec![0; 1 << c];
        let mut log: Vec<Step> = Vec::new();

        for q in 0..self.n {
            for &f in &self.starts[q] {
                costs.extend_from_within(..);
                slots.push(c + f);
                if backtrack {
                    log.push(Step::Add(c + f));
                }
            }
            let (mut mx, mut mz) = (0usize, 0usize);
            for (s, &g) in slots.iter().enumerate() {
                let b = self.gen_bits(g);
                mx |= (bits::get(b, 2 * q) as usize) << s;
                mz |= (bits::get(b, 2 * q + 1) as usize) << s;
            }
            let (ex, ez) = (bits::get(&e, 2 * q), bits::get(&e, 2 * q + 1));
            for (s, cost) in costs.iter_mut().enumerate() {
                let x = ex ^ ((s & mx).count_ones() & 1 == 1);
                let z = ez ^ ((s & mz).count_ones() & 1 == 1);
                *cost += (x | z) as u32;
            }
            for &f in &self.ends[q] {
                let slot = slots.iter().position(|&g| g == c + f).unwrap();
                let half = costs.len() / 2;
                let low = (1usize << slot) - 1;
                let mut choice = if backtrack { vec![0u64; half.div_ceil(64)] } else { Vec::new() };
                let mut next = Vec::with_capacity(half);
                for s in 0..half {
                    let s0 = ((s & !low) << 1) | (s & low);
                    let (a, b) = (costs[s0], costs[s0 | 1 << slot]);
                    if b < a && backtrack {
                        bits::set(&mut choice, s);
                    }
                    next.push(a.min(b));
                }
                costs = next;
                slots.remove(slot);
                if backtrack {
                    log.push(Step::Remove { gen: c + f, slot, choice });
                }
            }
        }
        debug_assert_eq!(slots, (0..c).collect::<Vec<_>>());

        let minima = ClassMinima {
            weights: costs.iter().map(|&w| w as usize).collect(),
        };
        if !backtrack {
            return (minima, None);
        }
        let (best, _) = minima.best();
        let mut coeff = vec![false; c + self.free.len()];
        for (j, k) in coeff.iter_mut().enumerate().take(c) {
            *k = best >> j & 1 == 1;
        }
        let mut s = best;
        let mut width = c;
        for step in log.iter().rev() {
            match step {
                Step::Remove { gen, slot, choice } => {
                    let b = bits::get(choice, s);
                    coeff[*gen] = b;
                    let low = (1usize << slot) - 1;
                    s = ((s & !low) << 1) | (s & low) | (b as usize) << slot;
                    width += 1;
                }
                Step::Add(gen) => {
                    width -= 1;
                    coeff[*gen] = s >> width & 1 == 1;
                    s &= (1 << width) - 1;
                }
            }
        }
        let mut v = e;
        for (g, _) in coeff.iter().enumerate().filter(|(_, &k)| k) {
            bits::xor_into(&mut v, self.gen_bits(g));
        }
        (minima, Some(deinterleave(&v, self.n)))
    }
}
