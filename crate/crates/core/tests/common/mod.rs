//! Deterministic random models built from a proptest-supplied stream of
//! small integers.

#![allow(dead_code)]

use proptest::prelude::*;
use rht_core::gradedalg::{basis_of_degree, scalar};
use rht_core::{FreeCdga, Generator, Polynomial};

pub struct Stream {
    values: Vec<i8>,
    pos: usize,
}

impl Stream {
    pub fn new(values: Vec<i8>) -> Self {
        Stream { values, pos: 0 }
    }

    pub fn next(&mut self) -> i64 {
        if self.values.is_empty() {
            return 0;
        }
        let v = self.values[self.pos % self.values.len()];
        self.pos += 1;
        i64::from(v)
    }
}

/// A homogeneous polynomial of degree `n` with at most `max_terms` terms.
pub fn random_poly(gens: &[Generator], n: u32, max_terms: usize, s: &mut Stream) -> Polynomial {
    let basis = basis_of_degree(gens, n);
    let mut p = Polynomial::zero();
    if basis.is_empty() {
        return p;
    }
    for _ in 0..max_terms {
        let idx = s.next().unsigned_abs() as usize % basis.len();
        p.add_term(basis[idx].clone(), scalar(s.next()));
    }
    p
}

/// Generators are added in increasing degree; each gets `dg = d(p) + q`
/// with `p` arbitrary and `q` a polynomial in the cocycle generators, so
/// `d² = 0` holds by construction.
pub fn tower(degrees: &[u32], s: &mut Stream) -> FreeCdga {
    let mut degrees = degrees.to_vec();
    degrees.sort_unstable();
    let mut model = FreeCdga::new("R", [], []).unwrap();
    for (i, &k) in degrees.iter().enumerate() {
        let g = Generator::new(format!("g{i}_{k}"), k);
        let existing = model.generators().to_vec();
        let closed: Vec<Generator> = existing
            .iter()
            .filter(|h| model.d(h).is_some_and(Polynomial::is_zero))
            .cloned()
            .collect();
        let p = random_poly(&existing, k, 2, s);
        let q = random_poly(&closed, k + 1, 2, s);
        let dg = &model.apply_d(&p).unwrap() + &q;
        let mut gens = existing.clone();
        gens.push(g.clone());
        let diffs: Vec<(Generator, Polynomial)> = model
            .differentials()
            .map(|(a, b)| (a.clone(), b.clone()))
            .chain([(g, dg)])
            .collect();
        model = FreeCdga::new("R", gens, diffs).unwrap();
    }
    model
}

pub fn degrees_strategy(max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(2u32..=7, 1..=max_len)
}

pub fn stream_strategy() -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(-3i8..=3, 8..40)
}
