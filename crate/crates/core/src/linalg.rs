//! Exact Gaussian elimination on sparse rational vectors.

use num_traits::{One, Zero};

use crate::graded::Vector;
use crate::scalar::Scalar;

/// Row-echelon basis of a span. Each row carries the combination of the
/// input vectors that produced it.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<(usize, Vector, Vector)>, // (pivot, row, combination of inputs)
    inputs: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn from_vectors<'a>(vs: impl IntoIterator<Item = &'a Vector>) -> Self {
        let mut e = Echelon::new();
        for v in vs {
            e.insert(v.clone());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows; returns the remainder and the
    /// combination of inputs subtracted.
    fn reduce(&self, mut v: Vector) -> (Vector, Vector) {
        let mut comb = Vector::zero();
        for (pivot, row, rc) in &self.rows {
            let c = v.get(*pivot);
            if !c.is_zero() {
                v.axpy(&-c.clone(), row);
                comb.axpy(&c, rc);
            }
        }
        (v, comb)
    }

    /// Inserts the next input vector; returns whether it increased the rank.
    pub fn insert(&mut self, v: Vector) -> bool {
        let id = self.inputs;
        self.inputs += 1;
        let (rem, comb) = self.reduce(v);
        let Some((pivot, lead)) = rem.iter().next().map(|(i, c)| (i, c.clone())) else {
            return false;
        };
        let inv = Scalar::one() / lead;
        let row = rem.scaled(&inv);
        let mut rc = Vector::basis(id);
        rc.sub(&comb);
        let rc = rc.scaled(&inv);
        // keep rows fully reduced so that reduction order does not matter
        for (_, r, c) in self.rows.iter_mut() {
            let x = r.get(pivot);
            if !x.is_zero() {
                r.axpy(&-x.clone(), &row);
                c.axpy(&-x, &rc);
            }
        }
        self.rows.push((pivot, row, rc));
        true
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.reduce(v.clone()).0.is_zero()
    }

    /// Coefficients `c` (indexed by input order) with `Σ c_i input_i = v`.
    pub fn solve(&self, v: &Vector) -> Option<Vector> {
        let (rem, comb) = self.reduce(v.clone());
        rem.is_zero().then_some(comb)
    }
}

/// Basis of the span of `vs`, as a subset of the inputs (first independent ones).
pub fn independent_subset(vs: &[Vector]) -> Vec<usize> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        if e.insert(v.clone()) {
            out.push(i);
        }
    }
    out
}
