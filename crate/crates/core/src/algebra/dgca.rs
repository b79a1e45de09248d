//! Graded commutative DG algebras (possibly without unit): polynomial forms
//! on the interval and local Artinian coefficient rings.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace, Vector};
use crate::scalar::{frac, sign, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dgca {
    space: GradedSpace,
    differential: GradedMap,
    product: BTreeMap<(usize, usize), Vector>,
}

impl Dgca {
    /// Products `a·b` given on basis pairs; a missing mirror `b·a` is filled in
    /// by graded commutativity.
    pub fn new(
        space: GradedSpace,
        differential: Vec<Vector>,
        products: impl IntoIterator<Item = ((usize, usize), Vector)>,
    ) -> Result<Self> {
        let differential = GradedMap::new(&space, &space, 1, differential)?;
        let mut given: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
        for ((a, b), v) in products {
            if a >= space.dim() || b >= space.dim() {
                return Err(Error::arg("product entry index out of range"));
            }
            let want = space.degree(a) + space.degree(b);
            if v.iter().any(|(j, _)| space.degree(j) != want) {
                return Err(Error::arg(format!(
                    "{}·{} must have degree {want}",
                    space.name(a),
                    space.name(b)
                )));
            }
            given.entry((a, b)).or_default().add(&v);
        }
        let mut product = given.clone();
        for (&(a, b), v) in &given {
            if !given.contains_key(&(b, a)) {
                let e = space.degree(a) as i64 * space.degree(b) as i64;
                product.insert((b, a), v.scaled(&sign(e)));
            }
        }
        product.retain(|_, v| !v.is_zero());
        Ok(Dgca {
            space,
            differential,
            product,
        })
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn product_basis(&self, a: usize, b: usize) -> Option<&Vector> {
        self.product.get(&(a, b))
    }

    pub fn d(&self, v: &Vector) -> Vector {
        self.differential.apply(v)
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                if let Some(v) = self.product.get(&(a, b)) {
                    out.axpy(&(ca * cb), v);
                }
            }
        }
        out
    }

    /// Failed axioms (commutativity, associativity, Leibniz, d² = 0) on basis tuples.
    pub fn check(&self) -> Vec<String> {
        let n = self.space.dim();
        let deg = |i: usize| self.space.degree(i) as i64;
        let nm = |i: usize| self.space.name(i);
        let mut out = Vec::new();
        for a in 0..n {
            let ea = Vector::basis(a);
            if !self.d(&self.d(&ea)).is_zero() {
                out.push(format!("d∘d ≠ 0 on {}", nm(a)));
            }
            for b in 0..n {
                let eb = Vector::basis(b);
                let mut r = self.mul(&ea, &eb);
                r.axpy(&-sign(deg(a) * deg(b)), &self.mul(&eb, &ea));
                if !r.is_zero() {
                    out.push(format!("not graded commutative on ({}, {})", nm(a), nm(b)));
                }
                let mut r = self.d(&self.mul(&ea, &eb));
                r.sub(&self.mul(&self.d(&ea), &eb));
                r.axpy(&-sign(deg(a)), &self.mul(&ea, &self.d(&eb)));
                if !r.is_zero() {
                    out.push(format!("Leibniz fails on ({}, {})", nm(a), nm(b)));
                }
                for c in 0..n {
                    let ec = Vector::basis(c);
                    let mut r = self.mul(&self.mul(&ea, &eb), &ec);
                    r.sub(&self.mul(&ea, &self.mul(&eb, &ec)));
                    if !r.is_zero() {
                        out.push(format!("not associative on ({}, {}, {})", nm(a), nm(b), nm(c)));
                    }
                }
            }
        }
        out
    }

    /// `self ⊗ other` with `(r⊗s)(r'⊗s') = (-1)^{|s||r'|} rr'⊗ss'`, basis names `r.s`.
    pub fn tensor(&self, other: &Dgca) -> Result<Dgca> {
        let (p, q) = (&self.space, &other.space);
        let name = |a: usize, b: usize| format!("{}.{}", p.name(a), q.name(b));
        let space = GradedSpace::new(
            (0..p.dim()).flat_map(|a| (0..q.dim()).map(move |b| (a, b)))
                .map(|(a, b)| (name(a, b), p.degree(a) + q.degree(b))),
        )?;
        let idx = |a: usize, b: usize| space.index_of(&name(a, b)).unwrap();
        let mut diff = vec![Vector::zero(); space.dim()];
        for a in 0..p.dim() {
            for b in 0..q.dim() {
                let mut v = Vector::zero();
                for (x, c) in self.d(&Vector::basis(a)).iter() {
                    v.add_term(idx(x, b), c.clone());
                }
                let s = sign(p.degree(a) as i64);
                for (y, c) in other.d(&Vector::basis(b)).iter() {
                    v.add_term(idx(a, y), &s * c);
                }
                diff[idx(a, b)] = v;
            }
        }
        let mut entries = Vec::new();
        for (&(a, a2), aa) in &self.product {
            for (&(b, b2), bb) in &other.product {
                let s = sign(q.degree(b) as i64 * p.degree(a2) as i64);
                let mut v = Vector::zero();
                for (x, cx) in aa.iter() {
                    for (y, cy) in bb.iter() {
                        v.add_term(idx(x, y), &s * cx * cy);
                    }
                }
                entries.push(((idx(a, b), idx(a2, b2)), v));
            }
        }
        Dgca::new(space, diff, entries)
    }
}

/// Polynomial forms on the interval, `K[s, ds]` truncated to
/// `s^0..s^D` and `s^0 ds..s^{D-1} ds`. The truncation is an algebra
/// quotient, and `d(s^D) = D s^{D-1} ds` stays inside it.
#[derive(Debug, Clone)]
pub struct PolyForms {
    pub algebra: Dgca,
    pub cap: usize,
}

impl PolyForms {
    pub fn new(cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::arg("polynomial forms need cap ≥ 1"));
        }
        let mut basis: Vec<(String, i32)> = (0..=cap).map(|i| (Self::s_name(i), 0)).collect();
        basis.extend((0..cap).map(|i| (Self::ds_name(i), 1)));
        let space = GradedSpace::new(basis)?;
        let s = |i: usize| space.index_of(&Self::s_name(i)).unwrap();
        let ds = |i: usize| space.index_of(&Self::ds_name(i)).unwrap();
        let mut diff = vec![Vector::zero(); space.dim()];
        for i in 1..=cap {
            diff[s(i)] = Vector::term(ds(i - 1), Scalar::from_integer((i as i64).into()));
        }
        let mut entries = Vec::new();
        for i in 0..=cap {
            for j in i..=cap {
                if i + j <= cap {
                    entries.push(((s(i), s(j)), Vector::basis(s(i + j))));
                }
            }
            for j in 0..cap {
                if i + j < cap {
                    entries.push(((s(i), ds(j)), Vector::basis(ds(i + j))));
                }
            }
        }
        let algebra = Dgca::new(space, diff, entries)?;
        Ok(PolyForms { algebra, cap })
    }

    fn s_name(i: usize) -> String {
        match i {
            0 => "1".into(),
            1 => "s".into(),
            _ => format!("s^{i}"),
        }
    }

    fn ds_name(i: usize) -> String {
        match i {
            0 => "ds".into(),
            1 => "s ds".into(),
            _ => format!("s^{i} ds"),
        }
    }

    pub fn s_pow(&self, i: usize) -> usize {
        self.algebra.space.index_of(&Self::s_name(i)).expect("power within cap")
    }

    pub fn s_pow_ds(&self, i: usize) -> usize {
        self.algebra.space.index_of(&Self::ds_name(i)).expect("power within cap")
    }

    /// `(power, has ds)` of a basis element.
    pub fn monomial(&self, b: usize) -> (usize, bool) {
        (0..=self.cap)
            .find(|&i| self.s_pow(i) == b)
            .map(|i| (i, false))
            .or_else(|| (0..self.cap).find(|&i| self.s_pow_ds(i) == b).map(|i| (i, true)))
            .expect("basis index in range")
    }

    /// Evaluation `s ↦ c`, `ds ↦ 0`, as a functional on basis elements.
    pub fn eval_at(&self, c: &Scalar) -> impl Fn(usize) -> Scalar + '_ {
        let c = c.clone();
        move |b| match self.monomial(b) {
            (i, false) => num_traits::pow(c.clone(), i),
            (_, true) => Scalar::zero(),
        }
    }

    /// `∫₀¹`, nonzero only on the `ds` part.
    pub fn integral_01(&self) -> impl Fn(usize) -> Scalar + '_ {
        move |b| match self.monomial(b) {
            (i, true) => frac(1, i as i64 + 1),
            (_, false) => Scalar::zero(),
        }
    }
}

/// A local Artinian algebra `K ⊕ m_A`, stored through its maximal ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtinAlgebra {
    ideal: Dgca,
    nil_index: usize,
}

impl ArtinAlgebra {
    /// `monomials` span `m_A` (all in degree 0). The nil index is computed;
    /// when `declared` is given it must equal the computed value.
    pub fn new(
        monomials: Vec<String>,
        products: impl IntoIterator<Item = ((usize, usize), Vector)>,
        declared: Option<usize>,
    ) -> Result<Self> {
        let space = GradedSpace::new(monomials.iter().map(|m| (m.clone(), 0)))?;
        let n = space.dim();
        let ideal = Dgca::new(space, vec![Vector::zero(); n], products)?;
        if let Some(problem) = ideal.check().into_iter().next() {
            return Err(Error::arg(format!("not a commutative algebra: {problem}")));
        }
        let nil_index = Self::compute_nil_index(&ideal)?;
        if let Some(k) = declared {
            if k != nil_index {
                return Err(Error::arg(format!(
                    "declared nil index {k}, but the smallest k with m_A^k = 0 is {nil_index}"
                )));
            }
        }
        Ok(ArtinAlgebra { ideal, nil_index })
    }

    fn compute_nil_index(ideal: &Dgca) -> Result<usize> {
        let n = ideal.space.dim();
        // spanning set of m_A^k, grown by multiplying with basis elements
        let mut power: Vec<Vector> = (0..n).map(Vector::basis).collect();
        let mut k = 1;
        while !power.is_empty() {
            if k > n + 1 {
                return Err(Error::arg("maximal ideal is not nilpotent"));
            }
            let mut ech = crate::linalg::Echelon::new();
            let mut next = Vec::new();
            for v in &power {
                for b in 0..n {
                    let p = ideal.mul(v, &Vector::basis(b));
                    if !p.is_zero() && ech.insert(p.clone()) {
                        next.push(p);
                    }
                }
            }
            power = next;
            k += 1;
        }
        Ok(k)
    }

    /// `K[x_1..x_r] / (monomial ideal)`; every variable must have a pure power
    /// among the relations so that the quotient is finite-dimensional. Monomials
    /// are named like `x^2*y`.
    pub fn monomial_quotient(vars: &[&str], relations: &[Vec<u32>]) -> Result<Self> {
        let r = vars.len();
        if r == 0 || relations.iter().any(|e| e.len() != r) {
            return Err(Error::arg("relation exponents must match the variables"));
        }
        let mut bound = vec![None; r];
        for e in relations {
            let nz: Vec<usize> = (0..r).filter(|&i| e[i] > 0).collect();
            if let [i] = nz[..] {
                bound[i] = Some(bound[i].map_or(e[i], |b: u32| b.min(e[i])));
            }
        }
        let bound: Vec<u32> = bound
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| Error::arg(format!("no pure power of `{}` in the ideal", vars[i]))))
            .collect::<Result<_>>()?;
        let killed = |e: &[u32]| relations.iter().any(|rel| rel.iter().zip(e).all(|(a, b)| a <= b));
        let mut monos: Vec<Vec<u32>> = vec![vec![]];
        for &b in &bound {
            monos = monos
                .into_iter()
                .flat_map(|m| (0..b).map(move |k| [m.clone(), vec![k]].concat()))
                .collect();
        }
        monos.retain(|e| e.iter().any(|&k| k > 0) && !killed(e));
        let name = |e: &[u32]| {
            e.iter()
                .zip(vars)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.to_string() } else { format!("{v}^{k}") })
                .collect::<Vec<_>>()
                .join("*")
        };
        let names: Vec<String> = monos.iter().map(|e| name(e)).collect();
        let space = GradedSpace::new(names.iter().map(|n| (n.clone(), 0)))?;
        let idx = |e: &[u32]| space.index_of(&name(e)).unwrap();
        let mut entries = Vec::new();
        for a in &monos {
            for b in &monos {
                let s: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if s.iter().zip(&bound).all(|(k, b)| k < b) && !killed(&s) {
                    entries.push(((idx(a), idx(b)), Vector::basis(idx(&s))));
                }
            }
        }
        let ordered: Vec<String> = (0..space.dim()).map(|i| space.name(i).to_string()).collect();
        ArtinAlgebra::new(ordered, entries, None)
    }

    /// `K[ε]/(ε^k)`
    pub fn truncated(var: &str, k: u32) -> Result<Self> {
        Self::monomial_quotient(&[var], &[vec![k]])
    }

    pub fn ideal(&self) -> &Dgca {
        &self.ideal
    }

    pub fn space(&self) -> &GradedSpace {
        &self.ideal.space
    }

    pub fn dim(&self) -> usize {
        self.ideal.space.dim()
    }

    pub fn nil_index(&self) -> usize {
        self.nil_index
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        self.ideal.mul(x, y)
    }

    pub fn products(&self) -> &BTreeMap<(usize, usize), Vector> {
        &self.ideal.product
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn polynomial_forms_are_a_dgca() {
        let r = PolyForms::new(3).unwrap();
        assert!(r.algebra.check().is_empty());
        let s2 = Vector::basis(r.s_pow(2));
        assert_eq!(r.algebra.d(&s2), Vector::term(r.s_pow_ds(1), int(2)));
        let ev = r.eval_at(&int(2));
        assert_eq!(ev(r.s_pow(3)), int(8));
        assert_eq!(r.integral_01()(r.s_pow_ds(2)), frac(1, 3));
    }

    #[test]
    fn truncated_polynomials() {
        let a = ArtinAlgebra::truncated("e", 4).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.nil_index(), 4);
        let e = Vector::basis(a.space().index_of("e").unwrap());
        let e3 = a.mul(&a.mul(&e, &e), &e);
        assert_eq!(e3, Vector::basis(a.space().index_of("e^3").unwrap()));
        assert!(a.mul(&e3, &e).is_zero());
    }

    #[test]
    fn two_variable_quotient() {
        // K[x,y]/(x², y²): m = <x, y, xy>, m³ = 0
        let a = ArtinAlgebra::monomial_quotient(&["x", "y"], &[vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.nil_index(), 3);
        assert!(ArtinAlgebra::monomial_quotient(&["x", "y"], &[vec![2, 0]]).is_err());
    }

    #[test]
    fn declared_nil_index_must_match() {
        let r = ArtinAlgebra::new(vec!["e".into()], [], Some(3));
        assert!(r.is_err());
        assert!(ArtinAlgebra::new(vec!["e".into()], [], Some(2)).is_ok());
    }

    #[test]
    fn tensor_of_forms_with_ideal() {
        let r = PolyForms::new(2).unwrap();
        let a = ArtinAlgebra::truncated("e", 3).unwrap();
        let t = r.algebra.tensor(a.ideal()).unwrap();
        assert!(t.check().is_empty());
    }
}
