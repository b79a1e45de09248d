//! The path object `M[t, dt]`, truncated in `t`-degree.
//!
//! Elements are sums `Σ tⁱ·mᵢ + Σ tⁱ dt·nᵢ` with the form factor written on
//! the left, so `|tⁱ dt·n| = |n| + 1` and `d(tⁱ dt·n) = −tⁱ dt·dn`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graded::Vector;
use crate::scalar::{frac, int, Scalar};

use super::dgla::Dgla;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyElement {
    cap: usize,
    /// `(power of t, has dt) → coefficient in M`
    terms: BTreeMap<(usize, bool), Vector>,
}

impl PolyElement {
    pub fn zero(cap: usize) -> Self {
        PolyElement {
            cap,
            terms: BTreeMap::new(),
        }
    }

    /// `tⁱ·m`, or `tⁱ dt·m` when `dt` is set.
    pub fn monomial(cap: usize, power: usize, dt: bool, m: Vector) -> Result<Self> {
        let mut p = PolyElement::zero(cap);
        p.add_monomial(power, dt, m)?;
        Ok(p)
    }

    pub fn constant(cap: usize, m: Vector) -> Self {
        let mut p = PolyElement::zero(cap);
        p.add_monomial(0, false, m).expect("power 0 is always within the cap");
        p
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn with_cap(mut self, cap: usize) -> Result<Self> {
        if let Some(top) = self.t_degree() {
            if top > cap {
                return Err(capacity(top, cap));
            }
        }
        self.cap = cap;
        Ok(self)
    }

    pub fn add_monomial(&mut self, power: usize, dt: bool, m: Vector) -> Result<()> {
        if m.is_zero() {
            return Ok(());
        }
        if power > self.cap {
            return Err(capacity(power, self.cap));
        }
        let e = self.terms.entry((power, dt)).or_default();
        e.add(&m);
        if e.is_zero() {
            self.terms.remove(&(power, dt));
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, bool, &Vector)> {
        self.terms.iter().map(|(&(i, dt), v)| (i, dt, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest power of `t` present.
    pub fn t_degree(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn add(&mut self, other: &PolyElement) {
        self.axpy(&Scalar::one(), other);
    }

    pub fn sub(&mut self, other: &PolyElement) {
        self.axpy(&-Scalar::one(), other);
    }

    /// `self += c·other`; the cap becomes the larger of the two.
    pub fn axpy(&mut self, c: &Scalar, other: &PolyElement) {
        self.cap = self.cap.max(other.cap);
        for (&k, v) in &other.terms {
            let e = self.terms.entry(k).or_default();
            e.axpy(c, v);
            if e.is_zero() {
                self.terms.remove(&k);
            }
        }
    }

    pub fn scaled(&self, c: &Scalar) -> PolyElement {
        let mut p = PolyElement::zero(self.cap);
        p.axpy(c, self);
        p
    }

    pub fn neg(&self) -> PolyElement {
        self.scaled(&-Scalar::one())
    }

    /// Applies a linear map of `M` coefficientwise (no sign: the map must have even degree,
    /// or be applied to the `dt`-free part only).
    pub fn map_coefficients(&self, f: impl Fn(&Vector) -> Vector) -> PolyElement {
        let mut p = PolyElement::zero(self.cap);
        for (&(i, dt), v) in &self.terms {
            p.add_monomial(i, dt, f(v)).expect("same powers");
        }
        p
    }

    /// `d(tⁱ m) = i tⁱ⁻¹ dt·m + tⁱ dm`, `d(tⁱ dt·n) = −tⁱ dt·dn`.
    pub fn d(&self, m: &Dgla) -> PolyElement {
        let mut p = PolyElement::zero(self.cap);
        for (&(i, dt), v) in &self.terms {
            let dv = m.d(v);
            if dt {
                p.add_monomial(i, true, dv.neg()).expect("same power");
            } else {
                p.add_monomial(i, false, dv).expect("same power");
                if i > 0 {
                    p.add_monomial(i - 1, true, v.scaled(&int(i as i64)))
                        .expect("lower power");
                }
            }
        }
        p
    }

    /// `[f·m, g·n] = (−1)^{|m||g|} fg·[m,n]` with `dt·dt = 0`.
    pub fn bracket(&self, other: &PolyElement, m: &Dgla) -> Result<PolyElement> {
        let cap = self.cap.max(other.cap);
        let mut p = PolyElement::zero(cap);
        let space = m.space();
        for (&(i, dt1), v) in &self.terms {
            for (&(j, dt2), w) in &other.terms {
                if dt1 && dt2 {
                    continue;
                }
                let mut b = m.bracket(v, w);
                if b.is_zero() {
                    continue;
                }
                if dt2 {
                    // move dt past the coefficient of the left factor
                    let odd = odd_part(v, space);
                    if !odd.is_zero() {
                        b = m.bracket(&even_part(v, space), w);
                        b.sub(&m.bracket(&odd, w));
                    }
                }
                if i + j > cap {
                    return Err(capacity(i + j, cap));
                }
                p.add_monomial(i + j, dt1 || dt2, b)?;
            }
        }
        Ok(p)
    }

    /// `e_a`: kills `dt` terms and substitutes `t = a`.
    pub fn evaluate_at(&self, a: &Scalar) -> Vector {
        let mut out = Vector::zero();
        for (&(i, dt), v) in &self.terms {
            if !dt {
                out.axpy(&num_traits::pow(a.clone(), i), v);
            }
        }
        out
    }

    /// `∫ₐᵇ`, which only sees the `dt` terms.
    pub fn integrate(&self, a: &Scalar, b: &Scalar) -> Vector {
        let mut out = Vector::zero();
        for (&(i, dt), v) in &self.terms {
            if dt {
                let k = i + 1;
                let c = (num_traits::pow(b.clone(), k) - num_traits::pow(a.clone(), k))
                    / int(k as i64);
                out.axpy(&c, v);
            }
        }
        out
    }

    /// `∫₀ᵗ`: `tⁱ dt·n ↦ tⁱ⁺¹/(i+1)·n`, zero on `dt`-free terms.
    pub fn integral_from_zero(&self) -> Result<PolyElement> {
        let mut p = PolyElement::zero(self.cap);
        for (&(i, dt), v) in &self.terms {
            if dt {
                if i + 1 > self.cap {
                    return Err(capacity(i + 1, self.cap));
                }
                p.add_monomial(i + 1, false, v.scaled(&frac(1, i as i64 + 1)))?;
            }
        }
        Ok(p)
    }

    /// The coefficient `n` in front of `tⁱ dt`, or of `tⁱ` when `dt` is false.
    pub fn coefficient(&self, power: usize, dt: bool) -> Vector {
        self.terms.get(&(power, dt)).cloned().unwrap_or_default()
    }
}

fn odd_part(v: &Vector, space: &crate::graded::GradedSpace) -> Vector {
    Vector::from_terms(v.iter().filter(|(i, _)| space.is_odd(*i)).map(|(i, c)| (i, c.clone())))
}

fn even_part(v: &Vector, space: &crate::graded::GradedSpace) -> Vector {
    Vector::from_terms(v.iter().filter(|(i, _)| !space.is_odd(*i)).map(|(i, c)| (i, c.clone())))
}

fn capacity(needed: usize, limit: usize) -> Error {
    Error::Capacity {
        what: "t-degree".into(),
        needed,
        limit,
    }
}

/// Powers of `t` as plain polynomials, used by tests and the transfer oracles.
pub fn poly_eval(coeffs: &[Scalar], a: &Scalar) -> Scalar {
    coeffs
        .iter()
        .rev()
        .fold(Scalar::zero(), |acc, c| acc * a + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedSpace;
    use crate::scalar::sign;
    use proptest::prelude::*;

    fn sl2() -> Dgla {
        let space = GradedSpace::new([("e", 0), ("f", 0), ("h", 0)]).unwrap();
        Dgla::new(
            space,
            vec![Vector::zero(); 3],
            [
                ((2, 0), Vector::term(0, int(2))),
                ((2, 1), Vector::term(1, int(-2))),
                ((0, 1), Vector::basis(2)),
            ],
        )
        .unwrap()
    }

    /// gl(1|1)-like algebra with an odd element and nonzero d = ad_u.
    fn odd_fixture() -> Dgla {
        crate::fixtures::gl11()
    }

    #[test]
    fn d_of_t_m() {
        let m = sl2();
        let p = PolyElement::monomial(3, 1, false, Vector::basis(0)).unwrap();
        assert_eq!(p.d(&m), PolyElement::monomial(3, 0, true, Vector::basis(0)).unwrap());
        let p2 = PolyElement::monomial(3, 2, false, Vector::basis(0)).unwrap();
        assert!(p2.d(&m).d(&m).is_zero());
    }

    #[test]
    fn bracket_multiplies_polynomials() {
        let m = sl2();
        let p = PolyElement::monomial(3, 1, false, Vector::basis(0)).unwrap();
        let q = PolyElement::monomial(3, 1, false, Vector::basis(1)).unwrap();
        let b = p.bracket(&q, &m).unwrap();
        assert_eq!(b, PolyElement::monomial(3, 2, false, Vector::basis(2)).unwrap());
        let p3 = PolyElement::monomial(3, 3, false, Vector::basis(0)).unwrap();
        assert!(matches!(p3.bracket(&q, &m), Err(Error::Capacity { .. })));
    }

    #[test]
    fn integrals() {
        let n = Vector::basis(1);
        let one = Scalar::one();
        let z = Scalar::zero();
        let p = PolyElement::monomial(3, 0, true, n.clone()).unwrap();
        assert_eq!(p.integrate(&z, &one), n);
        let p = PolyElement::monomial(3, 1, true, n.clone()).unwrap();
        assert_eq!(p.integrate(&z, &one), n.scaled(&frac(1, 2)));
        let p = PolyElement::monomial(3, 1, false, n).unwrap();
        assert!(p.integrate(&z, &one).is_zero());
    }

    fn arb_poly(dim: usize, cap: usize) -> impl Strategy<Value = PolyElement> {
        prop::collection::vec((0..=2usize, any::<bool>(), 0..dim, -3i64..=3), 0..5).prop_map(
            move |ts| {
                let mut p = PolyElement::zero(cap);
                for (i, dt, b, c) in ts {
                    p.add_monomial(i, dt, Vector::term(b, int(c))).unwrap();
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn evaluation_is_a_dgla_morphism(p in arb_poly(4, 4), q in arb_poly(4, 4), a in -3i64..=3) {
            let m = odd_fixture();
            let a = int(a);
            let lhs = p.bracket(&q, &m).unwrap().evaluate_at(&a);
            let rhs = m.bracket(&p.evaluate_at(&a), &q.evaluate_at(&a));
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(p.d(&m).evaluate_at(&a), m.d(&p.evaluate_at(&a)));
        }

        #[test]
        fn path_object_is_a_dgla(p in arb_poly(4, 4), q in arb_poly(4, 4)) {
            let m = odd_fixture();
            prop_assert!(p.d(&m).d(&m).is_zero());
            // Leibniz for homogeneous pieces
            for (i, dt, v) in p.terms() {
                for (j, dt2, w) in q.terms() {
                    for (x, cx) in v.iter() {
                        for (y, cy) in w.iter() {
                            let a = PolyElement::monomial(4, i, dt, Vector::term(x, cx.clone())).unwrap();
                            let b = PolyElement::monomial(4, j, dt2, Vector::term(y, cy.clone())).unwrap();
                            let deg_a = m.space().degree(x) + dt as i32;
                            let mut lhs = a.bracket(&b, &m).unwrap().d(&m);
                            lhs.sub(&a.d(&m).bracket(&b, &m).unwrap());
                            lhs.axpy(&-sign(deg_a as i64), &a.bracket(&b.d(&m), &m).unwrap());
                            prop_assert!(lhs.is_zero());
                        }
                    }
                }
            }
        }

        #[test]
        fn fundamental_theorem(coeffs in prop::collection::vec(-4i64..=4, 1..4), a in -2i64..=2, b in -2i64..=2) {
            // p = Σ tⁱ e with d e = 0
            let m = sl2();
            let mut p = PolyElement::zero(4);
            for (i, c) in coeffs.iter().enumerate() {
                p.add_monomial(i, false, Vector::term(0, int(*c))).unwrap();
            }
            let (a, b) = (int(a), int(b));
            let mut rhs = p.evaluate_at(&b);
            rhs.sub(&p.evaluate_at(&a));
            prop_assert_eq!(p.d(&m).integrate(&a, &b), rhs);
            let cs: Vec<Scalar> = coeffs.iter().map(|c| int(*c)).collect();
            prop_assert_eq!(p.evaluate_at(&b), Vector::term(0, poly_eval(&cs, &b)));
        }
    }
}
