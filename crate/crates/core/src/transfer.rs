//! Homotopy transfer from the path object `H_χ ⊂ L × M[t,dt]` to the cone.
//!
//! Two independent evaluations of the transferred brackets: the recursion
//! `f₁ = ι`, `f_n = K q₂(f^{(2)})`, `⟨ ⟩_n = π q₂(f^{(2)})`, and a sum over
//! rooted trees with leaves `ι`, inner vertices `K q_r` and root `π q_r`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use itertools::Itertools;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::PolyElement;
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::graded::{canonicalize, expand_product, koszul_sign_unchecked, unshuffles, GradedSpace, Vector};
use crate::linfty::Brackets;
use crate::scalar::{frac, int, sign, Scalar};

/// An element `(l, m(t, dt))` of `L × M[t,dt]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HElem {
    pub l: Vector,
    pub m: PolyElement,
}

impl HElem {
    pub fn zero(cap: usize) -> Self {
        HElem {
            l: Vector::zero(),
            m: PolyElement::zero(cap),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.l.is_zero() && self.m.is_zero()
    }

    pub fn axpy(&mut self, c: &Scalar, other: &HElem) {
        self.l.axpy(c, &other.l);
        self.m.axpy(c, &other.m);
    }

    pub fn add(&mut self, other: &HElem) {
        self.axpy(&Scalar::one(), other);
    }

    pub fn sub(&mut self, other: &HElem) {
        self.axpy(&-Scalar::one(), other);
    }

    pub fn scaled(&self, c: &Scalar) -> HElem {
        HElem {
            l: self.l.scaled(c),
            m: self.m.scaled(c),
        }
    }
}

/// The DGLA `H_χ` with the contraction `(ι, π, K)` onto `C_χ`, acting on
/// suspended elements.
#[derive(Debug, Clone)]
pub struct PathObject {
    cone: Arc<Cone>,
    cap: usize,
}

impl PathObject {
    pub fn new(cone: Arc<Cone>, cap: usize) -> Self {
        PathObject { cone, cap }
    }

    pub fn cone(&self) -> &Arc<Cone> {
        &self.cone
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Splits into homogeneous pieces, keyed by unsuspended degree in `H_χ`.
    fn components(&self, x: &HElem) -> Vec<(i32, HElem)> {
        let (ls, ms) = (self.cone.l().space(), self.cone.m().space());
        let mut out: std::collections::BTreeMap<i32, HElem> = Default::default();
        for (i, c) in x.l.iter() {
            out.entry(ls.degree(i))
                .or_insert_with(|| HElem::zero(self.cap))
                .l
                .add_term(i, c.clone());
        }
        for (p, dt, v) in x.m.terms() {
            for (j, c) in v.iter() {
                let e = out.entry(ms.degree(j) + dt as i32).or_insert_with(|| HElem::zero(self.cap));
                e.m.add_monomial(p, dt, Vector::term(j, c.clone()))
                    .expect("power already within the cap");
            }
        }
        out.into_iter().collect()
    }

    pub fn d(&self, x: &HElem) -> HElem {
        HElem {
            l: self.cone.l().d(&x.l),
            m: x.m.d(self.cone.m()),
        }
    }

    pub fn bracket(&self, x: &HElem, y: &HElem) -> Result<HElem> {
        Ok(HElem {
            l: self.cone.l().bracket(&x.l, &y.l),
            m: x.m.bracket(&y.m, self.cone.m())?,
        })
    }

    /// `q₁ = −d` on `H_χ[1]`.
    pub fn q1(&self, x: &HElem) -> HElem {
        self.d(x).scaled(&-Scalar::one())
    }

    /// `q₂(x ⊙ y) = (−1)^{|x|}[x, y]`, `|x|` the unsuspended degree.
    pub fn q2(&self, x: &HElem, y: &HElem) -> Result<HElem> {
        let mut out = HElem::zero(self.cap);
        for (deg, xc) in self.components(x) {
            out.axpy(&sign(deg as i64), &self.bracket(&xc, y)?);
        }
        Ok(out)
    }

    /// `ι(l, m) = (l, tχ(l) + dt·m)` on a vector of `C_χ[1]`.
    pub fn iota(&self, w: &Vector) -> HElem {
        let (l, m) = self.cone.split(w);
        let chil = self.cone.chi().apply(&l);
        let mut p = PolyElement::zero(self.cap);
        p.add_monomial(1, false, chil).expect("cap ≥ 1");
        p.add_monomial(0, true, m).expect("cap ≥ 1");
        HElem { l, m: p }
    }

    /// Whether `e₀(m) = 0` and `e₁(m) = χ(l)`.
    pub fn in_h(&self, x: &HElem) -> bool {
        x.m.evaluate_at(&Scalar::zero()).is_zero()
            && x.m.evaluate_at(&Scalar::one()) == self.cone.chi().apply(&x.l)
    }

    /// `π(l, m) = (l, ∫₀¹ m)`.
    pub fn pi(&self, x: &HElem) -> Result<Vector> {
        if !self.in_h(x) {
            return Err(Error::arg("element violates e₀(m) = 0 or e₁(m) = χ(l)"));
        }
        Ok(self.pi_unchecked(x))
    }

    fn pi_unchecked(&self, x: &HElem) -> Vector {
        self.cone.join(&x.l, &x.m.integrate(&Scalar::zero(), &Scalar::one()))
    }

    /// `K(l, m) = (0, ∫₀ᵗ m − t ∫₀¹ m)`.
    pub fn k(&self, x: &HElem) -> Result<HElem> {
        let mut p = x.m.integral_from_zero()?;
        let total = x.m.integrate(&Scalar::zero(), &Scalar::one());
        p.add_monomial(1, false, total.neg())?;
        Ok(HElem {
            l: Vector::zero(),
            m: p,
        })
    }

    /// A spanning set of the capped `H_χ`: `(l, tχ(l))`, `(0, (tⁱ − tⁱ⁺¹)m)`
    /// for `1 ≤ i < cap`, and `(0, tⁱ dt·m)` for `0 ≤ i < cap`.
    pub fn spanning_set(&self) -> Vec<HElem> {
        let (l, m) = (self.cone.l(), self.cone.m());
        let mut out = Vec::new();
        for i in 0..l.dim() {
            let w = self.cone.join(&Vector::basis(i), &Vector::zero());
            out.push(self.iota(&w));
        }
        for j in 0..m.dim() {
            let e = Vector::basis(j);
            for i in 1..self.cap {
                let mut p = PolyElement::zero(self.cap);
                p.add_monomial(i, false, e.clone()).unwrap();
                p.add_monomial(i + 1, false, e.neg()).unwrap();
                out.push(HElem { l: Vector::zero(), m: p });
            }
            for i in 0..self.cap {
                let p = PolyElement::monomial(self.cap, i, true, e.clone()).unwrap();
                out.push(HElem { l: Vector::zero(), m: p });
            }
        }
        out
    }
}

/// The transferred structure computed by the recursion, with the components
/// `f_n` of the L∞ morphism `ι_∞` memoized by canonical word.
pub struct RecursiveTransfer {
    h: PathObject,
    max_arity: usize,
    memo: Mutex<HashMap<Vec<usize>, Arc<HElem>>>,
}

impl fmt::Debug for RecursiveTransfer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecursiveTransfer")
            .field("max_arity", &self.max_arity)
            .field("cap", &self.h.cap)
            .finish()
    }
}

impl RecursiveTransfer {
    /// Uses `t`-degree cap `max_arity + 2`.
    pub fn new(cone: Arc<Cone>, max_arity: usize) -> Result<Self> {
        Self::with_cap(cone, max_arity, max_arity + 2)
    }

    pub fn with_cap(cone: Arc<Cone>, max_arity: usize, cap: usize) -> Result<Self> {
        if max_arity < 2 {
            return Err(Error::arg("transfer needs max arity ≥ 2"));
        }
        Ok(RecursiveTransfer {
            h: PathObject::new(cone, cap),
            max_arity,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn path_object(&self) -> &PathObject {
        &self.h
    }

    /// `½ Σ_{k=1}^{n−1} Σ_{σ ∈ S(k,n−k)} ε(σ) q₂(f_k(w_σ(1..k)) ⊙ f_{n−k}(w_σ(k+1..n)))`.
    fn q2_of_square(&self, word: &[usize]) -> Result<HElem> {
        let n = word.len();
        let degrees = self.space().degrees_of(word);
        let mut acc = HElem::zero(self.h.cap);
        for k in 1..n {
            for sigma in unshuffles(k, n - k) {
                let a: Vec<usize> = sigma[..k].iter().map(|&p| word[p]).collect();
                let b: Vec<usize> = sigma[k..].iter().map(|&p| word[p]).collect();
                let (fa, fb) = (self.component(&a)?, self.component(&b)?);
                if fa.is_zero() || fb.is_zero() {
                    continue;
                }
                let eps = koszul_sign_unchecked(&sigma, &degrees);
                acc.axpy(&int(eps as i64), &self.h.q2(&fa, &fb)?);
            }
        }
        Ok(acc.scaled(&frac(1, 2)))
    }

    /// `f_n` on a canonical word (sub-blocks of a sorted word stay sorted).
    pub fn component(&self, word: &[usize]) -> Result<Arc<HElem>> {
        if let Some(v) = self.memo.lock().unwrap().get(word) {
            return Ok(v.clone());
        }
        let value = if word.len() == 1 {
            self.h.iota(&Vector::basis(word[0]))
        } else if canonicalize(self.space(), word).is_none() {
            HElem::zero(self.h.cap)
        } else {
            self.h.k(&self.q2_of_square(word)?)?
        };
        let value = Arc::new(value);
        self.memo.lock().unwrap().insert(word.to_vec(), value.clone());
        Ok(value)
    }

    /// `f_n` on arbitrary vectors, by multilinear expansion.
    pub fn component_vectors(&self, args: &[Vector]) -> Result<HElem> {
        let mut out = HElem::zero(self.h.cap);
        for (w, c) in expand_product(self.space(), args) {
            out.axpy(&c, &*self.component(&w)?);
        }
        Ok(out)
    }

    /// `⟨w⟩_n`, or the capacity error raised by the path object.
    pub fn try_bracket(&self, word: &[usize]) -> Result<Vector> {
        if word.len() == 1 {
            let (c, delta) = crate::cone::cone_complex(self.h.cone())?;
            debug_assert_eq!(c.dim(), self.space().dim());
            return Ok(delta.image(word[0]).neg());
        }
        self.h.pi(&self.q2_of_square(word)?)
    }

    /// Residual of `(Q_H ι_∞)¹ = (ι_∞ Q̂)¹` on a basis word.
    pub fn morphism_residual(&self, word: &[usize]) -> Result<HElem> {
        let n = word.len();
        let mut lhs = self.h.q1(&*self.component(word)?);
        if n >= 2 {
            lhs.add(&self.q2_of_square(word)?);
        }
        let degrees = self.space().degrees_of(word);
        for k in 1..=n {
            for sigma in unshuffles(k, n - k) {
                let head: Vec<usize> = sigma[..k].iter().map(|&p| word[p]).collect();
                let q = self.try_bracket_any(&head)?;
                if q.is_zero() {
                    continue;
                }
                let mut args = vec![q];
                args.extend(sigma[k..].iter().map(|&p| Vector::basis(word[p])));
                let eps = koszul_sign_unchecked(&sigma, &degrees);
                lhs.axpy(&-int(eps as i64), &self.component_vectors(&args)?);
            }
        }
        Ok(lhs)
    }

    fn try_bracket_any(&self, factors: &[usize]) -> Result<Vector> {
        Ok(match canonicalize(self.space(), factors) {
            None => Vector::zero(),
            Some(w) => self.try_bracket(&w.factors)?.scaled(&int(w.sign as i64)),
        })
    }
}

impl Brackets for RecursiveTransfer {
    fn space(&self) -> &GradedSpace {
        self.h.cone.space()
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn vanishing_above(&self) -> bool {
        false
    }

    /// Panics on a capacity error; use [`RecursiveTransfer::try_bracket`] to observe it.
    fn bracket_sorted(&self, word: &[usize]) -> Vector {
        self.try_bracket(word).expect("t-degree cap too small for this arity")
    }
}

/// A rooted tree in canonical form: children sorted, leaves unlabeled.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf,
    Node(Vec<Tree>),
}

impl Tree {
    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Node(ch) => ch.iter().map(Tree::leaves).sum(),
        }
    }

    /// `|Aut|`: product over vertices of the factorials of equal-child multiplicities.
    pub fn automorphisms(&self) -> u64 {
        match self {
            Tree::Leaf => 1,
            Tree::Node(ch) => {
                let own: u64 = ch
                    .iter()
                    .chunk_by(|c| *c)
                    .into_iter()
                    .map(|(_, g)| (1..=g.count() as u64).product::<u64>())
                    .product();
                own * ch.iter().map(Tree::automorphisms).product::<u64>()
            }
        }
    }

    /// Whether every internal vertex has exactly two children.
    pub fn is_binary(&self) -> bool {
        match self {
            Tree::Leaf => true,
            Tree::Node(ch) => ch.len() == 2 && ch.iter().all(Tree::is_binary),
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf => f.write_str("*"),
            Tree::Node(ch) => {
                f.write_str("(")?;
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// All isomorphism classes of rooted trees with `n` leaves whose internal
/// vertices have at least two children, each with `|Aut|`.
pub fn enumerate_trees(n: usize) -> Vec<(Tree, u64)> {
    let mut by_size: Vec<Vec<Tree>> = vec![vec![], vec![Tree::Leaf]];
    for k in 2..=n.max(1) {
        let mut out = Vec::new();
        for parts in partitions_at_least_two(k) {
            // parts is non-increasing; choose a non-increasing sequence of trees
            let mut acc: Vec<Vec<Tree>> = vec![vec![]];
            for &p in &parts {
                let mut next = Vec::new();
                for prefix in &acc {
                    for t in &by_size[p] {
                        // within equal sizes keep children sorted to avoid duplicates
                        if let Some(last) = prefix.last() {
                            if last.leaves() == p && t < last {
                                continue;
                            }
                        }
                        let mut v = prefix.clone();
                        v.push(t.clone());
                        next.push(v);
                    }
                }
                acc = next;
            }
            for mut ch in acc {
                ch.sort();
                out.push(Tree::Node(ch));
            }
        }
        out.sort();
        out.dedup();
        by_size.push(out);
    }
    if n < 2 {
        return vec![];
    }
    by_size[n].iter().map(|t| (t.clone(), t.automorphisms())).collect()
}

fn partitions_at_least_two(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n - 1, &mut Vec::new(), &mut out);
    out
}

/// Brackets computed as `Σ_Γ Z_Γ / |Aut Γ|` over rooted trees.
pub struct TreeSum {
    h: PathObject,
    max_arity: usize,
    trees: Vec<Vec<(Tree, u64)>>,
    memo: Mutex<HashMap<(Tree, Vec<usize>), Arc<HElem>>>,
}

impl fmt::Debug for TreeSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeSum").field("max_arity", &self.max_arity).finish()
    }
}

impl TreeSum {
    pub fn new(cone: Arc<Cone>, max_arity: usize) -> Result<Self> {
        if max_arity < 2 {
            return Err(Error::arg("tree sums need max arity ≥ 2"));
        }
        let trees = (0..=max_arity).map(enumerate_trees).collect();
        Ok(TreeSum {
            h: PathObject::new(cone, max_arity + 2),
            max_arity,
            trees,
            memo: Mutex::new(HashMap::new()),
        })
    }

    /// `q_r` on `H_χ[1]`: only `q₂` is nonzero above arity one.
    fn q(&self, args: &[HElem]) -> Result<HElem> {
        match args {
            [a, b] => self.h.q2(a, b),
            _ => Ok(HElem::zero(self.h.cap)),
        }
    }

    /// Planar evaluation of an inner subtree on an ordered tuple of inputs:
    /// a leaf gives `ι`, an inner vertex `K q_r`.
    fn inner(&self, t: &Tree, inputs: &[usize]) -> Result<Arc<HElem>> {
        let key = (t.clone(), inputs.to_vec());
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = match t {
            Tree::Leaf => self.h.iota(&Vector::basis(inputs[0])),
            Tree::Node(ch) => self.h.k(&self.q(&self.children(ch, inputs)?)?)?,
        };
        let v = Arc::new(v);
        self.memo.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    fn children(&self, ch: &[Tree], inputs: &[usize]) -> Result<Vec<HElem>> {
        let mut vals = Vec::with_capacity(ch.len());
        let mut start = 0;
        for c in ch {
            let n = c.leaves();
            vals.push((*self.inner(c, &inputs[start..start + n])?).clone());
            start += n;
        }
        Ok(vals)
    }

    /// `Z_Γ(w) = Σ_{σ ∈ S_n} ε(σ) · (planar evaluation on w_σ)`, root `π q_r`.
    pub fn z(&self, tree: &Tree, word: &[usize]) -> Result<Vector> {
        let Tree::Node(ch) = tree else {
            return Err(Error::arg("a root must be an inner vertex"));
        };
        let n = word.len();
        let degrees = self.space().degrees_of(word);
        let mut acc = HElem::zero(self.h.cap);
        for sigma in (0..n).permutations(n) {
            let eps = koszul_sign_unchecked(&sigma, &degrees);
            let inputs: Vec<usize> = sigma.iter().map(|&p| word[p]).collect();
            let v = self.q(&self.children(ch, &inputs)?)?;
            acc.axpy(&int(eps as i64), &v);
        }
        self.h.pi(&acc)
    }

    pub fn try_bracket(&self, word: &[usize]) -> Result<Vector> {
        let n = word.len();
        if n == 1 {
            let (_, delta) = crate::cone::cone_complex(self.h.cone())?;
            return Ok(delta.image(word[0]).neg());
        }
        if n > self.max_arity {
            return Err(Error::Capacity {
                what: "bracket arity".into(),
                needed: n,
                limit: self.max_arity,
            });
        }
        let mut out = Vector::zero();
        for (tree, aut) in &self.trees[n] {
            let z = self.z(tree, word)?;
            out.axpy(&(Scalar::one() / int(*aut as i64)), &z);
        }
        Ok(out)
    }
}

impl Brackets for TreeSum {
    fn space(&self) -> &GradedSpace {
        self.h.cone.space()
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn vanishing_above(&self) -> bool {
        false
    }

    fn bracket_sorted(&self, word: &[usize]) -> Vector {
        self.try_bracket(word).expect("t-degree cap too small for this arity")
    }
}

/// Canonical words of length `2..=max_arity` on which two bracket families differ.
pub fn compare_brackets(
    a: &dyn Brackets,
    b: &dyn Brackets,
    arities: std::ops::RangeInclusive<usize>,
) -> Vec<(Vec<usize>, Vector, Vector)> {
    let words: Vec<Vec<usize>> = arities
        .flat_map(|n| crate::graded::sym_basis_words(a.space(), n))
        .collect();
    let mut diffs: Vec<_> = words
        .into_par_iter()
        .filter_map(|w| {
            let (x, y) = (a.bracket_sorted(&w), b.bracket_sorted(&w));
            (x != y).then_some((w, x, y))
        })
        .collect();
    diffs.sort_by(|p, q| p.0.cmp(&q.0));
    diffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DglaMorphism;
    use crate::cone::ConeBrackets;
    use crate::fixtures;

    fn cones() -> Vec<Arc<Cone>> {
        vec![
            Arc::new(Cone::new(DglaMorphism::identity(Arc::new(fixtures::sl2()))).unwrap()),
            Arc::new(Cone::new(fixtures::gl11_borel()).unwrap()),
        ]
    }

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (2..=5).map(|n| enumerate_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 12]);
        assert_eq!(enumerate_trees(2), vec![(Tree::Node(vec![Tree::Leaf, Tree::Leaf]), 2)]);
    }

    #[test]
    fn contraction_identities() {
        for cone in cones() {
            let h = PathObject::new(cone, 4);
            for x in h.spanning_set() {
                assert!(h.in_h(&x));
                // πι = Id
                let w = h.pi(&x).unwrap();
                assert_eq!(h.pi(&h.iota(&w)).unwrap(), w);
                // ιπ − Id = K q₁ + q₁ K
                let mut lhs = h.iota(&w);
                lhs.sub(&x);
                let mut rhs = h.k(&h.q1(&x)).unwrap();
                rhs.add(&h.q1(&h.k(&x).unwrap()));
                assert_eq!(lhs, rhs);
                // side conditions
                let kx = h.k(&x).unwrap();
                assert!(h.pi(&kx).unwrap().is_zero());
                assert!(h.k(&kx).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn recursion_matches_closed_form_and_trees() {
        for cone in cones() {
            let closed = ConeBrackets::new(cone.clone(), 4).unwrap();
            let rec = RecursiveTransfer::new(cone.clone(), 4).unwrap();
            let trees = TreeSum::new(cone.clone(), 4).unwrap();
            let d1 = compare_brackets(&closed, &rec, 1..=4);
            assert!(d1.is_empty(), "closed vs recursion: {:?}", &d1[..d1.len().min(2)]);
            let d2 = compare_brackets(&rec, &trees, 1..=4);
            assert!(d2.is_empty(), "recursion vs trees: {:?}", &d2[..d2.len().min(2)]);
        }
    }

    #[test]
    fn iota_infinity_is_a_morphism() {
        let cone = cones().remove(1);
        let rec = RecursiveTransfer::new(cone.clone(), 4).unwrap();
        for n in 1..=3 {
            for w in crate::graded::sym_basis_words(cone.space(), n) {
                assert!(rec.morphism_residual(&w).unwrap().is_zero(), "{w:?}");
            }
        }
    }
}
