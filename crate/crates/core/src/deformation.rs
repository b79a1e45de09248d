//! Maurer–Cartan elements over local Artinian rings, the gauge action and
//! the gauge/homotopy correspondence for pairs `(l, m) ∈ MC_χ(A)`.
//!
//! The maximal ideal `m_A` sits in degree 0, so extending a multilinear map
//! to `V ⊗ m_A` introduces no signs.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{ArtinAlgebra, Dgla, DglaMorphism, PolyForms, TensorDgla};
use crate::cone::{Cone, ConeBrackets};
use crate::error::{Error, Result};
use crate::graded::{GradedSpace, Vector};
use crate::linfty::Brackets;
use crate::scalar::{factorial, frac, int, Scalar};

/// An element of `V ⊗ m_A`, stored as one vector of `V` per monomial of `m_A`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TensorElement {
    by_monomial: BTreeMap<usize, Vector>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `v ⊗ monomial`
    pub fn pure(v: &Vector, monomial: usize) -> Self {
        let mut t = Self::zero();
        t.add_pure(v, monomial);
        t
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), Scalar)>) -> Self {
        let mut t = Self::zero();
        for ((b, m), c) in terms {
            t.add_pure(&Vector::term(b, c), m);
        }
        t
    }

    /// `((basis, monomial), coefficient)` in lexicographic order.
    pub fn terms(&self) -> Vec<((usize, usize), Scalar)> {
        let mut out: Vec<_> = self
            .by_monomial
            .iter()
            .flat_map(|(&m, v)| v.iter().map(move |(b, c)| ((b, m), c.clone())))
            .collect();
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }

    pub fn components(&self) -> &BTreeMap<usize, Vector> {
        &self.by_monomial
    }

    pub fn component(&self, monomial: usize) -> Vector {
        self.by_monomial.get(&monomial).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.by_monomial.is_empty()
    }

    pub fn add_pure(&mut self, v: &Vector, monomial: usize) {
        self.axpy_pure(&Scalar::one(), v, monomial);
    }

    fn axpy_pure(&mut self, c: &Scalar, v: &Vector, monomial: usize) {
        let e = self.by_monomial.entry(monomial).or_default();
        e.axpy(c, v);
        if e.is_zero() {
            self.by_monomial.remove(&monomial);
        }
    }

    /// `v ⊗ a` for an arbitrary element `a` of `m_A`.
    pub fn add_tensor(&mut self, c: &Scalar, v: &Vector, a: &Vector) {
        for (m, x) in a.iter() {
            self.axpy_pure(&(c * x), v, m);
        }
    }

    pub fn axpy(&mut self, c: &Scalar, other: &TensorElement) {
        for (&m, v) in &other.by_monomial {
            self.axpy_pure(c, v, m);
        }
    }

    pub fn add(&mut self, other: &TensorElement) {
        self.axpy(&Scalar::one(), other);
    }

    pub fn sub(&mut self, other: &TensorElement) {
        self.axpy(&-Scalar::one(), other);
    }

    pub fn plus(&self, other: &TensorElement) -> TensorElement {
        let mut t = self.clone();
        t.add(other);
        t
    }

    pub fn minus(&self, other: &TensorElement) -> TensorElement {
        let mut t = self.clone();
        t.sub(other);
        t
    }

    pub fn scaled(&self, c: &Scalar) -> TensorElement {
        let mut t = TensorElement::zero();
        t.axpy(c, self);
        t
    }

    pub fn neg(&self) -> TensorElement {
        self.scaled(&-Scalar::one())
    }

    /// `f ⊗ id` for a linear map `f` on the vector factor.
    pub fn map(&self, f: impl Fn(&Vector) -> Vector) -> TensorElement {
        let mut t = TensorElement::zero();
        for (&m, v) in &self.by_monomial {
            t.add_pure(&f(v), m);
        }
        t
    }

    /// Whether every term has degree `d` in `space` (vacuously true for zero).
    pub fn has_degree(&self, space: &GradedSpace, d: i32) -> bool {
        self.by_monomial.values().flat_map(|v| v.iter()).all(|(i, _)| space.degree(i) == d)
    }

    /// Terms whose monomial lies outside `keep` are dropped.
    pub fn restricted(&self, keep: impl Fn(usize) -> bool) -> TensorElement {
        TensorElement {
            by_monomial: self.by_monomial.iter().filter(|(m, _)| keep(**m)).map(|(m, v)| (*m, v.clone())).collect(),
        }
    }
}

/// Multilinear extension of a binary operation on `V` to `V ⊗ m_A`.
fn bilinear(
    a: &ArtinAlgebra,
    x: &TensorElement,
    y: &TensorElement,
    f: impl Fn(&Vector, &Vector) -> Vector,
) -> TensorElement {
    let mut out = TensorElement::zero();
    for (&p, u) in &x.by_monomial {
        for (&q, v) in &y.by_monomial {
            let pq = a.mul(&Vector::basis(p), &Vector::basis(q));
            if pq.is_zero() {
                continue;
            }
            out.add_tensor(&Scalar::one(), &f(u, v), &pq);
        }
    }
    out
}

pub fn bracket(g: &Dgla, a: &ArtinAlgebra, x: &TensorElement, y: &TensorElement) -> TensorElement {
    bilinear(a, x, y, |u, v| g.bracket(u, v))
}

pub fn differential(g: &Dgla, x: &TensorElement) -> TensorElement {
    x.map(|v| g.d(v))
}

/// `Σ_{n≥1} q_n(γ^{⊙n}) / n!` for `γ` of degree 0 in the suspended space.
///
/// All components of `γ` are even, so `q_n(γ^{⊙n})/n!` is a sum over multisets
/// of components weighted by `1/∏ multiplicity!`.
pub fn mc_residue(b: &dyn Brackets, a: &ArtinAlgebra, gamma: &TensorElement) -> Result<TensorElement> {
    if !gamma.has_degree(b.space(), 0) {
        return Err(Error::arg("Maurer–Cartan candidates must have degree 0 in the suspended space"));
    }
    let top = a.nil_index() - 1;
    if b.max_arity() < top && !b.vanishing_above() {
        return Err(Error::Capacity {
            what: "bracket arity".into(),
            needed: top,
            limit: b.max_arity(),
        });
    }
    let comps: Vec<(usize, &Vector)> = gamma.by_monomial.iter().map(|(m, v)| (*m, v)).collect();
    let mut out = TensorElement::zero();
    let mut stack: Vec<usize> = Vec::new();
    residue_terms(b, a, &comps, &mut stack, None, top, &mut out)?;
    Ok(out)
}

fn residue_terms(
    b: &dyn Brackets,
    a: &ArtinAlgebra,
    comps: &[(usize, &Vector)],
    stack: &mut Vec<usize>,
    product: Option<Vector>,
    top: usize,
    out: &mut TensorElement,
) -> Result<()> {
    if let Some(p) = &product {
        let args: Vec<Vector> = stack.iter().map(|&i| comps[i].1.clone()).collect();
        let q = b.bracket_vectors(&args)?;
        if !q.is_zero() {
            let mut weight = Scalar::one();
            for (_, run) in &itertools::Itertools::chunk_by(stack.iter(), |&&i| i) {
                weight /= factorial(run.count());
            }
            out.add_tensor(&weight, &q, p);
        }
    }
    if stack.len() == top {
        return Ok(());
    }
    let start = stack.last().copied().unwrap_or(0);
    for i in start..comps.len() {
        let mono = Vector::basis(comps[i].0);
        let next = match &product {
            None => mono,
            Some(p) => a.mul(p, &mono),
        };
        if next.is_zero() {
            continue;
        }
        stack.push(i);
        residue_terms(b, a, comps, stack, Some(next), top, out)?;
        stack.pop();
    }
    Ok(())
}

/// `e^a ∗ y = y + Σ_{n≥0} ad_a^n([a, y] − da) / (n+1)!` for `a` of degree 0.
pub fn gauge_action(g: &Dgla, a: &ArtinAlgebra, x: &TensorElement, y: &TensorElement) -> TensorElement {
    let mut term = bracket(g, a, x, y).minus(&differential(g, x));
    let mut out = y.clone();
    let mut n = 0;
    while !term.is_zero() {
        out.axpy(&(Scalar::one() / factorial(n + 1)), &term);
        term = bracket(g, a, x, &term);
        n += 1;
    }
    out
}

/// Dynkin's coefficients for words of length `k` in letters `X` (`false`) and `Y` (`true`);
/// `log(e^X e^Y)` is the sum of the right-nested brackets of these words.
fn dynkin_words(k: usize) -> BTreeMap<Vec<bool>, Scalar> {
    fn go(
        k: usize,
        left: usize,
        blocks: &mut Vec<(usize, usize)>,
        out: &mut BTreeMap<Vec<bool>, Scalar>,
    ) {
        if left == 0 {
            let n = blocks.len();
            let mut c = frac(if n % 2 == 1 { 1 } else { -1 }, n as i64) / int(k as i64);
            let mut word = Vec::with_capacity(k);
            for &(r, s) in blocks.iter() {
                c /= factorial(r) * factorial(s);
                word.extend(std::iter::repeat_n(false, r));
                word.extend(std::iter::repeat_n(true, s));
            }
            *out.entry(word).or_insert_with(Scalar::zero) += c;
            return;
        }
        for total in 1..=left {
            for r in 0..=total {
                blocks.push((r, total - r));
                go(k, left - total, blocks, out);
                blocks.pop();
            }
        }
    }
    let mut out = BTreeMap::new();
    go(k, k, &mut Vec::new(), &mut out);
    out.retain(|w, c| !c.is_zero() && (w.len() < 2 || w[w.len() - 1] != w[w.len() - 2]));
    out
}

/// Baker–Campbell–Hausdorff product `x • y` in `g⁰ ⊗ m_A`, with `e^{x•y} = e^x e^y`.
pub fn bch(g: &Dgla, a: &ArtinAlgebra, x: &TensorElement, y: &TensorElement) -> TensorElement {
    let mut out = x.plus(y);
    for k in 2..a.nil_index() {
        for (word, c) in dynkin_words(k) {
            let mut acc = if word[k - 1] { y.clone() } else { x.clone() };
            for &letter in word[..k - 1].iter().rev() {
                acc = bracket(g, a, if letter { y } else { x }, &acc);
                if acc.is_zero() {
                    break;
                }
            }
            out.axpy(&c, &acc);
        }
    }
    out
}

/// `(x, a) ∈ (L¹ ⊗ m_A) × (M⁰ ⊗ m_A)`
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MCPair {
    pub x: TensorElement,
    pub a: TensorElement,
}

/// `(a, b) ∈ (L⁰ ⊕ M⁻¹) ⊗ m_A`
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GaugeWitness {
    pub a: TensorElement,
    pub b: TensorElement,
}

fn check_degrees(chi: &DglaMorphism, p: &MCPair) -> Result<()> {
    if !p.x.has_degree(chi.source.space(), 1) || !p.a.has_degree(chi.target.space(), 0) {
        return Err(Error::arg("pair components must lie in L¹ ⊗ m_A and M⁰ ⊗ m_A"));
    }
    Ok(())
}

/// `(dx + ½[x,x], e^a ∗ χ(x))`
pub fn mc_pair_residues(chi: &DglaMorphism, art: &ArtinAlgebra, p: &MCPair) -> (TensorElement, TensorElement) {
    let l = &chi.source;
    let mut first = differential(l, &p.x);
    first.axpy(&frac(1, 2), &bracket(l, art, &p.x, &p.x));
    let second = gauge_action(&chi.target, art, &p.a, &p.x.map(|v| chi.apply(v)));
    (first, second)
}

pub fn mc_pair_check(chi: &DglaMorphism, art: &ArtinAlgebra, p: &MCPair) -> bool {
    let (r1, r2) = mc_pair_residues(chi, art, p);
    r1.is_zero() && r2.is_zero()
}

/// `γ = (x, a)` in the suspended cone.
pub fn cone_element(cone: &Cone, p: &MCPair) -> TensorElement {
    let mut out = TensorElement::zero();
    for (&m, v) in p.x.components() {
        out.add_pure(&cone.join(v, &Vector::zero()), m);
    }
    for (&m, v) in p.a.components() {
        out.add_pure(&cone.join(&Vector::zero(), v), m);
    }
    out
}

/// Inverse of [`cone_element`].
pub fn pair_of(cone: &Cone, gamma: &TensorElement) -> MCPair {
    let mut p = MCPair::default();
    for (&m, v) in gamma.components() {
        let (l, mm) = cone.split(v);
        p.x.add_pure(&l, m);
        p.a.add_pure(&mm, m);
    }
    p
}

/// `(e^l ∗ x, db • a • (−χ(l)))`
pub fn gauge_pair_act(chi: &DglaMorphism, art: &ArtinAlgebra, w: &GaugeWitness, p: &MCPair) -> MCPair {
    let m = &chi.target;
    let x = gauge_action(&chi.source, art, &w.a, &p.x);
    let db = differential(m, &w.b);
    let chil = w.a.map(|v| chi.apply(v)).neg();
    let a = bch(m, art, &db, &bch(m, art, &p.a, &chil));
    MCPair { x, a }
}

fn check_witness(chi: &DglaMorphism, w: &GaugeWitness) -> Result<()> {
    if !w.a.has_degree(chi.source.space(), 0) || !w.b.has_degree(chi.target.space(), -1) {
        return Err(Error::arg("gauge witnesses must lie in L⁰ ⊗ m_A and M⁻¹ ⊗ m_A"));
    }
    Ok(())
}

/// `x₁ = e^a ∗ x₀` and `a₁ = db • a₀ • (−χ(a))`.
pub fn gauge_equiv_check(
    chi: &DglaMorphism,
    art: &ArtinAlgebra,
    p0: &MCPair,
    p1: &MCPair,
    w: &GaugeWitness,
) -> bool {
    gauge_pair_act(chi, art, w, p0) == *p1
}

/// A path in `MC_χ` over `K[s, ds]`: the morphism `χ ⊗ id` together with the
/// MC pair `(l̃, m̃)` it carries.
#[derive(Debug, Clone)]
pub struct Homotopy {
    pub forms: PolyForms,
    pub l: TensorDgla,
    pub m: TensorDgla,
    pub chi: DglaMorphism,
    pub path: MCPair,
}

impl Homotopy {
    /// Polynomial forms large enough for every power of `s` that can survive in `m_A`.
    pub fn forms_for(art: &ArtinAlgebra) -> PolyForms {
        PolyForms::new(art.nil_index().max(2) - 1).expect("cap ≥ 1")
    }

    pub fn new(chi: &DglaMorphism, forms: PolyForms, path: MCPair) -> Result<Self> {
        let (l, m, chi_s) = chi.tensor(&forms.algebra)?;
        let h = Homotopy { forms, l, m, chi: chi_s, path };
        check_degrees(&h.chi, &h.path)?;
        Ok(h)
    }

    /// The pair at `s = c`.
    pub fn endpoint(&self, c: &Scalar) -> MCPair {
        let ev = self.forms.eval_at(c);
        MCPair {
            x: self.path.x.map(|v| self.l.contract(v, &ev)),
            a: self.path.a.map(|v| self.m.contract(v, &ev)),
        }
    }

    /// MC residue of `(l̃, m̃)` in the cone of `χ ⊗ id_{K[s,ds]}`.
    pub fn residue(&self, art: &ArtinAlgebra) -> Result<TensorElement> {
        let cone = Arc::new(Cone::new(self.chi.clone())?);
        let q = ConeBrackets::new(cone.clone(), art.nil_index().max(2) - 1)?;
        mc_residue(&q, art, &cone_element(&cone, &self.path))
    }
}

/// Constant extension `x ↦ x ⊗ 1`.
fn constant(t: &TensorDgla, forms: &PolyForms, x: &TensorElement) -> TensorElement {
    x.map(|v| t.embed(v, forms.s_pow(0)))
}

/// `x ↦ x ⊗ s`
fn times_s(t: &TensorDgla, forms: &PolyForms, x: &TensorElement) -> TensorElement {
    x.map(|v| t.embed(v, forms.s_pow(1)))
}

/// `l̃ = e^{sλ} ∗ l₀` and `m̃ = d(sν) • m₀ • (−χ(sλ))` for a witness `(λ, ν)`.
pub fn homotopy_from_gauge(
    chi: &DglaMorphism,
    art: &ArtinAlgebra,
    p0: &MCPair,
    w: &GaugeWitness,
) -> Result<Homotopy> {
    check_degrees(chi, p0)?;
    check_witness(chi, w)?;
    if !mc_pair_check(chi, art, p0) {
        return Err(Error::arg("the starting pair is not a Maurer–Cartan pair"));
    }
    let forms = Homotopy::forms_for(art);
    let (lt, mt, chi_s) = chi.tensor(&forms.algebra)?;
    let (ls, ms) = (&lt.dgla, &mt.dgla);
    let s_lambda = times_s(&lt, &forms, &w.a);
    let l_path = gauge_action(ls, art, &s_lambda, &constant(&lt, &forms, &p0.x));
    let d_snu = differential(ms, &times_s(&mt, &forms, &w.b));
    let chi_sl = s_lambda.map(|v| chi_s.apply(v)).neg();
    let m0 = constant(&mt, &forms, &p0.a);
    let m_path = bch(ms, art, &d_snu, &bch(ms, art, &m0, &chi_sl));
    Ok(Homotopy {
        forms,
        l: lt,
        m: mt,
        chi: chi_s,
        path: MCPair { x: l_path, a: m_path },
    })
}

/// Writes an MC element `x(s, ds)` of `M[s, ds] ⊗ m_A` as `e^{g(s)} ∗ x₀` with
/// `x₀ = x(0)` and `g(0) = 0`.
///
/// The `ds`-part of `e^g ∗ x₀` is `−ġ ds` plus terms of higher `m_A`-order, so
/// each pass fixes one more order of `g` by integrating the `ds`-part of the
/// discrepancy. The solution is unique, so no tie-breaking is involved.
pub fn mc_poly_factorization(
    forms: &PolyForms,
    mt: &TensorDgla,
    art: &ArtinAlgebra,
    x: &TensorElement,
) -> Result<(TensorElement, TensorElement)> {
    let m = &mt.dgla;
    if !x.has_degree(m.space(), 1) {
        return Err(Error::arg("the path must have degree 1"));
    }
    let mut residue = differential(m, x);
    residue.axpy(&frac(1, 2), &bracket(m, art, x, x));
    if !residue.is_zero() {
        return Err(Error::arg("the path is not a Maurer–Cartan element"));
    }
    let x0 = x.map(|v| mt.contract(v, forms.eval_at(&Scalar::zero())));
    let x0_const = constant(mt, forms, &x0);
    let mut g = TensorElement::zero();
    for _ in 0..art.nil_index() {
        let diff = x.minus(&gauge_action(m, art, &g, &x0_const));
        if diff.is_zero() {
            return Ok((x0, g));
        }
        // ds-part r(s) ds of the discrepancy is matched by δg = −∫₀ˢ r
        let mut step = TensorElement::zero();
        for (&mono, v) in diff.components() {
            for (r, y) in mt.split(v) {
                let (i, has_ds) = forms.monomial(r);
                if !has_ds {
                    continue;
                }
                if i + 1 > forms.cap {
                    return Err(Error::Capacity {
                        what: "polynomial degree in s".into(),
                        needed: i + 1,
                        limit: forms.cap,
                    });
                }
                step.axpy_pure(&-frac(1, i as i64 + 1), &mt.embed(&y, forms.s_pow(i + 1)), mono);
            }
        }
        if step.is_zero() {
            break;
        }
        g.add(&step);
    }
    if x.minus(&gauge_action(m, art, &g, &x0_const)).is_zero() {
        Ok((x0, g))
    } else {
        Err(Error::arg("the path is not of the form e^{g(s)} ∗ x₀"))
    }
}

/// Extracts the endpoints and a gauge witness from a homotopy.
///
/// `l̃ = e^λ ∗ l₀` comes from [`mc_poly_factorization`] in `L[s, ds]`; then
/// `μ̃ = m̃ • χ(λ) • (−m₀)` is closed, and `ν = −∫₀¹` of its `ds`-coefficient.
pub fn gauge_from_homotopy(art: &ArtinAlgebra, h: &Homotopy) -> Result<(MCPair, MCPair, GaugeWitness)> {
    let p0 = h.endpoint(&Scalar::zero());
    let p1 = h.endpoint(&Scalar::one());
    let (_, lambda) = mc_poly_factorization(&h.forms, &h.l, art, &h.path.x)?;
    let ms = &h.m.dgla;
    let chi_lambda = lambda.map(|v| h.chi.apply(v));
    let m0 = constant(&h.m, &h.forms, &p0.a);
    let mu = bch(ms, art, &bch(ms, art, &h.path.a, &chi_lambda), &m0.neg());
    if !differential(ms, &mu).is_zero() {
        return Err(Error::arg("the path does not solve the second Maurer–Cartan equation"));
    }
    let integral = h.forms.integral_01();
    let nu = mu.map(|v| h.m.contract(v, &integral)).neg();
    let a = lambda.map(|v| h.l.contract(v, h.forms.eval_at(&Scalar::one())));
    Ok((p0, p1, GaugeWitness { a, b: nu }))
}
