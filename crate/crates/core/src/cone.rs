//! The mapping cone of a DGLA morphism and its closed-form L∞ brackets.
//!
//! The suspended cone `W = C_χ[1] = L[1] ⊕ M` has basis `l:<name>` in degree
//! `deg_L − 1` and `m:<name>` in degree `deg_M`.

use std::sync::Arc;

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::algebra::{Dgla, DglaMorphism};
use crate::error::{Error, Result};
use crate::graded::{koszul_sign_unchecked, permutation_sign, GradedMap, GradedSpace, MultilinearMap, Vector};
use crate::linfty::Brackets;
use crate::scalar::{binomial, factorial, int, sign, Scalar};

/// `φ₁ = t`, `I_n = ∫₀¹ φ_n`, `φ_{n+1} = ∫₀ᵗ φ_n − t I_n`, and `B_n = −n! I_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliTable {
    /// `phi[n]` holds the coefficients of `φ_n` in increasing powers of `t`
    /// (`phi[0]` is unused and empty).
    pub phi: Vec<Vec<Scalar>>,
    /// `i[n] = I_n`, `i[0]` unused (zero).
    pub i: Vec<Scalar>,
    /// `b[n] = B_n`, with `b[0] = 1`.
    pub b: Vec<Scalar>,
}

pub fn bernoulli(n: usize) -> BernoulliTable {
    let mut phi: Vec<Vec<Scalar>> = vec![vec![], vec![Scalar::zero(), Scalar::one()]];
    let mut i = vec![Scalar::zero()];
    let mut b = vec![Scalar::one()];
    for k in 1..=n {
        let p = &phi[k];
        let integral: Scalar = p
            .iter()
            .enumerate()
            .map(|(j, c)| c / int(j as i64 + 1))
            .sum();
        b.push(-factorial(k) * &integral);
        let mut next = vec![Scalar::zero(); p.len() + 1];
        for (j, c) in p.iter().enumerate() {
            next[j + 1] = c / int(j as i64 + 1);
        }
        next[1] -= &integral;
        i.push(integral);
        if k < n {
            phi.push(next);
        }
    }
    BernoulliTable { phi, i, b }
}

/// `B_0..B_n` from `Σ_{j=0}^{n} C(n+1, j) B_j = 0`.
pub fn bernoulli_recurrence(n: usize) -> Vec<Scalar> {
    let mut b = vec![Scalar::one()];
    for m in 1..=n {
        let s: Scalar = (0..m).map(|j| binomial(m + 1, j) * &b[j]).sum();
        b.push(-s / binomial(m + 1, m));
    }
    b
}

impl BernoulliTable {
    /// Both cross-checks: `I_n = −B_n/n!` against the classical recurrence,
    /// and the defining recursion of `φ`. Returns the first failing index.
    pub fn verify(&self) -> std::result::Result<(), usize> {
        let n = self.b.len() - 1;
        let classical = bernoulli_recurrence(n);
        for k in 1..=n {
            if self.i[k] != -&classical[k] / factorial(k) || self.b[k] != classical[k] {
                return Err(k);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    L(usize),
    M(usize),
}

/// The suspended cone `C_χ[1]` of a morphism `χ: L → M`.
#[derive(Debug, Clone)]
pub struct Cone {
    chi: DglaMorphism,
    space: GradedSpace,
    parts: Vec<Part>,
    l_to_w: Vec<usize>,
    m_to_w: Vec<usize>,
}

impl Cone {
    pub fn new(chi: DglaMorphism) -> Result<Self> {
        let (l, m) = (chi.source.space(), chi.target.space());
        let names = (0..l.dim())
            .map(|i| (format!("l:{}", l.name(i)), l.degree(i) - 1))
            .chain((0..m.dim()).map(|j| (format!("m:{}", m.name(j)), m.degree(j))));
        let space = GradedSpace::new(names)?;
        let l_to_w: Vec<usize> = (0..l.dim())
            .map(|i| space.index_of(&format!("l:{}", l.name(i))).unwrap())
            .collect();
        let m_to_w: Vec<usize> = (0..m.dim())
            .map(|j| space.index_of(&format!("m:{}", m.name(j))).unwrap())
            .collect();
        let mut parts = vec![Part::L(0); space.dim()];
        for (i, &w) in l_to_w.iter().enumerate() {
            parts[w] = Part::L(i);
        }
        for (j, &w) in m_to_w.iter().enumerate() {
            parts[w] = Part::M(j);
        }
        Ok(Cone {
            chi,
            space,
            parts,
            l_to_w,
            m_to_w,
        })
    }

    pub fn chi(&self) -> &DglaMorphism {
        &self.chi
    }

    pub fn l(&self) -> &Dgla {
        &self.chi.source
    }

    pub fn m(&self) -> &Dgla {
        &self.chi.target
    }

    /// The suspended space `W = C_χ[1]`.
    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn part(&self, w: usize) -> Part {
        self.parts[w]
    }

    pub fn l_index(&self, i: usize) -> usize {
        self.l_to_w[i]
    }

    pub fn m_index(&self, j: usize) -> usize {
        self.m_to_w[j]
    }

    /// Splits a vector of `W` into its `L` and `M` components.
    pub fn split(&self, v: &Vector) -> (Vector, Vector) {
        let (mut l, mut m) = (Vector::zero(), Vector::zero());
        for (w, c) in v.iter() {
            match self.parts[w] {
                Part::L(i) => l.add_term(i, c.clone()),
                Part::M(j) => m.add_term(j, c.clone()),
            }
        }
        (l, m)
    }

    pub fn join(&self, l: &Vector, m: &Vector) -> Vector {
        let mut v = l.map_indices(|i| Some(self.l_to_w[i]));
        v.add(&m.map_indices(|j| Some(self.m_to_w[j])));
        v
    }
}

/// The unsuspended cone `C_χ` (`C_χⁱ = Lⁱ ⊕ M^{i−1}`) and
/// `δ(l, m) = (dl, χ(l) − dm)`. Basis names and order match [`Cone::space`].
pub fn cone_complex(cone: &Cone) -> Result<(GradedSpace, GradedMap)> {
    let c = cone.space().shifted(-1);
    let images: Vec<Vector> = (0..c.dim())
        .map(|w| match cone.part(w) {
            Part::L(i) => {
                let e = Vector::basis(i);
                cone.join(&cone.l().d(&e), &cone.chi().apply(&e))
            }
            Part::M(j) => cone.join(&Vector::zero(), &cone.m().d(&Vector::basis(j)).neg()),
        })
        .collect();
    let delta = GradedMap::new(&c, &c, 1, images)?;
    Ok((c, delta))
}

/// Terms of the closed-form brackets whose sign can be flipped by a [`ConeMutation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeTerm {
    /// `−dl` in `⟨l⟩₁`
    UnaryDl,
    /// `−χ(l)` in `⟨l⟩₁`
    UnaryChi,
    /// `dm` in `⟨m⟩₁`
    UnaryDm,
    /// `⟨l₁ ⊙ l₂⟩₂`
    Ll,
    /// `⟨m ⊗ l⟩₂`
    Ml,
    /// `⟨m₁ ⊙ … ⊙ m_n ⊗ l⟩_{n+1}` for `n ≥ 2`
    Higher,
}

/// A deliberate corruption of the closed form, for testing that the axiom
/// checker notices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeMutation {
    Bernoulli { n: usize, value: Scalar },
    FlipSign(ConeTerm),
}

/// The closed-form L∞ brackets on `C_χ[1]`, evaluated on demand.
#[derive(Debug, Clone)]
pub struct ConeBrackets {
    cone: Arc<Cone>,
    b: Vec<Scalar>,
    max_arity: usize,
    mutation: Option<ConeMutation>,
}

impl ConeBrackets {
    pub fn new(cone: Arc<Cone>, max_arity: usize) -> Result<Self> {
        if max_arity < 2 {
            return Err(Error::arg("cone brackets need max arity ≥ 2"));
        }
        let b = bernoulli(max_arity).b;
        Ok(ConeBrackets {
            cone,
            b,
            max_arity,
            mutation: None,
        })
    }

    pub fn mutated(mut self, mutation: ConeMutation) -> Self {
        if let ConeMutation::Bernoulli { n, value } = &mutation {
            if *n < self.b.len() {
                self.b[*n] = value.clone();
            }
        }
        self.mutation = Some(mutation);
        self
    }

    pub fn cone(&self) -> &Arc<Cone> {
        &self.cone
    }

    fn flip(&self, term: ConeTerm) -> Scalar {
        if self.mutation == Some(ConeMutation::FlipSign(term)) {
            -Scalar::one()
        } else {
            Scalar::one()
        }
    }

    /// `⟨m_1 ⊙ … ⊙ m_n ⊗ l_1 ⊙ … ⊙ l_k⟩` with factors already in M-first order,
    /// as a vector of `W`.
    pub fn mixed(&self, ms: &[usize], ls: &[usize]) -> Vector {
        let cone = &*self.cone;
        let (l, m, chi) = (cone.l(), cone.m(), cone.chi());
        let zero = Vector::zero();
        match (ms.len(), ls.len()) {
            (0, 1) => {
                let e = Vector::basis(ls[0]);
                let dl = l.d(&e).scaled(&-self.flip(ConeTerm::UnaryDl));
                let x = chi.apply(&e).scaled(&-self.flip(ConeTerm::UnaryChi));
                cone.join(&dl, &x)
            }
            (1, 0) => {
                let dm = m.d(&Vector::basis(ms[0])).scaled(&self.flip(ConeTerm::UnaryDm));
                cone.join(&zero, &dm)
            }
            (0, 2) => {
                let s = sign(l.space().degree(ls[0]) as i64) * self.flip(ConeTerm::Ll);
                let b = l.bracket(&Vector::basis(ls[0]), &Vector::basis(ls[1]));
                cone.join(&b.scaled(&s), &zero)
            }
            (1, 1) => {
                // ((−1)^{deg m + 1}/2) = (−1)^{deg m + 1}·(−B₁)
                let s = sign(m.space().degree(ms[0]) as i64 + 1) * -&self.b[1] * self.flip(ConeTerm::Ml);
                let b = m.bracket(&Vector::basis(ms[0]), &chi.apply(&Vector::basis(ls[0])));
                cone.join(&zero, &b.scaled(&s))
            }
            (n, 1) if n >= 2 => {
                let degs: Vec<i32> = ms.iter().map(|&j| m.space().degree(j)).collect();
                let total: i64 = degs.iter().map(|&d| d as i64).sum();
                let coef = -sign(total) * &self.b[n] / factorial(n) * self.flip(ConeTerm::Higher);
                if coef.is_zero() {
                    return Vector::zero();
                }
                let chil = chi.apply(&Vector::basis(ls[0]));
                let nested = symmetrized_nested(m, ms, &degs, &chil);
                cone.join(&zero, &nested.scaled(&coef))
            }
            _ => Vector::zero(),
        }
    }
}

/// `Σ_{σ ∈ S_n} ε(σ) [m_σ(1), [m_σ(2), …, [m_σ(n), x]…]]`.
pub fn symmetrized_nested(m: &Dgla, ms: &[usize], degs: &[i32], x: &Vector) -> Vector {
    let mut out = Vector::zero();
    for sigma in (0..ms.len()).permutations(ms.len()) {
        let mut acc = x.clone();
        for &p in sigma.iter().rev() {
            acc = m.bracket(&Vector::basis(ms[p]), &acc);
            if acc.is_zero() {
                break;
            }
        }
        if !acc.is_zero() {
            out.axpy(&int(koszul_sign_unchecked(&sigma, degs) as i64), &acc);
        }
    }
    out
}

impl Brackets for ConeBrackets {
    fn space(&self) -> &GradedSpace {
        self.cone.space()
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn vanishing_above(&self) -> bool {
        false
    }

    fn bracket_sorted(&self, word: &[usize]) -> Vector {
        let cone = &*self.cone;
        let mut perm: Vec<usize> = (0..word.len())
            .filter(|&p| matches!(cone.part(word[p]), Part::M(_)))
            .collect();
        let n_m = perm.len();
        perm.extend((0..word.len()).filter(|&p| matches!(cone.part(word[p]), Part::L(_))));
        if word.len() > 1 && word.len() - n_m != 1 && !(n_m == 0 && word.len() == 2) {
            return Vector::zero();
        }
        let eps = koszul_sign_unchecked(&perm, &cone.space().degrees_of(word));
        let idx = |p: usize| match cone.part(word[p]) {
            Part::L(i) | Part::M(i) => i,
        };
        let ms: Vec<usize> = perm[..n_m].iter().map(|&p| idx(p)).collect();
        let ls: Vec<usize> = perm[n_m..].iter().map(|&p| idx(p)).collect();
        let v = self.mixed(&ms, &ls);
        if eps > 0 {
            v
        } else {
            v.neg()
        }
    }
}

/// The map `(l, m) ↦ (f_L l, f_M m)` between suspended cones, for a square
/// with `χ₂ ∘ f_L = f_M ∘ χ₁`.
pub fn cone_functor_map(
    f_l: &DglaMorphism,
    f_m: &DglaMorphism,
    source: &Cone,
    target: &Cone,
) -> Result<GradedMap> {
    let dims_ok = f_l.map.source_dim() == source.l().dim()
        && f_l.map.target_dim() == target.l().dim()
        && f_m.map.source_dim() == source.m().dim()
        && f_m.map.target_dim() == target.m().dim();
    if !dims_ok {
        return Err(Error::arg("square maps do not match the cones"));
    }
    for i in 0..source.l().dim() {
        let e = Vector::basis(i);
        let lhs = target.chi().apply(&f_l.apply(&e));
        let rhs = f_m.apply(&source.chi().apply(&e));
        if lhs != rhs {
            return Err(Error::arg(format!(
                "square does not commute on `{}`",
                source.l().space().name(i)
            )));
        }
    }
    let images: Vec<Vector> = (0..source.space().dim())
        .map(|w| match source.part(w) {
            Part::L(i) => target.join(f_l.map.image(i), &Vector::zero()),
            Part::M(j) => target.join(&Vector::zero(), f_m.map.image(j)),
        })
        .collect();
    GradedMap::new(source.space(), target.space(), 0, images)
}

/// Koszul brackets of `M` on ordered tuples:
/// `Φ_n(m_1…m_n) = (1/n!) Σ_σ ε(σ) [⋯[[∂m_σ(1), m_σ(2)], m_σ(3)], ⋯, m_σ(n)]`, `Φ₁ = 0`.
/// With `odd` set, each term carries the extra `(−1)^σ`.
pub fn koszul_bracket(m: &Dgla, args: &[usize], odd: bool) -> Vector {
    let n = args.len();
    if n < 2 {
        return Vector::zero();
    }
    let degs = m.space().degrees_of(args);
    let mut out = Vector::zero();
    for sigma in (0..n).permutations(n) {
        let mut acc = m.d(&Vector::basis(args[sigma[0]]));
        for &p in &sigma[1..] {
            if acc.is_zero() {
                break;
            }
            acc = m.bracket(&acc, &Vector::basis(args[p]));
        }
        if acc.is_zero() {
            continue;
        }
        let mut s = koszul_sign_unchecked(&sigma, &degs);
        if odd {
            s *= permutation_sign(&sigma);
        }
        out.axpy(&int(s as i64), &acc);
    }
    out.scaled(&(Scalar::one() / factorial(n)))
}

/// [`koszul_bracket`] tabulated on all ordered basis tuples of length `n`.
pub fn koszul_brackets(m: &Dgla, n: usize, odd: bool) -> MultilinearMap {
    let table = (0..n)
        .map(|_| 0..m.dim())
        .multi_cartesian_product()
        .filter_map(|t| {
            let v = koszul_bracket(m, &t, odd);
            (!v.is_zero()).then_some((t, v))
        })
        .collect();
    MultilinearMap {
        arity: n,
        degree: 1,
        table,
    }
}

/// `m ↦ (∂m, m)`, the embedding of `M` into the suspended cone of `∂M ↪ M`.
/// `generators` are the images of the sub-DGLA basis in `M`.
pub fn derived_embedding(cone: &Cone, generators: &[Vector], m: &Vector) -> Result<Vector> {
    let ech = crate::linalg::Echelon::from_vectors(generators.iter());
    let dm = cone.m().d(m);
    let l = ech
        .solve(&dm)
        .ok_or_else(|| Error::arg("∂m is not in the sub-DGLA"))?;
    Ok(cone.join(&l, m))
}
