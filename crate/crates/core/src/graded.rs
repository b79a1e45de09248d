//! Graded vector spaces over the rationals, sparse vectors and maps, Koszul
//! signs, unshuffles, symmetric words and the decalage isomorphism.
//!
//! Basis elements are kept in a fixed total order, lexicographic on
//! `(degree, name)`, and are referred to by their position in that order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{fmt_scalar, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub degree: i32,
}

/// A finite-dimensional Z-graded vector space with a named basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    basis: Vec<BasisElement>,
    index: HashMap<String, usize>,
}

impl GradedSpace {
    pub fn new<S: Into<String>>(basis: impl IntoIterator<Item = (S, i32)>) -> Result<Self> {
        let mut basis: Vec<BasisElement> = basis
            .into_iter()
            .map(|(name, degree)| BasisElement {
                name: name.into(),
                degree,
            })
            .collect();
        basis.sort_by(|a, b| (a.degree, &a.name).cmp(&(b.degree, &b.name)));
        let mut index = HashMap::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            if b.name.is_empty() {
                return Err(Error::arg("empty basis name"));
            }
            if index.insert(b.name.clone(), i).is_some() {
                return Err(Error::arg(format!("duplicate basis name `{}`", b.name)));
            }
        }
        Ok(GradedSpace { basis, index })
    }

    pub fn zero_space() -> Self {
        GradedSpace {
            basis: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.basis[i].degree.rem_euclid(2) == 1
    }

    pub fn indices_of_degree(&self, degree: i32) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&i| self.basis[i].degree == degree)
    }

    pub fn dim_in_degree(&self, degree: i32) -> usize {
        self.indices_of_degree(degree).count()
    }

    /// The shifted space `V[k]`, where `(V[k])^i = V^{i+k}`; basis order is unchanged.
    pub fn shifted(&self, k: i32) -> GradedSpace {
        GradedSpace {
            basis: self
                .basis
                .iter()
                .map(|b| BasisElement {
                    name: b.name.clone(),
                    degree: b.degree - k,
                })
                .collect(),
            index: self.index.clone(),
        }
    }

    pub fn degrees_of(&self, word: &[usize]) -> Vec<i32> {
        word.iter().map(|&i| self.degree(i)).collect()
    }
}

/// A sparse vector: basis index to nonzero coefficient.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector(BTreeMap<usize, Scalar>);

impl Vector {
    pub fn zero() -> Self {
        Vector(BTreeMap::new())
    }

    pub fn basis(i: usize) -> Self {
        Vector::term(i, Scalar::one())
    }

    pub fn term(i: usize, c: Scalar) -> Self {
        let mut v = Vector::zero();
        v.add_term(i, c);
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut v = Vector::zero();
        for (i, c) in terms {
            v.add_term(i, c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.0.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.0.iter().map(|(&i, c)| (i, c))
    }

    pub fn add_term(&mut self, i: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(i).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&i);
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: &Scalar, other: &Vector) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.iter() {
            self.add_term(i, c * x);
        }
    }

    pub fn add(&mut self, other: &Vector) {
        for (i, x) in other.iter() {
            self.add_term(i, x.clone());
        }
    }

    pub fn sub(&mut self, other: &Vector) {
        for (i, x) in other.iter() {
            self.add_term(i, -x.clone());
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Vector {
        if c.is_zero() {
            return Vector::zero();
        }
        Vector(self.0.iter().map(|(&i, x)| (i, x * c)).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|(&i, x)| (i, -x.clone())).collect())
    }

    pub fn sum<'a>(vs: impl IntoIterator<Item = &'a Vector>) -> Vector {
        let mut acc = Vector::zero();
        for v in vs {
            acc.add(v);
        }
        acc
    }

    /// Reindexes through `f`; terms mapped to `None` are dropped.
    pub fn map_indices(&self, mut f: impl FnMut(usize) -> Option<usize>) -> Vector {
        let mut out = Vector::zero();
        for (i, c) in self.iter() {
            if let Some(j) = f(i) {
                out.add_term(j, c.clone());
            }
        }
        out
    }

    /// `Some(Some(d))` if every supported basis element has degree `d`,
    /// `Some(None)` for the zero vector, `None` if inhomogeneous.
    pub fn homogeneous_degree(&self, space: &GradedSpace) -> Option<Option<i32>> {
        let mut deg = None;
        for (i, _) in self.iter() {
            let d = space.degree(i);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        Some(deg)
    }

    /// The component of degree `d`.
    pub fn component(&self, space: &GradedSpace, d: i32) -> Vector {
        Vector(
            self.0
                .iter()
                .filter(|(&i, _)| space.degree(i) == d)
                .map(|(&i, c)| (i, c.clone()))
                .collect(),
        )
    }

    pub fn display<'a>(&'a self, space: &'a GradedSpace) -> VectorDisplay<'a> {
        VectorDisplay { v: self, space }
    }
}

pub struct VectorDisplay<'a> {
    v: &'a Vector,
    space: &'a GradedSpace,
}

impl fmt::Display for VectorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.v.iter().enumerate() {
            let c = fmt_scalar(c);
            let (sign, mag) = match c.strip_prefix('-') {
                Some(m) => ("-", m.to_string()),
                None => ("+", c),
            };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == "1" {
                write!(f, "{}", self.space.name(i))?;
            } else {
                write!(f, "{mag} {}", self.space.name(i))?;
            }
        }
        Ok(())
    }
}

/// A homogeneous linear map of fixed degree, stored column by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap {
    degree: i32,
    images: Vec<Vector>,
    target_dim: usize,
}

impl GradedMap {
    /// `images[i]` is the image of source basis element `i`.
    pub fn new(
        source: &GradedSpace,
        target: &GradedSpace,
        degree: i32,
        images: Vec<Vector>,
    ) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::arg(format!(
                "map has {} columns for a source of dimension {}",
                images.len(),
                source.dim()
            )));
        }
        for (i, img) in images.iter().enumerate() {
            for (j, _) in img.iter() {
                if j >= target.dim() {
                    return Err(Error::arg("map image index out of range"));
                }
                if target.degree(j) != source.degree(i) + degree {
                    return Err(Error::arg(format!(
                        "map of degree {degree} sends `{}` (degree {}) to `{}` (degree {})",
                        source.name(i),
                        source.degree(i),
                        target.name(j),
                        target.degree(j)
                    )));
                }
            }
        }
        Ok(GradedMap {
            degree,
            images,
            target_dim: target.dim(),
        })
    }

    pub fn zero(source: &GradedSpace, target: &GradedSpace, degree: i32) -> Self {
        GradedMap {
            degree,
            images: vec![Vector::zero(); source.dim()],
            target_dim: target.dim(),
        }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        GradedMap {
            degree: 0,
            images: (0..space.dim()).map(Vector::basis).collect(),
            target_dim: space.dim(),
        }
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn source_dim(&self) -> usize {
        self.images.len()
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn image(&self, i: usize) -> &Vector {
        &self.images[i]
    }

    pub fn images(&self) -> &[Vector] {
        &self.images
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (i, c) in v.iter() {
            out.axpy(c, &self.images[i]);
        }
        out
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &GradedMap) -> GradedMap {
        GradedMap {
            degree: self.degree + first.degree,
            images: first.images.iter().map(|v| self.apply(v)).collect(),
            target_dim: self.target_dim,
        }
    }
}

/// The Koszul sign `ε(σ)` defined by
/// `v_{σ(0)} ⊙ … ⊙ v_{σ(n-1)} = ε(σ) v_0 ⊙ … ⊙ v_{n-1}` (zero-based).
pub fn koszul_sign(perm: &[usize], degrees: &[i32]) -> Result<i32> {
    if perm.len() != degrees.len() {
        return Err(Error::arg(format!(
            "permutation of length {} with {} degrees",
            perm.len(),
            degrees.len()
        )));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::arg("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(koszul_sign_unchecked(perm, degrees))
}

pub(crate) fn koszul_sign_unchecked(perm: &[usize], degrees: &[i32]) -> i32 {
    let mut s = 1;
    for a in 0..perm.len() {
        if degrees[perm[a]].rem_euclid(2) == 0 {
            continue;
        }
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && degrees[perm[b]].rem_euclid(2) == 1 {
                s = -s;
            }
        }
    }
    s
}

/// Sign of a permutation, `(-1)^σ`.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut s = 1;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                s = -s;
            }
        }
    }
    s
}

/// All `(k, m)` unshuffles: permutations of `0..k+m` increasing on the first
/// `k` and on the last `m` positions.
pub fn unshuffles(k: usize, m: usize) -> Vec<Vec<usize>> {
    let n = k + m;
    (0..n)
        .combinations(k)
        .map(|head| {
            let mut perm = head.clone();
            perm.extend((0..n).filter(|i| !head.contains(i)));
            perm
        })
        .collect()
}

/// A product of basis elements in canonical (sorted) order, standing for
/// `sign · factors[0] ⊙ … ⊙ factors[n-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymWord {
    pub factors: Vec<usize>,
    pub sign: i32,
}

/// Sorts a product of basis elements into canonical order. Returns `None`
/// for the zero word (an odd factor repeated).
pub fn canonicalize(space: &GradedSpace, factors: &[usize]) -> Option<SymWord> {
    let mut perm: Vec<usize> = (0..factors.len()).collect();
    perm.sort_by_key(|&p| factors[p]);
    let sorted: Vec<usize> = perm.iter().map(|&p| factors[p]).collect();
    if sorted
        .windows(2)
        .any(|w| w[0] == w[1] && space.is_odd(w[0]))
    {
        return None;
    }
    let degrees = space.degrees_of(factors);
    Some(SymWord {
        factors: sorted,
        sign: koszul_sign_unchecked(&perm, &degrees),
    })
}

/// Canonicalizes a word given as vectors; each must be a basis element.
pub fn canonicalize_vectors(space: &GradedSpace, factors: &[Vector]) -> Result<Option<SymWord>> {
    let mut idx = Vec::with_capacity(factors.len());
    for v in factors {
        match v.homogeneous_degree(space) {
            Some(Some(_)) if v.len() == 1 && v.iter().next().map(|(_, c)| c.is_one()) == Some(true) => {
                idx.push(v.iter().next().unwrap().0)
            }
            None => return Err(Error::arg("non-homogeneous factor")),
            _ => return Err(Error::arg("factor is not a basis element")),
        }
    }
    Ok(canonicalize(space, &idx))
}

/// All canonical words of length `n`: non-decreasing index sequences with no
/// repeated odd factor.
pub fn sym_basis_words(space: &GradedSpace, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(space: &GradedSpace, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..space.dim() {
            let next = if space.is_odd(i) { i + 1 } else { i };
            cur.push(i);
            rec(space, n, next, cur, out);
            cur.pop();
        }
    }
    rec(space, n, 0, &mut cur, &mut out);
    out
}

/// Expands `v_1 ⊙ … ⊙ v_n` into canonical words with coefficients.
pub fn expand_product(space: &GradedSpace, args: &[Vector]) -> BTreeMap<Vec<usize>, Scalar> {
    let mut acc: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), Scalar::one())];
    for v in args {
        let mut next = Vec::with_capacity(acc.len() * v.len());
        for (w, c) in &acc {
            for (i, x) in v.iter() {
                let mut w2 = w.clone();
                w2.push(i);
                next.push((w2, c * x));
            }
        }
        acc = next;
    }
    let mut out: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
    for (w, c) in acc {
        if let Some(sw) = canonicalize(space, &w) {
            let e = out.entry(sw.factors).or_insert_with(Scalar::zero);
            if sw.sign > 0 {
                *e += c;
            } else {
                *e -= c;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// A multilinear map `⊗^k V → W` stored on ordered tuples of basis indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearMap {
    pub arity: usize,
    pub degree: i32,
    pub table: BTreeMap<Vec<usize>, Vector>,
}

impl MultilinearMap {
    pub fn eval(&self, args: &[usize]) -> Vector {
        self.table.get(args).cloned().unwrap_or_default()
    }

    fn check_homogeneous(&self, source: &GradedSpace, target: &GradedSpace) -> Result<()> {
        for (args, out) in &self.table {
            if args.len() != self.arity {
                return Err(Error::arg("tuple length differs from arity"));
            }
            let d: i32 = args.iter().map(|&i| source.degree(i)).sum::<i32>() + self.degree;
            if out.iter().any(|(j, _)| target.degree(j) != d) {
                return Err(Error::arg("multilinear map is not homogeneous of its degree"));
            }
        }
        Ok(())
    }
}

fn decalage_sign(arity: usize, degree: i32, arg_degrees: &[i32]) -> i64 {
    let k = arity as i64;
    let mut e = k * degree as i64;
    for (j, &d) in arg_degrees.iter().enumerate() {
        e += (k - 1 - j as i64) * d as i64;
    }
    e
}

/// `dec(f)(v_1[1] ⊗ … ⊗ v_k[1]) = (-1)^{ki + Σ(k-j)deg v_j} f(v_1 ⊗ … ⊗ v_k)[l]`.
///
/// `source` and `target` are the unshifted spaces `V`, `W`; the result has
/// degree `i + k - l` as a map `⊗^k(V[1]) → W[l]`.
pub fn decalage(
    f: &MultilinearMap,
    source: &GradedSpace,
    target: &GradedSpace,
    shift: i32,
) -> Result<MultilinearMap> {
    f.check_homogeneous(source, target)?;
    let table = f
        .table
        .iter()
        .map(|(args, out)| {
            let e = decalage_sign(f.arity, f.degree, &source.degrees_of(args));
            (args.clone(), out.scaled(&crate::scalar::sign(e)))
        })
        .collect();
    Ok(MultilinearMap {
        arity: f.arity,
        degree: f.degree + f.arity as i32 - shift,
        table,
    })
}

/// Inverse of [`decalage`]: `g` is a map `⊗^k(V[1]) → W[l]`.
pub fn decalage_inverse(
    g: &MultilinearMap,
    source: &GradedSpace,
    target: &GradedSpace,
    shift: i32,
) -> Result<MultilinearMap> {
    let degree = g.degree - g.arity as i32 + shift;
    let table = g
        .table
        .iter()
        .map(|(args, out)| {
            let e = decalage_sign(g.arity, degree, &source.degrees_of(args));
            (args.clone(), out.scaled(&crate::scalar::sign(e)))
        })
        .collect();
    let f = MultilinearMap {
        arity: g.arity,
        degree,
        table,
    };
    f.check_homogeneous(source, target)?;
    Ok(f)
}

/// Sign of the tensor decalage `v_1[1] ⊗ … ⊗ v_n[1] ↦ ± (v_1 ⊗ … ⊗ v_n)[n]`.
pub fn tensor_decalage_sign(degrees: &[i32]) -> i32 {
    let n = degrees.len() as i64;
    let e: i64 = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| (n - 1 - i as i64) * d as i64)
        .sum();
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}
