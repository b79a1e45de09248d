//! Differential graded Lie algebras given by structure constants.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace, Vector};
use crate::linalg::Echelon;
use crate::scalar::{sign, Scalar};

use super::dgca::Dgca;

/// A DGLA `(V, d, [,])`. The bracket is stored on ordered pairs of basis
/// elements; axioms are not enforced on construction (see [`Dgla::check`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dgla {
    space: GradedSpace,
    differential: GradedMap,
    bracket: BTreeMap<(usize, usize), Vector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    DifferentialSquare,
    Antisymmetry,
    Jacobi,
    Leibniz,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::DifferentialSquare => "d∘d = 0",
            Axiom::Antisymmetry => "graded antisymmetry",
            Axiom::Jacobi => "graded Jacobi",
            Axiom::Leibniz => "graded Leibniz",
        })
    }
}

/// One failed axiom instance: the basis elements involved and the nonzero
/// residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witnesses: Vec<String>,
    pub residual: Vector,
}

impl Dgla {
    /// Builds a DGLA from a differential and bracket entries on basis pairs.
    /// An entry `[a, b]` whose mirror `[b, a]` is not supplied is completed
    /// by graded antisymmetry; supplied mirrors are kept verbatim.
    pub fn new(
        space: GradedSpace,
        differential: Vec<Vector>,
        bracket_entries: impl IntoIterator<Item = ((usize, usize), Vector)>,
    ) -> Result<Self> {
        let differential = GradedMap::new(&space, &space, 1, differential)?;
        let mut given: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
        for ((a, b), v) in bracket_entries {
            if a >= space.dim() || b >= space.dim() {
                return Err(Error::arg("bracket entry index out of range"));
            }
            let want = space.degree(a) + space.degree(b);
            if let Some((j, _)) = v.iter().find(|(j, _)| space.degree(*j) != want) {
                return Err(Error::arg(format!(
                    "[{}, {}] must have degree {want}, but `{}` has degree {}",
                    space.name(a),
                    space.name(b),
                    space.name(j),
                    space.degree(j)
                )));
            }
            given.entry((a, b)).or_default().add(&v);
        }
        let mut bracket = given.clone();
        for (&(a, b), v) in &given {
            if !given.contains_key(&(b, a)) {
                let e = space.degree(a) as i64 * space.degree(b) as i64;
                bracket.insert((b, a), v.scaled(&-sign(e)));
            }
        }
        bracket.retain(|_, v| !v.is_zero());
        Ok(Dgla {
            space,
            differential,
            bracket,
        })
    }

    pub fn abelian(space: GradedSpace, differential: Vec<Vector>) -> Result<Self> {
        Dgla::new(space, differential, [])
    }

    pub fn zero() -> Self {
        let space = GradedSpace::zero_space();
        Dgla {
            differential: GradedMap::zero(&space, &space, 1),
            space,
            bracket: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn differential(&self) -> &GradedMap {
        &self.differential
    }

    pub fn bracket_table(&self) -> &BTreeMap<(usize, usize), Vector> {
        &self.bracket
    }

    pub fn bracket_basis(&self, a: usize, b: usize) -> Option<&Vector> {
        self.bracket.get(&(a, b))
    }

    pub fn d(&self, v: &Vector) -> Vector {
        self.differential.apply(v)
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                if let Some(v) = self.bracket.get(&(a, b)) {
                    out.axpy(&(ca * cb), v);
                }
            }
        }
        out
    }

    /// `ad_x^n (y)`
    pub fn ad_power(&self, x: &Vector, n: usize, y: &Vector) -> Vector {
        let mut acc = y.clone();
        for _ in 0..n {
            if acc.is_zero() {
                break;
            }
            acc = self.bracket(x, &acc);
        }
        acc
    }

    fn deg(&self, i: usize) -> i64 {
        self.space.degree(i) as i64
    }

    /// Checks d² = 0, antisymmetry, Jacobi and Leibniz on all basis tuples.
    pub fn check(&self) -> Vec<Violation> {
        let n = self.dim();
        let name = |i: usize| self.space.name(i).to_string();
        let mut out = Vec::new();
        for a in 0..n {
            let r = self.d(&self.d(&Vector::basis(a)));
            if !r.is_zero() {
                out.push(Violation {
                    axiom: Axiom::DifferentialSquare,
                    witnesses: vec![name(a)],
                    residual: r,
                });
            }
        }
        for a in 0..n {
            for b in 0..n {
                let (ea, eb) = (Vector::basis(a), Vector::basis(b));
                let mut r = self.bracket(&ea, &eb);
                r.axpy(&sign(self.deg(a) * self.deg(b)), &self.bracket(&eb, &ea));
                if !r.is_zero() && a <= b {
                    out.push(Violation {
                        axiom: Axiom::Antisymmetry,
                        witnesses: vec![name(a), name(b)],
                        residual: r,
                    });
                }
                // d[a,b] - [da,b] - (-1)^a [a,db]
                let mut r = self.d(&self.bracket(&ea, &eb));
                r.sub(&self.bracket(&self.d(&ea), &eb));
                r.axpy(&-sign(self.deg(a)), &self.bracket(&ea, &self.d(&eb)));
                if !r.is_zero() {
                    out.push(Violation {
                        axiom: Axiom::Leibniz,
                        witnesses: vec![name(a), name(b)],
                        residual: r,
                    });
                }
            }
        }
        let jacobi: Vec<Violation> = (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                let mut found = Vec::new();
                for b in 0..n {
                    for c in 0..n {
                        let r = self.jacobiator(a, b, c);
                        if !r.is_zero() {
                            found.push(Violation {
                                axiom: Axiom::Jacobi,
                                witnesses: vec![name(a), name(b), name(c)],
                                residual: r,
                            });
                        }
                    }
                }
                found
            })
            .collect();
        out.extend(jacobi);
        out
    }

    /// `[a,[b,c]] - [[a,b],c] - (-1)^{|a||b|}[b,[a,c]]` on basis elements.
    pub fn jacobiator(&self, a: usize, b: usize, c: usize) -> Vector {
        let (ea, eb, ec) = (Vector::basis(a), Vector::basis(b), Vector::basis(c));
        let mut r = self.bracket(&ea, &self.bracket(&eb, &ec));
        r.sub(&self.bracket(&self.bracket(&ea, &eb), &ec));
        r.axpy(
            &-sign(self.deg(a) * self.deg(b)),
            &self.bracket(&eb, &self.bracket(&ea, &ec)),
        );
        r
    }

    /// The sub-DGLA spanned by the given named homogeneous vectors, with the
    /// inclusion morphism. Fails if the span is not closed under `d` and the
    /// bracket, naming the offending generators.
    pub fn subalgebra(
        self: &Arc<Self>,
        generators: Vec<(String, Vector)>,
    ) -> Result<(Arc<Dgla>, DglaMorphism)> {
        let mut named = Vec::with_capacity(generators.len());
        for (nm, v) in &generators {
            match v.homogeneous_degree(&self.space) {
                Some(Some(d)) => named.push((nm.clone(), d)),
                _ => return Err(Error::arg(format!("generator `{nm}` is zero or inhomogeneous"))),
            }
        }
        let space = GradedSpace::new(named)?;
        // generator vectors in the sub-space's (sorted) basis order
        let mut gens = vec![Vector::zero(); space.dim()];
        for (nm, v) in &generators {
            gens[space.index_of(nm).unwrap()] = v.clone();
        }
        let ech = Echelon::from_vectors(gens.iter());
        if ech.rank() != gens.len() {
            return Err(Error::arg("subalgebra generators are linearly dependent"));
        }
        let coords = |v: &Vector, what: &str| -> Result<Vector> {
            ech.solve(v)
                .ok_or_else(|| Error::arg(format!("span is not a subalgebra: {what} leaves it")))
        };
        let mut diff = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            diff.push(coords(&self.d(g), &format!("d {}", space.name(i)))?);
        }
        let mut entries = Vec::new();
        for i in 0..gens.len() {
            for j in 0..gens.len() {
                let b = self.bracket(&gens[i], &gens[j]);
                if !b.is_zero() {
                    let what = format!("[{}, {}]", space.name(i), space.name(j));
                    entries.push(((i, j), coords(&b, &what)?));
                }
            }
        }
        let sub = Arc::new(Dgla::new(space, diff, entries)?);
        let map = GradedMap::new(sub.space(), self.space(), 0, gens)?;
        let incl = DglaMorphism::new(sub.clone(), self.clone(), map)?;
        Ok((sub, incl))
    }

    /// `V ⊗ R` for a graded commutative DG algebra `R` (possibly without unit),
    /// with `[v⊗r, w⊗s] = (-1)^{|r||w|}[v,w]⊗rs` and
    /// `d(v⊗r) = dv⊗r + (-1)^{|v|} v⊗dr`. Basis names are `v*r`.
    pub fn tensor(&self, r: &Dgca) -> Result<TensorDgla> {
        let rs = r.space();
        let pairs: Vec<(usize, usize)> = (0..self.dim())
            .flat_map(|v| (0..rs.dim()).map(move |a| (v, a)))
            .collect();
        let space = GradedSpace::new(pairs.iter().map(|&(v, a)| {
            (
                format!("{}*{}", self.space.name(v), rs.name(a)),
                self.space.degree(v) + rs.degree(a),
            )
        }))?;
        let index: BTreeMap<(usize, usize), usize> = pairs
            .iter()
            .map(|&(v, a)| {
                let nm = format!("{}*{}", self.space.name(v), rs.name(a));
                ((v, a), space.index_of(&nm).unwrap())
            })
            .collect();
        let mut diff = vec![Vector::zero(); space.dim()];
        for (&(v, a), &k) in &index {
            let mut out = Vector::zero();
            for (w, c) in self.differential.image(v).iter() {
                out.add_term(index[&(w, a)], c.clone());
            }
            let s = sign(self.space.degree(v) as i64);
            for (b, c) in r.d(&Vector::basis(a)).iter() {
                out.add_term(index[&(v, b)], &s * c);
            }
            diff[k] = out;
        }
        let mut entries = Vec::new();
        for (&(v, w), vw) in &self.bracket {
            for a in 0..rs.dim() {
                for b in 0..rs.dim() {
                    let Some(ab) = r.product_basis(a, b) else { continue };
                    let s = sign(rs.degree(a) as i64 * self.space.degree(w) as i64);
                    let mut out = Vector::zero();
                    for (x, cx) in vw.iter() {
                        for (y, cy) in ab.iter() {
                            out.add_term(index[&(x, y)], &s * cx * cy);
                        }
                    }
                    if !out.is_zero() {
                        entries.push(((index[&(v, a)], index[&(w, b)]), out));
                    }
                }
            }
        }
        // both mirrors are present in `self.bracket`, so nothing is completed
        let dgla = Dgla::new(space, diff, entries)?;
        Ok(TensorDgla {
            dgla: Arc::new(dgla),
            index,
            factor_dims: (self.dim(), rs.dim()),
        })
    }
}

/// `V ⊗ R` together with the index of each `v ⊗ r` basis element.
#[derive(Debug, Clone)]
pub struct TensorDgla {
    pub dgla: Arc<Dgla>,
    index: BTreeMap<(usize, usize), usize>,
    factor_dims: (usize, usize),
}

impl TensorDgla {
    pub fn index(&self, v: usize, r: usize) -> usize {
        self.index[&(v, r)]
    }

    /// `x ⊗ r` for a vector `x` of the left factor.
    pub fn embed(&self, x: &Vector, r: usize) -> Vector {
        x.map_indices(|v| Some(self.index(v, r)))
    }

    /// Splits a vector into components `(r, x_r)` with `v = Σ x_r ⊗ r`.
    pub fn split(&self, v: &Vector) -> BTreeMap<usize, Vector> {
        let mut out: BTreeMap<usize, Vector> = BTreeMap::new();
        let rev: BTreeMap<usize, (usize, usize)> =
            self.index.iter().map(|(&k, &i)| (i, k)).collect();
        for (i, c) in v.iter() {
            let (x, r) = rev[&i];
            out.entry(r).or_default().add_term(x, c.clone());
        }
        out
    }

    /// Applies `f ⊗ φ`, where `φ` is a linear functional on `R` given on basis elements.
    pub fn contract(&self, v: &Vector, phi: impl Fn(usize) -> Scalar) -> Vector {
        let mut out = Vector::zero();
        for (r, x) in self.split(v) {
            out.axpy(&phi(r), &x);
        }
        out
    }

    pub fn factor_dims(&self) -> (usize, usize) {
        self.factor_dims
    }
}

/// A degree-zero map of DGLAs. Axioms are checked by [`DglaMorphism::check`].
#[derive(Debug, Clone)]
pub struct DglaMorphism {
    pub source: Arc<Dgla>,
    pub target: Arc<Dgla>,
    pub map: GradedMap,
}

impl DglaMorphism {
    pub fn new(source: Arc<Dgla>, target: Arc<Dgla>, map: GradedMap) -> Result<Self> {
        if map.degree() != 0 {
            return Err(Error::arg("a DGLA morphism has degree 0"));
        }
        if map.source_dim() != source.dim() || map.target_dim() != target.dim() {
            return Err(Error::arg("morphism dimensions do not match its DGLAs"));
        }
        Ok(DglaMorphism {
            source,
            target,
            map,
        })
    }

    pub fn identity(dgla: Arc<Dgla>) -> Self {
        let map = GradedMap::identity(dgla.space());
        DglaMorphism {
            source: dgla.clone(),
            target: dgla,
            map,
        }
    }

    pub fn to_zero(dgla: Arc<Dgla>) -> Self {
        let target = Arc::new(Dgla::zero());
        let map = GradedMap::zero(dgla.space(), target.space(), 0);
        DglaMorphism {
            source: dgla,
            target,
            map,
        }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        self.map.apply(v)
    }

    /// Chain-map and bracket-preservation failures on basis elements.
    pub fn check(&self) -> Vec<String> {
        let s = self.source.space();
        let mut out = Vec::new();
        for a in 0..s.dim() {
            let ea = Vector::basis(a);
            let mut r = self.apply(&self.source.d(&ea));
            r.sub(&self.target.d(&self.apply(&ea)));
            if !r.is_zero() {
                out.push(format!("φ(d {0}) ≠ d φ({0})", s.name(a)));
            }
            for b in 0..s.dim() {
                let eb = Vector::basis(b);
                let mut r = self.apply(&self.source.bracket(&ea, &eb));
                r.sub(&self.target.bracket(&self.apply(&ea), &self.apply(&eb)));
                if !r.is_zero() {
                    out.push(format!("φ[{0}, {1}] ≠ [φ {0}, φ {1}]", s.name(a), s.name(b)));
                }
            }
        }
        out
    }

    /// `χ ⊗ id_R` between the scalar extensions.
    pub fn tensor(&self, r: &Dgca) -> Result<(TensorDgla, TensorDgla, DglaMorphism)> {
        let ls = self.source.tensor(r)?;
        let ms = self.target.tensor(r)?;
        let rdim = r.space().dim();
        let mut images = vec![Vector::zero(); ls.dgla.dim()];
        for v in 0..self.source.dim() {
            for a in 0..rdim {
                images[ls.index(v, a)] = ms.embed(self.map.image(v), a);
            }
        }
        let map = GradedMap::new(ls.dgla.space(), ms.dgla.space(), 0, images)?;
        let m = DglaMorphism::new(ls.dgla.clone(), ms.dgla.clone(), map)?;
        Ok((ls, ms, m))
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &DglaMorphism) -> Result<DglaMorphism> {
        if first.target.as_ref() != self.source.as_ref() {
            return Err(Error::arg("morphisms are not composable"));
        }
        DglaMorphism::new(
            first.source.clone(),
            self.target.clone(),
            self.map.compose(&first.map),
        )
    }
}
