//! Small named DGLAs and morphisms used by tests and the command line.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;

use crate::algebra::{Dgla, DglaMorphism};
use crate::error::{Error, Result};
use crate::graded::{GradedSpace, Vector};
use crate::linalg::independent_subset;
use crate::scalar::{int, sign};

fn v(space: &GradedSpace, terms: &[(&str, i64)]) -> Vector {
    Vector::from_terms(terms.iter().map(|(n, c)| (space.index_of(n).expect("fixture basis"), int(*c))))
}

fn build(
    basis: &[(&str, i32)],
    d: &[(&str, &[(&str, i64)])],
    brackets: &[(&str, &str, &[(&str, i64)])],
) -> Dgla {
    let space = GradedSpace::new(basis.iter().copied()).expect("fixture basis");
    let mut diff = vec![Vector::zero(); space.dim()];
    for (x, img) in d {
        diff[space.index_of(x).unwrap()] = v(&space, img);
    }
    let entries: Vec<_> = brackets
        .iter()
        .map(|(a, b, img)| ((space.index_of(a).unwrap(), space.index_of(b).unwrap()), v(&space, img)))
        .collect();
    Dgla::new(space, diff, entries).expect("fixture is well-typed")
}

/// Basis `x` (degree 0), `y` (degree 1), `dx = y`, zero bracket.
pub fn two_term() -> Dgla {
    build(&[("x", 0), ("y", 1)], &[("x", &[("y", 1)])], &[])
}

/// sl₂ in degree 0.
pub fn sl2() -> Dgla {
    build(
        &[("e", 0), ("f", 0), ("h", 0)],
        &[],
        &[
            ("h", "e", &[("e", 2)]),
            ("h", "f", &[("f", -2)]),
            ("e", "f", &[("h", 1)]),
        ],
    )
}

/// gl(1|1) with `E12` odd of degree 1, `E21` of degree −1, supercommutator
/// bracket and `d = ad_{E12}`.
pub fn gl11() -> Dgla {
    build(
        &[("E11", 0), ("E22", 0), ("E12", 1), ("E21", -1)],
        &[
            ("E11", &[("E12", -1)]),
            ("E22", &[("E12", 1)]),
            ("E21", &[("E11", 1), ("E22", 1)]),
        ],
        &[
            ("E11", "E12", &[("E12", 1)]),
            ("E11", "E21", &[("E21", -1)]),
            ("E22", "E12", &[("E12", -1)]),
            ("E22", "E21", &[("E21", 1)]),
            ("E12", "E21", &[("E11", 1), ("E22", 1)]),
        ],
    )
}

/// `span{E11, E12} ↪ gl(1|1)`
pub fn gl11_borel() -> DglaMorphism {
    let m = Arc::new(gl11());
    let s = m.space();
    let gens = vec![
        ("a".to_string(), v(s, &[("E11", 1)])),
        ("u".to_string(), v(s, &[("E12", 1)])),
    ];
    m.subalgebra(gens).expect("closed subalgebra").1
}

/// `sl₂ ⊗ K[η]/(η²)` with `η` of degree 1 and `d = ad_{hη}`.
pub fn sl2_eta() -> Dgla {
    build(
        &[("e", 0), ("f", 0), ("h", 0), ("ee", 1), ("fe", 1), ("he", 1)],
        &[("e", &[("ee", 2)]), ("f", &[("fe", -2)])],
        &[
            ("h", "e", &[("e", 2)]),
            ("h", "f", &[("f", -2)]),
            ("e", "f", &[("h", 1)]),
            ("h", "ee", &[("ee", 2)]),
            ("h", "fe", &[("fe", -2)]),
            ("e", "fe", &[("he", 1)]),
            ("he", "e", &[("ee", 2)]),
            ("he", "f", &[("fe", -2)]),
            ("ee", "f", &[("he", 1)]),
        ],
    )
}

/// The Borel subalgebra `{h, e, hη, eη} ↪ sl₂ ⊗ K[η]/(η²)`.
pub fn sl2_eta_borel() -> DglaMorphism {
    let m = Arc::new(sl2_eta());
    let s = m.space();
    let gens = ["h", "e", "he", "ee"]
        .iter()
        .map(|n| (format!("b{n}"), v(s, &[(n, 1)])))
        .collect();
    m.subalgebra(gens).expect("closed subalgebra").1
}

/// The inclusion `∂M ↪ M`. The image of `d` is always closed under the
/// bracket (`[dx, dy] = d[x, dy]`), but the check is done rather than assumed.
pub fn derived_bracket_fixture(m: Arc<Dgla>) -> Result<DglaMorphism> {
    let images: Vec<Vector> = (0..m.dim()).map(|i| m.differential().image(i).clone()).collect();
    let keep = independent_subset(&images);
    let gens = keep
        .iter()
        .map(|&i| (format!("d{}", m.space().name(i)), images[i].clone()))
        .collect();
    if keep.is_empty() {
        let zero = Arc::new(Dgla::zero());
        let map = crate::graded::GradedMap::zero(zero.space(), m.space(), 0);
        return DglaMorphism::new(zero, m, map);
    }
    Ok(m.subalgebra(gens)?.1)
}

/// A finite-dimensional unital associative algebra given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssocAlgebra {
    names: Vec<String>,
    unit: usize,
    table: BTreeMap<(usize, usize), Vector>,
}

impl AssocAlgebra {
    pub fn new(
        names: Vec<String>,
        unit: usize,
        table: impl IntoIterator<Item = ((usize, usize), Vector)>,
    ) -> Result<Self> {
        let n = names.len();
        if unit >= n {
            return Err(Error::arg("unit index out of range"));
        }
        let table: BTreeMap<_, _> = table.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let a = AssocAlgebra { names, unit, table };
        for x in 0..n {
            let ex = Vector::basis(x);
            if a.mul(&Vector::basis(unit), &ex) != ex || a.mul(&ex, &Vector::basis(unit)) != ex {
                return Err(Error::arg(format!("`{}` is not a unit for `{}`", a.names[unit], a.names[x])));
            }
            for (y, z) in (0..n).cartesian_product(0..n) {
                let (ey, ez) = (Vector::basis(y), Vector::basis(z));
                if a.mul(&a.mul(&ex, &ey), &ez) != a.mul(&ex, &a.mul(&ey, &ez)) {
                    return Err(Error::arg("multiplication is not associative"));
                }
            }
        }
        Ok(a)
    }

    /// `K[ε]/(ε²)` with basis `1, e`.
    pub fn dual_numbers() -> Self {
        let table = [
            ((0, 0), Vector::basis(0)),
            ((0, 1), Vector::basis(1)),
            ((1, 0), Vector::basis(1)),
        ];
        AssocAlgebra::new(vec!["1".into(), "e".into()], 0, table).expect("dual numbers")
    }

    /// `K × K` with basis `1, u`, `u² = u`.
    pub fn split_pair() -> Self {
        let table = [
            ((0, 0), Vector::basis(0)),
            ((0, 1), Vector::basis(1)),
            ((1, 0), Vector::basis(1)),
            ((1, 1), Vector::basis(1)),
        ];
        AssocAlgebra::new(vec!["1".into(), "u".into()], 0, table).expect("split pair")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                if let Some(v) = self.table.get(&(a, b)) {
                    out.axpy(&(ca * cb), v);
                }
            }
        }
        out
    }

    /// Basis of `A/K·1`: every basis element except the unit.
    pub fn reduced_basis(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| i != self.unit).collect()
    }
}

/// Normalized Hochschild cochains `Hom((A/K)^{⊗n}, A)` of arities `1..=N`,
/// in degree `n − 1`, with the Gerstenhaber bracket and `d = [μ, −]`.
///
/// Arity 0 is left out so that dropping arities above `N` is a quotient
/// DGLA. Composition signs: `f ∘ g = Σ_i (−1)^{i(q−1)} f(…, g(…), …)` and
/// `[f, g] = f ∘ g − (−1)^{(p−1)(q−1)} g ∘ f`.
#[derive(Debug, Clone)]
pub struct Hochschild {
    pub algebra: AssocAlgebra,
    pub max_arity: usize,
    pub dgla: Arc<Dgla>,
    /// basis index → (arity, input tuple in `A` indices, value index)
    cochains: Vec<(usize, Vec<usize>, usize)>,
}

/// A cochain as a table on reduced input tuples (in `A` basis indices).
type Table = BTreeMap<Vec<usize>, Vector>;

impl Hochschild {
    pub fn new(algebra: AssocAlgebra, max_arity: usize) -> Result<Self> {
        if max_arity < 2 {
            return Err(Error::arg("Hochschild cochains need max arity ≥ 2"));
        }
        let red = algebra.reduced_basis();
        let mut named = Vec::new();
        let mut keys = Vec::new();
        for n in 1..=max_arity {
            for t in (0..n).map(|_| red.iter().copied()).multi_cartesian_product() {
                for v in 0..algebra.dim() {
                    let ins: Vec<&str> = t.iter().map(|&i| algebra.name(i)).collect();
                    named.push((format!("c{n}_{}_{}", ins.join("."), algebra.name(v)), n as i32 - 1));
                    keys.push((n, t.clone(), v));
                }
            }
        }
        let space = GradedSpace::new(named.clone())?;
        let mut cochains = vec![(0, vec![], 0); space.dim()];
        for ((name, _), key) in named.iter().zip(keys) {
            cochains[space.index_of(name).unwrap()] = key;
        }
        let mut h = Hochschild {
            algebra,
            max_arity,
            dgla: Arc::new(Dgla::zero()),
            cochains,
        };
        let dim = space.dim();
        let diff: Vec<Vector> = (0..dim).map(|i| h.coordinates(&h.differential(&h.elementary(i)))).collect();
        let mut entries = Vec::new();
        for (i, j) in (0..dim).cartesian_product(0..dim) {
            let b = h.coordinates(&h.bracket_tables(&h.elementary(i), &h.elementary(j)));
            if !b.is_zero() {
                entries.push(((i, j), b));
            }
        }
        h.dgla = Arc::new(Dgla::new(space, diff, entries)?);
        Ok(h)
    }

    pub fn arity(&self, i: usize) -> usize {
        self.cochains[i].0
    }

    /// Index of the cochain sending `inputs` to `value` (names of `A` basis elements).
    pub fn index_of(&self, inputs: &[&str], value: &str) -> Option<usize> {
        let t: Vec<usize> = inputs.iter().map(|n| self.algebra.index_of(n)).collect::<Option<_>>()?;
        let v = self.algebra.index_of(value)?;
        self.cochains.iter().position(|(n, tt, vv)| *n == t.len() && *tt == t && *vv == v)
    }

    fn elementary(&self, i: usize) -> (usize, Table) {
        let (n, t, v) = &self.cochains[i];
        (*n, BTreeMap::from([(t.clone(), Vector::basis(*v))]))
    }

    fn to_table(&self, x: &Vector) -> BTreeMap<usize, Table> {
        let mut out: BTreeMap<usize, Table> = BTreeMap::new();
        for (i, c) in x.iter() {
            let (n, t, v) = &self.cochains[i];
            out.entry(*n).or_default().entry(t.clone()).or_default().add_term(*v, c.clone());
        }
        out
    }

    fn coordinates(&self, (n, table): &(usize, Table)) -> Vector {
        let mut out = Vector::zero();
        if *n > self.max_arity {
            return out;
        }
        for (t, val) in table {
            for (v, c) in val.iter() {
                let i = self
                    .cochains
                    .iter()
                    .position(|(nn, tt, vv)| nn == n && tt == t && *vv == v)
                    .expect("cochain basis covers every reduced tuple");
                out.add_term(i, c.clone());
            }
        }
        out
    }

    /// Value of a cochain on `A`-vectors; unit components of inputs are dropped.
    fn eval(&self, table: &Table, args: &[Vector]) -> Vector {
        let mut acc: Vec<(Vec<usize>, crate::Scalar)> = vec![(vec![], num_traits::One::one())];
        for a in args {
            let mut next = Vec::new();
            for (t, c) in &acc {
                for (i, x) in a.iter() {
                    if i == self.algebra.unit() {
                        continue;
                    }
                    let mut t2 = t.clone();
                    t2.push(i);
                    next.push((t2, c * x));
                }
            }
            acc = next;
        }
        let mut out = Vector::zero();
        for (t, c) in acc {
            if let Some(v) = table.get(&t) {
                out.axpy(&c, v);
            }
        }
        out
    }

    fn reduced_tuples(&self, n: usize) -> Vec<Vec<usize>> {
        let red = self.algebra.reduced_basis();
        (0..n).map(|_| red.iter().copied()).multi_cartesian_product().collect()
    }

    /// `f ∘ g` for normalized `f` (arity `p`) and `g` (arity `q`).
    fn compose(&self, (p, f): &(usize, Table), (q, g): &(usize, Table)) -> (usize, Table) {
        let n = p + q - 1;
        let mut out = Table::new();
        for t in self.reduced_tuples(n) {
            let mut val = Vector::zero();
            for i in 0..*p {
                let inner = self.eval(g, &basis_args(&t[i..i + q]));
                if inner.is_zero() {
                    continue;
                }
                let mut args = basis_args(&t[..i]);
                args.push(inner);
                args.extend(basis_args(&t[i + q..]));
                val.axpy(&sign((i * (q - 1)) as i64), &self.eval(f, &args));
            }
            if !val.is_zero() {
                out.insert(t, val);
            }
        }
        (n, out)
    }

    fn bracket_tables(&self, f: &(usize, Table), g: &(usize, Table)) -> (usize, Table) {
        let (p, q) = (f.0, g.0);
        let (n, mut a) = self.compose(f, g);
        let (_, b) = self.compose(g, f);
        let s = -sign(((p - 1) * (q - 1)) as i64);
        for (t, v) in b {
            let e = a.entry(t).or_default();
            e.axpy(&s, &v);
        }
        a.retain(|_, v| !v.is_zero());
        (n, a)
    }

    /// `[μ, f] = μ ∘ f − (−1)^{p−1} f ∘ μ`, with `μ` the (non-normalized) product.
    fn differential(&self, (p, f): &(usize, Table)) -> (usize, Table) {
        let p = *p;
        let n = p + 1;
        let mut out = Table::new();
        for t in self.reduced_tuples(n) {
            let args = basis_args(&t);
            // μ ∘ f: f in slot 0 and slot 1 of μ
            let mut val = self.algebra.mul(&self.eval(f, &args[..p]), &args[p]);
            val.axpy(
                &sign((p - 1) as i64),
                &self.algebra.mul(&args[0], &self.eval(f, &args[1..])),
            );
            // f ∘ μ
            let mut fm = Vector::zero();
            for i in 0..p {
                let mut a = args[..i].to_vec();
                a.push(self.algebra.mul(&args[i], &args[i + 1]));
                a.extend(args[i + 2..].iter().cloned());
                fm.axpy(&sign(i as i64), &self.eval(f, &a));
            }
            val.axpy(&-sign((p - 1) as i64), &fm);
            if !val.is_zero() {
                out.insert(t, val);
            }
        }
        (n, out)
    }

    /// Evaluates an element of the DGLA on named inputs.
    pub fn evaluate(&self, x: &Vector, inputs: &[&str]) -> Vector {
        let tables = self.to_table(x);
        let args: Vec<Vector> = inputs
            .iter()
            .map(|n| Vector::basis(self.algebra.index_of(n).expect("algebra basis name")))
            .collect();
        tables
            .get(&inputs.len())
            .map(|t| self.eval(t, &args))
            .unwrap_or_default()
    }

    /// `ker α = {f | f(I^{⊗n}) ⊆ I} ↪ Hoch(A, A)` for an ideal `I` spanned by
    /// the named basis elements.
    pub fn kernel_inclusion(&self, ideal: &[&str]) -> Result<DglaMorphism> {
        let ideal: Vec<usize> = ideal
            .iter()
            .map(|n| self.algebra.index_of(n).ok_or_else(|| Error::arg(format!("unknown element `{n}`"))))
            .collect::<Result<_>>()?;
        if ideal.contains(&self.algebra.unit()) {
            return Err(Error::arg("the ideal must be proper"));
        }
        let gens = (0..self.dgla.dim())
            .filter(|&i| {
                let (_, t, v) = &self.cochains[i];
                !t.iter().all(|x| ideal.contains(x)) || ideal.contains(v)
            })
            .map(|i| (format!("k_{}", self.dgla.space().name(i)), Vector::basis(i)))
            .collect();
        Ok(self.dgla.subalgebra(gens)?.1)
    }
}

fn basis_args(t: &[usize]) -> Vec<Vector> {
    t.iter().map(|&i| Vector::basis(i)).collect()
}

/// `ker α ↪ Hoch(K[ε]/(ε²))` with `I = Kε`, cochain arities `1..=3`.
pub fn dual_numbers() -> (Hochschild, DglaMorphism) {
    let h = Hochschild::new(AssocAlgebra::dual_numbers(), 3).expect("dual numbers cochains");
    let chi = h.kernel_inclusion(&["e"]).expect("kernel is a subalgebra");
    (h, chi)
}

/// `ker α ↪ Hoch(K × K)` with `I = Ku`, cochain arities `1..=3`.
pub fn split_pair() -> (Hochschild, DglaMorphism) {
    let h = Hochschild::new(AssocAlgebra::split_pair(), 3).expect("split pair cochains");
    let chi = h.kernel_inclusion(&["u"]).expect("kernel is a subalgebra");
    (h, chi)
}

/// Names accepted by [`named`].
pub const NAMES: &[&str] = &["twoterm", "sl2", "gl11", "borel", "dualnumbers", "split", "derived"];

/// The named fixture morphisms used by the command line.
pub fn named(name: &str) -> Option<DglaMorphism> {
    Some(match name {
        "twoterm" => DglaMorphism::identity(Arc::new(two_term())),
        "sl2" => DglaMorphism::identity(Arc::new(sl2())),
        "gl11" => gl11_borel(),
        "borel" => sl2_eta_borel(),
        "dualnumbers" => dual_numbers().1,
        "split" => split_pair().1,
        "derived" => derived_bracket_fixture(Arc::new(gl11())).expect("∂M is a subalgebra"),
        _ => return None,
    })
}
