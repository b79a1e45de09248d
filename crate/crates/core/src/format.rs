//! TOML documents for DGLAs, morphisms, Artinian algebras, MC candidates and
//! tabulated L∞ structures.
//!
//! Linear combinations are arrays of `[name, coefficient]` pairs, tensor
//! elements arrays of `[basis, monomial, coefficient]` triples, and every
//! coefficient is a string `"p"` or `"p/q"`. Emitters list entries in
//! canonical basis order, so emit → parse → emit is byte-identical.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::algebra::{ArtinAlgebra, Dgla, DglaMorphism};
use crate::deformation::{GaugeWitness, MCPair, TensorElement};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace, Vector};
use crate::linfty::LInftyStructure;
use crate::scalar::{fmt_scalar, parse_scalar, sign};

type Combo = Vec<(String, String)>;
type Terms = Vec<(String, String, String)>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisEntry {
    name: String,
    degree: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapEntry {
    source: String,
    value: Combo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairEntry {
    left: String,
    right: String,
    value: Combo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DglaDoc {
    basis: Vec<Spanned<BasisEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    differential: Vec<Spanned<MapEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    bracket: Vec<Spanned<PairEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismDoc {
    source: DglaDoc,
    target: DglaDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    map: Vec<Spanned<MapEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtinDoc {
    monomials: Spanned<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nil_index: Option<Spanned<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    product: Vec<Spanned<PairEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    x: Spanned<Terms>,
    a: Spanned<Terms>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessDoc {
    a: Spanned<Terms>,
    b: Spanned<Terms>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pair: Option<PairDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<PairDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinftyEntry {
    inputs: Vec<String>,
    value: Combo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinftyDoc {
    max_arity: usize,
    vanishing_above: bool,
    basis: Vec<Spanned<BasisEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    bracket: Vec<Spanned<LinftyEntry>>,
}

/// Resolves spans to 1-based line numbers.
struct Source<'a>(&'a str);

impl Source<'_> {
    fn line(&self, span: &Range<usize>) -> usize {
        let end = span.start.min(self.0.len());
        self.0.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() + 1
    }

    fn err<T>(&self, span: &Range<usize>, msg: impl Into<String>) -> Result<T> {
        Err(Error::format(self.line(span), msg))
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        toml::from_str(self.0).map_err(|e| {
            let line = e.span().map_or(1, |s| self.line(&s));
            Error::format(line, e.message().to_string())
        })
    }
}

fn spanned<T>(v: T) -> Spanned<T> {
    Spanned::new(0..0, v)
}

fn scalar(src: &Source, span: &Range<usize>, text: &str) -> Result<crate::Scalar> {
    parse_scalar(text).map_or_else(|| src.err(span, format!("`{text}` is not a rational number")), Ok)
}

fn index(src: &Source, span: &Range<usize>, space: &GradedSpace, name: &str) -> Result<usize> {
    space
        .index_of(name)
        .map_or_else(|| src.err(span, format!("unknown basis element `{name}`")), Ok)
}

/// A linear combination whose terms must all have degree `degree` (if given).
fn combo(src: &Source, span: &Range<usize>, space: &GradedSpace, c: &Combo, degree: Option<i32>) -> Result<Vector> {
    let mut v = Vector::zero();
    for (name, coeff) in c {
        let i = index(src, span, space, name)?;
        if let Some(d) = degree {
            if space.degree(i) != d {
                return src.err(
                    span,
                    format!("`{name}` has degree {}, expected {d}", space.degree(i)),
                );
            }
        }
        v.add_term(i, scalar(src, span, coeff)?);
    }
    Ok(v)
}

fn emit_combo(space: &GradedSpace, v: &Vector) -> Combo {
    v.iter().map(|(i, c)| (space.name(i).to_string(), fmt_scalar(c))).collect()
}

fn space_of(src: &Source, basis: &[Spanned<BasisEntry>]) -> Result<GradedSpace> {
    let mut seen = BTreeSet::new();
    for b in basis {
        if !seen.insert(b.get_ref().name.as_str()) {
            return src.err(&b.span(), format!("duplicate basis element `{}`", b.get_ref().name));
        }
    }
    GradedSpace::new(basis.iter().map(|b| (b.get_ref().name.clone(), b.get_ref().degree)))
        .map_err(|e| Error::format(basis.first().map_or(1, |b| src.line(&b.span())), e.to_string()))
}

fn emit_basis(space: &GradedSpace) -> Vec<Spanned<BasisEntry>> {
    space
        .basis()
        .iter()
        .map(|b| {
            spanned(BasisEntry {
                name: b.name.clone(),
                degree: b.degree,
            })
        })
        .collect()
}

/// Images of a linear map given entry by entry; unlisted sources map to zero.
fn linear_map(
    src: &Source,
    from: &GradedSpace,
    to: &GradedSpace,
    degree: i32,
    entries: &[Spanned<MapEntry>],
) -> Result<Vec<Vector>> {
    let mut images = vec![None; from.dim()];
    for e in entries {
        let span = e.span();
        let e = e.get_ref();
        let i = index(src, &span, from, &e.source)?;
        if images[i].is_some() {
            return src.err(&span, format!("`{}` is listed twice", e.source));
        }
        images[i] = Some(combo(src, &span, to, &e.value, Some(from.degree(i) + degree))?);
    }
    Ok(images.into_iter().map(Option::unwrap_or_default).collect())
}

fn emit_map(from: &GradedSpace, to: &GradedSpace, images: &[Vector]) -> Vec<Spanned<MapEntry>> {
    images
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| {
            spanned(MapEntry {
                source: from.name(i).to_string(),
                value: emit_combo(to, v),
            })
        })
        .collect()
}

fn dgla_from_doc(src: &Source, doc: &DglaDoc) -> Result<Dgla> {
    let space = space_of(src, &doc.basis)?;
    let diff = linear_map(src, &space, &space, 1, &doc.differential)?;
    let mut entries = BTreeMap::new();
    for e in &doc.bracket {
        let span = e.span();
        let e = e.get_ref();
        let a = index(src, &span, &space, &e.left)?;
        let b = index(src, &span, &space, &e.right)?;
        let v = combo(src, &span, &space, &e.value, Some(space.degree(a) + space.degree(b)))?;
        if entries.insert((a, b), v).is_some() {
            return src.err(&span, format!("[{}, {}] is listed twice", e.left, e.right));
        }
    }
    Dgla::new(space, diff, entries).map_err(|e| Error::format(1, e.to_string()))
}

fn dgla_to_doc(g: &Dgla) -> DglaDoc {
    let space = g.space();
    let table = g.bracket_table();
    let mirror = |i: usize, j: usize| -> Option<Vector> {
        table.get(&(j, i)).map(|v| v.scaled(&-sign((space.degree(i) * space.degree(j)) as i64)))
    };
    let bracket = table
        .iter()
        .filter(|((i, j), v)| i <= j || mirror(*i, *j).as_ref() != Some(*v))
        .map(|((i, j), v)| {
            spanned(PairEntry {
                left: space.name(*i).to_string(),
                right: space.name(*j).to_string(),
                value: emit_combo(space, v),
            })
        })
        .collect();
    DglaDoc {
        basis: emit_basis(space),
        differential: emit_map(space, space, g.differential().images()),
        bracket,
    }
}

fn render<T: Serialize>(doc: &T) -> String {
    toml::to_string(doc).expect("documents serialize")
}

/// Parses a DGLA document. Axioms are not checked.
pub fn parse_dgla(text: &str) -> Result<Dgla> {
    let src = Source(text);
    dgla_from_doc(&src, &src.parse()?)
}

pub fn emit_dgla(g: &Dgla) -> String {
    render(&dgla_to_doc(g))
}

/// Parses a morphism document with `[source]`, `[target]` and `[[map]]` tables.
pub fn parse_morphism(text: &str) -> Result<DglaMorphism> {
    let src = Source(text);
    let doc: MorphismDoc = src.parse()?;
    let l = Arc::new(dgla_from_doc(&src, &doc.source)?);
    let m = Arc::new(dgla_from_doc(&src, &doc.target)?);
    let images = linear_map(&src, l.space(), m.space(), 0, &doc.map)?;
    let map = GradedMap::new(l.space(), m.space(), 0, images).map_err(|e| Error::format(1, e.to_string()))?;
    DglaMorphism::new(l, m, map).map_err(|e| Error::format(1, e.to_string()))
}

pub fn emit_morphism(chi: &DglaMorphism) -> String {
    render(&MorphismDoc {
        source: dgla_to_doc(&chi.source),
        target: dgla_to_doc(&chi.target),
        map: emit_map(chi.source.space(), chi.target.space(), chi.map.images()),
    })
}

pub fn parse_artin(text: &str) -> Result<ArtinAlgebra> {
    let src = Source(text);
    let doc: ArtinDoc = src.parse()?;
    let names = doc.monomials.get_ref().clone();
    let mspan = doc.monomials.span();
    let space = GradedSpace::new(names.iter().map(|n| (n.clone(), 0))).map_err(|e| Error::format(src.line(&mspan), e.to_string()))?;
    if space.dim() == 0 {
        return src.err(&mspan, "the maximal ideal needs at least one monomial");
    }
    let mut products = BTreeMap::new();
    for e in &doc.product {
        let span = e.span();
        let e = e.get_ref();
        let a = index(&src, &span, &space, &e.left)?;
        let b = index(&src, &span, &space, &e.right)?;
        let v = combo(&src, &span, &space, &e.value, None)?;
        if products.insert((a, b), v).is_some() {
            return src.err(&span, format!("{} * {} is listed twice", e.left, e.right));
        }
    }
    let ordered: Vec<String> = (0..space.dim()).map(|i| space.name(i).to_string()).collect();
    let declared = doc.nil_index.as_ref().map(|n| *n.get_ref());
    let line = doc.nil_index.as_ref().map_or(1, |n| src.line(&n.span()));
    ArtinAlgebra::new(ordered, products, declared).map_err(|e| Error::format(line, e.to_string()))
}

pub fn emit_artin(a: &ArtinAlgebra) -> String {
    let space = a.space();
    let product = a
        .products()
        .iter()
        .filter(|((i, j), _)| i <= j)
        .map(|((i, j), v)| {
            spanned(PairEntry {
                left: space.name(*i).to_string(),
                right: space.name(*j).to_string(),
                value: emit_combo(space, v),
            })
        })
        .collect();
    render(&ArtinDoc {
        monomials: spanned((0..space.dim()).map(|i| space.name(i).to_string()).collect()),
        nil_index: Some(spanned(a.nil_index())),
        product,
    })
}

fn tensor(src: &Source, t: &Spanned<Terms>, space: &GradedSpace, degree: i32, art: &ArtinAlgebra) -> Result<TensorElement> {
    let span = t.span();
    let mut out = TensorElement::zero();
    for (b, m, c) in t.get_ref() {
        let i = index(src, &span, space, b)?;
        if space.degree(i) != degree {
            return src.err(&span, format!("`{b}` has degree {}, expected {degree}", space.degree(i)));
        }
        let j = art
            .space()
            .index_of(m)
            .map_or_else(|| src.err(&span, format!("unknown monomial `{m}`")), Ok)?;
        out.add_pure(&Vector::term(i, scalar(src, &span, c)?), j);
    }
    Ok(out)
}

fn emit_tensor(space: &GradedSpace, art: &ArtinAlgebra, t: &TensorElement) -> Spanned<Terms> {
    spanned(
        t.terms()
            .into_iter()
            .map(|((b, m), c)| (space.name(b).to_string(), art.space().name(m).to_string(), fmt_scalar(&c)))
            .collect(),
    )
}

/// MC pairs and a gauge witness read from a candidate document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Candidates {
    pub pair: Option<MCPair>,
    pub target: Option<MCPair>,
    pub witness: Option<GaugeWitness>,
}

/// Parses `[pair]`, `[target]` (both with `x ∈ L¹`, `a ∈ M⁰`) and
/// `[witness]` (`a ∈ L⁰`, `b ∈ M⁻¹`) tables against `χ` and `A`.
pub fn parse_candidates(text: &str, chi: &DglaMorphism, art: &ArtinAlgebra) -> Result<Candidates> {
    let src = Source(text);
    let doc: CandidateDoc = src.parse()?;
    let (l, m) = (chi.source.space(), chi.target.space());
    let pair = |p: &PairDoc| -> Result<MCPair> {
        Ok(MCPair {
            x: tensor(&src, &p.x, l, 1, art)?,
            a: tensor(&src, &p.a, m, 0, art)?,
        })
    };
    Ok(Candidates {
        pair: doc.pair.as_ref().map(&pair).transpose()?,
        target: doc.target.as_ref().map(&pair).transpose()?,
        witness: doc
            .witness
            .as_ref()
            .map(|w| -> Result<GaugeWitness> {
                Ok(GaugeWitness {
                    a: tensor(&src, &w.a, l, 0, art)?,
                    b: tensor(&src, &w.b, m, -1, art)?,
                })
            })
            .transpose()?,
    })
}

pub fn emit_candidates(c: &Candidates, chi: &DglaMorphism, art: &ArtinAlgebra) -> String {
    let (l, m) = (chi.source.space(), chi.target.space());
    let pair = |p: &MCPair| PairDoc {
        x: emit_tensor(l, art, &p.x),
        a: emit_tensor(m, art, &p.a),
    };
    render(&CandidateDoc {
        pair: c.pair.as_ref().map(pair),
        target: c.target.as_ref().map(pair),
        witness: c.witness.as_ref().map(|w| WitnessDoc {
            a: emit_tensor(l, art, &w.a),
            b: emit_tensor(m, art, &w.b),
        }),
    })
}

/// Parses a tabulated L∞ structure on a suspended space.
pub fn parse_linfty(text: &str) -> Result<LInftyStructure> {
    let src = Source(text);
    let doc: LinftyDoc = src.parse()?;
    let space = space_of(&src, &doc.basis)?;
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for e in &doc.bracket {
        let span = e.span();
        let e = e.get_ref();
        let word: Vec<usize> = e.inputs.iter().map(|n| index(&src, &span, &space, n)).collect::<Result<_>>()?;
        let value = combo(&src, &span, &space, &e.value, None)?;
        // validate the entry on its own so that errors carry its line
        LInftyStructure::new(space.clone(), doc.max_arity, doc.vanishing_above, [(word.clone(), value.clone())])
            .map_err(|err| Error::format(src.line(&span), err.to_string()))?;
        let key = crate::graded::canonicalize(&space, &word).map(|w| w.factors);
        if let Some(k) = key {
            if !seen.insert(k) {
                return src.err(&span, "bracket listed twice");
            }
        }
        entries.push((word, value));
    }
    LInftyStructure::new(space, doc.max_arity, doc.vanishing_above, entries).map_err(|e| Error::format(1, e.to_string()))
}

/// Structure constants on canonical words, in canonical order.
pub fn emit_linfty(s: &LInftyStructure) -> String {
    let space = crate::linfty::Brackets::space(s);
    render(&LinftyDoc {
        max_arity: crate::linfty::Brackets::max_arity(s),
        vanishing_above: crate::linfty::Brackets::vanishing_above(s),
        basis: emit_basis(space),
        bracket: s
            .table()
            .iter()
            .map(|(w, v)| {
                spanned(LinftyEntry {
                    inputs: w.iter().map(|&i| space.name(i).to_string()).collect(),
                    value: emit_combo(space, v),
                })
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn dgla_round_trip() {
        for g in [fixtures::two_term(), fixtures::sl2(), fixtures::gl11(), fixtures::sl2_eta()] {
            let text = emit_dgla(&g);
            let back = parse_dgla(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(emit_dgla(&back), text);
        }
    }

    #[test]
    fn sl2_document() {
        let text = r#"
[[basis]]
name = "e"
degree = 0

[[basis]]
name = "f"
degree = 0

[[basis]]
name = "h"
degree = 0

[[bracket]]
left = "h"
right = "e"
value = [["e", "2"]]

[[bracket]]
left = "h"
right = "f"
value = [["f", "-2"]]

[[bracket]]
left = "e"
right = "f"
value = [["h", "1"]]
"#;
        assert_eq!(parse_dgla(text).unwrap(), fixtures::sl2());
    }

    #[test]
    fn errors_carry_lines() {
        let wrong_degree = "[[basis]]\nname = \"x\"\ndegree = 0\n\n[[basis]]\nname = \"y\"\ndegree = 1\n\n[[bracket]]\nleft = \"x\"\nright = \"x\"\nvalue = [[\"y\", \"1\"]]\n";
        assert_eq!(parse_dgla(wrong_degree).unwrap_err(), Error::format(9, "`y` has degree 1, expected 0"));
        let unknown = "[[basis]]\nname = \"x\"\ndegree = 0\n\n[[differential]]\nsource = \"z\"\nvalue = []\n";
        assert!(matches!(parse_dgla(unknown), Err(Error::Format { line: 5, .. })));
        let bad_number = "[[basis]]\nname = \"x\"\ndegree = 0\n[[basis]]\nname = \"y\"\ndegree = 1\n[[differential]]\nsource = \"x\"\nvalue = [[\"y\", \"1/0\"]]\n";
        assert!(matches!(parse_dgla(bad_number), Err(Error::Format { line: 7, .. })));
        assert!(matches!(parse_dgla("basis = 3"), Err(Error::Format { line: 1, .. })));
    }

    #[test]
    fn morphism_and_artin_round_trip() {
        for name in fixtures::NAMES {
            let chi = fixtures::named(name).unwrap();
            let text = emit_morphism(&chi);
            let back = parse_morphism(&text).unwrap();
            assert_eq!(back.map, chi.map, "{name}");
            assert_eq!(emit_morphism(&back), text, "{name}");
        }
        let a = ArtinAlgebra::monomial_quotient(&["x", "y"], &[vec![2, 0], vec![0, 3]]).unwrap();
        let text = emit_artin(&a);
        assert_eq!(parse_artin(&text).unwrap(), a);
        let lie = text.replace("nil_index = 4", "nil_index = 3");
        assert!(matches!(parse_artin(&lie), Err(Error::Format { .. })));
    }

    #[test]
    fn candidates_round_trip() {
        let chi = fixtures::gl11_borel();
        let art = ArtinAlgebra::truncated("e", 3).unwrap();
        let text = "[pair]\nx = [[\"u\", \"e\", \"1\"]]\na = [[\"E11\", \"e\", \"-1\"], [\"E11\", \"e^2\", \"1/2\"]]\n\n[witness]\na = []\nb = [[\"E21\", \"e\", \"3\"]]\n";
        let c = parse_candidates(text, &chi, &art).unwrap();
        assert!(c.target.is_none());
        let again = emit_candidates(&c, &chi, &art);
        assert_eq!(parse_candidates(&again, &chi, &art).unwrap(), c);
        let wrong = text.replace("\"u\", \"e\"", "\"a\", \"e\"");
        assert!(matches!(parse_candidates(&wrong, &chi, &art), Err(Error::Format { line: 2, .. })));
    }

    #[test]
    fn linfty_round_trip_is_byte_identical() {
        let cone = Arc::new(crate::cone::Cone::new(fixtures::dual_numbers().1).unwrap());
        let q = crate::cone::ConeBrackets::new(cone, 3).unwrap();
        let table = LInftyStructure::tabulate(&q, 3, false).unwrap();
        let text = emit_linfty(&table);
        let back = parse_linfty(&text).unwrap();
        assert_eq!(back, table);
        assert_eq!(emit_linfty(&back), text);
        // B₁ and B₂ weights show up as halves and sixths
        assert!(text.contains("\"1/2\"") || text.contains("\"-1/2\""));
        let abelian = crate::linfty::quillen(&fixtures::two_term()).unwrap();
        assert!(abelian.table().keys().all(|w| w.len() == 1));
        assert_eq!(parse_linfty(&emit_linfty(&abelian)).unwrap(), abelian);
    }
}
