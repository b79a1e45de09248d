//! L∞ structures as families of degree-1 graded-symmetric brackets on a
//! suspended space, with the coderivation extension and axiom checks.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::Dgla;
use crate::error::{Error, Result};
use crate::graded::{
    canonicalize, decalage, decalage_inverse, expand_product, koszul_sign_unchecked,
    sym_basis_words, unshuffles, GradedMap, GradedSpace, MultilinearMap, Vector,
};
use crate::scalar::Scalar;

/// A family of brackets `q_k` on the suspended space. Implementors evaluate
/// `q_k` on canonical words; everything else is derived.
pub trait Brackets: Sync {
    /// The suspended space `W = V[1]`.
    fn space(&self) -> &GradedSpace;

    /// Highest arity this structure knows about.
    fn max_arity(&self) -> usize;

    /// Whether `q_k = 0` is asserted for `k > max_arity`.
    fn vanishing_above(&self) -> bool;

    /// `q_k` on a canonical word (sorted, no repeated odd factor), `1 ≤ k ≤ max_arity`.
    fn bracket_sorted(&self, word: &[usize]) -> Vector;

    /// `q_k(w_1 ⊙ … ⊙ w_k)` on basis elements in any order.
    fn bracket(&self, factors: &[usize]) -> Result<Vector> {
        let k = factors.len();
        if k == 0 {
            return Ok(Vector::zero());
        }
        if k > self.max_arity() {
            return if self.vanishing_above() {
                Ok(Vector::zero())
            } else {
                Err(Error::Capacity {
                    what: "bracket arity".into(),
                    needed: k,
                    limit: self.max_arity(),
                })
            };
        }
        Ok(match canonicalize(self.space(), factors) {
            None => Vector::zero(),
            Some(w) if w.sign > 0 => self.bracket_sorted(&w.factors),
            Some(w) => self.bracket_sorted(&w.factors).neg(),
        })
    }

    /// `q_k(v_1 ⊙ … ⊙ v_k)` for arbitrary (homogeneous or not) vectors.
    fn bracket_vectors(&self, args: &[Vector]) -> Result<Vector> {
        let k = args.len();
        if k > self.max_arity() {
            return if self.vanishing_above() {
                Ok(Vector::zero())
            } else {
                Err(Error::Capacity {
                    what: "bracket arity".into(),
                    needed: k,
                    limit: self.max_arity(),
                })
            };
        }
        let mut out = Vector::zero();
        for (w, c) in expand_product(self.space(), args) {
            out.axpy(&c, &self.bracket_sorted(&w));
        }
        Ok(out)
    }
}

/// Brackets stored as a table on canonical words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LInftyStructure {
    space: GradedSpace,
    table: BTreeMap<Vec<usize>, Vector>,
    max_arity: usize,
    vanishing_above: bool,
}

impl LInftyStructure {
    /// Entries may be given on words in any order; each is canonicalized and
    /// its value checked to have degree `deg(word) + 1`.
    pub fn new(
        space: GradedSpace,
        max_arity: usize,
        vanishing_above: bool,
        entries: impl IntoIterator<Item = (Vec<usize>, Vector)>,
    ) -> Result<Self> {
        let mut table: BTreeMap<Vec<usize>, Vector> = BTreeMap::new();
        for (word, value) in entries {
            if word.is_empty() || word.len() > max_arity {
                return Err(Error::arg(format!(
                    "bracket of arity {} outside 1..={max_arity}",
                    word.len()
                )));
            }
            if word.iter().any(|&i| i >= space.dim()) {
                return Err(Error::arg("bracket word index out of range"));
            }
            let deg: i32 = word.iter().map(|&i| space.degree(i)).sum::<i32>() + 1;
            if let Some((j, _)) = value.iter().find(|(j, _)| space.degree(*j) != deg) {
                return Err(Error::arg(format!(
                    "bracket value `{}` has degree {}, expected {deg}",
                    space.name(j),
                    space.degree(j)
                )));
            }
            match canonicalize(&space, &word) {
                None if value.is_zero() => {}
                None => return Err(Error::arg("nonzero bracket on a word with a repeated odd factor")),
                Some(w) => {
                    let v = if w.sign > 0 { value } else { value.neg() };
                    table.entry(w.factors).or_default().add(&v);
                }
            }
        }
        table.retain(|_, v| !v.is_zero());
        Ok(LInftyStructure {
            space,
            table,
            max_arity,
            vanishing_above,
        })
    }

    /// Evaluates `b` on every canonical word up to `arity`.
    pub fn tabulate(b: &dyn Brackets, arity: usize, vanishing_above: bool) -> Result<Self> {
        if arity > b.max_arity() && !b.vanishing_above() {
            return Err(Error::Capacity {
                what: "bracket arity".into(),
                needed: arity,
                limit: b.max_arity(),
            });
        }
        let words: Vec<Vec<usize>> = (1..=arity).flat_map(|n| sym_basis_words(b.space(), n)).collect();
        let table: BTreeMap<Vec<usize>, Vector> = words
            .into_par_iter()
            .filter_map(|w| {
                let v = if w.len() <= b.max_arity() { b.bracket_sorted(&w) } else { Vector::zero() };
                (!v.is_zero()).then_some((w, v))
            })
            .collect();
        Ok(LInftyStructure {
            space: b.space().clone(),
            table,
            max_arity: arity,
            vanishing_above,
        })
    }

    pub fn table(&self) -> &BTreeMap<Vec<usize>, Vector> {
        &self.table
    }

    /// Nonzero entries of arity `k`.
    pub fn entries_of_arity(&self, k: usize) -> impl Iterator<Item = (&Vec<usize>, &Vector)> {
        self.table.iter().filter(move |(w, _)| w.len() == k)
    }

    /// `q_k` as a map on ordered tuples, for use with [`decalage_inverse`].
    pub fn ordered_table(&self, k: usize) -> MultilinearMap {
        let mut table = BTreeMap::new();
        for (w, v) in self.entries_of_arity(k) {
            let mut perms: Vec<Vec<usize>> = Vec::new();
            permutations_of_multiset(w, &mut perms);
            for p in perms {
                let s = canonicalize(&self.space, &p).expect("nonzero word").sign;
                table.insert(p, if s > 0 { v.clone() } else { v.neg() });
            }
        }
        MultilinearMap {
            arity: k,
            degree: 1,
            table,
        }
    }

    /// The unsuspended bracket `[ , … , ]_k` on `V = W[-1]`.
    pub fn unsuspended(&self, k: usize) -> Result<MultilinearMap> {
        let v = self.space.shifted(-1);
        decalage_inverse(&self.ordered_table(k), &v, &v, 1)
    }
}

fn permutations_of_multiset(w: &[usize], out: &mut Vec<Vec<usize>>) {
    use itertools::Itertools;
    out.extend(w.iter().copied().permutations(w.len()).unique());
}

impl Brackets for LInftyStructure {
    fn space(&self) -> &GradedSpace {
        &self.space
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn vanishing_above(&self) -> bool {
        self.vanishing_above
    }

    fn bracket_sorted(&self, word: &[usize]) -> Vector {
        self.table.get(word).cloned().unwrap_or_default()
    }
}

/// The Quillen construction: `q₁ = dec(d)`, `q₂ = dec([,])`, nothing above.
pub fn quillen(d: &Dgla) -> Result<LInftyStructure> {
    if let Some(v) = d.check().into_iter().next() {
        return Err(Error::arg(format!(
            "not a DGLA: {} fails on ({})",
            v.axiom,
            v.witnesses.join(", ")
        )));
    }
    quillen_unchecked(d)
}

/// [`quillen`] without validating the DGLA axioms, so that broken inputs can be studied.
pub fn quillen_unchecked(d: &Dgla) -> Result<LInftyStructure> {
    let v = d.space();
    let w = v.shifted(1);
    let d1 = MultilinearMap {
        arity: 1,
        degree: 1,
        table: (0..v.dim())
            .map(|i| (vec![i], d.differential().image(i).clone()))
            .filter(|(_, x)| !x.is_zero())
            .collect(),
    };
    let b2 = MultilinearMap {
        arity: 2,
        degree: 0,
        table: d
            .bracket_table()
            .iter()
            .filter(|((a, b), _)| a <= b)
            .map(|(&(a, b), x)| (vec![a, b], x.clone()))
            .collect(),
    };
    let q1 = decalage(&d1, v, v, 1)?;
    let q2 = decalage(&b2, v, v, 1)?;
    let entries = q1.table.into_iter().chain(q2.table);
    LInftyStructure::new(w, 2, true, entries)
}

/// `Q(w_1 ⊙ … ⊙ w_n) = Σ_k Σ_{σ ∈ S(k,n-k)} ε(σ) q_k(w_σ(1..k)) ⊙ w_σ(k+1..n)`
/// on a basis word, as a formal sum of canonical words.
pub fn coderivation_apply(b: &dyn Brackets, word: &[usize]) -> Result<BTreeMap<Vec<usize>, Scalar>> {
    let space = b.space();
    let n = word.len();
    let degrees = space.degrees_of(word);
    let mut out: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
    for k in 1..=n {
        for sigma in unshuffles(k, n - k) {
            let head: Vec<usize> = sigma[..k].iter().map(|&p| word[p]).collect();
            let q = b.bracket(&head)?;
            if q.is_zero() {
                continue;
            }
            let eps = koszul_sign_unchecked(&sigma, &degrees);
            let mut args = vec![q];
            args.extend(sigma[k..].iter().map(|&p| Vector::basis(word[p])));
            for (w, c) in expand_product(space, &args) {
                let e = out.entry(w).or_insert_with(Scalar::zero);
                if eps > 0 {
                    *e += c;
                } else {
                    *e -= c;
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// One basis word on which `(QQ)¹` (or a morphism identity) fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordViolation {
    pub arity: usize,
    pub word: Vec<usize>,
    pub residual: Vector,
}

/// `(QQ)¹` on a single basis word.
pub fn qq_residual(b: &dyn Brackets, word: &[usize]) -> Result<Vector> {
    let mut out = Vector::zero();
    for (w, c) in coderivation_apply(b, word)? {
        out.axpy(&c, &b.bracket(&w)?);
    }
    Ok(out)
}

/// Checks `(QQ)¹ = 0` on every canonical basis word of length ≤ `up_to`.
pub fn check_linfty(b: &dyn Brackets, up_to: usize) -> Result<Vec<WordViolation>> {
    if up_to > b.max_arity() && !b.vanishing_above() {
        return Err(Error::Capacity {
            what: "bracket arity".into(),
            needed: up_to,
            limit: b.max_arity(),
        });
    }
    let words: Vec<Vec<usize>> = (1..=up_to).flat_map(|n| sym_basis_words(b.space(), n)).collect();
    let found: Result<Vec<Option<WordViolation>>> = words
        .into_par_iter()
        .map(|w| {
            let r = qq_residual(b, &w)?;
            Ok((!r.is_zero()).then(|| WordViolation {
                arity: w.len(),
                word: w,
                residual: r,
            }))
        })
        .collect();
    Ok(found?.into_iter().flatten().collect())
}

/// Checks `q̂_n(f₁w_1 ⊙ … ⊙ f₁w_n) = f₁(q_n(w_1 ⊙ … ⊙ w_n))` on canonical words.
pub fn check_linear_morphism(
    source: &dyn Brackets,
    target: &dyn Brackets,
    f1: &GradedMap,
    up_to: usize,
) -> Result<Vec<WordViolation>> {
    if f1.degree() != 0
        || f1.source_dim() != source.space().dim()
        || f1.target_dim() != target.space().dim()
    {
        return Err(Error::arg("linear morphism must be a degree-0 map between the suspended spaces"));
    }
    let words: Vec<Vec<usize>> = (1..=up_to).flat_map(|n| sym_basis_words(source.space(), n)).collect();
    let found: Result<Vec<Option<WordViolation>>> = words
        .into_par_iter()
        .map(|w| {
            let args: Vec<Vector> = w.iter().map(|&i| f1.image(i).clone()).collect();
            let mut r = target.bracket_vectors(&args)?;
            r.sub(&f1.apply(&source.bracket(&w)?));
            Ok((!r.is_zero()).then(|| WordViolation {
                arity: w.len(),
                word: w,
                residual: r,
            }))
        })
        .collect();
    Ok(found?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::int;

    fn sl2_with(ef: Vector) -> Dgla {
        let s = fixtures::sl2();
        let space = s.space().clone();
        let (e, f, h) = (0, 1, 2);
        Dgla::new(
            space,
            vec![Vector::zero(); 3],
            [
                ((h, e), Vector::term(e, int(2))),
                ((h, f), Vector::term(f, int(-2))),
                ((e, f), ef),
            ],
        )
        .unwrap()
    }

    #[test]
    fn quillen_sl2_bracket() {
        let q = quillen(&fixtures::sl2()).unwrap();
        let s = q.space();
        let (e, f, h) = (s.index_of("e").unwrap(), s.index_of("f").unwrap(), s.index_of("h").unwrap());
        assert_eq!(q.bracket(&[e, f]).unwrap(), Vector::basis(h));
        assert_eq!(s.degree(e), -1);
    }

    #[test]
    fn quillen_two_term_is_minus_d() {
        let q = quillen(&fixtures::two_term()).unwrap();
        assert_eq!(q.bracket(&[0]).unwrap(), Vector::term(1, int(-1)));
        assert_eq!(q.entries_of_arity(2).count(), 0);
    }

    #[test]
    fn coderivation_word_counts() {
        // q₁ = 0, q₂ nonzero: a length-2 word maps to q₂ alone, a length-3 word
        // gets 3 length-2 contributions
        let q = quillen(&fixtures::sl2()).unwrap();
        let (e, f, h) = (0, 1, 2);
        let two = coderivation_apply(&q, &[e, f]).unwrap();
        assert_eq!(two, BTreeMap::from([(vec![h], int(1))]));
        let three = coderivation_apply(&q, &[e, f, h]).unwrap();
        assert!(three.keys().all(|w| w.len() == 2));
    }

    #[test]
    fn valid_dglas_pass_and_broken_jacobi_fails_at_three() {
        for d in [fixtures::two_term(), fixtures::sl2(), fixtures::gl11()] {
            let q = quillen(&d).unwrap();
            assert!(check_linfty(&q, 4).unwrap().is_empty());
        }
        let mut bad = Vector::basis(2);
        bad.add_term(0, int(1));
        let broken = sl2_with(bad);
        assert!(quillen(&broken).is_err());
        let q = quillen_unchecked(&broken).unwrap();
        let report = check_linfty(&q, 3).unwrap();
        assert!(!report.is_empty());
        assert!(report.iter().all(|v| v.arity == 3));
    }

    #[test]
    fn arity_three_residual_is_the_jacobiator() {
        // (QQ)¹(e⊙f⊙h) for degree-0 inputs is the sum of [[a,b],c] over the
        // three unshuffles, which equals the cyclic Jacobi sum computed in V.
        let mut bad = Vector::basis(2);
        bad.add_term(0, int(1));
        let broken = sl2_with(bad);
        let q = quillen_unchecked(&broken).unwrap();
        for w in sym_basis_words(q.space(), 3) {
            let r = qq_residual(&q, &w).unwrap();
            let (a, b, c) = (
                Vector::basis(w[0]),
                Vector::basis(w[1]),
                Vector::basis(w[2]),
            );
            let mut jac = broken.bracket(&broken.bracket(&a, &b), &c);
            jac.add(&broken.bracket(&broken.bracket(&b, &c), &a));
            jac.add(&broken.bracket(&broken.bracket(&c, &a), &b));
            assert_eq!(r, jac, "word {w:?}");
        }
    }

    #[test]
    fn zero_brackets_pass() {
        let s = GradedSpace::new([("a", 0), ("b", 1)]).unwrap();
        let z = LInftyStructure::new(s, 3, false, []).unwrap();
        assert!(check_linfty(&z, 3).unwrap().is_empty());
        assert!(matches!(check_linfty(&z, 4), Err(Error::Capacity { .. })));
    }

    #[test]
    fn identity_and_zero_morphisms() {
        let q = quillen(&fixtures::gl11()).unwrap();
        let id = GradedMap::identity(q.space());
        assert!(check_linear_morphism(&q, &q, &id, 3).unwrap().is_empty());
        let zs = LInftyStructure::new(GradedSpace::zero_space(), 2, true, []).unwrap();
        let z = GradedMap::zero(q.space(), zs.space(), 0);
        assert!(check_linear_morphism(&q, &zs, &z, 3).unwrap().is_empty());
    }

    #[test]
    fn unsuspended_view_recovers_the_bracket() {
        let d = fixtures::gl11();
        let q = quillen(&d).unwrap();
        let b = q.unsuspended(2).unwrap();
        for (&(x, y), v) in d.bracket_table() {
            assert_eq!(&b.eval(&[x, y]), v);
        }
        let d1 = q.unsuspended(1).unwrap();
        for i in 0..d.dim() {
            assert_eq!(&d1.eval(&[i]), d.differential().image(i));
        }
    }

    #[test]
    fn symmetry_of_stored_brackets() {
        let q = quillen(&fixtures::gl11()).unwrap();
        let s = q.space().clone();
        for w in sym_basis_words(&s, 2) {
            let v = q.bracket(&w).unwrap();
            let sw = [w[1], w[0]];
            let eps = canonicalize(&s, &sw).unwrap().sign;
            assert_eq!(q.bracket(&sw).unwrap(), if eps > 0 { v.clone() } else { v.neg() });
            if let Some(Some(dv)) = v.homogeneous_degree(&s) {
                assert_eq!(dv, s.degree(w[0]) + s.degree(w[1]) + 1);
            }
        }
    }
}
