//! The vertex operator map: matrix elements by iterated residues of shifted
//! correlators, modes, and a memoized mode table for bulk checks.

mod suite;

use std::collections::BTreeMap;

use dashmap::DashMap;
use num_traits::{One, Zero};

use crate::correlator::{compute_many, Field, GeneratorField, Insertion};
use crate::error::{Error, Result};
use crate::graded::{DualVector, GradedMap, Parity, Vector, Weight, Word};
use crate::modealg::ModeAlgebra;
use crate::ratcalc::{LaurentPoly, Scalar, ShiftTarget, SpecialRational};

pub use suite::{axiom_suite, conformal_check, quasi_check, well_definedness_check, ConformalOutcome, SuiteOptions};
pub(crate) use suite::{
    derivative, homogeneity, identity, l1_checks, lambda_check, locality_and_associativity, mode_range, skew_symmetry,
    tally, tally_all, Ctx, Outcome,
};

/// Anything that can apply the mode `u_n` of a state to a vector.
pub trait ModeSource: Sync {
    fn algebra(&self) -> &ModeAlgebra;

    fn mode(&self, u: &Vector, n: i32, v: &Vector) -> Result<Vector>;
}

/// `⟨bra, Y(w, z) ket⟩` for each bra, where `w` names the state
/// `φ^{i_1}_{m_1}···φ^{i_k}_{m_k}𝟏`: the shifted correlator
/// `R(⟨bra, φ^{i_1}(x_1+z)···φ^{i_k}(x_k+z) ket⟩)` weighted by `Π x_j^{m_j}`,
/// with residues taken at `x_k = 0` first and `x_1 = 0` last.
pub fn matrix_elements(
    alg: &ModeAlgebra,
    bras: &[DualVector],
    word: &Word,
    ket: &Vector,
) -> Result<Vec<SpecialRational>> {
    let k = word.len();
    if k == 0 {
        return Ok(bras.iter().map(|b| SpecialRational::constant(b.pair(ket))).collect());
    }
    let fields: Vec<GeneratorField> = word.letters().iter().map(|l| GeneratorField::new(alg, l.gen)).collect();
    let ys: Vec<String> = (1..=k).map(|j| format!("y{j}")).collect();
    let xs: Vec<String> = (1..=k).map(|j| format!("x{j}")).collect();
    let ins: Vec<Insertion> = fields
        .iter()
        .zip(&ys)
        .map(|(f, y)| Insertion::new(f as &dyn Field, y.as_str()))
        .collect();
    let shift: BTreeMap<String, ShiftTarget> = ys
        .iter()
        .zip(&xs)
        .map(|(y, x)| (y.clone(), ShiftTarget::sum(x, "z")))
        .collect();
    let corr = compute_many(alg, bras, &ins, ket)?;
    let mut out = Vec::with_capacity(bras.len());
    for r in corr {
        let mut f = r.value.substitute_shift(&shift)?;
        for j in (0..k).rev() {
            if f.is_zero() {
                break;
            }
            let m = word.letters()[j].mode;
            f = f
                .mul_poly(&LaurentPoly::monomial(Scalar::one(), &[(xs[j].as_str(), m)]))
                .residue_at_zero(&xs[j])?;
        }
        out.push(f);
    }
    Ok(out)
}

pub fn matrix_element(alg: &ModeAlgebra, bra: &DualVector, word: &Word, ket: &Vector) -> Result<SpecialRational> {
    Ok(matrix_elements(alg, std::slice::from_ref(bra), word, ket)?.remove(0))
}

/// The coefficient of `z^p` in a Laurent polynomial in `z`.
pub fn z_coeff(f: &SpecialRational, p: i32) -> Result<Scalar> {
    let poly = f
        .as_laurent()
        .ok_or_else(|| Error::Precondition(format!("`{f}` is not a Laurent polynomial in z")))?;
    if poly.is_zero() {
        return Ok(Scalar::zero());
    }
    Ok(poly.coeff_named(&[("z", p)]))
}

/// All modes `w_n` restricted to blocks `≤ cutoff`, assembled from
/// iterated-residue matrix elements.
pub fn modes_by_residues(alg: &ModeAlgebra, word: &Word, cutoff: Weight) -> Result<BTreeMap<i32, GradedMap>> {
    let alpha = alg.alphabet();
    let space = alg.enumerate_basis(cutoff);
    let wu = alg.word_weight(word);
    let bra_words: Vec<(Weight, Word)> = space.words().map(|(n, w)| (n, w.clone())).collect();
    let bras: Vec<Vector> = bra_words.iter().map(|(_, w)| Vector::basis(w.clone())).collect();
    let mut cols: BTreeMap<i32, Vec<(Word, Vector)>> = BTreeMap::new();
    for (kw, kword) in space.words() {
        let vals = matrix_elements(alg, &bras, word, &Vector::basis(kword.clone()))?;
        for ((bw, bword), val) in bra_words.iter().zip(vals) {
            let Some(n) = (wu + kw - *bw).to_int().map(|x| x - 1) else {
                if !val.is_zero() {
                    return Err(Error::WeightInconsistent(format!(
                        "parity-violating matrix element {val}"
                    )));
                }
                continue;
            };
            let c = z_coeff(&val, -n - 1)?;
            let rest = val
                .as_laurent()
                .map(|p| p.sub(&LaurentPoly::monomial(c.clone(), &[("z", -n - 1)])))
                .unwrap_or_else(|| LaurentPoly::constant(Scalar::zero()));
            if !rest.is_zero() {
                return Err(Error::WeightInconsistent(format!(
                    "matrix element ⟨{}', Y({}, z) {}⟩ = {val} is not homogeneous",
                    alpha.render(bword),
                    alpha.render(word),
                    alpha.render(kword)
                )));
            }
            let entry = cols.entry(n).or_default();
            match entry.iter_mut().find(|(w, _)| w == kword) {
                Some((_, v)) => v.add_term(bword.clone(), c),
                None => entry.push((kword.clone(), Vector::from_terms([(bword.clone(), c)]))),
            }
        }
    }
    let mut out = BTreeMap::new();
    for (n, c) in cols {
        out.insert(n, GradedMap::new(alpha, wu - Weight::int(n + 1), c)?);
    }
    Ok(out)
}

/// Memoized modes `u_n` of arbitrary states, computed recursively from the
/// word structure of `u` by the iterate formula
/// `(a_m b)_n = Σ_j (-1)^j C(m,j) [a_{m-j} b_{n+j} - (-1)^m ε b_{m+n-j} a_j]`
/// with `ε = (-1)^{|a||b|}`.
pub struct VertexTable<'a> {
    alg: &'a ModeAlgebra,
    memo: DashMap<(Word, i32, Word), Vector>,
}

impl<'a> VertexTable<'a> {
    pub fn new(alg: &'a ModeAlgebra) -> Self {
        VertexTable {
            alg,
            memo: DashMap::new(),
        }
    }

    pub fn algebra(&self) -> &'a ModeAlgebra {
        self.alg
    }

    /// `u_n v` for words `u` and `v`.
    pub fn mode_word(&self, u: &Word, n: i32, v: &Word) -> Result<Vector> {
        let alg = self.alg;
        let target = alg.word_weight(u) + alg.word_weight(v) - Weight::int(n + 1);
        if alg.min_weight(target.parity()).is_none_or(|w| target < w) {
            return Ok(Vector::zero());
        }
        let Some(first) = u.letters().first().copied() else {
            return Ok(if n == -1 {
                Vector::basis(v.clone())
            } else {
                Vector::zero()
            });
        };
        let key = (u.clone(), n, v.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let rest = Word(u.letters()[1..].to_vec());
        let m = first.mode;
        let gen = first.gen;
        let wa = alg.gen_weight(gen);
        let wb = alg.word_weight(&rest);
        let wv = alg.word_weight(v);
        let eps = Parity::koszul(alg.gen_parity(gen), wb.parity());
        let sign_m = if m.rem_euclid(2) == 0 { 1 } else { -1 };
        let vv = Vector::basis(v.clone());
        let mut out = Vector::zero();
        // a_{m-j} b_{n+j} v vanishes once b_{n+j} v drops below the lowest weight
        let j1 = match alg.min_weight((wb + wv).parity()) {
            Some(w) => (wb + wv - w).floor() - 1 - n,
            None => -1,
        };
        let j2 = match alg.min_weight((wa + wv).parity()) {
            Some(w) => (wa + wv - w).floor() - 1,
            None => -1,
        };
        let jmax = if m >= 0 { m.min(j1.max(j2)) } else { j1.max(j2) };
        for j in 0..=jmax.max(-1) {
            let binom = &Scalar::binomial(m as i64, j as i64) * &Scalar::sign(j as i64);
            if binom.is_zero() {
                continue;
            }
            if j <= j1 {
                let bv = self.mode_vec(&rest, n + j, &vv)?;
                if !bv.is_zero() {
                    out.add_scaled(&alg.mode_act(gen, m - j, &bv)?, &binom);
                }
            }
            if j <= j2 {
                let av = alg.mode_act(gen, j, &vv)?;
                if !av.is_zero() {
                    let t = self.mode_vec(&rest, m + n - j, &av)?;
                    out.add_scaled(&t, &(&binom * &Scalar::from(-sign_m * eps)));
                }
            }
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn mode_vec(&self, u: &Word, n: i32, v: &Vector) -> Result<Vector> {
        let mut out = Vector::zero();
        for (w, c) in v.terms() {
            out.add_scaled(&self.mode_word(u, n, w)?, c);
        }
        Ok(out)
    }

    /// `u_n v` for arbitrary vectors.
    pub fn mode(&self, u: &Vector, n: i32, v: &Vector) -> Result<Vector> {
        let mut out = Vector::zero();
        for (uw, uc) in u.terms() {
            out.add_scaled(&self.mode_vec(uw, n, v)?, uc);
        }
        Ok(out)
    }

    /// `Y(u, z)` as an insertable field; `u` must be homogeneous.
    pub fn field(&self, u: Vector) -> Result<StateField<'_>> {
        StateField::new(self, u)
    }

    /// The mode `u_n` on all blocks `≤ cutoff` whose image stays `≤ cutoff`.
    pub fn mode_map(&self, u: &Vector, n: i32, cutoff: Weight) -> Result<GradedMap> {
        let alpha = self.alg.alphabet();
        let wu = u
            .weight(alpha)
            .ok_or_else(|| Error::Precondition("mode of an inhomogeneous state".into()))?;
        let shift = wu - Weight::int(n + 1);
        let space = self.alg.enumerate_basis(cutoff);
        let mut cols = Vec::new();
        for (w, word) in space.words() {
            if w + shift > cutoff {
                continue;
            }
            cols.push((word.clone(), self.mode(u, n, &Vector::basis(word.clone()))?));
        }
        GradedMap::new(alpha, shift, cols)
    }
}

impl ModeSource for VertexTable<'_> {
    fn algebra(&self) -> &ModeAlgebra {
        self.alg
    }

    fn mode(&self, u: &Vector, n: i32, v: &Vector) -> Result<Vector> {
        VertexTable::mode(self, u, n, v)
    }
}

/// `Y(u, z)` for a fixed homogeneous state, backed by a [`ModeSource`].
pub struct StateField<'t> {
    src: &'t dyn ModeSource,
    u: Vector,
    wt: Weight,
}

impl<'t> StateField<'t> {
    pub fn new(src: &'t dyn ModeSource, u: Vector) -> Result<Self> {
        let wt = if u.is_zero() {
            Weight::ZERO
        } else {
            u.weight(src.algebra().alphabet())
                .ok_or_else(|| Error::Precondition("vertex operator of an inhomogeneous state".into()))?
        };
        Ok(StateField { src, u, wt })
    }

    pub fn state(&self) -> &Vector {
        &self.u
    }
}

impl Field for StateField<'_> {
    fn weight(&self) -> Weight {
        self.wt
    }

    fn mode(&self, n: i32, v: &Vector) -> Result<Vector> {
        self.src.mode(&self.u, n, v)
    }
}
