//! Generating-field packages: generators, vacuum, exact mode actions,
//! `L(±1)` and locality bounds.

mod builtin;
mod file;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graded::{Alphabet, GradedSpace, Letter, Parity, Vector, Weight, Word};
use crate::ratcalc::Scalar;

pub use file::{AlgebraFile, GeneratorSpec, ModeSpec};

use builtin::VirasoroAction;

/// Which built-in algebra to construct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Builtin {
    Heisenberg,
    FreeFermion,
    Virasoro(Scalar),
}

impl Builtin {
    /// Parse `heisenberg`, `free_fermion` or `virasoro` (central charge
    /// supplied separately).
    pub fn from_name(name: &str, c: Option<Scalar>) -> Option<Builtin> {
        match name {
            "heisenberg" => Some(Builtin::Heisenberg),
            "free_fermion" => Some(Builtin::FreeFermion),
            "virasoro" => Some(Builtin::Virasoro(c.unwrap_or_else(|| Scalar::ratio(1, 2)))),
            _ => None,
        }
    }
}

pub(crate) struct TableData {
    cutoff: Weight,
    space: GradedSpace,
    modes: HashMap<(u16, i32), BTreeMap<Word, Vector>>,
    lminus1: BTreeMap<Word, Vector>,
}

enum Backend {
    Heisenberg,
    FreeFermion,
    Virasoro(VirasoroAction),
    Table(TableData),
}

/// A vertex algebra presented by generating fields and their modes.
pub struct ModeAlgebra {
    name: String,
    alphabet: Alphabet,
    backend: Backend,
    locality: BTreeMap<(u16, u16), u32>,
}

impl std::fmt::Debug for ModeAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModeAlgebra")
            .field("name", &self.name)
            .field("generators", &self.alphabet)
            .finish()
    }
}

impl ModeAlgebra {
    pub fn builtin(which: Builtin) -> Self {
        match which {
            Builtin::Heisenberg => ModeAlgebra::heisenberg(),
            Builtin::FreeFermion => ModeAlgebra::free_fermion(),
            Builtin::Virasoro(c) => ModeAlgebra::virasoro(c),
        }
    }

    /// One even generator `a` of weight 1, `[a_m, a_n] = m δ_{m+n,0}`.
    pub fn heisenberg() -> Self {
        ModeAlgebra {
            name: "heisenberg".into(),
            alphabet: Alphabet::new(vec![("a".into(), Weight::ONE)]),
            backend: Backend::Heisenberg,
            locality: [((0, 0), 2)].into_iter().collect(),
        }
    }

    /// One odd generator `psi` of weight ½, `{psi_m, psi_n} = δ_{m+n,-1}`.
    pub fn free_fermion() -> Self {
        ModeAlgebra {
            name: "free_fermion".into(),
            alphabet: Alphabet::new(vec![("psi".into(), Weight::HALF)]),
            backend: Backend::FreeFermion,
            locality: [((0, 0), 1)].into_iter().collect(),
        }
    }

    /// One even generator `T` of weight 2 with modes `T_n = L_{n-1}`.
    pub fn virasoro(c: Scalar) -> Self {
        ModeAlgebra {
            name: format!("virasoro(c={c})"),
            alphabet: Alphabet::new(vec![("T".into(), Weight::int(2))]),
            backend: Backend::Virasoro(VirasoroAction::new(c)),
            locality: [((0, 0), 4)].into_iter().collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_generators(&self) -> u16 {
        self.alphabet.len() as u16
    }

    pub fn gen_weight(&self, i: u16) -> Weight {
        self.alphabet.weight(i)
    }

    pub fn gen_parity(&self, i: u16) -> Parity {
        self.alphabet.parity(i)
    }

    pub fn word_weight(&self, w: &Word) -> Weight {
        self.alphabet.word_weight(w)
    }

    /// Cutoff of a file-backed algebra; built-ins are unbounded.
    pub fn cutoff(&self) -> Option<Weight> {
        match &self.backend {
            Backend::Table(t) => Some(t.cutoff),
            _ => None,
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.backend, Backend::Table(_))
    }

    /// Declared locality bound `N_ij`.
    pub fn locality(&self, i: u16, j: u16) -> u32 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.locality.get(&key).copied().unwrap_or(0)
    }

    /// The least weight among nonzero states of the given parity, if any.
    pub fn min_weight(&self, parity: Parity) -> Option<Weight> {
        match parity {
            Parity::Even => Some(Weight::ZERO),
            Parity::Odd => match &self.backend {
                Backend::Table(t) => t.space.min_weight(Parity::Odd),
                _ => (0..self.num_generators())
                    .filter(|&i| self.gen_parity(i).is_odd())
                    .map(|i| self.gen_weight(i))
                    .min(),
            },
        }
    }

    pub fn central_charge(&self) -> Option<Scalar> {
        match &self.backend {
            Backend::Virasoro(v) => Some(v.central_charge().clone()),
            _ => None,
        }
    }

    pub fn vacuum(&self) -> Vector {
        Vector::vacuum()
    }

    /// `φ^i_{-1} 𝟏`.
    pub fn generator_state(&self, i: u16) -> Vector {
        Vector::basis(Word(vec![Letter::new(i, -1)]))
    }

    fn check_cutoff(&self, w: Weight) -> Result<()> {
        if let Backend::Table(t) = &self.backend {
            if w > t.cutoff {
                return Err(Error::BeyondCutoff {
                    weight: w.to_string(),
                    cutoff: t.cutoff.to_string(),
                });
            }
        }
        Ok(())
    }

    /// `φ^i_n` applied to a basis word.
    pub fn mode_act_word(&self, i: u16, n: i32, w: &Word) -> Result<Vector> {
        match &self.backend {
            Backend::Heisenberg => Ok(builtin::heisenberg_act(n, w)),
            Backend::FreeFermion => Ok(builtin::fermion_act(n, w)),
            Backend::Virasoro(v) => Ok(v.act(n, w)),
            Backend::Table(t) => {
                let src = self.word_weight(w);
                let dst = src + self.gen_weight(i) - Weight::int(n + 1);
                if dst < Weight::ZERO {
                    return Ok(Vector::zero());
                }
                self.check_cutoff(src)?;
                self.check_cutoff(dst)?;
                Ok(t.modes.get(&(i, n)).and_then(|m| m.get(w)).cloned().unwrap_or_default())
            }
        }
    }

    /// `φ^i_n v`.
    pub fn mode_act(&self, i: u16, n: i32, v: &Vector) -> Result<Vector> {
        let mut out = Vector::zero();
        for (w, c) in v.terms() {
            out.add_scaled(&self.mode_act_word(i, n, w)?, c);
        }
        Ok(out)
    }

    /// Apply the letters of `w` (rightmost first) to `v`.
    pub fn apply_letters(&self, letters: &[Letter], v: &Vector) -> Result<Vector> {
        let mut cur = v.clone();
        for l in letters.iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = self.mode_act(l.gen, l.mode, &cur)?;
        }
        Ok(cur)
    }

    /// The vector `φ^{i_1}_{m_1}···φ^{i_k}_{m_k}𝟏` named by a word, in the
    /// normal-ordered basis.
    pub fn value(&self, w: &Word) -> Result<Vector> {
        self.apply_letters(w.letters(), &Vector::vacuum())
    }

    /// Parse a word label and evaluate it.
    pub fn parse_vector(&self, label: &str) -> Result<Vector> {
        let w = self.alphabet.parse_word(label)?;
        self.value(&w)
    }

    pub fn lminus1(&self, v: &Vector) -> Result<Vector> {
        let mut out = Vector::zero();
        for (w, c) in v.terms() {
            let img = match &self.backend {
                Backend::Heisenberg => builtin::heisenberg_lminus1(w),
                Backend::FreeFermion => builtin::fermion_virasoro(-1, w),
                Backend::Virasoro(vir) => vir.act(0, w),
                Backend::Table(t) => {
                    let src = self.word_weight(w);
                    self.check_cutoff(src + Weight::ONE)?;
                    t.lminus1.get(w).cloned().unwrap_or_default()
                }
            };
            out.add_scaled(&img, c);
        }
        Ok(out)
    }

    pub fn has_l1(&self) -> bool {
        self.is_builtin()
    }

    pub fn l1(&self, v: &Vector) -> Result<Vector> {
        let mut out = Vector::zero();
        for (w, c) in v.terms() {
            let img = match &self.backend {
                Backend::Heisenberg => builtin::heisenberg_l1(w),
                Backend::FreeFermion => builtin::fermion_virasoro(1, w),
                Backend::Virasoro(vir) => vir.act(2, w),
                Backend::Table(_) => {
                    return Err(Error::Precondition(format!("algebra `{}` carries no L(1)", self.name)))
                }
            };
            out.add_scaled(&img, c);
        }
        Ok(out)
    }

    /// `L(0)`: multiplication by weight.
    pub fn l0(&self, v: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (w, c) in v.terms() {
            out.add_term(w.clone(), c * &self.word_weight(w).to_scalar());
        }
        out
    }

    /// The standard conformal vector of a built-in algebra.
    pub fn conformal_vector(&self) -> Option<Vector> {
        let half = Scalar::ratio(1, 2);
        match &self.backend {
            Backend::Heisenberg => Some(Vector::from_terms([(
                Word(vec![Letter::new(0, -1), Letter::new(0, -1)]),
                half,
            )])),
            Backend::FreeFermion => Some(Vector::from_terms([(
                Word(vec![Letter::new(0, -2), Letter::new(0, -1)]),
                half,
            )])),
            Backend::Virasoro(_) => Some(Vector::basis(Word(vec![Letter::new(0, -1)]))),
            Backend::Table(_) => None,
        }
    }

    /// Normal-ordered basis of all weights `≤ cutoff`.
    pub fn enumerate_basis(&self, cutoff: Weight) -> GradedSpace {
        if let Backend::Table(t) = &self.backend {
            let blocks = t
                .space
                .blocks()
                .iter()
                .filter(|(n, _)| **n <= cutoff)
                .map(|(n, b)| (*n, b.clone()))
                .collect();
            return GradedSpace::new(blocks);
        }
        let mut blocks: BTreeMap<Weight, Vec<Word>> = BTreeMap::new();
        for n in Weight::ZERO.range_to(cutoff) {
            blocks.insert(n, Vec::new());
        }
        // letters sorted in normal order, each of positive weight
        let mut letters = Vec::new();
        for i in 0..self.num_generators() {
            let mut m = -1;
            while self.alphabet.letter_weight(Letter::new(i, m)) <= cutoff {
                letters.push(Letter::new(i, m));
                m -= 1;
            }
        }
        letters.sort();
        let mut cur = Vec::new();
        self.enumerate_rec(&letters, 0, Weight::ZERO, cutoff, &mut cur, &mut blocks);
        for b in blocks.values_mut() {
            b.sort();
        }
        GradedSpace::new(blocks)
    }

    fn enumerate_rec(
        &self,
        letters: &[Letter],
        start: usize,
        wt: Weight,
        cutoff: Weight,
        cur: &mut Vec<Letter>,
        blocks: &mut BTreeMap<Weight, Vec<Word>>,
    ) {
        blocks.entry(wt).or_default().push(Word(cur.clone()));
        for k in start..letters.len() {
            let l = letters[k];
            let w2 = wt + self.alphabet.letter_weight(l);
            if w2 > cutoff {
                continue;
            }
            let odd = self.gen_parity(l.gen).is_odd();
            cur.push(l);
            self.enumerate_rec(letters, if odd { k + 1 } else { k }, w2, cutoff, cur, blocks);
            cur.pop();
        }
    }

    /// Export the algebra's data up to `cutoff` as a file-format value.
    pub fn export(&self, cutoff: Weight) -> Result<AlgebraFile> {
        file::export(self, cutoff)
    }

    /// Build a file-backed algebra from parsed file contents, validating
    /// every structural invariant.
    pub fn from_file(data: &AlgebraFile) -> Result<Self> {
        file::load(data)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let data: AlgebraFile = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
        ModeAlgebra::from_file(&data)
    }

    /// Sign `(-1)^{|a||b|}` for two homogeneous parities.
    pub fn koszul(a: Parity, b: Parity) -> Scalar {
        Scalar::from(Parity::koszul(a, b))
    }

    /// Checks `[L(-1), φ^i_n] = -n φ^i_{n-1}` on a word.
    pub fn derivative_defect(&self, i: u16, n: i32, w: &Word) -> Result<Vector> {
        let v = Vector::basis(w.clone());
        let lhs = self
            .lminus1(&self.mode_act(i, n, &v)?)?
            .sub(&self.mode_act(i, n, &self.lminus1(&v)?)?);
        let rhs = self.mode_act(i, n - 1, &v)?.scale(&Scalar::from(-(n as i64)));
        Ok(lhs.sub(&rhs))
    }
}
