//! JSON algebra files: cutoff-bounded mode tables.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Backend, ModeAlgebra, TableData};
use crate::error::{Error, Result};
use crate::graded::{Alphabet, GradedSpace, Parity, Vector, Weight, Word};
use crate::ratcalc::Scalar;

/// One matrix entry `src ↦ coeff · dst`.
pub type Entry = (String, String, Scalar);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub id: String,
    pub weight: Weight,
    pub parity: Parity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub gen: String,
    pub n: i32,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub scalar: String,
    pub cutoff: Weight,
    pub generators: Vec<GeneratorSpec>,
    pub blocks: BTreeMap<String, Vec<String>>,
    pub vacuum: String,
    pub modes: Vec<ModeSpec>,
    pub lminus1: Vec<Entry>,
    pub locality: Vec<(String, String, u32)>,
}

fn invariant(name: &str, detail: String) -> Error {
    Error::Invariant {
        invariant: name.to_string(),
        detail,
    }
}

pub(super) fn load(data: &AlgebraFile) -> Result<ModeAlgebra> {
    if data.scalar != "gaussian-rational" {
        return Err(Error::Schema(format!(
            "unsupported scalar field `{}` (expected `gaussian-rational`)",
            data.scalar
        )));
    }
    let mut gens = Vec::new();
    for g in &data.generators {
        if g.id.is_empty() || !g.id.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(Error::Schema(format!("generator id `{}` is not alphanumeric", g.id)));
        }
        if g.weight.parity() != g.parity {
            return Err(invariant(
                "parity matches weight class",
                format!("generator `{}` has weight {} but parity {:?}", g.id, g.weight, g.parity),
            ));
        }
        if gens.iter().any(|(n, _)| n == &g.id) {
            return Err(Error::Schema(format!("duplicate generator `{}`", g.id)));
        }
        gens.push((g.id.clone(), g.weight));
    }
    let alphabet = Alphabet::new(gens);
    let cutoff = data.cutoff;

    let mut blocks: BTreeMap<Weight, Vec<Word>> = BTreeMap::new();
    let mut known: HashMap<Word, Weight> = HashMap::new();
    for (key, labels) in &data.blocks {
        let n: Weight = key.parse()?;
        if n > cutoff {
            return Err(invariant("grading", format!("block {n} lies above cutoff {cutoff}")));
        }
        let mut words = Vec::new();
        for l in labels {
            let w = alphabet.parse_word(l)?;
            let odd_repeat = w
                .letters()
                .windows(2)
                .any(|p| p[0] == p[1] && alphabet.parity(p[0].gen).is_odd());
            let creation = w.letters().iter().all(|l| alphabet.letter_weight(*l) > Weight::ZERO);
            if !w.is_normal_ordered() || odd_repeat || !creation {
                return Err(invariant(
                    "canonical normal-ordered labels",
                    format!("label `{l}` in block {n} is not a normal-ordered creation word"),
                ));
            }
            let wt = alphabet.word_weight(&w);
            if wt != n {
                return Err(invariant(
                    "grading",
                    format!("label `{l}` has weight {wt} but is listed in block {n}"),
                ));
            }
            if known.insert(w.clone(), n).is_some() {
                return Err(Error::Schema(format!("label `{l}` listed twice")));
            }
            words.push(w);
        }
        words.sort();
        blocks.insert(n, words);
    }
    let vac = alphabet.parse_word(&data.vacuum)?;
    if !vac.is_empty() || !known.contains_key(&vac) {
        return Err(Error::Schema(format!(
            "vacuum must be `|0>` and listed in block 0, got `{}`",
            data.vacuum
        )));
    }

    let lookup = |label: &str| -> Result<Word> {
        let w = alphabet.parse_word(label)?;
        if known.contains_key(&w) {
            Ok(w)
        } else {
            Err(Error::UnknownLabel(label.to_string()))
        }
    };

    let mut modes: HashMap<(u16, i32), BTreeMap<Word, Vector>> = HashMap::new();
    for m in &data.modes {
        let i = alphabet
            .index(&m.gen)
            .ok_or_else(|| Error::Schema(format!("mode refers to unknown generator `{}`", m.gen)))?;
        let shift = alphabet.weight(i) - Weight::int(m.n + 1);
        let table = modes.entry((i, m.n)).or_default();
        for (src, dst, c) in &m.entries {
            let (s, d) = (lookup(src)?, lookup(dst)?);
            let (ws, wd) = (known[&s], known[&d]);
            if wd != ws + shift {
                return Err(invariant(
                    "mode weight homogeneity",
                    format!(
                        "{}[{}] has weight {shift} but maps `{src}` (weight {ws}) to `{dst}` (weight {wd})",
                        m.gen, m.n
                    ),
                ));
            }
            table.entry(s).or_default().add_term(d, c.clone());
        }
    }
    let mut lminus1: BTreeMap<Word, Vector> = BTreeMap::new();
    for (src, dst, c) in &data.lminus1 {
        let (s, d) = (lookup(src)?, lookup(dst)?);
        if known[&d] != known[&s] + Weight::ONE {
            return Err(invariant(
                "mode weight homogeneity",
                format!("L(-1) maps `{src}` to `{dst}` without raising weight by 1"),
            ));
        }
        lminus1.entry(s).or_default().add_term(d, c.clone());
    }
    let mut locality = BTreeMap::new();
    for (a, b, n) in &data.locality {
        let i = alphabet
            .index(a)
            .ok_or_else(|| Error::Schema(format!("locality refers to unknown generator `{a}`")))?;
        let j = alphabet
            .index(b)
            .ok_or_else(|| Error::Schema(format!("locality refers to unknown generator `{b}`")))?;
        locality.insert(if i <= j { (i, j) } else { (j, i) }, *n);
    }

    let alg = ModeAlgebra {
        name: data.name.clone(),
        alphabet,
        backend: Backend::Table(TableData {
            cutoff,
            space: GradedSpace::new(blocks),
            modes,
            lminus1,
        }),
        locality,
    };
    validate(&alg, cutoff)?;
    Ok(alg)
}

/// Range of mode indices whose action can connect two blocks `≤ cutoff`.
fn mode_range(wt: Weight, cutoff: Weight) -> std::ops::RangeInclusive<i32> {
    let lo = (wt - cutoff).floor() - 1;
    let hi = (wt + cutoff).floor() - 1;
    lo..=hi
}

fn validate(alg: &ModeAlgebra, cutoff: Weight) -> Result<()> {
    let Backend::Table(t) = &alg.backend else {
        return Ok(());
    };
    let a = &alg.alphabet;
    let vac = Vector::vacuum();
    for i in 0..alg.num_generators() {
        let wt = a.weight(i);
        for n in mode_range(wt, cutoff) {
            if n < 0 || wt - Weight::int(n + 1) > cutoff {
                continue;
            }
            if !alg.mode_act(i, n, &vac)?.is_zero() {
                return Err(invariant(
                    "creation property",
                    format!("{}[{n}] does not annihilate the vacuum", a.name(i)),
                ));
            }
        }
        if wt <= cutoff && alg.mode_act(i, -1, &vac)?.is_zero() {
            return Err(invariant(
                "creation property",
                format!("{}[-1] applied to the vacuum vanishes", a.name(i)),
            ));
        }
    }
    if !alg.lminus1(&vac)?.is_zero() {
        return Err(invariant("L(-1) annihilates the vacuum", "L(-1)|0> is nonzero".into()));
    }
    for (ws, w) in t.space.words() {
        if ws + Weight::ONE > cutoff {
            continue;
        }
        for i in 0..alg.num_generators() {
            let wt = a.weight(i);
            for n in mode_range(wt, cutoff) {
                let dst = ws + wt - Weight::int(n + 1);
                if dst < Weight::ZERO || dst + Weight::ONE > cutoff {
                    continue;
                }
                let defect = alg.derivative_defect(i, n, w)?;
                if !defect.is_zero() {
                    return Err(invariant(
                        "L(-1)-derivative bracket",
                        format!(
                            "[L(-1), {}[{n}]] != {}·{}[{}] on `{}`",
                            a.name(i),
                            -n,
                            a.name(i),
                            n - 1,
                            a.render(w)
                        ),
                    ));
                }
            }
        }
    }
    Ok(())
}

pub(super) fn export(alg: &ModeAlgebra, cutoff: Weight) -> Result<AlgebraFile> {
    let a = &alg.alphabet;
    let space = alg.enumerate_basis(cutoff);
    let mut blocks = BTreeMap::new();
    for (n, b) in space.blocks() {
        blocks.insert(n.to_string(), b.iter().map(|w| a.render(w)).collect());
    }
    let entries_of = |v: &Vector, src: &Word| -> Vec<Entry> {
        v.terms()
            .map(|(d, c)| (a.render(src), a.render(d), c.clone()))
            .collect()
    };
    let mut modes = Vec::new();
    for i in 0..alg.num_generators() {
        let wt = a.weight(i);
        for n in mode_range(wt, cutoff) {
            let mut entries = Vec::new();
            for (ws, w) in space.words() {
                let dst = ws + wt - Weight::int(n + 1);
                if dst < Weight::ZERO || dst > cutoff {
                    continue;
                }
                entries.extend(entries_of(&alg.mode_act_word(i, n, w)?, w));
            }
            if !entries.is_empty() {
                modes.push(ModeSpec {
                    gen: a.name(i).to_string(),
                    n,
                    entries,
                });
            }
        }
    }
    let mut lminus1 = Vec::new();
    for (ws, w) in space.words() {
        if ws + Weight::ONE <= cutoff {
            lminus1.extend(entries_of(&alg.lminus1(&Vector::basis(w.clone()))?, w));
        }
    }
    let mut locality = Vec::new();
    for i in 0..alg.num_generators() {
        for j in i..alg.num_generators() {
            locality.push((a.name(i).to_string(), a.name(j).to_string(), alg.locality(i, j)));
        }
    }
    Ok(AlgebraFile {
        name: alg.name.clone(),
        scalar: "gaussian-rational".into(),
        cutoff,
        generators: (0..alg.num_generators())
            .map(|i| GeneratorSpec {
                id: a.name(i).to_string(),
                weight: a.weight(i),
                parity: a.parity(i),
            })
            .collect(),
        blocks,
        vacuum: "|0>".into(),
        modes,
        lminus1,
        locality,
    })
}
