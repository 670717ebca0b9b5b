//! Half-integer weights, structured basis words, sparse vectors and
//! weight-homogeneous linear maps.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ParseError, Result};
use crate::ratcalc::Scalar;

/// A weight in `ℤ/2`, stored doubled.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight {
    twice: i32,
}

impl Weight {
    pub const ZERO: Weight = Weight { twice: 0 };
    pub const HALF: Weight = Weight { twice: 1 };
    pub const ONE: Weight = Weight { twice: 2 };

    pub const fn from_twice(twice: i32) -> Self {
        Weight { twice }
    }

    pub const fn int(n: i32) -> Self {
        Weight { twice: 2 * n }
    }

    pub fn twice(self) -> i32 {
        self.twice
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn parity(self) -> Parity {
        if self.is_integer() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// The value as an integer, if it is one.
    pub fn to_int(self) -> Option<i32> {
        self.is_integer().then_some(self.twice / 2)
    }

    /// Floor of the weight.
    pub fn floor(self) -> i32 {
        self.twice.div_euclid(2)
    }

    pub fn to_scalar(self) -> Scalar {
        Scalar::ratio(self.twice as i64, 2)
    }

    /// Steps of ½ from `self` up to and including `hi`.
    pub fn range_to(self, hi: Weight) -> impl Iterator<Item = Weight> {
        (self.twice..=hi.twice).map(Weight::from_twice)
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        Weight {
            twice: self.twice + o.twice,
        }
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, o: Weight) -> Weight {
        Weight {
            twice: self.twice - o.twice,
        }
    }
}

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight { twice: -self.twice }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Weight {
    type Err = ParseError;
    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        let t = s.trim();
        let bad = || ParseError::Weight(s.to_string());
        if let Some((p, q)) = t.split_once('/') {
            let p: i32 = p.trim().parse().map_err(|_| bad())?;
            match q.trim() {
                "1" => Ok(Weight::int(p)),
                "2" => Ok(Weight::from_twice(p)),
                _ => Err(bad()),
            }
        } else if let Some((a, b)) = t.split_once('.') {
            let whole: i32 = if a.is_empty() || a == "-" {
                0
            } else {
                a.parse().map_err(|_| bad())?
            };
            let neg = a.starts_with('-');
            let half = match b {
                "0" => 0,
                "5" => 1,
                _ => return Err(bad()),
            };
            Ok(Weight::from_twice(2 * whole + if neg { -half } else { half }))
        } else {
            Ok(Weight::int(t.parse().map_err(|_| bad())?))
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if let Some(n) = self.to_int() {
            s.serialize_i32(n)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Weight::int(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(-1)^{|a||b|}`.
    pub fn koszul(a: Parity, b: Parity) -> i64 {
        if a.is_odd() && b.is_odd() {
            -1
        } else {
            1
        }
    }
}

/// One mode `φ^gen_mode`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub gen: u16,
    pub mode: i32,
}

impl Letter {
    pub fn new(gen: u16, mode: i32) -> Self {
        Letter { gen, mode }
    }
}

/// Normal order: more negative modes to the left, generator index breaks ties.
impl Ord for Letter {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (self.mode, self.gen).cmp(&(o.mode, o.gen))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

/// `φ^{i_1}_{m_1}···φ^{i_k}_{m_k}𝟏`; the empty word is the vacuum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn vacuum() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Generator names, weights and parities; gives words their weights and text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    weights: Vec<Weight>,
}

impl Alphabet {
    pub fn new(gens: Vec<(String, Weight)>) -> Self {
        let (names, weights) = gens.into_iter().unzip();
        Alphabet { names, weights }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, gen: u16) -> &str {
        &self.names[gen as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    pub fn weight(&self, gen: u16) -> Weight {
        self.weights[gen as usize]
    }

    pub fn parity(&self, gen: u16) -> Parity {
        self.weights[gen as usize].parity()
    }

    /// Weight of `φ^gen_mode` as an operator: `wt φ - mode - 1`.
    pub fn letter_weight(&self, l: Letter) -> Weight {
        self.weight(l.gen) - Weight::int(l.mode + 1)
    }

    pub fn word_weight(&self, w: &Word) -> Weight {
        w.0.iter().fold(Weight::ZERO, |acc, &l| acc + self.letter_weight(l))
    }

    pub fn render(&self, w: &Word) -> String {
        let mut s = String::new();
        for l in &w.0 {
            s.push_str(&format!("{}[{}]", self.name(l.gen), l.mode));
        }
        s.push_str("|0>");
        s
    }

    /// Parse `gen[index]…|0>` (whitespace-insensitive); a bare `|0>` or `1`
    /// is the vacuum.
    pub fn parse_word(&self, input: &str) -> std::result::Result<Word, ParseError> {
        let chars: Vec<(usize, char)> = input.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let err = |pos: usize, msg: &str| ParseError::Word {
            input: input.to_string(),
            pos,
            msg: msg.to_string(),
        };
        let compact: String = chars.iter().map(|c| c.1).collect();
        if compact == "1" {
            return Ok(Word::vacuum());
        }
        let mut letters = Vec::new();
        let mut k = 0;
        loop {
            if k >= chars.len() {
                return Err(err(input.len(), "expected `|0>`"));
            }
            if chars[k].1 == '|' {
                let rest: String = chars[k..].iter().map(|c| c.1).collect();
                if rest != "|0>" {
                    return Err(err(chars[k].0, "expected `|0>` at end of word"));
                }
                return Ok(Word(letters));
            }
            let start = k;
            while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            if k == start {
                return Err(err(chars[k].0, "expected generator name"));
            }
            let name: String = chars[start..k].iter().map(|c| c.1).collect();
            let gen = self
                .index(&name)
                .ok_or_else(|| err(chars[start].0, &format!("unknown generator `{name}`")))?;
            if k >= chars.len() || chars[k].1 != '[' {
                return Err(err(chars.get(k).map_or(input.len(), |c| c.0), "expected `[`"));
            }
            k += 1;
            let istart = k;
            while k < chars.len() && chars[k].1 != ']' {
                k += 1;
            }
            if k >= chars.len() {
                return Err(err(input.len(), "unterminated `[`"));
            }
            let idx: String = chars[istart..k].iter().map(|c| c.1).collect();
            let mode: i32 = idx.parse().map_err(|_| {
                err(
                    chars.get(istart).map_or(input.len(), |c| c.0),
                    "mode index must be an integer",
                )
            })?;
            k += 1;
            letters.push(Letter::new(gen, mode));
        }
    }
}

/// Sparse vector over basis words.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Vector {
    entries: BTreeMap<Word, Scalar>,
}

/// Dual vector, pairing against the distinguished basis.
pub type DualVector = Vector;

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn basis(w: Word) -> Self {
        let mut v = Vector::zero();
        v.entries.insert(w, Scalar::one());
        v
    }

    pub fn vacuum() -> Self {
        Vector::basis(Word::vacuum())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut v = Vector::zero();
        for (w, c) in terms {
            v.add_term(w, c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, w: &Word) -> Scalar {
        self.entries.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.entries.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Word, Scalar)> {
        self.entries.into_iter()
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.entries.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Vector, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (w, c) in &other.entries {
            self.add_term(w.clone(), c * s);
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut r = self.clone();
        r.add_scaled(other, &Scalar::one());
        r
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        let mut r = self.clone();
        r.add_scaled(other, &-Scalar::one());
        r
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        if s.is_zero() {
            return Vector::zero();
        }
        Vector {
            entries: self.entries.iter().map(|(w, c)| (w.clone(), c * s)).collect(),
        }
    }

    /// `⟨self, v⟩` with `self` read as a dual vector.
    pub fn pair(&self, v: &Vector) -> Scalar {
        let (small, big) = if self.len() <= v.len() { (self, v) } else { (v, self) };
        let mut acc = Scalar::zero();
        for (w, c) in &small.entries {
            if let Some(d) = big.entries.get(w) {
                acc += c * d;
            }
        }
        acc
    }

    /// `π_n`: keep exactly the weight-`n` entries.
    pub fn project(&self, alpha: &Alphabet, n: Weight) -> Vector {
        Vector {
            entries: self
                .entries
                .iter()
                .filter(|(w, _)| alpha.word_weight(w) == n)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Split into homogeneous components.
    pub fn by_weight(&self, alpha: &Alphabet) -> BTreeMap<Weight, Vector> {
        let mut out: BTreeMap<Weight, Vector> = BTreeMap::new();
        for (w, c) in &self.entries {
            out.entry(alpha.word_weight(w))
                .or_default()
                .add_term(w.clone(), c.clone());
        }
        out
    }

    /// The common weight of all entries, if homogeneous and nonzero.
    pub fn weight(&self, alpha: &Alphabet) -> Option<Weight> {
        let mut it = self.entries.keys().map(|w| alpha.word_weight(w));
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }

    pub fn render(&self, alpha: &Alphabet) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (w, c) in &self.entries {
            let label = alpha.render(w);
            let coef = c.to_string();
            let t = match coef.as_str() {
                "1" => label,
                "-1" => format!("-{label}"),
                _ if c.re().is_zero() || c.im().is_zero() => format!("{coef}*{label}"),
                _ => format!("({coef})*{label}"),
            };
            parts.push(t);
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
        s
    }
}

/// Basis of a graded space up to some cutoff, grouped by weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    blocks: BTreeMap<Weight, Vec<Word>>,
}

impl GradedSpace {
    pub fn new(blocks: BTreeMap<Weight, Vec<Word>>) -> Self {
        GradedSpace { blocks }
    }

    pub fn blocks(&self) -> &BTreeMap<Weight, Vec<Word>> {
        &self.blocks
    }

    pub fn block(&self, n: Weight) -> &[Word] {
        self.blocks.get(&n).map(|b| b.as_slice()).unwrap_or(&[])
    }

    pub fn dim(&self, n: Weight) -> usize {
        self.block(n).len()
    }

    pub fn weights(&self) -> impl Iterator<Item = Weight> + '_ {
        self.blocks.keys().copied()
    }

    pub fn words(&self) -> impl Iterator<Item = (Weight, &Word)> {
        self.blocks.iter().flat_map(|(n, b)| b.iter().map(move |w| (*n, w)))
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.values().map(|b| b.len()).sum()
    }

    pub fn contains(&self, n: Weight, w: &Word) -> bool {
        self.block(n).contains(w)
    }

    pub fn min_weight(&self, parity: Parity) -> Option<Weight> {
        self.blocks
            .iter()
            .filter(|(n, b)| n.parity() == parity && !b.is_empty())
            .map(|(n, _)| *n)
            .next()
    }

    /// Keep only the blocks of the given parity.
    pub fn restrict(&self, parity: Parity) -> GradedSpace {
        GradedSpace {
            blocks: self
                .blocks
                .iter()
                .filter(|(n, _)| n.parity() == parity)
                .map(|(n, b)| (*n, b.clone()))
                .collect(),
        }
    }
}

/// Weight-homogeneous linear map, stored column-wise per source block.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedMap {
    shift: Weight,
    cols: BTreeMap<Weight, BTreeMap<Word, Vector>>,
}

impl GradedMap {
    /// Build from `(source word, image)` columns, checking that every image
    /// entry has weight `source + shift`.
    pub fn new(alpha: &Alphabet, shift: Weight, columns: impl IntoIterator<Item = (Word, Vector)>) -> Result<Self> {
        let mut cols: BTreeMap<Weight, BTreeMap<Word, Vector>> = BTreeMap::new();
        for (src, img) in columns {
            let ws = alpha.word_weight(&src);
            for (dst, _) in img.terms() {
                let wd = alpha.word_weight(dst);
                if wd != ws + shift {
                    return Err(Error::WeightInconsistent(format!(
                        "map of weight {shift} sends {} (weight {ws}) to {} (weight {wd})",
                        alpha.render(&src),
                        alpha.render(dst)
                    )));
                }
            }
            if !img.is_zero() {
                cols.entry(ws).or_default().insert(src, img);
            }
        }
        Ok(GradedMap { shift, cols })
    }

    pub fn zero(shift: Weight) -> Self {
        GradedMap {
            shift,
            cols: BTreeMap::new(),
        }
    }

    /// Identity on the given space.
    pub fn identity(space: &GradedSpace) -> Self {
        let mut cols: BTreeMap<Weight, BTreeMap<Word, Vector>> = BTreeMap::new();
        for (n, w) in space.words() {
            cols.entry(n).or_default().insert(w.clone(), Vector::basis(w.clone()));
        }
        GradedMap {
            shift: Weight::ZERO,
            cols,
        }
    }

    pub fn shift(&self) -> Weight {
        self.shift
    }

    pub fn column(&self, src: &Word, alpha: &Alphabet) -> Option<&Vector> {
        self.cols.get(&alpha.word_weight(src)).and_then(|b| b.get(src))
    }

    pub fn columns(&self) -> impl Iterator<Item = (&Word, &Vector)> {
        self.cols.values().flat_map(|b| b.iter())
    }

    pub fn block(&self, n: Weight) -> Option<&BTreeMap<Word, Vector>> {
        self.cols.get(&n)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn apply(&self, v: &Vector, alpha: &Alphabet) -> Vector {
        let mut out = Vector::zero();
        for (w, c) in v.terms() {
            if let Some(col) = self.column(w, alpha) {
                out.add_scaled(col, c);
            }
        }
        out
    }

    /// `f ∘ self` as a dual vector: `(self^T f)(e_src) = f(self e_src)`.
    pub fn apply_dual(&self, f: &DualVector) -> DualVector {
        let mut out = Vector::zero();
        for (src, col) in self.columns() {
            let c = f.pair(col);
            out.add_term(src.clone(), c);
        }
        out
    }

    /// Transpose, as a map on dual-basis labels of weight `-shift`.
    pub fn transpose(&self, alpha: &Alphabet) -> GradedMap {
        let mut cols: BTreeMap<Word, Vector> = BTreeMap::new();
        for (src, col) in self.columns() {
            for (dst, c) in col.terms() {
                cols.entry(dst.clone()).or_default().add_term(src.clone(), c.clone());
            }
        }
        GradedMap::new(alpha, -self.shift, cols).expect("transpose preserves homogeneity")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap, alpha: &Alphabet) -> GradedMap {
        let cols = other
            .columns()
            .map(|(src, col)| (src.clone(), self.apply(col, alpha)))
            .collect::<Vec<_>>();
        GradedMap::new(alpha, self.shift + other.shift, cols).expect("composition preserves homogeneity")
    }

    pub fn add(&self, other: &GradedMap, alpha: &Alphabet) -> Result<GradedMap> {
        if self.shift != other.shift && !self.is_zero() && !other.is_zero() {
            return Err(Error::WeightInconsistent(format!(
                "cannot add maps of weights {} and {}",
                self.shift, other.shift
            )));
        }
        let shift = if self.is_zero() { other.shift } else { self.shift };
        let mut cols: BTreeMap<Word, Vector> = self.columns().map(|(w, v)| (w.clone(), v.clone())).collect();
        for (w, v) in other.columns() {
            let e = cols.entry(w.clone()).or_default();
            *e = e.add(v);
        }
        GradedMap::new(alpha, shift, cols)
    }

    pub fn scale(&self, s: &Scalar, alpha: &Alphabet) -> GradedMap {
        GradedMap::new(alpha, self.shift, self.columns().map(|(w, v)| (w.clone(), v.scale(s))))
            .expect("scaling preserves homogeneity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> Alphabet {
        Alphabet::new(vec![("a".into(), Weight::ONE), ("psi".into(), Weight::HALF)])
    }

    #[test]
    fn weight_text() {
        for s in ["0", "3", "-2", "1/2", "-3/2", "7/2"] {
            assert_eq!(s.parse::<Weight>().unwrap().to_string(), s);
        }
        assert_eq!("1.5".parse::<Weight>().unwrap(), Weight::from_twice(3));
        assert_eq!("4/2".parse::<Weight>().unwrap(), Weight::int(2));
        assert!("1/3".parse::<Weight>().is_err());
        let w: Weight = serde_json::from_str("\"7/2\"").unwrap();
        assert_eq!(w, Weight::from_twice(7));
        let w: Weight = serde_json::from_str("4").unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), "4");
    }

    #[test]
    fn words_round_trip() {
        let a = alpha();
        let w = a.parse_word(" a[-2] a[-1]psi[-1] |0>").unwrap();
        assert_eq!(a.render(&w), "a[-2]a[-1]psi[-1]|0>");
        assert_eq!(a.word_weight(&w), Weight::from_twice(7));
        assert_eq!(a.parse_word("1").unwrap(), Word::vacuum());
        assert_eq!(a.parse_word("|0>").unwrap(), Word::vacuum());
        match a.parse_word("a[-1]b[-1]|0>") {
            Err(ParseError::Word { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(a.parse_word("a[x]|0>").is_err());
        assert!(a.parse_word("a[-1]").is_err());
    }

    #[test]
    fn pairing_is_dual_basis() {
        let a = alpha();
        let e = Vector::basis(a.parse_word("a[-1]|0>").unwrap());
        let vac = Vector::vacuum();
        assert_eq!(vac.pair(&vac), Scalar::one());
        assert!(vac.pair(&e).is_zero());
        assert_eq!(
            e.scale(&Scalar::from(2)).pair(&e.scale(&Scalar::from(3))),
            Scalar::from(6)
        );
        assert_eq!(e.pair(&e.scale(&Scalar::from(3))), Scalar::from(3));
    }

    #[test]
    fn maps_check_weights_and_transpose() {
        let a = alpha();
        let w1 = a.parse_word("a[-1]|0>").unwrap();
        let w2 = a.parse_word("a[-2]|0>").unwrap();
        let m = GradedMap::new(
            &a,
            Weight::ONE,
            vec![(w1.clone(), Vector::basis(w2.clone()).scale(&Scalar::from(5)))],
        )
        .unwrap();
        assert_eq!(
            m.apply(&Vector::basis(w1.clone()), &a),
            Vector::basis(w2.clone()).scale(&Scalar::from(5))
        );
        let t = m.transpose(&a);
        let f = Vector::basis(w2.clone());
        assert_eq!(t.apply(&f, &a), m.apply_dual(&f));
        assert!(GradedMap::new(&a, Weight::ZERO, vec![(w1, Vector::basis(w2))]).is_err());
    }
}
