//! Rational functions whose denominators are products of linear forms with
//! ±1 coefficients, e.g. `(z1-z2)^-2 * z2^-1`.
//!
//! Single-variable denominator factors are folded into the numerator as
//! negative exponents, so every stored form involves at least two variables.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::laurent::{fmt_term, make_vars, union_vars, LaurentPoly, Vars};
use super::Scalar;
use crate::error::{Error, ParseError, Result};

/// `Σ ±v` over at least one variable, normalized so the lexically first
/// variable carries `+1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    terms: Vec<(String, i8)>,
}

impl LinearForm {
    /// Canonicalize `Σ c·v`; returns the form and the sign that was divided
    /// out, or `None` if every coefficient vanishes.
    pub fn canonical(coeffs: &BTreeMap<String, i64>) -> Result<Option<(LinearForm, i8)>> {
        let mut terms = Vec::new();
        for (v, &c) in coeffs {
            match c {
                0 => {}
                1 | -1 => terms.push((v.clone(), c as i8)),
                _ => return Err(Error::NonLinearDenominator(format!("coefficient {c} on `{v}`"))),
            }
        }
        if terms.is_empty() {
            return Ok(None);
        }
        let sign = terms[0].1;
        for t in &mut terms {
            t.1 *= sign;
        }
        Ok(Some((LinearForm { terms }, sign)))
    }

    /// `a - b` (canonical orientation applied, sign returned).
    pub fn difference(a: &str, b: &str) -> (LinearForm, i8) {
        let mut m = BTreeMap::new();
        m.insert(a.to_string(), 1);
        *m.entry(b.to_string()).or_insert(0) -= 1;
        LinearForm::canonical(&m).unwrap().expect("a - b with a == b")
    }

    pub fn terms(&self) -> &[(String, i8)] {
        &self.terms
    }

    pub fn coeff(&self, var: &str) -> i8 {
        self.terms.iter().find(|(v, _)| v == var).map(|t| t.1).unwrap_or(0)
    }

    pub fn vars(&self) -> Vars {
        make_vars(&self.terms.iter().map(|t| t.0.as_str()).collect::<Vec<_>>())
    }

    pub fn to_poly(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero_in(self.vars());
        for (v, c) in &self.terms {
            p = p.add(&LaurentPoly::monomial(Scalar::from(*c as i64), &[(v.as_str(), 1)]));
        }
        p
    }

    fn coeff_map(&self) -> BTreeMap<String, i64> {
        self.terms.iter().map(|(v, c)| (v.clone(), *c as i64)).collect()
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (v, c)) in self.terms.iter().enumerate() {
            match (k, c) {
                (0, 1) => write!(f, "{v}")?,
                (0, _) => write!(f, "-{v}")?,
                (_, 1) => write!(f, "+{v}")?,
                _ => write!(f, "-{v}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// The replacement for one variable under [`SpecialRational::substitute_shift`]:
/// a sum of one or two variables with ±1 coefficients.
#[derive(Clone, Debug)]
pub struct ShiftTarget {
    pub terms: Vec<(String, i8)>,
}

impl ShiftTarget {
    /// `a + b`, the shape `ξ + z`.
    pub fn sum(a: &str, b: &str) -> Self {
        ShiftTarget {
            terms: vec![(a.to_string(), 1), (b.to_string(), 1)],
        }
    }

    /// `a - b`.
    pub fn difference(a: &str, b: &str) -> Self {
        ShiftTarget {
            terms: vec![(a.to_string(), 1), (b.to_string(), -1)],
        }
    }

    pub fn single(a: &str) -> Self {
        ShiftTarget {
            terms: vec![(a.to_string(), 1)],
        }
    }

    fn to_poly(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero_in(make_vars::<&str>(&[]));
        for (v, c) in &self.terms {
            p = p.add(&LaurentPoly::monomial(Scalar::from(*c as i64), &[(v.as_str(), 1)]));
        }
        p
    }
}

/// `numer / Π form^exp`.
#[derive(Clone, PartialEq, Eq)]
pub struct SpecialRational {
    numer: LaurentPoly,
    denom: BTreeMap<LinearForm, u32>,
}

impl Default for SpecialRational {
    fn default() -> Self {
        SpecialRational::zero()
    }
}

impl SpecialRational {
    pub fn zero() -> Self {
        SpecialRational {
            numer: LaurentPoly::zero_in(make_vars::<&str>(&[])),
            denom: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> Self {
        SpecialRational::from_poly(LaurentPoly::constant(c))
    }

    pub fn one() -> Self {
        SpecialRational::constant(Scalar::one())
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        SpecialRational::build(p, BTreeMap::new())
    }

    /// `(a - b)^(-n)`, e.g. `(z1-z2)^-2` for `n = 2`.
    pub fn inv_difference_pow(a: &str, b: &str, n: u32) -> Self {
        let (form, sign) = LinearForm::difference(a, b);
        let mut denom = BTreeMap::new();
        denom.insert(form, n);
        let c = if sign < 0 && n % 2 == 1 {
            -Scalar::one()
        } else {
            Scalar::one()
        };
        SpecialRational::build(LaurentPoly::constant(c), denom)
    }

    /// `numer · Π form^(-exp)` where `exp` may be any sign; forms are given
    /// as coefficient maps and canonicalized here.
    pub fn from_parts(numer: LaurentPoly, forms: &[(BTreeMap<String, i64>, i32)]) -> Result<Self> {
        let mut numer = numer;
        let mut denom = BTreeMap::new();
        for (coeffs, e) in forms {
            let Some((form, sign)) = LinearForm::canonical(coeffs)? else {
                return Err(Error::NonLinearDenominator("form vanishes identically".into()));
            };
            if *e == 0 {
                continue;
            }
            if *e < 0 {
                let mut p = form.to_poly().pow((-*e) as u32);
                if sign < 0 && e % 2 != 0 {
                    p = p.neg();
                }
                numer = numer.mul(&p);
                continue;
            }
            if sign < 0 && e % 2 != 0 {
                numer = numer.neg();
            }
            *denom.entry(form).or_insert(0) += *e as u32;
        }
        Ok(SpecialRational::build(numer, denom))
    }

    /// Normalize: fold single-variable forms into the numerator and fix
    /// the variable list to exactly the variables that occur.
    fn build(numer: LaurentPoly, denom: BTreeMap<LinearForm, u32>) -> Self {
        if numer.is_zero() {
            return SpecialRational::zero();
        }
        let mut numer = numer;
        let mut kept = BTreeMap::new();
        for (form, e) in denom {
            if e == 0 {
                continue;
            }
            if form.terms.len() == 1 {
                let v = form.terms[0].0.clone();
                numer = numer.mul(&LaurentPoly::monomial(Scalar::one(), &[(v.as_str(), -(e as i32))]));
            } else {
                kept.insert(form, e);
            }
        }
        let mut vars = numer.trimmed().vars().clone();
        for f in kept.keys() {
            vars = union_vars(&vars, &f.vars());
        }
        let numer = numer.trimmed().with_vars(&vars);
        SpecialRational { numer, denom: kept }
    }

    pub fn numer(&self) -> &LaurentPoly {
        &self.numer
    }

    pub fn denom(&self) -> &BTreeMap<LinearForm, u32> {
        &self.denom
    }

    pub fn vars(&self) -> &Vars {
        self.numer.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    /// Laurent polynomial value when there are no denominator forms.
    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        self.denom.is_empty().then_some(&self.numer)
    }

    /// Total degree when homogeneous.
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let d = self.numer.homogeneous_degree()?;
        Some(d - self.denom.values().map(|&e| e as i32).sum::<i32>())
    }

    pub fn neg(&self) -> Self {
        SpecialRational {
            numer: self.numer.neg(),
            denom: self.denom.clone(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return SpecialRational::zero();
        }
        SpecialRational {
            numer: self.numer.scale(s),
            denom: self.denom.clone(),
        }
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        SpecialRational::build(self.numer.mul(p), self.denom.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut denom = self.denom.clone();
        for (f, e) in &other.denom {
            *denom.entry(f.clone()).or_insert(0) += e;
        }
        SpecialRational::build(self.numer.mul(&other.numer), denom)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut common = self.denom.clone();
        for (f, &e) in &other.denom {
            let slot = common.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(e);
        }
        let lift = |r: &SpecialRational| -> LaurentPoly {
            let mut n = r.numer.clone();
            for (f, &e) in &common {
                let have = r.denom.get(f).copied().unwrap_or(0);
                if e > have {
                    n = n.mul(&f.to_poly().pow(e - have));
                }
            }
            n
        };
        let numer = lift(self).add(&lift(other));
        SpecialRational::build(numer, common)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Semantic equality: `self - other` is the zero function.
    pub fn equal(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Cancel every denominator factor that divides the numerator.
    pub fn cancel(&self) -> Self {
        let mut numer = self.numer.clone();
        let mut denom = self.denom.clone();
        for (form, e) in denom.iter_mut() {
            let lin = form.to_poly();
            while *e > 0 {
                match numer.div_linear(&lin) {
                    Some(q) => {
                        numer = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        SpecialRational::build(numer, denom)
    }

    /// Replace variables by sums `ξ + z` (one or two ±1 terms). Negative
    /// numerator powers of a substituted variable become denominator forms.
    pub fn substitute_shift(&self, map: &BTreeMap<String, ShiftTarget>) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        for (v, t) in map {
            if t.terms.is_empty() || t.terms.len() > 2 || t.terms.iter().any(|x| x.1.abs() != 1) {
                return Err(Error::NonLinearDenominator(format!(
                    "target for `{v}` is not a sum of one or two ±1 terms"
                )));
            }
        }
        let mut numer = self.numer.clone();
        let mut forms: Vec<(BTreeMap<String, i64>, i32)> = Vec::new();
        for v in map.keys() {
            let Some(idx) = numer.var_index(v) else { continue };
            let lo = numer.min_exp(idx).unwrap_or(0);
            if lo < 0 {
                let mut sh = vec![0; numer.vars().len()];
                sh[idx] = -lo;
                numer = numer.shift(&sh);
                let mut c = BTreeMap::new();
                c.insert(v.clone(), 1);
                forms.push((c, -lo));
            }
        }
        let subs: Vec<(usize, LaurentPoly)> = map
            .iter()
            .filter_map(|(v, t)| numer.var_index(v).map(|i| (i, t.to_poly())))
            .collect();
        let numer = numer.substitute(&subs);
        for (form, &e) in &self.denom {
            forms.push((form.coeff_map(), e as i32));
        }
        let mut mapped = Vec::with_capacity(forms.len());
        for (coeffs, e) in forms {
            let mut out: BTreeMap<String, i64> = BTreeMap::new();
            for (v, c) in coeffs {
                match map.get(&v) {
                    Some(t) => {
                        for (w, d) in &t.terms {
                            *out.entry(w.clone()).or_insert(0) += c * (*d as i64);
                        }
                    }
                    None => *out.entry(v).or_insert(0) += c,
                }
            }
            mapped.push((out, e));
        }
        SpecialRational::from_parts(numer, &mapped)
    }

    /// Laurent expansion valid for `|order[0]| > |order[1]| > …`, keeping
    /// every monomial whose filtration degree lies within `depth` of the
    /// leading one. The filtration gives variable `order[p]` degree `p+1`,
    /// so each retained coefficient is exact.
    pub fn expand_region(&self, order: &[&str], depth: u32) -> LaurentPoly {
        self.expand_impl(order, Limit::Depth(depth))
    }

    /// Region expansion keeping every monomial whose filtration degree
    /// `Σ (p+1)·e_p` (with `p` the position in `order`) is at most `max_tdeg`.
    pub fn expand_region_through(&self, order: &[&str], max_tdeg: i64) -> LaurentPoly {
        self.expand_impl(order, Limit::Through(max_tdeg))
    }

    /// Filtration degree of an exponent vector over this function's variables.
    pub fn filtration_degree(order: &[&str], vars: &[String], e: &[i32]) -> i64 {
        vars.iter()
            .zip(e)
            .map(|(v, &x)| x as i64 * (order.iter().position(|o| o == v).expect("variable in order") as i64 + 1))
            .sum()
    }

    fn expand_impl(&self, order: &[&str], limit: Limit) -> LaurentPoly {
        let vars = self.vars().clone();
        let rank: Vec<i64> = vars
            .iter()
            .map(|v| {
                order
                    .iter()
                    .position(|o| o == v)
                    .unwrap_or_else(|| panic!("order must list variable `{v}`")) as i64
                    + 1
            })
            .collect();
        let tdeg = |e: &[i32]| -> i64 { e.iter().zip(&rank).map(|(&x, r)| x as i64 * r).sum() };
        if self.is_zero() {
            return LaurentPoly::zero_in(vars);
        }
        // leading variable of each form and the minimal degree it contributes
        let mut factors = Vec::new();
        for (form, &e) in &self.denom {
            let lead = form
                .terms
                .iter()
                .min_by_key(|(v, _)| rank[vars.iter().position(|w| w == v).unwrap()])
                .unwrap()
                .clone();
            let li = vars.iter().position(|w| *w == lead.0).unwrap();
            factors.push((form.clone(), e, lead, li, -(e as i64) * rank[li]));
        }
        let numer_min = self.numer.terms().map(|(e, _)| tdeg(e)).min().unwrap();
        let t0 = numer_min + factors.iter().map(|f| f.4).sum::<i64>();
        let bound = match limit {
            Limit::Depth(d) => t0 + d as i64,
            Limit::Through(t) => t + 1,
        };
        let depth = (bound - t0).max(0);
        let mut acc = self.numer.clone();
        let mut remaining: i64 = factors.iter().map(|f| f.4).sum();
        for (form, e, lead, li, fmin) in factors {
            remaining -= fmin;
            let s = Scalar::from(lead.1 as i64);
            // rest = form - s·lead, expanded in powers of rest/(s·lead)
            let mut rest = form.to_poly().with_vars(&vars);
            rest = rest.sub(&LaurentPoly::monomial(s.clone(), &[(lead.0.as_str(), 1)]).with_vars(&vars));
            let mut series = LaurentPoly::zero_in(vars.clone());
            let mut rest_pow = LaurentPoly::constant_in(vars.clone(), Scalar::one());
            let e = e as i64;
            for j in 0..depth {
                // C(-e, j) s^(-e-j) lead^(-e-j) rest^j ; s = ±1 so s^k = s^|k|
                let coeff = &Scalar::binomial(-e, j) * &Scalar::sign(if lead.1 < 0 { e + j } else { 0 });
                let mut sh = vec![0; vars.len()];
                sh[li] = -(e + j) as i32;
                series = series.add(&rest_pow.scale(&coeff).shift(&sh));
                rest_pow = rest_pow.mul(&rest);
            }
            let prod = acc.mul(&series);
            let mut pruned = LaurentPoly::zero_in(vars.clone());
            for (ex, c) in prod.terms() {
                if tdeg(ex) + remaining < bound {
                    pruned.add_term(ex.clone(), c.clone());
                }
            }
            acc = pruned;
        }
        let mut out = LaurentPoly::zero_in(vars.clone());
        for (ex, c) in acc.terms() {
            if tdeg(ex) < bound {
                out.add_term(ex.clone(), c.clone());
            }
        }
        out
    }

    /// Coefficient of `var^-1` in the expansion about `var = 0` inside a
    /// punctured disk free of other poles.
    pub fn residue_at_zero(&self, var: &str) -> Result<SpecialRational> {
        let Some(xi) = self.vars().iter().position(|v| v == var) else {
            return Ok(SpecialRational::zero());
        };
        let Some(a_min) = self.numer.min_exp(xi) else {
            return Ok(SpecialRational::zero());
        };
        if a_min >= 0 {
            return Ok(SpecialRational::zero());
        }
        let max_j = (-1 - a_min) as i64;
        // split forms into those containing var and the rest
        let mut fixed = BTreeMap::new();
        let mut moving = Vec::new();
        for (form, &e) in &self.denom {
            let s = form.coeff(var);
            if s == 0 {
                fixed.insert(form.clone(), e);
                continue;
            }
            let mut g = form.coeff_map();
            g.remove(var);
            if g.is_empty() {
                return Err(Error::ResiduePrecondition {
                    var: var.to_string(),
                    form: form.to_string(),
                });
            }
            moving.push((g, s as i64, e as i64));
        }
        // series terms: (coefficient, power of var, exponents of each G)
        let mut series: Vec<(Scalar, i64, Vec<i64>)> = vec![(Scalar::one(), 0, vec![0; moving.len()])];
        for (k, (_, s, e)) in moving.iter().enumerate() {
            let mut next = Vec::new();
            for (c, p, gs) in &series {
                for j in 0..=(max_j - p) {
                    // C(-e, j) s^j var^j G^(-e-j)
                    let coef = &(&Scalar::binomial(-e, j) * &Scalar::sign(if *s < 0 { j } else { 0 })) * c;
                    let mut g2 = gs.clone();
                    g2[k] = e + j;
                    next.push((coef, p + j, g2));
                }
            }
            series = next;
        }
        let parts = self.numer.split_by(xi);
        let mut total = SpecialRational::zero();
        for (a, na) in parts {
            if a >= 0 {
                continue;
            }
            let need = (-1 - a) as i64;
            for (c, p, gs) in &series {
                if *p != need {
                    continue;
                }
                let mut forms: Vec<(BTreeMap<String, i64>, i32)> =
                    fixed.iter().map(|(f, &e)| (f.coeff_map(), e as i32)).collect();
                for (k, (g, _, _)) in moving.iter().enumerate() {
                    forms.push((g.clone(), gs[k] as i32));
                }
                let term = SpecialRational::from_parts(na.scale(c), &forms)?;
                total = total.add(&term);
            }
        }
        Ok(total)
    }

    pub fn to_json(&self) -> RationalJson {
        RationalJson {
            numer: self
                .numer
                .terms()
                .map(|(e, c)| TermJson {
                    coeff: c.clone(),
                    exps: self
                        .vars()
                        .iter()
                        .zip(e.iter())
                        .filter(|(_, &k)| k != 0)
                        .map(|(v, &k)| (v.clone(), k))
                        .collect(),
                })
                .collect(),
            denom: self
                .denom
                .iter()
                .map(|(f, &e)| FormJson {
                    form: f.terms.iter().map(|(v, c)| (v.clone(), *c as i64)).collect(),
                    exp: e,
                })
                .collect(),
        }
    }

    pub fn from_json(j: &RationalJson) -> Result<Self> {
        let mut numer = LaurentPoly::zero_in(make_vars::<&str>(&[]));
        for t in &j.numer {
            let powers: Vec<(&str, i32)> = t.exps.iter().map(|(v, &k)| (v.as_str(), k)).collect();
            numer = numer.add(&LaurentPoly::monomial(t.coeff.clone(), &powers));
        }
        let mut forms = Vec::new();
        for f in &j.denom {
            if f.form.is_empty() {
                return Err(ParseError::Rational("empty denominator form".into()).into());
            }
            forms.push((f.form.clone(), f.exp as i32));
        }
        SpecialRational::from_parts(numer, &forms)
    }
}

#[derive(Clone, Copy)]
enum Limit {
    Depth(u32),
    Through(i64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: Scalar,
    pub exps: BTreeMap<String, i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    pub form: BTreeMap<String, i64>,
    pub exp: u32,
}

/// Exact JSON rendering `{numer, denom}` with rational strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalJson {
    pub numer: Vec<TermJson>,
    pub denom: Vec<FormJson>,
}

impl fmt::Debug for SpecialRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Canonical text such as `(z1-z2)^-2`, `-1/2*z^-3` or
/// `(z1 + z2)*(z1-z2)^-1`.
impl fmt::Display for SpecialRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let forms: Vec<String> = self.denom.iter().map(|(form, e)| format!("({form})^-{e}")).collect();
        let head = if self.numer.len() == 1 {
            let (e, c) = self.numer.terms().next().unwrap();
            let t = fmt_term(self.numer.vars(), e, c);
            let bare = e.iter().all(|&k| k == 0);
            match (bare, forms.is_empty(), t.as_str()) {
                (true, false, "1") => None,
                (true, false, "-1") => Some("-".to_string()),
                _ => Some(t),
            }
        } else {
            Some(format!("({})", self.numer))
        };
        match head {
            None => write!(f, "{}", forms.join("*")),
            Some(h) if forms.is_empty() => write!(f, "{h}"),
            Some(h) if h == "-" => write!(f, "-{}", forms.join("*")),
            Some(h) => write!(f, "{h}*{}", forms.join("*")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(name: &str) -> LaurentPoly {
        LaurentPoly::var(name)
    }

    fn mono(c: i64, p: &[(&str, i32)]) -> LaurentPoly {
        LaurentPoly::monomial(Scalar::from(c), p)
    }

    fn shift_map(pairs: &[(&str, ShiftTarget)]) -> BTreeMap<String, ShiftTarget> {
        pairs.iter().map(|(k, t)| (k.to_string(), t.clone())).collect()
    }

    #[test]
    fn antisymmetric_forms_cancel() {
        let a = SpecialRational::inv_difference_pow("z1", "z2", 1);
        let b = SpecialRational::inv_difference_pow("z2", "z1", 1);
        assert!(a.add(&b).is_zero());
        assert!(!a.equal(&b));
    }

    #[test]
    fn cancellation_of_a_factor() {
        let f = SpecialRational::inv_difference_pow("z1", "z2", 2).mul_poly(&z("z1").sub(&z("z2")));
        assert_eq!(f.cancel(), SpecialRational::inv_difference_pow("z1", "z2", 1));
        assert!(f.equal(&SpecialRational::inv_difference_pow("z1", "z2", 1)));
    }

    #[test]
    fn gaussian_scaling() {
        let f = SpecialRational::from_poly(mono(1, &[("z1", -1)])).scale(&Scalar::i());
        assert_eq!(f.mul(&f), SpecialRational::from_poly(mono(-1, &[("z1", -2)])));
    }

    #[test]
    fn semantic_equality() {
        let num = z("z1").pow(2).sub(&z("z2").pow(2));
        let f = SpecialRational::inv_difference_pow("z1", "z2", 1).mul_poly(&num);
        assert!(f.equal(&SpecialRational::from_poly(z("z1").add(&z("z2")))));
    }

    #[test]
    fn shift_substitution() {
        let m = shift_map(&[("z1", ShiftTarget::sum("x1", "z")), ("z2", ShiftTarget::sum("x2", "z"))]);
        let f = SpecialRational::inv_difference_pow("z1", "z2", 2);
        assert_eq!(
            f.substitute_shift(&m).unwrap(),
            SpecialRational::inv_difference_pow("x1", "x2", 2)
        );

        let g = SpecialRational::from_poly(mono(1, &[("z1", -1)]));
        let mut forms = BTreeMap::new();
        forms.insert("x1".to_string(), 1);
        forms.insert("z".to_string(), 1);
        let expect = SpecialRational::from_parts(LaurentPoly::constant(Scalar::one()), &[(forms.clone(), 1)]).unwrap();
        assert_eq!(g.substitute_shift(&m).unwrap(), expect);

        let h = g.mul(&SpecialRational::inv_difference_pow("z1", "z2", 1));
        let expect2 = expect.mul(&SpecialRational::inv_difference_pow("x1", "x2", 1));
        assert_eq!(h.substitute_shift(&m).unwrap(), expect2);
    }

    #[test]
    fn region_expansions() {
        let f = SpecialRational::inv_difference_pow("z1", "z2", 1);
        let e = f.expand_region(&["z1", "z2"], 3);
        let expect = mono(1, &[("z1", -1)])
            .add(&mono(1, &[("z1", -2), ("z2", 1)]))
            .add(&mono(1, &[("z1", -3), ("z2", 2)]));
        assert_eq!(e, expect.with_vars(e.vars()));
        let e2 = f.expand_region(&["z2", "z1"], 3);
        let expect2 = mono(-1, &[("z2", -1)])
            .add(&mono(-1, &[("z2", -2), ("z1", 1)]))
            .add(&mono(-1, &[("z2", -3), ("z1", 2)]));
        assert_eq!(e2, expect2.with_vars(e2.vars()));
    }

    #[test]
    fn residues() {
        let mut fm = BTreeMap::new();
        fm.insert("x".to_string(), 1);
        fm.insert("z".to_string(), 1);
        let f = SpecialRational::from_parts(mono(1, &[("x", -1)]), &[(fm, 1)]).unwrap();
        assert_eq!(
            f.residue_at_zero("x").unwrap(),
            SpecialRational::from_poly(mono(1, &[("z", -1)]))
        );

        let g = SpecialRational::inv_difference_pow("x", "w", 1).mul_poly(&mono(1, &[("x", -2)]));
        assert_eq!(
            g.residue_at_zero("x").unwrap(),
            SpecialRational::from_poly(mono(-1, &[("w", -2)]))
        );

        let h = SpecialRational::inv_difference_pow("x", "w", 3).mul_poly(&z("x").pow(2));
        assert!(h.residue_at_zero("x").unwrap().is_zero());
    }

    #[test]
    fn rendering() {
        assert_eq!(
            SpecialRational::inv_difference_pow("z1", "z2", 2).to_string(),
            "(z1-z2)^-2"
        );
        assert_eq!(
            SpecialRational::inv_difference_pow("z2", "z1", 1).to_string(),
            "-(z1-z2)^-1"
        );
        assert_eq!(SpecialRational::from_poly(mono(1, &[("z", -2)])).to_string(), "z^-2");
        assert_eq!(SpecialRational::zero().to_string(), "0");
        assert_eq!(SpecialRational::one().to_string(), "1");
    }

    #[test]
    fn json_round_trip() {
        let f = SpecialRational::inv_difference_pow("z1", "z2", 2)
            .mul_poly(&z("z1").add(&mono(3, &[("z2", -1)])))
            .scale(&"1/2+1/3 i".parse().unwrap());
        let txt = serde_json::to_string(&f.to_json()).unwrap();
        let back: RationalJson = serde_json::from_str(&txt).unwrap();
        assert_eq!(SpecialRational::from_json(&back).unwrap(), f);
    }
}
