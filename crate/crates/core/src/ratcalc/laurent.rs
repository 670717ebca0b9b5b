//! Sparse multivariate Laurent polynomials over ℚ(i).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::Scalar;

/// Sorted, deduplicated variable names shared between polynomials.
pub type Vars = Arc<[String]>;

pub fn make_vars<S: AsRef<str>>(names: &[S]) -> Vars {
    let mut v: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
    v.sort();
    v.dedup();
    v.into()
}

pub fn union_vars(a: &Vars, b: &Vars) -> Vars {
    if Arc::ptr_eq(a, b) || a == b {
        return a.clone();
    }
    let mut v: Vec<String> = a.iter().chain(b.iter()).cloned().collect();
    v.sort();
    v.dedup();
    v.into()
}

pub type Exps = Box<[i32]>;

/// `Σ c_e · z^e` with finitely many nonzero `c_e`; exponent vectors are
/// aligned with `vars`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    vars: Vars,
    terms: BTreeMap<Exps, Scalar>,
}

impl LaurentPoly {
    pub fn zero_in(vars: Vars) -> Self {
        LaurentPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant_in(vars: Vars, c: Scalar) -> Self {
        let mut p = Self::zero_in(vars);
        if !c.is_zero() {
            let e = vec![0; p.vars.len()].into_boxed_slice();
            p.terms.insert(e, c);
        }
        p
    }

    pub fn constant(c: Scalar) -> Self {
        Self::constant_in(make_vars::<&str>(&[]), c)
    }

    /// `c · Π var^exp`.
    pub fn monomial(c: Scalar, powers: &[(&str, i32)]) -> Self {
        let names: Vec<&str> = powers.iter().map(|p| p.0).collect();
        let vars = make_vars(&names);
        let mut e = vec![0; vars.len()];
        for (name, k) in powers {
            let idx = vars.iter().position(|v| v == name).unwrap();
            e[idx] += k;
        }
        let mut p = Self::zero_in(vars);
        p.add_term(e.into_boxed_slice(), c);
        p
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(Scalar::one(), &[(name, 1)])
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[i32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Coefficient of a monomial given by name → exponent; unnamed variables
    /// are taken at exponent 0.
    pub fn coeff_named(&self, powers: &[(&str, i32)]) -> Scalar {
        let mut e = vec![0; self.vars.len()];
        for (name, k) in powers {
            match self.var_index(name) {
                Some(i) => e[i] = *k,
                None if *k == 0 => {}
                None => return Scalar::zero(),
            }
        }
        self.coeff(&e)
    }

    pub fn add_term(&mut self, exps: Exps, c: Scalar) {
        debug_assert_eq!(exps.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-express over a superset of the current variables.
    pub fn with_vars(&self, vars: &Vars) -> Self {
        if Arc::ptr_eq(&self.vars, vars) || &self.vars == vars {
            return LaurentPoly {
                vars: vars.clone(),
                terms: self.terms.clone(),
            };
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .expect("target variable set must contain every variable")
            })
            .collect();
        let mut out = LaurentPoly::zero_in(vars.clone());
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (k, &x) in e.iter().enumerate() {
                ne[map[k]] = x;
            }
            out.terms.insert(ne.into_boxed_slice(), c.clone());
        }
        out
    }

    /// Drop variables that appear with exponent zero in every term.
    pub fn trimmed(&self) -> Self {
        let keep: Vec<usize> = (0..self.vars.len())
            .filter(|&k| self.terms.keys().any(|e| e[k] != 0))
            .collect();
        if keep.len() == self.vars.len() {
            return self.clone();
        }
        let vars: Vars = keep.iter().map(|&k| self.vars[k].clone()).collect::<Vec<_>>().into();
        let mut out = LaurentPoly::zero_in(vars);
        for (e, c) in &self.terms {
            let ne: Vec<i32> = keep.iter().map(|&k| e[k]).collect();
            out.terms.insert(ne.into_boxed_slice(), c.clone());
        }
        out
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let vars = union_vars(&self.vars, &other.vars);
        (self.with_vars(&vars), other.with_vars(&vars))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.aligned(other);
        for (e, c) in b.terms {
            a.add_term(e, c);
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return LaurentPoly::zero_in(self.vars.clone());
        }
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let mut out = LaurentPoly::zero_in(a.vars.clone());
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<i32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.add_term(e.into_boxed_slice(), ca * cb);
            }
        }
        out
    }

    /// Multiply by the monomial `Π var^shift` (variables must be present).
    pub fn shift(&self, shift: &[i32]) -> Self {
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let ne: Vec<i32> = e.iter().zip(shift).map(|(x, y)| x + y).collect();
                    (ne.into_boxed_slice(), c.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = LaurentPoly::constant_in(self.vars.clone(), Scalar::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn min_exp(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|e| e[var]).min()
    }

    pub fn max_exp(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Common total degree of all terms, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<i32>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    /// Group terms by the exponent of `var`; the returned polynomials no
    /// longer depend on `var` (their exponent slot is zero).
    pub fn split_by(&self, var: usize) -> BTreeMap<i32, LaurentPoly> {
        let mut out: BTreeMap<i32, LaurentPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = e.to_vec();
            let k = ne[var];
            ne[var] = 0;
            out.entry(k)
                .or_insert_with(|| LaurentPoly::zero_in(self.vars.clone()))
                .add_term(ne.into_boxed_slice(), c.clone());
        }
        out
    }

    /// Substitute each listed variable (by index) with a polynomial. The
    /// substituted variables must carry nonnegative exponents unless the
    /// replacement is a single monomial.
    pub fn substitute(&self, subs: &[(usize, LaurentPoly)]) -> Self {
        let mut vars = self.vars.clone();
        for (_, p) in subs {
            vars = union_vars(&vars, &p.vars);
        }
        let subs: Vec<(usize, LaurentPoly)> = subs.iter().map(|(k, p)| (*k, p.with_vars(&vars))).collect();
        let mut powers: BTreeMap<(usize, i32), LaurentPoly> = BTreeMap::new();
        let mut out = LaurentPoly::zero_in(vars.clone());
        let base = self.with_vars(&vars);
        let idx: Vec<usize> = subs
            .iter()
            .map(|(k, _)| vars.iter().position(|v| *v == self.vars[*k]).unwrap())
            .collect();
        for (e, c) in &base.terms {
            let mut rest = e.to_vec();
            let mut factor = LaurentPoly::constant_in(vars.clone(), c.clone());
            for (s, (_, p)) in subs.iter().enumerate() {
                let k = rest[idx[s]];
                rest[idx[s]] = 0;
                if k == 0 {
                    continue;
                }
                let pw = powers.entry((s, k)).or_insert_with(|| {
                    if k > 0 {
                        p.pow(k as u32)
                    } else {
                        assert_eq!(p.len(), 1, "negative power of a non-monomial substitution");
                        let (pe, pc) = p.terms.iter().next().unwrap();
                        let ne: Vec<i32> = pe.iter().map(|x| x * k).collect();
                        let inv = pc.inv().unwrap();
                        let mut coef = Scalar::one();
                        for _ in 0..(-k) {
                            coef = &coef * &inv;
                        }
                        let mut m = LaurentPoly::zero_in(vars.clone());
                        m.add_term(ne.into_boxed_slice(), coef);
                        m
                    }
                });
                factor = factor.mul(pw);
            }
            out = out.add(&factor.shift(&rest));
        }
        out
    }

    /// Divide exactly by the linear polynomial `lin` (no constant term,
    /// coefficients ±1). Returns `None` when the division leaves a remainder.
    pub fn div_linear(&self, lin: &LaurentPoly) -> Option<LaurentPoly> {
        let (num, lin) = self.aligned(lin);
        if num.is_zero() {
            return Some(num);
        }
        // lead variable: first variable present in lin
        let (lead, lead_c) = {
            let (e, c) = lin
                .terms
                .iter()
                .find(|(e, _)| e.iter().any(|&x| x != 0))
                .expect("linear form must be nonconstant");
            (e.iter().position(|&x| x == 1).unwrap(), c.clone())
        };
        let rest = {
            let mut r = lin.clone();
            let mut e = vec![0; lin.vars.len()];
            e[lead] = 1;
            r.terms.remove(&e[..]);
            r
        };
        let inv_c = lead_c.inv().unwrap();
        // num = x^{lo} · Σ_j p_j x^j; synthetic division by (c x + rest)
        let lo = num.min_exp(lead).unwrap();
        let parts = num.split_by(lead);
        let hi = *parts.keys().last().unwrap();
        let n = (hi - lo) as usize;
        let mut p: Vec<LaurentPoly> = (0..=n)
            .map(|j| {
                parts
                    .get(&(lo + j as i32))
                    .cloned()
                    .unwrap_or_else(|| LaurentPoly::zero_in(num.vars.clone()))
            })
            .collect();
        if n == 0 {
            // x-free numerator: divisible only if `rest` is zero, impossible here
            return None;
        }
        let mut q = vec![LaurentPoly::zero_in(num.vars.clone()); n];
        for j in (1..=n).rev() {
            let qj = p[j].scale(&inv_c);
            p[j - 1] = p[j - 1].sub(&rest.mul(&qj));
            q[j - 1] = qj;
        }
        if !p[0].is_zero() {
            return None;
        }
        let mut out = LaurentPoly::zero_in(num.vars.clone());
        for (j, qj) in q.into_iter().enumerate() {
            let mut sh = vec![0; num.vars.len()];
            sh[lead] = lo + j as i32;
            out = out.add(&qj.shift(&sh));
        }
        Some(out)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn fmt_monomial(vars: &[String], e: &[i32]) -> Vec<String> {
    vars.iter()
        .zip(e)
        .filter(|(_, &k)| k != 0)
        .map(|(v, &k)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
        .collect()
}

pub(crate) fn fmt_term(vars: &[String], e: &[i32], c: &Scalar) -> String {
    let mono = fmt_monomial(vars, e);
    let cs = c.to_string();
    let needs_paren = !c.is_real() && !c.re().is_zero();
    let cs = if needs_paren { format!("({cs})") } else { cs };
    if mono.is_empty() {
        return cs;
    }
    let mono = mono.join("*");
    if c.is_one() {
        mono
    } else if *c == -Scalar::one() {
        format!("-{mono}")
    } else {
        format!("{cs}*{mono}")
    }
}

/// Terms in descending exponent order, e.g. `z1^-1 + z1^-2*z2`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let t = fmt_term(&self.vars, e, c);
            if first {
                write!(f, "{t}")?;
                first = false;
            } else if let Some(rest) = t.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {t}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(name: &str) -> LaurentPoly {
        LaurentPoly::var(name)
    }

    #[test]
    fn ring_laws_spot_check() {
        let a = z("z1").add(&z("z2").scale(&Scalar::from(3)));
        let b = z("z2").sub(&LaurentPoly::monomial(Scalar::i(), &[("z1", -2)]));
        let c = z("z3").add(&LaurentPoly::constant(Scalar::ratio(1, 2)));
        assert_eq!(a.mul(&b), b.mul(&a));
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn linear_division() {
        let d = z("z1").sub(&z("z2"));
        let num = z("z1").pow(2).sub(&z("z2").pow(2));
        let q = num.div_linear(&d).unwrap();
        assert_eq!(q, z("z1").add(&z("z2")));
        assert!(z("z1").add(&z("z2")).div_linear(&d).is_none());
        // Laurent numerator: (z1 - z2) z1^-3
        let n2 = d.mul(&LaurentPoly::monomial(Scalar::one(), &[("z1", -3)]));
        assert_eq!(
            n2.div_linear(&d).unwrap().trimmed(),
            LaurentPoly::monomial(Scalar::one(), &[("z1", -3)])
        );
    }

    #[test]
    fn substitution_binomial() {
        let p = z("z1").pow(2);
        let s = z("x1").add(&z("z"));
        let idx = p.var_index("z1").unwrap();
        let r = p.substitute(&[(idx, s.clone())]).trimmed();
        assert_eq!(r, s.pow(2));
    }
}
