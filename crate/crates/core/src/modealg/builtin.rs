//! Exact mode actions of the built-in algebras on normal-ordered words.

use dashmap::DashMap;
use num_traits::{One, Zero};

use crate::graded::{Letter, Vector, Word};
use crate::ratcalc::Scalar;

/// `α_n` with `[α_m, α_n] = m δ_{m+n,0}`.
pub(crate) fn heisenberg_act(n: i32, w: &Word) -> Vector {
    let letters = w.letters();
    if n < 0 {
        let mut out = letters.to_vec();
        let pos = out.partition_point(|l| l.mode <= n);
        out.insert(pos, Letter::new(0, n));
        return Vector::basis(Word(out));
    }
    if n == 0 {
        return Vector::zero();
    }
    let mult = letters.iter().filter(|l| l.mode == -n).count();
    if mult == 0 {
        return Vector::zero();
    }
    let pos = letters.iter().position(|l| l.mode == -n).unwrap();
    let mut out = letters.to_vec();
    out.remove(pos);
    Vector::from_terms([(Word(out), Scalar::from((n as i64) * mult as i64))])
}

/// `ψ_n` with `{ψ_m, ψ_n} = δ_{m+n,-1}`.
pub(crate) fn fermion_act(n: i32, w: &Word) -> Vector {
    let letters = w.letters();
    if n < 0 {
        if letters.iter().any(|l| l.mode == n) {
            return Vector::zero();
        }
        let pos = letters.partition_point(|l| l.mode < n);
        let mut out = letters.to_vec();
        out.insert(pos, Letter::new(0, n));
        return Vector::from_terms([(Word(out), Scalar::sign(pos as i64))]);
    }
    let partner = -1 - n;
    match letters.iter().position(|l| l.mode == partner) {
        None => Vector::zero(),
        Some(pos) => {
            let mut out = letters.to_vec();
            out.remove(pos);
            Vector::from_terms([(Word(out), Scalar::sign(pos as i64))])
        }
    }
}

/// Virasoro action in the shifted convention `φ_n = L_{n-1}`, with memo.
pub(crate) struct VirasoroAction {
    c: Scalar,
    memo: DashMap<(i32, Word), Vector>,
}

impl VirasoroAction {
    pub(crate) fn new(c: Scalar) -> Self {
        VirasoroAction {
            c,
            memo: DashMap::new(),
        }
    }

    pub(crate) fn central_charge(&self) -> &Scalar {
        &self.c
    }

    pub(crate) fn act(&self, m: i32, w: &Word) -> Vector {
        if let Some(v) = self.memo.get(&(m, w.clone())) {
            return v.clone();
        }
        let v = self.compute(m, w);
        self.memo.insert((m, w.clone()), v.clone());
        v
    }

    fn act_vec(&self, m: i32, v: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (w, c) in v.terms() {
            out.add_scaled(&self.act(m, w), c);
        }
        out
    }

    fn compute(&self, m: i32, w: &Word) -> Vector {
        let letters = w.letters();
        let Some(first) = letters.first() else {
            return if m >= 0 {
                Vector::zero()
            } else {
                Vector::basis(Word(vec![Letter::new(0, m)]))
            };
        };
        let f = first.mode;
        if m <= f {
            let mut out = Vec::with_capacity(letters.len() + 1);
            out.push(Letter::new(0, m));
            out.extend_from_slice(letters);
            return Vector::basis(Word(out));
        }
        // φ_m φ_f rest = φ_f (φ_m rest) + [φ_m, φ_f] rest
        let rest = Word(letters[1..].to_vec());
        let inner = self.act(m, &rest);
        let mut out = self.act_vec(f, &inner);
        // [L_{m-1}, L_{f-1}] = (m-f) L_{m+f-2} + c/12 ((m-1)^3 - (m-1)) δ_{m+f,2}
        if m != f {
            out.add_scaled(&self.act(m + f - 1, &rest), &Scalar::from((m - f) as i64));
        }
        if m + f == 2 {
            let k = (m - 1) as i64;
            let central = &self.c * &Scalar::ratio(k * k * k - k, 12);
            out.add_term(rest, central);
        }
        out
    }
}

/// `L(-1)` on the Heisenberg Fock space: `Σ_{j≥1} α_{-1-j} α_j`.
pub(crate) fn heisenberg_lminus1(w: &Word) -> Vector {
    heisenberg_quadratic(w, -1)
}

/// `L(1)` on the Heisenberg Fock space: `Σ_{j≥2} α_{1-j} α_j`.
pub(crate) fn heisenberg_l1(w: &Word) -> Vector {
    heisenberg_quadratic(w, 1)
}

fn heisenberg_quadratic(w: &Word, n: i32) -> Vector {
    let top = w.letters().iter().map(|l| -l.mode).max().unwrap_or(0);
    let mut out = Vector::zero();
    for j in 1..=top {
        if n - j == 0 {
            continue;
        }
        let inner = heisenberg_act(j, w);
        for (u, c) in inner.terms() {
            out.add_scaled(&heisenberg_act(n - j, u), c);
        }
    }
    out
}

/// `L_n = ½ Σ_r (r + n/2) :b_{-r} b_{n+r}:` with `b_r = ψ_{r-½}`, for
/// `n ∈ {-1, 0, 1}`. Indices `r` are stored doubled.
pub(crate) fn fermion_virasoro(n: i32, w: &Word) -> Vector {
    let bmode = |twice_r: i32| (twice_r - 1) / 2;
    let reach = 2 * w.letters().iter().map(|l| -l.mode).max().unwrap_or(0) + 4;
    let mut out = Vector::zero();
    let mut r2 = -reach - 1;
    while r2 <= reach + 1 {
        let a = -r2;
        let b = 2 * n + r2;
        // ½ (r + n/2) = (2r + n)/4 in doubled units
        let coef = Scalar::ratio((r2 + n) as i64, 4);
        if !coef.is_zero() {
            let (first, second, sign) = if b > 0 {
                (a, b, Scalar::one())
            } else {
                (b, a, -Scalar::one())
            };
            let inner = fermion_act(bmode(second), w);
            for (u, c) in inner.terms() {
                out.add_scaled(&fermion_act(bmode(first), u), &(c * &coef * sign.clone()));
            }
        }
        r2 += 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(modes: &[i32]) -> Word {
        Word(modes.iter().map(|&m| Letter::new(0, m)).collect())
    }

    #[test]
    fn heisenberg_commutator() {
        let v = heisenberg_act(1, &word(&[-1]));
        assert_eq!(v, Vector::vacuum());
        let v = heisenberg_act(2, &word(&[-2, -2, -1]));
        assert_eq!(v, Vector::basis(word(&[-2, -1])).scale(&Scalar::from(4)));
    }

    #[test]
    fn fermion_anticommutator() {
        assert_eq!(fermion_act(0, &word(&[-1])), Vector::vacuum());
        assert!(fermion_act(-1, &word(&[-1])).is_zero());
        assert_eq!(
            fermion_act(-2, &word(&[-3, -1])),
            Vector::basis(word(&[-3, -2, -1])).scale(&-Scalar::one())
        );
    }

    #[test]
    fn virasoro_central_term() {
        let vir = VirasoroAction::new(Scalar::ratio(1, 2));
        let w = vir.act(-1, &Word::vacuum());
        let back = vir.act(3, &Word(w.terms().next().unwrap().0 .0.clone()));
        assert_eq!(back, Vector::vacuum().scale(&Scalar::ratio(1, 4)));
    }

    #[test]
    fn fermion_l0_is_weight() {
        for modes in [&[-1][..], &[-2], &[-3, -1], &[-4, -2, -1]] {
            let w = word(modes);
            let wt: i32 = modes.iter().map(|m| -2 * m - 1).sum();
            assert_eq!(
                fermion_virasoro(0, &w),
                Vector::basis(w.clone()).scale(&Scalar::ratio(wt as i64, 2))
            );
        }
    }
}
