//! Oracles shared by the integration tests, written independently of the
//! correlator engine.
#![allow(dead_code)]

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vwb_core::correlator::{compute, GeneratorField, Insertion};
use vwb_core::graded::{Letter, Vector, Weight, Word};
use vwb_core::modealg::ModeAlgebra;
use vwb_core::ratcalc::{make_vars, LaurentPoly, Scalar, SpecialRational};
use vwb_core::vertexop::modes_by_residues;

/// The four builtins with the weight caps used throughout the tests.
pub fn builtins() -> Vec<(ModeAlgebra, Weight)> {
    vec![
        (ModeAlgebra::heisenberg(), Weight::int(4)),
        (ModeAlgebra::free_fermion(), "7/2".parse().unwrap()),
        (ModeAlgebra::virasoro(Scalar::ratio(1, 2)), Weight::int(4)),
        (ModeAlgebra::virasoro(Scalar::from(1)), Weight::int(4)),
    ]
}

/// Truncated mode series `Σ_k c(k) z1^{a-k} z2^{b+k}`, `k = first..first+terms`.
pub fn series_oracle(coeff: impl Fn(i32) -> Scalar, first: i32, a: i32, b: i32, terms: i32) -> LaurentPoly {
    let mut p = LaurentPoly::zero_in(make_vars(&["z1", "z2"]));
    for k in first..first + terms {
        p.add_term(vec![a - k, b + k].into_boxed_slice(), coeff(k));
    }
    p
}

/// Two-point vacuum oracles from the brackets: `⟨φ_k φ_{-k} 𝟏⟩` summed as
/// `Σ_k ⟨φ_k φ_{-k}⟩ z1^{-k-1} z2^{k-1}` with the bracket value written out.
pub fn two_point_series(name: &str, c: &Scalar, terms: i32) -> LaurentPoly {
    match name {
        "heisenberg" => series_oracle(|k| Scalar::from(k as i64), 1, -1, -1, terms),
        "free_fermion" => series_oracle(|_| Scalar::from(1), 0, -1, 0, terms),
        _ => series_oracle(|k| c * &Scalar::ratio((k * k * k - k) as i64, 12), 2, -2, -2, terms),
    }
}

/// Sum over perfect matchings of `z_1..z_n` of `sign · Π 1/(z_a - z_b)`.
pub fn wick_pfaffian(n: usize) -> SpecialRational {
    fn rec(rest: &[usize]) -> Vec<(i64, Vec<(usize, usize)>)> {
        if rest.is_empty() {
            return vec![(1, vec![])];
        }
        let a = rest[0];
        let mut out = Vec::new();
        for j in 1..rest.len() {
            let b = rest[j];
            // moving b next to a crosses j-1 points
            let sign = if (j - 1) % 2 == 0 { 1 } else { -1 };
            let remaining: Vec<usize> = rest
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != 0 && *k != j)
                .map(|(_, &x)| x)
                .collect();
            for (s, mut pairs) in rec(&remaining) {
                pairs.push((a, b));
                out.push((sign * s, pairs));
            }
        }
        out
    }
    let pts: Vec<usize> = (1..=n).collect();
    let mut total = SpecialRational::zero();
    for (sign, pairs) in rec(&pts) {
        let mut term = SpecialRational::one();
        for (a, b) in pairs {
            term = term.mul(&SpecialRational::inv_difference_pow(
                &format!("z{a}"),
                &format!("z{b}"),
                1,
            ));
        }
        total = total.add(&term.scale(&Scalar::from(sign)));
    }
    total
}

/// `⟨bra, φ_{n_1}···φ_{n_k} ket⟩` for generator modes, applied right to left.
pub fn mode_sum(alg: &ModeAlgebra, gens: &[u16], modes: &[i32], bra: &Vector, ket: &Vector) -> Scalar {
    let mut v = ket.clone();
    for (g, n) in gens.iter().zip(modes).rev() {
        if v.is_zero() {
            return Scalar::zero();
        }
        v = alg.mode_act(*g, *n, &v).unwrap();
    }
    bra.pair(&v)
}

/// Compare the region expansion `|z1| > ··· > |zk|` of a computed correlator
/// with direct mode sums on every exponent vector within `guard` of the
/// reconstruction box. Returns the number of coefficients compared.
pub fn region_consistency(
    alg: &ModeAlgebra,
    gens: &[u16],
    bra: &Vector,
    ket: &Vector,
    guard: i32,
) -> Result<usize, String> {
    let fields: Vec<GeneratorField> = gens.iter().map(|&g| GeneratorField::new(alg, g)).collect();
    let names: Vec<String> = (1..=gens.len()).map(|k| format!("z{k}")).collect();
    let ins: Vec<Insertion> = fields.iter().zip(&names).map(|(f, n)| Insertion::new(f, n)).collect();
    let r = compute(alg, bra, &ins, ket).map_err(|e| e.to_string())?;
    let alpha = alg.alphabet();
    let wk = ket.weight(alpha).unwrap_or(Weight::ZERO);
    let wb = bra.weight(alpha).unwrap_or(Weight::ZERO);
    let wf = gens.iter().fold(Weight::ZERO, |a, &g| a + alg.gen_weight(g));
    let Some(degree) = (wb - wk - wf).to_int() else {
        return if r.value.is_zero() {
            Ok(0)
        } else {
            Err("parity-violating correlator".into())
        };
    };
    if !r.value.is_zero() && r.value.homogeneous_degree() != Some(degree) {
        return Err(format!("{} is not homogeneous of degree {degree}", r.value));
    }
    // the box the engine reconstructed, or a small default window when zero
    let k = gens.len();
    let bounds: Vec<(i32, i32)> = if r.bounds.len() == k {
        r.bounds.clone()
    } else {
        vec![(-4, 4); k]
    };
    let lo: Vec<i32> = bounds.iter().map(|b| b.0 - guard).collect();
    let hi: Vec<i32> = bounds.iter().map(|b| b.1 + guard).collect();
    let mut points = Vec::new();
    fn rec(l: usize, lo: &[i32], hi: &[i32], rest: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if l + 1 == lo.len() {
            if rest >= lo[l] && rest <= hi[l] {
                cur.push(rest);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for e in lo[l]..=hi[l] {
            cur.push(e);
            rec(l + 1, lo, hi, rest - e, cur, out);
            cur.pop();
        }
    }
    rec(0, &lo, &hi, degree, &mut Vec::new(), &mut points);
    let order: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let filt = |e: &[i32]| -> i64 { e.iter().enumerate().map(|(p, &x)| (p as i64 + 1) * x as i64).sum() };
    let top = points.iter().map(|e| filt(e)).max().unwrap_or(0);
    let series = if r.value.is_zero() {
        LaurentPoly::zero_in(make_vars(&order))
    } else {
        r.value.expand_region_through(&order, top)
    };
    for e in &points {
        let modes: Vec<i32> = e.iter().map(|x| -x - 1).collect();
        let direct = mode_sum(alg, gens, &modes, bra, ket);
        let named: Vec<(&str, i32)> = order.iter().copied().zip(e.iter().copied()).collect();
        let from_series = if series.is_zero() {
            Scalar::zero()
        } else {
            series.coeff_named(&named)
        };
        if direct != from_series {
            return Err(format!(
                "coefficient at {e:?}: series {from_series}, mode sum {direct} (correlator {})",
                r.value
            ));
        }
    }
    Ok(points.len())
}

/// A random correlator request: generator insertions and basis bra/ket whose
/// weights allow a nonzero value when possible.
pub fn random_request(alg: &ModeAlgebra, cutoff: Weight, rng: &mut ChaCha8Rng) -> (Vec<u16>, Word, Word) {
    let space = alg.enumerate_basis(cutoff);
    let words: Vec<(Weight, Word)> = space.words().map(|(n, w)| (n, w.clone())).collect();
    let k = rng.gen_range(2..=3);
    let gens: Vec<u16> = (0..k).map(|_| rng.gen_range(0..alg.num_generators())).collect();
    let wf = gens.iter().fold(Weight::ZERO, |a, &g| a + alg.gen_weight(g));
    let (kw, ket) = words.choose(rng).unwrap().clone();
    let matching: Vec<&(Weight, Word)> = words.iter().filter(|(n, _)| (*n - kw - wf).is_integer()).collect();
    let bra = matching
        .choose(rng)
        .map(|(_, w)| w.clone())
        .unwrap_or_else(Word::vacuum);
    (gens, bra, ket)
}

pub fn relation(alg: &ModeAlgebra, terms: &[(Scalar, &str)]) -> Vec<(Scalar, Word)> {
    terms
        .iter()
        .map(|(c, s)| (c.clone(), alg.alphabet().parse_word(s).unwrap()))
        .collect()
}

/// All pairs of basis vectors up to `cutoff`.
pub fn samples(alg: &ModeAlgebra, cutoff: i32) -> Vec<(Vector, Vector)> {
    let words: Vec<Word> = alg
        .enumerate_basis(Weight::int(cutoff))
        .words()
        .map(|(_, w)| w.clone())
        .collect();
    let mut out = Vec::new();
    for b in &words {
        for k in &words {
            out.push((Vector::basis(b.clone()), Vector::basis(k.clone())));
        }
    }
    out
}

/// Relations among words read off from the brackets by hand, at least
/// five per builtin.
pub fn bracket_relations(alg: &ModeAlgebra) -> Vec<Vec<(Scalar, Word)>> {
    let one = Scalar::from(1);
    let neg = Scalar::from(-1);
    let name = alg.alphabet().name(0).to_string();
    let lists: Vec<Vec<(Scalar, String)>> = match name.as_str() {
        "a" => vec![
            vec![
                (one.clone(), "a[-1]a[-2]|0>".into()),
                (neg.clone(), "a[-2]a[-1]|0>".into()),
            ],
            vec![
                (one.clone(), "a[-1]a[-3]|0>".into()),
                (neg.clone(), "a[-3]a[-1]|0>".into()),
            ],
            vec![(one.clone(), "a[1]a[-1]|0>".into()), (neg.clone(), "|0>".into())],
            vec![(one.clone(), "a[2]a[-2]|0>".into()), (Scalar::from(-2), "|0>".into())],
            vec![
                (one.clone(), "a[1]a[-1]a[-1]|0>".into()),
                (Scalar::from(-2), "a[-1]|0>".into()),
            ],
            vec![(one.clone(), "a[0]a[-1]|0>".into())],
        ],
        "psi" => vec![
            vec![(one.clone(), "psi[-1]psi[-1]|0>".into())],
            vec![(one.clone(), "psi[-2]psi[-2]|0>".into())],
            vec![
                (one.clone(), "psi[-1]psi[-2]|0>".into()),
                (one.clone(), "psi[-2]psi[-1]|0>".into()),
            ],
            vec![(one.clone(), "psi[0]psi[-1]|0>".into()), (neg.clone(), "|0>".into())],
            vec![(one.clone(), "psi[1]psi[-2]|0>".into()), (neg.clone(), "|0>".into())],
            vec![
                (one.clone(), "psi[-1]psi[-3]|0>".into()),
                (one.clone(), "psi[-3]psi[-1]|0>".into()),
            ],
        ],
        _ => {
            let c = alg.central_charge().expect("virasoro central charge");
            vec![
                vec![
                    (one.clone(), "T[-1]T[-2]|0>".into()),
                    (neg.clone(), "T[-2]T[-1]|0>".into()),
                    (neg.clone(), "T[-4]|0>".into()),
                ],
                vec![
                    (one.clone(), "T[3]T[-1]|0>".into()),
                    (&c * &Scalar::ratio(-1, 2), "|0>".into()),
                ],
                vec![
                    (one.clone(), "T[1]T[-1]|0>".into()),
                    (Scalar::from(-2), "T[-1]|0>".into()),
                ],
                vec![(one.clone(), "T[2]T[-1]|0>".into())],
                vec![(one.clone(), "T[0]T[-1]|0>".into()), (neg.clone(), "T[-2]|0>".into())],
                vec![(one.clone(), "T[0]|0>".into())],
            ]
        }
    };
    lists
        .iter()
        .map(|l| relation(alg, &l.iter().map(|(c, s)| (c.clone(), s.as_str())).collect::<Vec<_>>()))
        .collect()
}

/// Sum of the weight components of `v` up to `cutoff`.
pub fn truncate(alg: &ModeAlgebra, v: &Vector, cutoff: Weight) -> Vector {
    let mut out = Vector::zero();
    for (n, part) in v.by_weight(alg.alphabet()) {
        if n <= cutoff {
            out = out.add(&part);
        }
    }
    out
}

/// Compare the residue modes of each `φ_{-1}𝟏` with the generator modes on
/// every block up to `cutoff`. Returns the number of comparisons.
pub fn generator_modes_agree(alg: &ModeAlgebra, cutoff: Weight) -> Result<usize, String> {
    let alpha = alg.alphabet();
    let space = alg.enumerate_basis(cutoff);
    let mut count = 0;
    for g in 0..alg.num_generators() {
        let w = Word(vec![Letter::new(g, -1)]);
        let modes = modes_by_residues(alg, &w, cutoff).map_err(|e| e.to_string())?;
        let wu = alg.gen_weight(g);
        let span = cutoff.floor() + 2;
        for n in (wu.floor() - span)..=(wu.floor() + span) {
            for (wv, v) in space.words() {
                let vv = Vector::basis(v.clone());
                // outputs above the cutoff are truncated away
                let want = if wv + wu - Weight::int(n + 1) > cutoff {
                    Vector::zero()
                } else {
                    truncate(alg, &alg.mode_act(g, n, &vv).map_err(|e| e.to_string())?, cutoff)
                };
                let got = modes.get(&n).map(|m| m.apply(&vv, alpha)).unwrap_or_else(Vector::zero);
                if got != want {
                    return Err(format!(
                        "{}: mode {n} of {} on {}: {} vs {}",
                        alg.name(),
                        alpha.name(g),
                        alpha.render(v),
                        got.render(alpha),
                        want.render(alpha)
                    ));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}
