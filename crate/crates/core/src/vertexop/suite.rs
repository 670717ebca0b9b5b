//! Axiom checks for the vertex operator map on a truncated basis.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{matrix_element, matrix_elements, z_coeff, ModeSource, StateField, VertexTable};
use crate::correlator::{compute_many, Field, Insertion};
use crate::error::{Error, Result};
use crate::graded::{DualVector, Parity, Vector, Weight, Word};
use crate::modealg::ModeAlgebra;
use crate::ratcalc::{Scalar, ShiftTarget};
use crate::report::{CheckRecord, Report};

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Highest weight of the states the axioms are checked on.
    pub cutoff: Weight,
    /// Check only this many randomly chosen `(u1, u2, v)` triples.
    pub sample: Option<usize>,
    pub seed: u64,
    /// Highest intermediate weight compared in the associativity check;
    /// defaults to `cutoff`.
    pub assoc_window: Option<Weight>,
    /// Highest `wt u + wt v` at which the residue formula for `u_n v` is
    /// compared with the mode table; defaults to `cutoff`.
    pub residue_window: Option<Weight>,
}

impl SuiteOptions {
    pub fn new(cutoff: Weight) -> Self {
        SuiteOptions {
            cutoff,
            sample: None,
            seed: 0,
            assoc_window: None,
            residue_window: None,
        }
    }
}

pub(crate) type Outcome = Result<Option<String>>;

pub(crate) fn tally(rec: &mut CheckRecord, r: Outcome) {
    match r {
        Ok(None) => rec.instances += 1,
        Ok(Some(ce)) => {
            rec.instances += 1;
            rec.fail(ce);
        }
        Err(Error::BeyondCutoff { .. }) => rec.skipped += 1,
        Err(e) => {
            rec.instances += 1;
            rec.fail(format!("error: {e}"));
        }
    }
}

pub(crate) fn tally_all(name: &str, items: Vec<Outcome>) -> CheckRecord {
    let mut rec = CheckRecord::new(name);
    for r in items {
        tally(&mut rec, r);
    }
    rec
}

/// Range of `n` for which `u_n v` lands in weights `[w_min, cutoff]`.
pub(crate) fn mode_range(alg: &ModeAlgebra, wu: Weight, wv: Weight, cutoff: Weight) -> std::ops::RangeInclusive<i32> {
    let total = wu + wv - Weight::ONE;
    let lo = (total - cutoff).floor() + if (total - cutoff).is_integer() { 0 } else { 1 };
    let hi = match alg.min_weight(total.parity()) {
        Some(w) if w <= cutoff => (total - w).floor(),
        _ => lo - 1,
    };
    lo..=hi
}

/// Shared data for the checks: a mode source and the basis up to a cutoff.
pub(crate) struct Ctx<'a> {
    pub(crate) alg: &'a ModeAlgebra,
    pub(crate) src: &'a dyn ModeSource,
    pub(crate) basis: Vec<(Weight, Word)>,
    pub(crate) bras: Vec<DualVector>,
    pub(crate) cutoff: Weight,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(src: &'a dyn ModeSource, cutoff: Weight) -> Self {
        let alg = src.algebra();
        let basis: Vec<(Weight, Word)> = alg
            .enumerate_basis(cutoff)
            .words()
            .map(|(n, w)| (n, w.clone()))
            .collect();
        let bras = basis.iter().map(|(_, w)| Vector::basis(w.clone())).collect();
        Ctx {
            alg,
            src,
            basis,
            bras,
            cutoff,
        }
    }

    pub(crate) fn r(&self, w: &Word) -> String {
        self.alg.alphabet().render(w)
    }

    pub(crate) fn rv(&self, v: &Vector) -> String {
        v.render(self.alg.alphabet())
    }

    pub(crate) fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.basis.len();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    }
}

/// Run the vertex algebra axioms on all basis states up to `opts.cutoff`.
pub fn axiom_suite(alg: &ModeAlgebra, opts: &SuiteOptions) -> Result<Report> {
    let start = Instant::now();
    for i in 0..alg.num_generators() {
        if alg.gen_weight(i) > opts.cutoff {
            return Err(Error::Precondition(format!(
                "cutoff {} is below the weight of generator `{}`",
                opts.cutoff,
                alg.alphabet().name(i)
            )));
        }
    }
    if let Some(c) = alg.cutoff() {
        if opts.cutoff > c {
            return Err(Error::Precondition(format!(
                "cutoff {} exceeds the algebra's table cutoff {c}",
                opts.cutoff
            )));
        }
    }
    let table = VertexTable::new(alg);
    let ctx = Ctx::new(&table, opts.cutoff);
    let mut report = Report::new(format!("axiom suite for {} up to weight {}", alg.name(), opts.cutoff));
    report.push(identity(&ctx));
    report.push(creation(&ctx));
    report.push(residue_agreement(&ctx, opts.residue_window.unwrap_or(opts.cutoff)));
    report.push(derivative(&ctx));
    report.push(homogeneity(&ctx));
    report.push(skew_symmetry(&ctx));
    let (comm, assoc) = locality_and_associativity(&ctx, opts);
    report.push(comm);
    report.push(assoc);
    report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

pub(crate) fn identity(ctx: &Ctx) -> CheckRecord {
    let vac = ctx.alg.vacuum();
    let items = ctx
        .basis
        .par_iter()
        .map(|(wv, v)| -> Outcome {
            let vv = Vector::basis(v.clone());
            for n in mode_range(ctx.alg, Weight::ZERO, *wv, ctx.cutoff) {
                let got = ctx.src.mode(&vac, n, &vv)?;
                let want = if n == -1 { vv.clone() } else { Vector::zero() };
                if got != want {
                    return Ok(Some(format!("1_{n} {} = {}", ctx.r(v), ctx.rv(&got))));
                }
            }
            Ok(None)
        })
        .collect();
    tally_all("identity", items)
}

/// `Y(u, z)𝟏` from the residue formula is regular at `z = 0` with value `u`.
fn creation(ctx: &Ctx) -> CheckRecord {
    let vac = ctx.alg.vacuum();
    let items = ctx
        .basis
        .par_iter()
        .map(|(_, u)| -> Outcome {
            let want = ctx.alg.value(u)?;
            let vals = matrix_elements(ctx.alg, &ctx.bras, u, &vac)?;
            for (bra, val) in ctx.bras.iter().zip(vals) {
                let Some(poly) = val.as_laurent() else {
                    return Ok(Some(format!(
                        "⟨{}', Y({}, z)1⟩ = {val} has poles",
                        ctx.rv(bra),
                        ctx.r(u)
                    )));
                };
                if let Some(zi) = poly.var_index("z") {
                    if poly.min_exp(zi).is_some_and(|e| e < 0) {
                        return Ok(Some(format!(
                            "⟨{}', Y({}, z)1⟩ = {val} is singular",
                            ctx.rv(bra),
                            ctx.r(u)
                        )));
                    }
                }
                let c = z_coeff(&val, 0)?;
                if c != bra.pair(&want) {
                    return Ok(Some(format!("⟨{}', Y({}, z)1⟩ at z = 0 is {c}", ctx.rv(bra), ctx.r(u))));
                }
            }
            Ok(None)
        })
        .collect();
    tally_all("creation", items)
}

/// The residue formula and the memoized mode table give the same modes.
fn residue_agreement(ctx: &Ctx, window: Weight) -> CheckRecord {
    let items = ctx
        .pairs()
        .into_par_iter()
        .filter(|&(i, j)| ctx.basis[i].0 + ctx.basis[j].0 <= window)
        .map(|(i, j)| -> Outcome {
            let (wu, u) = &ctx.basis[i];
            let (wv, v) = &ctx.basis[j];
            let vv = Vector::basis(v.clone());
            let uu = Vector::basis(u.clone());
            let vals = matrix_elements(ctx.alg, &ctx.bras, u, &vv)?;
            let mut by_n: BTreeMap<i32, Vector> = BTreeMap::new();
            for ((wb, _), (bra, val)) in ctx.basis.iter().zip(ctx.bras.iter().zip(vals)) {
                let Some(n) = (*wu + *wv - *wb).to_int().map(|x| x - 1) else {
                    if !val.is_zero() {
                        return Ok(Some(format!(
                            "⟨{}', Y({}, z){}⟩ breaks parity",
                            ctx.rv(bra),
                            ctx.r(u),
                            ctx.r(v)
                        )));
                    }
                    continue;
                };
                let got = z_coeff(&val, -n - 1)?;
                let tab = by_n.entry(n).or_insert(ctx.src.mode(&uu, n, &vv)?);
                if got != bra.pair(tab) {
                    return Ok(Some(format!(
                        "⟨{}', {}_{n} {}⟩: residues give {got}, table gives {}",
                        ctx.rv(bra),
                        ctx.r(u),
                        ctx.r(v),
                        bra.pair(tab)
                    )));
                }
            }
            Ok(None)
        })
        .collect();
    tally_all("residue formula = mode table", items)
}

/// `(L(-1)u)_n = -n u_{n-1}` and `[L(-1), u_n] = -n u_{n-1}`.
pub(crate) fn derivative(ctx: &Ctx) -> CheckRecord {
    let items = ctx
        .pairs()
        .into_par_iter()
        .map(|(i, j)| -> Outcome {
            let (wu, u) = &ctx.basis[i];
            let (wv, v) = &ctx.basis[j];
            let uu = Vector::basis(u.clone());
            let vv = Vector::basis(v.clone());
            let du = ctx.alg.lminus1(&uu)?;
            let dv = ctx.alg.lminus1(&vv)?;
            for n in mode_range(ctx.alg, *wu + Weight::ONE, *wv, ctx.cutoff) {
                let lower = ctx.src.mode(&uu, n - 1, &vv)?.scale(&Scalar::from(-n as i64));
                let lhs = ctx.src.mode(&du, n, &vv)?;
                if lhs != lower {
                    return Ok(Some(format!(
                        "(L(-1){})_{n} {} ≠ {}",
                        ctx.r(u),
                        ctx.r(v),
                        ctx.rv(&lower)
                    )));
                }
                let comm = ctx
                    .alg
                    .lminus1(&ctx.src.mode(&uu, n - 1, &vv)?)?
                    .sub(&ctx.src.mode(&uu, n - 1, &dv)?);
                let want = ctx.src.mode(&uu, n - 2, &vv)?.scale(&Scalar::from(-(n - 1) as i64));
                if comm != want {
                    return Ok(Some(format!(
                        "[L(-1), {}_{}] {} ≠ {}",
                        ctx.r(u),
                        n - 1,
                        ctx.r(v),
                        ctx.rv(&want)
                    )));
                }
            }
            Ok(None)
        })
        .collect();
    tally_all("L(-1)-derivative", items)
}

/// `u_n` maps weight `m` to `m + wt u - n - 1`.
pub(crate) fn homogeneity(ctx: &Ctx) -> CheckRecord {
    let alpha = ctx.alg.alphabet();
    let items = ctx
        .pairs()
        .into_par_iter()
        .map(|(i, j)| -> Outcome {
            let (wu, u) = &ctx.basis[i];
            let (wv, v) = &ctx.basis[j];
            let uu = Vector::basis(u.clone());
            let vv = Vector::basis(v.clone());
            for n in mode_range(ctx.alg, *wu, *wv, ctx.cutoff) {
                let out = ctx.src.mode(&uu, n, &vv)?;
                let want = *wu + *wv - Weight::int(n + 1);
                let l0 = ctx.alg.l0(&out);
                if l0 != out.scale(&want.to_scalar()) || out.weight(alpha).is_some_and(|w| w != want) {
                    return Ok(Some(format!(
                        "{}_{n} {} = {} is not of weight {want}",
                        ctx.r(u),
                        ctx.r(v),
                        ctx.rv(&out)
                    )));
                }
            }
            Ok(None)
        })
        .collect();
    tally_all("L(0)-grading", items)
}

/// `u_n v = ε Σ_j (-1)^{n+j+1} L(-1)^j/j! v_{n+j} u`.
pub(crate) fn skew_symmetry(ctx: &Ctx) -> CheckRecord {
    let items = ctx
        .pairs()
        .into_par_iter()
        .map(|(i, j)| -> Outcome {
            let (wu, u) = &ctx.basis[i];
            let (wv, v) = &ctx.basis[j];
            let uu = Vector::basis(u.clone());
            let vv = Vector::basis(v.clone());
            let eps = Scalar::from(Parity::koszul(wu.parity(), wv.parity()));
            for n in mode_range(ctx.alg, *wu, *wv, ctx.cutoff) {
                let lhs = ctx.src.mode(&uu, n, &vv)?;
                let mut rhs = Vector::zero();
                let top = (*wu + *wv - Weight::int(n + 1)).floor();
                for jj in 0..=top.max(0) {
                    let mut t = ctx.src.mode(&vv, n + jj, &uu)?;
                    if t.is_zero() {
                        continue;
                    }
                    for _ in 0..jj {
                        t = ctx.alg.lminus1(&t)?;
                    }
                    let c = &(&Scalar::sign((n + jj + 1) as i64) * &Scalar::factorial_inv(jj as u32)) * &eps;
                    rhs.add_scaled(&t, &c);
                }
                if lhs != rhs {
                    return Ok(Some(format!(
                        "{}_{n} {} = {} but skew-symmetry gives {}",
                        ctx.r(u),
                        ctx.r(v),
                        ctx.rv(&lhs),
                        ctx.rv(&rhs)
                    )));
                }
            }
            Ok(None)
        })
        .collect();
    tally_all("skew-symmetry", items)
}

pub(crate) fn locality_and_associativity(ctx: &Ctx, opts: &SuiteOptions) -> (CheckRecord, CheckRecord) {
    let n = ctx.basis.len();
    let mut triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
        .collect();
    if let Some(k) = opts.sample {
        if k < triples.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            triples.shuffle(&mut rng);
            triples.truncate(k);
            triples.sort();
        }
    }
    let window = opts.assoc_window.unwrap_or(opts.cutoff);
    let results: Vec<(Outcome, Outcome)> = triples
        .into_par_iter()
        .map(|(a, b, c)| triple(ctx, a, b, c, window))
        .collect();
    let mut comm = CheckRecord::new("commutativity");
    let mut assoc = CheckRecord::new("associativity");
    for (x, y) in results {
        tally(&mut comm, x);
        tally(&mut assoc, y);
    }
    (comm, assoc)
}

type Coeffs = BTreeMap<(i32, i32), Scalar>;

/// `R(⟨bra, Y(u1, z1)Y(u2, z2)v⟩)` for every bra, in both orders.
fn correlators(
    ctx: &Ctx,
    a: usize,
    b: usize,
    c: usize,
) -> Result<(
    Vec<crate::correlator::CorrelatorResult>,
    Result<Vec<crate::correlator::CorrelatorResult>>,
)> {
    let f1 = StateField::new(ctx.src, Vector::basis(ctx.basis[a].1.clone()))?;
    let f2 = StateField::new(ctx.src, Vector::basis(ctx.basis[b].1.clone()))?;
    let vv = Vector::basis(ctx.basis[c].1.clone());
    let r12 = compute_many(
        ctx.alg,
        &ctx.bras,
        &[
            Insertion::new(&f1 as &dyn Field, "z1"),
            Insertion::new(&f2 as &dyn Field, "z2"),
        ],
        &vv,
    )?;
    let r21 = compute_many(
        ctx.alg,
        &ctx.bras,
        &[
            Insertion::new(&f2 as &dyn Field, "z2"),
            Insertion::new(&f1 as &dyn Field, "z1"),
        ],
        &vv,
    );
    Ok((r12, r21))
}

/// For each bra, the coefficients of `z0^e0 z2^e2` (with `e0 ≤` the window
/// bound) of the correlator expanded after `z1 = z0 + z2` in the region
/// `|z2| > |z0|`, and the same coefficients computed from the iterates
/// `⟨bra, Y((u1)_n u2, z2)v⟩`.
fn associativity_coeffs(
    ctx: &Ctx,
    r12: &[crate::correlator::CorrelatorResult],
    a: usize,
    b: usize,
    c: usize,
    window: Weight,
) -> Result<Vec<(Coeffs, Coeffs)>> {
    let (w1, u1) = &ctx.basis[a];
    let (w2, u2) = &ctx.basis[b];
    let (wv, v) = &ctx.basis[c];
    let u1v = Vector::basis(u1.clone());
    let u2v = Vector::basis(u2.clone());
    let vv = Vector::basis(v.clone());
    // states (u1)_n u2 of weight ≤ window, keyed by the z0 exponent -n-1
    let mut states: BTreeMap<i32, Vector> = BTreeMap::new();
    let total = *w1 + *w2;
    let e0_max = (window - total).floor();
    let e0_min = match ctx.alg.min_weight(total.parity()) {
        Some(w) => (w - total).floor(),
        None => e0_max + 1,
    };
    for e0 in e0_min..=e0_max {
        states.insert(e0, ctx.src.mode(&u1v, -e0 - 1, &u2v)?);
    }
    let shift: BTreeMap<String, ShiftTarget> = [("z1".to_string(), ShiftTarget::sum("z0", "z2"))].into();
    let order = ["z2", "z0"];
    let mut out = Vec::with_capacity(r12.len());
    for (((wb, _), bra), r) in ctx.basis.iter().zip(&ctx.bras).zip(r12) {
        let mut got = Coeffs::new();
        if !r.value.is_zero() {
            let s = r.value.substitute_shift(&shift)?;
            if !s.is_zero() {
                let d = s.homogeneous_degree().ok_or_else(|| Error::Invariant {
                    invariant: "homogeneous correlator".into(),
                    detail: format!("{} is not homogeneous", r.value),
                })?;
                let series = s.expand_region_through(&order, d as i64 + e0_max as i64);
                let i0 = series.var_index("z0");
                let i2 = series.var_index("z2");
                for (e, c) in series.terms() {
                    let x0 = i0.map_or(0, |k| e[k]);
                    let x2 = i2.map_or(0, |k| e[k]);
                    got.insert((x0, x2), c.clone());
                }
            }
        }
        let mut want = Coeffs::new();
        for (&e0, st) in &states {
            if st.is_zero() {
                continue;
            }
            let m = total + Weight::int(e0);
            let Some(p) = (m + *wv - *wb).to_int().map(|x| x - 1) else {
                continue;
            };
            let val = bra.pair(&ctx.src.mode(st, p, &vv)?);
            if !val.is_zero() {
                want.insert((e0, -p - 1), val);
            }
        }
        out.push((got, want));
    }
    Ok(out)
}

/// Commutativity and associativity for one `(u1, u2, v)` against every bra.
fn triple(ctx: &Ctx, a: usize, b: usize, c: usize, window: Weight) -> (Outcome, Outcome) {
    let (r12, r21) = match correlators(ctx, a, b, c) {
        Ok(x) => x,
        Err(e) => {
            let again = dup(&e);
            return (Err(e), Err(again));
        }
    };
    let (w1, u1) = &ctx.basis[a];
    let (w2, u2) = &ctx.basis[b];
    let v = &ctx.basis[c].1;
    let label = || format!("u1 = {}, u2 = {}, v = {}", ctx.r(u1), ctx.r(u2), ctx.r(v));
    let comm: Outcome = (|| {
        let r21 = r21?;
        let eps = Scalar::from(Parity::koszul(w1.parity(), w2.parity()));
        for ((bra, x), y) in ctx.bras.iter().zip(&r12).zip(&r21) {
            if !x.value.equal(&y.value.scale(&eps)) {
                return Ok(Some(format!(
                    "{}, bra {}: {} vs {}",
                    label(),
                    ctx.rv(bra),
                    x.value,
                    y.value.scale(&eps)
                )));
            }
        }
        Ok(None)
    })();
    let assoc: Outcome = (|| {
        for (bra, (got, want)) in ctx.bras.iter().zip(associativity_coeffs(ctx, &r12, a, b, c, window)?) {
            if got != want {
                let diff = got
                    .iter()
                    .find(|(k, c)| want.get(*k) != Some(*c))
                    .map(|(k, _)| *k)
                    .or_else(|| want.keys().find(|k| !got.contains_key(*k)).copied())
                    .unwrap();
                return Ok(Some(format!(
                    "{}, bra {}: coefficient of z0^{} z2^{} is {} from the correlator, {} from iterates",
                    label(),
                    ctx.rv(bra),
                    diff.0,
                    diff.1,
                    got.get(&diff).cloned().unwrap_or_else(Scalar::zero),
                    want.get(&diff).cloned().unwrap_or_else(Scalar::zero)
                )));
            }
        }
        Ok(None)
    })();
    (comm, assoc)
}

/// The constant `λ` with product expansion = `λ` · iterate expansion, taken
/// over the given basis triples; fails when no single constant fits.
pub(crate) fn lambda_check(
    ctx: &Ctx,
    triples: &[(usize, usize, usize)],
    window: Weight,
) -> (CheckRecord, Option<Scalar>) {
    let per: Vec<Result<Vec<(Coeffs, Coeffs)>>> = triples
        .par_iter()
        .map(|&(a, b, c)| {
            let (r12, _) = correlators(ctx, a, b, c)?;
            associativity_coeffs(ctx, &r12, a, b, c, window)
        })
        .collect();
    let mut rec = CheckRecord::new("associativity constant λ");
    let mut lambda: Option<Scalar> = None;
    for (&(a, b, c), r) in triples.iter().zip(per) {
        let outcome: Outcome = r.map(|maps| {
            for (got, want) in maps {
                for key in got.keys().chain(want.keys()) {
                    let g = got.get(key).cloned().unwrap_or_else(Scalar::zero);
                    let w = want.get(key).cloned().unwrap_or_else(Scalar::zero);
                    if lambda.is_none() && !w.is_zero() {
                        lambda = Some(&g * &w.inv().expect("nonzero"));
                    }
                    let l = lambda.clone().unwrap_or_else(Scalar::zero);
                    if g != &l * &w {
                        return Some(format!(
                            "u1 = {}, u2 = {}, v = {}: z0^{} z2^{} gives {g} against {w}",
                            ctx.r(&ctx.basis[a].1),
                            ctx.r(&ctx.basis[b].1),
                            ctx.r(&ctx.basis[c].1),
                            key.0,
                            key.1
                        ));
                    }
                }
            }
            None
        });
        tally(&mut rec, outcome);
    }
    match &lambda {
        Some(l) => rec = rec.with_value(format!("lambda = {l}")),
        None => rec.fail("no nonzero coefficient to compare"),
    }
    (rec, lambda)
}

/// A copy of an error for reporting it under two checks.
fn dup(e: &Error) -> Error {
    match e {
        Error::BeyondCutoff { weight, cutoff } => Error::BeyondCutoff {
            weight: weight.clone(),
            cutoff: cutoff.clone(),
        },
        other => Error::Precondition(other.to_string()),
    }
}

pub struct ConformalOutcome {
    pub report: Report,
    pub central_charge: Option<Scalar>,
}

/// Check that `ω` generates a Virasoro action with `ω_0 = L(-1)` and
/// `ω_1 = L(0)`, and read off its central charge.
pub fn conformal_check(alg: &ModeAlgebra, omega: &Vector, cutoff: Weight) -> Result<ConformalOutcome> {
    let alpha = alg.alphabet();
    if omega.weight(alpha) != Some(Weight::int(2)) {
        return Err(Error::Precondition(format!(
            "conformal vector candidate {} is not of weight 2",
            omega.render(alpha)
        )));
    }
    let table = VertexTable::new(alg);
    let ctx = Ctx::new(&table, cutoff);
    let mut report = Report::new(format!("conformal vector {} in {}", omega.render(alpha), alg.name()));
    let mode = |n: i32, v: &Vector| ctx.src.mode(omega, n, v);

    let items = ctx
        .basis
        .par_iter()
        .map(|(w, v)| -> Outcome {
            let vv = Vector::basis(v.clone());
            if *w + Weight::ONE <= cutoff {
                let a = mode(0, &vv)?;
                let b = alg.lminus1(&vv)?;
                if a != b {
                    return Ok(Some(format!(
                        "ω_0 {} = {} but L(-1) gives {}",
                        ctx.r(v),
                        ctx.rv(&a),
                        ctx.rv(&b)
                    )));
                }
            }
            let a = mode(1, &vv)?;
            if a != alg.l0(&vv) {
                return Ok(Some(format!("ω_1 {} = {}", ctx.r(v), ctx.rv(&a))));
            }
            Ok(None)
        })
        .collect();
    report.push(tally_all("ω_0 = L(-1), ω_1 = L(0)", items));

    let mut rec = CheckRecord::new("ω_n ω");
    let mut c = None;
    let products: Result<Vec<(i32, Vector)>> = (-1..=6).map(|n| Ok((n, mode(n, omega)?))).collect();
    match products {
        Err(e) => tally(&mut rec, Err(e)),
        Ok(products) => {
            for (n, got) in products {
                let want = match n {
                    -1 => continue,
                    0 => alg.lminus1(omega),
                    1 => Ok(omega.scale(&Scalar::from(2))),
                    3 => {
                        let k = Vector::vacuum().pair(&got);
                        c = Some(&k * &Scalar::from(2));
                        Ok(Vector::vacuum().scale(&k))
                    }
                    _ => Ok(Vector::zero()),
                };
                tally(
                    &mut rec,
                    want.map(|want| (got != want).then(|| format!("ω_{n} ω = {}", got.render(alpha)))),
                );
            }
        }
    }
    if let Some(c) = &c {
        rec = rec.with_value(format!("c = {c}"));
    }
    report.push(rec);

    if let Some(c) = &c {
        report.push(virasoro_brackets(&ctx, omega, c));
    }
    Ok(ConformalOutcome {
        report,
        central_charge: c,
    })
}

/// `[L_m, L_n] = (m-n)L_{m+n} + c/12 (m^3-m) δ_{m+n,0}` with `L_m = ω_{m+1}`,
/// on basis states whose images stay inside the cutoff.
fn virasoro_brackets(ctx: &Ctx, omega: &Vector, c: &Scalar) -> CheckRecord {
    let items = ctx
        .basis
        .par_iter()
        .map(|(w, v)| -> Outcome {
            let vv = Vector::basis(v.clone());
            let l = |m: i32, x: &Vector| ctx.src.mode(omega, m + 1, x);
            for m in -2..=2 {
                for n in -2..=2 {
                    if [m, n, m + n].iter().any(|&k| *w - Weight::int(k) > ctx.cutoff) {
                        continue;
                    }
                    let lhs = l(m, &l(n, &vv)?)?.sub(&l(n, &l(m, &vv)?)?);
                    let mut rhs = l(m + n, &vv)?.scale(&Scalar::from((m - n) as i64));
                    if m + n == 0 {
                        let k = &(c * &Scalar::from((m * m * m - m) as i64)) * &Scalar::ratio(1, 12);
                        rhs.add_scaled(&vv, &k);
                    }
                    if lhs != rhs {
                        return Ok(Some(format!("[L_{m}, L_{n}] {} = {}", ctx.r(v), ctx.rv(&lhs))));
                    }
                }
            }
            Ok(None)
        })
        .collect();
    tally_all("Virasoro brackets", items)
}

/// Check a candidate `L(1)` against `[L(-1), L(1)] = -2L(0)` and
/// `[L(1), v_n] = (L(1)v)_n + (2 wt v - n - 2) v_{n+1}`.
pub fn quasi_check<F>(alg: &ModeAlgebra, l1: F, cutoff: Weight) -> Result<Report>
where
    F: Fn(&Vector) -> Result<Vector> + Sync,
{
    let table = VertexTable::new(alg);
    let ctx = Ctx::new(&table, cutoff);
    let mut report = Report::new(format!("L(1) for {} up to weight {cutoff}", alg.name()));
    for rec in l1_checks(&ctx, &l1) {
        report.push(rec);
    }
    Ok(report)
}

pub(crate) fn l1_checks(ctx: &Ctx, l1: &(dyn Fn(&Vector) -> Result<Vector> + Sync)) -> Vec<CheckRecord> {
    let alg = ctx.alg;
    let cutoff = ctx.cutoff;
    let items = ctx
        .basis
        .par_iter()
        .filter(|(w, _)| *w + Weight::ONE <= cutoff)
        .map(|(_, v)| -> Outcome {
            let vv = Vector::basis(v.clone());
            let lhs = alg.lminus1(&l1(&vv)?)?.sub(&l1(&alg.lminus1(&vv)?)?);
            let want = alg.l0(&vv).scale(&Scalar::from(-2));
            Ok((lhs != want).then(|| format!("[L(-1), L(1)] {} = {}", ctx.r(v), ctx.rv(&lhs))))
        })
        .collect();
    let first = tally_all("[L(-1), L(1)] = -2L(0)", items);

    let items = ctx
        .pairs()
        .into_par_iter()
        .map(|(i, j)| -> Outcome {
            let (wv, v) = &ctx.basis[i];
            let (ww, w) = &ctx.basis[j];
            let vv = Vector::basis(v.clone());
            let wvec = Vector::basis(w.clone());
            let lv = l1(&vv)?;
            let lw = l1(&wvec)?;
            for n in mode_range(alg, *wv, *ww, cutoff) {
                let lhs = l1(&ctx.src.mode(&vv, n, &wvec)?)?.sub(&ctx.src.mode(&vv, n, &lw)?);
                let coef = Scalar::from((wv.twice() - n - 2) as i64);
                let mut rhs = ctx.src.mode(&lv, n, &wvec)?;
                rhs.add_scaled(&ctx.src.mode(&vv, n + 1, &wvec)?, &coef);
                if lhs != rhs {
                    return Ok(Some(format!(
                        "[L(1), {}_{n}] {} = {} but expected {}",
                        ctx.r(v),
                        ctx.r(w),
                        ctx.rv(&lhs),
                        ctx.rv(&rhs)
                    )));
                }
            }
            Ok(None)
        })
        .collect();
    vec![first, tally_all("[L(1), v_n]", items)]
}

/// For a linear relation `Σ λ_p value(w_p) = 0`, check that the residue
/// formula gives `Σ λ_p ⟨bra, Y(w_p, z) ket⟩ = 0` on every sample pair.
pub fn well_definedness_check(
    alg: &ModeAlgebra,
    relation: &[(Scalar, Word)],
    samples: &[(DualVector, Vector)],
) -> Result<CheckRecord> {
    let alpha = alg.alphabet();
    let mut total = Vector::zero();
    for (c, w) in relation {
        total.add_scaled(&alg.value(w)?, c);
    }
    let show = relation
        .iter()
        .map(|(c, w)| format!("({c}) {}", alpha.render(w)))
        .collect::<Vec<_>>()
        .join(" + ");
    if !total.is_zero() {
        return Err(Error::Precondition(format!(
            "{show} is not a relation: it equals {}",
            total.render(alpha)
        )));
    }
    let items = samples
        .par_iter()
        .map(|(bra, ket)| -> Outcome {
            let mut sum = crate::ratcalc::SpecialRational::zero();
            for (c, w) in relation {
                sum = sum.add(&matrix_element(alg, bra, w, ket)?.scale(c));
            }
            let sum = sum.cancel();
            Ok((!sum.is_zero())
                .then(|| format!("⟨{}', Y({show}, z) {}⟩ = {sum}", bra.render(alpha), ket.render(alpha))))
        })
        .collect();
    let mut rec = tally_all("well-definedness", items);
    rec.value = Some(show);
    Ok(rec)
}
