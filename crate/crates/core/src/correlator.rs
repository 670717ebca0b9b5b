//! Exact correlation functions `R(⟨v', f_1(z_1)···f_k(z_k) v⟩)` by
//! denominator clearing and finite coefficient reconstruction.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graded::{DualVector, Parity, Vector, Weight, Word};
use crate::modealg::ModeAlgebra;
use crate::ratcalc::{make_vars, LaurentPoly, Scalar, SpecialRational, Vars};

/// A field that can be inserted into a correlator: anything with
/// weight-homogeneous modes.
pub trait Field: Send + Sync {
    fn weight(&self) -> Weight;

    fn parity(&self) -> Parity {
        self.weight().parity()
    }

    /// The generator index when this is a generating field.
    fn generator(&self) -> Option<u16> {
        None
    }

    /// The mode `f_n`, the coefficient of `z^{-n-1}`.
    fn mode(&self, n: i32, v: &Vector) -> Result<Vector>;
}

/// The generating field `φ^i(z)` of a mode algebra.
pub struct GeneratorField<'a> {
    alg: &'a ModeAlgebra,
    gen: u16,
}

impl<'a> GeneratorField<'a> {
    pub fn new(alg: &'a ModeAlgebra, gen: u16) -> Self {
        GeneratorField { alg, gen }
    }
}

impl Field for GeneratorField<'_> {
    fn weight(&self) -> Weight {
        self.alg.gen_weight(self.gen)
    }

    fn generator(&self) -> Option<u16> {
        Some(self.gen)
    }

    fn mode(&self, n: i32, v: &Vector) -> Result<Vector> {
        self.alg.mode_act(self.gen, n, v)
    }
}

/// A field placed at a named variable.
#[derive(Clone, Copy)]
pub struct Insertion<'a> {
    pub field: &'a dyn Field,
    pub var: &'a str,
}

impl<'a> Insertion<'a> {
    pub fn new(field: &'a dyn Field, var: &'a str) -> Self {
        Insertion { field, var }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorResult {
    pub value: SpecialRational,
    /// Clearing exponent used for each insertion pair `(p, q)`, `p < q`.
    pub clearing: BTreeMap<(usize, usize), u32>,
    /// Per-variable exponent bounds of the cleared polynomial, for the
    /// last homogeneous component computed.
    pub bounds: Vec<(i32, i32)>,
}

/// Clearing exponent for an insertion pair: the declared bound between two
/// generators, otherwise the weight bound `wt f + wt g - w_min`.
pub fn pair_locality(alg: &ModeAlgebra, f: &dyn Field, g: &dyn Field) -> u32 {
    if let (Some(i), Some(j)) = (f.generator(), g.generator()) {
        return alg.locality(i, j);
    }
    let total = f.weight() + g.weight();
    match alg.min_weight(total.parity()) {
        Some(w) => (total - w).to_int().unwrap_or(0).max(0) as u32,
        None => 0,
    }
}

/// Memo of partial vectors `f_j,n_j ··· f_k,n_k v` keyed by the suffix of
/// mode indices, shared by every bra of one computation.
struct Partials<'a> {
    fields: Vec<&'a dyn Field>,
    ket: Rc<Vector>,
    memo: HashMap<Vec<i32>, Rc<Vector>>,
}

impl<'a> Partials<'a> {
    fn get(&mut self, modes: &[i32]) -> Result<Rc<Vector>> {
        if modes.is_empty() {
            return Ok(self.ket.clone());
        }
        if let Some(v) = self.memo.get(modes) {
            return Ok(v.clone());
        }
        let k = self.fields.len();
        let j = k - modes.len();
        let inner = self.get(&modes[1..])?;
        let v = if inner.is_zero() {
            inner
        } else {
            Rc::new(self.fields[j].mode(modes[0], &inner)?)
        };
        self.memo.insert(modes.to_vec(), v.clone());
        Ok(v)
    }
}

struct Plan {
    vars: Vars,
    /// position of insertion `l` in the sorted variable list
    slot: Vec<usize>,
    clearing: BTreeMap<(usize, usize), u32>,
    clear_poly: Vec<(Vec<i32>, Scalar)>,
}

fn plan(alg: &ModeAlgebra, ins: &[Insertion]) -> Result<Plan> {
    let names: Vec<&str> = ins.iter().map(|i| i.var).collect();
    let vars = make_vars(&names);
    if vars.len() != ins.len() {
        return Err(Error::Precondition("insertion variables must be distinct".into()));
    }
    let slot: Vec<usize> = names
        .iter()
        .map(|n| vars.iter().position(|v| v == n).unwrap())
        .collect();
    let k = ins.len();
    let mut clearing = BTreeMap::new();
    let mut clear = LaurentPoly::constant_in(vars.clone(), Scalar::one());
    for p in 0..k {
        for q in p + 1..k {
            let n = pair_locality(alg, ins[p].field, ins[q].field);
            clearing.insert((p, q), n);
            if n > 0 {
                let diff = LaurentPoly::var(ins[p].var)
                    .sub(&LaurentPoly::var(ins[q].var))
                    .with_vars(&vars);
                clear = clear.mul(&diff.pow(n));
            }
        }
    }
    // exponent vectors in insertion order
    let clear_poly = clear
        .terms()
        .map(|(e, c)| ((0..k).map(|l| e[slot[l]]).collect(), c.clone()))
        .collect();
    Ok(Plan {
        vars,
        slot,
        clearing,
        clear_poly,
    })
}

/// All integer vectors with `lo ≤ e ≤ hi` componentwise and `Σ e = total`.
fn box_points(lo: &[i32], hi: &[i32], total: i32) -> Vec<Vec<i32>> {
    fn rec(l: usize, lo: &[i32], hi: &[i32], rest: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        let k = lo.len();
        if l == k - 1 {
            if rest >= lo[l] && rest <= hi[l] {
                cur.push(rest);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let min_tail: i32 = lo[l + 1..].iter().sum();
        let max_tail: i32 = hi[l + 1..].iter().sum();
        for e in lo[l]..=hi[l] {
            let r = rest - e;
            if r < min_tail || r > max_tail {
                continue;
            }
            cur.push(e);
            rec(l + 1, lo, hi, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return out;
    }
    rec(0, lo, hi, total, &mut Vec::new(), &mut out);
    out
}

struct Component<'b> {
    bra: &'b DualVector,
    bra_wt: Weight,
}

/// A correlator with the exponent box it was reconstructed from.
type Boxed = (SpecialRational, Vec<(i32, i32)>);

/// Compute for homogeneous `ket` against several homogeneous bras.
fn compute_homogeneous(
    alg: &ModeAlgebra,
    plan: &Plan,
    bras: &[Component],
    ins: &[Insertion],
    ket: &Vector,
    ket_wt: Weight,
) -> Result<Vec<Boxed>> {
    let k = ins.len();
    let mut partials = Partials {
        fields: ins.iter().map(|i| i.field).collect(),
        ket: Rc::new(ket.clone()),
        memo: HashMap::new(),
    };
    let mut out = Vec::with_capacity(bras.len());
    for comp in bras {
        let zero = (SpecialRational::zero(), vec![]);
        let total_w = comp.bra_wt - ket_wt - ins.iter().fold(Weight::ZERO, |a, i| a + i.field.weight());
        let Some(phi_deg) = total_w.to_int() else {
            out.push(zero);
            continue;
        };
        let mut lo = Vec::with_capacity(k);
        let mut hi = Vec::with_capacity(k);
        let mut empty = false;
        for (l, inl) in ins.iter().enumerate() {
            let wf = inl.field.weight();
            let nsum: u32 = (0..k)
                .filter(|&q| q != l)
                .map(|q| plan.clearing[&(l.min(q), l.max(q))])
                .sum();
            let wl = alg.min_weight((wf + ket_wt).parity());
            let wu = alg.min_weight((comp.bra_wt - wf).parity());
            match (wl, wu) {
                (Some(a), Some(b)) => {
                    lo.push((a - wf - ket_wt).to_int().unwrap());
                    hi.push((comp.bra_wt - wf - b).to_int().unwrap() + nsum as i32);
                }
                _ => empty = true,
            }
        }
        if empty {
            out.push(zero);
            continue;
        }
        let nsum_all: u32 = plan.clearing.values().sum();
        let degree = phi_deg + nsum_all as i32;
        // Φ support filters: last variable from below, first from above
        let phi_lo_last = lo[k - 1];
        let phi_hi_first = hi[0] - (1..k).map(|q| plan.clearing[&(0, q)]).sum::<u32>() as i32;

        let coeff = |e: &[i32], partials: &mut Partials| -> Result<Scalar> {
            let mut acc = Scalar::zero();
            for (ce, c) in &plan.clear_poly {
                let f: Vec<i32> = e.iter().zip(ce).map(|(a, b)| a - b).collect();
                if f[k - 1] < phi_lo_last || f[0] > phi_hi_first {
                    continue;
                }
                let modes: Vec<i32> = f.iter().map(|x| -x - 1).collect();
                let v = partials.get(&modes)?;
                let p = comp.bra.pair(&v);
                if !p.is_zero() {
                    acc += &(c * &p);
                }
            }
            Ok(acc)
        };

        let mut poly = LaurentPoly::zero_in(plan.vars.clone());
        for e in box_points(&lo, &hi, degree) {
            let c = coeff(&e, &mut partials)?;
            if !c.is_zero() {
                let mut ex = vec![0; k];
                for l in 0..k {
                    ex[plan.slot[l]] = e[l];
                }
                poly.add_term(ex.into_boxed_slice(), c);
            }
        }
        // guard shell: the box grown by one in every direction, minus the box
        let glo: Vec<i32> = lo.iter().map(|x| x - 1).collect();
        let ghi: Vec<i32> = hi.iter().map(|x| x + 1).collect();
        for e in box_points(&glo, &ghi, degree) {
            let Some(l) = (0..k).find(|&l| e[l] < lo[l] || e[l] > hi[l]) else {
                continue;
            };
            let c = coeff(&e, &mut partials)?;
            if !c.is_zero() {
                let q = (0..k).find(|&q| q != l).unwrap_or(l);
                return Err(Error::LocalityTooSmall {
                    p: l.min(q) + 1,
                    q: l.max(q) + 1,
                    detail: format!(
                        "cleared coefficient at exponents {e:?} is {c}, outside the bound for `{}`",
                        ins[l].var
                    ),
                });
            }
        }
        let forms: Vec<(BTreeMap<String, i64>, i32)> = plan
            .clearing
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(&(p, q), &n)| {
                let mut m = BTreeMap::new();
                m.insert(ins[p].var.to_string(), 1);
                m.insert(ins[q].var.to_string(), -1);
                (m, n as i32)
            })
            .collect();
        let value = SpecialRational::from_parts(poly, &forms)?.cancel();
        out.push((value, lo.into_iter().zip(hi).collect()));
    }
    Ok(out)
}

/// `R(⟨bra, f_1(z_1)···f_k(z_k) ket⟩)` for each bra, sharing all mode
/// computations. Inhomogeneous bras and kets are split by weight.
pub fn compute_many(
    alg: &ModeAlgebra,
    bras: &[DualVector],
    ins: &[Insertion],
    ket: &Vector,
) -> Result<Vec<CorrelatorResult>> {
    let plan = plan(alg, ins)?;
    let alpha = alg.alphabet();
    let mut results: Vec<CorrelatorResult> = bras
        .iter()
        .map(|_| CorrelatorResult {
            value: SpecialRational::zero(),
            clearing: plan.clearing.clone(),
            bounds: vec![],
        })
        .collect();
    if ins.is_empty() {
        for (r, b) in results.iter_mut().zip(bras) {
            r.value = SpecialRational::constant(b.pair(ket));
        }
        return Ok(results);
    }
    let bra_parts: Vec<BTreeMap<Weight, Vector>> = bras.iter().map(|b| b.by_weight(alpha)).collect();
    for (kw, kpart) in ket.by_weight(alpha) {
        let mut comps = Vec::new();
        let mut owners = Vec::new();
        for (bi, parts) in bra_parts.iter().enumerate() {
            for (bw, bpart) in parts {
                comps.push(Component {
                    bra: bpart,
                    bra_wt: *bw,
                });
                owners.push(bi);
            }
        }
        let vals = compute_homogeneous(alg, &plan, &comps, ins, &kpart, kw)?;
        for ((val, bounds), bi) in vals.into_iter().zip(owners) {
            if !val.is_zero() {
                results[bi].value = results[bi].value.add(&val);
            }
            if !bounds.is_empty() {
                results[bi].bounds = bounds;
            }
        }
    }
    Ok(results)
}

pub fn compute(alg: &ModeAlgebra, bra: &DualVector, ins: &[Insertion], ket: &Vector) -> Result<CorrelatorResult> {
    Ok(compute_many(alg, std::slice::from_ref(bra), ins, ket)?.remove(0))
}

/// Sign of reordering insertions by `perm` (new position `p` holds old
/// insertion `perm[p]`): `-1` per transposed pair of odd fields.
pub fn permutation_sign(parities: &[Parity], perm: &[usize]) -> i64 {
    let mut sign = 1;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && parities[perm[a]].is_odd() && parities[perm[b]].is_odd() {
                sign = -sign;
            }
        }
    }
    sign
}

/// `R(original) = ± R(permuted)` with the parity sign.
pub fn permutation_check(
    alg: &ModeAlgebra,
    bra: &DualVector,
    ins: &[Insertion],
    ket: &Vector,
    perm: &[usize],
) -> Result<bool> {
    let orig = compute(alg, bra, ins, ket)?.value;
    let permuted: Vec<Insertion> = perm.iter().map(|&p| ins[p]).collect();
    let moved = compute(alg, bra, &permuted, ket)?.value;
    let parities: Vec<Parity> = ins.iter().map(|i| i.field.parity()).collect();
    let sign = Scalar::from(permutation_sign(&parities, perm));
    Ok(orig.equal(&moved.scale(&sign)))
}

/// Outcome of the locality-order search for a generator pair.
#[derive(Clone, Debug)]
pub struct LocalityOrder {
    pub order: u32,
    /// For `order > 0`: a basis pair and the nonzero polynomial
    /// `(z1-z2)^(order-1)[φ^i(z1)φ^j(z2) ∓ φ^j(z2)φ^i(z1)]` matrix element.
    pub witness_below: Option<(Word, Word, LaurentPoly)>,
}

/// Minimal `N` with `(z1-z2)^N [φ^i(z1), φ^j(z2)]_± = 0` on all basis pairs
/// up to `cutoff`, by direct mode sums. The formal bracket is in general an
/// infinite series, so it is sampled on a window reaching `ceiling + 3`
/// modes beyond the range where either ordering can first act nontrivially,
/// and the product is checked wherever the window determines it.
pub fn locality_order(alg: &ModeAlgebra, i: u16, j: u16, cutoff: Weight) -> Result<LocalityOrder> {
    let ceiling = 2 * ((alg.gen_weight(i) + alg.gen_weight(j)).floor().max(0) as u32) + 4;
    let space = alg.enumerate_basis(cutoff);
    let eps = Scalar::from(Parity::koszul(alg.gen_parity(i), alg.gen_parity(j)));
    let (wi, wj) = (alg.gen_weight(i), alg.gen_weight(j));
    let pad = ceiling as i32 + 3;
    // per basis pair: the bracket as coefficients indexed by m, with n = -s - m
    let mut series = Vec::new();
    for (kw, kword) in space.words() {
        let ket = Vector::basis(kword.clone());
        for (bw, bword) in space.words() {
            let Some(s) = (bw - kw - wi - wj + Weight::int(2)).to_int() else {
                continue;
            };
            let wmin = |w: Weight| alg.min_weight(w.parity());
            let n_max = wmin(kw + wj).map(|a| (kw + wj - a).floor() - 1);
            let m_max = wmin(kw + wi).map(|b| (kw + wi - b).floor() - 1);
            let (Some(n_max), Some(m_max)) = (n_max, m_max) else {
                continue;
            };
            let edge_a = -s - n_max;
            let lo = edge_a.min(m_max) - pad;
            let hi = edge_a.max(m_max) + pad;
            let bra = Vector::basis(bword.clone());
            let mut coeffs = BTreeMap::new();
            for m in lo..=hi {
                let n = -s - m;
                let pair = || -> Result<Scalar> {
                    let ab = alg.mode_act(i, m, &alg.mode_act(j, n, &ket)?)?;
                    let ba = alg.mode_act(j, n, &alg.mode_act(i, m, &ket)?)?;
                    Ok(bra.pair(&ab.sub(&ba.scale(&eps))))
                };
                // a file algebra cannot evaluate products through blocks above its cutoff
                match pair() {
                    Ok(c) => coeffs.insert(m, Some(c)),
                    Err(Error::BeyondCutoff { .. }) => coeffs.insert(m, None),
                    Err(e) => return Err(e),
                };
            }
            if coeffs.values().any(|c| c.as_ref().is_some_and(|c| !c.is_zero())) {
                series.push((bword.clone(), kword.clone(), s, lo, hi, coeffs));
            }
        }
    }
    let vars = make_vars(&["z1", "z2"]);
    let mut witness = None;
    for n in 0..=ceiling {
        let mut bad = None;
        for (b, k, s, lo, hi, coeffs) in &series {
            // (z1-z2)^n Σ_m c_m z1^{-m-1} z2^{m+s-1}: coefficient at z1^{-m-1+n}
            // is Σ_t C(n,t)(-1)^t c_{m+t}, determined when m..m+n is sampled
            let mut poly = LaurentPoly::zero_in(vars.clone());
            for m in *lo..=(*hi - n as i32) {
                if (0..=n as i32).any(|t| coeffs[&(m + t)].is_none()) {
                    continue;
                }
                let mut acc = Scalar::zero();
                for t in 0..=n as i64 {
                    let c = coeffs[&(m + t as i32)].as_ref().expect("sampled");
                    if !c.is_zero() {
                        acc += &(c * &(&Scalar::binomial(n as i64, t) * &Scalar::sign(t)));
                    }
                }
                if !acc.is_zero() {
                    poly.add_term(vec![-m - 1 + n as i32, m + s - 1].into_boxed_slice(), acc);
                }
            }
            if !poly.is_zero() {
                bad = Some((b.clone(), k.clone(), poly));
                break;
            }
        }
        match bad {
            None => {
                return Ok(LocalityOrder {
                    order: n,
                    witness_below: witness,
                })
            }
            Some(w) => witness = Some(w),
        }
    }
    Err(Error::NotLocal {
        i: alg.alphabet().name(i).to_string(),
        j: alg.alphabet().name(j).to_string(),
        ceiling,
        cutoff: cutoff.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_enumeration() {
        let pts = box_points(&[-1, 0], &[1, 2], 1);
        assert_eq!(pts, vec![vec![-1, 2], vec![0, 1], vec![1, 0]]);
        assert!(box_points(&[2], &[1], 0).is_empty());
    }

    #[test]
    fn permutation_signs() {
        let odd = [Parity::Odd; 3];
        assert_eq!(permutation_sign(&odd, &[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&odd, &[1, 2, 0]), 1);
        assert_eq!(permutation_sign(&[Parity::Even, Parity::Odd], &[1, 0]), 1);
    }
}
