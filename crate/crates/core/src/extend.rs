//! Extending a vertex operator algebra `V` by a module `W` to `V_e = V ⊕ W`:
//! invariant bilinear forms, the intertwining operators of types
//! `(W; W, V)` and `(V; W, W)`, and checks of the resulting vertex map.

use std::collections::{BTreeMap, HashMap};

use dashmap::DashMap;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graded::{GradedSpace, Parity, Vector, Weight, Word};
use crate::linalg::Matrix;
use crate::modealg::ModeAlgebra;
use crate::ratcalc::{LaurentPoly, Scalar, SpecialRational};
use crate::report::{CheckRecord, Report};
use crate::vertexop::{self, Ctx, ModeSource, Outcome, SuiteOptions, VertexTable};

/// A symmetric bilinear form on a graded space, stored as one Gram matrix
/// per weight block; distinct weights pair to zero.
#[derive(Clone, Debug)]
pub struct InvariantForm {
    space: GradedSpace,
    gram: BTreeMap<Weight, Matrix>,
    inverse: BTreeMap<Weight, Matrix>,
    index: HashMap<Word, (Weight, usize)>,
    constraints: usize,
}

impl InvariantForm {
    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn gram(&self, n: Weight) -> Option<&Matrix> {
        self.gram.get(&n)
    }

    /// Highest weight the form is known on.
    pub fn cutoff(&self) -> Weight {
        self.space.weights().last().unwrap_or(Weight::ZERO)
    }

    /// Number of linear constraints the solution was checked against.
    pub fn constraints(&self) -> usize {
        self.constraints
    }

    pub fn pair_words(&self, a: &Word, b: &Word) -> Result<Scalar> {
        let (na, ia) = self.locate(a)?;
        let (nb, ib) = self.locate(b)?;
        if na != nb {
            return Ok(Scalar::zero());
        }
        Ok(self.gram[&na][(ia, ib)].clone())
    }

    pub fn pair(&self, a: &Vector, b: &Vector) -> Result<Scalar> {
        let mut s = Scalar::zero();
        for (wa, ca) in a.terms() {
            for (wb, cb) in b.terms() {
                let g = self.pair_words(wa, wb)?;
                if !g.is_zero() {
                    s += &(&(ca * cb) * &g);
                }
            }
        }
        Ok(s)
    }

    fn locate(&self, w: &Word) -> Result<(Weight, usize)> {
        self.index.get(w).copied().ok_or_else(|| Error::BeyondCutoff {
            weight: format!("of word {w:?}"),
            cutoff: self.cutoff().to_string(),
        })
    }

    /// The vector `x` of weight `n` with `(v_b, x) = rhs[b]` for the block's basis.
    fn dual_solve(&self, n: Weight, rhs: &[Scalar]) -> Result<Vector> {
        let inv = self.inverse.get(&n).ok_or_else(|| Error::BeyondCutoff {
            weight: n.to_string(),
            cutoff: self.cutoff().to_string(),
        })?;
        let block = self.space.block(n);
        let mut out = Vector::zero();
        for (i, w) in block.iter().enumerate() {
            let mut c = Scalar::zero();
            for (j, r) in rhs.iter().enumerate() {
                if !r.is_zero() {
                    c += &(&inv[(i, j)] * r);
                }
            }
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }
}

/// Data for [`solve_invariant_form`].
pub struct FormProblem<'a> {
    /// The space carrying the form.
    pub space: GradedSpace,
    /// States `v` of the algebra whose vertex operators the form must be
    /// invariant under.
    pub acting: Vec<Word>,
    /// Vertex operators `Y(v, z)` acting on `space`.
    pub src: &'a dyn ModeSource,
    /// One pinned pairing `(a, b) = s`.
    pub normalization: (Word, Word, Scalar),
}

/// A linear expression `Σ coeffs[k] x_k + constant` in the unknown Gram
/// entries of one block.
#[derive(Default)]
struct Lin {
    coeffs: BTreeMap<usize, Scalar>,
    constant: Scalar,
}

impl Lin {
    fn add_scaled(&mut self, o: &Lin, c: &Scalar) {
        for (k, v) in &o.coeffs {
            *self.coeffs.entry(*k).or_insert_with(Scalar::zero) += &(v * c);
        }
        self.constant += &(&o.constant * c);
    }
}

struct BlockSolver<'p> {
    n: Weight,
    block: &'p [Word],
    pos: HashMap<&'p Word, usize>,
    known: &'p BTreeMap<Weight, (Vec<Word>, Matrix)>,
    known_pos: &'p HashMap<Word, (Weight, usize)>,
}

impl BlockSolver<'_> {
    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = self.block.len();
        i * d - i * (i + 1) / 2 + j
    }

    /// `(x, y)` for homogeneous `x`, `y`, or `None` if it involves a block
    /// above the current one.
    fn pair(&self, x: &Vector, y: &Vector, alg: &ModeAlgebra) -> Option<Lin> {
        let mut lin = Lin::default();
        let (Some(wx), Some(wy)) = (x.weight(alg.alphabet()), y.weight(alg.alphabet())) else {
            return Some(lin);
        };
        if wx != wy || x.is_zero() || y.is_zero() {
            return Some(lin);
        }
        if wx > self.n {
            return None;
        }
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                let c = ca * cb;
                if wx == self.n {
                    let k = self.slot(self.pos[a], self.pos[b]);
                    *lin.coeffs.entry(k).or_insert_with(Scalar::zero) += &c;
                } else {
                    let (_, ia) = self.known_pos[a];
                    let (_, ib) = self.known_pos[b];
                    let g = &self.known[&wx].1[(ia, ib)];
                    lin.constant += &(&c * g);
                }
            }
        }
        Some(lin)
    }
}

/// Incremental row echelon form over the unknowns plus a right-hand side.
struct Echelon {
    unknowns: usize,
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl Echelon {
    /// Add `Σ row x = rhs`; returns `false` when the system became inconsistent.
    fn push(&mut self, mut row: Vec<Scalar>) -> bool {
        for (p, r) in &self.rows {
            if row[*p].is_zero() {
                continue;
            }
            let f = row[*p].clone();
            for (x, y) in row.iter_mut().zip(r) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        let Some(p) = (0..self.unknowns).find(|&k| !row[k].is_zero()) else {
            return row[self.unknowns].is_zero();
        };
        let inv = row[p].inv().expect("nonzero pivot");
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        self.rows.push((p, row));
        true
    }

    fn solve(&self) -> std::result::Result<Vec<Scalar>, usize> {
        let free = self.unknowns - self.rows.len();
        if free > 0 {
            return Err(free);
        }
        let mut x = vec![Scalar::zero(); self.unknowns];
        for (p, r) in self.rows.iter().rev() {
            let mut v = r[self.unknowns].clone();
            for k in 0..self.unknowns {
                if k != *p && !r[k].is_zero() {
                    v -= &(&r[k] * &x[k]);
                }
            }
            x[*p] = v;
        }
        Ok(x)
    }
}

/// Solve for the symmetric form with `(w1, L(1)w2) = (L(-1)w1, w2)` and
/// `(w1, Y(v, z)w2) = (Y(e^{zL(1)}(-z^{-2})^{L(0)} v, z^{-1})w1, w2)` for every
/// acting `v`, one weight block at a time from the bottom. The
/// normalization must sit in the lowest block.
pub fn solve_invariant_form(p: &FormProblem) -> Result<InvariantForm> {
    let alg = p.src.algebra();
    if !alg.has_l1() {
        return Err(Error::Precondition(format!("algebra `{}` carries no L(1)", alg.name())));
    }
    let acting: Vec<(Weight, Word, Vec<Vector>)> = p
        .acting
        .iter()
        .map(|v| {
            // L(1)^j v for j = 0, 1, ... until it vanishes
            let mut pows = vec![Vector::basis(v.clone())];
            loop {
                let next = alg.l1(pows.last().unwrap())?;
                if next.is_zero() {
                    break;
                }
                pows.push(next);
            }
            Ok((alg.word_weight(v), v.clone(), pows))
        })
        .collect::<Result<_>>()?;
    let mut known: BTreeMap<Weight, (Vec<Word>, Matrix)> = BTreeMap::new();
    let mut known_pos: HashMap<Word, (Weight, usize)> = HashMap::new();
    let mut checked = 0usize;
    let lowest = p.space.weights().next();
    let (na, nb, ns) = &p.normalization;
    let norm_weight = alg.word_weight(na);
    if alg.word_weight(nb) != norm_weight || Some(norm_weight) != lowest {
        return Err(Error::Precondition(
            "the normalization must pair two states of the lowest weight".into(),
        ));
    }
    for (n, block) in p.space.blocks() {
        let n = *n;
        let d = block.len();
        let unknowns = d * (d + 1) / 2;
        let solver = BlockSolver {
            n,
            block,
            pos: block.iter().enumerate().map(|(i, w)| (w, i)).collect(),
            known: &known,
            known_pos: &known_pos,
        };
        let lower: Vec<(Weight, &Word)> = p.space.words().filter(|(w, _)| *w <= n).collect();
        let mut ech = Echelon {
            unknowns,
            rows: Vec::new(),
        };
        let mut solution: Option<Vec<Scalar>> = None;
        let inconsistent = || Error::NoInvariantForm(format!("inconsistent constraints on the weight {n} block"));
        // records `lhs = rhs`, skipping constraints that reach above this block
        let mut push = |lhs: Option<Lin>, rhs: Option<Lin>| -> Result<()> {
            let (Some(mut l), Some(r)) = (lhs, rhs) else {
                return Ok(());
            };
            l.add_scaled(&r, &-Scalar::one());
            l.coeffs.retain(|_, v| !v.is_zero());
            let target = -l.constant;
            if l.coeffs.is_empty() && target.is_zero() {
                return Ok(());
            }
            checked += 1;
            if let Some(x) = &solution {
                // the block is already determined: evaluate the constraint
                let mut s = Scalar::zero();
                for (k, a) in &l.coeffs {
                    s += &(a * &x[*k]);
                }
                return if s == target { Ok(()) } else { Err(inconsistent()) };
            }
            let mut row = vec![Scalar::zero(); unknowns + 1];
            for (k, a) in l.coeffs {
                row[k] = a;
            }
            row[unknowns] = target;
            if !ech.push(row) {
                return Err(inconsistent());
            }
            if ech.rows.len() == unknowns {
                solution = Some(ech.solve().expect("full rank"));
            }
            Ok(())
        };
        if n == norm_weight {
            let mut l = Lin::default();
            l.coeffs
                .insert(solver.slot(solver.pos[na], solver.pos[nb]), Scalar::one());
            push(
                Some(l),
                Some(Lin {
                    coeffs: BTreeMap::new(),
                    constant: ns.clone(),
                }),
            )?;
        }
        for &(w1n, w1) in &lower {
            for &(w2n, w2) in &lower {
                if w1n != n && w2n != n {
                    continue;
                }
                let x1 = Vector::basis(w1.clone());
                let x2 = Vector::basis(w2.clone());
                if w2n == w1n + Weight::ONE {
                    let lhs = solver.pair(&x1, &alg.l1(&x2)?, alg);
                    let rhs = solver.pair(&alg.lminus1(&x1)?, &x2, alg);
                    push(lhs, rhs)?;
                }
                for (k, _, pows) in &acting {
                    let Some(m) = (*k - Weight::ONE + w2n - w1n).to_int() else {
                        continue;
                    };
                    let lhs = solver.pair(&x1, &p.src.mode(&pows[0], m, &x2)?, alg);
                    let kk = k
                        .to_int()
                        .ok_or_else(|| Error::Precondition("acting states must have integer weight".into()))?;
                    let mut rhs = Some(Lin::default());
                    for (j, pv) in pows.iter().enumerate() {
                        let j = j as i32;
                        let c = &Scalar::sign(kk as i64) * &Scalar::factorial_inv(j as u32);
                        let img = p.src.mode(pv, 2 * kk - j - m - 2, &x1)?;
                        match (rhs.as_mut(), solver.pair(&img, &x2, alg)) {
                            (Some(acc), Some(t)) => acc.add_scaled(&t, &c),
                            _ => rhs = None,
                        }
                    }
                    push(lhs, rhs)?;
                }
            }
        }
        let x = match solution {
            Some(x) => x,
            None => ech.solve().map_err(|dim| Error::AmbiguousForm { dim })?,
        };
        let mut g = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                g[(i, j)] = x[solver.slot(i, j)].clone();
            }
        }
        for (i, w) in block.iter().enumerate() {
            known_pos.insert(w.clone(), (n, i));
        }
        known.insert(n, (block.clone(), g));
    }
    let mut gram = BTreeMap::new();
    let mut inverse = BTreeMap::new();
    for (n, (_, g)) in known {
        let inv = g.inverse().ok_or_else(|| Error::Degenerate { weight: n.to_string() })?;
        gram.insert(n, g);
        inverse.insert(n, inv);
    }
    Ok(InvariantForm {
        space: p.space.clone(),
        gram,
        inverse,
        index: known_pos,
        constraints: checked,
    })
}

/// `V_e = V ⊕ W` for an algebra split by parity: `V` is the integer-weight
/// part and `W` the half-odd-weight part, a `V`-module under the restricted
/// vertex operators. The operators `Y_WV^W` and `Y_WW^V` are rebuilt from the
/// invariant forms rather than read off the algebra.
pub struct Extension<'a> {
    alg: &'a ModeAlgebra,
    table: VertexTable<'a>,
    form_v: InvariantForm,
    form_w: InvariantForm,
    eps: Scalar,
    memo: DashMap<(Word, i32, Word), Vector>,
}

/// Options for building the even/odd extension.
#[derive(Clone, Debug)]
pub struct ExtensionSpec {
    /// Highest weight the invariant forms are solved to.
    pub form_cutoff: Weight,
    /// Highest weight of the states of `V` the forms must be invariant under.
    pub acting_cutoff: Weight,
    /// `(a, a)_V = s` on the lowest state of `V`.
    pub norm_v: Scalar,
    /// `(w, w)_W = s` on the lowest state of `W`.
    pub norm_w: Scalar,
}

impl ExtensionSpec {
    pub fn new(form_cutoff: Weight, acting_cutoff: Weight) -> Self {
        ExtensionSpec {
            form_cutoff,
            acting_cutoff,
            norm_v: Scalar::one(),
            norm_w: Scalar::one(),
        }
    }
}

impl<'a> Extension<'a> {
    pub fn even_odd(alg: &'a ModeAlgebra, spec: &ExtensionSpec) -> Result<Self> {
        let full = alg.enumerate_basis(spec.form_cutoff);
        let v_space = full.restrict(Parity::Even);
        let w_space = full.restrict(Parity::Odd);
        let lowest = |s: &GradedSpace, what: &str| -> Result<Word> {
            s.words()
                .next()
                .map(|(_, w)| w.clone())
                .ok_or_else(|| Error::Precondition(format!("algebra `{}` has no {what} part", alg.name())))
        };
        let v0 = lowest(&v_space, "integer-weight")?;
        let w0 = lowest(&w_space, "half-odd-weight")?;
        let acting: Vec<Word> = v_space
            .words()
            .filter(|(n, _)| *n <= spec.acting_cutoff)
            .map(|(_, w)| w.clone())
            .collect();
        let table = VertexTable::new(alg);
        let form_v = solve_invariant_form(&FormProblem {
            space: v_space,
            acting: acting.clone(),
            src: &table,
            normalization: (v0.clone(), v0, spec.norm_v.clone()),
        })?;
        let form_w = solve_invariant_form(&FormProblem {
            space: w_space.clone(),
            acting,
            src: &table,
            normalization: (w0.clone(), w0, spec.norm_w.clone()),
        })?;
        // e^{-2πi L(0)} on W, the same scalar on every homogeneous vector
        let mut eps = None;
        for n in w_space.weights() {
            let e = Scalar::i_pow(-2 * n.twice() as i64);
            match &eps {
                None => eps = Some(e),
                Some(x) if *x != e => {
                    return Err(Error::Grading(format!("W has weights {n} of a different class")));
                }
                _ => {}
            }
        }
        Ok(Extension {
            alg,
            table,
            form_v,
            form_w,
            eps: eps.expect("nonempty W"),
            memo: DashMap::new(),
        })
    }

    pub fn form_v(&self) -> &InvariantForm {
        &self.form_v
    }

    pub fn form_w(&self) -> &InvariantForm {
        &self.form_w
    }

    /// `ε_W = e^{-2πi L_W(0)}`.
    pub fn eps(&self) -> &Scalar {
        &self.eps
    }

    fn is_w(&self, w: &Word) -> bool {
        self.alg.word_weight(w).parity() == Parity::Odd
    }

    /// `w_n v` for `Y_WV^W(w, z)v = e^{zL(-1)} Y_W(v, -z)w`:
    /// `Σ_j (-1)^{n+j+1} L(-1)^j/j! v_{n+j} w`.
    fn ywv_word(&self, w: &Word, n: i32, v: &Word) -> Result<Vector> {
        let key = (w.clone(), n, v.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let target = self.alg.word_weight(w) + self.alg.word_weight(v) - Weight::int(n + 1);
        let floor = self.alg.min_weight(Parity::Odd).unwrap_or(Weight::ZERO);
        let mut out = Vector::zero();
        if target >= floor {
            let top = (target - floor).floor();
            for j in 0..=top {
                let mut t = self.table.mode_word(v, n + j, w)?;
                if t.is_zero() {
                    continue;
                }
                for _ in 0..j {
                    t = self.alg.lminus1(&t)?;
                }
                let c = &Scalar::sign((n + j + 1) as i64) * &Scalar::factorial_inv(j as u32);
                out.add_scaled(&t, &c);
            }
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn ywv(&self, w: &Vector, n: i32, v: &Word) -> Result<Vector> {
        let mut out = Vector::zero();
        for (ww, c) in w.terms() {
            out.add_scaled(&self.ywv_word(ww, n, v)?, c);
        }
        Ok(out)
    }

    /// `(w1)_n w2 ∈ V` from
    /// `(v, Y_WW^V(w1, z)w2)_V = (Y_WV^W(e^{zL(1)} e^{πiL(0)} z^{-2L(0)} w1, z^{-1})v, w2)_W`.
    fn yww_word(&self, w1: &Word, n: i32, w2: &Word) -> Result<Vector> {
        let key = (w1.clone(), n, w2.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let h = self.alg.word_weight(w1);
        let h2 = self.alg.word_weight(w2);
        let p = h + h2 - Weight::int(n + 1);
        let out = if self.alg.min_weight(Parity::Even).is_none_or(|m| p < m) {
            Vector::zero()
        } else {
            if p > self.form_v.cutoff() {
                return Err(Error::BeyondCutoff {
                    weight: p.to_string(),
                    cutoff: self.form_v.cutoff().to_string(),
                });
            }
            let phase = Scalar::i_pow(h.twice() as i64);
            let mut pows = vec![Vector::basis(w1.clone())];
            loop {
                let next = self.alg.l1(pows.last().unwrap())?;
                if next.is_zero() {
                    break;
                }
                pows.push(next);
            }
            let target = Vector::basis(w2.clone());
            let block = self.form_v.space().block(p).to_vec();
            let mut rhs = Vec::with_capacity(block.len());
            for v in &block {
                let mut b = Scalar::zero();
                for (j, x) in pows.iter().enumerate() {
                    let Some(m) = (h - Weight::int(j as i32) + p - h2 - Weight::ONE).to_int() else {
                        return Err(Error::Grading(format!("non-integer power of z from {h} and {h2}")));
                    };
                    let y = self.ywv(x, m, v)?;
                    if y.is_zero() {
                        continue;
                    }
                    b += &(&self.form_w.pair(&y, &target)? * &Scalar::factorial_inv(j as u32));
                }
                rhs.push(&b * &phase);
            }
            self.form_v.dual_solve(p, &rhs)?
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    /// The extended vertex map on basis words, dispatched on the `V`/`W`
    /// membership of both arguments.
    pub fn mode_word(&self, x1: &Word, n: i32, x2: &Word) -> Result<Vector> {
        match (self.is_w(x1), self.is_w(x2)) {
            (false, _) => self.table.mode_word(x1, n, x2),
            (true, false) => self.ywv_word(x1, n, x2),
            (true, true) => self.yww_word(x1, n, x2),
        }
    }

    /// `⟨bra, Y_{V_e}(x1, z)x2⟩` for homogeneous `x1`, `x2`, as a Laurent
    /// monomial in `z`.
    pub fn matrix_element(&self, bra: &Vector, x1: &Vector, x2: &Vector) -> Result<SpecialRational> {
        let alpha = self.alg.alphabet();
        let mut out = LaurentPoly::zero_in(crate::ratcalc::make_vars(&["z"]));
        for (nb, b) in bra.by_weight(alpha) {
            let (Some(w1), Some(w2)) = (x1.weight(alpha), x2.weight(alpha)) else {
                return Err(Error::Precondition("matrix element of inhomogeneous states".into()));
            };
            let Some(n) = (w1 + w2 - nb).to_int().map(|x| x - 1) else {
                continue;
            };
            let c = b.pair(&ModeSource::mode(self, x1, n, x2)?);
            out = out.add(&LaurentPoly::monomial(c, &[("z", -n - 1)]));
        }
        Ok(SpecialRational::from_poly(out))
    }
}

impl ModeSource for Extension<'_> {
    fn algebra(&self) -> &ModeAlgebra {
        self.alg
    }

    fn mode(&self, u: &Vector, n: i32, v: &Vector) -> Result<Vector> {
        let mut out = Vector::zero();
        for (a, ca) in u.terms() {
            for (b, cb) in v.terms() {
                let t = self.mode_word(a, n, b)?;
                if !t.is_zero() {
                    out.add_scaled(&t, &(ca * cb));
                }
            }
        }
        Ok(out)
    }
}

/// The extension axioms up to `opts.cutoff`: grading, vacuum, `L(-1)`- and
/// `L(1)`-brackets, skew-symmetry with sign `ε_W`, commutativity and
/// associativity on `V_e`, the associativity constant on `W × W × W`, and the
/// dual relation between the two intertwining operators.
pub fn check_extension(ext: &Extension, opts: &SuiteOptions) -> Result<Report> {
    let start = std::time::Instant::now();
    let alg = ext.alg;
    if opts.cutoff > ext.form_w.cutoff() || opts.cutoff > ext.form_v.cutoff() {
        return Err(Error::Precondition(format!(
            "cutoff {} exceeds the weights the forms were solved to",
            opts.cutoff
        )));
    }
    let ctx = Ctx::new(ext, opts.cutoff);
    let mut report = Report::new(format!(
        "extension of the even part of {} up to weight {}",
        alg.name(),
        opts.cutoff
    ));

    let mut eps_rec = CheckRecord::new("ε_W = e^{-2πiL(0)}");
    for (n, _) in ext.form_w.space().words().filter(|(n, _)| *n <= opts.cutoff) {
        eps_rec.instances += 1;
        let rule = if n.is_integer() { Scalar::one() } else { -Scalar::one() };
        if ext.eps != rule {
            eps_rec.fail(format!("ε_W = {} on weight {n}", ext.eps));
        }
    }
    report.push(eps_rec.with_value(format!("eps = {}", ext.eps)));
    for (name, f) in [
        ("invariant form on V", &ext.form_v),
        ("invariant form on W", &ext.form_w),
    ] {
        let mut rec = CheckRecord::new(name);
        rec.instances = f.constraints() as u64;
        report.push(rec);
    }
    report.push(vertexop::identity(&ctx));
    report.push(vertexop::homogeneity(&ctx));
    report.push(vertexop::derivative(&ctx));
    report.push(vertexop::skew_symmetry(&ctx));
    for rec in vertexop::l1_checks(&ctx, &|v: &Vector| alg.l1(v)) {
        report.push(rec);
    }
    let (comm, assoc) = vertexop::locality_and_associativity(&ctx, opts);
    report.push(comm);
    report.push(assoc);
    let ws: Vec<usize> = (0..ctx.basis.len()).filter(|&i| ext.is_w(&ctx.basis[i].1)).collect();
    let mut triples = Vec::new();
    for &a in &ws {
        for &b in &ws {
            for &c in &ws {
                triples.push((a, b, c));
            }
        }
    }
    let (lambda, _) = vertexop::lambda_check(&ctx, &triples, opts.assoc_window.unwrap_or(opts.cutoff));
    report.push(lambda);
    report.push(dual_relation(ext, &ctx));
    report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

/// `(w2, Y_WV^W(w1, z)v)_W = (Y_WW^V(z^{-2L(0)} e^{-πiL(0)} e^{-z^{-1}L(1)} w1, z^{-1})w2, v)_V`
/// coefficientwise on basis triples.
fn dual_relation(ext: &Extension, ctx: &Ctx) -> CheckRecord {
    let alg = ext.alg;
    let ws: Vec<&(Weight, Word)> = ctx.basis.iter().filter(|(_, w)| ext.is_w(w)).collect();
    let vs: Vec<&(Weight, Word)> = ctx.basis.iter().filter(|(_, w)| !ext.is_w(w)).collect();
    let items: Vec<Outcome> = ws
        .par_iter()
        .map(|(h, w1)| -> Outcome {
            let mut pows = vec![Vector::basis(w1.clone())];
            loop {
                let next = alg.l1(pows.last().unwrap())?;
                if next.is_zero() {
                    break;
                }
                pows.push(next);
            }
            for (h2, w2) in &ws {
                let w2v = Vector::basis(w2.clone());
                for (k, v) in &vs {
                    let vv = Vector::basis(v.clone());
                    let Some(m) = (*h + *k - *h2).to_int().map(|x| x - 1) else {
                        continue;
                    };
                    let lhs = ext.form_w.pair(&w2v, &ext.ywv_word(w1, m, v)?)?;
                    let mut rhs = Scalar::zero();
                    for (j, x) in pows.iter().enumerate() {
                        let j = j as i32;
                        let nn = h.twice() - j - m - 2;
                        let phase = &Scalar::i_pow(-(h.twice() - 2 * j) as i64)
                            * &(&Scalar::sign(j as i64) * &Scalar::factorial_inv(j as u32));
                        let img = ModeSource::mode(ext, x, nn, &w2v)?;
                        rhs += &(&ext.form_v.pair(&img, &vv)? * &phase);
                    }
                    if lhs != rhs {
                        return Ok(Some(format!(
                            "w1 = {}, w2 = {}, v = {}, mode {m}: {lhs} vs {rhs}",
                            ctx.r(w1),
                            ctx.r(w2),
                            ctx.r(v)
                        )));
                    }
                }
            }
            Ok(None)
        })
        .collect();
    vertexop::tally_all("dual relation between Y_WV^W and Y_WW^V", items)
}

/// Compare the extended vertex map with the algebra's own on all basis
/// pairs with outputs up to `cutoff`. Blocks touching `V` must agree
/// exactly; the `W × W` block may differ by one scalar, which is returned.
pub fn compare_with_algebra(ext: &Extension, cutoff: Weight) -> Result<(CheckRecord, Option<Scalar>)> {
    // (both inputs in W, mode, basis indices, extension value, algebra value)
    type Compared = (bool, i32, usize, usize, Vector, Vector);
    let ctx = Ctx::new(ext, cutoff);
    let table = VertexTable::new(ext.alg);
    let items: Vec<Result<Vec<Compared>>> = ctx
        .pairs()
        .into_par_iter()
        .map(|(i, j)| {
            let (w1, x1) = &ctx.basis[i];
            let (w2, x2) = &ctx.basis[j];
            let both_w = ext.is_w(x1) && ext.is_w(x2);
            let mut out = Vec::new();
            for n in vertexop::mode_range(ext.alg, *w1, *w2, cutoff) {
                let a = ext.mode_word(x1, n, x2)?;
                let b = table.mode_word(x1, n, x2)?;
                out.push((both_w, n, i, j, a, b));
            }
            Ok(out)
        })
        .collect();
    let mut rec = CheckRecord::new("extended vertex map = whole algebra");
    let mut kappa: Option<Scalar> = None;
    for r in items {
        let outcome: Outcome = r.map(|list| {
            for (both_w, n, i, j, a, b) in list {
                let scale = if both_w {
                    if kappa.is_none() {
                        if let Some((w, c)) = b.terms().next() {
                            kappa = Some(&a.get(w) * &c.inv().expect("nonzero"));
                        }
                    }
                    kappa.clone().unwrap_or_else(Scalar::one)
                } else {
                    Scalar::one()
                };
                if a != b.scale(&scale) {
                    return Some(format!(
                        "{}_{n} {}: extension gives {}, algebra gives {}",
                        ctx.r(&ctx.basis[i].1),
                        ctx.r(&ctx.basis[j].1),
                        ctx.rv(&a),
                        ctx.rv(&b)
                    ));
                }
            }
            None
        });
        vertexop::tally(&mut rec, outcome);
    }
    if let Some(k) = &kappa {
        rec = rec.with_value(format!("W x W scalar = {k}"));
    }
    Ok((rec, kappa))
}
