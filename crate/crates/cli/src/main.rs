//! `vwb`: command-line front end for vwb-core.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use vwb_core::correlator::{compute, locality_order, Field, GeneratorField, Insertion};
use vwb_core::extend::{check_extension, compare_with_algebra, Extension, ExtensionSpec};
use vwb_core::graded::{Vector, Weight};
use vwb_core::modealg::{Builtin, ModeAlgebra};
use vwb_core::ratcalc::{Scalar, SpecialRational};
use vwb_core::report::{CheckRecord, Report};
use vwb_core::vertexop::{axiom_suite, conformal_check, matrix_element, quasi_check, SuiteOptions, VertexTable};
use vwb_core::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CEILING: u8 = 3;

#[derive(Parser)]
#[command(name = "vwb", version, about = "Exact vertex (super)algebra computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct AlgebraArgs {
    /// `heisenberg`, `free_fermion`, `virasoro` or `file:PATH`.
    #[arg(long, default_value = "heisenberg")]
    algebra: String,
    /// Central charge for `virasoro`, e.g. `1/2`.
    #[arg(long)]
    c: Option<String>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Rational function of a product of fields between a bra and a ket.
    Correlator {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Comma-separated generator names or state words, placed at z1..zk.
        #[arg(long)]
        fields: String,
        #[arg(long, default_value = "|0>")]
        bra: String,
        #[arg(long, default_value = "|0>")]
        ket: String,
    },
    /// Run the axiom suite, or the extension checks with `--extend`.
    Check {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Check groups: vertex, locality, conformal, quasi. Defaults to
        /// every group the algebra supports.
        #[arg(long, value_delimiter = ',')]
        axioms: Vec<Group>,
        #[arg(long, default_value = "3")]
        max_weight: String,
        #[arg(long, value_enum)]
        extend: Option<Split>,
        /// Weight the invariant forms are solved to; defaults to four
        /// times `--max-weight`.
        #[arg(long)]
        form_weight: Option<String>,
        /// Check only this many random triples (seed from `VWB_SEED`).
        #[arg(long)]
        sample: Option<usize>,
    },
    /// `⟨bra, Y(u, z) ket⟩`, or the series `Y(u, z) ket` without `--bra`.
    Vertexop {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        element: String,
        #[arg(long)]
        bra: Option<String>,
        #[arg(long, default_value = "|0>")]
        ket: String,
        /// Highest weight of the series coefficients printed without `--bra`.
        #[arg(long)]
        max_weight: Option<String>,
    },
    /// Sparse matrices of the modes `u_n` on all blocks up to `--max-weight`.
    Modes {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        element: String,
        #[arg(long, default_value = "2")]
        max_weight: String,
        /// Print only this mode.
        #[arg(long, allow_hyphen_values = true)]
        n: Option<i32>,
    },
    /// Normal-ordered basis labels by weight.
    Basis {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value = "3")]
        max_weight: String,
    },
    /// Write the algebra's mode tables as an algebra file.
    Export {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value = "4")]
        max_weight: String,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Group {
    Vertex,
    Locality,
    Conformal,
    Quasi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Split {
    EvenOdd,
}

/// Why a command did not succeed, with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BeyondCutoff { .. } | Error::LocalityTooSmall { .. } | Error::NotLocal { .. } => EXIT_CEILING,
            Error::NoInvariantForm(_)
            | Error::Degenerate { .. }
            | Error::AmbiguousForm { .. }
            | Error::WeightInconsistent(_)
            | Error::Grading(_) => EXIT_FAIL,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: msg.into(),
    }
}

type Outcome = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Correlator { alg, fields, bra, ket } => cmd_correlator(&alg, &fields, &bra, &ket),
        Command::Check {
            alg,
            axioms,
            max_weight,
            extend,
            form_weight,
            sample,
        } => {
            let cutoff = parse_weight(&max_weight)?;
            let form = form_weight.as_deref().map(parse_weight).transpose()?;
            cmd_check(&alg, &axioms, cutoff, extend, form, sample)
        }
        Command::Vertexop {
            alg,
            element,
            bra,
            ket,
            max_weight,
        } => {
            let cutoff = max_weight.as_deref().map(parse_weight).transpose()?;
            cmd_vertexop(&alg, &element, bra.as_deref(), &ket, cutoff)
        }
        Command::Modes {
            alg,
            element,
            max_weight,
            n,
        } => cmd_modes(&alg, &element, parse_weight(&max_weight)?, n),
        Command::Basis { alg, max_weight } => cmd_basis(&alg, parse_weight(&max_weight)?),
        Command::Export { alg, max_weight, out } => cmd_export(&alg, parse_weight(&max_weight)?, out),
    }
}

fn parse_weight(s: &str) -> Result<Weight, Failure> {
    s.parse::<Weight>().map_err(|e| Failure::from(Error::from(e)))
}

fn load_algebra(a: &AlgebraArgs) -> Result<ModeAlgebra, Failure> {
    if let Some(path) = a.algebra.strip_prefix("file:") {
        return Ok(ModeAlgebra::load(std::path::Path::new(path))?);
    }
    let c = match &a.c {
        Some(s) => Some(s.parse::<Scalar>().map_err(|e| Failure::from(Error::from(e)))?),
        None => None,
    };
    if c.is_some() && a.algebra != "virasoro" {
        return Err(input_error("--c applies only to `virasoro`"));
    }
    let which = Builtin::from_name(&a.algebra, c).ok_or_else(|| {
        input_error(format!(
            "unknown algebra `{}` (expected heisenberg, free_fermion, virasoro or file:PATH)",
            a.algebra
        ))
    })?;
    Ok(ModeAlgebra::builtin(which))
}

fn render_rational(f: &SpecialRational, json: bool) -> String {
    if json {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&f.to_json()).expect("serializable")
        )
    } else {
        format!("{f}\n")
    }
}

fn cmd_correlator(a: &AlgebraArgs, fields: &str, bra: &str, ket: &str) -> Outcome {
    let alg = load_algebra(a)?;
    let table = VertexTable::new(&alg);
    let specs: Vec<&str> = fields.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if specs.is_empty() {
        return Err(input_error("--fields is empty"));
    }
    let mut owned: Vec<Box<dyn Field + '_>> = Vec::new();
    for s in &specs {
        match alg.alphabet().index(s) {
            Some(i) => owned.push(Box::new(GeneratorField::new(&alg, i))),
            None if s.contains('|') => owned.push(Box::new(table.field(alg.parse_vector(s)?)?)),
            None => return Err(Error::UnknownLabel(s.to_string()).into()),
        }
    }
    let vars: Vec<String> = if specs.len() == 1 {
        vec!["z".into()]
    } else {
        (1..=specs.len()).map(|k| format!("z{k}")).collect()
    };
    let ins: Vec<Insertion> = owned
        .iter()
        .zip(&vars)
        .map(|(f, v)| Insertion::new(f.as_ref(), v.as_str()))
        .collect();
    let bra = alg.parse_vector(bra)?;
    let ket = alg.parse_vector(ket)?;
    let r = compute(&alg, &bra, &ins, &ket)?;
    Ok((render_rational(&r.value, a.json), 0))
}

fn cmd_check(
    a: &AlgebraArgs,
    groups: &[Group],
    cutoff: Weight,
    extend: Option<Split>,
    form: Option<Weight>,
    sample: Option<usize>,
) -> Outcome {
    let alg = load_algebra(a)?;
    let seed = match std::env::var("VWB_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map_err(|_| input_error(format!("VWB_SEED must be an unsigned integer, got `{s}`")))?,
        Err(_) => 0,
    };
    let mut opts = SuiteOptions::new(cutoff);
    opts.sample = sample;
    opts.seed = seed;
    let start = Instant::now();
    let mut report = match extend {
        Some(Split::EvenOdd) => {
            let form = form.unwrap_or(cutoff + cutoff + cutoff + cutoff);
            let ext = Extension::even_odd(&alg, &ExtensionSpec::new(form, cutoff))?;
            let mut report = check_extension(&ext, &opts)?;
            report.push(compare_with_algebra(&ext, cutoff)?.0);
            report
        }
        None => run_groups(&alg, groups, &opts)?,
    };
    report.elapsed_ms = None;
    let code = if report.passed() { 0 } else { EXIT_FAIL };
    let out = if a.json {
        format!("{}\n", serde_json::to_string_pretty(&report).expect("serializable"))
    } else {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        report.to_string()
    };
    Ok((out, code))
}

fn run_groups(alg: &ModeAlgebra, groups: &[Group], opts: &SuiteOptions) -> Result<Report, Failure> {
    let cutoff = opts.cutoff;
    let conformal = alg.conformal_vector();
    let all = groups.is_empty();
    let wants = |g: Group| all || groups.contains(&g);
    let mut report = Report::new(format!("{} up to weight {cutoff}", alg.name()));
    if wants(Group::Vertex) {
        report.extend(axiom_suite(alg, opts)?);
    }
    if wants(Group::Locality) {
        let mut rec = CheckRecord::new("locality orders within declared bounds");
        let mut found = Vec::new();
        let names = alg.alphabet();
        for i in 0..alg.num_generators() {
            for j in i..alg.num_generators() {
                let order = locality_order(alg, i, j, cutoff)?.order;
                let declared = alg.locality(i, j);
                rec.instances += 1;
                if order > declared {
                    rec.fail(format!(
                        "N({}, {}) = {order} exceeds the declared {declared}",
                        names.name(i),
                        names.name(j)
                    ));
                }
                found.push(format!("N({},{}) = {order}", names.name(i), names.name(j)));
            }
        }
        report.push(rec.with_value(found.join(", ")));
    }
    if wants(Group::Conformal) {
        match &conformal {
            Some(omega) => {
                let out = conformal_check(alg, omega, cutoff)?;
                report.extend(out.report);
            }
            None if !all => return Err(input_error(format!("`{}` has no known conformal vector", alg.name()))),
            None => {}
        }
    }
    if wants(Group::Quasi) {
        if alg.has_l1() {
            report.extend(quasi_check(alg, |v: &Vector| alg.l1(v), cutoff)?);
        } else if !all {
            return Err(input_error(format!("`{}` has no L(1) action", alg.name())));
        }
    }
    Ok(report)
}

fn cmd_vertexop(a: &AlgebraArgs, element: &str, bra: Option<&str>, ket: &str, cutoff: Option<Weight>) -> Outcome {
    let alg = load_algebra(a)?;
    let alpha = alg.alphabet();
    let word = alpha.parse_word(element).map_err(Error::from)?;
    let ket_v = alg.parse_vector(ket)?;
    if let Some(bra) = bra {
        let bra_v = alg.parse_vector(bra)?;
        let f = matrix_element(&alg, &bra_v, &word, &ket_v)?;
        return Ok((render_rational(&f, a.json), 0));
    }
    // the series Y(u, z) ket, coefficient by coefficient
    let wu = alpha.word_weight(&word);
    let wk = ket_v
        .weight(alpha)
        .ok_or_else(|| input_error("--ket must be weight-homogeneous"))?;
    let top = cutoff.unwrap_or(wu + wk + Weight::int(2));
    let table = VertexTable::new(&alg);
    let u = alg.value(&word)?;
    let hi = (wu + wk).floor() - 1;
    let lo = (wu + wk - top).floor() - 1;
    let mut terms = Vec::new();
    for n in (lo..=hi).rev() {
        if wu + wk - Weight::int(n + 1) > top {
            continue;
        }
        let v = table.mode(&u, n, &ket_v)?;
        if !v.is_zero() {
            terms.push((-n - 1, v.render(alpha)));
        }
    }
    let out = if a.json {
        let map: serde_json::Map<String, serde_json::Value> =
            terms.iter().map(|(p, v)| (p.to_string(), json!(v))).collect();
        format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({ "coefficients": map })).expect("serializable")
        )
    } else if terms.is_empty() {
        "0\n".to_string()
    } else {
        terms.iter().map(|(p, v)| format!("z^{p}: {v}\n")).collect()
    };
    Ok((out, 0))
}

fn cmd_modes(a: &AlgebraArgs, element: &str, cutoff: Weight, only: Option<i32>) -> Outcome {
    let alg = load_algebra(a)?;
    let alpha = alg.alphabet();
    let u = alg.parse_vector(element)?;
    let wu = match u.weight(alpha) {
        Some(w) => w,
        None if u.is_zero() => return Err(input_error(format!("`{element}` is the zero vector"))),
        None => return Err(input_error(format!("`{element}` is not weight-homogeneous"))),
    };
    let table = VertexTable::new(&alg);
    let range = match only {
        Some(n) => n..=n,
        None => (wu - cutoff).floor() - 1..=(wu + cutoff).floor() - 1,
    };
    let mut modes = Vec::new();
    for n in range {
        let map = table.mode_map(&u, n, cutoff)?;
        let mut entries = Vec::new();
        for (src, img) in map.columns() {
            for (dst, c) in img.terms() {
                entries.push((alpha.render(src), alpha.render(dst), c.to_string()));
            }
        }
        modes.push((n, entries));
    }
    let out = if a.json {
        let map: serde_json::Map<String, serde_json::Value> =
            modes.iter().map(|(n, e)| (n.to_string(), json!(e))).collect();
        format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({ "element": element, "modes": map })).expect("serializable")
        )
    } else {
        let mut s = String::new();
        for (n, entries) in &modes {
            if entries.is_empty() {
                s.push_str(&format!("u_{n} = 0\n"));
                continue;
            }
            s.push_str(&format!("u_{n}:\n"));
            for (src, dst, c) in entries {
                s.push_str(&format!("  {src} -> {c} * {dst}\n"));
            }
        }
        s
    };
    Ok((out, 0))
}

fn cmd_basis(a: &AlgebraArgs, cutoff: Weight) -> Outcome {
    let alg = load_algebra(a)?;
    if let Some(c) = alg.cutoff() {
        if cutoff > c {
            return Err(Error::BeyondCutoff {
                weight: cutoff.to_string(),
                cutoff: c.to_string(),
            }
            .into());
        }
    }
    let space = alg.enumerate_basis(cutoff);
    let alpha = alg.alphabet();
    let blocks: Vec<(String, Vec<String>)> = space
        .blocks()
        .iter()
        .map(|(n, b)| (n.to_string(), b.iter().map(|w| alpha.render(w)).collect()))
        .collect();
    let out = if a.json {
        let map: serde_json::Map<String, serde_json::Value> =
            blocks.iter().map(|(n, b)| (n.clone(), json!(b))).collect();
        format!("{}\n", serde_json::to_string_pretty(&map).expect("serializable"))
    } else {
        blocks
            .iter()
            .map(|(n, b)| format!("{}\n", format!("{n} (dim {}): {}", b.len(), b.join(", ")).trim_end()))
            .collect()
    };
    Ok((out, 0))
}

fn cmd_export(a: &AlgebraArgs, cutoff: Weight, out: Option<PathBuf>) -> Outcome {
    let alg = load_algebra(a)?;
    let data = alg.export(cutoff)?;
    let text = format!("{}\n", serde_json::to_string_pretty(&data).expect("serializable"));
    match out {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| Failure::from(Error::Io(format!("{}: {e}", path.display()))))?;
            Ok((String::new(), 0))
        }
        None => Ok((text, 0)),
    }
}
