use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use e7orbit::classify::{
    classify, classify_multiset, invariants_of, recover_multiset, recover_multiset_exact, DiagonalForm, OrbitType,
    DEFAULT_EPS,
};
use e7orbit::diagonalize::{reduce, verify_reduction, ReduceConfig};
use e7orbit::error::Error;
use e7orbit::freudenthal::{Knob, ProductConstants};
use e7orbit::io::{format_pattern, parse_pattern, pattern_floats, pattern_vector, ElementFile, JsonScalar, Mode};
use e7orbit::lie::E7Algebra;
use e7orbit::scalar::format_rational;
use e7orbit::verify;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "e7orbit", version, about = "Classify points of the 56-dimensional Freudenthal space under compact E7")]
struct Cli {
    /// Arithmetic for element files (overrides the file's "mode").
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Tolerance for equal / zero entries of a diagonal form.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Diagonalizer convergence threshold.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Perturb one product constant by 1% (testing only).
    #[arg(long, global = true, value_name = "KNOB", value_parser = parse_knob, hide = true)]
    fault_inject: Option<Knob>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

fn parse_knob(s: &str) -> Result<Knob, String> {
    Knob::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Knob::ALL.iter().map(Knob::name).collect();
        format!("unknown knob \"{s}\" (one of {})", names.join(", "))
    })
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity and property suites.
    Verify {
        /// Covariant identities only.
        #[arg(long)]
        quick: bool,
    },
    /// Orbit type of the element in FILE ("-" for stdin).
    Classify { file: PathBuf },
    /// The invariants I1..I4 and the diagonal form they determine.
    Invariants { file: PathBuf },
    /// Reduce to a diagonal form (r1, r2, r3; r) by explicit group elements.
    Diagonalize {
        file: PathBuf,
        #[arg(long, default_value_t = 500)]
        max_sweeps: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Random points on the orbit through a diagonal form, e.g. "(1,1,r;s)".
    Sample {
        pattern: String,
        #[arg(short, default_value_t = 1)]
        n: usize,
        /// Write sample-<i>.json files here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The orbit types with representatives and stabilizer dimensions.
    Table,
}

struct Failure {
    code: u8,
    message: String,
    /// The command already printed its report.
    reported: bool,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::BadDiagonal(_) => 2,
            Error::Ambiguous { .. } | Error::UncertainRank { .. } => 4,
            _ => 3,
        };
        Failure { code, message: e.to_string(), reported: false }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into(), reported: false }
}

fn fail_after_report(code: u8, message: impl Into<String>) -> Failure {
    Failure { reported: true, ..fail(code, message) }
}

type Outcome = Result<(), Failure>;

/// `println!` that exits quietly once the reader has closed stdout.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if cli.json && !f.reported {
                print_json(&json!({ "error": f.message, "exit_code": f.code }));
            }
            eprintln!("e7orbit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Verify { quick } => cmd_verify(cli, *quick),
        Command::Classify { file } => cmd_classify(cli, file),
        Command::Invariants { file } => cmd_invariants(cli, file),
        Command::Diagonalize { file, max_sweeps, restarts } => cmd_diagonalize(cli, file, *max_sweeps, *restarts),
        Command::Sample { pattern, n, out } => cmd_sample(cli, pattern, *n, out.as_deref()),
        Command::Table => cmd_table(cli),
    }
}

fn read_element(cli: &Cli, file: &Path) -> Result<ElementFile, Failure> {
    let text = if file == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| fail(2, format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(file).map_err(|e| fail(2, format!("{}: {e}", file.display())))?
    };
    Ok(ElementFile::parse(&text, cli.mode.map(Mode::from))?)
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn cmd_verify(cli: &Cli, quick: bool) -> Outcome {
    let k = cli.fault_inject.map(ProductConstants::perturbed).unwrap_or_default();
    let report = verify::run(&k, quick)?;
    if cli.json {
        let mut v = report.to_json();
        v["fault_inject"] = json!(cli.fault_inject.map(|k| k.name()));
        print_json(&v);
    } else {
        if let Some(k) = cli.fault_inject {
            out!("fault injection: {} x 1.01", k.name());
        }
        out!("{}", report.table().trim_end_matches('\n'));
        let (ok, total) = report.count("identity");
        out!("covariant identities: {ok}/{total}");
        out!("{}/{} checks passed in {:.2}s", report.checks.iter().filter(|c| c.passed).count(), report.checks.len(), report.seconds);
    }
    report.into_result().map_err(|e| Failure { reported: true, ..Failure::from(e) })?;
    Ok(())
}

fn cmd_classify(cli: &Cli, file: &Path) -> Outcome {
    let element = read_element(cli, file)?;
    let c = classify(&element.to_float(), cli.eps)?;
    let exact = match &element {
        ElementFile::Exact(p) => Some(recover_multiset_exact(p).map(|m| format_pattern(&m))),
        ElementFile::Float(_) => None,
    };
    if cli.json {
        let mut v = c.to_json();
        v["mode"] = json!(element.mode().name());
        if let Some(m) = &exact {
            v["exact_multiset"] = match m {
                Ok(s) => json!(s),
                Err(e) => json!({ "error": e.to_string() }),
            };
        }
        print_json(&v);
    } else {
        out!("{}  {}", c.label, c.label.quotient());
        out!("stabilizer dimension {} (gap ratio {:.3e})", c.stab_dim, c.gap_ratio);
        match (&c.multiset, c.invariant_label) {
            (Some(m), Some(t)) => out!("diagonal form {m}  ->  {t}"),
            (Some(m), None) => out!("diagonal form {m}"),
            _ => {}
        }
        match &exact {
            Some(Ok(s)) => out!("exact diagonal form {s}"),
            Some(Err(e)) => out!("exact diagonal form unavailable: {e}"),
            None => {}
        }
        for d in &c.diagnostics {
            out!("note: {d}");
        }
    }
    if let Some((a, b, margin)) = &c.ambiguity {
        return Err(fail_after_report(4, format!("ambiguous at eps {:e}: {a} or {b} (margin {margin:e})", cli.eps)));
    }
    Ok(())
}

fn cmd_invariants(cli: &Cli, file: &Path) -> Outcome {
    let element = read_element(cli, file)?;
    let mut v = match &element {
        ElementFile::Exact(p) => {
            let inv = invariants_of(p);
            json!({ "I1": inv.i1.to_json(), "I2": inv.i2.to_json(), "I3": inv.i3.to_json(), "I4": inv.i4.to_json() })
        }
        ElementFile::Float(p) => invariants_of(p).to_json(),
    };
    let multiset = recover_multiset(&element.to_float());
    v["mode"] = json!(element.mode().name());
    v["multiset"] = match &multiset {
        Ok(m) => json!(m.raw()),
        Err(e) => json!({ "error": e.to_string() }),
    };
    if let ElementFile::Exact(p) = &element {
        if let Ok(m) = recover_multiset_exact(p) {
            v["exact_multiset"] = json!(m.iter().map(format_rational).collect::<Vec<_>>());
        }
    }
    if cli.json {
        print_json(&v);
    } else {
        for key in ["I1", "I2", "I3", "I4"] {
            out!("{key} = {}", v[key]);
        }
        match &multiset {
            Ok(m) => out!("diagonal form {m}"),
            Err(e) => out!("diagonal form unavailable: {e}"),
        }
        if let Some(m) = v.get("exact_multiset") {
            out!("exact diagonal form {m}");
        }
    }
    Ok(())
}

fn cmd_diagonalize(cli: &Cli, file: &Path, max_sweeps: usize, restarts: usize) -> Outcome {
    let p = read_element(cli, file)?.to_float();
    let cfg = ReduceConfig { tol: cli.tol, max_sweeps, restarts, seed: cli.seed };
    let result = reduce(&p, &cfg)?;
    let check = verify_reduction(&p, &result)?;
    if cli.json {
        let mut v = result.to_json();
        v["check"] = check.to_json();
        print_json(&v);
    } else {
        out!("diagonal form {}", result.diagonal);
        out!(
            "residual {:.2e} after {} sweeps (restart {}), {} factors",
            result.residual,
            result.iterations,
            result.restart,
            result.factors.len()
        );
        out!("replay error {:.2e}, norm drift {:.2e}", check.replay, check.norm_drift);
        for f in &check.failures {
            out!("check failed: {f}");
        }
    }
    if !result.certified {
        return Err(fail_after_report(5, format!("no convergence: best residual {:e} after {} sweeps", result.residual, result.iterations)));
    }
    if let Some(f) = check.failures.first() {
        return Err(fail_after_report(3, format!("reduction check: {f}")));
    }
    Ok(())
}

fn cmd_sample(cli: &Cli, pattern: &str, n: usize, out: Option<&Path>) -> Outcome {
    let entries = parse_pattern(pattern)?;
    let mode = cli.mode.map(Mode::from).unwrap_or(Mode::Float);
    let algebra = E7Algebra::shared()?;
    let mut docs = Vec::with_capacity(n);
    for i in 0..n {
        let element = match mode {
            // Group elements are only available in floating point.
            Mode::Exact => ElementFile::Exact(pattern_vector(&entries)),
            Mode::Float => {
                let seed = cli.seed.wrapping_add(i as u64);
                ElementFile::Float(algebra.random_orbit_sample(pattern_floats(&entries), seed)?)
            }
        };
        docs.push(element.to_value());
    }
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| fail(2, format!("{}: {e}", dir.display())))?;
            for (i, d) in docs.iter().enumerate() {
                let path = dir.join(format!("sample-{i}.json"));
                let text = serde_json::to_string_pretty(d).expect("JSON values serialize");
                fs::write(&path, text).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
                if !cli.json {
                    out!("{}", path.display());
                }
            }
        }
        None if n == 1 => print_json(&docs[0]),
        None => print_json(&Value::Array(docs)),
    }
    Ok(())
}

/// Representatives `(r1, r2, r3; r)` with the stabilizer dimension the
/// orbit table assigns to them.
const REPRESENTATIVES: [(&str, usize); 12] = [
    ("(0,0,0;0)", 133),
    ("(0,0,0;1)", 78),
    ("(0,0,1;1)", 55),
    ("(0,0,1;r)", 45),
    ("(0,1,1;1)", 52),
    ("(0,1,1;r)", 36),
    ("(0,1,r;s)", 28),
    ("(1,1,1;1)", 78),
    ("(1,1,1;r)", 52),
    ("(1,1,r;r)", 55),
    ("(1,1,r;s)", 36),
    ("(1,r,s;t)", 28),
];

fn cmd_table(cli: &Cli) -> Outcome {
    let algebra = E7Algebra::shared()?;
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for (pattern, expected) in REPRESENTATIVES {
        let entries = parse_pattern(pattern)?;
        let p = pattern_vector(&entries).to_float();
        let stab = algebra.stabilizer_dimension(&p)?;
        let form = DiagonalForm::new(pattern_floats(&entries), cli.eps)?;
        let label = classify_multiset(&form, cli.eps)?;
        let by_dim = OrbitType::from_stabilizer_dim(stab.dim);
        if stab.dim != expected {
            mismatches += 1;
        }
        rows.push((format_pattern(&entries), label, expected, stab.dim, stab.certificate.gap_ratio, by_dim));
    }
    if cli.json {
        let v: Vec<Value> = rows
            .iter()
            .map(|(pat, label, expected, dim, gap, by_dim)| {
                json!({
                    "representative": pat,
                    "type": label.name(),
                    "orbit": label.quotient(),
                    "expected_stab_dim": expected,
                    "stab_dim": dim,
                    "gap_ratio": gap,
                    "type_by_stab_dim": by_dim.map(|t| t.name()),
                })
            })
            .collect();
        print_json(&json!({ "types": OrbitType::ALL.iter().map(|t| json!({
            "type": t.name(), "group": t.group(), "stab_dim": t.stabilizer_dim(),
        })).collect::<Vec<_>>(), "representatives": v, "mismatches": mismatches }));
    } else {
        out!("{:<8} {:<9} {:>8}", "type", "group", "dim stab");
        for t in OrbitType::ALL {
            out!("{:<8} {:<9} {:>8}", t.name(), t.group(), t.stabilizer_dim());
        }
        out!();
        out!("{:<18} {:<14} {:>8} {:>8} {:>10}", "representative", "orbit", "expected", "computed", "gap ratio");
        for (pat, label, expected, dim, gap, by_dim) in &rows {
            let flag = if dim == expected {
                String::new()
            } else {
                format!("  <- differs; dimension {dim} belongs to {}", by_dim.map_or("no type".into(), |t| t.quotient()))
            };
            out!("{pat:<18} {:<14} {expected:>8} {dim:>8} {gap:>10.2e}{flag}", label.quotient());
        }
        if mismatches > 0 {
            out!("\n{mismatches} representative(s) with a computed stabilizer dimension different from the table");
        }
    }
    Ok(())
}
