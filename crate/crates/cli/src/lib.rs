//! `fewnomial` subcommands.
//!
//! Exit codes: `0` success, `1` usage or domain error, `2` a verification
//! failed (bound violated, bijection mismatch, multidegree violation).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fewnomial::bounds::{
    bbs_real_bound, best_bound, bs07_positive_bound, khovanskii_bound, mixed_bound,
    positive_compositions, verify_inequalities, BoundReport, Variant,
};
use fewnomial::gale::build_gale_system;
use fewnomial::jacobian::random_detdeg_suite;
use fewnomial::lattice::{kernel_basis, lattice_index, ExponentMatrix};
use fewnomial::solver::{solve_real, verify_gale_bijection, Orthants, SolveOptions};
use fewnomial::sparse_system::{detect_mixed_structure, FewnomialSystem, MixedStructure};
use fewnomial::{BigInt, Error};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "fewnomial", version, about = "Bounds, Gale duality and real root counts for fewnomial systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structure, lattice index and every applicable bound.
    Analyze {
        file: PathBuf,
        /// Also count real solutions with the solver.
        #[arg(long)]
        count: bool,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The Gale dual system with its relation matrix.
    Gale {
        file: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// CSV of classical and mixed bounds for all block sizes.
    BoundsTable {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lmax: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Nondegenerate real solutions found in the search box.
    Count {
        file: PathBuf,
        /// Only the positive orthant.
        #[arg(long, conflicts_with = "real")]
        positive: bool,
        /// All orthants (default).
        #[arg(long)]
        real: bool,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solves the system and its Gale dual independently and compares.
    VerifyGale {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random symbolic checks of the Jacobian multidegree bounds.
    VerifyJacobian {
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<usize>,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact checks of the estimates behind the mixed bounds.
    VerifyInequalities {
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Half-width of the search box in log coordinates.
    #[arg(long = "box", default_value_t = 10.0)]
    box_radius: f64,
    /// Accepted for reproducibility; the solver is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    degree_cap: i64,
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            box_radius: self.box_radius,
            degree_cap: self.degree_cap,
            ..Default::default()
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Args, Debug)]
struct OutArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Output {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CountMismatch(_) => Failure::Verify(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// A rendered report and whether its verification passed.
struct Report {
    value: Value,
    passed: bool,
    summary: String,
}

pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output::ok(text)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => out,
        Err(Failure::Usage(msg)) => Output::usage(msg),
        Err(Failure::Verify(msg)) => Output {
            code: EXIT_VERIFY,
            stdout: String::new(),
            stderr: format!("verification failed: {msg}\n"),
        },
    }
}

fn dispatch(cmd: Command) -> Result<Output, Failure> {
    match cmd {
        Command::Analyze {
            file,
            count,
            solve,
            out,
        } => emit(analyze(&file, count.then_some(&solve))?, out.format),
        Command::Gale { file, out } => emit(gale(&file)?, out.format),
        Command::BoundsTable { n, lmax, out } => bounds_table(n, lmax, out.format),
        Command::Count {
            file,
            positive,
            real: _,
            solve,
            out,
        } => emit(count(&file, positive, &solve)?, out.format),
        Command::VerifyGale { file, solve, out } => emit(verify_gale(&file, &solve)?, out.format),
        Command::VerifyJacobian {
            blocks,
            trials,
            seed,
            out,
        } => emit(verify_jacobian(&blocks, trials, seed)?, out.format),
        Command::VerifyInequalities { blocks, out } => {
            emit(verify_ineq(&blocks)?, out.format)
        }
    }
}

fn emit(report: Report, format: Option<Format>) -> Result<Output, Failure> {
    let stdout = match format.unwrap_or(Format::Json) {
        Format::Json => canonical_json(&report.value),
        Format::Table => render_table(&report.value),
        Format::Csv => return Err(Failure::Usage("csv output is only available for bounds-table".into())),
    };
    Ok(Output {
        code: if report.passed { EXIT_OK } else { EXIT_VERIFY },
        stdout,
        stderr: if report.passed {
            String::new()
        } else {
            format!("verification failed: {}\n", report.summary)
        },
    })
}

/// Pretty JSON with sorted keys.
pub fn canonical_json(v: &Value) -> String {
    // serde_json's default map is ordered by key
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn render_table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = format!("fewnomial {}\n", env!("CARGO_PKG_VERSION"));
    for (k, val) in rows {
        let _ = writeln!(s, "{k:<width$}  {val}");
    }
    s
}

fn read_system(path: &Path) -> Result<FewnomialSystem, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Failure::Usage(format!("file not found: {}", path.display()))
        } else {
            Failure::Usage(format!("cannot read {}: {e}", path.display()))
        }
    })?;
    Ok(FewnomialSystem::from_json(&text)?)
}

fn read_structure(path: &Path) -> Result<MixedStructure, Failure> {
    Ok(detect_mixed_structure(&read_system(path)?)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn big(v: &BigInt) -> Value {
    match i64::try_from(v) {
        Ok(i) => json!(i),
        Err(_) => json!(v.to_string()),
    }
}

fn structure_summary(ms: &MixedStructure, index: &BigInt) -> Value {
    json!({
        "n": ms.n(),
        "blocks": ms.block_sizes(),
        "l": ms.l(),
        "lattice_index": big(index),
        "odd_index": index.bit(0),
    })
}

fn analyze(path: &Path, solve: Option<&SolveArgs>) -> Result<Report, Failure> {
    let ms = read_structure(path)?;
    let index = lattice_index(&ExponentMatrix::from_structure(&ms))?;
    let bounds: BoundReport = best_bound(&ms, &index);
    let mut value = json!({
        "structure": structure_summary(&ms, &index),
        "bounds": to_value(&bounds),
    });
    let mut passed = true;
    let mut summary = String::new();
    if let Some(args) = solve {
        let sols = solve_real(&ms.to_system(), &args.options())?;
        let (p, r) = (sols.count_positive(), sols.count_real());
        let p_ok = BigInt::from(p) <= bounds.positive;
        let r_ok = bounds.real.as_ref().is_none_or(|b| BigInt::from(r) <= *b);
        passed = p_ok && r_ok;
        if !passed {
            summary = format!("counts positive {p}, real {r} exceed the bounds");
        }
        value["counts"] = json!({
            "positive": p,
            "real": r,
            "suspects": sols.suspects.len(),
            "within_bounds": passed,
        });
    }
    Ok(Report {
        value,
        passed,
        summary,
    })
}

fn gale(path: &Path) -> Result<Report, Failure> {
    let ms = read_structure(path)?;
    let rb = kernel_basis(&ExponentMatrix::from_structure(&ms))?;
    let gs = build_gale_system(&ms, &rb)?;
    Ok(Report {
        value: gs.to_json_value(),
        passed: true,
        summary: String::new(),
    })
}

#[derive(Serialize)]
struct TableRow {
    n: usize,
    blocks: Vec<u64>,
    khovanskii: Value,
    bs07: Value,
    bbs: Value,
    mixed_pos: Value,
    mixed_real: Value,
    ratio: f64,
}

fn bounds_rows(n: usize, lmax: u64) -> Result<Vec<TableRow>, Failure> {
    if n < 2 {
        return Err(Failure::Usage(Error::UseDescartes(n).to_string()));
    }
    let params: Vec<Vec<u64>> = (n as u64..=lmax)
        .flat_map(|l| positive_compositions(l, n))
        .collect();
    params
        .par_iter()
        .map(|blocks| {
            let l: u64 = blocks.iter().sum();
            let nn = n as u64;
            let mp = mixed_bound(blocks, Variant::Positive)?;
            let bs = bs07_positive_bound(nn, l)?;
            Ok(TableRow {
                n,
                blocks: blocks.clone(),
                khovanskii: big(&khovanskii_bound(nn, l).integer_bound),
                bs07: big(&bs.integer_bound),
                bbs: big(&bbs_real_bound(nn, l)?.integer_bound),
                mixed_pos: big(&mp.integer_bound),
                mixed_real: big(&mixed_bound(blocks, Variant::Real)?.integer_bound),
                ratio: mp.value / bs.value,
            })
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(Failure::from)
}

fn bounds_table(n: usize, lmax: u64, format: Option<Format>) -> Result<Output, Failure> {
    let rows = bounds_rows(n, lmax)?;
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let mut header: Vec<String> = vec!["n".into()];
    header.extend((1..=n).map(|i| format!("l{i}")));
    header.extend(
        ["khovanskii", "bs07", "bbs", "mixed_pos", "mixed_real", "ratio"].map(String::from),
    );
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut c = vec![r.n.to_string()];
            c.extend(r.blocks.iter().map(u64::to_string));
            c.extend([&r.khovanskii, &r.bs07, &r.bbs, &r.mixed_pos, &r.mixed_real].map(cell));
            c.push(format!("{:.6}", r.ratio));
            c
        })
        .collect();
    let stdout = match format.unwrap_or(Format::Csv) {
        Format::Csv => std::iter::once(&header)
            .chain(&body)
            .map(|r| r.join(",") + "\n")
            .collect(),
        Format::Json => canonical_json(&to_value(&rows)),
        Format::Table => {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| {
                    std::iter::once(&header)
                        .chain(&body)
                        .map(|r| r[i].len())
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            std::iter::once(&header)
                .chain(&body)
                .map(|r| {
                    r.iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        + "\n"
                })
                .collect()
        }
    };
    Ok(Output::ok(stdout))
}

fn count(path: &Path, positive_only: bool, args: &SolveArgs) -> Result<Report, Failure> {
    let sys = read_system(path)?;
    let mut opts = args.options();
    if positive_only {
        opts.orthants = Orthants::Positive;
    }
    let sols = solve_real(&sys, &opts)?;
    let mut value = json!({
        "n": sys.n(),
        "positive": sols.count_positive(),
        "points": to_value(&sols.points),
        "suspects": to_value(&sols.suspects),
        "boxes_processed": sols.boxes_processed,
        "box": args.box_radius,
        "seed": args.seed,
    });
    if !positive_only {
        value["real"] = json!(sols.count_real());
    }
    Ok(Report {
        value,
        passed: true,
        summary: String::new(),
    })
}

fn verify_gale(path: &Path, args: &SolveArgs) -> Result<Report, Failure> {
    let ms = read_structure(path)?;
    let r = verify_gale_bijection(&ms, &args.options())?;
    let summary = r.check().err().map(|e| e.to_string()).unwrap_or_default();
    Ok(Report {
        value: to_value(&r),
        passed: r.passed,
        summary,
    })
}

fn verify_jacobian(blocks: &[usize], trials: usize, seed: u64) -> Result<Report, Failure> {
    let r = random_detdeg_suite(blocks.len(), blocks, trials, seed)?;
    // the equality rate is statistical; only hard bound violations fail
    let passed = r.violations == 0 && r.minor_violations == 0 && r.paths_agree && r.ladder_identity;
    let summary = format!(
        "{} multidegree violations, {} minor violations",
        r.violations, r.minor_violations
    );
    Ok(Report {
        value: to_value(&r),
        passed,
        summary,
    })
}

fn verify_ineq(blocks: &[u64]) -> Result<Report, Failure> {
    let r = verify_inequalities(blocks)?;
    let mut value = to_value(&r);
    value["passed"] = json!(r.all_ok());
    Ok(Report {
        passed: r.all_ok(),
        summary: format!("inequalities fail for blocks {blocks:?}"),
        value,
    })
}
