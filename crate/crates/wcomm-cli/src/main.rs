//! Command-line front end for the weighted-commutator library.
//!
//! Subcommands cover the pipeline end to end: inspect an algebra file
//! (`check`), compute weighted subobject/normal commutators
//! (`commutator`), Smith commutators of congruence pairs (`smith`),
//! compare every applicable computation route on one input
//! (`cross-validate`), run the law-verification suite (`verify`), sweep
//! all subalgebra pairs for weight-sensitive commutators
//! (`search-divergence`), and write corpus algebras to files (`build`).
//!
//! Exit codes: `0` success; `1` the computation lies outside the
//! engine's decidable range (Mal'tsev or ring preconditions, size or
//! element caps, explicit refusals); `2` invalid input; `3` internal
//! defect — including hard law violations from `verify` and route
//! disagreements from `cross-validate`.
//!
//! With `--json` every command prints a single report object with
//! sorted keys; adding `--no-timestamp` makes the bytes reproducible
//! run to run.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use wcomm::builders;
use wcomm::commutator::analysis::{cross_validate, divergence_search, verify_suite};
use wcomm::commutator::smith::smith_commutator;
use wcomm::commutator::{
    weighted_commutator, weighted_normal_commutator, Bounds, CommutatorResult, WeightedCospan,
    Witness,
};
use wcomm::congruence::{self, Congruence};
use wcomm::free::{maltsev_term, MaltsevOutcome};
use wcomm::{format, Caps, El, Error, FiniteAlgebra, Subuniverse};

#[derive(Parser)]
#[command(
    name = "wcomm",
    version,
    about = "Weighted commutators of finite pointed algebras",
    after_help = "Exit codes: 0 success; 1 outside the engine's decidable range \
                  (preconditions, caps, refusals); 2 invalid input; 3 internal defect."
)]
struct Cli {
    /// Emit a JSON report on stdout instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    /// Omit the timestamp from JSON reports (byte-stable output).
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Worker threads: 0 or 1 forces sequential execution.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect an algebra file: structure, declared properties, Mal'tsev term.
    Check {
        /// Path to an algebra JSON file.
        algebra: PathBuf,
    },

    /// Compute the weighted commutator [X,Y | W] of two subalgebras.
    Commutator {
        /// Path to an algebra JSON file.
        algebra: PathBuf,

        /// Generators of X, e.g. `1,2`.
        #[arg(long, value_name = "IDS")]
        x: IdList,

        /// Generators of Y.
        #[arg(long, value_name = "IDS")]
        y: IdList,

        /// Weight subalgebra: `zero`, `all`, or generator ids.
        #[arg(long, default_value = "zero", value_name = "ZERO|ALL|IDS")]
        w: String,

        /// Per-block variable bounds: weight,x,y.
        #[arg(long, default_value = "2,2,2", value_name = "K,M,N", value_parser = parse_bounds)]
        bounds: Bounds,

        /// Close the result into an ideal (the normal weighted commutator).
        #[arg(long)]
        normal: bool,
    },

    /// Compute the Smith commutator of two congruences.
    Smith {
        /// Path to an algebra JSON file.
        algebra: PathBuf,

        /// Alpha as generating pairs, e.g. `0:2,1:3`.
        #[arg(
            long,
            value_name = "PAIRS",
            conflicts_with = "alpha_normal",
            required_unless_present = "alpha_normal"
        )]
        alpha_pairs: Option<PairList>,

        /// Alpha as the congruence collapsing these ids to zero (their
        /// normal closure becomes the zero class).
        #[arg(long, value_name = "IDS")]
        alpha_normal: Option<IdList>,

        /// Beta as generating pairs.
        #[arg(
            long,
            value_name = "PAIRS",
            conflicts_with = "beta_normal",
            required_unless_present = "beta_normal"
        )]
        beta_pairs: Option<PairList>,

        /// Beta as the congruence collapsing these ids to zero (their
        /// normal closure becomes the zero class).
        #[arg(long, value_name = "IDS")]
        beta_normal: Option<IdList>,
    },

    /// Compute the normal weight-one commutator along every applicable route.
    CrossValidate {
        /// Path to an algebra JSON file.
        algebra: PathBuf,

        /// Generators of X.
        #[arg(long, value_name = "IDS")]
        x: IdList,

        /// Generators of Y.
        #[arg(long, value_name = "IDS")]
        y: IdList,

        /// Per-block variable bounds: weight,x,y.
        #[arg(long, default_value = "2,2,2", value_name = "K,M,N", value_parser = parse_bounds)]
        bounds: Bounds,
    },

    /// Run the law-verification suite; hard failures exit with code 3.
    Verify {
        /// Path to an algebra JSON file.
        algebra: PathBuf,

        /// Per-block variable bounds: weight,x,y.
        #[arg(long, default_value = "2,2,2", value_name = "K,M,N", value_parser = parse_bounds)]
        bounds: Bounds,
    },

    /// Find subalgebra pairs whose commutator grows with the weight.
    SearchDivergence {
        /// Path to an algebra JSON file.
        algebra: PathBuf,

        /// Per-block variable bounds: weight,x,y.
        #[arg(long, default_value = "2,2,2", value_name = "K,M,N", value_parser = parse_bounds)]
        bounds: Bounds,

        /// Also compute the value at every subalgebra weight for each hit.
        #[arg(long)]
        with_weights: bool,
    },

    /// Construct a corpus algebra and write it to a file.
    Build {
        #[command(subcommand)]
        family: BuildFamily,
    },
}

#[derive(Subcommand)]
enum BuildFamily {
    /// Groups: cyclic N | dihedral N | symmetric N | quaternion | table FILE.
    Group(BuildArgs),
    /// Commutative rings: zn N | zero-mult N | poly-nilpotent P D | table FILE.
    Ring(BuildArgs),
    /// Loops: nonassoc5 | table FILE.
    Loop(BuildArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Family spec; see the family's help line for the accepted forms.
    #[arg(required = true, value_name = "SPEC")]
    spec: Vec<String>,

    /// Output file.
    #[arg(short, long, value_name = "FILE")]
    out: PathBuf,

    /// Name recorded in the file (table specs only; defaults to the
    /// table file's stem).
    #[arg(long)]
    name: Option<String>,
}

/// Comma- or space-separated element ids.
#[derive(Clone, Debug)]
struct IdList(Vec<usize>);

impl FromStr for IdList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ids = s
            .split([',', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| format!("`{t}` is not an element id"))
            })
            .collect::<Result<Vec<usize>, String>>()?;
        if ids.is_empty() {
            return Err("expected at least one element id".into());
        }
        Ok(IdList(ids))
    }
}

/// Comma-separated `a:b` pairs.
#[derive(Clone, Debug)]
struct PairList(Vec<(usize, usize)>);

impl FromStr for PairList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                let (a, b) = t
                    .split_once(':')
                    .ok_or_else(|| format!("`{t}` is not an `a:b` pair"))?;
                let parse = |p: &str| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("`{p}` is not an element id"))
                };
                Ok((parse(a)?, parse(b)?))
            })
            .collect::<Result<Vec<(usize, usize)>, String>>()
            .map(PairList)
    }
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{p}` is not a number"))
        })
        .collect::<Result<_, String>>()?;
    match parts.as_slice() {
        [k, m, n] if *k >= 1 && *m >= 1 && *n >= 1 => Ok(Bounds::new(*k, *m, *n)),
        [_, _, _] => Err("bounds must be at least 1 in every block".into()),
        _ => Err("expected three comma-separated numbers, e.g. 2,2,2".into()),
    }
}

/// CLI-level errors: library errors keep their classification; usage
/// errors reported after clap's own parsing behave like clap's (exit 2).
enum CliError {
    Lib(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

fn error_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) => 2,
        CliError::Lib(err) => match err {
            Error::MaltsevRequired
            | Error::SizeCap { .. }
            | Error::FreeCap { .. }
            | Error::NotCommutativeRing { .. }
            | Error::Refused { .. } => 1,
            Error::Internal(_) => 3,
            _ => 2,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = wcomm::exec::set_thread_count(n) {
            eprintln!("error: cannot configure {n} worker thread(s): {e}");
            return ExitCode::from(2);
        }
    }
    let caps = Caps::from_env();
    match run(&cli, &caps) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn run(cli: &Cli, caps: &Caps) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Check { algebra } => cmd_check(cli, algebra, caps),
        Command::Commutator {
            algebra,
            x,
            y,
            w,
            bounds,
            normal,
        } => cmd_commutator(cli, algebra, x, y, w, bounds, *normal, caps),
        Command::Smith {
            algebra,
            alpha_pairs,
            alpha_normal,
            beta_pairs,
            beta_normal,
        } => cmd_smith(
            cli,
            algebra,
            alpha_pairs.as_ref(),
            alpha_normal.as_ref(),
            beta_pairs.as_ref(),
            beta_normal.as_ref(),
            caps,
        ),
        Command::CrossValidate {
            algebra,
            x,
            y,
            bounds,
        } => cmd_cross_validate(cli, algebra, x, y, bounds, caps),
        Command::Verify { algebra, bounds } => cmd_verify(cli, algebra, bounds, caps),
        Command::SearchDivergence {
            algebra,
            bounds,
            with_weights,
        } => cmd_search_divergence(cli, algebra, bounds, *with_weights, caps),
        Command::Build { family } => cmd_build(cli, family),
    }
}

fn cmd_check(cli: &Cli, path: &Path, caps: &Caps) -> Result<ExitCode, CliError> {
    let alg = format::load_algebra(path)?;
    let declared: Vec<&str> = alg.declared_properties().collect();
    let maltsev = maltsev_term(&alg, caps);
    let sub_count = count_or_refused(alg.all_subuniverses().map(|v| v.len()))?;
    let cong_count = count_or_refused(congruence::all_congruences(&alg).map(|v| v.len()))?;
    if cli.json {
        let maltsev_json = match &maltsev {
            MaltsevOutcome::Found(t) => {
                json!({"outcome": "found", "term": t.display(alg.signature())})
            }
            MaltsevOutcome::Absent => json!({"outcome": "absent"}),
            MaltsevOutcome::Unknown { reached, cap } => {
                json!({"outcome": "unknown", "reached": reached, "cap": cap})
            }
        };
        emit(
            cli,
            "check",
            json!({
                "name": alg.name(),
                "size": alg.size(),
                "zero": alg.zero(),
                "structure": alg.structure().kind_name(),
                "declared_properties": declared,
                "maltsev": maltsev_json,
                "subuniverse_count": sub_count,
                "congruence_count": cong_count,
            }),
        );
    } else {
        println!(
            "algebra: {} (size {}, zero {})",
            alg.name(),
            alg.size(),
            alg.zero()
        );
        println!("structure: {}", alg.structure().kind_name());
        let declared_line = if declared.is_empty() {
            "(none)".to_string()
        } else {
            declared.join(", ")
        };
        println!("declared: {declared_line}");
        match &maltsev {
            MaltsevOutcome::Found(t) => {
                println!("maltsev term: {}", t.display(alg.signature()))
            }
            MaltsevOutcome::Absent => println!("maltsev term: none in this variety"),
            MaltsevOutcome::Unknown { reached, cap } => {
                println!("maltsev term: unknown (free-algebra search capped at {cap}, reached {reached})")
            }
        }
        match sub_count {
            Some(n) => println!("subuniverses: {n}"),
            None => println!("subuniverses: not enumerated (algebra too large)"),
        }
        match cong_count {
            Some(n) => println!("congruences: {n}"),
            None => println!("congruences: not enumerated (algebra too large)"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Enumeration counts are optional in `check`: a refusal on size grounds
/// degrades to "not enumerated" instead of failing the whole inspection.
fn count_or_refused(r: Result<usize, Error>) -> Result<Option<usize>, CliError> {
    match r {
        Ok(n) => Ok(Some(n)),
        Err(Error::Refused { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_commutator(
    cli: &Cli,
    path: &Path,
    x: &IdList,
    y: &IdList,
    w: &str,
    bounds: &Bounds,
    normal: bool,
    caps: &Caps,
) -> Result<ExitCode, CliError> {
    let alg = format::load_algebra(path)?;
    let xs = alg.subuniverse_generate(&x.0)?;
    let ys = alg.subuniverse_generate(&y.0)?;
    let ws = parse_weight(&alg, w)?;
    let cospan = WeightedCospan::new(&alg, xs, ys, ws)?;
    let result = if normal {
        weighted_normal_commutator(&alg, &cospan, bounds, caps)?
    } else {
        weighted_commutator(&alg, &cospan, bounds, caps)?
    };
    if cli.json {
        emit(
            cli,
            "commutator",
            json!({
                "algebra": alg.name(),
                "x": cospan.x().elements(),
                "y": cospan.y().elements(),
                "w": cospan.w().elements(),
                "normal": normal,
                "result": result.to_json(&alg),
            }),
        );
    } else {
        println!("algebra: {} (size {})", alg.name(), alg.size());
        let kind = if normal {
            "normal weighted commutator"
        } else {
            "weighted commutator"
        };
        println!(
            "{} [X,Y | W] with X = {}, Y = {}, W = {}",
            kind,
            fmt_els(cospan.x().elements()),
            fmt_els(cospan.y().elements()),
            fmt_els(cospan.w().elements()),
        );
        print_result(&alg, &result);
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_weight(alg: &FiniteAlgebra, spec: &str) -> Result<Subuniverse, CliError> {
    match spec.trim() {
        "zero" => Ok(alg.subuniverse_zero()),
        "all" | "full" => {
            let all: Vec<usize> = (0..alg.size()).collect();
            Ok(alg.subuniverse_generate(&all)?)
        }
        other => {
            let ids = other
                .parse::<IdList>()
                .map_err(|e| CliError::Usage(format!("--w: {e}")))?;
            Ok(alg.subuniverse_generate(&ids.0)?)
        }
    }
}

fn print_result(alg: &FiniteAlgebra, r: &CommutatorResult) {
    println!(
        "value: {} ({} element(s))",
        fmt_els(r.value.elements()),
        r.value.len()
    );
    println!("status: {}", r.status.as_str());
    println!("method: {}", r.method.as_str());
    println!(
        "bounds used: k={}, m={}, n={}",
        r.bounds_used.k, r.bounds_used.m, r.bounds_used.n
    );
    println!("witnesses:");
    for (e, w) in &r.witnesses {
        println!("  {e} = {}", fmt_witness(alg, w));
    }
}

fn fmt_witness(alg: &FiniteAlgebra, w: &Witness) -> String {
    let mut bindings = Vec::new();
    let blocks: [(&[El], char); 4] = [
        (&w.assignment.w, 'w'),
        (&w.assignment.x, 'x'),
        (&w.assignment.y, 'y'),
        (&w.assignment.ambient, 'a'),
    ];
    for (values, prefix) in blocks {
        for (i, v) in values.iter().enumerate() {
            bindings.push(format!("{prefix}{}={v}", i + 1));
        }
    }
    let term = w.term.display(alg.signature());
    if bindings.is_empty() {
        term
    } else {
        format!("{term} @ {}", bindings.join(", "))
    }
}

fn cmd_smith(
    cli: &Cli,
    path: &Path,
    alpha_pairs: Option<&PairList>,
    alpha_normal: Option<&IdList>,
    beta_pairs: Option<&PairList>,
    beta_normal: Option<&IdList>,
    caps: &Caps,
) -> Result<ExitCode, CliError> {
    let alg = format::load_algebra(path)?;
    let alpha = congruence_arg(&alg, alpha_pairs, alpha_normal, "alpha")?;
    let beta = congruence_arg(&alg, beta_pairs, beta_normal, "beta")?;
    let value = smith_commutator(&alg, &alpha, &beta, caps)?;
    let zero_class = value.zero_class(&alg)?;
    if cli.json {
        emit(
            cli,
            "smith",
            json!({
                "algebra": alg.name(),
                "alpha_classes": alpha.classes(),
                "beta_classes": beta.classes(),
                "classes": value.classes(),
                "zero_class": zero_class.elements(),
                "is_identity": value.is_identity(),
            }),
        );
    } else {
        println!("algebra: {} (size {})", alg.name(), alg.size());
        println!("alpha: {} class(es)", alpha.classes().len());
        println!("beta: {} class(es)", beta.classes().len());
        println!("[alpha, beta] classes:");
        for class in value.classes() {
            println!("  {}", fmt_els(&class));
        }
        println!("zero class: {}", fmt_els(zero_class.elements()));
        println!(
            "identity congruence: {}",
            if value.is_identity() { "yes" } else { "no" }
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn congruence_arg(
    alg: &FiniteAlgebra,
    pairs: Option<&PairList>,
    normal: Option<&IdList>,
    which: &str,
) -> Result<Congruence, CliError> {
    match (pairs, normal) {
        (Some(p), None) => Ok(congruence::cg(alg, &p.0)?),
        (None, Some(ids)) => {
            let closed = congruence::normal_closure(alg, &ids.0)?;
            let els: Vec<usize> = closed.elements().iter().map(|&e| e as usize).collect();
            Ok(congruence::congruence_from_normal(alg, &els)?)
        }
        _ => Err(CliError::Usage(format!(
            "exactly one of --{which}-pairs / --{which}-normal is required"
        ))),
    }
}

fn cmd_cross_validate(
    cli: &Cli,
    path: &Path,
    x: &IdList,
    y: &IdList,
    bounds: &Bounds,
    caps: &Caps,
) -> Result<ExitCode, CliError> {
    let alg = format::load_algebra(path)?;
    let xs = alg.subuniverse_generate(&x.0)?;
    let ys = alg.subuniverse_generate(&y.0)?;
    let cv = cross_validate(&alg, &xs, &ys, bounds, caps)?;
    let disagreement = cv.disagreement.clone();
    if cli.json {
        emit(cli, "cross-validate", cv.to_json());
    } else {
        println!("algebra: {} (size {})", alg.name(), alg.size());
        println!(
            "normal weight-one commutator of X = {}, Y = {}:",
            fmt_els(xs.elements()),
            fmt_els(ys.elements())
        );
        for r in &cv.routes {
            let status = if r.exact { "exact" } else { "lower bound" };
            println!("  {}: {} ({status})", r.route, fmt_els(&r.value));
        }
        match &disagreement {
            None => println!("routes agree"),
            Some(d) => println!("ROUTE DISAGREEMENT: {d}"),
        }
    }
    if disagreement.is_some() {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cli: &Cli, path: &Path, bounds: &Bounds, caps: &Caps) -> Result<ExitCode, CliError> {
    let alg = format::load_algebra(path)?;
    let report = verify_suite(&alg, bounds, caps)?;
    let hard = report.hard_failures();
    if cli.json {
        emit(cli, "verify", report.to_json());
    } else {
        println!(
            "verification suite for {} (size {})",
            alg.name(),
            alg.size()
        );
        for line in &report.lines {
            let hardness = if line.hard { "hard" } else { "soft" };
            let detail = if line.detail.is_empty() {
                String::new()
            } else {
                format!(" — {}", line.detail)
            };
            println!(
                "  [{}] {} ({hardness}){detail}",
                line.status.as_str(),
                line.name
            );
        }
        if hard > 0 {
            println!("result: {hard} hard failure(s)");
        } else {
            println!("result: ok");
        }
    }
    if hard > 0 {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_search_divergence(
    cli: &Cli,
    path: &Path,
    bounds: &Bounds,
    with_weights: bool,
    caps: &Caps,
) -> Result<ExitCode, CliError> {
    let alg = format::load_algebra(path)?;
    let report = divergence_search(&alg, bounds, with_weights, caps)?;
    if cli.json {
        emit(cli, "search-divergence", report.to_json(&alg));
    } else {
        println!(
            "examined {} subalgebra pair(s) on {} ({} undecided)",
            report.pairs_examined, report.algebra, report.pairs_undecided
        );
        if report.divergences.is_empty() {
            println!("no weight-sensitive pairs found");
        }
        for d in &report.divergences {
            println!("X = {}, Y = {}:", fmt_els(&d.x), fmt_els(&d.y));
            println!("  weight zero: {}", fmt_els(&d.zero_value));
            println!("  weight full: {}", fmt_els(&d.full_value));
            println!("  separating: {}", fmt_els(&d.separating));
            println!(
                "  normal closures: {}",
                if d.normal_diverges {
                    "also diverge"
                } else {
                    "agree"
                }
            );
            if let Some((e, w)) = &d.witness {
                println!("  witness for {e}: {}", fmt_witness(&alg, w));
            }
            for layer in &d.chain {
                let status = if layer.exact { "" } else { " (lower bound)" };
                println!(
                    "  at W = {}: {}{status}",
                    fmt_els(&layer.weight),
                    fmt_els(&layer.value)
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_build(cli: &Cli, family: &BuildFamily) -> Result<ExitCode, CliError> {
    let (alg, out) = match family {
        BuildFamily::Group(args) => (build_group(args)?, &args.out),
        BuildFamily::Ring(args) => (build_ring(args)?, &args.out),
        BuildFamily::Loop(args) => (build_loop(args)?, &args.out),
    };
    format::save_algebra(&alg, out)?;
    if cli.json {
        emit(
            cli,
            "build",
            json!({
                "name": alg.name(),
                "size": alg.size(),
                "path": out.display().to_string(),
            }),
        );
    } else {
        println!(
            "wrote {} (size {}) to {}",
            alg.name(),
            alg.size(),
            out.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn build_group(args: &BuildArgs) -> Result<FiniteAlgebra, CliError> {
    let spec: Vec<&str> = args.spec.iter().map(String::as_str).collect();
    let alg = match spec.as_slice() {
        ["cyclic", n] => builders::cyclic_group(parse_count(n)?),
        ["dihedral", n] => builders::dihedral_group(parse_count(n)?),
        ["symmetric", n] => builders::symmetric_group(parse_count(n)?)?,
        ["quaternion"] => builders::quaternion_group(),
        ["table", file] => {
            let table: Vec<Vec<usize>> = read_json_file(file)?;
            builders::group_from_table(&table_name(args, file), &table)?
        }
        _ => {
            return Err(CliError::Usage(
                "group spec: cyclic N | dihedral N | symmetric N | quaternion | table FILE".into(),
            ))
        }
    };
    reject_stray_name(args, matches!(spec.as_slice(), ["table", _]))?;
    Ok(alg)
}

/// On-disk shape for `build ring table`: the two tables of a
/// commutative non-unital ring.
#[derive(serde::Deserialize)]
struct RingTablesFile {
    add: Vec<Vec<usize>>,
    mul: Vec<Vec<usize>>,
}

fn build_ring(args: &BuildArgs) -> Result<FiniteAlgebra, CliError> {
    let spec: Vec<&str> = args.spec.iter().map(String::as_str).collect();
    let alg = match spec.as_slice() {
        ["zn", n] => builders::ring_zn(parse_count(n)?),
        ["zero-mult", n] => builders::ring_zero_mult(parse_count(n)?),
        ["poly-nilpotent", p, d] => {
            builders::ring_poly_nilpotent(parse_count(p)?, parse_count(d)?)?
        }
        ["table", file] => {
            let tables: RingTablesFile = read_json_file(file)?;
            builders::ring_from_tables(&table_name(args, file), &tables.add, &tables.mul)?
        }
        _ => {
            return Err(CliError::Usage(
                "ring spec: zn N | zero-mult N | poly-nilpotent P D | table FILE".into(),
            ))
        }
    };
    reject_stray_name(args, matches!(spec.as_slice(), ["table", _]))?;
    Ok(alg)
}

fn build_loop(args: &BuildArgs) -> Result<FiniteAlgebra, CliError> {
    let spec: Vec<&str> = args.spec.iter().map(String::as_str).collect();
    let alg = match spec.as_slice() {
        ["nonassoc5"] => builders::nonassoc_loop_5(),
        ["table", file] => {
            let table: Vec<Vec<usize>> = read_json_file(file)?;
            builders::loop_from_table(&table_name(args, file), &table)?
        }
        _ => return Err(CliError::Usage("loop spec: nonassoc5 | table FILE".into())),
    };
    reject_stray_name(args, matches!(spec.as_slice(), ["table", _]))?;
    Ok(alg)
}

fn parse_count(s: &str) -> Result<usize, CliError> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(CliError::Usage(format!("`{s}` is not a positive integer"))),
    }
}

fn read_json_file<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(Error::from)?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn table_name(args: &BuildArgs, file: &str) -> String {
    args.name.clone().unwrap_or_else(|| {
        Path::new(file)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into())
    })
}

/// Builders bake the algebra's name in, so `--name` is meaningful only
/// for table specs; refusing elsewhere beats silently ignoring it.
fn reject_stray_name(args: &BuildArgs, is_table: bool) -> Result<(), CliError> {
    if args.name.is_some() && !is_table {
        return Err(CliError::Usage(
            "--name only applies to `table FILE` specs".into(),
        ));
    }
    Ok(())
}

fn emit(cli: &Cli, command: &str, report: Value) {
    let mut envelope = serde_json::Map::new();
    envelope.insert("command".into(), json!(command));
    envelope.insert("report".into(), report);
    if !cli.no_timestamp {
        envelope.insert("timestamp".into(), json!(unix_now()));
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&Value::Object(envelope))
            .expect("report serialization cannot fail")
    );
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn fmt_els(els: &[El]) -> String {
    let inner: Vec<String> = els.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}
