//! Command-line front end for the hermrel library.
//!
//! One subcommand per task: `field-info`, `points`, `inflexions`,
//! `classify`, `equiv`, `table1`, `solve`, `sweep` and `verify-all`.  Every
//! report goes to stdout in the format picked by `--format` (text, json or
//! csv); progress and timing notes go to stderr, so stdout stays
//! byte-stable for a given invocation.  JSON output follows the schemas in
//! `docs/schemas/`.
//!
//! Exit codes: 0 on success (including "not equivalent" answers), 1 when a
//! sweep or `verify-all` reports violations, 2 on usage errors (bad flags,
//! malformed matrices, singular input, out-of-range element codes).
//!
//! Sampling is always seeded: `--seed` defaults to a fixed constant, so two
//! runs of the same command line produce identical reports.  `sweep` is the
//! only subcommand that uses worker threads (`--workers`); everything else
//! is single-threaded.  The environment variable `HERMREL_MAX_Q` raises the
//! field-size budget (default 2^20) for the big extension fields.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hermrel::census::{run_sweep, CheckSet, SweepMode, SweepPlan, SweepReport, DEFAULT_SEED};
use hermrel::classify::{
    class_census, classification_report, classify, equivalent, table1_csv, EquivMethod,
    DEFAULT_BRUTEFORCE_BUDGET,
};
use hermrel::curve::{point_report, Curve, PointReport};
use hermrel::field::{build_from_spec_with, FieldCtx, DEFAULT_MAX_Q};
use hermrel::projective::{format_mat3, mat3_codes, parse_mat3};
use hermrel::suite;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "hermrel",
    version,
    about = "Curves (x^r, y^r, z^r)·A·(x, y, z)^t = 0 over fields of square order: \
             points, inflexions, classification, verification sweeps"
)]
struct Cli {
    /// Field spec p^e[:code] with e = 2m even, e.g. 2^2, 3^2 or 3^2:10
    #[arg(long, global = true, value_name = "SPEC")]
    field: Option<String>,

    /// Report format on stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Table sizes, modulus, generator and code convention of the field
    FieldInfo,
    /// Rational points and inflexions of the curve given by a matrix
    Points(MatrixArg),
    /// Just the rational inflexions of the curve
    Inflexions(MatrixArg),
    /// Type (A/B/C), invariant and normalizing transform of the curve
    Classify(MatrixArg),
    /// Decide projective equivalence of two curves, with a witness
    Equiv(EquivArgs),
    /// Census of the curves x^r y + ω x y^r + z^(r+1) = 0 by type
    #[command(name = "table1")]
    Table1,
    /// Solve one of the three standard equation shapes over the field
    Solve {
        #[command(subcommand)]
        equation: SolveCommand,
    },
    /// Check curve statements over many matrices, exhaustively or sampled
    Sweep(SweepArgs),
    /// Run the whole verification battery for one field
    VerifyAll,
}

#[derive(Args)]
struct MatrixArg {
    /// Nine element codes, row-major, e.g. "0 1 0 4 0 0 0 0 1"
    #[arg(long, value_name = "CODES")]
    matrix: String,
}

#[derive(Args)]
struct EquivArgs {
    /// First matrix: nine element codes, row-major
    #[arg(value_name = "A")]
    a: String,
    /// Second matrix: nine element codes, row-major
    #[arg(value_name = "B")]
    b: String,
    /// Search PGL(3, q) directly instead of using the classification
    #[arg(long)]
    bruteforce: bool,
    /// Largest PGL(3, q) the direct search will enumerate
    #[arg(long, value_name = "N", default_value_t = DEFAULT_BRUTEFORCE_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum SolveCommand {
    /// X^r − X = β
    ArtinSchreier {
        #[arg(long, value_name = "CODE")]
        beta: u64,
    },
    /// X^(r−1) = β
    Kummer {
        #[arg(long, value_name = "CODE")]
        beta: u64,
    },
    /// X^r + αX + β = 0
    Semilinear {
        #[arg(long, value_name = "CODE")]
        alpha: u64,
        #[arg(long, value_name = "CODE")]
        beta: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    /// Point count satisfies N ≡ 1 (mod r)
    Congruence,
    /// Congruence plus the range of m = (N−1)/r
    Bounds,
    /// All checks: congruence, m-range, mirror, dual, multiplicity
    Props,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct SweepArgs {
    /// Which checks to run (defaults to the plan file's choice, or all)
    #[arg(value_enum)]
    kind: Option<SweepKind>,
    /// Plan file with key = value lines; flags override its values
    #[arg(long, value_name = "FILE")]
    plan: Option<std::path::PathBuf>,
    /// Matrix source; --count implies sampled
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// How many matrices to sample
    #[arg(long, value_name = "N")]
    count: Option<u64>,
    /// RNG seed for sampled sweeps
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads (results do not depend on this)
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Run the multiplicity check over F_{q^2} for this many of the first
    /// enumerated matrices
    #[arg(long = "ext-count", value_name = "N")]
    ext_count: Option<u64>,
    /// Largest matrix space an exhaustive sweep may enumerate
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
}

fn main() {
    // die quietly when stdout closes early, e.g. when piped into `head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}

fn run(cli: &Cli) -> Result<i32, String> {
    match &cli.command {
        Command::FieldInfo => cmd_field_info(cli),
        Command::Points(args) => cmd_points(cli, args),
        Command::Inflexions(args) => cmd_inflexions(cli, args),
        Command::Classify(args) => cmd_classify(cli, args),
        Command::Equiv(args) => cmd_equiv(cli, args),
        Command::Table1 => cmd_table1(cli),
        Command::Solve { equation } => cmd_solve(cli, equation),
        Command::Sweep(args) => cmd_sweep(cli, args),
        Command::VerifyAll => cmd_verify_all(cli),
    }
}

/// Field-size budget: HERMREL_MAX_Q when set, otherwise the default.
fn max_q_budget() -> Result<u64, String> {
    match std::env::var("HERMREL_MAX_Q") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("HERMREL_MAX_Q must be a positive integer, got `{text}`")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_Q),
        Err(e) => Err(format!("HERMREL_MAX_Q: {e}")),
    }
}

fn field_ctx(cli: &Cli) -> Result<FieldCtx, String> {
    let spec = cli
        .field
        .as_deref()
        .ok_or("this subcommand needs --field, e.g. --field 3^2")?;
    build_from_spec_with(spec, max_q_budget()?).map_err(|e| e.to_string())
}

fn curve_from<'a>(ctx: &'a FieldCtx, matrix: &str) -> Result<Curve<'a>, String> {
    let m = parse_mat3(ctx, matrix)?;
    Curve::new(ctx, m).map_err(|e| e.to_string())
}

fn codes_line(codes: &[u32]) -> String {
    codes.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn csv_escape(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

// ---------------------------------------------------------------------------
// field-info
// ---------------------------------------------------------------------------

fn cmd_field_info(cli: &Cli) -> Result<i32, String> {
    let ctx = field_ctx(cli)?;
    let params = ctx.params();
    let degree = 2 * params.m;
    match cli.format {
        Format::Json => print_json(&json!({
            "spec": ctx.spec_string(),
            "q": ctx.q(),
            "r": ctx.sqrt_q(),
            "p": params.p,
            "degree": degree,
            "modulus": params.modulus_string(),
            "modulus_code": params.modulus_code(),
            "generator": ctx.generator().code(),
        })),
        Format::Csv => {
            println!("key,value");
            println!("spec,{}", ctx.spec_string());
            println!("q,{}", ctx.q());
            println!("r,{}", ctx.sqrt_q());
            println!("p,{}", params.p);
            println!("degree,{degree}");
            println!("modulus,{}", params.modulus_string());
            println!("modulus_code,{}", params.modulus_code());
            println!("generator,{}", ctx.generator().code());
        }
        Format::Text => {
            println!("field: F_{} = F_{}[t]/({})", ctx.q(), params.p, params.modulus_string());
            println!("spec: {}", ctx.spec_string());
            println!("q: {}", ctx.q());
            println!("r: {}", ctx.sqrt_q());
            println!("degree: {degree}");
            println!("modulus_code: {}", params.modulus_code());
            println!("generator: {}", ctx.generator().code());
            println!("codes: the element sum a_i t^i has code sum a_i p^i");
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// points / inflexions
// ---------------------------------------------------------------------------

fn cmd_points(cli: &Cli, args: &MatrixArg) -> Result<i32, String> {
    let ctx = field_ctx(cli)?;
    let curve = curve_from(&ctx, &args.matrix)?;
    let report = point_report(&curve);
    match cli.format {
        Format::Json => print_json(&report),
        Format::Csv => {
            println!("section,x,y,z");
            for p in &report.points {
                println!("point,{},{},{}", p[0], p[1], p[2]);
            }
            for p in &report.inflexions {
                println!("inflexion,{},{},{}", p[0], p[1], p[2]);
            }
        }
        Format::Text => {
            print_points_text(&report);
        }
    }
    Ok(0)
}

fn print_points_text(report: &PointReport) {
    println!("q: {}", report.q);
    println!("A: {}", codes_line(&report.a));
    println!("N = {}", report.n);
    println!("points:");
    for p in &report.points {
        println!("  {}", codes_line(p));
    }
    println!("inflexions ({}):", report.inflexions.len());
    for p in &report.inflexions {
        println!("  {}", codes_line(p));
    }
}

fn cmd_inflexions(cli: &Cli, args: &MatrixArg) -> Result<i32, String> {
    let ctx = field_ctx(cli)?;
    let curve = curve_from(&ctx, &args.matrix)?;
    let report = point_report(&curve);
    match cli.format {
        Format::Json => print_json(&json!({
            "q": report.q,
            "A": report.a,
            "count": report.inflexions.len(),
            "inflexions": report.inflexions,
        })),
        Format::Csv => {
            println!("x,y,z");
            for p in &report.inflexions {
                println!("{},{},{}", p[0], p[1], p[2]);
            }
        }
        Format::Text => {
            println!("q: {}", report.q);
            println!("A: {}", codes_line(&report.a));
            println!("count = {}", report.inflexions.len());
            for p in &report.inflexions {
                println!("  {}", codes_line(p));
            }
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// classify / equiv / table1
// ---------------------------------------------------------------------------

fn cmd_classify(cli: &Cli, args: &MatrixArg) -> Result<i32, String> {
    let ctx = field_ctx(cli)?;
    let curve = curve_from(&ctx, &args.matrix)?;
    let report = classification_report(&curve, &classify(&curve));
    match cli.format {
        Format::Json => print_json(&report),
        Format::Csv => {
            let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
            println!("key,value");
            println!("q,{}", report.q);
            println!("A,{}", codes_line(&report.a));
            println!("type,{}", report.label);
            println!("invariant,{}", opt(report.invariant));
            println!("omega,{}", opt(report.omega));
            println!(
                "transform,{}",
                report.transform.map(|t| codes_line(&t)).unwrap_or_default()
            );
            println!("n_points,{}", report.n_points);
            println!("n_inflexions,{}", report.n_inflexions);
        }
        Format::Text => {
            let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
            println!("q: {}", report.q);
            println!("A: {}", codes_line(&report.a));
            println!("type: {}", report.label);
            println!("invariant: {}", opt(report.invariant));
            println!("omega: {}", opt(report.omega));
            println!(
                "transform: {}",
                report.transform.map(|t| codes_line(&t)).unwrap_or_else(|| "-".into())
            );
            println!("N: {}", report.n_points);
            println!("inflexions: {}", report.n_inflexions);
        }
    }
    Ok(0)
}

fn cmd_equiv(cli: &Cli, args: &EquivArgs) -> Result<i32, String> {
    let ctx = field_ctx(cli)?;
    let a = curve_from(&ctx, &args.a)?;
    let b = curve_from(&ctx, &args.b)?;
    let (method, method_name) = if args.bruteforce {
        (EquivMethod::BruteForce { budget: args.budget }, "bruteforce")
    } else {
        (EquivMethod::Theorem, "theorem")
    };
    let witness = equivalent(&a, &b, method).map_err(|e| {
        if args.bruteforce {
            e.to_string()
        } else {
            format!("{e}; try --bruteforce")
        }
    })?;
    let witness_codes = witness.as_ref().map(|t| mat3_codes(t.mat()));
    match cli.format {
        Format::Json => print_json(&json!({
            "q": ctx.q(),
            "A": mat3_codes(a.matrix().mat()),
            "B": mat3_codes(b.matrix().mat()),
            "method": method_name,
            "equivalent": witness.is_some(),
            "witness": witness_codes,
        })),
        Format::Csv => {
            println!("key,value");
            println!("q,{}", ctx.q());
            println!("A,{}", format_mat3(a.matrix().mat()));
            println!("B,{}", format_mat3(b.matrix().mat()));
            println!("method,{method_name}");
            println!("equivalent,{}", witness.is_some());
            println!("witness,{}", witness_codes.map(|w| codes_line(&w)).unwrap_or_default());
        }
        Format::Text => {
            println!("q: {}", ctx.q());
            println!("A: {}", format_mat3(a.matrix().mat()));
            println!("B: {}", format_mat3(b.matrix().mat()));
            println!("method: {method_name}");
            match witness_codes {
                Some(w) => {
                    println!("equivalent: yes");
                    println!("witness: {}", codes_line(&w));
                }
                None => println!("equivalent: no"),
            }
        }
    }
    Ok(0)
}

fn cmd_table1(cli: &Cli) -> Result<i32, String> {
    let ctx = field_ctx(cli)?;
    let report = class_census(&ctx);
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    match cli.format {
        Format::Json => print_json(&report),
        // the text rendering of a table is the table itself
        Format::Csv | Format::Text => print!("{}", table1_csv(&report)),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn cmd_solve(cli: &Cli, equation: &SolveCommand) -> Result<i32, String> {
    let ctx = field_ctx(cli)?;
    let r = ctx.sqrt_q();
    let (kind, alpha, beta, rendered, roots) = match *equation {
        SolveCommand::ArtinSchreier { beta } => {
            let b = ctx.elem(beta).map_err(|e| e.to_string())?;
            let roots = ctx.solve_artin_schreier(b);
            ("artin_schreier", None, beta, format!("X^{r} - X = {beta}"), roots)
        }
        SolveCommand::Kummer { beta } => {
            let b = ctx.elem(beta).map_err(|e| e.to_string())?;
            let roots = ctx.solve_kummer(b).map_err(|e| e.to_string())?;
            ("kummer", None, beta, format!("X^{} = {beta}", r - 1), roots)
        }
        SolveCommand::Semilinear { alpha, beta } => {
            let a = ctx.elem(alpha).map_err(|e| e.to_string())?;
            let b = ctx.elem(beta).map_err(|e| e.to_string())?;
            let roots = ctx.solve_semilinear(a, b).map_err(|e| e.to_string())?;
            ("semilinear", Some(alpha), beta, format!("X^{r} + {alpha}·X + {beta} = 0"), roots)
        }
    };
    let root_codes: Vec<u32> = roots.iter().map(|x| x.code()).collect();
    match cli.format {
        Format::Json => print_json(&json!({
            "q": ctx.q(),
            "kind": kind,
            "equation": rendered,
            "alpha": alpha,
            "beta": beta,
            "roots": root_codes,
            "count": root_codes.len(),
        })),
        Format::Csv => {
            println!("root");
            for code in &root_codes {
                println!("{code}");
            }
        }
        Format::Text => {
            println!("q: {}", ctx.q());
            println!("equation: {rendered}");
            if root_codes.is_empty() {
                println!("roots: (none)");
            } else {
                println!("roots: {}", codes_line(&root_codes));
            }
            println!("count: {}", root_codes.len());
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<i32, String> {
    let file_plan = match &args.plan {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read plan file {}: {e}", path.display()))?;
            Some(SweepPlan::parse(&text).map_err(|e| e.to_string())?)
        }
        None => None,
    };

    // the --field flag wins over the plan file's field
    let spec = match (cli.field.as_deref(), &file_plan) {
        (Some(s), _) => s.to_string(),
        (None, Some(plan)) => plan.field.clone(),
        (None, None) => return Err("sweep needs --field or --plan".into()),
    };
    let ctx = build_from_spec_with(&spec, max_q_budget()?).map_err(|e| e.to_string())?;

    let (base_mode, base_checks, base_workers, base_ext, base_budget) = match &file_plan {
        Some(plan) => {
            (plan.mode, plan.checks, plan.workers, plan.extension_count, plan.exhaustive_budget)
        }
        None => {
            let default = SweepPlan::new(&ctx, SweepMode::Exhaustive, CheckSet::all());
            (default.mode, default.checks, default.workers, 0, default.exhaustive_budget)
        }
    };

    let (base_count, base_seed) = match base_mode {
        SweepMode::Sampled { count, seed } => (Some(count), seed),
        SweepMode::Exhaustive => (None, DEFAULT_SEED),
    };
    let sampled = match args.mode {
        Some(ModeArg::Sampled) => true,
        Some(ModeArg::Exhaustive) => false,
        None => args.count.is_some() || base_count.is_some(),
    };
    let mode = if sampled {
        let count = args.count.or(base_count).ok_or("sampled sweeps need --count")?;
        SweepMode::Sampled { count, seed: args.seed.unwrap_or(base_seed) }
    } else {
        if args.count.is_some() {
            return Err("--count only applies to sampled sweeps".into());
        }
        if args.seed.is_some() {
            return Err("--seed only applies to sampled sweeps".into());
        }
        SweepMode::Exhaustive
    };

    let checks = match args.kind {
        Some(SweepKind::Congruence) => CheckSet::congruence_only(),
        Some(SweepKind::Bounds) => CheckSet::bounds(),
        Some(SweepKind::Props) => CheckSet::all(),
        None => base_checks,
    };

    let mut plan = SweepPlan::new(&ctx, mode, checks);
    plan.workers = args.workers.unwrap_or(base_workers);
    plan.extension_count = args.ext_count.unwrap_or(base_ext);
    plan.exhaustive_budget = args.budget.unwrap_or(base_budget);

    let report = run_sweep(&ctx, &plan).map_err(|e| e.to_string())?;
    eprintln!(
        "checked {} curves in {:.2}s",
        report.totals.checked,
        report.elapsed.as_secs_f64()
    );
    match cli.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
        Format::Text => print_sweep_text(&report),
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn print_sweep_text(report: &SweepReport) {
    println!("field: {}", report.plan.field);
    match report.plan.mode {
        SweepMode::Exhaustive => println!("mode: exhaustive"),
        SweepMode::Sampled { count, seed } => {
            println!("mode: sampled count={count} seed={seed}")
        }
    }
    println!("checks: {}", report.plan.checks.names().join(" "));
    println!("extension_count: {}", report.plan.extension_count);
    println!("enumerated: {}", report.totals.enumerated);
    println!("singular: {}", report.totals.singular);
    println!("checked: {}", report.totals.checked);
    println!("extension_checked: {}", report.totals.extension_checked);
    let histogram = |rows: &[[u64; 2]]| {
        rows.iter().map(|[v, n]| format!("{v}:{n}")).collect::<Vec<_>>().join(" ")
    };
    println!("m: {}", histogram(&report.m_histogram));
    println!("inflexions: {}", histogram(&report.inflexion_histogram));
    println!("violations: {}", report.violations.len());
    for v in &report.violations {
        println!("  {} A={} {}", v.check, codes_line(&v.a), v.detail);
    }
}

// ---------------------------------------------------------------------------
// verify-all
// ---------------------------------------------------------------------------

fn cmd_verify_all(cli: &Cli) -> Result<i32, String> {
    let ctx = field_ctx(cli)?;
    let outcomes = suite::verify_field(&ctx);
    for outcome in &outcomes {
        eprintln!("{}", outcome.line_with_timing());
    }
    match cli.format {
        Format::Json => print_json(&outcomes),
        Format::Csv => {
            println!("criterion,passed,detail");
            for o in &outcomes {
                println!("{},{},{}", o.criterion, o.passed, csv_escape(&o.detail));
            }
        }
        Format::Text => {
            for o in &outcomes {
                println!("{}", o.line());
            }
        }
    }
    Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 })
}
