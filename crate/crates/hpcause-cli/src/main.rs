//! `hpcause`: check actual causes, benchmark strategies, generate
//! synthetic models.
//!
//! Exit codes for `check`: 0 when the candidate is an actual cause,
//! 1 when it is not, 2 on any error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use hpcause::bench::{run_bench, write_csv, BenchConfig, BenchScenario};
use hpcause::checker::{diagnose_non_minimal, NonMinimalityReport};
use hpcause::dsl::{
    parse_assignment_pairs, parse_expression, parse_model, parse_query_document, serialize_model,
};
use hpcause::generate::{generate_abt, generate_binary_tree};
use hpcause::model::context_from_unique_pairs;
use hpcause::{
    check_cause, CausalModel, CausalQuery, CausalityResult, CheckError, CheckOptions, Strategy,
};

#[derive(Parser)]
#[command(name = "hpcause", version, about = "Actual causality checking with SAT solving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a candidate cause actually caused an effect.
    Check(CheckArgs),
    /// Time the checking strategies against scenario files.
    Bench(BenchArgs),
    /// Write a synthetic benchmark model.
    Generate(GenerateArgs),
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Model file (.hpm). Overrides the query file's `model` line.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Query file (.hpq) supplying context/cause/phi/strategy defaults.
    #[arg(long)]
    query: Option<PathBuf>,
    /// Context bindings, e.g. "ST_exo=1, BT_exo=1".
    #[arg(long)]
    context: Option<String>,
    /// Candidate cause, e.g. "ST=1" or "ST=1, BT=1".
    #[arg(long)]
    cause: Option<String>,
    /// Effect formula, e.g. "BS" or "BS & !BH".
    #[arg(long)]
    phi: Option<String>,
    /// BRUTE_FORCE, SAT, SAT_MINIMAL, or SAT_COMBINED.
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Wall-clock limit for the check, in seconds. 0 disables it.
    #[arg(long, env = "HPCAUSE_TIMEOUT_SECS", default_value_t = 300)]
    timeout_secs: u64,
    /// Cap on brute-force candidate sets. 0 disables it.
    #[arg(long, default_value_t = 1 << 22)]
    brute_budget: u64,
    /// Skip the non-minimality diagnosis when AC3 fails.
    #[arg(long)]
    no_diagnose: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Scenario query files; each needs a `model` line.
    #[arg(long = "scenario", required = true)]
    scenarios: Vec<PathBuf>,
    /// Comma-separated strategies to compare. Defaults to all four.
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<Strategy>,
    #[arg(long, default_value_t = 100)]
    warmup: u32,
    #[arg(long, default_value_t = 100)]
    measure: u32,
    /// Per-iteration limit, in seconds.
    #[arg(long, env = "HPCAUSE_TIMEOUT_SECS", default_value_t = 300)]
    timeout_secs: u64,
    /// Cap on brute-force candidate sets. 0 means none: slow cells
    /// time out instead of erroring.
    #[arg(long, default_value_t = 0)]
    brute_budget: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    family: Family,
    /// Tree height in levels; the tree has 2^height - 1 gates.
    #[arg(long)]
    height: u32,
    /// Model output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Complete binary tree of OR gates.
    BinaryTree,
    /// Binary tree with the armed-backup gadget.
    Abt,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => check(args),
        Command::Bench(args) => bench(args).map(|()| ExitCode::SUCCESS),
        Command::Generate(args) => generate(args).map(|()| ExitCode::SUCCESS),
    };
    outcome.unwrap_or_else(|err| {
        eprintln!("error: {err}");
        let mut source = err.source();
        while let Some(cause) = source {
            eprintln!("  caused by: {cause}");
            source = cause.source();
        }
        ExitCode::from(2)
    })
}

type Failure = Box<dyn std::error::Error>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()).into())
}

fn load_model(path: &Path) -> Result<CausalModel, Failure> {
    parse_model(&read(path)?).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn check(args: CheckArgs) -> Result<ExitCode, Failure> {
    let doc = match &args.query {
        Some(path) => Some(
            parse_query_document(&read(path)?)
                .map_err(|e| format!("{}: {e}", path.display()))?,
        ),
        None => None,
    };

    let model_path = args.model.clone().or_else(|| {
        let referenced = doc.as_ref()?.model_path.as_ref()?;
        // Paths in a query file are relative to the file itself.
        let base = args.query.as_ref()?.parent()?;
        Some(base.join(referenced))
    });
    let Some(model_path) = model_path else {
        return Err("no model: pass --model or a query file with a `model` line".into());
    };
    let model = load_model(&model_path)?;

    let context = match &args.context {
        Some(text) => context_from_unique_pairs(parse_assignment_pairs(text)?)?,
        None => {
            let doc = doc.as_ref().ok_or("no context: pass --context or a query file")?;
            context_from_unique_pairs(doc.context.iter().cloned())?
        }
    };
    let cause = match &args.cause {
        Some(text) => parse_assignment_pairs(text)?,
        None => doc.as_ref().ok_or("no cause: pass --cause or a query file")?.cause.clone(),
    };
    let phi = match &args.phi {
        Some(text) => parse_expression(text)?,
        None => doc.as_ref().ok_or("no phi: pass --phi or a query file")?.phi.clone(),
    };
    let strategy = args
        .strategy
        .or(doc.as_ref().and_then(|d| d.strategy))
        .unwrap_or(Strategy::Sat);

    let query = CausalQuery::new(&model, context, cause, phi, strategy)?;
    let opts = CheckOptions {
        brute_budget: (args.brute_budget > 0).then_some(args.brute_budget),
        timeout: (args.timeout_secs > 0).then(|| Duration::from_secs(args.timeout_secs)),
        diagnose: false,
    };
    let result = check_cause(&query, &opts)?;

    // Diagnosis runs separately so that a budget or timeout there
    // degrades to a note instead of discarding the verdict.
    let diagnosis: Option<Result<NonMinimalityReport, CheckError>> =
        (!result.ac3 && !args.no_diagnose).then(|| diagnose_non_minimal(&query, &opts));

    match args.format {
        Format::Text => print_text(&model, &query, &result, diagnosis.as_ref()),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&to_json(&model, &result, diagnosis.as_ref()))
                .expect("JSON trees built here always serialize")
        ),
    }
    Ok(ExitCode::from(u8::from(!result.is_cause)))
}

fn format_pairs(pairs: &[(hpcause::VarId, bool)]) -> String {
    let parts: Vec<String> = pairs.iter().map(|(v, x)| format!("{v}={}", *x as u8)).collect();
    parts.join(", ")
}

fn print_text(
    model: &CausalModel,
    query: &CausalQuery,
    result: &CausalityResult,
    diagnosis: Option<&Result<NonMinimalityReport, CheckError>>,
) {
    let held = |b: bool| if b { "holds" } else { "fails" };
    println!("model: {}", model.name());
    println!("cause: {}", format_pairs(query.cause()));
    println!("phi: {}", query.phi());
    println!("strategy: {}", result.strategy);
    println!("AC1: {}", held(result.ac1));
    match &result.w {
        Some(w) if w.is_empty() => println!("AC2: holds (W is empty)"),
        Some(w) => {
            let tag = if result.w_minimal { "minimal W" } else { "W" };
            println!("AC2: holds ({tag} = {{{}}})", format_pairs(w));
        }
        None => println!("AC2: fails"),
    }
    println!("AC3: {}", held(result.ac3));
    match diagnosis {
        Some(Ok(report)) => println!("{report}"),
        Some(Err(err)) => println!("diagnosis skipped: {err}"),
        None => {}
    }
    let verdict = if result.is_cause { "an actual cause" } else { "not an actual cause" };
    println!("verdict: {} is {verdict} of {}", format_pairs(query.cause()), query.phi());
    println!(
        "timings: ac1 {:?}, ac2 {:?}, ac3 {:?}",
        result.timings.ac1, result.timings.ac2, result.timings.ac3
    );
}

fn to_json(
    model: &CausalModel,
    result: &CausalityResult,
    diagnosis: Option<&Result<NonMinimalityReport, CheckError>>,
) -> serde_json::Value {
    let pairs = |w: &[(hpcause::VarId, bool)]| {
        w.iter()
            .map(|(v, x)| serde_json::json!({"variable": v.name(), "value": x}))
            .collect::<Vec<_>>()
    };
    let (diag, diag_error) = match diagnosis {
        Some(Ok(report)) => {
            let offenders: Vec<_> = report
                .offenders
                .iter()
                .map(|o| {
                    serde_json::json!({
                        "variable": o.variable.name(),
                        "claimed": o.claimed,
                        "condition": o.condition.to_string(),
                        "witness_subset": pairs(&o.witness_subset),
                    })
                })
                .collect();
            (serde_json::json!(offenders), serde_json::Value::Null)
        }
        Some(Err(err)) => (serde_json::Value::Null, serde_json::json!(err.to_string())),
        None => (serde_json::Value::Null, serde_json::Value::Null),
    };
    serde_json::json!({
        "model": model.name(),
        "strategy": result.strategy.to_string(),
        "ac1": result.ac1,
        "ac2": result.ac2,
        "w": result.w.as_deref().map(pairs),
        "w_minimal": result.w_minimal,
        "ac3": result.ac3,
        "is_cause": result.is_cause,
        "diagnosis": diag,
        "diagnosis_error": diag_error,
        "timings_ns": {
            "ac1": result.timings.ac1.as_nanos() as u64,
            "ac2": result.timings.ac2.as_nanos() as u64,
            "ac3": result.timings.ac3.as_nanos() as u64,
        },
    })
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let mut loaded: Vec<(String, CausalModel, hpcause::dsl::QueryDocument)> = Vec::new();
    for path in &args.scenarios {
        let doc = parse_query_document(&read(path)?)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let Some(model_ref) = &doc.model_path else {
            return Err(format!("{}: scenario files need a `model` line", path.display()).into());
        };
        let base = path.parent().unwrap_or(Path::new("."));
        let model = load_model(&base.join(model_ref))?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        loaded.push((id, model, doc));
    }

    let scenarios: Vec<BenchScenario> = loaded
        .iter()
        .map(|(id, model, doc)| {
            let query = hpcause::dsl::resolve_query(doc, model)
                .map_err(|e| format!("scenario {id}: {e}"))?;
            Ok(BenchScenario::new(id.clone(), query))
        })
        .collect::<Result<_, Failure>>()?;

    let config = BenchConfig {
        strategies: if args.strategies.is_empty() {
            Strategy::ALL.to_vec()
        } else {
            args.strategies.clone()
        },
        warmup: args.warmup,
        measure: args.measure,
        timeout: Duration::from_secs(args.timeout_secs),
        brute_budget: (args.brute_budget > 0).then_some(args.brute_budget),
        jobs: args.jobs,
    };
    let records = run_bench(&scenarios, &config);
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            write_csv(&records, file)?;
        }
        None => write_csv(&records, std::io::stdout().lock())?,
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    let model = match args.family {
        Family::BinaryTree => generate_binary_tree(args.height),
        Family::Abt => generate_abt(args.height),
    };
    let text = serialize_model(&model);
    match &args.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    eprintln!(
        "{}: {} endogenous, {} exogenous",
        model.name(),
        model.num_endogenous(),
        model.num_exogenous()
    );
    Ok(())
}
