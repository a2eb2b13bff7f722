use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hyperbip::diffusion::{DiffusionConfig, Start};
use hyperbip::io::{
    format_hypergraph, format_labels, labels_to_bipartition, read_hypergraph, read_labels, write_trace, ResultRecord,
};
use hyperbip::metrics::{accuracy, f1_pair, run_algorithm, run_experiment, summary_csv, Algorithm, ExperimentGrid};
use hyperbip::rate::compute_rate;
use hyperbip::synth::{generate, ModelParams};
use hyperbip::{Bipartition, Error, ErrorClass, Hypergraph};

#[derive(Parser)]
#[command(
    name = "hyperbip",
    version,
    about = "Find densely connected vertex-set pairs in hypergraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a two-cluster random hypergraph.
    Generate(GenerateArgs),
    /// Run the exact diffusion and sweep its result.
    Fbc(RunArgs),
    /// Run the approximate (even-split) diffusion and sweep its result.
    Fbca(RunArgs),
    /// Sweep the smallest eigenvector of the clique reduction.
    Cliquecut(RunArgs),
    /// Score a result record against ground-truth labels.
    Eval(EvalArgs),
    /// Run a benchmark grid described by a JSON file.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hypergraph output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the planted clusters here (`0` left, `1` right).
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Hypergraph file.
    input: PathBuf,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    theta: f64,
    #[arg(long, default_value_t = 1000)]
    max_steps: usize,
    /// `clique`, `random:SEED` or `file:PATH`.
    #[arg(long, default_value = "clique", value_parser = parse_start)]
    start: StartSpec,
    /// Residual tolerance of the eigensolver.
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    eigen_tol: f64,
    /// Write the per-step trajectory as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the rate computation's partition trace at the final vector as
    /// JSON lines (diffusions only).
    #[arg(long)]
    rate_trace: Option<PathBuf>,
    /// Ground-truth labels; fills in F1 and accuracy.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// The two labels to compare against, as `A,B`.
    #[arg(long, value_parser = parse_clusters)]
    clusters: Option<(String, String)>,
    /// Result record output; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Result record JSON written by `fbc`, `fbca` or `cliquecut`.
    result: PathBuf,
    /// Labels file (`<vertex-id> <label>` per line).
    labels: PathBuf,
    /// The hypergraph the result was computed on.
    #[arg(long)]
    hypergraph: PathBuf,
    #[arg(long, value_parser = parse_clusters)]
    clusters: Option<(String, String)>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Grid description (JSON).
    grid: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Summary CSV output; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Full results (per trial and summary) as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Debug)]
enum StartSpec {
    Clique,
    Random(u64),
    File(PathBuf),
}

fn parse_start(s: &str) -> Result<StartSpec, String> {
    if s == "clique" {
        return Ok(StartSpec::Clique);
    }
    if let Some(seed) = s.strip_prefix("random:") {
        return seed
            .parse()
            .map(StartSpec::Random)
            .map_err(|_| format!("invalid seed `{seed}`"));
    }
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(StartSpec::File(PathBuf::from(path)));
    }
    Err("expected `clique`, `random:SEED` or `file:PATH`".into())
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn parse_clusters(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err("expected two labels separated by a comma".into()),
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e.class() {
                ErrorClass::Data => ExitCode::from(2),
                ErrorClass::Numerical => ExitCode::from(3),
            }
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate(args) => cmd_generate(args),
        Command::Fbc(args) => Ok(cmd_run(Algorithm::Fbc, args)?),
        Command::Fbca(args) => Ok(cmd_run(Algorithm::Fbca, args)?),
        Command::Cliquecut(args) => Ok(cmd_run(Algorithm::CliqueCut, args)?),
        Command::Eval(args) => Ok(cmd_eval(args)?),
        Command::Experiment(args) => Ok(cmd_experiment(args)?),
    }
}

fn emit(path: Option<&Path>, text: &str) -> hyperbip::Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let params = ModelParams {
        n: args.n,
        r: args.r,
        p: args.p,
        q: args.q,
        seed: args.seed,
    };
    params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let (h, truth) = generate(&params)?;
    if let Some(path) = &args.labels {
        fs::write(path, format_labels(&truth)).map_err(Error::from)?;
    }
    Ok(emit(args.out.as_deref(), &format_hypergraph(&h))?)
}

fn read_start(path: &Path, n: usize) -> hyperbip::Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let values = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'))
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
        .map(|(line, t)| {
            t.parse::<f64>().map_err(|_| {
                Error::Parse(hyperbip::io::ParseError {
                    line,
                    message: format!("invalid number `{t}`"),
                })
            })
        })
        .collect::<hyperbip::Result<Vec<f64>>>()?;
    if values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: values.len(),
        });
    }
    Ok(values)
}

fn truth_from(labels: &Path, clusters: Option<&(String, String)>, n: usize) -> hyperbip::Result<Bipartition> {
    let labels = read_labels(labels, n)?;
    labels_to_bipartition(&labels, clusters.map(|(a, b)| (a.as_str(), b.as_str())))
}

fn cmd_run(algorithm: Algorithm, args: RunArgs) -> hyperbip::Result<()> {
    let h = read_hypergraph(&args.input)?;
    let start = match &args.start {
        StartSpec::Clique => Start::Clique,
        StartSpec::Random(seed) => Start::Random(*seed),
        StartSpec::File(path) => Start::Vector(read_start(path, h.vertex_count())?),
    };
    let config = DiffusionConfig {
        epsilon: args.epsilon,
        theta: args.theta,
        max_steps: args.max_steps,
        eigen_tol: args.eigen_tol,
        start,
        ..DiffusionConfig::default()
    };
    let truth = match &args.labels {
        Some(path) => Some(truth_from(path, args.clusters.as_ref(), h.vertex_count())?),
        None => None,
    };
    let out = run_algorithm(&h, algorithm, &config)?;

    if let (Some(path), Some(d)) = (&args.trace, &out.diffusion) {
        write_trace(BufWriter::new(fs::File::create(path)?), &d.state.records)?;
    }
    if let (Some(path), Some(d)) = (&args.rate_trace, &out.diffusion) {
        write_rate_trace(path, &h, &d.state.f)?;
    }

    let (left, right) = ResultRecord::one_based(&out.part);
    let start_name = match &args.start {
        StartSpec::Clique => "clique".to_string(),
        StartSpec::Random(seed) => format!("random:{seed}"),
        StartSpec::File(path) => format!("file:{}", path.display()),
    };
    let params = match algorithm {
        Algorithm::CliqueCut => json!({ "eigen_tol": args.eigen_tol }),
        _ => json!({
            "epsilon": args.epsilon,
            "theta": args.theta,
            "max_steps": args.max_steps,
            "start": start_name,
            "eigen_tol": args.eigen_tol,
        }),
    };
    let record = ResultRecord {
        algorithm: algorithm.name().to_string(),
        params,
        left,
        right,
        beta_hyper: out.beta_hyper,
        beta_graph: Some(out.beta_graph),
        eigenvalue: Some(out.eigenvalue),
        cheeger_bound: out.cheeger_bound,
        cheeger_ok: out.cheeger_ok(),
        f1: truth.as_ref().map(|t| f1_pair(&out.part, t).mean),
        accuracy: truth.as_ref().map(|t| accuracy(&out.part, t, h.vertex_count())),
        steps: out.diffusion.as_ref().map(|d| d.state.step),
        converged: out.diffusion.as_ref().map(|d| d.converged),
        seconds: out.seconds,
    };
    let mut text = serde_json::to_string_pretty(&record)?;
    text.push('\n');
    emit(args.out.as_deref(), &text)
}

fn write_rate_trace(path: &Path, h: &Hypergraph, f: &[f64]) -> hyperbip::Result<()> {
    let rate = compute_rate(h, f)?;
    let mut out = BufWriter::new(fs::File::create(path)?);
    for step in &rate.trace {
        serde_json::to_writer(&mut out, step)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> hyperbip::Result<()> {
    let h = read_hypergraph(&args.hypergraph)?;
    let record: ResultRecord = serde_json::from_str(&fs::read_to_string(&args.result)?)?;
    let part = record.bipartition()?;
    if let Some(v) = part.max_vertex().filter(|&v| v >= h.vertex_count()) {
        return Err(Error::VertexOutOfRange {
            vertex: v,
            n: h.vertex_count(),
        });
    }
    let truth = truth_from(&args.labels, args.clusters.as_ref(), h.vertex_count())?;
    let f1 = f1_pair(&part, &truth);
    let report = json!({
        "algorithm": record.algorithm,
        "f1_left": f1.left,
        "f1_right": f1.right,
        "f1_mean": f1.mean,
        "swapped": f1.swapped,
        "accuracy": accuracy(&part, &truth, h.vertex_count()),
        "beta_hyper": h.bipartiteness(&part)?,
    });
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(None, &text)
}

fn cmd_experiment(args: ExperimentArgs) -> hyperbip::Result<()> {
    let grid: ExperimentGrid = serde_json::from_str(&fs::read_to_string(&args.grid)?)?;
    let result = run_experiment(&grid, args.jobs)?;
    if let Some(path) = &args.json {
        let mut text = serde_json::to_string_pretty(&result)?;
        text.push('\n');
        fs::write(path, text)?;
    }
    emit(args.csv.as_deref(), &summary_csv(&result.summary))
}
