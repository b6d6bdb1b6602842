use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use torinfer::ingest::{parse_paths, Asn, PathSet};
use torinfer::metrics;
use torinfer::pipeline::{self, PipelineError, RunConfig};
use torinfer::relax::{brute_force_opt, parse_wcnf, write_wcnf, RelaxError};
use torinfer::relmap::RelationshipMap;
use torinfer::siblings::load_orgs;
use torinfer::synth::{self, NoiseKind, SynthConfig};

const EXIT_INPUT: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

/// Infer AS business relationships from BGP AS paths.
///
/// Input formats:
///   paths   one AS path per line, whitespace-separated positive ASNs,
///           `#` starts a comment; prepending is collapsed, looped or
///           single-AS paths are dropped.
///   whois   `ASN<TAB>organization name` per line; siblings are links whose
///           endpoints share an organization.
///   rel     JSON `{"edges":[{"a":..,"b":..,"rel":"c2p"|"sibling","prov":..}]}`;
///           for `c2p`, `a` is the customer of `b`.
///   wcnf    weighted 2-CNF: `p wcnf <vars> <clauses>` then
///           `<weight> <lit> [<lit>] 0` per clause.
#[derive(Debug, Parser)]
#[command(name = "torinfer", version, verbatim_doc_comment)]
struct Cli {
    /// Worker threads for rounding cuts and sweep points. Output does not
    /// depend on this value.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Infer a relationship map and write it with a run report.
    Infer(InferArgs),
    /// Run the inference over a grid of alpha values and write a CSV table
    /// `alpha,valid_pct,agree_alpha0_pct,agree_alpha1_pct`.
    Sweep(SweepArgs),
    /// Rank ASs by the number of ASs reachable through customer links; writes
    /// CSV `asn,degree,reach,level,depth,width,is_leaf`.
    Rank(RankArgs),
    /// Count paths that are valley-free under a relationship map; writes JSON.
    Validate(ValidateArgs),
    /// Generate a synthetic tiered hierarchy: a paths file and its true
    /// relationship map.
    GenSynth(SynthArgs),
    /// Solve a small weighted 2-CNF exactly by enumeration; writes JSON.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// AS paths file.
    #[arg(long)]
    paths: PathBuf,
    /// Organization names (`ASN<TAB>name`) used to detect siblings.
    #[arg(long)]
    whois: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Master seed for restarts and cuts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random hyperplane cuts.
    #[arg(long, default_value_t = 200)]
    cuts: usize,
    /// Rotation toward the truth vector before rounding, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    rotation: f64,
    /// Shrinks the truth-vector component of each cut normal, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    bias: f64,
    /// Random restarts of the relaxation solver.
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Vector dimension; default min(n + 1, ceil(sqrt(2n)) + 1).
    #[arg(long)]
    dim: Option<usize>,
    /// Stopping threshold on the relaxation gradient norm.
    #[arg(long, default_value_t = 1e-7)]
    tolerance: f64,
    /// Iteration cap per restart.
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
}

impl SolveArgs {
    fn config(&self, alpha: f64) -> RunConfig {
        RunConfig {
            alpha,
            seed: self.seed,
            n_cuts: self.cuts,
            rotation: self.rotation,
            bias: self.bias,
            restarts: self.restarts,
            dim: self.dim,
            tolerance: self.tolerance,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Debug, Args)]
struct InferArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Share of weight on 2-link (valley) clauses; the rest goes to
    /// degree-gradient 1-link clauses.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[command(flatten)]
    solve: SolveArgs,
    /// Relationship map output (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Run report output (JSON); defaults to report.json next to --out.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write the residual weighted instance in wcnf form.
    #[arg(long)]
    dump_wcnf: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.5,0.8,1.0")]
    alphas: Vec<f64>,
    #[command(flatten)]
    solve: SolveArgs,
    /// CSV output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RankArgs {
    /// Relationship map (JSON).
    #[arg(long)]
    rel: PathBuf,
    /// CSV output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// AS paths file.
    #[arg(long)]
    paths: PathBuf,
    /// Relationship map (JSON).
    #[arg(long)]
    rel: PathBuf,
    /// Include one validity flag per path, in sorted path order.
    #[arg(long)]
    per_path: bool,
    /// JSON output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Comma-separated AS counts per tier, top tier first.
    #[arg(long, value_delimiter = ',', default_value = "4,16,60,120")]
    tiers: Vec<usize>,
    /// Number of paths to emit.
    #[arg(long = "num-paths", default_value_t = 10_000)]
    num_paths: usize,
    /// Fraction of corrupted paths.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// How corrupted paths are made: `hop` replaces one interior AS with a
    /// random AS, `leak` routes through a customer between two providers.
    #[arg(long, value_enum, default_value_t = Noise::Hop)]
    noise_kind: Noise,
    /// Probability that an AS below tier 1 has a second provider.
    #[arg(long, default_value_t = 0.5)]
    multihoming: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Paths output.
    #[arg(long)]
    out: PathBuf,
    /// True relationship map output (JSON).
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Noise {
    Hop,
    Leak,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Weighted 2-CNF input.
    #[arg(long)]
    wcnf: PathBuf,
    /// JSON output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Input problems map to exit code 2.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(e: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(InputError(e.into()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input_err)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn load_input(input: &InputArgs) -> Result<(PathSet, Option<BTreeMap<Asn, String>>)> {
    let (paths, stats) = parse_paths(&read(&input.paths)?)
        .with_context(|| format!("parsing {}", input.paths.display()))
        .map_err(input_err)?;
    log::info!("{} paths from {} lines", paths.paths().len(), stats.lines);
    let orgs = match &input.whois {
        Some(p) => {
            let (orgs, stats) = load_orgs(&read(p)?);
            log::info!("{} organization records, {} rejected", orgs.len(), stats.rejected);
            Some(orgs)
        }
        None => None,
    };
    Ok((paths, orgs))
}

fn load_relmap(path: &Path) -> Result<RelationshipMap> {
    RelationshipMap::from_json(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(input_err)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(input_err(anyhow!("alpha must be in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn run_infer(args: &InferArgs) -> Result<()> {
    check_alpha(args.alpha)?;
    let (paths, orgs) = load_input(&args.input)?;
    let result = pipeline::infer(&paths, orgs.as_ref(), &args.solve.config(args.alpha))?;
    for w in &result.report.warnings {
        log::warn!("{w}");
    }
    let report_path = args.report.clone().unwrap_or_else(|| {
        args.out
            .parent()
            .unwrap_or(Path::new(""))
            .join("report.json")
    });
    write_atomic(&args.out, &result.relmap.to_json())?;
    write_atomic(&report_path, &result.report.to_json())?;
    if let Some(p) = &args.dump_wcnf {
        match &result.residual_instance {
            Some(inst) => write_atomic(p, &write_wcnf(inst))?,
            None => log::warn!("no residual instance; {} not written", p.display()),
        }
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    for &a in &args.alphas {
        check_alpha(a)?;
    }
    let (paths, orgs) = load_input(&args.input)?;
    let table = pipeline::alpha_sweep(&paths, orgs.as_ref(), &args.alphas, &args.solve.config(0.5))?;
    write_atomic(&args.out, &table.to_csv())
}

fn run_rank(args: &RankArgs) -> Result<()> {
    let relmap = load_relmap(&args.rel)?;
    write_atomic(&args.out, &metrics::rank(&relmap).to_csv())
}

fn run_validate(args: &ValidateArgs) -> Result<()> {
    let (paths, _) = parse_paths(&read(&args.paths)?).map_err(input_err)?;
    let relmap = load_relmap(&args.rel)?;
    let report = metrics::validity(paths.paths(), &relmap, args.per_path).map_err(input_err)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_atomic(&args.out, &json)
}

fn run_synth(args: &SynthArgs) -> Result<()> {
    if args.tiers.len() < 2 || args.tiers.contains(&0) {
        return Err(input_err(anyhow!("need at least two non-empty tiers")));
    }
    if !(0.0..=1.0).contains(&args.noise) || !(0.0..=1.0).contains(&args.multihoming) {
        return Err(input_err(anyhow!("noise and multihoming must be in [0, 1]")));
    }
    let data = synth::generate(&SynthConfig {
        tiers: args.tiers.clone(),
        paths: args.num_paths,
        noise: args.noise,
        noise_kind: match args.noise_kind {
            Noise::Hop => NoiseKind::HopSubstitution,
            Noise::Leak => NoiseKind::RouteLeak,
        },
        multihoming: args.multihoming,
        seed: args.seed,
        ..SynthConfig::default()
    });
    write_atomic(&args.out, &data.paths_text())?;
    write_atomic(&args.truth, &data.truth.to_json())
}

fn run_oracle(args: &OracleArgs) -> Result<()> {
    let inst = parse_wcnf(&read(&args.wcnf)?).map_err(input_err)?;
    let opt = brute_force_opt(&inst).map_err(input_err)?;
    let mut json = serde_json::to_string_pretty(&serde_json::json!({
        "num_vars": inst.num_vars,
        "num_clauses": inst.clauses.len(),
        "objective": opt.objective,
        "assignment": opt.values,
    }))?;
    json.push('\n');
    match &args.out {
        Some(p) => write_atomic(p, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<InputError>().is_some() {
        return EXIT_INPUT;
    }
    match err.downcast_ref::<PipelineError>() {
        Some(PipelineError::Relax(RelaxError::NotConverged { .. })) => EXIT_NOT_CONVERGED,
        Some(PipelineError::Relax(RelaxError::InvalidAlpha(_))) => EXIT_INPUT,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let jobs = cli.jobs.max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Infer(a) => run_infer(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Rank(a) => run_rank(a),
        Command::Validate(a) => run_validate(a),
        Command::GenSynth(a) => run_synth(a),
        Command::Oracle(a) => run_oracle(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
