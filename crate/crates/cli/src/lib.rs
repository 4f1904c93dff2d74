//! Command-line front end: dataset generation, clustering, benchmarking,
//! explanations and complexity estimation.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use spinex::baselines::BaselineConfig;
use spinex::bench::{
    self, algorithm_by_name, normalize_and_rank, ranking_pareto, run_benchmark, run_complexity_analysis, BenchReport,
    ClusterAlgorithm, ComplexityGrid, DatasetSource,
};
use spinex::datasets::{load_csv, make_named, write_csv, LabeledDataset};
use spinex::explain::{neighbors_from_matrix, similarity_contribution, NeighborAnalysis, SimilarityAnalysis};
use spinex::metrics::{evaluate, MetricsCache, METRIC_NAMES};
use spinex::similarity::compute_similarity;
use spinex::{ApproximationMethod, DecisionLog, SimilarityMethod, Spinex, SpinexConfig, SpinexError, ThresholdSpec};

/// Failure categories, mapped to exit codes 2 and 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<SpinexError> for CliError {
    fn from(e: SpinexError) -> Self {
        match e {
            SpinexError::NotImplemented(_) | SpinexError::UndefinedMetric(_) => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

type CliResult<T> = Result<T, CliError>;

/// Writes a line to stdout; a closed pipe (e.g. `| head`) ends the process quietly.
fn emit(line: fmt::Arguments<'_>) {
    use std::io::Write;
    if let Err(e) = writeln!(std::io::stdout().lock(), "{line}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

macro_rules! out {
    ($($arg:tt)*) => {
        emit(format_args!($($arg)*))
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
}

#[derive(Debug, Parser)]
#[command(name = "spinex", version, about = "Similarity-based clustering with explanations and benchmarks")]
pub struct Cli {
    /// Seed for data generation and randomized algorithms.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML configuration file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "warn")]
    pub log_level: LogLevel,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one of the named synthetic datasets as CSV.
    Generate(GenerateArgs),
    /// Cluster a CSV file and write row labels.
    Cluster(ClusterArgs),
    /// Run the benchmark sweep and write runs, ranking, Pareto and JSON reports.
    Benchmark(BenchmarkArgs),
    /// Explain one observation: per-method neighbors and feature differences.
    Explain(ExplainArgs),
    /// Estimate empirical time complexity on a size x dimension grid.
    Complexity(ComplexityArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub name: String,
    /// Output CSV; defaults to `<out-dir>/<name>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Column holding ground-truth labels; excluded from the features.
    #[arg(long)]
    pub label_column: Option<String>,
    /// Standardize features after loading.
    #[arg(long)]
    pub standardize: bool,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// `auto`, a percentile such as `90%`, or a fixed value.
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub n_clusters: Option<usize>,
    #[arg(long)]
    pub tier: Option<u8>,
    /// Comma-separated similarity methods.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long)]
    pub multi_level: bool,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub initial_threshold: Option<f64>,
    /// Standardize and project onto principal components before similarity.
    #[arg(long)]
    pub pca: bool,
    /// `random_sampling` or `pca`.
    #[arg(long)]
    pub approximation: Option<String>,
    #[arg(long)]
    pub sample_size: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub max_workers: Option<usize>,
    /// Labels CSV; defaults to `<out-dir>/labels.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the decision log.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Comma-separated algorithm names, e.g. `spinex_t,kmeans`.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub datasets: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub observation: usize,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Restrict neighbors to one similarity method.
    #[arg(long)]
    pub method: Option<String>,
    /// JSON output; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
}

/// Benchmark grid section of the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub algorithms: Vec<String>,
    pub datasets: Vec<String>,
    pub seeds: Vec<u64>,
    /// Parameter overrides for baselines, matched by algorithm name.
    pub baselines: Vec<BaselineConfig>,
}

impl Default for BenchSection {
    fn default() -> Self {
        let mut algorithms: Vec<String> = bench::DESK_SPINEX_VARIANTS.iter().map(|t| format!("spinex_{t}")).collect();
        algorithms.extend(bench::default_baselines().iter().map(|b| b.name().to_string()));
        Self {
            algorithms,
            datasets: bench::DESK_DATASETS.iter().map(|s| s.to_string()).collect(),
            seeds: bench::DESK_SEEDS.to_vec(),
            baselines: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComplexitySection {
    pub algorithms: Vec<String>,
    pub sizes: Vec<usize>,
    pub dims: Vec<usize>,
    pub trials: usize,
}

impl Default for ComplexitySection {
    fn default() -> Self {
        let grid = ComplexityGrid::desk();
        Self {
            algorithms: vec!["spinex_default".into()],
            sizes: grid.sizes,
            dims: grid.dims,
            trials: grid.trials,
        }
    }
}

/// The configuration file layout.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfigFile {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub spinex: SpinexConfig,
    pub bench: BenchSection,
    pub complexity: ComplexitySection,
}

impl CliConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

struct Context {
    seed: u64,
    out_dir: PathBuf,
    level: LogLevel,
    file: CliConfigFile,
}

impl Context {
    fn info(&self, msg: impl fmt::Display) {
        if self.level >= LogLevel::Info {
            eprintln!("{msg}");
        }
    }

    fn out_path(&self, explicit: Option<&PathBuf>, default_name: &str) -> CliResult<PathBuf> {
        let path = match explicit {
            Some(p) => p.clone(),
            None => self.out_dir.join(default_name),
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        Ok(path)
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(p) => CliConfigFile::load(p)?,
        None => CliConfigFile::default(),
    };
    let ctx = Context {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        out_dir: cli.out_dir.clone().or_else(|| file.out_dir.clone()).unwrap_or_else(|| PathBuf::from(".")),
        level: cli.log_level,
        file,
    };
    match cli.command {
        Command::Generate(a) => cmd_generate(&ctx, a),
        Command::Cluster(a) => cmd_cluster(&ctx, a),
        Command::Benchmark(a) => cmd_benchmark(&ctx, a),
        Command::Explain(a) => cmd_explain(&ctx, a),
        Command::Complexity(a) => cmd_complexity(&ctx, a),
    }
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect::<String>()
        .split('_')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

fn cmd_generate(ctx: &Context, a: GenerateArgs) -> CliResult<()> {
    let ds = make_named(&a.name, ctx.seed)?;
    let path = ctx.out_path(a.out.as_ref(), &format!("{}.csv", slug(&ds.name)))?;
    write_csv(&ds, &path)?;
    let k = ds.n_classes().map(|k| k.to_string()).unwrap_or_else(|| "-".into());
    out!("{}: n={} d={} k={} -> {}", ds.name, ds.n_rows(), ds.n_cols(), k, path.display());
    Ok(())
}

fn load_input(a: &InputArgs) -> CliResult<LabeledDataset> {
    if !a.input.exists() {
        return Err(CliError::Usage(format!("{}: no such file", a.input.display())));
    }
    Ok(load_csv(&a.input, a.label_column.as_deref(), a.standardize)?)
}

fn parse_methods(names: &[String]) -> CliResult<Vec<SimilarityMethod>> {
    names.iter().map(|m| m.parse::<SimilarityMethod>().map_err(CliError::from)).collect()
}

fn apply_cluster_flags(mut cfg: SpinexConfig, a: &ClusterArgs, seed: u64) -> CliResult<SpinexConfig> {
    if let Some(t) = &a.threshold {
        cfg.threshold = t.parse::<ThresholdSpec>()?;
    }
    if a.n_clusters.is_some() {
        cfg.n_clusters = a.n_clusters;
    }
    if let Some(t) = a.tier {
        cfg.evaluation_tier = t;
    }
    if let Some(m) = &a.methods {
        cfg.similarity_methods = parse_methods(m)?;
    }
    cfg.use_multi_level |= a.multi_level;
    if let Some(l) = a.levels {
        cfg.multi_level_params.levels = l;
    }
    if let Some(t) = a.initial_threshold {
        cfg.multi_level_params.initial_threshold = t;
    }
    cfg.use_pca |= a.pca;
    if let Some(m) = &a.approximation {
        cfg.use_approximation = true;
        cfg.approximation_method = m.parse::<ApproximationMethod>()?;
    }
    if let Some(s) = a.sample_size {
        cfg.sample_size = s;
    }
    if let Some(g) = a.gamma {
        cfg.gamma = g;
    }
    cfg.use_parallel |= a.parallel;
    if a.max_workers.is_some() {
        cfg.max_workers = a.max_workers;
    }
    cfg.rng_seed = seed;
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_metric(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "undefined".into())
}

fn cmd_cluster(ctx: &Context, a: ClusterArgs) -> CliResult<()> {
    let ds = load_input(&a.input)?;
    let mut cfg = apply_cluster_flags(ctx.file.spinex.clone(), &a, ctx.seed)?;
    if cfg.evaluation_tier >= 2 && cfg.ground_truth.is_none() {
        cfg.ground_truth = ds.truth.clone();
    }
    ctx.info(format!("clustering {} rows x {} features", ds.n_rows(), ds.n_cols()));
    let mut sp = Spinex::new(cfg)?;
    let labels = sp.fit_predict(&ds.x)?;

    let path = ctx.out_path(a.out.as_ref(), "labels.csv")?;
    let mut body = String::from("row_index,label\n");
    for (i, l) in labels.assignments().iter().enumerate() {
        body.push_str(&format!("{i},{l}\n"));
    }
    fs::write(&path, body).map_err(|e| io_err(&path, e))?;

    let method = sp.best_method().map(|m| m.as_str()).unwrap_or("none");
    out!("method: {method}");
    out!("clusters: {}", labels.n_clusters());
    if let Some(truth) = &ds.truth {
        let m = evaluate(&ds.x, &labels, method, 3, Some(truth), &MetricsCache::new(), &DecisionLog::new());
        for (name, v) in METRIC_NAMES.iter().zip(m.as_array()) {
            out!("{name}: {}", fmt_metric(v));
        }
    }
    out!("labels: {}", path.display());
    if a.log || ctx.level >= LogLevel::Debug {
        for entry in sp.log().messages() {
            out!("log: {entry}");
        }
    }
    Ok(())
}

fn resolve_algorithms(names: &[String], overrides: &[BaselineConfig]) -> CliResult<Vec<Box<dyn ClusterAlgorithm>>> {
    let names: Vec<&String> = names.iter().filter(|n| !n.trim().is_empty()).collect();
    if names.is_empty() {
        return Err(CliError::Usage("no algorithms selected".into()));
    }
    names
        .into_iter()
        .map(|n| {
            let key = n.trim().to_ascii_lowercase();
            if let Some(b) = overrides.iter().find(|b| b.name() == key) {
                return Ok(Box::new(b.clone()) as Box<dyn ClusterAlgorithm>);
            }
            algorithm_by_name(n).map_err(CliError::from)
        })
        .collect()
}

fn cmd_benchmark(ctx: &Context, a: BenchmarkArgs) -> CliResult<()> {
    let section = &ctx.file.bench;
    let names = a.algorithms.unwrap_or_else(|| section.algorithms.clone());
    let algorithms = resolve_algorithms(&names, &section.baselines)?;
    let datasets: Vec<DatasetSource> = a
        .datasets
        .unwrap_or_else(|| section.datasets.clone())
        .into_iter()
        .map(DatasetSource::Named)
        .collect();
    for d in &datasets {
        make_named(d.name(), 0)?;
    }
    let seeds = a.seeds.unwrap_or_else(|| section.seeds.clone());
    if datasets.is_empty() || seeds.is_empty() {
        return Err(CliError::Usage("benchmark needs at least one dataset and one seed".into()));
    }
    ctx.info(format!(
        "benchmark: {} algorithms x {} datasets x {} seeds",
        algorithms.len(),
        datasets.len(),
        seeds.len()
    ));
    let runs = run_benchmark(&algorithms, &datasets, &seeds);
    let ranking = normalize_and_rank(&runs);
    let front = ranking_pareto(&ranking);
    let dir = &ctx.out_dir;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    bench::write_runs_csv(&runs, &dir.join("runs.csv"))?;
    bench::write_timings_csv(&runs, &dir.join("timings.csv"))?;
    bench::write_ranking_csv(&ranking, &dir.join("ranking.csv"))?;
    bench::write_pareto_csv(&ranking, &front, &dir.join("pareto.csv"))?;
    BenchReport::new(&runs, &ranking, &front, None).write_json(&dir.join("report.json"))?;
    for row in &ranking.rows {
        out!("{:>2}  {:<22} {:.4}", row.rank, row.algorithm, row.mean_across_metrics);
    }
    out!("pareto: {}", front.join(", "));
    let failures = runs.iter().filter(|r| r.error.is_some()).count();
    if failures > 0 {
        out!("failed runs: {failures}");
    }
    out!("reports: {}", dir.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct ExplainOutput {
    observation: usize,
    k: usize,
    similarity_analysis: SimilarityAnalysis,
    neighbor_analysis: Vec<NeighborAnalysis>,
}

fn cmd_explain(ctx: &Context, a: ExplainArgs) -> CliResult<()> {
    let ds = load_input(&a.input)?;
    let n = ds.n_rows();
    if a.observation >= n {
        return Err(CliError::Usage(format!("observation {} out of range for {n} rows", a.observation)));
    }
    let methods = match &a.method {
        Some(m) => vec![m.parse::<SimilarityMethod>()?],
        None => ctx.file.spinex.similarity_methods.clone(),
    };
    let gamma = ctx.file.spinex.gamma;
    let mut neighbor_analysis = Vec::new();
    for m in methods {
        let (s, _) = compute_similarity(&ds.x, m, gamma);
        neighbor_analysis.push(neighbors_from_matrix(&s, &ds.x, a.observation, a.k)?);
    }
    let out = ExplainOutput {
        observation: a.observation,
        k: a.k,
        similarity_analysis: similarity_contribution(&ds.x, a.observation)?,
        neighbor_analysis,
    };
    let json = serde_json::to_string_pretty(&out).map_err(|e| CliError::Internal(e.to_string()))?;
    match &a.out {
        Some(p) => {
            let path = ctx.out_path(Some(p), "")?;
            fs::write(&path, json).map_err(|e| io_err(&path, e))?;
            for na in &out.neighbor_analysis {
                out!("{}: {:?}", na.method, na.nearest_neighbors);
            }
        }
        None => out!("{json}"),
    }
    Ok(())
}

fn cmd_complexity(ctx: &Context, a: ComplexityArgs) -> CliResult<()> {
    let section = &ctx.file.complexity;
    let names = a.algorithms.unwrap_or_else(|| section.algorithms.clone());
    let algorithms = resolve_algorithms(&names, &ctx.file.bench.baselines)?;
    let grid = ComplexityGrid {
        sizes: a.sizes.unwrap_or_else(|| section.sizes.clone()),
        dims: a.dims.unwrap_or_else(|| section.dims.clone()),
        trials: a.trials.unwrap_or(section.trials),
    };
    if grid.sizes.len() < 3 || grid.dims.is_empty() || grid.trials == 0 {
        return Err(CliError::Usage(
            "complexity needs at least three sizes, one dimension and one trial".into(),
        ));
    }
    ctx.info(format!("timing {} algorithms on {} cells", algorithms.len(), grid.sizes.len() * grid.dims.len()));
    let report = run_complexity_analysis(&algorithms, &grid, ctx.seed);
    let dir = &ctx.out_dir;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    bench::write_complexity_csv(&report, &dir.join("complexity.csv"))?;
    bench::write_timing_samples_csv(&report, &dir.join("timings_raw.csv"))?;
    bench::write_plot_data(&report, &dir.join("plots"))?;
    for r in &report.rows {
        out!("{:<22} d={:<5} slope={:.3}  {}", r.algorithm, r.d, r.slope, r.class);
    }
    for f in &report.failures {
        out!("failed: {f}");
    }
    out!("reports: {}", dir.display());
    Ok(())
}
