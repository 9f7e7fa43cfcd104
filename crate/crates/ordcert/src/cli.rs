//! Command-line entry point wiring all modules.
//!
//! Machine output (JSON, or CSV for simulation reports) goes to stdout or
//! `--output`; progress and the effective seed go to stderr. Variable
//! indices in flags and outputs are 1-based, matching the column order of
//! the CSV. Exit codes: 0 success, 1 usage or I/O error, 2 empty confidence
//! set when `--fail-on-empty` is set.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dataset::Dataset;
use crate::design::BasisSpec;
use crate::effects::{
    ancestral_bounds, direct_effect_ci, frechet_mean, total_effect_ci, EffectCi,
};
use crate::error::{Error, Result};
use crate::gof::{test_an, Calibration, GofConfig, Statistic, TestFunctionSet};
use crate::ordering::{
    confidence_set_with_progress, ConfidenceSet, LevelProgress, PrefixCache, SearchBudget,
};
use crate::rng::{derive_seed, StreamKind};
use crate::simlab::{
    run_calibration_study, run_ci_study, run_confset_study, run_size_power, DistSpec, ErrorDist,
};

#[derive(Parser)]
#[command(
    name = "ordcert",
    version,
    about = "Confidence sets of causal orderings via residual-bootstrap goodness-of-fit tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Goodness-of-fit test for one regression
    Gof(GofArgs),
    /// Confidence set of causal orderings
    Confset(ConfsetArgs),
    /// Model-uncertainty confidence interval for a causal effect
    Ci(CiArgs),
    /// Ancestral-relation lower/upper bounds from the confidence set
    Ancestors(AncestorsArgs),
    /// Frechet-mean summary of the confidence set
    Frechet(FrechetArgs),
    /// Monte Carlo studies (size/power, confidence sets, effect CIs, calibration)
    Sim(SimArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV of finite reals, one column per variable
    #[arg(long)]
    data: PathBuf,
    /// Treat the first row as data, not as a header
    #[arg(long)]
    no_header: bool,
    /// Skip standardization of the columns before testing
    #[arg(long)]
    raw: bool,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        let d = Dataset::load_csv(&self.data, !self.no_header)?;
        if self.raw {
            Ok(d)
        } else {
            d.standardize()
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StatArg {
    T1,
    T2,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CalibrationArg {
    Bootstrap,
    GaussianPlugin,
}

#[derive(Args)]
struct TestArgs {
    /// Statistic variant
    #[arg(long, value_enum, default_value = "t2")]
    stat: StatArg,
    /// Bootstrap replicates L
    #[arg(long, default_value_t = 500)]
    reps: usize,
    /// Basis: "linear" or "poly:<degree>" (append ":ix" for interactions)
    #[arg(long, default_value = "linear")]
    basis: String,
    /// Null-distribution calibration
    #[arg(long, value_enum, default_value = "bootstrap")]
    calibration: CalibrationArg,
    /// RNG seed; omitted, one is drawn from entropy and printed to stderr
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (ORDCERT_THREADS overrides; default all cores)
    #[arg(long)]
    threads: Option<usize>,
}

impl TestArgs {
    fn gof_config(&self) -> Result<GofConfig> {
        let seed = self.seed.unwrap_or_else(|| {
            let s: u64 = rand::random();
            eprintln!("seed: {s}");
            s
        });
        Ok(GofConfig {
            stat: match self.stat {
                StatArg::T1 => Statistic::T1,
                StatArg::T2 => Statistic::T2,
            },
            bootstrap_reps: self.reps.max(1),
            calibration: match self.calibration {
                CalibrationArg::Bootstrap => Calibration::Bootstrap,
                CalibrationArg::GaussianPlugin => Calibration::GaussianPlugin,
            },
            basis: parse_basis(&self.basis)?,
            seed,
            ..GofConfig::default()
        })
    }

    fn init_threads(&self) {
        let from_env = std::env::var("ORDCERT_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok());
        if let Some(t) = from_env.or(self.threads) {
            // fails harmlessly if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build_global();
        }
    }
}

fn parse_basis(s: &str) -> Result<BasisSpec> {
    let lower = s.to_ascii_lowercase();
    if lower == "linear" {
        return Ok(BasisSpec::Linear);
    }
    if let Some(rest) = lower.strip_prefix("poly:") {
        let (deg_str, interaction) = match rest.strip_suffix(":ix") {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let degree: u32 = deg_str
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad basis degree `{deg_str}`")))?;
        if degree == 0 {
            return Err(Error::InvalidParameter("basis degree must be >= 1".into()));
        }
        return Ok(BasisSpec::Polynomial { degree, interaction });
    }
    Err(Error::InvalidParameter(format!(
        "unknown basis `{s}` (expected `linear` or `poly:<degree>[:ix]`)"
    )))
}

#[derive(Args)]
struct BudgetArgs {
    /// Stop the search after this many seconds (partial result, exit data
    /// marked exhausted=false)
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Stop the search after this many goodness-of-fit tests
    #[arg(long)]
    max_tests: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Option<SearchBudget> {
        if self.max_seconds.is_none() && self.max_tests.is_none() {
            None
        } else {
            Some(SearchBudget {
                max_tests: self.max_tests,
                max_seconds: self.max_seconds,
            })
        }
    }
}

#[derive(Args)]
struct GofArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Target variable (1-based column index)
    #[arg(long)]
    target: usize,
    /// Regressor set: comma-separated 1-based column indices
    #[arg(long)]
    given: String,
    /// Significance level echoed alongside the p-value
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[command(flatten)]
    test: TestArgs,
    /// Write JSON here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConfsetArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    test: TestArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    out: OutFormat,
    /// Write output here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Exit with code 2 when the confidence set is empty
    #[arg(long)]
    fail_on_empty: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum EffectKindArg {
    Total,
    Direct,
}

#[derive(Args)]
struct CiArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Cause variable (1-based)
    #[arg(long)]
    cause: usize,
    /// Effect variable (1-based)
    #[arg(long)]
    effect: usize,
    /// Interval level is 1 - alpha; the underlying confidence set runs at
    /// alpha/2
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "total")]
    kind: EffectKindArg,
    #[command(flatten)]
    test: TestArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Exit with code 2 when the confidence set is empty
    #[arg(long)]
    fail_on_empty: bool,
}

#[derive(Args)]
struct AncestorsArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    test: TestArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    fail_on_empty: bool,
}

#[derive(Args)]
struct FrechetArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    test: TestArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    fail_on_empty: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Scenario {
    SizePower,
    Confset,
    Ci,
    Calibration,
}

#[derive(Args)]
struct SimArgs {
    /// Which study to run
    #[arg(long, value_enum)]
    scenario: Scenario,
    /// TOML file declaring the experiment grid
    #[arg(long)]
    config: PathBuf,
    /// Report CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (ORDCERT_THREADS overrides)
    #[arg(long)]
    threads: Option<usize>,
}

/// Experiment grid declaration for `ordcert sim`.
#[derive(Debug, Deserialize)]
struct SimConfig {
    /// Master seed; each cell derives an independent seed from it.
    seed: Option<u64>,
    /// Replicates per cell.
    reps: usize,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_bootstrap_reps")]
    bootstrap_reps: usize,
    #[serde(default)]
    stat: Option<String>,
    #[serde(default)]
    max_seconds: Option<f64>,
    #[serde(default)]
    max_tests: Option<u64>,
    cells: Vec<CellConfig>,
}

fn default_alpha() -> f64 {
    0.1
}

fn default_bootstrap_reps() -> usize {
    500
}

#[derive(Debug, Deserialize)]
struct CellConfig {
    p: usize,
    n: usize,
    #[serde(default)]
    dist: Option<String>,
}

/// Parses argv and runs the mapped operation. Returns the process exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit code 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Gof(args) => cmd_gof(args),
        Command::Confset(args) => cmd_confset(args),
        Command::Ci(args) => cmd_ci(args),
        Command::Ancestors(args) => cmd_ancestors(args),
        Command::Frechet(args) => cmd_frechet(args),
        Command::Sim(args) => cmd_sim(args),
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn parse_index_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let idx: usize = t
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad index `{t}`")))?;
            if idx == 0 {
                return Err(Error::InvalidParameter(
                    "variable indices are 1-based".into(),
                ));
            }
            Ok(idx - 1)
        })
        .collect()
}

fn one_based(perm: &[usize]) -> Vec<usize> {
    perm.iter().map(|&v| v + 1).collect()
}

fn cmd_gof(args: GofArgs) -> Result<i32> {
    args.test.init_threads();
    let d = args.data.load()?;
    let cfg = args.test.gof_config()?;
    if args.target == 0 {
        return Err(Error::InvalidParameter("--target is 1-based".into()));
    }
    let target = args.target - 1;
    let given = parse_index_list(&args.given)?;
    let tf = TestFunctionSet::default();
    let outcome = test_an(&d, target, &given, &tf, &cfg)?;
    let out = json!({
        "p_value": outcome.p_value,
        "t_obs": outcome.t_obs,
        "config": {
            "target": args.target,
            "given": one_based(&given),
            "alpha": args.alpha,
            "stat": cfg.stat,
            "bootstrap_reps": cfg.bootstrap_reps,
            "denominator": cfg.denominator,
            "calibration": cfg.calibration,
            "basis": cfg.basis,
            "seed": cfg.seed,
            "names": d.names(),
        },
    });
    emit(&args.output, &format!("{}\n", serde_json::to_string_pretty(&out).unwrap()))?;
    Ok(0)
}

fn search(
    d: &Dataset,
    alpha: f64,
    cfg: &GofConfig,
    budget: Option<SearchBudget>,
) -> Result<ConfidenceSet> {
    let tf = TestFunctionSet::default();
    // With too few replicates the smallest reachable p-value sits above the
    // Beta(1, p-1) threshold and no prefix can ever be pruned.
    let threshold = crate::gof::min_pvalue_quantile(alpha, d.p());
    let min_pvalue = 1.0 / (cfg.bootstrap_reps as f64 + 1.0);
    if min_pvalue >= threshold {
        eprintln!(
            "warning: {} bootstrap replicates cannot produce a p-value below the \
             rejection threshold {:.5} at alpha = {} with p = {}; the search will \
             enumerate every ordering (need --reps > {:.0})",
            cfg.bootstrap_reps,
            threshold,
            alpha,
            d.p(),
            1.0 / threshold
        );
    }
    let progress = |lp: &LevelProgress| {
        eprintln!(
            "level {}: {} unique sets, {} prefixes alive, {} pruned, {} tests so far",
            lp.level, lp.unique_sets, lp.alive, lp.pruned, lp.tests_run
        );
    };
    let cs = confidence_set_with_progress(
        d,
        alpha,
        &tf,
        cfg,
        budget,
        &PrefixCache::new(),
        Some(&progress),
    )?;
    eprintln!(
        "search {}: {} orderings accepted, {} tests, {:.2}s",
        if cs.exhausted { "complete" } else { "stopped by budget" },
        cs.count_orderings(),
        cs.diagnostics.tests_run,
        cs.diagnostics.wall_time_secs
    );
    Ok(cs)
}

/// JSON view of a confidence set: 1-based permutations, no wall-clock field
/// so identical seeds give byte-identical output.
#[derive(Serialize)]
struct ConfsetJson {
    alpha: f64,
    exhausted: bool,
    names: Vec<String>,
    orderings: Vec<OrderingJson>,
    diagnostics: DiagnosticsJson,
}

#[derive(Serialize)]
struct OrderingJson {
    perm: Vec<usize>,
    min_gamma: f64,
    #[serde(rename = "Gamma")]
    gamma: f64,
}

#[derive(Serialize)]
struct DiagnosticsJson {
    tests_run: u64,
    cache_hits: u64,
    prefixes_pruned_per_level: Vec<u64>,
    prefixes_alive_per_level: Vec<u64>,
}

fn confset_json(cs: &ConfidenceSet, names: &[String]) -> ConfsetJson {
    ConfsetJson {
        alpha: cs.alpha,
        exhausted: cs.exhausted,
        names: names.to_vec(),
        orderings: cs
            .orderings
            .iter()
            .map(|a| OrderingJson {
                perm: one_based(&a.perm),
                min_gamma: a.min_gamma,
                gamma: a.gamma,
            })
            .collect(),
        diagnostics: DiagnosticsJson {
            tests_run: cs.diagnostics.tests_run,
            cache_hits: cs.diagnostics.cache_hits,
            prefixes_pruned_per_level: cs.diagnostics.prefixes_pruned_per_level.clone(),
            prefixes_alive_per_level: cs.diagnostics.prefixes_alive_per_level.clone(),
        },
    }
}

fn cmd_confset(args: ConfsetArgs) -> Result<i32> {
    args.test.init_threads();
    let d = args.data.load()?;
    let cfg = args.test.gof_config()?;
    let cs = search(&d, args.alpha, &cfg, args.budget.budget())?;
    let content = match args.out {
        OutFormat::Json => {
            let view = confset_json(&cs, d.names());
            format!("{}\n", serde_json::to_string_pretty(&view).unwrap())
        }
        OutFormat::Csv => {
            let mut s = String::from("perm,min_gamma,Gamma\n");
            for a in &cs.orderings {
                let perm = one_based(&a.perm)
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                s.push_str(&format!("{},{},{}\n", perm, a.min_gamma, a.gamma));
            }
            s
        }
    };
    emit(&args.output, &content)?;
    Ok(exit_code_for_set(&cs, args.fail_on_empty))
}

fn exit_code_for_set(cs: &ConfidenceSet, fail_on_empty: bool) -> i32 {
    if fail_on_empty && cs.is_empty() {
        2
    } else {
        0
    }
}

fn cmd_ci(args: CiArgs) -> Result<i32> {
    args.test.init_threads();
    if args.cause == 0 || args.effect == 0 {
        return Err(Error::InvalidParameter(
            "--cause and --effect are 1-based".into(),
        ));
    }
    let standardized = args.data.load()?;
    // effect regressions run on the raw scale; the search runs on the
    // loaded (usually standardized) data
    let raw = Dataset::load_csv(&args.data.data, !args.data.no_header)?;
    let cfg = args.test.gof_config()?;
    let cs = search(&standardized, args.alpha / 2.0, &cfg, args.budget.budget())?;
    if cs.is_empty() {
        eprintln!("confidence set is empty: the model class is rejected");
        if args.fail_on_empty {
            return Ok(2);
        }
        return Err(Error::EmptyConfidenceSet);
    }
    let (cause, effect) = (args.cause - 1, args.effect - 1);
    let ci: EffectCi = match args.kind {
        EffectKindArg::Total => total_effect_ci(&raw, &cs, cause, effect, args.alpha)?,
        EffectKindArg::Direct => direct_effect_ci(&raw, &cs, cause, effect, args.alpha)?,
    };
    let out = json!({
        "intervals": ci.interval.intervals(),
        "includes_zero": ci.interval.includes_zero_point(),
        "adjustment_sets_used": ci.adjustment_sets_used,
        "kind": ci.kind,
        "cause": args.cause,
        "effect": args.effect,
        "alpha": args.alpha,
        "names": raw.names(),
    });
    emit(&args.output, &format!("{}\n", serde_json::to_string_pretty(&out).unwrap()))?;
    Ok(0)
}

fn cmd_ancestors(args: AncestorsArgs) -> Result<i32> {
    args.test.init_threads();
    let d = args.data.load()?;
    let cfg = args.test.gof_config()?;
    let cs = search(&d, args.alpha, &cfg, args.budget.budget())?;
    if cs.is_empty() {
        eprintln!("confidence set is empty: the model class is rejected");
        if args.fail_on_empty {
            return Ok(2);
        }
        return Err(Error::EmptyConfidenceSet);
    }
    let bounds = ancestral_bounds(&cs)?;
    let pairs = |set: &std::collections::BTreeSet<(usize, usize)>| -> Vec<(usize, usize)> {
        set.iter().map(|&(u, v)| (u + 1, v + 1)).collect()
    };
    let out = json!({
        "alpha": cs.alpha,
        "lower": pairs(&bounds.lower),
        "upper": pairs(&bounds.upper),
        "names": d.names(),
    });
    emit(&args.output, &format!("{}\n", serde_json::to_string_pretty(&out).unwrap()))?;
    Ok(0)
}

fn cmd_frechet(args: FrechetArgs) -> Result<i32> {
    args.test.init_threads();
    let d = args.data.load()?;
    let cfg = args.test.gof_config()?;
    let cs = search(&d, args.alpha, &cfg, args.budget.budget())?;
    if cs.is_empty() {
        eprintln!("confidence set is empty: the model class is rejected");
        if args.fail_on_empty {
            return Ok(2);
        }
        return Err(Error::EmptyConfidenceSet);
    }
    let fm = frechet_mean(&cs)?;
    let out = json!({
        "alpha": cs.alpha,
        "perm": one_based(fm.ordering.perm()),
        "sum_squared_distance": fm.sum_squared,
        "distance_histogram": fm.histogram(),
        "set_size": cs.count_orderings(),
        "names": d.names(),
    });
    emit(&args.output, &format!("{}\n", serde_json::to_string_pretty(&out).unwrap()))?;
    Ok(0)
}

fn cmd_sim(args: SimArgs) -> Result<i32> {
    let from_env = std::env::var("ORDCERT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    if let Some(t) = from_env.or(args.threads) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global();
    }
    let text = std::fs::read_to_string(&args.config)?;
    let config: SimConfig = toml::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("bad sim config: {e}")))?;
    let master_seed = config.seed.unwrap_or_else(|| {
        let s: u64 = rand::random();
        eprintln!("seed: {s}");
        s
    });
    let tf = TestFunctionSet::default();
    let stat = match config.stat.as_deref() {
        None | Some("t2") => Statistic::T2,
        Some("t1") => Statistic::T1,
        Some(other) => {
            return Err(Error::InvalidParameter(format!("unknown stat `{other}`")))
        }
    };
    let budget = if config.max_seconds.is_none() && config.max_tests.is_none() {
        None
    } else {
        Some(SearchBudget {
            max_tests: config.max_tests,
            max_seconds: config.max_seconds,
        })
    };

    let mut combined = String::new();
    let mut first = true;
    let mut calibration_cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, cell) in config.cells.iter().enumerate() {
        let cell_seed = derive_seed(master_seed, StreamKind::Experiment, 77_000 + idx as u64);
        let cfg = GofConfig {
            stat,
            bootstrap_reps: config.bootstrap_reps,
            seed: cell_seed,
            ..GofConfig::default()
        };
        let dist = match &cell.dist {
            Some(name) => ErrorDist::parse(name)?,
            None => DistSpec::Fixed(ErrorDist::Gamma),
        };
        let report = match args.scenario {
            Scenario::SizePower => Some(run_size_power(
                cell.p,
                cell.n,
                dist,
                config.reps,
                config.alpha,
                &tf,
                &cfg,
            )?),
            Scenario::Confset => Some(run_confset_study(
                cell.p,
                cell.n,
                dist,
                config.reps,
                config.alpha,
                &tf,
                &cfg,
                budget,
            )?),
            Scenario::Ci => Some(run_ci_study(cell.p, cell.n, dist, config.reps, &tf, &cfg)?),
            Scenario::Calibration => {
                // calibration cells are grouped by n and run together below
                calibration_cells.entry(cell.n).or_default().push(cell.p);
                None
            }
        };
        if let Some(report) = report {
            push_report(&mut combined, &report.to_csv_string(), &mut first);
        }
    }
    for (n, p_list) in calibration_cells {
        let cfg = GofConfig {
            stat,
            bootstrap_reps: config.bootstrap_reps,
            seed: derive_seed(master_seed, StreamKind::Experiment, 88_000 + n as u64),
            ..GofConfig::default()
        };
        let report = run_calibration_study(&p_list, n, config.reps, &cfg)?;
        push_report(&mut combined, &report.to_csv_string(), &mut first);
    }
    emit(&args.out, &combined)?;
    Ok(0)
}

fn push_report(combined: &mut String, csv: &str, first: &mut bool) {
    if *first {
        combined.push_str(csv);
        *first = false;
    } else if let Some(pos) = csv.find('\n') {
        combined.push_str(&csv[pos + 1..]); // drop the repeated header
    }
}
