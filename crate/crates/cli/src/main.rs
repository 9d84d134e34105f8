//! `feeder-stats` command-line pipelines.
//!
//! Every subcommand reads its inputs, runs one library pipeline and writes
//! plot-ready CSV/JSON files into the output directory (`--out-dir`, or
//! `FEEDER_STATS_OUT_DIR`, default the working directory). Files are written
//! atomically. Exit codes: 0 success, 1 data or runtime error (reported on
//! stderr as one JSON object), 2 usage error.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use feeder_stats::feeder::FeederTree;
use feeder_stats::forecaster::{
    cross_validate_order, CvConfig, DayAheadForecaster, ForecasterConfig, OrderSelection,
};
use feeder_stats::io;
use feeder_stats::residuals::{sweep_normality, GammaMode, SweepConfig};
use feeder_stats::scaling::{build_agg_curve, fit_scaling_law, AggConfig, LawSummary};
use feeder_stats::synth::{synth_population, Population, SynthConfig};
use feeder_stats::tailmodel::{
    fit_gpd_mle, gpd_quantile, gpd_sf, CurvePoint, DiagnosticsConfig, GpdParams, MeanExcessPoint,
    TailDiagnostics, ThetaPolicy,
};
use serde_json::json;

use output::Output;

#[derive(Debug, Parser)]
#[command(
    name = "feeder-stats",
    version,
    about = "Load-tail, forecasting and forecast-error pipelines for distribution feeders"
)]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = "FEEDER_STATS_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a generalized Pareto model to a load sample and emit tail diagnostics.
    FitGpd {
        /// Single-column CSV of loads (kWh), header `load_kwh` optional.
        loads: PathBuf,
        /// Location parameter; defaults to just below the sample minimum.
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Group feeder loads by the nearest protective device above them.
    GroupFeeder {
        /// Edge list CSV `parent,child,device,child_load_kwh`.
        tree: PathBuf,
    },
    /// Fit the day-ahead forecaster to a history and forecast the next day.
    Forecast {
        /// Long-format history CSV `date,hour,load_kwh,temp_c`.
        history: PathBuf,
        /// Model order, or `cv` to choose it by cross-validation.
        #[arg(long, default_value = "cv")]
        k: OrderArg,
        /// Candidate orders for `--k cv`.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,7")]
        candidates: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Backtest random aggregates at each level and fit the scaling law.
    AggCurve {
        #[command(flatten)]
        source: PopulationArgs,
        #[command(flatten)]
        study: StudyArgs,
    },
    /// Fit the scaling law to a curve CSV `level,replicate,W_kwh,cv_pct`.
    FitLaw {
        curve: PathBuf,
        /// Exponent p of the load term.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Shapiro-Wilk pass fraction and correlation energy per aggregation level.
    ResidualSweep {
        #[command(flatten)]
        source: PopulationArgs,
        #[command(flatten)]
        study: StudyArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Largest autocorrelation lag (hours).
        #[arg(long, default_value_t = 24)]
        max_lag: usize,
        #[arg(long, value_enum, default_value_t = GammaArg::Literal)]
        gamma: GammaArg,
    },
    /// Generate a synthetic customer population.
    Synth {
        /// JSON config; omitted fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Population directory; defaults to the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy)]
enum OrderArg {
    Fixed(usize),
    Cv,
}

impl std::str::FromStr for OrderArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("cv") {
            return Ok(Self::Cv);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Self::Fixed(k)),
            _ => Err(format!("expected a positive order or `cv`, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GammaArg {
    Literal,
    Thresholded,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Drop the intercept from the total-power model.
    #[arg(long)]
    no_intercept: bool,
    /// Drop temperature inputs from both models.
    #[arg(long)]
    no_exogenous: bool,
}

impl ModelArgs {
    fn config(&self, order: OrderSelection) -> ForecasterConfig {
        ForecasterConfig {
            order,
            intercept: !self.no_intercept,
            exogenous: !self.no_exogenous,
            ..ForecasterConfig::default()
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct PopulationArgs {
    /// Directory of per-customer history CSVs.
    population: Option<PathBuf>,
    /// Generate the population from this JSON config instead.
    #[arg(long)]
    synth: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StudyArgs {
    /// Customers per aggregate.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,2,5,10,20,50,100,200,500,1000,2000"
    )]
    levels: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    replicates: usize,
    /// Share of each history used for fitting.
    #[arg(long, default_value_t = 2.0 / 3.0)]
    train_fraction: f64,
    /// Model order of the forecaster.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Seeds subset sampling and, with `--synth`, the population.
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    model: ModelArgs,
}

impl StudyArgs {
    fn agg_config(&self) -> AggConfig {
        AggConfig {
            replicates: self.replicates,
            forecaster: self.model.config(OrderSelection::Fixed(self.k)),
            train_fraction: self.train_fraction,
            ..AggConfig::new(self.levels.clone(), self.seed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", output::error_json(&e));
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let out = Output::new(&cli.out_dir)?;
    match cli.command {
        Command::FitGpd { loads, theta } => fit_gpd(&out, cli.format, &loads, theta),
        Command::GroupFeeder { tree } => group_feeder(&out, cli.format, &tree),
        Command::Forecast {
            history,
            k,
            candidates,
            folds,
            model,
        } => forecast(&out, &history, k, &candidates, folds, &model),
        Command::AggCurve { source, study } => agg_curve(&out, cli.format, &source, &study),
        Command::FitLaw { curve, p } => fit_law(&out, &curve, p),
        Command::ResidualSweep {
            source,
            study,
            alpha,
            max_lag,
            gamma,
        } => {
            let cfg = SweepConfig {
                agg: study.agg_config(),
                alpha,
                max_lag,
                gamma: match gamma {
                    GammaArg::Literal => GammaMode::Literal,
                    GammaArg::Thresholded => GammaMode::Thresholded,
                },
            };
            residual_sweep(&out, cli.format, &source, study.seed, &cfg)
        }
        Command::Synth {
            config,
            out: dir,
            seed,
        } => {
            let dir = match dir {
                Some(d) => Output::new(&d)?,
                None => out,
            };
            synth(&dir, config.as_deref(), seed)
        }
    }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn fit_gpd(out: &Output, format: Format, path: &Path, theta: Option<f64>) -> Result<()> {
    let loads = io::read_loads(open(path)?)?;
    let policy = theta.map_or(ThetaPolicy::SampleMinimum, ThetaPolicy::Fixed);
    let fit = fit_gpd_mle(&loads, policy)?;
    let diag = TailDiagnostics::compute(&loads, &DiagnosticsConfig::default())?;
    let model = model_curves(&fit.params, &loads, &diag)?;
    out.json("gpd_fit.json", &fit)?;
    match format {
        Format::Csv => {
            out.write("mean_excess.csv", |w| {
                io::write_mean_excess(
                    w,
                    &[("data", &diag.mean_excess), ("gpd", &model.mean_excess)],
                )
            })?;
            out.write("log_survival.csv", |w| {
                io::write_log_survival(
                    w,
                    &[("data", &diag.log_survival), ("gpd", &model.log_survival)],
                )
            })?;
            out.write("zipf.csv", |w| {
                io::write_zipf(w, &[("data", &diag.zipf), ("gpd", &model.zipf)])
            })?;
        }
        Format::Json => out.json(
            "tail_diagnostics.json",
            &json!({ "data": diag, "gpd": model }),
        )?,
    }
    Ok(())
}

/// Diagnostic curves implied by the fitted model at the sample's abscissae.
fn model_curves(p: &GpdParams, loads: &[f64], data: &TailDiagnostics) -> Result<TailDiagnostics> {
    let mean_excess = if p.kappa < 1.0 {
        data.mean_excess
            .iter()
            .map(|m| MeanExcessPoint {
                e: (p.sigma + p.kappa * (m.u - p.theta).max(0.0)) / (1.0 - p.kappa),
                ..*m
            })
            .collect()
    } else {
        Vec::new()
    };
    let log_survival = data
        .log_survival
        .iter()
        .map(|c| {
            Ok(CurvePoint {
                x: c.x,
                y: gpd_sf(c.x.exp(), p)?.ln(),
            })
        })
        .collect::<feeder_stats::Result<Vec<_>>>()?
        .into_iter()
        .filter(|c| c.y.is_finite())
        .collect();
    let n = loads.len() as f64;
    let zipf = data
        .zipf
        .iter()
        .map(|c| {
            let rank = c.x.exp();
            let x = gpd_quantile(1.0 - rank / n, p)?;
            Ok(CurvePoint { x: c.x, y: x.ln() })
        })
        .collect::<feeder_stats::Result<Vec<_>>>()?
        .into_iter()
        .filter(|c| c.y.is_finite())
        .collect();
    Ok(TailDiagnostics {
        mean_excess,
        log_survival,
        zipf,
    })
}

fn group_feeder(out: &Output, format: Format, path: &Path) -> Result<()> {
    let tree = FeederTree::from_edges(&io::read_tree(open(path)?)?)?;
    let groups = tree.group_by_device();
    match format {
        Format::Csv => out.write("groups.csv", |w| io::write_groups(w, &groups)),
        Format::Json => out.json("groups.json", &groups),
    }
}

fn forecast(
    out: &Output,
    path: &Path,
    k: OrderArg,
    candidates: &[usize],
    folds: usize,
    model_args: &ModelArgs,
) -> Result<()> {
    let dated = io::read_history(open(path)?)?;
    let mut history = dated.history;
    let mut notes = Vec::new();
    if !history.has_next_day_temp() {
        let last = *history.hourly_temp().last().context("history is empty")?;
        history = history.with_next_day_temp(last)?;
        notes.push("no temperature for the forecast day; repeated the last day's".to_string());
    }
    let order = match k {
        OrderArg::Fixed(k) => OrderSelection::Fixed(k),
        OrderArg::Cv => OrderSelection::CrossValidated {
            candidates: candidates.to_vec(),
            folds,
        },
    };
    let cfg = model_args.config(order.clone());
    let cv = match &order {
        OrderSelection::CrossValidated { candidates, folds } => {
            let cv_cfg = CvConfig {
                folds: *folds,
                ..CvConfig::new(cfg.clone())
            };
            let outcome = cross_validate_order(&history, candidates, &cv_cfg)?;
            notes.extend(outcome.warnings());
            Some(outcome)
        }
        OrderSelection::Fixed(_) => None,
    };
    let k = cv.as_ref().map_or_else(
        || match order {
            OrderSelection::Fixed(k) => k,
            OrderSelection::CrossValidated { .. } => unreachable!("handled above"),
        },
        |c| c.best_k,
    );
    let model = DayAheadForecaster::fit_order(&history, k, &cfg)?;
    let next = model.forecast_next(&history)?;
    let fitted = model.in_sample(&history)?;
    let next_date = dated.start_date + chrono_days(history.len());
    let first_fitted = dated.start_date + chrono_days(fitted.first_day);

    out.write("forecast_profile.csv", |w| {
        io::write_profile(w, next_date, next.profile.hours())
    })?;
    out.write("forecast_residuals.csv", |w| {
        io::write_residuals(w, first_fitted, &fitted.actual, &fitted.predicted)
    })?;
    out.json(
        "forecast_model.json",
        &json!({
            "forecast_date": next_date.to_string(),
            "forecast_total_kwh": next.total,
            "model": model,
            "cross_validation": cv,
            "notes": notes,
        }),
    )?;
    for n in &notes {
        eprintln!("warning: {n}");
    }
    Ok(())
}

fn chrono_days(n: usize) -> chrono::Days {
    chrono::Days::new(n as u64)
}

fn load_population(source: &PopulationArgs, seed: u64) -> Result<Population> {
    match (&source.population, &source.synth) {
        (Some(dir), None) => Ok(io::read_population_dir(dir)?),
        (None, Some(cfg)) => Ok(synth_population(&read_synth_config(Some(cfg), seed)?)?),
        _ => bail!("give either a population directory or --synth, not both"),
    }
}

fn read_synth_config(path: Option<&Path>, seed: u64) -> Result<SynthConfig> {
    let cfg: SynthConfig = match path {
        Some(p) => serde_json::from_reader(open(p)?)
            .with_context(|| format!("invalid synth config {}", p.display()))?,
        None => SynthConfig::default(),
    };
    let cfg = SynthConfig { seed, ..cfg };
    cfg.validate()?;
    Ok(cfg)
}

fn warn_skipped(skipped: &[feeder_stats::scaling::SkippedLevel]) {
    for s in skipped {
        eprintln!("warning: level {} skipped: {}", s.n_customers, s.reason);
    }
}

fn agg_curve(
    out: &Output,
    format: Format,
    source: &PopulationArgs,
    study: &StudyArgs,
) -> Result<()> {
    let pop = load_population(source, study.seed)?;
    let curve = build_agg_curve(&pop, &study.agg_config())?;
    warn_skipped(&curve.skipped);
    match format {
        Format::Csv => out.write("agg_curve.csv", |w| io::write_curve(w, &curve.points))?,
        Format::Json => out.json("agg_curve.json", &curve.points)?,
    }
    let law = fit_scaling_law(&curve.points, 1.0)?;
    out.json("scaling_law.json", &LawSummary::from(&law))
}

fn fit_law(out: &Output, path: &Path, p: f64) -> Result<()> {
    let points = io::read_curve(open(path)?)?;
    let law = fit_scaling_law(&points, p)?;
    out.json("scaling_law.json", &LawSummary::from(&law))
}

fn residual_sweep(
    out: &Output,
    format: Format,
    source: &PopulationArgs,
    seed: u64,
    cfg: &SweepConfig,
) -> Result<()> {
    let pop = load_population(source, seed)?;
    let res = sweep_normality(&pop, cfg)?;
    warn_skipped(&res.skipped);
    match format {
        Format::Csv => out.write("residual_sweep.csv", |w| io::write_sweep(w, &res)),
        Format::Json => out.json("residual_sweep.json", &res),
    }
}

fn synth(out: &Output, config: Option<&Path>, seed: u64) -> Result<()> {
    let cfg = read_synth_config(config, seed)?;
    let pop = synth_population(&cfg)?;
    for i in 0..pop.n_customers() {
        let h = io::customer_history(&pop, i)?;
        out.write(&io::customer_file_name(i), |w| io::write_history(w, &h))?;
    }
    out.json("synth_config.json", &cfg)?;
    if let Some(sizes) = pop.sizes() {
        out.json("customer_sizes.json", &sizes)?;
    }
    Ok(())
}
