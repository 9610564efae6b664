//! Command-line driver: dataset generation, training, evaluation,
//! parameter sweeps, and Monte-Carlo bound verification, all emitting CSV
//! artifacts.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use ocrisk::data::{
    gen_synthetic, heldout_indices, load_csv, make_pu_split, make_pu_split_disjoint, write_csv,
    LabeledDataset, PUSample,
};
use ocrisk::metrics::{auc, confusion, MetricsReport};
use ocrisk::model::{load_checkpoint, save_checkpoint, ModelParams};
use ocrisk::presets;
use ocrisk::risk::{pbl_adjust, pul_adjust, Estimator, EstimatorConfig, LossKind};
use ocrisk::theory::{grid_reports, suggest_alpha, BoundReport, BoundSpec};
use ocrisk::train::{
    evaluate_on, train, train_calibrated, CalibMethod, TrainConfig, TrainLog, WarmupStyle,
};

use config::{parse_list, pick, pick_required, KvConfig};
use report::{metrics_row, metrics_summary_row, Emitter, METRICS_HEADER};

#[derive(Parser, Debug)]
#[command(
    name = "ocrisk",
    version,
    about = "Positive-unlabeled / one-class classification toolkit"
)]
pub struct Cli {
    /// Flat key=value config file. Precedence: defaults < config file <
    /// OCRISK_* environment variables < flags.
    #[arg(long, global = true, env = "OCRISK_CONFIG")]
    pub config: Option<PathBuf>,

    /// Omit generated-at stamp lines so reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic dataset and write it as CSV.
    Gen(GenArgs),
    /// Train a scorer on a PU split; writes a checkpoint, a training log,
    /// and held-out metrics.
    Train(TrainArgs),
    /// Evaluate a saved checkpoint on a dataset CSV.
    Eval(EvalArgs),
    /// Sweep one parameter over a list of values.
    Sweep(SweepArgs),
    /// Verify the negative-risk bounds by Monte Carlo over an (n_p, n_u)
    /// grid.
    VerifyTheory(TheoryArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Feature dimension (default 2).
    #[arg(long)]
    pub dim: Option<usize>,
    /// True class prior in (0, 1). Required.
    #[arg(long)]
    pub pi_p: Option<f64>,
    /// Number of rows (default 50000).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, env = "OCRISK_SEED")]
    pub seed: Option<u64>,
    /// Negative mixture components, 2..=16 (default 5).
    #[arg(long)]
    pub neg_components: Option<usize>,
    /// Multiplier on all component stds (default 1.0).
    #[arg(long)]
    pub overlap_scale: Option<f64>,
    /// Output CSV path. Required.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

/// Options shared by `train` and `sweep`.
#[derive(Args, Debug, Clone)]
pub struct TrainOpts {
    /// Dataset CSV. Required.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// supervised_pn | bce_u_as_n | unbiased_pu | abs_negative |
    /// one_class | pul | pbl (default one_class).
    #[arg(long)]
    pub estimator: Option<String>,
    /// Labeled positives per run (default 100).
    #[arg(long)]
    pub n_p: Option<usize>,
    /// Unlabeled samples per run (default 4000).
    #[arg(long)]
    pub n_u: Option<usize>,
    /// Positive-risk weight (default 0.3).
    #[arg(long)]
    pub alpha_p: Option<f64>,
    /// Focal exponent (default 0.1).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Class prior fed to the estimator (default: the dataset's).
    #[arg(long)]
    pub pi_p: Option<f64>,
    /// sigmoid | logistic (default sigmoid).
    #[arg(long)]
    pub loss: Option<String>,
    /// Probability cap for the focal modulator (default 0.999).
    #[arg(long)]
    pub clamp_hi: Option<f64>,
    /// Training epochs (default 1000).
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Warm-up epochs under the logistic loss (default 20).
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Learning rate (default 0.01).
    #[arg(long)]
    pub lr: Option<f64>,
    /// SGD momentum (default 0.9).
    #[arg(long)]
    pub momentum: Option<f64>,
    /// Weight decay (default 1e-4).
    #[arg(long)]
    pub weight_decay: Option<f64>,
    /// Hidden layer sizes, comma-separated (default 64,64).
    #[arg(long)]
    pub hidden: Option<String>,
    /// Held-out evaluation period in epochs (default 50).
    #[arg(long)]
    pub eval_every: Option<usize>,
    /// Root seed; replicate i uses seed + i (default 0).
    #[arg(long, env = "OCRISK_SEED")]
    pub seed: Option<u64>,
    /// Number of seed-replicated runs (default 1 for train, 5 for sweep).
    #[arg(long)]
    pub repeat: Option<usize>,
    /// Exclude labeled positives from the unlabeled pool.
    #[arg(long)]
    pub forbid_overlap: bool,
    /// estimator_logistic | plain_bce (default estimator_logistic).
    #[arg(long)]
    pub warmup_style: Option<String>,
    #[arg(long, env = "OCRISK_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub opts: TrainOpts,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Dataset CSV. Required.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Checkpoint path. Required.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Output metrics CSV. Required.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub opts: TrainOpts,
    /// alpha_p | gamma | pi_p_input | n_p. Required.
    #[arg(long)]
    pub param: Option<String>,
    /// Comma-separated grid values. Required.
    #[arg(long)]
    pub values: Option<String>,
    /// Output grid CSV. Required.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TheoryArgs {
    /// Class prior of the check distribution (default 0.3).
    #[arg(long)]
    pub pi_p: Option<f64>,
    /// Comma-separated n_p grid (default 50,200,800).
    #[arg(long)]
    pub np_grid: Option<String>,
    /// Comma-separated n_u grid (default 50,200,800).
    #[arg(long)]
    pub nu_grid: Option<String>,
    /// Monte-Carlo trials per cell, >= 1000 (default 20000).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Confidence parameter in (0, 1) (default 0.05).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Margin, a number or `auto` for the largest certifiable value
    /// (default auto).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Optional checkpoint for the frozen scorer (default: built-in
    /// linear scorer).
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, env = "OCRISK_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "OCRISK_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    execute(cli)
}

pub fn execute(cli: Cli) -> Result<()> {
    let kv = KvConfig::load(cli.config.as_deref())?;
    let emit = Emitter {
        stamp: !cli.no_timestamp && kv.get::<bool>("no_timestamp")?.is_none_or(|v| !v),
    };
    match cli.command {
        Command::Gen(args) => cmd_gen(args, &kv, emit),
        Command::Train(args) => cmd_train(args.opts, &kv, emit),
        Command::Eval(args) => cmd_eval(args, emit),
        Command::Sweep(args) => cmd_sweep(args, &kv, emit),
        Command::VerifyTheory(args) => cmd_verify_theory(args, &kv, emit),
    }
}

fn cmd_gen(args: GenArgs, kv: &KvConfig, emit: Emitter) -> Result<()> {
    let dim = pick(args.dim, kv.get("dim")?, 2);
    let pi_p = pick_required(args.pi_p, kv.get("pi_p")?, "pi-p")?;
    let n = pick(args.n, kv.get("n")?, 50_000);
    let seed = pick(args.seed, kv.get("seed")?, 0);
    let neg = pick(args.neg_components, kv.get("neg_components")?, 5);
    let overlap = pick(args.overlap_scale, kv.get("overlap_scale")?, 1.0);
    let out = pick_required(args.out, kv.get("out")?, "out")?;

    let spec = presets::clustered_task(dim, pi_p, n, neg, overlap)?;
    let ds = gen_synthetic(&spec, seed)?;
    let mut w = emit.open(&out)?;
    write_csv(&ds, &mut w)?;
    w.flush()?;
    println!(
        "wrote {} rows (positive fraction {:.4}) to {}",
        ds.len(),
        ds.empirical_positive_fraction(),
        out.display()
    );
    Ok(())
}

/// Estimator choice at the CLI: a core estimator, or a calibrated wrapper
/// around the P-vs-U cross-entropy scorer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CliEstimator {
    Core(Estimator),
    Calibrated(CalibMethod),
}

impl CliEstimator {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "pul" => Ok(CliEstimator::Calibrated(CalibMethod::Pul)),
            "pbl" => Ok(CliEstimator::Calibrated(CalibMethod::Pbl)),
            other => Ok(CliEstimator::Core(Estimator::from_name(other)?)),
        }
    }

    fn name(self) -> &'static str {
        match self {
            CliEstimator::Core(e) => e.name(),
            CliEstimator::Calibrated(m) => m.name(),
        }
    }
}

struct ResolvedTrain {
    data: PathBuf,
    estimator: CliEstimator,
    n_p: usize,
    n_u: usize,
    pi_p_override: Option<f64>,
    base: TrainConfig,
    seed: u64,
    repeat: usize,
    forbid_overlap: bool,
    out_dir: PathBuf,
}

fn resolve_train(opts: &TrainOpts, kv: &KvConfig, default_repeat: usize) -> Result<ResolvedTrain> {
    let data = pick_required(opts.data.clone(), kv.get("data")?, "data")?;
    let estimator = CliEstimator::parse(&pick(
        opts.estimator.clone(),
        kv.get("estimator")?,
        "one_class".to_string(),
    ))?;
    let loss = LossKind::from_name(&pick(
        opts.loss.clone(),
        kv.get("loss")?,
        "sigmoid".to_string(),
    ))?;
    let warmup_style = match pick(
        opts.warmup_style.clone(),
        kv.get("warmup_style")?,
        "estimator_logistic".to_string(),
    )
    .as_str()
    {
        "estimator_logistic" => WarmupStyle::EstimatorLogistic,
        "plain_bce" => WarmupStyle::PlainBce,
        other => bail!("--warmup-style: unknown `{other}`"),
    };
    let hidden_raw = pick(opts.hidden.clone(), kv.get("hidden")?, "64,64".to_string());
    let hidden_dims = if hidden_raw.trim().is_empty() {
        Vec::new()
    } else {
        parse_list::<usize>(&hidden_raw, "hidden")?
    };

    // pi_p placeholder; replaced per-dataset below
    let core_estimator = match estimator {
        CliEstimator::Core(e) => e,
        CliEstimator::Calibrated(_) => Estimator::BceUAsN,
    };
    let mut est_cfg = EstimatorConfig::new(core_estimator, 0.5).with_loss(loss);
    est_cfg.alpha_p = pick(opts.alpha_p, kv.get("alpha_p")?, 0.3);
    est_cfg.gamma = pick(opts.gamma, kv.get("gamma")?, 0.1);
    est_cfg.clamp_hi = pick(opts.clamp_hi, kv.get("clamp_hi")?, 0.999);

    let mut base = TrainConfig::new(est_cfg, 0);
    base.epochs = pick(opts.epochs, kv.get("epochs")?, 1000);
    base.warmup_epochs = pick(opts.warmup, kv.get("warmup")?, 20);
    base.learning_rate = pick(opts.lr, kv.get("lr")?, 0.01);
    base.momentum = pick(opts.momentum, kv.get("momentum")?, 0.9);
    base.weight_decay = pick(opts.weight_decay, kv.get("weight_decay")?, 1e-4);
    base.eval_every = pick(opts.eval_every, kv.get("eval_every")?, 50);
    base.hidden_dims = hidden_dims;
    base.warmup_style = warmup_style;

    Ok(ResolvedTrain {
        data,
        estimator,
        n_p: pick(opts.n_p, kv.get("n_p")?, 100),
        n_u: pick(opts.n_u, kv.get("n_u")?, 4000),
        pi_p_override: opts.pi_p.or(kv.get("pi_p")?),
        base,
        seed: pick(opts.seed, kv.get("seed")?, 0),
        repeat: pick(opts.repeat, kv.get("repeat")?, default_repeat),
        forbid_overlap: opts.forbid_overlap || kv.get("forbid_overlap")?.unwrap_or(false),
        out_dir: pick(opts.out_dir.clone(), kv.get("out_dir")?, PathBuf::from(".")),
    })
}

struct RunOutcome {
    seed: u64,
    params: ModelParams,
    log: TrainLog,
    report: MetricsReport,
    calibration: Option<(CalibMethod, f64)>,
}

/// Train one replicate and evaluate it on the held-out rows.
fn run_one(
    ds: &LabeledDataset,
    pu: &PUSample,
    cfg: &TrainConfig,
    estimator: CliEstimator,
) -> Result<RunOutcome> {
    let held = heldout_indices(ds, pu);
    match estimator {
        CliEstimator::Core(_) => {
            let tm = train(ds, pu, cfg)?;
            let report = evaluate_on(&tm.params, ds, &held)?;
            Ok(RunOutcome {
                seed: cfg.seed,
                params: tm.params,
                log: tm.log,
                report,
                calibration: None,
            })
        }
        CliEstimator::Calibrated(method) => {
            let cal = train_calibrated(ds, pu, cfg, method)?;
            let report = eval_adjusted(
                &cal.model.params,
                cfg.estimator.clamp_hi,
                method,
                cal.c,
                ds,
                &held,
            )?;
            Ok(RunOutcome {
                seed: cfg.seed,
                params: cal.model.params,
                log: cal.model.log,
                report,
                calibration: Some((method, cal.c)),
            })
        }
    }
}

/// Metrics for a calibrated scorer: the adjusted output is thresholded at
/// 1 for decisions and ranked for AUC.
fn eval_adjusted(
    params: &ModelParams,
    clamp_hi: f64,
    method: CalibMethod,
    c: f64,
    ds: &LabeledDataset,
    idx: &[usize],
) -> Result<MetricsReport> {
    let mut adjusted = Vec::with_capacity(idx.len());
    let mut decisions = Vec::with_capacity(idx.len());
    let mut truth = Vec::with_capacity(idx.len());
    for &i in idx {
        let g = params.predict_prob(ds.features.row(i), clamp_hi)?;
        let a = match method {
            CalibMethod::Pul => pul_adjust(g, c)?,
            CalibMethod::Pbl => pbl_adjust(g, c)?,
        };
        adjusted.push(a);
        decisions.push(if a > 1.0 { 1 } else { -1 });
        truth.push(ds.y_true[i]);
    }
    let counts = confusion(&decisions, &truth)?;
    let auc = auc(&adjusted, &truth)?;
    Ok(MetricsReport::from_counts(&counts, auc))
}

fn split_for(
    ds: &LabeledDataset,
    n_p: usize,
    n_u: usize,
    seed: u64,
    forbid_overlap: bool,
) -> ocrisk::Result<PUSample> {
    if forbid_overlap {
        make_pu_split_disjoint(ds, n_p, n_u, seed)
    } else {
        make_pu_split(ds, n_p, n_u, seed)
    }
}

fn checkpoint_meta(ds: &LabeledDataset, outcome: &RunOutcome, cfg: &TrainConfig) -> Vec<(String, String)> {
    let mut meta = vec![
        ("estimator".to_string(), match outcome.calibration {
            Some((m, _)) => m.name().to_string(),
            None => cfg.estimator.estimator.name().to_string(),
        }),
        ("class".to_string(), ds.name.clone()),
        ("seed".to_string(), outcome.seed.to_string()),
        ("clamp_hi".to_string(), format!("{}", cfg.estimator.clamp_hi)),
    ];
    if let Some((method, c)) = outcome.calibration {
        meta.push(("calibration".to_string(), format!("{} {}", method.name(), c)));
    }
    meta
}

fn cmd_train(opts: TrainOpts, kv: &KvConfig, emit: Emitter) -> Result<()> {
    let r = resolve_train(&opts, kv, 1)?;
    if r.repeat == 0 {
        bail!("--repeat must be >= 1");
    }
    let ds = load_csv(&r.data)?;
    let pi_p = r.pi_p_override.unwrap_or(ds.pi_p_true);
    std::fs::create_dir_all(&r.out_dir)
        .with_context(|| format!("creating {}", r.out_dir.display()))?;

    let outcomes: Vec<RunOutcome> = (0..r.repeat)
        .into_par_iter()
        .map(|rep| {
            let seed = r.seed + rep as u64;
            let mut cfg = r.base.clone();
            cfg.seed = seed;
            cfg.estimator.pi_p = pi_p;
            let pu = split_for(&ds, r.n_p, r.n_u, seed, r.forbid_overlap)?;
            run_one(&ds, &pu, &cfg, r.estimator)
        })
        .collect::<Result<_>>()?;

    let est_name = r.estimator.name();
    for outcome in &outcomes {
        let mut cfg = r.base.clone();
        cfg.seed = outcome.seed;
        save_checkpoint(
            &outcome.params,
            r.out_dir.join(format!("checkpoint_seed{}.txt", outcome.seed)),
            &checkpoint_meta(&ds, outcome, &cfg),
        )?;
        let mut w = emit.open(&r.out_dir.join(format!("trainlog_seed{}.csv", outcome.seed)))?;
        outcome.log.write_csv(&mut w)?;
        w.flush()?;
    }

    let metrics_path = r.out_dir.join("metrics.csv");
    let mut w = emit.open(&metrics_path)?;
    writeln!(w, "{METRICS_HEADER}")?;
    for outcome in &outcomes {
        writeln!(w, "{}", metrics_row(&ds.name, est_name, &outcome.report))?;
    }
    let reports: Vec<MetricsReport> = outcomes.iter().map(|o| o.report).collect();
    writeln!(w, "{}", metrics_summary_row(&ds.name, est_name, &reports))?;
    w.flush()?;

    for outcome in &outcomes {
        println!(
            "seed {}: precision {} recall {} f1 {} auc {}",
            outcome.seed,
            report::pct(outcome.report.precision),
            report::pct(outcome.report.recall),
            report::pct(outcome.report.f1),
            report::pct(outcome.report.auc),
        );
    }
    println!("wrote {}", metrics_path.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs, emit: Emitter) -> Result<()> {
    let data = args.data.ok_or_else(|| anyhow!("missing required --data"))?;
    let model = args.model.ok_or_else(|| anyhow!("missing required --model"))?;
    let out = args.out.ok_or_else(|| anyhow!("missing required --out"))?;

    let ds = load_csv(&data)?;
    let (params, meta) = load_checkpoint(&model)?;
    let find = |key: &str| meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
    let est_name = find("estimator").unwrap_or_else(|| "unknown".to_string());
    let all_rows: Vec<usize> = (0..ds.len()).collect();

    let report = match find("calibration") {
        Some(spec) => {
            let (method, c) = spec
                .split_once(' ')
                .ok_or_else(|| anyhow!("malformed calibration metadata `{spec}`"))?;
            let method = CalibMethod::from_name(method)?;
            let c: f64 = c.parse().context("calibration constant")?;
            let clamp_hi: f64 = find("clamp_hi")
                .map(|v| v.parse())
                .transpose()
                .context("clamp_hi metadata")?
                .unwrap_or(0.999);
            eval_adjusted(&params, clamp_hi, method, c, &ds, &all_rows)?
        }
        None => evaluate_on(&params, &ds, &all_rows)?,
    };

    let mut w = emit.open(&out)?;
    writeln!(w, "{METRICS_HEADER}")?;
    writeln!(w, "{}", metrics_row(&ds.name, &est_name, &report))?;
    w.flush()?;
    println!(
        "{}: precision {} recall {} f1 {} auc {} over {} rows",
        ds.name,
        report::pct(report.precision),
        report::pct(report.recall),
        report::pct(report.f1),
        report::pct(report.auc),
        report.n_eval
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SweepParam {
    AlphaP,
    Gamma,
    PiPInput,
    NP,
}

impl SweepParam {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "alpha_p" => Ok(SweepParam::AlphaP),
            "gamma" => Ok(SweepParam::Gamma),
            "pi_p_input" => Ok(SweepParam::PiPInput),
            "n_p" => Ok(SweepParam::NP),
            other => bail!("--param: unknown `{other}` (alpha_p|gamma|pi_p_input|n_p)"),
        }
    }

    fn name(self) -> &'static str {
        match self {
            SweepParam::AlphaP => "alpha_p",
            SweepParam::Gamma => "gamma",
            SweepParam::PiPInput => "pi_p_input",
            SweepParam::NP => "n_p",
        }
    }
}

/// One sweep cell per (value, replicate), run concurrently and emitted in
/// deterministic order with a `mean(std)` summary row per value.
fn cmd_sweep(args: SweepArgs, kv: &KvConfig, emit: Emitter) -> Result<()> {
    let r = resolve_train(&args.opts, kv, 5)?;
    if r.repeat == 0 {
        bail!("--repeat must be >= 1");
    }
    let param = SweepParam::parse(&pick_required(args.param, kv.get("param")?, "param")?)?;
    let values_raw = pick_required(args.values, kv.get("values")?, "values")?;
    let values = parse_list::<f64>(&values_raw, "values")?;
    let out = pick_required(args.out, kv.get("out")?, "out")?;

    let ds = load_csv(&r.data)?;
    let pi_p = r.pi_p_override.unwrap_or(ds.pi_p_true);

    let cells: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|v| (0..r.repeat).map(move |rep| (v, rep)))
        .collect();
    let outcomes: Vec<MetricsReport> = cells
        .par_iter()
        .map(|&(vi, rep)| {
            let value = values[vi];
            let seed = r.seed + rep as u64;
            let mut cfg = r.base.clone();
            cfg.seed = seed;
            cfg.estimator.pi_p = pi_p;
            let mut n_p = r.n_p;
            match param {
                SweepParam::AlphaP => cfg.estimator.alpha_p = value,
                SweepParam::Gamma => cfg.estimator.gamma = value,
                SweepParam::PiPInput => cfg.estimator.pi_p = value,
                SweepParam::NP => {
                    if value.fract() != 0.0 || value < 1.0 {
                        bail!("--values: n_p value {value} is not a positive integer");
                    }
                    n_p = value as usize;
                }
            }
            let pu = split_for(&ds, n_p, r.n_u, seed, r.forbid_overlap)?;
            run_one(&ds, &pu, &cfg, r.estimator).map(|o| o.report)
        })
        .collect::<Result<_>>()?;

    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut w = emit.open(&out)?;
    writeln!(w, "param,value,seed,precision,recall,f1,auc")?;
    for (vi, value) in values.iter().enumerate() {
        let runs: Vec<MetricsReport> = (0..r.repeat)
            .map(|rep| outcomes[vi * r.repeat + rep])
            .collect();
        for (rep, report) in runs.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                param.name(),
                value,
                r.seed + rep as u64,
                report::pct(report.precision),
                report::pct(report.recall),
                report::pct(report.f1),
                report::pct(report.auc),
            )?;
        }
        writeln!(
            w,
            "{},{},summary,{},{},{},{}",
            param.name(),
            value,
            report::pct_mean_std(&runs.iter().map(|r| r.precision).collect::<Vec<_>>()),
            report::pct_mean_std(&runs.iter().map(|r| r.recall).collect::<Vec<_>>()),
            report::pct_mean_std(&runs.iter().map(|r| r.f1).collect::<Vec<_>>()),
            report::pct_mean_std(&runs.iter().map(|r| r.auc).collect::<Vec<_>>()),
        )?;
    }
    w.flush()?;
    println!(
        "swept {} over {} values x {} seeds -> {}",
        param.name(),
        values.len(),
        r.repeat,
        out.display()
    );
    Ok(())
}

const BOUNDS_HEADER: &str = "n_p,n_u,trials,pi_p,sigma,alpha,rn_ref,ref_std_error,delta_f,\
p_s_minus,p_s_minus_slack,p_s_minus_pass,bias,bias_bound,bias_mc_std,bias_pass,dev_level,dev_quantile,\
dev_bound,dev_pass,median_abs_dev";

fn bounds_row(r: &BoundReport) -> String {
    let pf = |b: bool| if b { "PASS" } else { "FAIL" };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.n_p,
        r.n_u,
        r.trials,
        r.pi_p,
        r.sigma,
        r.alpha_margin,
        r.true_negative_risk_ref,
        r.ref_std_error,
        r.delta_f,
        r.empirical_p_s_minus,
        r.branch_probability_slack(),
        pf(r.branch_probability_pass()),
        r.empirical_bias,
        r.bias_bound,
        r.bias_mc_std,
        pf(r.bias_pass()),
        r.deviation_level,
        r.deviation_quantile,
        r.deviation_bound,
        pf(r.deviation_pass()),
        r.median_abs_deviation,
    )
}

fn cmd_verify_theory(args: TheoryArgs, kv: &KvConfig, emit: Emitter) -> Result<()> {
    let pi_p = pick(args.pi_p, kv.get("pi_p")?, 0.3);
    let np_grid = parse_list::<usize>(
        &pick(args.np_grid, kv.get("np_grid")?, "50,200,800".to_string()),
        "np-grid",
    )?;
    let nu_grid = parse_list::<usize>(
        &pick(args.nu_grid, kv.get("nu_grid")?, "50,200,800".to_string()),
        "nu-grid",
    )?;
    let trials = pick(args.trials, kv.get("trials")?, 20_000);
    let sigma = pick(args.sigma, kv.get("sigma")?, 0.05);
    let alpha_raw = pick(args.alpha, kv.get("alpha")?, "auto".to_string());
    let seed = pick(args.seed, kv.get("seed")?, 0);
    let out_dir = pick(args.out_dir, kv.get("out_dir")?, PathBuf::from("."));

    let model = match args.model {
        Some(path) => load_checkpoint(&path)?.0,
        None => presets::bound_check_scorer(),
    };
    let distribution = presets::bound_check_distribution(pi_p)?;
    let mut spec = BoundSpec {
        model,
        distribution,
        pi_p,
        n_p: np_grid[0],
        n_u: nu_grid[0],
        trials,
        alpha_margin: 1.0, // replaced below
        sigma,
        loss: LossKind::Sigmoid,
        seed,
    };
    spec.alpha_margin = match alpha_raw.as_str() {
        "auto" => suggest_alpha(&spec)?,
        raw => raw
            .parse::<f64>()
            .with_context(|| format!("--alpha: not a number or `auto`: `{raw}`"))?,
    };

    let reports = grid_reports(&spec, &np_grid, &nu_grid)?;

    std::fs::create_dir_all(&out_dir)?;
    let csv_path = out_dir.join("bounds.csv");
    let mut w = emit.open(&csv_path)?;
    writeln!(w, "{BOUNDS_HEADER}")?;
    for r in &reports {
        writeln!(w, "{}", bounds_row(r))?;
    }
    w.flush()?;

    let txt_path = out_dir.join("bounds.txt");
    let mut t = emit.open(&txt_path)?;
    for r in &reports {
        write!(t, "{}", r.summary())?;
    }
    // deviation scaling between (n, n) and (4n, 4n) diagonal cells
    for a in &reports {
        if a.n_p != a.n_u {
            continue;
        }
        if let Some(b) = reports.iter().find(|b| b.n_p == 4 * a.n_p && b.n_u == 4 * a.n_u) {
            writeln!(
                t,
                "median deviation ratio ({0},{0}) -> ({1},{1}): {2:.4}",
                a.n_p,
                b.n_p,
                b.median_abs_deviation / a.median_abs_deviation
            )?;
        }
    }
    t.flush()?;

    let failures = reports.iter().filter(|r| !r.all_pass()).count();
    for r in &reports {
        println!(
            "cell ({}, {}): P(S-) {:.5} <= {:.5} [{}], bias {:.5} [{}], deviation q {:.5} <= {:.5} [{}]",
            r.n_p,
            r.n_u,
            r.empirical_p_s_minus,
            r.delta_f + r.branch_probability_slack(),
            if r.branch_probability_pass() { "PASS" } else { "FAIL" },
            r.empirical_bias,
            if r.bias_pass() { "PASS" } else { "FAIL" },
            r.deviation_quantile,
            r.deviation_bound,
            if r.deviation_pass() { "PASS" } else { "FAIL" },
        );
    }
    println!("wrote {} and {}", csv_path.display(), txt_path.display());
    if failures > 0 {
        bail!("{failures} grid cells failed a bound check");
    }
    Ok(())
}
