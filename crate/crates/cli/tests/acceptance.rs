//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Heavy experiments hold a shared lock so their runtime assertions are
//! measured without cross-test contention; run with `--nocapture` to see
//! the per-criterion lines.

use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;

use ocrisk::data::{gen_synthetic, heldout_indices, make_pu_split, LabeledDataset};
use ocrisk::metrics::f1;
use ocrisk::model::init_mlp;
use ocrisk::presets;
use ocrisk::risk::{
    negative_risk_oc, negative_risk_unbiased, risk_total, risk_with_grads, Estimator,
    EstimatorConfig, LossKind,
};
use ocrisk::rng::sub_rng;
use ocrisk::theory::{grid_reports, suggest_alpha, BoundReport, BoundSpec};
use ocrisk::train::{evaluate_on, train, TrainConfig};
use rand::Rng;

fn heavy_lock() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn pass(n: usize, slug: &str, detail: &str) {
    println!("ACCEPTANCE {n:02} {slug}: PASS ({detail})");
}

// ---------------------------------------------------------------------
// shared experiment protocol
// ---------------------------------------------------------------------

/// Training protocol used by the experiment criteria: two 32-unit hidden
/// layers, lr 0.05, 1000 epochs with a 20-epoch warm-up, momentum 0.9,
/// weight decay 1e-4.
fn protocol(estimator: Estimator, pi_p: f64, seed: u64) -> TrainConfig {
    let est = EstimatorConfig::new(estimator, pi_p);
    let mut cfg = TrainConfig::new(est, seed);
    cfg.hidden_dims = vec![32, 32];
    cfg.learning_rate = 0.05;
    cfg.epochs = 1000;
    cfg.warmup_epochs = 20;
    cfg.eval_every = 0;
    cfg
}

/// The prior-imbalance benchmark: clustered positives at prior 0.01 in a
/// five-blob background, drawn large enough to supply 3000 labeled
/// positives.
fn imbalanced_dataset() -> &'static LabeledDataset {
    static DS: OnceLock<LabeledDataset> = OnceLock::new();
    DS.get_or_init(|| {
        let spec = presets::clustered_task(2, 0.01, 400_000, 5, 1.0).unwrap();
        gen_synthetic(&spec, 7).unwrap()
    })
}

fn run_f1(ds: &LabeledDataset, cfg: &TrainConfig, n_p: usize, n_u: usize) -> f64 {
    let pu = make_pu_split(ds, n_p, n_u, cfg.seed).unwrap();
    let tm = train(ds, &pu, cfg).unwrap();
    let held = heldout_indices(ds, &pu);
    evaluate_on(&tm.params, ds, &held).unwrap().f1
}

// ---------------------------------------------------------------------
// 1. gradient fidelity through the full model/risk pipeline
// ---------------------------------------------------------------------

/// Sample a batch and a config for one gradient check; returns inputs for
/// the positive and unlabeled slots.
fn gradient_case(
    estimator: Estimator,
    trial: u64,
    force_negative_branch: bool,
) -> (ocrisk::model::ModelParams, Array2<f64>, Array2<f64>, EstimatorConfig) {
    let mut rng = sub_rng(5000 + trial, "acceptance-grad", u64::from(force_negative_branch));
    let mut params = init_mlp(&[3, 6, 4, 1], 9000 + trial).unwrap();
    // widen the random scorer so shifted input clusters land on distinct
    // score levels; combined with rejection below, this exercises both
    // branches of the absolute value
    for v in params.values_mut() {
        *v *= 5.0;
    }
    let (shift_p, shift_u) = if force_negative_branch {
        (2.0, -2.0)
    } else {
        (-0.5, 0.5)
    };
    let xs_p = Array2::from_shape_fn((5, 3), |_| shift_p + rng.random::<f64>() - 0.5);
    let xs_u = Array2::from_shape_fn((8, 3), |_| shift_u + rng.random::<f64>() - 0.5);
    let mut cfg = EstimatorConfig::new(estimator, 0.35);
    cfg.gamma = [0.0, 0.5, 2.0][(trial % 3) as usize];
    (params, xs_p, xs_u, cfg)
}

#[test]
fn acceptance_01_gradient_fidelity() {
    let _guard = heavy_lock();
    let start = Instant::now();
    let estimators = [
        Estimator::SupervisedPn,
        Estimator::BceUAsN,
        Estimator::UnbiasedPu,
        Estimator::AbsNegative,
        Estimator::OneClass,
    ];
    let h = 1e-5;
    let mut checked = 0usize;
    let mut negative_branch_cases = 0usize;
    for estimator in estimators {
        let mut accepted = 0u64;
        let mut trial = 0u64;
        while accepted < 20 {
            trial += 1;
            assert!(trial < 2000, "could not assemble 20 cases for {estimator:?}");
            let force_neg = accepted % 2 == 1;
            let (params, xs_p, xs_u, cfg) = gradient_case(estimator, trial, force_neg);
            let objective = |p: &ocrisk::model::ModelParams| -> f64 {
                let (sp, _) = p.forward_batch(xs_p.view()).unwrap();
                let (su, _) = p.forward_batch(xs_u.view()).unwrap();
                risk_total(sp.as_slice().unwrap(), su.as_slice().unwrap(), &cfg)
                    .unwrap()
                    .total
            };
            // keep clear of the absolute-value kink so central
            // differences see a smooth objective
            let (sp, _) = params.forward_batch(xs_p.view()).unwrap();
            let (su, _) = params.forward_batch(xs_u.view()).unwrap();
            let ru: f64 = su.iter().map(|&s| cfg.loss.eval(s, -1)).sum::<f64>() / su.len() as f64;
            let rp: f64 = sp.iter().map(|&s| cfg.loss.eval(s, -1)).sum::<f64>() / sp.len() as f64;
            let inner = ru - cfg.pi_p * rp;
            if inner.abs() < 1e-2 {
                continue;
            }
            let wants_negative = matches!(
                estimator,
                Estimator::AbsNegative | Estimator::OneClass | Estimator::UnbiasedPu
            ) && force_neg;
            if wants_negative != (inner < 0.0)
                && matches!(estimator, Estimator::AbsNegative | Estimator::OneClass)
            {
                continue;
            }
            if inner < 0.0 {
                negative_branch_cases += 1;
            }

            // analytic parameter gradients: risk score-derivatives chained
            // through reverse mode
            let grads = risk_with_grads(sp.as_slice().unwrap(), su.as_slice().unwrap(), &cfg)
                .unwrap();
            let gp = params
                .backward(xs_p.view(), ndarray::Array1::from_vec(grads.dscores_p).view())
                .unwrap();
            let gu = params
                .backward(xs_u.view(), ndarray::Array1::from_vec(grads.dscores_u).view())
                .unwrap();
            let analytic: Vec<f64> = gp
                .values()
                .zip(gu.values())
                .map(|(a, b)| a + b)
                .collect();

            for (k, &a) in analytic.iter().enumerate() {
                let plus = objective(&params.with_param_shifted(k, h).unwrap());
                let minus = objective(&params.with_param_shifted(k, -h).unwrap());
                let numeric = (plus - minus) / (2.0 * h);
                let tol = 1e-8f64.max(1e-5 * a.abs().max(numeric.abs()));
                assert!(
                    (a - numeric).abs() <= tol,
                    "{estimator:?} trial {trial} param {k}: analytic {a} vs numeric {numeric}"
                );
            }
            accepted += 1;
            checked += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(checked == 100);
    assert!(
        negative_branch_cases >= 20,
        "only {negative_branch_cases} negative-branch cases"
    );
    assert!(elapsed < 30.0, "gradient fidelity took {elapsed:.1}s");
    pass(
        1,
        "gradient-fidelity",
        &format!("100 configs, {negative_branch_cases} negative-branch, {elapsed:.1}s"),
    );
}

// ---------------------------------------------------------------------
// 2. published-table F1 arithmetic
// ---------------------------------------------------------------------

#[test]
fn acceptance_02_f1_reference_arithmetic() {
    // (precision, recall, reported F1), x100 scale, eight crop classes of
    // a published benchmark plus their reported mean
    const ROWS: [(f64, f64, f64); 8] = [
        (99.26, 99.41, 99.33),
        (99.26, 97.93, 98.59),
        (86.65, 94.91, 90.59),
        (98.83, 92.43, 95.52),
        (99.92, 96.92, 98.39),
        (91.44, 97.91, 94.56),
        (98.06, 90.84, 94.30),
        (90.68, 96.72, 93.58),
    ];
    const REPORTED_MEAN: f64 = 95.61;

    let round2 = |v: f64| (v * 100.0).round() / 100.0;
    let mut computed = Vec::new();
    for (p, r, reported) in ROWS {
        let value = 100.0 * f1(p / 100.0, r / 100.0);
        computed.push(value);
        assert!(
            (round2(value) - reported).abs() <= 0.02 + 1e-9,
            "f1({p}, {r}) = {value:.4}, reported {reported}"
        );
    }
    let mean = computed.iter().sum::<f64>() / computed.len() as f64;
    assert!(
        (mean - REPORTED_MEAN).abs() <= 0.02 + 1e-9,
        "mean {mean:.4} vs reported {REPORTED_MEAN}"
    );
    pass(
        2,
        "f1-reference-arithmetic",
        &format!("8 rows within 0.02, mean {mean:.4} vs {REPORTED_MEAN}"),
    );
}

// ---------------------------------------------------------------------
// 3. estimator identities, 1000 random instances each
// ---------------------------------------------------------------------

#[test]
fn acceptance_03_estimator_identities() {
    let mut rng = sub_rng(31, "acceptance-identities", 0);
    let mut negative_branch = 0usize;

    // (a) absolute-value negative risk dominates the signed one, equality
    // exactly on the non-negative branch
    for i in 0..1000 {
        let pi = rng.random::<f64>() * 0.9 + 0.05;
        let cfg = EstimatorConfig::new(Estimator::OneClass, pi);
        let shift = if i % 2 == 0 { 2.0 } else { -1.0 };
        let sp: Vec<f64> = (0..6).map(|_| shift + rng.random::<f64>() * 2.0).collect();
        let su: Vec<f64> = (0..9).map(|_| -shift + rng.random::<f64>() * 2.0).collect();
        let unb = negative_risk_unbiased(&su, &sp, &cfg).unwrap();
        let (oc, flag) = negative_risk_oc(&su, &sp, &cfg).unwrap();
        assert!(oc >= 0.0 && oc >= unb);
        if flag {
            negative_branch += 1;
            assert!(oc > unb);
        } else {
            assert!(oc == unb);
        }
    }
    assert!(negative_branch > 100, "only {negative_branch} negative-branch draws");

    // (b) constant losses collapse the mixture identity to the constant:
    // score 0 makes every loss exactly 1/2 for any prior and sizes
    for _ in 0..1000 {
        let pi = rng.random::<f64>() * 0.98 + 0.01;
        let n_p = 1 + rng.random_range(0..50);
        let n_u = 1 + rng.random_range(0..50);
        let cfg = EstimatorConfig::new(Estimator::UnbiasedPu, pi);
        let v = negative_risk_unbiased(&vec![0.0; n_u], &vec![0.0; n_p], &cfg).unwrap();
        assert!(v == 0.5, "pi {pi}: {v}");
    }

    // (c) gamma = 0 focal positive risk equals the plain positive risk
    for _ in 0..1000 {
        let mut cfg = EstimatorConfig::new(Estimator::OneClass, 0.3);
        cfg.gamma = 0.0;
        let sp: Vec<f64> = (0..7).map(|_| (rng.random::<f64>() - 0.5) * 12.0).collect();
        let focal = ocrisk::risk::positive_risk_focal(&sp, &cfg).unwrap();
        let plain = ocrisk::risk::positive_risk_plain(&sp, cfg.loss).unwrap();
        assert!((focal - plain).abs() <= 1e-12);
    }

    // (d) alpha_p = pi_p, gamma = 0, inner >= 0 makes the one-class total
    // coincide with the unbiased total
    let mut coincidence = 0usize;
    while coincidence < 1000 {
        let pi = rng.random::<f64>() * 0.6 + 0.05;
        let sp: Vec<f64> = (0..5).map(|_| (rng.random::<f64>() - 0.5) * 4.0).collect();
        let su: Vec<f64> = (0..8).map(|_| (rng.random::<f64>() - 0.5) * 4.0).collect();
        let mut oc_cfg = EstimatorConfig::new(Estimator::OneClass, pi);
        oc_cfg.alpha_p = pi;
        oc_cfg.gamma = 0.0;
        let pu_cfg = EstimatorConfig::new(Estimator::UnbiasedPu, pi);
        let b_pu = risk_total(&sp, &su, &pu_cfg).unwrap();
        if b_pu.inner_negative {
            continue;
        }
        let b_oc = risk_total(&sp, &su, &oc_cfg).unwrap();
        assert!((b_oc.total - b_pu.total).abs() <= 1e-12);
        coincidence += 1;
    }

    pass(
        3,
        "estimator-identities",
        &format!("4 identities x 1000 instances, {negative_branch} negative-branch draws"),
    );
}

// ---------------------------------------------------------------------
// 4 + 5. concentration bounds on the (n_p, n_u) grid
// ---------------------------------------------------------------------

fn bound_grid() -> &'static Vec<BoundReport> {
    static GRID: OnceLock<Vec<BoundReport>> = OnceLock::new();
    GRID.get_or_init(|| {
        let pi_p = 0.3;
        let mut spec = BoundSpec {
            model: presets::bound_check_scorer(),
            distribution: presets::bound_check_distribution(pi_p).unwrap(),
            pi_p,
            n_p: 50,
            n_u: 50,
            trials: 20_000,
            alpha_margin: 1.0,
            sigma: 0.05,
            loss: LossKind::Sigmoid,
            seed: 0,
        };
        spec.alpha_margin = suggest_alpha(&spec).unwrap();
        grid_reports(&spec, &[50, 200, 800], &[50, 200, 800]).unwrap()
    })
}

#[test]
fn acceptance_04_branch_probability_bound() {
    let _guard = heavy_lock();
    let start = Instant::now();
    let reports = bound_grid();
    assert_eq!(reports.len(), 9);
    for r in reports {
        assert!(
            r.branch_probability_pass(),
            "cell ({}, {}): empirical {} vs bound {} + slack {}",
            r.n_p,
            r.n_u,
            r.empirical_p_s_minus,
            r.delta_f,
            r.branch_probability_slack()
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "grid took {elapsed:.1}s");
    let max_emp = reports
        .iter()
        .map(|r| r.empirical_p_s_minus)
        .fold(0.0f64, f64::max);
    pass(
        4,
        "branch-probability-bound",
        &format!("9 cells, 20000 trials each, max empirical {max_emp:.5}, {elapsed:.1}s"),
    );
}

#[test]
fn acceptance_05_bias_and_deviation_bounds() {
    let _guard = heavy_lock();
    let reports = bound_grid();
    for r in reports {
        assert!(
            r.bias_pass(),
            "cell ({}, {}): bias {} outside [-{}, {} + {}]",
            r.n_p,
            r.n_u,
            r.empirical_bias,
            3.0 * r.bias_mc_std,
            r.bias_bound,
            3.0 * r.bias_mc_std
        );
        assert!(
            r.deviation_pass(),
            "cell ({}, {}): quantile {} vs bound {}",
            r.n_p,
            r.n_u,
            r.deviation_quantile,
            r.deviation_bound
        );
    }
    let median_at = |n: usize| {
        reports
            .iter()
            .find(|r| r.n_p == n && r.n_u == n)
            .unwrap()
            .median_abs_deviation
    };
    let ratio_a = median_at(200) / median_at(50);
    let ratio_b = median_at(800) / median_at(200);
    assert!(ratio_a <= 0.65, "ratio (50->200) {ratio_a:.4}");
    assert!(ratio_b <= 0.65, "ratio (200->800) {ratio_b:.4}");
    pass(
        5,
        "bias-and-deviation-bounds",
        &format!("9 cells, median-deviation ratios {ratio_a:.3} / {ratio_b:.3}"),
    );
}

// ---------------------------------------------------------------------
// 6. prior-imbalance contrast
// ---------------------------------------------------------------------

#[test]
fn acceptance_06_imbalance_contrast() {
    let _guard = heavy_lock();
    let start = Instant::now();
    let ds = imbalanced_dataset();

    // oracle first: a fully supervised run must certify that the task is
    // learnable at all
    let mut oracle_cfg = protocol(Estimator::SupervisedPn, ds.pi_p_true, 1);
    oracle_cfg.estimator.loss = LossKind::Logistic;
    let oracle_f1 = run_f1(ds, &oracle_cfg, 100, 4000);
    assert!(oracle_f1 >= 0.95, "oracle F1 {oracle_f1:.4}");

    // unbiased estimator collapses even with 30x the labeled positives
    let unbiased: Vec<f64> = [100usize, 3000]
        .par_iter()
        .map(|&n_p| run_f1(ds, &protocol(Estimator::UnbiasedPu, ds.pi_p_true, 1), n_p, 4000))
        .collect();
    for (n_p, f1) in [100, 3000].iter().zip(&unbiased) {
        assert!(*f1 <= 0.05, "unbiased n_p={n_p} F1 {f1:.4}");
    }

    // the rebalanced absolute-value estimator succeeds with 100 positives
    let one_class: Vec<f64> = (1u64..=5)
        .into_par_iter()
        .map(|seed| run_f1(ds, &protocol(Estimator::OneClass, ds.pi_p_true, seed), 100, 4000))
        .collect();
    let good = one_class.iter().filter(|&&v| v >= 0.90).count();
    assert!(good >= 4, "one_class F1 per seed: {one_class:?}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "contrast took {elapsed:.1}s");
    pass(
        6,
        "imbalance-contrast",
        &format!(
            "oracle {oracle_f1:.3}, unbiased {:.3}/{:.3}, one_class {good}/5 >= 0.90, {elapsed:.0}s",
            unbiased[0], unbiased[1]
        ),
    );
}

// ---------------------------------------------------------------------
// 7. risk-curve shape
// ---------------------------------------------------------------------

#[test]
fn acceptance_07_risk_curve_shape() {
    let _guard = heavy_lock();
    let ds = imbalanced_dataset();
    let pu = make_pu_split(ds, 100, 4000, 1).unwrap();

    let unbiased = train(ds, &pu, &protocol(Estimator::UnbiasedPu, ds.pi_p_true, 1)).unwrap();
    let positive: Vec<f64> = unbiased.log.records.iter().map(|r| r.positive_term).collect();
    // warm-up ends at epoch 20 (the first bounded-loss epoch)
    assert!(
        positive[50] > positive[20],
        "positive term did not rise: {} vs {}",
        positive[50],
        positive[20]
    );

    let one_class = train(ds, &pu, &protocol(Estimator::OneClass, ds.pi_p_true, 1)).unwrap();
    assert!(
        one_class.log.records.iter().all(|r| r.negative_term >= 0.0),
        "negative term went negative"
    );
    let pos: Vec<f64> = one_class.log.records.iter().map(|r| r.positive_term).collect();
    let window = 10;
    let smoothed: Vec<f64> = (window - 1..pos.len())
        .map(|i| pos[i + 1 - window..=i].iter().sum::<f64>() / window as f64)
        .collect();
    let tail = &smoothed[smoothed.len() - 100..];
    let violations = tail
        .windows(2)
        .filter(|w| w[1] - w[0] > 1e-4)
        .count();
    assert_eq!(violations, 0, "smoothed positive term rose in the final 100 epochs");

    pass(
        7,
        "risk-curve-shape",
        &format!(
            "unbiased pos {:.4}->{:.4}, one_class tail monotone, neg term >= 0",
            positive[20], positive[50]
        ),
    );
}

// ---------------------------------------------------------------------
// 8. class-prior sweep
// ---------------------------------------------------------------------

#[test]
fn acceptance_08_prior_sweep() {
    let _guard = heavy_lock();
    let spec = presets::clustered_task(2, 0.15, 20_000, 5, 1.0).unwrap();
    let ds = gen_synthetic(&spec, 3).unwrap();
    let priors = [0.05, 0.10, 0.15, 0.20, 0.25];
    let seeds = [1u64, 2, 3];

    let cells: Vec<(usize, u64)> = priors
        .iter()
        .enumerate()
        .flat_map(|(i, _)| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let runs: Vec<(usize, f64, f64, f64)> = cells
        .par_iter()
        .map(|&(i, seed)| {
            let mut cfg = protocol(Estimator::OneClass, priors[i], seed);
            cfg.estimator.pi_p = priors[i];
            let pu = make_pu_split(&ds, 100, 4000, seed).unwrap();
            let tm = train(&ds, &pu, &cfg).unwrap();
            let held = heldout_indices(&ds, &pu);
            let report = evaluate_on(&tm.params, &ds, &held).unwrap();
            (i, report.precision, report.recall, report.f1)
        })
        .collect();

    let mean_of = |i: usize, pick: fn(&(usize, f64, f64, f64)) -> f64| {
        let vals: Vec<f64> = runs.iter().filter(|r| r.0 == i).map(pick).collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let precision: Vec<f64> = (0..priors.len()).map(|i| mean_of(i, |r| r.1)).collect();
    let recall: Vec<f64> = (0..priors.len()).map(|i| mean_of(i, |r| r.2)).collect();
    let f1s: Vec<f64> = (0..priors.len()).map(|i| mean_of(i, |r| r.3)).collect();

    // one violation of at most 0.02 is allowed in each sequence
    let count_violations = |seq: &[f64], increasing_allowed: bool| {
        let mut worst: f64 = 0.0;
        let mut count = 0usize;
        for w in seq.windows(2) {
            let delta = if increasing_allowed { w[0] - w[1] } else { w[1] - w[0] };
            if delta > 1e-12 {
                count += 1;
                worst = worst.max(delta);
            }
        }
        (count, worst)
    };
    let (p_viol, p_worst) = count_violations(&precision, false);
    assert!(
        p_viol == 0 || (p_viol == 1 && p_worst <= 0.02),
        "precision not non-increasing: {precision:?}"
    );
    let (r_viol, r_worst) = count_violations(&recall, true);
    assert!(
        r_viol == 0 || (r_viol == 1 && r_worst <= 0.02),
        "recall not non-decreasing: {recall:?}"
    );
    assert!(f1s[1] >= 0.85, "F1 at prior-0.05 error: {:.4}", f1s[1]);
    assert!(f1s[3] >= 0.85, "F1 at prior+0.05 error: {:.4}", f1s[3]);

    pass(
        8,
        "prior-sweep",
        &format!(
            "precision {:?} recall {:?} F1(+-0.05) {:.3}/{:.3}",
            precision
                .iter()
                .map(|v| (v * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>(),
            recall
                .iter()
                .map(|v| (v * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>(),
            f1s[1],
            f1s[3]
        ),
    );
}

// ---------------------------------------------------------------------
// 9. determinism of the emitted artifacts
// ---------------------------------------------------------------------

#[test]
fn acceptance_09_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("ds.csv");
    ocrisk_cli::run_from([
        "ocrisk",
        "gen",
        "--pi-p",
        "0.3",
        "--n",
        "2000",
        "--seed",
        "5",
        "-o",
        data.to_str().unwrap(),
        "--no-timestamp",
    ])
    .unwrap();

    let train_args = |out: &std::path::Path| {
        vec![
            "ocrisk".to_string(),
            "train".to_string(),
            "--data".to_string(),
            data.to_str().unwrap().to_string(),
            "--estimator".to_string(),
            "one_class".to_string(),
            "--n-p".to_string(),
            "50".to_string(),
            "--n-u".to_string(),
            "400".to_string(),
            "--hidden".to_string(),
            "8".to_string(),
            "--epochs".to_string(),
            "120".to_string(),
            "--repeat".to_string(),
            "2".to_string(),
            "--seed".to_string(),
            "9".to_string(),
            "--out-dir".to_string(),
            out.to_str().unwrap().to_string(),
            "--no-timestamp".to_string(),
        ]
    };
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    ocrisk_cli::run_from(train_args(&out_a)).unwrap();
    ocrisk_cli::run_from(train_args(&out_b)).unwrap();

    for file in [
        "metrics.csv",
        "trainlog_seed9.csv",
        "trainlog_seed10.csv",
        "checkpoint_seed9.txt",
        "checkpoint_seed10.txt",
    ] {
        let a = std::fs::read(out_a.join(file)).unwrap();
        let b = std::fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
        assert!(!a.is_empty());
    }
    pass(9, "determinism", "two identical runs, byte-identical artifacts");
}
