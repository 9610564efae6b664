//! Full-batch gradient training of the scorer under a chosen risk
//! estimator: warm-up with the unbounded logistic loss, then the bounded
//! sigmoid loss, driven by SGD with momentum and weight decay. Every
//! epoch logs the risk decomposition, so the characteristic risk curves
//! of the estimators are observable.

use std::io::Write;

use ndarray::{Array1, Array2, ArrayView1};

use crate::data::{heldout_indices, LabeledDataset, PUSample};
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::model::{init_mlp, Gradients, ModelParams};
use crate::risk::{
    calib_c, pbl_adjust, pul_adjust, risk_with_grads, Estimator, EstimatorConfig, LossKind,
};

/// How the warm-up epochs evaluate the objective: the configured
/// estimator with the logistic loss substituted, or plain cross-entropy
/// on P-vs-U regardless of the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarmupStyle {
    EstimatorLogistic,
    PlainBce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub warmup_epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub estimator: EstimatorConfig,
    pub seed: u64,
    /// Evaluate held-out metrics every this many epochs (0 = never).
    pub eval_every: usize,
    pub hidden_dims: Vec<usize>,
    pub warmup_style: WarmupStyle,
}

impl TrainConfig {
    /// Defaults: 1000 epochs, 20 warm-up epochs, lr 0.01, momentum 0.9,
    /// weight decay 1e-4, eval every 50 epochs, hidden layers [64, 64].
    pub fn new(estimator: EstimatorConfig, seed: u64) -> Self {
        Self {
            epochs: 1000,
            warmup_epochs: 20,
            learning_rate: 0.01,
            momentum: 0.9,
            weight_decay: 1e-4,
            estimator,
            seed,
            eval_every: 50,
            hidden_dims: vec![64, 64],
            warmup_style: WarmupStyle::EstimatorLogistic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.warmup_epochs > self.epochs {
            return Err(Error::invalid(
                "TrainConfig",
                format!(
                    "warmup_epochs {} exceeds epochs {}",
                    self.warmup_epochs, self.epochs
                ),
            ));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::invalid(
                "TrainConfig",
                format!("learning_rate {} must be > 0", self.learning_rate),
            ));
        }
        if !(self.momentum >= 0.0 && self.momentum < 1.0) {
            return Err(Error::invalid(
                "TrainConfig",
                format!("momentum {} outside [0, 1)", self.momentum),
            ));
        }
        if !(self.weight_decay >= 0.0) || !self.weight_decay.is_finite() {
            return Err(Error::invalid(
                "TrainConfig",
                format!("weight_decay {} must be >= 0", self.weight_decay),
            ));
        }
        self.estimator.validate()
    }
}

/// One epoch of the risk trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// 0-based epoch index.
    pub epoch: usize,
    pub loss_kind: LossKind,
    pub positive_term: f64,
    pub negative_term: f64,
    pub total: f64,
    pub inner_negative: bool,
    pub eval: Option<MetricsReport>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub records: Vec<EpochRecord>,
}

impl TrainLog {
    /// CSV schema: `epoch,loss_kind,pos_term,neg_term,total,inner_neg,
    /// precision,recall,f1`; metric cells are x100 with two decimals and
    /// stay empty between evaluations.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "epoch,loss_kind,pos_term,neg_term,total,inner_neg,precision,recall,f1"
        )?;
        for r in &self.records {
            let (p, rc, f) = match &r.eval {
                Some(m) => (
                    format!("{:.2}", m.precision * 100.0),
                    format!("{:.2}", m.recall * 100.0),
                    format!("{:.2}", m.f1 * 100.0),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.epoch,
                r.loss_kind.name(),
                r.positive_term,
                r.negative_term,
                r.total,
                u8::from(r.inner_negative),
                p,
                rc,
                f
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub params: ModelParams,
    pub log: TrainLog,
    pub config: TrainConfig,
}

fn gather_rows(ds: &LabeledDataset, idx: &[usize]) -> Array2<f64> {
    let mut m = Array2::zeros((idx.len(), ds.dim()));
    for (r, &i) in idx.iter().enumerate() {
        m.row_mut(r).assign(&ds.features.row(i));
    }
    m
}

fn effective_estimator(cfg: &TrainConfig, epoch: usize) -> EstimatorConfig {
    let base = cfg.estimator.clone();
    if epoch < cfg.warmup_epochs {
        match cfg.warmup_style {
            WarmupStyle::EstimatorLogistic => base.with_loss(LossKind::Logistic),
            WarmupStyle::PlainBce => EstimatorConfig {
                estimator: Estimator::BceUAsN,
                ..base
            },
        }
    } else {
        base
    }
}

/// Train the scorer on one PU sample.
///
/// Per epoch: one full-batch step over all positive and unlabeled rows
/// (true negatives in place of unlabeled rows for `SupervisedPn`), with
/// the update `v <- momentum v - lr (grad + wd p); p <- p + v`. Epochs
/// before `warmup_epochs` evaluate the estimator with the logistic loss.
/// Any non-finite risk or gradient aborts the run with the offending
/// epoch. Deterministic given the config.
pub fn train(ds: &LabeledDataset, pu: &PUSample, cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    pu.validate_against(ds)?;

    let u_idx: Vec<usize> = if cfg.estimator.estimator == Estimator::SupervisedPn {
        let negs: Vec<usize> = pu
            .unlabeled_idx
            .iter()
            .copied()
            .filter(|&i| ds.y_true[i] == -1)
            .collect();
        if negs.is_empty() {
            return Err(Error::invalid(
                "train",
                "supervised_pn needs true negatives in the unlabeled pool",
            ));
        }
        negs
    } else {
        pu.unlabeled_idx.clone()
    };

    let n_p = pu.positive_idx.len();
    let mut batch = Array2::zeros((n_p + u_idx.len(), ds.dim()));
    batch
        .slice_mut(ndarray::s![..n_p, ..])
        .assign(&gather_rows(ds, &pu.positive_idx));
    batch
        .slice_mut(ndarray::s![n_p.., ..])
        .assign(&gather_rows(ds, &u_idx));

    let heldout = heldout_indices(ds, pu);
    let heldout_x = gather_rows(ds, &heldout);
    let heldout_y: Vec<i8> = heldout.iter().map(|&i| ds.y_true[i]).collect();

    let mut dims = vec![ds.dim()];
    dims.extend(&cfg.hidden_dims);
    dims.push(1);
    let mut params = init_mlp(&dims, cfg.seed)?;
    let mut velocity = Gradients::zeros_like(&params);
    let mut log = TrainLog::default();

    for epoch in 0..cfg.epochs {
        let est = effective_estimator(cfg, epoch);
        let (scores, trace) = params.forward_batch(batch.view())?;
        let flat = scores.as_slice().expect("contiguous scores");
        let grads = risk_with_grads(&flat[..n_p], &flat[n_p..], &est)?;
        let b = grads.breakdown;
        for (value, term) in [
            (b.positive_term, "positive term"),
            (b.negative_term, "negative term"),
            (b.total, "total risk"),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { epoch, term });
            }
        }

        let mut upstream = Array1::zeros(n_p + grads.dscores_u.len());
        upstream
            .slice_mut(ndarray::s![..n_p])
            .assign(&Array1::from_vec(grads.dscores_p));
        upstream
            .slice_mut(ndarray::s![n_p..])
            .assign(&Array1::from_vec(grads.dscores_u));
        let param_grads = params.backward_from_trace(&trace, upstream.view())?;
        if !param_grads.is_finite() {
            return Err(Error::NonFinite {
                epoch,
                term: "gradient",
            });
        }

        let (lr, mom, wd) = (cfg.learning_rate, cfg.momentum, cfg.weight_decay);
        for ((p, v), g) in params
            .values_mut()
            .zip(velocity.values_mut())
            .zip(param_grads.values())
        {
            *v = mom * *v - lr * (g + wd * *p);
            *p += *v;
        }

        let eval = if cfg.eval_every > 0
            && !heldout_y.is_empty()
            && ((epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs)
        {
            let (scores, _) = params.forward_batch(heldout_x.view())?;
            MetricsReport::from_scores(scores.as_slice().expect("contiguous"), &heldout_y).ok()
        } else {
            None
        };

        let loss_kind = if est.estimator == Estimator::BceUAsN {
            LossKind::Logistic
        } else {
            est.loss
        };
        log.records.push(EpochRecord {
            epoch,
            loss_kind,
            positive_term: b.positive_term,
            negative_term: b.negative_term,
            total: b.total,
            inner_negative: b.inner_negative,
            eval,
        });
    }

    Ok(TrainedModel {
        params,
        log,
        config: cfg.clone(),
    })
}

/// Hard decision: +1 iff the raw score is strictly positive.
pub fn decide(params: &ModelParams, x: ArrayView1<'_, f64>) -> Result<i8> {
    Ok(if params.forward(x)? > 0.0 { 1 } else { -1 })
}

/// Scores for the given dataset rows.
pub fn scores_on(params: &ModelParams, ds: &LabeledDataset, idx: &[usize]) -> Result<Vec<f64>> {
    let x = gather_rows(ds, idx);
    let (scores, _) = params.forward_batch(x.view())?;
    Ok(scores.to_vec())
}

/// Evaluate decisions and scores on the given dataset rows.
pub fn evaluate_on(
    params: &ModelParams,
    ds: &LabeledDataset,
    idx: &[usize],
) -> Result<MetricsReport> {
    let truth: Vec<i8> = idx.iter().map(|&i| ds.y_true[i]).collect();
    MetricsReport::from_scores(&scores_on(params, ds, idx)?, &truth)
}

/// Post-threshold calibration transform applied on top of a P-vs-U
/// cross-entropy scorer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibMethod {
    Pul,
    Pbl,
}

impl CalibMethod {
    pub fn name(self) -> &'static str {
        match self {
            CalibMethod::Pul => "pul",
            CalibMethod::Pbl => "pbl",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "pul" => Ok(CalibMethod::Pul),
            "pbl" => Ok(CalibMethod::Pbl),
            other => Err(Error::invalid("calibration", format!("unknown `{other}`"))),
        }
    }
}

/// A trained P-vs-U scorer whose probability output is rescaled by the
/// label frequency `c`; decisions threshold the adjusted output at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedModel {
    pub model: TrainedModel,
    pub method: CalibMethod,
    pub c: f64,
}

impl CalibratedModel {
    pub fn adjusted_score(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        let g = self
            .model
            .params
            .predict_prob(x, self.model.config.estimator.clamp_hi)?;
        match self.method {
            CalibMethod::Pul => pul_adjust(g, self.c),
            CalibMethod::Pbl => pbl_adjust(g, self.c),
        }
    }

    /// +1 iff the adjusted output exceeds 1.
    pub fn decide(&self, x: ArrayView1<'_, f64>) -> Result<i8> {
        Ok(if self.adjusted_score(x)? > 1.0 { 1 } else { -1 })
    }
}

/// Train the P-vs-U cross-entropy scorer and wrap it with the chosen
/// calibration. Requires the `BceUAsN` estimator.
pub fn train_calibrated(
    ds: &LabeledDataset,
    pu: &PUSample,
    cfg: &TrainConfig,
    method: CalibMethod,
) -> Result<CalibratedModel> {
    if cfg.estimator.estimator != Estimator::BceUAsN {
        return Err(Error::invalid(
            "train_calibrated",
            format!(
                "calibration requires the bce_u_as_n estimator, got {}",
                cfg.estimator.estimator.name()
            ),
        ));
    }
    let model = train(ds, pu, cfg)?;
    let c = calib_c(pu.n_p(), pu.n_u(), cfg.estimator.pi_p)?;
    Ok(CalibratedModel { model, method, c })
}
