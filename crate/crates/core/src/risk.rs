//! Loss functions, risk estimators, and their exact score derivatives.
//!
//! Everything here is a pure function of raw scores. The estimators share
//! one structure: a positive term (optionally focal-modulated), and a
//! negative term recovered from unlabeled data through the mixture
//! identity `P(x) = pi_p P_p(x) + (1 - pi_p) P_n(x)`. The one-class
//! variant takes the absolute value of the recovered negative term, which
//! keeps it non-negative and drives gradient ascent whenever the inner
//! estimate dips below zero.

use crate::error::{Error, Result};

/// Numerically stable logistic sigmoid.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Bounded sigmoid loss `1 / (1 + exp(y * score))`, in (0, 1).
pub fn loss_sigmoid(score: f64, y: i8) -> f64 {
    assert!(y == 1 || y == -1, "label must be +1 or -1");
    sigmoid(-(y as f64) * score)
}

/// Derivative of [`loss_sigmoid`] with respect to the score.
pub fn loss_sigmoid_dscore(score: f64, y: i8) -> f64 {
    let l = loss_sigmoid(score, y);
    -(y as f64) * l * (1.0 - l)
}

/// Unbounded logistic (cross-entropy) loss `ln(1 + exp(-y * score))`.
pub fn loss_logistic(score: f64, y: i8) -> f64 {
    assert!(y == 1 || y == -1, "label must be +1 or -1");
    softplus(-(y as f64) * score)
}

/// Derivative of [`loss_logistic`] with respect to the score.
pub fn loss_logistic_dscore(score: f64, y: i8) -> f64 {
    let yf = y as f64;
    -yf * sigmoid(-yf * score)
}

/// Loss selector. The sigmoid loss is bounded by 1, which the
/// concentration bounds require; the logistic loss is unbounded and is
/// used to warm networks up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Sigmoid,
    Logistic,
}

impl LossKind {
    pub fn eval(self, score: f64, y: i8) -> f64 {
        match self {
            LossKind::Sigmoid => loss_sigmoid(score, y),
            LossKind::Logistic => loss_logistic(score, y),
        }
    }

    pub fn dscore(self, score: f64, y: i8) -> f64 {
        match self {
            LossKind::Sigmoid => loss_sigmoid_dscore(score, y),
            LossKind::Logistic => loss_logistic_dscore(score, y),
        }
    }

    /// Upper bound `C_l` on the loss, when one exists.
    pub fn bound(self) -> Option<f64> {
        match self {
            LossKind::Sigmoid => Some(1.0),
            LossKind::Logistic => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Sigmoid => "sigmoid",
            LossKind::Logistic => "logistic",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "sigmoid" => Ok(LossKind::Sigmoid),
            "logistic" => Ok(LossKind::Logistic),
            other => Err(Error::invalid("loss", format!("unknown `{other}`"))),
        }
    }
}

/// The estimator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Fully supervised decomposition; the `scores_u` slot must carry
    /// true-negative scores.
    SupervisedPn,
    /// Unlabeled data treated as negative, per-sample mean logistic loss.
    BceUAsN,
    /// Mixture-identity negative term, raw signed value.
    UnbiasedPu,
    /// Mixture-identity negative term under absolute value, prior weights.
    AbsNegative,
    /// Absolute negative term plus rebalanced, focal-modulated positive
    /// term.
    OneClass,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::SupervisedPn => "supervised_pn",
            Estimator::BceUAsN => "bce_u_as_n",
            Estimator::UnbiasedPu => "unbiased_pu",
            Estimator::AbsNegative => "abs_negative",
            Estimator::OneClass => "one_class",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "supervised_pn" => Ok(Estimator::SupervisedPn),
            "bce_u_as_n" => Ok(Estimator::BceUAsN),
            "unbiased_pu" => Ok(Estimator::UnbiasedPu),
            "abs_negative" => Ok(Estimator::AbsNegative),
            "one_class" => Ok(Estimator::OneClass),
            other => Err(Error::invalid("estimator", format!("unknown `{other}`"))),
        }
    }
}

/// Which estimator to evaluate and with what knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub estimator: Estimator,
    /// Class prior fed to the estimator (may deliberately differ from the
    /// data's true prior).
    pub pi_p: f64,
    /// Positive-risk weight of the one-class estimator, in [0, 1].
    pub alpha_p: f64,
    /// Focusing exponent of the positive modulator, >= 0.
    pub gamma: f64,
    pub loss: LossKind,
    /// Probability cap used by the focal modulator.
    pub clamp_hi: f64,
}

impl EstimatorConfig {
    /// Defaults: `alpha_p = 0.3`, `gamma = 0.1`, sigmoid loss, cap 0.999.
    pub fn new(estimator: Estimator, pi_p: f64) -> Self {
        Self {
            estimator,
            pi_p,
            alpha_p: 0.3,
            gamma: 0.1,
            loss: LossKind::Sigmoid,
            clamp_hi: 0.999,
        }
    }

    pub fn with_loss(mut self, loss: LossKind) -> Self {
        self.loss = loss;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pi_p > 0.0 && self.pi_p < 1.0) {
            return Err(Error::invalid(
                "EstimatorConfig",
                format!("pi_p {} outside (0, 1)", self.pi_p),
            ));
        }
        if !(self.alpha_p >= 0.0 && self.alpha_p <= 1.0) {
            return Err(Error::invalid(
                "EstimatorConfig",
                format!("alpha_p {} outside [0, 1]", self.alpha_p),
            ));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::invalid(
                "EstimatorConfig",
                format!("gamma {} must be finite and >= 0", self.gamma),
            ));
        }
        if !(self.clamp_hi > 0.5 && self.clamp_hi < 1.0) {
            return Err(Error::invalid(
                "EstimatorConfig",
                format!("clamp_hi {} outside (0.5, 1)", self.clamp_hi),
            ));
        }
        Ok(())
    }
}

/// Per-evaluation decomposition of a risk estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskBreakdown {
    /// Unweighted positive-risk estimate.
    pub positive_term: f64,
    /// Unweighted negative-risk estimate (signed for `UnbiasedPu`).
    pub negative_term: f64,
    /// Estimator-weighted combination of the two terms.
    pub total: f64,
    /// True when the pre-absolute-value negative estimate was < 0.
    pub inner_negative: bool,
}

/// A breakdown plus exact derivatives of `total` with respect to every
/// score.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskGrads {
    pub breakdown: RiskBreakdown,
    pub dscores_p: Vec<f64>,
    pub dscores_u: Vec<f64>,
}

/// Plain mean positive risk `(1/n) sum l(s_i, +1)`.
pub fn positive_risk_plain(scores_p: &[f64], loss: LossKind) -> Result<f64> {
    if scores_p.is_empty() {
        return Err(Error::invalid("scores_p", "empty positive score list"));
    }
    let sum: f64 = scores_p.iter().map(|&s| loss.eval(s, 1)).sum();
    Ok(sum / scores_p.len() as f64)
}

/// Value and score-derivative of one focal positive term
/// `(1 - p)^gamma * l(s, +1)` with `p = min(sigmoid(s), clamp_hi)`.
///
/// The modulator uses the capped probability, and its derivative treats
/// the capped region as constant. `gamma = 0` reduces bit-exactly to the
/// plain loss.
fn focal_parts(s: f64, cfg: &EstimatorConfig) -> (f64, f64) {
    let loss = cfg.loss.eval(s, 1);
    let dloss = cfg.loss.dscore(s, 1);
    if cfg.gamma == 0.0 {
        return (loss, dloss);
    }
    let sig = sigmoid(s);
    let (p, dp) = if sig >= cfg.clamp_hi {
        (cfg.clamp_hi, 0.0)
    } else {
        (sig, sig * (1.0 - sig))
    };
    let one_minus = 1.0 - p;
    let modulator = one_minus.powf(cfg.gamma);
    let dmodulator = -cfg.gamma * one_minus.powf(cfg.gamma - 1.0) * dp;
    (modulator * loss, dmodulator * loss + modulator * dloss)
}

/// Focal-modulated positive risk
/// `(1/n_p) sum (1 - p_i)^gamma l(s_i, +1)`.
pub fn positive_risk_focal(scores_p: &[f64], cfg: &EstimatorConfig) -> Result<f64> {
    cfg.validate()?;
    if scores_p.is_empty() {
        return Err(Error::invalid("scores_p", "empty positive score list"));
    }
    let sum: f64 = scores_p.iter().map(|&s| focal_parts(s, cfg).0).sum();
    Ok(sum / scores_p.len() as f64)
}

fn inner_estimate(scores_u: &[f64], scores_p: &[f64], cfg: &EstimatorConfig) -> Result<f64> {
    if scores_u.is_empty() {
        return Err(Error::invalid("scores_u", "empty unlabeled score list"));
    }
    if scores_p.is_empty() {
        return Err(Error::invalid("scores_p", "empty positive score list"));
    }
    let ru: f64 =
        scores_u.iter().map(|&s| cfg.loss.eval(s, -1)).sum::<f64>() / scores_u.len() as f64;
    let rp: f64 =
        scores_p.iter().map(|&s| cfg.loss.eval(s, -1)).sum::<f64>() / scores_p.len() as f64;
    Ok(ru - cfg.pi_p * rp)
}

/// Mixture-identity negative risk `(R_u - pi_p R_p) / (1 - pi_p)`; may be
/// negative.
pub fn negative_risk_unbiased(
    scores_u: &[f64],
    scores_p: &[f64],
    cfg: &EstimatorConfig,
) -> Result<f64> {
    cfg.validate()?;
    Ok(inner_estimate(scores_u, scores_p, cfg)? / (1.0 - cfg.pi_p))
}

/// Absolute-value negative risk `|R_u - pi_p R_p| / (1 - pi_p)`, plus a
/// flag reporting whether the inner estimate was negative.
pub fn negative_risk_oc(
    scores_u: &[f64],
    scores_p: &[f64],
    cfg: &EstimatorConfig,
) -> Result<(f64, bool)> {
    cfg.validate()?;
    let inner = inner_estimate(scores_u, scores_p, cfg)?;
    Ok((inner.abs() / (1.0 - cfg.pi_p), inner < 0.0))
}

/// Evaluate the configured estimator on positive and unlabeled scores.
///
/// For `SupervisedPn` the `scores_u` slot must carry true-negative scores.
pub fn risk_total(
    scores_p: &[f64],
    scores_u: &[f64],
    cfg: &EstimatorConfig,
) -> Result<RiskBreakdown> {
    risk_with_grads(scores_p, scores_u, cfg).map(|g| g.breakdown)
}

/// As [`risk_total`], with exact derivatives of the total with respect to
/// every score. The absolute value contributes a sign flip on the
/// negative branch (taken as +1 exactly at zero), and the focal modulator
/// contributes its product rule with `dp/dscore = 0` in the capped
/// region.
pub fn risk_with_grads(
    scores_p: &[f64],
    scores_u: &[f64],
    cfg: &EstimatorConfig,
) -> Result<RiskGrads> {
    cfg.validate()?;
    if scores_p.is_empty() {
        return Err(Error::invalid("scores_p", "empty positive score list"));
    }
    if scores_u.is_empty() {
        return Err(Error::invalid(
            "scores_u",
            "empty unlabeled/negative score list",
        ));
    }
    let n_p = scores_p.len() as f64;
    let n_u = scores_u.len() as f64;
    let pi = cfg.pi_p;
    let loss = cfg.loss;

    let (breakdown, dscores_p, dscores_u) = match cfg.estimator {
        Estimator::SupervisedPn => {
            let pos = positive_risk_plain(scores_p, loss)?;
            let neg: f64 =
                scores_u.iter().map(|&s| loss.eval(s, -1)).sum::<f64>() / n_u;
            let total = pi * pos + (1.0 - pi) * neg;
            let gp = scores_p
                .iter()
                .map(|&s| pi * loss.dscore(s, 1) / n_p)
                .collect();
            let gu = scores_u
                .iter()
                .map(|&s| (1.0 - pi) * loss.dscore(s, -1) / n_u)
                .collect();
            (
                RiskBreakdown {
                    positive_term: pos,
                    negative_term: neg,
                    total,
                    inner_negative: false,
                },
                gp,
                gu,
            )
        }
        Estimator::BceUAsN => {
            // Per-sample mean logistic loss with P labeled +1 and U
            // labeled -1, regardless of the configured loss kind.
            let n = n_p + n_u;
            let pos: f64 = scores_p.iter().map(|&s| loss_logistic(s, 1)).sum::<f64>() / n_p;
            let neg: f64 = scores_u.iter().map(|&s| loss_logistic(s, -1)).sum::<f64>() / n_u;
            let total = (n_p * pos + n_u * neg) / n;
            let gp = scores_p
                .iter()
                .map(|&s| loss_logistic_dscore(s, 1) / n)
                .collect();
            let gu = scores_u
                .iter()
                .map(|&s| loss_logistic_dscore(s, -1) / n)
                .collect();
            (
                RiskBreakdown {
                    positive_term: pos,
                    negative_term: neg,
                    total,
                    inner_negative: false,
                },
                gp,
                gu,
            )
        }
        Estimator::UnbiasedPu | Estimator::AbsNegative | Estimator::OneClass => {
            let inner = inner_estimate(scores_u, scores_p, cfg)?;
            let inner_negative = inner < 0.0;
            let sign = if inner >= 0.0 { 1.0 } else { -1.0 };
            match cfg.estimator {
                Estimator::UnbiasedPu => {
                    let pos = positive_risk_plain(scores_p, loss)?;
                    let neg = inner / (1.0 - pi);
                    let total = pi * pos + (1.0 - pi) * neg;
                    let gp = scores_p
                        .iter()
                        .map(|&s| pi * (loss.dscore(s, 1) - loss.dscore(s, -1)) / n_p)
                        .collect();
                    let gu = scores_u.iter().map(|&s| loss.dscore(s, -1) / n_u).collect();
                    (
                        RiskBreakdown {
                            positive_term: pos,
                            negative_term: neg,
                            total,
                            inner_negative,
                        },
                        gp,
                        gu,
                    )
                }
                Estimator::AbsNegative => {
                    let pos = positive_risk_plain(scores_p, loss)?;
                    let neg = inner.abs() / (1.0 - pi);
                    let total = pi * pos + (1.0 - pi) * neg;
                    let gp = scores_p
                        .iter()
                        .map(|&s| {
                            pi * (loss.dscore(s, 1) - sign * loss.dscore(s, -1)) / n_p
                        })
                        .collect();
                    let gu = scores_u
                        .iter()
                        .map(|&s| sign * loss.dscore(s, -1) / n_u)
                        .collect();
                    (
                        RiskBreakdown {
                            positive_term: pos,
                            negative_term: neg,
                            total,
                            inner_negative,
                        },
                        gp,
                        gu,
                    )
                }
                Estimator::OneClass => {
                    let alpha = cfg.alpha_p;
                    let parts: Vec<(f64, f64)> =
                        scores_p.iter().map(|&s| focal_parts(s, cfg)).collect();
                    let pos = parts.iter().map(|(v, _)| v).sum::<f64>() / n_p;
                    let neg = inner.abs() / (1.0 - pi);
                    let total = alpha * pos + (1.0 - alpha) * neg;
                    let flood = (1.0 - alpha) * sign * pi / (1.0 - pi);
                    let gp = scores_p
                        .iter()
                        .zip(&parts)
                        .map(|(&s, &(_, dfocal))| {
                            alpha * dfocal / n_p - flood * loss.dscore(s, -1) / n_p
                        })
                        .collect();
                    let gu = scores_u
                        .iter()
                        .map(|&s| (1.0 - alpha) * sign * loss.dscore(s, -1) / ((1.0 - pi) * n_u))
                        .collect();
                    (
                        RiskBreakdown {
                            positive_term: pos,
                            negative_term: neg,
                            total,
                            inner_negative,
                        },
                        gp,
                        gu,
                    )
                }
                _ => unreachable!(),
            }
        }
    };
    Ok(RiskGrads {
        breakdown,
        dscores_p,
        dscores_u,
    })
}

/// Label frequency `c = n_p / (n_p + n_u * pi_p)` used by the
/// post-threshold calibration transforms.
pub fn calib_c(n_p: usize, n_u: usize, pi_p: f64) -> Result<f64> {
    if n_p == 0 || n_u == 0 {
        return Err(Error::invalid("calib_c", "n_p and n_u must be >= 1"));
    }
    if !(pi_p > 0.0 && pi_p < 1.0) {
        return Err(Error::invalid(
            "calib_c",
            format!("pi_p {pi_p} outside (0, 1)"),
        ));
    }
    Ok(n_p as f64 / (n_p as f64 + n_u as f64 * pi_p))
}

/// Scale calibration `g / c`.
pub fn pul_adjust(g: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::invalid("pul_adjust", format!("c {c} outside (0, 1]")));
    }
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::invalid("pul_adjust", format!("g {g} outside [0, 1]")));
    }
    Ok(g / c)
}

/// Odds calibration `((1 - c) / c) * (g / (1 - g))`.
pub fn pbl_adjust(g: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::invalid("pbl_adjust", format!("c {c} outside (0, 1)")));
    }
    if !(0.0..1.0).contains(&g) {
        return Err(Error::invalid(
            "pbl_adjust",
            format!("g {g} outside [0, 1); odds undefined at g = 1"),
        ));
    }
    Ok(((1.0 - c) / c) * (g / (1.0 - g)))
}
