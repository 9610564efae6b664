//! Monte-Carlo verification of the absolute-value negative risk for a
//! frozen scorer on a known mixture: the probability that the inner
//! (pre-absolute-value) estimate goes negative, the estimator's bias, and
//! its deviation quantiles, each against the closed-form bound.
//!
//! All bounds assume a loss bounded by `C_l` and a certified margin
//! `alpha <= (1 - pi_p) R_n(f)`; certification estimates `R_n(f)` from a
//! large reference draw and rejects margins above 90% of it.

use ndarray::Array2;
use rayon::prelude::*;

use crate::data::{MixtureSampler, SyntheticSpec};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::risk::LossKind;
use crate::rng::sub_rng;

/// Number of negative-class draws behind the reference risk estimate,
/// treated as exact (its standard error is recorded in the report).
pub const REFERENCE_DRAWS: usize = 1_000_000;

/// A frozen scorer, a known data distribution, and the sample-size /
/// margin / confidence knobs of one bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSpec {
    pub model: ModelParams,
    pub distribution: SyntheticSpec,
    /// Class prior used by the estimator; must equal the distribution's.
    pub pi_p: f64,
    pub n_p: usize,
    pub n_u: usize,
    pub trials: usize,
    /// The margin `alpha` with `(1 - pi_p) R_n(f) >= alpha`.
    pub alpha_margin: f64,
    /// Confidence parameter of the deviation bound, in (0, 1).
    pub sigma: f64,
    pub loss: LossKind,
    pub seed: u64,
}

impl BoundSpec {
    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()?;
        if self.loss.bound().is_none() {
            return Err(Error::invalid(
                "BoundSpec",
                "bound checks require a bounded loss",
            ));
        }
        if self.model.input_dim() != self.distribution.dim {
            return Err(Error::Shape(format!(
                "model expects {} inputs, distribution has dim {}",
                self.model.input_dim(),
                self.distribution.dim
            )));
        }
        if !(self.pi_p > 0.0 && self.pi_p < 1.0) {
            return Err(Error::invalid(
                "BoundSpec",
                format!("pi_p {} outside (0, 1)", self.pi_p),
            ));
        }
        if (self.pi_p - self.distribution.pi_p).abs() > 1e-12 {
            return Err(Error::invalid(
                "BoundSpec",
                format!(
                    "estimator prior {} disagrees with distribution prior {}",
                    self.pi_p, self.distribution.pi_p
                ),
            ));
        }
        if self.n_p == 0 || self.n_u == 0 {
            return Err(Error::invalid("BoundSpec", "n_p and n_u must be >= 1"));
        }
        if self.trials < 1000 {
            return Err(Error::invalid(
                "BoundSpec",
                format!("trials {} below the minimum of 1000", self.trials),
            ));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::invalid(
                "BoundSpec",
                format!("sigma {} outside (0, 1)", self.sigma),
            ));
        }
        if !(self.alpha_margin > 0.0) || !self.alpha_margin.is_finite() {
            return Err(Error::invalid(
                "BoundSpec",
                format!("alpha_margin {} must be > 0", self.alpha_margin),
            ));
        }
        Ok(())
    }
}

/// Closed-form branch-probability bound
/// `exp(-2 (alpha / C_l)^2 / (pi_p^2 / n_p + 1 / n_u))`.
pub fn delta_f_formula(alpha: f64, c_l: f64, pi_p: f64, n_p: usize, n_u: usize) -> f64 {
    let denom = pi_p * pi_p / n_p as f64 + 1.0 / n_u as f64;
    (-2.0 * (alpha / c_l).powi(2) / denom).exp()
}

/// Sample-size term `pi_p / sqrt(n_p) + 1 / sqrt(n_u)` of the deviation
/// bound.
pub fn deviation_scale(pi_p: f64, n_p: usize, n_u: usize) -> f64 {
    pi_p / (n_p as f64).sqrt() + 1.0 / (n_u as f64).sqrt()
}

/// Confidence coefficient `C_l sqrt(ln(2 / sigma) / 2) / (1 - pi_p)`.
pub fn deviation_coefficient(c_l: f64, sigma: f64, pi_p: f64) -> f64 {
    c_l * ((2.0 / sigma).ln() / 2.0).sqrt() / (1.0 - pi_p)
}

/// Result of one Monte-Carlo bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n_p: usize,
    pub n_u: usize,
    pub trials: usize,
    pub pi_p: f64,
    pub alpha_margin: f64,
    pub sigma: f64,
    /// Large-sample reference for the true negative risk of the frozen
    /// scorer, with its Monte-Carlo standard error.
    pub true_negative_risk_ref: f64,
    pub ref_std_error: f64,
    /// Fraction of trials whose inner estimate went negative.
    pub empirical_p_s_minus: f64,
    pub delta_f: f64,
    /// Mean absolute-value estimate minus the reference risk.
    pub empirical_bias: f64,
    /// `2 pi_p C_l delta_f / (1 - pi_p)`.
    pub bias_bound: f64,
    /// Standard error of the trial mean.
    pub bias_mc_std: f64,
    /// Quantile level `1 - sigma - delta_f` (may be <= 0, in which case
    /// the deviation statement is vacuous).
    pub deviation_level: f64,
    pub deviation_quantile: f64,
    /// `C_sigma * (pi_p / sqrt(n_p) + 1 / sqrt(n_u))`.
    pub deviation_bound: f64,
    pub median_abs_deviation: f64,
}

impl BoundReport {
    /// Monte-Carlo slack on the branch-probability check.
    pub fn branch_probability_slack(&self) -> f64 {
        3.0 * (self.delta_f / self.trials as f64).sqrt()
    }

    pub fn branch_probability_pass(&self) -> bool {
        self.empirical_p_s_minus <= self.delta_f + self.branch_probability_slack()
    }

    pub fn bias_pass(&self) -> bool {
        self.empirical_bias >= -3.0 * self.bias_mc_std
            && self.empirical_bias <= self.bias_bound + 3.0 * self.bias_mc_std
    }

    pub fn deviation_pass(&self) -> bool {
        self.deviation_level <= 0.0 || self.deviation_quantile <= self.deviation_bound
    }

    pub fn all_pass(&self) -> bool {
        self.branch_probability_pass() && self.bias_pass() && self.deviation_pass()
    }

    /// Human-readable block, one line per checked quantity.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "cell n_p={} n_u={} trials={} pi_p={} alpha={:.6}\n",
            self.n_p, self.n_u, self.trials, self.pi_p, self.alpha_margin
        ));
        s.push_str(&format!(
            "  reference negative risk {:.6} (std error {:.2e})\n",
            self.true_negative_risk_ref, self.ref_std_error
        ));
        s.push_str(&format!(
            "  P(inner < 0): empirical {:.6} <= bound {:.6} + slack {:.6}  [{}]\n",
            self.empirical_p_s_minus,
            self.delta_f,
            self.branch_probability_slack(),
            if self.branch_probability_pass() { "PASS" } else { "FAIL" }
        ));
        s.push_str(&format!(
            "  bias: empirical {:.6} in [-{:.6}, {:.6} + {:.6}]  [{}]\n",
            self.empirical_bias,
            3.0 * self.bias_mc_std,
            self.bias_bound,
            3.0 * self.bias_mc_std,
            if self.bias_pass() { "PASS" } else { "FAIL" }
        ));
        s.push_str(&format!(
            "  deviation: q({:.4}) = {:.6} <= bound {:.6}  [{}]\n",
            self.deviation_level,
            self.deviation_quantile,
            self.deviation_bound,
            if self.deviation_pass() { "PASS" } else { "FAIL" }
        ));
        s
    }
}

/// A [`BoundSpec`] whose margin passed certification, carrying the shared
/// reference negative risk.
#[derive(Debug, Clone)]
pub struct CertifiedBound {
    spec: BoundSpec,
    rn_ref: f64,
    ref_std_error: f64,
    c_l: f64,
}

fn reference_negative_risk(spec: &BoundSpec) -> Result<(f64, f64)> {
    let sampler = MixtureSampler::new(&spec.distribution)?;
    let mut rng = sub_rng(spec.seed, "reference-negative-risk", 0);
    let d = spec.distribution.dim;
    let chunk = 8192;
    let mut buf = Array2::zeros((chunk, d));
    let mut remaining = REFERENCE_DRAWS;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    while remaining > 0 {
        let take = remaining.min(chunk);
        for r in 0..take {
            let mut row = buf.row_mut(r);
            sampler.sample_negative(&mut rng, row.as_slice_mut().expect("contiguous row"));
        }
        let (scores, _) = spec.model.forward_batch(buf.slice(ndarray::s![..take, ..]))?;
        for &s in scores.iter() {
            let l = spec.loss.eval(s, -1);
            sum += l;
            sum_sq += l * l;
        }
        remaining -= take;
    }
    let n = REFERENCE_DRAWS as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Largest margin the certification rule accepts for this scorer and
/// distribution: `0.9 (1 - pi_p) R_n(f)` with the reference estimate of
/// `R_n(f)`.
pub fn suggest_alpha(spec: &BoundSpec) -> Result<f64> {
    let mut probe = spec.clone();
    probe.alpha_margin = f64::MIN_POSITIVE;
    probe.validate()?;
    let (rn_ref, _) = reference_negative_risk(&probe)?;
    Ok(0.9 * (1.0 - spec.pi_p) * rn_ref)
}

/// Certify the margin assumption against the reference draw.
pub fn certify(spec: BoundSpec) -> Result<CertifiedBound> {
    spec.validate()?;
    let (rn_ref, ref_std_error) = reference_negative_risk(&spec)?;
    let max_certifiable = 0.9 * (1.0 - spec.pi_p) * rn_ref;
    if spec.alpha_margin > max_certifiable {
        return Err(Error::UncertifiedAlpha {
            alpha: spec.alpha_margin,
            max_certifiable,
            risk_estimate: rn_ref,
        });
    }
    let c_l = spec.loss.bound().expect("validated bounded loss");
    Ok(CertifiedBound {
        spec,
        rn_ref,
        ref_std_error,
        c_l,
    })
}

/// k-th smallest with `k = ceil(q n)`: the smallest value covering at
/// least a `q` fraction of the sample.
fn quantile_upper(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let k = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

impl CertifiedBound {
    pub fn spec(&self) -> &BoundSpec {
        &self.spec
    }

    pub fn reference_negative_risk(&self) -> f64 {
        self.rn_ref
    }

    pub fn delta_f(&self) -> f64 {
        delta_f_formula(
            self.spec.alpha_margin,
            self.c_l,
            self.spec.pi_p,
            self.spec.n_p,
            self.spec.n_u,
        )
    }

    /// Same certification, different grid cell; per-trial streams are
    /// re-derived from the cell seed.
    pub fn with_cell(&self, n_p: usize, n_u: usize, seed: u64) -> CertifiedBound {
        let mut cell = self.clone();
        cell.spec.n_p = n_p;
        cell.spec.n_u = n_u;
        cell.spec.seed = seed;
        cell
    }

    fn trial_inners(&self) -> Result<Vec<f64>> {
        let spec = &self.spec;
        let sampler = MixtureSampler::new(&spec.distribution)?;
        let d = spec.distribution.dim;
        (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = sub_rng(spec.seed, "bound-trial", t as u64);
                let mut batch = Array2::zeros((spec.n_p + spec.n_u, d));
                for r in 0..spec.n_p {
                    let mut row = batch.row_mut(r);
                    sampler.sample_positive(&mut rng, row.as_slice_mut().expect("contiguous"));
                }
                for r in spec.n_p..spec.n_p + spec.n_u {
                    let mut row = batch.row_mut(r);
                    sampler.sample_marginal(&mut rng, row.as_slice_mut().expect("contiguous"));
                }
                let (scores, _) = spec.model.forward_batch(batch.view())?;
                let flat = scores.as_slice().expect("contiguous scores");
                let rp = flat[..spec.n_p]
                    .iter()
                    .map(|&s| spec.loss.eval(s, -1))
                    .sum::<f64>()
                    / spec.n_p as f64;
                let ru = flat[spec.n_p..]
                    .iter()
                    .map(|&s| spec.loss.eval(s, -1))
                    .sum::<f64>()
                    / spec.n_u as f64;
                Ok(ru - spec.pi_p * rp)
            })
            .collect()
    }

    /// Run the trials and assemble the full report: branch-probability,
    /// bias, and deviation fields.
    pub fn report(&self) -> Result<BoundReport> {
        let spec = &self.spec;
        let inners = self.trial_inners()?;
        let trials = inners.len() as f64;
        let negative_trials = inners.iter().filter(|&&v| v < 0.0).count();
        let one_minus_pi = 1.0 - spec.pi_p;

        let oc_values: Vec<f64> = inners.iter().map(|v| v.abs() / one_minus_pi).collect();
        let mean_oc = oc_values.iter().sum::<f64>() / trials;
        let var_oc = oc_values
            .iter()
            .map(|v| (v - mean_oc).powi(2))
            .sum::<f64>()
            / (trials - 1.0);

        let mut deviations: Vec<f64> =
            oc_values.iter().map(|v| (v - self.rn_ref).abs()).collect();
        deviations.sort_by(|a, b| a.partial_cmp(b).expect("finite deviations"));

        let delta_f = self.delta_f();
        let level = 1.0 - spec.sigma - delta_f;
        let quantile = if level > 0.0 {
            quantile_upper(&deviations, level)
        } else {
            0.0
        };

        Ok(BoundReport {
            n_p: spec.n_p,
            n_u: spec.n_u,
            trials: spec.trials,
            pi_p: spec.pi_p,
            alpha_margin: spec.alpha_margin,
            sigma: spec.sigma,
            true_negative_risk_ref: self.rn_ref,
            ref_std_error: self.ref_std_error,
            empirical_p_s_minus: negative_trials as f64 / trials,
            delta_f,
            empirical_bias: mean_oc - self.rn_ref,
            bias_bound: 2.0 * spec.pi_p * self.c_l * delta_f / one_minus_pi,
            bias_mc_std: (var_oc / trials).sqrt(),
            deviation_level: level,
            deviation_quantile: quantile,
            deviation_bound: deviation_coefficient(self.c_l, spec.sigma, spec.pi_p)
                * deviation_scale(spec.pi_p, spec.n_p, spec.n_u),
            median_abs_deviation: quantile_upper(&deviations, 0.5),
        })
    }
}

/// Closed-form bound for a certified spec; errors if the margin cannot be
/// certified.
pub fn delta_f(spec: &BoundSpec) -> Result<f64> {
    Ok(certify(spec.clone())?.delta_f())
}

/// Certify once and run the full Monte-Carlo check.
pub fn mc_verify(spec: BoundSpec) -> Result<BoundReport> {
    certify(spec)?.report()
}

/// One report per `(n_p, n_u)` cell, sharing a single certification.
/// Cell `i` draws its trials from root seed + i.
pub fn grid_reports(
    base: &BoundSpec,
    np_grid: &[usize],
    nu_grid: &[usize],
) -> Result<Vec<BoundReport>> {
    if np_grid.is_empty() || nu_grid.is_empty() {
        return Err(Error::invalid("grid", "empty n_p or n_u grid"));
    }
    let cert = certify(base.clone())?;
    let mut reports = Vec::new();
    let mut cell_index = 0u64;
    for &n_p in np_grid {
        for &n_u in nu_grid {
            let cell = cert.with_cell(n_p, n_u, base.seed.wrapping_add(cell_index));
            reports.push(cell.report()?);
            cell_index += 1;
        }
    }
    Ok(reports)
}
