//! Canned synthetic tasks shared by the CLI defaults and the acceptance
//! experiments.
//!
//! The clustered task puts a tight positive Gaussian inside a multi-blob
//! negative background, with one broad negative component centered within
//! one positive std of the positive mean so the classes genuinely overlap.
//! Dialing `pi_p` down produces the prior-imbalance regime; the component
//! layout itself is deterministic.

use crate::data::{GaussianComponent, SyntheticSpec};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Weight of the broad overlap component within the negative class.
const OVERLAP_WEIGHT: f64 = 0.01;
/// Std of the broad overlap component.
const OVERLAP_STD: f64 = 2.5;
/// Std of the tight positive cluster.
const POSITIVE_STD: f64 = 0.2;

/// Clustered positive class inside a `neg_components`-blob negative
/// background (one of them broad and centered near the positive mean).
pub fn clustered_task(
    dim: usize,
    pi_p: f64,
    n_total: usize,
    neg_components: usize,
    overlap_scale: f64,
) -> Result<SyntheticSpec> {
    if dim == 0 {
        return Err(Error::invalid("clustered_task", "dim must be >= 1"));
    }
    if !(2..=16).contains(&neg_components) {
        return Err(Error::invalid(
            "clustered_task",
            format!("neg_components {neg_components} outside 2..=16"),
        ));
    }
    let positive = GaussianComponent::new(vec![0.0; dim], POSITIVE_STD, 1.0);

    let mut negatives = Vec::with_capacity(neg_components);
    // broad component overlapping the positive cluster; its mean sits
    // within one positive std of the positive mean
    let mut overlap_mean = vec![0.0; dim];
    overlap_mean[0] = 0.6 * POSITIVE_STD;
    negatives.push(GaussianComponent::new(overlap_mean, OVERLAP_STD, OVERLAP_WEIGHT));

    let far = neg_components - 1;
    let far_weight = (1.0 - OVERLAP_WEIGHT) / far as f64;
    for k in 0..far {
        let mut mean = vec![0.0; dim];
        if dim == 1 {
            mean[0] = if k % 2 == 0 { 3.0 } else { -3.0 } * (1.0 + k as f64 * 0.25);
        } else {
            let angle = std::f64::consts::TAU * (k as f64 + 0.35) / far as f64;
            mean[0] = 3.0 * angle.cos();
            mean[1] = 3.0 * angle.sin();
        }
        negatives.push(GaussianComponent::new(mean, 0.7, far_weight));
    }

    let spec = SyntheticSpec {
        dim,
        pi_p,
        positive_components: vec![positive],
        negative_components: negatives,
        n_total,
        overlap_scale,
    };
    spec.validate()?;
    Ok(spec)
}

/// Two-blob distribution with moderate class overlap, used by the bound
/// checks.
pub fn bound_check_distribution(pi_p: f64) -> Result<SyntheticSpec> {
    let spec = SyntheticSpec {
        dim: 2,
        pi_p,
        positive_components: vec![GaussianComponent::new(vec![1.5, 1.0], 0.8, 1.0)],
        negative_components: vec![GaussianComponent::new(vec![-1.0, -0.6], 1.0, 1.0)],
        n_total: 1,
        overlap_scale: 1.0,
    };
    spec.validate()?;
    Ok(spec)
}

/// Frozen linear scorer paired with [`bound_check_distribution`]: scores
/// vary over a few units on both classes, so the negative risk is neither
/// saturated nor degenerate.
pub fn bound_check_scorer() -> ModelParams {
    ModelParams::linear(&[0.9, 0.7], -0.3).expect("fixed weights are valid")
}
