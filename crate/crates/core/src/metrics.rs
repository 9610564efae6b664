//! Evaluation of hard decisions and soft scores: precision, recall, F1,
//! average F1, and AUC, with +1 as the positive class.
//!
//! Degenerate denominators follow the reporting convention for collapsed
//! classifiers: precision is 0 when nothing is predicted positive, recall
//! is 0 when there are no positives, and F1 is 0 when precision + recall
//! is 0.

use crate::error::{Error, Result};

/// Binary confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tpc: usize,
    pub fpc: usize,
    pub fnc: usize,
    pub tnc: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tpc + self.fpc + self.fnc + self.tnc
    }

    pub fn precision(&self) -> f64 {
        if self.tpc + self.fpc == 0 {
            0.0
        } else {
            self.tpc as f64 / (self.tpc + self.fpc) as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.tpc + self.fnc == 0 {
            0.0
        } else {
            self.tpc as f64 / (self.tpc + self.fnc) as f64
        }
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }
}

/// Count the confusion table of ±1 decisions against ±1 truth.
pub fn confusion(decisions: &[i8], truth: &[i8]) -> Result<ConfusionCounts> {
    if decisions.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} decisions vs {} truth labels",
            decisions.len(),
            truth.len()
        )));
    }
    if decisions.is_empty() {
        return Err(Error::invalid("confusion", "empty input"));
    }
    let mut counts = ConfusionCounts {
        tpc: 0,
        fpc: 0,
        fnc: 0,
        tnc: 0,
    };
    for (&d, &t) in decisions.iter().zip(truth) {
        match (d, t) {
            (1, 1) => counts.tpc += 1,
            (1, -1) => counts.fpc += 1,
            (-1, 1) => counts.fnc += 1,
            (-1, -1) => counts.tnc += 1,
            _ => {
                return Err(Error::invalid(
                    "confusion",
                    format!("label pair ({d}, {t}) outside {{+1, -1}}"),
                ))
            }
        }
    }
    Ok(counts)
}

/// Harmonic mean `2pr / (p + r)`, defined as 0 when `p + r = 0`.
pub fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Rank-sum AUC: the probability that a random positive outscores a
/// random negative, ties counted 1/2.
pub fn auc(scores: &[f64], truth: &[i8]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} scores vs {} truth labels",
            scores.len(),
            truth.len()
        )));
    }
    let n_pos = truth.iter().filter(|&&t| t == 1).count();
    let n_neg = truth.iter().filter(|&&t| t == -1).count();
    if n_pos + n_neg != truth.len() {
        return Err(Error::invalid("auc", "labels outside {+1, -1}"));
    }
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::invalid("auc", "both classes must be present"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));
    // average ranks over tie groups, 1-based
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &k in &order[i..=j] {
            if truth[k] == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Headline metrics of one evaluation. Values are in [0, 1]; external
/// interfaces scale them by 100 with two decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub n_eval: usize,
}

impl MetricsReport {
    /// Evaluate raw scores against truth, deciding +1 when score > 0.
    pub fn from_scores(scores: &[f64], truth: &[i8]) -> Result<Self> {
        let decisions: Vec<i8> = scores.iter().map(|&s| if s > 0.0 { 1 } else { -1 }).collect();
        let counts = confusion(&decisions, truth)?;
        let auc = auc(scores, truth)?;
        Ok(Self {
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
            auc,
            n_eval: truth.len(),
        })
    }

    pub fn from_counts(counts: &ConfusionCounts, auc: f64) -> Self {
        Self {
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
            auc,
            n_eval: counts.total(),
        }
    }
}

/// Arithmetic mean of the reports' F1 values.
pub fn average_f1(reports: &[MetricsReport]) -> Result<f64> {
    if reports.is_empty() {
        return Err(Error::invalid("average_f1", "empty report list"));
    }
    Ok(reports.iter().map(|r| r.f1).sum::<f64>() / reports.len() as f64)
}

/// Mean and sample standard deviation (n - 1 denominator; 0 for n = 1).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
