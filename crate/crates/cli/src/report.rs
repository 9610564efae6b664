//! File emission helpers: optional generated-at stamp lines, metric rows
//! on the x100 two-decimal scale, and `mean(std)` summary cells.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use ocrisk::metrics::{mean_std, MetricsReport};

#[derive(Debug, Clone, Copy)]
pub struct Emitter {
    pub stamp: bool,
}

impl Emitter {
    /// Open a file for writing, prefixed with a `# generated-at` comment
    /// unless stamping is disabled.
    pub fn open(&self, path: &Path) -> Result<BufWriter<File>> {
        let mut w = BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        if self.stamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            writeln!(w, "# generated-at {secs}")?;
        }
        Ok(w)
    }
}

/// One metric on the external x100 scale with two decimals.
pub fn pct(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

/// `mean(std)` cell over per-run values of one metric, x100 scale.
pub fn pct_mean_std(values: &[f64]) -> String {
    let scaled: Vec<f64> = values.iter().map(|v| v * 100.0).collect();
    let (m, s) = mean_std(&scaled);
    format!("{m:.2}({s:.2})")
}

pub const METRICS_HEADER: &str = "class,estimator,precision,recall,f1,auc";

pub fn metrics_row(class: &str, estimator: &str, r: &MetricsReport) -> String {
    format!(
        "{class},{estimator},{},{},{},{}",
        pct(r.precision),
        pct(r.recall),
        pct(r.f1),
        pct(r.auc)
    )
}

/// Summary row whose metric cells are `mean(std)` over the runs.
pub fn metrics_summary_row(class: &str, estimator: &str, runs: &[MetricsReport]) -> String {
    let col = |f: fn(&MetricsReport) -> f64| {
        let values: Vec<f64> = runs.iter().map(f).collect();
        pct_mean_std(&values)
    };
    format!(
        "{class},{estimator},{},{},{},{}",
        col(|r| r.precision),
        col(|r| r.recall),
        col(|r| r.f1),
        col(|r| r.auc)
    )
}
