//! Synthetic PU datasets, CSV ingestion, and positive/unlabeled sampling.
//!
//! Datasets are plain row matrices with ±1 ground-truth labels and a true
//! class prior. Synthetic data comes from per-class isotropic Gaussian
//! mixtures, so class overlap and prior imbalance can be dialed
//! independently.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use rand::distr::weighted::WeightedIndex;
use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::sub_rng;

/// One isotropic Gaussian mixture component.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub mean: Vec<f64>,
    pub std: f64,
    pub weight: f64,
}

impl GaussianComponent {
    pub fn new(mean: Vec<f64>, std: f64, weight: f64) -> Self {
        Self { mean, std, weight }
    }
}

/// Recipe for a synthetic dataset: per-class mixtures plus the class prior.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub dim: usize,
    /// Marginal probability of the positive class, in (0, 1).
    pub pi_p: f64,
    pub positive_components: Vec<GaussianComponent>,
    pub negative_components: Vec<GaussianComponent>,
    pub n_total: usize,
    /// Multiplier applied to every component std; larger values increase
    /// class overlap.
    pub overlap_scale: f64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::invalid("SyntheticSpec", "dim must be >= 1"));
        }
        if !(self.pi_p > 0.0 && self.pi_p < 1.0) {
            return Err(Error::invalid(
                "SyntheticSpec",
                format!("pi_p {} outside (0, 1)", self.pi_p),
            ));
        }
        if self.n_total == 0 {
            return Err(Error::invalid("SyntheticSpec", "n_total must be >= 1"));
        }
        if !(self.overlap_scale >= 0.0) || !self.overlap_scale.is_finite() {
            return Err(Error::invalid(
                "SyntheticSpec",
                format!("overlap_scale {} must be finite and >= 0", self.overlap_scale),
            ));
        }
        for (class, comps) in [
            ("positive", &self.positive_components),
            ("negative", &self.negative_components),
        ] {
            if comps.is_empty() {
                return Err(Error::invalid(
                    "SyntheticSpec",
                    format!("{class} class has no mixture components"),
                ));
            }
            let mut weight_sum = 0.0;
            for c in comps {
                if c.mean.len() != self.dim {
                    return Err(Error::invalid(
                        "SyntheticSpec",
                        format!(
                            "{class} component mean has {} entries, expected dim {}",
                            c.mean.len(),
                            self.dim
                        ),
                    ));
                }
                if !c.mean.iter().all(|v| v.is_finite()) {
                    return Err(Error::invalid(
                        "SyntheticSpec",
                        format!("{class} component mean contains a non-finite value"),
                    ));
                }
                if !(c.std > 0.0) || !c.std.is_finite() {
                    return Err(Error::invalid(
                        "SyntheticSpec",
                        format!("{class} component std {} must be > 0", c.std),
                    ));
                }
                if !(c.weight > 0.0) || !c.weight.is_finite() {
                    return Err(Error::invalid(
                        "SyntheticSpec",
                        format!("{class} component weight {} must be > 0", c.weight),
                    ));
                }
                weight_sum += c.weight;
            }
            if (weight_sum - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(
                    "SyntheticSpec",
                    format!("{class} component weights sum to {weight_sum}, expected 1"),
                ));
            }
        }
        Ok(())
    }
}

/// Prepared sampler for a validated [`SyntheticSpec`].
///
/// Used both by [`gen_synthetic`] and by the Monte-Carlo bound checks,
/// which draw directly from the continuous mixtures.
pub struct MixtureSampler<'a> {
    spec: &'a SyntheticSpec,
    class_prior: Bernoulli,
    positive_choice: WeightedIndex<f64>,
    negative_choice: WeightedIndex<f64>,
}

impl<'a> MixtureSampler<'a> {
    pub fn new(spec: &'a SyntheticSpec) -> Result<Self> {
        spec.validate()?;
        let weighted = |comps: &[GaussianComponent]| {
            WeightedIndex::new(comps.iter().map(|c| c.weight))
                .map_err(|e| Error::invalid("SyntheticSpec", format!("mixture weights: {e}")))
        };
        Ok(Self {
            spec,
            class_prior: Bernoulli::new(spec.pi_p)
                .map_err(|e| Error::invalid("SyntheticSpec", format!("pi_p: {e}")))?,
            positive_choice: weighted(&spec.positive_components)?,
            negative_choice: weighted(&spec.negative_components)?,
        })
    }

    fn draw_from(
        &self,
        comps: &[GaussianComponent],
        choice: &WeightedIndex<f64>,
        rng: &mut impl Rng,
        out: &mut [f64],
    ) {
        let c = &comps[choice.sample(rng)];
        let std = c.std * self.spec.overlap_scale;
        for (slot, mean) in out.iter_mut().zip(&c.mean) {
            let z: f64 = rng.sample(StandardNormal);
            *slot = mean + std * z;
        }
    }

    pub fn sample_positive(&self, rng: &mut impl Rng, out: &mut [f64]) {
        self.draw_from(&self.spec.positive_components, &self.positive_choice, rng, out);
    }

    pub fn sample_negative(&self, rng: &mut impl Rng, out: &mut [f64]) {
        self.draw_from(&self.spec.negative_components, &self.negative_choice, rng, out);
    }

    /// Draw from the full marginal; returns the latent class label.
    pub fn sample_marginal(&self, rng: &mut impl Rng, out: &mut [f64]) -> i8 {
        if self.class_prior.sample(rng) {
            self.sample_positive(rng, out);
            1
        } else {
            self.sample_negative(rng, out);
            -1
        }
    }
}

/// Feature matrix with ground-truth ±1 labels and the true class prior.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: Array2<f64>,
    pub y_true: Vec<i8>,
    pub pi_p_true: f64,
    pub name: String,
}

impl LabeledDataset {
    pub fn new(
        features: Array2<f64>,
        y_true: Vec<i8>,
        pi_p_true: f64,
        name: impl Into<String>,
    ) -> Result<Self> {
        if features.nrows() != y_true.len() {
            return Err(Error::Shape(format!(
                "{} feature rows vs {} labels",
                features.nrows(),
                y_true.len()
            )));
        }
        if y_true.is_empty() {
            return Err(Error::invalid("LabeledDataset", "dataset has no rows"));
        }
        if !features.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid(
                "LabeledDataset",
                "features contain a non-finite value",
            ));
        }
        if let Some(y) = y_true.iter().find(|&&y| y != 1 && y != -1) {
            return Err(Error::invalid(
                "LabeledDataset",
                format!("label {y} outside {{+1, -1}}"),
            ));
        }
        if !(pi_p_true > 0.0 && pi_p_true < 1.0) {
            return Err(Error::invalid(
                "LabeledDataset",
                format!("pi_p_true {pi_p_true} outside (0, 1)"),
            ));
        }
        Ok(Self {
            features,
            y_true,
            pi_p_true,
            name: name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.y_true.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_true.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn positive_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.y_true[i] == 1).collect()
    }

    pub fn empirical_positive_fraction(&self) -> f64 {
        let n_pos = self.y_true.iter().filter(|&&y| y == 1).count();
        n_pos as f64 / self.len() as f64
    }
}

/// Generate a dataset from the mixture spec; deterministic given the seed.
pub fn gen_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<LabeledDataset> {
    let sampler = MixtureSampler::new(spec)?;
    let mut rng = sub_rng(seed, "gen-synthetic", 0);
    let mut features = Array2::zeros((spec.n_total, spec.dim));
    let mut y_true = Vec::with_capacity(spec.n_total);
    for i in 0..spec.n_total {
        let mut row = features.row_mut(i);
        let buf = row.as_slice_mut().expect("rows are contiguous");
        y_true.push(sampler.sample_marginal(&mut rng, buf));
    }
    let name = format!(
        "synthetic-d{}-pi{}-n{}-s{}",
        spec.dim, spec.pi_p, spec.n_total, seed
    );
    LabeledDataset::new(features, y_true, spec.pi_p, name)
}

/// Index sets of the labeled-positive and unlabeled training samples.
///
/// The two lists may overlap (the unlabeled pool is a draw from the full
/// marginal), but neither contains internal duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct PUSample {
    pub positive_idx: Vec<usize>,
    pub unlabeled_idx: Vec<usize>,
    pub source_name: String,
}

impl PUSample {
    pub fn n_p(&self) -> usize {
        self.positive_idx.len()
    }

    pub fn n_u(&self) -> usize {
        self.unlabeled_idx.len()
    }

    /// Check that the sample indexes `ds` consistently: indices in range,
    /// labeled rows actually positive, and no internal duplicates.
    pub fn validate_against(&self, ds: &LabeledDataset) -> Result<()> {
        if self.positive_idx.is_empty() || self.unlabeled_idx.is_empty() {
            return Err(Error::invalid("PUSample", "index lists must be non-empty"));
        }
        for &i in self.positive_idx.iter().chain(&self.unlabeled_idx) {
            if i >= ds.len() {
                return Err(Error::invalid(
                    "PUSample",
                    format!("index {i} out of range for {} rows", ds.len()),
                ));
            }
        }
        if let Some(&i) = self.positive_idx.iter().find(|&&i| ds.y_true[i] != 1) {
            return Err(Error::invalid(
                "PUSample",
                format!("labeled index {i} is not a positive row"),
            ));
        }
        for list in [&self.positive_idx, &self.unlabeled_idx] {
            let mut seen = list.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != list.len() {
                return Err(Error::invalid("PUSample", "duplicate index within a list"));
            }
        }
        Ok(())
    }
}

/// Draw `n_p` labeled positives and `n_u` unlabeled rows, both uniformly
/// without replacement. The unlabeled pool is drawn from all rows and may
/// re-include labeled positives.
pub fn make_pu_split(ds: &LabeledDataset, n_p: usize, n_u: usize, seed: u64) -> Result<PUSample> {
    make_pu_split_opts(ds, n_p, n_u, seed, true)
}

/// Like [`make_pu_split`], but the unlabeled pool excludes the rows chosen
/// as labeled positives.
pub fn make_pu_split_disjoint(
    ds: &LabeledDataset,
    n_p: usize,
    n_u: usize,
    seed: u64,
) -> Result<PUSample> {
    make_pu_split_opts(ds, n_p, n_u, seed, false)
}

fn make_pu_split_opts(
    ds: &LabeledDataset,
    n_p: usize,
    n_u: usize,
    seed: u64,
    allow_overlap: bool,
) -> Result<PUSample> {
    if n_p == 0 || n_u == 0 {
        return Err(Error::invalid("PUSample", "n_p and n_u must be >= 1"));
    }
    let positives = ds.positive_indices();
    if positives.len() < n_p {
        return Err(Error::InsufficientPositives {
            name: ds.name.clone(),
            needed: n_p,
            available: positives.len(),
        });
    }
    let mut rng_p = sub_rng(seed, "pu-split-positive", 0);
    let mut positive_idx: Vec<usize> = rand::seq::index::sample(&mut rng_p, positives.len(), n_p)
        .into_iter()
        .map(|k| positives[k])
        .collect();
    positive_idx.sort_unstable();

    let mut rng_u = sub_rng(seed, "pu-split-unlabeled", 0);
    let mut unlabeled_idx: Vec<usize> = if allow_overlap {
        if ds.len() < n_u {
            return Err(Error::invalid(
                "PUSample",
                format!("n_u {n_u} exceeds dataset size {}", ds.len()),
            ));
        }
        rand::seq::index::sample(&mut rng_u, ds.len(), n_u).into_iter().collect()
    } else {
        let chosen: std::collections::HashSet<usize> = positive_idx.iter().copied().collect();
        let pool: Vec<usize> = (0..ds.len()).filter(|i| !chosen.contains(i)).collect();
        if pool.len() < n_u {
            return Err(Error::invalid(
                "PUSample",
                format!(
                    "n_u {n_u} exceeds the {} rows left after removing labeled positives",
                    pool.len()
                ),
            ));
        }
        rand::seq::index::sample(&mut rng_u, pool.len(), n_u)
            .into_iter()
            .map(|k| pool[k])
            .collect()
    };
    unlabeled_idx.sort_unstable();

    Ok(PUSample {
        positive_idx,
        unlabeled_idx,
        source_name: ds.name.clone(),
    })
}

/// Rows not referenced by the PU sample; evaluation always runs here.
pub fn heldout_indices(ds: &LabeledDataset, pu: &PUSample) -> Vec<usize> {
    let mut used = vec![false; ds.len()];
    for &i in pu.positive_idx.iter().chain(&pu.unlabeled_idx) {
        if i < used.len() {
            used[i] = true;
        }
    }
    (0..ds.len()).filter(|&i| !used[i]).collect()
}

/// Write the exchange schema: a `# pi_p=` directive, a `f0,...,f{d-1},y`
/// header, then one row per sample. Floats use the shortest round-trip
/// representation, lines end with `\n`.
pub fn write_csv<W: Write>(ds: &LabeledDataset, mut w: W) -> Result<()> {
    writeln!(w, "# pi_p={}", ds.pi_p_true)?;
    let mut header = String::new();
    for j in 0..ds.dim() {
        let _ = write!(header, "f{j},");
    }
    header.push('y');
    writeln!(w, "{header}")?;
    let mut line = String::new();
    for i in 0..ds.len() {
        line.clear();
        for v in ds.features.row(i) {
            let _ = write!(line, "{v},");
        }
        line.push_str(if ds.y_true[i] == 1 { "1" } else { "-1" });
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn save_csv(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(ds, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    parse_csv(&text, &name, &path.display().to_string())
}

fn csv_error(origin: &str, e: &csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::parse(origin, line, e.to_string())
}

/// Parse the CSV exchange schema from an in-memory string.
///
/// Leading `#` comment lines are skipped; a `# pi_p=<value>` directive in
/// that block overrides the empirical positive fraction.
pub fn parse_csv(text: &str, name: &str, origin: &str) -> Result<LabeledDataset> {
    let mut pi_override = None;
    let mut header_line: u64 = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = (i + 1) as u64;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(value) = rest.strip_prefix("pi_p=") {
                let v: f64 = value.trim().parse().map_err(|_| {
                    Error::parse(origin, line_no, format!("unreadable pi_p directive `{value}`"))
                })?;
                if !v.is_finite() || !(v > 0.0 && v < 1.0) {
                    return Err(Error::parse(
                        origin,
                        line_no,
                        format!("pi_p directive {v} outside (0, 1)"),
                    ));
                }
                if pi_override.is_none() {
                    pi_override = Some(v);
                }
            }
            continue;
        }
        header_line = line_no;
        break;
    }
    if header_line == 0 {
        return Err(Error::parse(origin, 1, "missing header row"));
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_error(origin, &e))?.clone();
    if headers.len() < 2 {
        return Err(Error::parse(
            origin,
            header_line,
            "header must name at least one feature column and `y`",
        ));
    }
    let dim = headers.len() - 1;
    for j in 0..dim {
        if &headers[j] != format!("f{j}").as_str() {
            return Err(Error::parse(
                origin,
                header_line,
                format!("column {} named `{}`, expected `f{j}`", j, &headers[j]),
            ));
        }
    }
    if &headers[dim] != "y" {
        return Err(Error::parse(
            origin,
            header_line,
            format!("last column named `{}`, expected `y`", &headers[dim]),
        ));
    }

    let mut values: Vec<f64> = Vec::new();
    let mut labels: Vec<i8> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(origin, &e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        for j in 0..dim {
            let tok = &record[j];
            let v: f64 = tok.parse().map_err(|_| {
                Error::parse(origin, line, format!("field f{j}: unreadable number `{tok}`"))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(
                    origin,
                    line,
                    format!("field f{j}: non-finite value `{tok}`"),
                ));
            }
            values.push(v);
        }
        let tok = &record[dim];
        let label: i64 = tok
            .parse()
            .map_err(|_| Error::parse(origin, line, format!("label `{tok}` is not 1 or -1")))?;
        if label != 1 && label != -1 {
            return Err(Error::parse(
                origin,
                line,
                format!("label `{tok}` outside {{1, -1}}"),
            ));
        }
        labels.push(label as i8);
    }
    if labels.is_empty() {
        return Err(Error::parse(origin, header_line, "no data rows"));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let pi_p_true = match pi_override {
        Some(v) => v,
        None => {
            let frac = n_pos as f64 / labels.len() as f64;
            if !(frac > 0.0 && frac < 1.0) {
                return Err(Error::parse(
                    origin,
                    header_line,
                    format!(
                        "single-class file (positive fraction {frac}); add a `# pi_p=` directive"
                    ),
                ));
            }
            frac
        }
    };
    let features = Array2::from_shape_vec((labels.len(), dim), values)
        .expect("row-major buffer matches shape by construction");
    LabeledDataset::new(features, labels, pi_p_true, name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blob_spec(pi_p: f64, n_total: usize) -> SyntheticSpec {
        SyntheticSpec {
            dim: 2,
            pi_p,
            positive_components: vec![GaussianComponent::new(vec![0.0, 0.0], 0.5, 1.0)],
            negative_components: vec![GaussianComponent::new(vec![3.0, 0.0], 0.5, 1.0)],
            n_total,
            overlap_scale: 1.0,
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = two_blob_spec(0.3, 500);
        let a = gen_synthetic(&spec, 11).unwrap();
        let b = gen_synthetic(&spec, 11).unwrap();
        assert_eq!(a, b);
        let mut bytes_a = Vec::new();
        let mut bytes_b = Vec::new();
        write_csv(&a, &mut bytes_a).unwrap();
        write_csv(&b, &mut bytes_b).unwrap();
        assert_eq!(bytes_a, bytes_b);
        let c = gen_synthetic(&spec, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn positive_fraction_within_binomial_window() {
        let mut spec = two_blob_spec(0.0102, 50_000);
        spec.pi_p = 0.0102;
        let ds = gen_synthetic(&spec, 7).unwrap();
        let frac = ds.empirical_positive_fraction();
        let sigma = (0.0102f64 * (1.0 - 0.0102) / 50_000.0).sqrt();
        assert!(
            (frac - 0.0102).abs() <= 4.0 * sigma,
            "fraction {frac} outside 4-sigma window around 0.0102"
        );
    }

    #[test]
    fn extreme_prior_is_almost_all_positive() {
        let spec = two_blob_spec(0.999_999, 2_000);
        let ds = gen_synthetic(&spec, 3).unwrap();
        let frac = ds.empirical_positive_fraction();
        let sigma = (0.999_999f64 * (1.0 - 0.999_999) / 2_000.0).sqrt();
        assert!((frac - 0.999_999).abs() <= 4.0 * sigma);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = two_blob_spec(0.3, 10);
        spec.negative_components[0].weight = 0.5;
        assert!(matches!(
            gen_synthetic(&spec, 0),
            Err(Error::Invalid { .. })
        ));
        let mut spec = two_blob_spec(0.3, 10);
        spec.positive_components[0].std = 0.0;
        assert!(gen_synthetic(&spec, 0).is_err());
        let mut spec = two_blob_spec(0.3, 10);
        spec.pi_p = 1.5;
        assert!(gen_synthetic(&spec, 0).is_err());
    }

    #[test]
    fn pu_split_contract() {
        let ds = gen_synthetic(&two_blob_spec(0.3, 2_000), 1).unwrap();
        let pu = make_pu_split(&ds, 100, 400, 5).unwrap();
        assert_eq!(pu.n_p(), 100);
        assert_eq!(pu.n_u(), 400);
        pu.validate_against(&ds).unwrap();
        assert!(pu.positive_idx.iter().all(|&i| ds.y_true[i] == 1));
        // deterministic
        let again = make_pu_split(&ds, 100, 400, 5).unwrap();
        assert_eq!(pu, again);
    }

    #[test]
    fn pu_split_exhaustive_positive_draw() {
        let ds = gen_synthetic(&two_blob_spec(0.3, 1_000), 2).unwrap();
        let positives = ds.positive_indices();
        let pu = make_pu_split(&ds, positives.len(), 10, 9).unwrap();
        let mut drawn = pu.positive_idx.clone();
        drawn.sort_unstable();
        assert_eq!(drawn, positives);
    }

    #[test]
    fn pu_split_insufficient_positives() {
        let ds = gen_synthetic(&two_blob_spec(0.05, 1_000), 4).unwrap();
        let available = ds.positive_indices().len();
        assert!(available < 900);
        match make_pu_split(&ds, 900, 10, 0) {
            Err(Error::InsufficientPositives { needed, available: a, .. }) => {
                assert_eq!(needed, 900);
                assert_eq!(a, available);
            }
            other => panic!("expected InsufficientPositives, got {other:?}"),
        }
    }

    #[test]
    fn disjoint_split_has_no_overlap() {
        let ds = gen_synthetic(&two_blob_spec(0.4, 500), 6).unwrap();
        let pu = make_pu_split_disjoint(&ds, 50, 200, 8).unwrap();
        let chosen: std::collections::HashSet<_> = pu.positive_idx.iter().collect();
        assert!(pu.unlabeled_idx.iter().all(|i| !chosen.contains(i)));
        pu.validate_against(&ds).unwrap();
    }

    #[test]
    fn heldout_is_the_complement() {
        let ds = gen_synthetic(&two_blob_spec(0.4, 300), 6).unwrap();
        let pu = make_pu_split(&ds, 20, 100, 1).unwrap();
        let held = heldout_indices(&ds, &pu);
        let mut all: Vec<usize> = held.clone();
        all.extend(&pu.positive_idx);
        all.extend(&pu.unlabeled_idx);
        all.sort_unstable();
        all.dedup();
        assert_eq!(all, (0..ds.len()).collect::<Vec<_>>());
    }

    #[test]
    fn unlabeled_fraction_tracks_prior_over_resamples() {
        let pi = 0.1;
        let ds = gen_synthetic(&two_blob_spec(pi, 40_000), 13).unwrap();
        let mut sum = 0.0;
        for rep in 0..200u64 {
            let pu = make_pu_split(&ds, 10, 4_000, 1_000 + rep).unwrap();
            let pos = pu
                .unlabeled_idx
                .iter()
                .filter(|&&i| ds.y_true[i] == 1)
                .count();
            sum += pos as f64 / 4_000.0;
        }
        let mean = sum / 200.0;
        let tol = 3.0 * (pi * (1.0 - pi) / 4_000.0).sqrt();
        assert!(
            (mean - pi).abs() <= tol,
            "mean unlabeled positive fraction {mean} departs from prior {pi} by more than {tol}"
        );
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = gen_synthetic(&two_blob_spec(0.37, 257), 21).unwrap();
        let mut bytes = Vec::new();
        write_csv(&ds, &mut bytes).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let back = parse_csv(&text, &ds.name, "mem").unwrap();
        assert_eq!(ds.features, back.features);
        assert_eq!(ds.y_true, back.y_true);
        assert_eq!(ds.pi_p_true, back.pi_p_true);
    }

    #[test]
    fn csv_three_rows_empirical_prior() {
        let text = "f0,f1,y\n0.5,1.0,1\n-0.5,0.25,-1\n2.0,3.0,-1\n";
        let ds = parse_csv(text, "t", "mem").unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.pi_p_true, 1.0 / 3.0);
    }

    #[test]
    fn csv_bad_label_cites_line() {
        let text = "# pi_p=0.5\nf0,y\n0.1,1\n0.2,-1\n0.3,2\n";
        match parse_csv(text, "t", "mem") {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 5);
                assert!(msg.contains('2'), "msg: {msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn csv_non_finite_cites_line() {
        let text = "f0,y\nNaN,1\n0.2,-1\n";
        match parse_csv(text, "t", "mem") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn csv_directive_overrides_empirical() {
        let text = "# pi_p=0.25\nf0,y\n0.1,1\n0.2,1\n0.3,-1\n";
        let ds = parse_csv(text, "t", "mem").unwrap();
        assert_eq!(ds.pi_p_true, 0.25);
    }

    #[test]
    fn csv_single_class_without_directive_fails() {
        let text = "f0,y\n0.1,1\n0.2,1\n";
        assert!(parse_csv(text, "t", "mem").is_err());
    }

    #[test]
    fn csv_bad_header_rejected() {
        let text = "a,b,y\n0.1,0.2,1\n0.3,0.4,-1\n";
        assert!(matches!(parse_csv(text, "t", "mem"), Err(Error::Parse { line: 1, .. })));
    }
}
