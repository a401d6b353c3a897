use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of an entropy experiment.
///
/// `packing` and `covering` are `log₂` of the counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub epsilon: f64,
    /// `log₂` of the packing count at radius `2ε`.
    pub packing: Option<f64>,
    /// `log₂` of the greedy covering count at radius `ε`.
    pub covering: Option<f64>,
    pub lower_bits: Option<f64>,
    pub upper_bits: Option<f64>,
    pub variant: String,
    pub n: Option<usize>,
    pub h: Option<f64>,
    pub seed: u64,
    /// Names of the closed forms used, `+`-separated.
    pub formulas: String,
    /// `log₂` of the greedy packing on the (possibly subsampled) ensemble.
    pub packing_greedy: Option<f64>,
    /// Counting certificate `log₂(2^{nN}/B(2ε))`.
    pub packing_certified: Option<f64>,
    /// The greedy packing ran on a subsample, so it only bounds the packing number from below.
    pub subsampled: bool,
}

pub const ENTROPY_HEADER: [&str; 13] = [
    "epsilon",
    "packing",
    "covering",
    "lower_bits",
    "upper_bits",
    "variant",
    "n",
    "h",
    "seed",
    "formulas",
    "packing_greedy",
    "packing_certified",
    "subsampled",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl EntropyReport {
    /// `lower_bits ≤ packing` and `covering ≤ upper_bits`, where both sides are present.
    pub fn consistent(&self) -> bool {
        let low = match (self.lower_bits, self.packing) {
            (Some(l), Some(p)) => l <= p,
            _ => true,
        };
        let up = match (self.covering, self.upper_bits) {
            (Some(c), Some(u)) => c <= u,
            _ => true,
        };
        low && up
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.epsilon.to_string(),
            opt(&self.packing),
            opt(&self.covering),
            opt(&self.lower_bits),
            opt(&self.upper_bits),
            self.variant.clone(),
            opt(&self.n),
            opt(&self.h),
            self.seed.to_string(),
            self.formulas.clone(),
            opt(&self.packing_greedy),
            opt(&self.packing_certified),
            self.subsampled.to_string(),
        ]
    }
}

/// Writes the rows as CSV; an empty slice yields the header alone.
pub fn write_entropy_csv(path: &Path, rows: &[EntropyReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e))?;
    w.write_record(ENTROPY_HEADER).map_err(|e| Error::io(path, e))?;
    for r in rows {
        w.write_record(r.record()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
