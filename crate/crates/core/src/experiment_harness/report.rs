use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entropy_metrics::{fit_slope, write_entropy_csv, EntropyReport};
use crate::error::{Error, Result};
use crate::system_model::ConstantsRecord;
use crate::wave_lab::EvolutionDiagnostics;

/// Log-log slopes of each bit column against `1/ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub points: usize,
    /// Column name to slope of `log₂(bits)` against `log₂(1/ε)`; `1` means `Θ(1/ε)`.
    pub slopes: BTreeMap<String, f64>,
}

/// Slope of `log₂ y` against `log₂(1/ε)` over the rows where `y > 0`.
pub fn loglog_slope(eps: &[f64], y: &[f64]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        eps.iter().zip(y).filter(|(e, v)| **e > 0.0 && **v > 0.0).map(|(e, v)| (-e.log2(), v.log2())).unzip();
    fit_slope(&xs, &ys)
}

pub fn slopes(rows: &[EntropyReport]) -> Slopes {
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let mut out = BTreeMap::new();
    let columns: [(&str, fn(&EntropyReport) -> Option<f64>); 4] = [
        ("packing", |r| r.packing),
        ("covering", |r| r.covering),
        ("lower_bits", |r| r.lower_bits),
        ("upper_bits", |r| r.upper_bits),
    ];
    for (name, get) in columns {
        let vals: Vec<Option<f64>> = rows.iter().map(get).collect();
        if vals.iter().all(Option::is_some) {
            let ys: Vec<f64> = vals.into_iter().flatten().collect();
            if let Some(s) = loglog_slope(&eps, &ys) {
                out.insert(name.to_string(), s);
            }
        }
    }
    Slopes { points: rows.len(), slopes: out }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `entropy.csv`, `constants.json`, `diagnostics.csv` and `slopes.json` into `dir`.
pub fn report(dir: &Path, rows: &[EntropyReport], constants: &ConstantsRecord, diagnostics: Option<&EvolutionDiagnostics>) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_entropy_csv(&dir.join("entropy.csv"), rows)?;
    write_text(&dir.join("constants.json"), &constants.to_json())?;
    let diag_path = dir.join("diagnostics.csv");
    match diagnostics {
        Some(d) => d.write_csv(&diag_path)?,
        None => EvolutionDiagnostics { samples: vec![], interaction_start: 0.0, measured_d: 0.0, measured_b: 0.0, richardson_l1: None }
            .write_csv(&diag_path)?,
    }
    let s = serde_json::to_string_pretty(&slopes(rows)).expect("slopes serialize");
    write_text(&dir.join("slopes.json"), &s)
}
