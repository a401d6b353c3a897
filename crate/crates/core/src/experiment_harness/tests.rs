use super::*;
use crate::entropy_metrics::EntropyReport;
use crate::error::Error;

const LOWER: &str = r#"
model = "burgers"
L = 1.0
M = 0.5
T = 0.015625
delta0 = 1000.0
epsilons = [1.0e-2, 5.0e-3]
seed = 7
"#;

fn lower_config() -> ExperimentConfig {
    ExperimentConfig::from_toml(LOWER).unwrap()
}

fn config_error(text: &str) -> bool {
    matches!(ExperimentConfig::from_toml(text), Err(Error::Config(_)))
}

#[test]
fn config_defaults_and_roundtrip() {
    let cfg = lower_config();
    assert_eq!(cfg.m, 1.0);
    assert_eq!(cfg.cells, 1 << 14);
    assert_eq!(cfg.samples, 10);
    let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn config_validation() {
    assert!(config_error(&format!("{LOWER}\nunknown = 1")));
    assert!(config_error(&LOWER.replace("[1.0e-2, 5.0e-3]", "[5.0e-3, 1.0e-2]")));
    assert!(config_error(&LOWER.replace("[1.0e-2, 5.0e-3]", "[1.0e-2, -1.0]")));
    assert!(config_error(&LOWER.replace("M = 0.5", "M = 1.5")));
    assert!(config_error(&LOWER.replace("T = 0.015625", "T = 0.0")));
    assert!(config_error(&format!("{LOWER}\ncells = 8")));
    assert!(config_error("model = \"nonsense\"\nL = 1.0\nM = 0.1\nT = 1.0"));
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(&path).unwrap();
            cfg.setup().unwrap();
            seen += 1;
        }
    }
    assert_eq!(seen, 5);
}

#[test]
fn epsilon_above_the_window_is_rejected() {
    let cfg = ExperimentConfig::from_toml(&LOWER.replace("[1.0e-2, 5.0e-3]", "[0.5]")).unwrap();
    assert!(matches!(run_lower_bound_experiment(&cfg), Err(Error::EpsilonTooLarge(_))));
}

#[test]
fn lower_run_is_deterministic_and_consistent() {
    let cfg = lower_config();
    let a = run_lower_bound_experiment(&cfg).unwrap();
    let b = run_lower_bound_experiment(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 2);
    for r in &a {
        assert!(r.consistent(), "{r:?}");
        assert!(r.packing.unwrap() >= r.packing_greedy.unwrap());
        assert!(r.lower_bits.unwrap() <= r.upper_bits.unwrap());
    }
}

#[test]
fn report_writes_four_files_reproducibly() {
    let cfg = lower_config();
    let rows = run_lower_bound_experiment(&cfg).unwrap();
    let s = cfg.setup().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    let names = ["entropy.csv", "constants.json", "diagnostics.csv", "slopes.json"];
    report(dir.path(), &rows, &s.constants, None).unwrap();
    let first: Vec<Vec<u8>> = names.iter().map(|n| read(n)).collect();
    report(dir.path(), &rows, &s.constants, None).unwrap();
    let second: Vec<Vec<u8>> = names.iter().map(|n| read(n)).collect();
    assert_eq!(first, second);
    let slopes: serde_json::Value = serde_json::from_slice(&first[3]).unwrap();
    assert_eq!(slopes["points"], 2);

    report(dir.path(), &[], &s.constants, None).unwrap();
    let csv = String::from_utf8(read("entropy.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn loglog_slope_of_a_power_law() {
    let eps: Vec<f64> = (0..8).map(|k| 1e-2 * 0.7f64.powi(k)).collect();
    let y: Vec<f64> = eps.iter().map(|e| 3.0 / e).collect();
    assert!((loglog_slope(&eps, &y).unwrap() - 1.0).abs() < 1e-6);
    let y: Vec<f64> = eps.iter().map(|e| 3.0 / (e * e)).collect();
    assert!((loglog_slope(&eps, &y).unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(loglog_slope(&eps[..1], &y[..1]), None);

    let rows: Vec<EntropyReport> = eps
        .iter()
        .map(|&e| EntropyReport {
            epsilon: e,
            packing: Some(1.0 / e),
            covering: None,
            lower_bits: Some(0.5 / e),
            upper_bits: None,
            variant: "general".into(),
            n: None,
            h: None,
            seed: 0,
            formulas: String::new(),
            packing_greedy: None,
            packing_certified: None,
            subsampled: false,
        })
        .collect();
    let s = slopes(&rows);
    assert_eq!(s.slopes.len(), 2);
    assert!((s.slopes["packing"] - 1.0).abs() < 1e-9);
}

#[test]
fn upper_run_with_no_samples() {
    let text = r#"
model = "burgers"
L = 1.0
M = 0.5
m = 0.5
T = 1.0
epsilons = [0.1]
variant = "scalar"
cells = 256
samples = 0
"#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    let rows = run_upper_bound_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].covering, None);
    assert!(rows[0].upper_bits.unwrap() > 0.0);
}

#[test]
fn upper_run_rejects_the_p_system() {
    let text = "model = \"p_system\"\nL = 1.0\nM = 0.3\nT = 1.0\nepsilons = [0.1]\ncells = 64\nsamples = 2";
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    assert!(matches!(run_upper_bound_experiment(&cfg), Err(Error::Config(_))));
}

#[test]
fn superposition_sampling_is_seeded() {
    let text = "model = \"p_system\"\nL = 0.5\nM = 0.3\nT = 1.0\ncells = 512";
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    let s = cfg.setup().unwrap();
    let a = sample_superposition(&cfg, &s, 4, 3).unwrap();
    let b = sample_superposition(&cfg, &s, 4, 3).unwrap();
    assert_eq!(a.code, b.code);
    assert_eq!(a.phi.data(), b.phi.data());
    assert!(a.phi.sup_norm() <= cfg.big_m);
}
