use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::system_model::{compute_constants, Burgers, FluxModel, PSystem};

fn make_lab(model: Arc<dyn FluxModel>, l: f64, t: f64, cells: usize) -> Lab {
    let c = compute_constants(model.as_ref(), 10.0, l, t).unwrap();
    Lab::with_options(model, c, LabOptions { cells, ..LabOptions::default() }).unwrap()
}

fn burgers_lab(cells: usize) -> Lab {
    make_lab(Arc::new(Burgers { d_bar: 1.0 }), 1.0, 0.25, cells)
}

fn tooth(h: f64, w: f64) -> PiecewiseLinearProfile {
    PiecewiseLinearProfile::new(vec![0.0, 0.5 * w, w], vec![0.0, h, 0.0], h, 2.0 * h / w).unwrap()
}

#[test]
fn sawtooth_follows_the_code() {
    let code = [false, true, true, false, false, false, true, true];
    let (l, h) = (2.0, 0.3);
    let p = sawtooth_profile(8, h, l, &code, -1.0).unwrap();
    for (k, &down) in code.iter().enumerate() {
        let centre = -1.0 + (k as f64 + 0.5) * l / 8.0;
        assert_eq!(p.eval(centre), if down { -h } else { h });
        assert_eq!(p.eval(-1.0 + k as f64 * l / 8.0), 0.0);
    }
    assert!((p.l1_norm() - l * h / 2.0).abs() < 1e-14);
    assert!(p.slopes().all(|s| (s.abs() - 2.0 * h * 8.0 / l).abs() < 1e-12));
    assert!(matches!(sawtooth_profile(4, h, l, &code, 0.0), Err(Error::InvalidCode(_))));
}

#[test]
fn opposite_two_tooth_codes_are_lh_apart() {
    let a = sawtooth_profile(2, 0.4, 1.5, &[false, false], 0.0).unwrap();
    let b = sawtooth_profile(2, 0.4, 1.5, &[true, true], 0.0).unwrap();
    assert!((a.l1_distance(&b) - 1.5 * 0.4).abs() < 1e-14);
}

#[test]
fn tent_area() {
    let (h, w) = (0.7, 0.5);
    let g = GridFunction::from_fn(-1.0, 1.0, 400, 1, |x, o| o[0] = tooth(h, w).eval(x)).unwrap();
    let zero = GridFunction::zeros(-1.0, 1.0, 400, 1).unwrap();
    assert!((l1_distance(&g, &zero).unwrap() - h * w / 2.0).abs() < 1e-14);
    assert_eq!(l1_distance(&g, &g).unwrap(), 0.0);
    let other = GridFunction::zeros(-1.0, 1.0, 200, 1).unwrap();
    assert!(matches!(l1_distance(&g, &other), Err(Error::GridMismatch(_))));
}

#[test]
fn l1_distance_handles_sign_crossings() {
    // f − g changes sign at the middle of the single cell: area 2·(½·½·1).
    let f = GridFunction::from_data(0.0, 1.0, 1, vec![1.0, -1.0]).unwrap();
    let g = GridFunction::zeros(0.0, 1.0, 1, 1).unwrap();
    assert!((l1_distance(&f, &g).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn grid_csv_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let g = GridFunction::from_fn(-1.0, 1.0, 64, 2, |x, o| {
        o[0] = x.sin();
        o[1] = x * x;
    })
    .unwrap();
    g.write_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,u1,u2\n"));
    let back = GridFunction::read_csv(&path).unwrap();
    assert!(back.same_grid(&g));
    assert!(l1_distance(&back, &g).unwrap() < 1e-12);
}

#[test]
fn wave_code_bitstrings() {
    let code = WaveCode::new(4, vec![vec![false, true, true, false], vec![true, true, false, false]]).unwrap();
    let s = code.to_bitstring();
    assert_eq!(WaveCode::from_bitstring(&s).unwrap(), code);
    let other = WaveCode::new(4, vec![vec![true, true, true, false], vec![true, true, false, true]]).unwrap();
    assert_eq!(code.hamming(&other).unwrap(), 2);
}

#[test]
fn layout_offsets() {
    let layout = SupportLayout::new(&[-1.0, 1.0], 0.5, 1.0);
    for i in 0..2 {
        assert_eq!(layout.xi_plus[i], layout.xi_minus[i] + 0.5);
    }
    assert!(layout.disjoint());
    assert!(!SupportLayout::new(&[-1.0, 1.0], 0.5, 0.1).disjoint());
}

#[test]
fn assembly_of_simple_profiles() {
    let lab = burgers_lab(1024);
    let layout = SupportLayout::new(&[0.0], 1.0, 0.25);
    let zero = PiecewiseLinearProfile::zero(layout.xi_minus[0], layout.xi_plus[0]);
    assert!(lab.assemble_phi(&[zero], &layout).unwrap().is_zero());

    let p = sawtooth_profile(4, 0.1, 1.0, &[false, true, false, true], layout.xi_minus[0]).unwrap();
    let phi = lab.assemble_phi(&[p.clone()], &layout).unwrap();
    for j in 0..phi.nodes() {
        assert!((phi.value(j, 0) - p.eval(phi.x(j))).abs() < 1e-12);
    }

    let ps = make_lab(Arc::new(PSystem { d_bar: 0.5 }), 0.5, 1.0, 1024);
    let layout = SupportLayout::new(&ps.constants().lambda0, 0.5, 1.0);
    let t1 = sawtooth_profile(1, 0.05, 0.5, &[false], layout.xi_minus[0]).unwrap();
    let t2 = PiecewiseLinearProfile::zero(layout.xi_minus[1], layout.xi_plus[1]);
    let phi = ps.assemble_phi(&[t1, t2], &layout).unwrap();
    assert!(phi.sup_norm() <= 0.05 + 1e-12);
}

#[test]
fn characteristic_map_examples() {
    let lab = burgers_lab(1024);
    let zero = PiecewiseLinearProfile::zero(-0.5, 0.5);
    assert_eq!(lab.characteristic_map(0, &zero, 0.3, 0.2), 0.2);
    let p = tooth(0.2, 0.4);
    assert!((lab.characteristic_map(0, &p, 0.5, 0.2) - (0.2 + 0.2 * 0.5)).abs() < 1e-12);

    // b = 1 and half the horizon.
    let p = tooth(0.5, 1.0);
    let t = 0.5 / (2.0 * lab.constants().alpha1);
    let ys: Vec<f64> = (0..=2000).map(|k| -0.5 + 2.0 * k as f64 / 2000.0).collect();
    let min_ratio = ys
        .windows(2)
        .map(|w| (lab.characteristic_map(0, &p, t, w[1]) - lab.characteristic_map(0, &p, t, w[0])) / (w[1] - w[0]))
        .fold(f64::INFINITY, f64::min);
    assert!(min_ratio >= 0.5);
}

#[test]
fn burgers_tooth_kinematics() {
    let lab = burgers_lab(1024);
    let (h, w) = (0.25, 1.0);
    let p = tooth(h, w);
    let b = 2.0 * h / w;
    assert!((lab.simple_wave_eval(0, &p, 0.0, 0.3).unwrap()[0] - p.eval(0.3)).abs() < 1e-10);
    let t = 0.5 / b;
    let dx = 1e-4;
    let (mut fwd, mut bwd) = (0.0f64, 0.0f64);
    for k in 0..20000 {
        let x = -0.5 + k as f64 * dx;
        let a = lab.simple_wave_eval(0, &p, t, x).unwrap()[0];
        let c = lab.simple_wave_eval(0, &p, t, x + dx).unwrap()[0];
        fwd = fwd.max((c - a) / dx);
        bwd = bwd.max((a - c) / dx);
    }
    assert!((fwd - b / 1.5).abs() < 1e-6, "{fwd}");
    assert!((bwd - 2.0 * b).abs() < 1e-6, "{bwd}");
    assert!(matches!(lab.simple_wave_eval(0, &p, 1.01 * t, 0.0), Err(Error::HorizonExceeded { .. })));
}

#[test]
fn burgers_simple_waves_conserve_mass() {
    let lab = burgers_lab(1024);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let n = rng.gen_range(1..=5);
        let code: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let p = sawtooth_profile(n, rng.gen_range(0.05..0.3), 1.0, &code, -0.5).unwrap();
        let t = 0.9 * lab.horizon(p.max_slope());
        let cells = 20000;
        let dx = 3.0 / cells as f64;
        let mass: f64 = (0..=cells)
            .map(|k| {
                let x = -1.5 + k as f64 * dx;
                let wgt = if k == 0 || k == cells { 0.5 } else { 1.0 };
                wgt * lab.simple_wave_eval(0, &p, t, x).unwrap()[0]
            })
            .sum::<f64>()
            * dx;
        assert!((mass - p.integral()).abs() < 1e-6 * p.l1_norm(), "{mass} vs {}", p.integral());
    }
}

#[test]
fn evolution_of_zero_data_is_zero() {
    let ps = make_lab(Arc::new(PSystem { d_bar: 0.5 }), 0.5, 1.0, 512);
    let layout = SupportLayout::new(&ps.constants().lambda0, 0.5, 1.0);
    let zeros: Vec<_> = (0..2).map(|i| PiecewiseLinearProfile::zero(layout.xi_minus[i], layout.xi_plus[i])).collect();
    let phi = ps.assemble_phi(&zeros, &layout).unwrap();
    let (u, diag) = ps.evolve_superposition(&phi, &layout).unwrap();
    assert!(u.is_zero());
    assert!(diag.samples.iter().all(|s| s.p == 0.0 && s.q == 0.0 && s.sup_u == 0.0));
}

#[test]
fn burgers_evolution_is_the_simple_wave() {
    let lab = burgers_lab(4096);
    let layout = SupportLayout::new(&[0.0], 1.0, 0.25);
    let fb = forward_bounds(lab.constants(), 1.0, 0.25);
    let b = 0.9 * fb.b_max;
    let n = 3;
    let p = sawtooth_profile(n, b / (2.0 * n as f64), 1.0, &[false, true, false], layout.xi_minus[0]).unwrap();
    let phi = lab.assemble_phi(&[p.clone()], &layout).unwrap();
    let (u, diag) = lab.evolve_superposition(&phi, &layout).unwrap();
    let mut worst = 0.0f64;
    for k in 0..=1000 {
        let x = -1.0 + 2.0 * k as f64 / 1000.0;
        let exact = lab.simple_wave_eval(0, &p, 0.25, x).unwrap()[0];
        let got = if x < u.x_min() || x > u.x_max() { 0.0 } else { u.eval(x)[0] };
        worst = worst.max((exact - got).abs());
    }
    assert!(worst < 2.0 * b * u.dx(), "{worst}");
    assert!(diag.integral_drift() < 1e-12);
}

#[test]
fn p_system_superposition_respects_support_and_mass() {
    let ps = make_lab(Arc::new(PSystem { d_bar: 0.5 }), 0.5, 1.0, 4096);
    let c = ps.constants().clone();
    let layout = SupportLayout::new(&c.lambda0, 0.5, 1.0);
    let fb = forward_bounds(&c, 0.5, 1.0);
    let b = 0.9 * fb.b_max;
    let h = fb.d_max.min(0.5 * b / 4.0);
    let profiles: Vec<_> = (0..2)
        .map(|i| sawtooth_profile(2, h, 0.5, &[i == 0, true], layout.xi_minus[i]).unwrap())
        .collect();
    let phi = ps.assemble_phi(&profiles, &layout).unwrap();
    let (u, diag) = ps.evolve_superposition(&phi, &layout).unwrap();
    let (a, z) = u.support(1e-12).unwrap();
    let bound = 0.5 * (1.0 + c.alpha5);
    assert!(a >= -bound - 2.0 * u.dx() && z <= bound + 2.0 * u.dx());
    assert!(diag.integral_drift() < 1e-6);
    assert!(diag.max_q() <= 2.0 * diag.q0());
}

#[test]
fn superposition_rejects_inadmissible_slopes() {
    let lab = burgers_lab(512);
    let layout = SupportLayout::new(&[0.0], 1.0, 0.25);
    let b = 4.0 * forward_bounds(lab.constants(), 1.0, 0.25).b_max;
    let n = (b / 0.4).ceil() as usize;
    let p = sawtooth_profile(n, 0.2, 1.0, &vec![false; n], layout.xi_minus[0]).unwrap();
    assert!(p.max_slope() >= b);
    let phi = lab.assemble_phi(&[p], &layout).unwrap();
    assert!(matches!(lab.evolve_superposition(&phi, &layout), Err(Error::ParameterViolation(_))));
}

#[test]
fn backward_generation_of_zero_is_zero() {
    let lab = burgers_lab(512);
    let params = ControlParams { l: 1.0, m: 1.0, big_m: 0.5, delta0: 10.0 };
    let bb = backward_bounds(lab.constants(), &params, 0.25);
    let layout = SupportLayout::new(&[0.0], bb.l_tilde, 0.25);
    let psi = GridFunction::zeros(layout.xi_minus[0], layout.xi_plus[0], 512, 1).unwrap();
    let res = lab.backward_generate(&psi, &layout, &params, 0.5 * bb.h_max, 0.5 * bb.b_max).unwrap();
    assert!(res.u_bar.is_zero());
    assert_eq!(res.checks.tv, 0.0);
}

proptest! {
    #[test]
    fn sawtooth_lies_in_its_profile_class(
        n in 1usize..40,
        h in 0.01f64..2.0,
        l in 0.1f64..5.0,
        seed in any::<u64>(),
        xi in -3.0f64..3.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let p = sawtooth_profile(n, h, l, &code, xi).unwrap();
        let b = 2.0 * h * n as f64 / l;
        prop_assert!(p.max_abs() <= h);
        prop_assert!(p.slopes().all(|s| (s.abs() - b).abs() <= 1e-9 * b));
        let (a, z) = p.support();
        prop_assert!((a - xi).abs() < 1e-12 && (z - xi - l).abs() < 1e-9 * l.max(1.0));
        prop_assert_eq!(p.values()[0], 0.0);
        prop_assert_eq!(*p.values().last().unwrap(), 0.0);
        prop_assert!((p.l1_norm() - l * h / 2.0).abs() < 1e-9 * l * h);
    }

    #[test]
    fn grid_distance_is_a_metric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let v: Vec<f64> = (0..33).map(|_| rng.gen_range(-1.0..1.0)).collect();
            GridFunction::from_data(0.0, 1.0 / 32.0, 1, v).unwrap()
        };
        let (f, g, k) = (draw(), draw(), draw());
        let d = |a: &GridFunction, b: &GridFunction| l1_distance(a, b).unwrap();
        prop_assert!((d(&f, &g) - d(&g, &f)).abs() < 1e-15);
        prop_assert!(d(&f, &k) <= d(&f, &g) + d(&g, &k) + 1e-12);
    }
}
