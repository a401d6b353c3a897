use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::system_model::{compute_constants, Burgers, FluxModel, TempleDiagonal};
use crate::wave_lab::{l1_distance, GridFunction, Lab, LabOptions, PiecewiseLinearProfile};

const BURGERS: Burgers = Burgers { d_bar: 10.0 };

fn scalar(x_min: f64, x_max: f64, cells: usize, f: impl Fn(f64) -> f64) -> GridFunction {
    GridFunction::from_fn(x_min, x_max, cells, 1, |x, o| o[0] = f(x)).unwrap()
}

fn temple_lab(kappa: f64, cells: usize) -> Lab {
    let model: Arc<dyn FluxModel> = Arc::new(TempleDiagonal { kappa, d_bar: 0.2 });
    let c = compute_constants(model.as_ref(), 10.0, 1.0, 1.0).unwrap();
    Lab::with_options(model, c, LabOptions { cells, ..LabOptions::default() }).unwrap()
}

fn tooth(h: f64, a: f64, w: f64) -> PiecewiseLinearProfile {
    PiecewiseLinearProfile::new(vec![a, a + 0.5 * w, a + w], vec![0.0, h, 0.0], h.abs(), 2.0 * h.abs() / w).unwrap()
}

#[test]
fn riemann_flux_picks_the_extremum() {
    let crit = [0.0];
    assert_eq!(godunov_flux(&BURGERS, -1.0, 1.0, &crit), 0.0);
    assert_eq!(godunov_flux(&BURGERS, 1.0, -1.0, &crit), 0.5);
    assert_eq!(godunov_flux(&BURGERS, 0.5, 1.0, &crit), 0.125);
    assert_eq!(godunov_flux(&BURGERS, -1.0, -0.5, &crit), 0.125);
}

#[test]
fn burgers_shock_speed() {
    // Unit block on [−1, 0]: the shock sits at t/2 until the rarefaction catches it.
    let u0 = scalar(-2.0, 2.0, 4000, |x| if (-1.0..0.0).contains(&x) { 1.0 } else { 0.0 });
    let u = godunov_scalar(&BURGERS, &u0, 1.0, 4000).unwrap();
    let front = (0..u.nodes()).rev().find(|&j| u.value(j, 0) > 0.5).map(|j| u.x(j)).unwrap();
    assert!((front - 0.5).abs() <= 2.0 * u.dx(), "{front}");
    assert!((u.integral(0) - u0.integral(0)).abs() < 1e-10);
}

#[test]
fn burgers_rarefaction_fan() {
    let u0 = scalar(-1.0, 2.0, 3000, |x| if x >= 0.0 { 1.0 } else { 0.0 });
    let t = 0.8;
    let u = godunov_scalar(&BURGERS, &u0, t, 3000).unwrap();
    for j in 0..u.nodes() {
        let x = u.x(j);
        if x > 0.1 && x < 0.7 {
            assert!((u.value(j, 0) - x / t).abs() < 0.02, "x {x} u {}", u.value(j, 0));
        }
    }
}

#[test]
fn constant_data_is_steady() {
    let u0 = scalar(0.0, 1.0, 100, |_| 0.3);
    let u = godunov_scalar(&BURGERS, &u0, 1.0, 100).unwrap();
    assert!(u.data().iter().all(|&v| (v - 0.3).abs() < 1e-14));
    let cert = &oleinik_check(&u, 1.0, 1.0)[0];
    assert_eq!(cert.quotient, 0.0);
    assert_eq!(cert.margin, 1.0);
    assert!(cert.holds(0.0));
}

#[test]
fn snapshots_validate_input() {
    let u0 = scalar(0.0, 1.0, 10, |_| 0.0);
    assert!(matches!(godunov_snapshots(&BURGERS, &u0, &[1.0, 0.5]), Err(Error::ParameterViolation(_))));
    let two = GridFunction::zeros(0.0, 1.0, 10, 2).unwrap();
    assert!(matches!(godunov_snapshots(&BURGERS, &two, &[1.0]), Err(Error::ShapeMismatch(_))));
}

#[test]
fn rarefaction_meets_the_oleinik_bound() {
    // No sonic point inside the fan.
    let u0 = scalar(-1.0, 3.0, 8000, |x| if x >= 0.0 { 1.5 } else { 0.5 });
    let u = godunov_scalar(&BURGERS, &u0, 1.0, 6000).unwrap();
    let cert = &oleinik_check(&u, 1.0, 1.0)[0];
    assert!(cert.quotient > 0.9 && cert.holds(0.05), "{cert:?}");
    assert!(cert.to_json().contains("\"quotient\""));
}

#[test]
fn linf_bound_for_a_tent() {
    // Tent of height h and slope B = h: ‖v‖₁ = h, bound √(2h²) = h√2.
    let h = 0.5;
    let v = scalar(-2.0, 2.0, 4000, |x| (h - h * x.abs()).max(0.0));
    let (bound, holds) = linf_from_l1_bound(&v, h).unwrap();
    assert!((bound - h * 2f64.sqrt()).abs() < 1e-6);
    assert!(holds);
    assert!(matches!(linf_from_l1_bound(&v, 0.1 * h), Err(Error::PreconditionFailed(_))));
}

#[test]
fn decoupled_temple_matches_simple_waves() {
    let lab = temple_lab(0.0, 2000);
    let p = tooth(0.05, -0.5, 0.5);
    let w0 = GridFunction::from_fn(-1.0, 1.0, 2000, 2, |x, o| {
        o[0] = p.eval(x);
        o[1] = 0.0;
    })
    .unwrap();
    let t = 0.5;
    let (w, _) = diagonal_evolve(&lab, &w0, t).unwrap();
    for j in 0..w.nodes() {
        let exact = lab.simple_wave_eval(0, &p, t, w.x(j)).unwrap();
        assert!((w.value(j, 0) - exact[0]).abs() < 1e-8);
        assert_eq!(w.value(j, 1), 0.0);
    }
}

#[test]
fn zero_data_stays_zero() {
    let lab = temple_lab(0.1, 500);
    let w0 = GridFunction::zeros(-1.0, 1.0, 500, 2).unwrap();
    let (w, _) = diagonal_evolve(&lab, &w0, 1.0).unwrap();
    assert!(w.is_zero());
}

#[test]
fn out_of_box_data_is_rejected() {
    let lab = temple_lab(0.0, 100);
    let w0 = GridFunction::from_fn(-1.0, 1.0, 100, 2, |_, o| o[0] = 0.2).unwrap();
    assert!(matches!(diagonal_evolve(&lab, &w0, 1.0), Err(Error::OutOfDomain { .. })));
    let scalar_model = Burgers { d_bar: 1.0 };
    assert!(RiemannState::new(&scalar_model, w0).is_err());
}

#[test]
fn temple_sup_norms_do_not_grow() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for kappa in [0.0, 0.1, 0.1, 0.1] {
        let lab = temple_lab(kappa, 2000);
        let p: Vec<_> = (0..2)
            .map(|_| tooth(rng.gen_range(-0.03..0.03), rng.gen_range(-0.8..0.0), rng.gen_range(0.4..0.8)))
            .collect();
        let w0 = GridFunction::from_fn(-1.0, 1.0, 2000, 2, |x, o| {
            o[0] = p[0].eval(x);
            o[1] = p[1].eval(x);
        })
        .unwrap();
        let (w, _) = diagonal_evolve(&lab, &w0, 1.0).unwrap();
        for k in 0..2 {
            assert!(w.component_sup(k) <= w0.component_sup(k) * (1.0 + 1e-9));
            if kappa == 0.0 {
                assert!((w.integral(k) - w0.integral(k)).abs() < 1e-7, "{}", w.integral(k) - w0.integral(k));
            }
        }
    }
}

#[test]
fn support_window_limits() {
    let lab = temple_lab(0.0, 400);
    let c = lab.constants();
    let w = GridFunction::zeros(-1.0, 1.0, 400, 2).unwrap();
    let rep = support_and_sup_bounds(c, &w, 0.5, 0.0, 1.0, 1.0);
    assert_eq!(rep.l_t, 0.5);
    assert_eq!(rep.windows, vec![(-1.5, -0.5), (0.5, 1.5)]);
    assert!(rep.holds);
    assert!(rep.supports.iter().all(Option::is_none));
}

#[test]
fn burgers_decay_keeps_its_window() {
    let u0 = scalar(-1.0, 3.0, 4000, |x| if (-0.5..0.5).contains(&x) { 0.4 } else { 0.0 });
    let m = u0.l1_norm();
    let model = Burgers { d_bar: 1.0 };
    let c = compute_constants(&model, 10.0, 0.5, 1.0).unwrap();
    for t in [0.5, 1.0, 2.0] {
        let u = godunov_scalar(&model, &u0, t, 4000).unwrap();
        let rep = support_and_sup_bounds(&c, &u, 0.5, m, t, 1.0);
        assert!(rep.holds, "{rep:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn godunov_is_conservative_and_tvd(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u0 = scalar(-4.0, 4.0, 400, |x| {
            if x.abs() >= 1.0 { 0.0 } else { vals[((x + 1.0) * 4.5) as usize] }
        });
        let u = godunov_scalar(&BURGERS, &u0, 1.0, 400).unwrap();
        prop_assert!((u.integral(0) - u0.integral(0)).abs() < 1e-10);
        prop_assert!(u.total_variation() <= u0.total_variation() + 1e-12);
        prop_assert!(u.sup_norm() <= u0.sup_norm() + 1e-12);
        prop_assert!(l1_distance(&u, &u0).unwrap().is_finite());
    }
}
