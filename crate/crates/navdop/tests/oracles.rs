//! Independent oracles: nonlinear propagation, finite differences, full inversion and
//! characteristic polynomials.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use proptest::prelude::*;

use navdop::entry::{hyperbolic_stm, HyperbolicApproach};
use navdop::geometry::{asteroid_position, pointing_angle, slant_range, station_position, SceneConfig};
use navdop::information::{
    accumulate_discrete, info_spectrum, integrate_optical_info, integrate_pulsar_info, optical_rr_closed_form,
    position_covariance, pulsar_info_closed_form,
};
use navdop::kinematics::{circular_state, stm_exact};
use navdop::measurements::{optical_gradient, pulsar_gradient, range_gradient};
use navdop::{InfoMatrix4, OrbitConfig, StmMode};

/// Two-body flow in `[r; T v]` coordinates by fixed-step RK4.
fn flow(orbit: &OrbitConfig, x0: Vector4<f64>, t: f64) -> Vector4<f64> {
    let mu = orbit.mu();
    let tt = orbit.t_scale;
    let f = |x: &Vector4<f64>| {
        let r = Vector2::new(x[0], x[1]);
        let a = -mu * r / r.norm().powi(3);
        Vector4::new(x[2] / tt, x[3] / tt, tt * a.x, tt * a.y)
    };
    let steps = ((t.abs() * 200.0).ceil() as usize).max(20);
    let h = t / steps as f64;
    let mut x = x0;
    for _ in 0..steps {
        let k1 = f(&x);
        let k2 = f(&(x + k1 * (h / 2.0)));
        let k3 = f(&(x + k2 * (h / 2.0)));
        let k4 = f(&(x + k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    x
}

/// Central-difference gradient of `m(x(t))` with respect to the initial state.
fn fd_gradient<F: Fn(&Vector4<f64>) -> f64>(orbit: &OrbitConfig, t: f64, step: f64, m: F) -> Vector4<f64> {
    let x0 = circular_state(orbit, 0.0);
    Vector4::from_fn(|k, _| {
        let mut dx = Vector4::zeros();
        dx[k] = step;
        (m(&flow(orbit, x0 + dx, t)) - m(&flow(orbit, x0 - dx, t))) / (2.0 * step)
    })
}

fn rel(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn stm_matches_flow_jacobian() {
    for (orbit, t) in [(OrbitConfig::mars(), 1.0), (OrbitConfig::mars().with_theta0(1.1), 14.0), (OrbitConfig::new(1.0, 0.3).unwrap(), 5.0)] {
        let x0 = circular_state(&orbit, 0.0);
        let step = 1e-6;
        let mut fd = Matrix4::zeros();
        for k in 0..4 {
            let mut dx = Vector4::zeros();
            dx[k] = step;
            let col = (flow(&orbit, x0 + dx, t) - flow(&orbit, x0 - dx, t)) / (2.0 * step);
            fd.set_column(k, &col);
        }
        let phi = stm_exact(&orbit, t).m;
        assert!((phi - fd).norm() / phi.norm() < 1e-6, "t = {t}: {}", (phi - fd).norm() / phi.norm());
    }
}

#[test]
fn reference_orbit_is_a_solution() {
    let o = OrbitConfig::mars().with_theta0(0.4);
    let x = flow(&o, circular_state(&o, 0.0), 10.0);
    assert_relative_eq!(x, circular_state(&o, 10.0), max_relative = 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn optical_gradient_fd(theta0 in 0.0..2.0 * PI, alpha in 0.0..2.0 * PI, t in 0.0..3.0f64, neptune in any::<bool>()) {
        let (orbit, scene) = if neptune {
            (OrbitConfig::neptune().with_theta0(theta0), SceneConfig::neptune())
        } else {
            (OrbitConfig::mars().with_theta0(theta0), SceneConfig::mars())
        };
        let beacon = asteroid_position(scene.asteroid_mean_dist, alpha);
        let h = optical_gradient(&orbit, &scene, alpha, t, StmMode::Exact).unwrap().h;
        let fd = fd_gradient(&orbit, t, 1e-6 * orbit.a, |x| pointing_angle(&Vector2::new(x[0], x[1]), &beacon).unwrap().gamma);
        prop_assert!(rel(&h, &fd) < 1e-5, "rel {}", rel(&h, &fd));
    }

    #[test]
    fn pulsar_gradient_fd(theta0 in 0.0..2.0 * PI, beta in 0.0..2.0 * PI, t in 0.0..14.0f64) {
        let orbit = OrbitConfig::mars().with_theta0(theta0);
        let u = Vector2::new(beta.cos(), beta.sin());
        let h = pulsar_gradient(&orbit, beta, t, StmMode::Exact).h;
        let fd = fd_gradient(&orbit, t, 1e-5, |x| u.dot(&Vector2::new(x[0], x[1])));
        prop_assert!(rel(&h, &fd) < 1e-6, "rel {}", rel(&h, &fd));
    }

    #[test]
    fn range_gradient_fd(xi0 in 0.0..2.0 * PI, t in 0.0..1.0f64, station in 0usize..2) {
        let orbit = OrbitConfig::mars();
        let scene = SceneConfig::new(&orbit, xi0, 2.7).unwrap();
        let g = station_position(&scene, station, t).unwrap();
        let h = range_gradient(&orbit, &scene, station, t, StmMode::Exact).unwrap().h;
        let fd = fd_gradient(&orbit, t, 1e-5, |x| slant_range(&Vector2::new(x[0], x[1]), &g));
        prop_assert!(rel(&h, &fd) < 1e-4, "rel {}", rel(&h, &fd));
    }

    #[test]
    fn eigenvalues_are_polynomial_roots(entries in prop::collection::vec(-2.0..2.0f64, 16)) {
        let b = Matrix4::from_column_slice(&entries);
        let a = (b + b.transpose()) * 0.5;
        let s = info_spectrum(&InfoMatrix4::new(a));
        let scale = a.norm().max(1e-3);
        for &l in s.eigenvalues.iter() {
            let det = (a - Matrix4::identity() * l).determinant();
            prop_assert!(det.abs() / scale.powi(4) < 1e-9);
        }
        prop_assert!(s.eigenvalues.iter().zip(s.eigenvalues.iter().skip(1)).all(|(x, y)| x <= y));
        prop_assert!((s.eigenvalues.sum() - a.trace()).abs() < 1e-12 * scale * 4.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn schur_matches_full_inverse(entries in prop::collection::vec(-1.0..1.0f64, 16), shift in 1e-3..1.0f64) {
        let b = Matrix4::from_column_slice(&entries);
        let a = b * b.transpose() + Matrix4::identity() * shift;
        let full = a.try_inverse().unwrap();
        let p = position_covariance(&InfoMatrix4::new(a)).unwrap();
        let want = full.fixed_view::<2, 2>(0, 0).into_owned();
        prop_assert!((p - want).norm() / want.norm() < 1e-10);
    }
}

#[test]
fn optical_closed_form_matches_quadrature() {
    // Frozen spacecraft, so the scan sees the whole belt from one point.
    for (a, aa) in [(1.5, 2.7), (30.0, 40.0), (30.0, 2.7)] {
        let orbit = OrbitConfig::new(a, 0.0).unwrap();
        let scene = SceneConfig::new(&orbit, 0.0, aa).unwrap();
        let q = integrate_optical_info(&orbit, &scene, 0.3, 1.0, 1.0, StmMode::Exact).unwrap();
        let c = optical_rr_closed_form(a, aa).unwrap();
        assert_relative_eq!(q.rr(), c, max_relative = 1e-6, epsilon = 1e-12);
    }
}

#[test]
fn pulsar_closed_form_matches_quadrature() {
    let frozen = OrbitConfig::new(1.5, 0.0).unwrap();
    for p in [1.0, 2.0, 3.7, 14.0] {
        for b in [0.0, 0.9, 4.0] {
            let c = pulsar_info_closed_form(p, b, 3.0).unwrap();
            for orbit in [frozen, OrbitConfig::mars()] {
                let q = integrate_pulsar_info(&orbit, b, p, 3.0, StmMode::Jet).unwrap();
                assert!((q.m - c.m).norm() / c.m.norm() < 1e-8);
            }
        }
    }
}

fn pulsar_sampled(n: usize, p: f64, beta0: f64, midpoint: bool) -> InfoMatrix4 {
    let orbit = OrbitConfig::new(1.5, 0.0).unwrap();
    let total = (n as f64 * p).round() as usize;
    let grads: Vec<_> = (0..total)
        .map(|k| {
            let t = (k as f64 + if midpoint { 0.5 } else { 0.0 }) / n as f64;
            pulsar_gradient(&orbit, beta0 + 2.0 * PI * t, t, StmMode::Exact)
        })
        .collect();
    accumulate_discrete(&grads, &vec![(total as f64).sqrt(); total]).unwrap()
}

#[test]
fn discrete_sum_converges_quadratically() {
    let exact = pulsar_info_closed_form(2.0, 0.7, 1.0).unwrap();
    let errs: Vec<f64> = [6, 12, 24, 48]
        .iter()
        .map(|&n| (pulsar_sampled(n, 2.0, 0.7, true).m - exact.m).norm())
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}, errors {errs:?}");
    }
}

#[test]
fn hourly_pulsar_schedule_close_to_continuous() {
    // 144 samples over one period, left endpoints.
    let exact = pulsar_info_closed_form(1.0, 0.2, 1.0).unwrap();
    let d = pulsar_sampled(144, 1.0, 0.2, false);
    assert!((d.m - exact.m).norm() / exact.m.norm() < 0.02);
}

/// Planar two-body flow in km and km/s.
fn hyperbolic_flow(mu: f64, x0: Vector4<f64>, t: f64) -> Vector4<f64> {
    let f = |x: &Vector4<f64>| {
        let r = Vector2::new(x[0], x[1]);
        let a = -mu * r / r.norm().powi(3);
        Vector4::new(x[2], x[3], a.x, a.y)
    };
    let steps = 20000;
    let h = t / steps as f64;
    let mut x = x0;
    for _ in 0..steps {
        let k1 = f(&x);
        let k2 = f(&(x + k1 * (h / 2.0)));
        let k3 = f(&(x + k2 * (h / 2.0)));
        let k4 = f(&(x + k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    x
}

#[test]
fn hyperbolic_stm_matches_flow_jacobian() {
    let a = HyperbolicApproach::default();
    let x0 = a.entry_state();
    let t = -3600.0;
    let steps = [1e-2, 1e-2, 1e-6, 1e-6];
    let mut fd = Matrix4::zeros();
    for k in 0..4 {
        let mut dx = Vector4::zeros();
        dx[k] = steps[k];
        let col = (hyperbolic_flow(a.mu, x0 + dx, t) - hyperbolic_flow(a.mu, x0 - dx, t)) / (2.0 * steps[k]);
        fd.set_column(k, &col);
    }
    let phi = hyperbolic_stm(&a, t, 0.0).unwrap();
    for k in 0..4 {
        let (c, f) = (phi.column(k), fd.column(k));
        assert!((c - f).norm() / c.norm() < 1e-5, "column {k}: {}", (c - f).norm() / c.norm());
    }
}

#[test]
fn block_diagonal_schur() {
    let rr = Matrix2::new(3.0, 0.5, 0.5, 2.0);
    let mut m = Matrix4::identity() * 7.0;
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&rr);
    let p = position_covariance(&InfoMatrix4::new(m)).unwrap();
    assert_relative_eq!(p, rr.try_inverse().unwrap(), max_relative = 1e-14);
}
