use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use proptest::prelude::*;

use navdop::catalog::{
    apparent_magnitude, builtin_pulsars, parse_pulsars, selection_stats, write_pulsars, PulsarEntry,
};
use navdop::entry::{
    apriori_entry_info, default_apriori, entry_covariance, entry_information, window_stm, EntrySchedule,
    HyperbolicApproach,
};
use navdop::geometry::{asteroid_position, earth_position, pointing_angle, station_position, SceneConfig};
use navdop::information::{
    dilution, dilution_from_info, info_spectrum, integrate_optical_info, integrate_range_info, pulsar_info_closed_form,
};
use navdop::kinematics::{circular_position, circular_state, stm_between, stm_error_norm, stm_exact, stm_jet};
use navdop::measurements::{
    optical_aggregate_sigma, optical_gradient, optical_partial, pulsar_gradient, pulsar_sigma, range_gradient,
    range_sigma,
};
use navdop::{InfoMatrix4, OrbitConfig, StmMode};

fn psd(i: &InfoMatrix4) -> bool {
    let asym = (i.m - i.m.transpose()).norm() <= 1e-12 * i.m.norm();
    let floor = -1e-10 * i.m.norm();
    asym && info_spectrum(i).eigenvalues.iter().all(|&l| l >= floor)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stm_semigroup(theta0 in 0.0..2.0 * PI, t1 in 0.0..20.0f64, dt in 0.0..20.0f64) {
        let o = OrbitConfig::mars().with_theta0(theta0);
        let t2 = t1 + dt;
        let lhs = stm_exact(&o, t2).m;
        let rhs = stm_between(&o, t2, t1).m * stm_exact(&o, t1).m;
        prop_assert!((lhs - rhs).norm() / lhs.norm() < 1e-9);
    }

    #[test]
    fn stm_unit_determinant(n in 0.0..0.05f64, t in 0.0..30.0f64, theta0 in 0.0..2.0 * PI) {
        let o = OrbitConfig::new(1.2, n).unwrap().with_theta0(theta0);
        prop_assert!((stm_exact(&o, t).m.determinant() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn jet2_error_third_order(n in 1e-4..0.01f64, frac in 0.0..1.0f64) {
        // Between one period and nt = 0.02.
        let o = OrbitConfig::new(1.5, n).unwrap();
        let t = 1.0 + frac * (0.02 / n - 1.0).max(0.0);
        let e = stm_error_norm(&o, t, 2).unwrap();
        prop_assert!(e < 10.0 * (n * t).powi(3), "n {n} t {t} e {e}");
    }

    #[test]
    fn circular_state_norms(theta0 in 0.0..2.0 * PI, t in -50.0..50.0f64, tt in 0.5..3.0f64) {
        let o = OrbitConfig::mars().with_theta0(theta0).with_t_scale(tt).unwrap();
        let x = circular_state(&o, t);
        prop_assert!((Vector2::new(x[0], x[1]).norm() / o.a - 1.0).abs() < 1e-12);
        prop_assert!((Vector2::new(x[2], x[3]).norm() / (o.a * o.n * tt) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn earth_and_station_radii(xi0 in 0.0..2.0 * PI, t in 0.0..30.0f64, k in 0usize..2) {
        let scene = SceneConfig::new(&OrbitConfig::mars(), xi0, 2.7).unwrap();
        let e = earth_position(&scene, t);
        prop_assert!((e.norm() - scene.a_earth).abs() < 1e-12);
        let s = station_position(&scene, k, t).unwrap();
        prop_assert!(((s - e).norm() - scene.r_earth).abs() < 1e-12);
        let d = scene.station_phases[0] - scene.station_phases[1];
        prop_assert!((d.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn pointing_angle_direction_only(theta in 0.0..2.0 * PI, alpha in 0.0..2.0 * PI, k in 0.1..10.0f64) {
        let r = Vector2::new(1.5 * theta.cos(), 1.5 * theta.sin());
        let b = asteroid_position(2.7, alpha);
        let p = pointing_angle(&r, &b).unwrap();
        let q = pointing_angle(&r, &(r + (b - r) * k)).unwrap();
        prop_assert!((p.gamma - q.gamma).abs() < 1e-12);
        // cos gamma = (a_A cos alpha - a cos theta) / distance
        prop_assert!((p.gamma.cos() - (2.7 * alpha.cos() - 1.5 * theta.cos()) / p.distance).abs() < 1e-12);
    }

    #[test]
    fn optical_partial_orthogonal_to_los(theta0 in 0.0..2.0 * PI, alpha in 0.0..2.0 * PI, t in 0.0..5.0f64) {
        let o = OrbitConfig::mars().with_theta0(theta0);
        let r = circular_position(&o, t);
        let p = pointing_angle(&r, &asteroid_position(2.7, alpha)).unwrap();
        let h = optical_partial(p.gamma, p.distance);
        prop_assert!((h[0] * p.gamma.cos() + h[1] * p.gamma.sin()).abs() < 1e-10);
        // At the epoch the full gradient inherits it in both modes.
        for mode in [StmMode::Exact, StmMode::Jet] {
            let g = optical_gradient(&o, &SceneConfig::mars(), alpha, 0.0, mode).unwrap();
            let p0 = pointing_angle(&circular_position(&o, 0.0), &asteroid_position(2.7, alpha)).unwrap();
            prop_assert!(g.position().dot(&p0.unit()).abs() < 1e-10);
        }
    }

    #[test]
    fn pulsar_jet_is_parallel(beta in 0.0..2.0 * PI, t in 0.0..14.0f64, theta0 in 0.0..2.0 * PI) {
        let o = OrbitConfig::mars().with_theta0(theta0);
        let g = pulsar_gradient(&o, beta, t, StmMode::Jet);
        let u = Vector2::new(beta.cos(), beta.sin());
        prop_assert!((g.position() - u).norm() < 1e-12);
        prop_assert!((g.displacement() - u * t).norm() < 1e-12);
    }

    #[test]
    fn range_gradient_unit_at_epoch(xi0 in 0.0..2.0 * PI, k in 0usize..2) {
        let o = OrbitConfig::mars();
        let s = SceneConfig::new(&o, xi0, 2.7).unwrap();
        let g = range_gradient(&o, &s, k, 0.0, StmMode::Exact).unwrap();
        prop_assert!((g.position().norm() - 1.0).abs() < 1e-12);
        let g1 = range_gradient(&o, &s, k, 1.0, StmMode::Exact).unwrap();
        prop_assert!((g1.position().norm() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn noise_power_laws(s in 1.0..1000.0f64, a in 1.0..500.0f64, h in 0.1..48.0f64) {
        let base = pulsar_sigma(s, a, h).unwrap();
        prop_assert!((pulsar_sigma(s, 4.0 * a, h).unwrap() * 2.0 / base - 1.0).abs() < 1e-12);
        prop_assert!((pulsar_sigma(s, a, 4.0 * h).unwrap() * 2.0 / base - 1.0).abs() < 1e-12);
        let r = range_sigma(a * 1e6, h).unwrap();
        prop_assert!((range_sigma(4.0 * a * 1e6, h).unwrap() / (4.0 * r) - 1.0).abs() < 1e-12);
        prop_assert!((range_sigma(a * 1e6, 4.0 * h).unwrap() * 2.0 / r - 1.0).abs() < 1e-12);
        let g = optical_aggregate_sigma(10.0, 0.25, 1.5, h, 1440.0).unwrap();
        prop_assert!((optical_aggregate_sigma(10.0, 0.25, 1.5, 4.0 * h, 1440.0).unwrap() * 2.0 / g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pulsar_pdop_independent_of_beta(b0 in 0.0..2.0 * PI, b1 in 0.0..2.0 * PI, p in 1.0..30.0f64) {
        let d0 = dilution_from_info(&pulsar_info_closed_form(p, b0, 1.0).unwrap(), 1.0).unwrap();
        let d1 = dilution_from_info(&pulsar_info_closed_form(p, b1, 1.0).unwrap(), 1.0).unwrap();
        prop_assert!((d0.pdop - d1.pdop).abs() < 1e-9 * d0.pdop);
        let shifted = pulsar_info_closed_form(p, b0 + PI, 1.0).unwrap();
        prop_assert!((shifted.m - pulsar_info_closed_form(p, b0, 1.0).unwrap().m).norm() < 1e-12);
    }

    #[test]
    fn dilution_invariants(l1 in 0.01..100.0f64, l2 in 0.01..100.0f64, phi in 0.0..PI, s in 0.1..10.0f64) {
        let (sn, cs) = phi.sin_cos();
        let r = Matrix2::new(cs, -sn, sn, cs);
        let p = r * Matrix2::new(l1, 0.0, 0.0, l2) * r.transpose();
        let d = dilution(&p, s).unwrap();
        prop_assert!((d.pdop - d.g_rr.trace().sqrt()).abs() < 1e-12 * d.pdop);
        prop_assert!((d.sigma_xx - s * d.sqrt_gxx()).abs() < 1e-12 * d.sigma_xx);
        prop_assert!(d.rho_xy.abs() <= 1.0);
    }

    #[test]
    fn optical_info_psd_and_scaling(alpha0 in 0.0..2.0 * PI, p in 1.0..3.0f64) {
        let o = OrbitConfig::mars();
        let s = SceneConfig::mars();
        let i = integrate_optical_info(&o, &s, alpha0, p, 1.0, StmMode::Exact).unwrap();
        prop_assert!(psd(&i));
        let j = integrate_optical_info(&o, &s, alpha0, p, 2.0, StmMode::Exact).unwrap();
        prop_assert!((i.m * 0.25 - j.m).norm() < 1e-12 * i.m.norm());
    }

    #[test]
    fn range_info_psd(xi0 in 0.0..2.0 * PI, neptune in any::<bool>()) {
        let (o, a_a) = if neptune { (OrbitConfig::neptune(), 40.0) } else { (OrbitConfig::mars(), 2.7) };
        let s = SceneConfig::new(&o, 0.0, a_a).unwrap();
        let i = integrate_range_info(&o, &s, xi0, 1.0, 1.0, StmMode::Exact).unwrap();
        prop_assert!(psd(&i));
        let j = integrate_range_info(&o, &s, xi0, 1.0, 3.0, StmMode::Exact).unwrap();
        prop_assert!((i.m / 9.0 - j.m).norm() < 1e-12 * i.m.norm());
    }

    #[test]
    fn pulsar_pdop_nonincreasing_in_span(angle in 0.0..2.0 * PI) {
        let v: Vec<f64> = [1.0, 2.0, 7.0, 14.0]
            .iter()
            .map(|&p| dilution_from_info(&pulsar_info_closed_form(p, angle, 1.0).unwrap(), 1.0).unwrap().pdop)
            .collect();
        prop_assert!(v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)), "{v:?}");
        prop_assert!(v.iter().all(|&x| x >= 2f64.sqrt()));
    }
}

fn entry_strategy() -> impl Strategy<Value = PulsarEntry> {
    ("[A-Z][0-9]{4}[+-][0-9]{2}", 0.0..359.9f64, -90.0..90.0f64, prop::option::of(0.1..5000.0f64), prop::option::of(0.01..500.0f64), any::<bool>())
        .prop_map(|(name, ra, dec, s, b, sextant)| PulsarEntry { name, ra_deg: ra, dec_deg: dec, s_tau: s, sigma_beta_mas: b, sextant })
}

proptest! {
    #[test]
    fn catalog_round_trip(entries in prop::collection::vec(entry_strategy(), 0..12)) {
        let mut buf = Vec::new();
        write_pulsars(&entries, &mut buf).unwrap();
        let back = parse_pulsars(buf.as_slice()).unwrap();
        prop_assert_eq!(back, entries);
    }

    #[test]
    fn selection_stats_permutation_invariant(seed in any::<u64>()) {
        let cat = builtin_pulsars();
        let mut sel: Vec<&PulsarEntry> = cat.iter().filter(|p| p.s_tau.is_some() && p.sigma_beta_mas.is_some()).collect();
        let a = selection_stats(&sel).unwrap();
        let len = sel.len();
        for k in 0..len {
            let j = (seed.rotate_left(k as u32) as usize) % len;
            sel.swap(k, j);
        }
        let b = selection_stats(&sel).unwrap();
        prop_assert!((a.mean_s_tau - b.mean_s_tau).abs() < 1e-12 * a.mean_s_tau);
        prop_assert!((a.mean_sigma_beta_mas - b.mean_sigma_beta_mas).abs() < 1e-12 * a.mean_sigma_beta_mas);
        prop_assert_eq!(a.count, b.count);
    }

    #[test]
    fn magnitude_increases_with_distance(h in 0.0..20.0f64, r in 1.0..50.0f64, d in 0.5..50.0f64, k in 1.001..3.0f64) {
        let m = apparent_magnitude(h, r, d).unwrap();
        prop_assert!(apparent_magnitude(h, r * k, d).unwrap() > m);
        prop_assert!(apparent_magnitude(h, r, d * k).unwrap() > m);
    }
}

#[test]
fn entry_information_additivity() {
    let a = HyperbolicApproach::default();
    let i0 = apriori_entry_info(&default_apriori(), &window_stm(&a).unwrap()).unwrap();
    let ip = entry_information(&EntrySchedule::pulsar_default(), &a).unwrap();
    let ic = entry_information(&EntrySchedule::cpf_default(30.0).with_sigma(0.05), &a).unwrap();
    for i in [&i0, &ip, &ic] {
        assert!(psd(i));
    }
    let one = entry_covariance(&i0, &ip).unwrap().p_rr;
    let both = entry_covariance(&i0, &(ip + ic)).unwrap().p_rr;
    let diff = one - both;
    assert!(diff.symmetric_eigenvalues().min() >= -1e-9 * one.norm());
}

#[test]
fn half_metre_pulsars_match_cpf() {
    let a = HyperbolicApproach::default();
    let i0 = apriori_entry_info(&default_apriori(), &window_stm(&a).unwrap()).unwrap();
    let pulsar = EntrySchedule::pulsar_default().with_sigma(5e-4);
    let cpf = EntrySchedule::cpf_default(0.0);
    let rp = entry_covariance(&i0, &entry_information(&pulsar, &a).unwrap()).unwrap();
    let rc = entry_covariance(&i0, &entry_information(&cpf, &a).unwrap()).unwrap();
    let (p, c) = (rp.sigma_xx.max(rp.sigma_yy), rc.sigma_xx.max(rc.sigma_yy));
    assert!(p / c < 3.0 && c / p < 3.0, "pulsar {p} cpf {c}");
}

#[test]
fn stm_error_monotone() {
    for o in [OrbitConfig::mars(), OrbitConfig::neptune()] {
        for order in [1, 2] {
            let e: Vec<f64> = (1..=56).map(|k| stm_error_norm(&o, k as f64 * 0.25, order).unwrap()).collect();
            // Neptune jet-2 errors sit near roundoff for small t.
            assert!(e.windows(2).all(|w| w[1] >= w[0] - 1e-12), "order {order}");
        }
    }
}

#[test]
fn jet_matches_exact_at_epoch() {
    let o = OrbitConfig::mars().with_theta0(0.7);
    for k in 0..=2 {
        assert_eq!(stm_jet(&o, 0.0, k).unwrap().m, stm_exact(&o, 0.0).m);
    }
}

#[test]
fn from_mu_round_trip() {
    let o = OrbitConfig::from_mu(2.9591e-4, 1.5).unwrap();
    assert!((o.n - (2.9591e-4f64 / 3.375).sqrt()).abs() < 1e-12 * o.n);
}

/// Optical PDOP curves flatten toward a constant as the span grows, from both sides.
#[test]
fn optical_pdop_flattens() {
    for (orbit, scene, level) in [(OrbitConfig::mars(), SceneConfig::mars(), 6.0), (OrbitConfig::neptune(), SceneConfig::neptune(), 3.5)] {
        let spread = |p: f64| {
            let v: Vec<f64> = (0..36)
                .map(|k| {
                    let i = integrate_optical_info(&orbit, &scene, k as f64 * PI / 18.0, p, 1.0, StmMode::Exact).unwrap();
                    dilution_from_info(&i, 1.0).unwrap().pdop
                })
                .collect();
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(0.0, f64::max);
            (lo, hi)
        };
        let (lo1, hi1) = spread(1.0);
        let (lo14, hi14) = spread(14.0);
        assert!(hi14 - lo14 < 0.2 * (hi1 - lo1), "p=1 [{lo1}, {hi1}], p=14 [{lo14}, {hi14}]");
        assert!((lo14 - level).abs() < 0.6 && (hi14 - level).abs() < 0.6, "p=14 [{lo14}, {hi14}]");
    }
}
