use super::*;
use crate::configurations::{canonical_loop, random_rotation};

#[test]
fn antipodal_energy() {
    let (pair, _) = sharp_sphere(2).unwrap();
    for kappa in [0.5, 1.0, 2.0] {
        // One unordered pair at distance 2, counted twice.
        let e = surface_energy(&pair, kappa).unwrap().value;
        assert!((e - (-2.0 * kappa).exp() / (4.0 * PI)).abs() < 1e-16);
    }
}

#[test]
fn energy_rotation_invariant_and_positive() {
    for seed in 0..10 {
        let c = random_config(Setting::Sphere, 9, seed).unwrap();
        let r = c.rotated(&random_rotation(seed + 100)).unwrap();
        let a = surface_energy(&c, 1.3).unwrap().value;
        let b = surface_energy(&r, 1.3).unwrap().value;
        assert!(a > 0.0);
        assert!((a - b).abs() <= 1e-12 * a);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let c = random_config(Setting::Sphere, 6, 3).unwrap();
    let pts = c.positions();
    let (_, g) = energy_and_gradient(0.8, &pts);
    // Derivative along a tangent curve through site 2.
    let p = pts[2];
    let u = {
        let a = [1.0, 0.0, 0.0];
        let t = dot3(&a, &p);
        let v = [a[0] - t * p[0], a[1] - t * p[1], a[2] - t * p[2]];
        let r = crate::configurations::norm3(&v);
        [v[0] / r, v[1] / r, v[2] / r]
    };
    let h = 1e-6;
    let at = |s: f64| {
        let mut q = pts.clone();
        q[2] = [
            p[0] * s.cos() + u[0] * s.sin(),
            p[1] * s.cos() + u[1] * s.sin(),
            p[2] * s.cos() + u[2] * s.sin(),
        ];
        energy_of_points(0.8, &q)
    };
    let fd = (at(h) - at(-h)) / (2.0 * h);
    assert!((fd - dot3(&g[2], &u)).abs() < 1e-8);
}

#[test]
fn gauge_round_trip() {
    for setting in [Setting::Loop, Setting::Circle3, Setting::Sphere] {
        let c = random_config(setting, 7, 11).unwrap();
        let back = from_params(setting, &to_params(&c)).unwrap();
        assert!(is_congruent(&c, &back, 1e-12).unwrap(), "{setting}");
    }
    assert_eq!(to_params(&random_config(Setting::Sphere, 5, 1).unwrap()).len(), 7);
}

#[test]
fn tetrahedron_minimizes_energy() {
    let r = minimize_surface_energy(1.0, 4, &Search::new(5, 1)).unwrap();
    assert!(r.matched_canonical);
    let sharp = r.canonical_value.unwrap();
    assert!((r.best_value - sharp).abs() <= 1e-8 * sharp);
    for v in r.per_start_values() {
        assert!(r.best_value <= v + 1e-12);
    }
}

#[test]
fn loop_maximizer_is_equidistant() {
    let r = maximize_lambda1(Setting::Loop, -1.0, 3, &Search::new(20, 5)).unwrap();
    assert!(r.matched_canonical);
    let a = r.best_config.angles().unwrap();
    let gaps = [a[1] - a[0], a[2] - a[1], a[0] + 2.0 * PI - a[2]];
    let ratio = gaps.iter().cloned().fold(0.0, f64::max) / gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(ratio < 1.0 + 1e-4, "{gaps:?}");
    for v in r.per_start_values() {
        assert!(r.best_value >= v - 1e-12);
    }
}

#[test]
fn planar_square_recovered() {
    let r = maximize_lambda1(Setting::Circle2, 0.0, 4, &Search::new(20, 2)).unwrap();
    assert!(r.matched_canonical);
}

#[test]
fn two_points_end_antipodal() {
    for (setting, alpha) in [
        (Setting::Loop, -1.0),
        (Setting::Loop, 2.0),
        (Setting::Circle2, -1.0),
        (Setting::Circle3, -1.0),
        (Setting::Sphere, -1.0),
    ] {
        let r = maximize_lambda1(setting, alpha, 2, &Search::new(3, 4)).unwrap();
        assert!(r.matched_canonical, "{setting} {alpha}");
    }
}

#[test]
fn supercritical_alpha_rejected() {
    let c = canonical(Setting::Sphere, 4).unwrap();
    let ac = alpha_crit(&c).unwrap();
    assert!(maximize_lambda1(Setting::Sphere, ac + 0.1, 4, &Search::new(1, 0)).is_err());
}

#[test]
fn loop_campaign_has_no_violation() {
    let r = verify_theorem(Setting::Loop, -1.0, 4, 200, 0).unwrap();
    assert_eq!(r.violations, 0);
    assert!(r.min_gap.unwrap() > 0.0);
    assert_eq!(r.samples.len(), 200);
}

#[test]
fn congruent_sample_has_zero_margin() {
    let c = canonical_loop(5).unwrap().rotated_by_angle(0.3).unwrap();
    let r = verify_samples(Setting::Loop, -2.0, 5, 1, 0, |_| Ok(c.clone())).unwrap();
    assert!(r.samples[0].congruent);
    assert!(r.samples[0].margin.unwrap().abs() < 1e-9);
    assert_eq!(r.min_gap, None);
}

#[test]
fn near_critical_sphere_campaign() {
    // α_crit(Y) ≥ α_crit(Ỹ) for every Y, so just below the canonical critical
    // coupling every sample still binds.
    let c = canonical(Setting::Sphere, 4).unwrap();
    let alpha = alpha_crit(&c).unwrap() - 0.02;
    let r = verify_theorem(Setting::Sphere, alpha, 4, 30, 1).unwrap();
    assert_eq!(r.violations, 0);
    assert_eq!(r.no_bound_state, 0);
    assert_eq!(r.nonpositive_margins, 0);
}

#[test]
fn planar_margins_resolved_below_underflow() {
    let r = verify_theorem(Setting::Circle2, -1.0, 3, 20, 4).unwrap();
    assert_eq!(r.violations, 0);
    assert_eq!(r.nonpositive_margins, 0);
    assert!(r.min_log_gap.unwrap().is_finite());
}

#[test]
fn scan_edges() {
    let r = conjecture_scan(3, &[], 10, 0).unwrap();
    assert!(r.rows.is_empty());
    assert!(conjecture_scan(3, &[1.0, -0.5], 10, 0).is_err());
    let r = conjecture_scan(3, &[0.5], 10, 0).unwrap();
    assert_eq!(r.total_violations(), 0);
    assert_eq!(r.to_csv().lines().count(), 2);
}

#[test]
fn reports_are_deterministic() {
    let a = verify_theorem(Setting::Circle2, -1.0, 4, 20, 9).unwrap();
    let b = verify_theorem(Setting::Circle2, -1.0, 4, 20, 9).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let a = minimize_surface_energy(2.0, 3, &Search::new(3, 1)).unwrap();
    let b = minimize_surface_energy(2.0, 3, &Search::new(3, 1)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}
