use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn analytic_fixtures() -> Vec<RadialProfile<f64>> {
    vec![
        make_keplerian(1.0, 1.0, 2.0, 0.05).unwrap(),
        make_powerlaw(1.0, 1.0, 2.0, 1.0, 2.0, 0.3).unwrap(),
        make_powerlaw(1.3, -0.3, 1.0, 1.0, 2.0, 0.3).unwrap(),
        make_twoterm(1.0, 1.0, 1.0, 2.0, 0.1).unwrap(),
        make_offset_power(-0.175, 8.0, -4.0, 1.0, 2.0, 0.1).unwrap(),
        make_keplerian(1.0, 0.5, 3.0, 0.2)
            .unwrap()
            .with_field(FieldShape::Gaussian { amp: 0.4, center: 1.5, width: 0.3 })
            .unwrap(),
    ]
}

#[test]
fn keplerian_closed_forms() {
    let p = make_keplerian(1.0, 1.0, 2.0, 0.1).unwrap();
    assert_eq!(p.omega(1.0), 1.0);
    for &r in &[1.0, 1.3, 1.77, 2.0] {
        assert!(rel(p.eval_rayleigh(r), 1.0 / (r * r * r)) < 1e-14);
        assert!(rel(p.domega2(r), -3.0 / r.powi(4)) < 1e-14);
        assert!(rel(p.eval_f(r).unwrap(), -300.0 / r.powi(5)) < 1e-13);
    }
    let s = p.check_signs(50);
    assert_eq!((s.domega2_sign, s.upsilon_sign), (Sign::Negative, Sign::Positive));
}

#[test]
fn keplerian_rejects_bad_parameters() {
    assert!(matches!(make_keplerian(0.0, 1.0, 2.0, 0.1), Err(Error::InvalidProfile(_))));
    assert!(matches!(make_keplerian(-1.0, 1.0, 2.0, 0.1), Err(Error::InvalidProfile(_))));
    assert!(matches!(make_keplerian(1.0, 2.0, 2.0, 0.1), Err(Error::InvalidProfile(_))));
    assert!(matches!(make_keplerian(1.0, 0.0, 2.0, 0.1), Err(Error::InvalidProfile(_))));
}

#[test]
fn powerlaw_cases() {
    let rigid = make_powerlaw(1.0, 0.0, 3.7, 1.0, 2.0, 1.0).unwrap();
    for &r in &[1.0, 1.5, 2.0] {
        assert_eq!(rigid.omega(r), 1.0);
        assert_eq!(rigid.domega2(r), 0.0);
        assert_eq!(rigid.eval_rayleigh(r), 4.0);
    }
    let s = rigid.check_signs(40);
    assert_eq!((s.domega2_sign, s.upsilon_sign), (Sign::Positive, Sign::Positive));

    let p = make_powerlaw(1.0, 1.0, 2.0, 1.0, 2.0, 1.0).unwrap();
    assert!(rel(p.domega2(1.0), 2.0) < 1e-15);

    let q = make_powerlaw(1.0, -0.3, 1.0, 1.0, 2.0, 1.0).unwrap();
    assert!(rel(q.domega2(1.4), -0.3) < 1e-15);
    assert_eq!(q.check_signs(30).domega2_sign, Sign::Negative);

    assert!(matches!(make_powerlaw(1.0, -1.0, 1.0, 1.0, 2.0, 1.0), Err(Error::InvalidProfile(_))));
}

#[test]
fn powerlaw_rayleigh_root_matches_closed_form() {
    // Υ = ω₀²(4 + β(γ+4)r^γ); with β = −0.05, γ = 4 the root is r = 10^{1/4}.
    let p = make_powerlaw(1.0, -0.05, 4.0, 1.0, 2.0, 1.0).unwrap();
    assert_eq!(p.check_signs(100).upsilon_sign, Sign::Mixed);
    let (mut a, mut b) = (1.0, 2.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if p.eval_rayleigh(a) * p.eval_rayleigh(m) <= 0.0 {
            b = m
        } else {
            a = m
        }
    }
    assert!(rel(0.5 * (a + b), 10f64.powf(0.25)) < 1e-12);
}

#[test]
fn twoterm_cases() {
    let p = make_twoterm(1.0, 0.0, 1.0, 2.0, 1.0).unwrap();
    assert!(rel(p.omega2(1.7), 1.7) < 1e-15);
    assert!(rel(p.domega2(1.7), 1.0) < 1e-15);
    let q = make_twoterm(0.0, 1.0, 1.0, 2.0, 1.0).unwrap();
    for &r in &[1.0, 1.25, 2.0] {
        assert!(rel(q.eval_rayleigh(r), 3.0 / r) < 1e-14);
        assert!(q.domega2(r) < 0.0);
    }
    let mixed = make_twoterm(1.0, 2.0, 1.0, 2.0, 1.0).unwrap();
    assert_eq!(mixed.check_signs(64).domega2_sign, Sign::Mixed);
}

#[test]
fn stored_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in analytic_fixtures() {
        for _ in 0..100 {
            let r = p.r1 + (p.r2 - p.r1) * rng.gen_range(0.02..0.98);
            let h = 1e-5 * r;
            let fd_w2 = (p.omega2(r + h) - p.omega2(r - h)) / (2.0 * h);
            let scale_w2 = p.domega2(r).abs().max(1e-3 * p.omega2(r).abs() / r);
            assert!((fd_w2 - p.domega2(r)).abs() <= 1e-6 * scale_w2, "{:?} r={r}", p.kind);
            let fd_b = (p.b(r + h) - p.b(r - h)) / (2.0 * h);
            let fd_bb = (p.db(r + h) - p.db(r - h)) / (2.0 * h);
            assert!((fd_b - p.db(r)).abs() <= 1e-6 * (p.db(r).abs() + 1e-3 * p.b(r)));
            assert!((fd_bb - p.d2b(r)).abs() <= 1e-6 * (p.d2b(r).abs() + 1e-3 * p.b(r)));
            let fd_w = (p.omega(r + h) - p.omega(r - h)) / (2.0 * h);
            assert!((fd_w - p.domega(r)).abs() <= 1e-6 * (p.domega(r).abs() + 1e-3 * p.omega(r).abs()));
        }
    }
}

#[test]
fn rayleigh_paths_agree() {
    for p in analytic_fixtures() {
        for i in 0..=50 {
            let r = p.r1 + (p.r2 - p.r1) * i as f64 / 50.0;
            let a = p.eval_rayleigh(r);
            let b = p.eval_rayleigh_from_angular_momentum(r);
            let scale = (r * p.domega2(r)).abs() + 4.0 * p.omega2(r).abs();
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn positive_shear_implies_rayleigh_stability() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let beta = rng.gen_range(0.0..2.0);
        let gamma = rng.gen_range(0.1..4.0);
        let p = make_powerlaw(rng.gen_range(0.2..3.0), beta, gamma, 1.0, 2.5, 1.0).unwrap();
        let s = p.check_signs(80);
        assert_eq!(s.domega2_sign, Sign::Positive);
        assert_eq!(s.upsilon_sign, Sign::Positive);
    }
}

#[test]
fn zero_eps_is_rejected_by_name() {
    let p = make_keplerian(1.0, 1.0, 2.0, 0.0).unwrap();
    let e = p.eval_f(1.5).unwrap_err();
    assert!(matches!(e, Error::ZeroEps(_)));
    assert!(e.to_string().contains('ε'));
}

#[test]
fn constant_b_reduces_f() {
    let p = make_twoterm(1.0, 1.0, 1.0, 2.0, 0.3).unwrap();
    for &r in &[1.1, 1.5, 1.9] {
        assert_eq!(p.eval_f(r).unwrap(), p.domega2(r) / (0.09 * r));
    }
}

#[test]
fn joint_scaling_leaves_f_invariant() {
    let p = make_keplerian(1.0, 1.0, 2.0, 0.05).unwrap();
    let q = p.with_omega_scaled(3.0).with_eps(0.15);
    for &r in &[1.1, 1.5, 1.9] {
        assert!(rel(q.eval_f(r).unwrap(), p.eval_f(r).unwrap()) < 1e-13);
    }
}

fn keplerian_table(n: usize) -> Vec<(f64, f64, f64)> {
    (0..n).map(|i| 1.0 + i as f64 / (n - 1) as f64).map(|r| (r, r.powf(-1.5), 1.0)).collect()
}

#[test]
fn tabulated_keplerian_matches_analytic_f() {
    let t = make_tabulated(&keplerian_table(401), 0.1).unwrap();
    let a = make_keplerian(1.0, 1.0, 2.0, 0.1).unwrap();
    for i in 1..200 {
        let r = 1.0 + i as f64 / 200.0 + 1.3e-3;
        let r = r.min(1.999);
        assert!(rel(t.eval_f(r).unwrap(), a.eval_f(r).unwrap()) < 1e-4, "r={r}");
    }
}

#[test]
fn tabulated_preconditions() {
    let two = vec![(1.0, 1.0, 1.0), (2.0, 0.5, 1.0)];
    assert!(matches!(make_tabulated(&two, 0.1), Err(Error::InvalidProfile(_))));
    let mut zero_b = keplerian_table(10);
    zero_b[4].2 = 0.0;
    assert!(matches!(make_tabulated(&zero_b, 0.1), Err(Error::InvalidProfile(_))));
    let mut swapped = keplerian_table(10);
    swapped.swap(3, 4);
    assert!(matches!(make_tabulated(&swapped, 0.1), Err(Error::InvalidProfile(_))));
}

#[test]
fn gaussian_field_must_stay_positive() {
    let p = make_keplerian(1.0, 1.0, 2.0, 0.1).unwrap();
    assert!(p.with_field(FieldShape::Gaussian { amp: -1.2, center: 1.5, width: 0.1 }).is_err());
    assert!(p.with_field(FieldShape::Gaussian { amp: -0.9, center: 1.5, width: 0.1 }).is_ok());
}

#[test]
fn single_precision_profiles_work() {
    let p = make_keplerian(1.0f32, 1.0, 2.0, 0.1).unwrap();
    assert!((p.eval_f(1.0).unwrap() + 300.0).abs() < 1e-3);
}
