use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::profiles::{make_keplerian, make_powerlaw};

fn input(upsilon0: f64, omega0: f64, eps: f64, k: f64, kr: f64) -> DispersionInput<f64> {
    DispersionInput { r0: 1.0, upsilon0, omega0, eps, k, kr }
}

#[test]
fn no_rotation_gives_the_alfven_double_root() {
    let d = input(0.0, 0.0, 0.1, 2.0, 3.0);
    let r = dispersion_roots(&d).unwrap();
    assert_eq!(r.x, [0.0, 0.0]);
    assert_eq!(r.labels, [Branch::Degenerate; 2]);
    for l in r.lambda2 {
        assert!((l + 0.04).abs() < 1e-15);
    }
}

#[test]
fn zero_field_factors() {
    let d = input(0.8, 1.0, 0.0, 1.0, 2.0);
    let r = dispersion_roots(&d).unwrap();
    assert!((r.lambda2[0] + 0.8 / 5.0).abs() < 1e-15);
    assert_eq!(r.lambda2[1], 0.0);
    assert_eq!(r.labels[0], Branch::Epicyclic);
}

#[test]
fn generic_roots_satisfy_the_quadratic_and_vieta() {
    let d = input(1.0, 1.0, 0.1, 1.0, 10.0);
    let r = dispersion_roots(&d).unwrap();
    let (a2, a1, a0) = d.coefficients();
    for x in r.x {
        assert!(relative_residual(&d, x) < 1e-14);
    }
    assert!((r.x[0] + r.x[1] + a1 / a2).abs() < 1e-15);
    assert!((r.x[0] * r.x[1] - a0 / a2).abs() < 1e-17);
}

#[test]
fn random_inputs_have_small_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..1000 {
        let d = input(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(0.0..3.0),
            10f64.powf(rng.gen_range(-4.0..0.5)),
            rng.gen_range(1..40) as f64,
            10f64.powf(rng.gen_range(-1.0..2.0)),
        );
        let r = dispersion_roots(&d).unwrap();
        for x in r.x {
            assert!(relative_residual(&d, x) <= 1e-12, "{d:?}");
        }
    }
}

#[test]
fn asymptotic_error_is_fourth_order_in_eps() {
    for (u, w) in [(1.0, 1.0), (0.5, 0.9), (-0.3, 0.6)] {
        let eps: Vec<f64> = (0..6).map(|i| 1e-3 * 10f64.powf(i as f64 / 5.0)).collect();
        let pts: Vec<(f64, f64)> = eps
            .iter()
            .map(|&e| {
                let d = input(u, w, e, 2.0, 3.0);
                let ex = dispersion_roots(&d).unwrap();
                let asy = asymptotic_roots(&d).unwrap();
                let err = (ex.lambda2[0] - asy.epicyclic_lambda2).abs().max((ex.lambda2[1] - asy.mri_lambda2).abs());
                (e.ln(), err.ln())
            })
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 4.0).abs() < 0.3, "slope {slope}");
    }
}

#[test]
fn asymptotics_at_zero_field_and_the_mri_sign() {
    let d = input(0.8, 1.0, 0.0, 1.0, 2.0);
    let a = asymptotic_roots(&d).unwrap();
    let r = dispersion_roots(&d).unwrap();
    assert_eq!(a.epicyclic_lambda2, r.lambda2[0]);
    assert_eq!(a.mri_lambda2, 0.0);
    // Keplerian: Υ = ω² > 0, ∂_r(ω²) < 0
    let d = input(1.0, 1.0, 0.01, 1.0, 1.0);
    assert!(asymptotic_roots(&d).unwrap().mri_lambda2 > 0.0);
    assert!(dispersion_roots(&d).unwrap().lambda2[1] > 0.0);
    assert!(!asymptotic_roots(&d).unwrap().outside_range);
    assert!(asymptotic_roots(&input(1.0, 1.0, 1.0, 1.0, 1.0)).unwrap().outside_range);
    assert!(matches!(asymptotic_roots(&input(0.0, 1.0, 0.1, 1.0, 1.0)), Err(Error::Degenerate(_))));
}

#[test]
fn roots_are_continuous_in_the_inputs() {
    let base = input(0.7, 1.1, 0.05, 3.0, 4.0);
    let r0 = dispersion_roots(&base).unwrap();
    let perturb = [
        input(0.7 * (1.0 + 1e-6), 1.1, 0.05, 3.0, 4.0),
        input(0.7, 1.1 * (1.0 + 1e-6), 0.05, 3.0, 4.0),
        input(0.7, 1.1, 0.05 * (1.0 + 1e-6), 3.0, 4.0),
        input(0.7, 1.1, 0.05, 3.0 * (1.0 + 1e-6), 4.0),
        input(0.7, 1.1, 0.05, 3.0, 4.0 * (1.0 + 1e-6)),
    ];
    for d in perturb {
        let r = dispersion_roots(&d).unwrap();
        for j in 0..2 {
            assert!((r.x[j] - r0.x[j]).abs() <= 1e-3 * r0.x[j].abs());
        }
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(dispersion_roots(&input(1.0, 1.0, 0.1, 0.0, 1.0)).is_err());
    assert!(dispersion_roots(&input(1.0, 1.0, 0.1, 1.0, 0.0)).is_err());
}

#[test]
fn local_and_global_rates() {
    let g = RadialGrid::uniform(1.0, 2.0, 200).unwrap();
    let rigid = make_powerlaw(1.0, 0.0, 0.0, 1.0, 2.0, 0.05).unwrap();
    let rows = local_vs_global(&rigid, &g, 4, &[1.0, 3.0, 10.0]).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.lambda2_local <= 0.0 && r.lambda_global.is_none()));
    let kep = make_keplerian(1.0, 1.0, 2.0, 0.05).unwrap();
    let kr = std::f64::consts::PI;
    for k in [1, 4, 16] {
        let row = &local_vs_global(&kep, &g, k, &[kr]).unwrap()[0];
        let ratio = row.lambda2_local.sqrt() / row.lambda_global.unwrap();
        assert!((0.1..=10.0).contains(&ratio), "k = {k}: ratio {ratio}");
        assert_eq!(row.r0_argmax, 1.0);
    }
}
