use super::*;
use crate::linsim::{assemble_generator, LinearState};
use crate::operators::{assemble_lk, inertia};
use crate::profiles::{make_keplerian, make_powerlaw, FieldShape};

fn kepler(eps: f64) -> RadialProfile<f64> {
    make_keplerian(1.0, 1.0, 2.0, eps).unwrap()
}

fn grid(n: usize) -> RadialGrid<f64> {
    RadialGrid::uniform(1.0, 2.0, n).unwrap()
}

#[test]
fn rigid_rotation_has_no_growing_mode() {
    let p = make_powerlaw(1.0, 0.0, 0.0, 1.0, 2.0, 0.05).unwrap();
    let g = grid(100);
    assert!(scan_brackets(&p, &g, 1, default_lambda_hi(&p, &g, 1)).unwrap().is_empty());
    assert!(find_growth_rate(&p, &g, 1, None).unwrap().is_none());
    assert!(matches!(max_growth_rate(&p, &g, 1..4), Err(Error::NoneUnstable)));
}

#[test]
fn residual_keeps_its_sign_above_the_bound() {
    let p = kepler(0.05);
    let g = grid(100);
    let hi = default_lambda_hi(&p, &g, 1);
    let signs: Vec<f64> = (0..20).map(|i| shoot_residual(&p, &g, 1, hi * (1.0 + i as f64)).unwrap().signum()).collect();
    assert!(signs.iter().all(|s| *s == signs[0]));
}

#[test]
fn shooting_matches_the_generator() {
    let p = kepler(0.05);
    let g = grid(400);
    let m = find_growth_rate(&p, &g, 1, None).unwrap().unwrap();
    let gen = assemble_generator(&p, &g, 1).unwrap();
    let top = gen.unstable_rates()[0];
    assert!((m.lambda - top).abs() < 1e-3 * m.lambda, "{} vs {}", m.lambda, top);
    assert!(!m.near_upper_bound);
    assert_eq!(m.source, ModeSource::Shooting);
}

#[test]
fn mode_satisfies_the_ode_pointwise() {
    let p = kepler(0.05);
    let n = 4000;
    let g = grid(n);
    let m = find_growth_rate(&p, &g, 1, None).unwrap().unwrap();
    let sh = Shooting::new(&p, 1.0, 1, m.lambda);
    let h = 1.0 / n as f64;
    let qmax = g.nodes().iter().fold(0.0f64, |a, &r| a.max(sh.q(r).abs()));
    let mut worst = 0.0f64;
    for i in 2..n - 2 {
        let d = &m.dphi;
        let ddphi = (-d[i + 2] + 8.0 * d[i + 1] - 8.0 * d[i - 1] + d[i - 2]) / (12.0 * h);
        let r = g.nodes()[i];
        let res = ddphi - d[i] / r - sh.q(r) * m.phi[i];
        worst = worst.max(res.abs());
    }
    assert!(worst < 1e-8 * qmax, "residual {worst}, scale {qmax}");
}

#[test]
fn mode_normalization() {
    let m = find_growth_rate(&kepler(0.05), &grid(200), 1, None).unwrap().unwrap();
    let peak = m.phi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!((peak - 1.0).abs() < 1e-12);
    assert!(m.phi[1] > 0.0);
    assert_eq!(m.phi[0], 0.0);
    assert_eq!(*m.phi.last().unwrap(), 0.0);
    assert!(m.roots.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn root_count_equals_negative_directions() {
    let g = grid(400);
    for (p, k) in [(kepler(0.05), 1), (kepler(0.05), 3), (kepler(0.1), 2), (make_powerlaw(1.0, 0.0, -1.0, 1.0, 2.0, 0.05).unwrap(), 1)] {
        let nneg = inertia(&assemble_lk(&p, &g, k).unwrap(), 1e-10).n_neg;
        let roots = find_growth_rate(&p, &g, k, None).unwrap().map_or(0, |m| m.roots.len());
        assert_eq!(roots, nneg, "k = {k}");
    }
}

#[test]
fn fastest_wavenumber_is_order_one_over_eps_and_rates_decay_beyond_it() {
    let p = kepler(0.05);
    let g = grid(200);
    let (k_star, best) = max_growth_rate(&p, &g, 1..=60).unwrap();
    assert!(k_star as f64 * p.eps <= 1.0, "k* = {k_star}");
    let mut prev = best.lambda;
    for k in k_star + 1..=60 {
        let l = find_growth_rate(&p, &g, k, None).unwrap().map_or(0.0, |m| m.lambda);
        assert!(l <= prev + 1e-12);
        prev = l;
    }
}

#[test]
fn large_k_is_cut_off() {
    // for εk large enough the tension term beats the shear
    let p = kepler(0.05);
    let g = grid(200);
    assert!(find_growth_rate(&p, &g, 200, None).unwrap().is_none());
    let gen = assemble_generator(&p, &g, 200).unwrap();
    assert!(gen.unstable_rates().is_empty());
}

#[test]
fn variable_field_routes_to_the_generator() {
    let p = kepler(0.05).with_field(FieldShape::Gaussian { amp: 0.3, center: 1.5, width: 0.2 }).unwrap();
    let g = grid(100);
    assert!(matches!(find_growth_rate(&p, &g, 1, None), Err(Error::UnsupportedRegime(_))));
    let m = growth_rate_any(&p, &g, 1).unwrap().unwrap();
    assert_eq!(m.source, ModeSource::Generator);
    assert!(m.lambda > 0.0);
}

#[test]
fn reconstructed_fields_solve_the_linear_system() {
    let p = kepler(0.05);
    let n = 2000;
    let g = grid(n);
    let m = find_growth_rate(&p, &g, 1, None).unwrap().unwrap();
    let gen = assemble_generator(&p, &g, 1).unwrap();
    let f = &m.fields;
    let mut x: Vec<f64> = f.u_r[1..n].to_vec();
    x.extend_from_slice(&f.u_theta);
    x.extend_from_slice(&m.phi[1..n]);
    x.extend_from_slice(&f.b_theta);
    let gx = gen.apply(&x);
    let diff: Vec<f64> = gx.iter().zip(&x).map(|(a, b)| a - m.lambda * b).collect();
    let rel = (gen.norm2(&diff) / gen.norm2(&x)).sqrt() / m.lambda;
    assert!(rel < 1e-3, "relative residual {rel}");
    // u_z from the fields against the discrete constraint
    let s = LinearState::from_vec(&gen, &x).unwrap();
    for c in 1..n - 1 {
        let uz_node = 0.5 * (f.u_z[c] + f.u_z[c + 1]);
        assert!((s.u_z[c] - uz_node).abs() < 1e-3 * f.u_z.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    }
}

#[test]
fn escape_time_identities() {
    let lam = 0.7f64;
    let t = escape_time(lam, 1.0, 1e-3).unwrap();
    assert!((1e-3 * (lam * t).exp() - 1.0).abs() < 1e-14);
    let t2 = escape_time(lam, 1.0, 0.5e-3).unwrap();
    assert!((t2 - t - 2f64.ln() / lam).abs() < 1e-13);
    assert!(escape_time(0.0, 1.0, 0.1).is_err());
    assert!(escape_time(1.0, 1.0, 2.0).is_err());
    assert!(escape_time(1.0, 1.0, 0.0).is_err());
}
