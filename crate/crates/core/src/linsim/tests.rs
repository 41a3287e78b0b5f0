use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::operators::{assemble_lk, inertia, Spacing};
use crate::profiles::{make_keplerian, make_offset_power, make_powerlaw, FieldShape};

fn kepler(eps: f64) -> RadialProfile<f64> {
    make_keplerian(1.0, 1.0, 2.0, eps).unwrap()
}

fn rigid(eps: f64) -> RadialProfile<f64> {
    make_powerlaw(1.0, 0.0, 0.0, 1.0, 2.0, eps).unwrap()
}

fn grid(n: usize) -> RadialGrid<f64> {
    RadialGrid::uniform(1.0, 2.0, n).unwrap()
}

fn wnorm(s: &Staggered<f64>, a: &[f64], w: &[f64]) -> f64 {
    s.velocity_norm2(a, w).sqrt()
}

#[test]
fn projection_keeps_divergence_free_fields() {
    let g = RadialGrid::<f64>::geometric(1.0, 3.0, 40).unwrap();
    let s = Staggered::new(&g, 2).unwrap();
    let a: Vec<f64> = g.interior_nodes().iter().map(|r| (r * 3.0).sin()).collect();
    let w = s.uz_of(&a);
    let div = s.divergence(&a, &w);
    assert!(div.iter().all(|d| d.abs() < 1e-12));
    let (a2, w2) = project_divfree(&g, 2, &a, &w).unwrap();
    let da: Vec<f64> = a.iter().zip(&a2).map(|(x, y)| x - y).collect();
    let dw: Vec<f64> = w.iter().zip(&w2).map(|(x, y)| x - y).collect();
    assert!(wnorm(&s, &da, &dw) <= 1e-12 * wnorm(&s, &a, &w));
}

#[test]
fn projection_annihilates_gradients() {
    let g = grid(50);
    let s = Staggered::new(&g, 3).unwrap();
    let q: Vec<f64> = (0..50).map(|c| (g.center(c) * 2.0).cos() + 0.3).collect();
    let (gr, gz) = s.gradient(&q);
    let (a, w) = s.project(&gr, &gz);
    assert!(wnorm(&s, &a, &w) <= 1e-10 * wnorm(&s, &gr, &gz));
}

#[test]
fn projection_of_random_input_is_divergence_free_and_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = RadialGrid::geometric(0.5, 4.0, 64).unwrap();
    let s = Staggered::new(&g, 1).unwrap();
    let ur: Vec<f64> = (0..63).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let uz: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (a, w) = s.project(&ur, &uz);
    let div = s.divergence(&a, &w);
    let dn = div.iter().zip(&s.w_cell).map(|(d, c)| c * d * d).sum::<f64>().sqrt();
    assert!(dn <= 1e-10 * wnorm(&s, &ur, &uz));
    // the result is the weighted least-squares fit (a, C a) to the input
    let ma = s.velocity_metric().unwrap();
    let mut rhs: Vec<f64> = (0..63).map(|j| s.w_node[j + 1] * ur[j]).collect();
    for (r, v) in rhs.iter_mut().zip(s.uz_adjoint(&uz)) {
        *r += v;
    }
    let a_ls = ma.solve(&rhs);
    for (x, y) in a.iter().zip(&a_ls) {
        assert!((x - y).abs() < 1e-10);
    }
    assert!(project_divfree(&g, 0, &ur, &uz).is_err());
}

#[test]
fn generator_is_form_antisymmetric() {
    for (p, k) in [(kepler(0.05), 1), (kepler(0.3), 2)] {
        let g = grid(20);
        let gen = assemble_generator(&p, &g, k).unwrap();
        let gm = gen.matrix();
        let q = gen.form_matrix().unwrap();
        assert!((&q - q.transpose()).amax() <= 1e-14 * q.amax());
        let r = gm.transpose() * &q + &q * &gm;
        assert!(r.amax() <= 1e-10 * q.norm() * gm.norm(), "{}", r.amax());
    }
}

#[test]
fn euler_generator_is_form_antisymmetric() {
    let g = grid(20);
    let p = make_powerlaw(1.0, 0.0, -1.0, 1.0, 2.0, 0.1).unwrap();
    let gen = assemble_euler_generator(&p, &g, 1).unwrap();
    let gm = gen.matrix();
    let q = gen.form_matrix().unwrap();
    let r = gm.transpose() * &q + &q * &gm;
    assert!(r.amax() <= 1e-10 * q.norm() * gm.norm());
    let marginal = assemble_euler_generator(&make_offset_power(0.0, 1.0, -4.0, 1.0, 2.0, 0.1).unwrap(), &g, 1).unwrap();
    assert!(matches!(marginal.form_matrix(), Err(Error::Degenerate(_))));
    let unstable = assemble_euler_generator(&make_offset_power(-0.175, 8.0, -4.0, 1.0, 2.0, 0.1).unwrap(), &g, 1).unwrap();
    let (gm, q) = (unstable.matrix(), unstable.form_matrix().unwrap());
    let r = gm.transpose() * &q + &q * &gm;
    assert!(r.amax() <= 1e-10 * q.norm() * gm.norm());
}

fn dense_eigs(m: &DMatrix<f64>) -> Vec<(f64, f64)> {
    let mut e: Vec<(f64, f64)> = m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    e.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(b.1.partial_cmp(&a.1).unwrap()));
    e
}

#[test]
fn reduced_spectrum_matches_dense_eigensolve() {
    let g = grid(18);
    for (p, k) in [(kepler(0.05), 1), (kepler(0.5), 1), (rigid(0.2), 2)] {
        let gen = assemble_generator(&p, &g, k).unwrap();
        let sp = gen.spectrum().unwrap();
        let dense = dense_eigs(&gen.matrix());
        assert_eq!(sp.eigenvalues.len(), dense.len());
        let scale = sp.norm;
        // compare the unstable parts and the full multiset by nearest match
        let mut used = vec![false; dense.len()];
        for z in &sp.eigenvalues {
            let (j, d) = dense
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, w)| (j, ((w.0 - z.re).powi(2) + (w.1 - z.im).powi(2)).sqrt()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            used[j] = true;
            assert!(d < 1e-6 * scale, "eigenvalue {z} off by {d}");
        }
    }
}

#[test]
fn euler_reduced_spectrum_matches_dense_eigensolve() {
    let g = grid(18);
    let p = make_offset_power(-0.175, 8.0, -4.0, 1.0, 2.0, 0.1).unwrap();
    let gen = assemble_euler_generator(&p, &g, 1).unwrap();
    let sp = gen.spectrum().unwrap();
    let dense = dense_eigs(&gen.matrix());
    assert!(sp.eigenvalues[0].re > 0.1);
    assert!((sp.eigenvalues[0].re - dense[0].0).abs() < 1e-8 * sp.norm);
    assert_eq!(sp.eigenvalues.len(), gen.dim());
    assert_eq!(sp.unstable.len(), gen.unstable_rates().len());
    assert!((sp.unstable[0] - gen.unstable_rates()[0]).abs() < 1e-10);
}

#[test]
fn rigid_rotation_spectrum_is_neutral() {
    let g = grid(24);
    let gen = assemble_generator(&rigid(0.1), &g, 1).unwrap();
    let norm = gen.matrix().norm();
    let sp = gen.spectrum().unwrap();
    assert!(sp.unstable.is_empty());
    assert!(sp.eigenvalues.iter().all(|z| z.re.abs() <= 1e-8 * norm));
    assert!(dense_eigs(&gen.matrix()).iter().all(|z| z.0.abs() <= 1e-8 * norm));
    assert!(gen.unstable_rates().is_empty());
}

#[test]
fn keplerian_unstable_count_matches_negative_directions() {
    let g = grid(60);
    let p = kepler(0.05);
    for k in 1..=4 {
        let gen = assemble_generator(&p, &g, k).unwrap();
        let sp = gen.spectrum().unwrap();
        let nneg = inertia(&assemble_lk(&p, &g, k).unwrap(), 1e-10).n_neg;
        assert_eq!(sp.unstable.len(), nneg, "k = {k}");
        assert!(nneg > 0);
        for &l in &sp.unstable {
            let mirror = sp.eigenvalues.iter().any(|z| (z.re + l).abs() < 1e-10 * sp.norm && z.im.abs() <= sp.tol);
            assert!(mirror);
        }
        let fast = gen.unstable_rates();
        assert_eq!(fast.len(), nneg);
        for (a, b) in fast.iter().zip(&sp.unstable) {
            assert!((a - b).abs() <= 1e-8 * b.max(1e-3), "{a} vs {b}");
        }
    }
}

#[test]
fn sturm_count_at_zero_equals_negative_directions_on_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let beta = rng.gen_range(-0.4..0.4);
        let gamma = rng.gen_range(-3.0..1.0);
        let eps = rng.gen_range(0.02..0.5);
        let Ok(p) = make_powerlaw(1.0, beta, gamma, 1.0, 2.0, eps) else { continue };
        let g = RadialGrid::new(1.0, 2.0, 48, Spacing::Geometric).unwrap();
        let k = rng.gen_range(1..4);
        let gen = assemble_generator(&p, &g, k).unwrap();
        let nneg = inertia(&assemble_lk(&p, &g, k).unwrap(), 0.0).n_neg;
        assert_eq!(gen.count_mu_above(0.0), nneg);
    }
}

#[test]
fn generator_mode_matches_dense_top_eigenvalue_for_variable_field() {
    let g = grid(40);
    let p = kepler(0.05).with_field(FieldShape::Gaussian { amp: 0.5, center: 1.5, width: 0.2 }).unwrap();
    let gen = assemble_generator(&p, &g, 1).unwrap();
    let sp = gen.spectrum().unwrap();
    let m = generator_mode(&p, &g, 1).unwrap().unwrap();
    assert!((m.lambda - sp.unstable[0]).abs() < 1e-9 * sp.unstable[0]);
    assert_eq!(m.source, ModeSource::Generator);
    assert_eq!(m.roots.len(), sp.unstable.len());
    // eigenvector check: G x = Λ x on the reconstructed stacked vector
    let mu = m.lambda * m.lambda;
    let a = gen.schur_null_vector(mu);
    let n = g.cells();
    let beta = gen.beta_from_ur(&a, mu);
    let f: Vec<f64> = (1..n).map(|i| gen.eps_rb(i) * a[i - 1] / m.lambda).collect();
    let gfield: Vec<f64> = beta.iter().enumerate().map(|(i, b)| -b * if i == 0 || i == n { 0.0 } else { m.lambda } / (p.eps * p.b(g.nodes()[i]) * 1.0)).collect();
    let mut x = a.clone();
    x.extend((0..=n).map(|i| {
        let fi = if i == 0 || i == n { 0.0 } else { f[i - 1] };
        gfield[i] - p.domega(g.nodes()[i]) / (p.eps * p.b(g.nodes()[i])) * fi
    }));
    x.extend_from_slice(&f);
    x.extend_from_slice(&beta);
    let gx = gen.apply(&x);
    let err = gx.iter().zip(&x).map(|(u, v)| (u - m.lambda * v).abs()).fold(0.0, f64::max);
    let sz = x.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    assert!(err < 1e-6 * m.lambda * sz, "{err}");
}

#[test]
fn generator_rejects_zero_eps_and_k() {
    let g = grid(20);
    assert!(matches!(assemble_generator(&kepler(0.0), &g, 1), Err(Error::ZeroEps(_))));
    assert!(assemble_generator(&kepler(0.1), &g, 0).is_err());
}

#[test]
fn state_roundtrip_and_divergence() {
    let g = grid(30);
    let gen = assemble_generator(&kepler(0.05), &g, 2).unwrap();
    let s = LinearState::random(&gen, 3);
    let x = s.to_vec(&gen).unwrap();
    let back = LinearState::from_vec(&gen, &x).unwrap();
    assert_eq!(back, s);
    let div = s.divergence(&gen);
    let n = gen.norm2(&x).sqrt();
    assert!(div.iter().all(|d| d.abs() <= 1e-10 * n));
    assert_eq!(LinearState::random(&gen, 3), s);
    assert_ne!(LinearState::random(&gen, 4), s);
}

fn toy_expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let s = 10;
    let b = a / f64::from(1u32 << s);
    let mut term = DMatrix::identity(a.nrows(), a.ncols());
    let mut sum = term.clone();
    for j in 1..30 {
        term = &term * &b / j as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn rk4_step_error_is_fifth_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = DMatrix::from_fn(8, 8, |_, _| rng.gen_range(-1.0..1.0));
    let x0: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = |v: &[f64]| (&a * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec();
    let err = |dt: f64| {
        let y = sim::rk4(f, &x0, dt);
        let e = toy_expm(&(&a * dt)) * nalgebra::DVector::from_column_slice(&x0);
        y.iter().zip(e.iter()).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
    };
    let dts = [0.08f64, 0.04, 0.02, 0.01];
    let logs: Vec<(f64, f64)> = dts.iter().map(|&d| (d.ln(), err(d).ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - 5.0).abs() < 0.3, "slope {slope}");
    let zero = sim::rk4(|v: &[f64]| vec![0.0; v.len()], &x0, 0.3);
    assert_eq!(zero, x0);
}

#[test]
fn rk4_step_is_linear() {
    let g = grid(24);
    let gen = assemble_generator(&kepler(0.05), &g, 1).unwrap();
    let x = LinearState::random(&gen, 1).to_vec(&gen).unwrap();
    let y = step_rk4(&gen, &x, 0.01).unwrap();
    let x3: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
    let y3 = step_rk4(&gen, &x3, 0.01).unwrap();
    for (a, b) in y.iter().zip(&y3) {
        assert!((3.0 * a - b).abs() <= 1e-14 * b.abs().max(1.0));
    }
    assert!(step_rk4(&gen, &x, 0.0).is_err());
}

#[test]
fn short_run_conserves_the_form_and_grows() {
    let g = grid(40);
    let p = kepler(0.05);
    let gen = assemble_generator(&p, &g, 1).unwrap();
    let lam = gen.unstable_rates()[0];
    let init = LinearState::smooth(&gen);
    let rep = run_simulation(&gen, &init, 10.0 / lam, 0.01 / lam).unwrap();
    assert!(!rep.overflow);
    assert!(rep.form_drift.unwrap() < 1e-6, "{:?}", rep.form_drift);
    let fit = rep.fitted_rate.unwrap();
    assert!((fit - lam).abs() < 0.02 * lam, "{fit} vs {lam}");
    let (t0, t1) = rep.fit_window.unwrap();
    assert!(t1 > t0);
    assert_eq!(rep.times.len(), rep.norms.len());
}

#[test]
fn stable_run_has_no_exponential_fit() {
    let g = grid(32);
    let gen = assemble_generator(&rigid(0.1), &g, 1).unwrap();
    let rep = run_simulation_every(&gen, &LinearState::smooth(&gen), 100.0, 0.02, 10).unwrap();
    assert!(rep.fitted_rate.is_none());
    assert!(rep.poly_bound.is_finite() && rep.poly_bound < 10.0);
    assert!(rep.form_drift.unwrap() < 1e-6);
}

#[test]
fn overflow_stops_the_run() {
    let g = grid(20);
    let gen = assemble_generator(&kepler(0.05), &g, 1).unwrap();
    let lam = gen.unstable_rates()[0];
    let rep = run_simulation_every(&gen, &LinearState::smooth(&gen), 400.0 / lam, 0.05 / lam, 20).unwrap();
    assert!(rep.overflow);
    assert!(*rep.times.last().unwrap() < 400.0 / lam);
}
