//! Growing normal modes: shooting on the nonlinear eigenvalue ODE for Λ and
//! reconstruction of the full perturbation fields.

mod ode;

use crate::error::{Error, Result};
use crate::num::{c, Real};
use crate::operators::RadialGrid;
use crate::profiles::RadialProfile;

pub(crate) use ode::Dp45;

/// Number of geometric scan points in (1e-6·λ_hi, λ_hi].
pub const SCAN_POINTS: usize = 400;
/// Bisection iteration cap.
pub const BISECTION_CAP: usize = 200;
/// Relative bisection tolerance.
pub const ROOT_RTOL: f64 = 1e-10;

/// How a mode was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSource {
    Shooting,
    Generator,
}

/// Perturbation fields of a growing mode on the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFields<T> {
    pub u_r: Vec<T>,
    pub u_theta: Vec<T>,
    pub u_z: Vec<T>,
    pub b_theta: Vec<T>,
}

/// A growing normal mode e^{Λt} at axial wavenumber k.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution<T> {
    pub k: usize,
    pub lambda: T,
    /// Radii of the samples (grid nodes).
    pub r: Vec<T>,
    /// φ̃ normalized to max|φ̃| = 1, positive near R₁.
    pub phi: Vec<T>,
    /// φ̃′ with the same normalization.
    pub dphi: Vec<T>,
    pub fields: ModeFields<T>,
    /// All bracketed growth rates, descending (the first is `lambda`).
    pub roots: Vec<T>,
    /// The largest root lies within 1% of the scan's upper bound.
    pub near_upper_bound: bool,
    pub source: ModeSource,
}

fn constant_b<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Result<T> {
    let b0 = p.b(g.r1());
    let tol = c::<T>(1e-12) * b0;
    for &r in g.nodes() {
        let (b, db, d2b) = p.b3(r);
        if (b - b0).abs() > tol || db.abs() > tol || d2b.abs() > tol {
            return Err(Error::UnsupportedRegime(
                "the shooting ODE holds for constant b only; use the generator spectrum (linsim) for variable b".into(),
            ));
        }
    }
    Ok(b0)
}

/// Coefficients of φ̃″ = φ̃′/r + Q(r)·φ̃ at growth rate Λ.
struct Shooting<'a, T: Real> {
    p: &'a RadialProfile<T>,
    k2: T,
    lam2: T,
    s2: T,
}

impl<'a, T: Real> Shooting<'a, T> {
    fn new(p: &'a RadialProfile<T>, b: T, k: usize, lambda: T) -> Self {
        let kk = T::from_count(k);
        let s = p.eps * b * kk;
        Self { p, k2: kk * kk, lam2: lambda * lambda, s2: s * s }
    }

    /// Q = k²[1 + (r∂_r(ω²) + 4ω²Λ²/(Λ²+s²))/(Λ²+s²)], s = εbk.
    fn q(&self, r: T) -> T {
        let d = self.lam2 + self.s2;
        let w2 = self.p.omega2(r);
        self.k2 * (T::one() + (r * self.p.domega2(r) + c::<T>(4.0) * w2 * self.lam2 / d) / d)
    }

    fn rhs(&self, r: T, y: &[T; 2]) -> [T; 2] {
        [y[1], y[1] / r + self.q(r) * y[0]]
    }
}

fn solver<T: Real>() -> Dp45<T> {
    let rtol = c::<T>(1e-10).max(T::EPS * c::<T>(100.0));
    Dp45::new(rtol, rtol * c::<T>(1e-3))
}

/// φ̃(R₂)/max|φ̃| for the solution with φ̃(R₁) = 0, φ̃′(R₁) = 1.
pub fn shoot_residual<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize, lambda: T) -> Result<T> {
    let b = constant_b(p, g)?;
    if !(lambda > T::zero()) || k == 0 {
        return Err(Error::Domain("shooting needs Λ > 0 and k ≥ 1".into()));
    }
    let sh = Shooting::new(p, b, k, lambda);
    let f = |r: T, y: &[T; 2]| sh.rhs(r, y);
    let mut peak = T::zero();
    let len = g.r2() - g.r1();
    let (y, _) = solver().integrate(&f, g.r1(), [T::zero(), T::one()], g.r2(), len * c::<T>(1e-3), |s| peak = peak.max(s.y[0].abs()))?;
    let peak = peak.max(y[0].abs());
    if peak == T::zero() || !peak.is_finite_val() {
        return Err(Error::Numeric("shooting produced a degenerate solution".into()));
    }
    Ok(y[0] / peak)
}

/// A priori bound √(max(0, max(−Υ)) + 4·max ω²) + k·ε·max b on the grid nodes.
pub fn default_lambda_hi<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize) -> T {
    let mut neg_u = T::zero();
    let mut w2 = T::zero();
    let mut bmax = T::zero();
    for &r in g.nodes() {
        neg_u = neg_u.max(-p.eval_rayleigh(r));
        w2 = w2.max(p.omega2(r));
        bmax = bmax.max(p.b(r));
    }
    (neg_u + c::<T>(4.0) * w2).sqrt() + T::from_count(k) * p.eps.abs() * bmax
}

/// Sign changes of the shooting residual on the scan grid, ascending.
pub fn scan_brackets<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize, lambda_hi: T) -> Result<Vec<(T, T, T)>> {
    let lo = c::<T>(1e-6) * lambda_hi;
    let q = (lambda_hi / lo).ln() / T::from_count(SCAN_POINTS - 1);
    let pts: Vec<T> = (0..SCAN_POINTS).map(|i| if i + 1 == SCAN_POINTS { lambda_hi } else { lo * (q * T::from_count(i)).exp() }).collect();
    let vals: Vec<T> = pts.iter().map(|&l| shoot_residual(p, g, k, l)).collect::<Result<_>>()?;
    Ok((0..SCAN_POINTS - 1)
        .filter(|&i| vals[i] != T::zero() && vals[i].signum_val() != vals[i + 1].signum_val())
        .map(|i| (pts[i], pts[i + 1], vals[i]))
        .collect())
}

fn bisect<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize, (mut a, mut b, mut fa): (T, T, T)) -> Result<T> {
    let tol = c::<T>(ROOT_RTOL).max(T::EPS * c::<T>(4.0));
    for _ in 0..BISECTION_CAP {
        if b - a <= tol * b {
            break;
        }
        let m = (a + b) * c::<T>(0.5);
        let fm = shoot_residual(p, g, k, m)?;
        if fm == T::zero() {
            return Ok(m);
        }
        if fm.signum_val() == fa.signum_val() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((a + b) * c::<T>(0.5))
}

/// Samples φ̃ and φ̃′ at the grid nodes for growth rate Λ (unnormalized).
fn integrate_on_nodes<T: Real>(p: &RadialProfile<T>, b: T, g: &RadialGrid<T>, k: usize, lambda: T) -> Result<(Vec<T>, Vec<T>)> {
    let sh = Shooting::new(p, b, k, lambda);
    let f = |r: T, y: &[T; 2]| sh.rhs(r, y);
    let ode = solver();
    let nodes = g.nodes();
    let mut phi = vec![T::zero(); nodes.len()];
    let mut dphi = vec![T::zero(); nodes.len()];
    dphi[0] = T::one();
    let mut y = [T::zero(), T::one()];
    let mut h = g.h(0);
    for i in 0..nodes.len() - 1 {
        let (y1, h1) = ode.integrate(&f, nodes[i], y, nodes[i + 1], h, |_| {})?;
        y = y1;
        h = h1.abs().max(g.h(i) * c::<T>(1e-6));
        phi[i + 1] = y[0];
        dphi[i + 1] = y[1];
    }
    Ok((phi, dphi))
}

/// Fields of a mode from φ̃ and φ̃′ sampled at radii `r`.
///
/// ũ_r = Λφ̃/(εrb), ũ_z = −(rũ_r)′/(kr), and (ũ_θ, B̃_θ) from
/// Λũ_θ = εbkB̃_θ − (ũ_r/r)(r²ω)′,  ΛB̃_θ = −εbkũ_θ − kω′φ̃.
pub fn reconstruct_fields<T: Real>(p: &RadialProfile<T>, k: usize, lambda: T, r: &[T], phi: &[T], dphi: &[T]) -> ModeFields<T> {
    let kk = T::from_count(k);
    let e = p.eps;
    let n = r.len();
    let mut f = ModeFields { u_r: vec![T::zero(); n], u_theta: vec![T::zero(); n], u_z: vec![T::zero(); n], b_theta: vec![T::zero(); n] };
    for i in 0..n {
        let ri = r[i];
        let (b, db, _) = p.b3(ri);
        let ur = lambda * phi[i] / (e * ri * b);
        let d_rur = lambda / e * (dphi[i] / b - phi[i] * db / (b * b));
        let uz = -d_rur / (kk * ri);
        let s = e * b * kk;
        let w = p.omega(ri);
        let dw = p.domega(ri);
        let r1 = -ur * (c::<T>(2.0) * w + ri * dw);
        let r2 = -kk * dw * phi[i];
        let det = lambda * lambda + s * s;
        f.u_r[i] = ur;
        f.u_z[i] = uz;
        f.u_theta[i] = (lambda * r1 + s * r2) / det;
        f.b_theta[i] = (lambda * r2 - s * r1) / det;
    }
    f
}

/// Largest growth rate at wavenumber k from the shooting scan, with its mode.
///
/// `lambda_hi = None` uses [`default_lambda_hi`].
pub fn find_growth_rate<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize, lambda_hi: Option<T>) -> Result<Option<ModeSolution<T>>> {
    let b = constant_b(p, g)?;
    if k == 0 {
        return Err(Error::Domain("k must be ≥ 1".into()));
    }
    let hi = lambda_hi.unwrap_or_else(|| default_lambda_hi(p, g, k));
    if !(hi > T::zero()) {
        return Err(Error::Domain("lambda_hi must be positive".into()));
    }
    let brackets = scan_brackets(p, g, k, hi)?;
    if brackets.is_empty() {
        return Ok(None);
    }
    let mut roots: Vec<T> = brackets.into_iter().rev().map(|br| bisect(p, g, k, br)).collect::<Result<_>>()?;
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let lambda = roots[0];
    let (mut phi, mut dphi) = integrate_on_nodes(p, b, g, k, lambda)?;
    let peak = phi.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    for v in phi.iter_mut().chain(dphi.iter_mut()) {
        *v /= peak;
    }
    let last = phi.len() - 1;
    phi[0] = T::zero();
    phi[last] = T::zero();
    let r = g.nodes().to_vec();
    let fields = reconstruct_fields(p, k, lambda, &r, &phi, &dphi);
    Ok(Some(ModeSolution { k, lambda, r, phi, dphi, fields, roots, near_upper_bound: lambda >= c::<T>(0.99) * hi, source: ModeSource::Shooting }))
}

/// Growth rate at k by whichever route fits the profile: shooting for constant b,
/// the discrete generator spectrum otherwise.
pub fn growth_rate_any<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize) -> Result<Option<ModeSolution<T>>> {
    match constant_b(p, g) {
        Ok(_) => find_growth_rate(p, g, k, None),
        Err(_) => crate::linsim::generator_mode(p, g, k),
    }
}

/// Maximizes Λ over `k_range`; returns (k*, mode).
pub fn max_growth_rate<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k_range: impl IntoIterator<Item = usize>) -> Result<(usize, ModeSolution<T>)> {
    let mut best: Option<ModeSolution<T>> = None;
    for k in k_range {
        if let Some(m) = growth_rate_any(p, g, k)? {
            if best.as_ref().is_none_or(|b| m.lambda > b.lambda) {
                best = Some(m);
            }
        }
    }
    best.map(|m| (m.k, m)).ok_or(Error::NoneUnstable)
}

/// Escape time T = ln(θ/δ)/Λ for growth θ = δ·e^{ΛT}.
pub fn escape_time<T: Real>(lambda: T, theta: T, delta: T) -> Result<T> {
    if !(lambda > T::zero()) {
        return Err(Error::Domain("growth rate must be positive".into()));
    }
    if !(delta > T::zero() && delta < theta) {
        return Err(Error::Domain("escape time needs 0 < δ < θ".into()));
    }
    Ok((theta / delta).ln() / lambda)
}

#[cfg(test)]
mod tests;
