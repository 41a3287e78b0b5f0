//! Zero-field comparison theory: Rayleigh criterion, Euler growth quotients
//! and their relation to the small-field MHD growth rates.

use crate::error::{Error, Result};
use crate::linsim::assemble_generator;
use crate::num::{c, Real};
use crate::operators::RadialGrid;
use crate::profiles::RadialProfile;

pub use crate::linsim::assemble_euler_generator;

/// Rayleigh stability: Υ > 0 at every interior node.
pub fn rayleigh_classify<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> bool {
    g.interior_nodes().iter().all(|&r| p.eval_rayleigh(r) > T::zero())
}

/// a₁ = max(0, −min Υ) over the grid nodes.
pub fn euler_a1<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> T {
    let m = g.nodes().iter().fold(T::MAX, |m, &r| m.min(p.eval_rayleigh(r)));
    (-m).max(T::zero())
}

/// λ_k² with its maximizing u_r (interior nodes), or `None` when clamped to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerQuotient<T> {
    pub lambda2: T,
    pub u_r: Option<Vec<T>>,
}

/// sup ∫(−Υ)u_r² r dr / ∫(u_r² + |∂_r(r u_r)|²/(k²r²)) r dr over Dirichlet u_r, clamped at 0.
pub fn euler_quotient<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize) -> Result<EulerQuotient<T>> {
    let gen = assemble_euler_generator(p, g, k)?;
    Ok(match gen.unstable_mu().first() {
        Some(&mu) => EulerQuotient { lambda2: mu, u_r: Some(gen.schur_null_vector(mu)) },
        None => EulerQuotient { lambda2: T::zero(), u_r: None },
    })
}

/// λ_k², the largest Euler growth rate squared at wavenumber k.
pub fn euler_lambda_k<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize) -> Result<T> {
    Ok(euler_quotient(p, g, k)?.lambda2)
}

/// Discrete value of the Euler quotient at u_r.
pub fn quotient_value<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize, u_r: &[T]) -> Result<T> {
    let gen = assemble_euler_generator(p, g, k)?;
    let w = gen.node_weights();
    let num = u_r.iter().enumerate().fold(T::zero(), |s, (j, a)| s - w[j + 1] * p.eval_rayleigh(g.nodes()[j + 1]) * *a * *a);
    let uz = gen.ops.uz_of(u_r);
    let den = gen.ops.velocity_norm2(u_r, &uz);
    Ok(num / den)
}

/// One ε of the MHD/Euler comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison<T> {
    pub eps: T,
    pub k: usize,
    /// Λ_k², top squared growth rate of the MHD generator (0 if stable).
    pub big_lambda2: T,
    /// λ_k² of the Euler quotient.
    pub lambda2: T,
    /// Λ_k² − λ_k².
    pub gap: T,
}

/// Comparison table with log-log slopes against ε².
#[derive(Debug, Clone, PartialEq)]
pub struct EpsScaling<T> {
    pub rows: Vec<Comparison<T>>,
    /// Slope of ln Λ_k² against ln ε² (rows with Λ_k² > 0).
    pub slope_big_lambda2: Option<T>,
    /// Slope of ln|gap| against ln ε² (rows with gap ≠ 0).
    pub slope_gap: Option<T>,
}

/// Least-squares slope of y against x; `None` with fewer than two points.
pub fn loglog_slope<T: Real>(pts: &[(T, T)]) -> Option<T> {
    if pts.len() < 2 {
        return None;
    }
    let n = T::from_count(pts.len());
    let mx = pts.iter().fold(T::zero(), |s, p| s + p.0) / n;
    let my = pts.iter().fold(T::zero(), |s, p| s + p.1) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for p in pts {
        sxy += (p.0 - mx) * (p.1 - my);
        sxx += (p.0 - mx) * (p.0 - mx);
    }
    if sxx > T::zero() {
        Some(sxy / sxx)
    } else {
        None
    }
}

/// MHD growth rates against the Euler quotient for a list of field strengths (b ≡ 1).
pub fn compare_eps_scaling<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize, eps_list: &[T]) -> Result<EpsScaling<T>> {
    if !p.has_uniform_field() {
        return Err(Error::Precondition("the comparison is set up for b ≡ 1".into()));
    }
    let lambda2 = euler_lambda_k(p, g, k)?;
    let rows: Vec<Comparison<T>> = eps_list
        .iter()
        .map(|&eps| {
            let gen = assemble_generator(&p.with_eps(eps), g, k)?;
            let big = gen.unstable_mu().first().copied().unwrap_or(T::zero());
            Ok(Comparison { eps, k, big_lambda2: big, lambda2, gap: big - lambda2 })
        })
        .collect::<Result<_>>()?;
    let lg = |x: T| x.ln();
    let pts_big: Vec<(T, T)> = rows.iter().filter(|r| r.big_lambda2 > T::zero()).map(|r| (lg(r.eps * r.eps), lg(r.big_lambda2))).collect();
    let pts_gap: Vec<(T, T)> = rows.iter().filter(|r| r.gap != T::zero()).map(|r| (lg(r.eps * r.eps), lg(r.gap.abs()))).collect();
    Ok(EpsScaling { slope_big_lambda2: loglog_slope(&pts_big), slope_gap: loglog_slope(&pts_gap), rows })
}

/// Zero-field summary of a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerReport<T> {
    pub rayleigh_stable: bool,
    pub a1: T,
    /// (k, λ_k²).
    pub lambda_k2: Vec<(usize, T)>,
    pub comparisons: Option<EpsScaling<T>>,
}

/// Rayleigh verdict, a₁ and λ_k² for `ks`, plus the comparison when `eps_list` is nonempty.
pub fn euler_report<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, ks: &[usize], eps_list: &[T], compare_k: usize) -> Result<EulerReport<T>> {
    let lambda_k2 = ks.iter().map(|&k| Ok((k, euler_lambda_k(p, g, k)?))).collect::<Result<Vec<_>>>()?;
    let comparisons = if eps_list.is_empty() { None } else { Some(compare_eps_scaling(p, g, compare_k, eps_list)?) };
    Ok(EulerReport { rayleigh_stable: rayleigh_classify(p, g), a1: euler_a1(p, g), lambda_k2, comparisons })
}

/// Checks the report invariants: λ_k² nondecreasing in k where positive and bounded by a₁.
pub fn report_is_consistent<T: Real>(r: &EulerReport<T>) -> bool {
    let tol = c::<T>(1e-8) * (r.a1 + T::one());
    let bounded = r.lambda_k2.iter().all(|(_, l)| *l <= r.a1 + tol);
    let mut sorted = r.lambda_k2.clone();
    sorted.sort_by_key(|x| x.0);
    let monotone = sorted.windows(2).all(|w| w[0].1 <= T::zero() || w[1].1 + tol >= w[0].1);
    bounded && monotone
}
