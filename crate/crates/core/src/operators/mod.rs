//! Discrete quadratic forms on Dirichlet radial grid functions and their inertia.

mod assemble;
mod dense;
mod form;
mod grid;

pub use assemble::{assemble_lhat, assemble_lk, assemble_lk_scaled, assemble_weighted, metric_form, shear_weight};
pub use dense::{generalized_eigen, normalize_sign, GeneralizedEigen};
pub use form::{count_below, inertia, Inertia, TridiagonalForm, DEFAULT_ZERO_TOL};
pub(crate) use form::sturm_count;
pub use grid::{RadialGrid, Spacing, MIN_CELLS};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::num::{c, Real};
use crate::profiles::RadialProfile;

/// Default largest axial wavenumber tried by [`unstable_mode_count`].
pub const DEFAULT_K_MAX_HINT: usize = 64;

/// Result of [`eigen_extremes`].
#[derive(Debug, Clone)]
pub struct Extremes<T: Real> {
    /// Ascending eigenvalues with M-normalized eigenvectors on interior nodes.
    pub pairs: Vec<(T, DVector<T>)>,
    /// The request exceeded the dimension and was reduced.
    pub clamped: bool,
}

/// The `m` algebraically smallest eigenpairs of K x = λ M x, M the H^r_mag metric.
pub fn eigen_extremes<T: Real>(f: &TridiagonalForm<T>, m: usize) -> Result<Extremes<T>> {
    let metric = metric_form(&f.grid)?;
    let e = generalized_eigen(&f.to_dense(), &metric.to_dense())?;
    let clamped = m > f.dim();
    let m = m.min(f.dim());
    let pairs = (0..m)
        .map(|j| {
            let mut v = e.vectors.column(j).into_owned();
            normalize_sign(&mut v);
            (e.values[j], v)
        })
        .collect();
    Ok(Extremes { pairs, clamped })
}

/// Smallest eigenvalue of ∫|φ′|² against the lumped L² mass on the grid.
pub fn discrete_poincare<T: Real>(g: &RadialGrid<T>) -> Result<T> {
    let n = g.cells();
    let s: Vec<T> = (0..n).map(|i| T::one() / g.h(i)).collect();
    let m = g.interior();
    let stiff = TridiagonalForm {
        diag: (0..m).map(|j| s[j] + s[j + 1]).collect(),
        off: (0..m.saturating_sub(1)).map(|j| -s[j + 1]).collect(),
        grid: g.clone(),
        k: 0,
    };
    let mass = TridiagonalForm { diag: (1..=m).map(|i| g.dual(i)).collect(), off: vec![T::zero(); m.saturating_sub(1)], grid: g.clone(), k: 0 };
    let mut lo = T::zero();
    let mut hi = (0..m).fold(T::zero(), |a, j| a.max(c::<T>(2.0) * stiff.diag[j] / mass.diag[j]));
    if hi == T::zero() {
        return Err(Error::InvalidGrid("empty interior".into()));
    }
    for _ in 0..200 {
        let mid = (lo + hi) * c::<T>(0.5);
        if count_below(&stiff, &mass, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= T::EPS * hi {
            break;
        }
    }
    Ok(lo)
}

/// Pointwise positivity certificate: n⁻(𝕃_k) = 0 for this and every larger k.
///
/// The discrete stiffness satisfies ∫(1/r)|φ′|² ≥ (λ_h/R₂)·Σ w_i φ_i², so the
/// form is positive whenever k²/r_i + F(r_i)·r_i + λ_h/R₂ > 0 at all interior nodes.
pub fn certificate_holds<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize, lambda_h: T) -> Result<bool> {
    let kk = T::from_count(k * k);
    for &r in g.interior_nodes() {
        if !(kk / r + p.eval_f(r)? * r + lambda_h / g.r2() > T::zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Total unstable mode count 2·Σ_k n⁻(𝕃_k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeCount {
    pub total: usize,
    /// n⁻(𝕃_k) for k = 1, 2, …, K.
    pub per_k: Vec<usize>,
    /// First k with n⁻ = 0 and a positivity certificate.
    pub k_certified: usize,
}

pub fn unstable_mode_count<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k_max_hint: usize) -> Result<ModeCount> {
    let lambda_h = discrete_poincare(g)?;
    let tol = c::<T>(DEFAULT_ZERO_TOL);
    let mut per_k = Vec::new();
    for k in 1..=k_max_hint {
        let n = inertia(&assemble_lk(p, g, k)?, tol).n_neg;
        per_k.push(n);
        if n == 0 && certificate_holds(p, g, k, lambda_h)? {
            let total = 2 * per_k.iter().sum::<usize>();
            return Ok(ModeCount { total, per_k, k_certified: k });
        }
    }
    Err(Error::IncompleteCount { k_max: k_max_hint, per_k })
}
