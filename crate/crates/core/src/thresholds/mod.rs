//! Sharp stability criterion and field-strength thresholds.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::num::{c, Real};
use crate::operators::{
    assemble_lhat, assemble_lk, generalized_eigen, inertia, metric_form, normalize_sign, shear_weight, RadialGrid, TridiagonalForm,
    DEFAULT_ZERO_TOL,
};
use crate::profiles::{FieldShape, RadialProfile};

/// Outcome of the sharp criterion n⁻(𝕃₁) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub n_neg_l1: usize,
    pub criterion: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    /// B₀² for b ≡ 1.
    B0Squared,
    /// ε_min².
    EpsMinSquared,
    /// ε_max².
    EpsMaxSquared,
}

impl ThresholdKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdKind::B0Squared => "B0_squared",
            ThresholdKind::EpsMinSquared => "eps_min_squared",
            ThresholdKind::EpsMaxSquared => "eps_max_squared",
        }
    }
}

/// A threshold value with the radial function attaining the defining quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold<T> {
    pub value: T,
    /// Samples on all grid nodes, zero at both ends.
    pub maximizer: Vec<T>,
    pub kind: ThresholdKind,
}

/// Stable iff 𝕃₁ has no negative direction.
pub fn classify<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Result<StabilityVerdict> {
    let n = inertia(&assemble_lk(p, g, 1)?, c::<T>(DEFAULT_ZERO_TOL)).n_neg;
    Ok(StabilityVerdict { stable: n == 0, n_neg_l1: n, criterion: "sharp-L1" })
}

/// Verdicts along a list of field strengths.
pub fn classify_sweep<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, eps: &[T]) -> Result<Vec<StabilityVerdict>> {
    eps.iter().map(|&e| classify(&p.with_eps(e), g)).collect()
}

/// `count` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geometric_points<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let q = (hi / lo).ln() / T::from_count(count - 1);
    (0..count).map(|i| lo * (q * T::from_count(i)).exp()).collect()
}

fn pad<T: Real>(v: &DVector<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(v.len() + 2);
    out.push(T::zero());
    out.extend(v.iter().copied());
    out.push(T::zero());
    out
}

fn diag_matrix<T: Real>(d: &[T]) -> DMatrix<T> {
    DMatrix::from_diagonal(&DVector::from_column_slice(d))
}

/// Largest eigenpair of (A, M), M positive definite.
fn top_pair<T: Real>(a: &DMatrix<T>, m: &DMatrix<T>) -> Result<(T, DVector<T>)> {
    let e = generalized_eigen(a, m)?;
    let j = e.values.len() - 1;
    let mut v = e.vectors.column(j).into_owned();
    normalize_sign(&mut v);
    Ok((e.values[j], v))
}

fn require_uniform_field<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Result<()> {
    let tol = c::<T>(1e-12);
    for &r in g.nodes() {
        let (b, db, d2b) = p.b3(r);
        if (b - T::one()).abs() > tol || db.abs() > tol || d2b.abs() > tol {
            return Err(Error::Precondition(format!("B₀ is defined for b ≡ 1; b({}) = {}", r.as_f64(), b.as_f64())));
        }
    }
    Ok(())
}

/// B₀² = max{sup −∫∂_r(ω²)|φ|² / ‖φ‖²_{H^r_mag}, 0} for b ≡ 1.
pub fn compute_b0<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Result<Threshold<T>> {
    require_uniform_field(p, g)?;
    let n: Vec<T> = shear_weight(p, g).into_iter().map(|x| -x).collect();
    let m = metric_form(g)?;
    let (mu, v) = top_pair(&diag_matrix(&n), &m.to_dense())?;
    Ok(Threshold { value: mu.max(T::zero()), maximizer: pad(&v), kind: ThresholdKind::B0Squared })
}

/// ε_min² = max{sup −∫(∂_r(ω²)/b²)|φ|² / ⟨L̂φ,φ⟩, 0}; requires L̂ > 0.
pub fn compute_eps_min<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Result<Threshold<T>> {
    let lhat = assemble_lhat(p, g)?;
    let i = inertia(&lhat, c::<T>(DEFAULT_ZERO_TOL));
    if i.n_neg > 0 || i.n_zero > 0 {
        return Err(Error::WrongRegime(format!(
            "L̂ is not positive definite (n_neg = {}, n_zero = {}); use compute_eps_max or the mixed-sign sweep",
            i.n_neg, i.n_zero
        )));
    }
    let n: Vec<T> = shear_weight(p, g).into_iter().map(|x| -x).collect();
    let (mu, v) = top_pair(&diag_matrix(&n), &lhat.to_dense())?;
    Ok(Threshold { value: mu.max(T::zero()), maximizer: pad(&v), kind: ThresholdKind::EpsMinSquared })
}

/// ε_max² with 1/ε_max² = sup −⟨L̂φ,φ⟩ / ∫(∂_r(ω²)/b²)|φ|²; requires n⁻(L̂) > 0 and ∂_r(ω²) > 0.
pub fn compute_eps_max<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Result<Threshold<T>> {
    let weight = shear_weight(p, g);
    if weight.iter().any(|&w| !(w > T::zero())) {
        return Err(Error::WrongRegime("ε_max needs ∂_r(ω²) > 0 at every interior node".into()));
    }
    let lhat = assemble_lhat(p, g)?;
    eps_max_from_forms(&lhat, &weight)
}

/// ε_max² from an L̂ form and a positive shear weight.
pub fn eps_max_from_forms<T: Real>(lhat: &TridiagonalForm<T>, weight: &[T]) -> Result<Threshold<T>> {
    let i = inertia(lhat, c::<T>(DEFAULT_ZERO_TOL));
    if i.n_neg == 0 {
        return Err(Error::WrongRegime("ε_max needs n⁻(L̂) > 0; here L̂ ≥ 0, use compute_eps_min".into()));
    }
    if weight.iter().any(|&w| !(w > T::zero())) {
        return Err(Error::WrongRegime("ε_max needs a positive shear weight".into()));
    }
    let (nu, v) = top_pair(&(-lhat.to_dense()), &diag_matrix(weight))?;
    Ok(Threshold { value: T::one() / nu, maximizer: pad(&v), kind: ThresholdKind::EpsMaxSquared })
}

/// Sign and ε → ∞ limit attached to a kernel direction of L̂.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPerturbation<T> {
    pub sign: i8,
    /// ∫(∂_r(ω²)/b²)|φ̂|² / ‖φ̂‖²_{H^r_mag}.
    pub limit: T,
    /// Smallest generalized eigenvalue of (L̂, metric).
    pub kernel_eigenvalue: T,
    /// φ̂ on all nodes.
    pub kernel: Vec<T>,
}

/// Default tolerance on the smallest generalized eigenvalue of (L̂, metric).
pub const DEFAULT_KERNEL_TOL: f64 = 1e-8;

/// L̂, the H^r_mag metric and the shear weight on one grid.
#[derive(Debug, Clone)]
pub struct KernelProblem<T: Real> {
    pub lhat: TridiagonalForm<T>,
    pub metric: TridiagonalForm<T>,
    pub weight: Vec<T>,
}

impl<T: Real> KernelProblem<T> {
    pub fn from_profile(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Result<Self> {
        Ok(Self { lhat: assemble_lhat(p, g)?, metric: metric_form(g)?, weight: shear_weight(p, g) })
    }

    /// Two smallest generalized eigenvalues of (L̂, metric) with the lowest eigenvector.
    pub fn lowest(&self) -> Result<(T, T, DVector<T>)> {
        let e = generalized_eigen(&self.lhat.to_dense(), &self.metric.to_dense())?;
        let mut v = e.vectors.column(0).into_owned();
        normalize_sign(&mut v);
        Ok((e.values[0], e.values[1], v))
    }

    pub fn perturbation(&self, tol: T) -> Result<KernelPerturbation<T>> {
        let (l0, l1, v) = self.lowest()?;
        if l0 < -tol {
            return Err(Error::WrongRegime(format!("n⁻(L̂) > 0 (smallest eigenvalue {:e})", l0.as_f64())));
        }
        if l0 > tol || l1 <= tol {
            return Err(Error::NoKernel { smallest: l0.as_f64() });
        }
        let num = v.iter().zip(&self.weight).fold(T::zero(), |s, (x, w)| s + *w * *x * *x);
        let den = self.metric.quadratic(v.as_slice());
        let limit = num / den;
        let sign = if limit > T::zero() { 1 } else { -1 };
        Ok(KernelPerturbation { sign, limit, kernel_eigenvalue: l0, kernel: pad(&v) })
    }

    /// λ_ε: the eigenvalue nearest 1 of  M φ + λ (N/ε² + C) φ = 0, with C = L̂ − M.
    pub fn lambda_eps(&self, eps: T) -> Result<T> {
        let m = self.metric.to_dense();
        let cm = self.lhat.to_dense() - &m;
        let e2 = eps * eps;
        let a = -(cm + diag_matrix(&self.weight) / e2);
        let e = generalized_eigen(&a, &m)?;
        // ν = 1/λ; choose the branch with ν closest to 1.
        let nu = e.values.iter().copied().fold(None, |best: Option<T>, x| match best {
            Some(b) if (b - T::one()).abs() <= (x - T::one()).abs() => Some(b),
            _ => Some(x),
        });
        let nu = nu.ok_or_else(|| Error::Numeric("empty spectrum".into()))?;
        Ok(T::one() / nu)
    }
}

/// Sign of ∫(∂_r(ω²)/b²)|φ̂|² for the kernel φ̂ of L̂ and the limit of ε²(λ_ε − 1).
pub fn kernel_perturbation_sign<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Result<KernelPerturbation<T>> {
    KernelProblem::from_profile(p, g)?.perturbation(c::<T>(DEFAULT_KERNEL_TOL))
}

/// Richardson extrapolation of ε²(λ_ε − 1) from ε, 2ε, 4ε (error model a + b/ε²).
pub fn extrapolate_lambda_limit<T: Real>(problem: &KernelProblem<T>, eps0: T) -> Result<T> {
    let vals: Vec<T> = [T::one(), c::<T>(2.0), c::<T>(4.0)]
        .iter()
        .map(|&s| {
            let e = eps0 * s;
            problem.lambda_eps(e).map(|l| e * e * (l - T::one()))
        })
        .collect::<Result<_>>()?;
    let r1 = (c::<T>(4.0) * vals[1] - vals[0]) / c::<T>(3.0);
    let r2 = (c::<T>(4.0) * vals[2] - vals[1]) / c::<T>(3.0);
    Ok((c::<T>(16.0) * r2 - r1) / c::<T>(15.0))
}

/// Field shape b_c(r) = 1 + c·exp(−((r − center)/width)²).
pub fn bump_field<T: Real>(amp: T, center: T, width: T) -> FieldShape<T> {
    FieldShape::Gaussian { amp, center, width }
}

/// Scans c ∈ [c_lo, c_hi] (c > −1) for a zero crossing of the smallest eigenvalue of
/// (L̂_c, metric) and refines it by bisection.
pub fn tune_field_kernel<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, center: T, width: T, c_lo: T, c_hi: T, scan: usize) -> Result<T> {
    let lowest = |amp: T| -> Result<T> {
        let q = p.with_field(bump_field(amp, center, width))?;
        Ok(KernelProblem::from_profile(&q, g)?.lowest()?.0)
    };
    let pts: Vec<T> = (0..scan).map(|i| c_lo + (c_hi - c_lo) * T::from_count(i) / T::from_count(scan - 1)).collect();
    let vals: Vec<T> = pts.iter().map(|&a| lowest(a)).collect::<Result<_>>()?;
    let Some(i) = (0..scan - 1).find(|&i| vals[i].signum_val() != vals[i + 1].signum_val()) else {
        let smallest = vals.iter().fold(T::MAX, |m, v| m.min(*v));
        return Err(Error::NoKernel { smallest: smallest.as_f64() });
    };
    let (mut a, mut b, mut fa) = (pts[i], pts[i + 1], vals[i]);
    for _ in 0..100 {
        let m = (a + b) * c::<T>(0.5);
        let fm = lowest(m)?;
        if fm.signum_val() == fa.signum_val() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a).abs() <= T::EPS * c::<T>(8.0) * (a.abs() + b.abs()) {
            break;
        }
    }
    Ok((a + b) * c::<T>(0.5))
}
