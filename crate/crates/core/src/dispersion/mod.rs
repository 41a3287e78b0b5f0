//! Local WKB dispersion relation and its small-field branches.

use crate::error::{Error, Result};
use crate::modes::growth_rate_any;
use crate::num::{c, Real};
use crate::operators::RadialGrid;
use crate::profiles::RadialProfile;

/// Local data at radius r₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionInput<T> {
    pub r0: T,
    pub upsilon0: T,
    pub omega0: T,
    pub eps: T,
    pub k: T,
    pub kr: T,
}

impl<T: Real> DispersionInput<T> {
    /// Local data of a profile at r₀.
    pub fn at(p: &RadialProfile<T>, r0: T, k: T, kr: T) -> Self {
        Self { r0, upsilon0: p.eval_rayleigh(r0), omega0: p.omega(r0), eps: p.eps, k, kr }
    }

    fn check(&self) -> Result<()> {
        if !(self.kr > T::zero()) || self.k == T::zero() {
            return Err(Error::Domain("dispersion needs k_r > 0 and k ≠ 0".into()));
        }
        Ok(())
    }

    /// Coefficients (a₂, a₁, a₀) of a₂X² + a₁X + a₀ = 0 in X = Λ² + ε²k².
    pub fn coefficients(&self) -> (T, T, T) {
        let k2 = self.k * self.k;
        let q = k2 / (self.kr * self.kr);
        let a2 = T::one() + q;
        let a1 = q * self.upsilon0;
        let a0 = -q * k2 * c::<T>(4.0) * self.eps * self.eps * self.omega0 * self.omega0;
        (a2, a1, a0)
    }
}

/// Branch label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Epicyclic,
    Mri,
    /// Equal |X| (double root).
    Degenerate,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Epicyclic => "epicyclic",
            Branch::Mri => "mri",
            Branch::Degenerate => "degenerate",
        }
    }
}

/// Both roots, epicyclic (larger |X|) first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRoots<T> {
    pub x: [T; 2],
    pub lambda2: [T; 2],
    pub labels: [Branch; 2],
}

/// Exact roots by the cancellation-free quadratic formula.
pub fn dispersion_roots<T: Real>(input: &DispersionInput<T>) -> Result<DispersionRoots<T>> {
    input.check()?;
    let (a2, a1, a0) = input.coefficients();
    // a₀ ≤ 0 < a₂, so the discriminant is nonnegative
    let disc = (a1 * a1 - c::<T>(4.0) * a2 * a0).max(T::zero());
    let sgn = if a1 < T::zero() { -T::one() } else { T::one() };
    let q = -(a1 + sgn * disc.sqrt()) * c::<T>(0.5);
    let (x1, x2) = if q == T::zero() { (T::zero(), T::zero()) } else { (q / a2, a0 / q) };
    let (big, small) = if x1.abs() >= x2.abs() { (x1, x2) } else { (x2, x1) };
    let labels = if big.abs() == small.abs() { [Branch::Degenerate; 2] } else { [Branch::Epicyclic, Branch::Mri] };
    let ek = input.eps * input.eps * input.k * input.k;
    Ok(DispersionRoots { x: [big, small], lambda2: [big - ek, small - ek], labels })
}

/// Residual of a root divided by the coefficient norm.
pub fn relative_residual<T: Real>(input: &DispersionInput<T>, x: T) -> T {
    let (a2, a1, a0) = input.coefficients();
    let scale = (a2 * a2 + a1 * a1 + a0 * a0).sqrt();
    let xs = x.abs().max(T::one());
    (a2 * x * x + a1 * x + a0).abs() / (scale * xs * xs)
}

/// Leading-order branches for ε²k² ≪ |Υ(r₀)|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRoots<T> {
    pub epicyclic_lambda2: T,
    pub mri_lambda2: T,
    /// ε²k²/|Υ| ≥ 0.1: outside the expansion's range.
    pub outside_range: bool,
}

/// Epicyclic −k²Υ/(k²+k_r²) − (4ω²/Υ + 1)ε²k² and MRI (4ω²/Υ − 1)ε²k²,
/// where 4ω²/Υ − 1 = −r∂_r(ω²)/Υ.
pub fn asymptotic_roots<T: Real>(input: &DispersionInput<T>) -> Result<AsymptoticRoots<T>> {
    input.check()?;
    let u = input.upsilon0;
    let w2 = input.omega0 * input.omega0;
    if u.abs() <= T::EPS * c::<T>(16.0) * (w2 + T::one()) {
        return Err(Error::Degenerate("Υ(r₀) = 0".into()));
    }
    let k2 = input.k * input.k;
    let ek = input.eps * input.eps * k2;
    let ratio = c::<T>(4.0) * w2 / u;
    Ok(AsymptoticRoots {
        epicyclic_lambda2: -k2 * u / (k2 + input.kr * input.kr) - (ratio + T::one()) * ek,
        mri_lambda2: (ratio - T::one()) * ek,
        outside_range: ek / u.abs() >= c::<T>(0.1),
    })
}

/// One row of [`local_vs_global`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGlobalRow<T> {
    pub kr: T,
    /// Node maximizing the local MRI-branch Λ².
    pub r0_argmax: T,
    pub lambda2_local: T,
    /// Largest global growth rate at this k, if unstable.
    pub lambda_global: Option<T>,
}

/// Local MRI-branch Λ² maximized over the grid nodes, for each k_r, next to the global rate.
pub fn local_vs_global<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize, kr_list: &[T]) -> Result<Vec<LocalGlobalRow<T>>> {
    let global = growth_rate_any(p, g, k)?.map(|m| m.lambda);
    let kk = T::from_count(k);
    kr_list
        .iter()
        .map(|&kr| {
            let mut best = (g.r1(), -T::MAX);
            for &r in g.nodes() {
                let roots = dispersion_roots(&DispersionInput::at(p, r, kk, kr))?;
                let mri = roots.lambda2[1];
                if mri > best.1 {
                    best = (r, mri);
                }
            }
            Ok(LocalGlobalRow { kr, r0_argmax: best.0, lambda2_local: best.1, lambda_global: global })
        })
        .collect()
}

#[cfg(test)]
mod tests;
