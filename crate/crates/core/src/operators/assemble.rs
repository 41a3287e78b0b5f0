use super::form::TridiagonalForm;
use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::profiles::RadialProfile;

/// Form α∫(1/r)|φ′|² dr + ∫P(r)|φ|² dr on hat functions.
///
/// The 1/r stiffness is integrated exactly per cell; the potential uses
/// nodal (lumped) quadrature with the dual-cell lengths.
pub fn assemble_weighted<T: Real>(g: &RadialGrid<T>, alpha: T, k: usize, potential: impl Fn(usize, T) -> T) -> Result<TridiagonalForm<T>> {
    if !(g.r1() > T::zero()) {
        return Err(Error::InvalidGrid("forms with 1/r weights need R₁ > 0".into()));
    }
    let n = g.cells();
    let stiff: Vec<T> = (0..n)
        .map(|i| {
            let h = g.h(i);
            alpha * (h / g.nodes()[i]).ln_1p() / (h * h)
        })
        .collect();
    let m = g.interior();
    let mut diag = Vec::with_capacity(m);
    for j in 0..m {
        let node = j + 1;
        let r = g.nodes()[node];
        diag.push(stiff[node - 1] + stiff[node] + g.dual(node) * potential(node, r));
    }
    let off = (0..m.saturating_sub(1)).map(|j| -stiff[j + 1]).collect();
    Ok(TridiagonalForm { diag, off, grid: g.clone(), k })
}

fn node_values<T: Real>(g: &RadialGrid<T>, f: impl Fn(T) -> Result<T>) -> Result<Vec<T>> {
    g.nodes().iter().map(|&r| f(r)).collect()
}

/// ⟨𝕃_k φ, φ⟩ = ∫ (1/r)|φ′|² + (k²/r)|φ|² + F·r|φ|² dr.
pub fn assemble_lk<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize) -> Result<TridiagonalForm<T>> {
    if p.eps == T::zero() {
        return Err(Error::ZeroEps("𝕃_k contains ∂_r(ω²)/ε²"));
    }
    let kk = T::from_count(k * k);
    let f = node_values(g, |r| p.eval_f(r))?;
    assemble_weighted(g, T::one(), k, |i, r| kk / r + f[i] * r)
}

/// ε²·⟨𝕃_k φ, φ⟩, finite as ε → 0.
pub fn assemble_lk_scaled<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize) -> Result<TridiagonalForm<T>> {
    let e2 = p.eps * p.eps;
    let kk = T::from_count(k * k);
    assemble_weighted(g, e2, k, |_, r| {
        let b = p.b(r);
        e2 * kk / r + p.domega2(r) / (b * b) + e2 * r * p.field_curvature(r)
    })
}

/// ⟨L̂φ, φ⟩ = ∫ (1/r)|φ′|² + (1/r)|φ|² + (b″/(rb) − b′/(r²b))|φ|² dr.
pub fn assemble_lhat<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Result<TridiagonalForm<T>> {
    assemble_weighted(g, T::one(), 0, |_, r| T::one() / r + r * p.field_curvature(r))
}

/// H^r_mag inner product ∫ (1/r)(|φ′|² + |φ|²) dr.
pub fn metric_form<T: Real>(g: &RadialGrid<T>) -> Result<TridiagonalForm<T>> {
    assemble_weighted(g, T::one(), 0, |_, r| T::one() / r)
}

/// Diagonal of ∫ (∂_r(ω²)/b²)|φ|² dr on interior nodes.
pub fn shear_weight<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>) -> Vec<T> {
    (1..=g.interior())
        .map(|i| {
            let r = g.nodes()[i];
            let b = p.b(r);
            g.dual(i) * p.domega2(r) / (b * b)
        })
        .collect()
}
