//! Per-mode linearized MHD and Euler dynamics: Leray projection, Hamiltonian
//! generator, spectrum and time stepping.

mod generator;
mod projection;
mod sim;
mod state;

pub use generator::{assemble_euler_generator, assemble_generator, generator_spectrum, Generator, GeneratorKind, Spectrum, UNSTABLE_RTOL};
pub use projection::{project_divfree, Staggered};
pub use sim::{run_simulation, run_simulation_every, step_rk4, SimReport, FIT_GROWTH, OVERFLOW_NORM};
pub use state::LinearState;

use crate::error::Result;
use crate::modes::{reconstruct_fields, ModeSolution, ModeSource};
use crate::num::{c, Real};
use crate::operators::RadialGrid;
use crate::profiles::RadialProfile;

/// Conserved form of a stacked state.
pub fn quadratic_form<T: Real>(gen: &Generator<T>, x: &[T]) -> Result<T> {
    gen.quadratic_form(x)
}

/// Second-order derivative of nodal samples on a nonuniform grid.
fn nodal_derivative<T: Real>(r: &[T], v: &[T]) -> Vec<T> {
    let n = r.len();
    let three = |i: usize, j0: usize| {
        let (x0, x1, x2) = (r[j0], r[j0 + 1], r[j0 + 2]);
        let x = r[i];
        let l0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
        let l1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
        let l2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
        l0 * v[j0] + l1 * v[j0 + 1] + l2 * v[j0 + 2]
    };
    (0..n).map(|i| three(i, i.saturating_sub(1).min(n - 3))).collect()
}

/// Fastest growing mode at k from the discrete generator, for any field profile.
///
/// Λ² is the top eigenvalue of the reduced pencil, located by bisection on a
/// tridiagonal Sturm count; the radial structure comes from inverse iteration.
pub fn generator_mode<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize) -> Result<Option<ModeSolution<T>>> {
    let gen = assemble_generator(p, g, k)?;
    let mus = gen.unstable_mu();
    let Some(&mu) = mus.first() else {
        return Ok(None);
    };
    let lambda = mu.sqrt();
    let a = gen.schur_null_vector(mu);
    let n = g.cells();
    let mut phi = vec![T::zero(); n + 1];
    for i in 1..n {
        phi[i] = gen.eps_rb(i) * a[i - 1] / lambda;
    }
    let peak = phi.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let first = phi.iter().copied().find(|v| v.abs() > c::<T>(1e-8) * peak).unwrap_or(T::one());
    let scale = if first < T::zero() { -peak } else { peak };
    for v in phi.iter_mut() {
        *v /= scale;
    }
    let r = g.nodes().to_vec();
    let dphi = nodal_derivative(&r, &phi);
    let fields = reconstruct_fields(p, k, lambda, &r, &phi, &dphi);
    let roots = mus.iter().map(|m| m.sqrt()).collect();
    Ok(Some(ModeSolution { k, lambda, r, phi, dphi, fields, roots, near_upper_bound: false, source: ModeSource::Generator }))
}

#[cfg(test)]
mod tests;
