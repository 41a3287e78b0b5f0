use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generator::{Generator, GeneratorKind};
use crate::error::{Error, Result};
use crate::num::{c, Real};

/// Per-k perturbation amplitudes.
///
/// u_r, u_θ, φ, B_θ are sampled on the grid nodes (u_r and φ vanish at both
/// ends); u_z lives on cell centres. For Euler states φ and B_θ are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearState<T> {
    pub k: usize,
    pub u_r: Vec<T>,
    pub u_theta: Vec<T>,
    pub u_z: Vec<T>,
    pub phi: Vec<T>,
    pub b_theta: Vec<T>,
}

impl<T: Real> LinearState<T> {
    /// Unpacks a stacked generator state; u_z is recovered from the divergence constraint.
    pub fn from_vec(gen: &Generator<T>, x: &[T]) -> Result<Self> {
        if x.len() != gen.dim() {
            return Err(Error::Domain(format!("state has length {}, generator expects {}", x.len(), gen.dim())));
        }
        let n = gen.cells();
        let m = n - 1;
        let pad = |v: &[T]| {
            let mut out = vec![T::zero(); n + 1];
            out[1..n].copy_from_slice(v);
            out
        };
        let a = &x[..m];
        let u_z = gen.ops.uz_of(a);
        let (phi, b_theta) = match gen.kind {
            GeneratorKind::Euler => (vec![T::zero(); n + 1], vec![T::zero(); n + 1]),
            GeneratorKind::Mhd => (pad(&x[m + n + 1..2 * m + n + 1]), x[2 * m + n + 1..].to_vec()),
        };
        Ok(Self { k: gen.k, u_r: pad(a), u_theta: x[m..m + n + 1].to_vec(), u_z, phi, b_theta })
    }

    /// Stacks the state for `gen` after Leray-projecting (u_r, u_z).
    pub fn to_vec(&self, gen: &Generator<T>) -> Result<Vec<T>> {
        let n = gen.cells();
        let m = n - 1;
        let ok = self.u_r.len() == n + 1 && self.u_theta.len() == n + 1 && self.u_z.len() == n && self.phi.len() == n + 1 && self.b_theta.len() == n + 1;
        if !ok || self.k != gen.k {
            return Err(Error::Domain("state does not match the generator grid or wavenumber".into()));
        }
        let (a, _) = gen.ops.project(&self.u_r[1..n], &self.u_z);
        let mut x = Vec::with_capacity(gen.dim());
        x.extend_from_slice(&a);
        x.extend_from_slice(&self.u_theta);
        if gen.kind == GeneratorKind::Mhd {
            x.extend_from_slice(&self.phi[1..n]);
            x.extend_from_slice(&self.b_theta);
        }
        debug_assert_eq!(x.len(), 2 * m + 2 + if gen.kind == GeneratorKind::Mhd { 2 * m + 2 } else { 0 });
        Ok(x)
    }

    /// Reproducible random state with entries uniform in [−1, 1], made divergence-free.
    pub fn random(gen: &Generator<T>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<T> = (0..gen.dim()).map(|_| c::<T>(rng.gen_range(-1.0..1.0))).collect();
        Self::from_vec(gen, &x).expect("dimension matches")
    }

    /// Smooth state: each component is the lowest sine on [R₁, R₂].
    pub fn smooth(gen: &Generator<T>) -> Self {
        let r = gen.grid.nodes();
        let n = gen.cells();
        let m = n - 1;
        let (r1, len) = (gen.grid.r1(), gen.grid.r2() - gen.grid.r1());
        let bump: Vec<T> = (1..n).map(|i| (T::pi() * (r[i] - r1) / len).sin()).collect();
        let mut x = Vec::with_capacity(gen.dim());
        x.extend_from_slice(&bump);
        x.extend(r.iter().map(|&ri| (T::pi() * (ri - r1) / len).cos()));
        if gen.kind == GeneratorKind::Mhd {
            x.extend(bump.iter().map(|&v| v * gen.eps));
            x.extend(r.iter().map(|&ri| (T::pi() * (ri - r1) / len).sin()));
        }
        debug_assert!(x.len() == gen.dim() && bump.len() == m);
        Self::from_vec(gen, &x).expect("dimension matches")
    }

    /// Discrete divergence (1/r)∂_r(r u_r) + k u_z per cell.
    pub fn divergence(&self, gen: &Generator<T>) -> Vec<T> {
        let n = gen.cells();
        gen.ops.divergence(&self.u_r[1..n], &self.u_z)
    }
}
