use nalgebra::{DMatrix, DVector};

use super::grid::RadialGrid;
use crate::num::{c, Real};

/// Symmetric tridiagonal matrix of a quadratic form on interior-node grid functions.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalForm<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
    pub grid: RadialGrid<T>,
    pub k: usize,
}

/// Counts of negative, near-zero and positive directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
    /// A zero pivot was met and perturbed.
    pub perturbed: bool,
}

/// Default relative zero tolerance for [`inertia`].
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

impl<T: Real> TridiagonalForm<T> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Largest diagonal magnitude.
    pub fn scale(&self) -> T {
        self.diag.iter().fold(T::zero(), |m, d| m.max(d.abs()))
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// xᵀKx.
    pub fn quadratic(&self, x: &[T]) -> T {
        self.apply(x).iter().zip(x).fold(T::zero(), |s, (a, b)| s + *a * *b)
    }

    /// xᵀKy.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        self.apply(y).iter().zip(x).fold(T::zero(), |s, (a, b)| s + *a * *b)
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }

    pub fn to_dvector_apply(&self, x: &DVector<T>) -> DVector<T> {
        DVector::from_vec(self.apply(x.as_slice()))
    }

    /// K − σ·M for another form M on the same grid.
    pub fn shifted(&self, sigma: T, m: &TridiagonalForm<T>) -> TridiagonalForm<T> {
        TridiagonalForm {
            diag: self.diag.iter().zip(&m.diag).map(|(a, b)| *a - sigma * *b).collect(),
            off: self.off.iter().zip(&m.off).map(|(a, b)| *a - sigma * *b).collect(),
            grid: self.grid.clone(),
            k: self.k,
        }
    }

    /// αK + βM.
    pub fn combine(&self, alpha: T, m: &TridiagonalForm<T>, beta: T) -> TridiagonalForm<T> {
        TridiagonalForm {
            diag: self.diag.iter().zip(&m.diag).map(|(a, b)| alpha * *a + beta * *b).collect(),
            off: self.off.iter().zip(&m.off).map(|(a, b)| alpha * *a + beta * *b).collect(),
            grid: self.grid.clone(),
            k: self.k,
        }
    }

    /// Adds a diagonal.
    pub fn plus_diag(&self, d: &[T]) -> TridiagonalForm<T> {
        TridiagonalForm {
            diag: self.diag.iter().zip(d).map(|(a, b)| *a + *b).collect(),
            off: self.off.clone(),
            grid: self.grid.clone(),
            k: self.k,
        }
    }
}

/// Number of negative pivots of the LDLᵀ factorization of K − σI.
///
/// Returns the count and whether a zero pivot had to be perturbed.
pub(crate) fn sturm_count<T: Real>(diag: &[T], off: &[T], sigma: T, scale: T) -> (usize, bool) {
    let tiny = c::<T>(1e-14) * if scale > T::zero() { scale } else { T::one() };
    let mut count = 0;
    let mut perturbed = false;
    let mut d = T::zero();
    for i in 0..diag.len() {
        let mut p = diag[i] - sigma;
        if i > 0 {
            p -= off[i - 1] * off[i - 1] / d;
        }
        if p == T::zero() {
            p = tiny;
            perturbed = true;
        }
        if p < T::zero() {
            count += 1;
        }
        d = p;
    }
    (count, perturbed)
}

/// Sylvester inertia via tridiagonal LDLᵀ.
///
/// Eigenvalues in (−zero_tol, zero_tol)·scale count as zero, with scale the
/// largest diagonal magnitude.
pub fn inertia<T: Real>(f: &TridiagonalForm<T>, zero_tol: T) -> Inertia {
    let scale = f.scale();
    let tol = zero_tol * scale;
    let (below_neg, p1) = sturm_count(&f.diag, &f.off, -tol, scale);
    let (below_pos, p2) = if tol > T::zero() { sturm_count(&f.diag, &f.off, tol, scale) } else { (below_neg, false) };
    Inertia { n_neg: below_neg, n_zero: below_pos - below_neg, n_pos: f.dim() - below_pos, perturbed: p1 || p2 }
}

/// Number of generalized eigenvalues of (K, M) below σ, M positive definite.
pub fn count_below<T: Real>(k: &TridiagonalForm<T>, m: &TridiagonalForm<T>, sigma: T) -> usize {
    let s = k.shifted(sigma, m);
    let scale = s.scale();
    sturm_count(&s.diag, &s.off, T::zero(), scale).0
}
