use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::num::Real;

/// Eigenpairs of K x = λ M x with M symmetric positive definite.
///
/// Eigenvalues ascending; eigenvectors are the columns, M-orthonormal.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: DMatrix<T>,
}

/// Dense generalized symmetric eigensolve by Cholesky reduction of `m`.
pub fn generalized_eigen<T: Real>(k: &DMatrix<T>, m: &DMatrix<T>) -> Result<GeneralizedEigen<T>> {
    let n = k.nrows();
    let chol = Cholesky::new(m.clone()).ok_or_else(|| Error::Numeric("metric is not positive definite".into()))?;
    let l = chol.l();
    // C = L⁻¹ K L⁻ᵀ
    let mut y = k.clone();
    if !l.solve_lower_triangular_mut(&mut y) {
        return Err(Error::Numeric("singular metric factor".into()));
    }
    let mut ct = y.transpose();
    if !l.solve_lower_triangular_mut(&mut ct) {
        return Err(Error::Numeric("singular metric factor".into()));
    }
    let sym = (&ct + ct.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut z = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        z.set_column(col, &eig.eigenvectors.column(i));
    }
    let lt = l.transpose();
    if !lt.solve_upper_triangular_mut(&mut z) {
        return Err(Error::Numeric("singular metric factor".into()));
    }
    Ok(GeneralizedEigen { values, vectors: z })
}

/// Flips `v` so its first entry of non-negligible size is positive.
pub fn normalize_sign<T: Real>(v: &mut DVector<T>) {
    let scale = v.amax();
    if let Some(x) = v.iter().find(|x| x.abs() > scale * T::lit(1e-8)) {
        if *x < T::zero() {
            v.neg_mut();
        }
    }
}
