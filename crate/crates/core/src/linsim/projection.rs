use crate::error::{Error, Result};
use crate::num::Real;
use crate::operators::RadialGrid;

/// Symmetric tridiagonal system solved by LDLᵀ (Thomas) with a precomputed factorization.
#[derive(Debug, Clone)]
pub(crate) struct SymTridiag<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
    piv: Vec<T>,
    /// off_i / piv_i, the LDLᵀ multipliers.
    mult: Vec<T>,
}

impl<T: Real> SymTridiag<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        let n = diag.len();
        let mut piv = vec![T::zero(); n];
        for i in 0..n {
            let mut p = diag[i];
            if i > 0 {
                p -= off[i - 1] * off[i - 1] / piv[i - 1];
            }
            if !(p > T::zero()) {
                return Err(Error::Numeric("tridiagonal system is not positive definite".into()));
            }
            piv[i] = p;
        }
        let mult = off.iter().zip(&piv).map(|(o, p)| *o / *p).collect();
        Ok(Self { diag, off, piv, mult })
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = rhs.len();
        let mut y = rhs.to_vec();
        for i in 1..n {
            y[i] = y[i] - self.mult[i - 1] * y[i - 1];
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            x[i] = y[i] / self.piv[i];
            if i + 1 < n {
                let next = x[i + 1];
                x[i] -= self.mult[i] * next;
            }
        }
        x
    }

    /// xᵀ(LDLᵀ)x from the factors, the exact inverse of `solve` up to rounding.
    pub fn quadratic(&self, x: &[T]) -> T {
        let n = x.len();
        (0..n).fold(T::zero(), |s, i| {
            let y = if i + 1 < n { x[i] + self.mult[i] * x[i + 1] } else { x[i] };
            s + self.piv[i] * y * y
        })
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
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
}

/// Staggered grid operators at one axial wavenumber.
///
/// u_r lives on interior nodes (zero at both ends), u_z and pressure at cell
/// centres. Inner products carry the r-weight: nodes use w_i·r_i with w_i the
/// dual-cell length, cells use h_c·r_c.
#[derive(Debug, Clone)]
pub struct Staggered<T: Real> {
    pub k: T,
    pub r: Vec<T>,
    pub rc: Vec<T>,
    /// w_i·r_i on all nodes.
    pub w_node: Vec<T>,
    /// h_c·r_c on cells.
    pub w_cell: Vec<T>,
    dual: Vec<T>,
    pressure: SymTridiag<T>,
}

impl<T: Real> Staggered<T> {
    pub fn new(g: &RadialGrid<T>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("the projection needs k ≠ 0".into()));
        }
        let kk = T::from_count(k);
        let n = g.cells();
        let r = g.nodes().to_vec();
        let rc: Vec<T> = (0..n).map(|c| g.center(c)).collect();
        let dual: Vec<T> = (0..=n).map(|i| g.dual(i)).collect();
        let w_node: Vec<T> = (0..=n).map(|i| dual[i] * r[i]).collect();
        let w_cell: Vec<T> = (0..n).map(|c| g.h(c) * rc[c]).collect();
        // S = W_c·D·D*, D* q = ((q_{i−1} − q_i)/w_i on interior nodes, k q_c on cells).
        let mut diag = vec![T::zero(); n];
        let mut off = vec![T::zero(); n - 1];
        for c in 0..n {
            diag[c] = kk * kk * w_cell[c];
        }
        for i in 1..n {
            let t = r[i] / dual[i];
            diag[i - 1] += t;
            diag[i] += t;
            off[i - 1] = -t;
        }
        let pressure = SymTridiag::new(diag, off)?;
        Ok(Self { k: kk, r, rc, w_node, w_cell, dual, pressure })
    }

    pub fn cells(&self) -> usize {
        self.rc.len()
    }

    /// (1/r)∂_r(r u_r) + k u_z per cell; `ur` on interior nodes.
    pub fn divergence(&self, ur: &[T], uz: &[T]) -> Vec<T> {
        let n = self.cells();
        let ra = |i: usize| if i == 0 || i == n { T::zero() } else { self.r[i] * ur[i - 1] };
        (0..n).map(|c| (ra(c + 1) - ra(c)) / self.w_cell[c] + self.k * uz[c]).collect()
    }

    /// Gradient (∂_r q, −k q) of a cell-centred scalar.
    pub fn gradient(&self, q: &[T]) -> (Vec<T>, Vec<T>) {
        let n = self.cells();
        let gr = (1..n).map(|i| (q[i] - q[i - 1]) / self.dual[i]).collect();
        let gz = q.iter().map(|&x| -self.k * x).collect();
        (gr, gz)
    }

    /// Orthogonal projection onto discretely divergence-free fields via the
    /// pressure problem (1/r)(r p′)′ − k²p = div u with Neumann ends.
    pub fn project(&self, ur: &[T], uz: &[T]) -> (Vec<T>, Vec<T>) {
        let div = self.divergence(ur, uz);
        let rhs: Vec<T> = div.iter().zip(&self.w_cell).map(|(d, w)| -*d * *w).collect();
        let p = self.pressure.solve(&rhs);
        let (gr, gz) = self.gradient(&p);
        (ur.iter().zip(&gr).map(|(a, b)| *a - *b).collect(), uz.iter().zip(&gz).map(|(a, b)| *a - *b).collect())
    }

    /// u_z slaved to u_r by the divergence constraint.
    pub fn uz_of(&self, ur: &[T]) -> Vec<T> {
        let n = self.cells();
        let ra = |i: usize| if i == 0 || i == n { T::zero() } else { self.r[i] * ur[i - 1] };
        (0..n).map(|c| -(ra(c + 1) - ra(c)) / (self.k * self.w_cell[c])).collect()
    }

    /// Cᵀ W_c v for a cell vector v, where C is [`Self::uz_of`].
    pub fn uz_adjoint(&self, v: &[T]) -> Vec<T> {
        let n = self.cells();
        (1..n).map(|i| -self.r[i] * (v[i - 1] - v[i]) / self.k).collect()
    }

    /// Kinetic metric of divergence-free fields in terms of u_r:
    /// M_a = diag(w_i r_i) + Cᵀ W_c C.
    pub(crate) fn velocity_metric(&self) -> Result<SymTridiag<T>> {
        let n = self.cells();
        let k2 = self.k * self.k;
        let mut diag = vec![T::zero(); n - 1];
        let mut off = vec![T::zero(); n.saturating_sub(2)];
        for j in 0..n - 1 {
            let i = j + 1;
            let ri2 = self.r[i] * self.r[i];
            diag[j] = self.w_node[i] + ri2 / (k2 * self.w_cell[i - 1]) + ri2 / (k2 * self.w_cell[i]);
            if j + 1 < n - 1 {
                off[j] = -self.r[i] * self.r[i + 1] / (k2 * self.w_cell[i]);
            }
        }
        SymTridiag::new(diag, off)
    }

    /// Weighted L² norm squared of (u_r, u_z).
    pub fn velocity_norm2(&self, ur: &[T], uz: &[T]) -> T {
        let a = ur.iter().enumerate().fold(T::zero(), |s, (j, x)| s + self.w_node[j + 1] * *x * *x);
        uz.iter().zip(&self.w_cell).fold(a, |s, (x, w)| s + *w * *x * *x)
    }
}

/// Leray projection of (u_r, u_z) at wavenumber k; `u_r` on interior nodes, `u_z` on cells.
pub fn project_divfree<T: Real>(g: &RadialGrid<T>, k: usize, u_r: &[T], u_z: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let s = Staggered::new(g, k)?;
    if u_r.len() != g.interior() || u_z.len() != g.cells() {
        return Err(Error::Domain("u_r must live on interior nodes and u_z on cells".into()));
    }
    Ok(s.project(u_r, u_z))
}
