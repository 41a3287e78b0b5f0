use nalgebra::{Complex, DMatrix};

use super::projection::{Staggered, SymTridiag};
use crate::error::{Error, Result};
use crate::num::{c, Real};
use crate::operators::{assemble_lk_scaled, generalized_eigen, sturm_count, RadialGrid, TridiagonalForm};
use crate::profiles::RadialProfile;

/// Which linearized system a [`Generator`] discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// State (u_r, u_θ, φ, B_θ).
    Mhd,
    /// Zero-field state (u_r, u_θ).
    Euler,
}

/// Per-k discretized linearized operator acting on real amplitudes.
///
/// With the z-dependence u_r, u_θ, φ, B_θ ∝ cos kz and u_z ∝ sin kz the
/// per-k system is real. The state vector stacks
/// `[u_r (interior nodes) | u_θ (nodes) | φ (interior nodes) | B_θ (nodes)]`
/// for MHD (dimension 4n) and `[u_r | u_θ]` for Euler (dimension 2n);
/// u_z is slaved to u_r by the discrete divergence constraint, so every
/// state is divergence-free by construction.
///
/// With g = u_θ + (ω′/(εb))φ the conserved form is
/// aᵀM_a a + Σ W(g² + B_θ²) + ⟨𝕃_kφ, φ⟩, where M_a is the kinetic metric of
/// (u_r, u_z) and W_i = w_i·r_i.
#[derive(Debug, Clone)]
pub struct Generator<T: Real> {
    pub kind: GeneratorKind,
    pub k: usize,
    pub eps: T,
    pub grid: RadialGrid<T>,
    pub(crate) ops: Staggered<T>,
    pub(crate) ma: SymTridiag<T>,
    two_omega: Vec<T>,
    /// 2ω + rω′.
    vort: Vec<T>,
    /// Υ = r∂_r(ω²) + 4ω².
    upsilon: Vec<T>,
    /// r·b on nodes.
    rb: Vec<T>,
    /// s = εbk on nodes.
    s: Vec<T>,
    /// ω′/(εb) on nodes.
    gshift: Vec<T>,
    /// ε²𝕃_k.
    lk: Option<TridiagonalForm<T>>,
    /// 𝕃_k, assembled once so the force and the form share its entries.
    lk_form: Option<TridiagonalForm<T>>,
    /// ε·r·b on nodes: φ̇ = εrb·u_r, and the force on u_r is εrb·𝕃_kφ.
    eps_rb: Vec<T>,
}

/// Spectrum of a generator.
#[derive(Debug, Clone)]
pub struct Spectrum<T: Real> {
    /// All eigenvalues, by descending real part.
    pub eigenvalues: Vec<Complex<T>>,
    /// Real parts above the tolerance, descending.
    pub unstable: Vec<T>,
    /// Scale used for the tolerance (spectral radius).
    pub norm: T,
    pub tol: T,
}

/// Relative threshold for calling an eigenvalue unstable.
pub const UNSTABLE_RTOL: f64 = 1e-8;

fn node_vec<T: Real>(g: &RadialGrid<T>, f: impl Fn(T) -> T) -> Vec<T> {
    g.nodes().iter().map(|&r| f(r)).collect()
}

impl<T: Real> Generator<T> {
    fn base(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize, kind: GeneratorKind) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("the generator needs k ≥ 1".into()));
        }
        if !(g.r1() > T::zero()) {
            return Err(Error::InvalidGrid("the generator needs R₁ > 0".into()));
        }
        let ops = Staggered::new(g, k)?;
        let ma = ops.velocity_metric()?;
        let kk = T::from_count(k);
        let two = c::<T>(2.0);
        let e = p.eps;
        let gshift = if kind == GeneratorKind::Mhd { node_vec(g, |r| p.domega(r) / (e * p.b(r))) } else { vec![T::zero(); g.cells() + 1] };
        Ok(Self {
            kind,
            k,
            eps: e,
            grid: g.clone(),
            ops,
            ma,
            two_omega: node_vec(g, |r| two * p.omega(r)),
            vort: node_vec(g, |r| two * p.omega(r) + r * p.domega(r)),
            upsilon: node_vec(g, |r| p.eval_rayleigh(r)),
            rb: node_vec(g, |r| r * p.b(r)),
            eps_rb: node_vec(g, |r| e * r * p.b(r)),
            s: node_vec(g, |r| if kind == GeneratorKind::Mhd { e * p.b(r) * kk } else { T::zero() }),
            gshift,
            lk: None,
            lk_form: None,
        })
    }

    /// Number of cells of the grid.
    pub fn cells(&self) -> usize {
        self.grid.cells()
    }

    /// State dimension.
    pub fn dim(&self) -> usize {
        match self.kind {
            GeneratorKind::Mhd => 4 * self.cells(),
            GeneratorKind::Euler => 2 * self.cells(),
        }
    }

    /// Node weights w_i·r_i.
    pub fn node_weights(&self) -> &[T] {
        &self.ops.w_node
    }

    fn lk_form(&self) -> &TridiagonalForm<T> {
        self.lk_form.as_ref().expect("MHD generator carries 𝕃_k")
    }

    fn lk(&self) -> &TridiagonalForm<T> {
        self.lk.as_ref().expect("MHD generator carries 𝕃_k")
    }

    /// ẋ = G·x.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.cells();
        let m = n - 1;
        let w = &self.ops.w_node;
        let mut out = vec![T::zero(); x.len()];
        match self.kind {
            GeneratorKind::Euler => {
                let (a, cv) = x.split_at(m);
                let rhs: Vec<T> = (0..m).map(|j| w[j + 1] * self.two_omega[j + 1] * cv[j + 1]).collect();
                let adot = self.ma.solve(&rhs);
                out[..m].copy_from_slice(&adot);
                for j in 0..m {
                    out[m + j + 1] = -self.vort[j + 1] * a[j];
                }
            }
            GeneratorKind::Mhd => {
                let (a, rest) = x.split_at(m);
                let (cv, rest) = rest.split_at(n + 1);
                let (f, beta) = rest.split_at(m);
                let fnode = |i: usize| if i == 0 || i == n { T::zero() } else { f[i - 1] };
                let anode = |i: usize| if i == 0 || i == n { T::zero() } else { a[i - 1] };
                let g: Vec<T> = (0..=n).map(|i| cv[i] + self.gshift[i] * fnode(i)).collect();
                let kf = self.lk_form().apply(f);
                let rhs: Vec<T> = (0..m).map(|j| w[j + 1] * self.two_omega[j + 1] * g[j + 1] - self.eps_rb[j + 1] * kf[j]).collect();
                let adot = self.ma.solve(&rhs);
                let (o_a, rest) = out.split_at_mut(m);
                let (o_c, rest) = rest.split_at_mut(n + 1);
                let (o_f, o_b) = rest.split_at_mut(m);
                o_a.copy_from_slice(&adot);
                for j in 0..m {
                    o_f[j] = self.eps_rb[j + 1] * a[j];
                }
                for i in 0..=n {
                    let gdot = -self.two_omega[i] * anode(i) + self.s[i] * beta[i];
                    let fdot = if i == 0 || i == n { T::zero() } else { o_f[i - 1] };
                    o_c[i] = gdot - self.gshift[i] * fdot;
                    o_b[i] = -self.s[i] * g[i];
                }
            }
        }
        out
    }

    /// Dense matrix of G, built column by column.
    pub fn matrix(&self) -> DMatrix<T> {
        let d = self.dim();
        let mut mat = DMatrix::zeros(d, d);
        let mut e = vec![T::zero(); d];
        for j in 0..d {
            e[j] = T::one();
            let col = self.apply(&e);
            for (i, v) in col.into_iter().enumerate() {
                mat[(i, j)] = v;
            }
            e[j] = T::zero();
        }
        mat
    }

    /// Dense symmetric matrix of the conserved quadratic form.
    ///
    /// For Euler the form is aᵀM_a a + Σ W(4ω²/Υ)u_θ², defined only where Υ ≠ 0.
    pub fn form_matrix(&self) -> Result<DMatrix<T>> {
        let n = self.cells();
        let m = n - 1;
        let w = &self.ops.w_node;
        let d = self.dim();
        let mut q = DMatrix::zeros(d, d);
        for j in 0..m {
            q[(j, j)] = self.ma.diag[j];
            if j + 1 < m {
                q[(j, j + 1)] = self.ma.off[j];
                q[(j + 1, j)] = self.ma.off[j];
            }
        }
        match self.kind {
            GeneratorKind::Euler => {
                for i in 0..=n {
                    q[(m + i, m + i)] = w[i] * self.euler_theta_weight(i)?;
                }
            }
            GeneratorKind::Mhd => {
                let c0 = m;
                let f0 = m + n + 1;
                let b0 = f0 + m;
                let lk = self.lk_form();
                for i in 0..=n {
                    q[(c0 + i, c0 + i)] = w[i];
                    q[(b0 + i, b0 + i)] = w[i];
                }
                for j in 0..m {
                    let i = j + 1;
                    q[(c0 + i, f0 + j)] = w[i] * self.gshift[i];
                    q[(f0 + j, c0 + i)] = w[i] * self.gshift[i];
                    q[(f0 + j, f0 + j)] = w[i] * self.gshift[i] * self.gshift[i] + lk.diag[j];
                    if j + 1 < m {
                        q[(f0 + j, f0 + j + 1)] = lk.off[j];
                        q[(f0 + j + 1, f0 + j)] = lk.off[j];
                    }
                }
            }
        }
        Ok(q)
    }

    fn euler_theta_weight(&self, i: usize) -> Result<T> {
        let u = self.upsilon[i];
        let scale = self.two_omega[i] * self.two_omega[i];
        if u.abs() <= c::<T>(1e-12) * scale.max(T::one()) {
            return Err(Error::Degenerate(format!("Υ vanishes at node {i}; the Euler form is undefined")));
        }
        Ok(scale / u)
    }

    /// Conserved quadratic form on a stacked state.
    pub fn quadratic_form(&self, x: &[T]) -> Result<T> {
        let n = self.cells();
        let m = n - 1;
        let w = &self.ops.w_node;
        let a = &x[..m];
        let kin = self.ma.quadratic(a);
        match self.kind {
            GeneratorKind::Euler => {
                let cv = &x[m..];
                let mut s = kin;
                for i in 0..=n {
                    s += w[i] * self.euler_theta_weight(i)? * cv[i] * cv[i];
                }
                Ok(s)
            }
            GeneratorKind::Mhd => {
                let cv = &x[m..m + n + 1];
                let f = &x[m + n + 1..2 * m + n + 1];
                let beta = &x[2 * m + n + 1..];
                let mut s = kin + self.lk_form().quadratic(f);
                for i in 0..=n {
                    let fi = if i == 0 || i == n { T::zero() } else { f[i - 1] };
                    let g = cv[i] + self.gshift[i] * fi;
                    s += w[i] * (g * g + beta[i] * beta[i]);
                }
                Ok(s)
            }
        }
    }

    /// Squared discrete weighted L² norm of all components, u_z included.
    pub fn norm2(&self, x: &[T]) -> T {
        let n = self.cells();
        let m = n - 1;
        let w = &self.ops.w_node;
        let a = &x[..m];
        let mut s = self.ma.apply(a).iter().zip(a).fold(T::zero(), |s, (p, q)| s + *p * *q);
        let nodal = |s: &mut T, v: &[T], interior: bool| {
            for (j, x) in v.iter().enumerate() {
                let i = if interior { j + 1 } else { j };
                *s += w[i] * *x * *x;
            }
        };
        match self.kind {
            GeneratorKind::Euler => nodal(&mut s, &x[m..], false),
            GeneratorKind::Mhd => {
                nodal(&mut s, &x[m..m + n + 1], false);
                nodal(&mut s, &x[m + n + 1..2 * m + n + 1], true);
                nodal(&mut s, &x[2 * m + n + 1..], false);
            }
        }
        s
    }

    /// Rough upper bound on the spectral radius, used to scale tolerances.
    pub fn norm_estimate(&self) -> T {
        let n = self.cells();
        let mut bound = T::zero();
        for i in 0..=n {
            let t = self.two_omega[i] * self.two_omega[i] + self.upsilon[i].abs() + self.s[i] * self.s[i];
            bound = bound.max(t);
        }
        if let Some(lk) = &self.lk {
            for j in 0..n - 1 {
                let row = lk.diag[j].abs() + if j > 0 { lk.off[j - 1].abs() } else { T::zero() } + if j + 1 < n - 1 { lk.off[j].abs() } else { T::zero() };
                let rb = self.rb[j + 1];
                bound = bound.max(rb * rb * row / self.ma.diag[j]);
            }
        }
        bound.sqrt()
    }

    /// Reduced symmetric pencil (S, M₂) with σ(G) = ±√σ(S, M₂).
    ///
    /// MHD: unknowns (u_r, B_θ); Euler: u_r only.
    pub fn reduced_pencil(&self) -> (DMatrix<T>, DMatrix<T>) {
        let n = self.cells();
        let m = n - 1;
        let w = &self.ops.w_node;
        let d = match self.kind {
            GeneratorKind::Mhd => m + n + 1,
            GeneratorKind::Euler => m,
        };
        let mut s = DMatrix::zeros(d, d);
        let mut mm = DMatrix::zeros(d, d);
        for j in 0..m {
            mm[(j, j)] = self.ma.diag[j];
            if j + 1 < m {
                mm[(j, j + 1)] = self.ma.off[j];
                mm[(j + 1, j)] = self.ma.off[j];
            }
        }
        match self.kind {
            GeneratorKind::Euler => {
                for j in 0..m {
                    s[(j, j)] = -w[j + 1] * self.upsilon[j + 1];
                }
            }
            GeneratorKind::Mhd => {
                let lk = self.lk();
                for j in 0..m {
                    let i = j + 1;
                    s[(j, j)] = -(w[i] * self.two_omega[i] * self.two_omega[i] + self.rb[i] * self.rb[i] * lk.diag[j]);
                    if j + 1 < m {
                        let v = -self.rb[i] * self.rb[i + 1] * lk.off[j];
                        s[(j, j + 1)] = v;
                        s[(j + 1, j)] = v;
                    }
                    let cpl = w[i] * self.two_omega[i] * self.s[i];
                    s[(j, m + i)] = cpl;
                    s[(m + i, j)] = cpl;
                }
                for i in 0..=n {
                    s[(m + i, m + i)] = -w[i] * self.s[i] * self.s[i];
                    mm[(m + i, m + i)] = w[i];
                }
            }
        }
        (s, mm)
    }

    /// Schur complement of S − μM₂ onto u_r (tridiagonal), valid for μ > −min s².
    fn schur(&self, mu: T) -> (Vec<T>, Vec<T>) {
        let n = self.cells();
        let m = n - 1;
        let w = &self.ops.w_node;
        let mut diag = vec![T::zero(); m];
        let mut off = vec![T::zero(); m.saturating_sub(1)];
        match self.kind {
            GeneratorKind::Euler => {
                for j in 0..m {
                    diag[j] = -w[j + 1] * self.upsilon[j + 1] - mu * self.ma.diag[j];
                    if j + 1 < m {
                        off[j] = -mu * self.ma.off[j];
                    }
                }
            }
            GeneratorKind::Mhd => {
                let lk = self.lk();
                for j in 0..m {
                    let i = j + 1;
                    let s2 = self.s[i] * self.s[i];
                    let w4 = w[i] * self.two_omega[i] * self.two_omega[i];
                    // −4ω²W + 4ω²s²W/(s² + μ) = −4ω²Wμ/(s² + μ)
                    diag[j] = -w4 * mu / (s2 + mu) - self.rb[i] * self.rb[i] * lk.diag[j] - mu * self.ma.diag[j];
                    if j + 1 < m {
                        off[j] = -self.rb[i] * self.rb[i + 1] * lk.off[j] - mu * self.ma.off[j];
                    }
                }
            }
        }
        (diag, off)
    }

    /// Number of eigenvalues of (S, M₂) strictly above μ ≥ 0.
    pub fn count_mu_above(&self, mu: T) -> usize {
        let (d, o) = self.schur(mu);
        let nd: Vec<T> = d.iter().map(|x| -*x).collect();
        let no: Vec<T> = o.iter().map(|x| -*x).collect();
        let scale = nd.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        sturm_count(&nd, &no, T::zero(), scale).0
    }

    /// Squared growth rates Λ² > (tol·‖G‖)², descending, by bisection on the Sturm count.
    pub fn unstable_mu(&self) -> Vec<T> {
        let norm = self.norm_estimate();
        let tol = c::<T>(UNSTABLE_RTOL) * norm;
        let floor = tol * tol;
        let total = self.count_mu_above(floor);
        if total == 0 {
            return Vec::new();
        }
        let mut hi = norm * norm * c::<T>(4.0);
        while self.count_mu_above(hi) > 0 {
            hi *= c::<T>(2.0);
        }
        (0..total)
            .map(|idx| {
                // largest μ with count_mu_above(μ) ≥ idx + 1
                let (mut lo, mut up) = (floor, hi);
                for _ in 0..200 {
                    let mid = (lo + up) * c::<T>(0.5);
                    if self.count_mu_above(mid) > idx {
                        lo = mid;
                    } else {
                        up = mid;
                    }
                    if up - lo <= c::<T>(4.0) * T::EPS * up {
                        break;
                    }
                }
                (lo + up) * c::<T>(0.5)
            })
            .collect()
    }

    /// Unstable growth rates Λ = √μ, descending.
    pub fn unstable_rates(&self) -> Vec<T> {
        self.unstable_mu().into_iter().map(|m| m.sqrt()).collect()
    }

    /// Null vector of the Schur complement at μ by inverse iteration (u_r on interior nodes).
    pub(crate) fn schur_null_vector(&self, mu: T) -> Vec<T> {
        let (d, o) = self.schur(mu);
        let m = d.len();
        let scale = d.iter().fold(T::zero(), |a, x| a.max(x.abs()));
        let tiny = c::<T>(1e-14) * scale;
        let mut x: Vec<T> = (0..m).map(|j| (T::pi() * T::from_count(j + 1) / T::from_count(m + 1)).sin()).collect();
        for _ in 0..4 {
            // LDLᵀ solve without pivoting; zero pivots nudged.
            let mut piv = vec![T::zero(); m];
            let mut y = x.clone();
            for i in 0..m {
                let mut p = d[i];
                if i > 0 {
                    p -= o[i - 1] * o[i - 1] / piv[i - 1];
                    y[i] = y[i] - o[i - 1] / piv[i - 1] * y[i - 1];
                }
                if p.abs() < tiny {
                    p = tiny;
                }
                piv[i] = p;
            }
            let mut z = vec![T::zero(); m];
            for i in (0..m).rev() {
                let mut s = y[i];
                if i + 1 < m {
                    s -= o[i] * z[i + 1];
                }
                z[i] = s / piv[i];
            }
            let nrm = z.iter().fold(T::zero(), |a, v| a.max(v.abs()));
            x = z.into_iter().map(|v| v / nrm).collect();
        }
        x
    }

    #[cfg(test)]
    /// (S_ββ, S_βa) elimination: B_θ = 2ωs·u_r/(s² + μ) on nodes.
    pub(crate) fn beta_from_ur(&self, a: &[T], mu: T) -> Vec<T> {
        let n = self.cells();
        (0..=n)
            .map(|i| {
                if i == 0 || i == n {
                    T::zero()
                } else {
                    self.two_omega[i] * self.s[i] * a[i - 1] / (self.s[i] * self.s[i] + mu)
                }
            })
            .collect()
    }

    pub(crate) fn eps_rb(&self, i: usize) -> T {
        self.eps_rb[i]
    }

    /// Full spectrum from the dense reduced pencil.
    pub fn spectrum(&self) -> Result<Spectrum<T>> {
        let (s, mm) = self.reduced_pencil();
        let e = generalized_eigen(&s, &mm)?;
        let mut mus = e.values;
        if self.kind == GeneratorKind::Euler {
            // u_θ at the two end nodes is frozen.
            mus.push(T::zero());
        }
        let rho = mus.iter().fold(T::zero(), |a, x| a.max(x.abs())).sqrt();
        let norm = rho.max(self.norm_estimate());
        let tol = c::<T>(UNSTABLE_RTOL) * norm;
        let mut eigenvalues = Vec::with_capacity(2 * mus.len());
        for &mu in &mus {
            if mu >= T::zero() {
                let r = mu.sqrt();
                eigenvalues.push(Complex::new(r, T::zero()));
                eigenvalues.push(Complex::new(-r, T::zero()));
            } else {
                let i = (-mu).sqrt();
                eigenvalues.push(Complex::new(T::zero(), i));
                eigenvalues.push(Complex::new(T::zero(), -i));
            }
        }
        eigenvalues.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal).then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal)));
        let unstable = eigenvalues.iter().filter(|z| z.re > tol).map(|z| z.re).collect();
        Ok(Spectrum { eigenvalues, unstable, norm, tol })
    }
}

/// Linearized MHD generator at axial wavenumber k.
pub fn assemble_generator<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize) -> Result<Generator<T>> {
    if p.eps == T::zero() {
        return Err(Error::ZeroEps("the generator contains ∂_rω/(εb)"));
    }
    let mut gen = Generator::base(p, g, k, GeneratorKind::Mhd)?;
    let lk = assemble_lk_scaled(p, g, k)?;
    let inv_e2 = T::one() / (p.eps * p.eps);
    gen.lk_form = Some(lk.combine(inv_e2, &lk, T::zero()));
    gen.lk = Some(lk);
    Ok(gen)
}

/// Linearized Euler generator at axial wavenumber k (the field plays no role).
pub fn assemble_euler_generator<T: Real>(p: &RadialProfile<T>, g: &RadialGrid<T>, k: usize) -> Result<Generator<T>> {
    Generator::base(p, g, k, GeneratorKind::Euler)
}

/// Full dense spectrum of a generator.
pub fn generator_spectrum<T: Real>(gen: &Generator<T>) -> Result<Spectrum<T>> {
    gen.spectrum()
}
