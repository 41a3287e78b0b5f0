//! Steady rotating states: angular velocity ω(r), vertical field shape b(r) and
//! the coefficient functions built from them.

mod pchip;

pub use pchip::Pchip;

use crate::error::{Error, Result};
use crate::num::{c, Real};

/// Profile family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Keplerian,
    Powerlaw,
    Twoterm,
    /// ω² = c₀ + c₁·r^γ.
    OffsetPower,
    Tabulated,
}

impl ProfileKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileKind::Keplerian => "keplerian",
            ProfileKind::Powerlaw => "powerlaw",
            ProfileKind::Twoterm => "twoterm",
            ProfileKind::OffsetPower => "offset_power",
            ProfileKind::Tabulated => "tabulated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Rotation<T> {
    Keplerian { gm: T },
    Powerlaw { omega0: T, beta: T, gamma: T },
    Twoterm { c1: T, c2: T },
    OffsetPower { c0: T, c1: T, gamma: T },
    Tabulated(Pchip<T>),
}

/// Vertical field shape b(r).
#[derive(Debug, Clone, PartialEq)]
pub enum FieldShape<T> {
    /// b ≡ 1.
    Uniform,
    /// b = 1 + amp·exp(−((r − center)/width)²).
    Gaussian { amp: T, center: T, width: T },
    /// Monotone cubic interpolant of sampled b.
    Tabulated(Pchip<T>),
}

impl<T: Real> FieldShape<T> {
    fn eval3(&self, r: T) -> (T, T, T) {
        match self {
            FieldShape::Uniform => (T::one(), T::zero(), T::zero()),
            FieldShape::Gaussian { amp, center, width } => {
                let x = (r - *center) / *width;
                let g = *amp * (-x * x).exp();
                let w2 = *width * *width;
                let d = -c::<T>(2.0) * x / *width * g;
                let dd = (c::<T>(4.0) * x * x - c::<T>(2.0)) / w2 * g;
                (T::one() + g, d, dd)
            }
            FieldShape::Tabulated(p) => p.eval3(r),
        }
    }

    /// True when b ≡ 1 identically.
    pub fn is_uniform(&self) -> bool {
        match self {
            FieldShape::Uniform => true,
            FieldShape::Gaussian { amp, .. } => *amp == T::zero(),
            FieldShape::Tabulated(_) => false,
        }
    }
}

/// Steady state on the annulus [r1, r2] with field strength `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile<T> {
    pub r1: T,
    pub r2: T,
    pub eps: T,
    pub kind: ProfileKind,
    rotation: Rotation<T>,
    field: FieldShape<T>,
}

/// Sign class of a sampled coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    /// Nonnegative everywhere (zeros within tolerance count as positive).
    Positive,
    Negative,
    Mixed,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
            Sign::Mixed => "mixed",
        }
    }

    /// Classifies samples using the tolerance `1e-12·max|v|`.
    pub fn of<T: Real>(values: &[T]) -> Sign {
        let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tol = c::<T>(1e-12) * scale;
        let pos = values.iter().any(|&v| v > tol);
        let neg = values.iter().any(|&v| v < -tol);
        match (pos, neg) {
            (true, true) => Sign::Mixed,
            (false, true) => Sign::Negative,
            _ => Sign::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignReport {
    pub domega2_sign: Sign,
    pub upsilon_sign: Sign,
}

/// F and Υ at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSample<T> {
    pub r: T,
    pub f: T,
    pub upsilon: T,
}

fn check_interval<T: Real>(r1: T, r2: T) -> Result<()> {
    if !(r1 > T::zero() && r2 > r1 && r2.is_finite_val()) {
        return Err(Error::InvalidProfile(format!(
            "annulus must satisfy 0 < r1 < r2 < ∞, got [{}, {}]",
            r1.as_f64(),
            r2.as_f64()
        )));
    }
    Ok(())
}

const DENSE_SAMPLES: usize = 2001;

fn dense<T: Real>(r1: T, r2: T) -> impl Iterator<Item = T> {
    (0..DENSE_SAMPLES).map(move |i| r1 + (r2 - r1) * T::from_count(i) / T::from_count(DENSE_SAMPLES - 1))
}

/// ω² = gm/r³ with b ≡ 1.
pub fn make_keplerian<T: Real>(gm: T, r1: T, r2: T, eps: T) -> Result<RadialProfile<T>> {
    if !(gm > T::zero()) {
        return Err(Error::InvalidProfile("gm must be positive".into()));
    }
    check_interval(r1, r2)?;
    Ok(RadialProfile { r1, r2, eps, kind: ProfileKind::Keplerian, rotation: Rotation::Keplerian { gm }, field: FieldShape::Uniform })
}

/// ω² = ω₀²(1 + β·r^γ) with b ≡ 1.
pub fn make_powerlaw<T: Real>(omega0: T, beta: T, gamma: T, r1: T, r2: T, eps: T) -> Result<RadialProfile<T>> {
    check_interval(r1, r2)?;
    let p = RadialProfile {
        r1,
        r2,
        eps,
        kind: ProfileKind::Powerlaw,
        rotation: Rotation::Powerlaw { omega0, beta, gamma },
        field: FieldShape::Uniform,
    };
    p.require_positive_omega2()?;
    Ok(p)
}

/// ω² = c₁·r + c₂/r with b ≡ 1.
pub fn make_twoterm<T: Real>(c1: T, c2: T, r1: T, r2: T, eps: T) -> Result<RadialProfile<T>> {
    check_interval(r1, r2)?;
    let p = RadialProfile { r1, r2, eps, kind: ProfileKind::Twoterm, rotation: Rotation::Twoterm { c1, c2 }, field: FieldShape::Uniform };
    p.require_positive_omega2()?;
    Ok(p)
}

/// ω² = c₀ + c₁·r^γ with b ≡ 1.
///
/// With γ = −4 this gives Υ ≡ 4c₀, a flat Rayleigh discriminant.
pub fn make_offset_power<T: Real>(c0: T, c1: T, gamma: T, r1: T, r2: T, eps: T) -> Result<RadialProfile<T>> {
    check_interval(r1, r2)?;
    let p = RadialProfile {
        r1,
        r2,
        eps,
        kind: ProfileKind::OffsetPower,
        rotation: Rotation::OffsetPower { c0, c1, gamma },
        field: FieldShape::Uniform,
    };
    p.require_positive_omega2()?;
    Ok(p)
}

/// Interpolated profile from samples `(r, ω, b)`.
pub fn make_tabulated<T: Real>(samples: &[(T, T, T)], eps: T) -> Result<RadialProfile<T>> {
    if samples.len() < 8 {
        return Err(Error::InvalidProfile(format!("tabulated profile needs at least 8 samples, got {}", samples.len())));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidProfile("tabulated radii must be strictly increasing".into()));
    }
    if let Some(s) = samples.iter().find(|s| !(s.2 > T::zero())) {
        return Err(Error::InvalidProfile(format!("b must be positive, got {} at r = {}", s.2.as_f64(), s.0.as_f64())));
    }
    if samples.iter().any(|s| !(s.0.is_finite_val() && s.1.is_finite_val() && s.2.is_finite_val())) {
        return Err(Error::InvalidProfile("tabulated samples must be finite".into()));
    }
    let r1 = samples[0].0;
    let r2 = samples[samples.len() - 1].0;
    check_interval(r1, r2)?;
    let x: Vec<T> = samples.iter().map(|s| s.0).collect();
    let om = Pchip::new(x.clone(), samples.iter().map(|s| s.1).collect());
    let b = Pchip::new(x, samples.iter().map(|s| s.2).collect());
    let p = RadialProfile { r1, r2, eps, kind: ProfileKind::Tabulated, rotation: Rotation::Tabulated(om), field: FieldShape::Tabulated(b) };
    p.require_positive_b()?;
    Ok(p)
}

impl<T: Real> RadialProfile<T> {
    fn require_positive_omega2(&self) -> Result<()> {
        for r in dense(self.r1, self.r2) {
            let w2 = self.omega2(r);
            if !(w2 > T::zero()) || !w2.is_finite_val() {
                return Err(Error::InvalidProfile(format!("ω² = {} ≤ 0 at r = {}", w2.as_f64(), r.as_f64())));
            }
        }
        Ok(())
    }

    fn require_positive_b(&self) -> Result<()> {
        for r in dense(self.r1, self.r2) {
            let b = self.b(r);
            if !(b > T::zero()) {
                return Err(Error::InvalidProfile(format!("b = {} ≤ 0 at r = {}", b.as_f64(), r.as_f64())));
            }
        }
        Ok(())
    }

    /// Same rotation with a different field strength.
    pub fn with_eps(&self, eps: T) -> Self {
        Self { eps, ..self.clone() }
    }

    /// Same rotation with a different field shape; b must stay positive.
    pub fn with_field(&self, field: FieldShape<T>) -> Result<Self> {
        let p = Self { field, ..self.clone() };
        p.require_positive_b()?;
        Ok(p)
    }

    /// Rotation scaled by `s` (ω ↦ sω).
    pub fn with_omega_scaled(&self, s: T) -> Self {
        let rotation = match &self.rotation {
            Rotation::Keplerian { gm } => Rotation::Keplerian { gm: *gm * s * s },
            Rotation::Powerlaw { omega0, beta, gamma } => Rotation::Powerlaw { omega0: *omega0 * s, beta: *beta, gamma: *gamma },
            Rotation::Twoterm { c1, c2 } => Rotation::Twoterm { c1: *c1 * s * s, c2: *c2 * s * s },
            Rotation::OffsetPower { c0, c1, gamma } => Rotation::OffsetPower { c0: *c0 * s * s, c1: *c1 * s * s, gamma: *gamma },
            Rotation::Tabulated(p) => {
                let x = p.x().to_vec();
                let y = x.iter().map(|&r| p.eval3(r).0 * s).collect();
                Rotation::Tabulated(Pchip::new(x, y))
            }
        };
        Self { rotation, ..self.clone() }
    }

    pub fn field(&self) -> &FieldShape<T> {
        &self.field
    }

    /// True when b ≡ 1.
    pub fn has_uniform_field(&self) -> bool {
        self.field.is_uniform()
    }

    /// ω²(r).
    pub fn omega2(&self, r: T) -> T {
        match &self.rotation {
            Rotation::Keplerian { gm } => *gm / (r * r * r),
            Rotation::Powerlaw { omega0, beta, gamma } => *omega0 * *omega0 * (T::one() + *beta * r.powf(*gamma)),
            Rotation::Twoterm { c1, c2 } => *c1 * r + *c2 / r,
            Rotation::OffsetPower { c0, c1, gamma } => *c0 + *c1 * r.powf(*gamma),
            Rotation::Tabulated(p) => {
                let w = p.eval3(r).0;
                w * w
            }
        }
    }

    /// ω(r); the positive root for analytic kinds.
    pub fn omega(&self, r: T) -> T {
        match &self.rotation {
            Rotation::Tabulated(p) => p.eval3(r).0,
            Rotation::Powerlaw { omega0, .. } if *omega0 < T::zero() => -self.omega2(r).sqrt(),
            _ => self.omega2(r).sqrt(),
        }
    }

    /// ∂_r(ω²).
    pub fn domega2(&self, r: T) -> T {
        match &self.rotation {
            Rotation::Keplerian { gm } => -c::<T>(3.0) * *gm / (r * r * r * r),
            Rotation::Powerlaw { omega0, beta, gamma } => *omega0 * *omega0 * *beta * *gamma * r.powf(*gamma - T::one()),
            Rotation::Twoterm { c1, c2 } => *c1 - *c2 / (r * r),
            Rotation::OffsetPower { c1, gamma, .. } => *c1 * *gamma * r.powf(*gamma - T::one()),
            Rotation::Tabulated(p) => {
                let (w, dw, _) = p.eval3(r);
                c::<T>(2.0) * w * dw
            }
        }
    }

    /// ∂_r ω.
    pub fn domega(&self, r: T) -> T {
        match &self.rotation {
            Rotation::Tabulated(p) => p.eval3(r).1,
            _ => {
                let w = self.omega(r);
                if w == T::zero() {
                    T::zero()
                } else {
                    self.domega2(r) / (c::<T>(2.0) * w)
                }
            }
        }
    }

    pub fn b(&self, r: T) -> T {
        self.field.eval3(r).0
    }

    pub fn db(&self, r: T) -> T {
        self.field.eval3(r).1
    }

    pub fn d2b(&self, r: T) -> T {
        self.field.eval3(r).2
    }

    /// (b, b′, b″) in one evaluation.
    pub fn b3(&self, r: T) -> (T, T, T) {
        self.field.eval3(r)
    }

    /// Curvature part of F: b″/(r²b) − b′/(r³b).
    pub fn field_curvature(&self, r: T) -> T {
        let (b, db, d2b) = self.b3(r);
        d2b / (r * r * b) - db / (r * r * r * b)
    }

    /// F(r) = ∂_r(ω²)/(ε²b²r) + b″/(r²b) − b′/(r³b).
    pub fn eval_f(&self, r: T) -> Result<T> {
        if self.eps == T::zero() {
            return Err(Error::ZeroEps("F(r) divides by ε²"));
        }
        let b = self.b(r);
        Ok(self.domega2(r) / (self.eps * self.eps * b * b * r) + self.field_curvature(r))
    }

    /// Υ(r) = r·∂_r(ω²) + 4ω².
    pub fn eval_rayleigh(&self, r: T) -> T {
        r * self.domega2(r) + c::<T>(4.0) * self.omega2(r)
    }

    /// Υ through ∂_r(ω²r⁴)/r³ evaluated by the product rule on r⁴.
    pub fn eval_rayleigh_from_angular_momentum(&self, r: T) -> T {
        let r3 = r * r * r;
        let d = self.domega2(r) * r3 * r + self.omega2(r) * c::<T>(4.0) * r3;
        d / r3
    }

    /// F and Υ at `r`.
    pub fn sample(&self, r: T) -> Result<CoefficientSample<T>> {
        Ok(CoefficientSample { r, f: self.eval_f(r)?, upsilon: self.eval_rayleigh(r) })
    }

    /// Signs of ∂_r(ω²) and Υ on `n` equally spaced interior points.
    pub fn check_signs(&self, n: usize) -> SignReport {
        let pts: Vec<T> = (1..=n).map(|i| self.r1 + (self.r2 - self.r1) * T::from_count(i) / T::from_count(n + 1)).collect();
        let d: Vec<T> = pts.iter().map(|&r| self.domega2(r)).collect();
        let u: Vec<T> = pts.iter().map(|&r| self.eval_rayleigh(r)).collect();
        SignReport { domega2_sign: Sign::of(&d), upsilon_sign: Sign::of(&u) }
    }
}

/// Free-function form of [`RadialProfile::eval_f`].
pub fn eval_f<T: Real>(p: &RadialProfile<T>, r: T) -> Result<T> {
    p.eval_f(r)
}

/// Free-function form of [`RadialProfile::eval_rayleigh`].
pub fn eval_rayleigh<T: Real>(p: &RadialProfile<T>, r: T) -> T {
    p.eval_rayleigh(r)
}

/// Free-function form of [`RadialProfile::check_signs`].
pub fn check_signs<T: Real>(p: &RadialProfile<T>, n: usize) -> SignReport {
    p.check_signs(n)
}

#[cfg(test)]
mod tests;
