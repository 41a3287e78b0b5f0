//! Adaptive Dormand–Prince 5(4) integration for small systems.

use crate::error::{Error, Result};
use crate::num::{c, Real};

pub(crate) struct Dp45<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
}

pub(crate) struct Step<T, const N: usize> {
    #[cfg_attr(not(test), allow(dead_code))]
    pub t: T,
    pub y: [T; N],
}

impl<T: Real> Dp45<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self { rtol, atol, max_steps: 1_000_000 }
    }

    /// Integrates from (t0, y0) to t1, calling `observe` after every accepted step.
    /// Returns the final state and the last accepted step size.
    pub fn integrate<const N: usize>(
        &self,
        f: &impl Fn(T, &[T; N]) -> [T; N],
        t0: T,
        y0: [T; N],
        t1: T,
        h0: T,
        mut observe: impl FnMut(&Step<T, N>),
    ) -> Result<([T; N], T)> {
        let a21 = c::<T>(1.0 / 5.0);
        let (a31, a32) = (c::<T>(3.0 / 40.0), c::<T>(9.0 / 40.0));
        let (a41, a42, a43) = (c::<T>(44.0 / 45.0), c::<T>(-56.0 / 15.0), c::<T>(32.0 / 9.0));
        let (a51, a52, a53, a54) = (c::<T>(19372.0 / 6561.0), c::<T>(-25360.0 / 2187.0), c::<T>(64448.0 / 6561.0), c::<T>(-212.0 / 729.0));
        let (a61, a62, a63, a64, a65) =
            (c::<T>(9017.0 / 3168.0), c::<T>(-355.0 / 33.0), c::<T>(46732.0 / 5247.0), c::<T>(49.0 / 176.0), c::<T>(-5103.0 / 18656.0));
        let (b1, b3, b4, b5, b6) = (c::<T>(35.0 / 384.0), c::<T>(500.0 / 1113.0), c::<T>(125.0 / 192.0), c::<T>(-2187.0 / 6784.0), c::<T>(11.0 / 84.0));
        let (e1, e3, e4, e5, e6, e7) = (
            c::<T>(71.0 / 57600.0),
            c::<T>(-71.0 / 16695.0),
            c::<T>(71.0 / 1920.0),
            c::<T>(-17253.0 / 339200.0),
            c::<T>(22.0 / 525.0),
            c::<T>(-1.0 / 40.0),
        );
        let (c2, c3, c4, c5) = (c::<T>(0.2), c::<T>(0.3), c::<T>(0.8), c::<T>(8.0 / 9.0));

        let span = t1 - t0;
        if span == T::zero() {
            return Ok((y0, h0));
        }
        let dir = span.signum_val();
        let mut t = t0;
        let mut y = y0;
        let mut h = h0.abs().min(span.abs()).max(span.abs() * c::<T>(1e-12)) * dir;
        let mut k1 = f(t, &y);
        let lin = |y: &[T; N], terms: &[(T, &[T; N])], h: T| -> [T; N] {
            let mut out = *y;
            for i in 0..N {
                let mut s = T::zero();
                for (a, k) in terms {
                    s += *a * k[i];
                }
                out[i] += h * s;
            }
            out
        };
        for _ in 0..self.max_steps {
            let remaining = t1 - t;
            if remaining * dir <= T::zero() {
                return Ok((y, h));
            }
            let last = (h * dir) >= remaining * dir;
            if last {
                h = remaining;
            }
            let k2 = f(t + c2 * h, &lin(&y, &[(a21, &k1)], h));
            let k3 = f(t + c3 * h, &lin(&y, &[(a31, &k1), (a32, &k2)], h));
            let k4 = f(t + c4 * h, &lin(&y, &[(a41, &k1), (a42, &k2), (a43, &k3)], h));
            let k5 = f(t + c5 * h, &lin(&y, &[(a51, &k1), (a52, &k2), (a53, &k3), (a54, &k4)], h));
            let k6 = f(t + h, &lin(&y, &[(a61, &k1), (a62, &k2), (a63, &k3), (a64, &k4), (a65, &k5)], h));
            let y5 = lin(&y, &[(b1, &k1), (b3, &k3), (b4, &k4), (b5, &k5), (b6, &k6)], h);
            let k7 = f(t + h, &y5);
            let mut err = T::zero();
            for i in 0..N {
                let e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite_val() {
                return Err(Error::Numeric("non-finite value in adaptive integration".into()));
            }
            if err <= T::one() {
                t = if last { t1 } else { t + h };
                y = y5;
                k1 = k7;
                observe(&Step { t, y });
                let fac = if err == T::zero() { c::<T>(5.0) } else { (c::<T>(0.9) * err.powf(c::<T>(-0.2))).min(c::<T>(5.0)) };
                if !last {
                    h *= fac.max(c::<T>(0.2));
                }
            } else {
                h *= (c::<T>(0.9) * err.powf(c::<T>(-0.2))).max(c::<T>(0.1));
                if h.abs() <= T::EPS * c::<T>(16.0) * t.abs().max(T::one()) {
                    return Err(Error::Numeric("step size underflow in adaptive integration".into()));
                }
            }
        }
        Err(Error::Numeric("too many steps in adaptive integration".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_to_tolerance() {
        let ode = Dp45::new(1e-11, 1e-13);
        let f = |_t: f64, y: &[f64; 2]| [y[1], -25.0 * y[0]];
        let (y, _) = ode.integrate(&f, 0.0, [0.0, 5.0], 3.0, 1e-3, |_| {}).unwrap();
        assert!((y[0] - (15.0f64).sin()).abs() < 1e-9);
        assert!((y[1] - 5.0 * (15.0f64).cos()).abs() < 1e-8);
    }

    #[test]
    fn observer_sees_monotone_times_ending_at_target() {
        let ode = Dp45::new(1e-8, 1e-10);
        let f = |t: f64, y: &[f64; 1]| [t * y[0]];
        let mut ts = vec![];
        let (y, _) = ode.integrate(&f, 0.0, [1.0], 1.0, 0.1, |s| ts.push(s.t)).unwrap();
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*ts.last().unwrap(), 1.0);
        assert!((y[0] - 0.5f64.exp()).abs() < 1e-7);
    }
}
