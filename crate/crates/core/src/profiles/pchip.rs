//! Monotone piecewise-cubic Hermite interpolation.

use crate::num::{c, Real};

/// Shape-preserving cubic interpolant through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip<T> {
    x: Vec<T>,
    y: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> Pchip<T> {
    /// Builds the interpolant. `x` must be strictly increasing with at least two points.
    pub fn new(x: Vec<T>, y: Vec<T>) -> Self {
        assert!(x.len() >= 2 && x.len() == y.len());
        let n = x.len();
        let h: Vec<T> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let del: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![T::zero(); n];
        if n == 2 {
            d[0] = del[0];
            d[1] = del[0];
            return Self { x, y, d };
        }
        for k in 1..n - 1 {
            if del[k - 1] * del[k] <= T::zero() {
                d[k] = T::zero();
            } else {
                let w1 = c::<T>(2.0) * h[k] + h[k - 1];
                let w2 = h[k] + c::<T>(2.0) * h[k - 1];
                d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
            }
        }
        d[0] = end_slope(h[0], h[1], del[0], del[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        Self { x, y, d }
    }

    fn interval(&self, t: T) -> usize {
        let n = self.x.len();
        let idx = self.x.partition_point(|&xi| xi <= t);
        idx.clamp(1, n - 1) - 1
    }

    /// Value, first and second derivative at `t`.
    pub fn eval3(&self, t: T) -> (T, T, T) {
        let k = self.interval(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1, d0, d1) = (self.y[k], self.y[k + 1], self.d[k], self.d[k + 1]);
        let one = T::one();
        let two = c::<T>(2.0);
        let three = c::<T>(3.0);
        let six = c::<T>(6.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + one;
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = six * s2 - six * s;
        let dh10 = three * s2 - c::<T>(4.0) * s + one;
        let dh01 = -six * s2 + six * s;
        let dh11 = three * s2 - two * s;
        let dv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
        let ddh00 = c::<T>(12.0) * s - six;
        let ddh10 = six * s - c::<T>(4.0);
        let ddh11 = six * s - two;
        let ddv = (ddh00 * (y0 - y1)) / (h * h) + (ddh10 * d0 + ddh11 * d1) / h;
        (v, dv, ddv)
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }
}

fn end_slope<T: Real>(h0: T, h1: T, del0: T, del1: T) -> T {
    let two = c::<T>(2.0);
    let d = ((two * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum_val() != del0.signum_val() {
        T::zero()
    } else if del0.signum_val() != del1.signum_val() && d.abs() > c::<T>(3.0) * del0.abs() {
        c::<T>(3.0) * del0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_linear_data() {
        let x: Vec<f64> = (0..10).map(|i| 1.0 + 0.1 * i as f64 + 0.01 * (i * i) as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t - 1.0).collect();
        let p = Pchip::new(x.clone(), y.clone());
        for (xi, yi) in x.iter().zip(&y) {
            assert!((p.eval3(*xi).0 - yi).abs() < 1e-14);
        }
        let (v, dv, ddv) = p.eval3(1.234);
        assert!((v - (3.0 * 1.234 - 1.0)).abs() < 1e-13);
        assert!((dv - 3.0).abs() < 1e-12);
        assert!(ddv.abs() < 1e-10);
    }

    #[test]
    fn preserves_monotonicity() {
        let x: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let y = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 5.0, 5.0, 6.0, 6.0, 6.0, 7.0];
        let p = Pchip::new(x, y);
        let mut prev = p.eval3(0.0).0;
        for i in 1..=1100 {
            let v = p.eval3(i as f64 * 0.01).0;
            assert!(v >= prev - 1e-14);
            prev = v;
        }
    }

    #[test]
    fn derivative_is_second_order_on_smooth_data() {
        let f = |t: f64| t.powf(-1.5);
        let df = |t: f64| -1.5 * t.powf(-2.5);
        let err = |n: usize| {
            let x: Vec<f64> = (0..=n).map(|i| 1.0 + i as f64 / n as f64).collect();
            let y = x.iter().map(|&t| f(t)).collect();
            let p = Pchip::new(x, y);
            (1..200)
                .map(|i| {
                    let t = 1.1 + 0.8 * i as f64 / 200.0;
                    (p.eval3(t).1 - df(t)).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(50) / err(100);
        assert!(ratio > 3.0, "ratio {ratio}");
    }
}
