use super::generator::Generator;
use super::state::LinearState;
use crate::error::{Error, Result};
use crate::num::{c, Real};

/// Norms above this stop a run with the overflow flag set.
pub const OVERFLOW_NORM: f64 = 1e150;
/// Growth factor the fit window must span.
pub const FIT_GROWTH: f64 = 10.0;

/// Time series of a linearized run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport<T> {
    pub times: Vec<T>,
    /// Weighted L² norm.
    pub norms: Vec<T>,
    /// Conserved form; empty when the form is undefined (Euler with Υ = 0 somewhere).
    pub form_values: Vec<T>,
    /// Least-squares slope of ln‖x‖ over `fit_window`; `None` when the norm never grew 10×.
    pub fitted_rate: Option<T>,
    pub fit_window: Option<(T, T)>,
    /// Least-squares slope of ln‖x‖ over the whole run.
    pub whole_run_slope: T,
    /// max_t |Q(t) − Q(0)| / max(|Q(0)|, ‖x(0)‖²).
    pub form_drift: Option<T>,
    /// max_t ‖x(t)‖ / ((1 + t²)‖x(0)‖).
    pub poly_bound: T,
    /// The run stopped early on overflow.
    pub overflow: bool,
}

/// One classical fourth-order Runge–Kutta step of ẋ = Gx.
///
/// The state space is divergence-free by construction, so the step needs no
/// separate re-projection.
pub fn step_rk4<T: Real>(gen: &Generator<T>, x: &[T], dt: T) -> Result<Vec<T>> {
    if !(dt > T::zero()) {
        return Err(Error::Domain("dt must be positive".into()));
    }
    Ok(rk4(|v| gen.apply(v), x, dt))
}

pub(crate) fn rk4<T: Real>(f: impl Fn(&[T]) -> Vec<T>, x: &[T], dt: T) -> Vec<T> {
    let inc = rk4_increment(f, x, dt);
    x.iter().zip(&inc).map(|(a, b)| *a + *b).collect()
}

fn rk4_increment<T: Real>(f: impl Fn(&[T]) -> Vec<T>, x: &[T], dt: T) -> Vec<T> {
    let half = dt * c::<T>(0.5);
    let axpy = |a: &[T], s: T, b: &[T]| a.iter().zip(b).map(|(p, q)| *p + s * *q).collect::<Vec<T>>();
    let k1 = f(x);
    let k2 = f(&axpy(x, half, &k1));
    let k3 = f(&axpy(x, half, &k2));
    let k4 = f(&axpy(x, dt, &k3));
    let sixth = dt / c::<T>(6.0);
    (0..x.len()).map(|i| sixth * (k1[i] + c::<T>(2.0) * (k2[i] + k3[i]) + k4[i])).collect()
}

fn slope<T: Real>(t: &[T], y: &[T]) -> T {
    let n = T::from_count(t.len());
    let tm = t.iter().fold(T::zero(), |s, v| s + *v) / n;
    let ym = y.iter().fold(T::zero(), |s, v| s + *v) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (a, b) in t.iter().zip(y) {
        sxy += (*a - tm) * (*b - ym);
        sxx += (*a - tm) * (*a - tm);
    }
    if sxx > T::zero() {
        sxy / sxx
    } else {
        T::zero()
    }
}

/// Fixed-step RK4 run recording every step.
pub fn run_simulation<T: Real>(gen: &Generator<T>, init: &LinearState<T>, t_end: T, dt: T) -> Result<SimReport<T>> {
    run_simulation_every(gen, init, t_end, dt, 1)
}

/// Fixed-step RK4 run recording every `stride`-th step.
///
/// The state is accumulated with compensated summation, so rounding in the
/// update does not grow with the step count.
pub fn run_simulation_every<T: Real>(gen: &Generator<T>, init: &LinearState<T>, t_end: T, dt: T, stride: usize) -> Result<SimReport<T>> {
    if !(dt > T::zero()) || !(t_end > T::zero()) {
        return Err(Error::Domain("run length and dt must be positive".into()));
    }
    let steps = (t_end / dt).round().to_usize().unwrap_or(0).max(1);
    let stride = stride.max(1);
    let mut x = init.to_vec(gen)?;
    let q0 = gen.quadratic_form(&x).ok();
    let n0 = gen.norm2(&x).sqrt();
    if !(n0 > T::zero()) {
        return Err(Error::Domain("initial state is zero".into()));
    }
    let mut times = vec![T::zero()];
    let mut norms = vec![n0];
    let mut form_values: Vec<T> = q0.into_iter().collect();
    let mut overflow = false;
    let mut comp = vec![T::zero(); x.len()];
    for s in 1..=steps {
        let inc = rk4_increment(|v| gen.apply(v), &x, dt);
        for i in 0..x.len() {
            let y = inc[i] + comp[i];
            let t = x[i] + y;
            comp[i] = (x[i] - t) + y;
            x[i] = t;
        }
        if s % stride != 0 && s != steps {
            continue;
        }
        let nrm = gen.norm2(&x).sqrt();
        if !nrm.is_finite_val() || nrm > c::<T>(OVERFLOW_NORM) {
            overflow = true;
            break;
        }
        times.push(dt * T::from_count(s));
        norms.push(nrm);
        if q0.is_some() {
            form_values.push(gen.quadratic_form(&x)?);
        }
    }
    let logs: Vec<T> = norms.iter().map(|v| v.ln()).collect();
    let last = logs.len() - 1;
    let ln_growth = c::<T>(FIT_GROWTH).ln();
    let start = (0..last).rev().find(|&j| logs[last] - logs[j] >= ln_growth);
    let (fitted_rate, fit_window) = match start {
        Some(j) => (Some(slope(&times[j..], &logs[j..])), Some((times[j], times[last]))),
        None => (None, None),
    };
    let form_drift = q0.map(|q| {
        let scale = q.abs().max(n0 * n0);
        form_values.iter().fold(T::zero(), |m, v| m.max((*v - q).abs())) / scale
    });
    let poly_bound = times.iter().zip(&norms).fold(T::zero(), |m, (t, v)| m.max(*v / ((T::one() + *t * *t) * n0)));
    Ok(SimReport { whole_run_slope: slope(&times, &logs), times, norms, form_values, fitted_rate, fit_window, form_drift, poly_bound, overflow })
}
