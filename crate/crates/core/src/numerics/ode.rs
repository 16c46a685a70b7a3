//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.
//!
//! Supports integration in either direction, a per-step observer, and
//! terminal events located to integrator accuracy by re-stepping from the
//! last accepted state.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude.
    pub h0: f64,
    /// Largest step magnitude.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h0: 1e-3,
            h_max: 0.5,
            max_steps: 2_000_000,
        }
    }
}

/// Outcome of an integration that may stop early on an event.
#[derive(Debug, Clone, Copy)]
pub struct OdeEnd<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    /// Index of the terminal event that fired, if any.
    pub event: Option<usize>,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..N {
            out[i] += h * coef * k[i];
        }
    }
    out
}

/// One Dormand–Prince step; returns the fifth-order solution and the
/// embedded error estimate vector.
fn dopri_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(t + h, &y_new);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, err)
}

fn error_norm<const N: usize>(y: &[f64; N], y_new: &[f64; N], err: &[f64; N], opts: &OdeOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        acc += (err[i] / scale).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` toward `t_end`.
///
/// `observer` sees every accepted state (including the initial one).
/// `events` are scalar functions of the state; integration stops at the first
/// sign change of any of them, located by re-stepping to ~1e-14 relative.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    events: &[&dyn Fn(f64, &[f64; N]) -> f64],
    mut observer: O,
) -> Result<OdeEnd<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * opts.h0.min((t_end - t0).abs().max(f64::MIN_POSITIVE));
    observer(t, &y);
    let mut g_prev: Vec<f64> = events.iter().map(|g| g(t, &y)).collect();

    for _ in 0..opts.max_steps {
        let remaining = (t_end - t) * dir;
        if remaining <= 1e-13 * t.abs().max(1.0) {
            if remaining > 0.0 {
                // finish a sub-roundoff remainder with one Euler step
                let d = f(t, &y);
                for i in 0..N {
                    y[i] += (t_end - t) * d[i];
                }
                t = t_end;
            }
            return Ok(OdeEnd { t, y, event: None });
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        let (y_new, err) = dopri_step(&mut f, t, &y, h);
        let en = error_norm(&y, &y_new, &err, opts);
        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Err(Error::SolverFailure(format!("non-finite state near t = {t}")));
            }
            continue;
        }
        if en <= 1.0 {
            let t_new = t + h;
            // event detection on the accepted step
            for (idx, g) in events.iter().enumerate() {
                let g_new = g(t_new, &y_new);
                if g_prev[idx] == 0.0 {
                    continue;
                }
                if g_new == 0.0 || g_new.signum() != g_prev[idx].signum() {
                    let (te, ye) = locate_event(&mut f, t, &y, h, *g, g_prev[idx]);
                    observer(te, &ye);
                    return Ok(OdeEnd { t: te, y: ye, event: Some(idx) });
                }
            }
            for (idx, g) in events.iter().enumerate() {
                g_prev[idx] = g(t_new, &y_new);
            }
            t = t_new;
            y = y_new;
            observer(t, &y);
        }
        let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() > opts.h_max {
            h = dir * opts.h_max;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::SolverFailure(format!("step size underflow at t = {t}")));
        }
    }
    Err(Error::SolverFailure(format!(
        "exceeded {} steps before reaching t = {t_end}",
        opts.max_steps
    )))
}

fn locate_event<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    h: f64,
    g: &dyn Fn(f64, &[f64; N]) -> f64,
    g0: f64,
) -> (f64, [f64; N])
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    // bracket in the fraction s of the accepted step
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut best = dopri_step(f, t, y, h).0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let ym = dopri_step(f, t, y, mid * h).0;
        let gm = g(t + mid * h, &ym);
        if gm == 0.0 {
            return (t + mid * h, ym);
        }
        if gm.signum() == g0.signum() {
            lo = mid;
        } else {
            hi = mid;
            best = ym;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    (t + hi * h, best)
}
