//! Traveling fronts `φ'' − cφ' + f(φ) = 0` by phase-plane shooting.
//!
//! A profile is tabulated on a uniform ξ-grid with φ, φ' and φ'' and evaluated
//! by quintic Hermite interpolation; outside the grid the tails continue
//! exponentially toward their limits with log-slopes measured at the ends.
//! All profiles are normalized so that φ(0) = 1/2.

use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::ode::{integrate, OdeOptions};
use crate::numerics::optimize::bisect;
use crate::reaction::{AssumptionClass, ReactionTerm};

/// Offset from the equilibria where shooting starts.
pub const SHOOT_OFFSET: f64 = 1e-8;
/// Default speed tolerance for the bisection on c.
pub const DEFAULT_SPEED_TOL: f64 = 1e-8;
/// Default tabulation spacing.
pub const DEFAULT_DXI: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// φ(−∞) = 0, φ(+∞) = 1.
    Increasing,
    /// φ(−∞) = 1, φ(+∞) = 0; obtained by reflecting an increasing profile.
    DecreasingReflect,
}

/// Roots of λ² − cλ + f'(0) = 0 and μ² − cμ + f'(1) = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeEigenvalues {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu1: f64,
    pub mu2: f64,
}

/// Constants of the exponential tail envelopes
/// `M̃₃e^{μ₂ξ} ≤ 1−φ ≤ M₃e^{μ₂ξ}` (ξ ≥ 0) and `M̃₄e^{λ₁ξ} ≤ φ ≤ M₄e^{λ₁ξ}` (ξ ≤ 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBounds {
    pub m3: f64,
    pub m3_tilde: f64,
    pub m4: f64,
    pub m4_tilde: f64,
}

#[derive(Debug, Clone)]
pub struct FrontProfile {
    c: f64,
    direction: Direction,
    xi0: f64,
    dxi: f64,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    ddphi: Vec<f64>,
    left_limit: f64,
    right_limit: f64,
    left_rate: f64,
    right_rate: f64,
}

fn quadratic_roots(c: f64, k: f64) -> Result<(f64, f64)> {
    let disc = c * c - 4.0 * k;
    let disc = if disc < 0.0 && disc > -1e-12 { 0.0 } else { disc };
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "complex roots of x² − {c}x + {k} = 0 (discriminant {disc:e})"
        )));
    }
    let s = disc.sqrt();
    Ok(((c + s) / 2.0, (c - s) / 2.0))
}

/// The four edge eigenvalues for speed `c`.
pub fn eigenvalues(f: &ReactionTerm, c: f64) -> Result<EdgeEigenvalues> {
    let (lambda1, lambda2) = quadratic_roots(c, f.f_prime(0.0))?;
    let (mu1, mu2) = quadratic_roots(c, f.f_prime(1.0))?;
    Ok(EdgeEigenvalues { lambda1, lambda2, mu1, mu2 })
}

fn shoot_options() -> OdeOptions {
    OdeOptions { rtol: 1e-10, atol: 1e-18, h0: 1e-2, h_max: 0.25, max_steps: 2_000_000 }
}

/// Signed shooting discriminator: φ' where φ first reaches 1, or
/// (max φ − 1) if the orbit turns back first. Increasing in c.
fn shooting_functional(f: &ReactionTerm, c: f64) -> Result<f64> {
    let lam = eigenvalues(f, c)?.lambda1;
    let y0 = [SHOOT_OFFSET, SHOOT_OFFSET * lam];
    let reach_one = |_: f64, y: &[f64; 2]| y[0] - 1.0;
    let turn = |_: f64, y: &[f64; 2]| y[1];
    let end = integrate(
        |_, y: &[f64; 2]| [y[1], c * y[1] - f.f(y[0])],
        0.0,
        y0,
        5000.0,
        &shoot_options(),
        &[&reach_one, &turn],
        |_, _| {},
    )?;
    Ok(match end.event {
        Some(0) => end.y[1],
        // turned back, or captured by the interior equilibrium
        _ => end.y[0] - 1.0,
    })
}

/// Integrates from `(xi_start, y_start)` and records φ, φ' at each target.
fn trace(
    f: &ReactionTerm,
    c: f64,
    xi_start: f64,
    y_start: [f64; 2],
    targets: &[f64],
) -> Result<Vec<[f64; 2]>> {
    let opts = shoot_options();
    let mut xi = xi_start;
    let mut y = y_start;
    let mut out = Vec::with_capacity(targets.len());
    for &tgt in targets {
        let end = integrate(|_, s: &[f64; 2]| [s[1], c * s[1] - f.f(s[0])], xi, y, tgt, &opts, &[], |_, _| {})?;
        xi = tgt;
        y = end.y;
        out.push(y);
    }
    Ok(out)
}

/// Integrates from `y0` until φ = 1/2 and returns the ξ at which it happened.
fn half_crossing(f: &ReactionTerm, c: f64, y0: [f64; 2], backward: bool) -> Result<f64> {
    let half = |_: f64, y: &[f64; 2]| y[0] - 0.5;
    let turn = |_: f64, y: &[f64; 2]| y[1];
    let t_end = if backward { -5000.0 } else { 5000.0 };
    let end = integrate(
        |_, y: &[f64; 2]| [y[1], c * y[1] - f.f(y[0])],
        0.0,
        y0,
        t_end,
        &shoot_options(),
        &[&half, &turn],
        |_, _| {},
    )?;
    match end.event {
        Some(0) => Ok(end.t),
        _ => Err(Error::SolverFailure(format!(
            "orbit at speed {c} never reached φ = 1/2 monotonically"
        ))),
    }
}

/// Solves the bistable front: bisection on c over the shooting discriminator.
pub fn solve_front_bistable(f: &ReactionTerm, tol: f64) -> Result<FrontProfile> {
    solve_front_bistable_with(f, tol, DEFAULT_DXI)
}

pub fn solve_front_bistable_with(f: &ReactionTerm, tol: f64, dxi: f64) -> Result<FrontProfile> {
    if !f.is_bistable() {
        return Err(Error::InvalidParameter("bistable front requested for a monostable term".into()));
    }
    if !(tol > 0.0) || !(dxi > 0.0) {
        return Err(Error::InvalidParameter("tolerance and spacing must be positive".into()));
    }
    let bound = 2.0 * f.max_abs_f_prime().sqrt();
    let lo = shooting_functional(f, -bound)?;
    let hi = shooting_functional(f, bound)?;
    if lo.signum() == hi.signum() {
        return Err(Error::SolverFailure(format!(
            "speed bracket [{:.6}, {:.6}] exhausted: discriminator {lo:e} and {hi:e} share a sign",
            -bound, bound
        )));
    }
    let mut c = bisect(
        |c| shooting_functional(f, c).unwrap_or(f64::NAN),
        -bound,
        bound,
        tol,
    )?;
    if c.abs() < tol {
        // balanced terms: the discriminator is odd about c = 0 only to bisection accuracy
        if shooting_functional(f, 0.0)?.abs() < 1e-6 {
            c = 0.0;
        }
    }
    let e = eigenvalues(f, c)?;
    let left_start = [SHOOT_OFFSET, SHOOT_OFFSET * e.lambda1];
    let right_start = [1.0 - SHOOT_OFFSET, -SHOOT_OFFSET * e.mu2];
    tabulate_from_shots(f, c, left_start, right_start, dxi)
}

fn tabulate_from_shots(
    f: &ReactionTerm,
    c: f64,
    left_start: [f64; 2],
    right_start: [f64; 2],
    dxi: f64,
) -> Result<FrontProfile> {
    let xl = half_crossing(f, c, left_start, false)?;
    let xr = half_crossing(f, c, right_start, true)?;
    // in normalized coordinates the shots start at −xl (left) and −xr (right)
    let left_origin = -xl;
    let right_origin = -xr;
    let k_min = (left_origin / dxi).ceil() as i64;
    let k_max = (right_origin / dxi).floor() as i64;
    if k_min >= 0 || k_max <= 0 {
        return Err(Error::SolverFailure("degenerate profile extent".into()));
    }
    let left_targets: Vec<f64> = (k_min..=0).map(|k| k as f64 * dxi).collect();
    let right_targets: Vec<f64> = (1..=k_max).rev().map(|k| k as f64 * dxi).collect();
    let left = trace(f, c, left_origin, left_start, &left_targets)?;
    let mut right = trace(f, c, right_origin, right_start, &right_targets)?;
    right.reverse();
    let states: Vec<[f64; 2]> = left.into_iter().chain(right).collect();
    profile_from_states(f, c, k_min as f64 * dxi, dxi, &states)
}

/// Solves the monostable front for a requested speed `c ≥ c_min` by shooting
/// backward from the saddle at u = 1.
pub fn solve_front_monostable(f: &ReactionTerm, c: f64) -> Result<FrontProfile> {
    solve_front_monostable_with(f, c, DEFAULT_DXI)
}

pub fn solve_front_monostable_with(f: &ReactionTerm, c: f64, dxi: f64) -> Result<FrontProfile> {
    let c_min = match f.assumption_class() {
        AssumptionClass::MonostableAPrime => f.c_min().unwrap_or(0.0),
        AssumptionClass::BistableA => {
            return Err(Error::InvalidParameter("monostable front requested for a bistable term".into()))
        }
    };
    if c < c_min - 1e-9 {
        return Err(Error::NoFront { requested: c, c_min });
    }
    let c = c.max(c_min);
    let e = eigenvalues(f, c)?;
    let right_start = [1.0 - SHOOT_OFFSET, -SHOOT_OFFSET * e.mu2];
    let xr = half_crossing(f, c, right_start, true)?;
    let right_origin = -xr;
    // march backward until φ drops below the shooting offset
    let opts = shoot_options();
    let low = |_: f64, y: &[f64; 2]| y[0] - SHOOT_OFFSET;
    let turn = |_: f64, y: &[f64; 2]| y[1];
    let end = integrate(
        |_, y: &[f64; 2]| [y[1], c * y[1] - f.f(y[0])],
        right_origin,
        right_start,
        right_origin - 5000.0,
        &opts,
        &[&low, &turn],
        |_, _| {},
    )?;
    if end.event != Some(0) {
        return Err(Error::SolverFailure(format!("monostable orbit at speed {c} is not monotone")));
    }
    let k_min = (end.t / dxi).ceil() as i64;
    let k_max = (right_origin / dxi).floor() as i64;
    let targets: Vec<f64> = (k_min..=k_max).rev().map(|k| k as f64 * dxi).collect();
    let mut states = trace(f, c, right_origin, right_start, &targets)?;
    states.reverse();
    profile_from_states(f, c, k_min as f64 * dxi, dxi, &states)
}

fn profile_from_states(f: &ReactionTerm, c: f64, xi0: f64, dxi: f64, states: &[[f64; 2]]) -> Result<FrontProfile> {
    let phi: Vec<f64> = states.iter().map(|s| s[0]).collect();
    let dphi: Vec<f64> = states.iter().map(|s| s[1]).collect();
    let ddphi: Vec<f64> = states.iter().map(|s| c * s[1] - f.f(s[0])).collect();
    FrontProfile::from_table(c, Direction::Increasing, xi0, dxi, phi, dphi, ddphi)?.renormalized()
}

/// Tail envelope constants from the tabulated profile: every grid point with
/// ξ ≤ 0 (resp. ξ ≥ 0) enters the max/min.
pub fn fit_tail_constants(p: &FrontProfile, e: &EdgeEigenvalues) -> Result<TailBounds> {
    let p = match p.direction {
        Direction::Increasing => p.clone(),
        Direction::DecreasingReflect => reflect(p),
    };
    let first = p.phi[0];
    let last = *p.phi.last().unwrap();
    if !(first < 1e-3) || !(1.0 - last < 1e-3) {
        return Err(Error::FitFailure(format!(
            "profile not resolved into its tails: φ(start) = {first:e}, 1 − φ(end) = {:e}",
            1.0 - last
        )));
    }
    let (mut m4, mut m4t) = (f64::NEG_INFINITY, f64::INFINITY);
    let (mut m3, mut m3t) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, &v) in p.phi.iter().enumerate() {
        let xi = p.xi(i);
        if xi <= 1e-12 {
            let r = v * (-e.lambda1 * xi).exp();
            m4 = m4.max(r);
            m4t = m4t.min(r);
        }
        if xi >= -1e-12 {
            let r = (1.0 - v) * (-e.mu2 * xi).exp();
            m3 = m3.max(r);
            m3t = m3t.min(r);
        }
    }
    for v in [m3, m3t, m4, m4t] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::FitFailure(format!("non-positive or unbounded tail ratio {v:e}")));
        }
    }
    Ok(TailBounds { m3, m3_tilde: m3t, m4, m4_tilde: m4t })
}

/// The reflected profile ξ ↦ φ(−ξ); it solves the same ODE with speed −c.
pub fn reflect(p: &FrontProfile) -> FrontProfile {
    let n = p.phi.len();
    let phi: Vec<f64> = p.phi.iter().rev().copied().collect();
    let dphi: Vec<f64> = p.dphi.iter().rev().map(|d| -d).collect();
    let ddphi: Vec<f64> = p.ddphi.iter().rev().copied().collect();
    let xi0 = -(p.xi0 + (n - 1) as f64 * p.dxi);
    FrontProfile {
        c: -p.c,
        direction: match p.direction {
            Direction::Increasing => Direction::DecreasingReflect,
            Direction::DecreasingReflect => Direction::Increasing,
        },
        xi0,
        dxi: p.dxi,
        phi,
        dphi,
        ddphi,
        left_limit: p.right_limit,
        right_limit: p.left_limit,
        left_rate: -p.right_rate,
        right_rate: -p.left_rate,
    }
}

impl FrontProfile {
    /// Builds a profile from a table of φ, φ' and φ'' on the grid `xi0 + i·dxi`.
    pub fn from_table(
        c: f64,
        direction: Direction,
        xi0: f64,
        dxi: f64,
        phi: Vec<f64>,
        dphi: Vec<f64>,
        ddphi: Vec<f64>,
    ) -> Result<Self> {
        let n = phi.len();
        if n < 16 || dphi.len() != n || ddphi.len() != n {
            return Err(Error::InvalidParameter("profile table too short or mismatched".into()));
        }
        if phi.iter().chain(dphi.iter()).chain(ddphi.iter()).any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure("non-finite profile values".into()));
        }
        let (left_limit, right_limit) = match direction {
            Direction::Increasing => (0.0, 1.0),
            Direction::DecreasingReflect => (1.0, 0.0),
        };
        let span = 10.min(n - 1);
        let rate = |a: f64, b: f64, lim: f64| -> f64 {
            let (ra, rb) = ((a - lim).abs(), (b - lim).abs());
            if ra > 0.0 && rb > 0.0 {
                (rb / ra).ln() / (span as f64 * dxi)
            } else {
                0.0
            }
        };
        let left_rate = rate(phi[0], phi[span], left_limit);
        let right_rate = rate(phi[n - 1 - span], phi[n - 1], right_limit);
        Ok(Self { c, direction, xi0, dxi, phi, dphi, ddphi, left_limit, right_limit, left_rate, right_rate })
    }

    /// Tabulates an analytic profile (used for oracles and tests).
    pub fn from_fn(
        c: f64,
        direction: Direction,
        xi_min: f64,
        xi_max: f64,
        dxi: f64,
        phi: impl Fn(f64) -> f64,
        dphi: impl Fn(f64) -> f64,
        ddphi: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let n = ((xi_max - xi_min) / dxi).round() as usize + 1;
        let xs: Vec<f64> = (0..n).map(|i| xi_min + i as f64 * dxi).collect();
        Self::from_table(
            c,
            direction,
            xi_min,
            dxi,
            xs.iter().map(|&x| phi(x)).collect(),
            xs.iter().map(|&x| dphi(x)).collect(),
            xs.iter().map(|&x| ddphi(x)).collect(),
        )
    }

    /// Removes the residual offset of the φ(0) = 1/2 normalization left by
    /// integration error along the shots.
    fn renormalized(mut self) -> Result<Self> {
        let root = bisect(|xi| self.eval(xi) - 0.5, -1.0, 1.0, 1e-14)?;
        self.xi0 -= root;
        Ok(self)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn dxi(&self) -> f64 {
        self.dxi
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn xi(&self, i: usize) -> f64 {
        self.xi0 + i as f64 * self.dxi
    }

    pub fn xi_range(&self) -> (f64, f64) {
        (self.xi0, self.xi(self.phi.len() - 1))
    }

    pub fn phi_table(&self) -> &[f64] {
        &self.phi
    }

    pub fn dphi_table(&self) -> &[f64] {
        &self.dphi
    }

    pub fn limits(&self) -> (f64, f64) {
        (self.left_limit, self.right_limit)
    }

    /// Log-slopes of |φ − limit| measured at the left and right table ends.
    pub fn tail_rates(&self) -> (f64, f64) {
        (self.left_rate, self.right_rate)
    }

    /// The ξ with φ(ξ) = level, for a level strictly between the limits.
    pub fn inverse(&self, level: f64) -> Result<f64> {
        let (a, b) = self.xi_range();
        bisect(|xi| self.eval(xi) - level, a - 50.0, b + 50.0, 1e-13)
    }

    /// φ(ξ).
    pub fn eval(&self, xi: f64) -> f64 {
        self.eval_both(xi).0
    }

    /// φ'(ξ).
    pub fn derivative(&self, xi: f64) -> f64 {
        self.eval_both(xi).1
    }

    /// (φ(ξ), φ'(ξ)).
    pub fn eval_both(&self, xi: f64) -> (f64, f64) {
        let (v, d, _) = self.eval_all(xi);
        (v, d)
    }

    /// φ''(ξ).
    pub fn second_derivative(&self, xi: f64) -> f64 {
        self.eval_all(xi).2
    }

    /// (φ(ξ), φ'(ξ), φ''(ξ)).
    pub fn eval_all(&self, xi: f64) -> (f64, f64, f64) {
        let n = self.phi.len();
        let s = (xi - self.xi0) / self.dxi;
        if s <= 0.0 {
            let (d0, r) = (self.phi[0] - self.left_limit, self.left_rate);
            let e = d0 * (r * (xi - self.xi0)).exp();
            return (self.left_limit + e, r * e, r * r * e);
        }
        let last = (n - 1) as f64;
        if s >= last {
            let (d0, r) = (self.phi[n - 1] - self.right_limit, self.right_rate);
            let e = d0 * (r * (xi - self.xi(n - 1))).exp();
            return (self.right_limit + e, r * e, r * r * e);
        }
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        let h = self.dxi;
        let (p0, p1) = (self.phi[i], self.phi[i + 1]);
        let (m0, m1) = (self.dphi[i] * h, self.dphi[i + 1] * h);
        let (a0, a1) = (self.ddphi[i] * h * h, self.ddphi[i + 1] * h * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let b = [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            0.5 * (t3 - 2.0 * t4 + t5),
        ];
        let db = [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4),
        ];
        let ddb = [
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3),
            60.0 * t - 180.0 * t2 + 120.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3),
        ];
        let k = [p0, m0, a0, p1, m1, a1];
        let dot = |w: &[f64; 6]| w.iter().zip(k.iter()).map(|(a, b)| a * b).sum::<f64>();
        (dot(&b), dot(&db) / h, dot(&ddb) / (h * h))
    }

    /// The traveling wave φ(x + ct) built from this profile.
    pub fn wave(&self, x: f64, t: f64) -> f64 {
        self.eval(x + self.c * t)
    }

    /// Profile translated to the right by `s`: ξ ↦ φ(ξ − s).
    pub fn translate(&self, s: f64) -> FrontProfile {
        let mut p = self.clone();
        p.xi0 += s;
        p
    }

    /// Largest centered-difference residual of φ'' − cφ' + f(φ) on the table.
    pub fn ode_residual(&self, f: &ReactionTerm) -> f64 {
        let h = self.dxi;
        (1..self.phi.len() - 1)
            .map(|i| {
                let d2 = (self.phi[i + 1] - 2.0 * self.phi[i] + self.phi[i - 1]) / (h * h);
                let d1 = (self.phi[i + 1] - self.phi[i - 1]) / (2.0 * h);
                (d2 - self.c * d1 + f.f(self.phi[i])).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Whether consecutive table values move strictly in the profile's direction.
    pub fn is_strictly_monotone(&self) -> bool {
        let sign = match self.direction {
            Direction::Increasing => 1.0,
            Direction::DecreasingReflect => -1.0,
        };
        self.phi.windows(2).all(|w| sign * (w[1] - w[0]) > 0.0)
    }

    /// Two-column CSV with a header line carrying the speed and normalization.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let dir = match self.direction {
            Direction::Increasing => "increasing",
            Direction::DecreasingReflect => "decreasing",
        };
        writeln!(w, "# c={:.16e} normalization=phi(0)=1/2 direction={dir}", self.c)?;
        writeln!(w, "xi,phi")?;
        for (i, v) in self.phi.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.xi(i), v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(xi: f64) -> f64 {
        1.0 / (1.0 + (-xi / 2f64.sqrt()).exp())
    }

    #[test]
    fn eigenvalue_quadratics() {
        let f = ReactionTerm::cubic(0.25).unwrap();
        let c = 0.3535534;
        let e = eigenvalues(&f, c).unwrap();
        assert!((e.lambda1 - 0.7071068).abs() < 1e-6);
        assert!((e.mu2 + 0.7071068).abs() < 1e-6);
        for (r, k) in [(e.lambda1, -0.25), (e.lambda2, -0.25), (e.mu1, -0.75), (e.mu2, -0.75)] {
            assert!((r * r - c * r + k).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_symmetric_at_zero_speed() {
        let f = ReactionTerm::cubic(0.5).unwrap();
        let e = eigenvalues(&f, 0.0).unwrap();
        let k: f64 = 0.5;
        assert!((e.lambda1 - k.sqrt()).abs() < 1e-15);
        assert_eq!(e.lambda1, -e.lambda2);
        assert_eq!(e.lambda1, e.mu1);
        assert_eq!(e.mu1, -e.mu2);
    }

    #[test]
    fn eigenvalues_complex_rejected() {
        let f = ReactionTerm::fisher();
        assert!(matches!(eigenvalues(&f, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn bistable_front_matches_closed_form() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let p = solve_front_bistable(&f, 1e-10).unwrap();
        let c_exact = 0.4 / 2f64.sqrt();
        assert!((p.c() - c_exact).abs() < 1e-7, "c = {}", p.c());
        for xi in [-20.0, -5.0, -1.0, 0.0, 0.7, 3.0, 15.0] {
            assert!((p.eval(xi) - exact(xi)).abs() < 1e-6, "xi = {xi}");
        }
        assert!(p.is_strictly_monotone());
        assert!((p.eval(0.0) - 0.5).abs() < 1e-9);
        let (a, b) = p.xi_range();
        assert!(p.eval(a) < 1e-6 && 1.0 - p.eval(b) < 1e-6);
        assert!(p.ode_residual(&f) < 10.0 * p.dxi() * p.dxi() * 6.0);
    }

    #[test]
    fn balanced_front_has_zero_speed() {
        let f = ReactionTerm::cubic(0.5).unwrap();
        let p = solve_front_bistable(&f, 1e-8).unwrap();
        assert!(p.c().abs() < 1e-8);
    }

    #[test]
    fn reflect_is_involution() {
        let f = ReactionTerm::cubic(0.25).unwrap();
        let p = solve_front_bistable(&f, 1e-8).unwrap();
        let r = reflect(&p);
        assert_eq!(r.c(), -p.c());
        assert_eq!(r.limits(), (1.0, 0.0));
        assert!(r.is_strictly_monotone());
        assert!((r.eval(-40.0) - 1.0).abs() < 1e-6);
        assert!(r.eval(40.0) < 1e-6);
        let rr = reflect(&r);
        for xi in [-10.0, -0.3, 0.0, 2.2, 9.0] {
            assert!((rr.eval(xi) - p.eval(xi)).abs() < 1e-14);
            assert!((r.eval(xi) - p.eval(-xi)).abs() < 1e-14);
        }
        assert!(r.ode_residual(&f) < 1e-3);
    }

    #[test]
    fn fisher_fronts() {
        let f = ReactionTerm::fisher();
        assert!(matches!(solve_front_monostable(&f, 1.5), Err(Error::NoFront { .. })));
        let p = solve_front_monostable(&f, 2.0).unwrap();
        assert!(p.is_strictly_monotone());
        let p = solve_front_monostable(&f, 2.5).unwrap();
        assert!(p.is_strictly_monotone());
        let (a, b) = p.xi_range();
        assert!(p.eval(a) < 1e-6 && 1.0 - p.eval(b) < 1e-6);
        assert!((p.eval(0.0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn tail_constants_exact_profile() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let c = 0.4 / 2f64.sqrt();
        let p = FrontProfile::from_fn(
            c,
            Direction::Increasing,
            -40.0,
            40.0,
            0.01,
            exact,
            |x| {
                let e = exact(x);
                e * (1.0 - e) / 2f64.sqrt()
            },
            |x| {
                let e = exact(x);
                e * (1.0 - e) * (1.0 - 2.0 * e) / 2.0
            },
        )
        .unwrap();
        let e = eigenvalues(&f, c).unwrap();
        let tb = fit_tail_constants(&p, &e).unwrap();
        assert!(tb.m4 >= 0.5 && tb.m4_tilde <= tb.m4);
        for i in 0..p.len() {
            let xi = p.xi(i);
            let v = p.phi_table()[i];
            if xi <= 0.0 {
                let r = v * (-e.lambda1 * xi).exp();
                assert!(r <= tb.m4 * (1.0 + 1e-14) && r >= tb.m4_tilde * (1.0 - 1e-14));
            } else {
                let r = (1.0 - v) * (-e.mu2 * xi).exp();
                assert!(r <= tb.m3 * (1.0 + 1e-14) && r >= tb.m3_tilde * (1.0 - 1e-14));
            }
        }
        let s = 1.5;
        let tb2 = fit_tail_constants(&p.translate(s), &e).unwrap();
        assert!((tb2.m4 / tb.m4 - (-e.lambda1 * s).exp()).abs() < 1e-4);
    }

    #[test]
    fn interpolated_second_derivative_satisfies_ode() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let p = solve_front_bistable(&f, 1e-10).unwrap();
        for xi in [-12.345, -3.001, -0.005, 0.5, 4.4449, 11.0] {
            let (v, d, dd) = p.eval_all(xi);
            assert!((dd - p.c() * d + f.f(v)).abs() < 1e-8, "xi = {xi}");
            let e = exact(xi);
            assert!((dd - e * (1.0 - e) * (1.0 - 2.0 * e) / 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn csv_header_carries_speed() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let p = solve_front_bistable(&f, 1e-8).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# c="));
        assert_eq!(text.lines().nth(1), Some("xi,phi"));
    }
}
