//! Time stepping of `u_t = u_xx + f(u)` on a truncated uniform grid.
//!
//! Diffusion is Crank–Nicolson; the reaction enters explicitly through a
//! Heun predictor–corrector, so each step costs two tridiagonal solves with a
//! fixed factorization. Steps are adjusted so that every requested snapshot
//! time is hit exactly.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::tridiag::Tridiagonal;
use crate::reaction::ReactionTerm;

/// Values above this magnitude abort the run.
pub const BLOWUP: f64 = 10.0;

/// Spatial grid with field values at a time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub x0: f64,
    pub dx: f64,
    pub t: f64,
    pub u: Vec<f64>,
}

impl GridField {
    /// Grid `[-halfwidth, halfwidth]` with an odd number of points, centered at 0.
    pub fn symmetric(halfwidth: f64, dx: f64, t: f64, init: impl Fn(f64) -> f64) -> Result<Self> {
        if !(dx > 0.0) || !(halfwidth > dx) {
            return Err(Error::InvalidParameter(format!(
                "grid needs dx > 0 and halfwidth > dx (dx = {dx}, halfwidth = {halfwidth})"
            )));
        }
        let half = (halfwidth / dx).round() as usize;
        let n = 2 * half + 1;
        let x0 = -(half as f64) * dx;
        let u = (0..n).map(|i| init(x0 + i as f64 * dx)).collect();
        Ok(Self { x0, dx, t, u })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.u.len()).map(move |i| self.x(i))
    }

    pub fn halfwidth(&self) -> f64 {
        -self.x0
    }

    /// Whether grid point i and n−1−i are mirror images about x = 0.
    pub fn is_symmetric_grid(&self) -> bool {
        let last = self.x(self.u.len() - 1);
        (self.x0 + last).abs() <= 1e-9 * self.dx
    }

    pub fn sup_norm(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// sup |u − c| over the grid.
    pub fn sup_distance_to(&self, c: f64) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max((v - c).abs()))
    }

    /// Same grid and time, new values.
    pub fn with_values(&self, u: Vec<f64>) -> Self {
        Self { x0: self.x0, dx: self.dx, t: self.t, u }
    }

    /// Binary record: t (f64), n (u64), x0 (f64), dx (f64), u[0..n) (f64), little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&self.t.to_le_bytes())?;
        w.write_all(&(self.u.len() as u64).to_le_bytes())?;
        w.write_all(&self.x0.to_le_bytes())?;
        w.write_all(&self.dx.to_le_bytes())?;
        for v in &self.u {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut b = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut b)?;
            Ok(b)
        };
        let t = f64::from_le_bytes(next(&mut r)?);
        let n = u64::from_le_bytes(next(&mut r)?) as usize;
        let x0 = f64::from_le_bytes(next(&mut r)?);
        let dx = f64::from_le_bytes(next(&mut r)?);
        if n > (1 << 32) {
            return Err(Error::Parse(format!("implausible snapshot length {n}")));
        }
        let mut u = Vec::with_capacity(n);
        for _ in 0..n {
            u.push(f64::from_le_bytes(next(&mut r)?));
        }
        Ok(Self { x0, dx, t, u })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# t={:.16e}", self.t)?;
        writeln!(w, "x,u")?;
        for (i, v) in self.u.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.x(i), v)?;
        }
        Ok(())
    }

    /// Centered second difference with mirror (Neumann) closure at the ends.
    pub fn laplacian(&self) -> Vec<f64> {
        laplacian(&self.u, self.dx)
    }
}

fn laplacian(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    let k = 1.0 / (dx * dx);
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    out[0] = 2.0 * (u[1] - u[0]) * k;
    out[n - 1] = 2.0 * (u[n - 2] - u[n - 1]) * k;
    for i in 1..n - 1 {
        out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * k;
    }
    out
}

/// Spatial discretization of ∂ₓₓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpatialScheme {
    /// Three-point centered difference, O(dx²).
    Central,
    /// Compact (Numerov) form A·u_xx = δ²u/dx² with A = (1, 10, 1)/12, O(dx⁴).
    #[default]
    Compact,
}

impl SpatialScheme {
    /// (off-diagonal, diagonal) weights of the mass operator A.
    fn mass(self) -> (f64, f64) {
        match self {
            SpatialScheme::Central => (0.0, 1.0),
            SpatialScheme::Compact => (1.0 / 12.0, 10.0 / 12.0),
        }
    }
}

/// Applies the mass operator with mirror closure at the ends.
fn apply_mass(scheme: SpatialScheme, v: &[f64], out: &mut [f64]) {
    let (o, d) = scheme.mass();
    let n = v.len();
    out[0] = d * v[0] + 2.0 * o * v[1];
    out[n - 1] = d * v[n - 1] + 2.0 * o * v[n - 2];
    for i in 1..n - 1 {
        out[i] = o * (v[i - 1] + v[i + 1]) + d * v[i];
    }
}

fn mass_matrix(scheme: SpatialScheme, n: usize) -> Result<Tridiagonal> {
    let (o, d) = scheme.mass();
    let mut a = vec![o; n];
    let mut c = vec![o; n];
    a[0] = 0.0;
    c[n - 1] = 0.0;
    c[0] = 2.0 * o;
    a[n - 1] = 2.0 * o;
    Tridiagonal::new(&a, &vec![d; n], &c)
}

/// Semi-discrete ∂ₜu = A⁻¹δ²u/dx² + f(u) with mirror closure at the ends.
pub fn semi_discrete_rate(g: &GridField, f: &ReactionTerm, scheme: SpatialScheme) -> Result<Vec<f64>> {
    let mut lap = g.laplacian();
    if scheme != SpatialScheme::Central {
        mass_matrix(scheme, g.len())?.solve_in_place(&mut lap);
    }
    Ok(lap.into_iter().zip(&g.u).map(|(l, &u)| l + f.f(u)).collect())
}

/// Boundary data for the truncated domain.
#[derive(Clone)]
pub enum Boundary {
    /// Homogeneous Neumann (mirror) closure.
    Neumann,
    /// Time-dependent Dirichlet values `g(x, t)` at both end points.
    Dirichlet(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Neumann => f.write_str("Neumann"),
            Boundary::Dirichlet(_) => f.write_str("Dirichlet(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    /// Largest step; default min(0.25·dx², 0.01).
    pub dt: Option<f64>,
    pub boundary: Boundary,
    pub scheme: SpatialScheme,
    /// Output times in (t0, t_end]; the initial field is always recorded.
    pub snapshot_times: Vec<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt: None, boundary: Boundary::Neumann, scheme: SpatialScheme::default(), snapshot_times: Vec::new() }
    }
}

impl EvolveOptions {
    /// Snapshots every `every` time units from t0 to t_end.
    pub fn every(t0: f64, t_end: f64, every: f64) -> Self {
        let n = ((t_end - t0) / every).round().max(1.0) as usize;
        let snapshot_times = (1..=n).map(|k| t0 + (t_end - t0) * k as f64 / n as f64).collect();
        Self { snapshot_times, ..Self::default() }
    }

    pub fn with_boundary(mut self, b: Boundary) -> Self {
        self.boundary = b;
        self
    }

    pub fn with_scheme(mut self, scheme: SpatialScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }
}

pub fn default_dt(dx: f64) -> f64 {
    (0.25 * dx * dx).min(0.01)
}

/// Snapshots of an evolution in increasing time order, with the
/// semi-discrete ∂ₜu of the producing scheme at each snapshot.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<GridField>,
    rates: Vec<Vec<f64>>,
    scheme: SpatialScheme,
}

impl Trajectory {
    pub fn new(snapshots: Vec<GridField>, f: &ReactionTerm, scheme: SpatialScheme) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::InsufficientData("trajectory without snapshots".into()));
        }
        let rates = snapshots.iter().map(|g| semi_discrete_rate(g, f, scheme)).collect::<Result<_>>()?;
        Ok(Self { snapshots, rates, scheme })
    }

    pub fn scheme(&self) -> SpatialScheme {
        self.scheme
    }

    /// Semi-discrete ∂ₜu at snapshot k.
    pub fn rate(&self, k: usize) -> &[f64] {
        &self.rates[k]
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn first(&self) -> &GridField {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &GridField {
        self.snapshots.last().expect("trajectory is never empty")
    }

    /// Index of the snapshot whose time equals `t` to within 1e-9.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.snapshots.iter().position(|s| (s.t - t).abs() < 1e-9)
    }

    /// Discrete ∂ₜu at snapshot `k`: three-point formula (centered in the
    /// interior, one-sided second order at the ends).
    pub fn time_derivative(&self, k: usize) -> Result<Vec<f64>> {
        let m = self.snapshots.len();
        if m < 3 {
            return Err(Error::InsufficientData("time derivative needs three snapshots".into()));
        }
        let (i0, i1, i2) = if k == 0 {
            (0, 1, 2)
        } else if k == m - 1 {
            (m - 3, m - 2, m - 1)
        } else {
            (k - 1, k, k + 1)
        };
        let (t0, t1, t2) = (self.snapshots[i0].t, self.snapshots[i1].t, self.snapshots[i2].t);
        let t = self.snapshots[k].t;
        // derivative of the quadratic Lagrange interpolant at t
        let w0 = ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2));
        let w1 = ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2));
        let w2 = ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1));
        let (a, b, c) = (&self.snapshots[i0].u, &self.snapshots[i1].u, &self.snapshots[i2].u);
        Ok((0..a.len()).map(|i| w0 * a[i] + w1 * b[i] + w2 * c[i]).collect())
    }

    /// Field at an arbitrary time inside the covered interval: cubic Hermite
    /// in time with the stored semi-discrete rates.
    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        let first = self.first().t;
        let last = self.last().t;
        if t < first - 1e-12 || t > last + 1e-12 {
            return Err(Error::Domain(format!("time {t} outside trajectory [{first}, {last}]")));
        }
        let k = match self.snapshots.iter().position(|s| s.t >= t) {
            Some(0) => return Ok(self.snapshots[0].u.clone()),
            Some(k) => k,
            None => return Ok(self.last().u.clone()),
        };
        Ok((0..self.first().len()).map(|i| self.hermite(k, i, t)).collect())
    }

    /// Cubic Hermite value at node i between snapshots k−1 and k.
    fn hermite(&self, k: usize, i: usize, t: f64) -> f64 {
        let (a, b) = (&self.snapshots[k - 1], &self.snapshots[k]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * a.u[i]
            + (s3 - 2.0 * s2 + s) * h * self.rates[k - 1][i]
            + (-2.0 * s3 + 3.0 * s2) * b.u[i]
            + (s3 - s2) * h * self.rates[k][i]
    }
}

impl Trajectory {
    /// u(x, t) at an arbitrary point: cubic Hermite in time with the
    /// semi-discrete rate, cubic Lagrange in x through four nodes. Arguments
    /// outside the covered rectangle are clamped to it.
    pub fn eval_point(&self, x: f64, t: f64) -> f64 {
        let g0 = self.first();
        let n = g0.len();
        let s = ((x - g0.x0) / g0.dx).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).clamp(1, n - 3);
        let tau = s - i as f64;
        // Lagrange weights on nodes i-1, i, i+1, i+2
        let w = [
            -tau * (tau - 1.0) * (tau - 2.0) / 6.0,
            (tau + 1.0) * (tau - 1.0) * (tau - 2.0) / 2.0,
            -(tau + 1.0) * tau * (tau - 2.0) / 2.0,
            (tau + 1.0) * tau * (tau - 1.0) / 6.0,
        ];
        let m = self.snapshots.len();
        let k = self.snapshots.partition_point(|g| g.t < t);
        let node = |j: usize| -> f64 {
            if k == 0 {
                self.snapshots[0].u[j]
            } else if k >= m {
                self.snapshots[m - 1].u[j]
            } else {
                self.hermite(k, j, t)
            }
        };
        (0..4).map(|q| w[q] * node(i + q - 1)).sum()
    }
}

struct Stepper {
    n: usize,
    dt: f64,
    r: f64,
    scheme: SpatialScheme,
    lu: Tridiagonal,
    dirichlet: bool,
}

impl Stepper {
    /// Left-hand operator A − (dt/2)δ²/dx², with identity rows at Dirichlet ends.
    fn new(n: usize, dx: f64, dt: f64, scheme: SpatialScheme, dirichlet: bool) -> Result<Self> {
        let r = dt / (dx * dx);
        let (o, d) = scheme.mass();
        let mut a = vec![o - 0.5 * r; n];
        let mut b = vec![d + r; n];
        let mut c = vec![o - 0.5 * r; n];
        a[0] = 0.0;
        c[n - 1] = 0.0;
        if dirichlet {
            b[0] = 1.0;
            c[0] = 0.0;
            b[n - 1] = 1.0;
            a[n - 1] = 0.0;
        } else {
            // mirror ghost points double the inward coupling
            c[0] = 2.0 * o - r;
            a[n - 1] = 2.0 * o - r;
        }
        Ok(Self { n, dt, r, scheme, lu: Tridiagonal::new(&a, &b, &c)?, dirichlet })
    }

    /// Explicit half of the CN operator: A u + (dt/2)·δ²u/dx².
    fn explicit(&self, u: &[f64], out: &mut [f64]) {
        let n = self.n;
        let h = 0.5 * self.r;
        apply_mass(self.scheme, u, out);
        for i in 1..n - 1 {
            out[i] += h * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
        }
        out[0] += h * 2.0 * (u[1] - u[0]);
        out[n - 1] += h * 2.0 * (u[n - 2] - u[n - 1]);
    }

    fn step(&self, f: &ReactionTerm, u: &mut [f64], bc_next: Option<(f64, f64)>, work: &mut Work) {
        let n = self.n;
        let dt = self.dt;
        self.explicit(u, &mut work.base);
        for i in 0..n {
            work.fu[i] = f.f(u[i]);
        }
        apply_mass(self.scheme, &work.fu, &mut work.mf);
        for i in 0..n {
            work.pred[i] = work.base[i] + dt * work.mf[i];
        }
        if let (true, Some((l, r))) = (self.dirichlet, bc_next) {
            work.pred[0] = l;
            work.pred[n - 1] = r;
        }
        self.lu.solve_in_place(&mut work.pred);
        for i in 0..n {
            work.fu[i] += f.f(work.pred[i]);
        }
        apply_mass(self.scheme, &work.fu, &mut work.mf);
        for i in 0..n {
            u[i] = work.base[i] + 0.5 * dt * work.mf[i];
        }
        if let (true, Some((l, r))) = (self.dirichlet, bc_next) {
            u[0] = l;
            u[n - 1] = r;
        }
        self.lu.solve_in_place(u);
    }
}

struct Work {
    base: Vec<f64>,
    pred: Vec<f64>,
    fu: Vec<f64>,
    mf: Vec<f64>,
}

/// Evolves `u0` from `u0.t` to `t_end`, recording the requested snapshots.
pub fn evolve(u0: &GridField, f: &ReactionTerm, t_end: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    evolve_with(u0, f, t_end, opts, |_| Ok(()))
}

/// Like [`evolve`], calling `visit` on every snapshot as it is produced
/// (returning an error from `visit` aborts the run).
pub fn evolve_with(
    u0: &GridField,
    f: &ReactionTerm,
    t_end: f64,
    opts: &EvolveOptions,
    mut visit: impl FnMut(&GridField) -> Result<()>,
) -> Result<Trajectory> {
    let n = u0.len();
    if n < 3 || !(u0.dx > 0.0) {
        return Err(Error::InvalidParameter("grid needs at least 3 points and dx > 0".into()));
    }
    if !(t_end >= u0.t) {
        return Err(Error::InvalidParameter(format!("t_end = {t_end} precedes t0 = {}", u0.t)));
    }
    if u0.u.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverFailure("non-finite initial data".into()));
    }
    let dt_max = opts.dt.unwrap_or_else(|| default_dt(u0.dx));
    if !(dt_max > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt_max} must be positive")));
    }
    let mut targets: Vec<f64> = opts
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t > u0.t + 1e-12 && t < t_end - 1e-12)
        .collect();
    targets.push(t_end);
    targets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    targets.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let dirichlet = matches!(opts.boundary, Boundary::Dirichlet(_));
    let bc_at = |t: f64| -> Option<(f64, f64)> {
        match &opts.boundary {
            Boundary::Neumann => None,
            Boundary::Dirichlet(g) => Some((g(u0.x(0), t), g(u0.x(n - 1), t))),
        }
    };

    let mut u = u0.u.clone();
    if let Some((l, r)) = bc_at(u0.t) {
        u[0] = l;
        u[n - 1] = r;
    }
    let mut snapshots = Vec::with_capacity(targets.len() + 1);
    let first = u0.with_values(u.clone());
    visit(&first)?;
    snapshots.push(first);
    let mut work = Work { base: vec![0.0; n], pred: vec![0.0; n], fu: vec![0.0; n], mf: vec![0.0; n] };
    let mut t = u0.t;
    let mut stepper: Option<Stepper> = None;
    for &target in &targets {
        if target - t <= 1e-14 {
            continue;
        }
        let steps = ((target - t) / dt_max * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = (target - t) / steps as f64;
        let reuse = stepper.as_ref().is_some_and(|s| (s.dt - dt).abs() <= 1e-14 * dt);
        if !reuse {
            stepper = Some(Stepper::new(n, u0.dx, dt, opts.scheme, dirichlet)?);
        }
        let st = stepper.as_ref().unwrap();
        let t_start = t;
        for k in 1..=steps {
            let t_next = if k == steps { target } else { t_start + k as f64 * dt };
            st.step(f, &mut u, bc_at(t_next), &mut work);
            t = t_next;
            check_finite(&u, t)?;
        }
        let snap = GridField { x0: u0.x0, dx: u0.dx, t: target, u: u.clone() };
        visit(&snap)?;
        snapshots.push(snap);
    }
    Trajectory::new(snapshots, f, opts.scheme)
}

fn check_finite(u: &[f64], t: f64) -> Result<()> {
    for &v in u {
        if v.is_nan() {
            return Err(Error::SolverFailure(format!("NaN at t = {t}")));
        }
        if v.abs() > BLOWUP {
            return Err(Error::Instability { t, reason: format!("|u| = {:e} exceeds {BLOWUP}", v.abs()) });
        }
    }
    Ok(())
}

/// Outcome of evolving an ordered pair of initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingReport {
    /// max over time and space of (lower − upper)⁺.
    pub max_violation: f64,
    pub worst_time: f64,
    pub worst_x: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Tolerance for ordering preservation under the discrete scheme.
pub const ORDERING_TOL: f64 = 1e-9;

/// Evolves both fields with the same scheme and reports the worst ordering
/// violation.
pub fn comparison_check(
    lower0: &GridField,
    upper0: &GridField,
    f: &ReactionTerm,
    t_end: f64,
    opts: &EvolveOptions,
) -> Result<OrderingReport> {
    if lower0.len() != upper0.len() || lower0.x0 != upper0.x0 || lower0.dx != upper0.dx {
        return Err(Error::Precondition("lower and upper data live on different grids".into()));
    }
    if let Some(i) = (0..lower0.len()).find(|&i| lower0.u[i] > upper0.u[i]) {
        return Err(Error::Precondition(format!(
            "initial ordering violated at x = {}: {} > {}",
            lower0.x(i),
            lower0.u[i],
            upper0.u[i]
        )));
    }
    let (lo, hi) = rayon::join(|| evolve(lower0, f, t_end, opts), || evolve(upper0, f, t_end, opts));
    let (lo, hi) = (lo?, hi?);
    let mut rep = OrderingReport {
        max_violation: 0.0,
        worst_time: lower0.t,
        worst_x: lower0.x(0),
        tolerance: ORDERING_TOL,
        pass: true,
    };
    for (a, b) in lo.snapshots.iter().zip(&hi.snapshots) {
        for i in 0..a.len() {
            let v = a.u[i] - b.u[i];
            if v > rep.max_violation {
                rep.max_violation = v;
                rep.worst_time = a.t;
                rep.worst_x = a.x(i);
            }
        }
    }
    rep.pass = rep.max_violation <= ORDERING_TOL;
    Ok(rep)
}

/// Measured derivative norms against the interior estimate constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchauderReport {
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub r: f64,
    pub observed_sup_ut: f64,
    pub observed_sup_ux: f64,
    pub observed_sup_uxx: f64,
    pub pass: bool,
}

/// `L₂ = L₀/√π + 2L₁√r/√π`, `L₃ = L₀ + 2L₁L₂√r/√π`, `L₄ = L₃ + L₁`.
pub fn schauder_constants(l0: f64, l1: f64, r: f64) -> (f64, f64, f64) {
    let sp = std::f64::consts::PI.sqrt();
    let l2 = l0 / sp + 2.0 * l1 * r.sqrt() / sp;
    let l3 = l0 + 2.0 * l1 * l2 * r.sqrt() / sp;
    (l2, l3, l3 + l1)
}

/// Sup-norms of ∂ₜu, ∂ₓu, ∂ₓₓu over snapshots with t ≥ t0 + 1, compared with
/// L₂, L₃, L₄ built from the measured L₀ and L₁. Boundary points are excluded.
pub fn derivative_bounds(traj: &Trajectory, f: &ReactionTerm, r: f64) -> Result<SchauderReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("window r = {r} must be positive")));
    }
    let t0 = traj.first().t;
    if traj.last().t < t0 + 1.0 {
        return Err(Error::InsufficientData(format!(
            "trajectory covers [{t0}, {}], needs at least one time unit",
            traj.last().t
        )));
    }
    let l0 = traj.snapshots.iter().map(|s| s.sup_norm()).fold(0.0, f64::max);
    let l1 = f.derivative_bound(l0);
    let (l2, l3, l4) = schauder_constants(l0, l1, r);
    let (mut sut, mut sux, mut suxx) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (k, s) in traj.snapshots.iter().enumerate() {
        if s.t < t0 + 1.0 - 1e-12 {
            continue;
        }
        let n = s.len();
        let h = s.dx;
        for i in 1..n - 1 {
            sux = sux.max(((s.u[i + 1] - s.u[i - 1]) / (2.0 * h)).abs());
            suxx = suxx.max(((s.u[i + 1] - 2.0 * s.u[i] + s.u[i - 1]) / (h * h)).abs());
        }
        let ut = traj.time_derivative(k)?;
        sut = sut.max(ut[1..n - 1].iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let pass = sux <= l2 && suxx <= l3 && sut <= l4;
    Ok(SchauderReport {
        l0,
        l1,
        l2,
        l3,
        l4,
        r,
        observed_sup_ut: sut,
        observed_sup_ux: sux,
        observed_sup_uxx: suxx,
        pass,
    })
}

/// Domain half-width for a front moving at speed `c` for a time `t` with
/// profile tails of width `width`, plus a 20% margin.
pub fn domain_halfwidth(c: f64, t: f64, width: f64) -> f64 {
    1.2 * (c.abs() * t + width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::solve_front_bistable;

    #[test]
    fn equilibria_are_fixed() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        for c in [0.0, 0.3, 1.0] {
            let g = GridField::symmetric(5.0, 0.1, 0.0, |_| c).unwrap();
            let tr = evolve(&g, &f, 2.0, &EvolveOptions::default()).unwrap();
            assert!(tr.last().sup_distance_to(c) < 1e-13, "c = {c}");
        }
    }

    #[test]
    fn translating_front() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let p = solve_front_bistable(&f, 1e-10).unwrap();
        let g = GridField::symmetric(30.0, 0.05, 0.0, |x| p.eval(x)).unwrap();
        let tr = evolve(&g, &f, 5.0, &EvolveOptions::default()).unwrap();
        let last = tr.last();
        let err = (0..last.len())
            .filter(|&i| last.x(i).abs() < 20.0)
            .map(|i| (last.u[i] - p.eval(last.x(i) + 5.0 * p.c())).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "err = {err}");
    }

    #[test]
    fn snapshots_hit_requested_times() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let g = GridField::symmetric(5.0, 0.1, -1.0, |x| 0.5 + 0.1 * x.sin()).unwrap();
        let tr = evolve(&g, &f, 1.0, &EvolveOptions::every(-1.0, 1.0, 0.25)).unwrap();
        assert_eq!(tr.snapshots.len(), 9);
        assert_eq!(tr.last().t, 1.0);
        assert!(tr.index_of(0.0).is_some());
    }

    #[test]
    fn binary_round_trip() {
        let g = GridField::symmetric(2.0, 0.5, 1.25, |x| x * x).unwrap();
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 * (4 + g.len()));
        let h = GridField::read_binary(&buf[..]).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn blowup_detected() {
        // data far outside [0,1]: the explicit reaction step overshoots
        let f = ReactionTerm::cubic(0.3).unwrap();
        let g = GridField::symmetric(2.0, 0.1, 0.0, |_| 50.0).unwrap();
        let err = evolve(&g, &f, 1.0, &EvolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Instability { .. }));
    }

    #[test]
    fn schauder_formula() {
        let (l2, l3, l4) = schauder_constants(1.0, 1.0, 1.0);
        assert!((l2 - 3.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!((l4 - l3 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_boundary_values_enforced() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let g = GridField::symmetric(5.0, 0.1, 0.0, |_| 0.0).unwrap();
        let opts = EvolveOptions::default().with_boundary(Boundary::Dirichlet(Arc::new(|_, t| 0.1 * t)));
        let tr = evolve(&g, &f, 1.0, &opts).unwrap();
        assert!((tr.last().u[0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn ordering_of_identical_data() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let g = GridField::symmetric(5.0, 0.1, 0.0, |x| 0.5 + 0.4 * (-x * x).exp()).unwrap();
        let rep = comparison_check(&g, &g, &f, 1.0, &EvolveOptions::default()).unwrap();
        assert_eq!(rep.max_violation, 0.0);
        let hi = g.with_values(g.u.iter().map(|v| v - 0.1).collect());
        assert!(matches!(
            comparison_check(&g, &hi, &f, 1.0, &EvolveOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn point_evaluation_reproduces_nodes_and_interpolates() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let g = GridField::symmetric(10.0, 0.05, 0.0, |x| 0.5 + 0.3 * (-x * x / 4.0).exp()).unwrap();
        let tr = evolve(&g, &f, 1.0, &EvolveOptions::every(0.0, 1.0, 0.1)).unwrap();
        let s = &tr.snapshots[3];
        for i in [1usize, 100, 200, 399] {
            assert!((tr.eval_point(s.x(i), s.t) - s.u[i]).abs() < 1e-15);
        }
        let fine = evolve(&g, &f, 0.55, &EvolveOptions::default()).unwrap();
        let last = fine.last();
        for i in [150usize, 201, 260] {
            let x = last.x(i) + 0.02;
            let exact = last.u[i] + 0.4 * (last.u[i + 1] - last.u[i]);
            assert!((tr.eval_point(x, 0.55) - exact).abs() < 1e-4);
        }
    }
}
