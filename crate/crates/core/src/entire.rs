//! Entire solutions approximated by backward Cauchy problems started from an
//! envelope at t = −n, with the diagnostics that characterize them.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::{evolve, Boundary, EvolveOptions, GridField, SpatialScheme, Trajectory};
use crate::front::FrontProfile;
use crate::manifest::Manifest;
use crate::numerics::optimize::golden_max;
use crate::reaction::ReactionTerm;
use crate::supersub::{AnnihilatingBand, Envelope, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Dirichlet data from the starting envelope at |x| = halfwidth.
    DirichletEnvelope,
    Neumann,
}

#[derive(Debug, Clone)]
pub struct EntireConfig {
    /// Backward start times n (members start at t = −n).
    pub n_list: Vec<f64>,
    pub halfwidth: f64,
    pub dx: f64,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub snapshot_every: f64,
    pub boundary: BoundaryMode,
    pub scheme: SpatialScheme,
    /// Which envelope supplies the initial and boundary data.
    pub start: Role,
}

impl EntireConfig {
    pub fn new(n_list: &[f64], halfwidth: f64, dx: f64, t_end: f64) -> Self {
        Self {
            n_list: n_list.to_vec(),
            halfwidth,
            dx,
            dt: None,
            t_end,
            snapshot_every: 0.5,
            boundary: BoundaryMode::DirichletEnvelope,
            scheme: SpatialScheme::default(),
            start: Role::Sub,
        }
    }
}

/// Largest excursions outside [sub, super] over members and snapshots with t ≤ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Confinement {
    pub below_sub: f64,
    pub above_super: f64,
    pub worst_n: f64,
    pub worst_t: f64,
    pub worst_x: f64,
}

impl Confinement {
    pub fn max_violation(&self) -> f64 {
        self.below_sub.max(self.above_super)
    }
}

#[derive(Debug, Clone)]
pub struct EntireSolutionApprox {
    pub n_list: Vec<f64>,
    pub members: Vec<Arc<Trajectory>>,
    /// sup |u_{k+1} − u_k| on [−X/2, X/2] × [−n₁, T_end].
    pub cauchy_gaps: Vec<f64>,
    pub confinement: Confinement,
    pub config: EntireConfig,
}

impl EntireSolutionApprox {
    /// The largest-n member, trusted on t ≥ −n₁.
    pub fn deliverable(&self) -> &Arc<Trajectory> {
        self.members.last().expect("at least one member")
    }

    pub fn window_start(&self) -> f64 {
        -self.n_list[0]
    }

    pub fn gaps_decreasing(&self) -> bool {
        self.cauchy_gaps.windows(2).all(|w| w[1] < w[0])
    }

    /// Writes `manifest.txt` plus one directory of binary snapshots per member.
    pub fn save(&self, dir: &Path, extra: &Manifest) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut m = Manifest::new();
        m.set_f64s("n_list", &self.n_list);
        m.set_f64("halfwidth", self.config.halfwidth);
        m.set_f64("dx", self.config.dx);
        m.set_f64("t_end", self.config.t_end);
        m.set_f64("snapshot_every", self.config.snapshot_every);
        m.set_f64s("cauchy_gaps", &self.cauchy_gaps);
        m.set_f64("confinement_below_sub", self.confinement.below_sub);
        m.set_f64("confinement_above_super", self.confinement.above_super);
        for (k, v) in extra.entries() {
            m.set(k, v.clone());
        }
        m.write(&dir.join("manifest.txt"))?;
        for (n, tr) in self.n_list.iter().zip(&self.members) {
            let sub = dir.join(format!("member_n{}", n));
            std::fs::create_dir_all(&sub)?;
            for (k, s) in tr.snapshots.iter().enumerate() {
                let file = std::fs::File::create(sub.join(format!("snap_{k:05}.bin")))?;
                s.write_binary(std::io::BufWriter::new(file))?;
            }
        }
        Ok(())
    }
}

fn lattice_times(n: f64, t_end: f64, every: f64) -> Vec<f64> {
    let k0 = (-n / every).round() as i64;
    let k1 = (t_end / every + 1e-9).floor() as i64;
    (k0 + 1..=k1).map(|k| k as f64 * every).collect()
}

/// Evolves one member per n from the start envelope at t = −n and measures
/// Cauchy gaps and envelope confinement. Fails if a member leaves [sub, super]
/// by more than 10·dx² on t ≤ 0.
pub fn construct_entire(f: &ReactionTerm, sub: &Envelope, sup: &Envelope, cfg: &EntireConfig) -> Result<EntireSolutionApprox> {
    if cfg.n_list.is_empty() || cfg.n_list.iter().any(|&n| !(n > 0.0)) {
        return Err(Error::InvalidParameter("n_list must hold positive start times".into()));
    }
    if cfg.n_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("n_list must be strictly increasing".into()));
    }
    if !(cfg.snapshot_every > 0.0) || !(cfg.t_end >= 0.0) {
        return Err(Error::InvalidParameter("snapshot spacing must be positive and T_end ≥ 0".into()));
    }
    for n in &cfg.n_list {
        let r = n / cfg.snapshot_every;
        if (r - r.round()).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("n = {n} is not a multiple of the snapshot spacing")));
        }
    }
    let n_max = *cfg.n_list.last().unwrap();
    for e in [sub, sup] {
        if !e.is_valid_at(-n_max) {
            return Err(Error::Precondition(format!("envelope not valid at t = {}", -n_max)));
        }
    }
    let probe = GridField::symmetric(cfg.halfwidth, cfg.dx, -n_max, |_| 0.0)?;
    for x in probe.xs() {
        let (lo, hi) = (sub.eval(x, -n_max), sup.eval(x, -n_max));
        if lo > hi + 1e-12 {
            return Err(Error::Precondition(format!("sub exceeds super at x = {x}, t = {}", -n_max)));
        }
    }
    let start = match cfg.start {
        Role::Sub => sub.clone(),
        Role::Super => sup.clone(),
    };
    let members: Vec<Arc<Trajectory>> = cfg
        .n_list
        .par_iter()
        .map(|&n| -> Result<Arc<Trajectory>> {
            let u0 = GridField::symmetric(cfg.halfwidth, cfg.dx, -n, |x| start.eval(x, -n))?;
            let boundary = match cfg.boundary {
                BoundaryMode::DirichletEnvelope => Boundary::Dirichlet(start.as_fn()),
                BoundaryMode::Neumann => Boundary::Neumann,
            };
            let opts = EvolveOptions {
                dt: cfg.dt,
                boundary,
                scheme: cfg.scheme,
                snapshot_times: lattice_times(n, cfg.t_end, cfg.snapshot_every),
            };
            Ok(Arc::new(evolve(&u0, f, cfg.t_end, &opts)?))
        })
        .collect::<Result<_>>()?;

    let n1 = cfg.n_list[0];
    let cauchy_gaps: Vec<f64> = members
        .windows(2)
        .map(|w| {
            let mut gap: f64 = 0.0;
            for s in &w[0].snapshots {
                if s.t < -n1 - 1e-9 {
                    continue;
                }
                let Some(k) = w[1].index_of(s.t) else { continue };
                let o = &w[1].snapshots[k];
                for i in 0..s.len() {
                    if s.x(i).abs() <= 0.5 * cfg.halfwidth {
                        gap = gap.max((s.u[i] - o.u[i]).abs());
                    }
                }
            }
            gap
        })
        .collect();

    let per_member: Vec<Confinement> = cfg
        .n_list
        .par_iter()
        .zip(members.par_iter())
        .map(|(&n, tr)| {
            let mut c = Confinement { below_sub: 0.0, above_super: 0.0, worst_n: n, worst_t: -n, worst_x: 0.0 };
            for s in &tr.snapshots {
                if s.t > 0.0 || !sub.is_valid_at(s.t) || !sup.is_valid_at(s.t) {
                    continue;
                }
                for i in 0..s.len() {
                    let x = s.x(i);
                    let below = sub.eval(x, s.t) - s.u[i];
                    let above = s.u[i] - sup.eval(x, s.t);
                    if below.max(above) > c.max_violation() {
                        c.worst_t = s.t;
                        c.worst_x = x;
                    }
                    c.below_sub = c.below_sub.max(below);
                    c.above_super = c.above_super.max(above);
                }
            }
            c
        })
        .collect();
    let confinement = per_member
        .iter()
        .copied()
        .max_by(|a, b| a.max_violation().partial_cmp(&b.max_violation()).unwrap())
        .unwrap();
    let confinement = Confinement {
        below_sub: per_member.iter().map(|c| c.below_sub).fold(0.0, f64::max),
        above_super: per_member.iter().map(|c| c.above_super).fold(0.0, f64::max),
        ..confinement
    };
    let grid_tol = 10.0 * cfg.dx * cfg.dx;
    if confinement.max_violation() > grid_tol {
        return Err(Error::Construction(format!(
            "member n = {} leaves its envelopes by {:e} at (x, t) = ({}, {})",
            confinement.worst_n,
            confinement.max_violation(),
            confinement.worst_x,
            confinement.worst_t
        )));
    }
    Ok(EntireSolutionApprox { n_list: cfg.n_list.clone(), members, cauchy_gaps, confinement, config: cfg.clone() })
}

/// Interior nodes: the outermost nodes carry boundary data, and the compact
/// operator spreads their closure error over a few neighbors.
fn interior(n: usize) -> std::ops::Range<usize> {
    4..n.saturating_sub(4)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub expected_sign: f64,
    pub min_rate: f64,
    pub max_rate: f64,
    /// min ∂ₜu over {θ ≤ u ≤ 1−θ} on the deliverable member.
    pub b_bar: Option<f64>,
    /// max ∂ₜu over the same set.
    pub b_tilde: Option<f64>,
    pub min_value: f64,
    pub max_value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl MonotonicityReport {
    pub fn require(self) -> Result<Self> {
        if self.pass {
            Ok(self)
        } else {
            Err(Error::Property(format!(
                "∂ₜu has the wrong sign: range [{:e}, {:e}] with expected sign {}",
                self.min_rate, self.max_rate, self.expected_sign
            )))
        }
    }
}

/// Sign of the semi-discrete ∂ₜu at every snapshot after the initial one of
/// every member (interior nodes), and the mid-range bounds b̄, b̃.
pub fn check_time_monotonicity(a: &EntireSolutionApprox, expected_sign: f64, theta: f64) -> Result<MonotonicityReport> {
    if expected_sign.abs() != 1.0 {
        return Err(Error::InvalidParameter("expected sign must be ±1".into()));
    }
    let tol = 1e-6;
    let stats: Vec<(f64, f64, f64, f64)> = a
        .members
        .par_iter()
        .map(|tr| {
            let (mut lo, mut hi, mut vlo, mut vhi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            // the start envelope may have kinks; ∂ₜu exists classically only for t > −n
            for (k, s) in tr.snapshots.iter().enumerate().skip(1) {
                let r = tr.rate(k);
                for i in interior(s.len()) {
                    lo = lo.min(r[i]);
                    hi = hi.max(r[i]);
                    vlo = vlo.min(s.u[i]);
                    vhi = vhi.max(s.u[i]);
                }
            }
            (lo, hi, vlo, vhi)
        })
        .collect();
    let min_rate = stats.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let max_rate = stats.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    if max_rate.abs().max(min_rate.abs()) < 1e-12 {
        return Err(Error::Precondition("stationary field: not an entire-solution family".into()));
    }
    let (mut b_lo, mut b_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let tr = a.deliverable();
    for (k, s) in tr.snapshots.iter().enumerate() {
        let r = tr.rate(k);
        for i in interior(s.len()) {
            if s.u[i] >= theta && s.u[i] <= 1.0 - theta {
                b_lo = b_lo.min(r[i]);
                b_hi = b_hi.max(r[i]);
            }
        }
    }
    let pass = if expected_sign > 0.0 { min_rate > -tol } else { max_rate < tol };
    Ok(MonotonicityReport {
        expected_sign,
        min_rate,
        max_rate,
        b_bar: b_lo.is_finite().then_some(b_lo),
        b_tilde: b_hi.is_finite().then_some(b_hi),
        min_value: stats.iter().map(|s| s.2).fold(f64::INFINITY, f64::min),
        max_value: stats.iter().map(|s| s.3).fold(f64::NEG_INFINITY, f64::max),
        tol,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticForm {
    /// Two fronts invading the middle (limit 1); shifts y₁, y₂ fitted.
    Expanding,
    /// Two fronts retreating toward collision (limit 0); zero shifts.
    Annihilating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub form: AsymptoticForm,
    pub y1: f64,
    pub y2: f64,
    pub fit_time: f64,
    pub times: Vec<f64>,
    /// Sum of the two half-line sup deviations at each time.
    pub deviations: Vec<f64>,
    pub early_time: f64,
    pub late_time: f64,
    pub early_deviation: f64,
    pub late_deviation: f64,
    pub final_time: f64,
    pub final_distance: f64,
    /// For the annihilating form: max of u − min{φ(x+ct), φ(−x+ct)} over all snapshots.
    pub excess_over_fronts: Option<f64>,
    pub decays: bool,
}

impl AsymptoticsReport {
    pub fn require(self) -> Result<Self> {
        if self.decays {
            Ok(self)
        } else {
            Err(Error::Property(format!(
                "deviation at t = {} ({:e}) is not below that at t = {} ({:e})",
                self.early_time, self.early_deviation, self.late_time, self.late_deviation
            )))
        }
    }
}

fn fit_shift(s: &GridField, p: &FrontProfile, sign: f64) -> f64 {
    let c = p.c();
    let cost = |y: f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..s.len() {
            let x = s.x(i);
            if sign * x >= 0.0 {
                let d = s.u[i] - p.eval(sign * x + c * s.t + y);
                acc += d * d;
            }
        }
        acc
    };
    let mut best = (0.0, f64::INFINITY);
    let mut y = -40.0;
    while y <= 40.0 {
        let v = cost(y);
        if v < best.1 {
            best = (y, v);
        }
        y += 0.1;
    }
    golden_max(|y| -cost(y), best.0 - 0.1, best.0 + 0.1, 1e-7).0
}

fn half_line_deviation(s: &GridField, p: &FrontProfile, y1: f64, y2: f64, form: AsymptoticForm) -> f64 {
    let c = p.c();
    let (mut right, mut left): (f64, f64) = (0.0, 0.0);
    for i in 0..s.len() {
        let x = s.x(i);
        let (r, l) = match form {
            AsymptoticForm::Expanding => (p.eval(x + c * s.t + y1), p.eval(-x + c * s.t + y2)),
            AsymptoticForm::Annihilating => (p.eval(-x + c * s.t), p.eval(x + c * s.t)),
        };
        if x >= 0.0 {
            right = right.max((s.u[i] - r).abs());
        }
        if x <= 0.0 {
            left = left.max((s.u[i] - l).abs());
        }
    }
    right + left
}

/// Backward-in-time front asymptotics of the deliverable member and the
/// distance to the forward limit at its final time.
pub fn check_asymptotics(a: &EntireSolutionApprox, p: &FrontProfile, form: AsymptoticForm) -> Result<AsymptoticsReport> {
    let tr = a.deliverable();
    let first = tr.first();
    let (y1, y2) = match form {
        AsymptoticForm::Expanding => (fit_shift(first, p, 1.0), fit_shift(first, p, -1.0)),
        AsymptoticForm::Annihilating => (0.0, 0.0),
    };
    let (times, deviations): (Vec<f64>, Vec<f64>) = tr
        .snapshots
        .iter()
        .filter(|s| s.t <= 0.0)
        .map(|s| (s.t, half_line_deviation(s, p, y1, y2, form)))
        .unzip();
    let n1 = a.n_list[0];
    let n_max = *a.n_list.last().unwrap();
    if n_max <= n1 {
        return Err(Error::InsufficientData("asymptotics need at least two start times".into()));
    }
    let late_time = -n1;
    let early_time = -n1 - 0.75 * (n_max - n1);
    let dev_at = |t: f64| -> f64 {
        let k = times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().partial_cmp(&(b.1 - t).abs()).unwrap())
            .map(|(k, _)| k)
            .unwrap();
        deviations[k]
    };
    let (early_deviation, late_deviation) = (dev_at(early_time), dev_at(late_time));
    let last = tr.last();
    let limit = match form {
        AsymptoticForm::Expanding => 1.0,
        AsymptoticForm::Annihilating => 0.0,
    };
    let final_distance = last.sup_distance_to(limit);
    let excess_over_fronts = match form {
        AsymptoticForm::Expanding => None,
        AsymptoticForm::Annihilating => {
            let c = p.c();
            let mut ex = f64::NEG_INFINITY;
            for m in &a.members {
                for s in &m.snapshots {
                    for i in 0..s.len() {
                        let x = s.x(i);
                        let cap = p.eval(x + c * s.t).min(p.eval(-x + c * s.t));
                        ex = ex.max(s.u[i] - cap);
                    }
                }
            }
            Some(ex)
        }
    };
    Ok(AsymptoticsReport {
        form,
        y1,
        y2,
        fit_time: first.t,
        times,
        deviations,
        early_time,
        late_time,
        early_deviation,
        late_deviation,
        final_time: last.t,
        final_distance,
        excess_over_fronts,
        decays: early_deviation < late_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MCondition {
    MPlus,
    MMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MConditionReport {
    pub condition: MCondition,
    pub alpha1: f64,
    pub alpha2: f64,
    /// x̃ (𝕄⁺) or x̂ (𝕄⁻).
    pub x_offset: f64,
    pub d: f64,
    /// Onset time: the inequalities hold at every sampled t ≤ T.
    pub t_onset: f64,
    /// Sampled (t, l(t), m(t)).
    pub boundaries: Vec<(f64, f64, f64)>,
    pub pass: bool,
}

impl MConditionReport {
    pub fn require(self) -> Result<Self> {
        if self.pass {
            Ok(self)
        } else {
            Err(Error::Property(format!("{:?} condition: no (d, T) with T ≥ window start", self.condition)))
        }
    }
}

/// Searches d on a 0.5 grid and the largest onset T such that the region
/// inequalities of the condition hold at every snapshot t ≤ T of the
/// deliverable member. Passes when T reaches the deliverable window start −n₁.
/// `x6` is the subsolution shift for 𝕄⁺ (ignored for 𝕄⁻).
pub fn check_m_condition(a: &EntireSolutionApprox, f: &ReactionTerm, p: &FrontProfile, x6: f64, which: MCondition) -> Result<MConditionReport> {
    let alpha = f
        .alpha()
        .ok_or_else(|| Error::Precondition("the M conditions apply to bistable terms".into()))?;
    let integral = f.integral();
    match which {
        MCondition::MPlus if !(integral > 0.0) => {
            return Err(Error::Precondition("𝕄⁺ needs ∫f > 0".into()));
        }
        MCondition::MMinus if !(integral < 0.0) => {
            return Err(Error::Precondition("𝕄⁻ needs ∫f < 0".into()));
        }
        _ => {}
    }
    let delta = 0.1 * alpha.min(1.0 - alpha);
    let (alpha1, alpha2) = (alpha - delta, alpha + delta);
    let c = p.c();
    let x_offset = match which {
        MCondition::MPlus => (p.inverse(alpha2)? - x6).max(0.0),
        MCondition::MMinus => (-p.inverse(alpha1)?).max(0.0),
    };
    let lm = |t: f64| -> (f64, f64) {
        match which {
            MCondition::MPlus => (c * t - x_offset, -c * t + x_offset),
            MCondition::MMinus => (-c * t - x_offset, c * t + x_offset),
        }
    };
    let tr = a.deliverable();
    let snaps: Vec<&GridField> = tr.snapshots.iter().filter(|s| s.t <= 0.0).collect();
    let holds = |s: &GridField, d: f64| -> bool {
        let (l, m) = lm(s.t);
        let (a_lo, a_hi) = ((l + d).min(m - d), (l + d).max(m - d));
        (0..s.len()).all(|i| {
            let (x, u) = (s.x(i), s.u[i]);
            let outer = x <= l || x >= m;
            let inner = x >= a_lo && x <= a_hi;
            match which {
                MCondition::MPlus => (!outer || u >= alpha2) && (!inner || u <= alpha1),
                MCondition::MMinus => (!outer || u <= alpha1) && (!inner || u >= alpha2),
            }
        })
    };
    let mut best: Option<(f64, f64)> = None;
    let mut d = 0.0;
    while d <= a.config.halfwidth {
        let mut onset = None;
        for s in &snaps {
            if holds(s, d) {
                onset = Some(s.t);
            } else {
                break;
            }
        }
        if let Some(t) = onset {
            if best.is_none_or(|(_, bt)| t > bt) {
                best = Some((d, t));
            }
        }
        d += 0.5;
    }
    let boundaries = snaps
        .iter()
        .map(|s| {
            let (l, m) = lm(s.t);
            (s.t, l, m)
        })
        .collect();
    let (d, t_onset) = best.unwrap_or((f64::NAN, f64::NEG_INFINITY));
    Ok(MConditionReport {
        condition: which,
        alpha1,
        alpha2,
        x_offset,
        d,
        t_onset,
        boundaries,
        pass: t_onset >= a.window_start() - 1e-9,
    })
}

/// max over members and snapshots of |u(x) − u(−x)|.
pub fn check_symmetry(a: &EntireSolutionApprox) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for tr in &a.members {
        for s in &tr.snapshots {
            if !s.is_symmetric_grid() {
                return Err(Error::Precondition("grid is not symmetric about x = 0".into()));
            }
            let n = s.len();
            for i in 0..n / 2 {
                worst = worst.max((s.u[i] - s.u[n - 1 - i]).abs());
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandReport {
    pub b: f64,
    /// Largest of u₂(x,t+h₁) − Φ and Φ − u₂(x,t−h₁) over the samples.
    pub max_violation: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Checks u₂(x, t+h₁(t)) ≤ Φ(x,t) + tol and Φ(x,t) ≤ u₂(x, t−h₁(t)) + tol on
/// every node with |x| ≤ X/2 at times spaced 0.5 in
/// [−n_max + h₁ + 0.5, −4Bφ(0)].
pub fn check_band(a: &EntireSolutionApprox, band: &AnnihilatingBand, tol: f64) -> Result<BandReport> {
    let tr = a.deliverable();
    let t_first = tr.first().t;
    let t_max = band.validity_end();
    let t_min = t_first + 4.0 * band.b + 0.5;
    if t_min > t_max {
        return Ok(BandReport { b: band.b, max_violation: f64::INFINITY, t_min, t_max, samples: 0, tol, pass: false });
    }
    let nt = ((t_max - t_min) / 0.5).floor() as usize + 1;
    let ts: Vec<f64> = (0..nt).map(|k| t_max - k as f64 * 0.5).collect();
    let g = tr.first();
    let xs: Vec<f64> = g.xs().filter(|x| x.abs() <= 0.5 * a.config.halfwidth).step_by(2).collect();
    let worst = ts
        .par_iter()
        .map(|&t| {
            let h = band.h1(t);
            xs.iter()
                .map(|&x| {
                    let phi = band.phi_product(x, t);
                    let upper = tr.eval_point(x, t + h) - phi;
                    let lower = phi - tr.eval_point(x, t - h);
                    upper.max(lower)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(BandReport { b: band.b, max_violation: worst, t_min, t_max, samples: ts.len() * xs.len(), tol, pass: worst <= tol })
}
