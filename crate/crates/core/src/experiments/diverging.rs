//! A wide bump (or dip) splitting into two fronts that travel apart.

use super::rate::{above_floor, rate_fit, FitWindow};
use super::{best_shift, level_crossings, linear_slope, Check, Experiment, RunGrid, StabilityReport};
use crate::error::{Error, Result};
use crate::evolve::{evolve, GridField};
use crate::front::FrontProfile;
use crate::reaction::ReactionTerm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// ∫f > 0: u₀ > α + β on |x| < L̄, below α far out; the state 1 spreads.
    Bump,
    /// ∫f < 0: u₀ < α − β on |x| < L̄, above α far out; the state 0 spreads.
    Dip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergingPairSpec {
    pub kind: PairKind,
    /// β₁ (bump) or β₂ (dip).
    pub margin: f64,
    /// L̄: half-width of the plateau.
    pub half_width: f64,
}

impl DivergingPairSpec {
    /// Plateau (1 + α + β)/2 for a bump, (α − β)/2 for a dip, joined to the
    /// far state (0 resp. 1) by tanh edges of width 0.25.
    pub fn initial(&self, f: &ReactionTerm, grid: &RunGrid) -> Result<GridField> {
        let alpha = f
            .alpha()
            .ok_or_else(|| Error::Precondition("diverging pairs need a bistable term".into()))?;
        let (l, b) = (self.half_width, self.margin);
        if !(l > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter("half-width and margin must be positive".into()));
        }
        let window = move |x: f64| 0.5 * (((l - x.abs()) / 0.25).tanh() + 1.0);
        match self.kind {
            PairKind::Bump => {
                if !(alpha + b < 1.0) {
                    return Err(Error::InvalidParameter(format!("α + β₁ = {} must stay below 1", alpha + b)));
                }
                let h = 0.5 * (1.0 + alpha + b);
                grid.field(0.0, |x| h * window(x))
            }
            PairKind::Dip => {
                if !(b < alpha) {
                    return Err(Error::InvalidParameter(format!("β₂ = {b} must be below α = {alpha}")));
                }
                let h = 0.5 * (alpha - b);
                grid.field(0.0, |x| 1.0 - (1.0 - h) * window(x))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOutcome {
    /// Two level crossings moving apart.
    Diverged,
    /// The plateau state disappeared: u → 0 (bump) or u → 1 (dip).
    Collapsed,
    /// Neither within the horizon.
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergingPairReport {
    pub spec: DivergingPairSpec,
    pub outcome: PairOutcome,
    /// (t, left crossing, right crossing) of the level 1/2.
    pub level_track: Vec<(f64, Option<f64>, Option<f64>)>,
    pub left_speed: f64,
    pub right_speed: f64,
    /// |measured − expected| / |c| for the two crossings.
    pub speed_errors: (f64, f64),
    /// Half-line deviations against fitted front translates (evaluated on |x| ≥ 2).
    pub stability: StabilityReport,
    pub pass: bool,
}

/// Evolves the spec's data and tracks the two u = 1/2 crossings. Speeds are
/// fitted over the last third of the run and compared with ∓|c|; the
/// half-line deviations from φ(x+ct−x₂), φ(−x+ct−x₃) (bump) or
/// φ(−x+ct−x₅), φ(x+ct−x₄) (dip) are fitted for a decay rate.
/// `expect_divergence = false` is the negative control: it passes when the
/// data collapse.
pub fn diverging_pair(
    f: &ReactionTerm,
    p: &FrontProfile,
    spec: &DivergingPairSpec,
    grid: &RunGrid,
    expect_divergence: bool,
) -> Result<DivergingPairReport> {
    grid.validate()?;
    let c = p.c();
    let needed = match spec.kind {
        PairKind::Bump => c > 0.0,
        PairKind::Dip => c < 0.0,
    };
    if !needed {
        return Err(Error::Precondition(format!("{:?} needs the matching sign of ∫f (front speed {c})", spec.kind)));
    }
    let u0 = spec.initial(f, grid)?;
    let tr = evolve(&u0, f, grid.t_end, &grid.options(0.0))?;
    let level_track: Vec<_> = tr
        .snapshots
        .iter()
        .map(|s| {
            let (l, r) = level_crossings(s, 0.5);
            (s.t, l, r)
        })
        .collect();
    let last = tr.last();
    let collapsed_to = match spec.kind {
        PairKind::Bump => 0.0,
        PairKind::Dip => 1.0,
    };
    let t_end = last.t;
    let tail: Vec<_> = level_track.iter().filter(|(t, _, _)| *t >= t_end - grid.t_end / 3.0).collect();
    let diverged = tail.iter().all(|(_, l, r)| matches!((l, r), (Some(a), Some(b)) if b - a > 1.0));
    let outcome = if last.sup_distance_to(collapsed_to) < 1e-3 {
        PairOutcome::Collapsed
    } else if diverged {
        PairOutcome::Diverged
    } else {
        PairOutcome::Undecided
    };
    let mut stability = StabilityReport::new(Experiment::DivergingPair, format!("{:?}", spec.kind), spec.margin);
    stability.predicted_rate = f.f_prime(0.0).abs().min(f.f_prime(1.0).abs());
    stability.final_time = t_end;
    let (mut left_speed, mut right_speed, mut errs) = (f64::NAN, f64::NAN, (f64::INFINITY, f64::INFINITY));
    if outcome == PairOutcome::Diverged {
        let lpts: Vec<_> = tail.iter().map(|(t, l, _)| (*t, l.unwrap())).collect();
        let rpts: Vec<_> = tail.iter().map(|(t, _, r)| (*t, r.unwrap())).collect();
        left_speed = linear_slope(&lpts);
        right_speed = linear_slope(&rpts);
        let a = c.abs();
        errs = ((left_speed + a).abs() / a, (right_speed - a).abs() / a);
        let (mut y_left, mut y_right) = (0.0, 0.0);
        let mut series = Vec::new();
        for s in &tr.snapshots {
            let t = s.t;
            // (sign of x inside φ on the left half-line, same on the right)
            let (sl, sr) = match spec.kind {
                PairKind::Bump => (1.0, -1.0),
                PairKind::Dip => (-1.0, 1.0),
            };
            let ml = |x: f64, y: f64| p.eval(sl * x + c * t - y);
            let mr = |x: f64, y: f64| p.eval(sr * x + c * t - y);
            // φ(s·x + ct − y) = 1/2 at the crossing
            let guess_l = sl * level_track_pos(s, true) + c * t;
            let guess_r = sr * level_track_pos(s, false) + c * t;
            y_left = best_shift(s, |x| x <= -2.0, ml, guess_l - 5.0, guess_l + 5.0);
            y_right = best_shift(s, |x| x >= 2.0, mr, guess_r - 5.0, guess_r + 5.0);
            let mut dev: f64 = 0.0;
            for i in 0..s.len() {
                let x = s.x(i);
                if x <= -2.0 {
                    dev = dev.max((s.u[i] - ml(x, y_left)).abs());
                } else if x >= 2.0 {
                    dev = dev.max((s.u[i] - mr(x, y_right)).abs());
                }
            }
            series.push((t, dev));
        }
        stability.shift_estimates = vec![y_left, y_right];
        stability.final_deviation = series.last().unwrap().1;
        if let Ok(fit) = rate_fit(above_floor(&series), FitWindow::Tail) {
            stability.set_fit(&fit);
        }
        stability.series = series;
        stability.checks.push(Check::at_most("left_speed_error", errs.0, 0.02));
        stability.checks.push(Check::at_most("right_speed_error", errs.1, 0.02));
        stability.checks.push(Check::at_most("final_deviation", stability.final_deviation, 1e-3));
    } else {
        stability.final_deviation = last.sup_distance_to(collapsed_to);
        stability.checks.push(Check::at_most("collapse_distance", stability.final_deviation, 1e-3));
    }
    let stability = stability.finish();
    let pass = if expect_divergence {
        outcome == PairOutcome::Diverged && stability.pass
    } else {
        outcome == PairOutcome::Collapsed
    };
    Ok(DivergingPairReport { spec: *spec, outcome, level_track, left_speed, right_speed, speed_errors: errs, stability, pass })
}

/// Position of the level-1/2 crossing on the requested side of the origin.
fn level_track_pos(s: &GridField, left: bool) -> f64 {
    let (l, r) = level_crossings(s, 0.5);
    if left {
        l.unwrap_or(0.0)
    } else {
        r.unwrap_or(0.0)
    }
}
