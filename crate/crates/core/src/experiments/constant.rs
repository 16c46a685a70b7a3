//! Convergence of bistable solutions to the constant states 0 and 1.

use super::rate::{above_floor, rate_fit, FitWindow};
use super::{Check, Experiment, RunGrid, StabilityReport};
use crate::error::{Error, Result};
use crate::evolve::{evolve, GridField};
use crate::reaction::ReactionTerm;

/// Hypotheses on the initial data that force convergence to a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergencePattern {
    /// ∫f ≥ 0 and liminf at ±∞ above α; limit 1.
    FarAbove,
    /// inf u₀ > α; limit 1.
    AllAbove,
    /// ∫f ≤ 0 and limsup at ±∞ below α; limit 0.
    FarBelow,
    /// sup u₀ < α; limit 0.
    AllBelow,
}

impl ConvergencePattern {
    pub const ALL: [ConvergencePattern; 4] =
        [ConvergencePattern::FarAbove, ConvergencePattern::AllAbove, ConvergencePattern::FarBelow, ConvergencePattern::AllBelow];

    pub fn limit(self) -> f64 {
        match self {
            ConvergencePattern::FarAbove | ConvergencePattern::AllAbove => 1.0,
            ConvergencePattern::FarBelow | ConvergencePattern::AllBelow => 0.0,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            ConvergencePattern::FarAbove => "far-above",
            ConvergencePattern::AllAbove => "all-above",
            ConvergencePattern::FarBelow => "far-below",
            ConvergencePattern::AllBelow => "all-below",
        }
    }
}

/// Fraction of nodes at each end standing in for the limits x → ±∞.
const FAR_FRACTION: f64 = 0.05;

/// Checks the hypotheses of `which` on the sampled data.
pub fn check_pattern(f: &ReactionTerm, u0: &GridField, which: ConvergencePattern) -> Result<()> {
    let alpha = f
        .alpha()
        .ok_or_else(|| Error::Precondition("convergence patterns need a bistable term".into()))?;
    if u0.u.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::Precondition("initial data must lie in [0, 1]".into()));
    }
    let n = u0.len();
    let k = ((n as f64 * FAR_FRACTION).ceil() as usize).max(1);
    let ends = u0.u[..k].iter().chain(&u0.u[n - k..]);
    let (far_min, far_max) = ends.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (inf, sup) = u0.u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let integral = f.integral();
    let ok = match which {
        ConvergencePattern::FarAbove => integral >= 0.0 && far_min > alpha,
        ConvergencePattern::AllAbove => inf > alpha,
        ConvergencePattern::FarBelow => integral <= 0.0 && far_max < alpha,
        ConvergencePattern::AllBelow => sup < alpha,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{} hypotheses fail: ∫f = {integral:e}, α = {alpha}, inf = {inf}, sup = {sup}, far range [{far_min}, {far_max}]",
            which.id()
        )))
    }
}

/// Representative data for each pattern: constants α ± 0.05 for the global
/// patterns, a central dip to 0 (far value α + 0.2) or a central bump to 1
/// (far value α − 0.2) of half-width 5 for the far-field patterns.
pub fn pattern_data(f: &ReactionTerm, which: ConvergencePattern, grid: &RunGrid) -> Result<GridField> {
    let alpha = f
        .alpha()
        .ok_or_else(|| Error::Precondition("convergence patterns need a bistable term".into()))?;
    match which {
        ConvergencePattern::AllAbove => grid.field(0.0, |_| alpha + 0.05),
        ConvergencePattern::AllBelow => grid.field(0.0, |_| alpha - 0.05),
        ConvergencePattern::FarAbove => {
            let far = (alpha + 0.2).min(1.0);
            grid.field(0.0, |x| far * (1.0 - (-x * x / 25.0).exp()))
        }
        ConvergencePattern::FarBelow => {
            let far = (alpha - 0.2).max(0.0);
            grid.field(0.0, |x| far + (1.0 - far) * (-x * x / 25.0).exp())
        }
    }
}

/// Evolves `u0`, records ‖u − limit‖ and fits its decay rate against |f'(limit)|.
/// Passes when the distance drops below 1e-3 within the horizon and the fitted
/// rate is within 30% of the prediction.
pub fn constant_convergence(f: &ReactionTerm, u0: &GridField, which: ConvergencePattern, grid: &RunGrid) -> Result<StabilityReport> {
    grid.validate()?;
    check_pattern(f, u0, which)?;
    let limit = which.limit();
    let tr = evolve(u0, f, u0.t + grid.t_end, &grid.options(u0.t))?;
    let series: Vec<(f64, f64)> = tr.snapshots.iter().map(|s| (s.t, s.sup_distance_to(limit))).collect();
    let mut rep = StabilityReport::new(Experiment::ConstantConvergence, which.id(), 0.0);
    rep.predicted_rate = f.f_prime(limit).abs();
    rep.final_time = tr.last().t;
    rep.final_deviation = series.last().map(|p| p.1).unwrap_or(f64::NAN);
    let hit = series.iter().find(|(_, v)| *v < 1e-3).map(|p| p.0).unwrap_or(f64::INFINITY);
    rep.checks.push(Check::at_most("time_to_1e-3", hit, u0.t + grid.t_end));
    match rate_fit(above_floor(&series), FitWindow::Tail) {
        Ok(fit) => {
            rep.set_fit(&fit);
            let rel = (fit.decay_rate() - rep.predicted_rate).abs() / rep.predicted_rate;
            rep.checks.push(Check::at_most("rate_relative_error", rel, 0.3));
        }
        Err(e) => {
            rep.checks.push(Check::at_most("rate_relative_error", f64::INFINITY, 0.3));
            rep.label = format!("{} ({e})", which.id());
        }
    }
    rep.series = series;
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_validation() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let grid = RunGrid::new(20.0, 0.1, 1.0);
        let g = pattern_data(&f, ConvergencePattern::FarAbove, &grid).unwrap();
        assert!(check_pattern(&f, &g, ConvergencePattern::FarAbove).is_ok());
        assert!(check_pattern(&f, &g, ConvergencePattern::AllAbove).is_err());
        // far-below needs ∫f ≤ 0
        assert!(check_pattern(&f, &g, ConvergencePattern::FarBelow).is_err());
        let low = pattern_data(&f, ConvergencePattern::AllBelow, &grid).unwrap();
        assert!(matches!(
            constant_convergence(&f, &low, ConvergencePattern::AllAbove, &grid),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn uniform_data_above_alpha_goes_to_one() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let grid = RunGrid::new(5.0, 0.25, 60.0);
        let g = pattern_data(&f, ConvergencePattern::AllAbove, &grid).unwrap();
        let rep = constant_convergence(&f, &g, ConvergencePattern::AllAbove, &grid).unwrap();
        assert!(rep.pass, "{:?}", rep.checks);
        assert!((rep.fitted_rate - 0.7).abs() < 0.05);
    }
}
