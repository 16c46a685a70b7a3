//! Stability experiments: convergence to the constant states, stability of a
//! single front, diverging front pairs, the bump-width lower bounds, and the
//! time-shift sandwich around an entire solution.

pub mod constant;
pub mod diverging;
pub mod front_stability;
pub mod lower_bound;
pub mod rate;
pub mod sandwich;

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::{EvolveOptions, GridField, SpatialScheme};
use crate::manifest::fmt_f64;
use crate::numerics::optimize::golden_max;

pub use constant::{constant_convergence, pattern_data, ConvergencePattern};
pub use diverging::{diverging_pair, DivergingPairReport, DivergingPairSpec, PairKind, PairOutcome};
pub use front_stability::{front_stability, FrontOrientation, Perturbation};
pub use lower_bound::{lower_bound_l1, lower_bound_l2, LowerBound, LowerBoundInputs, LowerBoundInputs2};
pub use rate::{rate_fit, FitWindow, RateFit};
pub use sandwich::{onset_above, sandwich_envelopes, sandwich_stability, DecayBound, SandwichReport, SandwichSetup, SANDWICH_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    ConstantConvergence,
    FrontStability,
    DivergingPair,
    SandwichStability,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::ConstantConvergence => "constant",
            Experiment::FrontStability => "front",
            Experiment::DivergingPair => "diverging",
            Experiment::SandwichStability => "sandwich",
        }
    }
}

/// A named scalar compared against a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value <= threshold }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value >= threshold }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub experiment: Experiment,
    pub label: String,
    pub perturbation_size: f64,
    /// Positive decay rate ω of the fitted deviation (NaN when not fitted).
    pub fitted_rate: f64,
    pub fitted_prefactor: f64,
    pub fit_residual: f64,
    /// Rate suggested by the linearization or the stability bound.
    pub predicted_rate: f64,
    pub shift_estimates: Vec<f64>,
    pub final_time: f64,
    pub final_deviation: f64,
    /// (t, deviation) at every snapshot.
    pub series: Vec<(f64, f64)>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl StabilityReport {
    pub(crate) fn new(experiment: Experiment, label: impl Into<String>, delta: f64) -> Self {
        Self {
            experiment,
            label: label.into(),
            perturbation_size: delta,
            fitted_rate: f64::NAN,
            fitted_prefactor: f64::NAN,
            fit_residual: f64::NAN,
            predicted_rate: f64::NAN,
            shift_estimates: Vec::new(),
            final_time: f64::NAN,
            final_deviation: f64::NAN,
            series: Vec::new(),
            checks: Vec::new(),
            pass: false,
        }
    }

    pub(crate) fn set_fit(&mut self, fit: &RateFit) {
        self.fitted_rate = fit.decay_rate();
        self.fitted_prefactor = fit.prefactor;
        self.fit_residual = fit.residual;
    }

    pub(crate) fn finish(mut self) -> Self {
        self.pass = !self.checks.is_empty() && self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub const CSV_HEADER: &'static str =
        "experiment,label,delta,fitted_rate,fitted_prefactor,fit_residual,predicted_rate,final_time,final_deviation,shifts,pass";

    pub fn csv_row(&self) -> String {
        let shifts = self.shift_estimates.iter().map(|&s| fmt_f64(s)).collect::<Vec<_>>().join(";");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment.id(),
            self.label,
            fmt_f64(self.perturbation_size),
            fmt_f64(self.fitted_rate),
            fmt_f64(self.fitted_prefactor),
            fmt_f64(self.fit_residual),
            fmt_f64(self.predicted_rate),
            fmt_f64(self.final_time),
            fmt_f64(self.final_deviation),
            shifts,
            self.pass
        )
    }

    pub fn write_series_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,deviation")?;
        for (t, v) in &self.series {
            writeln!(w, "{},{}", fmt_f64(*t), fmt_f64(*v))?;
        }
        Ok(())
    }
}

/// Grid and horizon of a single experiment run (Neumann closure).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunGrid {
    pub halfwidth: f64,
    pub dx: f64,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub every: f64,
    pub scheme: SpatialScheme,
}

impl RunGrid {
    pub fn new(halfwidth: f64, dx: f64, t_end: f64) -> Self {
        Self { halfwidth, dx, dt: None, t_end, every: 0.5, scheme: SpatialScheme::default() }
    }

    pub(crate) fn field(&self, t: f64, init: impl Fn(f64) -> f64) -> Result<GridField> {
        GridField::symmetric(self.halfwidth, self.dx, t, init)
    }

    pub(crate) fn options(&self, t0: f64) -> EvolveOptions {
        let mut o = EvolveOptions::every(t0, t0 + self.t_end, self.every).with_scheme(self.scheme);
        o.dt = self.dt;
        o
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.every > 0.0 && self.every <= self.t_end) {
            return Err(Error::InvalidParameter(format!(
                "horizon {} and snapshot spacing {} must satisfy 0 < every ≤ horizon",
                self.t_end, self.every
            )));
        }
        Ok(())
    }
}

/// Least-squares translation y of `model(x, y)` against the nodes selected
/// by `keep`: scan of [lo, hi] in steps of 0.1, then golden refinement.
pub(crate) fn best_shift(
    s: &GridField,
    keep: impl Fn(f64) -> bool,
    model: impl Fn(f64, f64) -> f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let nodes: Vec<(f64, f64)> = (0..s.len()).map(|i| (s.x(i), s.u[i])).filter(|(x, _)| keep(*x)).collect();
    let cost = |y: f64| nodes.iter().map(|(x, u)| (u - model(*x, y)).powi(2)).sum::<f64>();
    let steps = ((hi - lo) / 0.1).ceil() as usize;
    let best = (0..=steps)
        .map(|k| lo + k as f64 * 0.1)
        .map(|y| (y, cost(y)))
        .fold((lo, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    golden_max(|y| -cost(y), best.0 - 0.1, best.0 + 0.1, 1e-9).0
}

/// u = 1/2 crossings by linear interpolation between adjacent nodes:
/// (first crossing from the left, last crossing from the right).
pub fn level_crossings(s: &GridField, level: f64) -> (Option<f64>, Option<f64>) {
    let cross = |i: usize| -> Option<f64> {
        let (a, b) = (s.u[i] - level, s.u[i + 1] - level);
        if a == 0.0 {
            Some(s.x(i))
        } else if a * b < 0.0 {
            Some(s.x(i) + a / (a - b) * s.dx)
        } else {
            None
        }
    };
    let n = s.len();
    let left = (0..n - 1).find_map(cross);
    let right = (0..n - 1).rev().find_map(cross);
    (left, right)
}

/// Runs independent jobs on the rayon pool and returns results in order.
pub fn run_jobs<T: Send>(jobs: Vec<Box<dyn FnOnce() -> T + Send>>) -> Vec<T> {
    jobs.into_par_iter().map(|j| j()).collect()
}

/// Least-squares slope of (t, y).
pub(crate) fn linear_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty) = (0.0, 0.0);
    for (t, y) in pts {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
    }
    sty / stt
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossings_of_a_bump() {
        let g = GridField::symmetric(10.0, 0.1, 0.0, |x| (-x * x / 4.0).exp()).unwrap();
        let (l, r) = level_crossings(&g, 0.5);
        let x = 2.0 * (2.0f64.ln()).sqrt();
        assert!((l.unwrap() + x).abs() < 2e-3 && (r.unwrap() - x).abs() < 2e-3);
        let flat = GridField::symmetric(10.0, 0.1, 0.0, |_| 0.1).unwrap();
        assert_eq!(level_crossings(&flat, 0.5), (None, None));
    }

    #[test]
    fn shift_recovered() {
        let g = GridField::symmetric(10.0, 0.05, 0.0, |x| 1.0 / (1.0 + (-(x - 1.3)).exp())).unwrap();
        let y = best_shift(&g, |_| true, |x, y| 1.0 / (1.0 + (-(x - y)).exp()), -5.0, 5.0);
        assert!((y - 1.3).abs() < 1e-6);
    }

    #[test]
    fn jobs_keep_order() {
        let jobs: Vec<Box<dyn FnOnce() -> usize + Send>> = (0..8usize).map(|k| Box::new(move || k * k) as _).collect();
        assert_eq!(run_jobs(jobs), vec![0, 1, 4, 9, 16, 25, 36, 49]);
    }
}
