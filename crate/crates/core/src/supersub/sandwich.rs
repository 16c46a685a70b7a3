//! Time-shifted sandwich around an entire solution, valid for t ≥ 0.

use std::sync::Arc;

use super::envelope::{Branch, BranchFn, BranchKind, Combine, Envelope, EnvelopeCase, Role};
use crate::error::{Error, Result};
use crate::reaction::StabilityConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SandwichDirection {
    /// The entire solution increases in time (uses b̄ > 0).
    Increasing,
    /// The entire solution decreases in time (uses b̃ < 0).
    Decreasing,
}

/// q(t) = q̄₀e^{vt}, γ(t) = q̄₀(1 + γ₀ − γ₀e^{vt}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichParams {
    pub q0_bar: f64,
    pub v: f64,
    pub w: f64,
    /// b̄ (increasing) or b̃ (decreasing).
    pub b_rate: f64,
    pub gamma0: f64,
    pub direction: SandwichDirection,
}

impl SandwichParams {
    pub fn new(sc: &StabilityConstants, q0_bar: f64, direction: SandwichDirection) -> Result<Self> {
        let b_rate = match direction {
            SandwichDirection::Increasing => sc.b_bar,
            SandwichDirection::Decreasing => sc.b_tilde,
        }
        .ok_or_else(|| Error::Precondition("time-derivative bound of the entire solution not measured".into()))?;
        Self::with_rate(sc, q0_bar, direction, b_rate)
    }

    pub fn with_rate(sc: &StabilityConstants, q0_bar: f64, direction: SandwichDirection, b_rate: f64) -> Result<Self> {
        if !(q0_bar >= 0.0 && q0_bar <= sc.theta) {
            return Err(Error::InvalidParameter(format!("q̄₀ = {q0_bar} must lie in [0, θ = {}]", sc.theta)));
        }
        if !(sc.v < 0.0 && sc.w > 0.0) {
            return Err(Error::Precondition(format!("need v < 0 < w, got v = {}, w = {}", sc.v, sc.w)));
        }
        let gamma0 = match direction {
            SandwichDirection::Increasing => {
                if !(b_rate > 0.0) {
                    return Err(Error::Precondition(format!("b̄ = {b_rate} must be positive")));
                }
                (sc.v - sc.w) / (b_rate * sc.v)
            }
            SandwichDirection::Decreasing => {
                if !(b_rate < 0.0) {
                    return Err(Error::Precondition(format!("b̃ = {b_rate} must be negative")));
                }
                (sc.w - sc.v) / (b_rate * sc.v)
            }
        };
        Ok(Self { q0_bar, v: sc.v, w: sc.w, b_rate, gamma0, direction })
    }

    pub fn q(&self, t: f64) -> f64 {
        self.q0_bar * (self.v * t).exp()
    }

    pub fn gamma(&self, t: f64) -> f64 {
        self.q0_bar * (1.0 + self.gamma0 - self.gamma0 * (self.v * t).exp())
    }

    /// sup_{t ≥ 0} γ(t).
    pub fn gamma_max(&self) -> f64 {
        self.q0_bar * (1.0 + self.gamma0)
    }
}

/// Super/sub pair around the entire solution `u(x,t)` on [0, t_max]:
/// increasing: min{1, u(x,t+γ)+q} and max{0, u(x,t−γ)−q};
/// decreasing: min{1, u(x,t−γ)+q} and max{0, u(x,t+γ)−q}.
pub fn build_sandwich(u: BranchFn, prm: &SandwichParams, t_max: f64) -> Result<(Envelope, Envelope)> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidParameter("sandwich horizon must be positive".into()));
    }
    let sign = match prm.direction {
        SandwichDirection::Increasing => 1.0,
        SandwichDirection::Decreasing => -1.0,
    };
    let p = *prm;
    let up = {
        let u = Arc::clone(&u);
        Branch::new("u(t±γ)+q", BranchKind::Constructed, Arc::new(move |x, t| u(x, t + sign * p.gamma(t)) + p.q(t)))
    };
    let down = {
        let u = Arc::clone(&u);
        Branch::new("u(t∓γ)−q", BranchKind::Constructed, Arc::new(move |x, t| u(x, t - sign * p.gamma(t)) - p.q(t)))
    };
    let sup = Envelope::new(
        Role::Super,
        EnvelopeCase::Sandwich,
        Combine::Min,
        vec![up, Branch::constant("one", 1.0)],
        (0.0, t_max),
        "shifted solution + q = 1",
    )?;
    let sub = Envelope::new(
        Role::Sub,
        EnvelopeCase::Sandwich,
        Combine::Max,
        vec![down, Branch::constant("zero", 0.0)],
        (0.0, t_max),
        "shifted solution − q = 0",
    )?;
    Ok((sup, sub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reaction::{compute_constants, ReactionTerm};

    #[test]
    fn gamma_formulas() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let sc = compute_constants(&f).unwrap();
        let p = SandwichParams::with_rate(&sc, 0.01, SandwichDirection::Increasing, 0.05).unwrap();
        assert!((p.gamma0 - (sc.v - sc.w) / (0.05 * sc.v)).abs() < 1e-15);
        assert!((p.gamma(0.0) - 0.01).abs() < 1e-15);
        assert!(p.gamma(1e3) <= p.gamma_max() && p.gamma(1e3) > 0.99 * p.gamma_max());
        let d = SandwichParams::with_rate(&sc, 0.01, SandwichDirection::Decreasing, -0.05).unwrap();
        assert!(d.gamma0 > 0.0);
        assert!(SandwichParams::with_rate(&sc, 0.5, SandwichDirection::Increasing, 0.05).is_err());
        assert!(SandwichParams::new(&sc, 0.01, SandwichDirection::Increasing).is_err());
    }

    #[test]
    fn zero_amplitude_collapses_onto_the_solution() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let sc = compute_constants(&f).unwrap();
        let p = SandwichParams::with_rate(&sc, 0.0, SandwichDirection::Increasing, 0.05).unwrap();
        let u: BranchFn = Arc::new(|x: f64, t: f64| 0.5 + 0.1 * (x + t).tanh());
        let (sup, sub) = build_sandwich(Arc::clone(&u), &p, 10.0).unwrap();
        for (x, t) in [(0.0, 0.0), (1.5, 2.0), (-3.0, 7.5)] {
            assert_eq!(sup.eval(x, t), u(x, t));
            assert_eq!(sub.eval(x, t), u(x, t));
        }
    }
}
