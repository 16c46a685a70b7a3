//! Lower bounds for the plateau half-width that makes a bump (or dip) split
//! into a diverging front pair.

use crate::error::{Error, Result};
use crate::front::{EdgeEigenvalues, TailBounds};
use crate::reaction::{ReactionTerm, StabilityConstants};

/// Inputs of the bound for a bump (∫f > 0, c > 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundInputs {
    pub beta1: f64,
    pub q0: f64,
    pub q1: f64,
    pub mu_tilde_1: f64,
    pub beta: f64,
    pub m3: f64,
    pub m4: f64,
    pub b: f64,
    pub w: f64,
    pub c: f64,
    pub mu2: f64,
    pub lambda1: f64,
    pub alpha: f64,
}

impl LowerBoundInputs {
    /// μ̃₁ = |μ₂|/2, β = 1/2, and 1 − q₀, 1 − q₁ at 2/3 and 1/3 of α + β₁.
    pub fn with_defaults(f: &ReactionTerm, sc: &StabilityConstants, c: f64, e: &EdgeEigenvalues, tails: &TailBounds, beta1: f64) -> Result<Self> {
        let alpha = f.alpha().ok_or_else(|| Error::Precondition("bounds need a bistable term".into()))?;
        let s = alpha + beta1;
        Ok(Self {
            beta1,
            q0: 1.0 - 2.0 * s / 3.0,
            q1: 1.0 - s / 3.0,
            mu_tilde_1: 0.5 * e.mu2.abs(),
            beta: 0.5,
            m3: tails.m3,
            m4: tails.m4,
            b: sc.b,
            w: sc.w,
            c,
            mu2: e.mu2,
            lambda1: e.lambda1,
            alpha,
        })
    }
}

/// Inputs of the bound for a dip (∫f < 0, c < 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundInputs2 {
    pub beta2: f64,
    pub q0_tilde: f64,
    pub q1_tilde: f64,
    pub mu_tilde_1p: f64,
    /// β′ (first term of M̄′).
    pub beta_p: f64,
    /// β (second term of M̄′).
    pub beta: f64,
    pub m3: f64,
    pub m4: f64,
    pub b: f64,
    pub w: f64,
    pub c: f64,
    pub mu2: f64,
    pub lambda1: f64,
    pub alpha: f64,
}

impl LowerBoundInputs2 {
    /// μ̃₁′ = λ₁/2, β = β′ = 1/2, and q̃₀, q̃₁ at 1/3 and 2/3 of (α − β₂, α).
    pub fn with_defaults(f: &ReactionTerm, sc: &StabilityConstants, c: f64, e: &EdgeEigenvalues, tails: &TailBounds, beta2: f64) -> Result<Self> {
        let alpha = f.alpha().ok_or_else(|| Error::Precondition("bounds need a bistable term".into()))?;
        Ok(Self {
            beta2,
            q0_tilde: alpha - 2.0 * beta2 / 3.0,
            q1_tilde: alpha - beta2 / 3.0,
            mu_tilde_1p: 0.5 * e.lambda1,
            beta_p: 0.5,
            beta: 0.5,
            m3: tails.m3,
            m4: tails.m4,
            b: sc.b,
            w: sc.w,
            c,
            mu2: e.mu2,
            lambda1: e.lambda1,
            alpha,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// μ̃₂ (or μ̃₂′): midpoint of its admissible interval.
    pub mu_tilde_2: f64,
    /// M̄ (or M̄′).
    pub m_bar: f64,
    /// φ₀ (or φ̃₀), taken at the minimum it must stay below.
    pub phi0: f64,
    pub bound: f64,
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("admissibility violated: {what}")))
    }
}

/// max{−φ₀, −(1/λ₁)ln((1−α−β₁)/M₄) − φ₀} with
/// M̄ = (w+b)M₃/(cβμ₂) − (w+μ̃₂)q₀/(βμ̃₂) and
/// φ₀ = min{M̄, M̄ − ln((q₁−q₀)/M₃)/μ₂, M̄ − ln((μ̃₁−μ̃₂)q₀/(bM₃))/μ₂}.
pub fn lower_bound_l1(i: &LowerBoundInputs) -> Result<LowerBound> {
    require(i.c > 0.0, "c > 0")?;
    require(i.mu2 < 0.0 && i.lambda1 > 0.0, "μ₂ < 0 < λ₁")?;
    require(i.m3 > 0.0 && i.m4 > 0.0 && i.b > 0.0 && i.beta > 0.0, "M₃, M₄, b, β > 0")?;
    require(0.0 < 1.0 - i.q1, "0 < 1 − q₁")?;
    require(1.0 - i.q1 < 1.0 - i.q0, "1 − q₁ < 1 − q₀")?;
    require(1.0 - i.q0 < i.alpha + i.beta1, "1 − q₀ < α + β₁")?;
    require(i.alpha + i.beta1 < 1.0, "α + β₁ < 1")?;
    require(i.mu_tilde_1 > 0.0, "μ̃₁ > 0")?;
    let cap = (-i.mu2 * i.c).min(i.mu_tilde_1);
    let mu_t2 = 0.5 * cap;
    let m_bar = (i.w + i.b) / (i.c * i.beta * i.mu2) * i.m3 - (i.w + mu_t2) / (i.beta * mu_t2) * i.q0;
    require(m_bar < 0.0, "M̄ < 0")?;
    let phi0 = m_bar
        .min(m_bar - ((i.q1 - i.q0) / i.m3).ln() / i.mu2)
        .min(m_bar - ((i.mu_tilde_1 - mu_t2) * i.q0 / (i.b * i.m3)).ln() / i.mu2);
    let bound = (-phi0).max(-((1.0 - i.alpha - i.beta1) / i.m4).ln() / i.lambda1 - phi0);
    Ok(LowerBound { mu_tilde_2: mu_t2, m_bar, phi0, bound })
}

/// max{−φ̃₀, ln((α−β₂)/M₃)/μ₂ − φ̃₀} with
/// M̄′ = (w+b)M₄/(cλ₁β′) − (w+μ̃₂′)q̃₀/(βμ̃₂′) and
/// φ̃₀ = min{M̄′, M̄′ + ln((q̃₁−q̃₀)/M₄)/λ₁, M̄′ + ln((μ̃₁′−μ̃₂′)q̃₀/(bM₄))/λ₁}.
pub fn lower_bound_l2(i: &LowerBoundInputs2) -> Result<LowerBound> {
    require(i.c < 0.0, "c < 0")?;
    require(i.mu2 < 0.0 && i.lambda1 > 0.0, "μ₂ < 0 < λ₁")?;
    require(i.m3 > 0.0 && i.m4 > 0.0 && i.b > 0.0 && i.beta > 0.0 && i.beta_p > 0.0, "M₃, M₄, b, β, β′ > 0")?;
    require(0.0 < i.beta2 && i.beta2 < i.alpha, "0 < β₂ < α")?;
    require(i.alpha - i.beta2 < i.q0_tilde, "α − β₂ < q̃₀")?;
    require(i.q0_tilde < i.q1_tilde, "q̃₀ < q̃₁")?;
    require(i.q1_tilde < i.alpha, "q̃₁ < α")?;
    require(i.mu_tilde_1p > 0.0, "μ̃₁′ > 0")?;
    let cap = (-i.lambda1 * i.c).min(i.mu_tilde_1p);
    let mu_t2 = 0.5 * cap;
    let m_bar = (i.w + i.b) / (i.c * i.lambda1 * i.beta_p) * i.m4 - (i.w + mu_t2) / (i.beta * mu_t2) * i.q0_tilde;
    require(m_bar < 0.0, "M̄′ < 0")?;
    let phi0 = m_bar
        .min(m_bar + ((i.q1_tilde - i.q0_tilde) / i.m4).ln() / i.lambda1)
        .min(m_bar + ((i.mu_tilde_1p - mu_t2) * i.q0_tilde / (i.b * i.m4)).ln() / i.lambda1);
    let bound = (-phi0).max(((i.alpha - i.beta2) / i.m3).ln() / i.mu2 - phi0);
    Ok(LowerBound { mu_tilde_2: mu_t2, m_bar, phi0, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LowerBoundInputs {
        LowerBoundInputs {
            beta1: 0.1,
            q0: 0.8,
            q1: 0.9,
            mu_tilde_1: 0.35,
            beta: 0.5,
            m3: 1.0,
            m4: 1.0,
            b: 0.5,
            w: 0.26,
            c: 0.28,
            mu2: -0.7,
            lambda1: 0.7,
            alpha: 0.3,
        }
    }

    #[test]
    fn bound_dominates_minus_phi0() {
        let r = lower_bound_l1(&sample()).unwrap();
        assert!(r.bound >= -r.phi0);
        assert!(r.m_bar < 0.0);
        assert!(r.mu_tilde_2 > 0.0 && r.mu_tilde_2 < 0.7 * 0.28);
    }

    #[test]
    fn names_the_failed_inequality() {
        let mut i = sample();
        i.q0 = 0.5;
        let msg = lower_bound_l1(&i).unwrap_err().to_string();
        assert!(msg.contains("1 − q₀ < α + β₁"), "{msg}");
    }

    #[test]
    fn blows_up_as_margin_reaches_one_minus_alpha() {
        let mut i = sample();
        let mut prev = lower_bound_l1(&i).unwrap().bound;
        for b in [0.3, 0.5, 0.65, 0.69, 0.699999] {
            i.beta1 = b;
            let r = lower_bound_l1(&i).unwrap().bound;
            assert!(r >= prev);
            prev = r;
        }
        assert!(prev > 10.0);
    }
}
