//! Envelope constructions for each case.

use std::sync::Arc;

use super::envelope::{Branch, BranchKind, Combine, Envelope, EnvelopeCase, Role};
use super::shift::ShiftFunction;
use crate::error::{Error, Result};
use crate::front::{eigenvalues, solve_front_monostable, Direction, FrontProfile};
use crate::numerics::ode::{integrate, OdeOptions};
use crate::reaction::{AssumptionClass, ReactionTerm};

fn require_increasing(p: &FrontProfile) -> Result<()> {
    if p.direction() != Direction::Increasing {
        return Err(Error::InvalidParameter("envelopes are built from the increasing profile".into()));
    }
    Ok(())
}

fn front_branch(name: &str, p: &Arc<FrontProfile>, sign: f64, shift: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Branch {
    let p = Arc::clone(p);
    Branch::new(name, BranchKind::Exact, Arc::new(move |x, t| p.eval(sign * x + shift(t))))
}

/// Envelopes of the increasing entire solution when ∫f > 0 and f'(0) > f'(1).
#[derive(Debug, Clone)]
pub struct C1Envelopes {
    pub super_env: Envelope,
    pub sub_env: Envelope,
    pub p1: ShiftFunction,
    /// `x₆ = p₁(0) − (1/λ₁)ln(1 + M₇/c)`, used by the subsolution.
    pub x6: f64,
    /// lim_{t→−∞}(p₁(t) − ct); equals x₆ when p₁(0) = 0 and exceeds it otherwise.
    pub x6_asymptotic: f64,
}

/// Super: min{φ(x+p₁) + φ(−x+p₁), 1}. Sub: max{φ(x+ct+x₆), φ(−x+ct+x₆)}. Valid for t ≤ 0.
pub fn build_envelope_c1(f: &ReactionTerm, p: &FrontProfile, m7: f64, p1_0: f64) -> Result<C1Envelopes> {
    require_increasing(p)?;
    let c = p.c();
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("C1 envelopes need c > 0, got {c}")));
    }
    if p1_0 > 0.0 {
        return Err(Error::InvalidParameter(format!("p1(0) = {p1_0} must be ≤ 0")));
    }
    let lambda1 = eigenvalues(f, c)?.lambda1;
    let p1 = ShiftFunction::p1(c, lambda1, m7, p1_0)?;
    let x6 = p1_0 - (1.0 + m7 / c).ln() / lambda1;
    let prof = Arc::new(p.clone());
    let sum = {
        let (prof, p1) = (Arc::clone(&prof), p1.clone());
        Branch::new(
            "phi(x+p1)+phi(-x+p1)",
            BranchKind::Constructed,
            Arc::new(move |x, t| {
                let s = p1.eval(t).unwrap_or(f64::NAN);
                prof.eval(x + s) + prof.eval(-x + s)
            }),
        )
    };
    let super_env = Envelope::new(
        Role::Super,
        EnvelopeCase::C1,
        Combine::Min,
        vec![sum, Branch::constant("one", 1.0)],
        (f64::NEG_INFINITY, 0.0),
        "φ(x+p₁) + φ(−x+p₁) = 1",
    )?;
    let sub_env = Envelope::new(
        Role::Sub,
        EnvelopeCase::C1,
        Combine::Max,
        vec![
            front_branch("phi(x+ct+x6)", &prof, 1.0, move |t| c * t + x6),
            front_branch("phi(-x+ct+x6)", &prof, -1.0, move |t| c * t + x6),
        ],
        (f64::NEG_INFINITY, 0.0),
        "x = 0",
    )?;
    let x6_asymptotic = p1.asymptotic_offset();
    Ok(C1Envelopes { super_env, sub_env, p1, x6, x6_asymptotic })
}

/// Envelopes of the increasing entire solution when ∫f > 0 and f'(0) ≤ f'(1).
#[derive(Debug, Clone)]
pub struct C2Envelopes {
    pub super_env: Envelope,
    pub sub_env: Envelope,
    pub p2: ShiftFunction,
    pub p3: ShiftFunction,
    pub x8: f64,
}

fn pair_sum(name: &str, kind: BranchKind, prof: &Arc<FrontProfile>, s: &ShiftFunction, minus_one: bool) -> Branch {
    let (prof, s) = (Arc::clone(prof), s.clone());
    let off = if minus_one { 1.0 } else { 0.0 };
    Branch::new(
        name,
        kind,
        Arc::new(move |x, t| {
            let q = s.eval(t).unwrap_or(f64::NAN);
            prof.eval(x + q) + prof.eval(-x + q) - off
        }),
    )
}

/// Super: φ(x+p₂) + φ(−x+p₂). Sub: φ(x+p₃) + φ(−x+p₃). Valid for t ≤ 0.
pub fn build_envelope_c2(f: &ReactionTerm, p: &FrontProfile, m8: f64, p2_0: f64, p3_0: f64) -> Result<C2Envelopes> {
    require_increasing(p)?;
    let c = p.c();
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("C2 envelopes need c > 0, got {c}")));
    }
    if p2_0 > 0.0 {
        return Err(Error::InvalidParameter(format!("p2(0) = {p2_0} must be ≤ 0")));
    }
    let lambda1 = eigenvalues(f, c)?.lambda1;
    let p2 = ShiftFunction::p2(c, lambda1, m8, p2_0)?;
    let p3 = ShiftFunction::p3(c, lambda1, m8, p3_0)?;
    let prof = Arc::new(p.clone());
    let super_env = Envelope::new(
        Role::Super,
        EnvelopeCase::C2,
        Combine::Single,
        vec![pair_sum("phi(x+p2)+phi(-x+p2)", BranchKind::Constructed, &prof, &p2, false)],
        (f64::NEG_INFINITY, 0.0),
        "none",
    )?;
    let sub_env = Envelope::new(
        Role::Sub,
        EnvelopeCase::C2,
        Combine::Single,
        vec![pair_sum("phi(x+p3)+phi(-x+p3)", BranchKind::Constructed, &prof, &p3, false)],
        (f64::NEG_INFINITY, 0.0),
        "none",
    )?;
    let x8 = p3.x8()?;
    Ok(C2Envelopes { super_env, sub_env, p2, p3, x8 })
}

/// Product profile Φ(x,t) = φ(x+ct)φ(−x+ct) and the time-shift band h₁.
#[derive(Debug, Clone)]
pub struct AnnihilatingBand {
    profile: Arc<FrontProfile>,
    pub b: f64,
}

impl AnnihilatingBand {
    pub fn new(profile: &FrontProfile, b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::InvalidParameter(format!("band constant B = {b} must be positive")));
        }
        Ok(Self { profile: Arc::new(profile.clone()), b })
    }

    pub fn phi_product(&self, x: f64, t: f64) -> f64 {
        let c = self.profile.c();
        self.profile.eval(x + c * t) * self.profile.eval(-x + c * t)
    }

    /// h₁(t) = 4Bφ(ct).
    pub fn h1(&self, t: f64) -> f64 {
        4.0 * self.b * self.profile.eval(self.profile.c() * t)
    }

    /// The band is stated for t ≤ −4Bφ(0).
    pub fn validity_end(&self) -> f64 {
        -4.0 * self.b * self.profile.eval(0.0)
    }
}

/// Envelopes of the decreasing entire solution (∫f < 0, c < 0).
#[derive(Debug, Clone)]
pub struct AnnihilatingEnvelopes {
    pub super_env: Envelope,
    pub sub_env: Envelope,
    /// Shift P of the subsolution before the time translation.
    pub shift: ShiftFunction,
    /// Sub uses P(t − t_offset); chosen so that P(t − t_offset) − ct → 0 as t → −∞.
    pub t_offset: f64,
    pub band: AnnihilatingBand,
}

/// Super: min{φ(x+ct), φ(−x+ct)} (all t). Sub: max{0, φ(x+P̃)+φ(−x+P̃)−1} with
/// P' = c − Me^{μ₂P}, the image under u ↦ 1−u of the expanding-front supersolution.
pub fn build_envelope_annihilating(f: &ReactionTerm, p: &FrontProfile, b: f64, m: f64) -> Result<AnnihilatingEnvelopes> {
    require_increasing(p)?;
    let c = p.c();
    if !(c < 0.0) {
        return Err(Error::InvalidParameter(format!("annihilating envelopes need c < 0, got {c}")));
    }
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("band constant B = {b} must be positive")));
    }
    let mu2 = eigenvalues(f, c)?.mu2;
    let shift = ShiftFunction::dual(c, mu2, m, 0.0)?;
    let t_offset = shift.asymptotic_offset() / c;
    let prof = Arc::new(p.clone());
    let super_env = Envelope::new(
        Role::Super,
        EnvelopeCase::Annihilating,
        Combine::Min,
        vec![
            front_branch("phi(x+ct)", &prof, 1.0, move |t| c * t),
            front_branch("phi(-x+ct)", &prof, -1.0, move |t| c * t),
        ],
        (f64::NEG_INFINITY, f64::INFINITY),
        "x = 0",
    )?;
    let shifted = {
        let (prof, s) = (Arc::clone(&prof), shift.clone());
        Branch::new(
            "phi(x+P)+phi(-x+P)-1",
            BranchKind::Constructed,
            Arc::new(move |x, t| {
                let q = s.eval(t - t_offset).unwrap_or(f64::NAN);
                prof.eval(x + q) + prof.eval(-x + q) - 1.0
            }),
        )
    };
    let sub_env = Envelope::new(
        Role::Sub,
        EnvelopeCase::Annihilating,
        Combine::Max,
        vec![shifted, Branch::constant("zero", 0.0)],
        (f64::NEG_INFINITY, t_offset),
        "φ(x+P) + φ(−x+P) = 1",
    )?;
    Ok(AnnihilatingEnvelopes { super_env, sub_env, shift, t_offset, band: AnnihilatingBand { profile: prof, b } })
}

/// Spatially uniform orbit ρ' = f(ρ), 0 < ρ < 1, tabulated on [−60, 60].
#[derive(Debug, Clone)]
pub struct UniformOrbit {
    t0: f64,
    dt: f64,
    rho: Vec<f64>,
    drho: Vec<f64>,
    rate0: f64,
    rate1: f64,
}

impl UniformOrbit {
    pub fn new(f: &ReactionTerm, rho0: f64) -> Result<Self> {
        if !(rho0 > 0.0 && rho0 < 1.0) {
            return Err(Error::InvalidParameter(format!("ρ(0) = {rho0} must lie in (0,1)")));
        }
        let (t0, t1, dt): (f64, f64, f64) = (-60.0, 60.0, 0.01);
        let n = ((t1 - t0) / dt).round() as usize + 1;
        let k0 = ((0.0 - t0) / dt).round() as usize;
        let opts = OdeOptions { rtol: 1e-13, atol: 1e-30, h0: 1e-3, h_max: 0.05, max_steps: 10_000_000 };
        let mut rho = vec![0.0; n];
        rho[k0] = rho0;
        for dir in [-1i64, 1] {
            let mut y = [rho0];
            let mut k = k0 as i64;
            loop {
                let next = k + dir;
                if next < 0 || next >= n as i64 {
                    break;
                }
                let (ta, tb) = (t0 + k as f64 * dt, t0 + next as f64 * dt);
                y = integrate(|_, v: &[f64; 1]| [f.f(v[0])], ta, y, tb, &opts, &[], |_, _| {})?.y;
                rho[next as usize] = y[0];
                k = next;
            }
        }
        let drho = rho.iter().map(|&r| f.f(r)).collect();
        Ok(Self { t0, dt, rho, drho, rate0: f.f_prime(0.0), rate1: f.f_prime(1.0) })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.rho.len();
        let s = (t - self.t0) / self.dt;
        if s <= 0.0 {
            return self.rho[0] * (self.rate0 * (t - self.t0)).exp();
        }
        if s >= (n - 1) as f64 {
            let t_end = self.t0 + (n - 1) as f64 * self.dt;
            return 1.0 - (1.0 - self.rho[n - 1]) * (self.rate1 * (t - t_end)).exp();
        }
        let i = (s.floor() as usize).min(n - 2);
        let r = s - i as f64;
        let (r2, r3) = (r * r, r * r * r);
        (2.0 * r3 - 3.0 * r2 + 1.0) * self.rho[i]
            + (r3 - 2.0 * r2 + r) * self.dt * self.drho[i]
            + (-2.0 * r3 + 3.0 * r2) * self.rho[i + 1]
            + (r3 - r2) * self.dt * self.drho[i + 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonostableVariant {
    /// Two fronts, no spatially uniform part.
    U3,
    /// Front from the left plus the uniform orbit.
    U10,
    /// Front from the right plus the uniform orbit.
    U01,
    /// Both fronts plus the uniform orbit.
    U11,
}

impl MonostableVariant {
    fn flags(self) -> (bool, bool, bool) {
        match self {
            MonostableVariant::U3 => (true, true, false),
            MonostableVariant::U10 => (true, false, true),
            MonostableVariant::U01 => (false, true, true),
            MonostableVariant::U11 => (true, true, true),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MonostableParams {
    pub c1: f64,
    pub c2: f64,
    pub m9: f64,
    pub p4_0: f64,
    pub p5_0: f64,
    /// Exponent of the P4 shift; defaults to the left log-slope of φ_{c₁}.
    pub alpha_tilde: Option<f64>,
    pub rho0: f64,
    /// Defaults to half of min_{[−30,0]} ρ(t)e^{−f'(0)t}.
    pub nu0: Option<f64>,
}

impl Default for MonostableParams {
    fn default() -> Self {
        Self { c1: 2.2, c2: 2.6, m9: 1.0, p4_0: 0.0, p5_0: 0.0, alpha_tilde: None, rho0: 0.5, nu0: None }
    }
}

#[derive(Debug, Clone)]
pub struct MonostableEnvelopes {
    pub lower: Envelope,
    pub upper: Envelope,
    pub p4: ShiftFunction,
    pub p5: ShiftFunction,
    pub rho: Arc<UniformOrbit>,
    pub nu0: f64,
    /// sup_{t∈[−30,0]} (ρ − ν)e^{−f'(0)t}.
    pub m10: f64,
    pub front1: Arc<FrontProfile>,
    pub front2: Arc<FrontProfile>,
}

/// Lower: max of the chosen fronts φ_{c₁}(x+c₁t+y₁), φ_{c₂}(−x+c₂t+y₂) and ρ(t).
/// Upper: min{1, φ_{c₁}(x+p₄) + φ_{c₂}(−x+p₅) + (ν₀+M₁₀)e^{f'(0)t}} (uniform term only
/// with ρ). The lower shifts are the backward limits of p₄ − c₁t and p₅ − c₂t.
pub fn build_envelope_monostable(f: &ReactionTerm, variant: MonostableVariant, prm: &MonostableParams) -> Result<MonostableEnvelopes> {
    if f.assumption_class() != AssumptionClass::MonostableAPrime {
        return Err(Error::InvalidParameter("monostable envelopes need a monostable term".into()));
    }
    let c_min = f.c_min().unwrap_or(0.0);
    if !(prm.c1 >= c_min - 1e-12 && prm.c2 >= prm.c1) {
        return Err(Error::InvalidParameter(format!(
            "speeds must satisfy c_min = {c_min} ≤ c1 = {} ≤ c2 = {}",
            prm.c1, prm.c2
        )));
    }
    if !(prm.p5_0 <= prm.p4_0 && prm.p4_0 <= 0.0) {
        return Err(Error::InvalidParameter("need p5(0) ≤ p4(0) ≤ 0".into()));
    }
    let front1 = Arc::new(solve_front_monostable(f, prm.c1)?);
    let front2 = Arc::new(solve_front_monostable(f, prm.c2)?);
    let alpha_tilde = prm.alpha_tilde.unwrap_or(front1.tail_rates().0);
    if !(alpha_tilde > 0.0) {
        return Err(Error::InvalidParameter(format!("α̃ = {alpha_tilde} must be positive")));
    }
    let p4 = ShiftFunction::p4(prm.c1, alpha_tilde, prm.m9, prm.p4_0)?;
    let p5 = ShiftFunction::p5(&p4, prm.c2, prm.p5_0)?;
    let rho = Arc::new(UniformOrbit::new(f, prm.rho0)?);
    let lin = f.f_prime(0.0);
    let ts: Vec<f64> = (0..=3000).map(|k| -30.0 + k as f64 * 0.01).collect();
    let scaled_min = ts.iter().map(|&t| rho.eval(t) * (-lin * t).exp()).fold(f64::INFINITY, f64::min);
    let nu0 = prm.nu0.unwrap_or(0.5 * scaled_min);
    if !(nu0 > 0.0 && nu0 < scaled_min) {
        return Err(Error::InvalidParameter(format!(
            "ν₀ = {nu0} must lie in (0, {scaled_min}) so that 0 < ρ − ν"
        )));
    }
    let m10 = ts
        .iter()
        .map(|&t| (rho.eval(t) - nu0 * (lin * t).exp()) * (-lin * t).exp())
        .fold(0.0, f64::max)
        * (1.0 + 1e-9);
    let (use1, use2, use_rho) = variant.flags();
    let (y1, y2) = (p4.asymptotic_offset(), p5.asymptotic_offset());
    let (c1, c2) = (prm.c1, prm.c2);
    let mut lower = Vec::new();
    if use1 {
        lower.push(front_branch("phi_c1(x+c1t+y1)", &front1, 1.0, move |t| c1 * t + y1));
    }
    if use2 {
        lower.push(front_branch("phi_c2(-x+c2t+y2)", &front2, -1.0, move |t| c2 * t + y2));
    }
    if use_rho {
        let r = Arc::clone(&rho);
        lower.push(Branch::new("rho(t)", BranchKind::Exact, Arc::new(move |_, t| r.eval(t))));
    }
    let upper_sum = {
        let (f1, f2, p4, p5) = (Arc::clone(&front1), Arc::clone(&front2), p4.clone(), p5.clone());
        let amp = if use_rho { nu0 + m10 } else { 0.0 };
        Branch::new(
            "fronts(p4,p5)+nu",
            BranchKind::Constructed,
            Arc::new(move |x, t| {
                let mut v = amp * (lin * t).exp();
                if use1 {
                    v += f1.eval(x + p4.eval(t).unwrap_or(f64::NAN));
                }
                if use2 {
                    v += f2.eval(-x + p5.eval(t).unwrap_or(f64::NAN));
                }
                v
            }),
        )
    };
    let lower = Envelope::new(
        Role::Sub,
        EnvelopeCase::Monostable,
        if lower.len() == 1 { Combine::Single } else { Combine::Max },
        lower,
        (f64::NEG_INFINITY, 0.0),
        "equal branch values",
    )?;
    let upper = Envelope::new(
        Role::Super,
        EnvelopeCase::Monostable,
        Combine::Min,
        vec![upper_sum, Branch::constant("one", 1.0)],
        (f64::NEG_INFINITY, 0.0),
        "sum = 1",
    )?;
    Ok(MonostableEnvelopes { lower, upper, p4, p5, rho, nu0, m10, front1, front2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::solve_front_bistable;

    #[test]
    fn c1_sub_below_super() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let p = solve_front_bistable(&f, 1e-10).unwrap();
        let e = build_envelope_c1(&f, &p, 0.8, -0.5).unwrap();
        assert!(e.x6 <= e.x6_asymptotic);
        for t in [-30.0, -10.0, -1.0, 0.0] {
            for x in [-30.0, -5.0, 0.0, 2.0, 25.0] {
                let (lo, hi) = (e.sub_env.eval(x, t), e.super_env.eval(x, t));
                assert!(lo <= hi + 1e-12 && (0.0..=1.0).contains(&lo) && hi <= 1.0);
            }
        }
        assert!(build_envelope_c1(&f, &p, 0.8, 0.5).is_err());
    }

    #[test]
    fn fisher_orbit_is_logistic() {
        let f = ReactionTerm::fisher();
        let o = UniformOrbit::new(&f, 0.3).unwrap();
        let k = 1.0 / 0.3 - 1.0;
        for t in [-55.0, -30.0, -3.3, 0.0, 4.0, 20.0] {
            let exact = 1.0 / (1.0 + (-t as f64).exp() * k);
            assert!((o.eval(t) - exact).abs() < 1e-10 * exact.max(1e-3), "t = {t}");
        }
    }

    #[test]
    fn monostable_uniform_bound() {
        let f = ReactionTerm::fisher();
        let e = build_envelope_monostable(&f, MonostableVariant::U11, &MonostableParams::default()).unwrap();
        for k in 0..=300 {
            let t = -30.0 + 0.1 * k as f64;
            let gap = e.rho.eval(t) - e.nu0 * t.exp();
            assert!(gap > 0.0 && gap <= e.m10 * t.exp());
        }
        for t in [-20.0, -5.0, 0.0] {
            for x in [-40.0, -3.0, 0.0, 7.0, 40.0] {
                assert!(e.lower.eval(x, t) <= e.upper.eval(x, t) + 1e-12);
            }
        }
    }

    #[test]
    fn annihilating_sub_below_super() {
        let f = ReactionTerm::cubic(0.7).unwrap();
        let p = solve_front_bistable(&f, 1e-10).unwrap();
        let e = build_envelope_annihilating(&f, &p, 1.0, 0.5).unwrap();
        assert!(e.t_offset < 0.0);
        for t in [-40.0, -10.0, e.t_offset] {
            for x in [-20.0, -1.0, 0.0, 3.0, 30.0] {
                assert!(e.sub_env.eval(x, t) <= e.super_env.eval(x, t) + 1e-12);
            }
        }
        // h1 tends to 4B, not 0, as t → −∞ because φ(ct) → 1 for c < 0
        assert!((e.band.h1(-200.0) - 4.0).abs() < 1e-9);
        assert!((e.band.validity_end() + 2.0).abs() < 1e-9);
    }
}
