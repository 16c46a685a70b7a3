//! Shift functions `p' = c + s·M·e^{r p}` driving the envelope fronts.
//!
//! Every shift in use has this Riccati-type form and the closed form
//! `p(t) = p₀ + ct − (1/r)·ln(1 + s(M/c)e^{r p₀}(1 − e^{c r t}))`.
//! `P5` is driven by `P4`: `p₅' = c₂ + M·e^{r p₄}`.

use crate::error::{Error, Result};
use crate::numerics::ode::{integrate, OdeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    /// C1 supersolution shift, `p' = c + M₇e^{λ₁p}`.
    P1,
    /// C2 supersolution shift, `p' = c + M₈e^{λ₁p}`.
    P2,
    /// C2 subsolution shift, `p' = c − M₈e^{λ₁p}`.
    P3,
    /// Monostable upper shift, `p' = c₁ + M₉e^{α̃p}`.
    P4,
    /// Monostable upper shift for the second front, driven by P4.
    P5,
    /// Annihilating subsolution shift, `P' = c − M·e^{μ₂P}` with c < 0.
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSign {
    Plus,
    Minus,
}

impl ShiftSign {
    fn value(self) -> f64 {
        match self {
            ShiftSign::Plus => 1.0,
            ShiftSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Riccati {
    c: f64,
    rate: f64,
    amplitude: f64,
    sign: f64,
    p0: f64,
}

impl Riccati {
    fn eval(&self, t: f64) -> Result<f64> {
        let arg = 1.0
            + self.sign * (self.amplitude / self.c) * (self.rate * self.p0).exp() * (1.0 - (self.c * self.rate * t).exp());
        if !(arg > 0.0) {
            return Err(Error::Domain(format!("shift function undefined at t = {t} (log argument {arg:e})")));
        }
        Ok(self.p0 + self.c * t - arg.ln() / self.rate)
    }

    fn derivative_at(&self, p: f64) -> f64 {
        self.c + self.sign * self.amplitude * (self.rate * p).exp()
    }

    /// lim_{t→−∞} (p(t) − ct), finite when c·r > 0.
    fn asymptotic_offset(&self) -> f64 {
        let arg = 1.0 + self.sign * (self.amplitude / self.c) * (self.rate * self.p0).exp();
        self.p0 - arg.ln() / self.rate
    }
}

#[derive(Debug, Clone)]
pub struct ShiftFunction {
    kind: ShiftKind,
    own: Riccati,
    /// For P5: the driving P4 and the second speed.
    driver: Option<Riccati>,
}

impl ShiftFunction {
    fn new(kind: ShiftKind, c: f64, rate: f64, amplitude: f64, sign: ShiftSign, p0: f64) -> Result<Self> {
        for (name, v) in [("speed", c), ("rate", rate), ("amplitude", amplitude), ("initial value", p0)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("shift {name} is not finite")));
            }
        }
        if c == 0.0 || rate == 0.0 {
            return Err(Error::InvalidParameter("shift speed and rate must be nonzero".into()));
        }
        if amplitude < 0.0 {
            return Err(Error::InvalidParameter(format!("shift amplitude {amplitude} must be ≥ 0")));
        }
        if c * rate < 0.0 {
            return Err(Error::InvalidParameter("shift requires c·r > 0 for a finite backward limit".into()));
        }
        Ok(Self { kind, own: Riccati { c, rate, amplitude, sign: sign.value(), p0 }, driver: None })
    }

    /// `p₁' = c + M₇e^{λ₁p₁}`.
    pub fn p1(c: f64, lambda1: f64, m7: f64, p0: f64) -> Result<Self> {
        Self::new(ShiftKind::P1, c, lambda1, m7, ShiftSign::Plus, p0)
    }

    /// `p₂' = c + M₈e^{λ₁p₂}`.
    pub fn p2(c: f64, lambda1: f64, m8: f64, p0: f64) -> Result<Self> {
        Self::new(ShiftKind::P2, c, lambda1, m8, ShiftSign::Plus, p0)
    }

    /// `p₃' = c − M₈e^{λ₁p₃}`; requires `p₃(0) ≤ min{0, ln(c/M₈)/λ₁}`.
    pub fn p3(c: f64, lambda1: f64, m8: f64, p0: f64) -> Result<Self> {
        let s = Self::new(ShiftKind::P3, c, lambda1, m8, ShiftSign::Minus, p0)?;
        let cap = Self::p3_cap(c, lambda1, m8);
        if p0 > cap {
            return Err(Error::InvalidParameter(format!(
                "p3(0) = {p0} exceeds min{{0, ln(c/M8)/λ1}} = {cap}"
            )));
        }
        Ok(s)
    }

    /// Largest admissible `p₃(0)`.
    pub fn p3_cap(c: f64, lambda1: f64, m8: f64) -> f64 {
        if m8 <= 0.0 {
            0.0
        } else {
            ((c / m8).ln() / lambda1).min(0.0)
        }
    }

    /// `p₄' = c₁ + M₉e^{α̃p₄}`.
    pub fn p4(c1: f64, alpha_tilde: f64, m9: f64, p0: f64) -> Result<Self> {
        Self::new(ShiftKind::P4, c1, alpha_tilde, m9, ShiftSign::Plus, p0)
    }

    /// `p₅' = c₂ + M₉e^{α̃p₄}` with `p₄` from `p4`.
    pub fn p5(p4: &ShiftFunction, c2: f64, p0: f64) -> Result<Self> {
        if p4.kind != ShiftKind::P4 {
            return Err(Error::InvalidParameter("P5 must be driven by a P4 shift".into()));
        }
        if !(c2.is_finite() && p0.is_finite()) {
            return Err(Error::InvalidParameter("P5 parameters must be finite".into()));
        }
        let own = Riccati { c: c2, rate: p4.own.rate, amplitude: p4.own.amplitude, sign: 1.0, p0 };
        Ok(Self { kind: ShiftKind::P5, own, driver: Some(p4.own) })
    }

    /// `P' = c − M·e^{μ₂P}` (c < 0, μ₂ < 0): the annihilating subsolution shift.
    pub fn dual(c: f64, mu2: f64, m: f64, p0: f64) -> Result<Self> {
        Self::new(ShiftKind::Dual, c, mu2, m, ShiftSign::Minus, p0)
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn speed(&self) -> f64 {
        self.own.c
    }

    pub fn rate(&self) -> f64 {
        self.own.rate
    }

    pub fn amplitude(&self) -> f64 {
        self.own.amplitude
    }

    pub fn initial(&self) -> f64 {
        self.own.p0
    }

    pub fn sign(&self) -> ShiftSign {
        if self.own.sign > 0.0 {
            ShiftSign::Plus
        } else {
            ShiftSign::Minus
        }
    }

    /// Closed-form value p(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self.driver {
            Some(d) => Ok(self.own.p0 + d.eval(t)? - d.p0 + (self.own.c - d.c) * t),
            None => self.own.eval(t),
        }
    }

    /// p'(t) from the ODE right-hand side at the closed-form value.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        match self.driver {
            Some(d) => Ok(self.own.c + d.amplitude * (d.rate * d.eval(t)?).exp()),
            None => Ok(self.own.derivative_at(self.own.eval(t)?)),
        }
    }

    /// p(t) by direct numerical integration of the ODE from t = 0.
    pub fn eval_numeric(&self, t: f64) -> Result<f64> {
        let opts = OdeOptions { rtol: 1e-13, atol: 1e-13, h0: 1e-3, h_max: 0.1, max_steps: 10_000_000 };
        match self.driver {
            None => {
                let r = self.own;
                let end = integrate(|_, y: &[f64; 1]| [r.derivative_at(y[0])], 0.0, [r.p0], t, &opts, &[], |_, _| {})?;
                Ok(end.y[0])
            }
            Some(d) => {
                let c2 = self.own.c;
                let end = integrate(
                    |_, y: &[f64; 2]| [d.derivative_at(y[0]), c2 + d.amplitude * (d.rate * y[0]).exp()],
                    0.0,
                    [d.p0, self.own.p0],
                    t,
                    &opts,
                    &[],
                    |_, _| {},
                )?;
                Ok(end.y[1])
            }
        }
    }

    /// lim_{t→−∞} (p(t) − c·t).
    pub fn asymptotic_offset(&self) -> f64 {
        match self.driver {
            Some(d) => self.own.p0 - d.p0 + d.asymptotic_offset(),
            None => self.own.asymptotic_offset(),
        }
    }

    /// `x₇ = ln(1 − (M₈/c)e^{λ₁p₃(0)})/λ₁` for a P3 shift.
    pub fn x7(&self) -> Result<f64> {
        self.require(ShiftKind::P3)?;
        let r = self.own;
        Ok((1.0 - (r.amplitude / r.c) * (r.rate * r.p0).exp()).ln() / r.rate)
    }

    /// `x₈ = p₃(0) − x₇`; the backward limit of p₃(t) − ct.
    pub fn x8(&self) -> Result<f64> {
        Ok(self.own.p0 - self.x7()?)
    }

    fn require(&self, kind: ShiftKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidParameter(format!("{kind:?} quantity requested from a {:?} shift", self.kind)));
        }
        Ok(())
    }
}
