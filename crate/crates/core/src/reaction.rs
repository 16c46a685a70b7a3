//! Polynomial reaction terms, assumption checks, case classification and the
//! global constants (w, v, b, θ) used by the comparison arguments.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::optimize::{bisect, sampled_max};
use crate::numerics::quad::adaptive_simpson;

/// Threshold on |∫₀¹f| below which the bistable term is treated as balanced.
pub const BALANCE_TOL: f64 = 1e-8;
const QUAD_TOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-10;
const SIGN_SAMPLES: usize = 4000;
/// Margin for strict sign tests on f' (rejects collars ending at a critical point).
const STRICT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssumptionClass {
    /// f(0)=f(α)=f(1)=0, f'(0)<0, f'(1)<0, single interior zero.
    BistableA,
    /// f>0 on (0,1), f'(0)>0, f'(1)<0.
    MonostableAPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    C1,
    C2,
    C3,
    C4,
    Monostable,
}

impl CaseTag {
    /// Sign of the front speed implied by the case (+1 for C1/C2, −1 for C3/C4).
    pub fn speed_sign(self) -> f64 {
        match self {
            CaseTag::C1 | CaseTag::C2 | CaseTag::Monostable => 1.0,
            CaseTag::C3 | CaseTag::C4 => -1.0,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::C1 => "C1",
            CaseTag::C2 => "C2",
            CaseTag::C3 => "C3",
            CaseTag::C4 => "C4",
            CaseTag::Monostable => "monostable",
        };
        f.write_str(s)
    }
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * u + a)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

fn multiply(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// A polynomial nonlinearity `f(u) = Σ aₖ uᵏ` with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionTerm {
    coeffs: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    alpha: Option<f64>,
    class: AssumptionClass,
    case: Option<CaseTag>,
    integral: f64,
    spec: String,
}

impl ReactionTerm {
    /// `f(u) = u(1−u)(u−α)`.
    pub fn cubic(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("cubic alpha = {alpha} must lie in (0,1)")));
        }
        let coeffs = vec![0.0, -alpha, 1.0 + alpha, -1.0];
        Self::build(coeffs, format!("cubic:{alpha}"))
    }

    /// `f(u) = u(1−u)`.
    pub fn fisher() -> Self {
        Self::build(vec![0.0, 1.0, -1.0], "fisher".into()).expect("fisher term is admissible")
    }

    /// `f(u) = u(1−u)(u−α)(k−u)` with `k > 1`; bistable with f'(0)=−αk, f'(1)=−(1−α)(k−1).
    pub fn quartic(alpha: f64, k: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) || !(k > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quartic needs alpha in (0,1) and k > 1, got alpha = {alpha}, k = {k}"
            )));
        }
        let p = multiply(&multiply(&[0.0, 1.0], &[1.0, -1.0]), &multiply(&[-alpha, 1.0], &[k, -1.0]));
        Self::build(p, format!("quartic:{alpha},{k}"))
    }

    /// Arbitrary polynomial, ascending powers.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        let list: Vec<String> = coeffs.iter().map(|c| format!("{c}")).collect();
        Self::build(coeffs.to_vec(), format!("poly:{}", list.join(",")))
    }

    /// Parses `cubic:0.3`, `cubic(0.3)`, `fisher`, `quartic:0.4,2`, `poly:0,1,-1`
    /// or a bracketed coefficient list `[0, 1, -1]`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let s = spec.trim();
        let parse_list = |body: &str| -> Result<Vec<f64>> {
            body.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number '{}' in reaction spec '{spec}'", t.trim())))
                })
                .collect()
        };
        if s == "fisher" {
            return Ok(Self::fisher());
        }
        if let Some(body) = s.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            return Self::polynomial(&parse_list(body)?);
        }
        let (name, body) = if let Some((n, b)) = s.split_once(':') {
            (n.trim(), b.trim())
        } else if let Some((n, b)) = s.split_once('(') {
            let b = b
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parenthesis in '{spec}'")))?;
            (n.trim(), b.trim())
        } else {
            return Err(Error::Parse(format!("unrecognised reaction spec '{spec}'")));
        };
        let args = parse_list(body)?;
        match (name, args.as_slice()) {
            ("cubic", [a]) => Self::cubic(*a),
            ("quartic", [a, k]) => Self::quartic(*a, *k),
            ("poly", list) if !list.is_empty() => Self::polynomial(list),
            _ => Err(Error::Parse(format!("unrecognised reaction spec '{spec}'"))),
        }
    }

    fn build(mut coeffs: Vec<f64>, spec: String) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite polynomial coefficient".into()));
        }
        let d1 = derivative(&coeffs);
        let d2 = derivative(&d1);
        let f = |u: f64| horner(&coeffs, u);
        let df = |u: f64| horner(&d1, u);
        let scale = coeffs.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
        if f(0.0).abs() > ZERO_TOL * scale || f(1.0).abs() > ZERO_TOL * scale {
            return Err(Error::AssumptionViolation(format!(
                "f(0) = {:e}, f(1) = {:e}; both must vanish",
                f(0.0),
                f(1.0)
            )));
        }
        let fp0 = df(0.0);
        let fp1 = df(1.0);
        if !(fp1 < 0.0) {
            return Err(Error::AssumptionViolation(format!("f'(1) = {fp1} must be negative")));
        }
        // interior sign pattern on a dense sample
        let h = 1.0 / SIGN_SAMPLES as f64;
        let signs: Vec<f64> = (1..SIGN_SAMPLES).map(|i| f(i as f64 * h)).collect();
        let integral = adaptive_simpson(f, 0.0, 1.0, QUAD_TOL)?;
        let (class, alpha) = if fp0 < 0.0 {
            let changes: Vec<usize> = (1..signs.len())
                .filter(|&i| signs[i - 1] < 0.0 && signs[i] >= 0.0 || signs[i - 1] >= 0.0 && signs[i] < 0.0)
                .collect();
            if changes.len() != 1 || signs[0] >= 0.0 || *signs.last().unwrap() <= 0.0 {
                return Err(Error::AssumptionViolation(
                    "bistable term must be negative on (0,α), positive on (α,1) with a single interior zero".into(),
                ));
            }
            let i = changes[0];
            let a = bisect(f, i as f64 * h, (i + 1) as f64 * h, 1e-15)?;
            (AssumptionClass::BistableA, Some(a))
        } else if fp0 > 0.0 {
            if signs.iter().any(|&s| s <= 0.0) {
                return Err(Error::AssumptionViolation("monostable term must be positive on (0,1)".into()));
            }
            (AssumptionClass::MonostableAPrime, None)
        } else {
            return Err(Error::AssumptionViolation("degenerate f'(0) = 0 is not supported".into()));
        };
        let case = match class {
            AssumptionClass::MonostableAPrime => Some(CaseTag::Monostable),
            AssumptionClass::BistableA => {
                if integral.abs() < BALANCE_TOL {
                    None
                } else {
                    Some(match (integral > 0.0, fp0 > fp1) {
                        (true, true) => CaseTag::C1,
                        (true, false) => CaseTag::C2,
                        (false, true) => CaseTag::C3,
                        (false, false) => CaseTag::C4,
                    })
                }
            }
        };
        Ok(Self { coeffs, d1, d2, alpha, class, case, integral, spec })
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        horner(&self.coeffs, u)
    }

    #[inline]
    pub fn f_prime(&self, u: f64) -> f64 {
        horner(&self.d1, u)
    }

    #[inline]
    pub fn f_second(&self, u: f64) -> f64 {
        horner(&self.d2, u)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Interior zero of a bistable term.
    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn assumption_class(&self) -> AssumptionClass {
        self.class
    }

    pub fn is_bistable(&self) -> bool {
        self.class == AssumptionClass::BistableA
    }

    /// ∫₀¹ f(u) du by adaptive quadrature.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// Case tag, or `None` for a balanced bistable term.
    pub fn case_tag(&self) -> Option<CaseTag> {
        self.case
    }

    /// Canonical textual form accepted by [`ReactionTerm::from_spec`].
    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// max |f'| on [0,1]; sets the speed bracket for shooting.
    pub fn max_abs_f_prime(&self) -> f64 {
        let a = sampled_max(|u| self.f_prime(u), 0.0, 1.0, 1000, 1e-12).1;
        let b = sampled_max(|u| -self.f_prime(u), 0.0, 1.0, 1000, 1e-12).1;
        a.max(b)
    }

    /// Minimal monostable front speed 2√f'(0).
    pub fn c_min(&self) -> Option<f64> {
        match self.class {
            AssumptionClass::MonostableAPrime => Some(2.0 * self.f_prime(0.0).sqrt()),
            AssumptionClass::BistableA => None,
        }
    }

    /// Bound on |f|, |f'|, |f''| over [−l0, l0].
    pub fn derivative_bound(&self, l0: f64) -> f64 {
        let g = |u: f64| self.f(u).abs().max(self.f_prime(u).abs()).max(self.f_second(u).abs());
        sampled_max(g, -l0, l0, 4000, 1e-12).1
    }
}

/// The case tag of a validated term; balanced bistable terms are rejected.
pub fn classify(f: &ReactionTerm) -> Result<CaseTag> {
    f.case.ok_or(Error::Balanced { integral: f.integral })
}

/// Constants of the comparison arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    /// max f' on [0,1].
    pub w: f64,
    /// max f' over the collars (negative).
    pub v: f64,
    /// |f(u)| ≤ b·u and |f(u)| ≤ b·(1−u) on [0,1].
    pub b: f64,
    /// Collar half-width.
    pub theta: f64,
    /// Lower bound of ∂ₜu on the mid-range for increasing entire solutions.
    pub b_bar: Option<f64>,
    /// Upper bound of ∂ₜu on the mid-range for decreasing entire solutions.
    pub b_tilde: Option<f64>,
}

fn sample_grid(a: f64, b: f64, spacing: f64) -> impl Iterator<Item = f64> {
    let n = ((b - a) / spacing).ceil().max(1.0) as usize;
    (0..=n).map(move |i| a + (b - a) * i as f64 / n as f64)
}

/// First and last zero of f' strictly inside (0,1).
fn f_prime_zero_range(f: &ReactionTerm) -> Option<(f64, f64)> {
    let n = SIGN_SAMPLES;
    let h = 1.0 / n as f64;
    let mut zeros = Vec::new();
    for i in 0..n {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let (fa, fb) = (f.f_prime(a), f.f_prime(b));
        if fa == 0.0 && i > 0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            zeros.push(bisect(|u| f.f_prime(u), a, b, 1e-14).ok()?);
        }
    }
    Some((*zeros.first()?, *zeros.last()?))
}

/// w, v, b and θ for a validated term.
pub fn compute_constants(f: &ReactionTerm) -> Result<StabilityConstants> {
    let (_, w) = sampled_max(|u| f.f_prime(u), 0.0, 1.0, 2000, 1e-10);
    let (r0, r1) = f_prime_zero_range(f).ok_or_else(|| {
        Error::AssumptionViolation("f' has no interior sign change; collars cannot be placed".into())
    })?;
    let bistable = f.is_bistable();
    if bistable && !(f.f_prime(0.0) < 0.0) {
        return Err(Error::AssumptionViolation("bistable term needs f'(0) < 0 for a lower collar".into()));
    }
    let collar_ok = |theta: f64| -> bool {
        let upper = sample_grid(1.0 - 2.0 * theta, 1.0 + theta, 1e-3).all(|u| f.f_prime(u) < -STRICT);
        let lower = if bistable {
            sample_grid(-theta, 2.0 * theta, 1e-3).all(|u| f.f_prime(u) < -STRICT)
        } else {
            sample_grid(0.0, 2.0 * theta, 1e-3).all(|u| f.f_prime(u) > STRICT)
        };
        upper && lower
    };
    // start at the distance to the nearest interior critical point of f and halve
    let mut theta = r0.min(1.0 - r1);
    let mut found = false;
    for _ in 0..60 {
        if theta > 0.0 && collar_ok(theta) {
            found = true;
            break;
        }
        theta *= 0.5;
    }
    if !found {
        return Err(Error::AssumptionViolation("no positive collar width found".into()));
    }
    let upper_max = sampled_max(|u| f.f_prime(u), 1.0 - 2.0 * theta, 1.0 + theta, 400, 1e-12).1;
    let v = if bistable {
        let lower_max = sampled_max(|u| f.f_prime(u), -theta, 2.0 * theta, 400, 1e-12).1;
        upper_max.max(lower_max)
    } else {
        upper_max
    };
    if !(v < 0.0) {
        return Err(Error::AssumptionViolation(format!("collar maximum of f' is {v}, not negative")));
    }
    let ratio = |u: f64| -> f64 {
        let fu = f.f(u).abs();
        let left = if u <= 0.0 { f.f_prime(0.0).abs() } else { fu / u };
        let right = if u >= 1.0 { f.f_prime(1.0).abs() } else { fu / (1.0 - u) };
        left.max(right)
    };
    let (_, b_raw) = sampled_max(ratio, 0.0, 1.0, 10_000, 1e-12);
    let b = b_raw * (1.0 + 1e-9);
    Ok(StabilityConstants { w, v, b, theta, b_bar: None, b_tilde: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_integral_and_slope() {
        let f = ReactionTerm::cubic(0.25).unwrap();
        assert!((f.integral() - 1.0 / 24.0).abs() < 1e-10);
        assert_eq!(f.f(0.0), 0.0);
        assert!((f.f_prime(0.0) + 0.25).abs() < 1e-15);
        assert!((f.alpha().unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn cubic_rejects_bad_alpha() {
        assert!(matches!(ReactionTerm::cubic(1.2), Err(Error::InvalidParameter(_))));
        assert!(ReactionTerm::cubic(0.0).is_err());
    }

    #[test]
    fn classify_cases() {
        assert_eq!(classify(&ReactionTerm::cubic(0.25).unwrap()).unwrap(), CaseTag::C1);
        assert_eq!(classify(&ReactionTerm::cubic(0.75).unwrap()).unwrap(), CaseTag::C4);
        assert_eq!(classify(&ReactionTerm::fisher()).unwrap(), CaseTag::Monostable);
        assert!(matches!(classify(&ReactionTerm::cubic(0.5).unwrap()), Err(Error::Balanced { .. })));
        // u(1-u)(u-0.4)(2-u): positive integral with f'(0) = -0.8 < f'(1) = -0.6
        assert_eq!(classify(&ReactionTerm::quartic(0.4, 2.0).unwrap()).unwrap(), CaseTag::C2);
    }

    #[test]
    fn spec_parsing() {
        let a = ReactionTerm::from_spec("cubic:0.3").unwrap();
        let b = ReactionTerm::from_spec("cubic(0.3)").unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
        let c = ReactionTerm::from_spec("[0, 1, -1]").unwrap();
        assert_eq!(c.assumption_class(), AssumptionClass::MonostableAPrime);
        let d = ReactionTerm::from_spec(a.spec()).unwrap();
        assert_eq!(a, d);
        assert!(ReactionTerm::from_spec("sine").is_err());
        assert!(ReactionTerm::from_spec("poly:0,1,1").is_err());
    }

    #[test]
    fn constants_cubic_quarter() {
        let f = ReactionTerm::cubic(0.25).unwrap();
        let sc = compute_constants(&f).unwrap();
        // f'(u) = -3u² + 2(1+α)u - α peaks at (1+α)/3
        let a: f64 = 0.25;
        let u = (1.0 + a) / 3.0;
        let oracle = -3.0 * u * u + 2.0 * (1.0 + a) * u - a;
        assert!((sc.w - oracle).abs() < 1e-9);
        assert!((sc.w - 0.270833333).abs() < 1e-6);
        assert!(sc.v < 0.0 && sc.theta > 0.0);
        assert!(sc.b >= 0.75 - 1e-12);
    }

    #[test]
    fn constants_cubic_point_three() {
        let f = ReactionTerm::cubic(0.3).unwrap();
        let sc = compute_constants(&f).unwrap();
        assert!((sc.theta - 0.0342).abs() < 1e-3, "theta = {}", sc.theta);
        assert!(sc.v < -0.1 && sc.v > -0.2, "v = {}", sc.v);
    }

    #[test]
    fn constants_fisher() {
        let sc = compute_constants(&ReactionTerm::fisher()).unwrap();
        assert!((sc.w - 1.0).abs() < 1e-9);
        assert!((sc.theta - 0.125).abs() < 1e-12);
        assert!((sc.v + 0.5).abs() < 1e-9);
    }

    #[test]
    fn c_min_fisher() {
        assert!((ReactionTerm::fisher().c_min().unwrap() - 2.0).abs() < 1e-15);
        assert!(ReactionTerm::cubic(0.3).unwrap().c_min().is_none());
    }
}
