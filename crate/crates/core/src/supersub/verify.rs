//! Finite-difference certification of super/sub-solution inequalities.

use rayon::prelude::*;

use super::envelope::{BranchKind, Envelope, Role};
use crate::error::{Error, Result};
use crate::reaction::ReactionTerm;

/// Sample points and the finite-difference spacing used to form N[u].
#[derive(Debug, Clone)]
pub struct VerifyGrid {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// Spacing of the difference quotients in x and t; tol = 10·dx².
    pub dx: f64,
}

impl VerifyGrid {
    pub fn uniform((x0, x1): (f64, f64), x_step: f64, (t0, t1): (f64, f64), t_step: f64, dx: f64) -> Result<Self> {
        if !(x_step > 0.0 && t_step > 0.0 && dx > 0.0) || !(x1 >= x0 && t1 >= t0) {
            return Err(Error::InvalidParameter("verification grid needs positive steps and ordered ranges".into()));
        }
        let nx = ((x1 - x0) / x_step + 1e-9).floor() as usize + 1;
        let nt = ((t1 - t0) / t_step + 1e-9).floor() as usize + 1;
        Ok(Self {
            xs: (0..nx).map(|i| x0 + i as f64 * x_step).collect(),
            ts: (0..nt).map(|k| t0 + k as f64 * t_step).collect(),
            dx,
        })
    }

    pub fn tolerance(&self) -> f64 {
        10.0 * self.dx * self.dx
    }
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub role: Role,
    pub samples: usize,
    pub skipped: usize,
    /// Largest violation of the role's sign (−N for Super, N for Sub); ≤ 0 is clean.
    pub max_violation: f64,
    pub worst_x: f64,
    pub worst_t: f64,
    /// Largest |N| on branches that are exact fronts.
    pub max_abs_exact: f64,
    pub tol: f64,
    pub pass: bool,
}

struct Row {
    samples: usize,
    skipped: usize,
    viol: f64,
    wx: f64,
    wt: f64,
    exact: f64,
}

/// Evaluates N[u] = ∂ₜu − ∂ₓₓu − f(u) on the active smooth branch at each
/// sample; samples within 2·dx (or one time step) of a branch switch are
/// skipped.
pub fn verify_inequality(e: &Envelope, f: &ReactionTerm, grid: &VerifyGrid) -> Result<ResidualReport> {
    let h = grid.dx;
    let tau = h;
    for &t in &grid.ts {
        if !e.is_valid_at(t) {
            return Err(Error::InvalidParameter(format!(
                "sample time {t} outside validity [{}, {}]",
                e.t_min, e.t_max
            )));
        }
    }
    let rows: Vec<Row> = grid
        .ts
        .par_iter()
        .map(|&t| {
            let back_ok = e.is_valid_at(t - 2.0 * tau);
            let fwd_ok = e.is_valid_at(t + 2.0 * tau);
            let mut row = Row { samples: 0, skipped: 0, viol: f64::NEG_INFINITY, wx: 0.0, wt: t, exact: 0.0 };
            for &x in &grid.xs {
                row.samples += 1;
                let i = e.active(x, t);
                let mut probes = vec![(x - 2.0 * h, t), (x + 2.0 * h, t)];
                if back_ok {
                    probes.push((x, t - 2.0 * tau));
                }
                if fwd_ok {
                    probes.push((x, t + 2.0 * tau));
                }
                if probes.iter().any(|&(px, pt)| e.active(px, pt) != i) {
                    row.skipped += 1;
                    continue;
                }
                let b = &e.branches[i];
                let v = b.eval(x, t);
                let uxx = (b.eval(x + h, t) - 2.0 * v + b.eval(x - h, t)) / (h * h);
                let ut = if back_ok && fwd_ok {
                    (b.eval(x, t + tau) - b.eval(x, t - tau)) / (2.0 * tau)
                } else if back_ok {
                    (3.0 * v - 4.0 * b.eval(x, t - tau) + b.eval(x, t - 2.0 * tau)) / (2.0 * tau)
                } else {
                    (-3.0 * v + 4.0 * b.eval(x, t + tau) - b.eval(x, t + 2.0 * tau)) / (2.0 * tau)
                };
                let n = ut - uxx - f.f(v);
                let viol = match e.role {
                    Role::Super => -n,
                    Role::Sub => n,
                };
                let viol = if viol.is_nan() { f64::INFINITY } else { viol };
                if viol > row.viol {
                    row.viol = viol;
                    row.wx = x;
                }
                if b.kind == BranchKind::Exact {
                    row.exact = row.exact.max(n.abs());
                }
            }
            row
        })
        .collect();
    let samples: usize = rows.iter().map(|r| r.samples).sum();
    let skipped: usize = rows.iter().map(|r| r.skipped).sum();
    if samples == 0 {
        return Err(Error::Sampling("empty verification grid".into()));
    }
    if skipped == samples {
        return Err(Error::Sampling("every sample lies on the kink locus".into()));
    }
    let worst = rows
        .iter()
        .filter(|r| r.viol > f64::NEG_INFINITY)
        .max_by(|a, b| a.viol.partial_cmp(&b.viol).unwrap())
        .expect("at least one evaluated sample");
    let max_abs_exact = rows.iter().map(|r| r.exact).fold(0.0, f64::max);
    let tol = grid.tolerance();
    Ok(ResidualReport {
        role: e.role,
        samples,
        skipped,
        max_violation: worst.viol,
        worst_x: worst.wx,
        worst_t: worst.wt,
        max_abs_exact,
        tol,
        pass: worst.viol <= tol && max_abs_exact <= tol,
    })
}
