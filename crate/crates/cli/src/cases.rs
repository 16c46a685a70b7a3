//! Envelope construction with calibrated constants, the entire-solution run
//! for each case, and its property checks.

use rdlab::entire::{
    check_asymptotics, check_band, check_m_condition, check_symmetry, check_time_monotonicity, construct_entire,
    AsymptoticForm, EntireConfig, EntireSolutionApprox, MCondition,
};
use rdlab::experiments::{Check, DecayBound};
use rdlab::front::{eigenvalues, fit_tail_constants, solve_front_bistable};
use rdlab::manifest::Manifest;
use rdlab::reaction::{CaseTag, StabilityConstants};
use rdlab::supersub::{
    build_envelope_annihilating, build_envelope_c1, build_envelope_c2, build_envelope_monostable, calibrate_constant,
    verify_inequality, AnnihilatingBand, Envelope, MonostableParams, MonostableVariant, Role, SandwichDirection,
    ShiftFunction, VerifyGrid,
};
use rdlab::{Error, Result};

use crate::config::{Constants, Resolved};

/// Spacing of the difference quotients used when certifying envelopes.
const VERIFY_DX: f64 = 0.01;

fn verify_grid(r: &Resolved, t_max: f64) -> Result<VerifyGrid> {
    let x = r.halfwidth.min(40.0);
    VerifyGrid::uniform((-x, x), 0.25, (-30.0, t_max), 0.5, VERIFY_DX)
}

pub fn parse_variant(s: Option<&str>) -> Result<MonostableVariant> {
    match s.unwrap_or("u3") {
        "u3" => Ok(MonostableVariant::U3),
        "u10" => Ok(MonostableVariant::U10),
        "u01" => Ok(MonostableVariant::U01),
        "u11" => Ok(MonostableVariant::U11),
        other => Err(Error::Config(format!("unknown variant '{other}' (u3 | u10 | u01 | u11)"))),
    }
}

pub struct EntireRun {
    pub approx: EntireSolutionApprox,
    pub constants: Constants,
    pub checks: Vec<Check>,
    pub diagnostics: Manifest,
    /// With b̄ or b̃ filled in.
    pub sc: StabilityConstants,
    pub bound: DecayBound,
    pub direction: SandwichDirection,
}

impl EntireRun {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

fn entire_config(r: &Resolved, start: Role) -> EntireConfig {
    let mut cfg = EntireConfig::new(&r.n_list, r.halfwidth, r.dx, r.t_end);
    cfg.dt = r.dt;
    cfg.boundary = r.boundary;
    cfg.scheme = r.scheme;
    cfg.start = start;
    cfg
}

fn calibrated(given: Option<f64>, what: &str, passes: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    match given {
        Some(v) => Ok(v),
        None => {
            let cal = calibrate_constant(passes).map_err(|e| Error::Construction(format!("calibrating {what}: {e}")))?;
            Ok(cal.value)
        }
    }
}

fn passes_both(f: &rdlab::reaction::ReactionTerm, g: &VerifyGrid, envs: &[&Envelope]) -> Result<bool> {
    for e in envs {
        if !verify_inequality(e, f, g)?.pass {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds the envelopes of the resolved case (calibrating any missing
/// amplitude), constructs the entire solution and runs its checks.
pub fn run_entire(r: &Resolved, given: &Constants, variant: MonostableVariant) -> Result<EntireRun> {
    let f = &r.f;
    let mut k = given.clone();
    let mut checks = Vec::new();
    let mut diag = Manifest::new();
    let mut sc = r.sc;
    let window = -r.n_list[0];

    let common = |a: &EntireSolutionApprox, checks: &mut Vec<Check>| {
        checks.push(Check::at_most("confinement", a.confinement.max_violation(), 1e-6));
        let ratio = a.cauchy_gaps.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        checks.push(Check::at_most("cauchy_gap_ratio", ratio, 1.0 - 1e-12));
    };

    let case = r.case.ok_or_else(|| Error::Config("a balanced term has no entire solution of these forms".into()))?;
    match case {
        CaseTag::C1 | CaseTag::C2 => {
            let p = solve_front_bistable(f, 1e-12)?;
            let e = eigenvalues(f, p.c())?;
            let tails = fit_tail_constants(&p, &e)?;
            let g = verify_grid(r, 0.0)?;
            let (sub, sup, x6) = if case == CaseTag::C1 {
                let m7 = calibrated(k.m7, "M7", |m| passes_both(f, &g, &[&build_envelope_c1(f, &p, m, 0.0)?.super_env]))?;
                k.m7 = Some(m7);
                let env = build_envelope_c1(f, &p, m7, 0.0)?;
                (env.sub_env, env.super_env, env.x6)
            } else {
                let mk = |m: f64| build_envelope_c2(f, &p, m, 0.0, ShiftFunction::p3_cap(p.c(), e.lambda1, m) - 1.0);
                let m8 = calibrated(k.m8, "M8", |m| {
                    let env = mk(m)?;
                    passes_both(f, &g, &[&env.super_env, &env.sub_env])
                })?;
                k.m8 = Some(m8);
                let env = mk(m8)?;
                (env.sub_env, env.super_env, env.x8)
            };
            let a = construct_entire(f, &sub, &sup, &entire_config(r, Role::Sub))?;
            common(&a, &mut checks);
            let mono = check_time_monotonicity(&a, 1.0, sc.theta)?;
            checks.push(Check::at_least("min_dt_u", mono.min_rate, -mono.tol));
            k.b_bar = k.b_bar.or(mono.b_bar);
            sc.b_bar = k.b_bar;
            let mc = check_m_condition(&a, f, &p, x6, MCondition::MPlus)?;
            checks.push(Check::at_least("m_plus_onset", mc.t_onset, window));
            let asy = check_asymptotics(&a, &p, AsymptoticForm::Expanding)?;
            checks.push(Check::at_most("backward_deviation_ratio", asy.early_deviation / asy.late_deviation, 1.0 - 1e-12));
            checks.push(Check::at_most("final_distance_to_1", asy.final_distance, 1e-3));
            diag.set_f64("c", p.c());
            diag.set_f64("x6", x6);
            diag.set_f64("y1", asy.y1);
            diag.set_f64("y2", asy.y2);
            diag.set_f64("m_plus_d", mc.d);
            let bound = DecayBound::Merging { m3: tails.m3, mu2: e.mu2, c: p.c(), x6 };
            Ok(finish(a, k, checks, diag, sc, bound, SandwichDirection::Increasing))
        }
        CaseTag::C3 | CaseTag::C4 => {
            let p = solve_front_bistable(f, 1e-12)?;
            let e = eigenvalues(f, p.c())?;
            let tails = fit_tail_constants(&p, &e)?;
            let m_dual = calibrated(k.m_dual, "annihilating shift amplitude", |m| {
                let env = build_envelope_annihilating(f, &p, 1.0, m)?;
                passes_both(f, &verify_grid(r, env.t_offset)?, &[&env.sub_env])
            })?;
            k.m_dual = Some(m_dual);
            let env = build_envelope_annihilating(f, &p, 1.0, m_dual)?;
            let a = construct_entire(f, &env.sub_env, &env.super_env, &entire_config(r, Role::Super))?;
            common(&a, &mut checks);
            let mono = check_time_monotonicity(&a, -1.0, sc.theta)?;
            checks.push(Check::at_most("max_dt_u", mono.max_rate, mono.tol));
            k.b_tilde = k.b_tilde.or(mono.b_tilde);
            sc.b_tilde = k.b_tilde;
            checks.push(Check::at_most("symmetry", check_symmetry(&a)?, 1e-10));
            let b = calibrated(k.b, "B", |b| Ok(check_band(&a, &AnnihilatingBand::new(&p, b)?, 0.0)?.pass))?;
            k.b = Some(b);
            let band = check_band(&a, &AnnihilatingBand::new(&p, b)?, 0.0)?;
            checks.push(Check::at_most("band_violation", band.max_violation, 0.0));
            let asy = check_asymptotics(&a, &p, AsymptoticForm::Annihilating)?;
            checks.push(Check::at_most("excess_over_fronts", asy.excess_over_fronts.unwrap_or(f64::INFINITY), 1e-6));
            checks.push(Check::at_most("final_sup_norm", asy.final_distance, 1e-3));
            let mc = check_m_condition(&a, f, &p, 0.0, MCondition::MMinus)?;
            checks.push(Check::at_least("m_minus_onset", mc.t_onset, window));
            diag.set_f64("c", p.c());
            diag.set_f64("t_offset", env.t_offset);
            diag.set_f64("band_t_max", band.t_max);
            diag.set_f64("m_minus_d", mc.d);
            let bound = DecayBound::Annihilating { m4: tails.m4, lambda1: e.lambda1, c: p.c() };
            Ok(finish(a, k, checks, diag, sc, bound, SandwichDirection::Decreasing))
        }
        CaseTag::Monostable => {
            let g = verify_grid(r, 0.0)?;
            let m9 = calibrated(k.m9, "M9", |m| {
                let env = build_envelope_monostable(f, variant, &MonostableParams { m9: m, ..Default::default() })?;
                passes_both(f, &g, &[&env.upper])
            })?;
            k.m9 = Some(m9);
            let prm = MonostableParams { m9, ..Default::default() };
            let env = build_envelope_monostable(f, variant, &prm)?;
            let a = construct_entire(f, &env.lower, &env.upper, &entire_config(r, Role::Sub))?;
            common(&a, &mut checks);
            let mono = check_time_monotonicity(&a, 1.0, sc.theta)?;
            checks.push(Check::at_least("min_dt_u", mono.min_rate, -mono.tol));
            k.b_bar = k.b_bar.or(mono.b_bar);
            sc.b_bar = k.b_bar;
            let c1 = prm.c1;
            let mu2 = eigenvalues(f, c1)?.mu2;
            diag.set_f64("c1", c1);
            diag.set_f64("c2", prm.c2);
            diag.set_f64("m10", env.m10);
            let bound = DecayBound::RateOnly { predicted: sc.v.abs().min((mu2 * c1).abs()) };
            Ok(finish(a, k, checks, diag, sc, bound, SandwichDirection::Increasing))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    approx: EntireSolutionApprox,
    constants: Constants,
    checks: Vec<Check>,
    diagnostics: Manifest,
    sc: StabilityConstants,
    bound: DecayBound,
    direction: SandwichDirection,
) -> EntireRun {
    EntireRun { approx, constants, checks, diagnostics, sc, bound, direction }
}
