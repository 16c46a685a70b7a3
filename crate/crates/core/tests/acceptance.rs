//! Acceptance criteria 1-12. Each prints one PASS/FAIL line; the test fails
//! if any criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rdlab::entire::{
    check_asymptotics, check_band, check_m_condition, check_symmetry, check_time_monotonicity, construct_entire,
    AsymptoticForm, EntireConfig, EntireSolutionApprox, MCondition,
};
use rdlab::evolve::{derivative_bounds, evolve, schauder_constants, Boundary, EvolveOptions, GridField};
use rdlab::experiments::{
    constant_convergence, diverging_pair, pattern_data, sandwich_envelopes, sandwich_stability, ConvergencePattern,
    DecayBound, DivergingPairSpec, PairKind, RunGrid, SandwichSetup,
};
use rdlab::front::{eigenvalues, fit_tail_constants, solve_front_bistable, solve_front_monostable, FrontProfile};
use rdlab::reaction::{compute_constants, ReactionTerm, StabilityConstants};
use rdlab::supersub::{
    build_envelope_annihilating, build_envelope_c1, build_envelope_c2, build_envelope_monostable, calibrate_constant,
    verify_inequality, AnnihilatingBand, Envelope, MonostableParams, MonostableVariant, ResidualReport, Role,
    SandwichDirection, SandwichParams, ShiftFunction, VerifyGrid,
};
use rdlab::Result;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict { pass, detail: detail.into() })
}

/// Envelope certification grid: |x| ≤ 40 step 0.25, t ∈ [−30, t_max] step 0.5, spacing 0.01.
fn envelope_grid(t_max: f64) -> VerifyGrid {
    VerifyGrid::uniform((-40.0, 40.0), 0.25, (-30.0, t_max), 0.5, 0.01).unwrap()
}

fn certified(e: &Envelope, f: &ReactionTerm, g: &VerifyGrid) -> Result<bool> {
    Ok(verify_inequality(e, f, g)?.pass)
}

fn describe(name: &str, r: &ResidualReport) -> String {
    format!("{name} {:?} viol {:.2e} exact {:.2e} tol {:.1e}", r.role, r.max_violation, r.max_abs_exact, r.tol)
}

fn clean(r: &ResidualReport) -> bool {
    r.pass && r.max_abs_exact <= r.tol
}

/// Shared constructions reused by several criteria.
struct Shared {
    c1_f: ReactionTerm,
    c1_front: FrontProfile,
    m7: f64,
    x6: f64,
    u1: Option<EntireSolutionApprox>,
    u1_elapsed: Duration,
    c4_f: ReactionTerm,
    c4_front: FrontProfile,
    m_dual: f64,
    u2: Option<EntireSolutionApprox>,
    b: Option<f64>,
}

impl Shared {
    fn new() -> Result<Self> {
        let c1_f = ReactionTerm::cubic(0.3)?;
        let c1_front = solve_front_bistable(&c1_f, 1e-12)?;
        let g = envelope_grid(0.0);
        let m7 = calibrate_constant(|m| certified(&build_envelope_c1(&c1_f, &c1_front, m, 0.0)?.super_env, &c1_f, &g))?.value;
        let x6 = build_envelope_c1(&c1_f, &c1_front, m7, 0.0)?.x6;
        let c4_f = ReactionTerm::cubic(0.7)?;
        let c4_front = solve_front_bistable(&c4_f, 1e-12)?;
        let m_dual = calibrate_constant(|m| {
            let env = build_envelope_annihilating(&c4_f, &c4_front, 1.0, m)?;
            certified(&env.sub_env, &c4_f, &envelope_grid(env.t_offset))
        })?
        .value;
        Ok(Self {
            c1_f,
            c1_front,
            m7,
            x6,
            u1: None,
            u1_elapsed: Duration::ZERO,
            c4_f,
            c4_front,
            m_dual,
            u2: None,
            b: None,
        })
    }

    fn u1(&mut self) -> Result<&EntireSolutionApprox> {
        if self.u1.is_none() {
            let start = Instant::now();
            let env = build_envelope_c1(&self.c1_f, &self.c1_front, self.m7, 0.0)?;
            let cfg = EntireConfig::new(&[10.0, 20.0, 30.0], 40.0, 0.05, 60.0);
            self.u1 = Some(construct_entire(&self.c1_f, &env.sub_env, &env.super_env, &cfg)?);
            self.u1_elapsed = start.elapsed();
        }
        Ok(self.u1.as_ref().unwrap())
    }

    fn u2(&mut self) -> Result<&EntireSolutionApprox> {
        if self.u2.is_none() {
            let env = build_envelope_annihilating(&self.c4_f, &self.c4_front, 1.0, self.m_dual)?;
            let mut cfg = EntireConfig::new(&[20.0, 30.0, 40.0], 40.0, 0.05, 60.0);
            cfg.start = Role::Super;
            self.u2 = Some(construct_entire(&self.c4_f, &env.sub_env, &env.super_env, &cfg)?);
        }
        Ok(self.u2.as_ref().unwrap())
    }

    /// Smallest B for which the band inequality holds on u₂.
    fn b(&mut self) -> Result<f64> {
        if self.b.is_none() {
            let p = self.c4_front.clone();
            let u2 = self.u2()?;
            let b = calibrate_constant(|b| Ok(check_band(u2, &AnnihilatingBand::new(&p, b)?, 0.0)?.pass))?.value;
            self.b = Some(b);
        }
        Ok(self.b.unwrap())
    }
}

fn criterion_1() -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    let mut oracle_residual: f64 = 0.0;
    for alpha in [0.2, 0.3, 0.4] {
        let c_exact = (1.0 - 2.0 * alpha) / SQRT_2;
        // φ = (1 + e^{−ξ/√2})^{−1}: φ' = φ(1−φ)/√2, φ'' = φ'(1−2φ)/√2
        for k in 0..=400 {
            let xi = -20.0 + 0.1 * k as f64;
            let phi = 1.0 / (1.0 + (-xi / SQRT_2).exp());
            let d1 = phi * (1.0 - phi) / SQRT_2;
            let d2 = d1 * (1.0 - 2.0 * phi) / SQRT_2;
            let res = d2 - c_exact * d1 + phi * (1.0 - phi) * (phi - alpha);
            oracle_residual = oracle_residual.max(res.abs());
        }
        let start = Instant::now();
        let p = solve_front_bistable(&ReactionTerm::cubic(alpha)?, 1e-12)?;
        slowest = slowest.max(start.elapsed());
        worst = worst.max((p.c() - c_exact).abs());
    }
    verdict(
        worst < 1e-4 && oracle_residual < 1e-14 && slowest < Duration::from_secs(5),
        format!("max |c − (1−2α)/√2| = {worst:.2e}, oracle residual {oracle_residual:.1e}, slowest {slowest:.2?}"),
    )
}

fn criterion_2() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    let mut min_margin = f64::INFINITY;
    for k in 0..20 {
        let alpha = loop {
            let a: f64 = rng.random_range(0.1..0.9);
            if (a - 0.5).abs() > 0.03 {
                break a;
            }
        };
        let (f, integral) = if k % 2 == 0 {
            (ReactionTerm::cubic(alpha)?, (1.0 - 2.0 * alpha) / 12.0)
        } else {
            let kk: f64 = rng.random_range(1.5..4.0);
            // ∫₀¹ u(1−u)(u−α)(k−u) du by Simpson on a fine grid
            let n = 2000;
            let g = |u: f64| u * (1.0 - u) * (u - alpha) * (kk - u);
            let h = 1.0 / n as f64;
            let s: f64 = (0..=n)
                .map(|i| {
                    let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    w * g(i as f64 * h)
                })
                .sum();
            (ReactionTerm::quartic(alpha, kk)?, s * h / 3.0)
        };
        if integral.abs() < 1e-4 {
            continue;
        }
        let c = solve_front_bistable(&f, 1e-12)?.c();
        if c.signum() != integral.signum() {
            mismatches += 1;
        }
        min_margin = min_margin.min(c.abs());
    }
    let balanced = solve_front_bistable(&ReactionTerm::cubic(0.5)?, 1e-12)?.c();
    verdict(
        mismatches == 0 && balanced.abs() < 1e-6,
        format!("{mismatches} sign mismatches in 20 terms (min |c| {min_margin:.2e}), balanced |c| = {:.1e}", balanced.abs()),
    )
}

fn criterion_3() -> Result<Verdict> {
    let f = ReactionTerm::fisher();
    let c_min = f.c_min().unwrap_or(f64::NAN);
    let formula = 2.0 * f.f_prime(0.0).sqrt();
    let rejected = solve_front_monostable(&f, 1.0).is_err() && solve_front_monostable(&f, 1.99).is_err();
    let at_min = solve_front_monostable(&f, c_min).is_ok();
    verdict(
        (c_min - 2.0).abs() <= 1e-6 && (formula - 2.0).abs() <= 1e-12 && rejected && at_min,
        format!("c_min = {c_min:.9}, below-minimum requests rejected: {rejected}"),
    )
}

fn criterion_4() -> Result<Verdict> {
    let f = ReactionTerm::cubic(0.3)?;
    let p = std::sync::Arc::new(solve_front_bistable(&f, 1e-12)?);
    let u0 = GridField::symmetric(30.0, 0.05, 0.0, |x| p.eval(x))?;
    let edge = std::sync::Arc::clone(&p);
    let opts = EvolveOptions::every(0.0, 3.0, 0.05).with_boundary(Boundary::Dirichlet(std::sync::Arc::new(move |x, t| edge.wave(x, t))));
    let tr = evolve(&u0, &f, 3.0, &opts)?;
    let r = derivative_bounds(&tr, &f, 1.0)?;
    let (l2_unit, _, _) = schauder_constants(1.0, 1.0, 1.0);
    let l2_err = (l2_unit - 3.0 / PI.sqrt()).abs();
    let ok = r.observed_sup_ux <= r.l2 && r.observed_sup_uxx <= r.l3 && r.observed_sup_ut <= r.l4 && l2_err < 1e-12;
    verdict(
        ok,
        format!(
            "sup u_x {:.3} ≤ L2 {:.3}, sup u_xx {:.3} ≤ L3 {:.3}, sup u_t {:.3} ≤ L4 {:.3}; L2(1,1,1) error {l2_err:.1e}",
            r.observed_sup_ux, r.l2, r.observed_sup_uxx, r.l3, r.observed_sup_ut, r.l4
        ),
    )
}

fn criterion_5() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst, mut order_ok, mut slope_ok) = (0.0_f64, true, true);
    let mut max_gap = f64::NEG_INFINITY;
    for _ in 0..10 {
        let c: f64 = rng.random_range(0.05..1.0);
        let lambda1: f64 = rng.random_range(0.3..2.0);
        let m8: f64 = rng.random_range(0.1..3.0);
        let p0 = ShiftFunction::p3_cap(c, lambda1, m8) - rng.random_range(0.1..3.0);
        let s = ShiftFunction::p3(c, lambda1, m8, p0)?;
        let x8 = s.x8()?;
        for k in 0..=50 {
            let t = -(k as f64);
            let closed = s.eval(t)?;
            worst = worst.max((closed - s.eval_numeric(t)?).abs());
            order_ok &= closed > c * t + x8;
            max_gap = max_gap.max(closed - c * t - x8);
            slope_ok &= s.derivative(t)? > 0.0;
        }
    }
    verdict(
        worst <= 1e-8 && order_ok && slope_ok,
        format!(
            "max |closed − numeric| = {worst:.2e}, p3 > ct + x8: {order_ok} (max of p3 − ct − x8 is {max_gap:.2e}), p3' > 0: {slope_ok}"
        ),
    )
}

fn criterion_6(sh: &mut Shared) -> Result<Verdict> {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut record = |name: &str, r: ResidualReport| {
        ok &= clean(&r);
        parts.push(describe(name, &r));
    };

    let f1 = sh.c1_f.clone();
    let g = envelope_grid(0.0);
    let env = build_envelope_c1(&f1, &sh.c1_front, sh.m7, 0.0)?;
    record("C1", verify_inequality(&env.super_env, &f1, &g)?);
    record("C1", verify_inequality(&env.sub_env, &f1, &g)?);

    let f2 = ReactionTerm::quartic(0.4, 2.0)?;
    let p2 = solve_front_bistable(&f2, 1e-12)?;
    let lambda1 = eigenvalues(&f2, p2.c())?.lambda1;
    let mk = |m: f64| build_envelope_c2(&f2, &p2, m, 0.0, ShiftFunction::p3_cap(p2.c(), lambda1, m) - 1.0);
    let m8 = calibrate_constant(|m| {
        let e = mk(m)?;
        Ok(certified(&e.super_env, &f2, &g)? && certified(&e.sub_env, &f2, &g)?)
    })?
    .value;
    let env2 = mk(m8)?;
    record("C2", verify_inequality(&env2.super_env, &f2, &g)?);
    record("C2", verify_inequality(&env2.sub_env, &f2, &g)?);

    let f4 = sh.c4_f.clone();
    let env4 = build_envelope_annihilating(&f4, &sh.c4_front, 1.0, sh.m_dual)?;
    let g4 = envelope_grid(env4.t_offset);
    record("annihilating", verify_inequality(&env4.super_env, &f4, &g4)?);
    record("annihilating", verify_inequality(&env4.sub_env, &f4, &g4)?);

    let fm = ReactionTerm::fisher();
    let m9 = calibrate_constant(|m| {
        let e = build_envelope_monostable(&fm, MonostableVariant::U11, &MonostableParams { m9: m, ..Default::default() })?;
        certified(&e.upper, &fm, &g)
    })?
    .value;
    for variant in [MonostableVariant::U3, MonostableVariant::U11] {
        let e = build_envelope_monostable(&fm, variant, &MonostableParams { m9, ..Default::default() })?;
        record(&format!("{variant:?}"), verify_inequality(&e.upper, &fm, &g)?);
        record(&format!("{variant:?}"), verify_inequality(&e.lower, &fm, &g)?);
    }

    // sandwich around u₁, sampled on grid nodes with the grid spacing
    let mut sc = compute_constants(&f1)?;
    let u1 = sh.u1()?;
    sc.b_bar = check_time_monotonicity(u1, 1.0, sc.theta)?.b_bar;
    let setup = SandwichSetup::new(0.02, SandwichDirection::Increasing);
    let prm = SandwichParams::new(&sc, setup.delta, setup.direction)?;
    let (sup, sub) = sandwich_envelopes(u1, &prm, &setup)?;
    let gs = VerifyGrid::uniform((-20.0, 20.0), 0.5, (0.5, 29.5), 0.5, 0.05)?;
    let (rs, rb) = (verify_inequality(&sup, &f1, &gs)?, verify_inequality(&sub, &f1, &gs)?);
    let b = sh.b()?;
    record("sandwich", rs);
    record("sandwich", rb);
    verdict(
        ok,
        format!("M7 = {:.4}, M8 = {m8:.4}, M9 = {m9:.1e}, M_dual = {:.4}, B = {b:.4}; {}", sh.m7, sh.m_dual, parts.join("; ")),
    )
}

fn criterion_7(sh: &mut Shared) -> Result<Verdict> {
    let f = sh.c1_f.clone();
    let p = sh.c1_front.clone();
    let x6 = sh.x6;
    sh.u1()?;
    let elapsed = sh.u1_elapsed;
    let u1 = sh.u1()?;
    let sc = compute_constants(&f)?;
    let confinement = u1.confinement.max_violation();
    let mono = check_time_monotonicity(u1, 1.0, sc.theta)?;
    let mc = check_m_condition(u1, &f, &p, x6, MCondition::MPlus)?;
    let asy = check_asymptotics(u1, &p, AsymptoticForm::Expanding)?;
    let ok = confinement <= 1e-6
        && u1.gaps_decreasing()
        && mono.min_rate > -1e-6
        && mc.pass
        && asy.final_distance < 1e-3
        && asy.final_time <= 60.0
        && elapsed < Duration::from_secs(300);
    verdict(
        ok,
        format!(
            "confinement {confinement:.1e}, gaps {:?}, min u_t {:.1e}, M+ {}, ‖u−1‖ {:.1e} at T = {}, build {elapsed:.1?}",
            u1.cauchy_gaps.iter().map(|g| format!("{g:.1e}")).collect::<Vec<_>>(),
            mono.min_rate,
            mc.pass,
            asy.final_distance,
            asy.final_time
        ),
    )
}

fn criterion_8(sh: &mut Shared) -> Result<Verdict> {
    let b = sh.b()?;
    let p = sh.c4_front.clone();
    let u2 = sh.u2()?;
    let sym = check_symmetry(u2)?;
    let asy = check_asymptotics(u2, &p, AsymptoticForm::Annihilating)?;
    let excess = asy.excess_over_fronts.unwrap_or(f64::INFINITY);
    let band = check_band(u2, &AnnihilatingBand::new(&p, b)?, 0.0)?;
    let ok = sym <= 1e-10 && excess <= 1e-6 && band.pass && asy.final_distance < 1e-3 && asy.final_time <= 60.0;
    verdict(
        ok,
        format!(
            "symmetry {sym:.1e}, excess over fronts {excess:.1e}, band (B = {b:.4}, t ∈ [{:.1}, {:.1}]) violation {:.1e}, ‖u‖ {:.1e} at T = {}",
            band.t_min, band.t_max, band.max_violation, asy.final_distance, asy.final_time
        ),
    )
}

fn criterion_9(sh: &mut Shared) -> Result<Verdict> {
    let f = sh.c1_f.clone();
    let p = sh.c1_front.clone();
    let x6 = sh.x6;
    let u1 = sh.u1()?;
    let e = eigenvalues(&f, p.c())?;
    let tails = fit_tail_constants(&p, &e)?;
    let mut sc: StabilityConstants = compute_constants(&f)?;
    sc.b_bar = check_time_monotonicity(u1, 1.0, sc.theta)?.b_bar;
    let setup = SandwichSetup::new(0.02, SandwichDirection::Increasing);
    let bound = DecayBound::Merging { m3: tails.m3, mu2: e.mu2, c: p.c(), x6 };
    let r = sandwich_stability(&f, u1, &sc, &setup, bound)?;
    let predicted = sc.v.abs().min((e.mu2 * p.c()).abs());
    let rate = r.stability.fitted_rate;
    verdict(
        r.sandwich_violation <= 1e-6 && rate >= 0.8 * predicted,
        format!(
            "sandwich violation {:.1e}, fitted rate {rate:.4} vs 0.8·min(|v|, |μ2c|) = {:.4}",
            r.sandwich_violation,
            0.8 * predicted
        ),
    )
}

fn criterion_10() -> Result<Verdict> {
    let f = ReactionTerm::cubic(0.3)?;
    let p = solve_front_bistable(&f, 1e-12)?;
    let grid = RunGrid::new(70.0, 0.05, 60.0);
    let wide = diverging_pair(&f, &p, &DivergingPairSpec { kind: PairKind::Bump, margin: 0.1, half_width: 30.0 }, &grid, true)?;
    let narrow = diverging_pair(&f, &p, &DivergingPairSpec { kind: PairKind::Bump, margin: 0.1, half_width: 0.5 }, &grid, false)?;
    let (el, er) = wide.speed_errors;
    verdict(
        el <= 0.02 && er <= 0.02 && wide.pass && narrow.pass,
        format!(
            "speeds {:.6}, {:.6} vs ∓{:.6} (errors {el:.1e}, {er:.1e}); narrow bump {:?} with final sup {:.1e}",
            wide.left_speed,
            wide.right_speed,
            p.c(),
            narrow.outcome,
            narrow.stability.final_deviation
        ),
    )
}

fn criterion_11() -> Result<Verdict> {
    let grid = RunGrid::new(30.0, 0.1, 60.0);
    let mut ok = true;
    let mut parts = Vec::new();
    for which in ConvergencePattern::ALL {
        let alpha = if which == ConvergencePattern::FarBelow { 0.7 } else { 0.3 };
        let f = ReactionTerm::cubic(alpha)?;
        let u0 = pattern_data(&f, which, &grid)?;
        let r = constant_convergence(&f, &u0, which, &grid)?;
        let rel = (r.fitted_rate - r.predicted_rate).abs() / r.predicted_rate;
        ok &= r.pass && r.final_deviation < 1e-3 && rel <= 0.3;
        parts.push(format!("{} (α = {alpha}) rate {:.4} vs {:.4}, final {:.1e}", which.id(), r.fitted_rate, r.predicted_rate, r.final_deviation));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_12() -> Result<Verdict> {
    let f = ReactionTerm::fisher();
    let prm = MonostableParams { m9: 1e-6, ..Default::default() };
    let mut parts = Vec::new();
    let mut ok = true;
    for variant in [MonostableVariant::U3, MonostableVariant::U11] {
        let env = build_envelope_monostable(&f, variant, &prm)?;
        let cfg = EntireConfig::new(&[10.0, 20.0, 30.0], 110.0, 0.05, 5.0);
        let a = construct_entire(&f, &env.lower, &env.upper, &cfg)?;
        let v = a.confinement.max_violation();
        ok &= v <= 1e-6;
        parts.push(format!("{variant:?} confinement {v:.1e}"));
    }
    let env = build_envelope_monostable(&f, MonostableVariant::U11, &prm)?;
    // separable logistic oracle: ρ(t) = 1/(1 + (1/ρ₀ − 1)e^{−t})
    let k = 1.0 / prm.rho0 - 1.0;
    let (mut logistic, mut gap_ok) = (0.0_f64, true);
    for i in 0..=3000 {
        let t = -30.0 + 0.01 * i as f64;
        let rho = env.rho.eval(t);
        logistic = logistic.max((rho - 1.0 / (1.0 + k * (-t).exp())).abs());
        let gap = rho - env.nu0 * t.exp();
        gap_ok &= gap > 0.0 && gap <= env.m10 * t.exp();
    }
    ok &= logistic <= 1e-8 && gap_ok;
    parts.push(format!("ρ vs logistic {logistic:.1e}, 0 < ρ − ν ≤ M10 e^t with M10 = {:.4}: {gap_ok}", env.m10));
    verdict(ok, parts.join("; "))
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut shared = Shared::new();
    let mut results: Vec<(usize, Result<Verdict>)> = Vec::new();
    let mut run = |n: usize, r: Result<Verdict>| {
        let line = match &r {
            Ok(v) => format!("{} criterion {n}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail),
            Err(e) => format!("FAIL criterion {n}: error: {e}"),
        };
        println!("{line}");
        results.push((n, r));
    };
    run(1, criterion_1());
    run(2, criterion_2());
    run(3, criterion_3());
    run(4, criterion_4());
    run(5, criterion_5());
    match shared.as_mut() {
        Ok(sh) => {
            run(6, criterion_6(sh));
            run(7, criterion_7(sh));
            run(8, criterion_8(sh));
            run(9, criterion_9(sh));
        }
        Err(e) => {
            for n in 6..=9 {
                run(n, Err(rdlab::Error::Construction(format!("shared setup: {e}"))));
            }
        }
    }
    run(10, criterion_10());
    run(11, criterion_11());
    run(12, criterion_12());
    let failed: Vec<usize> = results.iter().filter(|(_, r)| !matches!(r, Ok(v) if v.pass)).map(|(n, _)| *n).collect();
    println!("acceptance: {} of 12 passed in {:.1?}", 12 - failed.len(), start.elapsed());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
