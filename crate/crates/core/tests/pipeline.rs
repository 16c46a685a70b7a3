use rdlab::entire::{check_time_monotonicity, construct_entire, EntireConfig};
use rdlab::experiments::{front_stability, FrontOrientation, Perturbation, RunGrid};
use rdlab::front::{eigenvalues, fit_tail_constants, solve_front_bistable, solve_front_monostable};
use rdlab::reaction::{compute_constants, ReactionTerm};
use rdlab::supersub::{build_envelope_c1, build_envelope_monostable, MonostableParams, MonostableVariant};

#[test]
fn coarse_c1_entire_solution() {
    let f = ReactionTerm::cubic(0.3).unwrap();
    let p = solve_front_bistable(&f, 1e-12).unwrap();
    let env = build_envelope_c1(&f, &p, std::f64::consts::SQRT_2, 0.0).unwrap();
    let cfg = EntireConfig::new(&[10.0, 20.0], 30.0, 0.1, 20.0);
    let a = construct_entire(&f, &env.sub_env, &env.super_env, &cfg).unwrap();
    assert!(a.confinement.max_violation() <= 1e-6);
    assert!(a.gaps_decreasing());
    let sc = compute_constants(&f).unwrap();
    let mono = check_time_monotonicity(&a, 1.0, sc.theta).unwrap();
    assert!(mono.pass && mono.b_bar.unwrap() > 0.0);
    assert!(a.deliverable().last().sup_distance_to(1.0) < 1e-3);
}

#[test]
fn tails_and_eigenvalues_agree() {
    let f = ReactionTerm::cubic(0.3).unwrap();
    let p = solve_front_bistable(&f, 1e-12).unwrap();
    let e = eigenvalues(&f, p.c()).unwrap();
    // for the cubic the front is logistic in ξ/√2, so both tails decay like e^{∓ξ/√2}
    assert!((e.lambda1 - 1.0 / 2f64.sqrt()).abs() < 1e-8);
    assert!((e.mu2 + 1.0 / 2f64.sqrt()).abs() < 1e-8);
    let t = fit_tail_constants(&p, &e).unwrap();
    assert!(t.m3 > 0.0 && t.m4 > 0.0);
}

#[test]
fn front_perturbation_decays_on_coarse_grid() {
    let f = ReactionTerm::cubic(0.3).unwrap();
    let p = solve_front_bistable(&f, 1e-12).unwrap();
    let grid = RunGrid::new(20.0, 0.1, 20.0);
    let r = front_stability(&f, &p, FrontOrientation::Forward, Perturbation::seeded(0.05, 0), &grid).unwrap();
    assert!(r.final_deviation < 1e-3);
    assert!(r.series.first().unwrap().1 > r.final_deviation);
}

#[test]
fn monostable_fronts_and_envelopes() {
    let f = ReactionTerm::fisher();
    assert!(solve_front_monostable(&f, 1.5).is_err());
    let p = solve_front_monostable(&f, 2.5).unwrap();
    assert!((p.c() - 2.5).abs() < 1e-12);
    let e = build_envelope_monostable(&f, MonostableVariant::U10, &MonostableParams::default()).unwrap();
    for t in [-10.0, -1.0, 0.0] {
        for x in [-20.0, 0.0, 20.0] {
            assert!(e.lower.eval(x, t) <= e.upper.eval(x, t) + 1e-12);
        }
    }
}
