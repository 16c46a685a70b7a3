use proptest::prelude::*;

use rdlab::evolve::{comparison_check, evolve, EvolveOptions, GridField};
use rdlab::experiments::{rate_fit, FitWindow};
use rdlab::front::solve_front_bistable;
use rdlab::manifest::fmt_f64;
use rdlab::numerics::tridiag::Tridiagonal;
use rdlab::reaction::{compute_constants, ReactionTerm};
use rdlab::supersub::calibrate::CALIBRATION_RATIO;
use rdlab::supersub::{calibrate_constant, SandwichDirection, SandwichParams, ShiftFunction};

fn alpha() -> impl Strategy<Value = f64> {
    (0.1..0.9f64).prop_filter("away from balance", |a| (a - 0.5).abs() > 0.02)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cubic_zeros_and_integral(a in 0.05..0.95f64) {
        let f = ReactionTerm::cubic(a).unwrap();
        for z in [0.0, a, 1.0] {
            prop_assert!(f.f(z).abs() < 1e-14);
        }
        prop_assert!((f.integral() - (1.0 - 2.0 * a) / 12.0).abs() < 1e-12);
    }

    #[test]
    fn collar_constants(a in alpha(), k in 1.2..4.0f64, quartic in any::<bool>()) {
        let f = if quartic { ReactionTerm::quartic(a, k).unwrap() } else { ReactionTerm::cubic(a).unwrap() };
        let sc = compute_constants(&f).unwrap();
        prop_assert!(sc.w > 0.0 && sc.v < 0.0 && sc.theta > 0.0 && sc.b > 0.0);
        for i in 0..=200 {
            let s = i as f64 / 200.0;
            for u in [-sc.theta + 3.0 * sc.theta * s, 1.0 - 2.0 * sc.theta + 3.0 * sc.theta * s] {
                prop_assert!(f.f_prime(u) < 0.0, "f'({u}) = {}", f.f_prime(u));
                prop_assert!(f.f_prime(u) <= sc.v + 1e-12);
            }
        }
    }

    #[test]
    fn front_is_monotone_and_normalized(a in alpha()) {
        let f = ReactionTerm::cubic(a).unwrap();
        let p = solve_front_bistable(&f, 1e-10).unwrap();
        prop_assert!((p.eval(0.0) - 0.5).abs() < 1e-8);
        prop_assert!(p.phi_table().windows(2).all(|w| w[1] >= w[0] - 1e-14));
        prop_assert!(p.c().signum() == f.integral().signum());
    }

    #[test]
    fn shift_derivative_matches_difference_quotient(
        c in 0.05..1.0f64, lambda1 in 0.3..2.0f64, m in 0.1..3.0f64, back in 0.1..3.0f64, t in -40.0..0.0f64
    ) {
        let p0 = ShiftFunction::p3_cap(c, lambda1, m) - back;
        let s = ShiftFunction::p3(c, lambda1, m, p0).unwrap();
        let h = 1e-5;
        let fd = (s.eval(t + h).unwrap() - s.eval(t - h).unwrap()) / (2.0 * h);
        prop_assert!((fd - s.derivative(t).unwrap()).abs() < 1e-6);
        let p1 = ShiftFunction::p1(c, lambda1, m, p0).unwrap();
        prop_assert!(p1.derivative(t).unwrap() >= c);
    }

    #[test]
    fn sandwich_shift_grows_to_its_cap(a in alpha(), q0 in 0.0..1.0f64, b_rate in 0.01..1.0f64) {
        let f = ReactionTerm::cubic(a).unwrap();
        let sc = compute_constants(&f).unwrap();
        let prm = SandwichParams::with_rate(&sc, q0 * sc.theta, SandwichDirection::Increasing, b_rate).unwrap();
        let mut last = prm.gamma(0.0);
        for k in 1..200 {
            let t = 0.25 * k as f64;
            let g = prm.gamma(t);
            prop_assert!(g >= last - 1e-15 && g <= prm.gamma_max() + 1e-15);
            prop_assert!(prm.q(t) <= prm.q(t - 0.25) + 1e-15);
            last = g;
        }
    }

    #[test]
    fn tridiagonal_solve_residual(n in 2usize..60, seed in 0u64..1000) {
        let v = |i: usize, s: u64| (((i as u64 + 1) * 2654435761 ^ s) % 1000) as f64 / 1000.0;
        let a: Vec<f64> = (0..n).map(|i| -v(i, seed)).collect();
        let c: Vec<f64> = (0..n).map(|i| -v(i + n, seed)).collect();
        let b: Vec<f64> = (0..n).map(|i| 2.5 + v(i + 2 * n, seed)).collect();
        let d: Vec<f64> = (0..n).map(|i| v(i + 3 * n, seed) - 0.5).collect();
        let mut x = d.clone();
        Tridiagonal::new(&a, &b, &c).unwrap().solve_in_place(&mut x);
        for i in 0..n {
            let mut r = b[i] * x[i] - d[i];
            if i > 0 { r += a[i] * x[i - 1]; }
            if i + 1 < n { r += c[i] * x[i + 1]; }
            prop_assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn decimal_text_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn binary_snapshot_round_trips(vals in prop::collection::vec(-2.0..2.0f64, 3..40), t in -50.0..50.0f64) {
        let g = GridField { x0: -1.0, dx: 0.1, t, u: vals };
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        let back = GridField::read_binary(&buf[..]).unwrap();
        prop_assert_eq!(back.u, g.u);
        prop_assert_eq!(back.t, g.t);
    }

    #[test]
    fn rate_fit_recovers_exponentials(rate in 0.01..2.0f64, pre in 1e-3..1e3f64) {
        let series: Vec<(f64, f64)> = (0..100).map(|k| (0.2 * k as f64, pre * (-rate * 0.2 * k as f64).exp())).collect();
        let fit = rate_fit(&series, FitWindow::Full).unwrap();
        prop_assert!((fit.decay_rate() - rate).abs() < 1e-9 * rate.max(1.0));
    }

    #[test]
    fn calibration_brackets_threshold(threshold in 2e-6..500.0f64) {
        let cal = calibrate_constant(|m| Ok(m >= threshold)).unwrap();
        prop_assert!(cal.value >= threshold && cal.value <= threshold * CALIBRATION_RATIO * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn evolution_preserves_order_and_range(a in alpha(), lo in 0.0..0.5f64, gap in 0.0..0.5f64, width in 0.5..4.0f64) {
        let f = ReactionTerm::cubic(a).unwrap();
        let lower = GridField::symmetric(10.0, 0.1, 0.0, |x| lo * (-x * x / width).exp()).unwrap();
        let upper = lower.with_values(lower.u.iter().map(|v| (v + gap).min(1.0)).collect());
        let opts = EvolveOptions::every(0.0, 3.0, 0.5);
        let rep = comparison_check(&lower, &upper, &f, 3.0, &opts).unwrap();
        prop_assert!(rep.pass, "violation {}", rep.max_violation);
        let tr = evolve(&upper, &f, 3.0, &opts).unwrap();
        for s in &tr.snapshots {
            prop_assert!(s.u.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
        }
    }
}
