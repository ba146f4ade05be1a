use mfw_core::analysis::{
    compute_reference, measured_c_lower, merit_series, verify_inequalities, CertificateConstants,
    Check, CheckStatus, ReferenceMode,
};
use mfw_core::numerics;
use mfw_core::presets::{preset, Preset, PRESET_NAMES};
use mfw_core::solver::step_size;
use mfw_core::{
    run, solve_minmax, Error, MultiObjective, NormBall, QuadraticComponent, RunConfig, RunHistory,
    StartPoint, Termination,
};

fn solved(name: &str) -> (Preset, RunHistory) {
    let p = preset(name).unwrap();
    let h = run(&p.objective, &p.set, &p.config).unwrap();
    (p, h)
}

#[test]
fn every_preset_satisfies_the_iterate_invariants() {
    for name in PRESET_NAMES {
        let (p, h) = solved(name);
        for (i, r) in h.records.iter().enumerate() {
            assert_eq!(r.k, i);
            assert!(r.theta_fw <= 0.0, "{name} k={i}");
            assert!(p.set.contains(&r.x, 1e-8), "{name} k={i}");
        }
        for w in h.records.windows(2) {
            let g = w[0].gamma.unwrap();
            assert!(g > 0.0 && g <= 1.0);
            for j in 0..2 {
                let slack = 1e-10 * (1.0 + w[0].f_values[j].abs());
                assert!(w[1].f_values[j] <= w[0].f_values[j] + w[0].theta_fw * g / 2.0 + slack);
            }
        }
        assert!(h.last().gamma.is_none());
        let first = h.records[0].theta_fw.abs();
        assert!(h.termination == Termination::Converged || h.last().theta_fw.abs() < 1e-3 * first);
    }
}

#[test]
fn every_preset_passes_verification() {
    for name in PRESET_NAMES {
        let (p, h) = solved(name);
        let r = compute_reference(&p.objective, &p.set, &p.reference).unwrap();
        let report = verify_inequalities(&h, &p.objective, &p.set, &r).unwrap();
        assert!(report.passed(), "{name}\n{report}");
    }
}

#[test]
fn uniform_convexity_checks_run_on_ball_presets() {
    for name in ["3", "4"] {
        let (p, h) = solved(name);
        let r = compute_reference(&p.objective, &p.set, &p.reference).unwrap();
        let report = verify_inequalities(&h, &p.objective, &p.set, &r).unwrap();
        for c in [Check::UniformGap, Check::UniformRecursion] {
            assert!(matches!(report.status(c), CheckStatus::Passed { .. }), "{name}");
        }
    }
    let (p, h) = solved("1b");
    let r = compute_reference(&p.objective, &p.set, &p.reference).unwrap();
    let report = verify_inequalities(&h, &p.objective, &p.set, &r).unwrap();
    assert!(matches!(report.status(Check::DistanceBound), CheckStatus::Passed { .. }));
    assert!(matches!(report.status(Check::UniformGap), CheckStatus::Skipped(_)));
}

#[test]
fn doubled_step_is_detected() {
    let p = preset("1a").unwrap();
    let short = RunConfig {
        max_iters: 40,
        ..p.config.clone()
    };
    let h = run(&p.objective, &p.set, &short).unwrap();
    let k = (5..h.records.len() - 1)
        .find(|&k| h.records[k].gamma.unwrap() <= 0.5)
        .unwrap();
    let x = h.records[k].x.clone();
    let g = p.objective.gradients(&x).unwrap();
    let sub = solve_minmax(&g, &x, &p.set, 1e-10).unwrap();
    let gamma = 2.0 * step_size(sub.theta_fw, numerics::dot(&sub.d_fw, &sub.d_fw), 1.0);
    let mut next = x.clone();
    numerics::axpy(gamma, &sub.d_fw, &mut next);
    let tail_cfg = RunConfig {
        max_iters: 10,
        x0: StartPoint::Given(next),
        ..p.config.clone()
    };
    let tail = run(&p.objective, &p.set, &tail_cfg).unwrap();

    let mut corrupted = h.clone();
    corrupted.records.truncate(k + 1);
    corrupted.records[k].gamma = Some(gamma);
    for mut r in tail.records {
        r.k += k + 1;
        corrupted.records.push(r);
    }
    let r = compute_reference(&p.objective, &p.set, &p.reference).unwrap();
    let report = verify_inequalities(&corrupted, &p.objective, &p.set, &r).unwrap();
    match report.status(Check::Descent) {
        CheckStatus::Failed { violations, .. } => assert_eq!(violations, &vec![k]),
        other => panic!("descent not flagged: {other:?}"),
    }
    assert!(!report.passed());
}

#[test]
fn inflated_reference_values_are_flagged() {
    let (p, h) = solved("1a");
    let mut r = compute_reference(&p.objective, &p.set, &p.reference).unwrap();
    r.f_star.iter_mut().for_each(|v| *v += 1e-3);
    let m = merit_series(&h, &r).unwrap();
    assert!(!m.negative.is_empty());
}

#[test]
fn merit_is_monotone_and_starts_below_the_universal_bound() {
    for name in PRESET_NAMES {
        let (p, h) = solved(name);
        let r = compute_reference(&p.objective, &p.set, &p.reference).unwrap();
        let m = merit_series(&h, &r).unwrap();
        assert!(m.h_hat.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{name}");
        assert!(m.h_hat.iter().all(|v| *v >= -1e-9));
        assert!(m.h_hat[1] <= 2.0);
    }
}

#[test]
fn history_at_the_reference_has_zero_merit() {
    let (p, h) = solved("4");
    let r = compute_reference(&p.objective, &p.set, &p.reference).unwrap();
    let m = merit_series(&h, &r).unwrap();
    assert_eq!(h.last().x, r.x_star);
    assert_eq!(*m.h_hat.last().unwrap(), 0.0);
}

#[test]
fn merit_rejects_foreign_reference() {
    let (_, h) = solved("1a");
    let q = preset("3").unwrap();
    let r = compute_reference(&q.objective, &q.set, &q.reference).unwrap();
    assert!(matches!(merit_series(&h, &r), Err(Error::InvalidPairing(_))));
}

#[test]
fn example_three_stays_below_the_strongly_convex_envelope() {
    let (p, h) = solved("3");
    let r = compute_reference(&p.objective, &p.set, &p.reference).unwrap();
    let m = merit_series(&h, &r).unwrap();
    let c = CertificateConstants {
        alpha: 1.0,
        q: 2.0,
        mu: 1.0,
        l: 1.0,
        diameter: 2.0,
        c_lower: 0.0,
    };
    for k in 1..m.len() {
        assert!(m.h_hat[k] <= c.strongly_convex_envelope(k).unwrap() * (1.0 + 1e-12), "k={k}");
    }
}

#[test]
fn example_four_contracts_at_the_theta_tilde_rate() {
    let (p, h) = solved("4");
    let c_lower = measured_c_lower(&h).unwrap();
    assert!(c_lower >= 0.1 - 1e-6);
    let r = compute_reference(&p.objective, &p.set, &p.reference).unwrap();
    let m = merit_series(&h, &r).unwrap();
    let c = CertificateConstants {
        alpha: 1.0,
        q: 2.0,
        mu: 0.0,
        l: 1.0,
        diameter: 2.0,
        c_lower,
    };
    for w in m.h_hat.windows(2) {
        assert!(w[1] <= c.contraction_factor() * w[0] + 1e-15);
    }
    for k in 1..m.len() {
        assert!(m.h_hat[k] <= c.theta_tilde_envelope(k).unwrap());
    }
}

#[test]
fn refined_reference_of_a_single_objective_is_its_center() {
    let b = [0.2, -0.3];
    let f = MultiObjective::quadratic(vec![QuadraticComponent::shifted_identity(&b)]).unwrap();
    let set = NormBall::unit(2.0, 2).unwrap().into();
    let r = compute_reference(&f, &set, &ReferenceMode::refine_from(StartPoint::Default)).unwrap();
    assert!(numerics::dist2(&r.x_star, &b) < 1e-6);
}

#[test]
fn refined_reference_of_example_1a_is_partial() {
    // the O(1/k) run cannot reach |θ| <= 1e-13; the partial point still
    // approaches the boundary Pareto point
    let p = preset("1a").unwrap();
    let mode = ReferenceMode::Refine {
        tol: 1e-13,
        x0: p.config.x0.clone(),
        max_iters: 20_000,
    };
    match compute_reference(&p.objective, &p.set, &mode) {
        Err(Error::PartialReference { achieved, x, .. }) => {
            assert!(achieved < 2e-5);
            assert!(numerics::dist2(&x, &[-0.5, -0.5]) < 3e-3);
        }
        other => panic!("expected a partial reference, got {other:?}"),
    }
}

#[test]
fn preset_runs_are_deterministic() {
    for name in PRESET_NAMES {
        let (_, a) = solved(name);
        let (_, b) = solved(name);
        assert_eq!(a, b);
    }
}
