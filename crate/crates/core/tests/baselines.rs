//! Long-run behaviour of the optimizers on the benchmark environments.

use perfdfo_core::{
    run, AlgoConfig, Algorithm, ArPricing, ArScalarQuartic, DecisionVector, Environment, Rng, Schedule, SchedulePreset,
};

fn schedule(eta0: f64, delta0: f64, lambda: f64, rho: f64) -> Schedule {
    Schedule::new(SchedulePreset::Smooth, 2.0 / 3.0, 1.0 / 6.0, eta0, delta0, lambda, rho, None).unwrap()
}

#[test]
fn sgd_gd_on_pricing_drifts_to_zero_revenue() {
    let env = ArPricing::default();
    let cfg = AlgoConfig::new(
        Algorithm::SgdGd,
        schedule(0.1, 1.0, 0.0, 0.9),
        200_000,
        DecisionVector::new(vec![12.0, -12.0, 12.0, -12.0, 12.0]).unwrap(),
    );
    let trace = run(&env, &cfg, &mut Rng::seed_from_u64(1)).unwrap();
    let theta = trace.final_theta();
    for (t, m) in theta.iter().zip(env.mu0()) {
        assert!((t - 2.0 * m).abs() < 0.5, "{t} vs {}", 2.0 * m);
    }
    let revenue = -env.exact_risk(theta).unwrap();
    assert!(revenue.abs() < 5.0, "revenue {revenue}");
}

#[test]
fn sgd_gd_on_quartic_finds_the_stable_point() {
    let env = ArScalarQuartic::default();
    let cfg = AlgoConfig::new(Algorithm::SgdGd, schedule(0.02, 1.0, 0.0, 0.5), 300_000, DecisionVector::new(vec![6.0]).unwrap());
    let trace = run(&env, &cfg, &mut Rng::seed_from_u64(2)).unwrap();
    // root of θ(9θ² − 16θ − 48) = 0
    let stable = (16.0 + (256.0f64 + 1728.0).sqrt()) / 18.0;
    assert!((trace.final_theta()[0] - stable).abs() < 0.05, "{}", trace.final_theta()[0]);
    assert!(ArScalarQuartic::risk_grad(stable).powi(2) > 100.0);
}

#[test]
fn dfo_lambda_on_quartic_approaches_the_optimum() {
    let env = ArScalarQuartic::default();
    let cfg = AlgoConfig::new(Algorithm::DfoLambda, schedule(0.02, 2.5, 0.25, 0.5), 12_500, DecisionVector::new(vec![6.0]).unwrap());
    let near = (0..5)
        .filter(|s| {
            let trace = run(&env, &cfg, &mut Rng::seed_from_u64(10 + s)).unwrap();
            (trace.final_theta()[0] - 4.0).abs() <= 0.3
        })
        .count();
    assert!(near >= 4, "{near}/5");
}
