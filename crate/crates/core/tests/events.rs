mod common;

use common::{column_stats, rejection_oracle};
use qcrystal::events::*;
use qcrystal::Error;

const QUANTUM: f64 = 1e-21;

fn config(samples: usize, seed: u64, tol: f64) -> SamplerConfig {
    SamplerConfig {
        tolerance: Some(tol),
        ..SamplerConfig::new(samples, seed)
    }
}

#[test]
fn every_state_satisfies_both_constraints() {
    let scheme = LevelScheme::new(
        vec![0.0, 0.7e-21, 1.9e-21, 2.2e-21, 4.0e-21],
        vec![1, 3, 2, 1, 2],
    )
    .unwrap();
    let tol = 1e-3 * scheme.span();
    let run = sample_constrained_states(&scheme, 1.3e-21, &config(2000, 9, tol)).unwrap();
    assert_eq!(run.states.len(), 2000);
    for s in &run.states {
        assert_eq!(s.coeffs.len(), 9);
        assert!((s.norm_sq() - 1.0).abs() < 1e-10);
        assert!((s.achieved_energy - s.target_energy).abs() <= s.tolerance);
        let total: f64 = s.level_occupations.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
    for d in &run.diagnostics {
        assert!(d.acceptance > MIN_ACCEPTANCE);
    }
}

#[test]
fn ground_shell_concentrates() {
    let scheme = LevelScheme::nondegenerate(vec![0.0, 1.0e-21, 2.5e-21]).unwrap();
    let tol = 1e-3 * scheme.span();
    let run = sample_constrained_states(&scheme, 0.0, &config(2000, 4, tol)).unwrap();
    let stats = occupation_statistics(&scheme, &run.states).unwrap();
    assert!(stats.means[0] > 0.99, "{:?}", stats.means);
}

#[test]
fn top_of_spectrum_is_feasible() {
    let scheme = LevelScheme::harmonic(4, QUANTUM).unwrap();
    let run =
        sample_constrained_states(&scheme, 3.0 * QUANTUM, &SamplerConfig::new(200, 8)).unwrap();
    let stats = occupation_statistics(&scheme, &run.states).unwrap();
    assert!(stats.means[3] > 0.99);
}

#[test]
fn matches_rejection_oracle_at_mid_spectrum() {
    let scheme = LevelScheme::harmonic(8, QUANTUM).unwrap();
    let v = 3.5 * QUANTUM;
    let tol = 1e-3 * scheme.span();
    let run = sample_constrained_states(&scheme, v, &config(10_000, 21, tol)).unwrap();
    let mcmc = occupation_statistics(&scheme, &run.states).unwrap();
    let oracle = rejection_oracle(&scheme, v, tol, 10_000, 22);
    for k in 0..8 {
        let (m, se) = column_stats(&oracle, k);
        let se_diff = (se * se + mcmc.std_errors[k].powi(2)).sqrt();
        assert!(
            (mcmc.means[k] - m).abs() < 3.0 * se_diff,
            "level {k}: mcmc {} oracle {m} (se {se_diff})",
            mcmc.means[k]
        );
    }
}

#[test]
fn matches_oracle_with_degenerate_levels() {
    let scheme = LevelScheme::new(vec![0.0, 1.0e-21, 2.0e-21], vec![1, 2, 3]).unwrap();
    let v = 0.9e-21;
    let tol = 1e-3 * scheme.span();
    let run = sample_constrained_states(&scheme, v, &config(8000, 31, tol)).unwrap();
    let mcmc = occupation_statistics(&scheme, &run.states).unwrap();
    let oracle = rejection_oracle(&scheme, v, tol, 8000, 32);
    for k in 0..3 {
        let (m, se) = column_stats(&oracle, k);
        let se_diff = (se * se + mcmc.std_errors[k].powi(2)).sqrt();
        assert!((mcmc.means[k] - m).abs() < 3.0 * se_diff, "level {k}");
    }
}

#[test]
fn low_target_gives_decreasing_occupations() {
    let scheme = LevelScheme::harmonic(8, QUANTUM).unwrap();
    let run =
        sample_constrained_states(&scheme, 2.0 * QUANTUM, &SamplerConfig::new(10_000, 5)).unwrap();
    let stats = occupation_statistics(&scheme, &run.states).unwrap();
    for k in 1..8 {
        assert!(stats.means[k] < stats.means[k - 1], "{:?}", stats.means);
    }
}

#[test]
fn doubling_burn_in_is_harmless() {
    let scheme = LevelScheme::harmonic(8, QUANTUM).unwrap();
    let v = 2.5 * QUANTUM;
    let base = SamplerConfig::new(10_000, 1);
    let doubled = SamplerConfig {
        burn_in_sweeps: 2 * base.burn_in_sweeps,
        ..base.clone()
    };
    let a = occupation_statistics(
        &scheme,
        &sample_constrained_states(&scheme, v, &base).unwrap().states,
    )
    .unwrap();
    let b = occupation_statistics(
        &scheme,
        &sample_constrained_states(&scheme, v, &doubled)
            .unwrap()
            .states,
    )
    .unwrap();
    for k in 0..8 {
        let se = (a.std_errors[k].powi(2) + b.std_errors[k].powi(2)).sqrt();
        assert!((a.means[k] - b.means[k]).abs() < 2.0 * se, "level {k}");
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let scheme = LevelScheme::harmonic(6, QUANTUM).unwrap();
    let cfg = SamplerConfig::new(400, 77);
    let run_in = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_constrained_states(&scheme, 2.0 * QUANTUM, &cfg).unwrap())
    };
    assert_eq!(run_in(1), run_in(3));
}

#[test]
fn different_seeds_differ() {
    let scheme = LevelScheme::harmonic(6, QUANTUM).unwrap();
    let a = sample_constrained_state(&scheme, 2.0 * QUANTUM, 1e-24, 1).unwrap();
    let b = sample_constrained_state(&scheme, 2.0 * QUANTUM, 1e-24, 2).unwrap();
    assert_ne!(a.coeffs, b.coeffs);
}

#[test]
fn harmonic_scheme_scores_boltzmann_at_canonical_theta() {
    let scheme = LevelScheme::harmonic(12, QUANTUM).unwrap();
    let v = 4.0 * QUANTUM;
    let theta = canonical_theta(&scheme, v).unwrap();
    let run = sample_constrained_states(&scheme, v, &SamplerConfig::new(10_000, 12)).unwrap();
    let stats = occupation_statistics(&scheme, &run.states).unwrap();
    let fit = boltzmann_fit(&stats, theta).unwrap();
    assert!(fit.r_squared > 0.95, "{fit:?}");
    assert!(fit.levels_used == 12);
}

#[test]
fn sampler_rejects_bad_configs() {
    let scheme = LevelScheme::harmonic(4, QUANTUM).unwrap();
    assert!(matches!(
        sample_constrained_states(&scheme, -1e-22, &SamplerConfig::new(10, 1)),
        Err(Error::InfeasibleConstraint(_))
    ));
    let zero = SamplerConfig::new(0, 1);
    assert!(sample_constrained_states(&scheme, 1e-21, &zero).is_err());
    let no_chains = SamplerConfig {
        chains: 0,
        ..SamplerConfig::new(10, 1)
    };
    assert!(sample_constrained_states(&scheme, 1e-21, &no_chains).is_err());
}
