//! Consistency between the simulator, the Markov chain and the approximation.

use gjsq_core::ctmc::{oracle, Truncation, DEFAULT_MIN_MASS};
use gjsq_core::sim::{estimate_conditional_rates, queue_length_stats, replicate, SimOptions};
use gjsq_core::sqa::{self, approx_rate_server1, approx_rate_server2, birth_death_solve, limiting_rates};
use gjsq_core::{JobSizeDistribution, SystemConfig};
use proptest::prelude::*;

fn exp_cfg(s: u32, rho: f64) -> SystemConfig {
    SystemConfig::two_server(s, rho, JobSizeDistribution::exponential()).unwrap()
}

#[test]
fn exact_rates_reproduce_marginals() {
    for (s, rho) in [(1, 0.5), (2, 0.7), (3, 0.9)] {
        let sol = oracle(&exp_cfg(s, rho), None, DEFAULT_MIN_MASS).unwrap();
        for i in 0..2 {
            let mu = if i == 0 { 1.0 } else { f64::from(s) };
            let bd = birth_death_solve(&sol.rates[i], mu, 1e-15).unwrap();
            let exact = &sol.marginals[i].pi;
            for (n, p) in exact.iter().enumerate() {
                let got = bd.pi.get(n).copied().unwrap_or(0.0);
                assert!((got - p).abs() < 1e-9, "s={s} rho={rho} server {i} n={n}");
            }
        }
    }
}

#[test]
fn oracle_rates_approach_limits() {
    let (s, rho) = (3u32, 0.7);
    let su = s as usize;
    let sol = oracle(&exp_cfg(s, rho), None, 1e-250).unwrap();
    let lim = limiting_rates(rho, s).unwrap();
    let mut prev = f64::INFINITY;
    for n in [2, 4, 8, 12] {
        let err = (sol.rates[0].rate(n * su).unwrap() - lim.lam1).abs();
        // Monotone until the error reaches round-off level.
        assert!(err < prev || err < 1e-11 * lim.lam1, "n={n}: {err:e}");
        prev = err;
    }
    assert!(prev < 1e-3 * lim.lam1);
    for n in 8 * su..=12 * su {
        for r in 0..su {
            let v = sol.rates[1].rate(su * n + r).unwrap();
            assert!((v / lim.lam2[r] - 1.0).abs() < 1e-3);
        }
    }
}

#[test]
fn fitted_rates_track_exact_ones() {
    for (s, rho) in [(3u32, 0.7), (4, 0.4)] {
        let sol = oracle(&exp_cfg(s, rho), None, DEFAULT_MIN_MASS).unwrap();
        let lim = limiting_rates(rho, s).unwrap();
        for n in 0..3 {
            let exact = sol.rates[0].rate(n).unwrap();
            assert!((approx_rate_server1(n, rho, s) / exact - 1.0).abs() < 0.025);
        }
        for n in 0..2 * s as usize {
            let exact = sol.rates[1].rate(n).unwrap();
            assert!((approx_rate_server2(n, rho, s, &lim.lam2) / exact - 1.0).abs() < 0.06);
        }
    }
}

#[test]
fn heavy_traffic_split_follows_capacity() {
    for s in 1..=4u32 {
        let r = sqa::sqa(0.99, s).unwrap();
        let lam = 0.99 * (1.0 + f64::from(s));
        let share = r.servers[0].solution.lambda_bar / lam;
        let target = 1.0 / (1.0 + f64::from(s));
        assert!((share / target - 1.0).abs() < 0.02, "s={s}: {share}");
    }
}

#[test]
fn light_traffic_rates_vanish() {
    for s in [2u32, 4] {
        let mut prev = f64::INFINITY;
        for rho in [0.3, 0.1, 0.03] {
            let lim = limiting_rates(rho, s).unwrap();
            let top = (0..6)
                .map(|n| approx_rate_server1(n, rho, s))
                .chain((s as usize - 1..4 * s as usize).map(|n| approx_rate_server2(n, rho, s, &lim.lam2)))
                .fold(0.0, f64::max);
            assert!(top < prev);
            prev = top;
        }
    }
}

#[test]
fn simulation_agrees_with_oracle() {
    let cfg = exp_cfg(2, 0.7);
    let exact = oracle(&cfg, None, DEFAULT_MIN_MASS).unwrap();
    let rep = replicate(&cfg, &SimOptions::new(100_000), 8, 2024).unwrap();
    for i in 0..2 {
        let m = rep.servers[i].mean_queue;
        let se = m.stderr(rep.reps).unwrap();
        assert!((m.mean - exact.marginals[i].mean).abs() < 3.0 * se + 1e-3, "server {i}");
        // Flow balance: lambda_bar = rate (1 - P(empty)).
        let lb = rep.servers[i].lambda_bar;
        let rate = cfg.rates[i];
        let pooled = rep.pooled();
        let busy = 1.0 - queue_length_stats(&pooled)[i].pi[0];
        assert!((lb.mean - rate * busy).abs() < 3.0 * lb.stderr(rep.reps).unwrap() + 0.01);
    }
    // Sampled conditional rates agree with the exact ones where exposure is high.
    let pooled = rep.pooled();
    let est = estimate_conditional_rates(&pooled, 1_000.0);
    for (i, (sampled, truth)) in est.iter().zip(&exact.rates).enumerate() {
        for n in 0..4 {
            let (v, e) = (sampled.rate(n).unwrap(), sampled.stderr(n).unwrap());
            let x = truth.rate(n).unwrap();
            assert!((v - x).abs() < 4.0 * e + 1e-3, "server {i} n={n}: {v} vs {x}");
        }
    }
}

#[test]
fn arrivals_see_time_averages() {
    let cfg = exp_cfg(3, 0.6);
    let pooled = replicate(&cfg, &SimOptions::new(100_000), 4, 99).unwrap().pooled();
    let stats = queue_length_stats(&pooled);
    let total = pooled.total_arrivals() as f64;
    for (i, c) in pooled.servers.iter().enumerate() {
        for n in 0..4 {
            let seen = c.seen_by_all[n] as f64 / total;
            // Consecutive arrivals are correlated; inflate the binomial error.
            let se = 5.0 * (seen * (1.0 - seen) / total).sqrt();
            assert!((seen - stats[i].pi[n]).abs() < 3.0 * se, "server {i} n={n}");
        }
    }
}

#[test]
fn truncation_adequacy() {
    for (s, rho) in [(2u32, 0.9), (4, 0.5)] {
        let cfg = exp_cfg(s, rho);
        let t = Truncation::for_load(rho, s);
        let a = oracle(&cfg, Some(t), DEFAULT_MIN_MASS).unwrap();
        assert!(a.dist.tail_mass < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn birth_death_is_normalized(rates in proptest::collection::vec(0.01f64..3.0, 0..8), tail in 0.01f64..0.95) {
        let p = gjsq_core::RateProfile::new(
            gjsq_core::Provenance::Approximation,
            rates.into_iter().map(Some).collect(),
            gjsq_core::Tail::Constant(tail),
        );
        let sol = birth_death_solve(&p, 1.0, 1e-13).unwrap();
        let total: f64 = sol.pi.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(sol.pi.iter().all(|v| *v >= 0.0));
        prop_assert!((sol.lambda_bar - (1.0 - sol.pi[0])).abs() < 1e-9);
    }

    #[test]
    fn limits_telescope(s in 1u32..=5, rho in 0.3f64..0.95) {
        let lim = limiting_rates(rho, s).unwrap();
        let prod: f64 = lim.lam2.iter().product();
        let expect = f64::from(s).powi(s as i32) * rho.powi(s as i32 + 1);
        prop_assert!((prod / expect - 1.0).abs() < 1e-10);
    }
}
