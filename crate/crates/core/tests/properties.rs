use nalgebra::Matrix4;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zd_dilemma::arena::seed::opponent_rng;
use zd_dilemma::arena::{self, ExperimentSpec, Mode, XStrategy};
use zd_dilemma::classic::{sample_random_strategy, wsls};
use zd_dilemma::config::{parse_config, ModeName, RunConfig};
use zd_dilemma::markov::{determinant_matrix, last_column_cofactors, stationary, PayoffMethod};
use zd_dilemma::output::{cloud_csv, parse_csv_pairs};
use zd_dilemma::simulate::simulate_match;
use zd_dilemma::zd::{
    linear_strategy, phi_range, s_range, solve_equalizer_general, zd_extortion, zd_set, ZDParams,
};
use zd_dilemma::{
    decay, expected_payoffs, payoffs_from_donation, press_dyson_d, standard_payoffs,
    transition_matrix, DonationParams, GamePayoffs, MemoryOneStrategy, Role,
};

fn interior() -> impl Strategy<Value = MemoryOneStrategy> {
    prop::array::uniform4(0.01f64..0.99).prop_map(|p| MemoryOneStrategy::new(p).unwrap())
}

fn any_strategy() -> impl Strategy<Value = MemoryOneStrategy> {
    prop::array::uniform4(0.0f64..=1.0).prop_map(|p| MemoryOneStrategy::new(p).unwrap())
}

fn donation() -> DonationParams {
    DonationParams::new(6.0, 4.0).unwrap()
}

fn payoff_bounds(g: &GamePayoffs) -> (f64, f64) {
    let lo = g.sx.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = g.sx.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn transition_rows_are_stochastic(p in any_strategy(), q in any_strategy(), m in 0.05f64..=1.0) {
        let px = decay(p, m, Role::X).unwrap();
        let qy = decay(q, m, Role::Y).unwrap();
        let t = transition_matrix(&px, &qy).unwrap();
        for row in t.rows() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(row.iter().all(|&e| (0.0..=1.0).contains(&e)));
        }
    }

    #[test]
    fn no_decay_is_identity(p in any_strategy()) {
        for role in [Role::X, Role::Y] {
            let d = decay(p, 1.0, role).unwrap();
            prop_assert_eq!(d.effective, p.probs());
        }
    }

    #[test]
    fn stationary_vector_follows_cofactors(p in interior(), q in interior(), m in 0.1f64..=1.0) {
        let px = decay(p, m, Role::X).unwrap();
        let qy = decay(q, m, Role::Y).unwrap();
        let v = stationary(&transition_matrix(&px, &qy).unwrap()).unwrap().v;
        let c = last_column_cofactors(&px, &qy).unwrap();
        let total: f64 = c.iter().sum();
        for i in 0..4 {
            prop_assert!((c[i] / total - v[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn cofactor_expansion_matches_full_determinant(
        p in interior(), q in interior(), m in 0.1f64..=1.0,
        f in prop::array::uniform4(-3.0f64..3.0),
    ) {
        let px = decay(p, m, Role::X).unwrap();
        let qy = decay(q, m, Role::Y).unwrap();
        let d = determinant_matrix(&px, &qy, f).unwrap();
        let full = Matrix4::from_fn(|i, j| d[i][j]).determinant();
        let expanded = press_dyson_d(&px, &qy, f).unwrap();
        prop_assert!((full - expanded).abs() < 1e-12 * (1.0 + full.abs()));
    }

    #[test]
    fn payoffs_stay_inside_the_payoff_range(p in interior(), q in interior(), m in 0.1f64..=1.0) {
        let g = standard_payoffs();
        let px = decay(p, m, Role::X).unwrap();
        let qy = decay(q, m, Role::Y).unwrap();
        let r = expected_payoffs(&px, &qy, &g).unwrap();
        let (lo, hi) = payoff_bounds(&g);
        prop_assert!(r.sx >= lo - 1e-12 && r.sx <= hi + 1e-12);
        prop_assert!(r.sy >= lo - 1e-12 && r.sy <= hi + 1e-12);
        prop_assert!(r.sx + r.sy <= 2.0 * g.reward() + 1e-12);
    }

    #[test]
    fn accepted_linear_strategies_are_probabilities(
        alpha in -2.0f64..2.0, beta in -2.0f64..2.0, gamma in -2.0f64..2.0,
        phi in 0.0f64..1.0, m in 0.2f64..=1.0,
    ) {
        let params = ZDParams { alpha, beta, gamma, phi, s: None, reference_point: None, m };
        if let Ok(z) = linear_strategy(params, donation()) {
            prop_assert!(z.strategy.probs().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn equalizer_fixes_opponent_payoff(p1 in 0.5f64..1.0, p4 in 0.0f64..0.5, q in interior()) {
        let Ok(z) = zd_set(p1, p4, donation(), 1.0) else { return Ok(()); };
        let g = payoffs_from_donation(donation()).unwrap();
        let px = decay(z.strategy, 1.0, Role::X).unwrap();
        let qy = decay(q, 1.0, Role::Y).unwrap();
        let r = expected_payoffs(&px, &qy, &g).unwrap();
        prop_assert!((r.sy - z.predicted.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn linear_relation_holds_under_decay(
        alpha in -1.0f64..1.0, beta in -1.0f64..1.0, gamma in -1.0f64..1.0,
        phi in 0.0f64..0.5, m in 0.3f64..=1.0, q in interior(),
    ) {
        let params = ZDParams { alpha, beta, gamma, phi, s: None, reference_point: None, m };
        let Ok(z) = linear_strategy(params, donation()) else { return Ok(()); };
        let g = payoffs_from_donation(donation()).unwrap();
        let px = decay(z.strategy, m, Role::X).unwrap();
        let qy = decay(q, m, Role::Y).unwrap();
        let Ok(r) = expected_payoffs(&px, &qy, &g) else { return Ok(()); };
        prop_assert!((alpha * r.sx + beta * r.sy + gamma).abs() < 1e-8);
    }

    #[test]
    fn closed_form_equalizer_matches_general_solver(p1 in 0.5f64..1.0, p4 in 0.0f64..0.5) {
        let a = zd_set(p1, p4, donation(), 1.0);
        let b = solve_equalizer_general(p1, p4, &payoffs_from_donation(donation()).unwrap());
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            for (x, y) in a.strategy.probs().iter().zip(b.strategy.probs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert!((a.predicted.unwrap() - b.predicted.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn extortion_is_linear_and_dominant(t in 0.0f64..1.0, u in 0.01f64..=1.0, q in interior()) {
        let d = donation();
        let (lo, hi) = s_range(d);
        let s = lo + t * (hi - lo);
        let (_, phi_hi) = phi_range(s, d).unwrap();
        let z = zd_extortion(s, u * phi_hi, d).unwrap();
        let g = payoffs_from_donation(d).unwrap();
        let px = decay(z.strategy, 1.0, Role::X).unwrap();
        let qy = decay(q, 1.0, Role::Y).unwrap();
        let r = expected_payoffs(&px, &qy, &g).unwrap();
        let p = g.punishment();
        prop_assert!((s * (r.sx - p) - (r.sy - p)).abs() < 1e-9);
        if r.sx >= p {
            prop_assert!(r.sy <= r.sx + 1e-12);
        }
    }

    #[test]
    fn config_round_trips_through_json(
        seed in any::<u64>(), n in 1usize..100_000, k in 0u32..1024,
        simulated in any::<bool>(), rounds in 1u64..10_000_000,
    ) {
        let cfg = RunConfig {
            strategy: Some("zd-set".into()),
            p1: Some(0.5 + f64::from(k) / 4096.0),
            p4: Some(f64::from(k) / 4096.0),
            m: Some(1.0 - f64::from(k) / 2048.0),
            n_opponents: Some(n),
            mode: Some(if simulated { ModeName::Simulated } else { ModeName::Analytic }),
            rounds: Some(rounds),
            seed: Some(seed),
            ..RunConfig::default()
        };
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}

/// One-sample Kolmogorov-Smirnov statistic against U(0, 1).
fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

#[test]
fn sampler_is_uniform_per_coordinate() {
    let n = 100_000;
    // the per-opponent streams the arena draws from
    let draws: Vec<[f64; 4]> = (0..n as u64)
        .map(|i| sample_random_strategy(&mut opponent_rng(0, i)).probs())
        .collect();
    let critical = 1.628 / (n as f64).sqrt();
    for i in 0..4 {
        let d = ks_uniform(draws.iter().map(|q| q[i]).collect());
        assert!(d < critical, "coordinate {i}: D = {d}, critical {critical}");
    }
}

#[test]
fn simulation_agrees_with_analytic_payoffs() {
    let g = standard_payoffs();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trials = 1000;
    let mut hits = 0;
    for i in 0..trials {
        let m = if i % 2 == 0 { 1.0 } else { 0.8 };
        let p = sample_random_strategy(&mut rng);
        let q = sample_random_strategy(&mut rng);
        let clamp = |s: MemoryOneStrategy| {
            MemoryOneStrategy::new(s.probs().map(|v| v.clamp(0.01, 0.99))).unwrap()
        };
        let px = decay(clamp(p), m, Role::X).unwrap();
        let qy = decay(clamp(q), m, Role::Y).unwrap();
        let exact = expected_payoffs(&px, &qy, &g).unwrap();
        let sim = simulate_match(&px, &qy, &g, 100_000, i).unwrap();
        if (sim.sx - exact.sx).abs() <= 3.0 * sim.se_x
            && (sim.sy - exact.sy).abs() <= 3.0 * sim.se_y
        {
            hits += 1;
        }
    }
    assert!(hits >= 985, "{hits}/{trials} within 3 SE");
}

#[test]
fn csv_reparse_matches_cloud() {
    let spec = ExperimentSpec {
        x_strategy: XStrategy::Named(wsls()),
        n_opponents: 500,
        payoffs: standard_payoffs(),
        m: 0.9,
        mode: Mode::Analytic,
        master_seed: 3,
    };
    let cloud = arena::run_cloud(&spec).unwrap();
    let parsed = parse_csv_pairs(&cloud_csv(&cloud)).unwrap();
    assert_eq!(parsed, cloud.pairs());
    assert!(cloud
        .points
        .iter()
        .all(|p| p.method != PayoffMethod::TimeAverage || p.degenerate));
}
