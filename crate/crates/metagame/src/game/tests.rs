use super::io::{from_json, to_json};
use super::*;
use crate::rng;
use proptest::prelude::*;

pub(crate) fn fig3a_game() -> PayoffTensor {
    PayoffTensor::from_matrices(
        vec![vec![0.50, 0.85], vec![0.15, 0.50]],
        vec![vec![0.50, 0.15], vec![0.85, 0.50]],
        1.0,
    )
    .unwrap()
}

/// Appendix-style 3x3 game: rows U/M/D, columns L/C/R.
pub(crate) fn appendix_b_game() -> PayoffTensor {
    PayoffTensor::from_matrices(
        vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 0.0, 2.0]],
        vec![vec![1.0, 2.0, 0.0], vec![2.0, 1.0, 0.0], vec![0.0, 1.0, 2.0]],
        2.0,
    )
    .unwrap()
}

#[test]
fn flat_index_roundtrip() {
    let shape = GameShape::new(vec![3, 2, 4]).unwrap();
    assert_eq!(shape.num_profiles(), 24);
    for flat in 0..24 {
        let p = shape.profile(flat);
        assert_eq!(shape.flat_index(&p).unwrap(), flat);
    }
    // row-major: last coordinate fastest
    assert_eq!(shape.flat_index(&[0, 0, 1]).unwrap(), 1);
    assert_eq!(shape.flat_index(&[1, 0, 0]).unwrap(), 8);
}

#[test]
fn neighbors_2x2() {
    let shape = GameShape::new(vec![2, 2]).unwrap();
    let n = profile_neighbors(&shape, &[0, 0]).unwrap();
    assert_eq!(n, vec![(0, vec![1, 0]), (1, vec![0, 1])]);
    assert_eq!(shape.eta(), 0.5);
}

#[test]
fn neighbors_counts() {
    let shape = GameShape::new(vec![3, 3, 3]).unwrap();
    for flat in 0..shape.num_profiles() {
        assert_eq!(shape.neighbors(flat).len(), 6);
    }
    assert!((shape.eta() - 1.0 / 6.0).abs() < 1e-15);

    let soccer = GameShape::new(vec![10, 10]).unwrap();
    assert_eq!(soccer.neighbors(37).len(), 18);
}

#[test]
fn invalid_profile_rejected() {
    let shape = GameShape::new(vec![2, 2]).unwrap();
    assert!(profile_neighbors(&shape, &[2, 0]).is_err());
    assert!(profile_neighbors(&shape, &[0]).is_err());
}

#[test]
fn bernoulli_degenerate() {
    let game = PayoffTensor::from_matrices(
        vec![vec![1.0, 1.0], vec![1.0, 1.0]],
        vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        1.0,
    )
    .unwrap();
    let mut rng = rng::seeded(3);
    for _ in 0..100 {
        let out = simulate_bernoulli(&game, &[0, 1], &mut rng).unwrap();
        assert_eq!(out, vec![1.0, 0.0]);
    }
}

#[test]
fn bernoulli_mean_converges() {
    let game = fig3a_game();
    let mut rng = rng::seeded(7);
    let n = 100_000;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += simulate_bernoulli(&game, &[0, 1], &mut rng).unwrap()[0];
    }
    let mean = sum / n as f64;
    assert!((mean - 0.85).abs() < 0.01, "mean {mean}");
}

#[test]
fn bernoulli_clt_bound() {
    // |mean - 0.5| <= 4*sqrt(0.25/n) with observed failure rate < 1%
    let game = PayoffTensor::from_matrices(
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        1.0,
    )
    .unwrap();
    let n = 100_000u64;
    let bound = 4.0 * (0.25 / n as f64).sqrt();
    let mut failures = 0;
    for trial in 0..50 {
        let mut rng = rng::stream(11, trial);
        let mut sum = 0.0;
        for _ in 0..n {
            sum += simulate_bernoulli(&game, &[0, 0], &mut rng).unwrap()[0];
        }
        if (sum / n as f64 - 0.5).abs() > bound {
            failures += 1;
        }
    }
    assert!(failures == 0, "{failures}/50 trials exceeded the 4-sigma bound");
}

#[test]
fn bernoulli_rejects_out_of_range() {
    let game = appendix_b_game();
    let mut rng = rng::seeded(1);
    assert!(simulate_bernoulli(&game, &[0, 0], &mut rng).is_err());
}

#[test]
fn general_simulator_rescales() {
    let game = appendix_b_game();
    let sim = BernoulliSimulator::for_general_game(game);
    assert_eq!(sim.outcome_range(), (-2.0, 2.0));
    let mut rng = rng::seeded(5);
    let n = 200_000;
    let mut sum = 0.0;
    let flat = sim.shape().flat_index(&[0, 1]).unwrap();
    for _ in 0..n {
        sum += sim.simulate_flat(flat, &mut rng)[0];
    }
    // true payoff M^1(U, C) = 1.0
    assert!((sum / n as f64 - 1.0).abs() < 0.02);
}

#[test]
fn generated_game_respects_band() {
    let mut rng = rng::seeded(42);
    let game = generate_bernoulli_game(6, 0.1, &mut rng).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let v = game.get(0, &[i, j]).unwrap();
            if i == j {
                assert_eq!(v, 0.5);
            } else {
                assert!(!(0.4 < v && v < 0.6), "entry {v} inside forbidden band");
            }
        }
    }
}

#[test]
fn generated_game_near_limit_gap() {
    let mut rng = rng::seeded(9);
    let game = generate_bernoulli_game(3, 0.49, &mut rng).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let v = game.get(0, &[i, j]).unwrap();
                assert!(v <= 0.01 || v >= 0.99);
            }
        }
    }
}

#[test]
fn generate_rejects_bad_gap() {
    let mut rng = rng::seeded(1);
    assert!(generate_bernoulli_game(3, 0.5, &mut rng).is_err());
    assert!(generate_bernoulli_game(1, 0.1, &mut rng).is_err());
}

/// Exhaustive scan: constant-sum, off-diagonal band, diagonal at 0.5, and
/// strictly positive margin on every single-deviation pair.
pub(crate) fn validate_generated_game(game: &PayoffTensor, gap: f64) {
    let shape = game.shape();
    for flat in 0..shape.num_profiles() {
        let sum = game.get_flat(0, flat) + game.get_flat(1, flat);
        assert!((sum - 1.0).abs() < 1e-12, "not constant-sum at {flat}");
        let s = shape.profile(flat);
        let v = game.get_flat(0, flat);
        if s[0] == s[1] {
            assert_eq!(v, 0.5, "diagonal entry {v} at {flat}");
        } else {
            assert!((v - 0.5).abs() >= gap - 1e-12, "entry {v} inside the band");
        }
        let floor = deviation_margin_floor(shape.strategy_counts()[0], gap);
        for (k, nb) in shape.neighbors(flat) {
            let d = (game.get_flat(k, nb) - game.get_flat(k, flat)).abs();
            assert!(
                d >= floor - 1e-12,
                "deviation margin {d} below floor {floor} at {flat} (player {k})"
            );
        }
    }
}

#[test]
fn generated_games_pass_deviation_scan() {
    for (seed, n, gap) in [(0u64, 4usize, 0.1f64), (1, 8, 0.2), (2, 20, 0.05), (3, 4, 0.4)] {
        let mut rng = rng::seeded(seed);
        let game = generate_bernoulli_game(n, gap, &mut rng).unwrap();
        validate_generated_game(&game, gap);
    }
}

#[test]
fn symmetry_checks() {
    assert!(is_symmetric(&fig3a_game()));
    assert!(!is_symmetric(&appendix_b_game()));

    // one-player game: only the identity permutation
    let shape = GameShape::new(vec![3]).unwrap();
    let game = PayoffTensor::new(shape, vec![vec![1.0, 2.0, 3.0]], 3.0).unwrap();
    assert!(is_symmetric(&game));

    // heterogeneous strategy counts are never symmetric
    let shape = GameShape::new(vec![2, 3]).unwrap();
    let game = PayoffTensor::new(shape, vec![vec![0.0; 6], vec![0.0; 6]], 1.0).unwrap();
    assert!(!is_symmetric(&game));
}

#[test]
fn json_roundtrip_fig3a() {
    let game = fig3a_game();
    let dir = std::env::temp_dir().join("metagame_io_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig3a.json");
    save_table_json(&game, &path).unwrap();
    let loaded = load_table_json(&path).unwrap();
    assert_eq!(loaded, game);
    assert_eq!(loaded.get(0, &[0, 1]).unwrap(), 0.85);
    assert_eq!(loaded.get(1, &[0, 1]).unwrap(), 0.15);
}

#[test]
fn csv_roundtrip() {
    let mut rng = rng::seeded(13);
    let game = generate_bernoulli_game(5, 0.1, &mut rng).unwrap();
    let dir = std::env::temp_dir().join("metagame_io_test");
    std::fs::create_dir_all(&dir).unwrap();
    let (p1, p2) = (dir.join("g_p1.csv"), dir.join("g_p2.csv"));
    save_table_csv(&game, &p1, &p2).unwrap();
    let loaded = load_table_csv(&p1, &p2, 1.0).unwrap();
    assert_eq!(loaded, game);
}

#[test]
fn empty_strategy_list_rejected() {
    assert!(GameShape::new(vec![]).is_err());
    assert!(GameShape::new(vec![2, 0]).is_err());
}

#[test]
fn empirical_payoffs_track_counts() {
    let shape = GameShape::new(vec![2, 2]).unwrap();
    let mut emp = EmpiricalPayoffs::new(shape);
    assert_eq!(emp.mean(0, 0), None);
    emp.record(0, &[1.0, 0.0]);
    emp.record(0, &[0.0, 1.0]);
    assert_eq!(emp.mean(0, 0), Some(0.5));
    assert_eq!(emp.count(0), 2);
    assert_eq!(emp.total_samples(), 2);
}

proptest! {
    #[test]
    fn neighbor_count_matches_formula(counts in proptest::collection::vec(1usize..5, 1..4)) {
        let shape = GameShape::new(counts.clone()).unwrap();
        let expected: usize = counts.iter().map(|&n| n - 1).sum();
        for flat in 0..shape.num_profiles().min(64) {
            prop_assert_eq!(shape.neighbors(flat).len(), expected);
        }
    }

    #[test]
    fn json_roundtrip_random_tensor(seed in 0u64..50) {
        // 3-player, 3-strategy (poker-shaped) random tensor
        let shape = GameShape::new(vec![3, 3, 3]).unwrap();
        let mut rng = rng::seeded(seed);
        use rand::Rng as _;
        let payoffs: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..27).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let game = PayoffTensor::new(shape, payoffs, 1.0).unwrap();
        let value = to_json(&game);
        let back = from_json(&value).unwrap();
        prop_assert_eq!(back, game);
    }
}
