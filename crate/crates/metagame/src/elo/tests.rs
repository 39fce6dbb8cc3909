use super::*;
use approx::assert_abs_diff_eq;
use rand::Rng as _;

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

#[test]
fn two_strategy_fit_matches_win_rate() {
    let batch = OutcomeBatch::from_win_matrix(
        &[vec![0.5, 0.75], vec![0.25, 0.5]],
        100,
    )
    .unwrap();
    let ratings = batch_elo_fit(&batch, DEFAULT_REG).unwrap();
    assert_abs_diff_eq!(elo_predict(&ratings, 0, 1).unwrap(), 0.75, epsilon = 1e-6);
    let gap = ratings.ratings()[0] - ratings.ratings()[1];
    assert_abs_diff_eq!(gap, logit(0.75), epsilon = 1e-6);
    assert_abs_diff_eq!(ratings.ratings().iter().sum::<f64>(), 0.0, epsilon = 1e-12);
}

#[test]
fn all_draws_give_zero_ratings() {
    let rates = vec![vec![0.5; 4]; 4];
    let batch = OutcomeBatch::from_win_matrix(&rates, 10).unwrap();
    let ratings = batch_elo_fit(&batch, DEFAULT_REG).unwrap();
    for &r in ratings.ratings() {
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-8);
    }
}

#[test]
fn rps_fits_flat_ratings_and_uniform_predictions() {
    // rock-paper-scissors win matrix: intransitive, so Elo has nothing to say
    let rates = vec![
        vec![0.5, 1.0, 0.0],
        vec![0.0, 0.5, 1.0],
        vec![1.0, 0.0, 0.5],
    ];
    let batch = OutcomeBatch::from_win_matrix(&rates, 30).unwrap();
    let ratings = batch_elo_fit(&batch, DEFAULT_REG).unwrap();
    for a in 0..3 {
        assert_abs_diff_eq!(ratings.ratings()[a], 0.0, epsilon = 1e-6);
        for b in 0..3 {
            if a != b {
                assert_abs_diff_eq!(elo_predict(&ratings, a, b).unwrap(), 0.5, epsilon = 1e-6);
            }
        }
    }
}

#[test]
fn degenerate_outcomes_need_regularization() {
    // a beats b always: the unregularized optimum is at infinite gap
    let mut batch = OutcomeBatch::new(2);
    for _ in 0..20 {
        batch.add_outcome(0, 1, 1.0).unwrap();
    }
    let ratings = batch_elo_fit(&batch, 1e-6).unwrap();
    let gap = ratings.ratings()[0] - ratings.ratings()[1];
    assert!(gap.is_finite() && gap > 5.0, "gap {gap}");
}

#[test]
fn prediction_identities() {
    let mut rng = crate::rng::seeded(4);
    let ratings = EloRatings {
        ratings: (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        reg: 0.0,
    };
    for a in 0..5 {
        assert_abs_diff_eq!(elo_predict(&ratings, a, a).unwrap(), 0.5, epsilon = 1e-15);
        for b in 0..5 {
            let q = elo_predict(&ratings, a, b).unwrap();
            let q_rev = elo_predict(&ratings, b, a).unwrap();
            assert_abs_diff_eq!(q + q_rev, 1.0, epsilon = 1e-12);
            assert!(q > 0.0 && q < 1.0);
        }
    }
    assert!(elo_predict(&ratings, 0, 9).is_err());
}

#[test]
fn transitive_ground_truth_reproduced() {
    let mut rng = crate::rng::seeded(9);
    let v: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let n = v.len();
    let mut rates = vec![vec![0.5; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                rates[a][b] = 1.0 / (1.0 + (-(v[a] - v[b])).exp());
            }
        }
    }
    let batch = OutcomeBatch::from_win_matrix(&rates, 50).unwrap();
    let ratings = batch_elo_fit(&batch, 0.0).unwrap();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                assert_abs_diff_eq!(
                    elo_predict(&ratings, a, b).unwrap(),
                    rates[a][b],
                    epsilon = 1e-4
                );
            }
        }
    }
}

#[test]
fn row_sums_preserved_on_full_observation() {
    let mut rng = crate::rng::seeded(14);
    let n = 5;
    let mut rates = vec![vec![0.5; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let p = rng.gen_range(0.05..0.95);
            rates[a][b] = p;
            rates[b][a] = 1.0 - p;
        }
    }
    let batch = OutcomeBatch::from_win_matrix(&rates, 40).unwrap();
    let ratings = batch_elo_fit(&batch, 0.0).unwrap();
    for a in 0..n {
        let fitted: f64 =
            (0..n).filter(|&b| b != a).map(|b| elo_predict(&ratings, a, b).unwrap()).sum();
        let empirical: f64 = (0..n).filter(|&b| b != a).map(|b| rates[a][b]).sum();
        assert_abs_diff_eq!(fitted, empirical, epsilon = 1e-5);
    }
}

#[test]
fn uncovered_strategies_rejected() {
    let mut batch = OutcomeBatch::new(3);
    batch.add_outcome(0, 1, 1.0).unwrap();
    assert!(batch_elo_fit(&batch, DEFAULT_REG).is_err());
    assert_eq!(batch.uncovered_pairs(), vec![(0, 2), (1, 2)]);
}

#[test]
fn batch_input_validation() {
    let mut batch = OutcomeBatch::new(3);
    assert!(batch.add_outcome(0, 0, 0.5).is_err());
    assert!(batch.add_outcome(0, 3, 0.5).is_err());
    assert!(batch.add_outcome(0, 1, 1.5).is_err());
    assert!(batch.add_outcome(0, 1, 0.5).is_ok());
    assert_eq!(batch.count(0, 1), 1);
}

#[test]
fn sample_complexity_formula() {
    // |S| = 10, eps = 0.1, delta = 0.1 -> smallest integer > 5000 ln(1000)
    let expected = (5000.0 * 1000f64.ln()).floor() as u64 + 1;
    assert_eq!(elo_sample_complexity(10, 0.1, 0.1).unwrap(), expected);

    // halving eps quadruples the underlying bound
    let n1 = elo_sample_complexity(10, 0.1, 0.1).unwrap();
    let n2 = elo_sample_complexity(10, 0.05, 0.1).unwrap();
    assert!((n2 as f64 / n1 as f64 - 4.0).abs() < 1e-3);

    // monotone in the strategy count
    let mut prev = 0;
    for n in 2..12 {
        let v = elo_sample_complexity(n, 0.1, 0.1).unwrap();
        assert!(v > prev);
        prev = v;
    }

    assert!(elo_sample_complexity(10, 0.0, 0.1).is_err());
    assert!(elo_sample_complexity(10, 0.1, 1.0).is_err());
}

#[test]
fn ratings_json_layout() {
    let batch = OutcomeBatch::from_win_matrix(&[vec![0.5, 0.6], vec![0.4, 0.5]], 10).unwrap();
    let ratings = batch_elo_fit(&batch, DEFAULT_REG).unwrap();
    let json = ratings.to_json();
    assert_eq!(json["strategies"].as_array().unwrap().len(), 2);
    assert_eq!(json["ratings"].as_array().unwrap().len(), 2);
    assert!(json["reg"].as_f64().unwrap() >= 0.0);
}
