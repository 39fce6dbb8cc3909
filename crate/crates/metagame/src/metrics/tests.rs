use super::*;
use crate::alpharank::{response_graph, EdgeKind, RankingDistribution, ResponseEdge, ResponseGraph};
use crate::game::tests::fig3a_game;
use crate::game::{GameShape, PayoffTensor};
use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::Rng as _;

fn ranking(buckets: Vec<Vec<usize>>) -> PartialRanking {
    PartialRanking::new(buckets).unwrap()
}

#[test]
fn identical_rankings_have_zero_distance() {
    let r = ranking(vec![vec![0], vec![1, 2], vec![3]]);
    assert_eq!(kendall_partial(&r, &r, 0.5).unwrap(), 0.0);
}

#[test]
fn full_reversal_counts_every_pair() {
    let r = ranking(vec![vec![0], vec![1], vec![2]]);
    let rev = ranking(vec![vec![2], vec![1], vec![0]]);
    assert_eq!(kendall_partial(&r, &rev, 0.5).unwrap(), 3.0);
}

#[test]
fn tie_in_one_ranking_costs_p() {
    let strict = ranking(vec![vec![0], vec![1]]);
    let tied = ranking(vec![vec![0, 1]]);
    assert_eq!(kendall_partial(&strict, &tied, 0.5).unwrap(), 0.5);
    assert_eq!(kendall_partial(&strict, &tied, 0.7).unwrap(), 0.7);
}

#[test]
fn kernel_cases() {
    // same order 0; reversed 1; both tied 0; tied in one p
    let a = ranking(vec![vec![0], vec![1]]);
    let b = ranking(vec![vec![1], vec![0]]);
    let t = ranking(vec![vec![0, 1]]);
    assert_eq!(kendall_partial(&a, &a, 0.5).unwrap(), 0.0);
    assert_eq!(kendall_partial(&a, &b, 0.5).unwrap(), 1.0);
    assert_eq!(kendall_partial(&t, &t, 0.5).unwrap(), 0.0);
    assert_eq!(kendall_partial(&a, &t, 0.5).unwrap(), 0.5);
}

#[test]
fn mismatched_item_sets_rejected() {
    let a = ranking(vec![vec![0], vec![1]]);
    let b = ranking(vec![vec![0], vec![2]]);
    assert!(kendall_partial(&a, &b, 0.5).is_err());
}

#[test]
fn ranking_validation() {
    assert!(PartialRanking::new(vec![vec![0], vec![]]).is_err());
    assert!(PartialRanking::new(vec![vec![0], vec![0]]).is_err());
}

fn random_partial_ranking(items: usize, rng: &mut crate::rng::Rng) -> PartialRanking {
    let mut order: Vec<usize> = (0..items).collect();
    for i in (1..items).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    for item in order {
        if buckets.is_empty() || rng.gen_bool(0.6) {
            buckets.push(vec![item]);
        } else {
            buckets.last_mut().unwrap().push(item);
        }
    }
    PartialRanking::new(buckets).unwrap()
}

#[test]
fn metric_axioms_on_random_triples() {
    let mut rng = crate::rng::seeded(31);
    for _ in 0..2_000 {
        let items = rng.gen_range(2..=8);
        let a = random_partial_ranking(items, &mut rng);
        let b = random_partial_ranking(items, &mut rng);
        let c = random_partial_ranking(items, &mut rng);
        let dab = kendall_partial(&a, &b, 0.5).unwrap();
        let dba = kendall_partial(&b, &a, 0.5).unwrap();
        let dac = kendall_partial(&a, &c, 0.5).unwrap();
        let dcb = kendall_partial(&c, &b, 0.5).unwrap();
        assert_abs_diff_eq!(dab, dba, epsilon = 1e-12);
        assert_eq!(dab == 0.0, a == b || same_partition(&a, &b));
        assert!(dab <= dac + dcb + 1e-12, "triangle inequality failed");
        assert!(dab >= 0.0);
    }
}

/// Same partition up to within-bucket item order.
fn same_partition(a: &PartialRanking, b: &PartialRanking) -> bool {
    if a.buckets().len() != b.buckets().len() {
        return false;
    }
    a.buckets().iter().zip(b.buckets()).all(|(x, y)| {
        let mut x = x.clone();
        let mut y = y.clone();
        x.sort_unstable();
        y.sort_unstable();
        x == y
    })
}

#[test]
fn relabeling_invariance() {
    let mut rng = crate::rng::seeded(77);
    for _ in 0..200 {
        let items = rng.gen_range(2..=7);
        let a = random_partial_ranking(items, &mut rng);
        let b = random_partial_ranking(items, &mut rng);
        let mut perm: Vec<usize> = (0..items).collect();
        for i in (1..items).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let relabel = |r: &PartialRanking| {
            PartialRanking::new(
                r.buckets().iter().map(|b| b.iter().map(|&i| perm[i]).collect()).collect(),
            )
            .unwrap()
        };
        assert_abs_diff_eq!(
            kendall_partial(&a, &b, 0.5).unwrap(),
            kendall_partial(&relabel(&a), &relabel(&b), 0.5).unwrap(),
            epsilon = 1e-12
        );
    }
}

#[test]
fn edge_error_counts() {
    let truth = response_graph(&fig3a_game());
    assert_eq!(edge_errors(&truth, &truth).unwrap(), 0);

    let reversed = ResponseGraph::new(
        truth.shape().clone(),
        truth
            .edges()
            .iter()
            .map(|e| ResponseEdge { from: e.to, to: e.from, player: e.player, kind: e.kind })
            .collect(),
    );
    assert_eq!(edge_errors(&reversed, &truth).unwrap(), 4);
    assert_eq!(edge_errors(&truth, &reversed).unwrap(), 4);

    let mut one_flip = truth.edges().to_vec();
    one_flip[0] = ResponseEdge {
        from: one_flip[0].to,
        to: one_flip[0].from,
        player: one_flip[0].player,
        kind: one_flip[0].kind,
    };
    let est = ResponseGraph::new(truth.shape().clone(), one_flip);
    assert_eq!(edge_errors(&est, &truth).unwrap(), 1);
}

#[test]
fn edge_error_shape_mismatch() {
    let truth = response_graph(&fig3a_game());
    let other = ResponseGraph::new(GameShape::new(vec![3, 3]).unwrap(), Vec::new());
    assert!(edge_errors(&other, &truth).is_err());
}

fn dist(pi: Vec<f64>) -> RankingDistribution {
    let states = (0..pi.len()).map(|i| vec![i]).collect();
    RankingDistribution::from_pi(states, pi, 1e-8)
}

#[test]
fn distribution_bucketing() {
    let uniform = ranking_from_distribution(&dist(vec![0.25; 4]), 1e-6);
    assert_eq!(uniform.buckets().len(), 1);

    let strict = ranking_from_distribution(&dist(vec![0.7, 0.2, 0.1]), 1e-6);
    assert_eq!(strict.buckets(), &[vec![0], vec![1], vec![2]]);

    let near = ranking_from_distribution(&dist(vec![0.5, 0.5 - 1e-9, 2e-9]), 1e-6);
    assert_eq!(near.buckets(), &[vec![0, 1], vec![2]]);
}

#[test]
fn gap_distribution_values() {
    let game = fig3a_game();
    let gaps = gap_distribution(&game);
    assert_eq!(gaps.len(), 4);
    for g in gaps {
        assert_abs_diff_eq!(g, 0.35, epsilon = 1e-12);
    }

    let shape = GameShape::new(vec![2, 2]).unwrap();
    let constant = PayoffTensor::new(shape, vec![vec![0.4; 4], vec![0.4; 4]], 1.0).unwrap();
    assert!(gap_distribution(&constant).iter().all(|&g| g == 0.0));
}

#[test]
fn tie_against_directed_counts_as_error() {
    let truth = response_graph(&fig3a_game());
    let mut edges = truth.edges().to_vec();
    edges[1].kind = EdgeKind::Tie;
    let est = ResponseGraph::new(truth.shape().clone(), edges);
    assert_eq!(edge_errors(&est, &truth).unwrap(), 1);
}

proptest! {
    #[test]
    fn kendall_bounded_by_pair_count(seed in 0u64..500) {
        let mut rng = crate::rng::seeded(seed);
        let items = rng.gen_range(2..=8usize);
        let a = random_partial_ranking(items, &mut rng);
        let b = random_partial_ranking(items, &mut rng);
        let d = kendall_partial(&a, &b, 0.5).unwrap();
        let pairs = items * (items - 1) / 2;
        prop_assert!(d <= pairs as f64);
    }
}
