use std::collections::HashSet;

use cce::efg::{
    behavioral_reach, canonicalize, count_plans, enumerate_plans, plan_reach, serial, BehavioralStrategy, GameTree,
};
use cce::eval::{realization_equivalence_check, social_welfare, sw_upper_bound};
use cce::games::{random_game, RandomGameParams};
use cce::joint::{nf_strategy_reconstruction, run_cfr_jr};
use cce::regret::regret_matching;
use proptest::prelude::*;

fn small_game() -> impl Strategy<Value = GameTree> {
    (2usize..=3, 1usize..=3, any::<u64>(), 2usize..=3, 0.0f64..0.5).prop_map(|(players, depth, seed, branching, chance)| {
        let mut params = RandomGameParams::new(players, depth, seed);
        params.branching = branching;
        params.chance_freq = chance;
        random_game(&params).unwrap()
    })
}

/// Behavioral strategies for every player built from a flat weight pool.
fn profile(g: &GameTree, pool: &[f64]) -> Vec<BehavioralStrategy> {
    let mut k = 0;
    (0..g.num_players())
        .map(|p| {
            let probs = g
                .view(p)
                .num_actions
                .iter()
                .map(|&n| {
                    let mut w: Vec<f64> = (0..n)
                        .map(|_| {
                            k += 1;
                            pool[k % pool.len()]
                        })
                        .collect();
                    if w.iter().sum::<f64>() == 0.0 {
                        w[0] = 1.0;
                    }
                    let s: f64 = w.iter().sum();
                    w.iter().map(|x| x / s).collect()
                })
                .collect();
            BehavioralStrategy::new(g, p, probs).unwrap()
        })
        .collect()
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], 7..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reconstruction_is_realization_equivalent(g in small_game(), pool in weights()) {
        for pi in profile(&g, &pool) {
            let x = nf_strategy_reconstruction(&g, &pi).unwrap();
            prop_assert!(realization_equivalence_check(&g, &pi, &x));
            prop_assert!(x.support() <= g.num_terminals());
            prop_assert!((x.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_completion_is_a_distribution(g in small_game(), pool in weights()) {
        let reach: Vec<Vec<f64>> = profile(&g, &pool)
            .iter()
            .map(|pi| behavioral_reach(&g, pi).unwrap().terminals)
            .collect();
        for i in 0..g.num_players() {
            let mass: f64 = (0..g.num_terminals())
                .map(|z| {
                    let others: f64 = (0..g.num_players())
                        .filter(|&j| j != i)
                        .map(|j| behavioral_reach(&g, &BehavioralStrategy::uniform(&g, j)).unwrap().terminals[z])
                        .product();
                    g.chance_reach(z) * reach[i][z] * others
                })
                .sum();
            prop_assert!((mass - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn plans_are_unique_and_complete(g in small_game(), choice in prop::collection::vec(0usize..3, 64)) {
        for p in 0..g.num_players() {
            let plans = enumerate_plans(&g, p, 100_000).unwrap();
            prop_assert_eq!(plans.len(), count_plans(&g, p));
            let supports: HashSet<Vec<usize>> = plans.iter().map(|s| plan_reach(&g, s).unwrap().support()).collect();
            prop_assert_eq!(supports.len(), plans.len());
            for s in &plans {
                prop_assert!(!plan_reach(&g, s).unwrap().support().is_empty());
                let det = BehavioralStrategy::from_plan(&g, s);
                prop_assert_eq!(behavioral_reach(&g, &det).unwrap().terminals, plan_reach(&g, s).unwrap().terminals);
            }
            let full: Vec<usize> = g.view(p).num_actions.iter().enumerate().map(|(k, &n)| choice[k % 64] % n).collect();
            prop_assert!(plans.contains(&canonicalize(&g, p, &full)));
        }
    }

    #[test]
    fn regret_matching_is_a_distribution(r in prop::collection::vec(-5.0f64..5.0, 1..8), c in 0.01f64..100.0) {
        let p = regret_matching(&r).unwrap();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let scaled: Vec<f64> = r.iter().map(|x| x * c).collect();
        let q = regret_matching(&scaled).unwrap();
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for (a, x) in p.iter().zip(&r) {
            if *x <= 0.0 && r.iter().any(|&y| y > 0.0) {
                prop_assert_eq!(*a, 0.0);
            }
        }
    }

    #[test]
    fn welfare_below_bound(g in small_game(), iters in 1u64..40) {
        let (x, _) = run_cfr_jr(&g, iters, 0);
        prop_assert!(social_welfare(&g, &x) <= sw_upper_bound(&g) + 1e-9);
    }

    #[test]
    fn random_games_are_deterministic(players in 2usize..=3, depth in 1usize..=4, seed in any::<u64>()) {
        let params = RandomGameParams::new(players, depth, seed);
        let a = random_game(&params).unwrap();
        let b = random_game(&params).unwrap();
        prop_assert_eq!(serial::to_json(&a), serial::to_json(&b));
        prop_assert_eq!(a, b);
    }
}
