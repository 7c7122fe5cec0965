use cce::efg::{behavioral_reach, validate, BehavioralStrategy, GameTree, NodeKind};
use cce::games::{goofspiel, GameSpec, PrizeOrder, TieRule};

/// Scores a Goofspiel history from its action labels alone.
fn replay(players: usize, ranks: usize, rule: &str, labels: &[&str]) -> (Vec<f64>, usize) {
    let mut hands: Vec<Vec<usize>> = vec![(1..=ranks).collect(); players];
    let mut prizes: Vec<usize> = (1..=ranks).collect();
    let mut scores = vec![0.0; players];
    let mut pot = 0;
    let mut rest = labels;
    loop {
        let (prize, bids) = if prizes.len() == 1 {
            (prizes[0], hands.iter().map(|h| h[0]).collect::<Vec<_>>())
        } else {
            let prize: usize = rest[0].strip_prefix("prize ").unwrap().parse().unwrap();
            let bids = rest[1..=players].iter().map(|b| b.parse().unwrap()).collect();
            rest = &rest[players + 1..];
            (prize, bids)
        };
        prizes.retain(|&p| p != prize);
        pot += prize;
        let n = |v: usize| bids.iter().filter(|&&b| b == v).count();
        let all_same = bids.iter().all(|&b| b == bids[0]);
        let discard = match rule {
            "AL" => bids.iter().any(|&b| n(b) > 1),
            "DA" => all_same,
            "DH" => n(ranks) > 1,
            _ => false,
        };
        let winner = (0..players).filter(|&p| n(bids[p]) == 1).max_by_key(|&p| bids[p]);
        if rule == "A" && all_same {
            // stays in the pot
        } else if discard || winner.is_none() {
            pot = 0;
        } else {
            scores[winner.unwrap()] += pot as f64;
            pot = 0;
        }
        for (h, b) in hands.iter_mut().zip(&bids) {
            h.retain(|c| c != b);
        }
        if prizes.is_empty() {
            assert!(rest.is_empty());
            return (scores, pot);
        }
    }
}

fn terminal_histories(g: &GameTree) -> Vec<(usize, Vec<String>)> {
    (0..g.num_terminals())
        .map(|z| (z, g.history(g.terminal_node(z)).into_iter().map(String::from).collect()))
        .collect()
}

#[test]
fn goofspiel_2_3_al_matches_replay() {
    let g = goofspiel(2, 3, TieRule::DiscardAlways, PrizeOrder::Shuffled).unwrap();
    assert_eq!(g.num_terminals(), 6 * 36);
    for (z, h) in terminal_histories(&g) {
        let labels: Vec<&str> = h.iter().map(String::as_str).collect();
        let (scores, _) = replay(2, 3, "AL", &labels);
        assert_eq!(g.payoffs(z), scores.as_slice(), "{labels:?}");
    }
}

#[test]
fn every_rule_matches_replay() {
    for players in [2, 3] {
        for rule in TieRule::ALL {
            let g = goofspiel(players, 3, rule, PrizeOrder::Shuffled).unwrap();
            for (z, h) in terminal_histories(&g) {
                let labels: Vec<&str> = h.iter().map(String::as_str).collect();
                let (scores, _) = replay(players, 3, rule.code(), &labels);
                assert_eq!(g.payoffs(z), scores.as_slice(), "{rule} {labels:?}");
            }
        }
    }
}

#[test]
fn accumulate_conserves_prizes() {
    for players in [2, 3] {
        for ranks in [2, 3, 4] {
            if players == 3 && ranks == 4 {
                continue;
            }
            let g = goofspiel(players, ranks, TieRule::Accumulate, PrizeOrder::Shuffled).unwrap();
            let total = (ranks * (ranks + 1) / 2) as f64;
            for (z, h) in terminal_histories(&g) {
                let labels: Vec<&str> = h.iter().map(String::as_str).collect();
                let (_, leftover) = replay(players, ranks, "A", &labels);
                let paid: f64 = g.payoffs(z).iter().sum();
                assert_eq!(paid + leftover as f64, total, "{labels:?}");
            }
        }
    }
}

#[test]
fn descending_order_skips_chance() {
    let g = goofspiel(2, 3, TieRule::Accumulate, PrizeOrder::Descending).unwrap();
    assert!(g.nodes().iter().all(|n| !matches!(n.kind, NodeKind::Chance { .. })));
    let z = g.find_terminal(&["3", "3", "1", "2"]).unwrap();
    // tie on 3 carries over; player 1 wins 3 + 2; prize 1 forced 2 vs 1
    assert_eq!(g.payoffs(z), &[1.0, 5.0]);
}

#[test]
fn corpus_validates() {
    let specs = [
        "K3-3", "K3-4", "K3-6", "L3-3", "G2-3-A", "G2-3-DA", "G2-3-DH", "G2-3-AL", "G3-3-AL", "G2-4-AL:descending",
        "SHAPLEY", "M:coordination", "M:shapley", "R2-3", "R3-4:seed=9,chance=0.5", "R2-3:branching=3,lo=-1,hi=2",
    ];
    for spec in specs {
        let g: GameTree = spec.parse::<GameSpec>().unwrap().build().unwrap();
        let diags = validate(&g);
        assert!(diags.is_empty(), "{spec}: {diags:?}");
        let reach: Vec<Vec<f64>> = (0..g.num_players())
            .map(|p| behavioral_reach(&g, &BehavioralStrategy::uniform(&g, p)).unwrap().terminals)
            .collect();
        let mass: f64 = (0..g.num_terminals())
            .map(|z| g.chance_reach(z) * reach.iter().map(|r| r[z]).product::<f64>())
            .sum();
        assert!((mass - 1.0).abs() < 1e-9, "{spec}: {mass}");
    }
}
