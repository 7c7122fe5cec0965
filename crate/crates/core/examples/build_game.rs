//! Build a small game by hand, validate it, and inspect its plans.

use cce::efg::{diagnose, enumerate_plans, plan_reach, validate, Draft, GameTree, DEFAULT_PLAN_CAP};

fn draft(hide_first_move: bool) -> Draft {
    let reply = |first: &str| Draft::Decision {
        player: 1,
        infoset: if hide_first_move { "reply".into() } else { format!("after {first}") },
        actions: vec![
            ("x".into(), Draft::Terminal(vec![1.0, -1.0])),
            ("y".into(), Draft::Terminal(vec![-1.0, 1.0])),
        ],
    };
    Draft::Chance(vec![
        ("heads".into(), 0.5, Draft::Decision {
            player: 0,
            infoset: "coin".into(),
            actions: vec![("a".into(), reply("a")), ("b".into(), reply("b"))],
        }),
        ("tails".into(), 0.5, Draft::Terminal(vec![0.0, 0.0])),
    ])
}

fn main() -> cce::Result<()> {
    let game = GameTree::from_draft(2, draft(true))?;
    println!("{} nodes, {} terminals, {} infosets", game.nodes().len(), game.num_terminals(), game.infosets().len());
    assert!(validate(&game).is_empty());
    for p in 0..2 {
        for plan in enumerate_plans(&game, p, DEFAULT_PLAN_CAP)? {
            println!("player {p} plan {:?} reaches terminals {:?}", plan.choices, plan_reach(&game, &plan)?.support());
        }
    }

    // a mismatched action list inside one infoset is reported, not panicked on
    let mut broken = draft(true);
    if let Draft::Chance(outcomes) = &mut broken {
        if let Draft::Decision { actions, .. } = &mut outcomes[0].2 {
            if let Draft::Decision { actions: reply, .. } = &mut actions[1].1 {
                reply.push(("z".into(), Draft::Terminal(vec![0.0, 0.0])));
            }
        }
    }
    for d in diagnose(2, broken) {
        println!("diagnostic: {d}");
    }
    Ok(())
}
