//! Seeded random games: generate, persist, reload and check the gap
//! against the brute-force oracle.

use cce::eval::{brute_force_cce_gap, cce_gap};
use cce::experiment::{load_instance, persist_instance};
use cce::games::{random_game, RandomGameParams};
use cce::joint::run_cfr_jr;

fn main() -> cce::Result<()> {
    let dir = std::env::temp_dir().join("cce-random-instances");
    std::fs::create_dir_all(&dir).map_err(|e| cce::Error::Config(format!("{}: {e}", dir.display())))?;
    for seed in 0..5 {
        let mut params = RandomGameParams::new(2, 3, seed);
        params.chance_freq = 0.3;
        let game = random_game(&params)?;
        let path = dir.join(format!("r2-3-{seed}.json"));
        persist_instance(&game, &path)?;
        let game = load_instance(&path)?;
        let (x, _) = run_cfr_jr(&game, 200, 0);
        let fast = cce_gap(&game, &x);
        let slow = brute_force_cce_gap(&game, &x, 100_000)?;
        println!(
            "seed {seed}: {} terminals, support {}, ε {:.3e} (brute force {:.3e})",
            game.num_terminals(),
            x.len(),
            fast.epsilon,
            slow.epsilon
        );
    }
    println!("instances in {}", dir.display());
    Ok(())
}
