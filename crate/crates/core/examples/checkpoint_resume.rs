//! Stop a CFR-S run, save a checkpoint, and resume it bit-exactly.

use cce::games::kuhn3;
use cce::joint::{resume, Checkpoint, CfrS, Solver};

fn main() -> cce::Result<()> {
    let game = kuhn3(3)?;
    let path = std::env::temp_dir().join("cce-checkpoint.json");

    let mut solver = CfrS::new(&game, 42);
    for _ in 0..500 {
        solver.step();
    }
    solver.checkpoint().save(&path)?;
    for _ in 0..500 {
        solver.step();
    }

    let mut resumed = resume(&game, &Checkpoint::load(&path)?)?;
    for _ in 0..500 {
        resumed.step();
    }
    println!("resumed at 500, now at {}", resumed.iteration());
    println!("identical state: {}", resumed.checkpoint() == solver.checkpoint());
    println!("α = {:.3e}", resumed.report().unwrap().alpha);
    Ok(())
}
