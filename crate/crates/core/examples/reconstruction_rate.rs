//! CFR-Jr-k: reconstructing every k iterations trades accuracy for a
//! smaller joint support.

use cce::games::kuhn3;
use cce::joint::run_cfr_jr_k;

fn main() -> cce::Result<()> {
    let game = kuhn3(4)?;
    for k in [1, 5, 25, 100] {
        let (joint, trace) = run_cfr_jr_k(&game, 2000, k, 0)?;
        let last = trace.last().unwrap();
        println!("k={k:>3}: support {:>6} α {:.3e}", joint.len(), last.report.alpha);
    }
    Ok(())
}
