//! Plain CFR stalls on the Shapley game while CFR-Jr converges.

use cce::games::shapley_efg;
use cce::joint::{run_cfr, run_cfr_jr};

fn main() {
    let game = shapley_efg();
    let (_, cfr) = run_cfr(&game, 10_000, 1000);
    let (_, jr) = run_cfr_jr(&game, 10_000, 1000);
    println!("{:>6} {:>12} {:>12} {:>10}", "t", "CFR α", "CFR-Jr α", "SW ratio");
    for (a, b) in cfr.iter().zip(&jr) {
        let ratio = b.report.sw_ratio.map_or("-".into(), |r| format!("{r:.3}"));
        println!("{:>6} {:>12.4} {:>12.4} {:>10}", a.iteration, a.report.alpha, b.report.alpha, ratio);
    }
}
