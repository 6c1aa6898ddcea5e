//! Growth degrees of Koszul sections at the origin and at infinity, and the
//! log-convexity of ball integrals under the cone metric.

use monad_hym::growth::{self, BallSamples, KoszulSection};
use monad_hym::C64;

fn main() -> monad_hym::Result<()> {
    let samples = BallSamples::new(4096, 1);
    let t3 = KoszulSection::t3();
    let one = C64::new(1.0, 0.0);
    let family = [
        KoszulSection::t1(),
        KoszulSection::t2(),
        t3.clone(),
        t3.times(one, [0, 0, 1]),
        t3.times(one, [0, 0, 2]),
    ];
    let table = growth::filtration_table(&family, &samples)?;
    println!("{:>8} {:>8} {:>8}", "section", "d0", "d_inf");
    for r in &table.rows {
        println!("{:>8} {:>8.4} {:>8.4}", r.section, r.d0, r.d_inf);
    }
    println!("filtrations differ: {}", table.filtrations_differ);
    println!("larger at infinity: {:?}", table.larger_at_infinity);

    let mixed = t3.plus(&t3.times(C64::new(4.0, 0.0), [0, 0, 2]));
    for (name, s) in [("t3", &t3), ("t3 + 4z²t3", &mixed)] {
        let c = growth::convexity_check(s, &samples, 16)?;
        println!("convexity {name}: residual {:.3e} ± {:.1e}", c.residual, c.stderr);
    }
    Ok(())
}
