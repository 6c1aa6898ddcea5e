//! The barrier potential G = ∫ ℓ(x')/|x−x'|⁴ by stratified Monte Carlo, its
//! decay envelope, and the weak-form check of ΔG = −4π³ℓ.

use monad_hym::potential::{self, McParams, WeakParams};
use monad_hym::verify::envelope_points;
use monad_hym::Point3;

fn main() -> monad_hym::Result<()> {
    let mc = McParams::new(1000, 1);
    for p in [Point3::real(2.0, 0.0, 0.0), Point3::real(10.0, 0.0, 0.0), Point3::real(0.0, 0.0, 100.0)] {
        let g = potential::eval_g(&p, &mc)?;
        println!("G{:?} = {:.4} ± {:.4} ({} shells)", p.to_real(), g.estimate, g.stderr, g.shells.len());
    }
    let env = potential::barrier_envelope_check(&envelope_points(100, 1), &mc)?;
    println!("sup G/envelope over 100 points: {:.2}, min G {:.3e}", env.sup_ratio, env.min_g);
    let w = potential::laplacian_weak_check(&Point3::real(0.0, 0.0, 50.0), 5.0, &WeakParams::default(), &mc)?;
    println!("weak Laplacian at (0,0,50): ratio {:.4} ± {:.4}", w.ratio, w.ratio_stderr);
    Ok(())
}
