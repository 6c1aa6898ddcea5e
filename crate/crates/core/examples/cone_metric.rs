//! The tangent cone at the origin is Hermitian Yang–Mills; the same monad with
//! a constant ambient metric is not.

use monad_hym::ansatz;
use monad_hym::sampling::{log_uniform_points, stream};

fn main() -> monad_hym::Result<()> {
    let pts = log_uniform_points(&mut stream(2, 3), 50, 0.1, 5.0);
    let (mut cone, mut flat) = (0.0f64, f64::INFINITY);
    for p in &pts {
        cone = cone.max(ansatz::cone_residual(p, false)?);
        flat = flat.min(ansatz::cone_residual(p, true)?);
    }
    println!("cone metric: max |iΛF| {cone:.2e} over {} points", pts.len());
    println!("constant metric: min |iΛF| {flat:.3e}");
    Ok(())
}
