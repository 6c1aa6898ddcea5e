//! Curvature of the reflexive-sheaf ansatz over C³: the mean curvature against
//! its weight ℓ, the cancellation inequality and the formula-vs-FD oracle.

use monad_hym::ansatz::{self, Chart};
use monad_hym::monad::{curvature, curvature_fd_check};
use monad_hym::sampling::{log_uniform_points, stream};
use monad_hym::{Point3, C64};

fn main() -> monad_hym::Result<()> {
    let m = ansatz::ansatz_monad();
    for p in [Point3::real(1.0, 0.0, 0.0), Point3::real(0.0, 0.0, 4.0), Point3::real(3.0, -2.0, 50.0)] {
        let rep = curvature(&m, &p)?;
        println!(
            "{:?}: |F| {:.4e}, |iΛF| {:.4e}, ℓ {:.4e}",
            p.to_real(),
            rep.norm_f(),
            rep.norm_mean(),
            ansatz::ell(&p)?
        );
    }

    let pts = log_uniform_points(&mut stream(0, 1), 2000, 1e-3, 1e3);
    let mut sup: f64 = 0.0;
    for p in &pts {
        sup = sup.max(ansatz::mean_curvature_ratio(p, 0)?);
    }
    println!("sup |iΛF|/ℓ over {} log-uniform points: {sup:.4}", pts.len());

    for t in [1.0, 10.0, 100.0, 1000.0] {
        let (lhs, rhs) = ansatz::cancellation(&Point3::real(t, 0.0, 0.0))?;
        println!("cancellation at ({t},0,0): lhs {lhs:.5e}, rhs {rhs:.5e}, |lhs|/rhs {:.4}", lhs.abs() / rhs);
    }

    let p = Point3::new(C64::new(0.7, 0.2), C64::new(-0.4, 0.3), C64::new(0.5, -0.6));
    for h in [2e-3, 1e-3, 5e-4] {
        let e = curvature_fd_check(&m, &p, &|q| ansatz::chart_frame(Chart::X, q), h)?;
        println!("FD oracle h={h:e}: relative error {:.3e}", e.relative_error);
    }
    Ok(())
}
