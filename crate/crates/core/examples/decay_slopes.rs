//! Power-law decay of |F| along rays: cubic at infinity off the z-axis,
//! quadratic towards the origin.

use monad_hym::ansatz;
use monad_hym::Point3;

fn main() -> monad_hym::Result<()> {
    let rays = [
        ("generic (1,1,0), r∈[10,10³]", Point3::real(1.0, 1.0, 0.0), 10.0, 1e3),
        ("tilted (1,0,1), r∈[10,10³]", Point3::real(1.0, 0.0, 1.0), 10.0, 1e3),
        ("origin (1,0,0), r∈[10⁻³,10⁻¹]", Point3::real(1.0, 0.0, 0.0), 1e-3, 0.1),
    ];
    for (label, ray, lo, hi) in rays {
        let fit = ansatz::decay_slope(&ray, lo, hi, 9)?;
        println!("{label}: slope {:.4} (R² {:.6})", fit.slope, fit.r2);
    }
    Ok(())
}
