//! Charge-one ADHM instantons on C²: ASD residuals, charge and the framed
//! moduli label of the diagonal sub-family.

use monad_hym::adhm::{self, AdhmData, ChargeResolution};
use monad_hym::sampling::{complex_normal, stream};
use monad_hym::{Point3, C64};

fn main() -> monad_hym::Result<()> {
    let mut rng = stream(1, 0);
    for d in [AdhmData::real(1.0, 0.0, 0.0, 1.0), AdhmData::real(2.0, 0.0, 0.0, 2.0)] {
        let scale = adhm::curvature_scale(&d);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let p = Point3::c2(complex_normal(&mut rng) * scale, complex_normal(&mut rng) * scale);
            worst = worst.max(adhm::asd_check(&d, &p)?);
        }
        let q = adhm::charge(&d, 20.0 * scale, &ChargeResolution::default())?;
        println!(
            "a=({}, {}) scale {scale:.2}: max ASD residual {worst:.2e}, charge {:.6} (tail {:.1e})",
            d.a1, d.a2, q.charge, q.tail
        );
    }
    for cc in [C64::new(4.0, 0.0), C64::new(-3.0, 4.0), C64::new(0.0, 0.0)] {
        let point = adhm::framed_moduli_point(&AdhmData::diagonal(cc.sqrt()))?;
        let label = point.label.map(|[u, v]| format!("({u:.4}, {v:.4})")).unwrap_or_default();
        println!("diagonal data with a₁b₂ = {cc}: label {label}, cone point {}", point.cone_point);
    }
    Ok(())
}
