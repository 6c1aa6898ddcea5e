//! Near the z-axis the ansatz bubbles off an ADHM instanton of size |ζ|^{1/2};
//! the difference decays like |ζ|⁻².

use monad_hym::ansatz;
use monad_hym::verify::unit_planar_points;
use monad_hym::C64;

fn main() -> monad_hym::Result<()> {
    let pts = unit_planar_points(200, 5);
    for zeta in [C64::new(100.0, 0.0), C64::new(400.0, 0.0), C64::new(0.0, 400.0), C64::new(1600.0, 0.0)] {
        let r = ansatz::instanton_comparison(zeta, &pts)?;
        let label = ansatz::fueter_map(zeta)?
            .label
            .map(|[u, v]| format!("({u:.4}, {v:.4})"))
            .unwrap_or_default();
        println!(
            "ζ = {zeta}: sup diff {:.3e}, |ζ|²·diff {:.4}, sup |F_inst| {:.3e}, Fueter label {label}",
            r.sup_difference, r.scaled, r.sup_instanton
        );
    }
    Ok(())
}
