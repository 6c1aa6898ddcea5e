//! Charge-one ADHM data over C²: residuals, instanton monads, anti-self-duality,
//! charge quadrature and framed-moduli normal forms.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{c, cmat_from_rows, CMat, Point3, C64};
use crate::monad::{curvature, curvature_projector, AffineMonad, DiagWeight, FdOnly, Monad};

/// Tolerance on both ADHM residuals for data to count as valid.
pub const VALID_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdhmData {
    pub a1: C64,
    pub a2: C64,
    pub b1: C64,
    pub b2: C64,
}

impl AdhmData {
    pub fn new(a1: C64, a2: C64, b1: C64, b2: C64) -> Self {
        Self { a1, a2, b1, b2 }
    }

    pub fn real(a1: f64, a2: f64, b1: f64, b2: f64) -> Self {
        Self::new(c(a1), c(a2), c(b1), c(b2))
    }

    /// The sub-family `(c, 0, 0, c)`.
    pub fn diagonal(cc: C64) -> Self {
        Self::new(cc, c(0.0), c(0.0), cc)
    }

    /// `(a₁b₁ + a₂b₂, |a₁|²+|a₂|² − |b₁|²−|b₂|²)`.
    pub fn residual(&self) -> (C64, f64) {
        (
            self.a1 * self.b1 + self.a2 * self.b2,
            self.a1.norm_sqr() + self.a2.norm_sqr() - self.b1.norm_sqr() - self.b2.norm_sqr(),
        )
    }

    pub fn is_degenerate(&self) -> bool {
        [self.a1, self.a2, self.b1, self.b2].iter().all(|z| z.norm() == 0.0)
    }

    pub fn is_valid(&self) -> bool {
        let (cr, rr) = self.residual();
        let scale = self.a1.norm_sqr() + self.a2.norm_sqr() + 1.0;
        cr.norm() <= VALID_TOL * scale && rr.abs() <= VALID_TOL * scale
    }

    /// `(a₁e^{iθ}, a₂e^{iθ}, b₁e^{-iθ}, b₂e^{-iθ})`.
    pub fn rotate(&self, theta: f64) -> Self {
        let u = C64::from_polar(1.0, theta);
        Self::new(self.a1 * u, self.a2 * u, self.b1 * u.conj(), self.b2 * u.conj())
    }
}

/// `α = (x, y, a₁, a₂)ᵗ`, `β = (−y, x, b₁, b₂)`, flat metrics; no validity check.
pub fn raw_monad(d: &AdhmData) -> AffineMonad {
    let (o, z) = (c(1.0), c(0.0));
    let a0 = cmat_from_rows(4, 1, &[z, z, d.a1, d.a2]);
    let ax = cmat_from_rows(4, 1, &[o, z, z, z]);
    let ay = cmat_from_rows(4, 1, &[z, o, z, z]);
    let b0 = cmat_from_rows(1, 4, &[z, z, d.b1, d.b2]);
    let bx = cmat_from_rows(1, 4, &[z, o, z, z]);
    let by = cmat_from_rows(1, 4, &[-o, z, z, z]);
    AffineMonad::new(
        2,
        (a0, [ax, ay, CMat::zeros(4, 1)]),
        (b0, [bx, by, CMat::zeros(1, 4)]),
        [vec![DiagWeight::ONE], vec![DiagWeight::ONE; 4], vec![DiagWeight::ONE]],
    )
    .expect("fixed shapes")
}

pub fn instanton_monad(d: &AdhmData) -> Result<AffineMonad> {
    if d.is_degenerate() {
        return Err(Error::InvalidInput("degenerate ADHM data gives the flat connection".into()));
    }
    if !d.is_valid() {
        let (cr, rr) = d.residual();
        return Err(Error::InvalidInput(format!(
            "ADHM equations violated: complex {:.3e}, real {rr:.3e}",
            cr.norm()
        )));
    }
    Ok(raw_monad(d))
}

/// `|iΛF| + |F^{0,2}| + |F^{2,0}|` at `p` (z ignored). Valid data use the
/// closed-form curvature; data violating the ADHM equations fall back to the
/// projector route, which is the only meaningful one there.
pub fn asd_check(d: &AdhmData, p: &Point3) -> Result<f64> {
    let p = Point3::c2(p.x(), p.y());
    if d.is_valid() {
        Ok(curvature(&instanton_monad(d)?, &p)?.asd_residual())
    } else {
        asd_check_fd(d, &p, 1e-4)
    }
}

/// Same residual from finite differences of the fibre projector only.
pub fn asd_check_fd(d: &AdhmData, p: &Point3, h: f64) -> Result<f64> {
    let m = raw_monad(d);
    let p = Point3::c2(p.x(), p.y());
    let step = h / curvature_scale(d).max(1.0);
    Ok(curvature_projector(&FdOnly(&m), &p, step)?.asd_residual())
}

/// `|F|²` of the instanton at `p`.
pub fn density(m: &dyn Monad, p: &Point3) -> Result<f64> {
    Ok(curvature(m, p)?.norm_f().powi(2))
}

/// `√(|a₁|²+|a₂|²)`; the instanton is concentrated on `|p| ≲` this length.
pub fn curvature_scale(d: &AdhmData) -> f64 {
    (d.a1.norm_sqr() + d.a2.norm_sqr()).sqrt()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChargeResolution {
    /// Gauss–Legendre nodes per radial panel.
    pub radial: usize,
    /// Gauss–Legendre nodes in the Hopf angle.
    pub polar: usize,
    /// Trapezoid nodes per azimuth.
    pub azimuthal: usize,
}

impl Default for ChargeResolution {
    fn default() -> Self {
        Self {
            radial: 10,
            polar: 8,
            azimuthal: 6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChargeReport {
    /// `(1/8π²)∫|F|²` including the tail estimate.
    pub charge: f64,
    pub inner: f64,
    /// Estimate of the contribution from `|p| > R`, assuming `|F|² ∼ |p|⁻⁸`.
    pub tail: f64,
    /// Set when the tail exceeds 5% of the total.
    pub under_resolved: bool,
}

/// Gauss–Legendre nodes and weights on `[a, b]` (Newton on Legendre polynomials).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w));
    }
    out
}

/// Integral of `f` over the 3-sphere of radius `r` in C², parametrized by
/// `x = r cos η e^{iφ₁}`, `y = r sin η e^{iφ₂}` (measure `r³ sin η cos η`).
fn sphere_integral(f: &(dyn Fn(&Point3) -> Result<f64> + Sync), r: f64, res: &ChargeResolution) -> Result<f64> {
    let etas = gauss_legendre(res.polar, 0.0, PI / 2.0);
    let nphi = res.azimuthal;
    let dphi = 2.0 * PI / nphi as f64;
    let mut acc = 0.0;
    for &(eta, we) in &etas {
        for i in 0..nphi {
            for k in 0..nphi {
                let p = Point3::c2(
                    C64::from_polar(r * eta.cos(), (i as f64 + 0.5) * dphi),
                    C64::from_polar(r * eta.sin(), k as f64 * dphi),
                );
                acc += we * dphi * dphi * eta.sin() * eta.cos() * f(&p)?;
            }
        }
    }
    Ok(acc * r.powi(3))
}

/// Radial panels `[0, s/16], [s/16, s/8], …` doubling up to `R`, `s` the scale.
fn radial_panels(scale: f64, r_max: f64) -> Vec<(f64, f64)> {
    let mut edges = vec![0.0];
    let mut e = scale / 16.0;
    while e < r_max {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(r_max);
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Integral of a radially decaying density over the ball `|p| ≤ R` of C² plus
/// an `|p|⁻⁸` tail. Panels run in parallel; the sum is taken in panel order.
pub fn ball_integral(
    f: &(dyn Fn(&Point3) -> Result<f64> + Sync),
    scale: f64,
    r_max: f64,
    res: &ChargeResolution,
) -> Result<(f64, f64)> {
    let panels = radial_panels(scale, r_max);
    let parts: Vec<Result<f64>> = panels
        .par_iter()
        .map(|&(a, b)| {
            gauss_legendre(res.radial, a, b)
                .into_iter()
                .map(|(r, w)| sphere_integral(f, r, res).map(|v| v * w))
                .sum()
        })
        .collect();
    let mut inner = 0.0;
    for p in parts {
        inner += p?;
    }
    // Shell integrand ∼ r⁻⁵ beyond R: ∫_R^∞ I(R)(R/r)⁵ dr = I(R)·R/4.
    let tail = sphere_integral(f, r_max, res)? * r_max / 4.0;
    Ok((inner, tail))
}

/// `(1/8π²)∫_{|p|≤R}|F|²` plus tail.
pub fn charge(d: &AdhmData, r_max: f64, res: &ChargeResolution) -> Result<ChargeReport> {
    if d.is_degenerate() {
        return Ok(ChargeReport {
            charge: 0.0,
            inner: 0.0,
            tail: 0.0,
            under_resolved: false,
        });
    }
    let m = instanton_monad(d)?;
    let f = |p: &Point3| density(&m, p);
    let (inner, tail) = ball_integral(&f, curvature_scale(d), r_max, res)?;
    let norm = 8.0 * PI * PI;
    let total = (inner + tail) / norm;
    Ok(ChargeReport {
        charge: total,
        inner: inner / norm,
        tail: tail / norm,
        under_resolved: tail / norm > 0.05 * total.abs(),
    })
}

/// Representative of `{ab = 0, |a| = |b|}/U(1)` plus, on the sub-family
/// `a₂ = b₁ = 0`, the C²/Z₂ label `(√(a₁b₂), 0)` with a canonical sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FramedModuliPoint {
    pub normal_form: AdhmData,
    pub label: Option<[C64; 2]>,
    pub cone_point: bool,
}

/// Picks the sign of `±v` whose first nonzero coordinate has positive real part
/// (positive imaginary part if the real part vanishes).
pub fn canonical_sign(v: [C64; 2]) -> [C64; 2] {
    let lead = if v[0].norm() > 0.0 { v[0] } else { v[1] };
    let flip = lead.re < 0.0 || (lead.re == 0.0 && lead.im < 0.0);
    if flip {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// `ζ ↦ (ζ^{1/2}, 0)` modulo ±.
pub fn fueter_label(zeta: C64) -> [C64; 2] {
    canonical_sign([zeta.sqrt(), c(0.0)])
}

pub fn framed_moduli_point(d: &AdhmData) -> Result<FramedModuliPoint> {
    if d.is_degenerate() {
        return Ok(FramedModuliPoint {
            normal_form: *d,
            label: Some([c(0.0), c(0.0)]),
            cone_point: true,
        });
    }
    if !d.is_valid() {
        return Err(Error::InvalidInput("framed moduli need valid ADHM data".into()));
    }
    let lead = if d.a1.norm() > 0.0 { d.a1 } else { d.a2 };
    let normal_form = d.rotate(-lead.arg());
    let label = (d.a2.norm() == 0.0 && d.b1.norm() == 0.0).then(|| fueter_label(d.a1 * d.b2));
    Ok(FramedModuliPoint {
        normal_form,
        label,
        cone_point: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_normal, stream, unit_sphere};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Random valid data: a random, b ⟂ā-rotated with |b| = |a|.
    pub(crate) fn random_data(seed: u64) -> AdhmData {
        let mut rng = stream(seed, 0);
        let a1 = complex_normal(&mut rng);
        let a2 = complex_normal(&mut rng);
        let lam = C64::from_polar(1.0, complex_normal(&mut rng).re);
        AdhmData::new(a1, a2, -a2 * lam, a1 * lam)
    }

    #[test]
    fn residual_examples() {
        let (cr, rr) = AdhmData::real(1.0, 0.0, 0.0, 1.0).residual();
        assert_eq!((cr.norm(), rr), (0.0, 0.0));
        let z = AdhmData::real(0.0, 0.0, 0.0, 0.0);
        assert!(z.is_degenerate());
        let (cr, rr) = AdhmData::real(1.0, 0.0, 1.0, 0.0).residual();
        assert_eq!((cr, rr), (c(1.0), 0.0));
    }

    #[test]
    fn monad_validity() {
        let m = instanton_monad(&AdhmData::real(1.0, 0.0, 0.0, 1.0)).unwrap();
        let v = crate::monad::validate_monad(&m, &Point3::real(0.0, 0.0, 0.0));
        assert!(v.regular() && v.beta_alpha_residual == 0.0);
        assert_eq!(m.rank(), 2);
        let v = crate::monad::validate_monad(&raw_monad(&AdhmData::real(0.0, 0.0, 0.0, 0.0)), &Point3::real(0.0, 0.0, 0.0));
        assert!(!v.alpha_injective);
        assert!(instanton_monad(&AdhmData::real(1.0, 0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn asd_examples() {
        let p = Point3::real(0.3, -0.7, 0.0);
        assert!(asd_check(&AdhmData::real(1.0, 0.0, 0.0, 1.0), &p).unwrap() <= 1e-8);
        let bad = asd_check(&AdhmData::real(1.0, 0.0, 1.0, 0.0), &Point3::new(C64::new(0.4, 0.2), C64::new(-0.3, 0.5), c(0.0))).unwrap();
        assert!(bad > 0.01, "{bad}");
    }

    #[test]
    fn analytic_and_projector_curvature_agree() {
        let d = random_data(11);
        let m = instanton_monad(&d).unwrap();
        let p = Point3::c2(C64::new(0.2, 0.9), C64::new(-0.6, 0.1));
        let a = curvature(&m, &p).unwrap();
        let b = curvature_projector(&FdOnly(&m), &p, 1e-4).unwrap();
        assert!(a.f.max_entry_diff(&b.f).unwrap() < 1e-6 * a.f.max_entry());
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let q = gauss_legendre(5, 0.0, 2.0);
        let v: f64 = q.iter().map(|(x, w)| w * x.powi(9)).sum();
        assert_abs_diff_eq!(v, 2f64.powi(10) / 10.0, epsilon = 1e-10);
    }

    #[test]
    fn ball_quadrature_on_a_known_profile() {
        // 48λ⁴/(r²+λ²)⁴ integrates to 8π² over C² for every λ.
        for lam in [0.5f64, 1.0, 3.0] {
            let f = move |p: &Point3| Ok(48.0 * lam.powi(4) / (p.norm_sqr() + lam * lam).powi(4));
            let (inner, tail) = ball_integral(&f, lam, 20.0 * lam, &ChargeResolution::default()).unwrap();
            assert_abs_diff_eq!((inner + tail) / (8.0 * PI * PI), 1.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn moduli_normal_forms() {
        let d = AdhmData::new(C64::from_polar(1.0, PI / 3.0), c(0.0), c(0.0), C64::from_polar(1.0, -PI / 3.0));
        let nf = framed_moduli_point(&d).unwrap().normal_form;
        for (u, v) in [(nf.a1, 1.0), (nf.a2, 0.0), (nf.b1, 0.0), (nf.b2, 1.0)] {
            assert!((u - c(v)).norm() < 1e-12);
        }
        let l = framed_moduli_point(&AdhmData::real(2.0, 0.0, 0.0, 2.0)).unwrap().label.unwrap();
        assert!((l[0] - c(2.0)).norm() < 1e-12 && l[1].norm() == 0.0);
        assert!(framed_moduli_point(&AdhmData::real(0.0, 0.0, 0.0, 0.0)).unwrap().cone_point);
        assert_eq!(curvature_scale(&AdhmData::real(2.0, 0.0, 0.0, 2.0)), 2.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn u1_orbit_invariance(seed in 0u64..1000, theta in 0.0f64..6.28) {
            let d = random_data(seed);
            let e = d.rotate(theta);
            prop_assert!(e.is_valid());
            let a = framed_moduli_point(&d).unwrap();
            let b = framed_moduli_point(&e).unwrap();
            let diff = [a.normal_form.a1 - b.normal_form.a1, a.normal_form.a2 - b.normal_form.a2,
                        a.normal_form.b1 - b.normal_form.b1, a.normal_form.b2 - b.normal_form.b2];
            prop_assert!(diff.iter().all(|z| z.norm() < 1e-9));
            prop_assert!((curvature_scale(&d) - curvature_scale(&e)).abs() < 1e-12);
            let mut rng = stream(seed, 1);
            let p = unit_sphere(&mut rng, 2);
            let ra = curvature(&instanton_monad(&d).unwrap(), &p).unwrap();
            let rb = curvature(&instanton_monad(&e).unwrap(), &p).unwrap();
            prop_assert!((ra.norm_f() - rb.norm_f()).abs() < 1e-9);
            prop_assert!(asd_check(&e, &p).unwrap() < 1e-9);
        }
    }
}
