//! The reflexive-sheaf ansatz over C³ and everything measured on it.
//!
//! `α = (x, y, 1, 0)ᵗ`, `β = (−y, x, 0, z)`, with fibre metric
//! `h₁ = diag(s^{-1/2}, s^{-1/2}, 1, 1)`, `s = |x⃗|² + 1`, on the middle term.
//! The monad is singular only at the origin, where `β` vanishes.
//!
//! Besides the ansatz itself this module holds the twisted monad used near the
//! z-axis, the Fueter map of its bubbles, and the conical kernel monad that
//! models the tangent cone at the origin.

use rand::Rng;
use serde::Serialize;

use crate::adhm::{self, fueter_label, AdhmData, FramedModuliPoint};
use crate::error::{Error, Result};
use crate::fit::{geomspace, loglog_fit, LinearFit};
use crate::geometry::{
    c, cmat_from_rows, fd_derivative, hermitian_eigenvalues, hermitian_op_norm, inverse,
    singular_values, solve, CMat, Form11, Point3, Wirtinger, C64,
};
use crate::monad::{
    cohomology_frame, curvature, induced_metric, AffineMonad, CurvatureReport, DiagWeight, Monad,
};
use crate::sampling::unit_vector;

fn zero() -> C64 {
    c(0.0)
}

fn e(k: usize, n: usize) -> Vec<C64> {
    (0..n).map(|i| if i == k { c(1.0) } else { zero() }).collect()
}

/// Rows of the linear part `Σ w_j A_j` given per-coordinate unit positions.
fn linear(rows: usize, cols: usize, entries: &[(usize, usize, C64)]) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for &(i, j, v) in entries {
        m[(i, j)] = v;
    }
    m
}

pub fn ansatz_monad() -> AffineMonad {
    let o = c(1.0);
    let w = DiagWeight::radial(1.0, 1.0, -0.5);
    AffineMonad::new(
        3,
        (
            cmat_from_rows(4, 1, &[zero(), zero(), o, zero()]),
            [linear(4, 1, &[(0, 0, o)]), linear(4, 1, &[(1, 0, o)]), CMat::zeros(4, 1)],
        ),
        (
            CMat::zeros(1, 4),
            [linear(1, 4, &[(0, 1, o)]), linear(1, 4, &[(0, 0, -o)]), linear(1, 4, &[(0, 3, o)])],
        ),
        [vec![DiagWeight::ONE], vec![w, w, DiagWeight::ONE, DiagWeight::ONE], vec![DiagWeight::ONE]],
    )
    .expect("fixed shapes")
}

/// Representative weight: `1/((|x|²+|y|²+|z|)|x⃗|)` for `|x⃗| ≥ 1`, `1/|x⃗|²` inside.
pub fn ell(p: &Point3) -> Result<f64> {
    let r = p.norm();
    if r == 0.0 {
        return Err(Error::InvalidInput("weight is singular at the origin".into()));
    }
    Ok(if r >= 1.0 {
        1.0 / ((p.planar_norm_sqr() + p.z().norm()) * r)
    } else {
        1.0 / (r * r)
    })
}

/// Closed-form pieces of the ansatz curvature.
#[derive(Clone, Debug, Serialize)]
pub struct Ingredients {
    pub alpha_alpha: f64,
    pub beta_beta: f64,
    /// `∂̄α†`: `[slot][j]` is the coefficient of `dw̄_j`.
    pub nabla_alpha_dag: [[C64; 3]; 4],
    /// `∇β`: `[slot][j]` is the coefficient of `dw_j`.
    pub nabla_beta: [[C64; 3]; 4],
    /// Ambient curvature `F_{E₁}` is this scalar form times `diag(1, 1, 0, 0)`.
    pub ambient: [[C64; 3]; 3],
}

pub fn closed_form_ingredients(p: &Point3) -> Ingredients {
    let s = p.norm_sqr() + 1.0;
    let planar = p.planar_norm_sqr();
    let (x, y) = (p.x(), p.y());
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut nad = [[zero(); 3]; 4];
    let mut nb = [[zero(); 3]; 4];
    let mut amb = [[zero(); 3]; 3];
    for j in 0..3 {
        let wj = p.w[j];
        nad[0][j] = c(delta(j, 0) / s.sqrt()) - x.conj() * wj / (2.0 * s.powf(1.5));
        nad[1][j] = c(delta(j, 1) / s.sqrt()) - y.conj() * wj / (2.0 * s.powf(1.5));
        nb[0][j] = c(-delta(j, 1)) - y * wj.conj() / (2.0 * s);
        nb[1][j] = c(delta(j, 0)) + x * wj.conj() / (2.0 * s);
        nb[3][j] = c(delta(j, 2));
        for l in 0..3 {
            amb[j][l] = (c(delta(j, l) / s) - p.w[j].conj() * p.w[l] / (s * s)) * 0.5;
        }
    }
    Ingredients {
        alpha_alpha: planar / s.sqrt() + 1.0,
        beta_beta: planar * s.sqrt() + p.z().norm_sqr(),
        nabla_alpha_dag: nad,
        nabla_beta: nb,
        ambient: amb,
    }
}

/// `(|x⃗|²+1)⁻¹(α†α)⁻¹ − (ββ†)⁻¹` and `1/(ββ†·(|x⃗|²+1)^{1/2})`.
pub fn cancellation(p: &Point3) -> Result<(f64, f64)> {
    if p.norm() == 0.0 {
        return Err(Error::InvalidInput("cancellation is undefined at the origin".into()));
    }
    let ing = closed_form_ingredients(p);
    let s = p.norm_sqr() + 1.0;
    let lhs = 1.0 / (s * ing.alpha_alpha) - 1.0 / ing.beta_beta;
    let rhs = 1.0 / (ing.beta_beta * s.sqrt());
    Ok((lhs, rhs))
}

/// Weight of the first-derivative bound: `|x⃗|⁻¹(|x|+|y|+|z|^{1/2})^{-3}`.
pub fn derivative_weight(p: &Point3) -> f64 {
    let q = p.x().norm() + p.y().norm() + p.z().norm().sqrt();
    1.0 / (p.norm() * q.powi(3))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Chart {
    X,
    Y,
}

/// Holomorphic frame of the ansatz bundle: `(0,0,1,0)` and `(z/y,0,0,1)`
/// (y-chart) or `(0,−z/x,0,1)` (x-chart).
pub fn chart_frame(chart: Chart, p: &Point3) -> Result<CMat> {
    let (o, z) = (c(1.0), zero());
    let coord = match chart {
        Chart::X => p.x(),
        Chart::Y => p.y(),
    };
    if coord.norm() == 0.0 {
        return Err(Error::DegenerateFrame(p.to_real()));
    }
    let ratio = p.z() / coord;
    let s2 = match chart {
        Chart::X => [z, -ratio, z, o],
        Chart::Y => [ratio, z, z, o],
    };
    Ok(cmat_from_rows(4, 2, &[z, s2[0], z, s2[1], o, s2[2], z, s2[3]]))
}

#[derive(Clone, Debug)]
pub struct AsymptoticFrame {
    pub sections: CMat,
    pub gram: CMat,
    /// Operator norm of `H₀ − I`.
    pub deviation: f64,
}

pub fn asymptotic_frame(p: &Point3, chart: Chart) -> Result<AsymptoticFrame> {
    let sections = chart_frame(chart, p)?;
    let gram = induced_metric(&ansatz_monad(), p, &sections)?;
    let deviation = hermitian_op_norm(&(&gram - CMat::identity(2, 2)));
    Ok(AsymptoticFrame {
        sections,
        gram,
        deviation,
    })
}

/// `|∇^k(ΛF_E)|` over its weight: `ℓ` for `k = 0`, [`derivative_weight`] for `k = 1`.
pub fn mean_curvature_ratio(p: &Point3, k: u8) -> Result<f64> {
    let m = ansatz_monad();
    match k {
        0 => Ok(curvature(&m, p)?.norm_mean() / ell(p)?),
        1 => {
            let chart = if p.x().norm() >= p.y().norm() { Chart::X } else { Chart::Y };
            Ok(mean_curvature_gradient(&m, p, chart)? / derivative_weight(p))
        }
        _ => Err(Error::InvalidInput(format!("derivative order {k} not supported"))),
    }
}

/// `|∇(iΛF)|` of the ansatz bundle, computed in the holomorphic chart frame
/// `S` (column Gram `G`): `∇_j M = ∂_j M + [G⁻¹∂_j G, M]`, then measured in an
/// orthonormal basis with `|dw_j| = √2`.
pub fn mean_curvature_gradient(m: &dyn Monad, p: &Point3, chart: Chart) -> Result<f64> {
    let coord = match chart {
        Chart::X => p.x(),
        Chart::Y => p.y(),
    }
    .norm();
    let scale = p.x().norm() + p.y().norm() + p.z().norm().sqrt();
    let h = 1e-3 * scale.min(coord).min(p.norm());
    let frame_coords = |q: &Point3| -> Result<(CMat, CMat)> {
        let rep = curvature(m, q)?;
        let cm = rep.fiber.coordinates(&chart_frame(chart, q)?);
        Ok((cm, rep.mean))
    };
    let mean_in_frame = |q: &Point3| -> Result<CMat> {
        let (cm, mean) = frame_coords(q)?;
        Ok(inverse(&cm)? * mean * cm)
    };
    let gram = |q: &Point3| -> Result<CMat> {
        Ok(induced_metric(m, q, &chart_frame(chart, q)?)?.transpose())
    };
    let (cm, _) = frame_coords(p)?;
    let cinv = inverse(&cm)?;
    let m0 = mean_in_frame(p)?;
    let g0 = gram(p)?;
    let mut total = 0.0;
    for j in 0..m.base_dim() {
        let dm = fd_derivative(mean_in_frame, p, j, Wirtinger::Holomorphic, h)?;
        let theta = solve(&g0, &fd_derivative(gram, p, j, Wirtinger::Holomorphic, h)?)?;
        let nabla = dm + &theta * &m0 - &m0 * &theta;
        total += (&cm * nabla * &cinv).norm_squared();
    }
    Ok(2.0 * total.sqrt())
}

/// Sup over random unit fibre vectors of `(|s₁|+|s₂|)` divided by
/// `min((|x⃗|+1)^{1/2}, (|x⃗|+1)/(|x|+|y|))`.
pub fn section_component_bound<R: Rng + ?Sized>(p: &Point3, samples: usize, rng: &mut R) -> Result<f64> {
    let fiber = cohomology_frame(&ansatz_monad(), p)?;
    let r = p.norm();
    let planar = p.x().norm() + p.y().norm();
    let mut weight = (r + 1.0).sqrt();
    if planar > 0.0 {
        weight = weight.min((r + 1.0) / planar);
    }
    let mut sup: f64 = 0.0;
    for _ in 0..samples {
        let u = unit_vector(rng, fiber.rank());
        let u = CMat::from_column_slice(u.len(), 1, &u);
        let s = &fiber.basis * u;
        sup = sup.max((s[(0, 0)].norm() + s[(1, 0)].norm()) / weight);
    }
    Ok(sup)
}

/// Fitted exponent of `|F_E|` along `r ↦ r·ray` at `n` log-spaced radii.
pub fn decay_slope(ray: &Point3, r_lo: f64, r_hi: f64, n: usize) -> Result<LinearFit> {
    let dir = ray.scaled(1.0 / ray.norm());
    let m = ansatz_monad();
    let radii = geomspace(r_lo, r_hi, n);
    let norms = radii
        .iter()
        .map(|&r| curvature(&m, &dir.scaled(r)).map(|rep| rep.norm_f()))
        .collect::<Result<Vec<_>>>()?;
    loglog_fit(&radii, &norms)
}

/// `|F_E|` over the profile `|x⃗|/(|x|²+|y|²)²`.
pub fn decay_profile_ratio(p: &Point3) -> Result<f64> {
    let f = curvature(&ansatz_monad(), p)?.norm_f();
    Ok(f * p.planar_norm_sqr().powi(2) / p.norm())
}

/// The twisted monad `α = (x, y, c, 0)ᵗ`, `β = (−y, x, 0, c)` with `c² = ζ` and
/// metric `diag(1, 1, (|x⃗|²+1)^{1/2}/|ζ|, |ζ|(|x⃗|²+1)^{1/2}/|z|²)`.
#[derive(Clone, Debug)]
pub struct TwistedSpec {
    pub zeta: C64,
    pub root: C64,
    pub monad: AffineMonad,
}

pub fn twisted_monad(zeta: C64, root: C64) -> Result<TwistedSpec> {
    if zeta.norm() < 1.0 {
        return Err(Error::InvalidInput("twisted monad needs |ζ| ≥ 1".into()));
    }
    if (root * root - zeta).norm() > 1e-12 * zeta.norm() {
        return Err(Error::InvalidInput(format!("{root} is not a square root of {zeta}")));
    }
    let (o, z) = (c(1.0), zero());
    let a = zeta.norm();
    let monad = AffineMonad::new(
        3,
        (
            cmat_from_rows(4, 1, &[z, z, root, z]),
            [linear(4, 1, &[(0, 0, o)]), linear(4, 1, &[(1, 0, o)]), CMat::zeros(4, 1)],
        ),
        (
            cmat_from_rows(1, 4, &[z, z, z, root]),
            [linear(1, 4, &[(0, 1, o)]), linear(1, 4, &[(0, 0, -o)]), CMat::zeros(1, 4)],
        ),
        [
            vec![DiagWeight::ONE],
            vec![
                DiagWeight::ONE,
                DiagWeight::ONE,
                DiagWeight::radial(1.0 / a, 1.0, 0.5),
                DiagWeight {
                    scale: a,
                    shift: 1.0,
                    power: 0.5,
                    z_power: -1.0,
                },
            ],
            vec![DiagWeight::ONE],
        ],
    )?;
    Ok(TwistedSpec { zeta, root, monad })
}

pub fn twisted_monad_principal(zeta: C64) -> Result<TwistedSpec> {
    twisted_monad(zeta, zeta.sqrt())
}

impl TwistedSpec {
    /// Holomorphic frame `(0,0,1,0)`, `(0,c,0,−x)`.
    pub fn frame(&self, p: &Point3) -> Result<CMat> {
        let (o, z) = (c(1.0), zero());
        Ok(cmat_from_rows(4, 2, &[z, z, z, self.root, o, z, z, -p.x()]))
    }

    pub fn curvature(&self, p: &Point3) -> Result<CurvatureReport> {
        if p.z().norm() == 0.0 {
            return Err(Error::InvalidInput("twisted metric is singular at z = 0".into()));
        }
        curvature(&self.monad, p)
    }
}

/// `ζ ↦ (ζ^{1/2}, 0)` modulo ±.
pub fn fueter_map(zeta: C64) -> Result<FramedModuliPoint> {
    if zeta.norm() == 0.0 {
        return Err(Error::InvalidInput("Fueter map needs ζ ≠ 0".into()));
    }
    let root = zeta.sqrt();
    let normal_form = AdhmData::diagonal(root);
    let nf = adhm::framed_moduli_point(&normal_form)?;
    Ok(FramedModuliPoint {
        label: Some(fueter_label(zeta)),
        ..nf
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub zeta: C64,
    /// Sup over samples of the largest invariant difference.
    pub sup_difference: f64,
    /// `|ζ|² · sup_difference`.
    pub scaled: f64,
    /// Sup of `|F|` of the instanton over the same samples, for scale.
    pub sup_instanton: f64,
}

/// Gauge-invariant summary of the `(x, y)` block of a curvature form:
/// `[|F|, eigenvalues of F_{xx̄}, eigenvalues of F_{yȳ}, singular values of F_{xȳ}]`.
fn planar_invariants(f: &Form11) -> Vec<f64> {
    let block = Form11::from_fn(2, |j, l| f.get(j, l).clone()).expect("square blocks");
    let mut out = vec![block.norm()];
    out.extend(hermitian_eigenvalues(block.get(0, 0)));
    out.extend(hermitian_eigenvalues(block.get(1, 1)));
    out.extend(singular_values(block.get(0, 1)));
    out
}

/// Compares the twisted-monad curvature on `{z = ζ}` with the instanton of
/// data `(ζ^{1/2}, 0, 0, ζ^{1/2})`. `unit_points` are `(u, v)` with
/// `|u|+|v| ≤ 1`; the evaluation points are `|ζ|^{1/2}(u, v)`.
pub fn instanton_comparison(zeta: C64, unit_points: &[(C64, C64)]) -> Result<ComparisonReport> {
    if zeta.norm() < 100.0 {
        return Err(Error::InvalidInput("instanton comparison needs |ζ| ≥ 100".into()));
    }
    let tw = twisted_monad_principal(zeta)?;
    let inst = adhm::instanton_monad(&AdhmData::diagonal(tw.root))?;
    let s = zeta.norm().sqrt();
    let mut sup: f64 = 0.0;
    let mut sup_inst: f64 = 0.0;
    for &(u, v) in unit_points {
        let (x, y) = (u * s, v * s);
        let a = planar_invariants(&tw.curvature(&Point3::new(x, y, zeta))?.f);
        let b = planar_invariants(&curvature(&inst, &Point3::c2(x, y))?.f);
        sup_inst = sup_inst.max(b[0]);
        let d = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        sup = sup.max(d);
    }
    Ok(ComparisonReport {
        zeta,
        sup_difference: sup,
        scaled: zeta.norm_sqr() * sup,
        sup_instanton: sup_inst,
    })
}

/// `0 → C³ →(x,y,z) C` with metric `|x⃗|⁻¹·I` on `C³` (or `I` when `flat`).
pub fn tangent_cone_origin(flat: bool) -> AffineMonad {
    let o = c(1.0);
    let w = if flat { DiagWeight::ONE } else { DiagWeight::radial(1.0, 0.0, -0.5) };
    AffineMonad::new(
        3,
        (CMat::zeros(3, 0), [CMat::zeros(3, 0), CMat::zeros(3, 0), CMat::zeros(3, 0)]),
        (
            CMat::zeros(1, 3),
            [linear(1, 3, &[(0, 0, o)]), linear(1, 3, &[(0, 1, o)]), linear(1, 3, &[(0, 2, o)])],
        ),
        [vec![], vec![w; 3], vec![DiagWeight::ONE]],
    )
    .expect("fixed shapes")
}

/// Holomorphic frame `(z, 0, −x)`, `(0, z, −y)` of the cone bundle, valid for `z ≠ 0`.
pub fn cone_frame(p: &Point3) -> Result<CMat> {
    if p.z().norm() == 0.0 {
        return Err(Error::DegenerateFrame(p.to_real()));
    }
    let z = zero();
    Ok(cmat_from_rows(3, 2, &[p.z(), z, z, p.z(), -p.x(), -p.y()]))
}

/// `|iΛF|` of the tangent-cone connection.
pub fn cone_residual(p: &Point3, flat: bool) -> Result<f64> {
    if p.norm() == 0.0 {
        return Err(Error::InvalidInput("the cone is singular at the origin".into()));
    }
    Ok(curvature(&tangent_cone_origin(flat), p)?.norm_mean())
}

/// `e` is used by tests and examples that need standard basis sections.
pub fn unit_section(k: usize) -> CMat {
    CMat::from_column_slice(4, 1, &e(k, 4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{adjoint_wrt, MetricMatrix};
    use crate::monad::{curvature_fd_check, Slot};
    use crate::sampling::{apply_su2, phase, stream, su2, unit_sphere};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ingredient_spot_values() {
        let i = closed_form_ingredients(&Point3::real(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(i.alpha_alpha, 1.0 + 0.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(i.beta_beta, 2f64.sqrt(), epsilon = 1e-14);
        let i = closed_form_ingredients(&Point3::real(0.0, 0.0, 10.0));
        assert_abs_diff_eq!(i.alpha_alpha, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(i.beta_beta, 100.0, epsilon = 1e-12);
    }

    /// Printed ingredients against metric adjoints and finite differences.
    #[test]
    fn ingredients_match_adjoints_and_fd() {
        let m = ansatz_monad();
        let p = Point3::new(C64::new(0.7, -0.3), C64::new(0.2, 1.1), C64::new(-0.5, 0.4));
        let ing = closed_form_ingredients(&p);
        let h0 = MetricMatrix::identity(1);
        let alpha_dag = |q: &Point3| {
            adjoint_wrt(&m.alpha(q), &h0, &MetricMatrix::new(m.metric(Slot::E1, q)).unwrap())
        };
        let beta_dag = |q: &Point3| {
            adjoint_wrt(&m.beta(q), &MetricMatrix::new(m.metric(Slot::E1, q)).unwrap(), &h0)
        };
        let ad = alpha_dag(&p).unwrap();
        let ata = (&ad * m.alpha(&p))[(0, 0)].re;
        assert_abs_diff_eq!(ata, ing.alpha_alpha, epsilon = 1e-12);
        let bbt = (m.beta(&p) * beta_dag(&p).unwrap())[(0, 0)].re;
        assert_abs_diff_eq!(bbt, ing.beta_beta, epsilon = 1e-12);
        let h1 = MetricMatrix::new(m.metric(Slot::E1, &p)).unwrap();
        for j in 0..3 {
            let d = fd_derivative(alpha_dag, &p, j, Wirtinger::AntiHolomorphic, 1e-4).unwrap();
            let db = fd_derivative(beta_dag, &p, j, Wirtinger::AntiHolomorphic, 1e-4).unwrap();
            let nb = adjoint_wrt(&db, &h0, &h1).unwrap();
            for slot in 0..4 {
                assert!((d[(0, slot)] - ing.nabla_alpha_dag[slot][j]).norm() < 1e-7);
                assert!((nb[(0, slot)] - ing.nabla_beta[slot][j]).norm() < 1e-7);
            }
            assert_eq!(ing.nabla_beta[2][j], zero());
            assert_eq!(ing.nabla_beta[3][j], c(if j == 2 { 1.0 } else { 0.0 }));
        }
    }

    #[test]
    fn ell_branches() {
        assert_abs_diff_eq!(ell(&Point3::real(1.0, 0.0, 0.0)).unwrap(), 1.0);
        assert_abs_diff_eq!(ell(&Point3::real(0.0, 0.0, 10.0)).unwrap(), 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(ell(&Point3::real(0.1, 0.0, 0.0)).unwrap(), 100.0, epsilon = 1e-9);
        assert!(ell(&Point3::real(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn cancellation_spot_value() {
        let (lhs, rhs) = cancellation(&Point3::real(1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(lhs, -0.41421, epsilon = 1e-5);
        assert_abs_diff_eq!(rhs, 0.5, epsilon = 1e-14);
        // Along (t,0,0) the ratio is s²/(t²+s), s = (t²+1)^{1/2}.
        for t in [1.0f64, 10.0, 100.0] {
            let (lhs, rhs) = cancellation(&Point3::real(t, 0.0, 0.0)).unwrap();
            let s = (t * t + 1.0).sqrt();
            assert_abs_diff_eq!(lhs.abs() / rhs, s * s / (t * t + s), epsilon = 1e-9);
        }
    }

    #[test]
    fn asymptotic_frames() {
        let f = asymptotic_frame(&Point3::real(0.0, 10.0, 0.0), Chart::Y).unwrap();
        assert_abs_diff_eq!(f.gram[(0, 0)].re, 0.90868, epsilon = 1e-5);
        assert_abs_diff_eq!(f.gram[(1, 1)].re, 1.0, epsilon = 1e-12);
        assert!(f.deviation <= 0.1);
        let g = asymptotic_frame(&Point3::real(10.0, 0.0, 0.0), Chart::X).unwrap();
        assert_abs_diff_eq!(g.deviation, f.deviation, epsilon = 1e-12);
        let p = Point3::new(C64::new(1.0, 2.0), C64::new(-0.5, 0.3), C64::new(4.0, -1.0));
        for chart in [Chart::X, Chart::Y] {
            let s = chart_frame(chart, &p).unwrap();
            assert!((ansatz_monad().beta(&p) * s).norm() < 1e-14);
        }
        assert!(chart_frame(Chart::Y, &Point3::real(1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn fd_oracle_on_ansatz() {
        let m = ansatz_monad();
        let p = Point3::real(0.0, 10.0, 0.0);
        let frame = |q: &Point3| chart_frame(Chart::Y, q);
        let chk = curvature_fd_check(&m, &p, &frame, 1e-3).unwrap();
        assert!(chk.relative_error <= 1e-3, "{}", chk.relative_error);
    }

    #[test]
    fn section_bound_on_trivial_section() {
        let fib = cohomology_frame(&ansatz_monad(), &Point3::real(0.0, 10.0, 0.0)).unwrap();
        let s = fib.coordinates(&unit_section(3));
        let v = &fib.basis * s;
        assert!(v[(0, 0)].norm() + v[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn twisted_metric_on_axis() {
        let zeta = C64::new(30.0, 40.0);
        let tw = twisted_monad_principal(zeta).unwrap();
        let h = tw.monad.metric(Slot::E1, &Point3::new(c(0.0), c(0.0), zeta));
        let expect = (2501f64).sqrt() / 50.0;
        assert_abs_diff_eq!(h[(2, 2)].re, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(h[(3, 3)].re, expect, epsilon = 1e-12);
        let p = Point3::new(C64::new(1.0, 2.0), C64::new(0.3, -4.0), zeta);
        assert!((tw.monad.beta(&p) * tw.monad.alpha(&p)).norm() == 0.0);
        let other = twisted_monad(zeta, -tw.root).unwrap();
        let (a, b) = (tw.curvature(&p).unwrap(), other.curvature(&p).unwrap());
        assert_abs_diff_eq!(a.norm_f(), b.norm_f(), epsilon = 1e-9 * a.norm_f());
        assert_abs_diff_eq!(a.norm_mean(), b.norm_mean(), epsilon = 1e-9);
        assert!(twisted_monad(zeta, c(3.0)).is_err());
    }

    #[test]
    fn fueter_labels() {
        let l = fueter_map(c(4.0)).unwrap().label.unwrap();
        assert!((l[0] - c(2.0)).norm() < 1e-12 && l[1].norm() == 0.0);
        let l = fueter_map(c(1.0)).unwrap().label.unwrap();
        assert!((l[0] - c(1.0)).norm() < 1e-12);
        assert!(fueter_map(c(0.0)).is_err());
    }

    #[test]
    fn cone_is_hym_and_flat_metric_is_not() {
        for p in [Point3::real(0.0, 0.0, 1.0), Point3::real(1.0, 1.0, 1.0).scaled(3f64.sqrt().recip())] {
            assert!(cone_residual(&p, false).unwrap() <= 1e-8);
        }
        // With h = I the mean curvature is 2/|x⃗|².
        let r = cone_residual(&Point3::real(0.0, 0.0, 1.0), true).unwrap();
        assert_abs_diff_eq!(r, 2.0, epsilon = 1e-12);
        assert!(cone_residual(&Point3::real(0.0, 0.0, 0.0), false).is_err());
        let fib = cohomology_frame(&tangent_cone_origin(false), &Point3::real(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(fib.rank(), 2);
        assert!(fib.basis.row(2).iter().all(|z| z.norm() < 1e-14));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn su2_and_phase_symmetry(seed in 0u64..10_000, r in 0.05f64..50.0) {
            let mut rng = stream(seed, 0);
            let p = unit_sphere(&mut rng, 3).scaled(r);
            let g = su2(&mut rng);
            let mut q = apply_su2(g, &p);
            q.w[2] *= phase(&mut rng);
            let m = ansatz_monad();
            let (a, b) = (curvature(&m, &p).unwrap(), curvature(&m, &q).unwrap());
            prop_assert!((a.norm_f() - b.norm_f()).abs() <= 1e-8 * a.norm_f().max(1.0));
            prop_assert!((a.norm_mean() - b.norm_mean()).abs() <= 1e-8 * a.norm_mean().max(1.0));
        }

        #[test]
        fn mean_curvature_is_hermitian(seed in 0u64..10_000, r in 0.01f64..100.0) {
            let mut rng = stream(seed, 5);
            let p = unit_sphere(&mut rng, 3).scaled(r);
            let rep = curvature(&ansatz_monad(), &p).unwrap();
            let d = crate::geometry::hermitian_defect(&rep.mean);
            prop_assert!(d <= 1e-10 * rep.norm_mean().max(1.0));
        }
    }
}
