//! Growth degrees of holomorphic sections of the ansatz sheaf.
//!
//! A section is written through the Koszul generators
//! `t₁ = (z,0,−x)`, `t₂ = (0,z,−y)`, `t₃ = (y,−x,0)` of `ker (x,y,z)`, as
//! `w = f t₁ + g t₂ + h t₃` with polynomial `f, g, h`. Its monad
//! representative is `v = (−w₂, w₁, 0, w₃) ∈ ker β`, and its pointwise norm is
//! the `h₁`-norm of `v` projected off `im α`.
//!
//! `∫_{B(r)} |s|²` is evaluated on one fixed sample set of the unit ball,
//! rescaled to every radius, so the log–log fit sees no sampling noise
//! between radii. The degree is `½·slope − 3`.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{geomspace, loglog_fit, LinearFit};
use crate::geometry::{Point3, C64};
use crate::sampling::{phase, stream, unit_sphere};

/// Monomials `c·x^a y^b z^c`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Poly {
    pub terms: Vec<(C64, [u32; 3])>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: C64, exp: [u32; 3]) -> Self {
        Self { terms: vec![(c, exp)] }
    }

    pub fn one() -> Self {
        Self::monomial(C64::new(1.0, 0.0), [0, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.0.norm() == 0.0)
    }

    pub fn eval(&self, p: &Point3) -> C64 {
        self.terms
            .iter()
            .map(|(c, e)| c * p.x().powu(e[0]) * p.y().powu(e[1]) * p.z().powu(e[2]))
            .sum()
    }

    pub fn mul_monomial(&self, c: C64, exp: [u32; 3]) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(d, e)| (c * d, [e[0] + exp[0], e[1] + exp[1], e[2] + exp[2]]))
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Self {
        Self {
            terms: self.terms.iter().chain(&other.terms).copied().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KoszulSection {
    pub name: String,
    pub f: Poly,
    pub g: Poly,
    pub h: Poly,
}

impl KoszulSection {
    pub fn new(name: &str, f: Poly, g: Poly, h: Poly) -> Self {
        Self {
            name: name.into(),
            f,
            g,
            h,
        }
    }

    pub fn t1() -> Self {
        Self::new("t1", Poly::one(), Poly::zero(), Poly::zero())
    }

    pub fn t2() -> Self {
        Self::new("t2", Poly::zero(), Poly::one(), Poly::zero())
    }

    pub fn t3() -> Self {
        Self::new("t3", Poly::zero(), Poly::zero(), Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero() && self.g.is_zero() && self.h.is_zero()
    }

    /// `c·x^a y^b z^c · s`.
    pub fn times(&self, c: C64, exp: [u32; 3]) -> Self {
        let name = format!("{}*x^{}y^{}z^{}", self.name, exp[0], exp[1], exp[2]);
        Self::new(
            &name,
            self.f.mul_monomial(c, exp),
            self.g.mul_monomial(c, exp),
            self.h.mul_monomial(c, exp),
        )
    }

    pub fn plus(&self, other: &KoszulSection) -> Self {
        Self::new(
            &format!("{}+{}", self.name, other.name),
            self.f.add(&other.f),
            self.g.add(&other.g),
            self.h.add(&other.h),
        )
    }

    /// `w = f t₁ + g t₂ + h t₃ ∈ ker (x,y,z)`.
    pub fn w(&self, p: &Point3) -> [C64; 3] {
        let (f, g, h) = (self.f.eval(p), self.g.eval(p), self.h.eval(p));
        let (x, y, z) = (p.x(), p.y(), p.z());
        [f * z + h * y, g * z - h * x, -f * x - g * y]
    }

    /// Monad representative `(−w₂, w₁, 0, w₃)`.
    pub fn v(&self, p: &Point3) -> [C64; 4] {
        let w = self.w(p);
        [-w[1], w[0], C64::new(0.0, 0.0), w[2]]
    }
}

/// `|s|²` in the ansatz metric: with `a = (|x⃗|²+1)^{-1/2}`, `h₁ = diag(a,a,1,1)`
/// and `α = (x,y,1,0)`, `|v′|² = |v|²_h − |⟨v,α⟩_h|²/|α|²_h`.
pub fn section_norm_sqr(s: &KoszulSection, p: &Point3) -> Result<f64> {
    if p.norm() == 0.0 {
        return Err(Error::InvalidInput("the section norm is evaluated away from the origin".into()));
    }
    let v = s.v(p);
    let a = 1.0 / (p.norm_sqr() + 1.0).sqrt();
    let vv = a * (v[0].norm_sqr() + v[1].norm_sqr()) + v[2].norm_sqr() + v[3].norm_sqr();
    let va = a * (p.x().conj() * v[0] + p.y().conj() * v[1]) + v[2];
    let aa = a * p.planar_norm_sqr() + 1.0;
    Ok((vv - va.norm_sqr() / aa).max(0.0))
}

pub fn section_norm(s: &KoszulSection, p: &Point3) -> Result<f64> {
    section_norm_sqr(s, p).map(f64::sqrt)
}

/// `|w|²/|x⃗|` in the tangent-cone metric `h = |x⃗|⁻¹·I` on `ker (x,y,z)`.
pub fn cone_norm_sqr(s: &KoszulSection, p: &Point3) -> Result<f64> {
    if p.norm() == 0.0 {
        return Err(Error::InvalidInput("the cone metric is singular at the origin".into()));
    }
    Ok(s.w(p).iter().map(|c| c.norm_sqr()).sum::<f64>() / p.norm())
}

/// Points of the unit ball in R⁶ with weights summing to its volume `π³/6`.
/// Stratified in `|u|⁶`; the planar fraction `w = (|x|²+|y|²)/|u|²` is drawn
/// uniformly and reweighted by `2w`, which over-samples the z-axis.
#[derive(Clone, Debug)]
pub struct BallSamples {
    pub points: Vec<Point3>,
    pub weights: Vec<f64>,
}

impl BallSamples {
    pub fn new(n: usize, seed: u64) -> Self {
        let mut rng = stream(seed, 0x6b);
        let vol = PI.powi(3) / 6.0;
        let (mut points, mut weights) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let r = ((i as f64 + rng.random::<f64>()) / n as f64).powf(1.0 / 6.0);
            let w: f64 = rng.random();
            let planar = unit_sphere(&mut rng, 2).scaled(r * w.sqrt());
            let z = phase(&mut rng) * (r * (1.0 - w).sqrt());
            points.push(Point3::new(planar.x(), planar.y(), z));
            weights.push(vol * 2.0 * w / n as f64);
        }
        Self { points, weights }
    }

    /// The same samples moved by a map that preserves the ball and its measure.
    pub fn mapped(&self, f: impl Fn(&Point3) -> Point3) -> Self {
        Self {
            points: self.points.iter().map(f).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn integral(&self, norm_sqr: &dyn Fn(&Point3) -> Result<f64>, r: f64) -> Result<f64> {
        let mut total = 0.0;
        for (u, w) in self.points.iter().zip(&self.weights) {
            total += w * norm_sqr(&u.scaled(r))?;
        }
        Ok(total * r.powi(6))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum End {
    Origin,
    Infinity,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub section: String,
    pub end: End,
    pub radii: Vec<f64>,
    pub integrals: Vec<f64>,
    pub fit: LinearFit,
    pub degree: f64,
}

/// Largest log–log residual accepted by [`growth_degree`].
pub const FIT_RESIDUAL: f64 = 0.05;

pub fn default_radii(end: End) -> Vec<f64> {
    match end {
        End::Origin => geomspace(1e-3, 1e-1, 9),
        End::Infinity => geomspace(1e2, 1e5, 9),
    }
}

/// `d = ½·slope − 3` of `log ∫_{B(r)}|s|²` against `log r`.
pub fn growth_degree(s: &KoszulSection, end: End, radii: &[f64], samples: &BallSamples) -> Result<GrowthReport> {
    if s.is_zero() {
        return Err(Error::InvalidInput(format!("section {} has no coefficients", s.name)));
    }
    if radii.len() < 5 {
        return Err(Error::InvalidInput("need at least five radii".into()));
    }
    let q = radii[1] / radii[0];
    if !(q > 1.0) || radii.windows(2).any(|w| ((w[1] / w[0]) / q - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidInput("radii must form an increasing geometric sequence".into()));
    }
    match end {
        End::Origin if radii[radii.len() - 1] > 0.3 => {
            return Err(Error::InvalidInput("origin radii must be at most 0.3".into()))
        }
        End::Infinity if radii[0] < 10.0 => {
            return Err(Error::InvalidInput("infinity radii must be at least 10".into()))
        }
        _ => {}
    }
    let norm = |p: &Point3| section_norm_sqr(s, p);
    let integrals = radii
        .iter()
        .map(|&r| samples.integral(&norm, r))
        .collect::<Result<Vec<_>>>()?;
    let fit = loglog_fit(radii, &integrals)?;
    if fit.max_residual > FIT_RESIDUAL {
        return Err(Error::Fit(format!(
            "log-log residual {:.3} above {FIT_RESIDUAL} for {}",
            fit.max_residual, s.name
        )));
    }
    Ok(GrowthReport {
        section: s.name.clone(),
        end,
        radii: radii.to_vec(),
        integrals,
        degree: 0.5 * fit.slope - 3.0,
        fit,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationRow {
    pub section: String,
    pub d0: f64,
    pub d_inf: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationTable {
    pub rows: Vec<FiltrationRow>,
    /// The sorted degree lists at the two ends differ by more than 0.25 somewhere.
    pub filtrations_differ: bool,
    /// Sections with `d_∞ > d₀ + 0.25`.
    pub larger_at_infinity: Vec<String>,
}

pub fn filtration_table(family: &[KoszulSection], samples: &BallSamples) -> Result<FiltrationTable> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty section family".into()));
    }
    let (ro, ri) = (default_radii(End::Origin), default_radii(End::Infinity));
    let rows = family
        .iter()
        .map(|s| {
            Ok(FiltrationRow {
                section: s.name.clone(),
                d0: growth_degree(s, End::Origin, &ro, samples)?.degree,
                d_inf: growth_degree(s, End::Infinity, &ri, samples)?.degree,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut a: Vec<f64> = rows.iter().map(|r| r.d0).collect();
    let mut b: Vec<f64> = rows.iter().map(|r| r.d_inf).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let filtrations_differ = a.iter().zip(&b).any(|(u, v)| (u - v).abs() > 0.25);
    let larger_at_infinity = rows
        .iter()
        .filter(|r| r.d_inf > r.d0 + 0.25)
        .map(|r| r.section.clone())
        .collect();
    Ok(FiltrationTable {
        rows,
        filtrations_differ,
        larger_at_infinity,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    /// `∫_{B(r)}|s|²` for `r = ¼, ½, 1`.
    pub integrals: [f64; 3],
    /// `I(¼)·I(1) − I(½)²`.
    pub residual: f64,
    pub stderr: f64,
    /// `residual / (I(¼)·I(1))`.
    pub relative: f64,
}

/// Log-convexity of `r ↦ ∫_{B(r)}|s|²` under the cone metric, with a
/// batch-means standard error over `batches` interleaved subsets.
pub fn convexity_check(s: &KoszulSection, samples: &BallSamples, batches: usize) -> Result<ConvexityReport> {
    if batches < 2 || samples.points.len() < batches {
        return Err(Error::InvalidInput("need at least two non-empty batches".into()));
    }
    let radii = [0.25, 0.5, 1.0];
    let residual_of = |pts: &[(usize, &Point3)], scale: f64| -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (k, &r) in radii.iter().enumerate() {
            let mut total = 0.0;
            for &(i, u) in pts {
                total += samples.weights[i] * cone_norm_sqr(s, &u.scaled(r))?;
            }
            out[k] = total * scale * r.powi(6);
        }
        Ok(out)
    };
    let all: Vec<(usize, &Point3)> = samples.points.iter().enumerate().collect();
    let integrals = residual_of(&all, 1.0)?;
    let residual = integrals[0] * integrals[2] - integrals[1] * integrals[1];
    let per: Vec<f64> = (0..batches)
        .map(|b| {
            let pts: Vec<(usize, &Point3)> = all.iter().copied().filter(|(i, _)| i % batches == b).collect();
            let v = residual_of(&pts, batches as f64)?;
            Ok(v[0] * v[2] - v[1] * v[1])
        })
        .collect::<Result<Vec<_>>>()?;
    let n = batches as f64;
    let mean = per.iter().sum::<f64>() / n;
    let var = per.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(ConvexityReport {
        integrals,
        residual,
        stderr: (var / n).sqrt(),
        relative: residual / (integrals[0] * integrals[2]),
    })
}
