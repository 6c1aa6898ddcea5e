//! The barrier potential `G(p) = ∫_{C³} ℓ(x′) |p − x′|⁻⁴ dVol(x′)` by
//! stratified Monte Carlo, its weak Laplacian, and the decay envelope.
//!
//! The integral is split with a smooth cutoff `χ` around `p`:
//!
//! - near part `∫ χ ℓ /|p−x′|⁴` over `δ < |x′−p| < R_loc`, sampling the distance
//!   with density `∝ t` so the kernel cancels against the volume element;
//! - far part `∫ (1−χ) ℓ /|p−x′|⁴` over dyadic shells `2^k ≤ |x′| < 2^{k+1}`,
//!   uniform in radius-volume and in `w = (|x′|²+|y′|²)/|x⃗′|²`, which puts
//!   samples near the z-axis where `ℓ` is large;
//! - the core `|x′−p| < δ` and the regions inside the first and beyond the
//!   last shell are added from their leading-order closed forms.
//!
//! Shell `k` draws from ChaCha8 stream `k + 1024` of the seed; the near part
//! uses stream 0. Shells run in parallel and are summed in shell order.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ansatz::ell;
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::sampling::{phase, stream, unit_sphere};

const PI3: f64 = PI * PI * PI;

/// `Δ(1/|x⃗|⁴) = LAPLACIAN_CONSTANT · δ₀` on R⁶.
pub const LAPLACIAN_CONSTANT: f64 = -4.0 * PI3;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct McParams {
    pub samples_per_shell: usize,
    pub seed: u64,
    /// Dyadic shell exponents; default `⌊log₂|p|⌋ − 10 ..= ⌊log₂|p|⌋ + 12`.
    pub k_range: Option<(i32, i32)>,
    /// Core radius; default `1e-3·|p|`.
    pub delta: Option<f64>,
    /// Cutoff radius of the near part; default from [`local_scale`].
    pub r_loc: Option<f64>,
}

impl McParams {
    pub fn new(samples_per_shell: usize, seed: u64) -> Self {
        Self {
            samples_per_shell,
            seed,
            k_range: None,
            delta: None,
            r_loc: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShellContribution {
    pub k: i32,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GValue {
    pub estimate: f64,
    pub stderr: f64,
    pub near: f64,
    pub near_stderr: f64,
    pub shells: Vec<ShellContribution>,
    /// `ℓ(p)·π³δ²/2`, included in the estimate.
    pub core: f64,
    /// `sup_core ℓ · π³δ²/2`, an upper bound for the true core contribution.
    pub core_bound: f64,
    /// Closed-form remainder inside the first and beyond the last shell.
    pub remainder: f64,
}

/// Near-part radius `0.9|x⃗|`. The ball stays clear of the origin, and the far
/// kernel only sees `|x − x'| ≥ 0.45|x⃗|`, which keeps the shell variance small.
pub fn local_scale(p: &Point3) -> f64 {
    0.9 * p.norm()
}

/// Smooth cutoff: 1 on `s ≤ ½`, 0 on `s ≥ 1`.
pub fn cutoff(s: f64) -> f64 {
    if s <= 0.5 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let t = 2.0 * s - 1.0;
        let a = (-1.0 / (1.0 - t)).exp();
        let b = (-1.0 / t).exp();
        a / (a + b)
    }
}

struct Accum {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Accum {
    fn new() -> Self {
        Self { n: 0, sum: 0.0, sum_sq: 0.0 }
    }
    fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }
    fn mean_stderr(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        (mean, (var / n).sqrt())
    }
}

fn near_part(p: &Point3, delta: f64, r_loc: f64, n: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = stream(seed, 0);
    let mut acc = Accum::new();
    let span = r_loc * r_loc - delta * delta;
    for _ in 0..n {
        let t = (delta * delta + rng.random::<f64>() * span).sqrt();
        let u = unit_sphere(&mut rng, 3).scaled(t);
        let q = p.add(&u);
        let f = if q.norm() == 0.0 { 0.0 } else { ell(&q)? * cutoff(t / r_loc) };
        acc.push(PI3 * span / 2.0 * f);
    }
    Ok(acc.mean_stderr())
}

fn shell(p: &Point3, k: i32, r_loc: f64, n: usize, seed: u64) -> Result<ShellContribution> {
    let mut rng = stream(seed, (k + 1024) as u64);
    let (a, b) = (2f64.powi(k), 2f64.powi(k + 1));
    let (a6, b6) = (a.powi(6), b.powi(6));
    let vol = PI3 * (b6 - a6) / 3.0;
    let mut acc = Accum::new();
    for _ in 0..n {
        let r = (a6 + rng.random::<f64>() * (b6 - a6)).powf(1.0 / 6.0);
        let w: f64 = rng.random();
        let planar = unit_sphere(&mut rng, 2).scaled(r * w.sqrt());
        let zc = phase(&mut rng) * (r * (1.0 - w).sqrt());
        let q = Point3::new(planar.x(), planar.y(), zc);
        let d = (q.norm_sqr() + p.norm_sqr() - 2.0 * (q.w.iter().zip(&p.w).map(|(u, v)| (u * v.conj()).re).sum::<f64>()))
            .max(0.0)
            .sqrt();
        let outside = 1.0 - cutoff(d / r_loc);
        let f = if outside == 0.0 { 0.0 } else { ell(&q)? * outside / d.powi(4) };
        acc.push(f * w * vol);
    }
    let (value, stderr) = acc.mean_stderr();
    Ok(ShellContribution { k, value, stderr })
}

/// Stratified Monte-Carlo estimate of `G(p)`.
pub fn eval_g(p: &Point3, mc: &McParams) -> Result<GValue> {
    let r = p.norm();
    if r == 0.0 {
        return Err(Error::InvalidInput("G is evaluated away from the origin".into()));
    }
    if mc.samples_per_shell < 2 {
        return Err(Error::InvalidInput("need at least two samples per shell".into()));
    }
    let kp = r.log2().floor() as i32;
    let (k_min, k_max) = mc.k_range.unwrap_or((kp - 10, kp + 12));
    if 2f64.powi(k_min) > r / 8.0 || 2f64.powi(k_max + 1) < 8.0 * r {
        return Err(Error::InvalidInput(format!(
            "shells 2^{k_min}..2^{} do not cover [|p|/8, 8|p|] for |p| = {r}",
            k_max + 1
        )));
    }
    let delta = mc.delta.unwrap_or(1e-3 * r);
    let r_loc = mc.r_loc.unwrap_or_else(|| local_scale(p));
    if !(delta > 0.0 && delta < r_loc) {
        return Err(Error::InvalidInput(format!("core radius {delta} must lie in (0, {r_loc})")));
    }
    let n = mc.samples_per_shell;

    let (near, near_stderr) = near_part(p, delta, r_loc, n, mc.seed)?;
    let shells = (k_min..=k_max)
        .into_par_iter()
        .map(|k| shell(p, k, r_loc, n, mc.seed))
        .collect::<Result<Vec<_>>>()?;

    let core = ell(p)? * PI3 * delta * delta / 2.0;
    let mut core_sup = ell(p)?;
    for axis in 0..6 {
        for s in [-1.0, 1.0] {
            core_sup = core_sup.max(ell(&p.shifted(axis, s * delta))?);
        }
    }
    let core_bound = core_sup * PI3 * delta * delta / 2.0;

    // Inside 2^{k_min}: ℓ = 1/|x′|², kernel ≈ |p|⁻⁴. Beyond 2^{k_max+1}: ⟨ℓ⟩ ≈ 2/|x′|³.
    let a = 2f64.powi(k_min);
    let inner = if a < 1.0 { PI3 * a.powi(4) / (4.0 * r.powi(4)) * (1.0 - cutoff(r / r_loc)) } else { 0.0 };
    let outer = 2.0 * PI3 / 2f64.powi(k_max + 1);
    let remainder = inner + outer;

    let far: f64 = shells.iter().map(|s| s.value).sum();
    let var: f64 = near_stderr.powi(2) + shells.iter().map(|s| s.stderr.powi(2)).sum::<f64>();
    Ok(GValue {
        estimate: near + far + core + remainder,
        stderr: var.sqrt(),
        near,
        near_stderr,
        shells,
        core,
        core_bound,
        remainder,
    })
}

/// `max(1, log(|x⃗|/(|x|+|y|+|z|^{1/2})))/|x⃗|`.
pub fn envelope(p: &Point3) -> f64 {
    let q = p.x().norm() + p.y().norm() + p.z().norm().sqrt();
    (p.norm() / q).ln().max(1.0) / p.norm()
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeReport {
    pub sup_ratio: f64,
    pub min_g: f64,
    pub ratios: Vec<f64>,
}

/// Sup of `G/envelope` over `points` (all with `|x⃗| ≥ 1`).
pub fn barrier_envelope_check(points: &[Point3], mc: &McParams) -> Result<EnvelopeReport> {
    if points.iter().any(|p| p.norm() < 1.0) {
        return Err(Error::InvalidInput("envelope points need |x⃗| ≥ 1".into()));
    }
    let mut ratios = Vec::with_capacity(points.len());
    let mut min_g = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let params = McParams {
            seed: mc.seed.wrapping_add(i as u64 * 7919),
            ..*mc
        };
        let g = eval_g(p, &params)?.estimate;
        min_g = min_g.min(g);
        ratios.push(g / envelope(p));
    }
    Ok(EnvelopeReport {
        sup_ratio: ratios.iter().copied().fold(0.0, f64::max),
        min_g,
        ratios,
    })
}

/// `φ(x) = (1 − |x−c|²/ρ²)⁴` and its Laplacian on R⁶.
pub fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - s * s).powi(4)
    }
}

/// `ρ²·Δφ` as a function of `s = |x−c|/ρ`.
pub fn bump_laplacian(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        48.0 * (1.0 - s * s).powi(2) * (2.0 * s * s - 1.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakLaplacian {
    /// `∫ G Δφ`.
    pub lhs: f64,
    pub lhs_stderr: f64,
    /// `−4π³ ∫ ℓ φ`.
    pub rhs: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
}

/// Sampling layout of [`laplacian_weak_check`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeakParams {
    /// Gauss–Legendre nodes in the squared radius.
    pub radial: usize,
    /// Random orthonormal frames per radial node and batch.
    pub frames: usize,
    /// Independent inner seeds; the standard error is their batch spread.
    pub batches: usize,
}

impl Default for WeakParams {
    fn default() -> Self {
        Self { radial: 4, frames: 2, batches: 16 }
    }
}

/// A Haar-random orthonormal basis of R⁶.
fn random_frame<R: Rng + ?Sized>(rng: &mut R) -> [[f64; 6]; 6] {
    let mut e = [[0.0; 6]; 6];
    for i in 0..6 {
        let mut v = unit_sphere(rng, 3).to_real();
        for _ in 0..2 {
            for prev in &e[..i] {
                let d: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(a, b)| *a -= d * b);
            }
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        e[i] = v.map(|a| a / n);
    }
    e
}

/// Weak form `∫ G Δφ = −4π³ ∫ ℓ φ` for a bump of radius `rho` at `center`.
///
/// Since `∫ Δφ = 0` and `φ` is radial, `∫ G Δφ = ∫ (⟨G⟩_sphere − G(c)) Δφ`.
/// The sphere mean at each radial node is taken over the 12 points `c ± r eᵢ`
/// of random orthonormal frames, which averages the quadratic part of `G`
/// exactly. Within a batch every `G` shares one seed and one splitting, so
/// the differences are taken with common random numbers.
pub fn laplacian_weak_check(center: &Point3, rho: f64, wp: &WeakParams, mc: &McParams) -> Result<WeakLaplacian> {
    if center.norm() <= rho {
        return Err(Error::InvalidInput("bump support touches the origin".into()));
    }
    if wp.batches < 2 || wp.frames == 0 || wp.radial == 0 {
        return Err(Error::InvalidInput("need at least two batches and one frame per node".into()));
    }
    let base = McParams {
        delta: Some(mc.delta.unwrap_or(1e-3 * center.norm())),
        r_loc: Some(mc.r_loc.unwrap_or_else(|| local_scale(center))),
        k_range: mc.k_range.or_else(|| {
            let kp = center.norm().log2().floor() as i32;
            Some((kp - 10, kp + 12))
        }),
        ..*mc
    };
    // In u = r² the radial measure r⁵dr = u²du/2 and Δφ are polynomial, so
    // Gauss–Legendre in u is exact up to the quartic part of G.
    let nodes: Vec<(f64, f64)> = crate::adhm::gauss_legendre(wp.radial, 0.0, rho * rho)
        .into_iter()
        .map(|(u, w)| (u.sqrt(), w * u * u / 2.0))
        .collect();
    let c = center.to_real();
    let at = |e: &[f64; 6], t: f64| -> Point3 {
        let mut q = c;
        q.iter_mut().zip(e).for_each(|(a, b)| *a += t * b);
        Point3::from_real(q)
    };

    let batch_lhs = (0..wp.batches)
        .map(|b| -> Result<f64> {
            let params = McParams {
                seed: mc.seed.wrapping_add(b as u64 * 0x9e37),
                ..base
            };
            let g_c = eval_g(center, &params)?.estimate;
            let mut rng = stream(params.seed ^ 0x5eed, 1);
            let jobs: Vec<(f64, f64, [[f64; 6]; 6])> = nodes
                .iter()
                .flat_map(|&(r, w)| (0..wp.frames).map(move |_| (r, w)).collect::<Vec<_>>())
                .map(|(r, w)| (r, w, random_frame(&mut rng)))
                .collect();
            let terms = jobs
                .par_iter()
                .map(|(r, w, e)| -> Result<f64> {
                    let mut mean = 0.0;
                    for v in e {
                        for t in [*r, -*r] {
                            mean += eval_g(&at(v, t), &params)?.estimate;
                        }
                    }
                    mean /= 12.0;
                    let lap = bump_laplacian(r / rho) / (rho * rho);
                    Ok(w * PI3 * lap * (mean - g_c))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(terms.iter().sum::<f64>() / wp.frames as f64)
        })
        .collect::<Result<Vec<_>>>()?;

    // ℓ is cheap: the right side uses many more directions on the same nodes.
    let mut rng = stream(mc.seed ^ 0x5eed, 2);
    let mut rhs = 0.0;
    for &(r, w) in &nodes {
        let mut mean = 0.0;
        let frames = 256;
        for _ in 0..frames {
            for v in random_frame(&mut rng) {
                mean += ell(&at(&v, r))? + ell(&at(&v, -r))?;
            }
        }
        mean /= 12.0 * frames as f64;
        rhs += w * PI3 * bump(r / rho) * mean;
    }
    rhs *= LAPLACIAN_CONSTANT;

    let n = wp.batches as f64;
    let lhs = batch_lhs.iter().sum::<f64>() / n;
    let var = batch_lhs.iter().map(|v| (v - lhs).powi(2)).sum::<f64>() / (n - 1.0);
    let lhs_stderr = (var / n).sqrt();
    Ok(WeakLaplacian {
        lhs,
        lhs_stderr,
        rhs,
        ratio: lhs / rhs,
        ratio_stderr: lhs_stderr / rhs.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adhm::gauss_legendre;
    use approx::assert_abs_diff_eq;

    /// Radial quadrature of `∫ |x|⁻⁴ Δφ` on R⁶ for the unit bump at the origin.
    #[test]
    fn fundamental_solution_constant() {
        let q = gauss_legendre(40, 0.0, 1.0);
        let v: f64 = q.iter().map(|&(s, w)| w * PI3 * s.powi(5) * s.powi(-4) * bump_laplacian(s)).sum();
        assert_abs_diff_eq!(v, LAPLACIAN_CONSTANT, epsilon = 1e-10);
    }

    #[test]
    fn bump_laplacian_matches_fd() {
        // Δ of a radial function in R⁶: f'' + 5f'/r.
        for s in [0.1, 0.4, 0.7, 0.95] {
            let h = 1e-5;
            let d2 = (bump(s + h) - 2.0 * bump(s) + bump(s - h)) / (h * h);
            let d1 = (bump(s + h) - bump(s - h)) / (2.0 * h);
            assert_abs_diff_eq!(d2 + 5.0 * d1 / s, bump_laplacian(s), epsilon = 1e-4);
        }
    }

    #[test]
    fn cutoff_is_a_partition() {
        assert_eq!(cutoff(0.3), 1.0);
        assert_eq!(cutoff(1.2), 0.0);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = cutoff(0.5 + 0.005 * i as f64);
            assert!(v <= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mc = McParams::new(100, 1);
        assert!(eval_g(&Point3::real(0.0, 0.0, 0.0), &mc).is_err());
        let narrow = McParams {
            k_range: Some((2, 3)),
            ..mc
        };
        assert!(eval_g(&Point3::real(10.0, 0.0, 0.0), &narrow).is_err());
        assert!(laplacian_weak_check(&Point3::real(1.0, 0.0, 0.0), 2.0, &WeakParams::default(), &mc).is_err());
    }

    #[test]
    fn positive_with_positive_shells() {
        let g = eval_g(&Point3::real(10.0, 0.0, 0.0), &McParams::new(500, 3)).unwrap();
        assert!(g.estimate > 0.0 && g.stderr.is_finite());
        assert!(g.shells.iter().all(|s| s.value >= 0.0));
        assert!(g.core <= g.core_bound);
    }
}
