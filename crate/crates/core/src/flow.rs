//! Explicit Dirichlet heat flow for Hermitian metrics on a box in C³.
//!
//! The unknown is the Gram matrix `H` of the x-chart frame of the ansatz
//! bundle at every node of a uniform grid, in the row convention
//! `H_ab = h(s_a, s_b)`. With `∂_j∂_j̄ = ¼(∂²_a + ∂²_b)` and
//!
//! ```text
//! A = Σ_j ( ∂_j∂_j̄H − ∂_jH·H⁻¹·∂_j̄H ),     iΛF_H = −2·A·H⁻¹,
//! ```
//!
//! the flow `H⁻¹∂_tH = −2 iΛF_H` becomes `∂_tH = 4A`, which is Hermitian and
//! reduces to `∂_t u = Δu` for `H = e^u·I`. Derivatives are centred
//! differences; boundary nodes keep `H₀` bit for bit.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{asymptotic_frame, Chart};
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::geometry::{Point3, C64};
use crate::potential::{eval_g, McParams};

pub type M2 = Matrix2<C64>;

const I: C64 = C64::new(0.0, 1.0);

/// Stability constant: `dt ≤ CFL · h_min²`. The update is `∂_tH ≈ ΔH` on six
/// real axes, so forward Euler is stable up to `h²/12`.
pub const CFL: f64 = 1.0 / 12.0;

pub const DEFAULT_BUDGET: usize = 2_000_000;

fn default_bounds() -> [[f64; 2]; 6] {
    [[1.0, 2.0], [-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]]
}
fn default_resolution() -> usize {
    7
}
fn default_steps() -> usize {
    2000
}
fn default_monitor() -> usize {
    10
}
fn default_energy_every() -> usize {
    500
}
fn default_budget() -> usize {
    DEFAULT_BUDGET
}
fn default_barrier_c() -> f64 {
    2.0
}
fn default_target_ratio() -> f64 {
    0.5
}
fn default_barrier_stride() -> usize {
    2
}
fn default_g_samples() -> usize {
    500
}

/// Flow configuration, read from JSON. Every field has a default.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// Real intervals for `Re x, Im x, Re y, Im y, Re z, Im z`.
    #[serde(default = "default_bounds", rename = "box")]
    pub bounds: [[f64; 2]; 6],
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Time step; defaults to the stability bound.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Steps between recordings of `sup|iΛF_H|`.
    #[serde(default = "default_monitor")]
    pub monitor_every: usize,
    /// Steps between energy evaluations (0 disables).
    #[serde(default = "default_energy_every")]
    pub energy_every: usize,
    #[serde(default = "default_budget")]
    pub node_budget: usize,
    #[serde(default = "default_barrier_c")]
    pub barrier_c: f64,
    /// Required `final/initial` ratio of `sup|iΛF_H|`.
    #[serde(default = "default_target_ratio")]
    pub target_ratio: f64,
    /// Barrier check nodes are the interior nodes whose indices are all `≡ 1` mod this.
    #[serde(default = "default_barrier_stride")]
    pub barrier_stride: usize,
    #[serde(default = "default_g_samples")]
    pub g_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl FlowConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.monitor_every == 0 || cfg.barrier_stride == 0 {
            return Err(Error::Config("monitor_every and barrier_stride must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Domain with barrier values and the initial state for `cfg`.
pub fn setup(cfg: &FlowConfig) -> Result<(FlowDomain, FlowState)> {
    let mut domain = build_domain(cfg.bounds, cfg.resolution, cfg.node_budget)?;
    domain.prepare_barrier(cfg.barrier_stride, &McParams::new(cfg.g_samples, cfg.seed))?;
    let dt = cfg.dt.unwrap_or_else(|| domain.dt_limit());
    let state = FlowState::initial(&domain, dt)?;
    Ok((domain, state))
}

#[derive(Clone, Debug)]
pub struct FlowDomain {
    pub bounds: [[f64; 2]; 6],
    pub resolution: [usize; 6],
    pub spacing: [f64; 6],
    strides: [usize; 6],
    pub boundary: Vec<bool>,
    pub h0: Vec<M2>,
    /// `(node, G(node))` for the barrier check.
    pub barrier_nodes: Vec<(usize, f64)>,
}

pub fn node_count(resolution: usize) -> usize {
    resolution.pow(6)
}

pub fn to_m2(m: &crate::CMat) -> M2 {
    M2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// Grid over `bounds` with the ansatz Gram matrix `H₀` of the x-chart frame
/// at every node. Requires `Re x ≥ 1` on the whole box.
pub fn build_domain(bounds: [[f64; 2]; 6], resolution: usize, budget: usize) -> Result<FlowDomain> {
    if resolution < 5 {
        return Err(Error::Resolution(format!("need at least 5 nodes per axis, got {resolution}")));
    }
    if bounds.iter().any(|b| !(b[1] > b[0])) {
        return Err(Error::InvalidInput("every box interval needs max > min".into()));
    }
    if bounds[0][0] < 1.0 {
        return Err(Error::InvalidInput(format!(
            "x-chart box needs Re x ≥ 1, got Re x ≥ {}",
            bounds[0][0]
        )));
    }
    let nodes = node_count(resolution);
    if nodes > budget {
        return Err(Error::Budget { nodes, budget });
    }
    let res = [resolution; 6];
    let spacing = std::array::from_fn(|a| (bounds[a][1] - bounds[a][0]) / (resolution - 1) as f64);
    let mut strides = [1usize; 6];
    for a in (0..5).rev() {
        strides[a] = strides[a + 1] * res[a + 1];
    }
    let mut domain = FlowDomain {
        bounds,
        resolution: res,
        spacing,
        strides,
        boundary: Vec::new(),
        h0: Vec::new(),
        barrier_nodes: Vec::new(),
    };
    domain.boundary = (0..nodes)
        .map(|n| domain.indices(n).iter().any(|&i| i == 0 || i == resolution - 1))
        .collect();
    domain.h0 = (0..nodes)
        .into_par_iter()
        .map(|n| asymptotic_frame(&domain.point(n), Chart::X).map(|f| to_m2(&f.gram)))
        .collect::<Result<Vec<_>>>()?;
    Ok(domain)
}

impl FlowDomain {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Grid indices of a node; axis 0 (`Re x`) varies slowest.
    pub fn indices(&self, node: usize) -> [usize; 6] {
        std::array::from_fn(|a| (node / self.strides[a]) % self.resolution[a])
    }

    pub fn point(&self, node: usize) -> Point3 {
        let idx = self.indices(node);
        Point3::from_real(std::array::from_fn(|a| self.bounds[a][0] + idx[a] as f64 * self.spacing[a]))
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&n| !self.boundary[n])
    }

    pub fn center_node(&self) -> usize {
        (0..6).map(|a| self.resolution[a] / 2 * self.strides[a]).sum()
    }

    pub fn dt_limit(&self) -> f64 {
        let h = self.spacing.iter().copied().fold(f64::INFINITY, f64::min);
        CFL * h * h
    }

    /// Evaluate `G` on the check nodes: interior nodes whose indices are all `≡ 1 (mod stride)`.
    pub fn prepare_barrier(&mut self, stride: usize, mc: &McParams) -> Result<()> {
        let nodes: Vec<usize> = self
            .interior()
            .filter(|&n| self.indices(n).iter().all(|&i| (i - 1) % stride == 0))
            .collect();
        self.barrier_nodes = nodes
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let params = McParams {
                    seed: mc.seed.wrapping_add(k as u64),
                    ..*mc
                };
                Ok((n, eval_g(&self.point(n), &params)?.estimate))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(())
    }

    fn stencil(&self, h: &[M2], n: usize) -> Stencil {
        let mut d1 = [M2::zeros(); 6];
        let mut d2 = [M2::zeros(); 6];
        for a in 0..6 {
            let (p, m) = (h[n + self.strides[a]], h[n - self.strides[a]]);
            let s = self.spacing[a];
            d1[a] = (p - m) / C64::from(2.0 * s);
            d2[a] = (p - h[n] * C64::from(2.0) + m) / C64::from(s * s);
        }
        Stencil { d1, d2 }
    }

    /// `∂_j∂_l̄ H` at an interior node, for the energy.
    fn mixed(&self, h: &[M2], n: usize, a: usize, c: usize) -> M2 {
        let (sa, sc) = (self.strides[a], self.strides[c]);
        (h[n + sa + sc] - h[n + sa - sc] - h[n - sa + sc] + h[n - sa - sc])
            / C64::from(4.0 * self.spacing[a] * self.spacing[c])
    }
}

struct Stencil {
    d1: [M2; 6],
    d2: [M2; 6],
}

impl Stencil {
    fn holo(&self, j: usize) -> M2 {
        (self.d1[2 * j] - self.d1[2 * j + 1] * I) * C64::from(0.5)
    }
    fn anti(&self, j: usize) -> M2 {
        (self.d1[2 * j] + self.d1[2 * j + 1] * I) * C64::from(0.5)
    }
}

fn inv(h: &M2) -> Result<M2> {
    h.try_inverse().ok_or(Error::SingularMetric)
}

/// `A = Σ_j (∂_j∂_j̄H − ∂_jH H⁻¹ ∂_j̄H)` at an interior node.
fn flow_operator(domain: &FlowDomain, h: &[M2], n: usize) -> Result<M2> {
    let s = domain.stencil(h, n);
    let hinv = inv(&h[n])?;
    let mut a = M2::zeros();
    for j in 0..3 {
        a += (s.d2[2 * j] + s.d2[2 * j + 1]) * C64::from(0.25) - s.holo(j) * hinv * s.anti(j);
    }
    Ok(a)
}

/// Eigenvalues of a Hermitian 2×2 matrix, ascending.
pub fn eig2(h: &M2) -> [f64; 2] {
    let (a, d) = (h[(0, 0)].re, h[(1, 1)].re);
    let b = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [0.5 * (a + d) - r, 0.5 * (a + d) + r]
}

/// `max |λ|` over the eigenvalues of `A·H⁻¹` (real, as it is similar to a
/// Hermitian matrix); this is the operator norm in an orthonormal frame.
fn similar_hermitian_norm(k: &M2) -> f64 {
    let tr = (k[(0, 0)] + k[(1, 1)]).re;
    let det = k.determinant().re;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    (0.5 * tr).abs() + disc
}

fn hermitize(m: &M2) -> M2 {
    (m + m.adjoint()) * C64::from(0.5)
}

#[derive(Clone, Debug)]
pub struct FlowState {
    pub h: Vec<M2>,
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub history: Vec<HistoryRow>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct HistoryRow {
    pub step: usize,
    pub time: f64,
    pub sup_mean_curvature: f64,
    /// `NaN` when not evaluated at this step.
    pub energy: f64,
}

impl FlowState {
    pub fn initial(domain: &FlowDomain, dt: f64) -> Result<Self> {
        Self::from_field(domain, domain.h0.clone(), dt)
    }

    /// A state with the given field; boundary nodes are reset to `H₀`.
    pub fn from_field(domain: &FlowDomain, mut h: Vec<M2>, dt: f64) -> Result<Self> {
        if h.len() != domain.len() {
            return Err(Error::DimensionMismatch(format!("{} values for {} nodes", h.len(), domain.len())));
        }
        let limit = domain.dt_limit();
        if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
            return Err(Error::Cfl { dt, limit });
        }
        for (n, v) in h.iter_mut().enumerate() {
            if domain.boundary[n] {
                *v = domain.h0[n];
            }
        }
        Ok(Self {
            h,
            step: 0,
            time: 0.0,
            dt,
            history: Vec::new(),
        })
    }
}

/// `iΛF_H` at every node (zero on the boundary) and its sup over the interior.
pub fn mean_curvature_field(domain: &FlowDomain, h: &[M2]) -> Result<(Vec<M2>, f64)> {
    let field = (0..domain.len())
        .into_par_iter()
        .map(|n| {
            if domain.boundary[n] {
                Ok(M2::zeros())
            } else {
                Ok(flow_operator(domain, h, n)? * inv(&h[n])? * C64::from(-2.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let sup = field.iter().map(similar_hermitian_norm).fold(0.0, f64::max);
    Ok((field, sup))
}

/// One forward-Euler step `H ← H + 4dt·A`, re-Hermitized. Returns
/// `sup|iΛF_H|` of the field before the update.
pub fn step(domain: &FlowDomain, state: &mut FlowState) -> Result<f64> {
    let dt = state.dt;
    let old = &state.h;
    let updates = (0..domain.len())
        .into_par_iter()
        .map(|n| -> Result<(M2, f64)> {
            if domain.boundary[n] {
                return Ok((old[n], 0.0));
            }
            let a = flow_operator(domain, old, n)?;
            let k = a * inv(&old[n])? * C64::from(-2.0);
            Ok((hermitize(&(old[n] + a * C64::from(4.0 * dt))), similar_hermitian_norm(&k)))
        })
        .collect::<Result<Vec<_>>>()?;
    let sup = updates.iter().map(|u| u.1).fold(0.0, f64::max);
    state.h = updates.into_iter().map(|u| u.0).collect();
    state.step += 1;
    state.time += dt;
    Ok(sup)
}

pub fn check_positivity(domain: &FlowDomain, state: &FlowState) -> Result<()> {
    for n in domain.interior() {
        let ev = eig2(&state.h[n]);
        if !(ev[0] > 0.0) {
            return Err(Error::PositivityLoss {
                node: n,
                step: state.step,
                eigenvalues: ev,
            });
        }
    }
    Ok(())
}

/// `∫|F_H|²` over the interior nodes by the midpoint rule, with
/// `|F|² = 4 Σ_{j,l} tr(F_jl̄ H F_jl̄† H⁻¹)`.
pub fn energy(domain: &FlowDomain, h: &[M2]) -> Result<f64> {
    let cell: f64 = domain.spacing.iter().product();
    let per_node = domain
        .interior()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| -> Result<f64> {
            let s = domain.stencil(h, n);
            let hn = h[n];
            let hinv = inv(&hn)?;
            let mut total = 0.0;
            for j in 0..3 {
                for l in 0..3 {
                    let ddbar = if j == l {
                        (s.d2[2 * j] + s.d2[2 * j + 1]) * C64::from(0.25)
                    } else {
                        let (a, b, c, d) = (2 * j, 2 * j + 1, 2 * l, 2 * l + 1);
                        (domain.mixed(h, n, a, c) + domain.mixed(h, n, a, d) * I - domain.mixed(h, n, b, c) * I
                            + domain.mixed(h, n, b, d))
                            * C64::from(0.25)
                    };
                    let f = (ddbar - s.holo(j) * hinv * s.anti(l)) * hinv * C64::from(-1.0);
                    total += (f * hn * f.adjoint() * hinv).trace().re;
                }
            }
            Ok(4.0 * total)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_node.iter().sum::<f64>() * cell)
}

#[derive(Clone, Debug, Serialize)]
pub struct BarrierReport {
    pub pass: bool,
    pub c: f64,
    /// `min_node (C·G − max|log λ|)`; negative on failure.
    pub worst_margin: f64,
    pub worst_node: Option<usize>,
    /// Smallest `C` for which every check node passes.
    pub required_c: f64,
    pub nodes: usize,
}

/// `e^{−CG}·H₀ ≤ H ≤ e^{CG}·H₀` via the eigenvalues of `H₀^{-1/2} H H₀^{-1/2}`,
/// which are those of `H₀⁻¹H`.
pub fn barrier_check(domain: &FlowDomain, h: &[M2], c: f64) -> Result<BarrierReport> {
    let mut worst_margin = f64::INFINITY;
    let mut worst_node = None;
    let mut required_c: f64 = 0.0;
    for &(n, g) in &domain.barrier_nodes {
        let m = inv(&domain.h0[n])? * h[n];
        let tr = (m[(0, 0)] + m[(1, 1)]).re;
        let det = m.determinant().re;
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let (lo, hi) = (0.5 * tr - disc, 0.5 * tr + disc);
        if !(lo > 0.0) {
            return Err(Error::PositivityLoss {
                node: n,
                step: 0,
                eigenvalues: [lo, hi],
            });
        }
        let dev = lo.ln().abs().max(hi.ln().abs());
        let margin = c * g - dev;
        if margin < worst_margin {
            worst_margin = margin;
            worst_node = Some(n);
        }
        required_c = required_c.max(dev / g);
    }
    Ok(BarrierReport {
        pass: worst_margin >= 0.0,
        c,
        worst_margin: if domain.barrier_nodes.is_empty() { 0.0 } else { worst_margin },
        worst_node,
        required_c,
        nodes: domain.barrier_nodes.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub nodes: usize,
    pub interior: usize,
    pub dt: f64,
    pub steps: usize,
    pub initial_sup: f64,
    pub final_sup: f64,
    pub ratio: f64,
    /// Recorded sup never exceeds its predecessor (after step 10) by more
    /// than the round-off floor `1e-10·initial_sup`.
    pub non_increasing: bool,
    /// Fit of `ln sup` against time over the recorded history after step 10,
    /// restricted to values above `1e-8·initial_sup`.
    pub decay_fit: Option<LinearFit>,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub barrier: Option<BarrierReport>,
    /// Boundary nodes still equal `H₀` bit for bit.
    pub boundary_exact: bool,
}

impl FlowReport {
    /// Ratio target met, monotone decay, boundary intact and barrier (if checked) satisfied.
    pub fn pass(&self, target_ratio: f64) -> bool {
        self.ratio <= target_ratio
            && self.non_increasing
            && self.boundary_exact
            && self.barrier.as_ref().is_none_or(|b| b.pass)
    }
}

/// Run `steps` steps, recording `sup|iΛF_H|` every `monitor_every` steps and
/// checking positivity every 50 steps.
pub fn run(domain: &FlowDomain, state: &mut FlowState, cfg: &FlowConfig) -> Result<FlowReport> {
    let initial_energy = energy(domain, &state.h)?;
    let mut initial_sup = None;
    for _ in 0..cfg.steps {
        let k = state.step;
        let t = state.time;
        let energy_due = cfg.energy_every > 0 && k.is_multiple_of(cfg.energy_every);
        let e = if k == 0 {
            initial_energy
        } else if energy_due {
            energy(domain, &state.h)?
        } else {
            f64::NAN
        };
        let sup = step(domain, state)?;
        initial_sup.get_or_insert(sup);
        if k.is_multiple_of(cfg.monitor_every) || energy_due {
            state.history.push(HistoryRow {
                step: k,
                time: t,
                sup_mean_curvature: sup,
                energy: e,
            });
        }
        if state.step.is_multiple_of(50) {
            check_positivity(domain, state)?;
        }
    }
    check_positivity(domain, state)?;
    let (_, final_sup) = mean_curvature_field(domain, &state.h)?;
    let final_energy = energy(domain, &state.h)?;
    state.history.push(HistoryRow {
        step: state.step,
        time: state.time,
        sup_mean_curvature: final_sup,
        energy: final_energy,
    });
    let initial_sup = initial_sup.unwrap_or(final_sup);
    let floor = 1e-10 * initial_sup;
    let tail: Vec<&HistoryRow> = state.history.iter().filter(|r| r.step >= 10).collect();
    let non_increasing = tail
        .windows(2)
        .all(|w| w[1].sup_mean_curvature <= w[0].sup_mean_curvature + floor);
    let (ts, ls): (Vec<f64>, Vec<f64>) = tail
        .iter()
        .filter(|r| r.sup_mean_curvature > 1e-8 * initial_sup)
        .map(|r| (r.time, r.sup_mean_curvature.ln()))
        .unzip();
    let decay_fit = if ts.len() >= 3 { linear_fit(&ts, &ls).ok() } else { None };
    let barrier = if domain.barrier_nodes.is_empty() {
        None
    } else {
        Some(barrier_check(domain, &state.h, cfg.barrier_c)?)
    };
    Ok(FlowReport {
        nodes: domain.len(),
        interior: domain.interior().count(),
        dt: state.dt,
        steps: cfg.steps,
        initial_sup,
        final_sup,
        ratio: if initial_sup > 0.0 { final_sup / initial_sup } else { 0.0 },
        non_increasing,
        decay_fit,
        initial_energy,
        final_energy,
        barrier,
        boundary_exact: (0..domain.len())
            .filter(|&n| domain.boundary[n])
            .all(|n| state.h[n] == domain.h0[n]),
    })
}

pub fn write_history(path: &Path, history: &[HistoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in history {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckpointMeta {
    #[serde(rename = "box")]
    pub bounds: [[f64; 2]; 6],
    pub resolution: [usize; 6],
    pub nodes: usize,
    pub order: String,
    pub layout: Vec<String>,
    pub step: usize,
    pub time: f64,
    pub dt: f64,
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Binary field: per node `[H₁₁, H₂₂, Re H₁₂, Im H₁₂, 0, 0, 0, 0]` as
/// little-endian f64, plus a JSON sidecar at `<path>.json`.
pub fn write_checkpoint(path: &Path, domain: &FlowDomain, state: &FlowState) -> Result<CheckpointMeta> {
    let mut w = BufWriter::new(File::create(path)?);
    for h in &state.h {
        let vals = [h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)].re, h[(0, 1)].im, 0.0, 0.0, 0.0, 0.0];
        for v in vals {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    let meta = CheckpointMeta {
        bounds: domain.bounds,
        resolution: domain.resolution,
        nodes: domain.len(),
        order: "node-major; axis order Re x, Im x, Re y, Im y, Re z, Im z, last axis fastest".into(),
        layout: ["h11", "h22", "re_h12", "im_h12", "pad", "pad", "pad", "pad"].map(String::from).to_vec(),
        step: state.step,
        time: state.time,
        dt: state.dt,
    };
    std::fs::write(sidecar(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(meta)
}

pub fn read_checkpoint(path: &Path) -> Result<(CheckpointMeta, Vec<M2>)> {
    let meta: CheckpointMeta = serde_json::from_str(&std::fs::read_to_string(sidecar(path))?)?;
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() != meta.nodes * 64 {
        return Err(Error::DimensionMismatch(format!(
            "checkpoint has {} bytes, expected {}",
            bytes.len(),
            meta.nodes * 64
        )));
    }
    let h = bytes
        .chunks_exact(64)
        .map(|c| {
            let v: [f64; 8] = std::array::from_fn(|i| f64::from_le_bytes(c[8 * i..8 * i + 8].try_into().unwrap()));
            let off = C64::new(v[2], v[3]);
            M2::new(C64::from(v[0]), off, off.conj(), C64::from(v[1]))
        })
        .collect();
    Ok((meta, h))
}
