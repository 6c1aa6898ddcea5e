//! Monads `E₀ →α E₁ →β E₂` of trivial bundles with Hermitian fibre metrics,
//! their cohomology fibres `ker β ∩ ker α†`, induced metrics and curvature.
//!
//! Curvature is returned in an orthonormal basis of the cohomology fibre.
//! Connection matrices use the column convention `θ_j = h⁻¹ ∂_j h`, so the
//! ambient curvature coefficient of `dw_j ∧ dw̄_l` is `-∂_l̄ θ_j`. Gram matrices
//! of holomorphic frames use the row convention `H_ab = h(s_a, s_b)` and the
//! curvature `∂̄(∂H·H⁻¹)`; the two agree up to transposition.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    c, fd_derivative, hermitian_op_norm, solve, CMat, CVec, Form11, MetricMatrix, Point3,
    Wirtinger, C64,
};

/// Smallest singular value below which a point counts as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    E0,
    E1,
    E2,
}

/// A monad with pointwise evaluators. Derivative hooks return `None` when no
/// closed form is available; the engine then falls back to finite differences
/// with step [`Monad::fd_step`].
pub trait Monad: Sync {
    /// Number of complex base coordinates (2 or 3).
    fn base_dim(&self) -> usize;
    /// Fibre dimensions `(k₀, k₁, k₂)`.
    fn ranks(&self) -> [usize; 3];
    fn alpha(&self, p: &Point3) -> CMat;
    fn beta(&self, p: &Point3) -> CMat;
    fn metric(&self, slot: Slot, p: &Point3) -> CMat;

    fn d_alpha(&self, _p: &Point3, _j: usize) -> Option<CMat> {
        None
    }
    fn d_beta(&self, _p: &Point3, _j: usize) -> Option<CMat> {
        None
    }
    /// `h⁻¹ ∂_j h` for the metric in `slot`.
    fn connection(&self, _slot: Slot, _p: &Point3, _j: usize) -> Option<CMat> {
        None
    }
    /// Coefficient of `dw_j ∧ dw̄_l` in the curvature of `(E₁, h₁)`.
    fn ambient_curvature(&self, _p: &Point3, _j: usize, _l: usize) -> Option<CMat> {
        None
    }
    fn fd_step(&self, p: &Point3) -> f64 {
        1e-3 * p.norm().max(1.0)
    }

    fn rank(&self) -> usize {
        let [k0, k1, k2] = self.ranks();
        k1 - k0 - k2
    }
}

/// Hides every closed-form derivative of the wrapped monad.
pub struct FdOnly<'a, M: ?Sized>(pub &'a M);

impl<M: Monad + ?Sized> Monad for FdOnly<'_, M> {
    fn base_dim(&self) -> usize {
        self.0.base_dim()
    }
    fn ranks(&self) -> [usize; 3] {
        self.0.ranks()
    }
    fn alpha(&self, p: &Point3) -> CMat {
        self.0.alpha(p)
    }
    fn beta(&self, p: &Point3) -> CMat {
        self.0.beta(p)
    }
    fn metric(&self, slot: Slot, p: &Point3) -> CMat {
        self.0.metric(slot, p)
    }
    fn fd_step(&self, p: &Point3) -> f64 {
        self.0.fd_step(p)
    }
}

/// Diagonal metric weight `scale · (|x⃗|² + shift)^power · |z|^(2·z_power)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagWeight {
    pub scale: f64,
    pub shift: f64,
    pub power: f64,
    pub z_power: f64,
}

impl DiagWeight {
    pub const ONE: DiagWeight = DiagWeight {
        scale: 1.0,
        shift: 0.0,
        power: 0.0,
        z_power: 0.0,
    };

    pub fn constant(scale: f64) -> Self {
        Self { scale, ..Self::ONE }
    }

    pub fn radial(scale: f64, shift: f64, power: f64) -> Self {
        Self {
            scale,
            shift,
            power,
            z_power: 0.0,
        }
    }

    pub fn value(&self, p: &Point3) -> f64 {
        let mut v = self.scale;
        if self.power != 0.0 {
            v *= (p.norm_sqr() + self.shift).powf(self.power);
        }
        if self.z_power != 0.0 {
            v *= p.z().norm_sqr().powf(self.z_power);
        }
        v
    }

    /// `∂_j log g`.
    pub fn theta(&self, p: &Point3, j: usize) -> C64 {
        let mut t = C64::new(0.0, 0.0);
        if self.power != 0.0 {
            t += p.w[j].conj() * (self.power / (p.norm_sqr() + self.shift));
        }
        if self.z_power != 0.0 && j == 2 {
            t += c(self.z_power) / p.z();
        }
        t
    }

    /// `∂_l̄ ∂_j log g` (the `|z|` factor is pluriharmonic away from `z = 0`).
    pub fn dbar_theta(&self, p: &Point3, j: usize, l: usize) -> C64 {
        if self.power == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let s = p.norm_sqr() + self.shift;
        let delta = if j == l { 1.0 / s } else { 0.0 };
        (c(delta) - p.w[j].conj() * p.w[l] / (s * s)) * self.power
    }
}

/// A monad whose maps are affine in the coordinates and whose metrics are
/// diagonal with [`DiagWeight`] entries. All derivatives are exact.
#[derive(Clone, Debug)]
pub struct AffineMonad {
    n: usize,
    alpha0: CMat,
    alpha_lin: [CMat; 3],
    beta0: CMat,
    beta_lin: [CMat; 3],
    weights: [Vec<DiagWeight>; 3],
}

impl AffineMonad {
    pub fn new(
        n: usize,
        alpha: (CMat, [CMat; 3]),
        beta: (CMat, [CMat; 3]),
        weights: [Vec<DiagWeight>; 3],
    ) -> Result<Self> {
        let (k0, k1, k2) = (weights[0].len(), weights[1].len(), weights[2].len());
        let shape_ok = |m: &CMat, r: usize, c: usize| m.nrows() == r && m.ncols() == c;
        if !(2..=3).contains(&n)
            || !shape_ok(&alpha.0, k1, k0)
            || !alpha.1.iter().all(|a| shape_ok(a, k1, k0))
            || !shape_ok(&beta.0, k2, k1)
            || !beta.1.iter().all(|b| shape_ok(b, k2, k1))
            || k1 < k0 + k2
        {
            return Err(Error::DimensionMismatch(format!(
                "affine monad with ranks ({k0}, {k1}, {k2}) over C^{n}"
            )));
        }
        Ok(Self {
            n,
            alpha0: alpha.0,
            alpha_lin: alpha.1,
            beta0: beta.0,
            beta_lin: beta.1,
            weights,
        })
    }

    pub fn weights(&self, slot: Slot) -> &[DiagWeight] {
        &self.weights[slot as usize]
    }

    fn diag(&self, slot: Slot, f: impl Fn(&DiagWeight) -> C64) -> CMat {
        let w = &self.weights[slot as usize];
        CMat::from_diagonal(&CVec::from_iterator(w.len(), w.iter().map(f)))
    }
}

impl Monad for AffineMonad {
    fn base_dim(&self) -> usize {
        self.n
    }
    fn ranks(&self) -> [usize; 3] {
        [self.weights[0].len(), self.weights[1].len(), self.weights[2].len()]
    }
    fn alpha(&self, p: &Point3) -> CMat {
        let mut a = self.alpha0.clone();
        for j in 0..self.n {
            a += &self.alpha_lin[j] * p.w[j];
        }
        a
    }
    fn beta(&self, p: &Point3) -> CMat {
        let mut b = self.beta0.clone();
        for j in 0..self.n {
            b += &self.beta_lin[j] * p.w[j];
        }
        b
    }
    fn metric(&self, slot: Slot, p: &Point3) -> CMat {
        self.diag(slot, |w| c(w.value(p)))
    }
    fn d_alpha(&self, _p: &Point3, j: usize) -> Option<CMat> {
        Some(self.alpha_lin[j].clone())
    }
    fn d_beta(&self, _p: &Point3, j: usize) -> Option<CMat> {
        Some(self.beta_lin[j].clone())
    }
    fn connection(&self, slot: Slot, p: &Point3, j: usize) -> Option<CMat> {
        Some(self.diag(slot, |w| w.theta(p, j)))
    }
    fn ambient_curvature(&self, p: &Point3, j: usize, l: usize) -> Option<CMat> {
        Some(self.diag(Slot::E1, |w| -w.dbar_theta(p, j, l)))
    }
}

/// Singular-value diagnostics of a monad at a point.
#[derive(Clone, Debug, Serialize)]
pub struct Validity {
    pub point: [f64; 6],
    /// Smallest singular value of α; `None` when `k₀ = 0`.
    pub sigma_alpha: Option<f64>,
    /// Smallest singular value of β̄ᵗ; `None` when `k₂ = 0`.
    pub sigma_beta: Option<f64>,
    pub beta_alpha_residual: f64,
    pub alpha_injective: bool,
    pub beta_surjective: bool,
}

impl Validity {
    pub fn regular(&self) -> bool {
        self.alpha_injective && self.beta_surjective
    }
}

fn min_singular(m: &CMat) -> Option<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return None;
    }
    Some(m.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min))
}

pub fn validate_monad(m: &dyn Monad, p: &Point3) -> Validity {
    let a = m.alpha(p);
    let b = m.beta(p);
    let sigma_alpha = min_singular(&a);
    let sigma_beta = min_singular(&b.adjoint());
    let residual = if a.ncols() == 0 || b.nrows() == 0 {
        0.0
    } else {
        (&b * &a).iter().map(|z| z.norm()).fold(0.0, f64::max)
    };
    Validity {
        point: p.to_real(),
        sigma_alpha,
        sigma_beta,
        beta_alpha_residual: residual,
        alpha_injective: sigma_alpha.is_none_or(|s| s >= SINGULAR_THRESHOLD),
        beta_surjective: sigma_beta.is_none_or(|s| s >= SINGULAR_THRESHOLD),
    }
}

/// Orthonormal basis of `ker β ∩ ker α†` at a point.
#[derive(Clone, Debug)]
pub struct CohomFiber {
    pub point: Point3,
    /// `k₁ × r`, columns orthonormal for `h₁`.
    pub basis: CMat,
    /// `h₁`-orthogonal projector onto the fibre.
    pub projector: CMat,
    pub h1: CMat,
}

impl CohomFiber {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Coordinates of `v` (projected to the fibre) in the orthonormal basis.
    pub fn coordinates(&self, v: &CMat) -> CMat {
        self.basis.adjoint() * &self.h1 * v
    }
}

fn h_inner(h: &CMat, u: &CVec, v: &CVec) -> C64 {
    (v.adjoint() * h * u)[(0, 0)]
}

/// Orthonormalizes `v` against `q` in the metric `h` (two MGS passes).
fn h_orthogonalize(h: &CMat, q: &[CVec], v: &CVec) -> CVec {
    let mut v = v.clone();
    for _ in 0..2 {
        for u in q {
            let coef = h_inner(h, &v, u);
            v -= u * coef;
        }
    }
    v
}

fn h_norm(h: &CMat, v: &CVec) -> f64 {
    h_inner(h, v, v).re.max(0.0).sqrt()
}

/// Builds the fibre without the regularity check; used by the projector route
/// (which must also work for data violating `βα = 0`).
fn fibre_unchecked(m: &dyn Monad, p: &Point3) -> Result<CohomFiber> {
    let [_, k1, _] = m.ranks();
    let h1 = MetricMatrix::new(m.metric(Slot::E1, p))?;
    let h2 = MetricMatrix::new(m.metric(Slot::E2, p))?;
    let a = m.alpha(p);
    let b = m.beta(p);
    let h = h1.matrix().clone();

    // Spanning set of the complement: im α and im β† = h₁⁻¹ β̄ᵗ h₂.
    let b_adj = if b.nrows() > 0 {
        crate::geometry::adjoint_wrt(&b, &h1, &h2)?
    } else {
        CMat::zeros(k1, 0)
    };
    let mut q: Vec<CVec> = Vec::new();
    for col in a.column_iter().chain(b_adj.column_iter()) {
        let col: CVec = col.into_owned();
        let scale = h_norm(&h, &col);
        let v = h_orthogonalize(&h, &q, &col);
        let nv = h_norm(&h, &v);
        if nv > SINGULAR_THRESHOLD * scale.max(1e-300) && nv > 0.0 {
            q.push(v / c(nv));
        }
    }

    let mut projector = CMat::identity(k1, k1);
    for u in &q {
        projector -= u * (u.adjoint() * &h);
    }

    // Pivoted Gram–Schmidt over P e_i: largest residual first, ties to the lowest index.
    let r = k1 - q.len();
    let cands: Vec<CVec> = (0..k1).map(|i| projector.column(i).into_owned()).collect();
    let mut basis: Vec<CVec> = Vec::with_capacity(r);
    let mut used = vec![false; k1];
    for _ in 0..r {
        let mut best: Option<(usize, CVec, f64)> = None;
        for (i, v) in cands.iter().enumerate() {
            if used[i] {
                continue;
            }
            let w = h_orthogonalize(&h, &basis, v);
            let nw = h_norm(&h, &w);
            if best.as_ref().is_none_or(|(_, _, nb)| nw > nb * (1.0 + 1e-12)) {
                best = Some((i, w, nw));
            }
        }
        let (i, w, nw) = best.ok_or_else(|| Error::DimensionMismatch("empty fibre".into()))?;
        if nw <= 0.0 {
            return Err(Error::SingularPoint {
                point: p.to_real(),
                sigma_alpha: 0.0,
                sigma_beta: 0.0,
            });
        }
        used[i] = true;
        basis.push(w / c(nw));
    }
    let basis = if basis.is_empty() {
        CMat::zeros(k1, 0)
    } else {
        CMat::from_columns(&basis)
    };
    Ok(CohomFiber {
        point: *p,
        basis,
        projector,
        h1: h,
    })
}

fn singular_error(v: &Validity) -> Error {
    Error::SingularPoint {
        point: v.point,
        sigma_alpha: v.sigma_alpha.unwrap_or(f64::NAN),
        sigma_beta: v.sigma_beta.unwrap_or(f64::NAN),
    }
}

pub fn cohomology_frame(m: &dyn Monad, p: &Point3) -> Result<CohomFiber> {
    let v = validate_monad(m, p);
    if !v.regular() {
        return Err(singular_error(&v));
    }
    fibre_unchecked(m, p)
}

/// Gram matrix `H_ab = h₁(s′_a, s′_b)` of sections `s_a ∈ ker β` (columns of
/// `sections`) after projecting off `im α`.
pub fn induced_metric(m: &dyn Monad, p: &Point3, sections: &CMat) -> Result<CMat> {
    let v = validate_monad(m, p);
    if !v.regular() {
        return Err(singular_error(&v));
    }
    let b = m.beta(p);
    let scale = sections.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0)
        * b.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    if b.nrows() > 0 {
        let res = (&b * sections).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if res > 1e-10 * scale {
            return Err(Error::InvalidInput(format!(
                "section not in ker beta (residual {res:.3e})"
            )));
        }
    }
    let projected = project_off_alpha(m, p, sections)?;
    let h1 = m.metric(Slot::E1, p);
    Ok((projected.adjoint() * h1 * projected).transpose())
}

/// `s − α(α†α)⁻¹α†s`.
pub fn project_off_alpha(m: &dyn Monad, p: &Point3, s: &CMat) -> Result<CMat> {
    let [k0, _, _] = m.ranks();
    if k0 == 0 {
        return Ok(s.clone());
    }
    let a = m.alpha(p);
    let h0 = MetricMatrix::new(m.metric(Slot::E0, p))?;
    let h1 = MetricMatrix::new(m.metric(Slot::E1, p))?;
    let a_adj = crate::geometry::adjoint_wrt(&a, &h0, &h1)?;
    let gram = &a_adj * &a;
    let coef = solve(&gram, &(&a_adj * s))?;
    Ok(s - a * coef)
}

/// Curvature of the cohomology bundle in the orthonormal fibre basis.
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub fiber: CohomFiber,
    /// (1,1) part: coefficient of `dw_j ∧ dw̄_l`.
    pub f: Form11,
    /// (2,0) part: coefficient of `dw_j ∧ dw_l` for `j < l`, in [`pairs`] order.
    pub f20: Vec<CMat>,
    /// (0,2) part: coefficient of `dw̄_j ∧ dw̄_l` for `j < l`.
    pub f02: Vec<CMat>,
    /// `iΛF`.
    pub mean: CMat,
}

/// Index pairs `j < l` over `n` coordinates.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|j| (j + 1..n).map(move |l| (j, l))).collect()
}

fn pair_norm(cs: &[CMat]) -> f64 {
    2.0 * cs.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

impl CurvatureReport {
    /// `|F|` of the (1,1) part (see [`Form11::norm`]).
    pub fn norm_f(&self) -> f64 {
        self.f.norm()
    }

    /// Operator norm of `iΛF`.
    pub fn norm_mean(&self) -> f64 {
        hermitian_op_norm(&self.mean)
    }

    pub fn norm_f20(&self) -> f64 {
        pair_norm(&self.f20)
    }

    pub fn norm_f02(&self) -> f64 {
        pair_norm(&self.f02)
    }

    /// `|iΛF| + |F^{0,2}| + |F^{2,0}|`.
    pub fn asd_residual(&self) -> f64 {
        self.norm_mean() + self.norm_f02() + self.norm_f20()
    }
}

pub(crate) struct Derivs<'a> {
    m: &'a dyn Monad,
    h: f64,
}

impl<'a> Derivs<'a> {
    pub(crate) fn new(m: &'a dyn Monad, p: &Point3) -> Self {
        Self { m, h: m.fd_step(p) }
    }

    fn d_alpha(&self, p: &Point3, j: usize) -> Result<CMat> {
        match self.m.d_alpha(p, j) {
            Some(d) => Ok(d),
            None => fd_derivative(|q| Ok(self.m.alpha(q)), p, j, Wirtinger::Holomorphic, self.h),
        }
    }

    fn d_beta(&self, p: &Point3, j: usize) -> Result<CMat> {
        match self.m.d_beta(p, j) {
            Some(d) => Ok(d),
            None => fd_derivative(|q| Ok(self.m.beta(q)), p, j, Wirtinger::Holomorphic, self.h),
        }
    }

    pub(crate) fn theta(&self, slot: Slot, p: &Point3, j: usize) -> Result<CMat> {
        if let Some(t) = self.m.connection(slot, p, j) {
            return Ok(t);
        }
        let dh = fd_derivative(
            |q| Ok(self.m.metric(slot, q)),
            p,
            j,
            Wirtinger::Holomorphic,
            self.h,
        )?;
        solve(&self.m.metric(slot, p), &dh)
    }

    fn ambient(&self, p: &Point3, j: usize, l: usize) -> Result<CMat> {
        if let Some(f) = self.m.ambient_curvature(p, j, l) {
            return Ok(f);
        }
        let d = fd_derivative(
            |q| self.theta(Slot::E1, q, j),
            p,
            l,
            Wirtinger::AntiHolomorphic,
            self.h,
        )?;
        Ok(-d)
    }
}

fn adj(m: &CMat, h_src: &CMat, h_dst: &CMat) -> Result<CMat> {
    solve(h_src, &(m.adjoint() * h_dst))
}

/// Curvature from the second-fundamental-form identity for monads, with
/// `∇α = ∂α + θ₁α − αθ₀`, `∇β = ∂β + θ₂β − βθ₁`:
///
/// `F_{jl̄} = P[F₁ − (∇_lβ)†(ββ†)⁻¹∇_jβ + ∇_jα(α†α)⁻¹(∇_lα)†]P`.
pub fn curvature(m: &dyn Monad, p: &Point3) -> Result<CurvatureReport> {
    let fiber = cohomology_frame(m, p)?;
    let n = m.base_dim();
    let [k0, _, k2] = m.ranks();
    let d = Derivs::new(m, p);
    let (h0, h1, h2) = (
        m.metric(Slot::E0, p),
        m.metric(Slot::E1, p),
        m.metric(Slot::E2, p),
    );
    let a = m.alpha(p);
    let b = m.beta(p);

    let mut na = Vec::with_capacity(n);
    let mut nb = Vec::with_capacity(n);
    for j in 0..n {
        let t1 = d.theta(Slot::E1, p, j)?;
        if k0 > 0 {
            let t0 = d.theta(Slot::E0, p, j)?;
            na.push(d.d_alpha(p, j)? + &t1 * &a - &a * t0);
        }
        if k2 > 0 {
            let t2 = d.theta(Slot::E2, p, j)?;
            nb.push(d.d_beta(p, j)? + t2 * &b - &b * &t1);
        }
    }
    let a_adj = if k0 > 0 { Some(adj(&a, &h0, &h1)?) } else { None };
    let b_adj = if k2 > 0 { Some(adj(&b, &h1, &h2)?) } else { None };
    let ata = a_adj.as_ref().map(|aa| aa * &a);
    let bbt = b_adj.as_ref().map(|ba| &b * ba);

    let left = fiber.basis.adjoint() * &h1;
    let right = &fiber.basis;
    let raw = |j: usize, l: usize| -> Result<CMat> {
        let mut x = d.ambient(p, j, l)?;
        if let Some(bbt) = &bbt {
            let nbl_adj = adj(&nb[l], &h1, &h2)?;
            x -= nbl_adj * solve(bbt, &nb[j])?;
        }
        if let Some(ata) = &ata {
            let nal_adj = adj(&na[l], &h0, &h1)?;
            x += &na[j] * solve(ata, &nal_adj)?;
        }
        Ok(&left * x * right)
    };
    let mut coeffs = Vec::with_capacity(n * n);
    for j in 0..n {
        for l in 0..n {
            coeffs.push(raw(j, l)?);
        }
    }
    let mut it = coeffs.into_iter();
    let f = Form11::from_fn(n, |_, _| it.next().expect("n² coefficients"))?;

    // (2,0) part: −(X_jl − X_lj), X_jl = ∇_lα (α†α)⁻¹ α†β† (ββ†)⁻¹ ∇_jβ; zero when βα = 0.
    let mut f20 = Vec::new();
    let mut f02 = Vec::new();
    for (j, l) in pairs(n) {
        let x = match (&ata, &bbt, &a_adj, &b_adj) {
            (Some(ata), Some(bbt), Some(aa), Some(ba)) => {
                let mid = aa * ba;
                let xjl = &na[l] * solve(ata, &(&mid * solve(bbt, &nb[j])?))?;
                let xlj = &na[j] * solve(ata, &(&mid * solve(bbt, &nb[l])?))?;
                -(&left * (xjl - xlj) * right)
            }
            _ => CMat::zeros(fiber.rank(), fiber.rank()),
        };
        f02.push(-x.adjoint());
        f20.push(x);
    }

    let mean = crate::geometry::lambda_contract(&f) * crate::geometry::I;
    Ok(CurvatureReport {
        fiber,
        f,
        f20,
        f02,
        mean,
    })
}

/// Curvature of the `h₁`-orthogonal projection onto `ker β ∩ ker α†` by the
/// Gauss formula `F = P F₁ P + P(DP)∧(DP)P`, with `DP` by finite differences of
/// the projector. Valid for any family of subspaces, including data that is
/// not a monad; the (2,0) and (0,2) parts then measure non-holomorphicity.
pub fn curvature_projector(m: &dyn Monad, p: &Point3, h: f64) -> Result<CurvatureReport> {
    let fiber = fibre_unchecked(m, p)?;
    let n = m.base_dim();
    let [_, k1, _] = m.ranks();
    let d = Derivs { m, h };
    let proj = |q: &Point3| fibre_unchecked(m, q).map(|f| f.projector);
    let pp = &fiber.projector;
    let perp = CMat::identity(k1, k1) - pp;
    let h1 = &fiber.h1;

    let mut ii_w = Vec::with_capacity(n);
    let mut ii_wbar = Vec::with_capacity(n);
    for j in 0..n {
        let theta = d.theta(Slot::E1, p, j)?;
        let dp = fd_derivative(proj, p, j, Wirtinger::Holomorphic, h)?;
        let dbp = fd_derivative(proj, p, j, Wirtinger::AntiHolomorphic, h)?;
        let comm = &theta * pp - pp * &theta;
        ii_w.push(&perp * (dp + comm) * pp);
        ii_wbar.push(&perp * dbp * pp);
    }
    let star = |x: &CMat| adj(x, h1, h1);
    let left = fiber.basis.adjoint() * h1;
    let right = fiber.basis.clone();
    let mut coeffs = Vec::with_capacity(n * n);
    for j in 0..n {
        for l in 0..n {
            let x = pp * d.ambient(p, j, l)? * pp - star(&ii_w[l])? * &ii_w[j]
                + star(&ii_wbar[j])? * &ii_wbar[l];
            coeffs.push(&left * x * &right);
        }
    }
    let mut it = coeffs.into_iter();
    let f = Form11::from_fn(n, |_, _| it.next().expect("n² coefficients"))?;
    let mut f20 = Vec::new();
    let mut f02 = Vec::new();
    for (j, l) in pairs(n) {
        let x20 = star(&ii_wbar[j])? * &ii_w[l] - star(&ii_wbar[l])? * &ii_w[j];
        let x02 = star(&ii_w[j])? * &ii_wbar[l] - star(&ii_w[l])? * &ii_wbar[j];
        f20.push(&left * x20 * &right);
        f02.push(&left * x02 * &right);
    }
    let mean = crate::geometry::lambda_contract(&f) * crate::geometry::I;
    Ok(CurvatureReport {
        fiber,
        f,
        f20,
        f02,
        mean,
    })
}

/// Chern curvature of a holomorphic frame's Gram matrix, `F = ∂̄(∂H·H⁻¹)` by
/// nested centered differences, returned in the column convention.
pub fn frame_curvature_fd(
    m: &dyn Monad,
    frame: &dyn Fn(&Point3) -> Result<CMat>,
    p: &Point3,
    h: f64,
) -> Result<Form11> {
    let n = m.base_dim();
    let gram = |q: &Point3| -> Result<CMat> {
        let s = frame(q)?;
        let g = induced_metric(m, q, &s)?.transpose();
        if crate::geometry::singular_values(&g).last().copied().unwrap_or(0.0) < SINGULAR_THRESHOLD {
            return Err(Error::DegenerateFrame(q.to_real()));
        }
        Ok(g)
    };
    // Column convention: Φ_j = G⁻¹ ∂_j G with G = Hᵗ.
    let phi = |q: &Point3, j: usize| -> Result<CMat> {
        let dg = fd_derivative(gram, q, j, Wirtinger::Holomorphic, h)?;
        solve(&gram(q)?, &dg)
    };
    let mut coeffs = Vec::with_capacity(n * n);
    for j in 0..n {
        for l in 0..n {
            let d = fd_derivative(|q| phi(q, j), p, l, Wirtinger::AntiHolomorphic, h)?;
            coeffs.push(-d);
        }
    }
    let mut it = coeffs.into_iter();
    Form11::from_fn(n, |_, _| it.next().expect("n² coefficients"))
}

#[derive(Clone, Debug)]
pub struct FdCheck {
    pub relative_error: f64,
    pub formula: Form11,
    pub finite_difference: Form11,
}

/// Compares [`curvature`] with the finite-difference Chern curvature of the
/// induced metric of `frame` (columns: holomorphic sections of `ker β`).
pub fn curvature_fd_check(
    m: &dyn Monad,
    p: &Point3,
    frame: &dyn Fn(&Point3) -> Result<CMat>,
    h: f64,
) -> Result<FdCheck> {
    let report = curvature(m, p)?;
    let fd = frame_curvature_fd(m, frame, p, h)?;
    // Change of frame: C = B†h₁ S maps frame coordinates to orthonormal ones.
    let cmat = report.fiber.coordinates(&frame(p)?);
    let cinv = crate::geometry::inverse(&cmat).map_err(|_| Error::DegenerateFrame(p.to_real()))?;
    let fd_b = fd.conjugated(&cmat, &cinv);
    let scale = report.f.max_entry().max(fd_b.max_entry());
    let diff = report.f.max_entry_diff(&fd_b)?;
    let relative_error = if scale > 0.0 { diff / scale } else { 0.0 };
    Ok(FdCheck {
        relative_error,
        formula: report.f,
        finite_difference: fd_b,
    })
}
