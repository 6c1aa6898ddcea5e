//! Coordinates, (1,1)-forms, metric adjoints and finite-difference
//! Wirtinger derivatives on C³ (and its C² slice `z = 0`).
//!
//! Fixed conventions used everywhere in the crate:
//!
//! - Kähler form `ω = (i/2) Σ dw_j ∧ dw̄_j`.
//! - A [`Form11`] stores the coefficient of `dw_j ∧ dw̄_l`; the contraction is
//!   `Λφ = -2i Σ_j φ_{jj̄}`, so `Λ(i dw_j ∧ dw̄_j) = 2` and `Λ(i∂∂̄u) = Δu/2`.
//! - Hermitian inner products are `⟨u, v⟩_h = v† h u`.
//! - Chern curvature in a holomorphic frame is `F = ∂̄(∂H · H⁻¹)`.

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A point of C³. Points of C² are stored with `z = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point3 {
    pub w: [C64; 3],
}

impl Point3 {
    pub fn new(x: C64, y: C64, z: C64) -> Self {
        Self { w: [x, y, z] }
    }

    pub fn c2(x: C64, y: C64) -> Self {
        Self::new(x, y, C64::new(0.0, 0.0))
    }

    pub fn real(x: f64, y: f64, z: f64) -> Self {
        Self::new(C64::new(x, 0.0), C64::new(y, 0.0), C64::new(z, 0.0))
    }

    /// Real coordinates ordered `(Re x, Im x, Re y, Im y, Re z, Im z)`.
    pub fn from_real(r: [f64; 6]) -> Self {
        Self::new(
            C64::new(r[0], r[1]),
            C64::new(r[2], r[3]),
            C64::new(r[4], r[5]),
        )
    }

    pub fn to_real(&self) -> [f64; 6] {
        [
            self.w[0].re,
            self.w[0].im,
            self.w[1].re,
            self.w[1].im,
            self.w[2].re,
            self.w[2].im,
        ]
    }

    pub fn x(&self) -> C64 {
        self.w[0]
    }
    pub fn y(&self) -> C64 {
        self.w[1]
    }
    pub fn z(&self) -> C64 {
        self.w[2]
    }

    /// `|x⃗|² = |x|² + |y|² + |z|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.w.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `|x|² + |y|²`.
    pub fn planar_norm_sqr(&self) -> f64 {
        self.w[0].norm_sqr() + self.w[1].norm_sqr()
    }

    /// Shift along real axis `axis` (0..6) by `h`.
    pub fn shifted(&self, axis: usize, h: f64) -> Self {
        let mut r = self.to_real();
        r[axis] += h;
        Self::from_real(r)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::new(self.w[0] * t, self.w[1] * t, self.w[2] * t)
    }

    pub fn add(&self, other: &Point3) -> Self {
        Self::new(
            self.w[0] + other.w[0],
            self.w[1] + other.w[1],
            self.w[2] + other.w[2],
        )
    }
}

/// A matrix-valued (1,1)-form `Σ φ_{jl̄} dw_j ∧ dw̄_l` over `n` complex coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Form11 {
    n: usize,
    coeffs: Vec<CMat>,
}

impl Form11 {
    pub fn zeros(n: usize, rank: usize) -> Self {
        Self {
            n,
            coeffs: vec![CMat::zeros(rank, rank); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> CMat) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(n * n);
        for j in 0..n {
            for l in 0..n {
                coeffs.push(f(j, l));
            }
        }
        let r = coeffs[0].nrows();
        if coeffs.iter().any(|c| c.nrows() != r || c.ncols() != r) {
            return Err(Error::DimensionMismatch(
                "form coefficients must share one square shape".into(),
            ));
        }
        Ok(Self { n, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.coeffs[0].nrows()
    }

    /// Coefficient of `dw_j ∧ dw̄_l`.
    pub fn get(&self, j: usize, l: usize) -> &CMat {
        &self.coeffs[j * self.n + l]
    }

    pub fn get_mut(&mut self, j: usize, l: usize) -> &mut CMat {
        &mut self.coeffs[j * self.n + l]
    }

    /// Conjugates every coefficient by `g`: `φ_{jl̄} ↦ g φ_{jl̄} g⁻¹`.
    pub fn conjugated(&self, g: &CMat, g_inv: &CMat) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| g * c * g_inv).collect(),
        }
    }

    /// Norm of the real 2-form in an orthonormal fibre basis:
    /// `|dw_j ∧ dw̄_l| = 2`, so `|φ|² = 4 Σ ‖φ_{jl̄}‖²_F`.
    pub fn norm(&self) -> f64 {
        2.0 * self.coeffs.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus over all coefficients.
    pub fn max_entry(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_entry_diff(&self, other: &Form11) -> Result<f64> {
        if self.n != other.n || self.rank() != other.rank() {
            return Err(Error::DimensionMismatch("forms differ in shape".into()));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }
}

/// `Λφ = -2i Σ_j φ_{jj̄}`.
pub fn lambda_contract(phi: &Form11) -> CMat {
    let r = phi.rank();
    let mut acc = CMat::zeros(r, r);
    for j in 0..phi.dim() {
        acc += phi.get(j, j);
    }
    acc * C64::new(0.0, -2.0)
}

/// Positive-definite Hermitian fibre metric.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMatrix(CMat);

impl MetricMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch("metric must be square".into()));
        }
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        if hermitian_defect(&m) > 1e-12 * scale {
            return Err(Error::SingularMetric);
        }
        if hermitian_eigenvalues(&m).first().is_none_or(|&l| l <= 0.0) {
            return Err(Error::SingularMetric);
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n, n))
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(CMat::from_diagonal(&CVec::from_iterator(
            d.len(),
            d.iter().map(|&v| C64::new(v, 0.0)),
        )))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `⟨u, v⟩_h = v† h u`.
    pub fn inner(&self, u: &CVec, v: &CVec) -> C64 {
        (v.adjoint() * &self.0 * u)[(0, 0)]
    }

    pub fn norm_sqr(&self, u: &CVec) -> f64 {
        self.inner(u, u).re
    }
}

/// Metric adjoint of `m: (C^a, h_src) → (C^b, h_dst)`: `m† = h_src⁻¹ m̄ᵗ h_dst`.
pub fn adjoint_wrt(m: &CMat, h_src: &MetricMatrix, h_dst: &MetricMatrix) -> Result<CMat> {
    if m.ncols() != h_src.dim() || m.nrows() != h_dst.dim() {
        return Err(Error::DimensionMismatch(format!(
            "map is {}x{}, metrics are {} and {}",
            m.nrows(),
            m.ncols(),
            h_src.dim(),
            h_dst.dim()
        )));
    }
    let rhs = m.adjoint() * h_dst.matrix();
    if h_src.dim() == 0 {
        return Ok(rhs);
    }
    solve(h_src.matrix(), &rhs)
}

/// Solves `a x = b` by LU.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() == 0 {
        return Ok(b.clone());
    }
    a.clone().lu().solve(b).ok_or(Error::SingularMetric)
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone().try_inverse().ok_or(Error::SingularMetric)
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real eigenvalues (ascending) of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Operator norm of a Hermitian matrix: the largest eigenvalue modulus.
pub fn hermitian_op_norm(m: &CMat) -> f64 {
    hermitian_eigenvalues(m)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// Singular values (descending).
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `h^{1/2}` and `h^{-1/2}` for a positive-definite Hermitian matrix.
pub fn sqrt_and_inv_sqrt(h: &CMat) -> Result<(CMat, CMat)> {
    let eig = SymmetricEigen::new(h.clone());
    if eig.eigenvalues.iter().any(|&v| v <= 0.0) {
        return Err(Error::SingularMetric);
    }
    let u = &eig.eigenvectors;
    let n = h.nrows();
    let s = DVector::<C64>::from_iterator(n, eig.eigenvalues.iter().map(|&v| C64::new(v.sqrt(), 0.0)));
    let si = DVector::<C64>::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&v| C64::new(1.0 / v.sqrt(), 0.0)),
    );
    let sq = u * CMat::from_diagonal(&s) * u.adjoint();
    let isq = u * CMat::from_diagonal(&si) * u.adjoint();
    Ok((sq, isq))
}

pub(crate) fn cmat_from_rows(rows: usize, cols: usize, data: &[C64]) -> CMat {
    DMatrix::from_row_slice_generic(Dyn(rows), Dyn(cols), data)
}

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Which Wirtinger derivative to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wirtinger {
    /// `∂/∂w = ½(∂_re − i ∂_im)`
    Holomorphic,
    /// `∂/∂w̄ = ½(∂_re + i ∂_im)`
    AntiHolomorphic,
}

/// Centered second-order Wirtinger derivative of a matrix-valued field along `w_dir`.
pub fn fd_derivative<F>(f: F, p: &Point3, dir: usize, kind: Wirtinger, h: f64) -> Result<CMat>
where
    F: Fn(&Point3) -> Result<CMat>,
{
    if dir > 2 {
        return Err(Error::InvalidInput(format!("coordinate index {dir} out of range")));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    let eval = |q: Point3| f(&q).map_err(|e| Error::Stencil(format!("at {:?}: {e}", q.to_real())));
    let d_re = (eval(p.shifted(2 * dir, h))? - eval(p.shifted(2 * dir, -h))?) / c(2.0 * h);
    let d_im = (eval(p.shifted(2 * dir + 1, h))? - eval(p.shifted(2 * dir + 1, -h))?) / c(2.0 * h);
    let sign = match kind {
        Wirtinger::Holomorphic => -1.0,
        Wirtinger::AntiHolomorphic => 1.0,
    };
    Ok((d_re + d_im * C64::new(0.0, sign)) * c(0.5))
}

/// Centered finite-difference Euclidean Laplacian (sum of the `2n` real second derivatives).
pub fn fd_laplacian<F>(f: F, p: &Point3, n: usize, h: f64) -> f64
where
    F: Fn(&Point3) -> f64,
{
    let f0 = f(p);
    (0..2 * n)
        .map(|a| (f(&p.shifted(a, h)) - 2.0 * f0 + f(&p.shifted(a, -h))) / (h * h))
        .sum()
}

/// Analytic-derivative helper: the (1,1)-form `i∂∂̄u` of a scalar with known
/// complex Hessian `u_{jl̄}`.
pub fn i_ddbar(hessian: &[[C64; 3]; 3], n: usize) -> Form11 {
    let mut phi = Form11::zeros(n, 1);
    for j in 0..n {
        for l in 0..n {
            phi.get_mut(j, l)[(0, 0)] = I * hessian[j][l];
        }
    }
    phi
}
