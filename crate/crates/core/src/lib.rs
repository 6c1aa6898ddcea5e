//! Monad constructions of Hermitian connections over C² and C³.
//!
//! The crate evaluates the curvature of cohomology bundles of monads
//! `E₀ → E₁ → E₂` with non-flat fibre metrics, and builds on that:
//!
//! - [`adhm`]: the charge-one ADHM family over C² (ASD checks, charge, framed moduli).
//! - [`ansatz`]: the reflexive-sheaf ansatz over C³, its decay and cancellation
//!   bounds, asymptotic frames, the twisted monad near the z-axis and the conical
//!   tangent cone at the origin.
//! - [`potential`]: the barrier potential `G = ∫ ℓ(x')/|x-x'|⁴` by stratified Monte Carlo.
//! - [`flow`]: an explicit Dirichlet heat flow for Hermitian metrics on a box in C³.
//! - [`growth`]: growth degrees of holomorphic sections at the origin and at infinity.
//!
//! Conventions are collected in [`geometry`]: the Kähler form is
//! `ω = (i/2) Σ dw_j ∧ dw̄_j`, so that `Λ(i dw_j ∧ dw̄_j) = 2` and
//! `Λ(i∂∂̄u) = Δu/2` with `Δ` the sum of the six real second derivatives.

pub mod adhm;
pub mod ansatz;
pub mod error;
pub mod fit;
pub mod flow;
pub mod geometry;
pub mod growth;
pub mod monad;
pub mod potential;
pub mod report;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{CMat, Point3, C64};
