//! Sine-spectral solvers and a benchmarking harness for the semilinear
//! Klein--Gordon equation
//!
//! ```text
//! ∂ₜₜu − Δu = f(u)   on Ω = [0,1]^d,   u = 0 on ∂Ω,
//! ```
//!
//! rewritten as the first-order system `∂ₜU = LU + F(U)` for the pair
//! `U = (u, ∂ₜu)` with `L = [0, 1; Δ, 0]` and `F(U) = (0, f(u))`.
//!
//! The crate is organised around the diagonalisation of `L` in the
//! orthonormal sine basis `e_k(x) = ∏ √2 sin(kᵢπxᵢ)`: every function of `L`
//! acts mode-by-mode as a real 2×2 block, so exponential integrators reduce
//! to discrete sine transforms plus `O(N)` multiplier sweeps.
//!
//! Modules:
//!
//! - [`spectral`]: grids, nodal/spectral fields, DST-I transforms, Sobolev
//!   and energy norms.
//! - [`operators`]: exact per-mode blocks for `e^{tL}`, the `φ₂` correction,
//!   trigonometric filters and Helmholtz symbols.
//! - [`nonlinearity`]: scalar models `f` with derivatives, and the vector
//!   fields `F(U)` and `H(U)` evaluated at collocation nodes.
//! - [`integrators`]: one-step methods behind a common interface — the
//!   φ₂-corrected Lie splitting plus classical comparison schemes.
//! - [`experiments`]: seeded random initial data, reference solutions, error
//!   measurement and convergence/spatial sweeps.

pub mod error;
pub mod experiments;
pub mod integrators;
pub mod nonlinearity;
pub mod operators;
pub mod spectral;

pub use error::{Error, Result};
pub use integrators::{SchemeId, StepContext};
pub use nonlinearity::NonlinearModel;
pub use operators::TrigMethod;
pub use spectral::{Grid, PairNormLevel, PairState, Representation, SpectralField};
