//! Shimorin-type reproducing kernels on the unit disk.
//!
//! A finite positive measure `ν` on `[0, 1]` induces the kernel
//!
//! ```text
//! S_ν(z, λ) = (1 − zλ̄)⁻¹ ∫₀¹ (1 − r zλ̄)⁻¹ dν(r)
//! ```
//!
//! This crate evaluates such kernels, recovers the radial weight whose Bergman
//! kernel equals `S_ν` (through the reciprocal-partial-sum moment transform),
//! classifies measures and weights, and searches for a log-convex profile `h`
//! whose Laplace moments reproduce the kernel coefficients.
//!
//! Module map:
//!
//! * [`measure`]: measures on `[0, 1]`, moments, the divergence classifier.
//! * [`bernstein`]: the Bernstein function `f(s)` and kernel coefficients.
//! * [`kernels`]: series and integral evaluation, kernel matching.
//! * [`berg_duran`]: reciprocal partial sums, complete monotonicity, induced
//!   weight moments and discrete reconstruction.
//! * [`weight_lab`]: radial weights, h-profiles and their checks.
//! * [`charfit`]: the log-convex Laplace-moment feasibility solver.

pub mod berg_duran;
pub mod bernstein;
pub mod charfit;
mod error;
pub mod kernels;
pub mod measure;
mod numeric;
pub mod quadrature;
pub mod reference;
pub mod weight_lab;

pub use berg_duran::{MomentSequence, Provenance};
pub use bernstein::BernsteinFunction;
pub use error::{Error, Result};
pub use kernels::{DiskPoint, KernelSeries};
pub use measure::{MeasureOnUnitInterval, PrwVerdict};
pub use num_complex::Complex64;
pub use quadrature::QuadratureRule;
pub use weight_lab::{HProfile, RadialWeightProfile};
