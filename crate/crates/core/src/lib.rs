//! Powered-Fejér concentrated matrix-exponential (PF-CME) distributions.
//!
//! A family member of index `m >= 3` has density
//!
//! ```text
//! f_m(t) = C_m e^{-t} Φ_m(ω_m (t - 1))^{r_m},   t >= 0,
//! ```
//!
//! where `Φ_m` is the Fejér kernel, `r_m = ⌈ln m⌉`,
//! `h_m = 2 ln m + ln ln m` and `ω_m = 2π / h_m`. All poles share the real
//! part `-1`, the minimal matrix-exponential order is `2 r_m (m - 1) + 1`,
//! and the squared coefficient of variation decays like `ln m / m²`, which
//! eventually drops below the Erlang bound `1/n` at equal order.
//!
//! The numerical core is generic over [`Real`] (`f32`, `f64`); the
//! coefficient convolution additionally accepts exact rationals. The
//! aliases at the crate root fix the scalar to `f64`.
//!
//! ```
//! use pfcme::PfCme64;
//!
//! let dist = PfCme64::new(200).unwrap();
//! assert_eq!(dist.params().order, 2389);
//! assert!((dist.scv() - 8.003e-4).abs() < 1e-6);
//! ```

pub mod bounds;
pub mod compensated;
pub mod decomposition;
pub mod distribution;
pub mod error;
pub mod kernel;
pub mod nilt;
mod quadrature;
pub mod scalar;

pub use bounds::{fit_constants, verify_all, verify_peak, verify_tail, verify_transition, BoundReport};
pub use decomposition::{decompose, oracle_moments, sample, CellDecomposition, SamplerState};
pub use distribution::{
    basis_integrals, diagnostics, erlang_scv, make_params, moment_sums, BasisIntegrals,
    Diagnostics, MomentSet, PfCme,
};
pub use error::{PfCmeError, Result};
pub use kernel::{
    fejer_coefficients, fejer_eval, power_coefficients, w_eval_cosine, w_eval_power,
    FamilyParams, FejerCoefficients, PoweredKernelCoefficients,
};
pub use nilt::{catalog, invert, lookup, pole_residue, PoleResidueForm, RationalTransform, TransformFunction};
pub use scalar::Real;

pub type PfCme64 = PfCme<f64>;
pub type PfCme32 = PfCme<f32>;
pub type FamilyParams64 = FamilyParams<f64>;
pub type MomentSet64 = MomentSet<f64>;
pub type PoweredKernel64 = PoweredKernelCoefficients<f64>;
pub type CellDecomposition64 = CellDecomposition<f64>;
pub type PoleResidueForm64 = PoleResidueForm<f64>;
pub type TransformFunction64 = TransformFunction<f64>;
pub type BoundReport64 = BoundReport<f64>;
