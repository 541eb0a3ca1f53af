//! Cone spectral radii, joint spectral radius brackets and polytope
//! certificates for continuous order-preserving maps on the nonnegative
//! orthant.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front end live in the `conejsr` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is how NaN gets rejected alongside the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod activation;
pub mod bounds;
pub mod cone;
mod error;
pub mod family;
pub mod map;
mod num;
pub mod perron;
pub mod polytope;
pub mod props;

pub use activation::Activation;
pub use bounds::{
    generalized_jsr_partial, jsr_bracket, subhomogeneous_sandwich, trajectory_divergence_check,
    BracketConfig, DepthRow, JsrBracket, Sandwich, TrajectoryReport,
};
pub use cone::{
    dominance_lower, dominance_upper, hilbert_distance, order_unit_norm, slice_normalize,
    thompson_distance, ConeContext, ExtendedRatio, PointVec,
};
pub use error::{Error, Result};
pub use family::{Family, Word};
pub use map::{Asymptotic, Degree, MapExpr, Matrix};
pub use perron::{
    collatz_wielandt_bracket, eigencurve, perturb_interior, power_iterate, slice_spectral_radius,
    CurveReport, CurveRow, CwBracket, EigenPair, PowerConfig,
};
pub use polytope::{
    prenorm_operator_value, prenorm_value, run_polytope, verify_certificate, AlgoConfig,
    CertStatus, Certificate, FinitePrenorm, VerifyReport,
};
pub use props::{check_properties, PropertyKind, PropertyReport, Violation};
