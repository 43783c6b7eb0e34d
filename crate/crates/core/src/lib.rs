//! Numerical laboratory for the cubic Szegő equation i u̇ = Π(|u|²u) on the
//! Hardy space of the circle.
//!
//! The crate evaluates the explicit solution formula
//!
//! ```text
//! u(t, z) = ((I − z e^{−itH²} e^{itK²} S*)^{−1} e^{−itH²} u₀ | 1)
//! ```
//!
//! and its generalization to the Szegő hierarchy through spectral calculus on
//! the Hankel operators of the initial datum, and checks it against a direct
//! fourth-order Runge–Kutta integration in Fourier coefficients.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod direct;
pub mod error;
pub mod experiments;
pub mod explicit;
pub mod hankel;
pub mod hardy;
pub mod linalg;
pub mod rational;

pub use direct::{observe, rk4_hierarchy, rk4_szego, FlowObservation, Rk4Config};
pub use error::{Result, SzegoError};
pub use hankel::{
    build_hankel, build_toeplitz, cayley_resolvent, hierarchy_generators, lax_generators, reduce, vd_membership,
    HankelModel, ReducedModel,
};
pub use hardy::{
    cubic_szego_rhs, inner, momentum_density, norm_sobolev, norm_wiener, project_szego, shift, shift_adjoint,
    HardyFunction, Retruncate, SobolevIndex, TwoSided, C64,
};
pub use linalg::{eigh, eigh_psd, SpectralData};
pub use rational::{coeffs_to_rational, rational_to_coeffs, RationalSymbol};
