//! Two-point interpolatory Hermite quadrature of arbitrary order.
//!
//! Given `f(a), f'(a), ..., f^(n-1)(a)` and the same jet at `b`, the rule
//! integrates the two-point Hermite interpolant exactly. Everything that can be
//! exact is exact: weights, interpolants and error kernels live in
//! [`BigRational`] arithmetic, and floating point only enters at evaluation
//! boundaries (jets of user integrands, reference integration, `|K|` roots).
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! ```
//! use hq_core::{compute_weights, ratio};
//!
//! let rule = compute_weights(2, &ratio(0, 1), &ratio(1, 1)).unwrap();
//! assert_eq!(rule.w_a(), &[ratio(1, 2), ratio(1, 12)]);
//! assert_eq!(rule.w_b(), &[ratio(1, 2), ratio(-1, 12)]);
//! ```
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so NaN takes the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod autodiff;
mod error;
pub mod exactmath;
pub mod interpolant;
pub mod kernel;
pub mod oracle;
pub mod quadrature;
pub mod weights;

pub use autodiff::{parse, Expr, JetFn, JetProvider, ParseError, TaylorJet, MAX_JET_ORDER};
pub use error::Error;
pub use exactmath::{int_beta, parse_rational, ratio, BigInt, BigRational, FloatPolynomial, Polynomial};
pub use interpolant::{build_hermite, leibniz_coeffs, JetPair, Side};
pub use kernel::{
    antiderivative_chain, kernel_abs_integral, kernel_from_params, kernel_l2sq, peano_kernel, rodrigues_kernel,
    solve_params, AbsIntegral, KernelParams, KernelSet,
};
pub use oracle::{reference_integrate, BaseRule, OracleConfig, OracleResult};
pub use quadrature::{
    bound_l2, bound_uniform, e2_bound_f3, e2_classical_f4, error_at_level, error_exact, error_report,
    integrate_composite, integrate_composite_exact, integrate_single, BoundKind, BoundOptions, DerivativeSamples,
    ErrorReport, IntervalKernel, Partition,
};
pub use weights::{apply_rule, compute_weights, omega_coeffs, HermiteRule, DEFAULT_MAX_ORDER};

pub type Result<T, E = Error> = core::result::Result<T, E>;
