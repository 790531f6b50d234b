//! Toeplitz matrices generated by Fisher-Hartwig symbols: exact Fourier
//! coefficients, FFT-accelerated matrix-free spectral norms, the limiting
//! integral operators on L^2(0,1) and their norms, and study harnesses for
//! the asymptotic law ||T_n(a)|| ~ ||K|| |b(t0)| n^{2 Re alpha}.

// Negated comparisons like !(x > 0.0) reject NaN as well; reference tables
// keep their full published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]
#![allow(clippy::type_complexity)]
#![allow(clippy::manual_is_multiple_of)]

pub mod asymptotics;
pub mod cli;
pub mod dense;
pub mod error;
pub mod fft;
pub mod integral_ops;
pub mod krylov;
pub mod parallel;
pub mod rng;
pub mod symbols;
pub mod toeplitz;

pub use asymptotics::{
    constant_profile, convergence_study, predict_multi, predict_powerlike, predict_single,
    vanishing_factor_study, Prediction, ProfileRow, SingularityReport, Study, StudyOptions,
    StudyRow, VanishStudy, Verdict,
};
pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use integral_ops::{
    fh_kernel, k_alpha_apply_one, k_alpha_bounds, kernel_norm, widom_norm, HomogeneousKernel,
    KernelNormResult, PiecewiseConstantKernel,
};
pub use krylov::{largest_singular_value, LinearOp, NormEstimate, NormOptions};
pub use symbols::{
    asymptotic_constants, pure_fh_coeff, Angle, FHFactor, FHSymbol, SmoothPart,
};
pub use toeplitz::{block_rearrange, CoeffWindow, ToeplitzOperator};
