use num_complex::Complex64;
use std::fmt;

/// Library error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Gamma function evaluated at a nonpositive integer.
    GammaPole { z: Complex64 },
    /// Re(alpha) must lie in (0, 1/2).
    AlphaOutOfStrip { alpha: Complex64 },
    /// Re(beta) must lie in (-1/2, 1/2].
    BetaOutOfStrip { beta: Complex64 },
    /// Factor angles of a symbol must be pairwise distinct.
    DuplicateAngle { theta: f64 },
    /// Symbol evaluated at one of its singular angles.
    SingularAngle { theta: f64 },
    /// Requested coefficient is not resolvable at the given truncation.
    TruncationTooSmall { needed: i64, trunc: i64 },
    /// Window must have exactly 2n-1 entries.
    WindowLength { expected: usize, got: usize },
    /// Block rearrangement requires q to divide n.
    NotDivisible { n: usize, q: usize },
    /// Discretization level out of range (must be >= 3).
    InvalidLevel { level: u32 },
    /// Scalar argument outside its admissible domain.
    OutOfDomain { what: &'static str, value: f64 },
    /// Prediction requested for a symbol with no singular factors.
    NoFactors,
    /// Smooth part vanishes at a factor angle, so the prediction degenerates.
    SmoothVanishesAtFactor { theta: f64 },
    /// Vanishing-factor study requires the smooth part to vanish at t0.
    SmoothPartNotVanishing { modulus: f64 },
    /// Multi-singularity prediction with incommensurate angles requires the
    /// experimental mode.
    CommensurabilityRequired,
    /// Grids must be strictly increasing and nonempty.
    BadGrid,
    /// Tolerances must be positive.
    NonPositiveTol,
    /// Homogeneous kernel with both constants zero has no prediction content.
    KernelDegenerate,
    /// Angle denominator must be nonzero.
    ZeroDenominator,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::GammaPole { z } => write!(f, "gamma pole at z = {z}"),
            Error::AlphaOutOfStrip { alpha } => {
                write!(f, "alpha = {alpha} outside the strip 0 < Re(alpha) < 1/2")
            }
            Error::BetaOutOfStrip { beta } => {
                write!(f, "beta = {beta} outside the strip -1/2 < Re(beta) <= 1/2")
            }
            Error::DuplicateAngle { theta } => {
                write!(f, "duplicate factor angle theta = {theta}")
            }
            Error::SingularAngle { theta } => {
                write!(f, "symbol is singular at theta = {theta}")
            }
            Error::TruncationTooSmall { needed, trunc } => {
                write!(f, "truncation {trunc} too small, need at least {needed}")
            }
            Error::WindowLength { expected, got } => {
                write!(f, "coefficient window needs {expected} entries, got {got}")
            }
            Error::NotDivisible { n, q } => write!(f, "q = {q} does not divide n = {n}"),
            Error::InvalidLevel { level } => write!(f, "discretization level {level} < 3"),
            Error::OutOfDomain { what, value } => write!(f, "{what} = {value} out of domain"),
            Error::NoFactors => write!(f, "symbol has no singular factors"),
            Error::SmoothVanishesAtFactor { theta } => {
                write!(f, "smooth part vanishes at factor angle theta = {theta}")
            }
            Error::SmoothPartNotVanishing { modulus } => {
                write!(f, "smooth part does not vanish at t0 (|c(t0)| = {modulus:e})")
            }
            Error::CommensurabilityRequired => write!(
                f,
                "factor angles are not certified commensurate; enable experimental mode"
            ),
            Error::BadGrid => write!(f, "grid must be nonempty and strictly increasing"),
            Error::NonPositiveTol => write!(f, "tolerance must be positive"),
            Error::KernelDegenerate => write!(f, "kernel constants C+ and C- are both zero"),
            Error::ZeroDenominator => write!(f, "angle denominator must be nonzero"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
