//! Universal approximation toolkit for complex-valued neural networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`complexcore`]: scalar types, sampling grids and the activation catalog.
//! * [`wirtinger`]: finite-difference Wirtinger calculus and mollification.
//! * [`network`]: feedforward weights, evaluation and the closure algebra.
//! * [`classifier`]: numerical universality verdicts for an activation.
//! * [`constructor`]: explicit shallow and deep approximants of a target.
//! * [`verify`]: obstruction experiments and structural invariants.
//!
//! The numeric core (`complexcore`, `wirtinger`, `network`) is generic over
//! the real scalar through [`Scalar`]; the decision and synthesis layers work
//! in `f64`, and the aliases below name the common concrete types.

pub mod classifier;
pub mod complexcore;
pub mod constructor;
mod linalg;
pub mod network;
pub mod targets;
pub mod verify;
pub mod wirtinger;

use num_complex::Complex;

pub use complexcore::{activation_catalog, find_activation, make_grid, ActivationSpec, Grid};
pub use network::{NetworkWeights, ShallowNetwork};

/// Library version string embedded into every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Real scalar usable by the generic numeric core.
pub trait Scalar:
    num_traits::Float + num_traits::FloatConst + std::fmt::Debug + Default + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Double-precision complex number, the working type of the library.
pub type C64 = Complex<f64>;
/// Single-precision complex number.
pub type C32 = Complex<f32>;
/// Double-precision network weights.
pub type Network = NetworkWeights<f64>;
/// Single-precision network weights.
pub type Network32 = NetworkWeights<f32>;
/// Double-precision shallow network.
pub type Shallow = ShallowNetwork<f64>;
/// Double-precision Wirtinger jet.
pub type Jet = wirtinger::WirtingerJet<f64>;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid exhausted: no sample point survived filtering")]
    GridExhausted,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("activation singularity hit at {re}{im:+}i")]
    ActivationSingularity { re: f64, im: f64 },
    #[error("stencil hit singularity at {re}{im:+}i")]
    StencilSingularity { re: f64, im: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("depth mismatch: {left} vs {right} hidden layers")]
    DepthMismatch { left: usize, right: usize },
    #[error("inactive expansion point for ({m}, {ell}): derivative magnitude {magnitude:e}")]
    InactiveExpansionPoint { m: usize, ell: usize, magnitude: f64 },
    #[error("no active point found for ({m}, {ell})")]
    NoActivePoint { m: usize, ell: usize },
    #[error("ill-conditioned basis (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown activation `{0}`")]
    UnknownActivation(String),
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("malformed document: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn singular_at(z: C64) -> Self {
        Error::ActivationSingularity { re: z.re, im: z.im }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Converts an `f64` constant into the generic scalar.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from(x).expect("finite f64 literal representable in scalar type")
}
