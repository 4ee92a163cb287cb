//! Trigonometric approximation on the circle: Fourier partial sums and
//! de la Vallée-Poussin means, pointwise windowed norms and moduli of
//! continuity, global and windowed best approximation, and the index
//! sequences used to telescope approximation errors across scales.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`). The `*64` and
//! `*32` aliases below fix the precision.

pub mod best_approx;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod local_norms;
pub mod scalar;
pub mod sequences;

pub use best_approx::{
    best_global, windowed_best, windowed_error, Approximator, BestApproxResult, EMethod, FTable, Method, SolverOptions,
};
pub use error::{Error, Result, SolveError};
pub use fourier::{
    compute_coefficients, dirichlet_kernel, partial_sum, vp_kernel, vp_mean, vp_mean_by_kernel, vp_weights,
    wrap_angle, Evaluator, FourierCoefficients, GridFunction, LebesgueExponent, TrigPolynomial,
};
pub use local_norms::{
    averaged_global_modulus, averaged_modulus, delta_op, global_modulus, pointwise_modulus, standard_deltas,
    windowed_norm, GlobalModulus, ModulusTable, NormVariant, WindowPoint, WindowProfile, WindowSpec,
};
pub use scalar::Scalar;
pub use sequences::{decreasing_seq, increasing_seq, tau, DecreasingSeq, IncreasingSeq, TauValue};

pub type GridFunction64 = GridFunction<f64>;
pub type GridFunction32 = GridFunction<f32>;
pub type TrigPolynomial64 = TrigPolynomial<f64>;
pub type TrigPolynomial32 = TrigPolynomial<f32>;
pub type FourierCoefficients64 = FourierCoefficients<f64>;
pub type FourierCoefficients32 = FourierCoefficients<f32>;
pub type WindowSpec64 = WindowSpec<f64>;
pub type WindowSpec32 = WindowSpec<f32>;
pub type Approximator64 = Approximator<f64>;
pub type Approximator32 = Approximator<f32>;
pub type BestApproxResult64 = BestApproxResult<f64>;
pub type FTable64 = FTable<f64>;
