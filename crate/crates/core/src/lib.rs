//! Exact computation of λ-extended correlation functions of the 2D Ising
//! model.
//!
//! The library computes the diagonal correlations `C±(N,N;λ)` through a
//! Toda-type recurrence with elliptic-function initial conditions, verifies
//! them against the sigma form of Painlevé VI and against the n-fold
//! form-factor integrals, and evaluates the closed form of the λ-extended
//! nearest-neighbor row correlation `C±(0,1;λ)`.
//!
//! Two independent tracks exist for nearly everything:
//!
//! - an exact track on truncated power series with rational coefficients
//!   ([`series`], [`elliptic`], [`diffalg`], [`diagonal`], [`formfactor`],
//!   [`offdiag`]);
//! - a numeric `f64` track ([`elliptic::numeric`], quadrature in
//!   [`formfactor`]) used for spot checks at concrete `s`.
//!
//! Conventions: `s` is the low/high-temperature variable, `k = s^2` the
//! elliptic modulus, `t = k^2 = s^4` the parameter. All series live on the
//! integer `s`-lattice; `λ = sin x`.

pub mod coeff;
pub mod series;

pub mod elliptic;

pub mod diffalg;

pub mod diagonal;

pub mod formfactor;

pub mod kepoly;
pub mod offdiag;

pub mod checks;

pub use coeff::{Coeff, Rational};

/// Install the global worker pool used by the data-parallel numeric helpers.
/// Results do not depend on the thread count (fixed-order reductions).
pub fn install_thread_pool(threads: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()
}

/// Exact univariate series in `s` with rational coefficients.
pub type QSeries = series::GradedSeries<Rational>;
/// Exact bivariate series in `(x, s)` with rational coefficients.
pub type QBiSeries = series::BiSeries<Rational>;
/// `f64` univariate series, for quick numeric experiments.
pub type FSeries = series::GradedSeries<f64>;
/// `f64` bivariate series.
pub type FBiSeries = series::BiSeries<f64>;
/// Numeric elliptic context at `f64` precision.
pub type NumericCtx = elliptic::numeric::NumericEllipticContext<f64>;
