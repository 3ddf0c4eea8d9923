//! Generalized Information Ratio toolkit.
//!
//! Performance measures that scale fund alphas by residual risk under three
//! information structures:
//!
//! * `GIR = Σ^{-1/2} α` uses the full residual covariance matrix,
//! * `IR = D^{-1/2} α` uses only its diagonal,
//! * `α* = α / σ_e` uses the cross-sectional mean residual volatility.
//!
//! `Σ^{-1/2}` is the optimal quadratic-Wasserstein transport map from the
//! residual distribution `N(α, Σ)` to a unit-covariance target, which is why
//! the Gaussian transport machinery lives here too. The [`simulate`] module
//! runs rolling-window experiments comparing the three measures when the
//! factor benchmark omits a priced factor.

pub mod dataio;
pub mod error;
pub mod factorreg;
pub mod linkcheck;
pub mod matops;
pub mod measures;
pub mod report;
pub mod rng;
pub mod simulate;
pub mod transport;

pub use error::{Error, Result};
pub use factorreg::{FactorSet, ModelLabel, OrthogonalFactor, RegressionFit, ReturnPanel};
pub use matops::SpdMatrix;
pub use measures::{MeasureKind, MeasureVector};
pub use transport::{GaussianMoments, MappingMatrix};
