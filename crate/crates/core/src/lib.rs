//! Toeplitz-operator functional calculus `g ↦ g(A)` for exponentially
//! stable matrix generators, with spectral and Hille–Phillips oracles,
//! admissibility constants and square-function norm certificates.

pub mod admissibility;
pub mod calculus;
pub mod error;
pub mod funcspec;
pub mod library;
pub mod linops;
pub mod signals;

pub use admissibility::{AdmissibilityMethod, AdmissibilityReport, ObservationMatrix};
pub use calculus::{AnalyticityConstants, CalculusResult, CertificateEngine, KernelFunction};
pub use error::{Error, Result};
pub use funcspec::{FuncExpr, FrequencyGrid, SupNormEstimate};
pub use library::Family;
pub use linops::{CMat, CVec, GeneratorMatrix, GramianMatrix};
pub use signals::{SpectrumSamples, TimeGrid, ToeplitzMultiplier, Trajectory};
