//! Generalized Bessel-Maitland and Mittag-Leffler functions, the Wright
//! generalized hypergeometric function, and a quadrature-based checker for
//! double-integral identities over the unit square.
//!
//! Module map:
//! - [`gammakit`]: log-gamma, Pochhammer symbols, `Δ(m; l)` arrays.
//! - [`series`]: the master series housing the whole Mittag-Leffler /
//!   Bessel-Maitland hierarchy and its named reductions.
//! - [`wright`]: `pΨq`, `pFq`, convergence classification and the two
//!   right-hand-side builders of the main integral formula.
//! - [`quad`]: Gauss-Jacobi rules and the Edward-kernel integrals.
//! - [`verify`]: identity checks, parameter sweeps and reports.

mod dd;
pub mod error;
pub mod gammakit;
pub mod quad;
pub mod series;
pub mod verify;
pub mod wright;

pub use error::{Error, Result};
pub use gammakit::{DeltaArray, SignedLog};
pub use quad::{JacobiRule, QuadResult};
pub use series::{MasterParams, SeriesStatus, SeriesValue};
pub use wright::{ConvergenceClass, ConvergenceKind, PfqSpec, WrightSpec};
