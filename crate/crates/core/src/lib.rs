//! Entanglement dynamics of a coherently pumped correlated-emission laser.
//!
//! The engine evaluates closed-form second moments of the two cavity modes
//! under dephasing (γ) and phase fluctuation (θ), turns them into the
//! two-mode covariance matrix, and reports three entanglement criteria: the
//! smallest symplectic eigenvalue of the partial transpose with its
//! logarithmic negativity, the EPR-variance sum, and the photon-number
//! correlation g. An independent RK4 integration of the moment equations
//! checks the closed forms.
//!
//! ```
//! use cascade_core::{report, SystemParams};
//!
//! let params = SystemParams::new(0.5, 1.0, 0.0, 0.0, 10.0);
//! let row = report(&params, 5.0).unwrap();
//! assert!(row.v_s < 1.0 && row.entangled_neg);
//! ```

// negated float comparisons are deliberate: NaN must fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod params;
#[cfg(test)]
mod properties;
pub mod scenario;

pub use criteria::{
    covariance, dgcz_sum, hz_correlation, log_negativity, report, report_from_moments,
    symplectic_smallest, CovarianceSummary, EntanglementReport, HzFlag,
};
pub use dynamics::{
    drift_matrix, moments_at, propagator, second_moments, steady_state_moments, PropagatorCoeffs,
    SecondMoments,
};
pub use error::{Error, Result};
pub use linalg::Mat2;
pub use oracle::{
    compare, integrate_moments, moment_rhs, ComparisonReport, GridPoint, MomentState,
};
pub use params::{
    derive_dimensionless, noise_strengths, spectral_data, validate_params, DerivedParams,
    DiffusionData, Model, Regime, SpectralData, SystemParams,
};
pub use scenario::{emit_csv, preset, run, OutputColumn, ResultTable, ScenarioConfig};
