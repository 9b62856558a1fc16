//! Producibility bounds for two-body permutationally invariant Bell
//! inequalities in the (n,2,2) scenario, and the entanglement-depth
//! witnesses built from them.
//!
//! The crate computes, for an inequality given by five coefficients:
//!
//! - the exact classical bound by deterministic-strategy enumeration
//!   ([`lhv`]),
//! - variational upper bounds on the k-producible bounds by see-saw
//!   optimization, in full dense mode ([`seesaw`]) and in the
//!   collective-spin symmetric mode that scales to large particle numbers
//!   ([`spin`]),
//! - certified lower bounds from a marginal-consistency + PPT semidefinite
//!   relaxation with an in-repo solver ([`sdp`]),
//! - many-body estimates from a Gaussian superposition-of-Dicke-states
//!   ansatz ([`asymptotic`]),
//! - witness curves and depth certification from collective first and
//!   second spin moments ([`witness`]).

pub mod asymptotic;
pub mod bell;
pub mod error;
pub mod exec;
pub mod ineq;
pub mod lhv;
pub mod seesaw;
pub mod spin;
pub mod linalg;
pub mod moments;
pub mod optim;
pub mod partition;
pub mod sdp;
pub mod settings;

pub use error::{PibiError, Result};
pub use ineq::{evaluate_expression, CorrelatorVector, PibiCoefficients};
pub use partition::Partition;
pub use settings::{MeasurementSettings, SettingsMode};
