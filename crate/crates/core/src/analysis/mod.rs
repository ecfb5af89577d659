//! Condition-number instrumentation.
//!
//! - [`bounds`]: how far appending one unit vector can push `σ_min` and
//!   `cond` of a basis, the vector that attains the worst case, and the
//!   scalar recurrence describing repeated worst cases.
//! - [`projection`]: what projecting a new vector against a single basis
//!   column does to the conditioning of the extended basis.
//! - [`profile`]: Dolan–Moré performance profiles.
//! - [`histogram`]: log-scaled singular-value histograms.

pub mod bounds;
pub mod histogram;
pub mod profile;
pub mod projection;

pub use bounds::{
    adversarial_next_vector, attainable_lower_cond_sq, bound_report, cond_upper_bound, decay_bound,
    decay_recurrence, eta_bound, sigma_min_lower_bound, BoundReport,
};
pub use histogram::{histogram_of_values, singular_value_histogram, Histogram};
pub use profile::{performance_profile, ProfileData};
pub use projection::{cond_after_projection, loss_of_orthogonality, project_against, LossMetrics};
