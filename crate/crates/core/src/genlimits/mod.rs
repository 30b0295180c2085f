//! Sequence and step-function transforms, Cesàro means and generalized-limit
//! surrogates.

pub mod cesaro;
pub mod lemmas;
pub mod limit;
pub mod sequence;
pub mod step;

pub use cesaro::{cesaro, cesaro_means_at};
pub use limit::{from_samples, limit_estimate, Acceleration, Estimate, Ladder, LimitEstimate, LimitPlan, Method};
pub use sequence::BoundedSequence;
pub use step::{average_e, cal_l_sequence, exp_substitute, floor_lift, StepFunction};
