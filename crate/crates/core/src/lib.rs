pub mod error;
pub mod features;
pub mod ingest;
pub mod key;
pub mod linalg;
pub mod performance;
pub mod pipeline;
pub mod problems;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod selection;
pub mod synthetic;

pub use error::{Error, Result};
pub use key::ProblemKey;
