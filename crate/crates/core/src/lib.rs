//! Error probabilities for homodyne-detected displaced-squeezed probes
//! discriminating two thermal-loss channels, with the squeezing optimized
//! at a fixed photon budget.

pub mod cli;
pub mod discrimination;
pub mod error;
pub mod gaussmath;
pub mod mc;
pub mod presets;
pub mod probe;
pub mod receiver;
pub mod scenario;
pub mod search;

pub use error::{Error, ErrorKind, Result};
