//! Exact and Monte Carlo computation of the moments `E[tr((XUYUᵗ)ⁿ)]` and
//! `E[tr((XUYU*)ⁿ)]` of Gaussian matrices, through the combinatorics of
//! locally orientable partitioned hypermaps.

pub mod bijection;
pub mod closed_forms;
pub mod error;
pub mod exact;
pub mod group;
pub mod moments;
pub mod oracle;
pub mod pairing;
pub mod partition;
pub mod strata;
pub mod verify;
pub mod symfun;

pub use error::{Error, Result};
pub use exact::ExactRational;
pub use oracle::PartitionedHypermap;
pub use pairing::{Label, Pairing, SetPartition};
pub use partition::Partition;
pub use strata::ArrayTuple;
