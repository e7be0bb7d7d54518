pub mod error;
pub mod experiment;
pub mod gf2;
pub mod hypergraph;
pub mod oracle;
pub mod rng;
pub mod stripping;
mod sampling;
pub mod thresholds;
pub mod xorsat;

pub use error::{Error, Result};
pub use hypergraph::{DegreeSequence, Hypergraph};
pub use rng::RngSeed;
