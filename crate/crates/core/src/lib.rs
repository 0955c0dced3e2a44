pub mod coherence;
pub mod conditional;
pub mod distill;
pub mod divergence;
pub mod error;
pub mod ext_real;
pub mod io;
pub mod linalg;
pub mod mc;
pub mod optimize;
pub mod par;
pub mod probability;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use ext_real::ExtReal;
pub use linalg::{BipartiteState, CMatrix, DensityMatrix, HermitianMatrix, Subsystem, C64};
pub use probability::ProbabilityVector;
