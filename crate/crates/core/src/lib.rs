//! Finite fusion frames, Q-dual fusion frames, dual fusion frame systems and
//! optimal duals under erasures.

pub mod cli;
pub mod duality;
pub mod erasures;
pub mod error;
pub mod frames;
pub mod fusion;
pub mod io;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod systems;

pub use error::{Error, Result};
