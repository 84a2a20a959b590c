//! Solitary waves of the steady Whitham equation from an Orlicz-constrained
//! maximization problem, computed pseudospectrally on a periodic grid.

pub mod error;
pub mod exec;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod maximize;
pub mod orlicz;
pub mod rearrange;
pub mod samples;
pub mod special;
pub mod sweep;
pub mod verify;
pub mod whitham;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid, GridFunction};
pub use maximize::{solve_max, MaximizerResult, Scheme, SolverConfig};
pub use orlicz::OrliczParams;
