//! Independent numerical checks of the closed forms: an explicit monotone
//! finite-difference solver for the G-heat equation and a Monte Carlo
//! simulator of its volatility-control representation.

mod fd;
mod mc;

pub use fd::{fd_solve, FdGrid, GridSolution};
pub use mc::{mc_value, McEstimate, McPolicy};
