//! Numerical kernel: dense Hermitian eigensolver, torus grids with
//! extremum search, and unions of closed intervals.

mod eigh;
mod intervals;
mod torus;

pub use eigh::{eigh, eigvalsh, Eigen, HermitianMatrix};
pub use intervals::{union_measure, Interval, IntervalSet};
pub use torus::{
    extrema_from_samples, minimize_on_torus, wrap_angle, Refiner, TorusExtrema, TorusGrid,
};
