//! Proximal gradient solvers for fractional programs `min f(x)/g(x)` over a
//! convex set, with a Dinkelbach reference solver, Sharpe-ratio portfolio
//! optimization and a moving-window backtest engine.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod backtest;
pub mod dinkelbach;
pub mod error;
pub mod linalg;
pub mod pga;
pub mod problem;
pub mod projection;
pub mod sharpe;

pub use dinkelbach::{dinkelbach_solve, DinkelbachConfig, DinkelbachResult};
pub use error::{Error, ErrorClass, Result};
pub use linalg::{DenseMatrix, DenseVector};
pub use pga::{pga_solve, pga_solve_shifted, PgaConfig, SolveResult, SolveStatus, SolveTrace};
pub use problem::{FnProblem, FractionalProblem, GradLipschitz};
pub use projection::{Band, Projection, Simplex};
pub use sharpe::{srm_pga, PortfolioWeights, ReturnsMatrix, SharpeModel, SrmOptions, SrmOutcome};
