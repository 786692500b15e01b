//! Douglas–Rachford splitting with adaptive stepsizes for `0 ∈ A(x) + B(x)`,
//! its ADMM counterpart on the dual, and spectral tools for the linear case.
//!
//! Every numerical item is generic over a [`Real`] scalar; the aliases at the
//! crate root fix the scalar to `f64`.
//!
//! ```
//! use drsplit::{solve_dr, Controller, Form, Matrix, StopRule};
//! use drsplit::operators::LinearOperator;
//!
//! let a = LinearOperator::new(Matrix::from_diag(&[2.0, 1.0]), "A");
//! let b = LinearOperator::new(Matrix::from_diag(&[1.0, 3.0]), "B");
//! let out = solve_dr(&a, &b, Controller::adaptive_single_valued(), StopRule::linear_residual(1000, 1e-10), Form::Nonstationary, &[1.0, -1.0])
//!     .unwrap();
//! assert!(out.solution.iter().all(|x| x.abs() < 1e-9));
//! ```

// `!(x > 0)` style guards are deliberate: they reject NaN along with the bound.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity, clippy::needless_range_loop)]

pub mod admm;
pub mod analysis;
pub mod diagnostics;
pub mod dr;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod problems;
pub mod rng;
pub mod scalar;
pub mod stepsize;

pub use admm::{solve_admm, AdmmMethod, AdmmOutcome, AdmmState, AdmmStop, SplitProblem};
pub use dr::{solve_dr, solve_dr_with, DrOutcome, Form, SolveStatus, SolveTrace, StopCriterion, StopRule};
pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use operators::{MonotoneOperator, OperatorSpec};
pub use problems::{ProblemInstance, Reference};
pub use rng::SeededRng;
pub use scalar::{Quotient, Real};
pub use stepsize::{ConservationSchedule, StepsizeController, StepsizeMode};

pub type Vector = Vec<f64>;
pub type Matrix = DenseMatrix<f64>;
pub type Controller = StepsizeController<f64>;
pub type Operator = OperatorSpec<f64>;
pub type Instance = ProblemInstance<f64>;
pub type Outcome = DrOutcome<f64>;
