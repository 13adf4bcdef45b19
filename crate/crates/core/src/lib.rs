//! Path-based DEA models over variable-returns-to-scale technologies.
//!
//! A model measures a unit along a path `φ_o(θ)` through it and reports the
//! smallest θ keeping the path inside the technology set, the projection
//! `φ_o(θ*)`, and whether that projection is strongly (Pareto–Koopmans)
//! efficient. The [`audit`] module checks the indication, strong-projection
//! and strict-monotonicity properties of a model on a dataset, and
//! [`geometry`] detects ideal technologies, on which GS range directions
//! project every unit onto the strongly efficient frontier.

pub mod audit;
pub mod data;
pub mod direction;
pub mod error;
pub mod geometry;
pub mod linprog;
pub mod path;
pub mod report;
pub mod solver;

pub use data::{load_dataset, DataFormat, Dataset, Point};
pub use direction::{make_direction, Direction, DirectionScheme};
pub use error::{DeaError, Result};
pub use geometry::{TechnologySet, UnitClass};
pub use path::{ModelKind, PathFn, PathSpec};
pub use solver::{solve_gs, solve_gs_direct_lp, EvaluationResult, GsProblem, Model, SolverOptions};
