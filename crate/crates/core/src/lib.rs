//! Single-binary unit commitment toolkit.
//!
//! The crate builds the commitment MILP over on/off status variables only,
//! strengthens it with the strong valid inequality families of the
//! single-generator polytope, separates the exponentially large families in
//! polynomial time, and solves desk-scale instances with a built-in
//! simplex and branch-and-cut. An exact rational oracle re-derives every
//! polyhedral claim by brute force at small horizons so the fast paths can
//! be checked end to end.

pub mod cuts;
pub mod formulation;
pub mod instances;
pub mod oracle;
pub mod separation;
pub mod simplex;
pub mod solver;
pub mod types;

pub use types::{
    evaluate_inequality, linearize_cost, validate_generator, CoreError, CostParams, CutParams,
    Direction, Family, FractionalPoint, GeneratorParams, LinearInequality, PiecewiseCost,
    ValidationReport,
};
