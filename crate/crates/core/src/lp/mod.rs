//! Exact rational linear programming.

mod dual;
mod model;
mod simplex;

pub use dual::{canonical_form, check_complementary_slackness, dualize, standardize, CanonicalForm};
pub use model::{Constraint, LowerBound, LpModel, LpSolution, LpStatus, Objective, Relation, Sense, Variable};
pub use simplex::solve;

pub(crate) use model::dot;
