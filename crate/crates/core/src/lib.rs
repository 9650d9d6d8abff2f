//! Temporal hierarchical task network planning in plan space.
//!
//! Durative actions and abstract tasks are refined into instantaneous snap
//! actions by a partial-order causal-link search; a point-algebra network
//! keeps the orderings consistent and a shortest-path solver assigns
//! timestamps to flaw-free plans.
//!
//! All temporal code is generic over [`Scalar`]. The aliases at the crate root
//! fix the scalar to exact rationals, which is what the planner uses by
//! default.

pub mod bench;
pub mod hddl;
pub mod heuristics;
pub mod model;
pub mod plan;
pub mod refine;
pub mod scalar;
pub mod search;
pub mod tpn;
pub mod validate;

pub use scalar::Scalar;

/// Exact rational time values.
pub type Rational = num_rational::Ratio<i64>;

pub type Problem = model::GroundProblem<Rational>;
pub type Plan = plan::PartialPlan<Rational>;
pub type Network = tpn::PointNetwork<Rational>;
pub type Timetable = tpn::Schedule<Rational>;
