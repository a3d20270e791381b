//! Exact statistics of cycle-factors of regular digraphs.
//!
//! The crate builds the graph families of interest, enumerates their
//! cycle-factors with exact counts and cycle statistics, evaluates the
//! matching closed forms, and searches for graphs whose expected number of
//! cycles beats the clique benchmark `(n/d) H_d`.
//!
//! Closed forms are generic over [`Field`]; [`Rational`] is the exact
//! instantiation used everywhere results are certified.

pub mod constructions;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod graph;
pub mod scalar;
pub mod search;
pub mod verify;

pub use enumerate::{
    cycle_factor_stats, expected_cycles, two_factor_stats, ArcConstraints, EdgeConvention,
    EnumOptions, FactorStats,
};
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, DiGraph, Fingerprint, UGraph};
pub use scalar::{Field, Ring};
pub use search::{run_search, SearchConfig, SearchRecord};
pub use verify::{certify, Certificate, Verdict};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Closed forms for `X_d` in exact arithmetic.
pub type ExactClosedForm = exact::XdClosedForm<Rational>;

/// Closed forms for `X_d` in double precision.
pub type FloatClosedForm = exact::XdClosedForm<f64>;

/// One exact row of the crossing-pattern table.
pub type ExactTable1Row = exact::Table1Row<Rational>;
