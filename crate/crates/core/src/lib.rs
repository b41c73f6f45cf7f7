//! Reconfiguration of constraint satisfaction problems over finite domains.

pub mod classify;
pub mod cli;
pub mod digraph;
pub mod domain;
pub mod error;
pub mod formula;
pub mod generators;
pub mod limits;
pub mod partial_ops;
pub mod pattern;
pub mod reconfigure;
pub mod relation;
pub mod relfile;

pub use digraph::Digraph;
pub use domain::{FiniteDomain, TotalOrder, Value};
pub use error::{Error, ErrorKind, Result};
pub use formula::{
    parse_formula, parse_instance, Constraint, ConstraintLanguage, Formula, RcspInstance,
};
pub use limits::Limits;
pub use pattern::{apply_pattern, Pattern, Term};
pub use relation::{connected_components, hamming_distance, product, Relation, Tuple};
