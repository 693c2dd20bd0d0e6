//! Multivariate analysis through duality diagrams: every method is the
//! eigendecomposition of a triple `(X, Q, D)` of data, column metric and row weights.

pub mod cli;
pub mod compare;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod methods;
pub mod scree;

pub use error::{Error, Result};
pub use graph::Graph;
pub use linalg::{decompose, Decomposition, Metric, Triple};
pub use methods::{Method, MethodExtras, MethodResult};
pub use scree::ScreeTable;
