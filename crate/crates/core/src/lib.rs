//! Exact combinatorics of finite metric spaces with rational distances in
//! `[0,1]`: Katětov extensions, grid discretization, distance-set
//! classification, finite Fraïssé-style builders, hedgehog graphs and
//! coloring experiments.

pub mod builder;
pub mod cli;
pub mod discretize;
pub mod distance_sets;
pub mod error;
pub mod hedgehog;
pub mod katetov;
pub mod metric;
pub mod ramsey;
pub mod rat;

pub use error::{Error, Result};
pub use katetov::{claim_map, enumerate_katetov, extend, is_katetov, ClaimOutcome, KatetovMap};
pub use metric::{find_embeddings, FiniteMetricSpace, Isometry, Violation};
pub use rat::Rat;
