//! Achievement sets `A(x_n) = {Σ ε_n x_n : ε_n ∈ {0,1}}` and sum ranges of
//! convergent series in `R^m`: exact enumeration, box covers, topological
//! classification, Steinitz decompositions and constructive witnesses.

pub mod classify;
pub mod construct;
pub mod enclosure;
pub mod engine;
pub mod error;
pub mod gap;
pub mod io;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use scalar::{Point, Scalar};
pub use series::catalog::{catalog_get, CatalogEntry};
pub use series::{Selection, SeriesSpec};
