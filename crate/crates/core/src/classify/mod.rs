//! Classification of achievement sets and sum ranges.

pub mod cardinality;
pub mod convergence;
pub mod gamma;
pub mod kakeya;
pub mod linalg;
pub mod steinitz;

pub use cardinality::{cardinality_class, CardinalityClass};
pub use convergence::{selection_convergence_class, SelectionConvergence};
pub use gamma::{gamma_compute, gamma_declared, gamma_heuristic, ConvergenceFunctionals, GammaMode, HeuristicParams};
pub use kakeya::{kakeya_classify, Comparison, KakeyaClass, KakeyaLabel};
pub use steinitz::{steinitz_decompose, steinitz_from, sum_range, SteinitzDecomposition, SumRange};
