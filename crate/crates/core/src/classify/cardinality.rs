use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{NonzeroCount, SeriesSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CardinalityClass {
    Finite,
    CountablyInfinite,
    ContainsPerfectSet,
}

/// Size of the achievement set read off the declared metadata.
pub fn cardinality_class(spec: &SeriesSpec) -> Result<CardinalityClass> {
    match spec.nonzero_count {
        None => Err(Error::InsufficientMetadata("nonzero_count is not declared")),
        Some(NonzeroCount::Finite(_)) => Ok(CardinalityClass::Finite),
        Some(NonzeroCount::Infinite) => {
            if spec.inf_nonzero_norm.as_ref().is_some_and(|d| d.signum() > 0) {
                Ok(CardinalityClass::CountablyInfinite)
            } else if spec.has_null_subsequence_of_nonzero_terms {
                Ok(CardinalityClass::ContainsPerfectSet)
            } else {
                Err(Error::InsufficientMetadata(
                    "need a positive inf_nonzero_norm or a null subsequence of nonzero terms",
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::catalog::catalog_get;

    fn class(name: &str) -> Result<CardinalityClass> {
        cardinality_class(&catalog_get(name).unwrap().spec)
    }

    #[test]
    fn catalog_classes() {
        assert_eq!(class("finite-123").unwrap(), CardinalityClass::Finite);
        assert_eq!(class("constant-one").unwrap(), CardinalityClass::CountablyInfinite);
        assert_eq!(class("geometric-half").unwrap(), CardinalityClass::ContainsPerfectSet);
        assert_eq!(class("example-3.8").unwrap(), CardinalityClass::ContainsPerfectSet);
    }

    #[test]
    fn missing_metadata() {
        let mut s = catalog_get("geometric-half").unwrap().spec;
        s.nonzero_count = None;
        assert!(matches!(cardinality_class(&s), Err(Error::InsufficientMetadata(_))));
        s.nonzero_count = Some(NonzeroCount::Infinite);
        s.has_null_subsequence_of_nonzero_terms = false;
        assert!(matches!(cardinality_class(&s), Err(Error::InsufficientMetadata(_))));
    }
}
