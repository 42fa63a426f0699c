//! Finite achievement sets, box covers of infinite ones, membership search
//! and extreme points.

mod keys;

pub mod cover;
pub mod enumerate;
pub mod hull;
pub mod membership;

use serde::{Deserialize, Serialize};

pub use cover::{box_cover, BoxCover, CoverBox, Window};
pub use enumerate::{enumerate_exact, SubsumValue};
pub use hull::{extreme_points, ExtremePointReport};
pub use membership::{membership_search, SearchBudget, SearchOutcome};

/// Size limits shared by the enumerating operations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Largest depth `N` accepted by enumeration, covers and hulls.
    pub max_depth: u64,
    /// Number of leading indices whose selections are split across threads.
    pub prefix_depth: u32,
    /// Float-mode sums are merged on the grid `2^-dedup_bits`.
    pub dedup_bits: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_depth: 24,
            prefix_depth: 8,
            dedup_bits: 40,
        }
    }
}

impl Limits {
    pub(crate) fn check(&self, n: u64) -> crate::error::Result<()> {
        if n > self.max_depth {
            return Err(crate::error::Error::LimitExceeded {
                requested: n,
                limit: self.max_depth,
            });
        }
        Ok(())
    }
}
