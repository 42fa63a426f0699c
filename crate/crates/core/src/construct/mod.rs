//! Constructive witnesses.

pub mod abs;
pub mod density;
pub mod liouville;
pub mod openset;
pub mod pi03;
pub mod riemann;
pub mod section;

use serde::{Deserialize, Serialize};

use crate::scalar::sup_dist;
use crate::series::sum::sum_indices_f64;
use crate::series::{Selection, SeriesSpec};

pub use abs::{a_abs_enumerate, AAbsPoints};
pub use density::density_witness;
pub use liouville::{liouville_bound_check, LiouvilleFamily, LiouvilleReport};
pub use openset::{open_set_witness, OpenSetFamily, OpenSetVariant};
pub use pi03::{pi03_blocks, Pi03Blocks};
pub use riemann::{riemann_rearrange, RearrangementPlan};
pub use section::{section_witness, section_witness_for, SectionWitness};

/// A selection together with the point it was checked to reach.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub selection: Selection,
    pub target: Vec<f64>,
    pub achieved: Vec<f64>,
    /// `||achieved - target||_inf`
    pub error: f64,
}

impl Witness {
    /// Sums a finite selection afresh.
    pub(crate) fn finite(spec: &SeriesSpec, selection: Selection, target: &[f64]) -> Self {
        let idx: Vec<u64> = selection.finite_support().iter().copied().collect();
        let achieved = sum_indices_f64(spec, &idx);
        Witness {
            error: sup_dist(&achieved, target),
            selection,
            target: target.to_vec(),
            achieved,
        }
    }
}

/// Step cap shared by the witness constructions.
pub const DEFAULT_WITNESS_STEPS: u64 = 1 << 26;
