//! Sewing matrices, the Kane–Mele invariant, Stiefel–Whitney classes of the
//! Pfaffian bundle and lattice Berry numerics.

mod berry;
mod bundle;
mod gauge;
mod kane_mele;
mod report;
mod sewing;

pub use berry::{berry_phase_along, berry_sweep, berry_sweep_plane, BerryData, TAU_LINK};
pub use bundle::{half_winding, pair_w1, sw_classes, PfaffianBundle, SWClass, Sign};
pub use gauge::{gauge_check, GaugeReport, KPath, TAU_GAUGE};
pub use kane_mele::{kane_mele, KaneMeleResult, LineRecord, TrimData, CHERN_GRID, MIN_OVERLAP, TAU_PF};
pub use report::{default_pairing, CircleEntry, Diagnostics, InvariantReport, TqftEntry, TrimEntry, WeakEntry};
pub use sewing::{sewing_from_frames, sewing_matrix};

use thiserror::Error;

use crate::model::ModelError;
use crate::momentum::SpaceError;
use crate::pfaffian::PfaffianError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Pfaffian(#[from] PfaffianError),
    #[error("ambiguous sqrt(det) branch ({context}); raise --path-samples")]
    BranchAmbiguous { context: String },
    #[error("Pfaffian at {trim} has magnitude {magnitude:.3e}")]
    ZeroPfaffian { trim: String, magnitude: f64 },
    #[error("link overlap {magnitude:.3e} below threshold at k = {k:?}; refine the grid")]
    SingularLink { k: Vec<f64>, magnitude: f64 },
    #[error("model is {model}-dimensional but the space is {space}")]
    DimensionMismatch { model: usize, space: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("(beta(pi) - beta(0))/pi is not an integer (residual {residual:.3e})")]
    NotHalfIntegral { residual: f64 },
    #[error("gauge violates beta(end) - beta(start) = 2k*pi: shift {shift:.6} (measured phase change {measured:.6})")]
    ConstraintViolated { shift: f64, measured: f64 },
    #[error("pairing does not match the bundle: {0}")]
    PairingMismatch(String),
}

impl InvariantError {
    /// Whether a finer path or grid could resolve the failure.
    pub fn is_branch_ambiguous(&self) -> bool {
        matches!(
            self,
            Self::BranchAmbiguous { .. } | Self::Pfaffian(PfaffianError::BranchAmbiguous { .. })
        )
    }
}
