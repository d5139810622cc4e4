use crate::linalg::CMatrix;
use crate::model::{BlochModel, ModelError, TimeReversalOp};
use crate::momentum::involution;

/// `w_mn = ⟨u_m(-k) | Θ u_n(k)⟩` from the frames at `-k` and `k`.
pub fn sewing_from_frames(theta: &TimeReversalOp, frame_minus: &CMatrix, frame: &CMatrix) -> CMatrix {
    frame_minus.adjoint() * theta.apply(frame)
}

/// Sewing matrix of the occupied frames at `k`.
pub fn sewing_matrix(model: &BlochModel, k: &[f64]) -> Result<CMatrix, ModelError> {
    let u = model.occupied_frame(k)?.states;
    let u_minus = model.occupied_frame(&involution(k))?.states;
    Ok(sewing_from_frames(model.theta(), &u_minus, &u))
}
