use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{berry_phase_along, InvariantError};
use crate::linalg::wrap_angle;
use crate::model::{BandSelection, BlochModel, PhaseFunction, TAU_PHASE};

pub const TAU_GAUGE: f64 = 1e-7;

/// A closed momentum cycle: `points[j]` at unwrapped parameter `params[j]`.
/// The last point returns to the first one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPath {
    pub points: Vec<Vec<f64>>,
    pub params: Vec<f64>,
}

impl KPath {
    /// The cycle `base + t·e_axis`, `t = 2πj/steps`, `j = 0..=steps`.
    pub fn axis_cycle(base: &[f64], axis: usize, steps: usize) -> Self {
        let params: Vec<f64> = (0..=steps).map(|j| 2.0 * PI * j as f64 / steps as f64).collect();
        let points = params
            .iter()
            .map(|&t| {
                let mut k = base.to_vec();
                k[axis] = wrap_angle(base[axis] + t);
                k
            })
            .collect();
        Self { points, params }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeReport {
    pub original_phase: f64,
    pub gauged_phase: f64,
    /// `|gauged - original|` reduced mod 2π into `[0, π]`.
    pub difference: f64,
    /// `β(end) - β(start)`.
    pub integrated_shift: f64,
    pub passed: bool,
}

/// Recomputes the Berry phase of `cycle` after multiplying the first frame
/// column by `e^{-iβ(t)}`.
///
/// Fails with `ConstraintViolated` when `β(end) - β(start)` is not a multiple
/// of 2π; the error carries that shift (mod 2π) and the measured phase change.
pub fn gauge_check(
    model: &BlochModel,
    beta: &PhaseFunction,
    cycle: &KPath,
    selection: BandSelection,
) -> Result<GaugeReport, InvariantError> {
    let m = cycle.points.len();
    if m < 3 || cycle.params.len() != m {
        return Err(InvariantError::Unsupported("gauge cycle needs at least 3 points with parameters".into()));
    }
    let open = &cycle.points[..m - 1];
    let frames = open
        .par_iter()
        .map(|k| model.frame(k, selection))
        .collect::<Result<Vec<_>, _>>()?;
    let original = berry_phase_along(&frames, open)?;

    // closing frame: first frame with the end-point gauge
    let mut gauged = Vec::with_capacity(m);
    for (j, f) in frames.iter().chain(std::iter::once(&frames[0])).enumerate() {
        let mut g = f.clone();
        let ph = Complex64::from_polar(1.0, -beta.eval(cycle.params[j]));
        for i in 0..g.nrows() {
            g[(i, 0)] *= ph;
        }
        gauged.push(g);
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for j in 0..m - 1 {
        let d = (gauged[j].adjoint() * &gauged[j + 1]).determinant();
        prod *= d / d.norm();
    }
    let gauged_phase = -prod.arg();
    let shift = beta.eval(cycle.params[m - 1]) - beta.eval(cycle.params[0]);
    let change = wrap_angle(gauged_phase - original);
    let windings = shift / (2.0 * PI);
    if (windings - windings.round()).abs() * 2.0 * PI > TAU_PHASE {
        return Err(InvariantError::ConstraintViolated {
            shift: shift.rem_euclid(2.0 * PI),
            measured: change.rem_euclid(2.0 * PI),
        });
    }
    Ok(GaugeReport {
        original_phase: original,
        gauged_phase,
        difference: change.abs(),
        integrated_shift: shift,
        passed: change.abs() < TAU_GAUGE,
    })
}
