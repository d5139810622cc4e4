use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BlochModel, ModelError, TimeReversalOp, TAU_PHASE};
use crate::linalg::{c, wrap_angle, CMatrix};

/// A real phase function `β` on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PhaseFunction {
    /// `β(x) = Σ cᵢ xⁱ`.
    Polynomial(Vec<f64>),
    /// Piecewise-linear interpolation through `(x, β(x))`, abscissae ascending;
    /// extrapolated linearly outside the table.
    Tabulated(Vec<(f64, f64)>),
}

impl PhaseFunction {
    pub fn zero() -> Self {
        Self::Polynomial(vec![])
    }

    /// `β(x) = slope · x`.
    pub fn linear(slope: f64) -> Self {
        Self::Polynomial(vec![0.0, slope])
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Polynomial(coeffs) => coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a),
            Self::Tabulated(table) => match table.len() {
                0 => 0.0,
                1 => table[0].1,
                n => {
                    let seg = table.windows(2).position(|w| x <= w[1].0).unwrap_or(n - 2);
                    let (x0, y0) = table[seg];
                    let (x1, y1) = table[seg + 1];
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            },
        }
    }

    /// `β(π) - β(0)`.
    pub fn half_increment(&self) -> f64 {
        self.eval(PI) - self.eval(0.0)
    }
}

/// A phase function satisfying `β(π) - β(0) = kπ`, `k ∈ ℤ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseFunctionModel {
    beta: PhaseFunction,
    winding: i64,
}

impl PhaseFunctionModel {
    pub fn new(beta: PhaseFunction) -> Result<Self, ModelError> {
        let n = beta.half_increment() / PI;
        let winding = n.round();
        let residual = ((n - winding) * PI).abs();
        if !residual.is_finite() || residual > TAU_PHASE {
            return Err(ModelError::InvalidPhaseFunction { residual });
        }
        Ok(Self { beta, winding: winding as i64 })
    }

    /// `β(x) = kx`.
    pub fn linear(k: i64) -> Self {
        Self { beta: PhaseFunction::linear(k as f64), winding: k }
    }

    pub fn beta(&self) -> &PhaseFunction {
        &self.beta
    }

    /// `(β(π) - β(0))/π`.
    pub fn winding(&self) -> i64 {
        self.winding
    }

    pub(crate) fn describe(&self) -> String {
        match &self.beta {
            PhaseFunction::Polynomial(cf) if cf.len() <= 2 && cf.first().is_none_or(|&a| a == 0.0) => {
                format!("k={}", self.winding)
            }
            _ => format!("n={}", self.winding),
        }
    }

    /// Sections `φ(k) = e₁`, `χ(k) = -e^{-iβ(k)} e₂` with `k` wrapped into `(-π, π]`.
    pub(crate) fn sections(&self, k: f64) -> CMatrix {
        let b = self.beta.eval(wrap_angle(k));
        let chi = -Complex64::from_polar(1.0, -b);
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), chi])
    }
}

impl BlochModel {
    /// Two-band bundle whose sewing matrix has off-diagonal entries
    /// `w₁₂(k) = -e^{iβ(k)}`, `w₂₁(k) = e^{iβ(-k)}`; `Θ = iσ_y`.
    pub fn phase_function_model(beta: PhaseFunctionModel) -> BlochModel {
        let u = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let theta = TimeReversalOp::new(u).expect("iσ_y is a valid time reversal");
        BlochModel::phase_bundle(beta, theta)
    }
}
