use std::fmt;

use thiserror::Error;

use super::{BlochModel, Hopping, ModelError, PhaseFunctionModel, TimeReversalOp};
use crate::linalg::{c, kron, pauli, CMatrix, I};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuiltinError {
    #[error("unknown builtin '{0}' (expected phase:k=<int>, dvec:m=<float> or flat)")]
    Unknown(String),
    #[error("bad parameter in '{0}': {1}")]
    BadParameter(String, String),
    #[error("builtin {name} is {native}-dimensional, requested dimension {requested}")]
    Dimension { name: String, native: usize, requested: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Registry of analytic models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// Phase-function bundle with `β(x) = kx`.
    Phase { k: i64 },
    /// Four-band doubled d-vector model
    /// `sin kx σx⊗s0 + sin ky σy⊗sz + (m + cos kx + cos ky) σz⊗s0`.
    DVec { m: f64 },
    /// Constant `diag(-1,-1,1,1)` with `Θ = I₂⊗iσ_y`, any dimension.
    Flat,
}

impl Builtin {
    pub fn parse(spec: &str) -> Result<Self, BuiltinError> {
        let spec = spec.trim();
        let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
        let param = |key: &str| -> Result<&str, BuiltinError> {
            let (k, v) = params
                .split_once('=')
                .ok_or_else(|| BuiltinError::BadParameter(spec.into(), format!("expected {key}=<value>")))?;
            if k.trim() != key {
                return Err(BuiltinError::BadParameter(spec.into(), format!("expected parameter {key}")));
            }
            Ok(v.trim())
        };
        match name {
            "phase" => {
                let v = param("k")?;
                let k = v.parse().map_err(|_| BuiltinError::BadParameter(spec.into(), format!("k must be an integer, got '{v}'")))?;
                Ok(Self::Phase { k })
            }
            "dvec" => {
                let v = param("m")?;
                let m: f64 = v.parse().map_err(|_| BuiltinError::BadParameter(spec.into(), format!("m must be a number, got '{v}'")))?;
                if !m.is_finite() {
                    return Err(BuiltinError::BadParameter(spec.into(), "m must be finite".into()));
                }
                Ok(Self::DVec { m })
            }
            "flat" if params.is_empty() => Ok(Self::Flat),
            "flat" => Err(BuiltinError::BadParameter(spec.into(), "flat takes no parameters".into())),
            _ => Err(BuiltinError::Unknown(spec.into())),
        }
    }

    /// Momentum dimension the builtin is defined in; `None` for any.
    pub fn native_dim(&self) -> Option<usize> {
        match self {
            Self::Phase { .. } => Some(1),
            Self::DVec { .. } => Some(2),
            Self::Flat => None,
        }
    }

    pub fn build(&self, dim: usize) -> Result<BlochModel, BuiltinError> {
        if let Some(native) = self.native_dim() {
            if native != dim {
                return Err(BuiltinError::Dimension { name: self.to_string(), native, requested: dim });
            }
        }
        Ok(match *self {
            Self::Phase { k } => BlochModel::phase_function_model(PhaseFunctionModel::linear(k)),
            Self::DVec { m } => dvec_model(m)?,
            Self::Flat => flat_model(dim)?,
        })
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Phase { k } => write!(f, "phase:k={k}"),
            Self::DVec { m } => write!(f, "dvec:m={m}"),
            Self::Flat => write!(f, "flat"),
        }
    }
}

fn dvec_model(m: f64) -> Result<BlochModel, ModelError> {
    let s0 = pauli(0);
    let sx = kron(&pauli(1), &s0);
    let sy_sz = kron(&pauli(2), &pauli(3));
    let sz = kron(&pauli(3), &s0);
    let half = c(0.5, 0.0);
    let tx = &sx * (-I * half) + &sz * half;
    let ty = &sy_sz * (-I * half) + &sz * half;
    let hops = vec![
        Hopping { displacement: vec![0, 0], matrix: &sz * c(m, 0.0) },
        Hopping { displacement: vec![1, 0], matrix: tx.clone() },
        Hopping { displacement: vec![-1, 0], matrix: tx.adjoint() },
        Hopping { displacement: vec![0, 1], matrix: ty.clone() },
        Hopping { displacement: vec![0, -1], matrix: ty.adjoint() },
    ];
    let theta = TimeReversalOp::new(kron(&pauli(3), &(pauli(2) * I)))?;
    Ok(BlochModel::tight_binding(format!("dvec:m={m}"), 2, 2, theta, hops)?.with_half_sector(vec![0, 2]))
}

fn flat_model(dim: usize) -> Result<BlochModel, ModelError> {
    let t0 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]));
    let theta = TimeReversalOp::new(kron(&pauli(0), &(pauli(2) * I)))?;
    let hops = vec![Hopping { displacement: vec![0; dim], matrix: t0 }];
    BlochModel::tight_binding("flat", dim, 2, theta, hops)
}
