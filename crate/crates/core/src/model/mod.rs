//! Time-reversal-invariant Bloch Hamiltonians: tight-binding families,
//! the explicit-section phase-function bundles, eigenframes and validation.

mod builtin;
mod phase;
mod spec_file;

pub use builtin::{Builtin, BuiltinError};
pub use phase::{PhaseFunction, PhaseFunctionModel};
pub use spec_file::{load_model_spec, parse_model_spec, write_model_spec};

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{c, conj, max_abs_diff, CMatrix, CVector};
use crate::momentum::involution;
use crate::pfaffian::TAU_REL;

pub const GAP_MIN: f64 = 1e-6;
pub const TAU_PHASE: f64 = 1e-9;

/// Relative tie tolerance of the largest-component phase rule.
const PHASE_TIE: f64 = 1e-10;

pub fn tau_tr(max_norm: f64) -> f64 {
    1e-8 * (1.0 + max_norm)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("hopping at displacement {displacement:?} has no Hermitian partner T(-R) = T(R)^†")]
    HermiticityViolation { displacement: Vec<i64> },
    #[error("invalid time-reversal operator: {0}")]
    ThetaInvalid(String),
    #[error("number of occupied bands must be even and at most n_bands, got {n_occupied} of {n_bands}")]
    OddOccupation { n_occupied: usize, n_bands: usize },
    #[error("spectral gap {gap:.3e} below {min:.0e} at k = {k:?}")]
    GapClosed { k: Vec<f64>, gap: f64, min: f64 },
    #[error("phase function violates beta(pi) - beta(0) = k*pi (residual {residual:.3e})")]
    InvalidPhaseFunction { residual: f64 },
    #[error("k-point has dimension {got}, model has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("model has no half-band sector")]
    NoHalfSector,
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

/// Antiunitary `Θv = U · conj(v)` with `Θ² = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeReversalOp {
    unitary: CMatrix,
}

impl TimeReversalOp {
    pub fn new(unitary: CMatrix) -> Result<Self, ModelError> {
        let n = unitary.nrows();
        if n == 0 || unitary.ncols() != n {
            return Err(ModelError::ThetaInvalid("matrix must be square and non-empty".into()));
        }
        let id = CMatrix::identity(n, n);
        let unitarity = max_abs_diff(&(unitary.adjoint() * &unitary), &id);
        if unitarity > TAU_REL {
            return Err(ModelError::ThetaInvalid(format!("U is not unitary (defect {unitarity:.3e})")));
        }
        let square = &unitary * conj(&unitary);
        let defect = max_abs_diff(&square, &(-id));
        if defect > TAU_REL {
            return Err(ModelError::ThetaInvalid(format!("U conj(U) != -1 (defect {defect:.3e})")));
        }
        Ok(Self { unitary })
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn apply(&self, v: &CMatrix) -> CMatrix {
        &self.unitary * conj(v)
    }

    pub fn apply_vec(&self, v: &CVector) -> CVector {
        &self.unitary * v.map(|z| z.conj())
    }

    /// `Θ H Θ⁻¹ = U conj(H) U†`.
    pub fn conjugate(&self, h: &CMatrix) -> CMatrix {
        &self.unitary * conj(h) * self.unitary.adjoint()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hopping {
    pub displacement: Vec<i64>,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
enum ModelKind {
    TightBinding { hops: Vec<Hopping> },
    /// Rank-2 bundle given by explicit sections rather than a Hamiltonian.
    PhaseBundle(PhaseFunctionModel),
}

/// Which occupied subspace a frame spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandSelection {
    Occupied,
    /// Lower half of the occupied bands inside the model's declared sector
    /// (the spin-up block of the d-vector family).
    LowerHalf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenFrame {
    pub k: Vec<f64>,
    pub energies: Vec<f64>,
    /// `n_bands × n_occupied`, orthonormal columns.
    pub states: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochModel {
    name: String,
    dim_k: usize,
    n_bands: usize,
    n_occupied: usize,
    theta: TimeReversalOp,
    kind: ModelKind,
    half_sector: Option<Vec<usize>>,
    gauge: Option<PhaseFunction>,
}

impl BlochModel {
    /// Tight-binding model `H(k) = Σ_R T_R e^{i k·R}`.
    pub fn tight_binding(
        name: impl Into<String>,
        dim_k: usize,
        n_occupied: usize,
        theta: TimeReversalOp,
        mut hops: Vec<Hopping>,
    ) -> Result<Self, ModelError> {
        let n_bands = theta.dim();
        if n_occupied == 0 || n_occupied % 2 != 0 || n_occupied > n_bands {
            return Err(ModelError::OddOccupation { n_occupied, n_bands });
        }
        for h in &hops {
            if h.displacement.len() != dim_k {
                return Err(ModelError::DimensionMismatch { expected: dim_k, got: h.displacement.len() });
            }
            if h.matrix.shape() != (n_bands, n_bands) {
                return Err(ModelError::ParseError {
                    line: 0,
                    msg: format!("hopping {:?} is not {n_bands}x{n_bands}", h.displacement),
                });
            }
        }
        hops.sort_by(|a, b| a.displacement.cmp(&b.displacement));
        check_hermitian_partners(&hops)?;
        Ok(Self {
            name: name.into(),
            dim_k,
            n_bands,
            n_occupied,
            theta,
            kind: ModelKind::TightBinding { hops },
            half_sector: None,
            gauge: None,
        })
    }

    pub(crate) fn phase_bundle(beta: PhaseFunctionModel, theta: TimeReversalOp) -> Self {
        Self {
            name: format!("phase:{}", beta.describe()),
            dim_k: 1,
            n_bands: 2,
            n_occupied: 2,
            theta,
            kind: ModelKind::PhaseBundle(beta),
            half_sector: None,
            gauge: None,
        }
    }

    /// Declares the basis indices of a block on which `BandSelection::LowerHalf` acts.
    pub fn with_half_sector(mut self, sector: Vec<usize>) -> Self {
        self.half_sector = Some(sector);
        self
    }

    /// Multiplies the first occupied column of every frame by `e^{-iβ(k₀)}`.
    pub fn with_gauge(mut self, beta: PhaseFunction) -> Self {
        self.gauge = Some(beta);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    pub fn n_occupied(&self) -> usize {
        self.n_occupied
    }

    pub fn theta(&self) -> &TimeReversalOp {
        &self.theta
    }

    pub fn hoppings(&self) -> &[Hopping] {
        match &self.kind {
            ModelKind::TightBinding { hops } => hops,
            ModelKind::PhaseBundle(_) => &[],
        }
    }

    pub fn phase_function(&self) -> Option<&PhaseFunctionModel> {
        match &self.kind {
            ModelKind::PhaseBundle(b) => Some(b),
            ModelKind::TightBinding { .. } => None,
        }
    }

    /// True when frames come from explicit sections instead of diagonalization.
    pub fn has_explicit_sections(&self) -> bool {
        matches!(self.kind, ModelKind::PhaseBundle(_))
    }

    pub fn has_half_sector(&self) -> bool {
        self.half_sector.is_some()
    }

    fn check_k(&self, k: &[f64]) -> Result<(), ModelError> {
        if k.len() != self.dim_k {
            return Err(ModelError::DimensionMismatch { expected: self.dim_k, got: k.len() });
        }
        Ok(())
    }

    pub fn hamiltonian(&self, k: &[f64]) -> Result<CMatrix, ModelError> {
        self.check_k(k)?;
        Ok(match &self.kind {
            ModelKind::TightBinding { hops } => {
                let mut h = CMatrix::zeros(self.n_bands, self.n_bands);
                for hop in hops {
                    let phase: f64 = hop.displacement.iter().zip(k).map(|(&r, &x)| r as f64 * x).sum();
                    h += &hop.matrix * Complex64::from_polar(1.0, phase);
                }
                h
            }
            ModelKind::PhaseBundle(_) => -CMatrix::identity(2, 2),
        })
    }

    /// Occupied eigenframe with the deterministic phase rule; at τ-fixed
    /// momenta degenerate occupied levels are completed to Kramers pairs `(ψ, Θψ)`.
    pub fn occupied_frame(&self, k: &[f64]) -> Result<EigenFrame, ModelError> {
        self.check_k(k)?;
        let mut frame = match &self.kind {
            ModelKind::PhaseBundle(beta) => EigenFrame {
                k: k.to_vec(),
                energies: vec![-1.0, -1.0],
                states: beta.sections(k[0]),
            },
            ModelKind::TightBinding { .. } => {
                let h = self.hamiltonian(k)?;
                let (energies, vecs) = sorted_eigen(h);
                let n = self.n_occupied;
                if n < self.n_bands {
                    let gap = energies[n] - energies[n - 1];
                    if gap < GAP_MIN {
                        return Err(ModelError::GapClosed { k: k.to_vec(), gap, min: GAP_MIN });
                    }
                }
                let mut states = vecs.columns(0, n).into_owned();
                for j in 0..n {
                    let col = phase_fixed(&states.column(j).into_owned());
                    states.set_column(j, &col);
                }
                if involution(k) == k {
                    states = self.kramers_complete(&energies[..n], states);
                }
                EigenFrame { k: k.to_vec(), energies, states }
            }
        };
        self.apply_gauge(&mut frame.states, k);
        Ok(frame)
    }

    /// Frame of the requested band selection (`n_bands × rank`).
    pub fn frame(&self, k: &[f64], selection: BandSelection) -> Result<CMatrix, ModelError> {
        match selection {
            BandSelection::Occupied => Ok(self.occupied_frame(k)?.states),
            BandSelection::LowerHalf => {
                let sector = self.half_sector.as_ref().ok_or(ModelError::NoHalfSector)?;
                let h = self.hamiltonian(k)?;
                let m = sector.len();
                let block = CMatrix::from_fn(m, m, |i, j| h[(sector[i], sector[j])]);
                let (energies, vecs) = sorted_eigen(block);
                let n = self.n_occupied / 2;
                if n < m && energies[n] - energies[n - 1] < GAP_MIN {
                    let gap = energies[n] - energies[n - 1];
                    return Err(ModelError::GapClosed { k: k.to_vec(), gap, min: GAP_MIN });
                }
                let mut out = CMatrix::zeros(self.n_bands, n);
                for j in 0..n {
                    let col = phase_fixed(&vecs.column(j).into_owned());
                    for (i, &s) in sector.iter().enumerate() {
                        out[(s, j)] = col[i];
                    }
                }
                self.apply_gauge(&mut out, k);
                Ok(out)
            }
        }
    }

    fn apply_gauge(&self, states: &mut CMatrix, k: &[f64]) {
        if let Some(beta) = &self.gauge {
            let ph = Complex64::from_polar(1.0, -beta.eval(k[0]));
            for i in 0..states.nrows() {
                states[(i, 0)] *= ph;
            }
        }
    }

    fn kramers_complete(&self, energies: &[f64], states: CMatrix) -> CMatrix {
        let scale = energies.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        let tol = 1e-8 * (1.0 + scale);
        let mut out = states.clone();
        let mut start = 0;
        while start < energies.len() {
            let mut end = start + 1;
            while end < energies.len() && energies[end] - energies[end - 1] < tol {
                end += 1;
            }
            let size = end - start;
            if size % 2 == 0 {
                let block = states.columns(start, size).into_owned();
                let pairs = kramers_pairs(&self.theta, &block);
                out.columns_mut(start, size).copy_from(&pairs);
            }
            start = end;
        }
        out
    }
}

fn check_hermitian_partners(hops: &[Hopping]) -> Result<(), ModelError> {
    for h in hops {
        let neg: Vec<i64> = h.displacement.iter().map(|r| -r).collect();
        let partner = hops.iter().find(|o| o.displacement == neg);
        let ok = match partner {
            Some(p) => {
                let tol = 1e-10 * (1.0 + crate::linalg::max_abs(&h.matrix));
                max_abs_diff(&p.matrix, &h.matrix.adjoint()) <= tol
            }
            None => false,
        };
        if !ok {
            return Err(ModelError::HermiticityViolation { displacement: h.displacement.clone() });
        }
    }
    Ok(())
}

/// Eigenpairs of a Hermitian matrix, energies ascending (ties keep solver order).
pub(crate) fn sorted_eigen(h: CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (energies, vecs)
}

/// Rotates `v` so that its largest-magnitude entry (lowest index on ties) is real positive.
pub fn phase_fixed(v: &CVector) -> CVector {
    let mut best = 0;
    let mut best_abs = 0.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs * (1.0 + PHASE_TIE) + f64::MIN_POSITIVE {
            best = i;
            best_abs = a;
        }
    }
    if best_abs == 0.0 {
        return v.clone();
    }
    let ph = v[best].conj() / best_abs;
    v * ph
}

fn project_out(v: &CVector, basis: &[CVector]) -> CVector {
    let mut w = v.clone();
    for b in basis {
        let overlap = b.dotc(&w);
        w -= b * overlap;
    }
    w
}

/// Orthonormal basis `(ψ₁, Θψ₁, ψ₂, Θψ₂, …)` of the span of `block`.
fn kramers_pairs(theta: &TimeReversalOp, block: &CMatrix) -> CMatrix {
    let m = block.ncols();
    let mut basis: Vec<CVector> = Vec::with_capacity(m);
    for _ in 0..m / 2 {
        let mut best: Option<(f64, CVector)> = None;
        for j in 0..m {
            let v = project_out(&block.column(j).into_owned(), &basis);
            let norm = v.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > b * (1.0 + PHASE_TIE)) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("non-empty block");
        let psi = phase_fixed(&(v / c(norm, 0.0)));
        basis.push(psi.clone());
        let t = project_out(&theta.apply_vec(&psi), &basis);
        let tn = t.norm();
        basis.push(t / c(tn, 0.0));
    }
    let mut out = CMatrix::zeros(block.nrows(), m);
    for (j, b) in basis.iter().enumerate() {
        out.set_column(j, b);
    }
    out
}

/// Defects measured by [`validate_model`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub model: String,
    pub grid_density: usize,
    pub hermiticity_defect: f64,
    pub time_reversal_defect: f64,
    pub time_reversal_tolerance: f64,
    /// `None` when every band is occupied.
    pub min_gap: Option<f64>,
    pub min_gap_k: Option<Vec<f64>>,
    pub kramers_defect: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Uniform grid `2π·i/n` per axis, wrapped into `(-π, π]`.
pub fn uniform_grid(dim: usize, n: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..n)
        .map(|i| crate::linalg::wrap_angle(2.0 * std::f64::consts::PI * i as f64 / n as f64))
        .collect();
    let mut pts: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    pts
}

/// Checks Hermiticity, time-reversal invariance, the occupied gap and
/// Kramers degeneracy at fixed points over a uniform grid.
pub fn validate_model(model: &BlochModel, grid_density: usize) -> ValidationReport {
    use rayon::prelude::*;

    struct Sample {
        herm: f64,
        tr: f64,
        norm: f64,
        gap: Option<f64>,
        kramers: f64,
    }

    let grid = uniform_grid(model.dim_k(), grid_density.max(1));
    let samples: Vec<Sample> = grid
        .par_iter()
        .map(|k| {
            let h = model.hamiltonian(k).expect("grid matches model dimension");
            let herm = max_abs_diff(&h, &h.adjoint());
            let h_minus = model.hamiltonian(&involution(k)).expect("grid matches model dimension");
            let tr = max_abs_diff(&model.theta().conjugate(&h), &h_minus);
            let (energies, _) = sorted_eigen((&h + h.adjoint()) * c(0.5, 0.0));
            let norm = energies.iter().fold(0.0f64, |a, e| a.max(e.abs()));
            let n = model.n_occupied();
            let gap = (n < model.n_bands()).then(|| energies[n] - energies[n - 1]);
            let kramers = if involution(k) == *k {
                (0..n / 2).fold(0.0f64, |a, p| a.max(energies[2 * p + 1] - energies[2 * p]))
            } else {
                0.0
            };
            Sample { herm, tr, norm, gap, kramers }
        })
        .collect();

    let herm = samples.iter().fold(0.0f64, |a, s| a.max(s.herm));
    let tr = samples.iter().fold(0.0f64, |a, s| a.max(s.tr));
    let norm = samples.iter().fold(0.0f64, |a, s| a.max(s.norm));
    let kramers = samples.iter().fold(0.0f64, |a, s| a.max(s.kramers));
    let mut min_gap: Option<(f64, usize)> = None;
    for (i, s) in samples.iter().enumerate() {
        if let Some(g) = s.gap {
            if min_gap.is_none_or(|(m, _)| g < m) {
                min_gap = Some((g, i));
            }
        }
    }
    let tol_tr = tau_tr(norm);
    let tol_herm = TAU_REL * (1.0 + norm);
    let mut failures = Vec::new();
    if herm > tol_herm {
        failures.push(format!("hermiticity defect {herm:.3e} exceeds {tol_herm:.3e}"));
    }
    if tr > tol_tr {
        failures.push(format!("time-reversal defect {tr:.3e} exceeds {tol_tr:.3e}"));
    }
    if let Some((g, i)) = min_gap {
        if g < GAP_MIN {
            failures.push(format!("min gap {g:.3e} below {GAP_MIN:.0e} at k = {:?}", grid[i]));
        }
    }
    if kramers > TAU_REL * (1.0 + norm) && tr <= tol_tr {
        failures.push(format!("Kramers splitting {kramers:.3e} at a fixed point"));
    }
    ValidationReport {
        model: model.name().to_string(),
        grid_density,
        hermiticity_defect: herm,
        time_reversal_defect: tr,
        time_reversal_tolerance: tol_tr,
        min_gap: min_gap.map(|(g, _)| g),
        min_gap_k: min_gap.map(|(_, i)| grid[i].clone()),
        kramers_defect: kramers,
        passed: failures.is_empty(),
        failures,
    }
}
