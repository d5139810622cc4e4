//! Pfaffians of complex skew-symmetric matrices and continuous tracking of the
//! square-root branch of a determinant along a path.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::CMatrix;

/// Relative tolerance used for `pf² = det` style identities.
pub const TAU_REL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PfaffianError {
    #[error("matrix dimension {0} is odd or zero; a Pfaffian needs an even positive dimension")]
    OddDimension(usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not skew-symmetric: defect {defect:e} exceeds tolerance {tolerance:e}")]
    NotSkewSymmetric { defect: f64, tolerance: f64 },
    #[error("determinant sample {index} vanishes")]
    ZeroDeterminant { index: usize },
    #[error("initial branch does not square to the first determinant (residual {residual:e})")]
    InvalidInitialBranch { residual: f64 },
    #[error("square-root branch is ambiguous between samples {index} and {}: |Δ arg det| = {jump:.4}", index + 1)]
    BranchAmbiguous { index: usize, jump: f64 },
    #[error("no determinant samples supplied")]
    EmptyPath,
}

/// Skew tolerance `1e-10 · (1 + max|entry|)`.
pub fn skew_tolerance(m: &CMatrix) -> f64 {
    1e-10 * (1.0 + crate::linalg::max_abs(m))
}

/// A validated even-dimensional complex skew-symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    entries: CMatrix,
}

impl SkewMatrix {
    pub fn new(entries: CMatrix) -> Result<Self, PfaffianError> {
        let (r, c) = entries.shape();
        if r != c {
            return Err(PfaffianError::NotSquare(r, c));
        }
        if r == 0 || r % 2 == 1 {
            return Err(PfaffianError::OddDimension(r));
        }
        let defect = skew_defect(&entries);
        let tolerance = skew_tolerance(&entries);
        if defect > tolerance {
            return Err(PfaffianError::NotSkewSymmetric { defect, tolerance });
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries.clone().determinant()
    }
}

/// `max |A + Aᵀ|`, diagonal included.
pub fn skew_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((m[(i, j)] + m[(j, i)]).norm());
        }
    }
    defect
}

/// Pfaffian by Householder tridiagonalisation under unitary congruence.
///
/// The sign convention is the combinatorial one: for the 2×2 block
/// `[[0, a], [-a, 0]]` the result is `a`.
pub fn pfaffian(m: &SkewMatrix) -> Complex64 {
    let n = m.dim();
    let mut a = m.entries.clone();
    // project onto the exactly skew part so rounding in the input cannot leak into the diagonal
    for i in 0..n {
        a[(i, i)] = Complex64::new(0.0, 0.0);
        for j in (i + 1)..n {
            let s = (a[(i, j)] - a[(j, i)]) * 0.5;
            a[(i, j)] = s;
            a[(j, i)] = -s;
        }
    }

    let mut pf = Complex64::new(1.0, 0.0);
    for i in 0..n.saturating_sub(2) {
        let (v, tau, alpha) = householder(&a, i);
        a[(i + 1, i)] = alpha;
        a[(i, i + 1)] = -alpha;
        for r in (i + 2)..n {
            a[(r, i)] = Complex64::new(0.0, 0.0);
            a[(i, r)] = Complex64::new(0.0, 0.0);
        }
        if tau != 0.0 {
            // trailing block update A ← A + v wᵀ − w vᵀ, w = τ A conj(v)
            let m_sub = n - i - 1;
            let mut w = vec![Complex64::new(0.0, 0.0); m_sub];
            for (r, wr) in w.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (cidx, vc) in v.iter().enumerate() {
                    acc += a[(i + 1 + r, i + 1 + cidx)] * vc.conj();
                }
                *wr = acc * tau;
            }
            for r in 0..m_sub {
                for cidx in 0..m_sub {
                    a[(i + 1 + r, i + 1 + cidx)] += v[r] * w[cidx] - w[r] * v[cidx];
                }
            }
            // a reflection has determinant 1 - τ = -1
            pf *= 1.0 - tau;
        }
        if i % 2 == 0 {
            pf *= -alpha;
        }
    }
    pf * a[(n - 2, n - 1)]
}

/// Householder vector eliminating column `i` of `a` below the subdiagonal.
fn householder(a: &CMatrix, i: usize) -> (Vec<Complex64>, f64, Complex64) {
    let n = a.nrows();
    let x: Vec<Complex64> = ((i + 1)..n).map(|r| a[(r, i)]).collect();
    let sigma: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
    if sigma == 0.0 {
        return (vec![Complex64::new(0.0, 0.0); x.len()], 0.0, x[0]);
    }
    let norm_x = (x[0].norm_sqr() + sigma).sqrt();
    let phase = if x[0].norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        x[0] / x[0].norm()
    };
    let mut v = x;
    v[0] += phase * norm_x;
    let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= vnorm;
    }
    (v, 2.0, -phase * norm_x)
}

/// One sample of a square-root branch trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub parameter: f64,
    pub det: Complex64,
    pub sqrt_det: Complex64,
}

/// Continuously continued `√det` along an ordered list of determinant samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchTrace {
    pub samples: Vec<BranchSample>,
    pub winding_ok: bool,
}

impl BranchTrace {
    pub fn last_sqrt(&self) -> Complex64 {
        self.samples.last().map(|s| s.sqrt_det).unwrap_or_default()
    }

    /// Largest `|Δ arg det|` between consecutive samples.
    pub fn max_arg_jump(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|p| (p[1].det / p[0].det).arg().abs())
            .fold(0.0, f64::max)
    }

    pub fn min_abs_det(&self) -> f64 {
        self.samples.iter().map(|s| s.det.norm()).fold(f64::INFINITY, f64::min)
    }
}

/// Jump in `arg det` at which continuation is refused.
pub const BRANCH_JUMP_LIMIT: f64 = PI;

/// Continues `initial_branch` (a square root of `dets[0]`) along `dets`.
///
/// At every step the root closer in argument to the previous sample is kept.
/// With `strict` set, a step whose determinant phase jumps by π or more is an
/// error instead of a flag on the trace.
pub fn track_sqrt_det(
    dets: &[Complex64],
    initial_branch: Complex64,
    strict: bool,
) -> Result<BranchTrace, PfaffianError> {
    let first = *dets.first().ok_or(PfaffianError::EmptyPath)?;
    for (index, d) in dets.iter().enumerate() {
        if d.norm() == 0.0 || !d.norm().is_finite() {
            return Err(PfaffianError::ZeroDeterminant { index });
        }
    }
    let residual = (initial_branch * initial_branch - first).norm() / first.norm();
    if residual > TAU_REL {
        return Err(PfaffianError::InvalidInitialBranch { residual });
    }

    let n = dets.len();
    let param = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
    let mut samples = Vec::with_capacity(n);
    samples.push(BranchSample { parameter: 0.0, det: first, sqrt_det: initial_branch });
    let mut winding_ok = true;
    let mut prev = initial_branch;
    for i in 1..n {
        let jump = (dets[i] / dets[i - 1]).arg().abs();
        if jump >= BRANCH_JUMP_LIMIT * (1.0 - 1e-12) {
            if strict {
                return Err(PfaffianError::BranchAmbiguous { index: i - 1, jump });
            }
            winding_ok = false;
        }
        let root = dets[i].sqrt();
        let next = if (root * prev.conj()).re >= 0.0 { root } else { -root };
        samples.push(BranchSample { parameter: param(i), det: dets[i], sqrt_det: next });
        prev = next;
    }
    Ok(BranchTrace { samples, winding_ok })
}
