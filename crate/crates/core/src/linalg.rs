//! Small dense complex linear-algebra helpers shared by the band-structure code.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Entrywise complex conjugate.
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entry magnitude of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Pauli matrices σ0, σx, σy, σz.
pub fn pauli(which: usize) -> CMatrix {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match which {
        0 => CMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        1 => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        2 => CMatrix::from_row_slice(2, 2, &[z, -I, I, z]),
        3 => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        _ => panic!("pauli index out of range: {which}"),
    }
}

/// Unitary factor of the polar decomposition `m = Q P`.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u requested");
    let v_t = svd.v_t.expect("svd v_t requested");
    u * v_t
}

/// Eigen-decomposition of a (numerically) unitary matrix: `w = p · diag(λ) · p†`.
///
/// Uses the complex Schur form, which is diagonal for normal matrices.
pub fn unitary_eigen(w: &CMatrix) -> (Vec<Complex64>, CMatrix) {
    let (q, t) = Schur::new(w.clone()).unpack();
    let vals = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    (vals, q)
}

/// `p · diag(phases) · p†`.
pub fn from_eigen(p: &CMatrix, phases: &[Complex64]) -> CMatrix {
    let n = p.nrows();
    let mut scaled = p.clone();
    for (j, ph) in phases.iter().enumerate() {
        for i in 0..n {
            scaled[(i, j)] *= ph;
        }
    }
    scaled * p.adjoint()
}

/// Gram–Schmidt defect `max |U†U - 1|`.
pub fn orthonormality_defect(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
    let id = CMatrix::identity(g.nrows(), g.ncols());
    max_abs_diff(&g, &id)
}
