use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::InvariantError;
use crate::linalg::{wrap_angle, CMatrix};
use crate::model::{BandSelection, BlochModel};

pub const TAU_LINK: f64 = 1e-6;

/// Lattice Berry data on a uniform grid `k = 2π·(i/n₁, j/n₂)` of a plane.
///
/// Links point from site `(i, j)` to its neighbour along each axis; plaquettes
/// are traversed counterclockwise from their lower-left corner, and each
/// plaquette's curvature is the Berry phase `γ = -arg ∏ U` around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerryData {
    pub grid: Vec<usize>,
    /// Momentum axes spanned by the grid.
    pub axes: Vec<usize>,
    /// Coordinates of the remaining axes.
    pub fixed: Vec<f64>,
    /// `links[a][i·n₂ + j]` for axis `a` of the grid.
    pub links: Vec<Vec<Complex64>>,
    /// Row-major plaquette curvatures in `(-π, π]`.
    pub curvature: Vec<f64>,
    pub chern: Option<i64>,
    /// Berry phase of the full cycle, one-dimensional grids only.
    pub berry_phase: Option<f64>,
}

impl BerryData {
    /// `(kx, ky, curvature)` rows, plaquettes labelled by their lower-left corner.
    pub fn curvature_rows(&self) -> Vec<(f64, f64, f64)> {
        if self.grid.len() != 2 {
            return Vec::new();
        }
        let (n1, n2) = (self.grid[0], self.grid[1]);
        (0..n1)
            .flat_map(|i| (0..n2).map(move |j| (i, j)))
            .map(|(i, j)| {
                let kx = 2.0 * PI * i as f64 / n1 as f64;
                let ky = 2.0 * PI * j as f64 / n2 as f64;
                (kx, ky, self.curvature[i * n2 + j])
            })
            .collect()
    }
}

fn link(a: &CMatrix, b: &CMatrix, k: &[f64]) -> Result<Complex64, InvariantError> {
    let d = (a.adjoint() * b).determinant();
    let magnitude = d.norm();
    if magnitude < TAU_LINK {
        return Err(InvariantError::SingularLink { k: k.to_vec(), magnitude });
    }
    Ok(d / magnitude)
}

/// Berry phase `-arg ∏ U` along a sequence of frames, closed back to the first.
pub fn berry_phase_along(frames: &[CMatrix], points: &[Vec<f64>]) -> Result<f64, InvariantError> {
    let n = frames.len();
    let mut prod = Complex64::new(1.0, 0.0);
    for j in 0..n {
        prod *= link(&frames[j], &frames[(j + 1) % n], &points[j])?;
    }
    Ok(-prod.arg())
}

/// Sweep of a 1D model (Berry phase) or a 2D model (curvature and Chern number).
pub fn berry_sweep(model: &BlochModel, selection: BandSelection, grid: &[usize]) -> Result<BerryData, InvariantError> {
    match (model.dim_k(), grid) {
        (1, [n]) => {
            let n = *n;
            if n < 2 {
                return Err(InvariantError::Unsupported("grid needs at least 2 points".into()));
            }
            let points: Vec<Vec<f64>> = (0..n).map(|i| vec![wrap_angle(2.0 * PI * i as f64 / n as f64)]).collect();
            let frames = points
                .par_iter()
                .map(|k| model.frame(k, selection))
                .collect::<Result<Vec<_>, _>>()?;
            let links = (0..n)
                .map(|j| link(&frames[j], &frames[(j + 1) % n], &points[j]))
                .collect::<Result<Vec<_>, _>>()?;
            let prod = links.iter().fold(Complex64::new(1.0, 0.0), |acc, u| acc * u);
            Ok(BerryData {
                grid: vec![n],
                axes: vec![0],
                fixed: vec![],
                links: vec![links],
                curvature: vec![],
                chern: None,
                berry_phase: Some(-prod.arg()),
            })
        }
        (2, [n1, n2]) => berry_sweep_plane(model, selection, (0, 1), &[], (*n1, *n2)),
        (d, g) => Err(InvariantError::Unsupported(format!(
            "berry sweep of a {d}-dimensional model on a {}-axis grid",
            g.len()
        ))),
    }
}

/// Curvature and Chern number on the plane spanned by `axes`, with the other
/// coordinates set to `fixed` in increasing axis order.
pub fn berry_sweep_plane(
    model: &BlochModel,
    selection: BandSelection,
    axes: (usize, usize),
    fixed: &[f64],
    (n1, n2): (usize, usize),
) -> Result<BerryData, InvariantError> {
    let d = model.dim_k();
    if axes.0 >= d || axes.1 >= d || axes.0 == axes.1 || fixed.len() + 2 != d {
        return Err(InvariantError::Unsupported(format!("plane {axes:?} in a {d}-dimensional model")));
    }
    if n1 < 2 || n2 < 2 {
        return Err(InvariantError::Unsupported("grid needs at least 2 points per axis".into()));
    }
    let point = |i: usize, j: usize| -> Vec<f64> {
        let mut rest = fixed.iter();
        (0..d)
            .map(|a| {
                if a == axes.0 {
                    wrap_angle(2.0 * PI * i as f64 / n1 as f64)
                } else if a == axes.1 {
                    wrap_angle(2.0 * PI * j as f64 / n2 as f64)
                } else {
                    *rest.next().expect("fixed coordinates")
                }
            })
            .collect()
    };
    let sites: Vec<(usize, usize)> = (0..n1).flat_map(|i| (0..n2).map(move |j| (i, j))).collect();
    let frames = sites
        .par_iter()
        .map(|&(i, j)| model.frame(&point(i, j), selection))
        .collect::<Result<Vec<_>, _>>()?;
    let at = |i: usize, j: usize| &frames[(i % n1) * n2 + (j % n2)];
    let links_1 = sites
        .par_iter()
        .map(|&(i, j)| link(at(i, j), at(i + 1, j), &point(i, j)))
        .collect::<Result<Vec<_>, _>>()?;
    let links_2 = sites
        .par_iter()
        .map(|&(i, j)| link(at(i, j), at(i, j + 1), &point(i, j)))
        .collect::<Result<Vec<_>, _>>()?;
    let u1 = |i: usize, j: usize| links_1[(i % n1) * n2 + (j % n2)];
    let u2 = |i: usize, j: usize| links_2[(i % n1) * n2 + (j % n2)];
    let curvature: Vec<f64> = sites
        .iter()
        .map(|&(i, j)| {
            let loop_product = u1(i, j) * u2(i + 1, j) * u1(i, j + 1).conj() * u2(i, j).conj();
            -loop_product.arg()
        })
        .collect();
    let total: f64 = curvature.iter().sum();
    let chern = total / (2.0 * PI);
    let rounded = chern.round();
    debug_assert!((chern - rounded).abs() < 1e-6, "lattice Chern number {chern} is not integral");
    Ok(BerryData {
        grid: vec![n1, n2],
        axes: vec![axes.0, axes.1],
        fixed: fixed.to_vec(),
        links: vec![links_1, links_2],
        curvature,
        chern: Some(rounded as i64),
        berry_phase: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Builtin;

    #[test]
    fn flat_model_is_trivial() {
        let flat = Builtin::Flat.build(2).unwrap();
        let data = berry_sweep(&flat, BandSelection::Occupied, &[8, 8]).unwrap();
        assert!(data.curvature.iter().all(|&f| f == 0.0));
        assert_eq!(data.chern, Some(0));
        let flat1 = Builtin::Flat.build(1).unwrap();
        let data = berry_sweep(&flat1, BandSelection::Occupied, &[16]).unwrap();
        assert_eq!(data.berry_phase, Some(0.0));
    }

    #[test]
    fn wrong_grid_rank() {
        let flat = Builtin::Flat.build(2).unwrap();
        assert!(matches!(
            berry_sweep(&flat, BandSelection::Occupied, &[8]),
            Err(InvariantError::Unsupported(_))
        ));
    }
}
