//! Kane–Mele invariant `ν = ∏ pf w(x) / √det w(x)` with a globally continued
//! square-root branch.
//!
//! Frames at the fixed points are the canonical Kramers frames of the model.
//! Every τ-invariant line `{k_a ∈ S¹, other k ∈ {0, π}}` carries a smooth
//! periodic gauge built from parallel transport, whose total Berry phase is
//! lifted continuously across parallel lines. Tracking `√det w` along the half
//! line from `k_a = 0` to `k_a = π` relates the branches at the two fixed
//! points of the line; these relations are chained from the anchor (the
//! lexicographically first fixed point) over a spanning tree, and the
//! remaining lines are checked for consistency.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{berry_sweep_plane, sewing_from_frames, InvariantError, PfaffianBundle, Sign};
use crate::linalg::{from_eigen, polar_unitary, unitary_eigen, wrap_angle, CMatrix};
use crate::model::{BandSelection, BlochModel};
use crate::momentum::{effective_zone_path, fixed_points, involution, FixedPoint, MomentumSpace, SpaceError};
use crate::pfaffian::{pfaffian, track_sqrt_det, SkewMatrix};

pub const TAU_PF: f64 = 1e-10;
/// Grid per axis of the occupied Chern number reported alongside ν.
pub const CHERN_GRID: usize = 24;

/// Largest accepted change of a line's Berry phase between neighbouring
/// transverse samples.
const LIFT_JUMP_LIMIT: f64 = PI / 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TrimData {
    pub point: FixedPoint,
    pub sewing: CMatrix,
    pub pfaffian: Complex64,
    pub sqrt_det: Complex64,
    pub sign: Sign,
}

/// Branch bookkeeping for one τ-invariant line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineRecord {
    pub axis: usize,
    /// Fixed-point index at `k_axis = 0`.
    pub base: usize,
    /// Fixed-point index at `k_axis = π`.
    pub end: usize,
    /// Lifted total Berry phase of the line gauge.
    pub berry_phase: f64,
    pub max_arg_jump: f64,
    pub min_abs_det: f64,
    /// Whether the line belongs to the spanning tree used to propagate branches.
    pub in_tree: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KaneMeleResult {
    pub space: MomentumSpace,
    pub bundle: PfaffianBundle,
    pub trims: Vec<TrimData>,
    pub nu: Sign,
    /// `(axis, ν of the plane k_axis = π)` on the 3-torus.
    pub weak: Vec<(usize, Sign)>,
    /// Occupied Chern number on the `(k₀, k₁)` plane.
    pub chern_total: Option<i64>,
    pub lines: Vec<LineRecord>,
    pub path_samples: usize,
    /// More than two occupied bands.
    pub extended: bool,
    pub explicit_sections: bool,
    pub notes: Vec<String>,
}

impl KaneMeleResult {
    pub fn strong(&self) -> u8 {
        self.nu.bit()
    }
}

fn ambiguous(context: String) -> InvariantError {
    InvariantError::BranchAmbiguous { context }
}

/// Computes ν and the per-fixed-point signs on a torus.
pub fn kane_mele(model: &BlochModel, space: MomentumSpace, path_samples: usize) -> Result<KaneMeleResult, InvariantError> {
    let d = match space {
        MomentumSpace::Torus(d) => d,
        MomentumSpace::Sphere(_) => {
            return Err(SpaceError::UnsupportedSpace(space, "the invariant is computed on tori").into())
        }
    };
    if model.dim_k() != d {
        return Err(InvariantError::DimensionMismatch { model: model.dim_k(), space: space.to_string() });
    }
    if path_samples < 2 {
        return Err(SpaceError::TooFewSamples(path_samples).into());
    }
    let pts = fixed_points(space);
    let canon = pts
        .par_iter()
        .map(|p| model.occupied_frame(&p.k()).map(|f| f.states))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sewing = Vec::with_capacity(pts.len());
    let mut pfs = Vec::with_capacity(pts.len());
    for (p, frame) in pts.iter().zip(&canon) {
        let w = sewing_from_frames(model.theta(), frame, frame);
        let pf = pfaffian(&SkewMatrix::new(w.clone())?);
        if pf.norm() < TAU_PF {
            return Err(InvariantError::ZeroPfaffian { trim: p.to_string(), magnitude: pf.norm() });
        }
        sewing.push(w);
        pfs.push(pf);
    }

    let mut notes = Vec::new();
    let (roots, lines) = if model.has_explicit_sections() {
        explicit_branch(model, space, &pts, path_samples)?
    } else {
        if d == 1 {
            notes.push("one-dimensional line: principal branch of the line Berry phase".to_string());
        }
        transported_branch(model, &pts, &canon, &sewing, path_samples, &mut notes)?
    };

    let trims: Vec<TrimData> = pts
        .iter()
        .zip(sewing)
        .zip(pfs.iter().zip(&roots))
        .map(|((p, w), (&pf, &r))| TrimData {
            point: *p,
            sewing: w,
            pfaffian: pf,
            sqrt_det: r,
            sign: Sign::from_real((pf / r).re),
        })
        .collect();
    let max_imag = trims.iter().fold(0.0f64, |a, t| a.max((t.pfaffian / t.sqrt_det).im.abs() / t.pfaffian.norm().max(1e-300)));
    if max_imag > 1e-6 {
        notes.push(format!("pf/sqrt(det) deviates from a real sign by {max_imag:.2e}"));
    }
    let bundle = PfaffianBundle::new(space, trims.iter().map(|t| t.sign).collect())?;
    let nu = bundle.nu();
    let weak = if d == 3 {
        (0..3)
            .map(|a| (a, pts.iter().filter(|p| p.is_pi(a)).map(|p| bundle.sign(p)).product()))
            .collect()
    } else {
        Vec::new()
    };
    let chern_total = if d >= 2 && !model.has_explicit_sections() {
        let fixed = vec![0.0; d - 2];
        match berry_sweep_plane(model, BandSelection::Occupied, (0, 1), &fixed, (CHERN_GRID, CHERN_GRID)) {
            Ok(b) => b.chern,
            Err(e) => {
                notes.push(format!("occupied Chern number unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };
    Ok(KaneMeleResult {
        space,
        bundle,
        trims,
        nu,
        weak,
        chern_total,
        lines,
        path_samples,
        extended: model.n_occupied() > 2,
        explicit_sections: model.has_explicit_sections(),
        notes,
    })
}

/// Explicit sections are already globally smooth: track `√det w` from 0 to π.
fn explicit_branch(
    model: &BlochModel,
    space: MomentumSpace,
    pts: &[FixedPoint],
    path_samples: usize,
) -> Result<(Vec<Complex64>, Vec<LineRecord>), InvariantError> {
    let path = effective_zone_path(space, (pts[0], pts[1]), path_samples)?;
    let dets = path
        .par_iter()
        .map(|k| {
            let u = model.occupied_frame(k)?.states;
            let u_minus = model.occupied_frame(&involution(k))?.states;
            Ok(sewing_from_frames(model.theta(), &u_minus, &u).determinant())
        })
        .collect::<Result<Vec<_>, InvariantError>>()?;
    let s0 = dets[0].sqrt();
    let trace = track_sqrt_det(&dets, s0, true)?;
    let line = LineRecord {
        axis: 0,
        base: 0,
        end: 1,
        berry_phase: 0.0,
        max_arg_jump: trace.max_arg_jump(),
        min_abs_det: trace.min_abs_det(),
        in_tree: true,
    };
    Ok((vec![s0, trace.last_sqrt()], vec![line]))
}

fn point_on(base: &[f64], axis: usize, value: f64) -> Vec<f64> {
    let mut k = base.to_vec();
    k[axis] = wrap_angle(value);
    k
}

/// Occupied frames on the circle through `base` along `axis`, `steps` samples.
fn loop_frames(model: &BlochModel, base: &[f64], axis: usize, steps: usize) -> Result<Vec<CMatrix>, InvariantError> {
    (0..steps)
        .map(|j| {
            let k = point_on(base, axis, 2.0 * PI * j as f64 / steps as f64);
            Ok(model.occupied_frame(&k)?.states)
        })
        .collect()
}

/// Smallest `|det⟨u_j|u_{j+1}⟩|` accepted between neighbouring samples.
pub const MIN_OVERLAP: f64 = 0.5;

fn checked_overlap(a: &CMatrix, b: &CMatrix, what: &dyn Fn() -> String) -> Result<Complex64, InvariantError> {
    let d = (a.adjoint() * b).determinant();
    if d.norm() < MIN_OVERLAP {
        return Err(ambiguous(format!(
            "neighbouring frames {} overlap only {:.3}; the path is too coarse",
            what(),
            d.norm()
        )));
    }
    Ok(d)
}

/// `arg det` of the parallel-transport holonomy around a closed loop of frames.
fn holonomy_phase(frames: &[CMatrix], axis: usize) -> Result<f64, InvariantError> {
    let n = frames.len();
    let mut prod = Complex64::new(1.0, 0.0);
    for j in 0..n {
        let d = checked_overlap(&frames[(j + 1) % n], &frames[j], &|| format!("along axis {axis}"))?;
        prod *= d / d.norm();
    }
    Ok(prod.arg())
}

struct Line {
    axis: usize,
    base: usize,
    end: usize,
    mu: Complex64,
    record: LineRecord,
}

/// Holonomy phases of the lines through `base` along `axis`, sampled while
/// the transverse coordinate `transverse` moves from `base` to `base + π`.
fn transverse_increment(
    model: &BlochModel,
    base: &[f64],
    axis: usize,
    transverse: usize,
    path_samples: usize,
    steps: usize,
) -> Result<f64, InvariantError> {
    let phases = (0..path_samples)
        .into_par_iter()
        .map(|s| {
            let start = point_on(base, transverse, base[transverse] + PI * s as f64 / (path_samples - 1) as f64);
            holonomy_phase(&loop_frames(model, &start, axis, steps)?, axis)
        })
        .collect::<Result<Vec<f64>, InvariantError>>()?;
    let mut total = 0.0;
    for (s, w) in phases.windows(2).enumerate() {
        let delta = wrap_angle(w[1] - w[0]);
        if delta.abs() >= LIFT_JUMP_LIMIT {
            return Err(ambiguous(format!(
                "Berry phase of lines along axis {axis} jumps by {delta:.3} at transverse step {s}"
            )));
        }
        total += delta;
    }
    Ok(total)
}

fn transported_branch(
    model: &BlochModel,
    pts: &[FixedPoint],
    canon: &[CMatrix],
    sewing: &[CMatrix],
    path_samples: usize,
    notes: &mut Vec<String>,
) -> Result<(Vec<Complex64>, Vec<LineRecord>), InvariantError> {
    let d = pts[0].k().len();
    let steps = 2 * (path_samples - 1);
    let half = steps / 2;
    let theta = model.theta();

    // lifted Berry phase per (axis, base fixed point)
    let mut lifted: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for axis in 0..d {
        let origin = vec![0.0; d];
        let reference = holonomy_phase(&loop_frames(model, &origin, axis, steps)?, axis)?;
        let mut segments: BTreeMap<(u8, usize), f64> = BTreeMap::new();
        for p in pts.iter().filter(|p| !p.is_pi(axis)) {
            let mut mask = 0u8;
            let mut phi = reference;
            for t in (0..d).filter(|&t| t != axis && p.is_pi(t)) {
                let key = (mask, t);
                let delta = match segments.get(&key) {
                    Some(&v) => v,
                    None => {
                        let start: Vec<f64> = (0..d).map(|a| if mask & (1 << a) != 0 { PI } else { 0.0 }).collect();
                        let v = transverse_increment(model, &start, axis, t, path_samples, steps)?;
                        segments.insert(key, v);
                        v
                    }
                };
                phi += delta;
                mask |= 1 << t;
            }
            lifted.insert((axis, p.index), phi);
        }
    }

    let jobs: Vec<(usize, usize, usize)> = (0..d)
        .flat_map(|axis| {
            pts.iter().filter(move |p| !p.is_pi(axis)).map(move |p| {
                let mut bits: Vec<bool> = (0..d).map(|a| p.is_pi(a)).collect();
                bits[axis] = true;
                (axis, p.index, FixedPoint::torus(&bits).index)
            })
        })
        .collect();

    let lines = jobs
        .par_iter()
        .map(|&(axis, base, end)| {
            let phi = lifted[&(axis, base)];
            let frames = loop_frames(model, &pts[base].k(), axis, steps)?;
            let can_b = &canon[base];
            let mut transported = Vec::with_capacity(steps + 1);
            transported.push(can_b.clone());
            for j in 1..=steps {
                let f = if j == steps { can_b } else { &frames[j] };
                let prev = &transported[j - 1];
                checked_overlap(f, prev, &|| format!("on the line from {} to {}", pts[base], pts[end]))?;
                transported.push(f * polar_unitary(&(f.adjoint() * prev)));
            }
            let holonomy = can_b.adjoint() * &transported[steps];
            let (eigs, vecs) = unitary_eigen(&holonomy);
            let mut angles: Vec<f64> = eigs.iter().map(|z| z.arg()).collect();
            let shift = ((phi - angles.iter().sum::<f64>()) / (2.0 * PI)).round();
            angles[0] += 2.0 * PI * shift;

            let gauge = |j: usize| -> CMatrix {
                if j == steps {
                    return can_b.clone();
                }
                let t = j as f64 / steps as f64;
                let phases: Vec<Complex64> = angles.iter().map(|&a| Complex64::from_polar(1.0, -t * a)).collect();
                &transported[j] * from_eigen(&vecs, &phases)
            };
            let smooth: Vec<CMatrix> = (0..=steps).map(gauge).collect();
            let dets: Vec<Complex64> = (0..=half)
                .map(|j| sewing_from_frames(theta, &smooth[steps - j], &smooth[j]).determinant())
                .collect();
            let s0 = sewing[base].determinant().sqrt();
            let trace = track_sqrt_det(&dets, s0, true).map_err(|e| {
                ambiguous(format!("line along axis {axis} from {} to {}: {e}", pts[base], pts[end]))
            })?;
            let rho = trace.last_sqrt() / s0;
            let v_end = canon[end].adjoint() * &smooth[half];
            let mu = v_end.determinant() * rho;
            Ok(Line {
                axis,
                base,
                end,
                mu,
                record: LineRecord {
                    axis,
                    base,
                    end,
                    berry_phase: angles.iter().sum(),
                    max_arg_jump: trace.max_arg_jump(),
                    min_abs_det: trace.min_abs_det(),
                    in_tree: false,
                },
            })
        })
        .collect::<Result<Vec<Line>, InvariantError>>()?;

    let mut lines = lines;
    let mut roots: Vec<Option<Complex64>> = vec![None; pts.len()];
    roots[0] = Some(sewing[0].determinant().sqrt());
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let rx = roots[x].expect("queued points have roots");
        for line in lines.iter_mut() {
            let next = if line.base == x && roots[line.end].is_none() {
                Some((line.end, rx * line.mu))
            } else if line.end == x && roots[line.base].is_none() {
                Some((line.base, rx / line.mu))
            } else {
                None
            };
            if let Some((y, r)) = next {
                roots[y] = Some(r);
                line.record.in_tree = true;
                queue.push_back(y);
            }
        }
    }
    let roots: Vec<Complex64> = roots.into_iter().map(|r| r.expect("line graph is connected")).collect();
    let mut worst = 0.0f64;
    for line in lines.iter().filter(|l| !l.record.in_tree) {
        let ratio = roots[line.end] / (line.mu * roots[line.base]);
        if ratio.re <= 0.0 {
            return Err(ambiguous(format!(
                "inconsistent line closure along axis {} between {} and {}",
                line.axis, pts[line.base], pts[line.end]
            )));
        }
        worst = worst.max((ratio - 1.0).norm());
    }
    if worst > 1e-6 {
        notes.push(format!("line closure residual {worst:.2e}"));
    }
    Ok((roots, lines.into_iter().map(|l| l.record).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Builtin;

    #[test]
    fn phase_examples() {
        for (k, nu) in [(1, Sign::Minus), (2, Sign::Plus)] {
            let model = Builtin::Phase { k }.build(1).unwrap();
            let r = kane_mele(&model, MomentumSpace::Torus(1), 16).unwrap();
            assert_eq!(r.nu, nu);
        }
    }

    #[test]
    fn flat_is_trivial() {
        for d in 1..=3 {
            let model = Builtin::Flat.build(d).unwrap();
            let r = kane_mele(&model, MomentumSpace::Torus(d), 8).unwrap();
            assert_eq!(r.nu, Sign::Plus);
            assert!(r.trims.iter().all(|t| t.sign == r.trims[0].sign));
        }
    }

    #[test]
    fn dvec_masses() {
        let t2 = MomentumSpace::Torus(2);
        for (m, nu) in [(1.0, Sign::Minus), (3.0, Sign::Plus), (-1.0, Sign::Minus)] {
            let model = Builtin::DVec { m }.build(2).unwrap();
            let r = kane_mele(&model, t2, 32).unwrap();
            assert_eq!(r.nu, nu, "m = {m}");
            assert_eq!(r.chern_total, Some(0));
        }
    }

    #[test]
    fn rejects_spheres_and_mismatch() {
        let model = Builtin::Flat.build(2).unwrap();
        assert!(kane_mele(&model, MomentumSpace::Sphere(2), 8).is_err());
        assert!(matches!(
            kane_mele(&model, MomentumSpace::Torus(3), 8),
            Err(InvariantError::DimensionMismatch { .. })
        ));
    }
}
