//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use z2band::linalg::{kron, pauli, CMatrix};
use z2band::model::{BlochModel, Hopping, TimeReversalOp};

pub fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| cz(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
}

pub fn random_skew<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let a = random_matrix(rng, n, 1.0);
    &a - a.transpose()
}

/// Pfaffian by expansion over perfect matchings along the first row.
pub fn pf_matching(m: &CMatrix) -> Complex64 {
    fn rec(m: &CMatrix, idx: &[usize]) -> Complex64 {
        if idx.is_empty() {
            return cz(1.0, 0.0);
        }
        let first = idx[0];
        let mut total = cz(0.0, 0.0);
        for j in 1..idx.len() {
            let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|&(p, _)| p + 1 != j).map(|(_, &v)| v).collect();
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            total += m[(first, idx[j])] * rec(m, &rest) * sign;
        }
        total
    }
    if m.nrows() % 2 == 1 {
        return cz(0.0, 0.0);
    }
    rec(m, &(0..m.nrows()).collect::<Vec<_>>())
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (h + h.adjoint()) * cz(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(h.nrows(), h.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn occupied(model: &BlochModel, k: &[f64]) -> CMatrix {
    let (_, v) = eigh(&model.hamiltonian(k).unwrap());
    v.columns(0, model.n_occupied()).into_owned()
}

fn theta_vec(model: &BlochModel, v: &CMatrix) -> CMatrix {
    model.theta().unitary() * v.map(|z| z.conj())
}

/// Occupied frame at a TRIM arranged as `(ψ₁, Θψ₁, ψ₂, Θψ₂, …)`.
pub fn kramers_frame(model: &BlochModel, k: &[f64]) -> CMatrix {
    let v = occupied(model, k);
    let n = v.ncols();
    let mut cols: Vec<CMatrix> = Vec::new();
    while cols.len() < n {
        let mut best: Option<(f64, CMatrix)> = None;
        for j in 0..n {
            let mut r = v.columns(j, 1).into_owned();
            for c in &cols {
                let ov = (c.adjoint() * &r)[(0, 0)];
                r -= c * ov;
            }
            let norm = r.norm();
            if best.as_ref().map_or(true, |(b, _)| norm > *b) {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.unwrap();
        let psi = r / cz(norm, 0.0);
        let tpsi = theta_vec(model, &psi);
        cols.push(psi);
        cols.push(tpsi);
    }
    let mut out = CMatrix::zeros(v.nrows(), n);
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, &c.column(0));
    }
    out
}

/// Frame at `-k` fixed by `u₂ₚ₊₁(-k) = Θu₂ₚ(k)`, `u₂ₚ(-k) = -Θu₂ₚ₊₁(k)`.
pub fn tr_partner_frame(model: &BlochModel, frame: &CMatrix) -> CMatrix {
    let t = theta_vec(model, frame);
    let mut out = CMatrix::zeros(frame.nrows(), frame.ncols());
    for p in 0..frame.ncols() / 2 {
        out.set_column(2 * p, &(-t.column(2 * p + 1)));
        out.set_column(2 * p + 1, &t.column(2 * p));
    }
    out
}

fn link(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = (a.adjoint() * b).determinant();
    d / d.norm()
}

/// Lattice Z₂ index on an `n × n/2` mesh of half the Brillouin zone with
/// time-reversal-constrained frames on its edges. Returns ν = ±1.
pub fn fh_z2(model: &BlochModel, n: usize) -> i32 {
    assert!(n % 4 == 0);
    let m = n / 2;
    let kx = |i: usize| -PI + 2.0 * PI * i as f64 / n as f64;
    let ky = |j: usize| PI * j as f64 / m as f64;
    let mut frames: Vec<Vec<CMatrix>> = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let edge = j == 0 || j == m;
        let mut row: Vec<Option<CMatrix>> = vec![None; n];
        for i in 0..n {
            let k = [kx(i), ky(j)];
            if !edge {
                row[i] = Some(occupied(model, &k));
            } else if i == 0 || i == n / 2 {
                row[i] = Some(kramers_frame(model, &k));
            } else if i > n / 2 {
                row[i] = Some(occupied(model, &k));
            }
        }
        if edge {
            for i in 1..n / 2 {
                let partner = row[n - i].clone().unwrap();
                row[i] = Some(tr_partner_frame(model, &partner));
            }
        }
        frames.push(row.into_iter().map(Option::unwrap).collect());
    }
    let a1 = |i: usize, j: usize| link(&frames[j][i], &frames[j][(i + 1) % n]);
    let a2 = |i: usize, j: usize| link(&frames[j][i], &frames[j + 1][i]);
    let mut total: i64 = 0;
    for j in 0..m {
        for i in 0..n {
            let (u1, u2r, u1t, u2) = (a1(i, j), a2((i + 1) % n, j), a1(i, j + 1), a2(i, j));
            let f = (u1 * u2r * u1t.conj() * u2.conj()).arg();
            let s = u1.arg() + u2r.arg() - u1t.arg() - u2.arg();
            total += ((s - f) / (2.0 * PI)).round() as i64;
        }
    }
    if total.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `(-1)^{(#negative parity eigenvalues)/2}` of the occupied states at `k`.
pub fn parity_delta(model: &BlochModel, parity: &CMatrix, k: &[f64]) -> i32 {
    let v = occupied(model, k);
    let (vals, _) = eigh(&(v.adjoint() * parity * &v));
    let neg = vals.iter().filter(|&&x| x < 0.0).count();
    assert_eq!(neg % 2, 0, "parity eigenvalues should pair up at a TRIM");
    if (neg / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Per-TRIM parity products, indexed like the library's fixed points
/// (axis 0 is the most significant bit).
pub fn parity_signs(model: &BlochModel, parity: &CMatrix) -> Vec<i32> {
    let d = model.dim_k();
    (0..1usize << d)
        .map(|idx| {
            let k: Vec<f64> = (0..d).map(|a| if idx >> (d - 1 - a) & 1 == 1 { PI } else { 0.0 }).collect();
            parity_delta(model, parity, &k)
        })
        .collect()
}

/// Degree of `k ↦ d(k)/|d(k)|` on the 2-torus from signed spherical-triangle areas.
pub fn dhat_degree(d: impl Fn(f64, f64) -> [f64; 3], n: usize) -> i64 {
    let unit = |kx: f64, ky: f64| {
        let v = d(kx, ky);
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / r, v[1] / r, v[2] / r]
    };
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let triple = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| {
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
    };
    let solid = |a, b, c| 2.0 * triple(a, b, c).atan2(1.0 + dot(a, b) + dot(b, c) + dot(c, a));
    let h = 2.0 * PI / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p00 = unit(i as f64 * h, j as f64 * h);
            let p10 = unit((i + 1) as f64 * h, j as f64 * h);
            let p11 = unit((i + 1) as f64 * h, (j + 1) as f64 * h);
            let p01 = unit(i as f64 * h, (j + 1) as f64 * h);
            total += solid(p00, p10, p11) + solid(p00, p11, p01);
        }
    }
    (total / (4.0 * PI)).round() as i64
}

/// Spin-up d-vector of the `dvec` builtin.
pub fn dvec_d(m: f64) -> impl Fn(f64, f64) -> [f64; 3] {
    move |kx, ky| [kx.sin(), ky.sin(), m + kx.cos() + ky.cos()]
}

/// Projects `t` onto matrices with `Θ T Θ⁻¹ = T`.
pub fn tr_symmetrize(theta: &TimeReversalOp, t: &CMatrix) -> CMatrix {
    let u = theta.unitary();
    (t + u * t.map(|z| z.conj()) * u.adjoint()) * cz(0.5, 0.0)
}

/// Adds random time-reversal-invariant on-site and nearest-neighbour terms of size `eps`.
pub fn perturb<R: Rng>(model: &BlochModel, rng: &mut R, eps: f64) -> BlochModel {
    let d = model.dim_k();
    let n = model.n_bands();
    let theta = model.theta().clone();
    let mut hops: Vec<Hopping> = model.hoppings().to_vec();
    let mut add = |disp: Vec<i64>, mat: CMatrix| {
        if let Some(h) = hops.iter_mut().find(|h| h.displacement == disp) {
            h.matrix += mat;
        } else {
            hops.push(Hopping { displacement: disp, matrix: mat });
        }
    };
    let x = random_matrix(rng, n, eps);
    add(vec![0; d], tr_symmetrize(&theta, &((&x + x.adjoint()) * cz(0.5, 0.0))));
    for a in 0..d {
        let t = tr_symmetrize(&theta, &random_matrix(rng, n, eps / 2.0));
        let mut r = vec![0i64; d];
        r[a] = 1;
        let minus: Vec<i64> = r.iter().map(|x| -x).collect();
        add(minus, t.adjoint());
        add(r, t);
    }
    BlochModel::tight_binding(format!("{}+noise", model.name()), d, model.n_occupied(), theta, hops).unwrap()
}

/// Block-diagonal sum of two models on the same lattice.
pub fn direct_sum(a: &BlochModel, b: &BlochModel) -> BlochModel {
    let (na, nb) = (a.n_bands(), b.n_bands());
    let block = |x: &CMatrix, y: &CMatrix| {
        let mut m = CMatrix::zeros(na + nb, na + nb);
        m.view_mut((0, 0), (na, na)).copy_from(x);
        m.view_mut((na, na), (nb, nb)).copy_from(y);
        m
    };
    let theta = TimeReversalOp::new(block(a.theta().unitary(), b.theta().unitary())).unwrap();
    let zero_a = CMatrix::zeros(na, na);
    let zero_b = CMatrix::zeros(nb, nb);
    let mut disps: Vec<Vec<i64>> = a.hoppings().iter().chain(b.hoppings()).map(|h| h.displacement.clone()).collect();
    disps.sort();
    disps.dedup();
    let hops = disps
        .into_iter()
        .map(|r| {
            let x = a.hoppings().iter().find(|h| h.displacement == r).map_or(&zero_a, |h| &h.matrix);
            let y = b.hoppings().iter().find(|h| h.displacement == r).map_or(&zero_b, |h| &h.matrix);
            Hopping { displacement: r, matrix: block(x, y) }
        })
        .collect();
    BlochModel::tight_binding(
        format!("{}+{}", a.name(), b.name()),
        a.dim_k(),
        a.n_occupied() + b.n_occupied(),
        theta,
        hops,
    )
    .unwrap()
}

/// Four-band Dirac lattice model on the 3-torus,
/// `Σ_a λ_a sin k_a Γ_a + (m + Σ_a t_a cos k_a) Γ₄` with `Γ_a = σx⊗s_a`, `Γ₄ = σz⊗s0`.
pub fn dirac3d(m: f64, t: [f64; 3], lambda: [f64; 3]) -> BlochModel {
    let gamma4 = kron(&pauli(3), &pauli(0));
    let mut hops = vec![Hopping { displacement: vec![0, 0, 0], matrix: &gamma4 * cz(m, 0.0) }];
    for a in 0..3 {
        let ga = kron(&pauli(1), &pauli(a + 1));
        let tmat = &ga * cz(0.0, -lambda[a] / 2.0) + &gamma4 * cz(t[a] / 2.0, 0.0);
        let mut r = vec![0i64; 3];
        r[a] = 1;
        hops.push(Hopping { displacement: r.iter().map(|x| -x).collect(), matrix: tmat.adjoint() });
        hops.push(Hopping { displacement: r, matrix: tmat });
    }
    let theta = TimeReversalOp::new(kron(&pauli(0), &(pauli(2) * cz(0.0, 1.0)))).unwrap();
    BlochModel::tight_binding(format!("dirac3d:m={m}"), 3, 2, theta, hops).unwrap()
}

pub fn inversion4() -> CMatrix {
    kron(&pauli(3), &pauli(0))
}

/// All perfect matchings of the fixed points of `Tᵈ` into pairs differing in one
/// coordinate, each returned as sorted index pairs.
pub fn neighbour_matchings(d: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(d: usize, free: Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some(&a) = free.first() else {
            let mut m = acc.clone();
            m.sort_unstable();
            out.push(m);
            return;
        };
        for &b in &free[1..] {
            if (a ^ b).count_ones() == 1 {
                let rest: Vec<usize> = free.iter().copied().filter(|&x| x != a && x != b).collect();
                acc.push((a.min(b), a.max(b)));
                rec(d, rest, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(d, (0..1 << d).collect(), &mut Vec::new(), &mut out);
    out
}

/// Euler characteristic of the closed surface built from the band: a Möbius band
/// capped by a disc, or a cylinder with its two boundary circles glued.
pub fn capped_band_chi(moebius: bool) -> i64 {
    let band = 0;
    if moebius {
        band + 1
    } else {
        band
    }
}
