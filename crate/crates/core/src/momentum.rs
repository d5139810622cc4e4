//! Involutive momentum spaces: tori and spheres with the time-reversal
//! involution `k ↦ -k`, their fixed points, Z₂-CW cells and nearest-neighbour
//! pairings of fixed points.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::wrap_angle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("unsupported space {0}: {1}")]
    UnsupportedSpace(MomentumSpace, &'static str),
    #[error("dimension {0} is outside 1..=3")]
    BadDimension(usize),
    #[error("fixed points {0} and {1} are not nearest neighbours")]
    NotNearestNeighbors(String, String),
    #[error("path needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("cannot parse space '{0}' (expected t1, t2, t3, s1, s2 or s3)")]
    Parse(String),
}

/// A torus `Tᵈ` or sphere `Sᵈ`, `d ∈ {1, 2, 3}`, with involution `τ(k) = -k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MomentumSpace {
    Torus(usize),
    Sphere(usize),
}

impl MomentumSpace {
    pub fn torus(d: usize) -> Result<Self, SpaceError> {
        if (1..=3).contains(&d) {
            Ok(Self::Torus(d))
        } else {
            Err(SpaceError::BadDimension(d))
        }
    }

    pub fn sphere(d: usize) -> Result<Self, SpaceError> {
        if (1..=3).contains(&d) {
            Ok(Self::Sphere(d))
        } else {
            Err(SpaceError::BadDimension(d))
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Self::Torus(d) | Self::Sphere(d) => d,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, Self::Torus(_))
    }

    pub fn num_fixed_points(&self) -> usize {
        match *self {
            Self::Torus(d) => 1 << d,
            Self::Sphere(_) => 2,
        }
    }

    /// Short label used on the command line (`t2`, `s3`, ...).
    pub fn label(&self) -> String {
        match *self {
            Self::Torus(d) => format!("t{d}"),
            Self::Sphere(d) => format!("s{d}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self, SpaceError> {
        let err = || SpaceError::Parse(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        let (kind, rest) = lower.split_at(lower.len().min(1));
        let d: usize = rest.parse().map_err(|_| err())?;
        match kind {
            "t" => Self::torus(d).map_err(|_| err()),
            "s" => Self::sphere(d).map_err(|_| err()),
            _ => Err(err()),
        }
    }
}

impl fmt::Display for MomentumSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Torus(d) => write!(f, "T^{d}"),
            Self::Sphere(d) => write!(f, "S^{d}"),
        }
    }
}

/// The involution on torus coordinates, exact on the `(-π, π]` representation.
pub fn involution(k: &[f64]) -> Vec<f64> {
    k.iter().map(|&x| wrap_angle(-x)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pole {
    North,
    South,
}

/// A τ-fixed point. On a torus the coordinates are encoded as a bit mask:
/// bit for axis `a` set ⇔ coordinate `a` equals π.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FixedPointCoords {
    Torus { dim: usize, mask: u8 },
    Pole(Pole),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FixedPoint {
    pub index: usize,
    pub coords: FixedPointCoords,
}

impl FixedPoint {
    /// Torus fixed point whose coordinate along `axis` is π iff `bits[axis]`.
    pub fn torus(bits: &[bool]) -> Self {
        let dim = bits.len();
        let mut mask = 0u8;
        for (a, &b) in bits.iter().enumerate() {
            if b {
                mask |= 1 << a;
            }
        }
        Self { index: torus_index(dim, mask), coords: FixedPointCoords::Torus { dim, mask } }
    }

    pub fn is_pi(&self, axis: usize) -> bool {
        match self.coords {
            FixedPointCoords::Torus { mask, .. } => mask & (1 << axis) != 0,
            FixedPointCoords::Pole(_) => false,
        }
    }

    pub fn mask(&self) -> u8 {
        match self.coords {
            FixedPointCoords::Torus { mask, .. } => mask,
            FixedPointCoords::Pole(Pole::North) => 0,
            FixedPointCoords::Pole(Pole::South) => 1,
        }
    }

    /// Momentum coordinates (torus only; poles map onto the 1-torus points 0 and π).
    pub fn k(&self) -> Vec<f64> {
        match self.coords {
            FixedPointCoords::Torus { dim, mask } => {
                (0..dim).map(|a| if mask & (1 << a) != 0 { PI } else { 0.0 }).collect()
            }
            FixedPointCoords::Pole(Pole::North) => vec![0.0],
            FixedPointCoords::Pole(Pole::South) => vec![PI],
        }
    }

    /// Per-axis labels, `"0"` or `"pi"`; poles are `"N"`/`"S"`.
    pub fn labels(&self) -> Vec<String> {
        match self.coords {
            FixedPointCoords::Torus { dim, mask } => (0..dim)
                .map(|a| if mask & (1 << a) != 0 { "pi".into() } else { "0".into() })
                .collect(),
            FixedPointCoords::Pole(Pole::North) => vec!["N".into()],
            FixedPointCoords::Pole(Pole::South) => vec!["S".into()],
        }
    }

    pub fn differs_in_one_axis(&self, other: &FixedPoint) -> Option<usize> {
        match (self.coords, other.coords) {
            (FixedPointCoords::Torus { dim: d1, mask: m1 }, FixedPointCoords::Torus { dim: d2, mask: m2 })
                if d1 == d2 =>
            {
                let diff = m1 ^ m2;
                (diff.count_ones() == 1).then(|| diff.trailing_zeros() as usize)
            }
            _ => None,
        }
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.labels().join(","))
    }
}

/// Lexicographic index of a torus fixed point (axis 0 most significant).
pub fn torus_index(dim: usize, mask: u8) -> usize {
    (0..dim).fold(0, |acc, a| (acc << 1) | ((mask >> a) & 1) as usize)
}

pub fn fixed_points(space: MomentumSpace) -> Vec<FixedPoint> {
    match space {
        MomentumSpace::Torus(d) => {
            let mut pts: Vec<FixedPoint> = (0..(1u8 << d))
                .map(|mask| FixedPoint { index: torus_index(d, mask), coords: FixedPointCoords::Torus { dim: d, mask } })
                .collect();
            pts.sort_by_key(|p| p.index);
            pts
        }
        MomentumSpace::Sphere(_) => vec![
            FixedPoint { index: 0, coords: FixedPointCoords::Pole(Pole::North) },
            FixedPoint { index: 1, coords: FixedPointCoords::Pole(Pole::South) },
        ],
    }
}

/// One factor of a product cell on `T¹ = {0} ⊔ {π} ⊔ (0,π) ⊔ (-π,0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CircleCell {
    Zero,
    Pi,
    /// `(0, π)`
    Upper,
    /// `(-π, 0)`
    Lower,
}

impl CircleCell {
    pub fn involution(self) -> Self {
        match self {
            Self::Upper => Self::Lower,
            Self::Lower => Self::Upper,
            other => other,
        }
    }

    pub fn is_open(self) -> bool {
        matches!(self, Self::Upper | Self::Lower)
    }

    pub fn contains(self, x: f64) -> bool {
        let x = wrap_angle(x);
        match self {
            Self::Zero => x == 0.0,
            Self::Pi => x == PI,
            Self::Upper => x > 0.0 && x < PI,
            Self::Lower => x > -PI && x < 0.0,
        }
    }

    fn boundary(self) -> Vec<Self> {
        match self {
            Self::Upper | Self::Lower => vec![Self::Zero, Self::Pi],
            _ => vec![],
        }
    }

    fn interior_point(self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Pi => PI,
            Self::Upper => 0.37 * PI,
            Self::Lower => -0.61 * PI,
        }
    }
}

/// A cell of the Z₂-CW structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cell {
    /// Product cell on a torus.
    Torus(Vec<CircleCell>),
    /// Cell of the suspended antipodal structure on a sphere: a pole (`dim = 0`)
    /// or an open hemisphere-type cell of dimension `dim ≥ 1` carrying a sign.
    Sphere { dim: usize, upper: bool, pole: Option<Pole> },
}

impl Cell {
    pub fn dim(&self) -> usize {
        match self {
            Self::Torus(f) => f.iter().filter(|c| c.is_open()).count(),
            Self::Sphere { dim, .. } => *dim,
        }
    }

    pub fn involution(&self) -> Cell {
        match self {
            Self::Torus(f) => Self::Torus(f.iter().map(|c| c.involution()).collect()),
            Self::Sphere { dim, upper, pole } => {
                if *dim == 0 {
                    self.clone()
                } else {
                    Self::Sphere { dim: *dim, upper: !upper, pole: *pole }
                }
            }
        }
    }

    /// Whether a torus point lies in this cell.
    pub fn contains(&self, k: &[f64]) -> bool {
        match self {
            Self::Torus(f) => f.len() == k.len() && f.iter().zip(k).all(|(c, &x)| c.contains(x)),
            Self::Sphere { .. } => false,
        }
    }

    /// A fixed interior point (torus cells only).
    pub fn interior_point(&self) -> Option<Vec<f64>> {
        match self {
            Self::Torus(f) => Some(f.iter().map(|c| c.interior_point()).collect()),
            Self::Sphere { .. } => None,
        }
    }

    fn boundary(&self) -> Vec<Cell> {
        match self {
            Self::Torus(f) => {
                let mut out = Vec::new();
                for (a, c) in f.iter().enumerate() {
                    for b in c.boundary() {
                        let mut g = f.clone();
                        g[a] = b;
                        out.push(Self::Torus(g));
                    }
                }
                out
            }
            Self::Sphere { dim, .. } => match dim {
                0 => vec![],
                1 => vec![
                    Self::Sphere { dim: 0, upper: true, pole: Some(Pole::North) },
                    Self::Sphere { dim: 0, upper: true, pole: Some(Pole::South) },
                ],
                d => vec![
                    Self::Sphere { dim: d - 1, upper: true, pole: None },
                    Self::Sphere { dim: d - 1, upper: false, pole: None },
                ],
            },
        }
    }
}

/// A pair of free cells exchanged by τ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeCell {
    pub dim: usize,
    pub representative: Cell,
    pub image: Cell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDecomposition {
    pub fixed_cells: Vec<FixedPoint>,
    pub free_cells: Vec<FreeCell>,
    pub boundary: Vec<(Cell, Vec<Cell>)>,
}

impl CellDecomposition {
    /// Every cell, fixed and free, in a fixed order.
    pub fn all_cells(&self, space: MomentumSpace) -> Vec<Cell> {
        let mut cells: Vec<Cell> = self.fixed_cells.iter().map(|p| fixed_cell(space, p)).collect();
        for f in &self.free_cells {
            cells.push(f.representative.clone());
            cells.push(f.image.clone());
        }
        cells
    }
}

fn fixed_cell(space: MomentumSpace, p: &FixedPoint) -> Cell {
    match (space, p.coords) {
        (MomentumSpace::Torus(d), _) => Cell::Torus(
            (0..d).map(|a| if p.is_pi(a) { CircleCell::Pi } else { CircleCell::Zero }).collect(),
        ),
        (MomentumSpace::Sphere(_), FixedPointCoords::Pole(pole)) => {
            Cell::Sphere { dim: 0, upper: true, pole: Some(pole) }
        }
        (MomentumSpace::Sphere(_), _) => unreachable!("sphere fixed points are poles"),
    }
}

/// Z₂-CW decomposition. Tori are built as products of the circle
/// decomposition `{0, π} ⊔ (0, π) ⊔ (-π, 0)`; spheres use the suspension of the
/// antipodal structure, two fixed poles plus one free pair per dimension.
pub fn cell_decomposition(space: MomentumSpace) -> CellDecomposition {
    let fixed_cells = fixed_points(space);
    let mut free_cells = Vec::new();
    let mut boundary = Vec::new();
    match space {
        MomentumSpace::Torus(d) => {
            let all = [CircleCell::Zero, CircleCell::Pi, CircleCell::Upper, CircleCell::Lower];
            let mut cells: Vec<Vec<CircleCell>> = vec![vec![]];
            for _ in 0..d {
                cells = cells
                    .into_iter()
                    .flat_map(|prefix| {
                        all.iter().map(move |&c| {
                            let mut p = prefix.clone();
                            p.push(c);
                            p
                        })
                    })
                    .collect();
            }
            for f in cells {
                let cell = Cell::Torus(f.clone());
                if cell.dim() > 0 {
                    boundary.push((cell.clone(), cell.boundary()));
                }
                // representative: first open factor is the upper half-circle
                let first_open = f.iter().find(|c| c.is_open());
                if first_open == Some(&CircleCell::Upper) {
                    free_cells.push(FreeCell { dim: cell.dim(), image: cell.involution(), representative: cell });
                }
            }
        }
        MomentumSpace::Sphere(d) => {
            for dim in 1..=d {
                let rep = Cell::Sphere { dim, upper: true, pole: None };
                let img = rep.involution();
                boundary.push((rep.clone(), rep.boundary()));
                boundary.push((img.clone(), img.boundary()));
                free_cells.push(FreeCell { dim, representative: rep, image: img });
            }
        }
    }
    free_cells.sort_by(|a, b| (a.dim, &a.representative).cmp(&(b.dim, &b.representative)));
    CellDecomposition { fixed_cells, free_cells, boundary }
}

/// Partition of the pairs of a pairing into a north and a south set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grouping {
    pub index: usize,
    pub north: Vec<usize>,
    pub south: Vec<usize>,
    pub label: String,
}

/// Nearest-neighbour pairing of all fixed points along one axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrimPairing {
    pub space: MomentumSpace,
    pub axis: usize,
    /// `(a, b)` with `a` at coordinate 0 and `b` at π along `axis`, ordered by `a`.
    pub pairs: Vec<(FixedPoint, FixedPoint)>,
    pub grouping: Option<Grouping>,
}

pub const AXIS_NAMES: [&str; 3] = ["x", "y", "z"];

impl TrimPairing {
    /// Pairing along `axis`; for the 3-torus a grouping index in `0..3` is required.
    pub fn along_axis(space: MomentumSpace, axis: usize, grouping: Option<usize>) -> Result<Self, SpaceError> {
        let d = match space {
            MomentumSpace::Torus(d) if axis < d => d,
            MomentumSpace::Torus(_) => return Err(SpaceError::UnsupportedSpace(space, "axis out of range")),
            MomentumSpace::Sphere(_) => {
                return Err(SpaceError::UnsupportedSpace(space, "pairings are defined on tori only"))
            }
        };
        let pts = fixed_points(space);
        let pairs: Vec<(FixedPoint, FixedPoint)> = pts
            .iter()
            .filter(|p| !p.is_pi(axis))
            .map(|p| {
                let q = FixedPoint::torus(&(0..d).map(|a| if a == axis { true } else { p.is_pi(a) }).collect::<Vec<_>>());
                (*p, q)
            })
            .collect();
        let grouping = match (d, grouping) {
            (3, Some(g)) if g < 3 => Some(make_grouping(axis, &pairs, g)),
            (3, _) => return Err(SpaceError::UnsupportedSpace(space, "3-torus pairings need a grouping in 0..3")),
            (_, None) => None,
            (_, Some(_)) => return Err(SpaceError::UnsupportedSpace(space, "groupings exist only on the 3-torus")),
        };
        Ok(Self { space, axis, pairs, grouping })
    }

    /// Transverse axes of the pairing, increasing.
    pub fn transverse_axes(&self) -> Vec<usize> {
        (0..self.space.dim()).filter(|&a| a != self.axis).collect()
    }

    pub fn pair_label(&self, i: usize) -> String {
        let (a, b) = &self.pairs[i];
        format!("T[{}-{}]", a, b)
    }

    pub fn label(&self) -> String {
        let mut s = format!("axis-{}", AXIS_NAMES[self.axis]);
        if let Some(g) = &self.grouping {
            s.push_str(&format!("/grouping-{}", g.index));
        }
        s
    }

    /// Checks the pairing invariants: axis-aligned neighbours, every fixed point once.
    pub fn is_valid(&self) -> bool {
        let n = self.space.num_fixed_points();
        let mut seen = vec![false; n];
        for (a, b) in &self.pairs {
            if a.differs_in_one_axis(b).is_none() {
                return false;
            }
            for p in [a, b] {
                if p.index >= n || seen[p.index] {
                    return false;
                }
                seen[p.index] = true;
            }
        }
        let covered = seen.iter().all(|&s| s);
        let grouped = match &self.grouping {
            None => true,
            Some(g) => {
                let mut all: Vec<usize> = g.north.iter().chain(&g.south).copied().collect();
                all.sort_unstable();
                g.north.len() == g.south.len() && all == (0..self.pairs.len()).collect::<Vec<_>>()
            }
        };
        covered && grouped
    }
}

fn make_grouping(axis: usize, pairs: &[(FixedPoint, FixedPoint)], g: usize) -> Grouping {
    let trans: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
    let bits = |i: usize| (pairs[i].0.is_pi(trans[0]), pairs[i].0.is_pi(trans[1]));
    let in_north = |i: usize| {
        let (b0, b1) = bits(i);
        match g {
            0 => !b0,
            1 => !b1,
            _ => b0 == b1,
        }
    };
    let north: Vec<usize> = (0..pairs.len()).filter(|&i| in_north(i)).collect();
    let south: Vec<usize> = (0..pairs.len()).filter(|&i| !in_north(i)).collect();
    let (t0, t1) = (AXIS_NAMES[trans[0]], AXIS_NAMES[trans[1]]);
    let label = match g {
        0 => format!("k{t0}=0 | k{t0}=pi"),
        1 => format!("k{t1}=0 | k{t1}=pi"),
        _ => format!("k{t0}=k{t1} | k{t0}=k{t1}+pi"),
    };
    Grouping { index: g, north, south, label }
}

/// All axis-aligned nearest-neighbour pairings; on the 3-torus every pairing is
/// returned once per grouping of its four pairs into north and south sets.
pub fn enumerate_pairings(space: MomentumSpace) -> Result<Vec<TrimPairing>, SpaceError> {
    match space {
        MomentumSpace::Torus(2) => (0..2).map(|a| TrimPairing::along_axis(space, a, None)).collect(),
        MomentumSpace::Torus(3) => (0..3)
            .flat_map(|a| (0..3).map(move |g| (a, g)))
            .map(|(a, g)| TrimPairing::along_axis(space, a, Some(g)))
            .collect(),
        MomentumSpace::Torus(_) => Err(SpaceError::UnsupportedSpace(space, "only one pair exists on the circle")),
        MomentumSpace::Sphere(_) => Err(SpaceError::UnsupportedSpace(space, "pairings are defined on tori only")),
    }
}

/// Uniform straight path from `pair.0` to `pair.1` inside the effective zone.
pub fn effective_zone_path(
    space: MomentumSpace,
    pair: (FixedPoint, FixedPoint),
    samples: usize,
) -> Result<Vec<Vec<f64>>, SpaceError> {
    if samples < 2 {
        return Err(SpaceError::TooFewSamples(samples));
    }
    let (a, b) = pair;
    let nn = matches!(space, MomentumSpace::Torus(_))
        && a.k().len() == space.dim()
        && b.k().len() == space.dim()
        && a.differs_in_one_axis(&b).is_some();
    if !nn {
        return Err(SpaceError::NotNearestNeighbors(a.to_string(), b.to_string()));
    }
    let (ka, kb) = (a.k(), b.k());
    Ok((0..samples)
        .map(|i| {
            let t = i as f64 / (samples - 1) as f64;
            ka.iter().zip(&kb).map(|(x, y)| x + t * (y - x)).collect()
        })
        .collect())
}
