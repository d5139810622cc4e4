//! Unoriented cobordism of the Pfaffian bundle restricted to circles: a
//! restriction is a cylinder or a Möbius band, compactifying to `T²` or `RP²`,
//! and surfaces are classified in `N₂ ≅ Z₂` by the Euler characteristic mod 2.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::{PfaffianBundle, Sign};
use crate::momentum::FixedPoint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CobordismError {
    #[error("fixed points {0} and {1} are not a nearest-neighbour pair of the bundle's space")]
    PairingMismatch(String, String),
    #[error("connected sum has chi = {chi} ({}), outside the supported surfaces; cobordism class {class}", if *orientable { "orientable" } else { "non-orientable" })]
    UnrepresentableSurface { chi: i64, orientable: bool, class: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Cylinder,
    Moebius,
}

/// Real line bundle over a circle with one transition sign per fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBundleOverCircle {
    pub transition_signs: [Sign; 2],
    pub classification: Classification,
}

impl LineBundleOverCircle {
    pub fn new(a: Sign, b: Sign) -> Self {
        let classification = if a * b == Sign::Minus { Classification::Moebius } else { Classification::Cylinder };
        Self { transition_signs: [a, b], classification }
    }

    pub fn w1(&self) -> u8 {
        match self.classification {
            Classification::Cylinder => 0,
            Classification::Moebius => 1,
        }
    }

    /// ν of the circle, `h(a)·h(b)`.
    pub fn nu(&self) -> Sign {
        self.transition_signs[0] * self.transition_signs[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedSurface {
    Torus2,
    RP2,
    Klein,
}

impl ClosedSurface {
    pub fn euler_char(self) -> i64 {
        match self {
            Self::Torus2 => 0,
            Self::RP2 => 1,
            Self::Klein => 0,
        }
    }

    pub fn orientable(self) -> bool {
        matches!(self, Self::Torus2)
    }
}

impl fmt::Display for ClosedSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Torus2 => "T2",
            Self::RP2 => "RP2",
            Self::Klein => "K",
        })
    }
}

/// Element of `N₂ ≅ Z₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CobordismClass {
    pub value: u8,
}

/// Anything with a known Euler characteristic.
pub trait EulerCharacteristic {
    fn chi(&self) -> i64;
}

impl EulerCharacteristic for ClosedSurface {
    fn chi(&self) -> i64 {
        self.euler_char()
    }
}

impl EulerCharacteristic for CobordismError {
    fn chi(&self) -> i64 {
        match self {
            CobordismError::UnrepresentableSurface { chi, .. } => *chi,
            CobordismError::PairingMismatch(..) => 0,
        }
    }
}

/// The mod-2 Euler characteristic.
pub fn cobordism_class(s: &impl EulerCharacteristic) -> CobordismClass {
    CobordismClass { value: s.chi().rem_euclid(2) as u8 }
}

/// Restriction of the Pfaffian bundle to the circle through a nearest-neighbour pair.
pub fn restrict_bundle(
    bundle: &PfaffianBundle,
    pair: (FixedPoint, FixedPoint),
) -> Result<LineBundleOverCircle, CobordismError> {
    let n = bundle.space.num_fixed_points();
    let neighbours = match bundle.space {
        crate::momentum::MomentumSpace::Torus(_) => pair.0.differs_in_one_axis(&pair.1).is_some(),
        crate::momentum::MomentumSpace::Sphere(_) => pair.0.index != pair.1.index,
    };
    if pair.0.index >= n || pair.1.index >= n || !neighbours {
        return Err(CobordismError::PairingMismatch(pair.0.to_string(), pair.1.to_string()));
    }
    Ok(LineBundleOverCircle::new(bundle.sign(&pair.0), bundle.sign(&pair.1)))
}

/// One-point compactification of the fibres: cylinder ↦ `T²`, Möbius ↦ `RP²`.
pub fn compactify(line_bundle: &LineBundleOverCircle) -> ClosedSurface {
    match line_bundle.classification {
        Classification::Cylinder => ClosedSurface::Torus2,
        Classification::Moebius => ClosedSurface::RP2,
    }
}

/// Connected sum, resolved within the supported surfaces.
pub fn connected_sum(a: ClosedSurface, b: ClosedSurface) -> Result<ClosedSurface, CobordismError> {
    let chi = a.euler_char() + b.euler_char() - 2;
    let orientable = a.orientable() && b.orientable();
    match (chi, orientable) {
        (0, true) => Ok(ClosedSurface::Torus2),
        (0, false) => Ok(ClosedSurface::Klein),
        (1, false) => Ok(ClosedSurface::RP2),
        _ => Err(CobordismError::UnrepresentableSurface { chi, orientable, class: chi.rem_euclid(2) as u8 }),
    }
}

/// Cobordant iff the `w₁` values agree.
pub fn are_cobordant(a: &LineBundleOverCircle, b: &LineBundleOverCircle) -> bool {
    a.w1() == b.w1()
}
