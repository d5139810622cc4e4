use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::InvariantError;
use crate::model::{PhaseFunction, TAU_PHASE};
use crate::momentum::{fixed_points, FixedPoint, MomentumSpace, TrimPairing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_real(x: f64) -> Self {
        if x < 0.0 {
            Self::Minus
        } else {
            Self::Plus
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 1 {
            Self::Minus
        } else {
            Self::Plus
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }

    /// Z₂ encoding: `+1 ↦ 0`, `-1 ↦ 1`.
    pub fn bit(self) -> u8 {
        match self {
            Self::Plus => 0,
            Self::Minus => 1,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "+" | "+1" | "1" => Some(Self::Plus),
            "-" | "-1" => Some(Self::Minus),
            _ => None,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.bit() ^ rhs.bit())
    }
}

impl std::iter::Product for Sign {
    fn product<I: Iterator<Item = Sign>>(iter: I) -> Sign {
        iter.fold(Sign::Plus, |a, b| a * b)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "+",
            Self::Minus => "-",
        })
    }
}

/// The Pfaffian line bundle with structure group Z₂: one sign per fixed point,
/// indexed like [`fixed_points`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfaffianBundle {
    pub space: MomentumSpace,
    pub signs: Vec<Sign>,
}

impl PfaffianBundle {
    pub fn new(space: MomentumSpace, signs: Vec<Sign>) -> Result<Self, InvariantError> {
        let n = space.num_fixed_points();
        if signs.len() != n {
            return Err(InvariantError::PairingMismatch(format!(
                "{space} has {n} fixed points, got {} signs",
                signs.len()
            )));
        }
        Ok(Self { space, signs })
    }

    /// Bundle from the bits of `mask`: bit `i` set means fixed point `i` carries `-1`.
    pub fn from_mask(space: MomentumSpace, mask: u32) -> Self {
        let signs = (0..space.num_fixed_points()).map(|i| Sign::from_bit((mask >> i) as u8 & 1)).collect();
        Self { space, signs }
    }

    /// Parses `+,-,+,+`.
    pub fn parse_signs(space: MomentumSpace, text: &str) -> Result<Self, InvariantError> {
        let signs = text
            .split(',')
            .map(|t| Sign::parse(t).ok_or_else(|| InvariantError::PairingMismatch(format!("bad sign '{t}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(space, signs)
    }

    pub fn sign(&self, p: &FixedPoint) -> Sign {
        self.signs[p.index]
    }

    pub fn fixed_points(&self) -> Vec<FixedPoint> {
        fixed_points(self.space)
    }

    /// `ν = ∏ h(x)` over all fixed points.
    pub fn nu(&self) -> Sign {
        self.signs.iter().copied().product()
    }

    /// Z₂ sum of the sign bits over a subset of fixed points.
    pub fn parity(&self, carrier: &[usize]) -> u8 {
        carrier.iter().fold(0, |acc, &i| acc ^ self.signs[i].bit())
    }
}

/// A Stiefel–Whitney class `w_degree ∈ H^degree(carrier; Z₂)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SWClass {
    pub degree: usize,
    pub carrier: String,
    pub value: u8,
}

/// `w₁` of the bundle restricted to the circle through a nearest-neighbour pair.
pub fn pair_w1(bundle: &PfaffianBundle, pair: &(FixedPoint, FixedPoint)) -> u8 {
    bundle.sign(&pair.0).bit() ^ bundle.sign(&pair.1).bit()
}

fn check_pairing(bundle: &PfaffianBundle, pairing: &TrimPairing) -> Result<(), InvariantError> {
    if pairing.space != bundle.space {
        return Err(InvariantError::PairingMismatch(format!(
            "pairing lives on {}, bundle on {}",
            pairing.space, bundle.space
        )));
    }
    if !pairing.is_valid() {
        return Err(InvariantError::PairingMismatch("pairing is not a nearest-neighbour cover".into()));
    }
    if bundle.space.dim() == 3 && pairing.grouping.is_none() {
        return Err(InvariantError::PairingMismatch("3-torus pairing needs a grouping".into()));
    }
    Ok(())
}

/// Stiefel–Whitney classes read off from the pairing: `w₁` of every paired
/// circle, `w₂` of the north and south 2-tori of a 3-torus grouping, and the
/// top class of the whole space.
pub fn sw_classes(bundle: &PfaffianBundle, pairing: &TrimPairing) -> Result<Vec<SWClass>, InvariantError> {
    check_pairing(bundle, pairing)?;
    let d = bundle.space.dim();
    let w1: Vec<u8> = pairing.pairs.iter().map(|p| pair_w1(bundle, p)).collect();
    let mut out = Vec::new();
    if d > 1 {
        for (i, &v) in w1.iter().enumerate() {
            out.push(SWClass { degree: 1, carrier: pairing.pair_label(i), value: v });
        }
    }
    if let Some(g) = &pairing.grouping {
        for (name, set) in [("T2_N", &g.north), ("T2_S", &g.south)] {
            let value = set.iter().fold(0, |acc, &i| acc ^ w1[i]);
            out.push(SWClass { degree: 2, carrier: name.to_string(), value });
        }
    }
    let top = w1.iter().fold(0, |acc, &v| acc ^ v);
    out.push(SWClass { degree: d, carrier: format!("T^{d}"), value: top });
    Ok(out)
}

/// Half winding number `n(β) = (β(π) - β(0))/π`.
pub fn half_winding(beta: &PhaseFunction) -> Result<i64, InvariantError> {
    let n = beta.half_increment() / PI;
    let rounded = n.round();
    let residual = ((n - rounded) * PI).abs();
    if !residual.is_finite() || residual > TAU_PHASE {
        return Err(InvariantError::NotHalfIntegral { residual });
    }
    Ok(rounded as i64)
}
