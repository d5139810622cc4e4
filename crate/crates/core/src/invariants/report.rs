use serde::{Deserialize, Serialize};

use super::{sw_classes, InvariantError, KaneMeleResult, LineRecord, PfaffianBundle, SWClass};
use crate::cobordism::{cobordism_class, compactify, restrict_bundle, Classification};
use crate::momentum::{MomentumSpace, TrimPairing, AXIS_NAMES};
use crate::tqft::{decompose, partition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakEntry {
    pub axis: String,
    pub value: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimEntry {
    pub coords: Vec<String>,
    pub sign: i32,
    pub pf_re: f64,
    pub pf_im: f64,
    pub sqrt_det_re: f64,
    pub sqrt_det_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TqftEntry {
    pub dim: usize,
    pub carrier: String,
    pub z: u8,
    pub nu: i32,
}

/// Restriction of the bundle to one paired circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleEntry {
    pub carrier: String,
    pub moebius: bool,
    pub surface: String,
    pub class: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub model: String,
    pub space: String,
    pub path_samples: Option<usize>,
    pub pairing: String,
    pub grouping: Option<String>,
    pub anchor: Option<String>,
    pub extended: bool,
    pub explicit_sections: bool,
    pub half_winding: Option<i64>,
    pub circles: Vec<CircleEntry>,
    pub lines: Vec<LineRecord>,
    pub notes: Vec<String>,
}

/// Everything computed for one bundle, in the shape of the JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub nu: i32,
    pub strong: u8,
    pub weak: Vec<WeakEntry>,
    pub trims: Vec<TrimEntry>,
    pub sw: Vec<SWClass>,
    pub tqft: Vec<TqftEntry>,
    pub chern_total: Option<i64>,
    pub diagnostics: Diagnostics,
}

/// Pairing used when none is requested: along the first axis on `T¹`, `T²`;
/// along `z` with grouping 0 on `T³`.
pub fn default_pairing(space: MomentumSpace) -> Result<TrimPairing, InvariantError> {
    Ok(match space {
        MomentumSpace::Torus(3) => TrimPairing::along_axis(space, 2, Some(0))?,
        _ => TrimPairing::along_axis(space, 0, None)?,
    })
}

impl InvariantReport {
    /// Report of a bundle given directly by its signs.
    pub fn from_bundle(bundle: &PfaffianBundle, pairing: &TrimPairing, source: &str) -> Result<Self, InvariantError> {
        let sw = sw_classes(bundle, pairing)?;
        let decomp = decompose(bundle.space, pairing)?;
        let tqft = partition(bundle, &decomp)?
            .into_iter()
            .map(|v| TqftEntry {
                dim: v.object.dimension,
                carrier: v.object.label.clone(),
                z: v.z_value,
                nu: v.nu_value().value(),
            })
            .collect();
        let circles = pairing
            .pairs
            .iter()
            .enumerate()
            .map(|(i, &pair)| {
                let line = restrict_bundle(bundle, pair).map_err(|e| InvariantError::PairingMismatch(e.to_string()))?;
                let surface = compactify(&line);
                Ok(CircleEntry {
                    carrier: pairing.pair_label(i),
                    moebius: line.classification == Classification::Moebius,
                    surface: surface.to_string(),
                    class: cobordism_class(&surface).value,
                })
            })
            .collect::<Result<Vec<_>, InvariantError>>()?;
        let pts = bundle.fixed_points();
        let trims = pts
            .iter()
            .map(|p| TrimEntry {
                coords: p.labels(),
                sign: bundle.sign(p).value(),
                pf_re: 0.0,
                pf_im: 0.0,
                sqrt_det_re: 0.0,
                sqrt_det_im: 0.0,
            })
            .collect();
        let weak = if bundle.space.dim() == 3 {
            (0..3)
                .map(|a| WeakEntry {
                    axis: AXIS_NAMES[a].to_string(),
                    value: pts.iter().filter(|p| p.is_pi(a)).fold(0, |acc, p| acc ^ bundle.sign(p).bit()),
                })
                .collect()
        } else {
            Vec::new()
        };
        let nu = bundle.nu();
        Ok(Self {
            nu: nu.value(),
            strong: nu.bit(),
            weak,
            trims,
            sw,
            tqft,
            chern_total: None,
            diagnostics: Diagnostics {
                model: source.to_string(),
                space: bundle.space.label(),
                path_samples: None,
                pairing: pairing.label(),
                grouping: pairing.grouping.as_ref().map(|g| g.label.clone()),
                anchor: None,
                extended: false,
                explicit_sections: false,
                half_winding: None,
                circles,
                lines: Vec::new(),
                notes: Vec::new(),
            },
        })
    }

    /// Report of a model computation, with Pfaffians and branch diagnostics.
    pub fn from_kane_mele(km: &KaneMeleResult, pairing: &TrimPairing, model: &str) -> Result<Self, InvariantError> {
        let mut report = Self::from_bundle(&km.bundle, pairing, model)?;
        for (entry, t) in report.trims.iter_mut().zip(&km.trims) {
            entry.pf_re = t.pfaffian.re;
            entry.pf_im = t.pfaffian.im;
            entry.sqrt_det_re = t.sqrt_det.re;
            entry.sqrt_det_im = t.sqrt_det.im;
        }
        report.chern_total = km.chern_total;
        let diag = &mut report.diagnostics;
        diag.path_samples = Some(km.path_samples);
        diag.anchor = km.trims.first().map(|t| t.point.to_string());
        diag.extended = km.extended;
        diag.explicit_sections = km.explicit_sections;
        diag.lines = km.lines.clone();
        diag.notes = km.notes.clone();
        if km.extended {
            diag.notes.push("more than two occupied bands: Pfaffian of the full occupied sewing matrix".into());
        }
        Ok(report)
    }
}
