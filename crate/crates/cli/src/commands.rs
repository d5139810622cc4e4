use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use z2band::invariants::{
    berry_sweep, default_pairing, half_winding, kane_mele, InvariantError, InvariantReport, PfaffianBundle, TqftEntry,
};
use z2band::model::{load_model_spec, validate_model, BandSelection, BlochModel, Builtin, ModelError, ValidationReport};
use z2band::momentum::{MomentumSpace, TrimPairing};
use z2band::tqft::{check_monoidal, decompose, MonoidalReport};

use crate::args::{Band, BerryArgs, Format, InvariantArgs, ModelSource, PairingArgs, TqftArgs, ValidateArgs};
use crate::render;

/// A command failure and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2: unreadable input or an invalid combination of options.
    Usage(String),
    /// Exit 1: the computation ran but the input does not qualify.
    Failed(String),
    /// Exit 3: the square-root branch could not be continued.
    Ambiguous(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Self::Failed(_) => 1,
            Self::Usage(_) => 2,
            Self::Ambiguous(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Failed(m) | Self::Ambiguous(m) => f.write_str(m),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::ParseError { .. } | ModelError::Io { .. } | ModelError::DimensionMismatch { .. } => {
                Self::Usage(e.to_string())
            }
            _ => Self::Failed(e.to_string()),
        }
    }
}

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Self {
        if e.is_branch_ambiguous() {
            return Self::Ambiguous(e.to_string());
        }
        match e {
            InvariantError::Model(m) => m.into(),
            InvariantError::Space(_)
            | InvariantError::DimensionMismatch { .. }
            | InvariantError::Unsupported(_)
            | InvariantError::PairingMismatch(_) => Self::Usage(e.to_string()),
            _ => Self::Failed(e.to_string()),
        }
    }
}

/// Rendered output plus the exit code to finish with.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn parse_space(s: &str) -> Result<MomentumSpace, Failure> {
    MomentumSpace::parse(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn load_model(source: &ModelSource, dim: Option<usize>) -> Result<(BlochModel, String), Failure> {
    load(source.builtin.as_deref(), source.model.as_deref(), dim)
}

fn load(builtin: Option<&str>, path: Option<&Path>, dim: Option<usize>) -> Result<(BlochModel, String), Failure> {
    match (builtin, path) {
        (Some(spec), None) => {
            let b = Builtin::parse(spec).map_err(|e| Failure::Usage(e.to_string()))?;
            let dim = dim.or(b.native_dim()).unwrap_or(2);
            let model = b.build(dim).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok((model, b.to_string()))
        }
        (None, Some(p)) => Ok((load_model_spec(p)?, p.display().to_string())),
        _ => Err(Failure::Usage("give exactly one of --builtin and --model".into())),
    }
}

fn resolve_pairing(space: MomentumSpace, args: &PairingArgs) -> Result<TrimPairing, Failure> {
    let usage = |e: &dyn fmt::Display| Failure::Usage(e.to_string());
    let default = default_pairing(space).map_err(|e| usage(&e))?;
    if args.pairing.is_none() && args.grouping.is_none() {
        return Ok(default);
    }
    let axis = args.pairing.map_or(default.axis, |p| p.index());
    let grouping = args.grouping.or(default.grouping.as_ref().map(|g| g.index));
    TrimPairing::along_axis(space, axis, grouping).map_err(|e| usage(&e))
}

fn selection(band: Band) -> BandSelection {
    match band {
        Band::All => BandSelection::Occupied,
        Band::LowerHalf => BandSelection::LowerHalf,
    }
}

/// JSON shape of `validate`; `details` is absent when the model could not be built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOutput {
    pub model: String,
    pub passed: bool,
    pub failures: Vec<String>,
    pub details: Option<ValidationReport>,
}

pub fn validate(args: &ValidateArgs) -> Result<Outcome, Failure> {
    let out = match load_model(&args.source, None) {
        Ok((model, name)) => {
            let report = validate_model(&model, args.grid);
            ValidationOutput { model: name, passed: report.passed, failures: report.failures.clone(), details: Some(report) }
        }
        Err(Failure::Failed(msg)) => {
            let name = args.source.model.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
            ValidationOutput { model: name, passed: false, failures: vec![msg], details: None }
        }
        Err(e) => return Err(e),
    };
    let text = match args.out.format {
        Format::Json => render::json(&out),
        Format::Human => render::validation_human(&out),
        Format::Csv => return Err(Failure::Usage("validate has no CSV output".into())),
    };
    Ok(Outcome { text, code: if out.passed { 0 } else { 1 } })
}

pub fn invariant(args: &InvariantArgs) -> Result<Outcome, Failure> {
    let space = args.space.as_deref().map(parse_space).transpose()?;
    let (model, name) = load_model(&args.source, space.map(|s| s.dim()))?;
    let space = space.unwrap_or(MomentumSpace::Torus(model.dim_k()));
    let km = kane_mele(&model, space, args.path_samples)?;
    let pairing = resolve_pairing(space, &args.pairing)?;
    let mut report = InvariantReport::from_kane_mele(&km, &pairing, &name)?;
    report.diagnostics.half_winding = model.phase_function().and_then(|p| half_winding(p.beta()).ok());
    Ok(Outcome::ok(match args.out.format {
        Format::Json => render::json(&report),
        Format::Csv => render::trims_csv(&report),
        Format::Human => render::invariant_human(&report),
    }))
}

pub fn berry(args: &BerryArgs) -> Result<Outcome, Failure> {
    let (model, _) = load_model(&args.source, None)?;
    let grid = args.grid.clone().unwrap_or_else(|| vec![24; model.dim_k()]);
    let data = berry_sweep(&model, selection(args.band), &grid)?;
    let text = match args.out.format {
        Format::Json => render::json(&data),
        Format::Csv if data.grid.len() == 2 => render::curvature_csv(&data),
        Format::Csv => return Err(Failure::Usage("curvature CSV needs a two-dimensional grid".into())),
        Format::Human => render::berry_human(&data),
    };
    Ok(Outcome::ok(text))
}

/// JSON shape of `tqft`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TqftTable {
    pub space: String,
    pub pairing: String,
    pub source: String,
    pub nu: i32,
    pub tqft: Vec<TqftEntry>,
    pub monoidal: MonoidalReport,
}

fn space_for_signs(signs: &str) -> Result<MomentumSpace, Failure> {
    match signs.split(',').count() {
        2 => Ok(MomentumSpace::Torus(1)),
        4 => Ok(MomentumSpace::Torus(2)),
        8 => Ok(MomentumSpace::Torus(3)),
        n => Err(Failure::Usage(format!("{n} signs do not match any torus; pass --space"))),
    }
}

pub fn tqft(args: &TqftArgs) -> Result<Outcome, Failure> {
    let space = args.space.as_deref().map(parse_space).transpose()?;
    let (bundle, source) = match &args.signs {
        Some(signs) => {
            let space = match space {
                Some(s) => s,
                None => space_for_signs(signs)?,
            };
            let bundle = PfaffianBundle::parse_signs(space, signs).map_err(|e| Failure::Usage(e.to_string()))?;
            (bundle, "signs".to_string())
        }
        None => {
            let (model, name) = load(args.builtin.as_deref(), args.model.as_deref(), space.map(|s| s.dim()))?;
            let space = space.unwrap_or(MomentumSpace::Torus(model.dim_k()));
            (kane_mele(&model, space, args.path_samples)?.bundle, name)
        }
    };
    let pairing = resolve_pairing(bundle.space, &args.pairing)?;
    let report = InvariantReport::from_bundle(&bundle, &pairing, &source)?;
    let monoidal = check_monoidal(&bundle, &decompose(bundle.space, &pairing)?)?;
    let table = TqftTable {
        space: bundle.space.label(),
        pairing: pairing.label(),
        source,
        nu: report.nu,
        tqft: report.tqft,
        monoidal,
    };
    Ok(Outcome::ok(match args.out.format {
        Format::Json => render::json(&table),
        Format::Csv => render::tqft_csv(&table),
        Format::Human => render::tqft_human(&table),
    }))
}
