//! Declarative tight-binding model files.
//!
//! ```text
//! [lattice]
//! dim = 1
//! [bands]
//! n_bands = 2
//! n_occupied = 2
//! [theta]
//! matrix = 0 1
//!          -1 0
//! [hop]
//! displacement = 0
//! matrix = -1 0
//!          0 -1
//! ```
//!
//! Values are whitespace or comma separated; lines without `=` continue the
//! previous key. Complex entries are written `a`, `a+bi`, `a-bi` or `bi`.

use std::path::Path;

use num_complex::Complex64;

use super::{BlochModel, Hopping, ModelError, TimeReversalOp};
use crate::linalg::CMatrix;

#[derive(Debug, Default)]
struct Entry {
    key: String,
    line: usize,
    tokens: Vec<String>,
}

#[derive(Debug)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn require(&self, key: &str) -> Result<&Entry, ModelError> {
        self.get(key).ok_or_else(|| ModelError::ParseError {
            line: self.line,
            msg: format!("[{}] is missing `{key}`", self.name),
        })
    }
}

fn perr(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::ParseError { line, msg: msg.into() }
}

fn split_sections(text: &str) -> Result<Vec<Section>, ModelError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| perr(line, format!("unterminated section header `{content}`")))?;
            let name = name.trim().to_ascii_lowercase();
            if !matches!(name.as_str(), "lattice" | "bands" | "theta" | "hop") {
                return Err(perr(line, format!("unknown section [{name}]")));
            }
            sections.push(Section { name, line, entries: Vec::new() });
            continue;
        }
        let section = sections.last_mut().ok_or_else(|| perr(line, "content before the first section"))?;
        let tokens_of = |s: &str| s.split(|ch: char| ch.is_whitespace() || ch == ',').filter(|t| !t.is_empty()).map(String::from).collect::<Vec<_>>();
        if let Some((key, value)) = content.split_once('=') {
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(perr(line, "empty key"));
            }
            if section.get(&key).is_some() {
                return Err(perr(line, format!("duplicate key `{key}` in [{}]", section.name)));
            }
            section.entries.push(Entry { key, line, tokens: tokens_of(value) });
        } else {
            let entry = section
                .entries
                .last_mut()
                .ok_or_else(|| perr(line, format!("expected `key = value`, found `{content}`")))?;
            entry.tokens.extend(tokens_of(content));
        }
    }
    Ok(sections)
}

/// Parses a complex literal: `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i`.
pub(crate) fn parse_complex(tok: &str) -> Option<Complex64> {
    let s = tok.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse().ok(),
        }
    };
    match split {
        Some(p) => Some(Complex64::new(body[..p].parse().ok()?, imag(&body[p..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

fn parse_usize(entry: &Entry) -> Result<usize, ModelError> {
    match entry.tokens.as_slice() {
        [t] => t.parse().map_err(|_| perr(entry.line, format!("`{}` expects a non-negative integer", entry.key))),
        _ => Err(perr(entry.line, format!("`{}` expects a single integer", entry.key))),
    }
}

fn parse_matrix(entry: &Entry, n: usize) -> Result<CMatrix, ModelError> {
    if entry.tokens.len() != n * n {
        return Err(perr(entry.line, format!("matrix needs {} entries, found {}", n * n, entry.tokens.len())));
    }
    let vals = entry
        .tokens
        .iter()
        .map(|t| parse_complex(t).ok_or_else(|| perr(entry.line, format!("bad complex literal `{t}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CMatrix::from_row_slice(n, n, &vals))
}

/// Builds a model from the text of a spec file.
pub fn parse_model_spec(text: &str, name: &str) -> Result<BlochModel, ModelError> {
    let sections = split_sections(text)?;
    let single = |wanted: &str| -> Result<&Section, ModelError> {
        let mut found = sections.iter().filter(|s| s.name == wanted);
        let first = found.next().ok_or_else(|| perr(0, format!("missing section [{wanted}]")))?;
        if let Some(dup) = found.next() {
            return Err(perr(dup.line, format!("duplicate section [{wanted}]")));
        }
        Ok(first)
    };
    let lattice = single("lattice")?;
    let dim_entry = lattice.require("dim")?;
    let dim = parse_usize(dim_entry)?;
    if !(1..=3).contains(&dim) {
        return Err(perr(dim_entry.line, format!("dim must be 1, 2 or 3, got {dim}")));
    }
    let bands = single("bands")?;
    let n_bands = parse_usize(bands.require("n_bands")?)?;
    let n_occupied = parse_usize(bands.require("n_occupied")?)?;
    if n_bands == 0 {
        return Err(perr(bands.line, "n_bands must be positive"));
    }
    if n_occupied == 0 || n_occupied % 2 != 0 || n_occupied > n_bands {
        return Err(ModelError::OddOccupation { n_occupied, n_bands });
    }
    let theta_sec = single("theta")?;
    let theta = TimeReversalOp::new(parse_matrix(theta_sec.require("matrix")?, n_bands)?)?;

    let mut hops: Vec<Hopping> = Vec::new();
    for sec in sections.iter().filter(|s| s.name == "hop") {
        let d = sec.require("displacement")?;
        let displacement = d
            .tokens
            .iter()
            .map(|t| t.parse::<i64>().map_err(|_| perr(d.line, format!("bad displacement component `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if displacement.len() != dim {
            return Err(perr(d.line, format!("displacement has {} components, lattice dim is {dim}", displacement.len())));
        }
        if hops.iter().any(|h| h.displacement == displacement) {
            return Err(perr(d.line, format!("duplicate displacement {displacement:?}")));
        }
        let matrix = parse_matrix(sec.require("matrix")?, n_bands)?;
        hops.push(Hopping { displacement, matrix });
    }
    if hops.is_empty() {
        return Err(perr(0, "no [hop] blocks"));
    }
    BlochModel::tight_binding(name, dim, n_occupied, theta, hops)
}

fn format_complex(z: Complex64) -> String {
    let (re, im) = (z.re + 0.0, z.im + 0.0);
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{re}"),
        (true, false) => format!("{im}i"),
        (false, false) if im < 0.0 => format!("{re}{im}i"),
        (false, false) => format!("{re}+{im}i"),
    }
}

fn write_matrix(out: &mut String, m: &CMatrix) {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        let lead = if i == 0 { "matrix = " } else { "         " };
        out.push_str(lead);
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// Serializes a tight-binding model in the spec-file format.
pub fn write_model_spec(model: &BlochModel) -> String {
    let mut out = format!(
        "[lattice]\ndim = {}\n\n[bands]\nn_bands = {}\nn_occupied = {}\n\n[theta]\n",
        model.dim_k(),
        model.n_bands(),
        model.n_occupied()
    );
    write_matrix(&mut out, model.theta().unitary());
    for hop in model.hoppings() {
        let disp: Vec<String> = hop.displacement.iter().map(|r| r.to_string()).collect();
        out.push_str(&format!("\n[hop]\ndisplacement = {}\n", disp.join(" ")));
        write_matrix(&mut out, &hop.matrix);
    }
    out
}

/// Reads and parses a model spec file.
pub fn load_model_spec(path: impl AsRef<Path>) -> Result<BlochModel, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_model_spec(&text, &name)
}
