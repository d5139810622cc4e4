use std::fmt::Write;

use serde::Serialize;

use z2band::invariants::{BerryData, InvariantReport};

use crate::commands::{TqftTable, ValidationOutput};

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn trims_csv(report: &InvariantReport) -> String {
    let mut s = String::from("coords,sign,pf_re,pf_im,sqrt_det_re,sqrt_det_im\n");
    for t in &report.trims {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            t.coords.join(";"),
            t.sign,
            t.pf_re,
            t.pf_im,
            t.sqrt_det_re,
            t.sqrt_det_im
        )
        .unwrap();
    }
    s
}

pub fn curvature_csv(data: &BerryData) -> String {
    let mut s = String::from("kx,ky,curvature\n");
    for (kx, ky, f) in data.curvature_rows() {
        writeln!(s, "{kx},{ky},{f}").unwrap();
    }
    s
}

pub fn tqft_csv(table: &TqftTable) -> String {
    let mut s = String::from("dim,carrier,z,nu\n");
    for e in &table.tqft {
        writeln!(s, "{},{},{},{}", e.dim, e.carrier, e.z, e.nu).unwrap();
    }
    s
}

pub fn validation_human(out: &ValidationOutput) -> String {
    let mut s = format!("model: {}\n", out.model);
    if let Some(d) = &out.details {
        writeln!(s, "grid: {} per axis", d.grid_density).unwrap();
        writeln!(s, "hermiticity defect: {:.3e}", d.hermiticity_defect).unwrap();
        writeln!(s, "time-reversal defect: {:.3e} (tolerance {:.3e})", d.time_reversal_defect, d.time_reversal_tolerance)
            .unwrap();
        match (d.min_gap, &d.min_gap_k) {
            (Some(g), Some(k)) => writeln!(s, "min gap: {g:.6e} at k = {k:?}").unwrap(),
            _ => writeln!(s, "min gap: none (all bands occupied)").unwrap(),
        }
        writeln!(s, "Kramers splitting: {:.3e}", d.kramers_defect).unwrap();
    }
    for f in &out.failures {
        writeln!(s, "FAIL {f}").unwrap();
    }
    writeln!(s, "{}", if out.passed { "valid" } else { "invalid" }).unwrap();
    s
}

pub fn invariant_human(r: &InvariantReport) -> String {
    let mut s = format!("model {} on {}, pairing {}\n", r.diagnostics.model, r.diagnostics.space, r.diagnostics.pairing);
    writeln!(s, "nu = {:+} (strong index {})", r.nu, r.strong).unwrap();
    for w in &r.weak {
        writeln!(s, "weak index along {}: {}", w.axis, w.value).unwrap();
    }
    for t in &r.trims {
        writeln!(
            s,
            "  ({}): sign {:+}  pf = {:.6}{:+.6}i  sqrt det = {:.6}{:+.6}i",
            t.coords.join(","),
            t.sign,
            t.pf_re,
            t.pf_im,
            t.sqrt_det_re,
            t.sqrt_det_im
        )
        .unwrap();
    }
    for c in &r.sw {
        writeln!(s, "  w{}({}) = {}", c.degree, c.carrier, c.value).unwrap();
    }
    if let Some(c) = r.chern_total {
        writeln!(s, "total Chern number: {c}").unwrap();
    }
    for n in &r.diagnostics.notes {
        writeln!(s, "note: {n}").unwrap();
    }
    s
}

pub fn berry_human(d: &BerryData) -> String {
    let mut s = format!("grid {:?} on axes {:?}\n", d.grid, d.axes);
    if let Some(c) = d.chern {
        writeln!(s, "Chern number: {c}").unwrap();
        let max = d.curvature.iter().fold(0.0f64, |a, f| a.max(f.abs()));
        writeln!(s, "max |plaquette curvature|: {max:.6e}").unwrap();
    }
    if let Some(g) = d.berry_phase {
        writeln!(s, "Berry phase: {g:.12}").unwrap();
    }
    s
}

pub fn tqft_human(t: &TqftTable) -> String {
    let mut s = format!("{} with pairing {} from {}\n", t.space, t.pairing, t.source);
    for e in &t.tqft {
        writeln!(s, "  dim {}  {:<24} Z = {}  nu = {:+}", e.dim, e.carrier, e.z, e.nu).unwrap();
    }
    writeln!(s, "nu = {:+}", t.nu).unwrap();
    writeln!(
        s,
        "monoidal checks: {} ({} checked)",
        if t.monoidal.passed { "passed" } else { "FAILED" },
        t.monoidal.checks
    )
    .unwrap();
    if let Some(c) = &t.monoidal.counterexample {
        writeln!(s, "  counterexample: {c}").unwrap();
    }
    s
}
