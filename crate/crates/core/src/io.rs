//! Output files of a run, curve CSV input and surface mesh export.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{PolygonalCurve, ShapeStats, Thresholds, Topology, Vec2};
use crate::simulation::{RunConfig, RunOutput, Snapshot, Termination, VelocityBounds};

pub const DIAGNOSTICS_HEADER: [&str; 8] = [
    "step",
    "t",
    "energy",
    "mesh_ratio",
    "min_r",
    "max_V",
    "picard_iters",
    "residual",
];

pub const CURVE_HEADER: [&str; 7] = ["j", "rho", "r", "z", "varkappa", "kappa", "V"];

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Compact decimal rendering of a time for file names, e.g. `0.77`, `10`.
pub fn time_label(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub config: RunConfig,
    pub termination: Termination,
    pub final_stats: ShapeStats,
    pub thresholds: Thresholds,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub steps: usize,
    pub velocity_bounds: VelocityBounds,
    pub version: String,
}

impl Meta {
    pub fn from_output(out: &RunOutput) -> Self {
        Self {
            config: out.config.clone(),
            termination: out.termination.clone(),
            final_stats: out.final_stats,
            thresholds: out.thresholds,
            initial_energy: out.initial_energy,
            final_energy: out.final_energy(),
            steps: out.final_state.step,
            velocity_bounds: out.velocity_bounds,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

pub fn write_diagnostics(path: &Path, out: &RunOutput) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(DIAGNOSTICS_HEADER)?;
    for d in &out.diagnostics {
        w.write_record([
            d.step.to_string(),
            fmt_f64(d.t),
            fmt_f64(d.energy),
            fmt_f64(d.mesh_ratio),
            fmt_f64(d.min_r),
            fmt_f64(d.max_v),
            d.picard_iters.to_string(),
            fmt_f64(d.residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve(path: &Path, snap: &Snapshot) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CURVE_HEADER)?;
    let jj = snap.curve.num_elements() as f64;
    for (j, p) in snap.curve.nodes().iter().enumerate() {
        w.write_record([
            j.to_string(),
            fmt_f64(j as f64 / jj),
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(snap.varkappa[j]),
            fmt_f64(snap.kappa[j]),
            fmt_f64(snap.velocity[j]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `diagnostics.csv`, one `curve_t<time>.csv` per snapshot (plus
/// `surface_t<time>.obj` when enabled) and `meta.json` into `dir`.
/// Returns the paths written.
pub fn write_run_outputs(dir: &Path, out: &RunOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let p = dir.join("diagnostics.csv");
    write_diagnostics(&p, out)?;
    written.push(p);
    for snap in &out.snapshots {
        let label = time_label(snap.t);
        let p = dir.join(format!("curve_t{label}.csv"));
        write_curve(&p, snap)?;
        written.push(p);
        if out.config.write_obj {
            let p = dir.join(format!("surface_t{label}.obj"));
            fs::write(&p, surface_obj(&snap.curve, out.config.obj_azimuthal_segments)?)?;
            written.push(p);
        }
    }
    let p = dir.join("meta.json");
    fs::write(&p, serde_json::to_string_pretty(&Meta::from_output(out))?)?;
    written.push(p);
    Ok(written)
}

#[derive(Debug, Deserialize)]
struct CurveRow {
    r: f64,
    z: f64,
}

/// Reads the `r`, `z` columns of a curve CSV. The curve is taken to be open
/// when its first and last nodes lie on the axis, periodic otherwise.
pub fn read_curve_csv(path: &Path) -> Result<PolygonalCurve> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut nodes = Vec::new();
    for row in rdr.deserialize::<CurveRow>() {
        let row = row?;
        nodes.push(Vec2::new(row.r, row.z));
    }
    let topology = match (nodes.first(), nodes.last()) {
        (Some(a), Some(b)) if nodes.len() > 1 && a.x == 0.0 && b.x == 0.0 => Topology::Open,
        _ => Topology::Periodic,
    };
    PolygonalCurve::new(topology, nodes)
}

/// Surface of revolution of `curve` about the `z` axis as a Wavefront OBJ
/// string, with `(r cos phi, z, r sin phi)` coordinates. Axis nodes of open
/// curves become poles.
pub fn surface_obj(curve: &PolygonalCurve, segments: usize) -> Result<String> {
    if segments < 3 {
        return Err(Error::Domain(format!("need at least 3 segments, got {segments}")));
    }
    let nodes = curve.nodes();
    let n = nodes.len();
    let mut s = String::new();
    let _ = writeln!(s, "# surface of revolution: {} profile nodes, {segments} segments", n);
    // 1-based OBJ vertex index per (profile node, segment)
    let mut index = vec![0usize; n];
    let mut next = 1;
    for (i, p) in nodes.iter().enumerate() {
        index[i] = next;
        if curve.is_boundary_node(i) {
            let _ = writeln!(s, "v 0 {} 0", fmt_f64(p.y));
            next += 1;
        } else {
            for k in 0..segments {
                let phi = 2.0 * PI * k as f64 / segments as f64;
                let _ = writeln!(
                    s,
                    "v {} {} {}",
                    fmt_f64(p.x * phi.cos()),
                    fmt_f64(p.y),
                    fmt_f64(p.x * phi.sin())
                );
            }
            next += segments;
        }
    }
    let vid = |i: usize, k: usize| {
        if curve.is_boundary_node(i) {
            index[i]
        } else {
            index[i] + k % segments
        }
    };
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        for k in 0..segments {
            let (a0, a1, b0, b1) = (vid(a, k), vid(a, k + 1), vid(b, k), vid(b, k + 1));
            if curve.is_boundary_node(a) {
                let _ = writeln!(s, "f {a0} {b1} {b0}");
            } else if curve.is_boundary_node(b) {
                let _ = writeln!(s, "f {a0} {a1} {b0}");
            } else {
                let _ = writeln!(s, "f {a0} {a1} {b1} {b0}");
            }
        }
    }
    Ok(s)
}

pub fn export_surface_obj(curve: &PolygonalCurve, segments: usize, path: &Path) -> Result<()> {
    fs::write(path, surface_obj(curve, segments)?)?;
    Ok(())
}
