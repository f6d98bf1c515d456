//! Driving a run: configuration, the time loop, diagnostics and snapshots.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::NodalField;
use crate::init::InitialData;
use crate::mesh::{
    build_curve, mesh_ratio, shape_stats, validate_state, PolygonalCurve, ShapeSpec, ShapeStats,
    StateCheck, Thresholds, Topology,
};
use crate::schemes::{step, PicardOptions, SchemeKind, SchemeState, StepReport};

fn default_picard_tol() -> f64 {
    1e-10
}

fn default_picard_max() -> usize {
    100
}

fn default_obj_segments() -> usize {
    64
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

fn is_false(v: &bool) -> bool {
    !*v
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the shape when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<Topology>,
    pub shape: ShapeSpec,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub eps: f64,
    pub kbar: f64,
    #[serde(rename = "J")]
    pub j: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub scheme: SchemeKind,
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_picard_max")]
    pub picard_max: usize,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Overrides the defaults derived from the initial curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
    #[serde(default = "default_obj_segments")]
    pub obj_azimuthal_segments: usize,
    /// Also write a revolved surface mesh next to every curve snapshot.
    #[serde(default, skip_serializing_if = "is_false")]
    pub write_obj: bool,
}

impl RunConfig {
    pub fn new(shape: ShapeSpec, kbar: f64, j: usize, dt: f64, t_end: f64, scheme: SchemeKind) -> Self {
        Self {
            topology: None,
            shape,
            eps: 0.0,
            kbar,
            j,
            dt,
            t_end,
            scheme,
            picard_tol: default_picard_tol(),
            picard_max: default_picard_max(),
            snapshot_times: Vec::new(),
            output_dir: None,
            thresholds: None,
            obj_azimuthal_segments: default_obj_segments(),
            write_obj: false,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::config("<json>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<path>", format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("dt", self.dt)?;
        positive("T", self.t_end)?;
        positive("picard_tol", self.picard_tol)?;
        if !self.kbar.is_finite() {
            return Err(Error::config("kbar", "must be finite"));
        }
        if self.j < 4 {
            return Err(Error::config("J", format!("must be at least 4, got {}", self.j)));
        }
        if self.picard_max == 0 {
            return Err(Error::config("picard_max", "must be at least 1"));
        }
        if self.obj_azimuthal_segments < 3 {
            return Err(Error::config("obj_azimuthal_segments", "must be at least 3"));
        }
        if !(self.eps.abs() < 1.0) {
            return Err(Error::config("eps", "must satisfy |eps| < 1"));
        }
        if let Some(topo) = self.topology {
            if topo != self.shape.topology() {
                return Err(Error::config(
                    "topology",
                    format!("{topo:?} does not match the shape's {:?}", self.shape.topology()),
                ));
            }
        }
        for &t in &self.snapshot_times {
            if !(0.0..=self.t_end).contains(&t) {
                return Err(Error::config("snapshot_times", format!("{t} is outside [0, T]")));
            }
        }
        if let Some(th) = &self.thresholds {
            if !(th.r_min >= 0.0 && th.len_min >= 0.0) {
                return Err(Error::config("thresholds", "must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn num_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn picard(&self) -> PicardOptions {
        PicardOptions {
            tol: self.picard_tol,
            max_iters: self.picard_max,
        }
    }

    pub fn initial_curve(&self) -> Result<PolygonalCurve> {
        self.validate()?;
        build_curve(&self.shape, self.j, self.eps).map_err(|e| match e {
            Error::InvalidShape(m) => Error::config("shape", m),
            other => other,
        })
    }
}

/// One row of `diagnostics.csv`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub mesh_ratio: f64,
    pub min_r: f64,
    #[serde(rename = "max_V")]
    pub max_v: f64,
    pub picard_iters: usize,
    pub residual: f64,
}

/// Largest discrete velocity quantities seen during a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VelocityBounds {
    /// `max |(X^{m+1} - X^m)_s| / dt` over elements.
    pub max_vertex_velocity_s: f64,
    /// `max |(X^{m+1} - X^m) . e1| / (dt X^m . e1)` over nodes off the axis.
    pub max_radial_rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub curve: PolygonalCurve,
    pub varkappa: NodalField,
    pub kappa: NodalField,
    pub velocity: NodalField,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    Completed { t: f64, step: usize },
    PinchOff { t: f64, step: usize, node: usize, r: f64 },
    Degenerate { t: f64, step: usize, element: usize, length: f64 },
    /// A step could not be computed; `kind` names the error.
    Failed { t: f64, step: usize, kind: String, message: String },
}

impl Termination {
    pub fn t(&self) -> f64 {
        match *self {
            Termination::Completed { t, .. }
            | Termination::PinchOff { t, .. }
            | Termination::Degenerate { t, .. }
            | Termination::Failed { t, .. } => t,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Termination::Failed { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub config: RunConfig,
    pub thresholds: Thresholds,
    pub initial_energy: f64,
    pub diagnostics: Vec<DiagnosticRow>,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    pub final_stats: ShapeStats,
    pub final_state: SchemeState,
    pub velocity_bounds: VelocityBounds,
}

impl RunOutput {
    pub fn final_energy(&self) -> f64 {
        self.diagnostics.last().map_or(self.initial_energy, |d| d.energy)
    }
}

fn diagnostic_row(state: &SchemeState, energy: f64, report: Option<&StepReport>, residual: f64) -> DiagnosticRow {
    DiagnosticRow {
        step: state.step,
        t: state.t,
        energy,
        mesh_ratio: mesh_ratio(&state.x).unwrap_or(f64::INFINITY),
        min_r: state.x.min_interior_r(),
        max_v: report.map_or(0.0, |r| r.velocity.max_abs()),
        picard_iters: report.map_or(0, |r| r.picard_iters),
        residual,
    }
}

fn update_bounds(bounds: &mut VelocityBounds, old: &PolygonalCurve, new: &PolygonalCurve, dt: f64) {
    let d: Vec<_> = old.nodes().iter().zip(new.nodes()).map(|(a, b)| (b - a) / dt).collect();
    for e in 0..old.num_elements() {
        let (a, b) = old.element_nodes(e);
        let len = old.segment(e).norm();
        bounds.max_vertex_velocity_s = bounds.max_vertex_velocity_s.max((d[b] - d[a]).norm() / len);
    }
    for (i, p) in old.nodes().iter().enumerate() {
        if !old.is_boundary_node(i) {
            bounds.max_radial_rate = bounds.max_radial_rate.max(d[i].x.abs() / p.x);
        }
    }
}

fn snapshot(state: &SchemeState, velocity: NodalField) -> Snapshot {
    Snapshot {
        step: state.step,
        t: state.t,
        curve: state.x.clone(),
        varkappa: state.varkappa.clone(),
        kappa: state.kappa.clone(),
        velocity,
    }
}

pub fn run_simulation(config: &RunConfig) -> Result<RunOutput> {
    run_with_observer(config, |_, _| {})
}

/// Runs the configured flow, calling `observer` with the new state and the
/// step report after every accepted step.
///
/// Errors are returned only for invalid configurations and initial data;
/// failures during time stepping end the run with [`Termination::Failed`].
pub fn run_with_observer(
    config: &RunConfig,
    mut observer: impl FnMut(&SchemeState, &StepReport),
) -> Result<RunOutput> {
    let y = config.initial_curve()?;
    let data = InitialData::from_curve(&y)?;
    let thresholds = config.thresholds.unwrap_or_else(|| Thresholds::for_initial(&y));
    let picard = config.picard();
    let n_steps = config.num_steps();
    let snap_steps: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|t| (t / config.dt).round() as usize)
        .collect();

    let mut state = SchemeState::initial(&data);
    let initial_energy = data.energy(config.kbar);
    let mut diagnostics = vec![diagnostic_row(&state, initial_energy, None, data.residual)];
    let mut snapshots = Vec::new();
    if snap_steps.contains(&0) {
        snapshots.push(snapshot(&state, NodalField::zeros(state.x.num_nodes())));
    }
    let mut bounds = VelocityBounds::default();
    let mut last_velocity = NodalField::zeros(state.x.num_nodes());

    let mut termination = None;
    for m in 0..n_steps {
        let (mut next, report) = match step(config.scheme, &state, config.kbar, config.dt, &picard) {
            Ok(v) => v,
            Err(e) => {
                termination = Some(Termination::Failed {
                    t: state.t,
                    step: state.step,
                    kind: e.kind().into(),
                    message: e.to_string(),
                });
                break;
            }
        };
        next.t = (m + 1) as f64 * config.dt;
        update_bounds(&mut bounds, &state.x, &next.x, config.dt);
        observer(&next, &report);
        diagnostics.push(diagnostic_row(&next, report.energy, Some(&report), report.residual));
        if snap_steps.contains(&next.step) {
            snapshots.push(snapshot(&next, report.velocity.clone()));
        }
        last_velocity = report.velocity;
        state = next;
        match validate_state(&state.x, &thresholds) {
            StateCheck::Ok => {}
            StateCheck::PinchOff { node, r } => {
                termination = Some(Termination::PinchOff {
                    t: state.t,
                    step: state.step,
                    node,
                    r,
                });
                break;
            }
            StateCheck::Degenerate { element, len } => {
                termination = Some(Termination::Degenerate {
                    t: state.t,
                    step: state.step,
                    element,
                    length: len,
                });
                break;
            }
        }
    }
    let termination = termination.unwrap_or(Termination::Completed {
        t: state.t,
        step: state.step,
    });
    if snapshots.last().is_none_or(|s| s.step != state.step) {
        snapshots.push(snapshot(&state, last_velocity));
    }
    Ok(RunOutput {
        config: config.clone(),
        thresholds,
        initial_energy,
        diagnostics,
        snapshots,
        termination,
        final_stats: shape_stats(&state.x),
        final_state: state,
        velocity_bounds: bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc_config() -> RunConfig {
        let mut c = RunConfig::new(
            ShapeSpec::Disc {
                width: 3.0,
                height: 1.0,
            },
            0.0,
            32,
            1e-3,
            0.02,
            SchemeKind::Linear,
        );
        c.snapshot_times = vec![0.0, 0.01];
        c
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut c = disc_config();
        c.topology = Some(Topology::Open);
        c.thresholds = Some(Thresholds {
            r_min: 1e-3,
            len_min: 1e-9,
        });
        let s = serde_json::to_string_pretty(&c).unwrap();
        assert!(s.contains("\"J\": 32") && s.contains("\"T\": 0.02"));
        assert_eq!(RunConfig::from_json_str(&s).unwrap(), c);
    }

    #[test]
    fn invalid_configs_name_the_field() {
        let mut c = disc_config();
        c.dt = 0.0;
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "dt"));
        let mut c = disc_config();
        c.topology = Some(Topology::Periodic);
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "topology"));
        let mut c = disc_config();
        c.snapshot_times = vec![1.0];
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "snapshot_times"));
        let mut c = disc_config();
        c.eps = 0.1;
        assert!(matches!(c.initial_curve(), Err(Error::Config { field, .. }) if field == "shape"));
        assert!(RunConfig::from_json_str("{\"shape\": 1}").is_err());
    }

    #[test]
    fn run_records_every_step_and_snapshots() {
        let out = run_simulation(&disc_config()).unwrap();
        assert_eq!(out.diagnostics.len(), 21);
        assert!(out.diagnostics.windows(2).all(|w| w[1].t > w[0].t));
        for w in out.diagnostics.windows(2) {
            assert!(w[1].energy <= w[0].energy * (1.0 + 1e-9));
        }
        let steps: Vec<usize> = out.snapshots.iter().map(|s| s.step).collect();
        assert_eq!(steps, vec![0, 10, 20]);
        assert!(matches!(out.termination, Termination::Completed { step: 20, .. }));
        assert!((out.final_state.t - 0.02).abs() < 1e-15);
        assert!(out.velocity_bounds.max_radial_rate > 0.0);
    }

    #[test]
    fn picard_failure_ends_the_run() {
        let mut c = disc_config();
        c.scheme = SchemeKind::Nonlinear;
        c.picard_max = 1;
        let out = run_simulation(&c).unwrap();
        assert!(matches!(&out.termination, Termination::Failed { kind, step: 0, .. } if kind == "picard_divergence"));
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.snapshots.last().unwrap().step, 0);
    }

    #[test]
    fn pinch_off_is_a_termination_reason() {
        let mut c = disc_config();
        c.thresholds = Some(Thresholds {
            r_min: 10.0,
            len_min: 0.0,
        });
        let out = run_simulation(&c).unwrap();
        assert!(matches!(out.termination, Termination::PinchOff { step: 1, .. }));
    }
}
