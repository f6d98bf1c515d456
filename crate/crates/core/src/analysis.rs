//! Exact solutions, error norms, manifold distance and convergence studies.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{PolygonalCurve, ShapeSpec, Topology, Vec2};
use crate::schemes::{SchemeKind, SchemeState, StepReport};
use crate::simulation::{run_with_observer, RunConfig, Termination};

/// Sphere of radius `r(t)` evolving under the flow with spontaneous curvature `kbar`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereExact {
    pub kbar: f64,
    pub r0: f64,
}

impl SphereExact {
    pub fn new(kbar: f64, r0: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite() && kbar.is_finite()) {
            return Err(Error::Domain(format!("invalid sphere parameters kbar={kbar}, r0={r0}")));
        }
        Ok(Self { kbar, r0 })
    }

    pub fn z0(&self) -> f64 {
        self.r0 + 2.0 / self.kbar
    }

    /// `F(z) = (z^2 - z0^2)/2 - 4 (z - z0)/kbar + 4 ln(z / z0)/kbar^2 + kbar^2 t`.
    pub fn implicit_residual(&self, z: f64, t: f64) -> f64 {
        let (k, z0) = (self.kbar, self.z0());
        0.5 * (z * z - z0 * z0) - 4.0 / k * (z - z0) + 4.0 / (k * k) * (z / z0).ln() + k * k * t
    }

    pub fn radius(&self, t: f64) -> Result<f64> {
        sphere_radius(t, self)
    }

    pub fn varkappa(&self, t: f64) -> Result<f64> {
        Ok(-2.0 / self.radius(t)?)
    }

    /// `2 pi (2 + kbar r)^2`, i.e. `2 pi (2 - r)^2` for `kbar = -1`.
    pub fn energy(&self, t: f64) -> Result<f64> {
        let r = self.radius(t)?;
        Ok(2.0 * PI * (2.0 + self.kbar * r).powi(2))
    }
}

/// Radius of the exact sphere at time `t`, by safeguarded Newton on the implicit relation for `z`.
pub fn sphere_radius(t: f64, p: &SphereExact) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    let k = p.kbar;
    if k == 0.0 || t == 0.0 || (p.r0 + 2.0 / k).abs() <= f64::EPSILON * p.r0 {
        return Ok(p.r0);
    }
    let z0 = p.z0();
    // z moves from z0 towards 0 (fixed point r = -2/kbar) or, for kbar > 0,
    // towards 2/kbar where the sphere has shrunk to a point.
    let end = if k < 0.0 { 0.0 } else { 2.0 / k };
    let f = |z: f64| p.implicit_residual(z, t);
    let df = |z: f64| (k * z - 2.0).powi(2) / (k * k * z);
    // f(z0) = kbar^2 t > 0 and f decreases monotonically towards `end`
    let (mut a, mut b) = (z0, end);
    if end != 0.0 && f(end) >= 0.0 {
        return Err(Error::Domain(format!(
            "no root for t = {t}: the sphere collapses before that time"
        )));
    }
    let mut z = 0.5 * (a + b);
    for _ in 0..400 {
        let fz = f(z);
        if fz.abs() <= 1e-13 {
            break;
        }
        if fz > 0.0 {
            a = z;
        } else {
            b = z;
        }
        let newton = z - fz / df(z);
        z = if newton > a.min(b) && newton < a.max(b) {
            newton
        } else {
            0.5 * (a + b)
        };
        if (b - a).abs() <= 4.0 * f64::EPSILON * z.abs() {
            break;
        }
    }
    Ok(z - 2.0 / k)
}

/// Sup-in-time errors of position, mean curvature and energy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorTriple {
    pub x_err: f64,
    pub varkappa_err: f64,
    pub energy_err: f64,
}

/// Node indices `1..=J` of the parameter grid.
fn error_nodes(curve: &PolygonalCurve) -> impl Iterator<Item = usize> + '_ {
    let n = curve.num_nodes();
    match curve.topology() {
        Topology::Open => 1..n,
        Topology::Periodic => 0..n,
    }
}

/// Accumulates the sphere errors over the steps of a run.
#[derive(Clone, Debug)]
pub struct SphereErrorTracker {
    pub exact: SphereExact,
    pub errors: ErrorTriple,
}

impl SphereErrorTracker {
    pub fn new(exact: SphereExact) -> Self {
        Self {
            exact,
            errors: ErrorTriple::default(),
        }
    }

    /// `energy` is the scheme's reported energy at `state.t`.
    pub fn observe(&mut self, state: &SchemeState, energy: f64) -> Result<()> {
        let r = self.exact.radius(state.t)?;
        let e = &mut self.errors;
        for j in error_nodes(&state.x) {
            e.x_err = e.x_err.max((state.x.nodes()[j].norm() - r).abs());
            e.varkappa_err = e.varkappa_err.max((state.varkappa[j] + 2.0 / r).abs());
        }
        e.energy_err = e.energy_err.max((energy - self.exact.energy(state.t)?).abs());
        Ok(())
    }
}

/// Area of the symmetric difference between the region enclosed by the closed
/// polygon `poly` and the disc of radius `radius` about `center`.
///
/// `poly` must be star-shaped with respect to `center`.
pub fn manifold_distance(poly: &PolygonalCurve, center: [f64; 2], radius: f64) -> Result<f64> {
    if poly.topology() != Topology::Periodic {
        return Err(Error::Domain("manifold distance needs a closed curve".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    let c = Vec2::new(center[0], center[1]);
    let rel: Vec<Vec2> = poly.nodes().iter().map(|p| p - c).collect();
    let n = rel.len();
    let cross = |a: &Vec2, b: &Vec2| a.x * b.y - a.y * b.x;
    let mut sign = 0.0;
    let mut winding = 0.0;
    for i in 0..n {
        let (p, q) = (&rel[i], &rel[(i + 1) % n]);
        let cr = cross(p, q);
        if cr == 0.0 || (sign != 0.0 && cr.signum() != sign) {
            return Err(Error::Domain(format!("curve is not star-shaped about the centre (edge {i})")));
        }
        sign = cr.signum();
        winding += cr.atan2(p.dot(q));
    }
    if (winding.abs() - 2.0 * PI).abs() > 1e-8 {
        return Err(Error::Domain("curve does not wind once around the centre".into()));
    }
    let rho2 = radius * radius;
    let mut total = 0.0;
    for i in 0..n {
        let p = rel[i];
        let d = rel[(i + 1) % n] - p;
        // |p + s d|^2 = rho^2
        let (a, b, cc) = (d.dot(&d), 2.0 * p.dot(&d), p.dot(&p) - rho2);
        let disc = b * b - 4.0 * a * cc;
        let mut cuts = vec![0.0];
        if disc > 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (b + b.signum() * sq);
            let mut roots = [q / a, if q != 0.0 { cc / q } else { -b / (2.0 * a) }];
            roots.sort_by(|x, y| x.total_cmp(y));
            cuts.extend(roots.into_iter().filter(|&s| s > 0.0 && s < 1.0));
        }
        cuts.push(1.0);
        for w in cuts.windows(2) {
            let (u, v) = (p + w[0] * d, p + w[1] * d);
            let tri = 0.5 * cross(&u, &v).abs();
            let sector = 0.5 * rho2 * cross(&u, &v).atan2(u.dot(&v)).abs();
            total += (tri - sector).abs();
        }
    }
    Ok(total)
}

/// Experimental orders of convergence `ln(e_{k-1}/e_k) / ln(h_{k-1}/h_k)`;
/// `None` where an error vanishes.
pub fn eoc(errors: &[f64], h: &[f64]) -> Result<Vec<Option<f64>>> {
    if errors.len() != h.len() || errors.len() < 2 {
        return Err(Error::Domain("eoc needs two or more matching errors and mesh sizes".into()));
    }
    if h.windows(2).any(|w| !(w[1] < w[0]) || !(w[1] > 0.0)) {
        return Err(Error::Domain("mesh sizes must be positive and strictly decreasing".into()));
    }
    if errors.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::Domain("errors must be non-negative".into()));
    }
    Ok(errors
        .windows(2)
        .zip(h.windows(2))
        .map(|(e, h)| {
            (e[0] > 0.0 && e[1] > 0.0).then(|| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    SphereLinear,
    SphereNonlinear,
    #[serde(alias = "clifford-torus")]
    Torus,
}

impl StudyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::SphereLinear => "sphere-linear",
            StudyKind::SphereNonlinear => "sphere-nonlinear",
            StudyKind::Torus => "torus",
        }
    }

    pub fn columns(&self) -> [&'static str; 3] {
        match self {
            StudyKind::Torus => ["x_inf", "manifold_distance", "energy"],
            _ => ["x_inf", "varkappa_inf", "energy"],
        }
    }

    fn scheme(&self) -> SchemeKind {
        match self {
            StudyKind::SphereNonlinear => SchemeKind::Nonlinear,
            _ => SchemeKind::Linear,
        }
    }
}

impl std::str::FromStr for StudyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere-linear" => Ok(StudyKind::SphereLinear),
            "sphere-nonlinear" => Ok(StudyKind::SphereNonlinear),
            "torus" | "clifford-torus" => Ok(StudyKind::Torus),
            _ => Err(Error::config(
                "kind",
                format!("unknown study `{s}`; expected sphere-linear, sphere-nonlinear or torus"),
            )),
        }
    }
}

pub const STUDY_J0: usize = 32;
pub const STUDY_DT0: f64 = 0.04;
pub const STUDY_T: f64 = 1.0;
pub const STUDY_EPS: f64 = 0.1;
pub const MAX_STUDY_LEVELS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub level: usize,
    #[serde(rename = "J")]
    pub j: usize,
    pub h: f64,
    pub dt: f64,
    pub errors: [f64; 3],
    /// Largest number of Picard sweeps in any step.
    pub max_picard_iters: usize,
    /// Largest relative residual of any linear solve.
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub kind: StudyKind,
    pub rows: Vec<StudyRow>,
}

impl StudyTable {
    /// EOC per column between consecutive rows.
    pub fn eoc(&self) -> Vec<[Option<f64>; 3]> {
        if self.rows.len() < 2 {
            return Vec::new();
        }
        let h: Vec<f64> = self.rows.iter().map(|r| r.h).collect();
        let cols: Vec<Vec<Option<f64>>> = (0..3)
            .map(|c| {
                let e: Vec<f64> = self.rows.iter().map(|r| r.errors[c]).collect();
                eoc(&e, &h).unwrap_or_else(|_| vec![None; h.len() - 1])
            })
            .collect();
        (0..h.len() - 1).map(|k| [cols[0][k], cols[1][k], cols[2][k]]).collect()
    }

    pub fn to_csv(&self) -> String {
        let cols = self.kind.columns();
        let mut s = format!(
            "level,J,dt,{},eoc_{},{},eoc_{},{},eoc_{}\n",
            cols[0], cols[0], cols[1], cols[1], cols[2], cols[2]
        );
        let eocs = self.eoc();
        for (k, r) in self.rows.iter().enumerate() {
            let _ = write!(s, "{},{},{}", r.level, r.j, crate::io::fmt_f64(r.dt));
            for c in 0..3 {
                let e = if k == 0 { None } else { eocs[k - 1][c] };
                let _ = write!(
                    s,
                    ",{},{}",
                    crate::io::fmt_f64(r.errors[c]),
                    e.map(crate::io::fmt_f64).unwrap_or_default()
                );
            }
            s.push('\n');
        }
        s
    }

    pub fn to_text(&self) -> String {
        let cols = self.kind.columns();
        let mut s = format!(
            "{:<16} {:>10} {:>6} {:>16} {:>6} {:>16} {:>6}\n",
            "(h, dt)", cols[0], "EOC", cols[1], "EOC", cols[2], "EOC"
        );
        let eocs = self.eoc();
        for (k, r) in self.rows.iter().enumerate() {
            let label = format!("(1/{}, {:.3e})", r.j, r.dt);
            let _ = write!(s, "{label:<16}");
            for c in 0..3 {
                let e = if k == 0 { None } else { eocs[k - 1][c] };
                let width = if c == 0 { 10 } else { 16 };
                let _ = write!(
                    s,
                    " {:>width$} {:>6}",
                    format!("{:.2e}", r.errors[c]),
                    e.map_or("--".to_string(), |v| format!("{v:.2}"))
                );
            }
            s.push('\n');
        }
        s
    }
}

/// Run configuration of level `level` of a study: `J = 32 * 2^level`, `dt = 0.04 / 4^level`.
pub fn study_config(kind: StudyKind, level: usize) -> RunConfig {
    let j = STUDY_J0 << level;
    let dt = STUDY_DT0 / 4f64.powi(level as i32);
    let (shape, kbar) = match kind {
        StudyKind::Torus => (
            ShapeSpec::TorusCircle {
                major: SQRT_2,
                minor: 1.0,
            },
            0.0,
        ),
        _ => (ShapeSpec::Semicircle { radius: 1.0 }, -1.0),
    };
    let mut cfg = RunConfig::new(shape, kbar, j, dt, STUDY_T, kind.scheme());
    cfg.eps = STUDY_EPS;
    cfg
}

fn failure(t: &Termination) -> Option<Error> {
    match t {
        Termination::Completed { .. } => None,
        other => Some(Error::Domain(format!("study run ended early: {other:?}"))),
    }
}

/// Runs one level of a study and returns its row.
pub fn study_level(kind: StudyKind, level: usize, cfg: &RunConfig) -> Result<StudyRow> {
    let mut max_picard = 0;
    let mut max_residual: f64 = 0.0;
    let mut obs_err: Option<Error> = None;
    let errors = match kind {
        StudyKind::SphereLinear | StudyKind::SphereNonlinear => {
            let mut tracker = SphereErrorTracker::new(SphereExact::new(cfg.kbar, 1.0)?);
            let out = run_with_observer(cfg, |s: &SchemeState, r: &StepReport| {
                max_picard = max_picard.max(r.picard_iters);
                max_residual = max_residual.max(r.residual);
                if let Err(e) = tracker.observe(s, r.energy) {
                    obs_err.get_or_insert(e);
                }
            })?;
            if let Some(e) = obs_err.or_else(|| failure(&out.termination)) {
                return Err(e);
            }
            let e = tracker.errors;
            [e.x_err, e.varkappa_err, e.energy_err]
        }
        StudyKind::Torus => {
            let c = Vec2::new(SQRT_2, 0.0);
            let exact_energy = 4.0 * PI * PI;
            let (mut x_err, mut e_err) = (0.0_f64, 0.0_f64);
            let out = run_with_observer(cfg, |s: &SchemeState, r: &StepReport| {
                max_picard = max_picard.max(r.picard_iters);
                max_residual = max_residual.max(r.residual);
                for j in error_nodes(&s.x) {
                    x_err = x_err.max(((s.x.nodes()[j] - c).norm() - 1.0).abs());
                }
                e_err = e_err.max((r.energy - exact_energy).abs());
            })?;
            if let Some(e) = failure(&out.termination) {
                return Err(e);
            }
            let md = manifold_distance(&out.final_state.x, [c.x, c.y], 1.0)?;
            [x_err, md, e_err]
        }
    };
    Ok(StudyRow {
        level,
        j: cfg.j,
        h: 1.0 / cfg.j as f64,
        dt: cfg.dt,
        errors,
        max_picard_iters: max_picard,
        max_residual,
    })
}

/// Thread cap for studies: `WILFLOW_THREADS` when set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("WILFLOW_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs levels `0..levels` (in parallel, at most `WILFLOW_THREADS` at a time).
pub fn convergence_study(kind: StudyKind, levels: usize) -> Result<StudyTable> {
    if levels == 0 || levels > MAX_STUDY_LEVELS {
        return Err(Error::config(
            "levels",
            format!("must be between 1 and {MAX_STUDY_LEVELS}, got {levels}"),
        ));
    }
    let threads = thread_cap()
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .min(levels);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(e.to_string()))?;
    let rows: Result<Vec<StudyRow>> = pool.install(|| {
        (0..levels)
            .into_par_iter()
            .map(|k| study_level(kind, k, &study_config(kind, k)))
            .collect()
    });
    Ok(StudyTable { kind, rows: rows? })
}
