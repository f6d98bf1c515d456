//! The linear and the nonlinear energy-stable time-stepping schemes.

use serde::{Deserialize, Serialize};

use crate::assembly::{
    discrete_energy, dissipation, solve_curvature, solve_position, sqrt_jm, CurvatureInput,
    TimeTerm,
};
use crate::error::{Error, Result};
use crate::field::NodalField;
use crate::init::InitialData;
use crate::mesh::{element_frames, PolygonalCurve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Linear,
    Nonlinear,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Linear => "linear",
            SchemeKind::Nonlinear => "nonlinear",
        }
    }
}

/// Discrete state after `step` time steps.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeState {
    pub x: PolygonalCurve,
    /// Curve of the previous step; equal to `x` in the initial state.
    pub x_prev: PolygonalCurve,
    pub kappa: NodalField,
    pub varkappa: NodalField,
    pub t: f64,
    pub step: usize,
}

impl SchemeState {
    pub fn initial(data: &InitialData) -> Self {
        Self {
            x: data.curve.clone(),
            x_prev: data.curve.clone(),
            kappa: data.kappa.clone(),
            varkappa: data.varkappa.clone(),
            t: 0.0,
            step: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub velocity: NodalField,
    /// Energy the scheme is stable in: `E(X^m, varkappa^{m+1})` for the linear
    /// scheme, `E(X^{m+1}, varkappa^{m+1})` for the nonlinear one.
    pub energy: f64,
    /// The same functional one step earlier.
    pub energy_before: f64,
    /// `E(X^{m+1}, varkappa^{m+1})` for either scheme.
    pub energy_new: f64,
    /// `2 pi dt (r V^2, |X_rho|)` on the curve the scheme integrates over.
    pub dissipation: f64,
    pub picard_iters: usize,
    /// Largest relative residual of the linear solves in this step.
    pub residual: f64,
}

impl StepReport {
    /// `energy + dissipation - energy_before`; non-positive up to round-off.
    pub fn stability_defect(&self) -> f64 {
        self.energy + self.dissipation - self.energy_before
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 100,
        }
    }
}

fn well_posed(system: &'static str, step: usize) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Singular { .. } | Error::DegenerateMesh { .. } => Error::WellPosedness {
            system,
            step,
            detail: e.to_string(),
        },
        other => other,
    }
}

/// One step of the linear scheme: `(V^{m+1}, varkappa^{m+1})` from the
/// curvature system, then `(X^{m+1}, kappa^{m+1})` from the position system.
pub fn step_linear(state: &SchemeState, kbar: f64, dt: f64) -> Result<(SchemeState, StepReport)> {
    let next = state.step + 1;
    let frames = element_frames(&state.x).map_err(well_posed("curvature", next))?;
    let sqrt_j = sqrt_jm(&state.x, &state.x_prev).map_err(well_posed("curvature", next))?;
    let (v, varkappa, res1) = solve_curvature(&CurvatureInput {
        xm: &state.x,
        frames: &frames,
        kappa: &state.kappa,
        varkappa: &state.varkappa,
        kbar,
        dt,
        time: TimeTerm::Linear {
            sqrt_j: &sqrt_j,
            xm_prev: &state.x_prev,
        },
    })
    .map_err(well_posed("curvature", next))?;
    let (x, kappa, res2) =
        solve_position(&state.x, &frames, Some(&v), dt).map_err(well_posed("position", next))?;

    let report = StepReport {
        energy: discrete_energy(&state.x, &varkappa, kbar),
        energy_before: discrete_energy(&state.x_prev, &state.varkappa, kbar),
        energy_new: discrete_energy(&x, &varkappa, kbar),
        dissipation: dissipation(&state.x, &v, dt),
        picard_iters: 0,
        residual: res1.max(res2),
        velocity: v,
    };
    let new = SchemeState {
        x_prev: state.x.clone(),
        x,
        kappa,
        varkappa,
        t: state.t + dt,
        step: next,
    };
    Ok((new, report))
}

/// One step of the nonlinear scheme, solved by Picard iteration started from
/// `X^m`. Converged once two successive sweeps differ by at most `opts.tol` in
/// the maximum norm of `X` and `varkappa`.
pub fn step_nonlinear(
    state: &SchemeState,
    kbar: f64,
    dt: f64,
    opts: &PicardOptions,
) -> Result<(SchemeState, StepReport)> {
    let next = state.step + 1;
    let frames = element_frames(&state.x).map_err(well_posed("curvature", next))?;
    let mut iterate = state.x.clone();
    let mut varkappa_it = state.varkappa.clone();
    let mut update = f64::INFINITY;
    let mut residual: f64 = 0.0;
    for sweep in 1..=opts.max_iters {
        let (v, varkappa, res1) = solve_curvature(&CurvatureInput {
            xm: &state.x,
            frames: &frames,
            kappa: &state.kappa,
            varkappa: &state.varkappa,
            kbar,
            dt,
            time: TimeTerm::Picard { iterate: &iterate },
        })
        .map_err(well_posed("curvature", next))?;
        let (x, kappa, res2) = solve_position(&state.x, &frames, Some(&v), dt)
            .map_err(well_posed("position", next))?;
        residual = residual.max(res1).max(res2);

        let dx = x
            .nodes()
            .iter()
            .zip(iterate.nodes())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs().max()));
        update = dx.max(varkappa.max_abs_diff(&varkappa_it));
        if !update.is_finite() {
            break;
        }
        if sweep > 1 && update <= opts.tol {
            let report = StepReport {
                energy: discrete_energy(&x, &varkappa, kbar),
                energy_before: discrete_energy(&state.x, &state.varkappa, kbar),
                energy_new: discrete_energy(&x, &varkappa, kbar),
                dissipation: dissipation(&state.x, &v, dt),
                picard_iters: sweep,
                residual,
                velocity: v,
            };
            let new = SchemeState {
                x_prev: state.x.clone(),
                x,
                kappa,
                varkappa,
                t: state.t + dt,
                step: next,
            };
            return Ok((new, report));
        }
        iterate = x;
        varkappa_it = varkappa;
    }
    Err(Error::PicardDivergence {
        iterations: opts.max_iters,
        update,
    })
}

pub fn step(
    kind: SchemeKind,
    state: &SchemeState,
    kbar: f64,
    dt: f64,
    picard: &PicardOptions,
) -> Result<(SchemeState, StepReport)> {
    match kind {
        SchemeKind::Linear => step_linear(state, kbar, dt),
        SchemeKind::Nonlinear => step_nonlinear(state, kbar, dt, picard),
    }
}
