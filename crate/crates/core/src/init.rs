//! Discrete initial data: projection of a sampled curve onto a curve with
//! well-defined vertex curvature, followed by the initial mean curvature.

use crate::assembly::solve_position;
use crate::error::Result;
use crate::field::NodalField;
use crate::mesh::{element_frames, vertex_normals, PolygonalCurve};

pub use crate::assembly::discrete_energy;

/// `X^0`, its curvature `kappa^0` and mean curvature `varkappa^0`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    pub curve: PolygonalCurve,
    pub kappa: NodalField,
    pub varkappa: NodalField,
    /// Relative residual of the projection solve.
    pub residual: f64,
}

impl InitialData {
    pub fn from_curve(y: &PolygonalCurve) -> Result<Self> {
        let (curve, kappa, residual) = bgn_project(y)?;
        let varkappa = initial_mean_curvature(&curve, &kappa)?;
        Ok(Self {
            curve,
            kappa,
            varkappa,
            residual,
        })
    }

    pub fn energy(&self, kbar: f64) -> f64 {
        discrete_energy(&self.curve, &self.varkappa, kbar)
    }
}

/// One step of the curvature system with zero normal velocity started from `y`.
/// Returns `(X^0, kappa^0, residual)`.
pub fn bgn_project(y: &PolygonalCurve) -> Result<(PolygonalCurve, NodalField, f64)> {
    let frames = element_frames(y)?;
    solve_position(y, &frames, None, 0.0)
}

/// `varkappa = 2 kappa` at axis nodes and `kappa - omega_1 / r` elsewhere, with
/// the vertex normals of `x`.
pub fn initial_mean_curvature(x: &PolygonalCurve, kappa: &[f64]) -> Result<NodalField> {
    let frames = element_frames(x)?;
    let omega = vertex_normals(x, &frames).omega;
    Ok((0..x.num_nodes())
        .map(|i| {
            if x.is_boundary_node(i) {
                2.0 * kappa[i]
            } else {
                kappa[i] - omega[i].x / x.nodes()[i].x
            }
        })
        .collect::<Vec<_>>()
        .into())
}
