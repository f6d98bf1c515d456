//! Element assembly of the two linear systems solved in every time step.
//!
//! All integrals are written over the reference coordinate `xi in [0, 1]` of an
//! element of length `L`: `|X_rho| d rho = L d xi` and
//! `f_rho g_rho |X_rho|^{-1} d rho = (Df)(Dg) / L d xi`, where `D` is the
//! difference between the element's end values.

use crate::error::{Error, Result};
use crate::field::NodalField;
use crate::mesh::{ElementFrame, PolygonalCurve, Topology, Vec2};
use crate::quadrature::{GAUSS2, GAUSS3};
use crate::solver::BorderedBandMatrix;

const PHI: [fn(f64) -> f64; 2] = [|x| 1.0 - x, |x| x];
const DPHI: [f64; 2] = [-1.0, 1.0];

#[inline]
pub(crate) fn lerp(a: f64, b: f64, x: f64) -> f64 {
    a + (b - a) * x
}

/// Per-element square root of the metric ratio `J^m` at the two Gauss points.
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtJField {
    pub values: Vec<[f64; 2]>,
}

/// `sqrt(J^m)` with `J^m = (r^{m-1} |X^{m-1}_rho|) / (r^m |X^m_rho|)` evaluated at
/// the two-point Gauss nodes of every element.
pub fn sqrt_jm(xm: &PolygonalCurve, xm_prev: &PolygonalCurve) -> Result<SqrtJField> {
    if xm.num_nodes() != xm_prev.num_nodes() || xm.topology() != xm_prev.topology() {
        return Err(Error::InvalidCurve("curves of different shape".into()));
    }
    let mut values = Vec::with_capacity(xm.num_elements());
    for e in 0..xm.num_elements() {
        let (a, b) = xm.element_nodes(e);
        let (len, len_prev) = (xm.segment(e).norm(), xm_prev.segment(e).norm());
        let mut v = [0.0; 2];
        for (q, &(x, _)) in GAUSS2.points.iter().enumerate() {
            let r = lerp(xm.nodes()[a].x, xm.nodes()[b].x, x);
            let r_prev = lerp(xm_prev.nodes()[a].x, xm_prev.nodes()[b].x, x);
            let jm = (r_prev * len_prev) / (r * len);
            if !(jm > 0.0) || !jm.is_finite() {
                return Err(Error::DegenerateMesh { element: e, length: len });
            }
            v[q] = jm.sqrt();
        }
        values.push(v);
    }
    Ok(SqrtJField { values })
}

/// How the time derivative of the mean curvature is discretised.
pub(crate) enum TimeTerm<'a> {
    /// Linear scheme: the `sqrt(J^m)` weighted difference under the two-point
    /// Gauss rule and the convective factor built from `X^m - X^{m-1}`.
    Linear {
        sqrt_j: &'a SqrtJField,
        xm_prev: &'a PolygonalCurve,
    },
    /// Picard sweep of the nonlinear scheme with all new-time geometry lagged
    /// to the current iterate.
    Picard { iterate: &'a PolygonalCurve },
}

pub(crate) struct CurvatureInput<'a> {
    pub xm: &'a PolygonalCurve,
    pub frames: &'a [ElementFrame],
    pub kappa: &'a [f64],
    pub varkappa: &'a [f64],
    pub kbar: f64,
    pub dt: f64,
    pub time: TimeTerm<'a>,
}

/// Solves for the new normal velocity and mean curvature. Returns `(V, varkappa, residual)`.
pub(crate) fn solve_curvature(input: &CurvatureInput) -> Result<(NodalField, NodalField, f64)> {
    let xm = input.xm;
    let n = xm.num_nodes();
    let border = if xm.topology() == Topology::Periodic { 2 } else { 0 };
    let mut sys = BorderedBandMatrix::new(2 * n, 3, 3, border);
    let (kbar, dt) = (input.kbar, input.dt);

    for e in 0..xm.num_elements() {
        let (ia, ib) = xm.element_nodes(e);
        let nodes = [ia, ib];
        let f = &input.frames[e];
        let len = f.len;
        let r_nodes = [xm.nodes()[ia].x, xm.nodes()[ib].x];
        let r_at = |x: f64| lerp(r_nodes[0], r_nodes[1], x);
        let r_mean = 0.5 * (r_nodes[0] + r_nodes[1]);
        let km = [input.kappa[ia], input.kappa[ib]];
        let vkm = [input.varkappa[ia], input.varkappa[ib]];
        // g = 2 nu_1 kappa^m + r (varkappa^m + kbar) varkappa^m / 2
        let g_at = |x: f64| {
            let k = lerp(km[0], km[1], x);
            let vk = lerp(vkm[0], vkm[1], x);
            2.0 * f.nu.x * k + 0.5 * r_at(x) * (vk + kbar) * vk
        };
        // nodal displacement entering the convective factor
        let disp: [Vec2; 2] = match input.time {
            TimeTerm::Linear { xm_prev, .. } => {
                [xm.nodes()[ia] - xm_prev.nodes()[ia], xm.nodes()[ib] - xm_prev.nodes()[ib]]
            }
            TimeTerm::Picard { iterate } => {
                [iterate.nodes()[ia] - xm.nodes()[ia], iterate.nodes()[ib] - xm.nodes()[ib]]
            }
        };
        let d_at = |x: f64| lerp(disp[0].dot(&f.tau), disp[1].dot(&f.tau), x);

        let mut m = [[0.0; 4]; 4];
        let mut rhs = [0.0; 4];
        // local unknown / row layout: [V_a, vk_a, V_b, vk_b]
        for i in 0..2 {
            let (row_a, row_b) = (2 * i, 2 * i + 1);
            for k in 0..2 {
                let (col_v, col_k) = (2 * k, 2 * k + 1);
                let mass_r = len * GAUSS3.integrate(|x| r_at(x) * PHI[k](x) * PHI[i](x));
                let mass_g = len * GAUSS3.integrate(|x| g_at(x) * PHI[k](x) * PHI[i](x));
                let stiff = r_mean * DPHI[k] * DPHI[i] / len;

                m[row_a][col_v] += mass_r;
                m[row_a][col_k] += mass_g - stiff;

                m[row_b][col_v] += dt * (stiff - mass_g);
                let conv = GAUSS3.integrate(|x| {
                    r_at(x) * d_at(x) * (PHI[k](x) * DPHI[i] - DPHI[k] * PHI[i](x))
                });
                m[row_b][col_k] += 0.5 * conv;
            }
            rhs[row_a] += kbar * len * GAUSS3.integrate(|x| g_at(x) * PHI[i](x));
            rhs[row_b] += 0.5 * kbar * DPHI[i] * GAUSS3.integrate(|x| r_at(x) * d_at(x));
        }

        match input.time {
            TimeTerm::Linear { sqrt_j, .. } => {
                let sj = sqrt_j.values[e];
                for i in 0..2 {
                    for k in 0..2 {
                        m[2 * i + 1][2 * k + 1] += len
                            * GAUSS2.integrate(|x| r_at(x) * PHI[k](x) * PHI[i](x));
                    }
                    let mut acc = 0.0;
                    for (q, &(x, w)) in GAUSS2.points.iter().enumerate() {
                        let vk = lerp(vkm[0], vkm[1], x);
                        acc += w * r_at(x) * (kbar + (vk - kbar) * sj[q]) * PHI[i](x);
                    }
                    rhs[2 * i + 1] += len * acc;
                }
            }
            TimeTerm::Picard { iterate } => {
                let it = [iterate.nodes()[ia], iterate.nodes()[ib]];
                let seg_it = it[1] - it[0];
                let len_it = seg_it.norm();
                let c_e = (disp[1] - disp[0]).dot(&seg_it) / len;
                let growth = |x: f64| lerp(disp[0].x, disp[1].x, x) * len_it + r_at(x) * c_e;
                for i in 0..2 {
                    for k in 0..2 {
                        let mass = len * GAUSS3.integrate(|x| r_at(x) * PHI[k](x) * PHI[i](x));
                        let extra = 0.5 * GAUSS3.integrate(|x| growth(x) * PHI[k](x) * PHI[i](x));
                        m[2 * i + 1][2 * k + 1] += mass + extra;
                    }
                    rhs[2 * i + 1] += len
                        * GAUSS3.integrate(|x| r_at(x) * lerp(vkm[0], vkm[1], x) * PHI[i](x));
                    rhs[2 * i + 1] += 0.5 * kbar * GAUSS3.integrate(|x| growth(x) * PHI[i](x));
                }
            }
        }

        for i in 0..2 {
            for a in 0..2 {
                let row = 2 * nodes[i] + a;
                for k in 0..2 {
                    for b in 0..2 {
                        let v = m[2 * i + a][2 * k + b];
                        if v != 0.0 {
                            sys.add(row, 2 * nodes[k] + b, v);
                        }
                    }
                }
                sys.add_rhs(row, rhs[2 * i + a]);
            }
        }
    }

    let sol = sys.solve()?;
    let mut v = Vec::with_capacity(n);
    let mut vk = Vec::with_capacity(n);
    for i in 0..n {
        v.push(sol.x[2 * i]);
        vk.push(sol.x[2 * i + 1]);
    }
    Ok((v.into(), vk.into(), sol.residual))
}

/// Solves the mass-lumped position / curvature system
///
/// `((X - X^m) . nu^m, xi |X^m_rho|)^h = dt (V, xi |X^m_rho|)`,
/// `(kappa nu^m, eta |X^m_rho|)^h + (X_rho, eta_rho |X^m_rho|^{-1}) = 0`,
///
/// with `X . e1 = 0` imposed at axis nodes. `velocity = None` gives the
/// zero-normal-velocity projection. Returns `(X, kappa, residual)`.
pub(crate) fn solve_position(
    xm: &PolygonalCurve,
    frames: &[ElementFrame],
    velocity: Option<&[f64]>,
    dt: f64,
) -> Result<(PolygonalCurve, NodalField, f64)> {
    let n = xm.num_nodes();
    let border = if xm.topology() == Topology::Periodic { 3 } else { 0 };
    let mut sys = BorderedBandMatrix::new(3 * n, 5, 5, border);
    // unknowns per node: [r, z, kappa]; rows: [eta = e1, eta = e2, xi]
    for e in 0..xm.num_elements() {
        let (ia, ib) = xm.element_nodes(e);
        let f = &frames[e];
        let half = 0.5 * f.len;
        let inv = 1.0 / f.len;
        for (i, o) in [(ia, ib), (ib, ia)] {
            for c in 0..2 {
                sys.add(3 * i + c, 3 * i + c, inv);
                sys.add(3 * i + c, 3 * o + c, -inv);
                sys.add(3 * i + c, 3 * i + 2, half * f.nu[c]);
                sys.add(3 * i + 2, 3 * i + c, half * f.nu[c]);
            }
            let mut rhs = half * f.nu.dot(&xm.nodes()[i]);
            if let Some(v) = velocity {
                rhs += dt * f.len * (v[i] / 3.0 + v[o] / 6.0);
            }
            sys.add_rhs(3 * i + 2, rhs);
        }
    }
    if xm.topology() == Topology::Open {
        sys.fix_unknown(0, 0.0);
        sys.fix_unknown(3 * (n - 1), 0.0);
    }
    let sol = sys.solve()?;
    let mut nodes = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    for i in 0..n {
        nodes.push(Vec2::new(sol.x[3 * i], sol.x[3 * i + 1]));
        kappa.push(sol.x[3 * i + 2]);
    }
    if xm.topology() == Topology::Open {
        nodes[0].x = 0.0;
        nodes[n - 1].x = 0.0;
    }
    Ok((PolygonalCurve::from_raw(xm.topology(), nodes), kappa.into(), sol.residual))
}

/// `pi * sum_e L int r (varkappa - kbar)^2 d xi`, exact for the cubic integrand.
pub fn discrete_energy(x: &PolygonalCurve, varkappa: &[f64], kbar: f64) -> f64 {
    let mut acc = 0.0;
    for e in 0..x.num_elements() {
        let (a, b) = x.element_nodes(e);
        let len = x.segment(e).norm();
        let (ra, rb) = (x.nodes()[a].x, x.nodes()[b].x);
        acc += len
            * GAUSS3.integrate(|t| {
                let d = lerp(varkappa[a], varkappa[b], t) - kbar;
                lerp(ra, rb, t) * d * d
            });
    }
    std::f64::consts::PI * acc
}

/// `2 pi dt (r V^2, |X_rho|)` on the curve `x`.
pub fn dissipation(x: &PolygonalCurve, velocity: &[f64], dt: f64) -> f64 {
    let mut acc = 0.0;
    for e in 0..x.num_elements() {
        let (a, b) = x.element_nodes(e);
        let len = x.segment(e).norm();
        let (ra, rb) = (x.nodes()[a].x, x.nodes()[b].x);
        acc += len
            * GAUSS3.integrate(|t| {
                let v = lerp(velocity[a], velocity[b], t);
                lerp(ra, rb, t) * v * v
            });
    }
    2.0 * std::f64::consts::PI * dt * acc
}
