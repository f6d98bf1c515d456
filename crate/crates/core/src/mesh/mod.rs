//! Discrete generating curves and their piecewise-constant geometry.
//!
//! A curve lives in the meridian half-plane `(r, z)` with `r >= 0`. Revolving it
//! about the `z` axis gives the axisymmetric surface. Open curves have both end
//! points on the axis (genus 0), periodic curves are closed polygons away from
//! the axis (genus 1).

mod shapes;

pub use shapes::{build_curve, ShapeSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = nalgebra::Vector2<f64>;

/// Clockwise rotation by a quarter turn: `(v1, v2) -> (v2, -v1)`.
#[inline]
pub fn perp(v: &Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Parameter domain `[0, 1]`, end points attached to the axis.
    Open,
    /// Parameter domain `R / Z`.
    Periodic,
}

/// Polygonal generating curve sampled at the uniform parameter nodes `j / J`.
///
/// Open curves store `J + 1` nodes, periodic curves store `J` nodes and an
/// implicit closing element from the last node back to the first.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalCurve {
    topology: Topology,
    nodes: Vec<Vec2>,
}

impl PolygonalCurve {
    /// Builds a curve and checks every structural invariant: enough nodes, finite
    /// coordinates, attachment to the axis for open curves, positive radius away
    /// from the axis and nonzero segment lengths.
    pub fn new(topology: Topology, nodes: Vec<Vec2>) -> Result<Self> {
        let curve = Self::from_raw(topology, nodes);
        let min_nodes = match topology {
            Topology::Open => 3,
            Topology::Periodic => 3,
        };
        if curve.nodes.len() < min_nodes {
            return Err(Error::InvalidCurve(format!(
                "{} nodes is too few for a {:?} curve",
                curve.nodes.len(),
                topology
            )));
        }
        if curve.nodes.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidCurve("non-finite node coordinate".into()));
        }
        if topology == Topology::Open {
            let last = curve.nodes.len() - 1;
            if curve.nodes[0].x != 0.0 || curve.nodes[last].x != 0.0 {
                return Err(Error::InvalidCurve(
                    "open curves must start and end on the axis (r = 0)".into(),
                ));
            }
        }
        for i in 0..curve.nodes.len() {
            let r = curve.nodes[i].x;
            if curve.is_boundary_node(i) {
                continue;
            }
            if r <= 0.0 {
                return Err(Error::InvalidCurve(format!(
                    "node {i} has nonpositive radius {r:e}"
                )));
            }
        }
        for e in 0..curve.num_elements() {
            let length = curve.segment(e).norm();
            if !(length > 0.0) {
                return Err(Error::DegenerateMesh { element: e, length });
            }
        }
        Ok(curve)
    }

    /// Constructs without validation. Time stepping produces curves this way and
    /// relies on [`validate_state`] to detect pinch-off before the next step.
    pub(crate) fn from_raw(topology: Topology, nodes: Vec<Vec2>) -> Self {
        Self { topology, nodes }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Number of elements `J`.
    pub fn num_elements(&self) -> usize {
        match self.topology {
            Topology::Open => self.nodes.len() - 1,
            Topology::Periodic => self.nodes.len(),
        }
    }

    /// Uniform parameter spacing `h = 1 / J`.
    pub fn h(&self) -> f64 {
        1.0 / self.num_elements() as f64
    }

    /// Start and end node indices of element `e`.
    #[inline]
    pub fn element_nodes(&self, e: usize) -> (usize, usize) {
        (e, (e + 1) % self.nodes.len())
    }

    /// Segment vector `a_{e+1/2}` from the first to the second node of element `e`.
    #[inline]
    pub fn segment(&self, e: usize) -> Vec2 {
        let (a, b) = self.element_nodes(e);
        self.nodes[b] - self.nodes[a]
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.num_elements()).map(|e| self.segment(e).norm()).collect()
    }

    pub fn is_boundary_node(&self, i: usize) -> bool {
        self.topology == Topology::Open && (i == 0 || i + 1 == self.nodes.len())
    }

    /// Elements to the left and right of node `i`, if present.
    pub fn node_elements(&self, i: usize) -> (Option<usize>, Option<usize>) {
        let j = self.num_elements();
        match self.topology {
            Topology::Open => (
                if i > 0 { Some(i - 1) } else { None },
                if i < j { Some(i) } else { None },
            ),
            Topology::Periodic => (Some((i + j - 1) % j), Some(i)),
        }
    }

    pub fn total_length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Signed area enclosed by the curve (closed through the axis for open
    /// curves). Negative for the clockwise traversal used by every built-in shape.
    pub fn signed_area(&self) -> f64 {
        let n = self.nodes.len();
        let mut acc = 0.0;
        for i in 0..n {
            let p = self.nodes[i];
            let q = self.nodes[(i + 1) % n];
            acc += p.x * q.y - q.x * p.y;
        }
        0.5 * acc
    }

    /// Same geometric curve traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Self::from_raw(self.topology, nodes)
    }

    pub fn translated_z(&self, dz: f64) -> Self {
        let nodes = self.nodes.iter().map(|p| Vec2::new(p.x, p.y + dz)).collect();
        Self::from_raw(self.topology, nodes)
    }

    /// Cyclic shift of node labels for periodic curves.
    pub fn rotated_indices(&self, k: usize) -> Self {
        assert_eq!(self.topology, Topology::Periodic, "index rotation needs a periodic curve");
        let mut nodes = self.nodes.clone();
        let len = nodes.len();
        nodes.rotate_left(k % len);
        Self::from_raw(self.topology, nodes)
    }

    /// Flips the traversal direction when needed so that discrete normals point outwards.
    pub fn oriented_outward(self) -> Self {
        if self.signed_area() > 0.0 {
            self.reversed()
        } else {
            self
        }
    }

    /// Smallest radius over nodes off the axis.
    pub fn min_interior_r(&self) -> f64 {
        (0..self.nodes.len())
            .filter(|&i| !self.is_boundary_node(i))
            .map(|i| self.nodes[i].x)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_r(&self) -> f64 {
        self.nodes.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Piecewise-constant geometry of one element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementFrame {
    pub tau: Vec2,
    pub nu: Vec2,
    pub len: f64,
}

/// Unit tangent `tau = a / |a|`, normal `nu = -tau^perp` and length of every element.
pub fn element_frames(curve: &PolygonalCurve) -> Result<Vec<ElementFrame>> {
    (0..curve.num_elements())
        .map(|e| {
            let a = curve.segment(e);
            let len = a.norm();
            if !(len > 0.0) || !len.is_finite() {
                return Err(Error::DegenerateMesh { element: e, length: len });
            }
            let tau = a / len;
            Ok(ElementFrame {
                tau,
                nu: -perp(&tau),
                len,
            })
        })
        .collect()
}

/// Length-weighted vertex normals.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexNormals {
    pub omega: Vec<Vec2>,
    /// `omega` with the radial component removed at axis nodes.
    pub omega_partial: Vec<Vec2>,
}

/// Vertex normals `omega_j = (|a_-| nu_- + |a_+| nu_+) / (|a_-| + |a_+|)`; at axis
/// nodes the normal of the single adjacent element.
pub fn vertex_normals(curve: &PolygonalCurve, frames: &[ElementFrame]) -> VertexNormals {
    let n = curve.num_nodes();
    let mut omega = Vec::with_capacity(n);
    for i in 0..n {
        let w = match curve.node_elements(i) {
            (Some(l), Some(r)) => {
                let (fl, fr) = (&frames[l], &frames[r]);
                (fl.nu * fl.len + fr.nu * fr.len) / (fl.len + fr.len)
            }
            (Some(e), None) | (None, Some(e)) => frames[e].nu,
            (None, None) => unreachable!("every node touches an element"),
        };
        omega.push(w);
    }
    let omega_partial = omega
        .iter()
        .enumerate()
        .map(|(i, w)| {
            if curve.is_boundary_node(i) {
                Vec2::new(0.0, w.y)
            } else {
                *w
            }
        })
        .collect();
    VertexNormals {
        omega,
        omega_partial,
    }
}

/// Ratio of the longest to the shortest segment.
pub fn mesh_ratio(curve: &PolygonalCurve) -> Result<f64> {
    let lengths = curve.segment_lengths();
    let mut min = f64::INFINITY;
    let mut max: f64 = 0.0;
    for (e, &l) in lengths.iter().enumerate() {
        if !(l > 0.0) {
            return Err(Error::DegenerateMesh { element: e, length: l });
        }
        min = min.min(l);
        max = max.max(l);
    }
    Ok(max / min)
}

/// Mean centre, mean radius and circularity of a generating curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeStats {
    pub center: [f64; 2],
    pub mean_radius: f64,
    /// Max over min distance from the centre.
    pub deviation: f64,
    pub mesh_ratio: f64,
}

impl ShapeStats {
    /// `centre_r / mean_radius`, the torus radii ratio for periodic curves.
    pub fn radii_ratio(&self) -> f64 {
        self.center[0] / self.mean_radius
    }
}

pub fn shape_stats(curve: &PolygonalCurve) -> ShapeStats {
    let nodes = curve.nodes();
    let n = nodes.len() as f64;
    let center = nodes.iter().fold(Vec2::zeros(), |acc, p| acc + p) / n;
    let dists: Vec<f64> = nodes.iter().map(|p| (p - center).norm()).collect();
    let mean_radius = dists.iter().sum::<f64>() / n;
    let dmax = dists.iter().cloned().fold(0.0, f64::max);
    let dmin = dists.iter().cloned().fold(f64::INFINITY, f64::min);
    let lengths = curve.segment_lengths();
    let lmax = lengths.iter().cloned().fold(0.0, f64::max);
    let lmin = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    ShapeStats {
        center: [center.x, center.y],
        mean_radius,
        deviation: dmax / dmin,
        mesh_ratio: lmax / lmin,
    }
}

/// Admissibility thresholds for a running simulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub r_min: f64,
    pub len_min: f64,
}

impl Thresholds {
    /// `r_min = 1e-3 * max r`, `len_min = 1e-8 * mean segment length` of the initial curve.
    pub fn for_initial(curve: &PolygonalCurve) -> Self {
        let j = curve.num_elements() as f64;
        Self {
            r_min: 1e-3 * curve.max_r(),
            len_min: 1e-8 * curve.total_length() / j,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateCheck {
    Ok,
    PinchOff { node: usize, r: f64 },
    Degenerate { element: usize, len: f64 },
}

impl StateCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, StateCheck::Ok)
    }
}

/// Checks the admissibility assumptions of a discrete state.
pub fn validate_state(curve: &PolygonalCurve, thresholds: &Thresholds) -> StateCheck {
    for i in 0..curve.num_nodes() {
        if curve.is_boundary_node(i) {
            continue;
        }
        let r = curve.nodes()[i].x;
        if !(r >= thresholds.r_min) {
            return StateCheck::PinchOff { node: i, r };
        }
    }
    for e in 0..curve.num_elements() {
        let len = curve.segment(e).norm();
        if !(len >= thresholds.len_min) {
            return StateCheck::Degenerate { element: e, len };
        }
    }
    StateCheck::Ok
}
