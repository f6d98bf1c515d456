use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{PolygonalCurve, Topology, Vec2};
use crate::error::{Error, Result};

/// Initial generating curves.
///
/// All shapes are traversed clockwise in the `(r, z)` plane, starting from the
/// top, so that element normals point out of the enclosed region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    /// Half circle of the given radius centred at the origin (a sphere).
    Semicircle { radius: f64 },
    /// Half cross-section of a flat disc: `width` is the full diameter, `height`
    /// the thickness; the rim is a half circle of radius `height / 2`.
    Disc { width: f64, height: f64 },
    /// Capsule of diameter `width` and total height `height` with hemispherical caps.
    RoundedCylinder { width: f64, height: f64 },
    /// Closed stadium ("cigar") of total extent `length` in `r` and `height` in `z`,
    /// barycentre at `center`.
    Stadium {
        length: f64,
        height: f64,
        center: [f64; 2],
    },
    /// Circle of radius `minor` centred at `(major, 0)` (a torus).
    TorusCircle { major: f64, minor: f64 },
}

impl ShapeSpec {
    pub fn topology(&self) -> Topology {
        match self {
            ShapeSpec::Semicircle { .. } | ShapeSpec::Disc { .. } | ShapeSpec::RoundedCylinder { .. } => {
                Topology::Open
            }
            ShapeSpec::Stadium { .. } | ShapeSpec::TorusCircle { .. } => Topology::Periodic,
        }
    }

    fn accepts_perturbation(&self) -> bool {
        matches!(self, ShapeSpec::Semicircle { .. } | ShapeSpec::TorusCircle { .. })
    }
}

/// Samples `shape` at the parameter nodes `rho_j = j / J`.
///
/// `eps` perturbs the angular parameterisation of circles,
/// `theta = theta_0 + eps * cos(theta_0)`, to produce a nonuniform node
/// distribution. Other shapes are sampled uniformly in arclength and require
/// `eps == 0`.
pub fn build_curve(shape: &ShapeSpec, j: usize, eps: f64) -> Result<PolygonalCurve> {
    if j < 4 {
        return Err(Error::InvalidShape(format!("J = {j} is below the minimum of 4")));
    }
    if !eps.is_finite() {
        return Err(Error::InvalidShape("eps must be finite".into()));
    }
    if eps != 0.0 && !shape.accepts_perturbation() {
        return Err(Error::InvalidShape(format!(
            "perturbation eps = {eps} only applies to semicircle and torus_circle shapes"
        )));
    }
    // d theta / d theta_0 = 1 - eps sin(theta_0) must stay positive.
    if eps.abs() >= 1.0 {
        return Err(Error::InvalidShape(format!(
            "eps = {eps} makes the parameterisation non-injective (need |eps| < 1)"
        )));
    }
    let rho = |k: usize| k as f64 / j as f64;
    let perturb = |t0: f64| t0 + eps * t0.cos();

    let curve = match *shape {
        ShapeSpec::Semicircle { radius } => {
            positive("radius", radius)?;
            let mut nodes: Vec<Vec2> = (0..=j)
                .map(|k| {
                    let th = perturb((0.5 - rho(k)) * PI);
                    radius * Vec2::new(th.cos(), th.sin())
                })
                .collect();
            nodes[0] = Vec2::new(0.0, radius);
            nodes[j] = Vec2::new(0.0, -radius);
            PolygonalCurve::new(Topology::Open, nodes)?
        }
        ShapeSpec::TorusCircle { major, minor } => {
            positive("major", major)?;
            positive("minor", minor)?;
            if minor >= major {
                return Err(Error::InvalidShape(format!(
                    "torus circle of radius {minor} around r = {major} reaches the axis"
                )));
            }
            let nodes = (0..j)
                .map(|k| {
                    let th = perturb((0.25 - rho(k)) * 2.0 * PI);
                    Vec2::new(major + minor * th.cos(), minor * th.sin())
                })
                .collect();
            PolygonalCurve::new(Topology::Periodic, nodes)?
        }
        ShapeSpec::Disc { width, height } | ShapeSpec::RoundedCylinder { width, height } => {
            positive("width", width)?;
            positive("height", height)?;
            let path = rounded_profile(0.5 * width, 0.5 * height);
            let mut nodes = path.sample(j, false);
            nodes[0].x = 0.0;
            nodes[j].x = 0.0;
            PolygonalCurve::new(Topology::Open, nodes)?
        }
        ShapeSpec::Stadium {
            length,
            height,
            center,
        } => {
            positive("length", length)?;
            positive("height", height)?;
            if height > length {
                return Err(Error::InvalidShape(format!(
                    "stadium height {height} exceeds its length {length}"
                )));
            }
            if center[0] - 0.5 * length <= 0.0 {
                return Err(Error::InvalidShape("stadium reaches the axis".into()));
            }
            let path = stadium(length, height, Vec2::new(center[0], center[1]));
            PolygonalCurve::new(Topology::Periodic, path.sample(j, true))?
        }
    };
    Ok(curve.oriented_outward())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidShape(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Line { from: Vec2, to: Vec2 },
    /// Clockwise arc from `start` angle to `start - sweep`.
    Arc { center: Vec2, radius: f64, start: f64, sweep: f64 },
}

impl Piece {
    fn length(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => (to - from).norm(),
            Piece::Arc { radius, sweep, .. } => radius * sweep,
        }
    }

    fn point(&self, s: f64) -> Vec2 {
        match *self {
            Piece::Line { from, to } => {
                let len = (to - from).norm();
                from + (to - from) * (s / len)
            }
            Piece::Arc { center, radius, start, .. } => {
                let th = start - s / radius;
                center + radius * Vec2::new(th.cos(), th.sin())
            }
        }
    }
}

struct Path(Vec<Piece>);

impl Path {
    fn new(pieces: Vec<Piece>) -> Self {
        Path(pieces.into_iter().filter(|p| p.length() > 0.0).collect())
    }

    /// Arclength-uniform samples; `J + 1` points for open paths, `J` for closed ones.
    fn sample(&self, j: usize, closed: bool) -> Vec<Vec2> {
        let total: f64 = self.0.iter().map(Piece::length).sum();
        let count = if closed { j } else { j + 1 };
        (0..count)
            .map(|k| {
                let mut s = total * k as f64 / j as f64;
                for (idx, piece) in self.0.iter().enumerate() {
                    let len = piece.length();
                    if s <= len || idx + 1 == self.0.len() {
                        return piece.point(s.min(len));
                    }
                    s -= len;
                }
                unreachable!("path has at least one piece")
            })
            .collect()
    }
}

/// Right half of a rounded rectangle `[0, a] x [-b, b]` whose two right corners
/// are rounded with radius `min(a, b)`, from `(0, b)` to `(0, -b)`.
fn rounded_profile(a: f64, b: f64) -> Path {
    let c = a.min(b);
    let top_right = Vec2::new(a - c, b - c);
    let bottom_right = Vec2::new(a - c, -(b - c));
    Path::new(vec![
        Piece::Line { from: Vec2::new(0.0, b), to: Vec2::new(a - c, b) },
        Piece::Arc { center: top_right, radius: c, start: 0.5 * PI, sweep: 0.5 * PI },
        Piece::Line { from: Vec2::new(a, b - c), to: Vec2::new(a, -(b - c)) },
        Piece::Arc { center: bottom_right, radius: c, start: 0.0, sweep: 0.5 * PI },
        Piece::Line { from: Vec2::new(a - c, -b), to: Vec2::new(0.0, -b) },
    ])
}

/// Closed horizontal stadium, starting at the top midpoint.
fn stadium(length: f64, height: f64, center: Vec2) -> Path {
    let c = 0.5 * height;
    let half = 0.5 * length - c;
    let right = center + Vec2::new(half, 0.0);
    let left = center - Vec2::new(half, 0.0);
    Path::new(vec![
        Piece::Line { from: center + Vec2::new(0.0, c), to: right + Vec2::new(0.0, c) },
        Piece::Arc { center: right, radius: c, start: 0.5 * PI, sweep: PI },
        Piece::Line { from: right - Vec2::new(0.0, c), to: left - Vec2::new(0.0, c) },
        Piece::Arc { center: left, radius: c, start: -0.5 * PI, sweep: PI },
        Piece::Line { from: left + Vec2::new(0.0, c), to: center + Vec2::new(0.0, c) },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{element_frames, mesh_ratio, shape_stats};
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn assert_nodes(curve: &PolygonalCurve, expected: &[(f64, f64)]) {
        assert_eq!(curve.num_nodes(), expected.len());
        for (p, &(r, z)) in curve.nodes().iter().zip(expected) {
            assert!((p.x - r).abs() < 1e-15 && (p.y - z).abs() < 1e-15, "{p:?} vs ({r}, {z})");
        }
    }

    #[test]
    fn unperturbed_semicircle() {
        let c = build_curve(&ShapeSpec::Semicircle { radius: 1.0 }, 4, 0.0).unwrap();
        assert_nodes(
            &c,
            &[(0.0, 1.0), (FRAC_1_SQRT_2, FRAC_1_SQRT_2), (1.0, 0.0), (FRAC_1_SQRT_2, -FRAC_1_SQRT_2), (0.0, -1.0)],
        );
        assert_eq!(c.topology(), Topology::Open);
    }

    #[test]
    fn unperturbed_torus_circle() {
        let c = build_curve(&ShapeSpec::TorusCircle { major: SQRT_2, minor: 1.0 }, 4, 0.0).unwrap();
        assert_nodes(&c, &[(SQRT_2, 1.0), (SQRT_2 + 1.0, 0.0), (SQRT_2, -1.0), (SQRT_2 - 1.0, 0.0)]);
    }

    #[test]
    fn perturbed_semicircle_follows_parameterisation() {
        let c = build_curve(&ShapeSpec::Semicircle { radius: 1.0 }, 32, 0.1).unwrap();
        for (k, p) in c.nodes().iter().enumerate().skip(1).take(31) {
            let t0 = (0.5 - k as f64 / 32.0) * PI;
            let th = t0 + 0.1 * t0.cos();
            assert!((p.x - th.cos()).abs() < 1e-15 && (p.y - th.sin()).abs() < 1e-15);
        }
        assert!(mesh_ratio(&c).unwrap() > 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        let s = ShapeSpec::Semicircle { radius: 1.0 };
        assert!(build_curve(&s, 3, 0.0).is_err());
        assert!(build_curve(&ShapeSpec::Semicircle { radius: 0.0 }, 8, 0.0).is_err());
        assert!(build_curve(&ShapeSpec::Disc { width: -1.0, height: 1.0 }, 8, 0.0).is_err());
        assert!(build_curve(&s, 8, 1.0).is_err());
        assert!(build_curve(&ShapeSpec::Disc { width: 7.0, height: 1.0 }, 8, 0.1).is_err());
        assert!(build_curve(&ShapeSpec::TorusCircle { major: 1.0, minor: 1.0 }, 8, 0.0).is_err());
        let s = ShapeSpec::Stadium { length: 4.0, height: 1.0, center: [1.0, 0.0] };
        assert!(build_curve(&s, 8, 0.0).is_err());
    }

    #[test]
    fn disc_profile_dimensions() {
        let c = build_curve(&ShapeSpec::Disc { width: 7.0, height: 1.0 }, 128, 0.0).unwrap();
        let n = c.nodes();
        assert_eq!(n[0], Vec2::new(0.0, 0.5));
        assert_eq!(n[128], Vec2::new(0.0, -0.5));
        assert!((c.max_r() - 3.5).abs() < 1e-3);
        // arclength-uniform sampling of a curve of length 6 + pi/2
        let expected = (6.0 + 0.5 * PI) / 128.0;
        for l in c.segment_lengths() {
            assert!(l <= expected + 1e-12 && l > 0.99 * expected);
        }
        assert!(c.signed_area() < 0.0);
    }

    #[test]
    fn rounded_cylinder_profile_dimensions() {
        let c = build_curve(&ShapeSpec::RoundedCylinder { width: 2.0, height: 6.0 }, 64, 0.0).unwrap();
        assert_eq!(c.nodes()[0], Vec2::new(0.0, 3.0));
        assert_eq!(c.nodes()[64], Vec2::new(0.0, -3.0));
        assert!((c.max_r() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stadium_barycentre_and_outward_normals() {
        let s = ShapeSpec::Stadium { length: 4.0, height: 1.0, center: [4.0, 0.0] };
        let c = build_curve(&s, 128, 0.0).unwrap();
        let st = shape_stats(&c);
        assert!((st.center[0] - 4.0).abs() < 1e-12 && st.center[1].abs() < 1e-12);
        assert!((c.max_r() - 6.0).abs() < 1e-3 && (c.min_interior_r() - 2.0).abs() < 1e-3);
        let frames = element_frames(&c).unwrap();
        for (e, f) in frames.iter().enumerate() {
            let mid = 0.5 * (c.nodes()[e] + c.nodes()[(e + 1) % 128]);
            assert!(f.nu.dot(&(mid - Vec2::new(4.0, 0.0))) > 0.0);
        }
    }

    #[test]
    fn reversed_input_is_reoriented() {
        let c = build_curve(&ShapeSpec::TorusCircle { major: 3.0, minor: 1.0 }, 16, 0.0).unwrap();
        assert!(c.reversed().signed_area() > 0.0);
        assert_eq!(c.reversed().oriented_outward().signed_area(), c.signed_area());
    }
}
