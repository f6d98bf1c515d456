//! Element quadrature on the reference interval `[0, 1]`.

use crate::mesh::PolygonalCurve;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// Trapezoid rule with one-sided end point values.
    MassLumped,
    /// Two-point Gauss-Legendre, exact up to degree 3.
    Gauss2,
    /// Three-point Gauss-Legendre, exact up to degree 5.
    Gauss3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    /// `(location, weight)` pairs on `[0, 1]`; weights sum to one.
    pub points: &'static [(f64, f64)],
}

// 1/(2 sqrt 3) and sqrt(3/5)/2
const G2_OFF: f64 = 0.288_675_134_594_812_9;
const G3_OFF: f64 = 0.387_298_334_620_741_7;

pub const MASS_LUMPED: QuadratureRule = QuadratureRule {
    kind: RuleKind::MassLumped,
    points: &[(0.0, 0.5), (1.0, 0.5)],
};

pub const GAUSS2: QuadratureRule = QuadratureRule {
    kind: RuleKind::Gauss2,
    points: &[(0.5 - G2_OFF, 0.5), (0.5 + G2_OFF, 0.5)],
};

pub const GAUSS3: QuadratureRule = QuadratureRule {
    kind: RuleKind::Gauss3,
    points: &[
        (0.5 - G3_OFF, 5.0 / 18.0),
        (0.5, 8.0 / 18.0),
        (0.5 + G3_OFF, 5.0 / 18.0),
    ],
};

impl QuadratureRule {
    pub fn of(kind: RuleKind) -> Self {
        match kind {
            RuleKind::MassLumped => MASS_LUMPED,
            RuleKind::Gauss2 => GAUSS2,
            RuleKind::Gauss3 => GAUSS3,
        }
    }

    /// `int_0^1 f(xi) d xi` under this rule.
    #[inline]
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.points.iter().map(|&(x, w)| w * f(x)).sum()
    }
}

/// Contribution of one element of length `element_len` to the inner product of
/// `f` and `g`. Both closures are evaluated on the element's own reference
/// coordinate, so values at `0` and `1` are the one-sided limits from inside
/// the element.
pub fn element_ip(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    rule: &QuadratureRule,
    element_len: f64,
) -> f64 {
    element_len * rule.integrate(|x| f(x) * g(x))
}

/// Mass-lumped nodal weights: half the length of each adjacent element.
pub fn lumped_weights(curve: &PolygonalCurve) -> Vec<f64> {
    let mut w = vec![0.0; curve.num_nodes()];
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        let half = 0.5 * curve.segment(e).norm();
        w[a] += half;
        w[b] += half;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_curve, ShapeSpec, Topology, Vec2};

    #[test]
    fn constant_integrand_gives_length() {
        for rule in [MASS_LUMPED, GAUSS2, GAUSS3] {
            assert!((element_ip(|_| 1.0, |_| 1.0, &rule, 0.125) - 0.125).abs() < 1e-16);
            let s: f64 = rule.points.iter().map(|p| p.1).sum();
            assert!((s - 1.0).abs() < 1e-15);
            assert!(rule.points.iter().all(|p| p.1 >= 0.0));
        }
    }

    #[test]
    fn gauss2_is_exact_for_cubics() {
        let v = element_ip(|x| x, |x| x * x, &GAUSS2, 1.0);
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn quintic_separates_the_gauss_rules() {
        let g3 = element_ip(|x| x.powi(5), |_| 1.0, &GAUSS3, 1.0);
        assert!((g3 - 1.0 / 6.0).abs() < 1e-15);
        // Gauss2 of x^5 is 11/72 = 1/6 - 1/72.
        let g2 = element_ip(|x| x.powi(5), |_| 1.0, &GAUSS2, 1.0);
        let a: f64 = 0.5 - 1.0 / (2.0 * 3f64.sqrt());
        let b: f64 = 0.5 + 1.0 / (2.0 * 3f64.sqrt());
        let exact_g2 = 0.5 * (a.powi(5) + b.powi(5));
        assert!((g2 - exact_g2).abs() < 1e-15);
        assert!((exact_g2 - (1.0 / 6.0 - 1.0 / 72.0)).abs() < 1e-15);
    }

    #[test]
    fn lumped_weight_examples() {
        let nodes = (0..8)
            .map(|k| {
                let th = -(k as f64) * std::f64::consts::PI / 4.0;
                Vec2::new(3.0 + th.cos(), th.sin())
            })
            .collect();
        let c = PolygonalCurve::new(Topology::Periodic, nodes).unwrap();
        let l = c.segment(0).norm();
        for w in lumped_weights(&c) {
            assert!((w - l).abs() < 1e-14);
        }
        let c = PolygonalCurve::new(
            Topology::Open,
            vec![Vec2::new(0.0, 1.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)],
        )
        .unwrap();
        assert_eq!(lumped_weights(&c), vec![0.5, 1.0, 0.5]);
    }

    #[test]
    fn lumped_weights_partition_length() {
        let c = build_curve(&ShapeSpec::Semicircle { radius: 1.3 }, 37, 0.2).unwrap();
        let s: f64 = lumped_weights(&c).iter().sum();
        assert!((s - c.total_length()).abs() < 1e-13);
    }
}
