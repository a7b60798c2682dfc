//! Closed C^{1,1} curves and sub-arcs with panel quadrature, outward normals,
//! signed curvature, and the tubular-coordinate map.
//!
//! Curvature follows the convention kappa = gdot_2 gddot_1 - gdot_1 gddot_2 in
//! the arc-length parametrization, which gives kappa = -1/r on a
//! counterclockwise circle. Most boundary-element texts use the opposite sign;
//! everything downstream (tubular Jacobian 1 - t kappa, turning number -2 pi)
//! is consistent with this choice.

use crate::quad::Quadrature;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("panel count {0} below the minimum of {1}")]
    BadPanelCount(usize, usize),
    #[error("radius function is not strictly positive (min {0})")]
    NonPositiveRadius(f64),
    #[error("curve is self-intersecting")]
    SelfIntersecting,
    #[error("empty or invalid arc-length window [{0}, {1}]")]
    EmptyWindow(f64, f64),
    #[error("truncation by eps = {0} empties the arc")]
    ArcVanishes(f64),
    #[error("offset {0} outside the tube of half-width {1}")]
    OutsideTube(f64, f64),
}

/// Quadrature order used on every panel.
pub const PANEL_ORDER: usize = 8;

/// Analytic description of a curve; retained so arcs can be re-panelled and
/// points evaluated at arbitrary arc length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CurveShape {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    /// r(theta) = base_radius + sum_k cos_coef[k-1] cos(k theta) + sin_coef[k-1] sin(k theta)
    Fourier {
        center: [f64; 2],
        base_radius: f64,
        cos_coef: Vec<f64>,
        sin_coef: Vec<f64>,
    },
    /// Straight segment, parametrized on [0, 1]; open.
    Segment {
        a: [f64; 2],
        b: [f64; 2],
    },
}

/// Value and first two parameter derivatives of the parametrization.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub p: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
}

impl CurveShape {
    pub fn period(&self) -> f64 {
        match self {
            CurveShape::Segment { .. } => 1.0,
            _ => 2.0 * PI,
        }
    }

    pub fn closed(&self) -> bool {
        !matches!(self, CurveShape::Segment { .. })
    }

    pub fn eval(&self, theta: f64) -> Jet {
        match self {
            CurveShape::Circle { center, radius } => {
                let (s, c) = theta.sin_cos();
                Jet {
                    p: [center[0] + radius * c, center[1] + radius * s],
                    d1: [-radius * s, radius * c],
                    d2: [-radius * c, -radius * s],
                }
            }
            CurveShape::Fourier { center, base_radius, cos_coef, sin_coef } => {
                let mut r = *base_radius;
                let mut dr = 0.0;
                let mut ddr = 0.0;
                for (k, &a) in cos_coef.iter().enumerate() {
                    let kf = (k + 1) as f64;
                    let (sk, ck) = (kf * theta).sin_cos();
                    r += a * ck;
                    dr += -a * kf * sk;
                    ddr += -a * kf * kf * ck;
                }
                for (k, &b) in sin_coef.iter().enumerate() {
                    let kf = (k + 1) as f64;
                    let (sk, ck) = (kf * theta).sin_cos();
                    r += b * sk;
                    dr += b * kf * ck;
                    ddr += -b * kf * kf * sk;
                }
                let (s, c) = theta.sin_cos();
                let u = [c, s];
                let du = [-s, c];
                let ddu = [-c, -s];
                Jet {
                    p: [center[0] + r * u[0], center[1] + r * u[1]],
                    d1: [dr * u[0] + r * du[0], dr * u[1] + r * du[1]],
                    d2: [
                        ddr * u[0] + 2.0 * dr * du[0] + r * ddu[0],
                        ddr * u[1] + 2.0 * dr * du[1] + r * ddu[1],
                    ],
                }
            }
            CurveShape::Segment { a, b } => Jet {
                p: [a[0] + theta * (b[0] - a[0]), a[1] + theta * (b[1] - a[1])],
                d1: [b[0] - a[0], b[1] - a[1]],
                d2: [0.0, 0.0],
            },
        }
    }

    fn radius_function(&self, theta: f64) -> Option<f64> {
        match self {
            CurveShape::Fourier { base_radius, cos_coef, sin_coef, .. } => {
                let mut r = *base_radius;
                for (k, &a) in cos_coef.iter().enumerate() {
                    r += a * ((k + 1) as f64 * theta).cos();
                }
                for (k, &b) in sin_coef.iter().enumerate() {
                    r += b * ((k + 1) as f64 * theta).sin();
                }
                Some(r)
            }
            _ => None,
        }
    }
}

/// One quadrature node on a curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurveNode {
    /// Native curve parameter.
    pub theta: f64,
    /// Arc-length position measured from theta = 0 (or the arc start).
    pub s: f64,
    pub point: [f64; 2],
    /// Unit tangent.
    pub tangent: [f64; 2],
    /// Unit normal, outward from the enclosed domain for closed curves.
    pub normal: [f64; 2],
    /// Signed curvature; -1/r on a counterclockwise circle.
    pub kappa: f64,
    /// |d gamma / d theta|.
    pub speed: f64,
    /// Arc-length quadrature weight.
    pub weight: f64,
}

/// Panel windows plus the flattened node list (panel p owns nodes
/// p*PANEL_ORDER .. (p+1)*PANEL_ORDER).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Panelization {
    /// Parameter windows [theta0, theta1] of each panel.
    pub panels: Vec<[f64; 2]>,
    pub nodes: Vec<CurveNode>,
    pub order: usize,
    /// Total arc length.
    pub length: f64,
    /// Arc length at each panel boundary (panels.len() + 1 entries).
    pub cumulative: Vec<f64>,
}

pub(crate) fn panelize(
    shape: &CurveShape,
    theta0: f64,
    theta1: f64,
    n_panels: usize,
    s_origin: f64,
) -> Panelization {
    let rule = Quadrature::gauss_legendre(PANEL_ORDER);
    let fine = Quadrature::gauss_legendre(24);
    let mut panels = Vec::with_capacity(n_panels);
    let mut nodes = Vec::with_capacity(n_panels * PANEL_ORDER);
    let mut cumulative = Vec::with_capacity(n_panels + 1);
    let h = (theta1 - theta0) / n_panels as f64;
    let speed_of = |t: f64| {
        let j = shape.eval(t);
        (j.d1[0] * j.d1[0] + j.d1[1] * j.d1[1]).sqrt()
    };
    let mut s_acc = s_origin;
    cumulative.push(s_acc);
    for p in 0..n_panels {
        let a = theta0 + p as f64 * h;
        let b = a + h;
        panels.push([a, b]);
        let (thetas, gw) = rule.mapped(a, b);
        for (&t, &w) in thetas.iter().zip(&gw) {
            let j = shape.eval(t);
            let sp = (j.d1[0] * j.d1[0] + j.d1[1] * j.d1[1]).sqrt();
            let tangent = [j.d1[0] / sp, j.d1[1] / sp];
            let normal = [tangent[1], -tangent[0]];
            let kappa = (j.d1[1] * j.d2[0] - j.d1[0] * j.d2[1]) / (sp * sp * sp);
            let ds = fine.integrate(a, t, speed_of);
            nodes.push(CurveNode {
                theta: t,
                s: s_acc + ds,
                point: j.p,
                tangent,
                normal,
                kappa,
                speed: sp,
                weight: w * sp,
            });
        }
        s_acc += fine.integrate(a, b, speed_of);
        cumulative.push(s_acc);
    }
    Panelization {
        panels,
        nodes,
        order: PANEL_ORDER,
        length: s_acc - s_origin,
        cumulative,
    }
}

/// A closed curve with panel quadrature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Curve {
    pub shape: CurveShape,
    pub pz: Panelization,
}

impl Curve {
    pub fn n_panels(&self) -> usize {
        self.pz.panels.len()
    }

    pub fn total_length(&self) -> f64 {
        self.pz.length
    }

    pub fn nodes(&self) -> &[CurveNode] {
        &self.pz.nodes
    }

    /// Parameter period (2 pi for the closed shapes used here).
    pub fn period(&self) -> f64 {
        self.shape.period()
    }

    /// Invert the arc-length map; `s` is taken modulo the total length.
    pub fn theta_at_arclength(&self, s: f64) -> f64 {
        let l = self.pz.length;
        let mut s = s.rem_euclid(l);
        let idx = match self
            .pz
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => i.min(self.pz.panels.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.pz.panels.len() - 1),
        };
        s -= self.pz.cumulative[idx];
        let [a, b] = self.pz.panels[idx];
        let fine = Quadrature::gauss_legendre(24);
        let speed_of = |t: f64| {
            let j = self.shape.eval(t);
            (j.d1[0] * j.d1[0] + j.d1[1] * j.d1[1]).sqrt()
        };
        // Newton iteration on s(theta) = s within [a, b]
        let panel_len = self.pz.cumulative[idx + 1] - self.pz.cumulative[idx];
        let mut t = a + (b - a) * (s / panel_len).clamp(0.0, 1.0);
        for _ in 0..60 {
            let f = fine.integrate(a, t, speed_of) - s;
            let df = speed_of(t);
            let dt = f / df;
            t -= dt;
            t = t.clamp(a, b);
            if dt.abs() < 1e-14 * (b - a).max(1.0) {
                break;
            }
        }
        t
    }

    pub fn point_at_arclength(&self, s: f64) -> [f64; 2] {
        self.shape.eval(self.theta_at_arclength(s)).p
    }

    /// Serialize to the JSON caching document.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Composite Gauss-Legendre panels on a circle, counterclockwise, outward normal.
pub fn build_circle(
    center: [f64; 2],
    radius: f64,
    n_panels: usize,
) -> Result<Curve, GeometryError> {
    if n_panels < 8 {
        return Err(GeometryError::BadPanelCount(n_panels, 8));
    }
    if radius <= 0.0 {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    let shape = CurveShape::Circle { center, radius };
    let pz = panelize(&shape, 0.0, 2.0 * PI, n_panels, 0.0);
    Ok(Curve { shape, pz })
}

/// Smooth star-shaped curve r(theta) = base + trigonometric perturbation.
pub fn build_fourier_curve(
    center: [f64; 2],
    base_radius: f64,
    cos_coef: &[f64],
    sin_coef: &[f64],
    n_panels: usize,
) -> Result<Curve, GeometryError> {
    if n_panels < 8 {
        return Err(GeometryError::BadPanelCount(n_panels, 8));
    }
    let shape = CurveShape::Fourier {
        center,
        base_radius,
        cos_coef: cos_coef.to_vec(),
        sin_coef: sin_coef.to_vec(),
    };
    let m = 4096.max(64 * n_panels);
    for i in 0..m {
        let theta = 2.0 * PI * i as f64 / m as f64;
        let r = shape.radius_function(theta).unwrap();
        if r <= 0.0 {
            return Err(GeometryError::NonPositiveRadius(r));
        }
    }
    // simplicity check: polygonal self-intersection test on a fine sampling
    let npoly = 8 * n_panels;
    let pts: Vec<[f64; 2]> = (0..npoly)
        .map(|i| shape.eval(2.0 * PI * i as f64 / npoly as f64).p)
        .collect();
    for i in 0..npoly {
        let a0 = pts[i];
        let a1 = pts[(i + 1) % npoly];
        for j in i + 2..npoly {
            if i == 0 && j == npoly - 1 {
                continue;
            }
            let b0 = pts[j];
            let b1 = pts[(j + 1) % npoly];
            if segments_intersect(a0, a1, b0, b1) {
                return Err(GeometryError::SelfIntersecting);
            }
        }
    }
    let pz = panelize(&shape, 0.0, 2.0 * PI, n_panels, 0.0);
    Ok(Curve { shape, pz })
}

fn segments_intersect(p0: [f64; 2], p1: [f64; 2], q0: [f64; 2], q1: [f64; 2]) -> bool {
    let d = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    };
    let d1 = d(q0, q1, p0);
    let d2 = d(q0, q1, p1);
    let d3 = d(p0, p1, q0);
    let d4 = d(p0, p1, q1);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Straight segment as an open panelized set (capacity-module input).
pub fn build_segment(a: [f64; 2], b: [f64; 2], n_panels: usize) -> Result<Arc, GeometryError> {
    if n_panels < 1 {
        return Err(GeometryError::BadPanelCount(n_panels, 1));
    }
    let shape = CurveShape::Segment { a, b };
    let pz = panelize(&shape, 0.0, 1.0, n_panels, 0.0);
    let length = pz.length;
    Ok(Arc {
        parent: Curve {
            shape: shape.clone(),
            pz: pz.clone(),
        },
        s_window: (0.0, length),
        pz,
    })
}

/// A sub-arc of a closed curve, re-panelled so panel boundaries align with the
/// window endpoints. Arc-length positions `s` are measured on the parent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arc {
    pub parent: Curve,
    /// [s_a, s_b] on the parent curve.
    pub s_window: (f64, f64),
    pub pz: Panelization,
}

impl Arc {
    pub fn length(&self) -> f64 {
        self.pz.length
    }

    pub fn nodes(&self) -> &[CurveNode] {
        &self.pz.nodes
    }
}

/// Sub-arc over the arc-length window [s_a, s_b] of a closed curve.
pub fn sub_arc(curve: &Curve, s_a: f64, s_b: f64) -> Result<Arc, GeometryError> {
    let l = curve.total_length();
    if !(s_a >= 0.0 && s_a < s_b && s_b <= l * (1.0 + 1e-12)) {
        return Err(GeometryError::EmptyWindow(s_a, s_b));
    }
    let s_b = s_b.min(l);
    if s_b - s_a < 1e-12 * l {
        return Err(GeometryError::EmptyWindow(s_a, s_b));
    }
    let theta_a = curve.theta_at_arclength(s_a);
    let theta_b = if (s_b - l).abs() < 1e-12 * l {
        curve.period()
    } else {
        curve.theta_at_arclength(s_b)
    };
    let frac = (s_b - s_a) / l;
    let m = ((curve.n_panels() as f64 * frac).round() as usize).max(2);
    let pz = panelize(&curve.shape, theta_a, theta_b, m, s_a);
    Ok(Arc {
        parent: curve.clone(),
        s_window: (s_a, s_b),
        pz,
    })
}

/// Truncated arc per the ball definition: the points of the arc whose eps-ball
/// intersected with the parent curve stays inside the arc, i.e. Euclidean
/// distance to the complementary arc at least eps.
pub fn truncated_arc(arc: &Arc, eps: f64) -> Result<Arc, GeometryError> {
    if !(eps > 0.0) || eps >= 0.5 * arc.length() {
        return Err(GeometryError::ArcVanishes(eps));
    }
    let curve = &arc.parent;
    let l = curve.total_length();
    let (s_a, s_b) = arc.s_window;
    let comp_len = l - (s_b - s_a);
    if comp_len <= 1e-12 * l {
        return sub_arc(curve, s_a, s_b);
    }
    // dense sampling of the complementary arc
    let m = 4096;
    let comp: Vec<[f64; 2]> = (0..=m)
        .map(|i| curve.point_at_arclength(s_b + comp_len * i as f64 / m as f64))
        .collect();
    let dist = |s: f64| -> f64 {
        let p = curve.point_at_arclength(s);
        comp.iter()
            .map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min)
    };
    let n_scan = 512;
    let ds = (s_b - s_a) / n_scan as f64;
    let mut first = None;
    let mut last = None;
    for i in 0..=n_scan {
        let s = s_a + i as f64 * ds;
        if dist(s) >= eps {
            if first.is_none() {
                first = Some(s);
            }
            last = Some(s);
        }
    }
    let (lo0, hi0) = match (first, last) {
        (Some(f), Some(g)) if g > f => (f, g),
        _ => return Err(GeometryError::ArcVanishes(eps)),
    };
    let refine = |mut outside: f64, mut inside: f64| -> f64 {
        for _ in 0..60 {
            let mid = 0.5 * (outside + inside);
            if dist(mid) >= eps {
                inside = mid;
            } else {
                outside = mid;
            }
            if (inside - outside).abs() < 1e-12 * l {
                break;
            }
        }
        inside
    };
    let lo = if lo0 > s_a + 0.5 * ds { refine(lo0 - ds, lo0) } else { s_a };
    let hi = if hi0 < s_b - 0.5 * ds { refine(hi0 + ds, hi0) } else { s_b };
    if hi - lo < 1e-10 * l {
        return Err(GeometryError::ArcVanishes(eps));
    }
    sub_arc(curve, lo, hi)
}

/// Tubular coordinate map x = x_Sigma(s) + t nu(s), |t| <= beta, with area
/// Jacobian J = 1 - t kappa(s).
#[derive(Debug, Clone)]
pub struct TubularMap {
    pub curve: Curve,
    pub beta: f64,
}

impl TubularMap {
    /// beta = min(0.5/max|kappa|, 0.25 * injectivity-radius estimate), the
    /// latter from a node-pair search over well-separated pairs. This keeps
    /// J = 1 - t kappa >= 0.5 throughout the tube.
    pub fn new(curve: &Curve) -> Self {
        let max_kappa = curve
            .nodes()
            .iter()
            .map(|n| n.kappa.abs())
            .fold(0.0f64, f64::max)
            .max(1e-12);
        let l = curve.total_length();
        let nodes = curve.nodes();
        let mut min_chord = f64::INFINITY;
        for (i, a) in nodes.iter().enumerate() {
            for b in nodes.iter().skip(i + 1) {
                let gap = (a.s - b.s).abs();
                let arc_dist = gap.min(l - gap);
                if arc_dist >= l / 3.0 {
                    let d = ((a.point[0] - b.point[0]).powi(2)
                        + (a.point[1] - b.point[1]).powi(2))
                    .sqrt();
                    min_chord = min_chord.min(d);
                }
            }
        }
        let inj = 0.5 * min_chord;
        let beta = (0.5 / max_kappa).min(0.25 * inj);
        TubularMap {
            curve: curve.clone(),
            beta,
        }
    }

    /// Maps (s, t); returns the point and the Jacobian factor 1 - t kappa(s).
    pub fn point(&self, s: f64, t: f64) -> Result<([f64; 2], f64), GeometryError> {
        if t.abs() > self.beta * (1.0 + 1e-12) {
            return Err(GeometryError::OutsideTube(t, self.beta));
        }
        let theta = self.curve.theta_at_arclength(s);
        let j = self.curve.shape.eval(theta);
        let sp = (j.d1[0] * j.d1[0] + j.d1[1] * j.d1[1]).sqrt();
        let tangent = [j.d1[0] / sp, j.d1[1] / sp];
        let normal = [tangent[1], -tangent[0]];
        let kappa = (j.d1[1] * j.d2[0] - j.d1[0] * j.d2[1]) / (sp * sp * sp);
        Ok((
            [j.p[0] + t * normal[0], j.p[1] + t * normal[1]],
            1.0 - t * kappa,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_total_length_and_weights() {
        let c = build_circle([0.0, 0.0], 2.0, 64).unwrap();
        assert_relative_eq!(c.total_length(), 4.0 * PI, max_relative = 1e-12);
        let wsum: f64 = c.nodes().iter().map(|n| n.weight).sum();
        assert_relative_eq!(wsum, 4.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn circle_below_minimum_panels() {
        assert!(matches!(
            build_circle([0.0, 0.0], 2.0, 4),
            Err(GeometryError::BadPanelCount(4, 8))
        ));
    }

    #[test]
    fn circle_frames_are_unit_and_outward() {
        let c = build_circle([0.5, -0.25], 1.5, 32).unwrap();
        for n in c.nodes() {
            let t2 = n.tangent[0].powi(2) + n.tangent[1].powi(2);
            let n2 = n.normal[0].powi(2) + n.normal[1].powi(2);
            assert!((t2 - 1.0).abs() < 1e-10);
            assert!((n2 - 1.0).abs() < 1e-10);
            let rx = n.point[0] - 0.5;
            let ry = n.point[1] + 0.25;
            let dot = rx * n.normal[0] + ry * n.normal[1];
            assert!(dot > 0.0, "normal must point outward");
        }
    }

    #[test]
    fn circle_curvature_sign_convention() {
        // kappa = -1 at every node of the unit circle
        let c = build_circle([0.0, 0.0], 1.0, 16).unwrap();
        for n in c.nodes() {
            assert_relative_eq!(n.kappa, -1.0, max_relative = 1e-12);
        }
        // turning number: integral of kappa ds = -2 pi
        let total: f64 = c.nodes().iter().map(|n| n.kappa * n.weight).sum();
        assert_relative_eq!(total, -2.0 * PI, max_relative = 1e-10);
    }

    #[test]
    fn fourier_zero_perturbation_matches_circle() {
        let c1 = build_circle([0.0, 0.0], 1.0, 16).unwrap();
        let c2 = build_fourier_curve([0.0, 0.0], 1.0, &[], &[], 16).unwrap();
        for (a, b) in c1.nodes().iter().zip(c2.nodes()) {
            assert!((a.point[0] - b.point[0]).abs() < 1e-12);
            assert!((a.point[1] - b.point[1]).abs() < 1e-12);
            assert!((a.kappa - b.kappa).abs() < 1e-12);
            assert!((a.weight - b.weight).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_turning_number() {
        let c = build_fourier_curve([0.0, 0.0], 1.0, &[0.0, 0.3], &[], 48).unwrap();
        let total: f64 = c.nodes().iter().map(|n| n.kappa * n.weight).sum();
        assert_relative_eq!(total, -2.0 * PI, max_relative = 1e-6);
    }

    #[test]
    fn fourier_rejects_nonpositive_radius() {
        assert!(matches!(
            build_fourier_curve([0.0, 0.0], 1.0, &[0.0, 1.2], &[], 32),
            Err(GeometryError::NonPositiveRadius(_))
        ));
    }

    #[test]
    fn quadrature_exactness_for_trig_polynomials() {
        // trig polynomials of degree <= panel order on the unit circle (s = theta)
        let c = build_circle([0.0, 0.0], 1.0, 32).unwrap();
        for k in 1..=PANEL_ORDER {
            let kf = k as f64;
            let int_cos: f64 = c.nodes().iter().map(|n| (kf * n.s).cos() * n.weight).sum();
            assert!(int_cos.abs() < 1e-12, "cos({k} s) integral = {int_cos}");
            let int_cos2: f64 = c
                .nodes()
                .iter()
                .map(|n| (kf * n.s).cos().powi(2) * n.weight)
                .sum();
            assert_relative_eq!(int_cos2, PI, max_relative = 1e-12);
        }
    }

    #[test]
    fn sub_arc_lengths() {
        let c = build_circle([0.0, 0.0], 1.0, 32).unwrap();
        let full = sub_arc(&c, 0.0, 2.0 * PI).unwrap();
        assert_relative_eq!(full.length(), c.total_length(), max_relative = 1e-12);
        let half = sub_arc(&c, 0.0, PI).unwrap();
        assert_relative_eq!(half.length(), PI, max_relative = 1e-10);
        assert!(matches!(
            sub_arc(&c, 1.0, 1.0),
            Err(GeometryError::EmptyWindow(_, _))
        ));
    }

    #[test]
    fn arc_additivity() {
        let c = build_fourier_curve([0.0, 0.0], 1.0, &[0.05, 0.2], &[0.1], 48).unwrap();
        let l = c.total_length();
        let (a, b, d) = (0.2 * l, 0.45 * l, 0.9 * l);
        let l1 = sub_arc(&c, a, b).unwrap().length();
        let l2 = sub_arc(&c, b, d).unwrap().length();
        let l3 = sub_arc(&c, a, d).unwrap().length();
        assert_relative_eq!(l1 + l2, l3, max_relative = 1e-12);
    }

    #[test]
    fn truncated_arc_circle_oracle() {
        // unit circle, arc of length 2, eps = 0.5: endpoints pull in by the
        // chord-ball arc distance 2 asin(eps/2) each
        let c = build_circle([0.0, 0.0], 1.0, 64).unwrap();
        let arc = sub_arc(&c, 1.0, 3.0).unwrap();
        let tr = truncated_arc(&arc, 0.5).unwrap();
        let pull = 2.0 * (0.25f64).asin();
        let expected = 2.0 - 2.0 * pull;
        assert_relative_eq!(tr.length(), expected, max_relative = 1e-4);
        // continuity in eps: length -> |arc| as eps -> 0+
        let tiny = truncated_arc(&arc, 1e-4).unwrap();
        assert!((tiny.length() - arc.length()).abs() < 1e-3);
        // vanishing case
        let short = sub_arc(&c, 0.0, 1.0).unwrap();
        assert!(matches!(
            truncated_arc(&short, 0.6),
            Err(GeometryError::ArcVanishes(_))
        ));
    }

    #[test]
    fn tubular_map_circle() {
        let c = build_circle([0.0, 0.0], 1.0, 32).unwrap();
        let map = TubularMap::new(&c);
        assert!(map.beta >= 0.2, "beta = {} too small for the circle", map.beta);
        let (p, j) = map.point(1.3, 0.0).unwrap();
        let q = c.point_at_arclength(1.3);
        assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
        assert_relative_eq!(j, 1.0, max_relative = 1e-12);
        // J = 1 - t kappa = 1.2 at t = 0.2 on the unit circle (kappa = -1)
        let (_, j) = map.point(0.7, 0.2).unwrap();
        assert_relative_eq!(j, 1.2, max_relative = 1e-12);
        let t_bad = map.beta * 1.1;
        assert!(matches!(
            map.point(0.7, t_bad),
            Err(GeometryError::OutsideTube(_, _))
        ));
    }

    #[test]
    fn tubular_injectivity_proxy() {
        let c = build_fourier_curve([0.0, 0.0], 1.0, &[0.1], &[0.05], 48).unwrap();
        let map = TubularMap::new(&c);
        let l = c.total_length();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let s1 = rnd() * l;
            let t1 = (2.0 * rnd() - 1.0) * map.beta;
            let s2 = rnd() * l;
            let t2 = (2.0 * rnd() - 1.0) * map.beta;
            let param_dist = {
                let g = (s1 - s2).abs();
                g.min(l - g).max((t1 - t2).abs())
            };
            if param_dist < 1e-4 {
                continue;
            }
            let (p1, _) = map.point(s1, t1).unwrap();
            let (p2, _) = map.point(s2, t2).unwrap();
            let d = ((p1[0] - p2[0]).powi(2) + (p1[1] - p2[1]).powi(2)).sqrt();
            assert!(d >= 1e-8, "tube points collide: d = {d}");
        }
    }

    #[test]
    fn curve_json_roundtrip() {
        let c = build_fourier_curve([0.1, 0.0], 1.0, &[0.2], &[], 16).unwrap();
        let text = c.to_json();
        let back = Curve::from_json(&text).unwrap();
        assert_eq!(back.n_panels(), c.n_panels());
        for (a, b) in c.nodes().iter().zip(back.nodes()) {
            assert_eq!(a.point, b.point);
            assert_eq!(a.weight, b.weight);
            assert_eq!(a.kappa, b.kappa);
        }
    }

    #[test]
    fn segment_build() {
        let seg = build_segment([0.0, 0.0], [3.0, 4.0], 10).unwrap();
        assert_relative_eq!(seg.length(), 5.0, max_relative = 1e-14);
        let wsum: f64 = seg.nodes().iter().map(|n| n.weight).sum();
        assert_relative_eq!(wsum, 5.0, max_relative = 1e-14);
    }
}
