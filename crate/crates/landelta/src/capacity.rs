//! Logarithmic capacity and equilibrium measures of compact planar sets
//! (closed curves, arcs, segments, and finite unions) by constrained
//! minimization of the discrete logarithmic energy.
//!
//! Panels carry piecewise-constant densities; the log-singular self- and
//! adjacent-pair integrals are taken in arc length where they have closed
//! forms, the smooth chord/arc correction by panel Gauss quadrature.

use crate::geometry::{Arc, Curve, CurveNode};
use crate::linalg;
use faer::Mat;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("panel {0} has (near-)zero length; a point mass has infinite self-energy")]
    PointMassDiagonal(usize),
    #[error("active-set iteration stalled after {0} rounds")]
    SolverStalled(usize),
}

/// One flat-density panel of the energy discretization.
#[derive(Debug, Clone)]
struct CapPanel {
    /// Arc-length positions of the quadrature nodes, measured within the
    /// component this panel belongs to.
    s: Vec<f64>,
    points: Vec<[f64; 2]>,
    /// Arc-length quadrature weights (summing to len).
    w: Vec<f64>,
    len: f64,
    /// Exact arc-length boundaries of the panel within its component.
    s_lo: f64,
    s_hi: f64,
    /// Component id; adjacency only applies within a component.
    group: usize,
    /// Midpoint, used as the representative node of the measure.
    mid: [f64; 2],
}

/// A compact set assembled from panels; input to the equilibrium solver.
pub struct CapacitySet {
    panels: Vec<CapPanel>,
    /// Per component: (total length, closed?).
    components: Vec<(f64, bool)>,
}

impl CapacitySet {
    pub fn from_curve(curve: &Curve) -> Self {
        let mut set = CapacitySet {
            panels: Vec::new(),
            components: Vec::new(),
        };
        set.push_component(curve.nodes(), &curve.pz.cumulative, true);
        set
    }

    pub fn from_arc(arc: &Arc) -> Self {
        let mut set = CapacitySet {
            panels: Vec::new(),
            components: Vec::new(),
        };
        set.push_component(arc.nodes(), &arc.pz.cumulative, false);
        set
    }

    /// Union of finitely many components.
    pub fn union(parts: Vec<CapacitySet>) -> Self {
        let mut out = CapacitySet {
            panels: Vec::new(),
            components: Vec::new(),
        };
        for part in parts {
            let offset = out.components.len();
            out.components.extend(part.components.iter().copied());
            for mut p in part.panels {
                p.group += offset;
                out.panels.push(p);
            }
        }
        out
    }

    fn push_component(&mut self, nodes: &[CurveNode], cumulative: &[f64], closed: bool) {
        let group = self.components.len();
        let order = crate::geometry::PANEL_ORDER;
        let n_panels = nodes.len() / order;
        let s0 = cumulative[0];
        for p in 0..n_panels {
            let chunk = &nodes[p * order..(p + 1) * order];
            let len = cumulative[p + 1] - cumulative[p];
            let wsum: f64 = chunk.iter().map(|n| n.weight).sum();
            let mid = {
                let mut m = [0.0, 0.0];
                for n in chunk {
                    m[0] += n.point[0] * n.weight / wsum;
                    m[1] += n.point[1] * n.weight / wsum;
                }
                m
            };
            self.panels.push(CapPanel {
                s: chunk.iter().map(|n| n.s - s0).collect(),
                points: chunk.iter().map(|n| n.point).collect(),
                w: chunk.iter().map(|n| n.weight).collect(),
                len,
                s_lo: cumulative[p] - s0,
                s_hi: cumulative[p + 1] - s0,
                group,
                mid,
            });
        }
        let total = cumulative[n_panels] - s0;
        self.components.push((total, closed));
    }

    pub fn n_panels(&self) -> usize {
        self.panels.len()
    }

    pub fn total_length(&self) -> f64 {
        self.components.iter().map(|c| c.0).sum()
    }

    /// Mean logarithmic-energy kernel over every panel pair:
    /// E[p,q] = (1/(len_p len_q)) int_p int_q ln(1/|x-y|).
    ///
    /// Diagonal blocks use the exact flat self-integral in arc length plus
    /// the smooth chord/arc ratio; panels sharing an endpoint use the exact
    /// adjacent-pair log integral; everything else is plain double Gauss.
    pub fn energy_matrix(&self) -> Result<Mat<f64>, CapacityError> {
        let n = self.panels.len();
        for (i, p) in self.panels.iter().enumerate() {
            if p.len < 1e-14 {
                return Err(CapacityError::PointMassDiagonal(i));
            }
        }
        let mut e = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.pair_energy(i, j);
                e[(i, j)] = v;
                e[(j, i)] = v;
            }
        }
        Ok(e)
    }

    fn pair_energy(&self, i: usize, j: usize) -> f64 {
        let p = &self.panels[i];
        let q = &self.panels[j];
        let (total, closed) = self.components[p.group];
        if i == j {
            // -(1/len^2) [ sum_{ab} ln(d/|s-s'|) w w' + len^2 (ln len - 3/2) ]
            let mut smooth = 0.0;
            for (a, (&sa, wa)) in p.s.iter().zip(&p.w).enumerate() {
                for (bq, (&sb, wb)) in p.s.iter().zip(&p.w).enumerate() {
                    if a == bq {
                        continue; // ln(d/tau) -> 0 at the diagonal
                    }
                    let d = dist(p.points[a], p.points[bq]);
                    smooth += (d / (sa - sb).abs()).ln() * wa * wb;
                }
            }
            -(smooth / (p.len * p.len)) - (p.len.ln() - 1.5)
        } else if p.group == q.group && self.adjacent(i, j) {
            // local coordinates from the shared endpoint: tau = u + v
            let (u, v): (Vec<f64>, Vec<f64>) = self.shared_coordinates(i, j, total, closed);
            let mut smooth = 0.0;
            for (a, (&ua, wa)) in u.iter().zip(&p.w).enumerate() {
                for (bq, (&vb, wb)) in v.iter().zip(&q.w).enumerate() {
                    let d = dist(p.points[a], q.points[bq]);
                    smooth += (d / (ua + vb)).ln() * wa * wb;
                }
            }
            let phi = |t: f64| 0.5 * t * t * (t.ln() - 1.5);
            let exact_log = phi(p.len + q.len) - phi(p.len) - phi(q.len);
            -(smooth + exact_log) / (p.len * q.len)
        } else {
            let mut acc = 0.0;
            for (a, wa) in p.w.iter().enumerate() {
                for (bq, wb) in q.w.iter().enumerate() {
                    acc += -dist(p.points[a], q.points[bq]).ln() * wa * wb;
                }
            }
            acc / (p.len * q.len)
        }
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let p = &self.panels[i];
        let q = &self.panels[j];
        if p.group != q.group {
            return false;
        }
        let (total, closed) = self.components[p.group];
        let tol = 1e-9 * total;
        let direct = (p.s_hi - q.s_lo).abs() < tol || (q.s_hi - p.s_lo).abs() < tol;
        if direct {
            return true;
        }
        if closed {
            // wrap adjacency across the seam
            return (p.s_lo.abs() < tol && (q.s_hi - total).abs() < tol)
                || (q.s_lo.abs() < tol && (p.s_hi - total).abs() < tol);
        }
        false
    }

    /// Distances from the shared endpoint for an adjacent pair.
    fn shared_coordinates(
        &self,
        i: usize,
        j: usize,
        total: f64,
        closed: bool,
    ) -> (Vec<f64>, Vec<f64>) {
        let p = &self.panels[i];
        let q = &self.panels[j];
        let tol = 1e-9 * total;
        if (p.s_hi - q.s_lo).abs() < tol {
            // p ends where q starts
            (
                p.s.iter().map(|&s| p.s_hi - s).collect(),
                q.s.iter().map(|&s| s - p.s_hi).collect(),
            )
        } else if (q.s_hi - p.s_lo).abs() < tol {
            (
                p.s.iter().map(|&s| s - q.s_hi).collect(),
                q.s.iter().map(|&s| q.s_hi - s).collect(),
            )
        } else if closed && p.s_lo.abs() < tol {
            // seam: p starts at 0, q ends at the total length
            (
                p.s.to_vec(),
                q.s.iter().map(|&s| total - s).collect(),
            )
        } else {
            // seam, the other orientation
            (
                p.s.iter().map(|&s| total - s).collect(),
                q.s.to_vec(),
            )
        }
    }

    /// Representative points of the discrete measure (panel midpoints).
    pub fn representative_points(&self) -> Vec<[f64; 2]> {
        self.panels.iter().map(|p| p.mid).collect()
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Discrete logarithmic energy of panel masses `weights` (summing to one).
pub fn energy(set: &CapacitySet, weights: &[f64]) -> Result<f64, CapacityError> {
    let e = set.energy_matrix()?;
    let n = weights.len();
    assert_eq!(n, set.n_panels());
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += weights[i] * e[(i, j)] * weights[j];
        }
    }
    Ok(acc)
}

/// Equilibrium measure: nonnegative panel masses summing to one that minimize
/// the discrete energy, its Robin constant, and the capacity e^{-I}.
#[derive(Debug, Clone)]
pub struct EquilibriumMeasure {
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub robin: f64,
    pub capacity: f64,
}

/// Active-set KKT solve of min w^T E w over the probability simplex.
pub fn equilibrium(set: &CapacitySet) -> Result<EquilibriumMeasure, CapacityError> {
    let e = set.energy_matrix()?;
    let n = set.n_panels();
    let mut active: Vec<bool> = vec![true; n];
    let max_rounds = 4 * n + 16;
    for round in 0..max_rounds {
        let idx: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        let m = idx.len();
        if m == 0 {
            return Err(CapacityError::SolverStalled(round));
        }
        // bordered KKT system: [2E_AA, -1; 1^T, 0] [w; rho] = [0; 1]
        let sys = Mat::<f64>::from_fn(m + 1, m + 1, |r, c| {
            if r < m && c < m {
                2.0 * e[(idx[r], idx[c])]
            } else if r < m && c == m {
                -1.0
            } else if r == m && c < m {
                1.0
            } else {
                0.0
            }
        });
        let mut rhs = vec![0.0; m + 1];
        rhs[m] = 1.0;
        let sol = linalg::solve_real(&sys, &rhs);
        let rho = sol[m];
        // negative weights leave the active set
        let mut any_negative = false;
        for (r, &i) in idx.iter().enumerate() {
            if sol[r] < -1e-14 {
                active[i] = false;
                any_negative = true;
            }
        }
        if any_negative {
            continue;
        }
        // KKT check on the inactive set: 2 (E w)_p >= rho - tol
        let mut w = vec![0.0; n];
        for (r, &i) in idx.iter().enumerate() {
            w[i] = sol[r].max(0.0);
        }
        let mut worst: Option<(usize, f64)> = None;
        for p in 0..n {
            if active[p] {
                continue;
            }
            let u: f64 = (0..n).map(|k| e[(p, k)] * w[k]).sum();
            let viol = rho - 2.0 * u;
            if viol > 1e-12 && worst.map(|(_, v)| viol > v).unwrap_or(true) {
                worst = Some((p, viol));
            }
        }
        if let Some((p, _)) = worst {
            active[p] = true;
            continue;
        }
        let robin = 0.5 * rho;
        return Ok(EquilibriumMeasure {
            nodes: set.representative_points(),
            weights: w,
            robin,
            capacity: (-robin).exp(),
        });
    }
    Err(CapacityError::SolverStalled(max_rounds))
}

/// Logarithmic capacity Cap = e^{-I(mu*)}.
pub fn capacity_of(set: &CapacitySet) -> Result<f64, CapacityError> {
    Ok(equilibrium(set)?.capacity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_circle, build_segment, sub_arc, truncated_arc};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn uniform_circle_energy_is_minus_log_radius() {
        // I(uniform on circle of radius r) = -ln r; oracle: the symbolic
        // integral of the log kernel against the uniform measure
        for &(r, want) in &[(1.0, 0.0), (2.0, -(2.0f64.ln()))] {
            let curve = build_circle([0.0, 0.0], r, 32).unwrap();
            let set = CapacitySet::from_curve(&curve);
            let n = set.n_panels();
            let w = vec![1.0 / n as f64; n];
            let i_val = energy(&set, &w).unwrap();
            assert_relative_eq!(i_val, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn circle_equilibrium_is_uniform() {
        let curve = build_circle([0.3, -0.7], 1.0, 32).unwrap();
        let set = CapacitySet::from_curve(&curve);
        let eq = equilibrium(&set).unwrap();
        let n = set.n_panels();
        for &w in &eq.weights {
            assert_relative_eq!(w, 1.0 / n as f64, max_relative = 1e-8);
        }
        assert_relative_eq!(eq.capacity, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn capacity_of_circle_is_radius() {
        for &r in &[0.5, 1.0, 2.0] {
            let curve = build_circle([0.0, 0.0], r, 48).unwrap();
            let set = CapacitySet::from_curve(&curve);
            let cap = capacity_of(&set).unwrap();
            assert_relative_eq!(cap, r, epsilon = 1e-6);
        }
    }

    #[test]
    fn segment_capacity_quarter_length() {
        // classical equilibrium of a segment: arcsine density, Cap = l/4
        let seg = build_segment([0.0, 0.0], [2.0, 0.0], 200).unwrap();
        let set = CapacitySet::from_arc(&seg);
        let eq = equilibrium(&set).unwrap();
        assert!(
            (eq.capacity - 0.5).abs() < 2e-3,
            "segment capacity {} vs 0.5",
            eq.capacity
        );
        // density concentrates at the endpoints
        let w_first = eq.weights[0];
        let w_mid = eq.weights[set.n_panels() / 2];
        assert!(w_first > w_mid, "no endpoint concentration");
    }

    #[test]
    fn semicircle_capacity() {
        // unit semicircular arc: Cap = sin(pi/4); the endpoint density blowup
        // makes plain refinement first-order, so extrapolate two levels
        let cap_at = |panels: usize| {
            let curve = build_circle([0.0, 0.0], 1.0, panels).unwrap();
            let arc = sub_arc(&curve, 0.0, PI).unwrap();
            capacity_of(&CapacitySet::from_arc(&arc)).unwrap()
        };
        let c1 = cap_at(64);
        let c2 = cap_at(128);
        let richardson = 2.0 * c2 - c1;
        let target = (PI / 4.0).sin();
        assert!(
            (richardson - target).abs() < 1e-3,
            "semicircle capacity: levels {c1}, {c2}, extrapolated {richardson} vs {target}"
        );
    }

    #[test]
    fn scaling_and_translation() {
        let base = {
            let curve = build_circle([0.0, 0.0], 1.0, 48).unwrap();
            let arc = sub_arc(&curve, 0.3, 2.4).unwrap();
            capacity_of(&CapacitySet::from_arc(&arc)).unwrap()
        };
        // scaling law: Cap(r K) = r Cap(K)
        let scaled = {
            let curve = build_circle([0.0, 0.0], 3.0, 48).unwrap();
            let arc = sub_arc(&curve, 3.0 * 0.3, 3.0 * 2.4).unwrap();
            capacity_of(&CapacitySet::from_arc(&arc)).unwrap()
        };
        assert_relative_eq!(scaled, 3.0 * base, max_relative = 1e-6);
        // translation invariance
        let moved = {
            let curve = build_circle([5.0, -7.0], 1.0, 48).unwrap();
            let arc = sub_arc(&curve, 0.3, 2.4).unwrap();
            capacity_of(&CapacitySet::from_arc(&arc)).unwrap()
        };
        assert_relative_eq!(moved, base, max_relative = 1e-10);
    }

    #[test]
    fn monotonicity_under_inclusion() {
        let curve = build_circle([0.0, 0.0], 1.0, 48).unwrap();
        let full = capacity_of(&CapacitySet::from_curve(&curve)).unwrap();
        let half = {
            let arc = sub_arc(&curve, 0.0, PI).unwrap();
            capacity_of(&CapacitySet::from_arc(&arc)).unwrap()
        };
        assert!(half <= full, "monotonicity: {half} > {full}");
        // truncations increase toward the full arc capacity
        let arc = sub_arc(&curve, 0.0, PI).unwrap();
        let caps: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&eps| {
                let tr = truncated_arc(&arc, eps).unwrap();
                capacity_of(&CapacitySet::from_arc(&tr)).unwrap()
            })
            .collect();
        for w in caps.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "not monotone: {caps:?}");
        }
        for &c in &caps {
            assert!(c <= half + 1e-9);
        }
        assert!(half - caps[3] < half - caps[0], "gap not shrinking");
    }

    #[test]
    fn frostman_equalization_on_support() {
        let curve = build_circle([0.0, 0.0], 1.0, 48).unwrap();
        let arc = sub_arc(&curve, 0.5, 2.9).unwrap();
        let set = CapacitySet::from_arc(&arc);
        let e = set.energy_matrix().unwrap();
        let eq = equilibrium(&set).unwrap();
        let n = set.n_panels();
        let mut potentials = Vec::new();
        for p in 0..n {
            if eq.weights[p] > 0.0 {
                let u: f64 = (0..n).map(|k| e[(p, k)] * eq.weights[k]).sum();
                potentials.push(u);
            }
        }
        let mean: f64 = potentials.iter().sum::<f64>() / potentials.len() as f64;
        for &u in &potentials {
            assert!(
                (u - mean).abs() <= 1e-4,
                "potential varies on support: {u} vs mean {mean}"
            );
        }
    }

    #[test]
    fn maximality_under_simplex_perturbations() {
        let curve = build_circle([0.0, 0.0], 1.0, 24).unwrap();
        let arc = sub_arc(&curve, 0.0, 2.0).unwrap();
        let set = CapacitySet::from_arc(&arc);
        let e = set.energy_matrix().unwrap();
        let eq = equilibrium(&set).unwrap();
        let n = set.n_panels();
        let i_star = energy(&set, &eq.weights).unwrap();
        let mut state = 0xfeedfaceu64;
        let mut rnd = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let _ = &e;
        for _ in 0..50 {
            let mut w: Vec<f64> = eq
                .weights
                .iter()
                .map(|&v| (v + 0.2 * (rnd() - 0.5) / n as f64).max(0.0))
                .collect();
            let total: f64 = w.iter().sum();
            for v in &mut w {
                *v /= total;
            }
            let i_val = energy(&set, &w).unwrap();
            assert!(
                i_val >= i_star - 1e-10,
                "perturbation lowered the energy: {i_val} < {i_star}"
            );
        }
    }

    #[test]
    fn zero_length_panel_rejected() {
        let seg = build_segment([1.0, 1.0], [1.0, 1.0], 2).unwrap();
        let set = CapacitySet::from_arc(&seg);
        assert!(matches!(
            set.energy_matrix(),
            Err(CapacityError::PointMassDiagonal(_))
        ));
    }

    #[test]
    fn union_of_two_arcs() {
        // capacity of a union exceeds each part and stays below the full curve
        let curve = build_circle([0.0, 0.0], 1.0, 48).unwrap();
        let a1 = sub_arc(&curve, 0.0, 1.5).unwrap();
        let a2 = sub_arc(&curve, 3.0, 4.5).unwrap();
        let c_union = capacity_of(&CapacitySet::union(vec![
            CapacitySet::from_arc(&a1),
            CapacitySet::from_arc(&a2),
        ]))
        .unwrap();
        let c1 = capacity_of(&CapacitySet::from_arc(&a1)).unwrap();
        let c_full = capacity_of(&CapacitySet::from_curve(&curve)).unwrap();
        assert!(c_union >= c1 && c_union <= c_full + 1e-9);
    }
}
