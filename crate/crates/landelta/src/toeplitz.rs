//! Toeplitz-type operators of the Landau levels: the compression of the
//! restriction-to-Gamma form onto the q-th level, realized as the Gram matrix
//! of Landau modes restricted to the curve or arc, with factorial
//! singular-value asymptotics governed by the logarithmic capacity.

use crate::geometry::{panelize, Arc, Curve, CurveNode};
use crate::landau::{mode_eval, LandauMode};
use crate::linalg::{self, CMat};
use crate::specfun::ln_factorial;
use faer::Mat;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToeplitzError {
    #[error("only {0} reliable singular values; at least {1} required")]
    TooFewValues(usize, usize),
}

/// Singular values below this floor are round-off of the double-precision
/// Gram assembly and are discarded.
pub const SVAL_FLOOR: f64 = 1e-13;

/// The restriction set Gamma: a full closed curve or a sub-arc.
pub enum Gamma<'a> {
    Curve(&'a Curve),
    Arc(&'a Arc),
}

impl Gamma<'_> {
    fn length(&self) -> f64 {
        match self {
            Gamma::Curve(c) => c.total_length(),
            Gamma::Arc(a) => a.length(),
        }
    }

    /// Nodes re-panelled finely enough that the panel Gauss rule resolves
    /// angular oscillations up to `max_freq` about the given center.
    fn refined_nodes(&self, max_freq: f64) -> Vec<CurveNode> {
        let (shape, window, s0, base_panels) = match self {
            Gamma::Curve(c) => (&c.shape, [0.0, c.period()], 0.0, c.n_panels()),
            Gamma::Arc(a) => {
                let w = [a.pz.panels[0][0], a.pz.panels[a.pz.panels.len() - 1][1]];
                (&a.parent.shape, w, a.s_window.0, a.pz.panels.len())
            }
        };
        let span = window[1] - window[0];
        // keep (frequency x panel width) small enough for order-8 Gauss
        let needed = ((span * max_freq / 2.0).ceil() as usize)
            .max(base_panels)
            .max(2);
        panelize(shape, window[0], window[1], needed, s0).nodes
    }
}

/// Hermitian positive-semidefinite Gram matrix
/// G[m, m'] = integral_Gamma conj(psi_{q,m}) psi_{q,m'} d sigma.
pub struct ToeplitzMatrix {
    pub q: usize,
    pub b: f64,
    /// Angular mode window (ascending).
    pub modes: Vec<i64>,
    /// Center the modes were built around (arc centroid when recentered).
    pub center: [f64; 2],
    pub entries: CMat,
    /// Length of the restriction set.
    pub gamma_length: f64,
}

impl ToeplitzMatrix {
    /// Eigenvalues of the Hermitian PSD Gram matrix, nonincreasing; these
    /// coincide with the singular values.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut e = linalg::hermitian_eigenvalues(&self.entries);
        e.reverse();
        e
    }

    /// Diagonal entries indexed by angular mode.
    pub fn diagonal(&self) -> Vec<(i64, f64)> {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, self.entries[(i, i)].re))
            .collect()
    }
}

/// Default mode window [-q, M]: M is chosen so the Gaussian mode mass on the
/// bounding annulus of Gamma falls below the assembly floor.
pub fn default_mode_cap(q: usize, b: f64, r_max: f64) -> i64 {
    let e2 = std::f64::consts::E * std::f64::consts::E;
    (0.5 * b * r_max * r_max * e2 + 40.0).ceil() as i64 + q as i64
}

/// Assemble the Gram matrix of level-q modes restricted to Gamma.
///
/// `recenter` shifts the mode basis to the centroid of Gamma; the spectrum is
/// invariant under the accompanying magnetic translation in exact arithmetic,
/// and the shift delays Gaussian underflow for arcs far from the origin.
pub fn assemble_toeplitz(
    q: usize,
    gamma: &Gamma,
    b: f64,
    m_max: Option<i64>,
    recenter: bool,
) -> ToeplitzMatrix {
    let rough_nodes = match gamma {
        Gamma::Curve(c) => c.nodes(),
        Gamma::Arc(a) => a.nodes(),
    };
    let wsum: f64 = rough_nodes.iter().map(|n| n.weight).sum();
    let center = if recenter && wsum > 0.0 {
        let cx = rough_nodes.iter().map(|n| n.point[0] * n.weight).sum::<f64>() / wsum;
        let cy = rough_nodes.iter().map(|n| n.point[1] * n.weight).sum::<f64>() / wsum;
        [cx, cy]
    } else {
        [0.0, 0.0]
    };
    let r_max = rough_nodes
        .iter()
        .map(|n| ((n.point[0] - center[0]).powi(2) + (n.point[1] - center[1]).powi(2)).sqrt())
        .fold(0.0f64, f64::max);
    let m_hi = m_max.unwrap_or_else(|| default_mode_cap(q, b, r_max));
    let modes: Vec<i64> = (-(q as i64)..=m_hi).collect();
    let max_freq = (m_hi + q as i64) as f64;
    let nodes = gamma.refined_nodes(max_freq);
    assemble_toeplitz_nodes(q, &nodes, b, &modes, center, gamma.length())
}

/// Gram assembly over an explicit node set (the quadrature the caller chose).
pub(crate) fn assemble_toeplitz_nodes(
    q: usize,
    nodes: &[CurveNode],
    b: f64,
    modes: &[i64],
    center: [f64; 2],
    gamma_length: f64,
) -> ToeplitzMatrix {
    let nm = modes.len();
    let nn = nodes.len();
    // V[j, i] = psi_{q, m_i}(y_j - center), Gram = V^H diag(w) V
    let v: CMat = Mat::from_fn(nn, nm, |j, i| {
        let mode = LandauMode::new(q, modes[i], b).expect("mode window respects m >= -q");
        let p = nodes[j].point;
        mode_eval(&mode, [p[0] - center[0], p[1] - center[1]]).expect("valid mode")
    });
    let entries: CMat = Mat::from_fn(nm, nm, |r, c| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..nn {
            acc += v[(j, r)].conj() * v[(j, c)] * nodes[j].weight;
        }
        acc
    });
    ToeplitzMatrix {
        q,
        b,
        modes: modes.to_vec(),
        center,
        entries,
        gamma_length,
    }
}

/// Asymptotic diagnostics b_k = (k! s_k)^{1/k} (log space) with the capacity
/// comparison target (B/2) Cap(Gamma)^2.
#[derive(Debug, Clone)]
pub struct ToeplitzAsymptotics {
    pub b_k: Vec<(usize, f64)>,
    pub tail_estimate: f64,
    pub target: f64,
}

pub fn toeplitz_asymptotics(
    svals: &[f64],
    b: f64,
    cap_gamma: f64,
) -> Result<ToeplitzAsymptotics, ToeplitzError> {
    let reliable: Vec<f64> = svals
        .iter()
        .copied()
        .take_while(|&s| s > SVAL_FLOOR)
        .collect();
    if reliable.len() < 5 {
        return Err(ToeplitzError::TooFewValues(reliable.len(), 5));
    }
    let b_k: Vec<(usize, f64)> = reliable
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let k = i + 1;
            (k, ((ln_factorial(k) + s.ln()) / k as f64).exp())
        })
        .collect();
    let mut last: Vec<f64> = b_k[b_k.len() - 3..].iter().map(|p| p.1).collect();
    last.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ToeplitzAsymptotics {
        b_k,
        tail_estimate: last[1],
        target: 0.5 * b * cap_gamma * cap_gamma,
    })
}
