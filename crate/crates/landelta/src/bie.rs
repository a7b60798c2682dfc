//! Nystrom discretization of the boundary integral operators: the Weyl
//! function M(lambda) with the Landau Green kernel, the single-layer operator
//! with the K0 kernel, gamma-field evaluation off the curve, and the assembled
//! Krein perturbation term.
//!
//! Boundary operators are discretized on a uniform parameter grid with the
//! classical trigonometric product quadrature for the logarithmic kernel
//! ln(4 sin^2((t - t')/2)). The kernels are split as
//!
//!   K(x(t), x(t')) = A~(t, t') ln(4 sin^2((t - t')/2)) + B~(t, t')
//!
//! with smooth A~, B~, so the assembled matrix is spectrally accurate and,
//! after weight symmetrization, Hermitian to machine precision for real
//! spectral parameters (both smooth factors are pointwise Hermitian and the
//! log weights are symmetric). Panel quadrature remains the geometry-side
//! representation; this module re-grids internally.

use crate::geometry::Curve;
use crate::landau::{self, LandauError};
use crate::linalg::{self, CMat};
use crate::specfun::{self, SpecFunError, EULER_GAMMA};
use crate::spectral::StrengthFunction;
use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BieError {
    #[error("spectral parameter too close to a Landau level")]
    OnLandauLevel,
    #[error("target at distance {dist} from the curve; the near-field floor is {floor}")]
    TargetTooClose { dist: f64, floor: f64 },
    #[error("1 + alpha M(lambda) numerically singular (condition {cond:.3e}); lambda is an eigenvalue candidate")]
    SingularBS { cond: f64 },
    #[error(transparent)]
    Landau(#[from] LandauError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Which boundary operator a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Weyl,
    SingleLayer,
    Perturbation,
}

/// The uniform collocation grid the boundary operators live on.
#[derive(Debug, Clone)]
pub struct BieGrid {
    pub shape: crate::geometry::CurveShape,
    pub thetas: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub speeds: Vec<f64>,
    /// Arc-length positions, for sampling strength functions.
    pub s: Vec<f64>,
    /// Arc-length quadrature weights h * speed.
    pub weights: Vec<f64>,
}

impl BieGrid {
    /// Uniform grid with the same node budget as the curve's panelization.
    pub fn from_curve(curve: &Curve) -> Self {
        let n = (curve.n_panels() * curve.pz.order).max(16);
        let n = n + (n % 2); // even for the trigonometric weights
        let period = curve.period();
        let h = period / n as f64;
        let mut thetas = Vec::with_capacity(n);
        let mut points = Vec::with_capacity(n);
        let mut speeds = Vec::with_capacity(n);
        let mut s = Vec::with_capacity(n);
        // arc length accumulated by fine quadrature per cell
        let rule = crate::quad::Quadrature::gauss_legendre(12);
        let mut s_acc = 0.0;
        for k in 0..n {
            let t = k as f64 * h;
            let jet = curve.shape.eval(t);
            let speed = (jet.d1[0] * jet.d1[0] + jet.d1[1] * jet.d1[1]).sqrt();
            thetas.push(t);
            points.push(jet.p);
            speeds.push(speed);
            // s at the node: integral of speed over [0, t] accumulated cellwise
            if k == 0 {
                s.push(0.0);
            } else {
                s_acc += rule.integrate((k - 1) as f64 * h, t, |u| {
                    let j = curve.shape.eval(u);
                    (j.d1[0] * j.d1[0] + j.d1[1] * j.d1[1]).sqrt()
                });
                s.push(s_acc);
            }
        }
        let weights = speeds.iter().map(|sp| sp * h).collect();
        BieGrid {
            shape: curve.shape.clone(),
            thetas,
            points,
            speeds,
            s,
            weights,
        }
    }

    pub fn n(&self) -> usize {
        self.thetas.len()
    }
}

/// Symmetric weights of the trigonometric product quadrature for the
/// ln(4 sin^2((t - t')/2)) factor on an even uniform grid:
/// R[d] for the offset d = (j - k) mod n.
fn kress_log_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let mut r = vec![0.0f64; n];
    for (d, rd) in r.iter_mut().enumerate() {
        let delta = 2.0 * PI * d as f64 / n as f64;
        let mut acc = 0.0;
        for m in 1..half {
            acc += (m as f64 * delta).cos() / m as f64;
        }
        acc += (half as f64 * delta).cos() / n as f64;
        *rd = -4.0 * PI / n as f64 * acc;
    }
    r
}

/// Dense Nystrom matrix in the weighted convention: entry (j, k) approximates
/// kernel(x_j, x_k) * w_k, with the trigonometric log-correction folded in.
pub struct BoundaryMatrix {
    pub kind: BoundaryKind,
    pub lambda: Option<Complex64>,
    pub b: Option<f64>,
    pub entries: CMat,
    pub grid: BieGrid,
}

impl BoundaryMatrix {
    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn weights(&self) -> &[f64] {
        &self.grid.weights
    }

    /// Similarity-symmetrized matrix W^{1/2} M W^{-1/2}; Hermitian for real
    /// lambda up to round-off.
    pub fn symmetrized(&self) -> CMat {
        let n = self.n();
        let w = &self.grid.weights;
        Mat::from_fn(n, n, |j, k| self.entries[(j, k)] * (w[j] / w[k]).sqrt())
    }

    /// Eigenvalues of the Hermitized symmetrization, ascending.
    pub fn symmetrized_eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.symmetrized())
    }

    /// Spectral norm of the symmetrized matrix.
    pub fn operator_norm(&self) -> f64 {
        linalg::operator_norm(&self.symmetrized())
    }

    /// Raw little-endian complex128 array (row-major), for caching.
    pub fn to_raw_bytes(&self) -> Vec<u8> {
        let n = self.n();
        let mut out = Vec::with_capacity(16 * n * n);
        for j in 0..n {
            for k in 0..n {
                let z = self.entries[(j, k)];
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_raw_bytes(
        kind: BoundaryKind,
        lambda: Option<Complex64>,
        b: Option<f64>,
        grid: BieGrid,
        bytes: &[u8],
    ) -> Option<Self> {
        let n = grid.n();
        if bytes.len() != 16 * n * n {
            return None;
        }
        let entries = Mat::from_fn(n, n, |j, k| {
            let off = 16 * (j * n + k);
            let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
            Complex64::new(re, im)
        });
        Some(BoundaryMatrix {
            kind,
            lambda,
            b,
            entries,
            grid,
        })
    }
}

/// The two smooth factors of the kernel split at one node pair.
#[derive(Clone, Copy)]
struct SplitValue {
    a_tilde: Complex64,
    b_hat: Complex64,
}

trait TrigKernel: Sync {
    /// Split factors for j != k.
    fn pair(&self, j: usize, k: usize, grid: &BieGrid) -> SplitValue;
    /// Split factors at the diagonal.
    fn diagonal(&self, j: usize, grid: &BieGrid) -> SplitValue;
}

fn chord(grid: &BieGrid, j: usize, k: usize) -> f64 {
    let a = grid.points[j];
    let b = grid.points[k];
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

struct WeylTrigKernel {
    b: f64,
    a: Complex64,
}

impl TrigKernel for WeylTrigKernel {
    fn pair(&self, j: usize, k: usize, grid: &BieGrid) -> SplitValue {
        let d = chord(grid, j, k);
        let xi = 0.5 * self.b * d * d;
        let phi = landau::phase_factor(grid.points[j], grid.points[k], self.b);
        let delta = grid.thetas[j] - grid.thetas[k];
        let sin_half = 2.0 * (0.5 * delta).sin().abs();
        let parts = specfun::kummer_log_parts(self.a, xi, &Default::default())
            .expect("log-series convergence for moderate a*xi");
        // K = A ln d + B_rest, A = -Phi M/(2 pi)
        let a_full = -phi / (2.0 * PI) * parts.m;
        let b_rest =
            -phi / (4.0 * PI) * (parts.m * (0.5 * self.b).ln() + parts.s);
        let b_hat = a_full * (d / sin_half).ln() + b_rest;
        SplitValue {
            a_tilde: 0.5 * a_full,
            b_hat,
        }
    }

    fn diagonal(&self, j: usize, grid: &BieGrid) -> SplitValue {
        let speed = grid.speeds[j];
        let a_full = Complex64::new(-1.0 / (2.0 * PI), 0.0);
        let psi_a = specfun::digamma(self.a);
        let b_rest = -(Complex64::new((0.5 * self.b).ln() + 2.0 * EULER_GAMMA, 0.0) + psi_a)
            / (4.0 * PI);
        SplitValue {
            a_tilde: 0.5 * a_full,
            b_hat: a_full * speed.ln() + b_rest,
        }
    }
}

struct SingleLayerTrigKernel;

impl TrigKernel for SingleLayerTrigKernel {
    fn pair(&self, j: usize, k: usize, grid: &BieGrid) -> SplitValue {
        let d = chord(grid, j, k);
        let delta = grid.thetas[j] - grid.thetas[k];
        let sin_half = 2.0 * (0.5 * delta).sin().abs();
        let a_full = -specfun::bessel_i0(d) / (2.0 * PI);
        let b_hat = a_full * (d / sin_half).ln() + specfun::bessel_k0_smooth(d) / (2.0 * PI);
        SplitValue {
            a_tilde: Complex64::new(0.5 * a_full, 0.0),
            b_hat: Complex64::new(b_hat, 0.0),
        }
    }

    fn diagonal(&self, j: usize, grid: &BieGrid) -> SplitValue {
        let speed = grid.speeds[j];
        let a_full = -1.0 / (2.0 * PI);
        let b_hat = a_full * speed.ln() + (2.0f64.ln() - EULER_GAMMA) / (2.0 * PI);
        SplitValue {
            a_tilde: Complex64::new(0.5 * a_full, 0.0),
            b_hat: Complex64::new(b_hat, 0.0),
        }
    }
}

fn assemble(grid: &BieGrid, kernel: &dyn TrigKernel) -> CMat {
    let n = grid.n();
    let h = 2.0 * PI / n as f64;
    let r = kress_log_weights(n);
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut row = vec![Complex64::new(0.0, 0.0); n];
            for k in 0..n {
                let sv = if j == k {
                    kernel.diagonal(j, grid)
                } else {
                    kernel.pair(j, k, grid)
                };
                let d = (j + n - k) % n;
                row[k] = (sv.a_tilde * r[d] + sv.b_hat * h) * grid.speeds[k];
            }
            row
        })
        .collect();
    Mat::from_fn(n, n, |j, k| rows[j][k])
}

/// Nystrom matrix of the Weyl function M(lambda) on the curve.
pub fn assemble_weyl(curve: &Curve, lambda: Complex64, b: f64) -> Result<BoundaryMatrix, BieError> {
    let (_, dist) = landau::nearest_level(lambda, b);
    if dist < landau::on_level_tolerance(b) {
        return Err(BieError::OnLandauLevel);
    }
    let grid = BieGrid::from_curve(curve);
    assemble_weyl_on_grid(grid, lambda, b)
}

/// Assembly over an existing grid (reused across a lambda scan).
pub fn assemble_weyl_on_grid(
    grid: BieGrid,
    lambda: Complex64,
    b: f64,
) -> Result<BoundaryMatrix, BieError> {
    let (_, dist) = landau::nearest_level(lambda, b);
    if dist < landau::on_level_tolerance(b) {
        return Err(BieError::OnLandauLevel);
    }
    let a = (b - lambda) / (2.0 * b);
    // The logarithmic split loses ~e^{2 sqrt(a xi)} to cancellation; for
    // deeply negative lambda (a xi large anywhere on the curve) switch to the
    // direct assembly, whose mild O(h^2 ln h) error is ample for the
    // norm-decay uses of that regime.
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &grid.points {
        xmin = xmin.min(p[0]);
        xmax = xmax.max(p[0]);
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let diam2 = (xmax - xmin).powi(2) + (ymax - ymin).powi(2);
    let xi_max = 0.5 * b * diam2;
    let entries = if a.re > 3.0 && a.re * xi_max > 25.0 {
        assemble_weyl_deep(&grid, lambda, b)
    } else {
        let kernel = WeylTrigKernel { b, a };
        assemble(&grid, &kernel)
    };
    Ok(BoundaryMatrix {
        kind: BoundaryKind::Weyl,
        lambda: Some(lambda),
        b: Some(b),
        entries,
        grid,
    })
}

/// Direct assembly for deeply negative lambda: symmetric kernel values off
/// the diagonal, a graded integral over the grid cell on the diagonal.
fn assemble_weyl_deep(grid: &BieGrid, lambda: Complex64, b: f64) -> CMat {
    let n = grid.n();
    let h = 2.0 * PI / n as f64;
    let rule = crate::quad::Quadrature::gauss_legendre(12);
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut row = vec![Complex64::new(0.0, 0.0); n];
            let x = grid.points[j];
            for k in 0..n {
                if k != j {
                    row[k] = landau::green_function(x, grid.points[k], lambda, b)
                        .expect("guarded by assemble_weyl")
                        * grid.weights[k];
                }
            }
            // diagonal cell [theta_j - h/2, theta_j + h/2], graded toward the
            // logarithmic singularity at theta_j
            let theta_j = grid.thetas[j];
            let mut acc = Complex64::new(0.0, 0.0);
            for side in [-1.0f64, 1.0] {
                let mut lo = 1e-11 * h;
                while lo < 0.5 * h {
                    let hi = (2.0 * lo).min(0.5 * h);
                    let c = 0.5 * (lo + hi);
                    let half = 0.5 * (hi - lo);
                    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                        let theta = theta_j + side * (c + half * t);
                        let jet = grid.shape.eval(theta);
                        let speed =
                            (jet.d1[0] * jet.d1[0] + jet.d1[1] * jet.d1[1]).sqrt();
                        acc += landau::green_function(x, jet.p, lambda, b)
                            .expect("guarded by assemble_weyl")
                            * (w * half * speed);
                    }
                    lo = hi;
                }
            }
            row[j] = acc;
            row
        })
        .collect();
    Mat::from_fn(n, n, |j, k| rows[j][k])
}

/// Nystrom matrix of the single-layer operator with kernel K0(|x-y|)/(2 pi).
pub fn assemble_single_layer(curve: &Curve) -> BoundaryMatrix {
    let grid = BieGrid::from_curve(curve);
    let entries = assemble(&grid, &SingleLayerTrigKernel);
    BoundaryMatrix {
        kind: BoundaryKind::SingleLayer,
        lambda: None,
        b: None,
        entries,
        grid,
    }
}

/// Evaluate the gamma-field (single-layer potential with the Landau kernel)
/// at off-curve targets. Targets closer than one panel length are rejected.
pub fn gamma_apply(
    curve: &Curve,
    lambda: Complex64,
    b: f64,
    density: &[Complex64],
    targets: &[[f64; 2]],
) -> Result<Vec<Complex64>, BieError> {
    assert_eq!(density.len(), curve.nodes().len());
    let (_, dist) = landau::nearest_level(lambda, b);
    if dist < landau::on_level_tolerance(b) {
        return Err(BieError::OnLandauLevel);
    }
    let floor = curve.total_length() / curve.n_panels() as f64;
    let mut out = Vec::with_capacity(targets.len());
    for &x in targets {
        let min_d = curve
            .nodes()
            .iter()
            .map(|n| ((x[0] - n.point[0]).powi(2) + (x[1] - n.point[1]).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        if min_d < floor {
            return Err(BieError::TargetTooClose { dist: min_d, floor });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (node, &phi) in curve.nodes().iter().zip(density) {
            acc += landau::green_function(x, node.point, lambda, b)? * phi * node.weight;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Condition-number ceiling before a Birman-Schwinger system is declared
/// singular (i.e. lambda is treated as an eigenvalue).
pub const SINGULAR_BS_CONDITION: f64 = 1e12;

/// The boundary-side factor of the Krein perturbation term,
/// X = alpha_2 (1 + alpha_1 M alpha_2)^{-1} alpha_1 in node-value convention,
/// so that the perturbation kernel is W(x, z) = -(u_x . w)^T X g_z.
pub struct KreinCore {
    pub x_matrix: CMat,
    pub condition: f64,
}

/// Builds the Krein inner factor. `factorized` selects the
/// alpha_1 = sign(alpha)|alpha|^{1/2}, alpha_2 = |alpha|^{1/2} splitting; the
/// plain route uses (1 + alpha M)^{-1} alpha directly.
pub fn krein_core(
    weyl: &BoundaryMatrix,
    alpha: &StrengthFunction,
    factorized: bool,
) -> Result<KreinCore, BieError> {
    let n = weyl.n();
    let m = &weyl.entries;
    let a_vals: Vec<f64> = weyl.grid.s.iter().map(|&s| alpha.sample(s)).collect();
    let (a1, a2): (Vec<f64>, Vec<f64>) = if factorized {
        (
            a_vals.iter().map(|&v| v.signum() * v.abs().sqrt()).collect(),
            a_vals.iter().map(|&v| v.abs().sqrt()).collect(),
        )
    } else {
        (a_vals.clone(), vec![1.0; n])
    };
    // B = I + D_{a1} M D_{a2}
    let bsys: CMat = Mat::from_fn(n, n, |j, k| {
        let id = if j == k {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        id + a1[j] * m[(j, k)] * a2[k]
    });
    let condition = linalg::condition_number(&bsys);
    if !condition.is_finite() || condition > SINGULAR_BS_CONDITION {
        return Err(BieError::SingularBS { cond: condition });
    }
    let rhs: CMat = Mat::from_fn(n, n, |j, k| {
        if j == k {
            Complex64::new(a1[j], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let inv_a1 = linalg::solve(&bsys, &rhs); // (I + a1 M a2)^{-1} D_{a1}
    let x_matrix = Mat::from_fn(n, n, |j, k| a2[j] * inv_a1[(j, k)]);
    Ok(KreinCore {
        x_matrix,
        condition,
    })
}

/// Kernel of the resolvent difference W_lambda sampled on grid x grid:
/// W(x_a, x_b) = -gamma(lambda) alpha_2 (1 + alpha_1 M alpha_2)^{-1} alpha_1 gamma(conj lambda)^*.
pub fn assemble_perturbation(
    curve: &Curve,
    alpha: &StrengthFunction,
    lambda: Complex64,
    b: f64,
    grid: &[[f64; 2]],
    factorized: bool,
) -> Result<CMat, BieError> {
    let weyl = assemble_weyl(curve, lambda, b)?;
    let core = krein_core(&weyl, alpha, factorized)?;
    let n = weyl.n();
    let ng = grid.len();
    let points = &weyl.grid.points;
    let weights = &weyl.grid.weights;
    // u[a][j] = G(x_a, y_j), g[b][k] = G(y_k, x_b)
    let u: Vec<Vec<Complex64>> = grid
        .par_iter()
        .map(|&x| {
            points
                .iter()
                .map(|&p| landau::green_function(x, p, lambda, b).expect("guarded"))
                .collect()
        })
        .collect();
    let g: Vec<Vec<Complex64>> = grid
        .par_iter()
        .map(|&x| {
            points
                .iter()
                .map(|&p| landau::green_function(p, x, lambda, b).expect("guarded"))
                .collect()
        })
        .collect();
    // W = -(U . w) X G^T
    let uw: CMat = Mat::from_fn(ng, n, |a, j| u[a][j] * weights[j]);
    let gx: CMat = Mat::from_fn(n, ng, |k, bcol| g[bcol][k]);
    let prod = &uw * &core.x_matrix * &gx;
    Ok(Mat::from_fn(ng, ng, |i, j| -prod[(i, j)]))
}
