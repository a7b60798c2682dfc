//! Birman-Schwinger eigenvalue solver: locates the discrete spectrum of the
//! delta-perturbed Landau Hamiltonian in the gaps between Landau levels via
//! the -1 crossings of the boundary operator family
//! K(lambda) = sign(alpha) |alpha|^{1/2} M(lambda) |alpha|^{1/2},
//! classifies cluster sides, and computes per-level cluster asymptotics.

use crate::bie::{self, BieError};
use crate::geometry::{Arc, Curve};
use crate::landau::{landau_level, on_level_tolerance};
use crate::linalg::{self, CMat};
use crate::specfun::ln_factorial;
use faer::Mat;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("lambda grid touches a Landau level")]
    OnLandauLevel,
    #[error("no eigenvalues found for q = {q}, side {side:?} (a legal outcome for sign-definite strengths)")]
    NoEigenvaluesFound { q: usize, side: Side },
    #[error("cluster has only {0} eigenvalues; at least {1} required")]
    TooFewEigenvalues(usize, usize),
    #[error("mode truncations of the two operators do not match")]
    TruncationMismatch,
    #[error(transparent)]
    Bie(#[from] BieError),
}

/// Which side of the Landau level a cluster sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

/// Where a strength function lives on its curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    Full,
    /// Arc-length window [s_a, s_b] on the parent curve.
    Window(f64, f64),
}

/// How alpha is defined as a function of arc length; kept alongside the
/// node samples so the boundary-operator grid can resample it.
#[derive(Clone)]
pub enum AlphaSpec {
    Constant(f64),
    /// `value` inside the arc-length window, zero outside.
    Window { s_a: f64, s_b: f64, value: f64 },
    Custom(std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// The real delta-coupling coefficient alpha: node samples on the curve plus
/// the defining rule for resampling.
#[derive(Clone)]
pub struct StrengthFunction {
    pub spec: AlphaSpec,
    /// Samples at the curve nodes.
    pub values: Vec<f64>,
    pub support: Support,
    pub sup_norm: f64,
}

impl std::fmt::Debug for StrengthFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StrengthFunction")
            .field("support", &self.support)
            .field("sup_norm", &self.sup_norm)
            .field("n_samples", &self.values.len())
            .finish()
    }
}

impl StrengthFunction {
    fn build(curve: &Curve, spec: AlphaSpec, support: Support) -> Self {
        let values: Vec<f64> = curve.nodes().iter().map(|n| sample_spec(&spec, n.s)).collect();
        let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        StrengthFunction {
            spec,
            values,
            support,
            sup_norm,
        }
    }

    pub fn constant(curve: &Curve, c: f64) -> Self {
        Self::build(curve, AlphaSpec::Constant(c), Support::Full)
    }

    /// Constant value on the arc-length window, zero elsewhere.
    pub fn windowed_constant(curve: &Curve, s_a: f64, s_b: f64, value: f64) -> Self {
        Self::build(
            curve,
            AlphaSpec::Window { s_a, s_b, value },
            Support::Window(s_a, s_b),
        )
    }

    /// alpha(s) given by an arbitrary function of arc length.
    pub fn from_fn(curve: &Curve, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::build(
            curve,
            AlphaSpec::Custom(std::sync::Arc::new(f)),
            Support::Full,
        )
    }

    /// Strength equal to `f(s)` on the arc-length window of `arc` and zero on
    /// the rest of its parent curve.
    pub fn on_arc(
        curve: &Curve,
        arc: &Arc,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let (s_a, s_b) = arc.s_window;
        let spec = AlphaSpec::Custom(std::sync::Arc::new(move |s: f64| {
            if s >= s_a && s <= s_b {
                f(s)
            } else {
                0.0
            }
        }));
        Self::build(curve, spec, Support::Window(s_a, s_b))
    }

    /// alpha at an arbitrary arc-length position.
    pub fn sample(&self, s: f64) -> f64 {
        sample_spec(&self.spec, s)
    }

    /// Indices of curve nodes where alpha does not vanish.
    pub fn support_indices(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn is_nonpositive(&self) -> bool {
        self.values.iter().all(|&v| v <= 0.0)
    }

    pub fn is_sign_definite(&self) -> bool {
        self.is_nonnegative() || self.is_nonpositive()
    }
}

fn sample_spec(spec: &AlphaSpec, s: f64) -> f64 {
    match spec {
        AlphaSpec::Constant(c) => *c,
        AlphaSpec::Window { s_a, s_b, value } => {
            if s >= *s_a && s <= *s_b {
                *value
            } else {
                0.0
            }
        }
        AlphaSpec::Custom(f) => f(s),
    }
}

/// Eigenvalue floor: below this distance from a Landau level the factorial
/// clustering exhausts double precision and values are flagged unreliable.
pub const RELIABLE_GAP_FLOOR: f64 = 1e-11;

/// One perturbed eigenvalue in a cluster.
#[derive(Debug, Clone, Copy)]
pub struct ClusterEigenvalue {
    /// 1-based index counted from the farthest eigenvalue in the gap window,
    /// multiplicities included.
    pub k: usize,
    pub lambda: f64,
    /// |lambda - Lambda_q|.
    pub gap: f64,
    pub multiplicity: usize,
    /// Distance below RELIABLE_GAP_FLOOR * B.
    pub reliable: bool,
}

/// Per-level list of perturbed eigenvalues with side label and diagnostics.
#[derive(Debug, Clone)]
pub struct ClusterReport {
    pub q: usize,
    pub side: Side,
    pub b: f64,
    /// Sorted by gap nonincreasing; `k` indices follow this order and expand
    /// multiplicities.
    pub eigenvalues: Vec<ClusterEigenvalue>,
}

impl ClusterReport {
    /// Sequence a_k = (k! * gap_k)^{1/k} computed in log space, one entry per
    /// eigenvalue copy (multiplicities expanded).
    pub fn a_sequence(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for ev in &self.eigenvalues {
            for copy in 0..ev.multiplicity {
                let k = ev.k + copy;
                let a = ((ln_factorial(k) + ev.gap.max(1e-300).ln()) / k as f64).exp();
                out.push((k, a));
            }
        }
        out
    }
}

/// The Birman-Schwinger matrix K(lambda) restricted to the support nodes of
/// the boundary grid, in the weight-symmetrized convention.
fn bs_matrix(
    grid: &bie::BieGrid,
    alpha_at_grid: &[f64],
    lambda: f64,
    b: f64,
    support: &[usize],
) -> Result<CMat, SpectralError> {
    let weyl = bie::assemble_weyl_on_grid(grid.clone(), Complex64::new(lambda, 0.0), b)?;
    let sym = weyl.symmetrized();
    let m = support.len();
    let k = Mat::from_fn(m, m, |r, c| {
        let (j, kk) = (support[r], support[c]);
        let a_j = alpha_at_grid[j];
        let a_k = alpha_at_grid[kk];
        a_j.signum() * a_j.abs().sqrt() * sym[(j, kk)] * a_k.abs().sqrt()
    });
    Ok(k)
}

/// Eigenvalues of K(lambda), ascending. Hermitian solve for sign-definite
/// strengths; for sign-changing strengths the (generically near-real)
/// eigenvalues of the non-Hermitian matrix are returned by their real parts.
fn bs_eigenvalues(
    grid: &bie::BieGrid,
    alpha_at_grid: &[f64],
    lambda: f64,
    b: f64,
    support: &[usize],
    sign_definite: bool,
) -> Result<Vec<f64>, SpectralError> {
    let k = bs_matrix(grid, alpha_at_grid, lambda, b, support)?;
    let mut eigs: Vec<f64> = if sign_definite {
        linalg::hermitian_eigenvalues(&k)
    } else {
        linalg::general_eigenvalues(&k)
            .into_iter()
            .map(|z| z.re)
            .collect()
    };
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eigs)
}

/// Boundary grid plus alpha samples and support bookkeeping for a scan.
struct ScanSetup {
    grid: bie::BieGrid,
    alpha_at_grid: Vec<f64>,
    support: Vec<usize>,
    sign_definite: bool,
}

fn scan_setup(curve: &Curve, alpha: &StrengthFunction) -> ScanSetup {
    let grid = bie::BieGrid::from_curve(curve);
    let alpha_at_grid: Vec<f64> = grid.s.iter().map(|&s| alpha.sample(s)).collect();
    let support: Vec<usize> = alpha_at_grid
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, _)| i)
        .collect();
    ScanSetup {
        grid,
        alpha_at_grid,
        support,
        sign_definite: alpha.is_sign_definite(),
    }
}

/// Per-lambda sorted eigenvalue tracks of K(lambda) over a grid inside one
/// spectral gap, matched across the grid by nearest-neighbor (order-preserving)
/// pairing.
pub struct EigencurveScan {
    pub lambdas: Vec<f64>,
    /// tracks[j][i] = mu_j(lambda_i), j-th track.
    pub tracks: Vec<Vec<f64>>,
}

pub fn bs_eigencurves(
    curve: &Curve,
    alpha: &StrengthFunction,
    lambda_grid: &[f64],
    b: f64,
) -> Result<EigencurveScan, SpectralError> {
    for &l in lambda_grid {
        let (_, dist) = crate::landau::nearest_level(Complex64::new(l, 0.0), b);
        if dist < 1e-6 * b {
            return Err(SpectralError::OnLandauLevel);
        }
    }
    let setup = scan_setup(curve, alpha);
    if setup.support.is_empty() {
        return Ok(EigencurveScan {
            lambdas: lambda_grid.to_vec(),
            tracks: Vec::new(),
        });
    }
    let mut tracks: Vec<Vec<f64>> =
        vec![Vec::with_capacity(lambda_grid.len()); setup.support.len()];
    for &l in lambda_grid {
        let eigs = bs_eigenvalues(
            &setup.grid,
            &setup.alpha_at_grid,
            l,
            b,
            &setup.support,
            setup.sign_definite,
        )?;
        // both the previous column and the new one are sorted, so the
        // order-preserving pairing is the nearest-neighbor matching
        for (track, &e) in tracks.iter_mut().zip(&eigs) {
            track.push(e);
        }
    }
    Ok(EigencurveScan {
        lambdas: lambda_grid.to_vec(),
        tracks,
    })
}

/// Scan resolution (points per gap) used by the cluster finder.
pub const SCAN_POINTS: usize = 400;

/// Find the k_max eigenvalues of the perturbed operator nearest Lambda_q on
/// the given side, by a geometrically refined scan of the counting function
/// N(lambda) = #{ eigenvalues of K(lambda) <= -1 } plus per-crossing bisection.
pub fn find_cluster_eigenvalues(
    curve: &Curve,
    alpha: &StrengthFunction,
    q: usize,
    side: Side,
    k_max: usize,
    b: f64,
) -> Result<ClusterReport, SpectralError> {
    let setup = scan_setup(curve, alpha);
    if setup.support.is_empty() {
        return Err(SpectralError::NoEigenvaluesFound { q, side });
    }
    let lq = landau_level(q, b);
    // distances from the level: geometric from the gap edge down to the
    // double-precision floor
    let dist_hi = b;
    let dist_lo = (1e-12 * b).max(on_level_tolerance(b));
    let n_scan = SCAN_POINTS;
    let ratio = (dist_lo / dist_hi).powf(1.0 / (n_scan as f64 - 1.0));
    let lambda_at = |dist: f64| -> f64 {
        match side {
            Side::Above => lq + dist,
            Side::Below => lq - dist,
        }
    };
    let count = |dist: f64| -> Result<usize, SpectralError> {
        let eigs = bs_eigenvalues(
            &setup.grid,
            &setup.alpha_at_grid,
            lambda_at(dist),
            b,
            &setup.support,
            setup.sign_definite,
        )?;
        Ok(eigs.iter().filter(|&&e| e <= -1.0).count())
    };

    // Walk from the far edge toward the level, bracketing each jump of the
    // counting function.
    struct Found {
        dist: f64,
        multiplicity: usize,
    }
    let mut found: Vec<Found> = Vec::new();
    let mut d_prev = dist_hi;
    let mut n_prev = count(d_prev)?;
    let mut d = dist_hi * ratio;
    let mut steps = 1;
    // the full geometric grid is always walked: eigenvalues accumulate at the
    // level, so "nearest" can only be decided once the floor is reached
    while d > dist_lo {
        let n_here = count(d)?;
        if n_here > n_prev {
            // one or more crossings in (d, d_prev); separate them by bisection
            // in the log-distance coordinate
            let mut stack = vec![(d, d_prev, n_here, n_prev)];
            while let Some((da, db, na, nb)) = stack.pop() {
                let jump = na - nb;
                if jump == 0 {
                    continue;
                }
                if jump == 1 || db - da < 1e-13 * b {
                    // bisect this single crossing to 1e-10 * B
                    let (mut lo, mut hi) = (da, db);
                    for _ in 0..200 {
                        if hi - lo < 1e-10 * b || hi / lo < 1.0 + 1e-6 {
                            break;
                        }
                        let mid = (lo * hi).sqrt();
                        if count(mid)? > nb {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    found.push(Found {
                        dist: 0.5 * (lo + hi),
                        multiplicity: jump,
                    });
                } else {
                    let mid = (da * db).sqrt();
                    let nm = count(mid)?;
                    stack.push((mid, db, nm, nb));
                    stack.push((da, mid, na, nm));
                }
            }
        }
        n_prev = n_here;
        d_prev = d;
        d *= ratio;
        steps += 1;
        if steps > 4 * n_scan {
            break;
        }
    }
    if found.is_empty() {
        return Err(SpectralError::NoEigenvaluesFound { q, side });
    }
    // sort by distance nonincreasing, assign true k indices, keep the k_max nearest
    found.sort_by(|p, q| q.dist.partial_cmp(&p.dist).unwrap());
    let mut eigenvalues = Vec::new();
    let mut k_index = 1usize;
    for f in &found {
        eigenvalues.push(ClusterEigenvalue {
            k: k_index,
            lambda: lambda_at(f.dist),
            gap: f.dist,
            multiplicity: f.multiplicity,
            reliable: f.dist >= RELIABLE_GAP_FLOOR * b,
        });
        k_index += f.multiplicity;
    }
    // keep the k_max nearest (the tail of the nonincreasing-gap list),
    // preserving the true indices
    let total: usize = eigenvalues.iter().map(|e| e.multiplicity).sum();
    if total > k_max {
        let mut drop = total - k_max;
        while drop > 0 && !eigenvalues.is_empty() {
            if eigenvalues[0].multiplicity <= drop {
                drop -= eigenvalues[0].multiplicity;
                eigenvalues.remove(0);
            } else {
                break;
            }
        }
    }
    // every eigenvalue sits strictly inside the gap; the scan floor keeps it
    // clear of the level itself
    debug_assert!(eigenvalues.iter().all(|e| e.gap >= dist_lo * 0.99));
    Ok(ClusterReport {
        q,
        side,
        b,
        eigenvalues,
    })
}

/// Asymptotic diagnostics for a cluster: the sequence a_k = (k! gap_k)^{1/k}
/// and a tail estimate (median of the last three available a_k).
#[derive(Debug, Clone)]
pub struct ClusterAsymptotics {
    pub a_k: Vec<(usize, f64)>,
    pub tail_estimate: f64,
}

pub fn cluster_asymptotics(report: &ClusterReport) -> Result<ClusterAsymptotics, SpectralError> {
    let a_k = report.a_sequence();
    if a_k.len() < 3 {
        return Err(SpectralError::TooFewEigenvalues(a_k.len(), 3));
    }
    let mut last: Vec<f64> = a_k[a_k.len() - 3..].iter().map(|p| p.1).collect();
    last.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ClusterAsymptotics {
        a_k,
        tail_estimate: last[1],
    })
}

/// Weighted summability evidence per Landau level:
/// S = sum_q (2q+1)^{-2} sum_k |lambda_k^{+-}(q) - Lambda_q|.
#[derive(Debug, Clone)]
pub struct SummabilityReport {
    /// (q, inner sum above, inner sum below)
    pub per_q: Vec<(usize, f64, f64)>,
    pub total: f64,
}

pub fn summability_report(
    curve: &Curve,
    alpha: &StrengthFunction,
    b: f64,
    q_max: usize,
    k_max: usize,
) -> Result<SummabilityReport, SpectralError> {
    let mut per_q = Vec::new();
    let mut total = 0.0;
    for q in 0..=q_max {
        let mut sums = [0.0f64; 2];
        for (i, side) in [Side::Above, Side::Below].into_iter().enumerate() {
            // the inner sum runs over the first k_max eigenvalues in the
            // distance-nonincreasing ordering; ask the finder for everything
            // and truncate by the true index
            match find_cluster_eigenvalues(curve, alpha, q, side, k_max.max(48), b) {
                Ok(rep) => {
                    sums[i] = rep
                        .eigenvalues
                        .iter()
                        .flat_map(|e| (0..e.multiplicity).map(move |c| (e.k + c, e.gap)))
                        .filter(|(k, _)| *k <= k_max)
                        .map(|(_, gap)| gap)
                        .sum();
                }
                Err(SpectralError::NoEigenvaluesFound { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        total += (sums[0] + sums[1]) / (2.0 * q as f64 + 1.0).powi(2);
        per_q.push((q, sums[0], sums[1]));
    }
    Ok(SummabilityReport { per_q, total })
}

/// Comparison of the compressed perturbation P_q W P_q against the
/// Toeplitz-type operator over the same mode window.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub median_ratio: f64,
}

/// Verifies the two-sided operator bound: reports s_k(P_q |W| P_q) / s_k(T_q)
/// over the reliable range k <= 15.
pub fn sandwich_check(
    curve: &Curve,
    alpha: &StrengthFunction,
    q: usize,
    b: f64,
    lambda0: f64,
    toeplitz: &crate::toeplitz::ToeplitzMatrix,
) -> Result<SandwichReport, SpectralError> {
    if toeplitz.q != q || toeplitz.b != b {
        return Err(SpectralError::TruncationMismatch);
    }
    let weyl = bie::assemble_weyl(curve, Complex64::new(lambda0, 0.0), b)?;
    let core = bie::krein_core(&weyl, alpha, true)?;
    let points = &weyl.grid.points;
    let weights = &weyl.grid.weights;
    let n = points.len();
    let modes = &toeplitz.modes;
    // v[m][j] = psi_m(y_j)
    let v: Vec<Vec<Complex64>> = modes
        .iter()
        .map(|&m| {
            let mode = crate::landau::LandauMode::new(q, m, b).expect("valid mode window");
            points
                .iter()
                .map(|&p| crate::landau::mode_eval(&mode, p).expect("valid mode"))
                .collect()
        })
        .collect();
    let lq = landau_level(q, b);
    let denom = (lq - lambda0) * (lq - lambda0);
    let nm = modes.len();
    let pwp: CMat = Mat::from_fn(nm, nm, |r, c| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let mut inner = Complex64::new(0.0, 0.0);
            for k in 0..n {
                inner += core.x_matrix[(j, k)] * v[c][k];
            }
            acc += v[r][j].conj() * weights[j] * inner;
        }
        -acc / denom
    });
    // |W| compression: spectrum magnitudes of the Hermitian pwp
    let mut s_pwp: Vec<f64> = linalg::hermitian_eigenvalues(&pwp)
        .into_iter()
        .map(f64::abs)
        .collect();
    s_pwp.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let s_t = toeplitz.singular_values();
    if s_t.len() != s_pwp.len() {
        return Err(SpectralError::TruncationMismatch);
    }
    let k_top = 15.min(s_t.len());
    let mut ratios = Vec::with_capacity(k_top);
    for k in 0..k_top {
        if s_t[k] < 1e-13 || s_pwp[k] < 1e-13 {
            break;
        }
        ratios.push(s_pwp[k] / s_t[k]);
    }
    if ratios.is_empty() {
        return Err(SpectralError::TooFewEigenvalues(0, 1));
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(SandwichReport {
        max_ratio: *sorted.last().unwrap(),
        min_ratio: sorted[0],
        median_ratio: sorted[sorted.len() / 2],
        ratios,
    })
}
