//! Desk-scale verification of the norm-resolvent approximation: Galerkin
//! truncations of the squeezed-potential Hamiltonians and of the
//! delta-interaction operator in the Landau-mode basis, with the resolvent
//! difference tracked as the squeezing parameter shrinks.

use crate::geometry::{Curve, TubularMap};
use crate::landau::{landau_level, mode_eval, LandauMode};
use crate::linalg::{self, CMat};
use crate::quad::Quadrature;
use crate::spectral::StrengthFunction;
use faer::Mat;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SqueezeError {
    #[error("epsilon = {eps} outside (0, beta = {beta}]")]
    BadEpsilon { eps: f64, beta: f64 },
    #[error("basis too small: enlarging the mode window by 25% changes g({eps}) by {change:.1}%")]
    BasisTooSmall { eps: f64, change: f64 },
}

/// A transversal potential profile V(s, t) supported in the tube |t| <= beta.
pub struct TransversalProfile {
    pub map: TubularMap,
    f: std::sync::Arc<dyn Fn(f64, f64) -> f64 + Sync + Send>,
    pub sup_norm: f64,
}

impl TransversalProfile {
    pub fn new(
        map: TubularMap,
        f: impl Fn(f64, f64) -> f64 + Sync + Send + 'static,
        sup_norm: f64,
    ) -> Self {
        TransversalProfile {
            map,
            f: std::sync::Arc::new(f),
            sup_norm,
        }
    }

    /// The converse-construction profile V = alpha(s)/(2 beta) on the tube,
    /// which recovers the delta-interaction of strength alpha in the limit.
    pub fn from_alpha(map: TubularMap, alpha: impl Fn(f64) -> f64 + Sync + Send + 'static) -> Self {
        let beta = map.beta;
        let mut sup = 0.0f64;
        let l = map.curve.total_length();
        for i in 0..256 {
            sup = sup.max(alpha(l * i as f64 / 256.0).abs() / (2.0 * beta));
        }
        TransversalProfile {
            map,
            f: std::sync::Arc::new(move |s, _t| alpha(s) / (2.0 * beta)),
            sup_norm: sup,
        }
    }

    pub fn beta(&self) -> f64 {
        self.map.beta
    }

    /// V(s, t), zero outside the tube.
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        if t.abs() > self.map.beta {
            0.0
        } else {
            (self.f)(s, t)
        }
    }
}

/// The squeezed potential V_eps(x_Sigma + t nu) = (beta/eps) V(x_Sigma + (beta/eps) t nu).
pub struct SqueezedPotential<'p> {
    pub profile: &'p TransversalProfile,
    pub eps: f64,
}

pub fn squeeze(profile: &TransversalProfile, eps: f64) -> Result<SqueezedPotential<'_>, SqueezeError> {
    let beta = profile.beta();
    if !(eps > 0.0 && eps <= beta) {
        return Err(SqueezeError::BadEpsilon { eps, beta });
    }
    Ok(SqueezedPotential { profile, eps })
}

impl SqueezedPotential<'_> {
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        if t.abs() >= self.eps {
            0.0
        } else {
            let scale = self.profile.beta() / self.eps;
            scale * self.profile.eval(s, scale * t)
        }
    }
}

/// The normal average alpha(x_Sigma) = integral_{-beta}^{beta} V(x_Sigma + t nu) dt.
pub fn alpha_from_profile(profile: &TransversalProfile) -> StrengthFunction {
    let beta = profile.beta();
    let rule = Quadrature::gauss_legendre(20);
    let f = profile.f.clone();
    StrengthFunction::from_fn(&profile.map.curve, move |s| {
        rule.integrate(-beta, beta, |t| {
            if t.abs() > beta {
                0.0
            } else {
                f(s, t)
            }
        })
    })
}

/// Galerkin truncation in the Landau-mode basis: the free diagonal plus the
/// Hermitian potential (or delta-term) matrix.
pub struct GalerkinTruncation {
    pub modes: Vec<LandauMode>,
    pub h_free: Vec<f64>,
    pub pot: CMat,
}

pub enum PotentialSpec<'a> {
    Squeezed(&'a SqueezedPotential<'a>),
    Delta(&'a StrengthFunction),
}

/// Mode list with q <= q_max and per-level window -q <= m <= m_max.
pub fn basis_modes(q_max: usize, m_max: i64, b: f64) -> Vec<LandauMode> {
    let mut out = Vec::new();
    for q in 0..=q_max {
        for m in -(q as i64)..=m_max {
            out.push(LandauMode::new(q, m, b).expect("valid window"));
        }
    }
    out
}

/// Assemble the truncation: V_mat by tube tensor quadrature with the Jacobian
/// (1 - t kappa), delta_mat by curve quadrature.
pub fn assemble_galerkin(
    curve: &Curve,
    spec: &PotentialSpec,
    b: f64,
    modes: &[LandauMode],
) -> Result<GalerkinTruncation, SqueezeError> {
    assert!(!modes.is_empty(), "empty Galerkin basis");
    let nm = modes.len();
    let nodes = curve.nodes();
    let h_free: Vec<f64> = modes.iter().map(|m| landau_level(m.q, b)).collect();
    let pot = match spec {
        PotentialSpec::Delta(alpha) => {
            assert_eq!(alpha.values.len(), nodes.len());
            // Psi[j, a] = psi_a(y_j)
            let psi: CMat = Mat::from_fn(nodes.len(), nm, |j, a| {
                mode_eval(&modes[a], nodes[j].point).expect("valid mode")
            });
            Mat::from_fn(nm, nm, |a, c| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..nodes.len() {
                    acc += psi[(j, a)].conj() * psi[(j, c)] * (alpha.values[j] * nodes[j].weight);
                }
                acc
            })
        }
        PotentialSpec::Squeezed(vp) => {
            let eps = vp.eps;
            let t_rule = Quadrature::gauss_legendre(8);
            let (ts, tw) = t_rule.mapped(-eps, eps);
            // tensor points: (node j, transversal i)
            let mut pts = Vec::new();
            let mut weights = Vec::new();
            for node in nodes {
                for (&t, &wt) in ts.iter().zip(&tw) {
                    let point = [
                        node.point[0] + t * node.normal[0],
                        node.point[1] + t * node.normal[1],
                    ];
                    let jac = 1.0 - t * node.kappa;
                    let v = vp.eval(node.s, t);
                    pts.push(point);
                    weights.push(v * jac * node.weight * wt);
                }
            }
            let psi: CMat = Mat::from_fn(pts.len(), nm, |j, a| {
                mode_eval(&modes[a], pts[j]).expect("valid mode")
            });
            Mat::from_fn(nm, nm, |a, c| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..pts.len() {
                    acc += psi[(j, a)].conj() * psi[(j, c)] * weights[j];
                }
                acc
            })
        }
    };
    Ok(GalerkinTruncation {
        modes: modes.to_vec(),
        h_free,
        pot,
    })
}

/// Per-epsilon operator-norm gaps between the truncated resolvents, and the
/// least-squares exponent of g(eps) ~ eps^p.
#[derive(Debug, Clone)]
pub struct ResolventGapReport {
    pub gaps: Vec<(f64, f64)>,
    pub fitted_p: f64,
    pub stderr: f64,
}

fn resolvent_of(trunc: &GalerkinTruncation, lambda: Complex64) -> CMat {
    let nm = trunc.modes.len();
    let h: CMat = Mat::from_fn(nm, nm, |a, c| {
        let diag = if a == c {
            Complex64::new(trunc.h_free[a], 0.0) - lambda
        } else {
            Complex64::new(0.0, 0.0)
        };
        diag + trunc.pot[(a, c)]
    });
    linalg::inverse(&h)
}

fn gaps_for_basis(
    curve: &Curve,
    profile: &TransversalProfile,
    b: f64,
    modes: &[LandauMode],
    lambda: Complex64,
    eps_list: &[f64],
) -> Result<Vec<f64>, SqueezeError> {
    let alpha = alpha_from_profile(profile);
    let delta = assemble_galerkin(curve, &PotentialSpec::Delta(&alpha), b, modes)?;
    let r_delta = resolvent_of(&delta, lambda);
    let mut gaps = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let vp = squeeze(profile, eps)?;
        let hmat = assemble_galerkin(curve, &PotentialSpec::Squeezed(&vp), b, modes)?;
        let r_h = resolvent_of(&hmat, lambda);
        let nm = modes.len();
        let diff: CMat = Mat::from_fn(nm, nm, |a, c| r_h[(a, c)] - r_delta[(a, c)]);
        gaps.push(linalg::operator_norm(&diff));
    }
    Ok(gaps)
}

/// Dense resolvent differences in the truncated basis over a list of epsilons.
/// Raises BasisTooSmall when enlarging the per-level mode window by 25%
/// changes any gap by more than 10%.
pub fn resolvent_gap(
    curve: &Curve,
    profile: &TransversalProfile,
    b: f64,
    q_max: usize,
    m_max: i64,
    lambda: Complex64,
    eps_list: &[f64],
) -> Result<ResolventGapReport, SqueezeError> {
    assert!(lambda.im != 0.0, "spectral parameter must be nonreal");
    let modes = basis_modes(q_max, m_max, b);
    let gaps = gaps_for_basis(curve, profile, b, &modes, lambda, eps_list)?;
    // truncation guard
    let m_big = ((m_max as f64 + 1.0) * 1.25).ceil() as i64;
    let modes_big = basis_modes(q_max, m_big, b);
    let gaps_big = gaps_for_basis(curve, profile, b, &modes_big, lambda, eps_list)?;
    for ((&eps, &g), &g_big) in eps_list.iter().zip(&gaps).zip(&gaps_big) {
        let change = 100.0 * (g - g_big).abs() / g_big.max(1e-300);
        if change > 10.0 {
            return Err(SqueezeError::BasisTooSmall { eps, change });
        }
    }
    // least squares ln g = c + p ln eps
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - p * sx) / n;
    let mut ss_res = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (intercept + p * x);
        ss_res += r * r;
    }
    let dof = (xs.len().max(3) - 2) as f64;
    let var_x = sxx - sx * sx / n;
    let stderr = (ss_res / dof / var_x).sqrt();
    Ok(ResolventGapReport {
        gaps: eps_list.iter().copied().zip(gaps).collect(),
        fitted_p: p,
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_circle;
    use crate::quad::Quadrature;
    use approx::assert_relative_eq;

    fn unit_circle_map(n: usize) -> TubularMap {
        TubularMap::new(&build_circle([0.0, 0.0], 1.0, n).unwrap())
    }

    #[test]
    fn squeeze_identity_at_full_width() {
        let map = unit_circle_map(16);
        let beta = map.beta;
        let profile = TransversalProfile::new(map, move |s, t| (s.cos() + 1.5) * (1.0 - t * t), 2.5);
        let vp = squeeze(&profile, beta).unwrap();
        for &(s, t) in &[(0.2, 0.0), (1.0, 0.4 * beta), (2.5, -0.9 * beta)] {
            assert_relative_eq!(vp.eval(s, t), profile.eval(s, t), max_relative = 1e-14);
        }
        assert!(matches!(
            squeeze(&profile, 2.0 * beta),
            Err(SqueezeError::BadEpsilon { .. })
        ));
        assert!(matches!(
            squeeze(&profile, 0.0),
            Err(SqueezeError::BadEpsilon { .. })
        ));
    }

    #[test]
    fn squeeze_preserves_normal_integral() {
        let map = unit_circle_map(16);
        let beta = map.beta;
        let profile = TransversalProfile::new(map, move |s, t| (2.0 * s).sin() + (t / beta).powi(2), 2.0);
        let rule = Quadrature::gauss_legendre(40);
        for &s in &[0.3, 2.0, 5.1] {
            let full = rule.integrate(-beta, beta, |t| profile.eval(s, t));
            for &eps in &[0.5 * beta, 0.25 * beta, 0.125 * beta] {
                let vp = squeeze(&profile, eps).unwrap();
                let squeezed = rule.integrate(-eps, eps, |t| vp.eval(s, t));
                assert_relative_eq!(squeezed, full, max_relative = 1e-10, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn alpha_from_profile_basics() {
        let map = unit_circle_map(16);
        let beta = map.beta;
        // constant profile: alpha = 2 beta c
        let profile = TransversalProfile::new(map, |_, _| 1.7, 1.7);
        let alpha = alpha_from_profile(&profile);
        for &v in &alpha.values {
            assert_relative_eq!(v, 2.0 * beta * 1.7, max_relative = 1e-12);
        }
        // odd-in-t profile: alpha = 0 although V != 0
        let map2 = unit_circle_map(16);
        let beta2 = map2.beta;
        let odd = TransversalProfile::new(map2, move |_, t| t / beta2, 1.0);
        let alpha0 = alpha_from_profile(&odd);
        for &v in &alpha0.values {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn cor_roundtrip_alpha_to_profile_to_alpha() {
        // start from alpha, build V = alpha/(2 beta), recover alpha
        let map = unit_circle_map(16);
        let profile = TransversalProfile::from_alpha(map, |s| 1.0 + 0.5 * (2.0 * s).cos());
        let alpha = alpha_from_profile(&profile);
        let curve = &profile.map.curve;
        for (node, &v) in curve.nodes().iter().zip(&alpha.values) {
            let want = 1.0 + 0.5 * (2.0 * node.s).cos();
            assert_relative_eq!(v, want, max_relative = 1e-10);
        }
    }

    #[test]
    fn galerkin_zero_profile_and_hermiticity() {
        let b = 1.0;
        let curve = build_circle([0.0, 0.0], 1.0, 24).unwrap();
        let map = TubularMap::new(&curve);
        let profile = TransversalProfile::new(map, |_, _| 0.0, 0.0);
        let modes = basis_modes(1, 6, b);
        let vp = squeeze(&profile, 0.5 * profile.beta()).unwrap();
        let trunc = assemble_galerkin(&curve, &PotentialSpec::Squeezed(&vp), b, &modes).unwrap();
        for a in 0..modes.len() {
            for c in 0..modes.len() {
                assert_eq!(trunc.pot[(a, c)].norm(), 0.0);
            }
        }
        // a nonzero profile gives a Hermitian matrix to 1e-10
        let map2 = TubularMap::new(&curve);
        let profile2 = TransversalProfile::new(map2, |s, t| s.sin() + t, 2.0);
        let vp2 = squeeze(&profile2, 0.5 * profile2.beta()).unwrap();
        let t2 = assemble_galerkin(&curve, &PotentialSpec::Squeezed(&vp2), b, &modes).unwrap();
        assert!(linalg::hermiticity_defect(&t2.pot) < 1e-10);
    }

    #[test]
    fn rotationally_symmetric_profile_is_block_diagonal() {
        // V(s, t) = v(t) on the circle couples only equal angular indices
        let b = 1.0;
        let curve = build_circle([0.0, 0.0], 1.0, 32).unwrap();
        let map = TubularMap::new(&curve);
        let beta = map.beta;
        let profile = TransversalProfile::new(map, move |_, t| 1.0 - (t / beta).powi(2), 1.0);
        let vp = squeeze(&profile, 0.5 * beta).unwrap();
        let modes = basis_modes(2, 5, b);
        let trunc = assemble_galerkin(&curve, &PotentialSpec::Squeezed(&vp), b, &modes).unwrap();
        for (a, ma) in modes.iter().enumerate() {
            for (c, mc) in modes.iter().enumerate() {
                if ma.m != mc.m {
                    assert!(
                        trunc.pot[(a, c)].norm() < 1e-10,
                        "modes m={} and m={} couple: {}",
                        ma.m,
                        mc.m,
                        trunc.pot[(a, c)].norm()
                    );
                }
            }
        }
    }

    #[test]
    fn delta_block_matches_toeplitz_gram() {
        // the q-diagonal block of delta_mat with alpha = 1 is the Toeplitz Gram
        let b = 1.0;
        let curve = build_circle([0.0, 0.0], 1.0, 128).unwrap();
        let alpha = StrengthFunction::constant(&curve, 1.0);
        let q = 0usize;
        let m_hi = 12i64;
        let modes: Vec<LandauMode> = (0..=m_hi).map(|m| LandauMode::new(q, m, b).unwrap()).collect();
        let trunc = assemble_galerkin(&curve, &PotentialSpec::Delta(&alpha), b, &modes).unwrap();
        let gram = crate::toeplitz::assemble_toeplitz(
            q,
            &crate::toeplitz::Gamma::Curve(&curve),
            b,
            Some(m_hi),
            false,
        );
        for (i, &m) in gram.modes.iter().enumerate() {
            for (j, &mp) in gram.modes.iter().enumerate() {
                let a = modes.iter().position(|md| md.m == m).unwrap();
                let c = modes.iter().position(|md| md.m == mp).unwrap();
                let diff = (trunc.pot[(a, c)] - gram.entries[(i, j)]).norm();
                assert!(
                    diff < 1e-10,
                    "delta/Toeplitz mismatch at ({m},{mp}): {diff}"
                );
            }
        }
    }

    #[test]
    fn resolvent_gap_zero_profile_and_decrease() {
        let b = 1.0;
        let curve = build_circle([0.0, 0.0], 1.0, 24).unwrap();
        let map = TubularMap::new(&curve);
        let profile0 = TransversalProfile::new(map, |_, _| 0.0, 0.0);
        let beta = profile0.beta();
        let eps_list: Vec<f64> = (1..=4).map(|j| beta * 0.5f64.powi(j)).collect();
        let rep = resolvent_gap(
            &curve,
            &profile0,
            b,
            1,
            8,
            Complex64::new(0.0, 1.0),
            &eps_list,
        )
        .unwrap();
        for &(_, g) in &rep.gaps {
            assert!(g < 1e-14, "zero profile must give zero gap, got {g}");
        }
        // the constant-alpha profile gives strictly decreasing gaps
        let map2 = TubularMap::new(&curve);
        let profile = TransversalProfile::from_alpha(map2, |_| 1.0);
        let rep = resolvent_gap(
            &curve,
            &profile,
            b,
            2,
            10,
            Complex64::new(0.0, 1.0),
            &eps_list,
        )
        .unwrap();
        for w in rep.gaps.windows(2) {
            assert!(
                w[1].1 < w[0].1,
                "gaps not strictly decreasing: {:?}",
                rep.gaps
            );
        }
        assert!(rep.fitted_p > 0.0);
    }
}
