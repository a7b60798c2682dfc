//! Independent reference computations used by the test suite and the selftest
//! subcommand. Everything here deliberately avoids the code paths it is used
//! to validate: the Green function is cross-checked through the
//! projection-kernel eigen-expansion (resummed through its Laplace/heat
//! representation), circle spectra through the rotational Fourier-block
//! secular equation, and so on.

use crate::landau::{landau_level, projection_kernel};
use crate::quad::Quadrature;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Raw partial sum of the eigen-expansion sum_{q<=q_max} P_q(x,y)/(Lambda_q - lambda).
///
/// The tail of this series is an oscillatory O(q_max^{-3/4}); it is reported
/// as-is, without acceleration.
pub fn green_partial_sum(
    x: [f64; 2],
    y: [f64; 2],
    lambda: Complex64,
    b: f64,
    q_max: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for q in 0..=q_max {
        acc += projection_kernel(q, x, y, b) / (landau_level(q, b) - lambda);
    }
    acc
}

/// The eigen-expansion sum_q P_q(x,y)/(Lambda_q - lambda) evaluated exactly:
/// with 1/(q + a) = integral_0^inf e^{-(q+a)u} du and the Laguerre generating
/// function the series resums to
///
///   G(x,y) = Phi_B(x,y)/(4 pi) * integral_0^inf e^{-a u} (1 + w) e^{-xi w} du,
///
/// where w = e^{-u}/(1 - e^{-u}), xi = B|x-y|^2/2, a = (B - lambda)/(2B).
/// This is the heat-semigroup (Laplace transform) route through the Landau
/// level structure; it shares no code with the confluent-hypergeometric
/// evaluation it validates.
pub fn green_eigen_expansion(x: [f64; 2], y: [f64; 2], lambda: Complex64, b: f64) -> Complex64 {
    let a = (b - lambda) / (2.0 * b);
    let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
    let xi = 0.5 * b * d2;
    let rule = Quadrature::gauss_legendre(20);
    let f = |u: f64| -> Complex64 {
        let w = (-u).exp() / -(-u).exp_m1();
        ((-a) * u).exp() * (1.0 + w) * (-xi * w).exp()
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = 1e-7f64;
    let u_max = 120.0 / a.re.max(0.25);
    while lo < u_max {
        let hi = (2.0 * lo).min(u_max);
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            acc += f(c + h * t) * (w * h);
        }
        lo = hi;
    }
    let phase = crate::landau::phase_factor(x, y, b);
    phase * acc / (4.0 * PI)
}

/// Polar quadrature grid on the disc of radius r_max: Gauss-Legendre radially,
/// uniform (trapezoid) angularly. Returns (point, area weight) pairs.
pub fn polar_grid(_b: f64, n_r: usize, n_theta: usize, r_max: f64) -> Vec<([f64; 2], f64)> {
    let rule = Quadrature::gauss_legendre(n_r);
    let (rs, wr) = rule.mapped(0.0, r_max);
    let dtheta = 2.0 * PI / n_theta as f64;
    let mut out = Vec::with_capacity(n_r * n_theta);
    for (&r, &w) in rs.iter().zip(&wr) {
        for k in 0..n_theta {
            let th = k as f64 * dtheta;
            out.push(([r * th.cos(), r * th.sin()], w * r * dtheta));
        }
    }
    out
}

/// Fourier multiplier of the Weyl operator on a circle of radius `r` centered
/// at the origin: mu_m(lambda) = r * integral_0^{2pi} G_lambda(x(0), x(t)) e^{i m t} dt.
///
/// The integrable logarithmic singularity at t = 0 (and 2 pi) is handled with
/// a geometrically graded mesh. Used as the rotational-block secular oracle.
pub struct CircleSecular {
    pub radius: f64,
    pub b: f64,
    /// quadrature nodes in angle (excluding the singular endpoints)
    thetas: Vec<f64>,
    weights: Vec<f64>,
}

impl CircleSecular {
    pub fn new(radius: f64, b: f64) -> Self {
        let rule = Quadrature::gauss_legendre(16);
        let mut thetas = Vec::new();
        let mut weights = Vec::new();
        // graded cells toward both endpoints of (0, 2 pi)
        let mut cuts = Vec::new();
        let levels = 42;
        for k in (1..=levels).rev() {
            cuts.push(PI * 0.5f64.powi(k));
        }
        cuts.push(PI);
        for k in 1..=levels {
            cuts.push(2.0 * PI - PI * 0.5f64.powi(k));
        }
        // The slivers [0, pi 2^-levels] and its mirror are dropped: their
        // logarithmic mass is O(2^-levels ln) and the Green function cannot be
        // evaluated at coincident points.
        let mut prev = cuts[0];
        for &cut in &cuts[1..] {
            let (t, w) = rule.mapped(prev, cut);
            thetas.extend(t);
            weights.extend(w);
            prev = cut;
        }
        CircleSecular {
            radius,
            b,
            thetas,
            weights,
        }
    }

    /// All multipliers mu_m(lambda) for |m| <= m_max, indexed m + m_max.
    pub fn multipliers(&self, lambda: Complex64, m_max: i64) -> Vec<f64> {
        let r = self.radius;
        let x0 = [r, 0.0];
        let g: Vec<Complex64> = self
            .thetas
            .iter()
            .map(|&t| {
                let y = [r * t.cos(), r * t.sin()];
                crate::landau::green_function(x0, y, lambda, self.b)
                    .expect("secular oracle evaluated on a Landau level")
            })
            .collect();
        let mut out = Vec::with_capacity((2 * m_max + 1) as usize);
        for m in -m_max..=m_max {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&t, &w), &gv) in self.thetas.iter().zip(&self.weights).zip(&g) {
                acc += gv * Complex64::new(0.0, m as f64 * t).exp() * w;
            }
            // rotational symmetry makes the multiplier real for real lambda
            out.push((acc * r).re);
        }
        out
    }

    /// Eigenvalues of the delta-perturbed operator with constant strength
    /// `alpha` in the spectral window (lo, hi), found per angular block by
    /// bisection on 1 + alpha mu_m(lambda) = 0.
    pub fn block_eigenvalues(
        &self,
        alpha: f64,
        m_max: i64,
        lo: f64,
        hi: f64,
        tol: f64,
    ) -> Vec<(i64, f64)> {
        let mut found = Vec::new();
        for m in -m_max..=m_max {
            let idx = (m + m_max) as usize;
            let f = |lambda: f64| -> f64 {
                let mus = self.multipliers(Complex64::new(lambda, 0.0), m_max);
                1.0 + alpha * mus[idx]
            };
            // scan for a sign change; the multiplier is monotone-ish between
            // the levels but scan finely to be safe
            let n_scan = 48;
            let mut prev_l = lo;
            let mut prev_f = f(prev_l);
            for i in 1..=n_scan {
                // geometric refinement toward the lower end of the window,
                // where the eigenvalues pile up
                let frac = i as f64 / n_scan as f64;
                let l = lo + (hi - lo) * frac.powi(3);
                let fv = f(l);
                if prev_f * fv < 0.0 {
                    let (mut a, mut bq) = (prev_l, l);
                    let (mut fa, _fb) = (prev_f, fv);
                    for _ in 0..200 {
                        let mid = 0.5 * (a + bq);
                        let fm = f(mid);
                        if fa * fm <= 0.0 {
                            bq = mid;
                        } else {
                            a = mid;
                            fa = fm;
                        }
                        if bq - a < tol {
                            break;
                        }
                    }
                    found.push((m, 0.5 * (a + bq)));
                }
                prev_l = l;
                prev_f = fv;
            }
        }
        found.sort_by(|p, q| p.1.partial_cmp(&q.1).unwrap());
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polar_grid_integrates_gaussian() {
        let grid = polar_grid(1.0, 40, 64, 10.0);
        let total: f64 = grid
            .iter()
            .map(|&(p, w)| (-0.5 * (p[0] * p[0] + p[1] * p[1])).exp() * w)
            .sum();
        assert_relative_eq!(total, 2.0 * PI, max_relative = 1e-10);
    }

    #[test]
    fn secular_multipliers_match_nystrom_free_case() {
        // For lambda far below the spectrum all multipliers are positive and
        // small (M(lambda) >= 0 and decaying).
        let sec = CircleSecular::new(1.0, 1.0);
        let mus = sec.multipliers(Complex64::new(-50.0, 0.0), 6);
        for &mu in &mus {
            assert!(mu > 0.0 && mu < 0.2, "unexpected multiplier {mu}");
        }
    }
}
