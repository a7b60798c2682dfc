//! Closed-form Landau-Hamiltonian objects: levels, the gauge phase factor,
//! the resolvent Green function, spectral projection kernels, and
//! symmetric-gauge eigenmodes.

use crate::quad::Quadrature;
use crate::specfun::{self, SpecFunError};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandauError {
    #[error("spectral parameter within {tol} of the Landau level {level}")]
    OnLandauLevel { level: f64, tol: f64 },
    #[error("coincident points: the Green function has a logarithmic singularity")]
    CoincidentPoints,
    #[error("angular index m = {m} below the floor -q = {floor}")]
    BadIndex { m: i64, floor: i64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Homogeneous magnetic field strength B > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    pub b: f64,
}

impl FieldConfig {
    pub fn new(b: f64) -> Self {
        assert!(b > 0.0, "magnetic field strength must be positive");
        FieldConfig { b }
    }
}

/// Landau level Lambda_q = B(2q + 1).
pub fn landau_level(q: usize, b: f64) -> f64 {
    b * (2.0 * q as f64 + 1.0)
}

/// Distance from lambda to the nearest Landau level, and that level's index.
pub fn nearest_level(lambda: Complex64, b: f64) -> (usize, f64) {
    // levels are B(2q+1); invert for the closest q >= 0
    let q_guess = ((lambda.re / b - 1.0) / 2.0).round().max(0.0) as usize;
    let mut best = (q_guess, (lambda - landau_level(q_guess, b)).norm());
    for q in q_guess.saturating_sub(1)..=q_guess + 1 {
        let d = (lambda - landau_level(q, b)).norm();
        if d < best.1 {
            best = (q, d);
        }
    }
    best
}

/// Gauge phase factor
/// Phi_B(x, y) = exp[-(i B / 2)(x_1 y_2 - x_2 y_1) - (B/4)|x - y|^2].
pub fn phase_factor(x: [f64; 2], y: [f64; 2], b: f64) -> Complex64 {
    let cross = x[0] * y[1] - x[1] * y[0];
    let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
    Complex64::new(-0.25 * b * d2, -0.5 * b * cross).exp()
}

/// Tolerance under which lambda counts as sitting on a Landau level.
pub fn on_level_tolerance(b: f64) -> f64 {
    1e-9 * b
}

/// Green function of the Landau Hamiltonian,
/// G_lambda(x,y) = (1/4pi) Phi_B(x,y) Gamma(a) U(a, 1; B|x-y|^2/2), a = (B-lambda)/(2B).
///
/// For large positive Re a (deeply negative lambda) the product Gamma(a) U is
/// evaluated through its Laplace representation to avoid overflow.
pub fn green_function(
    x: [f64; 2],
    y: [f64; 2],
    lambda: Complex64,
    b: f64,
) -> Result<Complex64, LandauError> {
    let (q, dist) = nearest_level(lambda, b);
    let tol = on_level_tolerance(b);
    if dist < tol {
        return Err(LandauError::OnLandauLevel {
            level: landau_level(q, b),
            tol,
        });
    }
    let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
    let scale = 1.0 + x[0].abs() + x[1].abs() + y[0].abs() + y[1].abs();
    if d2.sqrt() < 1e-14 * scale {
        return Err(LandauError::CoincidentPoints);
    }
    let a = (b - lambda) / (2.0 * b);
    let xi = 0.5 * b * d2;
    let gu = gamma_times_u(a, xi)?;
    Ok(phase_factor(x, y, b) * gu / (4.0 * PI))
}

/// Gamma(a) U(a, 1; xi) with overflow- and cancellation-safe branching.
///
/// The logarithmic series for U loses roughly e^{xi + 2 sqrt(a xi)} to
/// cancellation when Re a > 0, and Gamma(a) overflows past a ~ 170, so for
/// deeply negative lambda the product is taken through its Laplace
/// representation instead.
pub fn gamma_times_u(a: Complex64, xi: f64) -> Result<Complex64, SpecFunError> {
    let laplace_route = a.re > 60.0 || (a.re > 3.0 && a.re * xi > 25.0);
    if laplace_route {
        Ok(gamma_u_laplace_product(a, xi))
    } else {
        Ok(specfun::gamma_fn(a)? * specfun::kummer_u(a, xi)?)
    }
}

/// Gamma(a) U(a,1;xi) = integral_0^inf e^{-a u} (1 + w) e^{-xi w} du with
/// w = e^{-u}/(1 - e^{-u}); the integrand peaks near u* = sqrt(xi/Re a).
fn gamma_u_laplace_product(a: Complex64, xi: f64) -> Complex64 {
    let rule = Quadrature::gauss_legendre(16);
    let are = a.re.max(1.0);
    let u_peak = (xi / are).sqrt().max(1e-14);
    let u_min = u_peak * 0.5f64.powi(30);
    let u_max = (60.0 / are).max(8.0 * u_peak);
    let f = |u: f64| -> Complex64 {
        let w = (-u).exp() / -(-u).exp_m1();
        ((-a) * u).exp() * (1.0 + w) * (-xi * w).exp()
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = u_min;
    while lo < u_max {
        let hi = (2.0 * lo).min(u_max);
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            acc += f(c + h * t) * (w * h);
        }
        lo = hi;
    }
    acc
}

/// Integral kernel of the orthogonal projection onto the q-th Landau level,
/// P_q(x,y) = (B/2pi) Phi_B(x,y) L_q(B|x-y|^2/2).
pub fn projection_kernel(q: usize, x: [f64; 2], y: [f64; 2], b: f64) -> Complex64 {
    let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
    let xi = 0.5 * b * d2;
    phase_factor(x, y, b) * (b / (2.0 * PI)) * specfun::laguerre(q, xi)
}

/// A symmetric-gauge Landau eigenmode: level q, angular index m >= -q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauMode {
    pub q: usize,
    pub m: i64,
    pub b: f64,
}

impl LandauMode {
    pub fn new(q: usize, m: i64, b: f64) -> Result<Self, LandauError> {
        if m < -(q as i64) {
            return Err(LandauError::BadIndex {
                m,
                floor: -(q as i64),
            });
        }
        Ok(LandauMode { q, m, b })
    }

    /// Eigenvalue of the mode.
    pub fn level(&self) -> f64 {
        landau_level(self.q, self.b)
    }
}

/// Evaluate the orthonormal eigenfunction psi_{q,m} at the point z.
///
/// With xi = B|z|^2/2 and theta = arg z,
///   m >= 0:      sqrt(B/2pi) sqrt(q!/(q+m)!)  xi^{m/2}  e^{i m theta} L_q^{(m)}(xi)    e^{-xi/2},
///   -q <= m < 0: sqrt(B/2pi) sqrt((q+m)!/q!)  xi^{|m|/2} e^{i m theta} L_{q+m}^{(|m|)}(xi) e^{-xi/2}.
///
/// The q = 0, m >= 0 family spans the Fock space image e^{-Psi} z^m; higher
/// levels use the associated-Laguerre ladder and are validated against the
/// Green-function residue and the projection-kernel mode sum.
pub fn mode_eval(mode: &LandauMode, z: [f64; 2]) -> Result<Complex64, LandauError> {
    let LandauMode { q, m, b } = *mode;
    if m < -(q as i64) {
        return Err(LandauError::BadIndex {
            m,
            floor: -(q as i64),
        });
    }
    let r2 = z[0] * z[0] + z[1] * z[1];
    let xi = 0.5 * b * r2;
    let theta = z[1].atan2(z[0]);
    let front = (b / (2.0 * PI)).sqrt();
    let (norm_log, radial) = if m >= 0 {
        let mu = m as usize;
        let norm_log =
            0.5 * (specfun::ln_factorial(q) - specfun::ln_factorial(q + mu));
        (norm_log, specfun::laguerre_assoc(q, mu as f64, xi))
    } else {
        let mu = (-m) as usize;
        let norm_log =
            0.5 * (specfun::ln_factorial(q - mu) - specfun::ln_factorial(q));
        (norm_log, specfun::laguerre_assoc(q - mu, mu as f64, xi))
    };
    let mu_abs = m.unsigned_abs() as f64;
    // xi^{|m|/2} e^{-xi/2} with the normalization, in log space
    let mag_log = if xi > 0.0 {
        norm_log + 0.5 * mu_abs * xi.ln() - 0.5 * xi
    } else if m == 0 {
        norm_log
    } else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let phase = Complex64::new(0.0, m as f64 * theta).exp();
    Ok(front * mag_log.exp() * radial * phase)
}
