//! Special-function kernels: Euler gamma, digamma, the irregular confluent
//! hypergeometric function U(a, 1; x), modified Bessel functions K0/I0, and
//! Laguerre polynomials.
//!
//! All routines are pure and reentrant; accuracy is governed by an
//! [`AccuracyPolicy`] (default relative tolerance 1e-10).

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("gamma pole at nonpositive integer (z = {re} + {im}i)")]
    PoleAtNonpositiveInteger { re: f64, im: f64 },
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("series did not converge within {0} terms")]
    NoConvergence(usize),
    #[error("invalid accuracy policy: {0}")]
    BadPolicy(&'static str),
}

/// Branch-selection and truncation policy shared by the kernels in this module.
#[derive(Debug, Clone, Copy)]
pub struct AccuracyPolicy {
    /// Target relative tolerance, in (0, 1e-6].
    pub rel_tol: f64,
    /// Series-term cap, at least 64.
    pub max_terms: usize,
    /// Crossover abscissa between the small-x series and the large-x branches
    /// of U(a, 1; x).
    pub switch_x: f64,
}

impl AccuracyPolicy {
    pub fn new(rel_tol: f64, max_terms: usize, switch_x: f64) -> Result<Self, SpecFunError> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(SpecFunError::BadPolicy("rel_tol must lie in (0, 1e-6]"));
        }
        if max_terms < 64 {
            return Err(SpecFunError::BadPolicy("max_terms must be at least 64"));
        }
        if !(switch_x > 0.0) {
            return Err(SpecFunError::BadPolicy("switch_x must be positive"));
        }
        Ok(AccuracyPolicy { rel_tol, max_terms, switch_x })
    }
}

impl Default for AccuracyPolicy {
    fn default() -> Self {
        // The small-x logarithmic series is kept up to x = 8, where it still
        // retains ~12 digits; beyond that the Laplace-integral and asymptotic
        // branches take over.
        AccuracyPolicy { rel_tol: 1e-10, max_terms: 512, switch_x: 8.0 }
    }
}

// Lanczos approximation, g = 7, 9 coefficients (double precision).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: Complex64, tol: f64) -> Option<i64> {
    if z.im.abs() > tol {
        return None;
    }
    let r = z.re.round();
    if r <= 0.0 && (z.re - r).abs() <= tol {
        Some(r as i64)
    } else {
        None
    }
}

/// ln Gamma(z) for Re z > 0 (Lanczos); not a principal-branch log for general z.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    (zm1 + 0.5) * t.ln() - t + 0.5 * (2.0 * PI).ln() + acc.ln()
}

/// Euler gamma function for complex argument.
///
/// Uses the reflection formula for Re z < 0.5. Poles at nonpositive integers
/// are reported as [`SpecFunError::PoleAtNonpositiveInteger`].
pub fn gamma_fn(z: Complex64) -> Result<Complex64, SpecFunError> {
    if is_nonpositive_integer(z, 1e-13 * (1.0 + z.norm())).is_some() {
        return Err(SpecFunError::PoleAtNonpositiveInteger { re: z.re, im: z.im });
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let s = (PI * z).sin();
        PI / (s * gamma_unchecked(1.0 - z))
    } else {
        ln_gamma_right(z).exp()
    }
}

/// Reciprocal gamma, finite everywhere (zero at nonpositive integers).
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // 1/Gamma(z) = sin(pi z) Gamma(1-z) / pi
        (PI * z).sin() * gamma_unchecked(1.0 - z) / PI
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

/// ln Gamma(x) for real x > 0.
pub fn ln_gamma_real(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma_real requires x > 0");
    ln_gamma_right(Complex64::new(x, 0.0)).re
}

/// ln n! in double precision (exact summation for small n, Lanczos beyond).
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 128 {
        let mut acc = 0.0;
        for k in 2..=n {
            acc += (k as f64).ln();
        }
        acc
    } else {
        ln_gamma_real(n as f64 + 1.0)
    }
}

/// Digamma function for complex argument (recurrence to Re z >= 10, then the
/// Bernoulli asymptotic series; reflection for Re z < 0.5).
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // psi(1-z) - psi(z) = pi cot(pi z)
        let c = PI * (PI * z).cos() / (PI * z).sin();
        return digamma(1.0 - z) - c;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 10.0 {
        acc -= 1.0 / w;
        w += 1.0;
    }
    // asymptotic: ln w - 1/(2w) - sum B_{2n} / (2n w^{2n})
    const B: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let inv2 = 1.0 / (w * w);
    let mut term = inv2;
    let mut tail = Complex64::new(0.0, 0.0);
    for (n, b) in B.iter().enumerate() {
        tail += b / (2.0 * (n as f64 + 1.0)) * term;
        term *= inv2;
    }
    acc + w.ln() - 0.5 / w - tail
}

/// Laguerre polynomial L_q(x) by the stable three-term recurrence.
pub fn laguerre(q: usize, x: f64) -> f64 {
    laguerre_assoc(q, 0.0, x)
}

/// Associated Laguerre polynomial L_n^(alpha)(x), three-term recurrence.
pub fn laguerre_assoc(n: usize, alpha: f64, x: f64) -> f64 {
    let mut l0 = 1.0;
    if n == 0 {
        return l0;
    }
    let mut l1 = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + alpha - x) * l1 - (kf + alpha) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// Pieces of the logarithmic expansion of U(a, 1; x):
///
///   U(a, 1; x) = -(1/Gamma(a)) * [ M(a,1;x) ln x + S(a;x) ],
///   M(a,1;x)   = sum_k (a)_k / (k!)^2 x^k          (Kummer M),
///   S(a;x)     = sum_k (a)_k / (k!)^2 (psi(a+k) - 2 psi(k+1)) x^k.
///
/// These are exactly the smooth/log factors needed to split the Green-function
/// kernel for quadrature, so they are exposed crate-wide.
#[derive(Debug, Clone, Copy)]
pub struct KummerLogParts {
    pub m: Complex64,
    pub s: Complex64,
}

pub(crate) fn kummer_log_parts(
    a: Complex64,
    x: f64,
    policy: &AccuracyPolicy,
) -> Result<KummerLogParts, SpecFunError> {
    let mut coef = Complex64::new(1.0, 0.0); // (a)_k / (k!)^2 x^k
    let mut psi_ak = digamma(a);
    let mut psi_k1 = -EULER_GAMMA; // psi(1)
    let mut m = Complex64::new(0.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    let lx = x.ln();
    for k in 0..policy.max_terms {
        let kf = k as f64;
        if k > 0 {
            coef *= (a + (kf - 1.0)) * x / (kf * kf);
            psi_ak += 1.0 / (a + (kf - 1.0));
            psi_k1 += 1.0 / kf;
        }
        let mt = coef;
        let st = coef * (psi_ak - 2.0 * psi_k1);
        m += mt;
        s += st;
        if k > 3 && kf > x + 2.0 {
            // Truncation is measured against the cancelled combination
            // M ln x + S, which is what U is built from.
            let rem = mt.norm() * lx.abs().max(1.0) + st.norm();
            let scale = (m * lx + s).norm().max(1e-300);
            if rem < 0.25 * policy.rel_tol * scale {
                return Ok(KummerLogParts { m, s });
            }
        }
    }
    Err(SpecFunError::NoConvergence(policy.max_terms))
}

/// Irregular confluent hypergeometric function U(a, 1; x) for real x > 0 and
/// complex a, with the default accuracy policy.
pub fn kummer_u(a: Complex64, x: f64) -> Result<Complex64, SpecFunError> {
    kummer_u_with(&AccuracyPolicy::default(), a, x)
}

/// U(a, 1; x) under an explicit policy.
///
/// Branches: exact Laguerre form at nonpositive integer a; the logarithmic
/// small-x expansion below `switch_x`; the 2F0 asymptotic series or the
/// Laplace-integral quadrature (with downward recurrence in a where needed)
/// above.
pub fn kummer_u_with(
    policy: &AccuracyPolicy,
    a: Complex64,
    x: f64,
) -> Result<Complex64, SpecFunError> {
    if !(x > 0.0) {
        return Err(SpecFunError::NonPositiveArgument(x));
    }
    // U(-q, 1; x) = (-1)^q q! L_q(x)
    if let Some(neg) = is_nonpositive_integer(a, 1e-12) {
        let q = (-neg) as usize;
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        let mut qfact = 1.0;
        for k in 1..=q {
            qfact *= k as f64;
        }
        return Ok(Complex64::new(sign * qfact * laguerre(q, x), 0.0));
    }
    if x <= policy.switch_x {
        let parts = kummer_log_parts(a, x, policy)?;
        return Ok(-recip_gamma(a) * (parts.m * x.ln() + parts.s));
    }
    // Large x. Try the asymptotic series first; fall back to the Laplace
    // integral (with a-recurrence for Re a < 1/2) when it cannot reach tol.
    if let Some(v) = kummer_asymptotic(a, x, policy) {
        return Ok(v);
    }
    kummer_laplace_recur(a, x, policy)
}

/// x^{-a} 2F0(a, a; ; -1/x) with error estimated by the first omitted term.
fn kummer_asymptotic(a: Complex64, x: f64, policy: &AccuracyPolicy) -> Option<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut best = f64::INFINITY;
    for k in 0..policy.max_terms.min(2 * x as usize + 8) {
        let kf = k as f64;
        let next = term * (a + kf) * (a + kf) / ((kf + 1.0) * (-x));
        if next.norm() >= term.norm() && k > 0 {
            // divergence point reached
            return if best < policy.rel_tol {
                Some((-a * x.ln()).exp() * sum)
            } else {
                None
            };
        }
        term = next;
        sum += term;
        best = term.norm() / sum.norm().max(1e-300);
        if best < 0.1 * policy.rel_tol {
            return Some((-a * x.ln()).exp() * sum);
        }
    }
    if best < policy.rel_tol {
        Some((-a * x.ln()).exp() * sum)
    } else {
        None
    }
}

/// Laplace integral for Re a > 1/2 plus the downward recurrence
/// U(a-1) = (x + 2a - 1) U(a) - a^2 U(a+1) to reach smaller Re a.
fn kummer_laplace_recur(
    a: Complex64,
    x: f64,
    policy: &AccuracyPolicy,
) -> Result<Complex64, SpecFunError> {
    let shift = if a.re >= 0.5 { 0 } else { (0.5 - a.re).ceil() as i64 };
    let a0 = a + shift as f64;
    let mut u_hi = kummer_laplace(a0 + 1.0, x, policy)?;
    let mut u_lo = kummer_laplace(a0, x, policy)?;
    let mut aa = a0;
    for _ in 0..shift {
        let u_next = (x + 2.0 * aa - 1.0) * u_lo - aa * aa * u_hi;
        u_hi = u_lo;
        u_lo = u_next;
        aa -= 1.0;
    }
    Ok(u_lo)
}

/// U(a,1;x) = (1/Gamma(a)) * integral_0^inf e^{-x t} t^{a-1} (1+t)^{-a} dt,
/// valid for Re a > 0; evaluated on a geometrically graded mesh toward t = 0.
fn kummer_laplace(
    a: Complex64,
    x: f64,
    _policy: &AccuracyPolicy,
) -> Result<Complex64, SpecFunError> {
    use crate::quad::Quadrature;
    let rule = Quadrature::gauss_legendre(16);
    let f = |t: f64| -> Complex64 {
        // t^{a-1} (1+t)^{-a} e^{-xt}
        ((a - 1.0) * t.ln() - a * t.ln_1p() - x * t).exp()
    };
    let mut acc = Complex64::new(0.0, 0.0);
    // graded cells [2^-k-1, 2^-k] from t=1 down; endpoint singularity t^{Re a - 1}
    let levels = (120.0 / a.re.max(0.5)).ceil() as i32;
    let mut lo = 0.5f64.powi(levels);
    // the remaining [0, lo] mass is O(lo^{Re a}) and negligible by construction
    while lo < 1.0 {
        let hi = 2.0 * lo;
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            acc += f(c + h * t) * (w * h);
        }
        lo = hi;
    }
    // upper cells [1, 2, 4, ...] until the exponential kills the integrand
    let mut a_cell = 1.0f64;
    while x * a_cell < 60.0 {
        let b_cell = 2.0 * a_cell;
        let c = 0.5 * (a_cell + b_cell);
        let h = 0.5 * (b_cell - a_cell);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            acc += f(c + h * t) * (w * h);
        }
        a_cell = b_cell;
    }
    Ok(recip_gamma(a) * acc)
}

/// Modified Bessel function I0 (power series; all terms positive).
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..600 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Smooth companion of K0: R0(x) = K0(x) + I0(x) ln x, analytic in x^2.
///
/// R0(x) = (ln 2 - gamma) I0(x) + sum_{k>=1} (x^2/4)^k h_k / (k!)^2,  h_k = sum_{j<=k} 1/j.
pub fn bessel_k0_smooth(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0; // (x^2/4)^k / (k!)^2
    let mut h = 0.0;
    let mut sum = 0.0;
    for k in 1..600 {
        let kf = k as f64;
        term *= q / (kf * kf);
        h += 1.0 / kf;
        sum += term * h;
        if term * h < 1e-17 * (1.0 + sum.abs()) {
            break;
        }
    }
    (2.0f64.ln() - EULER_GAMMA) * bessel_i0(x) + sum
}

/// Modified Bessel function of the second kind K0(x), x > 0.
///
/// Series branch for x <= 6, the cosh-integral representation for the middle
/// range, and the large-x asymptotic expansion beyond x = 20.
pub fn bessel_k0(x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) {
        return Err(SpecFunError::NonPositiveArgument(x));
    }
    if x <= 6.0 {
        return Ok(bessel_k0_smooth(x) - bessel_i0(x) * x.ln());
    }
    if x < 20.0 {
        // K0(x) = integral_0^inf e^{-x cosh t} dt
        use crate::quad::Quadrature;
        let rule = Quadrature::gauss_legendre(20);
        let tmax = ((60.0 / x + 1.0) + ((60.0 / x + 1.0).powi(2) - 1.0).sqrt()).ln();
        let cells = 8;
        let mut acc = 0.0;
        for c in 0..cells {
            let a = tmax * c as f64 / cells as f64;
            let b = tmax * (c + 1) as f64 / cells as f64;
            acc += rule.integrate(a, b, |t| (-x * t.cosh()).exp());
        }
        return Ok(acc);
    }
    // asymptotic expansion, optimal truncation
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        let next = term * -((2.0 * k + 1.0) * (2.0 * k + 1.0)) / (8.0 * x * (k + 1.0));
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        k += 1.0;
        if term.abs() < 1e-17 * sum.abs() || k > 60.0 {
            break;
        }
    }
    Ok((PI / (2.0 * x)).sqrt() * (-x).exp() * sum)
}
