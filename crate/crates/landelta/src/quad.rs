//! Quadrature primitives: Gauss-Legendre rules, geometrically graded meshes for
//! endpoint singularities, and product quadrature weights for logarithmic kernels.

use std::f64::consts::PI;

/// Nodes and weights of an n-point rule on a reference interval.
#[derive(Debug, Clone)]
pub struct Quadrature {
    /// Nodes on [-1, 1].
    pub nodes: Vec<f64>,
    /// Weights summing to 2.
    pub weights: Vec<f64>,
}

impl Quadrature {
    /// n-point Gauss-Legendre rule, nodes ascending.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be at least 1");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Newton iteration from the Chebyshev-like initial guess.
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, z);
                let dz = p / dp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, z);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Quadrature { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let x = self.nodes.iter().map(|t| c + h * t).collect();
        let w = self.weights.iter().map(|w| w * h).collect();
        (x, w)
    }

    /// Integrate `f` over [a, b] with this rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * t);
        }
        acc * h
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integrate `f` over [a, b] where `f` may have an integrable singularity at
/// either endpoint. The flagged ends get a geometrically graded mesh (ratio 1/2)
/// down to `(b - a) * 2^-levels`, each cell handled by the supplied Gauss rule.
pub fn graded_integrate<F: Fn(f64) -> f64>(
    rule: &Quadrature,
    a: f64,
    b: f64,
    singular_at_a: bool,
    singular_at_b: bool,
    levels: u32,
    f: F,
) -> f64 {
    graded_integrate_dyn(rule, a, b, singular_at_a, singular_at_b, levels, &f)
}

fn graded_integrate_dyn(
    rule: &Quadrature,
    a: f64,
    b: f64,
    singular_at_a: bool,
    singular_at_b: bool,
    levels: u32,
    f: &dyn Fn(f64) -> f64,
) -> f64 {
    let len = b - a;
    if len <= 0.0 {
        return 0.0;
    }
    match (singular_at_a, singular_at_b) {
        (false, false) => rule.integrate(a, b, f),
        (true, false) => {
            let mut cuts = Vec::with_capacity(levels as usize + 2);
            cuts.push(a);
            for k in (0..=levels).rev() {
                cuts.push(a + len * 0.5f64.powi(k as i32));
            }
            sum_cells(rule, &cuts, f)
        }
        (false, true) => {
            let mut cuts = Vec::with_capacity(levels as usize + 2);
            for k in 0..=levels {
                cuts.push(b - len * 0.5f64.powi(k as i32));
            }
            cuts.push(b);
            sum_cells(rule, &cuts, f)
        }
        (true, true) => {
            let mid = a + 0.5 * len;
            graded_integrate_dyn(rule, a, mid, true, false, levels, f)
                + graded_integrate_dyn(rule, mid, b, false, true, levels, f)
        }
    }
}

fn sum_cells(rule: &Quadrature, cuts: &[f64], f: &dyn Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for win in cuts.windows(2) {
        if win[1] > win[0] {
            acc += rule.integrate(win[0], win[1], f);
        }
    }
    acc
}

/// Product quadrature weights for a logarithmic factor.
///
/// Given interpolation nodes `t` spanning the interval [a, b] and a target
/// point `s0` (inside or outside the interval), returns weights `L_k` with
///
///   integral_a^b  l_k(t) * ln|t - s0|  dt  approx=  L_k,
///
/// where `l_k` is the Lagrange basis on `t`. Exact for the polynomial part;
/// the monomial-log antiderivative is used in closed form.
pub fn log_product_weights(t: &[f64], a: f64, b: f64, s0: f64) -> Vec<f64> {
    let n = t.len();
    // Monomials centered at the panel midpoint and scaled to [-1, 1]: the
    // Vandermonde on the panel's own nodes stays well conditioned whether the
    // target s0 is inside the panel or in a neighbor.
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let v: Vec<f64> = t.iter().map(|&ti| (ti - c) / h).collect();
    let v0 = (s0 - c) / h;
    let lh = h.ln();
    // anti_j(w) is the antiderivative of w^j ln|w|, continuous at 0
    let anti = |j: usize, w: f64| -> f64 {
        if w == 0.0 {
            0.0
        } else {
            w.powi(j as i32 + 1) / (j as f64 + 1.0) * (w.abs().ln() - 1.0 / (j as f64 + 1.0))
        }
    };
    // pure_i = integral over [-1,1] of (v - v0)^i ln|v - v0| dv
    let mut pure = vec![0.0; n];
    for (i, p) in pure.iter_mut().enumerate() {
        *p = anti(i, 1.0 - v0) - anti(i, -1.0 - v0);
    }
    // binomial expansion v^j = sum_i C(j,i) v0^{j-i} (v - v0)^i; |v0| stays
    // O(1) for the self panel and its neighbors, so the expansion is stable
    let mut binom = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        binom[j][0] = 1.0;
        for i in 1..=j {
            binom[j][i] = binom[j - 1][i - 1] + if i <= j - 1 { binom[j - 1][i] } else { 0.0 };
        }
    }
    let mut moments = vec![0.0; n];
    for (j, m) in moments.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..=j {
            acc += binom[j][i] * v0.powi((j - i) as i32) * pure[i];
        }
        // integral v^j dv over [-1, 1] for the ln h part
        let poly = (1.0 - (-1.0f64).powi(j as i32 + 1)) / (j as f64 + 1.0);
        *m = h * (acc + lh * poly);
    }
    // l_k(v) = sum_j c_{jk} v^j with V c = I, V_{ij} = v_i^j; weights solve
    // V^T x = moments
    let mut vt = vec![vec![0.0f64; n]; n];
    for (i, &vi) in v.iter().enumerate() {
        let mut p = 1.0;
        for j in 0..n {
            vt[j][i] = p;
            p *= vi;
        }
    }
    solve_dense(&mut vt, &mut moments);
    moments
}

/// In-place Gaussian elimination with partial pivoting; solution overwrites `rhs`.
fn solve_dense(a: &mut [Vec<f64>], rhs: &mut [f64]) {
    let n = rhs.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-300, "singular Vandermonde system");
        for r in col + 1..n {
            let f = a[r][col] / d;
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = rhs[col];
        for c in col + 1..n {
            s -= a[col][c] * rhs[c];
        }
        rhs[col] = s / a[col][col];
    }
}
