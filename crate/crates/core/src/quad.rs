//! Quadrature for exponentially decaying integrands on `[0, inf)`.
//!
//! Two schemes are available: tanh-sinh on a truncated interval `[0, R]`, and
//! Gauss-Laguerre after rescaling by the decay rate.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    TanhSinh,
    GaussLaguerre,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh-sinh" => Ok(Scheme::TanhSinh),
            "gauss-laguerre" => Ok(Scheme::GaussLaguerre),
            other => Err(Error::Domain(format!("unknown quadrature scheme {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub scheme: Scheme,
    /// Node budget for tanh-sinh, exact node count for Gauss-Laguerre.
    pub nodes: usize,
    /// Truncation radius for tanh-sinh. `None` picks one from the decay rate
    /// and grows it until the tail estimate drops below `tol`.
    pub radius: Option<f64>,
    /// Relative tolerance for both refinement and the tail.
    pub tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::TanhSinh,
            nodes: 4096,
            radius: None,
            tol: 1e-14,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    /// Difference between the last two refinement levels (tanh-sinh) plus the
    /// tail estimate. Zero for Gauss-Laguerre, which has no refinement.
    pub error_estimate: f64,
    pub nodes: usize,
    pub radius: f64,
}

const T_MAX: f64 = 4.0;

/// Tanh-sinh quadrature of `f` over `[a, b]`, halving the step until two
/// successive levels agree to `tol` relative or the node budget runs out.
///
/// Abscissae are formed from the distance to the nearest endpoint so that
/// points very close to `a` or `b` keep full relative precision.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64, max_nodes: usize) -> (Complex64, f64, usize)
where
    F: Fn(f64) -> Complex64,
{
    let half = 0.5 * (b - a);
    let width = b - a;
    let eval_pair = |t: f64| -> Complex64 {
        let u = FRAC_PI_2 * t.sinh();
        let e = (2.0 * u).exp();
        // distance from the endpoint, computed without cancellation
        let d = width / (e + 1.0);
        let cu = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        if !w.is_finite() || w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut s = Complex64::new(0.0, 0.0);
        if d > 0.0 {
            s += f(a + d);
            s += f(b - d);
        }
        s * (w * half)
    };
    let centre = {
        let w = FRAC_PI_2 * half;
        f(a + half) * w
    };

    let mut h = 1.0;
    let mut sum = centre;
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum += eval_pair(k as f64 * h);
        k += 1;
    }
    let mut nodes = 2 * k - 1;
    let mut estimate = sum * h;
    let mut diff;
    let mut level = 0;
    loop {
        level += 1;
        h *= 0.5;
        let mut add = Complex64::new(0.0, 0.0);
        let mut j = 1;
        while (j as f64) * h <= T_MAX {
            add += eval_pair(j as f64 * h);
            nodes += 2;
            j += 2;
        }
        sum += add;
        let next = sum * h;
        diff = (next - estimate).norm();
        estimate = next;
        let converged = level >= 3 && diff <= tol * estimate.norm();
        if converged || nodes * 2 > max_nodes || level >= 12 {
            break;
        }
    }
    (estimate, diff, nodes)
}

const PANEL_NODES: usize = 256;
const MAX_PANELS: usize = 4096;

/// Adaptive bisection of `[0, radius]` for integrands that oscillate too fast
/// for a single tanh-sinh pass. Panels are accepted against an absolute
/// tolerance proportional to their width and to `int |g|`, floored at a few
/// ulps of the latter.
fn panels<G>(g: &G, radius: f64, cfg: &QuadratureConfig) -> (Complex64, f64, usize)
where
    G: Fn(f64) -> Complex64,
{
    let (mass, _, mut nodes) = tanh_sinh(
        |r| Complex64::new(g(r).norm(), 0.0),
        0.0,
        radius,
        cfg.tol,
        cfg.nodes,
    );
    let density = cfg.tol.max(16.0 * f64::EPSILON) * mass.re.max(f64::MIN_POSITIVE) / radius;
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut count = 1;
    let mut stack = vec![(0.0, radius)];
    while let Some((a, b)) = stack.pop() {
        let (v, d, n) = tanh_sinh(g, a, b, cfg.tol, PANEL_NODES);
        nodes += n;
        if d <= density * (b - a) || count >= MAX_PANELS {
            value += v;
            error += d;
        } else {
            let mid = 0.5 * (a + b);
            stack.push((mid, b));
            stack.push((a, mid));
            count += 1;
        }
    }
    (value, error, nodes)
}

/// Nodes and weights of the `n`-point Gauss-Laguerre rule for `e^{-x}` on
/// `[0, inf)` (Golub-Welsch).
pub fn gauss_laguerre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = (2 * i + 1) as f64;
        if i + 1 < n {
            let off = (i + 1) as f64;
            jacobi[(i, i + 1)] = off;
            jacobi[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

/// Integrates `g` over `[0, inf)` where `|g(r)|` decays at least like
/// `e^{-decay r}`.
pub fn integrate_decaying<G>(g: G, decay: f64, cfg: &QuadratureConfig) -> Result<QuadResult>
where
    G: Fn(f64) -> Complex64,
{
    if !(decay > 0.0) || !decay.is_finite() {
        return Err(Error::Domain(format!(
            "integrand must decay exponentially (rate {decay})"
        )));
    }
    match cfg.scheme {
        Scheme::GaussLaguerre => {
            let n = cfg.nodes.clamp(2, 160);
            let (x, w) = gauss_laguerre_rule(n);
            let mut value = Complex64::new(0.0, 0.0);
            for (xi, wi) in x.iter().zip(&w) {
                if *wi > 0.0 {
                    value += g(xi / decay) * (wi.ln() + xi).exp();
                }
            }
            Ok(QuadResult {
                value: value / decay,
                error_estimate: 0.0,
                nodes: n,
                radius: f64::INFINITY,
            })
        }
        Scheme::TanhSinh => {
            let attempts = if cfg.radius.is_some() { 1 } else { 10 };
            let mut radius = cfg.radius.unwrap_or(40.0 / decay);
            for _ in 0..attempts {
                let (mut value, mut diff, mut nodes) = tanh_sinh(&g, 0.0, radius, cfg.tol, cfg.nodes);
                // a pass that stops at rounding level is kept as is
                if !(diff <= cfg.tol.sqrt() * value.norm()) {
                    (value, diff, nodes) = panels(&g, radius, cfg);
                }
                let tail = g(radius).norm() / decay;
                if tail <= cfg.tol * value.norm().max(f64::MIN_POSITIVE) {
                    return Ok(QuadResult {
                        value,
                        error_estimate: diff + tail,
                        nodes,
                        radius,
                    });
                }
                radius *= 2.0;
            }
            Err(Error::Quadrature(format!(
                "integrand tail still above tolerance at radius {}",
                radius / 2.0
            )))
        }
    }
}
