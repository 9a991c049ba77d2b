//! Borel transform, rational continuation of the transform, Laplace
//! reconstruction along rays, and the ray transform
//! `F_theta(t) = int_{arg z = theta} e^{z t} P(z) dz`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_decaying, QuadResult, QuadratureConfig};
use crate::sector::HalfPlane;
use crate::series::{rational_to_f64, CoefficientSequence, Rational};

/// Taylor coefficients `f_n = p_n / n!` of the Borel transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelCoefficients {
    pub values: Vec<f64>,
    /// Declared radius of convergence, if known.
    pub radius: Option<f64>,
}

impl BorelCoefficients {
    pub fn new(values: Vec<f64>, radius: Option<f64>) -> Result<Self> {
        if values.is_empty() {
            return domain("Borel coefficients must be nonempty");
        }
        if let Some(r) = radius {
            if !(r > 0.0) {
                return domain(format!("declared radius must be positive, got {r}"));
            }
        }
        Ok(Self { values, radius })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of the stored Taylor polynomial at `t`.
    pub fn eval_polynomial(&self, t: Complex64) -> Complex64 {
        self.values
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &f| acc * t + f)
    }
}

/// Exact `p_n / n!`.
pub fn borel_transform_exact(p: &CoefficientSequence) -> Vec<Rational> {
    let mut fact = BigInt::from(1);
    p.values()
        .iter()
        .enumerate()
        .map(|(n, v)| {
            if n > 0 {
                fact *= n;
            }
            v / Rational::from_integer(fact.clone())
        })
        .collect()
}

/// Exact `f_n n!`, the inverse of [`borel_transform_exact`].
pub fn inverse_borel_exact(f: &[Rational]) -> Vec<Rational> {
    let mut fact = BigInt::from(1);
    f.iter()
        .enumerate()
        .map(|(n, v)| {
            if n > 0 {
                fact *= n;
            }
            v * Rational::from_integer(fact.clone())
        })
        .collect()
}

/// `f_n = p_n / n!`, computed exactly and then rounded.
pub fn borel_transform(p: &CoefficientSequence) -> BorelCoefficients {
    BorelCoefficients {
        values: borel_transform_exact(p).iter().map(rational_to_f64).collect(),
        radius: None,
    }
}

/// Cauchy-Hadamard estimate of the radius of convergence: a least-squares
/// line through `ln |f_n|` over the nonzero entries of the upper half of the
/// sequence, returning `exp(-slope)`. An all-zero tail gives `+inf`.
pub fn radius_estimate(f: &BorelCoefficients) -> Result<f64> {
    let len = f.values.len();
    if len < 8 {
        return domain(format!("radius estimate needs at least 8 coefficients, got {len}"));
    }
    let pts: Vec<(f64, f64)> = (len / 2..len)
        .filter(|&n| f.values[n] != 0.0 && f.values[n].is_finite())
        .map(|n| (n as f64, f.values[n].abs().ln()))
        .collect();
    match pts.len() {
        0 => return Ok(f64::INFINITY),
        1 => {
            let (n, l) = pts[0];
            return Ok((-l / n).exp());
        }
        _ => {}
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((-sxy / sxx).exp())
}

/// Singular values below this fraction of the largest mark a rank drop.
const RANK_TOL: f64 = 1e-13;

/// The `[m/n]` rational approximant, stored in the rescaled variable
/// `s = t / scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalApproximant {
    pub m: usize,
    pub n: usize,
    pub scale: f64,
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
    pub poles: Vec<Complex64>,
}

fn horner(c: &[f64], s: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &v| acc * s + v)
}

impl RationalApproximant {
    pub fn eval(&self, t: Complex64) -> Complex64 {
        let s = t / self.scale;
        horner(&self.numerator, s) / horner(&self.denominator, s)
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }
}

/// `[m/n]` Padé approximant of the series `f`, via the null vector of the
/// Toeplitz system computed by SVD after rescaling `t` by the estimated
/// radius of convergence.
///
/// A rank drop in the system (or a denominator vanishing at the origin) is
/// reported as [`Error::DegenerateApproximant`]; callers retry with
/// `(m - 1, n - 1)`.
pub fn pade_continue(f: &BorelCoefficients, m: usize, n: usize) -> Result<RationalApproximant> {
    if m + n + 1 > f.len() {
        return domain(format!(
            "[{m}/{n}] needs {} coefficients, only {} available",
            m + n + 1,
            f.len()
        ));
    }
    let scale = f
        .radius
        .or_else(|| radius_estimate(f).ok())
        .filter(|r| r.is_finite() && *r > 0.0)
        .unwrap_or(1.0);
    let c: Vec<f64> = f.values[..=m + n]
        .iter()
        .enumerate()
        .map(|(j, v)| v * scale.powi(j as i32))
        .collect();
    let at = |k: isize| if k < 0 { 0.0 } else { c[k as usize] };

    let b: Vec<f64> = if n == 0 {
        vec![1.0]
    } else {
        // rows m+1..=m+n, padded with a zero row so the null vector is returned
        let mut sys = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..=n {
                sys[(i, j)] = at((m + 1 + i) as isize - j as isize);
            }
        }
        let svd = sys.svd(false, true);
        let v_t = svd.v_t.as_ref().expect("requested V^T");
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
        let top = svd.singular_values[order[0]];
        let smallest_of_system = svd.singular_values[order[n - 1]];
        if top == 0.0 || smallest_of_system <= RANK_TOL * top {
            return Err(Error::DegenerateApproximant { m, n });
        }
        let null = order[n];
        (0..=n).map(|j| v_t[(null, j)]).collect()
    };
    let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if b[0].abs() <= 1e-12 * b_norm {
        return Err(Error::DegenerateApproximant { m, n });
    }
    let b: Vec<f64> = b.iter().map(|x| x / b[0]).collect();
    let a: Vec<f64> = (0..=m)
        .map(|i| (0..=n.min(i)).map(|j| c[i - j] * b[j]).sum())
        .collect();

    let poles = polynomial_roots(&b)
        .into_iter()
        .map(|s| s * scale)
        .collect();
    Ok(RationalApproximant {
        m,
        n,
        scale,
        numerator: a,
        denominator: b,
        poles,
    })
}

/// Roots of `sum c_j s^j` from the companion matrix, after dropping
/// negligible leading coefficients.
fn polynomial_roots(c: &[f64]) -> Vec<Complex64> {
    let big = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut deg = c.len() - 1;
    while deg > 0 && c[deg].abs() <= 1e-14 * big {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -c[i] / c[deg];
    }
    let mut roots: Vec<Complex64> = comp.complex_eigenvalues().iter().copied().collect();
    roots.sort_by(|x, y| x.norm().total_cmp(&y.norm()).then(x.im.total_cmp(&y.im)));
    roots
}

/// Quadrature settings for Laplace and ray integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceConfig {
    pub quad: QuadratureConfig,
    /// Exponential growth rate of the integrand along the ray.
    pub growth: f64,
}

impl Default for LaplaceConfig {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            growth: 0.0,
        }
    }
}

/// `int_0^{inf e^{i phi}} F(t) e^{-z t} dt`.
pub fn laplace_integral<F>(f: F, z: Complex64, phi: f64, cfg: &LaplaceConfig) -> Result<QuadResult>
where
    F: Fn(Complex64) -> Complex64,
{
    let dir = Complex64::from_polar(1.0, phi);
    let rate = (z * dir).re;
    if !(rate > cfg.growth) {
        return domain(format!(
            "Laplace integral diverges: Re(z e^(i phi)) = {rate} does not exceed growth {}",
            cfg.growth
        ));
    }
    let zd = z * dir;
    integrate_decaying(|r| f(dir * r) * (-zd * r).exp() * dir, rate - cfg.growth, &cfg.quad)
}

/// Settings for [`borel_sum`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelSumConfig {
    /// Approximant orders; `None` uses the largest diagonal that fits.
    pub orders: Option<(usize, usize)>,
    /// Integration ray; `None` uses `-arg(z) / 2`.
    pub ray_angle: Option<f64>,
    pub quad: QuadratureConfig,
}

impl Default for BorelSumConfig {
    fn default() -> Self {
        Self {
            orders: None,
            ray_angle: None,
            quad: QuadratureConfig::default(),
        }
    }
}

/// Result of Borel-Pade-Laplace summation with its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelSummation {
    pub coefficients: CoefficientSequence,
    pub z: Complex64,
    pub requested_orders: (usize, usize),
    pub orders: (usize, usize),
    pub ray_angle: f64,
    pub value: Complex64,
    /// Order-stability estimate plus quadrature error; not a rigorous bound.
    pub error_estimate: f64,
    pub poles: Vec<Complex64>,
    pub quadrature_nodes: usize,
    pub quadrature_radius: f64,
}

impl BorelSummation {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Distance from `p` to the ray `{r e^{i phi}, r >= 0}`.
fn distance_to_ray(p: Complex64, phi: f64) -> f64 {
    let q = p * Complex64::from_polar(1.0, -phi);
    if q.re <= 0.0 {
        p.norm()
    } else {
        q.im.abs()
    }
}

/// Pole-guard distance, relative to the pole modulus.
pub const POLE_GUARD: f64 = 1e-3;

fn first_nondegenerate(
    f: &BorelCoefficients,
    m: usize,
    n: usize,
) -> Result<(RationalApproximant, bool)> {
    let (mut m, mut n) = (m, n);
    let mut reduced = false;
    loop {
        match pade_continue(f, m, n) {
            Ok(r) => return Ok((r, reduced)),
            Err(Error::DegenerateApproximant { .. }) if m > 0 && n > 0 => {
                m -= 1;
                n -= 1;
                reduced = true;
            }
            Err(e) => return Err(e),
        }
    }
}

fn laplace_of(
    r: &RationalApproximant,
    z: Complex64,
    phi: f64,
    quad: &QuadratureConfig,
) -> Result<QuadResult> {
    if let Some(p) = r
        .poles
        .iter()
        .find(|p| distance_to_ray(**p, phi) <= POLE_GUARD * p.norm())
    {
        return Err(Error::RayObstructed { re: p.re, im: p.im });
    }
    let cfg = LaplaceConfig {
        quad: *quad,
        growth: 0.0,
    };
    laplace_integral(|t| r.eval(t), z, phi, &cfg)
}

/// Borel transform, Padé continuation and Laplace integration along a ray.
///
/// The error estimate is `|r(m, n) - r(m - 1, n - 1)|` with the lower
/// approximant taken as the first nondegenerate one below `(m, n)`. When the
/// requested orders were themselves degenerate the data is rational to
/// working precision and only the quadrature error is reported.
pub fn borel_sum(p: &CoefficientSequence, z: Complex64, cfg: &BorelSumConfig) -> Result<BorelSummation> {
    if z.norm() == 0.0 || !(z.arg().abs() < FRAC_PI_2) {
        return domain(format!("Borel summation needs |arg z| < pi/2, got z = {z}"));
    }
    let f = borel_transform(p);
    let requested = cfg.orders.unwrap_or_else(|| {
        let half = (f.len() - 1) / 2;
        (half, half)
    });
    let phi = cfg.ray_angle.unwrap_or(-z.arg() / 2.0);
    let (main, reduced) = first_nondegenerate(&f, requested.0, requested.1)?;
    let q = laplace_of(&main, z, phi, &cfg.quad)?;
    let mut error_estimate = q.error_estimate;
    if !reduced && main.m > 0 && main.n > 0 {
        let (lower, _) = first_nondegenerate(&f, main.m - 1, main.n - 1)?;
        if let Ok(ql) = laplace_of(&lower, z, phi, &cfg.quad) {
            error_estimate += (q.value - ql.value).norm();
        }
    }
    Ok(BorelSummation {
        coefficients: p.clone(),
        z,
        requested_orders: requested,
        orders: (main.m, main.n),
        ray_angle: phi,
        value: q.value,
        error_estimate,
        poles: main.poles.clone(),
        quadrature_nodes: q.nodes,
        quadrature_radius: q.radius,
    })
}

/// Right side of the ray-transform bound `M / (a - (sigma cos theta - tau sin theta))`.
pub fn ray_transform_bound(m: f64, a: f64, theta: f64, t: Complex64) -> f64 {
    m / (a - HalfPlane { theta, a }.level(t))
}

/// `F_theta(t) = int_0^inf e^{z t} P(z) e^{i theta} dr` on `z = r e^{i theta}`,
/// for `P` decaying like `e^{-a |z|}` along the ray.
pub fn ray_transform<P>(
    p: P,
    theta: f64,
    t: Complex64,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult>
where
    P: Fn(Complex64) -> Complex64,
{
    if !(theta.abs() < FRAC_PI_2) {
        return domain(format!("ray angle must satisfy |theta| < pi/2, got {theta}"));
    }
    let plane = HalfPlane::new(theta, a)?;
    if !plane.contains(t) {
        return domain(format!(
            "t = {t} lies outside the half-plane of convergence for theta = {theta}, a = {a}"
        ));
    }
    let dir = Complex64::from_polar(1.0, theta);
    let decay = a - plane.level(t);
    integrate_decaying(|r| (dir * t * r).exp() * p(dir * r) * dir, decay, cfg)
}

/// `D_a` together with the half-strip `{Re t > 0, |Im t| < a}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfStrip {
    pub a: f64,
}

impl HalfStrip {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return domain(format!("half-strip width must be positive, got {a}"));
        }
        Ok(Self { a })
    }

    pub fn contains(&self, t: Complex64) -> bool {
        t.norm() < self.a || (t.re > 0.0 && t.im.abs() < self.a)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NevanlinnaReport {
    pub holds: bool,
    pub checked: usize,
    pub skipped: Vec<Complex64>,
    /// Largest `|F(t)| / (K e^{sigma |t|})` over checked points.
    pub max_ratio: f64,
}

/// Checks `|F(t)| <= K e^{sigma |t|}` on the grid points inside
/// `D_{a'} ∪ L^+_{a'}`; points outside are skipped.
pub fn nevanlinna_check<F>(
    f: F,
    a: f64,
    a_prime: f64,
    sigma: f64,
    k: f64,
    grid: &[Complex64],
) -> Result<NevanlinnaReport>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(a > 0.0 && a_prime > 0.0 && a_prime < a) {
        return domain(format!("need 0 < a' < a, got a = {a}, a' = {a_prime}"));
    }
    if !(sigma >= 0.0 && k > 0.0) {
        return domain(format!("need sigma >= 0 and K > 0, got {sigma}, {k}"));
    }
    let region = HalfStrip::new(a_prime)?;
    let mut skipped = Vec::new();
    let mut checked = 0;
    let mut max_ratio: f64 = 0.0;
    for &t in grid {
        if !region.contains(t) {
            skipped.push(t);
            continue;
        }
        checked += 1;
        let v = f(t).norm();
        let ratio = if v.is_nan() {
            f64::INFINITY
        } else {
            // compare in log space so e^{t^2}-type growth cannot overflow the bound
            (v.ln() - k.ln() - sigma * t.norm()).exp()
        };
        max_ratio = max_ratio.max(ratio);
    }
    Ok(NevanlinnaReport {
        holds: max_ratio <= 1.0,
        checked,
        skipped,
        max_ratio,
    })
}
