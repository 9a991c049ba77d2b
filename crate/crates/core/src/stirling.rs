//! The Binet function `P(z) = ln Gamma(z) - (z - 1/2) ln z + z - ln(2 pi)/2`,
//! its Laplace representation `P(z) = int_0^inf e^{-zt} F(t) dt` with
//! `F(t) = (1/t)(1/2 - 1/t + 1/(e^t - 1))`, and the error claims for the
//! optimally truncated Stirling series.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{make_row, verify_gevrey, EstimateReport, GevreyExpansion, SkippedPoint};
use crate::error::{domain, Result};
use crate::quad::{integrate_decaying, QuadResult, QuadratureConfig};
use crate::sector::Sector;
use crate::series::{binet_taylor_coeffs, stirling_coeffs};

/// Constant `M` in the claim `error < M e^{-2 pi |z|}` for `|z| > 1`.
pub const ERROR_CONSTANT_M: f64 = 0.94891;

/// Number of cached Taylor coefficients of `F`.
const TAYLOR_LEN: usize = 600;
const EXACT_LEN: usize = 41;
const SERIES_SWITCH: f64 = 0.25;
const TAIL_SWITCH: f64 = 4.5;
const PF_SWITCH: f64 = 3.0 * PI;
const PF_MIN_TERMS: usize = 7;
const PF_MAX_POLES: usize = 4000;

/// `f_j`, the Taylor coefficients of `F`: exact rationals for small `j`,
/// then `f_{2k} = (-1)^k 2 zeta(2k+2) / (2 pi)^{2k+2}`.
fn taylor() -> &'static [f64] {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut v = binet_taylor_coeffs(EXACT_LEN - 1).to_f64();
        for j in EXACT_LEN..TAYLOR_LEN {
            if j % 2 == 1 {
                v.push(0.0);
                continue;
            }
            let s = (j + 2) as f64;
            let zeta: f64 = (1..=8).rev().map(|m| (m as f64).powf(-s)).sum();
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            v.push(sign * 2.0 * zeta * (-s * (2.0 * PI).ln()).exp());
        }
        v
    })
}

/// Largest `n` accepted by the Stirling-series routines.
pub const MAX_STIRLING_TERMS: usize = TAYLOR_LEN / 2 - 1;

fn horner(c: &[f64], t: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &v| acc * t + v)
}

/// `e^t - 1` without cancellation for small `|t|`.
fn expm1(t: Complex64) -> Complex64 {
    let (x, y) = (t.re, t.im);
    let s = (0.5 * y).sin();
    Complex64::new(libm::expm1(x) * y.cos() - 2.0 * s * s, x.exp() * y.sin())
}

fn near_pole(t: Complex64) -> bool {
    let k = (t.im / (2.0 * PI)).round();
    k != 0.0 && (t - Complex64::new(0.0, 2.0 * PI * k)).norm() <= 1e-12 * t.norm()
}

/// `F(t)`, analytic except for simple poles at `2 pi i k`, `k != 0`.
pub fn binet_f(t: Complex64) -> Result<Complex64> {
    if !t.re.is_finite() || !t.im.is_finite() {
        return domain(format!("F evaluated at non-finite t = {t}"));
    }
    if near_pole(t) {
        return domain(format!("F has a pole at t = {t}"));
    }
    if t.norm() < SERIES_SWITCH {
        return Ok(horner(&taylor()[..24], t));
    }
    Ok(closed_form(t))
}

fn closed_form(t: Complex64) -> Complex64 {
    let inv_t = t.inv();
    let recip = if t.re > 700.0 {
        Complex64::new(0.0, 0.0)
    } else {
        expm1(t).inv()
    };
    inv_t * (Complex64::new(0.5, 0.0) - inv_t + recip)
}

/// `sum_k (2/a_k^2) (-t^2/a_k^2)^m / (1 + t^2/a_k^2)` with `a_k = 2 pi k`: the
/// remainder after `m` even terms of `F(t) = sum_k 2 / (t^2 + a_k^2)`.
fn partial_fraction_remainder(t: Complex64, m: u32) -> Complex64 {
    let t2 = t * t;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut quiet = 0;
    for k in 1..=PF_MAX_POLES {
        let a2 = (2.0 * PI * k as f64).powi(2);
        let x = t2 / a2;
        let term = (-x).powu(m) * (2.0 / a2) / (1.0 + x);
        acc += term;
        if term.norm() <= 1e-18 * acc.norm() {
            quiet += 1;
            if quiet == 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    acc
}

/// `F(t) - sum_{j < n} f_j t^j`, keeping full relative precision wherever the
/// remainder is much smaller than `F`.
pub fn binet_f_remainder(t: Complex64, n: usize) -> Result<Complex64> {
    let c = taylor();
    if n >= c.len() {
        return domain(format!("at most {} Taylor terms are available", c.len() - 1));
    }
    if n >= PF_MIN_TERMS && t.norm() < PF_SWITCH {
        if near_pole(t) {
            return domain(format!("F has a pole at t = {t}"));
        }
        return Ok(partial_fraction_remainder(t, n.div_ceil(2) as u32));
    }
    if t.norm() < TAIL_SWITCH {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for (i, &f) in c[n..].iter().enumerate() {
            let term = pow * f;
            acc += term;
            if i > 4 && f != 0.0 && term.norm() <= 1e-20 * acc.norm() {
                break;
            }
            pow *= t;
        }
        return Ok(acc * t.powu(n as u32));
    }
    Ok(binet_f(t)? - horner(&c[..n], t))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinetConfig {
    pub quad: QuadratureConfig,
    /// Integration ray `arg t = phi`; `None` uses `-arg(z) / 2`.
    pub phi: Option<f64>,
}

impl Default for BinetConfig {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            phi: None,
        }
    }
}

impl BinetConfig {
    pub fn with_phi(phi: f64) -> Self {
        Self {
            phi: Some(phi),
            ..Default::default()
        }
    }

    fn ray(&self, z: Complex64) -> Result<(Complex64, f64)> {
        let phi = self.phi.unwrap_or(-z.arg() / 2.0);
        if !(phi.abs() < FRAC_PI_2) {
            return domain(format!("rotation must satisfy |phi| < pi/2, got {phi}"));
        }
        let dir = Complex64::from_polar(1.0, phi);
        let rate = (z * dir).re;
        if !(rate > 0.0) {
            return domain(format!(
                "Binet integral diverges: Re(z e^(i phi)) = {rate} for z = {z}, phi = {phi}"
            ));
        }
        Ok((dir, rate))
    }
}

/// `P(z)` by quadrature along the configured ray.
pub fn binet_p_quad(z: Complex64, cfg: &BinetConfig) -> Result<QuadResult> {
    let (dir, rate) = cfg.ray(z)?;
    let zd = z * dir;
    integrate_decaying(
        |r| closed_or_series(dir * r) * (-zd * r).exp() * dir,
        rate,
        &cfg.quad,
    )
}

fn closed_or_series(t: Complex64) -> Complex64 {
    binet_f(t).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

pub fn binet_p(z: Complex64, cfg: &BinetConfig) -> Result<Complex64> {
    Ok(binet_p_quad(z, cfg)?.value)
}

/// `P(z) - sum_{j < n} p_j / z^{j+1}` as the Laplace integral of
/// [`binet_f_remainder`], accurate in relative terms even when the
/// remainder is far below the rounding level of `P(z)`.
pub fn binet_remainder(z: Complex64, n: usize, cfg: &BinetConfig) -> Result<QuadResult> {
    if n >= TAYLOR_LEN {
        return domain(format!("at most {} terms are supported", TAYLOR_LEN - 1));
    }
    let (dir, rate) = cfg.ray(z)?;
    let zd = z * dir;
    integrate_decaying(
        |r| {
            binet_f_remainder(dir * r, n).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
                * (-zd * r).exp()
                * dir
        },
        rate,
        &cfg.quad,
    )
}

/// `K(z) = max_{u >= 0} |z^2 / (u^2 + z^2)|`.
pub fn k_of_z(z: Complex64) -> Result<f64> {
    let th = z.arg().abs();
    if z.norm() == 0.0 || !(th < FRAC_PI_2) {
        return domain(format!("K(z) needs z != 0 and |arg z| < pi/2, got {z}"));
    }
    if th < FRAC_PI_4 {
        return Ok(1.0);
    }
    let s = (2.0 * th).sin();
    Ok(if s > 0.0 { 1.0 / s } else { f64::INFINITY })
}

/// `ln Gamma(z) = (z - 1/2) ln z - z + ln(2 pi)/2 + P(z)`, principal branch,
/// after shifting by `ln Gamma(z) = ln Gamma(z + 1) - ln z` until `Re z >= 2`.
pub fn log_gamma(z: Complex64, cfg: &BinetConfig) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return domain("ln Gamma has a pole at z = 0");
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    if z.re > 0.0 {
        while w.re < 2.0 {
            shift += w.ln();
            w += 1.0;
        }
    }
    let core = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + binet_p(w, cfg)?;
    Ok(core - shift)
}

/// `p_j / z^{j+1}` computed in log space.
fn stirling_term(j: usize, z: Complex64) -> Complex64 {
    let f = taylor()[j];
    if f == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let k = (j + 1) as f64;
    let ln_mag = f.abs().ln() + libm::lgamma(k) - k * z.norm().ln();
    Complex64::from_polar(ln_mag.exp(), -k * z.arg()) * f.signum()
}

/// `sum_{k=1}^n p_{2k-2} / z^{2k-1}`.
pub fn stirling_partial_sum(z: Complex64, n: usize) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return domain("Stirling sum at z = 0");
    }
    if n > MAX_STIRLING_TERMS {
        return domain(format!("at most {MAX_STIRLING_TERMS} Stirling terms are supported"));
    }
    Ok((1..=n).map(|k| stirling_term(2 * k - 2, z)).sum())
}

/// `K(z) |B_{2n+2}| / ((2n+2)(2n+1) |z|^{2n+1})`.
pub fn estimates_st_bound(z: Complex64, n: usize) -> Result<f64> {
    if n > MAX_STIRLING_TERMS {
        return domain(format!("at most {MAX_STIRLING_TERMS} Stirling terms are supported"));
    }
    let k = k_of_z(z)?;
    let j = 2 * n;
    let ln_p = taylor()[j].abs().ln() + libm::lgamma(j as f64 + 1.0);
    Ok(k * (ln_p - (j as f64 + 1.0) * z.norm().ln()).exp())
}

/// Checks `|P(z) - S_n(z)| <= estimates_st_bound(z, n)` for `n = 0..=n_max`;
/// points with `|arg z| >= pi/2` are skipped.
pub fn verify_estimates_st(
    grid: &[Complex64],
    n_max: usize,
    tolerance: f64,
    cfg: &BinetConfig,
) -> Result<EstimateReport> {
    if !(tolerance > 0.0) {
        return domain(format!("tolerance must be positive, got {tolerance}"));
    }
    if n_max > MAX_STIRLING_TERMS {
        return domain(format!("at most {MAX_STIRLING_TERMS} Stirling terms are supported"));
    }
    let mut skipped = Vec::new();
    let mut points = Vec::new();
    for &z in grid {
        if k_of_z(z).is_err() {
            skipped.push(SkippedPoint {
                z,
                reason: "outside S(-pi/2, pi/2)".into(),
            });
        } else {
            points.push(z);
        }
    }
    let per_point = |z: &Complex64| -> Result<Vec<_>> {
        (0..=n_max)
            .map(|n| {
                let rem = binet_remainder(*z, 2 * n, cfg)?.value.norm();
                Ok(make_row(*z, n, rem, estimates_st_bound(*z, n)?, tolerance))
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let chunks: Vec<Result<Vec<_>>> = {
        use rayon::prelude::*;
        points.par_iter().map(per_point).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let chunks: Vec<Result<Vec<_>>> = points.iter().map(per_point).collect();
    let mut rows = Vec::new();
    for c in chunks {
        rows.extend(c?);
    }
    Ok(EstimateReport::from_rows(rows, skipped, tolerance))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StirlingOptimum {
    pub n_opt: usize,
    /// `K(z) 2 sqrt(2 pi |z|) / (2 pi |z| - 1) e^{-2 pi |z|}`.
    pub bound: f64,
    pub k: f64,
    /// `0.94891 e^{-2 pi |z|}`.
    pub error_constant: f64,
    /// `bound <= error_constant`, evaluated when `|z| > 1` and `|arg z| < pi/4`.
    pub error_constant_holds: Option<bool>,
}

/// Relative slack on the comparison with [`ERROR_CONSTANT_M`].
pub const ERROR_CONSTANT_SLACK: f64 = 1e-12;

/// `n_opt = floor(pi |z| - 1)` (clamped at 0) and the closed-form error bound.
pub fn optimal_error_stirling(z: Complex64) -> Result<StirlingOptimum> {
    let r = z.norm();
    if !(r > 1.0 / (2.0 * PI)) {
        return domain(format!("need |z| > 1/(2 pi), got {r}"));
    }
    let k = k_of_z(z)?;
    let x = 2.0 * PI * r;
    let n_opt = (PI * r - 1.0).floor().max(0.0) as usize;
    let bound = k * 2.0 * x.sqrt() / (x - 1.0) * (-x).exp();
    let error_constant = ERROR_CONSTANT_M * (-x).exp();
    let error_constant_holds = (r > 1.0 && z.arg().abs() < FRAC_PI_4)
        .then(|| bound <= error_constant * (1.0 + ERROR_CONSTANT_SLACK));
    Ok(StirlingOptimum {
        n_opt,
        bound,
        k,
        error_constant,
        error_constant_holds,
    })
}

/// Minimizer of [`estimates_st_bound`] over `0..=n_cap` (first on ties).
pub fn brute_force_n_opt(z: Complex64, n_cap: usize) -> Result<(usize, f64)> {
    let mut best = (0, estimates_st_bound(z, 0)?);
    for n in 1..=n_cap {
        let b = estimates_st_bound(z, n)?;
        if b < best.1 {
            best = (n, b);
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StirlingRow {
    pub abs_z: f64,
    pub n_opt: usize,
    pub bound: f64,
    pub actual: f64,
    pub error_constant: f64,
}

/// One row per modulus, evaluated on the positive real axis.
pub fn stirling_table(radii: &[f64], cfg: &BinetConfig) -> Result<Vec<StirlingRow>> {
    radii
        .iter()
        .map(|&r| {
            let z = Complex64::new(r, 0.0);
            let opt = optimal_error_stirling(z)?;
            let actual = binet_remainder(z, 2 * opt.n_opt, cfg)?.value.norm();
            Ok(StirlingRow {
                abs_z: r,
                n_opt: opt.n_opt,
                bound: opt.bound,
                actual,
                error_constant: opt.error_constant,
            })
        })
        .collect()
}

pub fn stirling_table_csv(rows: &[StirlingRow]) -> String {
    let mut out = String::from("abs_z,n_opt,bound,actual,error_constant\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{},{:.16e},{:.16e},{:.16e}",
            r.abs_z, r.n_opt, r.bound, r.actual, r.error_constant
        );
    }
    out
}

/// `a(eps) = 2 pi cos(eps)`, the Gevrey rate in `S(-pi/2 - eps, pi/2 + eps)`.
pub fn widened_sector_rate(epsilon: f64) -> f64 {
    2.0 * PI * epsilon.cos()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidenedReport {
    pub epsilon: f64,
    pub a: f64,
    /// Fitted constant `M`; no optimality is claimed.
    pub m_fit: f64,
    pub report: EstimateReport,
}

const CALIBRATION_RADII: [f64; 5] = [2.0, 3.0, 4.0, 5.0, 6.0];

/// Order-1 estimates in `S(-pi/2 - eps, pi/2 + eps)` with
/// `a = 2 pi cos(eps) (1 - margin)`.
///
/// `M` is fitted as the largest `|R_n(z)| a^n |z|^{n+1} / n!` over a
/// calibration grid `|z| in {2, ..., 6}` spanning the widened sector, and over
/// the large-`|z|` limit `|p_n| a^n / n!`, for `n <= n_max`. The estimates are
/// then checked at `|z| = abs_z`, `arg z = +-(pi/2 + eps/2)`, with `P`
/// evaluated along the ray `arg t = -eps` (and its mirror).
pub fn verify_widened_sector(
    epsilon: f64,
    abs_z: f64,
    n_max: usize,
    margin: f64,
    tolerance: f64,
) -> Result<WidenedReport> {
    if !(epsilon > 0.0 && epsilon < FRAC_PI_2) {
        return domain(format!("epsilon must lie in (0, pi/2), got {epsilon}"));
    }
    if !(margin >= 0.0 && margin < 1.0) {
        return domain(format!("margin must lie in [0, 1), got {margin}"));
    }
    let a = widened_sector_rate(epsilon) * (1.0 - margin);
    let coeffs = stirling_coeffs(n_max.max(1));
    let p = coeffs.to_f64();
    let ln_a = a.ln();
    let scale = |n: usize, r: f64| {
        (n as f64 * ln_a + (n as f64 + 1.0) * r.ln() - libm::lgamma(n as f64 + 1.0)).exp()
    };

    let mut m_fit: f64 = 0.0;
    for n in 0..=n_max {
        m_fit = m_fit.max(p[n].abs() * scale(n, 1.0) / 1.0);
    }
    let edge = FRAC_PI_2 + epsilon;
    let arg = FRAC_PI_2 + epsilon / 2.0;
    let cal = BinetConfig::default();
    for &r in &CALIBRATION_RADII {
        for th in [0.0, FRAC_PI_4, FRAC_PI_2, arg, 0.95 * edge] {
            let z = Complex64::from_polar(r, th);
            for n in 0..=n_max {
                let rem = binet_remainder(z, n, &cal)?.value.norm();
                m_fit = m_fit.max(rem * scale(n, r));
            }
        }
    }

    let expansion = GevreyExpansion::new(coeffs, 1.0, m_fit, a, 0.0)?;
    let sector = Sector::new(-edge, edge)?;
    let grid = [
        Complex64::from_polar(abs_z, arg),
        Complex64::from_polar(abs_z, -arg),
    ];
    let sampler = |z: Complex64| {
        let phi = if z.im >= 0.0 { -epsilon } else { epsilon };
        binet_p(z, &BinetConfig::with_phi(phi)).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let report = verify_gevrey(sampler, &expansion, &sector, &grid, n_max, tolerance)?;
    Ok(WidenedReport {
        epsilon,
        a,
        m_fit,
        report,
    })
}
