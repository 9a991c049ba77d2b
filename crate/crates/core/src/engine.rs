//! Partial sums and remainder bounds of Gevrey expansions
//! `P(z) ~ sum_k p_k / z^{k+1}`, optimal truncation, sampled verification of
//! the estimate family, and the null-expansion counterexample family.
//!
//! Two bound forms are implemented verbatim:
//!
//! * order 1: `K_P M n! / (a^n |z|^{n+1})`
//! * order k: `K_P M (n!)^{1/k} / (k a |z|)^{n+1}`
//!
//! They differ by bounded factors at `k = 1` (`a^n` against `a^{n+1}`); each
//! is used in its own regime. Factorials go through `ln Gamma`, so bounds stay
//! finite for `n` in the hundreds.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sector::Sector;
use crate::series::{stirling_coeffs, CoefficientSequence};

/// A coefficient sequence together with the constants of its estimate family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExpansionRepr", into = "ExpansionRepr")]
pub struct GevreyExpansion {
    coeffs: CoefficientSequence,
    values: Vec<f64>,
    pub order: f64,
    pub m: f64,
    pub a: f64,
    pub sigma: f64,
    pub k_p: f64,
}

#[derive(Serialize, Deserialize)]
struct ExpansionRepr {
    coefficients: CoefficientSequence,
    #[serde(default = "one")]
    k: f64,
    m: f64,
    a: f64,
    #[serde(default)]
    sigma: f64,
    #[serde(default = "one")]
    k_p: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<ExpansionRepr> for GevreyExpansion {
    type Error = Error;

    fn try_from(r: ExpansionRepr) -> Result<Self> {
        GevreyExpansion::new(r.coefficients, r.k, r.m, r.a, r.sigma)?.with_k_p(r.k_p)
    }
}

impl From<GevreyExpansion> for ExpansionRepr {
    fn from(e: GevreyExpansion) -> Self {
        ExpansionRepr {
            coefficients: e.coeffs,
            k: e.order,
            m: e.m,
            a: e.a,
            sigma: e.sigma,
            k_p: e.k_p,
        }
    }
}

impl GevreyExpansion {
    pub fn new(coeffs: CoefficientSequence, order: f64, m: f64, a: f64, sigma: f64) -> Result<Self> {
        if !(order > 0.0) {
            return domain(format!("order k must be positive, got {order}"));
        }
        if !(m > 0.0) {
            return domain(format!("M must be positive, got {m}"));
        }
        if !(a > 0.0) {
            return domain(format!("a must be positive, got {a}"));
        }
        if !(sigma >= 0.0) {
            return domain(format!("sigma must be nonnegative, got {sigma}"));
        }
        let values = coeffs.to_f64();
        Ok(Self {
            coeffs,
            values,
            order,
            m,
            a,
            sigma,
            k_p: 1.0,
        })
    }

    pub fn with_k_p(mut self, k_p: f64) -> Result<Self> {
        if !(k_p > 0.0) {
            return domain(format!("K_P must be positive, got {k_p}"));
        }
        self.k_p = k_p;
        Ok(self)
    }

    /// Stirling series of the Binet function, `n_terms` coefficients, with the
    /// order-1 constants `M = 1/12`, `a = 2 pi` valid for `|arg z| < pi/4`.
    pub fn stirling(n_terms: usize) -> Self {
        Self::new(
            stirling_coeffs(n_terms.max(1) - 1),
            1.0,
            1.0 / 12.0,
            2.0 * PI,
            0.0,
        )
        .expect("valid constants")
    }

    pub fn coeffs(&self) -> &CoefficientSequence {
        &self.coeffs
    }

    pub fn coeff_values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `sum_{k<n} p_k / z^{k+1}`, by Horner's rule in `1/z`.
pub fn partial_sum(e: &GevreyExpansion, z: Complex64, n: usize) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return domain("partial sum at z = 0");
    }
    if n > e.values.len() {
        return domain(format!(
            "requested {n} terms but the expansion holds {}",
            e.values.len()
        ));
    }
    let w = z.inv();
    let mut acc = Complex64::new(0.0, 0.0);
    for &p in e.values[..n].iter().rev() {
        acc = acc * w + p;
    }
    Ok(acc * w)
}

/// Right-hand side of the order-`k` estimate at truncation `n`.
pub fn remainder_bound(e: &GevreyExpansion, z: Complex64, n: usize) -> Result<f64> {
    let r = z.norm();
    if !(r > 0.0) {
        return domain("remainder bound needs |z| > 0");
    }
    Ok(bound_at_modulus(e, r, n))
}

fn bound_at_modulus(e: &GevreyExpansion, r: f64, n: usize) -> f64 {
    let nf = n as f64;
    let ln_fact = libm::lgamma(nf + 1.0);
    let ln_b = if e.order == 1.0 {
        ln_fact - nf * e.a.ln() - (nf + 1.0) * r.ln()
    } else {
        ln_fact / e.order - (nf + 1.0) * (e.order * e.a * r).ln()
    };
    e.k_p * e.m * ln_b.exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub n_opt: usize,
    pub bound: f64,
}

/// Default scan cap `2 ceil(a |z|) + 16` for [`optimal_truncation`].
pub fn default_truncation_cap(e: &GevreyExpansion, z: Complex64) -> usize {
    2 * (e.a * z.norm()).ceil() as usize + 16
}

/// Truncation order minimizing [`remainder_bound`] over `0..=cap`, found by
/// exhaustive scan; ties resolve to the smallest `n`.
pub fn optimal_truncation(e: &GevreyExpansion, z: Complex64) -> Result<Truncation> {
    optimal_truncation_with_cap(e, z, default_truncation_cap(e, z))
}

pub fn optimal_truncation_with_cap(
    e: &GevreyExpansion,
    z: Complex64,
    cap: usize,
) -> Result<Truncation> {
    let r = z.norm();
    let threshold = e.sigma.max(1.0 / e.a);
    if !(r > threshold) {
        return Err(Error::BelowSuperasymptoticThreshold {
            abs_z: r,
            threshold,
        });
    }
    let mut best = Truncation {
        n_opt: 0,
        bound: bound_at_modulus(e, r, 0),
    };
    for n in 1..=cap {
        let b = bound_at_modulus(e, r, n);
        if b < best.bound {
            best = Truncation { n_opt: n, bound: b };
        }
    }
    Ok(best)
}

/// `2 K_P M_a e^{-a|z|}` with `M_a = 4 M sqrt(2 pi) a`: the bound on the
/// difference of two functions sharing the expansion, after minimizing over `n`.
pub fn superasymptotic_bound(e: &GevreyExpansion, z: Complex64) -> Result<f64> {
    let r = z.norm();
    if !(r > 1.0 / e.a) {
        return Err(Error::BelowSuperasymptoticThreshold {
            abs_z: r,
            threshold: 1.0 / e.a,
        });
    }
    let m_a = 4.0 * e.m * (2.0 * PI).sqrt() * e.a;
    Ok(2.0 * e.k_p * m_a * (-e.a * r).exp())
}

/// Default relative tolerance for [`verify_gevrey`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub z: Complex64,
    pub n: usize,
    pub remainder: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub z: Complex64,
    pub reason: String,
}

/// Per-`(z, n)` comparison of the actual remainder with its bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub rows: Vec<ReportRow>,
    pub skipped: Vec<SkippedPoint>,
    pub tolerance: f64,
    pub pass: bool,
}

pub(crate) fn make_row(z: Complex64, n: usize, remainder: f64, bound: f64, tolerance: f64) -> ReportRow {
    let ratio = if bound > 0.0 {
        remainder / bound
    } else if remainder == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let pass = ratio <= 1.0 + tolerance;
    ReportRow {
        z,
        n,
        remainder,
        bound,
        ratio,
        pass,
    }
}

impl EstimateReport {
    pub(crate) fn from_rows(rows: Vec<ReportRow>, skipped: Vec<SkippedPoint>, tolerance: f64) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        Self {
            rows,
            skipped,
            tolerance,
            pass,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// CSV with columns `re_z,im_z,n,remainder,bound,ratio,pass`; floats are
    /// printed with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_z,im_z,n,remainder,bound,ratio,pass\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
                r.z.re, r.z.im, r.n, r.remainder, r.bound, r.ratio, r.pass
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Compares `|P(z) - S_n(z)|` against [`remainder_bound`] for every grid
/// point and `n = 0..=n_max`. A row passes when `remainder / bound <= 1 + tolerance`.
///
/// Grid points outside `sector` or with `|z| <= sigma` are listed as skipped.
/// With the `parallel` feature grid points are evaluated concurrently, so the
/// sampler must tolerate concurrent calls; row order is always grid order.
pub fn verify_gevrey<F>(
    sampler: F,
    e: &GevreyExpansion,
    sector: &Sector,
    grid: &[Complex64],
    n_max: usize,
    tolerance: f64,
) -> Result<EstimateReport>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    verify_rows(e, sector, grid, n_max, tolerance, |z| {
        let value = sampler(z);
        (0..=n_max)
            .map(|n| (value - partial_sum(e, z, n).expect("validated grid point")).norm())
            .collect()
    })
}

/// As [`verify_gevrey`], with the actual remainder `|P(z) - S_n(z)|`
/// supplied directly by `remainder(z, n)`. Useful when the remainder is far
/// below the rounding level of `P(z)` and is computed by other means.
pub fn verify_gevrey_with<R>(
    remainder: R,
    e: &GevreyExpansion,
    sector: &Sector,
    grid: &[Complex64],
    n_max: usize,
    tolerance: f64,
) -> Result<EstimateReport>
where
    R: Fn(Complex64, usize) -> f64 + Sync,
{
    verify_rows(e, sector, grid, n_max, tolerance, |z| {
        (0..=n_max).map(|n| remainder(z, n)).collect()
    })
}

fn verify_rows<G>(
    e: &GevreyExpansion,
    sector: &Sector,
    grid: &[Complex64],
    n_max: usize,
    tolerance: f64,
    remainders: G,
) -> Result<EstimateReport>
where
    G: Fn(Complex64) -> Vec<f64> + Sync,
{
    if !(tolerance > 0.0) {
        return domain(format!("tolerance must be positive, got {tolerance}"));
    }
    if n_max > e.values.len() {
        return domain(format!(
            "n_max = {n_max} exceeds the {} available coefficients",
            e.values.len()
        ));
    }
    let mut skipped = Vec::new();
    let mut points = Vec::new();
    for &z in grid {
        if !sector.contains(z) {
            skipped.push(SkippedPoint {
                z,
                reason: "outside sector".into(),
            });
        } else if !(z.norm() > e.sigma) {
            skipped.push(SkippedPoint {
                z,
                reason: format!("|z| <= sigma = {}", e.sigma),
            });
        } else {
            points.push(z);
        }
    }
    let per_point = |z: &Complex64| -> Vec<ReportRow> {
        remainders(*z)
            .into_iter()
            .enumerate()
            .map(|(n, rem)| make_row(*z, n, rem, bound_at_modulus(e, z.norm(), n), tolerance))
            .collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<ReportRow> = {
        use rayon::prelude::*;
        points.par_iter().flat_map_iter(per_point).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<ReportRow> = points.iter().flat_map(per_point).collect();
    Ok(EstimateReport::from_rows(rows, skipped, tolerance))
}

/// `P(z) = phi(z) e^{-z} / z` with bounded `phi`: a function whose Gevrey
/// expansion in `S(-pi/2 + delta, pi/2 - delta)` is identically zero, with
/// `M = sup |phi|` and `a = sin(delta)`.
pub struct Counterexample<F> {
    phi: F,
    pub delta: f64,
    pub expansion: GevreyExpansion,
}

impl<F> Counterexample<F>
where
    F: Fn(Complex64) -> Complex64,
{
    pub fn sample(&self, z: Complex64) -> Complex64 {
        (self.phi)(z) * (-z).exp() / z
    }

    /// `S(-pi/2 + delta, pi/2 - delta)`.
    pub fn sector(&self) -> Sector {
        Sector::new(-PI / 2.0 + self.delta, PI / 2.0 - self.delta).expect("0 < delta < pi/2")
    }
}

/// Builds the counterexample for `phi` with the caller-supplied bound
/// `phi_sup >= sup |phi|` and `n_terms` zero coefficients.
pub fn counterexample<F>(phi: F, phi_sup: f64, delta: f64, n_terms: usize) -> Result<Counterexample<F>>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(phi_sup > 0.0) {
        return domain(format!("bound on |phi| must be positive, got {phi_sup}"));
    }
    if !(delta > 0.0 && delta < PI / 2.0) {
        return domain(format!("delta must lie in (0, pi/2), got {delta}"));
    }
    let expansion = GevreyExpansion::new(
        CoefficientSequence::zeros(n_terms),
        1.0,
        phi_sup,
        delta.sin(),
        0.0,
    )?;
    Ok(Counterexample {
        phi,
        delta,
        expansion,
    })
}
