//! Sectors of the `z`-plane, half-planes and sector pairs of the Borel
//! (`t`-) plane, and numeric checkers for the hypotheses of the uniqueness
//! theorems: sector criticality, finiteness of `int_0^{pi/2} log log M(delta)`,
//! growth of `a(delta)/delta`, and divergence of the logarithmic integral.
//!
//! Divergence of an improper integral cannot be decided from finitely many
//! samples. The tabulated checkers below therefore extrapolate from the
//! smallest decade of data and attach a [`Confidence`] tag to their verdict.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::tanh_sinh;

/// Absolute tolerance (radians) when comparing a sector opening with `pi/k`.
pub const CRITICALITY_TOL: f64 = 1e-12;

/// `S(alpha, beta) = { r_min < |z| < r_max, alpha < arg z < beta }` on the
/// Riemann surface of `log z`; `beta - alpha` may exceed `2 pi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub alpha: f64,
    pub beta: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Sector {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::with_radii(alpha, beta, 0.0, f64::INFINITY)
    }

    pub fn with_radii(alpha: f64, beta: f64, r_min: f64, r_max: f64) -> Result<Self> {
        if !(alpha < beta) {
            return domain(format!("sector needs alpha < beta, got ({alpha}, {beta})"));
        }
        if !(r_min >= 0.0 && r_min < r_max) {
            return domain(format!("sector needs 0 <= r_min < r_max, got ({r_min}, {r_max})"));
        }
        Ok(Self {
            alpha,
            beta,
            r_min,
            r_max,
        })
    }

    /// `S(-pi/2, pi/2)`, the right half-plane.
    pub fn right_half_plane() -> Self {
        Self::new(-FRAC_PI_2, FRAC_PI_2).unwrap()
    }

    pub fn opening(&self) -> f64 {
        self.beta - self.alpha
    }

    /// Membership of the point with modulus `r` and argument `theta` on the
    /// Riemann surface (no reduction mod `2 pi`).
    pub fn contains_polar(&self, r: f64, theta: f64) -> bool {
        r > self.r_min && r < self.r_max && theta > self.alpha && theta < self.beta
    }

    /// Membership of a plane point: true when some sheet `arg z + 2 pi m`
    /// falls inside the sector.
    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        if !(r > self.r_min && r < self.r_max) {
            return false;
        }
        let arg = z.arg();
        let m_lo = ((self.alpha - arg) / TAU).floor() as i64;
        let m_hi = ((self.beta - arg) / TAU).ceil() as i64;
        (m_lo..=m_hi).any(|m| {
            let th = arg + TAU * m as f64;
            th > self.alpha && th < self.beta
        })
    }
}

/// Opening `beta - alpha` of a sector.
pub fn opening(s: &Sector) -> f64 {
    s.opening()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criticality {
    /// Opening below `pi/k`: uniqueness fails in general.
    Subcritical,
    Critical,
    Supercritical,
}

/// Classifies the opening of `s` against the critical value `pi/k`.
pub fn criticality(s: &Sector, k: f64) -> Result<Criticality> {
    if !(k > 0.0) {
        return domain(format!("order k must be positive, got {k}"));
    }
    let diff = s.opening() - PI / k;
    Ok(if diff.abs() <= CRITICALITY_TOL {
        Criticality::Critical
    } else if diff < 0.0 {
        Criticality::Subcritical
    } else {
        Criticality::Supercritical
    })
}

/// `Pi_{theta,a} = { t = sigma + i tau : sigma cos(theta) - tau sin(theta) < a }`,
/// the half-plane of convergence of the Laplace transform along `arg z = theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub theta: f64,
    pub a: f64,
}

impl HalfPlane {
    pub fn new(theta: f64, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return domain(format!("half-plane offset a must be positive, got {a}"));
        }
        Ok(Self { theta, a })
    }

    /// `sigma cos(theta) - tau sin(theta)`, i.e. `Re(e^{i theta} t)`.
    pub fn level(&self, t: Complex64) -> f64 {
        t.re * self.theta.cos() - t.im * self.theta.sin()
    }

    /// Strict membership; points of the boundary line `L_{theta,a}` are excluded.
    pub fn contains(&self, t: Complex64) -> bool {
        self.level(t) < self.a
    }

    pub fn closure_contains(&self, t: Complex64) -> bool {
        self.level(t) <= self.a
    }

    /// Signed distance from the boundary line, positive inside.
    pub fn margin(&self, t: Complex64) -> f64 {
        self.a - self.level(t)
    }
}

pub fn halfplane_contains(h: &HalfPlane, t: Complex64) -> bool {
    h.contains(t)
}

/// The two half-planes `Pi_{pi/2 - delta, a}` and `Pi_{-pi/2 + delta, a}`
/// whose boundary lines cross on the positive axis at the apex `a / sin(delta)`.
///
/// `S_1` is their intersection (the left sector `S_l`), `S_2` their union;
/// the closure of the right sector `S_r` is the complement of `S_2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TSectorPair {
    pub delta: f64,
    pub a: f64,
    pub apex: f64,
}

impl TSectorPair {
    pub fn upper(&self) -> HalfPlane {
        HalfPlane {
            theta: FRAC_PI_2 - self.delta,
            a: self.a,
        }
    }

    pub fn lower(&self) -> HalfPlane {
        HalfPlane {
            theta: -FRAC_PI_2 + self.delta,
            a: self.a,
        }
    }

    pub fn in_s1(&self, t: Complex64) -> bool {
        self.upper().contains(t) && self.lower().contains(t)
    }

    pub fn in_s2(&self, t: Complex64) -> bool {
        self.upper().contains(t) || self.lower().contains(t)
    }

    pub fn in_left(&self, t: Complex64) -> bool {
        self.in_s1(t)
    }

    /// Open right sector: strictly beyond both boundary lines.
    pub fn in_right(&self, t: Complex64) -> bool {
        !self.upper().closure_contains(t) && !self.lower().closure_contains(t)
    }

    pub fn in_right_closure(&self, t: Complex64) -> bool {
        !self.in_s2(t)
    }
}

/// Builds the sector pair for `0 < delta < pi/2`, `a > 0`.
pub fn t_regions(delta: f64, a: f64) -> Result<TSectorPair> {
    if !(delta > 0.0 && delta < FRAC_PI_2) {
        return domain(format!("delta must lie in (0, pi/2), got {delta}"));
    }
    if !(a > 0.0) {
        return domain(format!("a must be positive, got {a}"));
    }
    Ok(TSectorPair {
        delta,
        a,
        apex: a / delta.sin(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TabulatedScale {
    /// Samples hold `M(delta)`.
    #[default]
    Linear,
    /// Samples hold `log M(delta)`.
    Log,
    /// Samples hold `log log M(delta)`; needed when `M` overflows `f64`.
    LogLog,
}

/// The bound `delta -> M(delta)` in the family of estimates indexed by the
/// sector `S(-pi/2 + delta, pi/2 - delta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MDeltaProfile {
    Constant {
        m: f64,
    },
    /// `M exp(b / delta^gamma)`.
    Exponential {
        m: f64,
        b: f64,
        gamma: f64,
    },
    /// Samples `(delta_i, value_i)` sorted by `delta`.
    Tabulated {
        #[serde(default)]
        scale: TabulatedScale,
        samples: Vec<(f64, f64)>,
    },
}

impl MDeltaProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            MDeltaProfile::Constant { m } => {
                if !(m.ln() > 1.0) {
                    return domain(format!("constant profile needs log M > 1, got M = {m}"));
                }
            }
            MDeltaProfile::Exponential { m, b, gamma } => {
                if !(*m > 0.0 && *b > 0.0 && *gamma > 0.0) {
                    return domain("exponential profile needs M, b, gamma > 0");
                }
            }
            MDeltaProfile::Tabulated { samples, .. } => {
                if samples.len() < 3 {
                    return domain("tabulated profile needs at least 3 samples");
                }
                for w in samples.windows(2) {
                    if !(w[0].0 < w[1].0) {
                        return domain("tabulated samples must be sorted by strictly increasing delta");
                    }
                }
                if !(samples[0].0 > 0.0 && samples[samples.len() - 1].0 <= FRAC_PI_2 + 1e-12) {
                    return domain("tabulated delta values must lie in (0, pi/2]");
                }
                for (i, g) in self.tabulated_loglog().into_iter().enumerate() {
                    if !(g > 0.0) {
                        return Err(Error::Domain(format!(
                            "precondition violated: log M(delta) <= 1 at delta = {}",
                            samples[i].0
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `log log M(delta)` for the closed-form variants.
    ///
    /// The exponential variant is normalized to `max(log M(delta), 1)`:
    /// enlarging `M(delta)` only weakens the estimate family, so the standing
    /// assumption `log M(delta) > 1` costs nothing, and the floor keeps the
    /// integrand nonnegative where `M exp(b/delta^gamma)` is small.
    pub fn log_log(&self, delta: f64) -> f64 {
        match self {
            MDeltaProfile::Constant { m } => m.ln().ln(),
            MDeltaProfile::Exponential { m, b, gamma } => {
                let ln_m = m.ln();
                let x = b.ln() - gamma * delta.ln();
                if x > 30.0 {
                    x + (ln_m * (-x).exp()).ln_1p()
                } else {
                    (ln_m + x.exp()).max(1.0).ln()
                }
            }
            MDeltaProfile::Tabulated { .. } => f64::NAN,
        }
    }

    fn tabulated_loglog(&self) -> Vec<f64> {
        match self {
            MDeltaProfile::Tabulated { scale, samples } => samples
                .iter()
                .map(|&(_, v)| match scale {
                    TabulatedScale::Linear => v.ln().ln(),
                    TabulatedScale::Log => v.ln(),
                    TabulatedScale::LogLog => v,
                })
                .collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    /// Decided from the closed form.
    Analytic,
    /// Extrapolation over at least a full decade of small `delta`.
    High,
    /// Too little data near zero for the extrapolation to be trusted.
    Low,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogVerdict {
    pub finite: bool,
    /// Value of the integral, `f64::INFINITY` when judged divergent.
    pub value: f64,
    pub confidence: Confidence,
    /// For tabulated data: fitted `p` in `log log M(delta) ~ C delta^{-p}`
    /// over the smallest decade.
    pub local_exponent: Option<f64>,
}

/// Local power-law exponent at or above which a tabulated integrand is
/// judged non-integrable at `delta = 0`.
pub const DIVERGENCE_EXPONENT: f64 = 0.9;

/// Decides finiteness of `int_0^{pi/2} log log M(delta) d delta`.
///
/// Constant and exponential profiles are decided analytically (the latter is
/// always finite since `log log M(delta) ~ gamma log(1/delta)`), with the
/// value obtained by tanh-sinh quadrature. Tabulated profiles are integrated
/// by the trapezoid rule over the samples, extended by a constant up to
/// `pi/2`, and extrapolated to zero from a power-law fit over the smallest
/// decade: exponents `p >= 0.9` are reported divergent, smaller ones add the
/// tail `g(delta_min) delta_min / (1 - p)`.
pub fn carleman_loglog(m: &MDeltaProfile) -> Result<LogLogVerdict> {
    m.validate()?;
    match m {
        MDeltaProfile::Constant { .. } => Ok(LogLogVerdict {
            finite: true,
            value: FRAC_PI_2 * m.log_log(1.0),
            confidence: Confidence::Analytic,
            local_exponent: None,
        }),
        MDeltaProfile::Exponential { .. } => {
            let (v, _, _) = tanh_sinh(
                |d| Complex64::new(m.log_log(d), 0.0),
                0.0,
                FRAC_PI_2,
                1e-12,
                8192,
            );
            Ok(LogLogVerdict {
                finite: true,
                value: v.re,
                confidence: Confidence::Analytic,
                local_exponent: None,
            })
        }
        MDeltaProfile::Tabulated { samples, .. } => {
            let g = m.tabulated_loglog();
            let deltas: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let mut body = 0.0;
            for i in 1..deltas.len() {
                body += 0.5 * (g[i] + g[i - 1]) * (deltas[i] - deltas[i - 1]);
            }
            let last = deltas.len() - 1;
            body += g[last] * (FRAC_PI_2 - deltas[last]).max(0.0);

            let d_min = deltas[0];
            let mut decade: Vec<usize> = (0..deltas.len())
                .filter(|&i| deltas[i] <= 10.0 * d_min)
                .collect();
            let full_decade = decade.len() >= 5 && d_min <= 1e-3;
            if decade.len() < 3 {
                decade = (0..3).collect();
            }
            let pts: Vec<(f64, f64)> = decade
                .iter()
                .map(|&i| (deltas[i].ln(), g[i].ln()))
                .collect();
            let p = -fit_slope(&pts);
            let confidence = if full_decade {
                Confidence::High
            } else {
                Confidence::Low
            };
            if p >= DIVERGENCE_EXPONENT {
                Ok(LogLogVerdict {
                    finite: false,
                    value: f64::INFINITY,
                    confidence,
                    local_exponent: Some(p),
                })
            } else {
                let tail = g[0] * d_min / (1.0 - p.max(0.0));
                Ok(LogLogVerdict {
                    finite: true,
                    value: body + tail,
                    confidence,
                    local_exponent: Some(p),
                })
            }
        }
    }
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// The rate `delta -> a(delta)` when the decay constant of the estimates is
/// allowed to depend on the sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ADeltaProfile {
    Constant { a: f64 },
    Tabulated { samples: Vec<(f64, f64)> },
    /// `coeff * delta^exponent`.
    Power { coeff: f64, exponent: f64 },
    /// `amplitude * cos(delta)`.
    Cosine { amplitude: f64 },
}

/// Threshold on the fitted slope of `log(a/delta)` against `log delta` below
/// which tabulated ratios count as growing without bound.
pub const A_DELTA_SLOPE: f64 = -0.05;

/// Checks the necessary condition `a(delta)/delta -> +inf` as `delta -> 0`.
///
/// Closed forms are decided exactly. Tabulated data must show `a/delta`
/// nondecreasing toward zero over the smallest decade of `delta` and a fitted
/// log-log slope of at most `-0.05`; ratios that level off fail.
pub fn a_delta_condition(a: &ADeltaProfile) -> Result<bool> {
    match a {
        ADeltaProfile::Constant { a } => {
            if !(*a > 0.0) {
                return domain("a must be positive");
            }
            Ok(true)
        }
        ADeltaProfile::Cosine { amplitude } => {
            if !(*amplitude > 0.0) {
                return domain("amplitude must be positive");
            }
            Ok(true)
        }
        ADeltaProfile::Power { coeff, exponent } => {
            if !(*coeff > 0.0) {
                return domain("coefficient must be positive");
            }
            Ok(*exponent < 1.0)
        }
        ADeltaProfile::Tabulated { samples } => {
            if samples.is_empty() {
                return domain("empty a(delta) grid");
            }
            let mut s = samples.clone();
            s.sort_by(|x, y| x.0.total_cmp(&y.0));
            if s.iter().any(|&(d, v)| !(d > 0.0) || !(v > 0.0)) {
                return domain("a(delta) samples need delta > 0 and a > 0");
            }
            let d_min = s[0].0;
            let mut decade: Vec<(f64, f64)> =
                s.iter().copied().filter(|&(d, _)| d <= 10.0 * d_min).collect();
            if decade.len() < 2 {
                decade = s.iter().copied().take(3).collect();
            }
            if decade.len() < 2 {
                return domain("need at least 2 samples of a(delta)");
            }
            let ratios: Vec<f64> = decade.iter().map(|&(d, v)| v / d).collect();
            let monotone = ratios.windows(2).all(|w| w[0] >= w[1] * (1.0 - 1e-12));
            let pts: Vec<(f64, f64)> = decade
                .iter()
                .zip(&ratios)
                .map(|(&(d, _), &r)| (d.ln(), r.ln()))
                .collect();
            Ok(monotone && fit_slope(&pts) <= A_DELTA_SLOPE)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogIntegralConfig {
    /// The truncated integral must fall below `-threshold`.
    pub threshold: f64,
    /// Ratio of the last two doubling increments at or above which the
    /// integral is considered still falling rather than flattening.
    pub flatten_ratio: f64,
}

impl Default for LogIntegralConfig {
    fn default() -> Self {
        Self {
            threshold: 1.0,
            flatten_ratio: 0.75,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogIntegralVerdict {
    pub divergent: bool,
    /// Integral over the full sampled range.
    pub truncated_integral: f64,
    /// Increment over `[Y/2, Y]` divided by the increment over `[Y/4, Y/2]`.
    pub increment_ratio: f64,
}

/// Heuristic test of `int log|P(c+iy)| / (1 + |z|^2) d|z| = -inf` from samples
/// `(y, log|P(c+iy)|)` on a symmetric grid.
///
/// The integral truncated to `|y| <= Y` is computed by the trapezoid rule for
/// `Y = Ymax/4, Ymax/2, Ymax`. Divergence is reported when the full value is
/// below `-threshold` and the last increment is negative and at least
/// `flatten_ratio` times the previous one; convergent tails shrink by about
/// half per doubling and fail that test.
pub fn log_integral_divergence(
    c: f64,
    samples: &[(f64, f64)],
    cfg: &LogIntegralConfig,
) -> Result<LogIntegralVerdict> {
    if samples.len() < 16 {
        return domain(format!("need at least 16 samples, got {}", samples.len()));
    }
    let mut s = samples.to_vec();
    s.sort_by(|x, y| x.0.total_cmp(&y.0));
    let y_max = s[0].0.abs().min(s[s.len() - 1].0.abs());
    if !(y_max > 0.0) {
        return domain("samples must straddle y = 0");
    }
    let truncated = |cut: f64| -> f64 {
        let mut acc = 0.0;
        for w in s.windows(2) {
            let (y0, v0) = w[0];
            let (y1, v1) = w[1];
            if y0.abs() <= cut * (1.0 + 1e-12) && y1.abs() <= cut * (1.0 + 1e-12) {
                let h0 = v0 / (1.0 + c * c + y0 * y0);
                let h1 = v1 / (1.0 + c * c + y1 * y1);
                acc += 0.5 * (h0 + h1) * (y1 - y0);
            }
        }
        acc
    };
    let i4 = truncated(y_max / 4.0);
    let i2 = truncated(y_max / 2.0);
    let i1 = truncated(y_max);
    let d_prev = i2 - i4;
    let d_last = i1 - i2;
    let ratio = if d_prev != 0.0 { d_last / d_prev } else { 0.0 };
    let divergent = i1 < -cfg.threshold && d_last < 0.0 && d_prev < 0.0 && ratio >= cfg.flatten_ratio;
    Ok(LogIntegralVerdict {
        divergent,
        truncated_integral: i1,
        increment_ratio: ratio,
    })
}

/// Abscissa `h = b / (a - c)` of the vertical line on which a function with
/// `|P(z)| < M exp(b/delta) e^{-a|z|}` decays like `e^{-c|y|}`.
pub fn havin_shift(b: f64, a: f64, c: f64) -> Result<f64> {
    if !(b > 0.0) {
        return domain(format!("b must be positive, got {b}"));
    }
    if !(c > 0.0 && c < a) {
        return domain(format!("need 0 < c < a, got c = {c}, a = {a}"));
    }
    Ok(b / (a - c))
}

/// Smallest `M_h` with `|P(h + iy)| <= M_h e^{-c|y|}` over samples `(y, |P(h+iy)|)`.
pub fn c_inequality_constant(samples: &[(f64, f64)], c: f64) -> f64 {
    samples
        .iter()
        .map(|&(y, v)| v * (c * y.abs()).exp())
        .fold(0.0, f64::max)
}

/// Checks `|P(h + iy)| < M_h e^{-c|y|}` at every sample.
pub fn check_c_inequality(samples: &[(f64, f64)], c: f64, m_h: f64) -> bool {
    samples.iter().all(|&(y, v)| v < m_h * (-c * y.abs()).exp())
}
