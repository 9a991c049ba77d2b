//! Exact coefficient generation: Bernoulli numbers, the Taylor coefficients of
//! the Binet kernel `F(t) = (1/t)(1/2 - 1/t + 1/(e^t - 1))`, and the Stirling
//! series coefficients `p_k = f_k k!`.
//!
//! Everything here is computed in exact rational arithmetic so that the
//! identities linking the three sequences can be asserted as equalities.

use std::fmt;
use std::ops::Range;

use nalgebra::{Matrix3, Vector3};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Exact rational number with a positive denominator in lowest terms.
pub type Rational = BigRational;

/// What a [`CoefficientSequence`] holds. Determines which structural
/// invariants are checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    /// `B_0, B_1, ..., B_{2N}`.
    Bernoulli,
    /// `f_0, f_1, ...`, Taylor coefficients of the Binet kernel at `t = 0`.
    BinetTaylor,
    /// `p_0, p_1, ...`, coefficients of the Stirling series in powers of `1/z`.
    Stirling,
    User,
}

impl SequenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SequenceKind::Bernoulli => "bernoulli",
            SequenceKind::BinetTaylor => "binet-taylor",
            SequenceKind::Stirling => "stirling",
            SequenceKind::User => "user",
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(SequenceKind::Bernoulli),
            "binet-taylor" | "binet" => Ok(SequenceKind::BinetTaylor),
            "stirling" => Ok(SequenceKind::Stirling),
            "user" => Ok(SequenceKind::User),
            other => Err(Error::InvalidSequence(format!("unknown kind {other:?}"))),
        }
    }
}

/// A finite, index-contiguous sequence of exact rationals `c_0, c_1, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSequence {
    kind: SequenceKind,
    values: Vec<Rational>,
}

impl CoefficientSequence {
    /// Builds a sequence, checking the invariants implied by `kind`:
    /// Bernoulli sequences start with `B_0 = 1` and vanish at odd indices
    /// `>= 3`; Binet-Taylor and Stirling sequences vanish at odd indices.
    pub fn new(kind: SequenceKind, values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSequence("sequence is empty".into()));
        }
        let odd_from = match kind {
            SequenceKind::Bernoulli => {
                if !values[0].is_one() {
                    return Err(Error::InvalidSequence("B_0 must equal 1".into()));
                }
                Some(3)
            }
            SequenceKind::BinetTaylor | SequenceKind::Stirling => Some(1),
            SequenceKind::User => None,
        };
        if let Some(start) = odd_from {
            if let Some(i) = (start..values.len())
                .step_by(2)
                .find(|&i| !values[i].is_zero())
            {
                return Err(Error::InvalidSequence(format!(
                    "{kind} sequence must vanish at odd index {i}"
                )));
            }
        }
        Ok(Self { kind, values })
    }

    /// `n` exact zeros, tagged `user`.
    pub fn zeros(n: usize) -> Self {
        Self {
            kind: SequenceKind::User,
            values: vec![Rational::zero(); n.max(1)],
        }
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Rational> {
        self.values.get(i)
    }

    /// Nearest `f64` to each entry.
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(rational_to_f64).collect()
    }

    /// Multiplies every entry by `c`, keeping the kind when the result still
    /// satisfies its invariants and falling back to `user` otherwise.
    pub fn scaled(&self, c: &Rational) -> Self {
        let values: Vec<_> = self.values.iter().map(|v| v * c).collect();
        Self::new(self.kind, values.clone()).unwrap_or(Self {
            kind: SequenceKind::User,
            values,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    kind: String,
    values: Vec<(String, String)>,
}

impl Serialize for CoefficientSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SequenceRepr {
            kind: self.kind.as_str().to_owned(),
            values: self
                .values
                .iter()
                .map(|v| (v.numer().to_string(), v.denom().to_string()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoefficientSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SequenceRepr::deserialize(deserializer)?;
        let kind: SequenceKind = repr.kind.parse().map_err(de::Error::custom)?;
        let values = repr
            .values
            .iter()
            .map(|(n, d)| {
                let n: BigInt = n.trim().parse().map_err(de::Error::custom)?;
                let d: BigInt = d.trim().parse().map_err(de::Error::custom)?;
                if d.is_zero() {
                    return Err(de::Error::custom("zero denominator"));
                }
                Ok(Rational::new(n, d))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        CoefficientSequence::new(kind, values).map_err(de::Error::custom)
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let l = ln_abs(r);
        if r.is_negative() {
            -l.exp()
        } else {
            l.exp()
        }
    })
}

fn ln_abs_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln |r|` without overflowing for huge numerators or denominators.
/// Returns `-inf` for zero.
pub fn ln_abs(r: &Rational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// Bernoulli numbers `B_0, ..., B_{2 n_max}` in the convention
/// `t/(e^t - 1) = sum B_j t^j / j!` (so `B_1 = -1/2`).
///
/// Uses the recurrence `sum_{j=0}^{m} C(m+1, j) B_j = 0`, `m >= 1`.
pub fn bernoulli_numbers(n_max: usize) -> CoefficientSequence {
    let top = 2 * n_max;
    let mut b: Vec<Rational> = Vec::with_capacity(top + 1);
    b.push(Rational::one());
    for m in 1..=top {
        if m >= 3 && m % 2 == 1 {
            b.push(Rational::zero());
            continue;
        }
        let row = binomial_row(m + 1);
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                acc += bj * Rational::from_integer(row[j].clone());
            }
        }
        b.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
    CoefficientSequence::new(SequenceKind::Bernoulli, b).expect("Bernoulli invariants")
}

/// Reciprocal of a power series with nonzero constant term, to `len` terms.
fn series_reciprocal(a: &[Rational], len: usize) -> Vec<Rational> {
    let inv0 = a[0].recip();
    let mut out: Vec<Rational> = Vec::with_capacity(len);
    out.push(inv0.clone());
    for m in 1..len {
        let mut acc = Rational::zero();
        for j in 1..=m.min(a.len() - 1) {
            acc += &a[j] * &out[m - j];
        }
        out.push(-acc * &inv0);
    }
    out
}

/// Taylor coefficients `f_0, ..., f_{n_max}` of the Binet kernel at `t = 0`.
///
/// The numerator `t/2 - 1 + t/(e^t - 1)` is expanded exactly, with
/// `t/(e^t - 1)` obtained as the reciprocal of `(e^t - 1)/t = sum t^j/(j+1)!`,
/// and then divided by `t^2`; its first two coefficients vanish identically.
pub fn binet_taylor_coeffs(n_max: usize) -> CoefficientSequence {
    let len = n_max + 3;
    let mut exp_m1_over_t = Vec::with_capacity(len);
    let mut fact = BigInt::one();
    for j in 0..len {
        fact *= BigInt::from(j + 1);
        exp_m1_over_t.push(Rational::new(BigInt::one(), fact.clone()));
    }
    let mut numerator = series_reciprocal(&exp_m1_over_t, len);
    numerator[0] -= Rational::one();
    numerator[1] += Rational::new(BigInt::one(), BigInt::from(2));
    assert!(
        numerator[0].is_zero() && numerator[1].is_zero(),
        "Binet numerator must vanish to second order at t = 0"
    );
    let f = numerator.split_off(2);
    CoefficientSequence::new(SequenceKind::BinetTaylor, f).expect("Binet kernel is even")
}

/// Stirling series coefficients `p_0, ..., p_{n_max}` with `p_k = f_k k!`.
///
/// Each even entry is checked against `p_{2k-2} = B_{2k} / (2k (2k - 1))`;
/// a mismatch is a defect in this module and panics.
pub fn stirling_coeffs(n_max: usize) -> CoefficientSequence {
    let f = binet_taylor_coeffs(n_max);
    let mut fact = BigInt::one();
    let mut p = Vec::with_capacity(n_max + 1);
    for (k, fk) in f.values().iter().enumerate() {
        if k > 0 {
            fact *= BigInt::from(k);
        }
        p.push(fk * Rational::from_integer(fact.clone()));
    }
    let b = bernoulli_numbers(n_max / 2 + 1);
    for (i, pk) in p.iter().enumerate().step_by(2) {
        let two_k = i + 2;
        let via_bernoulli = &b.values()[two_k]
            / Rational::from_integer(BigInt::from(two_k * (two_k - 1)));
        assert_eq!(
            *pk, via_bernoulli,
            "p_{i} = f_{i} {i}! disagrees with B_{two_k}/({two_k}*{})",
            two_k - 1
        );
    }
    CoefficientSequence::new(SequenceKind::Stirling, p).expect("odd Stirling coefficients vanish")
}

/// Leading asymptotic term `(-1)^{n+2} 2 (2n+2)! / (2 pi)^{2n+2}` of `B_{2n+2}`.
///
/// Evaluated in log space; saturates to a signed infinity once the magnitude
/// leaves the `f64` range (around `n = 85`).
pub fn bernoulli_asymptotic(n: usize) -> f64 {
    let m = (2 * n + 2) as f64;
    let log_mag = std::f64::consts::LN_2 + libm::lgamma(m + 1.0)
        - m * (2.0 * std::f64::consts::PI).ln();
    let mag = log_mag.exp();
    if n % 2 == 0 {
        mag
    } else {
        -mag
    }
}

/// Heuristic Gevrey order from coefficient growth.
///
/// Fits `ln|c_n| ~ c + g n + s ln(n!)` by least squares over the nonzero
/// entries of `window` and returns `1/s`: a sequence growing like
/// `(n!)^{1/k} A^n` yields `k`. The linear term absorbs the geometric factor
/// `A^n`. Sequences without factorial growth (`s <= 1e-6`) report
/// `f64::INFINITY`.
///
/// This is a diagnostic, not a theorem: the fit only sees finitely many terms.
pub fn gevrey_order_estimate(seq: &CoefficientSequence, window: Range<usize>) -> Result<f64> {
    if window.end > seq.len() {
        return domain(format!(
            "window end {} exceeds sequence length {}",
            window.end,
            seq.len()
        ));
    }
    if window.len() < 8 {
        return domain(format!("window length {} < 8", window.len()));
    }
    let points: Vec<(f64, f64, f64)> = window
        .clone()
        .filter(|&n| !seq.values()[n].is_zero())
        .map(|n| {
            let nf = n as f64;
            (libm::lgamma(nf + 1.0), nf, ln_abs(&seq.values()[n]))
        })
        .collect();
    if points.is_empty() {
        return Err(Error::DegenerateSequence);
    }
    if points.len() < 3 {
        return domain("need at least 3 nonzero entries in the window");
    }
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for &(lf, n, y) in &points {
        let row = Vector3::new(lf, n, 1.0);
        ata += row * row.transpose();
        aty += row * y;
    }
    let sol = ata
        .lu()
        .solve(&aty)
        .ok_or_else(|| Error::Domain("singular least-squares system".into()))?;
    let slope = sol[0];
    if slope <= 1e-6 {
        Ok(f64::INFINITY)
    } else {
        Ok(1.0 / slope)
    }
}
