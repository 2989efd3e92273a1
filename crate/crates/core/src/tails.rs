//! Closed-form upper-tail approximation and its moderate-deviation expansions.
//!
//! For `t > b` the tail of the largest particle is approximated by
//!
//! ```text
//!   F(t) = (b - a)/(8π) · exp(-N η(t)) / (N (t - b)(t - a) η'(t)).
//! ```
//!
//! In the edge variable `t(s) = b + s / (γ N^(2/3))` the exponent expands as
//! `N η(t(s)) = (4/3) s^(3/2) + Σ_j d_j s^(j + 3/2) / N^(2j/3)`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::quadrature::ChebyshevSeries;

/// Largest number of expansion coefficients computed.
pub const MAX_CRAMER_ORDER: usize = 6;
/// Values of `s` up to this are tagged as the fixed-`s` (Tracy-Widom) regime.
pub const TRACY_WIDOM_CUTOFF: f64 = 8.0;
/// Moderate regime of order `k` holds while `s <= MODERATE_MARGIN · N^(α_k)`.
pub const MODERATE_MARGIN: f64 = 0.5;

const CHEBYSHEV_DEGREE: usize = 32;
/// Linear probabilities below this are reported as [`TailValue::Underflow`].
const UNDERFLOW_LOG: f64 = -690.775_527_898_213_7; // ln(1e-300)

/// A probability that may be too small to hold in linear space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailValue {
    Value(f64),
    Underflow,
}

impl TailValue {
    pub fn from_log(log_p: f64) -> Self {
        if log_p < UNDERFLOW_LOG {
            TailValue::Underflow
        } else {
            TailValue::Value(log_p.exp())
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            TailValue::Value(v) => Some(v),
            TailValue::Underflow => None,
        }
    }
}

impl fmt::Display for TailValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailValue::Value(v) => write!(f, "{v:.16e}"),
            TailValue::Underflow => f.write_str("underflow"),
        }
    }
}

impl Serialize for TailValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TailValue::Value(v) => serializer.serialize_f64(*v),
            TailValue::Underflow => serializer.serialize_str("underflow"),
        }
    }
}

/// Universality threshold exponent `α_k = 2/3 - 2/(2k + 5)`.
pub fn alpha(k: usize) -> f64 {
    2.0 / 3.0 - 2.0 / (2 * k + 5) as f64
}

/// Coefficients `d_1..d_k` of the expansion of `N η(t(s))`.
///
/// The integrand of `η` is `sqrt(v) · h(v)` with `h(v) = sqrt(v + b - a) G(b + v)`;
/// `h` is interpolated by a Chebyshev series near the edge, its Taylor
/// coefficients are integrated term by term and rescaled by powers of `γ`.
pub fn cramer_coefficients(eq: &Equilibrium, k: usize) -> Result<Vec<f64>> {
    if k > MAX_CRAMER_ORDER {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_CRAMER_ORDER} expansion coefficients are supported, got {k}"
        )));
    }
    let (a, b, gamma) = (eq.a(), eq.b(), eq.gamma());
    let width = b - a;
    let r = (width / 4.0).min(1.0);
    let series = ChebyshevSeries::interpolate(0.0, r, CHEBYSHEV_DEGREE, |v| {
        (v + width).sqrt() * eq.g_factor(b + v)
    });
    let taylor = series.taylor_at_lower(k + 1);
    let c: Vec<f64> = taylor
        .iter()
        .enumerate()
        .map(|(m, &h)| h / (m as f64 + 1.5))
        .collect();

    let leading = c[0] * gamma.powf(-1.5);
    if !((leading - 4.0 / 3.0).abs() <= 1e-8) {
        return Err(Error::Numerical(format!(
            "edge coefficient c0 γ^(-3/2) = {leading} differs from 4/3 \
             (c0 = {}, γ = {gamma}, b - a = {width})",
            c[0]
        )));
    }
    Ok(c.iter()
        .enumerate()
        .skip(1)
        .map(|(j, &cj)| cj * gamma.powf(-(j as f64 + 1.5)))
        .collect())
}

/// Tail approximation for a fixed particle count `N`.
#[derive(Debug, Clone)]
pub struct TailModel {
    eq: Equilibrium,
    n: usize,
    cramer: Vec<f64>,
}

impl TailModel {
    /// Builds the model holding `k_max` expansion coefficients.
    pub fn new(eq: Equilibrium, n: usize, k_max: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "particle count N must be >= 1".into(),
            ));
        }
        let cramer = cramer_coefficients(&eq, k_max)?;
        Ok(Self { eq, n, cramer })
    }

    pub fn equilibrium(&self) -> &Equilibrium {
        &self.eq
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cramer(&self) -> &[f64] {
        &self.cramer
    }

    pub fn k_max(&self) -> usize {
        self.cramer.len()
    }

    /// `ln F(t)`, never forming `exp(-N η)`.
    pub fn log_f_approx(&self, t: f64) -> Result<f64> {
        let (a, b) = (self.eq.a(), self.eq.b());
        if !(t > b) || !t.is_finite() {
            return Err(Error::domain("f_approx", format!("t > b = {b}"), t));
        }
        let n = self.n as f64;
        let eta = self.eq.eta(t)?;
        let eta_prime = self.eq.eta_prime(t)?;
        Ok(((b - a) / (8.0 * PI)).ln() - n * eta - (n * (t - b) * (t - a) * eta_prime).ln())
    }

    pub fn f_approx(&self, t: f64) -> Result<TailValue> {
        self.log_f_approx(t).map(TailValue::from_log)
    }

    /// Edge variable to position: `t(s) = b + s / (γ N^(2/3))`.
    pub fn rescale(&self, s: f64) -> f64 {
        self.eq.b() + s / (self.eq.gamma() * (self.n as f64).powf(2.0 / 3.0))
    }

    /// Inverse of [`Self::rescale`].
    pub fn edge_variable(&self, t: f64) -> f64 {
        (t - self.eq.b()) * self.eq.gamma() * (self.n as f64).powf(2.0 / 3.0)
    }

    /// Truncated exponent `(4/3) s^(3/2) + Σ_{j<=k} d_j s^(j+3/2) / N^(2j/3)`.
    pub fn eta_tilde(&self, s: f64, k: usize) -> Result<f64> {
        if k > self.k_max() {
            return Err(Error::InvalidArgument(format!(
                "model holds {} expansion coefficients, asked for {k}",
                self.k_max()
            )));
        }
        if !(s >= 0.0) {
            return Err(Error::domain("eta_tilde", "s >= 0", s));
        }
        let scale = s / (self.n as f64).powf(2.0 / 3.0);
        let mut term = s.powf(1.5);
        let mut total = 4.0 / 3.0 * term;
        for &d in &self.cramer[..k] {
            term *= scale;
            total += d * term;
        }
        Ok(total)
    }

    /// `ln[exp(-η̃_k(s)) / (16π s^(3/2))]`.
    pub fn log_moderate_leading(&self, s: f64, k: usize) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::domain("moderate_leading", "s > 0", s));
        }
        Ok(-self.eta_tilde(s, k)? - (16.0 * PI * s.powf(1.5)).ln())
    }

    pub fn moderate_leading(&self, s: f64, k: usize) -> Result<f64> {
        self.log_moderate_leading(s, k).map(f64::exp)
    }

    /// Predictions of both deviation principles at a point.
    pub fn deviation_statistics(&self, point: DeviationPoint) -> Result<DeviationStatistics> {
        let (t, s) = match point {
            DeviationPoint::Position(t) => (t, self.edge_variable(t)),
            DeviationPoint::Edge(s) => (self.rescale(s), s),
        };
        let log_f = self.log_f_approx(t)?;
        let n = self.n as f64;
        let eta = self.eq.eta(t)?;
        let s32 = s.powf(1.5);
        Ok(DeviationStatistics {
            n: self.n,
            t,
            s,
            log_f,
            ldp_prediction: log_f / n,
            ldp_leading: -eta - n.ln() / n,
            mdp_prediction: log_f / s32,
            mdp_leading: -4.0 / 3.0 - (16.0 * PI * s32).ln() / s32,
        })
    }
}

/// `e^{-(4/3) s^(3/2)} / (16π s^(3/2))`, the large-`s` tail of the Tracy-Widom law.
pub fn tw_tail_asymptotic(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain("tw_tail_asymptotic", "s > 0", s));
    }
    let s32 = s.powf(1.5);
    Ok((-4.0 / 3.0 * s32).exp() / (16.0 * PI * s32))
}

/// Which approximation governs `P(λ̃_max > s)` at particle count `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "regime", content = "k")]
pub enum Regime {
    TracyWidom,
    /// Leading order needs `d_1..d_k`.
    Moderate(usize),
    Large,
}

impl Regime {
    /// Number of expansion coefficients the leading order depends on.
    pub fn minimal_k(self) -> Option<usize> {
        match self {
            Regime::TracyWidom => Some(0),
            Regime::Moderate(k) => Some(k),
            Regime::Large => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::TracyWidom => f.write_str("tracy-widom"),
            Regime::Moderate(k) => write!(f, "moderate-{k}"),
            Regime::Large => f.write_str("large"),
        }
    }
}

pub fn regime_classify(s: f64, n: usize) -> Regime {
    if s <= TRACY_WIDOM_CUTOFF {
        return Regime::TracyWidom;
    }
    let nf = n as f64;
    (0..=MAX_CRAMER_ORDER)
        .find(|&k| s <= MODERATE_MARGIN * nf.powf(alpha(k)))
        .map_or(Regime::Large, Regime::Moderate)
}

/// Where to evaluate [`TailModel::deviation_statistics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeviationPoint {
    /// Position `t` of the largest particle.
    Position(f64),
    /// Edge variable `s`, i.e. `t = t(s)`.
    Edge(f64),
}

/// Right-hand sides of the large and moderate deviation principles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationStatistics {
    pub n: usize,
    pub t: f64,
    pub s: f64,
    pub log_f: f64,
    /// `(1/N) ln F(t)`.
    pub ldp_prediction: f64,
    /// `-η(t) - ln(N)/N`.
    pub ldp_leading: f64,
    /// `s^(-3/2) ln F(t(s))`.
    pub mdp_prediction: f64,
    /// `-4/3 - ln(16π s^(3/2)) / s^(3/2)`.
    pub mdp_leading: f64,
}
