//! Exact finite-`N` computations from orthonormal polynomials.
//!
//! With `φ_j(x) = p_j(x) exp(-N V(x) / 2)` orthonormal on the line, the
//! Christoffel-Darboux kernel is `K(x, y) = Σ_{j<N} φ_j(x) φ_j(y)`. The kernel
//! restricted to `(t, ∞)` has the same non-zero spectrum as the Gram matrix
//! `G_jk = ∫_t^∞ φ_j φ_k`, so the probability that some particle exceeds `t`
//! is `1 - det(I - G)`.
//!
//! Values of `φ_j` are carried as a vector plus a common log-scale so that the
//! far tail, where `exp(-N V)` underflows, is still resolved.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::GaussLegendre;
use crate::tails::TailValue;

const PANEL_NODES: usize = 32;
/// `N (V(x) - min V)` at the edges of the support window.
const WINDOW_EXPONENT: f64 = 750.0;
const RESCALE_AT: f64 = 1e150;
const TAIL_WEIGHT_CUTOFF_LOG: f64 = -575.646_273_248_511_4; // ln(1e-250)
const TAIL_RELATIVE_CUTOFF: f64 = 1e-3;
const MAX_TAIL_PANELS: usize = 1_000_000;
/// Below this log-magnitude the gap is evaluated without leaving log space.
const LOG_SPACE_BELOW: f64 = -600.0;
const EIGEN_SLACK: f64 = 1e-10;

/// Recurrence coefficients of the orthonormal polynomials for `exp(-N V)`.
///
/// `x p_j = sqrt(β_{j+1}) p_{j+1} + α_j p_j + sqrt(β_j) p_{j-1}`. By convention
/// `beta[0]` is the mass of the shifted weight `exp(-N (V - min V))`.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    potential: Potential,
    n: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    support_window: (f64, f64),
    weight_shift: f64,
    panel_width: f64,
    rule: GaussLegendre,
}

/// Tail Gram matrix `G = exp(log_scale) · scaled`.
#[derive(Debug, Clone)]
pub struct TailGram {
    pub scaled: DMatrix<f64>,
    pub log_scale: f64,
}

impl TailGram {
    /// Linear-space matrix; entries may underflow to zero.
    pub fn matrix(&self) -> DMatrix<f64> {
        &self.scaled * self.log_scale.exp()
    }

    pub fn log_trace(&self) -> f64 {
        self.log_scale + self.scaled.trace().ln()
    }
}

/// Gap probability of `(t, ∞)` and its complement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapResult {
    pub t: f64,
    /// `ln P(λ_max > t)`.
    pub log_survival: f64,
    pub survival: TailValue,
    /// `det(I - G) = P(λ_max <= t)`.
    pub det_value: f64,
    /// Spectrum of `G`, clamped to `[0, 1]`; tiny values may underflow to 0.
    pub eigenvalues: Vec<f64>,
    /// `tr G = ∫_t^∞ K(x, x) dx`.
    pub trace: f64,
    pub log_trace: f64,
}

fn locate_level(v: &Potential, from: f64, vmin: f64, level: f64, direction: f64) -> f64 {
    let mut step = v.scale().max(1e-3);
    let mut inner = from;
    let mut outer = from + direction * step;
    while v.value(outer) - vmin < level {
        inner = outer;
        step *= 2.0;
        outer = from + direction * step;
    }
    for _ in 0..200 {
        let mid = 0.5 * (inner + outer);
        if mid == inner || mid == outer {
            break;
        }
        if v.value(mid) - vmin < level {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    outer
}

impl OrthoBasis {
    pub fn build(potential: &Potential, n: usize) -> Result<Self> {
        Self::build_with(potential, n, (40 * n).max(4000))
    }

    /// Discretized Stieltjes procedure on a composite Gauss-Legendre grid of
    /// `quad_points` nodes over the support window.
    pub fn build_with(potential: &Potential, n: usize, quad_points: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("basis size N must be >= 1".into()));
        }
        if quad_points < 40 * n {
            return Err(Error::InvalidArgument(format!(
                "need at least 40 N = {} quadrature points, got {quad_points}",
                40 * n
            )));
        }
        let report = potential.validate_default();
        if !report.passed {
            return Err(Error::InvalidArgument(format!(
                "potential is not convex with growth at both ends: {}",
                report.message
            )));
        }
        let nf = n as f64;
        let xmin = potential.argmin();
        let vmin = potential.value(xmin);
        let level = WINDOW_EXPONENT / nf;
        let lo = locate_level(potential, xmin, vmin, level, -1.0);
        let hi = locate_level(potential, xmin, vmin, level, 1.0);

        let rule = GaussLegendre::new(PANEL_NODES);
        let panels = quad_points.div_ceil(PANEL_NODES);
        let width = (hi - lo) / panels as f64;
        let mut xs = Vec::with_capacity(panels * PANEL_NODES);
        let mut ws = Vec::with_capacity(panels * PANEL_NODES);
        for p in 0..panels {
            let a = lo + p as f64 * width;
            for (x, w) in rule.mapped(a, a + width) {
                xs.push(x);
                ws.push(w);
            }
        }

        // q_j(x_i) = φ_j(x_i) sqrt(w_i)
        let mut prev = vec![0.0; xs.len()];
        let mut cur: Vec<f64> = xs
            .iter()
            .zip(&ws)
            .map(|(&x, &w)| (-0.5 * nf * (potential.value(x) - vmin)).exp() * w.sqrt())
            .collect();
        let mass: f64 = cur.iter().map(|q| q * q).sum();
        let inv = mass.sqrt().recip();
        cur.iter_mut().for_each(|q| *q *= inv);

        let mut alpha = Vec::with_capacity(n);
        let mut beta = Vec::with_capacity(n + 1);
        beta.push(mass);
        let mut next = vec![0.0; xs.len()];
        for j in 0..n {
            let a_j: f64 = xs.iter().zip(&cur).map(|(&x, &q)| x * q * q).sum();
            let sqrt_b = if j == 0 { 0.0 } else { beta[j].sqrt() };
            for i in 0..xs.len() {
                next[i] = (xs[i] - a_j) * cur[i] - sqrt_b * prev[i];
            }
            let b_next: f64 = next.iter().map(|q| q * q).sum();
            if !(b_next > 0.0) || !b_next.is_finite() {
                return Err(Error::Numerical(format!(
                    "recurrence coefficient beta[{}] = {b_next} lost positivity",
                    j + 1
                )));
            }
            alpha.push(a_j);
            beta.push(b_next);
            let inv = b_next.sqrt().recip();
            next.iter_mut().for_each(|q| *q *= inv);
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }

        // equilibrium support is close to α ± 2 sqrt(β) at the top of the recurrence
        let support_width = 4.0 * beta[n].sqrt();
        let panel_width = 0.25 * support_width * (16.0 / nf).min(1.0);

        Ok(Self {
            potential: potential.clone(),
            n,
            alpha,
            beta,
            support_window: (lo, hi),
            weight_shift: vmin,
            panel_width,
            rule,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn support_window(&self) -> (f64, f64) {
        self.support_window
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// `ln ∫ exp(-N V)`.
    pub fn log_mass(&self) -> f64 {
        self.beta[0].ln() - self.n as f64 * self.weight_shift
    }

    /// Fills `out[j]` so that `φ_j(x) = out[j] · exp(returned log-scale)`.
    pub fn weighted_values(&self, x: f64, out: &mut [f64]) -> f64 {
        assert_eq!(out.len(), self.n);
        let mut log_scale = -0.5 * self.n as f64 * (self.potential.value(x) - self.weight_shift);
        out[0] = self.beta[0].sqrt().recip();
        let mut prev = 0.0;
        for j in 0..self.n - 1 {
            let sb = if j == 0 { 0.0 } else { self.beta[j].sqrt() };
            let mut next = ((x - self.alpha[j]) * out[j] - sb * prev) / self.beta[j + 1].sqrt();
            prev = out[j];
            if next.abs() > RESCALE_AT {
                for v in out[..=j].iter_mut() {
                    *v /= RESCALE_AT;
                }
                prev /= RESCALE_AT;
                next /= RESCALE_AT;
                log_scale += RESCALE_AT.ln();
            }
            out[j + 1] = next;
        }
        log_scale
    }

    /// `φ_j(x) = p_j(x) exp(-N V(x) / 2)`.
    pub fn phi(&self, j: usize, x: f64) -> Result<f64> {
        if j >= self.n {
            return Err(Error::InvalidArgument(format!(
                "index {j} out of range for a basis of size {}",
                self.n
            )));
        }
        let mut buf = vec![0.0; self.n];
        let ls = self.weighted_values(x, &mut buf);
        Ok(buf[j] * ls.exp())
    }

    /// `ln K(x, x)`.
    pub fn log_kernel_diag(&self, x: f64) -> f64 {
        let mut buf = vec![0.0; self.n];
        let ls = self.weighted_values(x, &mut buf);
        2.0 * ls + buf.iter().map(|v| v * v).sum::<f64>().ln()
    }

    /// `K(x, x) = Σ_{j<N} φ_j(x)²`.
    pub fn kernel_diag(&self, x: f64) -> f64 {
        self.log_kernel_diag(x).exp()
    }

    /// `K(x, y)`.
    pub fn kernel(&self, x: f64, y: f64) -> f64 {
        let mut bx = vec![0.0; self.n];
        let mut by = vec![0.0; self.n];
        let lx = self.weighted_values(x, &mut bx);
        let ly = self.weighted_values(y, &mut by);
        let dot: f64 = bx.iter().zip(&by).map(|(u, v)| u * v).sum();
        dot * (lx + ly).exp()
    }

    /// Walks Gauss-Legendre panels over `(t, ∞)`, handing each node's weight
    /// and scaled values to `visit`. Returns the log of the common scale
    /// factored out of the values.
    fn walk_tail<F: FnMut(f64, &[f64])>(&self, t: f64, mut visit: F) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::InvalidArgument("tail threshold is NaN".into()));
        }
        let nf = self.n as f64;
        let start = t.max(self.support_window.0);
        if !start.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tail threshold {t} is not finite"
            )));
        }
        let xmin = self.potential.argmin();
        let mut nodes: Vec<(f64, f64, f64, Vec<f64>)> = Vec::with_capacity(PANEL_NODES);
        let mut reference: Option<f64> = None;
        let mut total = 0.0;
        let mut lo = start;
        for _ in 0..MAX_TAIL_PANELS {
            let hi = lo + self.panel_width;
            nodes.clear();
            for (x, w) in self.rule.mapped(lo, hi) {
                let mut buf = vec![0.0; self.n];
                let ls = self.weighted_values(x, &mut buf);
                nodes.push((x, w, ls, buf));
            }
            let reference = *reference.get_or_insert_with(|| {
                let peak = nodes
                    .iter()
                    .map(|(_, _, ls, v)| ls + 0.5 * v.iter().map(|u| u * u).sum::<f64>().ln())
                    .fold(f64::NEG_INFINITY, f64::max);
                // beyond the support the integrand only decays, so the first
                // panel sets the scale; elsewhere values are O(1)
                if start > xmin && peak < -200.0 {
                    peak
                } else {
                    0.0
                }
            });
            let mut contribution = 0.0;
            for (_, w, ls, buf) in nodes.iter_mut() {
                let factor = (*ls - reference).exp();
                buf.iter_mut().for_each(|v| *v *= factor);
                contribution += *w * buf.iter().map(|v| v * v).sum::<f64>();
                visit(*w, buf);
            }
            total += contribution;
            let log_weight = -nf * (self.potential.value(lo) - self.weight_shift);
            if contribution <= TAIL_RELATIVE_CUTOFF * total && log_weight < TAIL_WEIGHT_CUTOFF_LOG {
                return Ok(2.0 * reference);
            }
            lo = hi;
        }
        Err(Error::Numerical(format!(
            "tail quadrature from t = {t} did not terminate"
        )))
    }

    /// `ln ∫_t^∞ K(x, x) dx`.
    pub fn log_tail_trace(&self, t: f64) -> Result<f64> {
        let mut sum = 0.0;
        let log_scale = self.walk_tail(t, |w, v| {
            sum += w * v.iter().map(|u| u * u).sum::<f64>();
        })?;
        Ok(log_scale + sum.ln())
    }

    /// `∫_t^∞ K(x, x) dx`.
    pub fn tail_trace(&self, t: f64) -> Result<f64> {
        self.log_tail_trace(t).map(f64::exp)
    }

    /// Gram matrix of the weighted polynomials on `(t, ∞)`.
    pub fn gram(&self, t: f64) -> Result<TailGram> {
        let n = self.n;
        let mut acc = DMatrix::<f64>::zeros(n, n);
        let log_scale = self.walk_tail(t, |w, v| {
            for k in 0..n {
                let wk = w * v[k];
                if wk == 0.0 {
                    continue;
                }
                for j in k..n {
                    acc[(j, k)] += wk * v[j];
                }
            }
        })?;
        for k in 0..n {
            for j in k + 1..n {
                acc[(k, j)] = acc[(j, k)];
            }
        }
        Ok(TailGram {
            scaled: acc,
            log_scale,
        })
    }
}

/// `P(λ_max > t)` as `1 - det(I - G(t))`, from the spectrum of `G`.
pub fn gap_probability(basis: &OrthoBasis, t: f64) -> Result<GapResult> {
    let gram = basis.gram(t)?;
    let ls = gram.log_scale;
    let scaled_trace = gram.scaled.trace();
    let scaled_eigs = SymmetricEigen::new(gram.scaled.clone()).eigenvalues;

    let top = scaled_eigs.iter().cloned().fold(0.0, f64::max);
    let mut eigenvalues = Vec::with_capacity(scaled_eigs.len());
    for &e in scaled_eigs.iter() {
        let lambda = e * ls.exp();
        if !(-EIGEN_SLACK..=1.0 + EIGEN_SLACK).contains(&lambda) {
            return Err(Error::Numerical(format!(
                "Gram eigenvalue {lambda} at t = {t} outside [0, 1]"
            )));
        }
        eigenvalues.push(lambda.clamp(0.0, 1.0));
    }
    eigenvalues.sort_by(|a, b| b.total_cmp(a));

    let log_trace = ls + scaled_trace.ln();
    let (log_survival, det_value) = if top > 0.0 && ls + top.ln() < LOG_SPACE_BELOW {
        // every eigenvalue is below e^-600: 1 - Π(1 - λ) = Σλ to full precision
        let positive: f64 = scaled_eigs.iter().map(|&e| e.max(0.0)).sum();
        (ls + positive.ln(), 1.0)
    } else {
        let log_det: f64 = eigenvalues.iter().map(|&l| (-l).ln_1p()).sum();
        let survival = -log_det.exp_m1();
        (survival.ln(), log_det.exp())
    };

    Ok(GapResult {
        t,
        log_survival,
        survival: TailValue::from_log(log_survival),
        det_value,
        eigenvalues,
        trace: log_trace.exp(),
        log_trace,
    })
}

/// `det A <= Π A_ii` for a symmetric positive definite `A`, with `1e-12` slack.
pub fn hadamard_check(a: &DMatrix<f64>) -> Result<bool> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::InvalidArgument(
            "matrix must be square and non-empty".into(),
        ));
    }
    let scale = a.amax().max(1.0);
    if (a - a.transpose()).amax() > 1e-12 * scale {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("matrix is not positive definite".into()))?;
    let det: f64 = chol.l().diagonal().iter().map(|l| l * l).product();
    let diag: f64 = a.diagonal().iter().product();
    Ok(det <= diag + 1e-12)
}
