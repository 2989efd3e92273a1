//! Equilibrium measure of the log-gas with a convex polynomial external field.
//!
//! The support `[a, b]` is fixed by the two moment conditions
//!
//! ```text
//!   ∫_a^b V'(t) / sqrt((b-t)(t-a)) dt = 0,   ∫_a^b t V'(t) / sqrt((b-t)(t-a)) dt = 2π,
//! ```
//!
//! after which everything else is explicit in terms of
//! `G(x) = (1/π) ∫_a^b (V'(x) - V'(t)) / (x - t) dt / sqrt((b-t)(t-a))`:
//! the density `sqrt((b-x)(x-a)) G(x) / 2π`, the rate function
//! `η(x) = ∫_b^x sqrt((u-b)(u-a)) G(u) du` and the edge constant
//! `γ = (sqrt(b-a) G(b) / 2)^(2/3)`.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::{chebyshev_angles, GaussLegendre};

/// Solver settings for [`Equilibrium::solve`].
#[derive(Debug, Clone, Copy)]
pub struct MrsOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Gauss-Chebyshev nodes for the moment conditions and for `G`.
    pub nodes: usize,
    /// Gauss-Chebyshev samples of the density used by the logarithmic potential.
    pub density_nodes: usize,
}

impl Default for MrsOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
            nodes: 256,
            density_nodes: 512,
        }
    }
}

/// Scalar summary of an equilibrium measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumData {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub ell: f64,
    pub residuals: [f64; 2],
    pub quadrature_order: usize,
    pub iterations: usize,
}

/// Equilibrium measure together with the evaluators derived from it.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    potential: Potential,
    data: EquilibriumData,
    /// Gauss-Chebyshev nodes mapped to `[a, b]`.
    nodes: Vec<f64>,
    /// Cosine coefficients of `G(c + h cos θ) sin²θ`.
    density_coeffs: Vec<f64>,
    eta_rule: GaussLegendre,
}

const ETA_NODES_PER_PANEL: usize = 64;

fn mrs_residuals(v: &Potential, cosines: &[f64], a: f64, b: f64) -> [f64; 2] {
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let (mut s0, mut s1) = (0.0, 0.0);
    for &ct in cosines {
        let t = c + h * ct;
        let d = v.first(t);
        s0 += d;
        s1 += t * d;
    }
    let w = PI / cosines.len() as f64;
    [w * s0, w * s1 - 2.0 * PI]
}

fn norm(r: [f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

impl Equilibrium {
    pub fn solve(potential: &Potential) -> Result<Self> {
        Self::solve_with(potential, MrsOptions::default())
    }

    /// Damped Newton on the two moment conditions with a central-difference Jacobian.
    pub fn solve_with(potential: &Potential, opts: MrsOptions) -> Result<Self> {
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "solver tolerance must be positive, got {}",
                opts.tol
            )));
        }
        if opts.nodes < 2 || opts.density_nodes < 2 {
            return Err(Error::InvalidArgument("too few quadrature nodes".into()));
        }
        let report = potential.validate_default();
        if !report.passed {
            return Err(Error::InvalidArgument(format!(
                "potential is not convex with growth at both ends: {}",
                report.message
            )));
        }

        let cosines: Vec<f64> = chebyshev_angles(opts.nodes)
            .into_iter()
            .map(f64::cos)
            .collect();
        let (center, half) = potential.support_estimate();
        let (mut a, mut b) = (center - half, center + half);
        let mut r = mrs_residuals(potential, &cosines, a, b);
        let mut iterations = 0;

        while r[0].abs().max(r[1].abs()) >= opts.tol {
            if iterations == opts.max_iter {
                return Err(Error::Solver {
                    iterations,
                    a,
                    b,
                    r0: r[0],
                    r1: r[1],
                });
            }
            iterations += 1;

            let step = 1e-7 * (1.0 + (b - a).abs());
            let ra_p = mrs_residuals(potential, &cosines, a + step, b);
            let ra_m = mrs_residuals(potential, &cosines, a - step, b);
            let rb_p = mrs_residuals(potential, &cosines, a, b + step);
            let rb_m = mrs_residuals(potential, &cosines, a, b - step);
            let j00 = (ra_p[0] - ra_m[0]) / (2.0 * step);
            let j10 = (ra_p[1] - ra_m[1]) / (2.0 * step);
            let j01 = (rb_p[0] - rb_m[0]) / (2.0 * step);
            let j11 = (rb_p[1] - rb_m[1]) / (2.0 * step);
            let det = j00 * j11 - j01 * j10;
            if det == 0.0 || !det.is_finite() {
                return Err(Error::Solver {
                    iterations,
                    a,
                    b,
                    r0: r[0],
                    r1: r[1],
                });
            }
            let da = -(j11 * r[0] - j01 * r[1]) / det;
            let db = -(-j10 * r[0] + j00 * r[1]) / det;

            let current = norm(r);
            let mut lambda = 1.0;
            loop {
                let (na, nb) = (a + lambda * da, b + lambda * db);
                if nb > na {
                    let nr = mrs_residuals(potential, &cosines, na, nb);
                    if norm(nr) < current {
                        a = na;
                        b = nb;
                        r = nr;
                        break;
                    }
                }
                lambda *= 0.5;
                if lambda < 1e-12 {
                    // stuck at the rounding floor of the residual
                    return Err(Error::Solver {
                        iterations,
                        a,
                        b,
                        r0: r[0],
                        r1: r[1],
                    });
                }
            }
        }

        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let nodes = cosines.iter().map(|&ct| c + h * ct).collect();
        let mut eq = Equilibrium {
            potential: potential.clone(),
            data: EquilibriumData {
                a,
                b,
                gamma: f64::NAN,
                ell: f64::NAN,
                residuals: r,
                quadrature_order: opts.nodes,
                iterations,
            },
            nodes,
            density_coeffs: Vec::new(),
            eta_rule: GaussLegendre::new(ETA_NODES_PER_PANEL),
        };

        let g_edge = eq.g_factor(b);
        if !(g_edge > 0.0) {
            return Err(Error::Numerical(format!(
                "G at the upper edge is not positive: {g_edge}"
            )));
        }
        eq.data.gamma = (0.5 * (b - a).sqrt() * g_edge).powf(2.0 / 3.0);

        let m = opts.density_nodes;
        let angles = chebyshev_angles(m);
        let samples: Vec<f64> = angles
            .iter()
            .map(|&th| eq.g_factor(c + h * th.cos()) * th.sin().powi(2))
            .collect();
        eq.density_coeffs = (0..m)
            .map(|k| {
                let s: f64 = samples
                    .iter()
                    .zip(&angles)
                    .map(|(&g, &th)| g * (k as f64 * th).cos())
                    .sum();
                2.0 * s / m as f64
            })
            .collect();
        eq.data.ell = eq.effective_potential(c);
        Ok(eq)
    }

    pub fn data(&self) -> &EquilibriumData {
        &self.data
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn a(&self) -> f64 {
        self.data.a
    }

    pub fn b(&self) -> f64 {
        self.data.b
    }

    pub fn gamma(&self) -> f64 {
        self.data.gamma
    }

    /// Lagrange constant: value of the effective potential on the support.
    pub fn ell(&self) -> f64 {
        self.data.ell
    }

    /// Residuals of both moment conditions at an arbitrary `(a, b)`.
    pub fn residuals_at(&self, a: f64, b: f64) -> [f64; 2] {
        let cosines: Vec<f64> = chebyshev_angles(self.data.quadrature_order)
            .into_iter()
            .map(f64::cos)
            .collect();
        mrs_residuals(&self.potential, &cosines, a, b)
    }

    /// `G(x)`. Near-diagonal difference quotients are replaced by `V''` at the midpoint.
    pub fn g_factor(&self, x: f64) -> f64 {
        let v = &self.potential;
        let dx = v.first(x);
        let guard = 1e-6 * (1.0 + x.abs());
        let sum: f64 = self
            .nodes
            .iter()
            .map(|&t| {
                let gap = x - t;
                if gap.abs() < guard {
                    v.second(0.5 * (x + t))
                } else {
                    (dx - v.first(t)) / gap
                }
            })
            .sum();
        sum / self.nodes.len() as f64
    }

    /// Rate function `η(x)` for `x >= b`, integrated in `v = sqrt(u - b)`.
    pub fn eta(&self, x: f64) -> Result<f64> {
        let (a, b) = (self.data.a, self.data.b);
        if !(x >= b) || !x.is_finite() {
            return Err(Error::domain("eta", format!("x >= b = {b}"), x));
        }
        let v_max = (x - b).sqrt();
        if v_max == 0.0 {
            return Ok(0.0);
        }
        let width = b - a;
        let panels = v_max.ceil() as usize;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = p as f64;
            let hi = (lo + 1.0).min(v_max);
            total += self.eta_rule.integrate(lo, hi, |v| {
                let v2 = v * v;
                2.0 * v2 * (v2 + width).sqrt() * self.g_factor(b + v2)
            });
        }
        Ok(total)
    }

    /// `η'(x) = sqrt((x-b)(x-a)) G(x)` for `x > b`.
    pub fn eta_prime(&self, x: f64) -> Result<f64> {
        let (a, b) = (self.data.a, self.data.b);
        if !(x > b) || !x.is_finite() {
            return Err(Error::domain("eta_prime", format!("x > b = {b}"), x));
        }
        Ok(((x - b) * (x - a)).sqrt() * self.g_factor(x))
    }

    /// Equilibrium density; zero off the support.
    pub fn density(&self, x: f64) -> f64 {
        let (a, b) = (self.data.a, self.data.b);
        // endpoints are only known to rounding
        let edge = 4.0 * f64::EPSILON * (b - a);
        if x <= a + edge || x >= b - edge {
            return 0.0;
        }
        ((b - x) * (x - a)).sqrt() * self.g_factor(x) / (2.0 * PI)
    }

    /// `∫ log|x - y| dμ(y)`, integrated mode by mode against the cosine
    /// expansion of the density in the angle variable.
    pub fn log_potential(&self, x: f64) -> f64 {
        let (a, b) = (self.data.a, self.data.b);
        let h = 0.5 * (b - a);
        let xi = (x - 0.5 * (a + b)) / h;
        let g = &self.density_coeffs;
        let base = 0.5 * g[0];

        let modal = if xi.abs() <= 1.0 {
            // log|cos φ - cos θ| = -log 2 - 2 Σ cos mφ cos mθ / m
            let (mut prev, mut cur) = (1.0, xi);
            let mut sum = 0.0;
            for (m, &gm) in g.iter().enumerate().skip(1) {
                sum += gm * cur / m as f64;
                let next = 2.0 * xi * cur - prev;
                prev = cur;
                cur = next;
            }
            -PI * LN_2 * base - PI * sum
        } else {
            // log|ξ - cos θ| = log(R/2) - 2 Σ (s/R)^m cos mθ / m,  ξ = s (R + 1/R) / 2
            let ax = xi.abs();
            let r = ax + (ax - 1.0).sqrt() * (ax + 1.0).sqrt();
            let q = xi.signum() / r;
            let mut pow = 1.0;
            let mut sum = 0.0;
            for (m, &gm) in g.iter().enumerate().skip(1) {
                pow *= q;
                if pow == 0.0 {
                    break;
                }
                sum += gm * pow / m as f64;
            }
            PI * (0.5 * r).ln() * base - PI * sum
        };
        h * h / (2.0 * PI) * (h.ln() * PI * base + modal)
    }

    /// Effective potential `L(x) = V(x) - 2 ∫ log|x - y| dμ(y)`.
    pub fn effective_potential(&self, x: f64) -> f64 {
        self.potential.value(x) - 2.0 * self.log_potential(x)
    }

    /// Total mass of the discretized density, 1 up to rounding.
    pub fn mass(&self) -> f64 {
        let h = 0.5 * (self.data.b - self.data.a);
        h * h * self.density_coeffs[0] / 4.0
    }

    /// Gauss-Chebyshev discretization of the equilibrium measure with `n` atoms.
    pub fn discretize(&self, n: usize) -> Result<DiscreteMeasure> {
        let (a, b) = (self.data.a, self.data.b);
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut atoms: Vec<(f64, f64)> = chebyshev_angles(n)
            .into_iter()
            .map(|th| {
                let y = c + h * th.cos();
                (y, self.g_factor(y) * th.sin().powi(2))
            })
            .collect();
        atoms.sort_by(|p, q| p.0.total_cmp(&q.0));
        let total: f64 = atoms.iter().map(|p| p.1).sum();
        let (nodes, weights) = atoms.into_iter().map(|(y, w)| (y, w / total)).unzip();
        DiscreteMeasure::new(nodes, weights)
    }
}

/// Probability measure with finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::InvalidArgument(
                "measure needs matching, non-empty nodes and weights".into(),
            ));
        }
        if nodes.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidArgument(
                "measure nodes must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidArgument(
                "measure weights must be non-negative".into(),
            ));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "measure must have unit mass, got {mass}"
            )));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Discrete energy `Σ_{i≠j} w_i w_j log|x_i - x_j|^{-1} + Σ w_i V(x_i)`.
/// The diagonal is excluded from the interaction sum.
pub fn energy(potential: &Potential, mu: &DiscreteMeasure) -> f64 {
    let (x, w) = (&mu.nodes, &mu.weights);
    let mut interaction = 0.0;
    for i in 0..x.len() {
        let mut row = 0.0;
        for j in (i + 1)..x.len() {
            row -= w[j] * (x[j] - x[i]).ln();
        }
        interaction += 2.0 * w[i] * row;
    }
    let external: f64 = x
        .iter()
        .zip(w)
        .map(|(&xi, &wi)| wi * potential.value(xi))
        .sum();
    interaction + external
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic() -> Potential {
        Potential::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn gue_eta_closed(x: f64) -> f64 {
        let r = (x * x - 4.0).sqrt();
        0.5 * x * r - 2.0 * ((x + r) / 2.0).ln()
    }

    #[test]
    fn gue_support_and_gamma() {
        let eq = Equilibrium::solve(&Potential::gue()).unwrap();
        assert!((eq.a() + 2.0).abs() < 1e-10);
        assert!((eq.b() - 2.0).abs() < 1e-10);
        assert!((eq.gamma() - 1.0).abs() < 1e-10);
        assert!(eq.data().residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn quartic_support() {
        let eq = Equilibrium::solve(&quartic()).unwrap();
        let b = (4.0f64 / 3.0).powf(0.25);
        assert!((eq.b() - b).abs() < 1e-10);
        assert!((eq.a() + b).abs() < 1e-10);
    }

    #[test]
    fn translated_quadratic_support() {
        for &m in &[-3.5, 0.75, 12.0] {
            let v = Potential::new(vec![m * m / 2.0, -m, 0.5]).unwrap();
            let eq = Equilibrium::solve(&v).unwrap();
            assert!((eq.a() - (m - 2.0)).abs() < 1e-10, "m = {m}");
            assert!((eq.b() - (m + 2.0)).abs() < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn rejects_non_convex_and_bad_tolerance() {
        let cubic = Potential::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            Equilibrium::solve(&cubic),
            Err(Error::InvalidArgument(_))
        ));
        let opts = MrsOptions {
            tol: 0.0,
            ..MrsOptions::default()
        };
        assert!(Equilibrium::solve_with(&Potential::gue(), opts).is_err());
    }

    #[test]
    fn solver_error_reports_last_iterate() {
        let opts = MrsOptions {
            max_iter: 1,
            ..MrsOptions::default()
        };
        match Equilibrium::solve_with(&quartic(), opts) {
            Err(Error::Solver {
                iterations, a, b, ..
            }) => {
                assert_eq!(iterations, 1);
                assert!(a < b);
            }
            other => panic!("expected solver error, got {other:?}"),
        }
    }

    #[test]
    fn g_factor_examples() {
        let gue = Equilibrium::solve(&Potential::gue()).unwrap();
        for &x in &[-3.0, 0.0, 1.3, 2.0, 7.0] {
            assert!((gue.g_factor(x) - 1.0).abs() < 1e-14);
        }
        let q = Equilibrium::solve(&quartic()).unwrap();
        let b = (4.0f64 / 3.0).powf(0.25);
        assert!((q.g_factor(0.0) - 2.0 * b * b).abs() < 1e-10);
        // on a node, the diagonal guard kicks in
        let node = q.nodes[17];
        let exact = {
            // (1/π) ∫ 4 (x² + x t + t²) / sqrt(b² - t²) dt = 4 x² + 2 b²
            4.0 * node * node + 2.0 * b * b
        };
        assert!((q.g_factor(node) - exact).abs() < 1e-8);
    }

    #[test]
    fn eta_examples() {
        let eq = Equilibrium::solve(&Potential::gue()).unwrap();
        assert_eq!(eq.eta(2.0).unwrap(), 0.0);
        assert!((eq.eta(3.0).unwrap() - 1.429_254_6).abs() < 1e-7);
        assert!((eq.eta(3.0).unwrap() - gue_eta_closed(3.0)).abs() < 1e-12);
        assert!((eq.eta(2.5).unwrap() - (1.875 - 2.0 * LN_2)).abs() < 1e-12);
        assert!((eq.eta(12.0).unwrap() - gue_eta_closed(12.0)).abs() < 1e-10);
        assert!(matches!(eq.eta(1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn eta_prime_examples() {
        let eq = Equilibrium::solve(&Potential::gue()).unwrap();
        assert!((eq.eta_prime(2.5).unwrap() - 1.5).abs() < 1e-13);
        assert!((eq.eta_prime(3.0).unwrap() - 5f64.sqrt()).abs() < 1e-13);
        assert!(eq.eta_prime(2.0).is_err());
        let small = eq.eta_prime(2.0 + 1e-8).unwrap();
        assert!((small / 1e-4 - 2.0).abs() < 1e-6);
    }

    #[test]
    fn density_examples() {
        let eq = Equilibrium::solve(&Potential::gue()).unwrap();
        assert!((eq.density(0.0) - 1.0 / PI).abs() < 1e-14);
        assert_eq!(eq.density(2.0), 0.0);
        assert_eq!(eq.density(-2.0), 0.0);
    }

    #[test]
    fn density_normalization() {
        let rule = GaussLegendre::new(64);
        for v in [
            Potential::gue(),
            quartic(),
            Potential::new(vec![0.0, 0.4, 0.3, 0.1, 0.2]).unwrap(),
        ] {
            let eq = Equilibrium::solve(&v).unwrap();
            let (a, b) = (eq.a(), eq.b());
            // y = c + h cos θ flattens the square-root edges
            let h = 0.5 * (b - a);
            let c = 0.5 * (a + b);
            let m = rule.integrate(0.0, PI, |th| eq.density(c + h * th.cos()) * h * th.sin());
            assert!((m - 1.0).abs() < 1e-8, "mass {m}");
            assert!((eq.mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gue_lagrange_constant_is_one() {
        // semicircle log-potential: ∫ log|x-y| dμ(y) = x²/4 - 1/2 on [-2, 2]
        let eq = Equilibrium::solve(&Potential::gue()).unwrap();
        assert!((eq.ell() - 1.0).abs() < 1e-12);
        for &x in &[-1.9, -0.3, 0.0, 1.0, 1.99] {
            assert!((eq.log_potential(x) - (x * x / 4.0 - 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn gue_log_potential_brute_force() {
        // independent check: graded composite Gauss-Legendre on ∫ log|y| ρ(y) dy
        let rule = GaussLegendre::new(32);
        // edge piece with y = 2 - u², then a graded split towards the log at 0
        let rho = |y: f64| (4.0 - y * y).max(0.0).sqrt() / PI;
        let mut total = rule.integrate(0.0, 1.0, |u| {
            let y = 2.0 - u * u;
            y.ln() * rho(y) * 2.0 * u
        });
        let mut hi: f64 = 1.0;
        while hi > 1e-14 {
            let lo = hi / 4.0;
            total += rule.integrate(lo, hi, |y| y.ln() * rho(y));
            hi = lo;
        }
        let eq = Equilibrium::solve(&Potential::gue()).unwrap();
        assert!((total - eq.log_potential(0.0)).abs() < 1e-10, "{total}");
    }

    #[test]
    fn effective_potential_consistency() {
        for v in [Potential::gue(), quartic()] {
            let eq = Equilibrium::solve(&v).unwrap();
            let (a, b) = (eq.a(), eq.b());
            for i in 1..50 {
                let x = a + (b - a) * i as f64 / 50.0;
                assert!((eq.effective_potential(x) - eq.ell()).abs() < 1e-10);
            }
            for i in 1..=20 {
                let x = b + 5.0 * i as f64 / 20.0;
                let lhs = eq.effective_potential(x) - eq.ell();
                assert!((lhs - eq.eta(x).unwrap()).abs() < 1e-5, "x = {x}");
            }
        }
        let gue = Equilibrium::solve(&Potential::gue()).unwrap();
        assert!((gue.effective_potential(3.0) - gue.ell() - 1.429_254_6).abs() < 1e-6);
    }

    #[test]
    fn effective_potential_left_of_support() {
        let eq = Equilibrium::solve(&quartic()).unwrap();
        // L >= l off the support; symmetric potential mirrors η
        let x = eq.a() - 0.7;
        let mirrored = eq.eta(-x).unwrap();
        assert!((eq.effective_potential(x) - eq.ell() - mirrored).abs() < 1e-9);
    }

    #[test]
    fn edge_expansion_converges_linearly() {
        let eq = Equilibrium::solve(&quartic()).unwrap();
        let g = eq.gamma();
        let err: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&h| (eq.eta(eq.b() + h).unwrap() / (4.0 / 3.0 * (g * h).powf(1.5)) - 1.0).abs())
            .collect();
        for w in err.windows(2) {
            let rate = w[0] / w[1];
            assert!(rate > 8.0 && rate < 12.0, "{err:?}");
        }
    }

    #[test]
    fn g_positive() {
        let v = Potential::new(vec![1.0, -0.5, 0.2, 0.3, 0.5, 0.0, 0.05]).unwrap();
        let eq = Equilibrium::solve(&v).unwrap();
        for i in 0..=100 {
            let x = eq.a() - 3.0 + (eq.b() - eq.a() + 6.0) * i as f64 / 100.0;
            assert!(eq.g_factor(x) > 0.0);
        }
    }

    #[test]
    fn eta_versus_potential_bound() {
        for v in [Potential::gue(), quartic()] {
            let eq = Equilibrium::solve(&v).unwrap();
            for i in 0..=18 {
                let x = eq.b() + 1.0 + 0.5 * i as f64;
                let lhs = (eq.eta(x).unwrap() - v.value(x)).abs();
                assert!(lhs <= eq.ell().abs() + 2.0 * (x - eq.a()).ln());
            }
        }
    }

    #[test]
    fn energy_two_points() {
        let zero = Potential::new(vec![0.0, 0.0, 1e-300]).unwrap();
        let mu = DiscreteMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!((energy(&zero, &mu) + 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(DiscreteMeasure::new(vec![1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn equilibrium_minimizes_energy() {
        let v = Potential::gue();
        let eq = Equilibrium::solve(&v).unwrap();
        let mu = eq.discretize(400).unwrap();
        let e0 = energy(&v, &mu);

        let n = mu.nodes().len() as f64;
        let mixed: Vec<f64> = mu.weights().iter().map(|w| 0.8 * w + 0.2 / n).collect();
        let perturbed = DiscreteMeasure::new(mu.nodes().to_vec(), mixed).unwrap();
        assert!(e0 < energy(&v, &perturbed));

        let dilated: Vec<f64> = mu.nodes().iter().map(|x| 1.1 * x).collect();
        let dilated = DiscreteMeasure::new(dilated, mu.weights().to_vec()).unwrap();
        assert!(e0 < energy(&v, &dilated));
    }

    #[test]
    fn energy_refinement_is_cauchy() {
        let v = Potential::gue();
        let eq = Equilibrium::solve(&v).unwrap();
        let energies: Vec<f64> = [50, 100, 200, 400, 800]
            .iter()
            .map(|&n| energy(&v, &eq.discretize(n).unwrap()))
            .collect();
        let diffs: Vec<f64> = energies.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{diffs:?}");
        // continuous GUE energy is 3/4
        assert!((energies[4] - 0.75).abs() < 0.02, "{energies:?}");
    }
}
