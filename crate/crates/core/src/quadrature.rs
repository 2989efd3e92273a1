//! Quadrature rules and Chebyshev interpolation used throughout the crate.

use std::f64::consts::PI;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are found by Newton iteration on `P_n` from the Chebyshev-like
    /// initial guess; converges to machine precision in a handful of steps.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule with `panels` equal panels on `[lo, hi]`.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        lo: f64,
        hi: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let width = (hi - lo) / panels as f64;
        (0..panels)
            .map(|p| {
                let a = lo + p as f64 * width;
                self.integrate(a, a + width, &mut f)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Angles `θ_i = π (2i + 1) / (2n)` of the `n`-point Gauss-Chebyshev rule of
/// the first kind. The rule reads `∫_{-1}^{1} f(x) / sqrt(1 - x²) dx ≈ (π/n) Σ f(cos θ_i)`.
pub fn chebyshev_angles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| PI * (2 * i + 1) as f64 / (2 * n) as f64)
        .collect()
}

/// Chebyshev interpolant of degree `degree` for a function on `[lo, hi]`,
/// sampled at first-kind Chebyshev points.
#[derive(Debug, Clone)]
pub struct ChebyshevSeries {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl ChebyshevSeries {
    pub fn interpolate<F: FnMut(f64) -> f64>(lo: f64, hi: f64, degree: usize, mut f: F) -> Self {
        let n = degree + 1;
        let angles = chebyshev_angles(n);
        let samples: Vec<f64> = angles
            .iter()
            .map(|&th| f(0.5 * (hi + lo) + 0.5 * (hi - lo) * th.cos()))
            .collect();
        let mut coeffs = (0..n)
            .map(|k| {
                // reduce k(2i+1) mod 4n exactly before taking the cosine
                let s: f64 = samples
                    .iter()
                    .enumerate()
                    .map(|(i, &y)| {
                        let j = (k * (2 * i + 1)) % (4 * n);
                        y * (PI * j as f64 / (2 * n) as f64).cos()
                    })
                    .sum();
                let c = 2.0 * s / n as f64;
                if k == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect::<Vec<f64>>();
        // drop the rounding-noise tail; derivatives amplify it by n^(2m)
        let floor = 8.0 * f64::EPSILON * coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let keep = coeffs
            .iter()
            .rposition(|c| c.abs() > floor)
            .map_or(1, |i| i + 1);
        coeffs.truncate(keep);
        Self { lo, hi, coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let u = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + self.coeffs[0]
    }

    /// Taylor coefficients `f^(m)(lo) / m!` for `m = 0..count`.
    ///
    /// Uses the closed form `T_n^(m)(-1) = (-1)^(n+m) Π_{k<m} (n² - k²)/(2k + 1)`.
    pub fn taylor_at_lower(&self, count: usize) -> Vec<f64> {
        let scale = 2.0 / (self.hi - self.lo);
        let mut out = Vec::with_capacity(count);
        let mut factorial = 1.0;
        let mut scale_pow = 1.0;
        for m in 0..count {
            if m > 0 {
                factorial *= m as f64;
                scale_pow *= scale;
            }
            let mut deriv = 0.0;
            for (n, &c) in self.coeffs.iter().enumerate() {
                if n < m {
                    continue;
                }
                let n2 = (n * n) as f64;
                let mut t = 1.0;
                for k in 0..m {
                    t *= (n2 - (k * k) as f64) / (2 * k + 1) as f64;
                }
                if (n + m) % 2 == 1 {
                    t = -t;
                }
                deriv += c * t;
            }
            out.push(deriv * scale_pow / factorial);
        }
        out
    }
}
