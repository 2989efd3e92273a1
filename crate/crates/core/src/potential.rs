//! Convex polynomial external fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::chebyshev_angles;

/// Number of validation grid points used when none is given.
pub const DEFAULT_GRID_POINTS: usize = 2048;

/// External field `V(x) = Σ c_k x^k`, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    coeffs: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
    asserts_ga_infinity: bool,
}

/// JSON form: `{"coeffs": [c0, c1, ...], "ga_infinity": bool}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub ga_infinity: bool,
}

/// Outcome of [`Potential::validate_ga`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    /// Even degree with positive leading coefficient.
    pub growth_ok: bool,
    /// `V'' >= 0` on the grid, vanishing at no more than `degree - 2` points,
    /// and `V'` strictly increasing across the sorted grid.
    pub convexity_ok: bool,
    pub first_offending_point: Option<f64>,
    pub grid_radius: f64,
    pub grid_points: usize,
    pub message: String,
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

impl Potential {
    /// Trailing zero coefficients are dropped; the remaining degree must be at least 2.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "potential has no coefficients".into(),
            ));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite potential coefficient {c}"
            )));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "potential degree must be at least 2, got {}",
                coeffs.len() - 1
            )));
        }
        let first = derivative(&coeffs);
        let second = derivative(&first);
        Ok(Self {
            coeffs,
            first,
            second,
            asserts_ga_infinity: false,
        })
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        Ok(Self::new(spec.coeffs.clone())?.with_ga_infinity(spec.ga_infinity))
    }

    pub fn to_spec(&self) -> PotentialSpec {
        PotentialSpec {
            coeffs: self.coeffs.clone(),
            ga_infinity: self.asserts_ga_infinity,
        }
    }

    /// `V(x) = x²/2`, the Gaussian unitary ensemble.
    pub fn gue() -> Self {
        Self::new(vec![0.0, 0.0, 0.5]).expect("valid")
    }

    /// Records the caller's assertion that `V` has the analytic extension and
    /// growth required for the unbounded tail regime. Not checked.
    pub fn with_ga_infinity(mut self, asserted: bool) -> Self {
        self.asserts_ga_infinity = asserted;
        self
    }

    pub fn asserts_ga_infinity(&self) -> bool {
        self.asserts_ga_infinity
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// `V`, `V'` or `V''` at `x` depending on `order`.
    pub fn eval(&self, x: f64, order: u32) -> Result<f64> {
        match order {
            0 => Ok(self.value(x)),
            1 => Ok(self.first(x)),
            2 => Ok(self.second(x)),
            _ => Err(Error::InvalidArgument(format!(
                "derivative order must be 0, 1 or 2, got {order}"
            ))),
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    #[inline]
    pub fn first(&self, x: f64) -> f64 {
        horner(&self.first, x)
    }

    #[inline]
    pub fn second(&self, x: f64) -> f64 {
        horner(&self.second, x)
    }

    /// Natural length scale `leading^(-1/degree)`.
    pub fn scale(&self) -> f64 {
        self.leading().abs().powf(-1.0 / self.degree() as f64)
    }

    /// Location of the minimum of `V`, the root of the increasing function `V'`.
    /// Only meaningful for potentials that pass [`Self::validate_ga`].
    pub fn argmin(&self) -> f64 {
        let mut step = self.scale().max(1.0);
        let mut lo = -step;
        let mut hi = step;
        while self.first(lo) > 0.0 && lo.is_finite() {
            lo -= step;
            step *= 2.0;
        }
        step = self.scale().max(1.0);
        while self.first(hi) < 0.0 && hi.is_finite() {
            hi += step;
            step *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.first(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Rough estimate `(center, half_width)` of the equilibrium support.
    pub fn support_estimate(&self) -> (f64, f64) {
        (self.argmin(), 2.0 * self.scale())
    }

    /// Default validation radius `10 (1 + |b-estimate|)`.
    pub fn default_grid_radius(&self) -> f64 {
        let growth_ok = self.degree().is_multiple_of(2) && self.leading() > 0.0;
        if !growth_ok {
            return 10.0 * (1.0 + 2.0 * self.scale());
        }
        let (c, h) = self.support_estimate();
        10.0 * (1.0 + (c + h).abs())
    }

    pub fn validate_default(&self) -> ValidationReport {
        self.validate_ga(self.default_grid_radius(), DEFAULT_GRID_POINTS)
    }

    /// Checks convexity and growth on `grid_points` Chebyshev-spaced points of
    /// `[-grid_radius, grid_radius]`.
    pub fn validate_ga(&self, grid_radius: f64, grid_points: usize) -> ValidationReport {
        let grid_points = grid_points.max(100);
        let growth_ok = self.degree().is_multiple_of(2) && self.leading() > 0.0;

        let mut grid: Vec<f64> = chebyshev_angles(grid_points)
            .into_iter()
            .map(|th| grid_radius * th.cos())
            .collect();
        grid.sort_by(f64::total_cmp);

        let allowed_zeros = self.degree().saturating_sub(2);
        let mut zeros = 0usize;
        let mut offending = None;
        let mut prev_slope = f64::NEG_INFINITY;
        for &x in &grid {
            let curvature = self.second(x);
            let slope = self.first(x);
            let bad = if curvature < 0.0 || slope <= prev_slope {
                true
            } else if curvature == 0.0 {
                zeros += 1;
                zeros > allowed_zeros
            } else {
                false
            };
            if bad {
                offending = Some(x);
                break;
            }
            prev_slope = slope;
        }
        let convexity_ok = offending.is_none();
        let passed = growth_ok && convexity_ok;
        let message = match (growth_ok, offending) {
            (true, None) => "ok".to_string(),
            (false, None) => format!(
                "V does not grow at both ends (degree {}, leading coefficient {})",
                self.degree(),
                self.leading()
            ),
            (_, Some(x)) => format!("V' is not strictly increasing near x = {x}"),
        };
        ValidationReport {
            passed,
            growth_ok,
            convexity_ok,
            first_offending_point: offending,
            grid_radius,
            grid_points,
            message,
        }
    }
}
