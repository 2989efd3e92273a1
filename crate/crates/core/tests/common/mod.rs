//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use maxtail::quadrature::GaussLegendre;

/// GUE closed forms for `V(x) = x²/2` on `[-2, 2]`.
pub fn gue_eta(x: f64) -> f64 {
    let r = (x * x - 4.0).sqrt();
    0.5 * x * r - 2.0 * ((x + r) / 2.0).ln()
}

pub fn gue_eta_prime(x: f64) -> f64 {
    (x * x - 4.0).sqrt()
}

/// `ln F(t)` for the GUE from the closed forms above.
pub fn gue_log_f(n: usize, t: f64) -> f64 {
    let nf = n as f64;
    (4.0 / (8.0 * PI)).ln() - nf * gue_eta(t) - (nf * (t - 2.0) * (t + 2.0) * gue_eta_prime(t)).ln()
}

/// Hermite functions orthonormal for the weight `exp(-N x²/2)`, built from
/// the probabilists' recurrence in `y = sqrt(N) x`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let nf = n as f64;
    let y = nf.sqrt() * x;
    let envelope = (nf / (2.0 * PI)).powf(0.25) * (-y * y / 4.0).exp();
    let mut out = Vec::with_capacity(n);
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..n {
        out.push(cur * envelope);
        let next = (y * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    out
}

/// GUE kernel `K_N(x, y)`.
pub fn gue_kernel(n: usize, x: f64, y: f64) -> f64 {
    let (px, py) = (hermite_functions(n, x), hermite_functions(n, y));
    px.iter().zip(&py).map(|(a, b)| a * b).sum()
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let k = m.len();
    let mut d = 1.0;
    for c in 0..k {
        let p = (c..k)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        let (top, rest) = m.split_at_mut(c + 1);
        let pivot = &top[c];
        for row in rest {
            let f = row[c] / pivot[c];
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= f * p;
            }
        }
    }
    d
}

/// `P(λ_max > t) = Σ_k (-1)^(k+1)/k! ∫_{(t,∞)^k} det[K(x_i, x_j)] dx`, with
/// each k-fold integral done on a tensor Gauss-Legendre grid over
/// `[t, upper]`. Only non-decreasing multi-indices are visited; symmetry of
/// the determinant supplies the rest through multinomial weights.
pub fn alternating_series<K: Fn(f64, f64) -> f64>(
    n: usize,
    kernel: K,
    t: f64,
    upper: f64,
    panels: usize,
) -> f64 {
    let rule = GaussLegendre::new(24);
    let width = (upper - t) / panels as f64;
    let mut nodes = Vec::new();
    for p in 0..panels {
        let lo = t + p as f64 * width;
        nodes.extend(rule.mapped(lo, lo + width));
    }
    let m = nodes.len();
    let kmat: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&(x, _)| nodes.iter().map(|&(y, _)| kernel(x, y)).collect())
        .collect();

    let mut survival = 0.0;
    let mut factorial = 1.0;
    for k in 1..=n {
        factorial *= k as f64;
        let mut idx = vec![0usize; k];
        let mut term = 0.0;
        loop {
            // weight = k! / Π(multiplicity!) · Π w
            let mut weight = factorial;
            let mut run = 1.0;
            for i in 1..k {
                if idx[i] == idx[i - 1] {
                    run += 1.0;
                    weight /= run;
                } else {
                    run = 1.0;
                }
            }
            let w: f64 = idx.iter().map(|&i| nodes[i].1).product();
            let block: Vec<Vec<f64>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| kmat[i][j]).collect())
                .collect();
            term += weight * w * det(block);

            // next non-decreasing multi-index
            match idx.iter().rposition(|&i| i + 1 < m) {
                Some(pos) => {
                    let v = idx[pos] + 1;
                    idx[pos..].iter_mut().for_each(|x| *x = v);
                }
                None => break,
            }
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        survival += sign * term / factorial;
    }
    survival
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
