//! Oracles shared by the integration and acceptance targets. Each one is
//! written from the formulas, without calling into the library's numerics.

#![allow(dead_code)]

use invariant_burgers::{DiscreteField, GridSlice};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// Random ordered grid on [0, 2π) carrying a smooth random periodic field.
pub fn random_smooth_field(rng: &mut ChaCha8Rng) -> DiscreteField {
    let n = rng.gen_range(8..=128);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut x = Vec::with_capacity(n);
    let mut acc = rng.gen_range(0.0..0.5);
    for w in &weights {
        x.push(acc);
        acc += TAU * w / total;
    }
    let t = rng.gen_range(0.0..1.0);
    let grid = GridSlice::new(t, x, 0.0, TAU).unwrap();
    let modes: Vec<(f64, f64, f64)> = (1..=3)
        .map(|k| (k as f64, rng.gen_range(-1.5..1.5), rng.gen_range(0.0..TAU)))
        .collect();
    DiscreteField::sample(grid, |x| modes.iter().map(|(k, a, p)| a * (k * x + p).sin()).sum()).unwrap()
}

/// `ρ_i = √(1 + α q_i²)` with the periodic centred quotient.
pub fn monitor(x: &[f64], u: &[f64], alpha: f64, period: f64) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (xm, um) = if i == 0 { (x[n - 1] - period, u[n - 1]) } else { (x[i - 1], u[i - 1]) };
            let (xp, up) = if i == n - 1 { (x[0] + period, u[0]) } else { (x[i + 1], u[i + 1]) };
            let q = (up - um) / (xp - xm);
            (1.0 + alpha * q * q).sqrt()
        })
        .collect()
}

/// Dense Gaussian elimination with partial pivoting; `a` is `m × (m + 1)` augmented.
pub fn gauss_solve(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs())).unwrap();
        a.swap(col, pivot);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(row);
                for (r, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *r -= f * p;
                }
            }
        }
    }
    let mut sol = vec![0.0; m];
    for row in (0..m).rev() {
        let tail: f64 = (row + 1..m).map(|k| a[row][k] * sol[k]).sum();
        sol[row] = (a[row][m] - tail) / a[row][row];
    }
    sol
}

/// Equidistributed positions with `x_0 = anchor`, by a direct solve for `x_1 … x_{N-1}`.
pub fn equidistribution_direct(rho: &[f64], anchor: f64, period: f64) -> Vec<f64> {
    let n = rho.len();
    let m = n - 1;
    let w = |i: usize| rho[i] + rho[(i + 1) % n];
    let mut a = vec![vec![0.0; m + 1]; m];
    for row in 0..m {
        let i = row + 1;
        // w_i (x_{i+1} - x_i) - w_{i-1} (x_i - x_{i-1}) = 0
        a[row][row] = -(w(i) + w(i - 1));
        if i + 1 < n {
            a[row][row + 1] = w(i);
        } else {
            a[row][m] -= w(i) * (anchor + period);
        }
        if i > 1 {
            a[row][row - 1] = w(i - 1);
        } else {
            a[row][m] -= w(i - 1) * anchor;
        }
    }
    let mut x = vec![anchor];
    x.extend(gauss_solve(a));
    x
}

/// Periodic cubic spline through `(x_i, u_i)`, evaluated at `queries`.
pub fn periodic_spline(x: &[f64], u: &[f64], period: f64, queries: &[f64]) -> Vec<f64> {
    let n = x.len();
    let gap = |i: usize| if i + 1 < n { x[i + 1] - x[i] } else { x[0] + period - x[n - 1] };
    // h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = 6 (s_i - s_{i-1})
    let mut a = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        let (hl, hr) = (gap((i + n - 1) % n), gap(i));
        let sl = (u[i] - u[(i + n - 1) % n]) / hl;
        let sr = (u[(i + 1) % n] - u[i]) / hr;
        a[i][(i + n - 1) % n] += hl;
        a[i][i] += 2.0 * (hl + hr);
        a[i][(i + 1) % n] += hr;
        a[i][n] = 6.0 * (sr - sl);
    }
    let curv = gauss_solve(a);
    queries
        .iter()
        .map(|&q| {
            let r = x[0] + (q - x[0]).rem_euclid(period);
            let i = (0..n).rev().find(|&i| x[i] <= r).unwrap_or(n - 1);
            let h = gap(i);
            let a = (x[i] + h - r) / h;
            let b = 1.0 - a;
            a * u[i] + b * u[(i + 1) % n] + ((a * a * a - a) * curv[i] + (b * b * b - b) * curv[(i + 1) % n]) * h * h / 6.0
        })
        .collect()
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (left, right) = (simpson(f, a, m), simpson(f, m, b));
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, left, 0.5 * tol, depth - 1) + adaptive(f, m, b, right, 0.5 * tol, depth - 1)
}

/// `∫_a^b f` by adaptive Simpson with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adaptive(f, a, b, simpson(f, a, b), tol, 40)
}

/// `a_0 = (1/2π) ∫ e^{-(1 - cos x)/(2ν)} dx`.
pub fn a0_oracle(nu: f64) -> f64 {
    adaptive_simpson(&|x: f64| (-(1.0 - x.cos()) / (2.0 * nu)).exp(), 0.0, TAU, 1e-15) / TAU
}

/// Cole–Hopf series with an independent `m`-point trapezoid and `j` terms.
pub fn series_u(nu: f64, m: usize, j: usize, t: f64, x: f64) -> f64 {
    let a: Vec<f64> = (0..=j)
        .map(|k| {
            let s: f64 = (0..m)
                .map(|q| {
                    let y = TAU * q as f64 / m as f64;
                    (-(1.0 - y.cos()) / (2.0 * nu)).exp() * (k as f64 * y).cos()
                })
                .sum();
            if k == 0 { s / m as f64 } else { 2.0 * s / m as f64 }
        })
        .collect();
    let (mut num, mut den) = (0.0, a[0]);
    for (k, ak) in a.iter().enumerate().skip(1) {
        let kf = k as f64;
        let d = ak * (-nu * t * kf * kf).exp();
        num += d * kf * (kf * x).sin();
        den += d * (kf * x).cos();
    }
    2.0 * nu * num / den
}

/// Classical FTCS on the uniform periodic grid from `u0` to `t_final`, steps
/// `k dt` with the last one shortened.
pub fn ftcs_run(u0: &[f64], period: f64, nu: f64, dt: f64, t_final: f64) -> Vec<f64> {
    let n = u0.len();
    let h = period / n as f64;
    let steps = ((t_final / dt) * (1.0 - 1e-12)).ceil() as usize;
    let mut u = u0.to_vec();
    for k in 0..steps {
        let t1 = if k + 1 == steps { t_final } else { (k + 1) as f64 * dt };
        let tau = t1 - k as f64 * dt;
        u = (0..n)
            .map(|i| {
                let (um, u0, up) = (u[(i + n - 1) % n], u[i], u[(i + 1) % n]);
                u0 - tau * u0 * (up - um) / (2.0 * h) + tau * nu * (up - 2.0 * u0 + um) / (h * h)
            })
            .collect();
    }
    u
}
