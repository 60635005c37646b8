//! Kolmogorov–Smirnov and Cramér–von Mises goodness of fit.
//!
//! [`Convention::Standard`] gives the usual one-sample statistics.
//! [`Convention::PaperCompat`] reproduces a published R pipeline: the ECDF
//! values at the sorted data and the fitted CDF values at the same points are
//! compared as two samples, by `ks.test` (exact Smirnov p-value when
//! `m·n < 10000` and there are no ties, otherwise asymptotic) and by the
//! two-sample CVM statistic of the CDFt package with p-value `exp(−T)/6`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Standard,
    PaperCompat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub ks_stat: f64,
    pub ks_pvalue: f64,
    pub cvm_stat: f64,
    pub cvm_pvalue: f64,
    pub convention: Convention,
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(data: &[f64]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Dataset("empty dataset".into()));
        }
        if data.iter().any(|x| x.is_nan()) {
            return Err(Error::Dataset("NaN in data".into()));
        }
        let mut sorted = data.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Ecdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of observations `≤ x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }
}

pub fn ecdf(data: &[f64]) -> Result<Ecdf> {
    Ecdf::new(data)
}

/// `F` at the sorted data, checked for monotonicity and range.
fn fitted_values<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> Result<Vec<f64>> {
    let values: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::domain("gof", "cdf values must lie in [0, 1]"));
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain(
            "gof",
            "cdf evaluations are not monotone in the sorted data",
        ));
    }
    Ok(values)
}

/// Kolmogorov distribution `P(K ≤ λ)`.
pub fn kolmogorov_cdf(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 0.0;
    }
    if lambda < 1.0 {
        let c = -PI * PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|k| ((2 * k - 1) as f64).powi(2))
            .map(|m| (c * m).exp())
            .sum();
        (2.0 * PI).sqrt() / lambda * s
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        1.0 - 2.0 * s
    }
}

/// `e^z K_ν(z)` from `∫₀^∞ e^{−z(cosh t − 1)} cosh(νt) dt`.
fn scaled_bessel_k(nu: f64, z: f64) -> f64 {
    let f = |t: f64| {
        let e = -z * (t.cosh() - 1.0);
        0.5 * ((e + nu * t).exp() + (e - nu * t).exp())
    };
    quad::integrate_half_line(f, 1.0, 1e-15, 1e-13)
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
}

/// Limiting distribution of the Cramér–von Mises statistic, `P(W² ≤ x)`
/// (Csörgő–Faraway series). Loses accuracy for `x > 4`, where it is ~1.
pub fn cvm_asymptotic_cdf(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut coef = 1.0; // C(2k, k) / 4^k
    for k in 0..40 {
        let m = (4 * k + 1) as f64;
        let z = m * m / (16.0 * x);
        let term = coef * m.sqrt() * (-2.0 * z).exp() * scaled_bessel_k(0.25, z);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        coef *= (2 * k + 1) as f64 / (2 * k + 2) as f64;
    }
    (sum / (PI * x.sqrt())).clamp(0.0, 1.0)
}

/// Exact `P(D < d)` for the two-sided two-sample Smirnov statistic without ties.
pub fn smirnov_cdf(d: f64, m: usize, n: usize) -> f64 {
    let (m, n) = if m > n { (n, m) } else { (m, n) };
    let (md, nd) = (m as f64, n as f64);
    let q = (0.5 + (d * md * nd - 1e-7).floor()) / (md * nd);
    let mut u: Vec<f64> = (0..=n).map(|j| if j as f64 / nd > q { 0.0 } else { 1.0 }).collect();
    for i in 1..=m {
        let w = i as f64 / (i + n) as f64;
        u[0] = if i as f64 / md > q { 0.0 } else { w * u[0] };
        for j in 1..=n {
            u[j] = if (i as f64 / md - j as f64 / nd).abs() > q {
                0.0
            } else {
                w * u[j] + u[j - 1]
            };
        }
    }
    u[n]
}

/// Two-sided two-sample KS in the manner of R's `ks.test`, returning `(D, p)`.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (m, n) = (x.len(), y.len());
    let pooled: Vec<(f64, bool)> = x
        .iter()
        .map(|&v| (v, true))
        .chain(y.iter().map(|&v| (v, false)))
        .collect();
    let mut order: Vec<usize> = (0..m + n).collect();
    order.sort_by(|&a, &b| pooled[a].0.total_cmp(&pooled[b].0));
    let mut z = 0.0;
    let mut d: f64 = 0.0;
    let mut ties = false;
    for (k, &i) in order.iter().enumerate() {
        z += if pooled[i].1 { 1.0 / m as f64 } else { -1.0 / n as f64 };
        let last_of_value = k + 1 == order.len() || pooled[order[k + 1]].0 != pooled[i].0;
        if last_of_value {
            d = d.max(z.abs());
        } else {
            ties = true;
        }
    }
    let p = if m * n < 10_000 && !ties {
        1.0 - smirnov_cdf(d, m, n)
    } else {
        let eff = (m * n) as f64 / (m + n) as f64;
        1.0 - kolmogorov_cdf(eff.sqrt() * d)
    };
    (d, p.clamp(0.0, 1.0))
}

/// Two-sample CVM statistic of the CDFt package (ties kept in input order).
pub fn cvm_two_sample(x: &[f64], y: &[f64]) -> f64 {
    let (m, n) = (x.len() as f64, y.len() as f64);
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let pooled: Vec<(f64, bool, usize)> = xs
        .iter()
        .enumerate()
        .map(|(r, &v)| (v, true, r + 1))
        .chain(ys.iter().enumerate().map(|(r, &v)| (v, false, r + 1)))
        .collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].0.total_cmp(&pooled[b].0));
    let (mut som_m, mut som_n) = (0.0, 0.0);
    for (k, &i) in order.iter().enumerate() {
        let (_, first, rank) = pooled[i];
        let diff = rank as f64 - (k + 1) as f64;
        if first {
            som_m += diff * diff;
        } else {
            som_n += diff * diff;
        }
    }
    let u = n * som_n + m * som_m;
    u / (n * m) / (n + m) - (4.0 * m * n - 1.0) / (6.0 * (m + n))
}

/// Kolmogorov–Smirnov statistic and p-value.
pub fn ks_test<F: Fn(f64) -> f64>(data: &[f64], cdf: F, convention: Convention) -> Result<(f64, f64)> {
    let e = Ecdf::new(data)?;
    let fitted = fitted_values(e.sorted(), cdf)?;
    let n = e.len() as f64;
    Ok(match convention {
        Convention::Standard => {
            let d = fitted
                .iter()
                .enumerate()
                .map(|(i, &f)| ((i + 1) as f64 / n - f).max(f - i as f64 / n))
                .fold(0.0, f64::max);
            (d, (1.0 - kolmogorov_cdf(n.sqrt() * d)).clamp(0.0, 1.0))
        }
        Convention::PaperCompat => {
            let ecdf_values: Vec<f64> = e.sorted().iter().map(|&x| e.eval(x)).collect();
            ks_two_sample(&ecdf_values, &fitted)
        }
    })
}

/// Cramér–von Mises statistic and p-value.
pub fn cvm_test<F: Fn(f64) -> f64>(data: &[f64], cdf: F, convention: Convention) -> Result<(f64, f64)> {
    let e = Ecdf::new(data)?;
    let fitted = fitted_values(e.sorted(), cdf)?;
    let n = e.len() as f64;
    Ok(match convention {
        Convention::Standard => {
            let t = 1.0 / (12.0 * n)
                + fitted
                    .iter()
                    .enumerate()
                    .map(|(i, &f)| (f - (2 * i + 1) as f64 / (2.0 * n)).powi(2))
                    .sum::<f64>();
            (t, 1.0 - cvm_asymptotic_cdf(t))
        }
        Convention::PaperCompat => {
            let ecdf_values: Vec<f64> = e.sorted().iter().map(|&x| e.eval(x)).collect();
            let t = cvm_two_sample(&ecdf_values, &fitted);
            (t, paper_cvm_pvalue(t))
        }
    })
}

/// The `exp(−T)/6` p-value; never exceeds `1/6`.
pub fn paper_cvm_pvalue(t: f64) -> f64 {
    (-t).exp() / 6.0
}

pub fn gof<F: Fn(f64) -> f64>(data: &[f64], cdf: F, convention: Convention) -> Result<GofResult> {
    let (ks_stat, ks_pvalue) = ks_test(data, &cdf, convention)?;
    let (cvm_stat, cvm_pvalue) = cvm_test(data, &cdf, convention)?;
    Ok(GofResult {
        ks_stat,
        ks_pvalue,
        cvm_stat,
        cvm_pvalue,
        convention,
    })
}
