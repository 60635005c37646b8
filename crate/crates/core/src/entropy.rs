//! Tsallis, quadratic and Shannon entropies.
//!
//! Every entropy has a quadrature path, which is the value callers should
//! report, and an analytic path (series or closed form) that only holds under
//! extra hypotheses and serves as a cross-check.
//!
//! `∫ f^q` is computed in the Weibull variable `u = (x/β)^α`, where the
//! integrand becomes `K u^p h(u)` with `p = (q−1)(α−1)/α` and a bounded,
//! smooth `h`. On `[0, 1]` the substitution `u = v^{1/(p+1)}` absorbs the
//! algebraic singularity exactly.

use serde::{Deserialize, Serialize};

use crate::dist::BWeibull;
use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{binomial, gamma_pos, ln_gamma_pos};

const ABS_TOL: f64 = 1e-14;
const REL_TOL: f64 = 1e-12;
const TSALLIS_MAX_TERMS: usize = 300;
const TSALLIS_REL_TAIL: f64 = 1e-12;
const SHANNON_MAX_TERMS: usize = 60;
const SHANNON_TAIL: f64 = 1e-12;
const GROWTH_RUN: usize = 5;
const HEAD_DECADES: i32 = 32;
/// `Γ(2 − 1/α)` arguments below this are treated as the pole.
const POLE_GUARD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntropyMethod {
    ClosedForm,
    Series,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub value: f64,
    pub method: EntropyMethod,
    pub series_terms: Option<usize>,
    /// Whether the hypotheses of the analytic path hold at this θ.
    pub hypothesis_met: bool,
}

impl EntropyValue {
    fn quadrature(value: f64, hypothesis_met: bool) -> Self {
        Self {
            value,
            method: EntropyMethod::Quadrature,
            series_terms: None,
            hypothesis_met,
        }
    }
}

/// `E[G(X)] = 1 + (1 − δμ)² + δ²σ²`, evaluated as `2 − 2δμ + δ²E[X²]`.
pub fn expected_bimodal_factor(d: &BWeibull) -> f64 {
    let delta = d.delta();
    let m1 = d.raw_moment(1.0).expect("order 1 exceeds -alpha");
    let m2 = d.raw_moment(2.0).expect("order 2 exceeds -alpha");
    2.0 - 2.0 * delta * m1 + delta * delta * m2
}

/// `∫₀^∞ f(x)^q dx` by quadrature. Finite iff `q > 0` and `(q−1)(α−1)/α > −1`.
pub fn density_power_integral(d: &BWeibull, q: f64) -> Result<f64> {
    let (alpha, beta) = (d.alpha(), d.beta());
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::domain(
            "density_power_integral",
            format!("q = {q} must be positive and finite"),
        ));
    }
    let p = (q - 1.0) * (alpha - 1.0) / alpha;
    if !(p > -1.0) {
        return Err(Error::domain(
            "density_power_integral",
            format!("integral of f^q diverges at the origin for q = {q}, alpha = {alpha}"),
        ));
    }
    let ln_norm = (alpha / (beta * d.z_const())).ln();
    let ln_k = q * ln_norm + (beta / alpha).ln();
    let h = |u: f64| {
        let x = beta * u.powf(1.0 / alpha);
        if !x.is_finite() {
            return 0.0;
        }
        (q * d.ln_bimodal_factor(x) - q * u).exp()
    };
    // When p + 1 is small the map pushes all structure of h towards v = 1,
    // so panels are cut at u = 10^{-k}.
    let mut head = 0.0;
    let mut upper = 1.0;
    for k in 1..=HEAD_DECADES {
        let lower = if k == HEAD_DECADES {
            0.0
        } else {
            10f64.powi(-k).powf(p + 1.0)
        };
        head +=
            quad::integrate(|v: f64| h((v.ln() / (p + 1.0)).exp()), lower, upper, ABS_TOL, REL_TOL)?.into_result()?;
        upper = lower;
    }
    head /= p + 1.0;
    let tail = quad::integrate_from(
        |u: f64| {
            let hu = h(u);
            if hu == 0.0 {
                0.0
            } else {
                hu * u.powf(p)
            }
        },
        1.0,
        1.0 / q,
        ABS_TOL,
        REL_TOL,
    )?
    .into_result()?;
    Ok(ln_k.exp() * (head + tail))
}

fn tsallis_hypothesis(d: &BWeibull, q: f64) -> bool {
    d.delta() < 0.0 && q * (d.alpha() - 1.0) > -1.0
}

fn check_q(q: f64) -> Result<()> {
    if q == 1.0 || !q.is_finite() {
        Err(Error::domain(
            "tsallis",
            format!("q = {q} must be finite and differ from 1"),
        ))
    } else {
        Ok(())
    }
}

/// Tsallis entropy `S_q = (1 − ∫f^q)/(q − 1)` by quadrature.
pub fn tsallis(d: &BWeibull, q: f64) -> Result<EntropyValue> {
    check_q(q)?;
    let j = density_power_integral(d, q)?;
    Ok(EntropyValue::quadrature(
        (1.0 - j) / (q - 1.0),
        tsallis_hypothesis(d, q),
    ))
}

/// Tsallis entropy from the double binomial series.
///
/// The outer sum expands `[1 + (1 − δx)²]^q` binomially, so for non-integer
/// `q` it only terminates when the inner integrals stay bounded. Growth of the
/// outer terms is reported as [`Error::SeriesDivergence`].
pub fn tsallis_series(d: &BWeibull, q: f64) -> Result<EntropyValue> {
    check_q(q)?;
    let (alpha, beta, delta) = (d.alpha(), d.beta(), d.delta());
    if !(q > 0.0) || !(q * (alpha - 1.0) > -1.0) {
        return Err(Error::domain(
            "tsallis_series",
            format!("series undefined for q = {q}, alpha = {alpha}"),
        ));
    }
    let ln_q = q.ln();
    let ln_beta = beta.ln();
    let ln_abs_delta = delta.abs().ln();
    // ∫ x^l (x/β)^{q(α−1)} e^{−q(x/β)^α} dx = β^{l+1} Γ(a_l) / (α q^{a_l})
    let ln_inner = |l: usize| {
        let a = q + (l as f64 - q + 1.0) / alpha;
        (l as f64 + 1.0) * ln_beta + ln_gamma_pos(a) - alpha.ln() - a * ln_q
    };
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut growth = 0;
    for k in 0..TSALLIS_MAX_TERMS {
        let c = binomial(q, k);
        if c == 0.0 {
            // Integer q: the expansion is a finite polynomial.
            let value = (1.0 - (q * (alpha / (beta * d.z_const())).ln()).exp() * sum) / (q - 1.0);
            return Ok(EntropyValue {
                value,
                method: EntropyMethod::Series,
                series_terms: Some(k),
                hypothesis_met: tsallis_hypothesis(d, q),
            });
        }
        let parts: Vec<(f64, f64)> = if delta == 0.0 {
            vec![(ln_inner(0), 1.0)]
        } else {
            (0..=2 * k)
                .map(|l| {
                    let sign = if delta > 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
                    let lb = ln_gamma_pos(2.0 * k as f64 + 1.0)
                        - ln_gamma_pos(l as f64 + 1.0)
                        - ln_gamma_pos((2 * k - l) as f64 + 1.0);
                    (lb + l as f64 * ln_abs_delta + ln_inner(l), sign)
                })
                .collect()
        };
        let m = parts.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        let inner = m.exp() * parts.iter().map(|(l, s)| s * (l - m).exp()).sum::<f64>();
        let term = c * inner;
        if !term.is_finite() {
            return Err(Error::SeriesDivergence {
                what: "tsallis",
                terms: k,
            });
        }
        sum += term;
        if k > 0 && term.abs() <= TSALLIS_REL_TAIL * sum.abs() {
            let value = (1.0 - (q * (alpha / (beta * d.z_const())).ln()).exp() * sum) / (q - 1.0);
            return Ok(EntropyValue {
                value,
                method: EntropyMethod::Series,
                series_terms: Some(k + 1),
                hypothesis_met: tsallis_hypothesis(d, q),
            });
        }
        growth = if term.abs() > prev { growth + 1 } else { 0 };
        if growth >= GROWTH_RUN {
            return Err(Error::SeriesDivergence {
                what: "tsallis",
                terms: k + 1,
            });
        }
        prev = term.abs();
    }
    Err(Error::SeriesDivergence {
        what: "tsallis",
        terms: TSALLIS_MAX_TERMS,
    })
}

/// Quadratic entropy `H₂ = −log ∫f²` by quadrature.
pub fn quadratic(d: &BWeibull) -> Result<EntropyValue> {
    let j = density_power_integral(d, 2.0)?;
    Ok(EntropyValue::quadrature(-j.ln(), d.alpha() > 0.5))
}

/// Closed form of `H₂`, valid for `α > 1/2`.
pub fn quadratic_closed_form(d: &BWeibull) -> Result<EntropyValue> {
    let (a, b, dl) = (d.alpha(), d.beta(), d.delta());
    let pole_arg = 2.0 - 1.0 / a;
    if !(pole_arg > POLE_GUARD) {
        return Err(Error::domain(
            "quadratic_closed_form",
            format!("alpha = {a} is at or too close to the pole of Gamma(2 - 1/alpha)"),
        ));
    }
    let s = 2f64.powf(1.0 / a);
    let bracket = s * gamma_pos(pole_arg) / b + 2.0 * dl * dl * b * gamma_pos(2.0 + 1.0 / a) / s
        - dl.powi(3) * b * b * gamma_pos(2.0 + 2.0 / a) / (s * s)
        + dl.powi(4) * b.powi(3) * gamma_pos(2.0 + 3.0 / a) / (4.0 * s.powi(3))
        - 2.0 * dl;
    Ok(EntropyValue {
        value: -a.ln() + 2.0 * d.z_const().ln() - bracket.ln(),
        method: EntropyMethod::ClosedForm,
        series_terms: None,
        hypothesis_met: true,
    })
}

/// `E[log G(X)]` by quadrature.
pub fn expected_log_bimodal_factor(d: &BWeibull) -> Result<f64> {
    d.expect_quad(|x| d.ln_bimodal_factor(x), ABS_TOL, REL_TOL)?
        .into_result()
}

/// `E[log G(X)]` from the Taylor series of `log G` about `μ_G`, regrouped as
/// `Σₙ (−1)^{n+1} E[(G − μ_G)^n] / (n μ_G^n)` with the central moments of `G`
/// expanded in raw moments of `X`. Returns the value and the terms used.
pub fn expected_log_bimodal_factor_series(d: &BWeibull) -> Result<(f64, usize)> {
    let delta = d.delta();
    let mu_g = expected_bimodal_factor(d);
    let n_max = SHANNON_MAX_TERMS;
    let moments: Vec<f64> = (0..=2 * n_max)
        .map(|l| d.raw_moment(l as f64).unwrap_or(f64::INFINITY))
        .collect();
    // e_j = E[(1 − δX)^{2j}]
    let e: Vec<f64> = (0..=n_max)
        .map(|j| {
            (0..=2 * j)
                .map(|l| binomial(2.0 * j as f64, l) * (-delta).powi(l as i32) * moments[l])
                .sum()
        })
        .collect();
    // E[G^k] / μ_G^k
    let g_scaled: Vec<f64> = (0..=n_max)
        .map(|k| (0..=k).map(|j| binomial(k as f64, j) * e[j]).sum::<f64>() / mu_g.powi(k as i32))
        .collect();
    let mut sum = mu_g.ln();
    let mut prev = f64::INFINITY;
    let mut growth = 0;
    let mut small = 0;
    for n in 1..=n_max {
        let central: f64 = (0..=n)
            .map(|k| {
                let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(n as f64, k) * g_scaled[k]
            })
            .sum();
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * central / n as f64;
        if !term.is_finite() {
            break;
        }
        sum += term;
        small = if term.abs() <= SHANNON_TAIL * sum.abs().max(1.0) {
            small + 1
        } else {
            0
        };
        if small >= 2 {
            return Ok((sum, n));
        }
        growth = if term.abs() > prev { growth + 1 } else { 0 };
        if growth >= GROWTH_RUN {
            return Err(Error::SeriesDivergence {
                what: "shannon",
                terms: n,
            });
        }
        prev = term.abs();
    }
    Err(Error::SeriesDivergence {
        what: "shannon",
        terms: n_max,
    })
}

fn assemble_shannon(d: &BWeibull, e_log_g: f64) -> f64 {
    let (a, b) = (d.alpha(), d.beta());
    d.z_const().ln() + a * b.ln() - a.ln() - e_log_g - (a - 1.0) * d.expected_log() + d.e_xalpha() / b.powf(a)
}

/// Shannon entropy `H₁ = −E[log f(X)]`, assembled from closed-form moments and
/// `E[log G(X)]` by quadrature.
pub fn shannon(d: &BWeibull) -> Result<EntropyValue> {
    let e_log_g = expected_log_bimodal_factor(d)?;
    let hypothesis_met = expected_log_bimodal_factor_series(d).is_ok();
    Ok(EntropyValue::quadrature(assemble_shannon(d, e_log_g), hypothesis_met))
}

/// Shannon entropy with `E[log G(X)]` from its Taylor series.
pub fn shannon_series(d: &BWeibull) -> Result<EntropyValue> {
    let (e_log_g, terms) = expected_log_bimodal_factor_series(d)?;
    Ok(EntropyValue {
        value: assemble_shannon(d, e_log_g),
        method: EntropyMethod::Series,
        series_terms: Some(terms),
        hypothesis_met: true,
    })
}
