//! Log-likelihood, `log_q`-likelihood and their analytic derivatives.
//!
//! Parameters are ordered `(α, β, δ)`. Every observation contributes
//! `log f(x) = log α − log β − log Z + log G(x) + (α−1) log(x/β) − (x/β)^α`,
//! so the score and Hessian split into a `Z` block shared by all points and a
//! per-point block.

use nalgebra::{Matrix3, Vector3};

use crate::dist::ParamVector;
use crate::exec::Exec;
use crate::specfun::{digamma_pos, gamma_pos, trigamma_pos};

/// `Z` together with its gradient and Hessian in `(α, β, δ)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ZDerivatives {
    pub z: f64,
    pub grad: [f64; 3],
    pub hess: [[f64; 3]; 3],
}

/// `Γ(1 + c/α)` and its first two derivatives in `α`.
fn gamma_ratio_derivs(alpha: f64, c: f64) -> (f64, f64, f64) {
    let arg = 1.0 + c / alpha;
    let g = gamma_pos(arg);
    let psi = digamma_pos(arg);
    let psi1 = trigamma_pos(arg);
    let a2 = alpha * alpha;
    let d = -c * psi / a2;
    let d_prime = 2.0 * c * psi / (a2 * alpha) + c * c * psi1 / (a2 * a2);
    (g, g * d, g * (d * d + d_prime))
}

pub(crate) fn z_derivatives(alpha: f64, beta: f64, delta: f64) -> ZDerivatives {
    let (g1, g1a, g1aa) = gamma_ratio_derivs(alpha, 1.0);
    let (g2, g2a, g2aa) = gamma_ratio_derivs(alpha, 2.0);
    let (b, d) = (beta, delta);
    let z = 2.0 - 2.0 * d * b * g1 + d * d * b * b * g2;
    let za = -2.0 * d * b * g1a + d * d * b * b * g2a;
    let zb = -2.0 * d * g1 + 2.0 * d * d * b * g2;
    let zd = -2.0 * b * g1 + 2.0 * d * b * b * g2;
    let zaa = -2.0 * d * b * g1aa + d * d * b * b * g2aa;
    let zab = -2.0 * d * g1a + 2.0 * d * d * b * g2a;
    let zad = -2.0 * b * g1a + 2.0 * d * b * b * g2a;
    let zbb = 2.0 * d * d * g2;
    let zbd = -2.0 * g1 + 4.0 * d * b * g2;
    let zdd = 2.0 * b * b * g2;
    ZDerivatives {
        z,
        grad: [za, zb, zd],
        hess: [[zaa, zab, zad], [zab, zbb, zbd], [zad, zbd, zdd]],
    }
}

/// Packed layout of one evaluation: value, score, then the upper triangle of
/// the Hessian as `αα, αβ, αδ, ββ, βδ, δδ`.
pub(crate) const PACKED: usize = 10;
const UPPER: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Per-observation evaluator with the `Z` block precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PointModel {
    alpha: f64,
    beta: f64,
    delta: f64,
    ln_const: f64,
    common_score: [f64; 3],
    common_hess: [[f64; 3]; 3],
}

impl PointModel {
    pub fn new(theta: &ParamVector) -> Self {
        let (a, b, d) = (theta.alpha(), theta.beta(), theta.delta());
        let zd = z_derivatives(a, b, d);
        let z = zd.z;
        let mut common_hess = [[0.0; 3]; 3];
        for (i, row) in common_hess.iter_mut().enumerate() {
            for (j, h) in row.iter_mut().enumerate() {
                *h = -(zd.hess[i][j] / z - zd.grad[i] * zd.grad[j] / (z * z));
            }
        }
        common_hess[0][0] -= 1.0 / (a * a);
        common_hess[0][1] -= 1.0 / b;
        common_hess[1][0] -= 1.0 / b;
        common_hess[1][1] += a / (b * b);
        PointModel {
            alpha: a,
            beta: b,
            delta: d,
            ln_const: (a / (b * z)).ln(),
            common_score: [1.0 / a - zd.grad[0] / z, -a / b - zd.grad[1] / z, -zd.grad[2] / z],
            common_hess,
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let l = (x / self.beta).ln();
        let u = (self.alpha * l).exp();
        self.ln_const + ln_g(1.0 - self.delta * x) + (self.alpha - 1.0) * l - u
    }

    /// `(log f, ∂ log f, ∂² log f)` at one observation.
    pub fn derivatives(&self, x: f64) -> (f64, [f64; 3], [[f64; 3]; 3]) {
        let (a, b) = (self.alpha, self.beta);
        let w = 1.0 - self.delta * x;
        let l = (x / b).ln();
        let u = (a * l).exp();
        let ln_f = self.ln_const + ln_g(w) + (a - 1.0) * l - u;
        // ∂ log G/∂δ and ∂² log G/∂δ², arranged to survive w² overflowing
        let (g_d, g_dd) = if w.abs() > 1.0 {
            let r = x / w;
            let g_d = -2.0 * x / (w + 1.0 / w);
            (g_d, 2.0 * r * r / (1.0 + 1.0 / (w * w)) - g_d * g_d)
        } else {
            let g = 1.0 + w * w;
            let g_d = -2.0 * x * w / g;
            (g_d, 2.0 * x * x / g - g_d * g_d)
        };
        let s = [
            self.common_score[0] + l - u * l,
            self.common_score[1] + a * u / b,
            self.common_score[2] + g_d,
        ];
        let mut h = self.common_hess;
        h[0][0] -= u * l * l;
        let hab = (a * u * l + u) / b;
        h[0][1] += hab;
        h[1][0] += hab;
        h[1][1] -= a * (a + 1.0) * u / (b * b);
        h[2][2] += g_dd;
        (ln_f, s, h)
    }

    /// Packed contribution of `x` to `Σ log_q f`; `q = 1` gives plain `log f`.
    pub fn packed(&self, x: f64, q: f64, order: u8) -> [f64; PACKED] {
        let mut out = [0.0; PACKED];
        if order == 0 {
            out[0] = log_q_of_ln(self.ln_pdf(x), q);
            return out;
        }
        let (ln_f, s, h) = self.derivatives(x);
        out[0] = log_q_of_ln(ln_f, q);
        // d log_q f = f^{1−q} d log f
        let wq = if q == 1.0 { 1.0 } else { ((1.0 - q) * ln_f).exp() };
        for i in 0..3 {
            out[1 + i] = wq * s[i];
        }
        if order >= 2 {
            for (k, &(i, j)) in UPPER.iter().enumerate() {
                out[4 + k] = wq * ((1.0 - q) * s[i] * s[j] + h[i][j]);
            }
        }
        out
    }
}

/// `log(1 + w²)` without overflow.
fn ln_g(w: f64) -> f64 {
    if w.abs() > 1e100 {
        2.0 * w.abs().ln()
    } else {
        (w * w).ln_1p()
    }
}

/// `log_q` applied to a value given by its logarithm.
pub(crate) fn log_q_of_ln(ln_f: f64, q: f64) -> f64 {
    if q == 1.0 {
        ln_f
    } else {
        ((1.0 - q) * ln_f).exp_m1() / (1.0 - q)
    }
}

/// The `q`-deformed logarithm `(y^{1−q} − 1)/(1 − q)`, reducing to `log y` at `q = 1`.
pub fn log_q(y: f64, q: f64) -> f64 {
    log_q_of_ln(y.ln(), q)
}

/// Objective value, score and Hessian of `Σ log_q f(xᵢ)` at one θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub score: Vector3<f64>,
    pub hessian: Matrix3<f64>,
}

impl Evaluation {
    fn from_packed(p: [f64; PACKED]) -> Self {
        let mut hessian = Matrix3::zeros();
        for (k, &(i, j)) in UPPER.iter().enumerate() {
            hessian[(i, j)] = p[4 + k];
            hessian[(j, i)] = p[4 + k];
        }
        Evaluation {
            value: p[0],
            score: Vector3::new(p[1], p[2], p[3]),
            hessian,
        }
    }
}

/// Value, score and Hessian of `Σ log_q f(xᵢ; θ)` (`q = 1` for the log-likelihood).
pub fn evaluate(theta: &ParamVector, data: &[f64], q: f64, exec: Exec) -> Evaluation {
    let model = PointModel::new(theta);
    Evaluation::from_packed(exec.sum_vec::<PACKED, _>(data, |x| model.packed(x, q, 2)))
}

/// `ℓ(θ) = Σ log f(xᵢ; θ)`. Non-finite on overflow.
pub fn log_likelihood(theta: &ParamVector, data: &[f64]) -> f64 {
    log_likelihood_with(theta, data, Exec::default())
}

pub fn log_likelihood_with(theta: &ParamVector, data: &[f64], exec: Exec) -> f64 {
    let model = PointModel::new(theta);
    exec.sum(data, |x| model.ln_pdf(x))
}

/// `ℓ_q(θ) = Σ log_q f(xᵢ; θ)`.
pub fn logq_likelihood(theta: &ParamVector, data: &[f64], q: f64) -> f64 {
    logq_likelihood_with(theta, data, q, Exec::default())
}

pub fn logq_likelihood_with(theta: &ParamVector, data: &[f64], q: f64, exec: Exec) -> f64 {
    let model = PointModel::new(theta);
    exec.sum(data, |x| log_q_of_ln(model.ln_pdf(x), q))
}

/// Gradient of `ℓ` in `(α, β, δ)`.
pub fn score(theta: &ParamVector, data: &[f64]) -> Vector3<f64> {
    evaluate(theta, data, 1.0, Exec::default()).score
}

/// Hessian of `ℓ` in `(α, β, δ)`.
pub fn hessian(theta: &ParamVector, data: &[f64]) -> Matrix3<f64> {
    evaluate(theta, data, 1.0, Exec::default()).hessian
}
