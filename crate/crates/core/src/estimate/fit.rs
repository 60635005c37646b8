//! MLE / MLqE fitting: Harmony Search followed by a damped Newton polish.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::fisher::{fisher_information, q_fisher_information, standard_errors, FisherMethod};
use super::harmony::{harmony_search, HarmonyConfig};
use super::likelihood::{evaluate, log_likelihood_with, logq_likelihood_with, Evaluation};
use crate::dataset::Dataset;
use crate::dist::{BWeibull, ParamVector};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gof::{gof, Convention, GofResult};

pub const MAX_POLISH_STEPS: usize = 200;
/// Stationarity target `‖score‖∞ < SCORE_TOL · n`.
pub const SCORE_TOL: f64 = 1e-6;
const ARMIJO: f64 = 1e-4;
const BOUNDARY_FRACTION: f64 = 1e-6;

/// The q values appearing in published comparisons.
pub const DEFAULT_Q_GRID: [f64; 8] = [0.75, 0.8, 0.85, 0.87, 0.9, 0.95, 0.99, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub theta_hat: ParamVector,
    /// `None` where the inverse information had a negative or non-finite diagonal.
    pub standard_errors: [Option<f64>; 3],
    /// `standard_errors / √n`, the scale of the parenthesized values in published tables.
    pub paper_scale_standard_errors: [Option<f64>; 3],
    /// 1 means plain maximum likelihood.
    pub q: f64,
    /// `ℓ_q(θ̂)`, equal to `ℓ(θ̂)` when `q = 1`.
    pub objective_value: f64,
    pub log_likelihood: f64,
    pub n: usize,
    pub iterations: usize,
    pub polish_steps: usize,
    pub score_norm: f64,
    /// Per-observation Fisher information at θ̂.
    pub fisher: Option<[[f64; 3]; 3]>,
    pub fisher_method: FisherMethod,
    /// `None` when the information matrix is singular.
    pub condition_number: Option<f64>,
    pub polish_failed: bool,
    pub at_boundary: bool,
}

impl FitResult {
    pub fn distribution(&self) -> BWeibull {
        BWeibull::from_params(self.theta_hat)
    }
}

fn in_bounds(x: &Vector3<f64>, bounds: &[(f64, f64)]) -> bool {
    x.iter().zip(bounds).all(|(v, &(lo, hi))| *v >= lo && *v <= hi)
}

fn params(x: &Vector3<f64>) -> Option<ParamVector> {
    ParamVector::new(x[0], x[1], x[2]).ok()
}

struct Polished {
    x: Vector3<f64>,
    eval: Evaluation,
    steps: usize,
    converged: bool,
}

/// Levenberg–Marquardt damped Newton ascent on `ℓ_q`, kept inside `bounds`.
fn polish(start: Vector3<f64>, data: &[f64], q: f64, bounds: &[(f64, f64)], exec: Exec) -> Polished {
    let tol = SCORE_TOL * data.len() as f64;
    let value_at = |x: &Vector3<f64>| match params(x) {
        Some(t) if in_bounds(x, bounds) => {
            let v = logq_likelihood_with(&t, data, q, exec);
            if v.is_finite() {
                v
            } else {
                f64::NEG_INFINITY
            }
        }
        _ => f64::NEG_INFINITY,
    };
    let mut x = start;
    let mut eval = evaluate(&params(&x).expect("start is valid"), data, q, exec);
    let mut damping = 0.0f64;
    for step in 0..MAX_POLISH_STEPS {
        let g = eval.score;
        if g.amax() < tol {
            return Polished {
                x,
                eval,
                steps: step,
                converged: true,
            };
        }
        if !g.iter().all(|v| v.is_finite()) {
            break;
        }
        let neg_h = -eval.hessian;
        let diag = Matrix3::from_diagonal(&neg_h.diagonal().map(|v| v.abs().max(1e-12)));
        let mut lam = damping;
        let mut accepted = None;
        for _ in 0..40 {
            if let Some(chol) = (neg_h + diag * lam).cholesky() {
                let dir = chol.solve(&g);
                let slope = g.dot(&dir);
                let mut t = 1.0;
                while t > 1e-12 {
                    let cand = x + dir * t;
                    let v = value_at(&cand);
                    if v >= eval.value + ARMIJO * t * slope {
                        accepted = Some(cand);
                        break;
                    }
                    t *= 0.5;
                }
                if accepted.is_some() {
                    break;
                }
            }
            lam = if lam == 0.0 { 1e-4 } else { lam * 10.0 };
        }
        match accepted {
            Some(cand) => {
                x = cand;
                eval = evaluate(&params(&x).expect("accepted point is valid"), data, q, exec);
                damping = lam * 0.1;
                if damping < 1e-8 {
                    damping = 0.0;
                }
            }
            None => {
                return Polished {
                    x,
                    eval,
                    steps: step,
                    converged: eval.score.amax() < tol,
                };
            }
        }
    }
    let converged = eval.score.amax() < tol;
    Polished {
        x,
        eval,
        steps: MAX_POLISH_STEPS,
        converged,
    }
}

/// Log-moment Weibull estimate with `δ = 0`, the second polish start.
fn weibull_start(x: &[f64], bounds: &[(f64, f64)]) -> Option<Vector3<f64>> {
    let n = x.len() as f64;
    let mean = x.iter().map(|v| v.ln()).sum::<f64>() / n;
    let var = x.iter().map(|v| (v.ln() - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if !(var > 0.0) {
        return None;
    }
    let alpha = std::f64::consts::PI / (6.0 * var).sqrt();
    let beta = (mean + crate::specfun::EULER_GAMMA / alpha).exp();
    let w = Vector3::new(alpha, beta, 0.0);
    let w = Vector3::from_fn(|i, _| w[i].clamp(bounds[i].0, bounds[i].1));
    (in_bounds(&w, bounds) && params(&w).is_some()).then_some(w)
}

/// Fits BWeibull by maximizing `ℓ` (`q = 1`) or `ℓ_q`.
pub fn fit(data: &Dataset, q: f64, config: &HarmonyConfig) -> Result<FitResult> {
    fit_with(data, q, config, Exec::default())
}

pub fn fit_with(data: &Dataset, q: f64, config: &HarmonyConfig, exec: Exec) -> Result<FitResult> {
    if !q.is_finite() {
        return Err(Error::InvalidParameters(format!("q = {q} must be finite")));
    }
    if config.bounds.len() != 3 {
        return Err(Error::InvalidParameters(format!(
            "expected 3 bounds, got {}",
            config.bounds.len()
        )));
    }
    if config.bounds[0].0 <= 0.0 || config.bounds[1].0 <= 0.0 {
        return Err(Error::InvalidParameters(
            "lower bounds of alpha and beta must be positive".into(),
        ));
    }
    let x = data.values();
    let objective = |p: &[f64]| match ParamVector::new(p[0], p[1], p[2]) {
        Ok(t) => logq_likelihood_with(&t, x, q, exec),
        Err(_) => f64::NEG_INFINITY,
    };
    let hs = harmony_search(objective, config)?;
    let start = Vector3::new(hs.best[0], hs.best[1], hs.best[2]);
    let mut p = polish(start, x, q, &config.bounds, exec);
    if let Some(w) = weibull_start(x, &config.bounds) {
        let alt = polish(w, x, q, &config.bounds, exec);
        if alt.eval.value > p.eval.value {
            p = alt;
        }
    }
    let theta_hat = params(&p.x).expect("polished point is valid");
    let at_boundary = p.x.iter().zip(&config.bounds).any(|(v, &(lo, hi))| {
        let eps = BOUNDARY_FRACTION * (hi - lo);
        *v - lo <= eps || hi - *v <= eps
    });

    let d = BWeibull::from_params(theta_hat);
    let (fisher, method) = match fisher_information(&d) {
        Ok(f) if f.iter().all(|v| v.is_finite()) => (Some(f), FisherMethod::Analytic),
        _ => match q_fisher_information(&d, 1.0) {
            Ok(f) => (Some(f), FisherMethod::Quadrature),
            Err(_) => (None, FisherMethod::Quadrature),
        },
    };
    let n = data.n();
    let (se, fisher_method, condition_number) = match fisher {
        Some(f) => {
            let s = standard_errors(&f, n, method);
            (
                s.values.map(|v| v.is_finite().then_some(v)),
                s.method,
                Some(s.condition_number).filter(|c| c.is_finite()),
            )
        }
        None => ([None; 3], method, None),
    };
    let root_n = (n as f64).sqrt();
    Ok(FitResult {
        theta_hat,
        standard_errors: se,
        paper_scale_standard_errors: se.map(|v| v.map(|s| s / root_n)),
        q,
        objective_value: p.eval.value,
        log_likelihood: log_likelihood_with(&theta_hat, x, exec),
        n,
        iterations: hs.trace.len(),
        polish_steps: p.steps,
        score_norm: p.eval.score.amax(),
        fisher: fisher.map(|f| {
            [
                [f[(0, 0)], f[(0, 1)], f[(0, 2)]],
                [f[(1, 0)], f[(1, 1)], f[(1, 2)]],
                [f[(2, 0)], f[(2, 1)], f[(2, 2)]],
            ]
        }),
        fisher_method,
        condition_number,
        polish_failed: !p.converged && !at_boundary,
        at_boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QCandidate {
    pub q: f64,
    pub fit: FitResult,
    pub gof: GofResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QSelection {
    /// Index into `candidates` of the chosen fit.
    pub selected: usize,
    pub candidates: Vec<QCandidate>,
}

impl QSelection {
    pub fn best(&self) -> &QCandidate {
        &self.candidates[self.selected]
    }
}

/// Fits every `q` in `grid` and keeps the one with the largest KS p-value,
/// breaking ties by CVM p-value and then by closeness of `q` to 1.
pub fn select_q(
    data: &Dataset,
    grid: &[f64],
    config: &HarmonyConfig,
    convention: Convention,
    exec: Exec,
) -> Result<QSelection> {
    if grid.is_empty() {
        return Err(Error::InvalidParameters("q grid is empty".into()));
    }
    if let Some(q) = grid.iter().find(|&&q| !(q > 0.0 && q <= 1.0)) {
        return Err(Error::InvalidParameters(format!("q = {q} outside (0, 1]")));
    }
    let results = exec.map(grid, |&q| -> Result<QCandidate> {
        let fit = fit_with(data, q, config, Exec::Sequential)?;
        let d = fit.distribution();
        let g = gof(data.values(), |x| d.cdf(x).unwrap_or(f64::NAN), convention)?;
        Ok(QCandidate { q, fit, gof: g })
    });
    let mut candidates = Vec::with_capacity(results.len());
    let mut last_error = None;
    for r in results {
        match r {
            Ok(c) => candidates.push(c),
            Err(e) => last_error = Some(e),
        }
    }
    if candidates.is_empty() {
        return Err(last_error.unwrap_or_else(|| Error::Optimizer("no q could be fitted".into())));
    }
    let selected = (0..candidates.len())
        .max_by(|&a, &b| {
            let (ca, cb) = (&candidates[a], &candidates[b]);
            ca.gof
                .ks_pvalue
                .total_cmp(&cb.gof.ks_pvalue)
                .then(ca.gof.cvm_pvalue.total_cmp(&cb.gof.cvm_pvalue))
                .then((cb.q - 1.0).abs().total_cmp(&(ca.q - 1.0).abs()))
        })
        .expect("candidates is nonempty");
    Ok(QSelection { selected, candidates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::bundled;

    #[test]
    fn carbon_fibers_mle_reaches_published_optimum() {
        let data = bundled("carbon_fibers").unwrap();
        let cfg = HarmonyConfig::default().seed(42);
        let f = fit(&data, 1.0, &cfg).unwrap();
        let published = ParamVector::new(3.6961, 2.7482, 2.3073).unwrap();
        let l_pub = log_likelihood_with(&published, data.values(), Exec::Sequential);
        assert!(f.log_likelihood >= l_pub - 1e-3, "{} vs {l_pub}", f.log_likelihood);
        assert!(!f.polish_failed && !f.at_boundary);
        assert!(f.score_norm < SCORE_TOL * 50.0);
    }

    #[test]
    fn degenerate_data_does_not_crash() {
        let data = Dataset::new(vec![2.0; 10], "flat").unwrap();
        let mut cfg = HarmonyConfig::default().seed(1);
        cfg.max_iterations = 500;
        let f = fit(&data, 1.0, &cfg).unwrap();
        assert!(f.polish_failed || f.at_boundary);
    }

    #[test]
    fn single_q_grid() {
        let data = Dataset::new(BWeibull::new(2.0, 2.0, 0.0).unwrap().sample(5, 60), "w").unwrap();
        let mut cfg = HarmonyConfig::default().seed(3);
        cfg.max_iterations = 2000;
        let s = select_q(&data, &[0.9], &cfg, Convention::Standard, Exec::default()).unwrap();
        assert_eq!(s.candidates.len(), 1);
        assert_eq!(s.best().q, 0.9);
        assert!(select_q(&data, &[], &cfg, Convention::Standard, Exec::default()).is_err());
        assert!(select_q(&data, &[1.2], &cfg, Convention::Standard, Exec::default()).is_err());
    }
}
