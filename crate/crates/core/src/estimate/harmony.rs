//! Canonical Harmony Search for bounded maximization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resampling budget per memory slot when the objective is infeasible.
const INIT_ATTEMPTS_PER_SLOT: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonyConfig {
    pub memory_size: usize,
    pub memory_consider_rate: f64,
    pub pitch_adjust_rate: f64,
    /// Pitch-adjust half-width as a fraction of each parameter's range.
    pub bandwidth: f64,
    pub max_iterations: usize,
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
}

impl HarmonyConfig {
    /// Default bounds `α, β ∈ [1e-3, 15]`, `δ ∈ [−15, 15]`.
    pub const DEFAULT_BOUNDS: [(f64, f64); 3] = [(1e-3, 15.0), (1e-3, 15.0), (-15.0, 15.0)];

    pub fn with_bounds(bounds: Vec<(f64, f64)>) -> Self {
        HarmonyConfig {
            memory_size: 30,
            memory_consider_rate: 0.95,
            pitch_adjust_rate: 0.3,
            bandwidth: 0.05,
            max_iterations: 10_000,
            bounds,
            seed: 0,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameters(m));
        if self.memory_size == 0 {
            return bad("memory_size must be positive".into());
        }
        for (name, r) in [
            ("memory_consider_rate", self.memory_consider_rate),
            ("pitch_adjust_rate", self.pitch_adjust_rate),
        ] {
            if !(r > 0.0 && r < 1.0) {
                return bad(format!("{name} = {r} must lie in (0, 1)"));
            }
        }
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return bad(format!("bandwidth = {} must be positive", self.bandwidth));
        }
        if self.bounds.is_empty() {
            return bad("at least one bound is required".into());
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return bad(format!("bound {i}: need finite low < high, got ({lo}, {hi})"));
            }
        }
        Ok(())
    }
}

impl Default for HarmonyConfig {
    fn default() -> Self {
        Self::with_bounds(Self::DEFAULT_BOUNDS.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonyOutcome {
    pub best: Vec<f64>,
    pub value: f64,
    /// Best-so-far objective after each iteration.
    pub trace: Vec<f64>,
}

/// Maximizes `objective` over the box in `config`. Non-finite objective
/// values count as `−∞`.
pub fn harmony_search<F: Fn(&[f64]) -> f64>(objective: F, config: &HarmonyConfig) -> Result<HarmonyOutcome> {
    config.validate()?;
    let dim = config.bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let eval = |x: &[f64]| {
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };
    let uniform = |rng: &mut ChaCha8Rng, i: usize| {
        let (lo, hi) = config.bounds[i];
        rng.random_range(lo..hi)
    };

    let mut memory: Vec<Vec<f64>> = Vec::with_capacity(config.memory_size);
    let mut values = Vec::with_capacity(config.memory_size);
    let mut attempts = 0;
    while memory.len() < config.memory_size {
        let x: Vec<f64> = (0..dim).map(|i| uniform(&mut rng, i)).collect();
        let v = eval(&x);
        attempts += 1;
        if v.is_finite() || attempts >= INIT_ATTEMPTS_PER_SLOT * config.memory_size {
            memory.push(x);
            values.push(v);
        }
    }
    if values.iter().all(|v| !v.is_finite()) {
        return Err(Error::Optimizer(format!(
            "objective was non-finite at all {attempts} initial points in bounds {:?}",
            config.bounds
        )));
    }

    let best_of = |values: &[f64]| {
        values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &v)| (i, v))
            .expect("memory is nonempty")
    };
    let mut trace = Vec::with_capacity(config.max_iterations);
    let mut candidate = vec![0.0; dim];
    for _ in 0..config.max_iterations {
        for (i, c) in candidate.iter_mut().enumerate() {
            let (lo, hi) = config.bounds[i];
            *c = if rng.random::<f64>() < config.memory_consider_rate {
                let mut v = memory[rng.random_range(0..memory.len())][i];
                if rng.random::<f64>() < config.pitch_adjust_rate {
                    v += config.bandwidth * (hi - lo) * rng.random_range(-1.0..1.0);
                    v = v.clamp(lo, hi);
                }
                v
            } else {
                uniform(&mut rng, i)
            };
        }
        let v = eval(&candidate);
        let (worst, worst_value) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &v)| (i, v))
            .expect("memory is nonempty");
        if v > worst_value {
            memory[worst].copy_from_slice(&candidate);
            values[worst] = v;
        }
        trace.push(best_of(&values).1);
    }
    let (b, value) = best_of(&values);
    Ok(HarmonyOutcome {
        best: memory[b].clone(),
        value,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let mut cfg = HarmonyConfig::with_bounds(vec![(0.0, 10.0)]).seed(1);
        cfg.max_iterations = 2000;
        let out = harmony_search(|x| -(x[0] - 3.0).powi(2), &cfg).unwrap();
        assert!((out.best[0] - 3.0).abs() < 1e-2, "{:?}", out.best);
    }

    #[test]
    fn sphere_is_seed_stable() {
        for seed in [1, 2, 3] {
            let mut cfg = HarmonyConfig::with_bounds(vec![(-5.0, 5.0); 3]).seed(seed);
            cfg.max_iterations = 5000;
            let f = |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>();
            let a = harmony_search(f, &cfg).unwrap();
            assert!(-a.value <= 1e-3, "seed {seed}: {}", -a.value);
            let b = harmony_search(f, &cfg).unwrap();
            assert_eq!(a, b);
            assert!(a.trace.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn infeasible_everywhere() {
        let cfg = HarmonyConfig::with_bounds(vec![(0.0, 1.0)]);
        assert!(matches!(harmony_search(|_| f64::NAN, &cfg), Err(Error::Optimizer(_))));
    }

    #[test]
    fn invalid_config() {
        let mut cfg = HarmonyConfig::default();
        cfg.bounds[0] = (2.0, 1.0);
        assert!(cfg.validate().is_err());
        let cfg = HarmonyConfig {
            memory_consider_rate: 1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
