//! Independent numerical oracles for checking the `bweibull` library, and the
//! acceptance run in `tests/acceptance.rs`.

use std::f64::consts::FRAC_PI_2;

use bweibull::BWeibull;

/// Parameter grid: α ∈ {0.5, 1, 2, 3.7}, β ∈ {0.5, 2}, δ ∈ {−2, 0, 0.2, 2.3}.
pub fn theta_grid() -> Vec<BWeibull> {
    let mut out = Vec::new();
    for a in [0.5, 1.0, 2.0, 3.7] {
        for b in [0.5, 2.0] {
            for d in [-2.0, 0.0, 0.2, 2.3] {
                out.push(BWeibull::new(a, b, d).unwrap());
            }
        }
    }
    out
}

/// Exp-sinh rule for `∫₀^∞ g(t) dt`, halving the step until two levels agree.
pub fn exp_sinh<F: Fn(f64) -> f64>(g: F) -> f64 {
    let node = |s: f64| {
        let t = (FRAC_PI_2 * s.sinh()).exp();
        let w = t * FRAC_PI_2 * s.cosh();
        if t == 0.0 || !t.is_finite() {
            return 0.0;
        }
        g(t) * w
    };
    let span = 5.0;
    let mut h = 0.5;
    let mut sum: f64 = {
        let n = (span / h) as i64;
        (-n..=n).map(|k| node(k as f64 * h)).sum()
    };
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let n = (span / h) as i64;
        sum += (-n..=n).filter(|k| k % 2 != 0).map(|k| node(k as f64 * h)).sum::<f64>();
        let cur = sum * h;
        if (cur - prev).abs() <= 1e-14 * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Shape of the density in `u = (x/β)^α`: `f(x) dx = G(x(u)) e^{−u} du / Z`.
pub struct USpace {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub z: f64,
}

impl USpace {
    pub fn new(d: &BWeibull) -> Self {
        let (alpha, beta, delta) = (d.alpha(), d.beta(), d.delta());
        let mut s = USpace {
            alpha,
            beta,
            delta,
            z: 1.0,
        };
        s.z = s.integrate_from(0.0, |_| 1.0);
        s
    }

    pub fn x(&self, u: f64) -> f64 {
        self.beta * u.powf(1.0 / self.alpha)
    }

    fn weight(&self, u: f64) -> f64 {
        if u > 800.0 {
            return 0.0;
        }
        let w = 1.0 - self.delta * self.x(u);
        (1.0 + w * w) * (-u).exp() / self.z
    }

    /// `E[g(X) · 1{X ≥ β u0^{1/α}}]`.
    pub fn integrate_from<F: Fn(f64) -> f64>(&self, u0: f64, g: F) -> f64 {
        exp_sinh(|v| {
            let u = u0 + v;
            let w = self.weight(u);
            if w == 0.0 {
                0.0
            } else {
                g(self.x(u)) * w
            }
        })
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.integrate_from(0.0, g)
    }

    pub fn u_of(&self, x: f64) -> f64 {
        (x / self.beta).powf(self.alpha)
    }

    /// Log density written out from its definition.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let w = 1.0 - self.delta * x;
        (self.alpha / (self.beta * self.z)).ln() + (1.0 + w * w).ln() + (self.alpha - 1.0) * (x / self.beta).ln()
            - self.u_of(x)
    }
}

/// `|a − b| ≤ tol · max(1, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
