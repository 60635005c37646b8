//! Adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! Finite intervals are bisected greedily on the sub-interval with the
//! largest error estimate. The half line `(0, ∞)` is handled by the change
//! of variables `x = scale · e^s`, `s = t / (1 − t²)`, which maps it onto
//! `(−1, 1)` and keeps both the origin and the tail resolvable.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const MAX_INTERVALS: usize = 4000;

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    /// Turns a non-converged result into [`Error::Quadrature`].
    pub fn into_result(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Quadrature {
                value: self.value,
                abs_error: self.abs_error,
            })
        }
    }
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = 0.0;
    let mut kron = WGK[10] * fc;
    for (j, (&x, &w)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += w * pair;
        // Gauss nodes sit at the odd Kronrod indices.
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Segment { a, b, value, error }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> QuadResult {
    let mut segments: Vec<Segment> = breaks.windows(2).map(|w| kronrod(f, w[0], w[1])).collect();
    let mut evaluations = 21 * segments.len();
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let tol = abs_tol.max(rel_tol * value.abs());
        if !value.is_finite() || !error.is_finite() {
            return QuadResult {
                value,
                abs_error: error,
                evaluations,
                converged: false,
            };
        }
        if error <= tol {
            return QuadResult {
                value,
                abs_error: error,
                evaluations,
                converged: true,
            };
        }
        if segments.len() >= MAX_INTERVALS {
            return QuadResult {
                value,
                abs_error: error,
                evaluations,
                converged: false,
            };
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // Interval can no longer be split in floating point.
            return QuadResult {
                value,
                abs_error: error,
                evaluations,
                converged: false,
            };
        }
        segments.push(kronrod(f, s.a, mid));
        segments.push(kronrod(f, mid, s.b));
        evaluations += 42;
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("integrate", "interval bounds must be finite"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let r = adapt(&f, &[lo, hi], abs_tol, rel_tol);
    Ok(QuadResult {
        value: sign * r.value,
        ..r
    })
}

/// Integrates `f` over `(0, ∞)`; `scale` should sit near the bulk of the mass.
///
/// `f` must tend to zero fast enough that `x f(x)` is integrable in `log x`
/// at both ends. Evaluations at `x = 0` or `x = ∞` are never requested.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, scale: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::domain(
            "integrate_half_line",
            format!("scale = {scale} must be positive"),
        ));
    }
    let g = |t: f64| {
        let one_minus = 1.0 - t * t;
        let s = t / one_minus;
        let x = scale * s.exp();
        if x == 0.0 || !x.is_finite() {
            return 0.0;
        }
        let jac = x * (1.0 + t * t) / (one_minus * one_minus);
        if !jac.is_finite() {
            return 0.0;
        }
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * jac
        }
    };
    let breaks: Vec<f64> = (0..=16).map(|i| -1.0 + i as f64 / 8.0).collect();
    Ok(adapt(&g, &breaks, abs_tol, rel_tol))
}

/// Integrates `f` over `[a, ∞)` for `a ≥ 0` by shifting onto the half line.
pub fn integrate_from<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::domain(
            "integrate_from",
            format!("lower limit {a} must be finite and nonnegative"),
        ));
    }
    integrate_half_line(|y| f(a + y), scale, abs_tol, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_panel_is_exact_for_polynomials_up_to_degree_31() {
        for k in 0..=31 {
            let seg = kronrod(&|x: f64| x.powi(k), 0.0, 1.0);
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((seg.value - exact).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let fwd = integrate(f64::sin, 0.0, 2.0, 1e-13, 1e-13).unwrap().value;
        let back = integrate(f64::sin, 2.0, 0.0, 1e-13, 1e-13).unwrap().value;
        assert!((fwd + back).abs() < 1e-15);
        assert!((fwd - (1.0 - 2f64.cos())).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn half_line_gamma_integrals() {
        for (s, exact) in [(1.0, 1.0), (3.0, 2.0), (0.5, std::f64::consts::PI.sqrt())] {
            let r = integrate_half_line(|x: f64| x.powf(s - 1.0) * (-x).exp(), 1.0, 1e-13, 1e-13).unwrap();
            assert!(r.converged, "s = {s}");
            assert!((r.value - exact).abs() < 1e-11, "s = {s}: {}", r.value);
        }
    }

    #[test]
    fn tail_integral() {
        let r = integrate_from(|x: f64| (-x).exp(), 3.0, 1.0, 1e-15, 1e-13).unwrap();
        assert!((r.value - (-3f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn non_convergence_is_reported() {
        let r = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!(!r.converged);
        assert!(r.into_result().is_err());
    }
}
