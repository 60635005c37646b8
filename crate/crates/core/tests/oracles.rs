#[path = "../../validation/src/lib.rs"]
#[allow(dead_code)]
mod common;

use bweibull::dataset::{bundled, Dataset};
use bweibull::entropy::{quadratic, quadratic_closed_form, shannon, tsallis, tsallis_series};
use bweibull::estimate::{
    derive_seed, fisher_information, fit, log_likelihood, logq_likelihood, q_fisher_information, select_q,
    HarmonyConfig, DEFAULT_Q_GRID,
};
use bweibull::gof::ks_test;
use bweibull::modality::{classify, quartic_discriminant, Classification};
use bweibull::specfun::{gamma, gamma_regularized_lower, EULER_GAMMA};
use bweibull::{BWeibull, Convention, Error, Exec, ParamVector};
use common::{exp_sinh, USpace};
use nalgebra::{DMatrix, Matrix3};

fn bw(a: f64, b: f64, d: f64) -> BWeibull {
    BWeibull::new(a, b, d).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn regularized_gamma_against_quadrature() {
    let (s, x): (f64, f64) = (2.5, 3.1);
    // ∫₀^x t^{s−1} e^{−t} dt with t = x·v²
    let n = 20_000;
    let h = 1.0 / n as f64;
    let integrand = |v: f64| 2.0 * x.powf(s) * v.powf(2.0 * s - 1.0) * (-x * v * v).exp();
    let mut simpson = integrand(0.0) + integrand(1.0);
    for i in 1..n {
        simpson += integrand(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let want = simpson * h / 3.0 / gamma(s).unwrap();
    assert!(rel(gamma_regularized_lower(s, x).unwrap(), want) < 1e-12);
}

#[test]
fn pdf_from_its_definition() {
    let d = bw(2.0, 1.0, 0.5);
    let z = 2.0 - 2.0 * 0.5 * gamma(1.5).unwrap() + 0.25 * gamma(2.0).unwrap();
    let g = 1.0 + (1.0 - 0.5f64).powi(2);
    let want = 2.0 / z * g * (-1.0f64).exp();
    assert!(rel(d.pdf(1.0).unwrap(), want) < 1e-14);
}

#[test]
fn cdf_mrl_quantile_against_oracles() {
    let d = bw(2.0, 2.0, 1.0);
    let o = USpace::new(&d);
    let t = 1.5;
    let cdf = 1.0 - o.integrate_from(o.u_of(t), |_| 1.0);
    assert!((d.cdf(t).unwrap() - cdf).abs() < 1e-9);

    for t in [0.3, 1.5, 4.0] {
        let ut = o.u_of(t);
        let surv = o.integrate_from(ut, |_| 1.0);
        let want = o.integrate_from(ut, |x| x - t) / surv;
        assert!(rel(d.mrl(t).unwrap(), want) < 1e-8, "t = {t}");
    }

    let (mut lo, mut hi) = (0.0, 20.0);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if d.cdf(m).unwrap() < 0.5 {
            lo = m;
        } else {
            hi = m;
        }
    }
    assert!((d.quantile(0.5).unwrap() - 0.5 * (lo + hi)).abs() < 1e-12);
}

#[test]
fn moments_and_mgf_against_quadrature() {
    let d = bw(2.0, 2.0, 0.8);
    let o = USpace::new(&d);
    assert!(rel(d.raw_moment(3.0).unwrap(), o.expect(|x| x.powi(3))) < 1e-8);

    let d = bw(2.0, 1.0, 0.5);
    let o = USpace::new(&d);
    assert!(rel(d.mgf(0.3).unwrap(), o.expect(|x| (0.3 * x).exp())) < 1e-8);

    let d = bw(1.5, 2.0, 0.7);
    let o = USpace::new(&d);
    let a = 1.5;
    assert!((d.expected_log() - o.expect(f64::ln)).abs() < 1e-7);
    assert!((d.e_xalpha() - o.expect(|x| x.powf(a))).abs() < 1e-7);
    assert!((d.e_xalpha_log() - o.expect(|x| x.powf(a) * x.ln())).abs() < 1e-7);
    assert!((d.e_xalpha_log2() - o.expect(|x| x.powf(a) * x.ln().powi(2))).abs() < 1e-7);
}

#[test]
fn weibull_sample_passes_ks() {
    let d = bw(2.0, 2.0, 0.0);
    let x = d.sample(3, 10_000);
    let weibull = |v: f64| -(-(v / 2.0).powi(2)).exp_m1();
    let (stat, _) = ks_test(&x, weibull, Convention::Standard).unwrap();
    // 5% critical value of the one-sample statistic, 1.358/√n
    assert!(stat < 1.358 / 100.0, "D = {stat}");
}

#[test]
fn critical_points_zero_the_derivative() {
    for (a, b, dl) in [
        (3.0, 2.0, 2.3),
        (2.0, 2.0, 0.7),
        (1.3, 1.0, 3.0),
        (0.8, 1.0, 2.0),
        (2.0, 1.0, 1.41),
    ] {
        let d = bw(a, b, dl);
        for p in classify(d.params()).critical_points {
            let h = 1e-6 * p.x;
            let slope = (d.pdf(p.x + h).unwrap() - d.pdf(p.x - h).unwrap()) / (2.0 * h);
            assert!(
                slope.abs() < 1e-7 * d.pdf(p.x).unwrap().max(1.0),
                "θ = ({a}, {b}, {dl}), x* = {}",
                p.x
            );
        }
    }
}

#[test]
fn discriminant_equals_resultant() {
    let (disc, q) = quartic_discriminant(2.0, 0.56);
    let p = [q.a, q.b, q.c, q.d, q.e];
    let dp = [4.0 * q.a, 3.0 * q.b, 2.0 * q.c, q.d];
    let mut s = DMatrix::<f64>::zeros(7, 7);
    for r in 0..3 {
        for (j, c) in p.iter().enumerate() {
            s[(r, r + j)] = *c;
        }
    }
    for r in 0..4 {
        for (j, c) in dp.iter().enumerate() {
            s[(3 + r, r + j)] = *c;
        }
    }
    let via_resultant = s.determinant() / q.a;
    assert!(rel(disc, via_resultant) < 1e-6, "{disc} vs {via_resultant}");
}

fn dense_maxima(d: &BWeibull, lo: f64, hi: f64, n: usize) -> usize {
    let ys: Vec<f64> = (0..=n)
        .map(|i| d.ln_pdf(lo + (hi - lo) * i as f64 / n as f64).unwrap())
        .collect();
    (1..n).filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1]).count()
}

#[test]
fn dense_scan_agrees_with_classification() {
    let d = bw(3.0, 2.0, 2.3);
    let lo = d.quantile(1e-9).unwrap();
    let hi = d.quantile(1.0 - 1e-9).unwrap();
    let expected = match classify(d.params()).classification {
        Classification::Bimodal => 2,
        _ => 1,
    };
    assert_eq!(dense_maxima(&d, lo, hi, 1_000_000), expected);

    let d = bw(2.0, 2.0, 1.2);
    let want = classify(d.params()).maxima().count();
    assert_eq!(dense_maxima(&d, 0.01, 6.0, 600), want);
}

#[test]
fn weibull_tsallis_two() {
    for (a, b) in [(2.0, 2.0), (0.8, 1.5), (3.7, 0.5)] {
        let d = bw(a, b, 0.0);
        let o = USpace::new(&d);
        let want = 1.0 - o.expect(|x| o.ln_pdf(x).exp());
        let closed = 1.0 - (a / b) * 2f64.powf(1.0 / a - 2.0) * gamma(2.0 - 1.0 / a).unwrap();
        assert!((tsallis(&d, 2.0).unwrap().value - want).abs() < 1e-9);
        assert!((closed - want).abs() < 1e-9);
    }
}

#[test]
fn tsallis_series_with_fractional_order_and_negative_delta() {
    // (1 − δx)² ≥ 1 for δ < 0, so the binomial expansion of G^q diverges.
    let d = bw(2.0, 1.0, -0.5);
    let err = tsallis_series(&d, 1.5).unwrap_err();
    assert!(matches!(err, Error::SeriesDivergence { .. }), "{err:?}");
    let o = USpace::new(&d);
    let want = (1.0 - o.expect(|x| (0.5 * o.ln_pdf(x)).exp())) / 0.5;
    assert!((tsallis(&d, 1.5).unwrap().value - want).abs() < 1e-9);
}

#[test]
fn quadratic_and_shannon_against_quadrature() {
    let d = bw(2.0, 2.0, 1.0);
    let o = USpace::new(&d);
    let h2 = -o.expect(|x| o.ln_pdf(x).exp()).ln();
    assert!((quadratic_closed_form(&d).unwrap().value - h2).abs() < 1e-8);
    assert!((quadratic(&d).unwrap().value - h2).abs() < 1e-8);

    for (a, b) in [(0.7, 1.3), (2.0, 2.0), (4.0, 0.5)] {
        let d = bw(a, b, 0.0);
        let closed = EULER_GAMMA * (1.0 - 1.0 / a) + (b / a).ln() + 1.0;
        assert!((shannon(&d).unwrap().value - closed).abs() < 1e-9);
    }

    let d = bw(2.0, 2.0, 0.9);
    let o = USpace::new(&d);
    let direct = o.expect(|x| -o.ln_pdf(x));
    assert!((shannon(&d).unwrap().value - direct).abs() < 1e-7);
}

#[test]
fn likelihoods_by_direct_summation() {
    let d = bw(2.2, 1.7, 0.6);
    let x = d.sample(5, 50);
    let direct: f64 = x.iter().map(|v| d.ln_pdf(*v).unwrap()).sum();
    assert!((log_likelihood(d.params(), &x) - direct).abs() < 1e-10 * direct.abs());

    let x = &x[..20];
    let direct: f64 = x.iter().map(|v| (d.pdf(*v).unwrap().powf(0.2) - 1.0) / 0.2).sum();
    assert!((logq_likelihood(d.params(), x, 0.8) - direct).abs() < 1e-10 * direct.abs().max(1.0));
}

#[test]
fn weibull_fisher_block() {
    let pi2 = std::f64::consts::PI.powi(2);
    for (a, b) in [(2.0, 2.0), (0.8, 1.5), (3.7, 0.5)] {
        let f = fisher_information(&bw(a, b, 0.0)).unwrap();
        let aa = ((1.0 - EULER_GAMMA).powi(2) + pi2 / 6.0) / (a * a);
        let ab = -(1.0 - EULER_GAMMA) / b;
        let bb = (a / b).powi(2);
        assert!(rel(f[(0, 0)], aa) < 1e-9);
        assert!(rel(f[(0, 1)], ab) < 1e-9);
        assert!(rel(f[(1, 1)], bb) < 1e-9);
    }
}

/// `E[s sᵀ]` with the score from finite differences of the log-density,
/// normalizers recomputed by the oracle at every shifted θ.
fn fisher_oracle(theta: [f64; 3]) -> Matrix3<f64> {
    let h = 1e-5;
    let shifted: Vec<(USpace, USpace)> = (0..3)
        .map(|i| {
            let mut p = theta;
            let mut m = theta;
            p[i] += h;
            m[i] -= h;
            (USpace::new(&bw(p[0], p[1], p[2])), USpace::new(&bw(m[0], m[1], m[2])))
        })
        .collect();
    let base = USpace::new(&bw(theta[0], theta[1], theta[2]));
    let score = |x: f64| {
        let mut s = [0.0; 3];
        for (i, (p, m)) in shifted.iter().enumerate() {
            s[i] = (p.ln_pdf(x) - m.ln_pdf(x)) / (2.0 * h);
        }
        s
    };
    Matrix3::from_fn(|i, j| {
        base.expect(|x| {
            let s = score(x);
            s[i] * s[j]
        })
    })
}

#[test]
fn fisher_against_score_outer_product() {
    for theta in [[2.0, 2.0, 0.5], [3.6961, 2.7482, 2.3073], [1.2, 0.8, -1.0]] {
        let d = bw(theta[0], theta[1], theta[2]);
        let f = fisher_information(&d).unwrap();
        let o = fisher_oracle(theta);
        assert!((f - o).amax() < 1e-6 * f.amax(), "θ = {theta:?}\n{f}\n{o}");
        let fq = q_fisher_information(&d, 1.0).unwrap();
        assert!((fq - f).amax() < 1e-6 * f.amax());
    }
}

#[test]
fn oracle_integrator_is_exact_on_known_integrals() {
    assert!((exp_sinh(|t| (-t).exp()) - 1.0).abs() < 1e-14);
    assert!((exp_sinh(|t| t.powf(-0.5) * (-t).exp()) - std::f64::consts::PI.sqrt()).abs() < 1e-13);
}

#[test]
fn mlqe_near_one_matches_mle() {
    let data = bundled("carbon_fibers").unwrap();
    let config = HarmonyConfig::default().seed(9);
    let a = fit(&data, 1.0, &config).unwrap();
    let b = fit(&data, 1.0 - 1e-6, &config).unwrap();
    for (x, y) in a.theta_hat.to_array().iter().zip(b.theta_hat.to_array()) {
        assert!((x - y).abs() < 1e-3, "{x} vs {y}");
    }
}

#[test]
fn sample_then_fit_recovers_truth() {
    let truth = [3.6961, 2.7482, 2.3073];
    let d = bw(truth[0], truth[1], truth[2]);
    let data = Dataset::new(d.sample(21, 1000), "synthetic").unwrap();
    let f = fit(&data, 1.0, &HarmonyConfig::default().seed(22)).unwrap();
    for (j, t) in truth.iter().enumerate() {
        let se = f.standard_errors[j].unwrap();
        assert!(
            (f.theta_hat.to_array()[j] - t).abs() < 4.0 * se,
            "parameter {j}: {:?} ± {se}",
            f.theta_hat
        );
    }
}

#[test]
fn contaminated_samples_prefer_q_below_one() {
    let base = bw(2.0, 2.0, 0.0);
    let reps = 50;
    let picks = Exec::Parallel.map_range(reps, |i| {
        let mut x = base.sample(derive_seed(31, i as u64), 190);
        x.extend(base.sample(derive_seed(32, i as u64), 10).iter().map(|v| v + 6.0));
        let data = Dataset::new(x, "contaminated").unwrap();
        let config = HarmonyConfig {
            max_iterations: 3000,
            ..HarmonyConfig::default()
        }
        .seed(derive_seed(33, i as u64));
        let sel = select_q(&data, &DEFAULT_Q_GRID, &config, Convention::Standard, Exec::Sequential).unwrap();
        sel.best().q
    });
    let below = picks.iter().filter(|&&q| q < 1.0).count();
    assert!(below * 2 > reps, "q < 1 selected in {below} of {reps}: {picks:?}");
}

#[test]
fn fitted_theta_is_a_valid_parameter() {
    let data = bundled("wheaton_river").unwrap();
    let f = fit(&data, 0.99, &HarmonyConfig::default().seed(42)).unwrap();
    assert!(ParamVector::from_array(f.theta_hat.to_array()).is_ok());
    assert!(
        f.objective_value
            >= logq_likelihood(&ParamVector::new(0.9770, 5.4536, 0.1910).unwrap(), data.values(), 0.99) - 1e-3
    );
}

#[test]
fn alpha_two_rule_matches_numeric_path() {
    let tangent = 1.9675820237276274;
    let mut k2s: Vec<f64> = [0.02, 0.1, 0.25, 0.4, 0.6, 0.75, 0.9, 0.98]
        .iter()
        .map(|t| tangent + (2.0 - tangent) * t)
        .collect();
    k2s.extend([
        tangent,
        2.0,
        0.05,
        0.3,
        1.0,
        13.0 / 12.0,
        4.0 / 3.0,
        1.9,
        1.96,
        2.05,
        3.0,
        8.0,
    ]);
    let mut bad = Vec::new();
    for b in [0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0] {
        for &k2 in &k2s {
            let theta = ParamVector::new(2.0, b, k2.sqrt() / b).unwrap();
            let (a, n) = (
                classify(&theta).classification,
                bweibull::modality::classify_numeric(&theta).classification,
            );
            if a != n {
                bad.push(format!("β={b} k²={k2}: {a:?} vs {n:?}"));
            }
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
}
