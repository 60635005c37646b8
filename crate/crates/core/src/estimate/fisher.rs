//! Fisher information and standard errors.
//!
//! Matrices here are per observation; `n` enters only in
//! [`standard_errors`].

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::likelihood::{z_derivatives, PointModel};
use crate::dist::BWeibull;
use crate::error::{Error, Result};
use crate::quad;

const ABS_TOL: f64 = 1e-13;
const REL_TOL: f64 = 1e-11;
/// Condition number above which the pseudo-inverse is used.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FisherMethod {
    Analytic,
    Quadrature,
    PseudoInverse,
}

/// Classical Fisher information `−E[∂² log f]` of one observation.
///
/// All entries are closed forms in `E[X^α]`, `E[X^α log X]` and
/// `E[X^α log² X]` except the `δδ` entry, whose rational expectation is
/// integrated numerically.
pub fn fisher_information(d: &BWeibull) -> Result<Matrix3<f64>> {
    let (a, b, dl) = (d.alpha(), d.beta(), d.delta());
    let zd = z_derivatives(a, b, dl);
    let z = zd.z;
    let ln_b = b.ln();
    let ba = b.powf(a);
    let (m, ml, mll) = (d.e_xalpha(), d.e_xalpha_log(), d.e_xalpha_log2());
    // U = (X/β)^α, L = log(X/β)
    let e_u = m / ba;
    let e_ul = (ml - ln_b * m) / ba;
    let e_ull = (mll - 2.0 * ln_b * ml + ln_b * ln_b * m) / ba;
    let e_gdd = d
        .expect_quad(
            |x| {
                let w = 1.0 - dl * x;
                let g = 1.0 + w * w;
                let gd = -2.0 * x * w / g;
                2.0 * x * x / g - gd * gd
            },
            ABS_TOL,
            REL_TOL,
        )?
        .into_result()?;
    let zz = |i: usize, j: usize| zd.hess[i][j] / z - zd.grad[i] * zd.grad[j] / (z * z);
    let faa = 1.0 / (a * a) + zz(0, 0) + e_ull;
    let fab = 1.0 / b + zz(0, 1) - (a * e_ul + e_u) / b;
    let fbb = -a / (b * b) + zz(1, 1) + a * (a + 1.0) * e_u / (b * b);
    let fad = zz(0, 2);
    let fbd = zz(1, 2);
    let fdd = zz(2, 2) - e_gdd;
    Ok(Matrix3::new(faa, fab, fad, fab, fbb, fbd, fad, fbd, fdd))
}

/// `∫ s(x) s(x)ᵀ f(x)^{2−q} dx` with `s = ∂ log f`, per observation.
/// At `q = 1` this is the classical information.
pub fn q_fisher_information(d: &BWeibull, q: f64) -> Result<Matrix3<f64>> {
    if !q.is_finite() {
        return Err(Error::domain("q_fisher_information", format!("q = {q} must be finite")));
    }
    let model = PointModel::new(d.params());
    let scale = d.beta() * crate::specfun::gamma_pos(1.0 + 1.0 / d.alpha());
    let mut out = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let r = quad::integrate_half_line(
                |x| {
                    let (ln_f, s, _) = model.derivatives(x);
                    let w = ((2.0 - q) * ln_f).exp();
                    if w == 0.0 {
                        0.0
                    } else {
                        s[i] * s[j] * w
                    }
                },
                scale,
                ABS_TOL,
                REL_TOL,
            )?;
            let v = r.into_result()?;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardErrors {
    pub values: [f64; 3],
    pub method: FisherMethod,
    pub condition_number: f64,
    /// Some diagonal entry of the inverse was negative or non-finite.
    pub flagged: bool,
}

/// Square roots of the diagonal of `(n·F)⁻¹`, with a pseudo-inverse when
/// the condition number exceeds [`MAX_CONDITION`].
pub fn standard_errors(fisher: &Matrix3<f64>, n: usize, method: FisherMethod) -> StandardErrors {
    let total = fisher * n as f64;
    let sym = (total + total.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let condition_number = if min > 0.0 { max / min } else { f64::INFINITY };
    let (inv, method) = if condition_number > MAX_CONDITION || !condition_number.is_finite() {
        let p = sym
            .pseudo_inverse(max * f64::EPSILON * 3.0)
            .unwrap_or_else(|_| Matrix3::from_element(f64::NAN));
        (p, FisherMethod::PseudoInverse)
    } else {
        (
            sym.try_inverse().unwrap_or_else(|| Matrix3::from_element(f64::NAN)),
            method,
        )
    };
    let mut flagged = false;
    let values = [0, 1, 2].map(|i| {
        let v = inv[(i, i)];
        if v >= 0.0 && v.is_finite() {
            v.sqrt()
        } else {
            flagged = true;
            f64::NAN
        }
    });
    StandardErrors {
        values,
        method,
        condition_number,
        flagged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_standard_errors() {
        let f = Matrix3::from_diagonal(&nalgebra::Vector3::new(4.0, 9.0, 16.0));
        let se = standard_errors(&f, 1, FisherMethod::Analytic);
        assert_eq!(se.method, FisherMethod::Analytic);
        for (v, e) in se.values.iter().zip([0.5, 1.0 / 3.0, 0.25]) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_uses_pseudo_inverse() {
        let v = nalgebra::Vector3::new(1.0, 2.0, 0.5);
        let w = nalgebra::Vector3::new(0.0, 1.0, -1.0);
        let f = v * v.transpose() + w * w.transpose();
        let se = standard_errors(&f, 10, FisherMethod::Analytic);
        assert_eq!(se.method, FisherMethod::PseudoInverse);
        assert!(se.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn classical_matches_score_outer_product() {
        for t in [[2.0, 2.0, 1.2], [0.8, 1.5, -0.4], [3.0, 0.7, 0.0], [1.2, 1.0, 2.5]] {
            let d = BWeibull::from_array(t).unwrap();
            let a = fisher_information(&d).unwrap();
            let b = q_fisher_information(&d, 1.0).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let scale = a[(i, j)].abs().max(1.0);
                    assert!(
                        (a[(i, j)] - b[(i, j)]).abs() < 1e-8 * scale,
                        "{t:?} ({i},{j}): {} vs {}",
                        a[(i, j)],
                        b[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn weibull_block() {
        // Known Weibull information for (α, β).
        let (a, b) = (1.7, 2.3);
        let d = BWeibull::new(a, b, 0.0).unwrap();
        let f = fisher_information(&d).unwrap();
        let g = 1.0 - crate::specfun::EULER_GAMMA;
        let faa = (1.0 + crate::specfun::trigamma_pos(2.0) + g * g) / (a * a);
        let fab = -(1.0 - crate::specfun::EULER_GAMMA) / b;
        let fbb = a * a / (b * b);
        assert!((f[(0, 0)] - faa).abs() < 1e-10);
        assert!((f[(0, 1)] - fab).abs() < 1e-10);
        assert!((f[(1, 1)] - fbb).abs() < 1e-10);
    }

    #[test]
    fn positive_semidefinite() {
        for t in [[2.0, 2.0, 1.2], [0.6, 1.5, -0.4], [4.0, 0.7, 0.9]] {
            let d = BWeibull::from_array(t).unwrap();
            let f = fisher_information(&d).unwrap();
            assert!((f - f.transpose()).amax() < 1e-12);
            assert!(f.symmetric_eigenvalues().iter().all(|&e| e >= -1e-8), "{t:?}");
        }
    }
}
