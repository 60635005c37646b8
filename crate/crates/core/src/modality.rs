//! Shape of the density: bimodal, unimodal or strictly decreasing.
//!
//! Critical points solve the mode equation `R(x) = 0`, where
//!
//! ```text
//! R(x) = αδ²x^(α+2) − 2αδx^(α+1) + 2αx^α − (α+1)β^αδ²x² + 2αβ^αδx − 2(α−1)β^α
//!      = −x G(x) β^α · d/dx log f(x).
//! ```
//!
//! `R` changes sign from negative to positive at a maximum. Closed-form
//! rules are used for `α = 1` (a quadratic in `x`) and for `α = 2, δ > 0`
//! (a quartic whose discriminant decides); everything else is located
//! numerically on a log-spaced grid.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::dist::{BWeibull, ParamVector};

pub const GRID_POINTS: usize = 2048;
/// Critical points closer than this multiple of `β` are treated as one tangency.
pub const MERGE_TOLERANCE: f64 = 1e-8;
// |Δ| below this fraction of the sum of |terms| is treated as zero.
const DISCRIMINANT_REL_ZERO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Bimodal,
    Unimodal,
    Decreasing,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub kind: PointKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModalityMethod {
    Alpha1Rule,
    Alpha2Discriminant,
    Numeric,
}

/// Coefficients of `p₄(x) = ax⁴ + bx³ + cx² + dx + e`, the mode equation at `α = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl QuarticCoefficients {
    pub fn eval(&self, x: f64) -> f64 {
        (((self.a * x + self.b) * x + self.c) * x + self.d) * x + self.e
    }

    fn derivative(&self, x: f64) -> f64 {
        ((4.0 * self.a * x + 3.0 * self.b) * x + 2.0 * self.c) * x + self.d
    }

    /// The sixteen-term discriminant together with the sum of the absolute
    /// values of its terms, used as a scale for deciding `Δ = 0`.
    pub fn discriminant_with_scale(&self) -> (f64, f64) {
        let QuarticCoefficients { a, b, c, d, e } = *self;
        let terms = [
            256.0 * a.powi(3) * e.powi(3),
            -192.0 * a * a * b * d * e * e,
            -128.0 * a * a * c * c * e * e,
            144.0 * a * a * c * d * d * e,
            -27.0 * a * a * d.powi(4),
            144.0 * a * b * b * c * e * e,
            -6.0 * a * b * b * d * d * e,
            -80.0 * a * b * c * c * d * e,
            18.0 * a * b * c * d.powi(3),
            16.0 * a * c.powi(4) * e,
            -4.0 * a * c.powi(3) * d * d,
            -27.0 * b.powi(4) * e * e,
            18.0 * b.powi(3) * c * d * e,
            -4.0 * b.powi(3) * d.powi(3),
            -4.0 * b * b * c.powi(3) * e,
            b * b * c * c * d * d,
        ];
        (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
    }

    pub fn discriminant(&self) -> f64 {
        self.discriminant_with_scale().0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityReport {
    pub classification: Classification,
    pub critical_points: Vec<CriticalPoint>,
    pub method: ModalityMethod,
    pub discriminant: Option<f64>,
    pub coefficients: Option<QuarticCoefficients>,
}

impl ModalityReport {
    pub fn maxima(&self) -> impl Iterator<Item = f64> + '_ {
        self.critical_points
            .iter()
            .filter(|p| p.kind == PointKind::Max)
            .map(|p| p.x)
    }
}

/// `R(x)` exactly as in the module docs. Zero iff `x` is a critical point.
pub fn mode_equation_residual(theta: &ParamVector, x: f64) -> f64 {
    let (a, b, d) = (theta.alpha(), theta.beta(), theta.delta());
    let xa = x.powf(a);
    let ba = b.powf(a);
    a * d * d * xa * x * x - 2.0 * a * d * xa * x + 2.0 * a * xa - (a + 1.0) * ba * d * d * x * x + 2.0 * a * ba * d * x
        - 2.0 * (a - 1.0) * ba
}

/// `R(βy) / β^α`, written in `y = x/β` and `k = βδ` so that it is scale free.
fn scaled_residual(alpha: f64, k: f64, y: f64) -> f64 {
    let ya = y.powf(alpha);
    alpha * ya * (k * k * y * y - 2.0 * k * y + 2.0) - (alpha + 1.0) * k * k * y * y + 2.0 * alpha * k * y
        - 2.0 * (alpha - 1.0)
}

/// Coefficients `a = 2δ², b = −4δ, c = 4 − 3β²δ², d = 4β²δ, e = −2β²` and the discriminant `Δ`.
pub fn quartic_discriminant(beta: f64, delta: f64) -> (f64, QuarticCoefficients) {
    let q = QuarticCoefficients {
        a: 2.0 * delta * delta,
        b: -4.0 * delta,
        c: 4.0 - 3.0 * beta * beta * delta * delta,
        d: 4.0 * beta * beta * delta,
        e: -2.0 * beta * beta,
    };
    (q.discriminant(), q)
}

/// Classifies the density and locates its interior critical points.
pub fn classify(theta: &ParamVector) -> ModalityReport {
    let (a, b, d) = (theta.alpha(), theta.beta(), theta.delta());
    if a == 1.0 && (d > 0.0 || d < -1.0 / b) {
        return classify_alpha1(b, d);
    }
    if a == 2.0 && d > 0.0 {
        return classify_alpha2(b, d);
    }
    classify_numeric(theta)
}

// α = 1: R(x) = x · p₂(x) with p₂(x) = δ²x² − 2δ(1+βδ)x + 2(1+βδ).
fn classify_alpha1(beta: f64, delta: f64) -> ModalityReport {
    let s = 1.0 + beta * delta;
    let (qa, qb, qc) = (delta * delta, -2.0 * delta * s, 2.0 * s);
    let disc = qb * qb - 4.0 * qa * qc;
    let mut roots = Vec::new();
    if disc > 0.0 {
        let sq = disc.sqrt();
        // numerically stable pair
        let q = -0.5 * (qb + qb.signum() * sq);
        let mut r = [q / qa, qc / q];
        r.sort_by(f64::total_cmp);
        roots.extend(r.into_iter().filter(|&x| x > 0.0));
    }
    // p₂ > 0 near the origin when 1 + βδ > 0, so the density starts out decreasing.
    let first = if s > 0.0 { PointKind::Min } else { PointKind::Max };
    let critical_points = alternate(&roots, first);
    ModalityReport {
        classification: classify_points(&critical_points, 1.0),
        critical_points,
        method: ModalityMethod::Alpha1Rule,
        discriminant: None,
        coefficients: None,
    }
}

// α = 2, δ > 0: the signs of p₄'s coefficients give exactly three sign
// changes and p₄(−x) exactly one, so p₄ has one negative root and either one
// or three positive roots. Four real roots (Δ > 0) therefore means two
// maxima around one minimum; Δ < 0 leaves a single maximum, and Δ = 0 adds
// only a tangency.
fn classify_alpha2(beta: f64, delta: f64) -> ModalityReport {
    let (disc, q) = quartic_discriminant(beta, delta);
    let (_, scale) = q.discriminant_with_scale();
    let classification = if disc > DISCRIMINANT_REL_ZERO * scale {
        Classification::Bimodal
    } else {
        Classification::Unimodal
    };
    let roots = quartic_sign_changing_roots(&q);
    let critical_points = alternate(&roots, PointKind::Max);
    let maxima = critical_points.iter().filter(|p| p.kind == PointKind::Max).count();
    let consistent = match classification {
        Classification::Bimodal => maxima == 2,
        _ => maxima == 1,
    };
    ModalityReport {
        classification: if consistent {
            classification
        } else {
            Classification::Indeterminate
        },
        critical_points,
        method: ModalityMethod::Alpha2Discriminant,
        discriminant: Some(disc),
        coefficients: Some(q),
    }
}

/// Positive roots of the quartic at which it changes sign, ascending.
fn quartic_sign_changing_roots(q: &QuarticCoefficients) -> Vec<f64> {
    #[rustfmt::skip]
    let companion = Matrix4::new(
        -q.b / q.a, -q.c / q.a, -q.d / q.a, -q.e / q.a,
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
    );
    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.re > 0.0 && z.im.abs() <= 1e-7 * z.norm().max(1.0))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..50 {
                let dp = q.derivative(x);
                if dp == 0.0 {
                    break;
                }
                let step = q.eval(x) / dp;
                if !step.is_finite() || step.abs() > 0.5 * x {
                    break;
                }
                x -= step;
                if step.abs() <= 1e-15 * x {
                    break;
                }
            }
            x
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * y.abs());
    roots
        .into_iter()
        .filter(|&x| {
            let h = 1e-7 * x;
            q.eval(x - h).signum() * q.eval(x + h).signum() < 0.0
        })
        .collect()
}

fn alternate(roots: &[f64], first: PointKind) -> Vec<CriticalPoint> {
    let mut kind = first;
    roots
        .iter()
        .map(|&x| {
            let p = CriticalPoint { x, kind };
            kind = if kind == PointKind::Max {
                PointKind::Min
            } else {
                PointKind::Max
            };
            p
        })
        .collect()
}

fn classify_points(points: &[CriticalPoint], alpha: f64) -> Classification {
    match points.iter().filter(|p| p.kind == PointKind::Max).count() {
        0 if alpha <= 1.0 => Classification::Decreasing,
        1 => Classification::Unimodal,
        2 => Classification::Bimodal,
        _ => Classification::Indeterminate,
    }
}

/// Numeric path: sign changes of `R` on a log-spaced grid spanning the
/// `1e-6` and `1 − 1e-6` quantiles, refined by bisection.
pub fn classify_numeric(theta: &ParamVector) -> ModalityReport {
    let dist = BWeibull::from_params(*theta);
    let (a, b) = (theta.alpha(), theta.beta());
    let k = b * theta.delta();
    let lo = dist.quantile(1e-6).unwrap_or(1e-6 * b) / b;
    let hi = dist.quantile(1.0 - 1e-6).unwrap_or(10.0 * b) / b;
    let r = |y: f64| scaled_residual(a, k, y);
    let step = (hi / lo).ln() / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo * (step * i as f64).exp()).collect();

    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut prev = r(grid[0]);
    for w in grid.windows(2) {
        let next = r(w[1]);
        if prev == 0.0 || prev.signum() == next.signum() {
            prev = next;
            continue;
        }
        let (mut l, mut h) = (w[0], w[1]);
        let rising = next > prev;
        while h - l > 1e-13 * h {
            let m = 0.5 * (l + h);
            if (r(m) > 0.0) == rising {
                h = m;
            } else {
                l = m;
            }
        }
        points.push(CriticalPoint {
            x: 0.5 * (l + h) * b,
            kind: if rising { PointKind::Max } else { PointKind::Min },
        });
        prev = next;
    }

    // A max and a min closer than the tolerance are a tangency; drop both.
    let mut merged: Vec<CriticalPoint> = Vec::new();
    for p in points {
        match merged.last() {
            Some(last) if (p.x - last.x).abs() < MERGE_TOLERANCE * b => {
                merged.pop();
            }
            _ => merged.push(p),
        }
    }
    let alternates = merged.windows(2).all(|w| w[0].kind != w[1].kind);
    let classification = if alternates {
        classify_points(&merged, a)
    } else {
        Classification::Indeterminate
    };
    ModalityReport {
        classification,
        critical_points: merged,
        method: ModalityMethod::Numeric,
        discriminant: None,
        coefficients: None,
    }
}
