//! Closed forms for the four-site chain.
//!
//! The characteristic polynomial is `λ^4 - 2A λ^2 + (A^2 - B^2)` with
//! `2A = m1^2 + m2^2 + m3^2` and `A^2 - B^2 = m1^2 m3^2`, so
//! `E = ±√(A ± B)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ChainParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients {
    pub a: f64,
    pub b_sq: f64,
    /// Principal square root of `b_sq`.
    pub b: Complex64,
}

fn require_n4(p: &ChainParams) -> Result<()> {
    p.validate()?;
    if p.n != 4 {
        return Err(Error::InvalidParams(format!(
            "closed forms need a four-site chain, got n = {}",
            p.n
        )));
    }
    Ok(())
}

/// `(m1^2, m2^2, m3^2)` for the four-site chain.
pub fn link_squares(p: &ChainParams) -> (f64, f64, f64) {
    let g2 = p.g * p.g;
    (
        p.v * p.v - g2,
        (p.w - p.a).powi(2) - g2,
        (p.v - 2.0 * p.a).powi(2) - g2,
    )
}

fn a_coefficient(v: f64, w: f64, g: f64, a: f64) -> f64 {
    -1.5 * g * g + v * v + 0.5 * w * w + 2.5 * a * a - 2.0 * a * v - a * w
}

fn b_squared(v: f64, g: f64, a: f64, big_a: f64) -> f64 {
    let d = g * g - v * v;
    big_a * big_a - d * d + 4.0 * a * (a - v) * d
}

pub fn coefficients(p: &ChainParams) -> Result<SpectralCoefficients> {
    require_n4(p)?;
    let a = a_coefficient(p.v, p.w, p.g, p.a);
    let b_sq = b_squared(p.v, p.g, p.a, a);
    Ok(SpectralCoefficients {
        a,
        b_sq,
        b: Complex64::new(b_sq, 0.0).sqrt(),
    })
}

/// `λ^2` roots `A ± B`, the smaller one taken from the product `m1^2 m3^2`
/// to avoid cancellation.
fn squared_energies(a: f64, b_sq: f64, product: f64) -> (Complex64, Complex64) {
    let b = Complex64::new(b_sq, 0.0).sqrt();
    let big = if a >= 0.0 { a + b } else { a - b };
    let small = if big.norm() > 0.0 {
        Complex64::new(product, 0.0) / big
    } else {
        Complex64::new(0.0, 0.0)
    };
    (big, small)
}

/// `{+√(A+B), -√(A+B), +√(A-B), -√(A-B)}`.
pub fn energies_n4(p: &ChainParams) -> Result<[Complex64; 4]> {
    let c = coefficients(p)?;
    let (m1, _, m3) = link_squares(p);
    let (mu1, mu2) = squared_energies(c.a, c.b_sq, m1 * m3);
    let (r1, r2) = (mu1.sqrt(), mu2.sqrt());
    Ok([r1, -r1, r2, -r2])
}

fn dedup_sorted(mut xs: Vec<f64>, tol: f64) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= tol);
    xs
}

/// Values of `g` where an end link becomes one-way: `±v` and `±(v - 2a)`.
/// Coincident values are collapsed.
pub fn type1_loci(v: f64, _w: f64, a: f64) -> Vec<f64> {
    let u = v - 2.0 * a;
    let xs = vec![v, -v, u, -u].into_iter().map(|x| x + 0.0).collect();
    dedup_sorted(xs, 0.0)
}

/// Coefficients `[c0, c1, c2]` of `B^2` as a quadratic in `x = g^2`.
pub fn type2_quadratic(v: f64, w: f64, a: f64) -> [f64; 3] {
    let u = v - 2.0 * a;
    let alpha = v * v + 0.5 * w * w + 2.5 * a * a - 2.0 * a * v - a * w;
    [alpha * alpha - v * v * u * u, v * v + u * u - 3.0 * alpha, 1.25]
}

/// Real roots of `c0 + c1 x + c2 x^2`, computed without cancellation.
fn real_quadratic_roots(c: [f64; 3]) -> Vec<f64> {
    let [c0, c1, c2] = c;
    if c2 == 0.0 {
        return if c1 != 0.0 { vec![-c0 / c1] } else { vec![] };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    let scale = (c1 * c1).max((4.0 * c2 * c0).abs());
    if disc < -1e-14 * scale {
        return vec![];
    }
    let s = disc.max(0.0).sqrt();
    let q = -0.5 * (c1 + c1.signum() * s + if c1 == 0.0 { s } else { 0.0 });
    let mut out = vec![q / c2];
    if q != 0.0 {
        out.push(c0 / q);
    } else {
        out.push(0.0);
    }
    out
}

/// Real `g` with `B^2(g) = 0`, in `±` pairs.
pub fn type2_loci(v: f64, w: f64, a: f64) -> Vec<f64> {
    let mut gs = Vec::new();
    for x in real_quadratic_roots(type2_quadratic(v, w, a)) {
        let x = if x < 0.0 && x > -1e-14 { 0.0 } else { x };
        if x >= 0.0 {
            let g = x.sqrt();
            gs.push(g);
            gs.push(-g + 0.0);
        }
    }
    dedup_sorted(gs, 0.0)
}

/// Which family of four-site coalescence a fourth-order point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IibBranch {
    /// `g = ±(v - 2a)`.
    FarLink,
    /// `g = ±v`.
    NearLink,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticPoint {
    pub a: f64,
    pub g: f64,
    pub branch: IibBranch,
}

/// Points `(a, g)` where `A = B = 0`, so all four energies meet at zero.
pub fn case_iib_loci(v: f64, w: f64) -> Vec<QuarticPoint> {
    let mut out = Vec::new();
    let r1 = 9.0 * v * v - 8.0 * v * w + 8.0 * w * w;
    if r1 >= 0.0 {
        let s = r1.sqrt();
        for a in [(4.0 * v - w + s) / 7.0, (4.0 * v - w - s) / 7.0] {
            let u = v - 2.0 * a;
            for g in [u, -u] {
                out.push(QuarticPoint { a, g: g + 0.0, branch: IibBranch::FarLink });
            }
        }
    }
    let b = 2.0 * v + w;
    let r2 = b * b - 5.0 * (w * w - v * v);
    if r2 >= 0.0 {
        let s = r2.sqrt();
        for a in [(b + s) / 5.0, (b - s) / 5.0] {
            for g in [v, -v] {
                out.push(QuarticPoint { a, g: g + 0.0, branch: IibBranch::NearLink });
            }
        }
    }
    out.sort_by(|x, y| x.a.total_cmp(&y.a).then(x.g.total_cmp(&y.g)));
    out.dedup_by(|x, y| x.a == y.a && x.g == y.g);
    out
}

/// First-order-in-`ε` energies for `a -> a + ε`.
///
/// `A ≈ A0 + (5a - 2v - w) ε` and
/// `B^2 ≈ B0^2 + [2 A0 (5a - 2v - w) + 4 (2a - v)(g^2 - v^2)] ε`,
/// the full linearisation of `B^2 = A^2 - m1^2 m3^2`. At `A0 = 0` the first
/// bracket term vanishes.
pub fn perturbed_energies(p: &ChainParams, eps: f64) -> Result<[Complex64; 4]> {
    let c = coefficients(p)?;
    let da = 5.0 * p.a - 2.0 * p.v - p.w;
    let a = c.a + da * eps;
    let b_sq = c.b_sq + (2.0 * c.a * da + 4.0 * (2.0 * p.a - p.v) * (p.g * p.g - p.v * p.v)) * eps;
    let b = Complex64::new(b_sq, 0.0).sqrt();
    let (mu1, mu2) = (a + b, a - b);
    let (r1, r2) = (mu1.sqrt(), mu2.sqrt());
    Ok([r1, -r1, r2, -r2])
}

/// Coalescence classes of the four-site chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// No degeneracy.
    #[serde(rename = "0")]
    Zero,
    /// `m1^2 m3^2 = 0`: a pair meets at zero energy.
    #[serde(rename = "I")]
    I,
    /// `B = 0`, `A ≠ 0`: two pairs meet at `±√A`.
    #[serde(rename = "IIA")]
    IIA,
    /// `A = B = 0`: all four meet at zero.
    #[serde(rename = "IIB")]
    IIB,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Case::Zero => "0",
            Case::I => "I",
            Case::IIA => "IIA",
            Case::IIB => "IIB",
        })
    }
}

pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-8;

/// Assigns the coalescence class. The tests compare `|B0^2|`, `|A0^2|` and
/// `|A0^2 - B0^2| = |m1^2 m3^2|` against `tol`.
pub fn classify_point(p: &ChainParams, tol: f64) -> Result<Case> {
    let c = coefficients(p)?;
    let (m1, _, m3) = link_squares(p);
    let b_zero = c.b_sq.abs() <= tol;
    Ok(if b_zero {
        if c.a * c.a <= tol {
            Case::IIB
        } else {
            Case::IIA
        }
    } else if (m1 * m3).abs() <= tol {
        Case::I
    } else {
        Case::Zero
    })
}

/// Alternative printed forms that do not match the determinant. Kept so the
/// discrepancy can be demonstrated and reported.
pub mod uncorrected {
    use super::a_coefficient;

    /// `B^2 = A^2 - (g^2 - v^2)` at `a = 0` (missing the square).
    pub fn b_sq_unsquared(v: f64, w: f64, g: f64) -> f64 {
        let a = a_coefficient(v, w, g, 0.0);
        a * a - (g * g - v * v)
    }

    /// `B^2 = A^2 + (m3^2 - 2 m1^2) m1^2`.
    pub fn b_sq_link_means(v: f64, w: f64, g: f64, a: f64) -> f64 {
        let (m1, m2, m3) = super::link_squares(&crate::model::ChainParams { v, w, g, a, n: 4 });
        let big_a = 0.5 * (m1 + m2 + m3);
        big_a * big_a + (m3 - 2.0 * m1) * m1
    }

    /// `g = v √((2/5)(2v^2 + w^2/2))` at `a = 0`.
    pub fn type2_with_prefactor(v: f64, w: f64) -> f64 {
        v * (0.4 * (2.0 * v * v + 0.5 * w * w)).sqrt()
    }

    /// `g^2 = Q ± 2√P` with the printed `P`, `Q`.
    pub fn type2_pq_squares(v: f64, w: f64, a: f64) -> Vec<f64> {
        let p = -69.0 * a * a
            + (v * v - 7.0 * a * a).powi(2)
            + (w * w + a * a).powi(2)
            + 4.0
                * a
                * (9.0 * a * a * v + a * a * w - v.powi(3) - 2.0 * a * v * w + v * v * w + v * w * w
                    - w.powi(3));
        let q = 12.0 * a * a + 2.0 * (v - a).powi(2) + 3.0 * (w - a).powi(2);
        if p < 0.0 {
            return vec![];
        }
        vec![q + 2.0 * p.sqrt(), q - 2.0 * p.sqrt()]
    }
}
