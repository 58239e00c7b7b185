use crate::linalg::real_det;
use crate::model::TridiagonalHamiltonian;

use super::poly::char_poly;

/// Discriminant of `sum coeffs[k] x^k` (ascending order), computed as
/// `(-1)^(d(d-1)/2) Res(p, p') / a_d` with the Sylvester determinant.
pub fn poly_discriminant(coeffs: &[f64]) -> f64 {
    let top = match coeffs.iter().rposition(|&c| c != 0.0) {
        Some(t) => t,
        None => return 0.0,
    };
    let d = top;
    if d < 2 {
        return 1.0;
    }
    let p: Vec<f64> = coeffs[..=d].iter().rev().copied().collect();
    let dp: Vec<f64> = (1..=d).rev().map(|k| k as f64 * coeffs[k]).collect();
    let size = 2 * d - 1;
    let mut syl = vec![vec![0.0; size]; size];
    for r in 0..d - 1 {
        syl[r][r..r + d + 1].copy_from_slice(&p);
    }
    for r in 0..d {
        syl[d - 1 + r][r..r + d].copy_from_slice(&dp);
    }
    let res = real_det(syl);
    let sign = if (d * (d - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * res / coeffs[d]
}

/// Raw discriminant of the characteristic polynomial.
pub fn discriminant(h: &TridiagonalHamiltonian) -> f64 {
    poly_discriminant(char_poly(h).coeffs())
}

/// Discriminant after scaling the characteristic polynomial to unit max-norm
/// coefficients. Scaling by `s` multiplies the discriminant by `s^(2d-2)`, so
/// zeros and signs are preserved.
pub fn normalized_discriminant(h: &TridiagonalHamiltonian) -> f64 {
    let c = char_poly(h);
    let s = c.max_abs_coeff();
    let scaled: Vec<f64> = c.coeffs().iter().map(|x| x / s).collect();
    poly_discriminant(&scaled)
}
