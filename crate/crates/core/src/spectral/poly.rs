use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{link_products, TridiagonalHamiltonian};

/// Monic characteristic polynomial `det(λI - H)`, coefficients in ascending
/// order of power (`coeffs[k]` multiplies `λ^k`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    coeffs: Vec<f64>,
}

impl CharPoly {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        CharPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    pub fn derivative(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect()
    }

    /// Coefficients of `q` with `p(λ) = λ^(n mod 2) q(λ^2)`.
    pub fn even_part(&self) -> Vec<f64> {
        let start = self.degree() % 2;
        self.coeffs.iter().skip(start).step_by(2).copied().collect()
    }
}

pub(crate) fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Characteristic polynomial from the three-term recurrence
/// `p_k = λ p_{k-1} - m_{k-1}^2 p_{k-2}` (zero diagonal).
pub fn char_poly(h: &TridiagonalHamiltonian) -> CharPoly {
    let m_sq = link_products(h).m_sq;
    let mut prev = vec![1.0];
    let mut cur = vec![0.0, 1.0];
    for m in &m_sq {
        let mut next = vec![0.0; cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += c;
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= m * c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    CharPoly { coeffs: cur }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_det;
    use crate::model::{build_hamiltonian, ChainParams};

    #[test]
    fn two_site() {
        let h = TridiagonalHamiltonian::from_bands(vec![3.0], vec![0.5]).unwrap();
        assert_eq!(char_poly(&h).coeffs(), &[-1.5, 0.0, 1.0]);
    }

    #[test]
    fn uniform_four_site() {
        let h = build_hamiltonian(&ChainParams::new(1.0, 1.0, 0.0, 0.0, 4).unwrap()).unwrap();
        assert_eq!(char_poly(&h).coeffs(), &[1.0, 0.0, -3.0, 0.0, 1.0]);
    }

    #[test]
    fn four_site_symbolic_form() {
        let p = ChainParams::new(0.9, -0.4, 0.6, 0.25, 4).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let m = link_products(&h).m_sq;
        let c = char_poly(&h);
        let expect = [m[0] * m[2], 0.0, -(m[0] + m[1] + m[2]), 0.0, 1.0];
        for (x, y) in c.coeffs().iter().zip(expect) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_determinant_at_sample_points() {
        let p = ChainParams::new(1.1, 0.3, -0.7, 0.2, 7).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let c = char_poly(&h);
        let dense = h.to_dense();
        for lam in [-1.3, -0.2, 0.0, 0.45, 2.0] {
            let m: Vec<Vec<f64>> = dense
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, x)| if i == j { lam - x } else { -x })
                        .collect()
                })
                .collect();
            let d = real_det(m);
            let v = c.eval(Complex64::new(lam, 0.0));
            assert!((v.re - d).abs() < 1e-12 * (1.0 + d.abs()), "{lam}: {} vs {d}", v.re);
        }
    }

    #[test]
    fn parity_and_even_part() {
        let h = build_hamiltonian(&ChainParams::new(0.5, 1.2, 0.3, -0.1, 5).unwrap()).unwrap();
        let c = char_poly(&h);
        for (k, x) in c.coeffs().iter().enumerate() {
            if k % 2 == 0 {
                assert_eq!(*x, 0.0);
            }
        }
        assert_eq!(c.even_part().len(), 3);
        assert_eq!(c.derivative().len(), 5);
    }
}
