//! Characteristic polynomial, eigenvalues, eigenvectors, discriminant, and
//! eigenvector coalescence for zero-diagonal tridiagonal matrices.
//!
//! Eigenvalues come from the characteristic polynomial. Because the diagonal
//! is zero, `p(λ) = λ^(n mod 2) q(λ^2)`; the roots `μ` of `q` are found with
//! Aberth–Ehrlich and mapped to `±√μ`, so the `λ -> -λ` symmetry is exact.

mod discriminant;
mod poly;
mod roots;
mod vectors;

pub use discriminant::{discriminant, normalized_discriminant, poly_discriminant};
pub use poly::{char_poly, CharPoly};
pub use roots::{aberth, AberthOptions};
pub use vectors::{
    coalescence_measure, coalescence_measure_with_tol, eigenvector, residual, Side,
    EIGENVECTOR_RESIDUAL,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assign::min_cost_assignment;
use crate::error::Result;
use crate::model::TridiagonalHamiltonian;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_vectors: Option<Vec<Vec<Complex64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_vectors: Option<Vec<Vec<Complex64>>>,
}

impl Spectrum {
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.eigenvalues)
    }
}

pub fn max_abs(values: &[Complex64]) -> f64 {
    values.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Two eigenvalues closer than this are treated as degenerate.
pub fn degeneracy_tol(values: &[Complex64]) -> f64 {
    1e-6 * (1.0 + max_abs(values))
}

pub(crate) fn sort_values(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// All eigenvalues with multiplicity, sorted by real then imaginary part.
pub fn eigenvalues(h: &TridiagonalHamiltonian) -> Result<Spectrum> {
    let cp = char_poly(h);
    let mus = aberth(&cp.even_part(), &AberthOptions::default())?;
    let mut out = Vec::with_capacity(h.dim());
    for mu in mus {
        let r = mu.sqrt();
        out.push(r);
        out.push(-r);
    }
    if h.dim() % 2 == 1 {
        out.push(Complex64::new(0.0, 0.0));
    }
    for z in out.iter_mut() {
        // Avoid signed zeros in exported text.
        *z = Complex64::new(z.re + 0.0, z.im + 0.0);
    }
    sort_values(&mut out);
    Ok(Spectrum {
        eigenvalues: out,
        right_vectors: None,
        left_vectors: None,
    })
}

/// Eigenvalues together with unit right and left eigenvectors.
pub fn eigensystem(h: &TridiagonalHamiltonian) -> Result<Spectrum> {
    let mut spec = eigenvalues(h)?;
    let right = spec
        .eigenvalues
        .iter()
        .map(|&l| eigenvector(h, l, Side::Right))
        .collect::<Result<Vec<_>>>()?;
    let left = spec
        .eigenvalues
        .iter()
        .map(|&l| eigenvector(h, l, Side::Left))
        .collect::<Result<Vec<_>>>()?;
    spec.right_vectors = Some(right);
    spec.left_vectors = Some(left);
    Ok(spec)
}

/// Largest pairing distance under the minimum-total-distance matching of two
/// equally sized multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let perm = min_cost_assignment(&cost);
    perm.iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0, f64::max)
}
