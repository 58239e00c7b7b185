use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, norm2, normalize_phase, CMatrix, ComplexLu};
use crate::model::TridiagonalHamiltonian;

use super::{degeneracy_tol, eigenvalues};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Residual bound for returned eigenvectors, scaled by `max(1, ||H||_inf)`.
pub const EIGENVECTOR_RESIDUAL: f64 = 1e-9;

pub fn residual(h: &TridiagonalHamiltonian, lambda: Complex64, x: &[Complex64]) -> f64 {
    let hx = h.apply(x);
    let r: Vec<Complex64> = hx.iter().zip(x).map(|(a, b)| a - lambda * b).collect();
    norm2(&r)
}

fn recurrence(h: &TridiagonalHamiltonian, lambda: Complex64) -> Option<Vec<Complex64>> {
    let n = h.dim();
    let floor = 1e-8 * (1.0 + h.max_abs_entry());
    if h.sup().iter().any(|s| s.abs() <= floor) {
        return None;
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[0] = Complex64::new(1.0, 0.0);
    for k in 0..n - 1 {
        let back = if k > 0 { x[k - 1] * h.sub()[k - 1] } else { Complex64::new(0.0, 0.0) };
        x[k + 1] = (lambda * x[k] - back) / h.sup()[k];
    }
    normalize_phase(&mut x)?;
    Some(x)
}

fn start_vector(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| Complex64::new(1.0 + 0.31 * i as f64, 0.17 * (i as f64 + 1.0).sqrt()))
        .collect()
}

fn inverse_iteration(
    h: &TridiagonalHamiltonian,
    shift: Complex64,
    start: Vec<Complex64>,
    iterations: usize,
) -> Option<Vec<Complex64>> {
    let n = h.dim();
    let mut a = CMatrix::from_tridiagonal(h);
    for i in 0..n {
        a[(i, i)] -= shift;
    }
    let floor = f64::EPSILON * (1.0 + h.norm_inf()) * n as f64;
    let lu = ComplexLu::factor(a, floor);
    let mut x = start;
    for _ in 0..iterations {
        x = lu.solve(&x);
        normalize_phase(&mut x)?;
    }
    Some(x)
}

/// Unit eigenvector of `H` (right) or of `H^T` (left, so that `y^T H = λ y^T`)
/// for the eigenvalue `lambda`, phase-fixed so its largest entry is real.
pub fn eigenvector(h: &TridiagonalHamiltonian, lambda: Complex64, side: Side) -> Result<Vec<Complex64>> {
    let m = match side {
        Side::Right => h.clone(),
        Side::Left => h.transpose(),
    };
    let scale = 1.0 + m.norm_inf();
    let tol = EIGENVECTOR_RESIDUAL * m.norm_inf().max(1.0);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    fn consider(best: &mut Option<(f64, Vec<Complex64>)>, r: f64, x: Vec<Complex64>) {
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            *best = Some((r, x));
        }
    }
    if let Some(x) = recurrence(&m, lambda) {
        consider(&mut best, residual(&m, lambda, &x), x);
    }
    let good_enough = best.as_ref().is_some_and(|(r, _)| *r <= 1e-13 * scale);
    if !good_enough {
        let start = best.as_ref().map_or_else(|| start_vector(m.dim()), |(_, x)| x.clone());
        for s in [start, start_vector(m.dim())] {
            if let Some(x) = inverse_iteration(&m, lambda, s, 3) {
                consider(&mut best, residual(&m, lambda, &x), x);
            }
        }
    }
    match best {
        Some((r, x)) if r < tol => Ok(x),
        Some((r, _)) => Err(Error::Eigenvector {
            eigenvalue: lambda,
            residual: r,
            tolerance: tol,
        }),
        None => Err(Error::Eigenvector {
            eigenvalue: lambda,
            residual: f64::INFINITY,
            tolerance: tol,
        }),
    }
}

/// `1 - |<x1, x2>|` for the unit right eigenvectors of a near-degenerate pair,
/// with the default degeneracy tolerance of the spectrum of `h`.
pub fn coalescence_measure(h: &TridiagonalHamiltonian, pair: (Complex64, Complex64)) -> Result<f64> {
    let spec = eigenvalues(h)?;
    coalescence_measure_with_tol(h, pair, degeneracy_tol(&spec.eigenvalues))
}

/// As [`coalescence_measure`] with an explicit degeneracy tolerance.
///
/// The pair's two-dimensional invariant subspace is found by block inverse
/// iteration with a shift just off the pair, `H` is compressed onto it, and the
/// eigenvectors of the 2x2 compression are compared. A compression that is a
/// multiple of the identity means two independent eigenvectors (value 1).
pub fn coalescence_measure_with_tol(
    h: &TridiagonalHamiltonian,
    pair: (Complex64, Complex64),
    tol: f64,
) -> Result<f64> {
    let (l1, l2) = pair;
    if (l1 - l2).norm() >= tol {
        return Err(Error::NotDegenerate(l1, l2, tol));
    }
    let n = h.dim();
    let hn = 1.0 + h.norm_inf();
    if n == 2 {
        return Ok(measure_from_compression(&CMatrix::from_tridiagonal(h), hn));
    }
    let offset = (l1 - l2).norm() + 1e-6 * hn;
    let shift = (l1 + l2) * 0.5 + Complex64::from_polar(offset, 0.9);
    let mut a = CMatrix::from_tridiagonal(h);
    for i in 0..n {
        a[(i, i)] -= shift;
    }
    let lu = ComplexLu::factor(a, f64::EPSILON * hn * n as f64);
    let mut x1 = start_vector(n);
    let mut x2: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(((i * 7 + 3) % 5) as f64 - 2.0, 0.4 * (i % 3) as f64))
        .collect();
    orthonormalize(&mut x1, &mut x2);
    for _ in 0..30 {
        x1 = lu.solve(&x1);
        x2 = lu.solve(&x2);
        orthonormalize(&mut x1, &mut x2);
    }
    let hx1 = h.apply(&x1);
    let hx2 = h.apply(&x2);
    let mut k = CMatrix::zeros(2);
    k[(0, 0)] = inner(&x1, &hx1);
    k[(0, 1)] = inner(&x1, &hx2);
    k[(1, 0)] = inner(&x2, &hx1);
    k[(1, 1)] = inner(&x2, &hx2);
    Ok(measure_from_compression(&k, hn))
}

fn orthonormalize(x1: &mut [Complex64], x2: &mut [Complex64]) {
    let n1 = norm2(x1);
    for z in x1.iter_mut() {
        *z /= n1;
    }
    for _ in 0..2 {
        let c = inner(x1, x2);
        for (a, b) in x2.iter_mut().zip(x1.iter()) {
            *a -= c * b;
        }
    }
    let n2 = norm2(x2);
    for z in x2.iter_mut() {
        *z /= n2;
    }
}

fn measure_from_compression(k: &CMatrix, scale: f64) -> f64 {
    let half_trace = (k[(0, 0)] + k[(1, 1)]) * 0.5;
    let p = k[(0, 0)] - half_trace;
    let q = k[(0, 1)];
    let r = k[(1, 0)];
    let frob = (p.norm_sqr() * 2.0 + q.norm_sqr() + r.norm_sqr()).sqrt();
    if frob <= 1e-9 * scale {
        return 1.0;
    }
    let nu = (p * p + q * r).sqrt();
    let vec_for = |mu: Complex64| -> [Complex64; 2] {
        let a = [q, mu - p];
        let b = [mu + p, r];
        if a[0].norm_sqr() + a[1].norm_sqr() >= b[0].norm_sqr() + b[1].norm_sqr() {
            a
        } else {
            b
        }
    };
    let z1 = vec_for(nu);
    let z2 = vec_for(-nu);
    let ov = (z1[0].conj() * z2[0] + z1[1].conj() * z2[1]).norm();
    let n1 = (z1[0].norm_sqr() + z1[1].norm_sqr()).sqrt();
    let n2 = (z2[0].norm_sqr() + z2[1].norm_sqr()).sqrt();
    if n1 == 0.0 || n2 == 0.0 {
        return 0.0;
    }
    (1.0 - ov / (n1 * n2)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, ChainParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_site_vector() {
        let (s, t) = (2.0, 0.5);
        let h = TridiagonalHamiltonian::from_bands(vec![s], vec![t]).unwrap();
        let lam = c((s * t).sqrt(), 0.0);
        let x = eigenvector(&h, lam, Side::Right).unwrap();
        let ratio = x[1] / x[0];
        assert!((ratio - c((s * t).sqrt() / s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hermitian_left_equals_right() {
        let h = build_hamiltonian(&ChainParams::new(1.0, 0.1, 0.0, 0.0, 6).unwrap()).unwrap();
        for lam in eigenvalues(&h).unwrap().eigenvalues {
            let r = eigenvector(&h, lam, Side::Right).unwrap();
            let l = eigenvector(&h, lam, Side::Left).unwrap();
            for (a, b) in r.iter().zip(&l) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn one_way_link_falls_back_to_inverse_iteration() {
        // g = v makes the first super-diagonal entry 2v and the first sub entry 0;
        // g = -v zeroes the first super entry instead.
        let h = build_hamiltonian(&ChainParams::new(1.0, 0.3, -1.0, 0.2, 4).unwrap()).unwrap();
        assert_eq!(h.sup()[0], 0.0);
        for lam in eigenvalues(&h).unwrap().eigenvalues {
            let x = eigenvector(&h, lam, Side::Right).unwrap();
            assert!(residual(&h, lam, &x) < 1e-9);
        }
    }

    #[test]
    fn rejects_non_eigenvalue() {
        let h = build_hamiltonian(&ChainParams::new(1.0, 1.0, 0.0, 0.0, 4).unwrap()).unwrap();
        assert!(eigenvector(&h, c(0.1, 0.0), Side::Right).is_err());
    }

    #[test]
    fn jordan_block_measure_is_zero() {
        let h = TridiagonalHamiltonian::from_bands(vec![1.0], vec![0.0]).unwrap();
        let m = coalescence_measure_with_tol(&h, (c(0.0, 0.0), c(0.0, 0.0)), 1e-6).unwrap();
        assert!(m < 1e-12);
    }

    #[test]
    fn decoupled_degenerate_pair_is_diabolic() {
        // Two identical dimers, separated by a zero link: eigenvalues ±1 twice.
        let h = TridiagonalHamiltonian::from_bands(vec![1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]).unwrap();
        let m = coalescence_measure_with_tol(&h, (c(1.0, 0.0), c(1.0, 0.0)), 1e-6).unwrap();
        assert!(m > 0.9, "{m}");
    }

    #[test]
    fn non_degenerate_pair_is_rejected() {
        let h = build_hamiltonian(&ChainParams::new(1.0, 1.0, 0.0, 0.0, 4).unwrap()).unwrap();
        let e = eigenvalues(&h).unwrap().eigenvalues;
        assert!(matches!(
            coalescence_measure(&h, (e[0], e[1])),
            Err(Error::NotDegenerate(..))
        ));
    }
}
