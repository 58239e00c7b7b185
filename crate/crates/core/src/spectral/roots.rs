//! Aberth–Ehrlich simultaneous root iteration for real-coefficient polynomials.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct AberthOptions {
    pub max_iterations: usize,
}

impl Default for AberthOptions {
    fn default() -> Self {
        AberthOptions {
            max_iterations: 1000,
        }
    }
}

/// Value, derivative, and the backward-error bound `sum |c_k| |z|^k`.
fn eval_all(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let zabs = z.norm();
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut bound = 0.0;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        bound = bound * zabs + c.abs();
    }
    (p, dp, bound)
}

/// All roots of `sum coeffs[k] z^k` with multiplicity.
///
/// Exact-zero low-order coefficients are split off as exact zero roots.
pub fn aberth(coeffs: &[f64], opts: &AberthOptions) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParams("non-finite polynomial coefficient".into()));
    }
    let top = match coeffs.iter().rposition(|&c| c != 0.0) {
        Some(t) => t,
        None => return Err(Error::InvalidParams("zero polynomial".into())),
    };
    let low = coeffs.iter().position(|&c| c != 0.0).unwrap();
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let c = &coeffs[low..=top];
    let d = c.len() - 1;
    match d {
        0 => return Ok(roots),
        1 => {
            roots.push(Complex64::new(-c[0] / c[1], 0.0));
            return Ok(roots);
        }
        _ => {}
    }

    let lead = c[d];
    // Every root lies in |z| <= fujiwara; start on a circle inside that disc.
    let fujiwara = (0..d)
        .map(|k| (c[k] / lead).abs().powf(1.0 / (d - k) as f64))
        .fold(0.0, f64::max)
        * 2.0;
    let radius = 0.5 * fujiwara;
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / d as f64 + 0.7;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; d];

    for _ in 0..opts.max_iterations {
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (p, dp, bound) = eval_all(c, z[i]);
            if p.norm() <= 16.0 * f64::EPSILON * bound {
                done[i] = true;
                continue;
            }
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let denom = dp - p * s;
            let step = if denom.norm() > 0.0 && denom.is_finite() {
                p / denom
            } else {
                Complex64::new(1e-8 * (1.0 + z[i].norm()), 1e-8)
            };
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() && p.norm() <= 1e-8 * bound {
                done[i] = true;
            }
        }
        if done.iter().all(|&x| x) {
            roots.extend(z);
            return Ok(roots);
        }
    }
    roots.extend(z);
    Err(Error::Convergence {
        iterations: opts.max_iterations,
        best: roots,
    })
}
