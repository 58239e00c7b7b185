//! Chain parameters and the graded, nonreciprocal SSH Hamiltonian.
//!
//! Link `j` (1-indexed, between sites `j` and `j + 1`) carries the base hopping
//! `t_j` (`v` on odd links, `w` on even links) shifted by the gradient offset
//! `(j - 1) a`. The nonreciprocity `g` is added to the leftward amplitude and
//! subtracted from the rightward one:
//!
//! ```text
//! H[j-1][j] = t_j + g - (j - 1) a     (site j+1 -> site j)
//! H[j][j-1] = t_j - g - (j - 1) a     (site j   -> site j+1)
//! ```
//!
//! `H[i][k]` is the amplitude for the transition `k -> i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter that a scan or perturbation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    G,
    A,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::G => f.write_str("g"),
            Axis::A => f.write_str("a"),
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" => Ok(Axis::G),
            "a" => Ok(Axis::A),
            other => Err(Error::InvalidConfig(format!("unknown axis {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// Intracell base hopping (odd links, including both end links).
    pub v: f64,
    /// Intercell base hopping (even links).
    pub w: f64,
    /// Nonreciprocity.
    pub g: f64,
    /// Hopping gradient per link.
    pub a: f64,
    /// Number of sites.
    pub n: usize,
}

impl ChainParams {
    pub fn new(v: f64, w: f64, g: f64, a: f64, n: usize) -> Result<Self> {
        let p = ChainParams { v, w, g, a, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!(
                "chain needs at least 2 sites, got {}",
                self.n
            )));
        }
        for (name, x) in [("v", self.v), ("w", self.w), ("g", self.g), ("a", self.a)] {
            if !x.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {x} is not finite")));
            }
        }
        Ok(())
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::G => self.g,
            Axis::A => self.a,
        }
    }

    pub fn with(mut self, axis: Axis, value: f64) -> Self {
        match axis {
            Axis::G => self.g = value,
            Axis::A => self.a = value,
        }
        self
    }

    pub fn with_g(self, g: f64) -> Self {
        self.with(Axis::G, g)
    }

    pub fn with_a(self, a: f64) -> Self {
        self.with(Axis::A, a)
    }

    /// Base hopping of 1-indexed link `j`.
    pub fn base_hopping(&self, j: usize) -> f64 {
        if j % 2 == 1 {
            self.v
        } else {
            self.w
        }
    }

    /// Reciprocal part of link `j`, `t_j - (j - 1) a`.
    pub fn link_amplitude(&self, j: usize) -> f64 {
        self.base_hopping(j) - (j as f64 - 1.0) * self.a
    }
}

/// Real tridiagonal matrix with an identically zero diagonal.
///
/// `sup[j]` is `H[j][j+1]`, `sub[j]` is `H[j+1][j]` (0-indexed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalHamiltonian {
    sup: Vec<f64>,
    sub: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn from_bands(sup: Vec<f64>, sub: Vec<f64>) -> Result<Self> {
        if sup.len() != sub.len() {
            return Err(Error::InvalidParams(format!(
                "band lengths differ: {} super vs {} sub",
                sup.len(),
                sub.len()
            )));
        }
        if sup.is_empty() {
            return Err(Error::InvalidParams("matrix must be at least 2x2".into()));
        }
        if sup.iter().chain(&sub).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite band entry".into()));
        }
        Ok(TridiagonalHamiltonian { sup, sub })
    }

    pub fn dim(&self) -> usize {
        self.sup.len() + 1
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn entry(&self, i: usize, k: usize) -> f64 {
        if k == i + 1 {
            self.sup[i]
        } else if i == k + 1 {
            self.sub[k]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|k| self.entry(i, k)).collect())
            .collect()
    }

    /// `H^T`; its right eigenvectors are the left eigenvectors of `H`.
    pub fn transpose(&self) -> Self {
        TridiagonalHamiltonian {
            sup: self.sub.clone(),
            sub: self.sup.clone(),
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(x.len(), n, "vector length must match matrix dimension");
        (0..n)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                if i + 1 < n {
                    acc += x[i + 1] * self.sup[i];
                }
                if i > 0 {
                    acc += x[i - 1] * self.sub[i - 1];
                }
                acc
            })
            .collect()
    }

    /// Max absolute row sum (infinity norm).
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let right = if i + 1 < n { self.sup[i].abs() } else { 0.0 };
                let left = if i > 0 { self.sub[i - 1].abs() } else { 0.0 };
                right + left
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.sup
            .iter()
            .chain(&self.sub)
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn build_hamiltonian(p: &ChainParams) -> Result<TridiagonalHamiltonian> {
    p.validate()?;
    let (sup, sub) = (1..p.n)
        .map(|j| {
            let t = p.link_amplitude(j);
            (t + p.g, t - p.g)
        })
        .unzip();
    TridiagonalHamiltonian::from_bands(sup, sub)
}

/// Products of opposite-direction amplitudes on each link, `m_j^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkProducts {
    pub m_sq: Vec<f64>,
}

pub fn link_products(h: &TridiagonalHamiltonian) -> LinkProducts {
    LinkProducts {
        m_sq: h.sup().iter().zip(h.sub()).map(|(s, t)| s * t).collect(),
    }
}

/// `Γ H Γ` with `Γ = P_A - P_B` (sites alternate A, B starting with A).
pub fn chiral_conjugate(h: &TridiagonalHamiltonian) -> TridiagonalHamiltonian {
    let sign = |i: usize| if i % 2 == 0 { 1.0 } else { -1.0 };
    let sup = h
        .sup()
        .iter()
        .enumerate()
        .map(|(i, x)| sign(i) * x * sign(i + 1))
        .collect();
    let sub = h
        .sub()
        .iter()
        .enumerate()
        .map(|(i, x)| sign(i + 1) * x * sign(i))
        .collect();
    TridiagonalHamiltonian { sup, sub }
}
