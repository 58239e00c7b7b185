//! Small dense linear algebra: real determinants and complex LU.
//!
//! Matrices here are at most a few dozen rows, so everything is row-major
//! `Vec` storage with partial pivoting.

use num_complex::Complex64;

use crate::model::TridiagonalHamiltonian;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Determinant by Gaussian elimination with partial pivoting.
pub fn real_det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let d = m[col][col];
        det *= d;
        for row in col + 1..n {
            let f = m[row][col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![C0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C1;
        }
        m
    }

    pub fn from_tridiagonal(h: &TridiagonalHamiltonian) -> Self {
        let n = h.dim();
        let mut m = Self::zeros(n);
        for i in 0..n - 1 {
            m[(i, i + 1)] = Complex64::new(h.sup()[i], 0.0);
            m[(i + 1, i)] = Complex64::new(h.sub()[i], 0.0);
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Max absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorisation with partial pivoting.
///
/// Pivots smaller than `pivot_floor` are replaced by `pivot_floor`, which turns
/// an exactly singular shift in inverse iteration into a huge but finite
/// amplification instead of a division by zero.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    lu: CMatrix,
    perm: Vec<usize>,
    /// Number of pivots that hit the floor.
    pub floored: usize,
}

impl ComplexLu {
    pub fn factor(mut a: CMatrix, pivot_floor: f64) -> Self {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut floored = 0;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .unwrap();
            if piv != col {
                for k in 0..n {
                    a.data.swap(piv * n + k, col * n + k);
                }
                perm.swap(piv, col);
            }
            if a[(col, col)].norm() <= pivot_floor {
                a[(col, col)] = Complex64::new(pivot_floor.max(f64::MIN_POSITIVE), 0.0);
                floored += 1;
            }
            let d = a[(col, col)];
            for row in col + 1..n {
                let f = a[(row, col)] / d;
                a[(row, col)] = f;
                if f == C0 {
                    continue;
                }
                for k in col + 1..n {
                    let u = a[(col, k)];
                    a[(row, k)] -= f * u;
                }
            }
        }
        ComplexLu { lu: a, perm, floored }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[(i, k)] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.lu[(i, k)] * x[k];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.lu.n;
        let cols: Vec<Vec<Complex64>> = (0..n)
            .map(|j| {
                let mut e = vec![C0; n];
                e[j] = C1;
                self.solve(&e)
            })
            .collect();
        CMatrix::from_columns(&cols)
    }
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<x, y> = sum conj(x_i) y_i`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Scales `x` to unit norm and rotates the phase so the largest entry is real
/// and positive. Returns `None` for a zero or non-finite vector.
pub fn normalize_phase(x: &mut [Complex64]) -> Option<()> {
    let nrm = norm2(x);
    if !(nrm > 0.0 && nrm.is_finite()) {
        return None;
    }
    let big = x
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let phase = big.conj() / big.norm();
    for z in x.iter_mut() {
        *z = *z * phase / nrm;
    }
    Some(())
}
