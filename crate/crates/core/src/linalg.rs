//! Dense complex LU factorization with row equilibration, partial pivoting
//! and a one-norm condition estimate.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Condition estimate above which a solve is reported as suspicious.
pub const COND_WARN: f64 = 1e12;
/// Condition estimate above which a solve is refused.
pub const COND_FAIL: f64 = 1e14;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// `P D A = L U` with `D` the diagonal row scaling.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    row_scale: Vec<f64>,
    scaled_norm1: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.n;
        let mut lu = a.data.clone();
        if lu.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let mut row_scale = vec![1.0; n];
        for i in 0..n {
            let m = (0..n).map(|j| lu[i * n + j].norm()).fold(0.0, f64::max);
            if m == 0.0 {
                return Err(Error::SingularSystem { condition: f64::INFINITY });
            }
            row_scale[i] = 1.0 / m;
            for j in 0..n {
                lu[i * n + j] *= row_scale[i];
            }
        }
        let scaled_norm1 = (0..n)
            .map(|j| (0..n).map(|i| lu[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| lu[x * n + k].norm().total_cmp(&lu[y * n + k].norm()))
                .unwrap();
            if lu[p * n + k].norm() == 0.0 {
                return Err(Error::SingularSystem { condition: f64::INFINITY });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let l = lu[i * n + k] / pivot;
                lu[i * n + k] = l;
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= l * u;
                }
            }
        }
        Ok(Self {
            n,
            lu,
            perm,
            row_scale,
            scaled_norm1,
        })
    }

    /// Solves `(D A) x = c`.
    fn solve_scaled(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| c[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// Solves `(D A)^H x = c`.
    fn solve_scaled_adjoint(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut y = c.to_vec();
        for i in 0..n {
            for j in 0..i {
                let u = self.lu[j * n + i].conj();
                y[i] = y[i] - u * y[j];
            }
            y[i] /= self.lu[i * n + i].conj();
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let l = self.lu[j * n + i].conj();
                y[i] = y[i] - l * y[j];
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let c: Vec<Complex64> = b.iter().zip(&self.row_scale).map(|(v, s)| v * s).collect();
        self.solve_scaled(&c)
    }

    /// One-norm condition estimate of the row-scaled matrix (Hager–Higham).
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve_scaled(&x);
            est = y.iter().map(|v| v.norm()).sum::<f64>();
            let xi: Vec<Complex64> = y
                .iter()
                .map(|v| if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) })
                .collect();
            let z = self.solve_scaled_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![Complex64::new(0.0, 0.0); n];
            x[j] = Complex64::new(1.0, 0.0);
        }
        // Alternating-sign probe guards against the estimator's blind spots.
        let alt: Vec<Complex64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(s * (1.0 + i as f64 / (n.max(2) - 1) as f64), 0.0)
            })
            .collect();
        let y = self.solve_scaled(&alt);
        let alt_est = 2.0 * y.iter().map(|v| v.norm()).sum::<f64>() / (3.0 * n as f64);
        est.max(alt_est) * self.scaled_norm1
    }
}

/// Outcome of a dense solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<Complex64>,
    pub condition: f64,
    /// `‖Ax − b‖₂ / ‖b‖₂` for the unscaled system.
    pub residual: f64,
}

impl Solution {
    pub fn is_ill_conditioned(&self) -> bool {
        self.condition > COND_WARN
    }
}

pub fn solve(a: &Matrix, b: &[Complex64]) -> Result<Solution> {
    if b.len() != a.n {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has length {} for a {}x{} matrix",
            b.len(),
            a.n,
            a.n
        )));
    }
    let lu = Lu::factor(a)?;
    let condition = lu.condition_estimate();
    if !(condition <= COND_FAIL) {
        return Err(Error::SingularSystem { condition });
    }
    let x = lu.solve(b);
    let ax = a.mul_vec(&x);
    let bn = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let rn = ax.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    let residual = if bn > 0.0 { rn / bn } else { rn };
    Ok(Solution { x, condition, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_solve() {
        let a = Matrix::identity(4);
        let mut b = vec![c(0.0, 0.0); 4];
        b[0] = c(1.0, 0.0);
        let s = solve(&a, &b).unwrap();
        assert_eq!(s.x, b);
        assert!((s.condition - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_closed_form() {
        let mut a = Matrix::zeros(2);
        a[(0, 0)] = c(2.0, 1.0);
        a[(0, 1)] = c(0.5, -1.0);
        a[(1, 0)] = c(-1.0, 0.25);
        a[(1, 1)] = c(3.0, 0.0);
        let b = [c(1.0, 2.0), c(-0.5, 0.5)];
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        let x0 = (a[(1, 1)] * b[0] - a[(0, 1)] * b[1]) / det;
        let x1 = (a[(0, 0)] * b[1] - a[(1, 0)] * b[0]) / det;
        let s = solve(&a, &b).unwrap();
        assert!((s.x[0] - x0).norm() < 1e-14 && (s.x[1] - x1).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut a = Matrix::zeros(2);
        a[(0, 0)] = c(1.0, 0.0);
        a[(0, 1)] = c(2.0, 0.0);
        a[(1, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(4.0, 0.0);
        assert!(matches!(solve(&a, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn condition_estimate_tracks_exact_value() {
        // diag(1, 1e-6) with equilibration stays perfectly conditioned
        let mut a = Matrix::identity(2);
        a[(1, 1)] = c(1e-6, 0.0);
        let lu = Lu::factor(&a).unwrap();
        assert!((lu.condition_estimate() - 1.0).abs() < 1e-12);
        // near-singular after scaling
        let mut a = Matrix::zeros(2);
        a[(0, 0)] = c(1.0, 0.0);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(1.0 + 1e-9, 0.0);
        let cond = Lu::factor(&a).unwrap().condition_estimate();
        assert!(cond > 1e9 && cond < 1e10, "{cond}");
    }
}
