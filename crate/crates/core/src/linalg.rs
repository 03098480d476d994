//! Small dense complex-matrix helpers.
//!
//! Everything here is sized for per-bundle estimation problems (at most a
//! couple dozen rows), so the implementations favour simplicity and
//! numerical robustness over asymptotics: Cholesky for Hermitian
//! positive-definite solves, cyclic Jacobi for Hermitian eigenproblems.

use crate::error::{LinkSimError, Result};

pub type C64 = num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        CMatrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(v).map(|(a, x)| a * x).sum()
            })
            .collect()
    }

    /// Column `c` as a vector.
    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix,
/// A = L L^H. Fails when a pivot is not strictly positive.
pub fn cholesky_factor(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "cholesky needs a square matrix");
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(LinkSimError::IllConditionedMmse);
        }
        let ljj = diag.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(l)
}

/// Solve L L^H x = b given the lower factor L.
pub fn cholesky_solve_factored(l: &CMatrix, b: &[C64]) -> Vec<C64> {
    let n = l.rows();
    assert_eq!(b.len(), n);
    // forward: L y = b
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let lik = l[(i, k)];
            let yk = y[k];
            y[i] -= lik * yk;
        }
        y[i] /= l[(i, i)];
    }
    // backward: L^H x = y
    for i in (0..n).rev() {
        for k in i + 1..n {
            let lki = l[(k, i)].conj();
            let yk = y[k];
            y[i] -= lki * yk;
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Solve A x = b for Hermitian positive-definite A.
pub fn solve_hermitian_pd(a: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    Ok(cholesky_solve_factored(&cholesky_factor(a)?, b))
}

/// Eigendecomposition of a Hermitian matrix.
pub struct HermitianEigen {
    /// Eigenvalues in ascending order (real for Hermitian input).
    pub values: Vec<f64>,
    /// Unitary matrix whose column k is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

/// Cyclic Jacobi eigendecomposition for Hermitian matrices.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "eigendecomposition needs a square matrix");
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;

    let mut converged = false;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let b = apq.norm();
                if b <= tol * 1e-2 {
                    continue;
                }
                // phase that makes the pivot real, then a real Jacobi rotation
                let u = apq / b;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (app - aqq) / (2.0 * b);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // rows/columns p and q of the unitary update
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp + s * u.conj() * mkq;
                    m[(k, q)] = -s * u * mkp + c * mkq;
                    m[(p, k)] = m[(k, p)].conj();
                    m[(q, k)] = m[(k, q)].conj();
                }
                m[(p, p)] = C64::new(app * c * c + 2.0 * b * c * s + aqq * s * s, 0.0);
                m[(q, q)] = C64::new(app * s * s - 2.0 * b * c * s + aqq * c * c, 0.0);
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp + s * u.conj() * vkq;
                    v[(k, q)] = -s * u * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(LinkSimError::EigenNoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}
