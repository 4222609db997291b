//! Dense complex linear algebra sized for few-qubit problems.
//!
//! Everything here is row-major and allocation-light; the largest operator
//! in play is 16x16, so there is no sparse or blocked path. The Hermitian
//! eigensolver is a cyclic complex Jacobi scheme.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermiticity gate applied by [`hermitian_eigen`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default off-diagonal residue target for the Jacobi sweeps.
pub const EIGEN_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn zeros(dim: usize) -> Self {
        ComplexVector { data: vec![C64::new(0.0, 0.0); dim] }
    }

    /// Fails on an empty input or any non-finite component.
    pub fn from_vec(data: Vec<C64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::contract("vector must have positive dimension"));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::contract("vector entries must be finite"));
        }
        Ok(ComplexVector { data })
    }

    pub fn from_real(data: &[f64]) -> Result<Self> {
        Self::from_vec(data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.data.iter()
    }

    /// `<self|other>`, conjugating the left argument.
    pub fn inner(&self, other: &ComplexVector) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, s: C64) -> ComplexVector {
        ComplexVector { data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn kron(&self, other: &ComplexVector) -> ComplexVector {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        ComplexVector { data }
    }

    /// `|self><self|`.
    pub fn outer_self(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.data[i] * self.data[j].conj();
            }
        }
        m
    }

    /// Column-matrix view of the vector.
    pub fn to_column(&self) -> ComplexMatrix {
        ComplexMatrix { rows: self.dim(), cols: 1, data: self.data.clone() }
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        ComplexVector { data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting bad shapes and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::contract("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::contract(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::contract("matrix entries must be finite"));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::contract("ragged rows"));
        }
        let data = rows.iter().flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0))).collect();
        Self::from_row_major(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector { data: (0..self.rows).map(|i| self[(i, j)]).collect() }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |a - a†|` over entries; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> ComplexMatrix {
        let d = dagger(self);
        (self + &d).scale_real(0.5)
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let data = (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v.iter()).map(|(a, b)| a * b).sum())
            .collect();
        ComplexVector { data }
    }

    /// `<u|A|v>`.
    pub fn sandwich(&self, u: &ComplexVector, v: &ComplexVector) -> C64 {
        u.inner(&self.apply(v))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on shape mismatch; use [`matmul`] for the checked form.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        matmul(self, rhs).expect("matrix product shape mismatch")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|j| format!("{:+.6}{:+.6}i", self[(i, j)].re, self[(i, j)].im)).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::contract(format!("cannot multiply {}x{} by {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..b.cols {
                out.data[i * b.cols + j] += aik * b.data[k * b.cols + j];
            }
        }
    }
    Ok(out)
}

/// Kronecker product; the first factor is the most significant index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.cols, a.rows);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

pub fn trace(a: &ComplexMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(Error::contract(format!("trace of non-square {}x{} matrix", a.rows, a.cols)));
    }
    Ok((0..a.rows).map(|i| a[(i, i)]).sum())
}

/// Spectrum and orthonormal eigenvectors of a Hermitian matrix.
///
/// `values` ascend and column `k` of `vectors` pairs with `values[k]`. Each
/// eigenvector's largest-magnitude component (first one on ties) is real and
/// positive.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> ComplexVector {
        self.vectors.column(k)
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += v[(i, k)] * v[(j, k)].conj() * fl[k];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Sweeps stop once the off-diagonal Frobenius norm falls below
/// `tol * max(1, ‖A‖_F)`.
pub fn hermitian_eigen(a: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::contract(format!("eigenproblem needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::contract(format!("matrix is not Hermitian (max |a - a†| = {defect:e})")));
    }
    let n = a.rows;
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = tol * m.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    let mut residual = off_diagonal_norm(&m);
    while residual > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Convergence { sweeps, residual });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
        residual = off_diagonal_norm(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let phase = canonical_phase(&v, src);
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)] * phase;
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Phase that makes the dominant component of column `k` real positive.
fn canonical_phase(v: &ComplexMatrix, k: usize) -> C64 {
    let n = v.rows;
    let max = (0..n).map(|i| v[(i, k)].norm()).fold(0.0, f64::max);
    let pivot = (0..n).find(|&i| v[(i, k)].norm() >= max * (1.0 - 1e-9)).unwrap_or(0);
    let z = v[(pivot, k)];
    if z.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z.conj() / z.norm()
    }
}

/// One complex Jacobi rotation zeroing `m[p][q]`; accumulates into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r < f64::MIN_POSITIVE {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // a phase on column q makes the pivot real, then a real plane rotation
    let phase = apq.conj() / r;
    let zeta = (aqq - app) / (2.0 * r);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    let n = m.rows;
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * g_pp + mkq * g_qp;
        m[(k, q)] = mkp * g_pq + mkq * g_qq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = g_pp.conj() * mpk + g_qp.conj() * mqk;
        m[(q, k)] = g_pq.conj() * mpk + g_qq.conj() * mqk;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// `f(A)` for Hermitian `A` through its eigendecomposition.
pub fn function_of_hermitian(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eigen(a, EIGEN_TOL)?.map_spectrum(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() < tol
    }

    #[test]
    fn products_of_small_matrices() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(matmul(&i2, &i2).unwrap(), i2);
        assert_eq!(&sigma_x() * &sigma_x(), i2);
        // basis (|0>, |1>); raising maps |0> to |1>
        let raise = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        let lower = dagger(&raise);
        assert_eq!(&raise * &lower, ComplexMatrix::from_diag(&[0.0, 1.0]));
        assert!(matches!(matmul(&i2, &ComplexMatrix::identity(3)), Err(Error::Contract(_))));
    }

    #[test]
    fn kronecker_ordering() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
        let z = ComplexMatrix::from_diag(&[1.0, -1.0]);
        assert_eq!(kron(&z, &z), ComplexMatrix::from_diag(&[1.0, -1.0, -1.0, 1.0]));
        let zero = ComplexVector::from_real(&[1.0, 0.0]).unwrap().to_column();
        let one = ComplexVector::from_real(&[0.0, 1.0]).unwrap().to_column();
        let k = kron(&zero, &one);
        assert_eq!(k.column(0), ComplexVector::from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn dagger_conjugates() {
        let col = ComplexMatrix::from_row_major(2, 1, vec![c64(1.0, 0.0), c64(0.0, 1.0)]).unwrap();
        let row = dagger(&col);
        assert_eq!((row.rows(), row.cols()), (1, 2));
        assert_eq!(row[(0, 1)], c64(0.0, -1.0));
        assert_eq!(dagger(&ComplexMatrix::identity(2)), ComplexMatrix::identity(2));
    }

    #[test]
    fn trace_checks_shape() {
        assert_eq!(trace(&ComplexMatrix::identity(16)).unwrap(), c64(16.0, 0.0));
        assert!(trace(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(ComplexMatrix::from_row_major(1, 1, vec![c64(f64::NAN, 0.0)]).is_err());
        assert!(ComplexVector::from_vec(vec![c64(0.0, f64::INFINITY)]).is_err());
        assert!(ComplexMatrix::from_row_major(2, 2, vec![c64(1.0, 0.0)]).is_err());
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let e = hermitian_eigen(&ComplexMatrix::from_diag(&[3.0, 1.0, 2.0]), EIGEN_TOL).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vector(0), ComplexVector::from_real(&[0.0, 1.0, 0.0]).unwrap());
        assert_eq!(e.vector(1), ComplexVector::from_real(&[0.0, 0.0, 1.0]).unwrap());
        assert_eq!(e.vector(2), ComplexVector::from_real(&[1.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = hermitian_eigen(&sigma_x(), EIGEN_TOL).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let minus = e.vector(0);
        let plus = e.vector(1);
        assert!((minus[0] - c64(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!((minus[1] - c64(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!((plus[0] - c64(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!((plus[1] - c64(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complex_hermitian_two_by_two() {
        let y = ComplexMatrix::from_row_major(2, 2, vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
            .unwrap();
        let e = hermitian_eigen(&y, EIGEN_TOL).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        assert!(close(&e.reconstruct(), &y, 1e-14));
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigen(&a, EIGEN_TOL), Err(Error::Contract(_))));
        assert!(hermitian_eigen(&ComplexMatrix::zeros(2, 3), EIGEN_TOL).is_err());
    }

    #[test]
    fn functions_of_diagonal_matrices() {
        let d = ComplexMatrix::from_diag(&[1.0, 2.0]);
        assert!(close(&function_of_hermitian(&d, |l| l).unwrap(), &d, 1e-15));
        let z = ComplexMatrix::zeros(3, 3);
        assert!(close(&function_of_hermitian(&z, f64::exp).unwrap(), &ComplexMatrix::identity(3), 1e-15));
        let g = function_of_hermitian(&ComplexMatrix::from_diag(&[0.0, 1.0]), |l| (-l / 0.5).exp()).unwrap();
        assert!(close(&g, &ComplexMatrix::from_diag(&[1.0, (-2.0f64).exp()]), 1e-15));
    }
}
