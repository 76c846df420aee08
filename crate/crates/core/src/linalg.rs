//! Small dense linear algebra for matrices up to a few dozen rows.
//!
//! Everything here is deliberately self-contained: the closed-form entanglement
//! conditions elsewhere in the crate are checked against these routines, so they
//! must not share code paths with the formulas they verify.
//!
//! Eigenvalues of Hermitian matrices use cyclic two-sided Jacobi rotations and
//! singular values use one-sided (Hestenes) Jacobi orthogonalisation. Both are
//! generic over [`Scalar`], which is implemented for `f64` and [`Complex64`].

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the dense routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:e}, scale {scale:e})")]
    NonHermitian { deviation: f64, scale: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
}

/// Field element usable in the Jacobi routines.
pub trait Scalar:
    Copy
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn scale(self, k: f64) -> Self;

    fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `self / |self|`, or one for zero input.
    fn unit_phase(self) -> Self {
        let a = self.abs();
        if a == 0.0 {
            Self::one()
        } else {
            self.scale(1.0 / a)
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn abs(self) -> f64 {
        self.norm()
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type CMatrix = Matrix<Complex64>;
pub type RMatrix = Matrix<f64>;

/// Complex square matrix expected to be Hermitian (density matrices, partial
/// transposes). Hermiticity is checked by the routines that rely on it.
pub type HermitianMatrix = CMatrix;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
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

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> T {
        let mut t = T::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self[(i, i)];
        }
        t
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.scale(k)).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-entry distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).abs());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (j, &x) in v.iter().enumerate() {
                    acc += self[(i, j)] * x;
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != T::zero())
            .map(move |(k, &v)| (k / self.cols, k % self.cols, v))
    }
}

impl RMatrix {
    pub fn to_complex(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| Complex64::new(self[(i, j)], 0.0))
    }
}

impl CMatrix {
    /// Real part, entrywise.
    pub fn real_part(&self) -> RMatrix {
        RMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let v = self[(i, j)];
                    if v.im() == 0.0 {
                        format!("{:.6}", v.re())
                    } else {
                        format!("{:.6}{:+.6}i", v.re(), v.im())
                    }
                })
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Real values sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpectrum {
    values: Vec<f64>,
}

impl RealSpectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }
}

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigh<T: Scalar> {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: Matrix<T>,
}

fn check_hermitian<T: Scalar>(m: &Matrix<T>) -> Result<(), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let scale = m.max_abs();
    let deviation = m.hermiticity_defect();
    if deviation > 1e-10 * scale {
        return Err(LinalgError::NonHermitian { deviation, scale });
    }
    Ok(())
}

fn jacobi_hermitian<T: Scalar>(m: &Matrix<T>, want_vectors: bool) -> (Vec<f64>, Option<Matrix<T>>) {
    let n = m.rows();
    // Symmetrise so that round-off asymmetry in the input does not leak in.
    let mut a = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            T::from_real(m[(i, i)].re())
        } else {
            (m[(i, j)] + m[(j, i)].conj()).scale(0.5)
        }
    });
    let mut v = want_vectors.then(|| Matrix::<T>::identity(n));
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.abs();
                if g <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re();
                let aqq = a[(q, q)].re();
                if g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                    continue;
                }
                let e = apq.unit_phase();
                let ec = e.conj();
                let tau = (aqq - app) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- A U with U_pp = c, U_pq = s, U_qp = -s conj(e), U_qq = c conj(e).
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp.scale(c) - (akq * ec).scale(s);
                    a[(k, q)] = akp.scale(s) + (akq * ec).scale(c);
                }
                // A <- U^H A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk.scale(c) - (aqk * e).scale(s);
                    a[(q, k)] = apk.scale(s) + (aqk * e).scale(c);
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                a[(p, p)] = T::from_real(a[(p, p)].re());
                a[(q, q)] = T::from_real(a[(q, q)].re());

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp.scale(c) - (vkq * ec).scale(s);
                        v[(k, q)] = vkp.scale(s) + (vkq * ec).scale(c);
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re()).collect(), v)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues_hermitian<T: Scalar>(m: &Matrix<T>) -> Result<RealSpectrum, LinalgError> {
    check_hermitian(m)?;
    Ok(RealSpectrum::new(jacobi_hermitian(m, false).0))
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn eigh<T: Scalar>(m: &Matrix<T>) -> Result<Eigh<T>, LinalgError> {
    check_hermitian(m)?;
    let (vals, vecs) = jacobi_hermitian(m, true);
    let vecs = vecs.expect("vectors requested");
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let n = m.rows();
    Ok(Eigh {
        values: order.iter().map(|&i| vals[i]).collect(),
        vectors: Matrix::from_fn(n, n, |r, c| vecs[(r, order[c])]),
    })
}

/// Singular value decomposition `A = U diag(s) V^H` restricted to the
/// `min(rows, cols)` leading triplets.
#[derive(Debug, Clone)]
pub struct Svd<T: Scalar> {
    /// Singular values, descending.
    pub values: Vec<f64>,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

fn one_sided_jacobi<T: Scalar>(a: &Matrix<T>, want_vectors: bool) -> (Matrix<T>, Option<Matrix<T>>) {
    // Work on the orientation with at least as many rows as columns.
    let mut w = a.clone();
    let n = w.cols();
    let m = w.rows();
    let mut v = want_vectors.then(|| Matrix::<T>::identity(n));
    let col_norm2 = |w: &Matrix<T>, j: usize| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = col_norm2(&w, p);
                let beta = col_norm2(&w, q);
                let mut gamma = T::zero();
                for i in 0..m {
                    gamma += w[(i, p)].conj() * w[(i, q)];
                }
                let g = gamma.abs();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let e = gamma.unit_phase();
                let ec = e.conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = wp.scale(c) - (wq * ec).scale(s);
                    w[(i, q)] = wp.scale(s) + (wq * ec).scale(c);
                }
                if let Some(v) = v.as_mut() {
                    for i in 0..n {
                        let vp = v[(i, p)];
                        let vq = v[(i, q)];
                        v[(i, p)] = vp.scale(c) - (vq * ec).scale(s);
                        v[(i, q)] = vp.scale(s) + (vq * ec).scale(c);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

/// Singular values of an arbitrary rectangular matrix, ascending.
pub fn singular_values<T: Scalar>(a: &Matrix<T>) -> RealSpectrum {
    let work = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let (w, _) = one_sided_jacobi(&work, false);
    let k = work.cols();
    let mut vals: Vec<f64> = (0..k)
        .map(|j| (0..w.rows()).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    vals.truncate(a.rows().min(a.cols()));
    RealSpectrum::new(vals)
}

/// Full thin SVD via one-sided Jacobi.
pub fn svd<T: Scalar>(a: &Matrix<T>) -> Svd<T> {
    let transposed = a.rows() < a.cols();
    let work = if transposed { a.adjoint() } else { a.clone() };
    let (w, v) = one_sided_jacobi(&work, true);
    let v = v.expect("vectors requested");
    let (m, n) = (work.rows(), work.cols());
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = Matrix::from_fn(m, n, |i, c| {
        let j = order[c];
        if norms[j] > 0.0 {
            w[(i, j)].scale(1.0 / norms[j])
        } else {
            T::zero()
        }
    });
    let vv = Matrix::from_fn(n, n, |i, c| v[(i, order[c])]);
    if transposed {
        // work = A^H = U S V^H  =>  A = V S U^H
        Svd { values, u: vv, v: u }
    } else {
        Svd { values, u, v: vv }
    }
}

/// Sum of singular values.
pub fn trace_norm<T: Scalar>(a: &Matrix<T>) -> f64 {
    singular_values(a).sum()
}

/// Which tensor factor a partial transpose acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Subsystem {
    A,
    #[default]
    B,
}

fn check_bipartite<T: Scalar>(rho: &Matrix<T>, dims: (usize, usize)) -> Result<(), LinalgError> {
    let n = dims.0 * dims.1;
    if rho.rows() != n || rho.cols() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("{n}x{n} for dims {}x{}", dims.0, dims.1),
            got: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok(())
}

/// Partial transpose on one factor of a `dA·dB` bipartite operator.
pub fn partial_transpose<T: Scalar>(
    rho: &Matrix<T>,
    dims: (usize, usize),
    subsystem: Subsystem,
) -> Result<Matrix<T>, LinalgError> {
    check_bipartite(rho, dims)?;
    let (da, db) = dims;
    let n = da * db;
    let mut out = Matrix::zeros(n, n);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    let v = rho[(i * db + j, k * db + l)];
                    let (r, c) = match subsystem {
                        Subsystem::B => (i * db + l, k * db + j),
                        Subsystem::A => (k * db + j, i * db + l),
                    };
                    out[(r, c)] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Realignment `R[(i,k),(j,l)] = rho[(i,j),(k,l)]`; the result is `dA² × dB²`.
pub fn realign<T: Scalar>(rho: &Matrix<T>, dims: (usize, usize)) -> Result<Matrix<T>, LinalgError> {
    check_bipartite(rho, dims)?;
    let (da, db) = dims;
    let mut out = Matrix::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * da + k, j * db + l)] = rho[(i * db + j, k * db + l)];
                }
            }
        }
    }
    Ok(out)
}
