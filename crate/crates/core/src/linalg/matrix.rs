use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default upper bound on the row count of any matrix built by a tensor operation.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

static DIMENSION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIMENSION_CAP);

pub fn dimension_cap() -> usize {
    DIMENSION_CAP.load(Ordering::Relaxed)
}

/// Overrides the dimension cap process-wide. Returns the previous value.
pub fn set_dimension_cap(cap: usize) -> usize {
    DIMENSION_CAP.swap(cap, Ordering::Relaxed)
}

pub(crate) fn check_cap(requested: usize) -> Result<()> {
    let cap = dimension_cap();
    if requested > cap {
        return Err(Error::DimensionOverflow { requested, cap });
    }
    Ok(())
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Matrix unit `e_ij` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// `|x⟩⟨y|`
    pub fn outer(x: &[Complex64], y: &[Complex64]) -> Self {
        Self::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
    }

    /// Column vector as an `n x 1` matrix.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column_vec(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rows)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖M − M†‖_F`
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(M + M†)/2`
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Symmetrizes when the Hermiticity defect is below `1e-9·max(1, ‖M‖_F)`, errors above it.
    pub fn symmetrized(&self) -> Result<Self> {
        self.ensure_square()?;
        let defect = self.hermitian_defect();
        let allowed = HERMITIAN_TOLERANCE * self.frobenius_norm().max(1.0);
        if defect > allowed {
            return Err(Error::NotHermitian { defect, allowed });
        }
        Ok(self.hermitian_part())
    }

    /// `Re Tr(self · other)` without forming the product.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        assert_eq!(
            self.cols, other.rows,
            "trace_product_re: inner dimension mismatch"
        );
        assert_eq!(
            self.rows, other.cols,
            "trace_product_re: outer dimension mismatch"
        );
        let mut acc = 0.0;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += (self[(i, k)] * other[(k, i)]).re;
            }
        }
        acc
    }

    /// Frobenius inner product `Tr(self† other)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.shape(), other.shape(), "inner: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec: dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨v, M v⟩`, real part.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let mv = self.matvec(v);
        v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self† · rhs` without materializing the adjoint.
    pub fn adjoint_mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "adjoint_mul: dimension mismatch");
        let mut out = Self::zeros(self.cols, rhs.cols);
        let n = rhs.cols;
        for k in 0..self.rows {
            let rhs_row = &rhs.data[k * n..(k + 1) * n];
            for i in 0..self.cols {
                let a = self.data[k * self.cols + i].conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.shape() == other.shape() && (self - other).frobenius_norm() <= tol
    }
}

pub(crate) const HERMITIAN_TOLERANCE: f64 = 1e-9;

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

macro_rules! elementwise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.shape(), rhs.shape(), "elementwise op: shape mismatch");
                ComplexMatrix {
                    rows: self.rows,
                    cols: self.cols,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                (&self).$method(rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "add_assign: shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "sub_assign: shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Mul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        self.matmul(&rhs)
    }
}

/// Euclidean norm of a vector.
pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨x, y⟩`, antilinear in the first argument.
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Standard basis vector `e_i` in `C^n`.
pub fn basis(n: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; n];
    v[i] = ONE;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_rejects_bad_length_and_nan() {
        assert!(matches!(
            ComplexMatrix::from_vec(2, 2, vec![ONE; 3]),
            Err(Error::DimensionMismatch(_))
        ));
        let mut data = vec![ONE; 4];
        data[3] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(
            ComplexMatrix::from_vec(2, 2, data),
            Err(Error::NonFinite { row: 1, col: 1 })
        );
    }

    #[test]
    fn matmul_and_adjoint_mul_agree() {
        let a = ComplexMatrix::from_fn(3, 2, |i, j| Complex64::new(i as f64 + 1.0, j as f64 - 0.5));
        let b = ComplexMatrix::from_fn(3, 4, |i, j| Complex64::new((i * j) as f64, 1.0));
        let lhs = a.adjoint_mul(&b);
        let rhs = a.adjoint().matmul(&b);
        assert!(lhs.approx_eq(&rhs, 1e-14));
    }

    #[test]
    fn symmetrize_absorbs_noise_but_rejects_real_asymmetry() {
        let mut m = ComplexMatrix::identity(3);
        m[(0, 1)] = Complex64::new(1e-12, 0.0);
        let s = m.symmetrized().unwrap();
        assert_eq!(s.hermitian_defect(), 0.0);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(m.symmetrized(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(1.0 + j as f64, -(i as f64)));
        assert!((a.trace_product_re(&b) - a.matmul(&b).trace().re).abs() < 1e-12);
    }
}
