//! Dense complex matrices and the linear-algebra kernel shared by every other module.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_traits::Zero;

use crate::{Error, Result};

mod eigen;
mod superop;

pub use eigen::{hermitian_eigensystem, is_psd, HermitianEigen, PsdCheck};
pub use superop::{choi_of, super_of, ChoiMatrix, Superoperator};

pub type C64 = num_complex::Complex<f64>;

/// Relative tolerance on `max |A − A†|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A dense complex matrix stored in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                actual: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::zero() })
    }

    /// Matrix unit `|i⟩⟨j|` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Flip (swap) operator on `C^d ⊗ C^d`.
    pub fn flip(d: usize) -> Self {
        let mut f = Self::zeros(d * d, d * d);
        for m in 0..d {
            for n in 0..d {
                f[(m * d + n, n * d + m)] = C64::new(1.0, 0.0);
            }
        }
        f
    }

    /// `d·P₊ = Σ_{m,n} |m⟩⟨n| ⊗ |m⟩⟨n|`.
    pub fn max_entangled_unnormalized(d: usize) -> Self {
        let mut p = Self::zeros(d * d, d * d);
        for m in 0..d {
            for n in 0..d {
                p[(m * d + m, n * d + n)] = C64::new(1.0, 0.0);
            }
        }
        p
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

    pub(crate) fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus (the "sup norm" used for residuals).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|A_ij − conj(A_ji)|` together with its position.
    pub fn hermitian_asymmetry(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in i..self.cols {
                let dev = (self[(i, j)] - self[(j, i)].conj()).norm();
                if dev > worst.0 {
                    worst = (dev, i, j);
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_asymmetry().0 <= rel_tol * self.frobenius_norm()
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Hilbert–Schmidt inner product `Tr(A† B)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// Column-stacked vectorization, `vec(X)[i + j·rows] = X[i][j]`.
    pub fn vectorize(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`CMatrix::vectorize`] for a square `d×d` matrix.
    pub fn from_column_stacked(d: usize, v: &[C64]) -> Result<Self> {
        if v.len() != d * d {
            return Err(Error::Shape {
                expected: format!("{} entries", d * d),
                actual: format!("{} entries", v.len()),
            });
        }
        Ok(Self::from_fn(d, d, |i, j| v[i + j * d]))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.ensure_square()?;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r1, &r2| a[(r1, col)].norm().total_cmp(&a[(r2, col)].norm()))
                .unwrap_or(col);
            if a[(pivot, col)].norm() <= 1e-14 * scale {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] *= p;
                inv[(col, j)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let (acj, icj) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] -= f * acj;
                    inv[(r, j)] -= f * icj;
                }
            }
        }
        Ok(inv)
    }

    /// Transpose one factor of an operator on `C^d ⊗ C^d`.
    pub fn partial_transpose(&self, d: usize, subsystem: Subsystem) -> Result<Self> {
        let n = self.ensure_square()?;
        if n != d * d {
            return Err(Error::Shape {
                expected: format!("{0}x{0} for d = {d}", d * d),
                actual: format!("{n}x{n}"),
            });
        }
        Ok(Self::from_fn(n, n, |row, col| {
            let (i1, i2) = (row / d, row % d);
            let (j1, j2) = (col / d, col % d);
            match subsystem {
                Subsystem::First => self[(j1 * d + i2, i1 * d + j2)],
                Subsystem::Second => self[(i1 * d + j2, j1 * d + i2)],
            }
        }))
    }
}

/// Tensor factor selector for [`CMatrix::partial_transpose`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Free-function form of [`CMatrix::kron`].
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

/// Free-function form of [`CMatrix::partial_transpose`].
pub fn partial_transpose(a: &CMatrix, d: usize, subsystem: Subsystem) -> Result<CMatrix> {
    a.partial_transpose(d, subsystem)
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

/// `Σ cᵢ Aᵢ` over real coefficients.
pub fn linear_combination<'a>(dim: (usize, usize), terms: impl IntoIterator<Item = (f64, &'a CMatrix)>) -> CMatrix {
    let mut out = CMatrix::zeros(dim.0, dim.1);
    for (c, m) in terms {
        if c == 0.0 {
            continue;
        }
        for (o, v) in out.data.iter_mut().zip(&m.data) {
            *o += v * c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_kron_identity() {
        let i2 = CMatrix::identity(2);
        assert_eq!(i2.kron(&i2), CMatrix::identity(4));
    }

    #[test]
    fn kron_of_units_lands_on_declared_index() {
        // |0⟩⟨0| ⊗ |1⟩⟨1| has its single entry at row/col 0·2 + 1.
        let a = CMatrix::unit(2, 0, 0);
        let b = CMatrix::unit(2, 1, 1);
        let k = a.kron(&b);
        assert_eq!(k, CMatrix::unit(4, 1, 1));
    }

    #[test]
    fn partial_transpose_of_max_entangled_is_flip() {
        for d in 2..5 {
            let p = CMatrix::max_entangled_unnormalized(d);
            assert_eq!(p.partial_transpose(d, Subsystem::Second).unwrap(), CMatrix::flip(d));
            assert_eq!(p.partial_transpose(d, Subsystem::First).unwrap(), CMatrix::flip(d));
        }
    }

    #[test]
    fn partial_transpose_product_operator() {
        let a = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64));
        let b = CMatrix::from_fn(2, 2, |i, j| c(2.0 * i as f64 - j as f64, 0.5 * (i + j) as f64));
        let pt2 = a.kron(&b).partial_transpose(2, Subsystem::Second).unwrap();
        assert_eq!(pt2, a.kron(&b.transpose()));
        let pt1 = a.kron(&b).partial_transpose(2, Subsystem::First).unwrap();
        assert_eq!(pt1, a.transpose().kron(&b));
    }

    #[test]
    fn partial_transpose_rejects_wrong_size() {
        let a = CMatrix::identity(5);
        assert!(matches!(a.partial_transpose(2, Subsystem::Second), Err(Error::Shape { .. })));
        let r = CMatrix::zeros(4, 3);
        assert!(matches!(r.partial_transpose(2, Subsystem::Second), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn inverse_roundtrip_and_singular() {
        let a = CMatrix::from_fn(3, 3, |i, j| c((i * 3 + j) as f64 + if i == j { 5.0 } else { 0.0 }, (i as f64) - (j as f64)));
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).max_abs_diff(&CMatrix::identity(3)) < 1e-12);
        let s = CMatrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert_eq!(s.inverse(), Err(Error::Singular));
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let x = CMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 0.0));
        let v = x.vectorize();
        assert_eq!(v, [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(CMatrix::from_column_stacked(2, &v).unwrap(), x);
    }

    #[test]
    fn new_checks_entry_count() {
        assert!(CMatrix::new(2, 2, alloc::vec![C64::zero(); 3]).is_err());
    }
}
