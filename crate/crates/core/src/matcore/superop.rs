use alloc::format;

use super::{is_psd, CMatrix, PsdCheck, Subsystem, C64};
use crate::{Error, Result};

/// A linear map on `d×d` matrices, stored as a `d²×d²` matrix acting on
/// column-stacked operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return Err(Error::Shape {
                expected: format!("{0}x{0}", dim * dim),
                actual: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        Ok(Self { dim, matrix })
    }

    /// Tabulates `f` on the matrix units `|i⟩⟨j|`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        let n = dim * dim;
        let mut matrix = CMatrix::zeros(n, n);
        for j in 0..dim {
            for i in 0..dim {
                let image = f(&CMatrix::unit(dim, i, j)).vectorize();
                let col = i + j * dim;
                for (row, z) in image.into_iter().enumerate() {
                    matrix[(row, col)] = z;
                }
            }
        }
        Self { dim, matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::identity(dim * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// Maximally depolarizing channel `X ↦ I·Tr(X)/d`.
    pub fn depolarizing(dim: usize) -> Self {
        let scale = 1.0 / dim as f64;
        Self::from_fn(dim, |x| CMatrix::identity(dim).scale(x.trace() * scale))
    }

    /// Transposition `X ↦ Xᵀ`.
    pub fn transposition(dim: usize) -> Self {
        Self::from_fn(dim, CMatrix::transpose)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        assert_eq!((x.rows(), x.cols()), (self.dim, self.dim), "operand has wrong size");
        let v = self.matrix.mul_vec(&x.vectorize());
        CMatrix::from_fn(self.dim, self.dim, |i, j| v[i + j * self.dim])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale_real(c),
        }
    }

    /// `Σ cᵢ Sᵢ`.
    pub fn combination<'a>(dim: usize, terms: impl IntoIterator<Item = (f64, &'a Superoperator)>) -> Self {
        let n = dim * dim;
        let matrix = super::linear_combination((n, n), terms.into_iter().map(|(c, s)| (c, &s.matrix)));
        Self { dim, matrix }
    }

    /// Hilbert–Schmidt dual, `Tr(A Φ[B]) = Tr(Φ#[A] B)` for Hermitian-preserving maps.
    pub fn dual(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(Self {
            dim: self.dim,
            matrix: self.matrix.inverse()?,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// `(id ⊗ Φ)[d·P₊]`.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.dim;
        let mut c = CMatrix::zeros(d * d, d * d);
        for m in 0..d {
            for n in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        c[(m * d + i, n * d + j)] = self.matrix[(i + j * d, m + n * d)];
                    }
                }
            }
        }
        ChoiMatrix { dim: d, matrix: c }
    }

    pub fn from_choi(choi: &ChoiMatrix) -> Self {
        let d = choi.dim;
        let mut s = CMatrix::zeros(d * d, d * d);
        for m in 0..d {
            for n in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        s[(i + j * d, m + n * d)] = choi.matrix[(m * d + i, n * d + j)];
                    }
                }
            }
        }
        Self { dim: d, matrix: s }
    }

    /// Largest `|Tr Φ[E_ij] − δ_ij|` over matrix units.
    pub fn trace_preservation_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let expected = if i == j { 1.0 } else { 0.0 };
                let tr = self.apply(&CMatrix::unit(d, i, j)).trace();
                worst = worst.max((tr - C64::new(expected, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest `|Tr Φ[E_ij]|`; zero for generators of trace-preserving dynamics.
    pub fn trace_annihilation_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max(self.apply(&CMatrix::unit(d, i, j)).trace().norm());
            }
        }
        worst
    }

    /// `‖Φ[I] − I‖_sup`.
    pub fn unitality_residual(&self) -> f64 {
        let i = CMatrix::identity(self.dim);
        self.apply(&i).max_abs_diff(&i)
    }
}

/// Choi matrix `Σ_{m,n} |m⟩⟨n| ⊗ Φ(|m⟩⟨n|)` of a map on `d×d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl ChoiMatrix {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return Err(Error::Shape {
                expected: format!("{0}x{0}", dim * dim),
                actual: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Choi matrix of `T∘Φ`, i.e. the partial transpose over the output factor.
    pub fn partial_transpose(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: self
                .matrix
                .partial_transpose(self.dim, Subsystem::Second)
                .expect("Choi matrices are d²×d²"),
        }
    }

    pub fn is_psd(&self, tol: f64) -> Result<PsdCheck> {
        is_psd(&self.matrix, tol)
    }

    /// `Tr₂ C`; equals `Φ#[I]ᵀ`, hence `I_d` for trace-preserving maps.
    pub fn partial_trace_output(&self) -> CMatrix {
        let d = self.dim;
        CMatrix::from_fn(d, d, |m, n| (0..d).map(|i| self.matrix[(m * d + i, n * d + i)]).sum())
    }
}

/// Free-function form of [`Superoperator::choi`].
pub fn choi_of(s: &Superoperator) -> ChoiMatrix {
    s.choi()
}

/// Free-function form of [`Superoperator::from_choi`].
pub fn super_of(c: &ChoiMatrix) -> Superoperator {
    Superoperator::from_choi(c)
}
