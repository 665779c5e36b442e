//! Orthonormal Hermitian bases and symmetric `(N, M)`-POVMs.
//!
//! A POVM here is a grid `E[α][k]` of `N` measurements with `M` outcomes each,
//! satisfying
//!
//! ```text
//! Tr E = d/M,  Tr E² = x,  Tr E_{α,k}E_{α,l} = y (k ≠ l),  Tr E_{α,k}E_{β,l} = z (α ≠ β)
//! ```
//!
//! with `y = (d − Mx)/(M(M − 1))`, `z = d/M²` and `d/M² < x ≤ min(d²/M², d/M)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::matcore::{hermitian_eigensystem, linear_combination, CMatrix, Superoperator, C64};
use crate::{Error, Result};

/// Tolerance used when validating user-supplied bases.
pub const BASIS_TOL: f64 = 1e-12;

/// Eigenvalue floor accepted when building a POVM from a basis.
const PSD_FLOOR: f64 = 1e-12;

/// Eigenvalue floor separating feasible from infeasible `t` during bisection.
const BISECTION_FLOOR: f64 = 1e-14;

/// Orthonormal traceless Hermitian operators `G_{α,k}`, grouped by `α`.
///
/// `G_0 = I/√d` is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianBasis {
    dim: usize,
    groups: Vec<Vec<CMatrix>>,
}

impl HermitianBasis {
    /// Validates hermiticity, tracelessness and orthonormality to [`BASIS_TOL`].
    pub fn new(dim: usize, groups: Vec<Vec<CMatrix>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let flat: Vec<&CMatrix> = groups.iter().flatten().collect();
        if flat.is_empty() {
            return Err(Error::InvalidBasis("basis has no elements".into()));
        }
        if flat.len() > dim * dim - 1 {
            return Err(Error::InvalidBasis(format!(
                "{} elements exceed d² − 1 = {}",
                flat.len(),
                dim * dim - 1
            )));
        }
        if let Some(len) = groups.iter().map(Vec::len).find(|&l| l != groups[0].len()) {
            return Err(Error::InvalidBasis(format!(
                "groups must have equal size, found {} and {len}",
                groups[0].len()
            )));
        }
        for (idx, g) in flat.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(Error::Shape {
                    expected: format!("{dim}x{dim}"),
                    actual: format!("{}x{} (element {idx})", g.rows(), g.cols()),
                });
            }
            let (asym, _, _) = g.hermitian_asymmetry();
            if asym > BASIS_TOL {
                return Err(Error::InvalidBasis(format!("element {idx} is not Hermitian ({asym:e})")));
            }
            let tr = g.trace().norm();
            if tr > BASIS_TOL {
                return Err(Error::InvalidBasis(format!("element {idx} has trace {tr:e}")));
            }
        }
        for (i, a) in flat.iter().enumerate() {
            for (j, b) in flat.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                let dev = (a.hs_inner(b) - C64::new(expected, 0.0)).norm();
                if dev > BASIS_TOL {
                    return Err(Error::InvalidBasis(format!(
                        "Tr(G_{i} G_{j}) deviates from {expected} by {dev:e}"
                    )));
                }
            }
        }
        Ok(Self { dim, groups })
    }

    /// Regroups a flat list into consecutive blocks of `group_size`.
    pub fn from_flat(dim: usize, elements: Vec<CMatrix>, group_size: usize) -> Result<Self> {
        if group_size == 0 || !elements.len().is_multiple_of(group_size) {
            return Err(Error::InvalidBasis(format!(
                "{} elements cannot be split into groups of {group_size}",
                elements.len()
            )));
        }
        let mut groups = Vec::new();
        let mut it = elements.into_iter();
        loop {
            let g: Vec<CMatrix> = it.by_ref().take(group_size).collect();
            if g.is_empty() {
                break;
            }
            groups.push(g);
        }
        Self::new(dim, groups)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of groups `N`.
    pub fn n(&self) -> usize {
        self.groups.len()
    }

    /// Elements per group, `M − 1`.
    pub fn group_size(&self) -> usize {
        self.groups.first().map_or(0, Vec::len)
    }

    pub fn groups(&self) -> &[Vec<CMatrix>] {
        &self.groups
    }

    pub fn element(&self, alpha: usize, k: usize) -> &CMatrix {
        &self.groups[alpha][k]
    }

    pub fn elements(&self) -> impl Iterator<Item = &CMatrix> {
        self.groups.iter().flatten()
    }

    /// Largest deviation of the Gram matrix `Tr(G_i G_j)` from the identity.
    pub fn gram_residual(&self) -> f64 {
        let flat: Vec<&CMatrix> = self.elements().collect();
        let mut worst: f64 = 0.0;
        for (i, a) in flat.iter().enumerate() {
            for (j, b) in flat.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.hs_inner(b) - C64::new(expected, 0.0)).norm());
            }
        }
        worst
    }
}

/// The `d² − 1` generalized Gell-Mann matrices, normalized to `Tr G² = 1`.
///
/// Order: diagonal `D_l = diag(1,…,1,−l,0,…)/√(l(l+1))` for `l = 1..d−1`, then
/// symmetric `(|j⟩⟨k| + |k⟩⟨j|)/√2` for `j < k` in lexicographic order, then
/// antisymmetric `(−i|j⟩⟨k| + i|k⟩⟨j|)/√2` starting with the pair `(d−2, d−1)` and
/// continuing lexicographically. For `d = 3` this puts the matrices in the
/// customary grouping used for qutrit mutually unbiased measurements.
pub fn gellmann_elements(d: usize) -> Result<Vec<CMatrix>> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let s = 1.0 / 2.0.sqrt();
    let mut out = Vec::with_capacity(d * d - 1);
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for v in diag.iter_mut().take(l) {
            *v = norm;
        }
        diag[l] = -(l as f64) * norm;
        out.push(CMatrix::from_diag(&diag));
    }
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        let mut m = CMatrix::zeros(d, d);
        m[(j, k)] = C64::new(s, 0.0);
        m[(k, j)] = C64::new(s, 0.0);
        out.push(m);
    }
    let last = (d - 2, d - 1);
    let anti = core::iter::once(last).chain(pairs.iter().copied().filter(|&p| p != last));
    for (j, k) in anti {
        let mut m = CMatrix::zeros(d, d);
        m[(j, k)] = C64::new(0.0, -s);
        m[(k, j)] = C64::new(0.0, s);
        out.push(m);
    }
    Ok(out)
}

/// Gell-Mann basis grouped into `d + 1` blocks of `d − 1`, as needed for `M = d`.
pub fn gellmann_basis(d: usize) -> Result<HermitianBasis> {
    HermitianBasis::from_flat(d, gellmann_elements(d)?, d - 1)
}

/// The single-qubit Pauli matrices `σ_0 = I, σ_1, σ_2, σ_3`.
pub fn pauli_matrices() -> [CMatrix; 4] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMatrix::identity(2),
        CMatrix::new(2, 2, vec![z, one, one, z]).expect("2x2"),
        CMatrix::new(2, 2, vec![z, -i, i, z]).expect("2x2"),
        CMatrix::new(2, 2, vec![one, z, z, -one]).expect("2x2"),
    ]
}

/// `G = σ_a ⊗ σ_b / 2` for `(a, b) ≠ (0, 0)`, ordered with `a` major; fifteen
/// groups of one element each.
pub fn pauli_product_basis() -> HermitianBasis {
    let sigma = pauli_matrices();
    let mut elements = Vec::with_capacity(15);
    for a in 0..4 {
        for b in 0..4 {
            if (a, b) != (0, 0) {
                elements.push(sigma[a].kron(&sigma[b]).scale_real(0.5));
            }
        }
    }
    HermitianBasis::from_flat(4, elements, 1).expect("Pauli products are orthonormal")
}

/// A symmetric `(N, M)`-POVM.
#[derive(Clone, Debug)]
pub struct SymmetricPovm {
    dim: usize,
    m: usize,
    t: Option<f64>,
    x: f64,
    operators: Vec<Vec<CMatrix>>,
}

impl SymmetricPovm {
    /// Wraps explicit operators. `x` is read off `Tr E²`; the grid must pass
    /// [`verify_symmetric`] with residual at most `tol`.
    pub fn from_operators(dim: usize, operators: Vec<Vec<CMatrix>>, t: Option<f64>, tol: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let m = operators.first().map_or(0, Vec::len);
        if operators.is_empty() || m < 2 {
            return Err(Error::InvalidBasis("need at least one measurement with two outcomes".into()));
        }
        for (a, row) in operators.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidBasis(format!("measurement {a} has {} outcomes, expected {m}", row.len())));
            }
            for e in row {
                if e.rows() != dim || e.cols() != dim {
                    return Err(Error::Shape {
                        expected: format!("{dim}x{dim}"),
                        actual: format!("{}x{}", e.rows(), e.cols()),
                    });
                }
            }
        }
        let count = (operators.len() * m) as f64;
        let x = operators.iter().flatten().map(|e| e.hs_inner(e).re).sum::<f64>() / count;
        let povm = Self { dim, m, t, x, operators };
        povm.check_x_range()?;
        let report = verify_symmetric(&povm);
        if report.residual > tol {
            return Err(Error::NotSymmetric { residual: report.residual });
        }
        if report.min_eigenvalue < -PSD_FLOOR.max(tol) {
            return Err(Error::NotSymmetric { residual: -report.min_eigenvalue });
        }
        Ok(povm)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.operators.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> Option<f64> {
        self.t
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        let (d, m) = (self.dim as f64, self.m as f64);
        (d - m * self.x) / (m * (m - 1.0))
    }

    pub fn z(&self) -> f64 {
        self.dim as f64 / (self.m * self.m) as f64
    }

    /// `κ₊ = (d³ − xM²)/(dM(M − 1))`.
    pub fn kappa_plus(&self) -> f64 {
        let (d, m) = (self.dim as f64, self.m as f64);
        (d * d * d - self.x * m * m) / (d * m * (m - 1.0))
    }

    /// `κ₋ = x − y`.
    pub fn kappa_minus(&self) -> f64 {
        self.x - self.y()
    }

    pub fn x_bounds(&self) -> (f64, f64) {
        x_bounds(self.dim, self.m)
    }

    /// `N(M − 1) = d² − 1`.
    pub fn is_info_complete(&self) -> bool {
        self.n() * (self.m - 1) == self.dim * self.dim - 1
    }

    /// Every `E_{α,k}` is a projector, i.e. `Tr E² = Tr E`, so `x = d/M`.
    pub fn is_projective(&self, tol: f64) -> bool {
        (self.x - self.dim as f64 / self.m as f64).abs() <= tol
    }

    pub fn operators(&self) -> &[Vec<CMatrix>] {
        &self.operators
    }

    pub fn operator(&self, alpha: usize, k: usize) -> &CMatrix {
        &self.operators[alpha][k]
    }

    /// `Φ_α[X] = (M/d) Σ_k E_{α,k} Tr(X E_{α,k})`.
    pub fn measure_prepare(&self, alpha: usize) -> Superoperator {
        let c = self.m as f64 / self.dim as f64;
        let ops = &self.operators[alpha];
        Superoperator::from_fn(self.dim, |x| {
            let d = self.dim;
            let mut out = CMatrix::zeros(d, d);
            for e in ops {
                out += &e.scale(e.hs_inner(x) * c);
            }
            out
        })
    }

    /// `Σ_α γ_α Σ_k E_{α,k} ⊗ E_{α,k}`.
    pub fn weighted_tensor_sum(&self, gamma: &[f64]) -> CMatrix {
        let n = self.dim * self.dim;
        let mut out = CMatrix::zeros(n, n);
        for (row, &g) in self.operators.iter().zip(gamma) {
            if g == 0.0 {
                continue;
            }
            for e in row {
                out += &e.kron(e).scale_real(g);
            }
        }
        out
    }

    fn check_x_range(&self) -> Result<()> {
        let (lower, upper) = self.x_bounds();
        let slack = 1e-10 * upper.max(1.0);
        if self.x <= lower + slack || self.x > upper + slack {
            return Err(Error::ParameterOutOfRange { x: self.x, lower, upper });
        }
        Ok(())
    }
}

/// `(d/M², min(d²/M², d/M))`.
pub fn x_bounds(d: usize, m: usize) -> (f64, f64) {
    let (d, m) = (d as f64, m as f64);
    (d / (m * m), (d * d / (m * m)).min(d / m))
}

/// `x = d/M² + t²(M − 1)(√M + 1)²`.
pub fn x_from_t(d: usize, m: usize, t: f64) -> f64 {
    let (d, m) = (d as f64, m as f64);
    let r = m.sqrt() + 1.0;
    d / (m * m) + t * t * (m - 1.0) * r * r
}

fn check_grouping(basis: &HermitianBasis, n: usize, m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidBasis(format!("M must be at least 2, got {m}")));
    }
    if basis.n() != n || basis.group_size() != m - 1 {
        return Err(Error::InvalidBasis(format!(
            "basis has {} groups of {}, expected {n} groups of {}",
            basis.n(),
            basis.group_size(),
            m - 1
        )));
    }
    Ok(())
}

/// The operators `H_{α,k}` for `k = 1..M`.
fn h_operators(basis: &HermitianBasis, m: usize) -> Vec<Vec<CMatrix>> {
    let d = basis.dim();
    let sm = (m as f64).sqrt();
    basis
        .groups()
        .iter()
        .map(|group| {
            let g_alpha = linear_combination((d, d), group.iter().map(|g| (1.0, g)));
            let mut row: Vec<CMatrix> = group
                .iter()
                .map(|g| &g_alpha - &g.scale_real(sm * (sm + 1.0)))
                .collect();
            row.push(g_alpha.scale_real(sm + 1.0));
            row
        })
        .collect()
}

fn operators_at(h: &[Vec<CMatrix>], d: usize, m: usize, t: f64) -> Vec<Vec<CMatrix>> {
    let base = CMatrix::identity(d).scale_real(1.0 / m as f64);
    h.iter()
        .map(|row| row.iter().map(|hk| &base + &hk.scale_real(t)).collect())
        .collect()
}

fn min_eigenvalue(ops: &[Vec<CMatrix>]) -> f64 {
    ops.iter()
        .flatten()
        .map(|e| hermitian_eigensystem(e).map_or(f64::NEG_INFINITY, |eig| eig.min()))
        .fold(f64::INFINITY, f64::min)
}

/// `E_{α,k} = I/M + t·H_{α,k}`.
pub fn povm_from_basis(basis: &HermitianBasis, n: usize, m: usize, t: f64) -> Result<SymmetricPovm> {
    check_grouping(basis, n, m)?;
    let d = basis.dim();
    let x = x_from_t(d, m, t);
    let (lower, upper) = x_bounds(d, m);
    if x <= lower || x > upper * (1.0 + 1e-10) {
        return Err(Error::ParameterOutOfRange { x, lower, upper });
    }
    let ops = operators_at(&h_operators(basis, m), d, m, t);
    let min = min_eigenvalue(&ops);
    if min < -PSD_FLOOR {
        return Err(Error::InadmissibleT { t, min_eigenvalue: min });
    }
    Ok(SymmetricPovm {
        dim: d,
        m,
        t: Some(t),
        x,
        operators: ops,
    })
}

/// Admissible interval `[t_min, t_max]` of `t` for which every `E_{α,k}(t)` is
/// positive semidefinite, located by bisection to `1e-12`.
pub fn max_admissible_t(basis: &HermitianBasis, n: usize, m: usize) -> Result<(f64, f64)> {
    check_grouping(basis, n, m)?;
    let d = basis.dim();
    let h = h_operators(basis, m);
    let feasible = |t: f64| min_eigenvalue(&operators_at(&h, d, m, t)) >= -BISECTION_FLOOR;
    let edge = |sign: f64| {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while feasible(sign * hi) {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if feasible(sign * mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        sign * lo
    };
    Ok((edge(-1.0), edge(1.0)))
}

fn mub_vectors(d: usize) -> Result<Vec<Vec<Vec<C64>>>> {
    let prime = d >= 2 && (2..d).all(|p| !d.is_multiple_of(p));
    if !prime {
        return Err(Error::NotPrime(d));
    }
    if ![2, 3, 5].contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut bases = Vec::with_capacity(d + 1);
    bases.push(
        (0..d)
            .map(|k| (0..d).map(|j| C64::new(if j == k { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect(),
    );
    for a in 0..d {
        let basis = (0..d)
            .map(|b| {
                (0..d)
                    .map(|j| {
                        let phase = if d == 2 {
                            // i^{a j²}(−1)^{b j}
                            PI * (0.5 * (a * j * j) as f64 + (b * j) as f64)
                        } else {
                            2.0 * PI * ((a * j * j + b * j) % d) as f64 / d as f64
                        };
                        C64::from_polar(norm, phase)
                    })
                    .collect()
            })
            .collect();
        bases.push(basis);
    }
    Ok(bases)
}

/// Complete set of `d + 1` mutually unbiased bases for prime `d ∈ {2, 3, 5}`:
/// the computational basis followed by the bases with amplitudes
/// `ω^{a j² + b j}/√d` (`b` labels the outcome). For `d = 2` these are the
/// eigenbases of `σ_3, σ_1, σ_2`.
pub fn mub_povm(d: usize) -> Result<SymmetricPovm> {
    let bases = mub_vectors(d)?;
    let operators = bases
        .iter()
        .map(|basis| basis.iter().map(|v| CMatrix::outer(v, v)).collect())
        .collect();
    let df = d as f64;
    Ok(SymmetricPovm {
        dim: d,
        m: d,
        t: Some(1.0 / (df.sqrt() * (df.sqrt() + 1.0))),
        x: 1.0,
        operators,
    })
}

/// Mutually unbiased measurements from the Gell-Mann basis at the largest
/// admissible `t`. For `d = 3` this is `t = 1/(3(1 + √3))`, giving `x = 5/9`.
pub fn gellmann_mum_povm(d: usize) -> Result<SymmetricPovm> {
    let basis = gellmann_basis(d)?;
    let t = if d == 3 {
        1.0 / (3.0 * (1.0 + 3.0.sqrt()))
    } else {
        max_admissible_t(&basis, d + 1, d)?.1
    };
    povm_from_basis(&basis, d + 1, d, t)
}

/// The `(15, 2)`-POVM of rank-2 projectors `E_{α,±} = I/2 ± G_α` on a ququart,
/// with `G_α` the normalized Pauli products. Outcome `k = 1` is `I/2 − G_α`.
pub fn pauli_15_2_povm() -> SymmetricPovm {
    let t = 2.0.sqrt() - 1.0;
    povm_from_basis(&pauli_product_basis(), 15, 2, t).expect("t = √2 − 1 is the projective point")
}

/// Estimated constants and worst constraint violation of a POVM.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SymmetryReport {
    pub x: f64,
    /// Mean same-measurement cross trace.
    pub y: f64,
    /// Mean cross-measurement trace; `None` when `N = 1`.
    pub z: Option<f64>,
    /// Worst deviation over completeness, trace, `x`, `y` and `z` constraints.
    pub residual: f64,
    pub min_eigenvalue: f64,
    pub info_complete: bool,
}

/// Checks every trace constraint against the POVM's declared `x`.
pub fn verify_symmetric(p: &SymmetricPovm) -> SymmetryReport {
    let d = p.dim;
    let (m, n) = (p.m, p.n());
    let id = CMatrix::identity(d);
    let mut residual: f64 = 0.0;
    let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
    let (mut cy, mut cz) = (0usize, 0usize);
    let (x, y, z) = (p.x, p.y(), p.z());
    let tr_expected = d as f64 / m as f64;

    for (a, row) in p.operators.iter().enumerate() {
        let sum = linear_combination((d, d), row.iter().map(|e| (1.0, e)));
        residual = residual.max(sum.max_abs_diff(&id));
        for (k, e) in row.iter().enumerate() {
            residual = residual.max((e.trace() - C64::new(tr_expected, 0.0)).norm());
            for (b, row2) in p.operators.iter().enumerate().skip(a) {
                for (l, f) in row2.iter().enumerate() {
                    if b == a && l < k {
                        continue;
                    }
                    let v = e.hs_inner(f);
                    let target = if a != b {
                        sz += v.re;
                        cz += 1;
                        z
                    } else if k == l {
                        sx += v.re;
                        x
                    } else {
                        sy += v.re;
                        cy += 1;
                        y
                    };
                    residual = residual.max((v - C64::new(target, 0.0)).norm());
                }
            }
        }
    }

    SymmetryReport {
        x: sx / (n * m) as f64,
        y: if cy > 0 { sy / cy as f64 } else { y },
        z: (cz > 0).then(|| sz / cz as f64),
        residual,
        min_eigenvalue: min_eigenvalue(&p.operators),
        info_complete: p.is_info_complete(),
    }
}

/// Outcome of the conical 2-design identity `Σ E⊗E = κ₊ I⊗I + κ₋ F`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DesignReport {
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    /// Sup-norm residual of the tensor identity; `None` for incomplete POVMs.
    pub residual: Option<f64>,
    /// Sup-norm residual of `Σ_α Φ_α = (M/d)(κ₊ d Φ₀ + κ₋ id)`.
    pub lemma_residual: Option<f64>,
    pub info_complete: bool,
}

pub fn conical_design_check(p: &SymmetricPovm) -> DesignReport {
    let (kp, km) = (p.kappa_plus(), p.kappa_minus());
    let info_complete = p.is_info_complete();
    if !info_complete {
        return DesignReport {
            kappa_plus: kp,
            kappa_minus: km,
            residual: None,
            lemma_residual: None,
            info_complete,
        };
    }
    let d = p.dim;
    let sum = p.weighted_tensor_sum(&vec![1.0; p.n()]);
    let target = &CMatrix::identity(d * d).scale_real(kp) + &CMatrix::flip(d).scale_real(km);
    let residual = sum.max_abs_diff(&target);

    let phis: Vec<Superoperator> = (0..p.n()).map(|a| p.measure_prepare(a)).collect();
    let total = Superoperator::combination(d, phis.iter().map(|s| (1.0, s)));
    let c = p.m as f64 / d as f64;
    let phi0 = Superoperator::depolarizing(d);
    let id = Superoperator::identity(d);
    let expected = Superoperator::combination(d, [(c * kp * d as f64, &phi0), (c * km, &id)]);
    DesignReport {
        kappa_plus: kp,
        kappa_minus: km,
        residual: Some(residual),
        lemma_residual: Some(total.max_abs_diff(&expected)),
        info_complete,
    }
}

/// Largest `| |⟨e|f⟩|² − 1/d |` over vectors from distinct bases of [`mub_povm`].
pub fn mub_overlap_residual(d: usize) -> Result<f64> {
    let bases = mub_vectors(d)?;
    let target = 1.0 / d as f64;
    let mut worst: f64 = 0.0;
    for (i, a) in bases.iter().enumerate() {
        for b in bases.iter().skip(i + 1) {
            for u in a {
                for v in b {
                    let ip: C64 = u.iter().zip(v).map(|(p, q)| p.conj() * q).sum();
                    worst = worst.max((ip.norm_sqr() - target).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Human-readable family label used in reports.
pub fn describe(p: &SymmetricPovm) -> String {
    format!("({}, {})-POVM, d = {}, x = {}", p.n(), p.m(), p.dim(), p.x())
}
