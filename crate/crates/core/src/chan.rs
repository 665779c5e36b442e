//! Measure-and-prepare channels built from a symmetric POVM and their mixtures.
//!
//! For a POVM `E_{α,k}` the channels are
//!
//! ```text
//! Φ_α[X] = (M/d) Σ_k E_{α,k} Tr(X E_{α,k}),   Ψ_α = (M Φ₀ − Φ_α)/(M − 1),
//! ```
//!
//! and both share the eigenoperators `U_{α,k} = Σ_l ω^{kl} E_{α,l}`, `ω = e^{2πi/M}`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::matcore::{CMatrix, PsdCheck, Superoperator, C64};
use crate::measure::{verify_symmetric, SymmetricPovm};
use crate::{Error, Result};

/// Largest POVM residual accepted by [`ChannelFamily::build`].
pub const FAMILY_RESIDUAL_TOL: f64 = 1e-8;

/// Slack granted to the closed-form inequalities.
const INEQUALITY_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ChannelFamily {
    povm: SymmetricPovm,
    phi0: Superoperator,
    phi: Vec<Superoperator>,
    psi: Vec<Superoperator>,
    eigenops: Vec<Vec<CMatrix>>,
}

impl ChannelFamily {
    pub fn build(povm: SymmetricPovm) -> Result<Self> {
        let report = verify_symmetric(&povm);
        if report.residual > FAMILY_RESIDUAL_TOL {
            return Err(Error::NotSymmetric { residual: report.residual });
        }
        let d = povm.dim();
        let m = povm.m();
        let phi0 = Superoperator::depolarizing(d);
        let phi: Vec<Superoperator> = (0..povm.n()).map(|a| povm.measure_prepare(a)).collect();
        let psi = phi
            .iter()
            .map(|p| Superoperator::combination(d, [(m as f64, &phi0), (-1.0, p)]).scale(1.0 / (m as f64 - 1.0)))
            .collect();
        let eigenops = povm
            .operators()
            .iter()
            .map(|row| {
                (1..m)
                    .map(|k| {
                        let mut u = CMatrix::zeros(d, d);
                        for (l, e) in row.iter().enumerate() {
                            let w = C64::from_polar(1.0, 2.0 * PI * ((k * (l + 1)) % m) as f64 / m as f64);
                            u += &e.scale(w);
                        }
                        u
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            povm,
            phi0,
            phi,
            psi,
            eigenops,
        })
    }

    pub fn povm(&self) -> &SymmetricPovm {
        &self.povm
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    pub fn n(&self) -> usize {
        self.povm.n()
    }

    pub fn m(&self) -> usize {
        self.povm.m()
    }

    pub fn phi0(&self) -> &Superoperator {
        &self.phi0
    }

    pub fn phi(&self, alpha: usize) -> &Superoperator {
        &self.phi[alpha]
    }

    pub fn psi(&self, alpha: usize) -> &Superoperator {
        &self.psi[alpha]
    }

    /// `U_{α,k}` for `k = 1..M−1` (stored zero-based).
    pub fn eigenop(&self, alpha: usize, k: usize) -> &CMatrix {
        &self.eigenops[alpha][k]
    }

    pub fn eigenops(&self) -> &[Vec<CMatrix>] {
        &self.eigenops
    }

    /// `M(x − y)/d`, the eigenvalue of `Φ_α` on `U_{α,k}`.
    pub fn phi_eigenvalue(&self) -> f64 {
        self.m() as f64 * self.povm.kappa_minus() / self.dim() as f64
    }

    /// Complete set of mutually unbiased bases: `N = d + 1`, `M = d`, `x = 1`.
    pub fn is_mub(&self) -> bool {
        let d = self.dim();
        self.n() == d + 1 && self.m() == d && self.povm.is_projective(1e-10)
    }

    /// `‖Σ_α Φ_α − (M/d)(κ₊ d Φ₀ + κ₋ id)‖`.
    pub fn sum_identity_residual(&self) -> f64 {
        let d = self.dim();
        let total = Superoperator::combination(d, self.phi.iter().map(|s| (1.0, s)));
        let c = self.m() as f64 / d as f64;
        let id = Superoperator::identity(d);
        let expected = Superoperator::combination(
            d,
            [(c * self.povm.kappa_plus() * d as f64, &self.phi0), (c * self.povm.kappa_minus(), &id)],
        );
        total.max_abs_diff(&expected)
    }

    /// `Σ_α c_α Φ_α`.
    pub fn phi_combination(&self, coefficients: &[f64]) -> Superoperator {
        Superoperator::combination(self.dim(), coefficients.iter().copied().zip(&self.phi))
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CompositionReport {
    /// `max_{α≠β} ‖Φ_αΦ_β − Φ₀‖`.
    pub cross: f64,
    /// `max_α ‖Φ_α² − (M/d)[(x − y)Φ_α + M y Φ₀]‖`.
    pub square: f64,
    /// `‖Φ₀² − Φ₀‖`.
    pub depolarizing: f64,
}

impl CompositionReport {
    pub fn max(&self) -> f64 {
        self.cross.max(self.square).max(self.depolarizing)
    }
}

pub fn composition_check(f: &ChannelFamily) -> CompositionReport {
    let d = f.dim();
    let (m, x, y) = (f.m() as f64, f.povm.x(), f.povm.y());
    let c = m / d as f64;
    let mut cross: f64 = 0.0;
    let mut square: f64 = 0.0;
    for (a, pa) in f.phi.iter().enumerate() {
        for (b, pb) in f.phi.iter().enumerate() {
            let prod = pa.compose(pb);
            if a == b {
                let expected = Superoperator::combination(d, [(c * (x - y), pa), (c * m * y, &f.phi0)]);
                square = square.max(prod.max_abs_diff(&expected));
            } else {
                cross = cross.max(prod.max_abs_diff(&f.phi0));
            }
        }
    }
    CompositionReport {
        cross,
        square,
        depolarizing: f.phi0.compose(&f.phi0).max_abs_diff(&f.phi0),
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EigenOpsReport {
    /// `max |Tr(U_{α,k}U_{β,l}†) − M(x − y)δδ|`.
    pub orthogonality: f64,
    /// `max ‖Φ_α[U_{β,l}] − (M/d)(x − y)δ_{αβ}U_{β,l}‖`.
    pub phi_action: f64,
    /// `max ‖Ψ_α[U_{β,l}] + M(x − y)/(d(M − 1))δ_{αβ}U_{β,l}‖`.
    pub psi_action: f64,
    /// Every `U_{α,k}` is unitary to `1e-10`.
    pub unitary: bool,
    pub projective: bool,
}

pub fn eigen_ops(f: &ChannelFamily) -> EigenOpsReport {
    let d = f.dim();
    let m = f.m() as f64;
    let km = f.povm.kappa_minus();
    let phi_ev = f.phi_eigenvalue();
    let psi_ev = -m * km / (d as f64 * (m - 1.0));
    let id = CMatrix::identity(d);
    let (mut orthogonality, mut phi_action, mut psi_action): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut unitary = true;
    let flat: Vec<(usize, &CMatrix)> = f
        .eigenops
        .iter()
        .enumerate()
        .flat_map(|(a, row)| row.iter().map(move |u| (a, u)))
        .collect();
    for (i, &(a, u)) in flat.iter().enumerate() {
        for (j, &(_, v)) in flat.iter().enumerate() {
            let expected = if i == j { m * km } else { 0.0 };
            orthogonality = orthogonality.max((v.hs_inner(u) - C64::new(expected, 0.0)).norm());
        }
        for b in 0..f.n() {
            let (pe, se) = if a == b { (phi_ev, psi_ev) } else { (0.0, 0.0) };
            phi_action = phi_action.max(f.phi[b].apply(u).max_abs_diff(&u.scale_real(pe)));
            psi_action = psi_action.max(f.psi[b].apply(u).max_abs_diff(&u.scale_real(se)));
        }
        unitary &= (u * &u.adjoint()).max_abs_diff(&id) <= 1e-10;
    }
    EigenOpsReport {
        orthogonality,
        phi_action,
        psi_action,
        unitary,
        projective: f.povm.is_projective(1e-10),
    }
}

/// Which mixture a [`MixtureSpec`] parameterizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Variant {
    /// `Λ = (dp₀ − 1)/(d − 1)·id + d/(d − 1)·Σ p_α Φ_α`.
    Lambda,
    /// `Λ̃ = (dq₀ − 1)/(d − 1)·id + d/(d − 1)·Σ q_α Ψ_α`.
    LambdaTilde,
}

/// Mixture weights `(p₀, p₁, …, p_N)` together with the channel eigenvalues
/// `λ_α` they produce. Each `λ_α` is `(M − 1)`-fold degenerate and stored once.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MixtureSpec {
    pub variant: Variant,
    pub probs: Vec<f64>,
    pub eigenvalues: Vec<f64>,
}

impl MixtureSpec {
    /// Builds a spec from weights, computing eigenvalues. Weights are not
    /// validated here; see [`MixtureSpec::validate`].
    pub fn from_probs(f: &ChannelFamily, variant: Variant, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != f.n() + 1 {
            return Err(Error::LengthMismatch {
                expected: f.n() + 1,
                actual: probs.len(),
            });
        }
        let d = f.dim() as f64;
        let mk = f.m() as f64 * f.povm.kappa_minus();
        let m1 = f.m() as f64 - 1.0;
        let p0 = probs[0];
        let eigenvalues = probs[1..]
            .iter()
            .map(|&p| match variant {
                Variant::Lambda => (d * p0 + mk * p - 1.0) / (d - 1.0),
                Variant::LambdaTilde => (d * p0 - 1.0 - mk * p / m1) / (d - 1.0),
            })
            .collect();
        Ok(Self {
            variant,
            probs,
            eigenvalues,
        })
    }

    /// Checks nonnegativity, normalization and, for [`Variant::Lambda`], `p₀ ≥ 1/d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        let tol = 1e-12;
        if let Some((i, p)) = self.probs.iter().enumerate().find(|(_, p)| **p < -tol || !p.is_finite()) {
            return Err(Error::InvalidProbabilities(format!("weight {i} is {p}")));
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > tol * self.probs.len() as f64 {
            return Err(Error::InvalidProbabilities(format!("weights sum to {sum}")));
        }
        if self.variant == Variant::Lambda && self.probs[0] < 1.0 / d as f64 - tol {
            return Err(Error::InvalidProbabilities(format!(
                "p0 = {} is below 1/d = {}",
                self.probs[0],
                1.0 / d as f64
            )));
        }
        Ok(())
    }

    pub fn is_valid(&self, d: usize) -> bool {
        self.validate(d).is_ok()
    }
}

/// Mixture map for arbitrary real weights, without validation.
pub fn mixture_from_coefficients(f: &ChannelFamily, variant: Variant, probs: &[f64]) -> Superoperator {
    let d = f.dim();
    let df = d as f64;
    let id = Superoperator::identity(d);
    let family = match variant {
        Variant::Lambda => &f.phi,
        Variant::LambdaTilde => &f.psi,
    };
    let mut terms: Vec<(f64, &Superoperator)> = Vec::with_capacity(probs.len());
    terms.push(((df * probs[0] - 1.0) / (df - 1.0), &id));
    terms.extend(probs[1..].iter().map(|p| df * p / (df - 1.0)).zip(family));
    Superoperator::combination(d, terms)
}

/// Validated mixture map together with its eigenvalues.
pub fn mixture_channel(f: &ChannelFamily, spec: &MixtureSpec) -> Result<(Superoperator, Vec<f64>)> {
    if spec.probs.len() != f.n() + 1 {
        return Err(Error::LengthMismatch {
            expected: f.n() + 1,
            actual: spec.probs.len(),
        });
    }
    spec.validate(f.dim())?;
    Ok((mixture_from_coefficients(f, spec.variant, &spec.probs), spec.eigenvalues.clone()))
}

/// Inverts the eigenvalue formulas. The recovered weights always sum to one;
/// whether they form a valid distribution is reported by [`MixtureSpec::is_valid`].
pub fn spec_from_eigenvalues(f: &ChannelFamily, lambda: &[f64], variant: Variant) -> Result<MixtureSpec> {
    let n = f.n();
    if lambda.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: lambda.len(),
        });
    }
    let d = f.dim() as f64;
    let nf = n as f64;
    let mk = f.m() as f64 * f.povm.kappa_minus();
    let m1 = f.m() as f64 - 1.0;
    let sum: f64 = lambda.iter().sum();
    let mut probs = Vec::with_capacity(n + 1);
    match variant {
        Variant::Lambda => {
            let p0 = ((d - 1.0) * sum + nf - mk) / (d * nf - mk);
            probs.push(p0);
            probs.extend(lambda.iter().map(|&l| ((d - 1.0) * l + 1.0 - d * p0) / mk));
        }
        Variant::LambdaTilde => {
            let q0 = (m1 * (d - 1.0) * sum + m1 * nf + mk) / (m1 * nf * d + mk);
            probs.push(q0);
            probs.extend(lambda.iter().map(|&l| m1 * (d * q0 - 1.0 - (d - 1.0) * l) / mk));
        }
    }
    Ok(MixtureSpec {
        variant,
        probs,
        eigenvalues: lambda.to_vec(),
    })
}

/// Closed-form sufficient conditions for complete positivity of the mixture:
///
/// ```text
/// Λ:  κ₋/d ≤ (1/M)Σλ ≤ κ₋/d + κ₊ min λ
/// Λ̃:  −M(x − y)/(d(M − 1)) ≤ Σλ̃ ≤ N,  max λ̃ ≤ [d(M − 1)Σλ̃ + M(x − y)]/[d(d² − 1) + M(x − y)]
/// ```
pub fn cp_sufficient(f: &ChannelFamily, spec: &MixtureSpec) -> bool {
    let lambda = &spec.eigenvalues;
    if lambda.is_empty() {
        return false;
    }
    let d = f.dim() as f64;
    let m = f.m() as f64;
    let (kp, km) = (f.povm.kappa_plus(), f.povm.kappa_minus());
    let sum: f64 = lambda.iter().sum();
    let min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let max = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s = INEQUALITY_SLACK;
    match spec.variant {
        Variant::Lambda => {
            let mean = sum / m;
            km / d <= mean + s && mean <= km / d + kp * min + s
        }
        Variant::LambdaTilde => {
            let mk = m * km;
            let bound = (d * (m - 1.0) * sum + mk) / (d * (d * d - 1.0) + mk);
            -mk / (d * (m - 1.0)) <= sum + s && sum <= f.n() as f64 + s && max <= bound + s
        }
    }
}

/// Choi-matrix positivity.
pub fn cp_exact(s: &Superoperator, tol: f64) -> PsdCheck {
    s.choi().is_psd(tol).expect("Choi matrices of Hermiticity-preserving maps are Hermitian")
}

/// `−1/(d − 1) ≤ Σλ ≤ 1 + d·min λ`, exact for mixtures over complete sets of
/// mutually unbiased bases.
pub fn fujiwara_algoet(f: &ChannelFamily, lambda: &[f64]) -> Result<bool> {
    if !f.is_mub() {
        return Err(Error::NotMub);
    }
    if lambda.len() != f.n() {
        return Err(Error::LengthMismatch {
            expected: f.n(),
            actual: lambda.len(),
        });
    }
    let d = f.dim() as f64;
    let sum: f64 = lambda.iter().sum();
    let min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let s = INEQUALITY_SLACK;
    Ok(-1.0 / (d - 1.0) <= sum + s && sum <= 1.0 + d * min + s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum EbBranch {
    /// All `λ ≥ 0` and `Σλ ≤ M(x − y)/d`.
    NonNegative,
    /// All `λ ≤ 0` and `Σ|λ| ≤ M(x − y)/(d(M − 1))`.
    NonPositive,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EbReport {
    pub holds: bool,
    pub branch: Option<EbBranch>,
    /// The sum runs over all `N` eigenvalues; flagged when `N ≠ d + 1`.
    pub sum_over_n_differs: bool,
}

/// Sufficient condition for the mixture with eigenvalues `λ` to be
/// entanglement breaking.
pub fn eb_sufficient(f: &ChannelFamily, lambda: &[f64]) -> EbReport {
    let d = f.dim() as f64;
    let m = f.m() as f64;
    let mk = m * f.povm.kappa_minus();
    let s = INEQUALITY_SLACK;
    let sum_abs: f64 = lambda.iter().map(|l| l.abs()).sum();
    let branch = if lambda.iter().all(|&l| l >= -s) && sum_abs <= mk / d + s {
        Some(EbBranch::NonNegative)
    } else if lambda.iter().all(|&l| l <= s) && sum_abs <= mk / (d * (m - 1.0)) + s {
        Some(EbBranch::NonPositive)
    } else {
        None
    };
    EbReport {
        holds: branch.is_some(),
        branch,
        sum_over_n_differs: f.n() != f.dim() + 1,
    }
}

/// Positivity of the partially transposed Choi matrix, necessary for
/// entanglement breaking.
pub fn ppt_necessary(s: &Superoperator, tol: f64) -> PsdCheck {
    s.choi()
        .partial_transpose()
        .is_psd(tol)
        .expect("Choi matrices of Hermiticity-preserving maps are Hermitian")
}

/// Serializable summary of a single channel classification.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChannelReport {
    pub spec: MixtureSpec,
    pub spec_valid: bool,
    pub cp_sufficient: bool,
    pub cp_exact: bool,
    pub min_choi_eigenvalue: f64,
    pub fujiwara_algoet: Option<bool>,
    pub eb_sufficient: EbReport,
    pub ppt: bool,
    pub min_ppt_eigenvalue: f64,
}

pub fn classify_channel(f: &ChannelFamily, spec: &MixtureSpec, tol: f64) -> ChannelReport {
    let map = mixture_from_coefficients(f, spec.variant, &spec.probs);
    let cp = cp_exact(&map, tol);
    let ppt = ppt_necessary(&map, tol);
    ChannelReport {
        spec: spec.clone(),
        spec_valid: spec.is_valid(f.dim()),
        cp_sufficient: cp_sufficient(f, spec),
        cp_exact: cp.psd,
        min_choi_eigenvalue: cp.min_eigenvalue,
        fujiwara_algoet: fujiwara_algoet(f, &spec.eigenvalues).ok(),
        eb_sufficient: eb_sufficient(f, &spec.eigenvalues),
        ppt: ppt.psd,
        min_ppt_eigenvalue: ppt.min_eigenvalue,
    }
}

/// Short description of a family for reports.
pub fn family_label(f: &ChannelFamily) -> String {
    format!("({}, {}) d = {}", f.n(), f.m(), f.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{gellmann_mum_povm, mub_povm, pauli_15_2_povm, pauli_product_basis};
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn families() -> Vec<ChannelFamily> {
        vec![
            ChannelFamily::build(mub_povm(2).unwrap()).unwrap(),
            ChannelFamily::build(mub_povm(3).unwrap()).unwrap(),
            ChannelFamily::build(gellmann_mum_povm(3).unwrap()).unwrap(),
            ChannelFamily::build(pauli_15_2_povm()).unwrap(),
        ]
    }

    fn mub3() -> ChannelFamily {
        ChannelFamily::build(mub_povm(3).unwrap()).unwrap()
    }

    #[test]
    fn channels_are_unital_trace_preserving_and_cp() {
        for f in families() {
            for a in 0..f.n() {
                for s in [f.phi(a), f.psi(a)] {
                    assert!(s.unitality_residual() <= 1e-10);
                    assert!(s.dual().unitality_residual() <= 1e-10);
                    let c = cp_exact(s, 1e-9);
                    assert!(c.psd && c.min_eigenvalue >= -1e-12, "{}", family_label(&f));
                }
            }
        }
    }

    #[test]
    fn ququart_phi_matches_closed_form() {
        let f = ChannelFamily::build(pauli_15_2_povm()).unwrap();
        let b = pauli_product_basis();
        for a in 0..15 {
            let g = b.element(a, 0);
            let expected = Superoperator::from_fn(4, |x| {
                &CMatrix::identity(4).scale(x.trace() * 0.25) + &g.scale(g.hs_inner(x))
            });
            assert!(f.phi(a).max_abs_diff(&expected) <= 1e-12);
        }
    }

    #[test]
    fn composition_relations() {
        for f in families() {
            let r = composition_check(&f);
            assert!(r.max() <= 1e-10, "{}: {r:?}", family_label(&f));
        }
    }

    #[test]
    fn ququart_phi_is_idempotent() {
        let f = ChannelFamily::build(pauli_15_2_povm()).unwrap();
        for a in 0..15 {
            assert!(f.phi(a).compose(f.phi(a)).max_abs_diff(f.phi(a)) <= 1e-10);
        }
    }

    #[test]
    fn eigen_operators() {
        for f in families() {
            let r = eigen_ops(&f);
            assert!(r.orthogonality <= 1e-10 && r.phi_action <= 1e-10 && r.psi_action <= 1e-10);
            assert_eq!(r.unitary, r.projective, "{}", family_label(&f));
        }
        assert!(eigen_ops(&mub3()).unitary);
        let mum = ChannelFamily::build(gellmann_mum_povm(3).unwrap()).unwrap();
        assert!(!eigen_ops(&mum).unitary);
    }

    #[test]
    fn sum_identity() {
        for f in families() {
            assert!(f.sum_identity_residual() <= 1e-10);
        }
    }

    #[test]
    fn identity_mixtures() {
        for f in families() {
            let mut probs = vec![0.0; f.n() + 1];
            probs[0] = 1.0;
            for variant in [Variant::Lambda, Variant::LambdaTilde] {
                let spec = MixtureSpec::from_probs(&f, variant, probs.clone()).unwrap();
                let (map, ev) = mixture_channel(&f, &spec).unwrap();
                assert!(map.max_abs_diff(&Superoperator::identity(f.dim())) <= 1e-12);
                assert!(ev.iter().all(|&l| (l - 1.0).abs() <= 1e-12));
            }
        }
    }

    #[test]
    fn uniform_mub_mixture() {
        let f = mub3();
        let probs = vec![1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        let spec = MixtureSpec::from_probs(&f, Variant::Lambda, probs.clone()).unwrap();
        assert!(spec.eigenvalues.iter().all(|&l| (l - 0.25).abs() <= 1e-12));
        let (map, _) = mixture_channel(&f, &spec).unwrap();
        for a in 0..f.n() {
            for u in &f.eigenops()[a] {
                assert!(map.apply(u).max_abs_diff(&u.scale_real(0.25)) <= 1e-10);
            }
        }
        let back = spec_from_eigenvalues(&f, &[0.25; 4], Variant::Lambda).unwrap();
        for (p, q) in back.probs.iter().zip(&probs) {
            assert!((p - q).abs() <= 1e-12);
        }
        assert!(cp_sufficient(&f, &spec));
        let eb = eb_sufficient(&f, &spec.eigenvalues);
        assert_eq!(eb.branch, Some(EbBranch::NonNegative));
        assert!(!eb.sum_over_n_differs);
    }

    #[test]
    fn mixture_rejects_invalid_weights() {
        let f = mub3();
        let low = MixtureSpec::from_probs(&f, Variant::Lambda, vec![0.2, 0.2, 0.2, 0.2, 0.2]).unwrap();
        assert!(matches!(mixture_channel(&f, &low), Err(Error::InvalidProbabilities(_))));
        let neg = MixtureSpec::from_probs(&f, Variant::Lambda, vec![1.1, -0.1, 0.0, 0.0, 0.0]).unwrap();
        assert!(mixture_channel(&f, &neg).is_err());
        let unnorm = MixtureSpec::from_probs(&f, Variant::LambdaTilde, vec![0.5, 0.1, 0.0, 0.0, 0.0]).unwrap();
        assert!(mixture_channel(&f, &unnorm).is_err());
        let tilde = MixtureSpec::from_probs(&f, Variant::LambdaTilde, vec![0.2, 0.2, 0.2, 0.2, 0.2]).unwrap();
        assert!(mixture_channel(&f, &tilde).is_ok());
        assert!(matches!(MixtureSpec::from_probs(&f, Variant::Lambda, vec![1.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn eigenvalue_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in families() {
            for variant in [Variant::Lambda, Variant::LambdaTilde] {
                for _ in 0..50 {
                    let lambda: Vec<f64> = (0..f.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let spec = spec_from_eigenvalues(&f, &lambda, variant).unwrap();
                    assert!((spec.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                    let again = MixtureSpec::from_probs(&f, variant, spec.probs.clone()).unwrap();
                    for (a, b) in again.eigenvalues.iter().zip(&lambda) {
                        assert!((a - b).abs() <= 1e-12);
                    }
                    let map = mixture_from_coefficients(&f, variant, &spec.probs);
                    for (a, row) in f.eigenops().iter().enumerate() {
                        for u in row {
                            assert!(map.apply(u).max_abs_diff(&u.scale_real(lambda[a])) <= 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cp_sufficient_examples() {
        let f = mub3();
        let ones = spec_from_eigenvalues(&f, &[1.0; 4], Variant::Lambda).unwrap();
        assert!(cp_sufficient(&f, &ones));
        assert!((ones.probs[0] - 1.0).abs() < 1e-12);
        let neg = spec_from_eigenvalues(&f, &[-0.1, 0.4, 0.4, 0.4], Variant::Lambda).unwrap();
        assert!(!cp_sufficient(&f, &neg));
    }

    #[test]
    fn cp_exact_examples() {
        let f = mub3();
        assert!(cp_exact(f.phi0(), 1e-9).psd);
        let lambda = [-0.4, 0.2, 0.2, 0.2];
        let spec = spec_from_eigenvalues(&f, &lambda, Variant::Lambda).unwrap();
        let map = mixture_from_coefficients(&f, Variant::Lambda, &spec.probs);
        assert!(!cp_exact(&map, 1e-9).psd);
        assert!(!fujiwara_algoet(&f, &lambda).unwrap());
    }

    #[test]
    fn fujiwara_algoet_examples() {
        let f = mub3();
        assert!(fujiwara_algoet(&f, &[1.0; 4]).unwrap());
        assert!(!fujiwara_algoet(&f, &[-0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]).unwrap());
        let mum = ChannelFamily::build(gellmann_mum_povm(3).unwrap()).unwrap();
        assert_eq!(fujiwara_algoet(&mum, &[1.0; 4]), Err(Error::NotMub));
    }

    #[test]
    fn sufficiency_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in families() {
            for variant in [Variant::Lambda, Variant::LambdaTilde] {
                for _ in 0..300 {
                    let lambda: Vec<f64> = (0..f.n()).map(|_| rng.gen_range(-0.6..1.0)).collect();
                    let spec = spec_from_eigenvalues(&f, &lambda, variant).unwrap();
                    let map = mixture_from_coefficients(&f, variant, &spec.probs);
                    if cp_sufficient(&f, &spec) {
                        assert!(cp_exact(&map, 1e-9).psd, "{} {variant:?} {lambda:?}", family_label(&f));
                    }
                    if eb_sufficient(&f, &lambda).holds {
                        assert!(ppt_necessary(&map, 1e-9).psd);
                    }
                }
            }
        }
    }

    #[test]
    fn eb_examples() {
        let f = mub3();
        assert!(eb_sufficient(&f, &[0.0; 4]).holds);
        let id = Superoperator::identity(3);
        assert!(!eb_sufficient(&f, &[1.0; 4]).holds);
        assert!(!ppt_necessary(&id, 1e-9).psd);
        assert!(ppt_necessary(f.phi0(), 1e-9).psd);
        let q = ChannelFamily::build(pauli_15_2_povm()).unwrap();
        assert!(eb_sufficient(&q, &[0.0; 15]).sum_over_n_differs);
    }
}
