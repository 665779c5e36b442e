//! Time-local generators `L(t) = Σ_α γ_α(t)(Φ_α − id)` and divisibility tests.
//!
//! On the eigenoperators `U_{α,k}` the generator acts as
//! `ξ_α = (M/d)(x − y)γ_α − Σ_β γ_β`, so the dynamical map has eigenvalues
//! `λ_α(t) = exp ∫₀ᵗ ξ_α`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chan::{cp_exact, mixture_from_coefficients, spec_from_eigenvalues, ChannelFamily, Variant};
use crate::matcore::{hermitian_eigensystem, is_psd, CMatrix, PsdCheck, Superoperator, C64};
use crate::measure::gellmann_elements;
use crate::{Error, Result};

/// Largest disagreement tolerated between the trapezoid rule and its
/// half-step refinement.
pub const QUADRATURE_TOL: f64 = 1e-8;

/// Propagators are skipped when some `|λ_α(s)|` falls to this level.
pub const INVERTIBILITY_FLOOR: f64 = 1e-10;

/// Slack on the closed-form inequalities, relative to `max(1, max|γ|)`.
const INEQUALITY_SLACK: f64 = 1e-12;

/// Piecewise-linear samples of the coefficient vector `γ(t)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RateTrajectory {
    times: Vec<f64>,
    gammas: Vec<Vec<f64>>,
}

impl RateTrajectory {
    /// `times` must start at 0 and increase strictly; every sample must have
    /// the same length.
    pub fn new(times: Vec<f64>, gammas: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidTrajectory("empty time grid".into()));
        }
        if times.len() != gammas.len() {
            return Err(Error::InvalidTrajectory(format!(
                "{} times but {} coefficient samples",
                times.len(),
                gammas.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidTrajectory(format!("grid must start at 0, got {}", times[0])));
        }
        if let Some(w) = times.windows(2).find(|w| !w[1].is_finite() || w[1] <= w[0]) {
            return Err(Error::InvalidTrajectory(format!(
                "grid must increase strictly: {} then {}",
                w[0], w[1]
            )));
        }
        let n = gammas[0].len();
        if n == 0 {
            return Err(Error::InvalidTrajectory("coefficient vectors are empty".into()));
        }
        if let Some((i, g)) = gammas.iter().enumerate().find(|(_, g)| g.len() != n) {
            return Err(Error::InvalidTrajectory(format!(
                "sample {i} has {} coefficients, expected {n}",
                g.len()
            )));
        }
        if gammas.iter().flatten().any(|g| !g.is_finite()) {
            return Err(Error::InvalidTrajectory("non-finite coefficient".into()));
        }
        Ok(Self { times, gammas })
    }

    /// Constant `γ` sampled on `times`.
    pub fn constant(gamma: &[f64], times: Vec<f64>) -> Result<Self> {
        let gammas = vec![gamma.to_vec(); times.len()];
        Self::new(times, gammas)
    }

    /// `steps + 1` equally spaced points on `[0, end]`.
    pub fn uniform_grid(end: f64, steps: usize) -> Result<Vec<f64>> {
        if !end.is_finite() || end <= 0.0 || steps == 0 {
            return Err(Error::InvalidTrajectory(format!("grid 0:{end}:{steps} is empty")));
        }
        Ok((0..=steps).map(|i| end * i as f64 / steps as f64).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.gammas
    }

    pub fn n(&self) -> usize {
        self.gammas[0].len()
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("grid is non-empty")
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t <= self.end()) {
            return Err(Error::TimeOutOfRange {
                t,
                start: 0.0,
                end: self.end(),
            });
        }
        Ok(())
    }

    /// Linear interpolation between grid samples.
    pub fn gamma_at(&self, t: f64) -> Result<Vec<f64>> {
        self.check_time(t)?;
        let i = self.times.partition_point(|&s| s <= t);
        if i >= self.times.len() {
            return Ok(self.gammas[self.times.len() - 1].clone());
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.gammas[i - 1]
            .iter()
            .zip(&self.gammas[i])
            .map(|(a, b)| a + w * (b - a))
            .collect())
    }
}

/// `ξ_α = (M/d)(x − y)γ_α − Σγ`.
pub fn xi(f: &ChannelFamily, gamma: &[f64]) -> Vec<f64> {
    let c = f.phi_eigenvalue();
    let sum: f64 = gamma.iter().sum();
    gamma.iter().map(|g| c * g - sum).collect()
}

/// The generator at one instant, with its canonical (diagonal) form.
#[derive(Clone, Debug)]
pub struct GeneratorSnapshot {
    pub time: f64,
    pub gamma: Vec<f64>,
    pub generator: Superoperator,
    pub xi: Vec<f64>,
    /// Coefficients in the traceless generalized Gell-Mann basis.
    pub kossakowski: CMatrix,
    /// Eigenvalues of the Kossakowski matrix, ascending.
    pub canonical_rates: Vec<f64>,
    /// `V_a = Σ_i u_i F_i` normalized to `Tr V†V = 1`.
    pub canonical_operators: Vec<CMatrix>,
    /// `‖L − Σ_a J_a(V_a · V_a† − ½{V_a†V_a, ·})‖`.
    pub reconstruction_residual: f64,
}

impl GeneratorSnapshot {
    /// Worst `‖L[U_{α,k}] − ξ_α U_{α,k}‖`.
    pub fn xi_residual(&self, f: &ChannelFamily) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, row) in f.eigenops().iter().enumerate() {
            for u in row {
                worst = worst.max(self.generator.apply(u).max_abs_diff(&u.scale_real(self.xi[a])));
            }
        }
        worst
    }

    /// `max(|Tr L[E_ij]|, ‖L[I]‖)`.
    pub fn zero_sum_residual(&self) -> f64 {
        let d = self.generator.dim();
        let traces = self.generator.trace_annihilation_residual();
        traces.max(self.generator.apply(&CMatrix::identity(d)).max_abs())
    }
}

/// `X ↦ Σ_a J_a(V_a X V_a† − ½{V_a†V_a, X})`.
pub fn canonical_generator(dim: usize, rates: &[f64], operators: &[CMatrix]) -> Superoperator {
    Superoperator::from_fn(dim, |x| {
        let mut out = CMatrix::zeros(dim, dim);
        for (j, v) in rates.iter().zip(operators) {
            if *j == 0.0 {
                continue;
            }
            let vd = v.adjoint();
            let vv = &vd * v;
            let jump = &(v * x) * &vd;
            let anti = &(&vv * x) + &(x * &vv);
            out += &(&jump - &anti.scale_real(0.5)).scale_real(*j);
        }
        out
    })
}

pub fn generator_at(f: &ChannelFamily, gamma: &[f64]) -> Result<GeneratorSnapshot> {
    let n = f.n();
    if gamma.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: gamma.len(),
        });
    }
    let d = f.dim();
    let total: f64 = gamma.iter().sum();
    let mut terms: Vec<(f64, &Superoperator)> = (0..n).map(|a| (gamma[a], f.phi(a))).collect();
    let id = Superoperator::identity(d);
    terms.push((-total, &id));
    let generator = Superoperator::combination(d, terms);

    let basis = gellmann_elements(d)?;
    let vecs: Vec<Vec<C64>> = basis.iter().map(CMatrix::vectorize).collect();
    let choi = generator.choi();
    let c = choi.matrix();
    let k = vecs.len();
    let kossakowski = CMatrix::from_fn(k, k, |i, j| {
        let cv = c.mul_vec(&vecs[j]);
        vecs[i].iter().zip(&cv).map(|(a, b)| a.conj() * b).sum()
    });
    let eig = hermitian_eigensystem(&kossakowski.hermitian_part())?;
    let canonical_operators: Vec<CMatrix> = (0..k)
        .map(|a| {
            let mut v = CMatrix::zeros(d, d);
            for (i, g) in basis.iter().enumerate() {
                v += &g.scale(eig.vectors[(i, a)]);
            }
            v
        })
        .collect();
    let rebuilt = canonical_generator(d, &eig.values, &canonical_operators);
    let reconstruction_residual = rebuilt.max_abs_diff(&generator);
    Ok(GeneratorSnapshot {
        time: 0.0,
        gamma: gamma.to_vec(),
        xi: xi(f, gamma),
        generator,
        kossakowski,
        canonical_rates: eig.values,
        canonical_operators,
        reconstruction_residual,
    })
}

/// `λ_α(t)` on every grid point.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EigenvalueSeries {
    pub times: Vec<f64>,
    /// `lambdas[i][α] = λ_α(times[i])`.
    pub lambdas: Vec<Vec<f64>>,
    /// Largest gap between the trapezoid and half-step estimates.
    pub refinement_gap: f64,
}

fn interval_integral(f: &ChannelFamily, traj: &RateTrajectory, t0: f64, t1: f64) -> Result<(Vec<f64>, f64)> {
    let h = t1 - t0;
    let tm = 0.5 * (t0 + t1);
    let (x0, xm, x1) = (
        xi(f, &traj.gamma_at(t0)?),
        xi(f, &traj.gamma_at(tm)?),
        xi(f, &traj.gamma_at(t1)?),
    );
    let mut out = Vec::with_capacity(x0.len());
    let mut gap: f64 = 0.0;
    for a in 0..x0.len() {
        let coarse = 0.5 * h * (x0[a] + x1[a]);
        let fine = 0.25 * h * (x0[a] + 2.0 * xm[a] + x1[a]);
        gap = gap.max((fine - coarse).abs());
        out.push((4.0 * fine - coarse) / 3.0);
    }
    Ok((out, gap))
}

/// `∫₀ᵗ ξ_α(τ)dτ` for every `α`; also returns the refinement gap.
pub fn integrated_xi(f: &ChannelFamily, traj: &RateTrajectory, t: f64) -> Result<(Vec<f64>, f64)> {
    if traj.n() != f.n() {
        return Err(Error::LengthMismatch {
            expected: f.n(),
            actual: traj.n(),
        });
    }
    traj.check_time(t)?;
    let mut acc = vec![0.0; f.n()];
    let mut gap: f64 = 0.0;
    for w in traj.times.windows(2) {
        if w[0] >= t {
            break;
        }
        let (part, g) = interval_integral(f, traj, w[0], w[1].min(t))?;
        gap = gap.max(g);
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    if gap > QUADRATURE_TOL {
        return Err(Error::QuadratureMismatch { difference: gap });
    }
    Ok((acc, gap))
}

pub fn evolve_eigenvalues(f: &ChannelFamily, traj: &RateTrajectory) -> Result<EigenvalueSeries> {
    if traj.n() != f.n() {
        return Err(Error::LengthMismatch {
            expected: f.n(),
            actual: traj.n(),
        });
    }
    let mut acc = vec![0.0; f.n()];
    let mut lambdas = Vec::with_capacity(traj.times.len());
    lambdas.push(vec![1.0; f.n()]);
    let mut refinement_gap: f64 = 0.0;
    for w in traj.times.windows(2) {
        let (part, gap) = interval_integral(f, traj, w[0], w[1])?;
        refinement_gap = refinement_gap.max(gap);
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
        lambdas.push(acc.iter().map(|s| s.exp()).collect());
    }
    if refinement_gap > QUADRATURE_TOL {
        return Err(Error::QuadratureMismatch { difference: refinement_gap });
    }
    Ok(EigenvalueSeries {
        times: traj.times.clone(),
        lambdas,
        refinement_gap,
    })
}

fn require_info_complete(f: &ChannelFamily) -> Result<()> {
    let d = f.dim();
    let actual = f.n() * (f.m() - 1);
    if actual != d * d - 1 {
        return Err(Error::NotInformationallyComplete {
            expected: d * d - 1,
            actual,
        });
    }
    Ok(())
}

/// Map with eigenvalues `λ` on the `U_{α,k}`, unital and trace-preserving.
/// Requires an informationally complete family, where these data fix the map.
pub fn map_with_eigenvalues(f: &ChannelFamily, lambda: &[f64]) -> Result<Superoperator> {
    require_info_complete(f)?;
    let spec = spec_from_eigenvalues(f, lambda, Variant::Lambda)?;
    Ok(mixture_from_coefficients(f, Variant::Lambda, &spec.probs))
}

/// `Λ(t)`, rebuilt from its eigenvalues.
pub fn dynamical_map_at(f: &ChannelFamily, traj: &RateTrajectory, t: f64) -> Result<Superoperator> {
    let (integral, _) = integrated_xi(f, traj, t)?;
    let lambda: Vec<f64> = integral.iter().map(|s| s.exp()).collect();
    map_with_eigenvalues(f, &lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum CpBranch {
    /// Every `γ_α ≥ 0`.
    NonNegative,
    /// Every `ζ_α ≥ 0`.
    Zeta,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CpDivSufficient {
    pub holds: bool,
    pub branch: Option<CpBranch>,
    /// `ζ_α = (M − 1)/(N − κ₊)·[Σγ − (N − κ₊)γ_α]`; empty when `N ≤ κ₊`.
    pub zeta: Vec<f64>,
}

fn slack(gamma: &[f64]) -> f64 {
    INEQUALITY_SLACK * gamma.iter().fold(1.0, |m: f64, g| m.max(g.abs()))
}

/// Sufficient condition for CP-divisibility: all `γ_α ≥ 0`, or all `ζ_α ≥ 0`.
pub fn cpdiv_sufficient(f: &ChannelFamily, gamma: &[f64]) -> CpDivSufficient {
    let n = f.n() as f64;
    let kp = f.povm().kappa_plus();
    let m1 = f.m() as f64 - 1.0;
    let sum: f64 = gamma.iter().sum();
    let s = slack(gamma);
    let zeta: Vec<f64> = if n > kp {
        gamma.iter().map(|g| m1 / (n - kp) * (sum - (n - kp) * g)).collect()
    } else {
        Vec::new()
    };
    let branch = if gamma.iter().all(|&g| g >= -s) {
        Some(CpBranch::NonNegative)
    } else if !zeta.is_empty() && zeta.iter().all(|&z| z >= -s * n) {
        Some(CpBranch::Zeta)
    } else {
        None
    };
    CpDivSufficient {
        holds: branch.is_some(),
        branch,
        zeta,
    }
}

/// Kossakowski-matrix positivity, i.e. all canonical rates nonnegative.
pub fn cpdiv_exact(snapshot: &GeneratorSnapshot, tol: f64) -> PsdCheck {
    is_psd(&snapshot.kossakowski.hermitian_part(), tol).expect("Hermitian part is Hermitian")
}

/// `ξ_α ≤ tol·max(1, max|γ|)` for every `α`.
pub fn pdiv_necessary(snapshot: &GeneratorSnapshot, tol: f64) -> bool {
    let scale = snapshot.gamma.iter().fold(1.0, |m: f64, g| m.max(g.abs())) * snapshot.gamma.len() as f64;
    snapshot.xi.iter().all(|&x| x <= tol * scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum PBranch {
    /// `L ≤ (N − b)/2`: positives must dominate `max|γ_β|`.
    MaxTest,
    /// `(N − b)/2 < L < (N − b + Mκ₊)/2`: positives must dominate the ratio times `max|γ_β|`.
    RatioTest,
    /// `L` outside both ranges (including `L = N`).
    OutOfRange,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PDivSufficient {
    pub holds: bool,
    /// Number of strictly negative coefficients; zeros count as positive.
    pub l: usize,
    /// Number of coefficients exactly zero.
    pub zeros: usize,
    pub branch: PBranch,
    /// `b = M(d − 1)(x − y)/d`.
    pub b: f64,
    /// `(Mκ₊ + c)/(Mκ₊ − c)` with `c = b − N + 2L`, for [`PBranch::RatioTest`].
    pub ratio: Option<f64>,
    pub mu0: f64,
    pub mu: Vec<f64>,
    pub eta0: f64,
    pub eta: Vec<f64>,
    pub reason: Option<String>,
}

/// Sufficient condition for P-divisibility from a positive map built on the
/// family.
pub fn pdiv_sufficient(f: &ChannelFamily, gamma: &[f64]) -> PDivSufficient {
    let d = f.dim() as f64;
    let m = f.m() as f64;
    let nn = gamma.len();
    let n = nn as f64;
    let kp = f.povm().kappa_plus();
    let km = f.povm().kappa_minus();
    let mk = m * kp;
    let b = m * (d - 1.0) * km / d;
    let l = gamma.iter().filter(|&&g| g < 0.0).count();
    let zeros = gamma.iter().filter(|&&g| g == 0.0).count();
    let lf = l as f64;
    let max_neg = gamma.iter().filter(|&&g| g < 0.0).fold(0.0, |a: f64, g| a.max(-g));
    let s = slack(gamma);
    let eps = 1e-9;

    let mut report = PDivSufficient {
        holds: false,
        l,
        zeros,
        branch: PBranch::OutOfRange,
        b,
        ratio: None,
        mu0: 0.0,
        mu: Vec::new(),
        eta0: 0.0,
        eta: Vec::new(),
        reason: None,
    };

    if l == nn {
        report.reason = Some("every coefficient is negative".into());
        return report;
    }
    let (threshold, c_shift, mu0) = if lf <= (n - b) / 2.0 + eps {
        report.branch = PBranch::MaxTest;
        (max_neg, 0.0, 0.0)
    } else if lf < (n - b + mk) / 2.0 - eps {
        let c = b - n + 2.0 * lf;
        let ratio = (mk + c) / (mk - c);
        report.branch = PBranch::RatioTest;
        report.ratio = Some(ratio);
        let mu0 = mk / (mk - c) * max_neg;
        (ratio * max_neg, mu0 * c / mk, mu0)
    } else {
        report.reason = Some(format!(
            "L = {l} is outside (N - b + M kappa+)/2 = {}",
            (n - b + mk) / 2.0
        ));
        return report;
    };
    report.mu0 = mu0;
    report.mu = gamma
        .iter()
        .map(|&g| if g < 0.0 { c_shift - g } else { g - c_shift })
        .collect();
    report.eta0 = -km * c_shift;
    report.eta = gamma.iter().map(|g| g.abs()).collect();
    let failing = gamma.iter().position(|&g| g >= 0.0 && g < threshold - s);
    report.holds = failing.is_none();
    if let Some(a) = failing {
        report.reason = Some(format!(
            "gamma_{} = {} is below the required {threshold}",
            a + 1,
            gamma[a]
        ));
    }
    report
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DDivSufficient {
    pub holds: bool,
    /// Smallest eigenvalue of `Σ_α γ_α Σ_k E_{α,k} ⊗ E_{α,k}`.
    pub min_eigenvalue: f64,
}

/// Complete copositivity of `Σ γ_α Φ_α`, sufficient for D-divisibility.
pub fn ddiv_sufficient(f: &ChannelFamily, gamma: &[f64], tol: f64) -> DDivSufficient {
    let op = f.povm().weighted_tensor_sum(gamma);
    let check = is_psd(&op.hermitian_part(), tol).expect("Hermitian part is Hermitian");
    DDivSufficient {
        holds: check.psd,
        min_eigenvalue: check.min_eigenvalue,
    }
}

/// A time and probe at which `d/dt ‖Λ(t)[X]‖₁` was found positive.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Violation {
    pub time: f64,
    pub probe_hash: u64,
    pub derivative: f64,
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(x: &CMatrix) -> f64 {
    hermitian_eigensystem(&x.hermitian_part())
        .expect("Hermitian part is Hermitian")
        .values
        .iter()
        .map(|v| v.abs())
        .sum()
}

fn fnv1a(m: &CMatrix) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for z in m.as_slice() {
        for byte in z.re.to_bits().to_le_bytes().into_iter().chain(z.im.to_bits().to_le_bytes()) {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Hermitian probe operators: real and imaginary parts of every `U_{α,k}`,
/// then seeded random Hermitian matrices, each scaled to unit Frobenius norm.
pub fn probe_operators(f: &ChannelFamily, samples: usize, seed: u64) -> Vec<CMatrix> {
    let d = f.dim();
    let mut out = Vec::with_capacity(samples);
    for u in f.eigenops().iter().flatten() {
        let ud = u.adjoint();
        out.push((u + &ud).scale_real(0.5));
        out.push((u - &ud).scale(C64::new(0.0, -0.5)));
    }
    out.truncate(samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < samples {
        let mut x = CMatrix::zeros(d, d);
        for i in 0..d {
            x[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..d {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                x[(i, j)] = z;
                x[(j, i)] = z.conj();
            }
        }
        out.push(x);
    }
    for x in &mut out {
        let norm = x.frobenius_norm();
        if norm > 0.0 {
            *x = x.scale_real(1.0 / norm);
        }
    }
    out
}

/// Finite-difference search for growth of `‖Λ(t)[X]‖₁`, a witness against
/// P-divisibility. An empty result is consistent with, not proof of, P-divisibility.
pub fn tracenorm_falsifier(
    f: &ChannelFamily,
    traj: &RateTrajectory,
    probes: &[CMatrix],
    derivative_tol: f64,
) -> Result<Vec<Violation>> {
    let times = traj.times();
    let hashes: Vec<u64> = probes.iter().map(fnv1a).collect();
    let mut out = Vec::new();
    if times.len() < 2 {
        return Ok(out);
    }
    for (i, &t) in times.iter().enumerate() {
        let spacing = match (i.checked_sub(1).map(|p| t - times[p]), times.get(i + 1).map(|n| n - t)) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let h = spacing / 10.0;
        let (lo, hi) = match (i == 0, i + 1 == times.len()) {
            (true, _) => (t, t + h),
            (_, true) => (t - h, t),
            _ => (t - h, t + h),
        };
        let before = dynamical_map_at(f, traj, lo)?;
        let after = dynamical_map_at(f, traj, hi)?;
        for (x, &hash) in probes.iter().zip(&hashes) {
            let derivative = (trace_norm(&after.apply(x)) - trace_norm(&before.apply(x))) / (hi - lo);
            if derivative > derivative_tol {
                out.push(Violation {
                    time: t,
                    probe_hash: hash,
                    derivative,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum PropagatorOutcome {
    Checked { cp: bool, min_choi_eigenvalue: f64 },
    /// `Λ(s)` is not invertible.
    Skipped { min_abs_eigenvalue: f64 },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PropagatorCheck {
    pub s: f64,
    pub t: f64,
    pub outcome: PropagatorOutcome,
}

impl PropagatorCheck {
    /// `Some(cp)` for checked pairs.
    pub fn cp(&self) -> Option<bool> {
        match self.outcome {
            PropagatorOutcome::Checked { cp, .. } => Some(cp),
            PropagatorOutcome::Skipped { .. } => None,
        }
    }
}

/// Complete positivity of `V(t, s) = Λ(t)Λ(s)⁻¹` for each `(s, t)` pair.
pub fn propagator_cp_check(
    f: &ChannelFamily,
    traj: &RateTrajectory,
    pairs: &[(f64, f64)],
    tol: f64,
) -> Result<Vec<PropagatorCheck>> {
    pairs
        .iter()
        .map(|&(s, t)| {
            let (integral, _) = integrated_xi(f, traj, s)?;
            let min_abs = integral.iter().map(|v| v.exp()).fold(f64::INFINITY, f64::min);
            let skipped = PropagatorCheck {
                s,
                t,
                outcome: PropagatorOutcome::Skipped {
                    min_abs_eigenvalue: min_abs,
                },
            };
            if min_abs <= INVERTIBILITY_FLOOR {
                return Ok(skipped);
            }
            let inv = match dynamical_map_at(f, traj, s)?.inverse() {
                Ok(inv) => inv,
                Err(Error::Singular) => return Ok(skipped),
                Err(e) => return Err(e),
            };
            let v = dynamical_map_at(f, traj, t)?.compose(&inv);
            let check = cp_exact(&v, tol);
            Ok(PropagatorCheck {
                s,
                t,
                outcome: PropagatorOutcome::Checked {
                    cp: check.psd,
                    min_choi_eigenvalue: check.min_eigenvalue,
                },
            })
        })
        .collect()
}

/// Tolerances and sampling parameters for [`classify_trajectory`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClassifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub psd_tol: f64,
    pub derivative_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            samples: 32,
            seed: 0,
            psd_tol: crate::DEFAULT_PSD_TOL,
            derivative_tol: crate::DEFAULT_DERIVATIVE_TOL,
        }
    }
}

/// Divisibility flags at one grid time.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SnapshotReport {
    pub time: f64,
    pub gamma: Vec<f64>,
    pub xi: Vec<f64>,
    pub lambda: Vec<f64>,
    pub canonical_rates: Vec<f64>,
    pub cp_sufficient: CpDivSufficient,
    pub cp_exact: bool,
    pub min_kossakowski_eigenvalue: f64,
    pub p_necessary: bool,
    pub p_sufficient: PDivSufficient,
    pub d_sufficient: DDivSufficient,
    pub trace_norm_violations: usize,
    pub reconstruction_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DivisibilityReport {
    pub snapshots: Vec<SnapshotReport>,
    pub violations: Vec<Violation>,
    /// Every snapshot satisfies the Kossakowski test.
    pub cp_divisible: bool,
    /// Every snapshot satisfies the necessary P-divisibility condition.
    pub p_necessary: bool,
    /// Every snapshot satisfies the co-positivity test.
    pub d_sufficient: bool,
}

pub fn classify_trajectory(f: &ChannelFamily, traj: &RateTrajectory, opts: &ClassifyOptions) -> Result<DivisibilityReport> {
    let series = evolve_eigenvalues(f, traj)?;
    let probes = probe_operators(f, opts.samples, opts.seed);
    let violations = tracenorm_falsifier(f, traj, &probes, opts.derivative_tol)?;
    let mut snapshots = Vec::with_capacity(traj.times().len());
    for (i, (&t, gamma)) in traj.times().iter().zip(traj.samples()).enumerate() {
        let mut snap = generator_at(f, gamma)?;
        snap.time = t;
        let cp = cpdiv_exact(&snap, opts.psd_tol);
        snapshots.push(SnapshotReport {
            time: t,
            gamma: gamma.clone(),
            xi: snap.xi.clone(),
            lambda: series.lambdas[i].clone(),
            canonical_rates: snap.canonical_rates.clone(),
            cp_sufficient: cpdiv_sufficient(f, gamma),
            cp_exact: cp.psd,
            min_kossakowski_eigenvalue: cp.min_eigenvalue,
            p_necessary: pdiv_necessary(&snap, opts.psd_tol),
            p_sufficient: pdiv_sufficient(f, gamma),
            d_sufficient: ddiv_sufficient(f, gamma, opts.psd_tol),
            trace_norm_violations: violations.iter().filter(|v| v.time == t).count(),
            reconstruction_residual: snap.reconstruction_residual,
        });
    }
    Ok(DivisibilityReport {
        cp_divisible: snapshots.iter().all(|s| s.cp_exact),
        p_necessary: snapshots.iter().all(|s| s.p_necessary),
        d_sufficient: snapshots.iter().all(|s| s.d_sufficient.holds),
        snapshots,
        violations,
    })
}
