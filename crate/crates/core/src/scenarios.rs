//! Closed-form regions, threshold searches and golden reports for the
//! reference families: qutrit MUBs, Gell-Mann MUMs and the ququart `(15, 2)`
//! projectors.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chan::ChannelFamily;
use crate::dynamics::{cpdiv_exact, cpdiv_sufficient, ddiv_sufficient, generator_at, pdiv_sufficient};
use crate::measure::{gellmann_mum_povm, mub_povm, pauli_15_2_povm, pauli_product_basis};
use crate::{CMatrix, Result, C64, DEFAULT_PSD_TOL};

/// Eigenvalue floor used when locating a D-divisibility boundary. A relative
/// tolerance would shift the located point by `tol·‖A‖/slope`.
pub const THRESHOLD_FLOOR: f64 = 1e-12;

/// Width of the bracket at which threshold bisection stops.
pub const BISECTION_WIDTH: f64 = 1e-12;

/// Samples closer than this to either boundary are not counted as disagreements.
pub const AGREEMENT_BAND: f64 = 1e-8;

/// One line of a golden report.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, expected: String, observed: String, pass: bool) -> Self {
        Self {
            name: name.into(),
            expected,
            observed,
            pass,
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot has a successor");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// `rates[order[i]] = base[i]`.
pub fn reorder(base: &[f64], order: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; base.len()];
    for (i, &o) in order.iter().enumerate() {
        out[o] = base[i];
    }
    out
}

/// Smallest point of `[lo, hi]` where a predicate that switches once from
/// false to true becomes true, to within [`BISECTION_WIDTH`].
pub fn bisect(mut lo: f64, mut hi: f64, mut holds: impl FnMut(f64) -> bool) -> Option<f64> {
    if holds(lo) || !holds(hi) {
        return None;
    }
    while hi - lo > BISECTION_WIDTH * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// `Σ_β Σ_{α≠β} γ_α γ_β`.
pub fn pairwise_product_sum(gamma: &[f64]) -> f64 {
    let sum: f64 = gamma.iter().sum();
    let squares: f64 = gamma.iter().map(|g| g * g).sum();
    sum * sum - squares
}

/// Two rates equal to `g` followed by two equal to `−1`.
pub fn two_pair_rates(g: f64) -> [f64; 4] {
    [g, g, -1.0, -1.0]
}

/// Threshold on `g` above which `Σγ_αΦ_α` is completely copositive, for rates
/// [`two_pair_rates`] assigned to the groups in the given order.
pub fn ddiv_threshold(f: &ChannelFamily, order: &[usize], hi: f64) -> Option<f64> {
    bisect(0.0, hi, |g| {
        let gamma = reorder(&two_pair_rates(g), order);
        ddiv_sufficient(f, &gamma, 0.0).min_eigenvalue >= -THRESHOLD_FLOOR
    })
}

/// Threshold on `g` above which the positive-map sufficient condition accepts
/// [`two_pair_rates`].
pub fn pdiv_threshold(f: &ChannelFamily, hi: f64) -> Option<f64> {
    bisect(0.0, hi, |g| pdiv_sufficient(f, &two_pair_rates(g)).holds)
}

/// The six linear and conic expressions of the closed-form CP-divisibility
/// region claimed for the Gell-Mann MUM family.
pub fn cp3_expressions(gamma: &[f64]) -> [f64; 6] {
    let (g1, g2, g3, g4) = (gamma[0], gamma[1], gamma[2], gamma[3]);
    let root = (2.0 * (g2 + g4) * (g2 + g4) + g3 * g3).sqrt();
    let conic = 6.0 * g1 + 2.0 * g2 + 5.0 * g3 + 2.0 * g4;
    [
        g2 + g3 + g4,
        2.0 * g3 - g4 + 5.0 * g2,
        2.0 * g3 - g2 + 5.0 * g4,
        3.0 * g1 + g2 - 2.0 * g3 + g4,
        conic + root,
        conic - root,
    ]
}

/// Smallest of [`cp3_expressions`]; the region is `margin ≥ 0`.
pub fn cp3_margin(gamma: &[f64]) -> f64 {
    cp3_expressions(gamma).into_iter().fold(f64::INFINITY, f64::min)
}

/// Distance of `γ₃` from `(γ₂ + γ₄)/2`.
pub fn slice_offset(gamma: &[f64]) -> f64 {
    gamma[2] - 0.5 * (gamma[1] + gamma[3])
}

/// Smallest of `γ₂ + γ₄` and `2γ₁ + γ₂ + γ₄ − √2|γ₂ − γ₄|`, the inequalities of
/// the closed-form D-divisibility region claimed for the Gell-Mann MUM family.
pub fn cocp3_margin(gamma: &[f64]) -> f64 {
    let (g1, g2, g4) = (gamma[0], gamma[1], gamma[3]);
    let a = g2 + g4;
    let b = 2.0 * g1 + g2 + g4 - 2.0f64.sqrt() * (g2 - g4).abs();
    a.min(b)
}

/// Closed-form D-divisibility region: on the slice and both margins nonnegative.
pub fn cocp3_holds(gamma: &[f64], tol: f64) -> bool {
    slice_offset(gamma).abs() <= tol && cocp3_margin(gamma) >= -tol
}

/// Comparison of a closed-form region against a numerical oracle.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Agreement {
    pub samples: usize,
    /// Samples within [`AGREEMENT_BAND`] of either boundary.
    pub banded: usize,
    pub disagreements: usize,
    pub formula_only: usize,
    pub oracle_only: usize,
    pub first_disagreement: Option<Vec<f64>>,
}

impl Agreement {
    fn new() -> Self {
        Self {
            samples: 0,
            banded: 0,
            disagreements: 0,
            formula_only: 0,
            oracle_only: 0,
            first_disagreement: None,
        }
    }

    fn record(&mut self, gamma: &[f64], formula: f64, oracle: f64) {
        self.samples += 1;
        if formula.abs() <= AGREEMENT_BAND || oracle.abs() <= AGREEMENT_BAND {
            self.banded += 1;
            return;
        }
        match (formula >= 0.0, oracle >= 0.0) {
            (true, false) => self.formula_only += 1,
            (false, true) => self.oracle_only += 1,
            _ => return,
        }
        self.disagreements += 1;
        if self.first_disagreement.is_none() {
            self.first_disagreement = Some(gamma.to_vec());
        }
    }
}

fn uniform_rates(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// [`cp3_margin`] against the smallest canonical rate on random `γ ∈ [−2, 2]⁴`.
pub fn cp3_agreement(f: &ChannelFamily, samples: usize, seed: u64) -> Result<Agreement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Agreement::new();
    for _ in 0..samples {
        let gamma = uniform_rates(&mut rng, 4, -2.0, 2.0);
        let oracle = cpdiv_exact(&generator_at(f, &gamma)?, DEFAULT_PSD_TOL).min_eigenvalue;
        out.record(&gamma, cp3_margin(&gamma), oracle);
    }
    Ok(out)
}

/// On the slice `γ₃ = (γ₂ + γ₄)/2`, compares "all `γ_α ≥ 0`" with the
/// smallest canonical rate.
pub fn cp3_slice_agreement(f: &ChannelFamily, samples: usize, seed: u64) -> Result<Agreement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Agreement::new();
    for _ in 0..samples {
        let mut gamma = uniform_rates(&mut rng, 4, -2.0, 2.0);
        gamma[2] = 0.5 * (gamma[1] + gamma[3]);
        let oracle = cpdiv_exact(&generator_at(f, &gamma)?, DEFAULT_PSD_TOL).min_eigenvalue;
        let formula = gamma.iter().copied().fold(f64::INFINITY, f64::min);
        out.record(&gamma, formula, oracle);
    }
    Ok(out)
}

/// [`cocp3_margin`] against the smallest eigenvalue of `Σγ_αΣ_kE⊗E`, on the
/// slice `γ₃ = (γ₂ + γ₄)/2`.
pub fn cocp3_agreement(f: &ChannelFamily, samples: usize, seed: u64) -> Agreement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Agreement::new();
    for _ in 0..samples {
        let mut gamma = uniform_rates(&mut rng, 4, -2.0, 2.0);
        gamma[2] = 0.5 * (gamma[1] + gamma[3]);
        let oracle = ddiv_sufficient(f, &gamma, DEFAULT_PSD_TOL).min_eigenvalue;
        out.record(&gamma, cocp3_margin(&gamma), oracle);
    }
    out
}

/// `A[a][b] = 1` when the Pauli products `G_a` and `G_b` anticommute.
pub fn anticommutation_matrix() -> Vec<Vec<f64>> {
    let basis = pauli_product_basis();
    let g: Vec<&CMatrix> = basis.elements().collect();
    g.iter()
        .map(|a| {
            g.iter()
                .map(|b| {
                    let anti = &(*a * *b) + &(*b * *a);
                    if anti.max_abs() < 1e-12 {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Coefficients `γ_α` of the `(15, 2)` generator whose diagonal form has
/// rates `J_α` on the Pauli products: `ξ = −½AJ`, `ξ_α = γ_α − Σγ`.
pub fn ququart_gamma_from_rates(rates: &[f64]) -> Vec<f64> {
    let a = anticommutation_matrix();
    let xi: Vec<f64> = a
        .iter()
        .map(|row| -0.5 * row.iter().zip(rates).map(|(x, j)| x * j).sum::<f64>())
        .collect();
    let total = xi.iter().sum::<f64>() / (1.0 - xi.len() as f64);
    xi.iter().map(|x| x + total).collect()
}

/// Inverse of [`ququart_gamma_from_rates`].
pub fn ququart_rates_from_gamma(gamma: &[f64]) -> Result<Vec<f64>> {
    let a = anticommutation_matrix();
    let n = a.len();
    let m = CMatrix::from_fn(n, n, |i, j| C64::new(-0.5 * a[i][j], 0.0));
    let total: f64 = gamma.iter().sum();
    let xi: Vec<C64> = gamma.iter().map(|g| C64::new(g - total, 0.0)).collect();
    Ok(m.inverse()?.mul_vec(&xi).iter().map(|z| z.re).collect())
}

fn count_below(values: &[f64], threshold: f64) -> usize {
    values.iter().filter(|&&v| v < threshold).count()
}

/// A `(15, 2)` configuration found by a seeded search.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RateSearch {
    pub attempts: usize,
    pub gamma: Vec<f64>,
    /// Canonical rates from the Kossakowski matrix, ascending.
    pub rates: Vec<f64>,
    pub negative_gammas: usize,
    pub negative_rates: usize,
    pub nonzero_rates: usize,
    pub pdiv_sufficient: bool,
}

/// Rates below this magnitude count as zero.
pub const RATE_ZERO_TOL: f64 = 1e-9;

fn rate_search(f: &ChannelFamily, gamma: Vec<f64>, attempts: usize) -> Result<RateSearch> {
    let snapshot = generator_at(f, &gamma)?;
    let rates = snapshot.canonical_rates;
    Ok(RateSearch {
        attempts,
        negative_gammas: count_below(&gamma, 0.0),
        negative_rates: count_below(&rates, -RATE_ZERO_TOL),
        nonzero_rates: rates.iter().filter(|r| r.abs() > RATE_ZERO_TOL).count(),
        pdiv_sufficient: pdiv_sufficient(f, &gamma).holds,
        gamma,
        rates,
    })
}

/// Twelve coefficients `−1` followed by three equal to `13`.
pub fn ququart_boundary_rates() -> Vec<f64> {
    let mut gamma = vec![-1.0; 12];
    gamma.extend([13.0; 3]);
    gamma
}

/// Random configurations with six negative coefficients in `(−1, 0)` and the
/// others at least their largest magnitude, until one has six negative
/// canonical rates.
pub fn search_six_negative_rates(f: &ChannelFamily, seed: u64, max_attempts: usize) -> Result<Option<RateSearch>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_attempts {
        let mut gamma = uniform_rates(&mut rng, 15, 0.0, 1.0);
        let mut idx: Vec<usize> = (0..15).collect();
        for i in 0..6 {
            let j = rng.gen_range(i..15);
            idx.swap(i, j);
        }
        let mut floor: f64 = 0.0;
        for &i in &idx[..6] {
            gamma[i] = -rng.gen_range(f64::EPSILON..1.0);
            floor = floor.max(-gamma[i]);
        }
        for &i in &idx[6..] {
            gamma[i] = gamma[i].max(floor);
        }
        let screened = ququart_rates_from_gamma(&gamma)?;
        if count_below(&screened, -RATE_ZERO_TOL) != 6 {
            continue;
        }
        let found = rate_search(f, gamma, attempt)?;
        if found.negative_rates == 6 {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Six-element supports with random positive rates, until the resulting
/// coefficients have exactly seven negative entries.
pub fn search_seven_negative_coefficients(f: &ChannelFamily, seed: u64, max_attempts: usize) -> Result<Option<RateSearch>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while attempts < max_attempts {
        for support in combinations(15, 6) {
            attempts += 1;
            if attempts > max_attempts {
                break;
            }
            let mut rates = vec![0.0; 15];
            for &i in &support {
                rates[i] = rng.gen_range(0.1..1.0);
            }
            let gamma = ququart_gamma_from_rates(&rates);
            if count_below(&gamma, -1e-12) != 7 || gamma.iter().any(|g| g.abs() <= 1e-12) {
                continue;
            }
            let found = rate_search(f, gamma, attempts)?;
            if found.negative_gammas == 7 && found.nonzero_rates == 6 && found.negative_rates == 0 {
                return Ok(Some(found));
            }
        }
    }
    Ok(None)
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

fn close(name: &str, expected: f64, observed: f64, tol: f64) -> Check {
    Check::new(
        name,
        format!("{expected} ± {tol:e}"),
        format!("{observed}"),
        (observed - expected).abs() <= tol,
    )
}

fn zero_disagreements(name: &str, a: &Agreement) -> Check {
    let mut observed = format!(
        "{} disagreements ({} formula-only, {} oracle-only, {} banded) over {} samples",
        a.disagreements, a.formula_only, a.oracle_only, a.banded, a.samples
    );
    if let Some(g) = &a.first_disagreement {
        observed += &format!("; first at gamma = {g:?}");
    }
    Check::new(name, "0 disagreements".into(), observed, a.disagreements == 0)
}

/// Boundary location tolerance for golden reports.
pub const GOLDEN_BOUNDARY_TOL: f64 = 1e-9;

/// Qutrit MUBs with two rates `γ` and two equal to `−1`: D-divisibility
/// threshold for all orderings, its pairwise-sum form, and the positive-map
/// threshold.
pub fn mub_qutrit_golden() -> Result<Vec<Check>> {
    let f = ChannelFamily::build(mub_povm(3)?)?;
    let expected = 2.0 + 3.0f64.sqrt();
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    let mut worst_order = Vec::new();
    let orders = permutations(4);
    for order in &orders {
        let dev = match ddiv_threshold(&f, order, 20.0) {
            Some(t) => (t - expected).abs(),
            None => f64::INFINITY,
        };
        if dev >= worst {
            worst = dev;
            worst_order = order.clone();
        }
    }
    checks.push(Check::new(
        "D-divisibility threshold, all orderings",
        format!("2 + sqrt(3) = {expected} ± {GOLDEN_BOUNDARY_TOL:e} for {} orderings", orders.len()),
        format!("worst deviation {worst:e} at ordering {worst_order:?}"),
        worst <= GOLDEN_BOUNDARY_TOL,
    ));

    // The quadratic 2g² − 8g + 2 also vanishes at 2 − √3, below the D-divisible range.
    let pairwise = bisect(1.0, 20.0, |g| pairwise_product_sum(&two_pair_rates(g)) >= 0.0).unwrap_or(f64::NAN);
    checks.push(close("pairwise-product threshold", expected, pairwise, GOLDEN_BOUNDARY_TOL));

    let p = pdiv_threshold(&f, 20.0).unwrap_or(f64::NAN);
    checks.push(close("positive-map threshold", 5.0, p, GOLDEN_BOUNDARY_TOL));

    let at5 = pdiv_sufficient(&f, &two_pair_rates(5.0));
    checks.push(close("ratio at L = 2", 5.0, at5.ratio.unwrap_or(f64::NAN), 1e-12));
    checks.push(Check::new(
        "gamma = 5 accepted",
        "true".into(),
        format!("{}", at5.holds),
        at5.holds,
    ));
    Ok(checks)
}

/// Gell-Mann MUMs on a qutrit: constants, the ζ branch and the closed-form
/// regions against their oracles.
pub fn mum_gellmann_golden(samples: usize, seed: u64) -> Result<Vec<Check>> {
    let f = ChannelFamily::build(gellmann_mum_povm(3)?)?;
    let p = f.povm();
    let mut checks = vec![
        close("x", 5.0 / 9.0, p.x(), 1e-12),
        close("kappa+", 11.0 / 9.0, p.kappa_plus(), 1e-12),
        close("kappa-", 1.0 / 3.0, p.kappa_minus(), 1e-12),
    ];

    let gamma = [0.0, 1.0, -1.0, 1.0];
    let cp = cpdiv_sufficient(&f, &gamma);
    let sum: f64 = gamma.iter().sum();
    let scale = (f.m() as f64 - 1.0) / 25.0;
    let zeta_dev = cp
        .zeta
        .iter()
        .zip(&gamma)
        .map(|(z, g)| (z - scale * (9.0 * sum - 25.0 * g)).abs())
        .fold(0.0, f64::max);
    checks.push(close("zeta proportional to 9 sum - 25 gamma", 0.0, zeta_dev, 1e-12));

    let exact = cpdiv_exact(&generator_at(&f, &gamma)?, DEFAULT_PSD_TOL);
    let formula = cp3_margin(&gamma) >= 0.0;
    checks.push(Check::new(
        "gamma = (0, 1, -1, 1): closed form vs canonical rates",
        format!("closed form {formula}"),
        format!("oracle {} (min rate {:e})", exact.psd, exact.min_eigenvalue),
        formula == exact.psd,
    ));

    checks.push(zero_disagreements("CP closed form vs canonical rates", &cp3_agreement(&f, samples, seed)?));
    checks.push(zero_disagreements(
        "CP slice reduces to nonnegative rates",
        &cp3_slice_agreement(&f, samples, seed.wrapping_add(1))?,
    ));
    checks.push(zero_disagreements(
        "D closed form vs copositivity oracle",
        &cocp3_agreement(&f, samples, seed.wrapping_add(2)),
    ));
    Ok(checks)
}

/// Ququart `(15, 2)` projectors: negative-rate counting and the two searches.
pub fn ququart_golden(seed: u64) -> Result<Vec<Check>> {
    let f = ChannelFamily::build(pauli_15_2_povm())?;
    let mut checks = Vec::new();

    let boundary = rate_search(&f, ququart_boundary_rates(), 1)?;
    checks.push(Check::new(
        "twelve -1 and three 13: negative canonical rates",
        "2".into(),
        format!("{} (rates {:?})", boundary.negative_rates, boundary.rates),
        boundary.negative_rates == 2,
    ));
    let pd = pdiv_sufficient(&f, &boundary.gamma);
    checks.push(close("ratio at L = 12", 13.0, pd.ratio.unwrap_or(f64::NAN), 1e-12));
    checks.push(Check::new(
        "boundary point accepted",
        "true".into(),
        format!("{}", pd.holds),
        pd.holds,
    ));

    let six = search_six_negative_rates(&f, seed, 100_000)?;
    checks.push(match &six {
        Some(s) => Check::new(
            "L = 6 with six negative rates",
            "found".into(),
            format!("after {} attempts: gamma = {:?}, rates = {:?}", s.attempts, s.gamma, s.rates),
            s.negative_gammas == 6 && s.negative_rates == 6,
        ),
        None => Check::new("L = 6 with six negative rates", "found".into(), "none".into(), false),
    });

    let seven = search_seven_negative_coefficients(&f, seed, 100_000)?;
    checks.push(match &seven {
        Some(s) => Check::new(
            "L = 7 with six nonzero rates, all nonnegative",
            "found".into(),
            format!(
                "after {} attempts: gamma = {:?}, rates = {:?}, positive-map condition {}",
                s.attempts, s.gamma, s.rates, s.pdiv_sufficient
            ),
            true,
        ),
        None => Check::new("L = 7 with six nonzero rates, all nonnegative", "found".into(), "none".into(), false),
    });
    Ok(checks)
}
