use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdiv_core::chan::{
    composition_check, cp_exact, cp_sufficient, fujiwara_algoet, spec_from_eigenvalues, ChannelFamily, Variant,
};
use symdiv_core::dynamics::{
    cpdiv_exact, cpdiv_sufficient, evolve_eigenvalues, generator_at, pdiv_necessary, pdiv_sufficient,
    probe_operators, propagator_cp_check, tracenorm_falsifier, xi, RateTrajectory,
};
use symdiv_core::measure::{conical_design_check, gellmann_mum_povm, mub_povm, pauli_15_2_povm, SymmetricPovm};
use symdiv_core::scenarios::{
    cocp3_agreement, cp3_agreement, cp3_slice_agreement, mub_qutrit_golden, ququart_boundary_rates,
    search_seven_negative_coefficients, search_six_negative_rates, Agreement, Check, AGREEMENT_BAND,
};
use symdiv_core::{CMatrix, Superoperator, DEFAULT_DERIVATIVE_TOL, DEFAULT_PSD_TOL};

const SAMPLES: usize = 10_000;
const RESIDUAL_TOL: f64 = 1e-10;
const KAPPA_REL_TOL: f64 = 1e-12;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn families() -> Vec<(&'static str, ChannelFamily)> {
    let build = |p: SymmetricPovm| ChannelFamily::build(p).unwrap();
    vec![
        ("MUB d=2", build(mub_povm(2).unwrap())),
        ("MUB d=3", build(mub_povm(3).unwrap())),
        ("MUB d=5", build(mub_povm(5).unwrap())),
        ("Gell-Mann MUM d=3", build(gellmann_mum_povm(3).unwrap())),
        ("(15,2) d=4", build(pauli_15_2_povm())),
    ]
}

// κ± fitted from the traces of S = ΣE⊗E and SF, independent of the closed forms.
fn fitted_kappas(p: &SymmetricPovm) -> (f64, f64) {
    let d = p.dim();
    let s = p.weighted_tensor_sum(&vec![1.0; p.n()]);
    let df = d as f64;
    let tr = s.trace().re;
    let trf = (&s * &CMatrix::flip(d)).trace().re;
    let det = df.powi(4) - df * df;
    ((tr * df * df - trf * df) / det, (trf * df * df - tr * df) / det)
}

fn criterion_1() -> Outcome {
    let cases = [
        ("MUB d=2", mub_povm(2).unwrap(), (1.0, 1.0)),
        ("MUB d=3", mub_povm(3).unwrap(), (1.0, 1.0)),
        ("MUB d=5", mub_povm(5).unwrap(), (1.0, 1.0)),
        ("Gell-Mann MUM d=3", gellmann_mum_povm(3).unwrap(), (11.0 / 9.0, 1.0 / 3.0)),
        ("(15,2) d=4", pauli_15_2_povm(), (7.0, 2.0)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, p, (ep, em)) in cases {
        let report = conical_design_check(&p);
        let residual = report.residual.unwrap_or(f64::INFINITY);
        let (fp, fm) = fitted_kappas(&p);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        let kappa_err = [
            rel(report.kappa_plus, ep),
            rel(report.kappa_minus, em),
            rel(fp, ep),
            rel(fm, em),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let ok = residual <= RESIDUAL_TOL && kappa_err <= KAPPA_REL_TOL;
        pass &= ok;
        parts.push(format!(
            "{label}: residual {residual:.1e}, kappa=({:.12},{:.12}) rel.err {kappa_err:.1e}",
            report.kappa_plus, report.kappa_minus
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, f) in families() {
        let r = composition_check(&f);
        pass &= r.max() <= RESIDUAL_TOL;
        parts.push(format!("{label}: {:.1e}", r.max()));
    }
    Outcome::new(pass, format!("max composition residual {}", parts.join(", ")))
}

// Λ = Φ₀ + Σ λ_α d/(Mκ₋)(Φ_α − Φ₀), fixed by Λ[I] = I and Λ[U_{α,k}] = λ_α U_{α,k}.
fn map_from_eigenvalues(f: &ChannelFamily, lambda: &[f64]) -> Superoperator {
    let d = f.dim();
    let scale = 1.0 / f.phi_eigenvalue();
    let mut terms: Vec<(f64, &Superoperator)> = vec![(1.0 - scale * lambda.iter().sum::<f64>(), f.phi0())];
    terms.extend(lambda.iter().enumerate().map(|(a, l)| (scale * l, f.phi(a))));
    Superoperator::combination(d, terms)
}

fn criterion_3() -> Outcome {
    let f = ChannelFamily::build(mub_povm(3).unwrap()).unwrap();
    let d = f.dim() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut disagreements, mut banded, mut counterexamples, mut accepted) = (0, 0, 0, 0);
    let mut first = None;
    for _ in 0..SAMPLES {
        let lambda: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let oracle = cp_exact(&map_from_eigenvalues(&f, &lambda), DEFAULT_PSD_TOL);
        let sum: f64 = lambda.iter().sum();
        let min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
        let margin = (sum + 1.0 / (d - 1.0)).min(1.0 + d * min - sum);
        let fa = fujiwara_algoet(&f, &lambda).unwrap();
        if margin.abs() <= AGREEMENT_BAND || oracle.min_eigenvalue.abs() <= AGREEMENT_BAND {
            banded += 1;
        } else if fa != oracle.psd {
            disagreements += 1;
            first.get_or_insert(lambda.clone());
        }
        for variant in [Variant::Lambda, Variant::LambdaTilde] {
            let spec = spec_from_eigenvalues(&f, &lambda, variant).unwrap();
            if cp_sufficient(&f, &spec) {
                accepted += 1;
                if !oracle.psd {
                    counterexamples += 1;
                }
            }
        }
    }
    Outcome::new(
        disagreements == 0 && counterexamples == 0,
        format!(
            "{SAMPLES} samples: {disagreements} Fujiwara-Algoet disagreements ({banded} banded){}, \
             {counterexamples} sufficiency counterexamples among {accepted} accepted",
            first.map(|l| format!(", first at {l:?}")).unwrap_or_default()
        ),
    )
}

fn summarize(checks: &[Check]) -> Outcome {
    let pass = checks.iter().all(|c| c.pass);
    let detail = checks
        .iter()
        .map(|c| {
            format!(
                "{} [{}] expected {}, observed {}",
                c.name,
                if c.pass { "ok" } else { "MISMATCH" },
                c.expected,
                c.observed
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(pass, detail)
}

fn criterion_4() -> Outcome {
    summarize(&mub_qutrit_golden().unwrap())
}

fn describe(label: &str, a: &Agreement) -> String {
    let mut s = format!(
        "{label}: {} disagreements ({} closed-form only, {} oracle only, {} banded) over {}",
        a.disagreements, a.formula_only, a.oracle_only, a.banded, a.samples
    );
    if let Some(g) = &a.first_disagreement {
        s += &format!(", first at gamma = {g:?}");
    }
    s
}

fn criterion_5() -> Outcome {
    let f = ChannelFamily::build(gellmann_mum_povm(3).unwrap()).unwrap();
    let full = cp3_agreement(&f, SAMPLES, 5).unwrap();
    let slice = cp3_slice_agreement(&f, SAMPLES, 55).unwrap();
    Outcome::new(
        full.disagreements == 0 && slice.disagreements == 0,
        format!(
            "{}; {}",
            describe("closed-form CP region vs Kossakowski PSD", &full),
            describe("slice vs nonnegative rates", &slice)
        ),
    )
}

fn criterion_6() -> Outcome {
    let f = ChannelFamily::build(gellmann_mum_povm(3).unwrap()).unwrap();
    let a = cocp3_agreement(&f, SAMPLES, 6);
    Outcome::new(
        a.disagreements == 0,
        describe("closed-form D region vs copositivity PSD on the slice", &a),
    )
}

fn criterion_7() -> Outcome {
    let f = ChannelFamily::build(pauli_15_2_povm()).unwrap();
    let boundary = generator_at(&f, &ququart_boundary_rates()).unwrap();
    let negative = boundary.canonical_rates.iter().filter(|&&j| j < -1e-9).count();
    let six = search_six_negative_rates(&f, 7, 100_000).unwrap();
    let seven = search_seven_negative_coefficients(&f, 7, 100_000).unwrap();
    let mut parts = vec![format!("twelve -1 / three 13: {negative} negative rates")];
    match &six {
        Some(s) => parts.push(format!(
            "L=6 found after {} attempts: gamma={:?} rates={:?}",
            s.attempts, s.gamma, s.rates
        )),
        None => parts.push("L=6 search found nothing".into()),
    }
    match &seven {
        Some(s) => parts.push(format!(
            "L=7 found after {} attempts: gamma={:?} rates={:?} ({} nonzero)",
            s.attempts, s.gamma, s.rates, s.nonzero_rates
        )),
        None => parts.push("L=7 search found nothing".into()),
    }
    let pass = negative == 2
        && six.is_some_and(|s| s.negative_gammas == 6 && s.negative_rates == 6)
        && seven.is_some_and(|s| s.negative_gammas == 7 && s.nonzero_rates == 6 && s.negative_rates == 0);
    Outcome::new(pass, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let times = RateTrajectory::uniform_grid(2.0, 40).unwrap();
    let (mut worst_xi, mut worst_lambda): (f64, f64) = (0.0, 0.0);
    for (_, f) in families() {
        for _ in 0..20 {
            let gamma: Vec<f64> = (0..f.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            worst_xi = worst_xi.max(generator_at(&f, &gamma).unwrap().xi_residual(&f));
            let traj = RateTrajectory::constant(&gamma, times.clone()).unwrap();
            let series = evolve_eigenvalues(&f, &traj).unwrap();
            let rates = xi(&f, &gamma);
            for (t, lambdas) in series.times.iter().zip(&series.lambdas) {
                for (l, x) in lambdas.iter().zip(&rates) {
                    worst_lambda = worst_lambda.max((l - (x * t).exp()).abs());
                }
            }
        }
    }
    Outcome::new(
        worst_xi <= RESIDUAL_TOL && worst_lambda <= RESIDUAL_TOL,
        format!("eigenoperator residual {worst_xi:.1e}, eigenvalue quadrature error {worst_lambda:.1e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let times = RateTrajectory::uniform_grid(2.0, 20).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, f) in families() {
        let gamma: Vec<f64> = (0..f.n()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let traj = RateTrajectory::constant(&gamma, times.clone()).unwrap();
        let pairs: Vec<(f64, f64)> = (0..50)
            .map(|_| {
                let (a, b): (f64, f64) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
                (a.min(b), a.max(b))
            })
            .collect();
        let checks = propagator_cp_check(&f, &traj, &pairs, DEFAULT_PSD_TOL).unwrap();
        let cp = checks.iter().filter(|c| c.cp() == Some(true)).count();
        let probes = probe_operators(&f, 200, 9);
        let violations = tracenorm_falsifier(&f, &traj, &probes, DEFAULT_DERIVATIVE_TOL).unwrap();
        pass &= cp == pairs.len() && violations.is_empty();
        parts.push(format!("{label}: {cp}/50 CP propagators, {} trace-norm violations", violations.len()));
    }
    Outcome::new(pass, parts.join("; "))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let times = RateTrajectory::uniform_grid(1.0, 4).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, f) in families() {
        let probes = probe_operators(&f, 6, 10);
        let (mut suff_cp, mut cp_pn, mut pdiv_fals) = (0, 0, 0);
        let (mut n_suff, mut n_cp, mut n_pdiv) = (0, 0, 0);
        for _ in 0..SAMPLES {
            let floor = rng.gen_range(0.0..2.0);
            let gamma: Vec<f64> = (0..f.n()).map(|_| rng.gen_range(-floor..2.0)).collect();
            let snap = generator_at(&f, &gamma).unwrap();
            let exact = cpdiv_exact(&snap, DEFAULT_PSD_TOL).psd;
            if cpdiv_sufficient(&f, &gamma).holds {
                n_suff += 1;
                suff_cp += usize::from(!exact);
            }
            if exact {
                n_cp += 1;
                cp_pn += usize::from(!pdiv_necessary(&snap, DEFAULT_PSD_TOL));
            }
            if pdiv_sufficient(&f, &gamma).holds {
                n_pdiv += 1;
                let traj = RateTrajectory::constant(&gamma, times.clone()).unwrap();
                let v = tracenorm_falsifier(&f, &traj, &probes, DEFAULT_DERIVATIVE_TOL).unwrap();
                pdiv_fals += usize::from(!v.is_empty());
            }
        }
        pass &= suff_cp == 0 && cp_pn == 0 && pdiv_fals == 0;
        parts.push(format!(
            "{label}: {suff_cp}/{n_suff} CP-sufficient not CP, {cp_pn}/{n_cp} CP failing P-necessary, \
             {pdiv_fals}/{n_pdiv} P-sufficient with trace-norm growth"
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("conical 2-design identity", criterion_1),
        ("composition relations", criterion_2),
        ("MUB exact complete positivity", criterion_3),
        ("qutrit MUB thresholds", criterion_4),
        ("Gell-Mann MUM CP-divisibility region", criterion_5),
        ("Gell-Mann MUM D-divisibility region", criterion_6),
        ("ququart (15,2) rate counting", criterion_7),
        ("generator eigenvalue consistency", criterion_8),
        ("Markovian semigroup sanity", criterion_9),
        ("implication suite", criterion_10),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.pass);
        println!(
            "criterion {}: {verdict} {title} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
