//! JSON job runner behind the `metaplectic` binary.

pub mod job;
pub mod report;

use metaplectic::calculus::{compose_toeplitz, toeplitz_to_weyl, weyl_to_toeplitz, GateId, PipelineReport, Verdict};
use metaplectic::model::{extended_compose, radial_analyze, ExtendedSymbol};
use metaplectic::numkernel::relative_distance;
use metaplectic::oracle::{constant_estimate, relative_error, weyl_symbol_on_lambda, GridOptions, Oracle, Pipeline};
use metaplectic::qform::{MixedQuadForm, Weight};
use metaplectic::symplectic::{
    adjoint_map, fio_kernel_phase, kernel_adjoint_phase, positivity, pushforward_weight, CanonicalMap, STRUCTURE_TOL,
};
use metaplectic::Error;
use num_complex::Complex64;

pub use job::{Command, JobSpec, Overrides};
pub use report::{Report, Status};

use job::{HoloJson, WeightJson};
use report::{Check, OracleConstant, OracleSection};

/// Sample points for x-independence checks.
const SAMPLE_POINTS: [Complex64; 5] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.8, 0.0),
    Complex64::new(-0.6, 0.4),
    Complex64::new(0.2, -0.9),
    Complex64::new(1.1, 0.7),
];
const ORACLE_TOL: f64 = 1e-6;
const CLOSED_FORM_TOL: f64 = 1e-10;

struct Failure {
    status: Status,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { status: Status::InputError, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Dimension(_)
            | Error::NotHermitian { .. }
            | Error::NotSymmetric { .. }
            | Error::NotHamiltonian { .. }
            | Error::NotCanonical { .. } => Status::InputError,
            Error::Num(_) | Error::Quadrature(_) => Status::NumericalError,
            _ => Status::GateFailed,
        };
        Failure { status, message: e.to_string() }
    }
}

/// Parses, applies overrides, and runs; never panics on bad input.
pub fn run_text(text: &str, overrides: &Overrides) -> Report {
    let mut job = match JobSpec::parse(text) {
        Ok(job) => job,
        Err(m) => return Report::failure(None, Status::InputError, m),
    };
    job.apply(overrides);
    if let Err(m) = job.validate() {
        return Report::failure(Some(job.command), Status::InputError, m);
    }
    run(&job)
}

pub fn run(job: &JobSpec) -> Report {
    match execute(job) {
        Ok(r) => r,
        Err(f) => Report::failure(Some(job.command), f.status, f.message),
    }
}

fn execute(job: &JobSpec) -> Result<Report, Failure> {
    job.validate().map_err(Failure::input)?;
    let n = job.dimension().map_err(Failure::input)?;
    let weight = job.weight(n).map_err(Failure::input)?;
    let tol = job.options.tol;
    let symbols: Vec<MixedQuadForm> = job
        .symbols
        .iter()
        .map(|s| s.to_form().map_err(Failure::input))
        .collect::<Result<_, _>>()?;
    match job.command {
        Command::Analyze => {
            let r = toeplitz_to_weyl(&symbols[0], &weight, tol)?;
            let mut report = Report::from_pipeline(job.command, n, &r);
            if job.options.oracle {
                report.oracle = Some(oracle_constant(job, n, Pipeline::ToeplitzToWeyl { q: &symbols[0] }, &r, &weight)?);
            }
            Ok(report)
        }
        Command::Compose => {
            let r = compose_toeplitz(&symbols[0], &symbols[1], &weight, tol)?;
            let mut report = Report::from_pipeline(job.command, n, &r);
            if job.options.oracle {
                let p = Pipeline::Compose { q: &symbols[0], q_tilde: &symbols[1] };
                report.oracle = Some(oracle_constant(job, n, p, &r, &weight)?);
            }
            Ok(report)
        }
        Command::WeylToToeplitz => {
            let g = job.forms[0].to_form().map_err(Failure::input)?;
            let r = weyl_to_toeplitz(&g, &weight, tol)?;
            let mut report = Report::from_pipeline(job.command, n, &r);
            if job.options.oracle {
                report.oracle = Some(oracle_constant(job, n, Pipeline::WeylToToeplitz { g: &g }, &r, &weight)?);
            }
            Ok(report)
        }
        Command::Adjoint => adjoint(job, n, &weight),
        Command::Pushforward => pushforward(job, n, &weight),
        Command::Verify => verify(job, n, &weight, &symbols),
    }
}

fn canonical_map(job: &JobSpec) -> Result<CanonicalMap, Failure> {
    let m = job.map.clone().ok_or_else(|| Failure::input("missing canonical map"))?;
    Ok(CanonicalMap::new(m)?)
}

fn oracle_options(job: &JobSpec, n: usize) -> Result<(GridOptions, OracleSection), Failure> {
    if n != 1 {
        return Err(Failure::input(format!("the oracle runs at n = 1, job has n = {n}")));
    }
    let opts = job.options.grid_options().map_err(Failure::input)?;
    let section = OracleSection {
        m: opts.m,
        r: opts.r,
        reference: job.options.reference(),
        constants: Vec::new(),
        skipped: None,
    };
    Ok((opts, section))
}

fn oracle_constant(
    job: &JobSpec,
    n: usize,
    pipeline: Pipeline,
    r: &PipelineReport,
    weight: &Weight,
) -> Result<OracleSection, Failure> {
    let (opts, mut section) = oracle_options(job, n)?;
    if r.verdict != Verdict::Passed {
        section.skipped = Some("gates failed".into());
        return Ok(section);
    }
    let est = constant_estimate(pipeline, r, weight, section.reference, opts)?;
    section.constants.push(OracleConstant {
        what: "C (m vs 2m)".into(),
        value: est.value,
        error_bar: est.error_bar,
    });
    Ok(section)
}

fn adjoint(job: &JobSpec, n: usize, w1: &Weight) -> Result<Report, Failure> {
    let tol = job.options.tol;
    let k = canonical_map(job)?;
    let w2 = match &job.weight_out {
        Some(w) => w.to_weight().map_err(Failure::input)?,
        None => w1.clone(),
    };
    let star = adjoint_map(&k, w1, &w2)?;
    let back = adjoint_map(&star, &w2, w1)?;
    let mut report = Report::new(Some(job.command), Status::Passed);
    report.dimension = Some(n);
    let defect = star.defect();
    report.checks.push(Check {
        name: "κ* canonical".into(),
        passed: defect <= STRUCTURE_TOL,
        value: Some(defect),
        detail: "‖κ*ᵀJκ* − J‖ relative".into(),
    });
    let inv = relative_distance(back.matrix(), k.matrix());
    report.checks.push(Check {
        name: "(κ*)* = κ".into(),
        passed: inv <= STRUCTURE_TOL,
        value: Some(inv),
        detail: "relative distance".into(),
    });
    for (name, map, from, to) in [("κ: Φ₁ → Φ₂", &k, w1, &w2), ("κ*: Φ₂ → Φ₁", &star, &w2, w1)] {
        let d = positivity(map, from, to, tol)?;
        report.checks.push(Check {
            name: format!("positivity of {name}"),
            passed: d.is_nonnegative(),
            value: Some(d.min_relative()),
            detail: d.status.to_string(),
        });
    }
    let psi = fio_kernel_phase(&k, w1, &w2, tol)?;
    let psi_star = fio_kernel_phase(&star, &w2, w1, tol)?;
    let sym = relative_distance(psi_star.hessian(), kernel_adjoint_phase(&psi)?.hessian());
    report.checks.push(Check {
        name: "Ψ*(y, x) = conj Ψ(x̄, ȳ)".into(),
        passed: sym <= STRUCTURE_TOL,
        value: Some(sym),
        detail: "relative distance of Hessians".into(),
    });
    report.canonical_map = Some(star.matrix().clone());
    report.kernel_phase = Some(HoloJson::from_form(&psi));
    report.adjoint_kernel_phase = Some(HoloJson::from_form(&psi_star));
    report.settle_checks(Status::GateFailed);
    Ok(report)
}

fn pushforward(job: &JobSpec, n: usize, weight: &Weight) -> Result<Report, Failure> {
    let tol = job.options.tol;
    let k = canonical_map(job)?;
    let w1 = pushforward_weight(&k, weight, tol)?;
    let mut report = Report::new(Some(job.command), Status::Passed);
    report.dimension = Some(n);
    let pos = positivity(&k, weight, weight, tol)?;
    report.checks.push(Check {
        name: "positivity of κ relative to Λ_Φ".into(),
        passed: pos.is_nonnegative(),
        value: Some(pos.min_relative()),
        detail: pos.status.to_string(),
    });
    let drop = weight.real_form().sub(&w1.real_form()).classify_scaled(tol, weight.h().norm_max())?;
    report.checks.push(Check {
        name: "Φ − κ_*Φ ≥ 0".into(),
        passed: drop.is_nonnegative(),
        value: Some(drop.min_relative()),
        detail: drop.status.to_string(),
    });
    report.weight_out = Some(WeightJson::from_weight(&w1));
    report.settle_checks(Status::GateFailed);
    Ok(report)
}

fn verify(job: &JobSpec, n: usize, weight: &Weight, symbols: &[MixedQuadForm]) -> Result<Report, Failure> {
    let tol = job.options.tol;
    let (opts, mut section) = oracle_options(job, n)?;
    let oracle = Oracle::new(opts)?;
    let r = match symbols {
        [q] => toeplitz_to_weyl(q, weight, tol)?,
        [q, qt] => compose_toeplitz(q, qt, weight, tol)?,
        _ => return Err(Failure::input("verify takes one or two symbols")),
    };
    let mut report = Report::from_pipeline(job.command, n, &r);

    if let Some(check) = closed_form_check(weight, symbols, &r) {
        report.checks.push(check);
    }
    for (i, q) in symbols.iter().enumerate() {
        let single = toeplitz_to_weyl(q, weight, tol)?;
        let Some(f) = single.weyl_exponent.as_ref() else { continue };
        let mut ratios = Vec::with_capacity(SAMPLE_POINTS.len());
        for x in SAMPLE_POINTS {
            ratios.push(oracle.weyl_symbol_numeric(q, weight, x)? / weyl_symbol_on_lambda(f, weight, x));
        }
        let spread = ratios.iter().map(|z| relative_error(*z, ratios[0])).fold(0.0, f64::max);
        report.checks.push(Check {
            name: format!("oracle Weyl symbol of q{}", i + 1),
            passed: spread <= ORACLE_TOL,
            value: Some(spread),
            detail: "spread of quadrature ÷ e^{iF|Λ} over 5 points".into(),
        });
        section.constants.push(OracleConstant {
            what: format!("Weyl constant of q{}", i + 1),
            value: ratios[0],
            error_bar: spread * ratios[0].norm(),
        });
    }
    if let [q, qt] = symbols {
        if r.verdict == Verdict::Passed {
            let est = constant_estimate(Pipeline::Compose { q, q_tilde: qt }, &r, weight, section.reference, opts)?;
            let rel = est.error_bar / est.value.norm().max(1e-30);
            report.checks.push(Check {
                name: "composition constant stable under refinement".into(),
                passed: rel <= ORACLE_TOL,
                value: Some(rel),
                detail: format!("m = {} vs {}", opts.m, 2 * opts.m),
            });
            section.constants.push(OracleConstant {
                what: "composition constant".into(),
                value: est.value,
                error_bar: est.error_bar,
            });
        } else {
            section.skipped = Some("composition gates failed".into());
        }
    }
    report.oracle = Some(section);
    report.settle_checks(Status::NumericalError);
    Ok(report)
}

/// Engine against the closed forms of the radial and extended families
/// on `|x|²/4`.
fn closed_form_check(weight: &Weight, symbols: &[MixedQuadForm], r: &PipelineReport) -> Option<Check> {
    let model = Weight::model(weight.dim());
    if weight.max_abs_diff(&model) != 0.0 || symbols.iter().any(|q| q.b().norm_max() != 0.0) {
        return None;
    }
    let lambda = |q: &MixedQuadForm| q.c()[(0, 0)];
    match symbols {
        [q] if q.d().norm_max() == 0.0 => {
            let f = r.weyl_exponent.as_ref()?;
            let expect = radial_analyze(lambda(q)).ok()?.weyl_coeff;
            let err = (f.hessian()[(0, 1)] / 2.0 - expect).norm() / expect.norm().max(1.0);
            Some(Check {
                name: "engine matches λ/(1−λ)".into(),
                passed: err <= CLOSED_FORM_TOL,
                value: Some(err),
                detail: "Weyl coefficient of the radial symbol".into(),
            })
        }
        [q, qt] => {
            let s = ExtendedSymbol::new(lambda(q), q.d().clone()).ok()?;
            let st = ExtendedSymbol::new(lambda(qt), qt.d().clone()).ok()?;
            let e = extended_compose(&s, &st).ok()?;
            let got = r.toeplitz_exponent.as_ref()?;
            let err = relative_distance(got.c(), &metaplectic::numkernel::CMatrix::scalar(1, e.lambda_hat))
                .max(got.d().max_abs_diff(&e.a_hat) / (1.0 + e.a_hat.norm_max()));
            let passed = err <= CLOSED_FORM_TOL && r.gate(GateId::Composition).is_some_and(|g| g.passed());
            Some(Check {
                name: "engine matches λ̂, Â".into(),
                passed,
                value: Some(err),
                detail: format!("closure inequality {}", if e.closure.ok { "holds" } else { "fails" }),
            })
        }
        _ => None,
    }
}
