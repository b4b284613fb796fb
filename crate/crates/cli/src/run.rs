use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use shimorin::berg_duran::{omega_moments_from_nu, MomentSequence};
use shimorin::charfit::{certify, fit_h, CertificateVerdict, FitProblem, FitResult};
use shimorin::kernels::{eval_integral, kernel_match, KernelSeries};
use shimorin::weight_lab::{dhat_moment_check, dhat_tail_check, log_subharmonic_check, rkhs_check};
use shimorin::{BernsteinFunction, DiskPoint, HProfile, MeasureOnUnitInterval, PrwVerdict, RadialWeightProfile};
use thiserror::Error;

use crate::config::{RunConfig, Task};
use crate::report::{write_table, RunReport, TaskReport, TaskStatus, TaskTiming, SCHEMA_VERSION};

/// Largest truncation the kernel-eval task will extend a series to.
const MAX_SERIES_TERMS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum TaskError {
    #[error(transparent)]
    Core(#[from] shimorin::Error),
    #[error("cannot write table: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Missing(&'static str),
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot write to {path}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot serialize report")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub timings: Vec<TaskTiming>,
}

type TaskOutput = Result<(Value, Vec<String>), TaskError>;

struct Context<'a> {
    config: &'a RunConfig,
    out: &'a Path,
    fitted: Option<HProfile>,
}

impl Context<'_> {
    fn measure(&self) -> Result<&MeasureOnUnitInterval, TaskError> {
        self.config.measure.as_ref().ok_or(TaskError::Missing("no measure configured"))
    }

    fn weight(&self) -> Result<&RadialWeightProfile, TaskError> {
        self.config.weight.as_ref().ok_or(TaskError::Missing("no weight configured"))
    }

    fn fit_problem(&self, nu: &MeasureOnUnitInterval) -> FitProblem {
        let mut problem = FitProblem::new(nu.clone());
        problem.moments = self.config.fit_moments;
        problem.grid = FitProblem::default_grid(self.config.grid_points, 12.0);
        problem.feasibility_tol = self.config.feasibility_tol;
        problem
    }

    /// The fit grid without `t = 0`, which maps to `r = 1`.
    fn interior_grid(&self) -> Vec<f64> {
        FitProblem::default_grid(self.config.grid_points + 1, 12.0)[1..].to_vec()
    }

    fn table(
        &self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = (usize, Vec<f64>)>,
    ) -> Result<String, TaskError> {
        write_table(&self.out.join(name), header, rows)?;
        Ok(name.to_string())
    }
}

/// Runs every task in order and writes `report.json`, `timings.json` and the
/// CSV tables into `out`.
pub fn run(config: &RunConfig, out: &Path) -> Result<RunOutcome, RunError> {
    std::fs::create_dir_all(out).map_err(|source| RunError::Io { path: out.display().to_string(), source })?;
    let mut ctx = Context { config, out, fitted: None };
    let mut tasks = Vec::with_capacity(config.tasks.len());
    let mut timings = Vec::with_capacity(config.tasks.len());
    for &task in &config.tasks {
        let started = Instant::now();
        let output = match task {
            Task::Classify => classify(&ctx),
            Task::Coefficients => coefficients(&ctx),
            Task::KernelEval => kernel_eval(&ctx),
            Task::WeightMoments => weight_moments(&ctx),
            Task::Dhat => dhat(&ctx),
            Task::FitH => fit(&mut ctx),
            Task::Certify => certify_task(&ctx),
            Task::RoundTrip => round_trip(&ctx),
        };
        timings.push(TaskTiming { task, seconds: started.elapsed().as_secs_f64() });
        tasks.push(match output {
            Ok((result, files)) => {
                TaskReport { task, status: TaskStatus::Ok, error: None, result: Some(result), files }
            }
            Err(e) => TaskReport {
                task,
                status: TaskStatus::Error,
                error: Some(e.to_string()),
                result: None,
                files: Vec::new(),
            },
        });
    }
    let report = RunReport { schema_version: SCHEMA_VERSION.to_string(), tasks };
    write_json(&out.join("report.json"), &report)?;
    write_json(&out.join("timings.json"), &timings)?;
    Ok(RunOutcome { report, timings })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| RunError::Io { path: path.display().to_string(), source })
}

fn classify(ctx: &Context) -> TaskOutput {
    let nu = ctx.measure()?;
    let prw = nu.prw_classify()?;
    let bergman_kernel = match prw {
        PrwVerdict::Diverges => json!(true),
        PrwVerdict::Converges => json!(false),
        PrwVerdict::Unknown => Value::Null,
    };
    Ok((
        json!({
            "prw": prw,
            "bergman_kernel": bergman_kernel,
            "total_mass": nu.total_mass(),
            "mass_at_zero": nu.mass_at_zero(),
            "mass_at_one": nu.mass_at_one(),
        }),
        Vec::new(),
    ))
}

fn coefficients(ctx: &Context) -> TaskOutput {
    let nu = ctx.measure()?;
    let n_max = ctx.config.max_n;
    let c = BernsteinFunction::with_prefix(nu.clone(), n_max).kernel_coefficients(n_max);
    let file =
        ctx.table("coefficients.csv", &["n", "c_n"], c.values().iter().enumerate().map(|(n, &v)| (n, vec![v])))?;
    Ok((json!({ "count": c.len(), "c_0": c.values()[0], "c_max": c.values()[n_max] }), vec![file]))
}

fn kernel_eval(ctx: &Context) -> TaskOutput {
    let nu = ctx.measure()?;
    let tol = ctx.config.tol;
    let f = BernsteinFunction::with_prefix(nu.clone(), ctx.config.max_n);
    let mut series = KernelSeries::from_bernstein(&f, ctx.config.max_n);
    let mut points = Vec::new();
    for p in &ctx.config.eval_points {
        let x = p.value();
        let point = DiskPoint::from_product(x)?;
        let value = match series.eval_series(&point, tol) {
            Err(shimorin::Error::NeedMoreTerms { required, .. }) if required <= MAX_SERIES_TERMS => {
                series = KernelSeries::from_bernstein(&f, required);
                series.eval_series(&point, tol)?
            }
            other => other?,
        };
        let integral = eval_integral(nu, &point)?;
        points.push(json!({
            "x": [x.re, x.im],
            "series": [value.value.re, value.value.im],
            "integral": [integral.re, integral.im],
            "terms": value.terms,
            "tail_bound": value.tail_bound,
            "difference": (value.value - integral).norm(),
        }));
    }
    Ok((json!({ "tol": tol, "points": points }), Vec::new()))
}

fn weight_moments(ctx: &Context) -> TaskOutput {
    let w = ctx.weight()?;
    let moments = w.moments(ctx.config.max_n as u32)?;
    let file = ctx.table(
        "weight_moments.csv",
        &["n", "omega_n"],
        moments.values().iter().enumerate().map(|(n, &v)| (n, vec![v])),
    )?;
    let subharmonic = log_subharmonic_check(w, &ctx.interior_grid(), ctx.config.tol)?;
    Ok((
        json!({
            "count": moments.len(),
            "rkhs": rkhs_check(w),
            "log_subharmonic": subharmonic,
        }),
        vec![file],
    ))
}

fn dhat(ctx: &Context) -> TaskOutput {
    let ceiling = ctx.config.dhat_ceiling;
    let count = 2 * ctx.config.max_n;
    if let Some(w) = &ctx.config.weight {
        let moments = w.moments(count as u32)?;
        let r_grid: Vec<f64> = (0..=99).map(|i| i as f64 / 100.0).collect();
        let ratio = dhat_moment_check(&moments, ceiling)?;
        let tail = dhat_tail_check(w, &r_grid, ceiling)?;
        return Ok((json!({ "source": "weight", "moment_ratio": ratio, "tail": tail }), Vec::new()));
    }
    let induced = match omega_moments_from_nu(ctx.measure()?, count) {
        Err(shimorin::Error::NotBergmanKernel) => {
            let reason = "the divergence condition fails, so no weight reproduces this kernel";
            return Ok((json!({ "source": "measure", "applicable": false, "reason": reason }), Vec::new()));
        }
        other => other?,
    };
    let ratio = dhat_moment_check(&induced.moments, ceiling)?;
    Ok((
        json!({ "source": "measure", "applicable": true, "moment_ratio": ratio, "warning": induced.warning }),
        Vec::new(),
    ))
}

fn fit_summary(result: &FitResult) -> Value {
    json!({
        "verdict": result.verdict,
        "max_residual": result.max_residual,
        "iterations": result.iterations,
        "convexity": result.convexity,
        "growth": result.growth,
        "warning": result.warning,
        "profile": result.profile,
    })
}

fn residual_rows(nu: &MeasureOnUnitInterval, hp: &HProfile, count: usize) -> Result<Vec<(usize, Vec<f64>)>, TaskError> {
    let c = BernsteinFunction::with_prefix(nu.clone(), count).kernel_coefficients(count - 1);
    c.values()
        .iter()
        .enumerate()
        .map(|(n, &cn)| {
            let achieved = hp.laplace_transform(n as f64)?;
            Ok((n, vec![1.0 / cn, achieved, (cn * achieved - 1.0).abs()]))
        })
        .collect()
}

fn fit(ctx: &mut Context) -> TaskOutput {
    let nu = ctx.measure()?.clone();
    let problem = ctx.fit_problem(&nu);
    let result = fit_h(&problem)?;
    let mut files = Vec::new();
    if let Some(hp) = &result.profile {
        let rows = residual_rows(&nu, hp, problem.moments)?;
        files.push(ctx.table("fit_residuals.csv", &["n", "target", "achieved", "relative_residual"], rows)?);
    }
    ctx.fitted = result.profile.clone();
    Ok((fit_summary(&result), files))
}

fn certify_task(ctx: &Context) -> TaskOutput {
    let nu = ctx.measure()?;
    let hp = ctx
        .config
        .h_profile
        .as_ref()
        .or(ctx.fitted.as_ref())
        .ok_or(TaskError::Missing("no h-profile configured and fit-h produced none"))?;
    let cert = certify(nu, hp, ctx.config.fit_moments, ctx.config.feasibility_tol)?;
    Ok((serde_json::to_value(&cert).map_err(|_| TaskError::Missing("certificate is not serializable"))?, Vec::new()))
}

/// ν → coefficients → ω-moments → kernel match → fit-h → certify.
fn round_trip(ctx: &Context) -> TaskOutput {
    let nu = ctx.measure()?;
    let n_max = ctx.config.max_n;
    let prw = nu.prw_classify()?;
    let coefficients = BernsteinFunction::with_prefix(nu.clone(), n_max).kernel_coefficients(n_max);
    let mut files = vec![ctx.table(
        "round_trip_coefficients.csv",
        &["n", "c_n"],
        coefficients.values().iter().enumerate().map(|(n, &v)| (n, vec![v])),
    )?];
    if prw == PrwVerdict::Converges {
        return Ok((
            json!({
                "prw": prw,
                "bergman_kernel": false,
                "match": "Skipped",
                "fit": Value::Null,
                "certificate": "Skipped",
            }),
            files,
        ));
    }
    let induced = omega_moments_from_nu(nu, 2 * n_max + 1)?;
    let omega: &MomentSequence = &induced.moments;
    files.push(ctx.table(
        "omega_moments.csv",
        &["n", "omega_n"],
        omega.values().iter().enumerate().map(|(n, &v)| (n, vec![v])),
    )?);
    let matched = kernel_match(nu, omega, n_max, ctx.config.tol)?;

    let problem = ctx.fit_problem(nu);
    let fitted = fit_h(&problem)?;
    let certificate = match &fitted.profile {
        Some(hp) => Some(certify(nu, hp, problem.moments, problem.feasibility_tol)?),
        None => None,
    };
    let certificate_verdict = match &certificate {
        Some(c) if c.verdict == CertificateVerdict::Certified => "Certified",
        Some(_) => "NotCertified",
        None => "Skipped",
    };
    Ok((
        json!({
            "prw": prw,
            "bergman_kernel": prw == PrwVerdict::Diverges,
            "warning": induced.warning,
            "kernel_match": matched,
            "match": if matched.matched { "Match" } else { "Mismatch" },
            "fit": fit_summary(&fitted),
            "certificate": certificate_verdict,
            "certificate_failures": certificate.map(|c| c.failures).unwrap_or_default(),
        }),
        files,
    ))
}
