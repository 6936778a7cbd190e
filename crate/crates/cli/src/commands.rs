//! One function per subcommand. Each returns an [`Outcome`]; the caller wraps
//! it in the envelope and writes it.

use std::path::Path;

use anyhow::{bail, Context};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use dalembert_core::bordism::{
    apply_admissibility, attractor_verdict, classify, default_coefficients, integral_bordism, preset,
    short_exact_kernel, Admissibility, BordismCoefficients, HomologyTable,
};
use dalembert_core::characteristics::{integrate_characteristic_flow, ClosedFormSolution, DEFAULT_STEP};
use dalembert_core::conservation::{
    component_input_names, exterior_derivative_coefficients, loop_integral, rectangle_loop, ConservationForm,
    SolutionSampleSet, DEFAULT_MAX_ALPHA_ORDER,
};
use dalembert_core::dalembert::{equation_dimension, evaluate_point, symbol_dimension, whitney_check, PointStatus};
use dalembert_core::exotic::sample_sigma;
use dalembert_core::field::variable_names;
use dalembert_core::stability::{
    adjoint_defect, boundedness_probe, linearized_residual, stability_verdict, xi_eval, AverageWindow, Perturbation,
    Verdict as StabilityVerdict,
};
use dalembert_core::{Error as CoreError, Field};

use crate::config::{Format, RunConfig};
use crate::report::{csv_rows, Verdict};

pub struct Outcome {
    pub payload: serde_json::Value,
    pub verdict: Verdict,
    pub csv: Option<String>,
    pub default_format: Format,
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn csv_table(header: &[String], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Shortest round-trip form, with an exponent for small and large magnitudes.
fn num(v: f64) -> String {
    serde_json::Value::from(v).to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn read_json<T: for<'de> Deserialize<'de>>(arg: &str, what: &str) -> anyhow::Result<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).with_context(|| format!("cannot read {what} file {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("invalid {what} spec"))
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, count: usize, half_width: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..n).map(|_| rng.random_range(-half_width..half_width)).collect())
        .collect()
}

fn parse_points(s: &str, n: usize) -> anyhow::Result<Vec<Vec<f64>>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let coords: Vec<f64> = p
                .split(',')
                .map(|c| c.trim().parse::<f64>().with_context(|| format!("bad coordinate `{}`", c.trim())))
                .collect::<anyhow::Result<_>>()?;
            if coords.len() != n {
                bail!("point `{p}` has {} coordinates, expected {n}", coords.len());
            }
            Ok(coords)
        })
        .collect()
}

// dims

#[derive(Debug, Args)]
pub struct DimsArgs {
    #[arg(long)]
    pub n: usize,
}

pub fn dims(a: &DimsArgs) -> anyhow::Result<Outcome> {
    let w = whitney_check(a.n)?;
    let payload = json!({
        "n": a.n,
        "equation_dimension": equation_dimension(a.n)?,
        "symbol_dimension": symbol_dimension(a.n)?,
        "whitney": w.embeddable,
        "whitney_required": w.required,
    });
    let csv = csv_table(
        &["n", "equation_dimension", "symbol_dimension", "whitney", "whitney_required"].map(String::from),
        &[vec![
            a.n.to_string(),
            w.dim_equation.to_string(),
            symbol_dimension(a.n)?.to_string(),
            w.embeddable.to_string(),
            w.required.to_string(),
        ]],
    )?;
    Ok(Outcome { payload, verdict: Verdict::Pass, csv: Some(csv), default_format: Format::Json })
}

// verify-solution

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// The field f as an expression in x, y, z, w or x1 .. xn.
    #[arg(long)]
    pub field: String,
    #[arg(long)]
    pub n: usize,
    /// Explicit points, e.g. "0.1,0.2;0.3,-0.4". Overrides random sampling.
    #[arg(long)]
    pub points: Option<String>,
    /// Number of random points drawn from the seed.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Random points are uniform in [-w, w]^n.
    #[arg(long, default_value_t = 1.0)]
    pub half_width: f64,
}

pub fn verify_solution(a: &VerifyArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let f: Field = Field::parse(&a.field, a.n)?;
    let points = match &a.points {
        Some(s) => parse_points(s, a.n)?,
        None => {
            if !(a.half_width > 0.0) {
                bail!("--half-width must be positive");
            }
            random_points(&mut ChaCha8Rng::seed_from_u64(cfg.seed), a.n, a.count, a.half_width)
        }
    };
    if points.is_empty() {
        bail!("no sample points");
    }
    let tol = cfg.tolerance("residual");
    let records = points
        .iter()
        .map(|p| evaluate_point(&f, p, a.n, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = records.iter().filter(|r| r.status != PointStatus::NotSolution).count();
    let max_log = records.iter().filter_map(|r| r.residual_log).fold(0.0f64, |m, v| m.max(v.abs()));
    let payload = json!({
        "field": a.field,
        "n": a.n,
        "tolerance": tol,
        "points_total": records.len(),
        "points_passed": passed,
        "max_abs_residual_log": max_log,
        "points": records,
    });
    let mut header = variable_names(a.n);
    header.extend(["value", "residual_log", "residual_poly", "status"].map(String::from));
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row: Vec<String> = r.point.iter().map(|&v| num(v)).collect();
            row.push(num(r.value));
            row.push(opt(r.residual_log));
            row.push(opt(r.residual_poly));
            row.push(serde_json::to_value(r.status).expect("status").as_str().unwrap_or_default().to_string());
            row
        })
        .collect();
    Ok(Outcome {
        payload,
        verdict: verdict(passed == records.len()),
        csv: Some(csv_table(&header, &rows)?),
        default_format: Format::Json,
    })
}

// characteristics

#[derive(Debug, Args)]
pub struct BaseArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// h(x) in the closed form u = (β y²/2 + α y + 1)·h(x).
    #[arg(long, default_value = "1")]
    pub h: String,
}

impl BaseArgs {
    fn solution(&self) -> anyhow::Result<ClosedFormSolution> {
        Ok(ClosedFormSolution::parse(self.alpha, self.beta, &self.h)?)
    }
}

#[derive(Debug, Args)]
pub struct CharacteristicsArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub dt: f64,
}

pub fn characteristics(a: &CharacteristicsArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let sol = a.base.solution()?;
    let traj = integrate_characteristic_flow(&sol, a.x0, a.y0, a.t_end, a.dt)?;
    let consistency = traj.u_consistency(&sol)?;
    let tol = cfg.tolerance("consistency");
    let last = traj.last();
    let payload = json!({
        "alpha": a.base.alpha,
        "beta": a.base.beta,
        "h": a.base.h,
        "x0": a.x0,
        "y0": a.y0,
        "t_end": a.t_end,
        "dt": a.dt,
        "steps": traj.samples.len() - 1,
        "blow_up": traj.blow_up,
        "u_consistency": consistency,
        "tolerance": tol,
        "final": last,
    });
    Ok(Outcome {
        payload,
        verdict: verdict(!traj.blow_up && consistency < tol),
        csv: Some(csv_rows(&traj.samples)?),
        default_format: Format::Csv,
    })
}

// stability-report

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    /// s(y) in ξ = (s(y) + r(x))·u.
    #[arg(long, default_value = "1")]
    pub s: String,
    /// r(x) in ξ = (s(y) + r(x))·u.
    #[arg(long, default_value = "0")]
    pub r: String,
    /// Test function φ(x, y) for the self-adjointness defect.
    #[arg(long, default_value = "exp(-x^2)")]
    pub phi: String,
    /// Half width L of the averaging window [-L, L].
    #[arg(long, default_value_t = 5.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub t1: f64,
    /// Number of time samples.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Gauss-Legendre nodes across the window.
    #[arg(long, default_value_t = 128)]
    pub quadrature: usize,
}

#[derive(Serialize)]
struct StabilityRow {
    t: f64,
    p: f64,
    pdot: f64,
}

pub fn stability_report(a: &StabilityArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let pert = Perturbation::parse(&a.s, &a.r, a.base.solution()?)?;
    let phi: Field = Field::parse(&a.phi, 2)?;
    let window = AverageWindow::uniform(a.half_width, a.t0, a.t1, a.samples, a.quadrature)?;
    let report = stability_verdict(&pert, &window, cfg.tolerance("c_min"))?;

    let mut defect_max = 0.0f64;
    let mut pairing_max = 0.0f64;
    for &t in &window.t_grid {
        let d = adjoint_defect(&pert, &phi, &window, t)?;
        defect_max = defect_max.max(d.pointwise_max);
        pairing_max = pairing_max.max(d.pairing.abs());
    }

    // The perturbation must solve the linearized equation on the window.
    let tol = cfg.tolerance("residual");
    let mut linearization_max = 0.0f64;
    let mut linearization_ok = true;
    for &t in &window.t_grid {
        for k in 0..9 {
            let x = -a.half_width + 2.0 * a.half_width * k as f64 / 8.0;
            let r = linearized_residual(&pert, [x, t])?;
            let scale = 1f64.max((xi_eval(&pert, x, t)? * pert.base.value(x, t)?).abs());
            linearization_max = linearization_max.max(r.abs());
            linearization_ok &= r.abs() <= tol * scale;
        }
    }
    let boundedness = boundedness_probe(&pert, a.t1.max(1.0), a.half_width)?;

    let mut payload = serde_json::to_value(&report)?;
    let obj = payload.as_object_mut().expect("report is an object");
    obj.insert("defect_max".into(), json!(defect_max));
    obj.insert("pairing_defect_max".into(), json!(pairing_max));
    obj.insert("linearization_max".into(), json!(linearization_max));
    obj.insert("boundedness".into(), serde_json::to_value(boundedness)?);

    let rows = report
        .p_samples
        .iter()
        .zip(&report.pdot_samples)
        .map(|(&(t, p), &(_, pdot))| StabilityRow { t, p, pdot });
    Ok(Outcome {
        payload,
        verdict: verdict(linearization_ok && report.verdict != StabilityVerdict::Indeterminate),
        csv: Some(csv_rows(rows)?),
        default_format: Format::Json,
    })
}

// conservation-check

#[derive(Debug, Args)]
pub struct ConservationArgs {
    /// Form spec, a file or inline JSON: {"n": 2, "components": ["I_0_0", "0"], "alpha_cap": 2}.
    #[arg(long)]
    pub form: String,
    /// Solution spec, a file or inline JSON: {"f": "exp(x)*exp(y)", "points": [[0.1, 0.2]]}
    /// or {"f": ..., "count": 20, "half_width": 1.0}; optional "loop": [x0, y0, x1, y1].
    #[arg(long)]
    pub solution: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormSpec {
    n: usize,
    components: Vec<String>,
    #[serde(default = "default_alpha_cap")]
    alpha_cap: usize,
}

fn default_alpha_cap() -> usize {
    DEFAULT_MAX_ALPHA_ORDER
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionSpec {
    f: String,
    #[serde(default)]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_count")]
    count: usize,
    #[serde(default = "default_half_width")]
    half_width: f64,
    #[serde(default, rename = "loop")]
    rectangle: Option<[f64; 4]>,
    #[serde(default = "default_loop_points")]
    loop_points: usize,
}

fn default_count() -> usize {
    20
}

fn default_half_width() -> f64 {
    1.0
}

fn default_loop_points() -> usize {
    64
}

pub fn conservation_check(a: &ConservationArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let fs: FormSpec = read_json(&a.form, "form")?;
    let ss: SolutionSpec = read_json(&a.solution, "solution")?;
    let form = ConservationForm::parse(fs.n, &fs.components, fs.alpha_cap)?;
    let f: Field = Field::parse(&ss.f, fs.n)?;
    let points = match ss.points {
        Some(p) => p,
        None => random_points(&mut ChaCha8Rng::seed_from_u64(cfg.seed), fs.n, ss.count, ss.half_width),
    };
    let inputs: Vec<Vec<String>> = (0..fs.n).map(|i| component_input_names(fs.n, i, fs.alpha_cap)).collect();
    let gate_tol = cfg.tolerance("gate");
    let tol = cfg.tolerance("conservation");
    let mut header = variable_names(fs.n);
    header.push("coefficient".into());

    let sample = match SolutionSampleSet::new(f, points, gate_tol) {
        Ok(s) => s,
        Err(CoreError::GateFailed { index, residual, tolerance }) => {
            let payload = json!({
                "n": fs.n,
                "alpha_cap": fs.alpha_cap,
                "inputs": inputs,
                "f": ss.f,
                "gate": {"passed": false, "tolerance": tolerance, "index": index, "residual": residual},
            });
            return Ok(Outcome {
                payload,
                verdict: Verdict::Fail,
                csv: Some(csv_table(&header, &[])?),
                default_format: Format::Json,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let coeffs = exterior_derivative_coefficients(&form, sample.field(), sample.points())?;
    let max_abs = coeffs.iter().fold(0.0f64, |m, c| m.max(c.coefficient.abs()));
    let loop_value = match ss.rectangle {
        Some([x0, y0, x1, y1]) => Some(loop_integral(&form, sample.field(), &rectangle_loop(x0, y0, x1, y1), ss.loop_points)?),
        None => None,
    };
    let ok = max_abs < tol && loop_value.is_none_or(|v| v.abs() < tol);
    let payload = json!({
        "n": fs.n,
        "alpha_cap": fs.alpha_cap,
        "inputs": inputs,
        "f": ss.f,
        "gate": {"passed": true, "tolerance": gate_tol},
        "tolerance": tol,
        "max_abs_coefficient": max_abs,
        "loop_integral": loop_value,
        "points": coeffs,
    });
    let rows: Vec<Vec<String>> = coeffs
        .iter()
        .map(|c| {
            let mut row: Vec<String> = c.point.iter().map(|&v| num(v)).collect();
            row.push(num(c.coefficient));
            row
        })
        .collect();
    Ok(Outcome {
        payload,
        verdict: verdict(ok),
        csv: Some(csv_table(&header, &rows)?),
        default_format: Format::Json,
    })
}

// bordism

#[derive(Debug, Args)]
pub struct BordismArgs {
    /// Shipped manifold: r2, r8, torus2 or rp3.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    pub preset: Option<String>,
    /// Manifold spec, a file or inline JSON:
    /// {"manifold": {"name": ..., "h": [...]}, "n": ..., "p": ..., "coefficients": [...], "hypothesis": ...}.
    #[arg(long)]
    pub spec: Option<String>,
    /// Bordism degree. Required with --preset.
    #[arg(long)]
    pub p: Option<usize>,
    /// none, homotopy-sphere-full or sphere-full.
    #[arg(long)]
    pub hypothesis: Option<Admissibility>,
    /// Coefficient ranks of the unoriented bordism ring, e.g. "1,0,1,0,2,1,3,1".
    #[arg(long, value_delimiter = ',')]
    pub coefficients: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BordismSpec {
    manifold: HomologyTable,
    n: usize,
    p: usize,
    #[serde(default)]
    coefficients: Option<Vec<u64>>,
    #[serde(default)]
    hypothesis: Admissibility,
    #[serde(default)]
    obstruction_zero: bool,
    #[serde(default)]
    known_group: Option<String>,
}

pub fn bordism(a: &BordismArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let mut spec = match (&a.preset, &a.spec) {
        (Some(key), _) => {
            let m = preset(key)?;
            BordismSpec {
                manifold: m.homology,
                n: m.n,
                p: a.p.context("--p is required with --preset")?,
                coefficients: None,
                hypothesis: Admissibility::None,
                obstruction_zero: m.obstruction_zero,
                known_group: m.known_group.map(String::from),
            }
        }
        (None, Some(s)) => read_json(s, "bordism")?,
        (None, None) => bail!("one of --preset or --spec is required"),
    };
    HomologyTable::new(spec.manifold.name.clone(), spec.manifold.z2_ranks.clone())?;
    if let Some(p) = a.p {
        spec.p = p;
    }
    if let Some(h) = a.hypothesis {
        spec.hypothesis = h;
    }
    let coeffs = match a
        .coefficients
        .clone()
        .or(spec.coefficients.clone())
        .or(cfg.bordism_coefficients.clone())
    {
        Some(c) => BordismCoefficients::new(c)?,
        None => default_coefficients(),
    };
    let unconstrained = integral_bordism(spec.p, &spec.manifold, &coeffs)?;
    let group = apply_admissibility(unconstrained, spec.hypothesis);
    let kernel = short_exact_kernel(unconstrained, group)?;
    let classification = classify(spec.n, group, spec.obstruction_zero, spec.known_group.as_deref());
    let attractor = attractor_verdict(spec.hypothesis);
    let payload = json!({
        "manifold": spec.manifold,
        "n": spec.n,
        "p": spec.p,
        "hypothesis": spec.hypothesis,
        "rank": group.rank,
        "group": group.to_string(),
        "unconstrained_group": unconstrained.to_string(),
        "kernel": kernel.to_string(),
        "classification": classification,
        "attractor": attractor,
        "coefficients": coeffs,
    });
    let csv = csv_table(
        &["manifold", "p", "hypothesis", "rank", "group", "zero_crystal", "attractor"].map(String::from),
        &[vec![
            spec.manifold.name.clone(),
            spec.p.to_string(),
            json!(spec.hypothesis).as_str().unwrap_or_default().to_string(),
            group.rank.to_string(),
            group.to_string(),
            classification.zero_crystal.to_string(),
            json!(attractor).as_str().unwrap_or_default().to_string(),
        ]],
    )?;
    Ok(Outcome { payload, verdict: Verdict::Pass, csv: Some(csv), default_format: Format::Json })
}

// brieskorn-sample

#[derive(Debug, Args)]
pub struct BrieskornArgs {
    /// Sphere label, 1 ..= 28.
    #[arg(long)]
    pub kappa: u32,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
}

pub fn brieskorn_sample(a: &BrieskornArgs, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let threshold = cfg.tolerance("convergence");
    let sample = match sample_sigma(a.kappa, a.count, cfg.seed) {
        Ok(s) => s,
        Err(CoreError::SamplingFailure { converged, requested }) => {
            let payload = json!({
                "kappa": a.kappa,
                "seed": cfg.seed,
                "report": {"requested": requested, "converged": converged},
                "convergence_threshold": threshold,
            });
            return Ok(Outcome { payload, verdict: Verdict::Fail, csv: None, default_format: Format::Csv });
        }
        Err(e) => return Err(e.into()),
    };
    let rate = sample.report.converged as f64 / sample.report.requested as f64;
    let ok = rate >= threshold && sample.report.all_rank_three;

    let mut header = Vec::new();
    for k in 1..=5 {
        header.push(format!("z{k}_re"));
        header.push(format!("z{k}_im"));
    }
    header.extend(["poly_residual", "sphere_residual", "rank"].map(String::from));
    let rows: Vec<Vec<String>> = sample
        .points
        .iter()
        .map(|p| {
            let mut row: Vec<String> = p.reals.iter().map(|&v| num(v)).collect();
            row.push(num(p.poly_residual));
            row.push(num(p.sphere_residual));
            row.push(p.rank.to_string());
            row
        })
        .collect();
    let mut payload = serde_json::to_value(&sample)?;
    payload
        .as_object_mut()
        .expect("sample is an object")
        .insert("convergence_rate".into(), json!(rate));
    Ok(Outcome {
        payload,
        verdict: verdict(ok),
        csv: Some(csv_table(&header, &rows)?),
        default_format: Format::Csv,
    })
}
