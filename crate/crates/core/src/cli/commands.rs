use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::Config;
use super::{Cli, Command, Outputs};
use crate::corpus::CORPUS;
use crate::error::{LabError, Result};
use crate::green::{boundary_lp_check, hardy_stein_check, littlewood_paley, torus_lp, AreaMethod};
use crate::io::GeneralizedJson;
use crate::mean::{ergodic_crosscheck, jessen_function, JessenMode, MeanSchedule};
use crate::report::CheckReport;
use crate::series::Analytic;
use crate::torus::{
    gap_experiment, kronecker_point, oscillation_experiment, parallelogram_cover, random_polygon_set,
    ss_outer_construct, visit_fraction, GapSpec, OscillationSpec, SsConstruction, SsOptions, TorusSet,
};
use crate::zeros::{
    blaschke_condition_check, counting_nf, isolate_zeros, jensen_check, mean_counting, winding_number, Rectangle,
    ZeroList,
};

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    seed: u64,
    passed: bool,
    reports: &'a [CheckReport],
    #[serde(skip_serializing_if = "Value::is_null")]
    details: Value,
}

fn num(v: Option<f64>) -> Option<Value> {
    v.map(Value::from)
}

fn pair(v: &Option<Vec<f64>>) -> Option<Value> {
    v.as_ref().map(|x| json!(x))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval { .. } => "eval",
        Command::Mean { .. } => "mean",
        Command::Jessen { .. } => "jessen",
        Command::HardyStein { .. } => "hardy-stein",
        Command::Lp { .. } => "lp",
        Command::LpBoundary { .. } => "lp-boundary",
        Command::LpTorus { .. } => "lp-torus",
        Command::Zeros { .. } => "zeros",
        Command::Counting { .. } => "counting",
        Command::MeanCounting { .. } => "mean-counting",
        Command::Jensen { .. } => "jensen",
        Command::BlaschkeCheck { .. } => "blaschke-check",
        Command::Visit { .. } => "visit",
        Command::SsBuild { .. } => "ss-build",
        Command::Gap { .. } => "gap",
        Command::Oscillation => "oscillation",
        Command::Corpus => "corpus",
    }
}

/// Folds command-line flags into the config; flags win.
fn overrides(cfg: &mut Config, command: &Command) {
    let f_flag = match command {
        Command::Eval { f, .. }
        | Command::Mean { f, .. }
        | Command::Jessen { f }
        | Command::HardyStein { f, .. }
        | Command::Lp { f, .. }
        | Command::LpBoundary { f, .. }
        | Command::LpTorus { f, .. }
        | Command::Zeros { f, .. }
        | Command::Counting { f, .. }
        | Command::MeanCounting { f, .. }
        | Command::Jensen { f, .. }
        | Command::BlaschkeCheck { f, .. } => f.f.clone(),
        _ => None,
    };
    cfg.set("f", f_flag.map(Value::from));
    match command {
        Command::Eval { s, .. } => cfg.set("points", s.as_ref().map(|s| json!([s]))),
        Command::Mean { sigma, p, .. } => {
            cfg.set("sigma", num(*sigma));
            cfg.set("p", num(*p));
        }
        Command::HardyStein { p, .. } | Command::Lp { p, .. } | Command::LpBoundary { p, .. } | Command::LpTorus { p, .. } => {
            cfg.set("p", num(*p))
        }
        Command::Zeros { rect, tol, .. } => {
            cfg.set("rect", pair(rect));
            cfg.set("tol", num(*tol));
        }
        Command::Counting { xi, t, .. } => {
            cfg.set("xi", pair(xi));
            cfg.set("T", num(*t));
        }
        Command::MeanCounting { xi, .. } => cfg.set("xi", pair(xi)),
        Command::Jensen { sigma0, .. } => cfg.set("sigma0", num(*sigma0)),
        Command::BlaschkeCheck { gamma, c, .. } => {
            cfg.set("gamma", num(*gamma));
            cfg.set("c", num(*c));
        }
        Command::Visit { t } => cfg.set("T", num(*t)),
        Command::SsBuild { delta, degree } => {
            cfg.set("delta", num(*delta));
            cfg.set("degree", degree.map(Value::from));
        }
        Command::Gap { delta } => cfg.set("delta", num(*delta)),
        _ => {}
    }
}

pub(super) fn dispatch(cli: &Cli, raw: Value) -> Result<Outputs> {
    let name = command_name(&cli.command);
    let mut cfg = Config::new(raw, name, cli.seed)?;
    overrides(&mut cfg, &cli.command);
    let seed = cfg.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outputs::default();
    let details = match &cli.command {
        Command::Eval { .. } => eval(cfg, &mut out)?,
        Command::Mean { .. } => mean(cfg, &mut out)?,
        Command::Jessen { .. } => jessen(cfg, &mut out)?,
        Command::HardyStein { .. } => hardy_stein(cfg, &mut out)?,
        Command::Lp { .. } | Command::LpBoundary { .. } => lp(cfg, name, &mut out)?,
        Command::LpTorus { .. } => lp_torus(cfg, &mut out)?,
        Command::Zeros { .. } => zeros(cfg, &mut out)?,
        Command::Counting { .. } => counting(cfg, &mut rng, &mut out)?,
        Command::MeanCounting { .. } => mean_count(cfg, &mut rng, &mut out)?,
        Command::Jensen { .. } => jensen(cfg, &mut rng, &mut out)?,
        Command::BlaschkeCheck { .. } => blaschke(cfg, &mut rng, &mut out)?,
        Command::Visit { .. } => visit(cfg, &mut rng, &mut out)?,
        Command::SsBuild { .. } => ss_build(cfg, &mut rng, &mut out)?,
        Command::Gap { .. } => gap(cfg, &mut rng, &mut out)?,
        Command::Oscillation => oscillation(cfg, &mut rng, &mut out)?,
        Command::Corpus => {
            list_corpus(&mut out);
            return Ok(out);
        }
    };
    let summary = Summary { command: name, seed, passed: out.all_pass(), reports: &out.reports, details };
    let mut bytes = serde_json::to_vec_pretty(&summary).map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    bytes.push(b'\n');
    out.files.insert(0, ("report.json".into(), bytes));
    Ok(out)
}

fn default_p() -> f64 {
    2.0
}

fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn trace_csv(out: &mut Outputs, name: &str, x: &str, reports: &[CheckReport]) -> Result<()> {
    let rows: Vec<(f64, f64)> = reports.iter().flat_map(|r| r.trace.iter().cloned()).collect();
    out.csv(name, &[x, "value"], rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalCfg {
    points: Vec<[f64; 2]>,
}

fn eval(mut cfg: Config, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: EvalCfg = cfg.finish()?;
    let rows: Vec<_> = c
        .points
        .iter()
        .map(|&s| {
            let v = f.eval(complex(s));
            (s[0], s[1], v.re, v.im, v.norm())
        })
        .collect();
    out.csv("eval.csv", &["s_re", "s_im", "f_re", "f_im", "abs"], rows)?;
    Ok(Value::Null)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanCfg {
    #[serde(default)]
    sigma: f64,
    #[serde(default = "default_p")]
    p: f64,
    #[serde(default)]
    schedule: MeanSchedule,
}

fn mean(mut cfg: Config, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: MeanCfg = cfg.finish()?;
    let r = ergodic_crosscheck(&f, c.sigma, c.p, &c.schedule)?;
    trace_csv(out, "trace.csv", "T", std::slice::from_ref(&r))?;
    out.reports.push(r);
    Ok(Value::Null)
}

fn default_sigmas() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JessenCfg {
    #[serde(default = "default_sigmas")]
    sigmas: Vec<f64>,
    /// Window half-length; the torus mean is used when absent.
    #[serde(default)]
    window: Option<f64>,
    #[serde(default = "convexity_tol")]
    tolerance: f64,
}

fn convexity_tol() -> f64 {
    1e-8
}

fn jessen(mut cfg: Config, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: JessenCfg = cfg.finish()?;
    if c.sigmas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::Input { pointer: "/sigmas".into(), message: "sigmas must be strictly increasing".into() });
    }
    let mode = match c.window {
        Some(t) => JessenMode::Window { t },
        None => JessenMode::Torus,
    };
    let values: Vec<(f64, f64)> =
        c.sigmas.iter().map(|&s| jessen_function(&f, s, mode).map(|v| (s, v))).collect::<Result<_>>()?;
    // divided second differences; convexity means all are >= 0
    let worst = values
        .windows(3)
        .map(|w| {
            let (a, b, d) = (w[0], w[1], w[2]);
            (d.1 - b.1) / (d.0 - b.0) - (b.1 - a.1) / (b.0 - a.0)
        })
        .fold(f64::INFINITY, f64::min);
    let worst = if worst.is_finite() { worst } else { 0.0 };
    let r = CheckReport::new("jessen-convexity", worst, 0.0)
        .param("mode", serde_json::to_value(mode).unwrap_or(Value::Null))
        .with_trace(values.clone());
    out.reports.push(r.judge(c.tolerance, worst >= -c.tolerance));
    out.csv("jessen.csv", &["sigma", "value"], values)?;
    Ok(Value::Null)
}

fn default_kappas() -> Vec<f64> {
    vec![0.5, 1.0]
}

fn auto() -> AreaMethod {
    AreaMethod::Auto
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HardySteinCfg {
    #[serde(default = "default_p")]
    p: f64,
    #[serde(default = "default_kappas")]
    grid: Vec<f64>,
    #[serde(default)]
    schedule: MeanSchedule,
    #[serde(default = "auto")]
    method: AreaMethod,
}

fn hardy_stein(mut cfg: Config, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: HardySteinCfg = cfg.finish()?;
    let reports = hardy_stein_check(&f, c.p, &c.grid, &c.schedule, c.method)?;
    let rows: Vec<(f64, f64, f64)> =
        c.grid.iter().zip(&reports).flat_map(|(&k, r)| r.trace.iter().map(move |&(t, v)| (k, t, v))).collect();
    out.csv("trace.csv", &["kappa", "T", "value"], rows)?;
    out.reports.extend(reports);
    Ok(Value::Null)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LpCfg {
    #[serde(default = "default_p")]
    p: f64,
    #[serde(default)]
    schedule: MeanSchedule,
    #[serde(default = "auto")]
    method: AreaMethod,
}

fn lp(mut cfg: Config, name: &str, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: LpCfg = cfg.finish()?;
    let (r, x) = if name == "lp" {
        (littlewood_paley(&f, c.p, &c.schedule, c.method)?, "sigma0")
    } else {
        (boundary_lp_check(&f, c.p, &c.schedule, c.method)?, "T")
    };
    trace_csv(out, "trace.csv", x, std::slice::from_ref(&r))?;
    out.reports.push(r);
    Ok(Value::Null)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LpTorusCfg {
    #[serde(default = "default_p")]
    p: f64,
    #[serde(default)]
    schedule: MeanSchedule,
}

fn lp_torus(mut cfg: Config, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: LpTorusCfg = cfg.finish()?;
    let r = torus_lp(&f, c.p, &c.schedule)?;
    trace_csv(out, "trace.csv", "x", std::slice::from_ref(&r))?;
    out.reports.push(r);
    Ok(Value::Null)
}

fn default_tol() -> f64 {
    1e-9
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZerosCfg {
    rect: [f64; 4],
    #[serde(default = "default_tol")]
    tol: f64,
}

fn zeros_csv(out: &mut Outputs, z: &ZeroList) -> Result<()> {
    let rows: Vec<_> = z.zeros.iter().map(|z| (z.location.re, z.location.im, z.multiplicity, z.radius)).collect();
    out.csv("zeros.csv", &["location_re", "location_im", "multiplicity", "radius"], rows)
}

fn zeros(mut cfg: Config, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: ZerosCfg = cfg.finish()?;
    let [s0, s1, t0, t1] = c.rect;
    let rect = Rectangle::new(s0, s1, t0, t1)?;
    let found = isolate_zeros(&f, &rect, c.tol)?;
    let winding = winding_number(&f, &rect)?;
    let total = found.total_multiplicity() as f64;
    let r = CheckReport::new("zeros", total, winding as f64)
        .param("complete", found.complete)
        .param("tol", c.tol)
        .param("rect", json!(c.rect));
    let ok = found.complete && total == winding as f64;
    out.reports.push(r.judge(0.0, ok));
    zeros_csv(out, &found)?;
    Ok(Value::Null)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CountingCfg {
    xi: [f64; 2],
    #[serde(rename = "T")]
    t: f64,
}

fn counting(mut cfg: Config, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: CountingCfg = cfg.finish()?;
    let r = counting_nf(&f, complex(c.xi), c.t, rng)?;
    zeros_csv(out, &r.zeros)?;
    Ok(json!({ "value": r.value, "T": r.t, "gamma": r.gamma, "xi_points": r.zeros.total_multiplicity() }))
}

fn littlewood_tol() -> f64 {
    0.02
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanCountingCfg {
    xi: [f64; 2],
    #[serde(default)]
    schedule: MeanSchedule,
    /// Allowed excess of the mean counting function over the Littlewood bound.
    #[serde(default = "littlewood_tol")]
    tolerance: f64,
}

fn mean_count(mut cfg: Config, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: MeanCountingCfg = cfg.finish()?;
    let xi = complex(c.xi);
    let m = mean_counting(&f, xi, &c.schedule, rng)?;
    let a = f.value_at_infinity();
    let bound = ((1.0 - xi.conj() * a) / (xi - a)).norm().ln();
    let r = CheckReport::new("littlewood", m.value, bound)
        .param("xi_re", xi.re)
        .param("xi_im", xi.im)
        .param("gamma", m.gamma)
        .with_trace(m.per_sigma.iter().map(|&(s, v, _)| (s, v)).collect());
    out.reports.push(r.judge(c.tolerance, m.value <= bound + c.tolerance));
    out.csv("trace.csv", &["sigma0", "T", "value"], m.trace.clone())?;
    Ok(json!({ "mean_counting": m.value, "per_sigma": m.per_sigma }))
}

fn default_sigma0() -> f64 {
    0.5
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JensenCfg {
    #[serde(default = "default_sigma0")]
    sigma0: f64,
    #[serde(default)]
    schedule: MeanSchedule,
}

fn jensen(mut cfg: Config, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: JensenCfg = cfg.finish()?;
    let r = jensen_check(&f, c.sigma0, &c.schedule, rng)?;
    trace_csv(out, "trace.csv", "T", std::slice::from_ref(&r))?;
    out.reports.push(r);
    Ok(Value::Null)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BlaschkeCfg {
    gamma: f64,
    c: f64,
}

fn blaschke(mut cfg: Config, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Value> {
    let f = cfg.take_f()?;
    let c: BlaschkeCfg = cfg.finish()?;
    let r = blaschke_condition_check(&f, c.gamma, c.c, rng)?;
    out.csv("trace.csv", &["tau", "mass"], r.trace.clone())?;
    out.reports.push(r);
    Ok(Value::Null)
}

fn default_visit_t() -> f64 {
    2000.0
}

fn visit_tol() -> f64 {
    0.03
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VisitCfg {
    #[serde(rename = "T", default = "default_visit_t")]
    t: f64,
    #[serde(default = "visit_tol")]
    tolerance: f64,
    /// With `width`: rhombus cover of the flow segment `|tau| < n`.
    n: Option<f64>,
    width: Option<f64>,
    /// Convex polygons, vertices in `[0, 2 pi)^2`.
    polygons: Option<Vec<Vec<[f64; 2]>>>,
    /// Number of random polygons.
    random: Option<usize>,
}

/// The set named by `n`/`width`, `polygons` or `random`; exactly one must be given.
fn visit_set(c: &VisitCfg, rng: &mut ChaCha8Rng) -> Result<TorusSet> {
    let given = [c.n.is_some() || c.width.is_some(), c.polygons.is_some(), c.random.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(LabError::Input {
            pointer: String::new(),
            message: "give exactly one of n/width, polygons or random".into(),
        });
    }
    if let Some(polys) = &c.polygons {
        return TorusSet::from_polygons(polys.clone());
    }
    if let Some(k) = c.random {
        return Ok(random_polygon_set(k, rng));
    }
    let missing = |k: &str| LabError::Input { pointer: format!("/{k}"), message: "missing field".into() };
    let n = c.n.ok_or_else(|| missing("n"))?;
    let w = c.width.ok_or_else(|| missing("width"))?;
    Ok(parallelogram_cover(n, w, rng)?.set)
}

fn visit(cfg: Config, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Value> {
    let c: VisitCfg = cfg.finish()?;
    let u = visit_set(&c, rng)?;
    let v = visit_fraction(&u, c.t)?;
    let r = CheckReport::new("visit", v.fraction, v.measure).param("T", c.t).param("pieces", u.pieces().len());
    let ok = r.abs_err <= c.tolerance;
    out.reports.push(r.judge(c.tolerance, ok));
    let intervals = u.flow_intervals(-c.t, c.t)?;
    out.csv("intervals.csv", &["enter", "exit"], intervals)?;
    Ok(Value::Null)
}

fn construction_details(c: &SsConstruction) -> Value {
    json!({
        "terms": c.series.len(),
        "delta": c.delta,
        "degree": c.degree,
        "e_inf": c.e_inf,
        "e2": c.e2,
        "margin_fraction": c.margin_fraction,
        "cover_fraction": c.cover_fraction,
        "log_mean": c.log_mean,
        "mollifier_std": c.mollifier_std,
        "margin": c.margin,
        "aliased_mass": c.aliased_mass,
    })
}

const BOUNDARY_SAMPLES: usize = 2001;

/// `(tau, |f(i tau)|, target modulus)` on `[-t, t]`.
fn boundary_csv(out: &mut Outputs, c: &SsConstruction, t: f64) -> Result<()> {
    let n = BOUNDARY_SAMPLES - 1;
    let rows: Vec<_> = (0..=n)
        .map(|i| {
            let tau = -t + 2.0 * t * i as f64 / n as f64;
            let v = c.series.eval(Complex64::new(0.0, tau)).norm();
            (tau, v, c.target_at(kronecker_point(tau)))
        })
        .collect();
    out.csv("boundary.csv", &["tau", "abs_f", "target"], rows)
}

fn default_n() -> f64 {
    10.0
}

fn default_width() -> f64 {
    0.3
}

fn default_delta() -> f64 {
    0.5
}

fn default_degree() -> u32 {
    48
}

fn e_inf_max() -> f64 {
    0.1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SsBuildCfg {
    #[serde(default = "default_n")]
    n: f64,
    #[serde(default = "default_width")]
    width: f64,
    #[serde(default = "default_delta")]
    delta: f64,
    #[serde(default = "default_degree")]
    degree: u32,
    #[serde(default)]
    ss: SsOptions,
    #[serde(default = "e_inf_max")]
    e_inf_max: f64,
}

fn ss_build(cfg: Config, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Value> {
    let c: SsBuildCfg = cfg.finish()?;
    let u = parallelogram_cover(c.n, c.width, rng)?.set;
    let built = ss_outer_construct(&u, c.delta, c.degree, c.ss)?;
    let r = CheckReport::new("ss-construction", built.e_inf, c.e_inf_max).param("measure_u", u.measure());
    out.reports.push(r.judge(c.e_inf_max, built.e_inf <= c.e_inf_max));
    out.json("series.json", &GeneralizedJson::from_series(&built.series))?;
    boundary_csv(out, &built, c.n)?;
    Ok(construction_details(&built))
}

fn gap(mut cfg: Config, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Value> {
    let field = |cfg: &mut Config, k: &str, d: f64| -> Result<f64> {
        match cfg.take(k) {
            None => Ok(d),
            Some(v) => v.as_f64().ok_or_else(|| LabError::Input { pointer: format!("/{k}"), message: "expected a number".into() }),
        }
    };
    let n = field(&mut cfg, "n", default_n())?;
    let width = field(&mut cfg, "width", default_width())?;
    let spec: GapSpec = cfg.finish()?;
    let u = parallelogram_cover(n, width, rng)?.set;
    let g = gap_experiment(&u, &spec, rng)?;
    trace_csv(out, "trace.csv", "T", std::slice::from_ref(&g.report))?;
    let t_end = g.report.trace.last().map_or(n, |p| p.0);
    boundary_csv(out, &g.construction, t_end)?;
    let rows: Vec<_> = g
        .nf_traces
        .iter()
        .flat_map(|tr| tr.counted.iter().zip(&tr.predicted).map(|(c, p)| (tr.xi[0], tr.xi[1], c.0, c.1, p.1)))
        .collect();
    out.csv("nf.csv", &["xi_re", "xi_im", "T", "counted", "predicted"], rows)?;
    out.reports.push(g.report);
    Ok(json!({ "construction": construction_details(&g.construction), "n": n, "width": width }))
}

fn oscillation(cfg: Config, rng: &mut ChaCha8Rng, out: &mut Outputs) -> Result<Value> {
    let spec: OscillationSpec = cfg.finish()?;
    let r = oscillation_experiment(&spec, rng)?;
    let rows: Vec<_> =
        r.means.iter().flat_map(|m| m.trace.iter().map(move |&(t, v)| (m.xi[0], m.xi[1], t, v))).collect();
    out.csv("means.csv", &["xi_re", "xi_im", "T", "mean"], rows)?;
    out.reports.push(r.report.clone());
    Ok(json!({
        "c": r.c,
        "C": r.big_c,
        "predicted_spread": r.predicted_spread,
        "min_spread": r.min_spread,
        "measured_delta_prime": r.measured_delta_prime,
        "e_inf": r.e_inf,
        "measure_u": r.measure_u,
    }))
}

fn list_corpus(out: &mut Outputs) {
    let w = CORPUS.iter().map(|e| e.name.len()).max().unwrap_or(0);
    let fw = CORPUS.iter().map(|e| e.formula.len()).max().unwrap_or(0);
    for e in CORPUS.iter() {
        out.stdout.push_str(&format!("{:w$}  {:fw$}  {}\n", e.name, e.formula, e.note));
    }
}
