//! Hardy-Stein identity and Littlewood-Paley formulas: area integrals of `p^2 |f|^{p-2} |f'|^2`
//! over vertical strips, compared with derivatives of torus means and with Hardy norms.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::mean::{check_exponent, hp_norm, powp, torus_mean, window_mean, MeanSchedule, TwistedSeries};
use crate::quad::{extrapolate_to_zero, integrate, integrate_with_breaks, QuadOptions};
use crate::report::CheckReport;
use crate::series::{dominance_abscissa, Analytic, DirichletPolynomial};
use crate::zeros::{isolate_zeros, Rectangle, Zero};

/// Radius of the disks cut out around zeros when `p < 2`.
pub const DEFAULT_RHO: f64 = 1e-3;
const TAIL_TOL: f64 = 1e-10;
const FD_STEP: f64 = 1e-4;
/// Offsets `sigma0` extrapolated to zero in the Littlewood-Paley formula.
pub const LP_SIGMAS: [f64; 3] = [0.05, 0.025, 0.0125];

/// `p^2 |f(s)|^{p-2} |f'(s)|^2`, the Laplacian of `|f|^p`.
pub fn area_integrand<F: Analytic + ?Sized>(f: &F, p: f64, s: Complex64) -> Result<f64> {
    check_exponent(p)?;
    let (v, d) = f.eval_with_derivative(s);
    Ok(integrand_value(p, v.norm(), d.norm_sqr(), s)?)
}

fn integrand_value(p: f64, m: f64, d2: f64, s: Complex64) -> Result<f64> {
    if p == 2.0 {
        return Ok(4.0 * d2);
    }
    if m < 1e-300 {
        if p < 2.0 {
            return Err(LabError::SingularPoint { re: s.re, im: s.im });
        }
        return Ok(0.0);
    }
    Ok(p * p * m.powf(p - 2.0) * d2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "sigma0", rename_all = "lowercase")]
pub enum Weight {
    None,
    /// `sigma - sigma0`
    Offset(f64),
    /// `sigma`
    Sigma,
}

impl Weight {
    fn at(self, sigma: f64) -> f64 {
        match self {
            Weight::None => 1.0,
            Weight::Offset(s0) => sigma - s0,
            Weight::Sigma => sigma,
        }
    }

    fn grows(self) -> bool {
        !matches!(self, Weight::None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaMethod {
    /// Closed form when available, else spectral for `p = 2`, else quadrature.
    Auto,
    /// Single-term series only.
    ClosedForm,
    /// `p = 2` only: the `t`-average of `|f'|^2` is summed exactly over coefficient pairs.
    Spectral,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaIntegralSpec {
    pub sigma_min: f64,
    /// Chosen from coefficient tail bounds when absent.
    pub sigma_max: Option<f64>,
    pub t: f64,
    pub weight: Weight,
    pub rho: f64,
    pub method: AreaMethod,
}

impl AreaIntegralSpec {
    pub fn new(sigma_min: f64, t: f64, weight: Weight) -> Self {
        Self { sigma_min, sigma_max: None, t, weight, rho: DEFAULT_RHO, method: AreaMethod::Auto }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma_min >= 0.0) || !(self.t > 0.0) || !(self.rho >= 0.0) {
            return Err(LabError::InvalidParameter(format!(
                "area integral needs sigma_min >= 0, T > 0, rho >= 0 (got {}, {}, {})",
                self.sigma_min, self.t, self.rho
            )));
        }
        if let Some(smax) = self.sigma_max {
            if !(smax > self.sigma_min) {
                return Err(LabError::InvalidParameter(format!(
                    "sigma_max = {smax} must exceed sigma_min = {}",
                    self.sigma_min
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaValue {
    /// `(1/2T) int int p^2 |f|^{p-2} |f'|^2 w(sigma) dt dsigma`.
    pub value: f64,
    pub error: f64,
    /// Bound for the mass inside the excluded disks, already included in `error`.
    pub excluded_mass: f64,
    pub sigma_max: f64,
    pub method: AreaMethod,
}

/// Where the integrand's tail beyond `sigma` (left Riemann sum of a coefficient bound, step
/// 1/4) drops below `1e-10`.
pub fn sigma_max<F: Analytic + ?Sized>(f: &F, p: f64, weight: Weight, start: f64) -> Result<f64> {
    check_exponent(p)?;
    let a0 = f.value_at_infinity().norm();
    let spec = f.spectrum();
    let mut sigma = start;
    let lower: Option<Box<dyn Fn(f64) -> f64>> = if p < 2.0 {
        let gamma = dominance_abscissa(&spec).ok_or_else(|| LabError::InvalidSeries("zero series".into()))?;
        sigma = sigma.max(gamma);
        let (l0, c0) = *spec.iter().find(|(_, c)| *c > 0.0).unwrap();
        Some(Box::new(move |s: f64| 0.5 * c0 * (-l0 * s).exp()))
    } else {
        None
    };
    let bound = |s: f64| {
        let d = f.derivative_bound(s);
        if d == 0.0 {
            return 0.0;
        }
        let m = match &lower {
            Some(lo) => lo(s),
            None => a0 + f.tail_bound(s),
        };
        let w = if weight.grows() { weight.at(s).abs() } else { 1.0 };
        p * p * m.powf(p - 2.0) * d * d * w
    };
    let h = 0.25;
    for _ in 0..40_000 {
        let mut tail = 0.0;
        for k in 0..100_000 {
            let term = h * bound(sigma + k as f64 * h);
            tail += term;
            if (term < 1e-20 && k >= 40) || tail >= TAIL_TOL {
                break;
            }
        }
        if tail < TAIL_TOL {
            return Ok(sigma);
        }
        sigma += h;
    }
    Err(LabError::InvalidParameter("integrand tail does not decay".into()))
}

/// `t`-averages of `|f'(sigma + it)|^2` over `[-T, T]` as `sum w_k exp(-sigma L_k)`.
fn spectral_pairs(f: &DirichletPolynomial, t: f64) -> Vec<(f64, f64)> {
    let d = f.derivative();
    let terms = d.terms();
    let mut out = Vec::with_capacity(terms.len() * (terms.len() + 1) / 2);
    for (i, m) in terms.iter().enumerate() {
        out.push((m.coeff.norm_sqr(), 2.0 * m.log_n()));
        for n in &terms[i + 1..] {
            let l = n.log_n() - m.log_n();
            let x = t * l;
            let w = 2.0 * (m.coeff * n.coeff.conj()).re * x.sin() / x;
            out.push((w, m.log_n() + n.log_n()));
        }
    }
    out
}

fn zeros_for_exclusion(f: &DirichletPolynomial, s_lo: f64, s_hi: f64, t: f64) -> Result<Vec<Zero>> {
    // enlarging the rectangle only adds disks outside the strip, so a boundary zero is
    // handled by growing it a little
    let mut last = None;
    for k in 0..6 {
        let g = 7e-4 * k as f64;
        let r = Rectangle::new(s_lo - 1e-3 - g, s_hi + g, -t - 1e-3 - g, t + 1e-3 + g)?;
        match isolate_zeros(f, &r, 1e-10) {
            Ok(z) => return z.into_complete(),
            Err(e @ LabError::BoundaryZeroSuspected { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Complement in `[-T, T]` of the chords cut by the excluded disks on the line `Re s = sigma`.
fn allowed_pieces(sigma: f64, t: f64, zeros: &[Zero], rho: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<(f64, f64)> = zeros
        .iter()
        .filter_map(|z| {
            let dx = sigma - z.location.re;
            (dx.abs() < rho).then(|| {
                let w = (rho * rho - dx * dx).sqrt();
                (z.location.im - w, z.location.im + w)
            })
        })
        .collect();
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut lo = -t;
    for (a, b) in cuts {
        if a > lo {
            out.push((lo, a.min(t)));
        }
        lo = lo.max(b);
        if lo >= t {
            break;
        }
    }
    if lo < t {
        out.push((lo, t));
    }
    out.retain(|(a, b)| b > a);
    out
}

/// Weighted area integral of `p^2 |f|^{p-2} |f'|^2` over `[sigma_min, sigma_max] x [-T, T]`,
/// divided by `2T`.
pub fn area_integral(f: &DirichletPolynomial, p: f64, spec: &AreaIntegralSpec) -> Result<AreaValue> {
    check_exponent(p)?;
    spec.validate()?;
    let smax = match spec.sigma_max {
        Some(s) => s,
        None => sigma_max(f, p, spec.weight, spec.sigma_min)?.max(spec.sigma_min + 1.0),
    };
    let method = match spec.method {
        AreaMethod::Auto | AreaMethod::ClosedForm if p == 2.0 => AreaMethod::Spectral,
        AreaMethod::Auto | AreaMethod::ClosedForm => AreaMethod::Quadrature,
        m => m,
    };
    let t = spec.t;
    let outer_opts = QuadOptions { abs_tol: 1e-11, panel: 0.5, max_depth: 30, log_singular: false };
    if method == AreaMethod::Spectral {
        if p != 2.0 {
            return Err(LabError::InvalidParameter("spectral area integral needs p = 2".into()));
        }
        let pairs = spectral_pairs(f, t);
        let r = integrate(
            |s| 4.0 * spec.weight.at(s) * pairs.iter().map(|(w, l)| w * (-s * l).exp()).sum::<f64>(),
            spec.sigma_min,
            smax,
            outer_opts,
        )?;
        return Ok(AreaValue { value: r.value, error: r.error + TAIL_TOL, excluded_mass: 0.0, sigma_max: smax, method });
    }

    let zeros = if p < 2.0 && spec.rho > 0.0 { zeros_for_exclusion(f, spec.sigma_min, smax, t)? } else { Vec::new() };
    let rho = spec.rho;
    let mut excluded_mass = 0.0;
    for z in &zeros {
        let (_, d) = f.eval_with_derivative(z.location);
        let w = spec.weight.at(z.location.re + rho).abs().max(spec.weight.at(z.location.re - rho).abs());
        excluded_mass += 2.0 * PI * p * powp(d.norm(), p) * rho.powf(p) * z.multiplicity as f64 * w / (2.0 * t);
    }
    let mut breaks: Vec<f64> = zeros.iter().flat_map(|z| [z.location.re - rho, z.location.re + rho]).collect();
    breaks.sort_by(f64::total_cmp);

    let mut failure: Option<LabError> = None;
    // panels of about a quarter of the shortest period among the frequencies log(n/m)
    let span = match (f.terms().first(), f.terms().last()) {
        (Some(a), Some(b)) => b.log_n() - a.log_n(),
        _ => 0.0,
    };
    let panel = if span > 0.0 { (0.5 * PI / span).max(0.25) } else { 2.0 * t };
    let inner_opts = QuadOptions { abs_tol: 2.0 * t * 1e-12, panel, max_depth: 30, log_singular: false };
    let inner = |sigma: f64, failure: &mut Option<LabError>| -> f64 {
        let pieces = allowed_pieces(sigma, t, &zeros, rho);
        let mut total = 0.0;
        for (a, b) in pieces {
            let opts = QuadOptions { abs_tol: inner_opts.abs_tol * (b - a) / (2.0 * t), ..inner_opts };
            let r = integrate(
                |y| {
                    let s = Complex64::new(sigma, y);
                    let (v, d) = f.eval_with_derivative(s);
                    match integrand_value(p, v.norm(), d.norm_sqr(), s) {
                        Ok(x) => x,
                        Err(e) => {
                            failure.get_or_insert(e);
                            0.0
                        }
                    }
                },
                a,
                b,
                opts,
            );
            match r {
                Ok(r) => total += r.value,
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        total / (2.0 * t)
    };
    let r = integrate_with_breaks(
        |s| spec.weight.at(s) * inner(s, &mut failure),
        spec.sigma_min,
        smax,
        &breaks,
        outer_opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(AreaValue {
        value: r.value,
        error: r.error + TAIL_TOL + excluded_mass,
        excluded_mass,
        sigma_max: smax,
        method,
    })
}

/// `-p |a|^p log n n^{-p kappa}` for `f = a n^{-s}`; `0` for constants; `None` otherwise.
fn hardy_stein_closed_form(f: &DirichletPolynomial, p: f64, kappa: f64) -> Option<f64> {
    match f.terms() {
        [] => Some(0.0),
        [t] if t.n == 1 => Some(0.0),
        [t] => Some(-p * powp(t.coeff.norm(), p) * t.log_n() * (-p * kappa * t.log_n()).exp()),
        _ => None,
    }
}

/// `-(p^2 / 2T) int_kappa^inf int_{-T}^{T} |f|^{p-2} |f'|^2 dt dsigma`.
pub fn hardy_stein_rhs(f: &DirichletPolynomial, p: f64, kappa: f64, t: f64, method: AreaMethod) -> Result<AreaValue> {
    check_exponent(p)?;
    if !(kappa > 0.0) {
        return Err(LabError::InvalidParameter(format!("kappa = {kappa} must be positive")));
    }
    if matches!(method, AreaMethod::Auto | AreaMethod::ClosedForm) {
        if let Some(v) = hardy_stein_closed_form(f, p, kappa) {
            return Ok(AreaValue {
                value: v,
                error: 0.0,
                excluded_mass: 0.0,
                sigma_max: f64::INFINITY,
                method: AreaMethod::ClosedForm,
            });
        }
        if method == AreaMethod::ClosedForm {
            return Err(LabError::InvalidParameter("closed form needs a single-term series".into()));
        }
    }
    let spec = AreaIntegralSpec { method, ..AreaIntegralSpec::new(kappa, t, Weight::None) };
    let a = area_integral(f, p, &spec)?;
    Ok(AreaValue { value: -a.value, ..a })
}

/// `d/dkappa` of the torus mean of `|f|^p` by the five-point stencil.
pub fn torus_mean_derivative(f: &DirichletPolynomial, p: f64, kappa: f64) -> Result<f64> {
    let h = FD_STEP;
    let m = |k: f64| torus_mean(f, k, p);
    Ok((-m(kappa + 2.0 * h)? + 8.0 * m(kappa + h)? - 8.0 * m(kappa - h)? + m(kappa - 2.0 * h)?) / (12.0 * h))
}

/// Hardy-Stein at each `kappa`: derivative of the torus mean against the area integral at the
/// largest `T`; the area integral at every `T` of the schedule goes into the trace.
pub fn hardy_stein_check(
    f: &DirichletPolynomial,
    p: f64,
    kappa_grid: &[f64],
    schedule: &MeanSchedule,
    method: AreaMethod,
) -> Result<Vec<CheckReport>> {
    check_exponent(p)?;
    schedule.validate()?;
    let tol = if p >= 2.0 { 1e-2 } else { 5e-2 };
    let mut out = Vec::with_capacity(kappa_grid.len());
    for &kappa in kappa_grid {
        if !(kappa > 2.0 * FD_STEP) {
            return Err(LabError::InvalidParameter(format!("kappa = {kappa} must be positive")));
        }
        let lhs = torus_mean_derivative(f, p, kappa)?;
        let mut trace = Vec::with_capacity(schedule.t_list.len());
        let mut last = None;
        for &t in &schedule.t_list {
            let v = hardy_stein_rhs(f, p, kappa, t, method)?;
            trace.push((t, v.value));
            last = Some(v);
        }
        let v = last.unwrap();
        let report = CheckReport::new("hardy-stein", lhs, v.value)
            .param("p", p)
            .param("kappa", kappa)
            .param("T", schedule.t_max())
            .param("method", serde_json::to_value(v.method).unwrap())
            .param("quadrature_error", v.error)
            .param("excluded_mass", v.excluded_mass)
            .with_trace(trace);
        let ok = report.rel_err <= tol;
        out.push(report.judge(tol, ok));
    }
    Ok(out)
}

/// Littlewood-Paley: `||f||_p^p` against `|f(+inf)|^p` plus the `(sigma - sigma0)`-weighted
/// area integral at the largest `T`, extrapolated in `sigma0` through [`LP_SIGMAS`].
pub fn littlewood_paley(f: &DirichletPolynomial, p: f64, schedule: &MeanSchedule, method: AreaMethod) -> Result<CheckReport> {
    check_exponent(p)?;
    schedule.validate()?;
    let lhs = powp(hp_norm(f, p, schedule)?.norm, p);
    let head = powp(f.coeff(1).norm(), p);
    let mut trace = Vec::with_capacity(LP_SIGMAS.len());
    let mut error: f64 = 0.0;
    for &s0 in &LP_SIGMAS {
        let spec = AreaIntegralSpec { method, ..AreaIntegralSpec::new(s0, schedule.t_max(), Weight::Offset(s0)) };
        let a = area_integral(f, p, &spec)?;
        error = error.max(a.error);
        trace.push((s0, head + a.value));
    }
    let rhs = extrapolate_to_zero(&trace);
    let report = CheckReport::new("lp", lhs, rhs)
        .param("p", p)
        .param("T", schedule.t_max())
        .param("weight", "sigma - sigma0")
        .param("quadrature_error", error)
        .with_trace(trace);
    let ok = report.rel_err <= 2e-2;
    Ok(report.judge(2e-2, ok))
}

/// Boundary-line Littlewood-Paley: `(1/2T) int |f(it)|^p dt` against `|f(+inf)|^p` plus the
/// `sigma`-weighted area integral, for each `T` of the schedule. Passes when the absolute
/// difference does not grow along the schedule and ends below `5e-2 max(lhs, 1)`.
pub fn boundary_lp_check(f: &DirichletPolynomial, p: f64, schedule: &MeanSchedule, method: AreaMethod) -> Result<CheckReport> {
    check_exponent(p)?;
    schedule.validate()?;
    let head = powp(f.coeff(1).norm(), p);
    let mut trace = Vec::with_capacity(schedule.t_list.len());
    let (mut lhs, mut rhs) = (0.0, 0.0);
    let mut error: f64 = 0.0;
    for &t in &schedule.t_list {
        lhs = window_mean(f, 0.0, t, p)?;
        let spec = AreaIntegralSpec { method, ..AreaIntegralSpec::new(0.0, t, Weight::Sigma) };
        let a = area_integral(f, p, &spec)?;
        error = error.max(a.error);
        rhs = head + a.value;
        trace.push((t, lhs - rhs));
    }
    let slack = 1e-9 + error;
    let shrinking = trace.windows(2).all(|w| w[1].1.abs() <= w[0].1.abs() + slack);
    let tol = 5e-2 * lhs.max(1.0);
    let last = trace.last().unwrap().1.abs();
    let report = CheckReport::new("lp-boundary", lhs, rhs)
        .param("p", p)
        .param("weight", "sigma")
        .param("shrinking", shrinking)
        .param("quadrature_error", error)
        .with_trace(trace);
    Ok(report.judge(tol, shrinking && last <= tol))
}

/// Littlewood-Paley on the torus: `||f||_p^p` against `|f(+inf)|^p` plus the Haar average over
/// characters of `p^2 int_0^inf |f_chi|^{p-2} |f_chi'|^2 sigma dsigma` along the real axis.
pub fn torus_lp(f: &DirichletPolynomial, p: f64, schedule: &MeanSchedule) -> Result<CheckReport> {
    check_exponent(p)?;
    let lhs = powp(hp_norm(f, p, schedule)?.norm, p);
    let head = powp(f.coeff(1).norm(), p);
    let tw = TwistedSeries::new(f)?;
    let smax = sigma_max(f, p, Weight::Sigma, 0.0)?.max(1.0);
    let opts = QuadOptions { abs_tol: 1e-11, panel: 0.25, max_depth: 30, log_singular: p < 2.0 };
    let failure: RefCell<Option<LabError>> = RefCell::new(None);
    let avg = tw.average(1e-8, 0.0, |b| {
        let r = integrate(
            |s| {
                let (v, d) = tw.eval_line(b, s);
                match integrand_value(p, v.norm(), d.norm_sqr(), Complex64::new(s, 0.0)) {
                    Ok(x) => x * s,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            smax,
            opts,
        );
        match r {
            Ok(r) => r.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    })?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let rhs = head + avg;
    let report = CheckReport::new("lp-torus", lhs, rhs).param("p", p).param("sigma_max", smax);
    let ok = report.rel_err <= 2e-2;
    Ok(report.judge(2e-2, ok))
}
