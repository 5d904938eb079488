use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{arg_change, isolate_zeros, winding_number, Rectangle, ZeroList};
use crate::error::{LabError, Result};
use crate::mean::{jessen_function, JessenMode, MeanSchedule};
use crate::quad::{integrate, linear_intercept, QuadOptions};
use crate::report::CheckReport;
use crate::series::{dominance_abscissa, frostman_shift_eval, Analytic, DirichletPolynomial, Shifted};

/// Offsets `sigma0` for the mean counting function, before extrapolating to zero.
pub const MEAN_SIGMAS: [f64; 3] = [0.1, 0.05, 0.025];
const ISOLATION_TOL: f64 = 1e-10;
const LEFT_MARGIN: f64 = 1e-6;
const JITTER: f64 = 1e-3;
const RETRIES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LittlewoodSum {
    /// `2 pi sum (Re s - sigma0)` over isolated zeros.
    pub zero_side: f64,
    /// The same quantity from the four boundary integrals.
    pub boundary_side: f64,
    pub residual: f64,
}

fn line_integral<G: FnMut(f64) -> f64>(g: G, a: f64, b: f64) -> Result<f64> {
    let opts = QuadOptions { abs_tol: 1e-11 * (1.0 + (b - a)), panel: 0.5, max_depth: 30, log_singular: false };
    Ok(integrate(g, a, b, opts)?.value)
}

/// Both sides of Littlewood's rectangle formula with weight `Re s - sigma0`.
///
/// The horizontal `arg` integrals are integrated by parts against the right edge, so only
/// `Im f'/f` and the argument increment up the right edge are needed.
pub fn littlewood_sum<F: Analytic + ?Sized>(f: &F, r: &Rectangle, sigma0: f64) -> Result<LittlewoodSum> {
    let zeros = isolate_zeros(f, r, ISOLATION_TOL)?.into_complete()?;
    let zero_side = 2.0 * PI * zeros.iter().map(|z| z.multiplicity as f64 * (z.location.re - sigma0)).sum::<f64>();

    let (sl, sr) = (r.sigma0, r.sigma1);
    let log_abs = |sigma: f64| line_integral(|t| f.eval(Complex64::new(sigma, t)).norm().ln(), r.t0, r.t1);
    let weighted_log_deriv = |t: f64| {
        line_integral(
            |x| {
                let (v, d) = f.eval_with_derivative(Complex64::new(x, t));
                (d / v).im * (x - sl)
            },
            sl,
            sr,
        )
    };
    let rise = arg_change(f, Complex64::new(sr, r.t0), Complex64::new(sr, r.t1))?;
    let mut boundary_side = log_abs(sl)? - log_abs(sr)? + (sr - sl) * rise - weighted_log_deriv(r.t1)?
        + weighted_log_deriv(r.t0)?;
    // shift the weight from the left edge to sigma0
    if sl != sigma0 {
        boundary_side += 2.0 * PI * (sl - sigma0) * winding_number(f, r)? as f64;
    }
    Ok(LittlewoodSum { zero_side, boundary_side, residual: zero_side - boundary_side })
}

fn check_xi<F: Analytic + ?Sized>(f: &F, xi: Complex64) -> Result<()> {
    if !(xi.norm() < 1.0) {
        return Err(LabError::InvalidParameter(format!("|xi| = {} must be < 1", xi.norm())));
    }
    if (xi - f.value_at_infinity()).norm() < 1e-14 {
        return Err(LabError::InvalidParameter("xi equals f(+inf)".into()));
    }
    Ok(())
}

/// Zeros of `g` in `[sigma_lo, gamma] x [-t, t]`, where `gamma` is the dominance abscissa of `g`.
/// On a suspected boundary zero, `t` and `sigma_lo` are jittered and the isolation retried.
/// Returns the zeros, `gamma` and the height actually used.
fn isolate_strip<G: Analytic + ?Sized, R: Rng>(
    g: &G,
    t: f64,
    sigma_lo: f64,
    rng: &mut R,
) -> Result<(ZeroList, f64, f64)> {
    let gamma = dominance_abscissa(&g.spectrum())
        .ok_or_else(|| LabError::InvalidParameter("function has no dominant term".into()))?;
    if gamma <= sigma_lo {
        return Ok((ZeroList { zeros: Vec::new(), complete: true }, gamma, t));
    }
    let (mut t_used, mut lo) = (t, sigma_lo);
    let mut attempt = 0;
    loop {
        let r = Rectangle::new(lo, gamma, -t_used, t_used)?;
        match isolate_zeros(g, &r, ISOLATION_TOL) {
            Ok(z) => return Ok((z, gamma, t_used)),
            Err(LabError::BoundaryZeroSuspected { .. }) if attempt < RETRIES => {
                attempt += 1;
                t_used = t + rng.gen_range(-JITTER..JITTER);
                lo = (sigma_lo - rng.gen_range(0.0..JITTER).min(0.5 * sigma_lo)).max(0.0);
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub value: f64,
    /// Height used after any jitter.
    pub t: f64,
    pub gamma: f64,
    pub zeros: ZeroList,
}

/// `N_f(xi, T) = (pi/T) sum Re s` over solutions of `f(s) = xi` with `|Im s| < T`, `Re s > 0`.
pub fn counting_nf<F: Analytic + ?Sized, R: Rng>(f: &F, xi: Complex64, t: f64, rng: &mut R) -> Result<CountResult> {
    check_xi(f, xi)?;
    if !(t > 0.0) {
        return Err(LabError::InvalidParameter(format!("T = {t} must be positive")));
    }
    let g = Shifted { f, xi };
    let (zeros, gamma, t_used) = isolate_strip(&g, t, LEFT_MARGIN, rng)?;
    let value = PI / t_used * zeros.weighted_sum(0.0, t_used);
    Ok(CountResult { value, t: t_used, gamma, zeros })
}

/// Boundary prediction for `N_f(xi, T)`: `(1/2T) int log|f_xi(i tau)| d tau` plus
/// `log |(1 - conj(xi) f(+inf)) / (xi - f(+inf))|`. For `f` mapping the half-plane into the disc the
/// difference from `N_f(xi, T)` tends to zero for quasi-every `xi`.
pub fn nf_boundary_term<F: Analytic + ?Sized>(f: &F, xi: Complex64, t: f64) -> Result<f64> {
    check_xi(f, xi)?;
    if !(t > 0.0) {
        return Err(LabError::InvalidParameter(format!("T = {t} must be positive")));
    }
    let top = f.spectrum().iter().fold(0.0f64, |m, (l, _)| m.max(*l));
    let panel = if top > 0.0 { (0.5 / top).min(0.25) } else { 0.25 };
    let opts = QuadOptions::log_integrand(2.0 * t * 1e-9, panel);
    let mut failure = None;
    let integral = integrate(
        |tau| match frostman_shift_eval(f, xi, Complex64::new(0.0, tau)) {
            Ok(v) => v.norm().ln(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        -t,
        t,
        opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let finf = f.value_at_infinity();
    Ok(integral.value / (2.0 * t) + ((Complex64::new(1.0, 0.0) - xi.conj() * finf) / (xi - finf)).norm().ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NfswapResidual {
    pub counted: f64,
    pub predicted: f64,
    pub residual: f64,
    pub t: f64,
}

/// `N_f(xi, T)` from isolated `xi`-points against its boundary prediction [`nf_boundary_term`].
pub fn nfswap_residual<F: Analytic + ?Sized, R: Rng>(f: &F, xi: Complex64, t: f64, rng: &mut R) -> Result<NfswapResidual> {
    let count = counting_nf(f, xi, t, rng)?;
    let predicted = nf_boundary_term(f, xi, count.t)?;
    Ok(NfswapResidual { counted: count.value, predicted, residual: count.value - predicted, t: count.t })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCounting {
    pub value: f64,
    /// `(sigma0, value at the largest T, stabilized within eps_stab)`.
    pub per_sigma: Vec<(f64, f64, bool)>,
    /// `(sigma0, T, value)` for every pair.
    pub trace: Vec<(f64, f64, f64)>,
    pub gamma: f64,
}

fn schedule_heights(schedule: &MeanSchedule, t_used: f64) -> Vec<f64> {
    let mut ts = schedule.t_list.clone();
    *ts.last_mut().unwrap() = t_used;
    ts
}

/// Mean counting function: `T -> inf` at each `sigma0` in [`MEAN_SIGMAS`], then a least-squares
/// line in `sigma0` evaluated at zero.
pub fn mean_counting<F: Analytic + ?Sized, R: Rng>(
    f: &F,
    xi: Complex64,
    schedule: &MeanSchedule,
    rng: &mut R,
) -> Result<MeanCounting> {
    check_xi(f, xi)?;
    schedule.validate()?;
    let g = Shifted { f, xi };
    let lowest = MEAN_SIGMAS.iter().cloned().fold(f64::INFINITY, f64::min);
    let (zeros, gamma, t_used) = isolate_strip(&g, schedule.t_max(), 0.8 * lowest, rng)?;
    let ts = schedule_heights(schedule, t_used);
    let mut trace = Vec::new();
    let mut per_sigma = Vec::new();
    for &s0 in &MEAN_SIGMAS {
        let vals: Vec<f64> = ts.iter().map(|&t| PI / t * zeros.weighted_sum(s0, t)).collect();
        for (t, v) in ts.iter().zip(&vals) {
            trace.push((s0, *t, *v));
        }
        let n = vals.len();
        per_sigma.push((s0, vals[n - 1], (vals[n - 1] - vals[n - 2]).abs() <= schedule.eps_stab));
    }
    let pts: Vec<(f64, f64)> = per_sigma.iter().map(|&(s, v, _)| (s, v)).collect();
    Ok(MeanCounting { value: linear_intercept(&pts), per_sigma, trace, gamma })
}

/// Jensen's formula: `(pi/T) sum (Re s - sigma0)` over zeros of `f` against
/// `J_f(sigma0) - log |f(+inf)|`.
pub fn jensen_check<R: Rng>(
    f: &DirichletPolynomial,
    sigma0: f64,
    schedule: &MeanSchedule,
    rng: &mut R,
) -> Result<CheckReport> {
    schedule.validate()?;
    let a1 = f.coeff(1);
    if a1 == Complex64::default() {
        return Err(LabError::InvalidParameter("f(+inf) must be nonzero".into()));
    }
    if !(sigma0 > 0.0) {
        return Err(LabError::InvalidParameter(format!("sigma0 = {sigma0} must be positive")));
    }
    let (zeros, gamma, t_used) = isolate_strip(f, schedule.t_max(), sigma0, rng)?;
    let ts = schedule_heights(schedule, t_used);
    let trace: Vec<(f64, f64)> = ts.iter().map(|&t| (t, PI / t * zeros.weighted_sum(sigma0, t))).collect();
    let lhs = trace.last().unwrap().1;
    let rhs = jessen_function(f, sigma0, JessenMode::Torus)? - a1.norm().ln();
    let tol = 5e-2 * rhs.abs().max(1.0);
    let report = CheckReport::new("jensen", lhs, rhs)
        .param("sigma0", sigma0)
        .param("gamma", gamma)
        .param("T", t_used)
        .with_trace(trace);
    let ok = report.abs_err <= tol;
    Ok(report.judge(tol, ok))
}

/// `max_T N_f(xi, T)` over the schedule against `log |(1 - conj(xi) a) / (xi - a)|`, with slack
/// `pi gamma / T_min`.
pub fn limsup_bound_check<F: Analytic + ?Sized, R: Rng>(
    f: &F,
    xi: Complex64,
    schedule: &MeanSchedule,
    rng: &mut R,
) -> Result<CheckReport> {
    check_xi(f, xi)?;
    schedule.validate()?;
    let g = Shifted { f, xi };
    let (zeros, gamma, t_used) = isolate_strip(&g, schedule.t_max(), LEFT_MARGIN, rng)?;
    let ts = schedule_heights(schedule, t_used);
    let trace: Vec<(f64, f64)> = ts.iter().map(|&t| (t, PI / t * zeros.weighted_sum(0.0, t))).collect();
    let lhs = trace.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let a = f.value_at_infinity();
    let bound = ((1.0 - xi.conj() * a) / (xi - a)).norm().ln();
    let slack = PI * gamma / schedule.t_min();
    let report = CheckReport::new("limsup", lhs, bound)
        .param("xi_re", xi.re)
        .param("xi_im", xi.im)
        .param("gamma", gamma)
        .param("slack", slack)
        .with_trace(trace);
    Ok(report.judge(slack, lhs <= bound + slack))
}

const BLASCHKE_WINDOWS: usize = 10;
const WINDOW_RANGE: f64 = 100.0;
const SAMPLES_PER_UNIT: usize = 10_000;

/// Local Blaschke condition: on unit-height windows, `sum Re s` over zeros in `0 < Re s < gamma`
/// and `int |log |f(it)|| dt` are bounded in terms of `gamma`, `c <= min |f(gamma + i tau)|` and
/// the coefficient-sum bound for `sup |f|`.
pub fn blaschke_condition_check<F: Analytic + ?Sized, R: Rng>(
    f: &F,
    gamma: f64,
    c: f64,
    rng: &mut R,
) -> Result<CheckReport> {
    if !(gamma > 0.0) || !(c > 0.0) {
        return Err(LabError::InvalidParameter("gamma and c must be positive".into()));
    }
    let n = (2.0 * WINDOW_RANGE + 1.0) as usize * SAMPLES_PER_UNIT;
    let h = 1.0 / SAMPLES_PER_UNIT as f64;
    let sampled_min = (0..=n)
        .map(|k| f.eval(Complex64::new(gamma, -WINDOW_RANGE + k as f64 * h)).norm())
        .fold(f64::INFINITY, f64::min);
    if sampled_min < c * (1.0 - 1e-12) {
        return Err(LabError::HypothesisFailed(format!(
            "min |f(gamma + i tau)| = {sampled_min} is below c = {c}"
        )));
    }
    let norm = f.sup_bound();
    let factor = (4.0 * gamma * gamma + 1.0) / (2.0 * gamma);
    let bloc_bound = factor * (norm / c).ln();
    let logloc_bound = norm.ln().abs() + 0.5 * PI * factor * (norm / c).ln();

    let mut trace = Vec::with_capacity(BLASCHKE_WINDOWS);
    let mut logloc_max = 0.0f64;
    for _ in 0..BLASCHKE_WINDOWS {
        let tau = rng.gen_range(-WINDOW_RANGE..WINDOW_RANGE);
        let mut lo = tau;
        let mut attempt = 0;
        let zeros = loop {
            let r = Rectangle::new(LEFT_MARGIN, gamma, lo, lo + 1.0)?;
            match isolate_zeros(f, &r, ISOLATION_TOL) {
                Ok(z) => break z,
                Err(LabError::BoundaryZeroSuspected { .. }) if attempt < RETRIES => {
                    attempt += 1;
                    lo = tau + rng.gen_range(-JITTER..JITTER);
                }
                Err(e) => return Err(e),
            }
        };
        let mass: f64 = zeros
            .zeros
            .iter()
            .filter(|z| z.location.re > 0.0 && z.location.re < gamma)
            .map(|z| z.multiplicity as f64 * z.location.re)
            .sum();
        trace.push((tau, mass));
        let logloc = integrate(
            |t| f.eval(Complex64::new(0.0, t)).norm().max(1e-300).ln().abs(),
            tau,
            tau + 1.0,
            QuadOptions::log_integrand(1e-9, 0.125),
        )?
        .value;
        logloc_max = logloc_max.max(logloc);
    }
    let lhs = trace.iter().map(|p| p.1).fold(0.0, f64::max);
    let report = CheckReport::new("blaschke-local", lhs, bloc_bound)
        .param("gamma", gamma)
        .param("c", c)
        .param("sup_bound", norm)
        .param("sampled_min", sampled_min)
        .param("logloc_lhs", logloc_max)
        .param("logloc_rhs", logloc_bound)
        .with_trace(trace);
    Ok(report.judge(0.0, lhs <= bloc_bound && logloc_max <= logloc_bound))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogXiBounds {
    pub lower: f64,
    /// `log |(xi - z) / (1 - conj(xi) z)|`.
    pub middle: f64,
    pub upper: f64,
}

impl LogXiBounds {
    pub fn holds(&self) -> bool {
        let slack = 1e-12 * (1.0 + self.middle.abs());
        self.lower <= self.middle + slack && self.middle <= self.upper + slack
    }
}

/// Two-sided bound for the log of the pseudo-hyperbolic distance between `z` and `xi`.
pub fn logxi_bounds(z: Complex64, xi: Complex64) -> Result<LogXiBounds> {
    if !(z.norm() < 1.0 && xi.norm() < 1.0) {
        return Err(LabError::InvalidParameter("z and xi must lie in the unit disc".into()));
    }
    if z == xi {
        return Err(LabError::InvalidParameter("z and xi must be distinct".into()));
    }
    let num = 0.5 * (1.0 - xi.norm_sqr()) * (1.0 - z.norm_sqr());
    let den = 1.0 - xi.conj() * z;
    Ok(LogXiBounds {
        lower: -num / (xi - z).norm_sqr(),
        middle: ((xi - z) / den).norm().ln(),
        upper: -num / den.norm_sqr(),
    })
}

/// Smallest `|f|` over a grid in `strip` at distance at least `delta` from every isolated zero.
/// `+inf` if no grid point qualifies.
pub fn min_modulus_diagnostic<F: Analytic + ?Sized>(f: &F, strip: &Rectangle, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(LabError::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    let zeros = isolate_zeros(f, strip, ISOLATION_TOL)?;
    let mut h = (0.5 * delta).min(0.05);
    while (strip.width() / h + 1.0) * (strip.height() / h + 1.0) > 4e6 {
        h *= 2.0;
    }
    let nx = (strip.width() / h).ceil() as usize;
    let ny = (strip.height() / h).ceil() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=nx {
        let x = strip.sigma0 + strip.width() * i as f64 / nx as f64;
        for j in 0..=ny {
            let s = Complex64::new(x, strip.t0 + strip.height() * j as f64 / ny as f64);
            if zeros.zeros.iter().any(|z| (z.location - s).norm() < delta + z.radius) {
                continue;
            }
            best = best.min(f.eval(s).norm());
        }
    }
    Ok(best)
}
