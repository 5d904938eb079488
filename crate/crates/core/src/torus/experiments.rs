//! Finite-window demonstrations built on [`ss_outer_construct`]: a gap between line means and
//! torus means, and alternating window means of `log|f_xi|`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{parallelogram_cover, ss_outer_construct, visit_fraction, SsConstruction, SsOptions, TorusSet};
use crate::error::{LabError, Result};
use crate::mean::window_mean_panels;
use crate::report::CheckReport;
use crate::series::{frostman_shift_eval, Analytic, GeneralizedSeries};
use crate::quad::{integrate, QuadOptions};
use crate::zeros::nfswap_residual;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapSpec {
    pub delta: f64,
    pub degree: u32,
    pub p: f64,
    pub t_list: Vec<f64>,
    pub gap: f64,
    pub xi_count: usize,
    #[serde(default)]
    pub ss: SsOptions,
}

impl Default for GapSpec {
    fn default() -> Self {
        Self { delta: 0.5, degree: 48, p: 2.0, t_list: vec![2.5, 5.0, 7.5, 10.0], gap: 0.2, xi_count: 3, ss: SsOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiTrace {
    pub xi: [f64; 2],
    /// `(T, value)`.
    pub trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NfTrace {
    pub xi: [f64; 2],
    /// `(T, N_f(xi, T))` from isolated `xi`-points.
    pub counted: Vec<(f64, f64)>,
    /// `(T, boundary prediction)`, see [`crate::zeros::nf_boundary_term`].
    pub predicted: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapOutcome {
    pub report: CheckReport,
    pub construction: SsConstruction,
    pub nf_traces: Vec<NfTrace>,
}

fn line_panel(f: &GeneralizedSeries) -> f64 {
    let top = f.spectrum().iter().fold(0.0f64, |m, (l, _)| m.max(*l));
    if top > 0.0 {
        (1.0 / top).min(0.25)
    } else {
        0.25
    }
}

/// Fraction of `(-T, T)` during which the flow point sits in the mollification margin.
fn margin_time(c: &SsConstruction, t: f64) -> f64 {
    let n = (t * 200.0).ceil() as usize;
    let hits = (0..n)
        .filter(|i| {
            let tau = -t + 2.0 * t * (*i as f64 + 0.5) / n as f64;
            c.in_margin(super::kronecker_point(tau))
        })
        .count();
    hits as f64 / n as f64
}

/// Compares the line mean `(1/2T) int |f(i tau)|^p` with the torus mean of `|F|^p`.
/// Passes iff the line mean at the largest `T` exceeds the torus mean by at least `spec.gap`.
pub fn gap_experiment<R: Rng>(u: &TorusSet, spec: &GapSpec, rng: &mut R) -> Result<GapOutcome> {
    if spec.t_list.is_empty() || spec.t_list.iter().any(|t| !(*t > 0.0)) {
        return Err(LabError::InvalidParameter("gap schedule needs positive T values".into()));
    }
    if !(spec.p >= 1.0) {
        return Err(LabError::InvalidExponent(spec.p));
    }
    let c = ss_outer_construct(u, spec.delta, spec.degree, spec.ss)?;
    let t_max = spec.t_list.iter().cloned().fold(0.0, f64::max);
    let exit = u.exit_time(t_max)?;
    let mut notes = Vec::new();
    let mut t_list = spec.t_list.clone();
    if exit < t_max * (1.0 - 1e-6) {
        if exit > 0.0 {
            let k = exit / t_max;
            t_list.iter_mut().for_each(|t| *t *= k);
            notes.push(format!("{}; schedule rescaled by {k:.6}", LabError::InsufficientCover(exit)));
        } else {
            notes.push("flow starts outside U; schedule kept".to_string());
        }
    }
    let f = &c.series;
    let panel = line_panel(f);
    let mut trace = Vec::with_capacity(t_list.len());
    for &t in &t_list {
        trace.push((t, window_mean_panels(f, 0.0, t, spec.p, panel)?));
    }
    let line = trace.last().unwrap().1;
    let torus = c.torus_mean(spec.p);

    let mut nf_traces = Vec::with_capacity(spec.xi_count);
    let finf = f.value_at_infinity();
    while nf_traces.len() < spec.xi_count {
        let r = rng.gen_range(0.1..0.9f64);
        let xi = Complex64::from_polar(r, rng.gen_range(0.0..TAU));
        if (xi - finf).norm() < 1e-3 {
            continue;
        }
        let mut tr = NfTrace { xi: [xi.re, xi.im], counted: Vec::new(), predicted: Vec::new() };
        for &t in &t_list {
            let r = nfswap_residual(f, xi, t, rng)?;
            tr.counted.push((r.t, r.counted));
            tr.predicted.push((r.t, r.predicted));
        }
        nf_traces.push(tr);
    }

    let t_end = *t_list.last().unwrap();
    let mut report = CheckReport::new("gap", line, torus)
        .param("delta", spec.delta)
        .param("degree", spec.degree)
        .param("p", spec.p)
        .param("e_inf", c.e_inf)
        .param("e2", c.e2)
        .param("measure_u", u.measure())
        .param("cover_exit", exit)
        .param("margin_time_fraction", margin_time(&c, t_end))
        .param("gap", line - torus)
        .with_trace(trace)
        .judge(spec.gap, line - torus >= spec.gap);
    for n in notes {
        report = report.note(n);
    }
    Ok(GapOutcome { report, construction: c, nf_traces })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscillationSpec {
    /// Modulus `epsilon / 2` is used off the odd stages.
    pub epsilon: f64,
    /// Assumed bound on the time fraction a window spends in the previous stage.
    pub delta_prime: f64,
    pub n_schedule: Vec<f64>,
    /// One width for all stages, or one per stage.
    pub widths: Vec<f64>,
    /// Covers are built for `|tau| < cover_extension * n_k`.
    pub cover_extension: f64,
    pub degree: u32,
    pub xi_modulus: f64,
    pub phases: usize,
    #[serde(default)]
    pub ss: SsOptions,
}

impl Default for OscillationSpec {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            delta_prime: 0.01,
            n_schedule: vec![1.0, 6.0, 36.0],
            widths: vec![0.3],
            cover_extension: 1.25,
            degree: 48,
            xi_modulus: 0.7,
            phases: 8,
            ss: SsOptions::default(),
        }
    }
}

impl OscillationSpec {
    /// `(c, C)` with `c = (2/eps)^2 - 1` and `C = (2 - eps)/(2 + eps)`.
    pub fn constants(&self) -> (f64, f64) {
        let e = self.epsilon;
        ((2.0 / e).powi(2) - 1.0, (2.0 - e) / (2.0 + e))
    }

    pub fn predicted_spread(&self) -> f64 {
        if self.n_schedule.len() < 2 {
            return 0.0;
        }
        let (c, big_c) = self.constants();
        let d = self.delta_prime;
        ((1.0 - d) * big_c - d * c) * (1.0 - self.xi_modulus.powi(2)) / 2.0
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(LabError::InvalidParameter(m.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if !(self.xi_modulus > self.epsilon && self.xi_modulus < 1.0) {
            return bad("xi modulus must lie in (epsilon, 1)");
        }
        if !(0.0..1.0).contains(&self.delta_prime) {
            return bad("delta_prime must lie in [0, 1)");
        }
        if self.n_schedule.is_empty() || self.n_schedule[0] <= 0.0 {
            return bad("n schedule must be nonempty and positive");
        }
        if self.n_schedule.windows(2).any(|w| w[1] < 2.0 * w[0]) {
            return bad("n schedule must satisfy n_{k+1} >= 2 n_k");
        }
        if !(self.widths.len() == 1 || self.widths.len() == self.n_schedule.len()) {
            return bad("widths must have one entry or one per stage");
        }
        if self.widths.iter().any(|w| !(*w > 0.0)) || !(self.cover_extension >= 1.0) {
            return bad("widths must be positive and the cover extension at least 1");
        }
        if self.phases == 0 {
            return bad("need at least one xi phase");
        }
        Ok(())
    }

    fn width(&self, k: usize) -> f64 {
        self.widths[k.min(self.widths.len() - 1)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub report: CheckReport,
    pub c: f64,
    pub big_c: f64,
    pub predicted_spread: f64,
    /// Smallest `|m_{k+1} - m_k|` over all sampled `xi`.
    pub min_spread: f64,
    /// Window means `(n_k, m_k)` of `log|f_xi(i tau)|` per sampled `xi`.
    pub means: Vec<XiTrace>,
    /// Time fraction of the window `n_{k+1}` spent in the stage-`k` cover.
    pub measured_delta_prime: Vec<f64>,
    pub e_inf: f64,
    pub measure_u: f64,
}

fn log_window_mean(f: &GeneralizedSeries, xi: Complex64, t: f64, panel: f64) -> Result<f64> {
    let mut failure = None;
    let r = integrate(
        |tau| match frostman_shift_eval(f, xi, Complex64::new(0.0, tau)) {
            Ok(v) => v.norm().ln(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        -t,
        t,
        QuadOptions::log_integrand(2.0 * t * 1e-7, panel),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.value / (2.0 * t)),
    }
}

/// Alternating-stage construction: `U` is the union of `V_{k+1} \ V_k` over odd stages `k`,
/// where `V_k` covers the flow for `|tau| < n_k`. Window means of `log|f_xi|` over `[-n_k, n_k]`
/// should alternate, with consecutive differences at least the predicted spread.
pub fn oscillation_experiment<R: Rng>(spec: &OscillationSpec, rng: &mut R) -> Result<OscillationReport> {
    spec.validate()?;
    let k = spec.n_schedule.len();
    let covers: Vec<TorusSet> = (0..k)
        .map(|i| parallelogram_cover(spec.cover_extension * spec.n_schedule[i], spec.width(i), rng).map(|c| c.set))
        .collect::<Result<_>>()?;
    let mut u = TorusSet::empty();
    for i in (0..k.saturating_sub(1)).step_by(2) {
        u = u.union(&covers[i + 1].difference(&covers[i]));
    }
    if u.feature_width.is_none() {
        u.feature_width = covers.iter().filter_map(|c| c.feature_width).reduce(f64::min);
    }
    let c = ss_outer_construct(&u, spec.epsilon / 2.0, spec.degree, spec.ss)?;
    let f = &c.series;
    let panel = line_panel(f);

    let xis: Vec<Complex64> = (0..spec.phases)
        .map(|j| Complex64::from_polar(spec.xi_modulus, TAU * j as f64 / spec.phases as f64))
        .collect();
    let results: Vec<Result<XiTrace>> = std::thread::scope(|s| {
        let handles: Vec<_> = xis
            .iter()
            .map(|&xi| {
                s.spawn(move || {
                    let mut trace = Vec::with_capacity(k);
                    for &n in &spec.n_schedule {
                        trace.push((n, log_window_mean(f, xi, n, panel)?));
                    }
                    Ok(XiTrace { xi: [xi.re, xi.im], trace })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("window worker panicked")).collect()
    });
    let means: Vec<XiTrace> = results.into_iter().collect::<Result<_>>()?;

    let predicted = spec.predicted_spread();
    let mut min_spread = f64::INFINITY;
    let mut alternates = true;
    for m in &means {
        let diffs: Vec<f64> = m.trace.windows(2).map(|w| w[1].1 - w[0].1).collect();
        for (i, d) in diffs.iter().enumerate() {
            min_spread = min_spread.min(d.abs());
            // stage 1 is low, stage 2 is high, and so on
            let want_up = i % 2 == 0;
            if (*d > 0.0) != want_up {
                alternates = false;
            }
        }
    }
    if k < 2 {
        min_spread = 0.0;
    }
    let measured_delta_prime = (0..k.saturating_sub(1))
        .map(|i| visit_fraction(&covers[i], spec.n_schedule[i + 1]).map(|v| v.fraction))
        .collect::<Result<Vec<_>>>()?;
    let (cc, big_c) = spec.constants();
    let ok = k < 2 || (alternates && min_spread >= predicted);
    let report = CheckReport::new("oscillation", min_spread, predicted)
        .param("epsilon", spec.epsilon)
        .param("delta_prime", spec.delta_prime)
        .param("xi_modulus", spec.xi_modulus)
        .param("alternates", alternates)
        .param("e_inf", c.e_inf)
        .param("c", cc)
        .param("C", big_c)
        .judge(predicted, ok);
    let report = if k < 2 { report.note("single window: nothing to compare") } else { report };
    Ok(OscillationReport {
        report,
        c: cc,
        big_c,
        predicted_spread: predicted,
        min_spread,
        means,
        measured_delta_prime,
        e_inf: c.e_inf,
        measure_u: u.measure(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::parallelogram_cover;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constants_for_half() {
        let s = OscillationSpec::default();
        let (c, big_c) = s.constants();
        assert!((c - 15.0).abs() < 1e-12);
        assert!((big_c - 0.6).abs() < 1e-12);
        let want = (0.99 * 0.6 - 0.01 * 15.0) * (1.0 - 0.49) / 2.0;
        assert!((s.predicted_spread() - want).abs() < 1e-12);
        assert!((s.predicted_spread() - 0.1132).abs() < 1e-4);
    }

    #[test]
    fn single_window_is_vacuous() {
        let spec = OscillationSpec { n_schedule: vec![2.0], phases: 2, degree: 16, ss: SsOptions { log2_grid: 7, ..SsOptions::default() }, ..OscillationSpec::default() };
        let r = oscillation_experiment(&spec, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(r.report.passed());
        assert_eq!(r.min_spread, 0.0);
        assert_eq!(r.predicted_spread, 0.0);
    }

    #[test]
    fn schedule_must_double() {
        let spec = OscillationSpec { n_schedule: vec![1.0, 1.5], ..OscillationSpec::default() };
        assert!(oscillation_experiment(&spec, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn gap_degenerate_controls() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let spec = GapSpec { degree: 16, t_list: vec![5.0, 10.0], ss: SsOptions { log2_grid: 7, ..SsOptions::default() }, ..GapSpec::default() };
        let full = gap_experiment(&TorusSet::full(), &spec, &mut rng).unwrap();
        let e = full.construction.e_inf;
        assert!((full.report.lhs - full.report.rhs).abs() <= 2.0 * e + 1e-12);
        assert!(!full.report.passed());
        let empty = gap_experiment(&TorusSet::empty(), &spec, &mut rng).unwrap();
        assert!((empty.report.lhs - 0.25).abs() < 1e-9);
        assert!((empty.report.rhs - 0.25).abs() < 1e-9);
        assert_eq!(empty.nf_traces.len(), 3);
    }

    #[test]
    fn gap_on_cover() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cover = parallelogram_cover(10.0, 0.3, &mut rng).unwrap();
        assert!(cover.set.measure() <= 0.1);
        let out = gap_experiment(&cover.set, &GapSpec::default(), &mut rng).unwrap();
        let c = &out.construction;
        let r = &out.report;
        assert!(r.lhs >= 0.9 * (1.0 - c.e_inf).powi(2), "line {}", r.lhs);
        assert!(r.rhs <= 0.1 + 0.25 + c.e2, "torus {}", r.rhs);
        assert!(r.passed(), "{r:?}");
    }
}
