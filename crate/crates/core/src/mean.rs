//! Vertical window means, torus (Haar) means, Hardy norms and the Jessen function.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quad::{integrate, integrate_with_breaks, torus_average_stable, QuadOptions};
use crate::report::CheckReport;
use crate::series::{Analytic, DirichletPolynomial};

pub const MAX_TORUS_DIM: usize = 4;
pub const TORUS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeanSchedule {
    pub t_list: Vec<f64>,
    pub panels_per_unit: usize,
    pub eps_stab: f64,
}

impl Default for MeanSchedule {
    fn default() -> Self {
        Self { t_list: vec![50.0, 100.0, 200.0, 400.0], panels_per_unit: 4, eps_stab: 1e-3 }
    }
}

impl MeanSchedule {
    pub fn new(t_list: Vec<f64>, panels_per_unit: usize, eps_stab: f64) -> Result<Self> {
        let s = Self { t_list, panels_per_unit, eps_stab };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_list.len() < 2 {
            return Err(LabError::InvalidParameter("schedule needs at least two T values".into()));
        }
        if self.t_list.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(LabError::InvalidParameter("schedule T values must be positive".into()));
        }
        if self.t_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::InvalidParameter("schedule T values must be strictly increasing".into()));
        }
        if self.panels_per_unit < 4 {
            return Err(LabError::InvalidParameter("panel count per unit length must be >= 4".into()));
        }
        if !(self.eps_stab > 0.0) {
            return Err(LabError::InvalidParameter("eps_stab must be positive".into()));
        }
        Ok(())
    }

    pub fn t_max(&self) -> f64 {
        *self.t_list.last().unwrap()
    }

    pub fn t_min(&self) -> f64 {
        self.t_list[0]
    }

    pub fn panel(&self) -> f64 {
        1.0 / self.panels_per_unit as f64
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(LabError::InvalidExponent(p));
    }
    Ok(())
}

/// `(1/2T) int_{-T}^{T} g(t) dt`, with absolute error target `1e-10` on the average.
pub fn window_average<G: FnMut(f64) -> f64>(g: G, t: f64, panel: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(LabError::InvalidParameter(format!("window half-length must be positive, got {t}")));
    }
    let opts = QuadOptions { abs_tol: 2.0 * t * 1e-10, panel, ..QuadOptions::default() };
    Ok(integrate(g, -t, t, opts)?.value / (2.0 * t))
}

/// `(1/2T) int_{-T}^{T} |f(sigma + it)|^p dt`.
pub fn window_mean<F: Analytic + ?Sized>(f: &F, sigma: f64, t: f64, p: f64) -> Result<f64> {
    window_mean_panels(f, sigma, t, p, 0.25)
}

pub fn window_mean_panels<F: Analytic + ?Sized>(f: &F, sigma: f64, t: f64, p: f64, panel: f64) -> Result<f64> {
    check_exponent(p)?;
    window_average(|y| powp(f.eval(Complex64::new(sigma, y)).norm(), p), t, panel)
}

pub(crate) fn powp(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else {
        x.powf(p)
    }
}

/// Evaluates twists `f_chi(sigma) = sum a_n chi(n) n^{-sigma}` for characters given by angles at
/// the primes of `f`.
#[derive(Debug, Clone)]
pub struct TwistedSeries {
    primes: Vec<u64>,
    exps: Vec<Vec<u32>>,
    coeffs: Vec<Complex64>,
    logs: Vec<f64>,
}

impl TwistedSeries {
    pub fn new(f: &DirichletPolynomial) -> Result<Self> {
        let primes = f.primes();
        if primes.len() > MAX_TORUS_DIM {
            return Err(LabError::TooManyPrimes(primes.len()));
        }
        Ok(Self {
            exps: f.exponent_table(&primes),
            primes,
            coeffs: f.terms().iter().map(|t| t.coeff).collect(),
            logs: f.terms().iter().map(|t| t.log_n()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    /// Coefficients `a_n chi(n)` for the character with angles `theta` at `primes()`.
    pub fn twisted_coeffs(&self, theta: &[f64], out: &mut Vec<Complex64>) {
        out.clear();
        for (a, e) in self.coeffs.iter().zip(&self.exps) {
            let phase: f64 = e.iter().zip(theta).map(|(&k, th)| k as f64 * th).sum();
            out.push(a * Complex64::cis(phase));
        }
    }

    /// `(f_chi(sigma), f_chi'(sigma))` from twisted coefficients.
    pub fn eval_line(&self, b: &[Complex64], sigma: f64) -> (Complex64, Complex64) {
        let mut v = Complex64::default();
        let mut d = Complex64::default();
        for (c, &l) in b.iter().zip(&self.logs) {
            let e = c * (-sigma * l).exp();
            v += e;
            d -= e * l;
        }
        (v, d)
    }

    /// Haar mean of `log |f_chi(sigma)|`. The circle of the first prime is integrated exactly
    /// by Jensen's formula, which leaves a continuous integrand on the remaining torus.
    pub fn log_mean(&self, sigma: f64, tol: f64) -> Result<f64> {
        let d = self.dim();
        let scaled: Vec<Complex64> =
            self.coeffs.iter().zip(&self.logs).map(|(a, l)| a * (-sigma * l).exp()).collect();
        if d == 0 {
            let v: Complex64 = scaled.iter().sum();
            if v.norm() < 1e-300 {
                return Err(LabError::ZeroOnLine { re: sigma, im: 0.0 });
            }
            return Ok(v.norm().ln());
        }
        let deg = self.exps.iter().map(|e| e[0]).max().unwrap_or(0) as usize;
        let mut poly = vec![Complex64::default(); deg + 1];
        let mut degenerate = false;
        let build = |rest: &[f64], poly: &mut Vec<Complex64>| {
            poly.iter_mut().for_each(|c| *c = Complex64::default());
            for (a, e) in scaled.iter().zip(&self.exps) {
                let phase: f64 = e[1..].iter().zip(rest).map(|(&k, th)| k as f64 * th).sum();
                poly[e[0] as usize] += a * Complex64::cis(phase);
            }
        };
        let mut inner = |rest: &[f64]| {
            build(rest, &mut poly);
            crate::poly::circle_log_mean(&poly).unwrap_or_else(|| {
                degenerate = true;
                0.0
            })
        };
        // the inner mean has kinks where a root crosses the unit circle; with one remaining
        // angle they are located and used as breakpoints, more angles fall back to the tensor rule
        let value = if d == 2 {
            let mut scratch = vec![Complex64::default(); deg + 1];
            let kinks = crate::quad::locate_jumps(
                |th| {
                    build(&[th], &mut scratch);
                    crate::poly::roots_outside(&scratch)
                },
                0.0,
                TAU,
                2048,
            );
            let opts = QuadOptions { abs_tol: tol * TAU, panel: TAU / 32.0, max_depth: 30, log_singular: false };
            integrate_with_breaks(|th| inner(&[th]), 0.0, TAU, &kinks, opts)?.value / TAU
        } else {
            torus_average_stable(d - 1, tol, 0.0, inner)?.value
        };
        if degenerate {
            return Err(LabError::ZeroOnLine { re: sigma, im: f64::NAN });
        }
        Ok(value)
    }

    /// Haar average of `g(a_n chi(n))` over the torus of the primes of `f`.
    pub fn average<G: FnMut(&[Complex64]) -> f64>(&self, tol: f64, shift: f64, mut g: G) -> Result<f64> {
        let mut buf = Vec::with_capacity(self.coeffs.len());
        let avg = torus_average_stable(self.dim(), tol, shift, |theta| {
            self.twisted_coeffs(theta, &mut buf);
            g(&buf)
        })?;
        Ok(avg.value)
    }
}

/// Haar mean of `|f_chi(sigma)|^p` over the torus of the primes dividing the support of `f`.
pub fn torus_mean(f: &DirichletPolynomial, sigma: f64, p: f64) -> Result<f64> {
    torus_mean_tol(f, sigma, p, TORUS_TOL)
}

pub fn torus_mean_tol(f: &DirichletPolynomial, sigma: f64, p: f64, tol: f64) -> Result<f64> {
    check_exponent(p)?;
    let tw = TwistedSeries::new(f)?;
    tw.average(tol, 0.0, |b| powp(tw.eval_line(b, sigma).0.norm(), p))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HpNorm {
    pub norm: f64,
    /// `(sigma, M_p(f, sigma))` along the approach to the boundary; the last entry is `sigma = 0`.
    pub trace: Vec<(f64, f64)>,
}

/// Hardy `p`-norm from torus means on `sigma = 0.1, 0.05, ...` until successive values agree to
/// `eps_stab`, followed by the boundary value at `sigma = 0`.
pub fn hp_norm(f: &DirichletPolynomial, p: f64, schedule: &MeanSchedule) -> Result<HpNorm> {
    check_exponent(p)?;
    let mut trace = Vec::new();
    let mut sigma = 0.1;
    let mut prev: Option<f64> = None;
    for _ in 0..20 {
        let m = torus_mean(f, sigma, p)?.powf(1.0 / p);
        trace.push((sigma, m));
        if prev.is_some_and(|q| (q - m).abs() < schedule.eps_stab) {
            break;
        }
        prev = Some(m);
        sigma *= 0.5;
    }
    let norm = torus_mean(f, 0.0, p)?.powf(1.0 / p);
    trace.push((0.0, norm));
    Ok(HpNorm { norm, trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum JessenMode {
    Torus,
    Window { t: f64 },
}

/// Long-run mean of `log |f(sigma + it)|`.
pub fn jessen_function(f: &DirichletPolynomial, sigma: f64, mode: JessenMode) -> Result<f64> {
    if f.is_zero() {
        return Err(LabError::InvalidSeries("Jessen function of the zero series".into()));
    }
    match mode {
        JessenMode::Torus => TwistedSeries::new(f)?.log_mean(sigma, 1e-10),
        JessenMode::Window { t } => jessen_window(f, sigma, t),
    }
}

pub fn jessen_window<F: Analytic + ?Sized>(f: &F, sigma: f64, t: f64) -> Result<f64> {
    let mut hit: Option<f64> = None;
    let opts = QuadOptions::log_integrand(2.0 * t * 1e-9, 0.25);
    let v = integrate(
        |y| {
            let m = f.eval(Complex64::new(sigma, y)).norm();
            if m < 1e-300 {
                hit.get_or_insert(y);
                return 0.0;
            }
            m.ln()
        },
        -t,
        t,
        opts,
    )?;
    if let Some(im) = hit {
        return Err(LabError::ZeroOnLine { re: sigma, im });
    }
    Ok(v.value / (2.0 * t))
}

/// Compares the long-window mean with the torus mean. The allowed gap is `eps_stab + C/T` with
/// `C` the largest observed `|v_k - v_{k+1}| T_k` along the schedule.
pub fn ergodic_crosscheck(f: &DirichletPolynomial, sigma: f64, p: f64, schedule: &MeanSchedule) -> Result<CheckReport> {
    schedule.validate()?;
    let mut trace = Vec::with_capacity(schedule.t_list.len());
    for &t in &schedule.t_list {
        trace.push((t, window_mean_panels(f, sigma, t, p, schedule.panel())?));
    }
    let rhs = torus_mean(f, sigma, p)?;
    let lhs = trace.last().unwrap().1;
    let c = trace
        .windows(2)
        .map(|w| (w[0].1 - w[1].1).abs() * w[0].0)
        .fold(0.0, f64::max);
    let tol = schedule.eps_stab + c / schedule.t_max();
    let r = CheckReport::new("ergodic", lhs, rhs);
    let ok = r.abs_err <= tol;
    Ok(r.param("sigma", sigma).param("p", p).param("C", c).with_trace(trace).judge(tol, ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Character;
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, PI};

    fn dp(t: &[(u64, f64)]) -> DirichletPolynomial {
        DirichletPolynomial::from_real(t).unwrap()
    }

    /// Plain trapezoid on one period of a periodic integrand.
    fn brute_circle(n: usize, g: impl Fn(f64) -> f64) -> f64 {
        (0..n).map(|k| g(TAU * k as f64 / n as f64)).sum::<f64>() / n as f64
    }

    #[test]
    fn window_mean_examples() {
        let f = DirichletPolynomial::constant(Complex64::new(0.0, 2.0));
        assert!((window_mean(&f, 0.7, 3.0, 3.0).unwrap() - 8.0).abs() < 1e-9);
        let f = dp(&[(2, 1.0)]);
        assert!((window_mean(&f, 1.0, 17.0, 2.0).unwrap() - 0.25).abs() < 1e-9);

        let f = dp(&[(1, 1.0), (2, 1.0)]);
        let t = PI / LN_2;
        let v = window_mean(&f, 1.0, t, 4.0).unwrap();
        // one full period: circle average of |1 + w/2|^4 = 1 + 4/4 + 1/16 by orthogonality
        let oracle = brute_circle(1_000_000, |x| (Complex64::cis(x) * 0.5 + 1.0).norm().powi(4));
        assert!((oracle - 2.0625).abs() < 1e-12);
        assert!((v - 2.0625).abs() < 1e-9);
    }

    #[test]
    fn invalid_exponent() {
        let f = dp(&[(2, 1.0)]);
        assert_eq!(window_mean(&f, 0.0, 1.0, 0.5), Err(LabError::InvalidExponent(0.5)));
    }

    #[test]
    fn torus_mean_examples() {
        let f = dp(&[(1, 1.0), (2, 1.0), (3, 1.0)]);
        assert!((torus_mean(&f, 1.0, 2.0).unwrap() - (1.0 + 0.25 + 1.0 / 9.0)).abs() < 1e-12);
        let f = dp(&[(2, 1.0)]);
        assert!((torus_mean(&f, 0.0, 17.0).unwrap() - 1.0).abs() < 1e-12);
        let f = dp(&[(1, 1.0), (2, 1.0)]);
        let oracle = brute_circle(1_000_000, |x| (Complex64::cis(x) + 1.0).norm().powi(4));
        assert!((oracle - 6.0).abs() < 1e-9);
        assert!((torus_mean(&f, 0.0, 4.0).unwrap() - 6.0).abs() < 1e-10);
    }

    #[test]
    fn torus_dimension_cap() {
        let f = dp(&[(2, 1.0), (3, 1.0), (5, 1.0), (7, 1.0), (11, 1.0)]);
        assert_eq!(torus_mean(&f, 1.0, 2.0), Err(LabError::TooManyPrimes(5)));
    }

    #[test]
    fn hp_norm_examples() {
        let s = MeanSchedule::default();
        let f = DirichletPolynomial::constant(Complex64::new(3.0, 0.0));
        assert!((hp_norm(&f, 1.5, &s).unwrap().norm - 3.0).abs() < 1e-12);
        let f = dp(&[(2, 1.0)]);
        assert!((hp_norm(&f, 3.0, &s).unwrap().norm - 1.0).abs() < 1e-12);
        let f = dp(&[(1, 1.0), (2, 1.0)]);
        let h = hp_norm(&f, 2.0, &s).unwrap();
        assert!((h.norm - 2f64.sqrt()).abs() < 1e-10);
        assert_eq!(h.trace.last().unwrap().0, 0.0);
    }

    #[test]
    fn jessen_examples() {
        let f = DirichletPolynomial::constant(Complex64::new(-2.5, 0.0));
        assert!((jessen_function(&f, 0.3, JessenMode::Torus).unwrap() - 2.5f64.ln()).abs() < 1e-12);
        let f = dp(&[(1, 1.0), (2, -2.0)]);
        assert!(jessen_function(&f, 2.0, JessenMode::Torus).unwrap().abs() < 1e-9);
        let v = jessen_function(&f, 0.5, JessenMode::Torus).unwrap();
        let oracle = brute_circle(1_000_000, |x| (1.0 - 2f64.sqrt() * Complex64::cis(x)).norm().ln());
        assert!((oracle - 0.5 * LN_2).abs() < 1e-9);
        assert!((v - 0.5 * LN_2).abs() < 1e-9);
        let w = jessen_function(&f, 0.5, JessenMode::Window { t: 200.0 }).unwrap();
        assert!((w - 0.5 * LN_2).abs() < 1e-2);
    }

    #[test]
    fn ergodic_examples() {
        let s = MeanSchedule::default();
        let f = dp(&[(2, 1.0)]);
        let r = ergodic_crosscheck(&f, 0.5, 2.0, &s).unwrap();
        assert!(r.abs_err < 1e-9 && r.passed());

        let f = dp(&[(1, 1.0), (2, 1.0), (3, 1.0)]);
        let s = MeanSchedule::new(vec![125.0, 250.0, 500.0], 4, 1e-3).unwrap();
        let r = ergodic_crosscheck(&f, 1.0, 2.0, &s).unwrap();
        assert!((r.rhs - 1.3611111111111112).abs() < 1e-10);
        // finite-window deviation by orthogonality: sum over pairs m < n of
        // 2 Re(a_m conj(a_n)) (mn)^{-sigma} sin(T log(n/m)) / (T log(n/m))
        let t = 500.0;
        let exact: f64 = [(1.0, 2f64.ln()), (2.0 / 3.0, 3f64.ln()), (1.0 / 3.0, 1.5f64.ln())]
            .iter()
            .map(|&(c, l)| c * (t * l).sin() / (t * l))
            .sum();
        assert!((r.lhs - r.rhs - exact).abs() < 1e-9);
        assert!(r.abs_err < 5e-3);
        assert!(r.passed());

        let chi = Character::from_angles(&[(2, 1.0), (3, 2.5)]).unwrap();
        let g = f.twist(&chi).unwrap();
        assert!((torus_mean(&f, 1.0, 2.0).unwrap() - torus_mean(&g, 1.0, 2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn schedule_validation() {
        assert!(MeanSchedule::new(vec![50.0], 4, 1e-3).is_err());
        assert!(MeanSchedule::new(vec![50.0, 40.0], 4, 1e-3).is_err());
        assert!(MeanSchedule::new(vec![50.0, 100.0], 3, 1e-3).is_err());
    }

    fn poly_strategy() -> impl Strategy<Value = DirichletPolynomial> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..7).prop_map(|cs| {
            let ns = [1u64, 2, 3, 4, 6, 9, 12];
            DirichletPolynomial::new(ns.iter().zip(cs).map(|(&n, (re, im))| (n, Complex64::new(re, im))).collect())
                .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 500, rng_seed: proptest::test_runner::RngSeed::Fixed(0), ..ProptestConfig::default() })]

        #[test]
        fn parseval(f in poly_strategy(), sigma in 0.0f64..3.0) {
            let exact: f64 = f.terms().iter().map(|t| t.coeff.norm_sqr() * (-2.0 * sigma * t.log_n()).exp()).sum();
            prop_assert!((torus_mean(&f, sigma, 2.0).unwrap() - exact).abs() < 1e-10);
        }

        #[test]
        fn twist_invariance(f in poly_strategy(), t2 in 0.0f64..TAU, t3 in 0.0f64..TAU, k in 1usize..4) {
            let chi = Character::from_angles(&[(2, t2), (3, t3)]).unwrap();
            let g = f.twist(&chi).unwrap();
            let s = MeanSchedule::default();
            // even p: |f_chi|^p is a trigonometric polynomial and the torus rule is exact
            let p = 2.0 * k as f64;
            let ha = hp_norm(&f, p, &s).unwrap().norm;
            let hb = hp_norm(&g, p, &s).unwrap().norm;
            prop_assert!((ha - hb).abs() < 1e-10 * ha.max(1.0));
        }

        #[test]
        fn jessen_twist_invariance(f in poly_strategy(), tau in -100.0f64..100.0, sigma in 0.05f64..3.0) {
            prop_assume!(!f.is_zero());
            let g = f.vertical_translate(tau);
            let a = jessen_function(&f, sigma, JessenMode::Torus);
            let b = jessen_function(&g, sigma, JessenMode::Torus);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn monotone_and_log_convex_in_sigma() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let ns = [1u64, 2, 3, 4, 5, 6];
        for _ in 0..20 {
            let f = DirichletPolynomial::new(
                ns.iter().map(|&n| (n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect(),
            )
            .unwrap();
            // even p keeps |f_chi|^p a trigonometric polynomial, so the torus rule is exact
            let p = [2.0, 4.0, 6.0][rng.gen_range(0..3)];
            let grid: Vec<f64> = (0..=12).map(|k| 0.25 * k as f64).collect();
            let m: Vec<f64> = grid.iter().map(|&s| torus_mean_tol(&f, s, p, 1e-9).unwrap()).collect();
            for w in m.windows(2) {
                assert!(w[1] <= w[0] + 1e-9);
            }
            for w in m.windows(3) {
                let (a, b, c) = (w[0].ln(), w[1].ln(), w[2].ln());
                assert!(b <= 0.5 * (a + c) + 1e-9);
            }
        }
    }

    #[test]
    fn jessen_convex_twist_invariant_and_limit() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            let f = DirichletPolynomial::new(
                [1u64, 2, 3, 6]
                    .iter()
                    .map(|&n| (n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                    .collect(),
            )
            .unwrap();
            let grid: Vec<f64> = (1..=12).map(|k| 0.5 * k as f64).collect();
            let j: Vec<f64> = grid.iter().map(|&s| jessen_function(&f, s, JessenMode::Torus).unwrap()).collect();
            for w in j.windows(3) {
                assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-8);
            }
            let chi = Character::vertical(rng.gen_range(-50.0..50.0), &[2, 3]);
            let g = f.twist(&chi).unwrap();
            let jg = jessen_function(&g, 1.0, JessenMode::Torus).unwrap();
            assert!((jg - j[1]).abs() < 1e-9);
            let a1 = f.coeff(1).norm();
            let x = f.tail_bound(6.0) / a1;
            assert!(x < 0.5);
            assert!((j[11] - a1.ln()).abs() <= -(1.0 - x).ln());
        }
    }
}
