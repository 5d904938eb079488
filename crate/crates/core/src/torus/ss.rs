//! Approximate outer function on the two-torus with prescribed boundary modulus `1` on a set
//! and `delta` off it, read back as a generalized Dirichlet series in `2^{-s}, 3^{-s}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::TorusSet;
use crate::error::{LabError, Result};
use crate::series::{frequency, GeneralizedSeries};

const COEFF_FLOOR: f64 = 1e-15;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsOptions {
    /// The grid is `2^k x 2^k`.
    pub log2_grid: u32,
    /// Standard deviation of the Gaussian mollifier; defaults to 5% of the set's feature width.
    pub mollifier_std: Option<f64>,
    /// Grid points where the smoothed indicator lies in `(margin, 1 - margin)` form the
    /// mollification margin.
    pub margin: f64,
}

impl Default for SsOptions {
    fn default() -> Self {
        Self { log2_grid: 10, mollifier_std: None, margin: 1e-3 }
    }
}

const FALLBACK_WIDTH: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct SsConstruction {
    pub series: GeneralizedSeries,
    pub delta: f64,
    pub degree: u32,
    /// `max ||F| - w|` over grid points off the mollification margin.
    pub e_inf: f64,
    /// `|int |F|^2 - int w^2|`.
    pub e2: f64,
    /// Grid fraction inside the mollification margin.
    pub margin_fraction: f64,
    /// Grid fraction inside the (unsmoothed) set.
    pub cover_fraction: f64,
    /// Mean of `log w`, the `(0, 0)` Fourier coefficient.
    pub log_mean: f64,
    pub mollifier_std: f64,
    pub margin: f64,
    /// Sum of `|coefficient|` of `exp(G)` at frequencies outside the half-space (aliasing).
    pub aliased_mass: f64,
    grid: usize,
    smooth: Vec<f64>,
}

fn freq(i: usize, n: usize) -> i32 {
    if i < n / 2 {
        i as i32
    } else {
        i as i32 - n as i32
    }
}

struct Fft2 {
    n: usize,
    fwd: std::sync::Arc<dyn Fft<f64>>,
    inv: std::sync::Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn transpose(&self, a: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                a.swap(i * n + j, j * n + i);
            }
        }
    }

    /// Unnormalized 2-D transform in place (row-major, `a[i n + j]`).
    fn run(&self, a: &mut [Complex64], inverse: bool) {
        let f = if inverse { &self.inv } else { &self.fwd };
        f.process(a);
        self.transpose(a);
        f.process(a);
        self.transpose(a);
    }
}

fn rasterize(u: &TorusSet, n: usize) -> Vec<f64> {
    let h = TAU / n as f64;
    let mut out = vec![0.0; n * n];
    for p in u.pieces() {
        let (lo, hi) = p.bbox();
        let i0 = (lo[0] / h).ceil().max(0.0) as usize;
        let i1 = ((hi[0] / h).floor() as usize).min(n - 1);
        for i in i0..=i1 {
            let x = i as f64 * h;
            if let Some((y0, y1)) = p.vertical_range(x) {
                let j0 = (y0 / h).ceil().max(0.0) as usize;
                let j1 = ((y1 / h).floor() as usize).min(n - 1);
                for j in j0..=j1 {
                    out[i * n + j] = 1.0;
                }
            }
        }
    }
    out
}

/// Builds `f(s) = F(2^{-s}, 3^{-s})` with `|F| ~ 1` on `u` and `|F| ~ delta` off `u`.
///
/// The indicator of `u` is smoothed by a Gaussian, `log w = log(delta) (1 - smooth)` is expanded
/// in Fourier series, the half-space part (frequencies with `m log 2 + n log 3 > 0`) is doubled to
/// give `G` with `Re G = log w`, and `F = exp(G)` is truncated to `|m| + |n| <= degree`.
pub fn ss_outer_construct(u: &TorusSet, delta: f64, degree: u32, opts: SsOptions) -> Result<SsConstruction> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LabError::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    if degree < 8 {
        return Err(LabError::InvalidParameter(format!("degree must be at least 8, got {degree}")));
    }
    if !(4..=12).contains(&opts.log2_grid) {
        return Err(LabError::InvalidParameter(format!("grid exponent {} outside 4..=12", opts.log2_grid)));
    }
    let n = 1usize << opts.log2_grid;
    if 4 * degree as usize >= n {
        return Err(LabError::TruncationOverflow(format!(
            "degree {degree} needs a grid finer than 2^{}",
            opts.log2_grid
        )));
    }
    if !(opts.margin > 0.0 && opts.margin < 0.5) {
        return Err(LabError::InvalidParameter(format!("margin must lie in (0, 0.5), got {}", opts.margin)));
    }
    let std = opts.mollifier_std.unwrap_or(0.05 * u.feature_width.unwrap_or(FALLBACK_WIDTH));
    if !(std >= 0.0) || !std.is_finite() {
        return Err(LabError::InvalidParameter(format!("mollifier std must be nonnegative, got {std}")));
    }
    let fft = Fft2::new(n);
    let nn = (n * n) as f64;

    let indicator = rasterize(u, n);
    let cover_fraction = indicator.iter().sum::<f64>() / nn;
    let mut buf: Vec<Complex64> = indicator.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.run(&mut buf, false);
    for i in 0..n {
        let m = freq(i, n) as f64;
        for j in 0..n {
            let k = freq(j, n) as f64;
            buf[i * n + j] *= (-0.5 * std * std * (m * m + k * k)).exp() / nn;
        }
    }
    fft.run(&mut buf, true);
    let smooth: Vec<f64> = buf.iter().map(|z| z.re.clamp(0.0, 1.0)).collect();

    let ld = delta.ln();
    let mut buf: Vec<Complex64> = smooth.iter().map(|&s| Complex64::new(ld * (1.0 - s), 0.0)).collect();
    fft.run(&mut buf, false);
    let log_mean = buf[0].re / nn;
    for i in 0..n {
        let m = freq(i, n);
        for j in 0..n {
            let k = freq(j, n);
            let c = &mut buf[i * n + j];
            if (m, k) == (0, 0) {
                *c /= nn;
                continue;
            }
            let lambda = frequency(m, k);
            if lambda.abs() < TIE_TOL {
                return Err(LabError::FrequencyTie(m, k));
            }
            *c = if lambda > 0.0 { *c * (2.0 / nn) } else { Complex64::default() };
        }
    }
    fft.run(&mut buf, true);
    for z in buf.iter_mut() {
        *z = z.exp();
    }
    fft.run(&mut buf, false);

    let d = degree as i32;
    let mut terms = Vec::new();
    let mut aliased_mass = 0.0;
    let mut trunc = vec![Complex64::default(); n * n];
    for i in 0..n {
        let m = freq(i, n);
        for j in 0..n {
            let k = freq(j, n);
            let c = buf[i * n + j] / nn;
            let positive = (m, k) == (0, 0) || frequency(m, k) > 0.0;
            if !positive {
                aliased_mass += c.norm();
                continue;
            }
            if m.abs() + k.abs() <= d && c.norm() > COEFF_FLOOR {
                terms.push((m, k, c));
                trunc[i * n + j] = c;
            }
        }
    }
    let series = GeneralizedSeries::new(terms)?;

    // truncated F back on the grid
    fft.run(&mut trunc, true);
    let mut e_inf: f64 = 0.0;
    let mut in_margin = 0usize;
    let (mut f2, mut w2) = (0.0, 0.0);
    for (z, &s) in trunc.iter().zip(&smooth) {
        let w = (ld * (1.0 - s)).exp();
        let a = z.norm();
        f2 += a * a;
        w2 += w * w;
        if s > opts.margin && s < 1.0 - opts.margin {
            in_margin += 1;
        } else {
            e_inf = e_inf.max((a - w).abs());
        }
    }
    Ok(SsConstruction {
        series,
        delta,
        degree,
        e_inf,
        e2: ((f2 - w2) / nn).abs(),
        margin_fraction: in_margin as f64 / nn,
        cover_fraction,
        log_mean,
        mollifier_std: std,
        margin: opts.margin,
        aliased_mass,
        grid: n,
        smooth,
    })
}

impl SsConstruction {
    fn grid_index(&self, theta: [f64; 2]) -> usize {
        let n = self.grid;
        let h = TAU / n as f64;
        let idx = |x: f64| ((x.rem_euclid(TAU) / h).round() as usize) % n;
        idx(theta[0]) * n + idx(theta[1])
    }

    /// Smoothed indicator at the nearest grid point.
    pub fn smooth_at(&self, theta: [f64; 2]) -> f64 {
        self.smooth[self.grid_index(theta)]
    }

    /// Target modulus `w` at the nearest grid point.
    pub fn target_at(&self, theta: [f64; 2]) -> f64 {
        (self.delta.ln() * (1.0 - self.smooth_at(theta))).exp()
    }

    pub fn in_margin(&self, theta: [f64; 2]) -> bool {
        let s = self.smooth_at(theta);
        s > self.margin && s < 1.0 - self.margin
    }

    /// Grid mean of `|F|^p` for the truncated series.
    pub fn torus_mean(&self, p: f64) -> f64 {
        let n = self.grid;
        let fft = Fft2::new(n);
        let mut buf = vec![Complex64::default(); n * n];
        let idx = |k: i32| if k >= 0 { k as usize } else { (k + n as i32) as usize };
        for t in self.series.terms() {
            buf[idx(t.a) * n + idx(t.b)] = t.coeff;
        }
        fft.run(&mut buf, true);
        buf.iter().map(|z| z.norm().powf(p)).sum::<f64>() / (n * n) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Analytic;
    use crate::torus::{kronecker_point, parallelogram_cover};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half_square() -> TorusSet {
        TorusSet::from_polygons(vec![vec![[0.0, 0.0], [std::f64::consts::PI, 0.0], [std::f64::consts::PI, TAU], [0.0, TAU]]])
            .unwrap()
    }

    #[test]
    fn trivial_sets() {
        let full = ss_outer_construct(&TorusSet::full(), 0.5, 16, SsOptions { log2_grid: 7, ..SsOptions::default() }).unwrap();
        assert!((full.series.coeff(0, 0).re - 1.0).abs() < 1e-12);
        assert!(full.series.terms().iter().all(|t| (t.a, t.b) == (0, 0) || t.coeff.norm() < 1e-12));
        let empty =
            ss_outer_construct(&TorusSet::empty(), 0.3, 16, SsOptions { log2_grid: 7, ..SsOptions::default() }).unwrap();
        assert!((empty.series.coeff(0, 0).re - 0.3).abs() < 1e-12);
        assert!(empty.e_inf < 1e-12);
        assert!((empty.log_mean - 0.3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn parameter_errors() {
        let u = TorusSet::full();
        assert!(ss_outer_construct(&u, 1.0, 16, SsOptions::default()).is_err());
        assert!(ss_outer_construct(&u, 0.5, 4, SsOptions::default()).is_err());
        let e = ss_outer_construct(&u, 0.5, 40, SsOptions { log2_grid: 7, ..SsOptions::default() });
        assert!(matches!(e, Err(LabError::TruncationOverflow(_))));
    }

    #[test]
    fn half_square_preserves_modulus_integral() {
        let c = ss_outer_construct(&half_square(), 0.5, 32, SsOptions::default()).unwrap();
        // int w^2 from the polygon geometry, not from the grid
        let exact = 0.5 * 1.0 + 0.5 * 0.25;
        let f2 = c.torus_mean(2.0);
        assert!((f2 - exact).abs() <= 0.05, "{f2}");
        assert!(c.e2 <= 0.05);
        // half-space support
        assert!(c.series.terms().iter().all(|t| (t.a, t.b) == (0, 0) || t.lambda > 0.0));
        // the constant term of exp(G) is exp of the constant term of G
        assert!((c.series.coeff(0, 0).norm().ln() - c.log_mean).abs() < 1e-6);
    }

    #[test]
    fn cover_construction_quality() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cover = parallelogram_cover(10.0, 0.3, &mut rng).unwrap();
        let c = ss_outer_construct(&cover.set, 0.5, 48, SsOptions::default()).unwrap();
        assert!(c.e_inf <= 0.1, "e_inf {}", c.e_inf);
        assert!((c.series.coeff(0, 0).norm().ln() - c.log_mean).abs() < 1e-6);
        assert!((c.mollifier_std - 0.015).abs() < 1e-15);
        // boundary values on a tau grid stay in the predicted band
        for i in 0..2000 {
            let tau = -40.0 + 0.04 * i as f64;
            let th = kronecker_point(tau);
            let a = c.series.eval(Complex64::new(0.0, tau)).norm();
            assert!(a <= 1.0 + c.e_inf + 1e-9, "{tau} {a}");
            if !c.in_margin(th) {
                assert!(a >= c.delta * (1.0 - c.e_inf) - c.e_inf, "{tau} {a}");
            }
        }
        let torus_via_series = {
            let mut acc = 0.0;
            let m = 128;
            for i in 0..m {
                for j in 0..m {
                    let th = [TAU * (i as f64 + 0.5) / m as f64, TAU * (j as f64 + 0.5) / m as f64];
                    acc += c.series.eval_torus(th[0], th[1]).norm_sqr();
                }
            }
            acc / (m * m) as f64
        };
        let coeff_sum: f64 = c.series.terms().iter().map(|t| t.coeff.norm_sqr()).sum();
        assert!((torus_via_series - coeff_sum).abs() < 1e-9);
        assert!((c.torus_mean(2.0) - coeff_sum).abs() < 1e-9);
    }
}
