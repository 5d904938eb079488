//! Argument-principle machinery: winding numbers along rectangle boundaries, zero isolation by
//! subdivision, and the counting functions built on top of them.

mod counting;

pub use counting::{
    blaschke_condition_check, counting_nf, jensen_check, limsup_bound_check, littlewood_sum, logxi_bounds,
    mean_counting, min_modulus_diagnostic, nf_boundary_term, nfswap_residual, CountResult, LittlewoodSum,
    LogXiBounds, MeanCounting, NfswapResidual, MEAN_SIGMAS,
};

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::series::Analytic;

/// Smallest admissible `|f|` at a boundary sample.
pub const BOUNDARY_FLOOR: f64 = 1e-12;
pub const MAX_DEPTH: u32 = 40;
/// Cells with larger winding are reported as clusters once they reach the depth limit.
pub const MULTIPLICITY_CAP: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub sigma0: f64,
    pub sigma1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Rectangle {
    pub fn new(sigma0: f64, sigma1: f64, t0: f64, t1: f64) -> Result<Self> {
        let finite = [sigma0, sigma1, t0, t1].iter().all(|x| x.is_finite());
        if !finite || sigma0 >= sigma1 || t0 >= t1 {
            return Err(LabError::InvalidParameter(format!(
                "rectangle [{sigma0}, {sigma1}] x [{t0}, {t1}] has no interior"
            )));
        }
        Ok(Self { sigma0, sigma1, t0, t1 })
    }

    pub fn width(&self) -> f64 {
        self.sigma1 - self.sigma0
    }

    pub fn height(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.sigma0 + self.sigma1), 0.5 * (self.t0 + self.t1))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.sigma0 && z.re <= self.sigma1 && z.im >= self.t0 && z.im <= self.t1
    }

    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.sigma0, self.t0),
            Complex64::new(self.sigma1, self.t0),
            Complex64::new(self.sigma1, self.t1),
            Complex64::new(self.sigma0, self.t1),
        ]
    }

    /// Split at fraction `frac` of the longer side.
    fn split(&self, frac: f64) -> (Rectangle, Rectangle) {
        if self.width() >= self.height() {
            let m = self.sigma0 + frac * self.width();
            (Rectangle { sigma1: m, ..*self }, Rectangle { sigma0: m, ..*self })
        } else {
            let m = self.t0 + frac * self.height();
            (Rectangle { t1: m, ..*self }, Rectangle { t0: m, ..*self })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub location: Complex64,
    pub multiplicity: u32,
    /// Radius of a disk around `location` containing the zero(s).
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ZeroList {
    pub zeros: Vec<Zero>,
    /// False when some cell hit the depth limit without resolving below the tolerance.
    pub complete: bool,
}

impl ZeroList {
    pub fn total_multiplicity(&self) -> u64 {
        self.zeros.iter().map(|z| z.multiplicity as u64).sum()
    }

    pub fn into_complete(self) -> Result<Vec<Zero>> {
        if self.complete {
            Ok(self.zeros)
        } else {
            Err(LabError::DepthExceeded(MAX_DEPTH))
        }
    }

    /// `sum m (Re s - sigma0)` over zeros with `Re s > sigma0` and `|Im s| < t`.
    pub fn weighted_sum(&self, sigma0: f64, t: f64) -> f64 {
        self.zeros
            .iter()
            .filter(|z| z.location.re > sigma0 && z.location.im.abs() < t)
            .map(|z| z.multiplicity as f64 * (z.location.re - sigma0))
            .sum()
    }
}

/// Change of a continuous argument of `f` along the segment from `a` to `b`.
///
/// Segments are bisected until the derivative bound certifies that `f` stays inside the disk
/// `|w - f(endpoint)| < |f(endpoint)|`, so each accepted step changes the argument by less than
/// `pi / 2` and the principal value is the true increment.
pub fn arg_change<F: Analytic + ?Sized>(f: &F, a: Complex64, b: Complex64) -> Result<f64> {
    let sample = |z: Complex64| -> Result<(Complex64, Complex64)> {
        let (v, d) = f.eval_with_derivative(z);
        if !(v.norm() >= BOUNDARY_FLOOR) {
            return Err(LabError::BoundaryZeroSuspected { re: z.re, im: z.im });
        }
        Ok((v, d))
    };
    let len = (b - a).norm();
    let pieces = (len / 0.25).ceil().max(1.0) as usize;
    let mut total = 0.0;
    let mut stack: Vec<(Complex64, Complex64, Complex64, Complex64, Complex64, Complex64)> = Vec::new();
    let point = |k: usize| a + (b - a) * (k as f64 / pieces as f64);
    let mut prev = (point(0), sample(point(0))?);
    for k in 1..=pieces {
        let z = point(k);
        let cur = (z, sample(z)?);
        stack.push((prev.0, prev.1 .0, prev.1 .1, cur.0, cur.1 .0, cur.1 .1));
        prev = cur;
        while let Some((za, fa, da, zb, fb, db)) = stack.pop() {
            let h = (zb - za).norm();
            let step = (fb / fa).arg();
            let mut dbound = f.derivative_bound(za.re.min(zb.re));
            if !dbound.is_finite() {
                dbound = 2.0 * da.norm().max(db.norm());
            }
            if h * dbound < 0.9 * fa.norm().max(fb.norm()) && step.abs() < FRAC_PI_2 {
                total += step;
                continue;
            }
            if h < 1e-13 * (1.0 + za.norm()) {
                let m = 0.5 * (za + zb);
                return Err(LabError::BoundaryZeroSuspected { re: m.re, im: m.im });
            }
            let zm = 0.5 * (za + zb);
            let (fm, dm) = sample(zm)?;
            // left half first so accumulation order is fixed
            stack.push((zm, fm, dm, zb, fb, db));
            stack.push((za, fa, da, zm, fm, dm));
        }
    }
    Ok(total)
}

/// Winding number of `f` around the boundary of `r`, traversed counterclockwise.
pub fn winding_number<F: Analytic + ?Sized>(f: &F, r: &Rectangle) -> Result<i64> {
    let c = r.corners();
    let mut total = 0.0;
    for k in 0..4 {
        total += arg_change(f, c[k], c[(k + 1) % 4])?;
    }
    let w = total / TAU;
    Ok(w.round() as i64)
}

/// Newton iteration from the cell center; `Some` only if it converges inside the cell.
fn newton_in_cell<F: Analytic + ?Sized>(f: &F, cell: &Rectangle) -> Option<(Complex64, f64)> {
    let mut z = cell.center();
    let mut last = f64::INFINITY;
    for _ in 0..80 {
        let (v, d) = f.eval_with_derivative(z);
        if v == Complex64::default() {
            return Some((z, 4.0 * f64::EPSILON * (1.0 + z.norm())));
        }
        if d.norm() == 0.0 {
            return None;
        }
        let step = v / d;
        z -= step;
        last = step.norm();
        if !cell.contains(z) || !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            let (v, d) = f.eval_with_derivative(z);
            let r = if d.norm() > 0.0 { 2.0 * (v / d).norm() } else { 0.0 };
            return Some((z, r.max(4.0 * f64::EPSILON * (1.0 + z.norm()))));
        }
    }
    // rounding noise can keep the last step just above the stopping threshold
    if last <= 1e-12 * (1.0 + z.norm()) {
        let (v, d) = f.eval_with_derivative(z);
        return Some((z, (2.0 * (v / d).norm()).max(last)));
    }
    None
}

const SPLIT_FRACTIONS: [f64; 6] = [0.5, 0.5137, 0.4871, 0.5293, 0.4689, 0.5411];

/// Split `cell` so that neither child has a zero on its boundary; the children's windings
/// must add up to the parent's.
fn split_cell<F: Analytic + ?Sized>(f: &F, cell: &Rectangle, w: i64) -> Option<[(Rectangle, i64); 2]> {
    for frac in SPLIT_FRACTIONS {
        let (a, b) = cell.split(frac);
        let (Ok(wa), Ok(wb)) = (winding_number(f, &a), winding_number(f, &b)) else {
            continue;
        };
        if wa + wb == w {
            return Some([(a, wa), (b, wb)]);
        }
    }
    None
}

/// Zeros of `f` inside `r` by recursive subdivision. Cells of winding one are finished by Newton's
/// method; other cells are split until their diameter drops below `tol`.
pub fn isolate_zeros<F: Analytic + ?Sized>(f: &F, r: &Rectangle, tol: f64) -> Result<ZeroList> {
    if !(tol > 0.0) {
        return Err(LabError::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let w = winding_number(f, r)?;
    let mut out = ZeroList { zeros: Vec::new(), complete: true };
    let mut stack = vec![(*r, w, 0u32)];
    while let Some((cell, w, depth)) = stack.pop() {
        if w <= 0 {
            continue;
        }
        let diam = cell.diameter();
        if w == 1 {
            if let Some((z, radius)) = newton_in_cell(f, &cell) {
                out.zeros.push(Zero { location: z, multiplicity: 1, radius });
                continue;
            }
        }
        let cluster = Zero { location: cell.center(), multiplicity: w as u32, radius: 0.5 * diam };
        if diam < tol {
            out.zeros.push(cluster);
            continue;
        }
        if depth >= MAX_DEPTH {
            // large multiplicities are accepted as clusters; small ones should have separated
            if w <= MULTIPLICITY_CAP {
                out.complete = false;
            }
            out.zeros.push(cluster);
            continue;
        }
        match split_cell(f, &cell, w) {
            Some(children) => {
                for (c, wc) in children.into_iter().rev() {
                    stack.push((c, wc, depth + 1));
                }
            }
            None => {
                // every split line ran into a zero; keep the whole cell as an enclosure
                out.zeros.push(cluster);
            }
        }
    }
    out.zeros.sort_by(|a, b| {
        a.location
            .im
            .total_cmp(&b.location.im)
            .then(a.location.re.total_cmp(&b.location.re))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{DirichletPolynomial, FrostmanShift, Shifted};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_minus_two() -> DirichletPolynomial {
        DirichletPolynomial::from_real(&[(1, 1.0), (2, -2.0)]).unwrap()
    }

    #[test]
    fn winding_examples() {
        let free = DirichletPolynomial::from_real(&[(1, 1.0), (2, 0.5)]).unwrap();
        assert_eq!(winding_number(&free, &Rectangle::new(0.0, 4.0, -30.0, 30.0).unwrap()).unwrap(), 0);
        let f = one_minus_two();
        assert_eq!(winding_number(&f, &Rectangle::new(0.5, 1.5, -1.0, 1.0).unwrap()).unwrap(), 1);
        assert_eq!(winding_number(&f, &Rectangle::new(0.5, 1.5, -10.0, 10.0).unwrap()).unwrap(), 3);
    }

    #[test]
    fn boundary_zero_is_reported() {
        let f = one_minus_two();
        let r = Rectangle::new(1.0, 2.0, -1.0, 1.0).unwrap();
        assert!(matches!(winding_number(&f, &r), Err(LabError::BoundaryZeroSuspected { .. })));
    }

    #[test]
    fn isolation_examples() {
        let f = one_minus_two();
        let z = isolate_zeros(&f, &Rectangle::new(0.5, 1.5, -1.0, 1.0).unwrap(), 1e-9).unwrap();
        assert!(z.complete);
        assert_eq!(z.zeros.len(), 1);
        assert_eq!(z.zeros[0].multiplicity, 1);
        assert!((z.zeros[0].location - 1.0).norm() < 1e-9);

        // 1 - 4 * 4^{-s}
        let g = DirichletPolynomial::from_real(&[(1, 1.0), (4, -4.0)]).unwrap();
        let z = isolate_zeros(&g, &Rectangle::new(0.5, 1.5, -0.1, 0.1).unwrap(), 1e-9).unwrap();
        assert_eq!(z.zeros.len(), 1);
        assert!((z.zeros[0].location - 1.0).norm() < 1e-9);
    }

    #[test]
    fn isolation_recovers_lattice() {
        let f = one_minus_two();
        let r = Rectangle::new(0.5, 3.0, -40.0, 40.0).unwrap();
        let z = isolate_zeros(&f, &r, 1e-9).unwrap().into_complete().unwrap();
        let step = TAU / LN_2;
        let want: Vec<f64> = (-4..=4).map(|k| k as f64 * step).collect();
        assert_eq!(z.len(), want.len());
        for (zero, t) in z.iter().zip(&want) {
            assert!((zero.location - c(1.0, *t)).norm() < 1e-9, "{:?}", zero.location);
        }
    }

    #[test]
    fn vertical_translate_covariance() {
        let f = DirichletPolynomial::from_real(&[(1, 1.0), (2, -1.5), (3, 0.7)]).unwrap();
        let tau = 0.37;
        let r = Rectangle::new(0.05, 4.0, -15.0, 15.0).unwrap();
        let shifted = Rectangle { t0: r.t0 + tau, t1: r.t1 + tau, ..r };
        let a = isolate_zeros(&f.vertical_translate(tau), &r, 1e-10).unwrap();
        let b = isolate_zeros(&f, &shifted, 1e-10).unwrap();
        assert!(!a.zeros.is_empty());
        assert_eq!(a.zeros.len(), b.zeros.len());
        for (x, y) in a.zeros.iter().zip(&b.zeros) {
            assert!((x.location - (y.location - c(0.0, tau))).norm() < 1e-9);
        }
    }

    #[test]
    fn frostman_and_shift_share_zeros() {
        let f = DirichletPolynomial::from_real(&[(2, 0.5), (3, 0.5)]).unwrap();
        for xi in [c(0.3, 0.1), c(-0.2, 0.5), c(0.05, -0.6)] {
            let r = Rectangle::new(1e-3, 6.0, -30.0, 30.0).unwrap();
            let a = isolate_zeros(&Shifted { f: &f, xi }, &r, 1e-10).unwrap();
            let b = isolate_zeros(&FrostmanShift { f: &f, xi }, &r, 1e-10).unwrap();
            assert_eq!(a.zeros.len(), b.zeros.len());
            for (x, y) in a.zeros.iter().zip(&b.zeros) {
                assert!((x.location - y.location).norm() < 1e-9);
            }
        }
    }

    fn corpus() -> Vec<DirichletPolynomial> {
        vec![
            one_minus_two(),
            DirichletPolynomial::from_real(&[(1, 1.0), (2, -1.5), (3, 0.7)]).unwrap(),
            DirichletPolynomial::new(vec![(1, c(0.2, 0.1)), (2, c(-0.7, 0.3)), (5, c(0.6, 0.0))]).unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 500, rng_seed: proptest::test_runner::RngSeed::Fixed(0), ..ProptestConfig::default() })]

        #[test]
        fn winding_is_additive(idx in 0usize..3, s0 in 0.0f64..1.0, w in 0.3f64..3.0, t0 in -20.0f64..20.0, h in 0.5f64..15.0) {
            let f = &corpus()[idx];
            let r = Rectangle::new(s0, s0 + w, t0, t0 + h).unwrap();
            let Ok(whole) = winding_number(f, &r) else { return Ok(()); };
            let mut parts = 0;
            let (sm, tm) = (s0 + 0.5 * w, t0 + 0.5 * h);
            for (a, b, c0, d) in [(s0, sm, t0, tm), (sm, s0 + w, t0, tm), (s0, sm, tm, t0 + h), (sm, s0 + w, tm, t0 + h)] {
                let Ok(wq) = winding_number(f, &Rectangle::new(a, b, c0, d).unwrap()) else { return Ok(()); };
                parts += wq;
            }
            prop_assert_eq!(whole, parts);
        }

        #[test]
        fn multiplicities_match_winding(idx in 0usize..3, s0 in 0.0f64..1.0, t0 in -30.0f64..30.0, h in 1.0f64..20.0) {
            let f = &corpus()[idx];
            let r = Rectangle::new(s0, 4.0, t0, t0 + h).unwrap();
            let Ok(w) = winding_number(f, &r) else { return Ok(()); };
            let z = isolate_zeros(f, &r, 1e-9).unwrap();
            prop_assert_eq!(z.total_multiplicity() as i64, w);
            for zero in &z.zeros {
                prop_assert!(f.eval(zero.location).norm() < 1e-8);
            }
        }
    }
}
