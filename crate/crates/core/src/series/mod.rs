//! Dirichlet polynomials, generalized series over the frequencies `a log 2 + b log 3`,
//! characters, Frostman shifts and half-plane Blaschke products.

mod blaschke;
mod character;
mod dirichlet;
mod generalized;

pub use blaschke::BlaschkeData;
pub use character::{factorize, Character};
pub use dirichlet::{DirichletPolynomial, Term};
pub use generalized::{frequency, GTerm, GeneralizedSeries, LN_3};

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// A function analytic in the closed right half-plane, given as a finite exponential sum
/// `sum c_k exp(-lambda_k s)` with `lambda_k >= 0`.
pub trait Analytic {
    fn eval(&self, s: Complex64) -> Complex64;

    /// Value and complex derivative at `s`.
    fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64);

    /// Limit of `f(s)` as `Re s -> +inf`.
    fn value_at_infinity(&self) -> Complex64;

    /// Pairs `(lambda, |c|)` of the exponential sum, in increasing `lambda`.
    fn spectrum(&self) -> Vec<(f64, f64)>;

    /// `sum_{lambda > 0} |c| exp(-lambda sigma)`, a bound for `|f(s) - f(+inf)|` on `Re s >= sigma`.
    fn tail_bound(&self, sigma: f64) -> f64 {
        self.spectrum()
            .iter()
            .filter(|(l, _)| *l > 0.0)
            .map(|(l, c)| c * (-l * sigma).exp())
            .sum()
    }

    /// Bound on `sup |f'|` over `Re s >= sigma`.
    fn derivative_bound(&self, sigma: f64) -> f64 {
        self.spectrum()
            .iter()
            .filter(|(l, _)| *l > 0.0)
            .map(|(l, c)| c * l * (-l * sigma).exp())
            .sum()
    }

    /// Coefficient-sum bound for `sup |f|` on the closed half-plane.
    fn sup_bound(&self) -> f64 {
        self.spectrum().iter().map(|(_, c)| c).sum()
    }
}

impl<T: Analytic + ?Sized> Analytic for &T {
    fn eval(&self, s: Complex64) -> Complex64 {
        (**self).eval(s)
    }
    fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        (**self).eval_with_derivative(s)
    }
    fn value_at_infinity(&self) -> Complex64 {
        (**self).value_at_infinity()
    }
    fn spectrum(&self) -> Vec<(f64, f64)> {
        (**self).spectrum()
    }
}

/// `f - xi`; its zeros are the `xi`-points of `f`.
#[derive(Debug, Clone, Copy)]
pub struct Shifted<F> {
    pub f: F,
    pub xi: Complex64,
}

impl<F: Analytic> Analytic for Shifted<F> {
    fn eval(&self, s: Complex64) -> Complex64 {
        self.f.eval(s) - self.xi
    }
    fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let (v, d) = self.f.eval_with_derivative(s);
        (v - self.xi, d)
    }
    fn value_at_infinity(&self) -> Complex64 {
        self.f.value_at_infinity() - self.xi
    }
    fn spectrum(&self) -> Vec<(f64, f64)> {
        let mut spec = self.f.spectrum();
        let a0 = self.value_at_infinity().norm();
        match spec.iter_mut().find(|(l, _)| *l == 0.0) {
            Some(entry) => entry.1 = a0,
            None => spec.insert(0, (0.0, a0)),
        }
        spec
    }
}

/// The Frostman shift `(xi - f) / (1 - conj(xi) f)`.
#[derive(Debug, Clone, Copy)]
pub struct FrostmanShift<F> {
    pub f: F,
    pub xi: Complex64,
}

impl<F: Analytic> FrostmanShift<F> {
    pub fn try_eval(&self, s: Complex64) -> Result<Complex64> {
        mobius(self.xi, self.f.eval(s))
    }
}

impl<F: Analytic> Analytic for FrostmanShift<F> {
    fn eval(&self, s: Complex64) -> Complex64 {
        let v = self.f.eval(s);
        (self.xi - v) / (1.0 - self.xi.conj() * v)
    }
    fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let (v, d) = self.f.eval_with_derivative(s);
        let den = 1.0 - self.xi.conj() * v;
        let value = (self.xi - v) / den;
        let deriv = -d * (1.0 - self.xi.norm_sqr()) / (den * den);
        (value, deriv)
    }
    fn value_at_infinity(&self) -> Complex64 {
        let a = self.f.value_at_infinity();
        (self.xi - a) / (1.0 - self.xi.conj() * a)
    }
    /// Not an exponential sum; reports the spectrum of `f - xi`, which has the same zeros.
    fn spectrum(&self) -> Vec<(f64, f64)> {
        Shifted { f: &self.f, xi: self.xi }.spectrum()
    }

    fn derivative_bound(&self, sigma: f64) -> f64 {
        let r = self.xi.norm();
        let den = 1.0 - r * (self.f.value_at_infinity().norm() + self.f.tail_bound(sigma));
        if den <= 0.0 {
            return f64::INFINITY;
        }
        self.f.derivative_bound(sigma) * (1.0 - r * r) / (den * den)
    }

    fn sup_bound(&self) -> f64 {
        let (r, m) = (self.xi.norm(), self.f.sup_bound());
        if r * m >= 1.0 {
            return f64::INFINITY;
        }
        (r + m) / (1.0 - r * m)
    }
}

fn mobius(xi: Complex64, w: Complex64) -> Result<Complex64> {
    let den = 1.0 - xi.conj() * w;
    if den.norm() < 1e-15 {
        return Err(LabError::DegenerateDenominator(den.norm()));
    }
    Ok((xi - w) / den)
}

/// Frostman shift `(xi - f(s)) / (1 - conj(xi) f(s))` of `f` at `s`.
pub fn frostman_shift_eval<F: Analytic + ?Sized>(f: &F, xi: Complex64, s: Complex64) -> Result<Complex64> {
    if xi.norm() >= 1.0 {
        return Err(LabError::InvalidParameter(format!("|xi| = {} must be < 1", xi.norm())));
    }
    mobius(xi, f.eval(s))
}

/// Smallest `sigma >= 0` (to within 1e-9) beyond which the leading term of the spectrum
/// dominates the rest by a factor of two, so that `|f(s)| >= |c_0| e^{-lambda_0 sigma} / 2`
/// for `Re s >= sigma`. `None` if the spectrum is identically zero.
pub fn dominance_abscissa(spectrum: &[(f64, f64)]) -> Option<f64> {
    let (lead_idx, &(l0, c0)) = spectrum.iter().enumerate().find(|(_, (_, c))| *c > 0.0)?;
    let rest: Vec<(f64, f64)> = spectrum[lead_idx + 1..]
        .iter()
        .filter(|(_, c)| *c > 0.0)
        .map(|&(l, c)| (l - l0, c))
        .collect();
    let excess = |sigma: f64| rest.iter().map(|(dl, c)| c * (-dl * sigma).exp()).sum::<f64>() - c0 / 2.0;
    if excess(0.0) <= 0.0 {
        return Some(0.0);
    }
    let mut hi = 1.0;
    while excess(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return None;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}
