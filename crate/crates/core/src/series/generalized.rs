use std::f64::consts::LN_2;

use num_complex::Complex64;

use super::{factorize, Analytic, DirichletPolynomial};
use crate::error::{LabError, Result};

pub const LN_3: f64 = 1.098_612_288_668_109_8;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GTerm {
    pub a: i32,
    pub b: i32,
    pub coeff: Complex64,
    pub lambda: f64,
}

/// `sum c exp(-s (a log 2 + b log 3))` over integer pairs in the half-space `a log 2 + b log 3 > 0`,
/// plus the constant pair `(0, 0)`. Equivalently `F(2^{-s}, 3^{-s})` for a Laurent polynomial `F`
/// whose exponents lie in that half-space. Terms are kept in increasing frequency.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeneralizedSeries {
    terms: Vec<GTerm>,
    a_range: (i32, i32),
    b_range: (i32, i32),
}

pub fn frequency(a: i32, b: i32) -> f64 {
    a as f64 * LN_2 + b as f64 * LN_3
}

impl GeneralizedSeries {
    pub fn new(terms: Vec<(i32, i32, Complex64)>) -> Result<Self> {
        let mut out: Vec<GTerm> = Vec::with_capacity(terms.len());
        for (a, b, coeff) in terms {
            let lambda = frequency(a, b);
            if (a, b) != (0, 0) {
                if lambda.abs() < TIE_TOL {
                    return Err(LabError::FrequencyTie(a, b));
                }
                if lambda < 0.0 {
                    return Err(LabError::InvalidSeries(format!(
                        "pair ({a}, {b}) has negative frequency {lambda}"
                    )));
                }
            }
            if !(coeff.re.is_finite() && coeff.im.is_finite()) {
                return Err(LabError::InvalidSeries(format!("non-finite coefficient at ({a}, {b})")));
            }
            out.push(GTerm { a, b, coeff, lambda });
        }
        out.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
        for w in out.windows(2) {
            if (w[0].a, w[0].b) == (w[1].a, w[1].b) {
                return Err(LabError::DuplicateKey(format!("(a, b) = ({}, {})", w[0].a, w[0].b)));
            }
        }
        let a_range = out.iter().fold((0, 0), |(lo, hi), t| (lo.min(t.a), hi.max(t.a)));
        let b_range = out.iter().fold((0, 0), |(lo, hi), t| (lo.min(t.b), hi.max(t.b)));
        Ok(Self { terms: out, a_range, b_range })
    }

    /// Embeds a Dirichlet polynomial supported on `2^a 3^b`.
    pub fn from_dirichlet(f: &DirichletPolynomial) -> Result<Self> {
        let mut terms = Vec::with_capacity(f.len());
        for t in f.terms() {
            let (mut a, mut b) = (0, 0);
            for (p, e) in factorize(t.n) {
                match p {
                    2 => a = e as i32,
                    3 => b = e as i32,
                    _ => {
                        return Err(LabError::InvalidSeries(format!(
                            "n = {} has a prime factor other than 2 and 3",
                            t.n
                        )))
                    }
                }
            }
            terms.push((a, b, t.coeff));
        }
        Self::new(terms)
    }

    /// The ordinary Dirichlet polynomial, if all exponents are nonnegative.
    pub fn to_dirichlet(&self) -> Option<DirichletPolynomial> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.a < 0 || t.b < 0 {
                return None;
            }
            let n = 2u64.checked_pow(t.a as u32)?.checked_mul(3u64.checked_pow(t.b as u32)?)?;
            terms.push((n, t.coeff));
        }
        DirichletPolynomial::new(terms).ok()
    }

    pub fn terms(&self) -> &[GTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: i32, b: i32) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.a == a && t.b == b)
            .map(|t| t.coeff)
            .unwrap_or_default()
    }

    /// `F(e^{i theta1}, e^{i theta2})`; on the line `theta_p = -tau log p` this is `f(i tau)`.
    pub fn eval_torus(&self, theta1: f64, theta2: f64) -> Complex64 {
        let p1 = powers(Complex64::cis(theta1), self.a_range);
        let p2 = powers(Complex64::cis(theta2), self.b_range);
        self.terms
            .iter()
            .map(|t| t.coeff * p1[(t.a - self.a_range.0) as usize] * p2[(t.b - self.b_range.0) as usize])
            .sum()
    }

    fn table_is_safe(&self, sigma: f64) -> bool {
        let reach = self.a_range.0.unsigned_abs().max(self.a_range.1.unsigned_abs()) as f64 * LN_2
            + self.b_range.0.unsigned_abs().max(self.b_range.1.unsigned_abs()) as f64 * LN_3;
        sigma.abs() * reach < 600.0
    }
}

/// `z^k` for `k` in `lo..=hi`.
fn powers(z: Complex64, (lo, hi): (i32, i32)) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); (hi - lo + 1) as usize];
    let one = Complex64::new(1.0, 0.0);
    let zero_idx = (-lo) as usize;
    out[zero_idx] = one;
    for k in 1..=hi.max(0) as usize {
        out[zero_idx + k] = out[zero_idx + k - 1] * z;
    }
    let zinv = one / z;
    for k in 1..=(-lo).max(0) as usize {
        out[zero_idx - k] = out[zero_idx - k + 1] * zinv;
    }
    out
}

impl Analytic for GeneralizedSeries {
    fn eval(&self, s: Complex64) -> Complex64 {
        self.eval_with_derivative(s).0
    }

    fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::default();
        let mut d = Complex64::default();
        if self.table_is_safe(s.re) {
            let p1 = powers((-s * LN_2).exp(), self.a_range);
            let p2 = powers((-s * LN_3).exp(), self.b_range);
            for t in &self.terms {
                let e = t.coeff * p1[(t.a - self.a_range.0) as usize] * p2[(t.b - self.b_range.0) as usize];
                v += e;
                d -= e * t.lambda;
            }
        } else {
            for t in &self.terms {
                let e = t.coeff * (-s * t.lambda).exp();
                v += e;
                d -= e * t.lambda;
            }
        }
        (v, d)
    }

    fn value_at_infinity(&self) -> Complex64 {
        self.coeff(0, 0)
    }

    fn spectrum(&self) -> Vec<(f64, f64)> {
        self.terms.iter().map(|t| (t.lambda, t.coeff.norm())).collect()
    }
}
