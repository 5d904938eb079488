use num_complex::Complex64;

use super::{Analytic, Character};
use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub n: u64,
    pub coeff: Complex64,
    log_n: f64,
}

impl Term {
    pub fn log_n(&self) -> f64 {
        self.log_n
    }
}

/// A finite Dirichlet series `sum a_n n^{-s}` with distinct `n >= 1`, stored in increasing `n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DirichletPolynomial {
    terms: Vec<Term>,
}

impl DirichletPolynomial {
    pub fn new(mut terms: Vec<(u64, Complex64)>) -> Result<Self> {
        terms.sort_by_key(|t| t.0);
        for w in terms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(LabError::DuplicateKey(format!("n = {}", w[0].0)));
            }
        }
        let mut out = Vec::with_capacity(terms.len());
        for (n, coeff) in terms {
            if n == 0 {
                return Err(LabError::InvalidSeries("n must be >= 1".into()));
            }
            if !(coeff.re.is_finite() && coeff.im.is_finite()) {
                return Err(LabError::InvalidSeries(format!("non-finite coefficient at n = {n}")));
            }
            out.push(Term { n, coeff, log_n: (n as f64).ln() });
        }
        Ok(Self { terms: out })
    }

    pub fn from_real(terms: &[(u64, f64)]) -> Result<Self> {
        Self::new(terms.iter().map(|&(n, a)| (n, Complex64::new(a, 0.0))).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self { terms: vec![Term { n: 1, coeff: c, log_n: 0.0 }] }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, n: u64) -> Complex64 {
        self.terms
            .binary_search_by_key(&n, |t| t.n)
            .map(|i| self.terms[i].coeff)
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == Complex64::default())
    }

    /// Sorted distinct primes dividing some `n` of the support.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self
            .terms
            .iter()
            .flat_map(|t| super::factorize(t.n).into_iter().map(|(p, _)| p))
            .collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// Coefficients `-a_n log n`; the `n = 1` term drops out.
    pub fn derivative(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|t| t.n > 1)
                .map(|t| Term { n: t.n, coeff: -t.coeff * t.log_n, log_n: t.log_n })
                .collect(),
        }
    }

    pub fn twist(&self, chi: &Character) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(Term { n: t.n, coeff: t.coeff * chi.value(t.n)?, log_n: t.log_n });
        }
        Ok(Self { terms })
    }

    /// Coefficients `a_n n^{-i tau}`, so that the result evaluated at `s` equals `f(s + i tau)`.
    pub fn vertical_translate(&self, tau: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term { n: t.n, coeff: t.coeff * Complex64::cis(-tau * t.log_n), log_n: t.log_n })
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            terms: self.terms.iter().map(|t| Term { coeff: t.coeff * c, ..t.clone() }).collect(),
        }
    }

    /// `sum_{n >= 2} |a_n| n^{-sigma}`.
    pub fn tail_bound(&self, sigma: f64) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.n >= 2)
            .map(|t| t.coeff.norm() * (-sigma * t.log_n).exp())
            .sum()
    }

    /// Exponent vectors `v_p(n)` over `primes`, one row per term.
    pub(crate) fn exponent_table(&self, primes: &[u64]) -> Vec<Vec<u32>> {
        self.terms
            .iter()
            .map(|t| {
                let fac = super::factorize(t.n);
                primes
                    .iter()
                    .map(|p| fac.iter().find(|(q, _)| q == p).map(|(_, e)| *e).unwrap_or(0))
                    .collect()
            })
            .collect()
    }
}

impl Analytic for DirichletPolynomial {
    fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for t in &self.terms {
            if t.n == 1 {
                acc += t.coeff;
            } else {
                acc += t.coeff * (-s * t.log_n).exp();
            }
        }
        acc
    }

    fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::default();
        let mut d = Complex64::default();
        for t in &self.terms {
            if t.n == 1 {
                v += t.coeff;
            } else {
                let e = t.coeff * (-s * t.log_n).exp();
                v += e;
                d -= e * t.log_n;
            }
        }
        (v, d)
    }

    fn value_at_infinity(&self) -> Complex64 {
        self.coeff(1)
    }

    fn spectrum(&self) -> Vec<(f64, f64)> {
        self.terms.iter().map(|t| (t.log_n, t.coeff.norm())).collect()
    }

    fn tail_bound(&self, sigma: f64) -> f64 {
        DirichletPolynomial::tail_bound(self, sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let f = DirichletPolynomial::from_real(&[(1, 1.0)]).unwrap();
        assert_eq!(f.eval(c(3.0, 4.0)), c(1.0, 0.0));
        let f = DirichletPolynomial::from_real(&[(2, 1.0)]).unwrap();
        assert!((f.eval(c(1.0, 0.0)) - 0.5).norm() < 1e-16);
        let f = DirichletPolynomial::from_real(&[(1, 1.0), (2, 1.0), (3, 1.0)]).unwrap();
        assert!((f.eval(c(0.0, 0.0)) - 3.0).norm() < 1e-15);
        let f = DirichletPolynomial::from_real(&[(1, 1.0), (2, -2.0)]).unwrap();
        let s = c(1.0, 2.0 * PI / LN_2);
        // 1 - 2^{1-s} by hand
        let oracle = c(1.0, 0.0) - (-(s - 1.0) * LN_2).exp();
        assert!(oracle.norm() < 1e-14);
        assert!(f.eval(s).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            DirichletPolynomial::from_real(&[(2, 1.0), (2, 3.0)]),
            Err(LabError::DuplicateKey(_))
        ));
        assert!(DirichletPolynomial::from_real(&[(0, 1.0)]).is_err());
    }

    #[test]
    fn terms_are_sorted() {
        let f = DirichletPolynomial::from_real(&[(5, 1.0), (1, 2.0), (3, 3.0)]).unwrap();
        let ns: Vec<u64> = f.terms().iter().map(|t| t.n).collect();
        assert_eq!(ns, vec![1, 3, 5]);
        assert_eq!(f.primes(), vec![3, 5]);
    }

    #[test]
    fn derivative_examples() {
        let f = DirichletPolynomial::from_real(&[(1, 7.0)]).unwrap();
        assert!(f.derivative().is_empty());
        let f = DirichletPolynomial::from_real(&[(2, 1.0)]).unwrap();
        let d = f.derivative();
        assert_eq!(d.terms().len(), 1);
        assert!((d.coeff(2) + LN_2).norm() < 1e-16);

        let f = DirichletPolynomial::from_real(&[(2, 1.0), (3, 1.0)]).unwrap();
        let s = c(1.0, 0.0);
        let h = 1e-6;
        let fd = (f.eval(s + h) - f.eval(s - h)) / (2.0 * h);
        let exact = -LN_2 / 2.0 - 3f64.ln() / 3.0;
        assert!((fd.re - exact).abs() < 1e-8);
        assert!((f.derivative().eval(s).re - exact).abs() < 1e-14);
    }

    #[test]
    fn twist_examples() {
        let f = DirichletPolynomial::from_real(&[(1, 1.0), (2, 0.5), (6, 0.25)]).unwrap();
        let trivial = Character::from_angles(&[(2, 0.0), (3, 0.0)]).unwrap();
        assert_eq!(f.twist(&trivial).unwrap(), f);

        let g = DirichletPolynomial::from_real(&[(2, 1.0)]).unwrap();
        let chi = Character::from_angles(&[(2, PI)]).unwrap();
        assert!((g.twist(&chi).unwrap().coeff(2) + 1.0).norm() < 1e-15);

        let g = DirichletPolynomial::from_real(&[(6, 1.0)]).unwrap();
        let chi = Character::from_angles(&[(2, PI / 2.0), (3, PI / 2.0)]).unwrap();
        assert!((g.twist(&chi).unwrap().coeff(6) + 1.0).norm() < 1e-15);

        let chi = Character::from_angles(&[(2, 1.0)]).unwrap();
        assert_eq!(g.twist(&chi), Err(LabError::MissingPrimeAngle(3)));
    }

    #[test]
    fn vertical_translate_examples() {
        let f = DirichletPolynomial::from_real(&[(2, 1.0), (3, 1.0)]).unwrap();
        assert_eq!(f.vertical_translate(0.0), f);
        let g = DirichletPolynomial::from_real(&[(2, 1.0)]).unwrap();
        let h = g.vertical_translate(2.0 * PI / LN_2);
        assert!((h.coeff(2) - 1.0).norm() < 1e-14);

        let s = c(1.0, 0.0);
        let v = f.vertical_translate(1.0).eval(s);
        assert!((v - f.eval(c(1.0, 1.0))).norm() < 1e-12);
        let chi = Character::vertical(1.0, &[2, 3]);
        assert!((f.twist(&chi).unwrap().eval(s) - v).norm() < 1e-12);
    }

    #[test]
    fn tail_bound_examples() {
        let f = DirichletPolynomial::from_real(&[(1, 5.0)]).unwrap();
        assert_eq!(f.tail_bound(1.0), 0.0);
        let f = DirichletPolynomial::from_real(&[(2, 1.0)]).unwrap();
        assert!((f.tail_bound(10.0) - 9.765625e-4).abs() < 1e-15);
        let f = DirichletPolynomial::from_real(&[(2, 1.0), (3, 1.0)]).unwrap();
        assert!((f.tail_bound(2.0) - (0.25 + 1.0 / 9.0)).abs() < 1e-15);
    }
}
