use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Zeros of a finite half-plane Blaschke product, repeated according to multiplicity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlaschkeData {
    zeros: Vec<Complex64>,
}

impl BlaschkeData {
    pub fn new(zeros: Vec<Complex64>) -> Result<Self> {
        if let Some(z) = zeros.iter().find(|z| !(z.re > 0.0) || !z.im.is_finite()) {
            return Err(LabError::InvalidParameter(format!("zero {z} is not in the right half-plane")));
        }
        Ok(Self { zeros })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    /// `prod (1 - conj(a)^2)/|1 - a^2| * (s - a)/(s + conj(a))`. The unimodular normalizer is
    /// skipped for `a = 1`, where it is undefined; only `|B|` is meaningful then.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for &a in &self.zeros {
            let den = s + a.conj();
            if den.norm() <= 1e-14 * (1.0 + a.norm()) {
                return Err(LabError::PoleHit { re: s.re, im: s.im });
            }
            let one_minus_a2 = 1.0 - a * a;
            let norm = one_minus_a2.norm();
            let unit = if norm > 1e-14 {
                (1.0 - a.conj() * a.conj()) / norm
            } else {
                Complex64::new(1.0, 0.0)
            };
            acc *= unit * (s - a) / den;
        }
        Ok(acc)
    }
}
