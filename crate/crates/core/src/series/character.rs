use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Prime factorization by trial division, as `(p, v_p(n))` in increasing `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn is_prime(p: u64) -> bool {
    p >= 2 && factorize(p) == [(p, 1)]
}

/// A completely multiplicative unimodular function, given by its angles at finitely many primes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Character {
    angles: BTreeMap<u64, f64>,
}

impl Character {
    pub fn from_angles(angles: &[(u64, f64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(p, theta) in angles {
            if !is_prime(p) {
                return Err(LabError::InvalidParameter(format!("{p} is not prime")));
            }
            if !theta.is_finite() {
                return Err(LabError::InvalidParameter(format!("angle at {p} is not finite")));
            }
            if map.insert(p, theta.rem_euclid(TAU)).is_some() {
                return Err(LabError::DuplicateKey(format!("p = {p}")));
            }
        }
        Ok(Self { angles: map })
    }

    /// The character `p -> p^{-i tau}` restricted to `primes`.
    pub fn vertical(tau: f64, primes: &[u64]) -> Self {
        Self {
            angles: primes.iter().map(|&p| (p, (-tau * (p as f64).ln()).rem_euclid(TAU))).collect(),
        }
    }

    pub fn angle(&self, p: u64) -> Option<f64> {
        self.angles.get(&p).copied()
    }

    pub fn angles(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.angles.iter().map(|(&p, &t)| (p, t))
    }

    pub fn value(&self, n: u64) -> Result<Complex64> {
        let mut phase = 0.0;
        for (p, e) in factorize(n) {
            let theta = self.angle(p).ok_or(LabError::MissingPrimeAngle(p))?;
            phase += theta * e as f64;
        }
        Ok(Complex64::cis(phase))
    }
}
