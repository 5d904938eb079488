//! Named functions used across the checks and the command line.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::series::DirichletPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub note: &'static str,
}

pub const DEFAULT_EXAMPLE_DEGREE: u32 = 16;

pub const CORPUS: [CorpusEntry; 6] = [
    CorpusEntry { name: "const", formula: "1/2", note: "constant; degenerate control" },
    CorpusEntry { name: "mono2", formula: "2^-s", note: "inner; single frequency" },
    CorpusEntry { name: "davenport", formula: "1 - 2^(1-s)", note: "zeros on Re s = 1 at 1 + 2 pi i k / log 2" },
    CorpusEntry { name: "two_term", formula: "1 + 2^-s / 2", note: "zero-free in Re s > 0" },
    CorpusEntry { name: "three_term", formula: "(1 + 2^-s + 3^-s) / 3", note: "maps the half-plane into the disc" },
    CorpusEntry {
        name: "sec2_example",
        formula: "exp(-(2 - 2^-s - 3^-s) / (2 + 2^-s + 3^-s))",
        note: "Taylor series in (2^-s, 3^-s) truncated at total degree 16; boundary function is discontinuous at angles (pi, pi)",
    },
];

/// Coefficients of `exp(-(2 - u) / (2 + u))` in powers of `u`, up to `u^degree`.
fn example_taylor(degree: usize) -> Vec<f64> {
    // g(u) = -(2 - u)/(2 + u) = -1 + 2 sum_{m >= 1} (-1)^{m+1} (u/2)^m
    let mut g = vec![0.0; degree + 1];
    g[0] = -1.0;
    for (m, gm) in g.iter_mut().enumerate().skip(1) {
        *gm = 2.0 * if m % 2 == 1 { 1.0 } else { -1.0 } * 0.5f64.powi(m as i32);
    }
    // E = exp(g): E' = g' E
    let mut e = vec![0.0; degree + 1];
    e[0] = g[0].exp();
    for k in 1..=degree {
        e[k] = (1..=k).map(|j| j as f64 * g[j] * e[k - j]).sum::<f64>() / k as f64;
    }
    e
}

/// The example series truncated at total degree `degree` in `(2^{-s}, 3^{-s})`.
pub fn example_series(degree: u32) -> Result<DirichletPolynomial> {
    if degree > 30 {
        return Err(LabError::InvalidParameter(format!("degree {degree} exceeds 30")));
    }
    let d = degree as usize;
    let b = example_taylor(d);
    let mut terms = Vec::new();
    for (k, bk) in b.iter().enumerate() {
        // u^k = sum_j C(k, j) z1^j z2^(k - j)
        let mut binom = 1.0;
        for j in 0..=k {
            let n = 2u64.pow(j as u32) * 3u64.pow((k - j) as u32);
            terms.push((n, Complex64::new(bk * binom, 0.0)));
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    DirichletPolynomial::new(terms)
}

pub fn entry(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}

pub fn build(name: &str) -> Result<DirichletPolynomial> {
    let r = |t: &[(u64, f64)]| DirichletPolynomial::from_real(t);
    match name {
        "const" => r(&[(1, 0.5)]),
        "mono2" => r(&[(2, 1.0)]),
        "davenport" => r(&[(1, 1.0), (2, -2.0)]),
        "two_term" => r(&[(1, 1.0), (2, 0.5)]),
        "three_term" => r(&[(1, 1.0 / 3.0), (2, 1.0 / 3.0), (3, 1.0 / 3.0)]),
        "sec2_example" => example_series(DEFAULT_EXAMPLE_DEGREE),
        _ => Err(LabError::InvalidParameter(format!("unknown corpus entry {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Analytic;

    #[test]
    fn registry() {
        assert_eq!(CORPUS.len(), 6);
        for (i, a) in CORPUS.iter().enumerate() {
            assert!(CORPUS[i + 1..].iter().all(|b| b.name != a.name));
            let t = std::time::Instant::now();
            build(a.name).unwrap();
            assert!(t.elapsed().as_secs_f64() < 1.0);
        }
        assert!(build("zeta").is_err());
    }

    #[test]
    fn example_matches_closed_form() {
        let f = example_series(30).unwrap();
        for s in [Complex64::new(1.0, 0.0), Complex64::new(0.5, 3.0), Complex64::new(2.0, -7.0)] {
            let u = (-s * 2f64.ln()).exp() + (-s * 3f64.ln()).exp();
            let want = (-(2.0 - u) / (2.0 + u)).exp();
            assert!((f.eval(s) - want).norm() < 1e-5, "{s}");
        }
        // at s = +inf the value is e^{-1}
        assert!((f.coeff(1).re - (-1.0f64).exp()).abs() < 1e-15);
    }
}
