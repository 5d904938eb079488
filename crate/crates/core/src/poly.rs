//! Roots of complex polynomials and the circle mean of `log |P|`.

use num_complex::Complex64;

/// Roots of `sum c[j] z^j` (trailing zero coefficients are dropped) by Aberth-Ehrlich iteration.
pub fn roots(c: &[Complex64]) -> Vec<Complex64> {
    let deg = match c.iter().rposition(|x| *x != Complex64::default()) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let c = &c[..=deg];
    match deg {
        0 => return Vec::new(),
        1 => return vec![-c[0] / c[1]],
        2 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = (b * b - 4.0 * a * cc).sqrt();
            let q = if (b.conj() * disc).re >= 0.0 { -0.5 * (b + disc) } else { -0.5 * (b - disc) };
            if q == Complex64::default() {
                return vec![q, q];
            }
            return vec![q / a, cc / q];
        }
        _ => {}
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let radius = 1.0 + monic[..deg].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + std::f64::consts::TAU * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = horner(&monic, z[i]);
            if p == Complex64::default() {
                continue;
            }
            let ratio = p / dp;
            let repulse: Complex64 = (0..deg).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * repulse);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::default();
    let mut dp = Complex64::default();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Number of roots of modulus greater than one.
pub fn roots_outside(c: &[Complex64]) -> usize {
    roots(c).iter().filter(|r| r.norm() > 1.0).count()
}

/// `(1/2pi) int log |P(e^{i theta})| d theta` by Jensen's formula:
/// `log |c_top| + sum log max(1, |root|)`. `None` for the zero polynomial.
pub fn circle_log_mean(c: &[Complex64]) -> Option<f64> {
    let deg = c.iter().rposition(|x| *x != Complex64::default())?;
    let rs = roots(&c[..=deg]);
    Some(c[deg].norm().ln() + rs.iter().map(|r| r.norm().max(1.0).ln()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn recovers_known_roots() {
        let want = [c(1.0, 0.0), c(-0.5, 2.0), c(0.3, -0.7), c(2.0, 2.0), c(-1.5, 0.0)];
        // expand prod (z - r)
        let mut poly = vec![c(1.0, 0.0)];
        for r in want {
            let mut next = vec![Complex64::default(); poly.len() + 1];
            for (k, a) in poly.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            poly = next;
        }
        let got = roots(&poly);
        for r in want {
            assert!(got.iter().any(|g| (g - r).norm() < 1e-10), "{r}");
        }
    }

    #[test]
    fn quadratic_and_linear() {
        let r = roots(&[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
        assert!(r.iter().any(|z| (z - 1.0).norm() < 1e-15));
        assert!(r.iter().any(|z| (z - 2.0).norm() < 1e-15));
        assert_eq!(roots(&[c(1.0, 0.0), c(2.0, 0.0), Complex64::default()]), vec![c(-0.5, 0.0)]);
    }

    #[test]
    fn jensen_circle_means() {
        // log |1 - 2w| averages to log 2; log |1 - w/2| averages to 0
        assert!((circle_log_mean(&[c(1.0, 0.0), c(-2.0, 0.0)]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(circle_log_mean(&[c(1.0, 0.0), c(-0.5, 0.0)]).unwrap().abs() < 1e-15);
        // brute force for a cubic
        let p = [c(0.3, 0.1), c(-1.0, 0.5), c(0.2, 0.0), c(0.7, -0.4)];
        let n = 200_000;
        let brute = (0..n)
            .map(|k| {
                let z = Complex64::cis(std::f64::consts::TAU * (k as f64 + 0.5) / n as f64);
                horner(&p, z).0.norm().ln()
            })
            .sum::<f64>()
            / n as f64;
        assert!((circle_log_mean(&p).unwrap() - brute).abs() < 1e-6);
        assert!(circle_log_mean(&[Complex64::default()]).is_none());
    }
}
