use num_complex::Complex64;

use crate::error::{Error, Result};

/// `B_{2k} / (2k (2k-1))` for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const SHIFT_TO: f64 = 15.0;

/// `ln Γ(s)` on the branch that is continuous off the negative real axis
/// and real for real `s > 0`.
pub fn ln_gamma(s: Complex64) -> Result<Complex64> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Domain(format!("ln_gamma({s})")));
    }
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Err(Error::Pole(s.re));
    }
    if s.re < -1e6 {
        return Err(Error::Domain(format!(
            "ln_gamma({s}): real part too negative"
        )));
    }
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < SHIFT_TO || z.re < 1.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    Ok((z - 0.5) * z.ln() - z + half_ln_2pi + series - shift)
}

pub fn gamma(s: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(s)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn special_values() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(ln_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
        let half = ln_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - PI.sqrt().ln()).abs() < 1e-14 && half.im == 0.0);
        let g5 = gamma(c(5.0, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-11);
    }

    #[test]
    fn poles_rejected() {
        for k in 0..4 {
            assert_eq!(ln_gamma(c(-(k as f64), 0.0)), Err(Error::Pole(-(k as f64))));
        }
    }

    #[test]
    fn reflection_on_critical_line() {
        // |Γ(1/2 + it)|² = π / cosh(πt)
        for t in [0.3, 1.0, 5.0, 30.0, 100.0, 200.0] {
            let lg = ln_gamma(c(0.5, t)).unwrap();
            let want = 0.5 * (PI.ln() - (PI * t).cosh().ln());
            assert!((lg.re - want).abs() < 1e-12 * want.abs().max(1.0), "t={t}");
        }
    }

    #[test]
    fn recurrence_and_conjugation() {
        for re in [0.5, 0.75, 1.3, 2.0, 3.0] {
            for im in [-150.0, -7.5, 0.0, 2.0, 40.0, 199.0] {
                let s = c(re, im);
                let a = ln_gamma(s + 1.0).unwrap();
                let b = ln_gamma(s).unwrap() + s.ln();
                let d = (a - b).exp();
                assert!((d - 1.0).norm() < 1e-12, "{s}");
                let conj = ln_gamma(s.conj()).unwrap();
                assert!((conj - ln_gamma(s).unwrap().conj()).norm() < 1e-12);
            }
        }
    }
}
