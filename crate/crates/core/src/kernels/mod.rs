//! Smoothing kernels given by vertical-line Mellin integrals
//!
//! ```text
//! V(ξ) = (1/2πi) ∫_(c) Γ(s+½)/Γ(½) (2πξ)^{-s} ds/s
//! W(x) = (1/2πi) ∫_(c) (Γ(s+½)/Γ(½))² (8/(π²x))^{s} ds/s
//! ```
//!
//! `V` has the closed form `erfc(√(2πξ))`; `W` is computed by trapezoidal
//! quadrature and tabulated for the hot loops.

mod gamma;
mod table;

pub use gamma::{gamma, ln_gamma};

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

use table::ChebTable;

/// Default absolute accuracy of kernel evaluations.
pub const DEFAULT_TARGET: f64 = 1e-10;

/// Hard cap on the truncation height `|Im s|`.
pub const MAX_HEIGHT: f64 = 200.0;

/// Line used left of the pole at `s = 0` when `y < 1`.
const LEFT_LINE: f64 = -0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    V,
    W,
}

impl KernelKind {
    /// Power of `Γ(s+½)/Γ(½)` in the integrand.
    fn gamma_power(self) -> f64 {
        match self {
            KernelKind::V => 1.0,
            KernelKind::W => 2.0,
        }
    }

    /// `y` with the integrand written as `G(s)^k y^{-s} / s`.
    fn scale(self, x: f64) -> f64 {
        match self {
            KernelKind::V => 2.0 * PI * x,
            KernelKind::W => PI * PI * x / 8.0,
        }
    }
}

/// Parameters and result of one contour evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contour {
    pub value: f64,
    pub c: f64,
    pub step: f64,
    pub height: f64,
    pub nodes: usize,
}

/// Vertical-line quadrature for `V` or `W`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelEvaluator {
    pub kind: KernelKind,
    pub target_abs_error: f64,
}

impl KernelEvaluator {
    pub fn new(kind: KernelKind) -> Self {
        KernelEvaluator {
            kind,
            target_abs_error: DEFAULT_TARGET,
        }
    }

    pub fn with_target(kind: KernelKind, target_abs_error: f64) -> Self {
        KernelEvaluator {
            kind,
            target_abs_error,
        }
    }

    /// Line chosen by [`KernelEvaluator::eval`]: left of the pole for small
    /// arguments (where `y^{-c}` would amplify rounding), `c = 1` otherwise.
    pub fn default_line(&self, x: f64) -> f64 {
        if self.kind.scale(x) < 1.0 {
            LEFT_LINE
        } else {
            1.0
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(1.0);
        }
        Ok(self.contour(x, self.default_line(x))?.value)
    }

    /// Integral along `Re s = c`; for `-½ < c < 0` the residue at `s = 0`
    /// is added so the result is the same function.
    pub fn contour(&self, x: f64, c: f64) -> Result<Contour> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!(
                "kernel argument {x} must be positive"
            )));
        }
        if !(c > -0.5) || c == 0.0 {
            return Err(Error::Domain(format!("line Re s = {c} crosses a pole")));
        }
        let k = self.kind.gamma_power();
        let ln_y = self.kind.scale(x).ln();
        let ln_g_half = ln_gamma(Complex64::new(0.5, 0.0))?.re;
        let integrand = |s: Complex64| -> Result<Complex64> {
            let lg = (ln_gamma(s + 0.5)? - ln_g_half) * k - s * ln_y;
            Ok(lg.exp() / s)
        };

        // strip of analyticity around the line, kept clear of the poles
        let d = if c > 0.0 { c } else { (-c).min(c + 0.5) };
        let d = 0.8 * d;
        let edge = [c - d, c + d]
            .iter()
            .map(|&r| integrand(Complex64::new(r, 0.0)).map(|v| v.norm()))
            .collect::<Result<Vec<_>>>()?;
        let amp = edge.iter().cloned().fold(1.0, f64::max);
        let eps = self.target_abs_error * 1e-2;
        let step = 2.0 * PI * d / ((1.0 / eps).ln() + amp.ln() + 3.0);

        let f0 = integrand(Complex64::new(c, 0.0))?;
        let mut acc = 0.0;
        let mut j = 1usize;
        let mut small_run = 0;
        let tail = eps * PI / step;
        loop {
            let t = j as f64 * step;
            if t > MAX_HEIGHT {
                return Err(Error::Quadrature {
                    target: self.target_abs_error,
                    estimate: tail,
                });
            }
            let f = integrand(Complex64::new(c, t))?;
            acc += f.re;
            if f.norm() < tail {
                small_run += 1;
                if small_run >= 4 {
                    break;
                }
            } else {
                small_run = 0;
            }
            j += 1;
        }
        let mut value = step / (2.0 * PI) * (f0.re + 2.0 * acc);
        if c < 0.0 {
            value += 1.0;
        }
        Ok(Contour {
            value,
            c,
            step,
            height: j as f64 * step,
            nodes: 2 * j + 1,
        })
    }
}

/// `V(ξ) = erfc(√(2πξ))`, with `V(0) = 1`.
pub fn eval_v(xi: f64) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(Error::Domain(format!(
            "V({xi}) needs a non-negative argument"
        )));
    }
    Ok(v_unchecked(xi))
}

#[inline]
pub(crate) fn v_unchecked(xi: f64) -> f64 {
    libm::erfc((2.0 * PI * xi).sqrt())
}

/// Contour value of `V`, independent of the closed form.
pub fn eval_v_contour(xi: f64, c: f64) -> Result<f64> {
    Ok(KernelEvaluator::with_target(KernelKind::V, 1e-12)
        .contour(xi, c)?
        .value)
}

/// Smallest and largest arguments covered by the `W` table.
pub const W_TABLE_RANGE: (f64, f64) = (1e-8, 1000.0);

fn w_table() -> &'static ChebTable {
    static TABLE: OnceLock<ChebTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let ev = KernelEvaluator::with_target(KernelKind::W, 1e-13);
        ChebTable::build(W_TABLE_RANGE.0.ln(), W_TABLE_RANGE.1.ln(), 0.5, 18, |u| {
            ev.eval(u.exp()).expect("W quadrature on the table range")
        })
    })
}

/// `W(x)`, from the table inside [`W_TABLE_RANGE`] and by quadrature outside.
pub fn eval_w(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("W({x}) needs a positive argument")));
    }
    if x >= W_TABLE_RANGE.0 && x <= W_TABLE_RANGE.1 {
        Ok(w_table().eval(x.ln()))
    } else {
        KernelEvaluator::new(KernelKind::W).eval(x)
    }
}

/// `W(x)` by quadrature only.
pub fn eval_w_contour(x: f64, c: f64) -> Result<f64> {
    Ok(KernelEvaluator::with_target(KernelKind::W, 1e-12)
        .contour(x, c)?
        .value)
}

#[inline]
pub(crate) fn w_unchecked(x: f64) -> f64 {
    if x <= W_TABLE_RANGE.1 {
        w_table().eval(x.max(W_TABLE_RANGE.0).ln())
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    #[test]
    fn v_limits_and_decay() {
        assert_eq!(eval_v(0.0).unwrap(), 1.0);
        assert!((eval_v(1e-12).unwrap() - 1.0).abs() < 1e-5);
        assert!(eval_v(10.0).unwrap() <= (-10f64).exp());
        assert!(eval_v(-1.0).is_err());
    }

    #[test]
    fn v_closed_form_matches_contour() {
        let direct = eval_v_contour(1.0, 2.0).unwrap();
        assert!((direct - eval_v(1.0).unwrap()).abs() < 1e-9);
        let ev = KernelEvaluator::with_target(KernelKind::V, 1e-12);
        for xi in log_grid(1e-4, 30.0, 50) {
            let q = ev.contour(xi, ev.default_line(xi)).unwrap().value;
            assert!((q - eval_v(xi).unwrap()).abs() < 1e-9, "xi={xi}");
        }
    }

    #[test]
    fn v_monotone_and_tail_bound() {
        let mut prev = 1.0;
        for i in 1..=500 {
            let xi = i as f64 * 0.1;
            let v = eval_v(xi).unwrap();
            assert!(v > 0.0 && v <= prev);
            if xi >= 2.0 {
                assert!(v <= (-xi).exp());
            }
            prev = v;
        }
    }

    #[test]
    fn w_contour_shift_independence() {
        for x in log_grid(1e-2, 1e2, 30) {
            let vals: Vec<f64> = [0.8, 1.0, 2.0]
                .iter()
                .map(|&c| eval_w_contour(x, c).unwrap())
                .collect();
            for v in &vals[1..] {
                assert!((v - vals[0]).abs() < 1e-9, "x={x} {vals:?}");
            }
            let left = eval_w_contour(x, -0.25).unwrap();
            assert!((left - vals[0]).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn w_limits() {
        // W(x) = (2/π) ∫_y^∞ K0(2√t) t^{-1/2} dt with y = π²x/8, evaluated in mpmath
        let oracle = [
            (1e-8, 0.998_652_520_964_849_1),
            (1e-6, 0.989_781_552_376_848_6),
            (1e-2, 0.627_703_727_863_923_8),
            (1.0, 0.047_759_993_923_309_93),
            (10.0, 0.000_248_058_659_004_225_16),
            (100.0, 3.710_659_784_054_139e-11),
        ];
        for (x, w) in oracle {
            assert!((eval_w(x).unwrap() - w).abs() < 1e-12, "x={x}");
        }
        // leading correction 1 + (√y/π)(2 ln y − 4 + 4γ) at small x
        let y = PI * PI * 1e-10 / 8.0;
        let approx = 1.0 + y.sqrt() / PI * (2.0 * y.ln() - 4.0 + 4.0 * 0.5772156649015329);
        assert!((eval_w(1e-10).unwrap() - approx).abs() < 1e-7);
        assert!((eval_w(1e-8).unwrap() - 1.0).abs() < 1e-2);
        assert!(eval_w(100.0).unwrap() <= 1e-3);
        assert!(eval_w(0.0).is_err());
        let w1 = eval_w_contour(1.0, 1.0).unwrap();
        assert!((w1 - eval_w_contour(1.0, 2.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn w_table_matches_quadrature() {
        for x in log_grid(1.3e-8, 900.0, 157) {
            let t = eval_w(x).unwrap();
            let q = eval_w_contour(x, KernelEvaluator::new(KernelKind::W).default_line(x)).unwrap();
            assert!((t - q).abs() < 1e-10, "x={x} table={t} quad={q}");
        }
    }

    #[test]
    fn w_is_decreasing() {
        let mut prev = 1.0 + 1e-12;
        for x in log_grid(1e-8, 1000.0, 400) {
            let w = eval_w(x).unwrap();
            assert!(w <= prev + 1e-12, "x={x}");
            prev = w;
        }
    }
}
