//! Central values `L(½, χ̃)` from the approximate functional equation and
//! `A(χ̃)`, the smoothed double sum with `|L(½, χ̃)|² = 2A(χ̃)`.
//!
//! Ideals coprime to `2` are represented by their primary generators, so
//! every sum below runs over primary Gaussian integers.

mod dirichlet;
mod family;

pub use dirichlet::{
    dirichlet_partial, dirichlet_tail_check, odd_ideal_zeta_by_norm, DirichletPartial, SumOrder,
};
pub use family::{AfeBuckets, PairBuckets};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hecke::HeckeCharacter;
use crate::kernels::{v_unchecked, w_unchecked};
use crate::zi::{primary_elements_sorted, GaussInt};

/// The AFE sums stop once the `V` argument passes this value.
pub const V_CUTOFF: f64 = 40.0;

/// `A(χ̃)` keeps pairs with `N(A)N(B) <= PAIR_CUTOFF · N(q)`.
pub const PAIR_CUTOFF: f64 = 200.0;

/// Largest norm any single sum may reach.
pub const MAX_TRUNCATION_NORM: u64 = 50_000_000;

/// `L(½, χ̃)` for one character.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralValue {
    pub q: GaussInt,
    pub exponents: Vec<u32>,
    pub value: Complex64,
    pub x_param: f64,
    /// largest norm reached by either sum
    pub truncation_norm: u64,
    pub est_tail: f64,
}

/// Norm bounds of the two AFE sums at parameter `x`.
pub fn afe_bounds(norm_q: u64, x: f64) -> Result<(u64, u64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "AFE parameter x = {x} must be positive"
        )));
    }
    let first = (V_CUTOFF * x).floor();
    let second = (V_CUTOFF * 32.0 * norm_q as f64 / x).floor();
    let limit = MAX_TRUNCATION_NORM as f64;
    if first > limit || second > limit {
        return Err(Error::Truncation(format!(
            "AFE at x = {x} needs norms up to {}",
            first.max(second)
        )));
    }
    Ok((first as u64, second as u64))
}

/// Bound for `Σ_{N(A) > cut} N(A)^{-½} V(N(A)/scale)` using `V(ξ) <= e^{-ξ}`
/// and at most `π/8 + 1` primary elements per unit of norm.
pub(crate) fn afe_tail(scale: f64, cut: u64) -> f64 {
    let cut = cut.max(1) as f64;
    2.0 * (PI / 8.0 + 1.0) * scale / cut.sqrt() * (-cut / scale).exp()
}

/// Bound for the part of `A(χ̃)` with `N(A)N(B) > cutoff · N(q)`.
pub(crate) fn pair_tail(norm_q: u64, cutoff: f64) -> f64 {
    let n = norm_q as f64;
    let (lo, hi) = (cutoff.ln(), 1000f64.ln());
    let steps = 400;
    let h = (hi - lo) / steps as f64;
    let f = |u: f64| {
        let t = u.exp();
        (n * t + std::f64::consts::E).ln() * t.sqrt() * w_unchecked(t).abs()
    };
    let integral: f64 = (0..=steps)
        .map(|k| {
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            w * f(lo + k as f64 * h)
        })
        .sum::<f64>()
        * h;
    2.0 * (PI / 8.0 + 1.0).powi(2) * n.sqrt() * integral
}

/// `L(½, χ̃)` summed term by term over primary generators.
pub fn l_half(chi: &HeckeCharacter, x: f64) -> Result<CentralValue> {
    let norm_q = chi.modulus().norm();
    let (cut1, cut2) = afe_bounds(norm_q, x)?;
    let scale2 = 32.0 * norm_q as f64 / x;
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    for a in primary_elements_sorted(cut1.max(cut2)) {
        let v = chi.eval_primary(a);
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let n = a.norm_small();
        let inv_sqrt = (n as f64).sqrt().recip();
        if n <= cut1 {
            first += v * inv_sqrt * v_unchecked(n as f64 / x);
        }
        if n <= cut2 {
            second += v.conj() * inv_sqrt * v_unchecked(n as f64 / scale2);
        }
    }
    let root = chi.gauss_sum() / (8.0 * norm_q as f64).sqrt();
    Ok(CentralValue {
        q: chi.q(),
        exponents: chi.base().exponents().to_vec(),
        value: first + root * second,
        x_param: x,
        truncation_norm: cut1.max(cut2),
        est_tail: afe_tail(x, cut1) + afe_tail(scale2, cut2),
    })
}

/// The complex double sum behind [`a_chi`], before taking the real part.
pub fn a_chi_sum(chi: &HeckeCharacter) -> Result<Complex64> {
    let norm_q = chi.modulus().norm();
    let bound = (PAIR_CUTOFF * norm_q as f64).floor() as u64;
    if bound > MAX_TRUNCATION_NORM {
        return Err(Error::Truncation(format!(
            "pair sum needs norms up to {bound}"
        )));
    }
    let terms: Vec<(Complex64, f64)> = primary_elements_sorted(bound)
        .into_iter()
        .filter_map(|a| {
            let v = chi.eval_primary(a);
            (v != Complex64::new(0.0, 0.0)).then(|| (v, a.norm_small() as f64))
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    let nq = norm_q as f64;
    for &(va, na) in &terms {
        let limit = PAIR_CUTOFF * nq / na;
        for &(vb, nb) in terms.iter().take_while(|t| t.1 <= limit) {
            let p = na * nb;
            acc += va * vb.conj() * (p.sqrt().recip() * w_unchecked(p / nq));
        }
    }
    Ok(acc)
}

/// `A(χ̃)`, real by the `(A, B) ↔ (B, A)` symmetry of the summand.
pub fn a_chi(chi: &HeckeCharacter) -> Result<f64> {
    Ok(a_chi_sum(chi)?.re)
}

/// Default AFE parameter: `x = N(q)`.
pub fn default_x(chi: &HeckeCharacter) -> f64 {
    chi.modulus().norm() as f64
}
