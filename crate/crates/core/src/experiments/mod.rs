//! Numerical experiments over families of primitive odd characters: moments
//! of central values, non-vanishing counts, the one-level density through
//! its prime sum, and the lattice-point lemmas they rest on.

mod density;
mod lemmas;
mod moments;

pub use density::{
    one_level_density, prime_power_table, s_tilde_direct, s_tilde_orthogonality,
    AdmissibleTestFunction, DensityResult, DensityRoute, PrimePower, PrimePowerTable,
    TestFunctionKind,
};
pub use lemmas::{
    estimate_c0, estimate_c0_on, gauss_circle_primary, harmonic_sum, harmonic_sum_with,
    norm_inequality_scan, C0Estimate, PrimaryNormCounts, C0_GRID, C0_SPREAD_BOUND,
};
pub use moments::{
    first_moment, first_moment_by_orthogonality, nonvanishing_count, second_moment,
    second_moment_via_l, Family,
};

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::residue::Modulus;
use crate::zi::{primary_elements_sorted, Factorization, GaussInt};

/// One modulus of a moment sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub q: GaussInt,
    /// family size, equal to `psi_star`
    pub n_q: u64,
    pub psi_star: u64,
    pub statistic: Complex64,
    pub main_term: f64,
    pub ratio: f64,
    pub wall_time: f64,
}

impl ExperimentRow {
    pub(crate) fn new(
        modulus: &Modulus,
        psi_star: u64,
        statistic: Complex64,
        main_term: f64,
        wall_time: f64,
    ) -> Self {
        let ratio = if main_term != 0.0 {
            statistic.re / main_term
        } else {
            f64::NAN
        };
        ExperimentRow {
            q: modulus.q(),
            n_q: psi_star,
            psi_star,
            statistic,
            main_term,
            ratio,
            wall_time,
        }
    }
}

/// Moments CSV record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub qnorm: u64,
    pub q_re: i64,
    pub q_im: i64,
    pub psi_star: u64,
    pub stat_re: f64,
    pub stat_im: f64,
    pub main_term: f64,
    pub ratio: f64,
    pub wall_s: f64,
}

impl From<&ExperimentRow> for MomentRecord {
    fn from(r: &ExperimentRow) -> Self {
        MomentRecord {
            qnorm: r.q.norm_small(),
            q_re: r.q.re,
            q_im: r.q.im,
            psi_star: r.psi_star,
            stat_re: r.statistic.re,
            stat_im: r.statistic.im,
            main_term: r.main_term,
            ratio: r.ratio,
            wall_s: r.wall_time,
        }
    }
}

/// Density CSV record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub qnorm: u64,
    pub q_re: i64,
    pub q_im: i64,
    pub sigma: f64,
    pub testfn: String,
    pub psi_star: u64,
    pub s_tilde: f64,
    pub density: f64,
    pub wall_s: f64,
}

/// Lemma-check CSV record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub check_name: String,
    pub param: String,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

impl LemmaRow {
    pub fn new(
        check_name: &str,
        param: impl Into<String>,
        observed: f64,
        bound: f64,
        pass: bool,
    ) -> Self {
        LemmaRow {
            check_name: check_name.to_string(),
            param: param.into(),
            observed,
            bound,
            pass,
        }
    }

    /// Row that passes when `observed <= bound`.
    pub fn at_most(check_name: &str, param: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::new(check_name, param, observed, bound, observed <= bound)
    }

    /// Row that passes when `observed >= bound`.
    pub fn at_least(check_name: &str, param: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::new(check_name, param, observed, bound, observed >= bound)
    }
}

/// Primary moduli with `min <= N(q) <= max`, one per ideal, sorted by
/// `(norm, re, im)`. With `primes_only` only prime ideals are kept.
pub fn moduli_in_band(min: u64, max: u64, primes_only: bool) -> Result<Vec<GaussInt>> {
    let mut out = Vec::new();
    for q in primary_elements_sorted(max) {
        let n = q.norm_small();
        if n < min.max(1) {
            continue;
        }
        if primes_only {
            let f = Factorization::of(q)?;
            if !(f.factors.len() == 1 && f.factors[0].1 == 1) {
                continue;
            }
        }
        out.push(q);
    }
    Ok(out)
}

/// Whether `q` is a prime ideal, i.e. composite moduli get flagged in sweeps.
pub fn is_prime_modulus(modulus: &Arc<Modulus>) -> bool {
    let f = modulus.factorization();
    f.factors.len() == 1 && f.factors[0].1 == 1
}

/// Median of each dyadic block `2^k <= key < 2^{k+1}`, in increasing `k`.
pub fn dyadic_medians(points: &[(u64, f64)]) -> Vec<(u32, f64)> {
    let mut blocks: Vec<(u32, Vec<f64>)> = Vec::new();
    let mut sorted: Vec<(u64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    for (key, v) in sorted {
        let k = 63 - key.max(1).leading_zeros();
        match blocks.last_mut() {
            Some((last, vals)) if *last == k => vals.push(v),
            _ => blocks.push((k, vec![v])),
        }
    }
    blocks
        .into_iter()
        .map(|(k, mut vals)| {
            vals.sort_by(f64::total_cmp);
            let n = vals.len();
            let med = if n % 2 == 1 {
                vals[n / 2]
            } else {
                0.5 * (vals[n / 2 - 1] + vals[n / 2])
            };
            (k, med)
        })
        .collect()
}

/// `|a - b| / max(|a|, |b|, 1)`; the floor keeps sums that vanish exactly comparable.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_enumeration() {
        let all = moduli_in_band(1, 50, false).unwrap();
        assert_eq!(all[0], GaussInt::ONE);
        assert!(all.windows(2).all(|w| w[0].sort_key() < w[1].sort_key()));
        assert!(all.iter().all(|q| q.is_primary()));
        let primes = moduli_in_band(2, 50, true).unwrap();
        let norms: Vec<u64> = primes.iter().map(|q| q.norm_small()).collect();
        assert_eq!(
            norms,
            vec![5, 5, 9, 13, 13, 17, 17, 29, 29, 37, 37, 41, 41, 49]
        );
    }

    #[test]
    fn medians_by_block() {
        let pts = [
            (100, 3.0),
            (120, 1.0),
            (127, 2.0),
            (128, 5.0),
            (200, 4.0),
            (256, 0.5),
        ];
        assert_eq!(dyadic_medians(&pts), vec![(6, 2.0), (7, 4.5), (8, 0.5)]);
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0]));
    }
}
