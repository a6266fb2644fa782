use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zi::{isqrt, primary_elements, Factorization, GaussInt};

/// Sample points for [`estimate_c0`].
pub const C0_GRID: [f64; 4] = [1e6, 2e6, 4e6, 1e7];

pub const C0_SPREAD_BOUND: f64 = 1e-3;

/// Largest `x` accepted by the harmonic-sum routines.
const HARMONIC_LIMIT: f64 = 5e7;

/// Exhaustive check over `|re|, |im| <= b` that `N(m+n) >= N(n)` forces
/// `64 N(m+n) >= N(m)`. Returns the first `(m, n)` that fails.
pub fn norm_inequality_scan(b: i64) -> Result<Option<(GaussInt, GaussInt)>> {
    if !(0..=100).contains(&b) {
        return Err(Error::Domain(format!(
            "scan radius must lie in [0, 100], got {b}"
        )));
    }
    let norm = |re: i64, im: i64| re * re + im * im;
    for mr in -b..=b {
        for mi in -b..=b {
            let nm = norm(mr, mi);
            for nr in -b..=b {
                for ni in -b..=b {
                    let s = norm(mr + nr, mi + ni);
                    if s >= norm(nr, ni) && 64 * s < nm {
                        return Ok(Some((GaussInt::new(mr, mi), GaussInt::new(nr, ni))));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// `#{a primary : N(a) <= x}`.
pub fn gauss_circle_primary(x: f64) -> u64 {
    if !(x >= 1.0) {
        return 0;
    }
    let x = x.floor() as u64;
    let r = isqrt(x) as i64;
    let mut count = 0u64;
    for b in (-r..=r).filter(|b| b % 2 == 0) {
        let span = isqrt(x - (b * b) as u64) as i64;
        let c = (1 - b).rem_euclid(4);
        // a in [-span, span] with a ≡ c (mod 4)
        count += ((span - c).div_euclid(4) - (-span - 1 - c).div_euclid(4)) as u64;
    }
    count
}

/// Number of primary elements of each norm up to `bound`.
#[derive(Clone, Debug)]
pub struct PrimaryNormCounts {
    counts: Vec<u32>,
}

impl PrimaryNormCounts {
    pub fn new(bound: u64) -> Self {
        Self::coprime_to(bound, &[])
    }

    /// Only elements divisible by none of `primes`.
    pub fn coprime_to(bound: u64, primes: &[GaussInt]) -> Self {
        let mut counts = vec![0u32; bound as usize + 1];
        for a in primary_elements(bound) {
            if primes.iter().all(|p| !p.divides(a)) {
                counts[a.norm_small() as usize] += 1;
            }
        }
        PrimaryNormCounts { counts }
    }

    pub fn bound(&self) -> u64 {
        (self.counts.len() - 1) as u64
    }

    pub fn count(&self, norm: u64) -> u32 {
        self.counts.get(norm as usize).copied().unwrap_or(0)
    }

    /// `Σ_{N(a) <= x} 1/N(a)` at each `x`, accumulated in increasing norm.
    pub fn harmonic_prefix(&self, xs: &[f64]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
        let mut out = vec![0.0; xs.len()];
        let mut acc = 0.0;
        let mut n = 1usize;
        for i in order {
            let stop = (xs[i].max(0.0).floor() as usize).min(self.counts.len() - 1);
            while n <= stop {
                if self.counts[n] > 0 {
                    acc += self.counts[n] as f64 / n as f64;
                }
                n += 1;
            }
            out[i] = acc;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C0Estimate {
    pub value: f64,
    pub spread: f64,
    pub grid: Vec<f64>,
    /// `Σ_{N(a) <= x} 1/N(a) - (π/8) log x` at each grid point
    pub samples: Vec<f64>,
}

fn c0_raw(grid: &[f64]) -> Result<C0Estimate> {
    let top = grid.iter().copied().fold(0.0, f64::max);
    if grid.is_empty() || !(top <= HARMONIC_LIMIT) || grid.iter().any(|&x| !(x >= 2.0)) {
        return Err(Error::Domain(format!(
            "C0 grid {grid:?} outside [2, {HARMONIC_LIMIT}]"
        )));
    }
    let counts = PrimaryNormCounts::new(top.floor() as u64);
    let samples: Vec<f64> = counts
        .harmonic_prefix(grid)
        .iter()
        .zip(grid)
        .map(|(s, &x)| s - PI / 8.0 * x.ln())
        .collect();
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(C0Estimate {
        value: samples.iter().sum::<f64>() / samples.len() as f64,
        spread: hi - lo,
        grid: grid.to_vec(),
        samples,
    })
}

/// Average of `Σ_{N(a) <= x} 1/N(a) - (π/8) log x` over `grid`; fails when
/// the samples spread by more than [`C0_SPREAD_BOUND`].
pub fn estimate_c0_on(grid: &[f64]) -> Result<C0Estimate> {
    let est = c0_raw(grid)?;
    if est.spread > C0_SPREAD_BOUND {
        return Err(Error::Spread {
            spread: est.spread,
            bound: C0_SPREAD_BOUND,
        });
    }
    Ok(est)
}

/// [`estimate_c0_on`] at [`C0_GRID`], computed once per process.
pub fn estimate_c0() -> Result<C0Estimate> {
    static CELL: OnceLock<Result<C0Estimate>> = OnceLock::new();
    CELL.get_or_init(|| estimate_c0_on(&C0_GRID)).clone()
}

/// `Σ_{N(n) <= x, (n, q) = 1} 1/N(n)` over primary `n`, with its predicted
/// main term using the constant `c0`.
pub fn harmonic_sum_with(x: f64, q: GaussInt, c0: f64) -> Result<(f64, f64)> {
    if !(x >= 2.0) || x > HARMONIC_LIMIT {
        return Err(Error::Domain(format!(
            "harmonic sum needs 2 <= x <= {HARMONIC_LIMIT}, got {x}"
        )));
    }
    let f = Factorization::of(q)?;
    let primes: Vec<GaussInt> = f.factors.iter().map(|&(p, _)| p).collect();
    let counts = PrimaryNormCounts::coprime_to(x.floor() as u64, &primes);
    let value = counts.harmonic_prefix(&[x])[0];
    let local: f64 = f
        .factors
        .iter()
        .map(|&(p, _)| {
            let np = p.norm_small() as f64;
            np.ln() / (np - 1.0)
        })
        .sum();
    let density = f.euler_phi() as f64 / f.norm() as f64;
    let main = density * (PI / 8.0 * x.ln() + c0 + PI / 8.0 * local);
    Ok((value, main))
}

/// [`harmonic_sum_with`] using the estimated constant from [`estimate_c0`].
pub fn harmonic_sum(x: f64, q: GaussInt) -> Result<(f64, f64)> {
    harmonic_sum_with(x, q, estimate_c0()?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scan_small_and_trivial_pairs() {
        assert_eq!(norm_inequality_scan(12).unwrap(), None);
        assert!(norm_inequality_scan(101).is_err());
        for (mr, mi) in [(3, 4), (-7, 2), (0, 9)] {
            let m = GaussInt::new(mr, mi);
            let nm = m.norm_small();
            // n = 0
            assert!(64 * nm >= nm);
            // m = -2n: N(m + n) = N(n) = N(m)/4
            assert!(64 * (nm / 4) >= nm);
        }
    }

    #[test]
    fn circle_counts() {
        assert_eq!(gauss_circle_primary(1.0), 1);
        assert_eq!(gauss_circle_primary(8.0), 3);
        assert_eq!(gauss_circle_primary(0.5), 0);
        for x in [1e3, 1e4, 1e5] {
            let brute = primary_elements(x as u64).count() as u64;
            assert_eq!(gauss_circle_primary(x), brute);
            assert!((brute as f64 - PI * x / 8.0).abs() <= 4.0 * x.sqrt());
        }
    }

    #[test]
    fn prefix_order_free() {
        let c = PrimaryNormCounts::new(5000);
        let a = c.harmonic_prefix(&[100.0, 5000.0, 10.0]);
        let b = c.harmonic_prefix(&[10.0, 100.0, 5000.0]);
        assert_eq!(a, vec![b[1], b[2], b[0]]);
        let brute: f64 = primary_elements(100)
            .map(|z| 1.0 / z.norm_small() as f64)
            .sum();
        assert!((a[0] - brute).abs() < 1e-12);
    }

    #[test]
    fn coprime_sum_is_smaller() {
        let (v1, _) = harmonic_sum_with(1e4, GaussInt::ONE, 0.0).unwrap();
        let (v3, _) = harmonic_sum_with(1e4, GaussInt::new(-3, 0), 0.0).unwrap();
        let (v5, _) = harmonic_sum_with(1e4, GaussInt::new(-1, 2), 0.0).unwrap();
        assert!(v3 < v1 && v5 < v1);
        assert!(harmonic_sum_with(1.0, GaussInt::ONE, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn circle_monotone(x in 1.0f64..5000.0, dx in 0.0f64..100.0) {
            prop_assert!(gauss_circle_primary(x) <= gauss_circle_primary(x + dx));
        }
    }
}
