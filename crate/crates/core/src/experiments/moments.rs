use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::hecke::{gauss_weights, lift_family, GaussCache, HeckeCharacter};
use crate::kernels::v_unchecked;
use crate::lvalues::{afe_bounds, AfeBuckets, PairBuckets};
use crate::residue::{build_modulus, psi_star_of, DivisorSums, Modulus, Parity};
use crate::zi::{primary_elements_sorted, GaussInt};

use super::ExperimentRow;

/// The primitive odd characters mod `q`, lifted, with their Gauss sums.
#[derive(Clone, Debug)]
pub struct Family {
    modulus: Arc<Modulus>,
    characters: Vec<HeckeCharacter>,
    psi_star: u64,
}

impl Family {
    pub fn new(q: GaussInt, cache: Option<&GaussCache>) -> Result<Self> {
        let modulus = build_modulus(q)?;
        let characters = lift_family(&modulus, cache)?;
        let psi_star = psi_star_of(modulus.factorization());
        debug_assert_eq!(psi_star as usize, characters.len());
        Ok(Family {
            modulus,
            characters,
            psi_star,
        })
    }

    pub fn modulus(&self) -> &Arc<Modulus> {
        &self.modulus
    }

    pub fn characters(&self) -> &[HeckeCharacter] {
        &self.characters
    }

    pub fn psi_star(&self) -> u64 {
        self.psi_star
    }

    fn norm(&self) -> f64 {
        self.modulus.norm() as f64
    }

    /// `L(½, χ̃)` for every member at `x = N(q)`, in character order.
    pub fn central_values(&self) -> Result<Vec<Complex64>> {
        let afe = AfeBuckets::new(&self.modulus, self.norm())?;
        Ok(self
            .characters
            .par_iter()
            .map(|c| afe.central_value(c).value)
            .collect())
    }

    /// `A(χ̃)` for every member, in character order.
    pub fn a_values(&self) -> Result<Vec<f64>> {
        let pairs = PairBuckets::new(&self.modulus)?;
        Ok(self.characters.par_iter().map(|c| pairs.a_chi(c)).collect())
    }
}

/// `Σ* L(½, χ̃)` against `ψ*(q)/2`.
pub fn first_moment(family: &Family) -> Result<ExperimentRow> {
    let start = Instant::now();
    let values = family.central_values()?;
    let stat: Complex64 = values.iter().sum();
    let main = family.psi_star as f64 / 2.0;
    Ok(ExperimentRow::new(
        &family.modulus,
        family.psi_star,
        stat,
        main,
        start.elapsed().as_secs_f64(),
    ))
}

/// `Σ* 2A(χ̃) = Σ* |L(½, χ̃)|²` against `(π/16)(φ(q)/N(q)) ψ*(q) log N(q)`.
pub fn second_moment(family: &Family) -> Result<ExperimentRow> {
    let start = Instant::now();
    let values = family.a_values()?;
    let stat: f64 = values.iter().map(|a| 2.0 * a).sum();
    let n = family.norm();
    let main = PI / 16.0 * (family.modulus.phi() as f64 / n) * family.psi_star as f64 * n.ln();
    Ok(ExperimentRow::new(
        &family.modulus,
        family.psi_star,
        Complex64::new(stat, 0.0),
        main,
        start.elapsed().as_secs_f64(),
    ))
}

/// `Σ* |L(½, χ̃)|²` from the central values directly.
pub fn second_moment_via_l(family: &Family) -> Result<f64> {
    Ok(family.central_values()?.iter().map(|l| l.norm_sqr()).sum())
}

/// Number of members with `|L(½, χ̃)| > threshold`.
pub fn nonvanishing_count(family: &Family, threshold: f64) -> Result<u64> {
    Ok(family
        .central_values()?
        .iter()
        .filter(|l| l.norm() > threshold)
        .count() as u64)
}

/// `Σ* L(½, χ̃)` with the character sum taken inside the AFE: each
/// `Σ* χ(a)` and `Σ* χ(r) conj(χ(a))` is replaced by its divisor-sum value,
/// and the Gauss sum is expanded over units `r` mod `q`.
pub fn first_moment_by_orthogonality(q: GaussInt) -> Result<Complex64> {
    let modulus = build_modulus(q)?;
    let sums = DivisorSums::new(q)?;
    let n = modulus.norm() as f64;
    let x = n;
    let (cut1, cut2) = afe_bounds(modulus.norm(), x)?;
    let scale2 = 32.0 * n / x;
    let weights = gauss_weights(&modulus);
    let units: Vec<GaussInt> = (0..modulus.phi())
        .map(|f| modulus.unit_element(f))
        .collect();

    let mut first = 0.0;
    let mut second = 0.0;
    for a in primary_elements_sorted(cut1.max(cut2)) {
        if !modulus.is_coprime(a) {
            continue;
        }
        let na = a.norm_small();
        let inv_sqrt = (na as f64).sqrt().recip();
        if na <= cut1 {
            first +=
                inv_sqrt * v_unchecked(na as f64 / x) * sums.rhs(a, GaussInt::ONE, Parity::Odd);
        }
        if na <= cut2 {
            let inner: f64 = units
                .iter()
                .zip(&weights)
                .map(|(&r, &w)| w * sums.rhs(r, a, Parity::Odd))
                .sum();
            second += inv_sqrt * v_unchecked(na as f64 / scale2) * inner;
        }
    }
    Ok(Complex64::new(first + second / (8.0 * n).sqrt(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_family_moments() {
        let fam = Family::new(GaussInt::new(-3, 0), None).unwrap();
        assert_eq!(fam.psi_star(), 4);
        let m1 = first_moment(&fam).unwrap();
        assert!(m1.statistic.im.abs() <= 1e-8 * 4.0);
        assert_eq!(m1.main_term, 2.0);
        let m2 = second_moment(&fam).unwrap();
        assert!(m2.statistic.re >= 0.0);
        let via_l = second_moment_via_l(&fam).unwrap();
        assert!((via_l - m2.statistic.re).abs() <= 1e-4 * via_l);
        let count = nonvanishing_count(&fam, 1e-8).unwrap();
        assert!(count <= 4);
    }

    #[test]
    fn orthogonality_route_matches() {
        for q in [
            GaussInt::new(-3, 0),
            GaussInt::new(-1, 2),
            GaussInt::new(3, -6),
            GaussInt::new(9, 0),
            GaussInt::new(11, -10),
        ] {
            let fam = Family::new(q, None).unwrap();
            let direct = first_moment(&fam).unwrap().statistic;
            let swapped = first_moment_by_orthogonality(q).unwrap();
            assert!(
                (direct - swapped).norm() <= 1e-6 * direct.norm(),
                "{q} {direct} {swapped}"
            );
        }
    }
}
