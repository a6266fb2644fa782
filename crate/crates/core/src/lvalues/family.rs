use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hecke::HeckeCharacter;
use crate::kernels::{v_unchecked, w_unchecked};
use crate::residue::Modulus;
use crate::zi::primary_elements_sorted;

use super::{afe_bounds, afe_tail, pair_tail, CentralValue, MAX_TRUNCATION_NORM, PAIR_CUTOFF};

/// Primary generators coprime to `q` with `N <= bound`, as `(flat index, norm)`,
/// sorted by `(norm, re, im)`.
fn coprime_primaries(modulus: &Modulus, bound: u64) -> Vec<(usize, u64)> {
    primary_elements_sorted(bound)
        .into_iter()
        .filter_map(|a| modulus.flat_index(a).map(|f| (f, a.norm_small())))
        .collect()
}

fn pair_with_values(chi: &HeckeCharacter, weights: &[f64]) -> Complex64 {
    chi.base()
        .values()
        .iter()
        .zip(weights)
        .map(|(v, &w)| v * w)
        .sum()
}

/// The two AFE sums for a whole modulus, bucketed by the residue class of
/// the summation variable. Evaluating one character is then a sum over
/// `φ(q)` classes.
#[derive(Clone, Debug)]
pub struct AfeBuckets {
    modulus: Arc<Modulus>,
    x: f64,
    first: Vec<f64>,
    second: Vec<f64>,
    truncation_norm: u64,
    est_tail: f64,
}

impl AfeBuckets {
    pub fn new(modulus: &Arc<Modulus>, x: f64) -> Result<Self> {
        let norm_q = modulus.norm();
        let (cut1, cut2) = afe_bounds(norm_q, x)?;
        let scale2 = 32.0 * norm_q as f64 / x;
        let mut first = vec![0.0; modulus.phi()];
        let mut second = vec![0.0; modulus.phi()];
        for (f, n) in coprime_primaries(modulus, cut1.max(cut2)) {
            let inv_sqrt = (n as f64).sqrt().recip();
            if n <= cut1 {
                first[f] += inv_sqrt * v_unchecked(n as f64 / x);
            }
            if n <= cut2 {
                second[f] += inv_sqrt * v_unchecked(n as f64 / scale2);
            }
        }
        Ok(AfeBuckets {
            modulus: modulus.clone(),
            x,
            first,
            second,
            truncation_norm: cut1.max(cut2),
            est_tail: afe_tail(x, cut1) + afe_tail(scale2, cut2),
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn central_value(&self, chi: &HeckeCharacter) -> CentralValue {
        assert_eq!(
            chi.q(),
            self.modulus.q(),
            "character belongs to another modulus"
        );
        let vals = chi.base().values();
        let mut first = Complex64::new(0.0, 0.0);
        let mut second = Complex64::new(0.0, 0.0);
        for ((v, &a), &b) in vals.iter().zip(&self.first).zip(&self.second) {
            first += v * a;
            second += v.conj() * b;
        }
        let root = chi.gauss_sum() / (8.0 * self.modulus.norm() as f64).sqrt();
        CentralValue {
            q: chi.q(),
            exponents: chi.base().exponents().to_vec(),
            value: first + root * second,
            x_param: self.x,
            truncation_norm: self.truncation_norm,
            est_tail: self.est_tail,
        }
    }
}

/// `A(χ̃)` for a whole modulus: the pair weights
/// `(N(A)N(B))^{-½} W(N(A)N(B)/N(q))` accumulated by the class of `A/B` mod `q`.
#[derive(Clone, Debug)]
pub struct PairBuckets {
    modulus: Arc<Modulus>,
    weights: Vec<f64>,
    truncation_norm: u64,
    est_tail: f64,
}

impl PairBuckets {
    pub fn new(modulus: &Arc<Modulus>) -> Result<Self> {
        let nq = modulus.norm() as f64;
        let bound = (PAIR_CUTOFF * nq).floor() as u64;
        if bound > MAX_TRUNCATION_NORM {
            return Err(Error::Truncation(format!(
                "pair sum needs norms up to {bound}"
            )));
        }
        let terms = coprime_primaries(modulus, bound);
        let mut weights = vec![0.0; modulus.phi()];
        for &(fa, na) in &terms {
            let na = na as f64;
            let limit = PAIR_CUTOFF * nq / na;
            for &(fb, nb) in terms.iter().take_while(|t| t.1 as f64 <= limit) {
                let p = na * nb as f64;
                weights[modulus.flat_quotient(fa, fb)] += p.sqrt().recip() * w_unchecked(p / nq);
            }
        }
        Ok(PairBuckets {
            modulus: modulus.clone(),
            weights,
            truncation_norm: bound,
            est_tail: pair_tail(modulus.norm(), PAIR_CUTOFF),
        })
    }

    pub fn truncation_norm(&self) -> u64 {
        self.truncation_norm
    }

    pub fn est_tail(&self) -> f64 {
        self.est_tail
    }

    /// `Σ_t χ(t) D_t` before taking the real part.
    pub fn a_chi_sum(&self, chi: &HeckeCharacter) -> Complex64 {
        assert_eq!(
            chi.q(),
            self.modulus.q(),
            "character belongs to another modulus"
        );
        pair_with_values(chi, &self.weights)
    }

    pub fn a_chi(&self, chi: &HeckeCharacter) -> f64 {
        self.a_chi_sum(chi).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::lift_family;
    use crate::lvalues::{a_chi_sum, l_half};
    use crate::residue::build_modulus;
    use crate::zi::GaussInt;

    #[test]
    fn buckets_match_direct_sums() {
        for q in [
            GaussInt::new(-3, 0),
            GaussInt::new(3, -6),
            GaussInt::new(-7, 0),
            GaussInt::new(9, 0),
        ] {
            let m = build_modulus(q).unwrap();
            let afe = AfeBuckets::new(&m, m.norm() as f64).unwrap();
            let pairs = PairBuckets::new(&m).unwrap();
            for chi in lift_family(&m, None).unwrap().iter().step_by(3) {
                let direct = l_half(chi, m.norm() as f64).unwrap();
                let bucket = afe.central_value(chi);
                assert!((direct.value - bucket.value).norm() < 1e-11, "{q}");
                let a = a_chi_sum(chi).unwrap();
                let b = pairs.a_chi_sum(chi);
                assert!((a - b).norm() < 1e-10, "{q} {a} {b}");
                assert!(b.im.abs() < 1e-10);
            }
        }
    }
}
