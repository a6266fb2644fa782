use crate::error::{Error, Result};
use crate::zi::{Factorization, GaussInt};

/// Parity of a family of characters, i.e. the common value of `χ(-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `χ(-1)` for characters of this parity.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Number of primitive characters mod `q`.
pub fn psi(q: GaussInt) -> Result<u64> {
    let f = primary_factorization(q)?;
    Ok(psi_of(&f))
}

/// Number of primitive odd characters mod `q`.
pub fn psi_star(q: GaussInt) -> Result<u64> {
    let f = primary_factorization(q)?;
    Ok(psi_star_of(&f))
}

pub(crate) fn psi_of(f: &Factorization) -> u64 {
    f.factors
        .iter()
        .map(|&(p, e)| {
            let n = p.norm_small();
            if e == 1 {
                n - 2
            } else {
                n.pow(e - 2) * (n - 1) * (n - 1)
            }
        })
        .product()
}

pub(crate) fn psi_star_of(f: &Factorization) -> u64 {
    let v = psi_of(f) as i64 - f.mobius();
    (v / 2) as u64
}

fn primary_factorization(q: GaussInt) -> Result<Factorization> {
    if !q.is_primary() {
        return Err(Error::NotPrimary(q));
    }
    Factorization::of(q)
}

/// Primary divisors `d | q` with `q/d` squarefree, weighted by `μ(q/d)·φ(d)`.
#[derive(Clone, Debug)]
pub struct DivisorSums {
    q: GaussInt,
    terms: Vec<(GaussInt, i64)>,
}

impl DivisorSums {
    pub fn new(q: GaussInt) -> Result<Self> {
        let f = primary_factorization(q)?;
        let mut terms = Vec::new();
        for d in f.primary_divisors() {
            let cof = Factorization::of(d.exact_div_of(q).expect("divisor"))?;
            let mu = cof.mobius();
            if mu != 0 {
                let phi = Factorization::of(d)?.euler_phi() as i64;
                terms.push((d, mu * phi));
            }
        }
        Ok(DivisorSums { q, terms })
    }

    pub fn q(&self) -> GaussInt {
        self.q
    }

    pub fn terms(&self) -> &[(GaussInt, i64)] {
        &self.terms
    }

    /// `Σ_{d | q, d | x} μ(q/d) φ(d)`.
    pub fn sum_dividing(&self, x: GaussInt) -> i64 {
        self.terms
            .iter()
            .filter(|(d, _)| d.divides(x))
            .map(|&(_, w)| w)
            .sum()
    }

    /// Sum over the characters of the given parity that are primitive of `χ(n)·conj(χ(m))`,
    /// in divisor-sum form. Both arguments must already be coprime to `q`.
    pub fn rhs(&self, n: GaussInt, m: GaussInt, parity: Parity) -> f64 {
        let plus = self.sum_dividing(n - m) as f64;
        let minus = self.sum_dividing(n + m) as f64;
        0.5 * plus + 0.5 * parity.sign() * minus
    }
}

/// Divisor-sum side of the orthogonality relation for primitive characters
/// of the given parity.
pub fn orthogonality_rhs(q: GaussInt, n: GaussInt, m: GaussInt, parity: Parity) -> Result<f64> {
    let sums = DivisorSums::new(q)?;
    let nm = n.checked_mul(m).ok_or(Error::Overflow)?;
    for &(p, _) in &Factorization::of(q)?.factors {
        if p.divides(nm) {
            return Err(Error::NotCoprime(if p.divides(n) { n } else { m }));
        }
    }
    Ok(sums.rhs(n, m, parity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::{characters, Modulus};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn psi_examples() {
        assert_eq!(psi(GaussInt::new(-3, 0)).unwrap(), 7);
        assert_eq!(psi_star(GaussInt::new(-3, 0)).unwrap(), 4);
        assert_eq!(psi_star(GaussInt::new(-1, 2)).unwrap(), 2);
        assert_eq!(psi(GaussInt::new(9, 0)).unwrap(), 64);
        assert_eq!(psi_star(GaussInt::new(9, 0)).unwrap(), 32);
        assert_eq!(psi(GaussInt::ONE).unwrap(), 1);
        assert_eq!(psi_star(GaussInt::ONE).unwrap(), 0);
        assert!(psi(GaussInt::new(3, 0)).is_err());
    }

    #[test]
    fn rhs_examples() {
        let q = GaussInt::new(-3, 0);
        let one = GaussInt::ONE;
        assert_eq!(orthogonality_rhs(q, one, one, Parity::Odd).unwrap(), 4.0);
        assert_eq!(orthogonality_rhs(q, one, one, Parity::Even).unwrap(), 3.0);
        assert!(matches!(
            orthogonality_rhs(q, q, one, Parity::Odd),
            Err(Error::NotCoprime(_))
        ));
        // n ≢ ±m mod every d > 1 leaves only the d = 1 terms
        let q = GaussInt::new(-1, 2);
        let (n, m) = (GaussInt::new(2, 0), GaussInt::ONE);
        let mu_q = -1.0;
        let want = 0.5 * mu_q - 0.5 * mu_q;
        assert_eq!(orthogonality_rhs(q, n, m, Parity::Odd).unwrap(), want);
    }

    #[test]
    fn psi_star_counts_characters() {
        for q in crate::zi::primary_elements(600).filter(|q| q.norm_small() >= 3) {
            let m = Modulus::build(q).unwrap();
            let count = characters(&m, true, true).count() as u64;
            assert_eq!(count, psi_star(q).unwrap(), "{q}");
            let count = characters(&m, false, true).count() as u64;
            assert_eq!(count, psi(q).unwrap(), "{q}");
        }
    }

    #[test]
    fn rhs_matches_character_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [
            GaussInt::new(-3, 0),
            GaussInt::new(9, 0),
            GaussInt::new(3, -6),
            GaussInt::new(-7, 0),
        ] {
            let m = Modulus::build(q).unwrap();
            let sums = DivisorSums::new(q).unwrap();
            for parity in [Parity::Odd, Parity::Even] {
                let fam: Vec<_> = characters(&m, parity == Parity::Odd, true)
                    .filter(|c| c.is_odd() == (parity == Parity::Odd))
                    .collect();
                for _ in 0..30 {
                    let a = m.unit_element(rng.gen_range(0..m.phi()));
                    let b = m.unit_element(rng.gen_range(0..m.phi()));
                    let direct: num_complex::Complex64 =
                        fam.iter().map(|c| c.eval(a) * c.eval(b).conj()).sum();
                    assert!(
                        (direct - sums.rhs(a, b, parity)).norm() < 1e-9,
                        "{q} {a} {b}"
                    );
                }
            }
        }
    }
}
