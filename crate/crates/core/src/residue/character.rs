use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::zi::GaussInt;

use super::modulus::Modulus;

/// A character of `(Z[i]/(q))*`, given by its exponent vector against the
/// unit-group basis: `χ(g_j) = e(exponents[j] / orders[j])`.
#[derive(Clone)]
pub struct Character {
    modulus: Arc<Modulus>,
    exponents: Vec<u32>,
    index: usize,
    odd: bool,
    primitive: bool,
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Character")
            .field("q", &self.modulus.q())
            .field("exponents", &self.exponents)
            .field("odd", &self.odd)
            .field("primitive", &self.primitive)
            .finish()
    }
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        self.modulus.q() == other.modulus.q() && self.exponents == other.exponents
    }
}

impl Eq for Character {}

impl Character {
    /// Character with the given exponent vector; components are reduced mod the orders.
    pub fn new(modulus: Arc<Modulus>, exponents: &[u32]) -> Self {
        let orders = &modulus.basis().orders;
        assert_eq!(
            exponents.len(),
            orders.len(),
            "exponent vector has wrong length"
        );
        let exponents: Vec<u32> = exponents.iter().zip(orders).map(|(&e, &o)| e % o).collect();
        let index = modulus.flat_from_digits(&exponents);
        Self::from_parts(modulus, exponents, index)
    }

    /// Character number `index` in lexicographic exponent order.
    pub fn from_index(modulus: Arc<Modulus>, index: usize) -> Self {
        assert!(index < modulus.phi(), "character index out of range");
        let exponents = modulus.digits(index);
        Self::from_parts(modulus, exponents, index)
    }

    fn from_parts(modulus: Arc<Modulus>, exponents: Vec<u32>, index: usize) -> Self {
        let mut c = Character {
            modulus,
            exponents,
            index,
            odd: false,
            primitive: false,
        };
        let minus_one = c.modulus.flat_index(-GaussInt::ONE).expect("-1 is a unit");
        c.odd = c.phase_of_flat(minus_one) != 0;
        c.primitive = c
            .modulus
            .kernel_gens()
            .iter()
            .all(|gens| gens.iter().any(|&g| c.phase_of_flat(g as usize) != 0));
        c
    }

    pub fn modulus(&self) -> &Arc<Modulus> {
        &self.modulus
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Position in the lexicographic enumeration of all characters.
    pub fn index(&self) -> usize {
        self.index
    }

    /// `χ(-1) = -1`.
    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn conj(&self) -> Character {
        let exps: Vec<u32> = self
            .exponents
            .iter()
            .zip(&self.modulus.basis().orders)
            .map(|(&e, &o)| (o - e) % o)
            .collect();
        Character::new(self.modulus.clone(), &exps)
    }

    /// `k` with `χ(unit with flat index f) = e(k / exponent)`.
    pub fn phase_of_flat(&self, mut flat: usize) -> u32 {
        let m = self.modulus.exponent() as u64;
        let mut acc = 0u64;
        for (&e, &o) in self
            .exponents
            .iter()
            .zip(&self.modulus.basis().orders)
            .rev()
        {
            let d = (flat % o as usize) as u64;
            flat /= o as usize;
            acc += e as u64 * (m / o as u64) * d;
        }
        (acc % m) as u32
    }

    /// Phases of all units in flat order.
    pub fn phases(&self) -> Vec<u32> {
        let m = self.modulus.exponent();
        let mut out = vec![0u32];
        for (&e, &o) in self.exponents.iter().zip(&self.modulus.basis().orders) {
            let step = (e as u64 * (m / o) as u64 % m as u64) as u32;
            let mut next = Vec::with_capacity(out.len() * o as usize);
            for &p in &out {
                let mut v = p;
                for _ in 0..o {
                    next.push(v);
                    v = (v + step) % m;
                }
            }
            out = next;
        }
        out
    }

    /// All values `χ(u)` in flat order.
    pub fn values(&self) -> Vec<Complex64> {
        self.phases()
            .into_iter()
            .map(|p| self.modulus.root(p))
            .collect()
    }

    /// `χ(n)`, zero when `n` is not coprime to `q`.
    pub fn eval(&self, n: GaussInt) -> Complex64 {
        match self.modulus.flat_index(n) {
            Some(f) => self.modulus.root(self.phase_of_flat(f)),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// `χ(n)`.
pub fn eval_char(chi: &Character, n: GaussInt) -> Complex64 {
    chi.eval(n)
}

pub fn is_primitive(chi: &Character) -> bool {
    chi.is_primitive()
}

/// Characters mod `q` in lexicographic exponent order, optionally filtered.
pub fn characters(
    modulus: &Arc<Modulus>,
    odd_only: bool,
    primitive_only: bool,
) -> impl Iterator<Item = Character> + '_ {
    (0..modulus.phi())
        .map(move |i| Character::from_index(modulus.clone(), i))
        .filter(move |c| (!odd_only || c.is_odd()) && (!primitive_only || c.is_primitive()))
}

/// The primitive odd characters, the family the moments average over.
pub fn primitive_odd(modulus: &Arc<Modulus>) -> Vec<Character> {
    characters(modulus, true, true).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Parity and primitivity from the full value table, without kernels.
    fn brute_flags(chi: &Character) -> (bool, bool) {
        let m = chi.modulus();
        let q = m.q();
        let odd = (chi.eval(-GaussInt::ONE) + 1.0).norm() < 1e-9;
        let mut primitive = true;
        for &(p, _) in &m.factorization().factors {
            let lower = p.exact_div_of(q).unwrap();
            let trivial_on_kernel = (0..m.phi()).all(|f| {
                let u = m.unit_element(f);
                !lower.divides(u - GaussInt::ONE) || (chi.eval(u) - 1.0).norm() < 1e-9
            });
            if trivial_on_kernel {
                primitive = false;
            }
        }
        (odd, primitive)
    }

    #[test]
    fn counts_for_small_moduli() {
        let m = Modulus::build(GaussInt::new(-3, 0)).unwrap();
        assert_eq!(characters(&m, false, false).count(), 8);
        assert_eq!(characters(&m, false, true).count(), 7);
        assert_eq!(characters(&m, true, true).count(), 4);
        let m = Modulus::build(GaussInt::new(-1, 2)).unwrap();
        assert_eq!(characters(&m, true, true).count(), 2);
        let m = Modulus::build(GaussInt::new(9, 0)).unwrap();
        assert_eq!(characters(&m, false, true).count(), 64);
        let m = Modulus::build(GaussInt::ONE).unwrap();
        let all: Vec<_> = characters(&m, false, false).collect();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_primitive() && !all[0].is_odd());
    }

    #[test]
    fn generator_value() {
        let m = Modulus::build(GaussInt::new(-3, 0)).unwrap();
        let g = m.basis().generators[0];
        let chi = Character::new(m.clone(), &[1]);
        let want = Complex64::from_polar(1.0, std::f64::consts::TAU / 8.0);
        assert_abs_diff_eq!((chi.eval(g) - want).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(chi.eval(GaussInt::ONE), Complex64::new(1.0, 0.0));
        assert_eq!(chi.eval(m.q()), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn flags_match_brute_force() {
        for q in crate::zi::primary_elements(400) {
            let m = Modulus::build(q).unwrap();
            for chi in characters(&m, false, false) {
                assert_eq!(
                    brute_flags(&chi),
                    (chi.is_odd(), chi.is_primitive()),
                    "{q} {:?}",
                    chi.exponents()
                );
            }
        }
    }

    #[test]
    fn multiplicative_and_tabulated() {
        let m = Modulus::build(GaussInt::new(3, -6)).unwrap();
        for chi in characters(&m, false, false).step_by(5) {
            let vals = chi.values();
            for (f, v) in vals.iter().enumerate() {
                let u = m.unit_element(f);
                assert!((v - chi.eval(u)).norm() < 1e-12);
            }
            for a in (0..m.phi()).step_by(3) {
                for b in (0..m.phi()).step_by(4) {
                    let (x, y) = (m.unit_element(a), m.unit_element(b));
                    let lhs = chi.eval(x * y);
                    assert!((lhs - chi.eval(x) * chi.eval(y)).norm() < 1e-12);
                }
            }
            let cj = chi.conj();
            assert_eq!(cj.is_odd(), chi.is_odd());
            assert_eq!(cj.is_primitive(), chi.is_primitive());
        }
    }

    #[test]
    fn table_unitarity() {
        let m = Modulus::build(GaussInt::new(-1, -6)).unwrap();
        let tables: Vec<Vec<Complex64>> =
            characters(&m, false, false).map(|c| c.values()).collect();
        for a in 0..m.phi() {
            for b in (0..m.phi()).step_by(5) {
                let s: Complex64 = tables.iter().map(|t| t[a] * t[b].conj()).sum();
                let want = if a == b { m.phi() as f64 } else { 0.0 };
                assert!((s - want).norm() < 1e-9);
            }
        }
    }
}
