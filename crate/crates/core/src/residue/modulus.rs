use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::zi::{factor_u64, Factorization, GaussInt};

use super::ring::ResidueRing;

/// Default upper bound on `N(q)` for [`Modulus::build`].
pub const DEFAULT_NORM_BOUND: u64 = 100_000;

const NOT_A_UNIT: u32 = u32::MAX;

/// Cyclic decomposition of `(Z[i]/(q))*`.
///
/// `orders` is non-increasing and each order divides the previous one, so
/// `orders[0]` is the exponent of the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroupBasis {
    pub generators: Vec<GaussInt>,
    pub orders: Vec<u32>,
}

/// A primary odd modulus with its unit group tables.
///
/// Units are addressed by a *flat index*: the mixed-radix encoding of the
/// exponent vector against the basis, last generator fastest. Flat order is
/// therefore lexicographic order of exponent vectors.
#[derive(Debug)]
pub struct Modulus {
    q: GaussInt,
    factorization: Factorization,
    ring: ResidueRing,
    basis: UnitGroupBasis,
    /// ring index -> flat index (or `NOT_A_UNIT`)
    flat_of: Vec<u32>,
    /// flat index -> ring index
    ring_of: Vec<u32>,
    /// per prime of q: generators (flat indices) of the kernel of reduction to q/ϖ
    kernel_gens: Vec<Vec<u32>>,
    exponent: u32,
    roots: Vec<Complex64>,
}

impl Modulus {
    pub fn build(q: GaussInt) -> Result<Arc<Self>> {
        Self::build_bounded(q, DEFAULT_NORM_BOUND)
    }

    pub fn build_bounded(q: GaussInt, bound: u64) -> Result<Arc<Self>> {
        let norm = q.norm()?;
        if norm > bound {
            return Err(Error::BoundExceeded { norm, bound });
        }
        if !q.is_primary() {
            return Err(Error::NotPrimary(q));
        }
        let factorization = Factorization::of(q)?;
        let ring = ResidueRing::new(q);
        let primes: Vec<GaussInt> = factorization.factors.iter().map(|f| f.0).collect();
        let n = ring.size();
        let is_unit: Vec<bool> = (0..n)
            .map(|idx| {
                let z = ring.element(idx);
                primes.iter().all(|p| !p.divides(z))
            })
            .collect();
        let phi = is_unit.iter().filter(|&&u| u).count();
        debug_assert_eq!(phi as u64, factorization.euler_phi());

        let (basis, ring_of) = decompose(&ring, &is_unit, phi);
        let mut flat_of = vec![NOT_A_UNIT; n];
        for (flat, &r) in ring_of.iter().enumerate() {
            flat_of[r as usize] = flat as u32;
        }
        let exponent = basis.orders.first().copied().unwrap_or(1);
        let roots = (0..exponent)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / exponent as f64;
                Complex64::new(t.cos(), t.sin())
            })
            .collect();

        let mut m = Modulus {
            q,
            factorization,
            ring,
            basis,
            flat_of,
            ring_of,
            kernel_gens: Vec::new(),
            exponent,
            roots,
        };
        m.kernel_gens = primes.iter().map(|&p| m.kernel_generators(p)).collect();
        Ok(Arc::new(m))
    }

    pub fn q(&self) -> GaussInt {
        self.q
    }

    pub fn norm(&self) -> u64 {
        self.ring.size() as u64
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    pub fn basis(&self) -> &UnitGroupBasis {
        &self.basis
    }

    /// `φ(q)`, the order of the unit group.
    pub fn phi(&self) -> usize {
        self.ring_of.len()
    }

    /// Exponent of the unit group; character values are `exponent`-th roots of unity.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub(crate) fn root(&self, phase: u32) -> Complex64 {
        self.roots[phase as usize]
    }

    pub(crate) fn kernel_gens(&self) -> &[Vec<u32>] {
        &self.kernel_gens
    }

    /// Flat index of the class of `z`, if it is a unit.
    #[inline]
    pub fn flat_index(&self, z: GaussInt) -> Option<usize> {
        let f = self.flat_of[self.ring.index(z)];
        (f != NOT_A_UNIT).then_some(f as usize)
    }

    /// Representative (in the Hermite box) of the unit with flat index `flat`.
    pub fn unit_element(&self, flat: usize) -> GaussInt {
        self.ring.element(self.ring_of[flat] as usize)
    }

    /// Decode a flat index into its exponent vector.
    pub fn digits(&self, mut flat: usize) -> Vec<u32> {
        let mut out = vec![0; self.basis.orders.len()];
        for (slot, &o) in out.iter_mut().zip(&self.basis.orders).rev() {
            *slot = (flat % o as usize) as u32;
            flat /= o as usize;
        }
        out
    }

    pub fn flat_from_digits(&self, digits: &[u32]) -> usize {
        digits
            .iter()
            .zip(&self.basis.orders)
            .fold(0usize, |acc, (&d, &o)| acc * o as usize + (d % o) as usize)
    }

    /// Flat index of `u_a / u_b`: digit-wise subtraction.
    #[inline]
    pub fn flat_quotient(&self, mut a: usize, mut b: usize) -> usize {
        let mut out = 0usize;
        let mut place = 1usize;
        for &o in self.basis.orders.iter().rev() {
            let o = o as usize;
            let (da, db) = (a % o, b % o);
            a /= o;
            b /= o;
            out += ((da + o - db) % o) * place;
            place *= o;
        }
        out
    }

    /// Discrete logarithm of `z` against the basis.
    pub fn dlog(&self, z: GaussInt) -> Option<Vec<u32>> {
        self.flat_index(z).map(|f| self.digits(f))
    }

    /// Whether `z` is a unit mod `q`.
    pub fn is_coprime(&self, z: GaussInt) -> bool {
        self.flat_index(z).is_some()
    }

    fn kernel_generators(&self, prime: GaussInt) -> Vec<u32> {
        let lower = prime.exact_div_of(self.q).expect("prime divides q");
        let small = ResidueRing::new(prime);
        let members: Vec<usize> = (0..small.size())
            .filter_map(|t| {
                let x = GaussInt::ONE + lower * small.element(t);
                self.flat_index(x).map(|_| self.ring.index(x))
            })
            .collect();
        let mut in_sub = vec![false; self.ring.size()];
        let one = self.ring.index(GaussInt::ONE);
        in_sub[one] = true;
        let mut sub = vec![one];
        let mut gens = Vec::new();
        for &x in &members {
            if in_sub[x] {
                continue;
            }
            gens.push(self.flat_of[x]);
            let mut grown = sub.clone();
            let mut power = x;
            while !in_sub[power] {
                for &h in &sub {
                    let y = self.ring.mul(power, h);
                    if !in_sub[y] {
                        in_sub[y] = true;
                        grown.push(y);
                    }
                }
                power = self.ring.mul(power, x);
            }
            sub = grown;
        }
        debug_assert_eq!(sub.len(), members.len());
        gens
    }
}

/// Peel off cyclic factors: repeatedly take an element of maximal order in
/// the quotient by the subgroup built so far, correct it to have that order
/// in the full group, and extend the subgroup table.
fn decompose(ring: &ResidueRing, is_unit: &[bool], phi: usize) -> (UnitGroupBasis, Vec<u32>) {
    let n = ring.size();
    let one = ring.index(GaussInt::ONE);
    // coords[ring idx] = flat index inside the current subgroup H
    let mut coords = vec![NOT_A_UNIT; n];
    coords[one] = 0;
    let mut members: Vec<u32> = vec![one as u32];
    let mut generators = Vec::new();
    let mut orders: Vec<u32> = Vec::new();
    let units: Vec<usize> = (0..n).filter(|&i| is_unit[i]).collect();

    while members.len() < phi {
        let quotient = (phi / members.len()) as u64;
        let qprimes: Vec<u64> = factor_u64(quotient).into_iter().map(|(p, _)| p).collect();
        let in_h = |i: usize| coords[i] != NOT_A_UNIT;
        let mut best: Option<(u64, usize)> = None;
        for &x in &units {
            if in_h(x) {
                continue;
            }
            let mut ord = quotient;
            for &p in &qprimes {
                while ord.is_multiple_of(p) && in_h(ring.pow(x, ord / p)) {
                    ord /= p;
                }
            }
            if best.is_none_or(|(o, _)| ord > o) {
                best = Some((ord, x));
                if ord == quotient {
                    break;
                }
            }
        }
        let (m, x) = best.expect("quotient is non-trivial");
        // x^m lies in H; divide its coordinates by m to get the correction
        let xm = ring.pow(x, m);
        let mut flat = coords[xm] as u64;
        let mut correction = one;
        for (k, &o) in orders.iter().enumerate().rev() {
            let t = flat % o as u64;
            flat /= o as u64;
            debug_assert_eq!(t % m, 0);
            let g = generators[k];
            let step = ring.pow(g, (o as u64 - t / m) % o as u64);
            correction = ring.mul(correction, step);
        }
        let g = ring.mul(x, correction);
        let mut next = Vec::with_capacity(members.len() * m as usize);
        for &h in &members {
            let mut y = h as usize;
            for _ in 0..m {
                next.push(y as u32);
                y = ring.mul(y, g);
            }
        }
        for (f, &y) in next.iter().enumerate() {
            coords[y as usize] = f as u32;
        }
        members = next;
        generators.push(g);
        orders.push(m as u32);
    }
    let basis = UnitGroupBasis {
        generators: generators.iter().map(|&g| ring.element(g)).collect(),
        orders,
    };
    (basis, members)
}
