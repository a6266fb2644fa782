//! Exact arithmetic in `Z[i]`.
//!
//! Elements are machine-width ([`GaussInt`] holds two `i64`). Norms are
//! accepted up to [`NORM_LIMIT`]; anything larger is reported as
//! [`Error::Overflow`] rather than wrapped.

mod factor;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use factor::{factor_u64, is_prime_u64, sqrt_minus_one, two_squares, Factorization};

/// Largest norm accepted by the checked entry points.
pub const NORM_LIMIT: u64 = 1 << 62;

/// `a + bi` with `a, b ∈ Z`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt::new(0, 0);
    pub const ONE: GaussInt = GaussInt::new(1, 0);
    pub const I: GaussInt = GaussInt::new(0, 1);
    /// `(1+i)^3 = -2 + 2i`.
    pub const ONE_PLUS_I_CUBED: GaussInt = GaussInt::new(-2, 2);
    pub const UNITS: [GaussInt; 4] = [
        GaussInt::new(1, 0),
        GaussInt::new(0, 1),
        GaussInt::new(-1, 0),
        GaussInt::new(0, -1),
    ];

    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    pub const fn from_int(n: i64) -> Self {
        GaussInt { re: n, im: 0 }
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }

    /// `re² + im²`, or [`Error::Overflow`] past [`NORM_LIMIT`].
    pub fn norm(self) -> Result<u64> {
        let n = (self.re as i128).pow(2) + (self.im as i128).pow(2);
        if n > NORM_LIMIT as i128 {
            return Err(Error::Overflow);
        }
        Ok(n as u64)
    }

    /// Norm for values already known to be small.
    #[inline]
    pub(crate) fn norm_small(self) -> u64 {
        (self.re * self.re + self.im * self.im) as u64
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        self.re.abs() + self.im.abs() == 1
    }

    /// Coprime to `1+i`, i.e. odd norm.
    pub fn is_odd(self) -> bool {
        (self.re + self.im).rem_euclid(2) == 1
    }

    /// `z ≡ 1 (mod (1+i)^3)`: imaginary part even and `re + im ≡ 1 (mod 4)`.
    pub fn is_primary(self) -> bool {
        self.im.rem_euclid(2) == 0 && (self.re + self.im).rem_euclid(4) == 1
    }

    pub fn checked_add(self, o: Self) -> Option<Self> {
        Some(GaussInt::new(
            self.re.checked_add(o.re)?,
            self.im.checked_add(o.im)?,
        ))
    }

    pub fn checked_sub(self, o: Self) -> Option<Self> {
        Some(GaussInt::new(
            self.re.checked_sub(o.re)?,
            self.im.checked_sub(o.im)?,
        ))
    }

    pub fn checked_mul(self, o: Self) -> Option<Self> {
        let re = (self.re as i128) * (o.re as i128) - (self.im as i128) * (o.im as i128);
        let im = (self.re as i128) * (o.im as i128) + (self.im as i128) * (o.re as i128);
        Some(GaussInt::new(
            i64::try_from(re).ok()?,
            i64::try_from(im).ok()?,
        ))
    }

    pub fn checked_pow(self, mut e: u32) -> Option<Self> {
        let mut acc = GaussInt::ONE;
        let mut base = self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(base)?;
            }
        }
        Some(acc)
    }

    /// Whether `self` divides `z`.
    pub fn divides(self, z: GaussInt) -> bool {
        if self.is_zero() {
            return z.is_zero();
        }
        let n = (self.re as i128).pow(2) + (self.im as i128).pow(2);
        let (re, im) = mul_conj_wide(z, self);
        re % n == 0 && im % n == 0
    }

    /// `z / self` when the division is exact.
    pub fn exact_div_of(self, z: GaussInt) -> Option<GaussInt> {
        if self.is_zero() {
            return None;
        }
        let n = (self.re as i128).pow(2) + (self.im as i128).pow(2);
        let (re, im) = mul_conj_wide(z, self);
        if re % n != 0 || im % n != 0 {
            return None;
        }
        Some(GaussInt::new(
            i64::try_from(re / n).ok()?,
            i64::try_from(im / n).ok()?,
        ))
    }

    /// Nearest Gaussian integer to `self / d` (halves round up componentwise).
    pub fn div_round(self, d: GaussInt) -> GaussInt {
        assert!(!d.is_zero(), "division by zero in Z[i]");
        let n = (d.re as i128).pow(2) + (d.im as i128).pow(2);
        let (re, im) = mul_conj_wide(self, d);
        let round = |x: i128| (2 * x + n).div_euclid(2 * n);
        GaussInt::new(round(re) as i64, round(im) as i64)
    }

    /// Representative of `self mod q` of minimal norm, ties broken by `(re, im)`.
    pub fn rem_min(self, q: GaussInt) -> GaussInt {
        let k = self.div_round(q);
        let r = self - q * k;
        let mut best = r;
        for (a, b) in [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ] {
            let cand = r + q * GaussInt::new(a, b);
            if (cand.norm_small(), cand.re, cand.im) < (best.norm_small(), best.re, best.im) {
                best = cand;
            }
        }
        best
    }

    /// Deterministic ordering key `(norm, re, im)`.
    pub fn sort_key(self) -> (u64, i64, i64) {
        (self.norm_small(), self.re, self.im)
    }

    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

fn mul_conj_wide(z: GaussInt, d: GaussInt) -> (i128, i128) {
    let (a, b) = (z.re as i128, z.im as i128);
    let (c, e) = (d.re as i128, d.im as i128);
    (a * c + b * e, b * c - a * e)
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: Self) -> Self {
        self.checked_add(o).expect("overflow in Z[i] addition")
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(o).expect("overflow in Z[i] subtraction")
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: Self) -> Self {
        self.checked_mul(o)
            .expect("overflow in Z[i] multiplication")
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> Self {
        GaussInt::new(-self.re, -self.im)
    }
}

impl From<i64> for GaussInt {
    fn from(n: i64) -> Self {
        GaussInt::from_int(n)
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0 {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Accepts `a`, `bi`, `a+bi` and `a-bi`, with `i` alone standing for `1i`.
impl FromStr for GaussInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Domain(format!("cannot parse Gaussian integer from {s:?}"));
        let int = |p: &str| p.parse::<i64>().map_err(|_| bad());
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussInt::new(int(&t)?, 0));
        };
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .last()
            .map(|(k, _)| k);
        let (re, im) = match split {
            Some(k) => (int(&body[..k])?, &body[k..]),
            None => (0, body),
        };
        let im = match im {
            "" | "+" => 1,
            "-" => -1,
            other => int(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(GaussInt::new(re, im))
    }
}

/// `re² + im²`.
pub fn norm(z: GaussInt) -> Result<u64> {
    z.norm()
}

/// Split an odd `z` as `unit · primary`.
pub fn primary_decompose(z: GaussInt) -> Result<(GaussInt, GaussInt)> {
    if z.is_zero() {
        return Err(Error::Zero);
    }
    z.norm()?;
    if !z.is_odd() {
        return Err(Error::Even(z));
    }
    for u in GaussInt::UNITS {
        let p = z * u.conj();
        if p.is_primary() {
            return Ok((u, p));
        }
    }
    unreachable!("every odd Gaussian integer has a primary associate")
}

/// Factor an odd non-zero `z` into primary Gaussian primes.
pub fn factor(z: GaussInt) -> Result<Factorization> {
    Factorization::of(z)
}

/// Möbius function of the ideal `(z)`.
pub fn mobius(z: GaussInt) -> Result<i64> {
    Ok(factor(z)?.mobius())
}

/// Number of invertible residues modulo `z`.
pub fn euler_phi(z: GaussInt) -> Result<u64> {
    Ok(factor(z)?.euler_phi())
}

/// Number of distinct prime ideals dividing `(z)`.
pub fn omega(z: GaussInt) -> Result<usize> {
    Ok(factor(z)?.omega())
}

/// All primary divisors of a primary `q`, sorted by `(norm, re, im)`.
pub fn primary_divisors(q: GaussInt) -> Result<Vec<GaussInt>> {
    if !q.is_primary() {
        return Err(Error::NotPrimary(q));
    }
    Ok(factor(q)?.primary_divisors())
}

/// Primary elements with `N(a) <= bound`, in `(im, re)` scan order.
pub fn primary_elements(bound: u64) -> impl Iterator<Item = GaussInt> {
    let r = isqrt(bound) as i64;
    (-r..=r).filter(|b| b % 2 == 0).flat_map(move |b| {
        // smallest a >= -r with a ≡ 1 - b (mod 4)
        let lo = -r + (1 - b + r).rem_euclid(4);
        (lo..=r)
            .step_by(4)
            .map(move |a| GaussInt::new(a, b))
            .filter(move |z| z.norm_small() <= bound)
    })
}

/// Primary elements with `N(a) <= bound`, sorted by `(norm, re, im)`.
pub fn primary_elements_sorted(bound: u64) -> Vec<GaussInt> {
    let mut v: Vec<GaussInt> = primary_elements(bound).collect();
    v.sort_unstable_by_key(|z| z.sort_key());
    v
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_forms() {
        for (text, re, im) in [
            ("3-6i", 3, -6),
            ("-3", -3, 0),
            ("i", 0, 1),
            ("-i", 0, -1),
            ("-1+2i", -1, 2),
            ("5i", 0, 5),
            (" 7 + i ", 7, 1),
            ("-2-1i", -2, -1),
        ] {
            assert_eq!(
                text.parse::<GaussInt>().unwrap(),
                GaussInt::new(re, im),
                "{text}"
            );
        }
        for text in ["", "3+", "x", "1+2j", "i3"] {
            assert!(text.parse::<GaussInt>().is_err(), "{text}");
        }
    }

    proptest! {
        #[test]
        fn display_roundtrip(re in -1000i64..1000, im in -1000i64..1000) {
            let z = GaussInt::new(re, im);
            prop_assert_eq!(z.to_string().parse::<GaussInt>().unwrap(), z);
        }
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(GaussInt::ZERO).unwrap(), 0);
        assert_eq!(norm(GaussInt::new(-1, 2)).unwrap(), 5);
        assert_eq!(norm(GaussInt::new(3, -6)).unwrap(), 45);
        assert_eq!(
            GaussInt::from_int(-3) * GaussInt::new(-1, 2),
            GaussInt::new(3, -6)
        );
    }

    #[test]
    fn norm_overflow_is_reported() {
        let z = GaussInt::new(1 << 31, 1 << 31);
        assert_eq!(z.norm(), Err(Error::Overflow));
        assert!(GaussInt::new(i64::MAX, 0)
            .checked_mul(GaussInt::new(2, 0))
            .is_none());
    }

    /// Exhaustive associate scan: the primary associate is the unique `u^{-1} z`
    /// with `u^{-1} z - 1` divisible by `(1+i)^3`.
    fn brute_primary(z: GaussInt) -> (GaussInt, GaussInt) {
        let hits: Vec<_> = GaussInt::UNITS
            .iter()
            .map(|&u| (u, z * u.conj()))
            .filter(|&(_, p)| GaussInt::ONE_PLUS_I_CUBED.divides(p - GaussInt::ONE))
            .collect();
        assert_eq!(hits.len(), 1);
        hits[0]
    }

    #[test]
    fn primary_decompose_examples() {
        assert_eq!(
            primary_decompose(GaussInt::ONE).unwrap(),
            (GaussInt::ONE, GaussInt::ONE)
        );
        let three = GaussInt::from_int(3);
        assert_eq!(
            primary_decompose(three).unwrap(),
            (GaussInt::from_int(-1), GaussInt::from_int(-3))
        );
        assert_eq!(
            brute_primary(three),
            (GaussInt::from_int(-1), GaussInt::from_int(-3))
        );
        let z = GaussInt::new(2, 1);
        assert_eq!(
            primary_decompose(z).unwrap(),
            (GaussInt::new(0, -1), GaussInt::new(-1, 2))
        );
        assert_eq!(
            brute_primary(z),
            (GaussInt::new(0, -1), GaussInt::new(-1, 2))
        );
    }

    #[test]
    fn primary_decompose_rejects_even_and_zero() {
        assert_eq!(primary_decompose(GaussInt::ZERO), Err(Error::Zero));
        assert!(matches!(
            primary_decompose(GaussInt::new(1, 1)),
            Err(Error::Even(_))
        ));
        assert!(matches!(
            primary_decompose(GaussInt::from_int(2)),
            Err(Error::Even(_))
        ));
    }

    #[test]
    fn primary_condition_matches_divisibility() {
        for re in -20..=20 {
            for im in -20..=20 {
                let z = GaussInt::new(re, im);
                assert_eq!(
                    z.is_primary(),
                    GaussInt::ONE_PLUS_I_CUBED.divides(z - GaussInt::ONE),
                    "{z}"
                );
            }
        }
    }

    #[test]
    fn rem_min_is_minimal_and_congruent() {
        let q = GaussInt::new(-1, 2);
        for re in -12..=12 {
            for im in -12..=12 {
                let z = GaussInt::new(re, im);
                let r = z.rem_min(q);
                assert!(q.divides(z - r));
                for a in -3..=3 {
                    for b in -3..=3 {
                        let other = r + q * GaussInt::new(a, b);
                        assert!(other.sort_key() >= r.sort_key());
                    }
                }
            }
        }
    }

    #[test]
    fn primary_elements_enumeration() {
        let mut v: Vec<_> = primary_elements(8).collect();
        v.sort_by(GaussInt::cmp_canonical);
        assert_eq!(
            v,
            vec![GaussInt::ONE, GaussInt::new(-1, -2), GaussInt::new(-1, 2)]
        );
        let brute = (-40i64..=40)
            .flat_map(|a| (-40i64..=40).map(move |b| GaussInt::new(a, b)))
            .filter(|z| z.is_primary() && z.norm_small() <= 1000)
            .count();
        assert_eq!(primary_elements(1000).count(), brute);
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in -3000i64..3000, b in -3000i64..3000, c in -3000i64..3000, d in -3000i64..3000) {
            let x = GaussInt::new(a, b);
            let y = GaussInt::new(c, d);
            prop_assert_eq!((x * y).norm().unwrap(), x.norm().unwrap() * y.norm().unwrap());
        }

        #[test]
        fn primary_part_is_unit_invariant(a in -5000i64..5000, b in -5000i64..5000, k in 0usize..4) {
            let z = GaussInt::new(2 * a + 1, 2 * b);
            let (_, p) = primary_decompose(z).unwrap();
            let (u2, p2) = primary_decompose(z * GaussInt::UNITS[k]).unwrap();
            prop_assert_eq!(p, p2);
            prop_assert!(p2.is_primary());
            prop_assert_eq!(u2 * p2, z * GaussInt::UNITS[k]);
        }
    }
}
