use crate::error::{Error, Result};

use super::{isqrt, primary_decompose, GaussInt};

/// Factorization of an odd Gaussian integer into primary primes.
///
/// `unit · Π primeᵉ` reconstructs the input; primes are pairwise
/// non-associate and sorted by `(norm, re, im)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: GaussInt,
    pub factors: Vec<(GaussInt, u32)>,
}

impl Factorization {
    pub fn of(z: GaussInt) -> Result<Self> {
        let n = z.norm()?;
        if n == 0 {
            return Err(Error::Zero);
        }
        if n % 2 == 0 {
            return Err(Error::Even(z));
        }
        let mut rest = z;
        let mut factors = Vec::new();
        for (p, e) in factor_u64(n) {
            if p % 4 == 3 {
                // inert: (p) is prime, and p^(2k) || N(z)
                let prime = GaussInt::from_int(-(p as i64));
                let k = e / 2;
                for _ in 0..k {
                    rest = prime.exact_div_of(rest).expect("inert prime must divide");
                }
                factors.push((prime, k));
            } else {
                let (a, b) = two_squares(p);
                let (_, pi) = primary_decompose(GaussInt::new(a as i64, b as i64))?;
                for prime in [pi, pi.conj()] {
                    let mut k = 0;
                    while let Some(next) = prime.exact_div_of(rest) {
                        rest = next;
                        k += 1;
                    }
                    if k > 0 {
                        factors.push((prime, k));
                    }
                }
            }
        }
        debug_assert!(rest.is_unit(), "leftover {rest} after factoring");
        factors.sort_by(|x, y| x.0.cmp_canonical(&y.0));
        Ok(Factorization {
            unit: rest,
            factors,
        })
    }

    pub fn reconstruct(&self) -> Option<GaussInt> {
        let mut acc = self.unit;
        for &(p, e) in &self.factors {
            acc = acc.checked_mul(p.checked_pow(e)?)?;
        }
        Some(acc)
    }

    /// Primary generator of the ideal.
    pub fn primary_part(&self) -> GaussInt {
        self.factors.iter().fold(GaussInt::ONE, |acc, &(p, e)| {
            acc * p.checked_pow(e).expect("overflow")
        })
    }

    pub fn mobius(&self) -> i64 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| {
                let np = p.norm_small();
                np.pow(e - 1) * (np - 1)
            })
            .product()
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn norm(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.norm_small().pow(e))
            .product()
    }

    pub fn primary_divisors(&self) -> Vec<GaussInt> {
        let mut divs = vec![GaussInt::ONE];
        for &(p, e) in &self.factors {
            let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
            for &d in &divs {
                let mut pk = GaussInt::ONE;
                for _ in 0..=e {
                    next.push(d * pk);
                    pk = pk * p;
                }
            }
            divs = next;
        }
        divs.sort_by(GaussInt::cmp_canonical);
        divs
    }

    /// `Some(ϖ)` when the ideal is a power `ϖ^k`, `k >= 1`.
    pub fn prime_power_base(&self) -> Option<GaussInt> {
        match self.factors.as_slice() {
            [(p, _)] => Some(*p),
            _ => None,
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// Brent's variant of Pollard rho; n must be composite and odd.
fn rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = 0u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Prime factorization of a rational integer, ascending by prime.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    let mut p = 3;
    while p < 1000 && p * p <= n {
        push(p, &mut n);
        p += 2;
    }
    let mut stack = vec![];
    if n > 1 {
        stack.push(n);
    }
    let mut big = Vec::new();
    while let Some(m) = stack.pop() {
        if m < 1_000_000 || is_prime_u64(m) {
            // below 10^6 every cofactor left after trial division to 1000 is prime
            big.push(m);
        } else {
            let d = rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    big.sort_unstable();
    for p in big {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// A square root of `-1` modulo a prime `p ≡ 1 (mod 4)`, found by raising the
/// smallest quadratic non-residue to the power `(p-1)/4`.
pub fn sqrt_minus_one(p: u64) -> Option<u64> {
    if p % 4 != 1 {
        return None;
    }
    (2..p)
        .find(|&c| pow_mod(c, (p - 1) / 2, p) == p - 1)
        .map(|c| pow_mod(c, (p - 1) / 4, p))
}

/// `(a, b)` with `a² + b² = p`, `a` odd, for a prime `p ≡ 1 (mod 4)`; `(1, 1)` for 2.
///
/// Euclidean descent on `(p, r)` with `r² ≡ -1`: the first remainder below
/// `√p` is one of the two squares.
pub fn two_squares(p: u64) -> (u64, u64) {
    if p == 2 {
        return (1, 1);
    }
    let r = sqrt_minus_one(p).expect("p must be 1 mod 4");
    let root = isqrt(p);
    let (mut a, mut b) = (p, r.min(p - r));
    while b > root {
        (a, b) = (b, a % b);
    }
    let x = b;
    let y = isqrt(p - x * x);
    debug_assert_eq!(x * x + y * y, p);
    if x % 2 == 1 {
        (x, y)
    } else {
        (y, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zi::{euler_phi, factor, mobius, omega, primary_divisors};

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    #[test]
    fn rational_factoring() {
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(45), vec![(3, 2), (5, 1)]);
        assert_eq!(
            factor_u64(1_000_000_007 * 998_244_353),
            vec![(998_244_353, 1), (1_000_000_007, 1)]
        );
        let n = (1u64 << 61) - 1;
        assert!(is_prime_u64(n));
        assert_eq!(factor_u64(n), vec![(n, 1)]);
        // trial division oracle
        for n in 2..5000u64 {
            let prod: u64 = factor_u64(n).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(factor_u64(n)
                .iter()
                .all(|&(p, _)| (2..p).all(|d| p % d != 0)));
        }
    }

    #[test]
    fn two_squares_small_primes() {
        for p in (5..20_000u64).filter(|&p| p % 4 == 1 && is_prime_u64(p)) {
            let (a, b) = two_squares(p);
            assert_eq!(a * a + b * b, p);
            assert_eq!(a % 2, 1);
        }
    }

    #[test]
    fn factor_examples() {
        let f = factor(g(-3, 0)).unwrap();
        assert_eq!(f.unit, GaussInt::ONE);
        assert_eq!(f.factors, vec![(g(-3, 0), 1)]);

        let f = factor(g(9, 0)).unwrap();
        assert_eq!(f.unit, GaussInt::ONE);
        assert_eq!(f.factors, vec![(g(-3, 0), 2)]);

        let f = factor(g(3, -6)).unwrap();
        assert_eq!(f.factors, vec![(g(-1, 2), 1), (g(-3, 0), 1)]);
        assert_eq!(f.reconstruct(), Some(g(3, -6)));
    }

    #[test]
    fn factor_rejects_even_and_zero() {
        assert_eq!(factor(GaussInt::ZERO), Err(Error::Zero));
        assert!(matches!(factor(g(1, 1)), Err(Error::Even(_))));
        assert!(matches!(factor(g(4, 2)), Err(Error::Even(_))));
    }

    #[test]
    fn multiplicative_function_examples() {
        assert_eq!(
            (
                mobius(GaussInt::ONE).unwrap(),
                euler_phi(GaussInt::ONE).unwrap(),
                omega(GaussInt::ONE).unwrap()
            ),
            (1, 1, 0)
        );
        assert_eq!(
            (
                mobius(g(-3, 0)).unwrap(),
                euler_phi(g(-3, 0)).unwrap(),
                omega(g(-3, 0)).unwrap()
            ),
            (-1, 8, 1)
        );
        assert_eq!(
            (
                mobius(g(9, 0)).unwrap(),
                euler_phi(g(9, 0)).unwrap(),
                omega(g(9, 0)).unwrap()
            ),
            (0, 72, 1)
        );
    }

    #[test]
    fn primary_divisor_examples() {
        assert_eq!(
            primary_divisors(GaussInt::ONE).unwrap(),
            vec![GaussInt::ONE]
        );
        assert_eq!(
            primary_divisors(g(-3, 0)).unwrap(),
            vec![GaussInt::ONE, g(-3, 0)]
        );
        assert_eq!(
            primary_divisors(g(9, 0)).unwrap(),
            vec![GaussInt::ONE, g(-3, 0), g(9, 0)]
        );
        assert!(matches!(
            primary_divisors(g(3, 0)),
            Err(Error::NotPrimary(_))
        ));
    }

    /// Brute-force count of residues mod `q` coprime to `q`, with residues
    /// enumerated in the box `[0, N)²` and deduplicated by minimal representative.
    fn brute_phi(q: GaussInt) -> u64 {
        let n = q.norm_small() as i64;
        let mut seen = std::collections::HashSet::new();
        let mut count = 0;
        for a in 0..n {
            for b in 0..n {
                let r = g(a, b).rem_min(q);
                if seen.insert(r) {
                    let coprime =
                        (0..n).any(|x| (0..n).any(|y| q.divides(r * g(x, y) - GaussInt::ONE)));
                    if coprime {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(seen.len() as i64, n);
        count
    }

    #[test]
    fn phi_matches_brute_count() {
        for q in [
            GaussInt::ONE,
            g(-3, 0),
            g(-1, 2),
            g(3, 2),
            g(9, 0),
            g(-3, 6),
        ] {
            assert_eq!(euler_phi(q).unwrap(), brute_phi(q), "{q}");
        }
    }

    #[test]
    fn factor_reconstructs_odd_inputs() {
        for re in -100i64..=100 {
            for im in -100i64..=100 {
                let z = g(re, im);
                if z.is_zero() || !z.is_odd() {
                    continue;
                }
                let f = factor(z).unwrap();
                assert_eq!(f.reconstruct(), Some(z));
                assert!(f.unit.is_unit());
                for w in f.factors.windows(2) {
                    assert!(w[0].0.sort_key() < w[1].0.sort_key());
                }
                for &(p, _) in &f.factors {
                    assert!(p.is_primary());
                    let np = p.norm_small();
                    assert!(is_prime_u64(np) || (isqrt(np).pow(2) == np && isqrt(np) % 4 == 3));
                }
            }
        }
    }
}
