//! The lift `χ̃` of a primitive odd character mod `q` to a Hecke character
//! mod `(1+i)^3 q` that is trivial on units, and its Gauss sum.

mod cache;

pub use cache::{GaussCache, CACHE_DIR_ENV};

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::residue::{characters, Character, Modulus, ResidueRing};
use crate::zi::{primary_decompose, Factorization, GaussInt};

/// Largest `N(q)` accepted by [`verify_lift_primitive`].
pub const LIFT_SCAN_BOUND: u64 = 500;

/// Representatives of `Z[i]/((1+i)^3)`.
const MOD8_REPS: [GaussInt; 8] = [
    GaussInt::new(0, 0),
    GaussInt::new(1, 0),
    GaussInt::new(2, 0),
    GaussInt::new(3, 0),
    GaussInt::new(0, 1),
    GaussInt::new(1, 1),
    GaussInt::new(2, 1),
    GaussInt::new(3, 1),
];

/// `χ̃(n) = χ(n₀)` for odd `n = u·n₀` with `n₀` primary, zero otherwise.
#[derive(Clone, Debug)]
pub struct HeckeCharacter {
    base: Character,
    gauss_sum: Complex64,
}

impl HeckeCharacter {
    pub fn base(&self) -> &Character {
        &self.base
    }

    pub fn modulus(&self) -> &Arc<Modulus> {
        self.base.modulus()
    }

    pub fn q(&self) -> GaussInt {
        self.base.modulus().q()
    }

    pub fn gauss_sum(&self) -> Complex64 {
        self.gauss_sum
    }

    /// `N((1+i)^3 q) = 8 N(q)`.
    pub fn conductor_norm(&self) -> u64 {
        8 * self.base.modulus().norm()
    }

    pub fn eval(&self, n: GaussInt) -> Complex64 {
        match primary_decompose(n) {
            Ok((_, n0)) => self.base.eval(n0),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// `χ̃` on a primary generator; skips the normalization step.
    #[inline]
    pub fn eval_primary(&self, n: GaussInt) -> Complex64 {
        debug_assert!(n.is_primary());
        self.base.eval(n)
    }

    /// Lift of the conjugate character. Its Gauss sum is the conjugate one
    /// because every weight in the sum is real.
    pub fn conj(&self) -> HeckeCharacter {
        HeckeCharacter {
            base: self.base.conj(),
            gauss_sum: self.gauss_sum.conj(),
        }
    }
}

/// Lift a primitive odd character.
pub fn lift(chi: &Character) -> Result<HeckeCharacter> {
    if !chi.is_primitive() || !chi.is_odd() {
        return Err(Error::NotPrimitiveOdd);
    }
    Ok(lift_unchecked(chi))
}

/// The same construction with no parity or primitivity check. Only useful
/// for exhibiting what goes wrong for characters outside the family.
pub fn lift_unchecked(chi: &Character) -> HeckeCharacter {
    let weights = gauss_weights(chi.modulus());
    let gauss_sum = gauss_sum_from_weights(chi, &weights);
    HeckeCharacter {
        base: chi.clone(),
        gauss_sum,
    }
}

/// Lifts of all primitive odd characters mod `q`, in character-index order.
/// Gauss sums come from `cache` when it holds a valid entry for `q`.
pub fn lift_family(
    modulus: &Arc<Modulus>,
    cache: Option<&GaussCache>,
) -> Result<Vec<HeckeCharacter>> {
    let chars: Vec<Character> = characters(modulus, true, true).collect();
    let compute = || {
        let weights = gauss_weights(modulus);
        chars
            .iter()
            .map(|c| gauss_sum_from_weights(c, &weights))
            .collect::<Vec<_>>()
    };
    let sums = match cache {
        Some(cache) => cache.get_or_compute(modulus, &chars, compute)?,
        None => compute(),
    };
    Ok(chars
        .into_iter()
        .zip(sums)
        .map(|(base, gauss_sum)| HeckeCharacter { base, gauss_sum })
        .collect())
}

/// The primary lift `y ≡ r (mod q)` of a residue, unique mod `(1+i)^3 q`.
pub fn primary_crt_lift(r: GaussInt, q: GaussInt) -> GaussInt {
    MOD8_REPS
        .iter()
        .map(|&t| r + q * t)
        .find(|y| y.is_primary())
        .expect("q is odd, so one representative is primary")
}

/// For every unit `r` mod `q` (flat order), the sum of `ẽ(x/((1+i)^3 q))`
/// over the four odd classes `x` mod `(1+i)^3 q` whose primary part is `r` mod `q`.
///
/// With `y` the primary lift of `r` and `z = y / ((1+i)^3 q)`, the four classes
/// are `u·y` and the sum is `2cos(2π Re z) + 2cos(2π Im z)`.
pub fn gauss_weights(modulus: &Modulus) -> Vec<f64> {
    let q = modulus.q();
    let big = GaussInt::ONE_PLUS_I_CUBED * q;
    let n8 = 8 * modulus.norm() as i64;
    let frac = |k: i64| k.rem_euclid(n8) as f64 / n8 as f64;
    (0..modulus.phi())
        .map(|f| {
            let y = primary_crt_lift(modulus.unit_element(f), q);
            let t = y * big.conj();
            2.0 * (TAU * frac(t.re)).cos() + 2.0 * (TAU * frac(t.im)).cos()
        })
        .collect()
}

fn gauss_sum_from_weights(chi: &Character, weights: &[f64]) -> Complex64 {
    let m = chi.modulus();
    chi.phases()
        .iter()
        .zip(weights)
        .map(|(&p, &w)| m.root(p) * w)
        .sum()
}

/// `g(χ̃)` computed from the definition: a sum over all classes mod `(1+i)^3 q`.
pub fn gauss_sum(chi: &HeckeCharacter) -> Complex64 {
    let big = GaussInt::ONE_PLUS_I_CUBED * chi.q();
    let ring = ResidueRing::new(big);
    (0..ring.size())
        .map(|idx| {
            let x = ring.element(idx);
            chi.eval(x) * e_tilde_frac(x, big)
        })
        .sum()
}

/// `ẽ(x / m)` for Gaussian integers, computed with exact phase reduction.
pub fn e_tilde_frac(x: GaussInt, m: GaussInt) -> Complex64 {
    let n = m.norm_small() as i64;
    let t = x * m.conj();
    let phase = t.im.rem_euclid(n) as f64 / n as f64;
    Complex64::from_polar(1.0, TAU * phase)
}

/// `ẽ(z) = e(Im z)`.
pub fn e_tilde(z: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * z.im)
}

/// `e(tr(z / 2i))` with the trace written out as `w + conj(w)`.
pub fn e_tilde_literal(z: Complex64) -> Complex64 {
    let w = z / Complex64::new(0.0, 2.0);
    let tr = (w + w.conj()).re;
    Complex64::from_polar(1.0, TAU * tr)
}

/// Largest deviation between [`e_tilde`] and [`e_tilde_literal`] on `samples` random points.
pub fn trace_identity_check(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let z = Complex64::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
            (e_tilde(z) - e_tilde_literal(z)).norm()
        })
        .fold(0.0, f64::max)
}

/// von Mangoldt function of `Q(i)` on odd `n`.
pub fn lambda_k(n: GaussInt) -> Result<f64> {
    let f = Factorization::of(n)?;
    Ok(match f.prime_power_base() {
        Some(p) => (p.norm_small() as f64).ln(),
        None => 0.0,
    })
}

/// Scan the kernels of reduction from `(1+i)^3 q` to each maximal proper
/// divisor and report whether `χ̃` is non-trivial on every one of them.
pub fn verify_lift_primitive(chi: &HeckeCharacter) -> Result<bool> {
    Ok(lift_kernel_scan(chi)?
        .iter()
        .all(|(_, nontrivial)| *nontrivial))
}

/// Per-kernel results of [`verify_lift_primitive`]: `(label, non-trivial)`.
/// The kernels for `(1+i)^3 q / ϖ` come first, then `(1+i)^2 q`.
pub fn lift_kernel_scan(chi: &HeckeCharacter) -> Result<Vec<(String, bool)>> {
    let norm = chi.modulus().norm();
    if norm > LIFT_SCAN_BOUND {
        return Err(Error::BoundExceeded {
            norm,
            bound: LIFT_SCAN_BOUND,
        });
    }
    let q = chi.q();
    let one = Complex64::new(1.0, 0.0);
    let nontrivial = |lower: GaussInt, reps: &mut dyn Iterator<Item = GaussInt>| {
        reps.map(|t| GaussInt::ONE + lower * t)
            .map(|x| chi.eval(x))
            .any(|v| v.norm() > 0.5 && (v - one).norm() > 1e-9)
    };
    let mut out = Vec::new();
    for &(p, _) in &chi.modulus().factorization().factors {
        let lower = GaussInt::ONE_PLUS_I_CUBED * p.exact_div_of(q).expect("prime divides q");
        let ring = ResidueRing::new(p);
        let hit = nontrivial(lower, &mut (0..ring.size()).map(|i| ring.element(i)));
        out.push((format!("(1+i)^3*q/({p})"), hit));
    }
    let lower = GaussInt::new(0, 2) * q;
    let hit = nontrivial(lower, &mut [GaussInt::ZERO, GaussInt::ONE].into_iter());
    out.push(("(1+i)^2*q".to_string(), hit));
    Ok(out)
}
