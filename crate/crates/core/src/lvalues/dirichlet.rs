use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hecke::HeckeCharacter;
use crate::zi::{isqrt, primary_elements, primary_elements_sorted};

/// Default norm bound for [`dirichlet_tail_check`].
pub const DIRICHLET_BOUND: u64 = 1_000_000;

/// Terms are accumulated as integers at this scale, so the total does not
/// depend on summation order.
const FIXED_SCALE: f64 = (1u128 << 96) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumOrder {
    /// by `(norm, re, im)`
    Norm,
    /// by imaginary part, then real part
    Lexicographic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletPartial {
    pub value: Complex64,
    pub terms: usize,
    pub bound: u64,
    /// bound on the omitted terms `N(A) > bound`
    pub tail_bound: f64,
}

#[derive(Default)]
struct FixedSum {
    re: i128,
    im: i128,
}

impl FixedSum {
    fn add(&mut self, z: Complex64) {
        self.re += (z.re * FIXED_SCALE).round() as i128;
        self.im += (z.im * FIXED_SCALE).round() as i128;
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re as f64 / FIXED_SCALE, self.im as f64 / FIXED_SCALE)
    }
}

/// `Σ_{N(A) <= bound} χ̃(A) N(A)^{-s}` over primary `A`; with `chi = None`
/// the character is replaced by `1`.
pub fn dirichlet_partial(
    chi: Option<&HeckeCharacter>,
    s: f64,
    bound: u64,
    order: SumOrder,
) -> Result<DirichletPartial> {
    if !(s >= 1.5) {
        return Err(Error::Domain(format!(
            "Dirichlet series check needs s >= 1.5, got {s}"
        )));
    }
    let elements: Vec<_> = match order {
        SumOrder::Norm => primary_elements_sorted(bound),
        SumOrder::Lexicographic => primary_elements(bound).collect(),
    };
    let mut acc = FixedSum::default();
    let mut terms = 0;
    for a in elements {
        let v = match chi {
            Some(c) => c.eval_primary(a),
            None => Complex64::new(1.0, 0.0),
        };
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        acc.add(v * (a.norm_small() as f64).powf(-s));
        terms += 1;
    }
    // at most π/8·t + 4√t + 1 primary elements of norm <= t
    let b = bound.max(1) as f64;
    let tail_bound = (PI / 8.0 + 4.0 / b.sqrt() + 1.0 / b) * b.powf(1.0 - s) * (s / (s - 1.0));
    Ok(DirichletPartial {
        value: acc.value(),
        terms,
        bound,
        tail_bound,
    })
}

/// Partial sum at `s` up to norm `10^6`, accumulated in norm order.
pub fn dirichlet_tail_check(chi: &HeckeCharacter, s: f64) -> Result<DirichletPartial> {
    dirichlet_partial(Some(chi), s, DIRICHLET_BOUND, SumOrder::Norm)
}

/// `Σ_{n <= bound, n odd} a(n) n^{-s}` with `a(n)` the number of ideals of
/// norm `n`, counted from representations `n = a² + b²`.
pub fn odd_ideal_zeta_by_norm(s: f64, bound: u64) -> f64 {
    let mut reps = vec![0u32; bound as usize + 1];
    let r = isqrt(bound) as i64;
    for a in -r..=r {
        for b in -r..=r {
            let n = (a * a + b * b) as u64;
            if n <= bound && n % 2 == 1 {
                reps[n as usize] += 1;
            }
        }
    }
    let mut acc = FixedSum::default();
    for (n, &c) in reps.iter().enumerate() {
        if c > 0 {
            // four associates per ideal
            acc.add(Complex64::new(c as f64 / 4.0 * (n as f64).powf(-s), 0.0));
        }
    }
    acc.value().re
}
