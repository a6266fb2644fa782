use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hecke::GaussCache;
use crate::residue::{psi_star, DivisorSums, Parity};
use crate::zi::{primary_decompose, two_squares, GaussInt};

use super::moments::Family;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunctionKind {
    /// `φ̂(u) = max(0, 1 - |u|/σ)`
    Fejer,
    /// `φ̂(u) = cos²(πu/2σ)` on `[-σ, σ]`
    Cosine,
}

impl TestFunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            TestFunctionKind::Fejer => "fejer",
            TestFunctionKind::Cosine => "cosine",
        }
    }
}

/// An even test function `φ` whose Fourier transform is supported in `[-σ, σ]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleTestFunction {
    kind: TestFunctionKind,
    sigma: f64,
}

impl AdmissibleTestFunction {
    pub fn new(kind: TestFunctionKind, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 2.0) {
            return Err(Error::Domain(format!(
                "support radius must lie in (0, 2), got {sigma}"
            )));
        }
        Ok(AdmissibleTestFunction { kind, sigma })
    }

    pub fn fejer(sigma: f64) -> Result<Self> {
        Self::new(TestFunctionKind::Fejer, sigma)
    }

    pub fn cosine(sigma: f64) -> Result<Self> {
        Self::new(TestFunctionKind::Cosine, sigma)
    }

    pub fn kind(&self) -> TestFunctionKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn phi_hat(&self, u: f64) -> f64 {
        let t = u.abs() / self.sigma;
        if t >= 1.0 {
            return 0.0;
        }
        match self.kind {
            TestFunctionKind::Fejer => 1.0 - t,
            TestFunctionKind::Cosine => (0.5 * PI * t).cos().powi(2),
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        let s = self.sigma;
        match self.kind {
            TestFunctionKind::Fejer => {
                let y = PI * s * x;
                if y.abs() < 1e-8 {
                    s
                } else {
                    s * (y.sin() / y).powi(2)
                }
            }
            TestFunctionKind::Cosine => {
                let d = 1.0 - 4.0 * s * s * x * x;
                if x.abs() < 1e-12 {
                    s
                } else if d.abs() < 1e-9 {
                    0.5 * s
                } else {
                    (2.0 * PI * s * x).sin() / (2.0 * PI * x * d)
                }
            }
        }
    }

    /// `∫ φ = φ̂(0)`.
    pub fn integral_phi(&self) -> f64 {
        self.phi_hat(0.0)
    }

    /// Trapezoid rule for `∫_{-half_width}^{half_width} φ`.
    pub fn integral_phi_numeric(&self, half_width: f64, steps: usize) -> f64 {
        let h = 2.0 * half_width / steps as f64;
        let inner: f64 = (1..steps)
            .map(|k| self.phi(-half_width + k as f64 * h))
            .sum();
        h * (inner + 0.5 * (self.phi(-half_width) + self.phi(half_width)))
    }
}

/// A prime power `n = ϖ^k` with `Λ(n) = log N(ϖ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimePower {
    pub n: GaussInt,
    pub norm: u64,
    pub lambda: f64,
}

fn rational_primes(bound: u64) -> Vec<u64> {
    let b = bound as usize;
    let mut composite = vec![false; b + 1];
    let mut out = Vec::new();
    for p in 2..=b {
        if composite[p] {
            continue;
        }
        out.push(p as u64);
        let mut m = p * p;
        while m <= b {
            composite[m] = true;
            m += p;
        }
    }
    out
}

/// Primary prime powers of odd primes with norm `<= bound`, sorted by `(norm, re, im)`.
#[derive(Clone, Debug)]
pub struct PrimePowerTable {
    bound: u64,
    entries: Vec<PrimePower>,
}

impl PrimePowerTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn entries(&self) -> &[PrimePower] {
        &self.entries
    }
}

pub fn prime_power_table(bound: u64) -> PrimePowerTable {
    let mut out = Vec::new();
    let mut push_powers = |p: GaussInt, np: u64| {
        let lambda = (np as f64).ln();
        let (mut z, mut nz) = (p, np);
        loop {
            out.push(PrimePower {
                n: z,
                norm: nz,
                lambda,
            });
            match nz.checked_mul(np) {
                Some(next) if next <= bound => {
                    z = z * p;
                    nz = next;
                }
                _ => break,
            }
        }
    };
    for p in rational_primes(bound) {
        match p % 4 {
            1 => {
                let (a, b) = two_squares(p);
                for z in [
                    GaussInt::new(a as i64, b as i64),
                    GaussInt::new(a as i64, -(b as i64)),
                ] {
                    let (_, primary) = primary_decompose(z).expect("odd prime");
                    push_powers(primary, p);
                }
            }
            3 if p.checked_mul(p).is_some_and(|n| n <= bound) => {
                push_powers(GaussInt::new(-(p as i64), 0), p * p);
            }
            _ => {}
        }
    }
    out.sort_unstable_by_key(|t| t.n.sort_key());
    PrimePowerTable {
        bound,
        entries: out,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityRoute {
    /// each character summed separately
    Direct,
    /// character average replaced by its divisor-sum value
    Orthogonality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityResult {
    pub q: GaussInt,
    pub psi_star: u64,
    pub sigma: f64,
    pub testfn: TestFunctionKind,
    pub s_tilde: f64,
    pub density: f64,
    pub wall_time: f64,
}

fn weights<'a>(
    table: &'a PrimePowerTable,
    f: &'a AdmissibleTestFunction,
    norm_q: u64,
) -> impl Iterator<Item = (&'a PrimePower, f64)> + 'a {
    let log_q = (norm_q as f64).ln();
    let cut = (norm_q as f64).powf(f.sigma());
    table
        .entries
        .iter()
        .take_while(move |t| (t.norm as f64) <= cut)
        .filter_map(move |t| {
            let w = t.lambda / (t.norm as f64).sqrt() * f.phi_hat((t.norm as f64).ln() / log_q);
            (w != 0.0).then_some((t, w))
        })
}

fn check_table(table: &PrimePowerTable, norm_q: u64, f: &AdmissibleTestFunction) -> Result<()> {
    let need = (norm_q as f64).powf(f.sigma()).floor() as u64;
    if need > table.bound {
        return Err(Error::Truncation(format!(
            "prime power table stops at norm {} but {need} is needed",
            table.bound
        )));
    }
    Ok(())
}

/// `Σ*_χ Σ_n Λ(n) N(n)^{-½} φ̂(log N(n)/log N(q)) (χ̃(n) + conj χ̃(n))`, one character at a time.
pub fn s_tilde_direct(
    family: &Family,
    f: &AdmissibleTestFunction,
    table: &PrimePowerTable,
) -> Result<f64> {
    let modulus = family.modulus();
    check_table(table, modulus.norm(), f)?;
    let terms: Vec<(usize, f64)> = weights(table, f, modulus.norm())
        .filter_map(|(t, w)| modulus.flat_index(t.n).map(|fl| (fl, w)))
        .collect();
    let per_char: Vec<f64> = family
        .characters()
        .par_iter()
        .map(|c| {
            let vals = c.base().values();
            terms.iter().map(|&(fl, w)| 2.0 * w * vals[fl].re).sum()
        })
        .collect();
    Ok(per_char.iter().sum())
}

/// Same sum with `Σ*_χ (χ(n) + conj χ(n))` replaced by `Σ_d μ(q/d)φ(d)([d | n-1] - [d | n+1])`.
pub fn s_tilde_orthogonality(
    q: GaussInt,
    f: &AdmissibleTestFunction,
    table: &PrimePowerTable,
) -> Result<f64> {
    let sums = DivisorSums::new(q)?;
    let norm_q = q.norm()?;
    check_table(table, norm_q, f)?;
    let primes: Vec<GaussInt> = crate::zi::Factorization::of(q)?
        .factors
        .iter()
        .map(|&(p, _)| p)
        .collect();
    let mut acc = 0.0;
    for (t, w) in weights(table, f, norm_q) {
        if primes.iter().any(|p| p.divides(t.n)) {
            continue;
        }
        acc += w * 2.0 * sums.rhs(t.n, GaussInt::ONE, Parity::Odd);
    }
    Ok(acc)
}

/// Prime side of the explicit formula: `∫φ - s̃/(ψ*(q) log N(q))`. Only the
/// direct route builds the character family.
pub fn one_level_density(
    q: GaussInt,
    f: &AdmissibleTestFunction,
    table: &PrimePowerTable,
    route: DensityRoute,
    cache: Option<&GaussCache>,
) -> Result<DensityResult> {
    let start = Instant::now();
    let norm_q = q.norm()?;
    if norm_q < 2 {
        return Err(Error::Domain("density needs N(q) >= 2".into()));
    }
    let (s_tilde, psi_star) = match route {
        DensityRoute::Direct => {
            let family = Family::new(q, cache)?;
            (s_tilde_direct(&family, f, table)?, family.psi_star())
        }
        DensityRoute::Orthogonality => (s_tilde_orthogonality(q, f, table)?, psi_star(q)?),
    };
    if psi_star == 0 {
        return Err(Error::Domain(format!(
            "no primitive odd characters modulo {q}"
        )));
    }
    let density = f.integral_phi() - s_tilde / (psi_star as f64 * (norm_q as f64).ln());
    Ok(DensityResult {
        q,
        psi_star,
        sigma: f.sigma(),
        testfn: f.kind(),
        s_tilde,
        density,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_wide_support() {
        assert!(AdmissibleTestFunction::fejer(2.0).is_err());
        assert!(AdmissibleTestFunction::cosine(0.0).is_err());
        let f = AdmissibleTestFunction::fejer(1.0).unwrap();
        assert_eq!(f.phi_hat(0.0), 1.0);
        assert_eq!(f.phi_hat(0.25), 0.75);
        assert_eq!(f.integral_phi(), 1.0);
    }

    #[test]
    fn numeric_integrals() {
        // the Fejér tail beyond 200 is about 1/(200 π² σ)
        for s in [1.0, 1.5] {
            let f = AdmissibleTestFunction::fejer(s).unwrap();
            assert!(
                (f.integral_phi_numeric(200.0, 400_000) - 1.0).abs() < 1e-3,
                "{s}"
            );
        }
        for s in [0.5, 1.0, 1.5] {
            let g = AdmissibleTestFunction::cosine(s).unwrap();
            assert!(
                (g.integral_phi_numeric(200.0, 400_000) - 1.0).abs() < 1e-6,
                "{s}"
            );
        }
    }

    #[test]
    fn cosine_pair_by_quadrature() {
        let g = AdmissibleTestFunction::cosine(1.2).unwrap();
        for x in [0.0, 0.1, 1.0 / 2.4, 0.7, 3.3] {
            let n = 20_000;
            let h = 2.4 / n as f64;
            let direct: f64 = (0..=n)
                .map(|k| {
                    let u = -1.2 + k as f64 * h;
                    let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                    w * g.phi_hat(u) * (2.0 * PI * u * x).cos()
                })
                .sum::<f64>()
                * h;
            assert!((direct - g.phi(x)).abs() < 1e-7, "{x}");
        }
    }

    #[test]
    fn prime_powers_small() {
        let t = prime_power_table(50);
        let norms: Vec<u64> = t.entries().iter().map(|p| p.norm).collect();
        assert_eq!(
            norms,
            vec![5, 5, 9, 13, 13, 17, 17, 25, 25, 29, 29, 37, 37, 41, 41, 49]
        );
        assert!(t
            .entries()
            .iter()
            .all(|p| p.n.is_primary() && p.n.norm_small() == p.norm));
        let f = AdmissibleTestFunction::fejer(1.5).unwrap();
        assert!(s_tilde_orthogonality(GaussInt::new(-3, 0), &f, &t).is_ok());
        assert!(matches!(
            s_tilde_orthogonality(GaussInt::new(-11, 0), &f, &t),
            Err(Error::Truncation(_))
        ));
        assert!((t.entries()[7].lambda - 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn routes_agree_small() {
        let table = prime_power_table(300u64.pow(2));
        for q in [
            GaussInt::new(-3, 0),
            GaussInt::new(-1, 2),
            GaussInt::new(3, -6),
            GaussInt::new(-7, 0),
        ] {
            let fam = Family::new(q, None).unwrap();
            for f in [
                AdmissibleTestFunction::fejer(1.5).unwrap(),
                AdmissibleTestFunction::cosine(1.9).unwrap(),
            ] {
                let a = s_tilde_direct(&fam, &f, &table).unwrap();
                let b = s_tilde_orthogonality(q, &f, &table).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{q} {a} {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn phi_hat_even_and_supported(sigma in 0.05f64..1.99, u in -3.0f64..3.0) {
            for f in [AdmissibleTestFunction::fejer(sigma).unwrap(), AdmissibleTestFunction::cosine(sigma).unwrap()] {
                prop_assert_eq!(f.phi_hat(u), f.phi_hat(-u));
                if u.abs() >= sigma {
                    prop_assert_eq!(f.phi_hat(u), 0.0);
                }
                prop_assert!(f.phi(u) == f.phi(-u));
            }
        }
    }
}
