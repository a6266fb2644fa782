//! Deterministic invariant suite. Every check becomes one [`LemmaRow`];
//! randomized checks draw from a ChaCha stream seeded by the caller.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::experiments::{
    first_moment, first_moment_by_orthogonality, gauss_circle_primary, harmonic_sum,
    moduli_in_band, norm_inequality_scan, one_level_density, prime_power_table, relative_gap,
    second_moment, second_moment_via_l, AdmissibleTestFunction, DensityRoute, Family, LemmaRow,
    C0_SPREAD_BOUND,
};
use crate::hecke::{lift_family, trace_identity_check, verify_lift_primitive};
use crate::kernels::{eval_v, eval_v_contour, eval_w, eval_w_contour};
use crate::lvalues::{a_chi_sum, dirichlet_partial, l_half, SumOrder};
use crate::residue::{build_modulus, characters, psi_star, DivisorSums, Parity};
use crate::zi::{primary_decompose, Factorization, GaussInt};

/// Bounds of the verification suite; the defaults keep a run under a minute.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count_bound: u64,
    pub orthogonality_samples: usize,
    pub gauss_bound: u64,
    pub afe_bound: u64,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            count_bound: 400,
            orthogonality_samples: 200,
            gauss_bound: 300,
            afe_bound: 100,
        }
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn random_primary(rng: &mut ChaCha8Rng, max_norm: u64) -> GaussInt {
    let r = (max_norm as f64).sqrt() as i64;
    loop {
        let z = GaussInt::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        if z.is_odd() && z.norm_small() <= max_norm && z.norm_small() > 1 {
            return primary_decompose(z).expect("odd").1;
        }
    }
}

fn arithmetic(rows: &mut Vec<LemmaRow>, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut bad = 0u32;
    for _ in 0..300 {
        let z = random_primary(rng, 1_000_000);
        let f = Factorization::of(z)?;
        let divisors = f.primary_divisors();
        let phi_sum: u64 = divisors
            .iter()
            .map(|&d| Factorization::of(d).map(|g| g.euler_phi()))
            .sum::<Result<u64>>()?;
        let mu_sum: i64 = divisors
            .iter()
            .map(|&d| Factorization::of(d).map(|g| g.mobius()))
            .sum::<Result<i64>>()?;
        if f.reconstruct() != Some(z) || phi_sum != f.norm() || mu_sum != 0 {
            bad += 1;
        }
    }
    rows.push(LemmaRow::at_most(
        "factor_phi_mobius",
        "300 random N<=1e6",
        bad as f64,
        0.0,
    ));
    Ok(())
}

fn characters_and_orthogonality(
    rows: &mut Vec<LemmaRow>,
    cfg: &SuiteConfig,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let moduli = moduli_in_band(3, cfg.count_bound, false)?;
    let mismatches: Vec<u64> = moduli
        .par_iter()
        .map(|&q| -> Result<u64> {
            let m = build_modulus(q)?;
            let brute = characters(&m, true, true).count() as u64;
            Ok(u64::from(brute != psi_star(q)?))
        })
        .collect::<Result<_>>()?;
    rows.push(LemmaRow::at_most(
        "psi_star_count",
        format!("N<={}", cfg.count_bound),
        mismatches.iter().sum::<u64>() as f64,
        0.0,
    ));

    let pool = moduli_in_band(3, 500, false)?;
    let mut err = 0.0f64;
    for _ in 0..cfg.orthogonality_samples {
        let q = pool[rng.gen_range(0..pool.len())];
        let m = build_modulus(q)?;
        let pick = |rng: &mut ChaCha8Rng| loop {
            let z = GaussInt::new(rng.gen_range(-60..=60), rng.gen_range(-60..=60));
            if m.is_coprime(z) {
                return z;
            }
        };
        let (n, a) = (pick(rng), pick(rng));
        let parity = if rng.gen_bool(0.5) {
            Parity::Odd
        } else {
            Parity::Even
        };
        let direct: Complex64 = characters(&m, parity == Parity::Odd, true)
            .filter(|c| c.is_odd() == (parity == Parity::Odd))
            .map(|c| c.eval(n) * c.eval(a).conj())
            .sum();
        let rhs = DivisorSums::new(q)?.rhs(n, a, parity);
        err = err.max((direct - rhs).norm());
    }
    rows.push(LemmaRow::at_most(
        "orthogonality",
        format!("{} random N<=500", cfg.orthogonality_samples),
        err,
        1e-9,
    ));
    Ok(())
}

fn hecke(rows: &mut Vec<LemmaRow>, cfg: &SuiteConfig) -> Result<()> {
    let moduli = moduli_in_band(3, cfg.gauss_bound, false)?;
    let per_q: Vec<(f64, u64)> = moduli
        .par_iter()
        .map(|&q| -> Result<(f64, u64)> {
            let m = build_modulus(q)?;
            let fam = lift_family(&m, None)?;
            let target = 8.0 * m.norm() as f64;
            let dev = max_of(
                fam.iter()
                    .map(|c| (c.gauss_sum().norm_sqr() / target - 1.0).abs()),
            );
            let mut bad = 0;
            if m.norm() <= 150 {
                for c in &fam {
                    bad += u64::from(!verify_lift_primitive(c)?);
                }
            }
            Ok((dev, bad))
        })
        .collect::<Result<_>>()?;
    rows.push(LemmaRow::at_most(
        "gauss_sum_magnitude",
        format!("N<={}", cfg.gauss_bound),
        max_of(per_q.iter().map(|t| t.0)),
        1e-9,
    ));
    rows.push(LemmaRow::at_most(
        "lift_primitive",
        "N<=150",
        per_q.iter().map(|t| t.1).sum::<u64>() as f64,
        0.0,
    ));
    rows.push(LemmaRow::at_most(
        "trace_identity",
        "1000 points",
        trace_identity_check(1000, cfg.seed),
        1e-9,
    ));
    Ok(())
}

fn kernels(rows: &mut Vec<LemmaRow>) -> Result<()> {
    let mut dv = 0.0f64;
    for k in 0..20 {
        let xi = 10f64.powf(-4.0 + 5.5 * k as f64 / 19.0);
        dv = dv.max((eval_v(xi)? - eval_v_contour(xi, 1.0)?).abs());
    }
    rows.push(LemmaRow::at_most(
        "v_closed_form",
        "20 points in [1e-4, 30]",
        dv,
        1e-9,
    ));
    let mut dw = 0.0f64;
    for k in 0..12 {
        let x = 10f64.powf(-2.0 + 4.0 * k as f64 / 11.0);
        let base = eval_w_contour(x, 1.0)?;
        for c in [0.8, 2.0, -0.25] {
            dw = dw.max((eval_w_contour(x, c)? - base).abs());
        }
        dw = dw.max((eval_w(x)? - base).abs());
    }
    rows.push(LemmaRow::at_most(
        "w_shift_independence",
        "12 points in [1e-2, 1e2]",
        dw,
        1e-9,
    ));
    rows.push(LemmaRow::at_most(
        "v_at_zero",
        "xi=1e-12",
        (eval_v(1e-12)? - 1.0).abs(),
        1e-2,
    ));
    rows.push(LemmaRow::at_most(
        "w_near_zero",
        "x=1e-8",
        (eval_w(1e-8)? - 1.0).abs(),
        1e-2,
    ));
    // leading terms of the expansion at 0: 1 + (√y/π)(2 log y - 4 + 4γ), y = π²x/8
    let x = 1e-6;
    let y = PI * PI * x / 8.0;
    let gamma = 0.577_215_664_901_532_9;
    let expansion = 1.0 + y.sqrt() / PI * (2.0 * y.ln() - 4.0 + 4.0 * gamma);
    rows.push(LemmaRow::at_most(
        "w_small_x_expansion",
        "x=1e-6",
        (eval_w(x)? - expansion).abs(),
        1e-5,
    ));
    Ok(())
}

fn l_values(rows: &mut Vec<LemmaRow>, cfg: &SuiteConfig) -> Result<()> {
    let moduli = moduli_in_band(3, cfg.afe_bound, false)?;
    let per_q: Vec<[f64; 3]> = moduli
        .par_iter()
        .map(|&q| -> Result<[f64; 3]> {
            let m = build_modulus(q)?;
            let n = m.norm() as f64;
            let mut out = [0.0f64; 3];
            for chi in lift_family(&m, None)? {
                let l = l_half(&chi, n)?.value;
                let l2 = l_half(&chi, 2.0 * n)?.value;
                let lh = l_half(&chi, 0.5 * n)?.value;
                out[0] = out[0].max((l - l2).norm()).max((l - lh).norm());
                out[1] = out[1].max((l_half(&chi.conj(), n)?.value - l.conj()).norm());
                let a = a_chi_sum(&chi)?.re;
                out[2] = out[2].max((l.norm_sqr() - 2.0 * a).abs() / l.norm_sqr().max(1e-300));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let param = format!("N<={}", cfg.afe_bound);
    rows.push(LemmaRow::at_most(
        "afe_x_independence",
        param.clone(),
        max_of(per_q.iter().map(|t| t[0])),
        1e-6,
    ));
    rows.push(LemmaRow::at_most(
        "afe_conjugation",
        param.clone(),
        max_of(per_q.iter().map(|t| t[1])),
        1e-10,
    ));
    rows.push(LemmaRow::at_most(
        "square_vs_pair_sum",
        param,
        max_of(per_q.iter().map(|t| t[2])),
        1e-5,
    ));

    let m = build_modulus(GaussInt::new(3, -6))?;
    let chi = &lift_family(&m, None)?[0];
    let a = dirichlet_partial(Some(chi), 1.5, 200_000, SumOrder::Norm)?;
    let b = dirichlet_partial(Some(chi), 1.5, 200_000, SumOrder::Lexicographic)?;
    rows.push(LemmaRow::at_most(
        "dirichlet_order_free",
        "q=3-6i s=1.5",
        (a.value - b.value).norm(),
        0.0,
    ));
    Ok(())
}

fn moments(rows: &mut Vec<LemmaRow>) -> Result<()> {
    let mut two_route = 0.0f64;
    let mut via_l = 0.0f64;
    let mut imag = 0.0f64;
    for q in [
        GaussInt::new(-3, 0),
        GaussInt::new(-1, 2),
        GaussInt::new(3, -6),
        GaussInt::new(9, 0),
        GaussInt::new(-11, 0),
    ] {
        let fam = Family::new(q, None)?;
        let m1 = first_moment(&fam)?;
        let swapped = first_moment_by_orthogonality(q)?;
        two_route = two_route.max((m1.statistic - swapped).norm() / m1.statistic.norm());
        imag = imag.max(m1.statistic.im.abs() / fam.psi_star() as f64);
        let m2 = second_moment(&fam)?;
        via_l = via_l.max((second_moment_via_l(&fam)? - m2.statistic.re).abs() / m2.statistic.re);
    }
    rows.push(LemmaRow::at_most(
        "first_moment_two_routes",
        "5 moduli N<=121",
        two_route,
        1e-6,
    ));
    rows.push(LemmaRow::at_most(
        "first_moment_imaginary",
        "5 moduli N<=121",
        imag,
        1e-8,
    ));
    rows.push(LemmaRow::at_most(
        "second_moment_two_routes",
        "5 moduli N<=121",
        via_l,
        1e-4,
    ));

    let table = prime_power_table(300u64.pow(2));
    let f = AdmissibleTestFunction::fejer(1.5)?;
    let mut dens = 0.0f64;
    for q in [
        GaussInt::new(-3, 0),
        GaussInt::new(-7, 0),
        GaussInt::new(7, 2),
    ] {
        let a = one_level_density(q, &f, &table, DensityRoute::Direct, None)?.s_tilde;
        let b = one_level_density(q, &f, &table, DensityRoute::Orthogonality, None)?.s_tilde;
        dens = dens.max(relative_gap(a, b));
    }
    rows.push(LemmaRow::at_most(
        "density_two_routes",
        "fejer sigma=1.5, 3 moduli",
        dens,
        1e-6,
    ));
    Ok(())
}

fn lemmas(rows: &mut Vec<LemmaRow>) -> Result<()> {
    let hit = norm_inequality_scan(16)?;
    rows.push(LemmaRow::at_most(
        "norm_inequality",
        "B=16",
        u8::from(hit.is_some()) as f64,
        0.0,
    ));
    for x in [1e3, 1e4, 1e5, 1e6] {
        let err = (gauss_circle_primary(x) as f64 - PI * x / 8.0).abs();
        rows.push(LemmaRow::at_most(
            "gauss_circle",
            format!("x={x:e}"),
            err,
            4.0 * x.sqrt(),
        ));
    }
    let fejer = AdmissibleTestFunction::fejer(1.0)?;
    rows.push(LemmaRow::at_most(
        "fejer_integral",
        "sigma=1 on [-200,200]",
        (fejer.integral_phi_numeric(200.0, 400_000) - 1.0).abs(),
        1e-3,
    ));
    match crate::experiments::estimate_c0() {
        Ok(est) => {
            rows.push(LemmaRow::at_most(
                "c0_spread",
                "x in {1e6,2e6,4e6,1e7}",
                est.spread,
                C0_SPREAD_BOUND,
            ));
            for q in [GaussInt::ONE, GaussInt::new(-3, 0), GaussInt::new(-1, 2)] {
                let (value, main) = harmonic_sum(1e6, q)?;
                rows.push(LemmaRow::at_most(
                    "harmonic_sum",
                    format!("q={q} x=1e6"),
                    (value - main).abs(),
                    1e-2,
                ));
            }
        }
        Err(crate::Error::Spread { spread, bound }) => {
            rows.push(LemmaRow::at_most(
                "c0_spread",
                "x in {1e6,2e6,4e6,1e7}",
                spread,
                bound,
            ));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

/// Run every check in a fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<LemmaRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    arithmetic(&mut rows, &mut rng)?;
    characters_and_orthogonality(&mut rows, cfg, &mut rng)?;
    hecke(&mut rows, cfg)?;
    kernels(&mut rows)?;
    l_values(&mut rows, cfg)?;
    moments(&mut rows)?;
    lemmas(&mut rows)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_repeats() {
        let cfg = SuiteConfig {
            seed: 3,
            count_bound: 60,
            orthogonality_samples: 20,
            gauss_bound: 60,
            afe_bound: 30,
        };
        let a = run_suite(&cfg).unwrap();
        for row in &a {
            assert!(row.pass, "{row:?}");
        }
        let b = run_suite(&cfg).unwrap();
        assert_eq!(a, b);
    }
}
