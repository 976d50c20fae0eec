mod common;

use common::{central4, integrate_with_breaks, ks_critical_1pct, ks_distance, mean_var, rel_err};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pfcme::{decompose, oracle_moments, sample, PfCme64, SamplerState};

#[test]
fn periodic_factorization() {
    let mut rng = StdRng::seed_from_u64(3);
    for m in [50, 200] {
        let d = PfCme64::new(m).unwrap();
        let h = d.params().h;
        let q = d.params().cell_ratio();
        for _ in 0..100 {
            let u0: f64 = rng.gen_range(0.0..h);
            for k in 1..=3usize {
                let t = k as f64 * h + u0;
                let (cell, u) = d.cell_split(t);
                assert_eq!(cell, k);
                let lhs = d.density(t).unwrap();
                let rhs = q.powi(k as i32) * d.density(u).unwrap();
                assert!(rel_err(lhs, rhs) < 1e-12, "m={m} k={k} u={u}");
            }
        }
    }
}

#[test]
fn geometric_cell_masses() {
    for m in [50, 200] {
        let d = PfCme64::new(m).unwrap();
        let dec = decompose(&d);
        let h = dec.h;
        for k in 0..=10u32 {
            let a = k as f64 * h;
            // rescale by q^-k so the absolute tolerance is relative to the cell
            let scale = dec.q.powi(k as i32);
            let mass = integrate_with_breaks(
                |t| d.density(t).unwrap() / scale,
                a,
                a + h,
                &[a + 0.5, a + 1.0, a + 1.5],
                1e-14,
            );
            assert!(rel_err(mass, dec.cell_mass(k) / scale) < 1e-10, "m={m} k={k}");
        }
    }
}

#[test]
fn decomposition_invariants() {
    for m in [10usize, 100, 1000] {
        let dec = decompose(&PfCme64::new(m).unwrap());
        let mf = m as f64;
        assert!(dec.q > 0.0 && dec.q < 1.0);
        assert!(rel_err(dec.q * mf * mf * mf.ln(), 1.0) < 1e-12);
        assert!((dec.base_mass() - (1.0 - dec.q)).abs() < 1e-10);
        assert!(dec.base_mean > 0.0 && dec.base_mean < dec.h);
    }
}

#[test]
fn oracle_scv_reproduces_published_value() {
    let o = oracle_moments(&PfCme64::new(200).unwrap()).unwrap();
    assert!(rel_err(o.scv, 8.003e-4) < 1e-3);
}

#[test]
fn fixed_seed_is_reproducible() {
    let d = PfCme64::new(60).unwrap();
    let a = sample(&d, &mut SamplerState::new(42), 2).unwrap();
    let b = sample(&d, &mut SamplerState::new(42), 2).unwrap();
    assert_eq!(a[0].to_bits(), b[0].to_bits());
    assert_eq!(a[1].to_bits(), b[1].to_bits());
    let c = sample(&d, &mut SamplerState::new(43), 2).unwrap();
    assert_ne!(a, c);
}

#[test]
fn sample_moments_within_standard_errors() {
    let d = PfCme64::new(100).unwrap();
    let n = 1_000_000;
    let xs = sample(&d, &mut SamplerState::new(2024), n).unwrap();
    let (mean, var) = mean_var(&xs);
    let se_mean = (var / n as f64).sqrt();
    assert!((mean - d.mean()).abs() <= 4.0 * se_mean, "mean {mean} vs {}", d.mean());
    let se_var = ((central4(&xs, mean) - var * var) / n as f64).sqrt();
    assert!((var - d.variance()).abs() <= 5.0 * se_var, "var {var} vs {}", d.variance());
}

#[test]
fn kolmogorov_smirnov() {
    let d = PfCme64::new(100).unwrap();
    let n = 100_000;
    let mut xs = sample(&d, &mut SamplerState::new(99), n).unwrap();
    let ks = ks_distance(&mut xs, |x| d.cdf(x));
    assert!(ks < ks_critical_1pct(n), "D = {ks}");
}

#[test]
fn draws_are_nonnegative() {
    let d = PfCme64::new(30).unwrap();
    let xs = sample(&d, &mut SamplerState::new(0), 10_000).unwrap();
    assert!(xs.iter().all(|&x| x >= 0.0 && x.is_finite()));
}
