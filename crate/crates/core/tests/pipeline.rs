use std::f64::consts::{FRAC_PI_4, PI};

use gevreykit::borel::{borel_sum, BorelSumConfig};
use gevreykit::engine::{
    optimal_truncation, partial_sum, verify_gevrey, verify_gevrey_with, GevreyExpansion,
    DEFAULT_TOLERANCE,
};
use gevreykit::sector::Sector;
use gevreykit::series::{stirling_coeffs, CoefficientSequence};
use gevreykit::stirling::{binet_p, binet_remainder, BinetConfig};
use gevreykit::Complex64;

fn binet_grid() -> Vec<Complex64> {
    let mut g = Vec::new();
    for r in [5.0, 10.0] {
        for th in [-0.7, -0.3, 0.0, 0.4, 0.75] {
            g.push(Complex64::from_polar(r, th));
        }
    }
    g
}

fn binet_remainder_norm(z: Complex64, n: usize) -> f64 {
    binet_remainder(z, n, &BinetConfig::default())
        .map(|q| q.value.norm())
        .unwrap_or(f64::NAN)
}

#[test]
fn binet_satisfies_stirling_estimates_in_quarter_sector() {
    let e = GevreyExpansion::stirling(21);
    let sector = Sector::new(-FRAC_PI_4, FRAC_PI_4).unwrap();
    let rep = verify_gevrey_with(binet_remainder_norm, &e, &sector, &binet_grid(), 20, DEFAULT_TOLERANCE).unwrap();
    assert!(rep.skipped.is_empty());
    assert!(rep.pass, "max ratio {}", rep.max_ratio());
}

#[test]
fn rate_above_two_pi_fails_at_large_n() {
    let base = GevreyExpansion::stirling(21);
    let e = GevreyExpansion::new(base.coeffs().clone(), 1.0, base.m, 7.0, 0.0).unwrap();
    let sector = Sector::new(-FRAC_PI_4, FRAC_PI_4).unwrap();
    let z = Complex64::new(5.0, 0.0);
    let rep = verify_gevrey_with(binet_remainder_norm, &e, &sector, &[z], 20, DEFAULT_TOLERANCE).unwrap();
    assert!(!rep.pass);
    let first_fail = rep.failures().next().unwrap().n;
    assert!(first_fail >= 4, "fails already at n = {first_fail}");
}

#[test]
fn direct_sampler_agrees_where_resolvable() {
    let e = GevreyExpansion::stirling(9);
    let sector = Sector::new(-FRAC_PI_4, FRAC_PI_4).unwrap();
    let grid = [Complex64::new(3.0, 0.5), Complex64::new(4.0, -1.0)];
    let cfg = BinetConfig::default();
    let direct = verify_gevrey(|z| binet_p(z, &cfg).unwrap(), &e, &sector, &grid, 8, DEFAULT_TOLERANCE).unwrap();
    let exact = verify_gevrey_with(binet_remainder_norm, &e, &sector, &grid, 8, DEFAULT_TOLERANCE).unwrap();
    assert!(direct.pass && exact.pass);
    for (a, b) in direct.rows.iter().zip(&exact.rows) {
        assert!((a.remainder - b.remainder).abs() < 1e-15 + 1e-8 * b.remainder);
    }
}

#[test]
fn optimal_truncation_of_stirling_expansion() {
    let e = GevreyExpansion::stirling(80);
    let z = Complex64::new(10.0, 0.0);
    let t = optimal_truncation(&e, z).unwrap();
    let actual = binet_remainder_norm(z, t.n_opt);
    assert!(actual <= t.bound);
    // minimizing n! / (2 pi)^n |z|^{n+1} lands near 2 pi |z|
    assert!(t.n_opt.abs_diff((2.0 * PI * 10.0) as usize) <= 1, "{}", t.n_opt);
}

#[test]
fn borel_sum_agrees_with_truncated_sum_at_large_z() {
    let p = stirling_coeffs(40);
    let z = Complex64::new(12.0, 3.0);
    let s = borel_sum(&p, z, &BorelSumConfig::default()).unwrap();
    let e = GevreyExpansion::stirling(41);
    let trunc = partial_sum(&e, z, 30).unwrap();
    assert!((s.value - trunc).norm() < 1e-12);
    let p_direct = binet_p(z, &BinetConfig::default()).unwrap();
    assert!((s.value - p_direct).norm() < 1e-12);
}

#[test]
fn json_round_trips() {
    let p = stirling_coeffs(6);
    let back = CoefficientSequence::from_json(&p.to_json().unwrap()).unwrap();
    assert_eq!(back, p);
    let e = GevreyExpansion::stirling(4);
    let json = e.to_json().unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["coefficients"]["kind"], "stirling");
    assert_eq!(v["coefficients"]["values"][0], serde_json::json!(["1", "12"]));
    assert_eq!(v["a"], serde_json::json!(2.0 * PI));
}
