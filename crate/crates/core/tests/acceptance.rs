//! Acceptance suite: one line per criterion, nonzero exit status on any failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, FRAC_PI_3, PI};
use std::time::{Duration, Instant};

use gevreykit::borel::{borel_sum, radius_estimate, ray_transform, ray_transform_bound, BorelCoefficients, BorelSumConfig};
use gevreykit::engine::{counterexample, verify_gevrey, DEFAULT_TOLERANCE};
use gevreykit::quad::QuadratureConfig;
use gevreykit::sector::{carleman_loglog, t_regions, MDeltaProfile, TabulatedScale};
use gevreykit::series::{bernoulli_numbers, binet_taylor_coeffs, stirling_coeffs, CoefficientSequence, Rational, SequenceKind};
use gevreykit::stirling::{binet_p, binet_remainder, brute_force_n_opt, log_gamma, optimal_error_stirling, stirling_partial_sum, verify_widened_sector, BinetConfig, ERROR_CONSTANT_M};
use gevreykit::Complex64;
use num_bigint::BigInt;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn coefficient_exactness() -> Outcome {
    let p = stirling_coeffs(40);
    let f = binet_taylor_coeffs(40);
    let b = bernoulli_numbers(21);
    let mut fact = BigInt::from(1);
    for k in 0..=40usize {
        if k > 0 {
            fact *= k;
        }
        check(p.values()[k] == &f.values()[k] * Rational::from_integer(fact.clone()), format!("p_{k} != f_{k} k!"))?;
        if k % 2 == 1 {
            check(p.values()[k] == Rational::from_integer(BigInt::from(0)), format!("p_{k} != 0"))?;
        }
    }
    for k in 1..=21usize {
        let d = Rational::from_integer(BigInt::from(2 * k * (2 * k - 1)));
        check(p.values()[2 * k - 2] == &b.values()[2 * k] / d, format!("p_{} != B_{}/...", 2 * k - 2, 2 * k))?;
    }
    Ok("41 coefficients, exact rational equalities".into())
}

fn stirling_error_bound() -> Outcome {
    let cfg = BinetConfig::default();
    let mut notes = Vec::new();
    // high-precision |P(z) - S_{n_opt}(z)|
    let oracles = [
        (5.0, 2.0297992832241267e-15),
        (10.0, 2.8108903567449675e-29),
        (20.0, 1.0101400478593918e-56),
    ];
    for (r, exact) in oracles {
        let z = c(r, 0.0);
        let opt = optimal_error_stirling(z).map_err(|e| e.to_string())?;
        let actual = binet_remainder(z, 2 * opt.n_opt, &cfg).map_err(|e| e.to_string())?.value.norm();
        check(
            (actual - exact).abs() < 1e-10 * exact,
            format!("|z|={r}: remainder {actual:e} vs reference {exact:e}"),
        )?;
        let constant = ERROR_CONSTANT_M * (-2.0 * PI * r).exp();
        check(actual < opt.bound * (1.0 + 1e-12), format!("|z|={r}: actual {actual:e} > bound {:e}", opt.bound))?;
        check(opt.bound < constant * (1.0 + 1e-12), format!("|z|={r}: bound {:e} > {constant:e}", opt.bound))?;
        if r == 5.0 {
            // resolvable in double precision without the remainder integral
            let direct = (binet_p(z, &cfg).map_err(|e| e.to_string())? - stirling_partial_sum(z, opt.n_opt).unwrap()).norm();
            check((direct - actual).abs() < 1e-16, format!("direct difference {direct:e} vs {actual:e}"))?;
        }
        notes.push(format!("|z|={r}: {actual:.3e} <= {:.3e} <= {constant:.3e}", opt.bound));
    }
    Ok(notes.join("; "))
}

fn n_opt_reproduction() -> Outcome {
    let z = c(10.0, 0.0);
    let (n, _) = brute_force_n_opt(z, 64).map_err(|e| e.to_string())?;
    let closed = optimal_error_stirling(z).map_err(|e| e.to_string())?.n_opt;
    check(closed == 30, format!("floor(pi|z| - 1) = {closed}"))?;
    check(n.abs_diff(30) <= 1, format!("brute-force argmin {n}"))?;
    Ok(format!("brute force {n}, closed form {closed}"))
}

fn borel_radius() -> Outcome {
    let f = BorelCoefficients::new(binet_taylor_coeffs(39).to_f64(), None).map_err(|e| e.to_string())?;
    let r = radius_estimate(&f).map_err(|e| e.to_string())?;
    let rel = (r / (2.0 * PI) - 1.0).abs();
    check(f.len() == 40 && rel < 0.05, format!("radius {r}"))?;
    Ok(format!("radius {r:.6} (2 pi = {:.6}, rel {rel:.1e})", 2.0 * PI))
}

// int_0^inf e^{-5t}/(1+t) dt from an independent quadrature
const STIELTJES_5: f64 = 0.17042217628473220;

fn euler_series(len: usize) -> CoefficientSequence {
    let mut fact = BigInt::from(1);
    let v = (0..len)
        .map(|n| {
            if n > 0 {
                fact *= n;
            }
            Rational::from_integer(if n % 2 == 0 { fact.clone() } else { -fact.clone() })
        })
        .collect();
    CoefficientSequence::new(SequenceKind::User, v).unwrap()
}

fn borel_laplace_round_trip() -> Outcome {
    let cfg = BorelSumConfig::default();
    let st = stirling_coeffs(40);
    let mut notes = Vec::new();
    for r in [5.0, 10.0] {
        let z = c(r, 0.0);
        let s = borel_sum(&st, z, &cfg).map_err(|e| e.to_string())?;
        let p = binet_p(z, &BinetConfig::default()).map_err(|e| e.to_string())?;
        let err = (s.value - p).norm();
        check(err < 1e-8, format!("Stirling z={r}: error {err:e}"))?;
        notes.push(format!("Stirling z={r} err {err:.1e}"));
    }
    let s = borel_sum(&euler_series(41), c(5.0, 0.0), &cfg).map_err(|e| e.to_string())?;
    let err = (s.value - c(STIELTJES_5, 0.0)).norm();
    check(err < 1e-6, format!("Euler z=5: error {err:e}"))?;
    notes.push(format!("Euler z=5 err {err:.1e}"));
    Ok(notes.join("; "))
}

fn non_uniqueness() -> Outcome {
    for delta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let ce = counterexample(|_| c(1.0, 0.0), 1.0, delta, 41).map_err(|e| e.to_string())?;
        check(ce.expansion.m == 1.0 && (ce.expansion.a - delta.sin()).abs() < 1e-15, "constants")?;
        check(ce.expansion.coeff_values().iter().all(|&v| v == 0.0), "null coefficients")?;
        let half = FRAC_PI_2 - delta;
        let grid: Vec<Complex64> = [1.0, 2.0, 5.0, 10.0, 20.0]
            .iter()
            .flat_map(|&r| [-0.95, -0.3, 0.3, 0.95].map(|f| Complex64::from_polar(r, f * half)))
            .collect();
        let rep = verify_gevrey(|z| ce.sample(z), &ce.expansion, &ce.sector(), &grid, 40, DEFAULT_TOLERANCE)
            .map_err(|e| e.to_string())?;
        check(grid.len() == 20 && rep.skipped.is_empty() && rep.rows.len() == 20 * 41, "grid")?;
        check(rep.pass, format!("delta {delta}: max ratio {}", rep.max_ratio()))?;
    }
    Ok("delta in {pi/6, pi/4, pi/3}: 20 points x 41 orders pass".into())
}

fn ray_consistency() -> Outcome {
    let delta = FRAC_PI_4;
    // e^{-z} decays like e^{-|z| sin(delta)} on the rays arg z = +-(pi/2 - delta)
    let a = delta.sin();
    let wide = t_regions(delta, 1.0).map_err(|e| e.to_string())?;
    let narrow = t_regions(delta, a).map_err(|e| e.to_string())?;
    let q = QuadratureConfig::default();
    let p = |z: Complex64| (-z).exp();
    let mut worst: f64 = 0.0;
    for t in [c(0.0, 0.0), c(-1.0, 0.0), c(0.3, 0.0), c(-0.5, 0.5), c(0.2, -0.3)] {
        check(wide.in_s1(t) && narrow.in_s1(t), format!("{t} not in S_1"))?;
        let up = ray_transform(p, FRAC_PI_2 - delta, t, a, &q).map_err(|e| e.to_string())?.value;
        let down = ray_transform(p, -FRAC_PI_2 + delta, t, a, &q).map_err(|e| e.to_string())?.value;
        let diff = (up - down).norm();
        check(diff < 1e-8, format!("t={t}: rays differ by {diff:e}"))?;
        for (theta, v) in [(FRAC_PI_2 - delta, up), (-FRAC_PI_2 + delta, down)] {
            let b = ray_transform_bound(1.0, a, theta, t);
            check(v.norm() <= b, format!("t={t}: |F| = {} > {b}", v.norm()))?;
        }
        worst = worst.max(diff);
    }
    Ok(format!("5 points, max ray difference {worst:.1e}, bound respected"))
}

fn uniqueness_classifier() -> Outcome {
    let mut run = runner(64);
    let strat = (1.0f64..=10.0, 1.0f64..=10.0, 1.0f64..=10.0);
    let count = std::cell::Cell::new(0);
    let res = run.run(&strat, |(m, b, gamma)| {
        let v = carleman_loglog(&MDeltaProfile::Exponential { m, b, gamma })
            .map_err(|e| proptest::test_runner::TestCaseError::fail(e.to_string()))?;
        count.set(count.get() + 1);
        proptest::prop_assert!(v.finite && v.value.is_finite(), "M={m} b={b} gamma={gamma}");
        Ok(())
    });
    res.map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..400)
        .map(|i| 1e-4 * (FRAC_PI_2 / 1e-4).powf(i as f64 / 399.0))
        .collect();
    let expexp = MDeltaProfile::Tabulated {
        scale: TabulatedScale::LogLog,
        samples: grid.iter().map(|&d| (d, 1.0 / d)).collect(),
    };
    let v = carleman_loglog(&expexp).map_err(|e| e.to_string())?;
    check(!v.finite, "exp(exp(1/delta)) classified finite")?;
    Ok(format!("{} exponential profiles finite; exp(exp(1/delta)) divergent ({:?})", count.get(), v.confidence))
}

fn widened_sector() -> Outcome {
    let mut notes = Vec::new();
    for eps in [0.1, 0.3] {
        let w = verify_widened_sector(eps, 8.0, 10, 1e-2, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
        check((w.a - 0.99 * 2.0 * PI * eps.cos()).abs() < 1e-14, "rate")?;
        check(w.report.pass && w.report.rows.len() == 22, format!("eps={eps}: max ratio {}", w.report.max_ratio()))?;
        notes.push(format!("eps={eps}: a={:.4}, fitted M={:.4}, max ratio {:.3}", w.a, w.m_fit, w.report.max_ratio()));
    }
    Ok(notes.join("; "))
}

fn log_gamma_accuracy() -> Outcome {
    let cfg = BinetConfig::default();
    let mut ln_fact = 0.0f64;
    let mut worst: f64 = 0.0;
    for n in 2..=20u32 {
        ln_fact += ((n - 1) as f64).ln();
        let v = log_gamma(c(n as f64, 0.0), &cfg).map_err(|e| e.to_string())?;
        let err = (v - c(ln_fact, 0.0)).norm();
        check(err < 1e-12, format!("n={n}: error {err:e}"))?;
        worst = worst.max(err);
    }
    let mut run = runner(20);
    let count = std::cell::Cell::new(0);
    run.run(&(1.0f64..10.0, -5.0f64..5.0), |(re, im)| {
        let z = c(re, im);
        let d = log_gamma(z + 1.0, &cfg).unwrap() - log_gamma(z, &cfg).unwrap();
        count.set(count.get() + 1);
        proptest::prop_assert!((d - z.ln()).norm() < 1e-10, "z={z}");
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok(format!("max error {worst:.1e} for n = 2..20; recurrence at {} random points", count.get()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("coefficient exactness", coefficient_exactness, 1),
        ("Stirling error-bound reproduction", stirling_error_bound, 5),
        ("n_opt reproduction", n_opt_reproduction, 1),
        ("Borel radius", borel_radius, 1),
        ("Borel-Laplace round trip", borel_laplace_round_trip, 10),
        ("non-uniqueness demonstration", non_uniqueness, 2),
        ("ray-transform consistency", ray_consistency, 5),
        ("uniqueness classifier", uniqueness_classifier, 2),
        ("widened-sector rate", widened_sector, 10),
        ("log Gamma accuracy", log_gamma_accuracy, 2),
    ];
    let mut failures = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{msg}; runtime {:.2}s over {limit}s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name} ({:.2}s): {msg}", i + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name} ({:.2}s): {msg}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
