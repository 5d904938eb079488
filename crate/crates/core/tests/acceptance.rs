//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::{LN_2, TAU};
use std::time::Instant;

use dirichlet_lab::green::{boundary_lp_check, hardy_stein_rhs, littlewood_paley, AreaMethod};
use dirichlet_lab::mean::{torus_mean, MeanSchedule};
use dirichlet_lab::series::{Analytic, BlaschkeData, Character, DirichletPolynomial};
use dirichlet_lab::torus::{
    gap_experiment, line_segments, oscillation_experiment, parallelogram_cover, random_polygon_set, visit_fraction,
    GapSpec, OscillationSpec,
};
use dirichlet_lab::zeros::{isolate_zeros, jensen_check, logxi_bounds, mean_counting, winding_number, Rectangle};
use dirichlet_lab::{corpus, Complex64};
use proptest::prelude::*;
use proptest::test_runner::{RngSeed, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn dp(t: &[(u64, f64)]) -> DirichletPolynomial {
    DirichletPolynomial::from_real(t).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn hardy_stein_closed_form() -> Outcome {
    let start = Instant::now();
    let f = dp(&[(2, 1.0)]);
    let (mut worst_cf, mut worst_q) = (0.0f64, 0.0f64);
    for p in [1.0, 2.0, 3.0] {
        for kappa in [0.5, 1.0] {
            let want = -p * LN_2 * 2f64.powf(-p * kappa);
            let cf = hardy_stein_rhs(&f, p, kappa, 200.0, AreaMethod::ClosedForm).map_err(err)?;
            let q = hardy_stein_rhs(&f, p, kappa, 200.0, AreaMethod::Quadrature).map_err(err)?;
            worst_cf = worst_cf.max(rel(cf.value, want));
            worst_q = worst_q.max(rel(q.value, want));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_cf <= 1e-6 && worst_q <= 1e-3 && secs < 10.0,
        format!("closed-form rel {worst_cf:.2e} (<= 1e-6), quadrature rel {worst_q:.2e} (<= 1e-3), {secs:.1}s"),
    )
}

fn hardy_stein_parseval() -> Outcome {
    let start = Instant::now();
    let f = dp(&[(1, 1.0), (2, 1.0), (3, 1.0)]);
    let mut worst = 0.0f64;
    for kappa in [0.5, 1.0] {
        let want: f64 = -[2.0f64, 3.0].iter().map(|n| 2.0 * n.ln() * n.powf(-2.0 * kappa)).sum::<f64>();
        let v = hardy_stein_rhs(&f, 2.0, kappa, 400.0, AreaMethod::Quadrature).map_err(err)?;
        worst = worst.max(rel(v.value, want));
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-2 && secs < 60.0, format!("quadrature at T = 400: rel {worst:.2e} (<= 1e-2), {secs:.1}s"))
}

fn lp_closure() -> Outcome {
    let schedule = MeanSchedule::default();
    let mono = dp(&[(2, 1.0)]);
    let mut worst = 0.0f64;
    for p in [1.0, 2.0, 4.0] {
        let r = littlewood_paley(&mono, p, &schedule, AreaMethod::Auto).map_err(err)?;
        worst = worst.max((r.lhs - 1.0).abs()).max((r.rhs - 1.0).abs());
    }
    let r = littlewood_paley(&dp(&[(1, 1.0), (2, 0.5)]), 2.0, &schedule, AreaMethod::Quadrature).map_err(err)?;
    let two = (r.lhs - 1.25).abs().max((r.rhs - 1.25).abs());
    check(
        worst <= 1e-3 && two <= 2e-2,
        format!("2^-s max deviation {worst:.2e} (<= 1e-3); 1 + 2^-s/2 deviation {two:.2e} (<= 2e-2)"),
    )
}

fn boundary_lp() -> Outcome {
    let schedule = MeanSchedule::new(vec![50.0, 100.0, 200.0], 4, 1e-3).map_err(err)?;
    let mut failed = Vec::new();
    let mut worst = 0.0f64;
    for e in corpus::CORPUS.iter() {
        let f = corpus::build(e.name).map_err(err)?;
        let r = boundary_lp_check(&f, 2.0, &schedule, AreaMethod::Auto).map_err(err)?;
        worst = worst.max(r.trace.last().unwrap().1.abs() / r.lhs.max(1.0));
        if !r.passed() {
            failed.push(e.name);
        }
    }
    check(failed.is_empty(), format!("6 corpus entries, worst final |residual|/max(lhs, 1) = {worst:.2e}; failing: {failed:?}"))
}

fn zero_lattice() -> Outcome {
    let f = dp(&[(1, 1.0), (2, -2.0)]);
    let mut notes = Vec::new();
    let mut ok = true;
    for t in [20.0, 50.0] {
        let r = Rectangle::new(0.5, 1.5, -t, t).map_err(err)?;
        let zs = isolate_zeros(&f, &r, 1e-9).map_err(err)?.into_complete().map_err(err)?;
        let want = 2 * (t * LN_2 / TAU).floor() as usize + 1;
        let step = TAU / LN_2;
        let dist = zs
            .iter()
            .map(|z| {
                let k = (z.location.im / step).round();
                (z.location - Complex64::new(1.0, k * step)).norm()
            })
            .fold(0.0, f64::max);
        ok &= zs.len() == want && zs.iter().all(|z| z.multiplicity == 1) && dist <= 1e-9;
        notes.push(format!("T = {t}: {} zeros (want {want}), max distance {dist:.1e}", zs.len()));
    }
    let j = jensen_check(&f, 0.5, &MeanSchedule::default(), &mut ChaCha8Rng::seed_from_u64(0)).map_err(err)?;
    let want = 0.5 * LN_2;
    let dj = (j.lhs - want).abs();
    ok &= dj <= 5e-2;
    notes.push(format!("Jensen at 0.5: {:.5} vs {want:.5}", j.lhs));
    check(ok, notes.join("; "))
}

fn mean_counting_checks() -> Outcome {
    let schedule = MeanSchedule::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mono = dp(&[(2, 1.0)]);
    let mut worst = 0.0f64;
    for xi in [Complex64::new(0.3, 0.0), Complex64::from_polar(0.5, 1.0), Complex64::new(0.8, 0.0)] {
        let m = mean_counting(&mono, xi, &schedule, &mut rng).map_err(err)?;
        let want = -xi.norm().ln();
        // f(+inf) = 0, so the Littlewood bound is log(1/|xi|) as well
        worst = worst.max((m.value - want).abs());
    }
    let g = dp(&[(2, 0.5), (3, 0.5)]);
    let mut slack = f64::INFINITY;
    for _ in 0..20 {
        let xi = Complex64::from_polar(rng.gen_range(0.05..0.95), rng.gen_range(0.0..TAU));
        let m = mean_counting(&g, xi, &schedule, &mut rng).map_err(err)?;
        slack = slack.min(-xi.norm().ln() - m.value);
    }
    check(
        worst <= 0.02 && slack >= -0.02,
        format!("2^-s: max |M - log(1/|xi|)| = {worst:.2e} (<= 0.02); (2^-s + 3^-s)/2: min slack {slack:.3} (>= -0.02)"),
    )
}

fn ergodic_visit() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let count = rng.gen_range(1..=4);
        let u = random_polygon_set(count, &mut rng);
        let v = visit_fraction(&u, 2000.0).map_err(err)?;
        worst = worst.max((v.fraction - v.measure).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 0.03 && secs < 30.0, format!("10 sets at T = 2000: max deviation {worst:.4} (<= 0.03), {secs:.1}s"))
}

fn ss_gap() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cover = parallelogram_cover(10.0, 0.3, &mut rng).map_err(err)?;
    let m = cover.set.area();
    if m > 0.1 * TAU * TAU {
        return Err(format!("cover area {m} exceeds 0.1 (2 pi)^2"));
    }
    let out = gap_experiment(&cover.set, &GapSpec::default(), &mut rng).map_err(err)?;
    let gap = out.report.lhs - out.report.rhs;
    let e_inf = out.construction.e_inf;
    check(
        out.report.passed() && gap >= 0.2 && e_inf <= 0.1,
        format!("line 2-mean - torus 2-mean = {gap:.3} (>= 0.2), e_inf = {e_inf:.3} (<= 0.1), m(U) = {:.4}", m / (TAU * TAU)),
    )
}

fn oscillation() -> Outcome {
    let spec = OscillationSpec::default();
    let r = oscillation_experiment(&spec, &mut ChaCha8Rng::seed_from_u64(0)).map_err(err)?;
    check(
        r.report.passed(),
        format!(
            "c = {}, C = {}, predicted spread {:.4}, smallest consecutive difference {:.4}, alternates = {}",
            r.c, r.big_c, r.predicted_spread, r.min_spread, r.report.params["alternates"]
        ),
    )
}

fn runner() -> TestRunner {
    TestRunner::new(ProptestConfig {
        cases: 500,
        rng_seed: RngSeed::Fixed(0),
        failure_persistence: None,
        ..ProptestConfig::default()
    })
}

fn small_series() -> impl Strategy<Value = DirichletPolynomial> {
    prop::collection::vec((1u64..13, -1.0f64..1.0, -1.0f64..1.0), 1..5).prop_map(|v| {
        let mut seen = std::collections::BTreeMap::new();
        for (n, re, im) in v {
            seen.insert(n, Complex64::new(re, im));
        }
        DirichletPolynomial::new(seen.into_iter().collect()).unwrap()
    })
}

fn invariants() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut record = |name: &str, r: Result<(), String>| {
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    };

    let r = runner().run(&(small_series(), -5.0f64..5.0, 0.0f64..2.0, -20.0f64..20.0), |(f, tau, x, y)| {
        let s = Complex64::new(x, y);
        prop_assert!((f.vertical_translate(tau).eval(s) - f.eval(s + Complex64::new(0.0, tau))).norm() < 1e-10);
        let chi = Character::vertical(tau, &f.primes());
        prop_assert!((f.twist(&chi).unwrap().eval(s) - f.eval(s + Complex64::new(0.0, tau))).norm() < 1e-10);
        Ok(())
    });
    record("vertical translation", r.map_err(|e| e.to_string()));

    let r = runner().run(
        &(prop::collection::vec((0.05f64..3.0, -10.0f64..10.0), 1..6), 0.01f64..4.0, -20.0f64..20.0),
        |(zs, x, y)| {
            let b = BlaschkeData::new(zs.iter().map(|&(a, c)| Complex64::new(a, c)).collect()).unwrap();
            match b.eval(Complex64::new(x, y)) {
                Ok(v) => prop_assert!(v.norm() <= 1.0 + 1e-12),
                Err(_) => {}
            }
            Ok(())
        },
    );
    record("Blaschke modulus", r.map_err(|e| e.to_string()));

    let r = runner().run(&(small_series(), 0.0f64..1.0), |(f, sigma)| {
        let parseval: f64 = f.terms().iter().map(|t| t.coeff.norm_sqr() * (t.n as f64).powf(-2.0 * sigma)).sum();
        let m = torus_mean(&f, sigma, 2.0).unwrap();
        prop_assert!((m - parseval).abs() <= 1e-9 * parseval.max(1.0));
        Ok(())
    });
    record("Parseval torus mean", r.map_err(|e| e.to_string()));

    let r = runner().run(&(small_series(), 0.2f64..1.5), |(f, kappa)| {
        let v = hardy_stein_rhs(&f, 2.0, kappa, 100.0, AreaMethod::Spectral).unwrap();
        prop_assert!(v.value <= 0.0);
        Ok(())
    });
    record("Hardy-Stein sign", r.map_err(|e| e.to_string()));

    let r = runner().run(&(0.0f64..0.99, 0.0..TAU, 0.0f64..0.99, 0.0..TAU), |(rz, az, rx, ax)| {
        let (z, xi) = (Complex64::from_polar(rz, az), Complex64::from_polar(rx, ax));
        if (z - xi).norm() > 1e-9 {
            prop_assert!(logxi_bounds(z, xi).unwrap().holds());
        }
        Ok(())
    });
    record("pseudo-hyperbolic bounds", r.map_err(|e| e.to_string()));

    let davenport = dp(&[(1, 1.0), (2, -2.0)]);
    let step = TAU / LN_2;
    let r = runner().run(&(0.1f64..0.9, 1.1f64..2.0, -60.0f64..60.0, 1.0f64..30.0), |(s0, s1, t0, h)| {
        let lattice = |t: f64| (t / step).floor();
        let want = (lattice(t0 + h) - lattice(t0)) as i64;
        // keep clear of zeros on the horizontal edges
        let near = |t: f64| ((t / step) - (t / step).round()).abs() * step < 1e-3;
        if !near(t0) && !near(t0 + h) {
            let w = winding_number(&davenport, &Rectangle::new(s0, s1, t0, t0 + h).unwrap()).unwrap();
            prop_assert_eq!(w, want);
        }
        Ok(())
    });
    record("winding against lattice", r.map_err(|e| e.to_string()));

    let r = runner().run(&(-50.0f64..50.0, 0.01f64..60.0), |(a, len)| {
        let segs = line_segments(a, a + len).unwrap();
        prop_assert!(segs.segments.len() >= 1);
        let total: f64 = segs.segments.iter().map(|s| s.tau1 - s.tau0).sum();
        prop_assert!((total - len).abs() < 1e-9 * len.max(1.0));
        Ok(())
    });
    record("flow segments cover the range", r.map_err(|e| e.to_string()));

    let r = runner().run(&(0u64..u64::MAX), |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_polygon_set(2, &mut rng);
        let b = random_polygon_set(2, &mut rng);
        let (ua, ub, uu) = (a.area(), b.area(), a.union(&b).area());
        prop_assert!(uu + 1e-9 >= ua.max(ub));
        prop_assert!((a.difference(&b).area() + ub - uu).abs() < 1e-9);
        let v = visit_fraction(&a, 50.0).unwrap();
        prop_assert!((0.0..=1.0).contains(&v.fraction));
        Ok(())
    });
    record("set algebra and visit fraction", r.map_err(|e| e.to_string()));

    let secs = start.elapsed().as_secs_f64();
    let n = 8;
    if failures.is_empty() {
        Ok(format!("{n} suites x 500 cases, seed 0, {secs:.1}s"))
    } else {
        Err(failures.join("; "))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closed-form Hardy-Stein", hardy_stein_closed_form),
        ("Parseval-derivative Hardy-Stein", hardy_stein_parseval),
        ("Littlewood-Paley closure", lp_closure),
        ("boundary Littlewood-Paley", boundary_lp),
        ("zero lattice and Jensen", zero_lattice),
        ("mean counting", mean_counting_checks),
        ("ergodic visit", ergodic_visit),
        ("outer-function gap", ss_gap),
        ("oscillation", oscillation),
        ("invariant suites", invariants),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
