//! Acceptance suite. Prints one PASS/FAIL line per criterion (with indented
//! detail lines) and exits nonzero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::process::Command;
use std::time::Instant;

use common::*;
use rand::Rng;
use xsdep::cd_tests::{lm_p_trace_form, mu_lm_e, TestConstants, TestName, UnitProjectors};
use xsdep::corr::summarize_residuals;
use xsdep::mc::{
    run_experiment, simulate_statistics, trace_gap_probe, Alternative, DgpConfig, ErrorDist, McReport, SlopeMode,
};
use xsdep::panel::center_panel;
use xsdep::special::{ks_test, normal_cdf};

const SEED: u64 = 20261017;
const REPS: usize = 2000;
const ALPHA: f64 = 0.05;

/// Reference empirical sizes (%) for Normal errors, k = 2: (T, n, LM_e, PET, LM_adj, CD).
const SIZE_TABLE: [(usize, usize, f64, f64, f64, f64); 4] = [
    (50, 50, 5.00, 5.25, 5.20, 5.45),
    (50, 100, 5.05, 5.65, 5.15, 4.95),
    (100, 50, 5.45, 4.80, 5.75, 4.45),
    (100, 100, 5.00, 4.70, 5.05, 5.50),
];

struct Suite {
    cache: HashMap<String, McReport>,
    failures: Vec<usize>,
}

impl Suite {
    fn experiment(&mut self, cfg: &DgpConfig) -> &McReport {
        let key = format!("{cfg:?}");
        self.cache
            .entry(key)
            .or_insert_with(|| run_experiment(cfg, REPS, ALPHA, SEED).expect("experiment runs"))
    }

    fn report(&mut self, id: usize, title: &str, ok: bool, started: Instant) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {id} {verdict}: {title} ({:.1}s)",
            started.elapsed().as_secs_f64()
        );
        if !ok {
            self.failures.push(id);
        }
    }
}

fn detail(line: String) {
    println!("    {line}");
}

fn size_reproduction(suite: &mut Suite) {
    let started = Instant::now();
    let mut ok = true;
    for (t, n, lm_e, pet, lm_adj, cd) in SIZE_TABLE {
        let rep = suite.experiment(&DgpConfig::new(n, t, 2)).clone();
        for (test, reference) in [
            (TestName::LmE, lm_e),
            (TestName::Pet, pet),
            (TestName::LmBc, 5.00),
            (TestName::LmAdj, lm_adj),
            (TestName::Cd, cd),
        ] {
            let got = 100.0 * rep.rate(test);
            let pass = (got - reference).abs() <= 1.5;
            ok &= pass;
            detail(format!(
                "T={t:>3} n={n:>3} {:<6} {got:5.2}% vs {reference:5.2}% {}",
                test.as_str(),
                if pass { "ok" } else { "OUT" }
            ));
        }
    }
    suite.report(1, "null sizes within ±1.5pp of the reference table (LM_bc vs nominal 5%)", ok, started);
}

fn dense_power(suite: &mut Suite) {
    let started = Instant::now();
    let mut ok = true;
    for h in 1..=4 {
        let cfg = DgpConfig::new(50, 100, 2).with_alternative(Alternative::Dense(h as f64));
        let rep = suite.experiment(&cfg).clone();
        let cd = rep.rate(TestName::Cd);
        let cd_ok = cd < 0.10;
        ok &= cd_ok;
        detail(format!(
            "h={h} LM_e={:.4} PET={:.4} CD={cd:.4} {}",
            rep.rate(TestName::LmE),
            rep.rate(TestName::Pet),
            if cd_ok { "ok" } else { "CD too high" }
        ));
        if h == 2 {
            for (test, reference) in [(TestName::Pet, 0.9375), (TestName::LmE, 0.8445)] {
                let got = rep.rate(test);
                let pass = (got - reference).abs() <= 0.04;
                ok &= pass;
                detail(format!(
                    "h=2 {:<4} {got:.4} vs {reference:.4} {}",
                    test.as_str(),
                    if pass { "ok" } else { "OUT" }
                ));
            }
        }
    }
    suite.report(2, "dense power at n=50, T=100 (PET, LM_e at h=2; CD below 0.10)", ok, started);
}

fn power_enhancement(suite: &mut Suite) {
    let started = Instant::now();
    let mut ok = true;
    // The 0.05 gap applies at the dense reference setting (n=50, T=100). At
    // n=100 the reference gap at h=1 is itself 0.0245, so that row is shown only.
    for n in [50, 100] {
        for h in [1.0, 2.0] {
            let cfg = DgpConfig::new(n, 100, 2).with_alternative(Alternative::Dense(h));
            let rep = suite.experiment(&cfg).clone();
            let gain = rep.rate(TestName::Pet) - rep.rate(TestName::LmE);
            let verdict = if n != 50 {
                "info"
            } else if gain >= 0.05 {
                "ok"
            } else {
                ok = false;
                "SHORT"
            };
            detail(format!("dense n={n} h={h} PET-LM_e={gain:+.4} {verdict}"));
        }
    }
    let mut worst = f64::INFINITY;
    let mut cells = 0;
    for alt in [Alternative::Sparse, Alternative::LessSparse] {
        for k in [2, 4] {
            for t in [50, 100] {
                for dist in ErrorDist::ALL {
                    for n in [50, 100, 200] {
                        let cfg = DgpConfig::new(n, t, k).with_errors(dist).with_alternative(alt);
                        let rep = suite.experiment(&cfg).clone();
                        let (pet, lm_e) = (rep.rate(TestName::Pet), rep.rate(TestName::LmE));
                        let se = rep.se(TestName::Pet).max(rep.se(TestName::LmE));
                        let margin = pet - (lm_e - 2.0 * se);
                        worst = worst.min(margin);
                        cells += 1;
                        if margin < 0.0 {
                            ok = false;
                            detail(format!(
                                "{alt} k={k} T={t} {dist} n={n}: PET={pet:.4} LM_e={lm_e:.4} se={se:.4} VIOLATED"
                            ));
                        }
                    }
                }
            }
        }
    }
    detail(format!("sparse/less-sparse: {cells} cells, smallest PET-(LM_e-2se) = {worst:+.4}"));
    suite.report(3, "PET power enhancement over LM_e", ok, started);
}

fn null_normality() -> bool {
    let cfg = DgpConfig::new(100, 100, 2);
    let runs = simulate_statistics(&cfg, REPS, ALPHA, SEED).expect("simulation runs");
    let mut ok = true;
    for test in [TestName::LmE, TestName::Pet] {
        let sample: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.as_ref().ok())
            .map(|rs| rs.iter().find(|r| r.test == test).unwrap().statistic)
            .collect();
        let mean = sample.iter().sum::<f64>() / sample.len() as f64;
        let sd = (sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (sample.len() - 1) as f64).sqrt();
        let (d, p) = ks_test(&sample, normal_cdf);
        let pass = p > 0.01;
        ok &= pass;
        detail(format!(
            "{:<4} m={} mean={mean:+.4} sd={sd:.4} D={d:.4} p={p:.4} {}",
            test.as_str(),
            sample.len(),
            if pass { "ok" } else { "REJECTED" }
        ));
    }
    ok
}

fn oracle_equivalences() -> bool {
    let mut rng = rng(SEED);
    let mut worst2: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=50);
        let t = rng.random_range(3..=60);
        let e = normal_matrix(&mut rng, n, t);
        let cs = summarize_residuals(e.view()).unwrap();
        let r = naive_correlation(&e);
        let double: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| r[[i, j]] * r[[i, j]])
            .sum();
        worst2 = worst2.max(rel_diff(cs.trace_r2, double + n as f64));
    }
    let mut worst4: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let t = rng.random_range(3..=20);
        let e = normal_matrix(&mut rng, n, t);
        let cs = summarize_residuals(e.view()).unwrap();
        worst4 = worst4.max(rel_diff(cs.trace_r4, quadruple_sum(&naive_correlation(&e))));
    }
    let mut worst_adj: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=3);
        let t = rng.random_range(5..=12);
        let kx = rng.random_range(1..=2);
        let cp = center_panel(&random_panel(&mut rng, n, t, kx));
        let proj = UnitProjectors::from_centered(&cp).unwrap();
        let ms: Vec<_> = (0..n)
            .map(|i| {
                let ones = ndarray::Array2::<f64>::ones((1, t));
                annihilator(&ndarray::concatenate![ndarray::Axis(0), ones, cp.unit_design(i)])
            })
            .collect();
        for a in 0..n {
            for b in 0..n {
                let (t1, t2) = brute_traces(&ms[a], &ms[b]);
                let got = proj.pair(a, b);
                worst_adj = worst_adj.max((got.tr_mm - t1).abs()).max((got.tr_mm2 - t2).abs());
            }
        }
    }
    detail(format!("tr(R²) vs double sum: max rel diff {worst2:.2e} (tol 1e-8)"));
    detail(format!("tr(R⁴) vs quadruple sum: max rel diff {worst4:.2e} (tol 1e-8)"));
    detail(format!("LM_adj traces vs T×T projectors: max abs diff {worst_adj:.2e} (tol 1e-9)"));
    worst2 < 1e-8 && worst4 < 1e-8 && worst_adj < 1e-9
}

fn algebraic_identities() -> bool {
    let mut rng = rng(SEED ^ 0x5eed);
    let mut mu_ok = true;
    for _ in 0..1000 {
        let n = rng.random_range(2..=5000);
        let t = rng.random_range(4..=5000);
        let c = TestConstants::new(n, t, 2).unwrap();
        mu_ok &= c.mu_rmt == c.mu_lm_e;
    }
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..=60);
        let t = rng.random_range(3..=80);
        let cs = summarize_residuals(normal_matrix(&mut rng, n, t).view()).unwrap();
        let c = cs.c_t();
        let lhs = (cs.trace_r2 - mu_lm_e(n, t)) / (2.0 * c);
        let rhs = lm_p_trace_form(&cs) - c / 2.0;
        worst = worst.max((lhs - rhs).abs());
    }
    detail(format!("μ_rmt == μ_LM_e on 1000 random (n,T): {mu_ok}"));
    detail(format!("bridge identity: max abs diff {worst:.2e} (tol 1e-10)"));
    mu_ok && worst < 1e-10
}

fn trace_gap_shrinkage() -> bool {
    let mut med2 = Vec::new();
    let mut med4 = Vec::new();
    for size in [50, 100, 200] {
        let rep = trace_gap_probe(&DgpConfig::new(size, size, 2), 200, SEED).unwrap();
        detail(format!(
            "n=T={size}: median |Δtr2|={:.5} median |Δtr4|={:.5} (excluded {})",
            rep.median_gap2(),
            rep.median_gap4(),
            rep.excluded
        ));
        med2.push(rep.median_gap2());
        med4.push(rep.median_gap4());
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    decreasing(&med2) && decreasing(&med4)
}

fn cli_determinism() -> bool {
    let dir = tempfile::TempDir::new().unwrap();
    let cfg = dir.path().join("grid.toml");
    std::fs::write(
        &cfg,
        "replications = 200\nalpha = 0.05\n\n[grid]\nn = [20, 50]\nT = [50]\nk = [2]\n\
         error_dist = [\"normal\", \"chi-square5\"]\nalternative = [\"null\", \"dense:2\", \"sparse\"]\n",
    )
    .unwrap();
    let run = |threads: &str, name: &str| -> Vec<u8> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_xsdep"))
            .env("XSDEP_THREADS", threads)
            .args(["simulate", "--config"])
            .arg(&cfg)
            .args(["--seed", &SEED.to_string(), "--out"])
            .arg(&out)
            .status()
            .expect("binary runs");
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("8", "eight.toml");
    let b = run("1", "one.toml");
    detail(format!("report sizes {} and {} bytes, identical: {}", a.len(), b.len(), a == b));
    a == b
}

fn heterogeneous_note(suite: &mut Suite) {
    let started = Instant::now();
    let mut inside = 0;
    let mut total = 0;
    for t in [50, 100] {
        for dist in ErrorDist::ALL {
            for n in [50, 100, 200] {
                let cfg = DgpConfig::new(n, t, 2).with_errors(dist).with_slopes(SlopeMode::Heterogeneous);
                let rep = suite.experiment(&cfg).clone();
                for test in [TestName::LmE, TestName::Pet, TestName::LmAdj, TestName::Cd] {
                    let r = rep.rate(test);
                    total += 1;
                    if (0.03..=0.07).contains(&r) {
                        inside += 1;
                    } else {
                        detail(format!("T={t} {dist} n={n} {}: {r:.4} outside [0.03, 0.07]", test.as_str()));
                    }
                }
            }
        }
    }
    println!(
        "note {}: heterogeneous-slope null sizes in [0.03, 0.07] for {inside}/{total} (cell, test) pairs ({:.1}s)",
        if inside == total { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture` or a name filter.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let mut suite = Suite {
        cache: HashMap::new(),
        failures: Vec::new(),
    };
    println!("acceptance suite (seed {SEED}, {REPS} replications, alpha {ALPHA})");

    size_reproduction(&mut suite);
    dense_power(&mut suite);
    power_enhancement(&mut suite);

    let started = Instant::now();
    let ok = null_normality();
    suite.report(4, "KS test of null LM_e and PET statistics against N(0,1)", ok, started);

    let started = Instant::now();
    let ok = oracle_equivalences();
    suite.report(5, "trace and projector oracles", ok, started);

    let started = Instant::now();
    let ok = algebraic_identities();
    suite.report(6, "algebraic identities", ok, started);

    let started = Instant::now();
    let ok = trace_gap_shrinkage();
    suite.report(7, "trace gaps shrink as n and T grow", ok, started);

    let started = Instant::now();
    let ok = cli_determinism();
    suite.report(8, "simulate reports identical at 8 and 1 threads", ok, started);

    heterogeneous_note(&mut suite);

    if suite.failures.is_empty() {
        println!("acceptance: all 8 criteria passed");
    } else {
        println!("acceptance: failed criteria {:?}", suite.failures);
        std::process::exit(1);
    }
}
