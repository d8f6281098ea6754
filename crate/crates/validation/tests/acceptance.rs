//! Acceptance suite. One line per criterion:
//! `PASS|FAIL <id> <name> (<seconds>s): <detail>`.
//!
//! Tolerances and time limits are fixed here and never loosened. Runs with
//! `harness = false` so the lines are printed even when everything passes.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use birthday_core::bounds::{
    hardcore_asymptotic_ratio, hardcore_bounds, hardcore_crossing, leech_gap_hp, matching_bounds,
    matching_crossing, matching_scale_ratio, sphere24_certificate, square_asymptotic_ratio,
    square_failure_interval, RHO_24,
};
use birthday_core::geometry::{Metric, ModelParams};
use birthday_core::graphs::{catalog, count_by_size, Mode, RegularGraph};
use birthday_core::samplers::{
    estimate_prob_empty, repulsion_gap, Backend, EstimateMethod, SamplerOptions, CONFIDENCE_RADIUS,
};
use birthday_core::Error;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Runs the command line `birthday <args>` in-process and returns the exit
/// code with the report text (empty when the report went to `--out`).
fn birthday(args: &[&str]) -> (i32, String) {
    let argv = std::iter::once("birthday").chain(args.iter().copied());
    let manifest = match birthday_cli::parse_args(argv) {
        Ok(m) => m,
        Err(_) => return (1, String::new()),
    };
    if manifest.out.is_some() {
        return match birthday_cli::run(&manifest) {
            Ok(status) => (status.exit_code(), String::new()),
            Err(_) => (1, String::new()),
        };
    }
    match birthday_cli::render(&manifest) {
        Ok((text, status)) => (status.exit_code(), text),
        Err(_) => (1, String::new()),
    }
}

fn field(v: &Value, path: &[&str]) -> f64 {
    let mut cur = v;
    for p in path {
        cur = &cur[*p];
    }
    cur.as_f64()
        .unwrap_or_else(|| panic!("missing number at {path:?}"))
}

// 1
fn dimension_one_exactness() -> Verdict {
    let limit = Duration::from_secs(10);
    let mut notes = Vec::new();
    let mut pass = true;
    for (n, p) in [(3usize, 0.2f64), (4, 0.1), (10, 0.05)] {
        let target = (1.0 - n as f64 * p / 2.0).powi(n as i32 - 1);
        for method in ["telescoping", "naive-mc"] {
            let start = Instant::now();
            let (code, out) = birthday(&[
                "simulate",
                "--d",
                "1",
                "--n",
                &n.to_string(),
                "--p",
                &p.to_string(),
                "--replicas",
                "100000",
                "--seed",
                "7",
                "--method",
                method,
            ]);
            let took = start.elapsed();
            let v: Value = serde_json::from_str(&out).expect("json report");
            let mean = field(&v, &["results", "estimate", "mean"]);
            let se = field(&v, &["results", "estimate", "stderr"]);
            let ok = code == 0 && (mean - target).abs() <= CONFIDENCE_RADIUS * se && took < limit;
            pass &= ok;
            notes.push(format!(
                "n={n} {method}: {mean:.5}±{se:.1e} vs {target:.5} in {:.2}s",
                took.as_secs_f64()
            ));
        }
    }
    verdict(pass, notes.join("; "))
}

// 2
fn birthday_equality_at_two() -> Verdict {
    let mut pass = true;
    let mut graphs = 0;
    for g in catalog() {
        for mode in [Mode::IndependentSets, Mode::Matchings] {
            let c = count_by_size(&g, mode).unwrap().birthday_check(2);
            pass &= c.lhs == c.rhs;
            graphs += 1;
        }
    }
    let mut notes = vec![format!("{graphs} exact graph tables equal")];
    let opts = SamplerOptions::default();
    for metric in [Metric::L2, Metric::Linf] {
        for d in 1..=3 {
            let params = ModelParams::from_collision(2, d, metric, 0.15).unwrap();
            let e =
                estimate_prob_empty(&params, 10_000, 11, EstimateMethod::NaiveMc, &opts).unwrap();
            let ok = e.agrees_with(1.0 - params.p);
            pass &= ok;
            if !ok {
                notes.push(format!("{metric} d={d}: {} vs {}", e.mean, 1.0 - params.p));
            }
        }
    }
    notes.push("continuum d=1..3 in both metrics within 4 stderr".into());
    verdict(pass, notes.join("; "))
}

fn brute_independent_sets(g: &RegularGraph) -> Vec<u64> {
    let n = g.n();
    let mut counts = vec![0u64; n + 1];
    for mask in 0u64..(1 << n) {
        if g.edges()
            .iter()
            .all(|&(u, v)| mask >> u & 1 == 0 || mask >> v & 1 == 0)
        {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    counts
}

fn brute_matchings(g: &RegularGraph) -> Vec<u64> {
    let e = g.edges();
    let mut counts = vec![0u64; e.len() + 1];
    for mask in 0u64..(1 << e.len()) {
        let mut used = 0u64;
        let mut ok = true;
        for (i, &(u, v)) in e.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if used >> u & 1 == 1 || used >> v & 1 == 1 {
                    ok = false;
                    break;
                }
                used |= 1 << u | 1 << v;
            }
        }
        if ok {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    counts
}

fn trimmed(v: Vec<u64>) -> Vec<String> {
    let last = v.iter().rposition(|&c| c != 0).unwrap_or(0);
    v[..=last].iter().map(|c| c.to_string()).collect()
}

// 3
fn q3_oracle_table() -> Verdict {
    let start = Instant::now();
    let q3 = RegularGraph::hypercube(3).unwrap();
    let is = count_by_size(&q3, Mode::IndependentSets).unwrap();
    let m = count_by_size(&q3, Mode::Matchings).unwrap();
    let is_counts: Vec<String> = is.counts().iter().map(|c| c.to_string()).collect();
    let m_counts: Vec<String> = m.counts().iter().map(|c| c.to_string()).collect();
    let took = start.elapsed();
    let expected_is = ["1", "8", "16", "8", "2"];
    let pass = is_counts == expected_is
        && m.count(1).to_string() == "12"
        && m.count(2).to_string() == "42"
        && m.count(4).to_string() == "9"
        && is_counts == trimmed(brute_independent_sets(&q3))
        && m_counts == trimmed(brute_matchings(&q3))
        && took < Duration::from_secs(1);
    verdict(
        pass,
        format!("IS {is_counts:?}, M {m_counts:?}, power-set oracle agrees"),
    )
}

// 4
fn exact_catalog_ledger() -> Verdict {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for g in catalog() {
        let (n, d) = (g.n(), g.degree());
        let is = count_by_size(&g, Mode::IndependentSets).unwrap();
        let m = count_by_size(&g, Mode::Matchings).unwrap();
        for k in 0..=m.max_size() {
            checked += 1;
            if !m.birthday_check(k).holds {
                failures.push(format!("{} matching birthday k={k}", g.label()));
            }
            if k >= 1 && 56 * k <= 3 * n && !m.count(k).is_zero() {
                checked += 1;
                if !m.repulsion_check(k).unwrap().holds {
                    failures.push(format!("{} matching repulsion k={k}", g.label()));
                }
            }
        }
        for k in 1..=is.max_size() {
            if k * (d + 1) * (d + 1) <= n {
                checked += 1;
                if !is.repulsion_check(k).unwrap().holds {
                    failures.push(format!("{} IS repulsion k={k}", g.label()));
                }
            }
            match is.bipest_check(k) {
                Ok(c) => {
                    checked += 1;
                    if !c.holds {
                        failures.push(format!("{} bipest k={k}", g.label()));
                    }
                }
                Err(Error::Inapplicable { .. }) => {}
                Err(e) => failures.push(format!("{} bipest k={k}: {e}", g.label())),
            }
        }
    }
    let took = start.elapsed();
    let pass = failures.is_empty() && took < Duration::from_secs(60);
    let detail = if failures.is_empty() {
        format!("{checked} exact checks hold")
    } else {
        failures.join(", ")
    };
    verdict(pass, detail)
}

// 5
fn continuum_repulsion_low_density() -> Verdict {
    let start = Instant::now();
    let opts = SamplerOptions {
        probes: 1_000,
        ..SamplerOptions::default()
    };
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for d in [1usize, 2] {
        let alpha = 2f64.powi(-2 - 3 * d as i32);
        for n in 2..=6 {
            let params = ModelParams::from_density(n, d, Metric::L2, alpha).unwrap();
            let g = repulsion_gap(n, &params, 10_000, 500 + n as u64, &opts).unwrap();
            pass &= g.holds();
            worst = worst.min(g.gap.mean / g.gap.stderr.max(f64::MIN_POSITIVE));
        }
    }
    let took = start.elapsed();
    pass &= took < Duration::from_secs(120);
    verdict(pass, format!("min gap/stderr = {worst:.2}, limit -4"))
}

// 6
fn leech_certificate() -> Verdict {
    let start = Instant::now();
    let value = leech_gap_hp(0.79).unwrap();
    let cert = sphere24_certificate(0.79).unwrap();
    let took = start.elapsed();
    let fi = cert.failure_interval;
    let lo_ok = fi.is_some_and(|f| ((f.lo - 6.73e-6) / 6.73e-6).abs() <= 1e-3);
    let hi_ok = fi.is_some_and(|f| f.hi == RHO_24);
    let value_ok = (value - 11.78).abs() <= 0.01;
    let pass = value > 0.0
        && value_ok
        && cert.certified
        && cert.grid_points == 200
        && cert.grid_min_gap.is_some_and(|g| g > 0.0)
        && lo_ok
        && hi_ok
        && took < Duration::from_secs(1);
    verdict(
        pass,
        format!(
            "F(0.79) = {value:.6} (target 11.78 ± 0.01), positive on 200 grid points: {}, interval {:?}",
            cert.grid_min_gap.is_some_and(|g| g > 0.0),
            fi.map(|f| (f.lo, f.hi))
        ),
    )
}

// 7
fn square_certificate_criterion() -> Verdict {
    let start = Instant::now();
    let none5 = square_failure_interval(5).unwrap().is_none();
    let f6 = square_failure_interval(6).unwrap();
    let contains = f6.is_some_and(|f| f.lo <= 0.40 && f.hi >= 0.95);
    let mut ratios = Vec::new();
    let mut ratio_ok = true;
    for d in [20, 25, 30] {
        let lo = square_failure_interval(d).unwrap().map(|f| f.lo);
        let r = lo
            .map(|lo| square_asymptotic_ratio(d, lo))
            .unwrap_or(f64::NAN);
        ratio_ok &= (0.85..=1.15).contains(&r);
        ratios.push(format!("d={d}: {r:.4}"));
    }
    let took = start.elapsed();
    let pass = none5 && contains && ratio_ok && took < Duration::from_secs(5);
    verdict(
        pass,
        format!(
            "d=5 empty: {none5}, d=6 ⊇ [0.40, 0.95]: {contains}, ratios {} (band [0.85, 1.15])",
            ratios.join(", ")
        ),
    )
}

// 8
fn hardcore_crossing_criterion() -> Verdict {
    let start = Instant::now();
    let d5 = matches!(hardcore_crossing(5), Err(Error::NoCrossing { d: 5 }));
    let a6 = hardcore_crossing(6);
    let mut grid_ok = false;
    if let Ok(a) = a6 {
        grid_ok = (0..100).all(|i| {
            let alpha = a + (0.5 - a) * i as f64 / 99.0;
            let b = hardcore_bounds(alpha, 6).unwrap();
            b.parity_lower >= b.birthday_upper
        });
    }
    let mut ratios = Vec::new();
    let mut ratio_ok = true;
    for d in [100, 200] {
        let r = hardcore_crossing(d)
            .map(|a| hardcore_asymptotic_ratio(d, a))
            .unwrap_or(f64::NAN);
        ratio_ok &= (0.8..=1.2).contains(&r);
        ratios.push(format!("d={d}: {r:.4}"));
    }
    let took = start.elapsed();
    let pass = d5 && a6.is_ok() && grid_ok && ratio_ok && took < Duration::from_secs(5);
    verdict(
        pass,
        format!(
            "d=5 errors: {d5}, alpha_6 = {:.5}, 100-point grid: {grid_ok}, ratios {}",
            a6.unwrap_or(f64::NAN),
            ratios.join(", ")
        ),
    )
}

// 9
fn matching_crossing_criterion() -> Verdict {
    let start = Instant::now();
    let mut ratios = Vec::new();
    let mut crossing_ok = true;
    for d in [10usize, 100, 1000] {
        let a = matching_crossing(d).unwrap();
        let b = matching_bounds(a, d).unwrap();
        crossing_ok &= (b.birthday - b.ilinca_kahn).abs() < 1e-7;
        ratios.push(matching_scale_ratio(d, a));
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let took = start.elapsed();
    let pass = crossing_ok && max / min <= 3.0 && took < Duration::from_secs(5);
    verdict(
        pass,
        format!(
            "ratios {ratios:.4?}, spread max/min = {:.4} (limit 3)",
            max / min
        ),
    )
}

// 10
fn telescoping_vs_naive() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let opts = SamplerOptions {
        probes: 500,
        ..SamplerOptions::default()
    };
    let replicas = 20_000;
    let mut pass = true;
    let mut notes = Vec::new();
    for case in 0..10u64 {
        let d = rng.random_range(1..=2usize);
        let n = rng.random_range(2..=6usize);
        let metric = if rng.random_bool(0.5) {
            Metric::L2
        } else {
            Metric::Linf
        };
        let alpha = rng.random_range(0.01..0.1);
        let params = ModelParams::from_density(n, d, metric, alpha).unwrap();
        let seed = 1000 + case;
        let naive =
            estimate_prob_empty(&params, replicas, seed, EstimateMethod::NaiveMc, &opts).unwrap();
        let tele_rej = estimate_prob_empty(
            &params,
            replicas,
            seed + 100,
            EstimateMethod::Telescoping,
            &opts.with_backend(Backend::Rejection),
        )
        .unwrap();
        let tele_mcmc = estimate_prob_empty(
            &params,
            replicas,
            seed + 200,
            EstimateMethod::Telescoping,
            &opts.with_backend(Backend::Mcmc),
        )
        .unwrap();
        let ok = tele_rej.agrees_with_estimate(&naive)
            && tele_mcmc.agrees_with_estimate(&naive)
            && tele_mcmc.agrees_with_estimate(&tele_rej);
        pass &= ok;
        if !ok {
            notes.push(format!(
                "case {case} (d={d}, n={n}, {metric}, alpha={alpha:.3}): naive {:.5}±{:.1e}, rejection {:.5}±{:.1e}, mcmc {:.5}±{:.1e}",
                naive.mean, naive.stderr, tele_rej.mean, tele_rej.stderr, tele_mcmc.mean, tele_mcmc.stderr
            ));
        }
    }
    if notes.is_empty() {
        notes.push("10 cases agree within 4 combined stderr (naive, rejection, mcmc)".into());
    }
    verdict(pass, notes.join("; "))
}

// 11
fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("birthday-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let manifests: BTreeMap<&str, &str> = BTreeMap::from([
        (
            "simulate-mcmc",
            r#"{"command":"simulate","n":5,"d":2,"alpha":0.05,"replicas":2000,"seed":9,"backend":"mcmc","probes":200}"#,
        ),
        (
            "simulate-naive",
            r#"{"command":"simulate","n":6,"d":1,"p":0.05,"replicas":5000,"seed":3,"method":"naive-mc"}"#,
        ),
        (
            "repulsion",
            r#"{"command":"simulate","n":4,"d":2,"alpha":0.004,"k":4,"replicas":2000,"seed":5}"#,
        ),
        (
            "check",
            r#"{"command":"check","graph":"hypercube:4","mode":"matching","all_k":true}"#,
        ),
        (
            "bounds",
            r#"{"command":"bounds","model":"hardcore","d":8,"points":50}"#,
        ),
        ("certify", r#"{"command":"certify","model":"square","d":7}"#),
    ]);
    let mut pass = true;
    let mut bad = Vec::new();
    for (name, text) in &manifests {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, text).unwrap();
        let mut outputs = Vec::new();
        for (threads, rep) in [("1", 0), ("8", 0), ("1", 1), ("8", 1)] {
            for format in ["json", "csv"] {
                let out = dir.join(format!("{name}-{threads}-{rep}.{format}"));
                let (code, _) = birthday(&[
                    "run",
                    "--manifest",
                    path.to_str().unwrap(),
                    "--threads",
                    threads,
                    "--format",
                    format,
                    "--out",
                    out.to_str().unwrap(),
                ]);
                if code == 1 {
                    pass = false;
                    bad.push(format!("{name} failed to run"));
                }
                outputs.push((format, std::fs::read(&out).unwrap_or_default()));
            }
        }
        for format in ["json", "csv"] {
            let files: Vec<&Vec<u8>> = outputs
                .iter()
                .filter(|(f, _)| *f == format)
                .map(|(_, b)| b)
                .collect();
            if files.windows(2).any(|w| w[0] != w[1]) || files[0].is_empty() {
                pass = false;
                bad.push(format!("{name} {format} differs"));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    let detail = if bad.is_empty() {
        format!(
            "{} manifests byte-identical at threads 1 and 8, twice each",
            manifests.len()
        )
    } else {
        bad.join(", ")
    };
    verdict(pass, detail)
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("dimension-one exactness", dimension_one_exactness),
        ("birthday equality at k=2", birthday_equality_at_two),
        ("Q3 oracle table", q3_oracle_table),
        ("exact catalog ledger", exact_catalog_ledger),
        (
            "continuum repulsion at low density",
            continuum_repulsion_low_density,
        ),
        ("d=24 counterexample certificate", leech_certificate),
        ("hard-square certificate", square_certificate_criterion),
        ("hard-core crossing", hardcore_crossing_criterion),
        ("matching-bound crossing", matching_crossing_criterion),
        ("telescoping vs naive estimator", telescoping_vs_naive),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name} ({secs:.2}s): {}", i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
