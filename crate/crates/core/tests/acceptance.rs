//! The thirteen acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the table is always printed.
//! Every experiment runs with its default configuration and master seed 0; lattice
//! functionals are cached in a fresh temporary directory so the runtime limits are honest.

use std::collections::BTreeMap;

use epstein_lab::harness::{default_config, run_experiment, Check, ExperimentReport};

/// Criteria that fail for reasons analysed in the decision ledger.
const KNOWN_RED: [u32; 2] = [4, 11];

/// Wall-clock limits in seconds.
const RUNTIME_LIMITS: [(u32, f64); 3] = [(4, 300.0), (6, 600.0), (10, 3600.0)];

const PLAN: [(&str, &[u32]); 11] = [
    ("anchors", &[1, 2, 3]),
    ("siegel-check", &[4]),
    ("variance-bound", &[5]),
    ("stable-match", &[6]),
    ("z0-match", &[7]),
    ("moments", &[8]),
    ("gaussian-limit", &[9]),
    ("epstein-vs-limit", &[10]),
    ("height-limit", &[11]),
    ("negativity", &[12]),
    ("oracles", &[13]),
];

fn describe(c: &Check) -> String {
    format!("{} = {:.4e} {} {:.4e}", c.name, c.statistic, c.relation.as_str(), c.target)
}

fn main() {
    let cache = tempfile::tempdir().expect("temporary cache directory");
    println!("acceptance criteria (master seed 0, default configurations)");
    let mut reports: BTreeMap<u32, ExperimentReport> = BTreeMap::new();
    for (name, criteria) in PLAN {
        let mut cfg = default_config(name).unwrap();
        cfg.cache_dir = Some(cache.path().to_path_buf());
        let report = run_experiment(name, &cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
        eprintln!("ran {name} in {:.1} s", report.wall_time_seconds);
        for &k in criteria {
            reports.insert(k, report.clone());
        }
    }

    let mut unexpected = Vec::new();
    println!();
    for k in 1..=13u32 {
        let report = &reports[&k];
        let checks: Vec<&Check> = report.criterion(k).collect();
        assert!(!checks.is_empty(), "criterion {k} has no checks in {}", report.name);
        let mut pass = checks.iter().all(|c| c.pass);
        let mut notes: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| describe(c)).collect();
        if let Some(&(_, limit)) = RUNTIME_LIMITS.iter().find(|(j, _)| *j == k) {
            if report.wall_time_seconds >= limit {
                pass = false;
                notes.push(format!("runtime {:.0} s over {limit:.0} s", report.wall_time_seconds));
            }
        }
        let worst = checks.iter().find(|c| !c.pass).or(checks.first()).map(|c| describe(c)).unwrap_or_default();
        let detail = if pass { worst } else { notes.join("; ") };
        let red = KNOWN_RED.contains(&k);
        println!(
            "criterion {k:2} {} [{}] {:.1} s: {detail}",
            if pass { "PASS" } else { "FAIL" },
            report.name,
            report.wall_time_seconds
        );
        if !pass && !red {
            unexpected.push(k);
        }
        if pass && red {
            println!("             criterion {k} is listed as known red but passed");
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
