//! Experiment reports: named statistics plus machine-checkable pass/fail rows.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// How a check compares its statistic with the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `statistic < target + tolerance`
    Less,
    /// `statistic ≤ target + tolerance`
    AtMost,
    /// `statistic > target − tolerance`
    Greater,
    /// `|statistic − target| ≤ tolerance`
    Within,
}

impl Relation {
    pub fn holds(self, statistic: f64, target: f64, tolerance: f64) -> bool {
        match self {
            Relation::Less => statistic < target + tolerance,
            Relation::AtMost => statistic <= target + tolerance,
            Relation::Greater => statistic > target - tolerance,
            Relation::Within => (statistic - target).abs() <= tolerance,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Less => "less",
            Relation::AtMost => "at_most",
            Relation::Greater => "greater",
            Relation::Within => "within",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Acceptance criterion number, when the row realizes one.
    pub criterion: Option<u32>,
    pub name: String,
    pub statistic: f64,
    pub target: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn new(criterion: Option<u32>, name: impl Into<String>, statistic: f64, relation: Relation, target: f64, tolerance: f64) -> Self {
        Check {
            criterion,
            name: name.into(),
            statistic,
            target,
            tolerance,
            relation,
            pass: relation.holds(statistic, target, tolerance),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub master_seed: u64,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub statistics: Vec<Statistic>,
    pub checks: Vec<Check>,
    pub wall_time_seconds: f64,
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl ExperimentReport {
    pub fn new(name: &str, master_seed: u64) -> Self {
        ExperimentReport {
            name: name.to_string(),
            master_seed,
            parameters: BTreeMap::new(),
            statistics: Vec::new(),
            checks: Vec::new(),
            wall_time_seconds: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
    }

    pub fn stat(&mut self, name: impl Into<String>, value: f64) {
        self.statistics.push(Statistic { name: name.into(), value });
    }

    pub fn check(&mut self, criterion: Option<u32>, name: impl Into<String>, statistic: f64, relation: Relation, target: f64, tolerance: f64) {
        self.checks.push(Check::new(criterion, name, statistic, relation, target, tolerance));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Checks realizing acceptance criterion `k`.
    pub fn criterion(&self, k: u32) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.criterion == Some(k))
    }

    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.statistics.iter().find(|s| s.name == name).map(|s| s.value)
    }

    /// One row per statistic and per check. Wall time is left out so that reruns with
    /// the same seed give byte-identical files.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["experiment", "master_seed", "criterion", "name", "statistic", "relation", "target", "tolerance", "pass"])?;
        let seed = self.master_seed.to_string();
        for (k, v) in &self.parameters {
            wr.write_record([&self.name, &seed, "", &format!("param:{k}"), &v.to_string(), "", "", "", ""])?;
        }
        for s in &self.statistics {
            wr.write_record([&self.name, &seed, "", &s.name, &fmt17(s.value), "", "", "", ""])?;
        }
        for c in &self.checks {
            wr.write_record([
                self.name.as_str(),
                &seed,
                &c.criterion.map_or(String::new(), |k| k.to_string()),
                &c.name,
                &fmt17(c.statistic),
                c.relation.as_str(),
                &fmt17(c.target),
                &fmt17(c.tolerance),
                if c.pass { "true" } else { "false" },
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Short human-readable summary, one line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = c.criterion.map_or(String::from("  "), |k| format!("{k:2}"));
            out.push_str(&format!(
                "[{}] {tag} {}: {:.6e} {} {:.6e} (tol {:.3e})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.statistic,
                c.relation.as_str(),
                c.target,
                c.tolerance
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_and_csv() {
        assert!(Relation::Less.holds(0.009, 0.01, 0.0));
        assert!(!Relation::Less.holds(0.01, 0.01, 0.0));
        assert!(Relation::AtMost.holds(0.01, 0.01, 0.0));
        assert!(Relation::Within.holds(4.9, 5.0, 0.1 + 1e-12));
        assert!(!Relation::Greater.holds(0.0, 0.0, 0.0));
        let mut r = ExperimentReport::new("demo", 7);
        r.param("n", 8);
        r.stat("ks", 0.123);
        r.check(Some(6), "ks, c = \"0.30\"", 0.004, Relation::Less, 0.01, 0.0);
        r.wall_time_seconds = 3.0;
        let csv = r.to_csv_string().unwrap();
        assert!(csv.starts_with("experiment,master_seed,criterion"));
        assert!(csv.contains("\"ks, c = \"\"0.30\"\"\""));
        assert!(csv.contains("1.2300000000000000e-1"));
        assert!(!csv.contains("3.0"));
        let back: ExperimentReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(r.all_pass());
        assert_eq!(r.criterion(6).count(), 1);
    }
}
