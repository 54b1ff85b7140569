//! Executable checks of the library's numerical claims, one suite per
//! acceptance criterion. Each suite returns a [`CriterionReport`] listing the
//! measured quantities next to their thresholds.

mod dynamics;
mod geometry;
mod learning;
mod mesh;
mod network;
mod util;

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};

/// One measured quantity and the bound it is held to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `<=` for upper bounds, `>=` for lower bounds, `==` for exact flags.
    pub relation: &'static str,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=",
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            relation: "<",
            passed: value < threshold,
            ..Self::at_most(name, value, threshold)
        }
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">",
            threshold,
            passed: value > threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            relation: ">=",
            passed: value >= threshold,
            ..Self::above(name, value, threshold)
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            relation: "==",
            threshold: 1.0,
            passed: ok,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub suite: &'static str,
    pub passed: bool,
    /// Diagnostic suites report numbers but never fail.
    pub diagnostic: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl CriterionReport {
    /// A one-line summary: `criterion 3 (invariance): PASS — …`.
    pub fn summary(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        let detail = if failed.is_empty() {
            format!("{} checks", self.checks.len())
        } else {
            format!("failed: {}", failed.join(", "))
        };
        format!(
            "criterion {} ({}): {status} — {detail} [{:.1}s]",
            self.id, self.suite, self.seconds
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// Case counts and run lengths as specified.
    Full,
    /// Reduced counts for smoke testing.
    Quick,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub scale: Scale,
}

impl VerifyOptions {
    pub(crate) fn count(&self, full: usize) -> usize {
        match self.scale {
            Scale::Full => full,
            Scale::Quick => (full / 10).max(1),
        }
    }
}

pub const SUITES: [(usize, &str); 11] = [
    (1, "geometry"),
    (2, "equivariance"),
    (3, "invariance"),
    (4, "euclidean"),
    (5, "containment"),
    (6, "stability"),
    (7, "frechet"),
    (8, "mesh"),
    (9, "learning"),
    (10, "params"),
    (11, "gradient"),
];

/// Looks a suite up by name or criterion number.
pub fn suite_id(name: &str) -> Option<usize> {
    SUITES
        .iter()
        .find(|(id, s)| *s == name || name.parse::<usize>().ok() == Some(*id))
        .map(|(id, _)| *id)
}

/// Intermediate result of a suite body.
#[derive(Default)]
pub(crate) struct Outcome {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }
}

pub fn run_criterion(id: usize, opts: &VerifyOptions) -> Result<CriterionReport> {
    let (_, suite) = *SUITES
        .iter()
        .find(|(i, _)| *i == id)
        .ok_or_else(|| Error::Invalid(format!("no criterion {id}")))?;
    let start = Instant::now();
    let outcome = match id {
        1 => geometry::round_trips(opts)?,
        2 => network::equivariance(opts)?,
        3 => network::invariance(opts)?,
        4 => geometry::euclidean_reduction(opts)?,
        5 => dynamics::containment(opts)?,
        6 => dynamics::stability(opts)?,
        7 => geometry::frechet(opts)?,
        8 => mesh::mesh_pipeline(opts)?,
        9 => learning::desk_learning(opts)?,
        10 => learning::parameter_count(opts)?,
        _ => learning::gradient_oracle(opts)?,
    };
    let diagnostic = id == 10;
    Ok(CriterionReport {
        id,
        suite,
        passed: diagnostic || outcome.checks.iter().all(|c| c.passed),
        diagnostic,
        checks: outcome.checks,
        notes: outcome.notes,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Machine-readable report of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

pub fn run_all(
    ids: &[usize],
    opts: &VerifyOptions,
    mut on_done: impl FnMut(&CriterionReport),
) -> Result<VerifyReport> {
    let mut criteria = Vec::with_capacity(ids.len());
    for &id in ids {
        let r = run_criterion(id, opts)?;
        on_done(&r);
        criteria.push(r);
    }
    Ok(VerifyReport {
        seed: opts.seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}
