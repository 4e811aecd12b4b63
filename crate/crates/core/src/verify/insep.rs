//! Comparing the certain answers of two specifications on sample data.

use std::fmt;

use serde::Serialize;

use super::abox::virtual_abox;
use super::answer::{certain_answers_spec_all, Answers};
use super::chase::{ChaseOptions, Reasoner};
use crate::datalog::{Atom, CQne, FactSet, Tuple};
use crate::dl::Signature;
use crate::error::{Error, Result};
use crate::rewriter::ObdaSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    /// The second specification's answers are a proper subset of the first's.
    Subset,
    Superset,
    Incomparable,
    /// The sets differ but one side's chase was cut, so no conclusion.
    Inconclusive,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equal => "equal",
            Relation::Subset => "output-subset",
            Relation::Superset => "output-superset",
            Relation::Incomparable => "incomparable",
            Relation::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub instance: usize,
    pub query: String,
    pub first: Vec<Tuple>,
    pub second: Vec<Tuple>,
    pub first_complete: bool,
    pub second_complete: bool,
}

impl Comparison {
    fn new(instance: usize, q: &CQne, a: Answers, b: Answers) -> Self {
        Comparison {
            instance,
            query: q.to_string(),
            first: a.tuples.into_iter().collect(),
            second: b.tuples.into_iter().collect(),
            first_complete: a.complete,
            second_complete: b.complete,
        }
    }

    pub fn relation(&self) -> Relation {
        let sub = self.second.iter().all(|t| self.first.contains(t));
        let sup = self.first.iter().all(|t| self.second.contains(t));
        match (sub, sup) {
            (true, true) => Relation::Equal,
            _ if !(self.first_complete && self.second_complete) => Relation::Inconclusive,
            (true, false) => Relation::Subset,
            (false, true) => Relation::Superset,
            (false, false) => Relation::Incomparable,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceStatus {
    pub first_consistent: bool,
    pub second_consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InsepReport {
    pub comparisons: Vec<Comparison>,
    pub instances: Vec<InstanceStatus>,
}

impl InsepReport {
    /// `Equal` when every pair is equal; `Subset` when every pair is equal
    /// or a subset; `Inconclusive` when the only other pairs are
    /// inconclusive; `Incomparable` otherwise.
    pub fn verdict(&self) -> Relation {
        let rels: Vec<Relation> = self.comparisons.iter().map(Comparison::relation).collect();
        if rels.iter().all(|r| *r == Relation::Equal) {
            Relation::Equal
        } else if rels
            .iter()
            .all(|r| matches!(r, Relation::Equal | Relation::Subset))
        {
            Relation::Subset
        } else if rels
            .iter()
            .all(|r| matches!(r, Relation::Equal | Relation::Superset))
        {
            Relation::Superset
        } else if rels.iter().all(|r| {
            matches!(
                r,
                Relation::Equal | Relation::Subset | Relation::Inconclusive
            )
        }) {
            Relation::Inconclusive
        } else {
            Relation::Incomparable
        }
    }

    /// Every pair is equal or the second side's answers are contained in
    /// the first's, with both sides complete.
    pub fn is_sound(&self) -> bool {
        self.comparisons
            .iter()
            .all(|c| matches!(c.relation(), Relation::Equal | Relation::Subset))
    }

    pub fn incomplete_pairs(&self) -> usize {
        self.comparisons
            .iter()
            .filter(|c| !(c.first_complete && c.second_complete))
            .count()
    }
}

impl fmt::Display for InsepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.comparisons {
            writeln!(
                f,
                "instance {}\t{}\t{}\t{} vs {}{}",
                c.instance,
                c.query,
                c.relation(),
                c.first.len(),
                c.second.len(),
                if c.first_complete && c.second_complete {
                    ""
                } else {
                    "\t(depth cut)"
                }
            )?;
        }
        for (i, s) in self.instances.iter().enumerate() {
            writeln!(
                f,
                "instance {i}\tconsistent: {} / {}",
                s.first_consistent, s.second_consistent
            )?;
        }
        writeln!(f, "verdict: {}", self.verdict())
    }
}

/// One atomic query per concept and role name of `sigma`.
pub fn atomic_queries(sigma: &Signature) -> Vec<CQne> {
    let mut out = Vec::new();
    for c in &sigma.concepts {
        out.push(CQne::new(
            vec!["x".into()],
            vec![Atom::vars(c.clone(), ["x"])],
        ));
    }
    for r in &sigma.roles {
        out.push(CQne::new(
            vec!["x".into(), "y".into()],
            vec![Atom::vars(r.clone(), ["x", "y"])],
        ));
    }
    out
}

fn consistent(spec: &ObdaSpec, d: &FactSet, depth: usize) -> Result<bool> {
    let a = virtual_abox(&spec.mapping, d)?;
    let m = Reasoner::new(&spec.tbox).chase(&a, &ChaseOptions::with_depth(depth));
    Ok(!m.inconsistent)
}

/// Certain answers of both specifications on every instance and query.
pub fn check_inseparable(
    first: &ObdaSpec,
    second: &ObdaSpec,
    sigma: &Signature,
    instances: &[FactSet],
    queries: &[CQne],
    depth: usize,
) -> Result<InsepReport> {
    for q in queries {
        for a in &q.atoms {
            if !sigma.contains(&a.pred) {
                return Err(Error::validation(format!(
                    "query `{q}` uses `{}` outside the compared signature",
                    a.pred
                )));
            }
        }
    }
    let mut report = InsepReport {
        comparisons: Vec::new(),
        instances: Vec::new(),
    };
    for (i, d) in instances.iter().enumerate() {
        report.instances.push(InstanceStatus {
            first_consistent: consistent(first, d, depth)?,
            second_consistent: consistent(second, d, depth)?,
        });
        let a = certain_answers_spec_all(first, d, queries, depth)?;
        let b = certain_answers_spec_all(second, d, queries, depth)?;
        for ((q, a), b) in queries.iter().zip(a).zip(b) {
            report.comparisons.push(Comparison::new(i, q, a, b));
        }
    }
    Ok(report)
}
