//! GAV mapping assertions from unions of CQ≠ over view predicates to concept
//! and role atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::datalog::{Atom, CQne, Term};
use crate::error::{Error, Result};
use crate::name::Name;

/// `q₁ ∪ … ∪ qₙ ↝ N(x⃗)`. Every disjunct's answer variables are `head_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingAssertion {
    pub target: Name,
    pub head_vars: Vec<Name>,
    pub disjuncts: Vec<CQne>,
}

impl MappingAssertion {
    pub fn new(target: impl Into<Name>, head_vars: Vec<Name>, disjuncts: Vec<CQne>) -> Self {
        MappingAssertion {
            target: target.into(),
            head_vars,
            disjuncts,
        }
    }

    /// Single-CQ assertion whose head variables are the query's answer variables.
    pub fn from_cq(target: impl Into<Name>, q: CQne) -> Self {
        MappingAssertion {
            target: target.into(),
            head_vars: q.answer_vars.clone(),
            disjuncts: vec![q],
        }
    }

    pub fn head_atom(&self) -> Atom {
        Atom::new(
            self.target.clone(),
            self.head_vars.iter().cloned().map(Term::Var).collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.disjuncts.is_empty() {
            return Err(Error::validation(format!(
                "assertion for `{}` has no source query",
                self.target
            )));
        }
        for q in &self.disjuncts {
            q.validate()?;
            if q.answer_vars != self.head_vars {
                return Err(Error::validation(format!(
                    "disjunct `{q}` of `{}` does not project the head variables",
                    self.target
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for MappingAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :- ", self.head_atom())?;
        for (i, q) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str("\n  | ")?;
            }
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Mapping {
    pub assertions: Vec<MappingAssertion>,
}

impl Mapping {
    pub fn new() -> Self {
        Mapping::default()
    }

    pub fn push(&mut self, a: MappingAssertion) {
        self.assertions.push(a);
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn targets(&self) -> BTreeSet<Name> {
        self.assertions.iter().map(|a| a.target.clone()).collect()
    }

    /// Predicates used in source queries with their arities.
    pub fn source_predicates(&self) -> BTreeMap<Name, usize> {
        let mut out = BTreeMap::new();
        for a in &self.assertions {
            for q in &a.disjuncts {
                for at in &q.atoms {
                    out.insert(at.pred.clone(), at.args.len());
                }
            }
        }
        out
    }

    /// Every (target, CQ) pair in order.
    pub fn cqs(&self) -> impl Iterator<Item = (&Name, &CQne)> {
        self.assertions
            .iter()
            .flat_map(|a| a.disjuncts.iter().map(move |q| (&a.target, q)))
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.assertions {
            a.validate()?;
        }
        Ok(())
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.assertions {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}
