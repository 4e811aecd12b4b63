use std::collections::BTreeSet;
use std::fmt;

use crate::datalog::{evaluate, mapping_program, FactSet};
use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::name::Name;

/// Concept assertions `A(c)` and role assertions `P(c, d)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ABox {
    pub concepts: BTreeSet<(Name, Name)>,
    pub roles: BTreeSet<(Name, Name, Name)>,
}

impl ABox {
    pub fn new() -> Self {
        ABox::default()
    }

    pub fn assert_concept(&mut self, c: impl Into<Name>, ind: impl Into<Name>) {
        self.concepts.insert((c.into(), ind.into()));
    }

    pub fn assert_role(&mut self, r: impl Into<Name>, a: impl Into<Name>, b: impl Into<Name>) {
        self.roles.insert((r.into(), a.into(), b.into()));
    }

    pub fn individuals(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.concepts.iter().map(|(_, i)| i.clone()).collect();
        for (_, a, b) in &self.roles {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        out
    }

    pub fn len(&self) -> usize {
        self.concepts.len() + self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unary facts become concept assertions, binary ones role assertions.
    pub fn from_facts(f: &FactSet) -> Result<ABox> {
        let mut a = ABox::new();
        for (p, ts) in &f.facts {
            for t in ts {
                match t.as_slice() {
                    [c] => a.assert_concept(p.clone(), c.clone()),
                    [x, y] => a.assert_role(p.clone(), x.clone(), y.clone()),
                    _ => {
                        return Err(Error::validation(format!(
                            "`{p}` has arity {}; ABox facts are unary or binary",
                            t.len()
                        )))
                    }
                }
            }
        }
        Ok(a)
    }

    pub fn to_facts(&self) -> FactSet {
        let mut f = FactSet::new();
        for (c, i) in &self.concepts {
            f.insert(c.clone(), vec![i.clone()]);
        }
        for (r, a, b) in &self.roles {
            f.insert(r.clone(), vec![a.clone(), b.clone()]);
        }
        f
    }
}

impl fmt::Display for ABox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_facts(), f)
    }
}

/// The ABox `A_{M,D}` generated by the mapping from a database instance.
pub fn virtual_abox(m: &Mapping, d: &FactSet) -> Result<ABox> {
    let p = mapping_program(m)?;
    let out = evaluate(&p, &d.restrict(|n| !p.is_idb(n)), None)?;
    ABox::from_facts(&out.restrict(|n| p.is_idb(n)))
}
