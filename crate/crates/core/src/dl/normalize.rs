//! Structural normalization of surface axioms into normal form.

use std::collections::BTreeSet;
use std::fmt;

use super::{Axiom, Provenance, RhsConcept, Role, TBox};
use crate::error::{Error, Result};
use crate::name::Name;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceConcept {
    Top,
    Bottom,
    Name(Name),
    And(Vec<SurfaceConcept>),
    Or(Vec<SurfaceConcept>),
    Not(Box<SurfaceConcept>),
    Exists(Role, Box<SurfaceConcept>),
    Forall(Role, Box<SurfaceConcept>),
    AtMost1(Role, Box<SurfaceConcept>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceAxiom {
    ConceptIncl(SurfaceConcept, SurfaceConcept),
    RoleIncl(Role, Role),
    RoleDisj(Role, Role),
}

impl fmt::Display for SurfaceConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, cs: &[SurfaceConcept], op: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")
        };
        match self {
            SurfaceConcept::Top => f.write_str("top"),
            SurfaceConcept::Bottom => f.write_str("bot"),
            SurfaceConcept::Name(n) => write!(f, "{n}"),
            SurfaceConcept::And(cs) => join(f, cs, "&"),
            SurfaceConcept::Or(cs) => join(f, cs, "or"),
            SurfaceConcept::Not(c) => write!(f, "not {c}"),
            SurfaceConcept::Exists(r, c) => write!(f, "exists {r} . {c}"),
            SurfaceConcept::Forall(r, c) => write!(f, "forall {r} . {c}"),
            SurfaceConcept::AtMost1(r, c) => write!(f, "atmost1 {r} . {c}"),
        }
    }
}

impl SurfaceConcept {
    fn collect_names(&self, concepts: &mut BTreeSet<Name>, roles: &mut BTreeSet<Name>) {
        match self {
            SurfaceConcept::Top | SurfaceConcept::Bottom => {}
            SurfaceConcept::Name(n) => {
                concepts.insert(n.clone());
            }
            SurfaceConcept::And(cs) | SurfaceConcept::Or(cs) => {
                for c in cs {
                    c.collect_names(concepts, roles);
                }
            }
            SurfaceConcept::Not(c) => c.collect_names(concepts, roles),
            SurfaceConcept::Exists(r, c)
            | SurfaceConcept::Forall(r, c)
            | SurfaceConcept::AtMost1(r, c) => {
                roles.insert(r.name.clone());
                c.collect_names(concepts, roles);
            }
        }
    }
}

struct Normalizer {
    t: TBox,
    counter: usize,
}

impl Normalizer {
    fn fresh(&mut self, what: &SurfaceConcept) -> Name {
        self.counter += 1;
        let n = Name::from(format!("_N{}", self.counter));
        self.t.declare_concept(n.clone());
        self.t
            .register_fresh(n.clone(), Provenance::Normalization(what.to_string()));
        n
    }

    fn emit(&mut self, lhs: BTreeSet<Name>, rhs: RhsConcept) {
        if let RhsConcept::Atom(b) = &rhs {
            if lhs.contains(b) {
                return;
            }
        }
        self.t.insert(Axiom::Ci { lhs, rhs });
    }

    /// The concept as a union of conjunctions of names (`[]` is `⊤`).
    fn lhs(&mut self, c: &SurfaceConcept) -> Result<Vec<BTreeSet<Name>>> {
        Ok(match c {
            SurfaceConcept::Top => vec![BTreeSet::new()],
            SurfaceConcept::Bottom => vec![],
            SurfaceConcept::Name(n) => vec![[n.clone()].into()],
            SurfaceConcept::And(cs) => {
                let mut acc = vec![BTreeSet::new()];
                for c in cs {
                    let ds = self.lhs(c)?;
                    let mut next = Vec::new();
                    for a in &acc {
                        for d in &ds {
                            let mut u = a.clone();
                            u.extend(d.iter().cloned());
                            if !next.contains(&u) {
                                next.push(u);
                            }
                        }
                    }
                    acc = next;
                }
                acc
            }
            SurfaceConcept::Or(cs) => {
                let mut out = Vec::new();
                for c in cs {
                    for d in self.lhs(c)? {
                        if !out.contains(&d) {
                            out.push(d);
                        }
                    }
                }
                out
            }
            SurfaceConcept::Exists(r, f) => {
                let x = self.fresh(c);
                for d in self.lhs(f)? {
                    self.emit(d, RhsConcept::Forall(r.inv(), x.clone()));
                }
                vec![[x].into()]
            }
            SurfaceConcept::Not(_) => {
                return Err(Error::Unsupported(format!(
                    "negation `{c}` is not Horn-ALCHIQ"
                )))
            }
            SurfaceConcept::Forall(..) => {
                return Err(Error::Unsupported(format!(
                    "universal restriction `{c}` on the left-hand side"
                )))
            }
            SurfaceConcept::AtMost1(..) => {
                return Err(Error::Unsupported(format!(
                    "at-most restriction `{c}` on the left-hand side"
                )))
            }
        })
    }

    /// Names a concept that occurs positively, returning `None` for `⊤`.
    fn positive_name(&mut self, c: &SurfaceConcept) -> Result<Option<Name>> {
        match c {
            SurfaceConcept::Top => Ok(None),
            SurfaceConcept::Name(n) => Ok(Some(n.clone())),
            _ => {
                let x = self.fresh(c);
                for part in self.rhs(c)? {
                    self.emit([x.clone()].into(), part);
                }
                Ok(Some(x))
            }
        }
    }

    /// The concept as a conjunction of normal right-hand sides (`[]` is `⊤`).
    fn rhs(&mut self, c: &SurfaceConcept) -> Result<Vec<RhsConcept>> {
        Ok(match c {
            SurfaceConcept::Top => vec![],
            SurfaceConcept::Bottom => vec![RhsConcept::Bottom],
            SurfaceConcept::Name(n) => vec![RhsConcept::Atom(n.clone())],
            SurfaceConcept::And(cs) => {
                let mut out = Vec::new();
                for c in cs {
                    out.extend(self.rhs(c)?);
                }
                out
            }
            SurfaceConcept::Exists(r, f) => {
                let filler = self.positive_name(f)?.into_iter().collect();
                vec![RhsConcept::Exists(r.clone(), filler)]
            }
            SurfaceConcept::Forall(r, f) => {
                let mut out = Vec::new();
                for part in forall_fillers(f).ok_or_else(|| {
                    Error::Unsupported(format!("universal restriction `{c}` with a complex filler"))
                })? {
                    out.push(RhsConcept::Forall(r.clone(), part));
                }
                out
            }
            SurfaceConcept::AtMost1(r, f) => match &**f {
                SurfaceConcept::Top => vec![RhsConcept::AtMost1(r.clone(), None)],
                SurfaceConcept::Name(n) => vec![RhsConcept::AtMost1(r.clone(), Some(n.clone()))],
                other => {
                    let x = self.fresh(other);
                    for d in self.lhs(other)? {
                        self.emit(d, RhsConcept::Atom(x.clone()));
                    }
                    vec![RhsConcept::AtMost1(r.clone(), Some(x))]
                }
            },
            SurfaceConcept::Or(_) => {
                return Err(Error::Unsupported(format!(
                    "disjunction `{c}` on the right-hand side"
                )))
            }
            SurfaceConcept::Not(_) => {
                return Err(Error::Unsupported(format!(
                    "negation `{c}` is not Horn-ALCHIQ"
                )))
            }
        })
    }
}

/// Fillers of `∀R.F` accepted by normalization: a name, `⊤`, or a
/// conjunction of these.
fn forall_fillers(f: &SurfaceConcept) -> Option<Vec<Name>> {
    match f {
        SurfaceConcept::Top => Some(vec![]),
        SurfaceConcept::Name(n) => Some(vec![n.clone()]),
        SurfaceConcept::And(cs) => {
            let mut out = Vec::new();
            for c in cs {
                out.extend(forall_fillers(c)?);
            }
            Some(out)
        }
        _ => None,
    }
}

/// Normal-form TBox equivalent to the input over its own signature. Complex
/// subconcepts are replaced by fresh names `_N<k>`.
pub fn normalize_structural(raw: &[SurfaceAxiom]) -> Result<TBox> {
    let mut n = Normalizer {
        t: TBox::new(),
        counter: 0,
    };
    for ax in raw {
        match ax {
            SurfaceAxiom::RoleIncl(a, b) => {
                n.t.insert(Axiom::ri(a.clone(), b.clone()));
            }
            SurfaceAxiom::RoleDisj(a, b) => {
                n.t.insert(Axiom::role_disjoint(a.clone(), b.clone()));
            }
            SurfaceAxiom::ConceptIncl(l, r) => {
                let mut cs = BTreeSet::new();
                let mut rs = BTreeSet::new();
                l.collect_names(&mut cs, &mut rs);
                r.collect_names(&mut cs, &mut rs);
                for c in cs {
                    n.t.declare_concept(c);
                }
                for r in rs {
                    n.t.declare_role(r);
                }
                // `∃R.F ⊑ B` needs no fresh name: it is `F ⊑ ∀R⁻.B`.
                if let (SurfaceConcept::Exists(role, f), SurfaceConcept::Name(b)) = (l, r) {
                    for d in n.lhs(f)? {
                        n.emit(d, RhsConcept::Forall(role.inv(), b.clone()));
                    }
                    continue;
                }
                let lhs = n.lhs(l)?;
                let rhs = n.rhs(r)?;
                for d in &lhs {
                    for part in &rhs {
                        n.emit(d.clone(), part.clone());
                    }
                }
            }
        }
    }
    Ok(n.t)
}
