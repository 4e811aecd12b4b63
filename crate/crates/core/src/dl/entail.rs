//! Entailment of normal-form and DL-Lite_R axioms by chasing a small seed
//! structure and inspecting its root.

use std::collections::{BTreeMap, BTreeSet};

use super::{Axiom, Basic, DlLiteAxiom, RhsConcept, Role, TBox};
use crate::error::{Error, Result};
use crate::name::Name;
use crate::verify::chase::{ChaseModel, ChaseOptions, ElemId, Reasoner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entailment {
    Entailed,
    NotEntailed,
    /// The chase stopped at its depth or size limit before deciding.
    Unknown,
}

impl Entailment {
    pub fn holds(self) -> bool {
        self == Entailment::Entailed
    }
}

/// What the chase of `{A(a) | A ∈ lhs}` says about the root `a`.
#[derive(Debug, Clone)]
pub struct RootType {
    pub unsatisfiable: bool,
    pub concepts: BTreeSet<Name>,
    /// For each role, the labels of the root's neighbors along it.
    pub neighbors: BTreeMap<Role, Vec<BTreeSet<Name>>>,
    pub complete: bool,
}

/// Chase-based entailment checker for one TBox.
#[derive(Debug, Clone)]
pub struct Entailer {
    reasoner: Reasoner,
    sig: super::Signature,
    opts: ChaseOptions,
}

/// Chase depth used when none is given: `|sig| · (fresh roles + 1)`, at most 16.
pub fn default_entailment_depth(t: &TBox) -> usize {
    let sig = t.sig.concepts.len() + t.sig.roles.len();
    (sig.max(1) * (t.fresh_role_count() + 1)).min(16)
}

impl Entailer {
    pub fn new(t: &TBox) -> Entailer {
        Entailer::with_depth(t, default_entailment_depth(t))
    }

    pub fn with_depth(t: &TBox, depth: usize) -> Entailer {
        Entailer {
            reasoner: Reasoner::new(t),
            sig: t.sig.clone(),
            opts: ChaseOptions::with_depth(depth),
        }
    }

    pub fn depth(&self) -> usize {
        self.opts.depth
    }

    fn seeded(&self, lhs: &BTreeSet<Name>) -> (ChaseModel, ElemId) {
        let mut m = ChaseModel::default();
        let a = m.add_named(Name::from("a"));
        m.elements[a].concepts.extend(lhs.iter().cloned());
        (m, a)
    }

    fn decide(&self, m: &ChaseModel, found: bool) -> Entailment {
        if m.inconsistent || found {
            Entailment::Entailed
        } else if m.labels_complete {
            Entailment::NotEntailed
        } else {
            Entailment::Unknown
        }
    }

    fn has_neighbor(m: &ChaseModel, e: ElemId, r: &Role, filler: &BTreeSet<Name>) -> bool {
        m.element(e)
            .edges
            .iter()
            .any(|(s, f)| s == r && filler.is_subset(&m.element(*f).concepts))
    }

    pub fn root_type(&self, lhs: &BTreeSet<Name>) -> RootType {
        let (mut m, a) = self.seeded(lhs);
        self.reasoner.run(&mut m, &self.opts);
        let a = m.find(a);
        let mut neighbors: BTreeMap<Role, Vec<BTreeSet<Name>>> = BTreeMap::new();
        for (r, f) in &m.elements[a].edges {
            neighbors
                .entry(r.clone())
                .or_default()
                .push(m.element(*f).concepts.clone());
        }
        RootType {
            unsatisfiable: m.inconsistent,
            concepts: m.elements[a].concepts.clone(),
            neighbors,
            complete: m.labels_complete,
        }
    }

    fn check_names(&self, ax: &Axiom) -> Result<()> {
        let (cs, rs) = ax.names();
        for c in &cs {
            if !self.sig.concepts.contains(c) {
                return Err(Error::validation(format!(
                    "concept `{c}` is not in the signature"
                )));
            }
        }
        for r in &rs {
            if !self.sig.roles.contains(r) {
                return Err(Error::validation(format!(
                    "role `{r}` is not in the signature"
                )));
            }
        }
        Ok(())
    }

    pub fn check(&self, ax: &Axiom) -> Result<Entailment> {
        self.check_names(ax)?;
        Ok(self.check_unchecked(ax))
    }

    fn check_unchecked(&self, ax: &Axiom) -> Entailment {
        match ax {
            Axiom::Ci { lhs, rhs } => {
                let (mut m, a) = self.seeded(lhs);
                match rhs {
                    RhsConcept::Bottom => {
                        self.reasoner.run(&mut m, &self.opts);
                        self.decide(&m, false)
                    }
                    RhsConcept::Atom(b) => {
                        if lhs.contains(b) {
                            return Entailment::Entailed;
                        }
                        self.reasoner.run(&mut m, &self.opts);
                        let found = m.has_concept(a, b);
                        self.decide(&m, found)
                    }
                    RhsConcept::Exists(r, filler) => {
                        self.reasoner.run(&mut m, &self.opts);
                        let found = Self::has_neighbor(&m, a, r, filler);
                        self.decide(&m, found)
                    }
                    RhsConcept::Forall(r, b) => {
                        let w = m.add_anonymous([]);
                        self.reasoner.add_edge(&mut m, a, r, w);
                        self.reasoner.run(&mut m, &self.opts);
                        let found = m.has_concept(w, b);
                        self.decide(&m, found)
                    }
                    RhsConcept::AtMost1(r, filler) => {
                        let f: Vec<Name> = filler.iter().cloned().collect();
                        let w1 = m.add_anonymous(f.clone());
                        let w2 = m.add_anonymous(f);
                        self.reasoner.add_edge(&mut m, a, r, w1);
                        self.reasoner.add_edge(&mut m, a, r, w2);
                        self.reasoner.run(&mut m, &self.opts);
                        let found = m.find(w1) == m.find(w2);
                        self.decide(&m, found)
                    }
                }
            }
            Axiom::Ri { sub, sup } => {
                if sub == sup {
                    return Entailment::Entailed;
                }
                let (mut m, a) = self.seeded(&BTreeSet::new());
                let w = m.add_anonymous([]);
                self.reasoner.add_edge(&mut m, a, sub, w);
                self.reasoner.run(&mut m, &self.opts);
                let found = m.has_edge(a, sup, w);
                self.decide(&m, found)
            }
            Axiom::RoleDisjoint(r1, r2) => {
                let (mut m, a) = self.seeded(&BTreeSet::new());
                let w = m.add_anonymous([]);
                self.reasoner.add_edge(&mut m, a, r1, w);
                self.reasoner.add_edge(&mut m, a, r2, w);
                self.reasoner.run(&mut m, &self.opts);
                self.decide(&m, false)
            }
        }
    }

    /// Puts `b` on the root of `m`; `∃R` is realized by an anonymous R-neighbor.
    fn seed_basic(&self, m: &mut ChaseModel, a: ElemId, b: &Basic) {
        match b {
            Basic::Concept(c) => {
                m.elements[a].concepts.insert(c.clone());
            }
            Basic::Exists(r) => {
                let w = m.add_anonymous([]);
                self.reasoner.add_edge(m, a, r, w);
            }
        }
    }

    pub fn check_dllite(&self, ax: &DlLiteAxiom) -> Entailment {
        match ax {
            DlLiteAxiom::RoleIncl(a, b) => self.check_unchecked(&Axiom::ri(a.clone(), b.clone())),
            DlLiteAxiom::RoleDisj(a, b) => {
                self.check_unchecked(&Axiom::role_disjoint(a.clone(), b.clone()))
            }
            DlLiteAxiom::ConceptIncl(b1, b2) => {
                if b1 == b2 {
                    return Entailment::Entailed;
                }
                let (mut m, a) = self.seeded(&BTreeSet::new());
                self.seed_basic(&mut m, a, b1);
                self.reasoner.run(&mut m, &self.opts);
                let found = match b2 {
                    Basic::Concept(c) => m.has_concept(a, c),
                    Basic::Exists(r) => Self::has_neighbor(&m, a, r, &BTreeSet::new()),
                };
                self.decide(&m, found)
            }
            DlLiteAxiom::ConceptDisj(b1, b2) => {
                let (mut m, a) = self.seeded(&BTreeSet::new());
                self.seed_basic(&mut m, a, b1);
                self.seed_basic(&mut m, a, b2);
                self.reasoner.run(&mut m, &self.opts);
                self.decide(&m, false)
            }
        }
    }

    /// Which basic concepts hold at a root seeded with `b`, plus whether that
    /// seed is unsatisfiable. One chase answers every `b ⊑ ·` candidate.
    pub fn basic_consequences(&self, b: &Basic, candidates: &[Basic]) -> (Vec<Basic>, bool, bool) {
        let (mut m, a) = self.seeded(&BTreeSet::new());
        self.seed_basic(&mut m, a, b);
        self.reasoner.run(&mut m, &self.opts);
        if m.inconsistent {
            return (candidates.to_vec(), true, true);
        }
        let out = candidates
            .iter()
            .filter(|c| match c {
                Basic::Concept(n) => m.has_concept(a, n),
                Basic::Exists(r) => Self::has_neighbor(&m, a, r, &BTreeSet::new()),
            })
            .cloned()
            .collect();
        (out, false, m.labels_complete)
    }
}

/// `t ⊨ ci`; an undecided check counts as not entailed.
pub fn entails_ci(t: &TBox, ci: &Axiom) -> Result<bool> {
    if !ci.is_ci() {
        return Err(Error::validation(format!(
            "`{ci}` is not a concept inclusion"
        )));
    }
    Ok(Entailer::new(t).check(ci)?.holds())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(r: &str, f: &[&str]) -> RhsConcept {
        RhsConcept::Exists(Role::named(r), f.iter().map(|s| Name::from(*s)).collect())
    }

    #[test]
    fn reflexive_inclusion_holds() {
        let mut t = TBox::new();
        t.declare_concept("A".into());
        let ci = Axiom::ci(["A"], RhsConcept::Atom("A".into()));
        assert!(entails_ci(&t, &ci).unwrap());
    }

    #[test]
    fn existential_filler_inherits_subsumers() {
        let t = TBox::from_axioms([
            Axiom::ci(["A"], ex("R", &["B"])),
            Axiom::ci(["B"], RhsConcept::Atom("C".into())),
        ]);
        assert!(entails_ci(&t, &Axiom::ci(["A"], ex("R", &["C"]))).unwrap());
        assert!(entails_ci(&t, &Axiom::ci(["A"], ex("R", &["B", "C"]))).unwrap());
        assert!(!entails_ci(&t, &Axiom::ci(["B"], ex("R", &[]))).unwrap());
    }

    #[test]
    fn forall_through_role_inclusion() {
        let t = TBox::from_axioms([
            Axiom::ri(Role::named("P"), Role::named("R")),
            Axiom::ci(["A"], RhsConcept::Forall(Role::named("R"), "B".into())),
        ]);
        let ci = Axiom::ci(["A"], RhsConcept::Forall(Role::named("P"), "B".into()));
        assert!(entails_ci(&t, &ci).unwrap());
        let e = Entailer::new(&t);
        assert!(e
            .check(&Axiom::ri(Role::inv_of("P"), Role::inv_of("R")))
            .unwrap()
            .holds());
        assert!(!e
            .check(&Axiom::ri(Role::named("R"), Role::named("P")))
            .unwrap()
            .holds());
    }

    #[test]
    fn at_most_is_inherited_by_subroles() {
        let t = TBox::from_axioms([
            Axiom::ri(Role::named("P"), Role::named("R")),
            Axiom::ci(["A"], RhsConcept::AtMost1(Role::named("R"), None)),
            Axiom::ci(["B"], RhsConcept::Atom("B".into())),
        ]);
        let yes = Axiom::ci(
            ["A"],
            RhsConcept::AtMost1(Role::named("P"), Some("B".into())),
        );
        let no = Axiom::ci(["B"], RhsConcept::AtMost1(Role::named("P"), None));
        assert!(entails_ci(&t, &yes).unwrap());
        assert!(!entails_ci(&t, &no).unwrap());
    }

    #[test]
    fn unsatisfiable_lhs_entails_everything() {
        let t = TBox::from_axioms([
            Axiom::ci(["A", "B"], RhsConcept::Bottom),
            Axiom::ci(["C"], RhsConcept::Atom("C".into())),
        ]);
        assert!(entails_ci(&t, &Axiom::ci(["A", "B"], RhsConcept::Atom("C".into()))).unwrap());
        assert!(!entails_ci(&t, &Axiom::ci(["A"], RhsConcept::Bottom)).unwrap());
    }

    #[test]
    fn dllite_exists_on_the_left() {
        let t = TBox::from_axioms([Axiom::ci(
            Vec::<Name>::new(),
            RhsConcept::Forall(Role::inv_of("R"), "B".into()),
        )]);
        let e = Entailer::new(&t);
        let ax =
            DlLiteAxiom::ConceptIncl(Basic::Exists(Role::named("R")), Basic::Concept("B".into()));
        assert!(e.check_dllite(&ax).holds());
        let inv =
            DlLiteAxiom::ConceptIncl(Basic::Exists(Role::inv_of("R")), Basic::Concept("B".into()));
        assert!(!e.check_dllite(&inv).holds());
    }

    #[test]
    fn names_outside_the_signature_are_rejected() {
        let t = TBox::from_axioms([Axiom::ci(["A"], RhsConcept::Atom("B".into()))]);
        assert!(entails_ci(&t, &Axiom::ci(["Z"], RhsConcept::Atom("B".into()))).is_err());
        assert!(entails_ci(&t, &Axiom::ri(Role::named("P"), Role::named("P"))).is_err());
    }
}
