//! Horn-ALCHIQ and DL-Lite_R TBoxes: domain types, structural normalization,
//! chase-based entailment and the four TBox transformations of the rewriting
//! pipeline.

mod entail;
mod normalize;
mod steps;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::name::{is_token, Name};

pub use entail::{default_entailment_depth, entails_ci, Entailer, Entailment, RootType};
pub use normalize::{normalize_structural, SurfaceAxiom, SurfaceConcept};
pub use steps::{
    conjunction_name, dllite_closure, dllite_closure_over, norm_and, norm_exists,
    saturate_existential_cis, subsets_upto, StepReport,
};

/// A role name or its inverse. Nested inversion is never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role {
    pub name: Name,
    pub inverse: bool,
}

impl Role {
    pub fn named(name: impl Into<Name>) -> Self {
        Role {
            name: name.into(),
            inverse: false,
        }
    }

    pub fn inv_of(name: impl Into<Name>) -> Self {
        Role {
            name: name.into(),
            inverse: true,
        }
    }

    pub fn inv(&self) -> Role {
        Role {
            name: self.name.clone(),
            inverse: !self.inverse,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "inv({})", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

impl fmt::Debug for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Right-hand side of a normal-form concept inclusion.
///
/// `Exists` carries a filler *set*: the empty set is `⊤`, a singleton is a
/// concept name, and larger sets only occur between saturation and
/// `norm_exists`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RhsConcept {
    Bottom,
    Atom(Name),
    Exists(Role, BTreeSet<Name>),
    Forall(Role, Name),
    AtMost1(Role, Option<Name>),
}

/// A normal-form Horn-ALCHIQ axiom. An empty CI left-hand side denotes `⊤`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Ci {
        lhs: BTreeSet<Name>,
        rhs: RhsConcept,
    },
    Ri {
        sub: Role,
        sup: Role,
    },
    RoleDisjoint(Role, Role),
}

impl Axiom {
    pub fn ci<I, S>(lhs: I, rhs: RhsConcept) -> Axiom
    where
        I: IntoIterator<Item = S>,
        S: Into<Name>,
    {
        Axiom::Ci {
            lhs: lhs.into_iter().map(Into::into).collect(),
            rhs,
        }
    }

    /// `R1 ⊑ R2` and `R1⁻ ⊑ R2⁻` are the same axiom; keep the sub-role plain.
    pub fn ri(sub: Role, sup: Role) -> Axiom {
        if sub.inverse {
            Axiom::Ri {
                sub: sub.inv(),
                sup: sup.inv(),
            }
        } else {
            Axiom::Ri { sub, sup }
        }
    }

    pub fn role_disjoint(r1: Role, r2: Role) -> Axiom {
        let (a, b) = canonical_role_pair(r1, r2);
        Axiom::RoleDisjoint(a, b)
    }

    pub fn is_ci(&self) -> bool {
        matches!(self, Axiom::Ci { .. })
    }

    /// Concept and role names occurring in the axiom.
    pub fn names(&self) -> (BTreeSet<Name>, BTreeSet<Name>) {
        let mut concepts = BTreeSet::new();
        let mut roles = BTreeSet::new();
        match self {
            Axiom::Ci { lhs, rhs } => {
                concepts.extend(lhs.iter().cloned());
                match rhs {
                    RhsConcept::Bottom => {}
                    RhsConcept::Atom(a) => {
                        concepts.insert(a.clone());
                    }
                    RhsConcept::Exists(r, f) => {
                        roles.insert(r.name.clone());
                        concepts.extend(f.iter().cloned());
                    }
                    RhsConcept::Forall(r, a) => {
                        roles.insert(r.name.clone());
                        concepts.insert(a.clone());
                    }
                    RhsConcept::AtMost1(r, a) => {
                        roles.insert(r.name.clone());
                        concepts.extend(a.iter().cloned());
                    }
                }
            }
            Axiom::Ri { sub, sup } => {
                roles.insert(sub.name.clone());
                roles.insert(sup.name.clone());
            }
            Axiom::RoleDisjoint(a, b) => {
                roles.insert(a.name.clone());
                roles.insert(b.name.clone());
            }
        }
        (concepts, roles)
    }
}

/// Disjointness of `R1, R2` equals that of `R2, R1` and of `R1⁻, R2⁻`.
fn canonical_role_pair(r1: Role, r2: Role) -> (Role, Role) {
    let variants = [
        (r1.clone(), r2.clone()),
        (r2.clone(), r1.clone()),
        (r1.inv(), r2.inv()),
        (r2.inv(), r1.inv()),
    ];
    variants
        .into_iter()
        .filter(|(a, _)| !a.inverse)
        .min()
        .expect("one variant has a plain first role")
}

fn write_lhs(f: &mut fmt::Formatter<'_>, lhs: &BTreeSet<Name>) -> fmt::Result {
    if lhs.is_empty() {
        return f.write_str("top");
    }
    for (i, n) in lhs.iter().enumerate() {
        if i > 0 {
            f.write_str(" & ")?;
        }
        write!(f, "{n}")?;
    }
    Ok(())
}

impl fmt::Display for RhsConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsConcept::Bottom => f.write_str("bot"),
            RhsConcept::Atom(a) => write!(f, "{a}"),
            RhsConcept::Exists(r, fill) => match fill.len() {
                0 => write!(f, "exists {r}"),
                1 => write!(f, "exists {r} . {}", fill.iter().next().unwrap()),
                _ => {
                    write!(f, "exists {r} . (")?;
                    write_lhs(f, fill)?;
                    f.write_str(")")
                }
            },
            RhsConcept::Forall(r, a) => write!(f, "forall {r} . {a}"),
            RhsConcept::AtMost1(r, None) => write!(f, "atmost1 {r}"),
            RhsConcept::AtMost1(r, Some(a)) => write!(f, "atmost1 {r} . {a}"),
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Ci { lhs, rhs } => {
                write_lhs(f, lhs)?;
                write!(f, " <= {rhs}")
            }
            Axiom::Ri { sub, sup } => write!(f, "{sub} <= {sup}"),
            Axiom::RoleDisjoint(a, b) => write!(f, "{a} & {b} <= bot"),
        }
    }
}

/// Concept, role and view names. The three sets are pairwise disjoint.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<Name>,
    pub roles: BTreeSet<Name>,
    pub views: BTreeMap<Name, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn contains(&self, n: &Name) -> bool {
        self.concepts.contains(n) || self.roles.contains(n) || self.views.contains_key(n)
    }

    /// Arity of an ontology predicate: 1 for concepts, 2 for roles.
    pub fn arity_of(&self, n: &Name) -> Option<usize> {
        if self.concepts.contains(n) {
            Some(1)
        } else if self.roles.contains(n) {
            Some(2)
        } else {
            self.views.get(n).copied()
        }
    }

    /// Checks the token syntax of every name and pairwise disjointness.
    pub fn validate(&self) -> Result<()> {
        for n in self
            .concepts
            .iter()
            .chain(self.roles.iter())
            .chain(self.views.keys())
        {
            if !is_token(n.as_str()) {
                return Err(Error::validation(format!("`{n}` is not a valid name")));
            }
        }
        if let Some(n) = self.concepts.intersection(&self.roles).next() {
            return Err(Error::validation(format!(
                "`{n}` is used both as a concept and as a role"
            )));
        }
        for v in self.views.keys() {
            if self.concepts.contains(v) || self.roles.contains(v) {
                return Err(Error::validation(format!(
                    "view `{v}` clashes with an ontology name"
                )));
            }
        }
        for (v, a) in &self.views {
            if *a != 1 && *a != 2 {
                return Err(Error::validation(format!(
                    "view `{v}` has arity {a}; only 1 and 2 are supported"
                )));
            }
        }
        Ok(())
    }

    /// Roles and their inverses, in a fixed order.
    pub fn all_roles(&self) -> Vec<Role> {
        self.roles
            .iter()
            .flat_map(|r| [Role::named(r.clone()), Role::inv_of(r.clone())])
            .collect()
    }
}

/// Where a generated name came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// A fresh concept introduced by structural normalization for a subconcept.
    Normalization(String),
    /// A fresh role introduced by `norm_exists` for the source existential CI.
    ExistsRole(Axiom),
    /// A fresh concept standing for a conjunction of concept names.
    Conjunction(BTreeSet<Name>),
    /// A helper concept naming `∃R.⊤` when a DL-Lite TBox is put in normal form.
    SomeValues(Role),
    /// The concept whose nonemptiness signals inconsistency.
    Marker,
    /// A generated name read back from a file; its origin is not recorded.
    Imported,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TBox {
    pub axioms: BTreeSet<Axiom>,
    pub sig: Signature,
    pub fresh_registry: BTreeMap<Name, Provenance>,
}

impl TBox {
    pub fn new() -> Self {
        TBox::default()
    }

    pub fn from_axioms(axioms: impl IntoIterator<Item = Axiom>) -> Self {
        let mut t = TBox::new();
        for a in axioms {
            t.insert(a);
        }
        t
    }

    pub fn insert(&mut self, ax: Axiom) -> bool {
        let (cs, rs) = ax.names();
        self.sig.concepts.extend(cs);
        self.sig.roles.extend(rs);
        self.axioms.insert(ax)
    }

    pub fn declare_concept(&mut self, n: Name) {
        self.sig.concepts.insert(n);
    }

    pub fn declare_role(&mut self, n: Name) {
        self.sig.roles.insert(n);
    }

    pub fn register_fresh(&mut self, n: Name, p: Provenance) {
        self.fresh_registry.insert(n, p);
    }

    pub fn is_conjunction_name(&self, n: &Name) -> bool {
        matches!(self.fresh_registry.get(n), Some(Provenance::Conjunction(_)))
    }

    pub fn has_at_most(&self) -> bool {
        self.axioms.iter().any(|a| {
            matches!(
                a,
                Axiom::Ci {
                    rhs: RhsConcept::AtMost1(..),
                    ..
                }
            )
        })
    }

    pub fn fresh_role_count(&self) -> usize {
        self.fresh_registry
            .values()
            .filter(|p| matches!(p, Provenance::ExistsRole(_)))
            .count()
    }

    /// Every axiom name is in the signature and every reserved name in the
    /// signature has a provenance entry.
    pub fn validate(&self) -> Result<()> {
        self.sig.validate()?;
        for ax in &self.axioms {
            let (cs, rs) = ax.names();
            for c in &cs {
                if !self.sig.concepts.contains(c) {
                    return Err(Error::Invariant(format!("concept `{c}` missing from sig")));
                }
            }
            for r in &rs {
                if !self.sig.roles.contains(r) {
                    return Err(Error::Invariant(format!("role `{r}` missing from sig")));
                }
            }
        }
        for n in self.sig.concepts.iter().chain(self.sig.roles.iter()) {
            if n.is_reserved() && !self.fresh_registry.contains_key(n) {
                return Err(Error::Invariant(format!(
                    "generated name `{n}` has no provenance"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for TBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ax in &self.axioms {
            writeln!(f, "{ax}")?;
        }
        Ok(())
    }
}

/// `A` or `∃R.⊤`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basic {
    Concept(Name),
    Exists(Role),
}

impl fmt::Display for Basic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basic::Concept(a) => write!(f, "{a}"),
            Basic::Exists(r) => write!(f, "exists {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DlLiteAxiom {
    ConceptIncl(Basic, Basic),
    ConceptDisj(Basic, Basic),
    RoleIncl(Role, Role),
    RoleDisj(Role, Role),
}

impl DlLiteAxiom {
    pub fn concept_disj(a: Basic, b: Basic) -> Self {
        if a <= b {
            DlLiteAxiom::ConceptDisj(a, b)
        } else {
            DlLiteAxiom::ConceptDisj(b, a)
        }
    }

    pub fn role_incl(sub: Role, sup: Role) -> Self {
        if sub.inverse {
            DlLiteAxiom::RoleIncl(sub.inv(), sup.inv())
        } else {
            DlLiteAxiom::RoleIncl(sub, sup)
        }
    }

    pub fn role_disj(a: Role, b: Role) -> Self {
        let (a, b) = canonical_role_pair(a, b);
        DlLiteAxiom::RoleDisj(a, b)
    }

    /// Membership test of a normal-form axiom against the DL-Lite_R grammar.
    pub fn from_axiom(ax: &Axiom) -> Option<DlLiteAxiom> {
        match ax {
            Axiom::Ri { sub, sup } => Some(DlLiteAxiom::role_incl(sub.clone(), sup.clone())),
            Axiom::RoleDisjoint(a, b) => Some(DlLiteAxiom::role_disj(a.clone(), b.clone())),
            Axiom::Ci { lhs, rhs } => {
                let names: Vec<&Name> = lhs.iter().collect();
                match (names.as_slice(), rhs) {
                    ([a], RhsConcept::Atom(b)) => Some(DlLiteAxiom::ConceptIncl(
                        Basic::Concept((*a).clone()),
                        Basic::Concept(b.clone()),
                    )),
                    ([a], RhsConcept::Exists(r, f)) if f.is_empty() => {
                        Some(DlLiteAxiom::ConceptIncl(
                            Basic::Concept((*a).clone()),
                            Basic::Exists(r.clone()),
                        ))
                    }
                    ([], RhsConcept::Forall(r, b)) => Some(DlLiteAxiom::ConceptIncl(
                        Basic::Exists(r.inv()),
                        Basic::Concept(b.clone()),
                    )),
                    ([a], RhsConcept::Bottom) => Some(DlLiteAxiom::concept_disj(
                        Basic::Concept((*a).clone()),
                        Basic::Concept((*a).clone()),
                    )),
                    ([a, b], RhsConcept::Bottom) => Some(DlLiteAxiom::concept_disj(
                        Basic::Concept((*a).clone()),
                        Basic::Concept((*b).clone()),
                    )),
                    _ => None,
                }
            }
        }
    }
}

impl fmt::Display for DlLiteAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DlLiteAxiom::ConceptIncl(a, b) => write!(f, "{a} <= {b}"),
            DlLiteAxiom::ConceptDisj(a, b) => write!(f, "{a} & {b} <= bot"),
            DlLiteAxiom::RoleIncl(a, b) => write!(f, "{a} <= {b}"),
            DlLiteAxiom::RoleDisj(a, b) => write!(f, "{a} & {b} <= bot"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DlLiteTBox {
    pub axioms: BTreeSet<DlLiteAxiom>,
}

impl DlLiteTBox {
    pub fn new() -> Self {
        DlLiteTBox::default()
    }

    pub fn contains(&self, ax: &DlLiteAxiom) -> bool {
        self.axioms.contains(ax)
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    /// Concept and role names mentioned by the axioms.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        let basic = |b: &Basic, sig: &mut Signature| match b {
            Basic::Concept(a) => {
                sig.concepts.insert(a.clone());
            }
            Basic::Exists(r) => {
                sig.roles.insert(r.name.clone());
            }
        };
        for ax in &self.axioms {
            match ax {
                DlLiteAxiom::ConceptIncl(a, b) | DlLiteAxiom::ConceptDisj(a, b) => {
                    basic(a, &mut sig);
                    basic(b, &mut sig);
                }
                DlLiteAxiom::RoleIncl(a, b) | DlLiteAxiom::RoleDisj(a, b) => {
                    sig.roles.insert(a.name.clone());
                    sig.roles.insert(b.name.clone());
                }
            }
        }
        sig
    }

    /// The same theory as a normal-form TBox. `∃R.⊤` on a left-hand side
    /// becomes `⊤ ⊑ ∀R⁻.A`, or a helper concept `_SOME__…` when it must be
    /// conjoined or used as the subject of an existential.
    pub fn to_tbox(&self) -> TBox {
        let mut t = TBox::new();
        let sig = self.signature();
        for c in &sig.concepts {
            t.declare_concept(c.clone());
        }
        for r in &sig.roles {
            t.declare_role(r.clone());
        }
        for n in sig.concepts.iter().chain(&sig.roles) {
            if n.is_reserved() {
                t.register_fresh(n.clone(), Provenance::Imported);
            }
        }
        let helper = |r: &Role, t: &mut TBox| -> Name {
            let n = some_values_name(r);
            if !t.fresh_registry.contains_key(&n) {
                t.register_fresh(n.clone(), Provenance::SomeValues(r.clone()));
                t.insert(Axiom::ci(
                    Vec::<Name>::new(),
                    RhsConcept::Forall(r.inv(), n.clone()),
                ));
            }
            n
        };
        for ax in &self.axioms {
            match ax {
                DlLiteAxiom::ConceptIncl(lhs, rhs) => {
                    let rhs = match rhs {
                        Basic::Concept(b) => RhsConcept::Atom(b.clone()),
                        Basic::Exists(r) => RhsConcept::Exists(r.clone(), BTreeSet::new()),
                    };
                    match (lhs, rhs) {
                        (Basic::Concept(a), rhs) => {
                            t.insert(Axiom::ci([a.clone()], rhs));
                        }
                        (Basic::Exists(r), RhsConcept::Atom(b)) => {
                            t.insert(Axiom::ci(
                                Vec::<Name>::new(),
                                RhsConcept::Forall(r.inv(), b),
                            ));
                        }
                        (Basic::Exists(r), rhs) => {
                            let h = helper(r, &mut t);
                            t.insert(Axiom::ci([h], rhs));
                        }
                    }
                }
                DlLiteAxiom::ConceptDisj(a, b) => {
                    let mut lhs = BTreeSet::new();
                    for x in [a, b] {
                        let n = match x {
                            Basic::Concept(c) => c.clone(),
                            Basic::Exists(r) => helper(r, &mut t),
                        };
                        lhs.insert(n);
                    }
                    t.insert(Axiom::Ci {
                        lhs,
                        rhs: RhsConcept::Bottom,
                    });
                }
                DlLiteAxiom::RoleIncl(a, b) => {
                    t.insert(Axiom::ri(a.clone(), b.clone()));
                }
                DlLiteAxiom::RoleDisj(a, b) => {
                    t.insert(Axiom::role_disjoint(a.clone(), b.clone()));
                }
            }
        }
        t
    }
}

pub(crate) fn some_values_name(r: &Role) -> Name {
    if r.inverse {
        Name::from(format!("_SOME__inv_{}", r.name))
    } else {
        Name::from(format!("_SOME__{}", r.name))
    }
}

impl fmt::Display for DlLiteTBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ax in &self.axioms {
            writeln!(f, "{ax}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_inversion_is_identity() {
        let r = Role::named("P");
        assert_eq!(r.inv().inv(), r);
    }

    #[test]
    fn role_inclusion_is_stored_with_plain_subrole() {
        let a = Axiom::ri(Role::inv_of("P"), Role::named("Q"));
        assert_eq!(a, Axiom::ri(Role::named("P"), Role::inv_of("Q")));
        assert_eq!(a.to_string(), "P <= inv(Q)");
    }

    #[test]
    fn disjointness_is_symmetric() {
        let a = Axiom::role_disjoint(Role::named("Q"), Role::inv_of("P"));
        let b = Axiom::role_disjoint(Role::inv_of("Q"), Role::named("P"));
        assert_eq!(a, b);
    }

    #[test]
    fn printing_follows_the_text_grammar() {
        let ax = Axiom::ci(["CAcc", "A1"], RhsConcept::Atom("SAcc".into()));
        assert_eq!(ax.to_string(), "A1 & CAcc <= SAcc");
        let ax = Axiom::ci(
            Vec::<Name>::new(),
            RhsConcept::Forall(Role::named("P"), "B".into()),
        );
        assert_eq!(ax.to_string(), "top <= forall P . B");
        let ax = Axiom::ci(
            ["A"],
            RhsConcept::Exists(Role::inv_of("R"), ["B".into(), "C".into()].into()),
        );
        assert_eq!(ax.to_string(), "A <= exists inv(R) . (B & C)");
    }

    #[test]
    fn dllite_membership() {
        let yes = Axiom::ci(["A"], RhsConcept::Exists(Role::named("R"), BTreeSet::new()));
        let no = Axiom::ci(["A", "B"], RhsConcept::Atom("C".into()));
        assert!(DlLiteAxiom::from_axiom(&yes).is_some());
        assert!(DlLiteAxiom::from_axiom(&no).is_none());
        let q = Axiom::ci(
            ["A"],
            RhsConcept::Exists(Role::named("R"), ["B".into()].into()),
        );
        assert!(DlLiteAxiom::from_axiom(&q).is_none());
    }

    #[test]
    fn signature_rejects_category_clash() {
        let mut s = Signature::new();
        s.concepts.insert("X".into());
        s.roles.insert("X".into());
        assert!(s.validate().is_err());
    }
}
