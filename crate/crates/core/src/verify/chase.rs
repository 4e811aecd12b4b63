//! Restricted chase over normal-form TBoxes with successor reuse, merging for
//! at-most-one restrictions, and an optional typed mode that closes
//! anonymous elements under their completed types.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::abox::ABox;
use crate::dl::{Axiom, RhsConcept, Role, TBox};
use crate::name::Name;

pub const INCONSISTENT_MARKER: &str = "_Inconsistent";

pub type ElemId = usize;

/// Completed types by initial label; `None` marks an unsatisfiable one.
type Types = HashMap<BTreeSet<Name>, Option<BTreeSet<Name>>>;

#[derive(Debug, Clone)]
pub struct ChaseOptions {
    /// Maximal path length of generated elements below their seed.
    pub depth: usize,
    /// Close anonymous elements under their types instead of generating
    /// their successors, which makes labels exact at any depth. Ignored when
    /// the TBox has at-most restrictions.
    pub blocking: bool,
    pub max_elements: usize,
}

impl ChaseOptions {
    pub fn with_depth(depth: usize) -> Self {
        ChaseOptions {
            depth,
            blocking: true,
            max_elements: 20_000,
        }
    }

    pub fn unblocked(depth: usize) -> Self {
        ChaseOptions {
            blocking: false,
            ..ChaseOptions::with_depth(depth)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Element {
    /// Individual name, or `σ.w_R…` for a generated element below `σ`.
    pub label: String,
    pub named: bool,
    pub concepts: BTreeSet<Name>,
    /// `(R, e)` means `R(self, e)`; both directions are stored.
    pub edges: BTreeSet<(Role, ElemId)>,
    pub parent: Option<ElemId>,
    pub depth: usize,
    pub merged_into: Option<ElemId>,
}

/// A finite fragment of the canonical model.
#[derive(Debug, Clone, Default)]
pub struct ChaseModel {
    pub elements: Vec<Element>,
    pub individuals: BTreeMap<Name, ElemId>,
    pub inconsistent: bool,
    /// Nothing was left ungenerated: the model is a fixpoint.
    pub saturated_at_depth: bool,
    /// Every element label is final; only blocked elements lack successors.
    pub labels_complete: bool,
}

impl ChaseModel {
    pub fn from_abox(a: &ABox) -> ChaseModel {
        let mut m = ChaseModel::default();
        for i in a.individuals() {
            m.add_named(i);
        }
        for (c, i) in &a.concepts {
            let id = m.individuals[i];
            m.elements[id].concepts.insert(c.clone());
        }
        m
    }

    pub fn add_named(&mut self, n: Name) -> ElemId {
        if let Some(&id) = self.individuals.get(&n) {
            return id;
        }
        let id = self.push(n.to_string(), true, None, 0);
        self.individuals.insert(n, id);
        id
    }

    /// A mergeable seed element that is not an individual.
    pub fn add_anonymous(&mut self, concepts: impl IntoIterator<Item = Name>) -> ElemId {
        let id = self.push(format!("_w{}", self.elements.len()), false, None, 0);
        self.elements[id].concepts.extend(concepts);
        id
    }

    fn push(&mut self, label: String, named: bool, parent: Option<ElemId>, depth: usize) -> ElemId {
        self.elements.push(Element {
            label,
            named,
            concepts: BTreeSet::new(),
            edges: BTreeSet::new(),
            parent,
            depth,
            merged_into: None,
        });
        self.elements.len() - 1
    }

    pub fn find(&self, mut id: ElemId) -> ElemId {
        while let Some(n) = self.elements[id].merged_into {
            id = n;
        }
        id
    }

    pub fn alive(&self) -> impl Iterator<Item = ElemId> + '_ {
        (0..self.elements.len()).filter(|&i| self.elements[i].merged_into.is_none())
    }

    pub fn element(&self, id: ElemId) -> &Element {
        &self.elements[self.find(id)]
    }

    pub fn has_concept(&self, id: ElemId, c: &Name) -> bool {
        self.element(id).concepts.contains(c)
    }

    pub fn has_edge(&self, a: ElemId, r: &Role, b: ElemId) -> bool {
        let b = self.find(b);
        self.element(a).edges.contains(&(r.clone(), b))
    }

    pub fn individual(&self, n: &Name) -> Option<ElemId> {
        self.individuals.get(n).map(|&i| self.find(i))
    }

    /// Names of the individual elements, keyed by alive element id.
    pub fn named_elements(&self) -> BTreeMap<ElemId, Name> {
        self.individuals
            .iter()
            .map(|(n, &i)| (self.find(i), n.clone()))
            .collect()
    }

    /// Concept and role facts over individuals only.
    pub fn named_facts(&self) -> ABox {
        let mut out = ABox::new();
        let names = self.named_elements();
        for (&id, n) in &names {
            for c in &self.elements[id].concepts {
                out.assert_concept(c.clone(), n.clone());
            }
            for (r, f) in &self.elements[id].edges {
                if r.inverse {
                    continue;
                }
                if let Some(m) = names.get(f) {
                    out.assert_role(r.name.clone(), n.clone(), m.clone());
                }
            }
        }
        out
    }
}

/// A TBox compiled for repeated chasing.
#[derive(Debug, Clone)]
pub struct Reasoner {
    cis: Vec<(BTreeSet<Name>, RhsConcept)>,
    supers: BTreeMap<Role, BTreeSet<Role>>,
    disjoint: Vec<(Role, Role)>,
    has_at_most: bool,
}

impl Reasoner {
    pub fn new(t: &TBox) -> Reasoner {
        let mut cis = Vec::new();
        let mut direct: BTreeMap<Role, BTreeSet<Role>> = BTreeMap::new();
        let mut disjoint = Vec::new();
        for r in t.sig.all_roles() {
            direct.entry(r.clone()).or_default().insert(r);
        }
        for ax in &t.axioms {
            match ax {
                Axiom::Ci { lhs, rhs } => cis.push((lhs.clone(), rhs.clone())),
                Axiom::Ri { sub, sup } => {
                    direct.entry(sub.clone()).or_default().insert(sup.clone());
                    direct.entry(sub.inv()).or_default().insert(sup.inv());
                }
                Axiom::RoleDisjoint(a, b) => {
                    disjoint.push((a.clone(), b.clone()));
                    disjoint.push((a.inv(), b.inv()));
                }
            }
        }
        let mut supers = BTreeMap::new();
        for r in direct.keys() {
            let mut seen: BTreeSet<Role> = BTreeSet::new();
            let mut stack = vec![r.clone()];
            while let Some(s) = stack.pop() {
                if seen.insert(s.clone()) {
                    stack.extend(direct.get(&s).into_iter().flatten().cloned());
                }
            }
            supers.insert(r.clone(), seen);
        }
        Reasoner {
            cis,
            supers,
            disjoint,
            has_at_most: t.has_at_most(),
        }
    }

    pub fn has_at_most(&self) -> bool {
        self.has_at_most
    }

    /// `r` and every role it is entailed to be included in.
    pub fn super_roles(&self, r: &Role) -> BTreeSet<Role> {
        self.supers
            .get(r)
            .cloned()
            .unwrap_or_else(|| [r.clone()].into())
    }

    pub fn add_edge(&self, m: &mut ChaseModel, a: ElemId, r: &Role, b: ElemId) -> bool {
        let (a, b) = (m.find(a), m.find(b));
        let mut changed = false;
        for s in self.super_roles(r) {
            changed |= m.elements[a].edges.insert((s.clone(), b));
            changed |= m.elements[b].edges.insert((s.inv(), a));
        }
        changed
    }

    /// Adds the role assertions of an ABox to a model built by `from_abox`.
    pub fn seed_roles(&self, m: &mut ChaseModel, a: &ABox) {
        for (r, x, y) in &a.roles {
            let (ix, iy) = (m.individuals[x], m.individuals[y]);
            self.add_edge(m, ix, &Role::named(r.clone()), iy);
        }
    }

    fn merge(&self, m: &mut ChaseModel, x: ElemId, y: ElemId) {
        let (x, y) = (m.find(x), m.find(y));
        if x == y {
            return;
        }
        let (ex, ey) = (&m.elements[x], &m.elements[y]);
        if ex.named && ey.named {
            m.inconsistent = true;
            return;
        }
        let (keep, gone) = if ex.named || (!ey.named && x < y) {
            (x, y)
        } else {
            (y, x)
        };
        let concepts = std::mem::take(&mut m.elements[gone].concepts);
        let edges = std::mem::take(&mut m.elements[gone].edges);
        m.elements[gone].merged_into = Some(keep);
        m.elements[keep].concepts.extend(concepts);
        let d = m.elements[gone].depth.min(m.elements[keep].depth);
        m.elements[keep].depth = d;
        for (r, f) in edges {
            let f = if f == gone { keep } else { f };
            m.elements[f].edges.remove(&(r.inv(), gone));
            m.elements[keep].edges.insert((r.clone(), f));
            m.elements[f].edges.insert((r.inv(), keep));
        }
    }

    /// Applies all deterministic rules until nothing changes.
    fn propagate(&self, m: &mut ChaseModel) {
        let marker = Name::from(INCONSISTENT_MARKER);
        loop {
            if m.inconsistent {
                return;
            }
            let mut changed = false;
            let ids: Vec<ElemId> = m.alive().collect();
            'elems: for e in ids {
                if m.elements[e].merged_into.is_some() {
                    continue;
                }
                if m.elements[e].concepts.contains(&marker) {
                    m.inconsistent = true;
                    return;
                }
                for (lhs, rhs) in &self.cis {
                    if !lhs.is_subset(&m.elements[e].concepts) {
                        continue;
                    }
                    match rhs {
                        RhsConcept::Atom(b) => {
                            changed |= m.elements[e].concepts.insert(b.clone());
                        }
                        RhsConcept::Bottom => {
                            m.inconsistent = true;
                            return;
                        }
                        RhsConcept::Forall(r, a) => {
                            let targets: Vec<ElemId> = m.elements[e]
                                .edges
                                .iter()
                                .filter(|(s, _)| s == r)
                                .map(|(_, f)| *f)
                                .collect();
                            for f in targets {
                                changed |= m.elements[f].concepts.insert(a.clone());
                            }
                        }
                        RhsConcept::AtMost1(r, filler) => {
                            let mut hits: Vec<ElemId> = m.elements[e]
                                .edges
                                .iter()
                                .filter(|(s, f)| {
                                    s == r
                                        && filler
                                            .as_ref()
                                            .is_none_or(|a| m.elements[*f].concepts.contains(a))
                                })
                                .map(|(_, f)| *f)
                                .collect();
                            hits.dedup();
                            if hits.len() >= 2 {
                                self.merge(m, hits[0], hits[1]);
                                changed = true;
                                if m.inconsistent {
                                    return;
                                }
                                break 'elems;
                            }
                        }
                        RhsConcept::Exists(..) => {}
                    }
                }
                for (r1, r2) in &self.disjoint {
                    let clash = m.elements[e]
                        .edges
                        .iter()
                        .any(|(s, f)| s == r1 && m.elements[e].edges.contains(&(r2.clone(), *f)));
                    if clash {
                        m.inconsistent = true;
                        return;
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// Existential CIs applicable at `e` without a witnessing neighbor.
    fn unsatisfied(&self, m: &ChaseModel, e: ElemId) -> Vec<(Role, BTreeSet<Name>)> {
        let el = &m.elements[e];
        let mut out = Vec::new();
        for (lhs, rhs) in &self.cis {
            if let RhsConcept::Exists(r, filler) = rhs {
                if !lhs.is_subset(&el.concepts) {
                    continue;
                }
                let ok = el
                    .edges
                    .iter()
                    .any(|(s, f)| s == r && filler.is_subset(&m.elements[*f].concepts));
                if !ok && !out.iter().any(|(r2, f2)| r2 == r && f2 == filler) {
                    out.push((r.clone(), filler.clone()));
                }
            }
        }
        out
    }

    /// Atomic consequences of `s`, or `None` if `s` is unsatisfiable.
    fn close_atomic(&self, s: &BTreeSet<Name>) -> Option<BTreeSet<Name>> {
        let mut s = s.clone();
        loop {
            let mut changed = false;
            for (lhs, rhs) in &self.cis {
                if !lhs.is_subset(&s) {
                    continue;
                }
                match rhs {
                    RhsConcept::Atom(b) => changed |= s.insert(b.clone()),
                    RhsConcept::Bottom => return None,
                    _ => {}
                }
            }
            if s.iter().any(|c| c.as_str() == INCONSISTENT_MARKER) {
                return None;
            }
            if !changed {
                return Some(s);
            }
        }
    }

    /// Concepts `A` with some `L ⊑ ∀t.A`, `L ⊆ s` and `t` among `roles`.
    fn forall_along(&self, s: &BTreeSet<Name>, roles: &BTreeSet<Role>) -> Vec<Name> {
        self.cis
            .iter()
            .filter_map(|(lhs, rhs)| match rhs {
                RhsConcept::Forall(t, a) if roles.contains(t) && lhs.is_subset(s) => {
                    Some(a.clone())
                }
                _ => None,
            })
            .collect()
    }

    /// One refinement of the type `cur`: atomic closure plus what each
    /// required successor sends back.
    fn type_step(&self, types: &mut Types, cur: &BTreeSet<Name>) -> Option<BTreeSet<Name>> {
        let mut s = self.close_atomic(cur)?;
        for (lhs, rhs) in &self.cis {
            let RhsConcept::Exists(r, filler) = rhs else {
                continue;
            };
            if !lhs.is_subset(&s) {
                continue;
            }
            let down = self.super_roles(r);
            if self
                .disjoint
                .iter()
                .any(|(a, b)| down.contains(a) && down.contains(b))
            {
                return None;
            }
            let mut init = filler.clone();
            init.extend(self.forall_along(&s, &down));
            let child = types.entry(init.clone()).or_insert(Some(init)).clone()?;
            s.extend(self.forall_along(&child, &self.super_roles(&r.inv())));
        }
        self.close_atomic(&s)
    }

    /// The final label of an anonymous element whose label is `s`, with
    /// everything its generated successors imply. `None` if unsatisfiable.
    fn complete_type(&self, types: &mut Types, s: &BTreeSet<Name>) -> Option<BTreeSet<Name>> {
        if !types.contains_key(s) {
            types.insert(s.clone(), Some(s.clone()));
            loop {
                let known = types.len();
                let mut changed = false;
                let keys: Vec<BTreeSet<Name>> = types.keys().cloned().collect();
                for k in keys {
                    let Some(cur) = types[&k].clone() else {
                        continue;
                    };
                    let next = self.type_step(types, &cur);
                    if next.as_ref() != Some(&cur) {
                        types.insert(k, next);
                        changed = true;
                    }
                }
                if !changed && types.len() == known {
                    break;
                }
            }
        }
        types[s].clone()
    }

    /// Named elements get their successors; anonymous elements are closed
    /// under their types instead of being expanded.
    fn run_typed(&self, m: &mut ChaseModel, opts: &ChaseOptions) {
        let mut types = Types::new();
        loop {
            self.propagate(m);
            if m.inconsistent {
                m.saturated_at_depth = true;
                m.labels_complete = true;
                return;
            }
            let mut changed = false;
            let mut capped = false;
            let mut open = false;
            for e in m.alive().collect::<Vec<_>>() {
                if m.elements[e].named {
                    for (r, filler) in self.unsatisfied(m, e) {
                        if m.elements.len() >= opts.max_elements {
                            capped = true;
                            break;
                        }
                        let label = successor_label(&m.elements[e].label, &r, &filler);
                        let c = m.push(label, false, Some(e), 1);
                        m.elements[c].concepts.extend(filler);
                        self.add_edge(m, e, &r, c);
                        changed = true;
                    }
                    continue;
                }
                match self.complete_type(&mut types, &m.elements[e].concepts) {
                    None => {
                        m.inconsistent = true;
                        break;
                    }
                    Some(c) => {
                        if c != m.elements[e].concepts {
                            m.elements[e].concepts = c;
                            changed = true;
                        }
                    }
                }
                open |= !self.unsatisfied(m, e).is_empty();
            }
            if m.inconsistent {
                continue;
            }
            if !changed || capped {
                m.saturated_at_depth = !open && !capped;
                m.labels_complete = !capped;
                return;
            }
        }
    }

    /// Runs the chase on `m` in place.
    pub fn run(&self, m: &mut ChaseModel, opts: &ChaseOptions) {
        if opts.blocking && !self.has_at_most {
            return self.run_typed(m, opts);
        }
        loop {
            self.propagate(m);
            if m.inconsistent {
                m.saturated_at_depth = true;
                m.labels_complete = true;
                return;
            }
            let mut work: Vec<(usize, ElemId, Vec<(Role, BTreeSet<Name>)>)> = Vec::new();
            let mut cut = false;
            for e in m.alive().collect::<Vec<_>>() {
                let u = self.unsatisfied(m, e);
                if u.is_empty() {
                    continue;
                }
                if m.elements[e].depth >= opts.depth {
                    cut = true;
                } else {
                    work.push((m.elements[e].depth, e, u));
                }
            }
            let room = opts.max_elements.saturating_sub(m.elements.len());
            if work.is_empty() || room == 0 {
                let capped = !work.is_empty();
                m.saturated_at_depth = !cut && !capped;
                m.labels_complete = !cut && !capped;
                return;
            }
            let level = work.iter().map(|w| w.0).min().unwrap();
            let mut made = 0;
            for (d, e, u) in work {
                if d != level {
                    continue;
                }
                for (r, filler) in u {
                    if made >= room {
                        break;
                    }
                    let label = successor_label(&m.elements[e].label, &r, &filler);
                    let c = m.push(label, false, Some(e), d + 1);
                    m.elements[c].concepts.extend(filler);
                    self.add_edge(m, e, &r, c);
                    made += 1;
                }
            }
        }
    }

    /// Chases an ABox.
    pub fn chase(&self, a: &ABox, opts: &ChaseOptions) -> ChaseModel {
        let mut m = ChaseModel::from_abox(a);
        self.seed_roles(&mut m, a);
        self.run(&mut m, opts);
        m
    }
}

fn successor_label(parent: &str, r: &Role, filler: &BTreeSet<Name>) -> String {
    let role = if r.inverse {
        format!("{}-", r.name)
    } else {
        r.name.to_string()
    };
    let mut s = format!("{parent}.w_{role}");
    for f in filler {
        s.push('_');
        s.push_str(f.as_str());
    }
    s
}

/// Depth-bounded chase of `a` under `t`. Equality blocking is used when `t`
/// has no at-most restrictions.
pub fn chase(t: &TBox, a: &ABox, depth: usize) -> ChaseModel {
    Reasoner::new(t).chase(a, &ChaseOptions::with_depth(depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::Axiom;

    fn tbox(axioms: Vec<Axiom>) -> TBox {
        TBox::from_axioms(axioms)
    }

    fn ex(r: Role, f: &[&str]) -> RhsConcept {
        RhsConcept::Exists(r, f.iter().map(|s| Name::from(*s)).collect())
    }

    #[test]
    fn one_generation_step() {
        let t = tbox(vec![Axiom::ci(["A"], ex(Role::named("R"), &["B"]))]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        let m = chase(&t, &a, 2);
        assert!(m.saturated_at_depth);
        let ids: Vec<_> = m.alive().collect();
        assert_eq!(ids.len(), 2);
        let w = ids[1];
        assert_eq!(m.elements[w].label, "a.w_R_B");
        assert!(m.has_concept(w, &"B".into()));
        assert!(m.has_edge(0, &Role::named("R"), w));
        assert!(m.has_edge(w, &Role::inv_of("R"), 0));
    }

    #[test]
    fn empty_tbox_keeps_the_abox() {
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        a.assert_role("R", "a", "b");
        let m = chase(&TBox::new(), &a, 3);
        assert!(m.saturated_at_depth);
        assert_eq!(m.named_facts(), a);
    }

    #[test]
    fn inverse_forall_propagates_back() {
        let t = tbox(vec![
            Axiom::ci(["A"], ex(Role::named("R"), &["B"])),
            Axiom::ci(["B"], RhsConcept::Forall(Role::inv_of("R"), "C".into())),
        ]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        let m = chase(&t, &a, 1);
        assert!(m.has_concept(0, &"C".into()));
    }

    #[test]
    fn cyclic_existentials_stop_at_one_level() {
        let t = tbox(vec![Axiom::ci(["A"], ex(Role::named("R"), &["A"]))]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        let m = chase(&t, &a, 50);
        assert!(m.labels_complete);
        assert!(!m.saturated_at_depth);
        assert_eq!(m.elements.len(), 2);
        let u = Reasoner::new(&t).chase(&a, &ChaseOptions::unblocked(4));
        assert_eq!(u.elements.len(), 5);
        assert!(!u.labels_complete);
    }

    #[test]
    fn typed_labels_see_deep_successors() {
        // A ⊑ ∃R.B, B ⊑ ∃R.C, C ⊑ ∃R.D, D ⊑ ∀R⁻.E, E ⊑ ∀R⁻.F, F ⊑ ∀R⁻.G
        let t = tbox(vec![
            Axiom::ci(["A"], ex(Role::named("R"), &["B"])),
            Axiom::ci(["B"], ex(Role::named("R"), &["C"])),
            Axiom::ci(["C"], ex(Role::named("R"), &["D"])),
            Axiom::ci(["D"], RhsConcept::Forall(Role::inv_of("R"), "E".into())),
            Axiom::ci(["E"], RhsConcept::Forall(Role::inv_of("R"), "F".into())),
            Axiom::ci(["F"], RhsConcept::Forall(Role::inv_of("R"), "G".into())),
        ]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        let m = chase(&t, &a, 1);
        assert!(m.labels_complete);
        assert!(m.has_concept(m.individual(&"a".into()).unwrap(), &"G".into()));
    }

    #[test]
    fn unsatisfiable_successor_type_is_inconsistent() {
        let t = tbox(vec![
            Axiom::ci(["A"], ex(Role::named("R"), &["B"])),
            Axiom::ci(["B"], ex(Role::named("R"), &["C"])),
            Axiom::ci(["C"], RhsConcept::Bottom),
        ]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        assert!(chase(&t, &a, 1).inconsistent);
    }

    #[test]
    fn functional_role_merges_successors() {
        let t = tbox(vec![
            Axiom::ci(["A"], ex(Role::named("R"), &["B"])),
            Axiom::ci(["A"], ex(Role::named("R"), &["C"])),
            Axiom::ci(["A"], RhsConcept::AtMost1(Role::named("R"), None)),
        ]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        let m = chase(&t, &a, 3);
        assert!(!m.inconsistent);
        let anon: Vec<_> = m.alive().filter(|&i| !m.elements[i].named).collect();
        assert_eq!(anon.len(), 1);
        let c = &m.elements[anon[0]].concepts;
        assert!(c.contains("B") && c.contains("C"));
    }

    #[test]
    fn merging_two_individuals_is_inconsistent() {
        let t = tbox(vec![Axiom::ci(
            ["A"],
            RhsConcept::AtMost1(Role::named("R"), None),
        )]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        a.assert_role("R", "a", "b");
        a.assert_role("R", "a", "c");
        assert!(chase(&t, &a, 2).inconsistent);
    }

    #[test]
    fn merge_into_named_keeps_the_name() {
        let t = tbox(vec![
            Axiom::ci(["A"], ex(Role::named("R"), &["B"])),
            Axiom::ci(["A"], RhsConcept::AtMost1(Role::named("R"), None)),
        ]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        a.assert_role("R", "a", "b");
        let m = chase(&t, &a, 2);
        assert!(!m.inconsistent);
        let b = m.individual(&"b".into()).unwrap();
        assert!(m.has_concept(b, &"B".into()));
    }

    #[test]
    fn role_hierarchy_and_disjointness() {
        let t = tbox(vec![
            Axiom::ri(Role::named("P"), Role::inv_of("Q")),
            Axiom::role_disjoint(Role::named("Q"), Role::named("S")),
        ]);
        let mut a = ABox::new();
        a.assert_role("P", "a", "b");
        let m = chase(&t, &a, 1);
        assert!(!m.inconsistent);
        assert!(m
            .named_facts()
            .roles
            .contains(&("Q".into(), "b".into(), "a".into())));
        a.assert_role("S", "b", "a");
        assert!(chase(&t, &a, 1).inconsistent);
    }

    #[test]
    fn marker_concept_is_inconsistency() {
        let t = tbox(vec![Axiom::ci(
            ["A"],
            RhsConcept::Atom(INCONSISTENT_MARKER.into()),
        )]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        assert!(chase(&t, &a, 1).inconsistent);
    }
}
