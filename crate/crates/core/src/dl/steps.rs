//! The TBox side of the rewriting: existential saturation, fresh roles for
//! qualified existentials, fresh names for conjunctions, and the DL-Lite_R
//! closure.

use std::collections::{BTreeMap, BTreeSet};

use sha2::{Digest, Sha256};

use super::entail::{Entailer, Entailment};
use super::{Axiom, Basic, DlLiteAxiom, DlLiteTBox, Provenance, RhsConcept, Role, Signature, TBox};
use crate::name::Name;
use crate::verify::chase::INCONSISTENT_MARKER;

/// Side information of a step: how many checks the chase could not decide.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepReport {
    pub undecided: usize,
    pub warnings: Vec<String>,
}

impl StepReport {
    fn note_unknown(&mut self, what: impl FnOnce() -> String) {
        self.undecided += 1;
        if self.warnings.len() < 20 {
            self.warnings.push(what());
        }
    }

    pub fn merge(&mut self, other: StepReport) {
        self.undecided += other.undecided;
        self.warnings.extend(other.warnings);
    }
}

/// Subsets of `names` with at most `max` elements, by size and then
/// lexicographically.
pub fn subsets_upto(names: &[Name], max: usize) -> Vec<BTreeSet<Name>> {
    let mut out = vec![BTreeSet::new()];
    let mut layer: Vec<(usize, BTreeSet<Name>)> = vec![(0, BTreeSet::new())];
    for _ in 0..max.min(names.len()) {
        let mut next = Vec::new();
        for (start, s) in &layer {
            for (i, n) in names.iter().enumerate().skip(*start) {
                let mut t = s.clone();
                t.insert(n.clone());
                next.push((i + 1, t));
            }
        }
        out.extend(next.iter().map(|(_, s)| s.clone()));
        layer = next;
    }
    out
}

fn maximal_sets(sets: Vec<BTreeSet<Name>>) -> Vec<BTreeSet<Name>> {
    let mut out: Vec<BTreeSet<Name>> = Vec::new();
    for s in sets {
        if out.iter().any(|o| s.is_subset(o)) {
            continue;
        }
        out.retain(|o| !o.is_subset(&s));
        out.push(s);
    }
    out.sort();
    out
}

/// Adds every entailed `⊓Aᵢ ⊑ ∃R.(⊓A′ⱼ)` with `|{Aᵢ}| ≤ max_lhs` and a maximal
/// filler set. One CI is kept per maximal filler; a candidate is skipped when
/// an existing existential CI with a smaller left-hand side and a larger
/// filler already implies it.
pub fn saturate_existential_cis(
    t: &TBox,
    max_lhs: usize,
    depth: Option<usize>,
) -> (TBox, StepReport) {
    let entailer = match depth {
        Some(d) => Entailer::with_depth(t, d),
        None => Entailer::new(t),
    };
    let mut out = t.clone();
    let mut report = StepReport::default();
    let concepts: Vec<Name> = t.sig.concepts.iter().cloned().collect();
    let roles = t.sig.all_roles();
    for lhs in subsets_upto(&concepts, max_lhs) {
        let ty = entailer.root_type(&lhs);
        if ty.unsatisfiable {
            continue;
        }
        if !ty.complete {
            report.note_unknown(|| {
                format!(
                    "existential saturation of `{}` is incomplete",
                    show_set(&lhs)
                )
            });
        }
        for r in &roles {
            let Some(labels) = ty.neighbors.get(r) else {
                continue;
            };
            let labels = labels
                .iter()
                .map(|l| l.intersection(&t.sig.concepts).cloned().collect())
                .collect();
            for filler in maximal_sets(labels) {
                let implied = out.axioms.iter().any(|a| match a {
                    Axiom::Ci {
                        lhs: l0,
                        rhs: RhsConcept::Exists(r0, f0),
                    } => r0 == r && l0.is_subset(&lhs) && filler.is_subset(f0),
                    _ => false,
                });
                if !implied {
                    out.insert(Axiom::Ci {
                        lhs: lhs.clone(),
                        rhs: RhsConcept::Exists(r.clone(), filler),
                    });
                }
            }
        }
    }
    (out, report)
}

fn show_set(s: &BTreeSet<Name>) -> String {
    if s.is_empty() {
        return "top".into();
    }
    s.iter().map(Name::as_str).collect::<Vec<_>>().join(" & ")
}

fn lhs_hash(lhs: &BTreeSet<Name>) -> String {
    let joined = lhs.iter().map(Name::as_str).collect::<Vec<_>>().join(",");
    let digest = Sha256::digest(joined.as_bytes());
    digest.iter().take(4).map(|b| format!("{b:02x}")).collect()
}

/// Replaces each `L ⊑ ∃R.F` with nonempty `F` by `L ⊑ ∃P`, `P ⊑ R` and
/// `⊤ ⊑ ∀P.A′` for every `A′ ∈ F`, where `P = _R<k>__<hash of L>` is fresh.
pub fn norm_exists(t: &TBox) -> TBox {
    let mut out = TBox {
        axioms: BTreeSet::new(),
        sig: t.sig.clone(),
        fresh_registry: t.fresh_registry.clone(),
    };
    let mut k = 0;
    for ax in &t.axioms {
        match ax {
            Axiom::Ci {
                lhs,
                rhs: RhsConcept::Exists(r, filler),
            } if !filler.is_empty() => {
                k += 1;
                let p = Name::from(format!("_R{k}__{}", lhs_hash(lhs)));
                out.declare_role(p.clone());
                out.register_fresh(p.clone(), Provenance::ExistsRole(ax.clone()));
                let pr = Role::named(p);
                out.insert(Axiom::Ci {
                    lhs: lhs.clone(),
                    rhs: RhsConcept::Exists(pr.clone(), BTreeSet::new()),
                });
                out.insert(Axiom::ri(pr.clone(), r.clone()));
                for a in filler {
                    out.insert(Axiom::ci(
                        Vec::<Name>::new(),
                        RhsConcept::Forall(pr.clone(), a.clone()),
                    ));
                }
            }
            _ => {
                out.insert(ax.clone());
            }
        }
    }
    out
}

/// `_AND__<sorted member names joined by '_'>`.
pub fn conjunction_name(members: &BTreeSet<Name>) -> Name {
    let joined = members
        .iter()
        .map(Name::as_str)
        .collect::<Vec<_>>()
        .join("_");
    Name::from(format!("_AND__{joined}"))
}

/// For each left-hand side conjunction of two or more names adds a fresh
/// concept equivalent to it.
pub fn norm_and(t: &TBox) -> TBox {
    let mut out = t.clone();
    let conjunctions: BTreeSet<BTreeSet<Name>> = t
        .axioms
        .iter()
        .filter_map(|a| match a {
            Axiom::Ci { lhs, .. } if lhs.len() >= 2 => Some(lhs.clone()),
            _ => None,
        })
        .collect();
    let mut taken: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
    for conj in conjunctions {
        let base = conjunction_name(&conj);
        let mut name = base.clone();
        let mut i = 1;
        while taken.get(&name).is_some_and(|c| c != &conj)
            || (t.sig.concepts.contains(&name) && !taken.contains_key(&name))
        {
            i += 1;
            name = Name::from(format!("{base}__{i}"));
        }
        taken.insert(name.clone(), conj.clone());
        out.declare_concept(name.clone());
        out.register_fresh(name.clone(), Provenance::Conjunction(conj.clone()));
        for a in &conj {
            out.insert(Axiom::ci([name.clone()], RhsConcept::Atom(a.clone())));
        }
        out.insert(Axiom::Ci {
            lhs: conj,
            rhs: RhsConcept::Atom(name),
        });
    }
    out
}

fn can_be_inconsistent(t: &TBox) -> bool {
    t.sig.concepts.contains(INCONSISTENT_MARKER)
        || t.axioms.iter().any(|a| {
            matches!(
                a,
                Axiom::RoleDisjoint(..)
                    | Axiom::Ci {
                        rhs: RhsConcept::Bottom,
                        ..
                    }
            )
        })
}

/// Every DL-Lite_R axiom over `sig` entailed by `t`, including `N ⊑ N` for
/// concept and role names.
pub fn dllite_closure(t3: &TBox) -> (DlLiteTBox, StepReport) {
    dllite_closure_over(t3, &t3.sig, None)
}

/// The closure restricted to the names of `sig`.
pub fn dllite_closure_over(
    t: &TBox,
    sig: &Signature,
    depth: Option<usize>,
) -> (DlLiteTBox, StepReport) {
    let entailer = match depth {
        Some(d) => Entailer::with_depth(t, d),
        None => Entailer::new(t),
    };
    let mut report = StepReport::default();
    let mut out = DlLiteTBox::new();
    let roles = sig.all_roles();
    let mut basics: Vec<Basic> = sig.concepts.iter().cloned().map(Basic::Concept).collect();
    basics.extend(roles.iter().cloned().map(Basic::Exists));

    for c in &sig.concepts {
        out.axioms.insert(DlLiteAxiom::ConceptIncl(
            Basic::Concept(c.clone()),
            Basic::Concept(c.clone()),
        ));
    }
    for r in &sig.roles {
        out.axioms.insert(DlLiteAxiom::role_incl(
            Role::named(r.clone()),
            Role::named(r.clone()),
        ));
    }

    for b1 in &basics {
        let (holds, _, complete) = entailer.basic_consequences(b1, &basics);
        if !complete {
            report.note_unknown(|| format!("consequences of `{b1}` are incomplete"));
        }
        for b2 in holds {
            if &b2 != b1 {
                out.axioms.insert(DlLiteAxiom::ConceptIncl(b1.clone(), b2));
            }
        }
    }
    for r1 in roles.iter().filter(|r| !r.inverse) {
        for r2 in &roles {
            if r1 == r2 {
                continue;
            }
            let ax = DlLiteAxiom::role_incl(r1.clone(), r2.clone());
            match entailer.check_dllite(&ax) {
                Entailment::Entailed => {
                    out.axioms.insert(ax);
                }
                Entailment::NotEntailed => {}
                Entailment::Unknown => report.note_unknown(|| format!("`{ax}` is undecided")),
            }
        }
    }
    if can_be_inconsistent(t) {
        for (i, b1) in basics.iter().enumerate() {
            for b2 in &basics[i..] {
                let ax = DlLiteAxiom::concept_disj(b1.clone(), b2.clone());
                match entailer.check_dllite(&ax) {
                    Entailment::Entailed => {
                        out.axioms.insert(ax);
                    }
                    Entailment::NotEntailed => {}
                    Entailment::Unknown => report.note_unknown(|| format!("`{ax}` is undecided")),
                }
            }
        }
        for (i, r1) in roles.iter().enumerate() {
            for r2 in &roles[i..] {
                let ax = DlLiteAxiom::role_disj(r1.clone(), r2.clone());
                if out.axioms.contains(&ax) {
                    continue;
                }
                match entailer.check_dllite(&ax) {
                    Entailment::Entailed => {
                        out.axioms.insert(ax);
                    }
                    Entailment::NotEntailed => {}
                    Entailment::Unknown => report.note_unknown(|| format!("`{ax}` is undecided")),
                }
            }
        }
    }
    (out, report)
}
