//! `Π_T` for normal-form TBoxes and `Π_M` for mappings.

use std::collections::{BTreeMap, BTreeSet};

use super::{Atom, Program, Rule, BOT, EQ, TOP_D};
use crate::dl::{subsets_upto, Axiom, Entailer, RhsConcept, Role, TBox};
use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::name::Name;

#[derive(Debug, Clone)]
pub struct TranslateOptions {
    /// Largest conjunction size `L` for which entailed `L ⊑ B` and `L ⊑ ⊥`
    /// are added as rules. These cover consequences that existential
    /// successors send back to a named individual.
    pub closure_lhs: usize,
    /// Chase depth for those entailment checks.
    pub depth: Option<usize>,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            closure_lhs: 3,
            depth: None,
        }
    }
}

fn role_atom(r: &Role, x: &str, y: &str) -> Atom {
    if r.inverse {
        Atom::vars(r.name.clone(), [y, x])
    } else {
        Atom::vars(r.name.clone(), [x, y])
    }
}

fn lhs_atoms(lhs: &BTreeSet<Name>, x: &str) -> Vec<Atom> {
    lhs.iter().map(|a| Atom::vars(a.clone(), [x])).collect()
}

fn guard(lhs: &BTreeSet<Name>, x: &str) -> Vec<Atom> {
    if lhs.is_empty() {
        vec![Atom::vars(TOP_D, [x])]
    } else {
        lhs_atoms(lhs, x)
    }
}

fn bot_atom() -> Atom {
    Atom::vars(BOT, Vec::<Name>::new())
}

/// Rules for one axiom. `⊓Aᵢ ⊑ ∃R.A′` has none.
fn axiom_rules(t: &TBox, ax: &Axiom) -> Vec<Rule> {
    match ax {
        Axiom::Ci { lhs, rhs } => match rhs {
            RhsConcept::Atom(b) => {
                if lhs.contains(b) {
                    return vec![];
                }
                // `A_{A1⊓…⊓An} ⊑ Aᵢ` only restates how the conjunction name is derived.
                if lhs.len() == 1 {
                    let a = lhs.iter().next().unwrap();
                    if let Some(crate::dl::Provenance::Conjunction(members)) =
                        t.fresh_registry.get(a)
                    {
                        if members.contains(b) {
                            return vec![];
                        }
                    }
                }
                vec![Rule::new(Atom::vars(b.clone(), ["x"]), guard(lhs, "x"))]
            }
            RhsConcept::Bottom => vec![Rule::new(bot_atom(), guard(lhs, "x"))],
            RhsConcept::Forall(r, b) => {
                let mut body = lhs_atoms(lhs, "x");
                body.push(role_atom(r, "x", "y"));
                vec![Rule::new(Atom::vars(b.clone(), ["y"]), body)]
            }
            RhsConcept::Exists(..) => vec![],
            RhsConcept::AtMost1(r, filler) => {
                let mut body = lhs_atoms(lhs, "x");
                body.push(role_atom(r, "x", "y"));
                if let Some(a) = filler {
                    body.push(Atom::vars(a.clone(), ["y"]));
                }
                body.push(role_atom(r, "x", "z"));
                if let Some(a) = filler {
                    body.push(Atom::vars(a.clone(), ["z"]));
                }
                vec![
                    Rule::new(Atom::vars(EQ, ["y", "z"]), body)
                        .with_ineqs([("y".into(), "z".into())]),
                    Rule::new(bot_atom(), vec![Atom::vars(EQ, ["y", "z"])]),
                ]
            }
        },
        Axiom::Ri { sub, sup } => vec![Rule::new(
            role_atom(sup, "x", "y"),
            vec![role_atom(sub, "x", "y")],
        )],
        Axiom::RoleDisjoint(a, b) => vec![Rule::new(
            bot_atom(),
            vec![role_atom(a, "x", "y"), role_atom(b, "x", "y")],
        )],
    }
}

/// Minimal `L ⊑ B` and `L ⊑ ⊥` over non-conjunction concept names that no
/// axiom states directly.
fn closure_rules(t: &TBox, opts: &TranslateOptions) -> Vec<Rule> {
    if !t.axioms.iter().any(|a| {
        matches!(
            a,
            Axiom::Ci {
                rhs: RhsConcept::Exists(..),
                ..
            }
        )
    }) {
        return vec![];
    }
    let entailer = match opts.depth {
        Some(d) => Entailer::with_depth(t, d),
        None => Entailer::new(t),
    };
    let names: Vec<Name> = t
        .sig
        .concepts
        .iter()
        .filter(|c| !t.is_conjunction_name(c))
        .cloned()
        .collect();
    let unary: Vec<(&BTreeSet<Name>, Option<&Name>)> = t
        .axioms
        .iter()
        .filter_map(|a| match a {
            Axiom::Ci {
                lhs,
                rhs: RhsConcept::Atom(b),
            } => Some((lhs, Some(b))),
            Axiom::Ci {
                lhs,
                rhs: RhsConcept::Bottom,
            } => Some((lhs, None)),
            _ => None,
        })
        .collect();
    // What the unary rules alone derive from `lhs`, and whether they reach ⊥.
    let direct = |lhs: &BTreeSet<Name>| -> (BTreeSet<Name>, bool) {
        let mut s = lhs.clone();
        loop {
            let mut changed = false;
            for (l, b) in &unary {
                if l.is_subset(&s) {
                    match b {
                        Some(b) => changed |= s.insert((*b).clone()),
                        None => return (s, true),
                    }
                }
            }
            if !changed {
                return (s, false);
            }
        }
    };
    let mut found: Vec<(BTreeSet<Name>, Name)> = Vec::new();
    let mut unsat: Vec<BTreeSet<Name>> = Vec::new();
    let mut rules = Vec::new();
    for lhs in subsets_upto(&names, opts.closure_lhs) {
        if unsat.iter().any(|u| u.is_subset(&lhs)) {
            continue;
        }
        let ty = entailer.root_type(&lhs);
        let (derived, reaches_bot) = direct(&lhs);
        if ty.unsatisfiable {
            unsat.push(lhs.clone());
            if !reaches_bot {
                rules.push(Rule::new(bot_atom(), guard(&lhs, "x")));
            }
            continue;
        }
        for b in &ty.concepts {
            if lhs.contains(b) || found.iter().any(|(l, c)| c == b && l.is_subset(&lhs)) {
                continue;
            }
            found.push((lhs.clone(), b.clone()));
            if !derived.contains(b) {
                rules.push(Rule::new(Atom::vars(b.clone(), ["x"]), guard(&lhs, "x")));
            }
        }
    }
    rules
}

/// `Π_T`: one group of rules per axiom, the consequences that existentials
/// return to named individuals, and the auxiliary `⊤_Δ`/`⊥` rules over every
/// concept and role name of the signature.
pub fn translate_tbox(t3: &TBox, opts: &TranslateOptions) -> Result<Program> {
    let mut p = Program::new();
    for ax in &t3.axioms {
        if let Axiom::Ci {
            rhs: RhsConcept::Exists(_, f),
            ..
        } = ax
        {
            if f.len() > 1 {
                return Err(Error::validation(format!(
                    "`{ax}` is not in normal form: existential filler is a conjunction"
                )));
            }
        }
        for r in axiom_rules(t3, ax) {
            p.add_rule(r)?;
        }
    }
    for r in closure_rules(t3, opts) {
        p.add_rule(r)?;
    }
    for a in &t3.sig.concepts {
        p.add_rule(Rule::new(
            Atom::vars(TOP_D, ["x"]),
            vec![Atom::vars(a.clone(), ["x"])],
        ))?;
    }
    for r in &t3.sig.roles {
        p.add_rule(Rule::new(
            Atom::vars(TOP_D, ["x"]),
            vec![Atom::vars(r.clone(), ["x", "y"])],
        ))?;
        p.add_rule(Rule::new(
            Atom::vars(TOP_D, ["y"]),
            vec![Atom::vars(r.clone(), ["x", "y"])],
        ))?;
    }
    if p.rules.iter().any(|r| r.head.pred.as_str() == BOT) {
        for a in &t3.sig.concepts {
            p.add_rule(Rule::new(
                Atom::vars(a.clone(), ["x"]),
                vec![bot_atom(), Atom::vars(TOP_D, ["x"])],
            ))?;
        }
        for r in &t3.sig.roles {
            p.add_rule(Rule::new(
                Atom::vars(r.clone(), ["x", "y"]),
                vec![
                    bot_atom(),
                    Atom::vars(TOP_D, ["x"]),
                    Atom::vars(TOP_D, ["y"]),
                ],
            ))?;
        }
    }
    Ok(p)
}

/// `Π_M`: one rule per disjunct of every assertion.
pub fn mapping_program(m: &Mapping) -> Result<Program> {
    let mut p = Program::new();
    for a in &m.assertions {
        a.validate()?;
        for q in &a.disjuncts {
            p.add_rule(
                Rule::new(a.head_atom(), q.atoms.clone()).with_ineqs(q.ineqs.iter().cloned()),
            )?;
        }
    }
    for (v, n) in m.source_predicates() {
        if !p.is_idb(&v) {
            p.declare_edb(v, n);
        }
    }
    Ok(p)
}

/// `Π_{T,M} = Π_T ∪ Π_M`, where `⊤_Δ` is only introduced from mapping
/// targets. Every constant of a derived fact already occurs in a fact
/// produced by the mapping, so the other introduction rules add nothing and
/// only create spurious recursion.
pub fn program_for(t3: &TBox, m: &Mapping, opts: &TranslateOptions) -> Result<Program> {
    let pm = mapping_program(m)?;
    for target in m.targets() {
        if !t3.sig.concepts.contains(&target) && !t3.sig.roles.contains(&target) {
            return Err(Error::validation(format!(
                "mapping target `{target}` is not in the TBox signature"
            )));
        }
    }
    let pt = translate_tbox(t3, opts)?;
    let targets = m.targets();
    let mut p = Program::new();
    let top = Name::from(TOP_D);
    for r in &pt.rules {
        let introduces_top =
            r.head.pred == top && r.body.len() == 1 && !targets.contains(&r.body[0].pred);
        if !introduces_top {
            p.add_rule(r.clone())?;
        }
    }
    p.extend(&pm)?;
    let arities: BTreeMap<Name, usize> = pt.arities.clone();
    for (n, a) in arities {
        p.arities.entry(n).or_insert(a);
    }
    Ok(prune_underivable(
        p,
        &m.source_predicates().into_keys().collect(),
    ))
}

/// Drops rules using a predicate that is neither a source nor derivable.
/// Such a predicate has no facts on any instance of the sources.
fn prune_underivable(mut p: Program, sources: &BTreeSet<Name>) -> Program {
    let mut derivable: BTreeSet<Name> = BTreeSet::new();
    loop {
        let before = derivable.len();
        for r in &p.rules {
            let ok = |a: &Atom| sources.contains(&a.pred) || derivable.contains(&a.pred);
            if r.body.iter().all(ok) {
                derivable.insert(r.head.pred.clone());
            }
        }
        if derivable.len() == before {
            break;
        }
    }
    p.rules.retain(|r| {
        r.body
            .iter()
            .all(|a| sources.contains(&a.pred) || derivable.contains(&a.pred))
    });
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datalog::{evaluate, is_consistent, Atom, CQne, FactSet};
    use crate::mapping::MappingAssertion;

    fn has_rule(p: &Program, s: &str) -> bool {
        p.rules.iter().any(|r| r.to_string() == s)
    }

    #[test]
    fn universal_becomes_propagation_rule() {
        let t = TBox::from_axioms([Axiom::ci(
            ["A"],
            RhsConcept::Forall(Role::named("R"), "B".into()),
        )]);
        let p = translate_tbox(&t, &TranslateOptions::default()).unwrap();
        assert!(has_rule(&p, "B(y) :- A(x), R(x,y)."));
        let t = TBox::from_axioms([Axiom::ci(
            ["A"],
            RhsConcept::Forall(Role::inv_of("R"), "B".into()),
        )]);
        let p = translate_tbox(&t, &TranslateOptions::default()).unwrap();
        assert!(has_rule(&p, "B(y) :- A(x), R(y,x)."));
    }

    #[test]
    fn disjointness_derives_everything() {
        let mut t = TBox::from_axioms([
            Axiom::ci(["A", "B"], RhsConcept::Bottom),
            Axiom::ci(["C"], RhsConcept::Atom("C".into())),
        ]);
        t.declare_role("R".into());
        let p = translate_tbox(&t, &TranslateOptions::default()).unwrap();
        assert!(has_rule(&p, "__bot :- A(x), B(x)."));
        let p2 = {
            let mut m = Mapping::new();
            for c in ["A", "B"] {
                m.push(MappingAssertion::from_cq(
                    c,
                    CQne::new(vec!["x".into()], vec![Atom::vars(format!("V_{c}"), ["x"])]),
                ));
            }
            program_for(&t, &m, &TranslateOptions::default()).unwrap()
        };
        let mut dv = FactSet::new();
        dv.insert("V_A", vec!["c".into()]);
        dv.insert("V_B", vec!["c".into()]);
        assert!(!is_consistent(&p2, &dv).unwrap());
        let out = evaluate(&p2, &dv, None).unwrap();
        assert!(out.contains(&"C".into(), &["c".into()]));
        assert!(out.contains(&"R".into(), &["c".into(), "c".into()]));
    }

    #[test]
    fn existential_consequence_returns_to_the_root() {
        let t = TBox::from_axioms([
            Axiom::ci(
                ["A"],
                RhsConcept::Exists(Role::named("R"), ["B".into()].into()),
            ),
            Axiom::ci(["B"], RhsConcept::Forall(Role::inv_of("R"), "C".into())),
        ]);
        let p = translate_tbox(&t, &TranslateOptions::default()).unwrap();
        assert!(has_rule(&p, "C(x) :- A(x)."));
    }

    #[test]
    fn at_most_rules_carry_the_inequality() {
        let t = TBox::from_axioms([Axiom::ci(
            ["A"],
            RhsConcept::AtMost1(Role::named("R"), None),
        )]);
        let p = translate_tbox(&t, &TranslateOptions::default()).unwrap();
        assert!(has_rule(&p, "__eq(y,z) :- A(x), R(x,y), R(x,z), y != z."));
        assert!(has_rule(&p, "__bot :- __eq(y,z)."));
    }

    #[test]
    fn mapping_disjuncts_become_rules() {
        let mut m = Mapping::new();
        m.push(MappingAssertion::new(
            "Person",
            vec!["x".into()],
            vec![
                CQne::new(vec!["x".into()], vec![Atom::vars("V1", ["x"])]),
                CQne::new(vec!["x".into()], vec![Atom::vars("V2", ["x", "y"])]),
            ],
        ));
        let p = mapping_program(&m).unwrap();
        assert_eq!(
            p.to_string(),
            "Person(x) :- V1(x).\nPerson(x) :- V2(x,y).\n"
        );
        assert!(mapping_program(&Mapping::new()).unwrap().rules.is_empty());
    }
}
