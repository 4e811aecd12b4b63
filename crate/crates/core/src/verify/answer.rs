//! Certain answers over a knowledge base or an OBDA specification.

use std::collections::{BTreeMap, BTreeSet};

use super::abox::{virtual_abox, ABox};
use super::chase::{ChaseModel, ChaseOptions, ElemId, Reasoner};
use crate::datalog::{
    evaluate, program_for, Atom, CQne, FactSet, Term, TranslateOptions, Tuple, BOT,
};
use crate::dl::{Role, TBox};
use crate::error::{Error, Result};
use crate::name::Name;
use crate::rewriter::ObdaSpec;

pub const DEFAULT_DEPTH: usize = 8;

/// Above this many concept names the Datalog route for atomic queries is
/// not used.
const FAST_PATH_CONCEPTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answers {
    pub tuples: BTreeSet<Tuple>,
    /// False when the chase was cut before it saturated, so that more
    /// answers may exist.
    pub complete: bool,
}

fn all_tuples(ind: &BTreeSet<Name>, arity: usize) -> BTreeSet<Tuple> {
    let mut out: BTreeSet<Tuple> = [vec![]].into();
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                ind.iter().map(move |c| {
                    let mut t = t.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect();
    }
    out
}

fn check_query(t: &TBox, q: &CQne) -> Result<()> {
    q.validate()?;
    for a in &q.atoms {
        let ok = match a.args.len() {
            1 => t.sig.concepts.contains(&a.pred),
            2 => t.sig.roles.contains(&a.pred),
            _ => false,
        };
        if !ok {
            return Err(Error::validation(format!(
                "query atom `{a}` is not over the signature of the TBox"
            )));
        }
    }
    Ok(())
}

/// Answers of `q` in a chase model, restricted to tuples of individuals.
/// Distinct elements are unequal.
pub fn model_answers(m: &ChaseModel, q: &CQne) -> BTreeSet<Tuple> {
    let names = m.named_elements();
    let alive: Vec<ElemId> = m.alive().collect();
    let mut out = BTreeSet::new();
    let mut order: Vec<&Atom> = q.atoms.iter().collect();
    order.sort_by_key(|a| {
        std::cmp::Reverse(
            a.args
                .iter()
                .filter(|t| matches!(t, Term::Const(_)))
                .count(),
        )
    });
    fn go(
        i: usize,
        order: &[&Atom],
        m: &ChaseModel,
        alive: &[ElemId],
        names: &BTreeMap<ElemId, Name>,
        b: &mut BTreeMap<Name, ElemId>,
        q: &CQne,
        out: &mut BTreeSet<Tuple>,
    ) {
        if i == order.len() {
            if !q.ineqs.iter().all(|(x, y)| b[x] != b[y]) {
                return;
            }
            let t: Option<Tuple> = q
                .answer_vars
                .iter()
                .map(|v| names.get(&b[v]).cloned())
                .collect();
            if let Some(t) = t {
                out.insert(t);
            }
            return;
        }
        let a = order[i];
        let resolve = |t: &Term, b: &BTreeMap<Name, ElemId>| -> Option<Option<ElemId>> {
            match t {
                Term::Const(c) => m.individual(c).map(Some),
                Term::Var(v) => Some(b.get(v).copied()),
            }
        };
        let args: Option<Vec<Option<ElemId>>> = a.args.iter().map(|t| resolve(t, b)).collect();
        let Some(args) = args else {
            return;
        };
        let mut try_bind = |vals: &[ElemId], b: &mut BTreeMap<Name, ElemId>| {
            let saved = b.clone();
            for (t, &e) in a.args.iter().zip(vals) {
                if let Term::Var(v) = t {
                    b.insert(v.clone(), e);
                }
            }
            go(i + 1, order, m, alive, names, b, q, out);
            *b = saved;
        };
        match args.as_slice() {
            [x] => {
                let cands: Vec<ElemId> = match x {
                    Some(e) => vec![*e],
                    None => alive.to_vec(),
                };
                for e in cands {
                    if m.has_concept(e, &a.pred) {
                        try_bind(&[e], b);
                    }
                }
            }
            [x, y] => {
                let r = Role::named(a.pred.clone());
                let froms: Vec<ElemId> = match x {
                    Some(e) => vec![*e],
                    None => alive.to_vec(),
                };
                for f in froms {
                    let succ: Vec<ElemId> = m
                        .element(f)
                        .edges
                        .iter()
                        .filter(|(role, _)| role == &r)
                        .map(|(_, e)| m.find(*e))
                        .filter(|e| y.is_none_or(|y| y == *e))
                        .collect();
                    for s in succ {
                        try_bind(&[f, s], b);
                    }
                }
            }
            _ => {}
        }
    }
    go(
        0,
        &order,
        m,
        &alive,
        &names,
        &mut BTreeMap::new(),
        q,
        &mut out,
    );
    out
}

/// Certain answers of `q` over `⟨t, a⟩`, read off a chase of depth `depth`.
/// Queries with existential variables use a chase without blocking.
pub fn certain_answers_cq(t: &TBox, a: &ABox, q: &CQne, depth: usize) -> Result<Answers> {
    check_query(t, q)?;
    let r = Reasoner::new(t);
    let existential = q.vars().iter().any(|v| !q.answer_vars.contains(v));
    let opts = if existential {
        ChaseOptions::unblocked(depth)
    } else {
        ChaseOptions::with_depth(depth)
    };
    let m = r.chase(a, &opts);
    if m.inconsistent {
        return Ok(Answers {
            tuples: all_tuples(&a.individuals(), q.answer_vars.len()),
            complete: true,
        });
    }
    let complete = if existential {
        m.saturated_at_depth
    } else {
        m.labels_complete
    };
    Ok(Answers {
        tuples: model_answers(&m, q),
        complete,
    })
}

/// Certain answers of an atomic query by evaluating `Π_{T,M}` over `d`.
/// Returns `None` when the TBox is outside what the route handles exactly.
pub fn certain_answers_datalog(spec: &ObdaSpec, d: &FactSet, q: &CQne) -> Result<Option<Answers>> {
    let t = &spec.tbox;
    let concepts = t.sig.concepts.len();
    if !q.is_atomic() || t.has_at_most() || concepts > FAST_PATH_CONCEPTS {
        return Ok(None);
    }
    let opts = TranslateOptions {
        closure_lhs: concepts,
        depth: None,
    };
    let p = match program_for(t, &spec.mapping, &opts) {
        Ok(p) => p,
        Err(Error::Unsupported(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let out = evaluate(&p, &d.restrict(|n| !p.is_idb(n)), None)?;
    if out.contains(&Name::from(BOT), &[])
        || out.contains(&Name::from(super::chase::INCONSISTENT_MARKER), &[])
    {
        let ind = virtual_abox(&spec.mapping, d)?.individuals();
        return Ok(Some(Answers {
            tuples: all_tuples(&ind, q.answer_vars.len()),
            complete: true,
        }));
    }
    Ok(Some(Answers {
        tuples: out.tuples(&q.atoms[0].pred),
        complete: true,
    }))
}

/// `cert(q, P, D)`: certain answers over the virtual ABox.
pub fn certain_answers_spec(
    spec: &ObdaSpec,
    d: &FactSet,
    q: &CQne,
    depth: usize,
) -> Result<Answers> {
    check_query(&spec.tbox, q)?;
    if let Some(a) = certain_answers_datalog(spec, d, q)? {
        return Ok(a);
    }
    let a = virtual_abox(&spec.mapping, d)?;
    certain_answers_cq(&spec.tbox, &a, q, depth)
}

/// Certain answers through the chase only.
pub fn certain_answers_spec_chase(
    spec: &ObdaSpec,
    d: &FactSet,
    q: &CQne,
    depth: usize,
) -> Result<Answers> {
    let a = virtual_abox(&spec.mapping, d)?;
    certain_answers_cq(&spec.tbox, &a, q, depth)
}

/// Certain answers of several queries over the virtual ABox, with one chase
/// per kind of query rather than one per query.
pub fn certain_answers_spec_all(
    spec: &ObdaSpec,
    d: &FactSet,
    queries: &[CQne],
    depth: usize,
) -> Result<Vec<Answers>> {
    for q in queries {
        check_query(&spec.tbox, q)?;
    }
    let a = virtual_abox(&spec.mapping, d)?;
    let r = Reasoner::new(&spec.tbox);
    let mut blocked: Option<ChaseModel> = None;
    let mut unblocked: Option<ChaseModel> = None;
    let mut out = Vec::new();
    for q in queries {
        let existential = q.vars().iter().any(|v| !q.answer_vars.contains(v));
        let m = if existential {
            unblocked.get_or_insert_with(|| r.chase(&a, &ChaseOptions::unblocked(depth)))
        } else {
            blocked.get_or_insert_with(|| r.chase(&a, &ChaseOptions::with_depth(depth)))
        };
        out.push(if m.inconsistent {
            Answers {
                tuples: all_tuples(&a.individuals(), q.answer_vars.len()),
                complete: true,
            }
        } else {
            Answers {
                tuples: model_answers(m, q),
                complete: if existential {
                    m.saturated_at_depth
                } else {
                    m.labels_complete
                },
            }
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::{Axiom, RhsConcept};

    fn aq(c: &str) -> CQne {
        CQne::new(vec!["x".into()], vec![Atom::vars(c, ["x"])])
    }

    #[test]
    fn existential_witness_answers() {
        let t = TBox::from_axioms([Axiom::ci(
            ["A"],
            RhsConcept::Exists(Role::named("R"), ["B".into()].into()),
        )]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        let q = CQne::new(vec!["x".into()], vec![Atom::vars("R", ["x", "y"])]);
        let got = certain_answers_cq(&t, &a, &q, 1).unwrap();
        assert_eq!(got.tuples, [vec![Name::from("a")]].into());
        assert!(got.complete);
    }

    #[test]
    fn inconsistency_gives_every_tuple() {
        let t = TBox::from_axioms([Axiom::ci(["A", "B"], RhsConcept::Bottom)]);
        let mut a = ABox::new();
        a.assert_concept("A", "c");
        a.assert_concept("B", "c");
        let got = certain_answers_cq(&t, &a, &aq("A"), 4).unwrap();
        assert_eq!(got.tuples, [vec![Name::from("c")]].into());
        let q = CQne::new(
            vec!["x".into(), "y".into()],
            vec![Atom::vars("A", ["x"]), Atom::vars("B", ["y"])],
        );
        assert_eq!(certain_answers_cq(&t, &a, &q, 4).unwrap().tuples.len(), 1);
    }

    #[test]
    fn names_outside_the_signature_are_rejected() {
        let t = TBox::from_axioms([Axiom::ci(["A"], RhsConcept::Atom("B".into()))]);
        assert!(certain_answers_cq(&t, &ABox::new(), &aq("Z"), 2).is_err());
    }

    #[test]
    fn anonymous_elements_never_answer() {
        let t = TBox::from_axioms([Axiom::ci(
            ["A"],
            RhsConcept::Exists(Role::named("R"), ["B".into()].into()),
        )]);
        let mut a = ABox::new();
        a.assert_concept("A", "a");
        assert!(certain_answers_cq(&t, &a, &aq("B"), 3)
            .unwrap()
            .tuples
            .is_empty());
    }
}
