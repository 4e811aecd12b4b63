use std::collections::{BTreeMap, BTreeSet};

use super::{Atom, FactSet, Program, Rule, Term, Tuple, BOT};
use crate::error::{Error, Result};
use crate::name::Name;

type Binding = BTreeMap<Name, Name>;

fn check_input(p: &Program, d: &FactSet) -> Result<()> {
    d.check_arities(|n| p.arity(n))?;
    for pred in d.facts.keys() {
        if p.is_idb(pred) {
            return Err(Error::validation(format!(
                "input facts mention IDB predicate `{pred}`"
            )));
        }
    }
    Ok(())
}

fn match_atom(atom: &Atom, tuple: &[Name], b: &Binding) -> Option<Binding> {
    if atom.args.len() != tuple.len() {
        return None;
    }
    let mut out = b.clone();
    for (t, c) in atom.args.iter().zip(tuple) {
        match t {
            Term::Const(k) => {
                if k != c {
                    return None;
                }
            }
            Term::Var(v) => match out.get(v) {
                Some(bound) if bound != c => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), c.clone());
                }
            },
        }
    }
    Some(out)
}

/// All bindings of `rule`'s body where atom `pinned` (if any) is matched in
/// `delta` and every other atom in `full`.
fn fire(rule: &Rule, full: &FactSet, delta: &FactSet, pinned: Option<usize>, out: &mut Vec<Tuple>) {
    let empty = BTreeSet::new();
    let mut order: Vec<usize> = (0..rule.body.len()).collect();
    if let Some(i) = pinned {
        order.retain(|&j| j != i);
        order.insert(0, i);
    }
    fn go(
        rule: &Rule,
        order: &[usize],
        pos: usize,
        pinned: Option<usize>,
        full: &FactSet,
        delta: &FactSet,
        empty: &BTreeSet<Tuple>,
        b: Binding,
        out: &mut Vec<Tuple>,
    ) {
        if pos == order.len() {
            for (x, y) in &rule.ineqs {
                if b.get(x) == b.get(y) {
                    return;
                }
            }
            let t = rule
                .head
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => b[v].clone(),
                    Term::Const(c) => c.clone(),
                })
                .collect();
            out.push(t);
            return;
        }
        let i = order[pos];
        let atom = &rule.body[i];
        let src = if Some(i) == pinned { delta } else { full };
        for tuple in src.get(&atom.pred).unwrap_or(empty) {
            if let Some(nb) = match_atom(atom, tuple, &b) {
                go(rule, order, pos + 1, pinned, full, delta, empty, nb, out);
            }
        }
    }
    go(
        rule,
        &order,
        0,
        pinned,
        full,
        delta,
        &empty,
        Binding::new(),
        out,
    );
}

/// Semi-naive bottom-up evaluation. With `max_rounds = Some(i)` the result
/// holds exactly the facts with a derivation tree of depth at most `i`: round
/// `r` applies every rule once to the facts known after round `r - 1`, and a
/// rule instance is only new in round `r` if it uses a fact first derived in
/// round `r - 1`.
pub fn evaluate(p: &Program, d: &FactSet, max_rounds: Option<usize>) -> Result<FactSet> {
    check_input(p, d)?;
    let mut full = d.clone();
    let mut delta = d.clone();
    let mut round = 0;
    loop {
        if max_rounds.is_some_and(|m| round >= m) || delta.is_empty() {
            break;
        }
        round += 1;
        let mut next = FactSet::new();
        for rule in &p.rules {
            let mut out = Vec::new();
            for i in 0..rule.body.len() {
                if delta.get(&rule.body[i].pred).is_some_and(|s| !s.is_empty()) {
                    fire(rule, &full, &delta, Some(i), &mut out);
                }
            }
            for t in out {
                if !full.contains(&rule.head.pred, &t) {
                    next.insert(rule.head.pred.clone(), t);
                }
            }
        }
        full.extend(&next);
        delta = next;
    }
    Ok(full)
}

/// Reference evaluation that recomputes every rule on the whole fact set in
/// each round.
pub fn naive_evaluate(p: &Program, d: &FactSet, max_rounds: Option<usize>) -> Result<FactSet> {
    check_input(p, d)?;
    let empty = FactSet::new();
    let mut full = d.clone();
    let mut round = 0;
    loop {
        if max_rounds.is_some_and(|m| round >= m) {
            break;
        }
        round += 1;
        let mut next = full.clone();
        for rule in &p.rules {
            let mut out = Vec::new();
            fire(rule, &full, &empty, None, &mut out);
            for t in out {
                next.insert(rule.head.pred.clone(), t);
            }
        }
        if next == full {
            break;
        }
        full = next;
    }
    Ok(full)
}

/// True iff `__bot` is not derived.
pub fn is_consistent(p: &Program, d: &FactSet) -> Result<bool> {
    let out = evaluate(p, d, None)?;
    Ok(!out.contains(&Name::from(BOT), &[]))
}
