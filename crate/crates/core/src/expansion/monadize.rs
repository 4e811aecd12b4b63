//! The monadic program obtained by unfolding binary IDB atoms.

use std::collections::{BTreeMap, BTreeSet};

use crate::datalog::{ineq, rename_atom, Atom, Program, Rule, Term};
use crate::error::{Error, Result};
use crate::name::Name;

/// IDB predicates derivable from EDB predicates.
fn productive(p: &Program) -> BTreeSet<Name> {
    let mut prod: BTreeSet<Name> = BTreeSet::new();
    loop {
        let before = prod.len();
        for r in &p.rules {
            if r.body
                .iter()
                .all(|a| !p.is_idb(&a.pred) || prod.contains(&a.pred))
            {
                prod.insert(r.head.pred.clone());
            }
        }
        if prod.len() == before {
            return prod;
        }
    }
}

/// A rule body with the head variables it was unfolded for.
#[derive(Clone)]
struct Unfolding {
    head: Vec<Name>,
    body: Vec<Atom>,
    ineqs: BTreeSet<(Name, Name)>,
}

struct Monadizer<'a> {
    rules: Vec<&'a Rule>,
    binary: BTreeSet<Name>,
    memo: BTreeMap<Name, Vec<Unfolding>>,
    active: BTreeSet<Name>,
    fresh: usize,
}

impl Monadizer<'_> {
    fn fresh(&mut self) -> Name {
        self.fresh += 1;
        Name::from(format!("_m{}", self.fresh))
    }

    /// Bodies of `rule` with every binary IDB atom replaced by one of its
    /// unfoldings, in every combination.
    fn substitute(&mut self, rule: &Rule) -> Result<Vec<Unfolding>> {
        let head = rule.head.var_set().cloned().collect();
        let mut partial = vec![Unfolding {
            head,
            body: vec![],
            ineqs: rule.ineqs.clone(),
        }];
        for a in &rule.body {
            if !self.binary.contains(&a.pred) {
                for u in &mut partial {
                    u.body.push(a.clone());
                }
                continue;
            }
            let options = self.unfold(&a.pred)?;
            let mut next = Vec::new();
            for pre in &partial {
                for o in &options {
                    let mut map = BTreeMap::new();
                    for (v, t) in o.head.iter().zip(&a.args) {
                        if let Term::Var(t) = t {
                            map.insert(v.clone(), t.clone());
                        }
                    }
                    for b in &o.body {
                        for v in b.var_set() {
                            if !map.contains_key(v) {
                                let f = self.fresh();
                                map.insert(v.clone(), f);
                            }
                        }
                    }
                    let r = |v: &Name| map.get(v).cloned().unwrap_or_else(|| v.clone());
                    let mut u = pre.clone();
                    u.body.extend(o.body.iter().map(|b| rename_atom(b, &map)));
                    u.ineqs
                        .extend(o.ineqs.iter().map(|(x, y)| ineq(r(x), r(y))));
                    next.push(u);
                }
            }
            partial = next;
        }
        Ok(partial)
    }

    fn unfold(&mut self, pred: &Name) -> Result<Vec<Unfolding>> {
        if let Some(v) = self.memo.get(pred) {
            return Ok(v.clone());
        }
        if !self.active.insert(pred.clone()) {
            return Err(Error::Unsupported(format!(
                "role predicate `{pred}` is recursive; monadization needs nonrecursive roles"
            )));
        }
        let mut out = Vec::new();
        let rules: Vec<&Rule> = self
            .rules
            .iter()
            .copied()
            .filter(|r| &r.head.pred == pred)
            .collect();
        for r in rules {
            for mut u in self.substitute(r)? {
                u.head = r
                    .head
                    .args
                    .iter()
                    .filter_map(|t| t.as_var().cloned())
                    .collect();
                out.push(u);
            }
        }
        self.active.remove(pred);
        self.memo.insert(pred.clone(), out.clone());
        Ok(out)
    }
}

/// Removes rules that can never fire, substitutes every binary IDB body atom
/// by its unfoldings through binary-headed rules, and drops the binary-headed
/// rules. Unary and nullary predicates keep their facts on every instance.
pub fn monadize(p: &Program) -> Result<Program> {
    let prod = productive(p);
    let rules: Vec<&Rule> = p
        .rules
        .iter()
        .filter(|r| {
            r.body
                .iter()
                .all(|a| !p.is_idb(&a.pred) || prod.contains(&a.pred))
        })
        .collect();
    let binary: BTreeSet<Name> = p
        .idb
        .iter()
        .filter(|n| p.arity(n).is_some_and(|a| a >= 2))
        .cloned()
        .collect();
    let mut m = Monadizer {
        rules: rules.clone(),
        binary,
        memo: BTreeMap::new(),
        active: BTreeSet::new(),
        fresh: 0,
    };
    let mut out = Program::new();
    for (pred, &a) in &p.arities {
        if p.edb.contains(pred) {
            out.declare_edb(pred.clone(), a);
        }
    }
    for r in rules {
        if m.binary.contains(&r.head.pred) {
            continue;
        }
        for u in m.substitute(r)? {
            out.add_rule(Rule {
                head: r.head.clone(),
                body: u.body,
                ineqs: u.ineqs,
            })?;
        }
    }
    Ok(out)
}
