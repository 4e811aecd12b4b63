//! Homomorphisms, containment and evaluation for CQ≠.

use std::collections::{BTreeMap, BTreeSet};

use crate::datalog::{Atom, CQne, FactSet, Term, Tuple};
use crate::name::Name;

fn bind(h: &mut BTreeMap<Name, Term>, from: &Term, to: &Term) -> bool {
    match from {
        Term::Const(_) => from == to,
        Term::Var(v) => match h.get(v) {
            Some(t) => t == to,
            None => {
                h.insert(v.clone(), to.clone());
                true
            }
        },
    }
}

fn ineq_image_ok(h: &BTreeMap<Name, Term>, from: &CQne, to: &CQne) -> bool {
    from.ineqs.iter().all(|(a, b)| match (&h[a], &h[b]) {
        (Term::Var(x), Term::Var(y)) => {
            to.ineqs.contains(&(x.clone(), y.clone())) || to.ineqs.contains(&(y.clone(), x.clone()))
        }
        (Term::Const(x), Term::Const(y)) => x != y,
        _ => false,
    })
}

/// A homomorphism from `from` to `to` that maps answer variables
/// positionally, every atom onto an atom, and every inequality onto an
/// inequality. Its existence implies `to ⊆ from`.
pub fn homomorphism(from: &CQne, to: &CQne) -> Option<BTreeMap<Name, Term>> {
    if from.answer_vars.len() != to.answer_vars.len() {
        return None;
    }
    let mut h = BTreeMap::new();
    for (a, b) in from.answer_vars.iter().zip(&to.answer_vars) {
        if !bind(&mut h, &Term::Var(a.clone()), &Term::Var(b.clone())) {
            return None;
        }
    }
    let mut by_pred: BTreeMap<&Name, Vec<&Atom>> = BTreeMap::new();
    for a in &to.atoms {
        by_pred.entry(&a.pred).or_default().push(a);
    }
    for a in &from.atoms {
        if !by_pred.contains_key(&a.pred) {
            return None;
        }
    }
    // Most constrained atoms first.
    let mut order: Vec<&Atom> = from.atoms.iter().collect();
    order.sort_by_key(|a| by_pred[&a.pred].len());
    fn go(
        i: usize,
        order: &[&Atom],
        by_pred: &BTreeMap<&Name, Vec<&Atom>>,
        h: &mut BTreeMap<Name, Term>,
        from: &CQne,
        to: &CQne,
    ) -> bool {
        if i == order.len() {
            return ineq_image_ok(h, from, to);
        }
        let a = order[i];
        for cand in &by_pred[&a.pred] {
            if cand.args.len() != a.args.len() {
                continue;
            }
            let saved = h.clone();
            if a.args.iter().zip(&cand.args).all(|(x, y)| bind(h, x, y))
                && go(i + 1, order, by_pred, h, from, to)
            {
                return true;
            }
            *h = saved;
        }
        false
    }
    if go(0, &order, &by_pred, &mut h, from, to) {
        Some(h)
    } else {
        None
    }
}

/// Every answer of `q1` is an answer of `q2` (sound check via homomorphism).
pub fn contained_in(q1: &CQne, q2: &CQne) -> bool {
    q2.predicates().is_subset(&q1.predicates()) && homomorphism(q2, q1).is_some()
}

pub fn hom_equivalent(q1: &CQne, q2: &CQne) -> bool {
    contained_in(q1, q2) && contained_in(q2, q1)
}

pub fn is_db_defined(q: &CQne, edb: &BTreeSet<Name>) -> bool {
    q.atoms.iter().all(|a| edb.contains(&a.pred))
}

/// Answers of `q` over a set of facts; inequalities compare constants.
pub fn answers(q: &CQne, d: &FactSet) -> BTreeSet<Tuple> {
    let mut out = BTreeSet::new();
    let empty = BTreeSet::new();
    let mut order: Vec<&Atom> = q.atoms.iter().collect();
    order.sort_by_key(|a| d.get(&a.pred).map_or(0, BTreeSet::len));
    fn go(
        i: usize,
        order: &[&Atom],
        d: &FactSet,
        empty: &BTreeSet<Tuple>,
        b: &mut BTreeMap<Name, Name>,
        q: &CQne,
        out: &mut BTreeSet<Tuple>,
    ) {
        if i == order.len() {
            if q.ineqs.iter().all(|(x, y)| b[x] != b[y]) {
                out.insert(q.answer_vars.iter().map(|v| b[v].clone()).collect());
            }
            return;
        }
        let a = order[i];
        for t in d.get(&a.pred).unwrap_or(empty) {
            if t.len() != a.args.len() {
                continue;
            }
            let saved = b.clone();
            let mut ok = true;
            for (arg, c) in a.args.iter().zip(t) {
                match arg {
                    Term::Const(k) => ok &= k == c,
                    Term::Var(v) => match b.get(v) {
                        Some(x) => ok &= x == c,
                        None => {
                            b.insert(v.clone(), c.clone());
                        }
                    },
                }
                if !ok {
                    break;
                }
            }
            if ok {
                go(i + 1, order, d, empty, b, q, out);
            }
            *b = saved;
        }
    }
    go(0, &order, d, &empty, &mut BTreeMap::new(), q, &mut out);
    out
}

/// Answers of a union of CQs.
pub fn ucq_answers<'a>(qs: impl IntoIterator<Item = &'a CQne>, d: &FactSet) -> BTreeSet<Tuple> {
    let mut out = BTreeSet::new();
    for q in qs {
        out.extend(answers(q, d));
    }
    out
}

/// Renames variables to `x, y, …` by first occurrence and sorts the atoms,
/// so that equal queries print equally.
pub fn canonical(q: &CQne) -> CQne {
    let mut c = q.canonical_names();
    c.atoms.sort();
    c
}

/// Keeps one representative per class of homomorphically equivalent
/// queries and drops queries contained in another one. Containment in a
/// query is only tested when that query has at most `max_atoms` atoms, which
/// bounds the homomorphism search; other pairs are deduplicated
/// syntactically.
#[derive(Debug, Clone, Default)]
pub struct QuerySet {
    pub max_atoms: usize,
    items: Vec<CQne>,
}

impl QuerySet {
    pub fn new(max_atoms: usize) -> Self {
        QuerySet {
            max_atoms,
            items: Vec::new(),
        }
    }

    /// Returns false when `q` added nothing.
    pub fn insert(&mut self, q: CQne) -> bool {
        let q = canonical(&q);
        if self.items.contains(&q) {
            return false;
        }
        let max = self.max_atoms;
        if self
            .items
            .iter()
            .any(|o| o.atoms.len() <= max && contained_in(&q, o))
        {
            return false;
        }
        if q.atoms.len() <= max {
            self.items.retain(|o| !contained_in(o, &q));
        }
        self.items.push(q);
        true
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn into_vec(self) -> Vec<CQne> {
        self.items
    }

    pub fn iter(&self) -> impl Iterator<Item = &CQne> {
        self.items.iter()
    }
}
