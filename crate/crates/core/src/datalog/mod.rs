//! Datalog with guarded inequalities: programs, the translation of TBoxes and
//! mappings into programs, and bottom-up evaluation.

mod eval;
mod translate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::name::Name;

pub use eval::{evaluate, is_consistent, naive_evaluate};
pub use translate::{mapping_program, program_for, translate_tbox, TranslateOptions};

pub const BOT: &str = "__bot";
pub const TOP_D: &str = "__top_d";
pub const EQ: &str = "__eq";

/// `__bot`, `__top_d`, `__eq` and the like are intensional even without rules.
pub fn is_auxiliary(pred: &Name) -> bool {
    pred.as_str().starts_with("__")
}

pub fn bot() -> Name {
    Name::from(BOT)
}

pub fn top_d() -> Name {
    Name::from(TOP_D)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Name),
    Const(Name),
}

impl Term {
    pub fn var(n: impl Into<Name>) -> Term {
        Term::Var(n.into())
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "'{c}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Name,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<Name>, args: Vec<Term>) -> Atom {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    /// An atom whose arguments are all variables.
    pub fn vars<I, S>(pred: impl Into<Name>, vars: I) -> Atom
    where
        I: IntoIterator<Item = S>,
        S: Into<Name>,
    {
        Atom {
            pred: pred.into(),
            args: vars.into_iter().map(|v| Term::Var(v.into())).collect(),
        }
    }

    pub fn var_set(&self) -> impl Iterator<Item = &Name> {
        self.args.iter().filter_map(Term::as_var)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.pred);
        }
        write!(f, "{}(", self.pred)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// An unordered pair of distinct variables, stored smaller-first.
pub fn ineq(a: Name, b: Name) -> (Name, Name) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Atom>,
    pub ineqs: BTreeSet<(Name, Name)>,
}

impl Rule {
    pub fn new(head: Atom, body: Vec<Atom>) -> Rule {
        Rule {
            head,
            body,
            ineqs: BTreeSet::new(),
        }
    }

    pub fn with_ineqs(mut self, ineqs: impl IntoIterator<Item = (Name, Name)>) -> Rule {
        self.ineqs
            .extend(ineqs.into_iter().map(|(a, b)| ineq(a, b)));
        self
    }

    /// Safety, guardedness, and variable-only heads without repetition.
    pub fn validate(&self) -> Result<()> {
        let body_vars: BTreeSet<&Name> = self.body.iter().flat_map(Atom::var_set).collect();
        let mut seen = BTreeSet::new();
        for t in &self.head.args {
            match t {
                Term::Var(v) => {
                    if !body_vars.contains(v) {
                        return Err(Error::validation(format!(
                            "unsafe rule `{self}`: head variable `{v}` not in body"
                        )));
                    }
                    if !seen.insert(v) {
                        return Err(Error::validation(format!(
                            "rule `{self}` repeats head variable `{v}`"
                        )));
                    }
                }
                Term::Const(_) => {
                    return Err(Error::validation(format!(
                        "rule `{self}` has a constant in its head"
                    )))
                }
            }
        }
        for (a, b) in &self.ineqs {
            if a == b {
                return Err(Error::validation(format!("rule `{self}` has `{a} != {a}`")));
            }
            for v in [a, b] {
                if !body_vars.contains(v) {
                    return Err(Error::validation(format!(
                        "unguarded inequality on `{v}` in rule `{self}`"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :- ", self.head)?;
        let mut first = true;
        for a in &self.body {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        for (a, b) in &self.ineqs {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{a} != {b}")?;
        }
        f.write_str(".")
    }
}

/// A Datalog≠ program. Rules keep insertion order (duplicates are dropped),
/// which fixes the enumeration order of expansions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub edb: BTreeSet<Name>,
    pub idb: BTreeSet<Name>,
    pub arities: BTreeMap<Name, usize>,
}

impl Program {
    pub fn new() -> Self {
        Program::default()
    }

    pub fn declare_edb(&mut self, pred: Name, arity: usize) {
        self.arities.insert(pred.clone(), arity);
        if !self.idb.contains(&pred) {
            self.edb.insert(pred);
        }
    }

    /// Adds a rule, moving its head predicate to the IDB side.
    pub fn add_rule(&mut self, rule: Rule) -> Result<()> {
        rule.validate()?;
        for a in std::iter::once(&rule.head).chain(rule.body.iter()) {
            match self.arities.get(&a.pred) {
                Some(&n) if n != a.args.len() => {
                    return Err(Error::validation(format!(
                        "predicate `{}` used with arity {} and {}",
                        a.pred,
                        n,
                        a.args.len()
                    )))
                }
                Some(_) => {}
                None => {
                    self.arities.insert(a.pred.clone(), a.args.len());
                }
            }
        }
        self.edb.remove(&rule.head.pred);
        self.idb.insert(rule.head.pred.clone());
        for a in &rule.body {
            if is_auxiliary(&a.pred) {
                self.idb.insert(a.pred.clone());
            } else if !self.idb.contains(&a.pred) {
                self.edb.insert(a.pred.clone());
            }
        }
        if !self.rules.contains(&rule) {
            self.rules.push(rule);
        }
        Ok(())
    }

    /// Union of two programs; rules of `self` come first.
    pub fn extend(&mut self, other: &Program) -> Result<()> {
        for (p, &a) in &other.arities {
            if other.edb.contains(p) {
                self.declare_edb(p.clone(), a);
            }
        }
        for r in &other.rules {
            self.add_rule(r.clone())?;
        }
        Ok(())
    }

    pub fn arity(&self, pred: &Name) -> Option<usize> {
        self.arities.get(pred).copied()
    }

    pub fn rules_for<'a>(&'a self, pred: &'a Name) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| &r.head.pred == pred)
    }

    pub fn is_idb(&self, pred: &Name) -> bool {
        self.idb.contains(pred)
    }

    pub fn has_inequalities(&self) -> bool {
        self.rules.iter().any(|r| !r.ineqs.is_empty())
    }

    /// Predicate dependency edges head → body predicate.
    pub fn dependencies(&self) -> BTreeMap<Name, BTreeSet<Name>> {
        let mut deps: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
        for r in &self.rules {
            let e = deps.entry(r.head.pred.clone()).or_default();
            for a in &r.body {
                e.insert(a.pred.clone());
            }
        }
        deps
    }

    /// IDB predicates that lie on a cycle of the dependency graph.
    pub fn recursive_predicates(&self) -> BTreeSet<Name> {
        let deps = self.dependencies();
        let mut out = BTreeSet::new();
        for p in &self.idb {
            let mut stack: Vec<&Name> = deps.get(p).into_iter().flatten().collect();
            let mut seen = BTreeSet::new();
            while let Some(q) = stack.pop() {
                if q == p {
                    out.insert(p.clone());
                    break;
                }
                if seen.insert(q) {
                    stack.extend(deps.get(q).into_iter().flatten());
                }
            }
        }
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

pub type Tuple = Vec<Name>;

/// Ground facts grouped by predicate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactSet {
    pub facts: BTreeMap<Name, BTreeSet<Tuple>>,
}

impl FactSet {
    pub fn new() -> Self {
        FactSet::default()
    }

    pub fn insert(&mut self, pred: impl Into<Name>, tuple: Tuple) -> bool {
        self.facts.entry(pred.into()).or_default().insert(tuple)
    }

    pub fn contains(&self, pred: &Name, tuple: &[Name]) -> bool {
        self.facts.get(pred).is_some_and(|s| s.contains(tuple))
    }

    pub fn get(&self, pred: &Name) -> Option<&BTreeSet<Tuple>> {
        self.facts.get(pred)
    }

    /// Tuples of `pred`, empty when absent.
    pub fn tuples(&self, pred: &Name) -> BTreeSet<Tuple> {
        self.facts.get(pred).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.facts.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn constants(&self) -> BTreeSet<Name> {
        self.facts
            .values()
            .flatten()
            .flat_map(|t| t.iter().cloned())
            .collect()
    }

    pub fn extend(&mut self, other: &FactSet) {
        for (p, ts) in &other.facts {
            self.facts
                .entry(p.clone())
                .or_default()
                .extend(ts.iter().cloned());
        }
    }

    /// Only the facts whose predicate satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&Name) -> bool) -> FactSet {
        FactSet {
            facts: self
                .facts
                .iter()
                .filter(|(p, s)| keep(p) && !s.is_empty())
                .map(|(p, s)| (p.clone(), s.clone()))
                .collect(),
        }
    }

    /// Every tuple of a predicate has the same arity, matching `arity` when given.
    pub fn check_arities(&self, arity: impl Fn(&Name) -> Option<usize>) -> Result<()> {
        for (p, ts) in &self.facts {
            let expected = arity(p).or_else(|| ts.iter().next().map(Vec::len));
            for t in ts {
                if Some(t.len()) != expected {
                    return Err(Error::validation(format!(
                        "fact `{p}` has arity {} but {} is expected",
                        t.len(),
                        expected.unwrap_or(0)
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for FactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, ts) in &self.facts {
            for t in ts {
                if t.is_empty() {
                    writeln!(f, "{p}.")?;
                } else {
                    let args: Vec<&str> = t.iter().map(Name::as_str).collect();
                    writeln!(f, "{p}({}).", args.join(","))?;
                }
            }
        }
        Ok(())
    }
}

/// A conjunctive query with inequalities. Atoms keep their insertion order
/// for printing; equality and hashing ignore it.
#[derive(Debug, Clone)]
pub struct CQne {
    pub answer_vars: Vec<Name>,
    pub atoms: Vec<Atom>,
    pub ineqs: BTreeSet<(Name, Name)>,
}

impl CQne {
    pub fn new(answer_vars: Vec<Name>, atoms: Vec<Atom>) -> CQne {
        let mut q = CQne {
            answer_vars,
            atoms: Vec::new(),
            ineqs: BTreeSet::new(),
        };
        for a in atoms {
            q.push_atom(a);
        }
        q
    }

    pub fn with_ineqs(mut self, ineqs: impl IntoIterator<Item = (Name, Name)>) -> CQne {
        self.ineqs
            .extend(ineqs.into_iter().map(|(a, b)| ineq(a, b)));
        self
    }

    pub fn push_atom(&mut self, a: Atom) {
        if !self.atoms.contains(&a) {
            self.atoms.push(a);
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        self.atoms
            .iter()
            .flat_map(|a| a.var_set().cloned())
            .collect()
    }

    pub fn predicates(&self) -> BTreeSet<Name> {
        self.atoms.iter().map(|a| a.pred.clone()).collect()
    }

    pub fn is_atomic(&self) -> bool {
        self.atoms.len() == 1
            && self.ineqs.is_empty()
            && self.atoms[0].args.iter().all(|t| t.as_var().is_some())
            && self.atoms[0]
                .args
                .iter()
                .map(|t| t.as_var().unwrap().clone())
                .collect::<Vec<_>>()
                == self.answer_vars
            && self.answer_vars.iter().collect::<BTreeSet<_>>().len() == self.answer_vars.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::validation("a query needs at least one atom"));
        }
        let vars = self.vars();
        for v in &self.answer_vars {
            if !vars.contains(v) {
                return Err(Error::validation(format!(
                    "answer variable `{v}` does not occur in an atom"
                )));
            }
        }
        for (a, b) in &self.ineqs {
            if a == b {
                return Err(Error::validation(format!("inequality `{a} != {a}`")));
            }
            for v in [a, b] {
                if !vars.contains(v) {
                    return Err(Error::validation(format!(
                        "inequality variable `{v}` does not occur in an atom"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Renames variables: answer variables first, then the rest by first
    /// occurrence, using `x, y, z, u, v, w` and then `z<k>`.
    pub fn canonical_names(&self) -> CQne {
        const BASE: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
        let mut map: BTreeMap<Name, Name> = BTreeMap::new();
        let mut order: Vec<Name> = Vec::new();
        for v in self
            .answer_vars
            .iter()
            .chain(self.atoms.iter().flat_map(|a| a.var_set()))
        {
            if !map.contains_key(v) {
                let i = order.len();
                let fresh = if i < BASE.len() {
                    Name::from(BASE[i])
                } else {
                    Name::from(format!("z{}", i - BASE.len() + 1))
                };
                map.insert(v.clone(), fresh);
                order.push(v.clone());
            }
        }
        self.rename(&map)
    }

    pub fn rename(&self, map: &BTreeMap<Name, Name>) -> CQne {
        let r = |v: &Name| map.get(v).cloned().unwrap_or_else(|| v.clone());
        CQne::new(
            self.answer_vars.iter().map(r).collect(),
            self.atoms.iter().map(|a| rename_atom(a, map)).collect(),
        )
        .with_ineqs(self.ineqs.iter().map(|(a, b)| (r(a), r(b))))
    }
}

pub fn rename_atom(a: &Atom, map: &BTreeMap<Name, Name>) -> Atom {
    Atom {
        pred: a.pred.clone(),
        args: a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
                c => c.clone(),
            })
            .collect(),
    }
}

impl PartialEq for CQne {
    fn eq(&self, other: &Self) -> bool {
        self.answer_vars == other.answer_vars
            && self.ineqs == other.ineqs
            && self.atoms.iter().collect::<BTreeSet<_>>()
                == other.atoms.iter().collect::<BTreeSet<_>>()
    }
}

impl Eq for CQne {}

impl fmt::Display for CQne {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in &self.atoms {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        for (a, b) in &self.ineqs {
            f.write_str(", ")?;
            write!(f, "{a} != {b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsafe_rule_is_rejected() {
        let r = Rule::new(Atom::vars("A", ["x"]), vec![Atom::vars("E", ["y"])]);
        assert!(r.validate().is_err());
    }

    #[test]
    fn unguarded_inequality_is_rejected() {
        let r = Rule::new(Atom::vars("A", ["x"]), vec![Atom::vars("E", ["x"])])
            .with_ineqs([("x".into(), "y".into())]);
        assert!(r.validate().is_err());
    }

    #[test]
    fn heads_become_idb() {
        let mut p = Program::new();
        p.add_rule(Rule::new(
            Atom::vars("B", ["x"]),
            vec![Atom::vars("A", ["x"])],
        ))
        .unwrap();
        p.add_rule(Rule::new(
            Atom::vars("A", ["x"]),
            vec![Atom::vars("E", ["x"])],
        ))
        .unwrap();
        assert!(p.idb.contains("A") && p.idb.contains("B"));
        assert_eq!(p.edb, ["E".into()].into());
    }

    #[test]
    fn arity_clash_is_rejected() {
        let mut p = Program::new();
        p.add_rule(Rule::new(
            Atom::vars("B", ["x"]),
            vec![Atom::vars("A", ["x"])],
        ))
        .unwrap();
        let bad = Rule::new(Atom::vars("C", ["x"]), vec![Atom::vars("A", ["x", "y"])]);
        assert!(p.add_rule(bad).is_err());
    }

    #[test]
    fn recursion_detection() {
        let mut p = Program::new();
        p.add_rule(Rule::new(
            Atom::vars("A", ["x"]),
            vec![Atom::vars("E", ["x"])],
        ))
        .unwrap();
        p.add_rule(Rule::new(
            Atom::vars("A", ["y"]),
            vec![Atom::vars("A", ["x"]), Atom::vars("R", ["x", "y"])],
        ))
        .unwrap();
        p.add_rule(Rule::new(
            Atom::vars("B", ["x"]),
            vec![Atom::vars("A", ["x"])],
        ))
        .unwrap();
        assert_eq!(p.recursive_predicates(), ["A".into()].into());
    }

    #[test]
    fn canonical_names_are_positional() {
        let q = CQne::new(
            vec!["a".into()],
            vec![Atom::vars("R", ["b", "a"]), Atom::vars("E", ["b"])],
        );
        assert_eq!(q.canonical_names().to_string(), "R(y,x), E(y)");
    }
}
