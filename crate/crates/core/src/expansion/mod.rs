//! Expansions of IDB predicates, the boundedness-oracle interface, the
//! cutting operator and ET-mapping construction.

pub mod cq;
mod monadize;
mod tree;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::datalog::{program_for, Atom, CQne, Program, Rule, Term, TranslateOptions, BOT};
use crate::dl::TBox;
use crate::error::{Error, Result};
use crate::mapping::{Mapping, MappingAssertion};
use crate::name::Name;

pub use cq::{
    answers, canonical, contained_in, hom_equivalent, is_db_defined, ucq_answers, QuerySet,
};
pub use monadize::monadize;
pub use tree::{expansions_upto, tree_to_query, ExpansionTree};

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_CAP: usize = 10_000;
/// Containment minimization is only attempted up to this many atoms.
pub const MINIMIZE_ATOMS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    Bounded(Vec<CQne>),
    Unbounded,
    Unknown,
}

/// The verdict recorded in a run manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Bounded,
    Unbounded,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::Unbounded => "unbounded",
            Verdict::Unknown => "unknown",
        })
    }
}

impl OracleAnswer {
    pub fn verdict(&self) -> Verdict {
        match self {
            OracleAnswer::Bounded(_) => Verdict::Bounded,
            OracleAnswer::Unbounded => Verdict::Unbounded,
            OracleAnswer::Unknown => Verdict::Unknown,
        }
    }
}

/// Decides, or declines to decide, whether an IDB predicate is bounded.
pub trait BoundednessOracle {
    fn answer(&self, ex: &mut Expander<'_>, n: &Name) -> Result<OracleAnswer>;

    fn describe(&self) -> String;
}

/// Bounded exactly when no cycle of the (refined) dependency graph is
/// reachable from the predicate; the UCQ is then the full unfolding.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultOracle;

impl BoundednessOracle for DefaultOracle {
    fn answer(&self, ex: &mut Expander<'_>, n: &Name) -> Result<OracleAnswer> {
        ex.default_answer(n)
    }

    fn describe(&self) -> String {
        "default".into()
    }
}

/// Always answers `Unknown`, so that cutting falls back to depth `k`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnknownOracle;

impl BoundednessOracle for UnknownOracle {
    fn answer(&self, _: &mut Expander<'_>, _: &Name) -> Result<OracleAnswer> {
        Ok(OracleAnswer::Unknown)
    }

    fn describe(&self) -> String {
        "unknown".into()
    }
}

/// Per-predicate answers read from a file; absent predicates are `Unknown`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileOracle {
    pub source: String,
    pub entries: BTreeMap<Name, Option<Vec<CQne>>>,
}

impl BoundednessOracle for FileOracle {
    fn answer(&self, _: &mut Expander<'_>, n: &Name) -> Result<OracleAnswer> {
        Ok(match self.entries.get(n) {
            Some(Some(ucq)) => OracleAnswer::Bounded(ucq.clone()),
            _ => OracleAnswer::Unknown,
        })
    }

    fn describe(&self) -> String {
        format!("file:{}", self.source)
    }
}

type MemoKey = (Name, usize, bool);

/// Memoized enumeration of the CQs denoted by expansion trees.
///
/// Below a rule that derives a fact from `⊥` (the auxiliary rules `N ← ⊥, ⊤_Δ`),
/// no further such rule is used: a tree doing so contains a smaller tree
/// whose query has a subset of its atoms, so the union is unchanged.
pub struct Expander<'a> {
    p: &'a Program,
    pub cap: usize,
    memo: HashMap<MemoKey, Rc<Vec<CQne>>>,
    answers: BTreeMap<Name, OracleAnswer>,
}

fn base_var(i: usize) -> Name {
    const BASE: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    if i < BASE.len() {
        Name::from(BASE[i])
    } else {
        Name::from(format!("z{}", i - BASE.len() + 1))
    }
}

fn is_bot_aux(r: &Rule) -> bool {
    r.body.iter().any(|a| a.pred.as_str() == BOT)
}

impl<'a> Expander<'a> {
    pub fn new(p: &'a Program) -> Self {
        Expander {
            p,
            cap: DEFAULT_CAP,
            memo: HashMap::new(),
            answers: BTreeMap::new(),
        }
    }

    pub fn with_cap(p: &'a Program, cap: usize) -> Self {
        Expander {
            cap,
            ..Expander::new(p)
        }
    }

    pub fn program(&self) -> &Program {
        self.p
    }

    fn check_idb(&self, n: &Name) -> Result<()> {
        if !self.p.is_idb(n) {
            return Err(Error::validation(format!("`{n}` is not an IDB predicate")));
        }
        Ok(())
    }

    /// The union of the queries of all trees for `n` of depth at most `depth`.
    fn unfold(&mut self, n: &Name, depth: usize, bot_ok: bool) -> Result<Rc<Vec<CQne>>> {
        let key = (n.clone(), depth, bot_ok);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let mut set = QuerySet::new(MINIMIZE_ATOMS);
        if depth > 0 {
            let arity = self.p.arity(n).unwrap_or(0);
            let head = Atom::vars(n.clone(), (0..arity).map(base_var));
            let rules: Vec<Rule> = self.p.rules_for(n).cloned().collect();
            for rule in &rules {
                let aux = is_bot_aux(rule);
                if aux && !bot_ok {
                    continue;
                }
                let child_ok = bot_ok && !aux;
                let mut counter = 0usize;
                let inst = tree::instantiate(rule, &head, || {
                    counter += 1;
                    Name::from(format!("_r{counter}"))
                });
                let mut base = CQne::new((0..arity).map(base_var).collect(), vec![]);
                base.ineqs = inst.ineqs.clone();
                let mut idb = Vec::new();
                for a in &inst.body {
                    if self.p.is_idb(&a.pred) {
                        idb.push(a.clone());
                    } else {
                        base.push_atom(a.clone());
                    }
                }
                let mut partial = vec![base];
                let mut fresh = 0usize;
                for child in &idb {
                    let options = self.unfold(&child.pred, depth - 1, child_ok)?;
                    if options.is_empty() {
                        partial.clear();
                        break;
                    }
                    let mut next = Vec::new();
                    for pre in &partial {
                        for o in options.iter() {
                            next.push(plug(pre, o, child, &mut fresh));
                            if next.len() > self.cap {
                                return Err(Error::CapExceeded {
                                    predicate: n.to_string(),
                                    cap: self.cap,
                                });
                            }
                        }
                    }
                    partial = next;
                }
                for q in partial {
                    set.insert(q);
                    if set.len() > self.cap {
                        return Err(Error::CapExceeded {
                            predicate: n.to_string(),
                            cap: self.cap,
                        });
                    }
                }
            }
        }
        let v = Rc::new(set.into_vec());
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    /// `Φ^k(n)`: queries of all trees of depth at most `k`.
    pub fn phi_k(&mut self, n: &Name, k: usize) -> Result<Vec<CQne>> {
        self.check_idb(n)?;
        Ok(self.unfold(n, k, true)?.as_ref().clone())
    }

    /// Longest chain of states reachable from `(n, bot_ok)`, or `None` when
    /// a cycle is reachable.
    fn longest_path(&self, n: &Name) -> Option<usize> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done(usize),
        }
        fn dfs(
            p: &Program,
            s: (Name, bool),
            marks: &mut HashMap<(Name, bool), Mark>,
        ) -> Option<usize> {
            match marks.get(&s) {
                Some(Mark::Active) => return None,
                Some(Mark::Done(d)) => return Some(*d),
                None => {}
            }
            marks.insert(s.clone(), Mark::Active);
            let mut best = 0;
            for r in p.rules_for(&s.0) {
                let aux = is_bot_aux(r);
                if aux && !s.1 {
                    continue;
                }
                for a in &r.body {
                    if p.is_idb(&a.pred) {
                        best = best.max(dfs(p, (a.pred.clone(), s.1 && !aux), marks)?);
                    }
                }
            }
            marks.insert(s, Mark::Done(best + 1));
            Some(best + 1)
        }
        dfs(self.p, (n.clone(), true), &mut HashMap::new())
    }

    pub fn default_answer(&mut self, n: &Name) -> Result<OracleAnswer> {
        self.check_idb(n)?;
        match self.longest_path(n) {
            None => Ok(OracleAnswer::Unknown),
            Some(d) => Ok(OracleAnswer::Bounded(
                self.unfold(n, d, true)?.as_ref().clone(),
            )),
        }
    }

    /// The oracle's answer for `n`, asked once per predicate.
    pub fn oracle_answer(
        &mut self,
        n: &Name,
        omega: &dyn BoundednessOracle,
    ) -> Result<OracleAnswer> {
        if let Some(a) = self.answers.get(n) {
            return Ok(a.clone());
        }
        self.check_idb(n)?;
        let a = omega.answer(self, n)?;
        self.answers.insert(n.clone(), a.clone());
        Ok(a)
    }

    /// `cut_k^Ω(n)`: the oracle's UCQ when bounded, otherwise `Φ^k(n)`.
    pub fn cut(&mut self, n: &Name, k: usize, omega: &dyn BoundednessOracle) -> Result<Vec<CQne>> {
        match self.oracle_answer(n, omega)? {
            OracleAnswer::Bounded(ucq) => Ok(ucq),
            _ => self.phi_k(n, k),
        }
    }
}

/// Conjoins `o` to `pre`, identifying `o`'s answer variables with the
/// arguments of `at` and renaming its other variables apart.
fn plug(pre: &CQne, o: &CQne, at: &Atom, fresh: &mut usize) -> CQne {
    let mut map: BTreeMap<Name, Name> = BTreeMap::new();
    for (v, t) in o.answer_vars.iter().zip(&at.args) {
        if let Term::Var(t) = t {
            map.insert(v.clone(), t.clone());
        }
    }
    for v in o.vars() {
        if !map.contains_key(&v) {
            *fresh += 1;
            map.insert(v, Name::from(format!("_p{}", *fresh)));
        }
    }
    let r = o.rename(&map);
    let mut q = pre.clone();
    for a in r.atoms {
        q.push_atom(a);
    }
    q.ineqs.extend(r.ineqs);
    q
}

/// `Ω`'s answer for a single predicate, using the default oracle.
pub fn default_oracle(p: &Program, n: &Name) -> Result<OracleAnswer> {
    Expander::new(p).default_answer(n)
}

pub fn cut(n: &Name, p: &Program, k: usize, omega: &dyn BoundednessOracle) -> Result<Vec<CQne>> {
    Expander::new(p).cut(n, k, omega)
}

#[derive(Debug, Clone)]
pub struct EtMapping {
    pub mapping: Mapping,
    pub verdicts: BTreeMap<Name, Verdict>,
    pub program: Program,
}

/// `cut_k^Ω(etm_T(M))`: for every concept and role name `N` of `t3`, one
/// assertion per DB-defined query of `cut_k^Ω(N)` over `Π_{t3,m}`.
pub fn et_mapping_cut(
    t3: &TBox,
    m: &Mapping,
    k: usize,
    omega: &dyn BoundednessOracle,
    cap: usize,
    opts: &TranslateOptions,
) -> Result<EtMapping> {
    let p = program_for(t3, m, opts)?;
    let mut ex = Expander::with_cap(&p, cap);
    let mut out = Mapping::new();
    let mut verdicts = BTreeMap::new();
    let names: BTreeSet<Name> = t3
        .sig
        .concepts
        .iter()
        .chain(t3.sig.roles.iter())
        .cloned()
        .collect();
    for n in &names {
        if !p.is_idb(n) {
            continue;
        }
        let ans = ex.oracle_answer(n, omega)?;
        verdicts.insert(n.clone(), ans.verdict());
        let mut seen = QuerySet::new(0);
        for q in ex.cut(n, k, omega)? {
            if is_db_defined(&q, &p.edb) && seen.insert(q.clone()) {
                out.push(MappingAssertion::from_cq(n.clone(), canonical(&q)));
            }
        }
    }
    Ok(EtMapping {
        mapping: out,
        verdicts,
        program: p,
    })
}
