//! Explicit expansion trees: proof-tree unfoldings of an IDB predicate.

use std::collections::BTreeMap;

use crate::datalog::{rename_atom, Atom, CQne, Program, Rule, Term};
use crate::error::{Error, Result};
use crate::name::Name;

/// A node labeled by an IDB atom and the rule instance whose head it is;
/// one child per IDB atom of that instance's body, in body order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTree {
    pub atom: Atom,
    pub rule: Rule,
    pub children: Vec<ExpansionTree>,
}

impl ExpansionTree {
    /// Number of nodes on the longest root-to-leaf path; a single node has depth 1.
    pub fn depth(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(ExpansionTree::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ExpansionTree::size).sum::<usize>()
    }

    fn collect(&self, p: &Program, q: &mut CQne) {
        for a in &self.rule.body {
            if !p.is_idb(&a.pred) {
                q.push_atom(a.clone());
            }
        }
        q.ineqs.extend(self.rule.ineqs.iter().cloned());
        for c in &self.children {
            c.collect(p, q);
        }
    }
}

/// The CQ≠ denoted by a tree: all EDB atoms and inequalities of its rule
/// instances, with the root atom's arguments as answer variables.
pub fn tree_to_query(t: &ExpansionTree, p: &Program) -> CQne {
    let answer = t
        .atom
        .args
        .iter()
        .filter_map(|a| a.as_var().cloned())
        .collect();
    let mut q = CQne::new(answer, vec![]);
    t.collect(p, &mut q);
    q
}

struct Fresh(usize);

impl Fresh {
    fn next(&mut self) -> Name {
        self.0 += 1;
        Name::from(format!("_v{}", self.0))
    }
}

/// The rule with its head unified against `atom` and its other variables
/// renamed apart.
pub(crate) fn instantiate(rule: &Rule, atom: &Atom, mut fresh: impl FnMut() -> Name) -> Rule {
    let mut map: BTreeMap<Name, Name> = BTreeMap::new();
    for (h, a) in rule.head.args.iter().zip(&atom.args) {
        if let (Term::Var(h), Term::Var(a)) = (h, a) {
            map.insert(h.clone(), a.clone());
        }
    }
    for b in &rule.body {
        for v in b.var_set() {
            if !map.contains_key(v) {
                map.insert(v.clone(), fresh());
            }
        }
    }
    let r = |v: &Name| map[v].clone();
    Rule {
        head: atom.clone(),
        body: rule.body.iter().map(|b| rename_atom(b, &map)).collect(),
        ineqs: rule
            .ineqs
            .iter()
            .map(|(a, b)| crate::datalog::ineq(r(a), r(b)))
            .collect(),
    }
}

fn expand(
    p: &Program,
    atom: &Atom,
    k: usize,
    fresh: &mut Fresh,
    cap: usize,
) -> Result<Vec<ExpansionTree>> {
    let mut out = Vec::new();
    if k == 0 {
        return Ok(out);
    }
    for rule in p.rules_for(&atom.pred) {
        let inst = instantiate(rule, atom, || fresh.next());
        let idb: Vec<&Atom> = inst.body.iter().filter(|a| p.is_idb(&a.pred)).collect();
        let mut partial: Vec<Vec<ExpansionTree>> = vec![vec![]];
        for child in idb {
            let options = expand(p, child, k - 1, fresh, cap)?;
            let mut next = Vec::new();
            for pre in &partial {
                for o in &options {
                    let mut v = pre.clone();
                    v.push(o.clone());
                    next.push(v);
                    if next.len() > cap {
                        return Err(Error::CapExceeded {
                            predicate: atom.pred.to_string(),
                            cap,
                        });
                    }
                }
            }
            partial = next;
        }
        for children in partial {
            out.push(ExpansionTree {
                atom: atom.clone(),
                rule: inst.clone(),
                children,
            });
            if out.len() > cap {
                return Err(Error::CapExceeded {
                    predicate: atom.pred.to_string(),
                    cap,
                });
            }
        }
    }
    Ok(out)
}

/// All expansion trees of `n` with depth at most `k`, in rule order and then
/// child-choice order. Aborts with `CapExceeded` past `cap` trees.
pub fn expansions_upto(p: &Program, n: &Name, k: usize, cap: usize) -> Result<Vec<ExpansionTree>> {
    let arity = p
        .arity(n)
        .ok_or_else(|| Error::validation(format!("`{n}` is not a predicate of the program")))?;
    if !p.is_idb(n) {
        return Err(Error::validation(format!("`{n}` is not an IDB predicate")));
    }
    const BASE: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    let args = (0..arity)
        .map(|i| {
            if i < BASE.len() {
                BASE[i].to_string()
            } else {
                format!("x{i}")
            }
        })
        .collect::<Vec<_>>();
    let root = Atom::vars(n.clone(), args);
    expand(p, &root, k, &mut Fresh(0), cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Program {
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
        p
    }

    #[test]
    fn single_rule_single_tree() {
        let mut p = Program::new();
        p.add_rule(Rule::new(
            Atom::vars("A", ["x"]),
            vec![Atom::vars("V", ["x"])],
        ))
        .unwrap();
        let ts = expansions_upto(&p, &"A".into(), 1, 100).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].depth(), 1);
        assert_eq!(tree_to_query(&ts[0], &p).to_string(), "V(x)");
    }

    #[test]
    fn recursive_chain_to_depth_two() {
        let p = chain();
        let ts = expansions_upto(&p, &"A".into(), 2, 100).unwrap();
        let qs: Vec<String> = ts
            .iter()
            .map(|t| crate::expansion::cq::canonical(&tree_to_query(t, &p)).to_string())
            .collect();
        assert_eq!(qs, ["E(x)", "E(y), R(y,x)"]);
        assert!(ts.iter().all(|t| t.depth() <= 2));
        assert_eq!(expansions_upto(&p, &"A".into(), 1, 100).unwrap().len(), 1);
    }

    #[test]
    fn heads_match_node_atoms_and_body_variables_are_fresh() {
        let p = chain();
        for t in expansions_upto(&p, &"A".into(), 4, 100).unwrap() {
            let mut stack = vec![(&t, vec![])];
            while let Some((node, ancestors)) = stack.pop() {
                assert_eq!(node.rule.head, node.atom);
                let head_vars: Vec<&Name> = node.atom.var_set().collect();
                for b in &node.rule.body {
                    for v in b.var_set() {
                        if !head_vars.contains(&v) {
                            assert!(!ancestors.contains(v), "variable {v} reused");
                        }
                    }
                }
                let mut anc = ancestors.clone();
                anc.extend(node.atom.var_set().cloned());
                for c in &node.children {
                    stack.push((c, anc.clone()));
                }
            }
        }
    }

    #[test]
    fn cap_is_a_hard_error() {
        let err = expansions_upto(&chain(), &"A".into(), 50, 10).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn inequalities_are_copied() {
        let mut p = Program::new();
        p.add_rule(
            Rule::new(
                Atom::vars("D", ["x"]),
                vec![Atom::vars("R", ["x", "y"]), Atom::vars("R", ["x", "z"])],
            )
            .with_ineqs([("y".into(), "z".into())]),
        )
        .unwrap();
        let t = &expansions_upto(&p, &"D".into(), 1, 10).unwrap()[0];
        assert_eq!(tree_to_query(t, &p).ineqs.len(), 1);
    }
}
