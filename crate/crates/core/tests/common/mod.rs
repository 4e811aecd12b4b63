//! Seeded random specifications, programs and instances.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use obdarew::datalog::{Atom, CQne, FactSet, Program, Rule, Term};
use obdarew::dl::{Axiom, RhsConcept, Role, Signature, TBox};
use obdarew::mapping::{Mapping, MappingAssertion};
use obdarew::rewriter::ObdaSpec;
use obdarew::Name;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub concepts: usize,
    pub roles: usize,
    pub axioms: usize,
    pub views: usize,
    pub body_atoms: usize,
    pub facts: usize,
    /// Allow `⊥` on right-hand sides and role disjointness.
    pub bottom: bool,
    /// Role inclusions only go from lower to higher role index.
    pub acyclic_roles: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            concepts: 6,
            roles: 3,
            axioms: 8,
            views: 4,
            body_atoms: 3,
            facts: 15,
            bottom: false,
            acyclic_roles: false,
        }
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn concept(i: usize) -> Name {
    Name::from(format!("C{i}"))
}

fn role_name(i: usize) -> Name {
    Name::from(format!("R{i}"))
}

fn some_role(rng: &mut StdRng, n: usize) -> Role {
    let r = role_name(rng.gen_range(0..n));
    if rng.gen_bool(0.3) {
        Role::inv_of(r)
    } else {
        Role::named(r)
    }
}

fn some_lhs(rng: &mut StdRng, n: usize, allow_top: bool) -> BTreeSet<Name> {
    let size = match rng.gen_range(0..10) {
        0 if allow_top => 0,
        0..=5 => 1,
        _ => 2,
    };
    (0..size).map(|_| concept(rng.gen_range(0..n))).collect()
}

/// A Horn-ALCHI TBox in normal form over `C0..`, `R0..`.
pub fn random_tbox(rng: &mut StdRng, lim: &Limits) -> TBox {
    let nc = rng.gen_range(2..=lim.concepts);
    let nr = rng.gen_range(1..=lim.roles);
    let mut t = TBox::new();
    for i in 0..nc {
        t.declare_concept(concept(i));
    }
    for i in 0..nr {
        t.declare_role(role_name(i));
    }
    let n_ax = rng.gen_range(1..=lim.axioms);
    while t.axioms.len() < n_ax {
        let ax = match rng.gen_range(0..100) {
            0..=34 => {
                let lhs = some_lhs(rng, nc, true);
                let b = concept(rng.gen_range(0..nc));
                if lhs.contains(&b) {
                    continue;
                }
                Axiom::Ci {
                    lhs,
                    rhs: RhsConcept::Atom(b),
                }
            }
            35..=54 => {
                let lhs = some_lhs(rng, nc, false);
                let filler: BTreeSet<Name> = if rng.gen_bool(0.7) {
                    [concept(rng.gen_range(0..nc))].into()
                } else {
                    BTreeSet::new()
                };
                Axiom::Ci {
                    lhs,
                    rhs: RhsConcept::Exists(some_role(rng, nr), filler),
                }
            }
            55..=79 => Axiom::Ci {
                lhs: some_lhs(rng, nc, true),
                rhs: RhsConcept::Forall(some_role(rng, nr), concept(rng.gen_range(0..nc))),
            },
            80..=89 if lim.bottom => {
                let lhs = some_lhs(rng, nc, false);
                if lhs.len() < 2 {
                    continue;
                }
                Axiom::Ci {
                    lhs,
                    rhs: RhsConcept::Bottom,
                }
            }
            _ => {
                if nr < 2 {
                    continue;
                }
                let (i, j) = (rng.gen_range(0..nr), rng.gen_range(0..nr));
                if i == j || (lim.acyclic_roles && i > j) {
                    continue;
                }
                let sup = if rng.gen_bool(0.3) {
                    Role::inv_of(role_name(j))
                } else {
                    Role::named(role_name(j))
                };
                Axiom::ri(Role::named(role_name(i)), sup)
            }
        };
        t.insert(ax);
    }
    t
}

pub fn random_schema(rng: &mut StdRng, lim: &Limits) -> Signature {
    let n = rng.gen_range(2..=lim.views);
    let mut s = Signature::new();
    for i in 0..n {
        // At least one unary and one binary view.
        let arity = match i {
            0 => 1,
            1 => 2,
            _ => rng.gen_range(1..=2),
        };
        s.views.insert(Name::from(format!("V{i}")), arity);
    }
    s
}

/// A conjunctive query over the views whose answer variables are `head`.
fn random_body(rng: &mut StdRng, views: &[(Name, usize)], head: &[Name], max_atoms: usize) -> CQne {
    let mut pool: Vec<Name> = head.to_vec();
    pool.push("z".into());
    loop {
        let n = rng.gen_range(1..=max_atoms);
        let atoms: Vec<Atom> = (0..n)
            .map(|_| {
                let (v, arity) = views.choose(rng).unwrap().clone();
                let args = (0..arity)
                    .map(|_| Term::Var(pool.choose(rng).unwrap().clone()))
                    .collect();
                Atom::new(v, args)
            })
            .collect();
        let q = CQne::new(head.to_vec(), atoms);
        let vars = q.vars();
        if head.iter().all(|h| vars.contains(h)) {
            return q;
        }
    }
}

/// Assertions for a random subset of the TBox names, each a union of one
/// or two bodies.
pub fn random_mapping(rng: &mut StdRng, t: &TBox, schema: &Signature, lim: &Limits) -> Mapping {
    let views: Vec<(Name, usize)> = schema.views.iter().map(|(v, a)| (v.clone(), *a)).collect();
    let mut m = Mapping::new();
    let targets: Vec<(Name, usize)> = t
        .sig
        .concepts
        .iter()
        .map(|c| (c.clone(), 1))
        .chain(t.sig.roles.iter().map(|r| (r.clone(), 2)))
        .collect();
    for (n, arity) in targets {
        if !rng.gen_bool(0.6) {
            continue;
        }
        let head: Vec<Name> = ["x", "y"][..arity].iter().map(|s| Name::from(*s)).collect();
        let k = rng.gen_range(1..=2);
        let qs = (0..k)
            .map(|_| random_body(rng, &views, &head, lim.body_atoms))
            .collect();
        m.push(MappingAssertion::new(n, head, qs));
    }
    m
}

pub fn random_spec(rng: &mut StdRng, lim: &Limits) -> ObdaSpec {
    let t = random_tbox(rng, lim);
    let schema = random_schema(rng, lim);
    let m = random_mapping(rng, &t, &schema, lim);
    ObdaSpec::new(t, m, schema)
}

/// Up to `max_facts` facts over the given predicates and constants `a..d`.
pub fn random_facts(rng: &mut StdRng, preds: &BTreeMap<Name, usize>, max_facts: usize) -> FactSet {
    let preds: Vec<(&Name, &usize)> = preds.iter().collect();
    let mut d = FactSet::new();
    let n = rng.gen_range(1..=max_facts);
    for _ in 0..n {
        let (p, arity) = preds.choose(rng).unwrap();
        let tuple = (0..**arity)
            .map(|_| Name::from(*CONSTANTS.choose(rng).unwrap()))
            .collect();
        d.insert((*p).clone(), tuple);
    }
    d
}

pub fn random_instance(rng: &mut StdRng, schema: &Signature, lim: &Limits) -> FactSet {
    random_facts(rng, &schema.views, lim.facts)
}

/// A small Datalog program over EDB `E0/1, E1/2, E2/1` and IDB
/// `P0/1, P1/2, P2/1`, possibly recursive.
pub fn random_program(rng: &mut StdRng, max_rules: usize) -> Program {
    let preds: [(&str, usize, bool); 6] = [
        ("E0", 1, false),
        ("E1", 2, false),
        ("E2", 1, false),
        ("P0", 1, true),
        ("P1", 2, true),
        ("P2", 1, true),
    ];
    let idb: Vec<_> = preds.iter().filter(|p| p.2).collect();
    let vars = ["x", "y", "z"];
    let mut p = Program::new();
    for (n, a, is_idb) in preds {
        if !is_idb {
            p.declare_edb(n.into(), a);
        }
    }
    let n_rules = rng.gen_range(1..=max_rules);
    // The first rule has an EDB-only body, so something is derivable.
    let mut added = 0;
    while added < n_rules {
        let (h, ha, _) = **idb.choose(rng).unwrap();
        let n_body = rng.gen_range(1..=3);
        let body: Vec<Atom> = (0..n_body)
            .map(|_| {
                let (b, ba, _) = if added == 0 {
                    preds[rng.gen_range(0..3)]
                } else {
                    *preds.choose(rng).unwrap()
                };
                Atom::new(
                    b,
                    (0..ba)
                        .map(|_| Term::var(*vars.choose(rng).unwrap()))
                        .collect(),
                )
            })
            .collect();
        let body_vars: BTreeSet<Name> = body.iter().flat_map(|a| a.var_set().cloned()).collect();
        let bv: Vec<Name> = body_vars.into_iter().collect();
        if bv.len() < ha {
            continue;
        }
        let mut head_vars = bv.clone();
        head_vars.shuffle(rng);
        head_vars.truncate(ha);
        let mut rule = Rule::new(
            Atom::new(h, head_vars.into_iter().map(Term::Var).collect()),
            body,
        );
        if bv.len() >= 2 && rng.gen_bool(0.15) {
            rule = rule.with_ineqs([(bv[0].clone(), bv[1].clone())]);
        }
        if p.add_rule(rule).is_ok() {
            added += 1;
        }
    }
    p
}

/// Every concept and role name with its arity.
pub fn ontology_predicates(t: &TBox) -> BTreeMap<Name, usize> {
    t.sig
        .concepts
        .iter()
        .map(|c| (c.clone(), 1))
        .chain(t.sig.roles.iter().map(|r| (r.clone(), 2)))
        .collect()
}

/// Matches `atoms` in order against `d`, extending `env`; `f` is called on
/// every full match and returns false to stop the search.
fn matches(
    atoms: &[&Atom],
    ineqs: &[&(Name, Name)],
    d: &FactSet,
    env: &mut BTreeMap<Name, Name>,
    f: &mut dyn FnMut(&BTreeMap<Name, Name>) -> bool,
) -> bool {
    let Some((a, rest)) = atoms.split_first() else {
        if ineqs.iter().all(|(x, y)| env[x] != env[y]) {
            return f(env);
        }
        return true;
    };
    let Some(facts) = d.get(&a.pred) else {
        return true;
    };
    for fact in facts {
        let mut bound = Vec::new();
        let mut ok = true;
        for (t, c) in a.args.iter().zip(fact) {
            ok = match t {
                Term::Const(k) => k == c,
                Term::Var(v) => match env.get(v) {
                    Some(old) => old == c,
                    None => {
                        env.insert(v.clone(), c.clone());
                        bound.push(v.clone());
                        true
                    }
                },
            };
            if !ok {
                break;
            }
        }
        let go_on = !ok || matches(rest, ineqs, d, env, f);
        for v in bound {
            env.remove(&v);
        }
        if !go_on {
            return false;
        }
    }
    true
}

fn root(c: &[usize], mut i: usize) -> usize {
    while c[i] != i {
        i = c[i];
    }
    i
}

/// Evaluates a conjunctive query directly on the facts. Atoms are split into
/// components connected by shared variables or inequalities; a component
/// without answer variables only has to be satisfiable.
pub fn brute_force_answers(q: &CQne, d: &FactSet) -> BTreeSet<Vec<Name>> {
    let n = q.atoms.len();
    let vars: Vec<BTreeSet<Name>> = q
        .atoms
        .iter()
        .map(|a| a.var_set().cloned().collect())
        .collect();
    let mut comp: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            let (vi, vj) = (&vars[i], &vars[j]);
            let linked = vi.intersection(vj).next().is_some()
                || q.ineqs.iter().any(|(x, y)| {
                    (vi.contains(x) && vj.contains(y)) || (vi.contains(y) && vj.contains(x))
                });
            if linked {
                let (ri, rj) = (root(&comp, i), root(&comp, j));
                comp[ri] = rj;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        groups.entry(root(&comp, i)).or_default().push(i);
    }
    // Assignments to the answer variables of the components seen so far.
    let mut partial: Vec<BTreeMap<Name, Name>> = vec![BTreeMap::new()];
    for idx in groups.values() {
        let atoms: Vec<&Atom> = idx.iter().map(|&i| &q.atoms[i]).collect();
        let cvars: BTreeSet<&Name> = idx.iter().flat_map(|&i| vars[i].iter()).collect();
        let ineqs: Vec<&(Name, Name)> = q.ineqs.iter().filter(|(x, _)| cvars.contains(x)).collect();
        let heads: Vec<&Name> = q.answer_vars.iter().filter(|v| cvars.contains(v)).collect();
        let existence = heads.is_empty();
        let mut found: BTreeSet<Vec<Name>> = BTreeSet::new();
        matches(&atoms, &ineqs, d, &mut BTreeMap::new(), &mut |env| {
            found.insert(heads.iter().map(|v| env[*v].clone()).collect());
            !existence
        });
        if found.is_empty() {
            return BTreeSet::new();
        }
        partial = partial
            .iter()
            .flat_map(|p| {
                found.iter().map(|row| {
                    let mut p = p.clone();
                    for (v, c) in heads.iter().zip(row) {
                        p.insert((*v).clone(), c.clone());
                    }
                    p
                })
            })
            .collect();
    }
    partial
        .into_iter()
        .map(|p| q.answer_vars.iter().map(|v| p[v].clone()).collect())
        .collect()
}
