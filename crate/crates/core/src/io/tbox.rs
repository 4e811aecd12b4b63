//! The TBox text format.
//!
//! One axiom per line: `LHS <= RHS`, role inclusions `R <= S`, and
//! disjointness `R & S <= bot`. Concepts may be nested (`&`, `or`, `not`,
//! `exists R . C`, `forall R . C`, `atmost1 R . C`); axioms that are not in
//! normal form are normalized. `role R, S` and `concept A` lines declare
//! names whose category the axioms leave open.

use std::collections::{BTreeMap, BTreeSet};

use super::lex::{lines, Line, Tok};
use crate::dl::{
    normalize_structural, Axiom, Basic, DlLiteAxiom, DlLiteTBox, Provenance, RhsConcept, Role,
    SurfaceAxiom, SurfaceConcept, TBox,
};
use crate::error::{Error, Result};
use crate::name::{is_token, is_user_name, Name};

const KEYWORDS: [&str; 10] = [
    "top", "bot", "not", "or", "exists", "forall", "atmost1", "inv", "role", "concept",
];

/// Whether generated names (leading `_`) are accepted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NameRule {
    pub allow_reserved: bool,
}

impl NameRule {
    pub const USER: NameRule = NameRule {
        allow_reserved: false,
    };
    pub const ANY: NameRule = NameRule {
        allow_reserved: true,
    };

    pub(crate) fn check(&self, l: &Line, s: &str, col: usize) -> Result<Name> {
        let ok = if self.allow_reserved {
            is_token(s) && !s.starts_with(|c: char| c.is_ascii_digit())
        } else {
            is_user_name(s)
        };
        if !ok {
            let why = if s.starts_with('_') {
                "names starting with `_` are reserved for generated names"
            } else {
                "names must start with a letter"
            };
            return Err(Error::syntax(
                l.line,
                col,
                format!("invalid name `{s}`: {why}"),
            ));
        }
        if KEYWORDS.contains(&s) {
            return Err(Error::syntax(l.line, col, format!("`{s}` is a keyword")));
        }
        Ok(Name::from(s))
    }
}

#[derive(Debug, Clone)]
struct RawRole {
    name: Name,
    inverse: bool,
}

#[derive(Debug, Clone)]
enum Raw {
    Top,
    Bot,
    Name(Name),
    Inv(Name),
    And(Vec<Raw>),
    Or(Vec<Raw>),
    Not(Box<Raw>),
    Exists(RawRole, Option<Box<Raw>>),
    Forall(RawRole, Box<Raw>),
    AtMost1(RawRole, Option<Box<Raw>>),
}

struct RawAxiom {
    line: usize,
    col: usize,
    lhs: Raw,
    rhs: Raw,
}

struct Parser<'a> {
    rule: NameRule,
    l: &'a mut Line,
}

impl Parser<'_> {
    fn name(&mut self) -> Result<(Name, usize)> {
        let (s, c) = self.l.ident()?;
        Ok((self.rule.check(self.l, &s, c)?, c))
    }

    fn role(&mut self) -> Result<RawRole> {
        if self.l.eat_ident("inv") {
            self.l.expect_sym("(")?;
            let (name, _) = self.name()?;
            self.l.expect_sym(")")?;
            return Ok(RawRole {
                name,
                inverse: true,
            });
        }
        let (name, _) = self.name()?;
        Ok(RawRole {
            name,
            inverse: false,
        })
    }

    fn expr(&mut self) -> Result<Raw> {
        let mut parts = vec![self.conj()?];
        while self.l.eat_ident("or") {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Raw::Or(parts)
        })
    }

    fn conj(&mut self) -> Result<Raw> {
        let mut parts = vec![self.unary()?];
        while self.l.eat_sym("&") {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Raw::And(parts)
        })
    }

    fn filler(&mut self) -> Result<Option<Box<Raw>>> {
        if self.l.eat_sym(".") {
            Ok(Some(Box::new(self.unary()?)))
        } else {
            Ok(None)
        }
    }

    fn unary(&mut self) -> Result<Raw> {
        if self.l.eat_ident("top") {
            return Ok(Raw::Top);
        }
        if self.l.eat_ident("bot") {
            return Ok(Raw::Bot);
        }
        if self.l.eat_ident("not") {
            return Ok(Raw::Not(Box::new(self.unary()?)));
        }
        if self.l.eat_ident("exists") {
            let r = self.role()?;
            return Ok(Raw::Exists(r, self.filler()?));
        }
        if self.l.eat_ident("forall") {
            let r = self.role()?;
            self.l.expect_sym(".")?;
            return Ok(Raw::Forall(r, Box::new(self.unary()?)));
        }
        if self.l.eat_ident("atmost1") {
            let r = self.role()?;
            return Ok(Raw::AtMost1(r, self.filler()?));
        }
        if self.l.is_ident("inv") {
            let r = self.role()?;
            return Ok(Raw::Inv(r.name));
        }
        if self.l.eat_sym("(") {
            let e = self.expr()?;
            self.l.expect_sym(")")?;
            return Ok(e);
        }
        let (n, _) = self.name()?;
        Ok(Raw::Name(n))
    }
}

/// Names in role and concept positions of nested expressions.
fn classify(r: &Raw, top_level: bool, roles: &mut BTreeSet<Name>, concepts: &mut BTreeSet<Name>) {
    match r {
        Raw::Top | Raw::Bot => {}
        Raw::Name(n) => {
            if !top_level {
                concepts.insert(n.clone());
            }
        }
        Raw::Inv(n) => {
            roles.insert(n.clone());
        }
        Raw::And(cs) => {
            for c in cs {
                classify(c, top_level, roles, concepts);
            }
        }
        Raw::Or(cs) => {
            for c in cs {
                classify(c, false, roles, concepts);
            }
        }
        Raw::Not(c) => classify(c, false, roles, concepts),
        Raw::Exists(rr, f) | Raw::AtMost1(rr, f) => {
            roles.insert(rr.name.clone());
            if let Some(f) = f {
                classify(f, false, roles, concepts);
            }
        }
        Raw::Forall(rr, f) => {
            roles.insert(rr.name.clone());
            classify(f, false, roles, concepts);
        }
    }
}

/// The role of a bare role-axiom side, if the side is one.
fn as_role(r: &Raw, roles: &BTreeSet<Name>) -> Option<Role> {
    match r {
        Raw::Inv(n) => Some(Role::inv_of(n.clone())),
        Raw::Name(n) if roles.contains(n) => Some(Role::named(n.clone())),
        _ => None,
    }
}

fn to_surface(r: &Raw) -> SurfaceConcept {
    let role = |rr: &RawRole| Role {
        name: rr.name.clone(),
        inverse: rr.inverse,
    };
    let fill =
        |f: &Option<Box<Raw>>| Box::new(f.as_ref().map_or(SurfaceConcept::Top, |f| to_surface(f)));
    match r {
        Raw::Top => SurfaceConcept::Top,
        Raw::Bot => SurfaceConcept::Bottom,
        Raw::Name(n) | Raw::Inv(n) => SurfaceConcept::Name(n.clone()),
        Raw::And(cs) => SurfaceConcept::And(cs.iter().map(to_surface).collect()),
        Raw::Or(cs) => SurfaceConcept::Or(cs.iter().map(to_surface).collect()),
        Raw::Not(c) => SurfaceConcept::Not(Box::new(to_surface(c))),
        Raw::Exists(rr, f) => SurfaceConcept::Exists(role(rr), fill(f)),
        Raw::Forall(rr, f) => SurfaceConcept::Forall(role(rr), Box::new(to_surface(f))),
        Raw::AtMost1(rr, f) => SurfaceConcept::AtMost1(role(rr), fill(f)),
    }
}

/// Names of a conjunction of names (`top` is the empty conjunction).
fn name_conj(c: &SurfaceConcept) -> Option<BTreeSet<Name>> {
    match c {
        SurfaceConcept::Top => Some(BTreeSet::new()),
        SurfaceConcept::Name(n) => Some([n.clone()].into()),
        SurfaceConcept::And(cs) => {
            let mut out = BTreeSet::new();
            for c in cs {
                out.extend(name_conj(c)?);
            }
            Some(out)
        }
        _ => None,
    }
}

/// The axiom itself when it is already in normal form.
fn direct(l: &SurfaceConcept, r: &SurfaceConcept) -> Option<Axiom> {
    let lhs = name_conj(l)?;
    let rhs = match r {
        SurfaceConcept::Bottom => RhsConcept::Bottom,
        SurfaceConcept::Name(n) => RhsConcept::Atom(n.clone()),
        SurfaceConcept::Exists(role, f) => RhsConcept::Exists(role.clone(), name_conj(f)?),
        SurfaceConcept::Forall(role, f) => match &**f {
            SurfaceConcept::Name(n) => RhsConcept::Forall(role.clone(), n.clone()),
            _ => return None,
        },
        SurfaceConcept::AtMost1(role, f) => match &**f {
            SurfaceConcept::Top => RhsConcept::AtMost1(role.clone(), None),
            SurfaceConcept::Name(n) => RhsConcept::AtMost1(role.clone(), Some(n.clone())),
            _ => return None,
        },
        _ => return None,
    };
    if lhs.len() == 1 && rhs == RhsConcept::Atom(lhs.iter().next().unwrap().clone()) {
        return None;
    }
    Some(Axiom::Ci { lhs, rhs })
}

struct Parsed {
    axioms: Vec<RawAxiom>,
    roles: BTreeSet<Name>,
    concepts: BTreeSet<Name>,
}

fn parse_lines(text: &str, rule: NameRule) -> Result<Parsed> {
    let mut out = Parsed {
        axioms: Vec::new(),
        roles: BTreeSet::new(),
        concepts: BTreeSet::new(),
    };
    let mut declared_role: BTreeMap<Name, usize> = BTreeMap::new();
    let mut declared_concept: BTreeMap<Name, usize> = BTreeMap::new();
    for (no, text) in lines(text) {
        let mut l = Line::new(no, text)?;
        let decl = match (l.peek(), l.peek_at(1)) {
            (Some(Tok::Ident(k)), Some(Tok::Ident(_))) if k == "role" || k == "concept" => {
                Some(k == "role")
            }
            _ => None,
        };
        if let Some(is_role) = decl {
            l.next();
            loop {
                let (s, c) = l.ident()?;
                let n = rule.check(&l, &s, c)?;
                if is_role {
                    declared_role.insert(n, no);
                } else {
                    declared_concept.insert(n, no);
                }
                if !l.eat_sym(",") {
                    break;
                }
            }
            l.expect_end()?;
            continue;
        }
        let col = l.col();
        let mut p = Parser { rule, l: &mut l };
        let lhs = p.expr()?;
        p.l.expect_sym("<=")?;
        let rhs = p.expr()?;
        l.expect_end()?;
        classify(&lhs, true, &mut out.roles, &mut out.concepts);
        classify(&rhs, true, &mut out.roles, &mut out.concepts);
        out.axioms.push(RawAxiom {
            line: no,
            col,
            lhs,
            rhs,
        });
    }
    out.roles.extend(declared_role.keys().cloned());
    out.concepts.extend(declared_concept.keys().cloned());
    // A bare name next to a role in `R <= S` or `R & S <= bot` is a role.
    loop {
        let before = out.roles.len();
        for a in &out.axioms {
            let mut sides: Vec<&Raw> = match &a.lhs {
                Raw::And(cs) => cs.iter().collect(),
                other => vec![other],
            };
            if !matches!(a.rhs, Raw::Bot) {
                sides.push(&a.rhs);
            }
            let bare = sides
                .iter()
                .all(|s| matches!(s, Raw::Name(_) | Raw::Inv(_)));
            let has_role = sides.iter().any(|s| as_role(s, &out.roles).is_some());
            if bare && has_role {
                for s in sides {
                    if let Raw::Name(n) = s {
                        if !out.concepts.contains(n) {
                            out.roles.insert(n.clone());
                        }
                    }
                }
            }
        }
        if out.roles.len() == before {
            break;
        }
    }
    if let Some(n) = out.roles.intersection(&out.concepts).next() {
        let line = declared_role
            .get(n)
            .or(declared_concept.get(n))
            .copied()
            .unwrap_or(1);
        return Err(Error::syntax(
            line,
            1,
            format!("`{n}` is used both as a concept and as a role"),
        ));
    }
    Ok(out)
}

/// Sides of a role axiom (`R <= S` or `R & S <= bot`), or `None` for a
/// concept axiom.
#[allow(clippy::type_complexity)]
fn role_axiom(a: &RawAxiom, roles: &BTreeSet<Name>) -> Result<Option<(Vec<Role>, Option<Role>)>> {
    let lhs: Vec<&Raw> = match &a.lhs {
        Raw::And(cs) => cs.iter().collect(),
        other => vec![other],
    };
    let found: Vec<Option<Role>> = lhs.iter().map(|r| as_role(r, roles)).collect();
    let rhs = match &a.rhs {
        Raw::Bot => None,
        r => Some(as_role(r, roles)),
    };
    let all = found.iter().all(Option::is_some) && rhs.as_ref().is_none_or(Option::is_some);
    let any = found.iter().any(Option::is_some) || rhs.as_ref().is_some_and(Option::is_some);
    if !any {
        return Ok(None);
    }
    let bad = || Error::syntax(a.line, a.col, "roles and concepts mixed in one axiom");
    if !all {
        return Err(bad());
    }
    let subs: Vec<Role> = found.into_iter().map(Option::unwrap).collect();
    match (subs.len(), rhs) {
        (1, Some(sup)) => Ok(Some((subs, sup))),
        (2, None) => Ok(Some((subs, None))),
        _ => Err(Error::syntax(
            a.line,
            a.col,
            "role axioms are `R <= S` or `R & S <= bot`",
        )),
    }
}

/// Parses a TBox, normalizing axioms that are not in normal form.
pub fn parse_tbox_with(text: &str, rule: NameRule) -> Result<TBox> {
    let parsed = parse_lines(text, rule)?;
    let mut t = TBox::new();
    let mut complex = Vec::new();
    for a in &parsed.axioms {
        if let Some((subs, sup)) = role_axiom(a, &parsed.roles)? {
            match sup {
                Some(sup) => {
                    if subs[0] != sup {
                        t.insert(Axiom::ri(subs[0].clone(), sup));
                    }
                }
                None => {
                    t.insert(Axiom::role_disjoint(subs[0].clone(), subs[1].clone()));
                }
            }
            continue;
        }
        let l = to_surface(&a.lhs);
        let r = to_surface(&a.rhs);
        match direct(&l, &r) {
            Some(ax) => {
                t.insert(ax);
            }
            None => complex.push(SurfaceAxiom::ConceptIncl(l, r)),
        }
    }
    let n = normalize_structural(&complex)?;
    for ax in n.axioms {
        t.insert(ax);
    }
    t.fresh_registry.extend(n.fresh_registry);
    for c in parsed.concepts.iter().chain(n.sig.concepts.iter()) {
        t.declare_concept(c.clone());
    }
    for r in parsed.roles.iter().chain(n.sig.roles.iter()) {
        t.declare_role(r.clone());
    }
    for a in &parsed.axioms {
        for side in [&a.lhs, &a.rhs] {
            let parts: Vec<&Raw> = match side {
                Raw::And(cs) => cs.iter().collect(),
                other => vec![other],
            };
            for p in parts {
                if let Raw::Name(n) = p {
                    if !parsed.roles.contains(n) {
                        t.declare_concept(n.clone());
                    }
                }
            }
        }
    }
    let imported: Vec<Name> = t
        .sig
        .concepts
        .iter()
        .chain(&t.sig.roles)
        .filter(|n| n.is_reserved() && !t.fresh_registry.contains_key(*n))
        .cloned()
        .collect();
    for n in imported {
        t.register_fresh(n, Provenance::Imported);
    }
    Ok(t)
}

/// Parses a user TBox: names must start with a letter.
pub fn parse_tbox(text: &str) -> Result<TBox> {
    parse_tbox_with(text, NameRule::USER)
}

fn basic(r: &Raw, roles: &BTreeSet<Name>, a: &RawAxiom) -> Result<Basic> {
    match r {
        Raw::Name(n) if !roles.contains(n) => Ok(Basic::Concept(n.clone())),
        Raw::Exists(rr, None) => Ok(Basic::Exists(Role {
            name: rr.name.clone(),
            inverse: rr.inverse,
        })),
        _ => Err(Error::syntax(
            a.line,
            a.col,
            "not a DL-Lite_R basic concept",
        )),
    }
}

/// Parses a DL-Lite_R TBox (generated names allowed).
pub fn parse_dllite(text: &str) -> Result<DlLiteTBox> {
    let parsed = parse_lines(text, NameRule::ANY)?;
    let mut out = DlLiteTBox::new();
    for a in &parsed.axioms {
        if let Some((subs, sup)) = role_axiom(a, &parsed.roles)? {
            out.axioms.insert(match sup {
                Some(sup) => DlLiteAxiom::role_incl(subs[0].clone(), sup),
                None => DlLiteAxiom::role_disj(subs[0].clone(), subs[1].clone()),
            });
            continue;
        }
        let ax = match (&a.lhs, &a.rhs) {
            (Raw::And(cs), Raw::Bot) if cs.len() == 2 => DlLiteAxiom::concept_disj(
                basic(&cs[0], &parsed.roles, a)?,
                basic(&cs[1], &parsed.roles, a)?,
            ),
            (l, r) => {
                DlLiteAxiom::ConceptIncl(basic(l, &parsed.roles, a)?, basic(r, &parsed.roles, a)?)
            }
        };
        out.axioms.insert(ax);
    }
    let sig = out.signature();
    for c in sig.concepts.iter().chain(&parsed.concepts) {
        out.axioms.insert(DlLiteAxiom::ConceptIncl(
            Basic::Concept(c.clone()),
            Basic::Concept(c.clone()),
        ));
    }
    for r in sig.roles.iter().chain(&parsed.roles) {
        out.axioms.insert(DlLiteAxiom::role_incl(
            Role::named(r.clone()),
            Role::named(r.clone()),
        ));
    }
    Ok(out)
}

/// Role declarations followed by the axioms; parses back to the same TBox.
pub fn write_tbox(t: &TBox) -> String {
    let mut s = String::new();
    if !t.sig.roles.is_empty() {
        s.push_str(&format!(
            "role {}\n",
            t.sig
                .roles
                .iter()
                .map(Name::as_str)
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    let used: BTreeSet<Name> = t.axioms.iter().flat_map(|a| a.names().0).collect();
    let unused: Vec<&str> = t
        .sig
        .concepts
        .iter()
        .filter(|c| !used.contains(*c))
        .map(Name::as_str)
        .collect();
    if !unused.is_empty() {
        s.push_str(&format!("concept {}\n", unused.join(", ")));
    }
    s.push_str(&t.to_string());
    s
}

/// Declarations of the whole signature, then the nontrivial axioms.
/// `B <= B` is implied by the declarations.
pub fn write_dllite(t: &DlLiteTBox) -> String {
    let sig = t.signature();
    let mut s = String::new();
    for (kw, names) in [("role", &sig.roles), ("concept", &sig.concepts)] {
        if !names.is_empty() {
            s.push_str(&format!(
                "{kw} {}\n",
                names
                    .iter()
                    .map(Name::as_str)
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
    }
    for ax in &t.axioms {
        let trivial = match ax {
            DlLiteAxiom::ConceptIncl(a, b) => a == b,
            DlLiteAxiom::RoleIncl(a, b) => a == b,
            _ => false,
        };
        if !trivial {
            s.push_str(&format!("{ax}\n"));
        }
    }
    s
}
