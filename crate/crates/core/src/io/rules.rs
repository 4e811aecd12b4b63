//! Line formats built from atoms: mappings, queries, programs, facts,
//! schemas, oracle answers and view definitions.

use std::collections::BTreeMap;

use super::lex::{lines, Line, Tok};
use super::tbox::NameRule;
use crate::datalog::{ineq, Atom, CQne, FactSet, Program, Rule, Term, Tuple};
use crate::dl::Signature;
use crate::error::{Error, Result};
use crate::expansion::FileOracle;
use crate::mapping::{Mapping, MappingAssertion};
use crate::name::{is_token, Name};

fn var(l: &mut Line) -> Result<Name> {
    let (s, c) = l.ident()?;
    if s.starts_with(|c: char| c.is_ascii_digit()) {
        return Err(Error::syntax(
            l.line,
            c,
            format!("variable `{s}` must not start with a digit"),
        ));
    }
    Ok(Name::from(s))
}

fn term(l: &mut Line) -> Result<Term> {
    match l.peek() {
        Some(Tok::Str(_)) => match l.next() {
            Some(Tok::Str(s)) => Ok(Term::Const(Name::from(s))),
            _ => unreachable!(),
        },
        _ => Ok(Term::Var(var(l)?)),
    }
}

fn pred(l: &mut Line, rule: NameRule) -> Result<Name> {
    let (s, c) = l.ident()?;
    rule.check(l, &s, c)
}

/// `P` or `P(t1, …, tn)`.
fn atom(l: &mut Line, rule: NameRule) -> Result<Atom> {
    let p = pred(l, rule)?;
    let mut args = Vec::new();
    if l.eat_sym("(") {
        if !l.eat_sym(")") {
            loop {
                args.push(term(l)?);
                if l.eat_sym(")") {
                    break;
                }
                l.expect_sym(",")?;
            }
        }
    }
    Ok(Atom::new(p, args))
}

/// A head `N(x, y)` whose arguments are distinct variables.
fn head(l: &mut Line, rule: NameRule) -> Result<(Name, Vec<Name>)> {
    let col = l.col();
    let a = atom(l, rule)?;
    let mut vars = Vec::new();
    for t in &a.args {
        match t {
            Term::Var(v) if !vars.contains(v) => vars.push(v.clone()),
            _ => {
                return Err(Error::syntax(
                    l.line,
                    col,
                    "head arguments must be distinct variables",
                ))
            }
        }
    }
    Ok((a.pred, vars))
}

/// `a1, …, an, x != y` up to the end of the line or a final `.`.
fn body(l: &mut Line, rule: NameRule, answer: Vec<Name>) -> Result<CQne> {
    let mut q = CQne::new(answer, vec![]);
    loop {
        let is_ineq = matches!(l.peek_at(1), Some(Tok::Sym("!=")));
        if is_ineq {
            let a = var(l)?;
            l.expect_sym("!=")?;
            let col = l.col();
            let b = var(l)?;
            if a == b {
                return Err(Error::syntax(
                    l.line,
                    col,
                    format!("inequality `{a} != {a}`"),
                ));
            }
            q.ineqs.insert(ineq(a, b));
        } else {
            q.push_atom(atom(l, rule)?);
        }
        if !l.eat_sym(",") {
            break;
        }
    }
    Ok(q)
}

fn check_query(l: &Line, q: &CQne) -> Result<()> {
    q.validate().map_err(|e| match e {
        Error::Validation(m) => Error::syntax(l.line, 1, m),
        other => other,
    })
}

fn parse_mapping_with(text: &str, rule: NameRule) -> Result<Mapping> {
    let mut m = Mapping::new();
    for (no, text) in lines(text) {
        let mut l = Line::new(no, text)?;
        if l.eat_sym("|") {
            let Some(last) = m.assertions.last_mut() else {
                return Err(l.err("continuation line without an assertion"));
            };
            let q = body(&mut l, NameRule::USER, last.head_vars.clone())?;
            l.expect_end()?;
            check_query(&l, &q)?;
            last.disjuncts.push(q);
            continue;
        }
        let (target, vars) = head(&mut l, rule)?;
        l.expect_sym(":-")?;
        let q = body(&mut l, NameRule::USER, vars.clone())?;
        l.expect_end()?;
        check_query(&l, &q)?;
        m.push(MappingAssertion::new(target, vars, vec![q]));
    }
    Ok(m)
}

/// Mapping assertions `N(x) :- V1(x,y), V2(y), x != y`, with further
/// disjuncts on lines starting with `|`.
pub fn parse_mapping(text: &str) -> Result<Mapping> {
    parse_mapping_with(text, NameRule::USER)
}

/// Like [`parse_mapping`], also accepting generated target names.
pub fn parse_generated_mapping(text: &str) -> Result<Mapping> {
    parse_mapping_with(text, NameRule::ANY)
}

pub fn write_mapping(m: &Mapping) -> String {
    m.to_string()
}

/// One query per line: `q(x,y) :- A(x), R(x,y), x != y`.
pub fn parse_queries(text: &str) -> Result<Vec<CQne>> {
    let mut out = Vec::new();
    for (no, text) in lines(text) {
        let mut l = Line::new(no, text)?;
        let (_, vars) = head(&mut l, NameRule::ANY)?;
        l.expect_sym(":-")?;
        let q = body(&mut l, NameRule::ANY, vars)?;
        l.expect_end()?;
        check_query(&l, &q)?;
        out.push(q);
    }
    Ok(out)
}

pub fn write_query(q: &CQne) -> String {
    format!(
        "q({}) :- {q}",
        q.answer_vars
            .iter()
            .map(Name::as_str)
            .collect::<Vec<_>>()
            .join(",")
    )
}

pub fn write_queries(qs: &[CQne]) -> String {
    qs.iter().map(|q| write_query(q) + "\n").collect()
}

/// Rules `head :- a1, …, an, x != y.`, one per line.
pub fn parse_program(text: &str) -> Result<Program> {
    let mut p = Program::new();
    for (no, text) in lines(text) {
        let mut l = Line::new(no, text)?;
        let h = atom(&mut l, NameRule::ANY)?;
        l.expect_sym(":-")?;
        let q = body(&mut l, NameRule::ANY, vec![])?;
        l.eat_sym(".");
        l.expect_end()?;
        let r = Rule {
            head: h,
            body: q.atoms,
            ineqs: q.ineqs,
        };
        p.add_rule(r).map_err(|e| match e {
            Error::Validation(m) => Error::syntax(no, 1, m),
            other => other,
        })?;
    }
    Ok(p)
}

pub fn write_program(p: &Program) -> String {
    p.to_string()
}

fn constant(l: &mut Line) -> Result<Name> {
    match l.next() {
        Some(Tok::Ident(s)) | Some(Tok::Str(s)) => Ok(Name::from(s)),
        _ => Err(l.err("expected a constant")),
    }
}

/// Facts `P(c1,…,cn).`, one per line; the final `.` is optional.
pub fn parse_facts(text: &str) -> Result<FactSet> {
    let mut d = FactSet::new();
    let mut arity: BTreeMap<Name, usize> = BTreeMap::new();
    for (no, text) in lines(text) {
        let mut l = Line::new(no, text)?;
        let p = pred(&mut l, NameRule::ANY)?;
        let mut t: Tuple = Vec::new();
        if l.eat_sym("(") && !l.eat_sym(")") {
            loop {
                t.push(constant(&mut l)?);
                if l.eat_sym(")") {
                    break;
                }
                l.expect_sym(",")?;
            }
        }
        l.eat_sym(".");
        l.expect_end()?;
        if *arity.entry(p.clone()).or_insert(t.len()) != t.len() {
            return Err(Error::syntax(no, 1, format!("`{p}` used with two arities")));
        }
        d.insert(p, t);
    }
    Ok(d)
}

/// Comma-separated rows, each a tuple of `pred`.
pub fn parse_csv_facts(pred: &str, text: &str) -> Result<FactSet> {
    let mut d = FactSet::new();
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::syntax(i + 1, 1, e.to_string()))?;
        d.insert(pred, rec.iter().map(Name::from).collect());
    }
    Ok(d)
}

fn write_const(c: &Name) -> String {
    if is_token(c.as_str()) {
        c.to_string()
    } else {
        format!("'{}'", c.as_str().replace('\'', "''"))
    }
}

pub fn write_facts(d: &FactSet) -> String {
    let mut s = String::new();
    for (p, ts) in &d.facts {
        for t in ts {
            if t.is_empty() {
                s.push_str(&format!("{p}.\n"));
            } else {
                let args: Vec<String> = t.iter().map(write_const).collect();
                s.push_str(&format!("{p}({}).\n", args.join(",")));
            }
        }
    }
    s
}

/// View declarations `V_Person/1`, one per line.
pub fn parse_schema(text: &str) -> Result<Signature> {
    let mut s = Signature::new();
    for (no, text) in lines(text) {
        let mut l = Line::new(no, text)?;
        let v = pred(&mut l, NameRule::USER)?;
        l.expect_sym("/")?;
        let col = l.col();
        let n = match l.next() {
            Some(Tok::Ident(n)) => n.parse::<usize>().ok(),
            _ => None,
        };
        let Some(n) = n.filter(|n| (1..=2).contains(n)) else {
            return Err(Error::syntax(no, col, "view arity must be 1 or 2"));
        };
        l.expect_end()?;
        if s.views.insert(v.clone(), n).is_some() {
            return Err(Error::syntax(no, 1, format!("view `{v}` declared twice")));
        }
    }
    Ok(s)
}

pub fn write_schema(s: &Signature) -> String {
    s.views.iter().map(|(v, n)| format!("{v}/{n}\n")).collect()
}

/// `pred: bounded` followed by indented query lines, or `pred: unknown`.
pub fn parse_oracle(source: &str, text: &str) -> Result<FileOracle> {
    let mut o = FileOracle {
        source: source.to_string(),
        entries: BTreeMap::new(),
    };
    let mut current: Option<Name> = None;
    for (no, raw) in lines(text) {
        let mut l = Line::new(no, raw)?;
        if raw.starts_with(char::is_whitespace) {
            let Some(p) = &current else {
                return Err(l.err("query line outside a bounded entry"));
            };
            let (_, vars) = head(&mut l, NameRule::ANY)?;
            l.expect_sym(":-")?;
            let q = body(&mut l, NameRule::ANY, vars)?;
            l.expect_end()?;
            check_query(&l, &q)?;
            if let Some(Some(v)) = o.entries.get_mut(p) {
                v.push(q);
            }
            continue;
        }
        let p = pred(&mut l, NameRule::ANY)?;
        l.expect_sym(":")?;
        let col = l.col();
        let (kind, _) = l.ident()?;
        l.expect_end()?;
        match kind.as_str() {
            "bounded" => {
                o.entries.insert(p.clone(), Some(Vec::new()));
                current = Some(p);
            }
            "unknown" => {
                o.entries.insert(p, None);
                current = None;
            }
            other => {
                return Err(Error::syntax(
                    no,
                    col,
                    format!("expected `bounded` or `unknown`, found `{other}`"),
                ))
            }
        }
    }
    for (p, v) in &o.entries {
        if v.as_ref().is_some_and(Vec::is_empty) {
            return Err(Error::validation(format!(
                "bounded entry for `{p}` lists no query"
            )));
        }
    }
    Ok(o)
}

/// View definitions `V := <source query text>`; indented lines continue the
/// previous definition. The texts are kept verbatim.
pub fn parse_lowlevel(text: &str) -> Result<BTreeMap<Name, String>> {
    let mut out: BTreeMap<Name, String> = BTreeMap::new();
    let mut last: Option<Name> = None;
    for (no, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        if raw.starts_with(char::is_whitespace) {
            let Some(v) = &last else {
                return Err(Error::syntax(
                    no,
                    1,
                    "continuation line without a definition",
                ));
            };
            let d = out.get_mut(v).expect("definition exists");
            d.push('\n');
            d.push_str(raw.trim());
            continue;
        }
        let Some((v, sql)) = raw.split_once(":=") else {
            return Err(Error::syntax(no, 1, "expected `VIEW := query`"));
        };
        let v = v.trim();
        if !crate::name::is_user_name(v) {
            return Err(Error::syntax(no, 1, format!("invalid view name `{v}`")));
        }
        let v = Name::from(v);
        if out.insert(v.clone(), sql.trim().to_string()).is_some() {
            return Err(Error::syntax(no, 1, format!("view `{v}` defined twice")));
        }
        last = Some(v);
    }
    Ok(out)
}
