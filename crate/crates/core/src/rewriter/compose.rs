//! Re-substituting source-query texts for views in a high-level mapping.

use std::collections::BTreeMap;
use std::fmt;

use crate::datalog::{CQne, Term};
use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::name::Name;

/// A mapping assertion whose source is a query text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedAssertion {
    pub head: String,
    pub sql: String,
}

impl fmt::Display for ComposedAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} <-", self.head)?;
        for line in self.sql.lines() {
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

fn quote(c: &Name) -> String {
    format!("'{}'", c.as_str().replace('\'', "''"))
}

/// One `SELECT` over the view texts as derived tables `t0, t1, …` whose
/// columns are named `c1, c2, …`.
fn compose_cq(q: &CQne, defs: &BTreeMap<Name, String>) -> Result<String> {
    let mut from = Vec::new();
    let mut conds = Vec::new();
    let mut first: BTreeMap<&Name, String> = BTreeMap::new();
    for (i, a) in q.atoms.iter().enumerate() {
        let text = defs
            .get(&a.pred)
            .ok_or_else(|| Error::validation(format!("no source query for view `{}`", a.pred)))?;
        let cols: Vec<String> = (1..=a.args.len()).map(|j| format!("c{j}")).collect();
        from.push(format!("({}) AS t{i}({})", text.trim(), cols.join(", ")));
        for (j, t) in a.args.iter().enumerate() {
            let col = format!("t{i}.c{}", j + 1);
            match t {
                Term::Const(c) => conds.push(format!("{col} = {}", quote(c))),
                Term::Var(v) => match first.get(v) {
                    Some(prev) => conds.push(format!("{prev} = {col}")),
                    None => {
                        first.insert(v, col);
                    }
                },
            }
        }
    }
    for (x, y) in &q.ineqs {
        conds.push(format!("{} <> {}", first[x], first[y]));
    }
    let proj: Vec<String> = q
        .answer_vars
        .iter()
        .map(|v| format!("{} AS {v}", first[v]))
        .collect();
    let mut s = format!(
        "SELECT DISTINCT {}\nFROM {}",
        proj.join(", "),
        from.join(",\n     ")
    );
    if !conds.is_empty() {
        s.push_str(&format!("\nWHERE {}", conds.join("\n  AND ")));
    }
    Ok(s)
}

/// For each assertion, the union of its disjuncts with every view replaced
/// by its definition. The definitions are copied verbatim.
pub fn compose_lowlevel(
    m: &Mapping,
    defs: &BTreeMap<Name, String>,
) -> Result<Vec<ComposedAssertion>> {
    let mut out = Vec::new();
    for a in &m.assertions {
        let parts: Vec<String> = a
            .disjuncts
            .iter()
            .map(|q| compose_cq(q, defs))
            .collect::<Result<_>>()?;
        out.push(ComposedAssertion {
            head: a.head_atom().to_string(),
            sql: parts.join("\nUNION\n"),
        });
    }
    Ok(out)
}
