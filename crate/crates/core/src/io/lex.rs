//! Line tokenizer shared by the text formats.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// A `'quoted'` constant.
    Str(String),
    Sym(&'static str),
}

const SYMS: [&str; 12] = [
    "<=", ":-", ":=", "!=", "&", ".", "(", ")", ",", "|", ":", "/",
];

/// Tokens of one line, with 1-based columns.
pub struct Line {
    pub line: usize,
    toks: Vec<(Tok, usize)>,
    end_col: usize,
    i: usize,
}

/// Strips a `#` comment that is not inside a quoted constant.
pub fn strip_comment(s: &str) -> &str {
    let mut quoted = false;
    for (i, c) in s.char_indices() {
        match c {
            '\'' => quoted = !quoted,
            '#' if !quoted => return &s[..i],
            _ => {}
        }
    }
    s
}

impl Line {
    pub fn new(line: usize, text: &str) -> Result<Line> {
        let mut toks = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            } else if c == '\'' {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(Error::syntax(line, col, "unterminated quoted constant"))
                        }
                        Some('\'') if chars.get(i + 1) == Some(&'\'') => {
                            s.push('\'');
                            i += 2;
                        }
                        Some('\'') => {
                            i += 1;
                            break;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1;
                        }
                    }
                }
                toks.push((Tok::Str(s), col));
            } else {
                let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
                let Some(sym) = SYMS.iter().find(|s| rest.starts_with(**s)) else {
                    return Err(Error::syntax(
                        line,
                        col,
                        format!("unexpected character `{c}`"),
                    ));
                };
                toks.push((Tok::Sym(sym), col));
                i += sym.chars().count();
            }
        }
        Ok(Line {
            line,
            toks,
            end_col: chars.len() + 1,
            i: 0,
        })
    }

    pub fn col(&self) -> usize {
        self.toks.get(self.i).map_or(self.end_col, |t| t.1)
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::syntax(self.line, self.col(), msg)
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|t| &t.0)
    }

    pub fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_ident(&mut self, s: &str) -> bool {
        if self.is_ident(s) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    /// The next identifier; returns its column as well.
    pub fn ident(&mut self) -> Result<(String, usize)> {
        match self.toks.get(self.i) {
            Some((Tok::Ident(s), c)) => {
                let out = (s.clone(), *c);
                self.i += 1;
                Ok(out)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.0.clone());
        self.i += 1;
        t
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

/// Nonempty lines with comments removed, numbered from 1.
pub fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.trim().is_empty())
}
