//! Minimal S-expression reader and writer for the parse and patternset artifacts.

use std::fmt;

use crate::error::{format_err, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Sexpr {
    Atom(String),
    /// Quoted string; written with `"` and backslash escapes.
    Str(String),
    List(Vec<Sexpr>),
}

impl Sexpr {
    pub fn atom(s: impl Into<String>) -> Self {
        Sexpr::Atom(s.into())
    }

    pub fn str(s: impl Into<String>) -> Self {
        Sexpr::Str(s.into())
    }

    pub fn list(items: Vec<Sexpr>) -> Self {
        Sexpr::List(items)
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(v) => Some(v),
            _ => None,
        }
    }

    /// Text of an atom or string.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s) | Sexpr::Str(s) => Some(s),
            Sexpr::List(_) => None,
        }
    }

    /// A list whose first element is the atom `head`.
    pub fn is_form(&self, head: &str) -> bool {
        matches!(self.as_list(), Some([Sexpr::Atom(h), ..]) if h == head)
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => f.write_str(a),
            Sexpr::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Sexpr::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parse every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexpr>> {
    const WHAT: &str = "s-expression";
    let mut stack: Vec<Vec<Sexpr>> = Vec::new();
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = text.chars().peekable();
    let push = |stack: &mut Vec<Vec<Sexpr>>, out: &mut Vec<Sexpr>, e: Sexpr| match stack.last_mut() {
        Some(top) => top.push(e),
        None => out.push(e),
    };
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        break;
                    }
                }
            }
            '(' => stack.push(Vec::new()),
            ')' => {
                let items = stack
                    .pop()
                    .ok_or_else(|| format_err(WHAT, line, "unbalanced `)`"))?;
                push(&mut stack, &mut out, Sexpr::List(items));
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => return Err(format_err(WHAT, line, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some('n') => s.push('\n'),
                            Some(e) => s.push(e),
                            None => return Err(format_err(WHAT, line, "dangling escape")),
                        },
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch)
                        }
                    }
                }
                push(&mut stack, &mut out, Sexpr::Str(s));
            }
            c => {
                let mut s = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == '"' {
                        break;
                    }
                    s.push(n);
                    chars.next();
                }
                push(&mut stack, &mut out, Sexpr::Atom(s));
            }
        }
    }
    if !stack.is_empty() {
        return Err(format_err(WHAT, line, "unbalanced `(`"));
    }
    Ok(out)
}
