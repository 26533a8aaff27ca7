//! Minimal s-expression reader shared by the formula, model and instance formats.

use std::fmt;

use thiserror::Error;

/// Byte offset plus line/column (both 1-based) in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub offset: usize,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// The head atom of a list, e.g. `rel` in `(rel P (var 0))`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str, SyntaxError> {
        self.as_atom()
            .ok_or_else(|| self.error(format!("expected {what}, found a list")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[Sexp], SyntaxError> {
        self.as_list()
            .ok_or_else(|| self.error(format!("expected {what}, found an atom")))
    }

    pub fn expect_nat(&self, what: &str) -> Result<usize, SyntaxError> {
        let a = self.expect_atom(what)?;
        a.parse::<usize>()
            .map_err(|_| self.error(format!("expected {what} (a natural number), found `{a}`")))
    }
}

struct Reader<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader {
            src,
            chars: src.char_indices().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&mut self) -> Pos {
        let offset = self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len());
        Pos {
            offset,
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(&(_, c)) = self.chars.peek() {
            if c == ';' {
                // comment to end of line
                while let Some(&(_, c)) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, SyntaxError> {
        self.skip_ws();
        let pos = self.pos();
        match self.chars.peek().map(|&(_, c)| c) {
            None => Err(SyntaxError {
                pos,
                msg: "unexpected end of input".into(),
            }),
            Some(')') => Err(SyntaxError {
                pos,
                msg: "unexpected `)`".into(),
            }),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.chars.peek().map(|&(_, c)| c) {
                        None => {
                            return Err(SyntaxError {
                                pos,
                                msg: "unclosed `(`".into(),
                            })
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, pos));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&(_, c)) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, pos))
            }
        }
    }
}

/// Reads every top-level s-expression in `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut r = Reader::new(src);
    let mut out = Vec::new();
    loop {
        r.skip_ws();
        if r.chars.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

/// Reads exactly one s-expression.
pub fn parse_one(src: &str) -> Result<Sexp, SyntaxError> {
    let mut all = parse_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(SyntaxError {
            pos: Pos {
                offset: src.len(),
                line: 1,
                col: 1,
            },
            msg: "empty input".into(),
        }),
        _ => Err(all[1].error("trailing input after expression")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_positions() {
        let s = parse_one("(all\n  (rel P (var 0)))").unwrap();
        assert_eq!(s.head(), Some("all"));
        let inner = &s.as_list().unwrap()[1];
        assert_eq!(inner.pos().line, 2);
        assert_eq!(inner.pos().col, 3);
    }

    #[test]
    fn unclosed_paren_is_error() {
        let e = parse_one("(rel P (var 0)").unwrap_err();
        assert!(e.msg.contains("unclosed"));
    }

    #[test]
    fn comments_are_skipped() {
        let all = parse_all("; header\nbot ; trailing\n").unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].as_atom(), Some("bot"));
    }
}
