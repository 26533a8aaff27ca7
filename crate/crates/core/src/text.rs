//! Reading formulas and signatures from the s-expression surface syntax.
//!
//! ```text
//! term    ::= (var i) | (app f term ...)
//! formula ::= bot | (rel P term ...) | (impl a b) | (and a b) | (or a b)
//!           | (all a) | (ex a)
//! header  ::= (signature (funcs (name arity) ...) (rels (name arity) ...))
//! ```

use thiserror::Error;

use crate::sexp::{self, Pos, Sexp, SyntaxError};
use crate::syntax::{BinOp, Formula, Quantifier, Signature, SignatureError, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown {kind} symbol `{name}` at {pos}")]
    UnknownSymbol {
        kind: &'static str,
        name: String,
        pos: Pos,
    },
    #[error("arity mismatch at {pos}: `{name}` expects {expected} arguments, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        pos: Pos,
    },
    #[error("invalid signature: {0}")]
    Signature(#[from] SignatureError),
}

pub fn parse_term(s: &Sexp, sig: &Signature) -> Result<Term, ParseError> {
    let items = s.expect_list("a term")?;
    match s.head() {
        Some("var") => {
            if items.len() != 2 {
                return Err(s.error("`var` takes exactly one index").into());
            }
            Ok(Term::Var(items[1].expect_nat("a variable index")?))
        }
        Some("app") => {
            let name_s = items.get(1).ok_or_else(|| s.error("`app` needs a function name"))?;
            let name = name_s.expect_atom("a function name")?;
            let f = sig.find_func(name).ok_or_else(|| ParseError::UnknownSymbol {
                kind: "function",
                name: name.to_string(),
                pos: name_s.pos(),
            })?;
            let args = items[2..]
                .iter()
                .map(|a| parse_term(a, sig))
                .collect::<Result<Vec<_>, _>>()?;
            let arity = sig.func(f).arity;
            if args.len() != arity {
                return Err(ParseError::Arity {
                    name: name.to_string(),
                    expected: arity,
                    found: args.len(),
                    pos: s.pos(),
                });
            }
            Ok(Term::App(f, args))
        }
        _ => Err(s.error("expected `(var i)` or `(app f ...)`").into()),
    }
}

pub fn parse_formula_sexp(s: &Sexp, sig: &Signature) -> Result<Formula, ParseError> {
    if let Some(a) = s.as_atom() {
        return match a {
            "bot" => Ok(Formula::Bot),
            _ => Err(s.error(format!("unexpected atom `{a}` where a formula was expected")).into()),
        };
    }
    let items = s.expect_list("a formula")?;
    let head = s
        .head()
        .ok_or_else(|| s.error("formula list must start with a keyword"))?;
    let expect_len = |n: usize| -> Result<(), ParseError> {
        if items.len() != n {
            Err(s.error(format!("`{head}` takes {} operand(s)", n - 1)).into())
        } else {
            Ok(())
        }
    };
    match head {
        "rel" => {
            let name_s = items.get(1).ok_or_else(|| s.error("`rel` needs a relation name"))?;
            let name = name_s.expect_atom("a relation name")?;
            let p = sig.find_rel(name).ok_or_else(|| ParseError::UnknownSymbol {
                kind: "relation",
                name: name.to_string(),
                pos: name_s.pos(),
            })?;
            let args = items[2..]
                .iter()
                .map(|a| parse_term(a, sig))
                .collect::<Result<Vec<_>, _>>()?;
            let arity = sig.rel(p).arity;
            if args.len() != arity {
                return Err(ParseError::Arity {
                    name: name.to_string(),
                    expected: arity,
                    found: args.len(),
                    pos: s.pos(),
                });
            }
            Ok(Formula::Atom(p, args))
        }
        "impl" | "and" | "or" => {
            expect_len(3)?;
            let op = match head {
                "impl" => BinOp::Impl,
                "and" => BinOp::And,
                _ => BinOp::Or,
            };
            Ok(Formula::Bin(
                op,
                Box::new(parse_formula_sexp(&items[1], sig)?),
                Box::new(parse_formula_sexp(&items[2], sig)?),
            ))
        }
        "all" | "ex" => {
            expect_len(2)?;
            let q = if head == "all" { Quantifier::All } else { Quantifier::Ex };
            Ok(Formula::Quant(q, Box::new(parse_formula_sexp(&items[1], sig)?)))
        }
        other => Err(s.error(format!("unknown formula keyword `{other}`")).into()),
    }
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula_sexp(&sexp::parse_one(text)?, sig)
}

fn parse_symbol_table(s: &Sexp, kw: &str) -> Result<Vec<(String, usize)>, ParseError> {
    let items = s.expect_list(kw)?;
    if s.head() != Some(kw) {
        return Err(s.error(format!("expected `({kw} ...)`")).into());
    }
    items[1..]
        .iter()
        .map(|e| {
            let pair = e.expect_list("a `(name arity)` entry")?;
            if pair.len() != 2 {
                return Err(e.error("expected `(name arity)`").into());
            }
            Ok((
                pair[0].expect_atom("a symbol name")?.to_string(),
                pair[1].expect_nat("an arity")?,
            ))
        })
        .collect()
}

pub fn parse_signature_sexp(s: &Sexp) -> Result<Signature, ParseError> {
    let items = s.expect_list("a signature")?;
    if s.head() != Some("signature") {
        return Err(s.error("expected `(signature ...)`").into());
    }
    let mut funcs = Vec::new();
    let mut rels = Vec::new();
    for part in &items[1..] {
        match part.head() {
            Some("funcs") => funcs.extend(parse_symbol_table(part, "funcs")?),
            Some("rels") => rels.extend(parse_symbol_table(part, "rels")?),
            _ => return Err(part.error("expected `(funcs ...)` or `(rels ...)`").into()),
        }
    }
    Ok(Signature::from_symbols(&funcs, &rels)?)
}

pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    parse_signature_sexp(&sexp::parse_one(text)?)
}

/// A formula file: signature header followed by one formula.
pub fn parse_document(text: &str) -> Result<(Signature, Formula), ParseError> {
    let all = sexp::parse_all(text)?;
    match all.as_slice() {
        [h, f] => {
            let sig = parse_signature_sexp(h)?;
            let phi = parse_formula_sexp(f, &sig)?;
            Ok((sig, phi))
        }
        [] => Err(SyntaxError {
            pos: Pos {
                offset: 0,
                line: 1,
                col: 1,
            },
            msg: "empty formula file".into(),
        }
        .into()),
        [only] => Err(only
            .error("expected a `(signature ...)` header followed by a formula")
            .into()),
        [_, _, extra, ..] => Err(extra.error("trailing input after formula").into()),
    }
}
