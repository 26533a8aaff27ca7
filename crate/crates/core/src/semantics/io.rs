//! Model and assignment files.
//!
//! ```text
//! (model (size k)
//!   (fun f (a1 ... an) v) ...        ; one entry per argument vector
//!   (rel P (a1 ... an) ...))         ; exactly the true tuples
//! (env e0 e1 ... (default d))
//! ```

use thiserror::Error;

use super::{grid_size, index_tuple, tuple_index, Assignment, FiniteModel, ModelError};
use crate::sexp::{self, Sexp, SyntaxError};
use crate::syntax::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelFileError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("function `{name}` is not total: no entry for {missing:?}")]
    NotTotal { name: String, missing: Vec<usize> },
    #[error("function `{name}` has two entries for {args:?}")]
    DuplicateEntry { name: String, args: Vec<usize> },
}

fn nat_list(s: &Sexp, what: &str) -> Result<Vec<usize>, SyntaxError> {
    s.expect_list(what)?
        .iter()
        .map(|e| e.expect_nat("a domain element"))
        .collect()
}

fn check_elem(s: &Sexp, v: usize, size: usize) -> Result<usize, ModelFileError> {
    if v >= size {
        Err(s.error(format!("element {v} out of range for domain of size {size}")).into())
    } else {
        Ok(v)
    }
}

pub fn parse_model_sexp(s: &Sexp, sig: &Signature) -> Result<FiniteModel, ModelFileError> {
    let items = s.expect_list("a model")?;
    if s.head() != Some("model") {
        return Err(s.error("expected `(model ...)`").into());
    }
    let size_s = items.get(1).ok_or_else(|| s.error("missing `(size k)`"))?;
    let size = match size_s.as_list() {
        Some([kw, k]) if kw.as_atom() == Some("size") => k.expect_nat("a domain size")?,
        _ => return Err(size_s.error("expected `(size k)`").into()),
    };
    let mut m = FiniteModel::new(sig, size)?;
    let mut seen: Vec<Vec<bool>> = sig
        .funcs()
        .iter()
        .map(|f| vec![false; grid_size(size, f.arity)])
        .collect();
    for entry in &items[2..] {
        let parts = entry.expect_list("a table entry")?;
        match entry.head() {
            Some("fun") => {
                if parts.len() != 4 {
                    return Err(entry.error("expected `(fun f (args) value)`").into());
                }
                let name = parts[1].expect_atom("a function name")?;
                let f = sig
                    .find_func(name)
                    .ok_or_else(|| parts[1].error(format!("unknown function symbol `{name}`")))?;
                let args = nat_list(&parts[2], "an argument vector")?;
                if args.len() != sig.func(f).arity {
                    return Err(parts[2]
                        .error(format!("`{name}` expects {} arguments", sig.func(f).arity))
                        .into());
                }
                for &a in &args {
                    check_elem(&parts[2], a, size)?;
                }
                let v = check_elem(&parts[3], parts[3].expect_nat("a function value")?, size)?;
                let i = tuple_index(size, &args);
                if std::mem::replace(&mut seen[f.0][i], true) {
                    return Err(ModelFileError::DuplicateEntry {
                        name: name.to_string(),
                        args,
                    });
                }
                m.func_table_mut(f)[i] = v;
            }
            Some("rel") => {
                let name_s = parts.get(1).ok_or_else(|| entry.error("missing relation name"))?;
                let name = name_s.expect_atom("a relation name")?;
                let p = sig
                    .find_rel(name)
                    .ok_or_else(|| name_s.error(format!("unknown relation symbol `{name}`")))?;
                for t in &parts[2..] {
                    let args = nat_list(t, "a tuple")?;
                    if args.len() != sig.rel(p).arity {
                        return Err(t
                            .error(format!("`{name}` expects {} arguments", sig.rel(p).arity))
                            .into());
                    }
                    for &a in &args {
                        check_elem(t, a, size)?;
                    }
                    m.set_rel(p, &args, true);
                }
            }
            _ => return Err(entry.error("expected `(fun ...)` or `(rel ...)`").into()),
        }
    }
    for (f, seen) in sig.funcs().iter().zip(&seen) {
        if let Some(i) = seen.iter().position(|b| !b) {
            return Err(ModelFileError::NotTotal {
                name: f.name.clone(),
                missing: index_tuple(size, f.arity, i),
            });
        }
    }
    Ok(m)
}

pub fn parse_assignment_sexp(s: &Sexp) -> Result<Assignment, SyntaxError> {
    let items = s.expect_list("an assignment")?;
    if s.head() != Some("env") {
        return Err(s.error("expected `(env ...)`"));
    }
    let mut prefix = Vec::new();
    let mut default = 0;
    for (j, e) in items[1..].iter().enumerate() {
        match e.as_list() {
            Some([kw, d]) if kw.as_atom() == Some("default") && j == items.len() - 2 => {
                default = d.expect_nat("a default element")?;
            }
            _ => prefix.push(e.expect_nat("a domain element")?),
        }
    }
    Ok(Assignment { prefix, default })
}

pub fn parse_assignment(text: &str) -> Result<Assignment, SyntaxError> {
    parse_assignment_sexp(&sexp::parse_one(text)?)
}

/// Parses a model file, optionally followed by an `(env ...)` form.
pub fn parse_model(
    text: &str,
    sig: &Signature,
) -> Result<(FiniteModel, Option<Assignment>), ModelFileError> {
    let all = sexp::parse_all(text)?;
    let (first, rest) = all.split_first().ok_or_else(|| SyntaxError {
        pos: sexp::Pos {
            offset: 0,
            line: 1,
            col: 1,
        },
        msg: "empty model file".into(),
    })?;
    let m = parse_model_sexp(first, sig)?;
    let env = match rest {
        [] => None,
        [e] => {
            let env = parse_assignment_sexp(e)?;
            env.check(m.size())?;
            Some(env)
        }
        [_, extra, ..] => return Err(extra.error("trailing input after model").into()),
    };
    Ok((m, env))
}

pub fn print_model(m: &FiniteModel) -> String {
    let k = m.size();
    let sig = m.signature();
    let mut out = format!("(model (size {k})");
    let tuple = |t: &[usize]| {
        let s: Vec<String> = t.iter().map(|v| v.to_string()).collect();
        format!("({})", s.join(" "))
    };
    for f in sig.func_ids() {
        let sym = sig.func(f);
        for (i, &v) in m.func_table(f).iter().enumerate() {
            out.push_str(&format!(
                "\n  (fun {} {} {v})",
                sym.name,
                tuple(&index_tuple(k, sym.arity, i))
            ));
        }
    }
    for p in sig.rel_ids() {
        let sym = sig.rel(p);
        out.push_str(&format!("\n  (rel {}", sym.name));
        for t in m.true_tuples(p) {
            out.push(' ');
            out.push_str(&tuple(&t));
        }
        out.push(')');
    }
    out.push_str(")\n");
    out
}

pub fn print_assignment(env: &Assignment) -> String {
    let mut out = String::from("(env");
    for v in &env.prefix {
        out.push_str(&format!(" {v}"));
    }
    out.push_str(&format!(" (default {}))\n", env.default));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{FuncId, RelId};

    fn sig() -> Signature {
        Signature::from_symbols(&[("f", 1), ("c", 0)], &[("P", 2), ("Q", 0)]).unwrap()
    }

    #[test]
    fn round_trip() {
        let s = sig();
        let mut m = FiniteModel::new(&s, 3).unwrap();
        m.fill_func(FuncId(0), |t| (t[0] + 1) % 3);
        m.set_func(FuncId(1), &[], 2);
        m.set_rel(RelId(0), &[0, 2], true);
        m.set_rel(RelId(1), &[], true);
        let env = Assignment::new(vec![1, 2], 0);
        let text = format!("{}{}", print_model(&m), print_assignment(&env));
        let (m2, env2) = parse_model(&text, &s).unwrap();
        assert_eq!(m2, m);
        assert_eq!(env2, Some(env));
    }

    #[test]
    fn totality_checked() {
        let text = "(model (size 2) (fun f (0) 1) (fun c () 0))";
        assert!(matches!(
            parse_model(text, &sig()),
            Err(ModelFileError::NotTotal { missing, .. }) if missing == vec![1]
        ));
    }

    #[test]
    fn out_of_range_rejected() {
        let text = "(model (size 2) (fun f (0) 1) (fun f (1) 5) (fun c () 0))";
        assert!(matches!(parse_model(text, &sig()), Err(ModelFileError::Syntax(_))));
    }

    #[test]
    fn env_with_default() {
        let env = parse_assignment("(env 0 2 (default 1))").unwrap();
        assert_eq!(env, Assignment::new(vec![0, 2], 1));
    }
}
