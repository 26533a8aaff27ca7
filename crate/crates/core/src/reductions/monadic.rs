//! Eliminating unary functions in favour of word-indexed unary predicates.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Builder, ReductionError, ReductionResult};
use crate::semantics::{FiniteModel, Interpretation};
use crate::syntax::{Formula, FuncId, RelId, Signature, Term};

/// Function symbols applied to a variable, outermost first.
type Word = Vec<FuncId>;

fn decompose(t: &Term) -> (Word, usize) {
    match t {
        Term::Var(i) => (Vec::new(), *i),
        Term::App(f, args) => {
            let (mut w, x) = decompose(&args[0]);
            w.insert(0, *f);
            (w, x)
        }
    }
}

fn word_name(sig: &Signature, p: RelId, w: &[FuncId]) -> String {
    let fs: Vec<&str> = w.iter().map(|f| sig.func(*f).name.as_str()).collect();
    format!("{}@{}", sig.rel(p).name, fs.join("."))
}

/// Replaces `P(f1(...fk(x)))` by `P@f1...fk(x)`.
///
/// For each function `g` an axiom states that every `x` has a `y` (the
/// intended `g(x)`) with `P@w.g(x) <-> P@w(y)` for all tracked words; the
/// word sets are closed under dropping the innermost letter, which makes
/// the backward direction go through by induction on word length.
pub fn monadic_fun_elim(sig: &Signature, phi: &Formula) -> Result<ReductionResult, ReductionError> {
    if let Some(s) = sig.funcs().iter().chain(sig.rels()).find(|s| s.arity != 1) {
        return Err(ReductionError::Precondition(format!(
            "symbol `{}` has arity {}, expected uniform arity 1",
            s.name, s.arity
        )));
    }
    let mut words: Vec<BTreeSet<(usize, Word)>> = vec![BTreeSet::from([(0, Vec::new())]); sig.rels().len()];
    phi.map_atoms(&mut |p, args, _| {
        let (w, _) = decompose(&args[0]);
        for len in 0..=w.len() {
            words[p.0].insert((len, w[..len].to_vec()));
        }
        Formula::Bot
    });
    let mut out = Signature::new();
    let mut ids: Vec<Vec<(Word, RelId)>> = Vec::new();
    for p in sig.rel_ids() {
        let mut row = Vec::new();
        for (_, w) in &words[p.0] {
            row.push((w.clone(), out.add_rel(&word_name(sig, p, w), 1)?));
        }
        ids.push(row);
    }
    let lookup = move |ids: &[Vec<(Word, RelId)>], p: RelId, w: &[FuncId]| {
        ids[p.0].iter().find(|(v, _)| v == w).map(|(_, r)| *r).expect("tracked word")
    };
    let body = phi.map_atoms(&mut |p, args, _| {
        let (w, x) = decompose(&args[0]);
        Formula::Atom(lookup(&ids, p, &w), vec![Term::Var(x)])
    });
    // (function, [(longer word relation, shorter word relation)])
    let links: Vec<(FuncId, Vec<(RelId, RelId)>)> = sig
        .func_ids()
        .map(|g| {
            let mut pairs = Vec::new();
            for row in &ids {
                for (w, r) in row {
                    if w.last() == Some(&g) {
                        let shorter = row.iter().find(|(v, _)| v[..] == w[..w.len() - 1]).expect("prefix closed").1;
                        pairs.push((*r, shorter));
                    }
                }
            }
            (g, pairs)
        })
        .collect();
    let b = Builder::at(0);
    let axioms = links.iter().filter(|(_, pairs)| !pairs.is_empty()).map(|(_, pairs)| {
        b.all(|b, x| {
            b.ex(|b, y| Formula::conj(pairs.iter().map(|&(long, short)| Formula::iff(b.atom(long, &[x]), b.atom(short, &[y])))))
        })
    });
    let formula = Formula::and(body, Formula::conj(axioms));

    let (src, out1, ids1) = (sig.clone(), out.clone(), ids.clone());
    let forward = Arc::new(move |i: &Interpretation| {
        let mut m = FiniteModel::new(&out1, i.model.size())?;
        for p in src.rel_ids() {
            for (w, r) in &ids1[p.0] {
                m.fill_rel(*r, |t| {
                    let y = w.iter().rev().fold(t[0], |y, f| i.model.apply(*f, &[y]));
                    i.model.holds(p, &[y])
                });
            }
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    let src = sig.clone();
    let backward = Arc::new(move |i: &Interpretation| {
        let k = i.model.size();
        let mut m = FiniteModel::new(&src, k)?;
        for p in src.rel_ids() {
            let base = lookup(&ids, p, &[]);
            m.fill_rel(p, |t| i.model.holds(base, t));
        }
        for (g, pairs) in &links {
            for x in 0..k {
                let y = (0..k)
                    .find(|&y| pairs.iter().all(|&(long, short)| i.model.holds(long, &[x]) == i.model.holds(short, &[y])))
                    .ok_or_else(|| ReductionError::Transport(format!("no image for `{}` at {x}", src.func(*g).name)))?;
                m.set_func(*g, &[x], y);
            }
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    Ok(ReductionResult::stage("monadic-fun-elim", (sig, phi), out, formula, forward, backward))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print_formula;
    use crate::text::parse_formula;

    fn sig() -> Signature {
        Signature::from_symbols(&[("f", 1), ("g", 1)], &[("P", 1)]).unwrap()
    }

    #[test]
    fn words_name_relations() {
        let s = sig();
        let phi = parse_formula("(rel P (var 0))", &s).unwrap();
        let r = monadic_fun_elim(&s, &phi).unwrap();
        assert_eq!(print_formula(&r.formula, &r.sig), "(and (rel P@ (var 0)) (impl bot bot))");
        let phi = parse_formula("(rel P (app f (app g (var 0))))", &s).unwrap();
        let r = monadic_fun_elim(&s, &phi).unwrap();
        let names: Vec<_> = r.sig.rels().iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["P@", "P@f", "P@f.g"]);
        match &r.formula {
            Formula::Bin(_, a, _) => assert_eq!(print_formula(a, &r.sig), "(rel P@f.g (var 0))"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn transports_round_trip() {
        let s = sig();
        let phi = parse_formula(
            "(all (and (rel P (app f (app g (var 0)))) (impl (rel P (app g (var 0))) bot)))",
            &s,
        )
        .unwrap();
        let r = monadic_fun_elim(&s, &phi).unwrap();
        // P = {0}; g = const 1; f = const 0
        let mut m = FiniteModel::new(&s, 2).unwrap();
        m.set_rel(RelId(0), &[0], true);
        m.fill_func(FuncId(0), |_| 0);
        m.fill_func(FuncId(1), |_| 1);
        let src = Interpretation::closed(m);
        assert!(src.satisfies(&phi));
        let fwd = r.forward(&src).unwrap();
        assert!(fwd.satisfies(&r.formula));
        assert!(r.backward(&fwd).unwrap().satisfies(&phi));
    }

    #[test]
    fn rejects_binary_symbols() {
        let s = Signature::from_symbols::<&str>(&[], &[("R", 2)]).unwrap();
        assert!(monadic_fun_elim(&s, &Formula::Bot).is_err());
    }
}
