//! Stages that rename, drop, or eliminate function symbols.

use std::collections::HashSet;
use std::sync::Arc;

use super::{Builder, LTerm, Lv, ReductionError, ReductionResult};
use crate::semantics::{tuples, FiniteModel, Interpretation};
use crate::syntax::{map_symbols, Formula, FuncId, Quantifier, RelId, Signature, Term};

fn copy_func(from: &FiniteModel, f: FuncId, to: &mut FiniteModel, g: FuncId) {
    to.func_table_mut(g).copy_from_slice(from.func_table(f));
}

fn copy_rel(from: &FiniteModel, p: RelId, to: &mut FiniteModel, q: RelId) {
    to.rel_table_mut(q).copy_from_slice(from.rel_table(p));
}

/// Restricts the signature to the occurring symbols, numbered densely.
pub fn sig_gc(sig: &Signature, phi: &Formula) -> Result<ReductionResult, ReductionError> {
    let (fs, ps) = phi.syms();
    let mut out = Signature::new();
    for &f in &fs {
        out.add_func(&sig.func(f).name, sig.func(f).arity)?;
    }
    for &p in &ps {
        out.add_rel(&sig.rel(p).name, sig.rel(p).arity)?;
    }
    let fpos = |f: FuncId| FuncId(fs.iter().position(|&g| g == f).expect("occurring"));
    let ppos = |p: RelId| RelId(ps.iter().position(|&q| q == p).expect("occurring"));
    let formula = map_symbols(phi, sig, &out, &fpos, &ppos)?;

    let (fs1, ps1, out1) = (fs.clone(), ps.clone(), out.clone());
    let forward = Arc::new(move |i: &Interpretation| {
        let mut m = FiniteModel::new(&out1, i.model.size())?;
        for (j, &f) in fs1.iter().enumerate() {
            copy_func(&i.model, f, &mut m, FuncId(j));
        }
        for (j, &p) in ps1.iter().enumerate() {
            copy_rel(&i.model, p, &mut m, RelId(j));
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    let src = sig.clone();
    let backward = Arc::new(move |i: &Interpretation| {
        let mut m = FiniteModel::new(&src, i.model.size())?;
        for (j, &f) in fs.iter().enumerate() {
            copy_func(&i.model, FuncId(j), &mut m, f);
        }
        for (j, &p) in ps.iter().enumerate() {
            copy_rel(&i.model, RelId(j), &mut m, p);
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    Ok(ReductionResult::stage("sig-gc", (sig, phi), out, formula, forward, backward))
}

/// Replaces each function by its graph relation.
///
/// The output reads its first relation as identity; pair it with
/// [`super::eq_elim`] to obtain a plain satisfiability instance.
pub fn fun_elim(sig: &Signature, phi: &Formula) -> Result<ReductionResult, ReductionError> {
    let mut taken: HashSet<String> = sig.rels().iter().map(|s| s.name.clone()).collect();
    let mut fresh = |base: &str| {
        let name = if taken.contains(base) {
            (1..).map(|i| format!("{base}_{i}")).find(|n| !taken.contains(n)).unwrap()
        } else {
            base.to_string()
        };
        taken.insert(name.clone());
        name
    };
    let mut out = Signature::new();
    let eq = out.add_rel(&fresh("eq"), 2)?;
    let nf = sig.funcs().len();
    let graphs: Vec<RelId> = sig
        .funcs()
        .iter()
        .map(|f| out.add_rel(&fresh(&f.name), f.arity + 1))
        .collect::<Result<_, _>>()?;
    for p in sig.rels() {
        out.add_rel(&p.name, p.arity)?;
    }
    let rel = move |p: RelId| RelId(1 + nf + p.0);

    let body = phi.map_atoms(&mut |p, args, depth| {
        let b = Builder::at(depth);
        let args: Vec<LTerm> = args.iter().map(|t| b.lterm(t)).collect();
        flatten(b, rel(p), &args, &graphs, eq)
    });
    let b = Builder::at(0);
    let mut axioms = Vec::new();
    for (f, sym) in sig.funcs().iter().enumerate() {
        let g = graphs[f];
        let a = sym.arity;
        axioms.push(b.quant_n(Quantifier::All, a, |b, xs| {
            b.ex(|b, y| b.atom(g, &[xs, &[y]].concat()))
        }));
        axioms.push(b.quant_n(Quantifier::All, a + 2, |b, v| {
            let (xs, yz) = v.split_at(a);
            Formula::imp_chain(
                [b.atom(g, &[xs, &yz[..1]].concat()), b.atom(g, &[xs, &yz[1..]].concat())],
                b.atom(eq, yz),
            )
        }));
    }
    let formula = Formula::and(body, Formula::conj(axioms));

    let (src, out1, graphs1) = (sig.clone(), out.clone(), graphs.clone());
    let forward = Arc::new(move |i: &Interpretation| {
        let k = i.model.size();
        let mut m = FiniteModel::new(&out1, k)?;
        m.fill_rel(eq, |t| t[0] == t[1]);
        for (f, &g) in graphs1.iter().enumerate() {
            m.fill_rel(g, |t| {
                let (xs, y) = t.split_at(t.len() - 1);
                i.model.apply(FuncId(f), xs) == y[0]
            });
        }
        for p in src.rel_ids() {
            copy_rel(&i.model, p, &mut m, rel(p));
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    let src = sig.clone();
    let backward = Arc::new(move |i: &Interpretation| {
        let k = i.model.size();
        for t in tuples(k, 2) {
            if i.model.holds(eq, &t) != (t[0] == t[1]) {
                return Err(ReductionError::Transport("equality symbol is not the identity".into()));
            }
        }
        let mut m = FiniteModel::new(&src, k)?;
        for f in src.func_ids() {
            let g = graphs[f.0];
            for xs in tuples(k, src.func(f).arity) {
                let y = (0..k)
                    .find(|&y| i.model.holds(g, &[xs.as_slice(), &[y]].concat()))
                    .ok_or_else(|| ReductionError::Transport(format!("graph of `{}` is not total", src.func(f).name)))?;
                m.set_func(f, &xs, y);
            }
        }
        for p in src.rel_ids() {
            copy_rel(&i.model, rel(p), &mut m, p);
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    let mut r = ReductionResult::stage("fun-elim", (sig, phi), out, formula, forward, backward);
    r.equality = Some(eq);
    Ok(r)
}

/// `P(t1..tn)` with every compound argument named by an existential, innermost first.
fn flatten(b: Builder, p: RelId, args: &[LTerm], graphs: &[RelId], eq: RelId) -> Formula {
    let compound: Vec<usize> = (0..args.len()).filter(|&i| matches!(args[i], LTerm::App(..))).collect();
    if compound.is_empty() {
        return b.atom(p, &args.iter().map(as_var).collect::<Vec<_>>());
    }
    b.quant_n(Quantifier::Ex, compound.len(), |b, ys| {
        let mut slots: Vec<Lv> = Vec::with_capacity(args.len());
        let mut defs = Vec::new();
        for (i, a) in args.iter().enumerate() {
            match compound.iter().position(|&c| c == i) {
                Some(j) => {
                    defs.push(defines(b, a, ys[j], graphs, eq));
                    slots.push(ys[j]);
                }
                None => slots.push(as_var(a)),
            }
        }
        defs.push(b.atom(p, &slots));
        Formula::conj(defs)
    })
}

fn as_var(t: &LTerm) -> Lv {
    match t {
        LTerm::Var(x) => *x,
        LTerm::App(..) => unreachable!("compound argument"),
    }
}

/// A formula stating `x = t` over the graph relations.
fn defines(b: Builder, t: &LTerm, x: Lv, graphs: &[RelId], eq: RelId) -> Formula {
    match t {
        LTerm::Var(y) => b.atom(eq, &[x, *y]),
        LTerm::App(f, args) => {
            let mut extended = args.clone();
            extended.push(LTerm::Var(x));
            flatten(b, graphs[f.0], &extended, graphs, eq)
        }
    }
}

/// Replaces constants by fresh free variables above the formula's own.
pub fn const_elim(sig: &Signature, phi: &Formula) -> Result<ReductionResult, ReductionError> {
    if let Some(f) = sig.funcs().iter().find(|f| f.arity != 0) {
        return Err(ReductionError::Precondition(format!(
            "function `{}` has arity {}, only constants can be eliminated",
            f.name, f.arity
        )));
    }
    let base = phi.fresh_var();
    let formula = phi.map_terms(0, &|t, depth| match t {
        Term::App(c, _) => Term::Var(base + c.0 + depth),
        v => v.clone(),
    });
    let mut out = Signature::new();
    for p in sig.rels() {
        out.add_rel(&p.name, p.arity)?;
    }
    let nc = sig.funcs().len();
    let out1 = out.clone();
    let forward = Arc::new(move |i: &Interpretation| {
        let mut m = FiniteModel::new(&out1, i.model.size())?;
        for p in out1.rel_ids() {
            copy_rel(&i.model, p, &mut m, p);
        }
        let mut env = i.env.clone();
        for c in 0..nc {
            env.set(base + c, i.model.apply(FuncId(c), &[]));
        }
        Ok(Interpretation::new(m, env))
    });
    let src = sig.clone();
    let backward = Arc::new(move |i: &Interpretation| {
        let mut m = FiniteModel::new(&src, i.model.size())?;
        for p in src.rel_ids() {
            copy_rel(&i.model, p, &mut m, p);
        }
        for c in 0..nc {
            m.set_func(FuncId(c), &[], i.env.get(base + c));
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    Ok(ReductionResult::stage("const-elim", (sig, phi), out, formula, forward, backward))
}

/// Gives every nullary symbol one argument, filled with a fresh variable.
pub fn zero_arity_lift(sig: &Signature, phi: &Formula) -> Result<ReductionResult, ReductionError> {
    if let Some(s) = sig.funcs().iter().chain(sig.rels()).find(|s| s.arity > 1) {
        return Err(ReductionError::Precondition(format!(
            "symbol `{}` has arity {} > 1",
            s.name, s.arity
        )));
    }
    let base = phi.fresh_var();
    let mut out = Signature::new();
    for f in sig.funcs() {
        out.add_func(&f.name, 1)?;
    }
    for p in sig.rels() {
        out.add_rel(&p.name, 1)?;
    }
    fn lift_term(t: &Term, x0: usize) -> Term {
        match t {
            Term::Var(i) => Term::Var(*i),
            Term::App(f, args) if args.is_empty() => Term::App(*f, vec![Term::Var(x0)]),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| lift_term(a, x0)).collect()),
        }
    }
    let formula = phi.map_atoms(&mut |p, args, depth| {
        let x0 = base + depth;
        if args.is_empty() {
            Formula::Atom(p, vec![Term::Var(x0)])
        } else {
            Formula::Atom(p, args.iter().map(|t| lift_term(t, x0)).collect())
        }
    });
    let (src, out1) = (sig.clone(), out.clone());
    let forward = Arc::new(move |i: &Interpretation| {
        let mut m = FiniteModel::new(&out1, i.model.size())?;
        for f in src.func_ids() {
            let nullary = src.func(f).arity == 0;
            m.fill_func(f, |t| i.model.apply(f, if nullary { &[] } else { t }));
        }
        for p in src.rel_ids() {
            let nullary = src.rel(p).arity == 0;
            m.fill_rel(p, |t| i.model.holds(p, if nullary { &[] } else { t }));
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    let src = sig.clone();
    let backward = Arc::new(move |i: &Interpretation| {
        let x0 = [i.env.get(base)];
        let mut m = FiniteModel::new(&src, i.model.size())?;
        for f in src.func_ids() {
            let nullary = src.func(f).arity == 0;
            m.fill_func(f, |t| i.model.apply(f, if nullary { &x0 } else { t }));
        }
        for p in src.rel_ids() {
            let nullary = src.rel(p).arity == 0;
            m.fill_rel(p, |t| i.model.holds(p, if nullary { &x0 } else { t }));
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    Ok(ReductionResult::stage("zero-lift", (sig, phi), out, formula, forward, backward))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{fsat_on_domain, fsateq_on_domain, SearchConfig};
    use crate::syntax::print_formula;
    use crate::text::parse_formula;

    #[test]
    fn gc_keeps_occurring_symbols() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 1), ("Q", 1)]).unwrap();
        let phi = parse_formula("(ex (rel Q (var 0)))", &s).unwrap();
        let r = sig_gc(&s, &phi).unwrap();
        assert_eq!(r.sig.rels().len(), 1);
        assert_eq!(r.sig.rels()[0].name, "Q");
        let r = sig_gc(&s, &Formula::Bot).unwrap();
        assert!(r.sig.funcs().is_empty() && r.sig.rels().is_empty());
    }

    #[test]
    fn fun_elim_flattens_nested_terms() {
        let s = Signature::from_symbols(&[("f", 1)], &[("P", 1)]).unwrap();
        let phi = parse_formula("(all (rel P (app f (var 0))))", &s).unwrap();
        let r = fun_elim(&s, &phi).unwrap();
        let body = match &r.formula {
            Formula::Bin(_, a, _) => a.as_ref().clone(),
            _ => unreachable!(),
        };
        assert_eq!(
            print_formula(&body, &r.sig),
            "(all (ex (and (rel f (var 1) (var 0)) (rel P (var 0)))))"
        );
        let cfg = SearchConfig::default();
        let v = fsateq_on_domain(&r.sig, &r.formula, RelId(0), 1, &cfg).unwrap();
        assert!(v.is_sat());
        assert!(r.backward(&v.interpretation().unwrap()).unwrap().satisfies(&phi));
    }

    #[test]
    fn fun_elim_constants_become_unique_points() {
        let s = Signature::from_symbols(&[("c", 0)], &[("P", 1)]).unwrap();
        let phi = parse_formula("(rel P (app c))", &s).unwrap();
        let r = fun_elim(&s, &phi).unwrap();
        assert_eq!(r.sig.rels()[1].arity, 1);
        let mut m = FiniteModel::new(&s, 2).unwrap();
        m.set_func(FuncId(0), &[], 1);
        m.set_rel(RelId(0), &[1], true);
        let out = r.forward(&Interpretation::closed(m)).unwrap();
        assert!(out.satisfies(&r.formula));
        assert_eq!(out.model.true_tuples(RelId(1)), vec![vec![1]]);
    }

    #[test]
    fn fun_elim_variable_only_atoms_unchanged() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 1)]).unwrap();
        let phi = parse_formula("(rel P (var 0))", &s).unwrap();
        let r = fun_elim(&s, &phi).unwrap();
        assert_eq!(r.formula, Formula::and(Formula::atom(RelId(1), vec![Term::Var(0)]), Formula::top()));
        assert!(fsat_on_domain(&r.sig, &r.formula, 1, &SearchConfig::default()).unwrap().is_sat());
    }

    #[test]
    fn nested_arguments_keep_variables_in_place() {
        let s = Signature::from_symbols(&[("g", 2), ("c", 0)], &[("R", 2)]).unwrap();
        let phi = parse_formula("(rel R (var 3) (app g (app c) (var 0)))", &s).unwrap();
        let r = fun_elim(&s, &phi).unwrap();
        let mut m = FiniteModel::new(&s, 3).unwrap();
        m.fill_func(FuncId(0), |t| (t[0] + 2 * t[1]) % 3);
        m.set_func(FuncId(1), &[], 2);
        for env in [vec![0, 1, 2, 1], vec![2, 0, 0, 0], vec![1, 1, 1, 2]] {
            for bits in 0..(1u32 << 9) {
                m.fill_rel(RelId(0), |t| bits >> (t[0] * 3 + t[1]) & 1 == 1);
                let src = Interpretation::new(m.clone(), crate::Assignment::new(env.clone(), 0));
                let out = r.forward(&src).unwrap();
                assert_eq!(src.satisfies(&phi), out.satisfies(&r.formula));
            }
        }
    }

    #[test]
    fn const_elim_uses_fresh_variables() {
        let s = Signature::from_symbols(&[("c", 0)], &[("Q", 2)]).unwrap();
        let phi = parse_formula("(rel Q (app c) (var 0))", &s).unwrap();
        let r = const_elim(&s, &phi).unwrap();
        assert_eq!(r.formula, Formula::atom(RelId(0), vec![Term::Var(1), Term::Var(0)]));
        let none = Signature::from_symbols::<&str>(&[], &[("Q", 2)]).unwrap();
        let psi = parse_formula("(ex (rel Q (var 0) (var 1)))", &none).unwrap();
        assert_eq!(const_elim(&none, &psi).unwrap().formula, psi);
        let bad = Signature::from_symbols(&[("f", 1)], &[]).unwrap();
        assert!(const_elim(&bad, &Formula::Bot).is_err());
    }

    #[test]
    fn zero_lift_examples() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 0), ("Q", 1)]).unwrap();
        let phi = parse_formula("(and (rel P) (ex (rel Q (var 0))))", &s).unwrap();
        let r = zero_arity_lift(&s, &phi).unwrap();
        assert_eq!(print_formula(&r.formula, &r.sig), "(and (rel P (var 0)) (ex (rel Q (var 0))))");
        let u = Signature::from_symbols::<&str>(&[], &[("Q", 1)]).unwrap();
        let psi = parse_formula("(ex (rel Q (var 0)))", &u).unwrap();
        assert_eq!(zero_arity_lift(&u, &psi).unwrap().formula, psi);
        let bad = Signature::from_symbols::<&str>(&[], &[("R", 2)]).unwrap();
        assert!(zero_arity_lift(&bad, &Formula::Bot).is_err());
    }
}
