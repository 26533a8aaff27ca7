//! Trading an interpreted equality symbol for equivalence and congruence axioms.

use std::sync::Arc;

use super::{Builder, ReductionError, ReductionResult};
use crate::semantics::{tuples, FiniteModel, Interpretation};
use crate::syntax::{Formula, Quantifier, RelId, Signature, Term};

/// Axioms making `eq` an equivalence and a congruence for the listed symbols.
pub(crate) fn congruence_axioms(sig: &Signature, phi: &Formula, eq: RelId) -> Vec<Formula> {
    let b = Builder::at(0);
    let mut axioms = vec![
        b.all(|b, x| b.atom(eq, &[x, x])),
        b.quant_n(Quantifier::All, 2, |b, v| {
            Formula::imp(b.atom(eq, &[v[0], v[1]]), b.atom(eq, &[v[1], v[0]]))
        }),
        b.quant_n(Quantifier::All, 3, |b, v| {
            Formula::imp_chain(
                [b.atom(eq, &[v[0], v[1]]), b.atom(eq, &[v[1], v[2]])],
                b.atom(eq, &[v[0], v[2]]),
            )
        }),
    ];
    let (fs, ps) = phi.syms();
    for f in fs {
        let a = sig.func(f).arity;
        axioms.push(b.quant_n(Quantifier::All, 2 * a, |b, v| {
            let (xs, ys) = v.split_at(a);
            let hyps = xs.iter().zip(ys).map(|(&x, &y)| b.atom(eq, &[x, y]));
            let app = |vs: &[_]| Term::App(f, vs.iter().map(|&l| b.var(l)).collect());
            Formula::imp_chain(hyps, Formula::Atom(eq, vec![app(xs), app(ys)]))
        }));
    }
    for p in ps {
        let a = sig.rel(p).arity;
        axioms.push(b.quant_n(Quantifier::All, 2 * a, |b, v| {
            let (xs, ys) = v.split_at(a);
            let hyps = xs
                .iter()
                .zip(ys)
                .map(|(&x, &y)| b.atom(eq, &[x, y]))
                .chain([b.atom(p, xs)]);
            Formula::imp_chain(hyps, b.atom(p, ys))
        }));
    }
    axioms
}

/// Quotient of a model by a relation that is an equivalence and a congruence.
///
/// Classes are numbered by least member; `eq` becomes the identity.
pub(crate) fn quotient_by(i: &Interpretation, eq: RelId) -> Result<Interpretation, ReductionError> {
    let m = &i.model;
    let k = m.size();
    let mut class = vec![usize::MAX; k];
    let mut reps = Vec::new();
    for x in 0..k {
        if class[x] != usize::MAX {
            continue;
        }
        if !m.holds(eq, &[x, x]) {
            return Err(ReductionError::Transport(format!("`{}` is not reflexive at {x}", m.signature().rel(eq).name)));
        }
        for (y, cls) in class.iter_mut().enumerate().skip(x) {
            if m.holds(eq, &[x, y]) {
                *cls = reps.len();
            }
        }
        reps.push(x);
    }
    let sig = m.signature();
    let mut q = FiniteModel::new(sig, reps.len())?;
    for f in sig.func_ids() {
        let a = sig.func(f).arity;
        for t in tuples(reps.len(), a) {
            let args: Vec<usize> = t.iter().map(|&c| reps[c]).collect();
            q.set_func(f, &t, class[m.apply(f, &args)]);
        }
    }
    for p in sig.rel_ids() {
        let a = sig.rel(p).arity;
        for t in tuples(reps.len(), a) {
            let args: Vec<usize> = t.iter().map(|&c| reps[c]).collect();
            q.set_rel(p, &t, m.holds(p, &args));
        }
    }
    q.fill_rel(eq, |t| t[0] == t[1]);
    Ok(Interpretation::new(q, i.env.map(|v| class[v])))
}

/// Replaces "`eq` is identity" by first-order axioms about `eq`.
pub fn eq_elim(sig: &Signature, phi: &Formula, eq: RelId) -> Result<ReductionResult, ReductionError> {
    let sym = sig
        .rels()
        .get(eq.0)
        .ok_or_else(|| ReductionError::Precondition(format!("relation #{} not in signature", eq.0)))?;
    if sym.arity != 2 {
        return Err(ReductionError::Precondition(format!(
            "equality symbol `{}` has arity {}, expected 2",
            sym.name, sym.arity
        )));
    }
    let out = Formula::and(phi.clone(), Formula::conj(congruence_axioms(sig, phi, eq)));
    let forward = Arc::new(|i: &Interpretation| Ok(i.clone()));
    let backward = Arc::new(move |i: &Interpretation| quotient_by(i, eq));
    Ok(ReductionResult::stage(
        "eq-elim",
        (sig, phi),
        sig.clone(),
        out,
        forward,
        backward,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{fsat_on_domain, SearchConfig};
    use crate::text::parse_formula;

    fn sig() -> Signature {
        Signature::from_symbols(&[("f", 1)], &[("eq", 2), ("P", 1)]).unwrap()
    }

    #[test]
    fn one_congruence_axiom_per_symbol() {
        let s = sig();
        let phi = parse_formula("(all (rel P (app f (var 0))))", &s).unwrap();
        assert_eq!(congruence_axioms(&s, &phi, RelId(0)).len(), 3 + 2);
        let phi = parse_formula("(all (rel eq (var 0) (var 0)))", &s).unwrap();
        assert_eq!(congruence_axioms(&s, &phi, RelId(0)).len(), 3 + 1);
    }

    #[test]
    fn examples() {
        let s = sig();
        let cfg = SearchConfig::default();
        let refl = parse_formula("(all (rel eq (var 0) (var 0)))", &s).unwrap();
        let r = eq_elim(&s, &refl, RelId(0)).unwrap();
        assert!(fsat_on_domain(&r.sig, &r.formula, 1, &cfg).unwrap().is_sat());
        let distinct = parse_formula("(ex (ex (impl (rel eq (var 0) (var 1)) bot)))", &s).unwrap();
        let r = eq_elim(&s, &distinct, RelId(0)).unwrap();
        let v = fsat_on_domain(&r.sig, &r.formula, 2, &cfg).unwrap();
        let back = r.backward(&v.interpretation().unwrap()).unwrap();
        assert_eq!(back.model.size(), 2);
        assert!(back.satisfies(&distinct));
    }

    #[test]
    fn backward_collapses_classes() {
        let s = sig();
        // P(f(x0)) with eq total: every model collapses to one point
        let phi = parse_formula("(and (rel P (app f (var 0))) (all (all (rel eq (var 0) (var 1)))))", &s).unwrap();
        let r = eq_elim(&s, &phi, RelId(0)).unwrap();
        let v = fsat_on_domain(&r.sig, &r.formula, 3, &SearchConfig::default()).unwrap();
        let back = r.backward(&v.interpretation().unwrap()).unwrap();
        assert_eq!(back.model.size(), 1);
        assert!(back.satisfies(&phi));
    }
}
