//! Arity normalization, merging relations into one, and embedding into larger signatures.

use std::sync::Arc;

use super::{ReductionError, ReductionResult};
use crate::semantics::{FiniteModel, Interpretation};
use crate::syntax::{Formula, FuncId, RelId, Signature, Term};

/// Pads `args` to length `n` with the variable `x0`.
fn pad(args: &[Term], n: usize, x0: usize) -> Vec<Term> {
    let mut out = args.to_vec();
    out.resize(n, Term::Var(x0));
    out
}

/// Gives every relation arity exactly `n` by repeating a fresh variable.
pub fn arity_pad(sig: &Signature, phi: &Formula, n: usize) -> Result<ReductionResult, ReductionError> {
    if let Some(p) = sig.rels().iter().find(|p| p.arity > n) {
        return Err(ReductionError::Precondition(format!(
            "relation `{}` has arity {} > {n}",
            p.name, p.arity
        )));
    }
    let base = phi.fresh_var();
    let mut out = Signature::new();
    for f in sig.funcs() {
        out.add_func(&f.name, f.arity)?;
    }
    for p in sig.rels() {
        out.add_rel(&p.name, n)?;
    }
    let formula = phi.map_atoms(&mut |p, args, depth| Formula::Atom(p, pad(args, n, base + depth)));

    let (src, out1) = (sig.clone(), out.clone());
    let forward = Arc::new(move |i: &Interpretation| {
        let mut m = FiniteModel::new(&out1, i.model.size())?;
        for f in src.func_ids() {
            m.func_table_mut(f).copy_from_slice(i.model.func_table(f));
        }
        for p in src.rel_ids() {
            let a = src.rel(p).arity;
            m.fill_rel(p, |t| i.model.holds(p, &t[..a]));
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    let src = sig.clone();
    let backward = Arc::new(move |i: &Interpretation| {
        let x0 = i.env.get(base);
        let mut m = FiniteModel::new(&src, i.model.size())?;
        for f in src.func_ids() {
            m.func_table_mut(f).copy_from_slice(i.model.func_table(f));
        }
        for p in src.rel_ids() {
            m.fill_rel(p, |t| {
                let mut full = t.to_vec();
                full.resize(n, x0);
                i.model.holds(p, &full)
            });
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    Ok(ReductionResult::stage(
        format!("arity-pad:{n}"),
        (sig, phi),
        out,
        formula,
        forward,
        backward,
    ))
}

/// Merges relations of one common arity `n` into a single `Q` of arity `1 + n`,
/// tagging each atom with a fresh constant naming its former relation.
///
/// A source model with fewer elements than relations is first inflated by
/// copying every element, so that the tag constants can be distinct.
pub fn rel_merge(sig: &Signature, phi: &Formula) -> Result<ReductionResult, ReductionError> {
    if !sig.funcs().is_empty() {
        return Err(ReductionError::Precondition("relation merging needs a signature without functions".into()));
    }
    let n = sig.rels().first().map_or(0, |p| p.arity);
    if let Some(p) = sig.rels().iter().find(|p| p.arity != n) {
        return Err(ReductionError::Precondition(format!(
            "relation `{}` has arity {}, expected uniform arity {n}",
            p.name, p.arity
        )));
    }
    let mut out = Signature::new();
    for p in sig.rels() {
        let name = out.fresh_name(&format!("c_{}", p.name));
        out.add_func(&name, 0)?;
    }
    let q = out.add_rel(&out.fresh_name("Q"), 1 + n)?;
    let formula = phi.map_atoms(&mut |p, args, _| {
        let mut full = vec![Term::App(FuncId(p.0), vec![])];
        full.extend_from_slice(args);
        Formula::Atom(q, full)
    });
    let m_rels = sig.rels().len();

    let (src, out1) = (sig.clone(), out.clone());
    let forward = Arc::new(move |i: &Interpretation| {
        let k = i.model.size();
        let size = if m_rels > k { k * m_rels.div_ceil(k) } else { k };
        let mut m = FiniteModel::new(&out1, size)?;
        for p in src.rel_ids() {
            m.set_func(FuncId(p.0), &[], p.0);
        }
        m.fill_rel(q, |t| {
            let projected: Vec<usize> = t[1..].iter().map(|&e| e % k).collect();
            t[0] < m_rels && i.model.holds(RelId(t[0]), &projected)
        });
        Ok(Interpretation::new(m, i.env.clone()))
    });
    let src = sig.clone();
    let backward = Arc::new(move |i: &Interpretation| {
        let mut m = FiniteModel::new(&src, i.model.size())?;
        for p in src.rel_ids() {
            let c = i.model.apply(FuncId(p.0), &[]);
            m.fill_rel(p, |t| i.model.holds(q, &[&[c], t].concat()));
        }
        Ok(Interpretation::new(m, i.env.clone()))
    });
    Ok(ReductionResult::stage("rel-merge", (sig, phi), out, formula, forward, backward))
}

/// Where an [`embed`] places the source symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedTarget {
    /// The single source relation, padded to this relation's arity.
    Relation(RelId),
    /// The single source function and unary relation, renamed.
    Function { func: FuncId, rel: RelId },
}

impl EmbedTarget {
    /// A relation of arity at least 2, else a function of arity at least 2 with a unary relation.
    pub fn pick(target: &Signature) -> Result<EmbedTarget, ReductionError> {
        if let Some(p) = target.rel_ids().find(|&p| target.rel(p).arity >= 2) {
            return Ok(EmbedTarget::Relation(p));
        }
        let f = target.func_ids().find(|&f| target.func(f).arity >= 2);
        let p = target.rel_ids().find(|&p| target.rel(p).arity == 1);
        match (f, p) {
            (Some(func), Some(rel)) => Ok(EmbedTarget::Function { func, rel }),
            _ => Err(ReductionError::NoTarget),
        }
    }
}

/// Injects a single-relation (or single function plus unary relation)
/// formula into `target`; unused target symbols keep default tables.
pub fn embed(
    sig: &Signature,
    phi: &Formula,
    target: &Signature,
    choice: EmbedTarget,
) -> Result<ReductionResult, ReductionError> {
    match choice {
        EmbedTarget::Relation(r) => {
            let m = target
                .rels()
                .get(r.0)
                .ok_or_else(|| ReductionError::Precondition("target relation not in signature".into()))?
                .arity;
            let a = match (sig.funcs(), sig.rels()) {
                ([], [p]) if p.arity <= m => p.arity,
                _ => {
                    return Err(ReductionError::Precondition(format!(
                        "source must be a single relation of arity at most {m}"
                    )))
                }
            };
            let base = phi.fresh_var();
            let formula = phi.map_atoms(&mut |_, args, depth| Formula::Atom(r, pad(args, m, base + depth)));
            let tgt = target.clone();
            let forward = Arc::new(move |i: &Interpretation| {
                let mut out = FiniteModel::new(&tgt, i.model.size())?;
                out.fill_rel(r, |t| i.model.holds(RelId(0), &t[..a]));
                Ok(Interpretation::new(out, i.env.clone()))
            });
            let src = sig.clone();
            let backward = Arc::new(move |i: &Interpretation| {
                let x0 = i.env.get(base);
                let mut out = FiniteModel::new(&src, i.model.size())?;
                out.fill_rel(RelId(0), |t| {
                    let mut full = t.to_vec();
                    full.resize(m, x0);
                    i.model.holds(r, &full)
                });
                Ok(Interpretation::new(out, i.env.clone()))
            });
            Ok(ReductionResult::stage("embed", (sig, phi), target.clone(), formula, forward, backward))
        }
        EmbedTarget::Function { func, rel } => {
            let (n, u) = match (target.funcs().get(func.0), target.rels().get(rel.0)) {
                (Some(f), Some(u)) => (f.arity, u.arity),
                _ => return Err(ReductionError::Precondition("target symbols not in signature".into())),
            };
            let ok = u == 1
                && matches!((sig.funcs(), sig.rels()), ([f], [p]) if f.arity == n && p.arity == 1);
            if !ok {
                return Err(ReductionError::Precondition(format!(
                    "source must be one function of arity {n} and one unary relation"
                )));
            }
            let formula = phi.map_atoms(&mut |_, args, _| {
                Formula::Atom(rel, args.iter().map(|t| t.map_funcs(&|_| func)).collect())
            });
            let tgt = target.clone();
            let forward = Arc::new(move |i: &Interpretation| {
                let mut out = FiniteModel::new(&tgt, i.model.size())?;
                out.func_table_mut(func).copy_from_slice(i.model.func_table(FuncId(0)));
                out.rel_table_mut(rel).copy_from_slice(i.model.rel_table(RelId(0)));
                Ok(Interpretation::new(out, i.env.clone()))
            });
            let src = sig.clone();
            let backward = Arc::new(move |i: &Interpretation| {
                let mut out = FiniteModel::new(&src, i.model.size())?;
                out.func_table_mut(FuncId(0)).copy_from_slice(i.model.func_table(func));
                out.rel_table_mut(RelId(0)).copy_from_slice(i.model.rel_table(rel));
                Ok(Interpretation::new(out, i.env.clone()))
            });
            Ok(ReductionResult::stage("embed", (sig, phi), target.clone(), formula, forward, backward))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{fsat_bounded, fsat_on_domain, SearchConfig};
    use crate::syntax::print_formula;
    use crate::text::parse_formula;

    #[test]
    fn pad_repeats_fresh_variable() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 1)]).unwrap();
        let phi = parse_formula("(all (rel P (var 0)))", &s).unwrap();
        let r = arity_pad(&s, &phi, 3).unwrap();
        assert_eq!(print_formula(&r.formula, &r.sig), "(all (rel P (var 0) (var 1) (var 1)))");
        let same = arity_pad(&s, &phi, 1).unwrap();
        assert_eq!(same.formula, phi);
        assert!(arity_pad(&s, &phi, 0).is_err());
    }

    #[test]
    fn merge_tags_atoms_with_constants() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 1), ("R", 1)]).unwrap();
        let phi = parse_formula("(ex (and (rel P (var 0)) (impl (rel R (var 0)) bot)))", &s).unwrap();
        let r = rel_merge(&s, &phi).unwrap();
        let names: Vec<_> = r.sig.funcs().iter().map(|f| (f.name.as_str(), f.arity)).collect();
        assert_eq!(names, [("c_P", 0), ("c_R", 0)]);
        assert_eq!(r.sig.rels()[0].arity, 2);
        let cfg = SearchConfig::default();
        let src = fsat_bounded(&s, &phi, 3, &cfg).unwrap();
        assert_eq!(src.size(), Some(1));
        let fwd = r.forward(&src.interpretation().unwrap()).unwrap();
        assert_eq!(fwd.model.size(), 2);
        assert!(fwd.satisfies(&r.formula));
        let tgt = fsat_bounded(&r.sig, &r.formula, 3, &cfg).unwrap();
        assert!(r.backward(&tgt.interpretation().unwrap()).unwrap().satisfies(&phi));
    }

    #[test]
    fn merge_wraps_a_single_relation() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 2)]).unwrap();
        let phi = parse_formula("(ex (rel P (var 0) (var 0)))", &s).unwrap();
        let r = rel_merge(&s, &phi).unwrap();
        assert_eq!(print_formula(&r.formula, &r.sig), "(ex (rel Q (app c_P) (var 0) (var 0)))");
    }

    #[test]
    fn embed_pads_into_ternary() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 2)]).unwrap();
        let t = Signature::from_symbols::<&str>(&[], &[("U", 1), ("R", 3)]).unwrap();
        let phi = parse_formula("(ex (ex (and (rel P (var 1) (var 0)) (impl (rel P (var 0) (var 1)) bot))))", &s).unwrap();
        let choice = EmbedTarget::pick(&t).unwrap();
        assert_eq!(choice, EmbedTarget::Relation(RelId(1)));
        let r = embed(&s, &phi, &t, choice).unwrap();
        let cfg = SearchConfig::default();
        for k in 1..=3 {
            assert_eq!(
                fsat_on_domain(&s, &phi, k, &cfg).unwrap().is_sat(),
                fsat_on_domain(&r.sig, &r.formula, k, &cfg).unwrap().is_sat()
            );
        }
    }

    #[test]
    fn embed_identity_and_failure() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 2)]).unwrap();
        let phi = parse_formula("(ex (rel P (var 0) (var 0)))", &s).unwrap();
        let r = embed(&s, &phi, &s, EmbedTarget::pick(&s).unwrap()).unwrap();
        assert_eq!(r.formula, phi);
        let weak = Signature::from_symbols::<&str>(&[("f", 1)], &[("P", 1)]).unwrap();
        assert_eq!(EmbedTarget::pick(&weak), Err(ReductionError::NoTarget));
        let fun = Signature::from_symbols::<&str>(&[("g", 3)], &[("U", 1)]).unwrap();
        assert_eq!(
            EmbedTarget::pick(&fun),
            Ok(EmbedTarget::Function { func: FuncId(0), rel: RelId(0) })
        );
    }
}
