//! Random formulas and models for sampling-based checks.

use rand::Rng;

use crate::semantics::FiniteModel;
use crate::syntax::{Formula, FuncId, RelId, Signature, Term};

/// The symbols a generator may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    pub funcs: Vec<FuncId>,
    pub rels: Vec<RelId>,
}

impl Vocab {
    pub fn all(sig: &Signature) -> Vocab {
        Vocab {
            funcs: sig.func_ids().collect(),
            rels: sig.rel_ids().collect(),
        }
    }
}

/// A term over variables `0..scope`; constants are used when `scope` is 0.
/// Returns `None` when the vocabulary offers no way to build one.
pub fn random_term<R: Rng + ?Sized>(
    sig: &Signature,
    vocab: &Vocab,
    depth: usize,
    scope: usize,
    rng: &mut R,
) -> Option<Term> {
    let funcs: Vec<FuncId> = vocab
        .funcs
        .iter()
        .copied()
        .filter(|&f| depth > 0 || sig.func(f).arity == 0)
        .collect();
    if scope > 0 && (funcs.is_empty() || rng.gen_bool(0.6)) {
        return Some(Term::Var(rng.gen_range(0..scope)));
    }
    let f = *funcs.get(rng.gen_range(0..funcs.len().max(1)))?;
    let args = (0..sig.func(f).arity)
        .map(|_| random_term(sig, vocab, depth.saturating_sub(1), scope, rng))
        .collect::<Option<Vec<_>>>()?;
    Some(Term::App(f, args))
}

/// A formula with at most `depth` nested connectives whose free variables
/// lie in `0..scope`.
pub fn random_formula<R: Rng + ?Sized>(
    sig: &Signature,
    vocab: &Vocab,
    depth: usize,
    scope: usize,
    rng: &mut R,
) -> Formula {
    let rels = &vocab.rels;
    let leaf = |rng: &mut R| -> Formula {
        if rels.is_empty() || rng.gen_bool(0.1) {
            return Formula::Bot;
        }
        let p = rels[rng.gen_range(0..rels.len())];
        let args = (0..sig.rel(p).arity).map(|_| random_term(sig, vocab, 1, scope, rng)).collect::<Option<Vec<_>>>();
        args.map_or(Formula::Bot, |a| Formula::Atom(p, a))
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..7) {
        0 => leaf(rng),
        1 => Formula::imp(random_formula(sig, vocab, depth - 1, scope, rng), random_formula(sig, vocab, depth - 1, scope, rng)),
        2 => Formula::and(random_formula(sig, vocab, depth - 1, scope, rng), random_formula(sig, vocab, depth - 1, scope, rng)),
        3 => Formula::or(random_formula(sig, vocab, depth - 1, scope, rng), random_formula(sig, vocab, depth - 1, scope, rng)),
        4 => Formula::not(random_formula(sig, vocab, depth - 1, scope, rng)),
        5 => Formula::all(random_formula(sig, vocab, depth - 1, scope + 1, rng)),
        _ => Formula::ex(random_formula(sig, vocab, depth - 1, scope + 1, rng)),
    }
}

/// A closed formula over every symbol of `sig`.
pub fn random_sentence<R: Rng + ?Sized>(sig: &Signature, depth: usize, rng: &mut R) -> Formula {
    random_formula(sig, &Vocab::all(sig), depth, 0, rng)
}

/// Uniformly random tables of size `k`.
pub fn random_model<R: Rng + ?Sized>(sig: &Signature, k: usize, rng: &mut R) -> FiniteModel {
    let mut m = FiniteModel::new(sig, k).expect("k > 0");
    for f in sig.func_ids() {
        m.fill_func(f, |_| rng.gen_range(0..k));
    }
    for p in sig.rel_ids() {
        m.fill_rel(p, |_| rng.gen_bool(0.5));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_formulas_are_well_formed() {
        let sig = Signature::from_symbols(&[("c", 0), ("f", 1), ("g", 2)], &[("P", 1), ("R", 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let phi = random_sentence(&sig, 4, &mut rng);
            assert!(phi.check(&sig).is_ok());
            assert!(phi.free_vars().is_empty());
            let m = random_model(&sig, 3, &mut rng);
            assert_eq!(m.size(), 3);
        }
    }

    #[test]
    fn vocabulary_restricts_symbols() {
        let sig = Signature::from_symbols(&[("f", 1), ("g", 1)], &[("P", 1), ("R", 2)]).unwrap();
        let vocab = Vocab { funcs: vec![FuncId(1)], rels: vec![RelId(0)] };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (fs, ps) = random_formula(&sig, &vocab, 4, 1, &mut rng).syms();
            assert!(fs.iter().all(|f| vocab.funcs.contains(f)));
            assert!(ps.iter().all(|p| vocab.rels.contains(p)));
        }
    }

    #[test]
    fn relation_only_signatures_without_scope_give_bot_leaves() {
        let sig = Signature::from_symbols::<&str>(&[], &[("P", 1)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(random_formula(&sig, &Vocab::all(&sig), 0, 0, &mut rng), Formula::Bot);
    }
}
