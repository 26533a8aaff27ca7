//! First-order syntax over finite signatures with de Bruijn variables.
//!
//! Symbols are indices into a [`Signature`]; arities live only in the
//! signature. A variable `Var(i)` refers to the binder `i` levels up, or to
//! the free variable `i - depth` when it escapes every binder.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("duplicate function symbol `{0}`")]
    DuplicateFunc(String),
    #[error("duplicate relation symbol `{0}`")]
    DuplicateRel(String),
    #[error("{kind} symbol {index} is not in the signature")]
    UnknownSymbol { kind: &'static str, index: usize },
    #[error("{kind} symbol `{name}` has arity {expected} but is applied to {found} arguments")]
    ArityMismatch {
        kind: &'static str,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol map sends `{from}` (arity {from_arity}) to `{to}` (arity {to_arity})")]
    MapArity {
        from: String,
        from_arity: usize,
        to: String,
        to_arity: usize,
    },
}

/// A finite table of function and relation symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    funcs: Vec<Symbol>,
    rels: Vec<Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a signature from `(name, arity)` lists, rejecting duplicate names.
    pub fn from_symbols<S: AsRef<str>>(
        funcs: &[(S, usize)],
        rels: &[(S, usize)],
    ) -> Result<Self, SignatureError> {
        let mut sig = Signature::new();
        for (n, a) in funcs {
            sig.add_func(n.as_ref(), *a)?;
        }
        for (n, a) in rels {
            sig.add_rel(n.as_ref(), *a)?;
        }
        Ok(sig)
    }

    pub fn add_func(&mut self, name: &str, arity: usize) -> Result<FuncId, SignatureError> {
        if self.find_func(name).is_some() {
            return Err(SignatureError::DuplicateFunc(name.to_string()));
        }
        self.funcs.push(Symbol {
            name: name.to_string(),
            arity,
        });
        Ok(FuncId(self.funcs.len() - 1))
    }

    pub fn add_rel(&mut self, name: &str, arity: usize) -> Result<RelId, SignatureError> {
        if self.find_rel(name).is_some() {
            return Err(SignatureError::DuplicateRel(name.to_string()));
        }
        self.rels.push(Symbol {
            name: name.to_string(),
            arity,
        });
        Ok(RelId(self.rels.len() - 1))
    }

    /// A name not used by any symbol of either sort, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        let taken = |n: &str| self.find_func(n).is_some() || self.find_rel(n).is_some();
        if !taken(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !taken(n))
            .unwrap()
    }

    pub fn funcs(&self) -> &[Symbol] {
        &self.funcs
    }

    pub fn rels(&self) -> &[Symbol] {
        &self.rels
    }

    pub fn func(&self, f: FuncId) -> &Symbol {
        &self.funcs[f.0]
    }

    pub fn rel(&self, p: RelId) -> &Symbol {
        &self.rels[p.0]
    }

    pub fn func_ids(&self) -> impl Iterator<Item = FuncId> {
        (0..self.funcs.len()).map(FuncId)
    }

    pub fn rel_ids(&self) -> impl Iterator<Item = RelId> {
        (0..self.rels.len()).map(RelId)
    }

    pub fn find_func(&self, name: &str) -> Option<FuncId> {
        self.funcs.iter().position(|s| s.name == name).map(FuncId)
    }

    pub fn find_rel(&self, name: &str) -> Option<RelId> {
        self.rels.iter().position(|s| s.name == name).map(RelId)
    }

    pub fn max_rel_arity(&self) -> usize {
        self.rels.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    pub fn max_arity(&self) -> usize {
        self.funcs
            .iter()
            .chain(&self.rels)
            .map(|s| s.arity)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(FuncId, Vec<Term>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Impl,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    All,
    Ex,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bot,
    Atom(RelId, Vec<Term>),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Quant(Quantifier, Box<Formula>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(f: FuncId, args: Vec<Term>) -> Term {
        Term::App(f, args)
    }

    /// Shifts every variable `>= cutoff` up by `amount`.
    pub fn lift(&self, amount: usize, cutoff: usize) -> Term {
        match self {
            Term::Var(i) if *i >= cutoff => Term::Var(i + amount),
            Term::Var(i) => Term::Var(*i),
            Term::App(f, args) => {
                Term::App(*f, args.iter().map(|t| t.lift(amount, cutoff)).collect())
            }
        }
    }

    /// Replaces each variable `i >= cutoff` with `sub(i - cutoff)` lifted by `cutoff`.
    pub fn subst_free(&self, cutoff: usize, sub: &impl Fn(usize) -> Term) -> Term {
        match self {
            Term::Var(i) if *i >= cutoff => sub(i - cutoff).lift(cutoff, 0),
            Term::Var(i) => Term::Var(*i),
            Term::App(f, args) => Term::App(
                *f,
                args.iter().map(|t| t.subst_free(cutoff, sub)).collect(),
            ),
        }
    }

    fn collect_vars(&self, depth: usize, out: &mut Vec<usize>) {
        match self {
            Term::Var(i) => {
                if *i >= depth && !out.contains(&(i - depth)) {
                    out.push(i - depth);
                }
            }
            Term::App(_, args) => args.iter().for_each(|t| t.collect_vars(depth, out)),
        }
    }

    fn collect_funcs(&self, out: &mut Vec<FuncId>) {
        if let Term::App(f, args) = self {
            if !out.contains(f) {
                out.push(*f);
            }
            args.iter().for_each(|t| t.collect_funcs(out));
        }
    }

    pub fn mentions_var(&self, i: usize) -> bool {
        match self {
            Term::Var(j) => *j == i,
            Term::App(_, args) => args.iter().any(|t| t.mentions_var(i)),
        }
    }

    pub fn check(&self, sig: &Signature) -> Result<(), SignatureError> {
        if let Term::App(f, args) = self {
            let sym = sig.funcs.get(f.0).ok_or(SignatureError::UnknownSymbol {
                kind: "function",
                index: f.0,
            })?;
            if sym.arity != args.len() {
                return Err(SignatureError::ArityMismatch {
                    kind: "function",
                    name: sym.name.clone(),
                    expected: sym.arity,
                    found: args.len(),
                });
            }
            args.iter().try_for_each(|t| t.check(sig))?;
        }
        Ok(())
    }

    pub fn map_funcs(&self, fm: &impl Fn(FuncId) -> FuncId) -> Term {
        match self {
            Term::Var(i) => Term::Var(*i),
            Term::App(f, args) => Term::App(fm(*f), args.iter().map(|t| t.map_funcs(fm)).collect()),
        }
    }
}

impl Formula {
    pub fn top() -> Formula {
        Formula::imp(Formula::Bot, Formula::Bot)
    }

    pub fn atom(p: RelId, args: Vec<Term>) -> Formula {
        Formula::Atom(p, args)
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Bin(BinOp::Impl, Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::Bin(BinOp::And, Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Bin(BinOp::Or, Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn all(body: Formula) -> Formula {
        Formula::Quant(Quantifier::All, Box::new(body))
    }

    pub fn ex(body: Formula) -> Formula {
        Formula::Quant(Quantifier::Ex, Box::new(body))
    }

    /// `n` nested quantifiers of the same kind.
    pub fn quant_n(q: Quantifier, n: usize, body: Formula) -> Formula {
        (0..n).fold(body, |acc, _| Formula::Quant(q, Box::new(acc)))
    }

    pub fn all_n(n: usize, body: Formula) -> Formula {
        Formula::quant_n(Quantifier::All, n, body)
    }

    pub fn ex_n(n: usize, body: Formula) -> Formula {
        Formula::quant_n(Quantifier::Ex, n, body)
    }

    /// Right-nested conjunction; the empty conjunction is truth.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.pop() {
            None => Formula::top(),
            Some(last) => parts.into_iter().rev().fold(last, |acc, p| Formula::and(p, acc)),
        }
    }

    /// Right-nested disjunction; the empty disjunction is falsity.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.pop() {
            None => Formula::Bot,
            Some(last) => parts.into_iter().rev().fold(last, |acc, p| Formula::or(p, acc)),
        }
    }

    /// Right-nested implication chain `h1 -> h2 -> ... -> concl`.
    pub fn imp_chain(hyps: impl IntoIterator<Item = Formula>, concl: Formula) -> Formula {
        let hyps: Vec<_> = hyps.into_iter().collect();
        hyps.into_iter().rev().fold(concl, |acc, h| Formula::imp(h, acc))
    }

    /// Free de Bruijn indices, duplicate-free, in order of first occurrence.
    pub fn free_vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(0, &mut out);
        out
    }

    /// One more than the largest free variable, or 0 for closed formulas.
    pub fn fresh_var(&self) -> usize {
        self.free_vars().into_iter().max().map_or(0, |m| m + 1)
    }

    fn collect_vars(&self, depth: usize, out: &mut Vec<usize>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(_, args) => args.iter().for_each(|t| t.collect_vars(depth, out)),
            Formula::Bin(_, a, b) => {
                a.collect_vars(depth, out);
                b.collect_vars(depth, out);
            }
            Formula::Quant(_, body) => body.collect_vars(depth + 1, out),
        }
    }

    /// Function and relation symbols that occur, in order of first occurrence.
    pub fn syms(&self) -> (Vec<FuncId>, Vec<RelId>) {
        let mut fs = Vec::new();
        let mut ps = Vec::new();
        self.collect_syms(&mut fs, &mut ps);
        (fs, ps)
    }

    fn collect_syms(&self, fs: &mut Vec<FuncId>, ps: &mut Vec<RelId>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(p, args) => {
                if !ps.contains(p) {
                    ps.push(*p);
                }
                args.iter().for_each(|t| t.collect_funcs(fs));
            }
            Formula::Bin(_, a, b) => {
                a.collect_syms(fs, ps);
                b.collect_syms(fs, ps);
            }
            Formula::Quant(_, body) => body.collect_syms(fs, ps),
        }
    }

    pub fn lift(&self, amount: usize, cutoff: usize) -> Formula {
        if amount == 0 {
            return self.clone();
        }
        self.map_terms(cutoff, &|t, c| t.lift(amount, c))
    }

    /// Rewrites every atom argument with `f(term, depth + cutoff)`.
    pub fn map_terms(&self, cutoff: usize, f: &impl Fn(&Term, usize) -> Term) -> Formula {
        match self {
            Formula::Bot => Formula::Bot,
            Formula::Atom(p, args) => Formula::Atom(*p, args.iter().map(|t| f(t, cutoff)).collect()),
            Formula::Bin(op, a, b) => Formula::Bin(
                *op,
                Box::new(a.map_terms(cutoff, f)),
                Box::new(b.map_terms(cutoff, f)),
            ),
            Formula::Quant(q, body) => Formula::Quant(*q, Box::new(body.map_terms(cutoff + 1, f))),
        }
    }

    /// Replaces every free variable `i` by `sub(i)`, avoiding capture.
    pub fn subst_free(&self, sub: &impl Fn(usize) -> Term) -> Formula {
        self.map_terms(0, &|t, c| t.subst_free(c, sub))
    }

    /// Rebuilds every atom with `f(rel, args, depth)`.
    pub fn map_atoms(&self, f: &mut impl FnMut(RelId, &[Term], usize) -> Formula) -> Formula {
        self.map_atoms_at(0, f)
    }

    fn map_atoms_at(
        &self,
        depth: usize,
        f: &mut impl FnMut(RelId, &[Term], usize) -> Formula,
    ) -> Formula {
        match self {
            Formula::Bot => Formula::Bot,
            Formula::Atom(p, args) => f(*p, args, depth),
            Formula::Bin(op, a, b) => {
                let a = a.map_atoms_at(depth, f);
                let b = b.map_atoms_at(depth, f);
                Formula::Bin(*op, Box::new(a), Box::new(b))
            }
            Formula::Quant(q, body) => Formula::Quant(*q, Box::new(body.map_atoms_at(depth + 1, f))),
        }
    }

    /// Checks the arity discipline against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), SignatureError> {
        match self {
            Formula::Bot => Ok(()),
            Formula::Atom(p, args) => {
                let sym = sig.rels.get(p.0).ok_or(SignatureError::UnknownSymbol {
                    kind: "relation",
                    index: p.0,
                })?;
                if sym.arity != args.len() {
                    return Err(SignatureError::ArityMismatch {
                        kind: "relation",
                        name: sym.name.clone(),
                        expected: sym.arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|t| t.check(sig))
            }
            Formula::Bin(_, a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Formula::Quant(_, body) => body.check(sig),
        }
    }

    /// Number of AST nodes (terms included).
    pub fn size(&self) -> usize {
        fn tsize(t: &Term) -> usize {
            match t {
                Term::Var(_) => 1,
                Term::App(_, a) => 1 + a.iter().map(tsize).sum::<usize>(),
            }
        }
        match self {
            Formula::Bot => 1,
            Formula::Atom(_, args) => 1 + args.iter().map(tsize).sum::<usize>(),
            Formula::Bin(_, a, b) => 1 + a.size() + b.size(),
            Formula::Quant(_, b) => 1 + b.size(),
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(..) => 0,
            Formula::Bin(_, a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Quant(_, b) => 1 + b.quantifier_depth(),
        }
    }
}

/// Renames symbols along arity-preserving maps from `from` into `to`.
pub fn map_symbols(
    phi: &Formula,
    from: &Signature,
    to: &Signature,
    func_map: &impl Fn(FuncId) -> FuncId,
    rel_map: &impl Fn(RelId) -> RelId,
) -> Result<Formula, SignatureError> {
    let (fs, ps) = phi.syms();
    for f in fs {
        let (a, b) = (from.func(f), to.func(func_map(f)));
        if a.arity != b.arity {
            return Err(SignatureError::MapArity {
                from: a.name.clone(),
                from_arity: a.arity,
                to: b.name.clone(),
                to_arity: b.arity,
            });
        }
    }
    for p in ps {
        let (a, b) = (from.rel(p), to.rel(rel_map(p)));
        if a.arity != b.arity {
            return Err(SignatureError::MapArity {
                from: a.name.clone(),
                from_arity: a.arity,
                to: b.name.clone(),
                to_arity: b.arity,
            });
        }
    }
    Ok(phi.map_atoms(&mut |p, args, _| {
        Formula::Atom(rel_map(p), args.iter().map(|t| t.map_funcs(func_map)).collect())
    }))
}

/// Pairs a formula with its signature for printing.
pub struct Display<'a> {
    pub sig: &'a Signature,
    pub formula: &'a Formula,
}

fn write_term(f: &mut fmt::Formatter<'_>, sig: &Signature, t: &Term) -> fmt::Result {
    match t {
        Term::Var(i) => write!(f, "(var {i})"),
        Term::App(g, args) => {
            write!(f, "(app {}", sig.func(*g).name)?;
            for a in args {
                write!(f, " ")?;
                write_term(f, sig, a)?;
            }
            write!(f, ")")
        }
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, sig: &Signature, phi: &Formula) -> fmt::Result {
    match phi {
        Formula::Bot => write!(f, "bot"),
        Formula::Atom(p, args) => {
            write!(f, "(rel {}", sig.rel(*p).name)?;
            for a in args {
                write!(f, " ")?;
                write_term(f, sig, a)?;
            }
            write!(f, ")")
        }
        Formula::Bin(op, a, b) => {
            let kw = match op {
                BinOp::Impl => "impl",
                BinOp::And => "and",
                BinOp::Or => "or",
            };
            write!(f, "({kw} ")?;
            write_formula(f, sig, a)?;
            write!(f, " ")?;
            write_formula(f, sig, b)?;
            write!(f, ")")
        }
        Formula::Quant(q, body) => {
            let kw = match q {
                Quantifier::All => "all",
                Quantifier::Ex => "ex",
            };
            write!(f, "({kw} ")?;
            write_formula(f, sig, body)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.sig, self.formula)
    }
}

pub fn print_formula(phi: &Formula, sig: &Signature) -> String {
    Display { sig, formula: phi }.to_string()
}

pub fn print_term(t: &Term, sig: &Signature) -> String {
    struct T<'a>(&'a Signature, &'a Term);
    impl fmt::Display for T<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write_term(f, self.0, self.1)
        }
    }
    T(sig, t).to_string()
}

pub fn print_signature(sig: &Signature) -> String {
    let mut s = String::from("(signature (funcs");
    for sym in sig.funcs() {
        s.push_str(&format!(" ({} {})", sym.name, sym.arity));
    }
    s.push_str(") (rels");
    for sym in sig.rels() {
        s.push_str(&format!(" ({} {})", sym.name, sym.arity));
    }
    s.push_str("))");
    s
}

/// Signature header followed by the formula on its own line.
pub fn print_document(sig: &Signature, phi: &Formula) -> String {
    format!("{}\n{}\n", print_signature(sig), print_formula(phi, sig))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig_p2() -> Signature {
        Signature::from_symbols(&[("f", 1)], &[("P", 2), ("Q", 1)]).unwrap()
    }

    #[test]
    fn free_vars_example() {
        // all ex (P 1 4 -> P 0 5)
        let p = RelId(0);
        let phi = Formula::all(Formula::ex(Formula::imp(
            Formula::atom(p, vec![Term::Var(1), Term::Var(4)]),
            Formula::atom(p, vec![Term::Var(0), Term::Var(5)]),
        )));
        let mut fv = phi.free_vars();
        fv.sort();
        assert_eq!(fv, vec![2, 3]);
        assert!(Formula::Bot.free_vars().is_empty());
        let a = Formula::atom(p, vec![Term::Var(0), Term::Var(7)]);
        assert_eq!(a.free_vars(), vec![0, 7]);
    }

    #[test]
    fn lift_examples() {
        assert_eq!(Term::Var(0).lift(1, 0), Term::Var(1));
        assert_eq!(Term::Var(0).lift(1, 1), Term::Var(0));
        let p = RelId(0);
        let phi = Formula::all(Formula::atom(p, vec![Term::Var(0), Term::Var(1)]));
        assert_eq!(
            phi.lift(2, 0),
            Formula::all(Formula::atom(p, vec![Term::Var(0), Term::Var(3)]))
        );
    }

    #[test]
    fn syms_example() {
        let phi = Formula::ex(Formula::atom(
            RelId(1),
            vec![Term::App(FuncId(0), vec![Term::Var(0)])],
        ));
        assert_eq!(phi.syms(), (vec![FuncId(0)], vec![RelId(1)]));
        assert_eq!(Formula::Bot.syms(), (vec![], vec![]));
    }

    #[test]
    fn check_catches_arity() {
        let sig = sig_p2();
        let bad = Formula::atom(RelId(0), vec![Term::Var(0)]);
        assert!(matches!(bad.check(&sig), Err(SignatureError::ArityMismatch { .. })));
    }

    #[test]
    fn map_symbols_renames_and_checks_arity() {
        let sig = sig_p2();
        let mut target = sig.clone();
        let r = target.add_rel("R", 1).unwrap();
        let phi = Formula::atom(RelId(1), vec![Term::Var(0)]);
        let out = map_symbols(&phi, &sig, &target, &|f| f, &|p| if p == RelId(1) { r } else { p }).unwrap();
        assert_eq!(out, Formula::atom(r, vec![Term::Var(0)]));
        let err = map_symbols(&phi, &sig, &target, &|f| f, &|_| RelId(0));
        assert!(matches!(err, Err(SignatureError::MapArity { .. })));
    }

    #[test]
    fn conj_and_disj_conventions() {
        assert_eq!(Formula::conj([]), Formula::top());
        assert_eq!(Formula::disj([]), Formula::Bot);
        let a = Formula::atom(RelId(1), vec![Term::Var(0)]);
        assert_eq!(Formula::disj([a.clone()]), a);
    }

    #[test]
    fn fresh_names_avoid_both_sorts() {
        let sig = sig_p2();
        assert_eq!(sig.fresh_name("f"), "f_1");
        assert_eq!(sig.fresh_name("g"), "g");
    }
}
