//! Satisfiability-preserving signature transformations.
//!
//! Every stage returns a [`ReductionResult`]: the output signature and
//! formula plus model transports in both directions. Transports act on
//! interpretations (model and assignment) because several stages trade
//! symbols for free variables.

use std::sync::Arc;

use thiserror::Error;

use crate::semantics::{Interpretation, ModelError};
use crate::syntax::{Formula, FuncId, Quantifier, RelId, Signature, SignatureError, Term};

mod equality;
mod functions;
mod membership;
mod monadic;
mod pipeline;
mod relations;

pub use equality::eq_elim;
pub use functions::{const_elim, fun_elim, sig_gc, zero_arity_lift};
pub use membership::{membership_to_fun, nary_to_membership};
pub use monadic::monadic_fun_elim;
pub use pipeline::{discrete_to_binary, full_trakhtenbrot, run_chain, Stage};
pub use relations::{arity_pad, embed, rel_merge, EmbedTarget};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("transport rejected its input: {0}")]
    Transport(String),
    #[error("no {0} transport available")]
    MissingTransport(&'static str),
    #[error("target signature has no binary relation and no binary function with a unary relation")]
    NoTarget,
    #[error("unknown stage `{0}`")]
    UnknownStage(String),
}

pub type Transport =
    Arc<dyn Fn(&Interpretation) -> Result<Interpretation, ReductionError> + Send + Sync>;

/// One line of a stage trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub stage: String,
    pub in_funcs: usize,
    pub in_rels: usize,
    pub out_funcs: usize,
    pub out_rels: usize,
    pub in_size: usize,
    pub out_size: usize,
}

impl std::fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: ({} funcs, {} rels, size {}) -> ({} funcs, {} rels, size {})",
            self.stage, self.in_funcs, self.in_rels, self.in_size, self.out_funcs, self.out_rels, self.out_size
        )
    }
}

#[derive(Clone)]
pub struct ReductionResult {
    pub sig: Signature,
    pub formula: Formula,
    /// Set when the output is an instance with this symbol read as identity.
    pub equality: Option<RelId>,
    pub forward: Option<Transport>,
    pub backward: Option<Transport>,
    pub trace: Vec<TraceEntry>,
}

impl std::fmt::Debug for ReductionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReductionResult")
            .field("sig", &self.sig)
            .field("formula", &self.formula)
            .field("equality", &self.equality)
            .field("trace", &self.trace)
            .finish()
    }
}

impl ReductionResult {
    fn stage(
        name: impl Into<String>,
        (in_sig, in_phi): (&Signature, &Formula),
        sig: Signature,
        formula: Formula,
        forward: Transport,
        backward: Transport,
    ) -> ReductionResult {
        let entry = TraceEntry {
            stage: name.into(),
            in_funcs: in_sig.funcs().len(),
            in_rels: in_sig.rels().len(),
            out_funcs: sig.funcs().len(),
            out_rels: sig.rels().len(),
            in_size: in_phi.size(),
            out_size: formula.size(),
        };
        debug_assert!(formula.check(&sig).is_ok(), "stage {} is ill-formed", entry.stage);
        ReductionResult {
            sig,
            formula,
            equality: None,
            forward: Some(forward),
            backward: Some(backward),
            trace: vec![entry],
        }
    }

    /// The trivial reduction.
    pub fn identity(sig: &Signature, phi: &Formula) -> ReductionResult {
        let id: Transport = Arc::new(|i: &Interpretation| Ok(i.clone()));
        ReductionResult {
            sig: sig.clone(),
            formula: phi.clone(),
            equality: None,
            forward: Some(id.clone()),
            backward: Some(id),
            trace: Vec::new(),
        }
    }

    /// Runs `next` on this output and composes transports and traces.
    pub fn then(
        self,
        next: impl FnOnce(&Signature, &Formula) -> Result<ReductionResult, ReductionError>,
    ) -> Result<ReductionResult, ReductionError> {
        let second = next(&self.sig, &self.formula)?;
        let forward = match (self.forward, second.forward) {
            (Some(a), Some(b)) => Some(Arc::new(move |i: &Interpretation| b(&a(i)?)) as Transport),
            _ => None,
        };
        let backward = match (self.backward, second.backward) {
            (Some(a), Some(b)) => Some(Arc::new(move |i: &Interpretation| a(&b(i)?)) as Transport),
            _ => None,
        };
        let mut trace = self.trace;
        trace.extend(second.trace);
        Ok(ReductionResult {
            sig: second.sig,
            formula: second.formula,
            equality: second.equality,
            forward,
            backward,
            trace,
        })
    }

    /// Carries an interpretation of the source formula to one of the output.
    pub fn forward(&self, i: &Interpretation) -> Result<Interpretation, ReductionError> {
        let t = self.forward.as_ref().ok_or(ReductionError::MissingTransport("forward"))?;
        t(i)
    }

    /// Carries an interpretation of the output formula back to one of the source.
    pub fn backward(&self, i: &Interpretation) -> Result<Interpretation, ReductionError> {
        let t = self.backward.as_ref().ok_or(ReductionError::MissingTransport("backward"))?;
        t(i)
    }
}

/// A variable position as a de Bruijn level; negative levels are free
/// variables of the enclosing formula (`-1 - j` is free variable `j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Lv(isize);

impl Lv {
    pub(crate) fn free(j: usize) -> Lv {
        Lv(-1 - j as isize)
    }
}

/// A term whose variables are levels, valid under any deeper binder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LTerm {
    Var(Lv),
    App(FuncId, Vec<LTerm>),
}

/// Builds formulas by level so that binders never need manual index arithmetic.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Builder {
    depth: usize,
}

impl Builder {
    pub(crate) fn at(depth: usize) -> Builder {
        Builder { depth }
    }

    pub(crate) fn var(&self, x: Lv) -> Term {
        let i = self.depth as isize - 1 - x.0;
        assert!(i >= 0, "level {x:?} not bound at depth {}", self.depth);
        Term::Var(i as usize)
    }

    /// Level of the variable that index `i` denotes at this depth.
    pub(crate) fn level(&self, i: usize) -> Lv {
        Lv(self.depth as isize - 1 - i as isize)
    }

    /// Reads a term valid at this depth as a level term.
    pub(crate) fn lterm(&self, t: &Term) -> LTerm {
        match t {
            Term::Var(i) => LTerm::Var(self.level(*i)),
            Term::App(f, args) => LTerm::App(*f, args.iter().map(|a| self.lterm(a)).collect()),
        }
    }

    pub(crate) fn term(&self, t: &LTerm) -> Term {
        match t {
            LTerm::Var(x) => self.var(*x),
            LTerm::App(f, args) => Term::App(*f, args.iter().map(|a| self.term(a)).collect()),
        }
    }

    pub(crate) fn quant(&self, q: Quantifier, body: impl FnOnce(Builder, Lv) -> Formula) -> Formula {
        let inner = Builder { depth: self.depth + 1 };
        Formula::Quant(q, Box::new(body(inner, Lv(self.depth as isize))))
    }

    pub(crate) fn all(&self, body: impl FnOnce(Builder, Lv) -> Formula) -> Formula {
        self.quant(Quantifier::All, body)
    }

    pub(crate) fn ex(&self, body: impl FnOnce(Builder, Lv) -> Formula) -> Formula {
        self.quant(Quantifier::Ex, body)
    }

    /// `n` nested quantifiers; the closure receives their levels outermost first.
    pub(crate) fn quant_n(&self, q: Quantifier, n: usize, body: impl FnOnce(Builder, &[Lv]) -> Formula) -> Formula {
        let levels: Vec<Lv> = (0..n).map(|i| Lv((self.depth + i) as isize)).collect();
        let inner = Builder { depth: self.depth + n };
        Formula::quant_n(q, n, body(inner, &levels))
    }

    pub(crate) fn atom(&self, p: RelId, args: &[Lv]) -> Formula {
        Formula::Atom(p, args.iter().map(|&x| self.var(x)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Quantifier;

    #[test]
    fn builder_levels() {
        let p = RelId(0);
        let b = Builder::at(0);
        // all x. ex y. P(x, y, free 0)
        let phi = b.all(|b, x| b.ex(|b, y| b.atom(p, &[x, y, Lv::free(0)])));
        let expect = Formula::all(Formula::ex(Formula::atom(
            p,
            vec![Term::Var(1), Term::Var(0), Term::Var(2)],
        )));
        assert_eq!(phi, expect);
        let psi = Builder::at(0).quant_n(Quantifier::All, 2, |b, v| b.atom(p, &[v[0], v[1]]));
        assert_eq!(psi, Formula::all_n(2, Formula::atom(p, vec![Term::Var(1), Term::Var(0)])));
    }

    #[test]
    fn builder_round_trips_indices() {
        let b = Builder::at(3);
        for i in 0..6 {
            assert_eq!(b.var(b.level(i)), Term::Var(i));
        }
    }
}
