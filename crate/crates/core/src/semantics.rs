//! Finite models given by explicit tables, and Tarski satisfaction over them.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use crate::syntax::{BinOp, Formula, FuncId, Quantifier, RelId, Signature, Term};

mod io;

pub use io::{parse_assignment, parse_model, print_assignment, print_model, ModelFileError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("domain must be inhabited")]
    EmptyDomain,
    #[error("domain sizes differ ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("element {elem} out of range for domain of size {size}")]
    OutOfRange { elem: usize, size: usize },
    #[error("table for `{name}` has {found} entries, expected {expected}")]
    TableShape {
        name: String,
        expected: usize,
        found: usize,
    },
}

/// Number of argument tuples of the given arity over `k` elements.
pub fn grid_size(k: usize, arity: usize) -> usize {
    k.checked_pow(arity as u32).expect("table grid overflows usize")
}

/// Row-major position of `args` in a table; the first argument is most significant.
pub fn tuple_index(k: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * k + a)
}

/// Inverse of [`tuple_index`].
pub fn index_tuple(k: usize, arity: usize, mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = idx % k;
        idx /= k;
    }
    out
}

/// All `arity`-tuples over `0..k` in table order.
pub fn tuples(k: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..grid_size(k, arity)).map(move |i| index_tuple(k, arity, i))
}

/// An interpretation of every symbol of a signature over `{0..size-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteModel {
    sig: Signature,
    size: usize,
    funcs: Vec<Vec<usize>>,
    rels: Vec<Vec<bool>>,
}

impl FiniteModel {
    /// The model with all-zero function tables and all-false relations.
    pub fn new(sig: &Signature, size: usize) -> Result<Self, ModelError> {
        if size == 0 {
            return Err(ModelError::EmptyDomain);
        }
        Ok(FiniteModel {
            sig: sig.clone(),
            size,
            funcs: sig.funcs().iter().map(|s| vec![0; grid_size(size, s.arity)]).collect(),
            rels: sig.rels().iter().map(|s| vec![false; grid_size(size, s.arity)]).collect(),
        })
    }

    /// Builds a model from complete tables, validating shapes and ranges.
    pub fn from_tables(
        sig: &Signature,
        size: usize,
        funcs: Vec<Vec<usize>>,
        rels: Vec<Vec<bool>>,
    ) -> Result<Self, ModelError> {
        if size == 0 {
            return Err(ModelError::EmptyDomain);
        }
        if funcs.len() != sig.funcs().len() || rels.len() != sig.rels().len() {
            return Err(ModelError::SignatureMismatch);
        }
        for (sym, t) in sig.funcs().iter().zip(&funcs) {
            let expected = grid_size(size, sym.arity);
            if t.len() != expected {
                return Err(ModelError::TableShape {
                    name: sym.name.clone(),
                    expected,
                    found: t.len(),
                });
            }
            if let Some(&v) = t.iter().find(|&&v| v >= size) {
                return Err(ModelError::OutOfRange { elem: v, size });
            }
        }
        for (sym, t) in sig.rels().iter().zip(&rels) {
            let expected = grid_size(size, sym.arity);
            if t.len() != expected {
                return Err(ModelError::TableShape {
                    name: sym.name.clone(),
                    expected,
                    found: t.len(),
                });
            }
        }
        Ok(FiniteModel {
            sig: sig.clone(),
            size,
            funcs,
            rels,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn func_table(&self, f: FuncId) -> &[usize] {
        &self.funcs[f.0]
    }

    pub fn rel_table(&self, p: RelId) -> &[bool] {
        &self.rels[p.0]
    }

    pub fn func_table_mut(&mut self, f: FuncId) -> &mut [usize] {
        &mut self.funcs[f.0]
    }

    pub fn rel_table_mut(&mut self, p: RelId) -> &mut [bool] {
        &mut self.rels[p.0]
    }

    pub fn apply(&self, f: FuncId, args: &[usize]) -> usize {
        self.funcs[f.0][tuple_index(self.size, args)]
    }

    pub fn holds(&self, p: RelId, args: &[usize]) -> bool {
        self.rels[p.0][tuple_index(self.size, args)]
    }

    pub fn set_func(&mut self, f: FuncId, args: &[usize], value: usize) {
        assert!(value < self.size, "function value out of range");
        let i = tuple_index(self.size, args);
        self.funcs[f.0][i] = value;
    }

    pub fn set_rel(&mut self, p: RelId, args: &[usize], value: bool) {
        let i = tuple_index(self.size, args);
        self.rels[p.0][i] = value;
    }

    /// Fills the table of `p` from a predicate on argument tuples.
    pub fn fill_rel(&mut self, p: RelId, mut pred: impl FnMut(&[usize]) -> bool) {
        let (k, a) = (self.size, self.sig.rel(p).arity);
        for (i, t) in tuples(k, a).enumerate() {
            self.rels[p.0][i] = pred(&t);
        }
    }

    /// Fills the table of `f` from a function on argument tuples.
    pub fn fill_func(&mut self, f: FuncId, mut fun: impl FnMut(&[usize]) -> usize) {
        let (k, a) = (self.size, self.sig.func(f).arity);
        for (i, t) in tuples(k, a).enumerate() {
            let v = fun(&t);
            assert!(v < k, "function value out of range");
            self.funcs[f.0][i] = v;
        }
    }

    /// Relation `p` as `(table, arity)` true tuples.
    pub fn true_tuples(&self, p: RelId) -> Vec<Vec<usize>> {
        let a = self.sig.rel(p).arity;
        self.rels[p.0]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| index_tuple(self.size, a, i))
            .collect()
    }
}

/// Variable assignment: explicit values for `0..prefix.len()`, `default` beyond.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    pub prefix: Vec<usize>,
    pub default: usize,
}

impl Assignment {
    /// Every variable sent to 0; the canonical choice for closed formulas.
    pub fn zeros() -> Self {
        Self::default()
    }

    pub fn new(prefix: Vec<usize>, default: usize) -> Self {
        Assignment { prefix, default }
    }

    pub fn get(&self, i: usize) -> usize {
        self.prefix.get(i).copied().unwrap_or(self.default)
    }

    /// Sets variable `i`, padding the prefix with the default.
    pub fn set(&mut self, i: usize, v: usize) {
        if self.prefix.len() <= i {
            self.prefix.resize(i + 1, self.default);
        }
        self.prefix[i] = v;
    }

    /// The de Bruijn extension `a . rho`.
    pub fn cons(&self, a: usize) -> Assignment {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(a);
        prefix.extend_from_slice(&self.prefix);
        Assignment {
            prefix,
            default: self.default,
        }
    }

    /// Pointwise image under `f`.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> Assignment {
        Assignment {
            prefix: self.prefix.iter().map(|&v| f(v)).collect(),
            default: f(self.default),
        }
    }

    pub fn check(&self, size: usize) -> Result<(), ModelError> {
        match self.prefix.iter().chain([&self.default]).find(|&&v| v >= size) {
            Some(&elem) => Err(ModelError::OutOfRange { elem, size }),
            None => Ok(()),
        }
    }
}

/// A model together with a variable assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub model: FiniteModel,
    pub env: Assignment,
}

impl Interpretation {
    pub fn new(model: FiniteModel, env: Assignment) -> Self {
        Interpretation { model, env }
    }

    pub fn closed(model: FiniteModel) -> Self {
        Interpretation {
            model,
            env: Assignment::zeros(),
        }
    }

    pub fn satisfies(&self, phi: &Formula) -> bool {
        satisfies(&self.model, &self.env, phi)
    }
}

pub fn eval_term(m: &FiniteModel, env: &Assignment, t: &Term) -> usize {
    match t {
        Term::Var(i) => env.get(*i),
        Term::App(f, args) => {
            let vals: Vec<usize> = args.iter().map(|a| eval_term(m, env, a)).collect();
            m.apply(*f, &vals)
        }
    }
}

/// Domain size from which bounded quantifiers use a member index instead of a scan.
const INDEX_THRESHOLD: usize = 12;

type PosIndex = Rc<Vec<Rc<[usize]>>>;

struct Evaluator<'a> {
    m: &'a FiniteModel,
    env: &'a Assignment,
    stack: Vec<usize>,
    indices: RefCell<HashMap<(usize, usize), PosIndex>>,
    /// Free variables of each quantified subformula worth memoizing, keyed
    /// by node address; `None` for bodies without a nested quantifier.
    free: HashMap<*const Formula, Option<Rc<[usize]>>>,
    /// Truth of a quantified subformula under the values of its free variables.
    memo: HashMap<(*const Formula, Vec<usize>), bool>,
    guards: HashMap<(*const Formula, Vec<usize>), Rc<[usize]>>,
    guard_vars: HashMap<*const Formula, Rc<[usize]>>,
}

impl<'a> Evaluator<'a> {
    fn var(&self, i: usize) -> usize {
        let n = self.stack.len();
        if i < n {
            self.stack[n - 1 - i]
        } else {
            self.env.get(i - n)
        }
    }

    fn term(&self, t: &Term) -> usize {
        match t {
            Term::Var(i) => self.var(*i),
            Term::App(f, args) => {
                let k = self.m.size;
                let idx = args.iter().fold(0, |acc, a| acc * k + self.term(a));
                self.m.funcs[f.0][idx]
            }
        }
    }

    fn atom(&self, p: RelId, args: &[Term]) -> bool {
        let k = self.m.size;
        let idx = args.iter().fold(0, |acc, a| acc * k + self.term(a));
        self.m.rels[p.0][idx]
    }

    /// For `pos`, lists `z` with `p(.., z at pos, ..)` keyed by the other arguments.
    fn index(&self, p: RelId, pos: usize) -> PosIndex {
        if let Some(ix) = self.indices.borrow().get(&(p.0, pos)) {
            return ix.clone();
        }
        let k = self.m.size;
        let arity = self.m.sig.rel(p).arity;
        let stride = grid_size(k, arity - 1 - pos);
        let mut buckets = vec![Vec::new(); grid_size(k, arity - 1)];
        for (i, &b) in self.m.rels[p.0].iter().enumerate() {
            if b {
                let z = (i / stride) % k;
                let key = (i / (stride * k)) * stride + i % stride;
                buckets[key].push(z);
            }
        }
        let ix: PosIndex = Rc::new(buckets.into_iter().map(Rc::from).collect());
        self.indices.borrow_mut().insert((p.0, pos), ix.clone());
        ix
    }

    /// Recognises `all z. G1 -> G2 -> .. -> body` and `ex z. G1 /\ G2 /\ .. /\ body`
    /// and returns a superset of the `z` for which the body is not trivially
    /// decided: the smallest candidate list among the atomic guards `Gi`
    /// that mention `z`.
    fn bounded_candidates(&mut self, q: Quantifier, body: &Formula) -> Option<Rc<[usize]>> {
        let mut best: Option<Rc<[usize]>> = None;
        let mut cur = body;
        loop {
            let (g, rest) = match (q, cur) {
                (Quantifier::All, Formula::Bin(BinOp::Impl, g, r)) => (g.as_ref(), r.as_ref()),
                (Quantifier::Ex, Formula::Bin(BinOp::And, g, r)) => (g.as_ref(), r.as_ref()),
                _ => break,
            };
            if let Some(c) = self.guard_candidates(g) {
                if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                    best = Some(c);
                }
            }
            cur = rest;
        }
        best
    }

    /// The `z` (variable 0) satisfying an atomic guard, if `guard` is one.
    fn guard_candidates(&mut self, guard: &Formula) -> Option<Rc<[usize]>> {
        let Formula::Atom(p, args) = guard else {
            return None;
        };
        let mut pos = None;
        let mut direct = true;
        for (j, a) in args.iter().enumerate() {
            match a {
                Term::Var(0) if pos.is_none() => pos = Some(j),
                a if a.mentions_var(0) => direct = false,
                _ => {}
            }
        }
        match pos {
            Some(pos) if direct => {
                let k = self.m.size;
                self.stack.push(0);
                let key = args
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != pos)
                    .fold(0, |acc, (_, a)| acc * k + self.term(a));
                self.stack.pop();
                Some(self.index(*p, pos)[key].clone())
            }
            _ if args.iter().any(|a| a.mentions_var(0)) => Some(self.scan_guard(guard)),
            _ => None,
        }
    }

    /// Elements `z` making `guard` (with `z` as variable 0) true, cached by
    /// the values of the guard's other variables.
    fn scan_guard(&mut self, guard: &Formula) -> Rc<[usize]> {
        let node = guard as *const Formula;
        let others = self
            .guard_vars
            .entry(node)
            .or_insert_with(|| guard.free_vars().into_iter().filter(|&i| i > 0).collect())
            .clone();
        let key = (node, others.iter().map(|&i| self.var(i - 1)).collect::<Vec<_>>());
        if let Some(c) = self.guards.get(&key) {
            return c.clone();
        }
        let mut out = Vec::new();
        for z in 0..self.m.size {
            self.stack.push(z);
            if self.formula(guard) {
                out.push(z);
            }
            self.stack.pop();
        }
        let out: Rc<[usize]> = out.into();
        self.guards.insert(key, out.clone());
        out
    }

    fn formula(&mut self, phi: &Formula) -> bool {
        match phi {
            Formula::Bot => false,
            Formula::Atom(p, args) => self.atom(*p, args),
            Formula::Bin(op, a, b) => match op {
                BinOp::And => self.formula(a) && self.formula(b),
                BinOp::Or => self.formula(a) || self.formula(b),
                BinOp::Impl => !self.formula(a) || self.formula(b),
            },
            Formula::Quant(q, body) => {
                let k = self.m.size;
                if k < INDEX_THRESHOLD {
                    return self.iterate(*q, 0..k, body);
                }
                let node = phi as *const Formula;
                let free = self
                    .free
                    .entry(node)
                    .or_insert_with(|| (body.quantifier_depth() > 0).then(|| phi.free_vars().into()))
                    .clone();
                let key = free.map(|fv| (node, fv.iter().map(|&i| self.var(i)).collect::<Vec<_>>()));
                if let Some(v) = key.as_ref().and_then(|key| self.memo.get(key)) {
                    return *v;
                }
                let v = match self.bounded_candidates(*q, body) {
                    Some(cands) => self.iterate(*q, cands.iter().copied(), body),
                    None => self.iterate(*q, 0..k, body),
                };
                if let Some(key) = key {
                    self.memo.insert(key, v);
                }
                v
            }
        }
    }

    fn iterate(&mut self, q: Quantifier, elems: impl Iterator<Item = usize>, body: &Formula) -> bool {
        let want = q == Quantifier::Ex;
        for a in elems {
            self.stack.push(a);
            let r = self.formula(body);
            self.stack.pop();
            if r == want {
                return want;
            }
        }
        !want
    }
}

/// Tarski satisfaction `M |=_rho phi`; quantifiers range over the whole domain.
pub fn satisfies(m: &FiniteModel, env: &Assignment, phi: &Formula) -> bool {
    let mut ev = Evaluator {
        m,
        env,
        stack: Vec::new(),
        indices: RefCell::new(HashMap::new()),
        free: HashMap::new(),
        memo: HashMap::new(),
        guards: HashMap::new(),
        guard_vars: HashMap::new(),
    };
    ev.formula(phi)
}

/// Pointwise equality of the listed tables.
pub fn models_ext_equal(
    m1: &FiniteModel,
    m2: &FiniteModel,
    fs: &[FuncId],
    ps: &[RelId],
) -> Result<bool, ModelError> {
    if m1.size != m2.size {
        return Err(ModelError::SizeMismatch(m1.size, m2.size));
    }
    if m1.sig != m2.sig {
        return Err(ModelError::SignatureMismatch);
    }
    Ok(fs.iter().all(|f| m1.funcs[f.0] == m2.funcs[f.0])
        && ps.iter().all(|p| m1.rels[p.0] == m2.rels[p.0]))
}
