//! Finite model search: fixed domain size, increasing size, and the monadic decider.
//!
//! Only symbols occurring in the query are interpreted; every other table
//! keeps its default (all zero, all false). Free variables are searched
//! alongside the tables, so an open formula is satisfiable when some
//! model and some assignment satisfy it.

use rayon::prelude::*;
use thiserror::Error;

use crate::reductions::{self, ReductionError};
use crate::semantics::{grid_size, Assignment, FiniteModel, Interpretation};
use crate::syntax::{BinOp, Formula, FuncId, Quantifier, RelId, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat {
        model: FiniteModel,
        env: Assignment,
        size: usize,
    },
    Unsat,
    UnknownWithinBound {
        bound: usize,
    },
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat { .. })
    }

    pub fn size(&self) -> Option<usize> {
        match self {
            Verdict::Sat { size, .. } => Some(*size),
            _ => None,
        }
    }

    pub fn interpretation(&self) -> Option<Interpretation> {
        match self {
            Verdict::Sat { model, env, .. } => Some(Interpretation::new(model.clone(), env.clone())),
            _ => None,
        }
    }

    fn sat(i: Interpretation) -> Verdict {
        Verdict::Sat {
            size: i.model.size(),
            model: i.model,
            env: i.env,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("monadic decider needs {found} predicate symbols, above the cap of {cap}")]
    CapExceeded { found: usize, cap: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("domain size must be at least 1")]
    EmptyDomain,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// Knobs for the search procedures.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Worker threads; 1 keeps everything on the calling thread.
    pub jobs: usize,
    /// Candidate count up to which fixed-domain search enumerates exhaustively.
    pub exhaustive_limit: u128,
    /// Maximum number of unary predicates for the monadic decider; its
    /// search space is the 2^(2^n) sets of predicate vectors.
    pub monadic_cap: usize,
    /// Default upper bound for increasing-size search.
    pub max_domain: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            jobs: 1,
            exhaustive_limit: 1 << 20,
            monadic_cap: 4,
            max_domain: 6,
        }
    }
}

impl SearchConfig {
    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        if self.jobs <= 1 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.jobs).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}

/// Every interpretation of the listed symbols over `{0..k-1}`, each exactly once.
///
/// Unlisted symbols keep default tables. Models are produced in mixed-radix
/// order over the table cells of `fs` then `ps`.
pub fn enumerate_interpretations(
    sig: &Signature,
    fs: &[FuncId],
    ps: &[RelId],
    k: usize,
) -> impl Iterator<Item = FiniteModel> {
    let base = FiniteModel::new(sig, k).expect("k >= 1");
    let space = Space::new(&base, fs, ps, &[], 0);
    let count = space.count();
    let mut idx: u128 = 0;
    std::iter::from_fn(move || {
        let n = count?;
        if idx >= n {
            return None;
        }
        let values = space.decode(idx);
        idx += 1;
        Some(space.materialize(&values).model)
    })
}

/// The cells the search may choose: function cells, relation cells, free variables.
#[derive(Clone)]
struct Space {
    base: FiniteModel,
    /// slot of each (func, cell), if free
    func_slots: Vec<Option<Vec<usize>>>,
    rel_slots: Vec<Option<Vec<usize>>>,
    var_slots: Vec<usize>,
    /// per slot: number of values
    radix: Vec<usize>,
    eq: Option<RelId>,
}

impl Space {
    fn new(base: &FiniteModel, fs: &[FuncId], ps: &[RelId], eq: &[RelId], nvars: usize) -> Space {
        let sig = base.signature();
        let k = base.size();
        let mut radix = Vec::new();
        let mut func_slots = vec![None; sig.funcs().len()];
        for &f in fs {
            if func_slots[f.0].is_some() {
                continue;
            }
            let n = grid_size(k, sig.func(f).arity);
            func_slots[f.0] = Some((radix.len()..radix.len() + n).collect());
            radix.extend(std::iter::repeat_n(k, n));
        }
        let mut rel_slots = vec![None; sig.rels().len()];
        for &p in ps {
            if rel_slots[p.0].is_some() || eq.contains(&p) {
                continue;
            }
            let n = grid_size(k, sig.rel(p).arity);
            rel_slots[p.0] = Some((radix.len()..radix.len() + n).collect());
            radix.extend(std::iter::repeat_n(2, n));
        }
        let var_slots = (radix.len()..radix.len() + nvars).collect();
        radix.extend(std::iter::repeat_n(k, nvars));
        Space {
            base: base.clone(),
            func_slots,
            rel_slots,
            var_slots,
            radix,
            eq: eq.first().copied(),
        }
    }

    /// Total number of candidates, `None` on overflow.
    fn count(&self) -> Option<u128> {
        self.radix
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
    }

    /// Mixed-radix decoding, last slot fastest.
    fn decode(&self, mut n: u128) -> Vec<Option<usize>> {
        let mut out = vec![None; self.radix.len()];
        for (slot, &r) in self.radix.iter().enumerate().rev() {
            out[slot] = Some((n % r as u128) as usize);
            n /= r as u128;
        }
        out
    }

    fn materialize(&self, values: &[Option<usize>]) -> Interpretation {
        let mut m = self.base.clone();
        for (f, slots) in self.func_slots.iter().enumerate() {
            if let Some(slots) = slots {
                for (cell, &s) in slots.iter().enumerate() {
                    m.func_table_mut(FuncId(f))[cell] = values[s].unwrap_or(0);
                }
            }
        }
        for (p, slots) in self.rel_slots.iter().enumerate() {
            if let Some(slots) = slots {
                for (cell, &s) in slots.iter().enumerate() {
                    m.rel_table_mut(RelId(p))[cell] = values[s].unwrap_or(0) == 1;
                }
            }
        }
        let env = Assignment::new(
            self.var_slots.iter().map(|&s| values[s].unwrap_or(0)).collect(),
            0,
        );
        Interpretation::new(m, env)
    }
}

/// Evaluation over a partially chosen interpretation; `Err(slot)` names the
/// first unchosen cell the evaluation needed.
struct Partial<'a> {
    space: &'a Space,
    values: Vec<Option<usize>>,
    stack: Vec<usize>,
}

impl Partial<'_> {
    fn var(&self, i: usize) -> Result<usize, usize> {
        let n = self.stack.len();
        if i < n {
            return Ok(self.stack[n - 1 - i]);
        }
        match self.space.var_slots.get(i - n) {
            Some(&s) => self.values[s].ok_or(s),
            None => Ok(0),
        }
    }

    fn term(&self, t: &Term) -> Result<usize, usize> {
        match t {
            Term::Var(i) => self.var(*i),
            Term::App(f, args) => {
                let k = self.space.base.size();
                let mut idx = 0;
                for a in args {
                    idx = idx * k + self.term(a)?;
                }
                match &self.space.func_slots[f.0] {
                    Some(slots) => self.values[slots[idx]].ok_or(slots[idx]),
                    None => Ok(self.space.base.func_table(*f)[idx]),
                }
            }
        }
    }

    fn formula(&mut self, phi: &Formula) -> Result<bool, usize> {
        match phi {
            Formula::Bot => Ok(false),
            Formula::Atom(p, args) => {
                let k = self.space.base.size();
                if self.space.eq == Some(*p) {
                    let a = self.term(&args[0])?;
                    let b = self.term(&args[1])?;
                    return Ok(a == b);
                }
                let mut idx = 0;
                for a in args {
                    idx = idx * k + self.term(a)?;
                }
                match &self.space.rel_slots[p.0] {
                    Some(slots) => self.values[slots[idx]].map(|v| v == 1).ok_or(slots[idx]),
                    None => Ok(self.space.base.rel_table(*p)[idx]),
                }
            }
            Formula::Bin(op, a, b) => {
                let l = self.formula(a)?;
                match (op, l) {
                    (BinOp::And, false) => Ok(false),
                    (BinOp::Or, true) => Ok(true),
                    (BinOp::Impl, false) => Ok(true),
                    _ => self.formula(b),
                }
            }
            Formula::Quant(q, body) => {
                let want = *q == Quantifier::Ex;
                for a in 0..self.space.base.size() {
                    self.stack.push(a);
                    let r = self.formula(body);
                    self.stack.pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            }
        }
    }
}

struct Searcher<'a> {
    phi: &'a Formula,
    partial: Partial<'a>,
}

impl<'a> Searcher<'a> {
    fn new(space: &'a Space, phi: &'a Formula) -> Self {
        Searcher {
            phi,
            partial: Partial {
                space,
                values: vec![None; space.radix.len()],
                stack: Vec::new(),
            },
        }
    }

    fn eval(&mut self) -> Result<bool, usize> {
        self.partial.stack.clear();
        self.partial.formula(self.phi)
    }

    /// Depth-first search over the cells demanded by evaluation.
    fn dfs(&mut self) -> bool {
        match self.eval() {
            Ok(b) => b,
            Err(slot) => {
                for v in 0..self.partial.space.radix[slot] {
                    self.partial.values[slot] = Some(v);
                    if self.dfs() {
                        return true;
                    }
                }
                self.partial.values[slot] = None;
                false
            }
        }
    }

    fn solution(&self) -> Interpretation {
        self.partial.space.materialize(&self.partial.values)
    }
}

fn lazy_search(space: &Space, phi: &Formula, parallel: bool) -> Option<Interpretation> {
    let mut s = Searcher::new(space, phi);
    match s.eval() {
        Ok(true) => Some(s.solution()),
        Ok(false) => None,
        Err(slot) if parallel => (0..space.radix[slot]).into_par_iter().find_map_first(|v| {
            let mut s = Searcher::new(space, phi);
            s.partial.values[slot] = Some(v);
            s.dfs().then(|| s.solution())
        }),
        Err(_) => s.dfs().then(|| s.solution()),
    }
}

fn exhaustive_search(space: &Space, phi: &Formula, count: u128, parallel: bool) -> Option<Interpretation> {
    let check = |n: u128| {
        let mut p = Partial {
            space,
            values: space.decode(n),
            stack: Vec::new(),
        };
        matches!(p.formula(phi), Ok(true)).then(|| space.materialize(&p.values))
    };
    if parallel && count <= u64::MAX as u128 {
        (0..count as u64).into_par_iter().find_map_first(|n| check(n as u128))
    } else {
        (0..count).find_map(check)
    }
}

/// Which of the two complete fixed-size strategies a query would use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Exhaustive,
    Lazy,
}

fn query_space(sig: &Signature, phi: &Formula, eq: Option<RelId>, k: usize) -> Space {
    let mut base = FiniteModel::new(sig, k).expect("k >= 1");
    if let Some(e) = eq {
        base.fill_rel(e, |t| t[0] == t[1]);
    }
    let (fs, ps) = phi.syms();
    let eqs: Vec<RelId> = eq.into_iter().collect();
    Space::new(&base, &fs, &ps, &eqs, phi.fresh_var())
}

/// Complete decision of satisfiability over domain size `k` with a chosen strategy.
pub fn fsat_on_domain_with(
    sig: &Signature,
    phi: &Formula,
    eq: Option<RelId>,
    k: usize,
    strategy: Strategy,
    cfg: &SearchConfig,
) -> Result<Verdict, SearchError> {
    if k == 0 {
        return Err(SearchError::EmptyDomain);
    }
    if let Some(e) = eq {
        if sig.rel(e).arity != 2 {
            return Err(SearchError::Precondition("equality symbol must be binary".into()));
        }
    }
    let space = query_space(sig, phi, eq, k);
    let parallel = cfg.jobs > 1;
    let found = cfg.run(|| match (strategy, space.count()) {
        (Strategy::Exhaustive, Some(n)) => exhaustive_search(&space, phi, n, parallel),
        _ => lazy_search(&space, phi, parallel),
    });
    Ok(match found {
        Some(i) => {
            assert!(i.satisfies(phi), "search produced a non-model");
            Verdict::sat(i)
        }
        None => Verdict::Unsat,
    })
}

fn pick_strategy(sig: &Signature, phi: &Formula, eq: Option<RelId>, k: usize, cfg: &SearchConfig) -> Strategy {
    match query_space(sig, phi, eq, k).count() {
        Some(n) if n <= cfg.exhaustive_limit => Strategy::Exhaustive,
        _ => Strategy::Lazy,
    }
}

/// Decides whether `phi` has a model of size exactly `k`.
pub fn fsat_on_domain(sig: &Signature, phi: &Formula, k: usize, cfg: &SearchConfig) -> Result<Verdict, SearchError> {
    if k == 0 {
        return Err(SearchError::EmptyDomain);
    }
    let s = pick_strategy(sig, phi, None, k, cfg);
    fsat_on_domain_with(sig, phi, None, k, s, cfg)
}

/// As [`fsat_on_domain`], with `eq` interpreted as identity.
pub fn fsateq_on_domain(
    sig: &Signature,
    phi: &Formula,
    eq: RelId,
    k: usize,
    cfg: &SearchConfig,
) -> Result<Verdict, SearchError> {
    if k == 0 {
        return Err(SearchError::EmptyDomain);
    }
    let s = pick_strategy(sig, phi, Some(eq), k, cfg);
    fsat_on_domain_with(sig, phi, Some(eq), k, s, cfg)
}

/// Least model of size at most `kmax`; never answers `Unsat`.
pub fn fsat_bounded(sig: &Signature, phi: &Formula, kmax: usize, cfg: &SearchConfig) -> Result<Verdict, SearchError> {
    bounded(sig, phi, None, kmax, cfg)
}

pub fn fsateq_bounded(
    sig: &Signature,
    phi: &Formula,
    eq: RelId,
    kmax: usize,
    cfg: &SearchConfig,
) -> Result<Verdict, SearchError> {
    bounded(sig, phi, Some(eq), kmax, cfg)
}

fn bounded(
    sig: &Signature,
    phi: &Formula,
    eq: Option<RelId>,
    kmax: usize,
    cfg: &SearchConfig,
) -> Result<Verdict, SearchError> {
    if kmax == 0 {
        return Err(SearchError::EmptyDomain);
    }
    for k in 1..=kmax {
        let s = pick_strategy(sig, phi, eq, k, cfg);
        let v = fsat_on_domain_with(sig, phi, eq, k, s, cfg)?;
        if v.is_sat() {
            return Ok(v);
        }
    }
    Ok(Verdict::UnknownWithinBound { bound: kmax })
}

/// Kleene truth value; `Unknown` names a membership bit the value depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    True,
    False,
    Unknown(usize),
}

/// A partial choice of which predicate vectors are present in the domain.
struct VectorSearch<'a> {
    bit_of: Vec<Option<usize>>,
    phi: &'a Formula,
    member: Vec<Option<bool>>,
    present: usize,
    /// Once `present` reaches this many, undecided vectors count as absent.
    limit: usize,
    stack: Vec<usize>,
}

impl VectorSearch<'_> {
    fn membership(&self, v: usize) -> Option<bool> {
        match self.member[v] {
            None if self.present >= self.limit => Some(false),
            m => m,
        }
    }

    fn eval(&mut self, phi: &Formula) -> Tri {
        match phi {
            Formula::Bot => Tri::False,
            Formula::Atom(p, args) => {
                let Term::Var(i) = args[0] else { unreachable!("relational formula") };
                let v = self.stack[self.stack.len() - 1 - i];
                let bit = self.bit_of[p.0].expect("occurring relation");
                if v >> bit & 1 == 1 {
                    Tri::True
                } else {
                    Tri::False
                }
            }
            Formula::Bin(op, a, b) => {
                let (short, flip) = match op {
                    BinOp::And => (Tri::False, false),
                    BinOp::Or => (Tri::True, false),
                    BinOp::Impl => (Tri::True, true),
                };
                let mut l = self.eval(a);
                if flip {
                    l = match l {
                        Tri::True => Tri::False,
                        Tri::False => Tri::True,
                        u => u,
                    };
                }
                if l == short {
                    return short;
                }
                let r = self.eval(b);
                if r == short {
                    return short;
                }
                match (l, r) {
                    (Tri::Unknown(_), _) => l,
                    (_, Tri::Unknown(_)) => r,
                    _ => r,
                }
            }
            Formula::Quant(q, body) => {
                // ex: some present v with body; all: every present v has body
                let hit = if *q == Quantifier::Ex { Tri::True } else { Tri::False };
                let mut pending = None;
                for v in 0..self.member.len() {
                    let m = self.membership(v);
                    if m == Some(false) {
                        continue;
                    }
                    self.stack.push(v);
                    let r = self.eval(body);
                    self.stack.pop();
                    match (r, m) {
                        (r, Some(true)) if r == hit => return hit,
                        (Tri::Unknown(_), _) => {
                            pending.get_or_insert(r);
                        }
                        (r, None) if r == hit => {
                            pending.get_or_insert(Tri::Unknown(v));
                        }
                        _ => {}
                    }
                }
                pending.unwrap_or(if hit == Tri::True { Tri::False } else { Tri::True })
            }
        }
    }

    fn search(&mut self) -> bool {
        match self.eval(self.phi) {
            Tri::True => true,
            Tri::False => false,
            Tri::Unknown(v) => {
                for choice in [true, false] {
                    if choice && self.present >= self.limit {
                        continue;
                    }
                    self.member[v] = Some(choice);
                    self.present += choice as usize;
                    if self.search() {
                        return true;
                    }
                    self.present -= choice as usize;
                }
                self.member[v] = None;
                false
            }
        }
    }

    fn chosen(&self) -> Vec<usize> {
        (0..self.member.len()).filter(|&v| self.membership(v) == Some(true)).collect()
    }
}

/// Complete decider for formulas over unary relations only.
///
/// Elements agreeing on every predicate can be merged, so a satisfiable
/// formula has a model whose elements are distinct vectors of predicate
/// values. The decider branches on which vectors are present, evaluating
/// in three-valued logic to prune, and reports a model of least size.
pub fn monadic_rel_decide(sig: &Signature, phi: &Formula, cfg: &SearchConfig) -> Result<Verdict, SearchError> {
    if !sig.funcs().is_empty() {
        return Err(SearchError::Precondition("monadic relational signature has function symbols".into()));
    }
    if let Some(s) = sig.rels().iter().find(|s| s.arity != 1) {
        return Err(SearchError::Precondition(format!(
            "relation `{}` has arity {}, expected 1",
            s.name, s.arity
        )));
    }
    let (_, ps) = phi.syms();
    let n = ps.len();
    if n > cfg.monadic_cap {
        return Err(SearchError::CapExceeded {
            found: n,
            cap: cfg.monadic_cap,
        });
    }
    let mut bit_of = vec![None; sig.rels().len()];
    for (i, p) in ps.iter().enumerate() {
        bit_of[p.0] = Some(i);
    }
    let nvars = phi.fresh_var();
    let closed = Formula::and(Formula::ex(Formula::top()), Formula::ex_n(nvars, phi.clone()));
    let vectors = 1usize << n;
    let run = |limit: usize| {
        let mut s = VectorSearch {
            bit_of: bit_of.clone(),
            phi: &closed,
            member: vec![None; vectors],
            present: 0,
            limit,
            stack: Vec::new(),
        };
        s.search().then(|| s.chosen())
    };
    let Some(first) = run(vectors) else {
        return Ok(Verdict::Unsat);
    };
    let members = (1..first.len()).find_map(run).unwrap_or(first);
    let mut m = FiniteModel::new(sig, members.len()).expect("nonempty domain");
    for (i, &p) in ps.iter().enumerate() {
        m.fill_rel(p, |t| members[t[0]] >> i & 1 == 1);
    }
    let space = Space::new(&m, &[], &[], &[], nvars);
    let found = lazy_search(&space, phi, false).expect("closure was satisfied");
    assert!(found.satisfies(phi), "monadic decider produced a non-model");
    Ok(Verdict::sat(found))
}

/// Complete decider for signatures whose symbols all have arity at most 1.
///
/// Lifts nullary symbols, drops unused ones, replaces unary functions by
/// word-indexed predicates, decides the relational formula, and carries a
/// model back through every stage.
pub fn monadic_decide(sig: &Signature, phi: &Formula, cfg: &SearchConfig) -> Result<Verdict, SearchError> {
    if let Some(s) = sig.funcs().iter().chain(sig.rels()).find(|s| s.arity > 1) {
        return Err(SearchError::Precondition(format!(
            "symbol `{}` has arity {} > 1",
            s.name, s.arity
        )));
    }
    let chain = reductions::zero_arity_lift(sig, phi)?;
    let chain = chain.then(reductions::sig_gc)?;
    let chain = chain.then(reductions::monadic_fun_elim)?;
    let chain = chain.then(reductions::sig_gc)?;
    let verdict = monadic_rel_decide(&chain.sig, &chain.formula, cfg)?;
    match verdict {
        Verdict::Sat { model, env, .. } => {
            let back = chain.backward(&Interpretation::new(model, env))?;
            assert!(back.satisfies(phi), "monadic transport produced a non-model");
            Ok(Verdict::sat(back))
        }
        other => Ok(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_formula;

    fn p2() -> Signature {
        Signature::from_symbols::<&str>(&[], &[("P", 2)]).unwrap()
    }

    const ASYM: &str = "(ex (ex (and (rel P (var 1) (var 0)) (impl (rel P (var 0) (var 1)) bot))))";

    #[test]
    fn enumeration_counts() {
        let sig = p2();
        assert_eq!(enumerate_interpretations(&sig, &[], &[RelId(0)], 2).count(), 16);
        assert_eq!(enumerate_interpretations(&sig, &[], &[], 3).count(), 1);
        let f = Signature::from_symbols::<&str>(&[("f", 1)], &[]).unwrap();
        assert_eq!(enumerate_interpretations(&f, &[FuncId(0)], &[], 2).count(), 4);
    }

    #[test]
    fn enumeration_is_duplicate_free() {
        let sig = p2();
        let all: Vec<_> = enumerate_interpretations(&sig, &[], &[RelId(0)], 2).collect();
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
    }

    #[test]
    fn fixed_domain_examples() {
        let sig = p2();
        let cfg = SearchConfig::default();
        let phi = parse_formula(ASYM, &sig).unwrap();
        assert_eq!(fsat_on_domain(&sig, &phi, 1, &cfg).unwrap(), Verdict::Unsat);
        assert!(fsat_on_domain(&sig, &phi, 2, &cfg).unwrap().is_sat());
        assert!(fsat_on_domain(&sig, &Formula::top(), 1, &cfg).unwrap().is_sat());
    }

    #[test]
    fn strategies_agree() {
        let sig = p2();
        let cfg = SearchConfig::default();
        let phi = parse_formula(ASYM, &sig).unwrap();
        for k in 1..=3 {
            let a = fsat_on_domain_with(&sig, &phi, None, k, Strategy::Exhaustive, &cfg).unwrap();
            let b = fsat_on_domain_with(&sig, &phi, None, k, Strategy::Lazy, &cfg).unwrap();
            assert_eq!(a.is_sat(), b.is_sat());
        }
    }

    #[test]
    fn bounded_examples() {
        let sig = p2();
        let cfg = SearchConfig::default();
        let phi = parse_formula(ASYM, &sig).unwrap();
        assert_eq!(fsat_bounded(&sig, &phi, 3, &cfg).unwrap().size(), Some(2));
        assert_eq!(
            fsat_bounded(&sig, &Formula::Bot, 5, &cfg).unwrap(),
            Verdict::UnknownWithinBound { bound: 5 }
        );
        let q = Signature::from_symbols::<&str>(&[], &[("P", 1)]).unwrap();
        let all = parse_formula("(all (rel P (var 0)))", &q).unwrap();
        assert_eq!(fsat_bounded(&q, &all, 1, &cfg).unwrap().size(), Some(1));
    }

    #[test]
    fn parallel_search_is_deterministic() {
        let sig = p2();
        let phi = parse_formula(ASYM, &sig).unwrap();
        let seq = fsat_on_domain(&sig, &phi, 3, &SearchConfig::default()).unwrap();
        let cfg = SearchConfig {
            jobs: 4,
            ..SearchConfig::default()
        };
        for _ in 0..3 {
            assert_eq!(fsat_on_domain(&sig, &phi, 3, &cfg).unwrap(), seq);
        }
    }

    #[test]
    fn open_formulas_search_assignments() {
        let q = Signature::from_symbols::<&str>(&[], &[("P", 1)]).unwrap();
        // P(x0) /\ not P(x1)
        let phi = parse_formula("(and (rel P (var 0)) (impl (rel P (var 1)) bot))", &q).unwrap();
        let v = fsat_bounded(&q, &phi, 3, &SearchConfig::default()).unwrap();
        assert_eq!(v.size(), Some(2));
        assert!(v.interpretation().unwrap().satisfies(&phi));
    }

    #[test]
    fn equality_interpreted_search() {
        let sig = Signature::from_symbols::<&str>(&[], &[("eq", 2)]).unwrap();
        // ex x y. not x = y
        let phi = parse_formula("(ex (ex (impl (rel eq (var 0) (var 1)) bot)))", &sig).unwrap();
        let cfg = SearchConfig::default();
        assert_eq!(fsateq_on_domain(&sig, &phi, RelId(0), 1, &cfg).unwrap(), Verdict::Unsat);
        assert!(fsat_on_domain(&sig, &phi, 1, &cfg).unwrap().is_sat());
        assert!(fsateq_on_domain(&sig, &phi, RelId(0), 2, &cfg).unwrap().is_sat());
    }

    fn pq() -> Signature {
        Signature::from_symbols::<&str>(&[], &[("P", 1), ("Q", 1)]).unwrap()
    }

    #[test]
    fn monadic_rel_examples() {
        let sig = pq();
        let cfg = SearchConfig::default();
        let sat = parse_formula("(ex (and (rel P (var 0)) (impl (rel Q (var 0)) bot)))", &sig).unwrap();
        assert!(monadic_rel_decide(&sig, &sat, &cfg).unwrap().is_sat());
        let unsat = parse_formula(
            "(and (all (rel P (var 0))) (ex (impl (rel P (var 0)) bot)))",
            &sig,
        )
        .unwrap();
        assert_eq!(monadic_rel_decide(&sig, &unsat, &cfg).unwrap(), Verdict::Unsat);
        let two = parse_formula(
            "(and (all (or (rel P (var 0)) (rel Q (var 0)))) (and (ex (impl (rel P (var 0)) bot)) (ex (impl (rel Q (var 0)) bot))))",
            &sig,
        )
        .unwrap();
        assert_eq!(monadic_rel_decide(&sig, &two, &cfg).unwrap().size(), Some(2));
    }

    #[test]
    fn monadic_rel_cap_and_precondition() {
        let cfg = SearchConfig {
            monadic_cap: 1,
            ..SearchConfig::default()
        };
        let sig = pq();
        let phi = parse_formula("(ex (and (rel P (var 0)) (rel Q (var 0))))", &sig).unwrap();
        assert_eq!(
            monadic_rel_decide(&sig, &phi, &cfg),
            Err(SearchError::CapExceeded { found: 2, cap: 1 })
        );
        assert!(matches!(
            monadic_rel_decide(&p2(), &Formula::Bot, &SearchConfig::default()),
            Err(SearchError::Precondition(_))
        ));
    }

    #[test]
    fn monadic_full_examples() {
        let sig = Signature::from_symbols(&[("f", 1)], &[("P", 1)]).unwrap();
        let cfg = SearchConfig::default();
        let unsat = parse_formula(
            "(and (all (impl (rel P (var 0)) bot)) (all (rel P (app f (var 0)))))",
            &sig,
        )
        .unwrap();
        assert_eq!(monadic_decide(&sig, &unsat, &cfg).unwrap(), Verdict::Unsat);
        let sat = parse_formula(
            "(and (all (rel P (app f (var 0)))) (ex (impl (rel P (var 0)) bot)))",
            &sig,
        )
        .unwrap();
        let v = monadic_decide(&sig, &sat, &cfg).unwrap();
        assert_eq!(v.size(), Some(2));
        assert!(v.interpretation().unwrap().satisfies(&sat));
        let prop = Signature::from_symbols::<&str>(&[], &[("P", 0)]).unwrap();
        let contra = parse_formula("(and (rel P) (impl (rel P) bot))", &prop).unwrap();
        assert_eq!(monadic_decide(&prop, &contra, &cfg).unwrap(), Verdict::Unsat);
    }
}
