//! First-order indistinguishability and quotient models.

use thiserror::Error;

use crate::semantics::{grid_size, index_tuple, Assignment, FiniteModel};
use crate::syntax::{Formula, FuncId, RelId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("element {0} of the source list has no related element")]
    TotalityViolation(usize),
    #[error("target list has {targets} elements, not fewer than the {sources} source elements")]
    NotSmaller { sources: usize, targets: usize },
}

/// Two positions `i < j` of `l` related to the same element `m[y]`.
pub fn php_witness<A, B>(
    rel: impl Fn(&A, &B) -> bool,
    l: &[A],
    m: &[B],
) -> Result<(usize, usize, usize), QuotientError> {
    if m.len() >= l.len() {
        return Err(QuotientError::NotSmaller { sources: l.len(), targets: m.len() });
    }
    let mut first: Vec<Option<usize>> = vec![None; m.len()];
    for (j, x) in l.iter().enumerate() {
        let y = m.iter().position(|y| rel(x, y)).ok_or(QuotientError::TotalityViolation(j))?;
        match first[y] {
            Some(i) => return Ok((i, j, y)),
            None => first[y] = Some(j),
        }
    }
    unreachable!("more sources than targets forces a collision")
}

/// A partition of `0..c.len()` into `count` classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivClasses {
    pub count: usize,
    /// Class of each element.
    pub c: Vec<usize>,
    /// Least member of each class.
    pub r: Vec<usize>,
    /// Refinement rounds until the relation stabilized.
    pub iterations: usize,
    /// `layer[x * k + y]`: the round in which `x` and `y` were separated.
    layer: Vec<Option<usize>>,
}

impl EquivClasses {
    pub fn same(&self, x: usize, y: usize) -> bool {
        self.c[x] == self.c[y]
    }

    /// Round in which `x` and `y` were told apart, if ever.
    pub fn layer(&self, x: usize, y: usize) -> Option<usize> {
        self.layer[x * self.c.len() + y]
    }
}

fn replace(k: usize, arity: usize, ctx: usize, i: usize, x: usize) -> Vec<usize> {
    let mut v = index_tuple(k, arity, ctx);
    v[i] = x;
    v
}

fn base_differs(m: &FiniteModel, ps: &[RelId], x: usize, y: usize) -> Option<(RelId, usize, Vec<usize>)> {
    let k = m.size();
    for &p in ps {
        let n = m.signature().rel(p).arity;
        for i in 0..n {
            for ctx in 0..grid_size(k, n) {
                let v = replace(k, n, ctx, i, x);
                let mut w = v.clone();
                w[i] = y;
                if m.holds(p, &v) != m.holds(p, &w) {
                    return Some((p, i, v));
                }
            }
        }
    }
    None
}

/// The coarsest congruence for `fs` that respects every relation in `ps`,
/// by refinement from the all-related relation.
pub fn indist_fixpoint(m: &FiniteModel, fs: &[FuncId], ps: &[RelId]) -> EquivClasses {
    let k = m.size();
    let mut layer: Vec<Option<usize>> = vec![None; k * k];
    for x in 0..k {
        for y in 0..k {
            if base_differs(m, ps, x, y).is_some() {
                layer[x * k + y] = Some(0);
            }
        }
    }
    let mut round = 0;
    loop {
        round += 1;
        assert!(round <= k * k + 1, "refinement must stabilize");
        let mut changed = false;
        let snapshot = layer.clone();
        for x in 0..k {
            for y in 0..k {
                if snapshot[x * k + y].is_some() {
                    continue;
                }
                let split = fs.iter().any(|&f| {
                    let n = m.signature().func(f).arity;
                    (0..n).any(|i| {
                        (0..grid_size(k, n)).any(|ctx| {
                            let v = replace(k, n, ctx, i, x);
                            let mut w = v.clone();
                            w[i] = y;
                            snapshot[m.apply(f, &v) * k + m.apply(f, &w)].is_some()
                        })
                    })
                });
                if split {
                    layer[x * k + y] = Some(round);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut c = vec![usize::MAX; k];
    let mut r = Vec::new();
    for x in 0..k {
        if c[x] == usize::MAX {
            for y in x..k {
                if layer[x * k + y].is_none() {
                    c[y] = r.len();
                }
            }
            r.push(x);
        }
    }
    EquivClasses { count: r.len(), c, r, iterations: round, layer }
}

/// A reason two elements differ: push both through `steps` (each a
/// function, an argument position and a context tuple), then the relation
/// context tells the results apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distinction {
    pub steps: Vec<(FuncId, usize, Vec<usize>)>,
    pub atom: (RelId, usize, Vec<usize>),
}

impl Distinction {
    /// Replays the distinction on `x` and `y`.
    pub fn separates(&self, m: &FiniteModel, x: usize, y: usize) -> bool {
        let push = |z: usize| {
            self.steps.iter().fold(z, |z, (f, i, ctx)| {
                let mut v = ctx.clone();
                v[*i] = z;
                m.apply(*f, &v)
            })
        };
        let (p, i, ctx) = &self.atom;
        let (mut v, mut w) = (ctx.clone(), ctx.clone());
        v[*i] = push(x);
        w[*i] = push(y);
        m.holds(*p, &v) != m.holds(*p, &w)
    }
}

/// Reconstructs why `x` and `y` ended up in different classes.
pub fn distinguish(
    m: &FiniteModel,
    fs: &[FuncId],
    ps: &[RelId],
    eq: &EquivClasses,
    x: usize,
    y: usize,
) -> Option<Distinction> {
    let k = m.size();
    let mut steps = Vec::new();
    let (mut x, mut y) = (x, y);
    loop {
        let layer = eq.layer(x, y)?;
        if layer == 0 {
            let atom = base_differs(m, ps, x, y).expect("separated at the base");
            return Some(Distinction { steps, atom });
        }
        let (f, i, v) = fs
            .iter()
            .find_map(|&f| {
                let n = m.signature().func(f).arity;
                (0..n).find_map(|i| {
                    (0..grid_size(k, n)).find_map(|ctx| {
                        let v = replace(k, n, ctx, i, x);
                        let mut w = v.clone();
                        w[i] = y;
                        let (a, b) = (m.apply(f, &v), m.apply(f, &w));
                        eq.layer(a, b).filter(|&l| l < layer).map(|_| (f, i, v))
                    })
                })
            })
            .expect("separated by an earlier round");
        let mut w = v.clone();
        w[i] = y;
        let (a, b) = (m.apply(f, &v), m.apply(f, &w));
        steps.push((f, i, v));
        x = a;
        y = b;
    }
}

/// The model on the classes of the symbols of `phi`, with tables read off
/// at representatives.
pub fn quotient_model(m: &FiniteModel, phi: &Formula) -> (FiniteModel, EquivClasses) {
    let (fs, ps) = phi.syms();
    let eq = indist_fixpoint(m, &fs, &ps);
    (quotient_by(m, &eq), eq)
}

/// Induces tables on the classes of `eq` through representatives.
pub fn quotient_by(m: &FiniteModel, eq: &EquivClasses) -> FiniteModel {
    let sig = m.signature();
    let mut q = FiniteModel::new(sig, eq.count).expect("at least one class");
    let rep = |t: &[usize]| t.iter().map(|&p| eq.r[p]).collect::<Vec<_>>();
    for f in sig.func_ids() {
        q.fill_func(f, |t| eq.c[m.apply(f, &rep(t))]);
    }
    for p in sig.rel_ids() {
        q.fill_rel(p, |t| m.holds(p, &rep(t)));
    }
    q
}

/// The assignment `c ∘ env`.
pub fn quotient_env(env: &Assignment, eq: &EquivClasses) -> Assignment {
    env.map(|a| eq.c[a])
}

/// Checks by table inspection that the classes form a congruence for `fs` and `ps`.
pub fn is_congruence(m: &FiniteModel, fs: &[FuncId], ps: &[RelId], eq: &EquivClasses) -> bool {
    let k = m.size();
    let sig = m.signature();
    let related = |v: &[usize], w: &[usize]| v.iter().zip(w).all(|(&a, &b)| eq.same(a, b));
    for &f in fs {
        let n = sig.func(f).arity;
        for a in 0..grid_size(k, n) {
            for b in 0..grid_size(k, n) {
                let (v, w) = (index_tuple(k, n, a), index_tuple(k, n, b));
                if related(&v, &w) && !eq.same(m.apply(f, &v), m.apply(f, &w)) {
                    return false;
                }
            }
        }
    }
    for &p in ps {
        let n = sig.rel(p).arity;
        for a in 0..grid_size(k, n) {
            let v = index_tuple(k, n, a);
            let w: Vec<usize> = v.iter().map(|&x| eq.r[eq.c[x]]).collect();
            if m.holds(p, &v) != m.holds(p, &w) {
                return false;
            }
        }
    }
    debug_assert!((0..eq.count).all(|p| eq.c[eq.r[p]] == p));
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Signature;

    fn unary(p_true: &[usize], f: Option<[usize; 2]>) -> FiniteModel {
        let s = Signature::from_symbols(&[("f", 1)], &[("P", 1)]).unwrap();
        let mut m = FiniteModel::new(&s, 2).unwrap();
        m.fill_rel(RelId(0), |t| p_true.contains(&t[0]));
        if let Some(f) = f {
            m.fill_func(FuncId(0), |t| f[t[0]]);
        }
        m
    }

    #[test]
    fn pigeonhole() {
        assert_eq!(php_witness(|_, _| true, &['a', 'b'], &['y']).unwrap(), (0, 1, 0));
        let map = |x: &char, y: &char| matches!((x, y), ('a', 'x') | ('b', 'y') | ('c', 'x'));
        assert_eq!(php_witness(map, &['a', 'b', 'c'], &['x', 'y']).unwrap(), (0, 2, 0));
        assert_eq!(php_witness(|_, _| false, &[1, 2], &[0]), Err(QuotientError::TotalityViolation(0)));
        assert!(php_witness(|_, _| true, &[1], &[0]).is_err());
    }

    #[test]
    fn fixpoint_examples() {
        let fs = [FuncId(0)];
        let ps = [RelId(0)];
        assert_eq!(indist_fixpoint(&unary(&[0, 1], None), &[], &ps).count, 1);
        assert_eq!(indist_fixpoint(&unary(&[0], None), &[], &ps).count, 2);
        assert_eq!(indist_fixpoint(&unary(&[], Some([1, 0])), &fs, &ps).count, 1);
        // P = {0}, f swaps: separated at the base only
        let m = unary(&[0], Some([1, 0]));
        let eq = indist_fixpoint(&m, &fs, &ps);
        assert_eq!(eq.count, 2);
        assert!(is_congruence(&m, &fs, &ps, &eq));
    }

    #[test]
    fn separation_through_functions() {
        // P = {3}; f: 0 -> 1 -> 2 -> 3 -> 3, so 0 and 1 differ two steps down
        let s = Signature::from_symbols(&[("f", 1)], &[("P", 1)]).unwrap();
        let mut m = FiniteModel::new(&s, 4).unwrap();
        m.fill_rel(RelId(0), |t| t[0] == 3);
        m.fill_func(FuncId(0), |t| (t[0] + 1).min(3));
        let (fs, ps) = ([FuncId(0)], [RelId(0)]);
        let eq = indist_fixpoint(&m, &fs, &ps);
        assert_eq!(eq.count, 4);
        assert_eq!(eq.layer(0, 1), Some(2));
        let d = distinguish(&m, &fs, &ps, &eq, 0, 1).unwrap();
        assert_eq!(d.steps.len(), 2);
        assert!(d.separates(&m, 0, 1));
    }

    #[test]
    fn quotient_collapses() {
        let m = unary(&[0, 1], Some([1, 0]));
        let s = m.signature().clone();
        let phi = Formula::all(Formula::atom(RelId(0), vec![crate::syntax::Term::app(FuncId(0), vec![crate::syntax::Term::var(0)])]));
        let (q, eq) = quotient_model(&m, &phi);
        assert_eq!(q.size(), 1);
        assert_eq!(eq.r, vec![0]);
        assert_eq!(q.signature(), &s);
        let (q2, eq2) = quotient_model(&q, &phi);
        assert_eq!((q2.size(), eq2.count), (1, 1));
    }
}
