//! Compressing one n-ary relation into binary membership, and membership
//! into one function plus one unary predicate.

use std::sync::Arc;

use super::{Builder, Lv, ReductionError, ReductionResult};
use crate::hfs::{membership_signature, relation_to_membership_model};
use crate::semantics::{satisfies, Assignment, FiniteModel, Interpretation};
use crate::syntax::{Formula, FuncId, Quantifier, RelId, Signature, Term};

const IN: RelId = RelId(0);

fn mem(b: Builder, x: Lv, y: Lv) -> Formula {
    b.atom(IN, &[x, y])
}

/// Same members, with both inclusions quantified over members only.
fn ext_eq(b: Builder, x: Lv, y: Lv) -> Formula {
    Formula::and(
        b.all(|b, z| Formula::imp(mem(b, z, x), mem(b, z, y))),
        b.all(|b, z| Formula::imp(mem(b, z, y), mem(b, z, x))),
    )
}

/// `z = {a}`.
fn is_sing(b: Builder, z: Lv, a: Lv) -> Formula {
    Formula::and(mem(b, a, z), b.all(|b, w| Formula::imp(mem(b, w, z), ext_eq(b, w, a))))
}

/// `z = {a, c}`.
fn is_doub(b: Builder, z: Lv, a: Lv, c: Lv) -> Formula {
    Formula::conj([
        mem(b, a, z),
        mem(b, c, z),
        b.all(|b, w| Formula::imp(mem(b, w, z), Formula::or(ext_eq(b, w, a), ext_eq(b, w, c)))),
    ])
}

/// `p = {{a}, {a, c}}`.
fn is_pair(b: Builder, p: Lv, a: Lv, c: Lv) -> Formula {
    Formula::conj([
        b.ex(|b, z| Formula::and(mem(b, z, p), is_sing(b, z, a))),
        b.ex(|b, z| Formula::and(mem(b, z, p), is_doub(b, z, a, c))),
        b.all(|b, z| Formula::imp(mem(b, z, p), Formula::or(is_sing(b, z, a), is_doub(b, z, a, c)))),
    ])
}

/// `p` is the right-nested tuple of `vs`; the second component is found
/// as a member of a member of `p`.
fn is_tuple(b: Builder, p: Lv, vs: &[Lv]) -> Formula {
    match vs {
        [] => unreachable!("tuples are nonempty"),
        [v] => ext_eq(b, p, *v),
        [v, rest @ ..] => b.ex(|b, z| {
            Formula::and(
                mem(b, z, p),
                b.ex(|b, q| Formula::conj([mem(b, q, z), is_tuple(b, q, rest), is_pair(b, p, *v, q)])),
            )
        }),
    }
}

/// Some member of `r` is the tuple of `vs`.
fn tuple_in(b: Builder, vs: &[Lv], r: Lv) -> Formula {
    b.ex(|b, p| Formula::and(mem(b, p, r), is_tuple(b, p, vs)))
}

fn args_as_levels(b: Builder, args: &[Term]) -> Vec<Lv> {
    args.iter()
        .map(|t| match t {
            Term::Var(i) => b.level(*i),
            Term::App(..) => unreachable!("function-free source"),
        })
        .collect()
}

/// Rewrites atoms with `atom` and relativizes every quantifier to `dom`.
fn relativize(
    phi: &Formula,
    depth: usize,
    atom: &impl Fn(Builder, &[Term]) -> Formula,
    dom: &impl Fn(Builder, Lv) -> Formula,
) -> Formula {
    match phi {
        Formula::Bot => Formula::Bot,
        Formula::Atom(_, args) => atom(Builder::at(depth), args),
        Formula::Bin(op, a, c) => Formula::Bin(
            *op,
            Box::new(relativize(a, depth, atom, dom)),
            Box::new(relativize(c, depth, atom, dom)),
        ),
        Formula::Quant(q, body) => {
            let inner = relativize(body, depth + 1, atom, dom);
            Builder::at(depth).quant(*q, |b, z| match q {
                Quantifier::All => Formula::imp(dom(b, z), inner),
                Quantifier::Ex => Formula::and(dom(b, z), inner),
            })
        }
    }
}

fn single_relation(sig: &Signature, arity: Option<usize>) -> Result<usize, ReductionError> {
    match (sig.funcs(), sig.rels()) {
        ([], [p]) if arity.is_none_or(|a| a == p.arity) => Ok(p.arity),
        _ => Err(ReductionError::Precondition(match arity {
            Some(a) => format!("signature must be exactly one relation of arity {a}"),
            None => "signature must be exactly one relation and no functions".into(),
        })),
    }
}

fn position_map(members: &[usize], size: usize) -> Vec<usize> {
    let mut pos = vec![0; size];
    for (j, &y) in members.iter().enumerate() {
        pos[y] = j;
    }
    pos
}

/// Encodes one `n`-ary relation as membership of tuples in a set `r`, with
/// quantifiers relativized to the members of a set `d`.
pub fn nary_to_membership(sig: &Signature, phi: &Formula) -> Result<ReductionResult, ReductionError> {
    let n = single_relation(sig, None)?;
    if n == 0 {
        return Err(ReductionError::Precondition("relation must have arity at least 1".into()));
    }
    let base = phi.fresh_var();
    let (d, r) = (Lv::free(base), Lv::free(base + 1));
    let b = Builder::at(0);
    let extensional = b.quant_n(Quantifier::All, 2, |b, v| {
        Formula::imp(
            ext_eq(b, v[0], v[1]),
            b.all(|b, z| Formula::imp(mem(b, v[0], z), mem(b, v[1], z))),
        )
    });
    let inhabited = b.ex(|b, z| mem(b, z, d));
    let free_in_d = Formula::conj(phi.free_vars().into_iter().map(|j| mem(b, Lv::free(j), d)));
    let body = relativize(
        phi,
        0,
        &|b, args| tuple_in(b, &args_as_levels(b, args), r),
        &|b, z| mem(b, z, d),
    );
    let formula = Formula::conj([extensional, inhabited, free_in_d, body]);
    let out = membership_signature();

    let forward = Arc::new(move |i: &Interpretation| {
        let mm = relation_to_membership_model(i.model.size(), n, i.model.rel_table(RelId(0)))
            .map_err(|e| ReductionError::Transport(e.to_string()))?;
        let mut env = Assignment::new((0..base).map(|j| mm.i[i.env.get(j)]).collect(), mm.i[i.env.default]);
        env.set(base, mm.d);
        env.set(base + 1, mm.r);
        Ok(Interpretation::new(mm.to_model(), env))
    });
    let src = sig.clone();
    let probe = tuple_in(
        Builder::at(0),
        &(0..n).map(Lv::free).collect::<Vec<_>>(),
        Lv::free(n),
    );
    let backward = Arc::new(move |i: &Interpretation| {
        let (dv, rv) = (i.env.get(base), i.env.get(base + 1));
        let k = i.model.size();
        let members: Vec<usize> = (0..k).filter(|&y| i.model.holds(IN, &[y, dv])).collect();
        if members.is_empty() {
            return Err(ReductionError::Transport("the domain set has no members".into()));
        }
        let mut m = FiniteModel::new(&src, members.len())?;
        m.fill_rel(RelId(0), |t| {
            let mut prefix: Vec<usize> = t.iter().map(|&j| members[j]).collect();
            prefix.push(rv);
            satisfies(&i.model, &Assignment::new(prefix, 0), &probe)
        });
        let pos = position_map(&members, k);
        Ok(Interpretation::new(m, i.env.map(|y| pos[y])))
    });
    Ok(ReductionResult::stage("to-membership", (sig, phi), out, formula, forward, backward))
}

/// Encodes a binary relation `P(x, y)` as `Q(f(x, y, x, ..., x))` for an
/// `n`-ary `f`, relativizing quantifiers to `Q(f(d, x, d, ..., d))`.
pub fn membership_to_fun(sig: &Signature, phi: &Formula, n: usize) -> Result<ReductionResult, ReductionError> {
    if n < 2 {
        return Err(ReductionError::Precondition(format!("function arity must be at least 2, got {n}")));
    }
    single_relation(sig, Some(2))?;
    let f = FuncId(0);
    let q = RelId(0);
    let out = Signature::from_symbols(&[("f", n)], &[("Q", 1)])?;
    let base = phi.fresh_var();
    let d = Lv::free(base);
    let app = move |b: Builder, x: Lv, y: Lv| {
        let mut args = vec![b.var(x), b.var(y)];
        args.resize(n, b.var(x));
        Formula::Atom(q, vec![Term::App(f, args)])
    };
    let dom = move |b: Builder, x: Lv| {
        let mut args = vec![b.var(d), b.var(x)];
        args.resize(n, b.var(d));
        Formula::Atom(q, vec![Term::App(f, args)])
    };
    let b = Builder::at(0);
    let mut parts = vec![b.ex(dom)];
    parts.extend(phi.free_vars().into_iter().map(|j| dom(b, Lv::free(j))));
    parts.push(relativize(
        phi,
        0,
        &|b, args| {
            let v = args_as_levels(b, args);
            app(b, v[0], v[1])
        },
        &dom,
    ));
    let formula = Formula::conj(parts);

    let out1 = out.clone();
    let forward = Arc::new(move |i: &Interpretation| {
        let k = i.model.size();
        let (dstar, yes) = (k, k + 1);
        let mut m = FiniteModel::new(&out1, k + 2)?;
        m.fill_func(f, |t| {
            let hit = (t[0] < k && t[1] < k && i.model.holds(RelId(0), &t[..2])) || (t[0] == dstar && t[1] < k);
            if hit {
                yes
            } else {
                dstar
            }
        });
        m.set_rel(q, &[yes], true);
        let mut env = i.env.clone();
        env.set(base, dstar);
        Ok(Interpretation::new(m, env))
    });
    let src = sig.clone();
    let backward = Arc::new(move |i: &Interpretation| {
        let dv = i.env.get(base);
        let k = i.model.size();
        let apply = |x: usize, y: usize, pad: usize| {
            let mut args = vec![x, y];
            args.resize(n, pad);
            i.model.holds(q, &[i.model.apply(f, &args)])
        };
        let members: Vec<usize> = (0..k).filter(|&x| apply(dv, x, dv)).collect();
        if members.is_empty() {
            return Err(ReductionError::Transport("the domain predicate is empty".into()));
        }
        let mut m = FiniteModel::new(&src, members.len())?;
        m.fill_rel(RelId(0), |t| apply(members[t[0]], members[t[1]], members[t[0]]));
        let pos = position_map(&members, k);
        Ok(Interpretation::new(m, i.env.map(|y| pos[y])))
    });
    Ok(ReductionResult::stage(
        format!("to-fun:{n}"),
        (sig, phi),
        out,
        formula,
        forward,
        backward,
    ))
}
