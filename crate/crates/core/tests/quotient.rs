use folmt_core::gen::{random_formula, random_model, Vocab};
use folmt_core::quotient::{distinguish, indist_fixpoint, php_witness, quotient_by, QuotientError};
use folmt_core::semantics::{index_tuple, FiniteModel};
use folmt_core::syntax::{FuncId, RelId, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every partition of `0..k` as a class vector in restricted-growth form.
fn partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |&m| m + 1);
        for c in 0..=next {
            cur.push(c);
            go(k, cur, out);
            cur.pop();
        }
    }
    go(k, &mut cur, &mut out);
    out
}

fn respects(m: &FiniteModel, fs: &[FuncId], ps: &[RelId], c: &[usize]) -> bool {
    let k = m.size();
    let sig = m.signature();
    let arities = fs.iter().map(|&f| (Some(f), None, sig.func(f).arity));
    let arities = arities.chain(ps.iter().map(|&p| (None, Some(p), sig.rel(p).arity)));
    for (f, p, n) in arities {
        let grid = k.pow(n as u32);
        for a in 0..grid {
            for b in 0..grid {
                let (v, w) = (index_tuple(k, n, a), index_tuple(k, n, b));
                if v.iter().zip(&w).any(|(&x, &y)| c[x] != c[y]) {
                    continue;
                }
                if let Some(f) = f {
                    if c[m.apply(f, &v)] != c[m.apply(f, &w)] {
                        return false;
                    }
                }
                if let Some(p) = p {
                    if m.holds(p, &v) != m.holds(p, &w) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn fixpoint_is_the_coarsest_congruence() {
    let s = Signature::from_symbols(&[("f", 1), ("g", 2)], &[("P", 1), ("R", 2)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..60 {
        let k = rng.gen_range(1..=4);
        let m = random_model(&s, k, &mut rng);
        let phi = random_formula(&s, &Vocab::all(&s), 3, 1, &mut rng);
        let (fs, ps) = phi.syms();
        let eq = indist_fixpoint(&m, &fs, &ps);
        let coarsest = partitions(k)
            .into_iter()
            .filter(|c| respects(&m, &fs, &ps, c))
            .min_by_key(|c| c.iter().max().unwrap() + 1)
            .unwrap();
        assert_eq!(eq.count, coarsest.iter().max().unwrap() + 1);
        for x in 0..k {
            for y in 0..k {
                assert_eq!(eq.same(x, y), coarsest[x] == coarsest[y]);
                if !eq.same(x, y) {
                    assert!(distinguish(&m, &fs, &ps, &eq, x, y).unwrap().separates(&m, x, y));
                } else {
                    assert!(distinguish(&m, &fs, &ps, &eq, x, y).is_none());
                }
            }
        }
    }
}

#[test]
fn swap_without_predicates_collapses() {
    let s = Signature::from_symbols(&[("f", 1)], &[("P", 1)]).unwrap();
    let mut m = FiniteModel::new(&s, 2).unwrap();
    m.fill_func(FuncId(0), |t| 1 - t[0]);
    let eq = indist_fixpoint(&m, &[FuncId(0)], &[RelId(0)]);
    assert_eq!(eq.count, 1);
    let q = quotient_by(&m, &eq);
    assert_eq!(q.size(), 1);
    assert_eq!(q.func_table(FuncId(0)), &[0]);
}

#[test]
fn pigeonhole_on_random_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..100 {
        let l: Vec<u32> = (0..rng.gen_range(2..8)).collect();
        let m: Vec<char> = ('a'..).take(rng.gen_range(1..l.len())).collect();
        let pick: Vec<usize> = l.iter().map(|_| rng.gen_range(0..m.len())).collect();
        let rel = |x: &u32, y: &char| m[pick[*x as usize]] == *y;
        let (i, j, y) = php_witness(rel, &l, &m).unwrap();
        assert!(i < j && rel(&l[i], &m[y]) && rel(&l[j], &m[y]));
    }
}

#[test]
fn pigeonhole_preconditions() {
    let always = |_: &usize, _: &usize| true;
    assert!(matches!(php_witness(always, &[0, 1], &[0, 1]), Err(QuotientError::NotSmaller { .. })));
    let never = |_: &usize, _: &usize| false;
    assert_eq!(php_witness(never, &[0, 1], &[0]), Err(QuotientError::TotalityViolation(0)));
}
