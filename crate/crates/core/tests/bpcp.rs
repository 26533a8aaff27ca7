use folmt_core::bpcp::{
    self, build_model, derives, encode, extract_solution, index_string, parse_instance, solve, string_index, BitStr,
    BpcpError, BpcpInstance,
};
use folmt_core::search::{fsat_on_domain, fsateq_on_domain, SearchConfig};
use folmt_core::semantics::{satisfies, Assignment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn inst(pairs: &[(&str, &str)]) -> BpcpInstance {
    BpcpInstance::from_strs(pairs).unwrap()
}

/// Shortest `s` with a nonempty index sequence giving `s/s`, `|s| <= maxlen`,
/// by enumerating index sequences. Every pair must be nonempty somewhere.
fn oracle_shortest(r: &BpcpInstance, maxlen: usize) -> Option<usize> {
    fn go(r: &BpcpInstance, s: &BitStr, t: &BitStr, depth: usize, maxlen: usize, best: &mut Option<usize>) {
        let (short, long) = if s.len() <= t.len() { (s, t) } else { (t, s) };
        if short.bits() != &long.bits()[..short.len()] || long.len() > maxlen {
            return;
        }
        if depth > 0 && s == t {
            *best = Some(best.map_or(s.len(), |b: usize| b.min(s.len())));
        }
        if depth >= 2 * maxlen {
            return;
        }
        for (a, b) in &r.pairs {
            go(r, &s.concat(a), &t.concat(b), depth + 1, maxlen, best);
        }
    }
    let mut best = None;
    go(r, &BitStr::empty(), &BitStr::empty(), 0, maxlen, &mut best);
    best
}

fn random_instance(rng: &mut ChaCha8Rng) -> BpcpInstance {
    let word = |rng: &mut ChaCha8Rng, min: usize| -> BitStr {
        let len = rng.gen_range(min..=3);
        BitStr((0..len).map(|_| rng.gen_bool(0.5)).collect())
    };
    let n = rng.gen_range(1..=3);
    let pairs = (0..n)
        .map(|_| {
            let a = word(rng, 0);
            let b = word(rng, if a.is_empty() { 1 } else { 0 });
            (a, b)
        })
        .collect();
    BpcpInstance::new(pairs)
}

#[test]
fn solve_agrees_with_sequence_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut solved = 0;
    for _ in 0..150 {
        let r = random_instance(&mut rng);
        let found = solve(&r, 4);
        assert_eq!(found.as_ref().map(BitStr::len), oracle_shortest(&r, 4), "{r}");
        if let Some(s) = found {
            assert!(derives(&r, &s, &s));
            solved += 1;
        }
    }
    assert!(solved > 10, "corpus too easy to be informative: {solved}");
}

#[test]
fn documented_instances() {
    let r = inst(&[("1", "11"), ("11", "1")]);
    assert_eq!(solve(&r, 8).unwrap().to_string(), "111");
    let r = inst(&[("1", "0")]);
    assert!(!derives(&r, &"1".parse().unwrap(), &"1".parse().unwrap()));
    assert_eq!(solve(&r, 8), None);
    assert_eq!(solve(&inst(&[("1", "1")]), 4).unwrap().to_string(), "1");
}

#[test]
fn instance_files_parse() {
    let r = parse_instance("# comment\n1 11\n\n- 0  # trailing\n").unwrap();
    assert_eq!(r, inst(&[("1", "11"), ("-", "0")]));
    assert_eq!(parse_instance(&r.to_string()).unwrap(), r);
    assert!(matches!(parse_instance("1 1\n1\n"), Err(BpcpError::Malformed { line: 2, .. })));
    assert!(matches!(parse_instance("1 2\n"), Err(BpcpError::Malformed { line: 1, .. })));
}

#[test]
fn string_positions_are_a_bijection() {
    for n in 0..5 {
        for s in BitStr::all_of_len(n) {
            assert_eq!(index_string(string_index(&s)), Some(s));
        }
    }
    assert_eq!(index_string(0), None);
}

#[test]
fn encoding_uses_the_fixed_signature() {
    let (sig, _) = encode(&inst(&[("1", "1")]));
    let funcs: Vec<&str> = sig.funcs().iter().map(|f| f.name.as_str()).collect();
    let rels: Vec<&str> = sig.rels().iter().map(|p| p.name.as_str()).collect();
    assert_eq!(funcs.len(), 4);
    assert_eq!(rels.len(), 3);
    assert_eq!(sig, bpcp::signature());
}

#[test]
fn witness_models_satisfy_and_yield_solutions() {
    for (pairs, n) in [(vec![("1", "1")], 1), (vec![("1", "11"), ("11", "1")], 3), (vec![("-", "-")], 0)] {
        let r = inst(&pairs);
        let m = build_model(&r, n);
        assert_eq!(m.size(), 1 << (n + 1));
        assert!(satisfies(&m, &Assignment::zeros(), &encode(&r).1), "{r}");
        let s = extract_solution(&r, &m).unwrap();
        assert!(derives(&r, &s, &s));
    }
}

#[test]
fn empty_instance_has_no_small_models() {
    let r = BpcpInstance::new(vec![]);
    let (sig, phi) = encode(&r);
    for k in 1..=2 {
        assert!(!fsat_on_domain(&sig, &phi, k, &SearchConfig::default()).unwrap().is_sat());
        assert!(!fsateq_on_domain(&sig, &phi, bpcp::EQ, k, &SearchConfig::default()).unwrap().is_sat());
    }
}

#[test]
fn extraction_rejects_non_models() {
    let r = inst(&[("1", "1")]);
    let mut m = build_model(&r, 1);
    for x in m.rel_table_mut(bpcp::P) {
        *x = false;
    }
    assert!(extract_solution(&r, &m).is_err());
}
