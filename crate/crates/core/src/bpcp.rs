//! Binary Post correspondence: derivability, bounded solving, the
//! first-order encoding, its intended models and solution extraction.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::reductions::{Builder, LTerm, Lv};
use crate::semantics::FiniteModel;
use crate::syntax::{FuncId, Formula, RelId, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BpcpError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("model is malformed: {0}")]
    ModelMalformed(String),
}

/// A finite bit string; `true` is the bit 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitStr(pub Vec<bool>);

impl BitStr {
    pub fn empty() -> BitStr {
        BitStr(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn concat(&self, other: &BitStr) -> BitStr {
        BitStr([self.0.as_slice(), other.0.as_slice()].concat())
    }

    /// All strings of length exactly `n`, lexicographically.
    pub fn all_of_len(n: usize) -> impl Iterator<Item = BitStr> {
        (0..1usize << n).map(move |v| BitStr((0..n).map(|i| v >> (n - 1 - i) & 1 == 1).collect()))
    }
}

impl fmt::Display for BitStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitStr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-" {
            return Ok(BitStr::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(format!("`{c}` is not a bit")),
            })
            .collect::<Result<_, _>>()
            .map(BitStr)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BpcpInstance {
    pub pairs: Vec<(BitStr, BitStr)>,
}

impl BpcpInstance {
    pub fn new(pairs: Vec<(BitStr, BitStr)>) -> BpcpInstance {
        BpcpInstance { pairs }
    }

    /// Convenience for tests and examples: `from_strs(&[("1", "11")])`.
    pub fn from_strs(pairs: &[(&str, &str)]) -> Result<BpcpInstance, BpcpError> {
        let text: Vec<String> = pairs.iter().map(|(s, t)| format!("{s} {t}")).collect();
        parse_instance(&text.join("\n"))
    }
}

impl fmt::Display for BpcpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, t) in &self.pairs {
            writeln!(f, "{s} {t}")?;
        }
        Ok(())
    }
}

/// One pair per line, `s t`, with `-` for the empty string. Blank lines
/// and `#` comments are skipped.
pub fn parse_instance(text: &str) -> Result<BpcpInstance, BpcpError> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| BpcpError::Malformed { line: n + 1, reason };
        let words: Vec<&str> = line.split_whitespace().collect();
        let [s, t] = words[..] else {
            return Err(bad(format!("expected two strings, found {}", words.len())));
        };
        pairs.push((s.parse().map_err(bad)?, t.parse().map_err(bad)?));
    }
    Ok(BpcpInstance { pairs })
}

/// Memoized derivability over suffixes of a fixed pair.
struct Deriver<'a> {
    r: &'a BpcpInstance,
    memo: HashMap<(Vec<bool>, Vec<bool>), bool>,
}

impl Deriver<'_> {
    fn go(&mut self, s: &[bool], t: &[bool]) -> bool {
        if let Some(&v) = self.memo.get(&(s.to_vec(), t.to_vec())) {
            return v;
        }
        let mut found = false;
        for (a, b) in &self.r.pairs {
            if s.starts_with(&a.0) && t.starts_with(&b.0) {
                if a.len() == s.len() && b.len() == t.len() {
                    found = true;
                    break;
                }
                // prepending (ε, ε) derives nothing new
                if !(a.is_empty() && b.is_empty()) && self.go(&s[a.len()..], &t[b.len()..]) {
                    found = true;
                    break;
                }
            }
        }
        self.memo.insert((s.to_vec(), t.to_vec()), found);
        found
    }
}

/// Whether `s/t` is derivable from the pairs of `r`.
pub fn derives(r: &BpcpInstance, s: &BitStr, t: &BitStr) -> bool {
    Deriver { r, memo: HashMap::new() }.go(&s.0, &t.0)
}

/// The shortest, then lexicographically least, solution of length at most `maxlen`.
pub fn solve(r: &BpcpInstance, maxlen: usize) -> Option<BitStr> {
    let mut d = Deriver { r, memo: HashMap::new() };
    (0..=maxlen).flat_map(BitStr::all_of_len).find(|s| d.go(&s.0, &s.0))
}

pub const STAR: FuncId = FuncId(0);
pub const E: FuncId = FuncId(1);
pub const F_TT: FuncId = FuncId(2);
pub const F_FF: FuncId = FuncId(3);
pub const P: RelId = RelId(0);
pub const PREC: RelId = RelId(1);
pub const EQ: RelId = RelId(2);

/// `({star, e, ftt¹, fff¹}; {P², prec², eq²})`.
pub fn signature() -> Signature {
    Signature::from_symbols(&[("star", 0), ("e", 0), ("ftt", 1), ("fff", 1)], &[("P", 2), ("prec", 2), ("eq", 2)])
        .expect("distinct names")
}

fn f_of(b: bool) -> FuncId {
    if b {
        F_TT
    } else {
        F_FF
    }
}

fn c(f: FuncId) -> LTerm {
    LTerm::App(f, Vec::new())
}

fn v(x: Lv) -> LTerm {
    LTerm::Var(x)
}

fn ap(f: FuncId, t: LTerm) -> LTerm {
    LTerm::App(f, vec![t])
}

/// The term for `s` followed by `tail`.
fn append(s: &BitStr, tail: LTerm) -> LTerm {
    s.0.iter().rev().fold(tail, |acc, &b| ap(f_of(b), acc))
}

fn rel(b: &Builder, p: RelId, x: &LTerm, y: &LTerm) -> Formula {
    Formula::Atom(p, vec![b.term(x), b.term(y)])
}

/// The closed formula satisfiable, with `eq` read as identity, exactly
/// when `r` has a solution.
pub fn encode(r: &BpcpInstance) -> (Signature, Formula) {
    let b0 = Builder::at(0);
    let eq = |b: &Builder, x: &LTerm, y: &LTerm| rel(b, EQ, x, y);
    let neq = |b: &Builder, x: &LTerm, y: &LTerm| Formula::not(rel(b, EQ, x, y));
    let star = c(STAR);

    let phi_p = b0.all(|b, x| {
        b.all(|b, y| {
            Formula::imp(
                rel(&b, P, &v(x), &v(y)),
                Formula::and(neq(&b, &v(x), &star), neq(&b, &v(y), &star)),
            )
        })
    });
    let phi_prec = Formula::and(
        b0.all(|b, x| Formula::not(rel(&b, PREC, &v(x), &v(x)))),
        b0.quant_n(crate::syntax::Quantifier::All, 3, |b, l| {
            let (x, y, z) = (v(l[0]), v(l[1]), v(l[2]));
            Formula::imp_chain([rel(&b, PREC, &x, &y), rel(&b, PREC, &y, &z)], rel(&b, PREC, &x, &z))
        }),
    );
    let fixes_star = Formula::and(
        eq(&b0, &ap(F_TT, star.clone()), &star),
        eq(&b0, &ap(F_FF, star.clone()), &star),
    );
    let avoids_e = |f: FuncId| b0.all(|b, x| neq(&b, &ap(f, v(x)), &c(E)));
    let injective = |f: FuncId| {
        b0.all(|b, x| {
            b.all(|b, y| {
                Formula::imp_chain(
                    [neq(&b, &ap(f, v(x)), &star), eq(&b, &ap(f, v(x)), &ap(f, v(y)))],
                    eq(&b, &v(x), &v(y)),
                )
            })
        })
    };
    let disjoint = b0.all(|b, x| {
        b.all(|b, y| {
            Formula::imp(
                eq(&b, &ap(F_TT, v(x)), &ap(F_FF, v(y))),
                Formula::and(eq(&b, &ap(F_TT, v(x)), &star), eq(&b, &ap(F_FF, v(y)), &star)),
            )
        })
    });
    let phi_f = Formula::and(
        Formula::conj([fixes_star, avoids_e(F_TT), avoids_e(F_FF)]),
        Formula::conj([injective(F_TT), injective(F_FF), disjoint]),
    );
    let phi_der = b0.all(|b, x| {
        b.all(|b, y| {
            let branches = r.pairs.iter().map(|(s, t)| {
                let base = Formula::and(eq(&b, &v(x), &append(s, c(E))), eq(&b, &v(y), &append(t, c(E))));
                let step = b.ex(|b, u| {
                    b.ex(|b, w| {
                        let (x, y, u, w) = (v(x), v(y), v(u), v(w));
                        let smaller = Formula::disj([
                            Formula::and(rel(&b, PREC, &u, &x), eq(&b, &w, &y)),
                            Formula::and(rel(&b, PREC, &w, &y), eq(&b, &u, &x)),
                            Formula::and(rel(&b, PREC, &u, &x), rel(&b, PREC, &w, &y)),
                        ]);
                        Formula::conj([
                            rel(&b, P, &u, &w),
                            eq(&b, &x, &append(s, u.clone())),
                            eq(&b, &y, &append(t, w.clone())),
                            smaller,
                        ])
                    })
                });
                Formula::or(base, step)
            });
            Formula::imp(rel(&b, P, &v(x), &v(y)), Formula::disj(branches))
        })
    });
    let solution = b0.ex(|b, x| b.atom(P, &[x, x]));
    let phi = Formula::conj([phi_p, phi_prec, phi_f, phi_der, solution]);
    (signature(), phi)
}

/// Domain position of a string of length at most `n`; 0 is the overflow element.
pub fn string_index(s: &BitStr) -> usize {
    let val = s.0.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
    (1usize << s.len()) + val
}

/// Inverse of [`string_index`] on positions `1..`.
pub fn index_string(i: usize) -> Option<BitStr> {
    if i == 0 {
        return None;
    }
    let len = usize::BITS as usize - 1 - i.leading_zeros() as usize;
    let val = i - (1 << len);
    Some(BitStr((0..len).map(|j| val >> (len - 1 - j) & 1 == 1).collect()))
}

/// The intended model over the overflow element and all strings of length at most `n`.
pub fn build_model(r: &BpcpInstance, n: usize) -> FiniteModel {
    let sig = signature();
    let k = 1usize << (n + 1);
    let mut m = FiniteModel::new(&sig, k).expect("nonempty domain");
    let strs: Vec<Option<BitStr>> = (0..k).map(index_string).collect();
    m.set_func(STAR, &[], 0);
    m.set_func(E, &[], string_index(&BitStr::empty()));
    for (f, b) in [(F_TT, true), (F_FF, false)] {
        m.fill_func(f, |a| match &strs[a[0]] {
            Some(s) if s.len() < n => string_index(&BitStr::single(b).concat(s)),
            _ => 0,
        });
    }
    let mut d = Deriver { r, memo: HashMap::new() };
    m.fill_rel(P, |a| match (&strs[a[0]], &strs[a[1]]) {
        (Some(s), Some(t)) => d.go(&s.0, &t.0),
        _ => false,
    });
    m.fill_rel(PREC, |a| match (&strs[a[0]], &strs[a[1]]) {
        (Some(s), Some(t)) => s.len() < t.len() && t.0.ends_with(&s.0),
        _ => false,
    });
    m.fill_rel(EQ, |a| a[0] == a[1]);
    m
}

impl BitStr {
    pub fn single(b: bool) -> BitStr {
        BitStr(vec![b])
    }
}

struct Extractor<'a> {
    r: &'a BpcpInstance,
    m: &'a FiniteModel,
    steps: usize,
    limit: usize,
    active: HashSet<(usize, usize)>,
}

impl Extractor<'_> {
    fn encode_onto(&self, s: &BitStr, tail: usize) -> usize {
        s.0.iter().rev().fold(tail, |acc, &b| self.m.apply(f_of(b), &[acc]))
    }

    fn prec(&self, a: usize, b: usize) -> bool {
        self.m.holds(PREC, &[a, b])
    }

    fn pair(&mut self, x: usize, y: usize) -> Result<(BitStr, BitStr), BpcpError> {
        self.steps += 1;
        if self.steps > self.limit {
            return Err(BpcpError::ModelMalformed(format!("extraction exceeded {} steps", self.limit)));
        }
        if !self.active.insert((x, y)) {
            return Err(BpcpError::ModelMalformed(format!("cyclic decoding at ({x}, {y})")));
        }
        let e = self.m.apply(E, &[]);
        let k = self.m.size();
        let mut result = None;
        'pairs: for (s, t) in &self.r.pairs {
            if x == self.encode_onto(s, e) && y == self.encode_onto(t, e) {
                result = Some((s.clone(), t.clone()));
                break;
            }
            for u in 0..k {
                if self.encode_onto(s, u) != x {
                    continue;
                }
                for w in 0..k {
                    let smaller = (self.prec(u, x) && w == y) || (self.prec(w, y) && u == x) || (self.prec(u, x) && self.prec(w, y));
                    if smaller && self.m.holds(P, &[u, w]) && self.encode_onto(t, w) == y {
                        let (s2, t2) = self.pair(u, w)?;
                        result = Some((s.concat(&s2), t.concat(&t2)));
                        break 'pairs;
                    }
                }
            }
        }
        self.active.remove(&(x, y));
        result.ok_or_else(|| BpcpError::ModelMalformed(format!("P({x}, {y}) has no decoding")))
    }
}

/// Reads a solution off any model of the encoding that interprets `eq` as identity.
pub fn extract_solution(r: &BpcpInstance, m: &FiniteModel) -> Result<BitStr, BpcpError> {
    extract_solution_counted(r, m).map(|(s, _)| s)
}

/// As [`extract_solution`], also reporting the number of decoding steps.
pub fn extract_solution_counted(r: &BpcpInstance, m: &FiniteModel) -> Result<(BitStr, usize), BpcpError> {
    let k = m.size();
    let x = (0..k)
        .find(|&x| m.holds(P, &[x, x]))
        .ok_or_else(|| BpcpError::ModelMalformed("no element x with P(x, x)".into()))?;
    let mut ex = Extractor { r, m, steps: 0, limit: k * k + 1, active: HashSet::new() };
    let (s, t) = ex.pair(x, x)?;
    if s != t {
        return Err(BpcpError::ModelMalformed(format!("decoded {s}/{t} is not a match")));
    }
    Ok((s, ex.steps))
}
