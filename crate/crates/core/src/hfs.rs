//! Hereditarily finite sets and membership models built from relations.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::semantics::{grid_size, index_tuple, FiniteModel};
use crate::syntax::{RelId, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HfsError {
    #[error("a tuple needs at least one component")]
    EmptyTuple,
    #[error("the source domain must be inhabited")]
    EmptySource,
    #[error("relation table has {found} entries, expected {expected}")]
    TableShape { expected: usize, found: usize },
}

#[derive(PartialEq, Eq, Hash)]
struct Node {
    rank: usize,
    elems: Vec<HfSet>,
}

/// A hereditarily finite set in canonical form: members sorted and distinct,
/// so structural equality is extensional equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HfSet(Arc<Node>);

impl Ord for HfSet {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .rank
            .cmp(&other.0.rank)
            .then_with(|| self.0.elems.cmp(&other.0.elems))
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl HfSet {
    pub fn empty() -> HfSet {
        HfSet(Arc::new(Node {
            rank: 0,
            elems: Vec::new(),
        }))
    }

    pub fn from_list(mut xs: Vec<HfSet>) -> HfSet {
        xs.sort();
        xs.dedup();
        let rank = xs.iter().map(|x| x.rank() + 1).max().unwrap_or(0);
        HfSet(Arc::new(Node { rank, elems: xs }))
    }

    /// Length of the longest membership chain below this set.
    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn members(&self) -> &[HfSet] {
        &self.0.elems
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    /// `self ∈ b`.
    pub fn mem(&self, b: &HfSet) -> bool {
        b.0.elems.binary_search(self).is_ok()
    }

    pub fn insert(&self, x: HfSet) -> HfSet {
        let mut xs = self.0.elems.clone();
        xs.push(x);
        HfSet::from_list(xs)
    }

    /// The Kuratowski pair `{{p}, {p, q}}`.
    pub fn pair(p: &HfSet, q: &HfSet) -> HfSet {
        HfSet::from_list(vec![
            HfSet::from_list(vec![p.clone()]),
            HfSet::from_list(vec![p.clone(), q.clone()]),
        ])
    }

    /// Right-nested pairs `(x1, (x2, ... xn))`, with `tuple([x]) = x`.
    pub fn tuple(xs: &[HfSet]) -> Result<HfSet, HfsError> {
        match xs {
            [] => Err(HfsError::EmptyTuple),
            [x] => Ok(x.clone()),
            [x, rest @ ..] => Ok(HfSet::pair(x, &HfSet::tuple(rest)?)),
        }
    }

    pub fn powerset(&self) -> HfSet {
        let elems = self.members();
        assert!(elems.len() < 32, "powerset of a set with {} members", elems.len());
        let subsets = (0u64..1 << elems.len())
            .map(|mask| {
                HfSet::from_list(
                    (0..elems.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| elems[i].clone())
                        .collect(),
                )
            })
            .collect();
        HfSet::from_list(subsets)
    }

    /// The set itself and all hereditary members, breadth first, without repeats.
    pub fn transitive_closure(&self) -> Vec<HfSet> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::from([self.clone()]);
        while let Some(x) = queue.pop_front() {
            if seen.insert(x.clone()) {
                queue.extend(x.members().iter().cloned());
                out.push(x);
            }
        }
        out
    }

    /// The von Neumann numeral for `m`: the transitive set `{0, 1, ..., m-1}`.
    pub fn von_neumann(m: usize) -> HfSet {
        (0..m).fold(HfSet::empty(), |n, _| n.insert(n.clone()))
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.members().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The signature with one binary membership relation.
pub fn membership_signature() -> Signature {
    Signature::from_symbols::<&str>(&[], &[("in", 2)]).expect("valid signature")
}

/// A finite transitive family of sets with restricted membership, encoding
/// an `n`-ary relation over `m` elements.
#[derive(Debug, Clone)]
pub struct MembershipModel {
    pub domain: Vec<HfSet>,
    index: HashMap<HfSet, usize>,
    mem: Vec<bool>,
    pub d: usize,
    pub r: usize,
    /// Source element to domain position.
    pub i: Vec<usize>,
    /// Domain position to source element (0 outside `d`).
    pub s: Vec<usize>,
    pub arity: usize,
    table: Vec<bool>,
}

impl MembershipModel {
    pub fn size(&self) -> usize {
        self.domain.len()
    }

    /// Restricted membership `domain[a] ∈ domain[b]`.
    pub fn mem(&self, a: usize, b: usize) -> bool {
        self.mem[a * self.domain.len() + b]
    }

    pub fn position(&self, x: &HfSet) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn d_set(&self) -> &HfSet {
        &self.domain[self.d]
    }

    pub fn r_set(&self) -> &HfSet {
        &self.domain[self.r]
    }

    fn source_size(&self) -> usize {
        self.i.len()
    }

    fn members_of(&self, y: usize) -> Vec<usize> {
        (0..self.size()).filter(|&z| self.mem(z, y)).collect()
    }

    /// Tuple of the images of `v`, if present in the domain.
    fn tuple_position(&self, v: &[usize]) -> Option<usize> {
        let parts: Vec<HfSet> = v.iter().map(|&x| self.domain[self.i[x]].clone()).collect();
        self.position(&HfSet::tuple(&parts).ok()?)
    }

    /// Extensionally equal elements belong to the same elements.
    pub fn check_extensional(&self) -> bool {
        let k = self.size();
        let members: Vec<Vec<usize>> = (0..k).map(|y| self.members_of(y)).collect();
        (0..k).all(|x| {
            (0..k).all(|y| members[x] != members[y] || (0..k).all(|z| !self.mem(x, z) || self.mem(y, z)))
        })
    }

    /// Extensionally equal elements are equal.
    pub fn check_ext_equal_is_identity(&self) -> bool {
        let mut seen = HashSet::new();
        (0..self.size()).all(|y| seen.insert(self.members_of(y)))
    }

    /// Every `n`-tuple of members of `d` is an element.
    pub fn check_tuples_exist(&self) -> bool {
        let dm = self.members_of(self.d);
        (0..grid_size(dm.len(), self.arity)).all(|idx| {
            let v: Vec<HfSet> = index_tuple(dm.len(), self.arity, idx)
                .into_iter()
                .map(|j| self.domain[dm[j]].clone())
                .collect();
            HfSet::tuple(&v).is_ok_and(|t| self.index.contains_key(&t))
        })
    }

    pub fn check_i_into_d(&self) -> bool {
        self.i.iter().all(|&y| self.mem(y, self.d))
    }

    pub fn check_d_exhausted(&self) -> bool {
        self.members_of(self.d).iter().all(|y| self.i.contains(y))
    }

    pub fn check_s_inverts_i(&self) -> bool {
        (0..self.source_size()).all(|x| self.s[self.i[x]] == x)
    }

    /// `R v` holds exactly when the tuple of `i(v)` is a member of `r`.
    pub fn check_relation_encoded(&self) -> bool {
        let m = self.source_size();
        (0..grid_size(m, self.arity)).all(|idx| {
            let v = index_tuple(m, self.arity, idx);
            let encoded = self.tuple_position(&v).is_some_and(|t| self.mem(t, self.r));
            encoded == self.table[idx]
        })
    }

    /// All seven properties, in order.
    pub fn check_all(&self) -> [bool; 7] {
        [
            self.check_extensional(),
            self.check_ext_equal_is_identity(),
            self.check_tuples_exist(),
            self.check_i_into_d(),
            self.check_d_exhausted(),
            self.check_s_inverts_i(),
            self.check_relation_encoded(),
        ]
    }

    /// The membership structure over [`membership_signature`].
    pub fn to_model(&self) -> FiniteModel {
        let mut m = FiniteModel::new(&membership_signature(), self.size()).expect("inhabited");
        m.fill_rel(RelId(0), |t| self.mem(t[0], t[1]));
        m
    }
}

/// Encodes the `n`-ary relation `table` over `m` elements as membership.
///
/// `d` is the von Neumann numeral for `m`, `r` the set of tuples of true
/// rows, and the domain the transitive closure of `d`, `r` and every
/// `n`-tuple over members of `d`.
pub fn relation_to_membership_model(m: usize, n: usize, table: &[bool]) -> Result<MembershipModel, HfsError> {
    if m == 0 {
        return Err(HfsError::EmptySource);
    }
    if n == 0 {
        return Err(HfsError::EmptyTuple);
    }
    let expected = grid_size(m, n);
    if table.len() != expected {
        return Err(HfsError::TableShape {
            expected,
            found: table.len(),
        });
    }
    let d = HfSet::von_neumann(m);
    let points: Vec<HfSet> = (0..m).map(HfSet::von_neumann).collect();
    let all_tuples: Vec<HfSet> = (0..expected)
        .map(|idx| {
            let v: Vec<HfSet> = index_tuple(m, n, idx).into_iter().map(|x| points[x].clone()).collect();
            HfSet::tuple(&v)
        })
        .collect::<Result<_, _>>()?;
    let r = HfSet::from_list(
        all_tuples
            .iter()
            .zip(table)
            .filter(|(_, &b)| b)
            .map(|(t, _)| t.clone())
            .collect(),
    );
    let mut all: HashSet<HfSet> = HashSet::new();
    for root in [d.clone(), r.clone()].iter().chain(&all_tuples) {
        if !all.contains(root) {
            all.extend(root.transitive_closure());
        }
    }
    let mut domain: Vec<HfSet> = all.into_iter().collect();
    domain.sort();
    let index: HashMap<HfSet, usize> = domain.iter().enumerate().map(|(j, x)| (x.clone(), j)).collect();
    let k = domain.len();
    let mut mem = vec![false; k * k];
    for (b, set) in domain.iter().enumerate() {
        for e in set.members() {
            mem[index[e] * k + b] = true;
        }
    }
    let i: Vec<usize> = points.iter().map(|p| index[p]).collect();
    let mut s = vec![0; k];
    for (x, &y) in i.iter().enumerate() {
        s[y] = x;
    }
    Ok(MembershipModel {
        d: index[&d],
        r: index[&r],
        domain,
        index,
        mem,
        i,
        s,
        arity: n,
        table: table.to_vec(),
    })
}
