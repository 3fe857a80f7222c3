//! Rooted binary phylogenetic trees and their encodings as matchings.
//!
//! A tree with `n + 1` leaves labelled `1..=n+1` has `n` internal nodes. The
//! Diaconis–Holmes bijection sends it to a matching of `2n` points; the
//! Richman-style embedding sends it to a matching of `2n + 2` points.
//! Children are stored in canonical order (smaller minimum leaf first), so
//! derived equality and hashing are topological.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigUint};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::{
    act, matching_count, neighbors, quotient_distance, random_matching, within_two_transpositions,
    GraphDistance, Matching, Permutation, DEFAULT_EXACT_LIMIT,
};
use crate::Rational;

/// Largest leaf count for exact NNI distances unless overridden.
pub const DEFAULT_NNI_EXACT_LEAVES: usize = 8;

/// A rooted binary tree with integer-labelled leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhyloTree {
    Leaf(u32),
    Node(Box<PhyloTree>, Box<PhyloTree>),
}

impl PhyloTree {
    pub fn leaf(label: u32) -> Self {
        PhyloTree::Leaf(label)
    }

    /// Internal node with children in canonical order.
    pub fn node(a: PhyloTree, b: PhyloTree) -> Self {
        if a.min_leaf() <= b.min_leaf() {
            PhyloTree::Node(Box::new(a), Box::new(b))
        } else {
            PhyloTree::Node(Box::new(b), Box::new(a))
        }
    }

    pub fn min_leaf(&self) -> u32 {
        match self {
            PhyloTree::Leaf(l) => *l,
            PhyloTree::Node(a, _) => a.min_leaf(),
        }
    }

    pub fn leaves(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out.sort_unstable();
        out
    }

    fn collect_leaves(&self, out: &mut Vec<u32>) {
        match self {
            PhyloTree::Leaf(l) => out.push(*l),
            PhyloTree::Node(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            PhyloTree::Leaf(_) => 1,
            PhyloTree::Node(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// Edges on the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        match self {
            PhyloTree::Leaf(_) => 0,
            PhyloTree::Node(a, b) => 1 + a.height().max(b.height()),
        }
    }

    /// Re-sorts every node's children; trees built through [`PhyloTree::node`]
    /// are already canonical.
    pub fn canonical(self) -> Self {
        match self {
            PhyloTree::Leaf(_) => self,
            PhyloTree::Node(a, b) => PhyloTree::node(a.canonical(), b.canonical()),
        }
    }

    /// Checks that the leaves are exactly `1..=m` for some `m ≥ 2`.
    pub fn validate(&self) -> Result<()> {
        let leaves = self.leaves();
        if leaves.len() < 2 {
            return Err(Error::InvalidTree(
                "a tree needs at least two leaves".into(),
            ));
        }
        if leaves.iter().enumerate().any(|(i, &l)| l != i as u32 + 1) {
            return Err(Error::InvalidTree(format!(
                "leaf labels must be exactly 1..={}, got {leaves:?}",
                leaves.len()
            )));
        }
        Ok(())
    }

    /// Matching size `n` of the Diaconis–Holmes encoding (leaves minus one).
    pub fn n(&self) -> usize {
        self.leaf_count() - 1
    }
}

impl fmt::Display for PhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write(t: &PhyloTree, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                PhyloTree::Leaf(l) => write!(f, "{l}"),
                PhyloTree::Node(a, b) => {
                    f.write_str("(")?;
                    write(a, f)?;
                    f.write_str(",")?;
                    write(b, f)?;
                    f.write_str(")")
                }
            }
        }
        write(self, f)?;
        f.write_str(";")
    }
}

struct NewickParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl NewickParser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Newick {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn subtree(&mut self) -> Result<PhyloTree> {
        self.skip_ws();
        match self.bytes.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                let a = self.subtree()?;
                self.expect(b',')?;
                let b = self.subtree()?;
                self.skip_ws();
                if self.bytes.get(self.pos) == Some(&b',') {
                    return self.err("only binary trees are supported");
                }
                self.expect(b')')?;
                Ok(PhyloTree::node(a, b))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
                match text.parse::<u32>() {
                    Ok(0) | Err(_) => {
                        self.pos = start;
                        self.err(format!("invalid leaf label {text:?}"))
                    }
                    Ok(l) => Ok(PhyloTree::Leaf(l)),
                }
            }
            Some(_) => self.err("expected '(' or a leaf label"),
            None => self.err("unexpected end of input"),
        }
    }
}

impl FromStr for PhyloTree {
    type Err = Error;

    /// Parses `((1,5),(2,(3,4)));`; the trailing semicolon is optional.
    fn from_str(s: &str) -> Result<Self> {
        let mut parser = NewickParser {
            bytes: s.as_bytes(),
            pos: 0,
        };
        let tree = parser.subtree()?;
        parser.skip_ws();
        if parser.bytes.get(parser.pos) == Some(&b';') {
            parser.pos += 1;
            parser.skip_ws();
        }
        if parser.pos != parser.bytes.len() {
            return parser.err("trailing input");
        }
        let leaves = tree.leaves();
        if leaves.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTree(format!(
                "duplicate leaf labels in {leaves:?}"
            )));
        }
        Ok(tree)
    }
}

/// Flat view of a tree: children of internal nodes and the leaf labels.
struct Arena {
    children: Vec<Option<(usize, usize)>>,
    leaf: Vec<u32>,
    root: usize,
}

impl Arena {
    fn new(t: &PhyloTree) -> Self {
        fn build(t: &PhyloTree, a: &mut Arena) -> usize {
            let id = a.children.len();
            a.children.push(None);
            a.leaf.push(0);
            match t {
                PhyloTree::Leaf(l) => a.leaf[id] = *l,
                PhyloTree::Node(x, y) => {
                    let cx = build(x, a);
                    let cy = build(y, a);
                    a.children[id] = Some((cx, cy));
                }
            }
            id
        }
        let mut a = Arena {
            children: Vec::new(),
            leaf: Vec::new(),
            root: 0,
        };
        a.root = build(t, &mut a);
        a
    }
}

/// Diaconis–Holmes encoding of a tree with `n + 1` leaves into `X_n`.
///
/// Repeatedly take the node whose two children are labelled and which holds
/// the smallest such child label; pair its children and give it the next
/// label `n + 2, n + 3, …`. The root's children form the last pair.
pub fn dh_encode(t: &PhyloTree) -> Result<Matching> {
    t.validate()?;
    let n = t.n() as u32;
    let arena = Arena::new(t);
    let mut label: Vec<Option<u32>> = arena
        .leaf
        .iter()
        .map(|&l| if l > 0 { Some(l) } else { None })
        .collect();
    let mut pairs = Vec::with_capacity(n as usize);
    let mut next = n + 2;
    loop {
        let ready = arena
            .children
            .iter()
            .enumerate()
            .filter(|&(id, _)| label[id].is_none())
            .filter_map(|(id, c)| {
                let (a, b) = (*c)?;
                Some((label[a]?.min(label[b]?), id, label[a]?, label[b]?))
            })
            .min();
        let (_, id, la, lb) = ready.expect("an unlabelled node always has a ready descendant");
        pairs.push([la, lb]);
        if id == arena.root {
            break;
        }
        label[id] = Some(next);
        next += 1;
    }
    Matching::new(pairs)
}

/// Inverse of [`dh_encode`]: builds the tree with `n + 1` leaves encoded by
/// a matching of `2n` points.
pub fn dh_decode(x: &Matching) -> Result<PhyloTree> {
    let n = x.n() as u32;
    if n == 0 {
        return Err(Error::InvalidMatching("empty matching has no tree".into()));
    }
    let mut nodes: HashMap<u32, PhyloTree> = (1..=n + 1).map(|l| (l, PhyloTree::Leaf(l))).collect();
    let mut remaining: Vec<[u32; 2]> = x.pairs().to_vec();
    for label in n + 2..=2 * n {
        // Pairs are canonical, so the first element is the pair minimum and
        // the list is sorted by it.
        let pos = remaining
            .iter()
            .position(|[a, b]| nodes.contains_key(a) && nodes.contains_key(b))
            .expect("some pair is complete at every step");
        let [a, b] = remaining.remove(pos);
        let ta = nodes.remove(&a).expect("created");
        let tb = nodes.remove(&b).expect("created");
        nodes.insert(label, PhyloTree::node(ta, tb));
    }
    let [[a, b]] = remaining[..] else {
        unreachable!("exactly one pair remains for the root");
    };
    let ta = nodes.remove(&a).expect("created");
    let tb = nodes.remove(&b).expect("created");
    Ok(PhyloTree::node(ta, tb))
}

/// Labels every internal node as `n + max(min leaf of each child)`, giving
/// distinct labels in `n + 2..=2n + 1`; returns the sibling pairs and the
/// root label.
fn richman_labels(t: &PhyloTree, n: u32, pairs: &mut Vec<[u32; 2]>) -> u32 {
    match t {
        PhyloTree::Leaf(l) => *l,
        PhyloTree::Node(a, b) => {
            let la = richman_labels(a, n, pairs);
            let lb = richman_labels(b, n, pairs);
            pairs.push([la, lb]);
            n + a.min_leaf().max(b.min_leaf())
        }
    }
}

/// Richman-style embedding of a tree with `n + 1` leaves into `X_{n+1}`:
/// siblings are paired, and the root is paired with the auxiliary label
/// `2n + 2`.
pub fn richman_embed(t: &PhyloTree) -> Result<Matching> {
    t.validate()?;
    let n = t.n() as u32;
    let mut pairs = Vec::with_capacity(n as usize + 1);
    let root = richman_labels(t, n, &mut pairs);
    pairs.push([root, 2 * n + 2]);
    Matching::new(pairs)
}

fn nni_into(t: &PhyloTree, out: &mut BTreeSet<PhyloTree>) {
    let PhyloTree::Node(l, r) = t else {
        return;
    };
    // Moves across the edge from this node to each internal child.
    for (child, sibling) in [(l, r), (r, l)] {
        if let PhyloTree::Node(a, b) = child.as_ref() {
            let c = sibling.as_ref();
            out.insert(PhyloTree::node(
                a.as_ref().clone(),
                PhyloTree::node(c.clone(), b.as_ref().clone()),
            ));
            out.insert(PhyloTree::node(
                b.as_ref().clone(),
                PhyloTree::node(a.as_ref().clone(), c.clone()),
            ));
        }
    }
    let mut sub = BTreeSet::new();
    nni_into(l, &mut sub);
    for l2 in std::mem::take(&mut sub) {
        out.insert(PhyloTree::node(l2, r.as_ref().clone()));
    }
    nni_into(r, &mut sub);
    for r2 in sub {
        out.insert(PhyloTree::node(l.as_ref().clone(), r2));
    }
}

/// All trees one nearest-neighbour interchange away from `t`.
pub fn nni_neighbors(t: &PhyloTree) -> BTreeSet<PhyloTree> {
    let mut out = BTreeSet::new();
    nni_into(t, &mut out);
    out.remove(t);
    out
}

/// NNI distance: exact by bidirectional breadth-first search up to
/// `exact_limit_leaves`, otherwise the height difference, which is a lower
/// bound because one move changes the height by at most one.
pub fn nni_distance(
    a: &PhyloTree,
    b: &PhyloTree,
    exact_limit_leaves: usize,
) -> Result<GraphDistance> {
    if a.leaves() != b.leaves() {
        return Err(Error::InvalidTree("trees have different leaf sets".into()));
    }
    if a == b {
        return Ok(GraphDistance::Exact(0));
    }
    if a.leaf_count() > exact_limit_leaves {
        return Ok(GraphDistance::LowerBound(a.height().abs_diff(b.height())));
    }
    let mut seen_a: HashMap<PhyloTree, u32> = HashMap::from([(a.clone(), 0)]);
    let mut seen_b: HashMap<PhyloTree, u32> = HashMap::from([(b.clone(), 0)]);
    let mut frontier_a = vec![a.clone()];
    let mut frontier_b = vec![b.clone()];
    loop {
        // Expand the smaller frontier by one full layer.
        let (frontier, seen, other) = if frontier_a.len() <= frontier_b.len() {
            (&mut frontier_a, &mut seen_a, &seen_b)
        } else {
            (&mut frontier_b, &mut seen_b, &seen_a)
        };
        let mut next = Vec::new();
        let mut best: Option<u32> = None;
        for t in frontier.iter() {
            let d = seen[t] + 1;
            for nb in nni_neighbors(t) {
                if let Some(&od) = other.get(&nb) {
                    best = Some(best.map_or(d + od, |b: u32| b.min(d + od)));
                }
                if !seen.contains_key(&nb) {
                    seen.insert(nb.clone(), d);
                    next.push(nb);
                }
            }
        }
        if let Some(d) = best {
            return Ok(GraphDistance::Exact(d));
        }
        assert!(!next.is_empty(), "NNI graph is connected");
        *frontier = next;
    }
}

/// All rooted binary trees on leaves `1..=leaves`, built by attaching each
/// new leaf above the root or on any edge.
pub fn enumerate_trees(leaves: u32) -> Vec<PhyloTree> {
    fn attach(t: &PhyloTree, leaf: u32, out: &mut Vec<PhyloTree>) {
        out.push(PhyloTree::node(t.clone(), PhyloTree::Leaf(leaf)));
        if let PhyloTree::Node(a, b) = t {
            let mut sub = Vec::new();
            attach(a, leaf, &mut sub);
            for a2 in sub.drain(..) {
                out.push(PhyloTree::node(a2, b.as_ref().clone()));
            }
            attach(b, leaf, &mut sub);
            for b2 in sub {
                out.push(PhyloTree::node(a.as_ref().clone(), b2));
            }
        }
    }
    if leaves == 0 {
        return Vec::new();
    }
    let mut trees = vec![PhyloTree::Leaf(1)];
    for leaf in 2..=leaves {
        let mut next = Vec::new();
        for t in &trees {
            attach(t, leaf, &mut next);
        }
        trees = next;
    }
    trees
}

/// Uniform random tree with `n + 1` leaves.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PhyloTree {
    dh_decode(&random_matching(n, rng)).expect("every matching decodes")
}

fn caterpillar(from: u32, to: u32) -> PhyloTree {
    // (to, (to − 1, … (5, (3, 4)))) with `from` = 5.
    let mut t = PhyloTree::node(PhyloTree::Leaf(3), PhyloTree::Leaf(4));
    for leaf in from..=to {
        t = PhyloTree::node(PhyloTree::Leaf(leaf), t);
    }
    t
}

/// Two NNI-adjacent trees whose encodings are far apart.
#[derive(Clone, Debug, Serialize)]
pub struct Prop6Witness {
    pub n: usize,
    #[serde(serialize_with = "newick")]
    pub left: PhyloTree,
    #[serde(serialize_with = "newick")]
    pub right: PhyloTree,
    pub x: Matching,
    pub y: Matching,
    pub nni_adjacent: bool,
    pub distance: GraphDistance,
    /// `(n − 1) / 2`.
    pub required: f64,
}

impl Prop6Witness {
    pub fn holds(&self) -> bool {
        self.nni_adjacent && self.distance.value() as f64 >= self.required
    }
}

fn newick<S: serde::Serializer>(t: &PhyloTree, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

/// Caterpillar pair `(1, (2, X))` and `((1, 2), X)` with
/// `X = (n+1, (n, … (5, (3, 4))))`, for `n ≥ 7`.
pub fn counterexample_prop6(n: usize) -> Result<Prop6Witness> {
    if n < 7 {
        return Err(Error::InvalidArgument(format!("needs n >= 7, got {n}")));
    }
    let spine = caterpillar(5, n as u32 + 1);
    let left = PhyloTree::node(
        PhyloTree::Leaf(1),
        PhyloTree::node(PhyloTree::Leaf(2), spine.clone()),
    );
    let right = PhyloTree::node(
        PhyloTree::node(PhyloTree::Leaf(1), PhyloTree::Leaf(2)),
        spine,
    );
    let nni_adjacent = nni_neighbors(&left).contains(&right);
    let x = dh_encode(&left)?;
    let y = dh_encode(&right)?;
    let distance = quotient_distance(&x, &y, DEFAULT_EXACT_LIMIT)?;
    Ok(Prop6Witness {
        n,
        left,
        right,
        x,
        y,
        nni_adjacent,
        distance,
        required: (n as f64 - 1.0) / 2.0,
    })
}

/// Two matchings one transposition apart whose trees differ greatly in height.
#[derive(Clone, Debug, Serialize)]
pub struct Prop7Witness {
    pub n: usize,
    pub x1: Matching,
    pub x2: Matching,
    /// The transposition `(1, 2n−1)` with `x2 = σ ⊳ x1`.
    pub transposition: [u32; 2],
    #[serde(serialize_with = "newick")]
    pub t1: PhyloTree,
    #[serde(serialize_with = "newick")]
    pub t2: PhyloTree,
    pub height1: u32,
    pub height2: u32,
    /// `n / 2 − 2`.
    pub required: f64,
}

impl Prop7Witness {
    pub fn gap(&self) -> i64 {
        self.height1 as i64 - self.height2 as i64
    }

    pub fn holds(&self) -> bool {
        self.gap() as f64 >= self.required
    }
}

/// `x₁ = {3,4}, {k, n−3+k} (k = 5..=n+1), {2, 2n−1}, {1, 2n}` and
/// `σ = (1, 2n−1)`, for `n ≥ 9`.
pub fn counterexample_prop7(n: usize) -> Result<Prop7Witness> {
    if n < 9 {
        return Err(Error::InvalidArgument(format!("needs n >= 9, got {n}")));
    }
    let m = n as u32;
    let mut pairs = vec![[3, 4]];
    pairs.extend((5..=m + 1).map(|k| [k, m - 3 + k]));
    pairs.push([2, 2 * m - 1]);
    pairs.push([1, 2 * m]);
    let x1 = Matching::new(pairs)?;
    let sigma = Permutation::transposition(2 * n, 1, 2 * m - 1)?;
    let x2 = act(&sigma, &x1)?;
    let t1 = dh_decode(&x1)?;
    let t2 = dh_decode(&x2)?;
    Ok(Prop7Witness {
        n,
        height1: t1.height(),
        height2: t2.height(),
        x1,
        x2,
        transposition: [1, 2 * m - 1],
        t1,
        t2,
        required: n as f64 / 2.0 - 2.0,
    })
}

/// Summary of random NNI moves checked against the embedding.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingCheck {
    pub trials: usize,
    pub failures: usize,
    /// Largest number of pairs changed by a single move.
    pub max_changed_pairs: usize,
}

/// Draws `trials` random trees with `n + 1` leaves (`n` uniform in
/// `2..=max_n`), applies a random NNI move, and checks that the embedded
/// matchings are within two transpositions.
pub fn check_embedding_locality<R: Rng + ?Sized>(
    trials: usize,
    max_n: usize,
    rng: &mut R,
) -> Result<EmbeddingCheck> {
    let mut failures = 0;
    let mut max_changed_pairs = 0;
    for _ in 0..trials {
        let n = rng.gen_range(2..=max_n);
        let t = random_tree(n, rng);
        let moves: Vec<PhyloTree> = nni_neighbors(&t).into_iter().collect();
        let u = &moves[rng.gen_range(0..moves.len())];
        let x = richman_embed(&t)?;
        let y = richman_embed(u)?;
        max_changed_pairs = max_changed_pairs.max(x.differing_pairs(&y));
        if !within_two_transpositions(&x, &y)? {
            failures += 1;
        }
    }
    Ok(EmbeddingCheck {
        trials,
        failures,
        max_changed_pairs,
    })
}

/// `4n / ((2n + 2)(2n + 1))`.
pub fn tree_fraction(n: u32) -> Rational {
    let n = BigInt::from(n);
    Rational::new(
        BigInt::from(4) * &n,
        (BigInt::from(2) * &n + 2) * (BigInt::from(2) * &n + 1),
    )
}

/// Fraction of `X_{n+1}` hit by the embedding, by exhaustive enumeration.
pub fn embedding_image_fraction(n: u32) -> Result<Rational> {
    let mut image = HashSet::new();
    for t in enumerate_trees(n + 1) {
        image.insert(richman_embed(&t)?);
    }
    Ok(Rational::new(
        BigInt::from(image.len()),
        BigInt::from(matching_count(n as usize + 1)),
    ))
}

/// `(2m − 3)!!`, the number of rooted binary trees with `m ≥ 2` leaves.
pub fn tree_count(leaves: u32) -> BigUint {
    matching_count(leaves as usize - 1)
}

/// Whether two matchings are adjacent in the quotient graph.
pub fn adjacent_matchings(x: &Matching, y: &Matching) -> bool {
    neighbors(x).contains(y)
}
