//! Decorated rooted trees and forests in canonical form.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;

use crate::error::AlgebraError;
use crate::DEFAULT_DEGREE_CAP;

/// A node decoration. The undecorated label prints as nothing (`[]`); every
/// other label is a single ASCII alphanumeric character (`[a]`, `[1]`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(u8);

impl Label {
    pub const PLAIN: Label = Label(0);

    pub fn new(c: char) -> Result<Self, AlgebraError> {
        if c.is_ascii_alphanumeric() {
            Ok(Label(c as u8))
        } else {
            Err(AlgebraError::UnknownLabel(c))
        }
    }

    pub fn is_plain(self) -> bool {
        self.0 == 0
    }

    pub fn as_char(self) -> Option<char> {
        (self.0 != 0).then_some(self.0 as char)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_char() {
            Some(c) => write!(f, "{c}"),
            None => f.write_str("·"),
        }
    }
}

/// Finite ordered label set. Position `i` decorates the `i`-th coordinate of
/// a driving signal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet(Vec<Label>);

impl Alphabet {
    pub fn new(labels: Vec<Label>) -> Result<Self, AlgebraError> {
        if labels.is_empty() {
            return Err(AlgebraError::EmptyAlphabet);
        }
        let mut seen = BTreeSet::new();
        let labels: Vec<Label> = labels.into_iter().filter(|l| seen.insert(*l)).collect();
        Ok(Self(labels))
    }

    /// The undecorated single-label alphabet.
    pub fn plain() -> Self {
        Self(vec![Label::PLAIN])
    }

    /// Standard alphabet for a `d`-dimensional signal: plain for `d = 1`,
    /// `1, 2, …, d` otherwise.
    pub fn standard(d: usize) -> Self {
        assert!((1..=9).contains(&d), "standard alphabets cover 1 to 9 labels");
        if d == 1 {
            Self::plain()
        } else {
            Self((1..=d).map(|i| Label(b'0' + i as u8)).collect())
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.0.iter().position(|&l| l == label)
    }

    pub fn contains(&self, label: Label) -> bool {
        self.0.contains(&label)
    }
}

/// A decorated rooted tree. Children are kept sorted so that structural
/// equality is plain equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    label: Label,
    children: Vec<Tree>,
    size: usize,
}

impl Tree {
    pub fn leaf(label: Label) -> Self {
        Tree {
            label,
            children: Vec::new(),
            size: 1,
        }
    }

    pub fn new(label: Label, mut children: Vec<Tree>) -> Self {
        children.sort();
        let size = 1 + children.iter().map(|c| c.size).sum::<usize>();
        Tree {
            label,
            children,
            size,
        }
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    /// The forest obtained by removing the root.
    pub fn branches(&self) -> Forest {
        Forest::from_sorted(self.children.clone())
    }

    /// Number of nodes.
    pub fn degree(&self) -> usize {
        self.size
    }

    /// Symmetry factor: order of the group permuting identical branches at
    /// every node.
    pub fn symmetry_factor(&self) -> BigUint {
        multiset_symmetry(&self.children)
    }

    /// Tree factorial `τ! = |τ| ∏ children!`.
    pub fn factorial(&self) -> BigUint {
        self.children
            .iter()
            .fold(BigUint::from(self.size), |acc, c| acc * c.factorial())
    }

    pub fn labels(&self, out: &mut BTreeSet<Label>) {
        out.insert(self.label);
        for c in &self.children {
            c.labels(out);
        }
    }

    /// Flattens the tree in preorder as `(label, parent)` pairs; the root has
    /// no parent.
    pub(crate) fn flatten(&self) -> Vec<(Label, Option<usize>)> {
        fn go(t: &Tree, parent: Option<usize>, out: &mut Vec<(Label, Option<usize>)>) {
            let me = out.len();
            out.push((t.label, parent));
            for c in &t.children {
                go(c, Some(me), out);
            }
        }
        let mut out = Vec::with_capacity(self.size);
        go(self, None, &mut out);
        out
    }

    /// Rebuilds a canonical tree from a flattened node list, attaching
    /// `extra[v]` as additional children of node `v`.
    pub(crate) fn rebuild(nodes: &[(Label, Option<usize>)], extra: &[Vec<Tree>]) -> Tree {
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for (i, (_, p)) in nodes.iter().enumerate() {
            if let Some(p) = p {
                kids[*p].push(i);
            }
        }
        fn build(
            v: usize,
            nodes: &[(Label, Option<usize>)],
            kids: &[Vec<usize>],
            extra: &[Vec<Tree>],
        ) -> Tree {
            let mut children: Vec<Tree> = kids[v]
                .iter()
                .map(|&c| build(c, nodes, kids, extra))
                .collect();
            children.extend(extra[v].iter().cloned());
            Tree::new(nodes[v].0, children)
        }
        build(0, nodes, &kids, extra)
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .cmp(&other.size)
            .then(self.label.cmp(&other.label))
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A commutative monomial of trees. The empty forest is the unit `1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Forest {
    trees: Vec<Tree>,
    degree: usize,
}

impl Forest {
    pub fn empty() -> Self {
        Forest::default()
    }

    pub fn new(mut trees: Vec<Tree>) -> Self {
        trees.sort();
        Self::from_sorted(trees)
    }

    fn from_sorted(trees: Vec<Tree>) -> Self {
        let degree = trees.iter().map(Tree::degree).sum();
        Forest { trees, degree }
    }

    pub fn single(tree: Tree) -> Self {
        let degree = tree.degree();
        Forest {
            trees: vec![tree],
            degree,
        }
    }

    /// The single-node forest `[a]`.
    pub fn node(label: Label) -> Self {
        Self::single(Tree::leaf(label))
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn as_tree(&self) -> Option<&Tree> {
        match self.trees.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }

    pub fn multiply(&self, other: &Forest) -> Forest {
        let mut trees = Vec::with_capacity(self.trees.len() + other.trees.len());
        trees.extend(self.trees.iter().cloned());
        trees.extend(other.trees.iter().cloned());
        Forest::new(trees)
    }

    /// `[h]_a`: graft every tree of `self` onto a new root labelled `a`.
    pub fn graft_root(&self, label: Label) -> Tree {
        Tree {
            label,
            children: self.trees.clone(),
            size: self.degree + 1,
        }
    }

    /// Symmetry factor `Σ(h) = Σ([h]_a)`, independent of `a`.
    pub fn symmetry_factor(&self) -> BigUint {
        multiset_symmetry(&self.trees)
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        for t in &self.trees {
            t.labels(&mut out);
        }
        out
    }
}

impl From<Tree> for Forest {
    fn from(t: Tree) -> Self {
        Forest::single(t)
    }
}

/// Canonical forest order: by degree, then more trees first, then the sorted
/// tree sequence. Placing products of many small trees first makes the
/// primitive projector meet the standard spanning forests first.
impl Ord for Forest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then(other.trees.len().cmp(&self.trees.len()))
            .then_with(|| self.trees.cmp(&other.trees))
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn multiset_symmetry(sorted: &[Tree]) -> BigUint {
    let mut acc = BigUint::from(1u32);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let m = j - i;
        let inner = sorted[i].symmetry_factor();
        for k in 1..=m {
            acc *= BigUint::from(k) * &inner;
        }
        i = j;
    }
    acc
}

fn check_cap(n: usize) -> Result<(), AlgebraError> {
    if n > DEFAULT_DEGREE_CAP {
        Err(AlgebraError::DegreeCap {
            requested: n,
            cap: DEFAULT_DEGREE_CAP,
        })
    } else {
        Ok(())
    }
}

/// All trees with exactly `n` nodes, sorted.
pub fn enumerate_trees(n: usize, alphabet: &Alphabet) -> Result<Vec<Tree>, AlgebraError> {
    check_cap(n)?;
    let mut gen = Generator::new(alphabet);
    Ok(gen.trees(n).to_vec())
}

/// All forests of degree at most `n`, in canonical order.
pub fn enumerate_forests(n: usize, alphabet: &Alphabet) -> Result<Vec<Forest>, AlgebraError> {
    check_cap(n)?;
    let mut gen = Generator::new(alphabet);
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(gen.forests(k));
    }
    Ok(out)
}

/// All forests of degree exactly `n`, in canonical order.
pub fn enumerate_forests_of_degree(
    n: usize,
    alphabet: &Alphabet,
) -> Result<Vec<Forest>, AlgebraError> {
    check_cap(n)?;
    Generator::new(alphabet).forests(n).pipe(Ok)
}

trait Pipe: Sized {
    fn pipe<R>(self, f: impl FnOnce(Self) -> R) -> R {
        f(self)
    }
}
impl<T> Pipe for T {}

struct Generator<'a> {
    alphabet: &'a Alphabet,
    trees: BTreeMap<usize, Vec<Tree>>,
}

impl<'a> Generator<'a> {
    fn new(alphabet: &'a Alphabet) -> Self {
        Self {
            alphabet,
            trees: BTreeMap::new(),
        }
    }

    fn trees(&mut self, n: usize) -> &[Tree] {
        if !self.trees.contains_key(&n) {
            let mut out = Vec::new();
            if n > 0 {
                for forest in self.forests(n - 1) {
                    for &label in self.alphabet.labels() {
                        out.push(forest.graft_root(label));
                    }
                }
            }
            out.sort();
            self.trees.insert(n, out);
        }
        &self.trees[&n]
    }

    fn forests(&mut self, n: usize) -> Vec<Forest> {
        // every tree that can appear, in ascending tree order
        let mut pool: Vec<Tree> = Vec::new();
        for k in 1..=n {
            pool.extend(self.trees(k).iter().cloned());
        }
        pool.sort();
        let mut out = Vec::new();
        let mut current = Vec::new();
        multisets(&pool, 0, n, &mut current, &mut out);
        out.sort();
        out
    }
}

fn multisets(pool: &[Tree], start: usize, remaining: usize, cur: &mut Vec<Tree>, out: &mut Vec<Forest>) {
    if remaining == 0 {
        out.push(Forest::from_sorted(cur.clone()));
        return;
    }
    for i in start..pool.len() {
        let d = pool[i].degree();
        if d > remaining {
            // pool is sorted by degree first
            break;
        }
        cur.push(pool[i].clone());
        multisets(pool, i, remaining - d, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::parse_forest;

    fn f(s: &str) -> Forest {
        parse_forest(s).unwrap()
    }

    #[test]
    fn small_enumerations() {
        let a = Alphabet::plain();
        let one = enumerate_forests(1, &a).unwrap();
        assert_eq!(one, vec![Forest::empty(), f("[]")]);
        let two = enumerate_forests_of_degree(2, &a).unwrap();
        assert_eq!(two, vec![f("[][]"), f("[[]]")]);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let err = enumerate_forests(9, &Alphabet::plain()).unwrap_err();
        assert_eq!(
            err,
            AlgebraError::DegreeCap {
                requested: 9,
                cap: 8
            }
        );
    }

    #[test]
    fn graft_root_examples() {
        let a = Label::PLAIN;
        assert_eq!(Forest::from(f("[][]").graft_root(a)), f("[[][]]"));
        assert_eq!(Forest::from(Forest::empty().graft_root(a)), f("[]"));
        assert_eq!(Forest::from(f("[[]]").graft_root(a)), f("[[[]]]"));
        assert_eq!(f("[[]]").graft_root(a).degree(), 3);
    }

    #[test]
    fn symmetry_factor_examples() {
        assert_eq!(f("[]").symmetry_factor(), BigUint::from(1u32));
        assert_eq!(f("[][]").symmetry_factor(), BigUint::from(2u32));
        assert_eq!(f("[[][]]").symmetry_factor(), BigUint::from(2u32));
        assert_eq!(f("[][][]").symmetry_factor(), BigUint::from(6u32));
        assert_eq!(f("[[]][[]]").symmetry_factor(), BigUint::from(2u32));
        assert_eq!(f("[a][b]").symmetry_factor(), BigUint::from(1u32));
    }

    #[test]
    fn tree_factorial() {
        assert_eq!(f("[[[]]]").as_tree().unwrap().factorial(), BigUint::from(6u32));
        assert_eq!(f("[[][]]").as_tree().unwrap().factorial(), BigUint::from(3u32));
    }

    #[test]
    fn canonical_order_puts_products_first() {
        let a = Alphabet::plain();
        let four = enumerate_forests_of_degree(4, &a).unwrap();
        assert_eq!(four[0], f("[][][][]"));
        assert_eq!(four[1], f("[][][[]]"));
        assert_eq!(four.len(), 9);
    }
}
