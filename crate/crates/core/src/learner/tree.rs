//! Greedy CART-style decision trees with Gini impurity, grown to purity.
//!
//! Split scores are compared exactly as rationals. Among equally good splits
//! the one with the smallest seeded hash key wins, which is a uniform random
//! choice per seed and also lets a tree absorb new columns one at a time while
//! staying identical to a tree fitted from scratch on all columns.

use std::cmp::Ordering;

use super::bits::Bits;

/// Labels and candidate columns for tree fitting.
#[derive(Debug, Clone, Copy)]
pub struct TreeData<'a> {
    pub labels: &'a Bits,
    pub columns: &'a [Bits],
    /// Columns marked `Some` are duplicates and never split on.
    pub duplicate_of: Option<&'a [Option<usize>]>,
}

impl<'a> TreeData<'a> {
    pub fn new(labels: &'a Bits, columns: &'a [Bits]) -> Self {
        TreeData {
            labels,
            columns,
            duplicate_of: None,
        }
    }

    fn usable(&self, j: usize) -> bool {
        self.duplicate_of.is_none_or(|d| d[j].is_none())
    }
}

/// `num / den`, compared exactly.
#[derive(Debug, Clone, Copy)]
struct Ratio {
    num: u128,
    den: u128,
}

impl PartialEq for Ratio {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Ratio {}
impl PartialOrd for Ratio {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Ratio {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num * o.den).cmp(&(o.num * self.den))
    }
}

/// Σ over groups of (pos² + neg²) / size. Weighted Gini impurity is
/// `n - purity`, so a larger purity is a better split.
fn purity(n: u64, p: u64) -> Ratio {
    let (n, p) = (n as u128, p as u128);
    Ratio {
        num: p * p + (n - p) * (n - p),
        den: n,
    }
}

fn split_purity(n: u64, p: u64, a: u64, ap: u64) -> Ratio {
    let l = purity(a, ap);
    let r = purity(n - a, p - ap);
    Ratio {
        num: l.num * r.den + r.num * l.den,
        den: l.den * r.den,
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn child_path(path: u64, branch: bool) -> u64 {
    mix(path ^ if branch { 0xA5A5 } else { 0x5A5A })
}

fn split_key(seed: u64, path: u64, col: usize) -> u64 {
    mix(mix(seed) ^ mix(path) ^ mix(col as u64 ^ 0xC0FF_EE00))
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        mask: Bits,
        n: u64,
        p: u64,
        path: u64,
    },
    Split {
        mask: Bits,
        n: u64,
        p: u64,
        path: u64,
        col: usize,
        score: Ratio,
        key: u64,
        yes: Box<Node>,
        no: Box<Node>,
    },
}

/// A fitted tree. Internal nodes test one column; leaves predict the majority
/// label, with ties going to positive.
#[derive(Debug, Clone)]
pub struct DecisionTree {
    seed: u64,
    root: Node,
}

struct Candidate {
    score: Ratio,
    key: u64,
    col: usize,
}

fn evaluate_split(
    data: &TreeData,
    seed: u64,
    mask: &Bits,
    n: u64,
    p: u64,
    path: u64,
    col: usize,
) -> Option<Candidate> {
    let c = &data.columns[col];
    let a = mask.count_and(c);
    if a == 0 || a == n {
        return None;
    }
    let ap = mask.count_and3(c, data.labels);
    let score = split_purity(n, p, a, ap);
    Some(Candidate {
        score,
        key: split_key(seed, path, col),
        col,
    })
}

fn beats(c: &Candidate, score: Ratio, key: u64) -> bool {
    match c.score.cmp(&score) {
        Ordering::Greater => true,
        Ordering::Equal => c.key < key,
        Ordering::Less => false,
    }
}

fn grow(data: &TreeData, seed: u64, mask: Bits, path: u64) -> Node {
    let n = mask.count();
    let p = mask.count_and(data.labels);
    if p == 0 || p == n {
        return Node::Leaf { mask, n, p, path };
    }
    let mut best: Option<Candidate> = None;
    for col in 0..data.columns.len() {
        if !data.usable(col) {
            continue;
        }
        if let Some(c) = evaluate_split(data, seed, &mask, n, p, path, col) {
            if best.as_ref().is_none_or(|b| beats(&c, b.score, b.key)) {
                best = Some(c);
            }
        }
    }
    let Some(best) = best else {
        return Node::Leaf { mask, n, p, path };
    };
    let column = &data.columns[best.col];
    let yes = grow(data, seed, mask.and(column), child_path(path, true));
    let no = grow(data, seed, mask.and_not(column), child_path(path, false));
    Node::Split {
        mask,
        n,
        p,
        path,
        col: best.col,
        score: best.score,
        key: best.key,
        yes: Box::new(yes),
        no: Box::new(no),
    }
}

/// Fits a tree on all usable columns.
pub fn fit_tree(data: &TreeData, seed: u64) -> DecisionTree {
    let mask = Bits::ones(data.labels.len());
    DecisionTree {
        seed,
        root: grow(data, seed, mask, mix(seed)),
    }
}

impl DecisionTree {
    /// A tree over no columns yet; it grows as columns arrive.
    pub fn empty(labels: &Bits, seed: u64) -> Self {
        fit_tree(&TreeData::new(labels, &[]), seed)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Updates the tree after column `col` was appended to `data`.
    /// Returns whether the tree changed.
    pub fn add_column(&mut self, data: &TreeData, col: usize) -> bool {
        if !data.usable(col) {
            return false;
        }
        let seed = self.seed;
        absorb(&mut self.root, data, seed, col)
    }

    pub fn predict(&self, x: impl Fn(usize) -> bool) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { n, p, .. } => return leaf_label(*n, *p),
                Node::Split { col, yes, no, .. } => node = if x(*col) { yes } else { no },
            }
        }
    }

    pub fn num_leaves(&self) -> usize {
        fn go(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Split { yes, no, .. } => go(yes) + go(no),
            }
        }
        go(&self.root)
    }

    /// One conjunction of `(column, negated)` tests per positive leaf, each
    /// sorted, with the conjunctions sorted.
    pub fn positive_paths(&self) -> Vec<Vec<(usize, bool)>> {
        fn go(n: &Node, path: &mut Vec<(usize, bool)>, out: &mut Vec<Vec<(usize, bool)>>) {
            match n {
                Node::Leaf { n, p, .. } => {
                    if leaf_label(*n, *p) {
                        let mut c = path.clone();
                        c.sort_unstable();
                        out.push(c);
                    }
                }
                Node::Split { col, yes, no, .. } => {
                    path.push((*col, false));
                    go(yes, path, out);
                    path.pop();
                    path.push((*col, true));
                    go(no, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

fn leaf_label(n: u64, p: u64) -> bool {
    p > 0 && 2 * p >= n
}

fn absorb(node: &mut Node, data: &TreeData, seed: u64, col: usize) -> bool {
    let regrow = match node {
        Node::Leaf { mask, n, p, path } => {
            *p != 0 && *p != *n && evaluate_split(data, seed, mask, *n, *p, *path, col).is_some()
        }
        Node::Split {
            mask,
            n,
            p,
            path,
            score,
            key,
            ..
        } => evaluate_split(data, seed, mask, *n, *p, *path, col)
            .is_some_and(|c| beats(&c, *score, *key)),
    };
    if regrow {
        let (mask, path) = match node {
            Node::Leaf { mask, path, .. } | Node::Split { mask, path, .. } => {
                (std::mem::replace(mask, Bits::zeros(0)), *path)
            }
        };
        *node = grow(data, seed, mask, path);
        return true;
    }
    match node {
        Node::Leaf { .. } => false,
        Node::Split { yes, no, .. } => {
            let a = absorb(yes, data, seed, col);
            let b = absorb(no, data, seed, col);
            a || b
        }
    }
}
