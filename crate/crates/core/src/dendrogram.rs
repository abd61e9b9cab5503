//! Finite dendrograms and their bijection with finite ultrametric spaces.
//!
//! A finite dendrogram is a chain of partitions indexed by increasing
//! heights: all singletons at height 0, strictly coarser at each merge
//! height, a single block at the top. `to_dendrogram` realizes `Δ_X`
//! (partitions are the classes of `u(x, x') ≤ t`), `from_dendrogram`
//! realizes its inverse `Υ_X` (`u(x, x')` is the smallest height at which
//! the points share a block), and `closed_quotient` forgets all detail
//! below a level `t`.
//!
//! `CanonicalSignature` is a recursive, order- and label-invariant
//! fingerprint of the merge structure: equal signatures hold exactly for
//! isometric ultrametric spaces (heights compared on a grid of width
//! [`EPS`](crate::EPS)).

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::space::FiniteMetricSpace;
use crate::{grid, EPS};

/// Partition of `0..n` in canonical order: blocks sorted by first element,
/// each block ascending.
pub type Partition = Vec<Vec<usize>>;

fn canonicalize(mut partition: Partition) -> Partition {
    for block in &mut partition {
        block.sort_unstable();
    }
    partition.sort_by_key(|b| b[0]);
    partition
}

fn check_partition(partition: &Partition, n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for block in partition {
        if block.is_empty() {
            return Err(Error::structural("empty block in partition"));
        }
        for &i in block {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::structural(
                    "partition does not cover the leaves exactly once",
                ));
            }
        }
    }
    if seen.iter().all(|&s| s) {
        Ok(())
    } else {
        Err(Error::structural(
            "partition does not cover the leaves exactly once",
        ))
    }
}

fn is_refinement(finer: &Partition, coarser: &Partition, n: usize) -> bool {
    let mut block_of = vec![usize::MAX; n];
    for (bi, block) in coarser.iter().enumerate() {
        for &i in block {
            block_of[i] = bi;
        }
    }
    finer
        .iter()
        .all(|block| block.iter().all(|&i| block_of[i] == block_of[block[0]]))
}

/// A finite merge structure over a labeled leaf set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    leaves: Vec<String>,
    merge_heights: Vec<f64>,
    /// `partitions[0]` is all singletons; `partitions[k]` holds at height
    /// `merge_heights[k - 1]`, each strictly coarser than the previous.
    partitions: Vec<Partition>,
}

impl Dendrogram {
    pub fn new(
        leaves: Vec<String>,
        merge_heights: Vec<f64>,
        partitions: Vec<Partition>,
    ) -> Result<Self> {
        let n = leaves.len();
        if n == 0 {
            return Err(Error::structural("dendrogram needs at least one leaf"));
        }
        {
            let mut sorted: Vec<&String> = leaves.iter().collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::structural("duplicate leaf labels"));
            }
        }
        if partitions.len() != merge_heights.len() + 1 {
            return Err(Error::structural(
                "expected one partition per merge height plus the height-0 partition",
            ));
        }
        if merge_heights.iter().any(|h| !h.is_finite() || *h <= 0.0) {
            return Err(Error::structural(
                "merge heights must be positive and finite",
            ));
        }
        if merge_heights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::structural(
                "merge heights must be strictly increasing",
            ));
        }
        let partitions: Vec<Partition> = partitions.into_iter().map(canonicalize).collect();
        for p in &partitions {
            check_partition(p, n)?;
        }
        if partitions[0].len() != n {
            return Err(Error::structural(
                "partition at height 0 must be all singletons",
            ));
        }
        for w in partitions.windows(2) {
            if w[1].len() >= w[0].len() || !is_refinement(&w[0], &w[1], n) {
                return Err(Error::structural(
                    "each partition must be strictly coarser than its predecessor",
                ));
            }
        }
        if partitions.last().unwrap().len() != 1 {
            return Err(Error::structural("top partition must be the single block"));
        }
        Ok(Dendrogram {
            leaves,
            merge_heights,
            partitions,
        })
    }

    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn merge_heights(&self) -> &[f64] {
        &self.merge_heights
    }

    /// All partitions, starting with the singletons at height 0.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// The block containing leaf `i` at height `t` (the smallest recorded
    /// level with height >= t under the EPS comparison).
    pub fn block_at(&self, i: usize, t: f64) -> &[usize] {
        let level = self
            .merge_heights
            .iter()
            .take_while(|&&h| h <= t + EPS)
            .count();
        self.partitions[level]
            .iter()
            .find(|b| b.contains(&i))
            .expect("partitions cover all leaves")
    }
}

/// Classes of the relation `u(x, x') <= t + EPS`, in canonical order.
pub(crate) fn quotient_blocks(space: &FiniteMetricSpace, t: f64) -> Partition {
    let n = space.len();
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if space.dist(i, j) <= t + EPS {
                let (ri, rj) = (find(&mut root, i), find(&mut root, j));
                if ri != rj {
                    root[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut root, i);
        if block_of[r] == usize::MAX {
            block_of[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[block_of[r]].push(i);
    }
    canonicalize(blocks)
}

fn ensure_ultrametric(space: &FiniteMetricSpace) -> Result<()> {
    space.validate(PExponent::INFINITY).map(|_| ())
}

/// `Δ_X`: the dendrogram whose partition at each spectrum value `t` is the
/// set of classes of `u(x, x') ≤ t`. Input must be ultrametric; the error
/// otherwise names a violating triple.
pub fn to_dendrogram(space: &FiniteMetricSpace) -> Result<Dendrogram> {
    ensure_ultrametric(space)?;
    let n = space.len();
    let heights: Vec<f64> = space
        .spectrum()
        .values()
        .iter()
        .copied()
        .filter(|&t| t > 0.0)
        .collect();
    let mut partitions: Vec<Partition> = Vec::with_capacity(heights.len() + 1);
    partitions.push((0..n).map(|i| vec![i]).collect());
    for &t in &heights {
        partitions.push(quotient_blocks(space, t));
    }
    Dendrogram::new(space.labels().to_vec(), heights, partitions)
}

/// `Υ_X`: rebuilds the ultrametric in which `u(x, x')` is the smallest
/// height at which `x` and `x'` share a block.
pub fn from_dendrogram(d: &Dendrogram) -> FiniteMetricSpace {
    let n = d.leaves.len();
    let mut dist = vec![f64::NAN; n * n];
    for i in 0..n {
        dist[i * n + i] = 0.0;
    }
    for (level, partition) in d.partitions.iter().enumerate().skip(1) {
        let h = d.merge_heights[level - 1];
        for block in partition {
            for (a, &i) in block.iter().enumerate() {
                for &j in &block[a + 1..] {
                    if dist[i * n + j].is_nan() {
                        dist[i * n + j] = h;
                        dist[j * n + i] = h;
                    }
                }
            }
        }
    }
    debug_assert!(dist.iter().all(|v| !v.is_nan()), "top partition joins all");
    FiniteMetricSpace::from_parts(d.leaves.clone(), dist)
}

fn block_label(space: &FiniteMetricSpace, block: &[usize]) -> String {
    let mut ls: Vec<&str> = block.iter().map(|&i| space.labels()[i].as_str()).collect();
    ls.sort_unstable();
    ls.join("+")
}

/// The t-closed quotient `X_c(t)`: points are the classes of
/// `u(x, x') ≤ t`, distances between distinct classes are inherited from
/// any representatives (well-defined by the strong triangle inequality).
/// Block labels are the sorted member labels joined with `+`.
pub fn closed_quotient(space: &FiniteMetricSpace, t: f64) -> Result<FiniteMetricSpace> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::invalid(format!(
            "quotient level must be >= 0, got {t}"
        )));
    }
    ensure_ultrametric(space)?;
    Ok(quotient_unchecked(space, t))
}

/// Quotient without the O(n³) ultrametric re-check; for callers that have
/// already validated the input (the u_GH level scan runs this in a loop).
pub(crate) fn quotient_unchecked(space: &FiniteMetricSpace, t: f64) -> FiniteMetricSpace {
    let blocks = quotient_blocks(space, t);
    let m = blocks.len();
    let labels: Vec<String> = blocks.iter().map(|b| block_label(space, b)).collect();
    let mut dist = vec![0.0; m * m];
    for a in 0..m {
        for b in (a + 1)..m {
            let d = space.dist(blocks[a][0], blocks[b][0]);
            dist[a * m + b] = d;
            dist[b * m + a] = d;
        }
    }
    FiniteMetricSpace::from_parts(labels, dist)
}

/// One node of a canonical signature: a leaf, or a merge at a height
/// (snapped to the EPS grid) with canonically sorted children.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SignatureNode {
    Leaf,
    Merge {
        height: i64,
        children: Vec<SignatureNode>,
    },
}

impl SignatureNode {
    fn render_into(&self, out: &mut String) {
        match self {
            SignatureNode::Leaf => out.push('*'),
            SignatureNode::Merge { height, children } => {
                out.push('(');
                out.push_str(&format!("{}", *height as f64 * EPS));
                for c in children {
                    out.push(' ');
                    c.render_into(out);
                }
                out.push(')');
            }
        }
    }
}

/// A relabeling- and reordering-invariant fingerprint of an ultrametric
/// space. Two spaces have equal signatures iff they are isometric (with
/// heights compared at EPS resolution).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalSignature {
    root: SignatureNode,
}

impl CanonicalSignature {
    pub fn root(&self) -> &SignatureNode {
        &self.root
    }

    /// S-expression form, e.g. `(2 (1 * *) *)`; for display only.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.root.render_into(&mut out);
        out
    }
}

pub fn canonical_signature(space: &FiniteMetricSpace) -> Result<CanonicalSignature> {
    ensure_ultrametric(space)?;
    Ok(signature_unchecked(space))
}

pub(crate) fn signature_unchecked(space: &FiniteMetricSpace) -> CanonicalSignature {
    let all: Vec<usize> = (0..space.len()).collect();
    CanonicalSignature {
        root: signature_of(space, &all),
    }
}

fn signature_of(space: &FiniteMetricSpace, members: &[usize]) -> SignatureNode {
    if members.len() == 1 {
        return SignatureNode::Leaf;
    }
    let mut top = 0i64;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            top = top.max(grid(space.dist(i, j)));
        }
    }
    // Children are the classes of pairs merging strictly below the top.
    let k = members.len();
    let mut root: Vec<usize> = (0..k).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for a in 0..k {
        for b in (a + 1)..k {
            if grid(space.dist(members[a], members[b])) < top {
                let (ra, rb) = (find(&mut root, a), find(&mut root, b));
                if ra != rb {
                    root[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; k];
    for (a, &member) in members.iter().enumerate() {
        let r = find(&mut root, a);
        if group_of[r] == usize::MAX {
            group_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[r]].push(member);
    }
    debug_assert!(groups.len() >= 2, "top height must split the block");
    let mut children: Vec<SignatureNode> = groups.iter().map(|g| signature_of(space, g)).collect();
    children.sort();
    SignatureNode::Merge {
        height: top,
        children,
    }
}

/// Exhaustive isometry check by permutation search; the oracle against
/// which signatures are validated. Only sensible for tiny spaces.
pub(crate) fn isometric_by_permutation(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    debug_assert!(n <= 8, "permutation search is factorial");
    let mut perm: Vec<usize> = (0..n).collect();
    permute_check(a, b, &mut perm, 0)
}

fn permute_check(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    perm: &mut Vec<usize>,
    k: usize,
) -> bool {
    let n = perm.len();
    if k == n {
        return (0..n)
            .all(|i| (i + 1..n).all(|j| (a.dist(i, j) - b.dist(perm[i], perm[j])).abs() <= EPS));
    }
    for i in k..n {
        perm.swap(k, i);
        if permute_check(a, b, perm, k + 1) {
            perm.swap(k, i);
            return true;
        }
        perm.swap(k, i);
    }
    false
}
