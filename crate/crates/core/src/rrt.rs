//! Increasing trees labelled by the blocks of a partition, uniform random
//! recursive trees, and the edge-cutting operation.
//!
//! Cutting a random recursive tree at a uniform edge merges the labels of the
//! removed subtree into the node below it. Run with independent exponential
//! clocks on the edges this is a construction of the Bolthausen-Sznitman
//! coalescent, used by [`crate::simulate`].

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::Rng;

use crate::combinatorics::factorial;
use crate::error::{domain, Error, Result};
use crate::partition::{Block, SetPartition};

/// Largest label count accepted by [`enumerate_increasing_trees`].
pub const MAX_ENUMERATED_NODES: usize = 9;

/// A rooted tree whose nodes are the blocks of a partition and whose block
/// minima increase along every path away from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IncreasingTree {
    labels: SetPartition,
    parent: BTreeMap<Block, Block>,
}

impl IncreasingTree {
    /// Validates a parent map over the blocks of `labels`.
    pub fn new(labels: SetPartition, parent: BTreeMap<Block, Block>) -> Result<Self> {
        let root = labels.blocks()[0];
        if parent.len() + 1 != labels.num_blocks() || parent.contains_key(&root) {
            return Err(domain("every non-root node needs exactly one parent"));
        }
        for (child, up) in &parent {
            if !labels.blocks().contains(child) || !labels.blocks().contains(up) {
                return Err(domain("parent map mentions a block that is not a label"));
            }
            // increasing minima forces acyclicity, hence a tree rooted at `root`
            if up.least() >= child.least() {
                return Err(domain("labels do not increase away from the root"));
            }
        }
        Ok(IncreasingTree { labels, parent })
    }

    /// The one-node tree on a one-block partition.
    fn single(labels: SetPartition) -> Self {
        IncreasingTree { labels, parent: BTreeMap::new() }
    }

    /// The label partition `p(T)`.
    pub fn labels(&self) -> &SetPartition {
        &self.labels
    }

    /// Child-to-parent map.
    pub fn parents(&self) -> &BTreeMap<Block, Block> {
        &self.parent
    }

    /// The root, the block with the least minimum.
    pub fn root(&self) -> Block {
        self.labels.blocks()[0]
    }

    /// Number of nodes.
    pub fn num_nodes(&self) -> usize {
        self.labels.num_blocks()
    }

    /// Parent of a node; `None` for the root or a non-node.
    pub fn parent_of(&self, node: Block) -> Option<Block> {
        self.parent.get(&node).copied()
    }

    /// Non-root nodes in label order; each stands for the edge to its parent.
    pub fn edges(&self) -> Vec<Block> {
        self.labels.blocks()[1..].to_vec()
    }

    /// Union of the labels in the subtree rooted at `node`.
    pub fn subtree_union(&self, node: Block) -> Block {
        // Children have larger minima, so one pass in decreasing label order
        // accumulates every subtree before its parent is read.
        let mut acc: BTreeMap<Block, Block> = BTreeMap::new();
        for b in self.labels.blocks().iter().rev() {
            let mine = acc.remove(b).map_or(*b, |below| below.union(*b));
            if *b == node {
                return mine;
            }
            if let Some(p) = self.parent.get(b) {
                let e = acc.entry(*p).or_insert(mine);
                *e = e.union(mine);
            }
        }
        node
    }

    /// Cuts the edge between `node` and its parent: the subtree above the
    /// edge is removed and its labels are merged into the parent's label.
    pub fn cut_edge(&self, node: Block) -> Result<IncreasingTree> {
        let below = self
            .parent_of(node)
            .ok_or_else(|| domain("cut needs a non-root node of the tree"))?;
        let removed = self.subtree_union(node);
        let merged = below.union(removed);
        let blocks: Vec<Block> = self
            .labels
            .blocks()
            .iter()
            .filter(|b| !b.is_subset(removed) && **b != below)
            .copied()
            .chain(core::iter::once(merged))
            .collect();
        let labels = SetPartition::from_blocks(blocks)?;
        let rename = |b: Block| if b == below { merged } else { b };
        let parent = self
            .parent
            .iter()
            .filter(|(c, _)| !c.is_subset(removed))
            .map(|(c, p)| (rename(*c), rename(*p)))
            .collect();
        Ok(IncreasingTree { labels, parent })
    }

    /// Cuts an edge chosen uniformly at random.
    pub fn cut_random<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<IncreasingTree> {
        let edges = self.edges();
        if edges.is_empty() {
            return Err(domain("a single-node tree has no edge to cut"));
        }
        self.cut_edge(edges[rng.random_range(0..edges.len())])
    }

    /// `rho ⊏ T`: some sequence of cuts turns `T` into an increasing tree on
    /// `rho`.
    ///
    /// Holds iff `p(T) <= rho` and, for every block `B` of `rho`, the nodes
    /// labelled inside `B` hang together below the node `v(B)` holding
    /// `min B`, with nothing foreign above them: every edge either stays
    /// inside one block of `rho` or joins `v(B)` to `v(B')` for two blocks.
    pub fn contains(&self, rho: &SetPartition) -> Result<bool> {
        if !self.labels.is_refinement(rho)? {
            return Ok(false);
        }
        let outer = |b: Block| rho.block_of(b.least()).expect("refinement covers every label");
        let is_top = |b: Block| outer(b).least() == b.least();
        Ok(self.parent.iter().all(|(child, up)| {
            if is_top(*child) {
                is_top(*up)
            } else {
                outer(*child) == outer(*up)
            }
        }))
    }
}

/// Uniform random recursive tree on `pi`: blocks are attached in order of
/// their minima, each to a uniformly chosen earlier node.
pub fn sample_rrt<R: Rng + ?Sized>(pi: &SetPartition, rng: &mut R) -> IncreasingTree {
    let blocks = pi.blocks();
    let parent = (1..blocks.len())
        .map(|k| (blocks[k], blocks[rng.random_range(0..k)]))
        .collect();
    IncreasingTree { labels: pi.clone(), parent }
}

/// Every increasing tree on `pi`, `(|pi|-1)!` of them.
pub fn enumerate_increasing_trees(pi: &SetPartition) -> Result<Vec<IncreasingTree>> {
    let b = pi.num_blocks();
    if b > MAX_ENUMERATED_NODES {
        return Err(Error::SizeLimit { n: b, cap: MAX_ENUMERATED_NODES, count: factorial(b - 1) });
    }
    let blocks = pi.blocks();
    let mut out = Vec::new();
    // choice[k-1] in 0..k is the parent index of block k
    let mut choice = alloc::vec![0usize; b.saturating_sub(1)];
    loop {
        let parent = choice.iter().enumerate().map(|(k, &c)| (blocks[k + 1], blocks[c])).collect();
        out.push(IncreasingTree { labels: pi.clone(), parent });
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Ok(out);
            }
            choice[pos] += 1;
            if choice[pos] <= pos {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Number of increasing trees on `pi` containing `rho`:
/// `(|rho|-1)! ∏_{B∈rho} (|pi|_B|-1)!`, zero unless `pi <= rho`.
pub fn count_trees_containing(pi: &SetPartition, rho: &SetPartition) -> Result<BigUint> {
    if !pi.is_refinement(rho)? {
        return Ok(BigUint::default());
    }
    Ok(pi
        .restriction_sizes(rho)
        .into_iter()
        .map(|m| factorial(m - 1))
        .fold(factorial(rho.num_blocks() - 1), |a, b| a * b))
}

impl From<SetPartition> for IncreasingTree {
    /// Only meaningful for one-block partitions; other inputs get a path
    /// attaching each block to its predecessor.
    fn from(labels: SetPartition) -> Self {
        if labels.num_blocks() == 1 {
            return IncreasingTree::single(labels);
        }
        let blocks = labels.blocks().to_vec();
        let parent = blocks.windows(2).map(|w| (w[1], w[0])).collect();
        IncreasingTree { labels, parent }
    }
}
