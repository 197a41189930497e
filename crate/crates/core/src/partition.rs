//! Set partitions, the refinement order and the enumerated partition lattice.
//!
//! Ground-set elements are `1..=64`; a [`Block`] is a bitmask over them.
//! A [`SetPartition`] keeps its blocks sorted by least element, which makes
//! the representation canonical and cheap to hash, compare and print.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;

use crate::combinatorics::{bell, factorial};
use crate::error::{domain, Error, Result};

/// Largest supported ground-set element.
pub const MAX_ELEMENT: usize = 64;

/// Default cap on `n` for operations that enumerate the whole lattice.
pub const DEFAULT_LATTICE_CAP: usize = 8;

/// A nonempty subset of `{1, ..., 64}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block(u64);

impl Block {
    /// Block from its bitmask (bit `i - 1` stands for element `i`).
    ///
    /// Returns `None` for the empty mask.
    pub fn from_mask(mask: u64) -> Option<Self> {
        (mask != 0).then_some(Block(mask))
    }

    /// Block from a list of elements in `1..=64`.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Result<Self> {
        let mut mask = 0u64;
        for e in elements {
            if e == 0 || e > MAX_ELEMENT {
                return Err(domain(alloc::format!("element {e} outside 1..={MAX_ELEMENT}")));
            }
            mask |= 1 << (e - 1);
        }
        Block::from_mask(mask).ok_or_else(|| domain("empty block"))
    }

    /// `{1, ..., n}`.
    pub fn range(n: usize) -> Self {
        assert!((1..=MAX_ELEMENT).contains(&n), "ground size {n} out of range");
        Block(if n == 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    /// The underlying bitmask.
    pub fn mask(self) -> u64 {
        self.0
    }

    /// Least element.
    pub fn least(self) -> usize {
        self.0.trailing_zeros() as usize + 1
    }

    /// Number of elements.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Always false; blocks are nonempty by construction.
    pub fn is_empty(self) -> bool {
        false
    }

    /// Membership test.
    pub fn contains(self, element: usize) -> bool {
        (1..=MAX_ELEMENT).contains(&element) && self.0 & (1 << (element - 1)) != 0
    }

    /// `self ⊆ other`.
    pub fn is_subset(self, other: Block) -> bool {
        self.0 & !other.0 == 0
    }

    /// Union of two blocks.
    pub fn union(self, other: Block) -> Block {
        Block(self.0 | other.0)
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(self, other: Block) -> Option<Block> {
        Block::from_mask(self.0 & other.0)
    }

    /// Elements in increasing order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        core::iter::from_fn(move || {
            (m != 0).then(|| {
                let e = m.trailing_zeros() as usize + 1;
                m &= m - 1;
                e
            })
        })
    }
}

impl fmt::Display for Block {
    /// Comma-separated elements, e.g. `1,3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for Block {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let elements = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(alloc::format!("bad element {t:?} in block {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Block::from_elements(elements)
    }
}

/// A partition of a finite ground set in canonical form: blocks pairwise
/// disjoint, nonempty, and listed by increasing least element.
///
/// Partitions of `[n] = {1..n}` are the states of the coalescents; partitions
/// of other ground sets arise as restrictions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    blocks: Vec<Block>,
}

impl SetPartition {
    /// Canonicalizes and validates a list of blocks.
    pub fn from_blocks(mut blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(domain("a partition needs at least one block"));
        }
        let mut seen = 0u64;
        for b in &blocks {
            if seen & b.mask() != 0 {
                return Err(domain("blocks are not pairwise disjoint"));
            }
            seen |= b.mask();
        }
        blocks.sort_unstable_by_key(|b| b.least());
        Ok(SetPartition { blocks })
    }

    /// Convenience constructor from element lists, e.g. `&[&[1, 3], &[2]]`.
    pub fn from_lists(lists: &[&[usize]]) -> Result<Self> {
        let blocks = lists
            .iter()
            .map(|l| Block::from_elements(l.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(blocks)
    }

    fn from_sorted_unchecked(blocks: Vec<Block>) -> Self {
        debug_assert!(blocks.windows(2).all(|w| w[0].least() < w[1].least()));
        SetPartition { blocks }
    }

    fn from_unsorted_unchecked(mut blocks: Vec<Block>) -> Self {
        blocks.sort_unstable_by_key(|b| b.least());
        SetPartition { blocks }
    }

    /// Partition of `[n]` into singletons.
    pub fn singletons(n: usize) -> Self {
        Self::singletons_of(Block::range(n))
    }

    /// Partition of an arbitrary ground set into singletons.
    pub fn singletons_of(ground: Block) -> Self {
        Self::from_sorted_unchecked(ground.elements().map(|e| Block(1 << (e - 1))).collect())
    }

    /// The one-block partition `{[n]}`.
    pub fn single_block(n: usize) -> Self {
        Self::from_sorted_unchecked(vec![Block::range(n)])
    }

    /// Blocks in canonical order.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Number of blocks `|pi|`.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Union of all blocks.
    pub fn ground(&self) -> Block {
        Block(self.blocks.iter().fold(0, |m, b| m | b.mask()))
    }

    /// Size of the ground set.
    pub fn ground_len(&self) -> usize {
        self.ground().len()
    }

    /// True if the ground set is exactly `{1..n}` for some `n`.
    pub fn is_on_range(&self) -> bool {
        let g = self.ground().mask();
        g & (g.wrapping_add(1)) == 0
    }

    /// The block containing `element`.
    pub fn block_of(&self, element: usize) -> Option<Block> {
        self.blocks.iter().copied().find(|b| b.contains(element))
    }

    fn check_same_ground(&self, other: &SetPartition) -> Result<()> {
        if self.ground() == other.ground() {
            Ok(())
        } else {
            Err(Error::GroundMismatch)
        }
    }

    /// `self <= other`: every block of `self` lies inside a block of `other`.
    pub fn is_refinement(&self, other: &SetPartition) -> Result<bool> {
        self.check_same_ground(other)?;
        Ok(self.refines(other))
    }

    /// Refinement test without the ground-set check.
    pub(crate) fn refines(&self, other: &SetPartition) -> bool {
        self.blocks.len() >= other.blocks.len()
            && self
                .blocks
                .iter()
                .all(|b| other.blocks.iter().any(|c| b.is_subset(*c)))
    }

    pub(crate) fn require_refinement(&self, other: &SetPartition) -> Result<()> {
        if self.is_refinement(other)? {
            Ok(())
        } else {
            Err(Error::NotRefinement(self.to_string(), other.to_string()))
        }
    }

    /// Restriction `{C ∩ B : C ∈ self, C ∩ B ≠ ∅}`, a partition of `B`.
    pub fn restrict(&self, b: Block) -> Result<SetPartition> {
        if !b.is_subset(self.ground()) {
            return Err(domain("restriction set is not a subset of the ground set"));
        }
        Ok(Self::from_sorted_unchecked(
            self.blocks.iter().filter_map(|c| c.intersect(b)).collect(),
        ))
    }

    /// `|self restricted to B|` for each block `B` of the coarser partition,
    /// in the coarser partition's block order. Assumes `self <= coarser`.
    pub fn restriction_sizes(&self, coarser: &SetPartition) -> Vec<usize> {
        coarser
            .blocks
            .iter()
            .map(|b| self.blocks.iter().filter(|c| c.is_subset(*b)).count())
            .collect()
    }

    fn merge_subset(&self, chosen: u64) -> SetPartition {
        let mut merged = 0u64;
        let mut rest = Vec::with_capacity(self.blocks.len());
        for (i, b) in self.blocks.iter().enumerate() {
            if chosen & (1 << i) != 0 {
                merged |= b.mask();
            } else {
                rest.push(*b);
            }
        }
        rest.push(Block(merged));
        Self::from_unsorted_unchecked(rest)
    }

    /// All partitions reachable by one merger of at least two blocks
    /// (`2^b - b - 1` of them for `b` blocks).
    pub fn merge_covers(&self) -> Vec<SetPartition> {
        let b = self.blocks.len();
        (1u64..(1u64 << b))
            .filter(|s| s.count_ones() >= 2)
            .map(|s| self.merge_subset(s))
            .collect()
    }

    /// All partitions obtained by merging exactly one pair of blocks.
    pub fn pair_covers(&self) -> Vec<SetPartition> {
        let b = self.blocks.len();
        let mut out = Vec::with_capacity(b * b.saturating_sub(1) / 2);
        for i in 0..b {
            for j in i + 1..b {
                out.push(self.merge_subset((1 << i) | (1 << j)));
            }
        }
        out
    }

    /// Restricted growth string: for each ground element in increasing
    /// order, the index of its block.
    pub fn rgs(&self) -> Vec<u8> {
        self.ground()
            .elements()
            .map(|e| self.blocks.iter().position(|b| b.contains(e)).unwrap() as u8)
            .collect()
    }

    /// Sort key of the fixed linear extension of refinement: more blocks
    /// first, then lexicographic restricted growth string.
    pub fn extension_key(&self) -> (Reverse<usize>, Vec<u8>) {
        (Reverse(self.blocks.len()), self.rgs())
    }

    /// The interval `[self, upper]`, sorted by [`Self::extension_key`].
    ///
    /// Built blockwise through `[pi, rho] ≅ ⨉_{B∈rho} P(pi|_B)`.
    pub fn interval(&self, upper: &SetPartition) -> Result<Vec<SetPartition>> {
        self.require_refinement(upper)?;
        // For each block of `upper`: every way of grouping the blocks of `self` inside it.
        let factors: Vec<Vec<Vec<Block>>> = upper
            .blocks
            .iter()
            .map(|big| {
                let inner: Vec<Block> =
                    self.blocks.iter().copied().filter(|c| c.is_subset(*big)).collect();
                growth_strings(inner.len())
                    .into_iter()
                    .map(|rgs| {
                        let k = rgs.iter().max().map_or(0, |m| *m as usize + 1);
                        let mut merged = vec![0u64; k];
                        for (c, g) in inner.iter().zip(&rgs) {
                            merged[*g as usize] |= c.mask();
                        }
                        merged.into_iter().map(Block).collect()
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; factors.len()];
        loop {
            let blocks: Vec<Block> = factors
                .iter()
                .zip(&choice)
                .flat_map(|(f, &c)| f[c].iter().copied())
                .collect();
            out.push(Self::from_unsorted_unchecked(blocks));
            // mixed-radix increment
            let mut pos = 0;
            loop {
                if pos == factors.len() {
                    out.sort_by_cached_key(|p| p.extension_key());
                    return Ok(out);
                }
                choice[pos] += 1;
                if choice[pos] < factors[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Number of maximal chains `m(self, upper)` of single pair-mergers:
    /// `2^{|rho|-|pi|} (|pi|-|rho|)! ∏_{B∈rho} |pi|_B|!`.
    pub fn count_maximal_chains(&self, upper: &SetPartition) -> Result<BigUint> {
        self.require_refinement(upper)?;
        let steps = self.num_blocks() - upper.num_blocks();
        let prod: BigUint = self.restriction_sizes(upper).into_iter().map(factorial).product();
        Ok((factorial(steps) * prod) >> steps)
    }
}

impl fmt::Display for SetPartition {
    /// Canonical text form, e.g. `1,3|2|4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetPartition({self})")
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Parses the canonical text form; block order and element order are free.
    fn from_str(s: &str) -> Result<Self> {
        let blocks = s
            .trim()
            .split('|')
            .map(str::parse)
            .collect::<Result<Vec<Block>>>()?;
        SetPartition::from_blocks(blocks)
    }
}

/// All restricted growth strings of length `k` (set partitions of `k` items).
pub(crate) fn growth_strings(k: usize) -> Vec<Vec<u8>> {
    fn go(rgs: &mut Vec<u8>, max: u8, k: usize, out: &mut Vec<Vec<u8>>) {
        if rgs.len() == k {
            out.push(rgs.clone());
            return;
        }
        let top = if rgs.is_empty() { 0 } else { max + 1 };
        for g in 0..=top {
            rgs.push(g);
            go(rgs, max.max(g), k, out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(k), 0, k, &mut out);
    out
}

/// `P([n])` enumerated in a fixed linear extension of refinement.
///
/// Index 0 is the partition into singletons, the last index is `{[n]}`.
/// All matrices in this crate are indexed by positions in a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionLattice {
    n: usize,
    elements: Vec<SetPartition>,
    index: BTreeMap<SetPartition, usize>,
}

impl PartitionLattice {
    /// Enumerates `P([n])` under [`DEFAULT_LATTICE_CAP`].
    pub fn enumerate(n: usize) -> Result<Self> {
        Self::enumerate_with_cap(n, DEFAULT_LATTICE_CAP)
    }

    /// Enumerates `P([n])`, refusing `n > cap`.
    pub fn enumerate_with_cap(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("lattice needs n >= 1"));
        }
        if n > cap || n > MAX_ELEMENT {
            return Err(Error::SizeLimit { n, cap: cap.min(MAX_ELEMENT), count: bell(n) });
        }
        let mut keyed: Vec<_> = growth_strings(n)
            .into_iter()
            .map(|rgs| {
                let k = *rgs.iter().max().unwrap() as usize + 1;
                let mut masks = vec![0u64; k];
                for (e, g) in rgs.iter().enumerate() {
                    masks[*g as usize] |= 1 << e;
                }
                // growth strings list blocks by least element already
                let p = SetPartition::from_sorted_unchecked(masks.into_iter().map(Block).collect());
                ((Reverse(k), rgs), p)
            })
            .collect();
        keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let elements: Vec<SetPartition> = keyed.into_iter().map(|(_, p)| p).collect();
        let index = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(PartitionLattice { n, elements, index })
    }

    /// Ground-set size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of partitions, `bell(n)`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Never true; `P([n])` is nonempty.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Partitions in linear-extension order.
    pub fn elements(&self) -> &[SetPartition] {
        &self.elements
    }

    /// Partition at position `i`.
    pub fn get(&self, i: usize) -> &SetPartition {
        &self.elements[i]
    }

    /// Position of a partition of `[n]`.
    pub fn index_of(&self, p: &SetPartition) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Position, or a domain error naming the partition.
    pub fn require_index(&self, p: &SetPartition) -> Result<usize> {
        self.index_of(p)
            .ok_or_else(|| domain(alloc::format!("{p} is not a partition of [{}]", self.n)))
    }

    /// The partition into singletons.
    pub fn bottom(&self) -> &SetPartition {
        &self.elements[0]
    }

    /// The absorbing partition `{[n]}`.
    pub fn top(&self) -> &SetPartition {
        self.elements.last().unwrap()
    }

    /// Positions of all `sigma >= elements[i]`, ascending.
    pub fn upper_set(&self, i: usize) -> Vec<usize> {
        let lower = &self.elements[i];
        let mut idx: Vec<usize> = lower
            .interval(self.top())
            .expect("every partition refines the top")
            .iter()
            .map(|p| self.index[p])
            .collect();
        idx.sort_unstable();
        idx
    }

    /// Positions of all partitions with exactly `j` blocks.
    pub fn with_blocks(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.elements
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.num_blocks() == j)
            .map(|(i, _)| i)
    }

    /// Labels of all elements in canonical text form.
    pub fn labels(&self) -> Vec<String> {
        self.elements.iter().map(|p| p.to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn text_round_trip_and_canonical_order() {
        let x = p("4|3,1|2");
        assert_eq!(x.to_string(), "1,3|2|4");
        assert_eq!(x.num_blocks(), 3);
        assert!(x.is_on_range());
        assert!("1,2|2".parse::<SetPartition>().is_err());
        assert!("".parse::<SetPartition>().is_err());
        assert!("0|1".parse::<SetPartition>().is_err());
    }

    #[test]
    fn lattice_examples() {
        let l1 = PartitionLattice::enumerate(1).unwrap();
        assert_eq!(l1.len(), 1);
        assert_eq!(l1.get(0).to_string(), "1");
        let l3 = PartitionLattice::enumerate(3).unwrap();
        assert_eq!(l3.len(), 5);
        assert_eq!(l3.bottom(), &SetPartition::singletons(3));
        assert_eq!(l3.top(), &SetPartition::single_block(3));
        assert_eq!(PartitionLattice::enumerate(4).unwrap().len(), 15);
    }

    #[test]
    fn lattice_cap_is_enforced() {
        match PartitionLattice::enumerate(9) {
            Err(Error::SizeLimit { n: 9, count, .. }) => assert_eq!(count, bell(9)),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(PartitionLattice::enumerate_with_cap(9, 9).unwrap().len(), 21147);
        assert!(PartitionLattice::enumerate(0).is_err());
    }

    #[test]
    fn order_is_a_linear_extension() {
        for n in 1..=6 {
            let l = PartitionLattice::enumerate(n).unwrap();
            assert_eq!(l.len(), bell(n).to_usize().unwrap());
            for (i, a) in l.elements().iter().enumerate() {
                assert_eq!(l.index_of(a), Some(i));
                for (j, b) in l.elements().iter().enumerate() {
                    if a != b && a.refines(b) {
                        assert!(i < j, "{a} < {b} but index {i} >= {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn refinement_examples() {
        let x = p("1,2|3");
        assert!(x.is_refinement(&x).unwrap());
        assert!(SetPartition::singletons(4).is_refinement(&p("1,2,3|4")).unwrap());
        assert!(!x.is_refinement(&p("1,3|2")).unwrap());
        assert_eq!(x.is_refinement(&SetPartition::singletons(4)), Err(Error::GroundMismatch));
    }

    #[test]
    fn restrict_examples() {
        let b123 = Block::range(3);
        assert_eq!(
            SetPartition::singletons(4).restrict(b123).unwrap(),
            SetPartition::singletons(3)
        );
        assert_eq!(p("1,3|2,4").restrict(b123).unwrap(), p("1,3|2"));
        let x = p("1,4|2|3");
        assert_eq!(x.restrict(Block::range(4)).unwrap(), x);
        assert!(Block::from_elements([]).is_err());
        assert!(x.restrict(Block::range(5)).is_err());
    }

    #[test]
    fn cover_counts() {
        assert!(SetPartition::single_block(3).merge_covers().is_empty());
        assert!(SetPartition::single_block(3).pair_covers().is_empty());
        let d3 = SetPartition::singletons(3);
        assert_eq!(d3.merge_covers().len(), 4);
        assert_eq!(d3.pair_covers().len(), 3);
        let four = p("1|2|3,5|4");
        assert_eq!(four.merge_covers().len(), 11);
        assert_eq!(SetPartition::singletons(5).pair_covers().len(), 10);
    }

    #[test]
    fn covers_are_covers() {
        let l = PartitionLattice::enumerate(5).unwrap();
        for x in l.elements() {
            let merges = x.merge_covers();
            let pairs = x.pair_covers();
            for s in &pairs {
                assert!(merges.contains(s));
                assert_eq!(s.num_blocks() + 1, x.num_blocks());
            }
            for s in &merges {
                assert!(x.refines(s) && s.num_blocks() < x.num_blocks());
                // exactly one block of s is not a block of x
                let new = s.blocks().iter().filter(|b| !x.blocks().contains(b)).count();
                assert_eq!(new, 1);
            }
            let mut uniq = merges.clone();
            uniq.sort();
            uniq.dedup();
            assert_eq!(uniq.len(), merges.len());
        }
    }

    #[test]
    fn interval_examples() {
        let x = p("1,2|3");
        assert_eq!(x.interval(&x).unwrap(), vec![x.clone()]);
        let l3 = PartitionLattice::enumerate(3).unwrap();
        let full = SetPartition::singletons(3).interval(l3.top()).unwrap();
        assert_eq!(full, l3.elements());
        let four = SetPartition::singletons(4).interval(&p("1,2|3,4")).unwrap();
        assert_eq!(four.len(), 4);
        assert!(p("1,2|3").interval(&p("1,3|2")).is_err());
    }

    #[test]
    fn interval_matches_filtered_lattice() {
        for n in 1..=6 {
            let l = PartitionLattice::enumerate(n).unwrap();
            let els = l.elements();
            // every pair is too many at n = 6; stride through lower elements
            let step = if n == 6 { 7 } else { 1 };
            for a in els.iter().step_by(step) {
                for b in els.iter().filter(|b| a.refines(b)) {
                    let got = a.interval(b).unwrap();
                    let want: Vec<_> =
                        els.iter().filter(|s| a.refines(s) && s.refines(b)).cloned().collect();
                    assert_eq!(got, want, "[{a}, {b}]");
                    let product: usize = a
                        .restriction_sizes(b)
                        .into_iter()
                        .map(|m| bell(m).to_usize().unwrap())
                        .product();
                    assert_eq!(got.len(), product);
                }
            }
        }
    }

    #[test]
    fn maximal_chain_examples() {
        let x = p("1,2|3|4");
        assert_eq!(x.count_maximal_chains(&x).unwrap(), BigUint::from(1u32));
        let d3 = SetPartition::singletons(3);
        assert_eq!(d3.count_maximal_chains(&SetPartition::single_block(3)).unwrap(), 3u32.into());
        let d4 = SetPartition::singletons(4);
        assert_eq!(d4.count_maximal_chains(&SetPartition::single_block(4)).unwrap(), 18u32.into());
        assert!(p("1,2|3").count_maximal_chains(&p("1,3|2")).is_err());
    }

    #[test]
    fn chain_counts_satisfy_cover_recursion() {
        for n in 1..=5 {
            let l = PartitionLattice::enumerate(n).unwrap();
            for a in l.elements() {
                for b in l.elements().iter().filter(|b| a.refines(b) && *b != a) {
                    let m = a.count_maximal_chains(b).unwrap();
                    let up: BigUint = a
                        .pair_covers()
                        .iter()
                        .filter(|s| s.refines(b))
                        .map(|s| s.count_maximal_chains(b).unwrap())
                        .sum();
                    assert_eq!(up, m);
                    let down: BigUint = l
                        .elements()
                        .iter()
                        .filter(|s| a.refines(s) && s.pair_covers().contains(b))
                        .map(|s| a.count_maximal_chains(s).unwrap())
                        .sum();
                    assert_eq!(down, m);
                }
            }
        }
    }

    #[test]
    fn upper_set_and_levels() {
        let l = PartitionLattice::enumerate(4).unwrap();
        assert_eq!(l.upper_set(0).len(), 15);
        assert_eq!(l.upper_set(l.len() - 1), vec![l.len() - 1]);
        assert_eq!(l.with_blocks(2).count(), 7);
    }
}
