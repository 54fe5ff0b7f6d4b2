//! Adaptive KT frequency state shared by the censoring encoder and decoder.

use crate::arith::FrequencyView;

const NIL: u32 = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    children: [u32; 2],
    occurrences: u32,
}

/// Occurrence counts over `1..=capacity`, stored as a lazily grown binary
/// segment tree so that huge, sparsely used alphabets cost memory only for
/// the symbols that appear.
///
/// Every symbol carries an implicit doubled weight of `1 + 2·occurrences`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SparseCounts {
    nodes: Vec<Node>,
    depth: u32,
}

impl SparseCounts {
    pub(crate) fn new(capacity: u64) -> Self {
        let depth = 64 - capacity.max(1).saturating_sub(1).leading_zeros();
        Self {
            nodes: vec![Node {
                children: [NIL; 2],
                occurrences: 0,
            }],
            depth,
        }
    }

    fn span(&self) -> u64 {
        1 << self.depth
    }

    /// Adds one occurrence of `symbol` (1-based, within capacity).
    pub(crate) fn increment(&mut self, symbol: u64) {
        debug_assert!(symbol >= 1 && symbol <= self.span());
        let offset = symbol - 1;
        let mut node = 0usize;
        self.nodes[0].occurrences += 1;
        for level in (0..self.depth).rev() {
            let side = ((offset >> level) & 1) as usize;
            let mut child = self.nodes[node].children[side];
            if child == NIL {
                child = u32::try_from(self.nodes.len()).expect("tree fits in u32 indices");
                self.nodes.push(Node {
                    children: [NIL; 2],
                    occurrences: 0,
                });
                self.nodes[node].children[side] = child;
            }
            node = child as usize;
            self.nodes[node].occurrences += 1;
        }
    }

    /// Occurrences of symbols in `1..=upto`.
    pub(crate) fn prefix(&self, upto: u64) -> u64 {
        if upto == 0 {
            return 0;
        }
        if upto >= self.span() {
            return u64::from(self.nodes[0].occurrences);
        }
        // count symbols with offset < upto
        let mut acc = 0u64;
        let mut node = 0usize;
        for level in (0..self.depth).rev() {
            let side = (upto >> level) & 1;
            let children = self.nodes[node].children;
            if side == 1 && children[0] != NIL {
                acc += u64::from(self.nodes[children[0] as usize].occurrences);
            }
            let next = children[side as usize];
            if next == NIL {
                return acc;
            }
            node = next as usize;
        }
        acc
    }

    pub(crate) fn get(&self, symbol: u64) -> u64 {
        self.prefix(symbol) - self.prefix(symbol - 1)
    }

    /// The symbol whose doubled-weight interval contains `target`, with the
    /// weight below it and its own weight.
    pub(crate) fn locate(&self, mut target: u64) -> (u64, u64, u64) {
        let mut base = 0u64;
        let mut below = 0u64;
        let mut node = Some(0usize);
        for level in (0..self.depth).rev() {
            let half = 1u64 << level;
            let (left, right) = match node {
                Some(n) => {
                    let c = self.nodes[n].children;
                    (
                        (c[0] != NIL).then_some(c[0] as usize),
                        (c[1] != NIL).then_some(c[1] as usize),
                    )
                }
                None => (None, None),
            };
            let left_weight = half + 2 * left.map_or(0, |l| u64::from(self.nodes[l].occurrences));
            if target < left_weight {
                node = left;
            } else {
                target -= left_weight;
                below += left_weight;
                base += half;
                node = right;
            }
        }
        let occurrences = node.map_or(0, |n| u64::from(self.nodes[n].occurrences));
        (base + 1, below, 1 + 2 * occurrences)
    }
}

/// Censoring-coder model state after `position` symbols.
///
/// Weights are doubled KT counts: every active symbol `j ≤ cutoff` has weight
/// `2·n_j + 1` and the escape has `2·(processed symbols above cutoff) + 1`,
/// so the total is always `2·position + cutoff + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensorState {
    counts: SparseCounts,
    capacity: u64,
    cutoff: u64,
    escape: u64,
    position: u64,
}

impl CensorState {
    /// A fresh state able to activate symbols up to `capacity`.
    pub fn new(capacity: u64) -> Self {
        Self {
            counts: SparseCounts::new(capacity),
            capacity,
            cutoff: 0,
            escape: 1,
            position: 0,
        }
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    /// Doubled escape weight.
    pub fn escape_weight(&self) -> u64 {
        self.escape
    }

    /// Doubled weight of an active symbol.
    pub fn weight(&self, symbol: u64) -> u64 {
        debug_assert!(symbol >= 1 && symbol <= self.cutoff);
        1 + 2 * self.counts.get(symbol)
    }

    /// Sum of all doubled weights over `{0..cutoff}`.
    pub fn doubled_total(&self) -> u64 {
        self.escape + self.cutoff + 2 * self.counts.prefix(self.cutoff)
    }

    /// Raises the cutoff, moving the occurrences of the newly active symbols
    /// out of the escape weight.
    pub fn raise_cutoff(&mut self, cutoff: u64) {
        if cutoff <= self.cutoff {
            return;
        }
        let cutoff = cutoff.min(self.capacity);
        let moved = self.counts.prefix(cutoff) - self.counts.prefix(self.cutoff);
        self.escape -= 2 * moved;
        self.cutoff = cutoff;
    }

    /// Records one occurrence of `symbol` after it was coded.
    pub fn record(&mut self, symbol: u64) {
        if symbol > self.cutoff {
            self.escape += 2;
        }
        if symbol <= self.capacity {
            self.counts.increment(symbol);
        }
        self.position += 1;
    }
}

impl FrequencyView for CensorState {
    fn symbol_count(&self) -> usize {
        usize::try_from(self.cutoff).map_or(usize::MAX, |k| k.saturating_add(1))
    }

    fn total(&self) -> u64 {
        self.doubled_total()
    }

    fn interval(&self, s: usize) -> (u64, u64) {
        let s = s as u64;
        if s == 0 {
            return (0, self.escape);
        }
        let below = self.escape + (s - 1) + 2 * self.counts.prefix(s - 1);
        (below, self.weight(s))
    }

    fn locate(&self, target: u64) -> (usize, u64, u64) {
        if target < self.escape {
            return (0, 0, self.escape);
        }
        let (s, below, weight) = self.counts.locate(target - self.escape);
        (s as usize, self.escape + below, weight)
    }
}
