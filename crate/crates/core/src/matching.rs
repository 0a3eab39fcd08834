//! Maximum bipartite matching with optional removal of one right vertex,
//! plus Hall-condition enumeration for small graphs.
//!
//! Matchings are found with Kuhn's augmenting-path search, scanning left
//! vertices and adjacency lists in ascending order so results are
//! deterministic for a fixed graph.

use thiserror::Error;

pub const DEFAULT_HALL_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("edge ({left}, {right}) out of range for a {left_size}x{right_size} graph")]
    EdgeOutOfRange {
        left: usize,
        right: usize,
        left_size: usize,
        right_size: usize,
    },
    #[error("excluded right vertex {0} out of range")]
    ExclusionOutOfRange(usize),
    #[error("subset enumeration over {left_size} left vertices exceeds the cap of {cap}")]
    CapExceeded { left_size: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BipartiteGraph {
    left_size: usize,
    right_size: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left_size: usize, right_size: usize) -> Self {
        Self {
            left_size,
            right_size,
            adj: vec![Vec::new(); left_size],
        }
    }

    /// Complete bipartite graph `K_{left,right}`.
    pub fn complete(left_size: usize, right_size: usize) -> Self {
        Self {
            left_size,
            right_size,
            adj: vec![(0..right_size).collect(); left_size],
        }
    }

    /// Builds a graph from per-left adjacency lists. Duplicates are dropped
    /// and each list is sorted.
    pub fn from_adjacency(right_size: usize, adj: Vec<Vec<usize>>) -> Result<Self, MatchingError> {
        let mut g = Self::new(adj.len(), right_size);
        for (l, rs) in adj.into_iter().enumerate() {
            for r in rs {
                g.add_edge(l, r)?;
            }
        }
        Ok(g)
    }

    /// Adds an edge; returns `false` if it was already present.
    pub fn add_edge(&mut self, left: usize, right: usize) -> Result<bool, MatchingError> {
        if left >= self.left_size || right >= self.right_size {
            return Err(MatchingError::EdgeOutOfRange {
                left,
                right,
                left_size: self.left_size,
                right_size: self.right_size,
            });
        }
        let list = &mut self.adj[left];
        match list.binary_search(&right) {
            Ok(_) => Ok(false),
            Err(pos) => {
                list.insert(pos, right);
                Ok(true)
            }
        }
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adj[left]
    }

    pub fn has_edge(&self, left: usize, right: usize) -> bool {
        self.adj
            .get(left)
            .is_some_and(|l| l.binary_search(&right).is_ok())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, rs)| rs.iter().map(move |&r| (l, r)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    fn check_exclusion(&self, excluded_right: Option<usize>) -> Result<(), MatchingError> {
        match excluded_right {
            Some(r) if r >= self.right_size => Err(MatchingError::ExclusionOutOfRange(r)),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    left_to_right: Vec<Option<usize>>,
    right_to_left: Vec<Option<usize>>,
    size: usize,
}

impl Matching {
    pub fn empty(left_size: usize, right_size: usize) -> Self {
        Self {
            left_to_right: vec![None; left_size],
            right_to_left: vec![None; right_size],
            size: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn partner_of_left(&self, left: usize) -> Option<usize> {
        self.left_to_right.get(left).copied().flatten()
    }

    pub fn partner_of_right(&self, right: usize) -> Option<usize> {
        self.right_to_left.get(right).copied().flatten()
    }

    /// `(left, right)` pairs in ascending left order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left_to_right
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
    }

    pub fn covers_left(&self) -> bool {
        self.size == self.left_to_right.len()
    }

    fn unlink_left(&mut self, left: usize) {
        if let Some(r) = self.left_to_right[left].take() {
            self.right_to_left[r] = None;
            self.size -= 1;
        }
    }

    /// Checks that the pairs are disjoint edges of `g` avoiding the excluded
    /// right vertex.
    pub fn is_valid_for(&self, g: &BipartiteGraph, excluded_right: Option<usize>) -> bool {
        if self.left_to_right.len() != g.left_size || self.right_to_left.len() != g.right_size {
            return false;
        }
        let mut count = 0;
        for (l, r) in self.pairs() {
            if Some(r) == excluded_right || !g.has_edge(l, r) || self.right_to_left[r] != Some(l) {
                return false;
            }
            count += 1;
        }
        count == self.size && self.right_to_left.iter().flatten().count() == self.size
    }
}

struct Augmenter<'a> {
    g: &'a BipartiteGraph,
    excluded: Option<usize>,
    visited: Vec<u32>,
    stamp: u32,
}

impl<'a> Augmenter<'a> {
    fn new(g: &'a BipartiteGraph, excluded: Option<usize>) -> Self {
        Self {
            g,
            excluded,
            visited: vec![0; g.right_size],
            stamp: 0,
        }
    }

    fn try_augment(&mut self, m: &mut Matching, root: usize) -> bool {
        self.stamp += 1;
        self.search(m, root)
    }

    fn search(&mut self, m: &mut Matching, left: usize) -> bool {
        for &r in &self.g.adj[left] {
            if Some(r) == self.excluded || self.visited[r] == self.stamp {
                continue;
            }
            self.visited[r] = self.stamp;
            let free = match m.right_to_left[r] {
                None => true,
                Some(other) => self.search(m, other),
            };
            if free {
                if m.left_to_right[left].is_none() {
                    m.size += 1;
                }
                m.left_to_right[left] = Some(r);
                m.right_to_left[r] = Some(left);
                return true;
            }
        }
        false
    }
}

/// Maximum-cardinality matching of `g` with `excluded_right` (if any) and
/// its edges removed.
///
/// Panics if `excluded_right` is out of range; use [`try_max_matching`] for
/// a checked variant.
pub fn max_matching(g: &BipartiteGraph, excluded_right: Option<usize>) -> Matching {
    max_matching_from(
        g,
        excluded_right,
        Matching::empty(g.left_size, g.right_size),
    )
}

pub fn try_max_matching(
    g: &BipartiteGraph,
    excluded_right: Option<usize>,
) -> Result<Matching, MatchingError> {
    g.check_exclusion(excluded_right)?;
    Ok(max_matching(g, excluded_right))
}

/// Grows `seed` into a maximum matching. Pairs of `seed` that are not edges
/// of `g`, or that use the excluded vertex, are discarded first.
pub fn max_matching_from(
    g: &BipartiteGraph,
    excluded_right: Option<usize>,
    mut seed: Matching,
) -> Matching {
    assert!(excluded_right.is_none_or(|r| r < g.right_size));
    if seed.left_to_right.len() != g.left_size || seed.right_to_left.len() != g.right_size {
        seed = Matching::empty(g.left_size, g.right_size);
    }
    for l in 0..g.left_size {
        if let Some(r) = seed.left_to_right[l] {
            if Some(r) == excluded_right || !g.has_edge(l, r) {
                seed.unlink_left(l);
            }
        }
    }
    let mut aug = Augmenter::new(g, excluded_right);
    for l in 0..g.left_size {
        if seed.left_to_right[l].is_none() {
            aug.try_augment(&mut seed, l);
        }
    }
    seed
}

/// Whether `g` minus `excluded_right` has a matching covering every left
/// vertex.
pub fn has_perfect_matching(g: &BipartiteGraph, excluded_right: Option<usize>) -> bool {
    perfect_matching(g, excluded_right).is_some()
}

/// A left-covering matching, if one exists.
pub fn perfect_matching(g: &BipartiteGraph, excluded_right: Option<usize>) -> Option<Matching> {
    perfect_matching_from(
        g,
        excluded_right,
        Matching::empty(g.left_size, g.right_size),
    )
}

pub(crate) fn perfect_matching_from(
    g: &BipartiteGraph,
    excluded_right: Option<usize>,
    seed: Matching,
) -> Option<Matching> {
    let available = g.right_size - usize::from(excluded_right.is_some());
    if g.left_size > available {
        return None;
    }
    let m = max_matching_from(g, excluded_right, seed);
    m.covers_left().then_some(m)
}

/// Searches left subsets for a Hall violation.
///
/// Non-strict mode returns some `S` with `|S| > |Γ(S)|`; strict mode returns
/// some non-empty `S` with `|S| + 1 > |Γ(S)|`. Subsets are scanned in
/// increasing bitmask order, so the result is the first violator in that
/// order.
pub fn hall_deficient_set(
    g: &BipartiteGraph,
    excluded_right: Option<usize>,
    strict: bool,
    cap: usize,
) -> Result<Option<Vec<usize>>, MatchingError> {
    g.check_exclusion(excluded_right)?;
    let n = g.left_size;
    if n > cap || n >= usize::BITS as usize {
        return Err(MatchingError::CapExceeded { left_size: n, cap });
    }
    let words = g.right_size.div_ceil(64).max(1);
    let mut masks = vec![vec![0u64; words]; n];
    for (l, rs) in g.adj.iter().enumerate() {
        for &r in rs {
            if Some(r) != excluded_right {
                masks[l][r / 64] |= 1 << (r % 64);
            }
        }
    }
    // neighborhood[s] = Γ(S) for the subset encoded by bitmask s, built from
    // s with its lowest bit cleared.
    let mut neighborhood = vec![vec![0u64; words]; 1usize << n];
    for s in 1usize..(1 << n) {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let (done, todo) = neighborhood.split_at_mut(s);
        for (w, out) in todo[0].iter_mut().enumerate() {
            *out = done[rest][w] | masks[low][w];
        }
        let size = s.count_ones() as usize;
        let gamma: usize = todo[0].iter().map(|w| w.count_ones() as usize).sum();
        let needed = if strict { size + 1 } else { size };
        if gamma < needed {
            return Ok(Some((0..n).filter(|&l| s & (1 << l) != 0).collect()));
        }
    }
    Ok(None)
}
