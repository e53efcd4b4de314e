//! Decorated graphs with ordered edges: canonical forms, enumeration, complete
//! subgraphs and quotients, admissibility, Koszul signs and automorphism counts.
//!
//! Vertices are labeled `1..=n`. The stored edge order carries the orientation; the
//! extra `parity` lets a graph stand for its opposite without reordering.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecoratedGraph {
    n: usize,
    edges: Vec<Edge>,
    directed: bool,
    parity: i8,
}

/// Parity of a permutation given as a sequence of distinct indices.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sort edges, returning the sorted list, the sign of the sorting permutation, and
/// whether two equal edges were found.
fn sort_edges(edges: &[Edge]) -> (Vec<Edge>, i8, bool) {
    let mut idx: Vec<usize> = (0..edges.len()).collect();
    idx.sort_by_key(|&i| (edges[i], i));
    let sorted: Vec<Edge> = idx.iter().map(|&i| edges[i]).collect();
    let dup = sorted.windows(2).any(|w| w[0] == w[1]);
    (sorted, permutation_sign(&idx), dup)
}

impl DecoratedGraph {
    pub fn new(n: usize, edges: Vec<Edge>, directed: bool) -> Result<Self> {
        for &(s, t) in &edges {
            if s == t {
                return Err(Error::InvalidGraph(format!("loop at vertex {}", s)));
            }
            if s == 0 || t == 0 || s > n || t > n {
                return Err(Error::InvalidGraph(format!("edge {}-{} outside 1..={}", s, t, n)));
            }
        }
        let edges = if directed {
            edges
        } else {
            edges.into_iter().map(|(s, t)| (s.min(t), s.max(t))).collect()
        };
        Ok(DecoratedGraph { n, edges, directed, parity: 1 })
    }

    pub fn directed(n: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::new(n, edges, true)
    }

    pub fn undirected(n: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::new(n, edges, false)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn with_parity(mut self, parity: i8) -> Self {
        self.parity = if parity < 0 { -1 } else { 1 };
        self
    }

    /// The same edges with the opposite orientation.
    pub fn opposite(&self) -> Self {
        self.clone().with_parity(-self.parity)
    }

    /// Reorder the edges by `perm` (new position i holds old edge `perm[i]`), keeping
    /// the oriented graph unchanged by adjusting the parity.
    pub fn reordered(&self, perm: &[usize]) -> Result<Self> {
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..self.edges.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidGraph("edge reordering is not a permutation".into()));
        }
        Ok(DecoratedGraph {
            n: self.n,
            edges: perm.iter().map(|&i| self.edges[i]).collect(),
            directed: self.directed,
            parity: self.parity * permutation_sign(perm),
        })
    }

    /// Relabel vertices: vertex `v` becomes `map[v - 1]`.
    pub fn relabeled(&self, map: &[usize]) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|&(s, t)| {
                let (a, b) = (map[s - 1], map[t - 1]);
                if self.directed {
                    (a, b)
                } else {
                    (a.min(b), a.max(b))
                }
            })
            .collect();
        DecoratedGraph { n: self.n, edges, directed: self.directed, parity: self.parity }
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    /// Two edges with the same ends in the same direction make the oriented graph
    /// equal to its own negative.
    pub fn has_parallel_edges(&self) -> bool {
        sort_edges(&self.edges).2
    }

    fn check_subset(&self, a: &[usize]) -> Result<Vec<usize>> {
        if a.is_empty() {
            return Err(Error::InvalidSubset("empty vertex subset".into()));
        }
        let mut s = a.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != a.len() {
            return Err(Error::InvalidSubset("repeated vertex".into()));
        }
        if s[0] == 0 || *s.last().unwrap() > self.n {
            return Err(Error::InvalidSubset(format!("vertex outside 1..={}", self.n)));
        }
        Ok(s)
    }

    /// Indices of edges with both ends in `a`.
    fn internal_edge_indices(&self, a: &[usize]) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| a.contains(&self.edges[i].0) && a.contains(&self.edges[i].1))
            .collect()
    }

    /// The complete subgraph on `a`, relabeled `1..=#a` in natural order.
    pub fn complete_subgraph(&self, a: &[usize]) -> Result<Self> {
        let a = self.check_subset(a)?;
        let rank = |v: usize| a.iter().position(|&u| u == v).unwrap() + 1;
        let edges = self
            .internal_edge_indices(&a)
            .into_iter()
            .map(|i| (rank(self.edges[i].0), rank(self.edges[i].1)))
            .collect();
        Ok(DecoratedGraph { n: a.len(), edges, directed: self.directed, parity: 1 })
    }

    /// Shrink `a` to a single vertex placed at position `inf a`.
    pub fn quotient(&self, a: &[usize]) -> Result<Self> {
        let blocks = self.blocks_with_singletons(a)?;
        self.quotient_by_partition(&blocks)
    }

    fn blocks_with_singletons(&self, a: &[usize]) -> Result<Vec<Vec<usize>>> {
        let a = self.check_subset(a)?;
        let mut blocks: Vec<Vec<usize>> =
            (1..=self.n).filter(|v| !a.contains(v)).map(|v| vec![v]).collect();
        blocks.push(a);
        blocks.sort_by_key(|b| b[0]);
        Ok(blocks)
    }

    fn check_partition(&self, blocks: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
        let mut bs: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for b in blocks {
            bs.push(self.check_subset(b)?);
        }
        bs.sort_by_key(|b| b[0]);
        let mut all: Vec<usize> = bs.iter().flatten().copied().collect();
        all.sort_unstable();
        if all != (1..=self.n).collect::<Vec<_>>() {
            return Err(Error::InvalidSubset("blocks do not partition the vertex set".into()));
        }
        Ok(bs)
    }

    /// Collapse every block of a partition; block `i` (ordered by least element)
    /// becomes vertex `i`. Edges inside blocks are deleted, the rest keep their order.
    pub fn quotient_by_partition(&self, blocks: &[Vec<usize>]) -> Result<Self> {
        let bs = self.check_partition(blocks)?;
        let block_of = |v: usize| bs.iter().position(|b| b.contains(&v)).unwrap() + 1;
        let edges = self
            .edges
            .iter()
            .filter_map(|&(s, t)| {
                let (bs_, bt) = (block_of(s), block_of(t));
                if bs_ == bt {
                    None
                } else if self.directed {
                    Some((bs_, bt))
                } else {
                    Some((bs_.min(bt), bs_.max(bt)))
                }
            })
            .collect();
        Ok(DecoratedGraph { n: bs.len(), edges, directed: self.directed, parity: 1 })
    }

    /// Sign of the reordering that puts quotient edges first, then the edges of `a`.
    pub fn koszul_sign(&self, a: &[usize]) -> Result<i8> {
        let blocks = self.blocks_with_singletons(a)?;
        self.koszul_sign_partition(&blocks)
    }

    /// Sign of the reordering (quotient edges, then block edges in block order),
    /// times the stored parity.
    pub fn koszul_sign_partition(&self, blocks: &[Vec<usize>]) -> Result<i8> {
        let bs = self.check_partition(blocks)?;
        let inner: Vec<Vec<usize>> = bs.iter().map(|b| self.internal_edge_indices(b)).collect();
        let mut perm: Vec<usize> = (0..self.edges.len())
            .filter(|i| !inner.iter().any(|b| b.contains(i)))
            .collect();
        for b in &inner {
            perm.extend(b);
        }
        Ok(self.parity * permutation_sign(&perm))
    }

    /// Relabelings that give smaller labels to vertices of larger out-degree (then smaller
    /// in-degree). Isomorphisms respect degrees, so the canonical form only needs these.
    fn degree_respecting_relabelings(&self) -> Vec<Vec<usize>> {
        let key = |v: usize| {
            if self.directed {
                (std::cmp::Reverse(self.out_degree(v)), self.in_degree(v))
            } else {
                (std::cmp::Reverse(self.out_degree(v) + self.in_degree(v)), 0)
            }
        };
        let mut order: Vec<usize> = (1..=self.n).collect();
        order.sort_by_key(|&v| key(v));
        let groups: Vec<Vec<usize>> =
            order.chunk_by(|&a, &b| key(a) == key(b)).map(|c| c.to_vec()).collect();
        let mut out = vec![vec![0; self.n]];
        let mut next = 1;
        for grp in groups {
            let labels: Vec<usize> = (next..next + grp.len()).collect();
            next += grp.len();
            let mut expanded = Vec::new();
            for base in &out {
                for p in labels.iter().copied().permutations(labels.len()) {
                    let mut m = base.clone();
                    for (v, l) in grp.iter().zip(p) {
                        m[v - 1] = l;
                    }
                    expanded.push(m);
                }
            }
            out = expanded;
        }
        out
    }

    /// Canonical representative under vertex relabeling and edge reordering.
    pub fn canonical(&self) -> Canonical {
        let mut best: Option<(Vec<Edge>, i8, Vec<usize>)> = None;
        let mut odd = false;
        for perm in self.degree_respecting_relabelings() {
            let g = self.relabeled(&perm);
            let (sorted, sign, dup) = sort_edges(&g.edges);
            if dup {
                odd = true;
            }
            match &best {
                Some((b, s, _)) if *b == sorted => {
                    if *s != sign {
                        odd = true;
                    }
                }
                Some((b, _, _)) if *b < sorted => {}
                _ => best = Some((sorted, sign, perm)),
            }
        }
        let (edges, sign, relabel) = best.expect("at least one permutation");
        Canonical {
            graph: DecoratedGraph { n: self.n, edges, directed: self.directed, parity: 1 },
            sign: if odd { 0 } else { sign * self.parity },
            relabeling: relabel,
        }
    }

    /// Canonical representative when vertex labels are kept: only edges are sorted.
    pub fn canonical_labeled(&self) -> Canonical {
        let (edges, sign, dup) = sort_edges(&self.edges);
        Canonical {
            graph: DecoratedGraph { n: self.n, edges, directed: self.directed, parity: 1 },
            sign: if dup { 0 } else { sign * self.parity },
            relabeling: (1..=self.n).collect(),
        }
    }

    /// Order of the group of vertex permutations preserving the edge multiset.
    /// With `labels_forgotten = false` labeled graphs have only the identity.
    pub fn automorphism_count(&self, labels_forgotten: bool) -> usize {
        if !labels_forgotten {
            return 1;
        }
        let base = sort_edges(&self.edges).0;
        (1..=self.n)
            .permutations(self.n)
            .filter(|p| sort_edges(&self.relabeled(p).edges).0 == base)
            .count()
    }

    /// Admissibility of a vertex subset for one of the collapse contexts.
    pub fn is_admissible(&self, a: &[usize], context: Admissibility) -> Result<bool> {
        let n = self.n as i64;
        let l = self.edges.len() as i64;
        let a = self.check_subset(a)?;
        let k = a.len() as i64;
        let inner = self.internal_edge_indices(&a).len() as i64;
        match context {
            Admissibility::Collapse2n4 => {
                if l != 2 * n - 4 {
                    return Err(Error::Precondition(format!(
                        "context (i) needs 2n-4 = {} edges, graph has {}",
                        2 * n - 4,
                        l
                    )));
                }
                Ok(k >= 2 && k <= n - 1 && inner == 2 * k - 3)
            }
            Admissibility::Collapse2n3 => {
                if l != 2 * n - 3 {
                    return Err(Error::Precondition(format!(
                        "context (ii) needs 2n-3 = {} edges, graph has {}",
                        2 * n - 3,
                        l
                    )));
                }
                Ok(inner == 2 * k - 3)
            }
            Admissibility::Partition => Err(Error::Precondition(
                "partition context takes a partition; use is_admissible_partition".into(),
            )),
        }
    }

    /// Context (iii): every block `B` spans exactly `2#B - 2` edges.
    pub fn is_admissible_partition(&self, blocks: &[Vec<usize>]) -> Result<bool> {
        let n = self.n as i64;
        if self.edges.len() as i64 != 2 * n - 3 && self.edges.len() as i64 != 2 * n - 2 {
            return Err(Error::Precondition(format!(
                "context (iii) needs 2n-3 = {} edges, graph has {}",
                2 * n - 3,
                self.edges.len()
            )));
        }
        let bs = self.check_partition(blocks)?;
        Ok(bs
            .iter()
            .all(|b| self.internal_edge_indices(b).len() as i64 == 2 * b.len() as i64 - 2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Admissibility {
    /// Collapse of `2 <= #A <= n-1` vertices in a graph with `2n-4` edges.
    Collapse2n4,
    /// Collapse of any subset in a graph with `2n-3` edges.
    Collapse2n3,
    /// Partition of a graph with `2n-3` edges into blocks.
    Partition,
}

/// Canonical form of a graph: `original = sign * graph` after relabeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub graph: DecoratedGraph,
    /// +1 or -1, or 0 when the oriented class equals its own negative.
    pub sign: i8,
    /// Vertex map used: vertex `v` of the original becomes `relabeling[v - 1]`.
    pub relabeling: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Directed,
    Undirected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Directed graphs with labeled vertices.
    Labeled,
    /// Orientation classes modulo vertex relabeling.
    Classes,
    /// Undirected graphs modulo relabeling.
    Undirected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphClass {
    pub representative: DecoratedGraph,
    pub family: Family,
}

impl GraphClass {
    /// True when the class is its own negative (so every weight on it vanishes).
    pub fn is_odd(&self) -> bool {
        match self.family {
            Family::Labeled => self.representative.canonical_labeled().sign == 0,
            _ => self.representative.canonical().sign == 0,
        }
    }
}

fn possible_edges(n: usize, directed: bool) -> Vec<Edge> {
    let mut out = Vec::new();
    for s in 1..=n {
        for t in 1..=n {
            if s != t && (directed || s < t) {
                out.push((s, t));
            }
        }
    }
    out
}

/// Every multiset of `l` edges on labeled vertices `1..=n`, as sorted edge lists in
/// lexicographic order.
pub fn enumerate_graphs(n: usize, l: usize, mode: Direction) -> Vec<GraphClass> {
    let directed = mode == Direction::Directed;
    let family = if directed { Family::Labeled } else { Family::Undirected };
    let pool = possible_edges(n, directed);
    if pool.is_empty() && l > 0 {
        return Vec::new();
    }
    pool.iter()
        .copied()
        .combinations_with_replacement(l)
        .map(|edges| GraphClass {
            representative: DecoratedGraph { n, edges, directed, parity: 1 },
            family,
        })
        .collect()
}

/// One representative per isomorphism class (vertex relabeling plus edge reordering),
/// in lexicographic order of canonical forms.
pub fn enumerate_classes(n: usize, l: usize, mode: Direction) -> Vec<GraphClass> {
    let directed = mode == Direction::Directed;
    let pool = possible_edges(n, directed);
    if pool.is_empty() && l > 0 {
        return Vec::new();
    }
    let family = if directed { Family::Classes } else { Family::Undirected };
    pool.iter()
        .copied()
        .combinations_with_replacement(l)
        .filter_map(|edges| {
            let g = DecoratedGraph { n, edges, directed, parity: 1 };
            let c = g.canonical();
            (c.graph.edges == g.edges).then_some(GraphClass { representative: g, family })
        })
        .collect()
}

/// The wheel with rim `1..=n` and center `n + 1`.
///
/// Rim edges run `m -> m-1` together with the closing edge `1 -> n`; spokes run from each
/// rim vertex into the center. Edge order: `2 -> 1, ..., n -> n-1`, the spokes
/// `1 -> n+1, ..., n -> n+1`, and last the closing edge. With this order `Phi` of the
/// wheel agrees with [`crate::theory::wheel_contraction`].
pub fn wheel(n: usize) -> Result<DecoratedGraph> {
    if n < 2 {
        return Err(Error::Precondition(format!("wheel needs rim size >= 2, got {}", n)));
    }
    let mut edges: Vec<Edge> = (2..=n).map(|m| (m, m - 1)).collect();
    edges.extend((1..=n).map(|m| (m, n + 1)));
    edges.push((1, n));
    DecoratedGraph::directed(n + 1, edges)
}

/// Disjoint rims sharing one center: the union of wheels of the given rim sizes.
pub fn wheel_union(rims: &[usize]) -> Result<DecoratedGraph> {
    let total: usize = rims.iter().sum();
    let center = total + 1;
    let mut edges = Vec::new();
    let mut offset = 0;
    for &r in rims {
        let w = wheel(r)?;
        for &(s, t) in w.edges() {
            let map = |v: usize| if v == r + 1 { center } else { v + offset };
            edges.push((map(s), map(t)));
        }
        offset += r;
    }
    DecoratedGraph::directed(center, edges)
}

impl fmt::Display for DecoratedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parity < 0 {
            write!(f, "-")?;
        }
        let sep = if self.directed { '>' } else { '-' };
        let es = self.edges.iter().map(|(s, t)| format!("{}{}{}", s, sep, t)).join(",");
        write!(f, "{};{};{}", self.n, self.edges.len(), es)
    }
}

impl FromStr for DecoratedGraph {
    type Err = Error;

    /// `n;l;s1>t1,...` (directed) or `n;l;s1-t1,...` (undirected); a leading `-` marks
    /// the opposite orientation.
    fn from_str(s: &str) -> Result<Self> {
        let perr = |d: String| Error::Parse { what: "graph", detail: d };
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let parts: Vec<&str> = body.split(';').collect();
        if parts.len() != 3 {
            return Err(perr(format!("expected `n;l;edges`, got `{}`", s)));
        }
        let n: usize = parts[0].trim().parse().map_err(|_| perr(format!("bad vertex count `{}`", parts[0])))?;
        let l: usize = parts[1].trim().parse().map_err(|_| perr(format!("bad edge count `{}`", parts[1])))?;
        let mut edges = Vec::new();
        let mut directed: Option<bool> = None;
        for tok in parts[2].split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (sep, dir) = if tok.contains('>') { ('>', true) } else { ('-', false) };
            if let Some(d) = directed {
                if d != dir {
                    return Err(perr("mixed directed and undirected edges".into()));
                }
            }
            directed = Some(dir);
            let (a, b) = tok.split_once(sep).ok_or_else(|| perr(format!("bad edge `{}`", tok)))?;
            let a: usize = a.trim().parse().map_err(|_| perr(format!("bad edge `{}`", tok)))?;
            let b: usize = b.trim().parse().map_err(|_| perr(format!("bad edge `{}`", tok)))?;
            edges.push((a, b));
        }
        if edges.len() != l {
            return Err(perr(format!("edge count {} does not match {} listed edges", l, edges.len())));
        }
        let g = DecoratedGraph::new(n, edges, directed.unwrap_or(true))?;
        Ok(if neg { g.with_parity(-1) } else { g })
    }
}

/// Set partitions of `1..=n` into exactly `k` blocks, blocks ordered by least element.
pub fn set_partitions(n: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(v: usize, n: usize, k: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if v > n {
            if cur.len() == k {
                out.push(cur.clone());
            }
            return;
        }
        // remaining vertices must be able to open the missing blocks
        if k.saturating_sub(cur.len()) > n - v + 1 {
            return;
        }
        for i in 0..cur.len() {
            cur[i].push(v);
            go(v + 1, n, k, cur, out);
            cur[i].pop();
        }
        if cur.len() < k {
            cur.push(vec![v]);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Subsets of `1..=n` of size at least `min`, each sorted, in lexicographic order per size.
pub fn subsets(n: usize, min: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in min..=n {
        out.extend((1..=n).combinations(size));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> DecoratedGraph {
        s.parse().unwrap()
    }

    #[test]
    fn parse_roundtrip() {
        let s = "4;5;3>1,3>2,4>1,4>2,2>1";
        assert_eq!(g(s).to_string(), s);
        assert_eq!(g("2;1;1-2").to_string(), "2;1;1-2");
        assert!("2;2;1>2".parse::<DecoratedGraph>().is_err());
        assert!("2;1;1>1".parse::<DecoratedGraph>().is_err());
    }

    #[test]
    fn enumeration_examples() {
        let two_one = enumerate_graphs(2, 1, Direction::Directed);
        assert_eq!(two_one.len(), 2);
        let two_two: Vec<String> = enumerate_graphs(2, 2, Direction::Directed)
            .iter()
            .map(|c| c.representative.to_string())
            .collect();
        assert_eq!(two_two, vec!["2;2;1>2,1>2", "2;2;1>2,2>1", "2;2;2>1,2>1"]);
        assert!(enumerate_graphs(1, 1, Direction::Directed).is_empty());
        assert_eq!(enumerate_graphs(1, 0, Direction::Directed).len(), 1);
        // classes: {1>2,1>2} and {1>2,2>1}
        assert_eq!(enumerate_classes(2, 2, Direction::Directed).len(), 2);
    }

    #[test]
    fn wheel_shapes() {
        assert_eq!(wheel(2).unwrap().n(), 3);
        assert_eq!(wheel(2).unwrap().edge_count(), 4);
        assert_eq!(wheel(3).unwrap().n(), 4);
        assert_eq!(wheel(3).unwrap().edge_count(), 6);
        assert!(wheel(1).is_err());
        for n in 2..=6 {
            assert_eq!(wheel(n).unwrap().automorphism_count(true), n);
        }
    }

    #[test]
    fn subgraph_and_quotient_examples() {
        let g1 = g("4;5;3>1,3>2,4>1,4>2,2>1");
        assert_eq!(g1.complete_subgraph(&[1, 2]).unwrap().to_string(), "2;1;2>1");
        assert_eq!(g1.complete_subgraph(&[1, 2, 3, 4]).unwrap(), g1);
        assert_eq!(g1.complete_subgraph(&[3, 4]).unwrap().edge_count(), 0);
        assert_eq!(g1.quotient(&[1, 2]).unwrap().to_string(), "3;4;2>1,2>1,3>1,3>1");
        assert_eq!(g1.quotient(&[3]).unwrap(), g1);
        let w3 = wheel(3).unwrap();
        assert_eq!(w3.quotient(&[1, 2, 3]).unwrap().to_string(), "2;3;1>2,1>2,1>2");
        assert!(g1.quotient(&[]).is_err());
        assert!(g1.quotient(&[5]).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let g1 = g("4;5;3>1,3>2,4>1,4>2,2>1");
        assert!(g1.is_admissible(&[1, 2], Admissibility::Collapse2n3).unwrap());
        assert!(!g1.is_admissible(&[3, 4], Admissibility::Collapse2n3).unwrap());
        assert!(g1.is_admissible(&[1, 2], Admissibility::Collapse2n4).is_err());
        let dbl = g("2;2;1>2,1>2");
        // two singleton blocks need no internal edges
        assert!(dbl.is_admissible_partition(&[vec![1], vec![2]]).unwrap());
    }

    #[test]
    fn koszul_examples() {
        let g1 = g("4;5;3>1,3>2,4>1,4>2,2>1");
        assert_eq!(g1.koszul_sign(&[1, 2]).unwrap(), 1);
        let ordered = g("3;2;3>1,1>2");
        assert_eq!(ordered.koszul_sign(&[1, 2]).unwrap(), 1);
        let swapped = g("3;2;1>2,3>1");
        assert_eq!(swapped.koszul_sign(&[1, 2]).unwrap(), -1);
        assert_eq!(ordered.opposite().koszul_sign(&[1, 2]).unwrap(), -1);
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(g("2;1;1>2").automorphism_count(true), 1);
        assert_eq!(g("2;1;1-2").automorphism_count(true), 2);
        assert_eq!(g("2;1;1-2").automorphism_count(false), 1);
    }

    #[test]
    fn canonical_detects_odd_classes() {
        assert_eq!(g("2;2;1>2,1>2").canonical().sign, 0);
        // a 2-cycle is odd: swapping the vertices swaps the two edges
        assert_eq!(g("2;2;1>2,2>1").canonical().sign, 0);
        let c = g("2;1;2>1").canonical();
        assert_eq!(c.graph.to_string(), "2;1;1>2");
        assert_eq!(c.sign, 1);
    }

    #[test]
    fn partitions_counted_by_stirling_numbers() {
        assert_eq!(set_partitions(4, 2).len(), 7);
        assert_eq!(set_partitions(5, 3).len(), 25);
        assert_eq!(set_partitions(3, 3).len(), 1);
        for p in set_partitions(5, 2) {
            assert!(p[0][0] < p[1][0]);
        }
    }
}
