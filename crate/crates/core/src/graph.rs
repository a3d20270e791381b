//! Digraphs, undirected graphs and bipartite double covers.
//!
//! Vertices are dense indices `0..n`. A [`DiGraph`] may carry loops and
//! 2-cycles but never parallel arcs. Adjacency is kept as sorted lists and,
//! for `n <= 64`, additionally as per-vertex bitmasks for the enumerator's
//! membership tests.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Largest order for which bitmask adjacency is maintained.
pub const MASK_LIMIT: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiGraph {
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    out_mask: Option<Vec<u64>>,
}

impl DiGraph {
    /// Graph on `n` vertices with no arcs.
    pub fn empty(n: usize) -> Self {
        Self::from_sorted(vec![Vec::new(); n])
    }

    /// Builds a digraph from an arc list. Duplicate arcs and out-of-range
    /// endpoints are rejected.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out_adj = vec![Vec::new(); n];
        for (u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "arc {u}->{v} out of range for n={n}"
                )));
            }
            out_adj[u].push(v);
        }
        Self::from_out_adj(out_adj)
    }

    /// Builds a digraph from per-vertex out-neighbour lists in any order.
    pub fn from_out_adj(mut out_adj: Vec<Vec<usize>>) -> Result<Self> {
        let n = out_adj.len();
        for (u, list) in out_adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("parallel arc {u}->{}", w[0])));
            }
            if let Some(&v) = list.last() {
                if v >= n {
                    return Err(Error::InvalidGraph(format!(
                        "arc {u}->{v} out of range for n={n}"
                    )));
                }
            }
        }
        Ok(Self::from_sorted(out_adj))
    }

    fn from_sorted(out_adj: Vec<Vec<usize>>) -> Self {
        let n = out_adj.len();
        let mut in_adj = vec![Vec::new(); n];
        for (u, list) in out_adj.iter().enumerate() {
            for &v in list {
                in_adj[v].push(u);
            }
        }
        let out_mask = (n <= MASK_LIMIT).then(|| {
            out_adj
                .iter()
                .map(|list| list.iter().fold(0u64, |m, &v| m | (1u64 << v)))
                .collect()
        });
        Self {
            out_adj,
            in_adj,
            out_mask,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    #[inline]
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// Out-neighbourhood bitmask; `None` when `n > 64`.
    #[inline]
    pub fn out_mask(&self, v: usize) -> Option<u64> {
        self.out_mask.as_ref().map(|m| m[v])
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        match &self.out_mask {
            Some(m) => v < 64 && m[u] >> v & 1 == 1,
            None => self.out_adj[u].binary_search(&v).is_ok(),
        }
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn arc_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v)))
    }

    /// Number of loops, written λ(G) in the literature.
    pub fn loop_count(&self) -> usize {
        (0..self.n()).filter(|&v| self.has_arc(v, v)).count()
    }

    pub fn is_d_regular(&self, d: usize) -> bool {
        (0..self.n()).all(|v| self.out_degree(v) == d && self.in_degree(v) == d)
    }

    /// The common in/out degree if the graph is regular and non-empty.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.out_adj.first()?.len();
        self.is_d_regular(d).then_some(d)
    }

    /// Block-diagonal union; the vertices of `gs[i]` are shifted by the total
    /// order of `gs[..i]`.
    pub fn disjoint_union<'a>(gs: impl IntoIterator<Item = &'a DiGraph>) -> DiGraph {
        let mut out_adj = Vec::new();
        for g in gs {
            let offset = out_adj.len();
            out_adj.extend(
                g.out_adj
                    .iter()
                    .map(|list| list.iter().map(|&v| v + offset).collect::<Vec<_>>()),
            );
        }
        Self::from_sorted(out_adj)
    }

    /// Bipartite double cover: left copy `u`, right copy `v`, edge iff `u -> v`.
    pub fn double_cover(&self) -> BipartiteGraph {
        BipartiteGraph {
            n_left: self.n(),
            n_right: self.n(),
            edges: self.arcs().collect(),
        }
    }

    /// Image of the graph under `perm`, which maps old index to new index.
    pub fn relabel(&self, perm: &[usize]) -> Result<DiGraph> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::param(
                "relabeling is not a permutation of the vertex set",
            ));
        }
        DiGraph::from_arcs(n, self.arcs().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Weakly connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            comp[s] = id;
            while let Some(u) = stack.pop() {
                members.push(u);
                for &w in self.out_adj[u].iter().chain(&self.in_adj[u]) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Heuristic isomorphism-invariant hash. See [`Fingerprint`].
    pub fn fingerprint(&self) -> Fingerprint {
        fingerprint(self)
    }

    /// Serializes to the line-based text format:
    ///
    /// ```text
    /// n d_hint
    /// 0: w1 w2 ...
    /// ```
    ///
    /// `d_hint` is the regular degree, or `-1` when the graph is not regular.
    pub fn to_text(&self) -> String {
        let hint = self
            .regular_degree()
            .map_or_else(|| "-1".to_string(), |d| d.to_string());
        let mut s = format!("{} {}\n", self.n(), hint);
        for (v, list) in self.out_adj.iter().enumerate() {
            s.push_str(&v.to_string());
            s.push(':');
            for w in list {
                s.push(' ');
                s.push_str(&w.to_string());
            }
            s.push('\n');
        }
        s
    }

    /// Parses the text format written by [`DiGraph::to_text`]. Blank lines and
    /// lines starting with `#` are ignored. A non-negative `d_hint` must match
    /// the parsed graph.
    pub fn from_text(text: &str) -> Result<DiGraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let perr = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| perr(hl, "expected vertex count"))?;
        let hint: i64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| perr(hl, "expected degree hint"))?;
        if parts.next().is_some() || hint < -1 {
            return Err(perr(hl, "header must be `n d_hint` with d_hint >= -1"));
        }
        let mut out_adj = Vec::with_capacity(n);
        for v in 0..n {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| perr(hl, &format!("expected {n} adjacency lines, found {v}")))?;
            let (label, rest) = line
                .split_once(':')
                .ok_or_else(|| perr(ln, "expected `v: w1 w2 ...`"))?;
            if label.trim().parse::<usize>().ok() != Some(v) {
                return Err(perr(ln, &format!("expected adjacency line for vertex {v}")));
            }
            let list = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| perr(ln, "bad neighbour index"))
                })
                .collect::<Result<Vec<_>>>()?;
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(perr(ln, "out-neighbours must be strictly increasing"));
            }
            if list.last().is_some_and(|&w| w >= n) {
                return Err(perr(ln, "neighbour index out of range"));
            }
            out_adj.push(list);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "trailing content after adjacency lines"));
        }
        let g = Self::from_sorted(out_adj);
        if hint >= 0 && !g.is_d_regular(hint as usize) {
            return Err(perr(
                hl,
                &format!("degree hint {hint} does not match the graph"),
            ));
        }
        Ok(g)
    }
}

impl fmt::Debug for DiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DiGraph {{ n: {}, out_adj: {:?} }}",
            self.n(),
            self.out_adj
        )
    }
}

impl fmt::Display for DiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for DiGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DiGraph::from_text(s)
    }
}

/// Simple, loopless undirected graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UGraph {
    adj: Vec<Vec<usize>>,
}

impl UGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge {u}-{v} out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("parallel edge {u}-{}", w[0])));
            }
        }
        Ok(Self { adj })
    }

    /// Reads a symmetric, loopless digraph as an undirected graph.
    pub fn from_symmetric_digraph(g: &DiGraph) -> Result<Self> {
        for (u, v) in g.arcs() {
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at {u}")));
            }
            if !g.has_arc(v, u) {
                return Err(Error::InvalidGraph(format!("arc {u}->{v} has no reverse")));
            }
        }
        Self::from_edges(g.n(), g.arcs().filter(|&(u, v)| u < v))
    }

    /// Each edge as a pair of opposite arcs.
    pub fn to_symmetric_digraph(&self) -> DiGraph {
        DiGraph::from_sorted(self.adj.clone())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.adj.iter().all(|l| l.len() == d)
    }

    pub fn disjoint_union<'a>(gs: impl IntoIterator<Item = &'a UGraph>) -> UGraph {
        let mut adj = Vec::new();
        for g in gs {
            let offset = adj.len();
            adj.extend(
                g.adj
                    .iter()
                    .map(|l| l.iter().map(|&v| v + offset).collect::<Vec<_>>()),
            );
        }
        UGraph { adj }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.to_symmetric_digraph().components()
    }

    /// Subgraph induced by `vertices`, relabeled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> UGraph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut l: Vec<usize> = self.adj[v]
                    .iter()
                    .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        UGraph { adj }
    }
}

impl fmt::Debug for UGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UGraph {{ n: {}, adj: {:?} }}", self.n(), self.adj)
    }
}

/// Bipartite graph with left part `0..n_left` and right part `0..n_right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub n_left: usize,
    pub n_right: usize,
    /// Sorted, no duplicates.
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_left];
        for &(l, _) in &self.edges {
            deg[l] += 1;
        }
        deg
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_right];
        for &(_, r) in &self.edges {
            deg[r] += 1;
        }
        deg
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.left_degrees()
            .iter()
            .chain(&self.right_degrees())
            .all(|&x| x == d)
    }

    /// 0/1 biadjacency matrix, rows indexed by the left part.
    pub fn biadjacency(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n_right]; self.n_left];
        for &(l, r) in &self.edges {
            m[l][r] = true;
        }
        m
    }

    /// Connected components as `(left vertices, right vertices)`.
    pub fn components(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        // Left vertex i is node i, right vertex j is node n_left + j.
        let total = self.n_left + self.n_right;
        let mut adj = vec![Vec::new(); total];
        for &(l, r) in &self.edges {
            adj[l].push(self.n_left + r);
            adj[self.n_left + r].push(l);
        }
        let mut seen = vec![false; total];
        let mut out = Vec::new();
        for s in 0..total {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let (mut left, mut right) = (Vec::new(), Vec::new());
            while let Some(u) = stack.pop() {
                if u < self.n_left {
                    left.push(u);
                } else {
                    right.push(u - self.n_left);
                }
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            left.sort_unstable();
            right.sort_unstable();
            out.push((left, right));
        }
        out
    }
}

/// Relabeling-insensitive digest of a digraph.
///
/// Built from iterated colour refinement seeded with local signatures (loop,
/// degrees, mutual neighbours, arcs inside the out- and in-neighbourhoods).
/// Different fingerprints imply non-isomorphic graphs; equal fingerprints
/// imply nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint(pub u64);

impl Fingerprint {
    /// Value reported for the graph with no vertices.
    pub const EMPTY: Fingerprint = Fingerprint(0);
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Fingerprint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        u64::from_str_radix(s, 16)
            .map(Fingerprint)
            .map_err(|_| Error::param(format!("bad fingerprint `{s}`")))
    }
}

fn fingerprint(g: &DiGraph) -> Fingerprint {
    let n = g.n();
    if n == 0 {
        return Fingerprint::EMPTY;
    }
    let arcs_within = |set: &[usize]| -> u64 {
        let mut c = 0;
        for &a in set {
            for &b in set {
                if a != b && g.has_arc(a, b) {
                    c += 1;
                }
            }
        }
        c
    };
    let initial: Vec<Vec<u64>> = (0..n)
        .map(|v| {
            let outs: Vec<usize> = g
                .out_neighbors(v)
                .iter()
                .copied()
                .filter(|&w| w != v)
                .collect();
            let ins: Vec<usize> = g
                .in_neighbors(v)
                .iter()
                .copied()
                .filter(|&w| w != v)
                .collect();
            let mutual = outs.iter().filter(|&&w| g.has_arc(w, v)).count();
            vec![
                u64::from(g.has_arc(v, v)),
                g.out_degree(v) as u64,
                g.in_degree(v) as u64,
                mutual as u64,
                arcs_within(&outs),
                arcs_within(&ins),
            ]
        })
        .collect();

    let mut hasher = Sha256::new();
    hasher.update((n as u64).to_le_bytes());
    let mut colors = rank_signatures(&initial, &mut hasher);
    for _ in 0..n {
        let sigs: Vec<Vec<u64>> = (0..n)
            .map(|v| {
                let mut outs: Vec<u64> = g.out_neighbors(v).iter().map(|&w| colors[w]).collect();
                let mut ins: Vec<u64> = g.in_neighbors(v).iter().map(|&w| colors[w]).collect();
                outs.sort_unstable();
                ins.sort_unstable();
                let mut sig = Vec::with_capacity(2 + outs.len() + ins.len());
                sig.push(colors[v]);
                sig.extend(outs);
                sig.push(u64::MAX);
                sig.extend(ins);
                sig
            })
            .collect();
        colors = rank_signatures(&sigs, &mut hasher);
    }
    let digest = hasher.finalize();
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    match u64::from_le_bytes(word) {
        0 => Fingerprint(1),
        x => Fingerprint(x),
    }
}

/// Replaces each signature by its rank among the distinct signatures and
/// feeds the sorted (signature, multiplicity) table to the hasher.
fn rank_signatures(sigs: &[Vec<u64>], hasher: &mut Sha256) -> Vec<u64> {
    let mut table: BTreeMap<&[u64], u64> = BTreeMap::new();
    for s in sigs {
        *table.entry(s.as_slice()).or_default() += 1;
    }
    for (sig, mult) in &table {
        hasher.update((sig.len() as u64).to_le_bytes());
        for x in *sig {
            hasher.update(x.to_le_bytes());
        }
        hasher.update(mult.to_le_bytes());
    }
    let ranks: BTreeMap<&[u64], u64> = table
        .keys()
        .enumerate()
        .map(|(i, k)| (*k, i as u64))
        .collect();
    sigs.iter().map(|s| ranks[s.as_slice()]).collect()
}
