//! 2-factors of simple undirected graphs.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::FactorStats;
use crate::error::{Error, Result};
use crate::graph::{UGraph, MASK_LIMIT};

/// Which spanning structures count as factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeConvention {
    /// Spanning 2-regular subgraphs; every cycle has length at least 3.
    Strict,
    /// Partitions of the vertex set into cycles of length at least 3 and
    /// single edges, each single edge counting as one cycle.
    EdgesAsTwoCycles,
}

/// Exact statistics over the factors of `g` under `convention`.
///
/// The graph is split into connected components; the statistics of the whole
/// graph are the product (histogram convolution) of the per-component ones.
/// Each component must have at most 64 vertices.
pub fn two_factor_stats(g: &UGraph, convention: EdgeConvention) -> Result<FactorStats> {
    let mut total = unit();
    for comp in g.components() {
        if comp.len() > MASK_LIMIT {
            return Err(Error::TooLarge {
                n: comp.len(),
                limit: MASK_LIMIT,
            });
        }
        let part = component_stats(&g.induced(&comp), convention);
        total = total.product(&part);
        if total.is_empty() {
            break;
        }
    }
    total.n = g.n();
    Ok(total)
}

/// Statistics of the graph with no vertices: one empty factor.
fn unit() -> FactorStats {
    let mut s = FactorStats::empty(0, false);
    s.count = BigUint::from(1u32);
    s.histogram.insert(0, BigUint::from(1u32));
    s
}

fn component_stats(g: &UGraph, convention: EdgeConvention) -> FactorStats {
    let n = g.n();
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut walker = Cover {
        adj,
        full,
        permissive: convention == EdgeConvention::EdgesAsTwoCycles,
        histogram: vec![0; n + 1],
    };
    walker.cover(0, 0);
    let mut stats = FactorStats::empty(n, false);
    for (k, &c) in walker.histogram.iter().enumerate() {
        if c > 0 {
            stats.histogram.insert(k, BigUint::from(c));
            stats.count += c;
            stats.cycle_sum += BigUint::from(c) * BigUint::from(k);
        }
    }
    stats
}

struct Cover {
    adj: Vec<u64>,
    full: u64,
    permissive: bool,
    histogram: Vec<u64>,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

impl Cover {
    /// Covers the lowest uncovered vertex `v` by a new component: a single
    /// edge (permissive convention) or a cycle through `v`.
    fn cover(&mut self, covered: u64, cycles: usize) {
        if covered == self.full {
            self.histogram[cycles] += 1;
            return;
        }
        let v = (!covered & self.full).trailing_zeros() as usize;
        let free = self.adj[v] & !covered;
        if self.permissive {
            for w in bits(free) {
                self.cover(covered | 1 << v | 1 << w, cycles + 1);
            }
        }
        for a in bits(free) {
            self.extend(v, a, a, covered | 1 << v | 1 << a, 2, cycles);
        }
    }

    /// Grows the path `v, a, ..., x`. The cycle closes at `x` only when
    /// `x > a`, so each cycle is produced in exactly one orientation.
    fn extend(&mut self, v: usize, a: usize, x: usize, covered: u64, len: usize, cycles: usize) {
        if len >= 3 && x > a && self.adj[x] >> v & 1 == 1 {
            self.cover(covered, cycles + 1);
        }
        for y in bits(self.adj[x] & !covered) {
            self.extend(v, a, y, covered | 1 << y, len + 1, cycles);
        }
    }
}
