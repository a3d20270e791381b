//! Generators for the graph families studied here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DiGraph, UGraph};

/// Complete looped digraph `K_m°`: every ordered pair, loops included.
pub fn complete_looped(m: usize) -> Result<DiGraph> {
    if m == 0 {
        return Err(Error::param("complete looped digraph needs m >= 1"));
    }
    DiGraph::from_arcs(m, (0..m).flat_map(|u| (0..m).map(move |v| (u, v))))
}

/// Looped bidirected cycle `G_n°` on `Z_n`: arcs `i -> i`, `i -> i+1`, `i -> i-1`.
pub fn looped_bidirected_cycle(n: usize) -> Result<DiGraph> {
    if n < 4 {
        return Err(Error::param(format!(
            "looped bidirected cycle needs n >= 4 (got {n}); smaller n collapses arcs"
        )));
    }
    DiGraph::from_arcs(
        n,
        (0..n).flat_map(|i| [(i, i), (i, (i + 1) % n), (i, (i + n - 1) % n)]),
    )
}

/// The six vertex classes of the gadget, in cyclic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum XdClass {
    A1,
    B1,
    C1,
    A2,
    B2,
    C2,
}

impl XdClass {
    pub const CYCLIC_ORDER: [XdClass; 6] = [
        XdClass::A1,
        XdClass::B1,
        XdClass::C1,
        XdClass::A2,
        XdClass::B2,
        XdClass::C2,
    ];

    fn position(self) -> usize {
        self as usize
    }
}

/// One of the four arcs joining the two halves `D1 = B1 ∪ C1 ∪ A2` and
/// `D2 = B2 ∪ C2 ∪ A1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CrossingArc {
    /// `B1 -> A1`
    U1,
    /// `A2 -> B2`
    V1,
    /// `B2 -> A2`
    U2,
    /// `A1 -> B1`
    V2,
}

impl CrossingArc {
    pub const ALL: [CrossingArc; 4] = [
        CrossingArc::U1,
        CrossingArc::V1,
        CrossingArc::U2,
        CrossingArc::V2,
    ];

    /// Bit used for this arc in a crossing-pattern mask.
    pub fn bit(self) -> u8 {
        1 << (self as u8)
    }

    pub fn name(self) -> &'static str {
        match self {
            CrossingArc::U1 => "u1",
            CrossingArc::V1 => "v1",
            CrossingArc::U2 => "u2",
            CrossingArc::V2 => "v2",
        }
    }
}

/// Class assignment and crossing arcs of a [`build_xd`] graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XdLabeling {
    pub d: usize,
    pub class_of: Vec<XdClass>,
    /// Arcs indexed by `CrossingArc as usize`.
    pub crossing_arcs: [(usize, usize); 4],
}

impl XdLabeling {
    pub fn arc(&self, which: CrossingArc) -> (usize, usize) {
        self.crossing_arcs[which as usize]
    }

    /// The unique vertex of a singleton class (`A1`, `B1`, `A2`, `B2`).
    pub fn singleton(&self, class: XdClass) -> Option<usize> {
        let mut it = self.vertices_of(class);
        match (it.next(), it.next()) {
            (Some(v), None) => Some(v),
            _ => None,
        }
    }

    pub fn vertices_of(&self, class: XdClass) -> impl Iterator<Item = usize> + '_ {
        self.class_of
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == class)
            .map(|(v, _)| v)
    }

    /// Half `D1 = B1 ∪ C1 ∪ A2` (`true`) or `D2 = B2 ∪ C2 ∪ A1` (`false`).
    pub fn in_first_half(&self, v: usize) -> bool {
        matches!(self.class_of[v], XdClass::B1 | XdClass::C1 | XdClass::A2)
    }
}

/// The six-class gadget `X_d` with class sizes `1, 1, d-2, 1, 1, d-2`.
///
/// Vertices are laid out as `A1, B1, C1.., A2, B2, C2..`, so `X_3` coincides
/// with `looped_bidirected_cycle(6)` position by position.
pub fn build_xd(d: usize) -> Result<(DiGraph, XdLabeling)> {
    if d < 3 {
        return Err(Error::param(format!("X_d needs d >= 3 (got {d})")));
    }
    let sizes = [1, 1, d - 2, 1, 1, d - 2];
    let mut class_of = Vec::with_capacity(2 * d);
    for (class, &size) in XdClass::CYCLIC_ORDER.iter().zip(&sizes) {
        class_of.extend(std::iter::repeat_n(*class, size));
    }
    let n = class_of.len();
    let mut arcs = Vec::with_capacity(n * d);
    for u in 0..n {
        for v in 0..n {
            let (pu, pv) = (class_of[u].position(), class_of[v].position());
            let gap = (pu + 6 - pv) % 6;
            if gap == 0 || gap == 1 || gap == 5 {
                arcs.push((u, v));
            }
        }
    }
    let g = DiGraph::from_arcs(n, arcs)?;
    let (a1, b1, a2, b2) = (0, 1, d, d + 1);
    let labeling = XdLabeling {
        d,
        class_of,
        crossing_arcs: [(b1, a1), (a2, b2), (b2, a2), (a1, b1)],
    };
    Ok((g, labeling))
}

/// `G_{k,d} = X_d ⊔ (k-2) K_d°`, a `d`-regular digraph on `kd` vertices.
pub fn build_gkd(k: usize, d: usize) -> Result<DiGraph> {
    if k < 2 {
        return Err(Error::param(format!("G_(k,d) needs k >= 2 (got {k})")));
    }
    let (xd, _) = build_xd(d)?;
    let kd = complete_looped(d)?;
    Ok(DiGraph::disjoint_union(
        std::iter::once(&xd).chain(std::iter::repeat_n(&kd, k - 2)),
    ))
}

/// Undirected cycle `C_n`.
pub fn cycle(n: usize) -> Result<UGraph> {
    if n < 3 {
        return Err(Error::param(format!("cycle needs n >= 3 (got {n})")));
    }
    UGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Complete graph `K_m`.
pub fn clique(m: usize) -> Result<UGraph> {
    if m == 0 {
        return Err(Error::param("clique needs m >= 1"));
    }
    UGraph::from_edges(m, (0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v))))
}

/// Complete tripartite `K_{2,2,2}` (the octahedron); parts are `{0,1}`, `{2,3}`, `{4,5}`.
pub fn complete_tripartite_222() -> UGraph {
    UGraph::from_edges(
        6,
        (0..6).flat_map(|u| {
            (u + 1..6)
                .filter(move |v| v / 2 != u / 2)
                .map(move |v| (u, v))
        }),
    )
    .expect("octahedron edges are simple")
}

/// `k` disjoint copies of `g`.
pub fn copies(g: &UGraph, k: usize) -> UGraph {
    UGraph::disjoint_union(std::iter::repeat_n(g, k))
}

/// Named undirected families: `C<n>`, `K<m>`, `K222`, each optionally
/// prefixed by a copy count (`6K5`, `5K222`, `2K3`).
pub fn undirected_family(name: &str) -> Result<UGraph> {
    let unknown = || Error::param(format!("unknown undirected family `{name}`"));
    let split = name
        .find(|c: char| !c.is_ascii_digit())
        .ok_or_else(unknown)?;
    let (count, body) = name.split_at(split);
    let k = if count.is_empty() {
        1
    } else {
        count.parse::<usize>().map_err(|_| unknown())?
    };
    if k == 0 {
        return Err(unknown());
    }
    let base = match (&body[..1], &body[1..]) {
        ("K", "222") | ("K", "2,2,2") | ("K", "{2,2,2}") => complete_tripartite_222(),
        ("K", m) => clique(m.parse().map_err(|_| unknown())?)?,
        ("C", n) => cycle(n.parse().map_err(|_| unknown())?)?,
        _ => return Err(unknown()),
    };
    Ok(copies(&base, k))
}

/// Three `K_m` blocks, each missing the edge between its two lowest vertices
/// `a_i, b_i`, rejoined cyclically by `b_1 a_2`, `b_2 a_3`, `b_3 a_1`.
/// The result is `(m-1)`-regular on `3m` vertices.
pub fn undirected_three_block_splice(m: usize) -> Result<UGraph> {
    if m < 4 {
        return Err(Error::param(format!(
            "three-block splice needs m >= 4 (got {m})"
        )));
    }
    let mut edges = Vec::new();
    for block in 0..3 {
        let base = block * m;
        for u in 0..m {
            for v in u + 1..m {
                if (u, v) != (0, 1) {
                    edges.push((base + u, base + v));
                }
            }
        }
        let next = (block + 1) % 3;
        edges.push((base + 1, next * m));
    }
    UGraph::from_edges(3 * m, edges)
}
