//! Structured enumerations: crossing patterns of `X_d`, the classification of
//! the cycle-factors of `G_n°`, and matchings of cycles.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{cycle_factor_stats, for_each_cycle_factor, ArcConstraints, EnumOptions, FactorStats};
use crate::constructions::{build_xd, looped_bidirected_cycle, CrossingArc};
use crate::error::{Error, Result};
use crate::exact::{biguint_to_rational, PatternClass};

/// Largest `d` for which `X_d` is enumerated by default.
pub const PATTERN_D_LIMIT: usize = 7;

/// Largest `n` for which `G_n°` is classified by default.
pub const GN_LIMIT: usize = 16;

/// Statistics of `C(X_d)` split by the exact subset of crossing arcs used.
#[derive(Clone, Debug)]
pub struct CrossingCensus {
    pub d: usize,
    /// Indexed by crossing mask (`u1 = 1, v1 = 2, u2 = 4, v2 = 8`).
    pub buckets: Vec<FactorStats>,
}

impl CrossingCensus {
    /// Sum of all buckets; equals the unconstrained statistics of `X_d`.
    pub fn total(&self) -> FactorStats {
        let mut acc = FactorStats::empty(2 * self.d, false);
        for b in &self.buckets {
            acc += b;
        }
        acc
    }

    pub fn observed_masks(&self) -> Vec<u8> {
        (0u8..16)
            .filter(|&m| !self.buckets[m as usize].is_empty())
            .collect()
    }
}

/// Enumerates `C(X_d)` once per subset `S` of crossing arcs, requiring the
/// arcs of `S` and forbidding the others, so each factor lands in the bucket
/// of its crossing pattern.
pub fn crossing_census(d: usize, opts: &EnumOptions) -> Result<CrossingCensus> {
    if d > PATTERN_D_LIMIT {
        return Err(Error::param(format!(
            "crossing census limited to d <= {PATTERN_D_LIMIT} (got {d})"
        )));
    }
    let (g, lab) = build_xd(d)?;
    let mut buckets = Vec::with_capacity(16);
    for mask in 0u8..16 {
        let mut c = ArcConstraints::none();
        for arc in CrossingArc::ALL {
            let (u, v) = lab.arc(arc);
            c = if mask & arc.bit() != 0 {
                c.require(u, v)
            } else {
                c.forbid(u, v)
            };
        }
        buckets.push(cycle_factor_stats(&g, &c, opts)?);
    }
    Ok(CrossingCensus { d, buckets })
}

/// One grouped row of the crossing-pattern table, measured by enumeration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternRow {
    pub class: PatternClass,
    #[serde(with = "crate::exact::serde_str::biguint")]
    pub count: BigUint,
    #[serde(with = "crate::exact::serde_str::biguint")]
    pub cycle_sum: BigUint,
    #[serde(with = "crate::exact::serde_str::ratio")]
    pub mean: BigRational,
}

/// Enumerates `C(X_d)`, checks that only the six balanced crossing patterns
/// occur, and returns counts and exact mean cycle counts grouped in table
/// order.
pub fn classify_crossing_patterns(d: usize, opts: &EnumOptions) -> Result<Vec<PatternRow>> {
    let census = crossing_census(d, opts)?;
    let mut rows: Vec<PatternRow> = PatternClass::TABLE_ORDER
        .iter()
        .map(|&class| PatternRow {
            class,
            count: BigUint::zero(),
            cycle_sum: BigUint::zero(),
            mean: BigRational::zero(),
        })
        .collect();
    for (mask, bucket) in census.buckets.iter().enumerate() {
        if bucket.is_empty() {
            continue;
        }
        let class = PatternClass::of_mask(mask as u8).ok_or_else(|| {
            Error::Consistency(format!(
                "unbalanced crossing pattern {mask:#06b} used by {} factors of X_{d}",
                bucket.count
            ))
        })?;
        let row = &mut rows[class as usize];
        row.count += &bucket.count;
        row.cycle_sum += &bucket.cycle_sum;
    }
    for row in &mut rows {
        if !row.count.is_zero() {
            row.mean = biguint_to_rational(&row.cycle_sum) / biguint_to_rational(&row.count);
        }
    }
    Ok(rows)
}

/// Outcome of comparing `C(G_n°)` with the two Hamilton cycles plus the
/// factors induced by matchings of `C_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GnClassification {
    pub n: usize,
    pub factors: usize,
    pub matchings: usize,
    /// Matchings of `C_n` by size, read off the enumerated factors.
    pub matchings_by_size: Vec<usize>,
    pub holds: bool,
}

/// Enumerates both sides explicitly and compares them as sets.
pub fn gn_classification_check(n: usize) -> Result<GnClassification> {
    if n > GN_LIMIT {
        return Err(Error::param(format!(
            "G_n classification limited to n <= {GN_LIMIT}"
        )));
    }
    let g = looped_bidirected_cycle(n)?;
    let mut factors = BTreeSet::new();
    for_each_cycle_factor(&g, &ArcConstraints::none(), |sigma, _| {
        factors.insert(sigma.to_vec());
    })?;

    let mut predicted = BTreeSet::new();
    predicted.insert((0..n).map(|i| (i + 1) % n).collect::<Vec<_>>());
    predicted.insert((0..n).map(|i| (i + n - 1) % n).collect::<Vec<_>>());
    let mut matchings_by_size = vec![0usize; n / 2 + 1];
    let mut matchings = 0;
    // Edge i of C_n joins i and i+1; bit i of `m` selects it.
    for m in 0u32..(1u32 << n) {
        let wraps = (m >> (n - 1)) & 1 == 1 && m & 1 == 1;
        if m & (m << 1) != 0 || wraps {
            continue;
        }
        let mut sigma: Vec<usize> = (0..n).collect();
        for i in (0..n).filter(|&i| m >> i & 1 == 1) {
            sigma.swap(i, (i + 1) % n);
        }
        matchings += 1;
        matchings_by_size[m.count_ones() as usize] += 1;
        predicted.insert(sigma);
    }
    let holds = factors == predicted && factors.len() == matchings + 2;
    Ok(GnClassification {
        n,
        factors: factors.len(),
        matchings,
        matchings_by_size,
        holds,
    })
}

/// Number of matchings of the cycle `C_n` of each size `0..=n/2`, by dynamic
/// programming: the closing edge is either unused (a path on `n` vertices) or
/// used (a path on `n-2` vertices plus one edge).
pub fn cycle_matching_counts(n: usize) -> Result<Vec<BigUint>> {
    if n < 3 {
        return Err(Error::param(format!("cycle needs n >= 3 (got {n})")));
    }
    let width = n / 2 + 1;
    // path[m][r]: matchings of size r in the path on m vertices.
    let mut path = vec![vec![BigUint::zero(); width]; n + 1];
    path[0][0] = BigUint::from(1u32);
    path[1][0] = BigUint::from(1u32);
    for m in 2..=n {
        for r in 0..width {
            let mut x = path[m - 1][r].clone();
            if r > 0 {
                x += &path[m - 2][r - 1];
            }
            path[m][r] = x;
        }
    }
    Ok((0..width)
        .map(|r| {
            let mut x = path[n][r].clone();
            if r > 0 {
                x += &path[n - 2][r - 1];
            }
            x
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn small(v: &[BigUint]) -> Vec<u64> {
        v.iter().map(|x| u64::try_from(x).unwrap()).collect()
    }

    /// Brute force: subsets of the edges of C_n with no shared endpoint.
    fn brute_cycle_matchings(n: usize) -> Vec<u64> {
        let mut out = vec![0u64; n / 2 + 1];
        for m in 0u32..(1 << n) {
            let mut deg = vec![0; n];
            for i in 0..n {
                if m >> i & 1 == 1 {
                    deg[i] += 1;
                    deg[(i + 1) % n] += 1;
                }
            }
            if deg.iter().all(|&x| x <= 1) {
                out[m.count_ones() as usize] += 1;
            }
        }
        out
    }

    #[test]
    fn matching_counts() {
        assert_eq!(small(&cycle_matching_counts(6).unwrap()), vec![1, 6, 9, 2]);
        assert_eq!(small(&cycle_matching_counts(3).unwrap()), vec![1, 3]);
        assert_eq!(brute_cycle_matchings(8), vec![1, 8, 20, 16, 2]);
        assert_eq!(
            small(&cycle_matching_counts(8).unwrap()),
            vec![1, 8, 20, 16, 2]
        );
        for n in 3..=14 {
            assert_eq!(
                small(&cycle_matching_counts(n).unwrap()),
                brute_cycle_matchings(n),
                "n={n}"
            );
        }
        assert!(cycle_matching_counts(2).is_err());
    }

    #[test]
    fn gn_classification() {
        let six = gn_classification_check(6).unwrap();
        assert!(six.holds);
        assert_eq!(six.matchings_by_size, vec![1, 6, 9, 2]);
        assert_eq!(six.factors, 20);
        for n in [4, 5, 9] {
            assert!(gn_classification_check(n).unwrap().holds, "n={n}");
        }
        assert!(gn_classification_check(3).is_err());
        assert!(gn_classification_check(17).is_err());
    }

    #[test]
    fn crossing_patterns_at_three() {
        let rows = classify_crossing_patterns(3, &EnumOptions::default()).unwrap();
        let q = |p: i64, d: i64| Rational::new(p.into(), d.into());
        assert_eq!(rows[0].count, BigUint::from(9u32));
        assert_eq!(rows[0].mean, q(14, 3));
        assert_eq!(rows[3].count, BigUint::from(2u32));
        assert_eq!(rows[3].mean, q(1, 1));
        let census = crossing_census(3, &EnumOptions::default()).unwrap();
        assert_eq!(census.observed_masks(), vec![0, 5, 6, 9, 10, 15]);
    }
}
