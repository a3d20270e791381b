//! Harmonic numbers, partial-permutation counts and the closed forms for the
//! gadget `X_d`.
//!
//! Every function is generic over the scalar: [`Ring`] where only ring
//! operations occur, [`Field`] where harmonic numbers or means appear. Use
//! [`crate::Rational`] for exact results.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

/// `H_m = 1 + 1/2 + ... + 1/m`, with `H_0 = 0`.
pub fn harmonic<T: Field>(m: usize) -> T {
    (1..=m).fold(T::zero(), |acc, j| acc + T::one() / T::of(j))
}

pub fn factorial<T: Ring>(m: usize) -> T {
    (2..=m).fold(T::one(), |acc, j| acc * T::of(j))
}

/// Number of permutations of `n` points extending a partial permutation with
/// `r` prescribed arcs: `(n-r)!`.
pub fn partial_perm_count<T: Ring>(n: usize, r: usize) -> Result<T> {
    if r > n {
        return Err(Error::param(format!("r = {r} exceeds n = {n}")));
    }
    Ok(factorial(n - r))
}

/// Total cycle count over all such extensions when the partial permutation
/// already closes `q` cycles: `(n-r)! (H_{n-r} + q)`.
pub fn partial_perm_cycle_sum<T: Field>(n: usize, r: usize, q: usize) -> Result<T> {
    if r > n {
        return Err(Error::param(format!("r = {r} exceeds n = {n}")));
    }
    if q > r {
        return Err(Error::param(format!(
            "q = {q} prescribed cycles need at least {q} arcs, only r = {r} given"
        )));
    }
    let rest = n - r;
    Ok(factorial::<T>(rest) * (harmonic::<T>(rest) + T::of(q)))
}

/// `(N_0, S_0)` for one `d`-vertex block with two opposite non-loop arcs
/// removed: the number of completions and their total cycle count.
///
/// `d = 2` is admitted (with `0! = 1`, `H_0 = 0`) for degenerate checks.
pub fn n0_s0<T: Field>(d: usize) -> Result<(T, T)> {
    if d < 2 {
        return Err(Error::param(format!("block size must be >= 2 (got {d})")));
    }
    let two = T::of(2);
    let n0 = factorial::<T>(d) - two.clone() * factorial::<T>(d - 1) + factorial::<T>(d - 2);
    let dd = T::of(d);
    let factored = factorial::<T>(d - 2) * (dd.clone() * dd.clone() - T::of(3) * dd + T::of(3));
    if !n0.agrees_with(&factored) {
        return Err(Error::Consistency(format!(
            "N_0 inclusion-exclusion {n0:?} != factored form {factored:?} at d = {d}"
        )));
    }
    let s0 = factorial::<T>(d) * harmonic::<T>(d)
        - two * factorial::<T>(d - 1) * harmonic::<T>(d - 1)
        + factorial::<T>(d - 2) * (harmonic::<T>(d - 2) + T::one());
    Ok((n0, s0))
}

/// Row grouping of crossing patterns used by the count table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternClass {
    /// No crossing arc.
    Empty,
    /// `u1 v2` or `v1 u2`: one boundary 2-cycle.
    OneTwoCycle,
    /// `u1 v1 u2 v2`: both boundary 2-cycles.
    TwoTwoCycles,
    /// `u1 u2` or `v1 v2`: two open paths spliced into one cycle.
    Splice,
}

impl PatternClass {
    pub const TABLE_ORDER: [PatternClass; 4] = [
        PatternClass::Empty,
        PatternClass::OneTwoCycle,
        PatternClass::TwoTwoCycles,
        PatternClass::Splice,
    ];

    /// Classifies a crossing mask (bits `u1 = 1, v1 = 2, u2 = 4, v2 = 8`).
    /// Masks that no cycle-factor can realise return `None`.
    pub fn of_mask(mask: u8) -> Option<PatternClass> {
        match mask {
            0 => Some(PatternClass::Empty),
            0b1001 | 0b0110 => Some(PatternClass::OneTwoCycle),
            0b1111 => Some(PatternClass::TwoTwoCycles),
            0b0101 | 0b1010 => Some(PatternClass::Splice),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PatternClass::Empty => "empty",
            PatternClass::OneTwoCycle => "u1v2|v1u2",
            PatternClass::TwoTwoCycles => "u1v1u2v2",
            PatternClass::Splice => "u1u2|v1v2",
        }
    }
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Row<T> {
    pub class: PatternClass,
    pub count: T,
    pub mean: T,
}

/// The four rows (count, mean cycle count) of the crossing-pattern table
/// for `X_d`, in table order.
pub fn table1_rows<T: Field>(d: usize) -> Result<Vec<Table1Row<T>>> {
    if d < 3 {
        return Err(Error::param(format!("X_d needs d >= 3 (got {d})")));
    }
    let (n0, s0) = n0_s0::<T>(d)?;
    let two = T::of(2);
    let f1 = factorial::<T>(d - 1);
    let f2 = factorial::<T>(d - 2);
    let h1 = harmonic::<T>(d - 1);
    let h2 = harmonic::<T>(d - 2);
    let splice_side = f2.clone() * T::of(d - 2);
    Ok(vec![
        Table1Row {
            class: PatternClass::Empty,
            count: n0.clone() * n0.clone(),
            mean: two.clone() * s0 / n0,
        },
        Table1Row {
            class: PatternClass::OneTwoCycle,
            count: two.clone() * f1.clone() * f1,
            mean: two.clone() * h1 + T::one(),
        },
        Table1Row {
            class: PatternClass::TwoTwoCycles,
            count: f2.clone() * f2,
            mean: two.clone() * h2.clone() + two.clone(),
        },
        Table1Row {
            class: PatternClass::Splice,
            count: two.clone() * splice_side.clone() * splice_side,
            mean: two * h2 - T::one(),
        },
    ])
}

/// `d^4 - 6d^3 + 19d^2 - 30d + 20`.
pub fn count_polynomial<T: Ring>(d: usize) -> T {
    let x = T::of(d);
    let x2 = x.clone() * x.clone();
    x2.clone() * x2.clone() - T::of(6) * x2.clone() * x.clone() + T::of(19) * x2 - T::of(30) * x
        + T::of(20)
}

/// `f(d) = 3d^3 - 14d^2 + 25d - 10`.
pub fn f_poly<T: Ring>(d: usize) -> T {
    let x = T::of(d);
    let x2 = x.clone() * x.clone();
    T::of(3) * x2.clone() * x.clone() - T::of(14) * x2 + T::of(25) * x - T::of(10)
}

/// `f'(d) = 9d^2 - 28d + 25`.
pub fn f_prime<T: Ring>(d: usize) -> T {
    let x = T::of(d);
    T::of(9) * x.clone() * x.clone() - T::of(28) * x + T::of(25)
}

/// `2(d-2) f(d) / (d (d-1) P(d))`, the excess of `X_d` over `2 H_d`.
pub fn excess_closed_form<T: Field>(d: usize) -> Result<T> {
    if d < 3 {
        return Err(Error::param(format!("X_d needs d >= 3 (got {d})")));
    }
    let num = T::of(2) * T::of(d - 2) * f_poly::<T>(d);
    let den = T::of(d) * T::of(d - 1) * count_polynomial::<T>(d);
    Ok(num / den)
}

/// Exact summary of the cycle-factors of `X_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct XdClosedForm<T> {
    pub d: usize,
    /// `N`, the number of cycle-factors.
    pub count: T,
    /// `T`, the total cycle count.
    pub cycle_sum: T,
    pub expectation: T,
    /// `2 H_d`.
    pub benchmark: T,
    pub excess: T,
    pub rows: Vec<Table1Row<T>>,
}

/// Sums the table rows into `N` and `T` and cross-checks them against the
/// factored count and the closed-form excess.
pub fn xd_closed_form<T: Field>(d: usize) -> Result<XdClosedForm<T>> {
    let rows = table1_rows::<T>(d)?;
    let count = rows.iter().fold(T::zero(), |acc, r| acc + r.count.clone());
    let cycle_sum = rows
        .iter()
        .fold(T::zero(), |acc, r| acc + r.count.clone() * r.mean.clone());
    let f2 = factorial::<T>(d - 2);
    let factored = f2.clone() * f2 * count_polynomial::<T>(d);
    if !count.agrees_with(&factored) {
        return Err(Error::Consistency(format!(
            "row counts sum to {count:?}, factored count is {factored:?} (d = {d})"
        )));
    }
    let benchmark = T::of(2) * harmonic::<T>(d);
    let expectation = cycle_sum.clone() / count.clone();
    let excess = excess_closed_form::<T>(d)?;
    if !(expectation.clone() - benchmark.clone()).agrees_with(&excess) {
        return Err(Error::Consistency(format!(
            "T/N - 2H_d = {:?} disagrees with closed-form excess {excess:?} (d = {d})",
            expectation.clone() - benchmark.clone()
        )));
    }
    Ok(XdClosedForm {
        d,
        count,
        cycle_sum,
        expectation,
        benchmark,
        excess,
        rows,
    })
}

/// True iff `f(d) > 0` and `f'(d) > 0` for every integer `3 <= d <= d_max`.
pub fn f_positivity(d_max: usize) -> bool {
    (3..=d_max).all(|d| f_poly::<BigInt>(d).is_positive() && f_prime::<BigInt>(d).is_positive())
}

/// `d^2` times the excess of `X_d`; tends to 6.
pub fn asymptotic_excess_probe<T: Field>(d: usize) -> Result<T> {
    let dd = T::of(d);
    Ok(dd.clone() * dd * excess_closed_form::<T>(d)?)
}

/// Renders a rational as `p/q`, keeping `/1` for integers.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::param(format!("bad rational `{s}`"));
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn biguint_to_rational(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// Integer-valued rational as an unsigned big integer.
pub fn rational_to_biguint(x: &BigRational) -> Option<BigUint> {
    (x.is_integer() && !x.is_negative()).then(|| x.to_integer().to_biguint().expect("non-negative"))
}

/// Serde adapters that write exact numbers as decimal strings.
pub mod serde_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub mod ratio {
        use super::*;

        pub fn serialize<S: Serializer>(
            r: &BigRational,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            s.serialize_str(&ratio_string(r))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<BigRational, D::Error> {
            let s = String::deserialize(d)?;
            parse_ratio(&s).map_err(serde::de::Error::custom)
        }
    }

    pub mod biguint {
        use super::*;

        pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
            s.serialize_str(&x.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<BigUint, D::Error> {
            let s = String::deserialize(d)?;
            s.parse().map_err(serde::de::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_rational::Ratio;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic::<Rational>(0), q(0, 1));
        assert_eq!(harmonic::<Rational>(2), q(3, 2));
        assert_eq!(harmonic::<Rational>(3), q(11, 6));
        assert!((harmonic::<f64>(3) - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(harmonic::<Ratio<i128>>(3), Ratio::new(11, 6));
    }

    #[test]
    fn harmonic_identities() {
        for m in 1..=200usize {
            assert_eq!(
                harmonic::<Rational>(m) - harmonic::<Rational>(m - 1),
                q(1, m as i64)
            );
        }
        for d in 3..=200usize {
            let hd = harmonic::<Rational>(d);
            let inv = |x: usize| q(1, x as i64);
            assert_eq!(harmonic::<Rational>(d - 1), hd.clone() - inv(d));
            assert_eq!(harmonic::<Rational>(d - 2), hd - inv(d) - inv(d - 1));
        }
    }

    #[test]
    fn partial_perm_examples() {
        assert_eq!(
            partial_perm_count::<BigInt>(5, 0).unwrap(),
            BigInt::from(120)
        );
        assert_eq!(partial_perm_count::<BigInt>(5, 5).unwrap(), BigInt::from(1));
        assert_eq!(partial_perm_count::<BigInt>(4, 2).unwrap(), BigInt::from(2));
        assert!(partial_perm_count::<BigInt>(2, 3).is_err());
        assert_eq!(
            partial_perm_cycle_sum::<Rational>(3, 0, 0).unwrap(),
            q(11, 1)
        );
        assert_eq!(
            partial_perm_cycle_sum::<Rational>(3, 1, 0).unwrap(),
            q(3, 1)
        );
        assert_eq!(
            partial_perm_cycle_sum::<Rational>(2, 2, 1).unwrap(),
            q(1, 1)
        );
        assert!(partial_perm_cycle_sum::<Rational>(3, 1, 2).is_err());
        assert!(partial_perm_cycle_sum::<Rational>(3, 4, 0).is_err());
    }

    #[test]
    fn cauchy_cycle_sum() {
        for n in 0..=10 {
            let expected = factorial::<Rational>(n) * harmonic::<Rational>(n);
            assert_eq!(
                partial_perm_cycle_sum::<Rational>(n, 0, 0).unwrap(),
                expected
            );
        }
    }

    /// Brute force over S_d: permutations avoiding the arcs 0->1 and 1->0.
    fn brute_n0_s0(d: usize) -> (usize, usize) {
        fn rec(
            v: usize,
            d: usize,
            sigma: &mut Vec<usize>,
            used: &mut Vec<bool>,
            acc: &mut (usize, usize),
        ) {
            if v == d {
                let mut seen = vec![false; d];
                let mut cycles = 0;
                for s in 0..d {
                    if !seen[s] {
                        cycles += 1;
                        let mut x = s;
                        while !seen[x] {
                            seen[x] = true;
                            x = sigma[x];
                        }
                    }
                }
                acc.0 += 1;
                acc.1 += cycles;
                return;
            }
            for w in 0..d {
                if used[w] || (v, w) == (0, 1) || (v, w) == (1, 0) {
                    continue;
                }
                used[w] = true;
                sigma.push(w);
                rec(v + 1, d, sigma, used, acc);
                sigma.pop();
                used[w] = false;
            }
        }
        let mut acc = (0, 0);
        rec(0, d, &mut Vec::new(), &mut vec![false; d], &mut acc);
        acc
    }

    #[test]
    fn n0_s0_against_brute_force() {
        assert_eq!(brute_n0_s0(3), (3, 7));
        let (n0, s0) = n0_s0::<Rational>(3).unwrap();
        assert_eq!((n0, s0), (q(3, 1), q(7, 1)));
        assert_eq!(n0_s0::<Rational>(4).unwrap().0, q(14, 1));
        for d in 2..=7 {
            let (bn, bs) = brute_n0_s0(d);
            let (n0, s0) = n0_s0::<Rational>(d).unwrap();
            assert_eq!(n0, q(bn as i64, 1), "N_0 at d={d}");
            assert_eq!(s0, q(bs as i64, 1), "S_0 at d={d}");
        }
        assert!(n0_s0::<Rational>(1).is_err());
    }

    #[test]
    fn table1_at_three() {
        let rows = table1_rows::<Rational>(3).unwrap();
        let classes: Vec<_> = rows.iter().map(|r| r.class).collect();
        assert_eq!(classes, PatternClass::TABLE_ORDER);
        assert_eq!(
            (rows[0].count.clone(), rows[0].mean.clone()),
            (q(9, 1), q(14, 3))
        );
        assert_eq!(
            (rows[1].count.clone(), rows[1].mean.clone()),
            (q(8, 1), q(4, 1))
        );
        assert_eq!(
            (rows[2].count.clone(), rows[2].mean.clone()),
            (q(1, 1), q(4, 1))
        );
        assert_eq!(
            (rows[3].count.clone(), rows[3].mean.clone()),
            (q(2, 1), q(1, 1))
        );
    }

    #[test]
    fn closed_form_examples() {
        let c3 = xd_closed_form::<Rational>(3).unwrap();
        assert_eq!(c3.count, q(20, 1));
        assert_eq!(c3.cycle_sum, q(80, 1));
        assert_eq!(c3.excess, q(1, 3));
        assert_eq!(c3.expectation, q(4, 1));
        let c4 = xd_closed_form::<Rational>(4).unwrap();
        assert_eq!(c4.excess, q(29, 114));
        assert_eq!(c4.count, q(4 * 76, 1));
        let f = xd_closed_form::<f64>(4).unwrap();
        assert!((f.excess - 29.0 / 114.0).abs() < 1e-12);
        assert!(xd_closed_form::<Rational>(2).is_err());
    }

    #[test]
    fn closed_form_consistency_range() {
        for d in 3..=30 {
            let c = xd_closed_form::<Rational>(d).unwrap();
            assert_eq!(
                c.cycle_sum.clone() / c.count.clone() - c.benchmark.clone(),
                c.excess
            );
            assert!(c.excess.is_positive());
            // T - 2H_d N = 2((d-2)!)^2 (d-2) f(d) / (d(d-1))
            let f2 = factorial::<Rational>(d - 2);
            let rhs = q(2, 1)
                * f2.clone()
                * f2
                * Rational::from_integer((d as i64 - 2).into())
                * f_poly::<Rational>(d)
                / Rational::from_integer(((d * (d - 1)) as i64).into());
            assert_eq!(c.cycle_sum - c.benchmark * c.count, rhs);
        }
    }

    #[test]
    fn f_positivity_examples() {
        assert_eq!(f_poly::<BigInt>(3), BigInt::from(20));
        assert_eq!(f_prime::<BigInt>(3), BigInt::from(22));
        assert_eq!(f_poly::<i64>(3), 20);
        assert!(f_positivity(3));
        assert!(f_positivity(100));
    }

    #[test]
    fn asymptotic_probe() {
        assert_eq!(asymptotic_excess_probe::<Rational>(3).unwrap(), q(3, 1));
        let p50 = asymptotic_excess_probe::<Rational>(50).unwrap();
        assert!(p50 > q(5, 1) && p50 < q(7, 1));
        let p500 = asymptotic_excess_probe::<Rational>(500).unwrap();
        assert!(p500 > q(58, 10) && p500 < q(62, 10));
        let pf = asymptotic_excess_probe::<f64>(500).unwrap();
        assert!((pf - ratio_to_f64(&p500)).abs() < 1e-9);
    }

    #[test]
    fn ratio_strings() {
        assert_eq!(ratio_string(&q(4, 1)), "4/1");
        assert_eq!(ratio_string(&q(2, 6)), "1/3");
        assert_eq!(parse_ratio("29/114").unwrap(), q(29, 114));
        assert_eq!(parse_ratio("-7").unwrap(), q(-7, 1));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }
}
