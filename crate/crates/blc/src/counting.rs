//! Counting terms by size and free-index bound.
//!
//! `S(m, n)` is the number of terms of size `n` with at most `m` distinct
//! free indices. There are no terms of size 0 or 1, and for `n >= 2`
//!
//! ```text
//! S(m, n) = [m >= n-1] + S(m+1, n-2) + sum_{k} S(m, k) * S(m, n-2-k)
//! ```
//!
//! The three summands count indices, abstractions and applications. An
//! index of value `n - 1` is the only index that fits in size `n`, so
//! `S(m, n) = S(inf, n)` as soon as `m >= n - 1`; lookups clamp `m`
//! accordingly and the table holds at most `n` entries per row.
//!
//! `S(inf, n)` (all terms, open or closed) satisfies the same recurrence
//! with the Iverson bracket replaced by 1 and is kept as its own
//! one-dimensional memo.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Memoized table of `S(m, n)` and `S(inf, n)`, exact at every size.
///
/// Construction is single-writer: `materialize` grows the table, after
/// which `get` lookups are read-only and cheap. Counts exceed 64 bits
/// around `n = 110` (growth is roughly `1.9634^n`), hence `BigUint`.
#[derive(Debug, Default)]
pub struct CountTable {
    /// `rows[n][m]`, with the row for size `n` filled for `m <= bound(n)`.
    rows: Vec<Vec<BigUint>>,
    /// `all[n] = S(inf, n)`.
    all: Vec<BigUint>,
    env_m: u64,
    env_n: u64,
}

impl CountTable {
    pub fn new() -> CountTable {
        CountTable::default()
    }

    /// Highest `m` stored in the row for size `n`, for an envelope of
    /// queries with `m <= env_m` and `n <= env_n`. Each abstraction step
    /// raises `m` by one while lowering `n` by two, so rows below `env_n`
    /// need `env_m + ceil((env_n - n) / 2)` entries, clamped by saturation.
    fn bound(env_m: u64, env_n: u64, n: u64) -> u64 {
        if n == 0 {
            0
        } else {
            (n - 1).min(env_m + (env_n - n).div_ceil(2))
        }
    }

    /// Fills the table so that every `S(m', n')` with `m' <= m`, `n' <= n`
    /// (and everything their recurrences touch) is available to `get`.
    pub fn materialize(&mut self, m: u64, n: u64) {
        let new_m = self.env_m.max(m);
        let new_n = self.env_n.max(n);
        if new_m == self.env_m && new_n == self.env_n && self.rows.len() as u64 > new_n {
            return;
        }
        self.env_m = new_m;
        self.env_n = new_n;
        for cur in 0..=new_n {
            if self.rows.len() as u64 == cur {
                self.rows.push(Vec::new());
            }
            let want = Self::bound(new_m, new_n, cur) + 1;
            while (self.rows[cur as usize].len() as u64) < want {
                let next_m = self.rows[cur as usize].len() as u64;
                let value = self.entry(next_m, cur);
                self.rows[cur as usize].push(value);
            }
        }
    }

    fn entry(&self, m: u64, n: u64) -> BigUint {
        if n < 2 {
            return BigUint::zero();
        }
        let k = n - 2;
        let mut acc = if m > k { BigUint::one() } else { BigUint::zero() };
        acc += self.get(m + 1, k);
        // convolution over application splits; sizes 0 and 1 contribute
        // nothing, so only 2 <= j <= k-2 matters, folded symmetrically
        for j in 2..=k / 2 {
            let prod = self.get(m, j) * self.get(m, k - j);
            if 2 * j == k {
                acc += prod;
            } else {
                acc += prod << 1;
            }
        }
        acc
    }

    /// Borrowing lookup of `S(m, n)` with `m` clamped to `n - 1`.
    /// The entry must already be materialized.
    pub(crate) fn get(&self, m: u64, n: u64) -> &BigUint {
        let clamped = m.min(n.saturating_sub(1)) as usize;
        &self.rows[n as usize][clamped]
    }

    /// `S(m, n)`, exactly.
    pub fn count(&mut self, m: u64, n: u64) -> &BigUint {
        self.materialize(m, n);
        self.get(m, n)
    }

    /// `S(inf, n)`: the number of all terms of size `n`. Equals
    /// `count(m, n)` for any `m >= n - 1`.
    pub fn count_all(&mut self, n: u64) -> &BigUint {
        while (self.all.len() as u64) <= n {
            let cur = self.all.len() as u64;
            let value = if cur < 2 {
                BigUint::zero()
            } else {
                let k = (cur - 2) as usize;
                let mut acc = BigUint::one();
                acc += &self.all[k];
                for j in 2..=k / 2 {
                    let prod = &self.all[j] * &self.all[k - j];
                    if 2 * j == k {
                        acc += prod;
                    } else {
                        acc += prod << 1;
                    }
                }
                acc
            };
            self.all.push(value);
        }
        &self.all[n as usize]
    }
}

/// A free-index bound: either a concrete `m` or no bound at all.
///
/// Saturation makes the unbounded class concrete: at size `n`, every class
/// with `m >= n - 1` is the full class, so `Unbounded` resolves to `m = n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreeBound {
    AtMost(u64),
    Unbounded,
}

impl FreeBound {
    /// The concrete `m` to use for terms of size `n`.
    pub fn resolve(self, n: u64) -> u64 {
        match self {
            FreeBound::AtMost(m) => m,
            FreeBound::Unbounded => n,
        }
    }
}

impl fmt::Display for FreeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeBound::AtMost(m) => write!(f, "{}", m),
            FreeBound::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expected a non-negative integer or \"inf\", got {input:?}")]
pub struct FreeBoundParseError {
    pub input: String,
}

impl FromStr for FreeBound {
    type Err = FreeBoundParseError;

    fn from_str(s: &str) -> Result<FreeBound, FreeBoundParseError> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(FreeBound::Unbounded);
        }
        s.parse::<u64>()
            .map(FreeBound::AtMost)
            .map_err(|_| FreeBoundParseError { input: s.to_owned() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::BitString;

    /// First 20 closed-term counts (the printed sequence for S(0, n)).
    const S0_FIRST: [u64; 20] =
        [0, 0, 0, 0, 1, 0, 1, 1, 2, 1, 6, 5, 13, 14, 37, 44, 101, 134, 298, 431];
    /// First 20 all-term counts (the printed sequence for S(inf, n)).
    const SINF_FIRST: [u64; 20] =
        [0, 0, 1, 1, 2, 2, 4, 5, 10, 14, 27, 41, 78, 126, 237, 399, 745, 1292, 2404, 4259];

    #[test]
    fn closed_term_sequence() {
        let mut table = CountTable::new();
        for (n, want) in S0_FIRST.iter().enumerate() {
            assert_eq!(table.count(0, n as u64), &BigUint::from(*want), "S(0,{n})");
        }
        assert_eq!(table.count(0, 46).to_string(), "5495929096");
    }

    #[test]
    fn all_term_sequence() {
        let mut table = CountTable::new();
        for (n, want) in SINF_FIRST.iter().enumerate() {
            assert_eq!(table.count_all(n as u64), &BigUint::from(*want), "S(inf,{n})");
        }
        assert_eq!(table.count_all(46).to_string(), "96108150292");
        assert_eq!(table.count_all(10), &BigUint::from(27u32));
    }

    #[test]
    fn sizes_zero_and_one_are_empty() {
        let mut table = CountTable::new();
        for m in [0u64, 1, 5, 100] {
            assert!(table.count(m, 0).is_zero());
            assert!(table.count(m, 1).is_zero());
        }
    }

    #[test]
    fn saturation_and_cross_consistency() {
        let mut table = CountTable::new();
        for n in 1..=30u64 {
            let all = table.count_all(n).clone();
            assert_eq!(table.count(n - 1, n), &all, "S(n-1,n) at n={n}");
            assert_eq!(table.count(n, n), &all, "S(n,n) at n={n}");
            assert_eq!(table.count(n + 7, n), &all, "beyond saturation at n={n}");
        }
    }

    #[test]
    fn monotone_in_m_and_below_power_of_two() {
        let mut table = CountTable::new();
        for n in 1..=24u64 {
            let mut prev = BigUint::zero();
            for m in 0..=n {
                let cur = table.count(m, n).clone();
                assert!(prev <= cur, "S({m},{n}) not monotone");
                prev = cur;
            }
            let all = table.count_all(n).clone();
            assert!(prev <= all);
            assert!(all < (BigUint::one() << n), "S(inf,{n}) >= 2^{n}");
        }
    }

    /// Independent oracle: decode every bit string of length `n` and count
    /// the terms whose free bound is at most `m`.
    fn brute_force(n: usize, m: u64) -> u64 {
        let mut found = 0;
        for pattern in 0..(1u64 << n) {
            let s: String = (0..n)
                .map(|b| if pattern >> (n - 1 - b) & 1 == 1 { '1' } else { '0' })
                .collect();
            let bs: BitString = s.parse().unwrap();
            if let Ok(t) = bs.decode() {
                if t.free_bound() <= m {
                    found += 1;
                }
            }
        }
        found
    }

    #[test]
    fn matches_brute_force_enumeration() {
        let mut table = CountTable::new();
        for n in 0..=14usize {
            for m in [0u64, 1, 2, 3] {
                let expected = brute_force(n, m);
                assert_eq!(
                    table.count(m, n as u64),
                    &BigUint::from(expected),
                    "S({m},{n}) vs brute force"
                );
            }
            let all = brute_force(n, u64::MAX);
            assert_eq!(table.count_all(n as u64), &BigUint::from(all));
        }
    }

    #[test]
    fn free_bound_parsing() {
        assert_eq!("inf".parse::<FreeBound>(), Ok(FreeBound::Unbounded));
        assert_eq!("0".parse::<FreeBound>(), Ok(FreeBound::AtMost(0)));
        assert_eq!("17".parse::<FreeBound>(), Ok(FreeBound::AtMost(17)));
        assert!("-1".parse::<FreeBound>().is_err());
        assert_eq!(FreeBound::Unbounded.resolve(12), 12);
        assert_eq!(FreeBound::AtMost(3).resolve(12), 3);
    }

    #[test]
    fn envelope_grows_incrementally() {
        let mut table = CountTable::new();
        let small = table.count(0, 10).clone();
        // widen in both directions afterwards; earlier entries must survive
        let wide = table.count(6, 24).clone();
        assert_eq!(table.count(0, 10), &small);
        assert_eq!(table.count(6, 24), &wide);
        assert_eq!(table.count(0, 4), &BigUint::one());
    }
}
