//! The rank/unrank bijection between `{1..S(m,n)}` and the terms of size
//! `n` with at most `m` distinct free indices, and exact-size uniform
//! samplers built on top of it.
//!
//! Rank layout, highest case first: for `m >= n-1` the top rank `S(m,n)`
//! is the bare index `n-1`; ranks `1..=S(m+1,n-2)` are abstractions,
//! unranked recursively at `(m+1, n-2)`; the remaining ranks are
//! applications, grouped by function size `j = 0, 1, 2, ...` and laid out
//! within a `(j, n-2-j)` block with the function rank varying slowest.
//!
//! `unrank` and `rank` recurse to depth at most `n/2`. Sizes beyond a few
//! thousand are dominated by the counting table long before that depth
//! threatens any reasonable machine stack.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::boltzmann::RandomSource;
use crate::counting::CountTable;
use crate::term::Term;
use crate::types;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no term of size {n} has at most {m} free indices")]
    EmptyClass { m: u64, n: u64 },
    #[error("rank {k} outside 1..={max}")]
    RankOutOfRange { k: BigUint, max: BigUint },
    #[error("term has free bound {found}, above the requested m = {m}")]
    FreeBoundExceeded { found: u64, m: u64 },
    #[error("no typable term of size {n} with at most {m} free indices")]
    NoTypableTerm { m: u64, n: u64 },
}

/// The `k`-th (1-based) term of size `n` with at most `m` free indices.
pub fn unrank(table: &mut CountTable, m: u64, n: u64, k: &BigUint) -> Result<Term, GenError> {
    table.materialize(m, n);
    let total = table.get(m, n);
    if total.is_zero() {
        return Err(GenError::EmptyClass { m, n });
    }
    if k.is_zero() || k > total {
        return Err(GenError::RankOutOfRange { k: k.clone(), max: total.clone() });
    }
    Ok(unrank_in(table, m, n, k.clone()))
}

/// Core of `unrank`; the table must cover `(m, n)` and `k` must be valid.
pub(crate) fn unrank_in(table: &CountTable, m: u64, n: u64, k: BigUint) -> Term {
    debug_assert!(n >= 2, "no terms below size 2");
    if m >= n - 1 && k == *table.get(m, n) {
        return Term::Index(n - 1);
    }
    let abstractions = table.get(m + 1, n - 2);
    if k <= *abstractions {
        return Term::abs(unrank_in(table, m + 1, n - 2, k));
    }
    let mut rest = k - abstractions;
    let mut j = 0u64;
    loop {
        let right = table.get(m, n - 2 - j);
        let block = table.get(m, j) * right;
        if !block.is_zero() && rest <= block {
            let (q, r) = (rest - 1u32).div_rem(right);
            return Term::app(
                unrank_in(table, m, j, q + 1u32),
                unrank_in(table, m, n - 2 - j, r + 1u32),
            );
        }
        rest -= block;
        j += 1;
        debug_assert!(j <= n - 2, "application blocks exhausted");
    }
}

/// The rank of `t` in the class `(m, size(t))`: the exact inverse of
/// `unrank` under the same layout.
pub fn rank(table: &mut CountTable, m: u64, t: &Term) -> Result<BigUint, GenError> {
    let found = t.free_bound();
    if found > m {
        return Err(GenError::FreeBoundExceeded { found, m });
    }
    table.materialize(m, t.size());
    Ok(rank_in(table, m, t).0)
}

fn rank_in(table: &CountTable, m: u64, t: &Term) -> (BigUint, u64) {
    match t {
        Term::Index(i) => (table.get(m, i + 1).clone(), i + 1),
        Term::Abs(body) => {
            let (k, body_size) = rank_in(table, m + 1, body);
            (k, body_size + 2)
        }
        Term::App(fun, arg) => {
            let (fun_rank, fun_size) = rank_in(table, m, fun);
            let (arg_rank, arg_size) = rank_in(table, m, arg);
            let n = fun_size + arg_size + 2;
            let mut k = table.get(m + 1, n - 2).clone();
            for j in 2..fun_size {
                k += table.get(m, j) * table.get(m, n - 2 - j);
            }
            k += (fun_rank - 1u32) * table.get(m, arg_size);
            k += arg_rank;
            (k, n)
        }
    }
}

/// Uniform draw from `1..=total`: rejection sampling on blocks of
/// `total.bits()` random bits, so no modulo bias.
fn draw_rank(total: &BigUint, rng: &mut RandomSource) -> BigUint {
    let bits = total.bits();
    let words = bits.div_ceil(32) as usize;
    let top_bits = (bits % 32) as u32;
    let mask = if top_bits == 0 { u32::MAX } else { (1u32 << top_bits) - 1 };
    loop {
        let mut digits = Vec::with_capacity(words);
        for w in 0..words {
            let mut d = rng.next_u32();
            if w == words - 1 {
                d &= mask;
            }
            digits.push(d);
        }
        let candidate = BigUint::new(digits);
        if candidate < *total {
            return candidate + 1u32;
        }
    }
}

/// A uniformly random term of size `n` with at most `m` free indices.
pub fn sample_uniform(
    table: &mut CountTable,
    m: u64,
    n: u64,
    rng: &mut RandomSource,
) -> Result<Term, GenError> {
    table.materialize(m, n);
    let total = table.get(m, n);
    if total.is_zero() {
        return Err(GenError::EmptyClass { m, n });
    }
    let k = draw_rank(total, rng);
    Ok(unrank_in(table, m, n, k))
}

/// A uniformly random simply-typable term of size `n` with at most `m`
/// free indices: rejection-sieves `sample_uniform` through the typability
/// check, which keeps the conditional distribution uniform.
///
/// The caller is expected to pick a class that contains typable terms.
/// As a backstop, a long run of rejections in a small class triggers one
/// exhaustive scan so that an empty typable subclass reports
/// `NoTypableTerm` instead of looping forever.
pub fn sample_uniform_typable(
    table: &mut CountTable,
    m: u64,
    n: u64,
    rng: &mut RandomSource,
) -> Result<Term, GenError> {
    table.materialize(m, n);
    let total = table.get(m, n).clone();
    if total.is_zero() {
        return Err(GenError::EmptyClass { m, n });
    }
    let mut failures = 0u32;
    let mut known_nonempty = false;
    loop {
        let k = draw_rank(&total, rng);
        let t = unrank_in(table, m, n, k);
        if types::is_typable(&t) {
            return Ok(t);
        }
        failures += 1;
        if !known_nonempty && failures >= 512 && total.bits() <= 20 {
            if types::count_typable_in(table, m, n).is_zero() {
                return Err(GenError::NoTypableTerm { m, n });
            }
            known_nonempty = true;
        }
    }
}
