//! Helpers shared by the statistical unit tests.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::counting::CountTable;
use crate::term::Term;
use crate::unrank::unrank;

/// Pearson chi-square statistic for observed counts against expectations.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Two-sample chi-square on category counts; returns (statistic, df).
pub fn two_sample_chi_square(a: &[u64], b: &[u64]) -> (f64, usize) {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let ka = (nb as f64 / na as f64).sqrt();
    let kb = (na as f64 / nb as f64).sqrt();
    let mut stat = 0.0;
    let mut categories = 0;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        categories += 1;
        let d = ka * x as f64 - kb * y as f64;
        stat += d * d / (x + y) as f64;
    }
    (stat, categories - 1)
}

/// Upper 1% critical values of the chi-square distribution.
pub fn chi_square_crit_01(df: usize) -> f64 {
    match df {
        1 => 6.63490,
        2 => 9.21034,
        3 => 11.34487,
        4 => 13.27670,
        5 => 15.08627,
        8 => 20.09024,
        9 => 21.66599,
        10 => 23.20925,
        12 => 26.21697,
        24 => 42.97982,
        other => panic!("no tabulated critical value for df = {other}"),
    }
}

/// All terms of size `n` with at most `m` free indices, in rank order.
pub fn enumerate_class(table: &mut CountTable, m: u64, n: u64) -> Vec<Term> {
    let total = table.count(m, n).to_u64().expect("class small enough to list");
    (1..=total)
        .map(|k| unrank(table, m, n, &BigUint::from(k)).expect("rank in range"))
        .collect()
}
