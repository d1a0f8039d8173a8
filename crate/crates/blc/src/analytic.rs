//! Numerics for the counting sequence's growth law.
//!
//! The generating function of `S(inf, n)` has its dominant singularity at
//! the unique root `rho` of `R(z) = 1 - z - 2z^2 + 2z^3 - 3z^4 - z^5` in
//! (0, 1). The sequence grows like `rho^-n * C * n^(-3/2)`; this module
//! computes `rho`, the constant `C`, and the convergence data
//! `S(m, n) * rho^n * n^(3/2)` backing that claim.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::counting::CountTable;

/// Real polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trims trailing zero coefficients; the zero polynomial keeps a
    /// single zero entry.
    pub fn new(mut coeffs: Vec<f64>) -> Polynomial {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| i as f64 * c)
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}

/// `R(z) = 1 - z - 2z^2 + 2z^3 - 3z^4 - z^5`, the polynomial under the
/// radical of the closed-form generating function (up to a `1 - z`
/// factor). Its root in (0, 1) is the radius of convergence.
pub fn r_infinity() -> Polynomial {
    Polynomial::new(vec![1.0, -1.0, -2.0, 2.0, -3.0, -1.0])
}

fn bisect_sign_change(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    // f(lo) > 0 >= f(hi); bisection to f64 resolution
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// The radius of convergence `rho = 0.509308127...`; `1/rho = 1.963447954...`
/// is the exponential growth rate of the number of terms.
pub fn dominant_singularity() -> f64 {
    static RHO: OnceLock<f64> = OnceLock::new();
    *RHO.get_or_init(|| {
        let r = r_infinity();
        // the unique root in (0, 1) lies in [0.4, 0.6]: R(0.4) > 0 > R(0.6)
        bisect_sign_change(|x| r.eval(x), 0.4, 0.6)
    })
}

/// `Gamma(-1/2) = -2 sqrt(pi)`, the only Gamma value the growth law needs.
pub fn gamma_minus_half() -> f64 {
    -2.0 * std::f64::consts::PI.sqrt()
}

/// The constants of the growth law `S(inf, n) ~ rho^-n * c * n^(-3/2)`.
///
/// Returns `(c_tilde, c)`. Near `rho` the generating function behaves like
/// `gf(rho) - a * sqrt(1 - z/rho)` where `a = sqrt(rho * q) / (2 rho^2)`
/// and `q` is the value at `rho` of the radicand cofactor
/// `R(z) / ((1 - z)(rho - z))`, a removable singularity evaluated as
/// `-R'(rho) / (1 - rho)`. Singularity transfer turns the square root into
/// `c = a / (2 sqrt(pi))`; `c_tilde = c / Gamma(-1/2)` is the same
/// constant in its Gamma-scaled form.
pub fn asymptotic_constant() -> (f64, f64) {
    let rho = dominant_singularity();
    let q = -r_infinity().derivative().eval(rho) / (1.0 - rho);
    let amplitude = (rho * q).sqrt() / (2.0 * rho * rho);
    let c = amplitude / (2.0 * std::f64::consts::PI.sqrt());
    let c_tilde = c / gamma_minus_half();
    (c_tilde, c)
}

/// `log2` of a big integer, good to ~1e-13 relative error.
fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 53 {
        v.to_f64().expect("small BigUint converts").log2()
    } else {
        let shift = bits - 53;
        let top = (v >> shift).to_f64().expect("53-bit BigUint converts");
        top.log2() + shift as f64
    }
}

/// `count * rho^n * n^(3/2)` as a float, computed in log space so that
/// counts with hundreds of digits cannot overflow.
pub fn scaled_count(count: &BigUint, n: u64) -> f64 {
    if count.is_zero() {
        return 0.0;
    }
    let rho = dominant_singularity();
    let log2 = log2_big(count) + n as f64 * rho.log2() + 1.5 * (n as f64).log2();
    log2.exp2()
}

/// `S(inf, n) * rho^n * n^(3/2)`, which tends to the constant `c` of
/// `asymptotic_constant` with an O(1/n) correction.
pub fn growth_ratio(table: &mut CountTable, n: u64) -> f64 {
    assert!(n >= 1, "growth ratio needs n >= 1");
    scaled_count(table.count_all(n), n)
}

/// Rows `(m, n, S(m, n) * rho^n * n^(3/2))` for `m = 0..=m_max`,
/// `n = 1..=n_max`; the data behind the bounded-free-indices growth plots.
pub fn ratio_table(table: &mut CountTable, m_max: u64, n_max: u64) -> Vec<(u64, u64, f64)> {
    table.materialize(m_max, n_max);
    let mut rows = Vec::with_capacity((m_max as usize + 1) * n_max as usize);
    for m in 0..=m_max {
        for n in 1..=n_max {
            rows.push((m, n, scaled_count(table.get(m, n), n)));
        }
    }
    rows
}

/// `P_m(z) = 4 z^4 (1 - z^m) - (1 - z)^3 (1 + z)^2`, whose smallest
/// positive root `sigma_m` bounds the singularity analysis of the
/// fixed-`m` classes; `P_m = P_inf - 4 z^(m+4)` with `P_inf = -R`.
pub fn family_polynomial(m: u64) -> Polynomial {
    let p_inf = [-1.0, 1.0, 2.0, -2.0, 3.0, 1.0];
    let top = (m + 4) as usize;
    let mut coeffs = vec![0.0; top.max(5) + 1];
    for (i, c) in p_inf.iter().enumerate() {
        coeffs[i] += c;
    }
    coeffs[top] -= 4.0;
    Polynomial::new(coeffs)
}

/// The smallest positive root `sigma_m` of `family_polynomial(m)`.
/// `sigma_0 = 1` (a triple root); for `m >= 1` the root lies in
/// `(rho, 1)`, found by a forward scan and bisection. The sequence
/// decreases in `m` and tends to `rho`.
pub fn family_root(m: u64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let p = family_polynomial(m);
    let rho = dominant_singularity();
    // P_m(rho) = -4 rho^(m+4) < 0; walk right to the first sign change
    let mut lo = rho;
    let mut hi = lo + 1e-3;
    while hi < 1.0 && p.eval(hi) < 0.0 {
        lo = hi;
        hi += 1e-3;
    }
    let hi = hi.min(1.0);
    bisect_sign_change(|x| -p.eval(x), lo, hi)
}

/// Everything the growth-law check needs, in one bundle.
#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    pub rho: f64,
    pub inv_rho: f64,
    pub c_tilde: f64,
    pub c: f64,
    /// `(n, growth_ratio(n))` samples showing convergence toward `c`.
    pub convergence: Vec<(u64, f64)>,
}

pub fn report(table: &mut CountTable, check_ns: &[u64]) -> AsymptoticReport {
    let rho = dominant_singularity();
    let (c_tilde, c) = asymptotic_constant();
    let convergence = check_ns
        .iter()
        .map(|&n| (n, growth_ratio(table, n)))
        .collect();
    AsymptoticReport { rho, inv_rho: 1.0 / rho, c_tilde, c, convergence }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[allow(clippy::excessive_precision)]
    const RHO_REFERENCE: f64 = 0.509308127024237357194177485;

    #[test]
    fn dominant_singularity_matches_reference() {
        let rho = dominant_singularity();
        assert!((rho - RHO_REFERENCE).abs() < 1e-15, "rho = {rho}");
        assert!(r_infinity().eval(rho).abs() < 1e-12);
        assert!((1.0 / rho - 1.963447954).abs() < 1e-8);
    }

    #[test]
    fn all_three_real_roots_annihilate_r() {
        let r = r_infinity();
        for root in [0.509308127, -0.623845142, -3.668100004] {
            assert!(r.eval(root).abs() < 1e-6, "R({root}) = {}", r.eval(root));
        }
    }

    #[test]
    fn asymptotic_constants() {
        let (c_tilde, c) = asymptotic_constant();
        assert!((c_tilde - -0.288265354).abs() < 1e-8, "c_tilde = {c_tilde}");
        assert!((c - 1.021874073).abs() < 1e-8, "c = {c}");
        assert!(c_tilde < 0.0 && c > 0.0);
    }

    #[test]
    fn growth_ratio_converges_to_c() {
        let mut table = CountTable::new();
        let (_, c) = asymptotic_constant();
        assert!((growth_ratio(&mut table, 50) - c).abs() / c < 0.05);
        // successive deviations shrink toward zero
        let deviations: Vec<f64> = [100u64, 200, 400, 600]
            .iter()
            .map(|&n| (growth_ratio(&mut table, n) - c).abs())
            .collect();
        assert!(deviations.windows(2).all(|w| w[1] < w[0]), "{deviations:?}");
    }

    #[test]
    fn scaled_count_handles_huge_values() {
        let mut table = CountTable::new();
        let rho = dominant_singularity();
        let direct = 27.0 * rho.powi(10) * 1000.0f64.sqrt();
        let via_log = scaled_count(&BigUint::from(27u32), 10);
        assert!((via_log - direct).abs() / direct < 1e-12);
        // S(inf, 600) has ~176 digits; the log-space path must stay finite
        let big = table.count_all(600).clone();
        let r = scaled_count(&big, 600);
        assert!(r.is_finite() && r > 0.9 && r < 1.1, "ratio(600) = {r}");
    }

    #[test]
    fn ratio_table_values() {
        let mut table = CountTable::new();
        let rows = ratio_table(&mut table, 2, 6);
        let rho = dominant_singularity();
        let lookup = |m: u64, n: u64| {
            rows.iter().find(|r| r.0 == m && r.1 == n).map(|r| r.2).unwrap()
        };
        // S(0,4) = 1, so the row is rho^4 * 4^(3/2) = 0.538285...
        assert!((lookup(0, 4) - 8.0 * rho.powi(4)).abs() < 1e-9);
        assert!((lookup(0, 4) - 0.5383).abs() < 1e-3);
        for n in 1..=3u64 {
            assert_eq!(lookup(0, n), 0.0, "S(0,{n}) = 0 row");
        }
        // at fixed n, rows do not decrease with m
        for n in 1..=6u64 {
            assert!(lookup(0, n) <= lookup(1, n) && lookup(1, n) <= lookup(2, n));
        }
    }

    #[test]
    fn family_polynomials() {
        // P_0 = -(1-z)^3 (1+z)^2: the 4z^4 (1 - z^0) term vanishes
        assert_eq!(
            family_polynomial(0).coeffs(),
            &[-1.0, 1.0, 2.0, -2.0, -1.0, 1.0]
        );
        // P_m = P_inf - 4 z^(m+4), coefficient by coefficient
        for m in 1..=20u64 {
            let p = family_polynomial(m);
            let mut expected = vec![0.0; (m + 4) as usize + 1];
            expected[..6].copy_from_slice(&[-1.0, 1.0, 2.0, -2.0, 3.0, 1.0]);
            expected[(m + 4) as usize] -= 4.0;
            assert_eq!(p.coeffs(), &expected[..], "m = {m}");
        }
    }

    #[test]
    fn family_roots_decrease_to_rho() {
        let rho = dominant_singularity();
        // sigma_1 is the positive root of P_inf - 4z^5, which is 1/sqrt(3)
        assert!((family_root(1) - 1.0 / 3.0f64.sqrt()).abs() < 1e-9);
        let sigmas: Vec<f64> = (1..=20).map(family_root).collect();
        assert!(sigmas.windows(2).all(|w| w[0] > w[1]), "{sigmas:?}");
        assert!(sigmas.iter().all(|&s| s > rho && s < 1.0));
        assert!((family_root(100) - rho).abs() < 1e-3);
    }

    #[test]
    fn polynomial_basics() {
        let p = Polynomial::new(vec![1.0, 2.0, 3.0, 0.0]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(2.0), 1.0 + 4.0 + 12.0);
        assert_eq!(p.derivative().coeffs(), &[2.0, 6.0]);
        let one_minus_z = Polynomial::new(vec![1.0, -1.0]);
        let q = one_minus_z.mul(&r_infinity());
        assert_eq!(q.coeffs(), &[1.0, -2.0, -1.0, 4.0, -5.0, 2.0, 1.0]);
    }

    #[test]
    fn report_bundles_everything() {
        let mut table = CountTable::new();
        let rep = report(&mut table, &[50, 100]);
        assert_eq!(rep.convergence.len(), 2);
        assert!((rep.rho * rep.inv_rho - 1.0).abs() < 1e-15);
        assert!((rep.c / rep.c_tilde - gamma_minus_half()).abs() < 1e-9);
    }
}
