//! Boltzmann samplers for terms.
//!
//! Under the Boltzmann model with parameter `x`, a term `t` is drawn with
//! probability `x^|t| / S(x)` where `S` is the generating function of the
//! term counts, so terms of equal size are equally likely. The closed form
//!
//! ```text
//! S(x) = ((1-x)(1-x^2) - sqrt((1-x) R(x))) / (2 x^2 (1-x))
//! ```
//!
//! with `R` the radical polynomial from [`crate::analytic`] converges on
//! `(0, rho]`. A sampler draw picks index / abstraction / application with
//! probabilities `x^2/((1-x) S(x))`, `x^2`, `x^2 S(x)`, recursing for the
//! subterms; index values themselves are geometric. Expected output size
//! is `E_x = x S'(x) / S(x)`, increasing in `x` and diverging at `rho`, so
//! `tune` can hit any requested mean by bisection. At `x = rho` the
//! sampler still terminates almost surely but has infinite mean size.

use std::sync::OnceLock;

use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::analytic::{self, Polynomial};
use crate::counting::CountTable;
use crate::term::{fold_complete, BuildFrame, Term};

/// Seedable stream of uniform doubles in (0, 1) and raw words.
///
/// Backed by ChaCha8, whose output stream is stable across platforms and
/// releases: the same seed always yields the same samples.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> RandomSource {
        RandomSource { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform in the open interval (0, 1), 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        loop {
            let v = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if v > 0.0 {
                return v;
            }
        }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoltzmannError {
    #[error("parameter x = {x} outside the domain (0, {rho}]")]
    Domain { x: f64, rho: f64 },
    #[error("no term in the requested size window after {attempts} attempts")]
    AttemptsExhausted { attempts: u64 },
}

/// The closed form is ill-conditioned near 0 (it cancels to O(x^2)), so
/// below this threshold the series does the work instead.
const SERIES_SWITCH: f64 = 0.05;
const SERIES_TERMS: u64 = 60;

fn series_coeffs() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut table = CountTable::new();
        (0..=SERIES_TERMS)
            .map(|n| table.count_all(n).to_f64().expect("count fits f64"))
            .collect()
    })
}

struct GfPolys {
    p: [Polynomial; 3],
    /// Radicand cofactor: `(1-x) R(x) = (rho - x) * d(x)` after deflating
    /// the root at `rho`, so the radical vanishes exactly there instead of
    /// amplifying the root's floating-point residual through the sqrt.
    d: [Polynomial; 3],
    r: [Polynomial; 3],
}

/// Divides `q` by `(root - z)`, dropping the eps-sized remainder.
fn deflate(q: &Polynomial, root: f64) -> Polynomial {
    let qc = q.coeffs();
    let deg = qc.len() - 1;
    let mut d = vec![0.0; deg];
    d[deg - 1] = -qc[deg];
    for i in (1..deg).rev() {
        d[i - 1] = root * d[i] - qc[i];
    }
    Polynomial::new(d)
}

fn gf_polys() -> &'static GfPolys {
    static POLYS: OnceLock<GfPolys> = OnceLock::new();
    POLYS.get_or_init(|| {
        let with_derivs = |p: Polynomial| {
            let d = p.derivative();
            let dd = d.derivative();
            [p, d, dd]
        };
        let one_minus_z = Polynomial::new(vec![1.0, -1.0]);
        let radicand = one_minus_z.mul(&analytic::r_infinity());
        GfPolys {
            p: with_derivs(one_minus_z.mul(&Polynomial::new(vec![1.0, 0.0, -1.0]))),
            d: with_derivs(deflate(&radicand, analytic::dominant_singularity())),
            r: with_derivs(Polynomial::new(vec![0.0, 0.0, 2.0, -2.0])),
        }
    })
}

fn check_domain(x: f64) -> Result<f64, BoltzmannError> {
    let rho = analytic::dominant_singularity();
    if x.is_finite() && x > 0.0 && x <= rho {
        Ok(rho)
    } else {
        Err(BoltzmannError::Domain { x, rho })
    }
}

/// Value and first two derivatives of the generating function at `x`.
fn gf_parts(x: f64) -> (f64, f64, f64) {
    if x < SERIES_SWITCH {
        // truncation error is below (x/rho)^61, under 1e-60 here
        let a = series_coeffs();
        let mut v = 0.0;
        let mut d = 0.0;
        let mut dd = 0.0;
        for n in (2..=SERIES_TERMS as usize).rev() {
            v = v * x + a[n];
            d = d * x + n as f64 * a[n];
            dd = dd * x + (n * (n - 1)) as f64 * a[n];
        }
        return (v * x * x, d * x, dd);
    }
    let polys = gf_polys();
    let [p, pd, pdd] = &polys.p;
    let [c, cd, cdd] = &polys.d;
    let [r, rd, rdd] = &polys.r;
    let gap = analytic::dominant_singularity() - x;
    let (cv, cdv, cddv) = (c.eval(x), cd.eval(x), cdd.eval(x));
    let qv = (gap * cv).max(0.0);
    let sq = qv.sqrt();
    let qdv = gap * cdv - cv;
    let qddv = gap * cddv - 2.0 * cdv;
    let n = p.eval(x) - sq;
    // d/dx sqrt(q) = q'/(2 sqrt(q)); one more quotient rule for the second
    let nd = pd.eval(x) - qdv / (2.0 * sq);
    let ndd = pdd.eval(x) - (qddv / (2.0 * sq) - qdv * qdv / (4.0 * qv * sq));
    let (rv, rdv, rddv) = (r.eval(x), rd.eval(x), rdd.eval(x));
    let value = n / rv;
    let deriv = nd / rv - n * rdv / (rv * rv);
    let deriv2 = ndd / rv - 2.0 * nd * rdv / (rv * rv) - n * rddv / (rv * rv)
        + 2.0 * n * rdv * rdv / (rv * rv * rv);
    (value, deriv, deriv2)
}

/// The generating function `S(x)` in closed form, for `0 < x <= rho`.
/// At `x = rho` this equals `(1 - rho^2) / (2 rho^2)`.
pub fn s_infinity_gf(x: f64) -> Result<f64, BoltzmannError> {
    check_domain(x)?;
    Ok(gf_parts(x).0)
}

/// Mean size `E_x = x S'(x) / S(x)` of a free sampler draw, `0 < x < rho`.
pub fn expected_size(x: f64) -> Result<f64, BoltzmannError> {
    let rho = check_domain(x)?;
    if x >= rho {
        // the mean diverges at the singularity
        return Err(BoltzmannError::Domain { x, rho });
    }
    let (v, d, _) = gf_parts(x);
    Ok(x * d / v)
}

/// Standard deviation of the output size, `0 < x < rho`.
pub fn std_dev(x: f64) -> Result<f64, BoltzmannError> {
    let rho = check_domain(x)?;
    if x >= rho {
        return Err(BoltzmannError::Domain { x, rho });
    }
    let (v, d, dd) = gf_parts(x);
    let mean = x * d / v;
    let second_moment = (x * x * dd + x * d) / v;
    Ok((second_moment - mean * mean).sqrt())
}

/// Finds `x` with `E_x = target_mean` by bisection; the mean is
/// increasing in `x`, from 2 at `0+` to infinity at `rho`.
///
/// Panics if the target is not a finite number >= 2. Targets beyond
/// roughly 10^6 exceed what f64 resolution near `rho` can express; the
/// result then saturates just below `rho`.
pub fn tune(target_mean: f64) -> f64 {
    assert!(
        target_mean.is_finite() && target_mean >= 2.0,
        "target mean must be a finite number >= 2, got {target_mean}"
    );
    let rho = analytic::dominant_singularity();
    let mut lo = 1e-9;
    let mut hi = rho - 1e-13;
    let expect = |x: f64| {
        let (v, d, _) = gf_parts(x);
        x * d / v
    };
    if expect(hi) <= target_mean {
        return hi;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if expect(mid) < target_mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Branch probabilities of the sampler at parameter `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerParams {
    pub x: f64,
    pub p_var: f64,
    pub p_abs: f64,
    pub p_app: f64,
    /// Cumulative threshold: draw < p1 picks an index.
    pub p1: f64,
    /// Cumulative threshold: p1 <= draw < p2 picks an abstraction.
    pub p2: f64,
}

impl SamplerParams {
    /// `p_var = x^2 / ((1-x) S(x))`, `p_abs = x^2`, `p_app = x^2 S(x)`;
    /// they sum to 1 by the defining equation of `S`. At `x = rho`,
    /// `p_var = p_app = (1 - rho^2) / 2`.
    pub fn new(x: f64) -> Result<SamplerParams, BoltzmannError> {
        let gf = s_infinity_gf(x)?;
        let p_var = x * x / ((1.0 - x) * gf);
        let p_abs = x * x;
        let p_app = x * x * gf;
        Ok(SamplerParams { x, p_var, p_abs, p_app, p1: p_var, p2: p_var + p_abs })
    }

    /// Parameters at the singularity: the heavy-tailed regime for
    /// arbitrarily large terms.
    pub fn at_singularity() -> SamplerParams {
        SamplerParams::new(analytic::dominant_singularity()).expect("rho is in the domain")
    }
}

/// Mean and spread of the size distribution a tuned sampler targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerStats {
    pub target_mean: f64,
    pub expected_size: f64,
    pub std_dev: f64,
}

impl SamplerStats {
    /// Tunes for `target_mean` and reports the achieved moments.
    pub fn for_target(target_mean: f64) -> (f64, SamplerStats) {
        let x = tune(target_mean);
        let stats = SamplerStats {
            target_mean,
            expected_size: expected_size(x).expect("tuned x is below rho"),
            std_dev: std_dev(x).expect("tuned x is below rho"),
        };
        (x, stats)
    }
}

/// Geometric index draw: returns `i >= 1` with probability `(1-x) x^(i-1)`.
pub fn sample_index(x: f64, rng: &mut RandomSource) -> u64 {
    debug_assert!(x > 0.0 && x < 1.0);
    let mut i = 1u64;
    while rng.next_f64() < x {
        i += 1;
    }
    i
}

/// One draw from the Boltzmann distribution: `P(t) = x^|t| / S(x)`.
/// Terminates with probability 1 for `x <= rho`; at `x = rho` the output
/// size has infinite mean, so occasional huge terms are expected.
///
/// Construction is iterative with an explicit frontier; output size is
/// bounded only by memory.
pub fn sample_free(params: &SamplerParams, rng: &mut RandomSource) -> Term {
    let mut frames: Vec<BuildFrame> = Vec::new();
    loop {
        let u = rng.next_f64();
        let leaf = if u < params.p1 {
            Term::Index(sample_index(params.x, rng))
        } else if u < params.p2 {
            frames.push(BuildFrame::Abs);
            continue;
        } else {
            frames.push(BuildFrame::AppFun);
            continue;
        };
        if let Some(done) = fold_complete(&mut frames, leaf) {
            return done;
        }
    }
}

fn sample_ceiled_with_size(
    params: &SamplerParams,
    uplimit: u64,
    rng: &mut RandomSource,
) -> Option<(Term, u64)> {
    let mut frames: Vec<BuildFrame> = Vec::new();
    let mut remaining = uplimit;
    loop {
        let u = rng.next_f64();
        let leaf = if u < params.p1 {
            // abandon the geometric draw as soon as the index cannot fit;
            // conditioned on success this consumes the same randomness as
            // drawing the full index and then checking
            let mut i = 1u64;
            loop {
                if i + 1 > remaining {
                    return None;
                }
                if rng.next_f64() < params.x {
                    i += 1;
                } else {
                    break;
                }
            }
            remaining -= i + 1;
            Term::Index(i)
        } else if u < params.p2 {
            if remaining < 2 {
                return None;
            }
            remaining -= 2;
            frames.push(BuildFrame::Abs);
            continue;
        } else {
            if remaining < 2 {
                return None;
            }
            remaining -= 2;
            frames.push(BuildFrame::AppFun);
            continue;
        };
        if let Some(done) = fold_complete(&mut frames, leaf) {
            return Some((done, uplimit - remaining));
        }
    }
}

/// Boltzmann draw with a size ceiling: aborts (returns `None`) as soon as
/// the running size budget is exceeded. Conditioned on success the output
/// follows the free sampler's distribution restricted to sizes
/// `<= uplimit`, because both reject exactly the trajectories whose term
/// would outgrow the ceiling.
pub fn sample_ceiled(params: &SamplerParams, uplimit: u64, rng: &mut RandomSource) -> Option<Term> {
    sample_ceiled_with_size(params, uplimit, rng).map(|(t, _)| t)
}

/// Retries `sample_ceiled(hi)` until the output size is at least `lo`.
/// Within each exact size the output stays uniform.
///
/// Panics if `lo > hi`; returns `AttemptsExhausted` after `max_attempts`
/// draws without a hit, which signals an infeasible or far-off window.
pub fn sample_window(
    params: &SamplerParams,
    lo: u64,
    hi: u64,
    rng: &mut RandomSource,
    max_attempts: u64,
) -> Result<Term, BoltzmannError> {
    assert!(lo <= hi, "window lower bound {lo} exceeds upper bound {hi}");
    for _ in 0..max_attempts {
        if let Some((t, size)) = sample_ceiled_with_size(params, hi, rng) {
            if size >= lo {
                return Ok(t);
            }
        }
    }
    Err(BoltzmannError::AttemptsExhausted { attempts: max_attempts })
}
