//! Extended binomial coefficients and the running-time exponent.
//!
//! `ext_binom(n, Δ, q)` counts monomials in `n` variables with per-variable
//! degree `< q` and total degree exactly `Δ`. Its cumulative version is the
//! size of the trimmed point set, and it is bounded by `q^{H(q,α) n}` for
//! `Δ = α(q-1)n`; the exponent `ζ_{q,d}` of the solver is built from `H`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::prime_power;

/// The row `Δ ↦ ext_binom(n, Δ, q)` for `Δ = 0..=n(q-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtBinomTable {
    pub n: usize,
    pub q: u32,
    pub row: Vec<BigUint>,
}

impl ExtBinomTable {
    /// Convolution of `n` copies of the uniform step `{0, ..., q-1}`.
    pub fn new(n: usize, q: u32) -> Result<ExtBinomTable> {
        if q < 2 {
            return Err(Error::Range(format!("q = {q} < 2")));
        }
        let step = q as usize - 1;
        let mut row = vec![BigUint::one()];
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); row.len() + step];
            // Sliding window sum of width q.
            let mut window = BigUint::zero();
            for (k, slot) in next.iter_mut().enumerate() {
                if k < row.len() {
                    window += &row[k];
                }
                if k > step {
                    window -= &row[k - step - 1];
                }
                *slot = window.clone();
            }
            row = next;
        }
        Ok(ExtBinomTable { n, q, row })
    }

    pub fn max_degree(&self) -> usize {
        self.row.len() - 1
    }

    /// Number of monomials of total degree at most `delta` (0 for negative `delta`).
    pub fn cumulative(&self, delta: i64) -> BigUint {
        if delta < 0 {
            return BigUint::zero();
        }
        let top = (delta as usize).min(self.max_degree());
        self.row[..=top].iter().sum()
    }
}

pub fn ext_binom(n: usize, delta: usize, q: u32) -> Result<BigUint> {
    let table = ExtBinomTable::new(n, q)?;
    if delta > table.max_degree() {
        return Err(Error::Range(format!(
            "degree {delta} exceeds n(q-1) = {}",
            table.max_degree()
        )));
    }
    Ok(table.row[delta].clone())
}

pub fn ext_binom_cum(n: usize, delta: i64, q: u32) -> Result<BigUint> {
    Ok(ExtBinomTable::new(n, q)?.cumulative(delta))
}

const THETA_MIN: f64 = -50.0;
const THETA_MAX: f64 = -1e-12;
const TOLERANCE: f64 = 1e-10;

/// Minimizes a function on `[lo, hi]`: grid scan, then golden-section search
/// in the bracket around the best grid point.
fn minimize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    let at = |i: usize| lo + (hi - lo) * i as f64 / grid as f64;
    let best = (0..=grid)
        .map(|i| (i, f(at(i))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;
    let (mut a, mut b) = (at(best.saturating_sub(1)), at((best + 1).min(grid)));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    let mut out = (x, f(x));
    for cand in [at(best), lo, hi] {
        let v = f(cand);
        if v < out.1 {
            out = (cand, v);
        }
    }
    out
}

/// `H(q, α)` for `α ∈ [0, 1/2]`, with `H(q, 0) = 0`.
fn entropy_h_unchecked(q: u32, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    let lq = (q as f64).ln();
    let objective = |theta: f64| {
        let s = theta * lq / (q as f64 - 1.0);
        // (1 - x^q)/(1 - x) with x = e^s, in a form that is stable near s = 0.
        let ratio = (-(q as f64 * s).exp_m1()).ln() - (-s.exp_m1()).ln();
        -alpha * theta + ratio / lq
    };
    minimize(objective, THETA_MIN, THETA_MAX, 400).1.clamp(0.0, 1.0)
}

/// `H(q, α) = inf_{θ<0} (-αθ + log_q((1 - q^{θq/(q-1)}) / (1 - q^{θ/(q-1)})))`.
///
/// For `q = 2` this is the binary entropy of `α`.
pub fn entropy_h(q: u32, alpha: f64) -> Result<f64> {
    if q < 2 || !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Range(format!(
            "entropy needs q >= 2 and 0 < alpha < 1/2, got q = {q}, alpha = {alpha}"
        )));
    }
    Ok(entropy_h_unchecked(q, alpha))
}

/// `I(q-1, α) = (1 - H(q, α)) ln q`, the gap to exhaustive search.
pub fn gap_i(q_minus_1: u32, alpha: f64) -> Result<f64> {
    let q = q_minus_1 + 1;
    Ok((1.0 - entropy_h(q, alpha)?) * (q as f64).ln())
}

/// `I*_α = sup_{θ<0} (αθ - ln((e^θ - 1)/θ))`, the limit of `I(q-1, α)` as `q → ∞`.
pub fn i_star(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Range(format!("need 0 < alpha < 1/2, got {alpha}")));
    }
    let neg = |theta: f64| -(alpha * theta - (theta.exp_m1() / theta).ln());
    Ok(-minimize(neg, -500.0, -1e-9, 2000).1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentReport {
    pub q: u32,
    pub d: u32,
    pub kappa_star: Rational64,
    pub zeta: f64,
    pub guaranteed_bound: f64,
}

/// `1 - min(1/(8 ln q), 1/(4d))`
pub fn guaranteed_bound(q: u32, d: u32) -> f64 {
    1.0 - (1.0 / (8.0 * (q as f64).ln())).min(1.0 / (4.0 * d as f64))
}

const DELTA_GRID: usize = 4000;
const KAPPA_RESOLUTION: f64 = 1e-5;

/// `ζ_{q,d}(κ) = max(1 - κ, sup_{0≤δ≤κ} H(q, δ(d-1)/(1-δ)) (1-δ))`.
pub fn zeta_kappa(q: u32, d: u32, kappa: f64) -> f64 {
    Curve::new(q, d, kappa).zeta(kappa)
}

/// [`zeta_kappa`] at many points, sharing one tabulation of the inner supremum.
pub fn zeta_curve(q: u32, d: u32, kappas: &[f64]) -> Vec<f64> {
    let top = kappas.iter().cloned().fold(0.0, f64::max);
    let curve = Curve::new(q, d, top.max(f64::MIN_POSITIVE));
    kappas.iter().map(|&k| curve.zeta(k)).collect()
}

/// `δ ↦ H(q, α(δ))(1 - δ)` tabulated on `[0, κ_max]`.
struct Curve {
    q: u32,
    d: u32,
    top: f64,
    prefix_max: Vec<f64>,
}

impl Curve {
    fn new(q: u32, d: u32, top: f64) -> Curve {
        let mut prefix_max = Vec::with_capacity(DELTA_GRID + 1);
        let mut best: f64 = 0.0;
        for i in 0..=DELTA_GRID {
            let delta = top * i as f64 / DELTA_GRID as f64;
            best = best.max(Curve::inner(q, d, delta));
            prefix_max.push(best);
        }
        Curve { q, d, top, prefix_max }
    }

    fn inner(q: u32, d: u32, delta: f64) -> f64 {
        let alpha = (delta * (d as f64 - 1.0) / (1.0 - delta)).min(0.5);
        entropy_h_unchecked(q, alpha) * (1.0 - delta)
    }

    fn sup(&self, kappa: f64) -> f64 {
        let i = ((kappa / self.top) * DELTA_GRID as f64).floor() as usize;
        let grid = self.prefix_max[i.min(DELTA_GRID)];
        grid.max(Curve::inner(self.q, self.d, kappa))
    }

    fn zeta(&self, kappa: f64) -> f64 {
        (1.0 - kappa).max(self.sup(kappa))
    }
}

/// Minimizes `ζ_{q,d}(κ)` over `0 < κ < 1/(2d-1)`.
///
/// The first branch decreases in `κ` and the second is nondecreasing, so the
/// minimum sits at their crossing (or at the right end of the interval when
/// they never cross, as for `d = 1`).
pub fn zeta(q: u32, d: u32) -> Result<ExponentReport> {
    if prime_power(q as u64).is_none() || d == 0 {
        return Err(Error::Range(format!(
            "need a prime power q and d >= 1, got q = {q}, d = {d}"
        )));
    }
    // Resolution relative to the interval: for large d the whole interval is
    // only ~1/(2d) wide.
    let top = 1.0 / (2.0 * d as f64 - 1.0);
    let step = top * KAPPA_RESOLUTION;
    let hi = top - step;
    let curve = Curve::new(q, d, hi);
    let crosses = |k: f64| curve.sup(k) >= 1.0 - k;
    let kappa = if !crosses(hi) {
        hi
    } else {
        let (mut a, mut b) = (step, hi);
        while b - a > step / 10.0 {
            let mid = (a + b) / 2.0;
            if crosses(mid) {
                b = mid;
            } else {
                a = mid;
            }
        }
        // The crossing lies in [a, b]; take the better endpoint.
        if curve.zeta(a) <= curve.zeta(b) {
            a
        } else {
            b
        }
    };
    let scaled = (kappa * 1e12).round() as i64;
    Ok(ExponentReport {
        q,
        d,
        kappa_star: Rational64::new(scaled, 1_000_000_000_000),
        zeta: curve.zeta(kappa),
        guaranteed_bound: guaranteed_bound(q, d),
    })
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// CSV with header `q,d,kappa_star,zeta,theorem1_bound` for every prime
/// power `q ≤ qmax` and `d ≤ dmax`.
pub fn exponent_table_csv(qmax: u32, dmax: u32) -> Result<String> {
    let mut out = String::from("q,d,kappa_star,zeta,theorem1_bound\n");
    for q in 2..=qmax {
        if prime_power(q as u64).is_none() {
            continue;
        }
        for d in 1..=dmax {
            let r = zeta(q, d)?;
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6}",
                r.q,
                r.d,
                rational_to_f64(r.kappa_star),
                r.zeta,
                r.guaranteed_bound
            )
            .unwrap();
        }
    }
    Ok(out)
}
