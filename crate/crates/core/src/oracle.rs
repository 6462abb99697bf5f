//! Exhaustive ground truth: root counts, full sums and partial sums.
//!
//! Nothing here goes through the trimmed transform or the solver; partial
//! sums are interpolated with a per-variable Vandermonde inverse on the full
//! grid.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::mpoly::{Monomial, PolySystem, Polynomial};

/// Largest grid `count_common_roots` and `brute_z` will enumerate.
pub const ENUMERATION_LIMIT: u128 = 100_000_000;
/// Largest grid `brute_partial_sum` will enumerate.
pub const PARTIAL_SUM_LIMIT: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootCount {
    pub count: BigUint,
    pub n: usize,
    pub q: u32,
}

fn grid_size(q: u32, n: usize, limit: u128) -> Result<usize> {
    let mut size: u128 = 1;
    for _ in 0..n {
        size = size.saturating_mul(q as u128);
        if size > limit {
            return Err(Error::TooLarge { points: size, limit });
        }
    }
    Ok(size as usize)
}

/// Calls `visit` on every point of `F_q^n` in lexicographic order.
fn for_each_point(q: u32, n: usize, mut visit: impl FnMut(&[Elem])) {
    let mut x = vec![Elem::ZERO; n];
    loop {
        visit(&x);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            let next = x[i].index() + 1;
            if next < q {
                x[i] = Elem::from_raw(next);
                break;
            }
            x[i] = Elem::ZERO;
        }
    }
}

/// Indicator values on the full grid, lexicographic order.
fn indicator_grid(system: &PolySystem, limit: u128) -> Result<Vec<Elem>> {
    let q = system.field().order();
    let size = grid_size(q, system.nvars(), limit)?;
    let mut out = Vec::with_capacity(size);
    for_each_point(q, system.nvars(), |x| {
        out.push(system.eval_indicator(x).expect("arity checked"));
    });
    Ok(out)
}

/// Number of common roots of the system.
pub fn count_common_roots(system: &PolySystem) -> Result<RootCount> {
    let grid = indicator_grid(system, ENUMERATION_LIMIT)?;
    let count = grid.iter().filter(|v| **v == Elem::ONE).count();
    Ok(RootCount {
        count: BigUint::from(count),
        n: system.nvars(),
        q: system.field().order(),
    })
}

/// `Z = Σ_x F(x)` in the field.
pub fn brute_z(system: &PolySystem) -> Result<Elem> {
    let grid = indicator_grid(system, ENUMERATION_LIMIT)?;
    let f = system.field();
    Ok(grid.into_iter().fold(Elem::ZERO, |acc, v| f.add(acc, v)))
}

/// Inverse of `V[x][e] = x^e` over all elements `x` and exponents `e < q`.
fn vandermonde_inverse(field: &Field) -> Vec<Elem> {
    let q = field.order() as usize;
    let w = 2 * q;
    let mut m = vec![Elem::ZERO; q * w];
    for x in 0..q {
        for e in 0..q {
            m[x * w + e] = field.pow(Elem::from_raw(x as u32), e as u64);
        }
        m[x * w + q + x] = Elem::ONE;
    }
    for col in 0..q {
        let pivot = (col..q).find(|&r| !m[r * w + col].is_zero()).expect("nonsingular");
        for j in 0..w {
            m.swap(pivot * w + j, col * w + j);
        }
        let inv = field.inv(m[col * w + col]).unwrap();
        for j in 0..w {
            m[col * w + j] = field.mul(m[col * w + j], inv);
        }
        for r in 0..q {
            let factor = m[r * w + col];
            if r != col && !factor.is_zero() {
                for j in 0..w {
                    let s = field.mul(factor, m[col * w + j]);
                    m[r * w + j] = field.sub(m[r * w + j], s);
                }
            }
        }
    }
    let mut inv = vec![Elem::ZERO; q * q];
    for r in 0..q {
        for c in 0..q {
            inv[r * q + c] = m[r * w + q + c];
        }
    }
    inv
}

/// The unique polynomial with per-variable degree `< q` taking `values` on
/// the full grid `F_q^n` (lexicographic order).
pub fn interpolate_grid(field: &Arc<Field>, n: usize, values: &[Elem]) -> Result<Polynomial> {
    let q = field.order() as usize;
    let size = grid_size(q as u32, n, u128::MAX)?;
    if values.len() != size {
        return Err(Error::SizeMismatch {
            expected: size,
            got: values.len(),
        });
    }
    let vinv = vandermonde_inverse(field);
    let mut data = values.to_vec();
    let mut line = vec![Elem::ZERO; q];
    let mut stride = size;
    for _ in 0..n {
        stride /= q;
        for block in (0..size).step_by(stride * q) {
            for off in 0..stride {
                let base = block + off;
                for (e, slot) in line.iter_mut().enumerate() {
                    let mut acc = Elem::ZERO;
                    for x in 0..q {
                        acc = field.add(acc, field.mul(vinv[e * q + x], data[base + x * stride]));
                    }
                    *slot = acc;
                }
                for (e, &v) in line.iter().enumerate() {
                    data[base + e * stride] = v;
                }
            }
        }
    }
    let mut terms = Vec::new();
    let mut idx = 0;
    for_each_point(q as u32, n, |m| {
        let c = data[idx];
        idx += 1;
        if !c.is_zero() {
            let exps: Vec<u16> = m.iter().map(|e| e.index() as u16).collect();
            terms.push((Monomial::from_exponents(&exps), c));
        }
    });
    Ok(Polynomial::from_sorted_terms(field, n, terms.into_iter()))
}

/// The exact partial sum `Z_β(y) = Σ_{z ∈ F_q^β} F(y, z)` as a polynomial in
/// the first `n - β` variables.
pub fn brute_partial_sum(system: &PolySystem, beta: usize) -> Result<Polynomial> {
    let n = system.nvars();
    if beta > n {
        return Err(Error::InvalidParams(format!("beta {beta} exceeds n = {n}")));
    }
    let f = system.field();
    let grid = indicator_grid(system, PARTIAL_SUM_LIMIT)?;
    let chunk = grid_size(f.order(), beta, u128::MAX)?;
    let sums: Vec<Elem> = grid
        .chunks(chunk)
        .map(|c| c.iter().fold(Elem::ZERO, |acc, &v| f.add(acc, v)))
        .collect();
    interpolate_grid(f, n - beta, &sums)
}
