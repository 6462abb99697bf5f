#![allow(dead_code)]

use std::sync::Arc;

use fqsolve_core::{Elem, Field, PolySystem, Polynomial};
use rand::Rng;

pub fn field(q: u64) -> Arc<Field> {
    Arc::new(Field::new(q).unwrap())
}

pub fn elem(f: &Field, i: u32) -> Elem {
    f.elem(i as u64).unwrap()
}

pub fn random_elem(f: &Field, rng: &mut impl Rng) -> Elem {
    elem(f, rng.gen_range(0..f.order()))
}

/// Dense random polynomial: every monomial of degree ≤ `d` (folded) gets a
/// uniform coefficient.
pub fn random_poly(f: &Arc<Field>, n: usize, d: u32, rng: &mut impl Rng) -> Polynomial {
    let top = f.order() - 1;
    let mut terms = Vec::new();
    let mut e = vec![0u64; n];
    loop {
        if e.iter().sum::<u64>() <= d as u64 {
            terms.push((e.clone(), random_elem(f, rng)));
        }
        let mut i = 0;
        loop {
            if i == n {
                return Polynomial::from_terms(f, n, terms).unwrap();
            }
            if e[i] < top as u64 {
                e[i] += 1;
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

pub fn random_system(f: &Arc<Field>, n: usize, m: usize, d: u32, rng: &mut impl Rng) -> PolySystem {
    let polys = (0..m).map(|_| random_poly(f, n, d, rng)).collect();
    PolySystem::with_degree(f, n, d, polys).unwrap()
}

/// Polynomial with arbitrary coefficients on every reduced monomial whose
/// exponents lie in `{0..q-1}`; `density` is the chance a monomial is kept.
pub fn random_full_poly(f: &Arc<Field>, n: usize, density: f64, rng: &mut impl Rng) -> Polynomial {
    let q = f.order() as u64;
    let total = q.pow(n as u32);
    let mut terms = Vec::new();
    for idx in 0..total {
        if !rng.gen_bool(density) {
            continue;
        }
        let mut rest = idx;
        let e: Vec<u64> = (0..n)
            .map(|_| {
                let d = rest % q;
                rest /= q;
                d
            })
            .collect();
        terms.push((e, random_elem(f, rng)));
    }
    Polynomial::from_terms(f, n, terms).unwrap()
}

/// Lexicographic enumeration of `F_q^n`, first coordinate most significant.
pub fn grid(f: &Field, n: usize) -> Vec<Vec<Elem>> {
    let q = f.order() as u64;
    (0..q.pow(n as u32))
        .map(|mut idx| {
            let mut x = vec![Elem::ZERO; n];
            for c in x.iter_mut().rev() {
                *c = f.elem(idx % q).unwrap();
                idx /= q;
            }
            x
        })
        .collect()
}
