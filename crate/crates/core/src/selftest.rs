//! A quick oracle-equivalence suite, run by `fqsolve selftest`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::Rational64;
use rand::Rng;

use crate::analysis::{ext_binom_cum, zeta};
use crate::field::{Elem, Field};
use crate::mpoly::{PolySystem, Polynomial, TrimmedPointSet};
use crate::oracle::{brute_partial_sum, brute_z, count_common_roots};
use crate::randomized::RngStream;
use crate::reduction::{reduce_cnf, Cnf};
use crate::solver::{full_sum, partial_sum, SolverParams};
use crate::transform::{evaluate_trimmed, interpolate_trimmed};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_system(f: &Arc<Field>, n: usize, m: usize, d: u32, rng: &mut impl Rng) -> PolySystem {
    let q = f.order();
    let polys = (0..m)
        .map(|_| {
            let terms: Vec<(Vec<u64>, Elem)> = (0..6)
                .map(|_| {
                    let mut e = vec![0u64; n];
                    for _ in 0..rng.gen_range(0..=d) {
                        e[rng.gen_range(0..n)] += 1;
                    }
                    (e, Elem::from_raw(rng.gen_range(0..q)))
                })
                .collect();
            Polynomial::from_terms(f, n, terms).unwrap()
        })
        .collect();
    PolySystem::with_degree(f, n, d, polys).unwrap()
}

fn transform_roundtrip(rng: &mut impl Rng) -> Check {
    let mut failures = 0;
    let mut cases = 0;
    for q in [2u64, 3, 4, 5] {
        let f = Arc::new(Field::new(q).unwrap());
        for n in 1..=4usize {
            for grid in 0..=n {
                let delta = rng.gen_range(0..=(n * (q as usize - 1)).min(6)) as i64;
                let set = TrimmedPointSet::new(q as u32, n, delta, grid).unwrap();
                let terms: Vec<(Vec<u64>, Elem)> = set
                    .iter()
                    .map(|m| {
                        (
                            m.iter().map(|&x| x as u64).collect(),
                            Elem::from_raw(rng.gen_range(0..q as u32)),
                        )
                    })
                    .collect();
                let p = Polynomial::from_terms(&f, n, terms).unwrap();
                let ev = evaluate_trimmed(&p, delta, grid).unwrap();
                let naive_ok = set.iter().zip(ev.values()).all(|(x, &v)| {
                    let pt: Vec<Elem> = x.iter().map(|&c| Elem::from_raw(c as u32)).collect();
                    p.evaluate(&pt).unwrap() == v
                });
                cases += 1;
                if !naive_ok || interpolate_trimmed(&ev).unwrap() != p {
                    failures += 1;
                }
            }
        }
    }
    Check {
        name: "transform roundtrip and naive evaluation",
        passed: failures == 0,
        detail: format!("{} of {cases} cases agree", cases - failures),
    }
}

fn sums(rng: &mut impl Rng) -> Check {
    let mut failures = 0;
    let configs = [(2u64, 5usize), (3, 4), (4, 4)];
    for (q, n) in configs {
        let f = Arc::new(Field::new(q).unwrap());
        let params = SolverParams::for_degree(2).with_t(24);
        for trial in 0..3 {
            let s = random_system(&f, n, 3, 2, rng);
            let stream = RngStream::new(trial);
            if full_sum(&s, &params, &stream).unwrap() != brute_z(&s).unwrap() {
                failures += 1;
            }
            if partial_sum(&s, 1, &params, &stream).unwrap() != brute_partial_sum(&s, 1).unwrap() {
                failures += 1;
            }
        }
    }
    Check {
        name: "full and partial sums against exhaustive sums",
        passed: failures == 0,
        detail: format!("{failures} mismatches in 18 comparisons"),
    }
}

fn reduction(rng: &mut impl Rng) -> Check {
    let mut failures = 0;
    for q in [2u32, 3, 4] {
        let n = 5;
        let clauses = (0..8)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let v = rng.gen_range(1..=n as i64);
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        let cnf = Cnf::new(n, clauses).unwrap();
        let (s, _) = reduce_cnf(&cnf, q, Rational64::from_integer(1), true).unwrap();
        if count_common_roots(&s).unwrap().count != BigUint::from(cnf.count_models().unwrap()) {
            failures += 1;
        }
    }
    Check {
        name: "parsimonious reduction preserves model counts",
        passed: failures == 0,
        detail: format!("{failures} mismatches in 3 formulas"),
    }
}

fn exponents() -> Check {
    let targets = [(2, 2, 0.695), (3, 2, 0.696), (4, 2, 0.698), (4, 3, 0.813)];
    let mut worst: f64 = f64::NEG_INFINITY;
    for (q, d, t) in targets {
        worst = worst.max(zeta(q, d).unwrap().zeta - t);
    }
    let sizes_ok = (0..=6).all(|delta| {
        let set = TrimmedPointSet::new(3, 4, delta, 0).unwrap();
        BigUint::from(set.len()) == ext_binom_cum(4, delta, 3).unwrap()
    });
    Check {
        name: "running-time exponents and point-set sizes",
        passed: worst <= 5e-4 && sizes_ok,
        detail: format!("largest excess over the published exponents: {worst:.6}"),
    }
}

/// Runs every check with a fixed seed.
pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = RngStream::new(seed).rng();
    vec![
        transform_roundtrip(&mut rng),
        sums(&mut rng),
        reduction(&mut rng),
        exponents(),
    ]
}
