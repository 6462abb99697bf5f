//! Randomized computation of full and partial sums of the indicator
//! polynomial, and the decision procedure built on top of them.
//!
//! `partial_sum` peels `⌈λn⌉` summation variables per level: it replaces the
//! system by `β'+2` random linear combinations (few enough that the
//! recursive partial sum has low degree), recurses, and repairs the
//! occasional wrong combination by a pointwise plurality vote over `t`
//! independent repetitions before summing out the remaining variables.

use std::sync::Arc;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::mpoly::{PolySystem, Polynomial, TrimmedPointSet};
use crate::randomized::{razborov_smolensky, valiant_vazirani, RngStream};
use crate::transform::{evaluate_on, interpolate_values};

/// Every tunable of the sum and decision procedures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverParams {
    /// Fraction of variables summed by the partial-sum call; `0 < κ < 1/(2d-1)`.
    pub kappa: Rational64,
    /// Fraction of variables peeled per recursion level; `0 < λ ≤ κ`.
    pub lambda: Rational64,
    /// Replaces `t = ⌈96 n ln q⌉` repetitions per recursion level.
    pub t_override: Option<usize>,
    /// Isolation trials for the decision procedure; defaults to `⌈9n⌉`.
    pub outer_reps: Option<usize>,
    pub seed: u64,
}

impl SolverParams {
    /// `κ = 0.9/(2d-1)`, `λ = κ/2`, default repetition counts, seed 0.
    pub fn for_degree(d: u32) -> SolverParams {
        let d = d.max(1) as i64;
        let kappa = Rational64::new(9, 10 * (2 * d - 1));
        SolverParams {
            kappa,
            lambda: kappa / 2,
            t_override: None,
            outer_reps: None,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> SolverParams {
        self.seed = seed;
        self
    }

    pub fn with_t(mut self, t: usize) -> SolverParams {
        self.t_override = Some(t);
        self
    }

    pub fn validate(&self, d: u32) -> Result<()> {
        let zero = Rational64::from_integer(0);
        let limit = Rational64::new(1, 2 * d.max(1) as i64 - 1);
        if !(zero < self.lambda && self.lambda <= self.kappa && self.kappa < limit) {
            return Err(Error::InvalidParams(format!(
                "need 0 < lambda <= kappa < 1/(2d-1) = {limit}, got lambda = {}, kappa = {}",
                self.lambda, self.kappa
            )));
        }
        if self.t_override == Some(0) || self.outer_reps == Some(0) {
            return Err(Error::InvalidParams("repetition counts must be positive".into()));
        }
        Ok(())
    }

    /// Repetitions per recursion level for an `n`-variate system over `F_q`.
    pub fn repetitions(&self, n: usize, q: u32) -> usize {
        self.t_override
            .unwrap_or_else(|| (96.0 * n as f64 * (q as f64).ln()).ceil() as usize)
            .max(1)
    }

    pub fn isolation_trials(&self, n: usize) -> usize {
        self.outer_reps.unwrap_or(9 * n).max(1)
    }

    /// `⌈λn⌉`
    pub fn step(&self, n: usize) -> usize {
        ceil_mul(self.lambda, n)
    }

    /// `⌊κn⌋`
    pub fn initial_beta(&self, n: usize) -> usize {
        let v = self.kappa * Rational64::from_integer(n as i64);
        v.floor().to_integer() as usize
    }
}

fn ceil_mul(r: Rational64, n: usize) -> usize {
    (r * Rational64::from_integer(n as i64)).ceil().to_integer() as usize
}

/// Degree bound `(min(md, n) - β)(q - 1)` on the partial sum `Z_β` of `m`
/// polynomials of degree `d`; negative means `Z_β ≡ 0`.
pub fn zdegree(m: usize, beta: usize, n: usize, d: u32, q: u32) -> i64 {
    ((m * d as usize).min(n) as i64 - beta as i64) * (q as i64 - 1)
}

/// Most frequent value, ties to the smallest element index.
pub fn plurality(values: &[Elem]) -> Result<Elem> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let top = values.iter().map(|v| v.index()).max().unwrap() as usize;
    let mut counts = vec![0usize; top + 1];
    for v in values {
        counts[v.index() as usize] += 1;
    }
    let best = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .unwrap()
        .0;
    Ok(Elem::from_raw(best as u32))
}

struct Ctx<'a> {
    field: &'a Arc<Field>,
    n: usize,
    d: u32,
    t: usize,
    step: usize,
}

fn sum_chunks(field: &Field, values: &[Elem], chunk: usize) -> Vec<Elem> {
    values
        .chunks(chunk)
        .map(|c| c.iter().fold(Elem::ZERO, |acc, &v| field.add(acc, v)))
        .collect()
}

fn partial_sum_rec(ctx: &Ctx, polys: &[Polynomial], beta: usize, stream: &RngStream) -> Result<Polynomial> {
    let (f, n) = (ctx.field, ctx.n);
    let q = f.order();
    let delta = zdegree(polys.len(), beta, n, ctx.d, q);
    if delta < 0 {
        return Ok(Polynomial::zero(f, n - beta));
    }
    let target = TrimmedPointSet::new(q, n - beta, delta, 0)?;
    let suffix = (q as usize).pow(beta as u32);

    if beta < ctx.step || n <= 3 {
        // Evaluate every P_i on T_{n-β,Δ} × F_q^β and sum the indicator over z.
        let total = target.len() * suffix;
        let mut indicator = vec![Elem::ONE; total];
        for p in polys {
            let ev = evaluate_on(p, delta, beta)?;
            for (slot, &v) in indicator.iter_mut().zip(ev.values()) {
                if !slot.is_zero() && !v.is_zero() {
                    *slot = Elem::ZERO;
                }
            }
        }
        let sums = sum_chunks(f, &indicator, suffix);
        return interpolate_values(f, &target, &sums);
    }

    let beta2 = beta - ctx.step;
    let mu = beta2 + 2;
    let system = PolySystem::with_degree(f, n, ctx.d, polys.to_vec())?;
    let rep = |j: usize| -> Result<Vec<Elem>> {
        let s = stream.child(j as u64);
        let combos = razborov_smolensky(&system, mu, &s.child(0));
        let z = partial_sum_rec(ctx, &combos, beta2, &s.child(1))?;
        Ok(evaluate_on(&z, delta, beta - beta2)?.into_values())
    };
    let reps: Vec<Vec<Elem>> = run_reps(ctx.t, rep)?;

    let len = reps[0].len();
    let mut column = vec![Elem::ZERO; ctx.t];
    let voted: Vec<Elem> = (0..len)
        .map(|i| {
            for (c, r) in column.iter_mut().zip(&reps) {
                *c = r[i];
            }
            plurality(&column).expect("t >= 1")
        })
        .collect();
    let sums = sum_chunks(f, &voted, (q as usize).pow(ctx.step as u32));
    interpolate_values(f, &target, &sums)
}

#[cfg(feature = "parallel")]
fn run_reps<F>(t: usize, rep: F) -> Result<Vec<Vec<Elem>>>
where
    F: Fn(usize) -> Result<Vec<Elem>> + Sync + Send,
{
    use rayon::prelude::*;
    (0..t).into_par_iter().map(rep).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_reps<F>(t: usize, rep: F) -> Result<Vec<Vec<Elem>>>
where
    F: Fn(usize) -> Result<Vec<Elem>>,
{
    (0..t).map(rep).collect()
}

/// A polynomial in the first `n - β` variables that equals
/// `Z_β(y) = Σ_{z ∈ F_q^β} F(y, z)` except with probability at most `q^{-n}`.
///
/// Its degree never exceeds [`zdegree`]`(m, β)`.
pub fn partial_sum(system: &PolySystem, beta: usize, params: &SolverParams, stream: &RngStream) -> Result<Polynomial> {
    let n = system.nvars();
    if beta > n {
        return Err(Error::InvalidParams(format!("beta {beta} exceeds n = {n}")));
    }
    params.validate(system.degree())?;
    let ctx = Ctx {
        field: system.field(),
        n,
        d: system.degree(),
        t: params.repetitions(n, system.field().order()),
        step: params.step(n),
    };
    partial_sum_rec(&ctx, system.polys(), beta, stream)
}

/// `Z = Σ_x F(x)`, correct except with probability at most `q^{-n}`.
pub fn full_sum(system: &PolySystem, params: &SolverParams, stream: &RngStream) -> Result<Elem> {
    let n = system.nvars();
    let beta = params.initial_beta(n);
    let z = partial_sum(system, beta, params, stream)?;
    let ev = evaluate_on(&z, 0, n - beta)?;
    let f = system.field();
    Ok(ev.values().iter().fold(Elem::ZERO, |acc, &v| f.add(acc, v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
}

impl Verdict {
    /// SAT-competition exit status.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Sat => 10,
            Verdict::Unsat => 20,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
        })
    }
}

/// Decides whether the system has a common root.
///
/// Each trial appends random affine equations, which isolate a single
/// solution with probability `Ω(1/n)`; a unique solution makes the full sum
/// equal to 1. A nonzero full sum in any trial means SAT.
pub fn solve_pes(system: &PolySystem, params: &SolverParams) -> Result<Verdict> {
    params.validate(system.degree())?;
    let root = RngStream::new(params.seed);
    let n = system.nvars();
    for trial in 0..params.isolation_trials(n) {
        let s = root.child(trial as u64);
        let forms = valiant_vazirani(system.field(), n, &s.child(0));
        let augmented = system.extended(forms)?;
        let augmented = PolySystem::with_degree(augmented.field(), n, system.degree(), augmented.polys().to_vec())?;
        if !full_sum(&augmented, params, &s.child(1))?.is_zero() {
            return Ok(Verdict::Sat);
        }
    }
    Ok(Verdict::Unsat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_partial_sum, brute_z};

    fn field(q: u64) -> Arc<Field> {
        Arc::new(Field::new(q).unwrap())
    }

    fn var(f: &Arc<Field>, n: usize, i: usize) -> Polynomial {
        Polynomial::var(f, n, i).unwrap()
    }

    fn c(f: &Arc<Field>, n: usize, v: u32) -> Polynomial {
        Polynomial::constant(f, n, f.elem(v as u64).unwrap())
    }

    #[test]
    fn zdegree_examples() {
        assert_eq!(zdegree(1, 0, 5, 2, 2), 2);
        assert_eq!(zdegree(10, 2, 5, 2, 3), 6);
        assert_eq!(zdegree(10, 5, 5, 2, 3), 0);
    }

    #[test]
    fn plurality_examples() {
        let e = Elem::from_raw;
        assert_eq!(plurality(&[e(1), e(1), e(2)]).unwrap(), e(1));
        assert_eq!(plurality(&[e(2), e(1)]).unwrap(), e(1));
        assert_eq!(plurality(&[e(0), e(0), e(0)]).unwrap(), e(0));
        assert_eq!(plurality(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn params() {
        let p = SolverParams::for_degree(2);
        assert_eq!(p.kappa, Rational64::new(3, 10));
        assert_eq!(p.lambda, Rational64::new(3, 20));
        assert!(p.validate(2).is_ok());
        assert!(p.validate(3).is_err());
        assert_eq!(p.repetitions(6, 2), 400);
        assert_eq!(p.step(6), 1);
        assert_eq!(p.initial_beta(6), 1);
        assert_eq!(p.isolation_trials(6), 54);
    }

    #[test]
    fn partial_sum_matches_oracle_small() {
        let f2 = field(2);
        let n = 4;
        let p1 = var(&f2, n, 0).add(&var(&f2, n, 1)).unwrap();
        let p2 = var(&f2, n, 2).mul(&var(&f2, n, 3)).unwrap();
        let s = PolySystem::new(&f2, n, vec![p1, p2]).unwrap();
        let params = SolverParams::for_degree(2).with_t(30);
        for beta in 0..=n {
            let got = partial_sum(&s, beta, &params, &RngStream::new(1)).unwrap();
            assert_eq!(got, brute_partial_sum(&s, beta).unwrap(), "beta={beta}");
        }
    }

    #[test]
    fn full_sum_examples() {
        for q in [2u64, 3, 5] {
            let f = field(q);
            let params = SolverParams::for_degree(1).with_t(10);
            let one = PolySystem::new(&f, 1, vec![c(&f, 1, 1)]).unwrap();
            assert_eq!(full_sum(&one, &params, &RngStream::new(0)).unwrap(), Elem::ZERO);
            let shifted = PolySystem::new(&f, 1, vec![var(&f, 1, 0).add(&c(&f, 1, q as u32 - 1)).unwrap()]).unwrap();
            assert_eq!(full_sum(&shifted, &params, &RngStream::new(0)).unwrap(), Elem::ONE);
            let empty = PolySystem::new(&f, 4, vec![]).unwrap();
            assert_eq!(full_sum(&empty, &params, &RngStream::new(0)).unwrap(), Elem::ZERO);
        }
    }

    #[test]
    fn recursive_full_sum_agrees_with_brute_force() {
        let f3 = field(3);
        let n = 5;
        let x = |i| var(&f3, n, i);
        let polys = vec![
            x(0).mul(&x(1)).unwrap().add(&x(2)).unwrap(),
            x(3).mul(&x(3)).unwrap().sub(&x(4)).unwrap(),
            x(0).add(&x(4)).unwrap().add(&c(&f3, n, 1)).unwrap(),
        ];
        let s = PolySystem::new(&f3, n, polys).unwrap();
        let params = SolverParams::for_degree(2).with_t(40);
        for seed in 0..3 {
            assert_eq!(
                full_sum(&s, &params, &RngStream::new(seed)).unwrap(),
                brute_z(&s).unwrap()
            );
        }
    }

    #[test]
    fn decision_examples() {
        let f2 = field(2);
        let x = var(&f2, 1, 0);
        let s = PolySystem::new(&f2, 1, vec![x.clone(), x.add(&c(&f2, 1, 1)).unwrap()]).unwrap();
        let params = SolverParams::for_degree(1).with_t(10);
        assert_eq!(solve_pes(&s, &params).unwrap(), Verdict::Unsat);

        let f3 = field(3);
        let xy = var(&f3, 2, 0).mul(&var(&f3, 2, 1)).unwrap().add(&c(&f3, 2, 1)).unwrap();
        let s = PolySystem::new(&f3, 2, vec![xy]).unwrap();
        let params = SolverParams::for_degree(2).with_t(10);
        assert_eq!(solve_pes(&s, &params).unwrap(), Verdict::Sat);

        let s = PolySystem::new(&f3, 3, vec![]).unwrap();
        assert_eq!(solve_pes(&s, &params).unwrap(), Verdict::Sat);
    }
}
