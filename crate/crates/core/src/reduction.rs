//! Parsimonious reduction from k-CNF satisfiability to polynomial systems.
//!
//! Boolean variables are grouped into blocks of `vars1`, and each block is
//! encoded by `vars2` field variables with `q^{vars2} ≥ 2^{vars1}`. A decoder
//! reads the block as a base-`q` number (first variable least significant)
//! modulo `2^{vars1}`; its bits are interpolated into polynomials `DEC_v`.
//! Each clause becomes the product of one factor per literal, where a factor
//! vanishes exactly when its literal is true.
//!
//! In parsimonious mode each block additionally gets an equation that
//! vanishes iff the block value is below `2^{vars1}` (making the decoder a
//! bijection), and padding variables are pinned to false by unit clauses.

use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::Rational64;

use crate::error::{parse_err, Error, Result};
use crate::field::{Elem, Field};
use crate::mpoly::{PolySystem, Polynomial, TrimmedPointSet};
use crate::transform::interpolate_values;

/// A CNF formula; literals are nonzero DIMACS integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Cnf> {
        for c in &clauses {
            if c.is_empty() {
                return Err(Error::InvalidParams("empty clause".into()));
            }
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > n_vars {
                    return Err(Error::InvalidParams(format!("literal {l} out of range 1..={n_vars}")));
                }
            }
        }
        Ok(Cnf { n_vars, clauses })
    }

    /// Maximum clause width.
    pub fn width(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    /// Exact model count by enumeration of all `2^n` assignments.
    pub fn count_models(&self) -> Result<u64> {
        if self.n_vars > 30 {
            return Err(Error::TooLarge {
                points: 1u128 << self.n_vars.min(127),
                limit: 1 << 30,
            });
        }
        let mut a = vec![false; self.n_vars];
        let mut count = 0;
        for bits in 0u64..(1 << self.n_vars) {
            for (i, slot) in a.iter_mut().enumerate() {
                *slot = bits >> i & 1 == 1;
            }
            if self.satisfied_by(&a) {
                count += 1;
            }
        }
        Ok(count)
    }
}

/// Parses DIMACS CNF: `c` comment lines, a `p cnf <n> <m>` header, then
/// exactly `m` zero-terminated clauses (which may span lines).
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
                return Err(parse_err(line_no, "expected a single `p cnf <vars> <clauses>` header"));
            }
            let n = toks[2].parse().map_err(|_| parse_err(line_no, "bad variable count"))?;
            let m = toks[3].parse().map_err(|_| parse_err(line_no, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| parse_err(line_no, "clause before `p cnf` header"))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(parse_err(line_no, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n {
                return Err(parse_err(line_no, format!("literal {lit} out of range 1..={n}")));
            } else {
                current.push(lit);
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(1, "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(parse_err(last_line, "last clause is missing its terminating 0"));
    }
    if clauses.len() != m {
        return Err(parse_err(
            last_line,
            format!("header announces {m} clauses, found {}", clauses.len()),
        ));
    }
    Cnf::new(n, clauses)
}

/// Block sizes of the encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionPlan {
    pub q: u32,
    pub delta: Rational64,
    /// Maximum clause width.
    pub k: usize,
    /// Boolean variables per block: `⌈(2/δ) log₂ q⌉`.
    pub vars1: usize,
    /// Field variables per block: `⌈vars1 / log₂ q⌉`.
    pub vars2: usize,
    /// `⌈n / vars1⌉`
    pub blocks: usize,
    pub parsimonious: bool,
}

impl ReductionPlan {
    pub fn new(q: u32, delta: Rational64, cnf: &Cnf, parsimonious: bool) -> Result<ReductionPlan> {
        if delta <= Rational64::from_integer(0) {
            return Err(Error::InvalidParams(format!("delta must be positive, got {delta}")));
        }
        crate::field::prime_power(q as u64).ok_or(Error::NotPrimePower(q as u64))?;
        let (a, b) = (*delta.numer() as u32, *delta.denom() as u32);
        let big_q = BigUint::from(q);
        let two = BigUint::from(2u32);
        // Smallest v with v ≥ (2b/a) log₂ q, i.e. 2^{va} ≥ q^{2b}.
        let target = big_q.pow(2 * b);
        let mut vars1 = 0usize;
        while two.pow(vars1 as u32 * a) < target {
            vars1 += 1;
        }
        // Smallest v with q^v ≥ 2^{vars1}.
        let mut vars2 = 0usize;
        while big_q.pow(vars2 as u32) < two.pow(vars1 as u32) {
            vars2 += 1;
        }
        Ok(ReductionPlan {
            q,
            delta,
            k: cnf.width().max(1),
            vars1,
            vars2,
            blocks: cnf.n_vars.div_ceil(vars1),
            parsimonious,
        })
    }

    pub fn output_vars(&self) -> usize {
        self.blocks * self.vars2
    }

    pub fn degree_bound(&self) -> usize {
        self.k * self.vars2 * (self.q as usize - 1)
    }

    /// `dec` at a block assignment, as a `vars1`-bit integer, and whether the
    /// block value is below `2^{vars1}`.
    pub fn decode(&self, block: &[Elem]) -> (u64, bool) {
        let mut value: u128 = 0;
        for x in block.iter().rev() {
            value = value * self.q as u128 + x.index() as u128;
        }
        let modulus = 1u128 << self.vars1;
        ((value % modulus) as u64, value < modulus)
    }
}

fn embed(p: &Polynomial, nvars: usize, offset: usize) -> Polynomial {
    let terms: Vec<(Vec<u64>, Elem)> = p
        .terms()
        .map(|(m, c)| {
            let mut e = vec![0u64; nvars];
            for (i, &x) in m.exponents().iter().enumerate() {
                e[offset + i] = x as u64;
            }
            (e, c)
        })
        .collect();
    Polynomial::from_terms(p.field(), nvars, terms).expect("embedding keeps exponents in range")
}

/// Decoder bit polynomials `DEC_v` and the bound polynomial over one block.
fn block_polys(field: &Arc<Field>, plan: &ReductionPlan) -> Result<(Vec<Polynomial>, Polynomial)> {
    let v2 = plan.vars2;
    let grid = TrimmedPointSet::new(field.order(), v2, 0, v2)?;
    let mut bits = vec![Vec::with_capacity(grid.len()); plan.vars1];
    let mut bound = Vec::with_capacity(grid.len());
    for point in grid.iter() {
        let block: Vec<Elem> = point.iter().map(|&x| Elem::from_raw(x as u32)).collect();
        let (value, in_range) = plan.decode(&block);
        for (v, col) in bits.iter_mut().enumerate() {
            col.push(if value >> v & 1 == 1 { Elem::ONE } else { Elem::ZERO });
        }
        bound.push(if in_range { Elem::ZERO } else { Elem::ONE });
    }
    let dec = bits
        .iter()
        .map(|col| interpolate_values(field, &grid, col))
        .collect::<Result<Vec<_>>>()?;
    Ok((dec, interpolate_values(field, &grid, &bound)?))
}

/// Builds a system whose solutions correspond to satisfying assignments
/// (one-to-one in parsimonious mode).
pub fn reduce_cnf(cnf: &Cnf, q: u32, delta: Rational64, parsimonious: bool) -> Result<(PolySystem, ReductionPlan)> {
    let plan = ReductionPlan::new(q, delta, cnf, parsimonious)?;
    let field = Arc::new(Field::new(q as u64)?);
    let nvars = plan.output_vars();
    let (dec, bound) = block_polys(&field, &plan)?;
    let one = Polynomial::constant(&field, nvars, Elem::ONE);

    // Factor that vanishes exactly when the literal is true.
    let factor = |lit: i64| -> Result<Polynomial> {
        let v = lit.unsigned_abs() as usize - 1;
        let y = embed(&dec[v % plan.vars1], nvars, (v / plan.vars1) * plan.vars2);
        if lit > 0 {
            one.sub(&y)
        } else {
            Ok(y)
        }
    };

    let mut clauses: Vec<Vec<i64>> = cnf.clauses.clone();
    if parsimonious {
        let padded = plan.blocks * plan.vars1;
        clauses.extend((cnf.n_vars + 1..=padded).map(|v| vec![-(v as i64)]));
    }
    let mut polys = Vec::with_capacity(clauses.len() + plan.blocks);
    for clause in &clauses {
        let mut p = one.clone();
        for &lit in clause {
            p = p.mul(&factor(lit)?)?;
        }
        polys.push(p);
    }
    if parsimonious && !bound.is_zero() {
        for b in 0..plan.blocks {
            polys.push(embed(&bound, nvars, b * plan.vars2));
        }
    }
    Ok((PolySystem::new(&field, nvars, polys)?, plan))
}
