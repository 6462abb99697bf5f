//! Sparse multivariate polynomials over `F_q`.
//!
//! Every stored exponent lies in `0..=q-1`; products and powers fold larger
//! exponents back with `x^e = x^(((e-1) mod (q-1)) + 1)`, which preserves the
//! polynomial as a function on `F_q^n`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// Exponent vector of a monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[u16; 12]>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exponents(exponents: &[u16]) -> Monomial {
        Monomial(SmallVec::from_slice(exponents))
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// Total degree over the integers.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Degree in the first `k` variables.
    pub fn prefix_degree(&self, k: usize) -> u64 {
        self.0[..k].iter().map(|&e| e as u64).sum()
    }
}

/// Folds an exponent into `0..=q-1` without changing the induced function.
pub fn reduce_exponent(e: u64, q: u32) -> u16 {
    let top = q as u64 - 1;
    if e <= top {
        e as u16
    } else {
        (((e - 1) % top) + 1) as u16
    }
}

/// A polynomial in `F_q[X_1, ..., X_n]` with per-variable degree at most `q - 1`.
#[derive(Clone)]
pub struct Polynomial {
    field: Arc<Field>,
    nvars: usize,
    terms: BTreeMap<Monomial, Elem>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.nvars == other.nvars && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[F_{}, n={}](", self.field.order(), self.nvars)?;
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*X{}", v + 1)?,
                    _ => write!(f, "*X{}^{e}", v + 1)?,
                }
            }
        }
        write!(f, ")")
    }
}

impl Polynomial {
    pub fn zero(field: &Arc<Field>, nvars: usize) -> Polynomial {
        Polynomial {
            field: Arc::clone(field),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Arc<Field>, nvars: usize, c: Elem) -> Polynomial {
        let mut p = Polynomial::zero(field, nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    /// The variable `X_{var+1}` (zero-based `var`).
    pub fn var(field: &Arc<Field>, nvars: usize, var: usize) -> Result<Polynomial> {
        if var >= nvars {
            return Err(Error::ArityMismatch {
                expected: nvars,
                got: var + 1,
            });
        }
        let mut m = Monomial::one(nvars);
        m.0[var] = 1;
        let mut p = Polynomial::zero(field, nvars);
        p.terms.insert(m, Elem::ONE);
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs. Exponents
    /// above `q - 1` are folded and repeated monomials are summed.
    pub fn from_terms<I, E>(field: &Arc<Field>, nvars: usize, terms: I) -> Result<Polynomial>
    where
        I: IntoIterator<Item = (E, Elem)>,
        E: AsRef<[u64]>,
    {
        let q = field.order();
        let mut p = Polynomial::zero(field, nvars);
        for (exps, c) in terms {
            let exps = exps.as_ref();
            if exps.len() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            if c.index() >= q {
                return Err(Error::ElementOutOfRange {
                    index: c.index() as u64,
                    q,
                });
            }
            let m = Monomial(exps.iter().map(|&e| reduce_exponent(e, q)).collect());
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Builds a polynomial from already-reduced, distinct monomials in
    /// ascending order. Zero coefficients are skipped.
    pub(crate) fn from_sorted_terms(
        field: &Arc<Field>,
        nvars: usize,
        terms: impl Iterator<Item = (Monomial, Elem)>,
    ) -> Polynomial {
        Polynomial {
            field: Arc::clone(field),
            nvars,
            terms: terms.filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Nonzero terms in ascending lexicographic monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Elem)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, exponents: &[u16]) -> Elem {
        self.terms
            .get(&Monomial::from_exponents(exponents))
            .copied()
            .unwrap_or(Elem::ZERO)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Degree in the first `k` variables alone.
    pub fn prefix_degree(&self, k: usize) -> u64 {
        self.terms.keys().map(|m| m.prefix_degree(k)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Elem) {
        if c.is_zero() {
            return;
        }
        let f = &self.field;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.order(),
                right: other.field.order(),
            });
        }
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(self.field.minus_one())
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Elem) -> Polynomial {
        let f = &self.field;
        Polynomial::from_sorted_terms(f, self.nvars, self.terms.iter().map(|(m, &a)| (m.clone(), f.mul(a, c))))
    }

    /// `self + c * other`, in place.
    pub(crate) fn add_scaled(&mut self, other: &Polynomial, c: Elem) {
        if c.is_zero() {
            return;
        }
        for (m, &a) in &other.terms {
            let v = self.field.mul(a, c);
            self.add_term(m.clone(), v);
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let f = &self.field;
        let q = f.order();
        let mut out = Polynomial::zero(f, self.nvars);
        for (ma, &a) in &self.terms {
            for (mb, &b) in &other.terms {
                let m = Monomial(
                    ma.0.iter()
                        .zip(&mb.0)
                        .map(|(&x, &y)| reduce_exponent(x as u64 + y as u64, q))
                        .collect(),
                );
                out.add_term(m, f.mul(a, b));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::constant(&self.field, self.nvars, Elem::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        acc
    }

    pub fn evaluate(&self, x: &[Elem]) -> Result<Elem> {
        if x.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Elem]) -> Elem {
        let f = &self.field;
        let mut acc = Elem::ZERO;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (&xi, &e) in x.iter().zip(&m.0) {
                if e != 0 {
                    t = f.mul(t, f.pow(xi, e as u64));
                    if t.is_zero() {
                        break;
                    }
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// The coefficient of `Y_1^{q-1} ... Y_{n2}^{q-1}` when the last `n2`
    /// variables are read as `Y`: keeps the terms whose trailing `n2`
    /// exponents all equal `q - 1` and drops those coordinates.
    pub fn symbolic_coefficient(&self, n2: usize) -> Result<Polynomial> {
        if n2 > self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: n2,
            });
        }
        let n1 = self.nvars - n2;
        let top = (self.field.order() - 1) as u16;
        Ok(Polynomial::from_sorted_terms(
            &self.field,
            n1,
            self.terms
                .iter()
                .filter(|(m, _)| m.0[n1..].iter().all(|&e| e == top))
                .map(|(m, &c)| (Monomial::from_exponents(&m.0[..n1]), c)),
        ))
    }
}

/// A system `P_1 = ... = P_m = 0` of polynomials of degree at most `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    field: Arc<Field>,
    nvars: usize,
    degree: u32,
    polys: Vec<Polynomial>,
}

impl PolySystem {
    /// Declares the degree bound as the largest degree present (at least 1).
    pub fn new(field: &Arc<Field>, nvars: usize, polys: Vec<Polynomial>) -> Result<PolySystem> {
        let d = polys.iter().map(Polynomial::degree).max().unwrap_or(0).max(1);
        PolySystem::with_degree(field, nvars, d as u32, polys)
    }

    pub fn with_degree(field: &Arc<Field>, nvars: usize, degree: u32, polys: Vec<Polynomial>) -> Result<PolySystem> {
        if degree == 0 {
            return Err(Error::InvalidParams("degree bound must be at least 1".into()));
        }
        for p in &polys {
            if **p.field() != **field {
                return Err(Error::FieldMismatch {
                    left: field.order(),
                    right: p.field().order(),
                });
            }
            if p.nvars() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: p.nvars(),
                });
            }
            if p.degree() > degree as u64 {
                return Err(Error::DegreeTooHigh {
                    degree: p.degree(),
                    bound: degree as i64,
                });
            }
        }
        Ok(PolySystem {
            field: Arc::clone(field),
            nvars,
            degree,
            polys,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Appends equations, raising the degree bound if needed.
    pub fn extended(&self, extra: Vec<Polynomial>) -> Result<PolySystem> {
        let d = extra
            .iter()
            .map(Polynomial::degree)
            .max()
            .unwrap_or(0)
            .max(self.degree as u64);
        let mut polys = self.polys.clone();
        polys.extend(extra);
        PolySystem::with_degree(&self.field, self.nvars, d as u32, polys)
    }

    /// `F(x) = Π (1 - P_i(x)^{q-1})`: 1 at common roots, 0 elsewhere.
    pub fn eval_indicator(&self, x: &[Elem]) -> Result<Elem> {
        if x.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        let f = &self.field;
        for p in &self.polys {
            let v = p.eval_unchecked(x);
            let term = f.sub(Elem::ONE, f.pow(v, f.order() as u64 - 1));
            if term.is_zero() {
                return Ok(Elem::ZERO);
            }
        }
        Ok(Elem::ONE)
    }
}

/// `T_{n-b,Δ} × F_q^b`: index vectors whose first `n - b` entries sum to at
/// most `Δ` over the integers, the last `b` entries unconstrained.
///
/// Points are enumerated in plain lexicographic order with the first
/// coordinate most significant. A negative `Δ` gives the empty set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrimmedPointSet {
    q: u32,
    nvars: usize,
    delta: i64,
    grid: usize,
}

impl TrimmedPointSet {
    pub fn new(q: u32, nvars: usize, delta: i64, grid: usize) -> Result<TrimmedPointSet> {
        if grid > nvars {
            return Err(Error::InvalidParams(format!(
                "grid suffix {grid} longer than arity {nvars}"
            )));
        }
        if q < 2 {
            return Err(Error::InvalidParams(format!("field order {q} < 2")));
        }
        Ok(TrimmedPointSet { q, nvars, delta, grid })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Number of leading coordinates that carry the degree budget.
    pub fn prefix(&self) -> usize {
        self.nvars - self.grid
    }

    /// The effective budget: `Δ` capped at the largest reachable prefix sum.
    pub(crate) fn budget(&self) -> Option<usize> {
        if self.delta < 0 {
            return None;
        }
        let cap = self.prefix() as i64 * (self.q as i64 - 1);
        Some(self.delta.min(cap) as usize)
    }

    pub fn len(&self) -> usize {
        let Some(budget) = self.budget() else {
            return 0;
        };
        let top = self.q as usize - 1;
        // ways[s] = number of prefixes with sum exactly s
        let mut ways = vec![0usize; budget + 1];
        ways[0] = 1;
        for _ in 0..self.prefix() {
            let mut next = vec![0usize; budget + 1];
            for (s, &w) in ways.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for e in 0..=top.min(budget - s) {
                    next[s + e] += w;
                }
            }
            ways = next;
        }
        ways.iter().sum::<usize>() * (self.q as usize).pow(self.grid as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: &[u16]) -> bool {
        x.len() == self.nvars
            && self.delta >= 0
            && x.iter().all(|&e| (e as u32) < self.q)
            && x[..self.prefix()].iter().map(|&e| e as i64).sum::<i64>() <= self.delta
    }

    /// Points in canonical order.
    pub fn iter(&self) -> PointIter {
        PointIter {
            set: *self,
            current: if self.delta >= 0 {
                Some(vec![0; self.nvars])
            } else {
                None
            },
        }
    }
}

/// Lexicographic odometer over a [`TrimmedPointSet`].
pub struct PointIter {
    set: TrimmedPointSet,
    current: Option<Vec<u16>>,
}

impl Iterator for PointIter {
    type Item = Vec<u16>;

    fn next(&mut self) -> Option<Vec<u16>> {
        let out = self.current.clone()?;
        let x = self.current.as_mut().unwrap();
        let prefix = self.set.prefix();
        let top = (self.set.q - 1) as u16;
        let mut i = self.set.nvars;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if x[i] < top {
                x[i] += 1;
                let within = i >= prefix || x[..prefix].iter().map(|&e| e as i64).sum::<i64>() <= self.set.delta;
                if within {
                    break;
                }
            }
            x[i] = 0;
        }
        Some(out)
    }
}

/// Lists the points of `set` in canonical order.
pub fn enumerate_points(set: &TrimmedPointSet) -> Vec<Vec<u16>> {
    set.iter().collect()
}
