//! Arithmetic in GF(p^k) with a canonical integer encoding of elements.
//!
//! An element of `F_q` is identified with an index in `0..q`: the base-`p`
//! digits of the index, least significant first, are the coordinates of the
//! element in the polynomial basis `1, x, x^2, ...` modulo the defining
//! polynomial. Index 0 is zero and index 1 is one.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Fields up to this order get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// A field element, stored as its canonical index.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub(crate) fn from_raw(index: u32) -> Elem {
        debug_assert!(index < MAX_ORDER as u32);
        Elem(index as u16)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

/// A concrete finite field `F_q`, `q = p^k`.
///
/// Immutable after construction; share it behind an `Arc`.
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    /// Monic defining polynomial, coefficients low to high (length `k + 1`).
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.modulus == other.modulus
    }
}

impl Eq for Field {}

/// Splits `q` into `(p, k)` with `q = p^k`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Some((q, 1));
    }
    let (mut rest, mut k) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

impl Field {
    /// Builds `F_q`. The defining polynomial is the lexicographically smallest
    /// monic irreducible of degree `k` over `F_p`, comparing the coefficient
    /// list `(c_0, c_1, ..., c_{k-1})` from the constant term up.
    pub fn new(q: u64) -> Result<Field> {
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge { q, max: MAX_ORDER });
        }
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let (p, q) = (p as u32, q as u32);
        let modulus = if k == 1 { vec![0, 1] } else { smallest_irreducible(p, k) };
        let mut field = Field {
            p,
            k,
            q,
            modulus,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// The defining polynomial, coefficients low to high.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// The element with the given canonical index.
    pub fn elem(&self, index: u64) -> Result<Elem> {
        if index >= self.q as u64 {
            return Err(Error::ElementOutOfRange { index, q: self.q });
        }
        Ok(Elem(index as u16))
    }

    /// `n · 1`, the image of an integer in the prime subfield.
    pub fn from_int(&self, n: u64) -> Elem {
        Elem((n % self.p as u64) as u16)
    }

    /// The element `q - 1 = -1` as it appears in sums over the field.
    pub fn minus_one(&self) -> Elem {
        self.neg(Elem::ONE)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.q).map(Elem::from_raw)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.tables {
            Some(t) => Elem(t.add[self.pair(a, b)]),
            None => Elem(self.add_raw(a.0 as u32, b.0 as u32) as u16),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.tables {
            Some(t) => Elem(t.neg[a.0 as usize]),
            None => Elem(self.neg_raw(a.0 as u32) as u16),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.tables {
            Some(t) => Elem(t.mul[self.pair(a, b)]),
            None => Elem(self.mul_raw(a.0 as u32, b.0 as u32) as u16),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => Elem(t.inv[a.0 as usize]),
            None => self.pow(a, self.q as u64 - 2),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with the convention `0^0 = 1`.
    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `x -> x^(q-1)`: 1 on nonzero elements, 0 on zero.
    #[inline]
    pub fn nonzero_indicator(&self, a: Elem) -> Elem {
        if a.is_zero() {
            Elem::ZERO
        } else {
            Elem::ONE
        }
    }

    #[inline]
    fn pair(&self, a: Elem, b: Elem) -> usize {
        a.0 as usize * self.q as usize + b.0 as usize
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut out = vec![0; self.k as usize];
        for d in out.iter_mut() {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    fn undigits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.undigits(&sum)
    }

    fn neg_raw(&self, a: u32) -> u32 {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let d: Vec<u32> = self.digits(a).iter().map(|x| (self.p - x) % self.p).collect();
        self.undigits(&d)
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let prod = poly_mul(&self.digits(a), &self.digits(b), self.p);
        let mut rem = poly_rem(&prod, &self.modulus, self.p);
        rem.resize(self.k as usize, 0);
        self.undigits(&rem)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            for b in a..q {
                let s = self.add_raw(a as u32, b as u32) as u16;
                let m = self.mul_raw(a as u32, b as u32) as u16;
                add[a * q + b] = s;
                add[b * q + a] = s;
                mul[a * q + b] = m;
                mul[b * q + a] = m;
            }
        }
        let neg = (0..q as u32).map(|a| self.neg_raw(a) as u16).collect();
        let mut inv = vec![0u16; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u16;
                    break;
                }
            }
        }
        Tables { add, mul, neg, inv }
    }
}

/// `Σ_{x ∈ F_q} x^k`, by direct summation.
pub fn fermat_power_sum(field: &Field, k: u64) -> Elem {
    field
        .elements()
        .fold(Elem::ZERO, |acc, x| field.add(acc, field.pow(x, k)))
}

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = (lead as u64 * c as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = trim(r);
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    for deg in 1..=k / 2 {
        let count = (p as u64).pow(deg as u32);
        for low in 0..count {
            let mut g = Vec::with_capacity(deg + 1);
            let mut rest = low;
            for _ in 0..deg {
                g.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for rank in 0..count {
        // c_0 is the most significant digit of the rank.
        let mut coeffs = vec![0u32; k as usize + 1];
        let mut rest = rank;
        for i in (0..k as usize).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[k as usize] = 1;
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}
