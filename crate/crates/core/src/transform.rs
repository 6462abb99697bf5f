//! Multipoint evaluation and interpolation on trimmed point sets.
//!
//! A polynomial whose monomials lie in `T_{n-b,Δ} × {0..q-1}^b` is determined
//! by its values on the point set of the same shape (points and exponent
//! vectors are both read as index vectors). Both directions run as a sequence
//! of one-dimensional passes along each variable:
//!
//! * monomial coefficients → Newton coefficients (upper triangular per variable),
//! * Newton coefficients → values at `σ_0, σ_1, ...` (lower triangular per variable),
//!
//! where the Newton basis is `N_k(x) = Π_{j<k} (x - σ_j)` over the elements in
//! index order, `σ_i = i`. Because the index set is a lower set and both
//! factors are triangular in the product order, each pass stays inside the
//! set and touches every stored entry `O(q)` times.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, LazyLock, Mutex};

use crate::error::{parse_err, Error, Result};
use crate::field::{Elem, Field};
use crate::mpoly::{Monomial, Polynomial, TrimmedPointSet};

/// Largest field order the transform supports (per-variable tables are `q × q`).
pub const MAX_TRANSFORM_ORDER: u32 = 256;

/// Values of a polynomial on a trimmed point set, in canonical point order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrimmedEvaluation {
    field: Arc<Field>,
    points: TrimmedPointSet,
    values: Vec<Elem>,
}

impl TrimmedEvaluation {
    pub fn new(field: &Arc<Field>, points: TrimmedPointSet, values: Vec<Elem>) -> Result<Self> {
        if points.q() != field.order() {
            return Err(Error::InvalidParams(format!(
                "point set over q={} used with F_{}",
                points.q(),
                field.order()
            )));
        }
        let expected = points.len();
        if values.len() != expected {
            return Err(Error::SizeMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(TrimmedEvaluation {
            field: Arc::clone(field),
            points,
            values,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn points(&self) -> &TrimmedPointSet {
        &self.points
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Elem> {
        self.values
    }
}

struct NewtonTables {
    q: usize,
    /// `U[k][i]`: monomial → Newton coefficients, upper triangular.
    to_newton: Vec<Elem>,
    /// `M[i][k] = [x^i] N_k`: Newton → monomial coefficients, upper triangular.
    to_monomial: Vec<Elem>,
    /// `E[s][k] = N_k(σ_s)`: Newton coefficients → values, lower triangular.
    eval: Vec<Elem>,
    /// `E^{-1}`: values → Newton coefficients (divided differences).
    divided: Vec<Elem>,
    /// `to_newton` is the identity (true for q = 2).
    monomial_is_newton: bool,
}

impl NewtonTables {
    fn new(field: &Field) -> NewtonTables {
        let q = field.order() as usize;
        let sigma = |i: usize| Elem::from_raw(i as u32);

        // Coefficients of N_k, low to high.
        let mut basis: Vec<Vec<Elem>> = vec![vec![Elem::ONE]];
        for k in 1..q {
            let prev = &basis[k - 1];
            let shift = field.neg(sigma(k - 1));
            let mut next = vec![Elem::ZERO; k + 1];
            for (i, &c) in prev.iter().enumerate() {
                next[i + 1] = field.add(next[i + 1], c);
                next[i] = field.add(next[i], field.mul(c, shift));
            }
            basis.push(next);
        }

        let mut to_monomial = vec![Elem::ZERO; q * q];
        for (k, nk) in basis.iter().enumerate() {
            for (i, &c) in nk.iter().enumerate() {
                to_monomial[i * q + k] = c;
            }
        }

        // to_monomial is unit upper triangular; invert by back substitution.
        let mut to_newton = vec![Elem::ZERO; q * q];
        for col in 0..q {
            to_newton[col * q + col] = Elem::ONE;
            for row in (0..col).rev() {
                let mut acc = Elem::ZERO;
                for j in row + 1..=col {
                    acc = field.add(acc, field.mul(to_monomial[row * q + j], to_newton[j * q + col]));
                }
                to_newton[row * q + col] = field.neg(acc);
            }
        }

        let mut eval = vec![Elem::ZERO; q * q];
        for s in 0..q {
            for (k, nk) in basis.iter().enumerate().take(s + 1) {
                let mut v = Elem::ZERO;
                for &c in nk.iter().rev() {
                    v = field.add(field.mul(v, sigma(s)), c);
                }
                eval[s * q + k] = v;
            }
        }

        // Forward substitution; the diagonal N_s(σ_s) = Π_{j<s} (σ_s - σ_j) is nonzero.
        let mut divided = vec![Elem::ZERO; q * q];
        for col in 0..q {
            for row in col..q {
                let mut acc = if row == col { Elem::ONE } else { Elem::ZERO };
                for j in col..row {
                    acc = field.sub(acc, field.mul(eval[row * q + j], divided[j * q + col]));
                }
                let diag = field.inv(eval[row * q + row]).expect("distinct nodes");
                divided[row * q + col] = field.mul(acc, diag);
            }
        }

        let monomial_is_newton =
            (0..q).all(|i| (0..q).all(|j| to_newton[i * q + j] == if i == j { Elem::ONE } else { Elem::ZERO }));
        NewtonTables {
            q,
            to_newton,
            to_monomial,
            eval,
            divided,
            monomial_is_newton,
        }
    }
}

/// Canonical order of a point set, with lines along each variable.
struct Layout {
    set: TrimmedPointSet,
    len: usize,
    /// Points, flattened row-major (`len × nvars`).
    points: Vec<u16>,
    /// `completions[i][r]`: completions of coordinates `i..n` with prefix budget `r` left.
    completions: Vec<Vec<usize>>,
    budget: usize,
    /// Per variable: line start offsets into `line_positions`.
    line_offsets: Vec<Vec<u32>>,
    line_positions: Vec<Vec<u32>>,
}

impl Layout {
    fn new(set: TrimmedPointSet) -> Layout {
        let n = set.nvars();
        let prefix = set.prefix();
        let q = set.q() as usize;
        let budget = set.budget().unwrap_or(0);
        let mut completions = vec![vec![0usize; budget + 1]; n + 1];
        for i in (0..=n).rev() {
            for r in 0..=budget {
                completions[i][r] = if i == n {
                    1
                } else if i >= prefix {
                    completions[i + 1][r] * q
                } else {
                    (0..=(q - 1).min(r)).map(|y| completions[i + 1][r - y]).sum()
                };
            }
        }
        let mut layout = Layout {
            set,
            len: 0,
            points: Vec::new(),
            completions,
            budget,
            line_offsets: vec![Vec::new(); n],
            line_positions: vec![Vec::new(); n],
        };
        if set.budget().is_none() {
            return layout;
        }
        layout.len = layout.completions[0][budget];
        layout.points.reserve(layout.len * n);
        for p in set.iter() {
            layout.points.extend_from_slice(&p);
        }
        debug_assert_eq!(layout.points.len(), layout.len * n);

        let mut scratch = vec![0u16; n];
        for pos in 0..layout.len {
            let x = &layout.points[pos * n..(pos + 1) * n];
            let used: usize = x[..prefix].iter().map(|&e| e as usize).sum();
            for v in 0..n {
                if x[v] != 0 {
                    continue;
                }
                let top = if v < prefix { (q - 1).min(budget - used) } else { q - 1 };
                scratch.copy_from_slice(x);
                layout.line_offsets[v].push(layout.line_positions[v].len() as u32);
                for k in 0..=top {
                    scratch[v] = k as u16;
                    let r = layout.rank(&scratch);
                    layout.line_positions[v].push(r as u32);
                }
            }
        }
        for v in 0..n {
            let end = layout.line_positions[v].len() as u32;
            layout.line_offsets[v].push(end);
        }
        layout
    }

    fn rank(&self, x: &[u16]) -> usize {
        let prefix = self.set.prefix();
        let mut r = self.budget;
        let mut pos = 0;
        for (i, &xi) in x.iter().enumerate() {
            let row = &self.completions[i + 1];
            for y in 0..xi as usize {
                pos += row[if i < prefix { r - y } else { 0 }];
            }
            if i < prefix {
                r -= xi as usize;
            }
        }
        pos
    }

    fn point(&self, pos: usize) -> &[u16] {
        let n = self.set.nvars();
        &self.points[pos * n..(pos + 1) * n]
    }
}

static TABLES: LazyLock<Mutex<HashMap<u32, Arc<NewtonTables>>>> = LazyLock::new(|| Mutex::new(HashMap::new()));
static LAYOUTS: LazyLock<Mutex<HashMap<TrimmedPointSet, Arc<Layout>>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

fn tables_for(field: &Field) -> Result<Arc<NewtonTables>> {
    if field.order() > MAX_TRANSFORM_ORDER {
        return Err(Error::InvalidParams(format!(
            "trimmed transforms support q <= {MAX_TRANSFORM_ORDER}, got {}",
            field.order()
        )));
    }
    let mut cache = TABLES.lock().unwrap();
    Ok(Arc::clone(
        cache
            .entry(field.order())
            .or_insert_with(|| Arc::new(NewtonTables::new(field))),
    ))
}

fn layout_for(set: &TrimmedPointSet) -> Arc<Layout> {
    // Budgets beyond the reachable prefix sum describe the same set.
    let key = match set.budget() {
        Some(b) => TrimmedPointSet::new(set.q(), set.nvars(), b as i64, set.grid()).unwrap(),
        None => TrimmedPointSet::new(set.q(), set.nvars(), -1, set.grid()).unwrap(),
    };
    if let Some(l) = LAYOUTS.lock().unwrap().get(&key) {
        return Arc::clone(l);
    }
    // Built outside the lock; a racing duplicate is identical.
    let built = Arc::new(Layout::new(key));
    Arc::clone(LAYOUTS.lock().unwrap().entry(key).or_insert(built))
}

#[derive(Clone, Copy)]
enum Shape {
    /// `out[k] = Σ_{i ≥ k} m[k][i] in[i]`
    Upper,
    /// `out[s] = Σ_{k ≤ s} m[s][k] in[k]`
    Lower,
}

fn pass(field: &Field, layout: &Layout, q: usize, mat: &[Elem], shape: Shape, data: &mut [Elem]) -> u64 {
    let mut ops = 0u64;
    let mut buf = vec![Elem::ZERO; q];
    let mut out = vec![Elem::ZERO; q];
    for v in 0..layout.set.nvars() {
        let offsets = &layout.line_offsets[v];
        let positions = &layout.line_positions[v];
        for w in offsets.windows(2) {
            let line = &positions[w[0] as usize..w[1] as usize];
            let len = line.len();
            if len == 1 {
                continue;
            }
            for (b, &p) in buf.iter_mut().zip(line) {
                *b = data[p as usize];
            }
            for (row, slot) in out.iter_mut().enumerate().take(len) {
                let range = match shape {
                    Shape::Upper => row..len,
                    Shape::Lower => 0..row + 1,
                };
                let mut acc = Elem::ZERO;
                for col in range {
                    acc = field.add(acc, field.mul(mat[row * q + col], buf[col]));
                    ops += 1;
                }
                *slot = acc;
            }
            for (&p, &o) in line.iter().zip(&out) {
                data[p as usize] = o;
            }
        }
    }
    ops
}

fn check_degree(p: &Polynomial, set: &TrimmedPointSet) -> Result<()> {
    let deg = p.prefix_degree(set.prefix());
    if !p.is_zero() && (set.delta() < 0 || deg as i64 > set.delta()) {
        return Err(Error::DegreeTooHigh {
            degree: deg,
            bound: set.delta(),
        });
    }
    Ok(())
}

/// Values of `p` on `T_{n-b,Δ} × F_q^b`.
///
/// Requires the degree of `p` in its first `n - b` variables to be at most
/// `Δ`; use [`evaluate_on`] for polynomials of higher degree.
pub fn evaluate_trimmed(p: &Polynomial, delta: i64, grid: usize) -> Result<TrimmedEvaluation> {
    evaluate_trimmed_counted(p, delta, grid).map(|(ev, _)| ev)
}

/// [`evaluate_trimmed`], also returning the number of field multiply-adds.
pub fn evaluate_trimmed_counted(p: &Polynomial, delta: i64, grid: usize) -> Result<(TrimmedEvaluation, u64)> {
    let field = p.field();
    let set = TrimmedPointSet::new(field.order(), p.nvars(), delta, grid)?;
    check_degree(p, &set)?;
    let tables = tables_for(field)?;
    let layout = layout_for(&set);
    let mut data = vec![Elem::ZERO; layout.len];
    for (m, c) in p.terms() {
        data[layout.rank(m.exponents())] = c;
    }
    let q = tables.q;
    let mut ops = 0;
    if !tables.monomial_is_newton {
        ops += pass(field, &layout, q, &tables.to_newton, Shape::Upper, &mut data);
    }
    ops += pass(field, &layout, q, &tables.eval, Shape::Lower, &mut data);
    Ok((TrimmedEvaluation::new(field, set, data)?, ops))
}

/// The unique polynomial with monomials in the shape of `ev`'s point set that
/// takes the given values. For `b = 0` this is the unique polynomial of total
/// degree at most `Δ`.
pub fn interpolate_trimmed(ev: &TrimmedEvaluation) -> Result<Polynomial> {
    interpolate_values(ev.field(), ev.points(), ev.values())
}

/// Interpolates raw values given in canonical order of `set`.
pub fn interpolate_values(field: &Arc<Field>, set: &TrimmedPointSet, values: &[Elem]) -> Result<Polynomial> {
    interpolate_values_counted(field, set, values).map(|(p, _)| p)
}

/// [`interpolate_values`], also returning the number of field multiply-adds.
pub fn interpolate_values_counted(
    field: &Arc<Field>,
    set: &TrimmedPointSet,
    values: &[Elem],
) -> Result<(Polynomial, u64)> {
    if values.len() != set.len() {
        return Err(Error::SizeMismatch {
            expected: set.len(),
            got: values.len(),
        });
    }
    let tables = tables_for(field)?;
    let layout = layout_for(set);
    let q = tables.q;
    let mut data = values.to_vec();
    let mut ops = pass(field, &layout, q, &tables.divided, Shape::Lower, &mut data);
    if !tables.monomial_is_newton {
        ops += pass(field, &layout, q, &tables.to_monomial, Shape::Upper, &mut data);
    }
    let poly = Polynomial::from_sorted_terms(
        field,
        set.nvars(),
        data.iter()
            .enumerate()
            .map(|(pos, &c)| (Monomial::from_exponents(layout.point(pos)), c)),
    );
    Ok((poly, ops))
}

/// Values of `p` on `T_{n-b,Δ} × F_q^b` for a polynomial of any degree.
///
/// When the prefix degree of `p` exceeds `Δ`, the transform runs on the
/// larger set `T_{n-b,deg} × F_q^b` and the result is restricted to the
/// requested points (a restriction of a lexicographic order is still
/// lexicographic).
pub fn evaluate_on(p: &Polynomial, delta: i64, grid: usize) -> Result<TrimmedEvaluation> {
    let field = p.field();
    let set = TrimmedPointSet::new(field.order(), p.nvars(), delta, grid)?;
    let deg = p.prefix_degree(set.prefix()) as i64;
    if delta < 0 {
        return TrimmedEvaluation::new(field, set, Vec::new());
    }
    if deg <= delta {
        return evaluate_trimmed(p, delta, grid);
    }
    let wide = evaluate_trimmed(p, deg, grid)?;
    let layout = layout_for(wide.points());
    let prefix = set.prefix();
    let values = wide
        .values()
        .iter()
        .enumerate()
        .filter(|(pos, _)| layout.point(*pos)[..prefix].iter().map(|&e| e as i64).sum::<i64>() <= delta)
        .map(|(_, &v)| v)
        .collect();
    TrimmedEvaluation::new(field, set, values)
}

/// Interpolation by Gaussian elimination on the full `|T| × |T|` system.
///
/// Cubic in the number of points; an independent check on
/// [`interpolate_trimmed`] for small sets.
pub fn interpolate_dense(ev: &TrimmedEvaluation) -> Result<Polynomial> {
    let field = ev.field();
    let set = ev.points();
    let pts: Vec<Vec<u16>> = set.iter().collect();
    let n = pts.len();
    let width = n + 1;
    let mut rows: Vec<Elem> = Vec::with_capacity(n * width);
    for (x, &v) in pts.iter().zip(ev.values()) {
        for m in &pts {
            let mut t = Elem::ONE;
            for (&xi, &e) in x.iter().zip(m) {
                t = field.mul(t, field.pow(Elem::from_raw(xi as u32), e as u64));
            }
            rows.push(t);
        }
        rows.push(v);
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !rows[r * width + col].is_zero())
            .ok_or_else(|| Error::InvalidParams("singular interpolation system".into()))?;
        if pivot != col {
            for j in 0..width {
                rows.swap(pivot * width + j, col * width + j);
            }
        }
        let inv = field.inv(rows[col * width + col])?;
        for j in col..width {
            rows[col * width + j] = field.mul(rows[col * width + j], inv);
        }
        for r in 0..n {
            let factor = rows[r * width + col];
            if r == col || factor.is_zero() {
                continue;
            }
            for j in col..width {
                let sub = field.mul(factor, rows[col * width + j]);
                rows[r * width + j] = field.sub(rows[r * width + j], sub);
            }
        }
    }
    Ok(Polynomial::from_sorted_terms(
        field,
        set.nvars(),
        pts.iter()
            .enumerate()
            .map(|(i, m)| (Monomial::from_exponents(m), rows[i * width + n])),
    ))
}

/// Writes `evals <q> <n> <delta> <b>` followed by one value per line.
pub fn write_evaluation(ev: &TrimmedEvaluation) -> String {
    let s = ev.points();
    let mut out = format!("evals {} {} {} {}\n", s.q(), s.nvars(), s.delta(), s.grid());
    for v in ev.values() {
        writeln!(out, "{v}").unwrap();
    }
    out
}

pub fn parse_evaluation(text: &str) -> Result<TrimmedEvaluation> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 || toks[0] != "evals" {
        return Err(parse_err(line, "expected `evals <q> <n> <delta> <b>`"));
    }
    let num = |t: &str| -> Result<i64> { t.parse().map_err(|_| parse_err(line, format!("bad number `{t}`"))) };
    let (q, n, delta, b) = (num(toks[1])?, num(toks[2])?, num(toks[3])?, num(toks[4])?);
    if q < 2 || n < 0 || b < 0 {
        return Err(parse_err(line, "invalid header values"));
    }
    let field = Arc::new(Field::new(q as u64).map_err(|e| parse_err(line, e.to_string()))?);
    let set =
        TrimmedPointSet::new(q as u32, n as usize, delta, b as usize).map_err(|e| parse_err(line, e.to_string()))?;
    let values = lines
        .map(|(line, l)| {
            let v: u64 = l.parse().map_err(|_| parse_err(line, format!("bad value `{l}`")))?;
            field.elem(v).map_err(|e| parse_err(line, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    TrimmedEvaluation::new(&field, set, values)
}
