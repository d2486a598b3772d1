//! Exact rationals, sparse polynomials in `c` and `h`, and matrices over both.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::Error;

/// Arbitrary-precision rational, always in lowest terms.
pub type Rat = BigRational;

/// A column vector of rationals.
pub type RatVector = Vec<Rat>;

/// Builds `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let bad = || Error::ParseRat(s.to_string());
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// Factorial as a rational.
pub fn factorial(n: usize) -> Rat {
    (1..=n).fold(Rat::one(), |acc, i| acc * int(i as i64))
}

/// Binomial coefficient `C(n, k)` as a rational (zero when `k > n`).
pub fn binomial(n: usize, k: usize) -> Rat {
    if k > n {
        return Rat::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Sparse polynomial in `c` and `h` with rational coefficients.
///
/// Keys are exponent pairs `(e_c, e_h)`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn c() -> Self {
        Self::term(Rat::one(), 1, 0)
    }

    pub fn h() -> Self {
        Self::term(Rat::one(), 0, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn constant(r: Rat) -> Self {
        Self::term(r, 0, 0)
    }

    /// The monomial `coef * c^e_c * h^e_h`.
    pub fn term(coef: Rat, e_c: u32, e_h: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert((e_c, e_h), coef);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates `((e_c, e_h), coef)`.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    /// Largest power of `h` present (0 for the zero polynomial).
    pub fn degree_h(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// Largest power of `c` present (0 for the zero polynomial).
    pub fn degree_c(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    fn add_term(&mut self, key: (u32, u32), coef: Rat) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Adds `coef * other` in place.
    pub fn add_scaled(&mut self, other: &BivarPoly, coef: &Rat) {
        if coef.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(*k, v * coef);
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * r)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `(∂/∂h)^order`.
    pub fn diff_h(&self, order: u32) -> Self {
        let mut out = Self::zero();
        for (&(ec, eh), v) in &self.terms {
            if eh >= order {
                let f: i64 = ((eh - order + 1)..=eh).map(i64::from).product();
                out.add_term((ec, eh - order), v * int(f));
            }
        }
        out
    }

    pub fn eval(&self, c: &Rat, h: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (&(ec, eh), v) in &self.terms {
            acc += v * pow_rat(c, ec) * pow_rat(h, eh);
        }
        acc
    }

    /// Substitutes a value for `c`, keeping `h` symbolic.
    pub fn eval_c(&self, c: &Rat) -> Self {
        let mut out = Self::zero();
        for (&(ec, eh), v) in &self.terms {
            out.add_term((0, eh), v * pow_rat(c, ec));
        }
        out
    }

    /// Exact quotient, or `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &BivarPoly) -> Option<BivarPoly> {
        let (num, sn) = IntPoly::from_poly(self);
        let (den, sd) = IntPoly::from_poly(other);
        let q = num.div_exact_rat(&den)?;
        Some(q.scale(&(sd / sn)))
    }
}

fn pow_rat(x: &Rat, e: u32) -> Rat {
    num_traits::pow(x.clone(), e as usize)
}

impl From<Rat> for BivarPoly {
    fn from(r: Rat) -> Self {
        Self::constant(r)
    }
}

impl Add for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Sub for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }
}

impl Mul for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (&(a, b), x) in &self.terms {
            for (&(c, d), y) in &rhs.terms {
                out.add_term((a + c, b + d), x * y);
            }
        }
        out
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BivarPoly {
            type Output = BivarPoly;
            fn $m(self, rhs: BivarPoly) -> BivarPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn monomial_text(ec: u32, eh: u32) -> String {
    let mut parts = Vec::new();
    match ec {
        0 => {}
        1 => parts.push("c".to_string()),
        e => parts.push(format!("c^{e}")),
    }
    match eh {
        0 => {}
        1 => parts.push("h".to_string()),
        e => parts.push(format!("h^{e}")),
    }
    parts.join("*")
}

/// Formats one signed term as `(is_negative, body)`, e.g. `3*c/2`.
pub(crate) fn term_text(coef: &Rat, mono: &str) -> (bool, String) {
    let neg = coef.is_negative();
    let a = coef.abs();
    let (n, d) = (a.numer(), a.denom());
    let mut body = if mono.is_empty() {
        n.to_string()
    } else if n.is_one() {
        mono.to_string()
    } else {
        format!("{n}*{mono}")
    };
    if !d.is_one() {
        body = format!("{body}/{d}");
    }
    (neg, body)
}

/// Joins signed terms as `a + b - c`.
pub(crate) fn join_terms(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (neg, body)) in terms.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => {}
            (0, true) => s.push('-'),
            (_, false) => s.push_str(" + "),
            (_, true) => s.push_str(" - "),
        }
        s.push_str(&body);
    }
    s
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<_> = self.terms.iter().collect();
        keys.sort_by(|(a, _), (b, _)| (b.1, b.0).cmp(&(a.1, a.0)));
        let terms = keys
            .into_iter()
            .map(|(&(ec, eh), v)| term_text(v, &monomial_text(ec, eh)))
            .collect();
        f.write_str(&join_terms(terms))
    }
}

/// Integer-coefficient polynomial used inside fraction-free elimination.
/// Keys are `(e_h, e_c)` so the last key is the lex-leading term.
#[derive(Clone, Debug, Default, PartialEq)]
struct IntPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl IntPoly {
    /// Returns `(q, s)` with `q = s * p` integral and `s > 0`.
    fn from_poly(p: &BivarPoly) -> (IntPoly, Rat) {
        let mut l = BigInt::one();
        for v in p.terms.values() {
            l = l.lcm(v.denom());
        }
        let s = Rat::from_integer(l.clone());
        let terms = p
            .terms
            .iter()
            .map(|(&(ec, eh), v)| ((eh, ec), (v * &s).to_integer()))
            .collect();
        (IntPoly { terms }, s)
    }

    fn to_poly(&self) -> BivarPoly {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(eh, ec), v)| ((ec, eh), Rat::from_integer(v.clone())))
                .collect(),
        }
    }

    fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), BigInt::one());
        IntPoly { terms }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn mul(&self, rhs: &IntPoly) -> IntPoly {
        let mut terms: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        for (&(a, b), x) in &self.terms {
            for (&(c, d), y) in &rhs.terms {
                *terms.entry((a + c, b + d)).or_default() += x * y;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        IntPoly { terms }
    }

    fn sub(&self, rhs: &IntPoly) -> IntPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            *terms.entry(*k).or_default() -= v;
        }
        terms.retain(|_, v| !v.is_zero());
        IntPoly { terms }
    }

    fn neg(&self) -> IntPoly {
        IntPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    /// Exact division with integer quotient; `None` if not exact.
    fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        let (&(dh, dc), dl) = d.terms.iter().next_back()?;
        let mut rem = self.terms.clone();
        let mut quot = BTreeMap::new();
        while let Some((&(rh, rc), rl)) = rem.iter().next_back() {
            if rh < dh || rc < dc {
                return None;
            }
            let (qc, r) = rl.div_rem(dl);
            if !r.is_zero() {
                return None;
            }
            let qk = (rh - dh, rc - dc);
            for (&(a, b), v) in &d.terms {
                let key = (a + qk.0, b + qk.1);
                let e = rem.entry(key).or_default();
                *e -= v * &qc;
                if e.is_zero() {
                    rem.remove(&key);
                }
            }
            quot.insert(qk, qc);
        }
        Some(IntPoly { terms: quot })
    }

    /// Exact division over the rationals.
    fn div_exact_rat(&self, d: &IntPoly) -> Option<BivarPoly> {
        let (&(dh, dc), dl) = d.terms.iter().next_back()?;
        let dl = Rat::from_integer(dl.clone());
        let mut rem: BTreeMap<(u32, u32), Rat> = self
            .terms
            .iter()
            .map(|(k, v)| (*k, Rat::from_integer(v.clone())))
            .collect();
        let mut quot = BivarPoly::zero();
        while let Some((&(rh, rc), rl)) = rem.iter().next_back() {
            if rh < dh || rc < dc {
                return None;
            }
            let qc = rl / &dl;
            let qk = (rh - dh, rc - dc);
            for (&(a, b), v) in &d.terms {
                let key = (a + qk.0, b + qk.1);
                let e = rem.entry(key).or_insert_with(Rat::zero);
                *e -= Rat::from_integer(v.clone()) * &qc;
                if e.is_zero() {
                    rem.remove(&key);
                }
            }
            quot.add_term((qk.1, qk.0), qc);
        }
        Some(quot)
    }
}

/// `(∂/∂h)^order p`.
pub fn poly_diff_h(p: &BivarPoly, order: u32) -> BivarPoly {
    p.diff_h(order)
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix with `m[i][i + offset] = 1`, i.e. the shift `D_{n,offset}`.
    pub fn shift(n: usize, offset: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n.saturating_sub(offset) {
            m.set(i, i + offset, Rat::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> RatVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> RatVector {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> RatMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * r).collect(),
        }
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Sub-matrix of size `nr x nc` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> RatMatrix {
        let mut out = Self::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    /// Columns selected by index, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols)).fold(Rat::zero(), |acc, i| acc + self.get(i, i))
    }

    /// Appends `v` as an extra column.
    pub fn augment(&self, v: &[Rat]) -> RatMatrix {
        assert_eq!(self.rows, v.len());
        let mut out = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            out.set(i, self.cols, v[i].clone());
        }
        out
    }

    /// Reduced row echelon form with leftmost pivots; returns pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let (ech, pivots) = self.integer_echelon();
        let mut m: Vec<Vec<Rat>> = ech
            .into_iter()
            .take(pivots.len())
            .map(|row| row.into_iter().map(Rat::from_integer).collect())
            .collect();
        for i in (0..pivots.len()).rev() {
            let pc = pivots[i];
            let inv = m[i][pc].recip();
            for v in m[i][pc..].iter_mut() {
                *v *= &inv;
            }
            let (above, rest) = m.split_at_mut(i);
            let pivot_row = &rest[0];
            above.par_iter_mut().for_each(|row| {
                let f = row[pc].clone();
                if f.is_zero() {
                    return;
                }
                for (x, p) in row[pc..].iter_mut().zip(&pivot_row[pc..]) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            });
        }
        let mut out = RatMatrix::zeros(self.rows, self.cols);
        for (i, row) in m.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        (out, pivots)
    }

    /// Fraction-free (Bareiss) row echelon form after clearing row denominators.
    fn integer_echelon(&self) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter()
                    .map(|x| x.numer() * (&l / x.denom()))
                    .collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for col in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows)
                .filter(|&i| !a[i][col].is_zero())
                .min_by_key(|&i| a[i][col].bits())
            else {
                continue;
            };
            a.swap(p, r);
            let (top, below) = a.split_at_mut(r + 1);
            let pivot_row = &top[r];
            let piv = &pivot_row[col];
            below.par_iter_mut().for_each(|row| {
                let f = std::mem::take(&mut row[col]);
                for j in col + 1..row.len() {
                    let v = piv * &row[j] - &f * &pivot_row[j];
                    row[j] = v / &prev;
                }
            });
            prev = piv.clone();
            pivots.push(col);
            r += 1;
        }
        (a, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.integer_echelon().1.len()
    }

    /// Determinant by Gaussian elimination. Panics if not square.
    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut m = self.clone();
        let mut det = Rat::one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                return Rat::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let piv = m.get(col, col).clone();
            det *= &piv;
            for i in col + 1..m.rows {
                if m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col) / &piv;
                for j in col..m.cols {
                    let v = m.get(i, j) - &f * m.get(col, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }
}

/// Basis of the right kernel: one vector per free column, that column set to 1.
pub fn rat_kernel(m: &RatMatrix) -> Vec<RatVector> {
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); m.cols];
            v[f] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, f).clone();
            }
            v
        })
        .collect()
}

/// One solution of `m x = rhs` with free variables zero, or `None`.
pub fn rat_solve(m: &RatMatrix, rhs: &[Rat]) -> Option<RatVector> {
    let (r, pivots) = m.augment(rhs).rref();
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); m.cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, m.cols).clone();
    }
    Some(x)
}

/// Solves `m X = rhs` column by column (free variables zero), or `None` if any column is inconsistent.
pub fn rat_solve_many(m: &RatMatrix, rhs: &RatMatrix) -> Option<RatMatrix> {
    assert_eq!(m.rows, rhs.rows, "row count mismatch");
    let mut aug = RatMatrix::zeros(m.rows, m.cols + rhs.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.get(i, j).clone());
        }
        for j in 0..rhs.cols {
            aug.set(i, m.cols + j, rhs.get(i, j).clone());
        }
    }
    let (r, pivots) = aug.rref();
    if pivots.last().is_some_and(|&p| p >= m.cols) {
        return None;
    }
    let mut x = RatMatrix::zeros(m.cols, rhs.cols);
    for (row, &p) in pivots.iter().enumerate() {
        for j in 0..rhs.cols {
            x.set(p, j, r.get(row, m.cols + j).clone());
        }
    }
    Some(x)
}

/// Dense matrix of [`BivarPoly`], row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BivarPoly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BivarPoly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BivarPoly::one());
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<BivarPoly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BivarPoly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BivarPoly) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<BivarPoly>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn map(&self, f: impl Fn(&BivarPoly) -> BivarPoly + Sync + Send) -> PolyMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.par_iter().map(f).collect(),
        }
    }

    pub fn diff_h(&self, order: u32) -> PolyMatrix {
        self.map(|p| p.diff_h(order))
    }

    pub fn eval(&self, c: &Rat, h: &Rat) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.par_iter().map(|p| p.eval(c, h)).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
///
/// Rows are first scaled to integer coefficients; the scale is divided out
/// at the end.
pub fn fraction_free_det(m: &PolyMatrix) -> Result<BivarPoly, Error> {
    let n = m.rows;
    if n != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if n == 0 {
        return Ok(BivarPoly::one());
    }
    let mut scale = Rat::one();
    let mut a: Vec<Vec<IntPoly>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut l = BigInt::one();
        for j in 0..n {
            for v in m.get(i, j).terms.values() {
                l = l.lcm(v.denom());
            }
        }
        let s = Rat::from_integer(l);
        scale *= &s;
        a.push(
            (0..n)
                .map(|j| IntPoly::from_poly(&m.get(i, j).scale(&s)).0)
                .collect(),
        );
    }
    let mut negate = false;
    let mut prev = IntPoly::one();
    for k in 0..n - 1 {
        let pivot = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| a[i][k].terms.len());
        let Some(p) = pivot else {
            return Ok(BivarPoly::zero());
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let prow = &head[k];
        tail.par_iter_mut().for_each(|row| {
            let f = row[k].clone();
            for j in k + 1..n {
                let t = row[j].mul(&prow[k]);
                let t = if f.is_zero() || prow[j].is_zero() {
                    t
                } else {
                    t.sub(&f.mul(&prow[j]))
                };
                row[j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            row[k] = IntPoly::default();
        });
        prev = a[k][k].clone();
    }
    let mut d = a[n - 1][n - 1].clone();
    if negate {
        d = d.neg();
    }
    Ok(d.to_poly().scale(&scale.recip()))
}
