//! Partitions, Virasoro words, and normal ordering on a lowest-weight vector.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use crate::exact::{join_terms, rat, term_text, BivarPoly, Rat};
use crate::Error;

/// A partition `n_1 ≥ … ≥ n_m`, standing for `L_{-n_1} ⋯ L_{-n_m}`.
///
/// The derived order is lexicographic on parts, which for equal weight is
/// ascending by largest part with ties broken on the remainder.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Sorts `parts` into non-increasing order. Panics on a zero part.
    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&p| p > 0), "partition parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of parts equal to `n`.
    pub fn multiplicity(&self, n: u32) -> usize {
        self.0.iter().filter(|&&p| p == n).count()
    }

    /// The word `L_{-n_1} ⋯ L_{-n_m}`.
    pub fn word(&self) -> VirWord {
        VirWord(self.0.iter().map(|&n| -(n as i32)).collect())
    }

    fn tail(&self) -> Partition {
        Partition(self.0[1..].to_vec())
    }

    fn prepend(&self, n: u32) -> Partition {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(n);
        v.extend_from_slice(&self.0);
        Partition(v)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut i = 0;
        while i < self.0.len() {
            let n = self.0[i];
            let run = self.0[i..].iter().take_while(|&&x| x == n).count();
            if run == 1 {
                write!(f, "L(-{n})")?;
            } else {
                write!(f, "L(-{n})^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

/// All partitions of `l` in canonical order.
pub fn partitions_of(l: u32) -> Vec<Partition> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in 1..=max.min(rem) {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(l, l, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Number of partitions of `n` (Euler's pentagonal recurrence).
pub fn partition_count(n: usize) -> u64 {
    partition_counts(n)[n]
}

/// `p(0), …, p(n)`.
pub fn partition_counts(n: usize) -> Vec<u64> {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut acc: i128 = 0;
        for k in 1i64.. {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > m {
                break;
            }
            let sign: i128 = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[m - g1] as i128;
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= m {
                acc += sign * p[m - g2] as i128;
            }
        }
        p[m] = acc as u64;
    }
    p
}

/// An ordered product of modes `L_{i_1} ⋯ L_{i_m}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct VirWord(Vec<i32>);

impl VirWord {
    pub fn new(factors: Vec<i32>) -> Self {
        Self(factors)
    }

    pub fn factors(&self) -> &[i32] {
        &self.0
    }

    /// Concatenation `self · other`.
    pub fn then(&self, other: &VirWord) -> VirWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        VirWord(v)
    }
}

impl fmt::Display for VirWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for n in &self.0 {
            write!(f, "L({n})")?;
        }
        Ok(())
    }
}

/// The anti-involution: reverse the word and negate every index.
pub fn adjoint(w: &VirWord) -> VirWord {
    VirWord(w.0.iter().rev().map(|n| -n).collect())
}

/// A finite combination of PBW monomials applied to the lowest-weight vector.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LWVectorExpr {
    terms: BTreeMap<Partition, BivarPoly>,
}

impl LWVectorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The lowest-weight vector itself.
    pub fn lw() -> Self {
        Self::from_partition(Partition::default())
    }

    pub fn from_partition(p: Partition) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(p, BivarPoly::one());
        Self { terms }
    }

    /// Builds `Σ coords[i] · basis[i]`.
    pub fn from_coords(basis: &[Partition], coords: &[Rat]) -> Self {
        let mut v = Self::zero();
        for (p, x) in basis.iter().zip(coords) {
            v.add_term(p.clone(), BivarPoly::constant(x.clone()));
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &BivarPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Partition) -> BivarPoly {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, p: Partition, coef: BivarPoly) {
        if coef.is_zero() {
            return;
        }
        let e = self.terms.entry(p).or_default();
        *e = &*e + &coef;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Adds `coef · other` in place.
    pub fn add_scaled(&mut self, other: &LWVectorExpr, coef: &BivarPoly) {
        if coef.is_zero() {
            return;
        }
        for (p, v) in &other.terms {
            self.add_term(p.clone(), v * coef);
        }
    }

    pub fn scale_poly(&self, coef: &BivarPoly) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, coef);
        out
    }

    pub fn add(&self, other: &LWVectorExpr) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &BivarPoly::one());
        out
    }

    pub fn sub(&self, other: &LWVectorExpr) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &BivarPoly::from_int(-1));
        out
    }

    /// Substitutes numeric `(c, h)` into every coefficient.
    pub fn eval(&self, c: &Rat, h: &Rat) -> Self {
        let mut out = Self::zero();
        for (p, v) in &self.terms {
            out.add_term(p.clone(), BivarPoly::constant(v.eval(c, h)));
        }
        out
    }

    /// Coordinates along `basis` (terms outside `basis` are ignored).
    /// Panics if a coefficient is not constant.
    pub fn coords(&self, basis: &[Partition]) -> Vec<Rat> {
        basis
            .iter()
            .map(|p| {
                self.coeff(p)
                    .as_constant()
                    .expect("coordinates need constant coefficients")
            })
            .collect()
    }
}

impl fmt::Display for LWVectorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .terms
            .iter()
            .map(|(p, v)| {
                let mono = if p.is_empty() { String::new() } else { p.to_string() };
                match v.as_constant() {
                    Some(r) => term_text(&r, &mono),
                    None if mono.is_empty() => (false, format!("({v})")),
                    None => (false, format!("({v})*{mono}")),
                }
            })
            .collect();
        f.write_str(&join_terms(terms))
    }
}

type ModeCache = RwLock<HashMap<(i32, Partition), LWVectorExpr>>;

fn cache() -> &'static ModeCache {
    static CACHE: OnceLock<ModeCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `L_n` applied to the PBW monomial `p` on the lowest-weight vector.
pub fn apply_mode_to_monomial(n: i32, p: &Partition) -> LWVectorExpr {
    let key = (n, p.clone());
    if let Some(v) = cache().read().expect("mode cache poisoned").get(&key) {
        return v.clone();
    }
    let v = compute_mode(n, p);
    cache()
        .write()
        .expect("mode cache poisoned")
        .insert(key, v.clone());
    v
}

fn compute_mode(n: i32, p: &Partition) -> LWVectorExpr {
    if n == 0 {
        let coef = &BivarPoly::h() + &BivarPoly::from_int(i64::from(p.weight()));
        return LWVectorExpr::from_partition(p.clone()).scale_poly(&coef);
    }
    if n > 0 && p.is_empty() {
        return LWVectorExpr::zero();
    }
    if n < 0 && (p.is_empty() || (-n) as u32 >= p.parts()[0]) {
        return LWVectorExpr::from_partition(p.prepend((-n) as u32));
    }
    // L_n L_{-m} X = L_{-m} (L_n X) + [L_n, L_{-m}] X
    let m = p.parts()[0] as i32;
    let rest = p.tail();
    let mut out = apply_mode(-m, &apply_mode_to_monomial(n, &rest));
    let bracket = apply_mode_to_monomial(n - m, &rest);
    out.add_scaled(&bracket, &BivarPoly::from_int(i64::from(n + m)));
    if n == m {
        let n = i64::from(n);
        let central = BivarPoly::c().scale(&rat(n * n * n - n, 12));
        out.add_scaled(&LWVectorExpr::from_partition(rest), &central);
    }
    out
}

/// `L_n` applied to a vector.
pub fn apply_mode(n: i32, v: &LWVectorExpr) -> LWVectorExpr {
    let mut out = LWVectorExpr::zero();
    for (p, coef) in &v.terms {
        out.add_scaled(&apply_mode_to_monomial(n, p), coef);
    }
    out
}

/// Applies `w` to `v`, rightmost factor first.
pub fn act_on_lw(w: &VirWord, v: &LWVectorExpr) -> LWVectorExpr {
    w.0.iter().rev().fold(v.clone(), |acc, &n| apply_mode(n, &acc))
}

/// `⟨b_i·1, b_j·1⟩`: the vacuum coefficient of `b_i† b_j · 1`.
pub fn shapovalov_entry(b_i: &Partition, b_j: &Partition) -> Result<BivarPoly, Error> {
    if b_i.weight() != b_j.weight() {
        return Err(Error::WeightMismatch(b_i.weight(), b_j.weight()));
    }
    let v = act_on_lw(&adjoint(&b_i.word()), &LWVectorExpr::from_partition(b_j.clone()));
    Ok(v.coeff(&Partition::default()))
}
