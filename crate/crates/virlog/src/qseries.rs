//! Truncated `q`-series with coefficients polynomial in `L`, and Virasoro pseudo-traces.

use std::fmt;

use num_traits::{One, Zero};

use crate::exact::{factorial, int, join_terms, rat_solve_many, term_text, Rat, RatMatrix};
use crate::induced::{block_gram, classify, CaseTag};
use crate::vircore::partition_counts;
use crate::Error;

/// Polynomial in the formal variable `L`, stored densely by ascending power.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LogPoly(Vec<Rat>);

impl LogPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        LogPoly(coeffs)
    }

    pub fn zero() -> Self {
        LogPoly(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// `coef · L^deg`.
    pub fn monomial(coef: Rat, deg: usize) -> Self {
        let mut v = vec![Rat::zero(); deg + 1];
        v[deg] = coef;
        Self::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Coefficient of `L^j`.
    pub fn coeff(&self, j: usize) -> Rat {
        self.0.get(j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.0
    }

    pub fn add(&self, other: &LogPoly) -> LogPoly {
        let n = self.0.len().max(other.0.len());
        Self::new((0..n).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    pub fn sub(&self, other: &LogPoly) -> LogPoly {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, r: &Rat) -> LogPoly {
        Self::new(self.0.iter().map(|c| c * r).collect())
    }

    pub fn mul(&self, other: &LogPoly) -> LogPoly {
        if self.is_zero() || other.is_zero() {
            return LogPoly::zero();
        }
        let mut v = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    /// `d/dL`.
    pub fn derivative(&self) -> LogPoly {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * int(j as i64))
                .collect(),
        )
    }
}

impl fmt::Display for LogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let mono = match j {
                    0 => String::new(),
                    1 => "L".to_string(),
                    _ => format!("L^{j}"),
                };
                term_text(c, &mono)
            })
            .collect();
        f.write_str(&join_terms(terms))
    }
}

/// `q^offset · Σ_{ℓ=0}^{lmax} coeffs[ℓ] q^ℓ`, known exactly up to `q^{offset+lmax}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogQSeries {
    offset: Rat,
    coeffs: Vec<LogPoly>,
}

impl LogQSeries {
    /// Panics if `coeffs` is empty.
    pub fn new(offset: Rat, coeffs: Vec<LogPoly>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        LogQSeries { offset, coeffs }
    }

    pub fn zero(offset: Rat, lmax: usize) -> Self {
        Self::new(offset, vec![LogPoly::zero(); lmax + 1])
    }

    pub fn offset(&self) -> &Rat {
        &self.offset
    }

    pub fn lmax(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `q^{offset+ℓ}`.
    pub fn coeff(&self, l: usize) -> &LogPoly {
        &self.coeffs[l]
    }

    pub fn coeffs(&self) -> &[LogPoly] {
        &self.coeffs
    }

    /// Sum, keeping only the range where both summands are known.
    pub fn add(&self, other: &LogQSeries) -> Result<LogQSeries, Error> {
        let diff = &other.offset - &self.offset;
        if !diff.is_integer() {
            return Err(Error::OffsetMismatch(
                self.offset.to_string(),
                other.offset.to_string(),
            ));
        }
        let offset = self.offset.clone().min(other.offset.clone());
        let top = (&self.offset + int(self.lmax() as i64))
            .min(&other.offset + int(other.lmax() as i64));
        let lmax = (top - &offset).to_integer();
        if lmax < num_bigint::BigInt::zero() {
            return Err(Error::OffsetMismatch(
                self.offset.to_string(),
                other.offset.to_string(),
            ));
        }
        let lmax: usize = lmax.try_into().expect("series length fits in usize");
        let pick = |s: &LogQSeries, l: usize| -> LogPoly {
            let idx = (&offset + int(l as i64) - &s.offset).to_integer();
            match usize::try_from(idx) {
                Ok(i) if i < s.coeffs.len() => s.coeffs[i].clone(),
                _ => LogPoly::zero(),
            }
        };
        let coeffs = (0..=lmax).map(|l| pick(self, l).add(&pick(other, l))).collect();
        Ok(LogQSeries::new(offset, coeffs))
    }

    pub fn sub(&self, other: &LogQSeries) -> Result<LogQSeries, Error> {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, r: &Rat) -> LogQSeries {
        self.map(|p| p.scale(r))
    }

    /// Multiplies every coefficient by a polynomial in `L`.
    pub fn mul_logpoly(&self, p: &LogPoly) -> LogQSeries {
        self.map(|c| c.mul(p))
    }

    pub fn mul(&self, other: &LogQSeries) -> LogQSeries {
        let lmax = self.lmax().min(other.lmax());
        let coeffs = (0..=lmax)
            .map(|l| {
                (0..=l).fold(LogPoly::zero(), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&other.coeffs[l - i]))
                })
            })
            .collect();
        LogQSeries::new(&self.offset + &other.offset, coeffs)
    }

    /// Multiplication by `q^delta`.
    pub fn shift(&self, delta: &Rat) -> LogQSeries {
        LogQSeries::new(&self.offset + delta, self.coeffs.clone())
    }

    /// Keeps terms up to `q^{offset+lmax}`.
    pub fn truncate(&self, lmax: usize) -> LogQSeries {
        let n = (lmax + 1).min(self.coeffs.len());
        LogQSeries::new(self.offset.clone(), self.coeffs[..n].to_vec())
    }

    fn map(&self, f: impl Fn(&LogPoly) -> LogPoly) -> LogQSeries {
        LogQSeries::new(self.offset.clone(), self.coeffs.iter().map(f).collect())
    }
}

impl fmt::Display for LogQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^({}) * [", self.offset)?;
        let mut first = true;
        for (l, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})q^{l}")?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})]", self.lmax() + 1)
    }
}

/// `η(q)^{-1} = q^{-1/24} Σ p(ℓ) q^ℓ`.
pub fn eta_inverse(lmax: usize) -> LogQSeries {
    let p = partition_counts(lmax);
    LogQSeries::new(
        Rat::new((-1).into(), 24.into()),
        p.into_iter().map(|x| LogPoly::constant(int(x as i64))).collect(),
    )
}

/// `∏_{j≥1} (1 − q^j)`.
pub fn euler_product(lmax: usize) -> LogQSeries {
    let mut c = vec![0i64; lmax + 1];
    c[0] = 1;
    for j in 1..=lmax {
        for l in (j..=lmax).rev() {
            c[l] -= c[l - j];
        }
    }
    LogQSeries::new(
        Rat::zero(),
        c.into_iter().map(|x| LogPoly::constant(int(x))).collect(),
    )
}

/// `q d/dq`, acting on `q^m p(L)` as `q^m (m p + p')`.
pub fn q_ddq(s: &LogQSeries) -> LogQSeries {
    let coeffs = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(l, p)| {
            let m = &s.offset + int(l as i64);
            p.scale(&m).add(&p.derivative())
        })
        .collect();
    LogQSeries::new(s.offset.clone(), coeffs)
}

/// `q^{-c/24} · q d/dq (q^{c/24} · s)`, the `ω` series obtained from a vacuum series.
pub fn omega_from_vacuum(s: &LogQSeries, c: &Rat) -> LogQSeries {
    let shift = c / int(24);
    q_ddq(&s.shift(&shift)).shift(&-shift)
}

fn vir_offset(c: &Rat, h: &Rat) -> Rat {
    h - c / int(24)
}

/// Graded trace `q^{h−c/24} Σ p(ℓ) q^ℓ` of the Verma module.
pub fn vir_verma_trace(c: &Rat, h: &Rat, lmax: usize) -> LogQSeries {
    eta_inverse(lmax).shift(&(vir_offset(c, h) + Rat::new(1.into(), 24.into())))
}

/// Trace of the simple quotient by one singular vector at degree `rs`.
pub fn vir_l_trace_case1(c: &Rat, h: &Rat, rs: u32, lmax: usize) -> LogQSeries {
    let p = partition_counts(lmax);
    let rs = rs as usize;
    let coeffs = (0..=lmax)
        .map(|l| {
            let x = p[l] as i64 - if l >= rs { p[l - rs] as i64 } else { 0 };
            LogPoly::constant(int(x))
        })
        .collect();
    LogQSeries::new(vir_offset(c, h), coeffs)
}

/// Case used by the closed-form pseudo-trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VirCase {
    Case0,
    Case1ii { rs: u32 },
}

/// Closed-form pseudo-trace of the vacuum on `W(c,h,k)`, checked against [`classify`].
pub fn vir_pstr_closed(
    c: &Rat,
    h: &Rat,
    k: usize,
    case: VirCase,
    lmax: usize,
) -> Result<LogQSeries, Error> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let top = LogPoly::monomial(Rat::one() / factorial(k - 1), k - 1);
    match case {
        VirCase::Case0 => {
            let cl = classify(c, h, k, lmax as u32)?;
            if !matches!(cl.case, CaseTag::Case0 { .. }) {
                return Err(Error::Precondition(format!(
                    "(c,h) = ({c},{h}) lies on curves {:?} within degree {lmax}",
                    cl.curves
                )));
            }
            Ok(vir_verma_trace(c, h, lmax).mul_logpoly(&top))
        }
        VirCase::Case1ii { rs } => {
            let cl = classify(c, h, k, (lmax as u32).max(rs))?;
            let ok = matches!(cl.case, CaseTag::Case1ii { .. })
                && cl.minimal.is_some_and(|(r, s)| r * s == rs);
            if !ok {
                return Err(Error::Precondition(format!(
                    "(c,h) = ({c},{h}) is in case {} with curves {:?}, not 1(ii) at degree {rs}",
                    cl.case.label(),
                    cl.curves
                )));
            }
            if !cl.interlocked {
                return Err(Error::NotInterlocked(format!(
                    "k = {k} exceeds kappa at (c,h) = ({c},{h})"
                )));
            }
            Ok(vir_l_trace_case1(c, h, rs, lmax).mul_logpoly(&top))
        }
    }
}

/// Vector whose zero mode is traced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VirVector {
    Vacuum,
    Omega,
}

/// `tr` of the upper-right `d × d` corner of `ov · Σ_j N^j L^j / j!`.
///
/// The module basis must be ordered with the `u_1` block first and the `u_k`
/// block last, each of size `d`. Panics if `n` is not nilpotent.
pub fn corner_pstr(ov: &RatMatrix, n: &RatMatrix, d: usize) -> LogPoly {
    let dim = n.rows();
    let mut out = Vec::new();
    let mut power = RatMatrix::identity(dim);
    for j in 0..=dim {
        if power.is_zero() {
            return LogPoly::new(out);
        }
        let m = ov.mul(&power);
        out.push(m.block(0, dim - d, d, d).trace() / factorial(j));
        power = power.mul(n);
    }
    panic!("L_0 minus the weight is not nilpotent");
}

/// Pseudo-trace of `o(v)` on `W = M(c,h,k)/J(c,h,k)`, computed degree by degree
/// from the block Gram matrix.
pub fn vir_pstr_bruteforce(
    c: &Rat,
    h: &Rat,
    k: usize,
    v: VirVector,
    lmax: usize,
) -> Result<LogQSeries, Error> {
    let cl = classify(c, h, k, lmax as u32)?;
    if !cl.interlocked {
        return Err(Error::NotInterlocked(format!(
            "M({c},{h},{k}) is in case {}",
            cl.case.label()
        )));
    }
    let coeffs = (0..=lmax)
        .map(|l| vir_pstr_degree(c, h, k, v, l as u32))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LogQSeries::new(vir_offset(c, h), coeffs))
}

fn vir_pstr_degree(c: &Rat, h: &Rat, k: usize, v: VirVector, l: u32) -> Result<LogPoly, Error> {
    let a = block_gram(l, k, c, h);
    let p = a.rows() / k;
    let u1: Vec<usize> = (0..p).map(|i| i * k).collect();
    let (_, tops) = a.select_columns(&u1).rref();
    let d = tops.len();
    if d == 0 {
        return Ok(LogPoly::zero());
    }
    // Quotient basis u_j·B_t, ordered with j slowest.
    let sel: Vec<usize> = (0..k)
        .flat_map(|j| tops.iter().map(move |&t| t * k + j))
        .collect();
    let a_sel = a.select_columns(&sel);
    let rank = a.rank();
    if rank != k * d {
        return Err(Error::NotInterlocked(format!(
            "degree {l}: rank {rank} differs from k times socle dimension {}",
            k * d
        )));
    }
    let weight = h + int(l as i64);
    let dim = k * d;
    // L_0 on each selected basis vector, in M(c,h,k) coordinates.
    let mut images = RatMatrix::zeros(a.rows(), dim);
    for (col, &idx) in sel.iter().enumerate() {
        images.set(idx, col, weight.clone());
        if idx % k > 0 {
            images.set(idx - 1, col, Rat::one());
        }
    }
    let l0 = rat_solve_many(&a_sel, &a.mul(&images)).ok_or_else(|| {
        Error::NotInterlocked(format!("degree {l}: L_0 image outside the quotient basis"))
    })?;
    if a_sel.rank() != dim {
        return Err(Error::NotInterlocked(format!(
            "degree {l}: selected vectors are dependent in the quotient"
        )));
    }
    let n = l0.sub(&RatMatrix::identity(dim).scale(&weight));
    let ov = match v {
        VirVector::Vacuum => RatMatrix::identity(dim),
        VirVector::Omega => l0,
    };
    Ok(corner_pstr(&ov, &n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_of_single_jordan_block() {
        let n = RatMatrix::shift(3, 1);
        let p = corner_pstr(&RatMatrix::identity(3), &n, 1);
        assert_eq!(p, LogPoly::monomial(Rat::new(1.into(), 2.into()), 2));
    }

    #[test]
    fn degree_zero_is_one_block() {
        let p = vir_pstr_degree(&int(0), &int(3), 2, VirVector::Vacuum, 0).unwrap();
        assert_eq!(p, LogPoly::monomial(Rat::one(), 1));
    }
}
