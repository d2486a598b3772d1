//! Rank-one Heisenberg vertex operator algebra `M_a(1)` and its Jordan-block modules `W(a,λ,k)`.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;
use rayon::prelude::*;

use crate::exact::{binomial, factorial, int, Rat, RatMatrix};
use crate::qseries::{corner_pstr, eta_inverse, omega_from_vacuum, LogPoly, LogQSeries};
use crate::vircore::{partition_count, partitions_of, Partition};
use crate::Error;

/// Element of the Fock space, as coefficients on `α_{-n_1}⋯α_{-n_j}·1`.
pub type FockVector = BTreeMap<Partition, Rat>;

/// Parameters of `W(a,λ,k) = M_a(1) ⊗ Ω(λ,k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeisModuleSpec {
    pub a: Rat,
    pub lambda: Rat,
    pub k: usize,
}

impl HeisModuleSpec {
    pub fn new(a: Rat, lambda: Rat, k: usize) -> Result<Self, Error> {
        if k == 0 {
            return Err(Error::Precondition("k must be positive".into()));
        }
        Ok(HeisModuleSpec { a, lambda, k })
    }

    /// `c = 1 − 12a²`.
    pub fn central_charge(&self) -> Rat {
        int(1) - int(12) * &self.a * &self.a
    }

    /// `λ²/2 − aλ`.
    pub fn lowest_weight(&self) -> Rat {
        &self.lambda * &self.lambda / int(2) - &self.a * &self.lambda
    }

    /// `(λ−a)²/2 − 1/24`, the leading exponent of every pseudo-trace.
    pub fn series_offset(&self) -> Rat {
        self.lowest_weight() - self.central_charge() / int(24)
    }
}

/// Matrix of a mode from `W(degree)` to `W(target)`, in the basis
/// `B_i ⊗ u_j` indexed by `j·p + i` (Fock fastest, `u_1` block first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeOperator {
    pub degree: u32,
    pub target: u32,
    pub matrix: RatMatrix,
}

/// `α_n` (`n ≠ 0`) on a Fock basis element.
pub fn alpha_action(n: i32, elem: &Partition) -> Result<FockVector, Error> {
    let mut out = FockVector::new();
    match n {
        0 => {
            return Err(Error::Precondition(
                "α_0 acts on the top space, not the Fock factor".into(),
            ))
        }
        n if n < 0 => {
            let mut parts = elem.parts().to_vec();
            parts.push(n.unsigned_abs());
            out.insert(Partition::new(parts), Rat::one());
        }
        n => {
            let n = n as u32;
            let mult = elem.multiplicity(n);
            if mult > 0 {
                let mut parts = elem.parts().to_vec();
                let pos = parts.iter().position(|&x| x == n).expect("part present");
                parts.remove(pos);
                out.insert(Partition::new(parts), int(i64::from(n) * mult as i64));
            }
        }
    }
    Ok(out)
}

fn target_degree(n: i32, l: u32) -> Result<u32, Error> {
    u32::try_from(i64::from(l) - i64::from(n))
        .map_err(|_| Error::Precondition(format!("mode {n} maps degree {l} below zero")))
}

/// Matrix of `α_n` from `W(l)` to `W(l − n)`.
pub fn alpha_mode(spec: &HeisModuleSpec, n: i32, l: u32) -> Result<DegreeOperator, Error> {
    let target = target_degree(n, l)?;
    let k = spec.k;
    let src = partitions_of(l);
    let dst = partitions_of(target);
    let (ps, pt) = (src.len(), dst.len());
    let mut m = RatMatrix::zeros(k * pt, k * ps);
    if n == 0 {
        for col in 0..k * ps {
            m.set(col, col, spec.lambda.clone());
            if col >= ps {
                m.set(col - ps, col, Rat::one());
            }
        }
    } else {
        let index: HashMap<&Partition, usize> = dst.iter().enumerate().map(|(i, p)| (p, i)).collect();
        for (i, p) in src.iter().enumerate() {
            for (q, coef) in alpha_action(n, p)? {
                let row = index[&q];
                for j in 0..k {
                    m.set(j * pt + row, j * ps + i, coef.clone());
                }
            }
        }
    }
    Ok(DegreeOperator {
        degree: l,
        target,
        matrix: m,
    })
}

/// Matrix of `L_n^a = ½Σ_m :α_{n−m}α_m: − a(n+1)α_n` from `W(l)` to `W(l − n)`.
pub fn virasoro_mode(spec: &HeisModuleSpec, n: i32, l: u32) -> Result<DegreeOperator, Error> {
    let target = target_degree(n, l)?;
    let k = spec.k;
    let mut acc = RatMatrix::zeros(
        k * partition_count(target as usize) as usize,
        k * partition_count(l as usize) as usize,
    );
    let product = |i: i32, j: i32| -> Result<RatMatrix, Error> {
        let right = alpha_mode(spec, j, l)?;
        Ok(alpha_mode(spec, i, right.target)?.matrix.mul(&right.matrix))
    };
    // Normal ordering puts the larger index on the right.
    for j in n.div_euclid(2) + 1..=l as i32 {
        acc = acc.add(&product(n - j, j)?);
    }
    if n % 2 == 0 && n / 2 <= l as i32 {
        acc = acc.add(&product(n / 2, n / 2)?.scale(&Rat::new(1.into(), 2.into())));
    }
    let linear = alpha_mode(spec, n, l)?.matrix;
    acc = acc.sub(&linear.scale(&(&spec.a * int(i64::from(n) + 1))));
    Ok(DegreeOperator {
        degree: l,
        target,
        matrix: acc,
    })
}

/// Vector whose zero mode is traced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeisVector {
    /// `1`, with `o(1) = id`.
    Vacuum,
    /// `α_{-1}1`, with `o(α_{-1}1) = α_0`.
    Alpha,
    /// `ω^a`, with `o(ω^a) = L_0^a`.
    Omega,
}

/// Pseudo-trace of `o(v)` computed from the degree-wise `L_0^a` matrices.
pub fn pstr_bruteforce(
    spec: &HeisModuleSpec,
    v: HeisVector,
    lmax: usize,
) -> Result<LogQSeries, Error> {
    let coeffs = (0..=lmax as u32)
        .into_par_iter()
        .map(|l| {
            let l0 = virasoro_mode(spec, 0, l)?.matrix;
            let weight = spec.lowest_weight() + int(i64::from(l));
            let n = l0.sub(&RatMatrix::identity(l0.rows()).scale(&weight));
            let ov = match v {
                HeisVector::Vacuum => RatMatrix::identity(l0.rows()),
                HeisVector::Alpha => alpha_mode(spec, 0, l)?.matrix,
                HeisVector::Omega => l0,
            };
            Ok(corner_pstr(&ov, &n, partition_count(l as usize) as usize))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(LogQSeries::new(spec.series_offset(), coeffs))
}

/// Ordinary graded trace `Σ tr(q^{N_ℓ}) q^{ℓ+offset}` over the whole of `W(ℓ)`.
pub fn graded_trace(spec: &HeisModuleSpec, lmax: usize) -> LogQSeries {
    let coeffs = (0..=lmax as u32)
        .map(|l| {
            let l0 = virasoro_mode(spec, 0, l).expect("degree-preserving").matrix;
            let dim = l0.rows();
            let weight = spec.lowest_weight() + int(i64::from(l));
            let n = l0.sub(&RatMatrix::identity(dim).scale(&weight));
            corner_pstr(&RatMatrix::identity(dim), &n, dim)
        })
        .collect();
    LogQSeries::new(spec.series_offset(), coeffs)
}

/// `Σ_{j=⌈(m−1)/2⌉}^{m−1} (1/j!) C(j, m−1−j) 2^{−(m−1−j)} x^{2j−m+1} L^j`,
/// the corner coefficient of `exp((x D_1 + ½D_2) L)` on an `m`-dimensional block.
fn jordan_corner(x: &Rat, m: usize) -> LogPoly {
    if m == 0 {
        return LogPoly::zero();
    }
    let mut out = LogPoly::zero();
    for j in m / 2..m {
        let r = m - 1 - j;
        let coef = binomial(j, r) / factorial(j) / int(1i64 << r) * x.pow((2 * j + 1 - m) as i32);
        out = out.add(&LogPoly::monomial(coef, j));
    }
    out
}

/// `δ_{a,λ,k}(L)`, the factor multiplying the `k = 1` graded dimension.
pub fn delta_coefficient(a: &Rat, lambda: &Rat, k: usize) -> LogPoly {
    jordan_corner(&(lambda - a), k)
}

/// Closed-form pseudo-trace; `Omega` is obtained from `Vacuum` by the logarithmic derivative.
pub fn pstr_closed_form(
    spec: &HeisModuleSpec,
    v: HeisVector,
    lmax: usize,
) -> Result<LogQSeries, Error> {
    let x = &spec.lambda - &spec.a;
    let base = eta_inverse(lmax).shift(&(&x * &x / int(2)));
    let vacuum = jordan_corner(&x, spec.k);
    Ok(match v {
        HeisVector::Vacuum => base.mul_logpoly(&vacuum),
        HeisVector::Alpha => {
            let p = vacuum.scale(&spec.lambda).add(&jordan_corner(&x, spec.k - 1));
            base.mul_logpoly(&p)
        }
        HeisVector::Omega => omega_from_vacuum(&base.mul_logpoly(&vacuum), &spec.central_charge()),
    })
}
