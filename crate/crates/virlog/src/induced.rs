//! Level-zero induced modules `M(c,h,k)`: block Gram matrices `𝔄_ℓ^(k)`,
//! the kernel `J(c,h,k)`, singular vectors, `κ`, and the interlocked classification.
//!
//! Vectors of `M(c,h,k)(ℓ)` are coordinate lists in the block order
//! `(B_1u_1, …, B_1u_k, B_2u_1, …, B_{p(ℓ)}u_k)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::exact::{
    factorial, fraction_free_det, int, rat, rat_kernel, rat_solve, BivarPoly, PolyMatrix, Rat,
    RatMatrix,
};
use crate::shapovalov::{c_of_t, curves_through, gram_matrix, h_rs_of_t};
use crate::vircore::{adjoint, partitions_of, LWVectorExpr, Partition};
use crate::Error;

/// Default cap on the `κ` iteration.
pub const DEFAULT_KAPPA_CAP: u32 = 8;

/// Symbolic `𝔄_ℓ^(k)(c,h)`, built from `𝒜_ℓ` and its `h`-derivatives.
pub fn block_gram_symbolic(l: u32, k: usize) -> PolyMatrix {
    let g = gram_matrix(l);
    let p = g.basis.len();
    let derivs: Vec<PolyMatrix> = (0..k)
        .map(|n| {
            let f = factorial(n).recip();
            g.matrix.diff_h(n as u32).map(|e| e.scale(&f))
        })
        .collect();
    let mut out = PolyMatrix::zeros(p * k, p * k);
    for i in 0..p {
        for j in 0..p {
            for m in 0..k {
                for n in m..k {
                    out.set(i * k + m, j * k + n, derivs[n - m].get(i, j).clone());
                }
            }
        }
    }
    out
}

/// `(1/n!) ∂_h^n 𝒜_ℓ` evaluated at `(c, h)` for `n = 0..count`.
pub fn gram_derivatives(l: u32, count: usize, c: &Rat, h: &Rat) -> Vec<RatMatrix> {
    let g = gram_matrix(l);
    (0..count)
        .map(|n| {
            g.matrix
                .diff_h(n as u32)
                .eval(c, h)
                .scale(&factorial(n).recip())
        })
        .collect()
}

/// `𝔄_ℓ^(k)(c,h)` evaluated at a rational point.
pub fn block_gram(l: u32, k: usize, c: &Rat, h: &Rat) -> RatMatrix {
    let d = gram_derivatives(l, k, c, h);
    let p = d[0].rows();
    let mut out = RatMatrix::zeros(p * k, p * k);
    for i in 0..p {
        for j in 0..p {
            for m in 0..k {
                for n in m..k {
                    out.set(i * k + m, j * k + n, d[n - m].get(i, j).clone());
                }
            }
        }
    }
    out
}

/// Vector of `M(c,h,k)` at a numeric point: `(monomial, level) -> coefficient`.
type JordanVec = BTreeMap<(Partition, usize), Rat>;

fn jv_add(acc: &mut JordanVec, key: (Partition, usize), x: Rat) {
    if x.is_zero() {
        return;
    }
    let e = acc.entry(key.clone()).or_insert_with(Rat::zero);
    *e += x;
    if e.is_zero() {
        acc.remove(&key);
    }
}

struct JordanReducer<'a> {
    c: &'a Rat,
    h: &'a Rat,
    memo: HashMap<(i32, Partition, usize), JordanVec>,
}

impl JordanReducer<'_> {
    fn apply(&mut self, n: i32, v: &JordanVec) -> JordanVec {
        let mut out = JordanVec::new();
        for ((p, j), x) in v {
            for (key, y) in self.monomial(n, p, *j) {
                jv_add(&mut out, key, y * x);
            }
        }
        out
    }

    /// `L_n (p · u_j)`, where `L_0 u_j = h u_j + u_{j-1}`.
    fn monomial(&mut self, n: i32, p: &Partition, j: usize) -> JordanVec {
        if let Some(v) = self.memo.get(&(n, p.clone(), j)) {
            return v.clone();
        }
        let mut out = JordanVec::new();
        let parts = p.parts();
        if n == 0 {
            jv_add(&mut out, (p.clone(), j), self.h + int(i64::from(p.weight())));
            if j > 1 {
                jv_add(&mut out, (p.clone(), j - 1), Rat::one());
            }
        } else if n > 0 && parts.is_empty() {
        } else if n < 0 && (parts.is_empty() || (-n) as u32 >= parts[0]) {
            let mut q = vec![(-n) as u32];
            q.extend_from_slice(parts);
            jv_add(&mut out, (Partition::new(q), j), Rat::one());
        } else {
            let m = parts[0] as i32;
            let rest = Partition::new(parts[1..].to_vec());
            let mut inner = JordanVec::new();
            inner.insert((rest.clone(), j), Rat::one());
            let a = self.apply(n, &inner);
            out = self.apply(-m, &a);
            for (key, y) in self.apply(n - m, &inner) {
                jv_add(&mut out, key, y * int(i64::from(n + m)));
            }
            if n == m {
                let n = i64::from(n);
                jv_add(&mut out, (rest, j), rat(n * n * n - n, 12) * self.c);
            }
        }
        self.memo.insert((n, p.clone(), j), out.clone());
        out
    }
}

/// `𝔄_ℓ^(k)(c,h)` by reducing `B_i† B_j u_n` directly against Jordan vectors.
///
/// Slow; serves as an independent check of [`block_gram`].
pub fn block_gram_direct(l: u32, k: usize, c: &Rat, h: &Rat) -> RatMatrix {
    let basis = partitions_of(l);
    let p = basis.len();
    let mut red = JordanReducer {
        c,
        h,
        memo: HashMap::new(),
    };
    let mut out = RatMatrix::zeros(p * k, p * k);
    for (j, bj) in basis.iter().enumerate() {
        for n in 1..=k {
            for (i, bi) in basis.iter().enumerate() {
                let mut v = JordanVec::new();
                v.insert((bj.clone(), n), Rat::one());
                for &mode in adjoint(&bi.word()).factors().iter().rev() {
                    v = red.apply(mode, &v);
                }
                for m in 1..=k {
                    if let Some(x) = v.get(&(Partition::default(), m)) {
                        out.set(i * k + m - 1, j * k + n - 1, x.clone());
                    }
                }
            }
        }
    }
    out
}

/// Result of comparing `det 𝔄_ℓ^(k)` with `(det 𝒜_ℓ)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDetCheck {
    pub lhs: BivarPoly,
    pub rhs: BivarPoly,
    pub equal: bool,
}

pub fn block_det_check(l: u32, k: usize) -> Result<BlockDetCheck, Error> {
    let lhs = fraction_free_det(&block_gram_symbolic(l, k))?;
    let rhs = fraction_free_det(&gram_matrix(l).matrix)?.pow(k as u32);
    let equal = lhs == rhs;
    Ok(BlockDetCheck { lhs, rhs, equal })
}

/// An element `Σ_j R^j u_j` of `M(c,h,k)(ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVector {
    degree: u32,
    k: usize,
    coords: Vec<Rat>,
}

impl KernelVector {
    /// Wraps coordinates in block order.
    pub fn from_coords(degree: u32, k: usize, coords: Vec<Rat>) -> Self {
        assert_eq!(coords.len(), k * partitions_of(degree).len());
        Self { degree, k, coords }
    }

    /// Builds `Σ_j levels[j-1] u_j`; coefficients must be constant.
    pub fn from_levels(degree: u32, levels: &[LWVectorExpr]) -> Self {
        let basis = partitions_of(degree);
        let k = levels.len();
        let mut coords = vec![Rat::zero(); basis.len() * k];
        for (j, lv) in levels.iter().enumerate() {
            for (i, x) in lv.coords(&basis).into_iter().enumerate() {
                coords[i * k + j] = x;
            }
        }
        Self { degree, k, coords }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    /// The component `R^j` (1-based level).
    pub fn level(&self, j: usize) -> LWVectorExpr {
        let basis = partitions_of(self.degree);
        let xs: Vec<Rat> = (0..basis.len())
            .map(|i| self.coords[i * self.k + j - 1].clone())
            .collect();
        LWVectorExpr::from_coords(&basis, &xs)
    }

    /// Largest `j` with `R^j ≠ 0` (0 for the zero vector).
    pub fn leading_level(&self) -> usize {
        (1..=self.k)
            .rev()
            .find(|&j| !self.level(j).is_zero())
            .unwrap_or(0)
    }
}

impl fmt::Display for KernelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (1..=self.k)
            .rev()
            .map(|j| (j, self.level(j)))
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| format!("({v})u{j}"))
            .collect();
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Basis of `J(c,h,k)(ℓ) = Ker 𝔄_ℓ^(k)(c,h)`.
pub fn kernel_j(l: u32, k: usize, c: &Rat, h: &Rat) -> Vec<KernelVector> {
    rat_kernel(&block_gram(l, k, c, h))
        .into_iter()
        .map(|v| KernelVector::from_coords(l, k, v))
        .collect()
}

/// Basis of `J(c,h,k)(ℓ)` from the cascade `Σ_{n≥m} (1/(n−m)!) ∂^{n−m}𝒜_ℓ R^n = 0`,
/// `m = 1..k`, solved in level-major unknowns.
pub fn kernel_j_cascade(l: u32, k: usize, c: &Rat, h: &Rat) -> Vec<KernelVector> {
    let d = gram_derivatives(l, k, c, h);
    let p = d[0].rows();
    let mut sys = RatMatrix::zeros(p * k, p * k);
    for m in 0..k {
        for n in m..k {
            for i in 0..p {
                for j in 0..p {
                    sys.set(m * p + i, n * p + j, d[n - m].get(i, j).clone());
                }
            }
        }
    }
    rat_kernel(&sys)
        .into_iter()
        .map(|v| {
            let mut coords = vec![Rat::zero(); p * k];
            for n in 0..k {
                for i in 0..p {
                    coords[i * k + n] = v[n * p + i].clone();
                }
            }
            KernelVector::from_coords(l, k, coords)
        })
        .collect()
}

/// Coordinates of `S_{r,s}(t)` in the degree-`rs` partition basis.
pub fn singular_vector_coords(r: u32, s: u32, t: &Rat) -> Result<Vec<Rat>, Error> {
    let c = c_of_t(t)?;
    let h = h_rs_of_t(r, s, t)?;
    let d = r * s;
    let ker = rat_kernel(&gram_matrix(d).matrix.eval(&c, &h));
    if ker.len() != 1 {
        return Err(Error::KernelDimension {
            degree: d,
            dim: ker.len(),
        });
    }
    let lead = ker[0][0].clone();
    if lead.is_zero() {
        return Err(Error::Precondition(format!(
            "L(-1)^{d} coefficient vanishes for S_{r},{s}({t})"
        )));
    }
    Ok(ker[0].iter().map(|x| x / &lead).collect())
}

/// `S_{r,s}(t)`, normalized so the `L_{-1}^{rs}` coefficient is 1.
pub fn singular_vector(r: u32, s: u32, t: &Rat) -> Result<LWVectorExpr, Error> {
    let coords = singular_vector_coords(r, s, t)?;
    Ok(LWVectorExpr::from_coords(&partitions_of(r * s), &coords))
}

/// `+` for `c = 25` (`t = 1`), `−` for `c = 1` (`t = −1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn t(self) -> Rat {
        match self {
            Sign::Plus => int(1),
            Sign::Minus => int(-1),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// `κ`, or a lower bound when the iteration hit its cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaValue {
    Exact(u32),
    AtLeast(u32),
}

impl KappaValue {
    /// Whether Jordan size `k` is within `κ`.
    pub fn admits(self, k: usize) -> bool {
        match self {
            KappaValue::Exact(v) | KappaValue::AtLeast(v) => k as u32 <= v,
        }
    }
}

impl fmt::Display for KappaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KappaValue::Exact(v) => write!(f, "{v}"),
            KappaValue::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaResult {
    pub r: u32,
    pub s: u32,
    pub sign: Sign,
    pub kappa: KappaValue,
    /// `R^1, …, R^{κ−1}`: the canonical solutions of stages `2..=κ`.
    pub representatives: Vec<LWVectorExpr>,
}

/// Runs `𝒜_d b_n = −Σ_{j=1}^{n−1} (1/j!) ∂^j 𝒜_d b_{n−j}` from `b_1 = S_{r,s}(±1)`.
pub fn kappa(r: u32, s: u32, sign: Sign, cap: u32) -> Result<KappaResult, Error> {
    if r == s {
        return Err(Error::Precondition(format!(
            "kappa needs r != s, got r = s = {r}"
        )));
    }
    if cap < 2 {
        return Err(Error::Precondition("kappa cap must be at least 2".into()));
    }
    let t = sign.t();
    let c = c_of_t(&t)?;
    let h = h_rs_of_t(r, s, &t)?;
    let d = r * s;
    let basis = partitions_of(d);
    let mats = gram_derivatives(d, cap as usize, &c, &h);
    let mut b = vec![singular_vector_coords(r, s, &t)?];
    let mut kappa = KappaValue::AtLeast(cap);
    for n in 2..=cap as usize {
        let mut rhs = vec![Rat::zero(); basis.len()];
        for j in 1..n {
            for (acc, x) in rhs.iter_mut().zip(mats[j].mul_vec(&b[n - j - 1])) {
                *acc -= x;
            }
        }
        match rat_solve(&mats[0], &rhs) {
            Some(x) => b.push(x),
            None => {
                kappa = KappaValue::Exact(n as u32 - 1);
                break;
            }
        }
    }
    let representatives = b[1..]
        .iter()
        .map(|x| LWVectorExpr::from_coords(&basis, x))
        .collect();
    Ok(KappaResult {
        r,
        s,
        sign,
        kappa,
        representatives,
    })
}

/// Structure of `M(c,h)` relevant to interlocking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// No curve `Φ_{r,s}` with `rs ≤ bound` passes through `(c,h)`.
    Case0 { bound: u32 },
    /// One minimal curve with `r = s` or `c ∉ {1, 25}`. Not separated from Case (2).
    Case1i,
    /// One minimal curve with `r ≠ s` and `c ∈ {1, 25}`.
    Case1ii { kappa: KappaValue },
    /// Several curves at the minimal degree, or a degenerate `κ` computation.
    Case2OrDeeper,
}

impl CaseTag {
    pub fn label(&self) -> &'static str {
        match self {
            CaseTag::Case0 { .. } => "0",
            CaseTag::Case1i => "1(i)",
            CaseTag::Case1ii { .. } => "1(ii)",
            CaseTag::Case2OrDeeper => "2-or-deeper",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub case: CaseTag,
    pub k: usize,
    pub interlocked: bool,
    /// Minimal `(r, s)` when unique.
    pub minimal: Option<(u32, u32)>,
    /// All curves found up to the bound.
    pub curves: Vec<(u32, u32)>,
    pub notes: Vec<String>,
}

/// Interlocked classification of `M(c,h,k)`, looking for curves with `rs ≤ bound`.
pub fn classify(c: &Rat, h: &Rat, k: usize, bound: u32) -> Result<Classification, Error> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let curves = curves_through(c, h, bound);
    let mut notes = Vec::new();
    let Some(&(r0, s0)) = curves.first() else {
        notes.push(format!("no singular vector found below degree bound {bound}"));
        return Ok(Classification {
            case: CaseTag::Case0 { bound },
            k,
            interlocked: true,
            minimal: None,
            curves,
            notes,
        });
    };
    let d = r0 * s0;
    let at_min: Vec<_> = curves.iter().filter(|(r, s)| r * s == d).collect();
    let mk = |case, minimal, notes| Classification {
        case,
        k,
        interlocked: k == 1,
        minimal,
        curves: curves.clone(),
        notes,
    };
    if at_min.len() > 1 {
        notes.push(format!("{} curves share the minimal degree {d}", at_min.len()));
        return Ok(mk(CaseTag::Case2OrDeeper, None, notes));
    }
    let c1 = *c == int(1);
    let c25 = *c == int(25);
    if r0 == s0 || !(c1 || c25) {
        notes.push("Case (1)(i) and Case (2) are not separated; both fail to interlock for k >= 2".into());
        return Ok(mk(CaseTag::Case1i, Some((r0, s0)), notes));
    }
    let sign = if c25 { Sign::Plus } else { Sign::Minus };
    let cap = DEFAULT_KAPPA_CAP.max(k as u32);
    match kappa(r0, s0, sign, cap) {
        Ok(res) => Ok(Classification {
            case: CaseTag::Case1ii { kappa: res.kappa },
            k,
            interlocked: res.kappa.admits(k),
            minimal: Some((r0, s0)),
            curves,
            notes,
        }),
        Err(Error::KernelDimension { degree, dim }) => {
            notes.push(format!("degree-{degree} kernel has dimension {dim}"));
            Ok(mk(CaseTag::Case2OrDeeper, Some((r0, s0)), notes))
        }
        Err(e) => Err(e),
    }
}

/// Per-degree dimensions of `W = M(c,h,k)/J(c,h,k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeDims {
    pub degree: u32,
    pub dim_w: usize,
    pub dim_soc: usize,
    pub dim_rad: usize,
}

/// Dimensions of `W(ℓ)`, `Soc(W)(ℓ)` (image of `⟨u_1⟩`) and `Rad(W)(ℓ)` for `ℓ = 0..=lmax`.
pub fn socle_radical_dims(c: &Rat, h: &Rat, k: usize, lmax: u32) -> Vec<DegreeDims> {
    (0..=lmax)
        .map(|l| {
            let (dim_w, dim_soc) = if l == 0 {
                (k, 1)
            } else {
                let a = block_gram(l, k, c, h);
                let p = a.rows() / k;
                let u1: Vec<usize> = (0..p).map(|i| i * k).collect();
                (a.rank(), a.select_columns(&u1).rank())
            };
            DegreeDims {
                degree: l,
                dim_w,
                dim_soc,
                dim_rad: dim_w - dim_soc,
            }
        })
        .collect()
}
