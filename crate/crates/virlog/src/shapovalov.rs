//! Gram matrices of the Shapovalov form, the curves `Φ_{r,s}`, and the Kac determinant.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::Zero;
use rayon::prelude::*;

use crate::exact::{fraction_free_det, int, rat, BivarPoly, PolyMatrix, Rat};
use crate::vircore::{partition_count, partitions_of, shapovalov_entry, Partition};
use crate::Error;

/// Gram matrix `𝒜_ℓ(c,h)` with its partition basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub degree: u32,
    pub basis: Vec<Partition>,
    pub matrix: PolyMatrix,
}

type GramCache = RwLock<HashMap<u32, Arc<GramMatrix>>>;

fn gram_cache() -> &'static GramCache {
    static CACHE: OnceLock<GramCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The symbolic Gram matrix at degree `l` (cached).
pub fn gram_matrix(l: u32) -> Arc<GramMatrix> {
    if let Some(g) = gram_cache().read().expect("gram cache poisoned").get(&l) {
        return g.clone();
    }
    let basis = partitions_of(l);
    let n = basis.len();
    let upper: Vec<(usize, usize, BivarPoly)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, j)| {
            let e = shapovalov_entry(&basis[i], &basis[j]).expect("equal weights");
            (i, j, e)
        })
        .collect();
    let mut matrix = PolyMatrix::zeros(n, n);
    for (i, j, e) in upper {
        matrix.set(j, i, e.clone());
        matrix.set(i, j, e);
    }
    let g = Arc::new(GramMatrix {
        degree: l,
        basis,
        matrix,
    });
    gram_cache()
        .write()
        .expect("gram cache poisoned")
        .insert(l, g.clone());
    g
}

fn curve_factor(r: u32, s: u32, rr: u32) -> BivarPoly {
    // h + (rr²−1)(c−13)/24 + (rs−1)/2
    let a = rat(i64::from(rr * rr) - 1, 24);
    let shift = &BivarPoly::c() - &BivarPoly::from_int(13);
    &(&BivarPoly::h() + &shift.scale(&a)) + &BivarPoly::constant(rat(i64::from(r * s) - 1, 2))
}

/// `Φ_{r,s}(c,h)`.
pub fn phi(r: u32, s: u32) -> BivarPoly {
    let d = i64::from(r * r) - i64::from(s * s);
    &(&curve_factor(r, s, r) * &curve_factor(r, s, s)) + &BivarPoly::constant(rat(d * d, 16))
}

/// `√Φ_{r,r} = h + (r²−1)(c−1)/24`.
pub fn sqrt_phi(r: u32) -> BivarPoly {
    let shift = &BivarPoly::c() - &BivarPoly::one();
    &BivarPoly::h() + &shift.scale(&rat(i64::from(r * r) - 1, 24))
}

/// `c(t) = 13 + 6t + 6/t`.
pub fn c_of_t(t: &Rat) -> Result<Rat, Error> {
    if t.is_zero() {
        return Err(Error::ZeroT);
    }
    Ok(int(13) + int(6) * t + int(6) / t)
}

/// `h_{r,s}(t) = (1−r²)t/4 + (1−rs)/2 + (1−s²)/(4t)`.
pub fn h_rs_of_t(r: u32, s: u32, t: &Rat) -> Result<Rat, Error> {
    if t.is_zero() {
        return Err(Error::ZeroT);
    }
    let (r, s) = (i64::from(r), i64::from(s));
    Ok(rat(1 - r * r, 4) * t + rat(1 - r * s, 2) + rat(1 - s * s, 4) / t)
}

/// `∏_{α<β, αβ≤ℓ} Φ_{α,β}^{p(ℓ−αβ)} · ∏_{α²≤ℓ} √Φ_{α,α}^{p(ℓ−α²)}`.
pub fn kac_det_formula(l: u32) -> BivarPoly {
    let mut acc = BivarPoly::one();
    for a in 1..=l {
        for b in a..=l {
            if a * b > l {
                break;
            }
            let e = partition_count((l - a * b) as usize) as u32;
            let f = if a == b { sqrt_phi(a) } else { phi(b, a) };
            acc = &acc * &f.pow(e);
        }
    }
    acc
}

/// Determinant of `𝒜_ℓ` compared against [`kac_det_formula`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KacDet {
    pub det: BivarPoly,
    pub product: BivarPoly,
    /// `det / product` when that quotient is a constant.
    pub constant: Option<Rat>,
}

pub fn kac_det(l: u32) -> Result<KacDet, Error> {
    let det = fraction_free_det(&gram_matrix(l).matrix)?;
    let product = kac_det_formula(l);
    let constant = det.div_exact(&product).and_then(|q| q.as_constant());
    Ok(KacDet {
        det,
        product,
        constant,
    })
}

/// Whether `(c, h)` lies on `Φ_{r,s}` (using `√Φ` when `r = s`).
pub fn on_curve(r: u32, s: u32, c: &Rat, h: &Rat) -> bool {
    let f = if r == s { sqrt_phi(r) } else { phi(r, s) };
    f.eval(c, h).is_zero()
}

/// All `(r, s)` with `r ≥ s ≥ 1`, `rs ≤ bound` and `(c,h)` on `Φ_{r,s}`,
/// sorted by `rs` then `r`.
pub fn curves_through(c: &Rat, h: &Rat, bound: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for s in 1..=bound {
        for r in s..=bound {
            if r * s > bound {
                break;
            }
            if on_curve(r, s, c, h) {
                out.push((r, s));
            }
        }
    }
    out.sort_by_key(|&(r, s)| (r * s, r));
    out
}
