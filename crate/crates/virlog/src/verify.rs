//! Worked examples checked against exact computation, shared by the CLI `verify`
//! command and the acceptance test target.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{fraction_free_det, int, rat, rat_solve, BivarPoly, Rat};
use crate::heisenberg::{self, HeisModuleSpec, HeisVector};
use crate::induced::{
    block_det_check, block_gram, block_gram_symbolic, classify, kappa, kernel_j, singular_vector,
    singular_vector_coords, KappaValue, KernelVector, Sign,
};
use crate::qseries::{
    omega_from_vacuum, q_ddq, vir_pstr_bruteforce, vir_pstr_closed, vir_verma_trace, LogPoly, LogQSeries, VirCase,
    VirVector,
};
use crate::shapovalov::{c_of_t, curves_through, gram_matrix, h_rs_of_t, kac_det, phi};
use crate::vircore::{apply_mode, LWVectorExpr, Partition};
use crate::Error;

/// One acceptance criterion.
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    run: fn() -> Result<String, String>,
}

/// Result of running a [`Criterion`].
#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Criterion {
    /// Runs the check; a panic counts as a failure.
    pub fn run(&self) -> Outcome {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(self.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let (passed, detail) = match res {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        Outcome {
            id: self.id,
            title: self.title,
            passed,
            detail,
            elapsed: start.elapsed(),
        }
    }
}

/// All criteria in order.
pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, title: "Gram matrices at degrees 1-3", run: gram_matrices },
        Criterion { id: 2, title: "Kac determinant", run: kac_determinant },
        Criterion { id: 3, title: "Block determinant identity", run: block_determinant },
        Criterion { id: 4, title: "Singular vectors", run: singular_vectors },
        Criterion { id: 5, title: "Kappa at c = 1 and c = 25", run: kappa_values },
        Criterion { id: 6, title: "Degree-3 kernel at c = -2", run: c_minus_two },
        Criterion { id: 7, title: "Interlocked classification grid", run: classification_grid },
        Criterion { id: 8, title: "Heisenberg pseudo-traces", run: heisenberg_traces },
        Criterion { id: 9, title: "Virasoro pseudo-traces", run: virasoro_traces },
        Criterion { id: 10, title: "Logarithmic derivative property", run: log_derivative },
        Criterion { id: 11, title: "Jacobi criterion on random samples", run: jacobi_suite },
    ]
}

/// Runs every criterion.
pub fn run_all() -> Vec<Outcome> {
    criteria().iter().map(Criterion::run).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn k(n: i64) -> BivarPoly {
    BivarPoly::from_int(n)
}

fn lw_vector(terms: &[(Rat, &[u32])]) -> LWVectorExpr {
    let mut v = LWVectorExpr::zero();
    for (x, parts) in terms {
        let mono = LWVectorExpr::from_partition(Partition::new(parts.to_vec()));
        v.add_scaled(&mono, &BivarPoly::constant(x.clone()));
    }
    v
}

fn gram_matrices() -> Result<String, String> {
    let start = Instant::now();
    let (c, h) = (BivarPoly::c(), BivarPoly::h());
    let h2 = &h * &h;
    let expect: Vec<Vec<Vec<BivarPoly>>> = vec![
        vec![vec![&k(2) * &h]],
        vec![
            vec![&(&k(8) * &h2) + &(&k(4) * &h), &k(6) * &h],
            vec![&k(6) * &h, &(&k(4) * &h) + &c.scale(&rat(1, 2))],
        ],
        {
            let a11 = &(&k(24) * &h) * &(&(&(&k(2) * &h2) + &(&k(3) * &h)) + &k(1));
            let a12 = &(&k(12) * &h) * &(&(&k(3) * &h) + &k(1));
            let a13 = &k(24) * &h;
            let a22 = &h * &(&(&(&k(8) * &h) + &k(8)) + &c);
            let a23 = &k(10) * &h;
            let a33 = &(&k(6) * &h) + &(&k(2) * &c);
            vec![
                vec![a11, a12.clone(), a13.clone()],
                vec![a12, a22, a23.clone()],
                vec![a13, a23, a33],
            ]
        },
    ];
    for (i, e) in expect.iter().enumerate() {
        let l = i as u32 + 1;
        let got = gram_matrix(l).matrix.to_rows();
        ensure(&got == e, || format!("degree {l} Gram matrix differs"))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}, limit 1 s"))?;
    Ok(format!("3 matrices equal, {t:.2?}"))
}

fn kac_determinant() -> Result<String, String> {
    let det3 = fraction_free_det(&gram_matrix(3).matrix).map_err(err)?;
    let expect = (&(&phi(1, 1) * &phi(2, 1)) * &phi(3, 1)).scale(&int(2304));
    ensure(det3 == expect, || format!("det A_3 = {det3}"))?;
    let mut notes = vec!["det A_3 = 2304*Phi11*Phi21*Phi31".to_string()];
    for l in 4..=5 {
        let start = Instant::now();
        let kd = kac_det(l).map_err(err)?;
        let t = start.elapsed();
        let gamma = kd
            .constant
            .ok_or_else(|| format!("degree {l}: det is not a constant multiple of the product"))?;
        ensure(!gamma.is_zero(), || format!("degree {l}: zero constant"))?;
        ensure(t < Duration::from_secs(30), || format!("degree {l} took {t:?}, limit 30 s"))?;
        notes.push(format!("l={l}: constant {gamma} ({t:.2?})"));
    }
    Ok(notes.join("; "))
}

fn block_determinant() -> Result<String, String> {
    for l in 1..=4 {
        for kk in 1..=4 {
            let chk = block_det_check(l, kk).map_err(err)?;
            ensure(chk.equal, || format!("det A_{l}^({kk}) != (det A_{l})^{kk}"))?;
        }
    }
    let h = BivarPoly::h();
    let z = k(0);
    let printed1 = vec![
        vec![&k(2) * &h, k(2), z.clone()],
        vec![z.clone(), &k(2) * &h, k(2)],
        vec![z.clone(), z.clone(), &k(2) * &h],
    ];
    ensure(block_gram_symbolic(1, 3).to_rows() == printed1, || {
        "printed block Gram at degree 1, k = 3 differs".into()
    })?;
    let a11 = &(&k(8) * &(&h * &h)) + &(&k(4) * &h);
    let a22 = &(&k(4) * &h) + &BivarPoly::c().scale(&rat(1, 2));
    let b11 = [a11, &(&k(16) * &h) + &k(4), k(8)];
    let b12 = [&k(6) * &h, k(6), z.clone()];
    let b22 = [a22, k(4), z.clone()];
    let block = |d: &[BivarPoly; 3]| -> Vec<Vec<BivarPoly>> {
        vec![
            vec![d[0].clone(), d[1].clone(), d[2].clone()],
            vec![z.clone(), d[0].clone(), d[1].clone()],
            vec![z.clone(), z.clone(), d[0].clone()],
        ]
    };
    let (x11, x12, x22) = (block(&b11), block(&b12), block(&b22));
    let mut printed2 = Vec::new();
    for r in 0..3 {
        printed2.push([x11[r].clone(), x12[r].clone()].concat());
    }
    for r in 0..3 {
        printed2.push([x12[r].clone(), x22[r].clone()].concat());
    }
    ensure(block_gram_symbolic(2, 3).to_rows() == printed2, || {
        "printed block Gram at degree 2, k = 3 differs".into()
    })?;
    Ok("16 (l,k) pairs and 2 printed matrices".into())
}

/// `S_{r,s}(t)` from the explicit list.
fn listed_singular_vector(r: u32, s: u32, t: &Rat) -> LWVectorExpr {
    let t2 = t * t;
    let t3 = &t2 * t;
    let one = int(1);
    match (r, s) {
        (2, 1) => lw_vector(&[(one, &[1, 1]), (t.clone(), &[2])]),
        (3, 1) => lw_vector(&[
            (one, &[1, 1, 1]),
            (int(4) * t, &[2, 1]),
            (int(4) * &t2 + int(2) * t, &[3]),
        ]),
        (4, 1) => lw_vector(&[
            (one, &[1, 1, 1, 1]),
            (int(10) * t, &[2, 1, 1]),
            (int(9) * &t2, &[2, 2]),
            (int(24) * &t2 + int(10) * t, &[3, 1]),
            (int(36) * &t3 + int(24) * &t2 + int(6) * t, &[4]),
        ]),
        (2, 2) => {
            let u = t + t.recip();
            lw_vector(&[
                (one, &[1, 1, 1, 1]),
                (int(2) * &u, &[2, 1, 1]),
                (&u * &u - int(4), &[2, 2]),
                (int(2) * &u + int(6), &[3, 1]),
                (int(3) * &u + int(6), &[4]),
            ])
        }
        _ => unreachable!("no listed formula"),
    }
}

fn singular_vectors() -> Result<String, String> {
    let cases: [(u32, u32, [Rat; 3]); 4] = [
        (2, 1, [int(-1), int(1), rat(3, 2)]),
        (3, 1, [int(2), rat(-3, 2), rat(1, 3)]),
        (4, 1, [int(2), rat(-3, 2), rat(5, 2)]),
        (2, 2, [int(3), rat(-3, 2), rat(2, 5)]),
    ];
    for (r, s, ts) in &cases {
        for t in ts {
            let v = singular_vector(*r, *s, t).map_err(|e| format!("S_{r},{s}({t}): {e}"))?;
            ensure(v == listed_singular_vector(*r, *s, t), || format!("S_{r},{s}({t}) = {v}"))?;
            let (cv, hv) = (c_of_t(t).map_err(err)?, h_rs_of_t(*r, *s, t).map_err(err)?);
            for n in [1, 2] {
                let w = apply_mode(n, &v).eval(&cv, &hv);
                ensure(w.is_zero(), || format!("L_{n} S_{r},{s}({t}) = {w}"))?;
            }
        }
    }
    Ok("12 vectors match, all annihilated by L_1 and L_2".into())
}

fn kappa_values() -> Result<String, String> {
    for (sign, c, h, coef) in [
        (Sign::Minus, int(1), rat(1, 4), rat(-4, 3)),
        (Sign::Plus, int(25), rat(-5, 4), rat(4, 3)),
    ] {
        let t = sign.t();
        ensure(c_of_t(&t).map_err(err)? == c && h_rs_of_t(2, 1, &t).map_err(err)? == h, || {
            format!("parametrization at t = {t}")
        })?;
        let res = kappa(2, 1, sign, 8).map_err(err)?;
        ensure(res.kappa == KappaValue::Exact(2), || format!("kappa {sign} = {}", res.kappa))?;
        let rep = lw_vector(&[(coef.clone(), &[1, 1])]);
        ensure(res.representatives == vec![rep], || {
            format!("representative {sign}: {:?}", res.representatives)
        })?;
    }
    Ok("kappa(2,1,-) = kappa(2,1,+) = 2 with -/+ (4/3)L(-1)^2".into())
}

fn c_minus_two() -> Result<String, String> {
    let lvl1 = lw_vector(&[(int(1), &[3])]);
    let lvl2 = lw_vector(&[(int(1), &[1, 1, 1]), (int(-2), &[2, 1])]);
    for kk in 2..=4 {
        let dim = kernel_j(3, kk, &int(-2), &int(0)).len();
        ensure(dim == 3, || format!("k={kk}: c=-2 kernel dimension {dim}"))?;
        let mut levels = vec![lvl1.clone(), lvl2.clone()];
        levels.resize(kk, LWVectorExpr::zero());
        let v = KernelVector::from_levels(3, &levels);
        let image = block_gram(3, kk, &int(-2), &int(0)).mul_vec(v.coords());
        ensure(image.iter().all(Zero::is_zero), || format!("k={kk}: listed vector not in kernel"))?;
        let generic = kernel_j(3, kk, &int(5), &int(0)).len();
        ensure(generic == 2, || format!("k={kk}: c=5 kernel dimension {generic}"))?;
    }
    Ok("dim 3 at c=-2, dim 2 at c=5, for k=2..4".into())
}

fn classification_grid() -> Result<String, String> {
    let grid: Vec<(Rat, Rat, usize, bool)> = vec![
        (int(1), rat(1, 4), 1, true),
        (int(1), rat(1, 4), 2, true),
        (int(1), rat(1, 4), 3, false),
        (int(25), rat(-5, 4), 2, true),
        (int(25), rat(-5, 4), 3, false),
        (int(-2), int(0), 2, false),
        (int(1), int(0), 2, false),
        (rat(1, 2), rat(1, 5), 1, true),
        (rat(1, 2), rat(1, 5), 2, true),
        (rat(1, 2), rat(1, 5), 3, true),
        (rat(1, 2), rat(1, 5), 4, true),
        (rat(1, 2), rat(1, 5), 5, true),
    ];
    for (c, h, kk, expect) in &grid {
        let cl = classify(c, h, *kk, 12).map_err(err)?;
        ensure(cl.interlocked == *expect, || {
            format!("({c},{h},{kk}): case {} interlocked={}", cl.case.label(), cl.interlocked)
        })?;
    }
    Ok(format!("{} points", grid.len()))
}

fn heis_params() -> Vec<Rat> {
    vec![int(0), int(1), rat(1, 2), int(-1)]
}

fn heisenberg_traces() -> Result<String, String> {
    let mut count = 0;
    for a in heis_params() {
        for lambda in heis_params() {
            for kk in 1..=5 {
                let spec = HeisModuleSpec::new(a.clone(), lambda.clone(), kk).map_err(err)?;
                for v in [HeisVector::Vacuum, HeisVector::Alpha] {
                    let b = heisenberg::pstr_bruteforce(&spec, v, 6).map_err(err)?;
                    let c = heisenberg::pstr_closed_form(&spec, v, 6).map_err(err)?;
                    ensure(b == c, || format!("a={a} lambda={lambda} k={kk} {v:?}"))?;
                    count += 1;
                }
            }
        }
    }
    // δ table with x = λ − a
    let x = rat(3, 5);
    let table: Vec<Vec<(Rat, usize)>> = vec![
        vec![(int(1), 0)],
        vec![(x.clone(), 1)],
        vec![(rat(1, 2), 1), (rat(1, 2) * x.pow(2), 2)],
        vec![(rat(1, 2) * &x, 2), (rat(1, 6) * x.pow(3), 3)],
        vec![(rat(1, 8), 2), (rat(1, 4) * x.pow(2), 3), (rat(1, 24) * x.pow(4), 4)],
        vec![(rat(1, 8) * &x, 3), (rat(1, 12) * x.pow(3), 4), (rat(1, 120) * x.pow(5), 5)],
        vec![
            (rat(1, 48), 3),
            (rat(1, 16) * x.pow(2), 4),
            (rat(1, 48) * x.pow(4), 5),
            (rat(1, 720) * x.pow(6), 6),
        ],
        vec![
            (rat(1, 48) * &x, 4),
            (rat(1, 48) * x.pow(3), 5),
            (rat(1, 240) * x.pow(5), 6),
            (rat(1, 5040) * x.pow(7), 7),
        ],
    ];
    for (i, terms) in table.iter().enumerate() {
        let kk = i + 1;
        let expect = terms
            .iter()
            .fold(LogPoly::zero(), |acc, (c, j)| acc.add(&LogPoly::monomial(c.clone(), *j)));
        let got = heisenberg::delta_coefficient(&int(0), &x, kk);
        ensure(got == expect, || format!("delta table k={kk}: {got}"))?;
    }
    for a in heis_params() {
        for kk in [2, 4, 6, 8] {
            let spec = HeisModuleSpec::new(a.clone(), a.clone(), kk).map_err(err)?;
            let s = heisenberg::pstr_closed_form(&spec, HeisVector::Vacuum, 6).map_err(err)?;
            ensure(s.coeffs().iter().all(LogPoly::is_zero), || format!("no vanishing a={a} k={kk}"))?;
            if kk <= 4 {
                let b = heisenberg::pstr_bruteforce(&spec, HeisVector::Vacuum, 6).map_err(err)?;
                ensure(b.coeffs().iter().all(LogPoly::is_zero), || {
                    format!("brute force does not vanish a={a} k={kk}")
                })?;
            }
        }
    }
    Ok(format!("{count} series equal, delta table k=1..8, vanishing at lambda=a"))
}

/// Case-0 and Case-1(ii) points used for the Virasoro series.
fn virasoro_points() -> Vec<(Rat, Rat, usize, VirCase)> {
    let mut pts: Vec<_> = (1..=4).map(|kk| (rat(1, 2), rat(1, 5), kk, VirCase::Case0)).collect();
    pts.push((int(1), rat(1, 4), 2, VirCase::Case1ii { rs: 2 }));
    pts
}

fn virasoro_traces() -> Result<String, String> {
    for (c, h, kk, case) in virasoro_points() {
        let b = vir_pstr_bruteforce(&c, &h, kk, VirVector::Vacuum, 6).map_err(err)?;
        let cl = vir_pstr_closed(&c, &h, kk, case, 6).map_err(err)?;
        ensure(b == cl, || format!("({c},{h},{kk}): brute {b} vs closed {cl}"))?;
    }
    let mut factor = vec![LogPoly::zero(); 7];
    factor[0] = LogPoly::one();
    factor[2] = LogPoly::constant(int(-1));
    let expect = vir_verma_trace(&int(1), &rat(1, 4), 6)
        .mul(&LogQSeries::new(Rat::zero(), factor))
        .mul_logpoly(&LogPoly::monomial(int(1), 1));
    let got = vir_pstr_bruteforce(&int(1), &rat(1, 4), 2, VirVector::Vacuum, 6).map_err(err)?;
    ensure(got == expect, || format!("(1,1/4,2) lacks the (1-q^2) factor: {got}"))?;
    Ok("5 points through q^6".into())
}

fn log_derivative() -> Result<String, String> {
    let check = |vac: &LogQSeries, om: &LogQSeries, c: &Rat| -> bool {
        let shift = c / int(24);
        *om == q_ddq(&vac.shift(&shift)).shift(&-shift) && *om == omega_from_vacuum(vac, c)
    };
    let mut count = 0;
    for a in heis_params() {
        for lambda in heis_params() {
            for kk in 1..=5 {
                let spec = HeisModuleSpec::new(a.clone(), lambda.clone(), kk).map_err(err)?;
                let vac = heisenberg::pstr_bruteforce(&spec, HeisVector::Vacuum, 6).map_err(err)?;
                let om = heisenberg::pstr_bruteforce(&spec, HeisVector::Omega, 6).map_err(err)?;
                ensure(check(&vac, &om, &spec.central_charge()), || {
                    format!("Heisenberg a={a} lambda={lambda} k={kk}")
                })?;
                count += 1;
            }
        }
    }
    for (c, h, kk, _) in virasoro_points() {
        let vac = vir_pstr_bruteforce(&c, &h, kk, VirVector::Vacuum, 6).map_err(err)?;
        let om = vir_pstr_bruteforce(&c, &h, kk, VirVector::Omega, 6).map_err(err)?;
        ensure(check(&vac, &om, &c), || format!("Virasoro ({c},{h},{kk})"))?;
        count += 1;
    }
    Ok(format!("{count} omega series"))
}

/// Data for one `(r, s, t)` sample of the derivative criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiSample {
    pub r: u32,
    pub s: u32,
    pub t: Rat,
    /// Whether `𝒜_d b = −(∂_h 𝒜_d) S_{r,s}(t)` has a solution.
    pub consistent: bool,
    /// Whether `∂_h det 𝒜_d` vanishes at the point.
    pub det_derivative_zero: bool,
    /// `∂_h Φ_{r,s}` at the point.
    pub phi_derivative: Rat,
}

impl JacobiSample {
    /// `r ≠ s` and `t = ±1`.
    pub fn predicate(&self) -> bool {
        self.r != self.s && (self.t == int(1) || self.t == int(-1))
    }

    /// `(s² − r²)(t² − 1)/(4t)`.
    pub fn symbolic_phi_derivative(&self) -> Rat {
        let (r, s) = (i64::from(self.r), i64::from(self.s));
        int(s * s - r * r) * (&self.t * &self.t - int(1)) / (int(4) * &self.t)
    }
}

/// Evaluates the derivative criterion at `(c(t), h_{r,s}(t))`. Fails unless
/// `(r, s)` is the only curve through the point up to degree `rs`.
pub fn jacobi_sample(
    r: u32,
    s: u32,
    t: &Rat,
    dets: &mut HashMap<u32, BivarPoly>,
) -> Result<JacobiSample, Error> {
    let d = r * s;
    let (c, h) = (c_of_t(t)?, h_rs_of_t(r, s, t)?);
    let curves = curves_through(&c, &h, d);
    if curves != vec![(r.max(s), r.min(s))] {
        return Err(Error::Precondition(format!(
            "({r},{s}) at t = {t} is not the unique minimal curve: {curves:?}"
        )));
    }
    let g = gram_matrix(d);
    let a = g.matrix.eval(&c, &h);
    let da = g.matrix.diff_h(1).eval(&c, &h);
    let sv = singular_vector_coords(r, s, t)?;
    let rhs: Vec<Rat> = da.mul_vec(&sv).into_iter().map(|x| -x).collect();
    let consistent = rat_solve(&a, &rhs).is_some();
    if !dets.contains_key(&d) {
        dets.insert(d, fraction_free_det(&g.matrix)?);
    }
    let det_derivative_zero = dets[&d].diff_h(1).eval(&c, &h).is_zero();
    Ok(JacobiSample {
        r,
        s,
        t: t.clone(),
        consistent,
        det_derivative_zero,
        phi_derivative: phi(r, s).diff_h(1).eval(&c, &h),
    })
}

/// `count` seeded samples with `rs ≤ 5`, half of them drawing `t = ±1`.
pub fn jacobi_samples(seed: u64, count: usize) -> Vec<JacobiSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dets = HashMap::new();
    let mut out = Vec::new();
    while out.len() < count {
        let r = rng.gen_range(1..=5u32);
        let s = rng.gen_range(1..=5 / r);
        let t = if rng.gen_bool(0.5) {
            if rng.gen_bool(0.5) {
                int(1)
            } else {
                int(-1)
            }
        } else {
            let num = rng.gen_range(1..=7i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
            rat(num, rng.gen_range(1..=7))
        };
        if let Ok(sample) = jacobi_sample(r, s, &t, &mut dets) {
            out.push(sample);
        }
    }
    out
}

/// Seed of the sample set used by [`criteria`].
pub const JACOBI_SEED: u64 = 20240611;

fn jacobi_suite() -> Result<String, String> {
    let samples = jacobi_samples(JACOBI_SEED, 20);
    let mut positives = 0;
    for x in &samples {
        let p = x.predicate();
        let tag = || format!("(r,s,t)=({},{},{})", x.r, x.s, x.t);
        ensure(x.consistent == p, || format!("{}: consistent={} predicate={p}", tag(), x.consistent))?;
        ensure(x.det_derivative_zero == p, || format!("{}: det derivative zero={}", tag(), x.det_derivative_zero))?;
        if x.r != x.s {
            let sym = x.symbolic_phi_derivative();
            ensure(x.phi_derivative == sym, || format!("{}: dPhi/dh={} vs {sym}", tag(), x.phi_derivative))?;
        }
        positives += usize::from(p);
    }
    Ok(format!("{} samples, {positives} consistent", samples.len()))
}
