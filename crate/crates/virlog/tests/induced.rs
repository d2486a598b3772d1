use num_traits::Zero;
use virlog::exact::{fraction_free_det, int, rat, BivarPoly, Rat, RatMatrix};
use virlog::induced::{
    block_det_check, block_gram, block_gram_direct, block_gram_symbolic, classify, kappa,
    kernel_j, kernel_j_cascade, singular_vector, socle_radical_dims, CaseTag, KappaValue,
    KernelVector, Sign,
};
use virlog::shapovalov::{c_of_t, gram_matrix, h_rs_of_t};
use virlog::vircore::{apply_mode, partition_count, partitions_of, LWVectorExpr, Partition};

fn c() -> BivarPoly {
    BivarPoly::c()
}
fn h() -> BivarPoly {
    BivarPoly::h()
}
fn k(n: i64) -> BivarPoly {
    BivarPoly::from_int(n)
}
fn p(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec())
}

/// `Σ coef · monomial` with rational coefficients.
fn vec_of(terms: &[(Rat, &[u32])]) -> LWVectorExpr {
    let mut v = LWVectorExpr::zero();
    for (x, parts) in terms {
        v.add_scaled(&LWVectorExpr::from_partition(p(parts)), &BivarPoly::constant(x.clone()));
    }
    v
}

fn in_kernel(l: u32, kk: usize, cv: &Rat, hv: &Rat, levels: &[LWVectorExpr]) -> bool {
    let mut levels = levels.to_vec();
    levels.resize(kk, LWVectorExpr::zero());
    let v = KernelVector::from_levels(l, &levels);
    block_gram(l, kk, cv, hv)
        .mul_vec(v.coords())
        .iter()
        .all(Zero::is_zero)
}

#[test]
fn block_gram_printed_examples() {
    let m = block_gram_symbolic(1, 3);
    assert_eq!(
        m.to_rows(),
        vec![
            vec![&k(2) * &h(), k(2), k(0)],
            vec![k(0), &k(2) * &h(), k(2)],
            vec![k(0), k(0), &k(2) * &h()],
        ]
    );

    let m = block_gram_symbolic(2, 3);
    let a11 = &(&k(8) * &(&h() * &h())) + &(&k(4) * &h());
    let a22 = &(&k(4) * &h()) + &c().scale(&rat(1, 2));
    let b11 = [a11, &(&k(16) * &h()) + &k(4), k(8)];
    let b12 = [&k(6) * &h(), k(6), k(0)];
    let b22 = [a22, k(4), k(0)];
    let block = |d: &[BivarPoly; 3]| -> Vec<Vec<BivarPoly>> {
        vec![
            vec![d[0].clone(), d[1].clone(), d[2].clone()],
            vec![k(0), d[0].clone(), d[1].clone()],
            vec![k(0), k(0), d[0].clone()],
        ]
    };
    let (x11, x12, x22) = (block(&b11), block(&b12), block(&b22));
    let mut expect = Vec::new();
    for r in 0..3 {
        expect.push([x11[r].clone(), x12[r].clone()].concat());
    }
    for r in 0..3 {
        expect.push([x12[r].clone(), x22[r].clone()].concat());
    }
    assert_eq!(m.to_rows(), expect);

    assert_eq!(block_gram_symbolic(2, 1), gram_matrix(2).matrix);
}

#[test]
fn block_gram_matches_direct_reduction() {
    let points = [(int(1), rat(1, 4)), (int(-2), int(0)), (rat(1, 2), rat(1, 5)), (int(7), rat(-3, 2))];
    for l in 1..=4 {
        for kk in 1..=3 {
            for (cv, hv) in &points {
                assert_eq!(
                    block_gram(l, kk, cv, hv),
                    block_gram_direct(l, kk, cv, hv),
                    "l={l} k={kk} c={cv} h={hv}"
                );
            }
        }
    }
}

#[test]
fn block_determinant_small() {
    for l in 1..=3 {
        for kk in 1..=3 {
            let chk = block_det_check(l, kk).unwrap();
            assert!(chk.equal, "l={l} k={kk}");
        }
    }
    let chk = block_det_check(1, 3).unwrap();
    assert_eq!(chk.lhs, (&k(2) * &h()).pow(3));
    let a2 = fraction_free_det(&gram_matrix(2).matrix).unwrap();
    assert_eq!(block_det_check(2, 2).unwrap().lhs, a2.pow(2));
}

#[test]
fn kernel_at_c1_degree2() {
    let (cv, hv) = (int(1), rat(1, 4));
    let s21 = vec_of(&[(int(1), &[1, 1]), (int(-1), &[2])]);
    let r = vec_of(&[(rat(-4, 3), &[1, 1])]);
    for kk in 2..=4 {
        assert_eq!(kernel_j(2, kk, &cv, &hv).len(), 2);
        assert!(in_kernel(2, kk, &cv, &hv, &[s21.clone()]));
        assert!(in_kernel(2, kk, &cv, &hv, &[r.clone(), s21.clone()]));
    }
}

#[test]
fn kernel_c_minus_two_anomaly() {
    let (cv, hv) = (int(-2), int(0));
    // (L_{-1}² − 2L_{-2})L_{-1} u_2 + L_{-3} u_1
    let lvl2 = vec_of(&[(int(1), &[1, 1, 1]), (int(-2), &[2, 1])]);
    let lvl1 = vec_of(&[(int(1), &[3])]);
    for kk in 2..=4 {
        assert_eq!(kernel_j(3, kk, &cv, &hv).len(), 3);
        assert!(in_kernel(3, kk, &cv, &hv, &[lvl1.clone(), lvl2.clone()]));
    }
    for cv in [int(5), int(3), rat(1, 2)] {
        assert_eq!(kernel_j(3, 2, &cv, &int(0)).len(), 2, "c={cv}");
    }
    assert!(kernel_j(2, 3, &rat(1, 2), &rat(1, 3)).is_empty());
}

fn same_span(a: &[KernelVector], b: &[KernelVector]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let rows: Vec<Vec<Rat>> = a.iter().chain(b).map(|v| v.coords().to_vec()).collect();
    if rows.is_empty() {
        return true;
    }
    RatMatrix::from_rows(rows).rank() == a.len()
}

#[test]
fn cascade_agrees_with_direct_kernel() {
    let points = [
        (int(1), rat(1, 4)),
        (int(25), rat(-5, 4)),
        (int(-2), int(0)),
        (int(1), int(0)),
        (rat(1, 2), rat(1, 5)),
        (int(5), int(0)),
    ];
    for l in 1..=4 {
        for kk in 1..=3 {
            for (cv, hv) in &points {
                let a = kernel_j(l, kk, cv, hv);
                let b = kernel_j_cascade(l, kk, cv, hv);
                assert!(same_span(&a, &b), "l={l} k={kk} c={cv} h={hv}");
            }
        }
    }
}

/// Expected singular vectors as `(coef, parts)` lists for a given `t`.
fn s_expected(r: u32, s: u32, t: &Rat) -> LWVectorExpr {
    let t2 = t * t;
    let t3 = &t2 * t;
    let one = int(1);
    match (r, s) {
        (2, 1) => vec_of(&[(one, &[1, 1]), (t.clone(), &[2])]),
        (3, 1) => vec_of(&[
            (one, &[1, 1, 1]),
            (int(4) * t, &[2, 1]),
            (int(4) * &t2 + int(2) * t, &[3]),
        ]),
        (4, 1) => vec_of(&[
            (one, &[1, 1, 1, 1]),
            (int(10) * t, &[2, 1, 1]),
            (int(9) * &t2, &[2, 2]),
            (int(24) * &t2 + int(10) * t, &[3, 1]),
            (int(36) * &t3 + int(24) * &t2 + int(6) * t, &[4]),
        ]),
        (2, 2) => {
            let u = t + t.recip();
            vec_of(&[
                (one, &[1, 1, 1, 1]),
                (int(2) * &u, &[2, 1, 1]),
                (&u * &u - int(4), &[2, 2]),
                (int(2) * &u + int(6), &[3, 1]),
                (int(3) * &u + int(6), &[4]),
            ])
        }
        _ => unreachable!(),
    }
}

#[test]
fn singular_vectors_match_list() {
    let cases: [(u32, u32, Vec<Rat>); 4] = [
        (2, 1, vec![int(-1), int(1), int(-2), rat(3, 2)]),
        (3, 1, vec![int(2), rat(-3, 2), rat(1, 3)]),
        (4, 1, vec![int(2), rat(-3, 2), rat(5, 2)]),
        (2, 2, vec![int(3), rat(-3, 2), rat(2, 5)]),
    ];
    for (r, s, ts) in cases {
        for t in &ts {
            let v = singular_vector(r, s, t).unwrap_or_else(|e| panic!("S_{r},{s}({t}): {e}"));
            assert_eq!(v, s_expected(r, s, t), "S_{r},{s}({t})");
            let cv = c_of_t(t).unwrap();
            let hv = h_rs_of_t(r, s, t).unwrap();
            for n in [1, 2] {
                let w = apply_mode(n, &v).eval(&cv, &hv);
                assert!(w.is_zero(), "L_{n} S_{r},{s}({t}) = {w}");
            }
        }
    }
    assert_eq!(singular_vector(2, 1, &int(-1)).unwrap().to_string(), "L(-1)^2 - L(-2)");
}

#[test]
fn singular_vector_reports_non_minimal() {
    // (3,2) at t=−1 has h = 1/4, already on Φ_{2,1}
    assert!(singular_vector(3, 2, &int(-1)).is_err());
    assert!(singular_vector(2, 1, &int(0)).is_err());
}

#[test]
fn kappa_two_one() {
    let m = kappa(2, 1, Sign::Minus, 6).unwrap();
    assert_eq!(m.kappa, KappaValue::Exact(2));
    assert_eq!(m.representatives, vec![vec_of(&[(rat(-4, 3), &[1, 1])])]);
    let pl = kappa(2, 1, Sign::Plus, 6).unwrap();
    assert_eq!(pl.kappa, KappaValue::Exact(2));
    assert_eq!(pl.representatives, vec![vec_of(&[(rat(4, 3), &[1, 1])])]);
    assert!(kappa(2, 2, Sign::Minus, 6).is_err());
}

#[test]
fn kappa_matches_kernel_dimension() {
    for (r, s) in [(2, 1), (3, 1)] {
        for sign in [Sign::Minus, Sign::Plus] {
            let cap = 5;
            let res = kappa(r, s, sign, cap).unwrap();
            let kv = match res.kappa {
                KappaValue::Exact(v) => v,
                KappaValue::AtLeast(v) => v,
            };
            assert!(kv >= 2);
            let t = sign.t();
            let (cv, hv) = (c_of_t(&t).unwrap(), h_rs_of_t(r, s, &t).unwrap());
            let dim = kernel_j(r * s, cap as usize, &cv, &hv).len() as u32;
            assert_eq!(dim, kv.min(cap), "({r},{s}) {sign:?}");
        }
    }
}

#[test]
fn classification_examples() {
    let cl = classify(&int(1), &rat(1, 4), 2, 12).unwrap();
    assert_eq!(cl.case, CaseTag::Case1ii { kappa: KappaValue::Exact(2) });
    assert!(cl.interlocked);
    assert_eq!(cl.minimal, Some((2, 1)));
    assert!(!classify(&int(1), &rat(1, 4), 3, 12).unwrap().interlocked);
    assert!(classify(&int(25), &rat(-5, 4), 2, 12).unwrap().interlocked);
    let cl = classify(&int(-2), &int(0), 2, 12).unwrap();
    assert_eq!(cl.case, CaseTag::Case1i);
    assert!(!cl.interlocked);
    assert!(!classify(&int(1), &int(0), 2, 12).unwrap().interlocked);
    for kk in 1..=5 {
        let cl = classify(&rat(1, 2), &rat(1, 5), kk, 12).unwrap();
        assert_eq!(cl.case, CaseTag::Case0 { bound: 12 });
        assert!(cl.interlocked);
    }
    assert!(classify(&int(-2), &int(0), 1, 12).unwrap().interlocked);
}

#[test]
fn socle_radical_examples() {
    for row in socle_radical_dims(&rat(1, 2), &rat(1, 5), 3, 4) {
        let pl = partition_count(row.degree as usize) as usize;
        assert_eq!((row.dim_w, row.dim_soc, row.dim_rad), (3 * pl, pl, 2 * pl));
    }
    let t = socle_radical_dims(&int(1), &rat(1, 4), 2, 5);
    assert_eq!(t[2].dim_w, 2);
    assert_eq!(kernel_j(3, 2, &int(1), &rat(1, 4)).len(), 2);
    for row in &t {
        let l = row.degree as usize;
        let p_rs = partition_count(l) - if l >= 2 { partition_count(l - 2) } else { 0 };
        assert_eq!(row.dim_soc as u64, p_rs, "soc at {l}");
        assert_eq!(row.dim_w, 2 * row.dim_soc, "interlocked dims at {l}");
    }
}

fn shifted(v: &KernelVector, n: i32, kk: usize) -> Vec<LWVectorExpr> {
    (1..=kk).map(|j| apply_mode(-n, &v.level(j))).collect()
}

#[test]
fn kernel_is_a_submodule() {
    let points = [(int(1), rat(1, 4)), (int(-2), int(0)), (int(25), rat(-5, 4)), (int(1), int(0))];
    for (cv, hv) in &points {
        for kk in 1..=3 {
            for l in 1..=3 {
                for v in kernel_j(l, kk, cv, hv) {
                    for n in [1, 2] {
                        let lv = shifted(&v, n, kk);
                        assert!(in_kernel(l + n as u32, kk, cv, hv, &lv), "c={cv} h={hv} l={l}");
                    }
                }
            }
        }
    }
}

#[test]
fn degree_d_plus_one_identity() {
    // (c, h, d) in Case (1)
    let points = [(int(1), rat(1, 4), 2u32), (int(25), rat(-5, 4), 2), (int(-2), int(0), 1), (int(1), int(0), 1)];
    for (cv, hv, d) in &points {
        for kk in 1..=3 {
            let jd = kernel_j(*d, kk, cv, hv);
            let jd1 = kernel_j(d + 1, kk, cv, hv);
            let images: Vec<KernelVector> = jd
                .iter()
                .map(|v| KernelVector::from_levels(d + 1, &shifted(v, 1, kk)))
                .collect();
            assert!(same_span(&images, &jd1), "c={cv} h={hv} k={kk}");
        }
    }
}

#[test]
fn kernel_vector_levels_roundtrip() {
    let basis = partitions_of(2);
    let v = KernelVector::from_levels(2, &[
        LWVectorExpr::from_coords(&basis, &[int(1), int(2)]),
        LWVectorExpr::from_coords(&basis, &[int(3), int(4)]),
    ]);
    assert_eq!(v.coords(), &[int(1), int(3), int(2), int(4)]);
    assert_eq!(v.level(2), LWVectorExpr::from_coords(&basis, &[int(3), int(4)]));
    assert_eq!(v.leading_level(), 2);
}
