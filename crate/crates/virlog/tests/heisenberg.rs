use std::collections::BTreeMap;

use virlog::exact::{int, rat, Rat, RatMatrix};
use virlog::heisenberg::{
    alpha_action, alpha_mode, delta_coefficient, graded_trace, pstr_bruteforce, pstr_closed_form,
    virasoro_mode, HeisModuleSpec, HeisVector,
};
use virlog::qseries::{eta_inverse, q_ddq, LogPoly};
use virlog::vircore::{partition_count, Partition};

fn part(p: &[u32]) -> Partition {
    Partition::new(p.to_vec())
}

fn fock(entries: &[(&[u32], i64)]) -> BTreeMap<Partition, Rat> {
    entries.iter().map(|(p, c)| (part(p), int(*c))).collect()
}

fn spec(a: Rat, lambda: Rat, k: usize) -> HeisModuleSpec {
    HeisModuleSpec::new(a, lambda, k).unwrap()
}

fn params() -> Vec<Rat> {
    vec![int(0), int(1), rat(1, 2), int(-1)]
}

/// Polynomial in `L` from `(coefficient, power)` pairs.
fn lpoly(terms: &[(Rat, usize)]) -> LogPoly {
    terms
        .iter()
        .fold(LogPoly::zero(), |acc, (c, j)| acc.add(&LogPoly::monomial(c.clone(), *j)))
}

#[test]
fn alpha_action_examples() {
    assert_eq!(alpha_action(1, &part(&[1, 1])).unwrap(), fock(&[(&[1], 2)]));
    assert_eq!(alpha_action(2, &part(&[2])).unwrap(), fock(&[(&[], 2)]));
    assert!(alpha_action(3, &part(&[1])).unwrap().is_empty());
    assert_eq!(alpha_action(-2, &part(&[3, 1])).unwrap(), fock(&[(&[3, 2, 1], 1)]));
    assert!(alpha_action(0, &part(&[1])).is_err());
}

/// `α_x α_y` on `W(l)`, zero when an intermediate degree is negative.
fn alpha_product(s: &HeisModuleSpec, x: i32, y: i32, l: i32) -> RatMatrix {
    let k = s.k;
    let dim = |d: i32| k * partition_count(d as usize) as usize;
    let (mid, end) = (l - y, l - x - y);
    if mid < 0 || end < 0 {
        return RatMatrix::zeros(dim(end.max(0)), dim(l));
    }
    let first = alpha_mode(s, y, l as u32).unwrap().matrix;
    alpha_mode(s, x, mid as u32).unwrap().matrix.mul(&first)
}

#[test]
fn heisenberg_commutator() {
    let s = spec(rat(1, 2), rat(2, 3), 2);
    for l in 0..=4i32 {
        for m in -3i32..=3 {
            for n in -3i32..=3 {
                if l - m - n < 0 {
                    continue;
                }
                let lhs = alpha_product(&s, m, n, l).sub(&alpha_product(&s, n, m, l));
                let expect = if m + n == 0 {
                    RatMatrix::identity(lhs.rows()).scale(&int(m as i64))
                } else {
                    RatMatrix::zeros(lhs.rows(), lhs.cols())
                };
                assert_eq!(lhs, expect, "l={l} m={m} n={n}");
            }
        }
    }
}

#[test]
fn l0_matrix_forms() {
    for a in params() {
        for lambda in params() {
            for k in 1..=4usize {
                let s = spec(a.clone(), lambda.clone(), k);
                let w0 = &lambda * &lambda / int(2) - &a * &lambda;
                for l in 0..=5u32 {
                    let p = partition_count(l as usize) as usize;
                    let n = k * p;
                    let expect = RatMatrix::identity(n)
                        .scale(&(&w0 + int(l as i64)))
                        .add(&RatMatrix::shift(n, p).scale(&(&lambda - &a)))
                        .add(&RatMatrix::shift(n, 2 * p).scale(&rat(1, 2)));
                    let got = virasoro_mode(&s, 0, l).unwrap();
                    assert_eq!(got.matrix, expect, "a={a} lambda={lambda} k={k} l={l}");
                    let alpha0 = alpha_mode(&s, 0, l).unwrap().matrix;
                    let expect_alpha = RatMatrix::identity(n).scale(&lambda).add(&RatMatrix::shift(n, p));
                    assert_eq!(alpha0, expect_alpha);
                    assert_eq!(alpha0.mul(&got.matrix), got.matrix.mul(&alpha0));
                }
            }
        }
    }
    let plain = virasoro_mode(&spec(int(0), int(0), 1), 0, 2).unwrap();
    assert_eq!(plain.matrix, RatMatrix::identity(2).scale(&int(2)));
}

#[test]
fn operators_are_block_upper_triangular() {
    let s = spec(rat(1, 2), int(1), 3);
    for l in 0..=4u32 {
        let p = partition_count(l as usize) as usize;
        for m in [virasoro_mode(&s, 0, l).unwrap().matrix, alpha_mode(&s, 0, l).unwrap().matrix] {
            let diag = m.block(0, 0, p, p);
            for bi in 0..3 {
                assert_eq!(m.block(bi * p, bi * p, p, p), diag);
                for bj in 0..bi {
                    assert!(m.block(bi * p, bj * p, p, p).is_zero());
                }
            }
        }
    }
}

#[test]
fn virasoro_bracket_on_fock_modules() {
    for a in [int(0), rat(1, 2), int(-1)] {
        let s = spec(a.clone(), rat(1, 3), 2);
        let c = int(1) - int(12) * &a * &a;
        for l in 0..=4i32 {
            for m in -2i32..=2 {
                for n in -2i32..=2 {
                    let (mid_n, mid_m, end) = (l - n, l - m, l - m - n);
                    if mid_n < 0 || mid_m < 0 || end < 0 {
                        continue;
                    }
                    let op = |x: i32, deg: i32| virasoro_mode(&s, x, deg as u32).unwrap().matrix;
                    let lhs = op(m, mid_n).mul(&op(n, l)).sub(&op(n, mid_m).mul(&op(m, l)));
                    let mut rhs = op(m + n, l).scale(&int((m - n) as i64));
                    if m + n == 0 {
                        let central = &c * rat((m * m * m - m) as i64, 12);
                        rhs = rhs.add(&RatMatrix::identity(rhs.rows()).scale(&central));
                    }
                    assert_eq!(lhs, rhs, "a={a} l={l} m={m} n={n}");
                }
            }
        }
    }
}

#[test]
fn delta_table() {
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
        let k = i + 1;
        let expect = lpoly(terms);
        assert_eq!(delta_coefficient(&rat(1, 5), &(rat(1, 5) + &x), k), expect, "k={k}");
        let s = spec(rat(1, 5), rat(1, 5) + &x, k);
        assert_eq!(pstr_closed_form(&s, HeisVector::Vacuum, 0).unwrap().coeff(0), &expect);
    }
    let xs = spec(int(0), int(1), 3);
    assert_eq!(
        pstr_closed_form(&xs, HeisVector::Vacuum, 3).unwrap().coeff(3),
        &lpoly(&[(rat(3, 2), 1), (rat(3, 2), 2)])
    );
}

#[test]
fn vanishing_at_lambda_equal_a() {
    for a in params() {
        for k in [2usize, 4, 6, 8] {
            let s = spec(a.clone(), a.clone(), k);
            let closed = pstr_closed_form(&s, HeisVector::Vacuum, 6).unwrap();
            assert!(closed.coeffs().iter().all(LogPoly::is_zero), "closed a={a} k={k}");
            if k <= 4 {
                let brute = pstr_bruteforce(&s, HeisVector::Vacuum, 6).unwrap();
                assert!(brute.coeffs().iter().all(LogPoly::is_zero), "brute a={a} k={k}");
            }
        }
        let odd = pstr_closed_form(&spec(a.clone(), a.clone(), 3), HeisVector::Vacuum, 2).unwrap();
        assert_eq!(odd.coeff(2), &LogPoly::monomial(int(1), 1));
    }
}

#[test]
fn bruteforce_examples() {
    let s = spec(int(0), int(0), 1);
    assert_eq!(pstr_bruteforce(&s, HeisVector::Vacuum, 6).unwrap(), eta_inverse(6));

    let one = pstr_bruteforce(&spec(int(0), int(1), 1), HeisVector::Vacuum, 6).unwrap();
    let two = pstr_bruteforce(&spec(int(0), int(1), 2), HeisVector::Vacuum, 6).unwrap();
    assert_eq!(two, one.mul_logpoly(&LogPoly::monomial(int(1), 1)));
    assert_eq!(two.offset(), &(rat(1, 2) - rat(1, 24)));
}

#[test]
fn bruteforce_matches_closed_form() {
    for a in params() {
        for lambda in params() {
            for k in 1..=5usize {
                let s = spec(a.clone(), lambda.clone(), k);
                for v in [HeisVector::Vacuum, HeisVector::Alpha, HeisVector::Omega] {
                    let brute = pstr_bruteforce(&s, v, 6).unwrap();
                    let closed = pstr_closed_form(&s, v, 6).unwrap();
                    assert_eq!(brute, closed, "a={a} lambda={lambda} k={k} v={v:?}");
                }
            }
        }
    }
}

#[test]
fn graded_dimension_scales_with_k() {
    for (a, lambda) in [(int(0), int(1)), (rat(1, 2), int(-1))] {
        let base = graded_trace(&spec(a.clone(), lambda.clone(), 1), 6);
        for k in 1..=4usize {
            let t = graded_trace(&spec(a.clone(), lambda.clone(), k), 6);
            assert_eq!(t, base.scale(&int(k as i64)));
            assert!(t.coeffs().iter().all(|p| p.degree().unwrap_or(0) == 0));
        }
    }
}

#[test]
fn omega_is_log_derivative() {
    for a in params() {
        for lambda in params() {
            for k in 1..=4usize {
                let s = spec(a.clone(), lambda.clone(), k);
                let shift = s.central_charge() / int(24);
                let vac = pstr_bruteforce(&s, HeisVector::Vacuum, 6).unwrap();
                let om = pstr_bruteforce(&s, HeisVector::Omega, 6).unwrap();
                assert_eq!(om, q_ddq(&vac.shift(&shift)).shift(&-shift));
            }
        }
    }
}

#[test]
fn spec_invariants() {
    let s = spec(rat(1, 2), int(3), 2);
    assert_eq!(s.central_charge(), int(-2));
    assert_eq!(s.lowest_weight(), rat(9, 2) - rat(3, 2));
    assert_eq!(s.series_offset(), rat(25, 8) - rat(1, 24));
    assert!(HeisModuleSpec::new(int(0), int(0), 0).is_err());
}
