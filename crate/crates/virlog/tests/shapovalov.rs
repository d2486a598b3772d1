use num_traits::Zero;
use virlog::exact::{fraction_free_det, int, rat, BivarPoly, Rat};
use virlog::shapovalov::{
    c_of_t, curves_through, gram_matrix, h_rs_of_t, kac_det, kac_det_formula, phi, sqrt_phi,
};

fn c() -> BivarPoly {
    BivarPoly::c()
}
fn h() -> BivarPoly {
    BivarPoly::h()
}
fn k(n: i64) -> BivarPoly {
    BivarPoly::from_int(n)
}
fn q(n: i64, d: i64) -> BivarPoly {
    BivarPoly::constant(rat(n, d))
}

#[test]
fn gram_degree_one_to_three() {
    let g1 = gram_matrix(1);
    assert_eq!(g1.matrix.to_rows(), vec![vec![&k(2) * &h()]]);

    let h2 = &h() * &h();
    let g2 = gram_matrix(2);
    assert_eq!(
        g2.matrix.to_rows(),
        vec![
            vec![&(&k(8) * &h2) + &(&k(4) * &h()), &k(6) * &h()],
            vec![&k(6) * &h(), &(&k(4) * &h()) + &(&c() * &q(1, 2))],
        ]
    );

    let g3 = gram_matrix(3);
    let a11 = &(&k(24) * &h()) * &(&(&(&k(2) * &h2) + &(&k(3) * &h())) + &k(1));
    let a12 = &(&k(12) * &h()) * &(&(&k(3) * &h()) + &k(1));
    let a13 = &k(24) * &h();
    let a22 = &h() * &(&(&(&k(8) * &h()) + &k(8)) + &c());
    let a23 = &k(10) * &h();
    let a33 = &(&k(6) * &h()) + &(&k(2) * &c());
    assert_eq!(
        g3.matrix.to_rows(),
        vec![
            vec![a11, a12.clone(), a13.clone()],
            vec![a12, a22, a23.clone()],
            vec![a13, a23, a33],
        ]
    );
    let names: Vec<String> = g3.basis.iter().map(|p| p.to_string()).collect();
    assert_eq!(names, ["L(-1)^3", "L(-2)L(-1)", "L(-3)"]);
}

#[test]
fn gram_matrices_symmetric() {
    for l in 1..=6 {
        assert!(gram_matrix(l).matrix.is_symmetric());
    }
}

#[test]
fn phi_examples() {
    assert_eq!(phi(1, 1), &h() * &h());
    assert!(phi(2, 1).eval(&int(1), &rat(1, 4)).is_zero());
    assert!(phi(2, 1).eval(&int(25), &rat(-5, 4)).is_zero());
    for r in 1..=5 {
        for s in 1..=5 {
            assert_eq!(phi(r, s), phi(s, r));
        }
        assert_eq!(phi(r, r), sqrt_phi(r).pow(2));
    }
    // √Φ_{α,α} = h + (α²−1)(c−1)/24
    assert_eq!(sqrt_phi(2), &h() + &(&(&c() - &k(1)) * &q(3, 24)));
}

#[test]
fn parametrization_examples() {
    assert_eq!(c_of_t(&int(-1)).unwrap(), int(1));
    assert_eq!(h_rs_of_t(2, 1, &int(-1)).unwrap(), rat(1, 4));
    assert_eq!(c_of_t(&int(1)).unwrap(), int(25));
    assert_eq!(h_rs_of_t(2, 1, &int(1)).unwrap(), rat(-5, 4));
    assert_eq!(c_of_t(&int(-2)).unwrap(), int(-2));
    assert_eq!(h_rs_of_t(1, 1, &int(-2)).unwrap(), int(0));
    assert!(c_of_t(&int(0)).is_err());
    assert!(h_rs_of_t(2, 1, &int(0)).is_err());
}

#[test]
fn roots_lie_on_curves() {
    let ts = [rat(-1, 1), rat(1, 1), rat(2, 1), rat(-3, 2), rat(5, 7), rat(-2, 9)];
    for t in &ts {
        let cv = c_of_t(t).unwrap();
        for r in 1..=6u32 {
            for s in 1..=6u32 {
                if r * s > 6 {
                    continue;
                }
                let hv = h_rs_of_t(r, s, t).unwrap();
                assert!(phi(r, s).eval(&cv, &hv).is_zero(), "Φ_{r},{s} at t={t}");
            }
        }
    }
}

/// `4t · ∂Φ/∂h (c(t), h(t))` minus `(s²−r²)(t²−1)` is a polynomial in `t`
/// of degree at most 2; vanishing at four points makes it identically zero.
#[test]
fn phi_derivative_on_curve() {
    let ts = [rat(2, 1), rat(-3, 1), rat(1, 2), rat(7, 5)];
    for r in 1..=4i64 {
        for s in 1..=3i64 {
            let d = phi(r as u32, s as u32).diff_h(1);
            for t in &ts {
                let cv = c_of_t(t).unwrap();
                let hv = h_rs_of_t(r as u32, s as u32, t).unwrap();
                let lhs = d.eval(&cv, &hv) * int(4) * t;
                let rhs = int(s * s - r * r) * (t * t - int(1));
                assert_eq!(lhs, rhs, "(r,s)=({r},{s}) t={t}");
            }
        }
    }
}

#[test]
fn kac_determinant_degree_three_exact() {
    let det = fraction_free_det(&gram_matrix(3).matrix).unwrap();
    let expect = (&(&phi(1, 1) * &phi(2, 1)) * &phi(3, 1)).scale(&int(2304));
    assert_eq!(det, expect);
    assert_eq!(kac_det_formula(3), &(&phi(1, 1) * &phi(2, 1)) * &phi(3, 1));
}

#[test]
fn kac_determinant_up_to_constant() {
    for l in 1..=5 {
        let kd = kac_det(l).unwrap();
        let gamma = kd.constant.unwrap_or_else(|| panic!("degree {l}: not a constant multiple"));
        assert!(!gamma.is_zero());
        assert_eq!(kd.product.scale(&gamma), kd.det);
    }
    assert_eq!(kac_det(1).unwrap().constant, Some(int(2)));
    assert_eq!(kac_det(3).unwrap().constant, Some(int(2304)));
}

/// Brute force over every `(r, s)` with `rs ≤ bound`.
fn curves_oracle(cv: &Rat, hv: &Rat, bound: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for r in 1..=bound {
        for s in 1..=r {
            if r * s <= bound && phi(r, s).eval(cv, hv).is_zero() {
                out.push((r, s));
            }
        }
    }
    out.sort_by_key(|&(r, s)| (r * s, r));
    out
}

#[test]
fn curves_through_examples() {
    assert_eq!(curves_through(&int(1), &rat(1, 4), 6), vec![(2, 1), (3, 2)]);
    // Φ_{3,1}(−2, 0) = (0 − 5 + 1)(0 + 1) + 64/16 = 0
    assert_eq!(curves_through(&int(-2), &int(0), 4), vec![(1, 1), (3, 1)]);
    assert_eq!(curves_through(&int(-2), &int(0), 2), vec![(1, 1)]);
    assert!(curves_through(&rat(1, 2), &rat(1, 3), 8).is_empty());
    for (cv, hv) in [
        (int(1), int(0)),
        (int(25), rat(-5, 4)),
        (rat(1, 2), rat(1, 16)),
        (int(-2), rat(-1, 8)),
        (rat(1, 2), rat(1, 5)),
    ] {
        assert_eq!(curves_through(&cv, &hv, 12), curves_oracle(&cv, &hv, 12));
    }
}
