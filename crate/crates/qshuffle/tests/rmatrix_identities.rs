//! Structural identities of the R-matrix family: Yang-Baxter, unitarity,
//! the mixed (quasi) Yang-Baxter equations for the braided variant, residue
//! normalizations, half R-matrix bookkeeping, diagonal invariance, and the
//! braid-product identities.

use qshuffle::ring::{zslot, Mono, Rat, RingError, VEXP};
use qshuffle::rmatrix::{
    all_permutations, d_mat, f_rat, inversions, longest_element, perm_compose, perm_inverse,
    permutation_op, q_half, qbar_pow, r_mat, r_omega, r_sigma, r_sigma_bar, r_sigma_inv,
    r_tilde, Sign,
};
use qshuffle::tensor::MatRat;

fn z_mono(i: usize) -> Mono {
    Mono::var(zslot(i), 1)
}

fn q_rat(e: i32) -> Rat {
    Rat::qv(e, 0)
}

/// Multiplicative residue in the ratio variable `x = z_1/z_2` at
/// `x = qbar_sign^{-2}` of a two-slot operator: `-classical_{z_1} / point`.
fn x_residue(m: &MatRat, n: usize, sign: Sign) -> MatRat {
    let point = qbar_pow(n, sign, -2).mul(&z_mono(2));
    let point_rat = Rat::signed_mono(1, point.clone());
    let mut out = MatRat::zero(n, 2);
    for ((r, c), v) in m.iter() {
        let res: Result<Rat, RingError> = v.residue_classical(zslot(1), 1, &point);
        let res = res.expect("linear pole");
        out.add_to(r.clone(), c.clone(), &res.neg().div(&point_rat));
    }
    out
}

fn diag_inv(n: usize) -> MatRat {
    let diag: Vec<Rat> = (1..=n as i32).map(|i| Rat::qv(-2 * i, 0)).collect();
    qshuffle::tensor::diagonal(n, &diag)
}

fn ybe(n: usize) {
    let r = |i: usize, j: usize| r_mat(n).embed(&[i, j], 3);
    let lhs = r(1, 2).compose(&r(1, 3)).compose(&r(2, 3));
    let rhs = r(2, 3).compose(&r(1, 3)).compose(&r(1, 2));
    assert_eq!(lhs, rhs, "Yang-Baxter fails at n = {}", n);
}

#[test]
fn yang_baxter_n2() {
    ybe(2);
}

#[test]
fn yang_baxter_n3() {
    ybe(3);
}

fn unitarity(n: usize) {
    let lhs = r_mat(n).compose(&r_mat(n).embed(&[2, 1], 2));
    let expect = MatRat::identity(n, 2).scale(&f_rat(&z_mono(1), &z_mono(2)));
    assert_eq!(lhs, expect, "unitarity fails at n = {}", n);
}

#[test]
fn unitarity_n2() {
    unitarity(2);
}

#[test]
fn unitarity_n3() {
    unitarity(3);
}

fn quasi_ybe(n: usize, sign: Sign) {
    let r = |i: usize, j: usize| r_mat(n).embed(&[i, j], 3);
    let rt = |i: usize, j: usize| r_tilde(n, sign).embed(&[i, j], 3);
    // Rt_21 Rt_31 R_23 = R_23 Rt_31 Rt_21
    let lhs = rt(2, 1).compose(&rt(3, 1)).compose(&r(2, 3));
    let rhs = r(2, 3).compose(&rt(3, 1)).compose(&rt(2, 1));
    assert_eq!(lhs, rhs, "first mixed Yang-Baxter fails (n={}, {:?})", n, sign);
    // R_12 Rt_31 Rt_32 = Rt_32 Rt_31 R_12
    let lhs = r(1, 2).compose(&rt(3, 1)).compose(&rt(3, 2));
    let rhs = rt(3, 2).compose(&rt(3, 1)).compose(&r(1, 2));
    assert_eq!(lhs, rhs, "second mixed Yang-Baxter fails (n={}, {:?})", n, sign);
}

#[test]
fn quasi_ybe_n2_both_signs() {
    quasi_ybe(2, Sign::Plus);
    quasi_ybe(2, Sign::Minus);
}

#[test]
fn quasi_ybe_n3_plus() {
    quasi_ybe(3, Sign::Plus);
}

#[test]
fn r_has_residue_permutation_at_one() {
    // R(x) has a pole at x = 1 with multiplicative residue (q - q^{-1})(12).
    for n in [2usize, 3] {
        let point = z_mono(2);
        let point_rat = Rat::z(2);
        let mut res = MatRat::zero(n, 2);
        for ((r, c), v) in r_mat(n).iter() {
            let cl = v.residue_classical(zslot(1), 1, &point).unwrap();
            res.add_to(r.clone(), c.clone(), &cl.neg().div(&point_rat));
        }
        let expect = permutation_op(n, &[2, 1]).scale(&q_rat(1).sub(&q_rat(-1)));
        assert_eq!(res, expect);
    }
}

#[test]
fn braided_residue_and_half_r_residues_match() {
    for n in [2usize, 3] {
        for sign in [Sign::Plus, Sign::Minus] {
            let res_rt = x_residue(&r_tilde(n, sign), n, sign);
            let res_q = x_residue(&q_half(n, sign, false), n, sign);
            let res_qb = x_residue(&q_half(n, sign, true), n, sign);
            // q Res Q = -q^{-1} Res Qbar = (q^{-1} - q)^{-1} Res Rtilde
            let lhs1 = res_q.scale(&q_rat(1));
            let lhs2 = res_qb.scale(&q_rat(-1)).neg();
            let lhs3 = res_rt.scale(&q_rat(-1).sub(&q_rat(1)).recip());
            assert_eq!(lhs1, lhs2, "Q vs Qbar residues (n={}, {:?})", n, sign);
            assert_eq!(lhs1, lhs3, "Q vs Rtilde residues (n={}, {:?})", n, sign);
            if sign == Sign::Plus {
                assert_eq!(lhs1, permutation_op(n, &[2, 1]), "plus-side residue value");
            }
        }
    }
}

#[test]
fn half_r_matrices_sum_to_braided_r() {
    // Q + Qbar = Rtilde - sum_{i != j} E_ii (x) E_jj, on both sides.
    for n in [2usize, 3] {
        for sign in [Sign::Plus, Sign::Minus] {
            let lhs = q_half(n, sign, false).add(&q_half(n, sign, true));
            let mut offdiag = MatRat::zero(n, 2);
            for i in 1..=n as u8 {
                for j in 1..=n as u8 {
                    if i != j {
                        offdiag.set(vec![i, j], vec![i, j], Rat::one());
                    }
                }
            }
            let rhs = r_tilde(n, sign).sub(&offdiag);
            assert_eq!(lhs, rhs, "half sum fails (n={}, {:?})", n, sign);
        }
    }
}

#[test]
fn minus_side_is_twisted_plus_side() {
    // Rtilde^- = D_2 Rtilde^+ D_2^{-1} with the loop parameter replaced by
    // its minus-side partner (v -> q^{-1} v^{-1}).
    for n in [2usize, 3] {
        let d2 = d_mat(n).embed(&[2], 2);
        let d2i = diag_inv(n).embed(&[2], 2);
        let swap_param = |m: &MatRat| -> MatRat {
            let mut out = MatRat::zero(n, 2);
            for ((r, c), v) in m.iter() {
                out.add_to(r.clone(), c.clone(), &v.subst_var(VEXP, 1, &Mono::qv(-1, -1)).unwrap());
            }
            out
        };
        let lhs = r_tilde(n, Sign::Minus);
        let rhs = d2.compose(&swap_param(&r_tilde(n, Sign::Plus))).compose(&d2i);
        assert_eq!(lhs, rhs, "braided twist relation fails at n = {}", n);
        for bar in [false, true] {
            let lhs = q_half(n, Sign::Minus, bar);
            let rhs = d2.compose(&swap_param(&q_half(n, Sign::Plus, bar))).compose(&d2i);
            assert_eq!(lhs, rhs, "half twist relation fails (n={}, bar={})", n, bar);
        }
    }
}

#[test]
fn diagonal_conjugation_invariance() {
    // (D (x) D) M (D (x) D)^{-1} = M for R, Rtilde, Q, Qbar.
    for n in [2usize, 3] {
        let dd = d_mat(n).embed(&[1], 2).compose(&d_mat(n).embed(&[2], 2));
        let ddi = diag_inv(n).embed(&[1], 2).compose(&diag_inv(n).embed(&[2], 2));
        let mats = [
            r_mat(n),
            r_tilde(n, Sign::Plus),
            r_tilde(n, Sign::Minus),
            q_half(n, Sign::Plus, false),
            q_half(n, Sign::Plus, true),
            q_half(n, Sign::Minus, false),
            q_half(n, Sign::Minus, true),
        ];
        for m in &mats {
            assert_eq!(dd.compose(m).compose(&ddi), *m);
        }
    }
}

#[test]
fn limits_at_zero_and_infinity() {
    for n in [2usize, 3] {
        // x -> 0 is z_1 -> 0; x -> infinity is z_2 -> 0.
        let mut lim0 = MatRat::zero(n, 2);
        let mut liminf = MatRat::zero(n, 2);
        for ((r, c), v) in r_mat(n).iter() {
            lim0.add_to(r.clone(), c.clone(), &v.coeff_at_zero(1, 0));
            liminf.add_to(r.clone(), c.clone(), &v.coeff_at_zero(2, 0));
        }
        let mut expect0 = MatRat::zero(n, 2);
        let mut expect_inf = MatRat::zero(n, 2);
        for i in 1..=n as u8 {
            for j in 1..=n as u8 {
                let d = if i == j { 1 } else { 0 };
                expect0.set(vec![i, j], vec![i, j], q_rat(d));
                expect_inf.set(vec![i, j], vec![i, j], q_rat(-d));
                if i > j {
                    expect0.set(vec![i, j], vec![j, i], q_rat(1).sub(&q_rat(-1)));
                }
                if i < j {
                    expect_inf.set(vec![i, j], vec![j, i], q_rat(1).sub(&q_rat(-1)).neg());
                }
            }
        }
        assert_eq!(lim0, expect0, "limit at zero fails for n = {}", n);
        assert_eq!(liminf, expect_inf, "limit at infinity fails for n = {}", n);
    }
}

#[test]
fn braid_products_satisfy_exchange_identities() {
    let n = 2;
    for k in [2usize, 3] {
        let omega = longest_element(k);
        let r_om = r_omega(n, k);
        for sigma in all_permutations(k) {
            // Rbar_sigma R_{sigma omega} = sigma R_omega sigma^{-1}
            let lhs = r_sigma_bar(n, &sigma).compose(&r_sigma(n, &perm_compose(&sigma, &omega)));
            let rhs = r_om.conjugate_by_permutation(&sigma);
            assert_eq!(lhs, rhs, "first exchange identity fails for {:?}", sigma);
            // Rbar_sigma R_omega =
            //   sigma R_{sigma^{-1} omega} sigma^{-1} * prod_{inv} f(z_i/z_j)
            let lhs = r_sigma_bar(n, &sigma).compose(&r_om);
            let mut scale = Rat::one();
            for (i, j) in inversions(&sigma) {
                scale = scale.mul(&f_rat(&z_mono(i), &z_mono(j)));
            }
            let rhs = r_sigma(n, &perm_compose(&perm_inverse(&sigma), &omega))
                .conjugate_by_permutation(&sigma)
                .scale(&scale);
            assert_eq!(lhs, rhs, "second exchange identity fails for {:?}", sigma);
        }
    }
}

#[test]
fn r_sigma_is_word_independent_via_inverse() {
    // sanity: R_sigma R_{sigma^{-1} conjugated} style inverse check at k = 4
    let n = 2;
    let sigma = vec![2, 4, 1, 3];
    let prod = r_sigma(n, &sigma).compose(&r_sigma_inv(n, &sigma));
    assert_eq!(prod, MatRat::identity(n, 4));
}
