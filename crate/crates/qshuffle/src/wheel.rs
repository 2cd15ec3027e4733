//! Wheel conditions: iterated residues at geometric specializations and the
//! reduced tensors they factor through.
//!
//! For a symmetric k-slot tensor X and a composition k = lambda_1 + ... +
//! lambda_u with group anchors c_1 = 1, c_{s+1} = c_s + lambda_s, specialize
//! the variables of each group to the geometric chain
//! z_{c_s + e} = z_{c_s} qbar^{2e} by taking iterated residues.  Membership
//! in the small algebra asks that for every composition the result factors as
//!
//!   (q^{-1} - q)^{k-u} F M X^(lambda)(y_1,...,y_u) N P
//!
//! with y_s = z_{c_s}, where F is a scalar product of f values over pairs of
//! specialized variables, M and N are ordered products of R-matrix factors,
//! and P is the permutation operator cyclically rotating each group.  On the
//! minus side qbar is replaced by its minus-side value and the diagonal
//! twist D = diag(q^2, ..., q^{2n}) is placed in front on every slot.

use crate::ring::{zslot, MPoly, Mono, Rat, RingError};
use crate::rmatrix::{
    f_inv_rat, f_rat, perm_inverse, permutation_op, qbar_pow, r_scaled, r_sigma, r_sigma_inv, Sign,
};
use crate::shuffle::is_symmetric;
use crate::tensor::{all_indices, MatRat};

/// Anchor positions `c_1, ..., c_u, c_{u+1}` of a composition; `c_1 = 1` and
/// `c_{u+1} = k + 1`.
pub fn anchors(lambda: &[usize]) -> Vec<usize> {
    let mut c = vec![1usize];
    for &l in lambda {
        assert!(l >= 1, "composition parts must be positive");
        c.push(c.last().unwrap() + l);
    }
    c
}

/// All compositions of `k` in lexicographic order; `k = 0` yields the empty
/// composition.
pub fn compositions(k: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for first in 1..=rem {
            cur.push(first);
            rec(rem - first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, &mut Vec::new(), &mut out);
    out
}

fn lambda_label(lambda: &[usize]) -> String {
    let parts: Vec<String> = lambda.iter().map(|l| l.to_string()).collect();
    format!("({})", parts.join(","))
}

fn qbar_name(sign: Sign) -> &'static str {
    match sign {
        Sign::Plus => "qbar",
        Sign::Minus => "qbar_minus",
    }
}

/// The k-fold tensor power of the diagonal twist `diag(q^2, ..., q^{2n})`,
/// or of its inverse.
pub fn d_tensor(n: usize, k: usize, invert: bool) -> MatRat {
    let mut m = MatRat::zero(n, k);
    for idx in all_indices(n, k) {
        let mut e: i32 = idx.iter().map(|&i| 2 * i as i32).sum();
        if invert {
            e = -e;
        }
        m.set(idx.clone(), idx, Rat::qv(e, 0));
    }
    m
}

/// Iterated residue of `x` along the composition: group by group, take the
/// residue in z_{c_s + e} at z_{c_s} qbar^{2e} (e = 1, ..., lambda_s - 1),
/// normalized by dividing out the point monomial.  The surviving anchor
/// variables are relabeled z_{c_s} -> z_s, so the result depends on
/// z_1, ..., z_u only (its slot arity stays k).  Fails if some intermediate
/// function has a higher-order pole on a specialization hyperplane.
pub fn iterated_residue(x: &MatRat, lambda: &[usize], sign: Sign) -> Result<MatRat, RingError> {
    let k: usize = lambda.iter().sum();
    assert_eq!(x.k(), k, "composition must match the slot arity");
    let n = x.n();
    let c = anchors(lambda);
    let u = lambda.len();
    let mut cur = x.clone();
    for s in 0..u {
        for e in 1..lambda[s] {
            let mover = zslot(c[s] + e);
            let point = Mono::var(zslot(c[s]), 1).mul(&qbar_pow(n, sign, 2 * e as i32));
            let point_rat = Rat::signed_mono(1, point.clone());
            let mut next = MatRat::zero(n, k);
            for ((r, cc), v) in cur.iter() {
                let mut order = 0u32;
                for (fct, p) in v.den_factors() {
                    if fct.subst_var(mover, 1, &point).is_zero() {
                        order += p;
                    }
                }
                if order > 1 {
                    return Err(RingError::UnsupportedPole(format!(
                        "pole of order {} at z_{} = z_{} {}^{}",
                        order,
                        c[s] + e,
                        c[s],
                        qbar_name(sign),
                        2 * e
                    )));
                }
                let res = v.residue_classical(mover, 1, &point)?.div(&point_rat);
                if !res.is_zero() {
                    next.add_to(r.clone(), cc.clone(), &res);
                }
            }
            cur = next;
        }
    }
    let movers: Vec<usize> = c[..u].to_vec();
    Ok(cur.relabel_z(&move |i| match movers.iter().position(|&a| a == i) {
        Some(s) => s + 1,
        None => i,
    }))
}

/// One R-matrix factor of the wheel dressing, acting on ambient slots
/// `slot_a, slot_b` with spectral argument
/// `(y_{var_a} qbar^{shift_a}) / (y_{var_b} qbar^{shift_b})`.
struct RFac {
    slot_a: usize,
    slot_b: usize,
    var_a: usize,
    var_b: usize,
    shift_a: i32,
    shift_b: i32,
}

fn relabel_pair(m: &MatRat, s1: usize, v1: usize, s2: usize, v2: usize) -> MatRat {
    m.relabel_z(&move |i| {
        if i == s1 {
            v1
        } else if i == s2 {
            v2
        } else {
            i
        }
    })
}

fn r_fac_mat(n: usize, k: usize, fac: &RFac, sign: Sign, invert: bool) -> MatRat {
    let ca = qbar_pow(n, sign, fac.shift_a);
    let cb = qbar_pow(n, sign, fac.shift_b);
    if !invert {
        let base = r_scaled(n, &ca, &cb).embed(&[fac.slot_a, fac.slot_b], k);
        relabel_pair(&base, fac.slot_a, fac.var_a, fac.slot_b, fac.var_b)
    } else {
        // R_{ab}(x)^{-1} = R_{ba}(1/x) / f(x) by unitarity.
        let base = r_scaled(n, &cb, &ca).embed(&[fac.slot_b, fac.slot_a], k);
        let m = relabel_pair(&base, fac.slot_a, fac.var_a, fac.slot_b, fac.var_b);
        let ua = ca.mul(&Mono::var(zslot(fac.var_a), 1));
        let wb = cb.mul(&Mono::var(zslot(fac.var_b), 1));
        m.scale(&f_inv_rat(&ua, &wb))
    }
}

/// The M-bracket factors: product over u >= s >= 1, then s <= t <= u, then
/// 1 <= e < lambda_t, of R_{c_s, c_t + e}(y_s / (y_t qbar^{2e})).
fn m_factors(lambda: &[usize]) -> Vec<RFac> {
    let c = anchors(lambda);
    let u = lambda.len();
    let mut out = Vec::new();
    for s in (1..=u).rev() {
        for t in s..=u {
            for e in 1..lambda[t - 1] {
                out.push(RFac {
                    slot_a: c[s - 1],
                    slot_b: c[t - 1] + e,
                    var_a: s,
                    var_b: t,
                    shift_a: 0,
                    shift_b: 2 * e as i32,
                });
            }
        }
    }
    out
}

/// The N-bracket factors: product over 1 <= s <= u, then u >= t > s, then
/// lambda_t > e >= 1, of R_{c_t + e, c_s}(y_t qbar^{2e} / (y_s qbar^{2 lambda_s})).
fn n_factors(lambda: &[usize]) -> Vec<RFac> {
    let c = anchors(lambda);
    let u = lambda.len();
    let mut out = Vec::new();
    for s in 1..=u {
        for t in (s + 1..=u).rev() {
            for e in (1..lambda[t - 1]).rev() {
                out.push(RFac {
                    slot_a: c[t - 1] + e,
                    slot_b: c[s - 1],
                    var_a: t,
                    var_b: s,
                    shift_a: 2 * e as i32,
                    shift_b: 2 * lambda[s - 1] as i32,
                });
            }
        }
    }
    out
}

/// The scalar F: product of f((y_s qbar^{2d}) / (y_t qbar^{2e})) over
/// unordered pairs of distinct specialized positions (s, d) != (t, e) with
/// 1 <= d < lambda_s, 1 <= e < lambda_t.
fn f_scalar(n: usize, lambda: &[usize], sign: Sign) -> Rat {
    let mut positions = Vec::new();
    for (s, &l) in lambda.iter().enumerate() {
        for d in 1..l {
            positions.push((s + 1, d));
        }
    }
    let mut out = Rat::one();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let (s, d) = positions[i];
            let (t, e) = positions[j];
            let ua = Mono::var(zslot(s), 1).mul(&qbar_pow(n, sign, 2 * d as i32));
            let wb = Mono::var(zslot(t), 1).mul(&qbar_pow(n, sign, 2 * e as i32));
            out = out.mul(&f_rat(&ua, &wb));
        }
    }
    out
}

/// The permutation rotating each group one step: c_s -> c_s + 1 -> ... ->
/// c_{s+1} - 1 -> c_s, returned in one-line notation.
pub fn group_cycles(lambda: &[usize]) -> Vec<usize> {
    let c = anchors(lambda);
    let k = c.last().unwrap() - 1;
    let mut sigma = vec![0usize; k];
    for (s, &l) in lambda.iter().enumerate() {
        for r in 0..l {
            let from = c[s] + r;
            let to = if r + 1 < l { c[s] + r + 1 } else { c[s] };
            sigma[from - 1] = to;
        }
    }
    sigma
}

fn scalar_prefactor(n: usize, lambda: &[usize], sign: Sign) -> Rat {
    let k: usize = lambda.iter().sum();
    let u = lambda.len();
    let coeff = Rat::qv(-1, 0).sub(&Rat::qv(1, 0)).pow_i((k - u) as i32);
    coeff.mul(&f_scalar(n, lambda, sign))
}

/// Embed a u-slot tensor in y-variables at the anchor slots of the ambient
/// k-slot space, keeping its variables z_1, ..., z_u.
fn embed_at_anchors(xl: &MatRat, lambda: &[usize], k: usize) -> MatRat {
    let c = anchors(lambda);
    let u = lambda.len();
    let slots: Vec<usize> = c[..u].to_vec();
    let emb = xl.embed(&slots, k);
    let slots2 = slots.clone();
    emb.relabel_z(&move |i| match slots2.iter().position(|&a| a == i) {
        Some(s) => s + 1,
        None => i,
    })
}

/// The prescribed right-hand side of the wheel factorization, assembled from
/// a candidate reduced tensor `xl` on u slots with variables z_1, ..., z_u.
/// On the minus side this includes the leading twist D on every slot.
pub fn wheel_rhs(xl: &MatRat, lambda: &[usize], sign: Sign) -> MatRat {
    let u = lambda.len();
    assert_eq!(xl.k(), u, "reduced tensor must have one slot per group");
    let k: usize = lambda.iter().sum();
    let n = xl.n();
    let mut out = match sign {
        Sign::Plus => MatRat::identity(n, k),
        Sign::Minus => d_tensor(n, k, false),
    };
    out = out.scale(&scalar_prefactor(n, lambda, sign));
    for fac in m_factors(lambda) {
        out = out.compose(&r_fac_mat(n, k, &fac, sign, false));
    }
    out = out.compose(&embed_at_anchors(xl, lambda, k));
    for fac in n_factors(lambda) {
        out = out.compose(&r_fac_mat(n, k, &fac, sign, false));
    }
    out.compose(&permutation_op(n, &group_cycles(lambda)))
}

/// Read off a u-slot tensor from a k-slot one that is the anchor embedding
/// of some tensor: restrict the passive slots to the (1, ..., 1) block.
fn restrict_to_anchors(x: &MatRat, lambda: &[usize]) -> MatRat {
    let c = anchors(lambda);
    let u = lambda.len();
    let k = x.k();
    let n = x.n();
    let slots: Vec<usize> = c[..u].to_vec();
    let mut out = MatRat::zero(n, u);
    'entries: for ((r, cc), v) in x.iter() {
        for a in 1..=k {
            if !slots.contains(&a) && (r[a - 1] != 1 || cc[a - 1] != 1) {
                continue 'entries;
            }
        }
        let rr: Vec<u8> = slots.iter().map(|&a| r[a - 1]).collect();
        let ccc: Vec<u8> = slots.iter().map(|&a| cc[a - 1]).collect();
        out.add_to(rr, ccc, v);
    }
    out
}

/// Solve the wheel factorization for the reduced tensor: peel the scalar, M,
/// N and P dressings off the iterated residue, read the candidate off the
/// anchor block, and accept only if re-dressing the candidate reproduces the
/// residue exactly.  `Ok(None)` means the factorization does not exist.
pub fn wheel_extract(
    x: &MatRat,
    lambda: &[usize],
    sign: Sign,
) -> Result<Option<MatRat>, RingError> {
    let res = iterated_residue(x, lambda, sign)?;
    let k = x.k();
    let n = x.n();
    let mut work = res.clone();
    if sign == Sign::Minus {
        work = d_tensor(n, k, true).compose(&work);
    }
    work = work.scale(&scalar_prefactor(n, lambda, sign).recip());
    // M^{-1} (...) applies the factor inverses innermost-first.
    for fac in m_factors(lambda) {
        work = r_fac_mat(n, k, &fac, sign, true).compose(&work);
    }
    work = work.compose(&permutation_op(n, &perm_inverse(&group_cycles(lambda))));
    let nfacs = n_factors(lambda);
    for fac in nfacs.iter().rev() {
        work = work.compose(&r_fac_mat(n, k, fac, sign, true));
    }
    let candidate = restrict_to_anchors(&work, lambda);
    if wheel_rhs(&candidate, lambda, sign) == res {
        Ok(Some(candidate))
    } else {
        Ok(None)
    }
}

/// Diagnostic report of the membership test for the small algebra.
pub struct MembershipReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Pole-shape part of membership: every entry must become a Laurent
/// polynomial after clearing the product of z_i - z_j qbar^2 over ordered
/// pairs i != j.
fn pole_shape_ok(x: &MatRat, sign: Sign) -> bool {
    let n = x.n();
    let k = x.k();
    let mut clear = Rat::one();
    for i in 1..=k {
        for j in 1..=k {
            if i != j {
                let a = MPoly::var(zslot(i), 1);
                let b = MPoly::mono(Mono::var(zslot(j), 1).mul(&qbar_pow(n, sign, 2)));
                clear = clear.mul(&Rat::frac(a.sub(&b), MPoly::one()));
            }
        }
    }
    x.iter().all(|(_, v)| v.mul(&clear).den_factors().is_empty())
}

/// Full membership test: pole shape, symmetry, and the wheel factorization
/// for every composition of the slot arity.  Diagnostics name the first
/// failing condition of each kind.
pub fn is_in_a(x: &MatRat, sign: Sign) -> MembershipReport {
    let mut failures = Vec::new();
    if !pole_shape_ok(x, sign) {
        failures.push("an entry has a pole outside the allowed hyperplanes z_i = z_j qbar^2".into());
    }
    if !is_symmetric(x) {
        failures.push("the tensor is not symmetric under the braided slot exchange".into());
    }
    for lambda in compositions(x.k()) {
        match wheel_extract(x, &lambda, sign) {
            Ok(Some(_)) => {}
            Ok(None) => failures.push(format!(
                "composition {}: no reduced tensor reproduces the iterated residue",
                lambda_label(&lambda)
            )),
            Err(e) => failures.push(format!(
                "composition {}: residue not defined ({})",
                lambda_label(&lambda),
                e
            )),
        }
    }
    MembershipReport {
        ok: failures.is_empty(),
        failures,
    }
}

/// Check that the poles of a reduced tensor on u slots stay within the
/// allowed binomials y_s qbar^{2d} - y_t qbar^{-2} and
/// y_s qbar^{2d} - y_t qbar^{2 lambda_t} (1 <= s < t <= u, 0 <= d < lambda_s),
/// each at most simple.  Returns one message per offending factor.
pub fn extract_pole_report(y: &MatRat, lambda: &[usize], sign: Sign) -> Vec<String> {
    let n = y.n();
    let u = lambda.len();
    assert_eq!(y.k(), u);
    let mut allowed: Vec<MPoly> = Vec::new();
    for s in 1..=u {
        for t in s + 1..=u {
            for d in 0..lambda[s - 1] {
                let ys = Mono::var(zslot(s), 1).mul(&qbar_pow(n, sign, 2 * d as i32));
                for shift in [-2i32, 2 * lambda[t - 1] as i32] {
                    let yt = Mono::var(zslot(t), 1).mul(&qbar_pow(n, sign, shift));
                    let b = MPoly::mono(ys.clone()).sub(&MPoly::mono(yt));
                    // Canonicalize through the denominator normal form.
                    let canon = Rat::frac(MPoly::one(), b);
                    for (fct, _) in canon.den_factors() {
                        if !allowed.contains(fct) {
                            allowed.push(fct.clone());
                        }
                    }
                }
            }
        }
    }
    let mut report = Vec::new();
    for ((r, c), v) in y.iter() {
        for (fct, p) in v.den_factors() {
            let known = allowed.contains(fct);
            if !known || *p > 1 {
                report.push(format!(
                    "entry ({:?}, {:?}): denominator factor {} of multiplicity {} is {}",
                    r,
                    c,
                    fct,
                    p,
                    if known {
                        "allowed only as a simple pole"
                    } else {
                        "outside the allowed binomials"
                    }
                ));
            }
        }
    }
    report
}

/// Structural checks on the reduced tensors across all compositions: pole
/// discipline per `extract_pole_report`, and for adjacent equal parts
/// lambda_s = lambda_{s+1} the braided exchange symmetry in (y_s, y_{s+1}).
/// Returns one message per failed check; empty means all hold.
pub fn check_extract_properties(x: &MatRat, sign: Sign) -> Vec<String> {
    let n = x.n();
    let mut report = Vec::new();
    for lambda in compositions(x.k()) {
        let label = lambda_label(&lambda);
        let y = match wheel_extract(x, &lambda, sign) {
            Ok(Some(y)) => y,
            Ok(None) => {
                report.push(format!("composition {}: factorization failed", label));
                continue;
            }
            Err(e) => {
                report.push(format!("composition {}: residue not defined ({})", label, e));
                continue;
            }
        };
        for msg in extract_pole_report(&y, &lambda, sign) {
            report.push(format!("composition {}: {}", label, msg));
        }
        let u = lambda.len();
        for s in 1..u {
            if lambda[s - 1] != lambda[s] {
                continue;
            }
            let mut tau: Vec<usize> = (1..=u).collect();
            tau.swap(s - 1, s);
            let swapped = y.conjugate_by_permutation(&tau);
            let lhs = r_sigma(n, &tau)
                .compose(&swapped)
                .compose(&r_sigma_inv(n, &tau));
            if lhs != y {
                report.push(format!(
                    "composition {}: exchange symmetry fails between groups {} and {}",
                    label,
                    s,
                    s + 1
                ));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::MatRat;

    #[test]
    fn compositions_are_complete_and_lexicographic() {
        let c4 = compositions(4);
        assert_eq!(c4.len(), 8);
        assert_eq!(c4[0], vec![1, 1, 1, 1]);
        assert_eq!(c4[7], vec![4]);
        let mut sorted = c4.clone();
        sorted.sort();
        assert_eq!(c4, sorted);
        assert_eq!(compositions(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn anchors_partition_the_slots() {
        assert_eq!(anchors(&[2, 1, 3]), vec![1, 3, 4, 7]);
        assert_eq!(anchors(&[]), vec![1]);
    }

    #[test]
    fn group_cycles_rotate_each_block() {
        assert_eq!(group_cycles(&[3]), vec![2, 3, 1]);
        assert_eq!(group_cycles(&[2, 2]), vec![2, 1, 4, 3]);
        assert_eq!(group_cycles(&[1, 1]), vec![1, 2]);
    }

    #[test]
    fn d_tensor_inverts() {
        let n = 2;
        let prod = d_tensor(n, 2, false).compose(&d_tensor(n, 2, true));
        assert_eq!(prod, MatRat::identity(n, 2));
    }

    #[test]
    fn trivial_composition_extracts_the_tensor_itself() {
        let n = 2;
        let x = MatRat::unit(n, 1, 1).tensor_product(&MatRat::unit(n, 2, 2));
        let y = wheel_extract(&x, &[1, 1], Sign::Plus).unwrap().unwrap();
        assert_eq!(y, x);
    }
}
