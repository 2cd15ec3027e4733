//! The shuffle product on matrix-valued rational functions.
//!
//! Elements of arity `k` are `End(V^{otimes k})`-valued rational functions in
//! the spectral variables `z_1, ..., z_k`.  The product of an arity-`k` and an
//! arity-`l` element sums over the ways to split `{1, ..., k+l}` into an
//! ascending `k`-tuple and an ascending `l`-tuple, dressing the two factors
//! with R-matrix crossings.  Conjugation-symmetric tensors with prescribed
//! poles form a subalgebra, singled out by [`is_symmetric`] and produced by
//! [`symmetrize`].

use crate::rmatrix::{
    all_permutations, longest_element, perm_compose, r_mat, r_sigma, r_sigma_bar, r_sigma_inv,
    r_tilde, Sign,
};
use crate::tensor::MatRat;
use itertools::Itertools;

/// Shuffle product of `a` (arity `k`) and `b` (arity `l`), with the sign
/// selecting which deformation parameter enters the inner crossings.
///
/// For each ascending split `{1,...,k+l} = {a_1 < ... < a_k} u {b_1 < ... <
/// b_l}` the summand is
///
/// ```text
///   [ prod_{i=k..1} prod_{j=1..l} R_{a_i b_j}(z_{a_i}/z_{b_j})  if a_i < b_j ]
///   A_{a_1...a_k}
///   [ prod_{i=1..k} prod_{j=l..1} Rt_{a_i b_j}(z_{a_i}/z_{b_j}) ]
///   B_{b_1...b_l}
///   [ prod_{i=k..1} prod_{j=1..l} R_{a_i b_j}(z_{a_i}/z_{b_j})  if a_i > b_j ]
/// ```
///
/// where the outer index runs first (leftmost factor listed first) and the
/// filters keep only the stated pairs.  Arity-0 operands act as scalars, so
/// the empty tensor `1` is a two-sided unit.
pub fn shuffle_product(a: &MatRat, b: &MatRat, sign: Sign) -> MatRat {
    assert_eq!(a.n(), b.n(), "operands must share the rank n");
    let n = a.n();
    let k = a.k();
    let l = b.k();
    let total = k + l;
    let r = r_mat(n);
    let rt = r_tilde(n, sign);
    let mut out = MatRat::zero(n, total);
    for asel in (1..=total).combinations(k) {
        let bsel: Vec<usize> = (1..=total).filter(|s| !asel.contains(s)).collect();
        let mut term = MatRat::identity(n, total);
        for i in (0..k).rev() {
            for j in 0..l {
                if asel[i] < bsel[j] {
                    term = term.compose(&r.embed(&[asel[i], bsel[j]], total));
                }
            }
        }
        term = term.compose(&a.embed(&asel, total));
        for i in 0..k {
            for j in (0..l).rev() {
                term = term.compose(&rt.embed(&[asel[i], bsel[j]], total));
            }
        }
        term = term.compose(&b.embed(&bsel, total));
        for i in (0..k).rev() {
            for j in 0..l {
                if asel[i] > bsel[j] {
                    term = term.compose(&r.embed(&[asel[i], bsel[j]], total));
                }
            }
        }
        out = out.add(&term);
    }
    out
}

/// Symmetrization `Sym X = sum_{sigma} R_sigma (sigma X sigma^{-1})
/// R_sigma^{-1}` over the whole symmetric group, with the braid lifts of
/// [`r_sigma`].
pub fn symmetrize(x: &MatRat) -> MatRat {
    let n = x.n();
    let k = x.k();
    let mut out = MatRat::zero(n, k);
    for sigma in all_permutations(k) {
        let term = r_sigma(n, &sigma)
            .compose(&x.conjugate_by_permutation(&sigma))
            .compose(&r_sigma_inv(n, &sigma));
        out = out.add(&term);
    }
    out
}

/// Whether `X = R_sigma (sigma X sigma^{-1}) R_sigma^{-1}` for every
/// permutation.  Checking the adjacent transpositions suffices: they generate
/// the group, and the braid lift of a product of transpositions conjugates by
/// the product of the individual lifts.
pub fn is_symmetric(x: &MatRat) -> bool {
    let n = x.n();
    let k = x.k();
    for a in 1..k {
        let mut sigma: Vec<usize> = (1..=k).collect();
        sigma.swap(a - 1, a);
        let rhs = r_sigma(n, &sigma)
            .compose(&x.conjugate_by_permutation(&sigma))
            .compose(&r_sigma_inv(n, &sigma));
        if *x != rhs {
            return false;
        }
    }
    true
}

/// Product `I_1 * ... * I_k` of single-slot Laurent-polynomial matrices in
/// closed form:
///
/// ```text
///   sum_{sigma} R_{sigma omega_k}
///     prod_{a=1..k} [ I_a at slot sigma(a)
///                     prod_{b=a+1..k} Rt_{sigma(a) sigma(b)}(z_{sigma(a)}/z_{sigma(b)}) ]
///     Rbar_sigma
/// ```
///
/// This equals the iterated [`shuffle_product`] and avoids nesting the
/// shuffle sums.
pub fn elementary_product(items: &[MatRat], sign: Sign) -> MatRat {
    assert!(!items.is_empty());
    let n = items[0].n();
    let k = items.len();
    for it in items {
        assert_eq!(it.n(), n, "operands must share the rank n");
        assert_eq!(it.k(), 1, "operands must be single-slot matrices");
    }
    let omega = longest_element(k);
    let rt = r_tilde(n, sign);
    let mut out = MatRat::zero(n, k);
    for sigma in all_permutations(k) {
        let mut term = r_sigma(n, &perm_compose(&sigma, &omega));
        for a in 1..=k {
            term = term.compose(&items[a - 1].embed(&[sigma[a - 1]], k));
            for b in (a + 1)..=k {
                term = term.compose(&rt.embed(&[sigma[a - 1], sigma[b - 1]], k));
            }
        }
        term = term.compose(&r_sigma_bar(n, &sigma));
        out = out.add(&term);
    }
    out
}

/// A tensor together with its sign and grading: `hdeg` counts the spectral
/// weight on each residue class (entries of `End(V^{otimes k})` contribute
/// their matrix-unit degrees, z-monomials their exponents), `vdeg` is the
/// arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedTensor {
    pub sign: Sign,
    pub mat: MatRat,
    pub hdeg: Vec<i64>,
    pub vdeg: usize,
}

impl GradedTensor {
    /// Wrap a horizontally homogeneous tensor; `None` when the entries do not
    /// share a degree.
    pub fn new(sign: Sign, mat: MatRat) -> Option<GradedTensor> {
        let hdeg = mat.horizontal_degree()?;
        let vdeg = mat.vertical_degree();
        Some(GradedTensor {
            sign,
            mat,
            hdeg,
            vdeg,
        })
    }
}

/// A formal sum of homogeneous symmetric tensors of one sign, the stored form
/// of a shuffle-algebra element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleElement {
    pub sign: Sign,
    pub terms: Vec<GradedTensor>,
}

impl ShuffleElement {
    /// Collect homogeneous tensors into an element, rejecting any that fail
    /// the symmetry requirement or are not homogeneous.
    pub fn new(sign: Sign, mats: Vec<MatRat>) -> Option<ShuffleElement> {
        let mut terms = Vec::with_capacity(mats.len());
        for m in mats {
            if !is_symmetric(&m) {
                return None;
            }
            terms.push(GradedTensor::new(sign, m)?);
        }
        Some(ShuffleElement { sign, terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::MatRat;

    #[test]
    fn empty_tensor_is_a_unit() {
        let unit = MatRat::identity(2, 0);
        let x = MatRat::unit(2, 1, 2);
        for sign in [Sign::Plus, Sign::Minus] {
            assert_eq!(shuffle_product(&x, &unit, sign), x);
            assert_eq!(shuffle_product(&unit, &x, sign), x);
        }
    }

    #[test]
    fn two_slot_product_expands_to_both_splits() {
        let n = 2;
        let a = MatRat::unit(n, 1, 1);
        let b = MatRat::unit(n, 1, 1);
        for sign in [Sign::Plus, Sign::Minus] {
            let r = r_mat(n);
            let rt = r_tilde(n, sign);
            let split12 = r
                .compose(&a.embed(&[1], 2))
                .compose(&rt)
                .compose(&b.embed(&[2], 2));
            let split21 = a
                .embed(&[2], 2)
                .compose(&rt.embed(&[2, 1], 2))
                .compose(&b.embed(&[1], 2))
                .compose(&r.embed(&[2, 1], 2));
            assert_eq!(shuffle_product(&a, &b, sign), split12.add(&split21));
        }
    }

    #[test]
    fn symmetrize_fixes_one_slot() {
        let x = MatRat::unit(3, 2, 3);
        assert_eq!(symmetrize(&x), x);
        assert!(is_symmetric(&x));
    }

    #[test]
    fn bare_tensor_is_not_symmetric() {
        let x = MatRat::unit(2, 1, 2).tensor_product(&MatRat::unit(2, 2, 1));
        assert!(!is_symmetric(&x));
        assert!(is_symmetric(&MatRat::identity(2, 2)));
    }
}
