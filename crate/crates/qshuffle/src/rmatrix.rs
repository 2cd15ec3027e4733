//! The quantum affine gl_n R-matrix with spectral parameter, its braided
//! variants, and the braid-group products built out of them.
//!
//! Everything is expressed on two tensor slots carrying spectral variables
//! `z_1, z_2`; the argument of every matrix is the ratio of the two, up to an
//! optional q,v-monomial scale per side.  Embedding into a larger slot count
//! relabels the variables.

use crate::ring::{MPoly, Mono, Rat};
use crate::tensor::MatRat;

/// Which of the two shuffle algebras a construction belongs to.  The minus
/// side replaces the loop parameter by its reciprocal-twisted partner and
/// conjugates the braiding by a diagonal twist.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn other(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_int(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// The monomial `qbar_sign^{a/n}`: fractional powers of the loop parameter
/// are honest monomials in `v` (plus side: `qbar^{1/n} = v`) and in `q^{-1}
/// v^{-1}` (minus side: `qbar_-= q^{-n} qbar^{-1}`).
pub fn qbar_frac_pow(sign: Sign, a: i32) -> Mono {
    match sign {
        Sign::Plus => Mono::qv(0, a),
        Sign::Minus => Mono::qv(-a, -a),
    }
}

/// The monomial `qbar_sign^e` (integer power; needs the rank to express
/// `qbar = v^n`).
pub fn qbar_pow(n: usize, sign: Sign, e: i32) -> Mono {
    qbar_frac_pow(sign, e * n as i32)
}

/// `f(x) = (1 - x q^2)(1 - x q^{-2})/(1 - x)^2` evaluated at `x = u/w`;
/// symmetric under `x -> 1/x`.
pub fn f_rat(u: &Mono, w: &Mono) -> Rat {
    let up = MPoly::mono(u.clone());
    let wp = MPoly::mono(w.clone());
    let num = wp
        .sub(&up.mul_mono(&Mono::qv(2, 0)))
        .mul(&wp.sub(&up.mul_mono(&Mono::qv(-2, 0))));
    let den = wp.sub(&up);
    Rat::with_den_factors(num, vec![den.clone(), den])
}

/// `1/f(u/w)` built directly with the two linear numerator pieces as
/// denominator factors, keeping pole shapes transparent.
pub fn f_inv_rat(u: &Mono, w: &Mono) -> Rat {
    let up = MPoly::mono(u.clone());
    let wp = MPoly::mono(w.clone());
    let num = wp.sub(&up).pow(2);
    let d1 = wp.sub(&up.mul_mono(&Mono::qv(2, 0)));
    let d2 = wp.sub(&up.mul_mono(&Mono::qv(-2, 0)));
    Rat::with_den_factors(num, vec![d1, d2])
}

/// R-matrix `R((ca z_1)/(cb z_2))` on two slots, where `ca, cb` are
/// q,v-monomials.  With `x` the scaled ratio:
/// diagonal `E_ii (x) E_ii` entries `(q - x q^{-1})/(1 - x)`, mixed diagonal
/// `E_ii (x) E_jj` entries 1, and exchange terms
/// `(q - q^{-1}) x^{[i<j]}/(1 - x)` on `E_ij (x) E_ji`.
pub fn r_scaled(n: usize, ca: &Mono, cb: &Mono) -> MatRat {
    let u = MPoly::mono(ca.mul(&Mono::var(crate::ring::zslot(1), 1)));
    let w = MPoly::mono(cb.mul(&Mono::var(crate::ring::zslot(2), 1)));
    let den = w.sub(&u);
    let mut m = MatRat::zero(n, 2);
    let qq = Mono::qv(1, 0);
    let qinv = Mono::qv(-1, 0);
    for i in 1..=n as u8 {
        for j in 1..=n as u8 {
            if i == j {
                // (q w - q^{-1} u)/(w - u)
                let num = w.mul_mono(&qq).sub(&u.mul_mono(&qinv));
                m.set(vec![i, i], vec![i, i], Rat::with_den_factors(num, vec![den.clone()]));
            } else {
                m.set(vec![i, j], vec![i, j], Rat::one());
                // (q - q^{-1}) x^{[i<j]}/(1-x) = (q - q^{-1}) u^{[i<j]} w^{[i>j]} / (w - u)
                let num = if i < j { u.clone() } else { w.clone() };
                let num = num.mul_mono(&qq).sub(&num.mul_mono(&qinv));
                m.set(vec![i, j], vec![j, i], Rat::with_den_factors(num, vec![den.clone()]));
            }
        }
    }
    m
}

pub fn r_mat(n: usize) -> MatRat {
    r_scaled(n, &Mono::one(), &Mono::one())
}

/// Braided R-matrix `Rtilde^{sign}((ca z_1)/(cb z_2))`.  On the plus side
/// `Rtilde(x) = R_21(1/(x qbar^2))`; the minus side conjugates the exchange
/// part by the diagonal twist `q^{2i}` and replaces the loop parameter.
/// With `X = x qbar_sign^2`:
/// diagonal `(q^{-1} - q X)/(1 - X)`, mixed diagonal 1, exchange
/// `-(q - q^{-1}) t_{ij} X^{[i<j]}/(1 - X)` where `t_{ij} = q^{2(j-i)}` on
/// the minus side and 1 on the plus side.
pub fn r_tilde_scaled(n: usize, sign: Sign, ca: &Mono, cb: &Mono) -> MatRat {
    let qbar2 = qbar_pow(n, sign, 2);
    let u = MPoly::mono(ca.mul(&qbar2).mul(&Mono::var(crate::ring::zslot(1), 1)));
    let w = MPoly::mono(cb.mul(&Mono::var(crate::ring::zslot(2), 1)));
    let den = w.sub(&u);
    let mut m = MatRat::zero(n, 2);
    let qq = Mono::qv(1, 0);
    let qinv = Mono::qv(-1, 0);
    for i in 1..=n as u8 {
        for j in 1..=n as u8 {
            if i == j {
                // (q^{-1} w - q u)/(w - u)
                let num = w.mul_mono(&qinv).sub(&u.mul_mono(&qq));
                m.set(vec![i, i], vec![i, i], Rat::with_den_factors(num, vec![den.clone()]));
            } else {
                m.set(vec![i, j], vec![i, j], Rat::one());
                let twist = match sign {
                    Sign::Plus => Mono::one(),
                    Sign::Minus => Mono::qv(2 * (j as i32 - i as i32), 0),
                };
                let num = if i < j { u.clone() } else { w.clone() };
                let num = num.mul_mono(&qinv).sub(&num.mul_mono(&qq));
                m.set(
                    vec![i, j],
                    vec![j, i],
                    Rat::with_den_factors(num.mul_mono(&twist), vec![den.clone()]),
                );
            }
        }
    }
    m
}

pub fn r_tilde(n: usize, sign: Sign) -> MatRat {
    r_tilde_scaled(n, sign, &Mono::one(), &Mono::one())
}

/// The half R-matrices.  With `X = x qbar_sign^2`:
/// `Q(x) = q^{-1} sum_{i,j} X^{[i<j]}/(1-X) E_ij (x) E_ji` and
/// `Qbar(x) = -q sum_{i,j} X^{[i<=j]}/(1-X) E_ij (x) E_ji`; the minus-side
/// versions carry the same diagonal twist as the braided R-matrix.
pub fn q_half_scaled(n: usize, sign: Sign, bar: bool, ca: &Mono, cb: &Mono) -> MatRat {
    let qbar2 = qbar_pow(n, sign, 2);
    let u = MPoly::mono(ca.mul(&qbar2).mul(&Mono::var(crate::ring::zslot(1), 1)));
    let w = MPoly::mono(cb.mul(&Mono::var(crate::ring::zslot(2), 1)));
    let den = w.sub(&u);
    let mut m = MatRat::zero(n, 2);
    for i in 1..=n as u8 {
        for j in 1..=n as u8 {
            let upper = if bar { i <= j } else { i < j };
            let num = if upper { u.clone() } else { w.clone() };
            let pre = if bar { Mono::qv(1, 0) } else { Mono::qv(-1, 0) };
            let twist = match sign {
                Sign::Plus => Mono::one(),
                Sign::Minus => Mono::qv(2 * (j as i32 - i as i32), 0),
            };
            let mut val = Rat::with_den_factors(
                num.mul_mono(&pre).mul_mono(&twist),
                vec![den.clone()],
            );
            if bar {
                val = val.neg();
            }
            m.add_to(vec![i, j], vec![j, i], &val);
        }
    }
    m
}

pub fn q_half(n: usize, sign: Sign, bar: bool) -> MatRat {
    q_half_scaled(n, sign, bar, &Mono::one(), &Mono::one())
}

/// Diagonal twist `D = diag(q^2, q^4, ..., q^{2n})` as a one-slot operator.
pub fn d_mat(n: usize) -> MatRat {
    let diag: Vec<Rat> = (1..=n as i32).map(|i| Rat::qv(2 * i, 0)).collect();
    crate::tensor::diagonal(n, &diag)
}

/// Permutation operator `P_sigma` (constant coefficients): sends the basis
/// vector with column multi-index `j` to the one with `j` pulled back along
/// `sigma^{-1}`, so that conjugating an operator by it permutes slots.
pub fn permutation_op(n: usize, sigma: &[usize]) -> MatRat {
    let k = sigma.len();
    let mut inv = vec![0usize; k];
    for (a, &s) in sigma.iter().enumerate() {
        inv[s - 1] = a + 1;
    }
    let mut m = MatRat::zero(n, k);
    for col in crate::tensor::all_indices(n, k) {
        let row: Vec<u8> = (0..k).map(|u| col[inv[u] - 1]).collect();
        m.set(row, col, Rat::one());
    }
    m
}

/// Lexicographically smallest reduced word for a permutation given as a
/// 1-based image list: repeatedly pick the smallest `i` whose fiber is out
/// of order and peel `s_i` off the left.
pub fn reduced_word(sigma: &[usize]) -> Vec<usize> {
    let k = sigma.len();
    let mut cur: Vec<usize> = sigma.to_vec();
    let mut word = Vec::new();
    loop {
        let mut inv = vec![0usize; k];
        for (a, &s) in cur.iter().enumerate() {
            inv[s - 1] = a + 1;
        }
        let mut found = None;
        for i in 1..k {
            if inv[i - 1] > inv[i] {
                found = Some(i);
                break;
            }
        }
        match found {
            None => return word,
            Some(i) => {
                word.push(i);
                // cur = s_i . cur (swap the values i and i+1)
                for s in cur.iter_mut() {
                    if *s == i {
                        *s = i + 1;
                    } else if *s == i + 1 {
                        *s = i;
                    }
                }
            }
        }
    }
}

/// List the (i, j) pairs with i < j inverted by the permutation (values that
/// appear out of order).
pub fn inversions(sigma: &[usize]) -> Vec<(usize, usize)> {
    let k = sigma.len();
    let mut inv = vec![0usize; k];
    for (a, &s) in sigma.iter().enumerate() {
        inv[s - 1] = a + 1;
    }
    let mut out = Vec::new();
    for i in 1..=k {
        for j in (i + 1)..=k {
            if inv[i - 1] > inv[j - 1] {
                out.push((i, j));
            }
        }
    }
    out
}

enum BraidFlavor {
    Plain,    // R_{ij}(z_i/z_j) over the crossings of sigma
    Reversed, // sigma R_{sigma^{-1}} sigma^{-1}
    Inverse,  // R_{ij}(z_i/z_j)^{-1} = R_{ji}(z_j/z_i)/f(z_i/z_j)
}

/// Slot pairs crossed by the positive braid lifting `sigma`, in word order:
/// the t-th letter `a` of the reduced word crosses the values currently at
/// positions `a`, `a + 1`.
fn pair_sequence(sigma: &[usize]) -> Vec<(usize, usize)> {
    let word = reduced_word(sigma);
    let mut cur: Vec<usize> = (1..=sigma.len()).collect();
    let mut pairs = Vec::with_capacity(word.len());
    for &a in &word {
        pairs.push((cur[a - 1], cur[a]));
        cur.swap(a - 1, a);
    }
    pairs
}

fn r_sigma_generic(n: usize, sigma: &[usize], flavor: BraidFlavor) -> MatRat {
    let k = sigma.len();
    let base = r_mat(n);
    let mut out = MatRat::identity(n, k);
    match flavor {
        BraidFlavor::Plain => {
            for (i, j) in pair_sequence(sigma) {
                out = out.compose(&base.embed(&[i, j], k));
            }
        }
        BraidFlavor::Reversed => {
            // Conjugating a crossing at (i, j) by sigma moves it to
            // (sigma(i), sigma(j)); taking the crossings of sigma^{-1}
            // transposes every inverted pair, as the bar product requires.
            for (i, j) in pair_sequence(&perm_inverse(sigma)) {
                out = out.compose(&base.embed(&[sigma[i - 1], sigma[j - 1]], k));
            }
        }
        BraidFlavor::Inverse => {
            for &(i, j) in pair_sequence(sigma).iter().rev() {
                let scale = f_inv_rat(
                    &Mono::var(crate::ring::zslot(i), 1),
                    &Mono::var(crate::ring::zslot(j), 1),
                );
                out = out.compose(&base.embed(&[j, i], k).scale(&scale));
            }
        }
    }
    out
}

/// Braid operator `R_sigma`: product over a reduced word
/// `sigma = s_{a_1} ... s_{a_l}` of crossings at the partially permuted
/// labels, leftmost letter first.
pub fn r_sigma(n: usize, sigma: &[usize]) -> MatRat {
    r_sigma_generic(n, sigma, BraidFlavor::Plain)
}

/// The opposite-crossing companion of `R_sigma`, equal to the conjugate
/// `sigma R_{sigma^{-1}} sigma^{-1}`: the same inverted pairs, each crossed
/// the other way.
pub fn r_sigma_bar(n: usize, sigma: &[usize]) -> MatRat {
    r_sigma_generic(n, sigma, BraidFlavor::Reversed)
}

/// Exact inverse of `R_sigma`, using unitarity
/// `R_{12}(x)^{-1} = R_{21}(1/x)/f(x)` factor by factor.
pub fn r_sigma_inv(n: usize, sigma: &[usize]) -> MatRat {
    r_sigma_generic(n, sigma, BraidFlavor::Inverse)
}

/// `R_{omega_k}` for the longest element: the lexicographic product
/// `prod_{i<j} R_{ij}(z_i/z_j)` (i outermost ascending, then j ascending).
pub fn r_omega(n: usize, k: usize) -> MatRat {
    let mut out = MatRat::identity(n, k);
    let base = r_mat(n);
    for i in 1..=k {
        for j in (i + 1)..=k {
            out = out.compose(&base.embed(&[i, j], k));
        }
    }
    out
}

/// The longest element of S_k as an image list.
pub fn longest_element(k: usize) -> Vec<usize> {
    (1..=k).rev().collect()
}

/// Compose image lists: `(a . b)(x) = a(b(x))` (b applied first).
pub fn perm_compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x - 1]).collect()
}

pub fn perm_inverse(a: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x - 1] = i + 1;
    }
    inv
}

/// All permutations of {1..k} as image lists, in lexicographic order.
pub fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (1..=k).permutations(k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_word_of_longest_element() {
        assert_eq!(reduced_word(&[3, 2, 1]), vec![1, 2, 1]);
        assert_eq!(reduced_word(&[1, 2, 3]), Vec::<usize>::new());
        assert_eq!(reduced_word(&[2, 1]), vec![1]);
    }

    #[test]
    fn r_omega_matches_braid_construction() {
        for k in 2..=3 {
            let omega = longest_element(k);
            assert_eq!(r_sigma(2, &omega), r_omega(2, k));
        }
    }

    #[test]
    fn r_sigma_inverse_is_inverse() {
        let sigma = vec![3, 1, 2];
        let a = r_sigma(2, &sigma);
        let b = r_sigma_inv(2, &sigma);
        assert_eq!(a.compose(&b), MatRat::identity(2, 3));
        assert_eq!(b.compose(&a), MatRat::identity(2, 3));
    }

    #[test]
    fn permutation_op_conjugation_permutes_slots() {
        // P_sigma (A (x) B) P_sigma^{-1} with sigma = (12) must be B (x) A
        // without touching spectral labels.
        let n = 2;
        let a = MatRat::unit(n, 1, 2).embed(&[1], 2);
        let b = MatRat::unit(n, 2, 1).embed(&[2], 2);
        let ab = a.compose(&b);
        let p = permutation_op(n, &[2, 1]);
        let conj = p.compose(&ab).compose(&permutation_op(n, &[2, 1]));
        let ba = MatRat::unit(n, 2, 1).embed(&[1], 2).compose(&MatRat::unit(n, 1, 2).embed(&[2], 2));
        assert_eq!(conj, ba);
    }
}
