//! Slope generators and the leading-order coproduct.
//!
//! For a slope `mu = (j-i)/k` the distinguished elements `F_{[i;j)}` and
//! `Fbar_{[i;j)}` are built as symmetrized braid words: a full crossing
//! `R_omega` followed, for each slot `a`, by the partial crossings
//! `Rt_{1a} ... Rt_{a-2,a}`, a half crossing `Q_{a-1,a}` (or `Qbar`), the
//! matrix unit `E_{s_{a-1} s_a}` and a fractional `qbar` power.  The integer
//! chain `s_a = j - ceil(mu a)` (resp. `s'_a = j - floor(mu a)`) descends
//! from `j` to `i`.  Matrix units with out-of-window subscripts carry the
//! spectral power dictated by their window, so the same formulas cover all
//! classes of `(i,j)` modulo `(n,n)`.
//!
//! The linear functional `alpha_{[i;j)}` reads off the coefficient of the
//! matrix unit `E_{ji}` in the one-variable factor `X^{(k)}(y)` produced by
//! the full-chain residue of `X`, normalized by an explicit power of
//! `(1-q^2)` and `qbar^{1/n}`.  On the minus side the same recipe applies
//! with `qbar_-`, with the full chain taken at `qbar_-`-shifted points, and
//! with the exponent shifted by `2(ibar - jbar)`; this is the unique
//! normalization compatible with the diagonal-twist isomorphism between the
//! two signs, under which `alpha_- o Phi = conj o alpha_+` where `conj` is
//! the field automorphism swapping `qbar_+` and `qbar_-`.
//!
//! The leading-order coproduct `Delta_mu` is computed split by split: at a
//! split `l` the element is divided by all `f(z_u/z_v)` with `u <= l < v`
//! and expanded in the regime where the first `l` variables are small.  Each
//! surviving monomial separates into a left factor (small slots), a `psi`
//! monomial recording the colour flow of the large slots, and a right factor
//! (large slots).  Only the component whose right factor has slope exactly
//! `mu` is kept; membership in the slope-`<= mu` filtration is the statement
//! that no component lies below it.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use crate::ring::{zslot, MPoly, Mono, Rat};
use crate::rmatrix::{
    f_inv_rat, q_half, qbar_frac_pow, r_omega, r_tilde, Sign,
};
use crate::shuffle::symmetrize;
use crate::tensor::MatRat;
use crate::wheel::{d_tensor, wheel_extract};

// ---------------------------------------------------------------------------
// Residue classes, windows and extended matrix units.
// ---------------------------------------------------------------------------

/// Representative of `i` in `{1, ..., n}`.
pub fn bar(n: usize, i: i64) -> u8 {
    let n = n as i64;
    (i - n * (i - 1).div_euclid(n)) as u8
}

/// The window `floor((i-1)/n)` an integer subscript lives in.
pub fn window(n: usize, i: i64) -> i64 {
    (i - 1).div_euclid(n as i64)
}

fn div_floor(p: i64, q: i64) -> i64 {
    debug_assert!(q > 0);
    p.div_euclid(q)
}

fn div_ceil(p: i64, q: i64) -> i64 {
    debug_assert!(q > 0);
    -((-p).div_euclid(q))
}

/// Matrix unit with integer subscripts: `E_{ij} = E_{ibar jbar} z^w` on one
/// slot, where `w` is the difference of the windows of `i` and `j`.
pub fn e_ext(n: usize, i: i64, j: i64) -> MatRat {
    let w = window(n, i) - window(n, j);
    let mono = Mono::var(zslot(1), w as i32);
    MatRat::unit(n, bar(n, i), bar(n, j)).scale(&Rat::signed_mono(1, mono))
}

/// Reduce a slope fraction to lowest terms with positive denominator.
pub fn reduce_slope(mu: (i64, i64)) -> (i64, i64) {
    let (mut a, mut b) = mu;
    assert!(b != 0, "slope denominator must be nonzero");
    if b < 0 {
        a = -a;
        b = -b;
    }
    let g = gcd(a.unsigned_abs(), b.unsigned_abs()).max(1);
    (a / g as i64, b / g as i64)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// ---------------------------------------------------------------------------
// The slope generators F and Fbar.
// ---------------------------------------------------------------------------

type GenKey = (usize, i8, bool, i64, i64, usize);

fn gen_cache() -> &'static Mutex<BTreeMap<GenKey, MatRat>> {
    static CACHE: OnceLock<Mutex<BTreeMap<GenKey, MatRat>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// The chain `s_a = j - ceil(mu a)` (`bar = false`) or
/// `s'_a = j - floor(mu a)` (`bar = true`) for `a = 0, ..., k`, with
/// `mu = (j-i)/k`.
fn chain(i: i64, j: i64, k: usize, bar_chain: bool) -> Vec<i64> {
    let k_i = k as i64;
    (0..=k_i)
        .map(|a| {
            let p = (j - i) * a;
            if bar_chain {
                j - div_floor(p, k_i)
            } else {
                j - div_ceil(p, k_i)
            }
        })
        .collect()
}

fn build_generator(n: usize, sign: Sign, barred: bool, i: i64, j: i64, k: usize) -> MatRat {
    assert!(k >= 1, "generator arity must be positive");
    assert!(j >= i, "interval must be weakly increasing");
    let s = chain(i, j, k, barred);
    let mut word = r_omega(n, k);
    for a in 1..=k {
        for b in 1..=a.saturating_sub(2) {
            word = word.compose(&r_tilde(n, sign).embed(&[b, a], k));
        }
        if a >= 2 {
            word = word.compose(&q_half(n, sign, barred).embed(&[a - 1, a], k));
        }
        let (sub_prev, sub_cur) = (s[a - 1], s[a]);
        word = word.compose(&e_ext(n, sub_prev, sub_cur).embed(&[a], k));
        // The plus-side scalar tracks the current subscript, the minus side
        // the previous one with the opposite exponent; the latter is an
        // unbarred qbar power in both cases.
        let expo = match sign {
            Sign::Plus => 2 * bar(n, sub_cur) as i32,
            Sign::Minus => -2 * (bar(n, sub_prev) as i32),
        };
        word = word.scale(&Rat::signed_mono(1, qbar_frac_pow(Sign::Plus, expo)));
    }
    let mut out = symmetrize(&word);
    if barred {
        let parity: i8 = if k % 2 == 0 { 1 } else { -1 };
        let pre = match sign {
            Sign::Plus => Rat::signed_mono(parity, Mono::qv(-2 * k as i32, -2 * k as i32)),
            Sign::Minus => Rat::signed_mono(parity, Mono::qv(0, 2 * k as i32)),
        };
        out = out.scale(&pre);
    }
    out
}

fn generator(n: usize, sign: Sign, barred: bool, i: i64, j: i64, k: usize) -> MatRat {
    // Shift both subscripts into the fundamental window of i; the element
    // only depends on (i,j) modulo (n,n).
    let shift = window(n, i) * n as i64;
    let key = (n, sign.as_int() as i8, barred, i - shift, j - shift, k);
    if let Some(hit) = gen_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let built = build_generator(n, sign, barred, key.3, key.4, k);
    gen_cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert(built)
        .clone()
}

/// The generator `F^{(k)}_{[i;j)}` (plus sign) or `F^{(-k)}_{[i;j)}` (minus
/// sign).
pub fn f_gen(n: usize, sign: Sign, i: i64, j: i64, k: usize) -> MatRat {
    generator(n, sign, false, i, j, k)
}

/// The barred generator `Fbar^{(+-k)}_{[i;j)}`.
pub fn fbar_gen(n: usize, sign: Sign, i: i64, j: i64, k: usize) -> MatRat {
    generator(n, sign, true, i, j, k)
}

/// `F` at a prescribed slope: zero when `(j-i)/mu` is not a natural number.
/// The zero element is returned with arity 0 so callers must check.
pub fn f_gen_slope(n: usize, sign: Sign, i: i64, j: i64, mu: (i64, i64)) -> Option<MatRat> {
    arity_at_slope(i, j, mu).map(|k| f_gen(n, sign, i, j, k))
}

/// `Fbar` at a prescribed slope, when the arity is integral.
pub fn fbar_gen_slope(n: usize, sign: Sign, i: i64, j: i64, mu: (i64, i64)) -> Option<MatRat> {
    arity_at_slope(i, j, mu).map(|k| fbar_gen(n, sign, i, j, k))
}

/// `(j-i)/mu` when it is a positive integer.
pub fn arity_at_slope(i: i64, j: i64, mu: (i64, i64)) -> Option<usize> {
    let (a, b) = reduce_slope(mu);
    if a <= 0 || j <= i {
        return None;
    }
    let num = (j - i) * b;
    if num % a == 0 && num / a > 0 {
        Some((num / a) as usize)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// The field automorphism qbar_+ <-> qbar_- and the sign-swap isomorphism.
// ---------------------------------------------------------------------------

fn vbar_mono(m: &Mono) -> Mono {
    let aq = m.get(0);
    let av = m.get(1);
    let mut exps: Vec<i32> = (0..m.nvars().max(2)).map(|t| m.get(t)).collect();
    exps[0] = aq - av;
    exps[1] = -av;
    Mono::from_exps(exps)
}

fn vbar_poly(p: &MPoly) -> MPoly {
    let mut out = MPoly::zero();
    for (m, c) in p.iter() {
        out.add_term(vbar_mono(m), c.clone());
    }
    out
}

/// The involution of the ground field fixing `q` and sending
/// `v = qbar_+^{1/n}` to `q^{-1} v^{-1} = qbar_-^{1/n}`.
pub fn vbar_rat(r: &Rat) -> Rat {
    let mut dens = Vec::new();
    for (f, p) in r.den_factors() {
        for _ in 0..*p {
            dens.push(vbar_poly(f));
        }
    }
    if r.den_constant() != &BigInt::one() {
        dens.push(MPoly::from_bigint(r.den_constant().clone()));
    }
    Rat::with_den_factors(vbar_poly(r.numerator()), dens)
}

/// Entry-wise extension of [`vbar_rat`].
pub fn vbar_mat(x: &MatRat) -> MatRat {
    x.map_entries(&|v| vbar_rat(v))
}

/// The algebra isomorphism between the two signs:
/// `X -> D_1 ... D_k X` followed by the swap of the two `qbar` parameters.
pub fn phi(x: &MatRat) -> MatRat {
    d_tensor(x.n(), x.k(), false).compose(&vbar_mat(x))
}

// ---------------------------------------------------------------------------
// The alpha functionals.
// ---------------------------------------------------------------------------

/// Full-chain one-variable factor `X^{(k)}(y)` in the variable `z_1`, via
/// the residue factorization at the single-row composition `(k)`.
pub fn x_chain(x: &MatRat, sign: Sign) -> Result<MatRat, String> {
    let k = x.k();
    match wheel_extract(x, &vec![k], sign) {
        Ok(Some(m)) => Ok(m),
        Ok(None) => Err("full-chain residue does not factor through the braid".into()),
        Err(e) => Err(format!("{e}")),
    }
}

/// The linear functional `alpha_{[i;j)}` (plus) or `alpha_{-[i;j)}` (minus).
/// Inputs whose horizontal degree does not match `[i;j)` map to zero.
pub fn alpha(sign: Sign, i: i64, j: i64, x: &MatRat) -> Result<Rat, String> {
    let n = x.n();
    let k = x.k();
    if x.is_zero() {
        return Ok(Rat::zero());
    }
    if k == 0 {
        let empty: Vec<u8> = Vec::new();
        return Ok(if i == j { x.get(&empty, &empty) } else { Rat::zero() });
    }
    let want = crate::tensor::interval_degree(n, i, j);
    match x.horizontal_degree() {
        Some(d) if d == want => {}
        _ => return Ok(Rat::zero()),
    }
    let chain = x_chain(x, sign)?;
    let (ib, jb) = (bar(n, i), bar(n, j));
    let entry = chain.get(&vec![jb], &vec![ib]);
    let ypow = window(n, j) - window(n, i);
    let coeff = entry.coeff_at_zero(1, ypow as i32);
    let ki = k as i64;
    let mut expo = ki * (i - j) + (j - i) + ki - 2 * ki * ib as i64;
    if sign == Sign::Minus {
        expo += 2 * ib as i64 - 2 * jb as i64;
    }
    let norm = Rat::one()
        .sub(&Rat::qv(2, 0))
        .pow_i(k as i32)
        .mul(&Rat::signed_mono(1, qbar_frac_pow(sign, expo as i32)));
    Ok(coeff.mul(&norm))
}

// ---------------------------------------------------------------------------
// Simple root generators.
// ---------------------------------------------------------------------------

/// `P_{[i;j)}^{(k)} = F / (qbar^{1/n} (1-q^2))` on the plus side, and with
/// the sign-adjusted normalization `F / (-qbar_-^{1/n} (1-q^2))` on the minus
/// side, so that `alpha_{+-[i;j)}(P) = +-1`.  Only defined for
/// `gcd(j-i, k) = 1`; imaginary degrees need the linear solver.
pub fn p_simple(n: usize, sign: Sign, i: i64, j: i64, k: usize) -> Result<MatRat, String> {
    if gcd((j - i).unsigned_abs(), k as u64) != 1 {
        return Err(format!(
            "gcd({}, {k}) != 1: the degree is imaginary, use the linear solver",
            j - i
        ));
    }
    let scale = match sign {
        Sign::Plus => Rat::signed_mono(1, qbar_frac_pow(Sign::Plus, 1)),
        Sign::Minus => Rat::signed_mono(-1, qbar_frac_pow(Sign::Minus, 1)),
    }
    .mul(&Rat::one().sub(&Rat::qv(2, 0)));
    Ok(f_gen(n, sign, i, j, k).scale(&scale.recip()))
}

// ---------------------------------------------------------------------------
// Psi bookkeeping and the leading-order coproduct.
// ---------------------------------------------------------------------------

/// Pairing of a horizontal degree with the `s`-th simple coweight:
/// `<d, varsigma^s> = d_s - d_{s-1}` with indices modulo `n` (so `s = 1`
/// reads `d_1 - d_n`).
pub fn psi_weight(d: &[i64], s: usize) -> i64 {
    let n = d.len();
    debug_assert!(1 <= s && s <= n);
    let prev = if s == 1 { n } else { s - 1 };
    d[s - 1] - d[prev - 1]
}

/// Moving the monomial `prod psi_s^{m_s}` from the left of an element of
/// horizontal degree `d` to its right multiplies by this power of `q`.
pub fn psi_cross_power(d: &[i64], m: &[i64]) -> i64 {
    let mut total = 0;
    for (s, &e) in m.iter().enumerate() {
        total -= e * psi_weight(d, s + 1);
    }
    total
}

/// One summand of a split coproduct: `left . psi^m (x) right`, with the psi
/// monomial normal-ordered to the right of the left tensor factor.
#[derive(Clone, Debug)]
pub struct PsiTerm {
    pub left: MatRat,
    pub psi: Vec<i64>,
    pub right: MatRat,
}

/// Collect granular summands by psi monomial, gluing each left/right pair
/// back into a single matrix on the original slots.
pub fn assemble(n: usize, k: usize, terms: &[PsiTerm]) -> BTreeMap<Vec<i64>, MatRat> {
    let mut out: BTreeMap<Vec<i64>, MatRat> = BTreeMap::new();
    for t in terms {
        let glued = t.left.tensor_product(&t.right);
        let slot = out.entry(t.psi.clone()).or_insert_with(|| MatRat::zero(n, k));
        *slot = slot.add(&glued);
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Product of `1/f(z_u/z_v)` over all pairs `u <= l < v`.
fn split_f_inverse(x: &MatRat, l: usize) -> MatRat {
    let k = x.k();
    let mut out = x.clone();
    for u in 1..=l {
        for w in (l + 1)..=k {
            let zu = Mono::var(zslot(u), 1);
            let zw = Mono::var(zslot(w), 1);
            out = out.scale(&f_inv_rat(&zu, &zw));
        }
    }
    out
}

/// Signed colour flow of the trailing slots of an entry: each large slot
/// contributes `+1` at its column colour and `-1` at its row colour.
fn colour_flow(n: usize, l: usize, row: &[u8], col: &[u8]) -> Vec<i64> {
    let mut psi = vec![0i64; n];
    for a in l..row.len() {
        psi[col[a] as usize - 1] += 1;
        psi[row[a] as usize - 1] -= 1;
    }
    psi
}

/// Split a slice of the small-variable expansion into granular
/// left/psi/right summands.  The slice denominator must separate into
/// factors purely in the small or purely in the large variables.
fn separate_slice(
    n: usize,
    k: usize,
    l: usize,
    row: &[u8],
    col: &[u8],
    slice: &Rat,
) -> Result<Vec<PsiTerm>, String> {
    let mut small_dens: Vec<MPoly> = Vec::new();
    let mut large_dens: Vec<MPoly> = Vec::new();
    for (f, p) in slice.den_factors() {
        let mut in_small = false;
        let mut in_large = false;
        for zi in 1..=k {
            if f.var_span(zslot(zi)).map_or(false, |(lo, hi)| lo != 0 || hi != 0) {
                if zi <= l {
                    in_small = true;
                } else {
                    in_large = true;
                }
            }
        }
        if in_small && in_large {
            return Err("mixed denominator factor survived the expansion".into());
        }
        let target = if in_small { &mut small_dens } else { &mut large_dens };
        for _ in 0..*p {
            target.push(f.clone());
        }
    }
    let psi = colour_flow(n, l, row, col);
    let den_c = slice.den_constant().clone();
    let mut out = Vec::new();
    for (m, c) in slice.numerator().iter() {
        let mut small_exps = vec![0i32; 2 + l];
        small_exps[0] = m.get(0);
        small_exps[1] = m.get(1);
        for u in 1..=l {
            small_exps[1 + u] = m.get(zslot(u));
        }
        let large_mono = {
            let mut exps = vec![0i32; 2 + (k - l)];
            for w in (l + 1)..=k {
                exps[1 + (w - l)] = m.get(zslot(w));
            }
            Mono::from_exps(exps)
        };
        let mut left_num = MPoly::zero();
        left_num.add_term(Mono::from_exps(small_exps), c.clone());
        let mut left_dens = small_dens.clone();
        if !den_c.is_one() {
            left_dens.push(MPoly::from_bigint(den_c.clone()));
        }
        let left_rat = Rat::with_den_factors(left_num, left_dens);
        let right_rat = Rat::with_den_factors(
            MPoly::mono(large_mono),
            large_dens
                .iter()
                .map(|f| f.relabel_z(&|zi| zi - l))
                .collect(),
        );
        let mut left = MatRat::zero(n, l);
        left.set(row[..l].to_vec(), col[..l].to_vec(), left_rat);
        let mut right = MatRat::zero(n, k - l);
        right.set(row[l..].to_vec(), col[l..].to_vec(), right_rat);
        out.push(PsiTerm { left, psi: psi.clone(), right });
    }
    Ok(out)
}

/// The split-`l` piece of the leading-order coproduct at slope `mu`.
///
/// The element is divided by all `f(z_u/z_v)` with `u <= l < v` and expanded
/// with the first `l` variables small.  For an entry of joint z-degree `H`
/// and large-slot colour flow `C = sum_{a>l} (row_a - col_a)`, the component
/// of small-degree `t` has right-factor slope `(n(H-t)+C)/(n(k-l))`-scaled
/// degree `n(H-t)+C`; slope `mu = a/b` picks the single integer
/// `t* = H + (C b - a(k-l)) / (n b)` and membership below `mu` requires all
/// components below `t*` to vanish.  The expansion window is finite: colour
/// flow is bounded by `(n-1)(k-l)`, so no component below
/// `t* - (n-1)(k-l)` can carry a slope-violating monomial.
pub fn delta_mu_split(x: &MatRat, mu: (i64, i64), l: usize) -> Result<Vec<PsiTerm>, String> {
    let n = x.n();
    let k = x.k();
    assert!(l <= k, "split point out of range");
    let (a, b) = reduce_slope(mu);
    if l == k {
        // Everything small: the element itself tensor the empty right factor.
        return Ok(vec![PsiTerm {
            left: x.clone(),
            psi: vec![0; n],
            right: MatRat::identity(n, 0),
        }]);
    }
    if l == 0 {
        // Everything large: keep an entry only when its degree sits exactly
        // at the slope, with the psi monomial carrying the full colour flow.
        let mut out = Vec::new();
        for ((row, col), v) in x.iter() {
            let h = v
                .z_homogeneous_degree()
                .ok_or("entry is not homogeneous in the spectral variables")?;
            let psi = colour_flow(n, 0, row, col);
            let c: i64 = -psi.iter().sum::<i64>();
            let tnum = h * (n as i64) * b + c * b - a * (k as i64);
            if tnum > 0 {
                return Err(format!(
                    "slope above {a}/{b} at split 0: entry ({row:?},{col:?}) has scaled \
                     degree {tnum} above the threshold"
                ));
            }
            if tnum == 0 {
                let mut right = MatRat::zero(n, k);
                right.set(row.clone(), col.clone(), v.clone());
                out.push(PsiTerm { left: MatRat::identity(n, 0), psi, right });
            }
        }
        return Ok(out);
    }
    let w = split_f_inverse(x, l);
    let small: Vec<usize> = (1..=l).collect();
    let mut out = Vec::new();
    for ((row, col), v) in w.iter() {
        let h = v
            .z_homogeneous_degree()
            .ok_or("entry is not homogeneous in the spectral variables")?;
        let c: i64 = row[l..]
            .iter()
            .zip(col[l..].iter())
            .map(|(&ra, &ca)| ra as i64 - ca as i64)
            .sum();
        let tnum = h * (n as i64) * b + c * b - a * (k as i64 - l as i64);
        let tden = (n as i64) * b;
        let tfloor = div_floor(tnum, tden);
        let texact = tnum % tden == 0;
        let lead = v.laurent_leading(&small, 0)[0].0;
        if lead > tfloor {
            // The expansion starts above the threshold: the entry neither
            // violates the slope nor contributes at it.
            continue;
        }
        let depth = (tfloor - lead) as usize;
        for (t, slice) in &v.laurent_leading(&small, depth) {
            if slice.is_zero() {
                continue;
            }
            if texact && *t == tfloor {
                out.extend(separate_slice(n, k, l, row, col, slice)?);
            } else {
                return Err(format!(
                    "slope above {a}/{b} at split {l}: entry ({row:?},{col:?}) has a \
                     component of small degree {t} below the slope threshold"
                ));
            }
        }
    }
    Ok(out)
}

/// Whether every split of `x` stays at slope `<= mu`: the horizontal degree
/// obeys `|d| <= mu k`, and no split exposes a component below the slope
/// threshold.
pub fn slope_membership(x: &MatRat, mu: (i64, i64)) -> bool {
    let k = x.k();
    let (a, b) = reduce_slope(mu);
    match x.horizontal_degree_total() {
        Some(total) => {
            if total * b > a * k as i64 {
                return false;
            }
        }
        None => return false,
    }
    for l in 1..k {
        if delta_mu_split(x, (a, b), l).is_err() {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Exact linear algebra over the ground field.
// ---------------------------------------------------------------------------

/// Flatten a family of same-shape matrices into rows of exact ground-field
/// coordinates.  Spectral denominators are cleared with the least common
/// collection of factors per entry, after which each coordinate is the
/// coefficient of one z-monomial of one entry.
pub fn qv_rows(family: &[MatRat]) -> Vec<Vec<Rat>> {
    let mut keys: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for m in family {
        for ((row, col), _) in m.iter() {
            let key = (row.clone(), col.clone());
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
    }
    keys.sort();
    let mut columns: BTreeMap<(usize, Vec<i32>), usize> = BTreeMap::new();
    let mut raw: Vec<BTreeMap<(usize, Vec<i32>), Rat>> = vec![BTreeMap::new(); family.len()];
    for (ki, key) in keys.iter().enumerate() {
        // Common denominator factors across the family at this entry.
        let mut common: Vec<(MPoly, u32)> = Vec::new();
        for m in family {
            let v = m.get(&key.0, &key.1);
            for (f, p) in v.den_factors() {
                match common.iter_mut().find(|(g, _)| g == f) {
                    Some(slot) => slot.1 = slot.1.max(*p),
                    None => common.push((f.clone(), *p)),
                }
            }
        }
        for (mi, m) in family.iter().enumerate() {
            let mut v = m.get(&key.0, &key.1);
            if v.is_zero() {
                continue;
            }
            for (f, p) in &common {
                for _ in 0..*p {
                    v = v.mul(&Rat::with_den_factors(f.clone(), Vec::new()));
                }
            }
            assert!(
                v.den_factors().is_empty(),
                "denominator failed to clear against the common multiple"
            );
            let den_c = v.den_constant().clone();
            for (mono, cf) in v.numerator().iter() {
                let mut zpat = Vec::new();
                for zi in 1..=family[mi].k() {
                    zpat.push(mono.get(zslot(zi)));
                }
                let qv = Mono::qv(mono.get(0), mono.get(1));
                let mut poly = MPoly::zero();
                poly.add_term(qv, cf.clone());
                let val = Rat::with_den_factors(poly, vec![MPoly::from_bigint(den_c.clone())]);
                let colkey = (ki, zpat);
                let next = columns.len();
                columns.entry(colkey.clone()).or_insert(next);
                let slot = raw[mi].entry(colkey).or_insert_with(Rat::zero);
                *slot = slot.add(&val);
            }
        }
    }
    let width = columns.len();
    let mut rows = vec![vec![Rat::zero(); width]; family.len()];
    for (mi, pairs) in raw.into_iter().enumerate() {
        for (colkey, val) in pairs {
            rows[mi][columns[&colkey]] = val;
        }
    }
    rows
}

/// Rank of a matrix of ground-field entries, by Gaussian elimination with
/// the first nonzero entry of each row as pivot (deterministic).
pub fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for c in col..width {
            rows[rank][c] = rows[rank][c].mul(&inv);
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..width {
                    let delta = rows[rank][c].mul(&factor);
                    rows[r][c] = rows[r][c].sub(&delta);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Solve `sum_m c_m row_m = target` for a unique ground-field vector `c`.
/// The rows are the columns of the linear system, so the unknowns index the
/// family being combined.
pub fn solve_unique(rows: &[Vec<Rat>], target: &[Rat]) -> Result<Vec<Rat>, String> {
    let unknowns = rows.len();
    let width = target.len();
    assert!(rows.iter().all(|r| r.len() == width));
    // Augmented system: equations indexed by coordinates.
    let mut aug: Vec<Vec<Rat>> = (0..width)
        .map(|c| {
            let mut eq: Vec<Rat> = rows.iter().map(|r| r[c].clone()).collect();
            eq.push(target[c].clone());
            eq
        })
        .collect();
    let mut pivots: Vec<Option<usize>> = vec![None; unknowns];
    let mut used = 0;
    for col in 0..unknowns {
        let Some(p) = (used..aug.len()).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(used, p);
        let inv = aug[used][col].recip();
        for c in col..=unknowns {
            aug[used][c] = aug[used][c].mul(&inv);
        }
        for r in 0..aug.len() {
            if r != used && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in col..=unknowns {
                    let delta = aug[used][c].mul(&factor);
                    aug[r][c] = aug[r][c].sub(&delta);
                }
            }
        }
        pivots[col] = Some(used);
        used += 1;
    }
    for r in used..aug.len() {
        if !aug[r][unknowns].is_zero() {
            return Err(format!(
                "inconsistent linear system: {} equations, rank {used}",
                aug.len()
            ));
        }
    }
    let mut sol = Vec::with_capacity(unknowns);
    for col in 0..unknowns {
        match pivots[col] {
            Some(r) => sol.push(aug[r][unknowns].clone()),
            None => {
                return Err(format!(
                    "underdetermined linear system: no pivot for unknown {col} (rank {used} of {unknowns})"
                ))
            }
        }
    }
    Ok(sol)
}

// ---------------------------------------------------------------------------
// Imaginary generators by linear solve.
// ---------------------------------------------------------------------------

/// Multisets of intervals `[i;j)` with `1 <= i <= n`, each of length in
/// `mu N`, whose degree vectors sum to `d`.
pub fn magic_multisets(n: usize, mu: (i64, i64), d: &[i64]) -> Vec<Vec<(i64, i64)>> {
    let total: i64 = d.iter().sum();
    let mut intervals = Vec::new();
    for i in 1..=n as i64 {
        for len in 1..=total.max(0) {
            if arity_at_slope(i, i + len, mu).is_some() {
                let vec = crate::tensor::interval_degree(n, i, i + len);
                if vec.iter().zip(d.iter()).all(|(a, b)| a <= b) {
                    intervals.push(((i, i + len), vec));
                }
            }
        }
    }
    let mut found = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn recurse(
        intervals: &[((i64, i64), Vec<i64>)],
        start: usize,
        remaining: Vec<i64>,
        stack: &mut Vec<usize>,
        found: &mut Vec<Vec<(i64, i64)>>,
    ) {
        if remaining.iter().all(|&r| r == 0) {
            found.push(stack.iter().map(|&t| intervals[t].0).collect());
            return;
        }
        for t in start..intervals.len() {
            let (_, vec) = &intervals[t];
            if vec.iter().zip(remaining.iter()).all(|(a, b)| a <= b) {
                let next: Vec<i64> =
                    remaining.iter().zip(vec.iter()).map(|(r, a)| r - a).collect();
                stack.push(t);
                recurse(intervals, t, next, stack, found);
                stack.pop();
            }
        }
    }
    recurse(&intervals, 0, d.to_vec(), &mut stack, &mut found);
    found
}

/// Number of unordered interval collections at slope `mu` of total degree
/// `d`: the dimension the slope subalgebra attains in that degree.
pub fn magic_multiset_count(n: usize, mu: (i64, i64), d: &[i64]) -> usize {
    magic_multisets(n, mu, d).len()
}

/// All ordered products of slope-`mu` generators with total degree `d`,
/// one per ordering of each multiset, as a spanning family.
pub fn ordered_f_products(n: usize, sign: Sign, mu: (i64, i64), d: &[i64]) -> Vec<MatRat> {
    let mut out = Vec::new();
    for multiset in magic_multisets(n, mu, d) {
        for perm in distinct_permutations(&multiset) {
            let mut acc: Option<MatRat> = None;
            for (i, j) in perm {
                let f = f_gen_slope(n, sign, i, j, mu).expect("enumerated at slope mu");
                acc = Some(match acc {
                    None => f,
                    Some(prev) => crate::shuffle::shuffle_product(&prev, &f, sign),
                });
            }
            out.push(acc.expect("nonempty multiset"));
        }
    }
    out
}

fn distinct_permutations(items: &[(i64, i64)]) -> Vec<Vec<(i64, i64)>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for t in 0..items.len() {
        if seen.contains(&items[t]) {
            continue;
        }
        seen.push(items[t]);
        let mut rest = items.to_vec();
        let head = rest.remove(t);
        for mut tail in distinct_permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Solve for the imaginary generator of degree `(l delta, ln/mu)` and
/// colour class `r`: the unique combination of ordered products that is
/// primitive under every split of the leading-order coproduct and has
/// `alpha_{+-[s;s+nl)}` equal to `+-1` exactly when `s = r` modulo
/// `g = gcd(n, numerator of mu)`.
pub fn p_imaginary_solve(
    n: usize,
    sign: Sign,
    mu: (i64, i64),
    l: i64,
    r: i64,
) -> Result<MatRat, String> {
    let (a, b) = reduce_slope(mu);
    let g = gcd(n as u64, a.unsigned_abs()) as i64;
    if !(1 <= r && r <= g) {
        return Err(format!("colour class {r} out of range 1..={g}"));
    }
    let knum = l * n as i64 * b;
    if knum % a != 0 || knum / a <= 0 {
        return Err(format!("degree ({l} delta) is not reachable at slope {a}/{b}"));
    }
    let k = (knum / a) as usize;
    let d = vec![l; n];
    let candidates = ordered_f_products(n, sign, (a, b), &d);
    if candidates.is_empty() {
        return Err("no spanning products in this degree".into());
    }
    let mut rows: Vec<Vec<Rat>> = vec![Vec::new(); candidates.len()];
    let mut target: Vec<Rat> = Vec::new();
    // Alpha constraints, one per subscript class.
    for s in 1..=n as i64 {
        for (m, cand) in candidates.iter().enumerate() {
            rows[m].push(alpha(sign, s, s + n as i64 * l, cand)?);
        }
        let hit = (s - r).rem_euclid(g) == 0;
        target.push(match (hit, sign) {
            (false, _) => Rat::zero(),
            (true, Sign::Plus) => Rat::one(),
            (true, Sign::Minus) => Rat::one().neg(),
        });
    }
    // Primitivity: the slope-mu component of every inner split vanishes.
    for split in 1..k {
        let mut pieces: Vec<Vec<PsiTerm>> = Vec::new();
        for cand in &candidates {
            pieces.push(delta_mu_split(cand, (a, b), split)?);
        }
        let mut psis: Vec<Vec<i64>> = Vec::new();
        let assembled: Vec<BTreeMap<Vec<i64>, MatRat>> = pieces
            .iter()
            .map(|terms| assemble(n, k, terms))
            .collect();
        for map in &assembled {
            for psi in map.keys() {
                if !psis.contains(psi) {
                    psis.push(psi.clone());
                }
            }
        }
        psis.sort();
        for psi in psis {
            let family: Vec<MatRat> = assembled
                .iter()
                .map(|map| map.get(&psi).cloned().unwrap_or_else(|| MatRat::zero(n, k)))
                .collect();
            let coords = qv_rows(&family);
            let width = coords[0].len();
            for (m, row) in coords.into_iter().enumerate() {
                rows[m].extend(row);
            }
            target.extend(std::iter::repeat_with(Rat::zero).take(width));
        }
    }
    let sol = solve_unique(&rows, &target)?;
    let mut out = MatRat::zero(n, k);
    for (c, cand) in sol.iter().zip(candidates.iter()) {
        out = out.add(&cand.scale(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_descend_from_j_to_i() {
        assert_eq!(chain(1, 4, 2, false), vec![4, 2, 1]);
        assert_eq!(chain(1, 4, 2, true), vec![4, 3, 1]);
        assert_eq!(chain(0, 3, 3, false), vec![3, 2, 1, 0]);
        assert_eq!(chain(1, 3, 2, false), vec![3, 2, 1]);
    }

    #[test]
    fn extended_units_carry_window_powers() {
        let n = 2;
        let e = e_ext(n, 3, 1);
        assert_eq!(e.get(&vec![1], &vec![1]), Rat::z(1));
        let e = e_ext(n, 4, 2);
        assert_eq!(e.get(&vec![2], &vec![2]), Rat::z(1));
        assert_eq!(e_ext(n, 1, 3).get(&vec![1], &vec![1]), Rat::z(1).recip());
    }

    #[test]
    fn rank_one_generator_is_a_scaled_unit() {
        // Single-slot generators: E_{ji} times qbar^{2 ibar / n}.
        let n = 2;
        let f = f_gen(n, Sign::Plus, 1, 2, 1);
        let expect = MatRat::unit(n, 2, 1).scale(&Rat::qv(0, 2));
        assert_eq!(f, expect);
        let f = f_gen(n, Sign::Plus, 2, 3, 1);
        let expect = MatRat::unit(n, 1, 2).scale(&Rat::z(1).mul(&Rat::qv(0, 4)));
        assert_eq!(f, expect);
    }

    #[test]
    fn alpha_normalizes_rank_one_generators() {
        let n = 2;
        for (i, j) in [(1i64, 2i64), (2, 3), (1, 3), (2, 4), (1, 4)] {
            let f = f_gen(n, Sign::Plus, i, j, 1);
            let got = alpha(Sign::Plus, i, j, &f).unwrap();
            let want = Rat::one()
                .sub(&Rat::qv(2, 0))
                .mul(&Rat::signed_mono(1, qbar_frac_pow(Sign::Plus, 1)));
            assert_eq!(got, want, "alpha at ({i},{j})");
            let off = alpha(Sign::Plus, i + 1, j + 1, &f).unwrap();
            assert!(off.is_zero());
        }
    }

    #[test]
    fn psi_weight_is_the_discrete_derivative() {
        let d = vec![1, 0];
        assert_eq!(psi_weight(&d, 1), 1);
        assert_eq!(psi_weight(&d, 2), -1);
        assert_eq!(psi_cross_power(&d, &[1, -1]), -2);
    }

    #[test]
    fn multiset_count_matches_hand_enumeration() {
        // Slope 1, degree (1,1) at n = 2: [1;3), [2;4), and [1;2)+[2;3).
        assert_eq!(magic_multiset_count(2, (1, 1), &[1, 1]), 3);
        // Slope 2, degree (1,1): only the two long intervals.
        assert_eq!(magic_multiset_count(2, (2, 1), &[1, 1]), 2);
    }
}
