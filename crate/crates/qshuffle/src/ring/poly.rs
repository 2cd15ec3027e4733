//! Multivariate Laurent polynomials with exact integer coefficients.
//!
//! The variable registry is fixed once and for all: index 0 is `q`, index 1 is
//! `v` (the chosen n-th root of the loop parameter), and index `1 + i` is the
//! spectral variable `z_i` for `i >= 1`.  Exponent vectors are stored with
//! trailing zeros trimmed, so a monomial touching only `q` and `v` never pays
//! for unused spectral slots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Registry slot of the quantum parameter `q`.
pub const QEXP: usize = 0;
/// Registry slot of `v = qbar^{1/n}`.
pub const VEXP: usize = 1;

/// Registry slot of the spectral variable `z_i` (1-based `i`).
pub fn zslot(i: usize) -> usize {
    debug_assert!(i >= 1, "spectral variables are 1-based");
    1 + i
}

/// Width of the variable registry: `q`, `v` and up to twelve spectral slots.
pub const MAX_VARS: usize = 14;

fn fit(e: i32) -> i16 {
    i16::try_from(e).expect("monomial exponent out of range")
}

/// Laurent monomial: a fixed-width exponent vector over the registry, kept
/// unboxed so map keys stay allocation-free.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    exps: [i16; MAX_VARS],
}

impl Default for Mono {
    fn default() -> Self {
        Mono::one()
    }
}

impl Mono {
    pub fn one() -> Self {
        Mono { exps: [0; MAX_VARS] }
    }

    pub fn var(idx: usize, e: i32) -> Self {
        assert!(idx < MAX_VARS, "variable slot {idx} outside the registry");
        let mut m = Mono::one();
        m.exps[idx] = fit(e);
        m
    }

    /// Monomial `q^a v^b`.
    pub fn qv(a: i32, b: i32) -> Self {
        let mut m = Mono::one();
        m.exps[QEXP] = fit(a);
        m.exps[VEXP] = fit(b);
        m
    }

    pub fn from_exps(exps: Vec<i32>) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables for the registry");
        let mut m = Mono::one();
        for (i, e) in exps.into_iter().enumerate() {
            m.exps[i] = fit(e);
        }
        m
    }

    pub fn get(&self, idx: usize) -> i32 {
        if idx < MAX_VARS {
            self.exps[idx] as i32
        } else {
            0
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps == [0; MAX_VARS]
    }

    /// Width of the registry; exponents beyond it are identically zero.
    pub fn nvars(&self) -> usize {
        MAX_VARS
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..MAX_VARS {
            out.exps[i] = out.exps[i]
                .checked_add(other.exps[i])
                .expect("monomial exponent overflow");
        }
        out
    }

    pub fn inv(&self) -> Self {
        let mut out = *self;
        for e in out.exps.iter_mut() {
            *e = -*e;
        }
        out
    }

    pub fn pow(&self, e: i32) -> Self {
        let mut out = *self;
        for x in out.exps.iter_mut() {
            *x = fit(*x as i32 * e);
        }
        out
    }

    /// Total degree in the spectral variables only.
    pub fn z_total(&self) -> i64 {
        self.exps[2..].iter().map(|&e| e as i64).sum()
    }

    pub fn is_z_free(&self) -> bool {
        self.exps[2..].iter().all(|&e| e == 0)
    }

    /// Weighted degree over a set of spectral slots (used for series regimes).
    pub fn t_order(&self, zvars: &[usize]) -> i64 {
        zvars.iter().map(|&i| self.get(zslot(i)) as i64).sum()
    }

    /// Apply `z_i -> z_{map(i)}` to the spectral slots.
    pub fn relabel_z(&self, map: &dyn Fn(usize) -> usize) -> Self {
        let mut out = Mono::one();
        out.exps[QEXP] = self.exps[QEXP];
        out.exps[VEXP] = self.exps[VEXP];
        for i in 2..MAX_VARS {
            let e = self.exps[i];
            if e != 0 {
                let tgt = zslot(map(i - 1));
                assert!(tgt < MAX_VARS, "relabel target outside the registry");
                out.exps[tgt] = out.exps[tgt]
                    .checked_add(e)
                    .expect("monomial exponent overflow");
            }
        }
        out
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        // Spectral total degree first, then lex over spectral slots (lower
        // index dominates), then total q+v degree, then the q exponent.
        let o = self.z_total().cmp(&other.z_total());
        if o != Ordering::Equal {
            return o;
        }
        let o = self.exps[2..].cmp(&other.exps[2..]);
        if o != Ordering::Equal {
            return o;
        }
        let qv_self = self.exps[0] as i64 + self.exps[1] as i64;
        let qv_other = other.exps[0] as i64 + other.exps[1] as i64;
        let o = qv_self.cmp(&qv_other);
        if o != Ordering::Equal {
            return o;
        }
        self.exps[0].cmp(&other.exps[0])
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse Laurent polynomial with `BigInt` coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default, PartialOrd, Ord)]
pub struct MPoly {
    terms: BTreeMap<Mono, BigInt>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        MPoly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        MPoly::from_bigint(BigInt::from(c))
    }

    pub fn from_bigint(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        MPoly { terms }
    }

    pub fn var(idx: usize, e: i32) -> Self {
        MPoly::term(BigInt::one(), Mono::var(idx, e))
    }

    pub fn mono(m: Mono) -> Self {
        MPoly::term(BigInt::one(), m)
    }

    pub fn term(c: BigInt, m: Mono) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Mono::one())
                .map_or(false, |c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono) -> Self {
        MPoly {
            terms: self.terms.iter().map(|(mm, c)| (mm.mul(m), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, cc)| (m.clone(), cc * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = MPoly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Leading term in the global monomial order.
    pub fn leading(&self) -> Option<(&Mono, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Positive gcd of all coefficients; zero polynomial gives zero.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn divide_content(&self, g: &BigInt) -> Self {
        if g.is_one() {
            return self.clone();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c / g)).collect(),
        }
    }

    /// Componentwise minimum exponent over the support (the largest monomial
    /// dividing every term).  Zero polynomial gives the unit monomial.
    pub fn min_exps(&self) -> Mono {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m,
            None => return Mono::one(),
        };
        let mut n = first.nvars();
        for m in self.terms.keys() {
            n = n.max(m.nvars());
        }
        let mut exps = vec![0i32; n];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = first.get(i);
        }
        for m in self.terms.keys() {
            for (i, e) in exps.iter_mut().enumerate() {
                *e = (*e).min(m.get(i));
            }
        }
        Mono::from_exps(exps)
    }

    pub fn is_z_free(&self) -> bool {
        self.terms.keys().all(|m| m.is_z_free())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn as_monomial(&self) -> Option<(&BigInt, &Mono)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (c, m))
        } else {
            None
        }
    }

    /// Minimum and maximum exponent of one variable over the support.
    pub fn var_span(&self, idx: usize) -> Option<(i32, i32)> {
        let mut out: Option<(i32, i32)> = None;
        for m in self.terms.keys() {
            let e = m.get(idx);
            out = Some(match out {
                None => (e, e),
                Some((lo, hi)) => (lo.min(e), hi.max(e)),
            });
        }
        out
    }

    /// Group terms by the exponent of one variable, removing that variable.
    pub fn slices_by_var(&self, idx: usize) -> BTreeMap<i32, MPoly> {
        let mut out: BTreeMap<i32, MPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.get(idx);
            let rest = m.mul(&Mono::var(idx, -e));
            out.entry(e).or_insert_with(MPoly::zero).add_term(rest, c.clone());
        }
        out
    }

    /// Group terms by total degree over a set of spectral variables.
    pub fn slices_by_t_order(&self, zvars: &[usize]) -> BTreeMap<i64, MPoly> {
        let mut out: BTreeMap<i64, MPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.t_order(zvars))
                .or_insert_with(MPoly::zero)
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Substitute `x_idx -> sign * m` where `sign` is +1 or -1 and `m` is a
    /// monomial.  The target may involve the variable itself (the
    /// substitution is applied once, not recursively).
    pub fn subst_var(&self, idx: usize, sign: i8, m: &Mono) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        let mut out = MPoly::zero();
        for (mm, c) in &self.terms {
            let e = mm.get(idx);
            let rest = mm.mul(&Mono::var(idx, -e));
            let mut coeff = c.clone();
            if sign < 0 && e.rem_euclid(2) == 1 {
                coeff = -coeff;
            }
            out.add_term(rest.mul(&m.pow(e)), coeff);
        }
        out
    }

    pub fn derivative(&self, idx: usize) -> Self {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.get(idx);
            if e != 0 {
                out.add_term(m.mul(&Mono::var(idx, -1)), c * BigInt::from(e));
            }
        }
        out
    }

    pub fn relabel_z(&self, map: &dyn Fn(usize) -> usize) -> Self {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.relabel_z(map), c.clone());
        }
        out
    }

    /// If every term has the same total spectral degree, return it.
    pub fn z_homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let d = it.next()?.z_total();
        for m in it {
            if m.z_total() != d {
                return None;
            }
        }
        Some(d)
    }

    /// Exact division in the Laurent ring; `None` when not divisible.
    pub fn exact_div(&self, d: &Self) -> Option<MPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        // Per-variable exponent box of the quotient: extreme exponents of a
        // product of Laurent polynomials add, so divisibility pins the range.
        let nv = {
            let mut n = 0;
            for m in self.terms.keys().chain(d.terms.keys()) {
                n = n.max(m.nvars());
            }
            n
        };
        let mut lo = vec![0i32; nv];
        let mut hi = vec![0i32; nv];
        for i in 0..nv {
            let (nlo, nhi) = self.var_span(i).unwrap_or((0, 0));
            let (dlo, dhi) = d.var_span(i).unwrap_or((0, 0));
            lo[i] = nlo - dlo;
            hi[i] = nhi - dhi;
            if lo[i] > hi[i] {
                return None;
            }
        }
        let (dm, dc) = d.leading().unwrap();
        let dm = *dm;
        let dinv = dm.inv();
        let mut rem = self.terms.clone();
        let mut quot: BTreeMap<Mono, BigInt> = BTreeMap::new();
        while let Some((rm, rc)) = rem.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            let qm = rm.mul(&dinv);
            for i in 0..nv {
                let e = qm.get(i);
                if e < lo[i] || e > hi[i] {
                    return None;
                }
            }
            let (qc, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            // Subtract `qc qm * d` in place; the leading term cancels by
            // construction and every new key is strictly smaller.
            for (m2, c2) in d.terms.iter() {
                let key = qm.mul(m2);
                let delta = &qc * c2;
                use std::collections::btree_map::Entry;
                match rem.entry(key) {
                    Entry::Vacant(slot) => {
                        slot.insert(-delta);
                    }
                    Entry::Occupied(mut slot) => {
                        *slot.get_mut() -= delta;
                        if slot.get().is_zero() {
                            slot.remove();
                        }
                    }
                }
            }
            quot.insert(qm, qc);
        }
        Some(MPoly { terms: quot })
    }

    /// Format with terms in descending monomial order.
    pub fn fmt_canonical(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let vars = fmt_mono(m);
            if vars.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&vars);
            } else {
                out.push_str(&abs.to_string());
                out.push('*');
                out.push_str(&vars);
            }
        }
        out
    }

    /// Number of displayed factors of the single term, for bracketing choices.
    /// Only meaningful for monomials.
    pub fn display_factor_count(&self) -> usize {
        match self.as_monomial() {
            None => usize::MAX,
            Some((c, m)) => {
                let mut n = if c.abs().is_one() { 0 } else { 1 };
                for i in 0..m.nvars() {
                    if m.get(i) != 0 {
                        n += 1;
                    }
                }
                n.max(1)
            }
        }
    }
}

/// Variable display order: spectral slots ascending, then `v`, then `q`.
fn fmt_mono(m: &Mono) -> String {
    let mut parts: Vec<String> = Vec::new();
    for i in 2..m.nvars() {
        let e = m.get(i);
        if e != 0 {
            parts.push(fmt_power(&format!("z{}", i - 1), e));
        }
    }
    let ev = m.get(VEXP);
    if ev != 0 {
        parts.push(fmt_power("v", ev));
    }
    let eq = m.get(QEXP);
    if eq != 0 {
        parts.push(fmt_power("q", eq));
    }
    parts.join("*")
}

fn fmt_power(name: &str, e: i32) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{}^{}", name, e)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_canonical())
    }
}

pub fn factorial(n: u32) -> BigInt {
    let mut out = BigInt::one();
    for i in 2..=n {
        out *= BigInt::from(i);
    }
    out
}

pub fn binomial(n: i64, k: u32) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(n - i);
    }
    num / factorial(k)
}

// ---------------------------------------------------------------------------
// GCD of z-free (two-variable) Laurent polynomials, for scalar reduction.
// Primitive polynomial remainder sequence over Z[v], main variable q.
// ---------------------------------------------------------------------------

type UPoly = Vec<BigInt>; // univariate in v, ascending exponents

fn u_is_zero(p: &UPoly) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn u_trim(p: &mut UPoly) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn u_content(p: &UPoly) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn u_scale(p: &UPoly, c: &BigInt) -> UPoly {
    p.iter().map(|x| x * c).collect()
}

fn u_div_exact(p: &UPoly, c: &BigInt) -> UPoly {
    p.iter().map(|x| x / c).collect()
}

fn u_mul(a: &UPoly, b: &UPoly) -> UPoly {
    if u_is_zero(a) || u_is_zero(b) {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    u_trim(&mut out);
    out
}

fn u_sub(a: &UPoly, b: &UPoly) -> UPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    u_trim(&mut out);
    out
}

/// Gcd in Z[v] via the primitive remainder sequence.
fn u_gcd(a: &UPoly, b: &UPoly) -> UPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    u_trim(&mut a);
    u_trim(&mut b);
    if u_is_zero(&a) {
        return u_make_canonical(b);
    }
    if u_is_zero(&b) {
        return u_make_canonical(a);
    }
    let ca = u_content(&a);
    let cb = u_content(&b);
    let cg = ca.gcd(&cb);
    a = u_div_exact(&a, &ca);
    b = u_div_exact(&b, &cb);
    while !u_is_zero(&b) {
        let r = u_prem(&a, &b);
        a = b;
        b = r;
        if !u_is_zero(&b) {
            let c = u_content(&b);
            b = u_div_exact(&b, &c);
        }
    }
    let mut g = u_scale(&a, &cg);
    if g.last().map_or(false, |c| c.is_negative()) {
        g = g.iter().map(|c| -c).collect();
    }
    g
}

fn u_make_canonical(mut p: UPoly) -> UPoly {
    u_trim(&mut p);
    if u_is_zero(&p) {
        return p;
    }
    if p.last().unwrap().is_negative() {
        p = p.iter().map(|c| -c).collect();
    }
    p
}

/// Pseudo-remainder of `a` by `b` in Z[v][q] collapsed to Z[v] (univariate).
fn u_prem(a: &UPoly, b: &UPoly) -> UPoly {
    let mut r = a.clone();
    u_trim(&mut r);
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    while !u_is_zero(&r) && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let lr = r.last().unwrap().clone();
        // lb * r - lr * q^{dr-db} * b
        let mut shifted = vec![BigInt::zero(); dr - db];
        shifted.extend(b.iter().cloned());
        r = u_sub(&u_scale(&r, &lb), &u_scale(&shifted, &lr));
    }
    r
}

type BPoly = Vec<UPoly>; // bivariate: coefficients in Z[v], ascending q exponents

fn b_trim(p: &mut BPoly) {
    while p.last().map_or(false, |c| u_is_zero(c)) {
        p.pop();
    }
}

fn b_is_zero(p: &BPoly) -> bool {
    p.iter().all(u_is_zero)
}

fn b_content(p: &BPoly) -> UPoly {
    let mut g: UPoly = Vec::new();
    for c in p {
        if !u_is_zero(c) {
            g = u_gcd(&g, c);
        }
    }
    g
}

fn b_div_upoly(p: &BPoly, d: &UPoly) -> BPoly {
    p.iter().map(|c| u_div_poly_exact(c, d)).collect()
}

/// Exact division in Z[v]; panics if not exact (callers guarantee it).
fn u_div_poly_exact(a: &UPoly, d: &UPoly) -> UPoly {
    if u_is_zero(a) {
        return Vec::new();
    }
    let mut r = a.clone();
    let dd = d.len() - 1;
    let ld = d.last().unwrap();
    let mut q = vec![BigInt::zero(); r.len() - d.len() + 1];
    while !u_is_zero(&r) {
        let dr = r.len() - 1;
        assert!(dr >= dd, "inexact division in Z[v]");
        let (c, rem) = r.last().unwrap().div_rem(ld);
        assert!(rem.is_zero(), "inexact division in Z[v]");
        q[dr - dd] = c.clone();
        let mut shifted = vec![BigInt::zero(); dr - dd];
        shifted.extend(d.iter().cloned());
        r = u_sub(&r, &u_scale(&shifted, &c));
    }
    u_trim(&mut q);
    q
}

fn b_mul_upoly(p: &BPoly, c: &UPoly) -> BPoly {
    p.iter().map(|x| u_mul(x, c)).collect()
}

fn b_sub(a: &BPoly, b: &BPoly) -> BPoly {
    let mut out: BPoly = vec![Vec::new(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = u_sub(&out[i], y);
    }
    b_trim(&mut out);
    out
}

fn b_prem(a: &BPoly, b: &BPoly) -> BPoly {
    let mut r = a.clone();
    b_trim(&mut r);
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    while !b_is_zero(&r) && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let lr = r.last().unwrap().clone();
        let mut shifted: BPoly = vec![Vec::new(); dr - db];
        shifted.extend(b.iter().cloned());
        r = b_sub(&b_mul_upoly(&r, &lb), &b_mul_upoly(&shifted, &lr));
    }
    r
}

fn mpoly_to_bpoly(p: &MPoly) -> BPoly {
    let mut out: BPoly = Vec::new();
    for (m, c) in p.iter() {
        let eq = m.get(QEXP) as usize;
        let ev = m.get(VEXP) as usize;
        if out.len() <= eq {
            out.resize(eq + 1, Vec::new());
        }
        if out[eq].len() <= ev {
            out[eq].resize(ev + 1, BigInt::zero());
        }
        out[eq][ev] += c;
    }
    for c in &mut out {
        u_trim(c);
    }
    b_trim(&mut out);
    out
}

fn bpoly_to_mpoly(p: &BPoly) -> MPoly {
    let mut out = MPoly::zero();
    for (eq, c) in p.iter().enumerate() {
        for (ev, x) in c.iter().enumerate() {
            out.add_term(Mono::qv(eq as i32, ev as i32), x.clone());
        }
    }
    out
}

/// Gcd of two z-free Laurent polynomials, up to a monomial unit.  The result
/// is an honest polynomial in `q, v` with nonnegative exponents, primitive
/// integer content aside from the shared one, and positive leading
/// coefficient.
pub fn gcd_qv(a: &MPoly, b: &MPoly) -> MPoly {
    assert!(a.is_z_free() && b.is_z_free(), "gcd_qv expects z-free inputs");
    let shift = |p: &MPoly| p.mul_mono(&p.min_exps().inv());
    let a = shift(a);
    let b = shift(b);
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    let mut pa = mpoly_to_bpoly(&a);
    let mut pb = mpoly_to_bpoly(&b);
    let ca = b_content(&pa);
    let cb = b_content(&pb);
    let cg = u_gcd(&ca, &cb);
    pa = b_div_upoly(&pa, &ca);
    pb = b_div_upoly(&pb, &cb);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    while !b_is_zero(&pb) {
        let r = b_prem(&pa, &pb);
        pa = pb;
        pb = r;
        if !b_is_zero(&pb) {
            let c = b_content(&pb);
            pb = b_div_upoly(&pb, &c);
        }
    }
    let mut g = bpoly_to_mpoly(&b_mul_upoly(&pa, &cg));
    g = g.mul_mono(&g.min_exps().inv());
    if let Some((_, c)) = g.leading() {
        if c.is_negative() {
            g = g.neg();
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> MPoly {
        MPoly::var(QEXP, 1)
    }

    fn z(i: usize) -> MPoly {
        MPoly::var(zslot(i), 1)
    }

    #[test]
    fn mono_order_ranks_spectral_degree_first() {
        let a = Mono::var(zslot(1), 1);
        let b = Mono::qv(5, 5);
        assert!(a > b);
        let c = Mono::var(zslot(2), 1);
        assert!(a > c);
    }

    #[test]
    fn exact_div_roundtrip() {
        let a = q().add(&z(1)).mul(&q().sub(&z(2).mul(&z(1))));
        let b = q().add(&z(1));
        assert_eq!(a.exact_div(&b), Some(q().sub(&z(2).mul(&z(1)))));
        assert_eq!(a.exact_div(&q().add(&z(2))), None);
    }

    #[test]
    fn exact_div_handles_laurent_shifts() {
        let d = MPoly::var(QEXP, -1).sub(&q());
        let n = d.mul(&d).mul(&MPoly::var(zslot(1), -2));
        let quot = n.exact_div(&d).unwrap();
        assert_eq!(quot, d.mul(&MPoly::var(zslot(1), -2)));
    }

    #[test]
    fn gcd_qv_finds_common_factor() {
        let f = q().mul(&q()).sub(&MPoly::one()); // q^2 - 1
        let g = q().sub(&MPoly::one()).mul(&q()); // q^2 - q
        let d = gcd_qv(&f, &g);
        assert_eq!(d, q().sub(&MPoly::one()));
    }

    #[test]
    fn display_orders_descending() {
        let p = MPoly::var(QEXP, 1)
            .mul(&MPoly::var(VEXP, 2))
            .sub(&MPoly::var(QEXP, -1).mul(&MPoly::var(VEXP, 2)));
        assert_eq!(p.fmt_canonical(), "v^2*q - v^2*q^-1");
    }
}
