//! Exact rational functions over the ground field Q(q, v) extended by the
//! spectral variables, kept as a fraction with a factored denominator.
//!
//! Denominators in this engine are products of small irreducible-ish pieces
//! (binomials such as `z_a - z_b*q^2`), and all pole analysis (residues,
//! expansion regimes) happens factor by factor, so the factored shape is kept
//! through arithmetic instead of expanding and refactoring.

use super::poly::{binomial, factorial, gcd_qv, zslot, MPoly, Mono};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes under substitution")]
    PoleAtSubstitution,
    #[error("unsupported pole shape: {0}")]
    UnsupportedPole(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Fraction `num / (den_c * prod_j f_j^{p_j})` with canonical invariants:
/// `den_c > 0`; every factor is monomial-free, integer-content-free, has a
/// positive leading coefficient and is not itself a monomial; factors are
/// sorted and merged; the numerator shares no integer content with `den_c`.
#[derive(Clone, Debug)]
pub struct Rat {
    num: MPoly,
    den_c: BigInt,
    den_f: Vec<(MPoly, u32)>,
}

impl Rat {
    pub fn zero() -> Self {
        Rat { num: MPoly::zero(), den_c: BigInt::one(), den_f: Vec::new() }
    }

    pub fn one() -> Self {
        Rat::from_mpoly(MPoly::one())
    }

    pub fn from_int(c: i64) -> Self {
        Rat::from_mpoly(MPoly::constant(c))
    }

    pub fn from_bigint(c: BigInt) -> Self {
        Rat::from_mpoly(MPoly::from_bigint(c))
    }

    pub fn from_mpoly(num: MPoly) -> Self {
        Rat { num, den_c: BigInt::one(), den_f: Vec::new() }
    }

    /// `c * m` for a signed unit coefficient and a Laurent monomial.
    pub fn signed_mono(sign: i8, m: Mono) -> Self {
        let c = if sign < 0 { -BigInt::one() } else { BigInt::one() };
        Rat::from_mpoly(MPoly::term(c, m))
    }

    pub fn q() -> Self {
        Rat::from_mpoly(MPoly::var(super::poly::QEXP, 1))
    }

    pub fn v() -> Self {
        Rat::from_mpoly(MPoly::var(super::poly::VEXP, 1))
    }

    pub fn z(i: usize) -> Self {
        Rat::from_mpoly(MPoly::var(zslot(i), 1))
    }

    /// Monomial `q^a * v^b`.
    pub fn qv(a: i32, b: i32) -> Self {
        Rat::from_mpoly(MPoly::mono(Mono::qv(a, b)))
    }

    pub fn frac(num: MPoly, den: MPoly) -> Self {
        Rat::normalize(num, BigInt::one(), vec![(den, 1)])
    }

    pub fn with_den_factors(num: MPoly, dens: Vec<MPoly>) -> Self {
        Rat::normalize(num, BigInt::one(), dens.into_iter().map(|f| (f, 1)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den_c.is_one() && self.den_f.is_empty() && self.num.is_one()
    }

    pub fn numerator(&self) -> &MPoly {
        &self.num
    }

    pub fn den_factors(&self) -> &[(MPoly, u32)] {
        &self.den_f
    }

    pub fn den_constant(&self) -> &BigInt {
        &self.den_c
    }

    pub fn den_expanded(&self) -> MPoly {
        let mut d = MPoly::from_bigint(self.den_c.clone());
        for (f, p) in &self.den_f {
            d = d.mul(&f.pow(*p));
        }
        d
    }

    pub fn is_z_free(&self) -> bool {
        self.num.is_z_free() && self.den_f.iter().all(|(f, _)| f.is_z_free())
    }

    fn normalize(num: MPoly, den_c: BigInt, den_f: Vec<(MPoly, u32)>) -> Self {
        assert!(!den_c.is_zero(), "zero denominator");
        let mut num = num;
        let mut den_c = den_c;
        if den_c.is_negative() {
            den_c = -den_c;
            num = num.neg();
        }
        let mut mono_adjust = Mono::one();
        let mut factors: Vec<(MPoly, u32)> = Vec::new();
        for (f, p) in den_f {
            if p == 0 {
                continue;
            }
            assert!(!f.is_zero(), "zero denominator factor");
            let mut f = f;
            let m = f.min_exps();
            if !m.is_one() {
                f = f.mul_mono(&m.inv());
                mono_adjust = mono_adjust.mul(&m.pow(-(p as i32)));
            }
            let c = f.content();
            if !c.is_one() {
                f = f.divide_content(&c);
                den_c *= c.pow(p);
            }
            if f.leading().unwrap().1.is_negative() {
                f = f.neg();
                if p % 2 == 1 {
                    num = num.neg();
                }
            }
            if f.is_one() {
                continue;
            }
            factors.push((f, p));
        }
        if !mono_adjust.is_one() {
            num = num.mul_mono(&mono_adjust);
        }
        if num.is_zero() {
            return Rat::zero();
        }
        factors.sort();
        let mut merged: Vec<(MPoly, u32)> = Vec::new();
        for (f, p) in factors {
            if let Some(last) = merged.last_mut() {
                if last.0 == f {
                    last.1 += p;
                    continue;
                }
            }
            merged.push((f, p));
        }
        let mut out_f: Vec<(MPoly, u32)> = Vec::new();
        for (f, mut p) in merged {
            while p > 0 {
                match num.exact_div(&f) {
                    Some(q) => {
                        num = q;
                        p -= 1;
                    }
                    None => break,
                }
            }
            if p > 0 {
                out_f.push((f, p));
            }
        }
        let g = num.content().gcd(&den_c);
        if !g.is_one() {
            num = num.divide_content(&g);
            den_c /= &g;
        }
        // Scalars (no spectral variables anywhere) reduce fully by gcd.
        if !out_f.is_empty() && num.is_z_free() && out_f.iter().all(|(f, _)| f.is_z_free()) {
            let mut den = MPoly::from_bigint(den_c.clone());
            for (f, p) in &out_f {
                den = den.mul(&f.pow(*p));
            }
            let g = gcd_qv(&num, &den);
            if !g.is_one() {
                let num2 = num.exact_div(&g).expect("gcd divides numerator");
                let den2 = den.exact_div(&g).expect("gcd divides denominator");
                return Rat::normalize(num2, BigInt::one(), vec![(den2, 1)]);
            }
        }
        Rat { num, den_c, den_f: out_f }
    }

    pub fn add(&self, other: &Rat) -> Rat {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // Least common denominator over the factored forms.
        let mut union: Vec<(MPoly, u32)> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.den_f.len() || j < other.den_f.len() {
            let pick_left = match (self.den_f.get(i), other.den_f.get(j)) {
                (Some(a), Some(b)) => {
                    if a.0 == b.0 {
                        union.push((a.0.clone(), a.1.max(b.1)));
                        i += 1;
                        j += 1;
                        continue;
                    }
                    a.0 < b.0
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            if pick_left {
                union.push(self.den_f[i].clone());
                i += 1;
            } else {
                union.push(other.den_f[j].clone());
                j += 1;
            }
        }
        let gc = self.den_c.gcd(&other.den_c);
        let lc = &self.den_c / &gc * &other.den_c;
        let cof = |r: &Rat| -> MPoly {
            let mut m = MPoly::from_bigint(&lc / &r.den_c);
            for (f, p) in &union {
                let have = r
                    .den_f
                    .iter()
                    .find(|(g, _)| g == f)
                    .map(|(_, q)| *q)
                    .unwrap_or(0);
                if *p > have {
                    m = m.mul(&f.pow(p - have));
                }
            }
            m
        };
        let num = self.num.mul(&cof(self)).add(&other.num.mul(&cof(other)));
        Rat::normalize(num, lc, union)
    }

    pub fn sub(&self, other: &Rat) -> Rat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Rat {
        Rat { num: self.num.neg(), den_c: self.den_c.clone(), den_f: self.den_f.clone() }
    }

    pub fn mul(&self, other: &Rat) -> Rat {
        if self.is_zero() || other.is_zero() {
            return Rat::zero();
        }
        let mut dens = self.den_f.clone();
        dens.extend(other.den_f.iter().cloned());
        Rat::normalize(self.num.mul(&other.num), &self.den_c * &other.den_c, dens)
    }

    pub fn scale_int(&self, c: i64) -> Rat {
        self.mul(&Rat::from_int(c))
    }

    pub fn mul_mono(&self, m: &Mono) -> Rat {
        Rat::normalize(self.num.mul_mono(m), self.den_c.clone(), self.den_f.clone())
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        let mut num = MPoly::from_bigint(self.den_c.clone());
        for (f, p) in &self.den_f {
            num = num.mul(&f.pow(*p));
        }
        Rat::normalize(num, BigInt::one(), vec![(self.num.clone(), 1)])
    }

    pub fn div(&self, other: &Rat) -> Rat {
        self.mul(&other.recip())
    }

    pub fn pow_i(&self, e: i32) -> Rat {
        if e < 0 {
            return self.recip().pow_i(-e);
        }
        let mut out = Rat::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Substitute `x_idx -> sign * m`; errors when a denominator factor
    /// vanishes identically under the substitution.
    pub fn subst_var(&self, idx: usize, sign: i8, m: &Mono) -> Result<Rat, RingError> {
        let num = self.num.subst_var(idx, sign, m);
        let mut dens = Vec::with_capacity(self.den_f.len());
        for (f, p) in &self.den_f {
            let f2 = f.subst_var(idx, sign, m);
            if f2.is_zero() {
                return Err(RingError::PoleAtSubstitution);
            }
            dens.push((f2, *p));
        }
        Ok(Rat::normalize(num, self.den_c.clone(), dens))
    }

    /// Substitute the spectral variable `z_i -> sign * m`.
    pub fn subst_z(&self, i: usize, sign: i8, m: &Mono) -> Result<Rat, RingError> {
        self.subst_var(zslot(i), sign, m)
    }

    pub fn relabel_z(&self, map: &dyn Fn(usize) -> usize) -> Rat {
        Rat::normalize(
            self.num.relabel_z(map),
            self.den_c.clone(),
            self.den_f.iter().map(|(f, p)| (f.relabel_z(map), *p)).collect(),
        )
    }

    pub fn derivative(&self, idx: usize) -> Rat {
        if self.den_f.is_empty() {
            return Rat::normalize(self.num.derivative(idx), self.den_c.clone(), Vec::new());
        }
        // (n / prod f^p)' = [n' prod f - n sum_j p_j f_j' prod_{l != j} f_l]
        //                   / prod f^{p+1}
        let mut prod_all = MPoly::one();
        for (f, _) in &self.den_f {
            prod_all = prod_all.mul(f);
        }
        let mut num = self.num.derivative(idx).mul(&prod_all);
        for (j, (fj, pj)) in self.den_f.iter().enumerate() {
            let mut rest = MPoly::one();
            for (l, (fl, _)) in self.den_f.iter().enumerate() {
                if l != j {
                    rest = rest.mul(fl);
                }
            }
            let term = self
                .num
                .mul(&fj.derivative(idx))
                .mul(&rest)
                .scale(&BigInt::from(*pj));
            num = num.sub(&term);
        }
        let dens = self.den_f.iter().map(|(f, p)| (f.clone(), p + 1)).collect();
        Rat::normalize(num, self.den_c.clone(), dens)
    }

    /// Classical residue at `z_idx = sign * point` (zero when there is no
    /// pole there).  Requires every vanishing denominator factor to be linear
    /// in the variable.
    pub fn residue_classical(
        &self,
        idx: usize,
        sign: i8,
        point: &Mono,
    ) -> Result<Rat, RingError> {
        let mut vanishing: Vec<(MPoly, u32)> = Vec::new();
        let mut kept: Vec<(MPoly, u32)> = Vec::new();
        for (f, p) in &self.den_f {
            let involves = f.var_span(idx).map_or(false, |(lo, hi)| lo != 0 || hi != 0);
            if involves && f.subst_var(idx, sign, point).is_zero() {
                let (lo, hi) = f.var_span(idx).unwrap();
                if lo != 0 || hi != 1 {
                    return Err(RingError::UnsupportedPole(format!(
                        "factor {} is not linear in the residue variable",
                        f
                    )));
                }
                vanishing.push((f.clone(), *p));
            } else {
                kept.push((f.clone(), *p));
            }
        }
        if vanishing.is_empty() {
            return Ok(Rat::zero());
        }
        let order: u32 = vanishing.iter().map(|(_, p)| p).sum();
        // Each vanishing factor is A*(z - point) with A free of z, so
        // multiplying by (z - point)^order replaces those factors by A^p.
        for (f, p) in &vanishing {
            let a = f
                .slices_by_var(idx)
                .remove(&1)
                .expect("linear factor has a degree-one slice");
            kept.push((a, *p));
        }
        let mut h = Rat::normalize(self.num.clone(), self.den_c.clone(), kept);
        for _ in 1..order {
            h = h.derivative(idx);
        }
        let value = h.subst_var(idx, sign, point)?;
        Ok(value.div(&Rat::from_bigint(factorial(order - 1))))
    }

    /// Residue normalized so that `1/(point - z)` has residue `+1` at the
    /// point, i.e. the negative of the classical residue.
    pub fn residue_at(&self, idx: usize, sign: i8, point: &Mono) -> Result<Rat, RingError> {
        Ok(self.residue_classical(idx, sign, point)?.neg())
    }

    /// Laurent expansion data in the regime where the listed spectral
    /// variables are simultaneously small: scaling `z_i -> t*z_i` for `i` in
    /// `small` gives a Laurent series in `t`, and this returns the orders
    /// `t0 .. t0 + depth` with their exact coefficients (`t0` is the true
    /// leading order; zero is returned as the empty list).  Coefficients
    /// retain the original variables.
    pub fn laurent_leading(&self, small: &[usize], depth: usize) -> Vec<(i64, Rat)> {
        if self.is_zero() {
            return Vec::new();
        }
        let num_blocks = self.num.slices_by_t_order(small);
        let num_lead = *num_blocks.keys().next().unwrap();
        let mut series = TruncSeries {
            lead: num_lead,
            coeffs: {
                let mut v: Vec<Rat> = vec![Rat::zero(); depth + 1];
                let inv_c = Rat::from_mpoly(MPoly::one())
                    .mul(&Rat::normalize(MPoly::one(), self.den_c.clone(), Vec::new()));
                for (o, block) in &num_blocks {
                    let rel = (o - num_lead) as usize;
                    if rel <= depth {
                        v[rel] = Rat::from_mpoly(block.clone()).mul(&inv_c);
                    }
                }
                v
            },
        };
        for (f, p) in &self.den_f {
            let inv = factor_inverse_series(f, *p, small, depth);
            series = series.mul(&inv, depth);
        }
        series
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (series.lead + i as i64, c.clone()))
            .collect()
    }

    /// Coefficient of `z_idx^e` when expanding in the regime where that
    /// spectral variable is small compared to everything else (poles are
    /// treated as lying outside the small circle).
    pub fn coeff_at_zero(&self, zi: usize, e: i32) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        let small = [zi];
        let num_lead = *self.num.slices_by_t_order(&small).keys().next().unwrap();
        let mut lead = num_lead;
        for (f, p) in &self.den_f {
            let o = *f.slices_by_t_order(&small).keys().next().unwrap();
            lead -= o * (*p as i64);
        }
        if (e as i64) < lead {
            return Rat::zero();
        }
        let depth = (e as i64 - lead) as usize;
        let list = self.laurent_leading(&small, depth);
        let coeff = &list[depth].1;
        debug_assert_eq!(list[depth].0, e as i64);
        // The t-order-e coefficient carries z^e; strip it.
        let stripped = coeff.mul_mono(&Mono::var(zslot(zi), -e));
        debug_assert!(
            stripped.num.var_span(zslot(zi)).map_or(true, |(lo, hi)| lo == 0 && hi == 0)
                && stripped
                    .den_f
                    .iter()
                    .all(|(f, _)| f.var_span(zslot(zi)).map_or(true, |(l, h)| l == 0 && h == 0)),
            "coefficient extraction left the expansion variable behind"
        );
        stripped
    }

    pub fn num_den_strings(&self) -> (String, String) {
        (self.num.fmt_canonical(), self.den_expanded().fmt_canonical())
    }

    /// Total spectral degree when the function is homogeneous in the
    /// spectral variables jointly; `None` otherwise.
    pub fn z_homogeneous_degree(&self) -> Option<i64> {
        if self.is_zero() {
            return Some(0);
        }
        let mut d = self.num.z_homogeneous_degree()?;
        for (f, p) in &self.den_f {
            d -= f.z_homogeneous_degree()? * (*p as i64);
        }
        Some(d)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        if self.den_c == other.den_c && self.den_f == other.den_f {
            return self.num == other.num;
        }
        self.num.mul(&other.den_expanded()) == other.num.mul(&self.den_expanded())
    }
}

impl Eq for Rat {}

struct TruncSeries {
    lead: i64,
    coeffs: Vec<Rat>,
}

impl TruncSeries {
    fn mul(&self, other: &TruncSeries, depth: usize) -> TruncSeries {
        let mut coeffs = vec![Rat::zero(); depth + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > depth {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        TruncSeries { lead: self.lead + other.lead, coeffs }
    }
}

/// Truncated series of `f^{-pow}` in the scaling regime.  The lowest t-block
/// of `f` stays in coefficient denominators; higher blocks feed a geometric
/// expansion.
fn factor_inverse_series(f: &MPoly, pow: u32, small: &[usize], depth: usize) -> TruncSeries {
    let blocks = f.slices_by_t_order(small);
    let o0 = *blocks.keys().next().unwrap();
    let f_low = blocks.get(&o0).unwrap().clone();
    // u = sum_{d>0} t^d * block_{o0+d} / f_low;  f^{-pow} =
    // t^{-o0*pow} f_low^{-pow} (1+u)^{-pow} expanded by binomials.
    let mut u_coeffs: Vec<Rat> = vec![Rat::zero(); depth + 1];
    for (o, b) in &blocks {
        let d = (o - o0) as usize;
        if d > 0 && d <= depth {
            u_coeffs[d] = Rat::frac(b.clone(), f_low.clone());
        }
    }
    let u = TruncSeries { lead: 0, coeffs: u_coeffs };
    let mut total = TruncSeries {
        lead: -(o0 * pow as i64),
        coeffs: {
            let mut v = vec![Rat::zero(); depth + 1];
            v[0] = Rat::with_den_factors(MPoly::one(), vec![f_low.clone(); pow as usize]);
            v
        },
    };
    // (1+u)^{-pow} = sum_s binom(-pow, s) u^s
    let mut u_pow = TruncSeries { lead: 0, coeffs: { let mut v = vec![Rat::zero(); depth + 1]; v[0] = Rat::one(); v } };
    let mut acc = TruncSeries { lead: 0, coeffs: vec![Rat::zero(); depth + 1] };
    acc.coeffs[0] = Rat::one();
    for s in 1..=depth {
        u_pow = u_pow.mul(&u, depth);
        let c = Rat::from_bigint(binomial(-(pow as i64), s as u32));
        for (k, x) in u_pow.coeffs.iter().enumerate() {
            if !x.is_zero() {
                acc.coeffs[k] = acc.coeffs[k].add(&c.mul(x));
            }
        }
    }
    total = total.mul(&acc, depth);
    total
}

// ---------------------------------------------------------------------------
// Canonical display and parsing.
// ---------------------------------------------------------------------------

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_c.is_one() && self.den_f.is_empty() {
            return f.write_str(&self.num.fmt_canonical());
        }
        let num_s = self.num.fmt_canonical();
        if self.num.num_terms() > 1 {
            write!(f, "({})", num_s)?;
        } else {
            f.write_str(&num_s)?;
        }
        let den = self.den_expanded();
        let den_s = den.fmt_canonical();
        if den.num_terms() > 1 || den.display_factor_count() > 1 {
            write!(f, "/({})", den_s)
        } else {
            write!(f, "/{}", den_s)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Pow,
    Mul,
    Div,
    Plus,
    Minus,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>, RingError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '^' => {
                out.push(Tok::Pow);
                i += 1;
            }
            '*' => {
                out.push(Tok::Mul);
                i += 1;
            }
            '/' => {
                out.push(Tok::Div);
                i += 1;
            }
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                out.push(Tok::Int(text.parse::<BigInt>().map_err(|e| {
                    RingError::Parse(format!("bad integer {}: {}", text, e))
                })?));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                i += 1;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                out.push(Tok::Ident(bytes[start..i].iter().collect()));
            }
            other => {
                return Err(RingError::Parse(format!("unexpected character {:?}", other)));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Rat, RingError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Rat, RingError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Mul) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Div) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(RingError::Parse("division by zero".into()));
                    }
                    acc = acc.div(&d);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Rat, RingError> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.atom_pow()
    }

    fn atom_pow(&mut self) -> Result<Rat, RingError> {
        let base = self.atom()?;
        if let Some(Tok::Pow) = self.peek() {
            self.pos += 1;
            let mut neg = false;
            if let Some(Tok::Minus) = self.peek() {
                neg = true;
                self.pos += 1;
            }
            match self.next() {
                Some(Tok::Int(n)) => {
                    let e: i32 = n
                        .to_string()
                        .parse()
                        .map_err(|_| RingError::Parse("exponent out of range".into()))?;
                    let e = if neg { -e } else { e };
                    if base.is_zero() && e < 0 {
                        return Err(RingError::Parse("zero to a negative power".into()));
                    }
                    Ok(base.pow_i(e))
                }
                other => Err(RingError::Parse(format!("expected integer exponent, got {:?}", other))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Rat, RingError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(Rat::from_bigint(n)),
            Some(Tok::Ident(name)) => match name.as_str() {
                "q" => Ok(Rat::q()),
                "v" => Ok(Rat::v()),
                _ => {
                    if let Some(rest) = name.strip_prefix('z') {
                        if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                            let i: usize = rest
                                .parse()
                                .map_err(|_| RingError::Parse(format!("bad variable {}", name)))?;
                            if i == 0 {
                                return Err(RingError::Parse("spectral variables are 1-based".into()));
                            }
                            return Ok(Rat::z(i));
                        }
                    }
                    Err(RingError::Parse(format!("unknown variable {}", name)))
                }
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(RingError::Parse("missing closing parenthesis".into())),
                }
            }
            other => Err(RingError::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

impl Rat {
    pub fn parse(s: &str) -> Result<Rat, RingError> {
        let toks = lex(s)?;
        let mut p = Parser { toks, pos: 0 };
        let r = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(RingError::Parse(format!(
                "trailing input at token {}",
                p.pos
            )));
        }
        Ok(r)
    }
}

/// Convenience: exact rational scalars as map from (q exp, v exp) keys is not
/// needed; tests compare whole `Rat` values.  This helper builds `a/b` for
/// integer literals.
pub fn ratio(a: i64, b: i64) -> Rat {
    Rat::from_int(a).div(&Rat::from_int(b))
}

/// Group the numerator terms of a rational function by their monomial in the
/// given spectral variables being absent or present; used by callers that
/// need term-by-term splits.  Exposed for the coproduct machinery.
pub fn split_num_terms(r: &Rat) -> Vec<(Mono, BigInt)> {
    r.numerator().iter().map(|(m, c)| (m.clone(), c.clone())).collect()
}

#[allow(unused_imports)]
pub(crate) use super::poly::{QEXP, VEXP};

#[cfg(test)]
mod tests {
    use super::*;

    fn z(i: usize) -> Rat {
        Rat::z(i)
    }

    #[test]
    fn display_matches_reference_format() {
        // An irreducible fraction exercising every grammar feature:
        // parenthesized multi-term sides, `*` between coefficient pieces,
        // `^-1` exponents, v before q inside a term.
        let num = Rat::q().mul(&Rat::q()).sub(&Rat::one());
        let den = Rat::qv(1, 2).sub(&Rat::qv(-1, 0));
        let r = num.div(&den);
        // Denominators are normalized monomial-free, so the q^{-1} moves out.
        assert_eq!(r.to_string(), "(q^3 - q)/(v^2*q^2 - 1)");
        // A reducible fraction in the same shape collapses: the denominator
        // v^2 q - v^2 q^{-1} is v^2 q^{-1} (q^2 - 1).
        let reducible = Rat::parse("(q^2 - 1)/(v^2*q - v^2*q^-1)").unwrap();
        assert_eq!(reducible, Rat::qv(1, -2));
        assert_eq!(reducible.to_string(), "v^-2*q");
    }

    #[test]
    fn parse_roundtrip() {
        let samples = [
            "(q^3 - q)/(v^2*q^2 - 1)",
            "0",
            "1",
            "-q^2",
            "z1*z2^-3*v",
            "(z1 - z2*q^2)/(z1 - z2)",
            "(2*z1*q^-1 + 3*q^-1)/7",
        ];
        for s in samples {
            let r = Rat::parse(s).unwrap();
            assert_eq!(r.to_string(), s, "canonical form should round-trip");
        }
    }

    #[test]
    fn residue_sign_convention() {
        // 1/(a - z) with a = q^2: residue +1 at z = q^2.
        let den = Rat::qv(2, 0).sub(&z(1));
        let g = den.recip();
        let res = g.residue_at(zslot(1), 1, &Mono::qv(2, 0)).unwrap();
        assert_eq!(res, Rat::one());
        // and the classical residue of the same function is -1.
        let res_c = g.residue_classical(zslot(1), 1, &Mono::qv(2, 0)).unwrap();
        assert_eq!(res_c, Rat::from_int(-1));
    }

    #[test]
    fn residue_vanishes_without_pole() {
        let g = Rat::frac(
            MPoly::one(),
            MPoly::var(zslot(1), 1).sub(&MPoly::var(zslot(2), 1)),
        );
        let res = g.residue_at(zslot(1), 1, &Mono::var(zslot(2), 1).mul(&Mono::qv(2, 0))).unwrap();
        assert!(res.is_zero());
    }

    #[test]
    fn higher_order_residue() {
        // z/(z - a)^2 has classical residue 1 at z = a (double pole).
        let a = Mono::qv(2, 0);
        let den = MPoly::var(zslot(1), 1).sub(&MPoly::mono(a.clone()));
        let g = Rat::normalize(MPoly::var(zslot(1), 1), BigInt::one(), vec![(den, 2)]);
        let res = g.residue_classical(zslot(1), 1, &a).unwrap();
        assert_eq!(res, Rat::one());
    }

    #[test]
    fn laurent_leading_examples() {
        // monomial z1/z2 in the regime z1 small
        let g = z(1).div(&z(2));
        let lead = g.laurent_leading(&[1], 0);
        assert_eq!(lead, vec![(1, z(1).div(&z(2)))]);
        // 1/(1 - z1/z2) = z2/(z2 - z1): orders 0..2
        let g = z(2).div(&z(2).sub(&z(1)));
        let lead = g.laurent_leading(&[1], 2);
        assert_eq!(
            lead,
            vec![
                (0, Rat::one()),
                (1, z(1).div(&z(2))),
                (2, z(1).mul(&z(1)).div(&z(2).mul(&z(2)))),
            ]
        );
    }

    #[test]
    fn coeff_at_zero_constant_and_inverse_power() {
        // g = z2/(z2 - z1) + 5/z1: constant term 1, z^{-1} coefficient 5.
        let g = z(2).div(&z(2).sub(&z(1))).add(&Rat::from_int(5).div(&z(1)));
        assert_eq!(g.coeff_at_zero(1, 0), Rat::one());
        assert_eq!(g.coeff_at_zero(1, -1), Rat::from_int(5));
        // poles are outside the small circle: 1/(z1 - z2) picks -1/z2 at e=0
        let h = Rat::one().div(&z(1).sub(&z(2)));
        assert_eq!(h.coeff_at_zero(1, 0), Rat::from_int(-1).div(&z(2)));
    }

    #[test]
    fn subst_detects_pole() {
        let g = Rat::one().div(&z(1).sub(&z(2)));
        let err = g.subst_z(1, 1, &Mono::var(zslot(2), 1));
        assert_eq!(err, Err(RingError::PoleAtSubstitution));
    }

    #[test]
    fn scalar_reduction_is_full() {
        // (q^2 - 1)/(q - 1) reduces to q + 1.
        let num = Rat::qv(2, 0).sub(&Rat::one());
        let den = Rat::q().sub(&Rat::one());
        let r = num.div(&den);
        assert_eq!(r, Rat::q().add(&Rat::one()));
        assert!(r.den_factors().is_empty());
    }
}
