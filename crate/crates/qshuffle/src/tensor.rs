//! Sparse matrix-valued rational functions.
//!
//! An element of spectral degree `k` over gl_n lives in
//! `End((C^n)^{tensor k})` with entries in `Q(q, v, z_1, ..., z_k)`: a sparse
//! map from (row multi-index, column multi-index) to a rational function.
//! Slot `a` of the tensor power owns the spectral variable `z_a`.

use crate::ring::{Mono, Rat};
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub type Idx = Vec<u8>;

/// Matrix-valued rational function on `k` tensor slots over gl_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatRat {
    n: usize,
    k: usize,
    entries: BTreeMap<(Idx, Idx), Rat>,
}

/// All multi-indices of length `k` with entries `1..=n`, in lexicographic
/// order.
pub fn all_indices(n: usize, k: usize) -> Vec<Idx> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * n);
        for base in &out {
            for c in 1..=n as u8 {
                let mut v = base.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl MatRat {
    pub fn zero(n: usize, k: usize) -> Self {
        MatRat { n, k, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize, k: usize) -> Self {
        let mut m = MatRat::zero(n, k);
        for idx in all_indices(n, k) {
            m.entries.insert((idx.clone(), idx), Rat::one());
        }
        m
    }

    /// Elementary matrix `E_{ij}` on a single slot.
    pub fn unit(n: usize, i: u8, j: u8) -> Self {
        let mut m = MatRat::zero(n, 1);
        m.set(vec![i], vec![j], Rat::one());
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: &Idx, col: &Idx) -> Rat {
        self.entries.get(&(row.clone(), col.clone())).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set(&mut self, row: Idx, col: Idx, value: Rat) {
        debug_assert_eq!(row.len(), self.k);
        debug_assert_eq!(col.len(), self.k);
        debug_assert!(row.iter().chain(col.iter()).all(|&c| 1 <= c && c as usize <= self.n));
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn add_to(&mut self, row: Idx, col: Idx, value: &Rat) {
        if value.is_zero() {
            return;
        }
        let key = (row, col);
        let cur = self.entries.get(&key);
        let new = match cur {
            Some(c) => c.add(value),
            None => value.clone(),
        };
        if new.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, new);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Idx, Idx), &Rat)> {
        self.entries.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn add(&self, other: &MatRat) -> MatRat {
        assert_eq!((self.n, self.k), (other.n, other.k), "shape mismatch");
        let mut out = self.clone();
        for ((r, c), v) in &other.entries {
            out.add_to(r.clone(), c.clone(), v);
        }
        out
    }

    pub fn sub(&self, other: &MatRat) -> MatRat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MatRat {
        MatRat {
            n: self.n,
            k: self.k,
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> MatRat {
        if c.is_zero() {
            return MatRat::zero(self.n, self.k);
        }
        MatRat {
            n: self.n,
            k: self.k,
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v.mul(c))).collect(),
        }
    }

    /// Matrix product (composition of operators on the same slots).
    pub fn compose(&self, other: &MatRat) -> MatRat {
        assert_eq!((self.n, self.k), (other.n, other.k), "shape mismatch");
        let mut by_row: BTreeMap<&Idx, Vec<(&Idx, &Rat)>> = BTreeMap::new();
        for ((r, c), v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = MatRat::zero(self.n, self.k);
        for ((r, m), a) in &self.entries {
            if let Some(cols) = by_row.get(m) {
                for (c, b) in cols {
                    out.add_to(r.clone(), (*c).clone(), &a.mul(b));
                }
            }
        }
        out
    }

    /// Apply a rational-function map to every entry.
    pub fn map_entries(&self, f: &dyn Fn(&Rat) -> Rat) -> MatRat {
        let mut out = MatRat::zero(self.n, self.k);
        for ((r, c), v) in &self.entries {
            out.add_to(r.clone(), c.clone(), &f(v));
        }
        out
    }

    /// Embed an operator on `slots.len()` slots into `total_k` slots, acting
    /// as identity elsewhere.  Slot `t` of `self` lands on slot `slots[t]`
    /// (1-based, distinct), and its spectral variable follows:
    /// `z_{t} -> z_{slots[t]}`.
    pub fn embed(&self, slots: &[usize], total_k: usize) -> MatRat {
        assert_eq!(slots.len(), self.k, "slot list must match operator arity");
        assert!(slots.iter().all(|&s| 1 <= s && s <= total_k));
        {
            let mut seen = vec![false; total_k + 1];
            for &s in slots {
                assert!(!seen[s], "repeated slot in embed");
                seen[s] = true;
            }
        }
        let passive: Vec<usize> =
            (1..=total_k).filter(|s| !slots.contains(s)).collect();
        let relabel = |i: usize| slots[i - 1];
        let mut out = MatRat::zero(self.n, total_k);
        for ((r, c), v) in &self.entries {
            let v2 = v.relabel_z(&relabel);
            for passive_idx in all_indices(self.n, passive.len()) {
                let mut row = vec![0u8; total_k];
                let mut col = vec![0u8; total_k];
                for (t, &s) in slots.iter().enumerate() {
                    row[s - 1] = r[t];
                    col[s - 1] = c[t];
                }
                for (t, &s) in passive.iter().enumerate() {
                    row[s - 1] = passive_idx[t];
                    col[s - 1] = passive_idx[t];
                }
                out.add_to(row, col, &v2);
            }
        }
        out
    }

    /// Conjugation by the permutation operator of `sigma` (1-based image
    /// list: slot `a` of the source is read off slot `sigma[a-1]`), combined
    /// with the matching relabeling of spectral variables:
    /// the result at (i, j) is the source entry at
    /// `((i_{sigma(1)}, ..., i_{sigma(k)}), (j_{sigma(1)}, ...))` with
    /// `z_a -> z_{sigma(a)}`.
    pub fn conjugate_by_permutation(&self, sigma: &[usize]) -> MatRat {
        assert_eq!(sigma.len(), self.k);
        let mut inv = vec![0usize; self.k];
        for (a, &s) in sigma.iter().enumerate() {
            inv[s - 1] = a + 1;
        }
        let relabel = |i: usize| sigma[i - 1];
        let mut out = MatRat::zero(self.n, self.k);
        for ((r, c), v) in &self.entries {
            let row: Idx = (0..self.k).map(|u| r[inv[u] - 1]).collect();
            let col: Idx = (0..self.k).map(|u| c[inv[u] - 1]).collect();
            out.add_to(row, col, &v.relabel_z(&relabel));
        }
        out
    }

    /// Swap row and column index on one slot (partial transpose).
    pub fn transpose_slot(&self, slot: usize) -> MatRat {
        assert!(1 <= slot && slot <= self.k);
        let mut out = MatRat::zero(self.n, self.k);
        for ((r, c), v) in &self.entries {
            let mut row = r.clone();
            let mut col = c.clone();
            std::mem::swap(&mut row[slot - 1], &mut col[slot - 1]);
            out.add_to(row, col, v);
        }
        out
    }

    pub fn trace(&self) -> Rat {
        let mut t = Rat::zero();
        for ((r, c), v) in &self.entries {
            if r == c {
                t = t.add(v);
            }
        }
        t
    }

    /// Tensor product: `self` keeps slots `1..=k1`, `other` moves to slots
    /// `k1+1..=k1+k2` with its spectral variables shifted accordingly.
    pub fn tensor_product(&self, other: &MatRat) -> MatRat {
        assert_eq!(self.n, other.n, "rank mismatch");
        let k1 = self.k;
        let shift = |i: usize| i + k1;
        let mut out = MatRat::zero(self.n, k1 + other.k);
        for ((r1, c1), v1) in &self.entries {
            for ((r2, c2), v2) in &other.entries {
                let mut row = r1.clone();
                row.extend_from_slice(r2);
                let mut col = c1.clone();
                col.extend_from_slice(c2);
                out.add_to(row, col, &v1.mul(&v2.relabel_z(&shift)));
            }
        }
        out
    }

    /// Substitute a spectral variable in every entry; errors when a pole is
    /// hit.
    pub fn subst_z(&self, i: usize, sign: i8, m: &Mono) -> Result<MatRat, crate::ring::RingError> {
        let mut out = MatRat::zero(self.n, self.k);
        for ((r, c), v) in &self.entries {
            out.add_to(r.clone(), c.clone(), &v.subst_z(i, sign, m)?);
        }
        Ok(out)
    }

    pub fn relabel_z(&self, map: &dyn Fn(usize) -> usize) -> MatRat {
        let mut out = MatRat::zero(self.n, self.k);
        for ((r, c), v) in &self.entries {
            out.add_to(r.clone(), c.clone(), &v.relabel_z(map));
        }
        out
    }

    /// Horizontal degree: for a single entry `f(z) E_{i_1 j_1} (x) ... `, the
    /// degree is `(deg_z f) * (1,...,1) + sum_a deg E_{i_a j_a}` where
    /// `deg E_{ij} = -[i; j)` counts unit vectors between the indices.
    /// Defined only when all entries agree.
    pub fn horizontal_degree(&self) -> Option<Vec<i64>> {
        let mut out: Option<Vec<i64>> = None;
        for ((r, c), v) in &self.entries {
            let f_deg = v.z_homogeneous_degree()?;
            let mut d = vec![f_deg; self.n];
            for a in 0..self.k {
                let e = e_degree(self.n, r[a], c[a]);
                for (x, y) in d.iter_mut().zip(e.iter()) {
                    *x += y;
                }
            }
            match &out {
                None => out = Some(d),
                Some(prev) => {
                    if *prev != d {
                        return None;
                    }
                }
            }
        }
        out
    }

    pub fn vertical_degree(&self) -> usize {
        self.k
    }

    /// Sum of the horizontal degree components.
    pub fn horizontal_degree_total(&self) -> Option<i64> {
        self.horizontal_degree().map(|d| d.iter().sum())
    }

    /// Canonical JSON: entries sorted by (row, column) multi-index, each as
    /// `[row, col, num, den]` with the two strings in canonical form.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|((r, c), v)| {
                let (num, den) = v.num_den_strings();
                json!([r, c, num, den])
            })
            .collect();
        json!({ "n": self.n, "k": self.k, "entries": entries })
    }
}

/// `deg E_{ij} = -[i; j)` where `[i; j) = sum_{a=i}^{j-1} e_{a mod n}` for
/// `i <= j` and `[i; j) = -[j; i)` otherwise (indices of `e` are residues
/// `1..=n`).
pub fn e_degree(n: usize, i: u8, j: u8) -> Vec<i64> {
    let v = interval_degree(n, i as i64, j as i64);
    v.into_iter().map(|x| -x).collect()
}

/// The vector `[i; j)` of the horizontal lattice for arbitrary integer
/// endpoints.
pub fn interval_degree(n: usize, i: i64, j: i64) -> Vec<i64> {
    let mut d = vec![0i64; n];
    if i <= j {
        for a in i..j {
            d[(a - 1).rem_euclid(n as i64) as usize] += 1;
        }
    } else {
        for a in j..i {
            d[(a - 1).rem_euclid(n as i64) as usize] -= 1;
        }
    }
    d
}

/// Build a one-slot diagonal operator from scalar entries `d_1, ..., d_n`.
pub fn diagonal(n: usize, diag: &[Rat]) -> MatRat {
    assert_eq!(diag.len(), n);
    let mut m = MatRat::zero(n, 1);
    for (i, d) in diag.iter().enumerate() {
        m.set(vec![i as u8 + 1], vec![i as u8 + 1], d.clone());
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{MPoly, Rat};

    fn z(i: usize) -> Rat {
        Rat::z(i)
    }

    #[test]
    fn embed_relabels_spectral_variables() {
        // One-slot operator with entry depending on z_1, embedded on slot 3
        // of a 3-slot space: the variable must become z_3.
        let mut a = MatRat::zero(2, 1);
        a.set(vec![1], vec![2], z(1));
        let e = a.embed(&[3], 3);
        // passive slots are diagonal
        assert_eq!(e.get(&vec![1, 1, 1], &vec![1, 1, 2]), z(3));
        assert_eq!(e.get(&vec![2, 1, 1], &vec![2, 1, 2]), z(3));
        assert_eq!(e.get(&vec![1, 1, 1], &vec![2, 1, 2]), Rat::zero());
    }

    #[test]
    fn conjugation_matches_two_slot_example() {
        // sigma = (1 2) on E_12 (x) E_21 * g(z_1, z_2) gives
        // E_21 (x) E_12 * g(z_2, z_1).
        let g = z(1).mul(&z(2).pow_i(2)); // g = z_1 z_2^2
        let mut x = MatRat::zero(2, 2);
        x.set(vec![1, 2], vec![2, 1], g);
        let y = x.conjugate_by_permutation(&[2, 1]);
        let expect = z(2).mul(&z(1).pow_i(2));
        assert_eq!(y.get(&vec![2, 1], &vec![1, 2]), expect);
        assert_eq!(y.num_entries(), 1);
    }

    #[test]
    fn compose_is_matrix_product() {
        let a = MatRat::unit(2, 1, 2);
        let b = MatRat::unit(2, 2, 1);
        let ab = a.compose(&b);
        assert_eq!(ab, MatRat::unit(2, 1, 1));
        let ba = b.compose(&a);
        assert_eq!(ba, MatRat::unit(2, 2, 2));
    }

    #[test]
    fn degree_of_z1_e11() {
        // z_1 E_11 at n = 2: horizontal degree (1, 1), vertical degree 1.
        let mut x = MatRat::zero(2, 1);
        x.set(vec![1], vec![1], z(1));
        assert_eq!(x.horizontal_degree(), Some(vec![1, 1]));
        assert_eq!(x.vertical_degree(), 1);
        assert_eq!(x.horizontal_degree_total(), Some(2));
    }

    #[test]
    fn degree_of_unit_matrices() {
        // deg E_12 = -[1;2) = -(1,0) at n = 2, so z_1-free E_12 has
        // horizontal degree (-1, 0).
        let x = MatRat::unit(2, 1, 2);
        assert_eq!(x.horizontal_degree(), Some(vec![-1, 0]));
        // E_21 = -[2;1) reversed: deg = +(1, 0).
        let y = MatRat::unit(2, 2, 1);
        assert_eq!(y.horizontal_degree(), Some(vec![1, 0]));
    }

    #[test]
    fn json_is_sorted_and_canonical() {
        let mut x = MatRat::zero(2, 1);
        x.set(vec![2], vec![1], Rat::q());
        x.set(
            vec![1],
            vec![2],
            Rat::frac(MPoly::one(), MPoly::var(crate::ring::zslot(1), 1).sub(&MPoly::one())),
        );
        let j = x.to_json();
        let s = j.to_string();
        assert!(
            s.contains("\"entries\":[[[1],[2],\"1\",\"z1 - 1\"],[[2],[1],\"q\",\"1\"]]"),
            "got {}",
            s
        );
    }
}
