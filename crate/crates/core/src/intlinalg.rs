//! Exact integer linear algebra: Smith and Hermite normal forms, finitely
//! generated abelian groups, and lattices in `ℤⁿ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<BigInt>>) -> Self {
        assert_eq!(entries.len(), rows, "row count");
        let mut data = Vec::with_capacity(rows * cols);
        for r in entries {
            assert_eq!(r.len(), cols, "column count");
            data.extend(r);
        }
        IntMatrix { rows, cols, data }
    }

    pub fn from_rows_i64(rows: usize, cols: usize, entries: &[Vec<i64>]) -> Self {
        let big = entries.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntMatrix::from_rows(rows, cols, big)
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = IntMatrix::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(i, j);
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn kronecker(&self, other: &IntMatrix) -> IntMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = IntMatrix::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant of a square matrix by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * q;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * q;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = v;
        }
    }

    /// Smith normal form: unimodular `U`, `V` with `U·M·V = D`, `D` diagonal,
    /// nonnegative, each diagonal entry dividing the next.
    pub fn smith_normal_form(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        let mut d = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let (m, n) = (self.rows, self.cols);
        let mut t = 0;
        while t < m.min(n) {
            // smallest nonzero |entry| in the trailing block, ties row-major
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let e = d.get(i, j);
                    if !e.is_zero() && pivot.is_none_or(|(pi, pj)| e.abs() < d.get(pi, pj).abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(d.get(t, t));
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(d.get(t, t));
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into row t and redo
            let p = d.get(t, t).clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            if let Some(i) = bad {
                let one = BigInt::one();
                d.add_row(t, i, &one);
                u.add_row(t, i, &one);
                continue;
            }
            if d.get(t, t).is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            t += 1;
        }
        (u, d, v)
    }

    /// Diagonal of the Smith form, length `min(rows, cols)`.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        let (_, d, _) = self.smith_normal_form();
        (0..self.rows.min(self.cols)).map(|i| d.get(i, i).clone()).collect()
    }

    /// `ℤ^cols / rowspace(M)`.
    pub fn cokernel(&self) -> FinAbGroup {
        let divs = self.elementary_divisors();
        let mut factors = Vec::new();
        let mut free = self.cols - divs.len();
        for d in divs {
            if d.is_zero() {
                free += 1;
            } else if !d.is_one() {
                factors.push(d);
            }
        }
        FinAbGroup { invariant_factors: factors, free_rank: free }
    }

    /// Row Hermite normal form with zero rows dropped.
    pub fn hermite_rows(&self) -> Vec<Vec<BigInt>> {
        hermite(self.to_rows(), self.cols)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", r.join(", "))?;
        }
        write!(f, "]")
    }
}

fn hermite(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                if !rows[i][c].is_zero() && best.is_none_or(|b| rows[i][c].abs() < rows[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * p;
                }
                done &= rows[i][c].is_zero();
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            for i in 0..r {
                let q = rows[i][c].div_floor(&rows[r][c]);
                if q.is_zero() {
                    continue;
                }
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * p;
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

/// A finitely generated abelian group `ℤ^free_rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_t`,
/// `dᵢ ≥ 2`, `dᵢ | dᵢ₊₁`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup { invariant_factors: vec![], free_rank: 0 }
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup { invariant_factors: vec![], free_rank: rank }
    }

    /// Direct sum of cyclic groups of the given orders (`0` meaning `ℤ`).
    pub fn from_cyclic<I: IntoIterator<Item = BigInt>>(orders: I) -> Self {
        let diag: Vec<BigInt> = orders.into_iter().map(|x| x.abs()).collect();
        IntMatrix::diagonal(&diag).cokernel()
    }

    pub fn cyclic(n: u64) -> Self {
        FinAbGroup::from_cyclic([BigInt::from(n)])
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.invariant_factors.iter().product())
    }

    pub fn exponent(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one))
    }

    /// Cyclic orders listed as `[0; free_rank] ++ invariant_factors`.
    pub fn cyclic_orders(&self) -> Vec<BigInt> {
        std::iter::repeat_n(BigInt::zero(), self.free_rank).chain(self.invariant_factors.iter().cloned()).collect()
    }

    pub fn direct_sum(&self, other: &FinAbGroup) -> FinAbGroup {
        FinAbGroup::from_cyclic(self.cyclic_orders().into_iter().chain(other.cyclic_orders()))
    }

    pub fn tensor(&self, other: &FinAbGroup) -> FinAbGroup {
        let mut parts = Vec::new();
        for a in self.cyclic_orders() {
            for b in other.cyclic_orders() {
                // gcd(0, n) = n covers ℤ ⊗ ℤ/n and ℤ ⊗ ℤ
                parts.push(a.gcd(&b));
            }
        }
        FinAbGroup::from_cyclic(parts)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" x "))
    }
}

/// Homomorphism between abelian groups given on the canonical generators
/// (free generators first, then one per invariant factor). Row `i` of the
/// matrix is the image of source generator `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbHom {
    pub source: FinAbGroup,
    pub target: FinAbGroup,
    pub matrix: IntMatrix,
}

impl AbHom {
    pub fn new(source: FinAbGroup, target: FinAbGroup, matrix: IntMatrix) -> Result<Self> {
        let (sn, tn) = (source.cyclic_orders(), target.cyclic_orders());
        if matrix.rows() != sn.len() || matrix.cols() != tn.len() {
            return Err(Error::NotHomomorphism(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                sn.len(),
                tn.len()
            )));
        }
        let h = AbHom { source, target, matrix };
        for (i, n) in sn.iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            let img: Vec<BigInt> = h.matrix.row(i).iter().map(|x| x * n).collect();
            if !h.target_is_zero(&img) {
                return Err(Error::NotHomomorphism(format!("generator {i} of order {n} has image of larger order")));
            }
        }
        Ok(h)
    }

    fn target_is_zero(&self, v: &[BigInt]) -> bool {
        self.target.cyclic_orders().iter().zip(v).all(|(n, x)| if n.is_zero() { x.is_zero() } else { x.is_multiple_of(n) })
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let img = self.matrix.apply_row(v);
        self.target
            .cyclic_orders()
            .iter()
            .zip(img)
            .map(|(n, x)| if n.is_zero() { x } else { x.mod_floor(n) })
            .collect()
    }
}

/// A subgroup of `ℤⁿ`, stored as its row Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn new(dim: usize, generators: Vec<Vec<BigInt>>) -> Self {
        for g in &generators {
            assert_eq!(g.len(), dim, "lattice generator of wrong length");
        }
        let basis = hermite(generators, dim);
        let pivots = basis.iter().map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row")).collect();
        Lattice { dim, basis, pivots }
    }

    pub fn zero(dim: usize) -> Self {
        Lattice::new(dim, vec![])
    }

    pub fn full(dim: usize) -> Self {
        Lattice::new(dim, IntMatrix::identity(dim).to_rows())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Canonical representative of `v` modulo the lattice.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut v = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let q = v[p].div_floor(&row[p]);
            if !q.is_zero() {
                for (x, b) in v.iter_mut().zip(row) {
                    *x -= &q * b;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn is_subset(&self, other: &Lattice) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        Lattice::new(self.dim, self.basis.iter().chain(&other.basis).cloned().collect())
    }

    pub fn with(&self, extra: impl IntoIterator<Item = Vec<BigInt>>) -> Lattice {
        Lattice::new(self.dim, self.basis.iter().cloned().chain(extra).collect())
    }

    /// Image of the lattice under the row-vector map `v ↦ v·A`.
    pub fn image(&self, a: &IntMatrix) -> Lattice {
        Lattice::new(a.cols(), self.basis.iter().map(|b| a.apply_row(b)).collect())
    }

    /// `ℤⁿ / self`.
    pub fn quotient_of_full(&self) -> FinAbGroup {
        self.as_matrix().cokernel()
    }

    /// `self / sub` for a sublattice `sub ⊆ self`.
    pub fn quotient(&self, sub: &Lattice) -> Result<FinAbGroup> {
        let coords: Vec<Vec<BigInt>> = sub
            .basis
            .iter()
            .map(|v| self.coordinates(v).ok_or_else(|| Error::Argument("quotient by a non-sublattice".into())))
            .collect::<Result<_>>()?;
        Ok(IntMatrix::from_rows(coords.len(), self.rank(), coords).cokernel())
    }

    /// Coefficients of `v` in the Hermite basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut v = v.to_vec();
        let mut c = Vec::with_capacity(self.rank());
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let (q, r) = v[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, b) in v.iter_mut().zip(row) {
                *x -= &q * b;
            }
            c.push(q);
        }
        v.iter().all(Zero::is_zero).then_some(c)
    }

    pub fn as_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.rank(), self.dim, self.basis.clone())
    }
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn big_vec(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn to_u64(x: &BigInt) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows_i64(rows.len(), rows.first().map_or(0, Vec::len), rows)
    }

    fn check_snf(a: &IntMatrix) -> Vec<BigInt> {
        let (u, d, v) = a.smith_normal_form();
        assert_eq!(u.mul(a).mul(&v), d, "U M V = D for {a}");
        assert!(d.is_diagonal());
        assert!(u.determinant().abs().is_one());
        assert!(v.determinant().abs().is_one());
        let diag: Vec<BigInt> = (0..a.rows().min(a.cols())).map(|i| d.get(i, i).clone()).collect();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]), "chain {diag:?}");
            }
        }
        diag
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = combinations(n - 1, k);
        for mut c in combinations(n - 1, k - 1) {
            c.push(n - 1);
            out.push(c);
        }
        out
    }

    // gcd of all k×k minors
    fn minor_gcd(a: &IntMatrix, k: usize) -> BigInt {
        let mut g = BigInt::zero();
        for rs in combinations(a.rows(), k) {
            for cs in combinations(a.cols(), k) {
                let sub: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| a.get(i, j).clone()).collect()).collect();
                g = g.gcd(&IntMatrix::from_rows(k, k, sub).determinant());
            }
        }
        g
    }

    #[test]
    fn snf_examples() {
        assert_eq!(check_snf(&IntMatrix::identity(3)), big_vec(&[1, 1, 1]));
        assert_eq!(check_snf(&IntMatrix::zeros(2, 3)), big_vec(&[0, 0]));
        let a = m(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(check_snf(&a), big_vec(&[2, 4]));
        assert_eq!(a.determinant().abs(), big(8));
        assert_eq!(minor_gcd(&a, 1), big(2));
    }

    #[test]
    fn snf_is_deterministic() {
        let a = m(&[vec![3, -7, 2], vec![0, 5, 10], vec![4, 4, -6]]);
        assert_eq!(a.smith_normal_form(), a.smith_normal_form());
    }

    #[test]
    fn cokernels() {
        assert_eq!(m(&[vec![0, 0]]).cokernel(), FinAbGroup::free(2));
        assert_eq!(m(&[vec![3]]).cokernel().to_string(), "Z/3");
        assert_eq!(m(&[vec![2, 0], vec![0, 3]]).cokernel().to_string(), "Z/6");
        assert_eq!(m(&[vec![2, 4], vec![6, 8]]).cokernel().to_string(), "Z/2 x Z/4");
        assert_eq!(IntMatrix::zeros(0, 2).cokernel().to_string(), "Z^2");
    }

    #[test]
    fn tensors() {
        let z = FinAbGroup::free(1);
        let c = |n| FinAbGroup::cyclic(n);
        assert!(c(2).tensor(&c(3)).is_trivial());
        let a = c(4).direct_sum(&z);
        assert_eq!(z.tensor(&a), a);
        assert_eq!(c(4).tensor(&c(6)), c(2));
    }

    // brute-force bilinear oracle: |Z/m ⊗ Z/n| is the number of bilinear
    // maps Z/m × Z/n → Z/k for k a multiple of both, up to identification
    #[test]
    fn tensor_of_cyclics_against_bilinear_count() {
        for mm in 1..9u64 {
            for nn in 1..9u64 {
                // Hom(Z/m ⊗ Z/n, Z/K) has order gcd(|T|, K); with K = lcm(m,n) it is |T|
                let k = mm * nn / mm.gcd(&nn);
                let mut count = 0;
                for f in 0..k {
                    // bilinear maps are determined by f = b(1,1), which must be killed by m and n
                    if (mm * f) % k == 0 && (nn * f) % k == 0 {
                        count += 1;
                    }
                }
                let t = FinAbGroup::cyclic(mm).tensor(&FinAbGroup::cyclic(nn));
                assert_eq!(t.order().unwrap(), big(count as i64), "{mm} {nn}");
            }
        }
    }

    #[test]
    fn hom_well_definedness() {
        let z4 = FinAbGroup::cyclic(4);
        let z2 = FinAbGroup::cyclic(2);
        assert!(AbHom::new(z4.clone(), z2.clone(), m(&[vec![1]])).is_ok());
        assert!(AbHom::new(z2.clone(), z4.clone(), m(&[vec![1]])).is_err());
        let h = AbHom::new(z2, z4, m(&[vec![2]])).unwrap();
        assert_eq!(h.apply(&big_vec(&[3])), big_vec(&[2]));
    }

    #[test]
    fn lattice_basics() {
        let l = Lattice::new(2, vec![big_vec(&[2, 4]), big_vec(&[6, 8])]);
        assert_eq!(l.basis(), &[big_vec(&[2, 0]), big_vec(&[0, 4])]);
        assert!(l.contains(&big_vec(&[4, -8])));
        assert!(!l.contains(&big_vec(&[2, 2])));
        assert_eq!(l.reduce(&big_vec(&[3, 5])), big_vec(&[1, 1]));
        assert_eq!(l.quotient_of_full().to_string(), "Z/2 x Z/4");
        let sub = Lattice::new(2, vec![big_vec(&[4, 0]), big_vec(&[0, 8])]);
        assert!(sub.is_subset(&l));
        assert_eq!(l.quotient(&sub).unwrap().to_string(), "Z/2 x Z/2");
        assert!(sub.quotient(&l).is_err());
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..4, 1usize..4).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-6i64..7, c), r)
                .prop_map(move |rows| IntMatrix::from_rows_i64(r, c, &rows))
        })
    }

    proptest! {
        #[test]
        fn snf_matches_minor_gcds(a in small_matrix()) {
            let diag = check_snf(&a);
            let mut prod = BigInt::one();
            for (k, d) in diag.iter().enumerate() {
                prod *= d;
                prop_assert_eq!(&prod, &minor_gcd(&a, k + 1));
            }
        }

        #[test]
        fn cokernel_invariant_under_unimodular_moves(a in small_matrix(), q in -3i64..4) {
            let mut b = a.clone();
            if b.rows() > 1 {
                b.add_row(0, 1, &big(q));
            }
            if b.cols() > 1 {
                b.add_col(1, 0, &big(-q));
                b.swap_cols(0, 1);
            }
            prop_assert_eq!(a.cokernel(), b.cokernel());
        }

        #[test]
        fn tensor_symmetric_and_distributive(
            xs in prop::collection::vec(0u64..7, 0..3),
            ys in prop::collection::vec(0u64..7, 0..3),
            zs in prop::collection::vec(0u64..7, 0..3),
        ) {
            let g = |v: &Vec<u64>| FinAbGroup::from_cyclic(v.iter().map(|&x| BigInt::from(x)));
            let (a, b, c) = (g(&xs), g(&ys), g(&zs));
            prop_assert_eq!(a.tensor(&b), b.tensor(&a));
            prop_assert_eq!(a.tensor(&b.direct_sum(&c)), a.tensor(&b).direct_sum(&a.tensor(&c)));
        }

        #[test]
        fn lattice_reduce_is_canonical(
            gens in prop::collection::vec(prop::collection::vec(-5i64..6, 3), 0..4),
            v in prop::collection::vec(-9i64..10, 3),
            w in prop::collection::vec(-3i64..4, 4),
        ) {
            let l = Lattice::new(3, gens.iter().map(|g| big_vec(g)).collect());
            let v = big_vec(&v);
            let mut shifted = v.clone();
            for (g, c) in gens.iter().zip(&w) {
                for (x, y) in shifted.iter_mut().zip(g) {
                    *x += big(*c * *y);
                }
            }
            prop_assert_eq!(l.reduce(&v), l.reduce(&shifted));
        }
    }
}
