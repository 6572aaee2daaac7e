//! Arithmetic and dense linear algebra over a prime field F_p.
//!
//! Vectors are plain `Vec<u32>` with entries already reduced mod p. Matrices
//! are dense and row-major; the largest systems met in this crate have a few
//! hundred columns, so nothing cleverer is needed.

use crate::error::{Error, Result};

/// A validated prime modulus. Cheap to copy; all arithmetic goes through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Fp {
    pub fn new(p: u32) -> Result<Self> {
        if p >= 1 << 16 || !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Fp { p })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    /// Reduce a signed integer into [0, p).
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.p - a) % self.p
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element (Fermat).
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// `acc += c * v`, entrywise.
    pub fn axpy(self, acc: &mut [u32], c: u32, v: &[u32]) {
        if c == 0 {
            return;
        }
        for (a, &x) in acc.iter_mut().zip(v) {
            if x != 0 {
                *a = ((*a as u64 + c as u64 * x as u64) % self.p as u64) as u32;
            }
        }
    }

    pub fn scale(self, v: &mut [u32], c: u32) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

/// A single element of F_p that remembers its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    pub value: u32,
    pub modulus: u32,
}

impl FpScalar {
    pub fn new(value: i64, field: Fp) -> Self {
        FpScalar {
            value: field.reduce(value),
            modulus: field.p(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

/// C(j, k) mod p by Lucas' theorem: multiply the binomials of base-p digits.
pub fn binom_mod_p(j: u64, k: u64, p: u32) -> Result<FpScalar> {
    let field = Fp::new(p)?;
    Ok(FpScalar {
        value: binom_in(field, j, k),
        modulus: p,
    })
}

/// Same as [`binom_mod_p`] for an already validated field.
pub fn binom_in(field: Fp, mut j: u64, mut k: u64) -> u32 {
    let p = field.p() as u64;
    let mut acc = 1u32;
    while k > 0 || j > 0 {
        let (jd, kd) = (j % p, k % p);
        if kd > jd {
            return 0;
        }
        acc = field.mul(acc, small_binom(field, jd, kd));
        j /= p;
        k /= p;
    }
    acc
}

// Digits are below p < 2^16, so the multiplicative formula with inverses is fine.
fn small_binom(field: Fp, n: u64, k: u64) -> u32 {
    let k = k.min(n - k);
    let mut num = 1u32;
    let mut den = 1u32;
    for i in 0..k {
        num = field.mul(num, ((n - i) % field.p() as u64) as u32);
        den = field.mul(den, ((i + 1) % field.p() as u64) as u32);
    }
    field.mul(num, field.inv(den))
}

/// Dense row-major matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    pub rows: usize,
    pub cols: usize,
    pub field: Fp,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zero(field: Fp, rows: usize, cols: usize) -> Self {
        FpMatrix {
            rows,
            cols,
            field,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Build from rows; every row must have length `cols`.
    pub fn from_rows(field: Fp, cols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(r.len(), cols));
            }
            data.extend(r.iter().map(|&x| x % field.p()));
        }
        Ok(FpMatrix {
            rows: rows.len(),
            cols,
            field,
            data,
        })
    }

    /// Build from columns, the natural layout when columns are images of basis vectors.
    pub fn from_columns(field: Fp, rows: usize, columns: &[Vec<u32>]) -> Result<Self> {
        let mut m = Self::zero(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch(c.len(), rows));
            }
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x % field.p());
            }
        }
        Ok(m)
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(self.cols, other.rows));
        }
        let mut out = Self::zero(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let row = other.row(k).to_vec();
                let start = i * out.cols;
                self.field
                    .axpy(&mut out.data[start..start + other.cols], a, &row);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(v.len(), self.cols));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for (a, b) in self.row(i).iter().zip(v) {
                    acc += *a as u64 * *b as u64;
                }
                (acc % self.field.p() as u64) as u32
            })
            .collect())
    }

    pub fn sub(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(self.rows * self.cols, other.rows * other.cols));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = self.field.sub(*a, *b);
        }
        Ok(out)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c));
            let start = r * self.cols;
            f.scale(&mut self.data[start..start + self.cols], inv);
            let pivot_row = self.row(r).to_vec();
            for i in 0..self.rows {
                if i != r {
                    let a = self.get(i, c);
                    if a != 0 {
                        let s = i * self.cols;
                        f.axpy(&mut self.data[s..s + self.cols], f.neg(a), &pivot_row);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Right null space {v : Mv = 0}.
    pub fn kernel(&self) -> Subspace {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = self.field;
        let vectors = free
            .iter()
            .map(|&fc| {
                let mut v = vec![0u32; self.cols];
                v[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(r, fc));
                }
                v
            })
            .collect::<Vec<_>>();
        Subspace::span(f, self.cols, vectors).expect("kernel vectors have the right length")
    }

    /// One solution of Mx = b (free variables set to zero), if any.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(b.len(), self.rows));
        }
        let mut aug = FpMatrix::zero(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i] % self.field.p());
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols);
        }
        Ok(Some(x))
    }

    /// Column space, as a subspace of F_p^rows.
    pub fn image(&self) -> Subspace {
        Subspace::span(self.field, self.rows, self.transpose().row_vecs())
            .expect("columns have the right length")
    }
}

/// A subspace of F_p^n, stored as the nonzero rows of its reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub field: Fp,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Fp, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            field,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Fp, ambient_dim: usize) -> Self {
        Self::from_rref(FpMatrix::identity(field, ambient_dim))
    }

    pub fn span(field: Fp, ambient_dim: usize, vectors: Vec<Vec<u32>>) -> Result<Self> {
        let m = FpMatrix::from_rows(field, ambient_dim, &vectors)?;
        Ok(Self::from_rref(m))
    }

    fn from_rref(mut m: FpMatrix) -> Self {
        let pivots = m.rref_in_place();
        let basis = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        Subspace {
            ambient_dim: m.cols,
            field: m.field,
            basis,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Subtract multiples of basis rows to clear the pivot columns of `v`.
    /// The result is zero exactly when `v` lies in the subspace.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut w = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = w[pc];
            if c != 0 {
                f.axpy(&mut w, f.neg(c), row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        v.len() == self.ambient_dim && self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coefficients of `v` in the RREF basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let coords: Vec<u32> = self.pivots.iter().map(|&pc| v[pc]).collect();
        if self.reduce(v).iter().all(|&x| x == 0) {
            Some(coords)
        } else {
            None
        }
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.p(), other.field.p()));
        }
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch(self.ambient_dim, other.ambient_dim));
        }
        Ok(())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.basis.iter().all(|v| other.contains(v)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.field, self.ambient_dim, rows)
    }

    /// A ∩ B: solve Σ a_i x_i = Σ b_j y_j and read off the common vectors.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(f, self.ambient_dim));
        }
        let mut columns = self.basis.clone();
        columns.extend(other.basis.iter().map(|v| v.iter().map(|&x| f.neg(x)).collect()));
        let m = FpMatrix::from_columns(f, self.ambient_dim, &columns)?;
        let ker = m.kernel();
        let a = self.dim();
        let vectors = ker
            .basis
            .iter()
            .map(|k| {
                let mut v = vec![0u32; self.ambient_dim];
                for (i, row) in self.basis.iter().enumerate() {
                    f.axpy(&mut v, k[i], row);
                }
                debug_assert!(k.len() >= a);
                v
            })
            .collect();
        Subspace::span(f, self.ambient_dim, vectors)
    }
}

/// Coset representatives of A/B.
///
/// Rows of A are reduced modulo B (so they vanish on B's pivot columns) and
/// then put in reduced echelon form. This is the lexicographically smallest
/// pivot-free completion of B inside A, hence deterministic.
pub fn quotient_basis(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.check_compatible(b)?;
    if let Some(v) = b.basis.iter().find(|v| !a.contains(v)) {
        return Err(Error::NotContained(v.clone()));
    }
    let reduced: Vec<Vec<u32>> = a.basis.iter().map(|v| b.reduce(v)).collect();
    let q = Subspace::span(a.field, a.ambient_dim, reduced)?;
    debug_assert_eq!(q.dim() + b.dim(), a.dim());
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn rejects_composites() {
        assert_eq!(Fp::new(9), Err(Error::NotPrime(9)));
        assert!(Fp::new(1).is_err());
        assert!(Fp::new(65537).is_err());
        assert!(Fp::new(65521).is_ok());
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binom_mod_p(10, 2, 2).unwrap().value, 1);
        assert_eq!(binom_mod_p(7, 0, 3).unwrap().value, 1);
        assert_eq!(binom_mod_p(5, 2, 5).unwrap().value, 0);
        assert_eq!(binom_mod_p(3, 5, 7).unwrap().value, 0);
        assert!(binom_mod_p(4, 2, 4).is_err());
    }

    #[test]
    fn kernel_examples() {
        let f2 = f(2);
        assert!(FpMatrix::identity(f2, 3).kernel().is_zero());
        assert_eq!(FpMatrix::zero(f(3), 2, 2).kernel().dim(), 2);
        let m = FpMatrix::from_rows(f2, 2, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.kernel().basis(), &[vec![1, 1]]);
    }

    #[test]
    fn intersect_examples() {
        let f2 = f(2);
        let x = Subspace::span(f2, 2, vec![vec![1, 0]]).unwrap();
        let y = Subspace::span(f2, 2, vec![vec![0, 1]]).unwrap();
        assert!(x.intersect(&y).unwrap().is_zero());
        assert_eq!(x.intersect(&x).unwrap(), x);
        let a = Subspace::span(f2, 3, vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let b = Subspace::span(f2, 3, vec![vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(a.intersect(&b).unwrap().basis(), &[vec![1, 1, 0]]);
        let z = Subspace::zero(f2, 4);
        assert_eq!(a.intersect(&z), Err(Error::DimensionMismatch(3, 4)));
    }

    #[test]
    fn quotient_examples() {
        let f2 = f(2);
        let full = Subspace::full(f2, 2);
        let zero = Subspace::zero(f2, 2);
        assert_eq!(quotient_basis(&full, &zero).unwrap().basis(), &[vec![1, 0], vec![0, 1]]);
        assert!(quotient_basis(&full, &full).unwrap().is_zero());
        let diag = Subspace::span(f2, 2, vec![vec![1, 1]]).unwrap();
        assert_eq!(quotient_basis(&full, &diag).unwrap().basis(), &[vec![0, 1]]);
        let line = Subspace::span(f2, 2, vec![vec![1, 0]]).unwrap();
        assert_eq!(quotient_basis(&line, &diag), Err(Error::NotContained(vec![1, 1])));
    }

    #[test]
    fn coordinates_round_trip() {
        let f3 = f(3);
        let s = Subspace::span(f3, 3, vec![vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        let v = vec![2, 2, 1];
        let c = s.coordinates(&v).unwrap();
        let mut back = vec![0; 3];
        for (ci, row) in c.iter().zip(s.basis()) {
            f3.axpy(&mut back, *ci, row);
        }
        assert_eq!(back, v);
        assert!(s.coordinates(&[0, 0, 1]).is_none());
    }
}
