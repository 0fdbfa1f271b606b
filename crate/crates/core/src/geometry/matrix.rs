//! Dense matrices over a small finite field, acting on row vectors.

use serde::Serialize;

use crate::field::{Field, GaloisField};

/// Row-major matrix with entries in `0..q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FqMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u16>,
}

impl FqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FqMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u16>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend_from_slice(r);
        }
        FqMatrix { rows: rows.len(), cols, data }
    }

    pub fn to_rows(&self) -> Vec<Vec<u16>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u16) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, o: &Self, f: &GaloisField) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(l, j);
                    if b != 0 {
                        let idx = i * o.cols + j;
                        out.data[idx] = f.fadd(out.data[idx], f.fmul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self, f: &GaloisField) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        FqMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(&a, &b)| f.fadd(a, b)).collect() }
    }

    pub fn sub(&self, o: &Self, f: &GaloisField) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        FqMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(&a, &b)| f.fsub(a, b)).collect() }
    }

    pub fn scale(&self, c: u16, f: &GaloisField) -> Self {
        FqMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.fmul(a, c)).collect() }
    }

    pub fn neg(&self, f: &GaloisField) -> Self {
        FqMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.fneg(a)).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn block_diag(blocks: &[&FqMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Rows of `self` followed by rows of `o`.
    pub fn vstack(&self, o: &Self) -> Self {
        if self.rows == 0 {
            return FqMatrix { rows: o.rows, cols: o.cols.max(self.cols), data: o.data.clone() };
        }
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        FqMatrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        FqMatrix { rows: idx.len(), cols: self.cols, data: idx.iter().flat_map(|&i| self.row(i).to_vec()).collect() }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, f: &GaloisField) -> (FqMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.finv(m.get(r, c));
            for j in 0..m.cols {
                let v = f.fmul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let a = m.get(i, c);
                if i != r && a != 0 {
                    for j in 0..m.cols {
                        let v = f.fsub(m.get(i, j), f.fmul(a, m.get(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &GaloisField) -> usize {
        self.rref(f).1.len()
    }

    /// Canonical basis (reduced echelon rows) of the row space.
    pub fn row_space(&self, f: &GaloisField) -> FqMatrix {
        let (m, piv) = self.rref(f);
        m.select_rows(&(0..piv.len()).collect::<Vec<_>>())
    }

    /// Basis of `{v : v self = 0}`.
    pub fn left_kernel(&self, f: &GaloisField) -> FqMatrix {
        self.transpose().right_kernel(f)
    }

    /// Basis (as rows) of `{x : self x^T = 0}`.
    pub fn right_kernel(&self, f: &GaloisField) -> FqMatrix {
        let (m, piv) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let mut out = FqMatrix::zeros(free.len(), self.cols);
        for (t, &fc) in free.iter().enumerate() {
            out.set(t, fc, 1);
            for (r, &pc) in piv.iter().enumerate() {
                out.set(t, pc, f.fneg(m.get(r, fc)));
            }
        }
        out
    }

    pub fn det(&self, f: &GaloisField) -> u16 {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = 1u16;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| m.get(i, c) != 0) else { return 0 };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = f.fneg(det);
            }
            let pv = m.get(c, c);
            det = f.fmul(det, pv);
            let inv = f.finv(pv);
            for i in c + 1..n {
                let a = f.fmul(m.get(i, c), inv);
                if a != 0 {
                    for j in c..n {
                        let v = f.fsub(m.get(i, j), f.fmul(a, m.get(c, j)));
                        m.set(i, j, v);
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self, f: &GaloisField) -> Option<FqMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = FqMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (r, piv) = aug.rref(f);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(r.submatrix(0..n, n..2 * n))
    }

    /// Solves `x self = b` for a row vector `x`, if possible.
    pub fn solve_left(&self, b: &[u16], f: &GaloisField) -> Option<Vec<u16>> {
        let (x, _) = solve_affine(&self.transpose(), b, f)?;
        Some(x)
    }

    /// `(self - 1)^rows == 0`.
    pub fn is_unipotent(&self, f: &GaloisField) -> bool {
        let x = self.sub(&FqMatrix::identity(self.rows), f);
        let mut p = x.clone();
        for _ in 1..self.rows {
            if p.is_zero() {
                return true;
            }
            p = p.mul(&x, f);
        }
        p.is_zero()
    }
}

/// Solves `a x^T = b`: a particular solution and a basis of the homogeneous solutions.
pub fn solve_affine(a: &FqMatrix, b: &[u16], f: &GaloisField) -> Option<(Vec<u16>, FqMatrix)> {
    assert_eq!(a.rows, b.len());
    let mut aug = FqMatrix::zeros(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug.set(i, j, a.get(i, j));
        }
        aug.set(i, a.cols, b[i]);
    }
    let (r, piv) = aug.rref(f);
    if piv.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![0u16; a.cols];
    for (row, &pc) in piv.iter().enumerate() {
        x[pc] = r.get(row, a.cols);
    }
    Some((x, a.right_kernel(f)))
}

/// Every vector `base + sum c_i basis_i`, in lexicographic order of the coefficients.
pub fn affine_span(base: &[u16], basis: &FqMatrix, f: &GaloisField) -> Vec<Vec<u16>> {
    let q = f.order() as usize;
    let d = basis.rows;
    let total = q.checked_pow(d as u32).expect("span too large");
    let mut out = Vec::with_capacity(total);
    let mut coeffs = vec![0u16; d];
    for _ in 0..total {
        let mut v = base.to_vec();
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for (j, x) in v.iter_mut().enumerate() {
                    *x = f.fadd(*x, f.fmul(c, basis.get(i, j)));
                }
            }
        }
        out.push(v);
        for c in coeffs.iter_mut().rev() {
            *c += 1;
            if (*c as usize) < q {
                break;
            }
            *c = 0;
        }
    }
    out
}

/// Intersection of two row spaces, as a canonical basis.
pub fn intersect(u: &FqMatrix, w: &FqMatrix, f: &GaloisField) -> FqMatrix {
    if u.rows == 0 || w.rows == 0 {
        return FqMatrix::zeros(0, u.cols.max(w.cols));
    }
    let stacked = u.vstack(w);
    let ker = stacked.left_kernel(f);
    if ker.rows == 0 {
        return FqMatrix::zeros(0, u.cols);
    }
    let a = ker.submatrix(0..ker.rows, 0..u.rows);
    a.mul(u, f).row_space(f)
}

/// Whether every row of `sub` lies in the row space of `space`.
pub fn contained_in(sub: &FqMatrix, space: &FqMatrix, f: &GaloisField) -> bool {
    if sub.rows == 0 {
        return true;
    }
    space.vstack(sub).rank(f) == space.rank(f)
}

/// Converts a signed integer to the field.
pub fn fq(f: &GaloisField, x: i64) -> u16 {
    f.from_i64(x)
}
