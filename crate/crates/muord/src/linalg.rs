//! Dense linear algebra over F_{p^s}: matrices, reduced row echelon form,
//! kernels, sigma-semilinear maps and row-space (subspace) operations.
//!
//! Subspaces are represented by their reduced-row-echelon basis with zero
//! rows dropped; that form is canonical, so subspace equality is matrix
//! equality. All operations tolerate empty shapes (0 rows or 0 columns).

use crate::field::{Fq, FqElem};

pub type Vector = Vec<FqElem>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    a: Vec<FqElem>,
}

impl Mat {
    pub fn zero(fq: &Fq, rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, a: vec![fq.zero(); rows * cols] }
    }

    pub fn identity(fq: &Fq, n: usize) -> Mat {
        let mut m = Mat::zero(fq, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = fq.one();
        }
        m
    }

    pub fn from_rows(fq: &Fq, rows: &[Vector], cols: usize) -> Mat {
        let mut m = Mat::zero(fq, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, v) in r.iter().enumerate() {
                *m.at_mut(i, j) = v.clone();
            }
        }
        m
    }

    pub fn from_fn(fq: &Fq, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FqElem) -> Mat {
        let mut m = Mat::zero(fq, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.at_mut(i, j) = f(i, j);
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &FqElem {
        &self.a[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut FqElem {
        &mut self.a[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vector {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn rows_vec(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn mul(&self, fq: &Fq, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Mat::zero(fq, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.at(i, k);
                if fq.is_zero(x) {
                    continue;
                }
                for j in 0..other.cols {
                    let y = other.at(k, j);
                    if !fq.is_zero(y) {
                        let acc = fq.add(out.at(i, j), &fq.mul(x, y));
                        *out.at_mut(i, j) = acc;
                    }
                }
            }
        }
        out
    }

    pub fn matvec(&self, fq: &Fq, v: &[FqElem]) -> Vector {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = fq.zero();
                for j in 0..self.cols {
                    if !fq.is_zero(self.at(i, j)) && !fq.is_zero(&v[j]) {
                        acc = fq.add(&acc, &fq.mul(self.at(i, j), &v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, fq: &Fq, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.rows * self.cols {
            out.a[i] = fq.add(&self.a[i], &other.a[i]);
        }
        out
    }

    pub fn transpose(&self, fq: &Fq) -> Mat {
        Mat::from_fn(fq, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Entrywise sigma^k.
    pub fn map_frobenius(&self, fq: &Fq, k: i64) -> Mat {
        let mut out = self.clone();
        for v in out.a.iter_mut() {
            *v = fq.frobenius(v, k);
        }
        out
    }

    pub fn flip_rows(&self, fq: &Fq) -> Mat {
        Mat::from_fn(fq, self.rows, self.cols, |i, j| self.at(self.rows - 1 - i, j).clone())
    }

    pub fn flip_cols(&self, fq: &Fq) -> Mat {
        Mat::from_fn(fq, self.rows, self.cols, |i, j| self.at(i, self.cols - 1 - j).clone())
    }

    pub fn vstack(fq: &Fq, top: &Mat, bottom: &Mat) -> Mat {
        assert_eq!(top.cols, bottom.cols);
        let mut out = Mat::zero(fq, top.rows + bottom.rows, top.cols);
        for i in 0..top.rows {
            for j in 0..top.cols {
                *out.at_mut(i, j) = top.at(i, j).clone();
            }
        }
        for i in 0..bottom.rows {
            for j in 0..bottom.cols {
                *out.at_mut(top.rows + i, j) = bottom.at(i, j).clone();
            }
        }
        out
    }

    /// 2x2 block assembly [[a, b], [c, d]].
    pub fn block2x2(fq: &Fq, a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut out = Mat::zero(fq, a.rows + c.rows, a.cols + b.cols);
        let put = |m: &Mat, r0: usize, c0: usize, out: &mut Mat| {
            for i in 0..m.rows {
                for j in 0..m.cols {
                    *out.at_mut(r0 + i, c0 + j) = m.at(i, j).clone();
                }
            }
        };
        put(a, 0, 0, &mut out);
        put(b, 0, a.cols, &mut out);
        put(c, a.rows, 0, &mut out);
        put(d, a.rows, a.cols, &mut out);
        out
    }

    /// Keep rows [r0, r1) only.
    pub fn row_slice(&self, fq: &Fq, r0: usize, r1: usize) -> Mat {
        Mat::from_fn(fq, r1 - r0, self.cols, |i, j| self.at(r0 + i, j).clone())
    }
}

/// Reduced row echelon form; returns (rref, pivot column indices).
pub fn rref(fq: &Fq, m: &Mat) -> (Mat, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let mut pr = None;
        for i in r..a.rows {
            if !fq.is_zero(a.at(i, c)) {
                pr = Some(i);
                break;
            }
        }
        let Some(pr) = pr else { continue };
        if pr != r {
            for j in 0..a.cols {
                let x = a.at(pr, j).clone();
                let y = a.at(r, j).clone();
                *a.at_mut(pr, j) = y;
                *a.at_mut(r, j) = x;
            }
        }
        let inv = fq.inv(a.at(r, c));
        for j in c..a.cols {
            let v = fq.mul(a.at(r, j), &inv);
            *a.at_mut(r, j) = v;
        }
        for i in 0..a.rows {
            if i != r && !fq.is_zero(a.at(i, c)) {
                let factor = a.at(i, c).clone();
                for j in c..a.cols {
                    let v = fq.sub(a.at(i, j), &fq.mul(&factor, a.at(r, j)));
                    *a.at_mut(i, j) = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(fq: &Fq, m: &Mat) -> usize {
    rref(fq, m).1.len()
}

/// Basis of the right kernel {x : m x = 0}, one solution per row.
pub fn kernel_basis(fq: &Fq, m: &Mat) -> Mat {
    let n = m.cols;
    let (r, pivots) = rref(fq, m);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivot_set.contains(c)).collect();
    let mut out = Mat::zero(fq, free.len(), n);
    for (bi, &fc) in free.iter().enumerate() {
        *out.at_mut(bi, fc) = fq.one();
        for (pi, &pc) in pivots.iter().enumerate() {
            // row pi of rref: x_pc + sum over free c of rref[pi][c] x_c = 0
            let v = fq.neg(r.at(pi, fc));
            *out.at_mut(bi, pc) = v;
        }
    }
    out
}

/// Inverse of a square matrix; None when singular.
pub fn inverse(fq: &Fq, m: &Mat) -> Option<Mat> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    if n == 0 {
        return Some(m.clone());
    }
    let aug = Mat::from_fn(fq, n, 2 * n, |i, j| {
        if j < n {
            m.at(i, j).clone()
        } else if j - n == i {
            fq.one()
        } else {
            fq.zero()
        }
    });
    let (r, pivots) = rref(fq, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(Mat::from_fn(fq, n, n, |i, j| r.at(i, n + j).clone()))
}

/// A sigma-semilinear map v -> mat . sigma^twist(v).
#[derive(Clone, Debug)]
pub struct SemilinearMap {
    pub mat: Mat,
    pub twist: i64,
}

impl SemilinearMap {
    pub fn new(mat: Mat, twist: i64) -> SemilinearMap {
        SemilinearMap { mat, twist }
    }

    pub fn apply(&self, fq: &Fq, v: &[FqElem]) -> Vector {
        let tv: Vector = v.iter().map(|x| fq.frobenius(x, self.twist)).collect();
        self.mat.matvec(fq, &tv)
    }

    /// self ∘ other: matrix is self.mat · sigma^{self.twist}(other.mat),
    /// twist is the sum.
    pub fn compose(&self, fq: &Fq, other: &SemilinearMap) -> SemilinearMap {
        let twisted = other.mat.map_frobenius(fq, self.twist);
        SemilinearMap { mat: self.mat.mul(fq, &twisted), twist: self.twist + other.twist }
    }

    pub fn add(&self, fq: &Fq, other: &SemilinearMap) -> SemilinearMap {
        assert_eq!(self.twist, other.twist, "can only add maps of equal twist");
        SemilinearMap { mat: self.mat.add(fq, &other.mat), twist: self.twist }
    }
}

// --- subspaces as canonical row spaces ---

/// Canonical form of the row space: rref with zero rows dropped.
pub fn span(fq: &Fq, m: &Mat) -> Mat {
    let (r, pivots) = rref(fq, m);
    r.row_slice(fq, 0, pivots.len())
}

pub fn space_dim(m: &Mat) -> usize {
    m.rows
}

pub fn full_space(fq: &Fq, n: usize) -> Mat {
    Mat::identity(fq, n)
}

pub fn zero_space(fq: &Fq, n: usize) -> Mat {
    Mat::zero(fq, 0, n)
}

pub fn space_eq(a: &Mat, b: &Mat) -> bool {
    a == b
}

pub fn space_sum(fq: &Fq, a: &Mat, b: &Mat) -> Mat {
    span(fq, &Mat::vstack(fq, a, b))
}

/// Annihilator {x : m x = 0} of the row space, itself as a row space.
pub fn annihilator(fq: &Fq, m: &Mat) -> Mat {
    span(fq, &kernel_basis(fq, m))
}

pub fn space_intersect(fq: &Fq, a: &Mat, b: &Mat) -> Mat {
    // (A ∩ B) = ann(ann(A) + ann(B)) for the standard bilinear form
    let u = annihilator(fq, a);
    let w = annihilator(fq, b);
    annihilator(fq, &Mat::vstack(fq, &u, &w))
}

pub fn space_contains(fq: &Fq, space: &Mat, v: &[FqElem]) -> bool {
    // reduce v against the canonical rows
    let mut v = v.to_vec();
    for i in 0..space.rows {
        let pc = (0..space.cols).find(|&j| !fq.is_zero(space.at(i, j)));
        let Some(pc) = pc else { continue };
        if !fq.is_zero(&v[pc]) {
            let f = v[pc].clone();
            for j in 0..space.cols {
                v[j] = fq.sub(&v[j], &fq.mul(&f, space.at(i, j)));
            }
        }
    }
    v.iter().all(|x| fq.is_zero(x))
}

pub fn space_is_subspace(fq: &Fq, inner: &Mat, outer: &Mat) -> bool {
    (0..inner.rows).all(|i| space_contains(fq, outer, &inner.row(i)))
}

/// Image of a row-space basis under a semilinear map: applies sigma^twist to
/// the spanning vectors, multiplies, and canonicalizes.
pub fn image_of_subspace(fq: &Fq, a: &SemilinearMap, basis: &Mat) -> Mat {
    let rows: Vec<Vector> = (0..basis.rows).map(|i| a.apply(fq, &basis.row(i))).collect();
    span(fq, &Mat::from_rows(fq, &rows, a.mat.rows))
}

/// Preimage {x : a(x) ∈ w} of a row space under a semilinear map.
pub fn preimage_of_subspace(fq: &Fq, a: &SemilinearMap, w: &Mat) -> Mat {
    assert_eq!(w.cols, a.mat.rows);
    let c = annihilator(fq, w); // rows annihilate w
    let ca = if c.rows == 0 { Mat::zero(fq, 0, a.mat.cols) } else { c.mul(fq, &a.mat) };
    let k = kernel_basis(fq, &ca); // sigma^twist(x) solutions
    let back = k.map_frobenius(fq, -a.twist);
    span(fq, &back)
}

/// Kernel of a semilinear map as a row space.
pub fn semilinear_kernel(fq: &Fq, a: &SemilinearMap) -> Mat {
    let k = kernel_basis(fq, &a.mat);
    span(fq, &k.map_frobenius(fq, -a.twist))
}
