//! Square matrices over the cyclotomic scalars and exact linear algebra helpers.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Cyc;

/// A linear map V -> V in the standard basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: Vec<Vec<Cyc>>,
}

impl Mat {
    pub fn from_rows(rows: Vec<Vec<Cyc>>) -> Result<Mat> {
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
        }
        Ok(Mat { rows })
    }

    pub fn from_cols(cols: &[Vec<Cyc>]) -> Result<Mat> {
        let n = cols.len();
        let mut rows = vec![vec![Cyc::zero(); n]; n];
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
            for i in 0..n {
                rows[i][j] = c[i].clone();
            }
        }
        Ok(Mat { rows })
    }

    pub fn identity(n: usize) -> Mat {
        let mut rows = vec![vec![Cyc::zero(); n]; n];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = Cyc::one();
        }
        Mat { rows }
    }

    pub fn diag(d: &[Cyc]) -> Mat {
        let n = d.len();
        let mut rows = vec![vec![Cyc::zero(); n]; n];
        for i in 0..n {
            rows[i][i] = d[i].clone();
        }
        Mat { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[Cyc] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<Cyc>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Cyc {
        &self.rows[i][j]
    }

    pub fn col(&self, j: usize) -> Vec<Cyc> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.dim())
    }

    pub fn mul(&self, b: &Mat) -> Mat {
        let n = self.dim();
        assert_eq!(n, b.dim());
        let mut rows = vec![vec![Cyc::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !b.rows[k][j].is_zero() {
                        rows[i][j] += &(a * &b.rows[k][j]);
                    }
                }
            }
        }
        Mat { rows }
    }

    pub fn apply(&self, v: &[Cyc]) -> Vec<Cyc> {
        self.rows
            .iter()
            .map(|r| {
                let mut acc = Cyc::zero();
                for (a, b) in r.iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let n = self.dim();
        Mat { rows: (0..n).map(|j| self.col(j)).collect() }
    }

    pub fn scale(&self, c: &Cyc) -> Mat {
        Mat { rows: self.rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }

    pub fn add(&self, b: &Mat) -> Mat {
        Mat {
            rows: self.rows.iter().zip(&b.rows).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect(),
        }
    }

    pub fn sub(&self, b: &Mat) -> Mat {
        Mat {
            rows: self.rows.iter().zip(&b.rows).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Mat {
        let mut r = Mat::identity(self.dim());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn det(&self) -> Cyc {
        let idx: Vec<usize> = (0..self.dim()).collect();
        self.minor(&idx, &idx)
    }

    /// Determinant of the submatrix with the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Cyc {
        let k = rows.len();
        assert_eq!(k, cols.len());
        let m: Vec<Vec<Cyc>> = rows.iter().map(|&i| cols.iter().map(|&j| self.rows[i][j].clone()).collect()).collect();
        det_dense(m)
    }

    pub fn inverse(&self) -> Result<Mat> {
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut inv = Mat::identity(n).rows;
        for col in 0..n {
            let p = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::Singular)?;
            a.swap(col, p);
            inv.swap(col, p);
            let f = a[col][col].inv()?;
            for j in 0..n {
                a[col][j] = &a[col][j] * &f;
                inv[col][j] = &inv[col][j] * &f;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let g = a[r][col].clone();
                    for j in 0..n {
                        let t = &g * &a[col][j];
                        a[r][j] -= &t;
                        let t = &g * &inv[col][j];
                        inv[r][j] -= &t;
                    }
                }
            }
        }
        Ok(Mat { rows: inv })
    }

    /// Smallest k >= 1 with self^k = 1, searching up to `bound`.
    pub fn order(&self, bound: u32) -> Option<u32> {
        let id = Mat::identity(self.dim());
        let mut p = self.clone();
        for k in 1..=bound {
            if p == id {
                return Some(k);
            }
            p = p.mul(self);
        }
        None
    }
}

fn det_dense(mut m: Vec<Vec<Cyc>>) -> Cyc {
    let k = m.len();
    if k == 0 {
        return Cyc::one();
    }
    let mut det = Cyc::one();
    for col in 0..k {
        let p = match (col..k).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Cyc::zero(),
        };
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        det = &det * &m[col][col];
        let inv = m[col][col].inv().unwrap();
        for r in col + 1..k {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &inv;
            for j in col..k {
                let t = &f * &m[col][j];
                m[r][j] -= &t;
            }
        }
    }
    det
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Reduced row echelon form of a rectangular matrix; returns pivot columns.
pub fn rref(m: &mut Vec<Vec<Cyc>>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = match (r..rows).find(|&i| !m[i][c].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    if !m[r][j].is_zero() {
                        let t = &f * &m[r][j];
                        m[i][j] -= &t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(vectors: &[Vec<Cyc>]) -> usize {
    let mut m = vectors.to_vec();
    rref(&mut m).len()
}

/// Basis of the span of the given vectors, taken from the vectors themselves
/// (greedy, in order).
pub fn independent_subset(vectors: &[Vec<Cyc>]) -> Vec<usize> {
    // forward elimination against the rows kept so far, each normalized to 1
    // at its pivot
    let mut chosen = Vec::new();
    let mut basis: Vec<(usize, Vec<Cyc>)> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for (p, row) in &basis {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            for (x, r) in w.iter_mut().zip(row) {
                if !r.is_zero() {
                    let t = &f * r;
                    *x -= &t;
                }
            }
        }
        if let Some(p) = w.iter().position(|x| !x.is_zero()) {
            let inv = w[p].inv().expect("nonzero pivot");
            for x in w.iter_mut().filter(|x| !x.is_zero()) {
                *x = &*x * &inv;
            }
            basis.push((p, w));
            chosen.push(i);
        }
    }
    chosen
}

/// Null space of the matrix with the given rows (vectors x with M x = 0).
pub fn nullspace(rows: &[Vec<Cyc>], ncols: usize) -> Vec<Vec<Cyc>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let mut v = vec![Cyc::zero(); ncols];
        v[f] = Cyc::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -&m[r][f];
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| Cyc::from_int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.det(), Cyc::one());
        assert!(a.mul(&a.inverse().unwrap()).is_identity());
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn order_of_rotation() {
        let r = m(&[&[0, -1], &[1, 0]]);
        assert_eq!(r.order(10), Some(4));
        assert_eq!(m(&[&[1, 1], &[0, 1]]).order(50), None);
    }

    #[test]
    fn nullspace_dimension() {
        let rows = vec![vec![Cyc::from_int(1), Cyc::from_int(2), Cyc::from_int(3)]];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s = &(&v[0] + &(&v[1] * &Cyc::from_int(2))) + &(&v[2] * &Cyc::from_int(3));
            assert!(s.is_zero());
        }
    }
}
