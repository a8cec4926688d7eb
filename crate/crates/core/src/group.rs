//! Finite linear groups and their per-element fixed-point geometry.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::linear::{rank, rref, Mat};
use crate::poly::Poly;
use crate::scalar::{lcm, Cyc};

pub const DEFAULT_SIZE_LIMIT: usize = 64;

/// Per-element splitting V = V^g + N^g in an eigenbasis of g.
#[derive(Clone, Debug)]
pub struct FixedPointData {
    pub element: usize,
    /// Basis of V^g, as column vectors.
    pub fixed_basis: Vec<Vec<Cyc>>,
    /// Eigenbasis of N^g, as column vectors.
    pub normal_basis: Vec<Vec<Cyc>>,
    /// g b = lambda b for the matching normal basis vector.
    pub normal_eigenvalues: Vec<Cyc>,
    pub codim: usize,
    /// Product of the normal eigenvalues.
    pub det_normal: Cyc,
    /// Columns [fixed | normal]; eigencoordinates are u = basis_inv * v.
    pub basis: Mat,
    pub basis_inv: Mat,
    /// True when the normal basis also diagonalizes the centralizer.
    pub simultaneous: bool,
}

impl FixedPointData {
    pub fn fixed_dim(&self) -> usize {
        self.fixed_basis.len()
    }

    /// Indices of the normal eigencoordinates (the y's).
    pub fn normal_indices(&self) -> Vec<usize> {
        (self.fixed_dim()..self.fixed_dim() + self.codim).collect()
    }

    pub fn fixed_indices(&self) -> Vec<usize> {
        (0..self.fixed_dim()).collect()
    }

    /// Scalars eps with g . y^j = eps_j y^j for the normal coordinate functions.
    pub fn function_eigenvalues(&self) -> Vec<Cyc> {
        self.normal_eigenvalues.iter().map(|l| l.inv().unwrap()).collect()
    }

    /// The eigencoordinate function u^j written in standard coordinates.
    pub fn eigencoordinate(&self, j: usize) -> Poly {
        Poly::linear(self.basis_inv.row(j))
    }
}

#[derive(Clone, Debug)]
pub struct GroupActionContext {
    dim: usize,
    elements: Vec<Mat>,
    inverse_mats: Vec<Mat>,
    mult: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
    orders: Vec<u32>,
    exponent: u32,
    conductor: u32,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    centralizers: Vec<Vec<usize>>,
    fixed: Vec<FixedPointData>,
    labels: Vec<String>,
    generators: Vec<usize>,
    faithful: bool,
}

fn projector(g: &Mat, order: u32, lambda: &Cyc) -> Mat {
    let n = g.dim();
    let mut acc = Mat::from_rows(vec![vec![Cyc::zero(); n]; n]).unwrap();
    let li = lambda.inv().unwrap();
    let mut gk = Mat::identity(n);
    let mut c = Cyc::one();
    for _ in 0..order {
        acc = acc.add(&gk.scale(&c));
        gk = gk.mul(g);
        c = &c * &li;
    }
    acc.scale(&Cyc::frac(1, order as i64))
}

/// Basis of the column space of a matrix, normalized by row reduction so that
/// coordinate-aligned spaces come out as standard basis vectors.
fn column_space(m: &Mat) -> Vec<Vec<Cyc>> {
    let mut t: Vec<Vec<Cyc>> = m.transpose().rows().to_vec();
    let piv = rref(&mut t);
    t.truncate(piv.len());
    t
}

fn span_basis(vectors: &[Vec<Cyc>]) -> Vec<Vec<Cyc>> {
    let mut t = vectors.to_vec();
    let piv = rref(&mut t);
    t.truncate(piv.len());
    t
}

/// Eigenspaces of a finite-order matrix restricted to the span of `space`.
/// Returns None when the span is not invariant.
fn split_by(space: &[Vec<Cyc>], h: &Mat, order: u32) -> Option<Vec<(Cyc, Vec<Vec<Cyc>>)>> {
    let dim = space.len();
    let mut image: Vec<Vec<Cyc>> = space.to_vec();
    image.extend(space.iter().map(|v| h.apply(v)));
    if rank(&image) != dim {
        return None;
    }
    let mut out = Vec::new();
    let mut total = 0;
    for k in 0..order {
        let lambda = Cyc::root_of_unity(order, k as i64);
        let p = projector(h, order, &lambda);
        let imgs: Vec<Vec<Cyc>> = space.iter().map(|v| p.apply(v)).collect();
        let b = span_basis(&imgs);
        if !b.is_empty() {
            total += b.len();
            out.push((lambda, b));
        }
    }
    if total != dim {
        return None;
    }
    Some(out)
}

impl GroupActionContext {
    /// Closes the generators under multiplication.
    pub fn build(generators: &[Mat]) -> Result<Self> {
        Self::build_with_limit(generators, DEFAULT_SIZE_LIMIT)
    }

    pub fn build_with_limit(generators: &[Mat], limit: usize) -> Result<Self> {
        let n = generators.first().map(|g| g.dim()).unwrap_or(0);
        for g in generators {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
            }
        }
        let bound = (limit as u32).max(1) * 4;
        for (i, g) in generators.iter().enumerate() {
            if g.inverse().is_err() || g.order(bound).is_none() {
                return Err(Error::InfiniteOrder(i));
            }
        }
        let mut elements = vec![Mat::identity(n)];
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (gi, g) in generators.iter().enumerate() {
                let p = elements[i].mul(g);
                if !elements.contains(&p) {
                    if elements.len() >= limit {
                        return Err(Error::GroupTooLarge(limit));
                    }
                    let mut w = words[i].clone();
                    w.push(gi);
                    elements.push(p);
                    words.push(w);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        let size = elements.len();
        let mut mult = vec![vec![0; size]; size];
        for i in 0..size {
            for j in 0..size {
                let p = elements[i].mul(&elements[j]);
                mult[i][j] = elements.iter().position(|e| *e == p).expect("closure");
            }
        }
        let labels = words.iter().map(|w| word_label(w)).collect();
        let gens = generators
            .iter()
            .map(|g| elements.iter().position(|e| e == g).unwrap())
            .collect();
        Self::finish(n, elements, mult, labels, gens, true)
    }

    /// Direct product of cyclic groups Z_{orders[0]} x ... with the i-th factor
    /// generator acting by `matrices[i]`. Matrices of distinct labels may coincide,
    /// which models non-faithful actions.
    pub fn build_abelian(orders: &[u32], matrices: &[Mat]) -> Result<Self> {
        if orders.len() != matrices.len() || orders.is_empty() {
            return Err(Error::Invalid("one matrix per cyclic factor is required".into()));
        }
        let n = matrices[0].dim();
        for (i, (m, &o)) in matrices.iter().zip(orders).enumerate() {
            if m.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.dim() });
            }
            if !m.pow(o).is_identity() {
                return Err(Error::InfiniteOrder(i));
            }
        }
        let mut tuples: Vec<Vec<u32>> = vec![vec![]];
        for &o in orders {
            let mut next = Vec::new();
            for t in &tuples {
                for k in 0..o {
                    let mut t2 = t.clone();
                    t2.push(k);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        let index: HashMap<Vec<u32>, usize> = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let elements: Vec<Mat> = tuples
            .iter()
            .map(|t| {
                let mut m = Mat::identity(n);
                for (i, &k) in t.iter().enumerate() {
                    m = m.mul(&matrices[i].pow(k));
                }
                m
            })
            .collect();
        let size = tuples.len();
        let mut mult = vec![vec![0; size]; size];
        for i in 0..size {
            for j in 0..size {
                let t: Vec<u32> = tuples[i].iter().zip(&tuples[j]).zip(orders).map(|((a, b), o)| (a + b) % o).collect();
                mult[i][j] = index[&t];
            }
        }
        let labels = tuples
            .iter()
            .map(|t| {
                let w: Vec<usize> = t.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat(i).take(k as usize)).collect();
                word_label(&w)
            })
            .collect();
        let gens = (0..orders.len())
            .map(|i| {
                let mut t = vec![0; orders.len()];
                t[i] = 1 % orders[i];
                index[&t]
            })
            .collect();
        let faithful = (0..size).all(|i| (0..i).all(|j| elements[i] != elements[j]));
        Self::finish(n, elements, mult, labels, gens, faithful)
    }

    fn finish(
        dim: usize,
        elements: Vec<Mat>,
        mult: Vec<Vec<usize>>,
        labels: Vec<String>,
        generators: Vec<usize>,
        faithful: bool,
    ) -> Result<Self> {
        let size = elements.len();
        let identity = (0..size).find(|&i| (0..size).all(|j| mult[i][j] == j)).expect("identity element");
        let inv: Vec<usize> = (0..size).map(|i| (0..size).find(|&j| mult[i][j] == identity).unwrap()).collect();
        let orders: Vec<u32> = (0..size)
            .map(|i| {
                let mut k = 1;
                let mut p = i;
                while p != identity {
                    p = mult[p][i];
                    k += 1;
                }
                k
            })
            .collect();
        let exponent = orders.iter().fold(1, |a, &b| lcm(a, b));
        let inverse_mats: Vec<Mat> = inv.iter().map(|&j| elements[j].clone()).collect();
        let mut class_of = vec![usize::MAX; size];
        let mut classes = Vec::new();
        for g in 0..size {
            if class_of[g] != usize::MAX {
                continue;
            }
            let mut cls = Vec::new();
            for k in 0..size {
                let c = mult[mult[inv[k]][g]][k];
                if class_of[c] == usize::MAX {
                    class_of[c] = classes.len();
                    cls.push(c);
                }
            }
            cls.sort();
            classes.push(cls);
        }
        let centralizers: Vec<Vec<usize>> =
            (0..size).map(|g| (0..size).filter(|&h| mult[g][h] == mult[h][g]).collect()).collect();
        let mut ctx = GroupActionContext {
            dim,
            elements,
            inverse_mats,
            mult,
            inv,
            identity,
            orders,
            exponent,
            conductor: 1,
            classes,
            class_of,
            centralizers,
            fixed: Vec::new(),
            labels,
            generators,
            faithful,
        };
        ctx.conductor = ctx.elements.iter().map(|m| m.order(4 * ctx.exponent.max(1)).unwrap_or(1)).fold(1, lcm);
        ctx.fixed = ctx.compute_fixed_data();
        Ok(ctx)
    }

    fn eigen_split(&self, g: usize) -> Vec<(Cyc, Vec<Vec<Cyc>>)> {
        let m = &self.elements[g];
        let ord = m.order(4 * self.exponent.max(1)).unwrap();
        let mut out = Vec::new();
        for k in 0..ord {
            let lambda = Cyc::root_of_unity(ord, k as i64);
            let b = column_space(&projector(m, ord, &lambda));
            if !b.is_empty() {
                out.push((lambda, b));
            }
        }
        out
    }

    fn compute_fixed_data(&self) -> Vec<FixedPointData> {
        let size = self.size();
        let mut data: Vec<Option<FixedPointData>> = vec![None; size];
        for cls in &self.classes {
            let g = cls[0];
            let split = self.eigen_split(g);
            let mut fixed_basis = Vec::new();
            let mut pieces: Vec<(Cyc, Vec<Vec<Cyc>>)> = Vec::new();
            for (lambda, b) in split {
                if lambda.is_one() {
                    fixed_basis = b;
                } else {
                    pieces.push((lambda, b));
                }
            }
            // Refine the normal eigenspaces by the centralizer.
            let mut simultaneous = true;
            let mut refined = pieces.clone();
            'outer: for _ in 0..2 {
                for &h in &self.centralizers[g] {
                    let hm = &self.elements[h];
                    let ord = self.orders[h].max(hm.order(4 * self.exponent.max(1)).unwrap());
                    let mut next = Vec::new();
                    for (lambda, space) in &refined {
                        match split_by(space, hm, ord) {
                            Some(parts) => {
                                for (_, b) in parts {
                                    next.push((lambda.clone(), b));
                                }
                            }
                            None => {
                                simultaneous = false;
                                break 'outer;
                            }
                        }
                    }
                    refined = next;
                }
            }
            if !simultaneous {
                refined = pieces;
            }
            let mut normal_basis = Vec::new();
            let mut normal_eigenvalues = Vec::new();
            for (lambda, b) in refined {
                for v in b {
                    normal_basis.push(v);
                    normal_eigenvalues.push(lambda.clone());
                }
            }
            for &c in cls {
                // c = k^{-1} g k; transport the basis by k^{-1}.
                let k = (0..size).find(|&k| self.mult[self.mult[self.inv[k]][g]][k] == c).unwrap();
                let ki = &self.elements[self.inv[k]];
                let fb: Vec<Vec<Cyc>> = fixed_basis.iter().map(|v| ki.apply(v)).collect();
                let nb: Vec<Vec<Cyc>> = normal_basis.iter().map(|v| ki.apply(v)).collect();
                data[c] = Some(self.make_data(c, fb, nb, normal_eigenvalues.clone(), simultaneous));
            }
        }
        data.into_iter().map(|d| d.unwrap()).collect()
    }

    fn make_data(
        &self,
        g: usize,
        fixed_basis: Vec<Vec<Cyc>>,
        normal_basis: Vec<Vec<Cyc>>,
        normal_eigenvalues: Vec<Cyc>,
        simultaneous: bool,
    ) -> FixedPointData {
        let mut cols = fixed_basis.clone();
        cols.extend(normal_basis.iter().cloned());
        let basis = Mat::from_cols(&cols).unwrap();
        let basis_inv = basis.inverse().expect("eigenbasis is a basis");
        let det_normal = normal_eigenvalues.iter().fold(Cyc::one(), |a, b| &a * b);
        FixedPointData {
            element: g,
            codim: normal_basis.len(),
            fixed_basis,
            normal_basis,
            normal_eigenvalues,
            det_normal,
            basis,
            basis_inv,
            simultaneous,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn matrix(&self, g: usize) -> &Mat {
        &self.elements[g]
    }

    pub fn inverse_matrix(&self, g: usize) -> &Mat {
        &self.inverse_mats[g]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// h^{-1} g h.
    pub fn conj(&self, h: usize, g: usize) -> usize {
        self.mult[self.mult[self.inv[h]][g]][h]
    }

    pub fn order(&self, g: usize) -> u32 {
        self.orders[g]
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Conductor N of Q(zeta_N) containing every eigenvalue.
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn centralizer(&self, g: usize) -> &[usize] {
        &self.centralizers[g]
    }

    pub fn fixed(&self, g: usize) -> &FixedPointData {
        &self.fixed[g]
    }

    pub fn codim(&self, g: usize) -> usize {
        self.fixed[g].codim
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.size()).all(|a| (0..self.size()).all(|b| self.mult[a][b] == self.mult[b][a]))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size()
    }

    /// Looks an element up from a product of generator powers.
    pub fn element_from_word(&self, word: &[(usize, i64)]) -> Result<usize> {
        let mut acc = self.identity;
        for &(gi, p) in word {
            let g = *self.generators.get(gi).ok_or_else(|| Error::Invalid(format!("no generator g{}", gi + 1)))?;
            let base = if p < 0 { self.inv[g] } else { g };
            for _ in 0..p.unsigned_abs() {
                acc = self.mult[acc][base];
            }
        }
        Ok(acc)
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// g . f with (g . f)(v) = f(g^{-1} v).
    pub fn act(&self, g: usize, f: &Poly) -> Poly {
        if g == self.identity {
            return f.clone();
        }
        f.substitute(&self.inverse_mats[g]).expect("dimension checked at build")
    }

    /// The set S of elements whose fixed subspace has codimension 2.
    pub fn codim2_set(&self) -> Vec<usize> {
        self.elements().filter(|&g| self.codim(g) == 2).collect()
    }

    /// No non-identity element fixes an open set, i.e. acts trivially.
    pub fn is_reduced(&self) -> bool {
        self.elements().all(|g| g == self.identity || self.codim(g) > 0)
    }

    /// Determinant of h restricted to N^g (h must centralize g).
    pub fn det_on_normal(&self, g: usize, h: usize) -> Cyc {
        let fd = &self.fixed[g];
        let m = fd.basis_inv.mul(&self.elements[h]).mul(&fd.basis);
        let idx = fd.normal_indices();
        m.minor(&idx, &idx)
    }

    /// dim(V^a + V^b) computed from the fixed bases.
    pub fn fixed_sum_dim(&self, a: usize, b: usize) -> usize {
        let mut v = self.fixed[a].fixed_basis.clone();
        v.extend(self.fixed[b].fixed_basis.iter().cloned());
        rank(&v)
    }

    /// dim(V^a intersected with V^b).
    pub fn fixed_intersection_dim(&self, a: usize, b: usize) -> usize {
        let da = self.fixed[a].fixed_dim();
        let db = self.fixed[b].fixed_dim();
        da + db - self.fixed_sum_dim(a, b)
    }

    /// V^a + V^b = V.
    pub fn transverse(&self, a: usize, b: usize) -> bool {
        self.fixed_sum_dim(a, b) == self.dim
    }

    pub fn all_simultaneous(&self) -> bool {
        self.fixed.iter().all(|f| f.simultaneous)
    }
}

fn word_label(w: &[usize]) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    let mut counts: Vec<(usize, usize)> = Vec::new();
    let mut sorted = w.to_vec();
    sorted.sort();
    for g in sorted {
        match counts.last_mut() {
            Some((h, c)) if *h == g => *c += 1,
            _ => counts.push((g, 1)),
        }
    }
    counts
        .iter()
        .map(|&(g, c)| if c == 1 { format!("g{}", g + 1) } else { format!("g{}^{}", g + 1, c) })
        .collect::<Vec<_>>()
        .join("*")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[Cyc]) -> Mat {
        Mat::diag(d)
    }

    #[test]
    fn minus_identity_in_two_dims() {
        let g = diag(&[Cyc::from_int(-1), Cyc::from_int(-1)]);
        let ctx = GroupActionContext::build(&[g]).unwrap();
        assert_eq!(ctx.size(), 2);
        let s = ctx.elements().find(|&x| x != ctx.identity()).unwrap();
        assert_eq!(ctx.codim(s), 2);
        assert_eq!(ctx.fixed(s).det_normal, Cyc::one());
        assert_eq!(ctx.codim2_set(), vec![s]);
        assert!(ctx.is_reduced());
        assert_eq!(ctx.codim(ctx.identity()), 0);
    }

    #[test]
    fn cyclic_closure() {
        for n in 2..=6u32 {
            let z = Cyc::root_of_unity(n, 1);
            let ctx = GroupActionContext::build(&[diag(&[z.clone(), z.inv().unwrap()])]).unwrap();
            assert_eq!(ctx.size(), n as usize);
            assert_eq!(ctx.exponent(), n);
        }
    }

    #[test]
    fn trivial_group_has_empty_s() {
        let ctx = GroupActionContext::build(&[Mat::identity(2)]).unwrap();
        assert_eq!(ctx.size(), 1);
        assert!(ctx.codim2_set().is_empty());
    }

    #[test]
    fn non_faithful_label_is_not_reduced() {
        let flip = diag(&[Cyc::from_int(-1), Cyc::from_int(-1)]);
        let ctx = GroupActionContext::build_abelian(&[2, 2], &[flip, Mat::identity(2)]).unwrap();
        assert_eq!(ctx.size(), 4);
        assert!(!ctx.is_faithful());
        assert!(!ctx.is_reduced());
    }

    #[test]
    fn infinite_order_rejected() {
        let shear = Mat::from_rows(vec![vec![Cyc::one(), Cyc::one()], vec![Cyc::zero(), Cyc::one()]]).unwrap();
        assert!(matches!(GroupActionContext::build(&[shear]), Err(Error::InfiniteOrder(0))));
    }

    #[test]
    fn size_limit() {
        let z = Cyc::root_of_unity(12, 1);
        let g = diag(&[z.clone(), z.inv().unwrap()]);
        assert!(matches!(GroupActionContext::build_with_limit(&[g], 5), Err(Error::GroupTooLarge(5))));
    }

    #[test]
    fn dihedral_classes() {
        // D4 acting on the plane: rotation by 90 degrees and a reflection.
        let r = Mat::from_rows(vec![vec![Cyc::zero(), Cyc::from_int(-1)], vec![Cyc::one(), Cyc::zero()]]).unwrap();
        let s = diag(&[Cyc::one(), Cyc::from_int(-1)]);
        let ctx = GroupActionContext::build(&[r, s]).unwrap();
        assert_eq!(ctx.size(), 8);
        assert_eq!(ctx.classes().len(), 5);
        for g in ctx.elements() {
            for h in ctx.elements() {
                assert_eq!(ctx.codim(g), ctx.codim(ctx.conj(h, g)));
            }
            let fd = ctx.fixed(g);
            for (b, l) in fd.normal_basis.iter().zip(&fd.normal_eigenvalues) {
                let gb = ctx.matrix(g).apply(b);
                let lb: Vec<Cyc> = b.iter().map(|x| x * l).collect();
                assert_eq!(gb, lb);
            }
            for b in &fd.fixed_basis {
                assert_eq!(&ctx.matrix(g).apply(b), b);
            }
        }
    }
}
