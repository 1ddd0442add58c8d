//! Exact rational scalars and dense matrices.
//!
//! Everything downstream (graded maps, Hodge operators, the transfer
//! recursion) reduces to the handful of kernels in this module: reduced
//! row echelon form, linear solves with a deterministic normalization,
//! kernel bases, and the generalized inverse that vanishes on a
//! prescribed kernel. No floating point anywhere.

use num::{BigRational, One, Signed, Zero};

use crate::{Error, Result};

/// Field of coefficients: arbitrary-precision rationals, always in
/// lowest terms with positive denominator.
pub type Scalar = BigRational;

/// Shorthand for an integer scalar.
pub fn scalar_int(n: i64) -> Scalar {
    BigRational::from_integer(n.into())
}

/// Shorthand for the fraction `n/d`. Panics if `d == 0`.
pub fn scalar_ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(n.into(), d.into())
}

/// Dense row-major matrix over [`Scalar`]. Empty shapes (`0×n`, `n×0`)
/// are legal and compose like any other matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix { rows, cols, entries }
    }

    /// Builds from a full list of rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
        }
        Matrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds the matrix whose columns are the given vectors (all of
    /// length `rows`).
    pub fn from_cols(rows: usize, cols: Vec<Vec<Scalar>>) -> Self {
        for col in &cols {
            assert_eq!(col.len(), rows, "column of wrong length");
        }
        Matrix::from_fn(rows, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| scalar_int(n)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                if self.get(r, c) != self.get(c, r) {
                    return false;
                }
            }
        }
        true
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) + other.get(r, c))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) - other.get(r, c))
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |r, c| -self.get(r, c).clone())
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) * s)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(r, c) + a * b;
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        let mut out = vec![Scalar::zero(); self.rows];
        for r in 0..self.rows {
            let mut acc = Scalar::zero();
            for c in 0..self.cols {
                if !v[c].is_zero() {
                    acc += self.get(r, c) * &v[c];
                }
            }
            out[r] = acc;
        }
        out
    }

    /// Reduced row echelon form, returned with the pivot column list.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..m.cols {
            if lead >= m.rows {
                break;
            }
            // first nonzero entry at or below `lead`
            let Some(pivot_row) = (lead..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(lead, pivot_row);
            let inv = m.get(lead, col).recip();
            m.scale_row(lead, &inv);
            for r in 0..m.rows {
                if r != lead && !m.get(r, col).is_zero() {
                    let factor = m.get(r, col).clone();
                    m.row_axpy(r, lead, &(-factor));
                }
            }
            pivots.push(col);
            lead += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: &Scalar) {
        for c in 0..self.cols {
            let v = self.get(r, c) * s;
            self.set(r, c, v);
        }
    }

    /// row[r] += s * row[src]
    fn row_axpy(&mut self, r: usize, src: usize, s: &Scalar) {
        for c in 0..self.cols {
            let v = self.get(r, c) + self.get(src, c) * s;
            self.set(r, c, v);
        }
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Deterministic basis of the null space: the standard reduced-row-
    /// echelon kernel basis, one vector per free column in increasing
    /// column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![Scalar::zero(); self.cols];
            vec[free] = Scalar::one();
            for (col, slot) in pivot_set.iter().enumerate() {
                if let Some(row) = slot {
                    vec[col] = -r.get(*row, free).clone();
                }
            }
            basis.push(vec);
        }
        basis
    }

    /// Solves `A·x = b` exactly. Returns `None` when inconsistent; for
    /// underdetermined systems the free variables (in reduced-row-echelon
    /// pivot order) are set to zero.
    pub fn solve_linear(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "solve_linear: matrix has {} rows, rhs has length {}",
                    self.rows,
                    b.len()
                ),
            });
        }
        let rhs = Matrix::from_cols(self.rows, vec![b.to_vec()]);
        Ok(self.solve_matrix(&rhs)?.map(|m| m.col(0)))
    }

    /// Columnwise [`Matrix::solve_linear`]: finds `X` with `A·X = B`, or
    /// `None` if any column is inconsistent.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Option<Matrix>> {
        if b.rows() != self.rows {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "solve_matrix: matrix has {} rows, rhs has {}",
                    self.rows,
                    b.rows()
                ),
            });
        }
        // Row reduce the augmented matrix [A | B] in one pass.
        let aug = Matrix::from_fn(self.rows, self.cols + b.cols(), |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                b.get(r, c - self.cols).clone()
            }
        });
        let (red, pivots) = aug.rref();
        // A pivot in the augmented block means an inconsistent column.
        if pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.cols, b.cols());
        for (row, &col) in pivots.iter().enumerate() {
            for k in 0..b.cols() {
                x.set(col, k, red.get(row, self.cols + k).clone());
            }
        }
        Ok(Some(x))
    }

    /// Exact inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        self.solve_matrix(&Matrix::identity(self.rows))
            .expect("square shapes agree")
            .filter(|x| self.mul(x) == Matrix::identity(self.rows))
    }

    /// Positive definiteness via the LDLᵀ pivots: symmetric, and every
    /// pivot strictly positive.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.rows;
        let mut a = self.clone();
        for k in 0..n {
            let pivot = a.get(k, k).clone();
            if !pivot.is_positive() {
                return false;
            }
            for i in (k + 1)..n {
                let factor = a.get(i, k) / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = a.get(i, j) - &factor * a.get(k, j);
                    a.set(i, j, v);
                }
            }
        }
        true
    }
}

/// Gram-orthogonal projector onto the span of `basis` (vectors in
/// ambient coordinates): `K (KᵀGK)⁻¹ KᵀG`. The empty span yields the
/// zero projector.
pub fn gram_projector(dim: usize, basis: &[Vec<Scalar>], gram: &Matrix) -> Result<Matrix> {
    if basis.is_empty() {
        return Ok(Matrix::zeros(dim, dim));
    }
    let k = Matrix::from_cols(dim, basis.to_vec());
    let ktg = k.transpose().mul(gram);
    let small = ktg.mul(&k);
    let inv = small.inverse().ok_or_else(|| Error::DimensionMismatch {
        context: "gram_projector: basis not linearly independent".into(),
    })?;
    Ok(k.mul(&inv).mul(&ktg))
}

/// Generalized inverse of a gram-self-adjoint operator `A`: the unique
/// `B` with `B·A = A·B = 1 − Π` and `B = 0` on `ker A`, where `Π` is the
/// gram-orthogonal projector onto the prescribed kernel.
pub fn invert_on_complement(a: &Matrix, kernel: &[Vec<Scalar>], gram: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if a.cols() != n || gram.rows() != n || gram.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "invert_on_complement: square shapes required".into(),
        });
    }
    if !gram.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    // A must be self-adjoint w.r.t. the gram: Aᵀ G = G A.
    if a.transpose().mul(gram) != gram.mul(a) {
        return Err(Error::NotSelfAdjoint);
    }
    // The prescribed vectors must be an actual basis of ker A.
    for v in kernel {
        if v.len() != n || !a.mul_vec(v).iter().all(Scalar::is_zero) {
            return Err(Error::KernelMismatch);
        }
    }
    let nullity = a.kernel_basis().len();
    if kernel.len() != nullity
        || (!kernel.is_empty() && Matrix::from_cols(n, kernel.to_vec()).rank() != kernel.len())
    {
        return Err(Error::KernelMismatch);
    }
    let proj = gram_projector(n, kernel, gram)?;
    // A + Π is invertible: it acts as the identity on ker A and as A on
    // the gram-orthogonal complement.
    let shifted = a.add(&proj);
    let inv = shifted.inverse().ok_or(Error::KernelMismatch)?;
    Ok(inv.mul(&Matrix::identity(n).sub(&proj)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_int_rows(rows)
    }

    #[test]
    fn solve_identity() {
        let a = Matrix::identity(2);
        let b = vec![scalar_int(3), scalar_ratio(-1, 2)];
        let x = a.solve_linear(&b).unwrap().unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_inconsistent() {
        let a = m(&[&[1, 1], &[2, 2]]);
        let b = vec![scalar_int(1), scalar_int(3)];
        assert_eq!(a.solve_linear(&b).unwrap(), None);
    }

    #[test]
    fn solve_diagonal() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let b = vec![scalar_int(1), scalar_int(1)];
        let x = a.solve_linear(&b).unwrap().unwrap();
        // oracle: substitute back
        assert_eq!(a.mul_vec(&x), b);
        assert_eq!(x, vec![scalar_ratio(1, 2), scalar_ratio(1, 3)]);
    }

    #[test]
    fn solve_underdetermined_sets_free_vars_to_zero() {
        let a = m(&[&[1, 1]]);
        let x = a.solve_linear(&[scalar_int(5)]).unwrap().unwrap();
        assert_eq!(x, vec![scalar_int(5), scalar_int(0)]);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let a = Matrix::identity(2);
        assert!(a.solve_linear(&[scalar_int(1)]).is_err());
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(Matrix::identity(3).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_zero_matrix() {
        let basis = Matrix::zeros(2, 2).kernel_basis();
        assert_eq!(basis.len(), 2);
        assert_eq!(Matrix::from_cols(2, basis).rank(), 2);
    }

    #[test]
    fn kernel_of_row_vector() {
        let a = m(&[&[1, 1]]);
        let basis = a.kernel_basis();
        assert_eq!(basis.len(), 1);
        assert!(a.mul_vec(&basis[0]).iter().all(Scalar::is_zero));
        assert_eq!(a.rank() + basis.len(), a.cols());
        // spans (1, -1)
        assert_eq!(&basis[0][0] + &basis[0][1], Scalar::zero());
    }

    #[test]
    fn rank_cases() {
        assert_eq!(Matrix::identity(4).rank(), 4);
        assert_eq!(Matrix::zeros(3, 2).rank(), 0);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn empty_shapes_compose() {
        let a = Matrix::zeros(0, 3);
        let b = Matrix::zeros(3, 2);
        let c = a.mul(&b);
        assert_eq!((c.rows(), c.cols()), (0, 2));
        assert_eq!(a.rank(), 0);
        assert_eq!(a.kernel_basis().len(), 3);
        assert_eq!(a.solve_linear(&[]).unwrap(), Some(vec![Scalar::zero(); 3]));
    }

    #[test]
    fn invert_on_complement_identity() {
        let a = Matrix::identity(3);
        let b = invert_on_complement(&a, &[], &Matrix::identity(3)).unwrap();
        assert_eq!(b, Matrix::identity(3));
    }

    #[test]
    fn invert_on_complement_diagonal() {
        let a = m(&[&[0, 0], &[0, 2]]);
        let kernel = vec![vec![scalar_int(1), scalar_int(0)]];
        let b = invert_on_complement(&a, &kernel, &Matrix::identity(2)).unwrap();
        let expected = Matrix::from_rows(vec![
            vec![scalar_int(0), scalar_int(0)],
            vec![scalar_int(0), scalar_ratio(1, 2)],
        ]);
        assert_eq!(b, expected);
    }

    #[test]
    fn invert_on_complement_general() {
        // gram-self-adjoint PSD operator with nontrivial kernel: CᵀC
        let c = m(&[&[1, 1, 0], &[0, 1, 1]]);
        let a = c.transpose().mul(&c);
        let kernel = a.kernel_basis();
        assert_eq!(kernel.len(), 1);
        let gram = Matrix::identity(3);
        let b = invert_on_complement(&a, &kernel, &gram).unwrap();
        let proj = gram_projector(3, &kernel, &gram).unwrap();
        let id = Matrix::identity(3);
        assert_eq!(b.mul(&a).add(&proj), id);
        assert_eq!(a.mul(&b).add(&proj), id);
        assert_eq!(b.mul(&a).mul(&b), b);
        assert_eq!(a.mul(&b).mul(&a), a);
        assert!(b.mul(&proj).is_zero());
    }

    #[test]
    fn invert_on_complement_rejects_wrong_kernel() {
        let a = m(&[&[0, 0], &[0, 2]]);
        // claims empty kernel although nullity is 1
        assert!(matches!(
            invert_on_complement(&a, &[], &Matrix::identity(2)),
            Err(Error::KernelMismatch)
        ));
    }

    #[test]
    fn invert_on_complement_rejects_indefinite_gram() {
        let a = Matrix::identity(2);
        let gram = m(&[&[1, 0], &[0, -1]]);
        assert!(matches!(
            invert_on_complement(&a, &[], &gram),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn positive_definite_check() {
        assert!(m(&[&[2, 1], &[1, 2]]).is_positive_definite());
        assert!(!m(&[&[1, 2], &[2, 1]]).is_positive_definite());
        assert!(!m(&[&[0, 0], &[0, 1]]).is_positive_definite());
        assert!(!m(&[&[1, 2], &[3, 4]]).is_positive_definite());
    }

    prop_compose! {
        fn small_scalar()(num in -4i64..=4, den in 1i64..=3) -> Scalar {
            scalar_ratio(num, den)
        }
    }

    prop_compose! {
        fn small_matrix(max_dim: usize)
            (rows in 0..=max_dim, cols in 0..=max_dim)
            (entries in prop::collection::vec(small_scalar(), rows * cols),
             rows in Just(rows), cols in Just(cols))
            -> Matrix
        {
            let mut it = entries.into_iter();
            Matrix::from_fn(rows, cols, |_, _| it.next().unwrap())
        }
    }

    proptest! {
        #[test]
        fn rank_nullity(a in small_matrix(5)) {
            prop_assert_eq!(a.rank() + a.kernel_basis().len(), a.cols());
        }

        #[test]
        fn kernel_vectors_are_in_the_kernel(a in small_matrix(5)) {
            for v in a.kernel_basis() {
                prop_assert!(a.mul_vec(&v).iter().all(Scalar::is_zero));
            }
        }

        #[test]
        fn solve_satisfies_system(
            (a, x) in small_matrix(4).prop_flat_map(|a| {
                let cols = a.cols();
                (Just(a), prop::collection::vec(small_scalar(), cols))
            })
        ) {
            // Build a solvable system by construction.
            let b = a.mul_vec(&x);
            let sol = a.solve_linear(&b).unwrap().expect("consistent by construction");
            prop_assert_eq!(a.mul_vec(&sol), b);
        }

        #[test]
        fn generalized_inverse_identities(c in small_matrix(4)) {
            // a = cᵀ·c is self-adjoint PSD w.r.t. the identity gram
            let a = c.transpose().mul(&c);
            let n = a.rows();
            let gram = Matrix::identity(n);
            let kernel = a.kernel_basis();
            let b = invert_on_complement(&a, &kernel, &gram).unwrap();
            prop_assert_eq!(b.mul(&a).mul(&b), b.clone());
            prop_assert_eq!(a.mul(&b).mul(&a), a.clone());
            let proj = gram_projector(n, &kernel, &gram).unwrap();
            prop_assert_eq!(b.mul(&a).add(&proj), Matrix::identity(n));
        }
    }
}
