use rand::Rng;

use super::matrix::{solve_raw, Matrix};
use super::{LinalgError, OpCounter, Vector};
use crate::codec::{CodecError, Reader, Writer};
use crate::field::{FieldElement, PrimeField, U256};

/// Whether a projection may use the Gram matrix cached at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramCache {
    /// Reuse the cached Gram matrix: `n` inner products per projection.
    Warm,
    /// Recompute the Gram matrix, exploiting symmetry: `(n^2 + 3n) / 2`.
    Cold,
}

/// A basis of an `n`-dimensional subspace `W` of `F_q^m` whose Gram matrix is
/// invertible. The Gram matrix is computed once and cached.
#[derive(Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    field: PrimeField,
    ambient_dim: usize,
    vectors: Vec<Vector>,
    gram: Matrix,
}

impl SubspaceBasis {
    pub fn new(vectors: Vec<Vector>) -> Result<Self, LinalgError> {
        let first = vectors
            .first()
            .ok_or_else(|| LinalgError::ParameterError("a basis needs at least one vector".into()))?;
        for v in &vectors[1..] {
            first.compatible(v)?;
        }
        let (field, m, n) = (first.field().clone(), first.dim(), vectors.len());
        if n > m {
            return Err(LinalgError::ParameterError(format!("{n} vectors cannot be independent in dimension {m}")));
        }
        if Matrix::from_rows(&vectors)?.rank() < n {
            return Err(LinalgError::DependentVectors);
        }
        let gram = gram_matrix(&field, &vectors, &mut OpCounter::new());
        if !gram.is_invertible() {
            return Err(LinalgError::SingularGram);
        }
        Ok(SubspaceBasis { field, ambient_dim: m, vectors, gram })
    }

    /// Draws `n` uniform vectors, resampling the whole batch until they are
    /// independent with an invertible Gram matrix.
    pub fn random<R: Rng + ?Sized>(field: &PrimeField, m: usize, n: usize, rng: &mut R) -> Result<Self, LinalgError> {
        if n == 0 || n > m {
            return Err(LinalgError::ParameterError(format!("need 1 <= n <= m, got n = {n}, m = {m}")));
        }
        loop {
            let batch = (0..n).map(|_| Vector::random(field, m, rng)).collect();
            match Self::new(batch) {
                Ok(b) => return Ok(b),
                Err(LinalgError::DependentVectors | LinalgError::SingularGram) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// `n = dim W`
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// `m = dim E`
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    fn check_input(&self, v: &Vector) -> Result<(), LinalgError> {
        self.field.check(v.field())?;
        if v.dim() != self.ambient_dim {
            return Err(LinalgError::DimensionMismatch { expected: self.ambient_dim, found: v.dim() });
        }
        Ok(())
    }

    /// Projection through the normal equations `Gram · a = (<v, b_i>)_i`.
    pub fn project_solve(&self, v: &Vector, cache: GramCache, counter: &mut OpCounter) -> Result<Vector, LinalgError> {
        self.check_input(v)?;
        let n = self.dim();
        let cold;
        let gram = match cache {
            GramCache::Warm => &self.gram,
            GramCache::Cold => {
                cold = gram_matrix(&self.field, &self.vectors, counter);
                &cold
            }
        };
        let rhs: Vec<U256> = self.vectors.iter().map(|b| v.dot_raw(b)).collect();
        counter.inner_products += n as u64;
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(*gram.raw(i, j));
            }
        }
        let coeffs = solve_raw(self.field.raw(), n, &a, &rhs).ok_or(LinalgError::SingularGram)?;
        counter.solves += 1;
        Ok(self.combine(&coeffs, &self.vectors))
    }

    /// Warm-cache projection with a throwaway counter.
    pub fn project(&self, v: &Vector) -> Result<Vector, LinalgError> {
        self.project_solve(v, GramCache::Warm, &mut OpCounter::new())
    }

    /// Projection through an orthogonalized basis.
    ///
    /// Orthogonalization is the textbook process without normalization: step
    /// `i` computes `<b_i, b'_j>` and `<b'_j, b'_j>` for every `j < i`, which
    /// totals `n^2 - n` inner products. The coefficient pass adds `n` more
    /// (`<v, b'_i>`). The last self-product `<b'_n, b'_n>` is never formed as
    /// an inner product; it follows from the cached diagonal entry,
    /// `<b'_n, b'_n> = <b_n, b_n> - Σ_j <b_n, b'_j>^2 / <b'_j, b'_j>`.
    ///
    /// Fails with [`LinalgError::IsotropicVector`] when some `<b'_j, b'_j>`
    /// vanishes; [`Self::project_solve`] has no such failure mode.
    pub fn project_gram_schmidt(&self, v: &Vector, counter: &mut OpCounter) -> Result<Vector, LinalgError> {
        self.check_input(v)?;
        let f = self.field.raw();
        let n = self.dim();
        let mut ortho: Vec<Vector> = Vec::with_capacity(n);
        let mut norms = vec![U256::ZERO; n];
        let mut last_cross = Vec::new();
        for (i, b) in self.vectors.iter().enumerate() {
            let mut w = b.clone();
            for j in 0..i {
                let cross = b.dot_raw(&ortho[j]);
                let norm = ortho[j].dot_raw(&ortho[j]);
                counter.inner_products += 2;
                let norm_inv = f.inv(&norm).ok_or(LinalgError::IsotropicVector { index: j })?;
                let mu = f.mul(&cross, &norm_inv);
                w.axpy(&f.neg(&mu), &ortho[j]);
                if i == n - 1 {
                    norms[j] = norm;
                    last_cross.push((cross, norm_inv));
                }
            }
            ortho.push(w);
        }
        let last = n - 1;
        norms[last] = last_cross.iter().fold(*self.gram.raw(last, last), |acc, (c, ninv)| {
            f.sub(&acc, &f.mul(&f.mul(c, c), ninv))
        });

        let mut coeffs = Vec::with_capacity(n);
        for (i, w) in ortho.iter().enumerate() {
            let num = v.dot_raw(w);
            counter.inner_products += 1;
            let inv = f.inv(&norms[i]).ok_or(LinalgError::IsotropicVector { index: i })?;
            coeffs.push(f.mul(&num, &inv));
        }
        Ok(self.combine(&coeffs, &ortho))
    }

    fn combine(&self, coeffs: &[U256], vectors: &[Vector]) -> Vector {
        let mut g = Vector::zero(&self.field, self.ambient_dim);
        for (a, b) in coeffs.iter().zip(vectors) {
            if !a.is_zero() {
                g.axpy(a, b);
            }
        }
        g
    }

    /// `v ∈ W` iff `v` is its own projection.
    pub fn is_member(&self, v: &Vector) -> Result<bool, LinalgError> {
        Ok(self.project(v)? == *v)
    }

    /// Uniform vector of `E` outside `W`.
    pub fn sample_outside<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vector, LinalgError> {
        if self.dim() == self.ambient_dim {
            return Err(LinalgError::SubspaceIsAmbient);
        }
        loop {
            let v = Vector::random(&self.field, self.ambient_dim, rng);
            if !self.is_member(&v)? {
                return Ok(v);
            }
        }
    }

    /// Every vector multiplied by a nonzero scalar `c`. The Gram matrix scales
    /// by `c^2`, so no inner products are recomputed.
    pub fn scaled(&self, c: &FieldElement) -> Result<Self, LinalgError> {
        self.field.check(c.field())?;
        if c.is_zero() {
            return Err(LinalgError::ParameterError("scaling by zero collapses the basis".into()));
        }
        let cv = c.value();
        let c2 = self.field.raw().mul(&cv, &cv);
        Ok(SubspaceBasis {
            field: self.field.clone(),
            ambient_dim: self.ambient_dim,
            vectors: self.vectors.iter().map(|v| v.scale_raw(&cv)).collect(),
            gram: self.gram.scale_raw(&c2),
        })
    }

    /// New basis with rows `b'_i = Σ_j M_ij b_j`.
    pub fn change_basis(&self, m: &Matrix) -> Result<Self, LinalgError> {
        self.field.check(m.field())?;
        let n = self.dim();
        if m.rows() != n || m.cols() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, found: m.rows().max(m.cols()) });
        }
        let rows = (0..n)
            .map(|i| {
                let coeffs: Vec<U256> = (0..n).map(|j| *m.raw(i, j)).collect();
                self.combine(&coeffs, &self.vectors)
            })
            .collect();
        Self::new(rows)
    }

    /// True when both bases span the same subspace.
    pub fn spans_same(&self, other: &SubspaceBasis) -> Result<bool, LinalgError> {
        if self.dim() != other.dim() {
            return Ok(false);
        }
        for v in &other.vectors {
            self.check_input(v)?;
            if !self.is_member(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `u32` count header, then the vectors. The Gram matrix is recomputed on decode.
    pub fn encode(&self, w: &mut Writer) {
        w.u32(self.vectors.len() as u32);
        for v in &self.vectors {
            v.encode(w);
        }
    }

    pub fn decode(r: &mut Reader<'_>, field: &PrimeField) -> Result<Self, CodecError> {
        let n = r.count(4)?;
        let vectors = (0..n).map(|_| Vector::decode(r, field)).collect::<Result<Vec<_>, _>>()?;
        SubspaceBasis::new(vectors).map_err(|e| CodecError::Invalid(e.to_string()))
    }
}

impl std::fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.vectors).finish()
    }
}

/// Symmetric Gram matrix; counts `n(n+1)/2` inner products.
fn gram_matrix(field: &PrimeField, vectors: &[Vector], counter: &mut OpCounter) -> Matrix {
    let n = vectors.len();
    let mut data = vec![U256::ZERO; n * n];
    for i in 0..n {
        for j in i..n {
            let g = vectors[i].dot_raw(&vectors[j]);
            data[i * n + j] = g;
            data[j * n + i] = g;
        }
    }
    counter.inner_products += (n * (n + 1) / 2) as u64;
    Matrix::from_raw(field, n, n, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    fn e12(f: &PrimeField) -> SubspaceBasis {
        SubspaceBasis::new(vec![Vector::from_u64s(f, &[1, 0, 0]), Vector::from_u64s(f, &[0, 1, 0])]).unwrap()
    }

    #[test]
    fn construction_errors() {
        let f = f7();
        assert_eq!(
            SubspaceBasis::new(vec![Vector::from_u64s(&f, &[1, 2]), Vector::from_u64s(&f, &[2, 4])]).unwrap_err(),
            LinalgError::DependentVectors
        );
        // (1,2,3,1) is isotropic over F_5, so its 1x1 Gram matrix is zero.
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(
            SubspaceBasis::new(vec![Vector::from_u64s(&f5, &[1, 2, 3, 1])]).unwrap_err(),
            LinalgError::SingularGram
        );
        assert!(matches!(SubspaceBasis::new(vec![]), Err(LinalgError::ParameterError(_))));
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(matches!(SubspaceBasis::random(&f, 2, 3, &mut rng), Err(LinalgError::ParameterError(_))));
    }

    #[test]
    fn random_bases_satisfy_postconditions() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let f101 = PrimeField::new(101).unwrap();
        let b = SubspaceBasis::random(&f101, 10, 3, &mut rng).unwrap();
        assert_eq!((b.dim(), b.ambient_dim()), (3, 10));
        assert!(b.gram().is_invertible());
        let full = SubspaceBasis::random(&f7(), 3, 3, &mut rng).unwrap();
        assert!(full.gram().is_invertible());
        assert_eq!(Matrix::from_rows(full.vectors()).unwrap().rank(), 3);
    }

    #[test]
    fn projection_examples() {
        let f = f7();
        let v = Vector::from_u64s(&f, &[3, 4, 5]);
        let expect = Vector::from_u64s(&f, &[3, 4, 0]);
        let b = e12(&f);
        assert_eq!(b.project(&v).unwrap(), expect);
        let scaled = SubspaceBasis::new(vec![Vector::from_u64s(&f, &[2, 0, 0]), Vector::from_u64s(&f, &[0, 3, 0])]).unwrap();
        assert_eq!(scaled.project(&v).unwrap(), expect);
        assert_eq!(b.project(&expect).unwrap(), expect);
        assert_eq!(b.project(&Vector::zero(&f, 3)).unwrap(), Vector::zero(&f, 3));
        assert_eq!(b.project_gram_schmidt(&v, &mut OpCounter::new()).unwrap(), expect);
    }

    #[test]
    fn gram_schmidt_isotropic_first_vector() {
        let f5 = PrimeField::new(5).unwrap();
        let b = SubspaceBasis::new(vec![Vector::from_u64s(&f5, &[1, 2, 3, 1]), Vector::from_u64s(&f5, &[1, 0, 0, 0])])
            .unwrap();
        let v = Vector::from_u64s(&f5, &[1, 1, 1, 1]);
        assert_eq!(
            b.project_gram_schmidt(&v, &mut OpCounter::new()).unwrap_err(),
            LinalgError::IsotropicVector { index: 0 }
        );
        // The solve path is unaffected, and its residual is orthogonal to W.
        let g = b.project(&v).unwrap();
        let r = v.sub(&g).unwrap();
        assert!(b.vectors().iter().all(|bi| r.dot_raw(bi).is_zero()));
    }

    #[test]
    fn orthogonal_basis_gram_schmidt_matches_solve() {
        let f = PrimeField::new(101).unwrap();
        let b = SubspaceBasis::new(vec![
            Vector::from_u64s(&f, &[1, 1, 0, 0]),
            Vector::from_u64s(&f, &[1, 100, 0, 0]),
            Vector::from_u64s(&f, &[0, 0, 3, 0]),
        ])
        .unwrap();
        let v = Vector::from_u64s(&f, &[5, 7, 11, 13]);
        assert_eq!(b.project_gram_schmidt(&v, &mut OpCounter::new()).unwrap(), b.project(&v).unwrap());
    }

    #[test]
    fn random_instance_methods_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let f = PrimeField::new(101).unwrap();
        let mut checked = 0;
        while checked < 50 {
            let b = SubspaceBasis::random(&f, 8, 3, &mut rng).unwrap();
            let v = Vector::random(&f, 8, &mut rng);
            match b.project_gram_schmidt(&v, &mut OpCounter::new()) {
                Ok(g) => {
                    assert_eq!(g, b.project(&v).unwrap());
                    checked += 1;
                }
                Err(LinalgError::IsotropicVector { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn op_counts_small_n() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let f = PrimeField::new(101).unwrap();
        for n in 1..=6 {
            let b = SubspaceBasis::random(&f, 2 * n, n, &mut rng).unwrap();
            let v = Vector::random(&f, 2 * n, &mut rng);
            let mut warm = OpCounter::new();
            b.project_solve(&v, GramCache::Warm, &mut warm).unwrap();
            assert_eq!(warm, OpCounter { inner_products: n as u64, solves: 1 });
            let mut cold = OpCounter::new();
            b.project_solve(&v, GramCache::Cold, &mut cold).unwrap();
            assert_eq!(cold.inner_products as usize, (n * n + 3 * n) / 2);
            let mut gs = OpCounter::new();
            if b.project_gram_schmidt(&v, &mut gs).is_ok() {
                assert_eq!(gs.inner_products as usize, n * n - n + n);
            }
        }
    }

    #[test]
    fn membership_and_outside_sampling() {
        let f = f7();
        let b = e12(&f);
        assert!(b.is_member(&Vector::from_u64s(&f, &[1, 0, 0])).unwrap());
        assert!(!b.is_member(&Vector::from_u64s(&f, &[3, 4, 5])).unwrap());
        assert!(b.is_member(&Vector::zero(&f, 3)).unwrap());
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..50 {
            let u = b.sample_outside(&mut rng).unwrap();
            assert!(!u.coord(2).is_zero());
            assert!(!b.is_member(&u).unwrap());
        }
        let full = SubspaceBasis::random(&f, 3, 3, &mut rng).unwrap();
        assert_eq!(full.sample_outside(&mut rng).unwrap_err(), LinalgError::SubspaceIsAmbient);
        assert_eq!(
            b.is_member(&Vector::from_u64s(&f, &[1, 0])).unwrap_err(),
            LinalgError::DimensionMismatch { expected: 3, found: 2 }
        );
    }

    #[test]
    fn scaled_keeps_span_and_projection() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let f = PrimeField::new(101).unwrap();
        let b = SubspaceBasis::random(&f, 6, 3, &mut rng).unwrap();
        let s = b.scaled(&f.element(5)).unwrap();
        let rebuilt = SubspaceBasis::new(s.vectors().to_vec()).unwrap();
        assert_eq!(s.gram(), rebuilt.gram());
        assert!(b.spans_same(&s).unwrap());
        let v = Vector::random(&f, 6, &mut rng);
        assert_eq!(b.project(&v).unwrap(), s.project(&v).unwrap());
        assert!(b.scaled(&f.zero()).is_err());
    }

    #[test]
    fn basis_codec_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let f = PrimeField::new(101).unwrap();
        let b = SubspaceBasis::random(&f, 5, 2, &mut rng).unwrap();
        let mut w = Writer::new();
        b.encode(&mut w);
        let bytes = w.finish();
        assert_eq!(bytes.len(), 4 + 2 * (4 + 5));
        let mut r = Reader::new(&bytes);
        assert_eq!(SubspaceBasis::decode(&mut r, &f).unwrap(), b);
        // A dependent pair on disk is rejected on load.
        let v = Vector::from_u64s(&f, &[1, 2, 3, 4, 5]);
        let mut w = Writer::new();
        w.u32(2);
        v.encode(&mut w);
        v.encode(&mut w);
        let bytes = w.finish();
        assert!(matches!(SubspaceBasis::decode(&mut Reader::new(&bytes), &f), Err(CodecError::Invalid(_))));
    }

    /// Exhaustive oracle: among all q^n coefficient tuples, exactly one
    /// w = Σ c_i b_i has v - w orthogonal to every b_i, and it is the projection.
    #[test]
    fn brute_force_orthogonality_oracle() {
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        for q in [2u64, 3, 5, 7] {
            let f = PrimeField::new(q).unwrap();
            for m in 1..=4 {
                for n in 1..=m.min(2) {
                    for _ in 0..10 {
                        let b = SubspaceBasis::random(&f, m, n, &mut rng).unwrap();
                        let v = Vector::random(&f, m, &mut rng);
                        let mut hits = Vec::new();
                        for idx in 0..q.pow(n as u32) {
                            let mut w = Vector::zero(&f, m);
                            let mut t = idx;
                            for bi in b.vectors() {
                                w = w.add(&bi.scale(&f.element(t % q)).unwrap()).unwrap();
                                t /= q;
                            }
                            let r = v.sub(&w).unwrap();
                            if b.vectors().iter().all(|bi| r.dot_raw(bi).is_zero()) {
                                hits.push(w);
                            }
                        }
                        assert_eq!(hits.len(), 1, "q={q} m={m} n={n}");
                        assert_eq!(hits[0], b.project(&v).unwrap());
                    }
                }
            }
        }
    }
}
