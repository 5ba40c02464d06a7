#![allow(dead_code)]

use gks_core::linalg::bilinear;
use gks_core::perf::p128;
use gks_core::{LinalgError, Matrix, OpCounter, PrimeField, SubspaceBasis, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn fields() -> Vec<PrimeField> {
    vec![
        PrimeField::new(7).unwrap(),
        PrimeField::new(101).unwrap(),
        PrimeField::new((1 << 61) - 1).unwrap(),
        p128(),
    ]
}

/// Random field, `2 <= m <= 10`, `1 <= n < m`, and a basis of that shape.
pub fn random_instance<R: Rng>(rng: &mut R) -> (PrimeField, SubspaceBasis) {
    let fs = fields();
    let f = fs[rng.random_range(0..fs.len())].clone();
    let m = rng.random_range(2..=10);
    let n = rng.random_range(1..m);
    let b = SubspaceBasis::random(&f, m, n, rng).unwrap();
    (f, b)
}

pub fn random_invertible<R: Rng>(f: &PrimeField, n: usize, rng: &mut R) -> Matrix {
    loop {
        let rows: Vec<Vector> = (0..n).map(|_| Vector::random(f, n, rng)).collect();
        let m = Matrix::from_rows(&rows).unwrap();
        if m.is_invertible() {
            return m;
        }
    }
}

pub struct PropertyResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

impl PropertyResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

fn run<R: Rng>(name: &'static str, instances: usize, rng: &mut R, mut prop: impl FnMut(&mut R) -> bool) -> PropertyResult {
    let passed = (0..instances).filter(|_| prop(rng)).count();
    PropertyResult { name, passed, total: instances }
}

/// The five projection properties, `instances` random cases each.
pub fn linalg_suite(instances: usize, seed: u64) -> Vec<PropertyResult> {
    let mut r = rng(seed);
    let mut out = Vec::new();

    out.push(run("idempotence", instances, &mut r, |r| {
        let (f, b) = random_instance(r);
        let v = Vector::random(&f, b.ambient_dim(), r);
        let p = b.project(&v).unwrap();
        b.project(&p).unwrap() == p
    }));

    out.push(run("linearity", instances, &mut r, |r| {
        let (f, b) = random_instance(r);
        let (u, v) = (Vector::random(&f, b.ambient_dim(), r), Vector::random(&f, b.ambient_dim(), r));
        let (a, c) = (f.random(r), f.random(r));
        let lhs = b.project(&u.scale(&a).unwrap().add(&v.scale(&c).unwrap()).unwrap()).unwrap();
        let rhs = b.project(&u).unwrap().scale(&a).unwrap().add(&b.project(&v).unwrap().scale(&c).unwrap()).unwrap();
        lhs == rhs
    }));

    out.push(run("residual orthogonality", instances, &mut r, |r| {
        let (f, b) = random_instance(r);
        let v = Vector::random(&f, b.ambient_dim(), r);
        let res = v.sub(&b.project(&v).unwrap()).unwrap();
        b.vectors().iter().all(|bi| bilinear(&res, bi, &mut OpCounter::new()).unwrap().is_zero())
    }));

    out.push(run("change-of-basis invariance", instances, &mut r, |r| {
        let (f, b) = random_instance(r);
        let m = random_invertible(&f, b.dim(), r);
        let b2 = b.change_basis(&m).unwrap();
        let v = Vector::random(&f, b.ambient_dim(), r);
        b.project(&v).unwrap() == b2.project(&v).unwrap()
    }));

    out.push(run("solve / gram-schmidt agreement", instances, &mut r, |r| loop {
        let (f, b) = random_instance(r);
        let v = Vector::random(&f, b.ambient_dim(), r);
        match b.project_gram_schmidt(&v, &mut OpCounter::new()) {
            Ok(gs) => {
                let cold = b.project_solve(&v, gks_core::GramCache::Cold, &mut OpCounter::new()).unwrap();
                break gs == cold && gs == b.project(&v).unwrap();
            }
            Err(LinalgError::IsotropicVector { .. }) => continue,
            Err(e) => panic!("{e}"),
        }
    }));

    out
}
