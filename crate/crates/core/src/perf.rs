//! Timing and operation counting for the projection methods.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::field::PrimeField;
use crate::linalg::{GramCache, LinalgError, OpCounter, SubspaceBasis, Vector};

/// `2^128 - 159`
pub const P128_DECIMAL: &str = "340282366920938463463374607431768211297";

pub fn p128() -> PrimeField {
    PrimeField::parse(P128_DECIMAL).expect("2^128 - 159 is prime")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionMethod {
    SolveCold,
    SolveWarm,
    GramSchmidt,
}

impl ProjectionMethod {
    pub const ALL: [ProjectionMethod; 3] =
        [ProjectionMethod::SolveCold, ProjectionMethod::SolveWarm, ProjectionMethod::GramSchmidt];

    pub fn name(&self) -> &'static str {
        match self {
            ProjectionMethod::SolveCold => "solve-cold",
            ProjectionMethod::SolveWarm => "solve-warm",
            ProjectionMethod::GramSchmidt => "gram-schmidt",
        }
    }

    /// Inner products one projection performs onto an `n`-dimensional subspace.
    pub fn expected_inner_products(&self, n: u64) -> u64 {
        match self {
            ProjectionMethod::SolveCold => (n * n + 3 * n) / 2,
            ProjectionMethod::SolveWarm => n,
            ProjectionMethod::GramSchmidt => n * n - n + n,
        }
    }

    pub fn project(&self, basis: &SubspaceBasis, v: &Vector, counter: &mut OpCounter) -> Result<Vector, LinalgError> {
        match self {
            ProjectionMethod::SolveCold => basis.project_solve(v, GramCache::Cold, counter),
            ProjectionMethod::SolveWarm => basis.project_solve(v, GramCache::Warm, counter),
            ProjectionMethod::GramSchmidt => basis.project_gram_schmidt(v, counter),
        }
    }
}

impl fmt::Display for ProjectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProjectionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?}; expected solve-cold, solve-warm or gram-schmidt"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: ProjectionMethod,
    pub n: usize,
    pub m: usize,
    pub reps: u32,
    pub nanos_per_projection: f64,
    /// Inner products of a single projection.
    pub inner_products: u64,
    pub expected_inner_products: u64,
}

impl BenchRow {
    pub fn count_matches(&self) -> bool {
        self.inner_products == self.expected_inner_products
    }
}

/// Times `reps` projections of random vectors onto a random `n`-dimensional
/// subspace of `F_q^m`. Gram-Schmidt bases are redrawn until no isotropic
/// vector appears, so small fields remain usable.
pub fn bench_projection<R: Rng + ?Sized>(
    field: &PrimeField,
    m: usize,
    n: usize,
    method: ProjectionMethod,
    reps: u32,
    rng: &mut R,
) -> Result<BenchRow, LinalgError> {
    if reps == 0 {
        return Err(LinalgError::ParameterError("reps must be positive".into()));
    }
    let inputs: Vec<Vector> = (0..reps).map(|_| Vector::random(field, m, rng)).collect();
    let basis = loop {
        let b = SubspaceBasis::random(field, m, n, rng)?;
        if method != ProjectionMethod::GramSchmidt {
            break b;
        }
        match b.project_gram_schmidt(&inputs[0], &mut OpCounter::new()) {
            Ok(_) => break b,
            Err(LinalgError::IsotropicVector { .. }) => continue,
            Err(e) => return Err(e),
        }
    };

    let mut single = OpCounter::new();
    method.project(&basis, &inputs[0], &mut single)?;

    let mut counter = OpCounter::new();
    let start = Instant::now();
    for v in &inputs {
        std::hint::black_box(method.project(&basis, v, &mut counter)?);
    }
    let elapsed = start.elapsed();
    Ok(BenchRow {
        method,
        n,
        m,
        reps,
        nanos_per_projection: elapsed.as_nanos() as f64 / reps as f64,
        inner_products: single.inner_products,
        expected_inner_products: method.expected_inner_products(n as u64),
    })
}

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// distinct positive abscissas.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let k = logs.len() as f64;
    if logs.len() < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
