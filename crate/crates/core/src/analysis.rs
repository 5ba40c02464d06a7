//! Small-field experiments that count what an adversary can and cannot learn
//! about the manager's secrets.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldElement, FieldError, Polynomial, PrimeField};
use crate::linalg::{LinalgError, SubspaceBasis, Vector};
use crate::scheme::{GroupManager, GroupParams, MemberCredential, PublicKey, SchemeError};

/// Default cap on how many polynomials the interpolation oracle will enumerate.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("two points share x = {0}")]
    DuplicateX(FieldElement),
    #[error("need at least 2 credentials, got {0}")]
    InsufficientCredentials(usize),
    #[error("credentials are not from one group: {0}")]
    Incompatible(String),
    #[error("invalid parameters: {0}")]
    ParameterError(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// How [`InterpolationReport::candidate_count`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    /// Every polynomial of degree at most `d` was tested against the points.
    Exhaustive,
    /// The free values at `d + 1 - k` extra abscissas were enumerated and each
    /// completion interpolated; distinct results were counted.
    Parametric,
    /// Closed form only; nothing was enumerated.
    Analytic,
}

/// How many polynomials of degree at most `d` pass through `k` known points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpolationReport {
    pub modulus: BigUint,
    pub degree: usize,
    pub points: usize,
    pub candidate_count: BigUint,
    /// `q^(d+1-k)` for `k <= d+1`; otherwise 1 or 0 depending on consistency.
    pub analytic_count: BigUint,
    pub unique: bool,
    pub recovered: Option<Polynomial>,
    pub method: CountMethod,
}

impl fmt::Display for InterpolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q={} d={} k={} candidates={} analytic={} unique={} method={:?}",
            self.modulus, self.degree, self.points, self.candidate_count, self.analytic_count, self.unique, self.method
        )
    }
}

fn check_points(field: &PrimeField, points: &[(FieldElement, FieldElement)]) -> Result<(), AnalysisError> {
    let mut seen = HashSet::new();
    for (x, y) in points {
        field.check(x.field())?;
        field.check(y.field())?;
        if !seen.insert(x.clone()) {
            return Err(AnalysisError::DuplicateX(x.clone()));
        }
    }
    Ok(())
}

/// The unique polynomial of degree below `points.len()` through `points`.
pub fn lagrange_interpolate(
    field: &PrimeField,
    points: &[(FieldElement, FieldElement)],
) -> Result<Polynomial, AnalysisError> {
    check_points(field, points)?;
    let mut acc = Polynomial::zero(field);
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = Polynomial::from_u64s(field, &[1]);
        let mut denom = field.one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                basis = basis.mul(&Polynomial::new(field, &[xj.neg(), field.one()])?)?;
                denom = denom.mul(&xi.sub(xj)?)?;
            }
        }
        acc = acc.add(&basis.scale(&yi.div(&denom)?)?)?;
    }
    Ok(acc)
}

fn passes_through(p: &Polynomial, points: &[(FieldElement, FieldElement)]) -> Result<bool, FieldError> {
    for (x, y) in points {
        if &p.eval(x)? != y {
            return Ok(false);
        }
    }
    Ok(true)
}

fn poly_key(p: &Polynomial) -> Vec<u8> {
    p.coefficients().iter().flat_map(|c| c.to_bytes()).collect()
}

/// Counts the degree-`≤ degree` polynomials consistent with `points`,
/// enumerating when at most `limit` candidates must be examined.
pub fn interpolation_oracle(
    field: &PrimeField,
    points: &[(FieldElement, FieldElement)],
    degree: usize,
    limit: u64,
) -> Result<InterpolationReport, AnalysisError> {
    check_points(field, points)?;
    let q = field.modulus().to_biguint();
    let k = points.len();
    let free = (degree + 1).saturating_sub(k);

    let determined = if k > degree {
        let p = lagrange_interpolate(field, &points[..degree + 1])?;
        passes_through(&p, points)?.then_some(p)
    } else {
        None
    };
    let analytic_count = if k <= degree + 1 {
        q.pow(free as u32)
    } else {
        BigUint::from(determined.is_some() as u8)
    };

    let small = |exp: usize| q.pow(exp as u32) <= BigUint::from(limit);
    let (candidate_count, recovered, method) = if small(degree + 1) {
        let (count, found) = enumerate_all(field, points, degree)?;
        (BigUint::from(count), found, CountMethod::Exhaustive)
    } else if k <= degree + 1 && small(free) && q >= BigUint::from(degree + 1) {
        let (count, found) = enumerate_completions(field, points, degree)?;
        (BigUint::from(count), found, CountMethod::Parametric)
    } else {
        (analytic_count.clone(), determined.clone(), CountMethod::Analytic)
    };

    Ok(InterpolationReport {
        modulus: q,
        degree,
        points: k,
        unique: candidate_count.is_one(),
        recovered: if candidate_count.is_one() { recovered } else { None },
        candidate_count,
        analytic_count,
        method,
    })
}

fn enumerate_all(
    field: &PrimeField,
    points: &[(FieldElement, FieldElement)],
    degree: usize,
) -> Result<(u64, Option<Polynomial>), AnalysisError> {
    let q = field.modulus().to_u64().expect("enumerable fields fit in u64");
    let mut digits = vec![0u64; degree + 1];
    let mut count = 0u64;
    let mut last = None;
    loop {
        let p = Polynomial::from_u64s(field, &digits);
        if passes_through(&p, points)? {
            count += 1;
            last = Some(p);
        }
        if !increment(&mut digits, q) {
            break;
        }
    }
    Ok((count, last))
}

fn enumerate_completions(
    field: &PrimeField,
    points: &[(FieldElement, FieldElement)],
    degree: usize,
) -> Result<(u64, Option<Polynomial>), AnalysisError> {
    let q = field.modulus().to_u64().expect("enumerable fields fit in u64");
    let free = degree + 1 - points.len();
    let taken: HashSet<_> = points.iter().map(|(x, _)| x.clone()).collect();
    let extra: Vec<FieldElement> = (0..q).map(|x| field.element(x)).filter(|x| !taken.contains(x)).take(free).collect();

    let mut digits = vec![0u64; free];
    let mut seen = HashSet::new();
    let mut last = None;
    loop {
        let mut all = points.to_vec();
        all.extend(extra.iter().zip(&digits).map(|(x, y)| (x.clone(), field.element(*y))));
        let p = lagrange_interpolate(field, &all)?;
        if p.degree() <= degree && passes_through(&p, points)? && seen.insert(poly_key(&p)) {
            last = Some(p);
        }
        if !increment(&mut digits, q) {
            break;
        }
    }
    Ok((seen.len() as u64, last))
}

/// Base-`q` odometer; false once it wraps to all zeros.
fn increment(digits: &mut [u64], q: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

/// `f(x_a) / f(x_b)` read off two credentials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRatio {
    pub numerator: PublicKey,
    pub denominator: PublicKey,
    pub ratio: FieldElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioLeakage {
    pub ratios: Vec<PairRatio>,
    /// Every basis vector of each pair differs by the same scalar.
    pub consistent: bool,
}

fn vector_ratio(a: &Vector, b: &Vector) -> Result<Option<FieldElement>, AnalysisError> {
    let Some(j) = b.leading_index() else { return Ok(None) };
    let rho = a.coord(j).div(&b.coord(j))?;
    Ok((b.scale(&rho)? == *a).then_some(rho))
}

/// Recovers the ratios of polynomial values that any two credentials of one
/// group reveal by componentwise division.
pub fn ratio_leakage(creds: &[MemberCredential]) -> Result<RatioLeakage, AnalysisError> {
    if creds.len() < 2 {
        return Err(AnalysisError::InsufficientCredentials(creds.len()));
    }
    let (n, m, field) = (creds[0].basis().dim(), creds[0].basis().ambient_dim(), creds[0].basis().field());
    if creds.iter().any(|c| c.basis().dim() != n || c.basis().ambient_dim() != m || c.basis().field() != field) {
        return Err(AnalysisError::Incompatible("credential shapes differ".into()));
    }
    let mut ratios = Vec::new();
    let mut consistent = true;
    for (i, a) in creds.iter().enumerate() {
        for b in &creds[i + 1..] {
            let per_vector = a
                .basis()
                .vectors()
                .iter()
                .zip(b.basis().vectors())
                .map(|(va, vb)| vector_ratio(va, vb))
                .collect::<Result<Vec<_>, _>>()?;
            let first = per_vector[0].clone();
            consistent &= first.is_some() && per_vector.iter().all(|r| *r == first);
            if let Some(ratio) = first {
                ratios.push(PairRatio {
                    numerator: a.public_key().clone(),
                    denominator: b.public_key().clone(),
                    ratio,
                });
            }
        }
    }
    Ok(RatioLeakage { ratios, consistent })
}

/// A second manager state that issues exactly the same credentials.
#[derive(Debug, Clone)]
pub struct NonUniquenessWitness {
    pub alternative: GroupManager,
    pub credential_count: usize,
    /// Every credential re-issued by the alternative state is byte-identical.
    pub credentials_identical: bool,
    pub basis_differs: bool,
    pub scalars_differ: bool,
    pub polynomial_differs: bool,
    /// `f'(x) != f(x)` for every probed public key.
    pub values_differ: bool,
}

impl NonUniquenessWitness {
    pub fn holds(&self) -> bool {
        self.credentials_identical
            && self.basis_differs
            && self.scalars_differ
            && self.polynomial_differs
            && self.values_differ
    }
}

/// Builds `v'_1 = c v_1`, `v'_k = c s_k v_k`, `r'_k = r_k / s_k`,
/// `f' = f / c` for random `c, s_k` and checks that it reproduces the
/// credentials of `xs` byte for byte. Needs `q >= 5` so that `c`, `s_k` and
/// `c s_k` can all avoid 1.
pub fn non_uniqueness_witness<R: Rng + ?Sized>(
    gm: &GroupManager,
    xs: &[FieldElement],
    rng: &mut R,
) -> Result<NonUniquenessWitness, AnalysisError> {
    let field = &gm.params().field;
    if field.modulus() < crate::field::U256::from_u64(5) {
        return Err(AnalysisError::ParameterError("the witness needs q >= 5".into()));
    }
    let one = field.one();
    let c = loop {
        let c = field.random_nonzero(rng);
        if c != one {
            break c;
        }
    };
    let v = gm.basis().vectors();
    let mut vectors = vec![v[0].scale(&c)?];
    let mut scalars = Vec::new();
    for (vk, rk) in v[1..].iter().zip(gm.scalars()) {
        let s = loop {
            let s = field.random_nonzero(rng);
            if s != one && c.mul(&s)? != one {
                break s;
            }
        };
        vectors.push(vk.scale(&c.mul(&s)?)?);
        scalars.push(rk.div(&s)?);
    }
    let basis = SubspaceBasis::new(vectors)?;
    let poly = gm.polynomial().scale(&c.inv()?)?;
    let alternative = GroupManager::from_parts(gm.params().clone(), basis, scalars, poly)?;

    let mut credentials_identical = true;
    let mut values_differ = true;
    for x in xs {
        let a = gm.credential_for(x)?.encode();
        let b = alternative.credential_for(x)?.encode();
        credentials_identical &= a == b;
        values_differ &= gm.polynomial().eval(x)? != alternative.polynomial().eval(x)?;
    }
    Ok(NonUniquenessWitness {
        credential_count: xs.len(),
        credentials_identical,
        basis_differs: gm.basis().vectors().iter().zip(alternative.basis().vectors()).all(|(a, b)| a != b),
        scalars_differ: gm.scalars().iter().zip(alternative.scalars()).all(|(a, b)| a != b),
        polynomial_differs: gm.polynomial() != alternative.polynomial(),
        values_differ,
        alternative,
    })
}

/// Outcome of repeated impersonation attempts with random bases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuessingReport {
    pub trials: u64,
    pub accepts: u64,
    /// `None` when no trials were run.
    pub frequency: Option<f64>,
    /// `q^-m`
    pub bound: f64,
    pub slack: f64,
}

impl GuessingReport {
    pub fn within_bound(&self) -> bool {
        self.frequency.is_none_or(|f| f <= self.slack * self.bound)
    }
}

pub const GUESSING_SLACK: f64 = 4.0;

/// Registers one member, then lets an outsider answer `trials` fresh
/// challenges in that member's name using a fresh random basis each time.
pub fn guessing_experiment<R: Rng + ?Sized>(
    params: &GroupParams,
    trials: u64,
    rng: &mut R,
) -> Result<GuessingReport, AnalysisError> {
    let mut gm = GroupManager::setup(params.clone(), rng)?;
    let field = params.field.clone();
    let victim = loop {
        let x = field.random(rng);
        match gm.register_member(&x) {
            Ok(c) => break c.public_key().clone(),
            Err(SchemeError::DegeneratePublicKey(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    };
    let mut accepts = 0;
    for _ in 0..trials {
        let ch = gm.issue_challenge(rng)?;
        let guess = SubspaceBasis::random(&field, params.ambient_dim, params.subspace_dim, rng)?;
        let resp = MemberCredential::new(victim.clone(), guess).respond(&ch)?;
        if gm.verify(&resp, &ch)?.is_accept() {
            accepts += 1;
        }
    }
    let q = field.modulus().to_biguint().to_f64().unwrap_or(f64::INFINITY);
    Ok(GuessingReport {
        trials,
        accepts,
        frequency: (trials > 0).then(|| accepts as f64 / trials as f64),
        bound: q.powi(-(params.ambient_dim as i32)),
        slack: GUESSING_SLACK,
    })
}
