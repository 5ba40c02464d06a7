//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use gks_core::analysis::{guessing_experiment, interpolation_oracle, non_uniqueness_witness, ratio_leakage, CountMethod};
use gks_core::perf::{bench_projection, loglog_slope, p128, ProjectionMethod};
use gks_core::simulator::{ci_params, run_scenario, scenario_by_name, SCENARIO_NAMES};
use gks_core::{
    FieldElement, GroupManager, GroupParams, MemberCredential, OpCounter, Polynomial, PrimeField, SchemeError,
    SubspaceBasis, Vector,
};
use num_bigint::BigUint;
use rand::Rng;

type Outcome = Result<String, String>;

fn register<R: Rng>(gm: &mut GroupManager, rng: &mut R) -> MemberCredential {
    loop {
        let x = gm.params().field.random(rng);
        match gm.register_member(&x) {
            Ok(c) => return c,
            Err(SchemeError::DuplicatePublicKey(_) | SchemeError::DegeneratePublicKey(_)) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

fn operation_counts() -> Outcome {
    let f = PrimeField::new(101).unwrap();
    let mut rng = common::rng(1);
    for n in 1..=32usize {
        for method in [ProjectionMethod::GramSchmidt, ProjectionMethod::SolveCold] {
            let row = bench_projection(&f, 2 * n, n, method, 1, &mut rng).map_err(|e| e.to_string())?;
            if !row.count_matches() {
                return Err(format!(
                    "{method} n={n}: counted {} expected {}",
                    row.inner_products, row.expected_inner_products
                ));
            }
        }
    }
    Ok("n=1..32, m=2n, q=101: gram-schmidt n^2 and cold solve (n^2+3n)/2 exact".into())
}

fn key_agreement() -> Outcome {
    let mut rng = common::rng(2);
    for setup in 0..100 {
        let mut gm = GroupManager::setup(ci_params(), &mut rng).map_err(|e| e.to_string())?;
        let mut creds: Vec<_> = (0..5).map(|_| register(&mut gm, &mut rng)).collect();
        let a = creds[0].sponsor(1, &mut rng).map_err(|e| e.to_string())?.credential;
        let b = creds[1].sponsor(1, &mut rng).map_err(|e| e.to_string())?.credential;
        creds.push(a);
        creds.push(b);
        let bc = gm.broadcast_group_key(&mut rng).map_err(|e| e.to_string())?;
        let expect = gm.group_key(&bc).map_err(|e| e.to_string())?;
        for c in &creds {
            if c.group_key(&bc).map_err(|e| e.to_string())? != expect {
                return Err(format!("setup {setup}: {} disagrees", c.public_key()));
            }
        }
    }
    Ok("100/100 setups, 7 members each, identical keys".into())
}

fn authentication() -> Outcome {
    let mut rng = common::rng(3);
    let mut gm = GroupManager::setup(ci_params(), &mut rng).map_err(|e| e.to_string())?;
    let creds: Vec<_> = (0..10).map(|_| register(&mut gm, &mut rng)).collect();
    let mut accepts = 0;
    for round in 0..10_000 {
        let c = &creds[round % creds.len()];
        let ch = gm.issue_challenge(&mut rng).map_err(|e| e.to_string())?;
        let resp = c.respond(&ch).map_err(|e| e.to_string())?;
        if gm.verify(&resp, &ch).map_err(|e| e.to_string())?.is_accept() {
            accepts += 1;
        }
    }
    if accepts != 10_000 {
        return Err(format!("honest accepts {accepts}/10000"));
    }
    let params = GroupParams::new(PrimeField::new(101).unwrap(), 8, 4, 8).unwrap();
    let rep = guessing_experiment(&params, 100_000, &mut rng).map_err(|e| e.to_string())?;
    if rep.accepts != 0 {
        return Err(format!("outsider accepts {}/{}", rep.accepts, rep.trials));
    }
    Ok("honest 10000/10000 accept; outsider 0/100000 accept at q=101, m=8".into())
}

fn interpolation_counts() -> Outcome {
    let f = PrimeField::new(5).unwrap();
    let secret = Polynomial::from_u64s(&f, &[3, 1, 4]);
    let points: Vec<(FieldElement, FieldElement)> = (1..=3u64)
        .map(|x| {
            let x = f.element(x);
            let y = secret.eval(&x).unwrap();
            (x, y)
        })
        .collect();
    let start = Instant::now();
    let mut counts = Vec::new();
    for k in 0..=3 {
        let rep = interpolation_oracle(&f, &points[..k], 2, 1 << 20).map_err(|e| e.to_string())?;
        if rep.method != CountMethod::Exhaustive {
            return Err(format!("k={k}: not enumerated"));
        }
        let expect = if k <= 2 { BigUint::from(5u32).pow(3 - k as u32) } else { BigUint::from(1u32) };
        if rep.candidate_count != expect || rep.unique != (k == 3) {
            return Err(format!("k={k}: {} candidates, unique={}", rep.candidate_count, rep.unique));
        }
        if k == 3 && rep.recovered.as_ref() != Some(&secret) {
            return Err("k=3: wrong polynomial recovered".into());
        }
        counts.push(rep.candidate_count.to_string());
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("q=5, d=2: candidates {} for k=0..3, unique at k=3, {elapsed:?}", counts.join("/")))
}

fn ratio_non_uniqueness() -> Outcome {
    let mut rng = common::rng(5);
    let mut gm = GroupManager::setup(ci_params(), &mut rng).map_err(|e| e.to_string())?;
    let creds: Vec<_> = (0..5).map(|_| register(&mut gm, &mut rng)).collect();
    let leak = ratio_leakage(&creds).map_err(|e| e.to_string())?;
    if !leak.consistent || leak.ratios.len() != 10 {
        return Err(format!("ratio leakage inconsistent ({} pairs)", leak.ratios.len()));
    }
    let xs: Vec<_> = creds.iter().map(|c| c.public_key().x().clone()).collect();
    let w = non_uniqueness_witness(&gm, &xs, &mut rng).map_err(|e| e.to_string())?;
    if !w.holds() {
        return Err(format!("{w:?}"));
    }
    Ok("5 credentials reproduced byte-identically by a distinct manager state".into())
}

fn scenarios() -> Outcome {
    for name in SCENARIO_NAMES {
        let sc = scenario_by_name(name).map_err(|e| e.to_string())?;
        for seed in [1u64, 2, 3] {
            let t = run_scenario(&sc, &mut common::rng(seed)).map_err(|e| format!("{name}: {e}"))?;
            if !t.passed() {
                let failed: Vec<_> = t.checks().filter(|(_, p)| !p).map(|(e, _)| e.to_string()).collect();
                return Err(format!("{name} seed {seed}: {}", failed.join("; ")));
            }
            let again = run_scenario(&sc, &mut common::rng(seed)).map_err(|e| e.to_string())?;
            if again.to_jsonl() != t.to_jsonl() {
                return Err(format!("{name} seed {seed}: transcript not reproducible"));
            }
        }
    }
    Ok(format!("{} scenarios x 3 seeds pass, transcripts reproducible", SCENARIO_NAMES.len()))
}

fn performance() -> Outcome {
    let f = p128();
    let mut rng = common::rng(7);
    let basis = SubspaceBasis::random(&f, 1000, 100, &mut rng).map_err(|e| e.to_string())?;
    let v = Vector::random(&f, 1000, &mut rng);
    basis.project(&v).map_err(|e| e.to_string())?;
    let start = Instant::now();
    ProjectionMethod::SolveWarm.project(&basis, &v, &mut OpCounter::new()).map_err(|e| e.to_string())?;
    let warm = start.elapsed();
    if warm.as_secs_f64() >= 1.0 {
        return Err(format!("warm projection took {warm:?}"));
    }
    let mut points = Vec::new();
    for n in (10..=100).step_by(10) {
        let row = bench_projection(&f, 1000, n, ProjectionMethod::SolveCold, 3, &mut rng).map_err(|e| e.to_string())?;
        points.push((n as f64, row.nanos_per_projection));
    }
    let slope = loglog_slope(&points).ok_or("no slope")?;
    if !(1.5..=2.5).contains(&slope) {
        return Err(format!("slope {slope:.3} outside 2.0 +/- 0.5"));
    }
    Ok(format!("128-bit prime, m=1000, n=100: warm projection {warm:?}; cold-solve slope {slope:.3}"))
}

fn linalg_suite() -> Outcome {
    let results = common::linalg_suite(1000, 8);
    let failed: Vec<_> =
        results.iter().filter(|r| !r.ok()).map(|r| format!("{} {}/{}", r.name, r.passed, r.total)).collect();
    if !failed.is_empty() {
        return Err(failed.join(", "));
    }
    Ok(format!("{} properties x 1000 instances", results.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("operation-count exactness", operation_counts),
        ("key-agreement unanimity", key_agreement),
        ("authentication completeness and soundness", authentication),
        ("interpolation counting", interpolation_counts),
        ("ratio-leakage non-uniqueness", ratio_non_uniqueness),
        ("attack scenarios", scenarios),
        ("performance smoke", performance),
        ("linear-algebra property suite", linalg_suite),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
