use std::path::{Path, PathBuf};

use gks_core::analysis::{
    guessing_experiment, interpolation_oracle, non_uniqueness_witness, ratio_leakage, AnalysisError,
    DEFAULT_ENUMERATION_LIMIT,
};
use gks_core::perf::{bench_projection, loglog_slope, ProjectionMethod};
use gks_core::simulator::{run_scenario, scenario_by_name, Record};
use gks_core::{
    FieldElement, GroupManager, MemberCredential, PublicKey, SchemeError, SubspaceBasis, VerifyOutcome, U256,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::{Command, Experiment};
use crate::config::Config;
use crate::error::CliError;
use crate::files;
use crate::output::{self, Output};

/// Exit status of a command that ran to completion: 0 when the protocol
/// outcome or predicate holds, 1 otherwise.
pub type Status = u8;

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::ParameterError(m) => CliError::Usage(m),
            AnalysisError::Scheme(s) => CliError::Scheme(s),
            other => CliError::Internal(other.to_string()),
        }
    }
}

fn rng(config: &Config) -> ChaCha20Rng {
    match config.seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => ChaCha20Rng::from_rng(&mut rand::rng()),
    }
}

fn status(ok: bool) -> Status {
    if ok {
        0
    } else {
        1
    }
}

fn gm_path(config: &Config, flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(|| config.gm_state.clone())
}

fn register_random(gm: &mut GroupManager, rng: &mut ChaCha20Rng) -> Result<MemberCredential, CliError> {
    let field = gm.params().field.clone();
    for _ in 0..10_000 {
        let x = field.random(rng);
        match gm.register_member(&x) {
            Ok(c) => return Ok(c),
            Err(SchemeError::DuplicatePublicKey(_) | SchemeError::DegeneratePublicKey(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(CliError::Usage("no unused public value found; the field is too small for this group".into()))
}

fn identity_json(key: &PublicKey) -> Value {
    match key {
        PublicKey::Direct(x) => json!({ "kind": "direct", "x": x.to_string() }),
        PublicKey::Sponsored { sponsor, index } => {
            json!({ "kind": "sponsored", "x": sponsor.to_string(), "index": index })
        }
    }
}

fn elements(v: &[FieldElement]) -> Vec<String> {
    v.iter().map(|e| e.to_string()).collect()
}

fn basis_json(b: &SubspaceBasis) -> Value {
    b.vectors().iter().map(|v| elements(&v.coords())).collect()
}

fn basis_text(b: &SubspaceBasis) -> String {
    b.vectors().iter().map(|v| format!("  [{}]", elements(&v.coords()).join(", "))).collect::<Vec<_>>().join("\n")
}

pub fn run(command: Command, config: &Config) -> Result<Status, CliError> {
    let out = Output::new(config.format);
    match command {
        Command::Setup { out: path, force } => setup(config, &out, &gm_path(config, path), force),
        Command::Register { gm, x, out: path } => register(config, &out, &gm_path(config, gm), x.as_deref(), &path),
        Command::Auth { gm, credential } => auth(config, &out, &gm_path(config, gm), &credential),
        Command::Groupkey { gm, credentials } => groupkey(config, &out, &gm_path(config, gm), &credentials),
        Command::Sponsor { credential, index, out: path } => sponsor(config, &out, &credential, index, &path),
        Command::Simulate { scenario, out: path } => simulate(config, &out, &scenario, path.as_deref()),
        Command::Bench { n_min, n_max, n_step, method, reps } => {
            bench(config, &out, (n_min, n_max, n_step), &method, reps)
        }
        Command::Attack { experiment } => attack(config, &out, experiment),
        Command::Inspect { file, unsafe_dump } => inspect(&out, &file, unsafe_dump),
        Command::Config => {
            out.emit("config", serde_json::to_value(config).expect("config serializes"), || {
                config.to_toml().trim_end().to_string()
            });
            Ok(0)
        }
    }
}

fn setup(config: &Config, out: &Output, path: &Path, force: bool) -> Result<Status, CliError> {
    if path.exists() && !force {
        return Err(CliError::Usage(format!("{} exists; pass --force to replace it", path.display())));
    }
    let params = config.params()?;
    let gm = GroupManager::setup(params.clone(), &mut rng(config))?;
    files::save_manager(path, &gm)?;
    out.emit(
        "setup",
        json!({
            "path": path.display().to_string(),
            "modulus": params.field.modulus().to_string(),
            "ambient_dim": params.ambient_dim,
            "subspace_dim": params.subspace_dim,
            "degree": params.degree,
        }),
        || {
            format!(
                "wrote {} (q={}, m={}, n={}, d={})",
                path.display(),
                params.field.modulus(),
                params.ambient_dim,
                params.subspace_dim,
                params.degree
            )
        },
    );
    Ok(0)
}

fn register(config: &Config, out: &Output, gm_path: &Path, x: Option<&str>, path: &Path) -> Result<Status, CliError> {
    let mut gm = files::load_manager(gm_path)?;
    let cred = match x {
        Some(x) => {
            let x = gm.params().field.parse_element(x).map_err(|e| CliError::Usage(format!("--x: {e}")))?;
            gm.register_member(&x)?
        }
        None => register_random(&mut gm, &mut rng(config))?,
    };
    files::save_credential(path, &cred)?;
    files::save_manager(gm_path, &gm)?;
    out.emit(
        "register",
        json!({ "identity": identity_json(cred.public_key()), "path": path.display().to_string() }),
        || format!("registered {} -> {}", cred.public_key(), path.display()),
    );
    Ok(0)
}

fn auth(config: &Config, out: &Output, gm_path: &Path, cred_path: &Path) -> Result<Status, CliError> {
    let mut gm = files::load_manager(gm_path)?;
    let cred = files::load_credential(cred_path)?;
    let ch = gm.issue_challenge(&mut rng(config))?;
    let resp = cred.respond(&ch)?;
    let outcome = gm.verify(&resp, &ch)?;
    files::save_manager(gm_path, &gm)?;
    let (verdict, reason, scalar) = match &outcome {
        VerifyOutcome::Accept { sponsor_scalar, .. } => ("accept", None, sponsor_scalar.is_some()),
        VerifyOutcome::Reject { reason, .. } => ("reject", Some(reason.code()), false),
    };
    out.emit(
        "outcome",
        json!({
            "nonce": ch.nonce,
            "identity": identity_json(outcome.identity()),
            "verdict": verdict,
            "reason": reason,
            "sponsor_scalar_recorded": scalar,
        }),
        || match &outcome {
            VerifyOutcome::Accept { identity, .. } => format!("Accept {identity}"),
            VerifyOutcome::Reject { identity, reason } => format!("Reject {identity}: {}", reason.code()),
        },
    );
    Ok(status(outcome.is_accept()))
}

fn groupkey(config: &Config, out: &Output, gm_path: &Path, creds: &[PathBuf]) -> Result<Status, CliError> {
    let mut gm = files::load_manager(gm_path)?;
    let loaded = creds.iter().map(|p| files::load_credential(p).map(|c| (p, c))).collect::<Result<Vec<_>, _>>()?;
    let bc = gm.broadcast_group_key(&mut rng(config))?;
    let reference = gm.group_key(&bc)?;
    files::save_manager(gm_path, &gm)?;
    let emit_key = |actor: &str, digest: &str| {
        out.emit("key", json!({ "actor": actor, "epoch": bc.epoch, "digest": digest }), || {
            format!("{digest}  {actor}")
        });
    };
    out.human(|| format!("epoch {}", bc.epoch));
    emit_key("gm", &reference.digest());
    let mut agree = true;
    for (path, cred) in &loaded {
        let key = cred.group_key(&bc)?;
        agree &= key == reference;
        emit_key(&path.display().to_string(), &key.digest());
    }
    out.emit("agreement", json!({ "epoch": bc.epoch, "members": loaded.len(), "agree": agree }), || {
        if agree {
            format!("all {} members agree", loaded.len())
        } else {
            "members disagree".to_string()
        }
    });
    Ok(status(agree))
}

fn sponsor(config: &Config, out: &Output, cred_path: &Path, index: u64, path: &Path) -> Result<Status, CliError> {
    let mut cred = files::load_credential(cred_path)?;
    let grant = cred.sponsor(index, &mut rng(config))?;
    files::save_credential(path, &grant.credential)?;
    files::save_credential(cred_path, &cred)?;
    let child = grant.credential.public_key();
    out.emit(
        "sponsor",
        json!({
            "sponsor": identity_json(cred.public_key()),
            "identity": identity_json(child),
            "path": path.display().to_string(),
        }),
        || format!("{} sponsored {} -> {}", cred.public_key(), child, path.display()),
    );
    Ok(0)
}

fn simulate(config: &Config, out: &Output, name: &str, path: Option<&Path>) -> Result<Status, CliError> {
    let sc = scenario_by_name(name)?;
    let transcript = run_scenario(&sc, &mut rng(config))?;
    let jsonl = transcript.to_jsonl();
    if let Some(path) = path {
        files::write_atomic(path, jsonl.as_bytes(), false)?;
    }
    if out.machine() {
        print!("{jsonl}");
    } else {
        println!("scenario {name}");
        for r in &transcript.records {
            match r {
                Record::Outcome { step, culprit, identity, verdict, reason, .. } => {
                    let reason = reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default();
                    println!("  step {step}: {verdict:?} {identity} sent by {culprit}{reason}");
                }
                Record::Error { step, actor, code, .. } => println!("  step {step}: {actor} error {code}"),
                Record::Check { expectation, pass } => {
                    println!("  {} {expectation}", if *pass { "PASS" } else { "FAIL" })
                }
                _ => {}
            }
        }
    }
    let passed = transcript.passed();
    out.emit("summary", json!({ "scenario": name, "pass": passed }), || {
        format!("{name}: {}", if passed { "pass" } else { "FAIL" })
    });
    Ok(status(passed))
}

fn bench(config: &Config, out: &Output, range: (usize, usize, usize), method: &str, reps: u32) -> Result<Status, CliError> {
    let (n_min, n_max, n_step) = range;
    let methods: Vec<ProjectionMethod> = if method == "all" {
        ProjectionMethod::ALL.to_vec()
    } else {
        vec![method.parse().map_err(CliError::Usage)?]
    };
    let m = config.ambient_dim;
    if n_min == 0 || n_step == 0 || n_max < n_min || n_max >= m {
        return Err(CliError::Usage(format!("need 1 <= n-min <= n-max < m={m} and n-step >= 1")));
    }
    let field = config.field()?;
    let mut rng = rng(config);
    out.human(|| format!("{:<13} {:>5} {:>6} {:>14} {:>8} {:>8}", "method", "n", "m", "ns/projection", "ips", "expected"));
    let mut exact = true;
    for method in &methods {
        let mut points = Vec::new();
        for n in (n_min..=n_max).step_by(n_step) {
            let row = bench_projection(&field, m, n, *method, reps, &mut rng).map_err(SchemeError::from)?;
            exact &= row.count_matches();
            points.push((n as f64, row.nanos_per_projection));
            out.emit("bench", serde_json::to_value(&row).expect("row serializes"), || {
                format!(
                    "{:<13} {:>5} {:>6} {:>14.0} {:>8} {:>8}",
                    row.method.name(),
                    row.n,
                    row.m,
                    row.nanos_per_projection,
                    row.inner_products,
                    row.expected_inner_products
                )
            });
        }
        if let Some(slope) = loglog_slope(&points) {
            out.emit("slope", json!({ "method": method.name(), "slope": slope }), || {
                format!("{}: log-log slope {slope:.3}", method.name())
            });
        }
    }
    Ok(status(exact))
}

fn attack(config: &Config, out: &Output, experiment: Experiment) -> Result<Status, CliError> {
    let params = config.params()?;
    let mut rng = rng(config);
    match experiment {
        Experiment::Interpolation { points } => {
            let q = params.field.modulus();
            if U256::from_u64((points + params.degree) as u64) > q {
                return Err(CliError::Usage(format!("--points must be at most q - d = {q} - {}", params.degree)));
            }
            let mut gm = GroupManager::setup(params.clone(), &mut rng)?;
            let mut leaked = Vec::new();
            for _ in 0..points {
                let x = register_random(&mut gm, &mut rng)?.public_key().x().clone();
                let y = gm.polynomial().eval(&x).map_err(SchemeError::from)?;
                leaked.push((x, y));
            }
            let rep = interpolation_oracle(&params.field, &leaked, params.degree, DEFAULT_ENUMERATION_LIMIT)?;
            let recovered_true = rep.recovered.as_ref() == Some(gm.polynomial());
            let holds = rep.candidate_count == rep.analytic_count
                && rep.unique == (points > params.degree)
                && (!rep.unique || recovered_true);
            out.emit(
                "interpolation",
                json!({
                    "modulus": rep.modulus.to_string(),
                    "degree": rep.degree,
                    "points": rep.points,
                    "candidates": rep.candidate_count.to_string(),
                    "analytic": rep.analytic_count.to_string(),
                    "unique": rep.unique,
                    "method": rep.method,
                    "recovered": recovered_true,
                    "holds": holds,
                }),
                || format!("{rep} recovered={recovered_true} holds={holds}"),
            );
            Ok(status(holds))
        }
        Experiment::Ratio { members } => {
            if members < 2 {
                return Err(CliError::Usage("--members must be at least 2".into()));
            }
            let mut gm = GroupManager::setup(params.clone(), &mut rng)?;
            let creds = (0..members).map(|_| register_random(&mut gm, &mut rng)).collect::<Result<Vec<_>, _>>()?;
            let leak = ratio_leakage(&creds)?;
            let xs: Vec<_> = creds.iter().map(|c| c.public_key().x().clone()).collect();
            let w = non_uniqueness_witness(&gm, &xs, &mut rng)?;
            let holds = leak.consistent && w.holds();
            for r in &leak.ratios {
                out.emit(
                    "ratio",
                    json!({
                        "numerator": identity_json(&r.numerator),
                        "denominator": identity_json(&r.denominator),
                        "ratio": r.ratio.to_string(),
                    }),
                    || format!("f({}) / f({}) = {}", r.numerator.x(), r.denominator.x(), r.ratio),
                );
            }
            out.emit(
                "non_uniqueness",
                json!({
                    "credentials": w.credential_count,
                    "ratios_consistent": leak.consistent,
                    "credentials_identical": w.credentials_identical,
                    "basis_differs": w.basis_differs,
                    "scalars_differ": w.scalars_differ,
                    "polynomial_differs": w.polynomial_differs,
                    "values_differ": w.values_differ,
                    "holds": holds,
                }),
                || {
                    format!(
                        "alternative state reissues {} credentials identically={} with different basis={} scalars={} polynomial={} values={}; holds={holds}",
                        w.credential_count,
                        w.credentials_identical,
                        w.basis_differs,
                        w.scalars_differ,
                        w.polynomial_differs,
                        w.values_differ
                    )
                },
            );
            Ok(status(holds))
        }
        Experiment::Guessing { trials } => {
            let rep = guessing_experiment(&params, trials, &mut rng)?;
            let holds = rep.within_bound();
            let mut fields = serde_json::to_value(&rep).expect("report serializes");
            fields["holds"] = holds.into();
            out.emit("guessing", fields, || {
                format!(
                    "{} accepts in {} trials (bound q^-m = {:.3e}, slack {}); holds={holds}",
                    rep.accepts, rep.trials, rep.bound, rep.slack
                )
            });
            Ok(status(holds))
        }
    }
}

fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}

fn inspect(out: &Output, path: &Path, unsafe_dump: bool) -> Result<Status, CliError> {
    let bytes = files::read(path)?;
    let parse = |source| CliError::Parse { path: path.to_path_buf(), source };
    if bytes.starts_with(b"GKSG") {
        let gm = GroupManager::decode(&bytes).map_err(parse)?;
        let p = gm.params();
        let members: Vec<Value> = gm.registry().keys().map(identity_json).collect();
        let mut fields = json!({
            "kind": "manager-state",
            "fingerprint": fingerprint(&bytes),
            "modulus": p.field.modulus().to_string(),
            "ambient_dim": p.ambient_dim,
            "subspace_dim": p.subspace_dim,
            "degree": p.degree,
            "members": members,
            "pending_challenges": gm.pending_challenges(),
        });
        if unsafe_dump {
            fields["basis"] = basis_json(gm.basis());
            fields["scalars"] = elements(gm.scalars()).into();
            fields["polynomial"] = elements(&gm.polynomial().coefficients()).into();
        }
        out.emit("inspect", fields, || {
            let mut s = format!(
                "manager state {}\n  q={} m={} n={} d={}\n  {} registered, {} pending challenges",
                fingerprint(&bytes),
                p.field.modulus(),
                p.ambient_dim,
                p.subspace_dim,
                p.degree,
                gm.registry().len(),
                gm.pending_challenges()
            );
            for key in gm.registry().keys() {
                s.push_str(&format!("\n  {key}"));
            }
            if unsafe_dump {
                s.push_str(&format!("\nbasis:\n{}", basis_text(gm.basis())));
                s.push_str(&format!("\nscalars: [{}]", elements(gm.scalars()).join(", ")));
                s.push_str(&format!("\npolynomial: [{}]", elements(&gm.polynomial().coefficients()).join(", ")));
            }
            s
        });
    } else if bytes.starts_with(b"GKSC") {
        let cred = MemberCredential::decode(&bytes).map_err(parse)?;
        let b = cred.basis();
        let indices: Vec<u64> = cred.sponsored_indices().iter().copied().collect();
        let mut fields = json!({
            "kind": "credential",
            "fingerprint": fingerprint(&bytes),
            "identity": identity_json(cred.public_key()),
            "modulus": b.field().modulus().to_string(),
            "ambient_dim": b.ambient_dim(),
            "subspace_dim": b.dim(),
            "sponsored_indices": indices,
        });
        if unsafe_dump {
            fields["basis"] = basis_json(b);
        }
        out.emit("inspect", fields, || {
            let mut s = format!(
                "credential {}\n  identity {}\n  q={} m={} n={}\n  sponsored indices {:?}",
                fingerprint(&bytes),
                cred.public_key(),
                b.field().modulus(),
                b.ambient_dim(),
                b.dim(),
                indices
            );
            if unsafe_dump {
                s.push_str(&format!("\nbasis:\n{}", basis_text(b)));
            }
            s
        });
    } else {
        return Err(CliError::Usage(format!("{}: not a manager state or credential file", path.display())));
    }
    Ok(0)
}

pub fn report_error(out: &Output, e: &CliError) {
    eprintln!("error[{}]: {e}", e.code());
    if out.machine() {
        println!("{}", output::record("error", json!({ "code": e.code(), "message": e.to_string() })));
    }
}
