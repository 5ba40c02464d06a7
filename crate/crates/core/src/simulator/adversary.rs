use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::analysis::{interpolation_oracle, InterpolationReport, DEFAULT_ENUMERATION_LIMIT};
use crate::field::{FieldElement, Polynomial};
use crate::linalg::SubspaceBasis;
use crate::scheme::{AuthChallenge, AuthResponse, GroupParams, MemberCredential, PublicKey, SchemeError, Sponsorship};

use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "shares", rename_all = "snake_case")]
pub enum AdversaryKind {
    /// No credential; guesses bases.
    Outsider,
    /// Eavesdrops on authentication exchanges and re-sends them.
    Replayer,
    /// Holds up to `k` stolen credentials.
    ShareThief(usize),
    /// Holds up to `k` stolen credentials and tries to rebuild the manager's
    /// polynomial to mint new ones.
    FakeGm(usize),
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryKind::Outsider => write!(f, "outsider"),
            AdversaryKind::Replayer => write!(f, "replayer"),
            AdversaryKind::ShareThief(k) => write!(f, "share-thief({k})"),
            AdversaryKind::FakeGm(k) => write!(f, "fake-gm({k})"),
        }
    }
}

/// What an adversary holds; reported for audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Capabilities {
    pub credentials: usize,
    pub leaked_points: usize,
    pub observed_exchanges: usize,
    pub holds_basis: bool,
    pub recovered_polynomial: bool,
}

#[derive(Debug, Clone)]
pub struct Observed {
    pub member: String,
    pub challenge: AuthChallenge,
    pub response: AuthResponse,
}

/// Each kind's holdings are a separate variant, so an adversary can only
/// ever carry what its kind allows.
#[derive(Debug, Clone)]
enum Holdings {
    Outsider {
        guess: Option<SubspaceBasis>,
    },
    Replayer {
        observed: Vec<Observed>,
    },
    Thief {
        capacity: usize,
        stolen: Vec<MemberCredential>,
        points: Vec<(FieldElement, FieldElement)>,
        recovered: Option<Polynomial>,
        can_forge: bool,
    },
}

#[derive(Debug, Clone)]
pub struct Adversary {
    kind: AdversaryKind,
    holdings: Holdings,
}

impl Adversary {
    pub fn new(kind: AdversaryKind) -> Self {
        let holdings = match kind {
            AdversaryKind::Outsider => Holdings::Outsider { guess: None },
            AdversaryKind::Replayer => Holdings::Replayer { observed: Vec::new() },
            AdversaryKind::ShareThief(k) | AdversaryKind::FakeGm(k) => Holdings::Thief {
                capacity: k,
                stolen: Vec::new(),
                points: Vec::new(),
                recovered: None,
                can_forge: matches!(kind, AdversaryKind::FakeGm(_)),
            },
        };
        Adversary { kind, holdings }
    }

    pub fn kind(&self) -> AdversaryKind {
        self.kind
    }

    pub fn capabilities(&self) -> Capabilities {
        match &self.holdings {
            Holdings::Outsider { guess } => Capabilities { holds_basis: guess.is_some(), ..Default::default() },
            Holdings::Replayer { observed } => Capabilities { observed_exchanges: observed.len(), ..Default::default() },
            Holdings::Thief { stolen, points, recovered, .. } => Capabilities {
                credentials: stolen.len(),
                leaked_points: points.len(),
                holds_basis: !stolen.is_empty(),
                recovered_polynomial: recovered.is_some(),
                ..Default::default()
            },
        }
    }

    fn wrong(&self, step: usize, needs: &'static str) -> ScenarioError {
        ScenarioError::WrongAdversary { step, kind: self.kind, needs }
    }

    /// A basis the adversary could feed into key derivation, if any.
    pub(crate) fn basis(&self) -> Option<&SubspaceBasis> {
        match &self.holdings {
            Holdings::Outsider { guess } => guess.as_ref(),
            Holdings::Thief { stolen, .. } => stolen.first().map(MemberCredential::basis),
            Holdings::Replayer { .. } => None,
        }
    }

    /// Eavesdropping: only a replayer keeps what it sees.
    pub(crate) fn observe(&mut self, obs: Observed) {
        if let Holdings::Replayer { observed } = &mut self.holdings {
            observed.push(obs);
        }
    }

    pub(crate) fn last_observed(&self, step: usize, member: &str) -> Result<&Observed, ScenarioError> {
        match &self.holdings {
            Holdings::Replayer { observed } => observed
                .iter()
                .rev()
                .find(|o| o.member == member)
                .ok_or_else(|| ScenarioError::NothingObserved { step, member: member.into() }),
            _ => Err(self.wrong(step, "replayer")),
        }
    }

    pub(crate) fn steal(
        &mut self,
        step: usize,
        cred: MemberCredential,
        point: Option<(FieldElement, FieldElement)>,
    ) -> Result<(), ScenarioError> {
        let kind = self.kind;
        match &mut self.holdings {
            Holdings::Thief { capacity, stolen, points, .. } => {
                if stolen.len() >= *capacity {
                    return Err(ScenarioError::CapacityExceeded { step, kind });
                }
                stolen.push(cred);
                points.extend(point);
                Ok(())
            }
            _ => Err(self.wrong(step, "share-thief or fake-gm")),
        }
    }

    /// Answers a challenge in `claim`'s name with a fresh random basis.
    pub(crate) fn guess<R: Rng + ?Sized>(
        &mut self,
        step: usize,
        params: &GroupParams,
        claim: PublicKey,
        ch: &AuthChallenge,
        rng: &mut R,
    ) -> Result<AuthResponse, ScenarioError> {
        let Holdings::Outsider { guess } = &mut self.holdings else {
            return Err(self.wrong(step, "outsider"));
        };
        let basis = SubspaceBasis::random(&params.field, params.ambient_dim, params.subspace_dim, rng)
            .map_err(SchemeError::from)?;
        *guess = Some(basis.clone());
        Ok(MemberCredential::new(claim, basis).respond(ch)?)
    }

    fn stolen(&self, step: usize, victim: &PublicKey) -> Result<&MemberCredential, ScenarioError> {
        match &self.holdings {
            Holdings::Thief { stolen, .. } => stolen
                .iter()
                .find(|c| c.public_key() == victim)
                .ok_or_else(|| ScenarioError::NotStolen { step, key: victim.to_string() }),
            _ => Err(self.wrong(step, "share-thief or fake-gm")),
        }
    }

    /// Uses a stolen basis while claiming a different identity.
    pub(crate) fn impersonate(
        &self,
        step: usize,
        victim: &PublicKey,
        claim: PublicKey,
        ch: &AuthChallenge,
    ) -> Result<AuthResponse, ScenarioError> {
        let basis = self.stolen(step, victim)?.basis().clone();
        Ok(MemberCredential::new(claim, basis).respond(ch)?)
    }

    /// Runs the sponsorship path on a stolen credential.
    pub(crate) fn sponsor_from<R: Rng + ?Sized>(
        &mut self,
        step: usize,
        victim: &PublicKey,
        index: u64,
        rng: &mut R,
    ) -> Result<Sponsorship, ScenarioError> {
        let mut cred = self.stolen(step, victim)?.clone();
        let grant = cred.sponsor(index, rng)?;
        if let Holdings::Thief { stolen, .. } = &mut self.holdings {
            if let Some(slot) = stolen.iter_mut().find(|c| c.public_key() == victim) {
                *slot = cred;
            }
        }
        Ok(grant)
    }

    /// Feeds the leaked `(x, f(x))` pairs to the interpolation oracle.
    pub(crate) fn interpolate(&mut self, step: usize, params: &GroupParams) -> Result<InterpolationReport, ScenarioError> {
        let Holdings::Thief { points, recovered, .. } = &mut self.holdings else {
            return Err(self.wrong(step, "share-thief or fake-gm"));
        };
        let report = interpolation_oracle(&params.field, points, params.degree, DEFAULT_ENUMERATION_LIMIT)?;
        *recovered = report.recovered.clone();
        Ok(report)
    }

    /// Mints a direct credential for `x` from a recovered polynomial and any
    /// stolen basis: `(f(x) / f(x_s)) · B_s`. `None` without a polynomial.
    pub(crate) fn forge(&self, step: usize, x: &FieldElement) -> Result<Option<MemberCredential>, ScenarioError> {
        let Holdings::Thief { stolen, recovered, can_forge: true, .. } = &self.holdings else {
            return Err(self.wrong(step, "fake-gm"));
        };
        let (Some(f), Some(src)) = (recovered, stolen.iter().find(|c| !c.public_key().is_sponsored())) else {
            return Ok(None);
        };
        let ratio = f.eval(x)?.div(&f.eval(src.public_key().x())?)?;
        let basis = src.basis().scaled(&ratio).map_err(SchemeError::from)?;
        Ok(Some(MemberCredential::new(PublicKey::Direct(x.clone()), basis)))
    }
}
