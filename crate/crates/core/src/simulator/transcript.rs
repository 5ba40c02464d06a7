use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::CountMethod;
use crate::codec::Writer;
use crate::scheme::{AuthChallenge, AuthResponse, GroupKeyBroadcast, PublicKey, VerifyOutcome};

use super::adversary::{AdversaryKind, Capabilities};

/// Version stamped on every transcript line.
pub const TRANSCRIPT_SCHEMA: u32 = 1;

/// Recipient id of broadcast envelopes.
pub const BROADCAST: &str = "*";

/// Message carried by an [`Envelope`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Challenge(AuthChallenge),
    Response(AuthResponse),
    Broadcast(GroupKeyBroadcast),
    /// Only the new member's public key travels in the clear record.
    SponsorGrant(PublicKey),
    Outcome(VerifyOutcome),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadKind {
    Challenge,
    Response,
    Broadcast,
    SponsorGrant,
    Outcome,
}

impl Payload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Payload::Challenge(_) => PayloadKind::Challenge,
            Payload::Response(_) => PayloadKind::Response,
            Payload::Broadcast(_) => PayloadKind::Broadcast,
            Payload::SponsorGrant(_) => PayloadKind::SponsorGrant,
            Payload::Outcome(_) => PayloadKind::Outcome,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(self.kind() as u8);
        match self {
            Payload::Challenge(c) => c.encode(&mut w),
            Payload::Response(r) => r.encode(&mut w),
            Payload::Broadcast(b) => b.encode(&mut w),
            Payload::SponsorGrant(k) => k.encode(&mut w),
            Payload::Outcome(o) => o.encode(&mut w),
        }
        w.finish()
    }

    /// First 16 bytes of SHA-256 over [`Self::to_bytes`], hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(&Sha256::digest(self.to_bytes())[..16])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub seq: u64,
    pub sender: String,
    pub recipient: String,
    pub payload: Payload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

/// One transcript line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    Header {
        scenario: String,
        modulus: String,
        ambient_dim: usize,
        subspace_dim: usize,
        degree: usize,
        adversary: Option<AdversaryKind>,
    },
    Envelope {
        step: usize,
        seq: u64,
        sender: String,
        recipient: String,
        payload: PayloadKind,
        digest: String,
    },
    Outcome {
        step: usize,
        /// Actor that sent the verified response.
        culprit: String,
        identity: String,
        verdict: Verdict,
        reason: Option<String>,
        /// Sponsor public value read off a sponsored identity.
        sponsor: Option<String>,
        /// Whether the recovered sponsor scalar equals the one actually used.
        scalar_matches_grant: Option<bool>,
    },
    Error {
        step: usize,
        actor: String,
        code: String,
        message: String,
    },
    Key {
        step: usize,
        actor: String,
        epoch: u64,
        digest: String,
    },
    /// Public key assigned to a named member.
    Member {
        step: usize,
        name: String,
        identity: String,
    },
    Compromise {
        step: usize,
        victim: String,
        leaked_value: bool,
    },
    Interpolation {
        step: usize,
        actor: String,
        points: usize,
        candidates: String,
        analytic: String,
        unique: bool,
        method: CountMethod,
        recovered: bool,
    },
    Check {
        expectation: String,
        pass: bool,
    },
}

impl Record {
    pub fn step(&self) -> Option<usize> {
        match self {
            Record::Envelope { step, .. }
            | Record::Outcome { step, .. }
            | Record::Error { step, .. }
            | Record::Key { step, .. }
            | Record::Member { step, .. }
            | Record::Compromise { step, .. }
            | Record::Interpolation { step, .. } => Some(*step),
            Record::Header { .. } | Record::Check { .. } => None,
        }
    }
}

#[derive(Serialize)]
struct Line<'a> {
    schema: u32,
    #[serde(flatten)]
    record: &'a Record,
}

/// Everything a scenario run produced. Key material appears only as digests.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub scenario: String,
    pub records: Vec<Record>,
    pub envelopes: Vec<Envelope>,
    /// Final holdings of the adversary, for capability audits.
    pub adversary: Option<(AdversaryKind, Capabilities)>,
}

impl Transcript {
    pub fn checks(&self) -> impl Iterator<Item = (&str, bool)> {
        self.records.iter().filter_map(|r| match r {
            Record::Check { expectation, pass } => Some((expectation.as_str(), *pass)),
            _ => None,
        })
    }

    /// True when every expectation held.
    pub fn passed(&self) -> bool {
        self.checks().all(|(_, pass)| pass)
    }

    pub fn at_step(&self, step: usize) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.step() == Some(step))
    }

    /// Line-delimited JSON, one record per line, each carrying `schema`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(&Line { schema: TRANSCRIPT_SCHEMA, record }).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}
