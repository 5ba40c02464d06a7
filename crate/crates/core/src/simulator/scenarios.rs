use num_bigint::BigUint;

use crate::field::PrimeField;
use crate::scheme::{GroupParams, RejectReason};

use super::{AdversaryKind, Expect, Roster, Scenario, ScenarioError, Step, ADVERSARY, GM};

pub const SCENARIO_NAMES: [&str; 7] = [
    "happy_auth",
    "group_key",
    "outsider_dos",
    "replay_attack",
    "member_compromise",
    "gm_compromise",
    "gm_takeover",
];

/// `q = 101, m = 16, n = 4, d = 8`
pub fn ci_params() -> GroupParams {
    GroupParams::new(PrimeField::new(101).expect("101 is prime"), 16, 4, 8).expect("valid parameters")
}

pub fn scenario_by_name(name: &str) -> Result<Scenario, ScenarioError> {
    Ok(match name {
        "happy_auth" => scenario_happy_auth(),
        "group_key" => scenario_group_key(),
        "outsider_dos" => scenario_outsider_dos(),
        "replay_attack" => scenario_replay_attack(),
        "member_compromise" => scenario_member_compromise(),
        "gm_compromise" => scenario_gm_compromise(5),
        "gm_takeover" => scenario_gm_compromise(6),
        _ => return Err(ScenarioError::UnknownScenario(name.into())),
    })
}

struct Script {
    steps: Vec<Step>,
    expectations: Vec<Expect>,
}

impl Script {
    fn new() -> Self {
        Script { steps: Vec::new(), expectations: Vec::new() }
    }

    fn push(&mut self, step: Step) -> usize {
        self.steps.push(step);
        self.steps.len() - 1
    }

    fn expect(&mut self, e: Expect) {
        self.expectations.push(e);
    }

    fn register_all(&mut self, names: &[String]) {
        for m in names {
            self.push(Step::Register { member: m.clone() });
        }
    }

    fn finish(self, name: &str, params: GroupParams, members: Vec<String>, adversary: Option<AdversaryKind>) -> Scenario {
        Scenario {
            name: name.into(),
            params,
            roster: Roster { members, adversary },
            steps: self.steps,
            expectations: self.expectations,
        }
    }
}

fn names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

fn s(v: &str) -> String {
    v.to_string()
}

/// Three members register and authenticate.
pub fn scenario_happy_auth() -> Scenario {
    let members = names("member", 3);
    let mut sc = Script::new();
    sc.register_all(&members);
    for m in &members {
        let i = sc.push(Step::Authenticate { member: m.clone() });
        sc.expect(Expect::Accept { step: i });
    }
    sc.finish("happy_auth", ci_params(), members, None)
}

/// Five direct members and one sponsored member agree on a group key.
pub fn scenario_group_key() -> Scenario {
    let members = names("member", 5);
    let mut sc = Script::new();
    sc.register_all(&members);
    sc.push(Step::Sponsor { sponsor: s("member1"), child: s("sponsored1"), index: 1 });
    let auth = sc.push(Step::Authenticate { member: s("sponsored1") });
    sc.expect(Expect::AcceptSponsored { step: auth, sponsor: s("member1") });
    let bc = sc.push(Step::Broadcast);
    let mut holders = vec![s(GM)];
    holders.extend(members.iter().cloned());
    holders.push(s("sponsored1"));
    sc.expect(Expect::KeysAgree { step: bc, actors: holders });
    sc.finish("group_key", ci_params(), members, None)
}

/// An outsider answers in a member's name; the reject is attributed and the
/// honest members still authenticate afterwards.
pub fn scenario_outsider_dos() -> Scenario {
    let members = names("member", 2);
    let mut sc = Script::new();
    sc.register_all(&members);
    let attack = sc.push(Step::OutsiderGuess { claim: s("member1") });
    sc.expect(Expect::Reject { step: attack, reason: RejectReason::AeadFailure });
    sc.expect(Expect::Attributed { step: attack, culprit: s(ADVERSARY), identity_of: s("member1") });
    for m in &members {
        let i = sc.push(Step::Authenticate { member: m.clone() });
        sc.expect(Expect::Accept { step: i });
    }
    let bc = sc.push(Step::Broadcast);
    sc.expect(Expect::KeysAgree { step: bc, actors: vec![s(GM), s("member1"), s("member2")] });
    sc.expect(Expect::KeyDiffers { step: bc, actor: s(ADVERSARY), from: s(GM) });
    sc.finish("outsider_dos", ci_params(), members, Some(AdversaryKind::Outsider))
}

/// A recorded accepted response is replayed against its own and a new challenge.
pub fn scenario_replay_attack() -> Scenario {
    let members = names("member", 2);
    let mut sc = Script::new();
    sc.register_all(&members);
    let first = sc.push(Step::Authenticate { member: s("member1") });
    sc.expect(Expect::Accept { step: first });
    let stale = sc.push(Step::ReplayStale { member: s("member1") });
    sc.expect(Expect::Error { step: stale, code: s("stale-nonce") });
    let fresh = sc.push(Step::ReplayFresh { member: s("member1") });
    sc.expect(Expect::Reject { step: fresh, reason: RejectReason::AeadFailure });
    sc.expect(Expect::Attributed { step: fresh, culprit: s(ADVERSARY), identity_of: s("member1") });
    for m in &members {
        let i = sc.push(Step::Authenticate { member: m.clone() });
        sc.expect(Expect::Accept { step: i });
    }
    sc.finish("replay_attack", ci_params(), members, Some(AdversaryKind::Replayer))
}

/// One stolen credential yields the group key and the sponsorship path, but
/// not another member's identity.
pub fn scenario_member_compromise() -> Scenario {
    let members = names("member", 3);
    let mut sc = Script::new();
    sc.register_all(&members);
    sc.push(Step::Steal { member: s("member1"), leak_value: false });
    let bc = sc.push(Step::Broadcast);
    sc.expect(Expect::KeysAgree { step: bc, actors: vec![s(GM), s("member2"), s(ADVERSARY)] });
    let imp = sc.push(Step::Impersonate { stolen: s("member1"), claim: s("member2") });
    sc.expect(Expect::Reject { step: imp, reason: RejectReason::ValueMismatch });
    sc.expect(Expect::Attributed { step: imp, culprit: s(ADVERSARY), identity_of: s("member2") });
    let sp = sc.push(Step::SponsorFromStolen { stolen: s("member1"), index: 1 });
    sc.expect(Expect::AcceptSponsored { step: sp, sponsor: s("member1") });
    let honest = sc.push(Step::Authenticate { member: s("member2") });
    sc.expect(Expect::Accept { step: honest });
    sc.finish("member_compromise", ci_params(), members, Some(AdversaryKind::ShareThief(1)))
}

/// A fake manager holding `k` stolen credentials with their polynomial
/// values tries to rebuild `f` (`q = 101`, `d = 5`) and mint a credential for
/// a member it never compromised.
pub fn scenario_gm_compromise(k: usize) -> Scenario {
    let params = GroupParams::new(PrimeField::new(101).expect("101 is prime"), 16, 4, 5).expect("valid parameters");
    let d = params.degree;
    let q = BigUint::from(101u32);
    let members = names("member", k + 1);
    let mut sc = Script::new();
    sc.register_all(&members);

    let blind = sc.push(Step::Interpolate);
    sc.expect(Expect::Interpolation { step: blind, unique: false, candidates: q.pow(d as u32 + 1).to_string() });
    for m in &members[..k] {
        sc.push(Step::Steal { member: m.clone(), leak_value: true });
    }
    let informed = sc.push(Step::Interpolate);
    let candidates = if k <= d + 1 { q.pow((d + 1 - k) as u32).to_string() } else { s("1") };
    sc.expect(Expect::Interpolation { step: informed, unique: k > d, candidates });

    let victim = members[k].clone();
    let forge = sc.push(Step::ForgeAndAuthenticate { claim: victim.clone() });
    if k > d {
        sc.expect(Expect::Accept { step: forge });
        sc.expect(Expect::Attributed { step: forge, culprit: s(ADVERSARY), identity_of: victim });
    } else {
        sc.expect(Expect::Error { step: forge, code: s("no-polynomial") });
    }
    let name = if k > d { "gm_takeover" } else { "gm_compromise" };
    sc.finish(name, params, members, Some(AdversaryKind::FakeGm(k)))
}
