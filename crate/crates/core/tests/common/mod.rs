//! Independent brute-force oracles. Nothing here goes through the crate's
//! inference code: payoffs are recomputed from the game's parameters and
//! normalization is a plain sum over every profile.
#![allow(dead_code)]

use multiagent_gmm::game::{GameInstance, Sector};
use multiagent_gmm::{GameFixture, StrategyProfile};

/// Every profile of `n` binary agents, agent 0 varying fastest.
pub fn all_profiles(n: usize) -> Vec<Vec<u8>> {
    (0..1usize << n)
        .map(|idx| (0..n).map(|i| ((idx >> i) & 1) as u8).collect())
        .collect()
}

pub fn profile(actions: &[u8]) -> StrategyProfile {
    StrategyProfile::new(actions.to_vec())
}

fn phi(ch: f64, label: f64) -> f64 {
    if label / 2.0 - ch < 0.5 {
        label / 2.0 - ch
    } else {
        0.5 - label / 2.0 + ch
    }
}

/// Payoff of `i` in the full profile `s`, straight from the game definition.
pub fn payoff(inst: &GameInstance, i: usize, s: &[u8]) -> f64 {
    let me = inst.company(i);
    let mut total = 0.0;
    for j in inst.graph().partners(i) {
        let j = *j;
        let other = inst.company(j);
        let same_sector = me.sector == other.sector;
        let y = inst.pair_coeff(i, j).unwrap();
        let agree = if s[i] == s[j] { 1 } else { 0 };
        let divisor = if same_sector { 3.0 } else { 5.0 };
        total += (me.size + other.size) * (1.0 + y / divisor).powi(agree);
    }
    let label = f64::from(s[i]) + 1.0;
    (1.0 + inst.flex_coeffs()[i] * phi(me.change_coeff, label)) * total
}

pub fn regret(inst: &GameInstance, i: usize, s: &[u8]) -> f64 {
    let mut alt = s.to_vec();
    let mut best = f64::NEG_INFINITY;
    for a in 0..2u8 {
        alt[i] = a;
        best = best.max(payoff(inst, i, &alt));
    }
    best - payoff(inst, i, s)
}

/// Linear-space probabilities of the regret model, normalized by a plain sum.
pub fn regret_probabilities(inst: &GameInstance, lambda: &[f64]) -> Vec<f64> {
    let n = inst.agent_count();
    let weights: Vec<f64> = all_profiles(n)
        .iter()
        .map(|s| (0..n).map(|i| (-lambda[i] * regret(inst, i, s)).exp()).product())
        .collect();
    let z: f64 = weights.iter().sum();
    weights.iter().map(|w| w / z).collect()
}

pub fn regret_partition(inst: &GameInstance, lambda: &[f64]) -> f64 {
    let n = inst.agent_count();
    all_profiles(n)
        .iter()
        .map(|s| (0..n).map(|i| (-lambda[i] * regret(inst, i, s)).exp()).product::<f64>())
        .sum()
}

/// Probabilities of an arbitrary potential model given as a closure on profiles.
pub fn normalized(n: usize, weight: impl Fn(&[u8]) -> f64) -> Vec<f64> {
    let w: Vec<f64> = all_profiles(n).iter().map(|s| weight(s)).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// The 4-company subgame used by the small-instance checks.
pub fn four_agent_game() -> GameInstance {
    GameFixture::default_fixture().top_k(4).unwrap().build().unwrap()
}

/// A hand-written game with explicit coefficients, `n` agents on a path plus a chord.
pub fn small_game(n: usize) -> GameInstance {
    let sectors = [Sector::Commerce, Sector::Content, Sector::Infrastructure, Sector::Commerce];
    let mut edges = vec![];
    for i in 0..n - 1 {
        edges.push(format!("[{i},{}]", i + 1));
    }
    if n == 4 {
        edges.push("[0,2]".into());
    }
    let companies: Vec<String> = (0..n)
        .map(|i| {
            let sector = match sectors[i] {
                Sector::Commerce => "commerce",
                Sector::Content => "content",
                Sector::Infrastructure => "infrastructure",
            };
            format!(
                r#"{{"id":{i},"size":{},"sector":"{sector}","change_coeff":{}}}"#,
                10.0 + 7.0 * i as f64,
                [0.2, 0.7, 0.45, 0.9][i]
            )
        })
        .collect();
    let json = format!(
        r#"{{"n":{n},"edges":[{}],"companies":[{}],"coeff_seed":5}}"#,
        edges.join(","),
        companies.join(",")
    );
    let fx: GameFixture = serde_json::from_str(&json).unwrap();
    fx.build().unwrap()
}
