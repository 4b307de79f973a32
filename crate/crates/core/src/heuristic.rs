//! Heuristic behavior: each company independently upgrades with probability
//! `pChange(i) = 0.5 * (1 - 1e-3)^{|N_i|} * (1 - 1e-3 * z_i)`, where `|N_i|`
//! counts the company itself. The constant variant plays upgrade with a fixed
//! probability for every company.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::PlayDataset;
use crate::error::{GmmError, Result};
use crate::game::{GameInstance, MAX_SIZE};
use crate::graph::{StrategyProfile, RETAIN, UPGRADE};
use crate::model::Gmm;
use crate::seeds::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum HeuristicSpec {
    /// Size and degree rule.
    Pchange,
    /// Same upgrade probability `p` for every agent.
    Constant { p: f64 },
}

impl Default for HeuristicSpec {
    fn default() -> Self {
        HeuristicSpec::Pchange
    }
}

impl HeuristicSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            HeuristicSpec::Constant { p } if !(p > 0.0 && p < 1.0) => Err(GmmError::Validation(
                vec![format!("constant heuristic probability {p} must lie in (0, 1)")],
            )),
            _ => Ok(()),
        }
    }
}

/// Probability that agent `i` upgrades.
pub fn p_change(inst: &GameInstance, i: usize, spec: &HeuristicSpec) -> Result<f64> {
    spec.validate()?;
    if i >= inst.agent_count() {
        return Err(GmmError::precondition(format!("agent {i} out of range")));
    }
    match *spec {
        HeuristicSpec::Constant { p } => Ok(p),
        HeuristicSpec::Pchange => {
            let z = inst.company(i).size;
            if !(z > 0.0 && z < MAX_SIZE) {
                return Err(GmmError::Validation(vec![format!(
                    "companies[{i}].size = {z} must lie in (0, {MAX_SIZE})"
                )]));
            }
            let nb = inst.graph().degree(i) + 1;
            Ok(0.5 * (1.0 - 1e-3f64).powi(nb as i32) * (1.0 - 1e-3 * z))
        }
    }
}

/// `pChange` for every agent.
pub fn p_change_all(inst: &GameInstance, spec: &HeuristicSpec) -> Result<Vec<f64>> {
    (0..inst.agent_count()).map(|i| p_change(inst, i, spec)).collect()
}

/// GMM encoding of the heuristic: each potential depends only on the owner's
/// action and holds its probability, so the partition function is 1.
pub fn build_heuristic_gmm(inst: &GameInstance, spec: &HeuristicSpec) -> Result<Gmm> {
    let probs = p_change_all(inst, spec)?;
    let graph = inst.graph();
    let logs = (0..inst.agent_count())
        .map(|i| {
            let scope = graph.neighborhood(i);
            let own = scope.iter().position(|&j| j == i).expect("i in N_i");
            let (retain, upgrade) = ((1.0 - probs[i]).ln(), probs[i].ln());
            (0..1usize << scope.len())
                .map(|c| if (c >> own) & 1 == 1 { upgrade } else { retain })
                .collect()
        })
        .collect();
    Gmm::from_log_potentials(graph.clone(), inst.arities(), logs)
}

/// Independent heuristic play: each agent upgrades with probability `pChange(i)`.
pub fn sample_heuristic(
    inst: &GameInstance,
    spec: &HeuristicSpec,
    count: usize,
    seed: u64,
) -> Result<PlayDataset> {
    if count == 0 {
        return Err(GmmError::precondition("sample count must be positive"));
    }
    let probs = p_change_all(inst, spec)?;
    let mut rng = rng_from_seed(seed);
    let profiles = (0..count)
        .map(|_| {
            StrategyProfile::new(
                probs
                    .iter()
                    .map(|&p| if rng.random::<f64>() < p { UPGRADE } else { RETAIN })
                    .collect(),
            )
        })
        .collect();
    PlayDataset::new(inst.agent_count(), profiles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game_instance, CompanyParams, GameFixture, Sector};
    use crate::graph::InteractionGraph;

    fn lone(size: f64) -> GameInstance {
        build_game_instance(
            InteractionGraph::empty(1).unwrap(),
            vec![CompanyParams {
                id: 0,
                size,
                sector: Sector::Content,
                change_coeff: 0.5,
            }],
            0,
        )
        .unwrap()
    }

    #[test]
    fn pchange_hand_value() {
        let p = p_change(&lone(100.0), 0, &HeuristicSpec::Pchange).unwrap();
        assert!((p - 0.44955).abs() < 1e-12);
    }

    #[test]
    fn constant_mode() {
        let inst = GameFixture::default_fixture().build().unwrap();
        let spec = HeuristicSpec::Constant { p: 0.05 };
        assert!(p_change_all(&inst, &spec).unwrap().iter().all(|&p| p == 0.05));
        assert!(p_change(&inst, 0, &HeuristicSpec::Constant { p: 1.0 }).is_err());
    }

    #[test]
    fn pchange_below_half() {
        let inst = GameFixture::default_fixture().build().unwrap();
        for p in p_change_all(&inst, &HeuristicSpec::Pchange).unwrap() {
            assert!(p > 0.0 && p < 0.5);
        }
    }

    #[test]
    fn heuristic_gmm_is_normalized_product() {
        let inst = GameFixture::default_fixture().top_k(4).unwrap().build().unwrap();
        let g = build_heuristic_gmm(&inst, &HeuristicSpec::Pchange).unwrap();
        assert!(g.log_partition().unwrap().abs() < 1e-12);
        let probs = p_change_all(&inst, &HeuristicSpec::Pchange).unwrap();
        for (i, &p) in probs.iter().enumerate() {
            let m = g.marginal(i).unwrap();
            assert!((m[0] - (1.0 - p)).abs() < 1e-12 && (m[1] - p).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_json_forms() {
        let a: HeuristicSpec = serde_json::from_str(r#"{"mode":"pchange"}"#).unwrap();
        assert_eq!(a, HeuristicSpec::Pchange);
        let b: HeuristicSpec = serde_json::from_str(r#"{"mode":"constant","p":0.05}"#).unwrap();
        assert_eq!(b, HeuristicSpec::Constant { p: 0.05 });
    }
}
