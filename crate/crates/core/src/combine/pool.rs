//! Logarithmic opinion pool of two GMMs over the same agents:
//! `Pr(s) ∝ Pr_1(s)^w * Pr_2(s)^(1-w)`.

use std::sync::{Arc, OnceLock};

use crate::dataset::PlayDataset;
use crate::error::{GmmError, Result};
use crate::graph::StrategyProfile;
use crate::model::{log_sum_exp, Gmm, JointDistribution};

use super::fit::{fit_regret_gmm_ml, unit_lambda, FitConfig};

#[derive(Debug, Clone)]
pub struct PooledModel {
    g1: Gmm,
    g2: Gmm,
    weight: f64,
    log_probs: OnceLock<Arc<Vec<f64>>>,
}

impl PooledModel {
    pub fn new(g1: Gmm, g2: Gmm, weight: f64) -> Result<Self> {
        if !g1.same_structure(&g2) {
            return Err(GmmError::InvalidModel(
                "pooled models must share graph and action domains".into(),
            ));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(GmmError::InvalidModel(format!("pool weight {weight} outside [0, 1]")));
        }
        Ok(PooledModel {
            g1,
            g2,
            weight,
            log_probs: OnceLock::new(),
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn first(&self) -> &Gmm {
        &self.g1
    }

    pub fn second(&self) -> &Gmm {
        &self.g2
    }

    /// Normalized pooled log-probability of every profile.
    pub fn log_probs(&self) -> Result<&[f64]> {
        if let Some(t) = self.log_probs.get() {
            return Ok(t);
        }
        let table = pooled_log_probs(&self.g1, &self.g2, self.weight)?;
        Ok(self.log_probs.get_or_init(|| Arc::new(table)))
    }

    pub fn pool_probability(&self, s: &StrategyProfile) -> Result<f64> {
        self.log_probability(s).map(f64::exp)
    }

    /// Table-form GMM with potentials `pi_1i^w * pi_2i^(1-w)`; same distribution
    /// as the pool.
    pub fn to_gmm(&self) -> Result<Gmm> {
        let w = self.weight;
        let logs = self
            .g1
            .log_potentials()
            .iter()
            .zip(self.g2.log_potentials())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| w * x + (1.0 - w) * y).collect())
            .collect();
        self.g1.sibling_from_logs(logs)
    }
}

impl JointDistribution for PooledModel {
    fn agent_count(&self) -> usize {
        self.g1.agent_count()
    }

    fn log_probability(&self, s: &StrategyProfile) -> Result<f64> {
        let idx = self.g1.profile_index(s)?;
        Ok(self.log_probs()?[idx])
    }
}

fn pooled_log_probs(g1: &Gmm, g2: &Gmm, w: f64) -> Result<Vec<f64>> {
    let (a, b) = (g1.outcomes()?.log_probs(), g2.outcomes()?.log_probs());
    let mut mixed: Vec<f64> = a.iter().zip(b).map(|(x, y)| w * x + (1.0 - w) * y).collect();
    let log_z = log_sum_exp(&mixed);
    mixed.iter_mut().for_each(|v| *v -= log_z);
    Ok(mixed)
}

/// Per-profile log-probabilities of `data` under both components.
fn data_log_probs(g1: &Gmm, g2: &Gmm, data: &PlayDataset) -> Result<(Vec<f64>, Vec<f64>)> {
    data.require_non_empty()?;
    let (t1, t2) = (g1.outcomes()?.log_probs(), g2.outcomes()?.log_probs());
    let mut a = Vec::with_capacity(data.len());
    let mut b = Vec::with_capacity(data.len());
    for s in data {
        let idx = g1.profile_index(s)?;
        a.push(t1[idx]);
        b.push(t2[idx]);
    }
    Ok((a, b))
}

/// Log-likelihood of `data` under the pool with weight `w`.
pub fn pool_log_likelihood(g1: &Gmm, g2: &Gmm, data: &PlayDataset, w: f64) -> Result<f64> {
    let table = pooled_log_probs(g1, g2, w)?;
    data.require_non_empty()?;
    data.iter().map(|s| Ok(table[g1.profile_index(s)?])).sum()
}

/// `dL/dw = sum_k [log Pr_1(s^k) - log Pr_2(s^k)] - |D| * E_pool[log Pr_1 - log Pr_2]`.
pub fn pool_weight_gradient(g1: &Gmm, g2: &Gmm, data: &PlayDataset, w: f64) -> Result<f64> {
    let (a, b) = data_log_probs(g1, g2, data)?;
    let observed: f64 = a.iter().zip(&b).map(|(x, y)| x - y).sum();
    let pooled = pooled_log_probs(g1, g2, w)?;
    let (t1, t2) = (g1.outcomes()?.log_probs(), g2.outcomes()?.log_probs());
    let expected: f64 = pooled
        .iter()
        .zip(t1.iter().zip(t2))
        .map(|(lp, (x, y))| lp.exp() * (x - y))
        .sum();
    Ok(observed - data.len() as f64 * expected)
}

#[derive(Debug, Clone)]
pub struct PoolWeightFit {
    pub weight: f64,
    /// Mean held-out log-likelihood at the start and after each accepted step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Learns `w` by projected gradient ascent from `w = 0.5` with rate `beta`.
pub fn learn_pool_weight(
    g1: &Gmm,
    g2: &Gmm,
    heldout: &PlayDataset,
    beta: f64,
    cfg: &FitConfig,
) -> Result<PoolWeightFit> {
    cfg.validate()?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(GmmError::Validation(vec![format!("pool rate {beta} must be positive")]));
    }
    if !g1.same_structure(g2) {
        return Err(GmmError::InvalidModel(
            "pooled models must share graph and action domains".into(),
        ));
    }
    let m = heldout.len() as f64;
    let (a, b) = data_log_probs(g1, g2, heldout)?;
    let diff: Vec<f64> = {
        let (t1, t2) = (g1.outcomes()?.log_probs(), g2.outcomes()?.log_probs());
        t1.iter().zip(t2).map(|(x, y)| x - y).collect()
    };
    let base: Vec<f64> = g2.outcomes()?.log_probs().to_vec();
    let obs_b: f64 = b.iter().sum::<f64>() / m;
    let obs_d: f64 = a.iter().zip(&b).map(|(x, y)| x - y).sum::<f64>() / m;

    // mean log-likelihood and its derivative in w
    let evaluate = |w: f64| -> (f64, f64) {
        let logits: Vec<f64> = base.iter().zip(&diff).map(|(b, d)| b + w * d).collect();
        let log_z = log_sum_exp(&logits);
        let expected: f64 = logits
            .iter()
            .zip(&diff)
            .map(|(l, d)| (l - log_z).exp() * d)
            .sum();
        (obs_b + w * obs_d - log_z, obs_d - expected)
    };
    let projected = |w: f64, g: f64| -> f64 {
        if (w <= 0.0 && g < 0.0) || (w >= 1.0 && g > 0.0) {
            0.0
        } else {
            g.abs()
        }
    };

    let mut w = 0.5;
    let (mut ll, mut grad) = evaluate(w);
    let mut trace = vec![ll];
    let mut iterations = 0;
    let mut converged = projected(w, grad) < cfg.gradient_tolerance;
    while !converged && iterations < cfg.max_iterations {
        iterations += 1;
        let mut step = beta;
        let mut accepted = None;
        while step >= 1e-14 {
            let cand = (w + step * grad).clamp(0.0, 1.0);
            if cand == w {
                break;
            }
            let (cll, cgrad) = evaluate(cand);
            if cll.is_nan() {
                return Err(GmmError::FitFailure {
                    iteration: iterations,
                    reason: "pool log-likelihood became NaN".into(),
                    trace,
                });
            }
            if cll >= ll {
                accepted = Some((cand, cll, cgrad));
                break;
            }
            step *= 0.5;
        }
        let Some((nw, nll, ngrad)) = accepted else {
            break;
        };
        w = nw;
        ll = nll;
        grad = ngrad;
        trace.push(ll);
        converged = projected(w, grad) < cfg.gradient_tolerance;
    }
    Ok(PoolWeightFit {
        weight: w,
        trace,
        iterations,
        converged,
    })
}

/// Fits `G2` (regret form, unit-lambda start) on the first half of `data`
/// (the larger half when `|data|` is odd), learns `w` on the second half, and
/// pools `g1` with `G2`.
pub fn opinion_pool(
    g1: &Gmm,
    family: &Gmm,
    data: &PlayDataset,
    fit_cfg: &FitConfig,
    beta: f64,
) -> Result<PooledModel> {
    if data.len() < 2 {
        return Err(GmmError::precondition(format!(
            "opinion pool needs at least 2 profiles to split, got {}",
            data.len()
        )));
    }
    let (fit_half, weight_half) = data.split_at(data.len().div_ceil(2));
    let g2 = fit_regret_gmm_ml(&unit_lambda(family)?, &fit_half, fit_cfg)?.model;
    let w = learn_pool_weight(g1, &g2, &weight_half, beta, fit_cfg)?.weight;
    PooledModel::new(g1.clone(), g2, w)
}
