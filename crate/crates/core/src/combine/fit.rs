//! Maximum-likelihood fitting of the per-agent `lambda` of a regret-form GMM.
//!
//! For `Pr(s) ∝ exp(-sum_i lambda_i * regret_i(s_{N_i}))` the log-likelihood
//! gradient is `dL/dlambda_i = -sum_k regret_i(s^k) + |D| * E[regret_i]`, with the
//! expectation computed exactly from the model's outcome table. The ascent runs
//! on the mean log-likelihood, halving the step whenever a step would lower the
//! objective, and projects `lambda` onto `[lambda_floor, inf)`.

use serde::{Deserialize, Serialize};

use crate::dataset::PlayDataset;
use crate::error::{GmmError, Result};
use crate::model::{log_sum_exp, Gmm};

/// Smallest step tried before a line search gives up.
const MIN_STEP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub learning_rate: f64,
    /// Stop once the sup-norm of the (projected, per-profile) gradient is below this.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    pub lambda_floor: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            learning_rate: 0.05,
            gradient_tolerance: 1e-6,
            max_iterations: 10_000,
            lambda_floor: 1e-6,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            problems.push(format!("learning_rate = {} must be positive", self.learning_rate));
        }
        if !(self.gradient_tolerance > 0.0) {
            problems.push(format!(
                "gradient_tolerance = {} must be positive",
                self.gradient_tolerance
            ));
        }
        if self.max_iterations == 0 {
            problems.push("max_iterations must be at least 1".to_string());
        }
        if !(self.lambda_floor > 0.0 && self.lambda_floor.is_finite()) {
            problems.push(format!("lambda_floor = {} must be positive", self.lambda_floor));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(GmmError::Validation(problems))
        }
    }
}

/// Gradient of the data log-likelihood with respect to each `lambda_i`.
pub fn regret_loglik_gradient(model: &Gmm, data: &PlayDataset) -> Result<Vec<f64>> {
    let form = model.regret_form().ok_or(GmmError::NotParametric)?;
    data.require_non_empty()?;
    let n = model.agent_count();
    let mut observed = vec![0.0; n];
    for s in data {
        s.validate(model.arities())?;
        for (i, acc) in observed.iter_mut().enumerate() {
            *acc += form.regrets()[i][model.neighborhood_config(i, s)];
        }
    }
    let m = data.len() as f64;
    (0..n)
        .map(|i| {
            let expected = model.expectation_of_table(i, &form.regrets()[i])?;
            Ok(-observed[i] + m * expected)
        })
        .collect()
}

/// Fitted model together with the ascent trace.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: Gmm,
    /// Mean log-likelihood of the initial model and of every accepted step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    /// `true` when the gradient tolerance was met.
    pub converged: bool,
    /// Sup-norm of the projected mean-log-likelihood gradient at the returned model.
    pub gradient_norm: f64,
}

impl FitOutcome {
    pub fn initial_log_likelihood(&self) -> f64 {
        self.trace[0]
    }

    pub fn final_log_likelihood(&self) -> f64 {
        *self.trace.last().expect("trace has the initial value")
    }
}

/// Dense `profile x agent` regret matrix plus the data's mean regrets; makes
/// one likelihood-and-gradient evaluation a single pass over the profiles.
struct Design {
    n: usize,
    rows: Vec<f64>,
    observed: Vec<f64>,
}

impl Design {
    fn new(model: &Gmm, data: &PlayDataset) -> Result<Self> {
        let form = model.regret_form().ok_or(GmmError::NotParametric)?;
        let n = model.agent_count();
        let profiles = model.profile_count()?;
        let mut rows = Vec::with_capacity(profiles * n);
        for p in 0..profiles {
            let s = model.profile_at(p);
            rows.extend((0..n).map(|i| form.regrets()[i][model.neighborhood_config(i, &s)]));
        }
        let mut observed = vec![0.0; n];
        for s in data {
            s.validate(model.arities())?;
            for (i, acc) in observed.iter_mut().enumerate() {
                *acc += form.regrets()[i][model.neighborhood_config(i, s)];
            }
        }
        let m = data.len() as f64;
        observed.iter_mut().for_each(|o| *o /= m);
        Ok(Design { n, rows, observed })
    }

    /// Mean log-likelihood and its gradient at `lambda`.
    fn evaluate(&self, lambda: &[f64]) -> (f64, Vec<f64>) {
        let logits: Vec<f64> = self
            .rows
            .chunks_exact(self.n)
            .map(|r| -r.iter().zip(lambda).map(|(e, l)| e * l).sum::<f64>())
            .collect();
        let log_z = log_sum_exp(&logits);
        let mut expected = vec![0.0; self.n];
        for (r, lp) in self.rows.chunks_exact(self.n).zip(&logits) {
            let p = (lp - log_z).exp();
            expected.iter_mut().zip(r).for_each(|(e, x)| *e += p * x);
        }
        let ll = -self.observed.iter().zip(lambda).map(|(o, l)| o * l).sum::<f64>() - log_z;
        let grad = expected.iter().zip(&self.observed).map(|(e, o)| e - o).collect();
        (ll, grad)
    }
}

fn projected_norm(lambda: &[f64], grad: &[f64], floor: f64) -> f64 {
    lambda
        .iter()
        .zip(grad)
        .map(|(&l, &g)| if l <= floor && g < 0.0 { 0.0 } else { g.abs() })
        .fold(0.0, f64::max)
}

/// Gradient ascent on the mean log-likelihood starting from `init`.
pub fn fit_regret_gmm_ml(init: &Gmm, data: &PlayDataset, cfg: &FitConfig) -> Result<FitOutcome> {
    cfg.validate()?;
    if init.regret_form().is_none() {
        return Err(GmmError::NotParametric);
    }
    data.require_non_empty()?;
    let design = Design::new(init, data)?;

    let floor = cfg.lambda_floor;
    let mut lambda: Vec<f64> = init.lambda().expect("regret form").iter().map(|l| l.max(floor)).collect();
    let (mut ll, mut grad) = design.evaluate(&lambda);
    let mut trace = vec![ll];
    if !ll.is_finite() {
        return Err(GmmError::FitFailure {
            iteration: 0,
            reason: format!("initial log-likelihood is {ll}"),
            trace,
        });
    }

    let mut norm = projected_norm(&lambda, &grad, floor);
    let mut iterations = 0;
    let mut converged = norm < cfg.gradient_tolerance;

    while !converged && iterations < cfg.max_iterations {
        iterations += 1;
        let mut step = cfg.learning_rate;
        let accepted = loop {
            let cand: Vec<f64> = lambda
                .iter()
                .zip(&grad)
                .map(|(l, g)| (l + step * g).max(floor))
                .collect();
            if cand == lambda {
                break None;
            }
            let (cand_ll, cand_grad) = design.evaluate(&cand);
            if cand_ll.is_nan() || cand_ll == f64::INFINITY {
                return Err(GmmError::FitFailure {
                    iteration: iterations,
                    reason: format!("log-likelihood became {cand_ll}"),
                    trace,
                });
            }
            if cand_ll >= ll {
                break Some((cand, cand_ll, cand_grad));
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some((next, next_ll, next_grad)) = accepted else {
            // no representable ascent step remains
            break;
        };
        lambda = next;
        ll = next_ll;
        grad = next_grad;
        trace.push(ll);
        norm = projected_norm(&lambda, &grad, floor);
        converged = norm < cfg.gradient_tolerance;
    }

    Ok(FitOutcome {
        model: init.with_lambda(lambda)?,
        trace,
        iterations,
        converged,
        gradient_norm: norm,
    })
}

/// Refits `g1`'s `lambda` to the data, starting from `g1` itself.
pub fn direct_update(g1: &Gmm, data: &PlayDataset, cfg: &FitConfig) -> Result<Gmm> {
    Ok(fit_regret_gmm_ml(g1, data, cfg)?.model)
}

/// Copy of a regret-form model with every `lambda_i = 1`.
pub fn unit_lambda(family: &Gmm) -> Result<Gmm> {
    family.with_lambda(vec![1.0; family.agent_count()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_regret_gmm, GameFixture, Temperatures};

    #[test]
    fn design_matches_model_likelihood_and_gradient() {
        let inst = GameFixture::default_fixture().top_k(4).unwrap().build().unwrap();
        let model = build_regret_gmm(&inst, &Temperatures::uniform(4, 30.0).unwrap()).unwrap();
        let data = model.sample_profiles(200, 1).unwrap();
        let design = Design::new(&model, &data).unwrap();
        let lambda = vec![0.02, 0.05, 0.01, 0.03];
        let at = model.with_lambda(lambda.clone()).unwrap();
        let (ll, grad) = design.evaluate(&lambda);
        let m = data.len() as f64;
        let want = at.log_likelihood(&data).unwrap() / m;
        assert!((ll - want).abs() <= 1e-12 * want.abs());
        for (g, w) in grad.iter().zip(regret_loglik_gradient(&at, &data).unwrap()) {
            assert!((g * m - w).abs() <= 1e-9 * w.abs().max(1.0));
        }
    }
}
