//! Neighborhood-factored joint distributions over strategy profiles.
//!
//! A [`Gmm`] assigns each agent a positive potential over the configuration of
//! its neighborhood `N_i`; the probability of a profile is the product of all
//! potentials divided by the partition function `Z`. Inference is exact: the
//! full outcome table (every profile's normalized log-probability) is built on
//! first use by enumeration and cached on the model. Potentials are kept as
//! logarithms so that regret potentials `exp(-lambda * regret)` never
//! underflow, and every sum over profiles is taken in log space with a max
//! shift.
//!
//! Profile indices enumerate profiles in mixed radix with agent 0 as the least
//! significant digit. Neighborhood tables use the same convention over the
//! ascending member list of `N_i`.

use std::sync::{Arc, OnceLock};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::dataset::PlayDataset;
use crate::error::{GmmError, Result};
use crate::graph::{config_index, decode_config, InteractionGraph, StrategyProfile};
use crate::seeds::rng_from_seed;

/// Largest agent count accepted by exact enumeration.
pub const MAX_EXACT_AGENTS: usize = 20;

/// Floor applied to a probability before taking its log in [`Gmm::log_score`].
pub const LOG_SCORE_FLOOR: f64 = 1e-300;

/// Cached per-profile configuration indices are kept only below this many
/// entries (profiles times agents); larger models recompute them on the fly.
const INDEX_CACHE_LIMIT: usize = 1 << 23;

/// Potential of one agent over the configurations of its neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPotential {
    pub owner: usize,
    /// Ascending member list of `N_i`, including the owner.
    pub scope: Vec<usize>,
    /// Strictly positive values indexed by neighborhood configuration.
    pub table: Vec<f64>,
}

/// Parametric regret potentials: `pi_i = exp(-lambda_i * regret_i)`.
#[derive(Debug, Clone)]
pub struct RegretForm {
    lambda: Vec<f64>,
    regrets: Arc<Vec<Vec<f64>>>,
}

impl RegretForm {
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn regrets(&self) -> &[Vec<f64>] {
        &self.regrets
    }
}

#[derive(Debug, Clone)]
pub enum PotentialForm {
    Table,
    Regret(RegretForm),
}

#[derive(Debug)]
struct Structure {
    graph: InteractionGraph,
    arities: Vec<usize>,
    scopes: Vec<Vec<usize>>,
    /// Number of configurations of each neighborhood.
    table_sizes: Vec<usize>,
    index: OnceLock<Option<Vec<u32>>>,
}

impl Structure {
    fn new(graph: InteractionGraph, arities: Vec<usize>) -> Result<Self> {
        let n = graph.agent_count();
        if arities.len() != n {
            return Err(GmmError::InvalidModel(format!(
                "{} action domains for {n} agents",
                arities.len()
            )));
        }
        if let Some(i) = arities.iter().position(|&k| !(2..=u8::MAX as usize).contains(&k)) {
            return Err(GmmError::InvalidModel(format!(
                "agent {i} has {} actions; need between 2 and 255",
                arities[i]
            )));
        }
        let scopes: Vec<Vec<usize>> = (0..n).map(|i| graph.neighborhood(i)).collect();
        let table_sizes = scopes
            .iter()
            .map(|s| s.iter().map(|&j| arities[j]).product())
            .collect();
        Ok(Structure {
            graph,
            arities,
            scopes,
            table_sizes,
            index: OnceLock::new(),
        })
    }

    fn profile_count(&self) -> Result<usize> {
        let n = self.arities.len();
        if n > MAX_EXACT_AGENTS {
            return Err(GmmError::ModelTooLarge {
                agents: n,
                cap: MAX_EXACT_AGENTS,
            });
        }
        Ok(self.arities.iter().product())
    }

    fn cached_index(&self, profiles: usize) -> Option<&[u32]> {
        let n = self.arities.len();
        self.index
            .get_or_init(|| {
                if profiles * n > INDEX_CACHE_LIMIT {
                    return None;
                }
                let mut idx = Vec::with_capacity(profiles * n);
                let mut actions = vec![0u8; n];
                for _ in 0..profiles {
                    for scope in &self.scopes {
                        idx.push(config_index(scope, &self.arities, &actions) as u32);
                    }
                    advance(&mut actions, &self.arities);
                }
                Some(idx)
            })
            .as_deref()
    }

    /// Calls `f(profile_index, actions, config_indices)` for every profile.
    fn for_each_profile(&self, mut f: impl FnMut(usize, &[u8], &[u32])) -> Result<()> {
        let profiles = self.profile_count()?;
        let n = self.arities.len();
        let mut actions = vec![0u8; n];
        match self.cached_index(profiles) {
            Some(index) => {
                for (p, cfg) in index.chunks_exact(n).enumerate() {
                    f(p, &actions, cfg);
                    advance(&mut actions, &self.arities);
                }
            }
            None => {
                let mut cfg = vec![0u32; n];
                for p in 0..profiles {
                    for (c, scope) in cfg.iter_mut().zip(&self.scopes) {
                        *c = config_index(scope, &self.arities, &actions) as u32;
                    }
                    f(p, &actions, &cfg);
                    advance(&mut actions, &self.arities);
                }
            }
        }
        Ok(())
    }
}

/// Odometer increment of a profile, agent 0 fastest.
fn advance(actions: &mut [u8], arities: &[usize]) {
    for (a, &k) in actions.iter_mut().zip(arities) {
        *a += 1;
        if usize::from(*a) < k {
            return;
        }
        *a = 0;
    }
}

/// Normalized outcome table of a model.
#[derive(Debug)]
pub struct Outcomes {
    log_z: f64,
    log_probs: Vec<f64>,
}

impl Outcomes {
    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    /// Normalized log-probability of every profile, by profile index.
    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_probs.iter().map(|lp| lp.exp()).collect()
    }
}

/// `log(sum(exp(x)))` with a max shift.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Graphical multiagent model.
#[derive(Debug, Clone)]
pub struct Gmm {
    structure: Arc<Structure>,
    log_potentials: Arc<Vec<Vec<f64>>>,
    form: PotentialForm,
    outcomes: OnceLock<Arc<Outcomes>>,
}

impl Gmm {
    /// Table-form model from linear-space potentials, one per agent in order.
    pub fn from_potentials(
        graph: InteractionGraph,
        arities: Vec<usize>,
        potentials: Vec<LocalPotential>,
    ) -> Result<Self> {
        let structure = Structure::new(graph, arities)?;
        if potentials.len() != structure.scopes.len() {
            return Err(GmmError::InvalidModel(format!(
                "{} potentials for {} agents",
                potentials.len(),
                structure.scopes.len()
            )));
        }
        let mut logs = Vec::with_capacity(potentials.len());
        for (i, pot) in potentials.into_iter().enumerate() {
            if pot.owner != i {
                return Err(GmmError::InvalidModel(format!(
                    "potential at position {i} is owned by agent {}",
                    pot.owner
                )));
            }
            if pot.scope != structure.scopes[i] {
                return Err(GmmError::InvalidModel(format!(
                    "potential of agent {i} has scope {:?}, neighborhood is {:?}",
                    pot.scope, structure.scopes[i]
                )));
            }
            if let Some(v) = pot.table.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(GmmError::InvalidModel(format!(
                    "potential of agent {i} has non-positive or non-finite value {v}"
                )));
            }
            logs.push(pot.table.iter().map(|v| v.ln()).collect());
        }
        Self::assemble(Arc::new(structure), logs, PotentialForm::Table)
    }

    /// Table-form model from log-space potentials.
    pub fn from_log_potentials(
        graph: InteractionGraph,
        arities: Vec<usize>,
        log_potentials: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let structure = Structure::new(graph, arities)?;
        if let Some((i, _)) = log_potentials
            .iter()
            .enumerate()
            .find(|(_, t)| t.iter().any(|v| !v.is_finite()))
        {
            return Err(GmmError::InvalidModel(format!(
                "log potential of agent {i} is not finite"
            )));
        }
        Self::assemble(Arc::new(structure), log_potentials, PotentialForm::Table)
    }

    /// Regret-form model: `pi_i(c) = exp(-lambda_i * regrets[i][c])`.
    pub fn regret(
        graph: InteractionGraph,
        arities: Vec<usize>,
        regrets: Vec<Vec<f64>>,
        lambda: Vec<f64>,
    ) -> Result<Self> {
        let structure = Arc::new(Structure::new(graph, arities)?);
        if let Some((i, _)) = regrets
            .iter()
            .enumerate()
            .find(|(_, t)| t.iter().any(|v| !(v.is_finite() && *v >= 0.0)))
        {
            return Err(GmmError::InvalidModel(format!(
                "regret table of agent {i} has a negative or non-finite entry"
            )));
        }
        if regrets.len() != structure.scopes.len()
            || regrets.iter().zip(&structure.table_sizes).any(|(t, &s)| t.len() != s)
        {
            return Err(GmmError::InvalidModel(
                "regret tables do not match neighborhood sizes".into(),
            ));
        }
        Self::with_regrets(structure, Arc::new(regrets), lambda)
    }

    fn with_regrets(
        structure: Arc<Structure>,
        regrets: Arc<Vec<Vec<f64>>>,
        lambda: Vec<f64>,
    ) -> Result<Self> {
        validate_lambda(&lambda, regrets.len())?;
        let logs = regrets
            .iter()
            .zip(&lambda)
            .map(|(t, &l)| t.iter().map(|e| -l * e).collect())
            .collect();
        Ok(Gmm {
            structure,
            log_potentials: Arc::new(logs),
            form: PotentialForm::Regret(RegretForm { lambda, regrets }),
            outcomes: OnceLock::new(),
        })
    }

    fn assemble(
        structure: Arc<Structure>,
        logs: Vec<Vec<f64>>,
        form: PotentialForm,
    ) -> Result<Self> {
        if logs.len() != structure.scopes.len() {
            return Err(GmmError::InvalidModel(format!(
                "{} potentials for {} agents",
                logs.len(),
                structure.scopes.len()
            )));
        }
        for (i, (t, &size)) in logs.iter().zip(&structure.table_sizes).enumerate() {
            if t.len() != size {
                return Err(GmmError::InvalidModel(format!(
                    "potential of agent {i} has {} entries, neighborhood has {size} configurations",
                    t.len()
                )));
            }
        }
        Ok(Gmm {
            structure,
            log_potentials: Arc::new(logs),
            form,
            outcomes: OnceLock::new(),
        })
    }

    /// Same regret tables, new `lambda`. Fails for table-form models.
    pub fn with_lambda(&self, lambda: Vec<f64>) -> Result<Self> {
        match &self.form {
            PotentialForm::Regret(r) => {
                Self::with_regrets(Arc::clone(&self.structure), Arc::clone(&r.regrets), lambda)
            }
            PotentialForm::Table => Err(GmmError::NotParametric),
        }
    }

    /// In-place variant of [`Gmm::with_lambda`]; drops the cached outcome table.
    pub fn set_lambda(&mut self, lambda: Vec<f64>) -> Result<()> {
        *self = self.with_lambda(lambda)?;
        Ok(())
    }

    /// Table-form model with the same structure and the given log potentials.
    pub(crate) fn sibling_from_logs(&self, logs: Vec<Vec<f64>>) -> Result<Self> {
        Self::assemble(Arc::clone(&self.structure), logs, PotentialForm::Table)
    }

    pub fn graph(&self) -> &InteractionGraph {
        &self.structure.graph
    }

    pub fn agent_count(&self) -> usize {
        self.structure.arities.len()
    }

    pub fn arities(&self) -> &[usize] {
        &self.structure.arities
    }

    pub fn scope(&self, agent: usize) -> &[usize] {
        &self.structure.scopes[agent]
    }

    pub fn form(&self) -> &PotentialForm {
        &self.form
    }

    pub fn regret_form(&self) -> Option<&RegretForm> {
        match &self.form {
            PotentialForm::Regret(r) => Some(r),
            PotentialForm::Table => None,
        }
    }

    pub fn lambda(&self) -> Option<&[f64]> {
        self.regret_form().map(|r| r.lambda())
    }

    pub fn log_potentials(&self) -> &[Vec<f64>] {
        &self.log_potentials
    }

    /// Linear-space potential of one agent.
    pub fn potential(&self, agent: usize) -> LocalPotential {
        LocalPotential {
            owner: agent,
            scope: self.structure.scopes[agent].clone(),
            table: self.log_potentials[agent].iter().map(|v| v.exp()).collect(),
        }
    }

    /// Number of joint profiles, or an error above the enumeration cap.
    pub fn profile_count(&self) -> Result<usize> {
        self.structure.profile_count()
    }

    pub fn profile_index(&self, s: &StrategyProfile) -> Result<usize> {
        s.validate(self.arities())?;
        let all: Vec<usize> = (0..self.agent_count()).collect();
        Ok(config_index(&all, self.arities(), s.actions()))
    }

    pub fn profile_at(&self, index: usize) -> StrategyProfile {
        StrategyProfile::new(decode_config(index, self.arities()))
    }

    /// Configuration index of `agent`'s neighborhood within profile `s`.
    pub fn neighborhood_config(&self, agent: usize, s: &StrategyProfile) -> usize {
        config_index(&self.structure.scopes[agent], self.arities(), s.actions())
    }

    /// Actions of the members of `agent`'s neighborhood for configuration `config`.
    pub fn decode_neighborhood(&self, agent: usize, config: usize) -> Vec<u8> {
        let arities: Vec<usize> = self.structure.scopes[agent]
            .iter()
            .map(|&j| self.structure.arities[j])
            .collect();
        decode_config(config, &arities)
    }

    /// Unnormalized log weight `sum_i log pi_i(s_{N_i})`.
    pub fn log_weight(&self, s: &StrategyProfile) -> Result<f64> {
        s.validate(self.arities())?;
        Ok((0..self.agent_count())
            .map(|i| self.log_potentials[i][self.neighborhood_config(i, s)])
            .sum())
    }

    /// Outcome table, computed on first use.
    pub fn outcomes(&self) -> Result<&Outcomes> {
        if let Some(o) = self.outcomes.get() {
            return Ok(o);
        }
        let table = self.compute_outcomes()?;
        Ok(self.outcomes.get_or_init(|| Arc::new(table)))
    }

    fn compute_outcomes(&self) -> Result<Outcomes> {
        let profiles = self.profile_count()?;
        let mut weights = Vec::with_capacity(profiles);
        let logs = &self.log_potentials;
        self.structure.for_each_profile(|_, _, cfg| {
            weights.push(
                cfg.iter()
                    .zip(logs.iter())
                    .map(|(&c, t)| t[c as usize])
                    .sum::<f64>(),
            );
        })?;
        let log_z = log_sum_exp(&weights);
        if !log_z.is_finite() {
            return Err(GmmError::InvalidModel(format!(
                "log partition function is not finite ({log_z})"
            )));
        }
        for w in &mut weights {
            *w -= log_z;
        }
        Ok(Outcomes {
            log_z,
            log_probs: weights,
        })
    }

    pub fn log_partition(&self) -> Result<f64> {
        Ok(self.outcomes()?.log_z)
    }

    pub fn log_probability(&self, s: &StrategyProfile) -> Result<f64> {
        let idx = self.profile_index(s)?;
        Ok(self.outcomes()?.log_probs[idx])
    }

    pub fn joint_probability(&self, s: &StrategyProfile) -> Result<f64> {
        self.log_probability(s).map(f64::exp)
    }

    /// Probability of every profile, by profile index.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        Ok(self.outcomes()?.probabilities())
    }

    /// Log score `sum_k log Pr(s^k)`, each probability floored at 1e-300.
    pub fn log_score(&self, data: &PlayDataset) -> Result<f64> {
        data.require_non_empty()?;
        let table = self.outcomes()?;
        let floor = LOG_SCORE_FLOOR.ln();
        data.iter()
            .map(|s| Ok(table.log_probs[self.profile_index(s)?].max(floor)))
            .sum()
    }

    /// Unfloored data log-likelihood; the objective maximized by fitting.
    pub fn log_likelihood(&self, data: &PlayDataset) -> Result<f64> {
        data.require_non_empty()?;
        let table = self.outcomes()?;
        data.iter()
            .map(|s| Ok(table.log_probs[self.profile_index(s)?]))
            .sum()
    }

    /// Draws `count` i.i.d. profiles from the exact joint distribution.
    pub fn sample_profiles(&self, count: usize, seed: u64) -> Result<PlayDataset> {
        if count == 0 {
            return Err(GmmError::precondition("sample count must be positive"));
        }
        let probs = self.probabilities()?;
        let dist = WeightedIndex::new(&probs)
            .map_err(|e| GmmError::InvalidModel(format!("cannot sample outcome table: {e}")))?;
        let mut rng = rng_from_seed(seed);
        let profiles = (0..count).map(|_| self.profile_at(dist.sample(&mut rng))).collect();
        PlayDataset::new(self.agent_count(), profiles)
    }

    /// Exact marginal distribution of one agent's action.
    pub fn marginal(&self, agent: usize) -> Result<Vec<f64>> {
        self.check_agent(agent)?;
        let table = self.outcomes()?;
        let mut out = vec![0.0; self.arities()[agent]];
        self.structure.for_each_profile(|p, actions, _| {
            out[usize::from(actions[agent])] += table.log_probs[p].exp();
        })?;
        Ok(out)
    }

    /// Exact distribution of `agent`'s neighborhood configuration, indexed like
    /// the agent's potential table.
    pub fn neighborhood_marginal(&self, agent: usize) -> Result<Vec<f64>> {
        self.check_agent(agent)?;
        let table = self.outcomes()?;
        let mut out = vec![0.0; self.structure.table_sizes[agent]];
        self.structure.for_each_profile(|p, _, cfg| {
            out[cfg[agent] as usize] += table.log_probs[p].exp();
        })?;
        Ok(out)
    }

    /// `E[f(s_{N_i})]` under the model, for a statistic of `agent`'s
    /// neighborhood. `f` receives the actions of `N_i` in ascending agent order.
    pub fn expectation_of_statistic(
        &self,
        agent: usize,
        f: impl Fn(&[u8]) -> f64,
    ) -> Result<f64> {
        let marg = self.neighborhood_marginal(agent)?;
        Ok(marg
            .iter()
            .enumerate()
            .map(|(c, &p)| p * f(&self.decode_neighborhood(agent, c)))
            .sum())
    }

    /// `E[t[s_{N_i}]]` for a statistic given as a table over `agent`'s
    /// neighborhood configurations.
    pub fn expectation_of_table(&self, agent: usize, values: &[f64]) -> Result<f64> {
        let marg = self.neighborhood_marginal(agent)?;
        if values.len() != marg.len() {
            return Err(GmmError::precondition(format!(
                "statistic table has {} entries, neighborhood of agent {agent} has {}",
                values.len(),
                marg.len()
            )));
        }
        Ok(marg.iter().zip(values).map(|(p, v)| p * v).sum())
    }

    /// `E[f(s)]` over whole profiles; `f` receives the profile index and actions.
    pub fn expectation(&self, mut f: impl FnMut(usize, &[u8]) -> f64) -> Result<f64> {
        let table = self.outcomes()?;
        let mut acc = 0.0;
        self.structure.for_each_profile(|p, actions, _| {
            acc += table.log_probs[p].exp() * f(p, actions);
        })?;
        Ok(acc)
    }

    /// `true` when both models have the same graph and action domains.
    pub fn same_structure(&self, other: &Gmm) -> bool {
        Arc::ptr_eq(&self.structure, &other.structure)
            || (self.graph() == other.graph() && self.arities() == other.arities())
    }

    fn check_agent(&self, agent: usize) -> Result<()> {
        if agent >= self.agent_count() {
            Err(GmmError::precondition(format!(
                "agent {agent} out of range for {} agents",
                self.agent_count()
            )))
        } else {
            Ok(())
        }
    }
}

fn validate_lambda(lambda: &[f64], n: usize) -> Result<()> {
    if lambda.len() != n {
        return Err(GmmError::InvalidModel(format!(
            "{} lambda values for {n} agents",
            lambda.len()
        )));
    }
    if let Some((i, l)) = lambda
        .iter()
        .enumerate()
        .find(|(_, l)| !(l.is_finite() && **l > 0.0))
    {
        return Err(GmmError::InvalidModel(format!(
            "lambda of agent {i} must be positive and finite, got {l}"
        )));
    }
    Ok(())
}

/// Anything that assigns a probability to each joint profile.
pub trait JointDistribution {
    fn agent_count(&self) -> usize;

    fn log_probability(&self, s: &StrategyProfile) -> Result<f64>;

    /// Log score with each probability floored at 1e-300.
    fn log_score(&self, data: &PlayDataset) -> Result<f64> {
        data.require_non_empty()?;
        let floor = LOG_SCORE_FLOOR.ln();
        data.iter().map(|s| Ok(self.log_probability(s)?.max(floor))).sum()
    }
}

impl JointDistribution for Gmm {
    fn agent_count(&self) -> usize {
        Gmm::agent_count(self)
    }

    fn log_probability(&self, s: &StrategyProfile) -> Result<f64> {
        Gmm::log_probability(self, s)
    }

    fn log_score(&self, data: &PlayDataset) -> Result<f64> {
        Gmm::log_score(self, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> Gmm {
        let g = InteractionGraph::new(n, (1..n).map(|i| (i - 1, i))).unwrap();
        let pots = (0..n)
            .map(|i| {
                let scope = g.neighborhood(i);
                LocalPotential {
                    owner: i,
                    table: vec![1.0; 1 << scope.len()],
                    scope,
                }
            })
            .collect();
        Gmm::from_potentials(g, vec![2; n], pots).unwrap()
    }

    fn single(pi: [f64; 2]) -> Gmm {
        let g = InteractionGraph::empty(1).unwrap();
        let pot = LocalPotential {
            owner: 0,
            scope: vec![0],
            table: pi.to_vec(),
        };
        Gmm::from_potentials(g, vec![2], vec![pot]).unwrap()
    }

    #[test]
    fn uniform_model_is_uniform() {
        let m = uniform(3);
        let s = StrategyProfile::from_labels(&[1, 2, 1]).unwrap();
        assert!((m.joint_probability(&s).unwrap() - 0.125).abs() < 1e-15);
        assert!((m.log_partition().unwrap() - 3.0 * 2f64.ln()).abs() < 1e-12);
        let marg = m.marginal(1).unwrap();
        assert!((marg[0] - 0.5).abs() < 1e-12 && (marg[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_agent_normalization() {
        let m = single([3.0, 1.0]);
        let s = StrategyProfile::from_labels(&[1]).unwrap();
        assert!((m.joint_probability(&s).unwrap() - 0.75).abs() < 1e-15);
        assert!((m.log_partition().unwrap() - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_score_of_uniform() {
        let m = uniform(4);
        let data = PlayDataset::new(
            4,
            vec![
                StrategyProfile::from_labels(&[1, 1, 2, 2]).unwrap(),
                StrategyProfile::from_labels(&[2, 1, 2, 1]).unwrap(),
                StrategyProfile::from_labels(&[2, 2, 2, 2]).unwrap(),
            ],
        )
        .unwrap();
        let expected = -3.0 * 4.0 * 2f64.ln();
        assert!((m.log_score(&data).unwrap() - expected).abs() < 1e-12);
        assert!(m.log_score(&PlayDataset::new(4, vec![]).unwrap()).is_err());
    }

    #[test]
    fn rejects_non_positive_potentials() {
        let g = InteractionGraph::empty(1).unwrap();
        let pot = LocalPotential {
            owner: 0,
            scope: vec![0],
            table: vec![1.0, 0.0],
        };
        assert!(matches!(
            Gmm::from_potentials(g, vec![2], vec![pot]),
            Err(GmmError::InvalidModel(_))
        ));
    }

    #[test]
    fn enumeration_cap() {
        let g = InteractionGraph::empty(21).unwrap();
        let m = Gmm::from_log_potentials(g, vec![2; 21], vec![vec![0.0, 0.0]; 21]).unwrap();
        assert!(matches!(
            m.log_partition(),
            Err(GmmError::ModelTooLarge { agents: 21, .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_degenerate_case_collapses() {
        let m = single([1.0, 1e-13]);
        let d = m.sample_profiles(200, 3).unwrap();
        assert!(d.iter().all(|s| s.action(0) == 0));
        let m = uniform(3);
        assert_eq!(m.sample_profiles(50, 11).unwrap(), m.sample_profiles(50, 11).unwrap());
        assert!(m.sample_profiles(0, 1).is_err());
    }

    #[test]
    fn expectation_of_indicator_under_uniform() {
        let m = uniform(4);
        // agent 1 has neighborhood {0, 1, 2}
        let e = m
            .expectation_of_statistic(1, |c| if c == [1, 0, 1] { 1.0 } else { 0.0 })
            .unwrap();
        assert!((e - 0.125).abs() < 1e-12);
        assert!((m.expectation_of_statistic(2, |_| 4.5).unwrap() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn regret_form_lambda_update_invalidates_cache() {
        let g = InteractionGraph::new(2, [(0, 1)]).unwrap();
        let regrets = vec![vec![0.0, 1.0, 1.0, 0.0]; 2];
        let mut m = Gmm::regret(g, vec![2, 2], regrets, vec![1.0, 1.0]).unwrap();
        let z1 = m.log_partition().unwrap();
        m.set_lambda(vec![2.0, 2.0]).unwrap();
        let z2 = m.log_partition().unwrap();
        assert!(z1 > z2);
        assert!(m.with_lambda(vec![0.0, 1.0]).is_err());
    }
}
