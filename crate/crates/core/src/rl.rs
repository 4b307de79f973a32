//! Ground-truth play simulator.
//!
//! Every agent learns a stochastic policy `sigma_i(s_i | s_{N_-i})` over its
//! partners' joint configurations. Since agents do not observe partners before
//! acting, play draws each action from the state-averaged marginal, with states
//! weighted uniformly. Rewards are credited to the realized state, Q cells keep
//! the running average reward, and after each round of plays every visited
//! state row moves toward the greedy row with step `gamma`.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::PlayDataset;
use crate::error::{GmmError, Result};
use crate::game::GameInstance;
use crate::graph::{config_index, decode_config, StrategyProfile};
use crate::heuristic::{p_change_all, HeuristicSpec};
use crate::seeds::{rng_from_seed, SeededRng};

const ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RlConfig {
    /// Policy step size.
    pub gamma: f64,
    /// Policy-improvement rounds.
    pub iterations: usize,
    /// Joint plays credited to Q before each policy step.
    pub plays_per_iteration: usize,
    pub seed: u64,
}

impl Default for RlConfig {
    fn default() -> Self {
        RlConfig {
            gamma: 0.2,
            iterations: 40,
            plays_per_iteration: 50,
            seed: 0,
        }
    }
}

impl RlConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(0.0..=1.0).contains(&self.gamma) {
            problems.push(format!("rl.gamma = {} must lie in [0, 1]", self.gamma));
        }
        if self.plays_per_iteration == 0 {
            problems.push("rl.plays_per_iteration must be at least 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(GmmError::Validation(problems))
        }
    }
}

/// Policy of one agent: a distribution over own actions for every partner
/// configuration (mixed radix over `partners`, first partner least significant).
#[derive(Debug, Clone, PartialEq)]
pub struct AgentPolicy {
    pub agent: usize,
    pub partners: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    agents: Vec<AgentPolicy>,
}

impl Policy {
    /// Every row of agent `i` set to `init[i]`.
    pub fn constant(inst: &GameInstance, init: &[Vec<f64>]) -> Result<Self> {
        let arities = inst.arities();
        let agents = (0..inst.agent_count())
            .map(|i| {
                let partners = inst.graph().partners(i).to_vec();
                let states: usize = partners.iter().map(|&j| arities[j]).product();
                AgentPolicy {
                    agent: i,
                    rows: vec![init[i].clone(); states],
                    partners,
                }
            })
            .collect();
        let p = Policy { agents };
        p.validate()?;
        Ok(p)
    }

    /// The heuristic starting point: every row is `(1 - pChange(i), pChange(i))`.
    pub fn from_heuristic(inst: &GameInstance, spec: &HeuristicSpec) -> Result<Self> {
        let probs = p_change_all(inst, spec)?;
        let init: Vec<Vec<f64>> = probs.iter().map(|&p| vec![1.0 - p, p]).collect();
        Self::constant(inst, &init)
    }

    pub fn agents(&self) -> &[AgentPolicy] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &AgentPolicy {
        &self.agents[i]
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    /// Rows are distributions within 1e-9.
    pub fn validate(&self) -> Result<()> {
        for a in &self.agents {
            for (s, row) in a.rows.iter().enumerate() {
                let sum: f64 = row.iter().sum();
                if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > ROW_TOLERANCE
                {
                    return Err(GmmError::InvalidModel(format!(
                        "policy row {s} of agent {} is not a distribution: {row:?}",
                        a.agent
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&PolicyFile::from(self))?;
        std::fs::write(path, text + "\n").map_err(|e| GmmError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| GmmError::io(path, e))?;
        let file: PolicyFile = serde_json::from_str(&text)?;
        file.try_into()
    }
}

/// On-disk policy: per agent, each partner configuration (action labels, in
/// partner order) with its action-probability row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub agents: Vec<AgentPolicyFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentPolicyFile {
    pub agent: usize,
    pub partners: Vec<usize>,
    pub rows: Vec<PolicyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyRow {
    pub state: Vec<u8>,
    pub probs: Vec<f64>,
}

impl From<&Policy> for PolicyFile {
    fn from(p: &Policy) -> Self {
        PolicyFile {
            agents: p
                .agents
                .iter()
                .map(|a| {
                    let arities = vec![2; a.partners.len()];
                    AgentPolicyFile {
                        agent: a.agent,
                        partners: a.partners.clone(),
                        rows: a
                            .rows
                            .iter()
                            .enumerate()
                            .map(|(s, row)| PolicyRow {
                                state: decode_config(s, &arities).iter().map(|x| x + 1).collect(),
                                probs: row.clone(),
                            })
                            .collect(),
                    }
                })
                .collect(),
        }
    }
}

impl TryFrom<PolicyFile> for Policy {
    type Error = GmmError;

    fn try_from(f: PolicyFile) -> Result<Self> {
        let mut agents = Vec::with_capacity(f.agents.len());
        for (k, a) in f.agents.into_iter().enumerate() {
            if a.agent != k {
                return Err(GmmError::InvalidModel(format!(
                    "policy entry {k} is for agent {}",
                    a.agent
                )));
            }
            let arities = vec![2; a.partners.len()];
            let mut rows = vec![Vec::new(); 1 << a.partners.len()];
            for r in a.rows {
                if r.state.len() != a.partners.len() || r.state.iter().any(|&x| x == 0 || x > 2) {
                    return Err(GmmError::InvalidModel(format!(
                        "agent {k}: bad state {:?}",
                        r.state
                    )));
                }
                let zero_based: Vec<u8> = r.state.iter().map(|x| x - 1).collect();
                let idx = config_index(&(0..zero_based.len()).collect::<Vec<_>>(), &arities, &zero_based);
                rows[idx] = r.probs;
            }
            if rows.iter().any(|r| r.len() != 2) {
                return Err(GmmError::InvalidModel(format!(
                    "agent {k}: policy does not cover every partner configuration"
                )));
            }
            agents.push(AgentPolicy {
                agent: k,
                partners: a.partners,
                rows,
            });
        }
        let p = Policy { agents };
        p.validate()?;
        Ok(p)
    }
}

/// Running mean reward and visit count of one `(state, action)` cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QCell {
    pub mean: f64,
    pub count: u64,
}

impl QCell {
    fn credit(&mut self, reward: f64) {
        self.count += 1;
        self.mean += (reward - self.mean) / self.count as f64;
    }
}

/// Per agent, per partner state, per own action.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    cells: Vec<Vec<Vec<QCell>>>,
}

impl QTable {
    pub fn empty(policy: &Policy) -> Self {
        QTable {
            cells: policy
                .agents
                .iter()
                .map(|a| vec![vec![QCell::default(); 2]; a.rows.len()])
                .collect(),
        }
    }

    pub fn cell(&self, agent: usize, state: usize, action: u8) -> QCell {
        self.cells[agent][state][usize::from(action)]
    }
}

/// One reward credited to a Q cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Credit {
    pub agent: usize,
    pub state: usize,
    pub action: u8,
    pub reward: f64,
}

#[derive(Debug, Clone, Default)]
pub struct IterationReport {
    pub credits: Vec<Credit>,
    /// Realized payoff averaged over agents and plays.
    pub mean_payoff: f64,
    /// Number of state rows changed, per agent.
    pub rows_updated: Vec<usize>,
}

/// Action distribution of agent `i` with partner states weighted uniformly.
pub fn marginal_action_prob(policy: &Policy, i: usize) -> Vec<f64> {
    let rows = &policy.agents[i].rows;
    let k = rows.first().map_or(0, Vec::len);
    let mut out = vec![0.0; k];
    for row in rows {
        for (o, p) in out.iter_mut().zip(row) {
            *o += p;
        }
    }
    let states = rows.len() as f64;
    out.iter_mut().for_each(|o| *o /= states);
    out
}

fn draw(dist: &[f64], rng: &mut SeededRng) -> u8 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return a as u8;
        }
    }
    (dist.len() - 1) as u8
}

/// Plays `plays_per_iteration` joint plays, credits rewards, then moves each
/// visited state row toward the greedy row.
pub fn rl_iteration(
    inst: &GameInstance,
    policy: &mut Policy,
    q: &mut QTable,
    cfg: &RlConfig,
    rng: &mut SeededRng,
) -> Result<IterationReport> {
    cfg.validate()?;
    let n = inst.agent_count();
    if policy.agent_count() != n {
        return Err(GmmError::precondition("policy does not match the game"));
    }
    let arities = inst.arities();
    let marginals: Vec<Vec<f64>> = (0..n).map(|i| marginal_action_prob(policy, i)).collect();
    let utilities: Vec<Vec<f64>> = (0..n).map(|i| inst.utility_table(i)).collect();
    let scopes: Vec<Vec<usize>> = (0..n).map(|i| inst.graph().neighborhood(i)).collect();
    let mut visited: Vec<Vec<bool>> = policy.agents.iter().map(|a| vec![false; a.rows.len()]).collect();
    let mut report = IterationReport {
        credits: Vec::with_capacity(cfg.plays_per_iteration * n),
        ..Default::default()
    };
    let mut total = 0.0;
    let mut actions = vec![0u8; n];
    for _ in 0..cfg.plays_per_iteration {
        for (a, m) in actions.iter_mut().zip(&marginals) {
            *a = draw(m, rng);
        }
        for i in 0..n {
            let state = config_index(&policy.agents[i].partners, &arities, &actions);
            let reward = utilities[i][config_index(&scopes[i], &arities, &actions)];
            q.cells[i][state][usize::from(actions[i])].credit(reward);
            visited[i][state] = true;
            total += reward;
            report.credits.push(Credit {
                agent: i,
                state,
                action: actions[i],
                reward,
            });
        }
    }
    report.mean_payoff = total / (cfg.plays_per_iteration * n) as f64;

    for (i, agent) in policy.agents.iter_mut().enumerate() {
        let mut changed = 0;
        for (state, row) in agent.rows.iter_mut().enumerate() {
            if !visited[i][state] {
                continue;
            }
            let cells = &q.cells[i][state];
            // argmax is undefined until every action has an average reward
            if cells.iter().any(|c| c.count == 0) {
                continue;
            }
            let best = greedy_action(cells, row);
            for (a, p) in row.iter_mut().enumerate() {
                let target = if a == best { 1.0 } else { 0.0 };
                *p = *p * (1.0 - cfg.gamma) + target * cfg.gamma;
            }
            changed += 1;
        }
        report.rows_updated.push(changed);
    }
    Ok(report)
}

/// Highest mean reward; ties go to the action the row currently favors, then
/// to the lower index.
fn greedy_action(cells: &[QCell], row: &[f64]) -> usize {
    let mut best = 0;
    for a in 1..cells.len() {
        let (qa, qb) = (cells[a].mean, cells[best].mean);
        if qa > qb || (qa == qb && row[a] > row[best]) {
            best = a;
        }
    }
    best
}

/// Result of a full simulator run.
#[derive(Debug, Clone)]
pub struct RlOutcome {
    pub policy: Policy,
    pub q: QTable,
    /// Mean realized payoff of each iteration.
    pub mean_payoffs: Vec<f64>,
}

/// Starts from the heuristic policy and runs `cfg.iterations` rounds.
pub fn run_rl(inst: &GameInstance, spec: &HeuristicSpec, cfg: &RlConfig) -> Result<RlOutcome> {
    cfg.validate()?;
    let mut policy = Policy::from_heuristic(inst, spec)?;
    let mut q = QTable::empty(&policy);
    let mut rng = rng_from_seed(cfg.seed);
    let mut mean_payoffs = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        let report = rl_iteration(inst, &mut policy, &mut q, cfg, &mut rng)?;
        mean_payoffs.push(report.mean_payoff);
    }
    Ok(RlOutcome {
        policy,
        q,
        mean_payoffs,
    })
}

/// Joint plays with every agent sampling independently from its marginal.
pub fn sample_sim_data(
    inst: &GameInstance,
    policy: &Policy,
    count: usize,
    seed: u64,
) -> Result<PlayDataset> {
    if count == 0 {
        return Err(GmmError::precondition("sample count must be positive"));
    }
    if policy.agent_count() != inst.agent_count() {
        return Err(GmmError::precondition("policy does not match the game"));
    }
    policy.validate()?;
    let marginals: Vec<Vec<f64>> = (0..policy.agent_count())
        .map(|i| marginal_action_prob(policy, i))
        .collect();
    let mut rng = rng_from_seed(seed);
    let profiles = (0..count)
        .map(|_| StrategyProfile::new(marginals.iter().map(|m| draw(m, &mut rng)).collect()))
        .collect();
    PlayDataset::new(inst.agent_count(), profiles)
}
