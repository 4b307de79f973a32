//! The Internet-industry partnership game.
//!
//! Companies choose to retain (label 1) or upgrade (label 2) their technology.
//! A pair of partners `(i, j)` contributes
//! `w_ij = (z_i + z_j) * (1 + y_ij / d)^{[s_i = s_j]}`, with `d = 3` for
//! same-sector pairs and `d = 5` otherwise, and agent `i` earns
//! `u_i = (1 + y_i * phi(ch_i, s_i)) * sum_{j in N_-i} w_ij`.
//! The random coefficients `y_ij` and `y_i` are drawn once when the instance is
//! built and stay frozen, so payoffs and regrets are deterministic.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GmmError, Result};
use crate::graph::{decode_config, InteractionGraph, StrategyProfile};
use crate::model::Gmm;
use crate::seeds::rng_from_seed;

/// Every company in this domain has two actions.
pub const ACTIONS: usize = 2;

/// Sizes must stay below this bound so the heuristic change probability is positive.
pub const MAX_SIZE: f64 = 1000.0;

pub const DEFAULT_TEMPERATURE_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Commerce,
    Infrastructure,
    Content,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompanyParams {
    pub id: usize,
    /// Size class `z`, in `(0, 1000)`.
    pub size: f64,
    pub sector: Sector,
    /// Change coefficient `ch`, in `[0, 1]`.
    pub change_coeff: f64,
}

impl CompanyParams {
    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.size > 0.0 && self.size < MAX_SIZE) {
            out.push(format!(
                "companies[{}].size = {} is outside (0, {MAX_SIZE})",
                self.id, self.size
            ));
        }
        if !(0.0..=1.0).contains(&self.change_coeff) {
            out.push(format!(
                "companies[{}].change_coeff = {} is outside [0, 1]",
                self.id, self.change_coeff
            ));
        }
        out
    }
}

/// Flexibility term `phi(ch, s)` for action index `action` (label `action + 1`).
pub fn flexibility(ch: f64, action: u8) -> f64 {
    let half_s = f64::from(action + 1) / 2.0;
    let first = half_s - ch;
    if first < 0.5 {
        first
    } else {
        0.5 - half_s + ch
    }
}

/// A game with frozen random coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    graph: InteractionGraph,
    companies: Vec<CompanyParams>,
    pair_coeffs: BTreeMap<(usize, usize), f64>,
    flex_coeffs: Vec<f64>,
    seed: u64,
}

fn validate_companies(graph: &InteractionGraph, companies: &[CompanyParams]) -> Result<()> {
    let mut problems = Vec::new();
    if companies.len() != graph.agent_count() {
        problems.push(format!(
            "companies lists {} entries for {} agents",
            companies.len(),
            graph.agent_count()
        ));
    }
    for (k, c) in companies.iter().enumerate() {
        if c.id != k {
            problems.push(format!("companies[{k}].id = {} (expected {k})", c.id));
        }
        problems.extend(c.problems());
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(GmmError::Validation(problems))
    }
}

/// Draws `y_ij` for every edge (ascending) and then `y_i` for every agent,
/// uniformly from `[0, 1)`, from a generator seeded with `seed`.
pub fn build_game_instance(
    graph: InteractionGraph,
    companies: Vec<CompanyParams>,
    seed: u64,
) -> Result<GameInstance> {
    validate_companies(&graph, &companies)?;
    let mut rng = rng_from_seed(seed);
    let pair_coeffs = graph.edges().map(|e| (e, rng.random::<f64>())).collect();
    let flex_coeffs = (0..graph.agent_count()).map(|_| rng.random::<f64>()).collect();
    Ok(GameInstance {
        graph,
        companies,
        pair_coeffs,
        flex_coeffs,
        seed,
    })
}

impl GameInstance {
    /// Instance with explicitly given coefficients.
    pub fn with_coefficients(
        graph: InteractionGraph,
        companies: Vec<CompanyParams>,
        pair_coeffs: BTreeMap<(usize, usize), f64>,
        flex_coeffs: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        validate_companies(&graph, &companies)?;
        let mut problems = Vec::new();
        let mut normalized = BTreeMap::new();
        for (&(i, j), &y) in &pair_coeffs {
            if !graph.has_edge(i, j) {
                problems.push(format!("pair_coeffs has ({i}, {j}) which is not an edge"));
            }
            if !(0.0..=1.0).contains(&y) {
                problems.push(format!("pair_coeffs[({i}, {j})] = {y} is outside [0, 1]"));
            }
            normalized.insert((i.min(j), i.max(j)), y);
        }
        for e in graph.edges() {
            if !normalized.contains_key(&e) {
                problems.push(format!("pair_coeffs is missing edge {e:?}"));
            }
        }
        if flex_coeffs.len() != graph.agent_count() {
            problems.push(format!(
                "flex_coeffs has {} entries for {} agents",
                flex_coeffs.len(),
                graph.agent_count()
            ));
        }
        for (i, y) in flex_coeffs.iter().enumerate() {
            if !(0.0..=1.0).contains(y) {
                problems.push(format!("flex_coeffs[{i}] = {y} is outside [0, 1]"));
            }
        }
        if !problems.is_empty() {
            return Err(GmmError::Validation(problems));
        }
        Ok(GameInstance {
            graph,
            companies,
            pair_coeffs: normalized,
            flex_coeffs,
            seed,
        })
    }

    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn agent_count(&self) -> usize {
        self.graph.agent_count()
    }

    pub fn companies(&self) -> &[CompanyParams] {
        &self.companies
    }

    pub fn company(&self, i: usize) -> &CompanyParams {
        &self.companies[i]
    }

    pub fn pair_coeffs(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.pair_coeffs
    }

    pub fn pair_coeff(&self, i: usize, j: usize) -> Option<f64> {
        self.pair_coeffs.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn flex_coeffs(&self) -> &[f64] {
        &self.flex_coeffs
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn arities(&self) -> Vec<usize> {
        vec![ACTIONS; self.agent_count()]
    }

    /// Partnership strength `w_ij(s_i, s_j)`.
    pub fn pair_weight(&self, i: usize, j: usize, s_i: u8, s_j: u8) -> Result<f64> {
        let y = self.pair_coeff(i, j).ok_or_else(|| {
            GmmError::precondition(format!("({i}, {j}) is not an edge of the game"))
        })?;
        let (ci, cj) = (&self.companies[i], &self.companies[j]);
        let base = ci.size + cj.size;
        if s_i != s_j {
            return Ok(base);
        }
        let divisor = if ci.sector == cj.sector { 3.0 } else { 5.0 };
        Ok(base * (1.0 + y / divisor))
    }

    /// Payoff of agent `i` for the actions of `N_i` (ascending agent order).
    pub fn payoff(&self, i: usize, config: &[u8]) -> Result<f64> {
        let scope = self.graph.neighborhood(i);
        if config.len() != scope.len() {
            return Err(GmmError::precondition(format!(
                "configuration has {} actions, neighborhood of agent {i} has {}",
                config.len(),
                scope.len()
            )));
        }
        if let Some(a) = config.iter().find(|&&a| usize::from(a) >= ACTIONS) {
            return Err(GmmError::precondition(format!("action index {a} out of range")));
        }
        let own = config[scope.iter().position(|&j| j == i).expect("i in N_i")];
        let mut sum = 0.0;
        for (&j, &s_j) in scope.iter().zip(config) {
            if j != i {
                sum += self.pair_weight(i, j, own, s_j)?;
            }
        }
        let c = &self.companies[i];
        Ok((1.0 + self.flex_coeffs[i] * flexibility(c.change_coeff, own)) * sum)
    }

    /// Payoff of agent `i` within a full profile.
    pub fn payoff_in_profile(&self, i: usize, s: &StrategyProfile) -> Result<f64> {
        let config: Vec<u8> = self.graph.neighborhood(i).iter().map(|&j| s.action(j)).collect();
        self.payoff(i, &config)
    }

    /// Regret `max_{s'_i} u_i(s'_i, s_{N_-i}) - u_i(s_{N_i})`.
    pub fn regret(&self, i: usize, config: &[u8]) -> Result<f64> {
        let scope = self.graph.neighborhood(i);
        let pos = scope.iter().position(|&j| j == i).expect("i in N_i");
        let current = self.payoff(i, config)?;
        let mut alt = config.to_vec();
        let mut best = current;
        for a in 0..ACTIONS as u8 {
            alt[pos] = a;
            best = best.max(self.payoff(i, &alt)?);
        }
        Ok(best - current)
    }

    /// Payoffs of agent `i` for every neighborhood configuration.
    pub fn utility_table(&self, i: usize) -> Vec<f64> {
        self.neighborhood_table(i, |cfg| self.payoff(i, cfg))
    }

    /// Regrets of agent `i` for every neighborhood configuration.
    pub fn regret_table(&self, i: usize) -> Vec<f64> {
        self.neighborhood_table(i, |cfg| self.regret(i, cfg))
    }

    fn neighborhood_table(&self, i: usize, f: impl Fn(&[u8]) -> Result<f64>) -> Vec<f64> {
        let scope_len = self.graph.neighborhood(i).len();
        let arities = vec![ACTIONS; scope_len];
        (0..ACTIONS.pow(scope_len as u32))
            .map(|c| f(&decode_config(c, &arities)).expect("decoded configuration is valid"))
            .collect()
    }

    /// Fixture record carrying this instance's coefficients explicitly.
    pub fn to_fixture(&self) -> GameFixture {
        GameFixture {
            n: self.agent_count(),
            edges: self.graph.edges().map(|(i, j)| [i, j]).collect(),
            companies: self.companies.clone(),
            coeff_seed: self.seed,
            pair_coeffs: Some(self.pair_coeffs.iter().map(|(&(i, j), &y)| (i, j, y)).collect()),
            flex_coeffs: Some(self.flex_coeffs.clone()),
        }
    }
}

/// Per-agent temperatures, stored as `lambda_i = 1 / T_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Temperatures {
    lambda: Vec<f64>,
}

impl Temperatures {
    pub fn from_lambda(lambda: Vec<f64>) -> Result<Self> {
        let bad: Vec<String> = lambda
            .iter()
            .enumerate()
            .filter(|(_, l)| !(l.is_finite() && **l > 0.0))
            .map(|(i, l)| format!("lambda[{i}] = {l} must be positive"))
            .collect();
        if bad.is_empty() {
            Ok(Temperatures { lambda })
        } else {
            Err(GmmError::Validation(bad))
        }
    }

    pub fn from_temperatures(temps: &[f64]) -> Result<Self> {
        let bad: Vec<String> = temps
            .iter()
            .enumerate()
            .filter(|(_, t)| !(t.is_finite() && **t > 0.0))
            .map(|(i, t)| format!("T[{i}] = {t} must be positive"))
            .collect();
        if !bad.is_empty() {
            return Err(GmmError::Validation(bad));
        }
        Self::from_lambda(temps.iter().map(|t| 1.0 / t).collect())
    }

    pub fn uniform(n: usize, temperature: f64) -> Result<Self> {
        Self::from_temperatures(&vec![temperature; n])
    }

    /// Draws each `T_i` uniformly from `[low, high]`.
    pub fn sample(n: usize, range: (f64, f64), seed: u64) -> Result<Self> {
        let (low, high) = range;
        if !(low > 0.0 && high >= low && high.is_finite()) {
            return Err(GmmError::Validation(vec![format!(
                "temperature range [{low}, {high}] must be positive and ordered"
            )]));
        }
        let mut rng = rng_from_seed(seed);
        let temps: Vec<f64> = (0..n).map(|_| rng.random_range(low..=high)).collect();
        Self::from_temperatures(&temps)
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.lambda.iter().map(|l| 1.0 / l).collect()
    }
}

/// Regret GMM with `pi_i = exp(-regret_i / T_i)`. The regret tables are kept on
/// the model, so `lambda` can be replaced without recomputing them.
pub fn build_regret_gmm(inst: &GameInstance, temps: &Temperatures) -> Result<Gmm> {
    if temps.lambda.len() != inst.agent_count() {
        return Err(GmmError::Validation(vec![format!(
            "{} temperatures for {} agents",
            temps.lambda.len(),
            inst.agent_count()
        )]));
    }
    let regrets = (0..inst.agent_count()).map(|i| inst.regret_table(i)).collect();
    Gmm::regret(
        inst.graph().clone(),
        inst.arities(),
        regrets,
        temps.lambda.clone(),
    )
}

/// Game fixture file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFixture {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub companies: Vec<CompanyParams>,
    pub coeff_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_coeffs: Option<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flex_coeffs: Option<Vec<f64>>,
}

const DEFAULT_FIXTURE: &str = include_str!("../data/default_fixture.json");

impl GameFixture {
    /// The shipped ten-company fixture.
    pub fn default_fixture() -> Self {
        serde_json::from_str(DEFAULT_FIXTURE).expect("bundled fixture parses")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| GmmError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| GmmError::io(path, e))
    }

    pub fn graph(&self) -> Result<InteractionGraph> {
        InteractionGraph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))
    }

    /// `true` when both coefficient sets are given explicitly.
    pub fn has_explicit_coefficients(&self) -> bool {
        self.pair_coeffs.is_some() && self.flex_coeffs.is_some()
    }

    /// Builds the instance from `coeff_seed`, or from explicit coefficients.
    pub fn build(&self) -> Result<GameInstance> {
        self.build_with_seed(self.coeff_seed)
    }

    /// Builds the instance drawing coefficients from `seed`; explicit
    /// coefficients in the fixture take precedence over the draw.
    pub fn build_with_seed(&self, seed: u64) -> Result<GameInstance> {
        let graph = self.graph()?;
        let drawn = build_game_instance(graph.clone(), self.companies.clone(), seed)?;
        if self.pair_coeffs.is_none() && self.flex_coeffs.is_none() {
            return Ok(drawn);
        }
        let pair = match &self.pair_coeffs {
            Some(list) => list.iter().map(|&(i, j, y)| ((i, j), y)).collect(),
            None => drawn.pair_coeffs.clone(),
        };
        let flex = self.flex_coeffs.clone().unwrap_or_else(|| drawn.flex_coeffs.clone());
        GameInstance::with_coefficients(graph, self.companies.clone(), pair, flex, seed)
    }

    /// The `k` largest companies (ties to the lower id) and their induced
    /// subgraph, re-indexed in descending size order.
    pub fn top_k(&self, k: usize) -> Result<GameFixture> {
        if k == 0 || k > self.n {
            return Err(GmmError::precondition(format!(
                "cannot select {k} of {} companies",
                self.n
            )));
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| {
            self.companies[b]
                .size
                .total_cmp(&self.companies[a].size)
                .then(a.cmp(&b))
        });
        order.truncate(k);
        let sub = self.graph()?.induced(&order)?;
        let companies = order
            .iter()
            .enumerate()
            .map(|(new, &old)| CompanyParams {
                id: new,
                ..self.companies[old].clone()
            })
            .collect();
        let pos = |old: usize| order.iter().position(|&o| o == old);
        let pair_coeffs = self.pair_coeffs.as_ref().map(|list| {
            list.iter()
                .filter_map(|&(i, j, y)| Some((pos(i)?, pos(j)?, y)))
                .collect()
        });
        let flex_coeffs = self
            .flex_coeffs
            .as_ref()
            .map(|f| order.iter().map(|&o| f[o]).collect());
        Ok(GameFixture {
            n: k,
            edges: sub.edges().map(|(i, j)| [i, j]).collect(),
            companies,
            coeff_seed: self.coeff_seed,
            pair_coeffs,
            flex_coeffs,
        })
    }
}
