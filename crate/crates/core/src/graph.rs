//! Interaction graphs and strategy profiles.
//!
//! Agents are indexed `0..n`. Actions are stored as zero-based indices into an
//! agent's action domain; the partnership domain uses index 0 for *retain*
//! (label `1`) and index 1 for *upgrade* (label `2`).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GmmError, Result};

/// Zero-based action index for "retain current technology" (label 1).
pub const RETAIN: u8 = 0;
/// Zero-based action index for "upgrade technology" (label 2).
pub const UPGRADE: u8 = 1;

/// Undirected graph of local interactions between agents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct InteractionGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    partners: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for InteractionGraph {
    type Error = GmmError;

    fn try_from(r: GraphRepr) -> Result<Self> {
        InteractionGraph::new(r.n, r.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<InteractionGraph> for GraphRepr {
    fn from(g: InteractionGraph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

impl InteractionGraph {
    /// Builds a graph over `n` agents. Edges are unordered; `(i, j)` and
    /// `(j, i)` name the same edge and may not both appear.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(GmmError::InvalidGraph("agent count must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(GmmError::InvalidGraph(format!(
                    "edge ({i}, {j}) references an agent outside [0, {n})"
                )));
            }
            if i == j {
                return Err(GmmError::InvalidGraph(format!("self-loop on agent {i}")));
            }
            let key = (i.min(j), i.max(j));
            if !set.insert(key) {
                return Err(GmmError::InvalidGraph(format!("duplicate edge ({i}, {j})")));
            }
        }
        let mut partners = vec![Vec::new(); n];
        for &(i, j) in &set {
            partners[i].push(j);
            partners[j].push(i);
        }
        for p in &mut partners {
            p.sort_unstable();
        }
        Ok(InteractionGraph {
            n,
            edges: set,
            partners,
        })
    }

    /// Graph with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    /// Edges as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// `N_{-i}`: the partners of `i`, ascending.
    pub fn partners(&self, i: usize) -> &[usize] {
        &self.partners[i]
    }

    /// `N_i`: `i` together with its partners, ascending.
    pub fn neighborhood(&self, i: usize) -> Vec<usize> {
        let mut nb = self.partners[i].clone();
        let pos = nb.partition_point(|&j| j < i);
        nb.insert(pos, i);
        nb
    }

    pub fn degree(&self, i: usize) -> usize {
        self.partners[i].len()
    }

    /// Subgraph induced by `agents`, re-indexed in the order given.
    pub fn induced(&self, agents: &[usize]) -> Result<Self> {
        let mut edges = Vec::new();
        for (a, &i) in agents.iter().enumerate() {
            for (b, &j) in agents.iter().enumerate().skip(a + 1) {
                if self.has_edge(i, j) {
                    edges.push((a, b));
                }
            }
        }
        Self::new(agents.len(), edges)
    }
}

/// One joint action: an action index per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile(Vec<u8>);

impl StrategyProfile {
    pub fn new(actions: Vec<u8>) -> Self {
        StrategyProfile(actions)
    }

    /// Builds a profile from one-based labels (`1` = retain, `2` = upgrade).
    pub fn from_labels(labels: &[u8]) -> Result<Self> {
        labels
            .iter()
            .map(|&l| {
                if l == 0 {
                    Err(GmmError::InvalidProfile("action labels start at 1".into()))
                } else {
                    Ok(l - 1)
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(StrategyProfile)
    }

    pub fn uniform(n: usize, action: u8) -> Self {
        StrategyProfile(vec![action; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[u8] {
        &self.0
    }

    pub fn action(&self, agent: usize) -> u8 {
        self.0[agent]
    }

    pub fn set(&mut self, agent: usize, action: u8) {
        self.0[agent] = action;
    }

    /// One-based labels as written in dataset files.
    pub fn labels(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().map(|a| a + 1)
    }

    /// Checks length and that each action is within the agent's domain.
    pub fn validate(&self, arities: &[usize]) -> Result<()> {
        if self.0.len() != arities.len() {
            return Err(GmmError::InvalidProfile(format!(
                "profile has {} actions, model has {} agents",
                self.0.len(),
                arities.len()
            )));
        }
        for (i, (&a, &k)) in self.0.iter().zip(arities).enumerate() {
            if usize::from(a) >= k {
                return Err(GmmError::InvalidProfile(format!(
                    "agent {i} plays action {} outside its {k}-action domain",
                    a + 1
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().map(|l| l.to_string()).collect();
        write!(f, "({})", labels.join(","))
    }
}

/// Mixed-radix encoding of a configuration over an ordered set of agents.
/// The first agent in `scope` is the least significant digit.
pub(crate) fn config_index(scope: &[usize], arities: &[usize], actions: &[u8]) -> usize {
    let mut idx = 0;
    let mut stride = 1;
    for &j in scope {
        idx += usize::from(actions[j]) * stride;
        stride *= arities[j];
    }
    idx
}

/// Inverse of [`config_index`] for a scope-local table: returns the action of
/// each scope member for configuration `idx`.
pub(crate) fn decode_config(idx: usize, scope_arities: &[usize]) -> Vec<u8> {
    let mut rest = idx;
    scope_arities
        .iter()
        .map(|&k| {
            let a = rest % k;
            rest /= k;
            a as u8
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        assert!(InteractionGraph::new(3, [(0, 3)]).is_err());
        assert!(InteractionGraph::new(3, [(1, 1)]).is_err());
        assert!(InteractionGraph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(InteractionGraph::new(0, []).is_err());
    }

    #[test]
    fn neighborhood_contains_self() {
        let g = InteractionGraph::new(4, [(2, 0), (2, 3)]).unwrap();
        assert_eq!(g.neighborhood(2), vec![0, 2, 3]);
        assert_eq!(g.neighborhood(1), vec![1]);
        assert_eq!(g.partners(0), &[2]);
    }

    #[test]
    fn induced_subgraph_reindexes() {
        let g = InteractionGraph::new(5, [(0, 4), (4, 2), (1, 3)]).unwrap();
        let sub = g.induced(&[4, 2, 0]).unwrap();
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn config_roundtrip() {
        let arities = [2, 3, 2];
        let actions = [1u8, 2, 0];
        let scope = [0, 1, 2];
        let idx = config_index(&scope, &arities, &actions);
        assert_eq!(idx, 1 + 2 * 2);
        assert_eq!(decode_config(idx, &arities), actions.to_vec());
    }

    #[test]
    fn profile_validation() {
        let p = StrategyProfile::from_labels(&[1, 2, 2]).unwrap();
        assert!(p.validate(&[2, 2, 2]).is_ok());
        assert!(p.validate(&[2, 2]).is_err());
        assert!(p.validate(&[2, 1, 2]).is_err());
        assert_eq!(p.to_string(), "(1,2,2)");
    }
}
