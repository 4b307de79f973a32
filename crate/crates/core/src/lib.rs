//! Graphical multiagent models (GMMs).
//!
//! A GMM is an undirected graphical model over the joint actions of a set of
//! agents, factored into one potential per agent neighborhood. This crate
//! provides exact inference for such models, the partnership game used to
//! derive regret potentials, a heuristic behavior model, a reinforcement
//! learning play simulator, three ways of combining a model with play data,
//! and an experiment harness that compares them by log score.
//!
//! The runnable programs under `examples/` walk through each capability.

pub mod combine;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod export;
pub mod game;
pub mod graph;
pub mod heuristic;
pub mod model;
pub mod rl;
pub mod seeds;

pub use dataset::PlayDataset;
pub use error::{GmmError, Result};
pub use game::{GameFixture, GameInstance, Temperatures};
pub use graph::{InteractionGraph, StrategyProfile};
pub use heuristic::HeuristicSpec;
pub use model::{Gmm, JointDistribution, LocalPotential};
