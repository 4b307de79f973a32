//! Reinforcement learning play simulator started from the heuristic policy.
//!
//! cargo run --release --example rl_simulation

use multiagent_gmm::heuristic::p_change_all;
use multiagent_gmm::rl::{marginal_action_prob, run_rl, sample_sim_data, RlConfig};
use multiagent_gmm::{GameFixture, HeuristicSpec, Result};

fn main() -> Result<()> {
    let game = GameFixture::default_fixture().build()?;
    let spec = HeuristicSpec::Pchange;
    let out = run_rl(&game, &spec, &RlConfig { seed: 11, ..RlConfig::default() })?;

    for (k, m) in out.mean_payoffs.iter().enumerate().step_by(5) {
        println!("iteration {k:>2}: mean payoff {m:.2}");
    }
    let start = p_change_all(&game, &spec)?;
    let test = sample_sim_data(&game, &out.policy, 500, 12)?;
    for i in 0..game.agent_count() {
        println!(
            "agent {i}: Pr(upgrade) {:.3} -> {:.3} (sampled {:.3})",
            start[i],
            marginal_action_prob(&out.policy, i)[1],
            test.action_frequency(i, 1)
        );
    }
    Ok(())
}
