//! Combining a regret model with heuristic play data three ways, scored on
//! simulator play.
//!
//! cargo run --release --example knowledge_combination

use multiagent_gmm::combine::{direct_update, mixing_data, opinion_pool, score_ratio, FitConfig};
use multiagent_gmm::game::{build_regret_gmm, Temperatures};
use multiagent_gmm::heuristic::{build_heuristic_gmm, sample_heuristic};
use multiagent_gmm::rl::{run_rl, sample_sim_data, RlConfig};
use multiagent_gmm::{GameFixture, HeuristicSpec, JointDistribution, Result};

fn main() -> Result<()> {
    let game = GameFixture::default_fixture().build()?;
    let spec = HeuristicSpec::Pchange;
    let reg = build_regret_gmm(&game, &Temperatures::sample(game.agent_count(), (0.5, 2.0), 1)?)?;
    let hg = build_heuristic_gmm(&game, &spec)?;
    let train = sample_heuristic(&game, &spec, 500, 2)?;
    let sim = run_rl(&game, &spec, &RlConfig { seed: 3, ..RlConfig::default() })?;
    let test = sample_sim_data(&game, &sim.policy, 500, 4)?;

    let fit = FitConfig::default();
    let direct = direct_update(&reg, &train, &fit)?;
    let pool = opinion_pool(&reg, &reg, &train, &fit, 0.05)?;
    let mix = mixing_data(&reg, &reg, &train, &fit, 5)?;
    println!("pool weight on reG: {:.3}", pool.weight());

    let combined: [(&str, &dyn JointDistribution); 3] = [("directG", &direct), ("OPG", &pool), ("mixG", &mix)];
    for (name, model) in combined {
        println!(
            "{name:>7}: log score {:>9.2}  R vs reG {:.4}  R vs hG {:.4}",
            model.log_score(&test)?,
            score_ratio(&reg, model, &test)?,
            score_ratio(&hg, model, &test)?
        );
    }
    Ok(())
}
