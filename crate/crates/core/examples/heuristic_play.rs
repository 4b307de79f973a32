//! The size and degree heuristic: upgrade rates, the heuristic model hG, and
//! a sample of heuristic play.
//!
//! cargo run --example heuristic_play

use multiagent_gmm::heuristic::{build_heuristic_gmm, p_change_all, sample_heuristic};
use multiagent_gmm::{GameFixture, HeuristicSpec, Result};

fn main() -> Result<()> {
    let game = GameFixture::default_fixture().build()?;
    for spec in [HeuristicSpec::Pchange, HeuristicSpec::Constant { p: 0.05 }] {
        println!("{spec:?}");
        let p = p_change_all(&game, &spec)?;
        let hg = build_heuristic_gmm(&game, &spec)?;
        let data = sample_heuristic(&game, &spec, 5_000, 3)?;
        for i in 0..game.agent_count() {
            println!(
                "  agent {i}: pChange {:.4}  hG marginal {:.4}  sampled {:.4}",
                p[i],
                hg.marginal(i)?[1],
                data.action_frequency(i, 1)
            );
        }
    }
    Ok(())
}
