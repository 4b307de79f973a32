//! The partnership game: pair weights, payoffs and regrets on the default fixture.
//!
//! cargo run --example partnership_game

use multiagent_gmm::{GameFixture, Result, StrategyProfile};

fn main() -> Result<()> {
    let game = GameFixture::default_fixture().build()?;
    let n = game.agent_count();
    for c in game.companies() {
        println!(
            "company {}: size {:>5.1} {:?} ch {:.2} partners {:?}",
            c.id,
            c.size,
            c.sector,
            c.change_coeff,
            game.graph().partners(c.id)
        );
    }

    let (i, j) = game.graph().edges().next().expect("fixture has edges");
    println!("\npair ({i}, {j}), y = {:.3}", game.pair_coeff(i, j).unwrap());
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        println!("  w({a}, {b}) = {:.2}", game.pair_weight(i, j, a, b)?);
    }

    // everyone retains, then everyone upgrades
    for action in [0u8, 1] {
        let s = StrategyProfile::uniform(n, action);
        println!("\nall playing {}:", if action == 0 { "retain" } else { "upgrade" });
        for a in 0..n {
            let config: Vec<u8> = game.graph().neighborhood(a).iter().map(|&k| s.action(k)).collect();
            println!(
                "  agent {a}: payoff {:>8.2} regret {:>7.2}",
                game.payoff(a, &config)?,
                game.regret(a, &config)?
            );
        }
    }
    Ok(())
}
