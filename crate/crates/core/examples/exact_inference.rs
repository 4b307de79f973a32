//! Exact inference on a small regret model: partition function, joint
//! probabilities, marginals and sampling.
//!
//! cargo run --example exact_inference

use multiagent_gmm::game::{build_regret_gmm, Temperatures};
use multiagent_gmm::{GameFixture, Result};

fn main() -> Result<()> {
    let game = GameFixture::default_fixture().top_k(4)?.build()?;
    let model = build_regret_gmm(&game, &Temperatures::uniform(4, 50.0)?)?;

    println!("log Z = {:.6}", model.log_partition()?);
    println!("profile     Pr");
    for idx in 0..model.profile_count()? {
        let s = model.profile_at(idx);
        let label: String = s.labels().map(|l| char::from(b'0' + l)).collect();
        println!("{label}  {:.5}", model.joint_probability(&s)?);
    }
    for i in 0..model.agent_count() {
        let m = model.marginal(i)?;
        println!("agent {i}: Pr(upgrade) = {:.4}", m[1]);
    }

    let data = model.sample_profiles(20_000, 1)?;
    println!("mean log-likelihood of 20000 samples: {:.4}", model.log_score(&data)? / data.len() as f64);
    Ok(())
}
