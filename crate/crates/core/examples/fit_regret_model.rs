//! Maximum-likelihood fit of regret-model temperatures to sampled play.
//!
//! cargo run --release --example fit_regret_model

use multiagent_gmm::combine::{fit_regret_gmm_ml, unit_lambda, FitConfig};
use multiagent_gmm::game::{build_regret_gmm, Temperatures};
use multiagent_gmm::{GameFixture, Result};

fn main() -> Result<()> {
    let game = GameFixture::default_fixture().top_k(4)?.build()?;
    let truth = build_regret_gmm(&game, &Temperatures::from_temperatures(&[20.0, 40.0, 60.0, 80.0])?)?;
    let data = truth.sample_profiles(10_000, 5)?;

    let fit = fit_regret_gmm_ml(&unit_lambda(&truth)?, &data, &FitConfig::default())?;
    println!(
        "{} iterations, converged {}, mean log-likelihood {:.5} -> {:.5}",
        fit.iterations,
        fit.converged,
        fit.initial_log_likelihood(),
        fit.final_log_likelihood()
    );
    let fitted = fit.model.lambda().expect("regret form");
    for (i, (got, want)) in fitted.iter().zip(truth.lambda().unwrap()).enumerate() {
        println!("agent {i}: lambda {got:.5} (true {want:.5})");
    }
    Ok(())
}
