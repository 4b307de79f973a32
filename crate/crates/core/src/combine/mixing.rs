//! Mixing data: sample plays from the model, pool them half-and-half with the
//! observed plays, and refit a regret-form model to the mixture.

use rand::seq::index::sample;
use rand::Rng;

use crate::dataset::PlayDataset;
use crate::error::{GmmError, Result};
use crate::model::Gmm;
use crate::seeds::rng_from_seed;

use super::fit::{fit_regret_gmm_ml, unit_lambda, FitConfig};

/// Builds the mixed dataset `mD` of size `|data|`: `ceil(|data|/2)` profiles
/// drawn without replacement from `data`, then `floor(|data|/2)` drawn without
/// replacement from a fresh sample `D1` of `|data|` profiles from `g1`.
pub fn build_mixed_dataset(g1: &Gmm, data: &PlayDataset, seed: u64) -> Result<PlayDataset> {
    let m = data.len();
    if m < 2 {
        return Err(GmmError::precondition(format!(
            "mixing data needs at least 2 profiles, got {m}"
        )));
    }
    if g1.agent_count() != data.agent_count() {
        return Err(GmmError::precondition("model and data disagree on agent count"));
    }
    let mut rng = rng_from_seed(seed);
    let sampled = g1.sample_profiles(m, rng.random())?;
    let from_data = m.div_ceil(2);
    let from_model = m / 2;
    let mut profiles = Vec::with_capacity(m);
    profiles.extend(sample(&mut rng, m, from_data).into_iter().map(|k| data.profiles()[k].clone()));
    profiles.extend(
        sample(&mut rng, m, from_model)
            .into_iter()
            .map(|k| sampled.profiles()[k].clone()),
    );
    PlayDataset::new(data.agent_count(), profiles)
}

/// `mixG`: the regret family refitted from unit `lambda` on the mixed dataset.
pub fn mixing_data(
    g1: &Gmm,
    family: &Gmm,
    data: &PlayDataset,
    fit_cfg: &FitConfig,
    seed: u64,
) -> Result<Gmm> {
    let mixed = build_mixed_dataset(g1, data, seed)?;
    Ok(fit_regret_gmm_ml(&unit_lambda(family)?, &mixed, fit_cfg)?.model)
}
