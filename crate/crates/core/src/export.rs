//! JSON form of fitted and combined models.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::combine::PooledModel;
use crate::dataset::PlayDataset;
use crate::error::{GmmError, Result};
use crate::graph::InteractionGraph;
use crate::model::{Gmm, JointDistribution, PotentialForm};

/// Serialized model. Regret models carry their regret tables and `lambda`;
/// `potentials` (linear space, one table per agent) is optional audit output
/// and ignored on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelFile {
    Regret {
        graph: InteractionGraph,
        arities: Vec<usize>,
        lambda: Vec<f64>,
        regrets: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        potentials: Option<Vec<Vec<f64>>>,
    },
    Table {
        graph: InteractionGraph,
        arities: Vec<usize>,
        log_potentials: Vec<Vec<f64>>,
    },
    Pool {
        weight: f64,
        first: Box<ModelFile>,
        second: Box<ModelFile>,
    },
}

/// A loaded model: a single GMM or a logarithmic opinion pool.
#[derive(Debug, Clone)]
pub enum LoadedModel {
    Gmm(Gmm),
    Pool(PooledModel),
}

impl LoadedModel {
    pub fn as_distribution(&self) -> &dyn JointDistribution {
        match self {
            LoadedModel::Gmm(g) => g,
            LoadedModel::Pool(p) => p,
        }
    }

    /// The single GMM, or the pool's equivalent table-form GMM.
    pub fn to_gmm(&self) -> Result<Gmm> {
        match self {
            LoadedModel::Gmm(g) => Ok(g.clone()),
            LoadedModel::Pool(p) => p.to_gmm(),
        }
    }

    pub fn log_score(&self, data: &PlayDataset) -> Result<f64> {
        self.as_distribution().log_score(data)
    }
}

impl ModelFile {
    pub fn from_gmm(model: &Gmm, with_potentials: bool) -> Self {
        match model.form() {
            PotentialForm::Regret(r) => ModelFile::Regret {
                graph: model.graph().clone(),
                arities: model.arities().to_vec(),
                lambda: r.lambda().to_vec(),
                regrets: r.regrets().to_vec(),
                potentials: with_potentials.then(|| {
                    (0..model.agent_count()).map(|i| model.potential(i).table).collect()
                }),
            },
            PotentialForm::Table => ModelFile::Table {
                graph: model.graph().clone(),
                arities: model.arities().to_vec(),
                log_potentials: model.log_potentials().to_vec(),
            },
        }
    }

    pub fn from_pool(pool: &PooledModel, with_potentials: bool) -> Self {
        ModelFile::Pool {
            weight: pool.weight(),
            first: Box::new(Self::from_gmm(pool.first(), with_potentials)),
            second: Box::new(Self::from_gmm(pool.second(), with_potentials)),
        }
    }

    pub fn build(&self) -> Result<LoadedModel> {
        match self {
            ModelFile::Regret { graph, arities, lambda, regrets, .. } => Ok(LoadedModel::Gmm(Gmm::regret(
                graph.clone(),
                arities.clone(),
                regrets.clone(),
                lambda.clone(),
            )?)),
            ModelFile::Table { graph, arities, log_potentials } => Ok(LoadedModel::Gmm(
                Gmm::from_log_potentials(graph.clone(), arities.clone(), log_potentials.clone())?,
            )),
            ModelFile::Pool { weight, first, second } => {
                let (LoadedModel::Gmm(a), LoadedModel::Gmm(b)) = (first.build()?, second.build()?) else {
                    return Err(GmmError::InvalidModel("pool components must be single models".into()));
                };
                Ok(LoadedModel::Pool(PooledModel::new(a, b, *weight)?))
            }
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(path, text).map_err(|e| GmmError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| GmmError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_regret_gmm, GameFixture, Temperatures};

    #[test]
    fn regret_and_pool_roundtrip() {
        let inst = GameFixture::default_fixture().top_k(4).unwrap().build().unwrap();
        let g = build_regret_gmm(&inst, &Temperatures::uniform(4, 1.5).unwrap()).unwrap();
        let file = ModelFile::from_gmm(&g, true);
        let text = serde_json::to_string(&file).unwrap();
        let back: ModelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        let LoadedModel::Gmm(h) = back.build().unwrap() else { panic!() };
        assert_eq!(h.lambda(), g.lambda());

        let h2 = g.with_lambda(vec![0.3; 4]).unwrap();
        let pool = PooledModel::new(g.clone(), h2, 0.25).unwrap();
        let LoadedModel::Pool(p) = ModelFile::from_pool(&pool, false).build().unwrap() else { panic!() };
        assert_eq!(p.weight(), 0.25);
        for idx in 0..16 {
            let s = g.profile_at(idx);
            assert_eq!(p.log_probability(&s).unwrap(), pool.log_probability(&s).unwrap());
        }
    }
}
