//! Combining a GMM with play data: direct update, logarithmic opinion pool,
//! and mixing data, plus the shared regret-form fitting engine and score ratios.

mod fit;
mod mixing;
mod pool;
mod score;

pub use fit::{
    direct_update, fit_regret_gmm_ml, regret_loglik_gradient, unit_lambda, FitConfig, FitOutcome,
};
pub use mixing::{build_mixed_dataset, mixing_data};
pub use pool::{
    learn_pool_weight, opinion_pool, pool_log_likelihood, pool_weight_gradient, PoolWeightFit,
    PooledModel,
};
pub use score::{ratio_from_scores, score_ratio};
