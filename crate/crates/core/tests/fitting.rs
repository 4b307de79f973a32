mod common;

use common::*;
use multiagent_gmm::combine::*;
use multiagent_gmm::game::{build_regret_gmm, Temperatures};
use multiagent_gmm::heuristic::sample_heuristic;
use multiagent_gmm::{GameFixture, Gmm, HeuristicSpec, PlayDataset};

/// `lambda*` putting each agent's largest regret at a few nats.
fn target_model() -> Gmm {
    let inst = four_agent_game();
    let unit = build_regret_gmm(&inst, &Temperatures::uniform(4, 1.0).unwrap()).unwrap();
    let regrets = unit.regret_form().unwrap().regrets().to_vec();
    let lambda: Vec<f64> = regrets
        .iter()
        .enumerate()
        .map(|(i, r)| (1.0 + 0.5 * i as f64) / r.iter().cloned().fold(0.0, f64::max))
        .collect();
    unit.with_lambda(lambda).unwrap()
}

#[test]
fn fixture_subgame_has_non_constant_regrets() {
    let m = target_model();
    for r in m.regret_form().unwrap().regrets() {
        assert!(r.iter().any(|&x| x != r[0]));
    }
}

#[test]
fn recovers_lambda_from_samples() {
    let truth = target_model();
    let data = truth.sample_profiles(10_000, 4242).unwrap();
    let fit = fit_regret_gmm_ml(&unit_lambda(&truth).unwrap(), &data, &FitConfig::default()).unwrap();
    for (got, want) in fit.model.lambda().unwrap().iter().zip(truth.lambda().unwrap()) {
        assert!((got - want).abs() <= 0.15 * want, "{got} vs {want}");
    }
}

#[test]
fn trace_is_monotone_and_lambda_respects_floor() {
    let truth = target_model();
    let data = truth.sample_profiles(300, 5).unwrap();
    let cfg = FitConfig::default();
    let fit = fit_regret_gmm_ml(&truth.with_lambda(vec![2.0; 4]).unwrap(), &data, &cfg).unwrap();
    assert!(fit.trace.windows(2).all(|w| w[1] >= w[0]));
    assert!(fit.final_log_likelihood() >= fit.initial_log_likelihood());
    assert!(fit.model.lambda().unwrap().iter().all(|&l| l >= cfg.lambda_floor));
}

#[test]
fn start_at_truth_is_near_stationary() {
    let truth = target_model();
    let data = truth.sample_profiles(10_000, 6).unwrap();
    let fit = fit_regret_gmm_ml(&truth, &data, &FitConfig::default()).unwrap();
    assert!(fit.final_log_likelihood() - fit.initial_log_likelihood() < 1e-3);
}

#[test]
fn direct_update_stays_near_source_on_its_own_samples() {
    let g1 = target_model();
    let data = g1.sample_profiles(10_000, 7).unwrap();
    let direct = direct_update(&g1, &data, &FitConfig::default()).unwrap();
    for (got, want) in direct.lambda().unwrap().iter().zip(g1.lambda().unwrap()) {
        assert!((got - want).abs() <= 0.15 * want);
    }
}

#[test]
fn direct_update_improves_training_score() {
    let inst = GameFixture::default_fixture().build().unwrap();
    let g1 = build_regret_gmm(&inst, &Temperatures::sample(10, (0.5, 2.0), 1).unwrap()).unwrap();
    let data = sample_heuristic(&inst, &HeuristicSpec::Pchange, 200, 2).unwrap();
    let direct = direct_update(&g1, &data, &FitConfig::default()).unwrap();
    assert!(direct.log_score(&data).unwrap() >= g1.log_score(&data).unwrap());
}

#[test]
fn non_regret_models_are_rejected() {
    let g = target_model();
    let table = g.sibling_table();
    let data = g.sample_profiles(5, 1).unwrap();
    assert!(matches!(regret_loglik_gradient(&table, &data), Err(multiagent_gmm::GmmError::NotParametric)));
    assert!(fit_regret_gmm_ml(&table, &data, &FitConfig::default()).is_err());
}

trait SiblingTable {
    fn sibling_table(&self) -> Gmm;
}

impl SiblingTable for Gmm {
    fn sibling_table(&self) -> Gmm {
        Gmm::from_log_potentials(self.graph().clone(), self.arities().to_vec(), self.log_potentials().to_vec()).unwrap()
    }
}

#[test]
fn pool_weight_prefers_the_generating_model() {
    let g1 = target_model();
    let g2 = g1.with_lambda(vec![1e-4; 4]).unwrap();
    let heldout = g1.sample_profiles(10_000, 9).unwrap();
    let fit = learn_pool_weight(&g1, &g2, &heldout, 0.05, &FitConfig::default()).unwrap();
    assert!(fit.weight > 0.5);
    let same = learn_pool_weight(&g1, &g1, &heldout, 0.05, &FitConfig::default()).unwrap();
    assert_eq!(same.weight, 0.5);
}

#[test]
fn pool_endpoints_and_structure() {
    let g1 = target_model();
    let g2 = g1.with_lambda(vec![0.002, 0.01, 0.004, 0.02]).unwrap();
    let at = |w: f64| PooledModel::new(g1.clone(), g2.clone(), w).unwrap();
    for idx in 0..16 {
        let s = g1.profile_at(idx);
        assert!(rel_close(at(1.0).pool_probability(&s).unwrap(), g1.joint_probability(&s).unwrap(), 1e-12));
        assert!(rel_close(at(0.0).pool_probability(&s).unwrap(), g2.joint_probability(&s).unwrap(), 1e-12));
    }
    let pool = at(0.37);
    let as_gmm = pool.to_gmm().unwrap();
    let mut total = 0.0;
    for idx in 0..16 {
        let s = g1.profile_at(idx);
        let p = pool.pool_probability(&s).unwrap();
        total += p;
        assert!(rel_close(p, as_gmm.joint_probability(&s).unwrap(), 1e-10));
    }
    assert!((total - 1.0).abs() < 1e-12);
    let same = PooledModel::new(g1.clone(), g1.clone(), 0.8).unwrap();
    let s = g1.profile_at(5);
    assert!(rel_close(same.pool_probability(&s).unwrap(), g1.joint_probability(&s).unwrap(), 1e-12));
    assert!(PooledModel::new(g1.clone(), g2, 1.5).is_err());
}

#[test]
fn opinion_pool_fits_on_the_larger_first_half() {
    let g1 = target_model();
    let data = g1.sample_profiles(3, 10).unwrap();
    let cfg = FitConfig::default();
    let pool = opinion_pool(&g1, &g1, &data, &cfg, 0.05).unwrap();
    let expected = fit_regret_gmm_ml(&unit_lambda(&g1).unwrap(), &data.head(2), &cfg).unwrap().model;
    assert_eq!(pool.second().lambda(), expected.lambda());
    let one = g1.sample_profiles(1, 11).unwrap();
    assert!(opinion_pool(&g1, &g1, &one, &cfg, 0.05).is_err());
}

#[test]
fn mixed_dataset_composition_and_determinism() {
    let g1 = target_model();
    let data = PlayDataset::new(4, vec![profile(&[1, 1, 1, 1]); 7]).unwrap();
    let a = build_mixed_dataset(&g1, &data, 31).unwrap();
    let b = build_mixed_dataset(&g1, &data, 31).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 7);
    // the first ceil(7/2) rows come from the data
    assert!(a.profiles()[..4].iter().all(|s| s.actions() == [1, 1, 1, 1]));
    let m1 = mixing_data(&g1, &g1, &data, &FitConfig::default(), 31).unwrap();
    let m2 = mixing_data(&g1, &g1, &data, &FitConfig::default(), 31).unwrap();
    assert_eq!(m1.lambda(), m2.lambda());
}

#[test]
fn score_ratio_self_check() {
    let g1 = target_model();
    let test = g1.sample_profiles(50, 12).unwrap();
    assert_eq!(score_ratio(&g1, &g1, &test).unwrap(), 1.0);
}
