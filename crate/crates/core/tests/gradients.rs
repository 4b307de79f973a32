mod common;

use common::*;
use multiagent_gmm::combine::{pool_log_likelihood, pool_weight_gradient, regret_loglik_gradient};
use multiagent_gmm::game::{build_regret_gmm, Temperatures};
use multiagent_gmm::seeds::rng_from_seed;
use multiagent_gmm::{GameInstance, Gmm, PlayDataset};
use rand::Rng;

fn oracle_loglik(inst: &GameInstance, lambda: &[f64], data: &PlayDataset) -> f64 {
    let probs = regret_probabilities(inst, lambda);
    data.iter()
        .map(|s| {
            let idx: usize = s.actions().iter().enumerate().map(|(i, &a)| usize::from(a) << i).sum();
            probs[idx].ln()
        })
        .sum()
}

/// Ten (game, lambda, data) cases on 2-4 agent games.
fn cases() -> Vec<(GameInstance, Vec<f64>, PlayDataset)> {
    let mut rng = rng_from_seed(99);
    let games = [small_game(2), small_game(3), small_game(4), four_agent_game()];
    (0..10)
        .map(|k| {
            let inst = games[k % games.len()].clone();
            let n = inst.agent_count();
            let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(0.005..0.08)).collect();
            let sampler = build_regret_gmm(&inst, &Temperatures::uniform(n, 30.0).unwrap()).unwrap();
            let data = sampler.sample_profiles(50, rng.random()).unwrap();
            (inst, lambda, data)
        })
        .collect()
}

#[test]
fn lambda_gradient_matches_finite_differences() {
    for (inst, lambda, data) in cases() {
        let model = build_regret_gmm(&inst, &Temperatures::from_lambda(lambda.clone()).unwrap()).unwrap();
        let grad = regret_loglik_gradient(&model, &data).unwrap();
        for i in 0..lambda.len() {
            let h = 1e-6;
            let (mut up, mut down) = (lambda.clone(), lambda.clone());
            up[i] += h;
            down[i] -= h;
            let fd = (oracle_loglik(&inst, &up, &data) - oracle_loglik(&inst, &down, &data)) / (2.0 * h);
            assert!(
                (grad[i] - fd).abs() <= 1e-5 * fd.abs().max(1.0),
                "agent {i}: analytic {} vs fd {fd}",
                grad[i]
            );
        }
    }
}

#[test]
fn zero_regret_agent_has_zero_gradient() {
    let inst = small_game(3);
    let model = build_regret_gmm(&inst, &Temperatures::uniform(3, 20.0).unwrap()).unwrap();
    let mut regrets = model.regret_form().unwrap().regrets().to_vec();
    regrets[1].iter_mut().for_each(|r| *r = 0.0);
    let flat = Gmm::regret(model.graph().clone(), vec![2; 3], regrets, vec![0.3, 0.7, 0.2]).unwrap();
    let data = flat.sample_profiles(40, 3).unwrap();
    assert_eq!(regret_loglik_gradient(&flat, &data).unwrap()[1], 0.0);
}

fn oracle_pool_loglik(g1: &Gmm, g2: &Gmm, data: &PlayDataset, w: f64) -> f64 {
    let n = g1.agent_count();
    let pooled = normalized(n, |s| {
        let s = profile(s);
        g1.joint_probability(&s).unwrap().powf(w) * g2.joint_probability(&s).unwrap().powf(1.0 - w)
    });
    data.iter().map(|s| pooled[g1.profile_index(s).unwrap()].ln()).sum()
}

#[test]
fn pool_weight_gradient_matches_finite_differences() {
    for (k, (inst, lambda, data)) in cases().into_iter().enumerate() {
        let n = inst.agent_count();
        let g1 = build_regret_gmm(&inst, &Temperatures::from_lambda(lambda).unwrap()).unwrap();
        let g2 = g1.with_lambda(vec![0.01; n]).unwrap();
        let w = [0.3, 0.5, 0.8][k % 3];
        let analytic = pool_weight_gradient(&g1, &g2, &data, w).unwrap();
        let h = 1e-6;
        let fd = (oracle_pool_loglik(&g1, &g2, &data, w + h) - oracle_pool_loglik(&g1, &g2, &data, w - h)) / (2.0 * h);
        assert!((analytic - fd).abs() <= 1e-5 * fd.abs().max(1.0), "{analytic} vs {fd}");
        let ll = pool_log_likelihood(&g1, &g2, &data, w).unwrap();
        assert!(rel_close(ll, oracle_pool_loglik(&g1, &g2, &data, w), 1e-10));
    }
}

#[test]
fn identical_pool_components_have_flat_weight_gradient() {
    let inst = four_agent_game();
    let g = build_regret_gmm(&inst, &Temperatures::uniform(4, 25.0).unwrap()).unwrap();
    let data = g.sample_profiles(30, 8).unwrap();
    assert_eq!(pool_weight_gradient(&g, &g, &data, 0.3).unwrap(), 0.0);
}
