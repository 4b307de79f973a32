mod common;

use common::*;
use multiagent_gmm::heuristic::{build_heuristic_gmm, p_change, p_change_all, sample_heuristic};
use multiagent_gmm::rl::*;
use multiagent_gmm::seeds::rng_from_seed;
use multiagent_gmm::{GameFixture, HeuristicSpec};

#[test]
fn heuristic_model_reproduces_heuristic_play() {
    let inst = four_agent_game();
    let spec = HeuristicSpec::Pchange;
    let hg = build_heuristic_gmm(&inst, &spec).unwrap();
    let p = p_change_all(&inst, &spec).unwrap();
    // exact: hG is the independent product of the per-agent rules
    for s in all_profiles(4) {
        let want: f64 = s.iter().zip(&p).map(|(&a, &q)| if a == 1 { q } else { 1.0 - q }).product();
        assert!(rel_close(hg.joint_probability(&profile(&s)).unwrap(), want, 1e-12));
    }
    assert!(hg.log_partition().unwrap().abs() < 1e-12);
    // statistical: total variation between hM samples and hG
    let data = sample_heuristic(&inst, &spec, 200_000, 77).unwrap();
    let mut counts = vec![0.0; 16];
    for s in &data {
        counts[hg.profile_index(s).unwrap()] += 1.0 / 200_000.0;
    }
    let tv: f64 = 0.5 * counts.iter().zip(hg.probabilities().unwrap()).map(|(c, p)| (c - p).abs()).sum::<f64>();
    assert!(tv < 0.02, "tv = {tv}");
}

#[test]
fn pchange_decreases_with_size_and_partners() {
    let fx = GameFixture::default_fixture();
    let base = fx.build().unwrap();
    let mut bigger = fx.clone();
    bigger.companies[3].size += 10.0;
    let bigger = bigger.build().unwrap();
    let spec = HeuristicSpec::Pchange;
    assert!(p_change(&bigger, 3, &spec).unwrap() < p_change(&base, 3, &spec).unwrap());

    let mut denser = fx.clone();
    let missing = (0..fx.n)
        .flat_map(|i| (i + 1..fx.n).map(move |j| [i, j]))
        .find(|e| e[0] == 0 && !fx.edges.contains(e))
        .unwrap();
    denser.edges.push(missing);
    let denser = denser.build().unwrap();
    assert!(p_change(&denser, 0, &spec).unwrap() < p_change(&base, 0, &spec).unwrap());
    for i in 0..fx.n {
        let p = p_change(&base, i, &spec).unwrap();
        assert!(p > 0.0 && p < 0.5);
    }
}

#[test]
fn zero_step_size_keeps_the_initial_policy() {
    let inst = GameFixture::default_fixture().build().unwrap();
    let spec = HeuristicSpec::Pchange;
    let cfg = RlConfig { gamma: 0.0, seed: 4, ..RlConfig::default() };
    let out = run_rl(&inst, &spec, &cfg).unwrap();
    assert_eq!(out.policy, Policy::from_heuristic(&inst, &spec).unwrap());
    let none = run_rl(&inst, &spec, &RlConfig { iterations: 0, ..RlConfig::default() }).unwrap();
    assert_eq!(none.policy, Policy::from_heuristic(&inst, &spec).unwrap());
}

#[test]
fn rows_stay_stochastic_during_training() {
    let inst = GameFixture::default_fixture().build().unwrap();
    let cfg = RlConfig { seed: 5, ..RlConfig::default() };
    let mut policy = Policy::from_heuristic(&inst, &HeuristicSpec::Pchange).unwrap();
    let mut q = QTable::empty(&policy);
    let mut rng = rng_from_seed(cfg.seed);
    for _ in 0..cfg.iterations {
        rl_iteration(&inst, &mut policy, &mut q, &cfg, &mut rng).unwrap();
        for a in policy.agents() {
            for row in &a.rows {
                assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
                assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
            }
        }
    }
}

#[test]
fn same_seed_same_policy() {
    let inst = GameFixture::default_fixture().build().unwrap();
    let cfg = RlConfig { seed: 6, ..RlConfig::default() };
    let a = run_rl(&inst, &HeuristicSpec::Pchange, &cfg).unwrap();
    let b = run_rl(&inst, &HeuristicSpec::Pchange, &cfg).unwrap();
    assert_eq!(a.policy, b.policy);
}

#[test]
fn simulator_samples_follow_marginals() {
    let inst = GameFixture::default_fixture().build().unwrap();
    let out = run_rl(&inst, &HeuristicSpec::Pchange, &RlConfig { seed: 8, ..RlConfig::default() }).unwrap();
    let data = sample_sim_data(&inst, &out.policy, 100_000, 9).unwrap();
    for i in 0..inst.agent_count() {
        let want = marginal_action_prob(&out.policy, i)[1];
        assert!((data.action_frequency(i, 1) - want).abs() < 0.01);
    }
    let retain = Policy::constant(&inst, &vec![vec![1.0, 0.0]; inst.agent_count()]).unwrap();
    let data = sample_sim_data(&inst, &retain, 200, 1).unwrap();
    assert!(data.iter().all(|s| s.actions().iter().all(|&a| a == 0)));
}

#[test]
fn training_tends_to_raise_payoffs() {
    let inst = GameFixture::default_fixture().build().unwrap();
    let improved = (0..10u64)
        .filter(|&seed| {
            let out = run_rl(&inst, &HeuristicSpec::Pchange, &RlConfig { seed, ..RlConfig::default() }).unwrap();
            let m = &out.mean_payoffs;
            let first: f64 = m[..5].iter().sum();
            let last: f64 = m[m.len() - 5..].iter().sum();
            last >= first
        })
        .count();
    assert!(improved >= 9, "{improved} of 10 seeds improved");
}

#[test]
fn policy_file_roundtrip() {
    let inst = four_agent_game();
    let out = run_rl(&inst, &HeuristicSpec::Pchange, &RlConfig { seed: 2, ..RlConfig::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("policy.json");
    out.policy.save(&path).unwrap();
    assert_eq!(Policy::load(&path).unwrap(), out.policy);
}
