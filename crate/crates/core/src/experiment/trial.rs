use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::combine::{
    direct_update, fit_regret_gmm_ml, mixing_data, opinion_pool, ratio_from_scores, unit_lambda,
    PooledModel,
};
use crate::dataset::PlayDataset;
use crate::error::{GmmError, Result, StageExt};
use crate::game::{build_regret_gmm, GameFixture, GameInstance, Temperatures};
use crate::heuristic::{build_heuristic_gmm, sample_heuristic, HeuristicSpec};
use crate::model::{Gmm, JointDistribution};
use crate::rl::{run_rl, sample_sim_data, Policy, RlConfig};
use crate::seeds::{derive_seed, Stage};

use super::config::{ExperimentConfig, Suite};

/// One score-ratio measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub setting: String,
    pub method: String,
    pub baseline: String,
    pub score_base: f64,
    pub score_combined: f64,
    /// `score_base / score_combined`; above 1 when the method beats the baseline.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub trial: u32,
    pub seeds: BTreeMap<&'static str, u64>,
    /// Log score of every model on its test set, keyed `model` or `setting/model`.
    pub scores: BTreeMap<String, f64>,
    pub rows: Vec<RatioRow>,
    pub wall_time_secs: f64,
}

impl TrialResult {
    pub fn find(&self, setting: &str, method: &str, baseline: &str) -> Option<&RatioRow> {
        self.rows
            .iter()
            .find(|r| r.setting == setting && r.method == method && r.baseline == baseline)
    }
}

/// A trial, or one setting of a sweep, that did not produce results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: u32,
    /// Empty when the whole trial failed.
    pub setting: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SuiteResults {
    pub suite: Suite,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
    pub failures: Vec<TrialFailure>,
}

impl SuiteResults {
    pub fn rows(&self) -> impl Iterator<Item = (u32, &RatioRow)> {
        self.trials.iter().flat_map(|t| t.rows.iter().map(move |r| (t.trial, r)))
    }

    /// Ratios of one `(setting, method, baseline)` cell across trials.
    pub fn ratios(&self, setting: &str, method: &str, baseline: &str) -> Vec<f64> {
        self.trials
            .iter()
            .filter_map(|t| t.find(setting, method, baseline).map(|r| r.ratio))
            .collect()
    }

    pub fn mean_ratio(&self, setting: &str, method: &str, baseline: &str) -> Option<f64> {
        let r = self.ratios(setting, method, baseline);
        (!r.is_empty()).then(|| r.iter().sum::<f64>() / r.len() as f64)
    }
}

/// Everything a trial derives from the fixture before any combination.
pub struct TrialSetup {
    pub game: GameInstance,
    pub temperatures: Temperatures,
    /// Regret model with the sampled temperatures.
    pub reg: Gmm,
    /// Heuristic model of the configured heuristic.
    pub hg: Gmm,
}

/// Training data, trained simulator and test data of one heuristic.
pub struct Pipeline {
    pub train: PlayDataset,
    pub simulator: Policy,
    pub test: PlayDataset,
}

/// The three combined models built from one `(G1, D)` pair.
pub struct CombinedModels {
    pub direct: Gmm,
    pub pool: PooledModel,
    pub mix: Gmm,
}

pub const METHODS: [&str; 3] = ["directG", "OPG", "mixG"];

impl CombinedModels {
    pub fn build(g1: &Gmm, data: &PlayDataset, cfg: &ExperimentConfig, mix_seed: u64) -> Result<Self> {
        Ok(CombinedModels {
            direct: direct_update(g1, data, &cfg.fit).stage("direct")?,
            pool: opinion_pool(g1, g1, data, &cfg.fit, cfg.pool_rate).stage("pool")?,
            mix: mixing_data(g1, g1, data, &cfg.fit, mix_seed).stage("mix")?,
        })
    }

    pub fn named(&self) -> [(&'static str, &dyn JointDistribution); 3] {
        [
            (METHODS[0], &self.direct),
            (METHODS[1], &self.pool),
            (METHODS[2], &self.mix),
        ]
    }
}

struct Seeds {
    master: u64,
    trial: u32,
    used: BTreeMap<&'static str, u64>,
}

impl Seeds {
    fn get(&mut self, stage: Stage) -> u64 {
        let s = derive_seed(self.master, self.trial, stage);
        self.used.insert(stage.tag(), s);
        s
    }
}

pub fn setup_trial(cfg: &ExperimentConfig, fixture: &GameFixture, trial: u32) -> Result<TrialSetup> {
    let mut seeds = Seeds { master: cfg.master_seed, trial, used: BTreeMap::new() };
    setup_with(cfg, fixture, &mut seeds)
}

fn setup_with(cfg: &ExperimentConfig, fixture: &GameFixture, seeds: &mut Seeds) -> Result<TrialSetup> {
    let game = fixture.build_with_seed(seeds.get(Stage::Game)).stage("game")?;
    let temperatures = Temperatures::sample(
        game.agent_count(),
        cfg.temperature_range,
        seeds.get(Stage::Temperatures),
    )
    .stage("temperatures")?;
    let reg = build_regret_gmm(&game, &temperatures).stage("regret model")?;
    let hg = build_heuristic_gmm(&game, &cfg.heuristic).stage("heuristic model")?;
    Ok(TrialSetup { game, temperatures, reg, hg })
}

fn run_pipeline(
    game: &GameInstance,
    spec: &HeuristicSpec,
    cfg: &ExperimentConfig,
    seeds: &mut Seeds,
    stages: [Stage; 3],
) -> Result<Pipeline> {
    let train = sample_heuristic(game, spec, cfg.train_size, seeds.get(stages[0])).stage("train data")?;
    let rl = RlConfig { seed: seeds.get(stages[1]), ..cfg.rl };
    let simulator = run_rl(game, spec, &rl).stage("simulator")?.policy;
    let test = sample_sim_data(game, &simulator, cfg.test_size, seeds.get(stages[2])).stage("test data")?;
    Ok(Pipeline { train, simulator, test })
}

const MAIN: [Stage; 3] = [Stage::Train, Stage::Rl, Stage::Test];
const ALT: [Stage; 3] = [Stage::AltTrain, Stage::AltRl, Stage::AltTest];

fn score(model: &dyn JointDistribution, test: &PlayDataset) -> Result<f64> {
    model.log_score(test).stage("score")
}

/// Ratio rows for every `(method, baseline)` pair on one test set.
fn ratio_rows(
    setting: &str,
    test: &PlayDataset,
    methods: &[(&str, &dyn JointDistribution)],
    baselines: &[(&str, &dyn JointDistribution)],
) -> Result<Vec<RatioRow>> {
    let base_scores: Vec<f64> = baselines.iter().map(|(_, m)| score(*m, test)).collect::<Result<_>>()?;
    let method_scores: Vec<f64> = methods.iter().map(|(_, m)| score(*m, test)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(methods.len() * baselines.len());
    for ((bname, _), &sb) in baselines.iter().zip(&base_scores) {
        for ((mname, _), &sc) in methods.iter().zip(&method_scores) {
            rows.push(RatioRow {
                setting: setting.to_string(),
                method: mname.to_string(),
                baseline: bname.to_string(),
                score_base: sb,
                score_combined: sc,
                ratio: ratio_from_scores(sb, sc).stage("score")?,
            });
        }
    }
    Ok(rows)
}

/// Regret model fitted from unit `lambda` to a fresh sample of the simulator.
fn fit_simg(
    setup: &TrialSetup,
    pipe: &Pipeline,
    cfg: &ExperimentConfig,
    seeds: &mut Seeds,
) -> Result<Gmm> {
    let sim_data = sample_sim_data(&setup.game, &pipe.simulator, cfg.train_size, seeds.get(Stage::SimTrain))
        .stage("simulator data")?;
    Ok(fit_regret_gmm_ml(&unit_lambda(&setup.reg)?, &sim_data, &cfg.fit).stage("simG")?.model)
}

struct TrialOutput {
    rows: Vec<RatioRow>,
    failures: Vec<TrialFailure>,
}

fn trial_body(
    suite: Suite,
    cfg: &ExperimentConfig,
    fixture: &GameFixture,
    seeds: &mut Seeds,
) -> Result<TrialOutput> {
    let setup = setup_with(cfg, fixture, seeds)?;
    let pipe = run_pipeline(&setup.game, &cfg.heuristic, cfg, seeds, MAIN)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let reg: &dyn JointDistribution = &setup.reg;
    let hg: &dyn JointDistribution = &setup.hg;
    match suite {
        Suite::Baseline => {
            let combined = CombinedModels::build(&setup.reg, &pipe.train, cfg, seeds.get(Stage::Mix))?;
            rows = ratio_rows("", &pipe.test, &combined.named(), &[("reG", reg), ("hG", hg)])?;
            rows.extend(ratio_rows("", &pipe.test, &[("mixG", &combined.mix)], &[("mixG", &combined.mix)])?);
        }
        Suite::Simg => {
            let simg = fit_simg(&setup, &pipe, cfg, seeds)?;
            let combined = CombinedModels::build(&setup.reg, &pipe.train, cfg, seeds.get(Stage::Mix))?;
            let mut methods = vec![("reG", reg), ("hG", hg)];
            methods.extend(combined.named());
            rows = ratio_rows("", &pipe.test, &methods, &[("simG", &simg)])?;
        }
        Suite::Rho => {
            let mix_seed = seeds.get(Stage::Mix);
            for &rho in &cfg.rho {
                let setting = format!("rho={rho}");
                let take = (rho * pipe.train.len() as f64).ceil() as usize;
                let data = pipe.train.head(take.min(pipe.train.len()));
                let point = if data.len() < 2 {
                    Err(GmmError::precondition(format!(
                        "{} training profiles are too few to combine",
                        data.len()
                    )))
                } else {
                    CombinedModels::build(&setup.reg, &data, cfg, mix_seed).and_then(|c| {
                        ratio_rows(&setting, &pipe.test, &c.named(), &[("reG", reg), ("hG", hg)])
                    })
                };
                match point {
                    Ok(r) => rows.extend(r),
                    Err(e) => failures.push(TrialFailure {
                        trial: seeds.trial,
                        setting,
                        message: e.to_string(),
                    }),
                }
            }
        }
        Suite::Delta => {
            let simg = fit_simg(&setup, &pipe, cfg, seeds)?;
            let fitted = simg.lambda().expect("regret form").to_vec();
            let mix_seed = seeds.get(Stage::Mix);
            for &delta in &cfg.delta {
                let setting = format!("delta={delta}");
                let lambda = fitted.iter().map(|l| l * (1.0 + delta)).collect();
                let g1 = simg.with_lambda(lambda).stage("perturbed model")?;
                let combined = CombinedModels::build(&g1, &pipe.train, cfg, mix_seed)?;
                rows.extend(ratio_rows(&setting, &pipe.test, &combined.named(), &[("reG", &g1), ("hG", hg)])?);
            }
        }
        Suite::Cross => {
            let alt = run_pipeline(&setup.game, &cfg.alt_heuristic, cfg, seeds, ALT)?;
            let hg_alt = build_heuristic_gmm(&setup.game, &cfg.alt_heuristic).stage("heuristic model")?;
            let from_d = CombinedModels::build(&setup.reg, &pipe.train, cfg, seeds.get(Stage::Mix))?;
            let from_e = CombinedModels::build(&setup.reg, &alt.train, cfg, seeds.get(Stage::AltMix))?;
            let mut methods: Vec<(&str, &dyn JointDistribution)> = vec![("hG(D)", hg), ("hG(E)", &hg_alt)];
            let names_d = ["directG(D)", "OPG(D)", "mixG(D)"];
            let names_e = ["directG(E)", "OPG(E)", "mixG(E)"];
            for ((nd, (_, md)), (ne, (_, me))) in names_d
                .into_iter()
                .zip(from_d.named())
                .zip(names_e.into_iter().zip(from_e.named()))
            {
                methods.push((nd, md));
                methods.push((ne, me));
            }
            rows = ratio_rows("test=D*", &pipe.test, &methods, &[("reG", reg)])?;
            rows.extend(ratio_rows("test=E*", &alt.test, &methods, &[("reG", reg)])?);
        }
    }
    Ok(TrialOutput { rows, failures })
}

/// Runs one trial of `suite`. A failing stage aborts the trial with a
/// stage-tagged error; failing sweep points are returned alongside the rows.
pub fn run_trial(
    suite: Suite,
    cfg: &ExperimentConfig,
    fixture: &GameFixture,
    trial: u32,
) -> Result<(TrialResult, Vec<TrialFailure>)> {
    let start = Instant::now();
    let mut seeds = Seeds { master: cfg.master_seed, trial, used: BTreeMap::new() };
    let out = trial_body(suite, cfg, fixture, &mut seeds)?;
    let key = |setting: &str, model: &str| {
        if setting.is_empty() {
            model.to_string()
        } else {
            format!("{setting}/{model}")
        }
    };
    let mut scores = BTreeMap::new();
    for r in &out.rows {
        scores.insert(key(&r.setting, &r.baseline), r.score_base);
        scores.insert(key(&r.setting, &r.method), r.score_combined);
    }
    Ok((
        TrialResult {
            trial,
            seeds: seeds.used,
            scores,
            rows: out.rows,
            wall_time_secs: start.elapsed().as_secs_f64(),
        },
        out.failures,
    ))
}

/// Runs every trial of `suite` in parallel; results are ordered by trial index.
pub fn run_suite_with(suite: Suite, cfg: &ExperimentConfig, fixture: &GameFixture) -> Result<SuiteResults> {
    cfg.validate()?;
    let outcomes: Vec<_> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| (t, run_trial(suite, cfg, fixture, t)))
        .collect();
    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for (t, outcome) in outcomes {
        match outcome {
            Ok((result, point_failures)) => {
                trials.push(result);
                failures.extend(point_failures);
            }
            Err(e) => failures.push(TrialFailure {
                trial: t,
                setting: String::new(),
                message: e.to_string(),
            }),
        }
    }
    Ok(SuiteResults {
        suite,
        config: cfg.clone(),
        trials,
        failures,
    })
}

/// Loads the configured fixture and runs `cfg.suite`.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<SuiteResults> {
    let fixture = cfg.load_fixture().stage("config")?;
    run_suite_with(cfg.suite, cfg, &fixture)
}
