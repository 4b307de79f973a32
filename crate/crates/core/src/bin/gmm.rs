use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use multiagent_gmm::combine::{
    direct_update, fit_regret_gmm_ml, mixing_data, opinion_pool, ratio_from_scores, unit_lambda,
};
use multiagent_gmm::experiment::{emit_results, load_config, run_suite_with, summarize, ExperimentConfig, Suite};
use multiagent_gmm::export::{LoadedModel, ModelFile};
use multiagent_gmm::game::build_regret_gmm;
use multiagent_gmm::heuristic::{build_heuristic_gmm, sample_heuristic};
use multiagent_gmm::rl::{run_rl, sample_sim_data, RlConfig};
use multiagent_gmm::seeds::{derive_seed, Stage};
use multiagent_gmm::{GameFixture, Gmm, GmmError, PlayDataset, Result, Temperatures};

#[derive(Parser)]
#[command(name = "gmm", version, about = "Graphical multiagent models: simulate, fit, combine, evaluate")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON). Without it the built-in fixture and defaults are used.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config's `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Build the game and write reG, hG, D, the simulator policy and D*.
    Simulate,
    /// Maximum-likelihood fit of a regret model's lambda to a dataset.
    Fit {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Start from lambda = 1 instead of the model's own lambda.
        #[arg(long)]
        unit_init: bool,
    },
    /// Combine a regret model with play data.
    Combine {
        method: Method,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Log score of a model on a dataset, and the ratio against a baseline.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Run an experiment suite and write its CSV files.
    Experiment {
        #[arg(long)]
        suite: Option<SuiteArg>,
        /// Overrides the config's trial count.
        #[arg(long)]
        trials: Option<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    Pool,
    Mix,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Baseline,
    Simg,
    Rho,
    Delta,
    Cross,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Baseline => Suite::Baseline,
            SuiteArg::Simg => Suite::Simg,
            SuiteArg::Rho => Suite::Rho,
            SuiteArg::Delta => Suite::Delta,
            SuiteArg::Cross => Suite::Cross,
        }
    }
}

fn tagged<T>(stage: &'static str, r: Result<T>) -> std::result::Result<T, (&'static str, GmmError)> {
    r.map_err(|e| (stage, e))
}

type CliResult = std::result::Result<(), (&'static str, GmmError)>;

fn load_setup(common: &Common) -> Result<(ExperimentConfig, GameFixture)> {
    let (mut cfg, fixture) = match &common.config {
        Some(path) => {
            let cfg = load_config(path)?;
            let fx = cfg.load_fixture()?;
            (cfg, fx)
        }
        None => (ExperimentConfig::with_fixture("<built-in>"), GameFixture::default_fixture()),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    Ok((cfg, fixture))
}

fn create_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| GmmError::Io { path: dir.to_path_buf(), source: e })
}

fn load_model(path: &Path) -> Result<LoadedModel> {
    ModelFile::load(path)?.build()
}

fn load_regret(path: &Path) -> Result<Gmm> {
    match load_model(path)? {
        LoadedModel::Gmm(g) if g.regret_form().is_some() => Ok(g),
        _ => Err(GmmError::NotParametric),
    }
}

fn simulate(common: &Common) -> CliResult {
    let (cfg, fixture) = tagged("config", load_setup(common))?;
    let seed = |stage| derive_seed(cfg.master_seed, 0, stage);
    let game = tagged("game", fixture.build_with_seed(seed(Stage::Game)))?;
    let temps = tagged(
        "temperatures",
        Temperatures::sample(game.agent_count(), cfg.temperature_range, seed(Stage::Temperatures)),
    )?;
    let reg = tagged("regret model", build_regret_gmm(&game, &temps))?;
    let hg = tagged("heuristic model", build_heuristic_gmm(&game, &cfg.heuristic))?;
    let train = tagged("train data", sample_heuristic(&game, &cfg.heuristic, cfg.train_size, seed(Stage::Train)))?;
    let rl = RlConfig { seed: seed(Stage::Rl), ..cfg.rl };
    let sim = tagged("simulator", run_rl(&game, &cfg.heuristic, &rl))?;
    let test = tagged("test data", sample_sim_data(&game, &sim.policy, cfg.test_size, seed(Stage::Test)))?;

    let out = &common.out;
    let write = || -> Result<()> {
        create_out(out)?;
        game.to_fixture().save(out.join("game.json"))?;
        ModelFile::from_gmm(&reg, true).save(out.join("reg.json"))?;
        ModelFile::from_gmm(&hg, false).save(out.join("hg.json"))?;
        train.save(out.join("train.csv"))?;
        sim.policy.save(out.join("policy.json"))?;
        test.save(out.join("test.csv"))
    };
    tagged("write", write())?;
    println!(
        "wrote game.json reg.json hg.json train.csv ({} plays) policy.json test.csv ({} plays) to {}",
        train.len(),
        test.len(),
        out.display()
    );
    Ok(())
}

fn fit(common: &Common, model: &Path, data: &Path, unit_init: bool) -> CliResult {
    let (cfg, _) = tagged("config", load_setup(common))?;
    let init = tagged("load", load_regret(model))?;
    let data = tagged("load", PlayDataset::load(data))?;
    let init = if unit_init { tagged("fit", unit_lambda(&init))? } else { init };
    let outcome = tagged("fit", fit_regret_gmm_ml(&init, &data, &cfg.fit))?;
    tagged("write", create_out(&common.out))?;
    tagged("write", ModelFile::from_gmm(&outcome.model, false).save(common.out.join("fitted.json")))?;
    println!(
        "iterations {} converged {} mean log-likelihood {} -> {}",
        outcome.iterations,
        outcome.converged,
        outcome.initial_log_likelihood(),
        outcome.final_log_likelihood()
    );
    Ok(())
}

fn combine(common: &Common, method: Method, model: &Path, data: &Path) -> CliResult {
    let (cfg, _) = tagged("config", load_setup(common))?;
    let g1 = tagged("load", load_regret(model))?;
    let data = tagged("load", PlayDataset::load(data))?;
    let (file, name) = match method {
        Method::Direct => (ModelFile::from_gmm(&tagged("direct", direct_update(&g1, &data, &cfg.fit))?, false), "directG"),
        Method::Pool => {
            let pool = tagged("pool", opinion_pool(&g1, &g1, &data, &cfg.fit, cfg.pool_rate))?;
            println!("pool weight {}", pool.weight());
            (ModelFile::from_pool(&pool, false), "OPG")
        }
        Method::Mix => {
            let seed = derive_seed(cfg.master_seed, 0, Stage::Mix);
            (ModelFile::from_gmm(&tagged("mix", mixing_data(&g1, &g1, &data, &cfg.fit, seed))?, false), "mixG")
        }
    };
    tagged("write", create_out(&common.out))?;
    let path = common.out.join(format!("{name}.json"));
    tagged("write", file.save(&path))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn evaluate(model: &Path, data: &Path, baseline: Option<&Path>) -> CliResult {
    let m = tagged("load", load_model(model))?;
    let data = tagged("load", PlayDataset::load(data))?;
    let score = tagged("score", m.log_score(&data))?;
    println!("log_score {score}");
    if let Some(b) = baseline {
        let base = tagged("load", load_model(b))?;
        let sb = tagged("score", base.log_score(&data))?;
        println!("baseline_log_score {sb}");
        println!("ratio {}", tagged("score", ratio_from_scores(sb, score))?);
    }
    Ok(())
}

fn experiment(common: &Common, suite: Option<SuiteArg>, trials: Option<u32>) -> CliResult {
    let (mut cfg, fixture) = tagged("config", load_setup(common))?;
    if let Some(s) = suite {
        cfg.suite = s.into();
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    tagged("config", cfg.validate())?;
    let results = tagged("experiment", run_suite_with(cfg.suite, &cfg, &fixture))?;
    let files = tagged("write", emit_results(&results, &common.out))?;
    for row in summarize(&results) {
        let setting = if row.setting.is_empty() { String::new() } else { format!("{} ", row.setting) };
        println!(
            "{setting}{} vs {}: mean R {:.4} (sd {:.4}, {} trials)",
            row.method, row.baseline, row.mean_ratio, row.std_ratio, row.trials
        );
    }
    for f in &results.failures {
        eprintln!("trial {} {} failed: {}", f.trial, f.setting, f.message);
    }
    println!("wrote {}", files.trials.display());
    if results.trials.is_empty() {
        return Err(("experiment", GmmError::Precondition("every trial failed".into())));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate => simulate(&cli.common),
        Command::Fit { model, data, unit_init } => fit(&cli.common, model, data, *unit_init),
        Command::Combine { method, model, data } => combine(&cli.common, *method, model, data),
        Command::Evaluate { model, data, baseline } => evaluate(model, data, baseline.as_deref()),
        Command::Experiment { suite, trials } => experiment(&cli.common, *suite, *trials),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((stage, err)) => {
            eprintln!("error [{stage}]: {err}");
            ExitCode::FAILURE
        }
    }
}
