use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lpp_core::grid::{Game, GridState, Split, TaskInstance, Trajectory};
use lpp_core::learner::{LearnConfig, Likelihood, NoiseModel, PosteriorMixture, DEFAULT_K, DEFAULT_RESTARTS};
use lpp_envs::{episode_rng, run_episode, TRAIN_INSTANCES};
use lpp_harness::experiment::{run_experiment, summarize, write_csv, DemoNoise, ExperimentConfig, ExperimentKind};
use lpp_harness::render::{render_state, render_trajectory};
use lpp_harness::stats::policy_stats;
use lpp_harness::{evaluate, expert_trajectories, flatten, mean, split_instances, train, Method, DEFAULT_EPISODES};

#[derive(Parser)]
#[command(name = "lpp", about = "Learn grid-game policies from demonstrations")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write expert trajectories for the first N train instances.
    Demos {
        #[arg(long)]
        game: Game,
        #[arg(long, default_value_t = TRAIN_INSTANCES)]
        demos: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Learn a policy mixture.
    Train {
        #[command(flatten)]
        learn: LearnArgs,
        /// Demonstration files; expert demos are generated when omitted.
        #[arg(long = "demo-file")]
        demo_files: Vec<PathBuf>,
        #[arg(long, default_value = "lpp")]
        method: Method,
        /// Mixture output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Success rate of a mixture's MAP action on one split.
    Eval {
        #[arg(long)]
        mixture: PathBuf,
        #[arg(long)]
        game: Game,
        #[arg(long, default_value = "test")]
        split: Split,
        #[arg(long, default_value_t = DEFAULT_EPISODES)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write each instance's first episode as a trajectory file here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a sweep and write its CSV.
    Experiment {
        /// demo_sweep, program_sweep, ablation or noise.
        name: ExperimentKind,
        #[command(flatten)]
        learn: LearnArgs,
        #[arg(long, default_value = "lpp")]
        method: Method,
        /// Demo counts to sweep (defaults per experiment).
        #[arg(long = "demo-counts", value_delimiter = ',')]
        demo_counts: Vec<usize>,
        /// Program budgets to sweep.
        #[arg(long = "budgets", value_delimiter = ',')]
        budgets: Vec<usize>,
        /// Epsilon values to sweep (noise experiment).
        #[arg(long = "epsilons", value_delimiter = ',')]
        epsilons: Vec<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value = "independent")]
        noise: NoiseArg,
        #[arg(long, default_value_t = DEFAULT_EPISODES)]
        episodes: usize,
        /// CSV output file; a summary CSV and a timing JSON are written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// ASCII rendering of a trajectory, instance or grid file.
    Render { file: PathBuf },
    /// Size statistics of a mixture's MAP policy.
    Stats { mixture: PathBuf },
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    game: Game,
    /// Number of demonstrations.
    #[arg(long, default_value_t = TRAIN_INSTANCES)]
    demos: usize,
    /// Program budget L.
    #[arg(long, default_value_t = 100)]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Score demo states where nothing is selected with the uniform fallback.
    #[arg(long)]
    fallback_likelihood: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum NoiseArg {
    Independent,
    Correlated,
}

/// Config errors exit with 2, everything else with 3.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

fn config<T>(r: Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Config)
}

fn runtime<T>(r: Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Runtime)
}

fn learn_config(a: &LearnArgs) -> Result<LearnConfig> {
    if a.budget == 0 || a.k == 0 || a.restarts == 0 {
        bail!("--budget, --k and --restarts must be positive");
    }
    Ok(LearnConfig {
        k: a.k,
        max_programs: a.budget,
        restarts: a.restarts,
        noise: NoiseModel::new(a.epsilon)?,
        likelihood: likelihood(a),
        seed: a.seed,
        ..LearnConfig::default()
    })
}

fn likelihood(a: &LearnArgs) -> Likelihood {
    if a.fallback_likelihood {
        Likelihood::Fallback
    } else {
        Likelihood::Covered
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Command::Demos { game, demos, seed, out } => {
            if demos == 0 || demos > TRAIN_INSTANCES {
                return Err(Failure::Config(anyhow!("--demos must be in 1..={TRAIN_INSTANCES}")));
            }
            let indices: Vec<usize> = (0..demos).collect();
            let trajs = runtime(expert_trajectories(game, &indices, seed))?;
            for (i, t) in trajs.iter().enumerate() {
                runtime(write(&out.join(format!("demo_{i:02}.json")), &t.to_json()))?;
            }
            println!("{}", json!({"game": game.id(), "demos": demos, "out": out}));
        }
        Command::Train { learn, demo_files, method, out } => {
            let cfg = config(learn_config(&learn))?;
            let trajs: Vec<Trajectory> = if demo_files.is_empty() {
                if learn.demos == 0 || learn.demos > TRAIN_INSTANCES {
                    return Err(Failure::Config(anyhow!("--demos must be in 1..={TRAIN_INSTANCES}")));
                }
                runtime(expert_trajectories(learn.game, &(0..learn.demos).collect::<Vec<_>>(), learn.seed))?
            } else {
                let mut v = Vec::new();
                for p in &demo_files {
                    let t = runtime(read(p).and_then(|s| Ok(Trajectory::from_json(&s)?)))?;
                    if t.game != learn.game {
                        return Err(Failure::Config(anyhow!("{} holds a {} demo", p.display(), t.game)));
                    }
                    v.push(t);
                }
                v
            };
            let trained = runtime(train(learn.game, &flatten(&trajs), method, &cfg))?;
            let mixture = &trained.outcome.mixture;
            runtime(write(&out, &mixture.to_json()))?;
            let train_set = runtime(split_instances(learn.game, learn.seed, Split::Train))?;
            let used: Vec<TaskInstance> = train_set.into_iter().take(trajs.len()).collect();
            let train_success = mean(&evaluate(mixture, &used, DEFAULT_EPISODES, learn.seed));
            let meta = json!({
                "game": learn.game.id(),
                "method": method.id(),
                "demos": trajs.len(),
                "budget": learn.budget,
                "programs_enumerated": trained.outcome.enumerated,
                "stopped_early": trained.outcome.stopped_early,
                "components": mixture.len(),
                "map_policy": mixture.map_policy().map(|c| c.policy.to_string()),
                "train_success": train_success,
                "seconds": trained.seconds,
            });
            runtime(write(&with_suffix(&out, ".meta.json"), &serde_json::to_string_pretty(&meta).unwrap()))?;
            println!("{meta}");
        }
        Command::Eval { mixture, game, split, episodes, seed, trace } => {
            if episodes == 0 {
                return Err(Failure::Config(anyhow!("--episodes must be positive")));
            }
            let m = runtime(read(&mixture).and_then(|s| Ok(PosteriorMixture::from_json(&s)?)))?;
            let insts = runtime(split_instances(game, seed, split))?;
            let per = evaluate(&m, &insts, episodes, seed);
            if let Some(dir) = trace {
                for (i, inst) in insts.iter().enumerate() {
                    let mut rng = episode_rng(seed, i, 0);
                    let ep = run_episode(game, &inst.initial_state, |s| m.map_action(s), &mut rng);
                    runtime(write(&dir.join(format!("{split}_{i:02}.json")), &ep.trajectory.to_json()))?;
                }
            }
            println!(
                "{}",
                json!({"game": game.id(), "split": split.to_string(), "episodes": episodes,
                       "mean_success": mean(&per), "successes": per})
            );
        }
        Command::Experiment {
            name,
            learn,
            method,
            demo_counts,
            budgets,
            epsilons,
            trials,
            noise,
            episodes,
            out,
        } => {
            let mut cfg = ExperimentConfig::new(learn.game);
            cfg.method = method;
            cfg.k = learn.k;
            cfg.restarts = learn.restarts;
            cfg.seed = learn.seed;
            cfg.episodes = episodes;
            cfg.likelihood = likelihood(&learn);
            cfg.budgets = if budgets.is_empty() { vec![learn.budget] } else { budgets };
            let default_epsilons = epsilons.is_empty();
            cfg.epsilons = if default_epsilons { vec![learn.epsilon] } else { epsilons };
            match name {
                ExperimentKind::DemoSweep | ExperimentKind::Ablation => {
                    cfg.demo_counts = if demo_counts.is_empty() { (1..=10).collect() } else { demo_counts };
                    cfg.trials = trials.unwrap_or(10);
                }
                ExperimentKind::ProgramSweep => {
                    cfg.demo_counts = if demo_counts.is_empty() { vec![learn.demos] } else { demo_counts };
                    cfg.trials = trials.unwrap_or(1);
                }
                ExperimentKind::Noise => {
                    cfg.demo_counts = if demo_counts.is_empty() { (2..=16).step_by(2).collect() } else { demo_counts };
                    cfg.trials = trials.unwrap_or(1);
                    cfg.noise = match noise {
                        NoiseArg::Independent => DemoNoise::Independent,
                        NoiseArg::Correlated => DemoNoise::Correlated,
                    };
                    if default_epsilons && learn.epsilon == 0.0 {
                        cfg.epsilons = vec![0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0];
                    }
                }
            }
            config(cfg.validate())?;
            let runs = runtime(run_experiment(name, &cfg))?;
            runtime(write_csv(&runs, &out))?;
            let summary_path = with_suffix(&out, ".summary.csv");
            let mut w = runtime(csv::Writer::from_path(&summary_path).map_err(Into::into))?;
            for s in summarize(&runs) {
                runtime(w.serialize(&s).map_err(Into::into))?;
            }
            runtime(w.flush().map_err(Into::into))?;
            let timing: Vec<_> = runs
                .iter()
                .map(|r| json!({"method": r.row.method, "demos": r.row.demos, "budget": r.row.budget,
                                "trial": r.row.trial, "epsilon": r.row.epsilon, "seconds": r.seconds}))
                .collect();
            let meta = json!({"config": cfg, "runs": timing});
            runtime(write(&with_suffix(&out, ".timing.json"), &serde_json::to_string_pretty(&meta).unwrap()))?;
            for s in summarize(&runs) {
                println!(
                    "{} demos={} budget={} eps={} mean={:.3} max={:.3}",
                    s.method, s.demos, s.budget, s.epsilon, s.mean_success, s.max_success
                );
            }
        }
        Command::Render { file } => {
            let text = runtime(read(&file))?;
            let out = if let Ok(t) = Trajectory::from_json(&text) {
                render_trajectory(&t)
            } else if let Ok(i) = TaskInstance::from_json(&text) {
                render_state(&i.initial_state)
            } else {
                render_state(&runtime(GridState::from_json(&text).map_err(Into::into))?)
            };
            print!("{out}");
        }
        Command::Stats { mixture } => {
            let m = runtime(read(&mixture).and_then(|s| Ok(PosteriorMixture::from_json(&s)?)))?;
            let c = m.map_policy().ok_or_else(|| Failure::Runtime(anyhow!("mixture is empty")))?;
            let s = policy_stats(&c.policy);
            println!(
                "{}",
                json!({"programs": s.programs, "calls": s.calls, "depth": s.depth,
                       "policy": c.policy.to_string()})
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
