//! Sweeps over demonstration counts, program budgets, prior ablations and
//! demonstration noise.

use std::path::Path;

use anyhow::{bail, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use lpp_core::grid::{Cell, Game, Split, Trajectory};
use lpp_core::learner::{derive_seed, Demo, LearnConfig, Likelihood, NoiseModel, PosteriorMixture};
use lpp_envs::{expert_action, step, Outcome, TRAIN_INSTANCES};
use lpp_core::grid::HORIZON;

use crate::{evaluate, expert_trajectories, flatten, mean, split_instances, train, Method, DEFAULT_EPISODES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    DemoSweep,
    ProgramSweep,
    Ablation,
    Noise,
}

impl std::str::FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "demo_sweep" => Ok(ExperimentKind::DemoSweep),
            "program_sweep" => Ok(ExperimentKind::ProgramSweep),
            "ablation" => Ok(ExperimentKind::Ablation),
            "noise" => Ok(ExperimentKind::Noise),
            other => Err(format!("unknown experiment `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoNoise {
    None,
    /// Any cell, uniformly.
    Independent,
    /// A random token cell.
    Correlated,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: Game,
    pub method: Method,
    pub demo_counts: Vec<usize>,
    pub budgets: Vec<usize>,
    pub trials: usize,
    pub k: usize,
    pub restarts: usize,
    pub epsilons: Vec<f64>,
    pub noise: DemoNoise,
    pub noise_rate: f64,
    pub likelihood: Likelihood,
    pub episodes: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(game: Game) -> Self {
        ExperimentConfig {
            game,
            method: Method::Lpp,
            demo_counts: vec![TRAIN_INSTANCES],
            budgets: vec![100],
            trials: 1,
            k: 25,
            restarts: 5,
            epsilons: vec![0.0],
            noise: DemoNoise::None,
            noise_rate: 0.2,
            likelihood: Likelihood::Covered,
            episodes: DEFAULT_EPISODES,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, xs: &[usize]| {
            if xs.is_empty() || xs.contains(&0) {
                bail!("{name} must be non-empty and positive");
            }
            Ok(())
        };
        positive("demo counts", &self.demo_counts)?;
        positive("budgets", &self.budgets)?;
        if self.trials == 0 || self.k == 0 || self.restarts == 0 || self.episodes == 0 {
            bail!("trials, k, restarts and episodes must be positive");
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(0.0..=1.0).contains(e)) {
            bail!("epsilon values must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            bail!("noise rate must lie in [0, 1]");
        }
        if self.noise == DemoNoise::Correlated && self.game != Game::Nim {
            bail!("correlated noise is defined for nim only");
        }
        Ok(())
    }
}

/// One training run and its test-split evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub game: String,
    pub method: String,
    pub demos: usize,
    pub budget: usize,
    pub trial: usize,
    pub epsilon: f64,
    pub mean_success: f64,
    pub successes: String,
    pub enumerated: usize,
    pub components: usize,
    pub map_policy: String,
}

/// A row plus its wall-clock time, which is kept out of the CSV.
#[derive(Debug, Clone)]
pub struct Run {
    pub row: ResultRow,
    pub seconds: f64,
}

/// Train instance indices for trial `t` with `n` demos: a cyclic window so
/// that ten trials of ten demos each leave a different instance out.
pub fn trial_indices(n: usize, t: usize) -> Vec<usize> {
    (0..n).map(|j| (t + j) % TRAIN_INSTANCES).collect()
}

/// Expert demos where each click is replaced by a random one with
/// probability `rate`. Demo `j` starts from train instance `j mod 11`.
pub fn noisy_demos(game: Game, count: usize, noise: DemoNoise, rate: f64, seed: u64) -> Result<Vec<Trajectory>> {
    let train = split_instances(game, seed, Split::Train)?;
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let inst = &train[j % train.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ 0x6e_6f69_7365, j as u64));
        let mut s = inst.initial_state.clone();
        let mut steps = Vec::new();
        while steps.len() < HORIZON {
            let Ok(expert) = expert_action(game, &s) else {
                break;
            };
            let mut a = expert;
            if noise != DemoNoise::None && rng.gen_bool(rate) {
                let pool: Vec<_> = match noise {
                    DemoNoise::Correlated => s.find_all(Cell::Token).collect(),
                    _ => s.actions().collect(),
                };
                if let Some(&r) = pool.choose(&mut rng) {
                    a = r;
                }
            }
            let (next, outcome) = step(game, &s, a, &mut rng);
            steps.push(lpp_core::grid::Step { state: s, action: a });
            s = next;
            if outcome != Outcome::Ongoing {
                break;
            }
        }
        out.push(Trajectory {
            game,
            steps,
            final_state: s,
        });
    }
    Ok(out)
}

/// One training run within a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub method: Method,
    pub demos: usize,
    pub budget: usize,
    pub trial: usize,
    pub epsilon: f64,
}

fn jobs(kind: ExperimentKind, cfg: &ExperimentConfig) -> Vec<Job> {
    let mut out = Vec::new();
    let methods: Vec<Method> = match kind {
        ExperimentKind::Ablation => vec![Method::Lpp, Method::NoPrior, Method::SparsityPrior, Method::Vpi],
        _ => vec![cfg.method],
    };
    for &method in &methods {
        for &demos in &cfg.demo_counts {
            for &budget in &cfg.budgets {
                for &epsilon in &cfg.epsilons {
                    for trial in 0..cfg.trials {
                        out.push(Job {
                            method,
                            demos,
                            budget,
                            trial,
                            epsilon,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Trains and evaluates a single job exactly as the sweep would.
pub fn run_job(kind: ExperimentKind, cfg: &ExperimentConfig, job: &Job) -> Result<Run> {
    run_job_keeping_mixture(kind, cfg, job).map(|(run, _)| run)
}

pub fn run_job_keeping_mixture(kind: ExperimentKind, cfg: &ExperimentConfig, job: &Job) -> Result<(Run, PosteriorMixture)> {
    let game = cfg.game;
    let trajs = match kind {
        ExperimentKind::Noise => noisy_demos(game, job.demos, cfg.noise, cfg.noise_rate, derive_seed(cfg.seed, job.trial as u64))?,
        _ => {
            if job.demos > TRAIN_INSTANCES {
                bail!("{} demos requested, only {TRAIN_INSTANCES} train instances", job.demos);
            }
            expert_trajectories(game, &trial_indices(job.demos, job.trial), cfg.seed)?
        }
    };
    let demos: Vec<Demo> = flatten(&trajs);
    let learn = LearnConfig {
        k: cfg.k,
        max_programs: job.budget,
        restarts: cfg.restarts,
        noise: NoiseModel::new(job.epsilon)?,
        likelihood: cfg.likelihood,
        prior: job.method.prior(),
        seed: derive_seed(cfg.seed, (job.demos * 1000 + job.trial) as u64),
    };
    let trained = train(game, &demos, job.method, &learn)?;
    let test = split_instances(game, cfg.seed, Split::Test)?;
    let mixture = trained.outcome.mixture;
    let successes = evaluate(&mixture, &test, cfg.episodes, derive_seed(cfg.seed, 0x7465_7374));
    let row = ResultRow {
        game: game.id().to_string(),
        method: job.method.id().to_string(),
        demos: job.demos,
        budget: job.budget,
        trial: job.trial,
        epsilon: job.epsilon,
        mean_success: mean(&successes),
        successes: successes.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";"),
        enumerated: trained.outcome.enumerated,
        components: mixture.len(),
        map_policy: mixture.map_policy().map(|c| c.policy.to_string()).unwrap_or_else(|| "false".into()),
    };
    Ok((
        Run {
            row,
            seconds: trained.seconds,
        },
        mixture,
    ))
}

/// Runs every configuration of the experiment; rows come back in job order.
pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<Vec<Run>> {
    cfg.validate()?;
    jobs(kind, cfg)
        .par_iter()
        .map(|j| run_job(kind, cfg, j))
        .collect()
}

pub fn write_csv(rows: &[Run], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(&r.row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[Run]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(&r.row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Mean and max success per (method, demos, budget, epsilon) over trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: String,
    pub demos: usize,
    pub budget: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub mean_success: f64,
    pub max_success: f64,
}

pub fn summarize(rows: &[Run]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    for r in rows {
        let r = &r.row;
        let found = out.iter_mut().find(|s| {
            s.method == r.method && s.demos == r.demos && s.budget == r.budget && s.epsilon == r.epsilon
        });
        match found {
            Some(s) => {
                s.mean_success += r.mean_success;
                s.max_success = s.max_success.max(r.mean_success);
                s.trials += 1;
            }
            None => out.push(SummaryRow {
                method: r.method.clone(),
                demos: r.demos,
                budget: r.budget,
                epsilon: r.epsilon,
                trials: 1,
                mean_success: r.mean_success,
                max_success: r.mean_success,
            }),
        }
    }
    for s in &mut out {
        s.mean_success /= s.trials as f64;
    }
    out
}
