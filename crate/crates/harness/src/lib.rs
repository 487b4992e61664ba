//! Experiment runner: expert demos, training, evaluation, sweeps and reports.

pub mod experiment;
pub mod render;
pub mod stats;

use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use lpp_core::grammar::Pcfg;
use lpp_core::grid::{Game, Split, TaskInstance, Trajectory};
use lpp_core::learner::{derive_seed, lpp_learn, vpi_learn, Demo, LearnConfig, LearnOutcome, PosteriorMixture, PriorMode};
use lpp_envs::{expert_demo, make_instances, rollout, TRAIN_INSTANCES};

pub const DEFAULT_EPISODES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lpp,
    Vpi,
    NoPrior,
    SparsityPrior,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lpp, Method::Vpi, Method::NoPrior, Method::SparsityPrior];

    pub fn id(self) -> &'static str {
        match self {
            Method::Lpp => "lpp",
            Method::Vpi => "vpi",
            Method::NoPrior => "no_prior",
            Method::SparsityPrior => "sparsity_prior",
        }
    }

    pub fn prior(self) -> PriorMode {
        match self {
            Method::Lpp | Method::Vpi => PriorMode::Grammatical,
            Method::NoPrior => PriorMode::Uniform,
            Method::SparsityPrior => PriorMode::Sparsity,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

pub fn split_instances(game: Game, seed: u64, split: Split) -> Result<Vec<TaskInstance>> {
    Ok(make_instances(game, seed)?
        .into_iter()
        .filter(|i| i.split == split)
        .collect())
}

/// Expert trajectories on the given train instances.
pub fn expert_trajectories(game: Game, indices: &[usize], seed: u64) -> Result<Vec<Trajectory>> {
    let train = split_instances(game, seed, Split::Train)?;
    indices
        .iter()
        .map(|&i| {
            if i >= TRAIN_INSTANCES {
                bail!("only {TRAIN_INSTANCES} train instances, asked for index {i}");
            }
            expert_demo(&train[i], derive_seed(seed, i as u64))
                .with_context(|| format!("expert demo on {}", train[i].id))
        })
        .collect()
}

pub fn flatten(trajs: &[Trajectory]) -> Vec<Demo> {
    trajs
        .iter()
        .flat_map(|t| t.steps.iter().map(|s| (s.state.clone(), s.action)))
        .collect()
}

pub struct Trained {
    pub outcome: LearnOutcome,
    pub seconds: f64,
}

pub fn train(game: Game, demos: &[Demo], method: Method, cfg: &LearnConfig) -> Result<Trained> {
    let g = Pcfg::for_game(game);
    let cfg = LearnConfig {
        prior: method.prior(),
        ..*cfg
    };
    let start = Instant::now();
    let outcome = match method {
        Method::Vpi => vpi_learn(demos, &g, &cfg)?,
        _ => lpp_learn(demos, &g, &cfg)?,
    };
    Ok(Trained {
        outcome,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Success rate of the mixture's MAP action on each instance.
pub fn evaluate(mixture: &PosteriorMixture, instances: &[TaskInstance], episodes: usize, seed: u64) -> Vec<f64> {
    instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| rollout(inst, i, |s| mixture.map_action(s), episodes, seed))
        .collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}
