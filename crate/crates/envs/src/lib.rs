//! The six grid games: transitions, goal tests, instances and scripted experts.

mod checkmate;
mod chase;
mod fence_in;
pub mod fixtures;
mod nim;
mod reach_for_the_star;
mod stop_the_fall;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use lpp_core::grid::{Action, Game, GridState, Step, TaskInstance, Trajectory, HORIZON};
use lpp_core::learner::derive_seed;

pub use checkmate::{black_king_moves, is_attacked_by_queen, is_checkmate};
pub use nim::{nim_heights, nim_opponent_moves};

pub const TRAIN_INSTANCES: usize = 11;
pub const TEST_INSTANCES: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ongoing,
    Won,
    Lost,
}

impl Outcome {
    pub fn is_terminal(self) -> bool {
        self != Outcome::Ongoing
    }
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("{game}: state is outside the expert's playbook: {reason}")]
    OutsidePlaybook { game: Game, reason: String },
    #[error("fixture {path}: {message}")]
    Fixture { path: String, message: String },
    #[error("expert failed on instance {instance}: {reason}")]
    ExpertFailed { instance: String, reason: String },
}

pub(crate) fn playbook(game: Game, reason: impl Into<String>) -> EnvError {
    EnvError::OutsidePlaybook {
        game,
        reason: reason.into(),
    }
}

/// Applies one click. Clicks with no defined effect leave the state unchanged
/// (but still advance time where the game has time).
pub fn step<R: Rng + ?Sized>(game: Game, s: &GridState, a: Action, rng: &mut R) -> (GridState, Outcome) {
    assert!(s.contains(a), "action {a} outside {}x{} grid", s.height(), s.width());
    match game {
        Game::Nim => nim::step(s, a, rng),
        Game::CheckmateTactic => checkmate::step(s, a, rng),
        Game::Chase => chase::step(s, a, rng),
        Game::StopTheFall => stop_the_fall::step(s, a),
        Game::ReachForTheStar => reach_for_the_star::step(s, a),
        Game::FenceIn => fence_in::step(s, a),
    }
}

/// Goal predicate on a single state.
pub fn is_goal(game: Game, s: &GridState) -> bool {
    match game {
        Game::Nim => nim::is_goal(s),
        Game::CheckmateTactic => is_checkmate(s),
        Game::Chase => chase::is_goal(s),
        Game::StopTheFall => stop_the_fall::is_goal(s),
        Game::ReachForTheStar => reach_for_the_star::is_goal(s),
        Game::FenceIn => fence_in::is_goal(s),
    }
}

/// The scripted expert's click.
pub fn expert_action(game: Game, s: &GridState) -> Result<Action, EnvError> {
    match game {
        Game::Nim => nim::expert(s),
        Game::CheckmateTactic => checkmate::expert(s),
        Game::Chase => chase::expert(s),
        Game::StopTheFall => stop_the_fall::expert(s),
        Game::ReachForTheStar => reach_for_the_star::expert(s),
        Game::FenceIn => fence_in::expert(s),
    }
}

/// 11 train then 9 test instances. Procedural games sample from `master_seed`;
/// the others load fixtures.
pub fn make_instances(game: Game, master_seed: u64) -> Result<Vec<TaskInstance>, EnvError> {
    match game {
        Game::Nim => Ok(procedural(game, master_seed, nim::generate)),
        Game::CheckmateTactic => Ok(procedural(game, master_seed, checkmate::generate)),
        Game::ReachForTheStar => Ok(procedural(game, master_seed, reach_for_the_star::generate)),
        Game::Chase | Game::StopTheFall | Game::FenceIn => fixtures::load(game, &fixtures::fixture_dir()),
    }
}

fn procedural(game: Game, seed: u64, gen: fn(&mut ChaCha8Rng) -> GridState) -> Vec<TaskInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, game as u64));
    let mut states: Vec<GridState> = Vec::new();
    while states.len() < TRAIN_INSTANCES + TEST_INSTANCES {
        let s = gen(&mut rng);
        if !states.contains(&s) {
            states.push(s);
        }
    }
    states
        .into_iter()
        .enumerate()
        .map(|(i, s)| instance(game, i, s))
        .collect()
}

pub(crate) fn instance(game: Game, i: usize, s: GridState) -> TaskInstance {
    use lpp_core::grid::Split;
    let (split, n) = if i < TRAIN_INSTANCES {
        (Split::Train, i)
    } else {
        (Split::Test, i - TRAIN_INSTANCES)
    };
    TaskInstance {
        game,
        id: format!("{}/{}/{:02}", game.id(), split, n),
        split,
        initial_state: s,
    }
}

/// Result of one episode.
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub success: bool,
    pub steps_taken: usize,
    pub trajectory: Trajectory,
}

/// Runs `policy` from `start` for at most the horizon.
pub fn run_episode<R: Rng + ?Sized>(
    game: Game,
    start: &GridState,
    mut policy: impl FnMut(&GridState) -> Action,
    rng: &mut R,
) -> EpisodeResult {
    let mut s = start.clone();
    let mut steps = Vec::new();
    let mut success = false;
    while steps.len() < HORIZON {
        let a = policy(&s);
        let (next, outcome) = step(game, &s, a, rng);
        steps.push(Step { state: s, action: a });
        s = next;
        if outcome.is_terminal() {
            success = outcome == Outcome::Won;
            break;
        }
    }
    EpisodeResult {
        success,
        steps_taken: steps.len(),
        trajectory: Trajectory {
            game,
            steps,
            final_state: s,
        },
    }
}

/// Per-episode RNG for environment randomness.
pub fn episode_rng(master_seed: u64, instance: usize, episode: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(derive_seed(master_seed, instance as u64), episode as u64 + 1))
}

/// Fraction of `episodes` in which `policy` wins from the instance.
pub fn rollout(
    inst: &TaskInstance,
    index: usize,
    mut policy: impl FnMut(&GridState) -> Action,
    episodes: usize,
    master_seed: u64,
) -> f64 {
    assert!(episodes >= 1, "need at least one episode");
    let wins = (0..episodes)
        .filter(|&e| {
            let mut rng = episode_rng(master_seed, index, e);
            run_episode(inst.game, &inst.initial_state, &mut policy, &mut rng).success
        })
        .count();
    wins as f64 / episodes as f64
}

/// Expert trajectory from an instance; fails if the expert leaves its
/// playbook or does not win within the horizon.
pub fn expert_demo(inst: &TaskInstance, seed: u64) -> Result<Trajectory, EnvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = inst.initial_state.clone();
    let mut steps = Vec::new();
    while steps.len() < HORIZON {
        let a = expert_action(inst.game, &s)?;
        let (next, outcome) = step(inst.game, &s, a, &mut rng);
        steps.push(Step { state: s, action: a });
        s = next;
        match outcome {
            Outcome::Won => {
                return Ok(Trajectory {
                    game: inst.game,
                    steps,
                    final_state: s,
                })
            }
            Outcome::Lost => {
                return Err(EnvError::ExpertFailed {
                    instance: inst.id.clone(),
                    reason: "game lost".into(),
                })
            }
            Outcome::Ongoing => {}
        }
    }
    Err(EnvError::ExpertFailed {
        instance: inst.id.clone(),
        reason: format!("no win within {HORIZON} steps"),
    })
}
