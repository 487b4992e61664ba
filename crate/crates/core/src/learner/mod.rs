//! Learning logical program policies from demonstrations.

mod bits;
mod data;
mod mixture;
mod policy;
mod tree;
mod vpi;

use rayon::prelude::*;
use thiserror::Error;

pub use bits::Bits;
pub use data::{make_anti_demos, DesignMatrix, Demo, LabeledSet};
pub use mixture::{softmax, Component, MixtureSummary, PosteriorMixture, DEFAULT_K};
pub use policy::{
    log_likelihood, log_likelihood_with, policy_log_prior, Likelihood, DnfPolicy, Literal, LiteralRecord, NoiseModel,
    PolicyRecord, PriorMode,
};
pub use tree::{fit_tree, DecisionTree, TreeData};
pub use vpi::{vpi_learn, PolicyEnumerator};

use crate::grammar::{GrammarError, Pcfg};
use crate::grid::Action;

pub const DEFAULT_RESTARTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("no demonstrations given")]
    NoDemos,
    #[error("demo {demo}: action {action} outside {height}x{width} grid")]
    ActionOutOfBounds {
        demo: usize,
        action: Action,
        height: usize,
        width: usize,
    },
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("epsilon {0} outside [0, 1]")]
    BadEpsilon(f64),
    #[error("{0} must be at least 1")]
    ZeroParameter(&'static str),
    #[error("{field}: {message}")]
    Format { field: String, message: String },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// Seed for stream `index` of a run with the given master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnConfig {
    pub k: usize,
    /// Maximum number of programs to enumerate.
    pub max_programs: usize,
    pub restarts: usize,
    pub noise: NoiseModel,
    pub likelihood: Likelihood,
    pub prior: PriorMode,
    pub seed: u64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            k: DEFAULT_K,
            max_programs: 100,
            restarts: DEFAULT_RESTARTS,
            noise: NoiseModel::exact(),
            likelihood: Likelihood::Covered,
            prior: PriorMode::Grammatical,
            seed: 0,
        }
    }
}

impl LearnConfig {
    fn check(&self) -> Result<(), LearnError> {
        if self.k == 0 {
            return Err(LearnError::ZeroParameter("k"));
        }
        if self.max_programs == 0 {
            return Err(LearnError::ZeroParameter("program budget"));
        }
        if self.restarts == 0 {
            return Err(LearnError::ZeroParameter("restarts"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub mixture: PosteriorMixture,
    /// Programs (or, for the baseline, policies) enumerated.
    pub enumerated: usize,
    pub stopped_early: bool,
    /// Mixture admission threshold after each iteration.
    pub threshold_trace: Vec<f64>,
}

/// Row-level selection of a candidate given as `(column, negated)` clauses.
fn candidate_rows(x: &DesignMatrix, clauses: &[Vec<(usize, bool)>]) -> Bits {
    let mut h = Bits::zeros(x.num_rows());
    for clause in clauses {
        let mut acc = Bits::ones(x.num_rows());
        for &(j, neg) in clause {
            if neg {
                acc.and_not_assign(x.column(j));
            } else {
                acc.and_assign(x.column(j));
            }
        }
        h.or_assign(&acc);
    }
    h
}

/// Log-likelihood of the demos computed from row selections.
fn rows_log_likelihood(x: &DesignMatrix, h: &Bits, noise: NoiseModel, mode: Likelihood) -> f64 {
    let set = x.set();
    let mut total = 0.0;
    for i in 0..set.demos().len() {
        let range = set.rows_of(i);
        let cells = range.len();
        let selected = h.count_range(range.start, range.end);
        let p = mode.prob(selected as usize, h.get(set.positive_row(i)), cells);
        total += noise.log_prob(p, cells);
        if total == f64::NEG_INFINITY {
            break;
        }
    }
    total
}

fn to_policy(x: &DesignMatrix, clauses: &[Vec<(usize, bool)>]) -> Result<DnfPolicy, LearnError> {
    DnfPolicy::new(
        clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&(j, neg)| Literal::new(x.program(j).clone(), neg))
                    .collect()
            })
            .collect(),
    )
}

/// Scores a candidate and offers it to the mixture.
fn consider(
    x: &DesignMatrix,
    clauses: &[Vec<(usize, bool)>],
    g: &Pcfg,
    cfg: &LearnConfig,
    mixture: &mut PosteriorMixture,
) -> Result<bool, LearnError> {
    if clauses.is_empty() {
        return Ok(false);
    }
    let ll = rows_log_likelihood(x, &candidate_rows(x, clauses), cfg.noise, cfg.likelihood);
    if ll == f64::NEG_INFINITY {
        return Ok(false);
    }
    let policy = to_policy(x, clauses)?;
    let lp = policy_log_prior(&policy, g, cfg.prior)?;
    Ok(mixture.offer(Component {
        policy,
        log_prior: lp,
        log_likelihood: ll,
    }))
}

/// Enumerates programs best-first, grows `restarts` decision trees over them
/// one column at a time, and keeps the best `k` resulting DNF policies.
pub fn lpp_learn(demos: &[Demo], g: &Pcfg, cfg: &LearnConfig) -> Result<LearnOutcome, LearnError> {
    cfg.check()?;
    let set = make_anti_demos(demos)?;
    let mut x = DesignMatrix::new(set);
    let labels = x.labels().clone();
    let mut trees: Vec<DecisionTree> = (0..cfg.restarts)
        .map(|r| DecisionTree::empty(&labels, derive_seed(cfg.seed, r as u64)))
        .collect();
    let mut mixture = PosteriorMixture::new(cfg.k);
    let mut seen: std::collections::HashSet<Vec<Vec<(usize, bool)>>> = Default::default();
    let mut enumerated = 0;
    let mut stopped_early = false;
    let mut trace = Vec::new();
    for (f, lp) in g.enumerate().take(cfg.max_programs) {
        if cfg.prior.feature_log_prior(lp) < mixture.min_log_posterior() {
            stopped_early = true;
            break;
        }
        enumerated += 1;
        let j = x.push(f, lp);
        if x.duplicate_of(j).is_none() {
            let data = x.tree_data();
            let changed: Vec<bool> = trees
                .par_iter_mut()
                .map(|t| t.add_column(&data, j))
                .collect();
            for (t, ch) in trees.iter().zip(changed) {
                if !ch {
                    continue;
                }
                let clauses = t.positive_paths();
                if seen.insert(clauses.clone()) {
                    consider(&x, &clauses, g, cfg, &mut mixture)?;
                }
            }
        }
        trace.push(mixture.min_log_posterior());
    }
    Ok(LearnOutcome {
        mixture,
        enumerated,
        stopped_early,
        threshold_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{Condition, FeatureProgram};
    use crate::grid::{Cell, GridState};

    #[test]
    fn seeds_differ_by_stream() {
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }

    #[test]
    fn first_program_suffices_for_a_unique_value() {
        // the demo clicks the only empty cell, which the first enumerated
        // program, at_action_cell(cell_is_value(empty)), singles out
        let s = GridState::from_glyphs(&["III", "I.I", "III"]).unwrap();
        let g = Pcfg::new(vec![Cell::Empty, Cell::Token, Cell::Offscreen]);
        let first = g.enumerate().next().unwrap().0;
        let cfg = LearnConfig {
            max_programs: 1,
            ..LearnConfig::default()
        };
        let out = lpp_learn(&[(s, Action::new(1, 1))], &g, &cfg).unwrap();
        let map = out.mixture.map_policy().unwrap();
        assert_eq!(first, FeatureProgram::AtActionCell(Condition::cell_is_value(Cell::Empty)));
        assert_eq!(map.policy, DnfPolicy::single(first));
        assert_eq!(map.log_likelihood, 0.0);
    }

    #[test]
    fn k_one_keeps_only_the_map() {
        let s = GridState::from_glyphs(&["...", ".I.", "..."]).unwrap();
        let g = Pcfg::new(vec![Cell::Empty, Cell::Token, Cell::Offscreen]);
        let cfg = LearnConfig {
            k: 1,
            max_programs: 30,
            ..LearnConfig::default()
        };
        let out = lpp_learn(&[(s, Action::new(1, 1))], &g, &cfg).unwrap();
        assert_eq!(out.mixture.len(), 1);
        assert_eq!(out.mixture.weights(), &[1.0]);
    }

    #[test]
    fn bad_config_is_rejected() {
        let s = GridState::filled(2, 2, Cell::Empty).unwrap();
        let g = Pcfg::new(vec![Cell::Empty, Cell::Offscreen]);
        let cfg = LearnConfig {
            k: 0,
            ..LearnConfig::default()
        };
        assert!(matches!(
            lpp_learn(&[(s, Action::new(0, 0))], &g, &cfg),
            Err(LearnError::ZeroParameter("k"))
        ));
        assert!(matches!(lpp_learn(&[], &g, &LearnConfig::default()), Err(LearnError::NoDemos)));
    }
}
