//! Top-K weighted set of policies approximating the posterior.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::policy::{distribution_from, program_values, DnfPolicy, PolicyRecord};
use super::LearnError;
use crate::dsl::FeatureProgram;
use crate::grid::{Action, GridState};

pub const DEFAULT_K: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub policy: DnfPolicy,
    pub log_prior: f64,
    pub log_likelihood: f64,
}

impl Component {
    pub fn log_posterior(&self) -> f64 {
        self.log_prior + self.log_likelihood
    }
}

/// Programs shared across components are evaluated once per state.
#[derive(Debug, Clone, Default, PartialEq)]
struct Compiled {
    programs: Vec<FeatureProgram>,
    clauses: Vec<Vec<Vec<(usize, bool)>>>,
}

impl Compiled {
    fn build(components: &[Component]) -> Self {
        let mut index: HashMap<&FeatureProgram, usize> = HashMap::new();
        let mut programs = Vec::new();
        let mut clauses = Vec::with_capacity(components.len());
        for c in components {
            let mut cs = Vec::new();
            for clause in c.policy.clauses() {
                let mut lits = Vec::new();
                for l in clause {
                    let i = *index.entry(&l.program).or_insert_with(|| {
                        programs.push(l.program.clone());
                        programs.len() - 1
                    });
                    lits.push((i, l.negated));
                }
                cs.push(lits);
            }
            clauses.push(cs);
        }
        Compiled { programs, clauses }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorMixture {
    capacity: usize,
    components: Vec<Component>,
    weights: Vec<f64>,
    compiled: Compiled,
}

impl PosteriorMixture {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "mixture capacity must be positive");
        PosteriorMixture {
            capacity,
            components: Vec::new(),
            weights: Vec::new(),
            compiled: Compiled::default(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.components.len() >= self.capacity
    }

    /// Components sorted by descending log posterior.
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn map_policy(&self) -> Option<&Component> {
        self.components.first()
    }

    /// The score a newcomer must beat: the worst component's log posterior
    /// once the mixture is full, `-inf` before.
    pub fn min_log_posterior(&self) -> f64 {
        if self.is_full() {
            self.components
                .last()
                .map_or(f64::NEG_INFINITY, Component::log_posterior)
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn contains(&self, p: &DnfPolicy) -> bool {
        self.components.iter().any(|c| &c.policy == p)
    }

    /// Inserts the component if its score is finite, it is new, and it beats
    /// the current minimum. Returns whether it was inserted.
    pub fn offer(&mut self, c: Component) -> bool {
        let score = c.log_posterior();
        if !score.is_finite() || self.contains(&c.policy) {
            return false;
        }
        if self.is_full() && score <= self.min_log_posterior() {
            return false;
        }
        let at = self
            .components
            .iter()
            .position(|x| x.log_posterior() < score)
            .unwrap_or(self.components.len());
        self.components.insert(at, c);
        self.components.truncate(self.capacity);
        self.renormalize();
        true
    }

    fn renormalize(&mut self) {
        let scores: Vec<f64> = self.components.iter().map(Component::log_posterior).collect();
        self.weights = softmax(&scores);
        self.compiled = Compiled::build(&self.components);
    }

    /// `sum_j q_j * pi_j(a | s)` for every cell.
    pub fn action_scores(&self, s: &GridState) -> Vec<f64> {
        let n = s.num_cells();
        if self.components.is_empty() {
            return vec![1.0 / n as f64; n];
        }
        let values: Vec<Vec<bool>> = self
            .compiled
            .programs
            .iter()
            .map(|f| program_values(f, s))
            .collect();
        let mut scores = vec![0.0; n];
        for (clauses, &w) in self.compiled.clauses.iter().zip(&self.weights) {
            let mut selected = vec![false; n];
            for clause in clauses {
                for (i, sel) in selected.iter_mut().enumerate() {
                    if !*sel && clause.iter().all(|&(p, neg)| values[p][i] != neg) {
                        *sel = true;
                    }
                }
            }
            for (acc, p) in scores.iter_mut().zip(distribution_from(&selected)) {
                *acc += w * p;
            }
        }
        scores
    }

    /// Highest-scoring cell; ties go to the first cell in row-major order.
    pub fn map_action(&self, s: &GridState) -> Action {
        let scores = self.action_scores(s);
        let mut best = 0;
        for (i, &v) in scores.iter().enumerate() {
            if v > scores[best] {
                best = i;
            }
        }
        s.action_at_index(best)
    }

    pub fn to_records(&self) -> Vec<(PolicyRecord, f64)> {
        self.components
            .iter()
            .zip(&self.weights)
            .map(|(c, &w)| (c.policy.to_record(c.log_prior, c.log_likelihood), w))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_records()).expect("mixture serialization is infallible")
    }

    /// Loads a mixture file. Weights are recomputed from the stored scores
    /// and must agree with the stored ones.
    pub fn from_json(text: &str) -> Result<Self, LearnError> {
        let records: Vec<(PolicyRecord, f64)> =
            serde_json::from_str(text).map_err(|e| LearnError::Format {
                field: "mixture".into(),
                message: e.to_string(),
            })?;
        if records.is_empty() {
            return Err(LearnError::Format {
                field: "mixture".into(),
                message: "no components".into(),
            });
        }
        let mut m = PosteriorMixture::new(records.len());
        let mut stored = Vec::with_capacity(records.len());
        for (i, (rec, w)) in records.iter().enumerate() {
            let policy = rec.to_policy().map_err(|e| match e {
                LearnError::Format { field, message } => LearnError::Format {
                    field: format!("mixture[{i}].{field}"),
                    message,
                },
                other => other,
            })?;
            m.components.push(Component {
                policy,
                log_prior: rec.log_prior,
                log_likelihood: rec.log_likelihood,
            });
            stored.push(*w);
        }
        m.components
            .sort_by(|a, b| b.log_posterior().total_cmp(&a.log_posterior()));
        m.renormalize();
        let total: f64 = stored.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(LearnError::Format {
                field: "mixture".into(),
                message: format!("weights sum to {total}, expected 1"),
            });
        }
        Ok(m)
    }
}

/// Normalized `exp(x_i - max)`.
pub fn softmax(xs: &[f64]) -> Vec<f64> {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.is_empty() || !max.is_finite() {
        return vec![1.0 / xs.len().max(1) as f64; xs.len()];
    }
    let e: Vec<f64> = xs.iter().map(|x| (x - max).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Serializable run summary attached to a mixture file by the harness.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MixtureSummary {
    pub components: usize,
    pub map_policy: String,
    pub map_log_posterior: f64,
}

impl PosteriorMixture {
    pub fn summary(&self) -> Option<MixtureSummary> {
        self.map_policy().map(|c| MixtureSummary {
            components: self.len(),
            map_policy: c.policy.to_string(),
            map_log_posterior: c.log_posterior(),
        })
    }
}
