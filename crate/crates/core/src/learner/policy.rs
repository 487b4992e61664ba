//! Logical program policies: DNF formulas over feature programs.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::data::Demo;
use super::LearnError;
use crate::dsl::FeatureProgram;
use crate::grammar::{GrammarError, Pcfg};
use crate::grid::GridState;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub program: FeatureProgram,
    pub negated: bool,
}

impl Literal {
    pub fn new(program: FeatureProgram, negated: bool) -> Self {
        Literal { program, negated }
    }

    pub fn pos(program: FeatureProgram) -> Self {
        Literal::new(program, false)
    }

    pub fn neg(program: FeatureProgram) -> Self {
        Literal::new(program, true)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not {}", self.program)
        } else {
            write!(f, "{}", self.program)
        }
    }
}

/// `h(s, a) = OR_i AND_j literal_ij(s, a)`, kept in canonical order: literals
/// sorted and deduplicated within each clause, clauses sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DnfPolicy {
    clauses: Vec<Vec<Literal>>,
}

impl DnfPolicy {
    pub fn new(clauses: Vec<Vec<Literal>>) -> Result<Self, LearnError> {
        let mut keyed: Vec<(String, Vec<Literal>)> = Vec::with_capacity(clauses.len());
        for (i, clause) in clauses.into_iter().enumerate() {
            if clause.is_empty() {
                return Err(LearnError::EmptyClause(i));
            }
            let mut lits: Vec<(String, Literal)> =
                clause.into_iter().map(|l| (l.to_string(), l)).collect();
            lits.sort_by(|a, b| a.0.cmp(&b.0));
            lits.dedup_by(|a, b| a.0 == b.0);
            let text = clause_text(lits.iter().map(|(t, _)| t.as_str()));
            keyed.push((text, lits.into_iter().map(|(_, l)| l).collect()));
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        Ok(DnfPolicy {
            clauses: keyed.into_iter().map(|(_, c)| c).collect(),
        })
    }

    /// The policy that selects nothing.
    pub fn empty() -> Self {
        DnfPolicy { clauses: vec![] }
    }

    pub fn single(program: FeatureProgram) -> Self {
        DnfPolicy {
            clauses: vec![vec![Literal::pos(program)]],
        }
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.clauses.iter().flatten()
    }

    pub fn num_literals(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }

    pub fn holds(&self, s: &GridState, a: crate::grid::Action) -> bool {
        self.clauses.iter().any(|c| {
            c.iter()
                .all(|l| l.program.evaluate(s, a) != l.negated)
        })
    }

    /// `h(s, a)` for every cell in row-major order.
    pub fn selected(&self, s: &GridState) -> Vec<bool> {
        let n = s.num_cells();
        let mut out = vec![false; n];
        for clause in &self.clauses {
            let mut acc = vec![true; n];
            for l in clause {
                let vals = program_values(&l.program, s);
                for (x, v) in acc.iter_mut().zip(vals) {
                    *x &= v != l.negated;
                }
            }
            for (o, x) in out.iter_mut().zip(acc) {
                *o |= x;
            }
        }
        out
    }

    /// `pi(a | s)` for every cell: uniform over selected cells, or over all
    /// cells when nothing is selected.
    pub fn action_distribution(&self, s: &GridState) -> Vec<f64> {
        distribution_from(&self.selected(s))
    }

    pub fn to_record(&self, log_prior: f64, log_likelihood: f64) -> PolicyRecord {
        PolicyRecord {
            clauses: self
                .clauses
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|l| LiteralRecord {
                            program: l.program.to_string(),
                            negated: l.negated,
                        })
                        .collect()
                })
                .collect(),
            log_prior,
            log_likelihood,
        }
    }
}

fn clause_text<'a>(lits: impl Iterator<Item = &'a str>) -> String {
    let parts: Vec<&str> = lits.collect();
    format!("({})", parts.join(" and "))
}

impl fmt::Display for DnfPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "false");
        }
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> = c.iter().map(Literal::to_string).collect();
                format!("({})", lits.join(" and "))
            })
            .collect();
        write!(f, "{}", parts.join(" or "))
    }
}

pub(crate) fn program_values(f: &FeatureProgram, s: &GridState) -> Vec<bool> {
    if f.depends_on_action() {
        s.actions().map(|a| f.evaluate(s, a)).collect()
    } else {
        vec![f.evaluate_state(s); s.num_cells()]
    }
}

pub(crate) fn distribution_from(selected: &[bool]) -> Vec<f64> {
    let k = selected.iter().filter(|&&b| b).count();
    if k == 0 {
        let u = 1.0 / selected.len() as f64;
        vec![u; selected.len()]
    } else {
        let u = 1.0 / k as f64;
        selected.iter().map(|&b| if b { u } else { 0.0 }).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LiteralRecord {
    pub program: String,
    pub negated: bool,
}

/// On-disk form of a scored policy.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PolicyRecord {
    pub clauses: Vec<Vec<LiteralRecord>>,
    pub log_prior: f64,
    pub log_likelihood: f64,
}

impl PolicyRecord {
    pub fn to_policy(&self) -> Result<DnfPolicy, LearnError> {
        let mut clauses = Vec::with_capacity(self.clauses.len());
        for (i, c) in self.clauses.iter().enumerate() {
            let mut lits = Vec::with_capacity(c.len());
            for (j, l) in c.iter().enumerate() {
                let program = FeatureProgram::parse(&l.program).map_err(|e| LearnError::Format {
                    field: format!("clauses[{i}][{j}].program"),
                    message: e.to_string(),
                })?;
                lits.push(Literal::new(program, l.negated));
            }
            clauses.push(lits);
        }
        DnfPolicy::new(clauses)
    }
}

/// How candidate policies are scored a priori.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorMode {
    /// Sum of grammar log-probabilities over literal occurrences.
    Grammatical,
    /// Flat prior; the "no prior" ablation.
    Uniform,
    /// `-log 2` per literal occurrence.
    Sparsity,
}

impl PriorMode {
    /// The prior a single feature contributes, used by the stopping rule.
    pub fn feature_log_prior(self, grammar_log_prior: f64) -> f64 {
        match self {
            PriorMode::Grammatical => grammar_log_prior,
            PriorMode::Uniform => 0.0,
            PriorMode::Sparsity => -std::f64::consts::LN_2,
        }
    }
}

/// Unnormalized log prior of a policy. The empty policy gets `-inf`.
pub fn policy_log_prior(pi: &DnfPolicy, g: &Pcfg, mode: PriorMode) -> Result<f64, GrammarError> {
    if pi.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    match mode {
        PriorMode::Grammatical => pi.literals().map(|l| g.log_prior(&l.program)).sum(),
        PriorMode::Uniform => Ok(0.0),
        PriorMode::Sparsity => Ok(-(pi.num_literals() as f64) * std::f64::consts::LN_2),
    }
}

/// Demonstrator model: follow the policy with probability `1 - epsilon`,
/// otherwise pick a cell uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    epsilon: f64,
}

impl NoiseModel {
    pub fn new(epsilon: f64) -> Result<Self, LearnError> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(LearnError::BadEpsilon(epsilon));
        }
        Ok(NoiseModel { epsilon })
    }

    pub fn exact() -> Self {
        NoiseModel { epsilon: 0.0 }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `log[(1 - eps) * p + eps / cells]`.
    pub fn log_prob(&self, p: f64, cells: usize) -> f64 {
        let e = self.epsilon;
        if e == 0.0 {
            p.ln()
        } else {
            ((1.0 - e) * p + e / cells as f64).ln()
        }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::exact()
    }
}

/// How a demo pair is scored when the policy selects no cell in its state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Likelihood {
    /// The demonstrated cell must be selected; an empty selection gives it
    /// probability 0. The uniform fallback still applies when acting.
    #[default]
    Covered,
    /// Score with the acting distribution, uniform fallback included.
    Fallback,
}

impl Likelihood {
    /// Probability of the demonstrated cell given the selection count and
    /// whether that cell is selected.
    pub fn prob(self, selected: usize, hit: bool, cells: usize) -> f64 {
        match (selected, hit, self) {
            (0, _, Likelihood::Fallback) => 1.0 / cells as f64,
            (_, true, _) => 1.0 / selected as f64,
            _ => 0.0,
        }
    }
}

/// `sum log[(1 - eps) * pi(a | s) + eps / HW]` over the demos.
pub fn log_likelihood(pi: &DnfPolicy, demos: &[Demo], noise: NoiseModel) -> f64 {
    log_likelihood_with(pi, demos, noise, Likelihood::Fallback)
}

pub fn log_likelihood_with(pi: &DnfPolicy, demos: &[Demo], noise: NoiseModel, mode: Likelihood) -> f64 {
    demos
        .iter()
        .map(|(s, a)| {
            let sel = pi.selected(s);
            let k = sel.iter().filter(|&&b| b).count();
            noise.log_prob(mode.prob(k, sel[s.index_of(*a)], s.num_cells()), s.num_cells())
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::Condition;
    use crate::grid::{Action, Cell};

    fn civ_at(v: Cell) -> FeatureProgram {
        FeatureProgram::AtActionCell(Condition::cell_is_value(v))
    }

    #[test]
    fn canonical_form_sorts_and_dedups() {
        let a = civ_at(Cell::Token);
        let b = civ_at(Cell::Empty);
        let p = DnfPolicy::new(vec![
            vec![Literal::pos(a.clone()), Literal::neg(b.clone()), Literal::pos(a.clone())],
            vec![Literal::pos(b.clone())],
            vec![Literal::neg(b.clone()), Literal::pos(a.clone())],
        ])
        .unwrap();
        assert_eq!(p.clauses().len(), 2);
        assert_eq!(p.num_literals(), 3);
        assert_eq!(
            p.to_string(),
            "(at_action_cell(cell_is_value(empty))) or (at_action_cell(cell_is_value(token)) and not at_action_cell(cell_is_value(empty)))"
        );
        assert!(matches!(DnfPolicy::new(vec![vec![]]), Err(LearnError::EmptyClause(0))));
    }

    #[test]
    fn priors_by_mode() {
        let g = Pcfg::new(vec![Cell::Empty, Cell::Token, Cell::Offscreen]);
        let single = DnfPolicy::single(civ_at(Cell::Empty));
        let lp = policy_log_prior(&single, &g, PriorMode::Grammatical).unwrap();
        assert!((lp - (1.0f64 / 24.0).ln()).abs() < 1e-12);
        assert_eq!(policy_log_prior(&single, &g, PriorMode::Uniform).unwrap(), 0.0);
        let six: Vec<Vec<Literal>> = [Cell::Empty, Cell::Token, Cell::Offscreen]
            .iter()
            .flat_map(|&v| [vec![Literal::pos(civ_at(v))], vec![Literal::neg(civ_at(v))]])
            .collect();
        let six = DnfPolicy::new(six).unwrap();
        assert_eq!(six.num_literals(), 6);
        let sp = policy_log_prior(&six, &g, PriorMode::Sparsity).unwrap();
        assert!((sp + 6.0 * 2f64.ln()).abs() < 1e-12);
        // a feature used twice pays twice
        let twice = DnfPolicy::new(vec![
            vec![Literal::pos(civ_at(Cell::Empty))],
            vec![Literal::neg(civ_at(Cell::Empty)), Literal::pos(civ_at(Cell::Token))],
        ])
        .unwrap();
        let lp2 = policy_log_prior(&twice, &g, PriorMode::Grammatical).unwrap();
        assert!((lp2 - 3.0 * (1.0f64 / 24.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn action_distributions() {
        let s = GridState::from_glyphs(&["I...", "....", "....", "....", "...."]).unwrap();
        let one = DnfPolicy::single(civ_at(Cell::Token));
        let d = one.action_distribution(&s);
        assert_eq!(d[0], 1.0);
        assert_eq!(d.iter().sum::<f64>(), 1.0);
        let none = DnfPolicy::empty();
        let small = GridState::filled(2, 2, Cell::Empty).unwrap();
        assert_eq!(none.action_distribution(&small), vec![0.25; 4]);
        let four = GridState::from_glyphs(&["IIII", "....", "....", "....", "...."]).unwrap();
        let d = one.action_distribution(&four);
        assert_eq!(d.iter().filter(|&&p| p == 0.25).count(), 4);
        assert_eq!(d.iter().filter(|&&p| p == 0.0).count(), 16);
    }

    #[test]
    fn likelihood_cases() {
        let s = GridState::from_glyphs(&["I..", "...", "..."]).unwrap();
        let pi = DnfPolicy::single(civ_at(Cell::Token));
        let hit = vec![(s.clone(), Action::new(0, 0))];
        let miss = vec![(s.clone(), Action::new(1, 1))];
        assert_eq!(log_likelihood(&pi, &hit, NoiseModel::exact()), 0.0);
        assert_eq!(log_likelihood(&pi, &miss, NoiseModel::exact()), f64::NEG_INFINITY);
        let noisy = NoiseModel::new(0.1).unwrap();
        let ll = log_likelihood(&pi, &miss, noisy);
        assert!((ll - (0.1f64 / 9.0).ln()).abs() < 1e-12);
        assert!(NoiseModel::new(1.5).is_err());
    }

    #[test]
    fn record_round_trip() {
        let pi = DnfPolicy::new(vec![vec![
            Literal::pos(civ_at(Cell::Token)),
            Literal::neg(FeatureProgram::AtCellWithValue(
                Cell::Token,
                Condition::shifted(crate::grid::Offset::new(0, 1), Condition::cell_is_value(Cell::Empty)),
            )),
        ]])
        .unwrap();
        let rec = pi.to_record(-3.5, -0.25);
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.starts_with("{\"clauses\":[[{\"program\":"));
        let back: PolicyRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_policy().unwrap(), pi);
    }
}
