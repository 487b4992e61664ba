//! Labeled examples and the incrementally grown design matrix.

use std::collections::HashMap;

use rayon::prelude::*;

use super::bits::Bits;
use super::tree::TreeData;
use super::LearnError;
use crate::dsl::FeatureProgram;
use crate::grid::{Action, GridState};

/// A demonstrated state-action pair.
pub type Demo = (GridState, Action);

/// Demonstrations plus their anti-demonstrations.
///
/// Rows are laid out state by state: the rows of demo `i` are every cell of its
/// state in row-major order, so the positive row sits at the action's index and
/// the remaining `H*W - 1` rows are the negatives.
#[derive(Debug, Clone)]
pub struct LabeledSet {
    demos: Vec<Demo>,
    starts: Vec<usize>,
    rows: usize,
}

pub fn make_anti_demos(demos: &[Demo]) -> Result<LabeledSet, LearnError> {
    if demos.is_empty() {
        return Err(LearnError::NoDemos);
    }
    let mut starts = Vec::with_capacity(demos.len());
    let mut rows = 0;
    for (i, (s, a)) in demos.iter().enumerate() {
        if !s.contains(*a) {
            return Err(LearnError::ActionOutOfBounds {
                demo: i,
                action: *a,
                height: s.height(),
                width: s.width(),
            });
        }
        starts.push(rows);
        rows += s.num_cells();
    }
    Ok(LabeledSet {
        demos: demos.to_vec(),
        starts,
        rows,
    })
}

impl LabeledSet {
    pub fn demos(&self) -> &[Demo] {
        &self.demos
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    /// Row range of demo `i`.
    pub fn rows_of(&self, i: usize) -> std::ops::Range<usize> {
        self.starts[i]..self.starts[i] + self.demos[i].0.num_cells()
    }

    pub fn positive_row(&self, i: usize) -> usize {
        let (s, a) = &self.demos[i];
        self.starts[i] + s.index_of(*a)
    }

    pub fn positives(&self) -> impl Iterator<Item = (&GridState, Action)> + '_ {
        self.demos.iter().map(|(s, a)| (s, *a))
    }

    pub fn negatives(&self) -> impl Iterator<Item = (&GridState, Action)> + '_ {
        self.demos
            .iter()
            .flat_map(|(s, a)| s.actions().filter(move |b| b != a).map(move |b| (s, b)))
    }

    pub fn num_negatives(&self) -> usize {
        self.rows - self.demos.len()
    }

    pub fn labels(&self) -> Bits {
        let mut y = Bits::zeros(self.rows);
        for i in 0..self.demos.len() {
            y.set(self.positive_row(i));
        }
        y
    }

    /// Feature values on every row.
    pub fn evaluate(&self, f: &FeatureProgram) -> Bits {
        let per_demo: Vec<Vec<bool>> = self
            .demos
            .par_iter()
            .map(|(s, _)| {
                if f.depends_on_action() {
                    s.actions().map(|a| f.evaluate(s, a)).collect()
                } else {
                    vec![f.evaluate_state(s); s.num_cells()]
                }
            })
            .collect();
        let mut out = Bits::zeros(self.rows);
        for (i, vals) in per_demo.iter().enumerate() {
            let start = self.starts[i];
            for (j, v) in vals.iter().enumerate() {
                if *v {
                    out.set(start + j);
                }
            }
        }
        out
    }
}

/// Binary matrix whose column `j` is program `j` applied to every row.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    set: LabeledSet,
    labels: Bits,
    programs: Vec<FeatureProgram>,
    log_priors: Vec<f64>,
    columns: Vec<Bits>,
    first_with: HashMap<Bits, usize>,
    duplicate_of: Vec<Option<usize>>,
}

impl DesignMatrix {
    pub fn new(set: LabeledSet) -> Self {
        let labels = set.labels();
        DesignMatrix {
            set,
            labels,
            programs: Vec::new(),
            log_priors: Vec::new(),
            columns: Vec::new(),
            first_with: HashMap::new(),
            duplicate_of: Vec::new(),
        }
    }

    /// Evaluates `f` on every row and appends it as a new column.
    pub fn push(&mut self, f: FeatureProgram, log_prior: f64) -> usize {
        let col = self.set.evaluate(&f);
        let j = self.columns.len();
        let dup = match self.first_with.get(&col) {
            Some(&k) => Some(k),
            None => {
                self.first_with.insert(col.clone(), j);
                None
            }
        };
        self.duplicate_of.push(dup);
        self.columns.push(col);
        self.programs.push(f);
        self.log_priors.push(log_prior);
        j
    }

    pub fn set(&self) -> &LabeledSet {
        &self.set
    }

    pub fn num_rows(&self) -> usize {
        self.set.num_rows()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn labels(&self) -> &Bits {
        &self.labels
    }

    pub fn column(&self, j: usize) -> &Bits {
        &self.columns[j]
    }

    pub fn program(&self, j: usize) -> &FeatureProgram {
        &self.programs[j]
    }

    pub fn programs(&self) -> &[FeatureProgram] {
        &self.programs
    }

    pub fn log_prior(&self, j: usize) -> f64 {
        self.log_priors[j]
    }

    /// Earlier column with identical values, if any. Such columns are never
    /// offered to the tree learner.
    pub fn duplicate_of(&self, j: usize) -> Option<usize> {
        self.duplicate_of[j]
    }

    pub fn columns(&self) -> &[Bits] {
        &self.columns
    }

    /// View for the tree learner; duplicate columns are excluded.
    pub fn tree_data(&self) -> TreeData<'_> {
        TreeData {
            labels: &self.labels,
            columns: &self.columns,
            duplicate_of: Some(&self.duplicate_of),
        }
    }

    pub fn get(&self, row: usize, j: usize) -> bool {
        self.columns[j].get(row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::Condition;
    use crate::grid::Cell;

    #[test]
    fn anti_demo_counts() {
        let s = GridState::filled(3, 3, Cell::Empty).unwrap();
        let set = make_anti_demos(&[(s, Action::new(1, 1))]).unwrap();
        assert_eq!(set.num_negatives(), 8);
        assert_eq!(set.negatives().count(), 8);
        let t = GridState::filled(4, 5, Cell::Empty).unwrap();
        let set = make_anti_demos(&[(t.clone(), Action::new(0, 0)), (t, Action::new(3, 4))]).unwrap();
        assert_eq!(set.num_negatives(), 38);
        assert_eq!(set.labels().count(), 2);
    }

    #[test]
    fn anti_demo_errors() {
        assert!(matches!(make_anti_demos(&[]), Err(LearnError::NoDemos)));
        let s = GridState::filled(2, 2, Cell::Empty).unwrap();
        assert!(matches!(
            make_anti_demos(&[(s, Action::new(2, 0))]),
            Err(LearnError::ActionOutOfBounds { .. })
        ));
    }

    #[test]
    fn columns_match_evaluation() {
        let s = GridState::from_glyphs(&["..", "I.", "I."]).unwrap();
        let set = make_anti_demos(&[(s.clone(), Action::new(1, 0))]).unwrap();
        let mut x = DesignMatrix::new(set);
        let f = FeatureProgram::AtActionCell(Condition::cell_is_value(Cell::Token));
        let g = FeatureProgram::AtCellWithValue(Cell::Token, Condition::cell_is_value(Cell::Token));
        let j = x.push(f.clone(), -1.0);
        let k = x.push(g.clone(), -2.0);
        for (r, a) in s.actions().enumerate() {
            assert_eq!(x.get(r, j), f.evaluate(&s, a));
            assert_eq!(x.get(r, k), g.evaluate(&s, a));
        }
        let again = x.push(f, -3.0);
        assert_eq!(x.duplicate_of(again), Some(j));
    }
}
