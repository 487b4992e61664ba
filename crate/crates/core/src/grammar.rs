//! Probabilistic grammar prior over feature-detector programs, and best-first
//! enumeration of programs in non-increasing prior probability.
//!
//! ```text
//! P -> at_cell_with_value(V, C) 0.5 | at_action_cell(C) 0.5
//! C -> shifted(O, B) 0.5            | B 0.5
//! B -> cell_is_value(V) 0.5         | scanning(O, C, C) 0.5
//! O -> (N, 0) 0.25 | (0, N) 0.25    | (N, N) 0.5
//! N -> n 0.5 | -n 0.5               where n ~ 0.99 * 0.01^(n-1), n >= 1
//! V -> v                            1/|V| for each value of the game
//! ```

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::dsl::{Condition, FeatureProgram};
use crate::grid::{Cell, Game, Offset};

/// Priors closer than this are treated as tied and ordered by program text.
pub const TIE_TOLERANCE: f64 = 1e-9;

const NAT_FIRST: f64 = 0.99;
const NAT_DECAY: f64 = 0.01;
const LN_HALF: f64 = -std::f64::consts::LN_2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("value `{0}` is not in the grammar's vocabulary")]
    UnknownValue(Cell),
    #[error("`{0}` has no derivation in the grammar: {1}")]
    NotDerivable(String, &'static str),
}

/// Exponents of the elementary probabilities a derivation multiplies together.
///
/// Every rule probability is a product of `0.5`, `1/|V|`, `0.99` and `0.01`,
/// so two derivations with the same counts get bit-identical log priors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
struct Factors {
    half: u32,
    value: u32,
    nat_first: u32,
    nat_decay: u32,
}

impl Factors {
    const fn new(half: u32, value: u32, nat_first: u32, nat_decay: u32) -> Self {
        Factors {
            half,
            value,
            nat_first,
            nat_decay,
        }
    }

    fn add(self, o: Factors) -> Factors {
        Factors {
            half: self.half + o.half,
            value: self.value + o.value,
            nat_first: self.nat_first + o.nat_first,
            nat_decay: self.nat_decay + o.nat_decay,
        }
    }

    fn nat(n: u32) -> Factors {
        Factors::new(0, 0, 1, n - 1)
    }
}

/// The grammar for one game's value set.
#[derive(Debug, Clone, PartialEq)]
pub struct Pcfg {
    values: Vec<Cell>,
    ln_value: f64,
}

impl Pcfg {
    pub fn new(values: Vec<Cell>) -> Self {
        assert!(!values.is_empty(), "grammar needs at least one value");
        let ln_value = -(values.len() as f64).ln();
        Pcfg { values, ln_value }
    }

    /// Grammar over the game's vocabulary plus the off-grid token.
    pub fn for_game(game: Game) -> Self {
        Pcfg::new(game.dsl_values())
    }

    pub fn values(&self) -> &[Cell] {
        &self.values
    }

    fn log_of(&self, f: Factors) -> f64 {
        f.half as f64 * 0.5f64.ln()
            + f.value as f64 * self.ln_value
            + f.nat_first as f64 * NAT_FIRST.ln()
            + f.nat_decay as f64 * NAT_DECAY.ln()
    }

    /// Production probabilities for every nonterminal; the natural-number
    /// rule is truncated after `nat_terms` terms.
    pub fn production_table(&self, nat_terms: u32) -> Vec<(&'static str, Vec<f64>)> {
        let v = 1.0 / self.values.len() as f64;
        vec![
            ("P", vec![0.5, 0.5]),
            ("C", vec![0.5, 0.5]),
            ("B", vec![0.5, 0.5]),
            ("O", vec![0.25, 0.25, 0.5]),
            ("N", vec![0.5, 0.5]),
            (
                "Nat",
                (1..=nat_terms)
                    .map(|i| NAT_FIRST * NAT_DECAY.powi(i as i32 - 1))
                    .collect(),
            ),
            ("V", vec![v; self.values.len()]),
        ]
    }

    fn value_factor(&self, v: Cell) -> Result<Factors, GrammarError> {
        if self.values.contains(&v) {
            Ok(Factors::new(0, 1, 0, 0))
        } else {
            Err(GrammarError::UnknownValue(v))
        }
    }

    fn number_factors(n: i32) -> Factors {
        // sign choice, then magnitude
        Factors::new(1, 0, 0, 0).add(Factors::nat(n.unsigned_abs()))
    }

    fn offset_factors(o: Offset, ctx: &str) -> Result<Factors, GrammarError> {
        match (o.x, o.y) {
            (0, 0) => Err(GrammarError::NotDerivable(
                ctx.to_string(),
                "zero offset",
            )),
            (x, 0) => Ok(Factors::new(2, 0, 0, 0).add(Pcfg::number_factors(x))),
            (0, y) => Ok(Factors::new(2, 0, 0, 0).add(Pcfg::number_factors(y))),
            (x, y) => Ok(Factors::new(1, 0, 0, 0)
                .add(Pcfg::number_factors(x))
                .add(Pcfg::number_factors(y))),
        }
    }

    fn base_factors(&self, c: &Condition) -> Result<Factors, GrammarError> {
        match c {
            Condition::CellIsValue(v) => Ok(Factors::new(1, 0, 0, 0).add(self.value_factor(*v)?)),
            Condition::Scanning(o, a, b) => Ok(Factors::new(1, 0, 0, 0)
                .add(Pcfg::offset_factors(*o, &c.to_string())?)
                .add(self.condition_factors(a)?)
                .add(self.condition_factors(b)?)),
            Condition::Shifted(..) => Err(GrammarError::NotDerivable(
                c.to_string(),
                "shifted must wrap cell_is_value or scanning",
            )),
        }
    }

    fn condition_factors(&self, c: &Condition) -> Result<Factors, GrammarError> {
        match c {
            Condition::Shifted(o, inner) => Ok(Factors::new(1, 0, 0, 0)
                .add(Pcfg::offset_factors(*o, &c.to_string())?)
                .add(self.base_factors(inner)?)),
            _ => Ok(Factors::new(1, 0, 0, 0).add(self.base_factors(c)?)),
        }
    }

    fn program_factors(&self, f: &FeatureProgram) -> Result<Factors, GrammarError> {
        match f {
            FeatureProgram::AtActionCell(c) => {
                Ok(Factors::new(1, 0, 0, 0).add(self.condition_factors(c)?))
            }
            FeatureProgram::AtCellWithValue(v, c) => Ok(Factors::new(1, 0, 0, 0)
                .add(self.value_factor(*v)?)
                .add(self.condition_factors(c)?)),
        }
    }

    /// Log-probability of the program's unique derivation.
    pub fn log_prior(&self, f: &FeatureProgram) -> Result<f64, GrammarError> {
        Ok(self.log_of(self.program_factors(f)?))
    }

    /// Programs in non-increasing prior order.
    pub fn enumerate(&self) -> Enumerator {
        Enumerator::new(self.clone())
    }
}

impl Pcfg {
    /// Every program whose prior is at least `floor`, found by plain recursion
    /// over the rules rather than the best-first queue. Unordered.
    pub fn programs_above(&self, floor: f64) -> Vec<(FeatureProgram, f64)> {
        let slack = floor - 1e-9;
        let lv = self.ln_value;
        let mut out: Vec<FeatureProgram> = self
            .conditions_above(slack - LN_HALF)
            .into_iter()
            .map(|(c, _)| FeatureProgram::AtActionCell(c))
            .collect();
        for &v in &self.values {
            for (c, _) in self.conditions_above(slack - LN_HALF - lv) {
                out.push(FeatureProgram::AtCellWithValue(v, c));
            }
        }
        out.into_iter()
            .map(|f| {
                let lp = self.log_prior(&f).expect("built from the grammar");
                (f, lp)
            })
            .filter(|p| p.1 >= floor - TIE_TOLERANCE)
            .collect()
    }

    fn numbers_above(floor: f64) -> Vec<(i32, f64)> {
        let mut out = Vec::new();
        for n in 1.. {
            let lp = LN_HALF + nat_log_prob(n as u32);
            if lp < floor {
                break;
            }
            out.push((n, lp));
            out.push((-n, lp));
        }
        out
    }

    fn offsets_above(floor: f64) -> Vec<(Offset, f64)> {
        let mut out = Vec::new();
        for (n, lp) in Pcfg::numbers_above(floor - 2.0 * LN_HALF) {
            out.push((Offset::new(n, 0), 2.0 * LN_HALF + lp));
            out.push((Offset::new(0, n), 2.0 * LN_HALF + lp));
        }
        for (a, la) in Pcfg::numbers_above(floor - LN_HALF) {
            for (b, lb) in Pcfg::numbers_above(floor - LN_HALF - la) {
                out.push((Offset::new(a, b), LN_HALF + la + lb));
            }
        }
        out
    }

    fn bases_above(&self, floor: f64) -> Vec<(Condition, f64)> {
        let mut out = Vec::new();
        if LN_HALF + self.ln_value >= floor {
            out.extend(self.values.iter().map(|&v| (Condition::cell_is_value(v), LN_HALF + self.ln_value)));
        }
        for (o, lo) in Pcfg::offsets_above(floor - LN_HALF) {
            for (a, la) in self.conditions_above(floor - LN_HALF - lo) {
                for (b, lb) in self.conditions_above(floor - LN_HALF - lo - la) {
                    out.push((Condition::scanning(o, a.clone(), b), LN_HALF + lo + la + lb));
                }
            }
        }
        out
    }

    fn conditions_above(&self, floor: f64) -> Vec<(Condition, f64)> {
        if floor > 0.0 {
            return Vec::new();
        }
        let mut out: Vec<(Condition, f64)> = self
            .bases_above(floor - LN_HALF)
            .into_iter()
            .map(|(b, lb)| (b, LN_HALF + lb))
            .collect();
        for (o, lo) in Pcfg::offsets_above(floor - LN_HALF) {
            for (b, lb) in self.bases_above(floor - LN_HALF - lo) {
                out.push((Condition::shifted(o, b), LN_HALF + lo + lb));
            }
        }
        out
    }
}

/// Log-probability a single natural number contributes (`n >= 1`).
pub fn nat_log_prob(n: u32) -> f64 {
    NAT_FIRST.ln() + (n - 1) as f64 * NAT_DECAY.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    Program,
    Cond,
    Base,
    Off,
    Num,
    Nat,
    Val,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Choice {
    AtCellWithValue,
    AtActionCell,
    Shifted,
    Plain,
    CellIsValue,
    Scanning,
    OffX,
    OffY,
    OffXY,
    Pos,
    Neg,
    Nat(u32),
    Val(u16),
}

fn choice_factors(c: Choice) -> Factors {
    match c {
        Choice::OffX | Choice::OffY => Factors::new(2, 0, 0, 0),
        Choice::Nat(n) => Factors::nat(n),
        Choice::Val(_) => Factors::new(0, 1, 0, 0),
        _ => Factors::new(1, 0, 0, 0),
    }
}

/// Most probable completion of each nonterminal, found by fixed-point iteration.
fn completion_bounds(pcfg: &Pcfg) -> [Factors; 7] {
    let idx = |s: Sym| s as usize;
    let rules: Vec<(Sym, Factors, Vec<Sym>)> = vec![
        (Sym::Program, Factors::new(1, 0, 0, 0), vec![Sym::Val, Sym::Cond]),
        (Sym::Program, Factors::new(1, 0, 0, 0), vec![Sym::Cond]),
        (Sym::Cond, Factors::new(1, 0, 0, 0), vec![Sym::Off, Sym::Base]),
        (Sym::Cond, Factors::new(1, 0, 0, 0), vec![Sym::Base]),
        (Sym::Base, Factors::new(1, 0, 0, 0), vec![Sym::Val]),
        (
            Sym::Base,
            Factors::new(1, 0, 0, 0),
            vec![Sym::Off, Sym::Cond, Sym::Cond],
        ),
        (Sym::Off, Factors::new(2, 0, 0, 0), vec![Sym::Num]),
        (Sym::Off, Factors::new(1, 0, 0, 0), vec![Sym::Num, Sym::Num]),
        (Sym::Num, Factors::new(1, 0, 0, 0), vec![Sym::Nat]),
        (Sym::Nat, Factors::nat(1), vec![]),
        (Sym::Val, Factors::new(0, 1, 0, 0), vec![]),
    ];
    let mut best: [Option<Factors>; 7] = [None; 7];
    loop {
        let mut changed = false;
        for (lhs, base, rhs) in &rules {
            let Some(total) = rhs
                .iter()
                .try_fold(*base, |acc, s| best[idx(*s)].map(|b| acc.add(b)))
            else {
                continue;
            };
            let better = match best[idx(*lhs)] {
                None => true,
                Some(cur) => pcfg.log_of(total) > pcfg.log_of(cur),
            };
            if better {
                best[idx(*lhs)] = Some(total);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    best.map(|b| b.expect("every nonterminal has a finite derivation"))
}

#[derive(Debug, Clone)]
struct Partial {
    choices: Vec<Choice>,
    /// Pending nonterminals; the last element is expanded next.
    pending: Vec<Sym>,
    applied: Factors,
    priority: f64,
    /// The last choice was a natural number whose successor is not queued yet.
    nat_successor: bool,
}

struct Queued {
    priority: f64,
    seq: u64,
    item: Partial,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Best-first enumerator; yields `(program, log_prior)` forever.
pub struct Enumerator {
    pcfg: Pcfg,
    bounds: [Factors; 7],
    heap: BinaryHeap<Queued>,
    seq: u64,
    ready: VecDeque<(FeatureProgram, f64)>,
    emitted: usize,
}

impl Enumerator {
    fn new(pcfg: Pcfg) -> Self {
        let bounds = completion_bounds(&pcfg);
        let mut e = Enumerator {
            pcfg,
            bounds,
            heap: BinaryHeap::new(),
            seq: 0,
            ready: VecDeque::new(),
            emitted: 0,
        };
        let root = Partial {
            choices: Vec::new(),
            pending: vec![Sym::Program],
            applied: Factors::default(),
            priority: 0.0,
            nat_successor: false,
        };
        e.push(root);
        e
    }

    pub fn pcfg(&self) -> &Pcfg {
        &self.pcfg
    }

    /// Number of programs handed out so far.
    pub fn emitted(&self) -> usize {
        self.emitted
    }

    fn push(&mut self, mut item: Partial) {
        let bound = item
            .pending
            .iter()
            .fold(item.applied, |acc, s| acc.add(self.bounds[*s as usize]));
        item.priority = self.pcfg.log_of(bound);
        self.seq += 1;
        self.heap.push(Queued {
            priority: item.priority,
            seq: self.seq,
            item,
        });
    }

    fn child(&self, parent: &Partial, choice: Choice, expand: &[Sym]) -> Partial {
        let mut choices = parent.choices.clone();
        choices.push(choice);
        let mut pending = parent.pending.clone();
        pending.extend(expand.iter().rev());
        Partial {
            choices,
            pending,
            applied: parent.applied.add(choice_factors(choice)),
            priority: 0.0,
            nat_successor: matches!(choice, Choice::Nat(_)),
        }
    }

    fn expand(&mut self, mut item: Partial) {
        let sym = item.pending.pop().expect("expand called on complete item");
        let children: Vec<Partial> = match sym {
            Sym::Program => vec![
                self.child(&item, Choice::AtCellWithValue, &[Sym::Val, Sym::Cond]),
                self.child(&item, Choice::AtActionCell, &[Sym::Cond]),
            ],
            Sym::Cond => vec![
                self.child(&item, Choice::Shifted, &[Sym::Off, Sym::Base]),
                self.child(&item, Choice::Plain, &[Sym::Base]),
            ],
            Sym::Base => vec![
                self.child(&item, Choice::CellIsValue, &[Sym::Val]),
                self.child(&item, Choice::Scanning, &[Sym::Off, Sym::Cond, Sym::Cond]),
            ],
            Sym::Off => vec![
                self.child(&item, Choice::OffX, &[Sym::Num]),
                self.child(&item, Choice::OffY, &[Sym::Num]),
                self.child(&item, Choice::OffXY, &[Sym::Num, Sym::Num]),
            ],
            Sym::Num => vec![
                self.child(&item, Choice::Pos, &[Sym::Nat]),
                self.child(&item, Choice::Neg, &[Sym::Nat]),
            ],
            Sym::Nat => vec![self.child(&item, Choice::Nat(1), &[])],
            Sym::Val => (0..self.pcfg.values.len())
                .map(|i| self.child(&item, Choice::Val(i as u16), &[]))
                .collect(),
        };
        item.pending.push(sym);
        for c in children {
            self.push(c);
        }
    }

    fn successor_of_nat(&self, item: &Partial) -> Partial {
        let mut next = item.clone();
        let Some(Choice::Nat(n)) = next.choices.pop() else {
            unreachable!("successor requested for a non-numeric choice")
        };
        next.applied = Factors {
            nat_decay: next.applied.nat_decay + 1,
            ..next.applied
        };
        next.choices.push(Choice::Nat(n + 1));
        next.nat_successor = true;
        next
    }

    fn fill_batch(&mut self) {
        let mut level: Option<f64> = None;
        let mut batch: Vec<(String, FeatureProgram, f64)> = Vec::new();
        while let Some(top) = self.heap.peek() {
            if let Some(l) = level {
                if top.priority < l - TIE_TOLERANCE {
                    break;
                }
            }
            let Queued { mut item, .. } = self.heap.pop().expect("peeked");
            if item.nat_successor {
                item.nat_successor = false;
                let next = self.successor_of_nat(&item);
                self.push(next);
            }
            if item.pending.is_empty() {
                level.get_or_insert(item.priority);
                let program = build_program(&item.choices, &self.pcfg.values);
                let prior = self.pcfg.log_of(item.applied);
                batch.push((program.to_string(), program, prior));
            } else {
                self.expand(item);
            }
        }
        batch.sort_by(|a, b| a.0.cmp(&b.0));
        self.ready
            .extend(batch.into_iter().map(|(_, prog, prior)| (prog, prior)));
    }
}

impl Iterator for Enumerator {
    type Item = (FeatureProgram, f64);

    fn next(&mut self) -> Option<Self::Item> {
        while self.ready.is_empty() {
            self.fill_batch();
        }
        self.emitted += 1;
        self.ready.pop_front()
    }
}

fn build_program(choices: &[Choice], values: &[Cell]) -> FeatureProgram {
    let mut it = choices.iter().copied();
    let prog = read_program(&mut it, values);
    debug_assert!(it.next().is_none());
    prog
}

fn read_program(it: &mut impl Iterator<Item = Choice>, values: &[Cell]) -> FeatureProgram {
    match it.next() {
        Some(Choice::AtCellWithValue) => {
            let v = read_value(it, values);
            FeatureProgram::AtCellWithValue(v, read_condition(it, values))
        }
        Some(Choice::AtActionCell) => FeatureProgram::AtActionCell(read_condition(it, values)),
        other => unreachable!("bad program choice {other:?}"),
    }
}

fn read_condition(it: &mut impl Iterator<Item = Choice>, values: &[Cell]) -> Condition {
    match it.next() {
        Some(Choice::Shifted) => {
            let o = read_offset(it);
            Condition::shifted(o, read_base(it, values))
        }
        Some(Choice::Plain) => read_base(it, values),
        other => unreachable!("bad condition choice {other:?}"),
    }
}

fn read_base(it: &mut impl Iterator<Item = Choice>, values: &[Cell]) -> Condition {
    match it.next() {
        Some(Choice::CellIsValue) => Condition::CellIsValue(read_value(it, values)),
        Some(Choice::Scanning) => {
            let o = read_offset(it);
            let a = read_condition(it, values);
            let b = read_condition(it, values);
            Condition::scanning(o, a, b)
        }
        other => unreachable!("bad base choice {other:?}"),
    }
}

fn read_offset(it: &mut impl Iterator<Item = Choice>) -> Offset {
    match it.next() {
        Some(Choice::OffX) => Offset::new(read_number(it), 0),
        Some(Choice::OffY) => Offset::new(0, read_number(it)),
        Some(Choice::OffXY) => {
            let x = read_number(it);
            Offset::new(x, read_number(it))
        }
        other => unreachable!("bad offset choice {other:?}"),
    }
}

fn read_number(it: &mut impl Iterator<Item = Choice>) -> i32 {
    let sign = match it.next() {
        Some(Choice::Pos) => 1,
        Some(Choice::Neg) => -1,
        other => unreachable!("bad sign choice {other:?}"),
    };
    match it.next() {
        Some(Choice::Nat(n)) => sign * n as i32,
        other => unreachable!("bad magnitude choice {other:?}"),
    }
}

fn read_value(it: &mut impl Iterator<Item = Choice>, values: &[Cell]) -> Cell {
    match it.next() {
        Some(Choice::Val(i)) => values[i as usize],
        other => unreachable!("bad value choice {other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Cell::*;

    fn three() -> Pcfg {
        Pcfg::new(vec![Empty, Token, Offscreen])
    }

    fn civ(v: Cell) -> Condition {
        Condition::cell_is_value(v)
    }

    #[test]
    fn simplest_program_prior() {
        let f = FeatureProgram::AtActionCell(civ(Empty));
        let lp = three().log_prior(&f).unwrap();
        assert!((lp - (1.0f64 / 24.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn offset_prior_matches_rules() {
        let g = three();
        let base = FeatureProgram::AtActionCell(civ(Empty));
        let shifted =
            FeatureProgram::AtActionCell(Condition::shifted(Offset::new(0, -2), civ(Empty)));
        // shifted(O, B) instead of C -> B: the 0.5 of C -> shifted replaces C -> B,
        // so the difference is exactly the offset's probability.
        let diff = g.log_prior(&shifted).unwrap() - g.log_prior(&base).unwrap();
        assert!((diff - (0.25f64 * 0.5 * 0.0099).ln()).abs() < 1e-12);
        assert!((nat_log_prob(1) - 0.99f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unknown_value_and_underivable_shapes_are_errors() {
        let g = three();
        let f = FeatureProgram::AtActionCell(civ(Fence));
        assert_eq!(g.log_prior(&f), Err(GrammarError::UnknownValue(Fence)));
        let nested = FeatureProgram::AtActionCell(Condition::shifted(
            Offset::new(1, 0),
            Condition::shifted(Offset::new(1, 0), civ(Empty)),
        ));
        assert!(g.log_prior(&nested).is_err());
        let zero = FeatureProgram::AtActionCell(Condition::shifted(Offset::new(0, 0), civ(Empty)));
        assert!(g.log_prior(&zero).is_err());
    }

    #[test]
    fn productions_are_normalized() {
        for values in [vec![Empty, Offscreen], Game::Chase.dsl_values()] {
            for (name, probs) in Pcfg::new(values).production_table(40) {
                let total: f64 = probs.iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "{name}: {total}");
            }
        }
    }

    #[test]
    fn bounds_are_best_completions() {
        let g = three();
        let b = completion_bounds(&g);
        let lg = |f| g.log_of(f);
        assert!((lg(b[Sym::Nat as usize]) - 0.99f64.ln()).abs() < 1e-12);
        assert!((lg(b[Sym::Num as usize]) - 0.495f64.ln()).abs() < 1e-12);
        assert!((lg(b[Sym::Off as usize]) - (0.25f64 * 0.495).ln()).abs() < 1e-12);
        assert!((lg(b[Sym::Program as usize]) - (1.0f64 / 24.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_programs() {
        assert_eq!(three().enumerate().take(0).count(), 0);
    }

    #[test]
    fn first_programs_are_plain_action_checks() {
        let first: Vec<_> = three().enumerate().take(3).collect();
        let mut expected: Vec<String> = [Empty, Token, Offscreen]
            .iter()
            .map(|v| FeatureProgram::AtActionCell(civ(*v)).to_string())
            .collect();
        expected.sort();
        let got: Vec<String> = first.iter().map(|(p, _)| p.to_string()).collect();
        assert_eq!(got, expected);
        for (_, lp) in &first {
            assert!((lp - (1.0f64 / 24.0).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn emitted_prior_agrees_with_log_prior() {
        let g = Pcfg::for_game(Game::StopTheFall);
        for (p, lp) in g.enumerate().take(2000) {
            assert_eq!(g.log_prior(&p).unwrap(), lp, "{p}");
        }
    }
}
