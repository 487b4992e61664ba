//! Baseline that enumerates whole DNF policies best-first, with no Boolean
//! learning. Clause count and literals per clause are geometric (p = 0.5),
//! each literal's sign is a fair coin and its program is drawn from the grammar.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::{consider, make_anti_demos, DesignMatrix, Demo, LearnConfig, LearnError, LearnOutcome, PosteriorMixture};
use crate::dsl::FeatureProgram;
use crate::grammar::{Enumerator, Pcfg};

const LN_HALF: f64 = -std::f64::consts::LN_2;

/// Clauses of `(program index, negated)` in canonical order.
pub type IndexedDnf = Vec<Vec<(usize, bool)>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Successor {
    Clauses,
    Literals,
    Program,
}

#[derive(Debug, Clone)]
struct Item {
    clauses: Vec<Vec<(usize, bool)>>,
    /// Chosen clause count; zero until chosen.
    target_clauses: usize,
    /// Chosen literal count per started clause.
    target_lits: Vec<usize>,
    applied: f64,
    successor: Option<Successor>,
}

struct Queued {
    priority: f64,
    seq: u64,
    item: Item,
}

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Queued {
    fn cmp(&self, o: &Self) -> Ordering {
        self.priority
            .total_cmp(&o.priority)
            .then_with(|| o.seq.cmp(&self.seq))
    }
}

/// Yields distinct policies in non-increasing derivation probability.
pub struct PolicyEnumerator {
    stream: Enumerator,
    programs: Vec<(FeatureProgram, f64)>,
    heap: BinaryHeap<Queued>,
    seq: u64,
    seen: HashSet<IndexedDnf>,
}

impl PolicyEnumerator {
    pub fn new(g: &Pcfg) -> Self {
        let mut stream = g.enumerate();
        let first = stream.next().expect("grammar is infinite");
        let mut e = PolicyEnumerator {
            stream,
            programs: vec![first],
            heap: BinaryHeap::new(),
            seq: 0,
            seen: HashSet::new(),
        };
        e.push(Item {
            clauses: Vec::new(),
            target_clauses: 0,
            target_lits: Vec::new(),
            applied: 0.0,
            successor: None,
        });
        e
    }

    /// Programs pulled from the grammar so far, indexed as in yielded policies.
    pub fn programs(&self) -> &[(FeatureProgram, f64)] {
        &self.programs
    }

    fn program_log_prior(&mut self, k: usize) -> f64 {
        while self.programs.len() <= k {
            let next = self.stream.next().expect("grammar is infinite");
            self.programs.push(next);
        }
        self.programs[k].1
    }

    fn bound(&self, it: &Item) -> f64 {
        let lit = LN_HALF + self.programs[0].1;
        if it.target_clauses == 0 {
            return it.applied + 3.0 * LN_HALF + self.programs[0].1;
        }
        let open = match (it.target_lits.last(), it.clauses.last()) {
            (Some(&t), Some(c)) => t - c.len(),
            _ => 0,
        };
        let unstarted = it.target_clauses - it.target_lits.len();
        it.applied + open as f64 * lit + unstarted as f64 * (LN_HALF + lit)
    }

    fn push(&mut self, item: Item) {
        self.seq += 1;
        self.heap.push(Queued {
            priority: self.bound(&item),
            seq: self.seq,
            item,
        });
    }

    fn successor(&mut self, it: &Item, kind: Successor) -> Item {
        let mut next = it.clone();
        match kind {
            Successor::Clauses => {
                next.target_clauses += 1;
                next.applied += LN_HALF;
            }
            Successor::Literals => {
                *next.target_lits.last_mut().expect("clause started") += 1;
                next.applied += LN_HALF;
            }
            Successor::Program => {
                let lit = next
                    .clauses
                    .last_mut()
                    .and_then(|c| c.last_mut())
                    .expect("literal chosen");
                let k = lit.0;
                let (old, new) = (self.program_log_prior(k), self.program_log_prior(k + 1));
                lit.0 = k + 1;
                next.applied += new - old;
            }
        }
        next
    }

    fn expand(&mut self, it: Item) -> Option<Item> {
        if it.target_clauses == 0 {
            let mut c = it;
            c.target_clauses = 1;
            c.applied += LN_HALF;
            c.successor = Some(Successor::Clauses);
            self.push(c);
            return None;
        }
        let open = match (it.target_lits.last(), it.clauses.last()) {
            (Some(&t), Some(c)) => t > c.len(),
            _ => false,
        };
        if open {
            let lp = self.programs[0].1;
            for negated in [false, true] {
                let mut c = it.clone();
                c.clauses.last_mut().expect("clause started").push((0, negated));
                c.applied += LN_HALF + lp;
                c.successor = Some(Successor::Program);
                self.push(c);
            }
            return None;
        }
        if it.target_lits.len() < it.target_clauses {
            let mut c = it;
            c.target_lits.push(1);
            c.clauses.push(Vec::new());
            c.applied += LN_HALF;
            c.successor = Some(Successor::Literals);
            self.push(c);
            return None;
        }
        Some(it)
    }

    /// Next distinct policy and its derivation log-probability.
    pub fn next_policy(&mut self) -> (IndexedDnf, f64) {
        loop {
            let Queued { mut item, .. } = self.heap.pop().expect("policy space is infinite");
            if let Some(kind) = item.successor.take() {
                let mut s = self.successor(&item, kind);
                s.successor = Some(kind);
                self.push(s);
            }
            let applied = item.applied;
            if let Some(done) = self.expand(item) {
                let mut clauses = done.clauses;
                for c in &mut clauses {
                    c.sort_unstable();
                    c.dedup();
                }
                clauses.sort();
                clauses.dedup();
                if self.seen.insert(clauses.clone()) {
                    return (clauses, applied);
                }
            }
        }
    }
}

/// Enumerates `n` whole policies and keeps the best `k` under the same
/// scoring as [`super::lpp_learn`]. `cfg.max_programs` is the policy budget.
pub fn vpi_learn(demos: &[Demo], g: &Pcfg, cfg: &LearnConfig) -> Result<LearnOutcome, LearnError> {
    cfg.check()?;
    let set = make_anti_demos(demos)?;
    let mut x = DesignMatrix::new(set);
    let mut pe = PolicyEnumerator::new(g);
    let mut mixture = PosteriorMixture::new(cfg.k);
    let mut trace = Vec::with_capacity(cfg.max_programs);
    for _ in 0..cfg.max_programs {
        let (clauses, _) = pe.next_policy();
        let needed = clauses.iter().flatten().map(|&(j, _)| j).max().unwrap_or(0);
        while x.num_columns() <= needed {
            let (f, lp) = pe.programs()[x.num_columns()].clone();
            x.push(f, lp);
        }
        consider(&x, &clauses, g, cfg, &mut mixture)?;
        trace.push(mixture.min_log_posterior());
    }
    Ok(LearnOutcome {
        mixture,
        enumerated: cfg.max_programs,
        stopped_early: false,
        threshold_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;

    fn g() -> Pcfg {
        Pcfg::new(vec![Cell::Empty, Cell::Token, Cell::Offscreen])
    }

    #[test]
    fn first_policy_is_best_single_literal() {
        let mut pe = PolicyEnumerator::new(&g());
        let (p, lp) = pe.next_policy();
        assert_eq!(p, vec![vec![(0, false)]]);
        let want = 3.0 * LN_HALF + pe.programs()[0].1;
        assert!((lp - want).abs() < 1e-12);
    }

    #[test]
    fn policies_are_distinct_and_ordered() {
        let mut pe = PolicyEnumerator::new(&g());
        let mut prev = f64::INFINITY;
        let mut seen = HashSet::new();
        for _ in 0..2000 {
            let (p, lp) = pe.next_policy();
            assert!(lp <= prev + 1e-9);
            prev = lp;
            assert!(seen.insert(p));
        }
    }

    /// Independent oracle: list every derivation above a threshold by direct
    /// recursion over clause counts, literal counts, signs and program indices.
    #[test]
    fn matches_threshold_oracle() {
        let grammar = g();
        let programs: Vec<f64> = grammar.enumerate().take(3000).map(|p| p.1).collect();
        // admits two-literal policies and single literals well down the program list
        let threshold = 5.0 * LN_HALF + 2.0 * programs[0] - 0.5;
        assert!(programs[programs.len() - 1] + 3.0 * LN_HALF < threshold);
        fn clauses_rec(
            remaining: usize,
            lp: f64,
            thr: f64,
            progs: &[f64],
            cur: &mut Vec<Vec<(usize, bool)>>,
            out: &mut Vec<(IndexedDnf, f64)>,
        ) {
            if remaining == 0 {
                let mut c = cur.clone();
                for cl in &mut c {
                    cl.sort_unstable();
                    cl.dedup();
                }
                c.sort();
                c.dedup();
                out.push((c, lp));
                return;
            }
            let mut n = 1;
            loop {
                let lp_n = lp + n as f64 * LN_HALF;
                if lp_n + n as f64 * (LN_HALF + progs[0]) < thr {
                    break;
                }
                let mut lits = Vec::new();
                lits_rec(n, lp_n, thr, progs, &mut lits, &mut |lits, lp2| {
                    cur.push(lits.to_vec());
                    clauses_rec(remaining - 1, lp2, thr, progs, cur, out);
                    cur.pop();
                });
                n += 1;
            }
        }
        fn lits_rec(
            n: usize,
            lp: f64,
            thr: f64,
            progs: &[f64],
            lits: &mut Vec<(usize, bool)>,
            k: &mut dyn FnMut(&[(usize, bool)], f64),
        ) {
            if n == 0 {
                k(lits, lp);
                return;
            }
            for (i, &p) in progs.iter().enumerate() {
                let lp2 = lp + LN_HALF + p;
                if lp2 + (n - 1) as f64 * (LN_HALF + progs[0]) < thr {
                    break;
                }
                for neg in [false, true] {
                    lits.push((i, neg));
                    lits_rec(n - 1, lp2, thr, progs, lits, k);
                    lits.pop();
                }
            }
        }
        let mut derivations = Vec::new();
        let mut m = 1;
        loop {
            let lp = m as f64 * LN_HALF;
            if lp + m as f64 * (2.0 * LN_HALF + programs[0]) < threshold {
                break;
            }
            clauses_rec(m, lp, threshold, &programs, &mut Vec::new(), &mut derivations);
            m += 1;
        }
        let mut expected: HashSet<IndexedDnf> = HashSet::new();
        for (c, lp) in &derivations {
            if *lp >= threshold {
                expected.insert(c.clone());
            }
        }
        let mut pe = PolicyEnumerator::new(&grammar);
        let mut got = HashSet::new();
        loop {
            let (p, lp) = pe.next_policy();
            if lp < threshold - 1e-9 {
                break;
            }
            got.insert(p);
        }
        assert!(!expected.is_empty());
        assert_eq!(got, expected);
    }
}
