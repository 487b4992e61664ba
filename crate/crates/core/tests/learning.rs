use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lpp_core::dsl::{Condition, FeatureProgram};
use lpp_core::grammar::Pcfg;
use lpp_core::grid::{Action, Cell, GridState, Offset};
use lpp_core::learner::{
    log_likelihood_with, lpp_learn, softmax, vpi_learn, Component, Demo, DnfPolicy, LearnConfig, Likelihood,
    NoiseModel, PosteriorMixture,
};

fn grammar() -> Pcfg {
    Pcfg::new(vec![Cell::Empty, Cell::Token, Cell::Wall, Cell::Offscreen])
}

/// Clicks the cell to the left of the only token.
fn target() -> FeatureProgram {
    FeatureProgram::AtActionCell(Condition::shifted(Offset::new(1, 0), Condition::cell_is_value(Cell::Token)))
}

/// Random grids with walls scattered about and a single token off the left
/// edge, so exactly one cell satisfies the target program.
fn states(n: usize, seed: u64) -> Vec<GridState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (h, w) = (rng.gen_range(3..7), rng.gen_range(3..7));
            let mut s = GridState::filled(h, w, Cell::Empty).unwrap();
            for r in 0..h {
                for c in 0..w {
                    if rng.gen_bool(0.2) {
                        s.set(r, c, Cell::Wall);
                    }
                }
            }
            s.set(rng.gen_range(0..h), rng.gen_range(1..w), Cell::Token);
            s
        })
        .collect()
}

fn demos(states: &[GridState]) -> Vec<Demo> {
    let f = target();
    states
        .iter()
        .map(|s| {
            let hits: Vec<Action> = s.actions().filter(|&a| f.evaluate(s, a)).collect();
            assert_eq!(hits.len(), 1);
            (s.clone(), hits[0])
        })
        .collect()
}

fn learn_cfg(budget: usize) -> LearnConfig {
    LearnConfig {
        max_programs: budget,
        ..LearnConfig::default()
    }
}

fn agrees_with_target(pi: &DnfPolicy, states: &[GridState]) -> bool {
    let f = target();
    states
        .iter()
        .all(|s| s.actions().all(|a| pi.holds(s, a) == f.evaluate(s, a)))
}

#[test]
fn lpp_recovers_a_single_program_expert() {
    let st = states(8, 1);
    let out = lpp_learn(&demos(&st), &grammar(), &learn_cfg(500)).unwrap();
    let map = out.mixture.map_policy().expect("a consistent policy");
    assert_eq!(map.log_likelihood, 0.0);
    assert!(agrees_with_target(&map.policy, &st), "{}", map.policy);
}

#[test]
fn vpi_recovers_a_single_program_expert() {
    let st = states(8, 1);
    let out = vpi_learn(&demos(&st), &grammar(), &learn_cfg(500)).unwrap();
    let map = out.mixture.map_policy().expect("a consistent policy");
    assert!(agrees_with_target(&map.policy, &st), "{}", map.policy);
}

#[test]
fn mixture_weights_are_the_softmax_of_scores() {
    let st = states(6, 2);
    // noise lets near-misses in, so the mixture holds several components
    let cfg = LearnConfig {
        noise: NoiseModel::new(0.1).unwrap(),
        ..learn_cfg(300)
    };
    let out = lpp_learn(&demos(&st), &grammar(), &cfg).unwrap();
    let m = &out.mixture;
    assert!(m.len() > 1);
    let total: f64 = m.weights().iter().sum();
    assert!((total - 1.0).abs() <= 1e-12);
    let scores: Vec<f64> = m.components().iter().map(Component::log_posterior).collect();
    for (w, s) in m.weights().iter().zip(softmax(&scores)) {
        assert!((w - s).abs() <= 1e-12);
    }
    assert!(scores.windows(2).all(|p| p[0] >= p[1]));
}

#[test]
fn exact_noise_admits_only_consistent_policies() {
    let st = states(6, 3);
    let ds = demos(&st);
    let out = lpp_learn(&ds, &grammar(), &learn_cfg(300)).unwrap();
    for c in out.mixture.components() {
        assert!(c.log_likelihood.is_finite());
        for (s, a) in &ds {
            assert!(c.policy.holds(s, *a), "{} misses a demo", c.policy);
        }
        let ll = log_likelihood_with(&c.policy, &ds, NoiseModel::exact(), Likelihood::Covered);
        assert!((ll - c.log_likelihood).abs() < 1e-9);
    }
}

#[test]
fn admission_threshold_never_drops() {
    let st = states(6, 4);
    for budget in [50, 400] {
        let out = lpp_learn(&demos(&st), &grammar(), &learn_cfg(budget)).unwrap();
        assert!(out.threshold_trace.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(out.threshold_trace.len(), out.enumerated);
    }
}

#[test]
fn same_seed_same_mixture() {
    let st = states(6, 5);
    let ds = demos(&st);
    let cfg = LearnConfig {
        seed: 11,
        ..learn_cfg(300)
    };
    let a = lpp_learn(&ds, &grammar(), &cfg).unwrap();
    let b = lpp_learn(&ds, &grammar(), &cfg).unwrap();
    assert_eq!(a.mixture.to_json(), b.mixture.to_json());
    assert_eq!(a.threshold_trace, b.threshold_trace);
    let va = vpi_learn(&ds, &grammar(), &cfg).unwrap();
    let vb = vpi_learn(&ds, &grammar(), &cfg).unwrap();
    assert_eq!(va.mixture.to_json(), vb.mixture.to_json());
}

#[test]
fn likelihood_modes_differ_only_on_empty_selections() {
    let st = states(4, 6);
    let ds = demos(&st);
    // selects nothing on these grids: no cell holds a sheep
    let never = DnfPolicy::single(FeatureProgram::AtActionCell(Condition::cell_is_value(Cell::Sheep)));
    let fallback = log_likelihood_with(&never, &ds, NoiseModel::exact(), Likelihood::Fallback);
    let want: f64 = ds.iter().map(|(s, _)| -(s.num_cells() as f64).ln()).sum();
    assert!((fallback - want).abs() < 1e-9);
    assert_eq!(
        log_likelihood_with(&never, &ds, NoiseModel::exact(), Likelihood::Covered),
        f64::NEG_INFINITY
    );
    let exact = DnfPolicy::single(target());
    for mode in [Likelihood::Covered, Likelihood::Fallback] {
        assert_eq!(log_likelihood_with(&exact, &ds, NoiseModel::exact(), mode), 0.0);
    }
}

fn literal_pool() -> Vec<FeatureProgram> {
    grammar().enumerate().take(40).map(|p| p.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifting_every_score_keeps_the_map_action(
        picks in proptest::collection::vec((0usize..40, any::<bool>(), -20.0f64..0.0), 1..6),
        shift in -50.0f64..50.0,
        seed in 0u64..1000,
    ) {
        let pool = literal_pool();
        let mut a = PosteriorMixture::new(8);
        let mut b = PosteriorMixture::new(8);
        for (i, neg, score) in picks {
            let p = DnfPolicy::new(vec![vec![lpp_core::learner::Literal::new(pool[i].clone(), neg)]]).unwrap();
            a.offer(Component { policy: p.clone(), log_prior: score, log_likelihood: 0.0 });
            b.offer(Component { policy: p, log_prior: score + shift, log_likelihood: 0.0 });
        }
        for s in states(5, seed) {
            prop_assert_eq!(a.map_action(&s), b.map_action(&s));
        }
    }
}
