use serde::Serialize;

use lpp_core::learner::DnfPolicy;

/// Size figures for one policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolicyStats {
    pub programs: usize,
    pub calls: usize,
    pub depth: usize,
}

pub fn policy_stats(pi: &DnfPolicy) -> PolicyStats {
    PolicyStats {
        programs: pi.num_literals(),
        calls: pi.literals().map(|l| l.program.size()).sum(),
        depth: pi.literals().map(|l| l.program.depth()).max().unwrap_or(0),
    }
}
