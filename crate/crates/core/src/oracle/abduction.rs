use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::oracle::solver::{answer_sets, SolveLimits};
use crate::rewrite::AbductionInstance;

pub const MAX_ABDUCTION_ATOMS: usize = 12;
pub const MAX_HYPOTHESES: usize = 8;

/// Searches `E ⊆ H` by increasing size, then lexicographically, for one such
/// that every answer set of `Π ∪ E` contains `M`. With `require_consistent`,
/// `Π ∪ E` must also have an answer set.
pub fn abduce_bruteforce(inst: &AbductionInstance, require_consistent: bool) -> Result<Option<BTreeSet<usize>>> {
    let n = inst.program.atoms.len();
    if n > MAX_ABDUCTION_ATOMS {
        return Err(Error::TooManyAtoms {
            count: n,
            limit: MAX_ABDUCTION_ATOMS,
        });
    }
    let hyps: Vec<usize> = inst.hypotheses.iter().copied().collect();
    if hyps.len() > MAX_HYPOTHESES {
        return Err(Error::TooManyAtoms {
            count: hyps.len(),
            limit: MAX_HYPOTHESES,
        });
    }
    let mut masks: Vec<u32> = (0..1u32 << hyps.len()).collect();
    masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
    let limits = SolveLimits {
        max_atoms: MAX_ABDUCTION_ATOMS,
    };
    for mask in masks {
        let e: BTreeSet<usize> = (0..hyps.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| hyps[i])
            .collect();
        let sets = answer_sets(&inst.with_facts(&e), &limits)?;
        if require_consistent && sets.is_empty() {
            continue;
        }
        if sets.iter().all(|s| inst.manifestations.is_subset(s)) {
            return Ok(Some(e));
        }
    }
    Ok(None)
}
