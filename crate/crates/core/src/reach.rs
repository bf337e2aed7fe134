//! Co-VS reachability and coverability for weighted ODCAs.
//!
//! Both problems reduce to a search on a bounded unfolding: a run that
//! witnesses the property never needs a counter value above a bound
//! polynomial in `K = |Q|·|C|`, so the unfolding up to that bound loses no
//! witness.

use crate::error::{Error, Result};
use crate::exactla::{LinalgError, VectorSpace};
use crate::model::{embed_config, lift_space, unfold, unfold_control, Configuration, WeightedOdca, Word};
use crate::wa_algo::{wa_covs_reach, TargetSpec};

/// `max(n, m) + K²`: a bound on the counter along a minimal reachability
/// witness from counter `n` to counter `m`.
pub fn counter_bound_reach(odca: &WeightedOdca, n: usize, m: usize) -> usize {
    let k = odca.k();
    n.max(m) + k * k
}

/// `max(n, K) + K²`: the corresponding bound for coverability.
pub fn counter_bound_cover(odca: &WeightedOdca, n: usize) -> usize {
    let k = odca.k();
    n.max(k) + k * k
}

/// `K³ + max(n, m)·K`: a bound on the length of a minimal reachability witness.
pub fn witness_length_bound(odca: &WeightedOdca, n: usize, m: usize) -> usize {
    let k = odca.k();
    k * k * k + n.max(m) * k
}

fn check_query(odca: &WeightedOdca, c: &Configuration, v: &VectorSpace, s: &[usize]) -> Result<()> {
    odca.check_config(c)?;
    if v.ambient_dim() != odca.fsm_size {
        return Err(LinalgError::DimensionMismatch {
            context: "target space",
            expected: odca.fsm_size,
            found: v.ambient_dim(),
        }
        .into());
    }
    if let Some(&p) = s.iter().find(|&&p| p >= odca.counter.len()) {
        return Err(Error::UnknownCounterState(p));
    }
    Ok(())
}

/// The (length, lexicographic)-least word `z` with `c →z (x′, p′, m)`,
/// `p′ ∈ s` and `x′ ∉ v`, if any.
///
/// The search covers every run whose counter stays within `bound_override`,
/// or within [`counter_bound_reach`] by default, which makes the answer
/// complete.
pub fn covs_reach(
    odca: &WeightedOdca,
    c: &Configuration,
    v: &VectorSpace,
    s: &[usize],
    m: usize,
    bound_override: Option<usize>,
) -> Result<Option<Word>> {
    check_query(odca, c, v, s)?;
    let bound = bound_override.unwrap_or_else(|| counter_bound_reach(odca, c.n, m));
    for value in [c.n, m] {
        if value > bound {
            return Err(Error::CounterOutOfRange { counter: value, bound });
        }
    }
    let cwa = unfold(odca, bound);
    let (start, x) = embed_config(odca, c, bound)?;
    let lifted = lift_space(v, m, bound)?;
    let mut targets = TargetSpec::new();
    for &p in s {
        targets.insert(unfold_control(p, m, bound), lifted.clone());
    }
    let witness = wa_covs_reach(&cwa, start, &x, &targets)?;
    if let (Some(w), None) = (&witness, bound_override) {
        debug_assert!(w.len() <= witness_length_bound(odca, c.n, m));
        debug_assert!(crate::model::run(odca, c, w).is_ok_and(|r| r.max_counter < bound));
    }
    Ok(witness)
}

/// The (length, lexicographic)-least word leading from `c` to a counter
/// state in `s`, at any counter value, with a vector outside `v`.
pub fn covs_cover(
    odca: &WeightedOdca,
    c: &Configuration,
    v: &VectorSpace,
    s: &[usize],
    bound_override: Option<usize>,
) -> Result<Option<Word>> {
    check_query(odca, c, v, s)?;
    let bound = bound_override.unwrap_or_else(|| counter_bound_cover(odca, c.n));
    if c.n > bound {
        return Err(Error::CounterOutOfRange { counter: c.n, bound });
    }
    let cwa = unfold(odca, bound);
    let (start, x) = embed_config(odca, c, bound)?;
    let mut targets = TargetSpec::new();
    for level in 0..=bound {
        let lifted = lift_space(v, level, bound)?;
        for &p in s {
            targets.insert(unfold_control(p, level, bound), lifted.clone());
        }
    }
    wa_covs_reach(&cwa, start, &x, &targets)
}
