//! Equivalence of weighted ODCAs with minimal counterexamples.
//!
//! Two machines are compared on their unfoldings up to a common counter
//! bound. A distinguishing word whose runs stay within the bound is a
//! genuine counterexample; with the default bound every counterexample has
//! such a representative, so the verdict is complete. Smaller bounds are
//! allowed for practical use and reported as incomplete.

use std::time::Instant;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::model::{embed_config, eval_from, unfold, Configuration, WeightedOdca, Word};
use crate::wa_algo::{product_search, DeadMode, SearchStats};

/// Outcome of an equivalence check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivResult {
    Equivalent,
    NotEquivalent,
}

/// An equivalence verdict together with the bound it was computed under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivVerdict {
    pub result: EquivResult,
    pub witness: Option<Word>,
    pub bound_used: usize,
    /// The bound is at least [`theoretical_counter_bound`].
    pub complete: bool,
}

impl EquivVerdict {
    pub fn is_equivalent(&self) -> bool {
        self.result == EquivResult::Equivalent
    }
}

/// Options for [`odca_equiv_with`].
#[derive(Clone, Debug)]
pub struct EquivOptions {
    pub bound: Option<usize>,
    pub deadline: Option<Instant>,
    /// Largest admissible number of weighted states of one unfolding.
    pub max_unfolded_states: usize,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            bound: None,
            deadline: None,
            max_unfolded_states: 1_000_000,
        }
    }
}

impl EquivOptions {
    pub fn with_bound(bound: usize) -> Self {
        EquivOptions {
            bound: Some(bound),
            ..Self::default()
        }
    }
}

/// `84·K²⁴`, a counter bound beyond which a minimal distinguishing run
/// never needs to go.
pub fn theoretical_counter_bound(k: usize) -> BigUint {
    BigUint::from(84u32) * BigUint::from(k).pow(24)
}

/// The common size parameter of two machines: the largest of their state
/// and counter state counts.
pub fn common_k(a: &WeightedOdca, b: &WeightedOdca) -> usize {
    a.fsm_size.max(a.counter.len()).max(b.fsm_size).max(b.counter.len())
}

/// Whether a search up to counter `bound` is complete for this pair.
pub fn bound_is_complete(a: &WeightedOdca, b: &WeightedOdca, bound: usize) -> bool {
    BigUint::from(bound) >= theoretical_counter_bound(common_k(a, b))
}

fn check_alphabets(a: &WeightedOdca, b: &WeightedOdca) -> Result<()> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch {
            left: a.alphabet.symbols().to_vec(),
            right: b.alphabet.symbols().to_vec(),
        });
    }
    Ok(())
}

fn resolve_bound(a: &WeightedOdca, b: &WeightedOdca, opts: &EquivOptions) -> Result<(usize, bool)> {
    let theoretical = theoretical_counter_bound(common_k(a, b));
    let bound = match opts.bound {
        Some(bound) => bound,
        None => usize::try_from(&theoretical).map_err(|_| Error::ResourceCap {
            what: "unfolding",
            requested: format!("counter bound {theoretical}"),
            cap: opts.max_unfolded_states,
        })?,
    };
    let complete = BigUint::from(bound) >= theoretical;
    for m in [a, b] {
        let size = (bound as u128 + 1) * m.fsm_size.max(m.counter.len()) as u128;
        if size > opts.max_unfolded_states as u128 {
            return Err(Error::ResourceCap {
                what: "unfolding",
                requested: format!("{size} states at counter bound {bound}"),
                cap: opts.max_unfolded_states,
            });
        }
    }
    Ok((bound, complete))
}

/// Compares the two machines from the given configurations, both at
/// counter zero.
pub fn config_equiv_with(
    a: &WeightedOdca,
    conf_a: &Configuration,
    b: &WeightedOdca,
    conf_b: &Configuration,
    opts: &EquivOptions,
) -> Result<EquivVerdict> {
    check_alphabets(a, b)?;
    for (m, c) in [(a, conf_a), (b, conf_b)] {
        m.check_config(c)?;
        if c.n != 0 {
            return Err(Error::CounterOutOfRange { counter: c.n, bound: 0 });
        }
    }
    let (bound, complete) = resolve_bound(a, b, opts)?;
    let ua = unfold(a, bound);
    let ub = unfold(b, bound);
    let (ca, xa) = embed_config(a, conf_a, bound)?;
    let (cb, xb) = embed_config(b, conf_b, bound)?;
    let witness = product_search(
        &ua,
        (ca, xa.to_sparse()),
        &ub,
        (cb, xb.to_sparse()),
        DeadMode::Joint,
        opts.deadline,
        &mut SearchStats::default(),
    )?;
    if let Some(w) = &witness {
        assert_ne!(
            eval_from(a, conf_a, w)?,
            eval_from(b, conf_b, w)?,
            "counterexample replay failed"
        );
    }
    Ok(EquivVerdict {
        result: if witness.is_some() {
            EquivResult::NotEquivalent
        } else {
            EquivResult::Equivalent
        },
        witness,
        bound_used: bound,
        complete,
    })
}

/// [`config_equiv_with`] with only a bound.
pub fn config_equiv(
    a: &WeightedOdca,
    conf_a: &Configuration,
    b: &WeightedOdca,
    conf_b: &Configuration,
    bound: Option<usize>,
) -> Result<EquivVerdict> {
    let opts = EquivOptions {
        bound,
        ..EquivOptions::default()
    };
    config_equiv_with(a, conf_a, b, conf_b, &opts)
}

/// Decides whether `a` and `b` recognise the same function.
pub fn odca_equiv_with(a: &WeightedOdca, b: &WeightedOdca, opts: &EquivOptions) -> Result<EquivVerdict> {
    config_equiv_with(a, &a.initial_config(), b, &b.initial_config(), opts)
}

/// [`odca_equiv_with`] with only a bound.
pub fn odca_equiv(a: &WeightedOdca, b: &WeightedOdca, bound: Option<usize>) -> Result<EquivVerdict> {
    config_equiv(a, &a.initial_config(), b, &b.initial_config(), bound)
}
