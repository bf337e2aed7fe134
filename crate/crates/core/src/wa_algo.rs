//! Forward basis saturation on controlled weighted automata.
//!
//! The search explores words breadth-first in (length, lexicographic) order.
//! Each control state keeps a basis of the vectors already expanded there; a
//! vector in the span of that basis is dropped, because any continuation
//! that leaves a target space from it also leaves it from one of the basis
//! vectors, which were reached by shortlex-smaller words.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::exactla::{LinalgError, SparseVector, Vector, VectorSpace};
use crate::model::{ControlledWa, Letter, Word};

/// Target spaces per control state; controls without an entry are not targets.
#[derive(Clone, Debug, Default)]
pub struct TargetSpec {
    pub per_control: HashMap<usize, VectorSpace>,
}

impl TargetSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, control: usize, space: VectorSpace) {
        self.per_control.insert(control, space);
    }

    /// Whether `x` at `control` is a witness: `control` is a target and `x`
    /// lies outside its space.
    pub fn is_witness(&self, control: usize, x: &SparseVector) -> bool {
        self.per_control.get(&control).is_some_and(|v| !v.contains_sparse(x))
    }
}

/// Search bookkeeping for one explored word: its parent and last letter.
#[derive(Clone, Copy, Debug)]
struct SearchNode {
    parent: usize,
    letter: Letter,
    length: usize,
}

const ROOT: usize = usize::MAX;

fn word_of(nodes: &[SearchNode], mut id: usize) -> Word {
    let mut w = Vec::with_capacity(if id == ROOT { 0 } else { nodes[id].length });
    while id != ROOT {
        w.push(nodes[id].letter);
        id = nodes[id].parent;
    }
    w.reverse();
    w
}

/// Statistics of a saturation run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub insertions: usize,
    pub dequeued: usize,
}

/// The generic saturation loop.
///
/// `step` maps a control and vector to the successor on a letter;
/// `is_witness` decides whether a reached pair ends the search.
pub(crate) fn saturate<C: Copy + Eq + Hash>(
    start: (C, SparseVector),
    dim: usize,
    sigma: usize,
    mut step: impl FnMut(C, &SparseVector, Letter) -> (C, SparseVector),
    mut is_witness: impl FnMut(C, &SparseVector) -> bool,
    deadline: Option<Instant>,
    stats: &mut SearchStats,
) -> Result<Option<Word>> {
    let mut nodes: Vec<SearchNode> = Vec::new();
    let mut bases: HashMap<C, VectorSpace> = HashMap::new();
    let mut queue: VecDeque<(usize, C, SparseVector)> = VecDeque::new();
    queue.push_back((ROOT, start.0, start.1));
    while let Some((id, control, x)) = queue.pop_front() {
        stats.dequeued += 1;
        if is_witness(control, &x) {
            return Ok(Some(word_of(&nodes, id)));
        }
        let basis = bases.entry(control).or_insert_with(|| VectorSpace::zero(dim));
        if !basis.insert_sparse(&x) {
            continue;
        }
        stats.insertions += 1;
        if deadline.is_some_and(|d| Instant::now() > d) {
            return Err(Error::DeadlineExceeded);
        }
        let length = if id == ROOT { 1 } else { nodes[id].length + 1 };
        for a in 0..sigma {
            let (next_control, y) = step(control, &x, a);
            nodes.push(SearchNode {
                parent: id,
                letter: a,
                length,
            });
            queue.push_back((nodes.len() - 1, next_control, y));
        }
    }
    Ok(None)
}

fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(LinalgError::DimensionMismatch {
            context,
            expected,
            found,
        }
        .into());
    }
    Ok(())
}

/// The (length, lexicographic)-least word leading from `(start_control,
/// start_vector)` to a target control with a vector outside its space.
pub fn wa_covs_reach(
    cwa: &ControlledWa,
    start_control: usize,
    start_vector: &Vector,
    targets: &TargetSpec,
) -> Result<Option<Word>> {
    wa_covs_reach_with(
        cwa,
        start_control,
        start_vector,
        targets,
        None,
        &mut SearchStats::default(),
    )
}

/// [`wa_covs_reach`] with a cooperative deadline and search statistics.
pub fn wa_covs_reach_with(
    cwa: &ControlledWa,
    start_control: usize,
    start_vector: &Vector,
    targets: &TargetSpec,
    deadline: Option<Instant>,
    stats: &mut SearchStats,
) -> Result<Option<Word>> {
    cwa.check()?;
    check_dim("start vector", cwa.wa_size, start_vector.dim())?;
    if start_control >= cwa.num_controls {
        return Err(Error::Format(format!("unknown control state {start_control}")));
    }
    for space in targets.per_control.values() {
        check_dim("target space", cwa.wa_size, space.ambient_dim())?;
    }
    let witness = saturate(
        (start_control, start_vector.to_sparse()),
        cwa.wa_size,
        cwa.alphabet.len(),
        |c, x, a| cwa.step(c, x, a),
        |c, x| targets.is_witness(c, x),
        deadline,
        stats,
    )?;
    if let Some(w) = &witness {
        let (c, x) = cwa.run_from(start_control, &start_vector.to_sparse(), w);
        assert!(targets.is_witness(c, &x), "witness replay failed");
    }
    Ok(witness)
}

/// Verdict of an equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WaVerdict {
    Equivalent,
    NotEquivalent(Word),
}

/// How a dead control of one component affects the product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum DeadMode {
    /// Components continue independently; a dead component weighs zero.
    Independent,
    /// The product is dead as soon as either component is.
    Joint,
}

/// Product search for a word on which the two automata, started from the
/// given controls and vectors, produce different weights.
#[allow(clippy::too_many_arguments)]
pub(crate) fn product_search(
    a: &ControlledWa,
    start_a: (usize, SparseVector),
    b: &ControlledWa,
    start_b: (usize, SparseVector),
    mode: DeadMode,
    deadline: Option<Instant>,
    stats: &mut SearchStats,
) -> Result<Option<Word>> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch {
            left: a.alphabet.symbols().to_vec(),
            right: b.alphabet.symbols().to_vec(),
        });
    }
    a.check()?;
    b.check()?;
    let na = a.wa_size;
    let split = |x: &SparseVector| -> (SparseVector, SparseVector) {
        let (left, right): (Vec<_>, Vec<_>) = x.entries().iter().cloned().partition(|(i, _)| *i < na);
        (
            SparseVector::from_pairs(left),
            SparseVector::from_pairs(right.into_iter().map(|(i, v)| (i - na, v)).collect()),
        )
    };
    let dead =
        |ca: usize, cb: usize| mode == DeadMode::Joint && (a.dead_control == Some(ca) || b.dead_control == Some(cb));
    let weight = |x: &SparseVector| {
        let (xa, xb) = split(x);
        xa.dot_dense(&a.eta) - xb.dot_dense(&b.eta)
    };
    let start = ((start_a.0, start_b.0), start_a.1.concat(na, &start_b.1));
    saturate(
        start,
        na + b.wa_size,
        a.alphabet.len(),
        |(ca, cb), x, l| {
            if dead(ca, cb) {
                return ((ca, cb), SparseVector::new());
            }
            let (xa, xb) = split(x);
            let (ca2, ya) = a.step(ca, &xa, l);
            let (cb2, yb) = b.step(cb, &xb, l);
            if dead(ca2, cb2) {
                return ((ca2, cb2), SparseVector::new());
            }
            ((ca2, cb2), ya.concat(na, &yb))
        },
        |(ca, cb), x| !dead(ca, cb) && !num_traits::Zero::is_zero(&weight(x)),
        deadline,
        stats,
    )
}

/// Decides whether two controlled automata compute the same function and
/// returns the (length, lexicographic)-least distinguishing word otherwise.
pub fn wa_equiv(a: &ControlledWa, b: &ControlledWa) -> Result<WaVerdict> {
    let w = product_search(
        a,
        (a.initial_control, a.lambda.clone()),
        b,
        (b.initial_control, b.lambda.clone()),
        DeadMode::Independent,
        None,
        &mut SearchStats::default(),
    )?;
    Ok(match w {
        None => WaVerdict::Equivalent,
        Some(w) => {
            assert_ne!(a.eval(&w), b.eval(&w), "witness replay failed");
            WaVerdict::NotEquivalent(w)
        }
    })
}
