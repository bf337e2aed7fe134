//! The example machines used throughout the tests, transcribed from their
//! transition diagrams. Counter moves missing from a diagram are completed
//! with zero-effect self-loops; the finite state machine never has weight
//! on the corresponding rows, so the recognised function is unaffected.

use num_traits::Zero;

use crate::boolean::BooleanOdca;
use crate::exactla::{int, ratio, Matrix, Rational, Vector};
use crate::model::{complete_counter_structure, Alphabet, WeightedOdca};
use crate::translate::{OcaTransition, WeightedOca};

/// A weighted machine transition: `(from, letters, zero-tests, to, weight)`.
type Edge<'a> = (usize, &'a str, &'a [usize], usize, Rational);

fn fsm(size: usize, alphabet: &Alphabet, edges: &[Edge<'_>]) -> Vec<[Matrix; 2]> {
    let mut delta: Vec<[Matrix; 2]> = (0..alphabet.len())
        .map(|_| [Matrix::zeros(size, size), Matrix::zeros(size, size)])
        .collect();
    for (from, letters, signs, to, w) in edges {
        for ch in letters.chars() {
            let a = alphabet.index_of(ch.encode_utf8(&mut [0; 4])).expect("known letter");
            for &d in *signs {
                let m = &mut delta[a][d];
                assert!(m.get(*from, *to).is_zero(), "duplicate edge");
                m.set(*from, *to, w.clone());
            }
        }
    }
    delta
}

fn unit(dim: usize, i: usize) -> Vector {
    Vector::unit(dim, i)
}

/// Splits each `"xy"` letter group of a counter move into single letters.
fn counter_moves<'a>(
    moves: &[(&'a str, &'a str, &'a [usize], &'a str, i8)],
) -> Vec<(&'a str, &'a str, &'a [usize], &'a str, i8)> {
    let mut out = Vec::new();
    for &(from, letters, signs, to, effect) in moves {
        for (i, _) in letters.char_indices() {
            out.push((from, &letters[i..i + 1], signs, to, effect));
        }
    }
    out
}

const ZERO: &[usize] = &[0];
const POS: &[usize] = &[1];
const BOTH: &[usize] = &[0, 1];

/// The machine whose accepting weight of `a^n b a^m u` reads `u` as a
/// binary-weighted count; `f("abaaab") = 6`.
pub fn prefix_aware_decimal() -> WeightedOdca {
    let alphabet = Alphabet::new(["a", "b"]);
    let counter = complete_counter_structure(
        &["p0", "p1", "p2"],
        &alphabet,
        0,
        &counter_moves(&[
            ("p0", "a", BOTH, "p0", 1),
            ("p0", "b", POS, "p1", -1),
            ("p1", "a", POS, "p1", -1),
            ("p1", "a", ZERO, "p2", 0),
            ("p2", "a", BOTH, "p2", 1),
            ("p2", "b", POS, "p2", -1),
        ]),
    );
    let delta = fsm(
        4,
        &alphabet,
        &[
            (0, "a", BOTH, 0, int(1)),
            (0, "b", POS, 1, int(1)),
            (1, "a", POS, 1, int(1)),
            (1, "a", ZERO, 2, int(1)),
            (2, "a", BOTH, 2, int(1)),
            (2, "b", POS, 2, int(1)),
            (2, "a", BOTH, 3, int(1)),
            (3, "a", BOTH, 3, int(2)),
            (3, "b", POS, 3, int(2)),
        ],
    );
    WeightedOdca {
        alphabet,
        counter,
        fsm_size: 4,
        lambda: unit(4, 0),
        delta,
        eta: unit(4, 3),
    }
}

/// [`prefix_aware_decimal`] with the final weight of `q3` doubled.
pub fn prefix_aware_decimal_eta2() -> WeightedOdca {
    let mut m = prefix_aware_decimal();
    m.eta = Vector::from_ints(&[0, 0, 0, 2]);
    m
}

/// [`prefix_aware_decimal`] with all final weights zero.
pub fn prefix_aware_decimal_zero() -> WeightedOdca {
    let mut m = prefix_aware_decimal();
    m.eta = Vector::zeros(4);
    m
}

/// Weights words by powers of two over the prefixes where the numbers of
/// `a`s and `b`s balance; `f("aba") = 2`.
pub fn equal_prefix_power() -> WeightedOdca {
    let alphabet = Alphabet::new(["a", "b"]);
    let counter = complete_counter_structure(
        &["p0", "p1"],
        &alphabet,
        0,
        &counter_moves(&[
            ("p0", "a", BOTH, "p0", 1),
            ("p0", "b", POS, "p0", -1),
            ("p0", "b", ZERO, "p1", 1),
            ("p1", "b", BOTH, "p1", 1),
            ("p1", "a", POS, "p1", -1),
            ("p1", "a", ZERO, "p0", 1),
        ]),
    );
    let delta = fsm(
        3,
        &alphabet,
        &[
            (0, "a", ZERO, 1, int(1)),
            (0, "b", ZERO, 2, int(1)),
            (1, "a", ZERO, 1, int(2)),
            (1, "ab", POS, 1, int(1)),
            (1, "b", ZERO, 2, int(2)),
            (2, "b", ZERO, 2, int(2)),
            (2, "ab", POS, 2, int(1)),
            (2, "a", ZERO, 1, int(2)),
        ],
    );
    WeightedOdca {
        alphabet,
        counter,
        fsm_size: 3,
        lambda: unit(3, 0),
        delta,
        eta: Vector::from_ints(&[0, 1, 1]),
    }
}

/// A machine whose weights ignore the counter: a single counter state and
/// identical zero and positive matrices.
pub fn counter_oblivious() -> WeightedOdca {
    let alphabet = Alphabet::new(["a", "b"]);
    let counter = complete_counter_structure(
        &["p0"],
        &alphabet,
        0,
        &[("p0", "a", BOTH, "p0", 1), ("p0", "b", POS, "p0", -1)],
    );
    let delta = fsm(
        2,
        &alphabet,
        &[
            (0, "a", BOTH, 0, int(1)),
            (0, "a", BOTH, 1, int(1)),
            (1, "a", BOTH, 1, int(1)),
            (0, "b", BOTH, 0, ratio(1, 2)),
            (1, "b", BOTH, 1, int(2)),
        ],
    );
    WeightedOdca {
        alphabet,
        counter,
        fsm_size: 2,
        lambda: unit(2, 0),
        delta,
        eta: unit(2, 1),
    }
}

fn to_boolean(m: WeightedOdca) -> BooleanOdca {
    BooleanOdca::from_weighted(&m).expect("0/1 weights")
}

/// Recognises `{aⁿbaⁿ | n > 0}`.
pub fn l1() -> BooleanOdca {
    let alphabet = Alphabet::new(["a", "b"]);
    let counter = complete_counter_structure(
        &["p0", "p1", "p2"],
        &alphabet,
        0,
        &counter_moves(&[
            ("p0", "a", BOTH, "p0", 1),
            ("p0", "b", POS, "p1", -1),
            ("p1", "a", POS, "p1", -1),
            ("p1", "a", ZERO, "p2", 0),
        ]),
    );
    let delta = fsm(
        3,
        &alphabet,
        &[
            (0, "a", BOTH, 0, int(1)),
            (0, "b", POS, 1, int(1)),
            (1, "a", POS, 1, int(1)),
            (1, "a", ZERO, 2, int(1)),
        ],
    );
    to_boolean(WeightedOdca {
        alphabet,
        counter,
        fsm_size: 3,
        lambda: unit(3, 0),
        delta,
        eta: unit(3, 2),
    })
}

/// [`l1`] with `q2` no longer accepting: the empty language.
pub fn l1_eta_flipped() -> BooleanOdca {
    let mut m = l1();
    m.accepting[2] = false;
    m
}

/// Recognises `{aⁿ(b+c)ᵐb(b+c)² | m > n}` non-deterministically.
pub fn l3() -> BooleanOdca {
    let alphabet = Alphabet::new(["a", "b", "c"]);
    let counter = complete_counter_structure(
        &["p0", "p1"],
        &alphabet,
        0,
        &counter_moves(&[
            ("p0", "bc", POS, "p0", -1),
            ("p0", "a", BOTH, "p0", 1),
            ("p0", "b", ZERO, "p1", 0),
            ("p1", "bc", BOTH, "p1", 0),
        ]),
    );
    let delta = fsm(
        6,
        &alphabet,
        &[
            (0, "a", BOTH, 0, int(1)),
            (0, "bc", ZERO, 1, int(1)),
            (0, "bc", POS, 2, int(1)),
            (1, "bc", ZERO, 1, int(1)),
            (1, "b", ZERO, 3, int(1)),
            (2, "bc", POS, 2, int(1)),
            (2, "bc", ZERO, 1, int(1)),
            (3, "bc", ZERO, 4, int(1)),
            (4, "bc", ZERO, 5, int(1)),
        ],
    );
    to_boolean(WeightedOdca {
        alphabet,
        counter,
        fsm_size: 6,
        lambda: unit(6, 0),
        delta,
        eta: unit(6, 5),
    })
}

/// A one-counter automaton that is not counter-deterministic: from its two
/// initial states, reading `a` increments the counter on one path and
/// leaves it unchanged on the other.
pub fn violating_oca() -> WeightedOca {
    let t = |from, letter, to, effect, weight: i64| OcaTransition {
        from,
        letter,
        to,
        effect,
        weight: int(weight),
    };
    WeightedOca {
        alphabet: Alphabet::new(["a", "b"]),
        size: 2,
        lambda: Vector::from_ints(&[1, 1]),
        eta: Vector::from_ints(&[1, 1]),
        trans0: vec![t(0, 0, 0, 1, 1), t(1, 0, 1, 0, 1), t(0, 1, 0, 0, 1)],
        trans1: vec![t(0, 0, 0, 1, 1), t(1, 0, 1, -1, 1)],
    }
}

/// Every shipped fixture with its file stem.
pub fn weighted_fixtures() -> Vec<(&'static str, WeightedOdca)> {
    vec![
        ("pad", prefix_aware_decimal()),
        ("pad-eta2", prefix_aware_decimal_eta2()),
        ("equal-prefix-power", equal_prefix_power()),
        ("counter-oblivious", counter_oblivious()),
    ]
}

pub fn boolean_fixtures() -> Vec<(&'static str, BooleanOdca)> {
    vec![("l1", l1()), ("l1-eta-flipped", l1_eta_flipped()), ("l3", l3())]
}
