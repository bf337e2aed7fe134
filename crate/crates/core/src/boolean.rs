//! Boolean ODCAs: the same shape as weighted ones with weights in the
//! boolean semiring, possibly non-deterministic in the finite state machine.

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::{One, Zero};

use crate::equiv::{odca_equiv, EquivVerdict};
use crate::error::{Error, Result};
use crate::exactla::{Matrix, Rational, Vector};
use crate::model::{sign, Alphabet, CounterStructure, Letter, Violation, WeightedOdca};

/// A boolean ODCA. `delta[a][d][i][j]` says whether state `i` moves to `j`
/// on letter `a` under zero-test `d` (0 = zero, 1 = positive).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanOdca {
    pub alphabet: Alphabet,
    pub counter: CounterStructure,
    pub fsm_size: usize,
    pub initial: Vec<bool>,
    pub delta: Vec<[Vec<Vec<bool>>; 2]>,
    pub accepting: Vec<bool>,
}

/// A set of finite state machine states.
pub type StateSet = Vec<bool>;

impl BooleanOdca {
    /// Reads a weighted machine whose weights are all 0 or 1.
    pub fn from_weighted(m: &WeightedOdca) -> Result<Self> {
        let bit = |r: &Rational, which: &str| -> Result<bool> {
            if r.is_zero() {
                Ok(false)
            } else if r.is_one() {
                Ok(true)
            } else {
                Err(Error::InvalidAutomaton(vec![Violation::NotBoolean {
                    which: which.to_owned(),
                }]))
            }
        };
        let violations = m.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidAutomaton(violations));
        }
        let vec =
            |v: &Vector, which: &str| -> Result<Vec<bool>> { v.entries().iter().map(|r| bit(r, which)).collect() };
        let mat = |x: &Matrix, which: &str| -> Result<Vec<Vec<bool>>> {
            (0..x.rows())
                .map(|i| (0..x.cols()).map(|j| bit(x.get(i, j), which)).collect())
                .collect()
        };
        let delta = m
            .delta
            .iter()
            .enumerate()
            .map(|(a, [z, p])| {
                let name = m.alphabet.symbol(a);
                Ok([mat(z, &format!("{name}/zero"))?, mat(p, &format!("{name}/pos"))?])
            })
            .collect::<Result<_>>()?;
        Ok(BooleanOdca {
            alphabet: m.alphabet.clone(),
            counter: m.counter.clone(),
            fsm_size: m.fsm_size,
            initial: vec(&m.lambda, "lambda")?,
            delta,
            accepting: vec(&m.eta, "eta")?,
        })
    }

    /// The same machine with weights 0 and 1 in the rationals.
    pub fn to_weighted(&self) -> WeightedOdca {
        let r = |b: bool| if b { Rational::one() } else { Rational::zero() };
        let vec = |v: &[bool]| Vector::new(v.iter().map(|&b| r(b)).collect());
        let mat = |x: &[Vec<bool>]| {
            let mut m = Matrix::zeros(self.fsm_size, self.fsm_size);
            for (i, row) in x.iter().enumerate() {
                for (j, &b) in row.iter().enumerate() {
                    m.set(i, j, r(b));
                }
            }
            m
        };
        WeightedOdca {
            alphabet: self.alphabet.clone(),
            counter: self.counter.clone(),
            fsm_size: self.fsm_size,
            lambda: vec(&self.initial),
            delta: self.delta.iter().map(|[z, p]| [mat(z), mat(p)]).collect(),
            eta: vec(&self.accepting),
        }
    }

    /// Reports every invariant breach, as for weighted machines.
    pub fn validate(&self) -> Vec<Violation> {
        let q = self.fsm_size;
        let mut out = Vec::new();
        for (a, pair) in self.delta.iter().enumerate() {
            for (d, m) in pair.iter().enumerate() {
                if m.len() != q || m.iter().any(|row| row.len() != q) {
                    out.push(Violation::MatrixShape {
                        letter: a,
                        zero: d == 0,
                        rows: m.len(),
                        cols: m.first().map_or(0, Vec::len),
                        expected: q,
                    });
                }
            }
        }
        for (which, v) in [("lambda", &self.initial), ("eta", &self.accepting)] {
            if v.len() != q {
                out.push(Violation::VectorDim {
                    which,
                    found: v.len(),
                    expected: q,
                });
            }
        }
        if out.is_empty() {
            out = self.to_weighted().validate();
        }
        out
    }

    /// States reachable from `s` on `a` under zero-test `d`.
    pub fn post(&self, s: &[bool], a: Letter, d: usize) -> StateSet {
        let m = &self.delta[a][d];
        let mut out = vec![false; self.fsm_size];
        for (i, _) in s.iter().enumerate().filter(|(_, &b)| b) {
            for (j, &t) in m[i].iter().enumerate() {
                out[j] |= t;
            }
        }
        out
    }

    fn accepts_set(&self, s: &[bool]) -> bool {
        s.iter().zip(&self.accepting).any(|(&x, &y)| x && y)
    }
}

/// Whether `w` is accepted: some run along the (unique) counter trajectory
/// ends in an accepting state.
pub fn bool_eval(b: &BooleanOdca, w: &[Letter]) -> Result<bool> {
    let mut s = b.initial.clone();
    let (mut p, mut n) = (b.counter.initial, 0);
    for &a in w {
        if a >= b.alphabet.len() {
            return Err(Error::UnknownSymbol(format!("#{a}")));
        }
        s = b.post(&s, a, sign(n));
        (p, n) = b.counter.step(p, n, a);
    }
    Ok(b.accepts_set(&s))
}

const MAX_SUBSETS: usize = 1 << 16;

/// Subset construction restricted to subsets reachable from the initial
/// set. Subsets are numbered in breadth-first order (letters in alphabet
/// order, zero-test before positive).
pub fn determinize(b: &BooleanOdca) -> Result<BooleanOdca> {
    let sigma = b.alphabet.len();
    let mut index: HashMap<StateSet, usize> = HashMap::new();
    let mut sets: Vec<StateSet> = Vec::new();
    let mut edges: Vec<Vec<[usize; 2]>> = Vec::new();
    index.insert(b.initial.clone(), 0);
    sets.push(b.initial.clone());
    let mut next = 0;
    while next < sets.len() {
        let s = sets[next].clone();
        let mut row = Vec::with_capacity(sigma);
        for a in 0..sigma {
            let mut pair = [0; 2];
            for (d, slot) in pair.iter_mut().enumerate() {
                let t = b.post(&s, a, d);
                *slot = match index.get(&t) {
                    Some(&i) => i,
                    None => {
                        if sets.len() >= MAX_SUBSETS {
                            return Err(Error::ResourceCap {
                                what: "subset construction",
                                requested: format!("more than {MAX_SUBSETS} subsets"),
                                cap: MAX_SUBSETS,
                            });
                        }
                        index.insert(t.clone(), sets.len());
                        sets.push(t);
                        sets.len() - 1
                    }
                };
            }
            row.push(pair);
        }
        edges.push(row);
        next += 1;
    }
    let n = sets.len();
    let delta = (0..sigma)
        .map(|a| {
            let table = |d: usize| {
                (0..n)
                    .map(|i| {
                        let mut r = vec![false; n];
                        r[edges[i][a][d]] = true;
                        r
                    })
                    .collect()
            };
            [table(0), table(1)]
        })
        .collect();
    let mut initial = vec![false; n];
    initial[0] = true;
    Ok(BooleanOdca {
        alphabet: b.alphabet.clone(),
        counter: b.counter.clone(),
        fsm_size: n,
        initial,
        delta,
        accepting: sets.iter().map(|s| b.accepts_set(s)).collect(),
    })
}

/// `(|C|·2^|Q|)²`, saturated at `10⁶`.
pub fn default_determinism_cap(b: &BooleanOdca) -> usize {
    let subsets = 1usize.checked_shl(b.fsm_size as u32).unwrap_or(usize::MAX);
    let controls = subsets.saturating_mul(b.counter.len());
    controls.saturating_mul(controls).min(1_000_000)
}

fn syntactically_deterministic(b: &BooleanOdca) -> bool {
    let at_most_one = |row: &[bool]| row.iter().filter(|&&x| x).count() <= 1;
    at_most_one(&b.initial)
        && b.delta
            .iter()
            .all(|pair| pair.iter().all(|m| m.iter().all(|r| at_most_one(r))))
}

/// Whether every reachable configuration, with counters up to `counter_cap`,
/// has at most one active state.
pub fn is_deterministic(b: &BooleanOdca, counter_cap: Option<usize>) -> bool {
    if syntactically_deterministic(b) {
        return true;
    }
    let cap = counter_cap.unwrap_or_else(|| default_determinism_cap(b));
    let active = |s: &[bool]| s.iter().filter(|&&x| x).count();
    let start = (b.counter.initial, b.initial.clone(), 0usize);
    let mut seen: HashSet<(usize, StateSet, usize)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some((p, s, n)) = queue.pop_front() {
        if active(&s) > 1 {
            return false;
        }
        if s.iter().all(|&x| !x) {
            continue;
        }
        for a in 0..b.alphabet.len() {
            let t = b.post(&s, a, sign(n));
            let (p2, n2) = b.counter.step(p, n, a);
            if n2 > cap {
                continue;
            }
            let key = (p2, t, n2);
            if seen.insert(key.clone()) {
                queue.push_back(key);
            }
        }
    }
    true
}

/// The deterministic machine as a weighted one over the rationals.
pub fn embed_rational(b: &BooleanOdca) -> Result<WeightedOdca> {
    if !is_deterministic(b, None) {
        return Err(Error::NotDeterministic);
    }
    Ok(b.to_weighted())
}

/// Language equivalence via determinization and weighted equivalence.
pub fn bool_equiv(a: &BooleanOdca, b: &BooleanOdca, bound: Option<usize>) -> Result<EquivVerdict> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch {
            left: a.alphabet.symbols().to_vec(),
            right: b.alphabet.symbols().to_vec(),
        });
    }
    let da = embed_rational(&determinize(a)?)?;
    let db = embed_rational(&determinize(b)?)?;
    odca_equiv(&da, &db, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::eval;
    use crate::oracle::random_odca;

    fn in_l1(w: &[Letter]) -> bool {
        // aⁿ b aⁿ with n > 0
        let n = w.len() / 2;
        w.len() % 2 == 1 && n > 0 && w[n] == 1 && w.iter().filter(|&&a| a == 1).count() == 1
    }

    fn in_l3(w: &[Letter]) -> bool {
        let n = w.iter().take_while(|&&a| a == 0).count();
        let u = &w[n..];
        u.len() >= 3 && u.iter().all(|&a| a != 0) && u[u.len() - 3] == 1 && u.len() - 3 > n
    }

    #[test]
    fn l1_membership() {
        let m = fixtures::l1();
        assert!(bool_eval(&m, &m.alphabet.parse_word("aba").unwrap()).unwrap());
        assert!(!bool_eval(&m, &m.alphabet.parse_word("ab").unwrap()).unwrap());
        for w in m.alphabet.words_up_to(8) {
            assert_eq!(bool_eval(&m, &w).unwrap(), in_l1(&w), "{w:?}");
        }
    }

    #[test]
    fn l3_membership() {
        let m = fixtures::l3();
        for w in m.alphabet.words_up_to(7) {
            assert_eq!(bool_eval(&m, &w).unwrap(), in_l3(&w), "{w:?}");
        }
    }

    #[test]
    fn determinization_preserves_language() {
        for (_, m) in fixtures::boolean_fixtures() {
            let d = determinize(&m).unwrap();
            assert!(is_deterministic(&d, None));
            assert!(d.validate().is_empty());
            for w in m.alphabet.words_up_to(6) {
                assert_eq!(bool_eval(&m, &w).unwrap(), bool_eval(&d, &w).unwrap());
            }
        }
        assert_eq!(determinize(&fixtures::l1()).unwrap().fsm_size, 4);
    }

    #[test]
    fn random_boolean_machines() {
        let pool = [Rational::zero(), Rational::one()];
        for seed in 0..100 {
            let w = random_odca(3, 2, 2, Some(&pool), seed);
            let b = BooleanOdca::from_weighted(&w).unwrap();
            let d = determinize(&b).unwrap();
            for word in b.alphabet.words_up_to(8) {
                assert_eq!(bool_eval(&b, &word).unwrap(), bool_eval(&d, &word).unwrap());
            }
        }
    }

    #[test]
    fn determinism_checks() {
        assert!(is_deterministic(&fixtures::l1(), None));
        assert!(!is_deterministic(&fixtures::l3(), None));
        let mut two = fixtures::l1();
        two.initial = vec![true, true, false];
        assert!(!is_deterministic(&two, Some(1)));
    }

    #[test]
    fn deterministic_machine_determinizes_to_singletons() {
        let m = fixtures::l1();
        let d = determinize(&m).unwrap();
        // {q0}, {q1}, ∅, {q2} in discovery order
        let back = determinize(&d).unwrap();
        assert_eq!(back.fsm_size, d.fsm_size);
        assert_eq!(back.accepting, d.accepting);
    }

    #[test]
    fn empty_language_has_no_accepting_subsets() {
        let d = determinize(&fixtures::l1_eta_flipped()).unwrap();
        assert!(d.accepting.iter().all(|&x| !x));
    }

    #[test]
    fn rational_embedding_agrees() {
        let d = determinize(&fixtures::l1()).unwrap();
        let w = embed_rational(&d).unwrap();
        for word in d.alphabet.words_up_to(8) {
            let expected = if bool_eval(&d, &word).unwrap() {
                Rational::one()
            } else {
                Rational::zero()
            };
            assert_eq!(eval(&w, &word).unwrap(), expected);
        }
        assert!(matches!(embed_rational(&fixtures::l3()), Err(Error::NotDeterministic)));
    }

    #[test]
    fn single_state_accept_all() {
        let mut m = fixtures::l1();
        m.fsm_size = 1;
        m.initial = vec![true];
        m.accepting = vec![true];
        m.delta = vec![[vec![vec![true]], vec![vec![true]]]; 2];
        let w = embed_rational(&m).unwrap();
        for word in m.alphabet.words_up_to(5) {
            assert_eq!(eval(&w, &word).unwrap(), Rational::one());
        }
    }

    #[test]
    fn equivalence() {
        let l1 = fixtures::l1();
        assert!(bool_equiv(&l1, &l1, Some(8)).unwrap().is_equivalent());
        let v = bool_equiv(&l1, &fixtures::l1_eta_flipped(), Some(8)).unwrap();
        assert_eq!(v.witness, Some(l1.alphabet.parse_word("aba").unwrap()));
        assert!(matches!(
            bool_equiv(&l1, &fixtures::l3(), Some(8)),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn equivalence_matches_membership_comparison() {
        let pool = [Rational::zero(), Rational::one()];
        for seed in 0..30 {
            let a = BooleanOdca::from_weighted(&random_odca(2, 2, 2, Some(&pool), seed)).unwrap();
            let b = BooleanOdca::from_weighted(&random_odca(2, 2, 2, Some(&pool), seed + 500)).unwrap();
            let v = bool_equiv(&a, &b, Some(10)).unwrap();
            let first = a
                .alphabet
                .words_up_to(8)
                .into_iter()
                .find(|w| bool_eval(&a, w).unwrap() != bool_eval(&b, w).unwrap());
            match (&v.witness, &first) {
                (Some(x), Some(y)) => assert_eq!(x, y),
                (None, None) => {}
                (Some(x), None) => assert!(x.len() > 8),
                (None, Some(y)) => panic!("missed {y:?}"),
            }
        }
    }

    #[test]
    fn non_boolean_weights_are_rejected() {
        let m = fixtures::prefix_aware_decimal();
        assert!(BooleanOdca::from_weighted(&m).is_err());
    }
}
