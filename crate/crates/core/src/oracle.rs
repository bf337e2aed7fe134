//! Brute-force reference implementations.
//!
//! Nothing here calls into the decision procedures or the subspace code:
//! runs are simulated letter by letter on plain vectors and span membership
//! is decided by a local Gaussian elimination, so the results can serve as
//! an independent baseline.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactla::{int, ratio, Matrix, Rational, Vector, VectorSpace};
use crate::model::{Alphabet, Configuration, CounterMove, CounterStructure, Letter, WeightedOdca, Word};

/// Words over `k` letters of length exactly `len`, in lexicographic order.
fn words_of_length(k: usize, len: usize) -> impl Iterator<Item = Word> {
    let total = k.checked_pow(len as u32).expect("enumeration too large");
    (0..total).map(move |mut idx| {
        let mut w = vec![0; len];
        for slot in w.iter_mut().rev() {
            *slot = idx % k;
            idx /= k;
        }
        w
    })
}

fn words_up_to(k: usize, max_len: usize) -> impl Iterator<Item = Word> {
    (0..=max_len).flat_map(move |len| words_of_length(k, len))
}

struct Sim {
    x: Vec<Rational>,
    p: usize,
    n: usize,
    peak: usize,
}

/// Runs `w` from `c`; `None` once the counter exceeds `cap`.
fn simulate(odca: &WeightedOdca, c: &Configuration, w: &[Letter], cap: usize) -> Option<Sim> {
    let q = odca.fsm_size;
    let mut s = Sim {
        x: c.x.entries().to_vec(),
        p: c.p,
        n: c.n,
        peak: c.n,
    };
    for &a in w {
        let d = usize::from(s.n > 0);
        let m = &odca.delta[a][d];
        let mut next = vec![Rational::zero(); q];
        for (i, xi) in s.x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, slot) in next.iter_mut().enumerate() {
                let w = m.get(i, j);
                if !w.is_zero() {
                    *slot += xi * w;
                }
            }
        }
        let mv = if d == 0 {
            odca.counter.zero[s.p][a]
        } else {
            odca.counter.positive[s.p][a]
        };
        let n = s.n as i64 + i64::from(mv.effect);
        assert!(n >= 0, "counter below zero");
        s = Sim {
            x: next,
            p: mv.target,
            n: n as usize,
            peak: s.peak.max(n as usize),
        };
        if s.n > cap {
            return None;
        }
    }
    Some(s)
}

fn weight(odca: &WeightedOdca, x: &[Rational]) -> Rational {
    x.iter()
        .zip(odca.eta.entries())
        .map(|(a, b)| a * b)
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// Accepting weight of `w` by direct simulation.
pub fn brute_eval(odca: &WeightedOdca, w: &[Letter]) -> Rational {
    let s = simulate(odca, &odca.initial_config(), w, usize::MAX).expect("no cap");
    weight(odca, &s.x)
}

/// Accepting weight of `w` from an arbitrary configuration.
pub fn brute_eval_from(odca: &WeightedOdca, c: &Configuration, w: &[Letter]) -> Rational {
    let s = simulate(odca, c, w, usize::MAX).expect("no cap");
    weight(odca, &s.x)
}

/// The first word in (length, lexicographic) order of length at most
/// `max_len` on which the two machines differ.
pub fn brute_equiv(a: &WeightedOdca, b: &WeightedOdca, max_len: usize) -> Option<Word> {
    assert_eq!(a.alphabet, b.alphabet, "alphabets differ");
    words_up_to(a.alphabet.len(), max_len).find(|w| brute_eval(a, w) != brute_eval(b, w))
}

/// Like [`brute_equiv`] but from given start configurations.
pub fn brute_config_equiv(
    a: &WeightedOdca,
    ca: &Configuration,
    b: &WeightedOdca,
    cb: &Configuration,
    max_len: usize,
) -> Option<Word> {
    words_up_to(a.alphabet.len(), max_len).find(|w| brute_eval_from(a, ca, w) != brute_eval_from(b, cb, w))
}

/// Rank of a list of rows by fraction-exact elimination.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &rows[r][c];
            for k in c..cols {
                let t = &f * &rows[r][k];
                rows[i][k] -= t;
            }
        }
        r += 1;
    }
    r
}

fn outside(basis: &[Vec<Rational>], x: &[Rational]) -> bool {
    let mut rows = basis.to_vec();
    let before = rank(rows.clone());
    rows.push(x.to_vec());
    rank(rows) > before
}

/// Breadth-first search over all words in (length, lexicographic) order for
/// one whose run from `c` ends in a counter state of `s` (with counter `m`
/// when given) at a vector outside `v`. Branches whose counter exceeds
/// `counter_cap` are abandoned.
pub fn brute_reach(
    odca: &WeightedOdca,
    c: &Configuration,
    v: &VectorSpace,
    s: &[usize],
    m: Option<usize>,
    word_cap: usize,
    counter_cap: usize,
) -> Option<Word> {
    let basis: Vec<Vec<Rational>> = v.basis().into_iter().map(Vector::into_entries).collect();
    words_up_to(odca.alphabet.len(), word_cap).find(|w| {
        simulate(odca, c, w, counter_cap)
            .is_some_and(|end| s.contains(&end.p) && m.is_none_or(|m| m == end.n) && outside(&basis, &end.x))
    })
}

/// Same search as [`brute_reach`], named for its use in tests of the
/// (length, lexicographic) minimality of witnesses.
pub fn lex_min_witness(
    odca: &WeightedOdca,
    c: &Configuration,
    v: &VectorSpace,
    s: &[usize],
    m: Option<usize>,
    word_cap: usize,
    counter_cap: usize,
) -> Option<Word> {
    brute_reach(odca, c, v, s, m, word_cap, counter_cap)
}

/// Largest counter value met while reading `w` from `c`.
pub fn peak_counter(odca: &WeightedOdca, c: &Configuration, w: &[Letter]) -> usize {
    simulate(odca, c, w, usize::MAX).expect("no cap").peak
}

/// Rank of the Hankel block `[f(uv)]` over all `u`, `v` of length at most `max_len`.
pub fn hankel_rank(f: impl Fn(&[Letter]) -> Rational, alphabet_size: usize, max_len: usize) -> usize {
    let words: Vec<Word> = words_up_to(alphabet_size, max_len).collect();
    let rows = words
        .iter()
        .map(|u| {
            words
                .iter()
                .map(|v| {
                    let mut uv = u.clone();
                    uv.extend_from_slice(v);
                    f(&uv)
                })
                .collect()
        })
        .collect();
    rank(rows)
}

/// The default weight pool `{−1, 0, 0, 1, 1/2}`.
pub fn default_pool() -> Vec<Rational> {
    vec![int(-1), int(0), int(0), int(1), ratio(1, 2)]
}

/// A random machine, deterministic in `seed`.
pub fn random_odca(
    num_q: usize,
    num_c: usize,
    alphabet_size: usize,
    pool: Option<&[Rational]>,
    seed: u64,
) -> WeightedOdca {
    assert!(num_q >= 1 && num_c >= 1 && alphabet_size >= 1, "sizes must be positive");
    let default = default_pool();
    let pool = pool.unwrap_or(&default);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols: Vec<String> = (0..alphabet_size)
        .map(|i| {
            if i < 26 {
                char::from(b'a' + i as u8).to_string()
            } else {
                format!("s{i}")
            }
        })
        .collect();
    let alphabet = Alphabet::new(symbols);
    let mut table = |zero: bool| -> Vec<Vec<CounterMove>> {
        (0..num_c)
            .map(|_| {
                (0..alphabet_size)
                    .map(|_| {
                        let target = rng.gen_range(0..num_c);
                        let effect = if zero {
                            rng.gen_range(0..=1)
                        } else {
                            rng.gen_range(-1..=1)
                        };
                        CounterMove::new(target, effect)
                    })
                    .collect()
            })
            .collect()
    };
    let zero = table(true);
    let positive = table(false);
    let counter = CounterStructure {
        states: (0..num_c).map(|i| format!("p{i}")).collect(),
        zero,
        positive,
        initial: 0,
    };
    let mut pick = || pool[rng.gen_range(0..pool.len())].clone();
    let mut matrix = || {
        let mut m = Matrix::zeros(num_q, num_q);
        for i in 0..num_q {
            for j in 0..num_q {
                m.set(i, j, pick());
            }
        }
        m
    };
    let delta = (0..alphabet_size).map(|_| [matrix(), matrix()]).collect();
    let lambda = Vector::new((0..num_q).map(|_| pick()).collect());
    let eta = Vector::new((0..num_q).map(|_| pick()).collect());
    WeightedOdca {
        alphabet,
        counter,
        fsm_size: num_q,
        lambda,
        delta,
        eta,
    }
}

/// A random subspace of `ℚ^dim` spanned by up to `max_gens` random small
/// integer vectors.
pub fn random_space(dim: usize, max_gens: usize, rng: &mut impl Rng) -> VectorSpace {
    let gens = rng.gen_range(0..=max_gens);
    let vectors: Vec<Vector> = (0..gens)
        .map(|_| Vector::new((0..dim).map(|_| int(rng.gen_range(-1..=1))).collect()))
        .collect();
    VectorSpace::span(dim, &vectors).expect("dimensions agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn reflexive_equivalence() {
        for (_, m) in fixtures::weighted_fixtures() {
            for len in 0..5 {
                assert_eq!(brute_equiv(&m, &m, len), None);
            }
        }
    }

    #[test]
    fn eta_perturbation_found_at_abaa() {
        let a = fixtures::prefix_aware_decimal();
        let b = fixtures::prefix_aware_decimal_eta2();
        assert_eq!(brute_equiv(&a, &b, 6), Some(a.parse_word("abaa").unwrap()));
        assert_eq!(brute_equiv(&a, &b, 0), None);
    }

    #[test]
    fn reach_trivial_cases() {
        let m = fixtures::prefix_aware_decimal();
        let c = m.initial_config();
        assert_eq!(
            brute_reach(&m, &c, &VectorSpace::full(4), &[0, 1, 2], None, 5, 12),
            None
        );
        assert_eq!(
            brute_reach(&m, &c, &VectorSpace::zero(4), &[0], Some(0), 5, 12),
            Some(vec![])
        );
    }

    #[test]
    fn reach_fixture_instance() {
        let m = fixtures::prefix_aware_decimal();
        let v = VectorSpace::span(4, &[Vector::unit(4, 0), Vector::unit(4, 1), Vector::unit(4, 2)]).unwrap();
        let w = brute_reach(&m, &m.initial_config(), &v, &[2], Some(0), 8, 12).unwrap();
        assert_eq!(m.format_word(&w), "abaab");
    }

    #[test]
    fn counter_cap_is_respected() {
        let m = fixtures::prefix_aware_decimal();
        let c = m.initial_config();
        let v = VectorSpace::zero(4);
        for cap in 0..4 {
            if let Some(w) = brute_reach(&m, &c, &v, &[0], None, 6, cap) {
                assert!(peak_counter(&m, &c, &w) <= cap);
            }
        }
        // with cap 1 the counter cannot reach 2
        assert_eq!(brute_reach(&m, &c, &v, &[0], Some(2), 6, 1), None);
    }

    #[test]
    fn hankel_basics() {
        assert_eq!(hankel_rank(|_| Rational::zero(), 2, 3), 0);
        assert_eq!(hankel_rank(|w| ratio(1, 2).pow(w.len() as i32), 2, 3), 1);
        let m = fixtures::prefix_aware_decimal();
        let ranks: Vec<usize> = (0..5).map(|l| hankel_rank(|w| brute_eval(&m, w), 2, l)).collect();
        assert!(ranks.windows(2).all(|r| r[0] <= r[1]));
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        assert_eq!(random_odca(3, 2, 2, None, 5), random_odca(3, 2, 2, None, 5));
        for seed in 0..1000 {
            assert!(random_odca(2, 2, 2, None, seed).validate().is_empty());
        }
    }

    #[test]
    fn random_pool_produces_nonzero_functions() {
        let pool = [int(0), int(1)];
        let nonzero = (0..1000).any(|seed| {
            let m = random_odca(2, 2, 2, Some(&pool), seed);
            words_up_to(2, 4).any(|w| !brute_eval(&m, &w).is_zero())
        });
        assert!(nonzero);
    }

    #[test]
    fn enumeration_order() {
        let ws: Vec<Word> = words_up_to(2, 2).collect();
        assert_eq!(
            ws,
            vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }
}
