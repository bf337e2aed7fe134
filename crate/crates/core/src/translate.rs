//! Translation between weighted one-counter automata (OCAs) with
//! counter-determinacy and weighted ODCAs.
//!
//! An OCA is counter-deterministic when all runs of a word from the initial
//! configuration follow the same counter trajectory. The states that can be
//! active together are then grouped into colors; each color becomes a
//! counter state of the ODCA.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactla::{Matrix, Rational, Vector};
use crate::model::{validate_alphabet, Alphabet, CounterMove, CounterStructure, Letter, Violation, WeightedOdca, Word};

/// One weighted transition of an OCA.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OcaTransition {
    pub from: usize,
    pub letter: Letter,
    pub to: usize,
    pub effect: i8,
    pub weight: Rational,
}

/// A weighted one-counter automaton. `trans0` fires with a zero counter,
/// `trans1` with a positive one; absent transitions weigh zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedOca {
    pub alphabet: Alphabet,
    pub size: usize,
    pub lambda: Vector,
    pub eta: Vector,
    pub trans0: Vec<OcaTransition>,
    pub trans1: Vec<OcaTransition>,
}

/// A reachable configuration whose runs disagree on the counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminacyViolation {
    pub word: Word,
    pub counters: (usize, usize),
}

/// Maps each state to the least state of its color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringMap {
    pub color: Vec<usize>,
    /// Colors containing a state that is active in some reachable configuration.
    pub live: Vec<usize>,
}

impl ColoringMap {
    pub fn num_live(&self) -> usize {
        self.live.len()
    }
}

impl WeightedOca {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        validate_alphabet(&self.alphabet, &mut out);
        for (which, v) in [("lambda", &self.lambda), ("eta", &self.eta)] {
            if v.dim() != self.size {
                out.push(Violation::VectorDim {
                    which,
                    found: v.dim(),
                    expected: self.size,
                });
            }
        }
        for (zero, table) in [(true, &self.trans0), (false, &self.trans1)] {
            let mut seen = HashSet::new();
            for t in table {
                if t.from >= self.size || t.to >= self.size || t.letter >= self.alphabet.len() {
                    out.push(Violation::CounterTargetOutOfRange {
                        zero,
                        state: t.from,
                        letter: t.letter,
                        target: t.to,
                    });
                }
                let ok = if zero {
                    matches!(t.effect, 0 | 1)
                } else {
                    matches!(t.effect, -1..=1)
                };
                if !ok {
                    out.push(Violation::BadEffect {
                        zero,
                        state: t.from,
                        letter: t.letter,
                        effect: t.effect,
                    });
                }
                if !seen.insert((t.from, t.letter, t.to)) {
                    out.push(Violation::DuplicateTransition {
                        zero,
                        from: t.from,
                        letter: t.letter,
                        to: t.to,
                    });
                }
            }
        }
        out
    }

    fn table(&self, d: usize) -> &[OcaTransition] {
        if d == 0 {
            &self.trans0
        } else {
            &self.trans1
        }
    }

    /// Non-zero transitions indexed by `(from, letter)`.
    fn index(&self) -> [HashMap<(usize, Letter), Vec<&OcaTransition>>; 2] {
        let build = |d: usize| {
            let mut m: HashMap<(usize, Letter), Vec<&OcaTransition>> = HashMap::new();
            for t in self.table(d).iter().filter(|t| !t.weight.is_zero()) {
                m.entry((t.from, t.letter)).or_default().push(t);
            }
            m
        };
        [build(0), build(1)]
    }
}

/// Accepting weight of `w`, summing over all runs.
pub fn oca_eval(oca: &WeightedOca, w: &[Letter]) -> Result<Rational> {
    let index = oca.index();
    let mut configs: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (i, x) in oca.lambda.entries().iter().enumerate() {
        if !x.is_zero() {
            configs.insert((i, 0), x.clone());
        }
    }
    for &a in w {
        if a >= oca.alphabet.len() {
            return Err(Error::UnknownSymbol(format!("#{a}")));
        }
        let mut next: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for ((i, n), x) in &configs {
            let d = usize::from(*n > 0);
            for t in index[d].get(&(*i, a)).into_iter().flatten() {
                let n2 = (*n as i64 + i64::from(t.effect)) as usize;
                *next.entry((t.to, n2)).or_insert_with(Rational::zero) += x * &t.weight;
            }
        }
        next.retain(|_, v| !v.is_zero());
        configs = next;
    }
    Ok(configs
        .iter()
        .map(|((i, _), x)| x * &oca.eta[*i])
        .fold(Rational::zero(), |acc, t| acc + t))
}

type Support = Vec<usize>;

struct Exploration {
    /// Reachable supports with the zero-tests under which they are active.
    reached: Vec<(Support, usize)>,
    supports: HashSet<Support>,
}

fn support_of(v: &Vector) -> Support {
    v.support()
}

/// Breadth-first search over (support, counter) pairs with counters at most `cap`.
fn explore(
    oca: &WeightedOca,
    index: &[HashMap<(usize, Letter), Vec<&OcaTransition>>; 2],
    cap: usize,
) -> std::result::Result<Exploration, DeterminacyViolation> {
    let start = support_of(&oca.lambda);
    let mut seen: HashSet<(Support, usize)> = HashSet::new();
    let mut parent: Vec<(usize, Letter)> = Vec::new();
    let mut nodes: Vec<(Support, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut reached = Vec::new();
    let mut reached_set = HashSet::new();
    let mut supports = HashSet::new();
    let word = |parent: &[(usize, Letter)], mut id: usize| {
        let mut w = Vec::new();
        while id != usize::MAX {
            w.push(parent[id].1);
            id = parent[id].0;
        }
        w.reverse();
        w
    };
    if start.is_empty() {
        return Ok(Exploration { reached, supports });
    }
    seen.insert((start.clone(), 0));
    nodes.push((start, 0));
    parent.push((usize::MAX, usize::MAX));
    queue.push_back(0usize);
    // the root has no letter; strip it when rebuilding words
    while let Some(id) = queue.pop_front() {
        let (s, n) = nodes[id].clone();
        let d = usize::from(n > 0);
        supports.insert(s.clone());
        if reached_set.insert((s.clone(), d)) {
            reached.push((s.clone(), d));
        }
        for a in 0..oca.alphabet.len() {
            let mut targets = Vec::new();
            let mut effect: Option<i8> = None;
            for &i in &s {
                for t in index[d].get(&(i, a)).into_iter().flatten() {
                    match effect {
                        None => effect = Some(t.effect),
                        Some(e) if e != t.effect => {
                            let mut w: Word = word(&parent, id).into_iter().skip(1).collect();
                            w.push(a);
                            let c1 = (n as i64 + i64::from(e)) as usize;
                            let c2 = (n as i64 + i64::from(t.effect)) as usize;
                            return Err(DeterminacyViolation {
                                word: w,
                                counters: (c1.min(c2), c1.max(c2)),
                            });
                        }
                        _ => {}
                    }
                    targets.push(t.to);
                }
            }
            let Some(e) = effect else { continue };
            targets.sort_unstable();
            targets.dedup();
            let n2 = (n as i64 + i64::from(e)) as usize;
            if n2 > cap {
                continue;
            }
            let key = (targets, n2);
            if seen.insert(key.clone()) {
                nodes.push(key);
                parent.push((id, a));
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    Ok(Exploration { reached, supports })
}

/// Explores with a counter cap quadratic in the number of supports found,
/// growing the cap until it covers that number.
fn explore_saturated(oca: &WeightedOca) -> std::result::Result<Exploration, DeterminacyViolation> {
    let index = oca.index();
    let mut cap = 4;
    loop {
        let e = explore(oca, &index, cap)?;
        let n = e.supports.len();
        let needed = n * n + n + 2;
        if needed <= cap {
            return Ok(e);
        }
        cap = needed;
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

fn coloring_from(size: usize, supports: &HashSet<Support>) -> ColoringMap {
    let mut parent: Vec<usize> = (0..size).collect();
    for s in supports {
        for w in s.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            // keep the smaller index as root
            let (lo, hi) = (a.min(b), a.max(b));
            parent[hi] = lo;
        }
    }
    let color: Vec<usize> = (0..size).map(|i| find(&mut parent, i)).collect();
    let mut live: Vec<usize> = supports.iter().flatten().map(|&i| color[i]).collect();
    live.sort_unstable();
    live.dedup();
    ColoringMap { color, live }
}

/// Computes the coloring of a counter-deterministic OCA, or a word on which
/// two runs reach different counter values.
pub fn check_counter_determinacy(oca: &WeightedOca) -> std::result::Result<ColoringMap, DeterminacyViolation> {
    let e = explore_saturated(oca)?;
    Ok(coloring_from(oca.size, &e.supports))
}

fn fsm_of(oca: &WeightedOca) -> Vec<[Matrix; 2]> {
    (0..oca.alphabet.len())
        .map(|a| {
            let table = |d: usize| {
                let mut m = Matrix::zeros(oca.size, oca.size);
                for t in oca.table(d).iter().filter(|t| t.letter == a) {
                    m.set(t.from, t.to, t.weight.clone());
                }
                m
            };
            [table(0), table(1)]
        })
        .collect()
}

/// Counter structure whose states are given by `class_of` over reachable
/// supports. Returns `None` when two supports of one class disagree.
fn counter_from_classes(
    oca: &WeightedOca,
    reached: &[(Support, usize)],
    class_of: &dyn Fn(&Support) -> usize,
    names: Vec<String>,
    initial: usize,
) -> Option<CounterStructure> {
    let index = oca.index();
    let sigma = oca.alphabet.len();
    let classes = names.len();
    let mut moves: Vec<Vec<[Option<CounterMove>; 2]>> = vec![vec![[None, None]; sigma]; classes];
    for (s, d) in reached {
        let c = class_of(s);
        for a in 0..sigma {
            let ts: Vec<&OcaTransition> = s
                .iter()
                .flat_map(|&i| index[*d].get(&(i, a)).into_iter().flatten().copied())
                .collect();
            let Some(first) = ts.first() else { continue };
            let mut targets: Support = ts.iter().map(|t| t.to).collect();
            targets.sort_unstable();
            targets.dedup();
            let mv = CounterMove::new(class_of(&targets), first.effect);
            match moves[c][a][*d] {
                None => moves[c][a][*d] = Some(mv),
                Some(prev) if prev != mv => return None,
                _ => {}
            }
        }
    }
    let undefined = moves.iter().flatten().any(|m| m.iter().any(Option::is_none));
    let mut names = names;
    let sink = classes;
    if undefined {
        names.push("sink".to_owned());
    }
    let table = |d: usize| -> Vec<Vec<CounterMove>> {
        let mut t: Vec<Vec<CounterMove>> = moves
            .iter()
            .map(|row| row.iter().map(|m| m[d].unwrap_or(CounterMove::new(sink, 0))).collect())
            .collect();
        if undefined {
            t.push(vec![CounterMove::new(sink, 0); sigma]);
        }
        t
    };
    Some(CounterStructure {
        zero: table(0),
        positive: table(1),
        states: names,
        initial,
    })
}

/// Translates a counter-deterministic OCA into an ODCA recognising the same
/// function. Counter states are the live colors (plus a sink when some move
/// is never exercised); when two supports of one color disagree on a move,
/// the reachable supports themselves are used as counter states.
pub fn oca_to_odca(oca: &WeightedOca) -> Result<WeightedOdca> {
    let violations = oca.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidAutomaton(violations));
    }
    let e = explore_saturated(oca).map_err(|v| {
        Error::NotCounterDeterministic(format!(
            "word {:?} reaches counter values {} and {}",
            oca.alphabet.format_word(&v.word),
            v.counters.0,
            v.counters.1
        ))
    })?;
    let coloring = coloring_from(oca.size, &e.supports);
    let start = support_of(&oca.lambda);
    let counter = if e.reached.is_empty() {
        None
    } else {
        let live = &coloring.live;
        let class_of = |s: &Support| -> usize {
            let c = coloring.color[s[0]];
            live.binary_search(&c).expect("live color")
        };
        let names = live.iter().map(|c| format!("c{c}")).collect();
        counter_from_classes(oca, &e.reached, &class_of, names, class_of(&start))
    };
    let counter = match counter {
        Some(c) => c,
        None if e.reached.is_empty() => CounterStructure {
            states: vec!["c0".to_owned()],
            zero: vec![vec![CounterMove::new(0, 0); oca.alphabet.len()]],
            positive: vec![vec![CounterMove::new(0, 0); oca.alphabet.len()]],
            initial: 0,
        },
        None => {
            let mut supports: Vec<&Support> = e.supports.iter().collect();
            supports.sort();
            let class_of = |s: &Support| -> usize { supports.binary_search(&s).expect("reached support") };
            let names = (0..supports.len()).map(|i| format!("s{i}")).collect();
            counter_from_classes(oca, &e.reached, &class_of, names, class_of(&start))
                .expect("supports determine their moves")
        }
    };
    let odca = WeightedOdca {
        alphabet: oca.alphabet.clone(),
        counter,
        fsm_size: oca.size,
        lambda: oca.lambda.clone(),
        delta: fsm_of(oca),
        eta: oca.eta.clone(),
    };
    odca.validated()
}

/// The product OCA on `C × Q`; state `(p, i)` has index `p·|Q| + i`.
pub fn odca_to_oca(odca: &WeightedOdca) -> WeightedOca {
    let (c, q) = (odca.counter.len(), odca.fsm_size);
    let mut trans = [Vec::new(), Vec::new()];
    for (d, table) in trans.iter_mut().enumerate() {
        for p in 0..c {
            for a in 0..odca.alphabet.len() {
                let mv = if d == 0 {
                    odca.counter.zero[p][a]
                } else {
                    odca.counter.positive[p][a]
                };
                let m = &odca.delta[a][d];
                for i in 0..q {
                    for j in 0..q {
                        let w = m.get(i, j);
                        if !w.is_zero() {
                            table.push(OcaTransition {
                                from: p * q + i,
                                letter: a,
                                to: mv.target * q + j,
                                effect: mv.effect,
                                weight: w.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    let mut lambda = Vector::zeros(c * q);
    for i in 0..q {
        lambda.set(odca.counter.initial * q + i, odca.lambda[i].clone());
    }
    let eta = Vector::new((0..c * q).map(|k| odca.eta[k % q].clone()).collect());
    let [trans0, trans1] = trans;
    WeightedOca {
        alphabet: odca.alphabet.clone(),
        size: c * q,
        lambda,
        eta,
        trans0,
        trans1,
    }
}
