//! Weighted one-deterministic-counter automata and their run semantics.
//!
//! An automaton is a deterministic counter structure (which alone moves the
//! counter) running in lockstep with a weighted finite state machine (which
//! reads whether the counter is zero but never changes it). A configuration
//! is a weight vector over the machine's states, a counter state and a
//! counter value.
//!
//! This module also builds the two finite weighted automata used by the
//! decision procedures: the `M`-unfolding, which tracks the counter exactly
//! up to `M`, and the underlying uninitialised automaton, which behaves like
//! the original as long as the counter stays positive.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::{Matrix, Rational, SparseMatrix, SparseVector, Vector, VectorSpace};

/// Index of a letter in its [`Alphabet`].
pub type Letter = usize;

/// A word as a sequence of letter indices.
pub type Word = Vec<Letter>;

/// An ordered alphabet; the order fixes the lexicographic order on words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Self {
        Alphabet {
            symbols: symbols.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, a: Letter) -> &str {
        &self.symbols[a]
    }

    pub fn index_of(&self, symbol: &str) -> Option<Letter> {
        self.symbols.iter().position(|s| s == symbol)
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word. With single-character symbols the text is read
    /// character by character; otherwise symbols are separated by
    /// whitespace or commas. `""` and `"ε"` denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || (text == "ε" && self.index_of("ε").is_none()) {
            return Ok(Vec::new());
        }
        let lookup = |s: &str| self.index_of(s).ok_or_else(|| Error::UnknownSymbol(s.to_owned()));
        if self.single_char() {
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| lookup(c.encode_utf8(&mut [0; 4])))
                .collect()
        } else {
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(lookup)
                .collect()
        }
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        let sep = if self.single_char() { "" } else { " " };
        word.iter()
            .map(|&a| self.symbols[a].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// All words of length at most `max_len` in (length, lexicographic) order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * self.len());
            for w in &layer {
                for a in 0..self.len() {
                    let mut v = w.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

/// `0` for a zero counter, `1` for a positive one.
pub fn sign(n: usize) -> usize {
    usize::from(n > 0)
}

/// A move of the counter structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CounterMove {
    pub target: usize,
    pub effect: i8,
}

impl CounterMove {
    pub fn new(target: usize, effect: i8) -> Self {
        CounterMove { target, effect }
    }
}

/// The deterministic counter structure: counter states, the zero-counter
/// and positive-counter transition tables (indexed `[state][letter]`) and
/// the start state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CounterStructure {
    pub states: Vec<String>,
    pub zero: Vec<Vec<CounterMove>>,
    pub positive: Vec<Vec<CounterMove>>,
    pub initial: usize,
}

impl CounterStructure {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// The move taken from counter state `p` with counter value `n` on `a`.
    pub fn mv(&self, p: usize, n: usize, a: Letter) -> CounterMove {
        if n == 0 {
            self.zero[p][a]
        } else {
            self.positive[p][a]
        }
    }

    /// Successor `(state, counter)` of `(p, n)` on `a`.
    pub fn step(&self, p: usize, n: usize, a: Letter) -> (usize, usize) {
        let m = self.mv(p, n, a);
        let next = n as i64 + i64::from(m.effect);
        debug_assert!(next >= 0, "counter went negative");
        (m.target, next as usize)
    }

    fn validate(&self, alphabet_len: usize, out: &mut Vec<Violation>) {
        if self.states.is_empty() {
            out.push(Violation::NoCounterStates);
        }
        for (i, s) in self.states.iter().enumerate() {
            if self.states[..i].contains(s) {
                out.push(Violation::DuplicateCounterState(s.clone()));
            }
        }
        if self.initial >= self.states.len() {
            out.push(Violation::InitialCounterStateOutOfRange(self.initial));
        }
        for (zero, table) in [(true, &self.zero), (false, &self.positive)] {
            if table.len() != self.states.len() {
                out.push(Violation::TransitionTableSize {
                    zero,
                    expected: self.states.len(),
                    found: table.len(),
                });
                continue;
            }
            for (p, row) in table.iter().enumerate() {
                if row.len() != alphabet_len {
                    out.push(Violation::MissingCounterMoves {
                        zero,
                        state: p,
                        expected: alphabet_len,
                        found: row.len(),
                    });
                    continue;
                }
                for (a, m) in row.iter().enumerate() {
                    if m.target >= self.states.len() {
                        out.push(Violation::CounterTargetOutOfRange {
                            zero,
                            state: p,
                            letter: a,
                            target: m.target,
                        });
                    }
                    let ok = if zero {
                        matches!(m.effect, 0 | 1)
                    } else {
                        matches!(m.effect, -1..=1)
                    };
                    if !ok {
                        out.push(Violation::BadEffect {
                            zero,
                            state: p,
                            letter: a,
                            effect: m.effect,
                        });
                    }
                }
            }
        }
    }
}

/// One invariant breach reported by [`WeightedOdca::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    EmptyAlphabet,
    DuplicateSymbol(String),
    NoCounterStates,
    DuplicateCounterState(String),
    InitialCounterStateOutOfRange(usize),
    TransitionTableSize {
        zero: bool,
        expected: usize,
        found: usize,
    },
    MissingCounterMoves {
        zero: bool,
        state: usize,
        expected: usize,
        found: usize,
    },
    CounterTargetOutOfRange {
        zero: bool,
        state: usize,
        letter: Letter,
        target: usize,
    },
    BadEffect {
        zero: bool,
        state: usize,
        letter: Letter,
        effect: i8,
    },
    EmptyStateMachine,
    MatrixTableSize {
        expected: usize,
        found: usize,
    },
    MatrixShape {
        letter: Letter,
        zero: bool,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    VectorDim {
        which: &'static str,
        found: usize,
        expected: usize,
    },
    NotBoolean {
        which: String,
    },
    DuplicateTransition {
        zero: bool,
        from: usize,
        letter: Letter,
        to: usize,
    },
}

fn table(zero: bool) -> &'static str {
    if zero {
        "delta0"
    } else {
        "delta1"
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyAlphabet => write!(f, "alphabet is empty"),
            Violation::DuplicateSymbol(s) => write!(f, "symbol {s:?} appears twice"),
            Violation::NoCounterStates => write!(f, "no counter states"),
            Violation::DuplicateCounterState(s) => write!(f, "counter state {s:?} appears twice"),
            Violation::InitialCounterStateOutOfRange(p) => {
                write!(f, "initial counter state {p} out of range")
            }
            Violation::TransitionTableSize { zero, expected, found } => {
                write!(f, "{} has {found} rows, expected {expected}", table(*zero))
            }
            Violation::MissingCounterMoves {
                zero,
                state,
                expected,
                found,
            } => write!(
                f,
                "{} row of counter state {state} has {found} moves, expected {expected}",
                table(*zero)
            ),
            Violation::CounterTargetOutOfRange {
                zero,
                state,
                letter,
                target,
            } => write!(
                f,
                "{}({state}, {letter}) targets unknown counter state {target}",
                table(*zero)
            ),
            Violation::BadEffect {
                zero,
                state,
                letter,
                effect,
            } => write!(
                f,
                "{}({state}, {letter}) has illegal counter effect {effect}",
                table(*zero)
            ),
            Violation::EmptyStateMachine => write!(f, "finite state machine has no states"),
            Violation::MatrixTableSize { expected, found } => {
                write!(f, "{found} transition matrix pairs for {expected} letters")
            }
            Violation::MatrixShape {
                letter,
                zero,
                rows,
                cols,
                expected,
            } => write!(
                f,
                "matrix for letter {letter} ({}) is {rows}x{cols}, expected {expected}x{expected}",
                if *zero { "zero" } else { "pos" }
            ),
            Violation::VectorDim { which, found, expected } => {
                write!(f, "{which} has dimension {found}, expected {expected}")
            }
            Violation::NotBoolean { which } => write!(f, "{which} has a non-boolean entry"),
            Violation::DuplicateTransition { zero, from, letter, to } => {
                write!(f, "{} has two transitions {from} -{letter}-> {to}", table(*zero))
            }
        }
    }
}

pub(crate) fn validate_alphabet(alphabet: &Alphabet, out: &mut Vec<Violation>) {
    if alphabet.is_empty() {
        out.push(Violation::EmptyAlphabet);
    }
    for (i, s) in alphabet.symbols().iter().enumerate() {
        if alphabet.symbols()[..i].contains(s) {
            out.push(Violation::DuplicateSymbol(s.clone()));
        }
    }
}

/// A weighted one-deterministic-counter automaton over the rationals.
///
/// `delta[a][0]` is the matrix read on letter `a` when the counter is zero,
/// `delta[a][1]` when it is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedOdca {
    pub alphabet: Alphabet,
    pub counter: CounterStructure,
    pub fsm_size: usize,
    pub lambda: Vector,
    pub delta: Vec<[Matrix; 2]>,
    pub eta: Vector,
}

/// A configuration: weight vector, counter state and counter value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub x: Vector,
    pub p: usize,
    pub n: usize,
}

impl Configuration {
    pub fn new(x: Vector, p: usize, n: usize) -> Self {
        Configuration { x, p, n }
    }
}

/// Summary of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub final_config: Configuration,
    pub weight_effect: Matrix,
    pub counter_effect: i64,
    pub min_counter: usize,
    pub max_counter: usize,
    /// Every transition except possibly the last fired with a positive counter.
    pub floating: bool,
}

impl WeightedOdca {
    /// Reports every invariant breach; an empty list means the automaton is
    /// well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        validate_alphabet(&self.alphabet, &mut out);
        self.counter.validate(self.alphabet.len(), &mut out);
        let q = self.fsm_size;
        if q == 0 {
            out.push(Violation::EmptyStateMachine);
        }
        if self.delta.len() != self.alphabet.len() {
            out.push(Violation::MatrixTableSize {
                expected: self.alphabet.len(),
                found: self.delta.len(),
            });
        }
        for (a, pair) in self.delta.iter().enumerate() {
            for (d, m) in pair.iter().enumerate() {
                if m.rows() != q || m.cols() != q {
                    out.push(Violation::MatrixShape {
                        letter: a,
                        zero: d == 0,
                        rows: m.rows(),
                        cols: m.cols(),
                        expected: q,
                    });
                }
            }
        }
        for (which, v) in [("lambda", &self.lambda), ("eta", &self.eta)] {
            if v.dim() != q {
                out.push(Violation::VectorDim {
                    which,
                    found: v.dim(),
                    expected: q,
                });
            }
        }
        out
    }

    /// Returns `self` if valid, otherwise all violations as an error.
    pub fn validated(self) -> Result<Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidAutomaton(v))
        }
    }

    pub fn num_counter_states(&self) -> usize {
        self.counter.len()
    }

    /// `K = |Q|·|C|`.
    pub fn k(&self) -> usize {
        self.fsm_size * self.counter.len()
    }

    pub fn initial_config(&self) -> Configuration {
        Configuration::new(self.lambda.clone(), self.counter.initial, 0)
    }

    pub fn matrix(&self, a: Letter, n: usize) -> &Matrix {
        &self.delta[a][sign(n)]
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        self.alphabet.parse_word(text)
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        self.alphabet.format_word(w)
    }

    pub(crate) fn check_letter(&self, a: Letter) -> Result<()> {
        if a < self.alphabet.len() {
            Ok(())
        } else {
            Err(Error::UnknownSymbol(format!("#{a}")))
        }
    }

    pub(crate) fn check_config(&self, c: &Configuration) -> Result<()> {
        if c.x.dim() != self.fsm_size {
            return Err(crate::exactla::LinalgError::DimensionMismatch {
                context: "configuration vector",
                expected: self.fsm_size,
                found: c.x.dim(),
            }
            .into());
        }
        if c.p >= self.counter.len() {
            return Err(Error::UnknownCounterState(c.p));
        }
        Ok(())
    }

    /// The same automaton with a different initial distribution and
    /// counter state.
    pub fn with_initial(&self, lambda: Vector, p: usize) -> WeightedOdca {
        WeightedOdca {
            lambda,
            counter: CounterStructure {
                initial: p,
                ..self.counter.clone()
            },
            ..self.clone()
        }
    }

    /// Adds unreachable zero-weight states so that the machine has at least
    /// `fsm_size` states and `counter_states` counter states. The recognised
    /// function is unchanged.
    pub fn padded(&self, fsm_size: usize, counter_states: usize) -> WeightedOdca {
        let q = self.fsm_size.max(fsm_size);
        let c = self.counter.len().max(counter_states);
        let grow_vec = |v: &Vector| {
            let mut e = v.entries().to_vec();
            e.resize(q, Rational::zero());
            Vector::new(e)
        };
        let grow_mat = |m: &Matrix| {
            let mut out = Matrix::zeros(q, q);
            for r in 0..m.rows() {
                for col in 0..m.cols() {
                    out.set(r, col, m.get(r, col).clone());
                }
            }
            out
        };
        let mut counter = self.counter.clone();
        for extra in self.counter.len()..c {
            counter.states.push(format!("__pad{extra}"));
            let loops: Vec<CounterMove> = (0..self.alphabet.len()).map(|_| CounterMove::new(extra, 0)).collect();
            counter.zero.push(loops.clone());
            counter.positive.push(loops);
        }
        WeightedOdca {
            alphabet: self.alphabet.clone(),
            counter,
            fsm_size: q,
            lambda: grow_vec(&self.lambda),
            delta: self.delta.iter().map(|[z, p]| [grow_mat(z), grow_mat(p)]).collect(),
            eta: grow_vec(&self.eta),
        }
    }
}

/// Applies the unique transition on `a` to `c`.
pub fn step(odca: &WeightedOdca, c: &Configuration, a: Letter) -> Result<Configuration> {
    odca.check_letter(a)?;
    odca.check_config(c)?;
    let x = c.x.mul_matrix(odca.matrix(a, c.n))?;
    let (p, n) = odca.counter.step(c.p, c.n, a);
    Ok(Configuration::new(x, p, n))
}

/// Every configuration visited by the run of `w` from `c`, starting with `c`.
pub fn trace(odca: &WeightedOdca, c: &Configuration, w: &[Letter]) -> Result<Vec<Configuration>> {
    let mut out = vec![c.clone()];
    for &a in w {
        let next = step(odca, out.last().expect("non-empty"), a)?;
        out.push(next);
    }
    Ok(out)
}

/// Runs `w` from `c`, recording weight-effect, counter-effect and extremal
/// counter values.
pub fn run(odca: &WeightedOdca, c: &Configuration, w: &[Letter]) -> Result<RunResult> {
    odca.check_config(c)?;
    let mut weight_effect = Matrix::identity(odca.fsm_size);
    let (mut p, mut n) = (c.p, c.n);
    let (mut min_counter, mut max_counter) = (n, n);
    let mut floating = true;
    for (i, &a) in w.iter().enumerate() {
        odca.check_letter(a)?;
        if n == 0 && i + 1 < w.len() {
            floating = false;
        }
        weight_effect = weight_effect.mul(odca.matrix(a, n))?;
        (p, n) = odca.counter.step(p, n, a);
        min_counter = min_counter.min(n);
        max_counter = max_counter.max(n);
    }
    let x = c.x.mul_matrix(&weight_effect)?;
    Ok(RunResult {
        final_config: Configuration::new(x, p, n),
        weight_effect,
        counter_effect: n as i64 - c.n as i64,
        min_counter,
        max_counter,
        floating,
    })
}

/// `f(w, c) = x_c · we(π(w, c)) · ηᵀ`.
pub fn eval_from(odca: &WeightedOdca, c: &Configuration, w: &[Letter]) -> Result<Rational> {
    odca.check_config(c)?;
    let mut x = c.x.clone();
    let (mut p, mut n) = (c.p, c.n);
    for &a in w {
        odca.check_letter(a)?;
        x = x.mul_matrix(odca.matrix(a, n))?;
        (p, n) = odca.counter.step(p, n, a);
    }
    Ok(x.dot(&odca.eta)?)
}

/// The accepting weight of `w` from the initial configuration.
pub fn eval(odca: &WeightedOdca, w: &[Letter]) -> Result<Rational> {
    eval_from(odca, &odca.initial_config(), w)
}

/// A weighted automaton driven by a deterministic control component.
///
/// The matrix applied on a letter depends on the current control state:
/// `matrices[step_matrix[c][a]]`. The control `dead_control`, when present,
/// is a sink whose matrices are zero.
#[derive(Clone, Debug)]
pub struct ControlledWa {
    pub alphabet: Alphabet,
    pub num_controls: usize,
    pub ctrl: Vec<Vec<usize>>,
    pub step_matrix: Vec<Vec<usize>>,
    pub matrices: Vec<SparseMatrix>,
    pub initial_control: usize,
    pub wa_size: usize,
    pub lambda: SparseVector,
    pub eta: Vector,
    pub dead_control: Option<usize>,
}

impl ControlledWa {
    /// A plain weighted automaton: one control state, one matrix per letter.
    pub fn from_wa(alphabet: Alphabet, lambda: &Vector, delta: &[Matrix], eta: &Vector) -> Self {
        let n = lambda.dim();
        ControlledWa {
            num_controls: 1,
            ctrl: vec![vec![0; alphabet.len()]],
            step_matrix: vec![(0..alphabet.len()).collect()],
            matrices: delta.iter().map(SparseMatrix::from_dense).collect(),
            initial_control: 0,
            wa_size: n,
            lambda: lambda.to_sparse(),
            eta: eta.clone(),
            dead_control: None,
            alphabet,
        }
    }

    pub fn check(&self) -> Result<()> {
        let mismatch = |context, expected, found| {
            Error::Linalg(crate::exactla::LinalgError::DimensionMismatch {
                context,
                expected,
                found,
            })
        };
        if self.eta.dim() != self.wa_size {
            return Err(mismatch("controlled automaton eta", self.wa_size, self.eta.dim()));
        }
        if self.ctrl.len() != self.num_controls || self.step_matrix.len() != self.num_controls {
            return Err(mismatch("control table", self.num_controls, self.ctrl.len()));
        }
        for m in &self.matrices {
            if m.rows() != self.wa_size || m.cols() != self.wa_size {
                return Err(mismatch("controlled automaton matrix", self.wa_size, m.rows()));
            }
        }
        Ok(())
    }

    /// Successor of `(control, x)` on `a`.
    pub fn step(&self, control: usize, x: &SparseVector, a: Letter) -> (usize, SparseVector) {
        let m = &self.matrices[self.step_matrix[control][a]];
        (self.ctrl[control][a], m.left_mul(x))
    }

    pub fn run_from(&self, control: usize, x: &SparseVector, w: &[Letter]) -> (usize, SparseVector) {
        let mut state = (control, x.clone());
        for &a in w {
            state = self.step(state.0, &state.1, a);
        }
        state
    }

    pub fn eval(&self, w: &[Letter]) -> Rational {
        let (_, x) = self.run_from(self.initial_control, &self.lambda, w);
        x.dot_dense(&self.eta)
    }
}

/// Memoises the level-shifting blocks of an unfolding, keyed by
/// `(letter, level, effect)`.
pub(crate) struct LevelMatrices<'a> {
    odca: &'a WeightedOdca,
    bound: usize,
    pub matrices: Vec<SparseMatrix>,
    index: HashMap<(Letter, usize, i8), usize>,
}

impl<'a> LevelMatrices<'a> {
    pub const ZERO: usize = 0;

    pub fn new(odca: &'a WeightedOdca, bound: usize) -> Self {
        let n = odca.fsm_size * (bound + 1);
        LevelMatrices {
            odca,
            bound,
            matrices: vec![SparseMatrix::zeros(n, n)],
            index: HashMap::new(),
        }
    }

    /// Matrix moving weight from level `m` to level `m + effect` with the
    /// zero-test of level `m`. Increments past the bound give the zero matrix.
    pub fn get(&mut self, a: Letter, m: usize, effect: i8) -> usize {
        let target = m as i64 + i64::from(effect);
        if target < 0 || target > self.bound as i64 {
            return Self::ZERO;
        }
        if let Some(&i) = self.index.get(&(a, m, effect)) {
            return i;
        }
        let q = self.odca.fsm_size;
        let n = q * (self.bound + 1);
        let block = self.odca.matrix(a, m);
        let (from, to) = (m * q, target as usize * q);
        let mut triplets = Vec::new();
        for i in 0..q {
            for j in 0..q {
                let v = block.get(i, j);
                if !v.is_zero() {
                    triplets.push((from + i, to + j, v.clone()));
                }
            }
        }
        let i = self.matrices.len();
        self.matrices.push(SparseMatrix::from_triplets(n, n, triplets));
        self.index.insert((a, m, effect), i);
        i
    }
}

/// Control index of `(p, m)` in an `M`-unfolding.
pub fn unfold_control(p: usize, m: usize, bound: usize) -> usize {
    p * (bound + 1) + m
}

/// Builds the `M`-unfolding: control states `C × [0, M]` plus a dead sink
/// (the last control), weighted states `Q × [0, M]` (level-major). Runs
/// whose counter would exceed `M` enter the sink and weigh zero.
pub fn unfold(odca: &WeightedOdca, bound: usize) -> ControlledWa {
    let (c, q, sigma) = (odca.counter.len(), odca.fsm_size, odca.alphabet.len());
    let dead = c * (bound + 1);
    let mut pool = LevelMatrices::new(odca, bound);
    let mut ctrl = Vec::with_capacity(dead + 1);
    let mut step_matrix = Vec::with_capacity(dead + 1);
    for p in 0..c {
        for m in 0..=bound {
            let mut targets = Vec::with_capacity(sigma);
            let mut mats = Vec::with_capacity(sigma);
            for a in 0..sigma {
                let mv = odca.counter.mv(p, m, a);
                let next = m as i64 + i64::from(mv.effect);
                if next > bound as i64 {
                    targets.push(dead);
                    mats.push(LevelMatrices::ZERO);
                } else {
                    targets.push(unfold_control(mv.target, next as usize, bound));
                    mats.push(pool.get(a, m, mv.effect));
                }
            }
            ctrl.push(targets);
            step_matrix.push(mats);
        }
    }
    ctrl.push(vec![dead; sigma]);
    step_matrix.push(vec![LevelMatrices::ZERO; sigma]);
    let eta = Vector::new((0..q * (bound + 1)).map(|i| odca.eta[i % q].clone()).collect());
    ControlledWa {
        alphabet: odca.alphabet.clone(),
        num_controls: dead + 1,
        ctrl,
        step_matrix,
        matrices: pool.matrices,
        initial_control: unfold_control(odca.counter.initial, 0, bound),
        wa_size: q * (bound + 1),
        lambda: odca.lambda.to_sparse(),
        eta,
        dead_control: Some(dead),
    }
}

/// Embeds a configuration with counter at most `M` into the `M`-unfolding.
pub fn embed_config(odca: &WeightedOdca, c: &Configuration, bound: usize) -> Result<(usize, Vector)> {
    odca.check_config(c)?;
    if c.n > bound {
        return Err(Error::CounterOutOfRange { counter: c.n, bound });
    }
    let q = odca.fsm_size;
    let mut v = Vector::zeros(q * (bound + 1));
    for i in 0..q {
        v.set(c.n * q + i, c.x[i].clone());
    }
    Ok((unfold_control(c.p, c.n, bound), v))
}

/// Places `v` at level `m` of the `M`-unfolding's state space.
pub fn lift_space(v: &VectorSpace, level: usize, bound: usize) -> Result<VectorSpace> {
    if level > bound {
        return Err(Error::CounterOutOfRange { counter: level, bound });
    }
    Ok(v.embed_block(level, bound + 1))
}

/// The zero-test-free automaton on `C × Q` that mimics runs with a
/// positive counter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UninitialisedWa {
    pub size: usize,
    pub delta: Vec<Matrix>,
    pub eta: Vector,
}

impl UninitialisedWa {
    /// `y · Δ(w) · ηᵀ`.
    pub fn eval_from(&self, y: &Vector, w: &[Letter]) -> Result<Rational> {
        let mut x = y.clone();
        for &a in w {
            x = x.mul_matrix(&self.delta[a])?;
        }
        Ok(x.dot(&self.eta)?)
    }

    /// Index of `(p, i)`.
    pub fn index(&self, fsm_size: usize, p: usize, i: usize) -> usize {
        p * fsm_size + i
    }
}

/// Builds the underlying uninitialised automaton: state `(p, i)` moves to
/// `(q, j)` on `a` with weight `Δ(a, pos)[i][j]` when `δ₁(p, a)` targets `q`.
pub fn underlying_wa(odca: &WeightedOdca) -> UninitialisedWa {
    let (c, q) = (odca.counter.len(), odca.fsm_size);
    let size = c * q;
    let delta = (0..odca.alphabet.len())
        .map(|a| {
            let mut m = Matrix::zeros(size, size);
            let pos = &odca.delta[a][1];
            for p in 0..c {
                let target = odca.counter.positive[p][a].target;
                for i in 0..q {
                    for j in 0..q {
                        m.set(p * q + i, target * q + j, pos.get(i, j).clone());
                    }
                }
            }
            m
        })
        .collect();
    let eta = Vector::new((0..size).map(|i| odca.eta[i % q].clone()).collect());
    UninitialisedWa { size, delta, eta }
}

/// Embeds `(x, p)` as a state vector of the underlying automaton.
pub fn embed_underlying(odca: &WeightedOdca, x: &Vector, p: usize) -> Vector {
    let q = odca.fsm_size;
    let mut v = Vector::zeros(q * odca.counter.len());
    for i in 0..q {
        v.set(p * q + i, x[i].clone());
    }
    v
}

/// A convenience constructor for tests and fixtures: a counter structure
/// where every missing move is a zero-effect self-loop.
pub fn complete_counter_structure(
    states: &[&str],
    alphabet: &Alphabet,
    initial: usize,
    moves: &[(&str, &str, &[usize], &str, i8)],
) -> CounterStructure {
    let n = states.len();
    let idx = |s: &str| states.iter().position(|t| *t == s).expect("known counter state");
    let mut zero: Vec<Vec<Option<CounterMove>>> = vec![vec![None; alphabet.len()]; n];
    let mut positive = zero.clone();
    for &(from, letter, signs, to, effect) in moves {
        let a = alphabet.index_of(letter).expect("known letter");
        for &d in signs {
            let slot = if d == 0 { &mut zero } else { &mut positive };
            let prev = slot[idx(from)][a].replace(CounterMove::new(idx(to), effect));
            assert!(prev.is_none(), "duplicate counter move");
        }
    }
    let finish = |t: Vec<Vec<Option<CounterMove>>>| -> Vec<Vec<CounterMove>> {
        t.into_iter()
            .enumerate()
            .map(|(p, row)| row.into_iter().map(|m| m.unwrap_or(CounterMove::new(p, 0))).collect())
            .collect()
    };
    CounterStructure {
        states: states.iter().map(|s| s.to_string()).collect(),
        zero: finish(zero),
        positive: finish(positive),
        initial,
    }
}

/// The all-ones vector `1ᵀ` of a given dimension.
pub fn ones(dim: usize) -> Vector {
    Vector::new(vec![Rational::one(); dim])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, mat_mul};
    use crate::fixtures;
    use crate::oracle::random_odca;

    #[test]
    fn fixtures_are_valid() {
        for m in [
            fixtures::prefix_aware_decimal(),
            fixtures::equal_prefix_power(),
            fixtures::counter_oblivious(),
        ] {
            assert_eq!(m.validate(), vec![]);
        }
    }

    #[test]
    fn negative_zero_effect_is_reported() {
        let mut m = fixtures::prefix_aware_decimal();
        m.counter.zero[0][0].effect = -1;
        assert!(m
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::BadEffect { zero: true, .. })));
    }

    #[test]
    fn matrix_shape_is_reported() {
        let mut m = fixtures::prefix_aware_decimal();
        m.delta[1][0] = Matrix::zeros(3, 4);
        assert!(m.validate().iter().any(|v| matches!(
            v,
            Violation::MatrixShape {
                letter: 1,
                zero: true,
                ..
            }
        )));
        m.eta = Vector::zeros(2);
        assert!(m.validate().len() >= 2);
    }

    #[test]
    fn first_step_of_prefix_aware_decimal() {
        let m = fixtures::prefix_aware_decimal();
        let c = step(&m, &m.initial_config(), 0).unwrap();
        assert_eq!(c, Configuration::new(Vector::from_ints(&[1, 0, 0, 0]), 0, 1));
    }

    #[test]
    fn zero_vector_stays_zero_but_counter_moves() {
        let m = fixtures::prefix_aware_decimal();
        let c = Configuration::new(Vector::zeros(4), 0, 0);
        let next = step(&m, &c, 0).unwrap();
        assert!(next.x.is_zero());
        assert_eq!(next.n, 1);
    }

    #[test]
    fn unknown_letter_is_rejected() {
        let m = fixtures::prefix_aware_decimal();
        assert!(matches!(step(&m, &m.initial_config(), 7), Err(Error::UnknownSymbol(_))));
        assert!(matches!(m.parse_word("abz"), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn run_of_abaaab() {
        let m = fixtures::prefix_aware_decimal();
        let w = m.parse_word("abaaab").unwrap();
        let r = run(&m, &m.initial_config(), &w).unwrap();
        assert_eq!(
            r.final_config,
            Configuration::new(Vector::from_ints(&[0, 0, 1, 6]), 2, 1)
        );
        assert_eq!(r.counter_effect, 1);
        assert_eq!(r.max_counter, 2);
        assert_eq!(r.min_counter, 0);
        assert!(!r.floating);
        assert_eq!(eval(&m, &w).unwrap(), int(6));
    }

    #[test]
    fn empty_run_is_identity() {
        let m = fixtures::equal_prefix_power();
        let r = run(&m, &m.initial_config(), &[]).unwrap();
        assert_eq!(r.final_config, m.initial_config());
        assert_eq!(r.weight_effect, Matrix::identity(3));
        assert_eq!(r.counter_effect, 0);
        assert!(r.floating);
        assert_eq!(eval(&fixtures::prefix_aware_decimal(), &[]).unwrap(), int(0));
    }

    #[test]
    fn equal_prefix_power_aba() {
        let m = fixtures::equal_prefix_power();
        assert_eq!(eval(&m, &m.parse_word("aba").unwrap()).unwrap(), int(2));
    }

    #[test]
    fn step_matches_transition_by_transition_simulation() {
        for seed in 0..30 {
            let m = random_odca(3, 2, 2, None, seed);
            let mut c = m.initial_config();
            for k in 0..8 {
                let a = (seed as usize + k) % 2;
                let next = step(&m, &c, a).unwrap();
                // direct coordinate formula
                let d = sign(c.n);
                let mut x = Vector::zeros(3);
                for j in 0..3 {
                    let mut s = Rational::zero();
                    for i in 0..3 {
                        s += &c.x[i] * m.delta[a][d].get(i, j);
                    }
                    x.set(j, s);
                }
                let mv = if c.n == 0 {
                    m.counter.zero[c.p][a]
                } else {
                    m.counter.positive[c.p][a]
                };
                assert_eq!(
                    next,
                    Configuration::new(x, mv.target, (c.n as i64 + mv.effect as i64) as usize)
                );
                c = next;
            }
        }
    }

    #[test]
    fn weight_effect_is_product_of_letter_matrices() {
        for seed in 0..20 {
            let m = random_odca(3, 3, 2, None, seed);
            for w in m.alphabet.words_up_to(5).iter().step_by(7) {
                let r = run(&m, &m.initial_config(), w).unwrap();
                let mut prod = Matrix::identity(3);
                let (mut p, mut n) = (m.counter.initial, 0);
                for &a in w {
                    prod = mat_mul(&prod, &m.delta[a][sign(n)]).unwrap();
                    (p, n) = m.counter.step(p, n, a);
                }
                assert_eq!(r.weight_effect, prod);
                assert_eq!(r.final_config.p, p);
            }
        }
    }

    #[test]
    fn eval_is_linear_in_the_initial_vector() {
        for seed in 0..20 {
            let m = random_odca(3, 2, 2, None, seed);
            let x = Vector::from_ints(&[1, -2, 3]);
            let y = Vector::from_ints(&[0, 5, -1]);
            let (alpha, beta) = (int(3), crate::exactla::ratio(-1, 2));
            let z = x.scale(&alpha).add(&y.scale(&beta)).unwrap();
            for w in m.alphabet.words_up_to(4) {
                let f = |v: &Vector| eval_from(&m, &Configuration::new(v.clone(), 0, 0), &w).unwrap();
                assert_eq!(f(&z), &alpha * f(&x) + &beta * f(&y));
            }
        }
    }

    #[test]
    fn counter_trajectory_is_replayable() {
        let m = random_odca(2, 3, 2, None, 99);
        for w in m.alphabet.words_up_to(6) {
            let t1 = trace(&m, &m.initial_config(), &w).unwrap();
            let t2 = trace(&m, &m.initial_config(), &w).unwrap();
            let counters = |t: &[Configuration]| t.iter().map(|c| (c.p, c.n)).collect::<Vec<_>>();
            assert_eq!(counters(&t1), counters(&t2));
        }
    }

    #[test]
    fn unfolding_sizes() {
        let u = unfold(&fixtures::prefix_aware_decimal(), 2);
        assert_eq!(u.num_controls, 9 + 1);
        assert_eq!(u.wa_size, 12);
        assert_eq!(u.dead_control, Some(9));
        u.check().unwrap();
    }

    #[test]
    fn unfolding_agrees_on_bounded_runs() {
        for m in [fixtures::prefix_aware_decimal(), fixtures::equal_prefix_power()] {
            let u = unfold(&m, 10);
            for w in m.alphabet.words_up_to(8) {
                assert_eq!(u.eval(&w), eval(&m, &w).unwrap());
            }
        }
    }

    #[test]
    fn unfolding_zeroes_runs_past_the_bound() {
        let m = fixtures::prefix_aware_decimal();
        // "aaaba" pushes the counter to 3; with M = 2 it enters the sink
        let w = m.parse_word("aaabaaa").unwrap();
        let u = unfold(&m, 2);
        assert_eq!(u.eval(&w), int(0));
        let w = m.parse_word("aaabaaaa").unwrap();
        assert_eq!(eval(&m, &w).unwrap(), int(1));
        assert_eq!(u.eval(&w), int(0));
        assert_eq!(unfold(&m, 3).eval(&w), int(1));
    }

    #[test]
    fn embedding_configurations() {
        let m = fixtures::prefix_aware_decimal();
        let (ctl, v) = embed_config(&m, &m.initial_config(), 5).unwrap();
        assert_eq!(ctl, unfold_control(0, 0, 5));
        assert_eq!(&v.entries()[..4], m.lambda.entries());
        assert!(v.entries()[4..].iter().all(Zero::is_zero));

        let c = Configuration::new(Vector::from_ints(&[0, 0, 1, 6]), 2, 1);
        let (_, v) = embed_config(&m, &c, 3).unwrap();
        assert_eq!(v.support(), vec![6, 7]);
        assert!(matches!(
            embed_config(&m, &Configuration::new(Vector::zeros(4), 0, 4), 3),
            Err(Error::CounterOutOfRange { .. })
        ));
    }

    #[test]
    fn unfolded_run_matches_embedded_run() {
        let m = fixtures::prefix_aware_decimal();
        let bound = 6;
        let u = unfold(&m, bound);
        let start = Configuration::new(Vector::from_ints(&[1, 2, 0, -1]), 2, 1);
        for w in m.alphabet.words_up_to(4) {
            let end = run(&m, &start, &w).unwrap();
            if end.max_counter > bound {
                continue;
            }
            let (ctl, v) = embed_config(&m, &start, bound).unwrap();
            let (ctl2, v2) = u.run_from(ctl, &v.to_sparse(), &w);
            let expected = embed_config(&m, &end.final_config, bound).unwrap();
            assert_eq!((ctl2, v2.to_dense(u.wa_size)), expected);
        }
    }

    #[test]
    fn lifted_space_membership() {
        let v = VectorSpace::span(4, &[Vector::from_ints(&[1, 1, 0, 0]), Vector::from_ints(&[0, 0, 0, 1])]).unwrap();
        let m = fixtures::prefix_aware_decimal();
        let lifted = lift_space(&v, 2, 3).unwrap();
        assert_eq!(lifted.ambient_dim(), 16);
        for y in [
            Vector::from_ints(&[2, 2, 0, 5]),
            Vector::from_ints(&[1, 0, 0, 0]),
            Vector::from_ints(&[0, 0, 0, 0]),
            Vector::from_ints(&[3, 3, 1, 0]),
        ] {
            let (_, e) = embed_config(&m, &Configuration::new(y.clone(), 1, 2), 3).unwrap();
            assert_eq!(lifted.contains(&e).unwrap(), v.contains(&y).unwrap());
        }
        assert!(lift_space(&VectorSpace::zero(4), 1, 3).unwrap().dim() == 0);
        let full = lift_space(&VectorSpace::full(4), 1, 3).unwrap();
        assert_eq!(full.pivots(), vec![4, 5, 6, 7]);
        assert!(lift_space(&v, 4, 3).is_err());
    }

    #[test]
    fn underlying_wa_of_counter_oblivious_machine() {
        let m = fixtures::counter_oblivious();
        let u = underlying_wa(&m);
        assert_eq!(u.size, m.fsm_size);
        for a in 0..m.alphabet.len() {
            assert_eq!(u.delta[a], m.delta[a][1]);
        }
        assert_eq!(underlying_wa(&fixtures::prefix_aware_decimal()).size, 12);
    }

    #[test]
    fn underlying_wa_agrees_on_floating_runs() {
        for seed in 0..20 {
            let m = random_odca(3, 2, 2, None, seed);
            let u = underlying_wa(&m);
            let x = Vector::from_ints(&[1, -1, 2]);
            for p in 0..2 {
                let start = Configuration::new(x.clone(), p, 7);
                for w in m.alphabet.words_up_to(6) {
                    let y = embed_underlying(&m, &x, p);
                    assert_eq!(eval_from(&m, &start, &w).unwrap(), u.eval_from(&y, &w).unwrap());
                }
            }
        }
    }

    #[test]
    fn padding_preserves_the_function() {
        let m = fixtures::equal_prefix_power();
        let padded = m.padded(5, 4);
        assert_eq!(padded.validate(), vec![]);
        for w in m.alphabet.words_up_to(6) {
            assert_eq!(eval(&m, &w).unwrap(), eval(&padded, &w).unwrap());
        }
    }

    #[test]
    fn word_text_round_trip() {
        let a = Alphabet::new(["a", "b"]);
        assert_eq!(a.parse_word("abba").unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(a.format_word(&[0, 1, 1, 0]), "abba");
        assert_eq!(a.parse_word("").unwrap(), Vec::<Letter>::new());
        let long = Alphabet::new(["push", "pop"]);
        assert_eq!(long.parse_word("push pop,pop").unwrap(), vec![0, 1, 1]);
        assert_eq!(long.format_word(&[0, 1]), "push pop");
        assert_eq!(a.words_up_to(2).len(), 7);
        assert_eq!(a.words_up_to(2)[3], vec![0, 0]);
    }
}
