//! The JSON wire format.
//!
//! Every document is an object whose first two keys are `"type"` and
//! `"version"`. Rationals are written as canonical strings (`"-3/4"`);
//! integers are also accepted on input. Output is pretty-printed with two
//! spaces and a trailing newline, so canonical files round-trip byte for
//! byte.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::boolean::BooleanOdca;
use crate::error::{Error, Result};
use crate::exactla::{format_rational, parse_rational, Matrix, Rational, Vector, VectorSpace};
use crate::model::{Alphabet, Configuration, CounterMove, CounterStructure, WeightedOdca};
use crate::translate::{OcaTransition, WeightedOca};

pub const VERSION: &str = "1";

fn err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(untagged)]
enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    fn value(&self) -> Result<Rational> {
        match self {
            RationalText::Text(s) => parse_rational(s).map_err(|e| err(e.to_string())),
            RationalText::Int(n) => Ok(Rational::from_integer((*n).into())),
        }
    }

    fn of(r: &Rational) -> Self {
        RationalText::Text(format_rational(r))
    }
}

fn vector_in(v: &[RationalText]) -> Result<Vector> {
    Ok(Vector::new(v.iter().map(RationalText::value).collect::<Result<_>>()?))
}

fn vector_out(v: &Vector) -> Vec<RationalText> {
    v.entries().iter().map(RationalText::of).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterMoveDoc {
    from: String,
    letter: String,
    to: String,
    effect: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LetterMatrices<T> {
    letter: String,
    zero: Vec<Vec<T>>,
    pos: Vec<Vec<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OdcaDoc<T> {
    #[serde(rename = "type")]
    kind: String,
    version: String,
    alphabet: Vec<String>,
    counter_states: Vec<String>,
    initial_counter_state: String,
    delta0: Vec<CounterMoveDoc>,
    delta1: Vec<CounterMoveDoc>,
    fsm_size: usize,
    lambda: Vec<T>,
    delta: Vec<LetterMatrices<T>>,
    eta: Vec<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OcaTransitionDoc {
    from: usize,
    letter: String,
    to: usize,
    effect: i8,
    weight: RationalText,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OcaDoc {
    #[serde(rename = "type")]
    kind: String,
    version: String,
    alphabet: Vec<String>,
    size: usize,
    lambda: Vec<RationalText>,
    eta: Vec<RationalText>,
    trans0: Vec<OcaTransitionDoc>,
    trans1: Vec<OcaTransitionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    #[serde(rename = "type")]
    kind: String,
    version: String,
    vector: Vec<RationalText>,
    counter_state: String,
    counter_value: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDoc {
    #[serde(rename = "type")]
    kind: String,
    version: String,
    dim: usize,
    basis: Vec<Vec<RationalText>>,
}

/// A configuration whose counter state is still a name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigSpec {
    pub vector: Vector,
    pub counter_state: String,
    pub counter_value: usize,
}

impl ConfigSpec {
    /// Resolves the counter state name against `odca`.
    pub fn resolve(&self, odca: &WeightedOdca) -> Result<Configuration> {
        let p = odca
            .counter
            .index_of(&self.counter_state)
            .ok_or_else(|| err(format!("unknown counter state {:?}", self.counter_state)))?;
        let c = Configuration::new(self.vector.clone(), p, self.counter_value);
        odca.check_config(&c)?;
        Ok(c)
    }
}

/// Any document of the wire format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    WeightedOdca(WeightedOdca),
    BooleanOdca(BooleanOdca),
    WeightedOca(WeightedOca),
    Config(ConfigSpec),
    VectorSpace(VectorSpace),
}

impl Document {
    pub fn type_name(&self) -> &'static str {
        match self {
            Document::WeightedOdca(_) => "weighted-odca",
            Document::BooleanOdca(_) => "boolean-odca",
            Document::WeightedOca(_) => "weighted-oca",
            Document::Config(_) => "config",
            Document::VectorSpace(_) => "vector-space",
        }
    }
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| err(e.to_string()))
}

/// Parses any document, dispatching on its `"type"` field.
pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(|e| err(format!("malformed JSON: {e}")))?;
    let kind = value
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| err("missing \"type\" field"))?
        .to_owned();
    match value.get("version").and_then(Value::as_str) {
        Some(VERSION) => {}
        Some(v) => return Err(err(format!("unsupported version {v:?}"))),
        None => return Err(err("missing \"version\" field")),
    }
    match kind.as_str() {
        "weighted-odca" => Ok(Document::WeightedOdca(odca_from_doc(
            from_value(value)?,
            |r: &RationalText| r.value(),
        )?)),
        "boolean-odca" => {
            let w = odca_from_doc(from_value(value)?, |b: &u8| match b {
                0 | 1 => Ok(Rational::from_integer((*b).into())),
                _ => Err(err("boolean entries must be 0 or 1")),
            })?;
            Ok(Document::BooleanOdca(BooleanOdca::from_weighted(&w)?))
        }
        "weighted-oca" => Ok(Document::WeightedOca(oca_from_doc(from_value(value)?)?)),
        "config" => {
            let d: ConfigDoc = from_value(value)?;
            Ok(Document::Config(ConfigSpec {
                vector: vector_in(&d.vector)?,
                counter_state: d.counter_state,
                counter_value: d.counter_value,
            }))
        }
        "vector-space" => {
            let d: SpaceDoc = from_value(value)?;
            let basis = d.basis.iter().map(|v| vector_in(v)).collect::<Result<Vec<_>>>()?;
            Ok(Document::VectorSpace(VectorSpace::span(d.dim, &basis)?))
        }
        other => Err(err(format!("unknown document type {other:?}"))),
    }
}

fn letter_index(alphabet: &Alphabet, s: &str) -> Result<usize> {
    alphabet.index_of(s).ok_or_else(|| err(format!("unknown letter {s:?}")))
}

fn counter_table(
    moves: &[CounterMoveDoc],
    states: &[String],
    alphabet: &Alphabet,
    table: &str,
) -> Result<Vec<Vec<CounterMove>>> {
    let state = |s: &str| {
        states
            .iter()
            .position(|t| t == s)
            .ok_or_else(|| err(format!("{table}: unknown counter state {s:?}")))
    };
    let mut out: Vec<Vec<Option<CounterMove>>> = vec![vec![None; alphabet.len()]; states.len()];
    for m in moves {
        let (p, a) = (state(&m.from)?, letter_index(alphabet, &m.letter)?);
        if out[p][a].replace(CounterMove::new(state(&m.to)?, m.effect)).is_some() {
            return Err(err(format!("{table}: two moves for ({}, {})", m.from, m.letter)));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(p, row)| {
            row.into_iter()
                .enumerate()
                .map(|(a, m)| {
                    m.ok_or_else(|| {
                        err(format!(
                            "{table}: missing move for ({}, {})",
                            states[p],
                            alphabet.symbol(a)
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

fn odca_from_doc<T>(d: OdcaDoc<T>, value: impl Fn(&T) -> Result<Rational>) -> Result<WeightedOdca> {
    let alphabet = Alphabet::new(d.alphabet);
    let q = d.fsm_size;
    let vec = |v: &[T], what: &str| -> Result<Vector> {
        if v.len() != q {
            return Err(err(format!("{what} has dimension {}, expected {q}", v.len())));
        }
        Ok(Vector::new(v.iter().map(&value).collect::<Result<_>>()?))
    };
    let mat = |rows: &[Vec<T>], what: &str| -> Result<Matrix> {
        if rows.len() != q || rows.iter().any(|r| r.len() != q) {
            return Err(err(format!("{what} must be {q}x{q}")));
        }
        let rows = rows
            .iter()
            .map(|r| r.iter().map(&value).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(Matrix::from_rows(rows)?)
    };
    let initial = d
        .counter_states
        .iter()
        .position(|s| *s == d.initial_counter_state)
        .ok_or_else(|| err(format!("unknown initial counter state {:?}", d.initial_counter_state)))?;
    let counter = CounterStructure {
        zero: counter_table(&d.delta0, &d.counter_states, &alphabet, "delta0")?,
        positive: counter_table(&d.delta1, &d.counter_states, &alphabet, "delta1")?,
        states: d.counter_states,
        initial,
    };
    let mut delta: Vec<Option<[Matrix; 2]>> = vec![None; alphabet.len()];
    for lm in &d.delta {
        let a = letter_index(&alphabet, &lm.letter)?;
        let pair = [
            mat(&lm.zero, &format!("delta {}/zero", lm.letter))?,
            mat(&lm.pos, &format!("delta {}/pos", lm.letter))?,
        ];
        if delta[a].replace(pair).is_some() {
            return Err(err(format!("two matrix entries for letter {:?}", lm.letter)));
        }
    }
    let delta = delta
        .into_iter()
        .enumerate()
        .map(|(a, m)| m.ok_or_else(|| err(format!("missing matrices for letter {:?}", alphabet.symbol(a)))))
        .collect::<Result<_>>()?;
    WeightedOdca {
        lambda: vec(&d.lambda, "lambda")?,
        eta: vec(&d.eta, "eta")?,
        alphabet,
        counter,
        fsm_size: q,
        delta,
    }
    .validated()
}

fn odca_to_doc<T>(m: &WeightedOdca, kind: &str, value: impl Fn(&Rational) -> T) -> OdcaDoc<T> {
    let states = &m.counter.states;
    let moves = |table: &Vec<Vec<CounterMove>>| {
        table
            .iter()
            .enumerate()
            .flat_map(|(p, row)| {
                row.iter().enumerate().map(move |(a, mv)| CounterMoveDoc {
                    from: states[p].clone(),
                    letter: m.alphabet.symbol(a).to_owned(),
                    to: states[mv.target].clone(),
                    effect: mv.effect,
                })
            })
            .collect()
    };
    let vec = |v: &Vector| v.entries().iter().map(&value).collect();
    let mat = |x: &Matrix| {
        (0..x.rows())
            .map(|r| (0..x.cols()).map(|c| value(x.get(r, c))).collect())
            .collect()
    };
    OdcaDoc {
        kind: kind.to_owned(),
        version: VERSION.to_owned(),
        alphabet: m.alphabet.symbols().to_vec(),
        counter_states: states.clone(),
        initial_counter_state: states[m.counter.initial].clone(),
        delta0: moves(&m.counter.zero),
        delta1: moves(&m.counter.positive),
        fsm_size: m.fsm_size,
        lambda: vec(&m.lambda),
        delta: m
            .delta
            .iter()
            .enumerate()
            .map(|(a, [z, p])| LetterMatrices {
                letter: m.alphabet.symbol(a).to_owned(),
                zero: mat(z),
                pos: mat(p),
            })
            .collect(),
        eta: vec(&m.eta),
    }
}

fn oca_from_doc(d: OcaDoc) -> Result<WeightedOca> {
    let alphabet = Alphabet::new(d.alphabet);
    let trans = |ts: &[OcaTransitionDoc]| -> Result<Vec<OcaTransition>> {
        ts.iter()
            .map(|t| {
                Ok(OcaTransition {
                    from: t.from,
                    letter: letter_index(&alphabet, &t.letter)?,
                    to: t.to,
                    effect: t.effect,
                    weight: t.weight.value()?,
                })
            })
            .collect()
    };
    let oca = WeightedOca {
        size: d.size,
        lambda: vector_in(&d.lambda)?,
        eta: vector_in(&d.eta)?,
        trans0: trans(&d.trans0)?,
        trans1: trans(&d.trans1)?,
        alphabet: alphabet.clone(),
    };
    let violations = oca.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidAutomaton(violations));
    }
    Ok(oca)
}

fn oca_to_doc(m: &WeightedOca) -> OcaDoc {
    let trans = |ts: &[OcaTransition]| {
        ts.iter()
            .map(|t| OcaTransitionDoc {
                from: t.from,
                letter: m.alphabet.symbol(t.letter).to_owned(),
                to: t.to,
                effect: t.effect,
                weight: RationalText::of(&t.weight),
            })
            .collect()
    };
    OcaDoc {
        kind: "weighted-oca".to_owned(),
        version: VERSION.to_owned(),
        alphabet: m.alphabet.symbols().to_vec(),
        size: m.size,
        lambda: vector_out(&m.lambda),
        eta: vector_out(&m.eta),
        trans0: trans(&m.trans0),
        trans1: trans(&m.trans1),
    }
}

fn pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}

/// Serializes any document in canonical form.
pub fn to_json(doc: &Document) -> String {
    match doc {
        Document::WeightedOdca(m) => pretty(&odca_to_doc(m, "weighted-odca", RationalText::of)),
        Document::BooleanOdca(b) => pretty(&odca_to_doc(&b.to_weighted(), "boolean-odca", |r| {
            u8::from(!num_traits::Zero::is_zero(r))
        })),
        Document::WeightedOca(m) => pretty(&oca_to_doc(m)),
        Document::Config(c) => pretty(&ConfigDoc {
            kind: "config".to_owned(),
            version: VERSION.to_owned(),
            vector: vector_out(&c.vector),
            counter_state: c.counter_state.clone(),
            counter_value: c.counter_value,
        }),
        Document::VectorSpace(v) => pretty(&SpaceDoc {
            kind: "vector-space".to_owned(),
            version: VERSION.to_owned(),
            dim: v.ambient_dim(),
            basis: v.basis().iter().map(vector_out).collect(),
        }),
    }
}

pub fn weighted_odca_to_json(m: &WeightedOdca) -> String {
    to_json(&Document::WeightedOdca(m.clone()))
}

pub fn boolean_odca_to_json(m: &BooleanOdca) -> String {
    to_json(&Document::BooleanOdca(m.clone()))
}

pub fn weighted_oca_to_json(m: &WeightedOca) -> String {
    to_json(&Document::WeightedOca(m.clone()))
}

/// Parses a document that must be a weighted ODCA.
pub fn parse_weighted_odca(text: &str) -> Result<WeightedOdca> {
    match parse_document(text)? {
        Document::WeightedOdca(m) => Ok(m),
        other => Err(err(format!("expected weighted-odca, found {}", other.type_name()))),
    }
}

pub fn parse_boolean_odca(text: &str) -> Result<BooleanOdca> {
    match parse_document(text)? {
        Document::BooleanOdca(m) => Ok(m),
        other => Err(err(format!("expected boolean-odca, found {}", other.type_name()))),
    }
}

pub fn parse_weighted_oca(text: &str) -> Result<WeightedOca> {
    match parse_document(text)? {
        Document::WeightedOca(m) => Ok(m),
        other => Err(err(format!("expected weighted-oca, found {}", other.type_name()))),
    }
}
