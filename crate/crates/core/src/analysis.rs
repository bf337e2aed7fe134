//! Regularity and covering.
//!
//! An ODCA is regular when some weighted automaton recognises the same
//! function. It is not regular exactly when a run climbs to a high counter
//! value, comes back down below `KN = |C|·|Q|`, and ends in a configuration
//! that no configuration of the underlying uninitialised automaton matches
//! on words of length at most `KN`. The matching configurations form the
//! spaces `W^{p,m}`.
//!
//! Covering asks whether every initialisation of one uninitialised machine
//! is matched by some initialisation of another; linearity reduces this to
//! the unit vectors of each counter state.

use std::collections::HashMap;
use std::time::Instant;

use crate::equiv::{config_equiv_with, EquivOptions};
use crate::error::{Error, Result};
use crate::exactla::{image_space, solve_linear, Matrix, Rational, SparseMatrix, Vector, VectorSpace};
use crate::model::{run, sign, underlying_wa, Configuration, ControlledWa, LevelMatrices, WeightedOdca, Word};
use crate::wa_algo::{wa_covs_reach_with, SearchStats, TargetSpec};

/// The spaces `W^{p,m}` for every counter state `p` and `m < KN`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WSpaceTable {
    pub kn: usize,
    pub spaces: HashMap<(usize, usize), VectorSpace>,
}

impl WSpaceTable {
    pub fn get(&self, p: usize, m: usize) -> Option<&VectorSpace> {
        self.spaces.get(&(p, m))
    }
}

/// Joint observation functionals of a configuration `(·, p, m)` and of the
/// underlying automaton, for all words up to the horizon.
///
/// Column `[F; G]` stands for a word `w`: `F` is `x ↦ f(w, (x, p, m))` and
/// `G` is `y ↦ f_uwa(w, y)`. The spans are computed level by level: words of
/// length at most `d + 1` from `c` are a letter followed by words of length
/// at most `d` from the successor of `c`.
fn observation_spaces(odca: &WeightedOdca) -> (usize, HashMap<(usize, usize), VectorSpace>) {
    let q = odca.fsm_size;
    let kn = odca.k();
    let uwa = underlying_wa(odca);
    let dim = q + kn;
    let top = 2 * kn;
    let base = odca.eta.concat(&uwa.eta);
    let configs: Vec<(usize, usize)> = (0..odca.counter.len())
        .flat_map(|p| (0..=top).map(move |m| (p, m)))
        .collect();
    let initial = VectorSpace::span(dim, [&base]).expect("dimension");
    let mut spaces: HashMap<(usize, usize), VectorSpace> = configs.iter().map(|&c| (c, initial.clone())).collect();
    let extend = |col: &Vector, a: usize, m: usize| -> Vector {
        let f = Vector::new(col.entries()[..q].to_vec());
        let g = Vector::new(col.entries()[q..].to_vec());
        let f2 = odca.delta[a][sign(m)].mul_column(&f).expect("dimension");
        let g2 = uwa.delta[a].mul_column(&g).expect("dimension");
        f2.concat(&g2)
    };
    for _ in 0..kn {
        let mut next = spaces.clone();
        let mut changed = false;
        for &(p, m) in &configs {
            for a in 0..odca.alphabet.len() {
                let (p2, m2) = odca.counter.step(p, m, a);
                let Some(succ) = spaces.get(&(p2, m2)) else {
                    continue;
                };
                let target = next.get_mut(&(p, m)).expect("config");
                for col in succ.basis() {
                    changed |= target.insert(&extend(&col, a, m)).expect("dimension");
                }
            }
        }
        spaces = next;
        if !changed {
            break;
        }
    }
    (kn, spaces)
}

/// Computes `W^{p,m}` for all `p` and `m < KN`.
pub fn w_space_table(odca: &WeightedOdca) -> WSpaceTable {
    let q = odca.fsm_size;
    let (kn, obs) = observation_spaces(odca);
    let mut spaces = HashMap::new();
    for p in 0..odca.counter.len() {
        for m in 0..kn {
            let cols = obs[&(p, m)].basis();
            let r = cols.len();
            let mut f = Matrix::zeros(q, r);
            let mut g = Matrix::zeros(kn, r);
            for (k, col) in cols.iter().enumerate() {
                for i in 0..q {
                    f.set(i, k, col[i].clone());
                }
                for i in 0..kn {
                    g.set(i, k, col[q + i].clone());
                }
            }
            let w = image_space(&g).preimage(&f).expect("dimension");
            spaces.insert((p, m), w);
        }
    }
    WSpaceTable { kn, spaces }
}

/// Verdict of [`is_regular`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    /// `u` climbs into the high counter band; `uv` ends outside `W`.
    NotRegular {
        u: Word,
        v: Word,
    },
}

/// The counter range `[KN² + KN, 2KN² + KN]` a non-regularity witness must visit.
pub fn high_band(kn: usize) -> (usize, usize) {
    (kn * kn + kn, 2 * kn * kn + kn)
}

/// Decides regularity.
pub fn is_regular(odca: &WeightedOdca) -> Result<Regularity> {
    is_regular_with(odca, None)
}

/// [`is_regular`] with a cooperative deadline.
pub fn is_regular_with(odca: &WeightedOdca, deadline: Option<Instant>) -> Result<Regularity> {
    let table = w_space_table(odca);
    let kn = table.kn;
    let (lo, hi) = high_band(kn);
    let bound = hi + kn * kn;
    let (c, q, sigma) = (odca.counter.len(), odca.fsm_size, odca.alphabet.len());
    let control = |p: usize, m: usize, flag: bool| ((p * (bound + 1) + m) << 1) | usize::from(flag);
    let dead = c * (bound + 1) * 2;
    let mut pool = LevelMatrices::new(odca, bound);
    let mut ctrl = vec![Vec::new(); dead + 1];
    let mut step_matrix = vec![Vec::new(); dead + 1];
    for p in 0..c {
        for m in 0..=bound {
            for flag in [false, true] {
                let id = control(p, m, flag);
                for a in 0..sigma {
                    let mv = odca.counter.mv(p, m, a);
                    let next = m as i64 + i64::from(mv.effect);
                    if next > bound as i64 {
                        ctrl[id].push(dead);
                        step_matrix[id].push(LevelMatrices::ZERO);
                    } else {
                        let next = next as usize;
                        let flag2 = flag || (lo..=hi).contains(&next);
                        ctrl[id].push(control(mv.target, next, flag2));
                        step_matrix[id].push(pool.get(a, m, mv.effect));
                    }
                }
            }
        }
    }
    ctrl[dead] = vec![dead; sigma];
    step_matrix[dead] = vec![LevelMatrices::ZERO; sigma];
    let size = q * (bound + 1);
    let cwa = ControlledWa {
        alphabet: odca.alphabet.clone(),
        num_controls: dead + 1,
        ctrl,
        step_matrix,
        matrices: pool.matrices,
        initial_control: control(odca.counter.initial, 0, false),
        wa_size: size,
        lambda: odca.lambda.to_sparse(),
        eta: Vector::new((0..size).map(|i| odca.eta[i % q].clone()).collect()),
        dead_control: Some(dead),
    };
    let mut targets = TargetSpec::new();
    for p in 0..c {
        for m in 0..kn.min(bound + 1) {
            let w = table.get(p, m).expect("table entry");
            targets.insert(control(p, m, true), w.embed_block(m, bound + 1));
        }
    }
    let start = odca.lambda.concat(&Vector::zeros(size - q));
    let witness = wa_covs_reach_with(
        &cwa,
        cwa.initial_control,
        &start,
        &targets,
        deadline,
        &mut SearchStats::default(),
    )?;
    Ok(match witness {
        None => Regularity::Regular,
        Some(z) => {
            let (mut p, mut n) = (odca.counter.initial, 0);
            let mut split = z.len();
            for (i, &a) in z.iter().enumerate() {
                (p, n) = odca.counter.step(p, n, a);
                if (lo..=hi).contains(&n) {
                    split = i + 1;
                    break;
                }
            }
            Regularity::NotRegular {
                u: z[..split].to_vec(),
                v: z[split..].to_vec(),
            }
        }
    })
}

/// Where the covering procedure gave up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverStage {
    /// The target configuration computes a non-zero function that no
    /// distribution reproduces even on its first counterexample.
    ZeroFunctionCheck,
    /// The accumulated equations became inconsistent later on.
    Learning,
}

/// Distributions of the covering machine matching the unit vectors of one
/// counter state of the covered machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverWitness {
    pub covered_state: usize,
    pub covering_state: usize,
    /// `alphas[j]` matches the configuration `(e_j, covered_state, 0)`.
    pub alphas: Vec<Vector>,
}

/// Verdict of [`covers`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Covering {
    Covered(Vec<CoverWitness>),
    NotCovered {
        counter_state: usize,
        direction: usize,
        stage: CoverStage,
    },
}

impl Covering {
    pub fn is_covered(&self) -> bool {
        matches!(self, Covering::Covered(_))
    }
}

/// Weights `f((e_i, p, 0), w)` for every unit vector `e_i`.
fn unit_weights(m: &WeightedOdca, p: usize, w: &[usize]) -> Result<Vector> {
    let r = run(m, &Configuration::new(Vector::zeros(m.fsm_size), p, 0), w)?;
    Ok(r.weight_effect.mul_column(&m.eta)?)
}

fn learn(
    a2: &WeightedOdca,
    p: usize,
    a1: &WeightedOdca,
    target: &Configuration,
    opts: &EquivOptions,
) -> Result<std::result::Result<Vector, CoverStage>> {
    let n = a2.fsm_size;
    let mut equations: Vec<(Vector, Rational)> = Vec::new();
    let mut alpha = Vector::zeros(n);
    // every round adds an equation independent of the previous ones
    for _ in 0..=n + 1 {
        let v = config_equiv_with(a2, &Configuration::new(alpha.clone(), p, 0), a1, target, opts)?;
        let Some(w) = v.witness else {
            return Ok(Ok(alpha));
        };
        let coef = unit_weights(a2, p, &w)?;
        let rhs = crate::model::eval_from(a1, target, &w)?;
        equations.push((coef, rhs));
        match solve_linear(&equations, n) {
            Some(x) => alpha = x,
            None if equations.len() == 1 => return Ok(Err(CoverStage::ZeroFunctionCheck)),
            None => return Ok(Err(CoverStage::Learning)),
        }
    }
    unreachable!("more independent equations than unknowns")
}

/// Whether `a2` covers `a1`: for every counter state `q` of `a1` there is a
/// counter state `p` of `a2` such that each `(e_j, q, 0)` has an equivalent
/// `(α_j, p, 0)`. Initial vectors and counter states of both are ignored.
pub fn covers(a2: &WeightedOdca, a1: &WeightedOdca, bound: Option<usize>) -> Result<Covering> {
    covers_with(
        a2,
        a1,
        &EquivOptions {
            bound,
            ..EquivOptions::default()
        },
    )
}

/// [`covers`] with full equivalence options.
pub fn covers_with(a2: &WeightedOdca, a1: &WeightedOdca, opts: &EquivOptions) -> Result<Covering> {
    if a1.alphabet != a2.alphabet {
        return Err(Error::AlphabetMismatch {
            left: a2.alphabet.symbols().to_vec(),
            right: a1.alphabet.symbols().to_vec(),
        });
    }
    let mut found = Vec::new();
    for q in 0..a1.counter.len() {
        let mut first_failure = None;
        let mut success = None;
        'candidates: for p in 0..a2.counter.len() {
            let mut alphas = Vec::with_capacity(a1.fsm_size);
            for j in 0..a1.fsm_size {
                let target = Configuration::new(Vector::unit(a1.fsm_size, j), q, 0);
                match learn(a2, p, a1, &target, opts)? {
                    Ok(alpha) => alphas.push(alpha),
                    Err(stage) => {
                        first_failure.get_or_insert((j, stage));
                        continue 'candidates;
                    }
                }
            }
            success = Some(CoverWitness {
                covered_state: q,
                covering_state: p,
                alphas,
            });
            break;
        }
        match success {
            Some(w) => found.push(w),
            None => {
                let (direction, stage) = first_failure.unwrap_or((0, CoverStage::ZeroFunctionCheck));
                return Ok(Covering::NotCovered {
                    counter_state: q,
                    direction,
                    stage,
                });
            }
        }
    }
    Ok(Covering::Covered(found))
}

/// Mutual covering.
pub fn coverable_equiv(a1: &WeightedOdca, a2: &WeightedOdca, bound: Option<usize>) -> Result<bool> {
    Ok(covers(a2, a1, bound)?.is_covered() && covers(a1, a2, bound)?.is_covered())
}

/// The disjoint union of two machines over the same alphabet: states and
/// counter states side by side, initialised like `a`.
pub fn disjoint_union(a: &WeightedOdca, b: &WeightedOdca) -> Result<WeightedOdca> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch {
            left: a.alphabet.symbols().to_vec(),
            right: b.alphabet.symbols().to_vec(),
        });
    }
    let (qa, qb) = (a.fsm_size, b.fsm_size);
    let ca = a.counter.len();
    let mut counter = a.counter.clone();
    counter.states.extend(b.counter.states.iter().map(|s| format!("{s}'")));
    let shift = |rows: &Vec<Vec<crate::model::CounterMove>>| {
        rows.iter()
            .map(|row| {
                row.iter()
                    .map(|m| crate::model::CounterMove::new(m.target + ca, m.effect))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    counter.zero.extend(shift(&b.counter.zero));
    counter.positive.extend(shift(&b.counter.positive));
    let block = |x: &Matrix, y: &Matrix| {
        SparseMatrix::from_dense(x)
            .direct_sum(&SparseMatrix::from_dense(y))
            .to_dense()
    };
    Ok(WeightedOdca {
        alphabet: a.alphabet.clone(),
        counter,
        fsm_size: qa + qb,
        lambda: a.lambda.concat(&Vector::zeros(qb)),
        delta: a
            .delta
            .iter()
            .zip(&b.delta)
            .map(|([az, ap], [bz, bp])| [block(az, bz), block(ap, bp)])
            .collect(),
        eta: a.eta.concat(&b.eta),
    })
}
