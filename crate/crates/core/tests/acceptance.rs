//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use odca::analysis::{coverable_equiv, covers, is_regular, CoverStage, Covering, Regularity};
use odca::boolean::{bool_equiv, bool_eval, determinize, is_deterministic};
use odca::equiv::{odca_equiv, EquivResult};
use odca::exactla::{int, ratio, Matrix, Rational, Vector};
use odca::fixtures;
use odca::model::{eval, run, trace, unfold, Configuration, WeightedOdca, Word};
use odca::oracle::{brute_equiv, brute_eval, brute_reach, hankel_rank, peak_counter, random_odca, random_space};
use odca::reach::{covs_cover, covs_reach};
use odca::translate::{check_counter_determinacy, oca_eval, oca_to_odca, odca_to_oca, WeightedOca};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || {
        format!("{what} took {} ms, limit {} ms", took.as_millis(), limit.as_millis())
    })
}

fn all_words(alphabet_size: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..alphabet_size).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn c1_worked_example() -> Check {
    let start = Instant::now();
    let m = fixtures::prefix_aware_decimal();
    let w = m.parse_word("abaaab").map_err(|e| e.to_string())?;
    let value = eval(&m, &w).map_err(|e| e.to_string())?;
    ensure(value == int(6), || format!("f(abaaab) = {value}"))?;
    let steps = trace(&m, &m.initial_config(), &w).map_err(|e| e.to_string())?;
    // the fifth configuration follows the figure and the printed matrix
    let expected = [
        ([1, 0, 0, 0], 0, 0),
        ([1, 0, 0, 0], 0, 1),
        ([0, 1, 0, 0], 1, 0),
        ([0, 0, 1, 0], 2, 0),
        ([0, 0, 1, 1], 2, 1),
        ([0, 0, 1, 3], 2, 2),
        ([0, 0, 1, 6], 2, 1),
    ];
    ensure(steps.len() == expected.len(), || {
        format!("{} configurations", steps.len())
    })?;
    for (i, (c, (x, p, n))) in steps.iter().zip(expected).enumerate() {
        let want = Configuration::new(Vector::from_ints(&x), p, n);
        ensure(*c == want, || format!("configuration {i}: {c:?}, expected {want:?}"))?;
    }
    let r = run(&m, &m.initial_config(), &w).map_err(|e| e.to_string())?;
    ensure(r.counter_effect == 1, || format!("counter effect {}", r.counter_effect))?;
    let printed = Matrix::from_int_rows(&[&[0, 0, 1, 6], &[0, 0, 1, 14], &[0, 0, 1, 46], &[0, 0, 0, 64]])
        .map_err(|e| e.to_string())?;
    ensure(r.weight_effect == printed, || {
        format!("weight effect {:?}", r.weight_effect)
    })?;
    within(start, Duration::from_secs(1), "evaluation")?;
    Ok("f(abaaab) = 6, run, counter effect 1 and weight-effect matrix reproduced".into())
}

fn c2_unfolding() -> Check {
    let start = Instant::now();
    let mut checked = 0;
    for m in [fixtures::prefix_aware_decimal(), fixtures::equal_prefix_power()] {
        let cwa = unfold(&m, 10);
        for w in all_words(m.alphabet.len(), 8) {
            let direct = brute_eval(&m, &w);
            let unfolded = cwa.eval(&w);
            ensure(direct == unfolded, || format!("word {w:?}: {direct} vs {unfolded}"))?;
            checked += 1;
        }
    }
    ensure(checked >= 500, || format!("only {checked} words"))?;
    within(start, Duration::from_secs(10), "unfolding check")?;
    Ok(format!("{checked} words agree with the 10-unfolding"))
}

struct Instance {
    odca: WeightedOdca,
    config: Configuration,
    space: odca::VectorSpace,
    targets: Vec<usize>,
    m: usize,
}

fn pool() -> Vec<Rational> {
    vec![int(-1), int(0), int(1), ratio(1, 2)]
}

fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + seed);
    let q = rng.gen_range(1..=3);
    let c = rng.gen_range(1..=3);
    let odca = random_odca(q, c, 2, Some(&pool()), seed);
    let p = pool();
    let x = Vector::new((0..q).map(|_| p[rng.gen_range(0..p.len())].clone()).collect());
    let config = Configuration::new(x, rng.gen_range(0..c), rng.gen_range(0..=3));
    let space = random_space(q, q, &mut rng);
    let mut targets: Vec<usize> = (0..c).filter(|_| rng.gen_bool(0.5)).collect();
    if targets.is_empty() {
        targets.push(rng.gen_range(0..c));
    }
    Instance {
        odca,
        config,
        space,
        targets,
        m: rng.gen_range(0..=3),
    }
}

const WORD_CAP: usize = 8;
const COUNTER_CAP: usize = 12;
const EXTENDED_CAP: usize = 16;

/// Compares an algorithmic witness against enumeration. Witnesses beyond
/// the word cap are confirmed by enumerating up to their own length.
fn compare(alg: &Option<Word>, brute: impl Fn(usize, usize) -> Option<Word>) -> Result<(), String> {
    let capped = brute(WORD_CAP, COUNTER_CAP);
    match alg {
        Some(w) if w.len() > WORD_CAP => {
            ensure(capped.is_none(), || {
                format!("enumeration found {capped:?}, algorithm {w:?}")
            })?;
            ensure(w.len() <= EXTENDED_CAP, || {
                format!("witness of length {} beyond the extended check", w.len())
            })?;
            let extended = brute(w.len(), usize::MAX);
            ensure(extended.as_ref() == Some(w), || {
                format!("extended enumeration {extended:?}, algorithm {w:?}")
            })
        }
        _ => ensure(*alg == capped, || format!("algorithm {alg:?}, enumeration {capped:?}")),
    }
}

fn c3_c4_reach() -> (Check, Check) {
    let start = Instant::now();
    let mut witnesses = Vec::new();
    let mut found = 0;
    for seed in 0..200 {
        let inst = instance(seed);
        let alg = match covs_reach(&inst.odca, &inst.config, &inst.space, &inst.targets, inst.m, None) {
            Ok(w) => w,
            Err(e) => return (Err(format!("seed {seed}: {e}")), Err("not run".into())),
        };
        let r = compare(&alg, |cap, counter_cap| {
            brute_reach(
                &inst.odca,
                &inst.config,
                &inst.space,
                &inst.targets,
                Some(inst.m),
                cap,
                counter_cap,
            )
        });
        if let Err(e) = r {
            return (Err(format!("seed {seed}: {e}")), Err("not run".into()));
        }
        if let Some(w) = alg {
            found += 1;
            witnesses.push((inst, w));
        }
    }
    if let Err(e) = within(start, Duration::from_secs(120), "reachability differential test") {
        return (Err(e), Err("not run".into()));
    }
    let c3 = Ok(format!("200/200 instances agree ({found} reachable)"));
    let mut violations = Vec::new();
    for (inst, w) in &witnesses {
        let k = inst.odca.fsm_size * inst.odca.counter.len();
        let top = inst.config.n.max(inst.m);
        if w.len() > k * k * k + top * k {
            violations.push(format!("length {} > {}", w.len(), k * k * k + top * k));
        }
        let peak = peak_counter(&inst.odca, &inst.config, w);
        if peak >= top + k * k {
            violations.push(format!("peak {peak} >= {}", top + k * k));
        }
    }
    let c4 = if violations.is_empty() {
        Ok(format!(
            "{} witnesses within the length and counter bounds",
            witnesses.len()
        ))
    } else {
        Err(violations.join("; "))
    };
    (c3, c4)
}

fn c5_cover() -> Check {
    let start = Instant::now();
    let mut found = 0;
    for seed in 0..200 {
        let inst = instance(1000 + seed);
        let alg = covs_cover(&inst.odca, &inst.config, &inst.space, &inst.targets, None)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        compare(&alg, |cap, counter_cap| {
            brute_reach(
                &inst.odca,
                &inst.config,
                &inst.space,
                &inst.targets,
                None,
                cap,
                counter_cap,
            )
        })
        .map_err(|e| format!("seed {seed}: {e}"))?;
        found += usize::from(alg.is_some());
    }
    within(start, Duration::from_secs(120), "coverability differential test")?;
    Ok(format!("200/200 instances agree ({found} coverable)"))
}

fn perturbed(m: &WeightedOdca, rng: &mut ChaCha8Rng) -> WeightedOdca {
    let mut b = m.clone();
    match rng.gen_range(0..3) {
        0 => {
            let i = rng.gen_range(0..b.fsm_size);
            let e = b.eta[i].clone() + int(1);
            b.eta.set(i, e);
        }
        1 => {
            let a = rng.gen_range(0..b.alphabet.len());
            let d = rng.gen_range(0..2);
            let (i, j) = (rng.gen_range(0..b.fsm_size), rng.gen_range(0..b.fsm_size));
            let e = b.delta[a][d].get(i, j).clone() + ratio(1, 2);
            b.delta[a][d].set(i, j, e);
        }
        _ => {}
    }
    b
}

fn c6_equivalence() -> Check {
    let start = Instant::now();
    let a = fixtures::prefix_aware_decimal();
    let b = fixtures::prefix_aware_decimal_eta2();
    let v = odca_equiv(&a, &b, Some(8)).map_err(|e| e.to_string())?;
    let abaa = a.parse_word("abaa").map_err(|e| e.to_string())?;
    ensure(
        v.result == EquivResult::NotEquivalent && v.witness.as_ref() == Some(&abaa),
        || format!("verdict {v:?}"),
    )?;
    let brute = brute_equiv(&a, &b, 6);
    ensure(brute == v.witness, || format!("enumeration gives {brute:?}"))?;
    let s = odca_equiv(&a, &a, Some(8)).map_err(|e| e.to_string())?;
    ensure(s.is_equivalent(), || "self-equivalence failed".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut eq, mut neq) = (0, 0);
    for seed in 0..100u64 {
        let q = rng.gen_range(1..=3);
        let c = rng.gen_range(1..=3);
        let x = random_odca(q, c, 2, Some(&pool()), 7000 + seed);
        let y = if rng.gen_bool(0.25) {
            random_odca(
                rng.gen_range(1..=3),
                rng.gen_range(1..=3),
                2,
                Some(&pool()),
                9000 + seed,
            )
        } else {
            perturbed(&x, &mut rng)
        };
        let v = odca_equiv(&x, &y, Some(12)).map_err(|e| format!("pair {seed}: {e}"))?;
        let brute = brute_equiv(&x, &y, 8);
        match &v.witness {
            Some(w) if w.len() > 8 => {
                ensure(brute.is_none(), || format!("pair {seed}: enumeration {brute:?}"))?;
                ensure(brute_eval(&x, w) != brute_eval(&y, w), || {
                    format!("pair {seed}: {w:?} does not distinguish")
                })?;
            }
            _ => ensure(v.witness == brute, || {
                format!("pair {seed}: algorithm {:?}, enumeration {brute:?}", v.witness)
            })?,
        }
        if v.is_equivalent() {
            eq += 1;
        } else {
            neq += 1;
        }
    }
    within(start, Duration::from_secs(120), "equivalence checks")?;
    Ok(format!(
        "witness abaa, self-equivalence, 100 random pairs agree ({eq} equivalent, {neq} not)"
    ))
}

/// Hankel ranks of the decimal fixture for L = 2, 3, 4, 5.
const FROZEN_HANKEL_RANKS: [usize; 4] = [1, 4, 8, 12];

fn c7_regularity() -> Check {
    let r = is_regular(&fixtures::counter_oblivious()).map_err(|e| e.to_string())?;
    ensure(r == Regularity::Regular, || format!("counter-oblivious: {r:?}"))?;
    let m = fixtures::prefix_aware_decimal();
    let r = is_regular(&m).map_err(|e| e.to_string())?;
    ensure(matches!(r, Regularity::NotRegular { .. }), || {
        "decimal fixture reported regular".into()
    })?;
    let ranks: Vec<usize> = (2..=5).map(|l| hankel_rank(|w| brute_eval(&m, w), 2, l)).collect();
    ensure(ranks.windows(2).all(|p| p[0] < p[1]), || {
        format!("ranks {ranks:?} not increasing")
    })?;
    ensure(ranks == FROZEN_HANKEL_RANKS, || {
        format!("ranks {ranks:?}, frozen {FROZEN_HANKEL_RANKS:?}")
    })?;
    Ok(format!("regular / not regular as expected, Hankel ranks {ranks:?}"))
}

fn c8_covering() -> Check {
    let bound = Some(6);
    for (name, m) in fixtures::weighted_fixtures() {
        let c = covers(&m, &m, bound).map_err(|e| format!("{name}: {e}"))?;
        ensure(c.is_covered(), || format!("{name} does not cover itself"))?;
        ensure(coverable_equiv(&m, &m, bound).map_err(|e| e.to_string())?, || {
            format!("{name} not coverable-equivalent to itself")
        })?;
    }
    let zero = fixtures::prefix_aware_decimal_zero();
    let c = covers(&zero, &fixtures::prefix_aware_decimal(), bound).map_err(|e| e.to_string())?;
    ensure(
        matches!(
            c,
            Covering::NotCovered {
                stage: CoverStage::ZeroFunctionCheck,
                ..
            }
        ),
        || format!("zero machine: {c:?}"),
    )?;
    Ok("fixtures cover themselves; zero machine rejected at the zero-function check".into())
}

fn c9_boolean() -> Check {
    let l1 = fixtures::l1();
    let d = determinize(&l1).map_err(|e| e.to_string())?;
    let words = all_words(l1.alphabet.len(), 8);
    for w in &words {
        let (x, y) = (bool_eval(&l1, w), bool_eval(&d, w));
        ensure(x.is_ok() && x == y, || format!("word {w:?}: {x:?} vs {y:?}"))?;
    }
    ensure(is_deterministic(&d, None), || {
        "determinized machine is not deterministic".into()
    })?;
    let same = bool_equiv(&l1, &l1, Some(8)).map_err(|e| e.to_string())?;
    ensure(same.is_equivalent(), || "L1 not equivalent to itself".into())?;
    let flipped = bool_equiv(&l1, &fixtures::l1_eta_flipped(), Some(8)).map_err(|e| e.to_string())?;
    let aba = l1.alphabet.parse_word("aba").map_err(|e| e.to_string())?;
    ensure(flipped.witness.as_ref() == Some(&aba), || {
        format!("flipped: {flipped:?}")
    })?;
    Ok(format!(
        "{} words agree after determinization; witness aba",
        words.len()
    ))
}

/// Counter values reached by runs of nonzero weight on `w`.
fn oca_counters(oca: &WeightedOca, w: &[usize]) -> BTreeSet<usize> {
    let mut configs: BTreeSet<(usize, usize)> = (0..oca.size)
        .filter(|&i| oca.lambda[i] != int(0))
        .map(|i| (i, 0))
        .collect();
    for &a in w {
        let mut next = BTreeSet::new();
        for &(i, n) in &configs {
            let table = if n == 0 { &oca.trans0 } else { &oca.trans1 };
            for t in table
                .iter()
                .filter(|t| t.from == i && t.letter == a && t.weight != int(0))
            {
                let m = n as i64 + t.effect as i64;
                if m >= 0 {
                    next.insert((t.to, m as usize));
                }
            }
        }
        configs = next;
    }
    configs.into_iter().map(|(_, n)| n).collect()
}

fn c10_translation() -> Check {
    for m in [fixtures::prefix_aware_decimal(), fixtures::equal_prefix_power()] {
        let oca = odca_to_oca(&m);
        let back = oca_to_odca(&oca).map_err(|e| e.to_string())?;
        for w in all_words(m.alphabet.len(), 8) {
            let f = brute_eval(&m, &w);
            let g = oca_eval(&oca, &w).map_err(|e| e.to_string())?;
            let h = brute_eval(&back, &w);
            ensure(f == g && f == h, || format!("word {w:?}: {f}, {g}, {h}"))?;
        }
    }
    let bad = fixtures::violating_oca();
    let v = match check_counter_determinacy(&bad) {
        Ok(_) => return Err("violating OCA accepted".into()),
        Err(v) => v,
    };
    let reached = oca_counters(&bad, &v.word);
    ensure(
        v.counters.0 != v.counters.1 && reached.contains(&v.counters.0) && reached.contains(&v.counters.1),
        || {
            format!(
                "witness {:?} with counters {:?}, runs reach {reached:?}",
                v.word, v.counters
            )
        },
    )?;
    Ok(format!(
        "round trips preserve f on words up to 8; violation witnessed by {:?}",
        bad.alphabet.format_word(&v.word)
    ))
}

fn c11_exactness() -> Check {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("..");
    let float_types = [["f", "32"].concat(), ["f", "64"].concat()];
    let mut files = 0;
    let mut offenders = Vec::new();
    let mut stack = vec![root];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "rs") {
                files += 1;
                let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
                let words = text.split(|c: char| !c.is_alphanumeric() && c != '_');
                if words
                    .into_iter()
                    .any(|t| float_types.iter().any(|f| t == f || t.ends_with(&format!("_{f}"))))
                {
                    offenders.push(path.display().to_string());
                }
            }
        }
    }
    ensure(offenders.is_empty(), || format!("floating point in {offenders:?}"))?;
    ensure(
        std::any::type_name::<Rational>().contains("Ratio") && std::any::type_name::<Rational>().contains("BigInt"),
        || format!("scalar type is {}", std::any::type_name::<Rational>()),
    )?;
    Ok(format!(
        "no floating-point types in {files} source files; scalars are arbitrary-precision rationals"
    ))
}

fn main() {
    let mut results: Vec<(usize, &str, Check)> = vec![
        (1, "worked example", c1_worked_example()),
        (2, "unfolding soundness", c2_unfolding()),
    ];
    let (c3, c4) = c3_c4_reach();
    results.push((3, "reachability differential", c3));
    results.push((4, "bound properties", c4));
    results.push((5, "coverability differential", c5_cover()));
    results.push((6, "equivalence", c6_equivalence()));
    results.push((7, "regularity", c7_regularity()));
    results.push((8, "covering", c8_covering()));
    results.push((9, "boolean", c9_boolean()));
    results.push((10, "translation", c10_translation()));
    results.push((11, "exactness", c11_exactness()));
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
