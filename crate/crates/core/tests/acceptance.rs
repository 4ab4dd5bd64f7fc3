//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion does. Criteria run one after another in
//! a single test so that timings are not disturbed by sibling tests.

mod common;

use std::time::{Duration, Instant};

use common::*;
use jsonlogic::automaton::{automaton_accepts, complement, jsl_to_automaton, recursive_to_automaton};
use jsonlogic::jnl::{eval_unary, parse_jnl, JnlUnary};
use jsonlogic::jsl::{eval_set, parse_jsl, validate};
use jsonlogic::recursive::{eval_recursive, even_path_expr, parse_rjsl, unfold};
use jsonlogic::sat::{encode_3sat, encode_qbf, sat_bounded, Bounds, Literal, Qbf, Quantifier, SatInput};
use jsonlogic::schema::{jsl_to_schema, parse_schema, rjsl_to_schema, schema_to_jsl, validate_schema, Compiled};
use jsonlogic::translate::{jnl_to_jsl, jsl_to_jnl};
use jsonlogic::{parse_document, JsonTree};
use rand::seq::SliceRandom;
use rand::Rng;

/// Results that are out of reach of any terminating test, and what the
/// crate offers in their place.
pub const SKIP_LIST: &[(&str, &str)] = &[
    (
        "undecidability of satisfiability for non-deterministic recursive JNL with path equality",
        "not decidable; `sat --logic jnl` on formulas with eq(α,β) runs ExhaustiveStrategy and answers UNSAT only up to the given bounds",
    ),
    (
        "PSPACE procedure for satisfiability of non-recursive JNL and of JSL without unique",
        "AutomatonStrategy bounded search (sat::sat_bounded)",
    ),
    (
        "EXPSPACE procedure for satisfiability of JSL with unique",
        "AutomatonStrategy bounded search with per-type representative multisets",
    ),
    (
        "EXPTIME procedure for satisfiability of recursive JNL without path equality",
        "jnl_to_rjsl followed by AutomatonStrategy bounded search",
    ),
    (
        "2EXPTIME emptiness test for J-automata via counting trees per state set",
        "AutomatonStrategy: bottom-up type construction up to the depth and width bounds",
    ),
];

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, id: usize, name: &str, pass: bool, detail: String, elapsed: Duration) {
        let line = format!(
            "criterion {id:>2} {:<4} {name}: {detail} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        println!("{line}");
        self.lines.push((pass, line));
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Best of several runs, each repeating the closure until it has taken
/// long enough to measure.
fn measure(mut f: impl FnMut()) -> f64 {
    let mut reps = 1;
    loop {
        let start = Instant::now();
        for _ in 0..reps {
            f();
        }
        if start.elapsed() >= Duration::from_millis(20) {
            break;
        }
        reps *= 2;
    }
    (0..5)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..reps {
                f();
            }
            start.elapsed().as_secs_f64() / reps as f64
        })
        .fold(f64::INFINITY, f64::min)
}

fn model_invariants() -> (bool, String) {
    let mut rng = rng(1);
    let mut ok = 0;
    for _ in 0..1000 {
        let text = random_text(&mut rng, 4);
        if let Ok(t) = parse_document(&text) {
            if t.check_invariants().is_ok() {
                ok += 1;
            }
        }
    }
    (ok == 1000, format!("{ok}/1000 documents well-formed"))
}

fn jnl_oracle() -> (bool, String) {
    let mut rng = rng(2);
    let shape = JnlShape { star: true, eq_paths: true };
    let mut agree = 0;
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..500 {
        let t = random_tree(&mut rng, 4, 12);
        let phi = random_jnl(&mut rng, 4, shape);
        let text = phi.to_string();
        for c in ["*", "@/", "@\"", "#", ":", "eq(", "test(", "eps", "!", "&&", "||"] {
            if text.contains(c) {
                seen.insert(c);
            }
        }
        if members(&t, &eval_unary(&t, &phi)) == JnlOracle::new(&t).unary(&phi) {
            agree += 1;
        }
    }
    let covered = seen.len() == 11;
    (agree == 500 && covered, format!("{agree}/500 agree, {}/11 constructors sampled", seen.len()))
}

fn jnl_scaling() -> (bool, String) {
    let flat = parse_jnl(r#"([@"a"/@"a"/test([@/.*/])] && !eq(@"a", 0)) || [#1] || eq(@"a"/@"a", {"a":0})"#).unwrap();
    let starred = parse_jnl(r#"[(@"a")*/test(!([@"a"]))] && eq((@"a"/@"a")*, 0)"#).unwrap();
    let sizes = [1000, 2000, 4000, 8000];
    let chains: Vec<JsonTree> = sizes.iter().map(|&n| chain(n)).collect();
    let time = |phi: &JnlUnary| -> Vec<f64> {
        chains
            .iter()
            .map(|t| {
                measure(|| {
                    std::hint::black_box(eval_unary(t, phi));
                })
            })
            .collect()
    };
    let flat_t = time(&flat);
    let star_t = time(&starred);
    let ratios: Vec<f64> = flat_t.windows(2).map(|w| w[1] / w[0]).collect();
    let star_ratios: Vec<f64> = star_t.windows(2).map(|w| w[1] / w[0]).collect();
    let linear = ratios.iter().all(|&r| r <= 2.5);
    let cubic = star_ratios.iter().all(|&r| r <= 8.0);
    let fmt = |v: &[f64]| v.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join("/");
    (linear && cubic, format!("doubling ratios {} (<= 2.5), with star {} (<= 8)", fmt(&ratios), fmt(&star_ratios)))
}

fn known_unsat() -> (bool, String) {
    let phi = parse_jnl(r#"[@"a"/#1] && [@"a"/@"b"]"#).unwrap();
    let b = Bounds { max_depth: 3, max_width: 3, max_atoms: 3 };
    let unsat = sat_bounded(&SatInput::Jnl(phi), &b).map(|v| v.to_string());
    let top = sat_bounded(&SatInput::Jnl(JnlUnary::Top), &b).map(|v| v.to_string());
    let pass = unsat.as_deref() == Ok("UNSAT up to (3,3,3)") && top.as_deref() == Ok("SAT\n{}");
    (pass, format!("{unsat:?}; true -> {top:?}"))
}

fn three_sat() -> (bool, String) {
    let mut rng = rng(5);
    let mut agree = 0;
    let mut sat = 0;
    for i in 0..50 {
        let mut vars: Vec<usize> = (0..5).collect();
        let mut clauses: Vec<Vec<(usize, bool)>> = if i % 5 == 0 {
            // random clauses are almost never unsatisfiable; every sign
            // pattern over three variables is
            vars.shuffle(&mut rng);
            (0..8).map(|m| (0..3).map(|k| (vars[k], (m >> k) & 1 == 1)).collect()).collect()
        } else {
            (0..8)
                .map(|_| {
                    vars.shuffle(&mut rng);
                    vars[..3].iter().map(|&v| (v, rng.gen_bool(0.5))).collect()
                })
                .collect()
        };
        clauses.shuffle(&mut rng);
        let lits: Vec<Vec<Literal>> = clauses
            .iter()
            .map(|c| c.iter().map(|&(v, neg)| Literal { var: format!("x{v}"), negated: neg }).collect())
            .collect();
        let expected = cnf_satisfiable(&clauses, 5);
        sat += expected as usize;
        let b = Bounds { max_depth: 2, max_width: 5, max_atoms: 1 };
        if sat_bounded(&SatInput::Jnl(encode_3sat(&lits)), &b).map(|v| v.is_sat()) == Ok(expected) {
            agree += 1;
        }
    }
    (agree == 50, format!("{agree}/50 agree ({sat} satisfiable)"))
}

fn qbf() -> (bool, String) {
    let mut rng = rng(6);
    let mut agree = 0;
    let mut truths = 0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=3);
        let prefix = (0..n).map(|_| if rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::Forall }).collect();
        let clauses = (0..rng.gen_range(1..=4))
            .map(|_| (0..rng.gen_range(1..=3)).map(|_| (rng.gen_range(1..=n), rng.gen_bool(0.5))).collect())
            .collect();
        let q = Qbf { prefix, clauses };
        let expected = q.eval();
        truths += expected as usize;
        let b = Bounds { max_depth: 2 * n, max_width: 2, max_atoms: 1 };
        if sat_bounded(&SatInput::Jsl(encode_qbf(&q)), &b).map(|v| v.is_sat()) == Ok(expected) {
            agree += 1;
        }
    }
    (agree == 20, format!("{agree}/20 agree ({truths} true)"))
}

fn schema_differential() -> (bool, String) {
    let mut rng = rng(7);
    let mut agree = 0;
    let mut total = 0;
    let mut valid = 0;
    let mut keywords = std::collections::BTreeSet::new();
    for text in SCHEMA_CORPUS {
        keywords.extend(keywords_in(text));
        let s = parse_schema(text).unwrap();
        let compiled = schema_to_jsl(&s).unwrap();
        let back = match &compiled {
            Compiled::Plain(phi) => jsl_to_schema(phi).unwrap(),
            Compiled::Recursive(e) => rjsl_to_schema(e).unwrap(),
        };
        for _ in 0..200 {
            let t = random_schema_doc(&mut rng);
            let direct = validate_schema(&t, &s).unwrap();
            let via_jsl = match &compiled {
                Compiled::Plain(phi) => validate(&t, phi),
                Compiled::Recursive(e) => eval_recursive(e, &t).unwrap(),
            };
            let round = validate_schema(&t, &back).unwrap();
            total += 1;
            valid += direct as usize;
            if direct == via_jsl && via_jsl == round {
                agree += 1;
            }
        }
    }
    let covered = TABLE_KEYWORDS.iter().all(|k| keywords.contains(*k));
    let number = parse_schema(r#"{"type":"number","maximum":12,"multipleOf":4}"#).unwrap();
    let accepted: Vec<u64> =
        (0..=20).filter(|i| validate_schema(&parse_document(&i.to_string()).unwrap(), &number).unwrap()).collect();
    let pass = agree == total && covered && SCHEMA_CORPUS.len() >= 20 && accepted == [0, 4, 8, 12];
    (
        pass,
        format!(
            "{agree}/{total} agree over {} schemas ({valid} valid), keywords covered: {covered}, number example accepts {accepted:?}",
            SCHEMA_CORPUS.len()
        ),
    )
}

fn translations() -> (bool, String) {
    let mut rng = rng(8);
    let shape = JnlShape { star: false, eq_paths: false };
    let mut forward = 0;
    let mut backward = 0;
    for _ in 0..300 {
        let phi = random_jnl(&mut rng, 3, shape);
        let psi = jnl_to_jsl(&phi).unwrap();
        let trees: Vec<JsonTree> = (0..5).map(|_| random_tree(&mut rng, 3, 12)).collect();
        if trees.iter().all(|t| eval_unary(t, &phi) == eval_set(t, &psi).unwrap()) {
            forward += 1;
        }
        let chi = random_jsl(&mut rng, 3, true);
        let back = jsl_to_jnl(&chi).unwrap();
        if trees.iter().all(|t| eval_set(t, &chi).unwrap() == eval_unary(t, &back)) {
            backward += 1;
        }
    }
    let example = jnl_to_jsl(&parse_jnl(r#"eq(test([@"b"]) / @"a", {"x":[1]})"#).unwrap()).unwrap();
    let exact = example == parse_jsl(r#"dia("a") same({"x":[1]}) && dia("b") true"#).unwrap();
    (
        forward == 300 && backward == 300 && exact,
        format!("JNL->JSL {forward}/300, JSL->JNL {backward}/300, worked example exact: {exact}"),
    )
}

fn recursive_semantics() -> (bool, String) {
    let mut rng = rng(9);
    let mut agree = 0;
    for _ in 0..200 {
        let e = random_rjsl(&mut rng);
        let height = rng.gen_range(0..=5);
        let t = random_tree(&mut rng, height, 20);
        if eval_recursive(&e, &t).unwrap() == validate(&t, &unfold(&e, t.height()).unwrap()) {
            agree += 1;
        }
    }
    let even = even_path_expr();
    let family = object_trees(4, &["a", "b"]);
    let even_ok = family.iter().filter(|v| eval_recursive(&even, &v.to_tree()).unwrap() == object_paths_even(v)).count();
    let binary = parse_rjsl("let g = !dia(1) true || minCh(2) && maxCh(2) && !unique && box(1:2) g; in g").unwrap();
    let mut arrays = array_trees(3, 2);
    arrays.extend(array_trees(2, 3));
    let binary_ok =
        arrays.iter().filter(|v| eval_recursive(&binary, &v.to_tree()).unwrap() == is_complete_binary(v)).count();
    (
        agree == 200 && even_ok == family.len() && binary_ok == arrays.len(),
        format!(
            "unfold {agree}/200, even-path {even_ok}/{}, complete binary {binary_ok}/{}",
            family.len(),
            arrays.len()
        ),
    )
}

fn recursive_performance() -> (bool, String) {
    let t = balanced(10_000);
    let e = even_path_expr();
    let (r, elapsed) = timed(|| eval_recursive(&e, &t).unwrap());
    std::hint::black_box(r);
    (elapsed < Duration::from_secs(1), format!("{} nodes in {:.1} ms", t.len(), elapsed.as_secs_f64() * 1e3))
}

fn automata() -> (bool, String) {
    let mut rng = rng(11);
    let mut plain = 0;
    let mut recursive = 0;
    for _ in 0..300 {
        let t = random_tree(&mut rng, 4, 15);
        let phi = random_jsl(&mut rng, 3, false);
        if automaton_accepts(&jsl_to_automaton(&phi), &t) == validate(&t, &phi) {
            plain += 1;
        }
        let e = random_rjsl(&mut rng);
        if automaton_accepts(&recursive_to_automaton(&e).unwrap(), &t) == eval_recursive(&e, &t).unwrap() {
            recursive += 1;
        }
    }
    let mut restored = 0;
    for _ in 0..100 {
        let t = random_tree(&mut rng, 4, 15);
        let a = jsl_to_automaton(&random_jsl(&mut rng, 3, false));
        let once = complement(&a);
        let twice = complement(&once);
        let base = automaton_accepts(&a, &t);
        if automaton_accepts(&twice, &t) == base && automaton_accepts(&once, &t) != base {
            restored += 1;
        }
    }
    (
        plain == 300 && recursive == 300 && restored == 100,
        format!("formulas {plain}/300, recursive {recursive}/300, double complement {restored}/100"),
    )
}

fn skip_list() -> (bool, String) {
    let names_undecidable = SKIP_LIST.iter().any(|(what, _)| what.contains("undecidab"));
    let upper_bounds = ["PSPACE", "EXPSPACE", "EXPTIME", "2EXPTIME"]
        .iter()
        .all(|c| SKIP_LIST.iter().any(|(what, _)| what.split_whitespace().any(|w| w == *c)));
    let pointers = SKIP_LIST.iter().all(|(_, instead)| !instead.is_empty());
    for (what, instead) in SKIP_LIST {
        println!("    skipped: {what} -> {instead}");
    }
    (names_undecidable && upper_bounds && pointers, format!("{} entries", SKIP_LIST.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> (bool, String), Option<Duration>); 12] = [
        ("model invariants", model_invariants, Some(Duration::from_secs(5))),
        ("JNL oracle equivalence", jnl_oracle, Some(Duration::from_secs(30))),
        ("JNL scaling", jnl_scaling, None),
        ("known unsat witness", known_unsat, Some(Duration::from_secs(5))),
        ("3SAT reduction", three_sat, Some(Duration::from_secs(120))),
        ("QBF reduction", qbf, Some(Duration::from_secs(120))),
        ("schema differential", schema_differential, Some(Duration::from_secs(60))),
        ("JNL/JSL translations", translations, None),
        ("recursive semantics", recursive_semantics, None),
        ("recursive evaluation time", recursive_performance, None),
        ("J-automata differential", automata, None),
        ("skip list", skip_list, None),
    ];
    let mut report = Report { lines: Vec::new() };
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let ((pass, detail), elapsed) = timed(run);
        let in_time = limit.is_none_or(|l| elapsed < l);
        let detail = match limit {
            Some(l) if !in_time => format!("{detail}; over the {}s limit", l.as_secs()),
            _ => detail,
        };
        report.record(i + 1, name, pass && in_time, detail, elapsed);
    }
    let failed: Vec<&String> = report.lines.iter().filter(|(p, _)| !p).map(|(_, l)| l).collect();
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n"));
}
