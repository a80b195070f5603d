//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use curvecount::basecases::{consistency_check, BaseKey, BaseTarget};
use curvecount::deriver::crosscheck_all;
use curvecount::recursion::{key_grid, CountKey, RuleTable, Target};
use curvecount::{BaseTable, Evaluator, Polynomial, Sing};
use proptest::test_runner::{Config, TestRunner};

const FAST: Duration = Duration::from_secs(1);
const MEMO_LIMIT: Duration = Duration::from_secs(5);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn p(c: &[i64]) -> Polynomial {
    Polynomial::from_ints(c)
}

fn val(poly: &Polynomial, d: i64) -> i64 {
    let v = poly.eval_to_int(d).expect("integer value");
    i64::try_from(v).expect("fits in i64")
}

fn binodal(base: &BaseTable) -> Outcome {
    let start = Instant::now();
    let mut ev = Evaluator::new(base);
    let ordered = ev.final_count(Sing::A1, 0).unwrap().poly;
    let unordered = ev.unordered_binodal(0).unwrap();
    let took = start.elapsed();
    let want = p(&[3]) * p(&[-2, 1]) * p(&[-1, 1]) * p(&[-11, -3, 3]);
    let spots = (val(&ordered, 2), val(&ordered, 3), val(&unordered, 3));
    outcome(
        ordered == want && spots == (0, 42, 21) && took < FAST,
        format!(
            "{ordered}; d=2 {}, d=3 {} ordered / {} unordered; {took:?} (limit {FAST:?})",
            spots.0, spots.1, spots.2
        ),
    )
}

fn conditional_form(base: &BaseTable, sing: Sing, want: Polynomial, d: i64, at_d: i64) -> Outcome {
    let consistent = consistency_check(base).passed();
    let got = Evaluator::new(base).final_count(sing, 0).unwrap().poly;
    let v = val(&got, d);
    outcome(
        consistent && got == want && v == at_d,
        format!(
            "{got}; d={d} gives {v}; conditional on consistency check: {}",
            if consistent { "pass" } else { "FAIL" }
        ),
    )
}

fn cusp_identity(base: &BaseTable) -> Outcome {
    let dm1 = p(&[-1, 1]);
    let d = Polynomial::d();
    let three_a2 = dm1.pow(4).scale_int(9)
        - dm1.pow(2).scale_int(3)
        - (&d * &dm1).scale_int(3)
        - p(&[3]) * p(&[-2, 1]) * p(&[-1, 1]) * p(&[-11, -3, 3]);
    let a2 = base.lookup(BaseKey::new(BaseTarget::A2, 0, 0)).unwrap();
    let want = p(&[12]) * dm1 * p(&[-2, 1]);
    outcome(
        a2.scale_int(3) == three_a2 && a2 == want,
        format!("A2(0) = {a2}"),
    )
}

fn coefficients() -> Outcome {
    let start = Instant::now();
    let report = crosscheck_all();
    let took = start.elapsed();
    let rules = RuleTable::standard();
    let pa6 = rules.by_label("A1PA6").and_then(|r| r.triple());
    let pd4 = rules.by_label("A1PD4 m=0").and_then(|r| r.triple());
    let zero_lambda = pa6.is_some_and(|t| t[1].is_zero());
    let minus_two = pd4.is_some_and(|t| t[1] == p(&[-2]));
    let (ok, total) = report.score();
    outcome(
        ok == 13 && total == 13 && zero_lambda && minus_two && took < FAST,
        format!("{ok}/{total}; A1PA6 λ-coefficient zero: {zero_lambda}; A1PD4 λ-coefficient -2: {minus_two}; {took:?} (limit {FAST:?})"),
    )
}

fn reduction_law(base: &BaseTable) -> Outcome {
    let mut ev = Evaluator::new(base);
    let mut bad = vec![];
    let mut checked = 0;
    for t in Target::TWO_POINT
        .into_iter()
        .filter(|t| t.is_projectivized())
    {
        for n in 0..=2 {
            let k = |n, m| CountKey::new(t, n, m).unwrap();
            let sum = ev.count(k(n, 2)).unwrap()
                + ev.count(k(n + 1, 1)).unwrap().scale_int(3)
                + ev.count(k(n + 2, 0)).unwrap().scale_int(3);
            checked += 1;
            if !sum.is_zero() {
                bad.push(format!("{t}({n})"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} target rows; failures: {bad:?}"),
    )
}

fn vanishing_law(base: &BaseTable) -> Outcome {
    let mut ev = Evaluator::new(base);
    let mut bad = vec![];
    let mut checked = 0;
    for t in Target::all() {
        let top_m = if t.is_projectivized() { 3 } else { 0 };
        for n in 3..=6 {
            for m in 0..=top_m {
                let key = CountKey::new(t, n, m).unwrap();
                checked += 1;
                if !ev.count(key).unwrap().is_zero() {
                    bad.push(key.to_string());
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} keys; failures: {bad:?}"))
}

fn integrality(base: &BaseTable) -> Outcome {
    let mut ev = Evaluator::new(base);
    let mut bad = vec![];
    let mut finals = vec![];
    for sing in Sing::ALL {
        for n in 0..=2 {
            match ev.final_count(sing, n) {
                Ok(f) => finals.push(f.poly),
                Err(e) => bad.push(e.to_string()),
            }
        }
    }
    let unordered = match ev.unordered_binodal(0) {
        Ok(u) => Some(u),
        Err(e) => {
            bad.push(e.to_string());
            None
        }
    };
    if let Err(e) = ev.count(CountKey::new(Target::A1D4, 0, 0).unwrap()) {
        bad.push(e.to_string());
    }

    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    let sampled = runner.run(&(0usize..finals.len(), -1000i64..1000), |(i, d)| {
        proptest::prop_assert!(finals[i].eval_int(d).is_integer());
        if let Some(u) = &unordered {
            proptest::prop_assert!(u.eval_int(d).is_integer());
        }
        Ok(())
    });
    if let Err(e) = sampled {
        bad.push(e.to_string());
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} final counts integral, D4 ÷3 and binodal ÷2 exact; failures: {bad:?}",
            finals.len()
        ),
    )
}

fn memoization(base: &BaseTable) -> Outcome {
    let keys = key_grid(4, 4);
    let start = Instant::now();
    let mut memo = Evaluator::new(base);
    let mut free = Evaluator::memo_free(base);
    let mismatched: Vec<String> = keys
        .iter()
        .filter(|&&k| {
            let a = memo.count(k);
            let b = free.count(k);
            !matches!((a, b), (Ok(x), Ok(y)) if x == y)
        })
        .map(|k| k.to_string())
        .collect();
    let took = start.elapsed();
    outcome(
        mismatched.is_empty() && took < MEMO_LIMIT,
        format!(
            "{} keys; mismatches: {mismatched:?}; {took:?} (limit {MEMO_LIMIT:?})",
            keys.len()
        ),
    )
}

fn main() -> ExitCode {
    let base = BaseTable::shipped();
    let results = [
        ("1 binodal closed form", binodal(&base)),
        (
            "2 node+cusp closed form",
            conditional_form(
                &base,
                Sing::A2,
                p(&[12]) * p(&[-3, 1]) * p(&[18, -11, -6, 3]),
                3,
                0,
            ),
        ),
        (
            "3 node+tacnode closed form",
            conditional_form(
                &base,
                Sing::A3,
                p(&[6]) * p(&[-3, 1]) * p(&[280, -122, -71, 25]),
                4,
                1536,
            ),
        ),
        ("4 cusp identity in base table", cusp_identity(&base)),
        ("5 coefficient derivation", coefficients()),
        ("6 reduction law", reduction_law(&base)),
        ("7 vanishing law", vanishing_law(&base)),
        ("8 integrality", integrality(&base)),
        ("9 memoization agreement", memoization(&base)),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!(
        "acceptance: {}/{} passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
