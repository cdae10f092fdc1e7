//! One line per acceptance criterion. Runs through the command line and
//! library interfaces only.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use clap::Parser;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use setsig::commands::{run, Cli};
use setsig::session::Session;
use setsig_core::arbitrary::{formula, substitution_case};
use setsig_core::enumerate::{enumerate, paper_construction, EnumConfig};
use setsig_core::formula::{parse_expr, parse_formula, Expr, Style};
use setsig_core::net::{derive_edges, export_net, import_net, render_nl, Glossary, NetFormat};
use setsig_core::recognition::{builtin_catalog, recognize_all, signature_from_results};
use setsig_core::semantics::{classify, Agreement, Evaluator};
use setsig_core::theory::{check_biconditional, identity_suite, negative_control, Identity};

type Check = Result<String, String>;

fn cli(args: &[&str]) -> Result<String, String> {
    let mut argv = vec!["setsig"];
    argv.extend_from_slice(args);
    let parsed = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    run(parsed).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn table1(dir: &Path) -> Check {
    let path = dir.join("table1.json");
    let p = path.to_str().unwrap();
    let start = Instant::now();
    cli(&["enumerate", "-s", p])?;
    let out = cli(&["verify-table1", "-s", p])?;
    let elapsed = start.elapsed();
    ensure(out.trim() == "28/28", format!("verify-table1 printed {out:?}"))?;
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("28/28 rows in {:.2}s", elapsed.as_secs_f64()))
}

fn signature(dir: &Path) -> Check {
    let path = dir.join("signature.json");
    let p = path.to_str().unwrap();
    cli(&["enumerate", "-s", p])?;
    let out = cli(&["report-signature", "-s", p, "-k", "3"])?;
    let header = out.lines().next().unwrap_or_default().to_owned();
    let listed: Vec<&str> = out.lines().skip(1).filter_map(|l| l.split('\t').next()).collect();
    let required = ["∈", "∩", "∪", "×", "⊂", "\\", "complement", "powerset", "universe", "≠∅"];
    let missing: Vec<&&str> = required.iter().filter(|s| !listed.contains(s)).collect();
    ensure(missing.is_empty(), format!("missing {missing:?} from {header}"))?;

    let store = Session::load(&path).map_err(|e| e.to_string())?.store;
    let results = recognize_all(&store, &builtin_catalog(), 3).map_err(|e| e.to_string())?;
    let sig = signature_from_results(&store, &results, 3);
    let mut ev = Evaluator::new();
    let catalog = builtin_catalog();
    for r in &results {
        for m in &r.matches {
            let entry = catalog.iter().find(|e| e.symbol == m.symbol).unwrap();
            let obj = store.get(r.object_id).unwrap();
            let pairing: Vec<_> = m.binding.iter().cloned().collect();
            match ev
                .extensionally_equal(&obj.payload, &entry.template, &pairing, 3)
                .map_err(|e| e.to_string())?
            {
                Agreement::Equal => {}
                other => return Err(format!("object {} vs {}: {other:?}", r.object_id, m.symbol)),
            }
        }
    }
    Ok(format!("{sig}, zero counterexamples at k = 3"))
}

fn classification_parity() -> Check {
    let store = paper_construction();
    let label = |row: usize| -> Result<String, String> {
        match &store.get(row).map_err(|e| e.to_string())?.payload {
            Expr::Formula(f) => Ok(classify(f, 3).map_err(|e| e.to_string())?.label()),
            Expr::Term(_) => Err(format!("row {row} is not a formula")),
        }
    };
    let mut expected: Vec<(usize, &str)> = (1..=5).chain(14..=18).map(|r| (r, "Contingent")).collect();
    expected.extend([(6, "Contingent"), (7, "UnsatUpTo(3)"), (8, "Contingent"), (9, "ValidUpTo(3)")]);
    for (row, want) in &expected {
        let got = label(*row)?;
        ensure(got == *want, format!("row {row}: {got}, expected {want}"))?;
    }
    let rec = recognize_all(&store, &builtin_catalog(), 3).map_err(|e| e.to_string())?;
    let g = Glossary::new();
    let nl = |id| render_nl(&store, id, &g, &rec, "en").map_err(|e| e.to_string());
    let (six, eight) = (nl(6)?, nl(8)?);
    ensure(six == "A0 is the universe", format!("row 6 reads {six:?}"))?;
    ensure(eight == "A0 is not empty", format!("row 8 reads {eight:?}"))?;
    Ok(format!("{} rows labelled exactly; rows 6/8 read {six:?} / {eight:?}", expected.len()))
}

fn identities() -> Check {
    let store = enumerate(&EnumConfig::default()).map_err(|e| e.to_string())?;
    let report = identity_suite(&store, 3).map_err(|e| e.to_string())?;
    if let Some(bad) = report.cases.iter().find(|c| !c.passed()) {
        return Err(format!("{bad}"));
    }
    let counts = [
        Identity::ProductOfTruthSets,
        Identity::IntersectionIsConjunction,
        Identity::UnionIsDisjunction,
    ]
    .map(|i| report.count(i));
    ensure(counts.iter().all(|&c| c >= 20), format!("too few cases: {counts:?}"))?;
    let control = negative_control(3).map_err(|e| e.to_string())?;
    ensure(!control.passed(), "negative control passed")?;
    Ok(format!(
        "product {}, ∩ {}, ∪ {} cases pass; control: {control}",
        counts[0], counts[1], counts[2]
    ))
}

fn biconditional() -> Check {
    let cases = check_biconditional(&paper_construction(), 3).map_err(|e| e.to_string())?;
    ensure(cases.len() == 10, format!("{} truth sets checked", cases.len()))?;
    if let Some(bad) = cases.iter().find(|c| !c.passed()) {
        return Err(format!("{bad}"));
    }
    Ok("10/10 truth sets".into())
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn properties(dir: &Path) -> Check {
    let store = enumerate(&EnumConfig::default()).map_err(|e| e.to_string())?;
    for obj in store.objects() {
        for style in [Style::Unicode, Style::Ascii] {
            let text = obj.payload.render(style);
            let back = parse_expr(&text).map_err(|e| format!("{text}: {e}"))?;
            ensure(back == obj.payload, format!("{text} did not round-trip"))?;
        }
    }
    runner(500)
        .run(&formula(), |f| {
            for style in [Style::Unicode, Style::Ascii] {
                let back = parse_formula(&f.render(style)).map_err(|e| TestCaseError::fail(e.to_string()))?;
                if back != f {
                    return Err(TestCaseError::fail(format!("{f} did not round-trip")));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    runner(1000)
        .run(&substitution_case(), |case| {
            let (lhs, rhs) = case.both_sides().map_err(TestCaseError::fail)?;
            if lhs != rhs {
                return Err(TestCaseError::fail(format!("{case:?}")));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let rec = recognize_all(&store, &builtin_catalog(), 3).map_err(|e| e.to_string())?;
    let net = derive_edges(&store, &rec);
    let violations = net.violations(&store);
    ensure(violations.is_empty(), format!("{violations:?}"))?;
    let json = export_net(&net, NetFormat::Json);
    let again = export_net(&import_net(json.as_bytes()).map_err(|e| e.to_string())?, NetFormat::Json);
    ensure(json == again, "net JSON changed on round trip")?;

    let path = dir.join("props.json");
    let p = path.to_str().unwrap();
    cli(&["enumerate", "-s", p])?;
    cli(&["list", "-s", p])?;
    let before = std::fs::read(&path).map_err(|e| e.to_string())?;
    let reloaded = Session::load(&path).map_err(|e| e.to_string())?;
    ensure(reloaded.to_json().as_bytes() == before, "session JSON changed on round trip")?;
    Ok(format!(
        "{} objects round-trip, 500 random formulae, 1000 substitution cases, {} edges, byte-stable JSON",
        store.len(),
        net.edges.len()
    ))
}

fn separation() -> Check {
    let catalog = builtin_catalog();
    let mut ev = Evaluator::new();
    let mut compared = 0;
    for (i, e) in catalog.iter().enumerate() {
        for f in &catalog[i + 1..] {
            if e.params.len() != f.params.len()
                || e.template.sort_check().ok() != f.template.sort_check().ok()
            {
                continue;
            }
            let orders: Vec<Vec<usize>> = if e.params.len() == 2 {
                vec![vec![0, 1], vec![1, 0]]
            } else {
                vec![vec![0]]
            };
            for order in orders {
                let pairing: Vec<_> = order
                    .iter()
                    .enumerate()
                    .map(|(k, &j)| (e.params[k].clone(), f.params[j].clone()))
                    .collect();
                compared += 1;
                if ev
                    .extensionally_equal(&e.template, &f.template, &pairing, 2)
                    .map_err(|e| e.to_string())?
                    .is_equal()
                {
                    return Err(format!("{} and {} coincide at d = 2", e.symbol, f.symbol));
                }
            }
        }
    }
    Ok(format!("{} entries, {compared} same-profile pairings distinct at d = 2", catalog.len()))
}

fn no_secondary_component() -> Check {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let members: Vec<String> = std::fs::read_dir(root.join("crates"))
        .map_err(|e| e.to_string())?
        .filter_map(|d| d.ok())
        .map(|d| d.file_name().to_string_lossy().into_owned())
        .collect();
    ensure(
        members.iter().all(|m| m == "core" || m == "cli"),
        format!("unexpected members {members:?}"),
    )?;
    Ok("all checks above ran through the command line and library only".into())
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let d = dir.path();
    let checks: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("table 1 regeneration", Box::new(|| table1(d))),
        ("signature extension", Box::new(|| signature(d))),
        ("classification parity", Box::new(classification_parity)),
        ("truth-set identities", Box::new(identities)),
        ("truth-set biconditional", Box::new(biconditional)),
        ("property suites", Box::new(|| properties(d))),
        ("catalog separation", Box::new(separation)),
        ("no secondary component", Box::new(no_secondary_component)),
    ];
    let mut failed = 0;
    for (name, check) in &checks {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{}/{} criteria pass", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
