use std::collections::BTreeSet;

use setsig_core::enumerate::{enumerate, EnumConfig};
use setsig_core::formula::Variable;
use setsig_core::recognition::{builtin_catalog, recognize_all, CatalogEntry};
use setsig_core::semantics::{Agreement, Assignment, Evaluator, Outcome, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Out {
    Truth(bool),
    Elems(u32),
    Pairs(BTreeSet<(u32, u32)>),
    Family(BTreeSet<u32>),
}

/// Direct bit-mask semantics of each catalog notion, independent of the evaluator.
fn oracle(symbol: &str, d: u32, a: u32, b: u32) -> Out {
    let full = (1u32 << d) - 1;
    match symbol {
        "universe" => Out::Truth(a == full),
        "≠∅" => Out::Truth(a != 0),
        "\\" => Out::Elems(a & !b),
        "∩" => Out::Elems(a & b),
        "complement" => Out::Elems(!a & full),
        "∪" => Out::Elems(a | b),
        "×" => Out::Pairs(
            (0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .filter(|&(i, j)| a & (1 << i) != 0 && b & (1 << j) != 0)
                .collect(),
        ),
        "⊂" => Out::Truth(b & !a == 0),
        "powerset" => Out::Family((0..=full).filter(|&s| s & !a == 0).collect()),
        "△" => Out::Elems(a ^ b),
        other => panic!("no oracle for {other}"),
    }
}

fn mask(v: &Value) -> u32 {
    match v {
        Value::Set(items) => items
            .iter()
            .map(|e| match e {
                Value::Elem(i) => 1 << i,
                other => panic!("not an element: {other}"),
            })
            .sum(),
        other => panic!("not a set: {other}"),
    }
}

fn to_out(o: Outcome) -> Out {
    match o {
        Outcome::Truth(b) => Out::Truth(b),
        Outcome::Set(Value::Set(items)) => match items.iter().next() {
            Some(Value::Tuple(_)) => Out::Pairs(
                items
                    .iter()
                    .map(|t| match t {
                        Value::Tuple(c) => (c[0], c[1]),
                        other => panic!("not a pair: {other}"),
                    })
                    .collect(),
            ),
            Some(Value::Set(_)) => Out::Family(items.iter().map(mask).collect()),
            _ => Out::Elems(mask(&Value::Set(items))),
        },
        Outcome::Set(other) => panic!("not a set: {other}"),
    }
}

fn assign(params: &[Variable], d: u32, a: u32, b: u32) -> Assignment {
    let mut asg = Assignment::new();
    for (p, m) in params.iter().zip([a, b]) {
        asg.set(p.clone(), Value::elems((0..d).filter(|i| m & (1 << i) != 0)));
    }
    asg
}

fn catalog() -> Vec<CatalogEntry> {
    builtin_catalog()
}

#[test]
fn evaluator_agrees_with_oracle() {
    let mut ev = Evaluator::new();
    for e in catalog() {
        for d in 1..=3u32 {
            for a in 0..(1u32 << d) {
                for b in 0..(1u32 << d) {
                    let got = ev.outcome(&e.template, d, &assign(&e.params, d, a, b)).unwrap();
                    // Outputs of empty sets carry no element type; compare masks only then.
                    let want = oracle(&e.symbol, d, a, b);
                    let got = to_out(got);
                    let empty = |o: &Out| match o {
                        Out::Elems(0) => true,
                        Out::Pairs(p) => p.is_empty(),
                        Out::Family(f) => f.is_empty(),
                        _ => false,
                    };
                    assert!(got == want || (empty(&got) && empty(&want)), "{} d={d} a={a} b={b}", e.symbol);
                }
            }
        }
    }
}

/// Bijections between two parameter lists of length `n`.
fn bindings(n: usize) -> Vec<Vec<usize>> {
    match n {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => unreachable!(),
    }
}

#[test]
fn catalog_is_pairwise_separated_at_size_two() {
    let cat = catalog();
    assert_eq!(cat.len(), 10);
    let d = 2;
    let mut ev = Evaluator::new();
    for (i, e) in cat.iter().enumerate() {
        for f in &cat[i + 1..] {
            let same_profile = e.params.len() == f.params.len()
                && e.template.sort_check().unwrap() == f.template.sort_check().unwrap();
            if !same_profile {
                continue;
            }
            for perm in bindings(e.params.len()) {
                let separated = (0..(1u32 << d)).any(|a| {
                    (0..(1u32 << d)).any(|b| {
                        let (fa, fb) = if perm == [1, 0] { (b, a) } else { (a, b) };
                        oracle(&e.symbol, d, a, b) != oracle(&f.symbol, d, fa, fb)
                    })
                });
                assert!(separated, "oracle: {} and {} coincide", e.symbol, f.symbol);
                let pairing: Vec<(Variable, Variable)> = perm
                    .iter()
                    .enumerate()
                    .map(|(k, &j)| (e.params[k].clone(), f.params[j].clone()))
                    .collect();
                let verdict = ev.extensionally_equal(&e.template, &f.template, &pairing, d).unwrap();
                assert!(
                    matches!(verdict, Agreement::Differs(_)),
                    "evaluator: {} and {} coincide",
                    e.symbol,
                    f.symbol
                );
            }
        }
    }
}

#[test]
fn recognition_is_stable_between_sizes_two_and_three() {
    let store = enumerate(&EnumConfig::default()).unwrap();
    let at2 = recognize_all(&store, &catalog(), 2).unwrap();
    let at3 = recognize_all(&store, &catalog(), 3).unwrap();
    for (r2, r3) in at2.iter().zip(&at3) {
        assert_eq!(r2.matches, r3.matches, "object {}", r2.object_id);
    }
    assert!(at3.iter().filter(|r| !r.matches.is_empty()).count() > 10);
}
