use std::collections::BTreeSet;

use setsig_core::enumerate::{enumerate, table1_rows, verify_table1, EnumConfig};
use setsig_core::formula::{parse_expr, Expr, Term};
use setsig_core::recognition::{builtin_catalog, signature_report};
use setsig_core::rules::ObjectStore;

/// Counts the closure with a string model independent of the object store.
fn closure_size(elem_vars: usize, set_vars: usize, max_atoms: usize) -> usize {
    #[derive(Clone)]
    struct P {
        text: String,
        free: Vec<String>,
    }
    let mut atoms = Vec::new();
    for e in 0..elem_vars {
        for s in 0..set_vars {
            atoms.push(P {
                text: format!("x{e}:A{s}"),
                free: vec![format!("x{e}"), format!("A{s}")],
            });
        }
    }
    let negs: Vec<P> = atoms
        .iter()
        .map(|p| P {
            text: format!("not {}", p.text),
            free: p.free.clone(),
        })
        .collect();
    let literals: Vec<P> = atoms.iter().chain(&negs).cloned().collect();
    let mut binaries = Vec::new();
    let mut seen = BTreeSet::new();
    if max_atoms >= 2 {
        for (i, l) in literals.iter().enumerate() {
            for r in &literals[i + 1..] {
                for op in ["and", "or"] {
                    let (a, b) = if l.text <= r.text { (l, r) } else { (r, l) };
                    let text = format!("{op} [{}] [{}]", a.text, b.text);
                    if seen.insert(text.clone()) {
                        let mut free = l.free.clone();
                        for v in &r.free {
                            if !free.contains(v) {
                                free.push(v.clone());
                            }
                        }
                        binaries.push(P { text, free });
                    }
                }
            }
        }
    }
    let open: Vec<P> = literals.iter().chain(&binaries).cloned().collect();
    let mut quantified = Vec::new();
    for p in &open {
        for v in &p.free {
            for q in ["all", "ex"] {
                quantified.push(P {
                    text: format!("{q} {v} [{}]", p.text),
                    free: p.free.iter().filter(|w| *w != v).cloned().collect(),
                });
            }
        }
    }
    let mut sets = 0;
    for p in open.iter().chain(&quantified) {
        let elems = p.free.iter().filter(|v| v.starts_with('x')).count();
        let set_params = p.free.len() - elems;
        sets += (1usize << elems) - 1 + set_params;
    }
    atoms.len() + negs.len() + binaries.len() + quantified.len() + sets
}

#[test]
fn smallest_closure_size() {
    let config = EnumConfig {
        elem_vars: 1,
        set_vars: 1,
        max_atoms: 1,
        ..EnumConfig::default()
    };
    let oracle = closure_size(1, 1, 1);
    assert_eq!(oracle, 22);
    assert_eq!(enumerate(&config).unwrap().len(), oracle);
}

#[test]
fn default_closure_size() {
    let oracle = closure_size(2, 2, 2);
    assert_eq!(oracle, 1600);
    assert_eq!(enumerate(&EnumConfig::default()).unwrap().len(), oracle);
}

#[test]
fn enumeration_is_deterministic() {
    let a = enumerate(&EnumConfig::default()).unwrap();
    let b = enumerate(&EnumConfig::default()).unwrap();
    assert_eq!(a.objects(), b.objects());
}

#[test]
fn generated_formulas_respect_bounds() {
    let store = enumerate(&EnumConfig::default()).unwrap();
    for obj in store.objects() {
        match &obj.payload {
            Expr::Formula(f) => {
                assert!(f.atom_count() <= 2, "{obj}");
                assert!(f.quantifier_depth() <= 1, "{obj}");
                assert!(!f.contains_comprehension(), "{obj}");
            }
            Expr::Term(Term::Comprehension { body, .. }) => {
                assert!(body.atom_count() <= 2, "{obj}");
                assert!(!body.contains_comprehension(), "{obj}");
            }
            Expr::Term(_) => panic!("unexpected term {obj}"),
        }
    }
}

#[test]
fn default_enumeration_covers_table1() {
    let store = enumerate(&EnumConfig::default()).unwrap();
    let report = verify_table1(&store, &table1_rows(), &builtin_catalog(), 3).unwrap();
    assert_eq!(report.to_string(), "28/28");
    assert!(report.passed());
    assert_eq!(report.extras, store.len() - 28);

    let extra = |t: &str| store.lookup(&parse_expr(t).unwrap()).is_some();
    assert!(extra("{<x0, x1> | ((x0 in A0) & (x1 in A0))}"));
    assert!(extra("{x0 | ((x0 in A0) | ~(x0 in A1))}"));
}

#[test]
fn missing_row_is_reported() {
    let store = enumerate(&EnumConfig::default()).unwrap();
    let row20 = parse_expr("{x0 | ((x0 in A0) & (x0 in A1))}").unwrap();
    let removed = store.lookup(&row20).unwrap();
    let kept: Vec<_> = store
        .into_objects()
        .into_iter()
        .filter(|o| o.id != removed)
        .map(|mut o| {
            let shift = |id: usize| if id > removed { id - 1 } else { id };
            o.id = shift(o.id);
            o.provenance.parents = o.provenance.parents.iter().map(|&p| shift(p)).collect();
            o
        })
        .collect();
    let store = ObjectStore::from_objects(kept).unwrap();
    let report = verify_table1(&store, &table1_rows(), &builtin_catalog(), 3).unwrap();
    assert_eq!(report.to_string(), "27/28");
    assert_eq!(report.missing(), vec![20]);
}

#[test]
fn signature_of_the_default_enumeration() {
    let store = enumerate(&EnumConfig::default()).unwrap();
    let sig = signature_report(&store, &builtin_catalog(), 3).unwrap();
    assert_eq!(
        sig.to_string(),
        "⟨Set; ∈, universe, ≠∅, ⊂, complement, ∩, ∪, ×, \\, powerset⟩"
    );
}
