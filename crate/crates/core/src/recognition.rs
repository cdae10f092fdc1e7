//! Extensional recognition of known notions.
//!
//! A stored object is recognized as a catalog notion when, under some
//! bijective binding of its parameters to the template's parameters, both
//! denote the same truth value or set on every interpretation up to the sweep
//! size. Recognition is therefore bounded: notions that agree on all small
//! models are reported as identical.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{parse_expr, Expr, ParseError, Variable};
use crate::rules::{ObjectId, ObjectStore, RuleError};
use crate::semantics::{EvalError, Evaluator};

const BUILTIN: &str = include_str!("../data/catalog.tsv");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog line {line}: expected 4 tab-separated columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("catalog line {line}: {source}")]
    Template { line: usize, source: ParseError },
    #[error("catalog line {line}: notation refers to unknown parameter `{name}`")]
    UnknownParameter { line: usize, name: String },
}

#[derive(Debug, Error)]
pub enum RecognitionError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl RecognitionError {
    pub fn code(&self) -> &'static str {
        match self {
            RecognitionError::Rule(e) => e.code(),
            RecognitionError::Eval(e) => e.code(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub symbol: String,
    /// Symbolic notation pattern, e.g. `{A} ∩ {B}`.
    pub notation: String,
    pub nl_name: String,
    pub template: Expr,
    pub params: Vec<Variable>,
}

impl CatalogEntry {
    pub fn new(
        symbol: impl Into<String>,
        notation: impl Into<String>,
        nl_name: impl Into<String>,
        template: Expr,
    ) -> Self {
        let params = template.free_vars();
        CatalogEntry {
            symbol: symbol.into(),
            notation: notation.into(),
            nl_name: nl_name.into(),
            template,
            params,
        }
    }

    /// Fills `{Param}` placeholders; `binding` maps object parameters to template parameters.
    pub fn instantiate(&self, pattern: &str, binding: &[(Variable, Variable)]) -> String {
        let mut out = pattern.to_owned();
        for (obj, tpl) in binding {
            out = out.replace(&format!("{{{}}}", tpl.name()), obj.name());
        }
        out
    }

    fn placeholders(pattern: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut rest = pattern;
        while let Some(start) = rest.find('{') {
            let Some(len) = rest[start..].find('}') else { break };
            out.push(&rest[start + 1..start + len]);
            rest = &rest[start + len + 1..];
        }
        out
    }
}

/// Parses a tab-separated catalog: `symbol  notation  nl-name  template`.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(CatalogError::Columns {
                line: line_no,
                found: cols.len(),
            });
        }
        let template = parse_expr(cols[3]).map_err(|source| CatalogError::Template {
            line: line_no,
            source,
        })?;
        let entry = CatalogEntry::new(cols[0], cols[1], cols[2], template);
        for pattern in [&entry.notation, &entry.nl_name] {
            for name in CatalogEntry::placeholders(pattern) {
                if !entry.params.iter().any(|p| p.name() == name) {
                    return Err(CatalogError::UnknownParameter {
                        line: line_no,
                        name: name.to_owned(),
                    });
                }
            }
        }
        entries.push(entry);
    }
    Ok(entries)
}

pub fn builtin_catalog() -> Vec<CatalogEntry> {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG
        .get_or_init(|| parse_catalog(BUILTIN).expect("builtin catalog is well-formed"))
        .clone()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Match {
    pub symbol: String,
    /// Object parameter ↦ template parameter.
    #[serde(serialize_with = "binding_as_pairs")]
    pub binding: Vec<(Variable, Variable)>,
    pub notation: String,
    pub nl: String,
}

fn binding_as_pairs<S: serde::Serializer>(
    binding: &[(Variable, Variable)],
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(binding.len()))?;
    for (o, t) in binding {
        map.serialize_entry(o.name(), t.name())?;
    }
    map.end()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecognitionResult {
    pub object_id: ObjectId,
    pub matches: Vec<Match>,
    pub checked_size: u32,
}

impl RecognitionResult {
    pub fn first(&self) -> Option<&Match> {
        self.matches.first()
    }
}

/// Bijections from `from` to `to` that preserve sorts, identity order first.
fn sorted_bijections(from: &[Variable], to: &[Variable]) -> Vec<Vec<(Variable, Variable)>> {
    fn go(
        from: &[Variable],
        to: &[Variable],
        used: &mut Vec<bool>,
        acc: &mut Vec<(Variable, Variable)>,
        out: &mut Vec<Vec<(Variable, Variable)>>,
    ) {
        let i = acc.len();
        if i == from.len() {
            out.push(acc.clone());
            return;
        }
        for j in 0..to.len() {
            if used[j] || from[i].sort() != to[j].sort() {
                continue;
            }
            used[j] = true;
            acc.push((from[i].clone(), to[j].clone()));
            go(from, to, used, acc, out);
            acc.pop();
            used[j] = false;
        }
    }
    let mut out = Vec::new();
    if from.len() == to.len() {
        go(from, to, &mut vec![false; to.len()], &mut Vec::new(), &mut out);
    }
    out
}

/// Every (entry, binding) under which `expr` agrees with a catalog template.
pub fn recognize_expr(
    evaluator: &mut Evaluator,
    expr: &Expr,
    catalog: &[CatalogEntry],
    max_size: u32,
) -> Result<Vec<Match>, EvalError> {
    let params = expr.free_vars();
    let Ok(sort) = expr.sort_check() else {
        return Ok(Vec::new());
    };
    let mut matches = Vec::new();
    for entry in catalog {
        if entry.template.sort_check().ok() != Some(sort.clone()) {
            continue;
        }
        for binding in sorted_bijections(&params, &entry.params) {
            let verdict =
                evaluator.extensionally_equal(expr, &entry.template, &binding, max_size)?;
            if verdict.is_equal() {
                matches.push(Match {
                    symbol: entry.symbol.clone(),
                    notation: entry.instantiate(&entry.notation, &binding),
                    nl: entry.instantiate(&entry.nl_name, &binding),
                    binding,
                });
            }
        }
    }
    Ok(matches)
}

/// Recognizes one stored object and records its first match as the object's symbol.
pub fn recognize(
    store: &mut ObjectStore,
    id: ObjectId,
    catalog: &[CatalogEntry],
    max_size: u32,
) -> Result<RecognitionResult, RecognitionError> {
    let expr = store.get(id)?.payload.clone();
    let matches = recognize_expr(&mut Evaluator::new(), &expr, catalog, max_size)?;
    let result = RecognitionResult {
        object_id: id,
        matches,
        checked_size: max_size,
    };
    store.set_symbol(id, result.first().map(|m| m.notation.clone()))?;
    Ok(result)
}

/// Recognizes every object without touching the store; objects run in parallel.
pub fn recognize_all(
    store: &ObjectStore,
    catalog: &[CatalogEntry],
    max_size: u32,
) -> Result<Vec<RecognitionResult>, EvalError> {
    store
        .objects()
        .par_iter()
        .map_init(Evaluator::new, |ev, obj| {
            recognize_expr(ev, &obj.payload, catalog, max_size).map(|matches| {
                RecognitionResult {
                    object_id: obj.id,
                    matches,
                    checked_size: max_size,
                }
            })
        })
        .collect()
}

/// Writes first-match symbols from `results` into the store.
pub fn apply_symbols(store: &mut ObjectStore, results: &[RecognitionResult]) -> Result<(), RuleError> {
    for r in results {
        store.set_symbol(r.object_id, r.first().map(|m| m.notation.clone()))?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureSymbol {
    pub symbol: String,
    pub objects: Vec<ObjectId>,
}

/// The signature reached: `∈` followed by recognized symbols in first-recognition order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureExtension {
    pub symbols: Vec<SignatureSymbol>,
    pub checked_size: u32,
}

impl SignatureExtension {
    pub fn contains(&self, symbol: &str) -> bool {
        self.symbols.iter().any(|s| s.symbol == symbol)
    }

    pub fn symbol_names(&self) -> Vec<&str> {
        self.symbols.iter().map(|s| s.symbol.as_str()).collect()
    }
}

impl fmt::Display for SignatureExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨Set; {}⟩", self.symbol_names().join(", "))
    }
}

pub fn signature_from_results(
    store: &ObjectStore,
    results: &[RecognitionResult],
    checked_size: u32,
) -> SignatureExtension {
    let seeds: Vec<ObjectId> = store
        .objects()
        .iter()
        .filter(|o| o.is_seed())
        .map(|o| o.id)
        .collect();
    let mut symbols = vec![SignatureSymbol {
        symbol: "∈".to_owned(),
        objects: seeds,
    }];
    let mut ordered: Vec<&RecognitionResult> = results.iter().collect();
    ordered.sort_by_key(|r| r.object_id);
    for r in ordered {
        for m in &r.matches {
            match symbols.iter_mut().find(|s| s.symbol == m.symbol) {
                Some(s) => {
                    if !s.objects.contains(&r.object_id) {
                        s.objects.push(r.object_id);
                    }
                }
                None => symbols.push(SignatureSymbol {
                    symbol: m.symbol.clone(),
                    objects: vec![r.object_id],
                }),
            }
        }
    }
    SignatureExtension {
        symbols,
        checked_size,
    }
}

pub fn signature_report(
    store: &ObjectStore,
    catalog: &[CatalogEntry],
    max_size: u32,
) -> Result<SignatureExtension, EvalError> {
    let results = recognize_all(store, catalog, max_size)?;
    Ok(signature_from_results(store, &results, max_size))
}
