//! Bounded combinatorial generation from the membership atoms, and coverage
//! of the reference derivation table.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse_expr, CanonicalKey, Connective, Expr, ParseError, Quantifier, Term, Variable};
use crate::recognition::{recognize_expr, CatalogEntry};
use crate::rules::{ObjectId, ObjectStore, RuleError};
use crate::semantics::{self, EvalError, Evaluator, DEFAULT_BUDGET, DEFAULT_MAX_SIZE};

const TABLE1: &str = include_str!("../data/table1.fixtures");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumConfig {
    pub elem_vars: usize,
    pub set_vars: usize,
    pub max_atoms: usize,
    pub quantifier_depth: usize,
    pub model_check_size: u32,
    /// Evaluation step cap for model checking.
    pub budget: u64,
    /// Cap on the number of generated objects.
    pub max_objects: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            elem_vars: 2,
            set_vars: 2,
            max_atoms: 2,
            quantifier_depth: 1,
            model_check_size: DEFAULT_MAX_SIZE,
            budget: DEFAULT_BUDGET,
            max_objects: 100_000,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("generation exceeded {0} objects")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

impl EnumError {
    pub fn code(&self) -> &'static str {
        match self {
            EnumError::InvalidConfig(_) => "InvalidConfig",
            EnumError::BudgetExceeded(_) => "BudgetExceeded",
            EnumError::Rule(e) => e.code(),
        }
    }
}

impl EnumConfig {
    pub fn validate(&self) -> Result<(), EnumError> {
        let bad = |m: &str| Err(EnumError::InvalidConfig(m.to_owned()));
        if self.elem_vars == 0 || self.set_vars == 0 {
            return bad("variable counts must be positive");
        }
        if self.max_atoms == 0 {
            return bad("max_atoms must be at least 1");
        }
        if self.quantifier_depth > 1 {
            return bad("quantifier_depth is at most 1");
        }
        if self.model_check_size == 0 || self.budget == 0 || self.max_objects == 0 {
            return bad("model_check_size, budget and max_objects must be positive");
        }
        Ok(())
    }
}

struct Generator {
    store: ObjectStore,
    max_objects: usize,
}

impl Generator {
    fn check(&self) -> Result<(), EnumError> {
        if self.store.len() > self.max_objects {
            return Err(EnumError::BudgetExceeded(self.max_objects));
        }
        Ok(())
    }

    fn keep(&mut self, applied: ObjectId, phase: &mut Vec<ObjectId>) -> Result<(), EnumError> {
        if !phase.contains(&applied) {
            phase.push(applied);
        }
        self.check()
    }
}

/// Generates the closure in five fixed phases: atoms, negated atoms, binary
/// connectives over pairs of literals, one quantifier over each free variable,
/// and truth sets over element-variable subsets or a single set variable.
pub fn enumerate(config: &EnumConfig) -> Result<ObjectStore, EnumError> {
    config.validate()?;
    let mut g = Generator {
        store: ObjectStore::seed(config.elem_vars, config.set_vars),
        max_objects: config.max_objects,
    };
    g.check()?;
    let atoms: Vec<ObjectId> = (1..=g.store.len()).collect();

    let mut negations = Vec::new();
    for &a in &atoms {
        let id = g.store.negate(a)?.id;
        g.keep(id, &mut negations)?;
    }

    let literals: Vec<ObjectId> = atoms.iter().chain(&negations).copied().collect();
    let mut binaries = Vec::new();
    if config.max_atoms >= 2 {
        for (i, &l) in literals.iter().enumerate() {
            for &r in &literals[i + 1..] {
                for op in [Connective::And, Connective::Or] {
                    let id = g.store.connect(op, l, r)?.id;
                    g.keep(id, &mut binaries)?;
                }
            }
        }
    }

    let open: Vec<ObjectId> = literals.iter().chain(&binaries).copied().collect();
    let mut quantified = Vec::new();
    if config.quantifier_depth >= 1 {
        for &p in &open {
            for v in g.store.get(p)?.parameters() {
                for q in [Quantifier::Forall, Quantifier::Exists] {
                    let id = g.store.quantify(q, &v, p)?.id;
                    g.keep(id, &mut quantified)?;
                }
            }
        }
    }

    let predicates: Vec<ObjectId> = open.iter().chain(&quantified).copied().collect();
    let mut truth_sets = Vec::new();
    for &p in &predicates {
        let params = g.store.get(p)?.parameters();
        let elems: Vec<Variable> = params.iter().filter(|v| v.sort().is_elem()).cloned().collect();
        let mut bindings = elem_subsets(&elems);
        bindings.extend(
            params
                .iter()
                .filter(|v| !v.sort().is_elem())
                .map(|v| vec![v.clone()]),
        );
        for bound in bindings {
            let id = g.store.truth_set(&bound, p)?.id;
            g.keep(id, &mut truth_sets)?;
        }
    }
    Ok(g.store)
}

/// Nonempty subsets ordered by size, then lexicographically by position.
fn elem_subsets(vars: &[Variable]) -> Vec<Vec<Variable>> {
    let n = vars.len();
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|&m| {
        let positions: Vec<usize> = (0..n).filter(|i| m & (1 << i) != 0).collect();
        (positions.len(), positions)
    });
    masks
        .into_iter()
        .map(|m| {
            (0..n)
                .filter(|i| m & (1 << i) != 0)
                .map(|i| vars[i].clone())
                .collect()
        })
        .collect()
}

/// Replays the reference construction order, so ids equal row numbers
/// 1–29 and names follow the original P/M/R indices.
pub fn paper_construction() -> ObjectStore {
    let x = |i: usize| Variable::elem(format!("x{i}"));
    let a = |i: usize| Variable::set(format!("A{i}"));
    let mut s = ObjectStore::seed(2, 2);
    let step = |row: usize, r: Result<crate::rules::Applied, RuleError>| {
        let applied = r.expect("reference construction is valid");
        assert_eq!(applied.id, row, "reference row {row}");
    };
    step(5, s.negate(1));
    step(6, s.quantify(Quantifier::Forall, &x(0), 1));
    step(7, s.quantify(Quantifier::Forall, &a(0), 1));
    step(8, s.quantify(Quantifier::Exists, &x(0), 1));
    step(9, s.quantify(Quantifier::Exists, &a(0), 1));
    step(10, s.truth_set(&[x(0)], 1));
    step(11, s.truth_set(&[a(0)], 1));
    step(12, s.connect(Connective::And, 1, 2));
    step(13, s.connect(Connective::Or, 1, 2));
    step(14, s.negate(3));
    step(15, s.negate(4));
    step(16, s.negate(2));
    step(17, s.connect(Connective::And, 1, 3));
    step(18, s.connect(Connective::And, 1, 16));
    step(19, s.truth_set(&[x(0)], 18));
    step(20, s.truth_set(&[x(0)], 12));
    step(21, s.truth_set(&[x(0)], 5));
    step(22, s.truth_set(&[x(0)], 13));
    step(23, s.connect(Connective::Or, 1, 16));
    step(24, s.truth_set(&[x(0)], 23));
    step(25, s.connect(Connective::And, 1, 4));
    step(26, s.truth_set(&[x(0), x(1)], 25));
    step(27, s.quantify(Quantifier::Forall, &x(0), 23));
    step(28, s.truth_set(&[a(1)], 27));
    step(29, s.truth_set(&[x(0), x(1)], 17));
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table1Row {
    pub row: usize,
    pub notation: String,
    pub formula: Expr,
    /// Expected symbolic notation, or a bare variable name the object must equal.
    pub symbol: Option<String>,
    pub nl: Option<String>,
}

impl Table1Row {
    pub fn key(&self) -> CanonicalKey {
        self.formula.canonical_key(false)
    }
}

#[derive(Debug, Error)]
#[error("fixture line {line}: {message}")]
pub struct FixtureError {
    pub line: usize,
    pub message: String,
}

pub fn parse_table1(text: &str) -> Result<Vec<Table1Row>, FixtureError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| FixtureError {
            line: i + 1,
            message,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(err(format!("expected 5 columns, found {}", cols.len())));
        }
        let row = cols[0]
            .parse()
            .map_err(|_| err(format!("bad row number `{}`", cols[0])))?;
        let formula = parse_expr(cols[2]).map_err(|e: ParseError| err(e.to_string()))?;
        let opt = |s: &str| (!s.is_empty()).then(|| s.to_owned());
        rows.push(Table1Row {
            row,
            notation: cols[1].to_owned(),
            formula,
            symbol: opt(cols[3]),
            nl: opt(cols[4]),
        });
    }
    Ok(rows)
}

pub fn table1_rows() -> Vec<Table1Row> {
    parse_table1(TABLE1).expect("bundled fixtures are well-formed")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum RowStatus {
    Matched { object_id: ObjectId },
    /// Located, but the expected symbol was not recognized.
    Unrecognized { object_id: ObjectId, found: Vec<String> },
    Missing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowCoverage {
    pub row: usize,
    pub notation: String,
    pub status: RowStatus,
}

impl RowCoverage {
    pub fn object_id(&self) -> Option<ObjectId> {
        match self.status {
            RowStatus::Matched { object_id } | RowStatus::Unrecognized { object_id, .. } => {
                Some(object_id)
            }
            RowStatus::Missing => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub rows: Vec<RowCoverage>,
    pub matched: usize,
    pub total: usize,
    /// Stored objects that are not one of the reference rows.
    pub extras: usize,
    pub checked_size: u32,
}

impl CoverageReport {
    pub fn passed(&self) -> bool {
        self.matched == self.total
    }

    pub fn missing(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.status == RowStatus::Missing)
            .map(|r| r.row)
            .collect()
    }
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.matched, self.total)
    }
}

fn symbol_holds(
    ev: &mut Evaluator,
    expr: &Expr,
    symbol: &str,
    catalog: &[CatalogEntry],
    k: u32,
) -> Result<Result<(), Vec<String>>, EvalError> {
    if let Some(v) = Variable::from_name(symbol) {
        let target = Expr::Term(Term::Var(v));
        let pairing = semantics::identity_pairing(expr, &target);
        let equal = match pairing {
            Ok(p) => ev.extensionally_equal(expr, &target, &p, k)?.is_equal(),
            Err(EvalError::ProfileMismatch(_)) => false,
            Err(e) => return Err(e),
        };
        return Ok(if equal { Ok(()) } else { Err(Vec::new()) });
    }
    let matches = recognize_expr(ev, expr, catalog, k)?;
    if matches.iter().any(|m| m.notation == symbol) {
        Ok(Ok(()))
    } else {
        Ok(Err(matches.into_iter().map(|m| m.notation).collect()))
    }
}

/// Locates every reference row by canonical key and checks expected symbols
/// by recognition at sweep size `k`.
pub fn verify_table1(
    store: &ObjectStore,
    rows: &[Table1Row],
    catalog: &[CatalogEntry],
    k: u32,
) -> Result<CoverageReport, EvalError> {
    let mut ev = Evaluator::new();
    let mut out = Vec::with_capacity(rows.len());
    let mut found = Vec::new();
    for row in rows {
        let status = match store.lookup_key(&row.key()) {
            None => RowStatus::Missing,
            Some(id) => {
                found.push(id);
                let expr = &store.get(id).expect("indexed id exists").payload;
                match &row.symbol {
                    None => RowStatus::Matched { object_id: id },
                    Some(sym) => match symbol_holds(&mut ev, expr, sym, catalog, k)? {
                        Ok(()) => RowStatus::Matched { object_id: id },
                        Err(found) => RowStatus::Unrecognized {
                            object_id: id,
                            found,
                        },
                    },
                }
            }
        };
        out.push(RowCoverage {
            row: row.row,
            notation: row.notation.clone(),
            status,
        });
    }
    found.sort_unstable();
    found.dedup();
    let matched = out
        .iter()
        .filter(|r| matches!(r.status, RowStatus::Matched { .. }))
        .count();
    Ok(CoverageReport {
        total: rows.len(),
        matched,
        extras: store.len() - found.len(),
        rows: out,
        checked_size: k,
    })
}
