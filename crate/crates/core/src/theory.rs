//! Bounded checks of the truth-set identities: products, intersections and
//! unions of truth sets against connectives of their defining predicates, and
//! the membership biconditional of every stored truth set.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::formula::{Connective, Expr, Formula, Term, Variable};
use crate::recognition::builtin_catalog;
use crate::rules::{Family, ObjectId, ObjectStore};
use crate::semantics::{identity_pairing, Agreement, Counterexample, EvalError, Evaluator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Identity {
    ProductOfTruthSets,
    IntersectionIsConjunction,
    UnionIsDisjunction,
    TruthSetBiconditional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeOp {
    Intersection,
    Union,
}

impl LatticeOp {
    fn symbol(self) -> &'static str {
        match self {
            LatticeOp::Intersection => "∩",
            LatticeOp::Union => "∪",
        }
    }

    fn connective(self) -> Connective {
        match self {
            LatticeOp::Intersection => Connective::And,
            LatticeOp::Union => Connective::Or,
        }
    }

    fn identity(self) -> Identity {
        match self {
            LatticeOp::Intersection => Identity::IntersectionIsConjunction,
            LatticeOp::Union => Identity::UnionIsDisjunction,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Counterexample { counterexample: Counterexample },
}

fn rendered<S: Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCase {
    pub identity: Identity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object_id: Option<ObjectId>,
    #[serde(serialize_with = "rendered")]
    pub lhs: Expr,
    #[serde(serialize_with = "rendered")]
    pub rhs: Expr,
    /// Largest domain size swept.
    pub sweep: u32,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl IdentityCase {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Re-evaluates both sides on the reported counterexample; true when they
    /// really disagree there. Passing cases have nothing to recheck.
    pub fn recheck(&self) -> Result<bool, EvalError> {
        let Verdict::Counterexample { counterexample: c } = &self.verdict else {
            return Ok(true);
        };
        let mut ev = Evaluator::new();
        let l = ev.outcome(&self.lhs, c.domain_size, &c.assignment)?;
        let r = ev.outcome(&self.rhs, c.domain_size, &c.assignment)?;
        Ok(l != r && l == c.lhs && r == c.rhs)
    }
}

impl fmt::Display for IdentityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {} = {}: ", self.identity, self.lhs, self.rhs)?;
        match &self.verdict {
            Verdict::Pass => write!(f, "pass (d ≤ {})", self.sweep),
            Verdict::Counterexample { counterexample } => write!(f, "counterexample {counterexample}"),
        }
    }
}

fn sweep(
    ev: &mut Evaluator,
    identity: Identity,
    object_id: Option<ObjectId>,
    lhs: Expr,
    rhs: Expr,
    k: u32,
) -> Result<IdentityCase, EvalError> {
    let pairing = identity_pairing(&lhs, &rhs)?;
    let verdict = match ev.extensionally_equal(&lhs, &rhs, &pairing, k)? {
        Agreement::Equal => Verdict::Pass,
        Agreement::Differs(counterexample) => Verdict::Counterexample { counterexample },
    };
    Ok(IdentityCase {
        identity,
        object_id,
        lhs,
        rhs,
        sweep: k,
        verdict,
    })
}

/// Instantiates a catalog template's set parameters with the given terms.
fn apply_template(symbol: &str, args: &[Term]) -> Expr {
    let entry = builtin_catalog()
        .into_iter()
        .find(|e| e.symbol == symbol)
        .expect("template is in the builtin catalog");
    let mut expr = entry.template.clone();
    for (param, arg) in entry.params.iter().zip(args) {
        expr = expr.substitute(param, arg).expect("set parameter takes a set");
    }
    expr
}

fn require_free(f: &Formula, v: &Variable, free: bool) -> Result<(), EvalError> {
    if f.is_free(v) != free {
        let how = if free { "free" } else { "not free" };
        return Err(EvalError::ProfileMismatch(format!("{v} must be {how} in {f}")));
    }
    if !v.sort().is_elem() {
        return Err(EvalError::ProfileMismatch(format!("{v} is not an element variable")));
    }
    Ok(())
}

/// `{v1 | p1} × {v2 | p2}` against `{⟨v1, v2⟩ | p1 op p2}`; `op` is `And`
/// for the identity itself, anything else gives a control case.
pub fn check_product_identity_with(
    p1: &Formula,
    v1: &Variable,
    p2: &Formula,
    v2: &Variable,
    op: Connective,
    max_size: u32,
) -> Result<IdentityCase, EvalError> {
    require_free(p1, v1, true)?;
    require_free(p2, v2, true)?;
    require_free(p1, v2, false)?;
    require_free(p2, v1, false)?;
    let m1 = Term::comprehension(vec![v1.clone()], p1.clone());
    let m2 = Term::comprehension(vec![v2.clone()], p2.clone());
    let lhs = apply_template("×", &[m1, m2]);
    let rhs = Expr::Term(Term::comprehension(
        vec![v1.clone(), v2.clone()],
        Formula::connect(op, p1.clone(), p2.clone()),
    ));
    sweep(&mut Evaluator::new(), Identity::ProductOfTruthSets, None, lhs, rhs, max_size)
}

pub fn check_product_identity(
    p1: &Formula,
    v1: &Variable,
    p2: &Formula,
    v2: &Variable,
    max_size: u32,
) -> Result<IdentityCase, EvalError> {
    check_product_identity_with(p1, v1, p2, v2, Connective::And, max_size)
}

/// `{v1 | p1} ∩ {v2 | p2}` (or `∪`) against `{v | p1 & p2}` (or `∨`).
/// Both truth sets must be taken over the same variable.
pub fn check_lattice_identity(
    op: LatticeOp,
    p1: &Formula,
    v1: &Variable,
    p2: &Formula,
    v2: &Variable,
    max_size: u32,
) -> Result<IdentityCase, EvalError> {
    if v1 != v2 {
        return Err(EvalError::ProfileMismatch(format!(
            "truth sets over {v1} and {v2} do not share a bound variable"
        )));
    }
    require_free(p1, v1, true)?;
    require_free(p2, v2, true)?;
    let m1 = Term::comprehension(vec![v1.clone()], p1.clone());
    let m2 = Term::comprehension(vec![v2.clone()], p2.clone());
    let lhs = apply_template(op.symbol(), &[m1, m2]);
    let rhs = Expr::Term(Term::comprehension(
        vec![v1.clone()],
        Formula::connect(op.connective(), p1.clone(), p2.clone()),
    ));
    sweep(&mut Evaluator::new(), op.identity(), None, lhs, rhs, max_size)
}

/// The membership biconditional for every stored truth set.
pub fn check_biconditional(store: &ObjectStore, max_size: u32) -> Result<Vec<IdentityCase>, EvalError> {
    store
        .objects()
        .par_iter()
        .filter(|o| o.family() != Family::P)
        .map_init(Evaluator::new, |ev, o| {
            let (lhs, rhs) = store
                .expand_biconditional(o.id)
                .expect("non-predicate objects are truth sets");
            sweep(
                ev,
                Identity::TruthSetBiconditional,
                Some(o.id),
                Expr::Formula(lhs),
                Expr::Formula(rhs),
                max_size,
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub cases: Vec<IdentityCase>,
    pub passed: usize,
    pub failed: usize,
}

impl IdentityReport {
    fn new(cases: Vec<IdentityCase>) -> Self {
        let passed = cases.iter().filter(|c| c.passed()).count();
        IdentityReport {
            failed: cases.len() - passed,
            passed,
            cases,
        }
    }

    pub fn count(&self, identity: Identity) -> usize {
        self.cases.iter().filter(|c| c.identity == identity).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} identity cases pass", self.passed, self.cases.len())
    }
}

#[derive(Clone, Debug)]
enum Job {
    Product(ObjectId, Variable, ObjectId, Variable),
    Lattice(LatticeOp, ObjectId, ObjectId, Variable),
}

/// Instantiates the identities over every compatible pair of stored
/// quantifier-free predicates and checks the biconditional of every truth set.
pub fn identity_suite(store: &ObjectStore, max_size: u32) -> Result<IdentityReport, EvalError> {
    let open: Vec<(ObjectId, &Formula)> = store
        .objects()
        .iter()
        .filter_map(|o| o.formula().map(|f| (o.id, f)))
        .filter(|(_, f)| f.quantifier_depth() == 0 && !f.contains_comprehension())
        .collect();
    let mut elems: Vec<Variable> = Vec::new();
    for (_, f) in &open {
        for v in f.free_vars() {
            if v.sort().is_elem() && !elems.contains(&v) {
                elems.push(v);
            }
        }
    }

    let mut jobs = Vec::new();
    for v in &elems {
        let with_v: Vec<ObjectId> = open
            .iter()
            .filter(|(_, f)| f.is_free(v))
            .map(|(id, _)| *id)
            .collect();
        for (i, &a) in with_v.iter().enumerate() {
            for &b in &with_v[i..] {
                for op in [LatticeOp::Intersection, LatticeOp::Union] {
                    jobs.push(Job::Lattice(op, a, b, v.clone()));
                }
            }
        }
    }
    for v1 in &elems {
        for v2 in &elems {
            if v1 == v2 {
                continue;
            }
            let only = |v: &Variable, w: &Variable| -> Vec<ObjectId> {
                open.iter()
                    .filter(|(_, f)| f.is_free(v) && !f.is_free(w))
                    .map(|(id, _)| *id)
                    .collect()
            };
            for &a in &only(v1, v2) {
                for &b in &only(v2, v1) {
                    jobs.push(Job::Product(a, v1.clone(), b, v2.clone()));
                }
            }
        }
    }

    let formula = |id: ObjectId| store.get(id).ok().and_then(|o| o.formula()).expect("predicate");
    let mut cases: Vec<IdentityCase> = jobs
        .par_iter()
        .map(|job| match job {
            Job::Product(a, v1, b, v2) => {
                check_product_identity(formula(*a), v1, formula(*b), v2, max_size)
            }
            Job::Lattice(op, a, b, v) => {
                check_lattice_identity(*op, formula(*a), v, formula(*b), v, max_size)
            }
        })
        .collect::<Result<_, _>>()?;
    cases.extend(check_biconditional(store, max_size)?);
    Ok(IdentityReport::new(cases))
}

/// A deliberately wrong instance: the product against a disjunction.
pub fn negative_control(max_size: u32) -> Result<IdentityCase, EvalError> {
    let p1 = Formula::member(Variable::elem("x0"), Variable::set("A0"));
    let p2 = Formula::member(Variable::elem("x1"), Variable::set("A1"));
    check_product_identity_with(
        &p1,
        &Variable::elem("x0"),
        &p2,
        &Variable::elem("x1"),
        Connective::Or,
        max_size,
    )
}
