//! Exhaustive evaluation over finite interpretations.
//!
//! An interpretation of size `d` has domain `{0, …, d-1}`. Element variables
//! range over the domain, tuple variables over `Dⁿ`, and `SetOf(s)` over every
//! subset of the range of `s`. Ranges are enumerated in a fixed order:
//! elements ascending, tuples lexicographically, subsets in binary-counter
//! order of their characteristic vectors. Assignments vary the first variable
//! slowest, so "first witness" always means lexicographically smallest.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formula::{Expr, Formula, Quantifier, Sort, Term, Variable};

/// Default sweep size.
pub const DEFAULT_MAX_SIZE: u32 = 3;
/// Default cap on evaluation steps per sweep.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value assigned to {0}")]
    IncompleteAssignment(String),
    #[error("evaluation budget of {0} steps exhausted")]
    ResourceLimit(u64),
    #[error("ill-sorted value for {0}")]
    IllSorted(String),
    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::IncompleteAssignment(_) => "IncompleteAssignment",
            EvalError::ResourceLimit(_) => "ResourceLimit",
            EvalError::IllSorted(_) => "IllSorted",
            EvalError::ProfileMismatch(_) => "ProfileMismatch",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Elem(u32),
    Tuple(Vec<u32>),
    Set(BTreeSet<Value>),
}

impl Value {
    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Set(items.into_iter().collect())
    }

    /// A set of domain elements.
    pub fn elems(items: impl IntoIterator<Item = u32>) -> Value {
        Value::set(items.into_iter().map(Value::Elem))
    }

    pub fn empty() -> Value {
        Value::Set(BTreeSet::new())
    }

    pub fn contains(&self, v: &Value) -> Option<bool> {
        match self {
            Value::Set(s) => Some(s.contains(v)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Elem(e) => write!(f, "{e}"),
            Value::Tuple(es) => {
                let parts: Vec<String> = es.iter().map(|e| e.to_string()).collect();
                write!(f, "⟨{}⟩", parts.join(", "))
            }
            Value::Set(s) if s.is_empty() => write!(f, "∅"),
            Value::Set(s) => {
                let parts: Vec<String> = s.iter().map(|v| v.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Interpretation {
    pub domain_size: u32,
}

impl Interpretation {
    pub fn new(domain_size: u32) -> Self {
        assert!(domain_size >= 1, "domains are non-empty");
        Interpretation { domain_size }
    }
}

/// Values for free variables, in a fixed variable order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    bindings: Vec<(Variable, Value)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Variable, value: Value) -> Self {
        self.set(var, value);
        self
    }

    pub fn set(&mut self, var: Variable, value: Value) {
        match self.bindings.iter_mut().find(|(v, _)| *v == var) {
            Some(slot) => slot.1 = value,
            None => self.bindings.push((var, value)),
        }
    }

    pub fn get(&self, var: &Variable) -> Option<&Value> {
        self.bindings.iter().find(|(v, _)| v == var).map(|(_, x)| x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Value)> {
        self.bindings.iter().map(|(v, x)| (v, x))
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .bindings
            .iter()
            .map(|(v, x)| format!("{v} ↦ {x}"))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.bindings.len()))?;
        for (v, x) in &self.bindings {
            map.serialize_entry(v.name(), &x.to_string())?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub domain_size: u32,
    pub assignment: Assignment,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.assignment.is_empty() {
            write!(f, "d={}", self.domain_size)
        } else {
            write!(f, "d={}, {}", self.domain_size, self.assignment)
        }
    }
}

/// Bounded truth status: verdicts hold for every interpretation of size ≤ k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "label")]
pub enum Classification {
    ValidUpTo { k: u32 },
    UnsatUpTo { k: u32 },
    Contingent {
        witness_true: Witness,
        witness_false: Witness,
    },
}

impl Classification {
    pub fn label(&self) -> String {
        match self {
            Classification::ValidUpTo { k } => format!("ValidUpTo({k})"),
            Classification::UnsatUpTo { k } => format!("UnsatUpTo({k})"),
            Classification::Contingent { .. } => "Contingent".to_owned(),
        }
    }

    pub fn is_contingent(&self) -> bool {
        matches!(self, Classification::Contingent { .. })
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// What one side of a comparison evaluated to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Truth(bool),
    Set(Value),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Truth(b) => write!(f, "{b}"),
            Outcome::Set(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub domain_size: u32,
    /// Values for the left-hand side's variables.
    pub assignment: Assignment,
    pub lhs: Outcome,
    pub rhs: Outcome,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d={}, {}: {} vs {}",
            self.domain_size, self.assignment, self.lhs, self.rhs
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "counterexample")]
pub enum Agreement {
    Equal,
    Differs(Counterexample),
}

impl Agreement {
    pub fn is_equal(&self) -> bool {
        matches!(self, Agreement::Equal)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Agreement::Equal => None,
            Agreement::Differs(c) => Some(c),
        }
    }
}

type Env<'a> = Vec<(&'a Variable, Value)>;

/// Stateful evaluator: caches ranges and counts steps against a budget.
pub struct Evaluator {
    budget: u64,
    steps: u64,
    quantifier_instances: u64,
    ranges: HashMap<(u32, Sort), Rc<Vec<Value>>>,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::new()
    }
}

impl Evaluator {
    pub fn new() -> Self {
        Evaluator::with_budget(DEFAULT_BUDGET)
    }

    pub fn with_budget(budget: u64) -> Self {
        Evaluator {
            budget,
            steps: 0,
            quantifier_instances: 0,
            ranges: HashMap::new(),
        }
    }

    /// Steps spent by the last top-level call.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Quantifier instances visited by the last top-level call.
    pub fn quantifier_instances(&self) -> u64 {
        self.quantifier_instances
    }

    fn reset(&mut self) {
        self.steps = 0;
        self.quantifier_instances = 0;
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(EvalError::ResourceLimit(self.budget));
        }
        Ok(())
    }

    /// All values of `sort` at domain size `d`, in enumeration order.
    pub fn range(&mut self, d: u32, sort: &Sort) -> Result<Rc<Vec<Value>>, EvalError> {
        if let Some(r) = self.ranges.get(&(d, sort.clone())) {
            return Ok(Rc::clone(r));
        }
        let values = match sort {
            Sort::Elem => (0..d).map(Value::Elem).collect(),
            Sort::ElemTuple(n) => {
                let n = *n as u32;
                let total = (d as u64).checked_pow(n).unwrap_or(u64::MAX);
                if total > self.budget {
                    return Err(EvalError::ResourceLimit(self.budget));
                }
                (0..total)
                    .map(|mut code| {
                        let mut digits = vec![0u32; n as usize];
                        for slot in digits.iter_mut().rev() {
                            *slot = (code % d as u64) as u32;
                            code /= d as u64;
                        }
                        Value::Tuple(digits)
                    })
                    .collect()
            }
            Sort::SetOf(inner) => {
                let base = self.range(d, inner)?;
                let n = base.len();
                if n >= 63 || (1u64 << n) > self.budget {
                    return Err(EvalError::ResourceLimit(self.budget));
                }
                (0..(1u64 << n))
                    .map(|mask| {
                        Value::Set(
                            (0..n)
                                .filter(|j| mask & (1 << j) != 0)
                                .map(|j| base[j].clone())
                                .collect(),
                        )
                    })
                    .collect()
            }
        };
        let values = Rc::new(values);
        self.ranges.insert((d, sort.clone()), Rc::clone(&values));
        Ok(values)
    }

    /// Every assignment of values to `vars` at size `d`, first variable slowest.
    pub fn assignments(&mut self, d: u32, vars: &[Variable]) -> Result<Vec<Assignment>, EvalError> {
        let ranges = vars
            .iter()
            .map(|v| self.range(d, v.sort()))
            .collect::<Result<Vec<_>, _>>()?;
        let total: u64 = ranges
            .iter()
            .try_fold(1u64, |acc, r| acc.checked_mul(r.len() as u64))
            .unwrap_or(u64::MAX);
        if total > self.budget {
            return Err(EvalError::ResourceLimit(self.budget));
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut idx = vec![0usize; vars.len()];
        loop {
            let mut a = Assignment::new();
            for (i, v) in vars.iter().enumerate() {
                a.bindings.push((v.clone(), ranges[i][idx[i]].clone()));
            }
            out.push(a);
            let mut pos = vars.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < ranges[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    fn env_for<'a>(f_vars: &[Variable], a: &'a Assignment) -> Result<Env<'a>, EvalError> {
        for v in f_vars {
            if a.get(v).is_none() {
                return Err(EvalError::IncompleteAssignment(v.to_string()));
            }
        }
        Ok(a.bindings.iter().map(|(v, x)| (v, x.clone())).collect())
    }

    pub fn eval(&mut self, f: &Formula, i: Interpretation, a: &Assignment) -> Result<bool, EvalError> {
        self.reset();
        let mut env = Self::env_for(&f.free_vars(), a)?;
        self.formula(f, i.domain_size, &mut env)
    }

    pub fn eval_term(&mut self, t: &Term, i: Interpretation, a: &Assignment) -> Result<Value, EvalError> {
        self.reset();
        let mut env = Self::env_for(&t.free_vars(), a)?;
        self.term(t, i.domain_size, &mut env)
    }

    /// Truth value of a formula or denotation of a term.
    pub fn outcome(&mut self, e: &Expr, d: u32, a: &Assignment) -> Result<Outcome, EvalError> {
        let mut env = Self::env_for(&e.free_vars(), a)?;
        match e {
            Expr::Formula(f) => self.formula(f, d, &mut env).map(Outcome::Truth),
            Expr::Term(t) => self.term(t, d, &mut env).map(Outcome::Set),
        }
    }

    fn formula<'a>(&mut self, f: &'a Formula, d: u32, env: &mut Env<'a>) -> Result<bool, EvalError> {
        match f {
            Formula::Member(l, r) => {
                self.tick()?;
                let lv = self.term(l, d, env)?;
                let found = match r {
                    Term::Var(v) => lookup(env, v)?.contains(&lv),
                    _ => self.term(r, d, env)?.contains(&lv),
                };
                found.ok_or_else(|| EvalError::IllSorted(r.to_string()))
            }
            Formula::Not(g) => Ok(!self.formula(g, d, env)?),
            Formula::Binary(op, l, r) => {
                use crate::formula::Connective::*;
                let lv = self.formula(l, d, env)?;
                match op {
                    And if !lv => Ok(false),
                    Or if lv => Ok(true),
                    Implies if !lv => Ok(true),
                    _ => self.formula(r, d, env),
                }
            }
            Formula::Quant(q, v, g) => {
                let range = self.range(d, v.sort())?;
                let want = matches!(q, Quantifier::Exists);
                for value in range.iter() {
                    self.tick()?;
                    self.quantifier_instances += 1;
                    env.push((v, value.clone()));
                    let r = self.formula(g, d, env);
                    env.pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            }
        }
    }

    fn term<'a>(&mut self, t: &'a Term, d: u32, env: &mut Env<'a>) -> Result<Value, EvalError> {
        match t {
            Term::Var(v) => lookup(env, v).cloned(),
            Term::Tuple(ts) => {
                let mut out = Vec::with_capacity(ts.len());
                for c in ts {
                    match self.term(c, d, env)? {
                        Value::Elem(e) => out.push(e),
                        _ => return Err(EvalError::IllSorted(c.to_string())),
                    }
                }
                Ok(Value::Tuple(out))
            }
            Term::Comprehension { bound, body } => {
                let vars: Vec<Variable> = bound.clone();
                let candidates = self.assignments(d, &vars)?;
                let mut members = BTreeSet::new();
                for cand in candidates {
                    self.tick()?;
                    let depth = env.len();
                    for (i, (_, x)) in cand.bindings.into_iter().enumerate() {
                        env.push((&bound[i], x));
                    }
                    let holds = self.formula(body, d, env);
                    let values: Vec<Value> = env.drain(depth..).map(|(_, x)| x).collect();
                    if holds? {
                        members.insert(pack(values)?);
                    }
                }
                Ok(Value::Set(members))
            }
        }
    }

    /// Sweeps every interpretation of size 1..=max_size and every assignment
    /// of the free variables, returning the strongest supported verdict.
    pub fn classify(&mut self, f: &Formula, max_size: u32) -> Result<Classification, EvalError> {
        self.reset();
        let vars = f.free_vars();
        let mut witness_true = None;
        let mut witness_false = None;
        for d in 1..=max_size {
            for a in self.assignments(d, &vars)? {
                let mut env = Self::env_for(&vars, &a)?;
                let value = self.formula(f, d, &mut env)?;
                let slot = if value {
                    &mut witness_true
                } else {
                    &mut witness_false
                };
                if slot.is_none() {
                    *slot = Some(Witness {
                        domain_size: d,
                        assignment: a,
                    });
                }
                if witness_true.is_some() && witness_false.is_some() {
                    return Ok(Classification::Contingent {
                        witness_true: witness_true.take().unwrap(),
                        witness_false: witness_false.take().unwrap(),
                    });
                }
            }
        }
        Ok(match witness_true {
            Some(_) => Classification::ValidUpTo { k: max_size },
            None => Classification::UnsatUpTo { k: max_size },
        })
    }

    /// Compares two formulae (or two terms) on every interpretation up to
    /// `max_size` and every assignment. `pairing` maps each free variable of
    /// `lhs` to the free variable of `rhs` that receives the same value.
    pub fn extensionally_equal(
        &mut self,
        lhs: &Expr,
        rhs: &Expr,
        pairing: &[(Variable, Variable)],
        max_size: u32,
    ) -> Result<Agreement, EvalError> {
        check_profile(lhs, rhs, pairing)?;
        self.reset();
        let left_vars: Vec<Variable> = pairing.iter().map(|(l, _)| l.clone()).collect();
        for d in 1..=max_size {
            for a in self.assignments(d, &left_vars)? {
                let mut b = Assignment::new();
                for ((_, r), (_, x)) in pairing.iter().zip(a.bindings.iter()) {
                    b.bindings.push((r.clone(), x.clone()));
                }
                let lv = self.outcome(lhs, d, &a)?;
                let rv = self.outcome(rhs, d, &b)?;
                if lv != rv {
                    return Ok(Agreement::Differs(Counterexample {
                        domain_size: d,
                        assignment: a,
                        lhs: lv,
                        rhs: rv,
                    }));
                }
            }
        }
        Ok(Agreement::Equal)
    }
}

fn lookup<'e>(env: &'e Env<'_>, v: &Variable) -> Result<&'e Value, EvalError> {
    env.iter()
        .rev()
        .find(|(w, _)| *w == v)
        .map(|(_, x)| x)
        .ok_or_else(|| EvalError::IncompleteAssignment(v.to_string()))
}

fn pack(mut values: Vec<Value>) -> Result<Value, EvalError> {
    if values.len() == 1 {
        return Ok(values.pop().unwrap());
    }
    values
        .into_iter()
        .map(|v| match v {
            Value::Elem(e) => Ok(e),
            other => Err(EvalError::IllSorted(other.to_string())),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Value::Tuple)
}

fn check_profile(lhs: &Expr, rhs: &Expr, pairing: &[(Variable, Variable)]) -> Result<(), EvalError> {
    let mismatch = |msg: String| Err(EvalError::ProfileMismatch(msg));
    let (ls, rs) = (
        lhs.sort_check().map_err(|e| EvalError::ProfileMismatch(e.to_string()))?,
        rhs.sort_check().map_err(|e| EvalError::ProfileMismatch(e.to_string()))?,
    );
    if ls != rs {
        return mismatch(format!("{lhs} and {rhs} have different sorts"));
    }
    for (l, r) in pairing {
        if l.sort() != r.sort() {
            return mismatch(format!("{l} and {r} have different sorts"));
        }
    }
    for (i, (l, r)) in pairing.iter().enumerate() {
        if pairing[..i].iter().any(|(l2, r2)| l2 == l || r2 == r) {
            return mismatch(format!("pairing {l} ↔ {r} is not injective"));
        }
    }
    let same_set = |vars: Vec<Variable>, side: Vec<&Variable>| {
        vars.len() == side.len() && vars.iter().all(|v| side.contains(&v))
    };
    if !same_set(lhs.free_vars(), pairing.iter().map(|(l, _)| l).collect()) {
        return mismatch(format!("pairing does not cover the parameters of {lhs}"));
    }
    if !same_set(rhs.free_vars(), pairing.iter().map(|(_, r)| r).collect()) {
        return mismatch(format!("pairing does not cover the parameters of {rhs}"));
    }
    Ok(())
}

/// Pairs each free variable with itself; both sides must have the same free variables.
pub fn identity_pairing(lhs: &Expr, rhs: &Expr) -> Result<Vec<(Variable, Variable)>, EvalError> {
    let l = lhs.free_vars();
    let r = rhs.free_vars();
    if l.len() != r.len() || !l.iter().all(|v| r.contains(v)) {
        return Err(EvalError::ProfileMismatch(format!(
            "{lhs} and {rhs} have different free variables"
        )));
    }
    Ok(l.into_iter().map(|v| (v.clone(), v)).collect())
}

pub fn eval(f: &Formula, i: Interpretation, a: &Assignment) -> Result<bool, EvalError> {
    Evaluator::new().eval(f, i, a)
}

pub fn eval_term(t: &Term, i: Interpretation, a: &Assignment) -> Result<Value, EvalError> {
    Evaluator::new().eval_term(t, i, a)
}

pub fn classify(f: &Formula, max_size: u32) -> Result<Classification, EvalError> {
    Evaluator::new().classify(f, max_size)
}

/// Extensional comparison with the identity pairing of free variables.
pub fn extensionally_equal(lhs: &Expr, rhs: &Expr, max_size: u32) -> Result<Agreement, EvalError> {
    let pairing = identity_pairing(lhs, rhs)?;
    Evaluator::new().extensionally_equal(lhs, rhs, &pairing, max_size)
}
