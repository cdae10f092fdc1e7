//! Random generators for formulae, substitution instances and finite
//! interpretations, shared by the property suites.

use proptest::prelude::*;

use crate::formula::{Connective, Formula, Quantifier, Term, Variable};
use crate::semantics::{Assignment, Evaluator, Interpretation, Value};

pub fn elem_var() -> impl Strategy<Value = Variable> {
    (0..3usize).prop_map(|i| Variable::elem(format!("x{i}")))
}

pub fn set_var() -> impl Strategy<Value = Variable> {
    (0..2usize).prop_map(|i| Variable::set(format!("A{i}")))
}

fn connective() -> impl Strategy<Value = Connective> {
    prop_oneof![
        Just(Connective::And),
        Just(Connective::Or),
        Just(Connective::Implies)
    ]
}

fn quantifier() -> impl Strategy<Value = Quantifier> {
    prop_oneof![Just(Quantifier::Forall), Just(Quantifier::Exists)]
}

/// Well-sorted formulae over x0–x2 and A0–A1 with quantifiers of both sorts,
/// membership in comprehensions and membership of pairs in products.
pub fn formula() -> BoxedStrategy<Formula> {
    let leaf = (elem_var(), set_var()).prop_map(|(x, a)| Formula::member(x, a));
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (connective(), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Formula::connect(op, l, r)),
            (quantifier(), elem_var(), inner.clone())
                .prop_map(|(q, v, f)| Formula::quantify(q, v, f)),
            (quantifier(), set_var(), inner.clone())
                .prop_map(|(q, v, f)| Formula::quantify(q, v, f)),
            (elem_var(), elem_var(), set_var(), inner.clone()).prop_map(|(y, x, a, body)| {
                Formula::member(y, truth_set(vec![x], &a, body))
            }),
            (elem_var(), elem_var(), set_var(), inner.clone()).prop_map(|(y, x, a, body)| {
                let xb = Variable::elem(format!("{}b", x.name()));
                let pair = Term::tuple(vec![y.into(), x.clone().into()]);
                Formula::member(pair, truth_set(vec![x, xb], &a, body))
            }),
        ]
    })
    .boxed()
}

/// `{bound | body}`, conjoining `(v ∈ a)` for each bound variable the body
/// does not mention so the binding is never vacuous.
fn truth_set(bound: Vec<Variable>, a: &Variable, mut body: Formula) -> Term {
    for v in &bound {
        if !body.is_free(v) {
            body = Formula::and(body, Formula::member(v.clone(), a.clone()));
        }
    }
    Term::comprehension(bound, body)
}

/// A replacement term of the same sort as `v`.
pub fn replacement_for(v: &Variable) -> BoxedStrategy<Term> {
    if v.sort().is_elem() {
        elem_var().prop_map(Term::Var).boxed()
    } else {
        prop_oneof![
            set_var().prop_map(Term::Var),
            (elem_var(), set_var(), formula()).prop_map(|(x, a, body)| truth_set(vec![x], &a, body)),
        ]
        .boxed()
    }
}

#[derive(Clone, Debug)]
pub struct SubstitutionCase {
    pub formula: Formula,
    pub var: Variable,
    pub term: Term,
    pub domain_size: u32,
    pub assignment: Assignment,
}

fn value_for(v: &Variable, seed: u32, d: u32) -> Value {
    if v.sort().is_elem() {
        Value::Elem(seed % d)
    } else {
        Value::elems((0..d).filter(|i| seed & (1 << i) != 0))
    }
}

/// A formula, a variable, a same-sorted term, a domain size of at most 3 and
/// an assignment to every variable either side may mention.
pub fn substitution_case() -> impl Strategy<Value = SubstitutionCase> {
    let var = prop_oneof![elem_var(), set_var()];
    (formula(), var)
        .prop_flat_map(|(f, v)| {
            let t = replacement_for(&v);
            (Just(f), Just(v), t, 1..=3u32, prop::collection::vec(any::<u32>(), 5))
        })
        .prop_map(|(formula, var, term, d, seeds)| {
            let vars = [
                Variable::elem("x0"),
                Variable::elem("x1"),
                Variable::elem("x2"),
                Variable::set("A0"),
                Variable::set("A1"),
            ];
            let mut assignment = Assignment::new();
            for (v, seed) in vars.iter().zip(seeds) {
                assignment.set(v.clone(), value_for(v, seed, d));
            }
            SubstitutionCase {
                formula,
                var,
                term,
                domain_size: d,
                assignment,
            }
        })
}

impl SubstitutionCase {
    /// Truth of `φ[t/v]` under the assignment, and truth of `φ` with `v`
    /// reassigned to the denotation of `t`.
    pub fn both_sides(&self) -> Result<(bool, bool), String> {
        let i = Interpretation::new(self.domain_size);
        let mut ev = Evaluator::new();
        let substituted = self
            .formula
            .substitute(&self.var, &self.term)
            .map_err(|e| e.to_string())?;
        let lhs = ev
            .eval(&substituted, i, &self.assignment)
            .map_err(|e| e.to_string())?;
        let denotation = ev
            .eval_term(&self.term, i, &self.assignment)
            .map_err(|e| e.to_string())?;
        let mut updated = self.assignment.clone();
        updated.set(self.var.clone(), denotation);
        let rhs = ev.eval(&self.formula, i, &updated).map_err(|e| e.to_string())?;
        Ok((lhs, rhs))
    }
}
