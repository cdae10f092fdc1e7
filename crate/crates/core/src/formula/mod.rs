//! The two-sorted language: element variables, set variables, tuples,
//! comprehension terms and formulae built from the membership predicate.
//!
//! Variable sorts follow a naming convention when parsed: identifiers that
//! start with a lowercase letter denote elements (`x0`, `y`), identifiers that
//! start with an uppercase letter denote sets of elements (`A0`, `B`). The AST
//! itself accepts any sort; values built through the API with other sorts
//! render fine but do not survive a parse round trip.

mod canon;
mod parse;
mod render;
mod sort;
mod subst;

use std::fmt;

pub use canon::CanonicalKey;
pub use parse::{parse_expr, parse_formula, parse_term, ParseError};
pub use render::Style;
pub use sort::{ExprSort, SortError};

/// Sorts of the stratified hierarchy. A sort never contains itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Elem,
    /// Flat tuple of elements; arity is at least 2.
    ElemTuple(usize),
    SetOf(Box<Sort>),
}

impl Sort {
    pub fn set_of(inner: Sort) -> Sort {
        Sort::SetOf(Box::new(inner))
    }

    /// `SetOf(Elem)`, the sort of the seed set variables.
    pub fn elem_set() -> Sort {
        Sort::set_of(Sort::Elem)
    }

    pub fn is_elem(&self) -> bool {
        matches!(self, Sort::Elem)
    }

    pub fn content(&self) -> Option<&Sort> {
        match self {
            Sort::SetOf(inner) => Some(inner),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Elem => write!(f, "Elem"),
            Sort::ElemTuple(n) => write!(f, "ElemTuple({n})"),
            Sort::SetOf(inner) => write!(f, "SetOf({inner})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    name: String,
    sort: Sort,
}

impl Variable {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Variable {
            name: name.into(),
            sort,
        }
    }

    pub fn elem(name: impl Into<String>) -> Self {
        Variable::new(name, Sort::Elem)
    }

    pub fn set(name: impl Into<String>) -> Self {
        Variable::new(name, Sort::elem_set())
    }

    /// Builds a variable whose sort is implied by the naming convention.
    pub fn from_name(name: &str) -> Option<Self> {
        let first = name.chars().next()?;
        let sort = if first.is_ascii_lowercase() {
            Sort::Elem
        } else if first.is_ascii_uppercase() {
            Sort::elem_set()
        } else {
            return None;
        };
        if !name
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        {
            return None;
        }
        Some(Variable::new(name, sort))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }

    pub(crate) fn renamed(&self, name: String) -> Variable {
        Variable {
            name,
            sort: self.sort.clone(),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Variable),
    Tuple(Vec<Term>),
    Comprehension {
        bound: Vec<Variable>,
        body: Box<Formula>,
    },
}

impl Term {
    pub fn var(v: Variable) -> Term {
        Term::Var(v)
    }

    pub fn tuple(components: Vec<Term>) -> Term {
        Term::Tuple(components)
    }

    pub fn comprehension(bound: Vec<Variable>, body: Formula) -> Term {
        Term::Comprehension {
            bound,
            body: Box::new(body),
        }
    }

    pub fn is_comprehension(&self) -> bool {
        matches!(self, Term::Comprehension { .. })
    }
}

impl From<Variable> for Term {
    fn from(v: Variable) -> Term {
        Term::Var(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
    Implies,
}

impl Connective {
    pub fn is_commutative(self) -> bool {
        !matches!(self, Connective::Implies)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Implies => "implies",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Connective> {
        match s {
            "and" => Some(Connective::And),
            "or" => Some(Connective::Or),
            "implies" => Some(Connective::Implies),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Quantifier> {
        match s {
            "forall" => Some(Quantifier::Forall),
            "exists" => Some(Quantifier::Exists),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Member(Term, Term),
    Not(Box<Formula>),
    Binary(Connective, Box<Formula>, Box<Formula>),
    Quant(Quantifier, Variable, Box<Formula>),
}

impl Formula {
    pub fn member(lhs: impl Into<Term>, rhs: impl Into<Term>) -> Formula {
        Formula::Member(lhs.into(), rhs.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::Binary(Connective::And, Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Binary(Connective::Or, Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Binary(Connective::Implies, Box::new(l), Box::new(r))
    }

    pub fn connect(op: Connective, l: Formula, r: Formula) -> Formula {
        Formula::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn forall(v: Variable, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Forall, v, Box::new(body))
    }

    pub fn exists(v: Variable, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Exists, v, Box::new(body))
    }

    pub fn quantify(q: Quantifier, v: Variable, body: Formula) -> Formula {
        Formula::Quant(q, v, Box::new(body))
    }

    /// Number of atomic (membership) subformulae, counting nested comprehension bodies.
    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Member(l, r) => 1 + term_atom_count(l) + term_atom_count(r),
            Formula::Not(f) => f.atom_count(),
            Formula::Binary(_, l, r) => l.atom_count() + r.atom_count(),
            Formula::Quant(_, _, f) => f.atom_count(),
        }
    }

    /// Maximum nesting of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Member(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::Binary(_, l, r) => l.quantifier_depth().max(r.quantifier_depth()),
            Formula::Quant(_, _, f) => 1 + f.quantifier_depth(),
        }
    }

    pub fn contains_comprehension(&self) -> bool {
        match self {
            Formula::Member(l, r) => {
                term_contains_comprehension(l) || term_contains_comprehension(r)
            }
            Formula::Not(f) | Formula::Quant(_, _, f) => f.contains_comprehension(),
            Formula::Binary(_, l, r) => l.contains_comprehension() || r.contains_comprehension(),
        }
    }
}

fn term_atom_count(t: &Term) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::Tuple(ts) => ts.iter().map(term_atom_count).sum(),
        Term::Comprehension { body, .. } => body.atom_count(),
    }
}

fn term_contains_comprehension(t: &Term) -> bool {
    match t {
        Term::Var(_) => false,
        Term::Tuple(ts) => ts.iter().any(term_contains_comprehension),
        Term::Comprehension { .. } => true,
    }
}

/// Either half of the language: a formula or a term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Formula(Formula),
    Term(Term),
}

impl Expr {
    pub fn as_formula(&self) -> Option<&Formula> {
        match self {
            Expr::Formula(f) => Some(f),
            Expr::Term(_) => None,
        }
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            Expr::Term(t) => Some(t),
            Expr::Formula(_) => None,
        }
    }
}

impl From<Formula> for Expr {
    fn from(f: Formula) -> Expr {
        Expr::Formula(f)
    }
}

impl From<Term> for Expr {
    fn from(t: Term) -> Expr {
        Expr::Term(t)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Unicode))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Unicode))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Unicode))
    }
}
