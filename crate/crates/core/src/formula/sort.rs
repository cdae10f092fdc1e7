use thiserror::Error;

use super::{Expr, Formula, Sort, Term, Variable};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("sort mismatch in {context}: expected {expected}, found {found}")]
    SortMismatch {
        context: String,
        expected: Sort,
        found: Sort,
    },
    #[error("malformed tuple: {0}")]
    MalformedTuple(String),
    #[error("variable {0} is bound twice in one comprehension")]
    DuplicateBoundVar(String),
    #[error("comprehension binds {0}, which does not occur free in its body")]
    VacuousBinding(String),
    #[error("comprehension mixes element and set bindings: {0}")]
    MixedBinding(String),
}

impl SortError {
    pub fn code(&self) -> &'static str {
        match self {
            SortError::SortMismatch { .. } => "SortMismatch",
            SortError::MalformedTuple(_) => "MalformedTuple",
            SortError::DuplicateBoundVar(_) => "DuplicateBoundVar",
            SortError::VacuousBinding(_) => "VacuousBinding",
            SortError::MixedBinding(_) => "MixedBinding",
        }
    }
}

/// Result of a successful sort check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprSort {
    /// A well-sorted formula.
    Prop,
    Term(Sort),
}

impl Term {
    pub fn sort(&self) -> Result<Sort, SortError> {
        match self {
            Term::Var(v) => Ok(v.sort().clone()),
            Term::Tuple(components) => {
                if components.len() < 2 {
                    return Err(SortError::MalformedTuple(format!(
                        "arity {} is below 2",
                        components.len()
                    )));
                }
                for c in components {
                    let s = c.sort()?;
                    if !s.is_elem() {
                        return Err(SortError::MalformedTuple(format!(
                            "component {} has sort {s}, tuples hold elements only",
                            c
                        )));
                    }
                }
                Ok(Sort::ElemTuple(components.len()))
            }
            Term::Comprehension { bound, body } => {
                body.check_sorts()?;
                comprehension_sort(bound, body)
            }
        }
    }
}

/// Content sort of `{bound | body}` given that `body` is already well-sorted.
pub(crate) fn comprehension_sort(bound: &[Variable], body: &Formula) -> Result<Sort, SortError> {
    for (i, v) in bound.iter().enumerate() {
        if bound[..i].iter().any(|w| w.name() == v.name()) {
            return Err(SortError::DuplicateBoundVar(v.name().to_owned()));
        }
    }
    let free = body.free_vars();
    for v in bound {
        if !free.contains(v) {
            return Err(SortError::VacuousBinding(v.name().to_owned()));
        }
    }
    match bound {
        [] => Err(SortError::MalformedTuple(
            "comprehension binds no variable".to_owned(),
        )),
        [single] => Ok(Sort::set_of(single.sort().clone())),
        many => {
            if let Some(v) = many.iter().find(|v| !v.sort().is_elem()) {
                return Err(SortError::MixedBinding(format!(
                    "{} has sort {}; multi-variable bindings must be element-sorted",
                    v.name(),
                    v.sort()
                )));
            }
            Ok(Sort::set_of(Sort::ElemTuple(many.len())))
        }
    }
}

impl Formula {
    /// Confirms that every membership atom relates a term of sort `s` to a
    /// term of sort `SetOf(s)`.
    pub fn check_sorts(&self) -> Result<(), SortError> {
        match self {
            Formula::Member(l, r) => {
                let ls = l.sort()?;
                let rs = r.sort()?;
                let expected = Sort::set_of(ls);
                if rs != expected {
                    return Err(SortError::SortMismatch {
                        context: format!("({l} ∈ {r})"),
                        expected,
                        found: rs,
                    });
                }
                Ok(())
            }
            Formula::Not(f) | Formula::Quant(_, _, f) => f.check_sorts(),
            Formula::Binary(_, l, r) => {
                l.check_sorts()?;
                r.check_sorts()
            }
        }
    }
}

impl Expr {
    pub fn sort_check(&self) -> Result<ExprSort, SortError> {
        match self {
            Expr::Formula(f) => f.check_sorts().map(|()| ExprSort::Prop),
            Expr::Term(t) => t.sort().map(ExprSort::Term),
        }
    }
}
