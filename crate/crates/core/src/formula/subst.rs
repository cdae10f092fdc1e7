use std::collections::HashSet;

use super::sort::SortError;
use super::{Expr, Formula, Term, Variable};

impl Formula {
    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        collect_formula(self, &mut bound, &mut out);
        out
    }

    pub fn is_free(&self, v: &Variable) -> bool {
        self.free_vars().contains(v)
    }

    pub fn substitute(&self, v: &Variable, replacement: &Term) -> Result<Formula, SortError> {
        check_replacement(v, replacement)?;
        let replacement = hygienic(replacement, &self.free_vars());
        let fv_repl = replacement.free_vars();
        Ok(subst_formula(self, v, &replacement, &fv_repl))
    }
}

impl Term {
    pub fn free_vars(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        collect_term(self, &mut bound, &mut out);
        out
    }

    pub fn substitute(&self, v: &Variable, replacement: &Term) -> Result<Term, SortError> {
        check_replacement(v, replacement)?;
        let replacement = hygienic(replacement, &self.free_vars());
        let fv_repl = replacement.free_vars();
        Ok(subst_term(self, v, &replacement, &fv_repl))
    }
}

impl Expr {
    pub fn free_vars(&self) -> Vec<Variable> {
        match self {
            Expr::Formula(f) => f.free_vars(),
            Expr::Term(t) => t.free_vars(),
        }
    }

    pub fn substitute(&self, v: &Variable, replacement: &Term) -> Result<Expr, SortError> {
        match self {
            Expr::Formula(f) => f.substitute(v, replacement).map(Expr::Formula),
            Expr::Term(t) => t.substitute(v, replacement).map(Expr::Term),
        }
    }
}

fn check_replacement(v: &Variable, replacement: &Term) -> Result<(), SortError> {
    let found = replacement.sort()?;
    if &found != v.sort() {
        return Err(SortError::SortMismatch {
            context: format!("substitution of {replacement} for {v}"),
            expected: v.sort().clone(),
            found,
        });
    }
    Ok(())
}

fn push_unique(out: &mut Vec<Variable>, v: &Variable) {
    if !out.contains(v) {
        out.push(v.clone());
    }
}

fn collect_formula(f: &Formula, bound: &mut Vec<Variable>, out: &mut Vec<Variable>) {
    match f {
        Formula::Member(l, r) => {
            collect_term(l, bound, out);
            collect_term(r, bound, out);
        }
        Formula::Not(g) => collect_formula(g, bound, out),
        Formula::Binary(_, l, r) => {
            collect_formula(l, bound, out);
            collect_formula(r, bound, out);
        }
        Formula::Quant(_, v, g) => {
            bound.push(v.clone());
            collect_formula(g, bound, out);
            bound.pop();
        }
    }
}

fn collect_term(t: &Term, bound: &mut Vec<Variable>, out: &mut Vec<Variable>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(v) {
                push_unique(out, v);
            }
        }
        Term::Tuple(ts) => ts.iter().for_each(|c| collect_term(c, bound, out)),
        Term::Comprehension { bound: vs, body } => {
            let depth = bound.len();
            bound.extend(vs.iter().cloned());
            collect_formula(body, bound, out);
            bound.truncate(depth);
        }
    }
}

/// Every variable name occurring anywhere, bound or free.
pub(crate) fn all_names_formula(f: &Formula, out: &mut HashSet<String>) {
    match f {
        Formula::Member(l, r) => {
            all_names_term(l, out);
            all_names_term(r, out);
        }
        Formula::Not(g) => all_names_formula(g, out),
        Formula::Binary(_, l, r) => {
            all_names_formula(l, out);
            all_names_formula(r, out);
        }
        Formula::Quant(_, v, g) => {
            out.insert(v.name().to_owned());
            all_names_formula(g, out);
        }
    }
}

pub(crate) fn all_names_term(t: &Term, out: &mut HashSet<String>) {
    match t {
        Term::Var(v) => {
            out.insert(v.name().to_owned());
        }
        Term::Tuple(ts) => ts.iter().for_each(|c| all_names_term(c, out)),
        Term::Comprehension { bound, body } => {
            out.extend(bound.iter().map(|v| v.name().to_owned()));
            all_names_formula(body, out);
        }
    }
}

/// Primes `base` until the name is unused.
pub(crate) fn fresh_name(base: &str, avoid: &HashSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Renames binders inside the replacement whose names clash with variables
/// free in the target, so that the inserted term never reuses a visible name.
fn hygienic(replacement: &Term, target_free: &[Variable]) -> Term {
    let clash: HashSet<&str> = target_free.iter().map(|v| v.name()).collect();
    if clash.is_empty() {
        return replacement.clone();
    }
    let mut avoid = HashSet::new();
    all_names_term(replacement, &mut avoid);
    avoid.extend(clash.iter().map(|s| (*s).to_owned()));
    rename_binders_term(replacement, &clash, &mut avoid)
}

fn rename_binders_term(t: &Term, clash: &HashSet<&str>, avoid: &mut HashSet<String>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Tuple(ts) => Term::Tuple(
            ts.iter()
                .map(|c| rename_binders_term(c, clash, avoid))
                .collect(),
        ),
        Term::Comprehension { bound, body } => {
            let mut body = rename_binders_formula(body, clash, avoid);
            let mut new_bound = Vec::with_capacity(bound.len());
            for v in bound {
                if clash.contains(v.name()) {
                    let fresh = v.renamed(fresh_name(v.name(), avoid));
                    avoid.insert(fresh.name().to_owned());
                    body = rename_free(&body, v, &fresh);
                    new_bound.push(fresh);
                } else {
                    new_bound.push(v.clone());
                }
            }
            Term::comprehension(new_bound, body)
        }
    }
}

fn rename_binders_formula(
    f: &Formula,
    clash: &HashSet<&str>,
    avoid: &mut HashSet<String>,
) -> Formula {
    match f {
        Formula::Member(l, r) => Formula::Member(
            rename_binders_term(l, clash, avoid),
            rename_binders_term(r, clash, avoid),
        ),
        Formula::Not(g) => Formula::not(rename_binders_formula(g, clash, avoid)),
        Formula::Binary(op, l, r) => Formula::connect(
            *op,
            rename_binders_formula(l, clash, avoid),
            rename_binders_formula(r, clash, avoid),
        ),
        Formula::Quant(q, v, g) => {
            let body = rename_binders_formula(g, clash, avoid);
            if clash.contains(v.name()) {
                let fresh = v.renamed(fresh_name(v.name(), avoid));
                avoid.insert(fresh.name().to_owned());
                let body = rename_free(&body, v, &fresh);
                Formula::quantify(*q, fresh, body)
            } else {
                Formula::quantify(*q, v.clone(), body)
            }
        }
    }
}

/// Renames free occurrences of `from` to `to`; `to` must be fresh.
fn rename_free(f: &Formula, from: &Variable, to: &Variable) -> Formula {
    let t = Term::Var(to.clone());
    let fv = vec![to.clone()];
    subst_formula(f, from, &t, &fv)
}

fn subst_formula(f: &Formula, v: &Variable, t: &Term, fv_t: &[Variable]) -> Formula {
    match f {
        Formula::Member(l, r) => {
            Formula::Member(subst_term(l, v, t, fv_t), subst_term(r, v, t, fv_t))
        }
        Formula::Not(g) => Formula::not(subst_formula(g, v, t, fv_t)),
        Formula::Binary(op, l, r) => Formula::connect(
            *op,
            subst_formula(l, v, t, fv_t),
            subst_formula(r, v, t, fv_t),
        ),
        Formula::Quant(q, w, g) => {
            if w == v || !g.is_free(v) {
                return f.clone();
            }
            if fv_t.contains(w) {
                let fresh = w.renamed(fresh_for(w, g, t, v));
                let g = rename_free(g, w, &fresh);
                Formula::quantify(*q, fresh, subst_formula(&g, v, t, fv_t))
            } else {
                Formula::quantify(*q, w.clone(), subst_formula(g, v, t, fv_t))
            }
        }
    }
}

fn subst_term(s: &Term, v: &Variable, t: &Term, fv_t: &[Variable]) -> Term {
    match s {
        Term::Var(w) => {
            if w == v {
                t.clone()
            } else {
                s.clone()
            }
        }
        Term::Tuple(ts) => Term::Tuple(ts.iter().map(|c| subst_term(c, v, t, fv_t)).collect()),
        Term::Comprehension { bound, body } => {
            if bound.contains(v) || !body.is_free(v) {
                return s.clone();
            }
            let mut body = (**body).clone();
            let mut new_bound = Vec::with_capacity(bound.len());
            for w in bound {
                if fv_t.contains(w) {
                    let fresh = w.renamed(fresh_for(w, &body, t, v));
                    body = rename_free(&body, w, &fresh);
                    new_bound.push(fresh);
                } else {
                    new_bound.push(w.clone());
                }
            }
            Term::comprehension(new_bound, subst_formula(&body, v, t, fv_t))
        }
    }
}

fn fresh_for(w: &Variable, body: &Formula, t: &Term, v: &Variable) -> String {
    let mut avoid = HashSet::new();
    all_names_formula(body, &mut avoid);
    all_names_term(t, &mut avoid);
    avoid.insert(v.name().to_owned());
    fresh_name(w.name(), &avoid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, parse_term};

    fn x(i: usize) -> Variable {
        Variable::elem(format!("x{i}"))
    }
    fn a(i: usize) -> Variable {
        Variable::set(format!("A{i}"))
    }

    #[test]
    fn free_vars_in_first_occurrence_order() {
        assert_eq!(Formula::member(x(0), a(0)).free_vars(), vec![x(0), a(0)]);
        assert_eq!(
            Formula::forall(x(0), Formula::member(x(0), a(0))).free_vars(),
            vec![a(0)]
        );
        let m0 = Term::comprehension(vec![x(0)], Formula::member(x(0), a(0)));
        assert_eq!(m0.free_vars(), vec![a(0)]);
        let p14 = parse_formula("((x0 ∈ A0) & (x1 ∈ A1))").unwrap();
        assert_eq!(p14.free_vars(), vec![x(0), a(0), x(1), a(1)]);
    }

    #[test]
    fn renaming_substitution() {
        let f = Formula::member(x(0), a(0));
        assert_eq!(
            f.substitute(&x(0), &x(1).into()).unwrap(),
            Formula::member(x(1), a(0))
        );
    }

    #[test]
    fn replacement_binders_are_renamed_apart() {
        let f = Formula::member(x(0), a(0));
        let m = parse_term("{x0 | (x0 ∈ A1)}").unwrap();
        let out = f.substitute(&a(0), &m).unwrap();
        assert_eq!(out.to_string(), "(x0 ∈ {x0' | (x0' ∈ A1)})");
    }

    #[test]
    fn substitution_under_unrelated_binder() {
        let f = Formula::forall(x(0), Formula::member(x(0), a(0)));
        assert_eq!(
            f.substitute(&a(0), &a(1).into()).unwrap(),
            Formula::forall(x(0), Formula::member(x(0), a(1)))
        );
    }

    #[test]
    fn capturing_binder_is_renamed() {
        // ∀x1 (x0 ∈ A0 ∧ x1 ∈ A0) with x0 := x1 must not capture.
        let f = parse_formula("∀(x1) [((x0 ∈ A0) & (x1 ∈ A0))]").unwrap();
        let out = f.substitute(&x(0), &x(1).into()).unwrap();
        assert_eq!(out.to_string(), "∀(x1') [((x1 ∈ A0) & (x1' ∈ A0))]");
    }

    #[test]
    fn bound_variable_is_not_substituted() {
        let f = parse_formula("∀(x0) [(x0 ∈ A0)]").unwrap();
        assert_eq!(f.substitute(&x(0), &x(1).into()).unwrap(), f);
    }

    #[test]
    fn sort_mismatch_is_reported() {
        let f = Formula::member(x(0), a(0));
        let err = f.substitute(&x(0), &a(0).into()).unwrap_err();
        assert_eq!(err.code(), "SortMismatch");
    }

    #[test]
    fn fresh_names_prime_until_unused() {
        let avoid: HashSet<String> = ["x0'".to_owned()].into_iter().collect();
        assert_eq!(fresh_name("x0", &avoid), "x0''");
    }
}
