use super::{Connective, Expr, Formula, Quantifier, Term};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Style {
    Ascii,
    #[default]
    Unicode,
}

struct Symbols {
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    member: &'static str,
    forall: &'static str,
    exists: &'static str,
    open_tuple: &'static str,
    close_tuple: &'static str,
}

const ASCII: Symbols = Symbols {
    not: "~",
    and: "&",
    or: "|",
    implies: "=>",
    member: "in",
    forall: "forall",
    exists: "exists",
    open_tuple: "<",
    close_tuple: ">",
};

// Conjunction keeps the ampersand of the original tables.
const UNICODE: Symbols = Symbols {
    not: "¬",
    and: "&",
    or: "∨",
    implies: "⇒",
    member: "∈",
    forall: "∀",
    exists: "∃",
    open_tuple: "⟨",
    close_tuple: "⟩",
};

impl Style {
    fn symbols(self) -> &'static Symbols {
        match self {
            Style::Ascii => &ASCII,
            Style::Unicode => &UNICODE,
        }
    }
}

fn formula(f: &Formula, s: &Symbols, out: &mut String) {
    match f {
        Formula::Member(l, r) => {
            out.push('(');
            term(l, s, out);
            out.push(' ');
            out.push_str(s.member);
            out.push(' ');
            term(r, s, out);
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str(s.not);
            formula(g, s, out);
        }
        Formula::Binary(op, l, r) => {
            out.push('(');
            formula(l, s, out);
            out.push(' ');
            out.push_str(match op {
                Connective::And => s.and,
                Connective::Or => s.or,
                Connective::Implies => s.implies,
            });
            out.push(' ');
            formula(r, s, out);
            out.push(')');
        }
        Formula::Quant(q, v, g) => {
            out.push_str(match q {
                Quantifier::Forall => s.forall,
                Quantifier::Exists => s.exists,
            });
            out.push('(');
            out.push_str(v.name());
            out.push_str(") [");
            formula(g, s, out);
            out.push(']');
        }
    }
}

fn term(t: &Term, s: &Symbols, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v.name()),
        Term::Tuple(ts) => {
            out.push_str(s.open_tuple);
            for (i, c) in ts.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                term(c, s, out);
            }
            out.push_str(s.close_tuple);
        }
        Term::Comprehension { bound, body } => {
            out.push('{');
            let names: Vec<&str> = bound.iter().map(|v| v.name()).collect();
            if names.len() == 1 {
                out.push_str(names[0]);
            } else {
                out.push_str(s.open_tuple);
                out.push_str(&names.join(", "));
                out.push_str(s.close_tuple);
            }
            out.push_str(" | ");
            formula(body, s, out);
            out.push('}');
        }
    }
}

impl Formula {
    pub fn render(&self, style: Style) -> String {
        let mut out = String::new();
        formula(self, style.symbols(), &mut out);
        out
    }
}

impl Term {
    pub fn render(&self, style: Style) -> String {
        let mut out = String::new();
        term(self, style.symbols(), &mut out);
        out
    }
}

impl Expr {
    pub fn render(&self, style: Style) -> String {
        match self {
            Expr::Formula(f) => f.render(style),
            Expr::Term(t) => t.render(style),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Variable;

    fn x(i: usize) -> Variable {
        Variable::elem(format!("x{i}"))
    }
    fn a(i: usize) -> Variable {
        Variable::set(format!("A{i}"))
    }

    #[test]
    fn universal_quantifier_layout() {
        let f = Formula::forall(x(0), Formula::member(x(0), a(0)));
        assert_eq!(f.render(Style::Unicode), "∀(x0) [(x0 ∈ A0)]");
        assert_eq!(f.render(Style::Ascii), "forall(x0) [(x0 in A0)]");
    }

    #[test]
    fn difference_comprehension() {
        let body = Formula::and(
            Formula::member(x(0), a(0)),
            Formula::not(Formula::member(x(0), a(1))),
        );
        let m1 = Term::comprehension(vec![x(0)], body);
        assert_eq!(
            m1.render(Style::Unicode),
            "{x0 | ((x0 ∈ A0) & ¬(x0 ∈ A1))}"
        );
        assert_eq!(m1.render(Style::Ascii), "{x0 | ((x0 in A0) & ~(x0 in A1))}");
    }

    #[test]
    fn tuples_and_products() {
        let pair = Term::tuple(vec![x(0).into(), x(1).into()]);
        assert_eq!(pair.render(Style::Unicode), "⟨x0, x1⟩");
        assert_eq!(pair.render(Style::Ascii), "<x0, x1>");
        let m6 = Term::comprehension(
            vec![x(0), x(1)],
            Formula::and(Formula::member(x(0), a(0)), Formula::member(x(1), a(1))),
        );
        assert_eq!(
            m6.render(Style::Unicode),
            "{⟨x0, x1⟩ | ((x0 ∈ A0) & (x1 ∈ A1))}"
        );
    }

    #[test]
    fn disjunction_and_implication() {
        let f = Formula::or(
            Formula::member(x(0), a(0)),
            Formula::implies(Formula::member(x(0), a(1)), Formula::member(x(1), a(1))),
        );
        assert_eq!(
            f.render(Style::Unicode),
            "((x0 ∈ A0) ∨ ((x0 ∈ A1) ⇒ (x1 ∈ A1)))"
        );
        assert_eq!(
            f.render(Style::Ascii),
            "((x0 in A0) | ((x0 in A1) => (x1 in A1)))"
        );
    }
}
