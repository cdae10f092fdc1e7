use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Connective, Expr, Formula, Quantifier, Sort, Term, Variable};

/// Stable byte-string key used for deduplication and lookup.
///
/// Operands of `&` and `∨` are ordered by their own keys; nothing else is
/// normalized unless bound names are abstracted with `modulo_alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

struct Canon {
    modulo_alpha: bool,
    // Innermost binder last.
    binders: Vec<Variable>,
}

impl Canon {
    fn var(&self, v: &Variable) -> String {
        if self.modulo_alpha {
            if let Some(pos) = self.binders.iter().rposition(|b| b == v) {
                return format!("#{}", self.binders.len() - 1 - pos);
            }
        }
        v.name().to_owned()
    }

    fn binder(&self, v: &Variable) -> String {
        if self.modulo_alpha {
            sort_tag(v.sort())
        } else {
            format!("{}:{}", v.name(), sort_tag(v.sort()))
        }
    }

    fn formula(&mut self, f: &Formula) -> String {
        match f {
            Formula::Member(l, r) => format!("(in {} {})", self.term(l), self.term(r)),
            Formula::Not(g) => format!("(not {})", self.formula(g)),
            Formula::Binary(op, l, r) => {
                let mut lk = self.formula(l);
                let mut rk = self.formula(r);
                if op.is_commutative() && rk < lk {
                    std::mem::swap(&mut lk, &mut rk);
                }
                let tag = match op {
                    Connective::And => "and",
                    Connective::Or => "or",
                    Connective::Implies => "imp",
                };
                format!("({tag} {lk} {rk})")
            }
            Formula::Quant(q, v, g) => {
                let tag = match q {
                    Quantifier::Forall => "all",
                    Quantifier::Exists => "ex",
                };
                let head = self.binder(v);
                self.binders.push(v.clone());
                let body = self.formula(g);
                self.binders.pop();
                format!("({tag} {head} {body})")
            }
        }
    }

    fn term(&mut self, t: &Term) -> String {
        match t {
            Term::Var(v) => self.var(v),
            Term::Tuple(ts) => {
                let parts: Vec<String> = ts.iter().map(|c| self.term(c)).collect();
                format!("<{}>", parts.join(","))
            }
            Term::Comprehension { bound, body } => {
                let heads: Vec<String> = bound.iter().map(|v| self.binder(v)).collect();
                let depth = self.binders.len();
                self.binders.extend(bound.iter().cloned());
                let body = self.formula(body);
                self.binders.truncate(depth);
                format!("{{{}|{}}}", heads.join(","), body)
            }
        }
    }
}

fn sort_tag(s: &Sort) -> String {
    match s {
        Sort::Elem => "e".to_owned(),
        Sort::ElemTuple(n) => format!("t{n}"),
        Sort::SetOf(inner) => format!("s{}", sort_tag(inner)),
    }
}

impl Formula {
    pub fn canonical_key(&self, modulo_alpha: bool) -> CanonicalKey {
        CanonicalKey(
            Canon {
                modulo_alpha,
                binders: Vec::new(),
            }
            .formula(self),
        )
    }
}

impl Term {
    pub fn canonical_key(&self, modulo_alpha: bool) -> CanonicalKey {
        CanonicalKey(
            Canon {
                modulo_alpha,
                binders: Vec::new(),
            }
            .term(self),
        )
    }
}

impl Expr {
    pub fn canonical_key(&self, modulo_alpha: bool) -> CanonicalKey {
        match self {
            Expr::Formula(f) => f.canonical_key(modulo_alpha),
            Expr::Term(t) => t.canonical_key(modulo_alpha),
        }
    }
}
