//! The production system: an append-only object store seeded with atomic
//! membership formulae and grown by the six construction rules.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{
    CanonicalKey, Connective, Expr, Formula, Quantifier, Sort, SortError, Term, Variable,
};

pub type ObjectId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("object {0} does not exist")]
    UnknownId(ObjectId),
    #[error("object {0} is not a formula")]
    NotAFormula(ObjectId),
    #[error("variable {var} is not free in object {id}")]
    NotFree { var: String, id: ObjectId },
    #[error("mixed sorts: {0}")]
    MixedSorts(String),
    #[error("a tuple needs at least two components")]
    ArityTooSmall,
    #[error("variable {0} is listed twice")]
    DuplicateVar(String),
    #[error("object {0} is not a truth set")]
    NotATruthSet(ObjectId),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("invalid store: {0}")]
    InvalidStore(String),
}

impl RuleError {
    pub fn code(&self) -> &'static str {
        match self {
            RuleError::UnknownId(_) => "UnknownId",
            RuleError::NotAFormula(_) => "NotAFormula",
            RuleError::NotFree { .. } => "NotFree",
            RuleError::MixedSorts(_) => "MixedSorts",
            RuleError::ArityTooSmall => "ArityTooSmall",
            RuleError::DuplicateVar(_) => "DuplicateVar",
            RuleError::NotATruthSet(_) => "NotATruthSet",
            RuleError::Sort(e) => e.code(),
            RuleError::InvalidStore(_) => "InvalidStore",
        }
    }
}

/// Name families: predicates, truth sets of elements or tuples, and families of sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    P,
    M,
    R,
}

impl Family {
    pub fn of(payload: &Expr) -> Result<Family, SortError> {
        match payload {
            Expr::Formula(_) => Ok(Family::P),
            Expr::Term(t) => match t.sort()? {
                Sort::SetOf(inner) if matches!(*inner, Sort::SetOf(_)) => Ok(Family::R),
                _ => Ok(Family::M),
            },
        }
    }

    pub fn letter(self) -> char {
        match self {
            Family::P => 'P',
            Family::M => 'M',
            Family::R => 'R',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Replacement {
    Term(Term),
    Object(ObjectId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Seed,
    Negate,
    Connect(Connective),
    Quantify(Quantifier, Variable),
    TruthSet(Vec<Variable>),
    Substitute(Variable, Term),
}

impl Rule {
    /// Short tag used in net edge labels and session files.
    pub fn tag(&self) -> String {
        match self {
            Rule::Seed => "seed".to_owned(),
            Rule::Negate => "negate".to_owned(),
            Rule::Connect(op) => format!("connect-{}", op.keyword()),
            Rule::Quantify(q, _) => format!("quantify-{}", q.keyword()),
            Rule::TruthSet(_) => "truth-set".to_owned(),
            Rule::Substitute(..) => "substitute".to_owned(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: Rule,
    pub parents: Vec<ObjectId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoredObject {
    pub id: ObjectId,
    pub name: String,
    pub payload: Expr,
    pub provenance: RuleApplication,
    pub description: Option<String>,
    pub symbol: Option<String>,
}

impl StoredObject {
    pub fn family(&self) -> Family {
        match &self.payload {
            Expr::Formula(_) => Family::P,
            Expr::Term(_) => {
                if self.name.starts_with('R') {
                    Family::R
                } else {
                    Family::M
                }
            }
        }
    }

    pub fn formula(&self) -> Option<&Formula> {
        self.payload.as_formula()
    }

    pub fn is_seed(&self) -> bool {
        self.provenance.rule == Rule::Seed
    }

    /// Parameters: the free variables of the payload.
    pub fn parameters(&self) -> Vec<Variable> {
        self.payload.free_vars()
    }

    /// Notation in the style `P12(x0, A0, A1)` or `M0(A0)`.
    pub fn notation(&self) -> String {
        let params: Vec<String> = self.parameters().iter().map(|v| v.to_string()).collect();
        if params.is_empty() {
            self.name.clone()
        } else {
            format!("{}({})", self.name, params.join(", "))
        }
    }
}

impl fmt::Display for StoredObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.payload)
    }
}

/// Outcome of a rule application: the resulting object and whether it was
/// already in the store.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Applied {
    pub id: ObjectId,
    pub already_present: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObjectStore {
    objects: Vec<StoredObject>,
    index: HashMap<CanonicalKey, ObjectId>,
    next_index: HashMap<Family, usize>,
}

impl ObjectStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Atomic formulae `xi ∈ Aj`, element index outer and set index inner.
    /// All seeds share the name `P0`, the atomic predicate.
    pub fn seed(elem_vars: usize, set_vars: usize) -> Self {
        let mut store = ObjectStore::new();
        for i in 0..elem_vars {
            for j in 0..set_vars {
                let f = Formula::member(
                    Variable::elem(format!("x{i}")),
                    Variable::set(format!("A{j}")),
                );
                store.push(
                    "P0".to_owned(),
                    Expr::Formula(f),
                    RuleApplication {
                        rule: Rule::Seed,
                        parents: vec![],
                    },
                );
            }
        }
        if elem_vars * set_vars > 0 {
            store.next_index.insert(Family::P, 1);
        }
        store
    }

    /// Rebuilds a store from a list of objects, e.g. after loading a session.
    pub fn from_objects(objects: Vec<StoredObject>) -> Result<Self, RuleError> {
        let mut store = ObjectStore::new();
        for obj in objects {
            let expected = store.objects.len() + 1;
            if obj.id != expected {
                return Err(RuleError::InvalidStore(format!(
                    "ids must be dense and start at 1: expected {expected}, found {}",
                    obj.id
                )));
            }
            if let Some(p) = obj.provenance.parents.iter().find(|&&p| p == 0 || p >= obj.id) {
                return Err(RuleError::InvalidStore(format!(
                    "object {} names parent {p}, which is not an earlier object",
                    obj.id
                )));
            }
            obj.payload.sort_check()?;
            let family = Family::of(&obj.payload)?;
            let index = parse_name(&obj.name, family).ok_or_else(|| {
                RuleError::InvalidStore(format!(
                    "object {} is named {} but belongs to family {}",
                    obj.id,
                    obj.name,
                    family.letter()
                ))
            })?;
            let key = obj.payload.canonical_key(false);
            if let Some(prev) = store.index.get(&key) {
                return Err(RuleError::InvalidStore(format!(
                    "objects {prev} and {} have the same canonical form",
                    obj.id
                )));
            }
            let next = store.next_index.entry(family).or_insert(0);
            *next = (*next).max(index + 1);
            store.index.insert(key, obj.id);
            store.objects.push(obj);
        }
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[StoredObject] {
        &self.objects
    }

    pub fn into_objects(self) -> Vec<StoredObject> {
        self.objects
    }

    pub fn get(&self, id: ObjectId) -> Result<&StoredObject, RuleError> {
        id.checked_sub(1)
            .and_then(|i| self.objects.get(i))
            .ok_or(RuleError::UnknownId(id))
    }

    pub fn get_mut(&mut self, id: ObjectId) -> Result<&mut StoredObject, RuleError> {
        id.checked_sub(1)
            .and_then(|i| self.objects.get_mut(i))
            .ok_or(RuleError::UnknownId(id))
    }

    pub fn lookup(&self, payload: &Expr) -> Option<ObjectId> {
        self.index.get(&payload.canonical_key(false)).copied()
    }

    pub fn lookup_key(&self, key: &CanonicalKey) -> Option<ObjectId> {
        self.index.get(key).copied()
    }

    fn formula_of(&self, id: ObjectId) -> Result<&Formula, RuleError> {
        self.get(id)?
            .formula()
            .ok_or(RuleError::NotAFormula(id))
    }

    fn push(&mut self, name: String, payload: Expr, provenance: RuleApplication) -> ObjectId {
        let id = self.objects.len() + 1;
        self.index.insert(payload.canonical_key(false), id);
        self.objects.push(StoredObject {
            id,
            name,
            payload,
            provenance,
            description: None,
            symbol: None,
        });
        id
    }

    /// Stores `payload` unless an object with the same key exists.
    fn insert(&mut self, payload: Expr, provenance: RuleApplication) -> Result<Applied, RuleError> {
        if let Some(id) = self.lookup(&payload) {
            return Ok(Applied {
                id,
                already_present: true,
            });
        }
        payload.sort_check()?;
        let family = Family::of(&payload)?;
        let counter = self.next_index.entry(family).or_insert(0);
        let name = format!("{}{}", family.letter(), counter);
        *counter += 1;
        let id = self.push(name, payload, provenance);
        Ok(Applied {
            id,
            already_present: false,
        })
    }

    pub fn negate(&mut self, parent: ObjectId) -> Result<Applied, RuleError> {
        let f = Formula::not(self.formula_of(parent)?.clone());
        self.insert(
            Expr::Formula(f),
            RuleApplication {
                rule: Rule::Negate,
                parents: vec![parent],
            },
        )
    }

    pub fn connect(
        &mut self,
        op: Connective,
        left: ObjectId,
        right: ObjectId,
    ) -> Result<Applied, RuleError> {
        let l = self.formula_of(left)?.clone();
        let r = self.formula_of(right)?.clone();
        self.insert(
            Expr::Formula(Formula::connect(op, l, r)),
            RuleApplication {
                rule: Rule::Connect(op),
                parents: vec![left, right],
            },
        )
    }

    pub fn quantify(
        &mut self,
        q: Quantifier,
        var: &Variable,
        parent: ObjectId,
    ) -> Result<Applied, RuleError> {
        let f = self.formula_of(parent)?;
        if !f.is_free(var) {
            return Err(RuleError::NotFree {
                var: var.to_string(),
                id: parent,
            });
        }
        let f = Formula::quantify(q, var.clone(), f.clone());
        self.insert(
            Expr::Formula(f),
            RuleApplication {
                rule: Rule::Quantify(q, var.clone()),
                parents: vec![parent],
            },
        )
    }

    /// Forms `{bound | parent}`: an M object when every bound variable is an
    /// element, an R object when a single set variable is bound.
    pub fn truth_set(&mut self, bound: &[Variable], parent: ObjectId) -> Result<Applied, RuleError> {
        let f = self.formula_of(parent)?;
        if bound.is_empty() {
            return Err(RuleError::ArityTooSmall);
        }
        let free = f.free_vars();
        for (i, v) in bound.iter().enumerate() {
            if bound[..i].contains(v) {
                return Err(RuleError::DuplicateVar(v.to_string()));
            }
            if !free.contains(v) {
                return Err(RuleError::NotFree {
                    var: v.to_string(),
                    id: parent,
                });
            }
        }
        let all_elem = bound.iter().all(|v| v.sort().is_elem());
        let single_set = bound.len() == 1 && matches!(bound[0].sort(), Sort::SetOf(_));
        if !all_elem && !single_set {
            let names: Vec<String> = bound.iter().map(|v| v.to_string()).collect();
            return Err(RuleError::MixedSorts(format!(
                "cannot bind [{}] together; bind element variables or a single set variable",
                names.join(", ")
            )));
        }
        let t = Term::comprehension(bound.to_vec(), f.clone());
        self.insert(
            Expr::Term(t),
            RuleApplication {
                rule: Rule::TruthSet(bound.to_vec()),
                parents: vec![parent],
            },
        )
    }

    /// Builds the tuple `⟨v1, …, vn⟩`; tuples are terms, not stored objects.
    pub fn tuple(&self, vars: &[Variable]) -> Result<Term, RuleError> {
        if vars.len() < 2 {
            return Err(RuleError::ArityTooSmall);
        }
        if let Some(v) = vars.iter().find(|v| !v.sort().is_elem()) {
            return Err(RuleError::MixedSorts(format!(
                "{v} has sort {}; tuples hold elements only",
                v.sort()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(RuleError::DuplicateVar(v.to_string()));
            }
        }
        Ok(Term::tuple(vars.iter().cloned().map(Term::Var).collect()))
    }

    /// Substitutes `replacement` for `var` in the target. When the target is a
    /// comprehension the substituted body is stored as well, so every truth set
    /// keeps a stored defining predicate.
    pub fn substitute(
        &mut self,
        target: ObjectId,
        var: &Variable,
        replacement: &Replacement,
    ) -> Result<Applied, RuleError> {
        let (term, repl_parent) = match replacement {
            Replacement::Term(t) => (t.clone(), None),
            Replacement::Object(id) => match &self.get(*id)?.payload {
                Expr::Term(t @ Term::Comprehension { .. }) => (t.clone(), Some(*id)),
                _ => return Err(RuleError::NotATruthSet(*id)),
            },
        };
        let target_obj = self.get(target)?;
        let result = target_obj.payload.substitute(var, &term)?;
        let mut parents = vec![target];
        parents.extend(repl_parent);
        let provenance = RuleApplication {
            rule: Rule::Substitute(var.clone(), term),
            parents,
        };
        if let Expr::Term(Term::Comprehension { body, .. }) = &result {
            let body = Expr::Formula((**body).clone());
            if self.lookup(&body).is_none() {
                let mut body_parents = provenance.parents.clone();
                if let Some(def) = self.defining_predicate(target)? {
                    body_parents[0] = def;
                }
                self.insert(
                    body,
                    RuleApplication {
                        rule: provenance.rule.clone(),
                        parents: body_parents,
                    },
                )?;
            }
        }
        self.insert(result, provenance)
    }

    /// The stored predicate a truth set was formed from: the truth-set parent
    /// when there is one, otherwise the stored object equal to its body.
    pub fn defining_predicate(&self, id: ObjectId) -> Result<Option<ObjectId>, RuleError> {
        let obj = self.get(id)?;
        let Expr::Term(Term::Comprehension { body, .. }) = &obj.payload else {
            return Ok(None);
        };
        if let Rule::TruthSet(_) = obj.provenance.rule {
            return Ok(obj.provenance.parents.first().copied());
        }
        Ok(self.lookup(&Expr::Formula((**body).clone())))
    }

    /// The two sides of `⟨x1…xn⟩ ∈ M ⇔ P(x1…xn, …)` for a truth-set object.
    /// The right side is the defining predicate when stored, else the body.
    pub fn expand_biconditional(&self, id: ObjectId) -> Result<(Formula, Formula), RuleError> {
        let obj = self.get(id)?;
        let Expr::Term(t @ Term::Comprehension { bound, body }) = &obj.payload else {
            return Err(RuleError::NotATruthSet(id));
        };
        let member = match bound.as_slice() {
            [single] => Term::Var(single.clone()),
            many => Term::tuple(many.iter().cloned().map(Term::Var).collect()),
        };
        let lhs = Formula::Member(member, t.clone());
        let rhs = match self.defining_predicate(id)? {
            Some(def) => self.formula_of(def)?.clone(),
            None => (**body).clone(),
        };
        Ok((lhs, rhs))
    }

    /// Overwrites recognized symbols; `None` clears.
    pub fn set_symbol(&mut self, id: ObjectId, symbol: Option<String>) -> Result<(), RuleError> {
        self.get_mut(id)?.symbol = symbol;
        Ok(())
    }

    pub fn set_description(
        &mut self,
        id: ObjectId,
        description: Option<String>,
    ) -> Result<(), RuleError> {
        self.get_mut(id)?.description = description;
        Ok(())
    }
}

fn parse_name(name: &str, family: Family) -> Option<usize> {
    let rest = name.strip_prefix(family.letter())?;
    rest.parse().ok()
}
