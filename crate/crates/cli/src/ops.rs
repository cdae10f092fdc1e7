//! Rule applications and queries shared by the command line and the service.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use setsig_core::formula::{parse_term, Connective, Expr, Quantifier, Variable};
use setsig_core::net::{derive_edges, NetGraph};
use setsig_core::recognition::{builtin_catalog, recognize_all, RecognitionError, RecognitionResult};
use setsig_core::rules::{Applied, ObjectId, Replacement, RuleError};
use setsig_core::semantics::EvalError;

use crate::session::Session;

#[derive(Debug, Error)]
pub enum OpError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{message}")]
    BadRequest { code: &'static str, message: String },
}

impl From<RecognitionError> for OpError {
    fn from(e: RecognitionError) -> Self {
        match e {
            RecognitionError::Rule(r) => OpError::Rule(r),
            RecognitionError::Eval(e) => OpError::Eval(e),
        }
    }
}

impl OpError {
    pub fn code(&self) -> &'static str {
        match self {
            OpError::Rule(e) => e.code(),
            OpError::Eval(e) => e.code(),
            OpError::BadRequest { code, .. } => code,
        }
    }

    pub fn is_not_found(&self) -> bool {
        matches!(self, OpError::Rule(RuleError::UnknownId(_)))
    }

    fn bad(code: &'static str, message: impl Into<String>) -> Self {
        OpError::BadRequest {
            code,
            message: message.into(),
        }
    }
}

pub fn variable(name: &str) -> Result<Variable, OpError> {
    Variable::from_name(name).ok_or_else(|| OpError::bad("BadVariable", format!("`{name}` is not a variable name")))
}

pub fn connective(op: &str) -> Result<Connective, OpError> {
    Connective::from_keyword(op).ok_or_else(|| OpError::bad("BadConnective", format!("unknown connective `{op}`")))
}

pub fn quantifier(q: &str) -> Result<Quantifier, OpError> {
    Quantifier::from_keyword(q).ok_or_else(|| OpError::bad("BadQuantifier", format!("unknown quantifier `{q}`")))
}

/// One rule application, as posted to the service or given to `apply`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleRequest {
    Negate {
        parent: ObjectId,
    },
    Connect {
        op: String,
        left: ObjectId,
        right: ObjectId,
    },
    Quantify {
        q: String,
        var: String,
        parent: ObjectId,
    },
    TruthSet {
        bound: Vec<String>,
        parent: ObjectId,
    },
    Substitute {
        target: ObjectId,
        var: String,
        #[serde(default)]
        term: Option<String>,
        #[serde(default)]
        object: Option<ObjectId>,
    },
}

impl RuleRequest {
    pub fn apply(&self, session: &mut Session) -> Result<Applied, OpError> {
        let store = &mut session.store;
        let applied = match self {
            RuleRequest::Negate { parent } => store.negate(*parent)?,
            RuleRequest::Connect { op, left, right } => store.connect(connective(op)?, *left, *right)?,
            RuleRequest::Quantify { q, var, parent } => {
                store.quantify(quantifier(q)?, &variable(var)?, *parent)?
            }
            RuleRequest::TruthSet { bound, parent } => {
                let vars = bound.iter().map(|b| variable(b)).collect::<Result<Vec<_>, _>>()?;
                store.truth_set(&vars, *parent)?
            }
            RuleRequest::Substitute {
                target,
                var,
                term,
                object,
            } => {
                let replacement = match (term, object) {
                    (Some(t), None) => Replacement::Term(
                        parse_term(t).map_err(|e| OpError::bad(e.code(), e.to_string()))?,
                    ),
                    (None, Some(id)) => Replacement::Object(*id),
                    _ => {
                        return Err(OpError::bad(
                            "BadReplacement",
                            "give exactly one of `term` and `object`",
                        ))
                    }
                };
                store.substitute(*target, &variable(var)?, &replacement)?
            }
        };
        Ok(applied)
    }
}

/// A table row: the columns of the interactive formula table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub id: ObjectId,
    pub name: String,
    pub notation: String,
    pub formula: String,
    pub classification: Option<String>,
    pub free: Vec<String>,
    pub description: Option<String>,
    pub symbol: Option<String>,
}

pub fn row(session: &mut Session, id: ObjectId) -> Result<Row, OpError> {
    session.store.get(id)?;
    let classification = session.label(id);
    let obj = session.store.get(id)?;
    Ok(Row {
        id,
        name: obj.name.clone(),
        notation: obj.notation(),
        formula: obj.payload.to_string(),
        classification,
        free: obj.parameters().iter().map(|v| v.name().to_owned()).collect(),
        description: obj.description.clone(),
        symbol: obj.symbol.clone(),
    })
}

pub fn rows(session: &mut Session) -> Vec<Row> {
    (1..=session.store.len())
        .map(|id| row(session, id).expect("ids are dense"))
        .collect()
}

/// Row view without classification, for callers holding only a shared borrow.
pub fn cached_row(session: &Session, id: ObjectId) -> Result<Row, OpError> {
    let obj = session.store.get(id)?;
    let classification = match obj.payload {
        Expr::Formula(_) => session.cached_label(id).map(str::to_owned),
        Expr::Term(_) => None,
    };
    Ok(Row {
        id,
        name: obj.name.clone(),
        notation: obj.notation(),
        formula: obj.payload.to_string(),
        classification,
        free: obj.parameters().iter().map(|v| v.name().to_owned()).collect(),
        description: obj.description.clone(),
        symbol: obj.symbol.clone(),
    })
}

pub fn fully_cached(session: &Session) -> bool {
    session
        .store
        .objects()
        .iter()
        .all(|o| matches!(o.payload, Expr::Term(_)) || session.cached_label(o.id).is_some())
}

pub fn recognitions(session: &Session) -> Result<Vec<RecognitionResult>, OpError> {
    Ok(recognize_all(
        &session.store,
        &builtin_catalog(),
        session.config.model_check_size,
    )?)
}

pub fn net(session: &Session) -> Result<NetGraph, OpError> {
    Ok(derive_edges(&session.store, &recognitions(session)?))
}
