//! The session file: one JSON document holding the store, glossary,
//! enumeration settings and cached classification labels.
//!
//! Formulae are stored as ASCII grammar strings and re-parsed (and so
//! re-sort-checked) on load. Saving an unmodified session reproduces the
//! file byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use setsig_core::enumerate::EnumConfig;
use setsig_core::formula::{parse_expr, parse_term, Connective, Expr, Quantifier, Style, Variable};
use setsig_core::net::{Glossary, GlossaryEntry};
use setsig_core::rules::{ObjectId, ObjectStore, Rule, RuleApplication, StoredObject};
use setsig_core::semantics::{classify, Classification};

use crate::ops::OpError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("cannot access session file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed session: {0}")]
    Malformed(String),
    #[error("session format version {found} is not supported (expected {FORMAT_VERSION})")]
    Version { found: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedLabel {
    pub object_id: ObjectId,
    pub k: u32,
    pub label: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectRecord {
    id: ObjectId,
    name: String,
    formula: String,
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    term: Option<String>,
    parents: Vec<ObjectId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symbol: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionFile {
    format_version: u32,
    config: EnumConfig,
    objects: Vec<ObjectRecord>,
    glossary: Vec<GlossaryEntry>,
    classifications: Vec<CachedLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Session {
    pub store: ObjectStore,
    pub glossary: Glossary,
    pub config: EnumConfig,
    classifications: BTreeMap<ObjectId, CachedLabel>,
}

fn variable(name: &str) -> Result<Variable, SessionError> {
    Variable::from_name(name).ok_or_else(|| SessionError::Malformed(format!("bad variable `{name}`")))
}

fn record(obj: &StoredObject) -> ObjectRecord {
    let (mut var, mut bound, mut term) = (None, None, None);
    match &obj.provenance.rule {
        Rule::Quantify(_, v) => var = Some(v.name().to_owned()),
        Rule::TruthSet(vs) => bound = Some(vs.iter().map(|v| v.name().to_owned()).collect()),
        Rule::Substitute(v, t) => {
            var = Some(v.name().to_owned());
            term = Some(t.render(Style::Ascii));
        }
        Rule::Seed | Rule::Negate | Rule::Connect(_) => {}
    }
    ObjectRecord {
        id: obj.id,
        name: obj.name.clone(),
        formula: obj.payload.render(Style::Ascii),
        rule: obj.provenance.rule.tag(),
        var,
        bound,
        term,
        parents: obj.provenance.parents.clone(),
        description: obj.description.clone(),
        symbol: obj.symbol.clone(),
    }
}

fn object(r: ObjectRecord) -> Result<StoredObject, SessionError> {
    let malformed = |m: String| SessionError::Malformed(format!("object {}: {m}", r.id));
    let payload = parse_expr(&r.formula).map_err(|e| malformed(e.to_string()))?;
    let need = |field: &Option<String>, what: &str| {
        field
            .as_deref()
            .ok_or_else(|| malformed(format!("rule {} needs `{what}`", r.rule)))
            .and_then(variable)
    };
    let rule = match r.rule.as_str() {
        "seed" => Rule::Seed,
        "negate" => Rule::Negate,
        "truth-set" => {
            let bound = r
                .bound
                .as_ref()
                .ok_or_else(|| malformed("rule truth-set needs `bound`".into()))?;
            Rule::TruthSet(bound.iter().map(|b| variable(b)).collect::<Result<_, _>>()?)
        }
        "substitute" => {
            let text = r
                .term
                .as_deref()
                .ok_or_else(|| malformed("rule substitute needs `term`".into()))?;
            let t = parse_term(text).map_err(|e| malformed(e.to_string()))?;
            Rule::Substitute(need(&r.var, "var")?, t)
        }
        tag => match tag.split_once('-') {
            Some(("connect", op)) => Rule::Connect(
                Connective::from_keyword(op).ok_or_else(|| malformed(format!("unknown rule {tag}")))?,
            ),
            Some(("quantify", q)) => Rule::Quantify(
                Quantifier::from_keyword(q).ok_or_else(|| malformed(format!("unknown rule {tag}")))?,
                need(&r.var, "var")?,
            ),
            _ => return Err(malformed(format!("unknown rule {tag}"))),
        },
    };
    Ok(StoredObject {
        id: r.id,
        name: r.name,
        payload,
        provenance: RuleApplication {
            rule,
            parents: r.parents,
        },
        description: r.description,
        symbol: r.symbol,
    })
}

impl Session {
    pub fn new(config: EnumConfig) -> Self {
        Session::with_store(ObjectStore::seed(config.elem_vars, config.set_vars), config)
    }

    pub fn with_store(store: ObjectStore, config: EnumConfig) -> Self {
        Session {
            store,
            glossary: Glossary::new(),
            config,
            classifications: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let file = SessionFile {
            format_version: FORMAT_VERSION,
            config: self.config.clone(),
            objects: self.store.objects().iter().map(record).collect(),
            glossary: self.glossary.entries().to_vec(),
            classifications: self.classifications.values().cloned().collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("session serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, SessionError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| SessionError::Malformed(e.to_string()))?;
        if let Some(found) = value.get("format_version").and_then(|v| v.as_u64()) {
            if found != u64::from(FORMAT_VERSION) {
                return Err(SessionError::Version {
                    found: found as u32,
                });
            }
        }
        let file: SessionFile =
            serde_json::from_value(value).map_err(|e| SessionError::Malformed(e.to_string()))?;
        file.config
            .validate()
            .map_err(|e| SessionError::Malformed(e.to_string()))?;
        let objects = file
            .objects
            .into_iter()
            .map(object)
            .collect::<Result<Vec<_>, _>>()?;
        let store =
            ObjectStore::from_objects(objects).map_err(|e| SessionError::Malformed(e.to_string()))?;
        let mut classifications = BTreeMap::new();
        for c in file.classifications {
            store
                .get(c.object_id)
                .map_err(|e| SessionError::Malformed(e.to_string()))?;
            classifications.insert(c.object_id, c);
        }
        for e in &file.glossary {
            store
                .get(e.object_id)
                .map_err(|e| SessionError::Malformed(e.to_string()))?;
        }
        Ok(Session {
            store,
            glossary: Glossary::from_entries(file.glossary),
            config: file.config,
            classifications,
        })
    }

    pub fn load(path: &Path) -> Result<Self, SessionError> {
        Session::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), SessionError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn cached_label(&self, id: ObjectId) -> Option<&str> {
        self.classifications
            .get(&id)
            .filter(|c| c.k == self.config.model_check_size)
            .map(|c| c.label.as_str())
    }

    /// Classifies a stored formula at the session's sweep size and caches
    /// the label. Truth sets have no classification.
    pub fn classify_object(&mut self, id: ObjectId) -> Result<Option<Classification>, OpError> {
        let k = self.config.model_check_size;
        let Expr::Formula(f) = &self.store.get(id)?.payload else {
            return Ok(None);
        };
        let c = classify(f, k)?;
        self.classifications.insert(
            id,
            CachedLabel {
                object_id: id,
                k,
                label: c.label(),
            },
        );
        Ok(Some(c))
    }

    /// Cached label, computing and caching it when missing.
    pub fn label(&mut self, id: ObjectId) -> Option<String> {
        if let Some(l) = self.cached_label(id) {
            return Some(l.to_owned());
        }
        self.classify_object(id).ok().flatten().map(|c| c.label())
    }

    pub fn clear_cache(&mut self) {
        self.classifications.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use setsig_core::enumerate::paper_construction;
    use setsig_core::rules::Replacement;

    #[test]
    fn fresh_session_round_trips() {
        let s = Session::new(EnumConfig::default());
        let json = s.to_json();
        assert!(json.starts_with("{\n  \"format_version\": 1,\n"));
        let back = Session::from_json(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn every_rule_survives_a_round_trip() {
        let mut s = Session::with_store(paper_construction(), EnumConfig::default());
        s.store
            .substitute(10, &Variable::set("A0"), &Replacement::Term(Variable::set("A1").into()))
            .unwrap();
        s.store
            .substitute(1, &Variable::set("A0"), &Replacement::Object(20))
            .unwrap();
        s.store.set_description(19, Some("difference".into())).unwrap();
        s.glossary.set(6, "ru", "A0-универсум");
        s.label(1);
        s.label(10);
        let json = s.to_json();
        let back = Session::from_json(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), json);
        assert_eq!(back.cached_label(1), Some("Contingent"));
        assert_eq!(back.cached_label(10), None);
    }

    #[test]
    fn malformed_sessions_are_rejected() {
        let good = Session::new(EnumConfig::default()).to_json();
        let cases = [
            "not json".to_owned(),
            good.replace("\"format_version\": 1", "\"format_version\": 7"),
            good.replace("(x0 in A0)", "(x0 in"),
            good.replace("\"rule\": \"seed\"", "\"rule\": \"fold\""),
            good.replace("\"name\": \"P0\"", "\"name\": \"M0\""),
        ];
        for (i, text) in cases.iter().enumerate() {
            let err = Session::from_json(text).unwrap_err();
            if i == 1 {
                assert!(matches!(err, SessionError::Version { found: 7 }));
            } else {
                assert!(matches!(err, SessionError::Malformed(_)), "case {i}: {err}");
            }
        }
    }
}
