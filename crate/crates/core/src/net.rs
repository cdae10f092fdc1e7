//! The semantic net over stored objects, its glossary, and natural-language readings.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Connective, Expr, Formula, Quantifier, Term};
use crate::recognition::RecognitionResult;
use crate::rules::{Family, ObjectId, ObjectStore, RuleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogicalKind {
    And,
    Or,
    Not,
    Implies,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetRelation {
    TruthSetOf,
    MemberOf,
    ExtensionallyEqual,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum EdgeKind {
    /// Parent to child; carries the rule tag.
    Derivation(String),
    /// Formula to a stored immediate subformula or subterm.
    Syntactic,
    Logical(LogicalKind),
    Quantificational(Quantifier),
    SetTheoretic(SetRelation),
}

impl EdgeKind {
    pub fn class(&self) -> &'static str {
        match self {
            EdgeKind::Derivation(_) => "derivation",
            EdgeKind::Syntactic => "syntactic",
            EdgeKind::Logical(_) => "logical",
            EdgeKind::Quantificational(_) => "quantificational",
            EdgeKind::SetTheoretic(_) => "set-theoretic",
        }
    }

    fn color(&self) -> &'static str {
        match self {
            EdgeKind::Derivation(_) => "black",
            EdgeKind::Syntactic => "gray50",
            EdgeKind::Logical(_) => "blue",
            EdgeKind::Quantificational(_) => "darkgreen",
            EdgeKind::SetTheoretic(SetRelation::TruthSetOf) => "red",
            EdgeKind::SetTheoretic(SetRelation::MemberOf) => "orange",
            EdgeKind::SetTheoretic(SetRelation::ExtensionallyEqual) => "purple",
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeKind::Derivation(tag) => write!(f, "derivation:{tag}"),
            EdgeKind::Syntactic => f.write_str("syntactic"),
            EdgeKind::Logical(k) => write!(
                f,
                "logical:{}",
                match k {
                    LogicalKind::And => "and",
                    LogicalKind::Or => "or",
                    LogicalKind::Not => "not",
                    LogicalKind::Implies => "implies",
                }
            ),
            EdgeKind::Quantificational(q) => write!(f, "quantificational:{}", q.keyword()),
            EdgeKind::SetTheoretic(r) => f.write_str(match r {
                SetRelation::TruthSetOf => "truth-set-of",
                SetRelation::MemberOf => "member-of",
                SetRelation::ExtensionallyEqual => "extensionally-equal",
            }),
        }
    }
}

impl FromStr for EdgeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s.split_once(':') {
            Some(("derivation", tag)) if !tag.is_empty() => EdgeKind::Derivation(tag.to_owned()),
            Some(("logical", k)) => EdgeKind::Logical(match k {
                "and" => LogicalKind::And,
                "or" => LogicalKind::Or,
                "not" => LogicalKind::Not,
                "implies" => LogicalKind::Implies,
                _ => return Err(format!("unknown edge kind `{s}`")),
            }),
            Some(("quantificational", q)) => EdgeKind::Quantificational(
                Quantifier::from_keyword(q).ok_or_else(|| format!("unknown edge kind `{s}`"))?,
            ),
            None => match s {
                "syntactic" => EdgeKind::Syntactic,
                "truth-set-of" => EdgeKind::SetTheoretic(SetRelation::TruthSetOf),
                "member-of" => EdgeKind::SetTheoretic(SetRelation::MemberOf),
                "extensionally-equal" => EdgeKind::SetTheoretic(SetRelation::ExtensionallyEqual),
                _ => return Err(format!("unknown edge kind `{s}`")),
            },
            _ => return Err(format!("unknown edge kind `{s}`")),
        };
        Ok(kind)
    }
}

impl From<EdgeKind> for String {
    fn from(k: EdgeKind) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for EdgeKind {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub kind: EdgeKind,
    pub src: ObjectId,
    pub dst: ObjectId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: ObjectId,
    pub name: String,
    pub formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl NetGraph {
    pub fn edges_of<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.kind.class() == class)
    }

    pub fn in_degree(&self, id: ObjectId, class: &str) -> usize {
        self.edges_of(class).filter(|e| e.dst == id).count()
    }

    /// Structural invariants against the store the net was derived from.
    pub fn violations(&self, store: &ObjectStore) -> Vec<String> {
        let mut out = Vec::new();
        for e in self.edges_of("derivation") {
            if e.src >= e.dst {
                out.push(format!("derivation edge {} -> {} runs backwards", e.src, e.dst));
            }
        }
        for obj in store.objects() {
            if !obj.is_seed() && self.in_degree(obj.id, "derivation") == 0 {
                out.push(format!("{} has no incoming derivation edge", obj.id));
            }
            let truth_sets = self
                .edges
                .iter()
                .filter(|e| {
                    e.kind == EdgeKind::SetTheoretic(SetRelation::TruthSetOf) && e.src == obj.id
                })
                .count();
            let expected = usize::from(obj.family() != Family::P);
            if truth_sets != expected {
                out.push(format!(
                    "{} has {truth_sets} truth-set-of edges, expected {expected}",
                    obj.id
                ));
            }
        }
        for e in &self.edges {
            let expected = match &e.kind {
                EdgeKind::Logical(_) | EdgeKind::Quantificational(_) => top_kind(store, e.src),
                _ => continue,
            };
            if expected.as_ref() != Some(&e.kind) {
                out.push(format!("{} edge from {} disagrees with its payload", e.kind, e.src));
            }
        }
        out
    }
}

fn top_kind(store: &ObjectStore, id: ObjectId) -> Option<EdgeKind> {
    match store.get(id).ok()?.formula()? {
        Formula::Member(..) => None,
        Formula::Not(_) => Some(EdgeKind::Logical(LogicalKind::Not)),
        Formula::Binary(op, ..) => Some(EdgeKind::Logical(match op {
            Connective::And => LogicalKind::And,
            Connective::Or => LogicalKind::Or,
            Connective::Implies => LogicalKind::Implies,
        })),
        Formula::Quant(q, ..) => Some(EdgeKind::Quantificational(*q)),
    }
}

/// Immediate subformulae and subterms of a payload that are worth a net edge.
fn immediate_parts(payload: &Expr) -> Vec<Expr> {
    match payload {
        Expr::Formula(Formula::Member(l, r)) => {
            vec![Expr::Term(l.clone()), Expr::Term(r.clone())]
        }
        Expr::Formula(Formula::Not(g)) | Expr::Formula(Formula::Quant(_, _, g)) => {
            vec![Expr::Formula((**g).clone())]
        }
        Expr::Formula(Formula::Binary(_, l, r)) => {
            vec![Expr::Formula((**l).clone()), Expr::Formula((**r).clone())]
        }
        Expr::Term(Term::Comprehension { body, .. }) => vec![Expr::Formula((**body).clone())],
        Expr::Term(_) => Vec::new(),
    }
}

pub fn derive_edges(store: &ObjectStore, recognitions: &[RecognitionResult]) -> NetGraph {
    let mut edges = Vec::new();
    let mut push = |kind: EdgeKind, src: ObjectId, dst: ObjectId| {
        let e = Edge { kind, src, dst };
        if !edges.contains(&e) {
            edges.push(e);
        }
    };
    // Substitution may rename bound variables, so sets are matched up to alpha.
    let mut sets = std::collections::HashMap::new();
    for obj in store.objects() {
        if let Expr::Term(t) = &obj.payload {
            sets.entry(t.canonical_key(true)).or_insert(obj.id);
        }
    }
    for obj in store.objects() {
        let tag = obj.provenance.rule.tag();
        for &parent in &obj.provenance.parents {
            push(EdgeKind::Derivation(tag.clone()), parent, obj.id);
        }
        let top = top_kind(store, obj.id);
        for part in immediate_parts(&obj.payload) {
            let found = match &part {
                Expr::Term(t) => sets.get(&t.canonical_key(true)).copied(),
                Expr::Formula(_) => store.lookup(&part),
            };
            let Some(dst) = found else { continue };
            if dst == obj.id {
                continue;
            }
            match &part {
                Expr::Formula(_) => {
                    push(EdgeKind::Syntactic, obj.id, dst);
                    if let Some(kind) = &top {
                        push(kind.clone(), obj.id, dst);
                    }
                }
                Expr::Term(_) => push(EdgeKind::SetTheoretic(SetRelation::MemberOf), obj.id, dst),
            }
        }
        if obj.family() != Family::P {
            if let Ok(Some(def)) = store.defining_predicate(obj.id) {
                push(EdgeKind::SetTheoretic(SetRelation::TruthSetOf), obj.id, def);
            }
        }
    }

    let mut by_notation: BTreeMap<&str, Vec<ObjectId>> = BTreeMap::new();
    for r in recognitions {
        for m in &r.matches {
            let ids = by_notation.entry(m.notation.as_str()).or_default();
            if !ids.contains(&r.object_id) {
                ids.push(r.object_id);
            }
        }
    }
    let mut equal = Vec::new();
    for ids in by_notation.values_mut() {
        ids.sort_unstable();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                equal.push((a, b));
            }
        }
    }
    equal.sort_unstable();
    equal.dedup();
    for (a, b) in equal {
        push(EdgeKind::SetTheoretic(SetRelation::ExtensionallyEqual), a, b);
    }

    let vertices = store
        .objects()
        .iter()
        .map(|o| Vertex {
            id: o.id,
            name: o.name.clone(),
            formula: o.payload.to_string(),
            symbol: o.symbol.clone(),
            description: o.description.clone(),
        })
        .collect();
    NetGraph { vertices, edges }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossaryEntry {
    pub object_id: ObjectId,
    pub lang: String,
    pub text: String,
}

/// Manual readings, at most one per (object, language).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Glossary {
    entries: Vec<GlossaryEntry>,
}

impl Glossary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<GlossaryEntry>) -> Self {
        let mut g = Glossary::new();
        for e in entries {
            g.set(e.object_id, &e.lang, e.text);
        }
        g
    }

    pub fn set(&mut self, object_id: ObjectId, lang: &str, text: impl Into<String>) {
        let text = text.into();
        match self
            .entries
            .iter_mut()
            .find(|e| e.object_id == object_id && e.lang == lang)
        {
            Some(e) => e.text = text,
            None => self.entries.push(GlossaryEntry {
                object_id,
                lang: lang.to_owned(),
                text,
            }),
        }
    }

    pub fn get(&self, object_id: ObjectId, lang: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.object_id == object_id && e.lang == lang)
            .map(|e| e.text.as_str())
    }

    pub fn entries(&self) -> &[GlossaryEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct Reader<'a> {
    store: &'a ObjectStore,
    glossary: &'a Glossary,
    recognitions: &'a [RecognitionResult],
    lang: &'a str,
}

impl Reader<'_> {
    fn known(&self, id: ObjectId) -> Option<String> {
        if let Some(text) = self.glossary.get(id, self.lang) {
            return Some(text.to_owned());
        }
        self.recognitions
            .iter()
            .find(|r| r.object_id == id)
            .and_then(|r| r.first())
            .map(|m| m.nl.clone())
    }

    fn sub_formula(&self, f: &Formula) -> String {
        let expr = Expr::Formula(f.clone());
        match self.store.lookup(&expr).and_then(|id| self.known(id)) {
            Some(text) => format!("({text})"),
            None => self.formula(f),
        }
    }

    fn sub_term(&self, t: &Term) -> String {
        if t.is_comprehension() {
            let expr = Expr::Term(t.clone());
            if let Some(text) = self.store.lookup(&expr).and_then(|id| self.known(id)) {
                return format!("({text})");
            }
        }
        self.term(t)
    }

    fn formula(&self, f: &Formula) -> String {
        match f {
            Formula::Member(l, r) => format!("({} is in {})", self.sub_term(l), self.sub_term(r)),
            Formula::Not(g) => format!("(not {})", self.sub_formula(g)),
            Formula::Binary(op, l, r) => {
                let (l, r) = (self.sub_formula(l), self.sub_formula(r));
                match op {
                    Connective::And => format!("({l} and {r})"),
                    Connective::Or => format!("({l} or {r})"),
                    Connective::Implies => format!("(if {l} then {r})"),
                }
            }
            Formula::Quant(q, v, g) => {
                let word = match q {
                    Quantifier::Forall => "for all",
                    Quantifier::Exists => "for some",
                };
                format!("{word} {}, {}", v.name(), self.sub_formula(g))
            }
        }
    }

    fn term(&self, t: &Term) -> String {
        match t {
            Term::Var(v) => v.name().to_owned(),
            Term::Tuple(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| self.sub_term(t)).collect();
                format!("⟨{}⟩", parts.join(", "))
            }
            Term::Comprehension { bound, body } => {
                let names: Vec<&str> = bound.iter().map(|v| v.name()).collect();
                let head = if names.len() == 1 {
                    names[0].to_owned()
                } else {
                    format!("⟨{}⟩", names.join(", "))
                };
                format!("the set of all {head} such that {}", self.sub_formula(body))
            }
        }
    }
}

/// Reading of an object: glossary entry, then recognized name, then a
/// compositional reading that reuses known readings of stored parts.
pub fn render_nl(
    store: &ObjectStore,
    id: ObjectId,
    glossary: &Glossary,
    recognitions: &[RecognitionResult],
    lang: &str,
) -> Result<String, RuleError> {
    let obj = store.get(id)?;
    let reader = Reader {
        store,
        glossary,
        recognitions,
        lang,
    };
    if let Some(text) = reader.known(id) {
        return Ok(text);
    }
    Ok(match &obj.payload {
        Expr::Formula(f) => reader.formula(f),
        Expr::Term(t) => reader.term(t),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetFormat {
    Dot,
    Json,
}

impl FromStr for NetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(NetFormat::Dot),
            "json" => Ok(NetFormat::Json),
            _ => Err(format!("unknown net format `{s}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum NetError {
    #[error("i/o failure: {0}")]
    IoFailure(#[from] io::Error),
    #[error("malformed net document: {0}")]
    Malformed(#[from] serde_json::Error),
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn to_dot(net: &NetGraph) -> String {
    let mut out = String::from("digraph net {\n  node [shape=box];\n");
    for v in &net.vertices {
        out.push_str(&format!(
            "  n{} [label=\"{}\"];\n",
            v.id,
            dot_escape(&format!("{}: {}", v.name, v.formula))
        ));
    }
    for e in &net.edges {
        out.push_str(&format!(
            "  n{} -> n{} [label=\"{}\", color=\"{}\"];\n",
            e.src,
            e.dst,
            dot_escape(&e.kind.to_string()),
            e.kind.color()
        ));
    }
    out.push_str("}\n");
    out
}

pub fn export_net(net: &NetGraph, format: NetFormat) -> String {
    match format {
        NetFormat::Dot => to_dot(net),
        NetFormat::Json => {
            let mut s = serde_json::to_string_pretty(net).expect("net serializes");
            s.push('\n');
            s
        }
    }
}

pub fn write_net(net: &NetGraph, format: NetFormat, mut w: impl Write) -> Result<(), NetError> {
    w.write_all(export_net(net, format).as_bytes())?;
    Ok(())
}

pub fn import_net(bytes: &[u8]) -> Result<NetGraph, NetError> {
    Ok(serde_json::from_slice(bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Variable;
    use crate::recognition::{builtin_catalog, recognize_all};

    fn x(i: usize) -> Variable {
        Variable::elem(format!("x{i}"))
    }

    fn small_store() -> ObjectStore {
        let mut s = ObjectStore::seed(2, 2);
        let n = s.negate(2).unwrap().id; // 5
        s.connect(Connective::And, 1, 2).unwrap(); // 6
        s.truth_set(&[x(0)], 1).unwrap(); // 7
        let p = s.connect(Connective::Or, 1, n).unwrap().id; // 8
        s.quantify(Quantifier::Exists, &x(0), p).unwrap(); // 9
        s
    }

    #[test]
    fn edges_follow_provenance_and_constructors() {
        let store = small_store();
        let net = derive_edges(&store, &[]);
        let derivations: Vec<&Edge> = net.edges_of("derivation").filter(|e| e.dst == 6).collect();
        assert_eq!(derivations.len(), 2);
        assert!(derivations
            .iter()
            .all(|e| e.kind == EdgeKind::Derivation("connect-and".into())));
        assert_eq!(
            derivations.iter().map(|e| e.src).collect::<Vec<_>>(),
            [1, 2]
        );
        for seed in 1..=4 {
            assert_eq!(net.in_degree(seed, "derivation"), 0);
        }
        assert!(net.edges.contains(&Edge {
            kind: EdgeKind::SetTheoretic(SetRelation::TruthSetOf),
            src: 7,
            dst: 1
        }));
        assert!(net.edges.contains(&Edge {
            kind: EdgeKind::Logical(LogicalKind::Not),
            src: 5,
            dst: 2
        }));
        assert!(net.edges.contains(&Edge {
            kind: EdgeKind::Quantificational(Quantifier::Exists),
            src: 9,
            dst: 8
        }));
        assert!(net.edges.contains(&Edge {
            kind: EdgeKind::Syntactic,
            src: 8,
            dst: 5
        }));
        assert!(net.violations(&store).is_empty(), "{:?}", net.violations(&store));
    }

    #[test]
    fn member_of_edges_point_at_stored_sets() {
        let mut store = small_store();
        let m = 7;
        let s = store
            .substitute(1, &Variable::set("A0"), &crate::rules::Replacement::Object(m))
            .unwrap()
            .id;
        let net = derive_edges(&store, &[]);
        assert!(net.edges.contains(&Edge {
            kind: EdgeKind::SetTheoretic(SetRelation::MemberOf),
            src: s,
            dst: m
        }));
    }

    #[test]
    fn edge_kind_strings_round_trip() {
        let kinds = [
            EdgeKind::Derivation("quantify-forall".into()),
            EdgeKind::Syntactic,
            EdgeKind::Logical(LogicalKind::Implies),
            EdgeKind::Quantificational(Quantifier::Forall),
            EdgeKind::SetTheoretic(SetRelation::ExtensionallyEqual),
        ];
        for k in kinds {
            assert_eq!(k.to_string().parse::<EdgeKind>().unwrap(), k);
        }
        assert!("logical:xor".parse::<EdgeKind>().is_err());
        assert!("derivation:".parse::<EdgeKind>().is_err());
    }

    #[test]
    fn compositional_reading() {
        let store = small_store();
        let g = Glossary::new();
        assert_eq!(
            render_nl(&store, 8, &g, &[], "en").unwrap(),
            "((x0 is in A0) or (not (x0 is in A1)))"
        );
        assert_eq!(
            render_nl(&store, 9, &g, &[], "en").unwrap(),
            "for some x0, ((x0 is in A0) or (not (x0 is in A1)))"
        );
        assert_eq!(
            render_nl(&store, 7, &g, &[], "en").unwrap(),
            "the set of all x0 such that (x0 is in A0)"
        );
        assert_eq!(render_nl(&store, 99, &g, &[], "en"), Err(RuleError::UnknownId(99)));
    }

    #[test]
    fn glossary_overrides_recognition() {
        let mut store = ObjectStore::seed(2, 2);
        let u = store.quantify(Quantifier::Forall, &x(0), 1).unwrap().id;
        let rec = recognize_all(&store, &builtin_catalog(), 2).unwrap();
        let mut g = Glossary::new();
        assert_eq!(render_nl(&store, u, &g, &rec, "en").unwrap(), "A0 is the universe");
        g.set(u, "ru", "A0 - универсум");
        g.set(u, "ru", "A0 – универсум");
        assert_eq!(g.entries().len(), 1);
        assert_eq!(render_nl(&store, u, &g, &rec, "ru").unwrap(), "A0 – универсум");
        assert_eq!(render_nl(&store, u, &g, &rec, "en").unwrap(), "A0 is the universe");
        // A stored subformula with a known reading is reused.
        let n = store.negate(u).unwrap().id;
        assert_eq!(
            render_nl(&store, n, &g, &rec, "en").unwrap(),
            "(not (A0 is the universe))"
        );
    }

    #[test]
    fn extensional_equality_edges_from_shared_notation() {
        let mut store = ObjectStore::seed(2, 2);
        let a = store.connect(Connective::And, 1, 2).unwrap().id;
        let m = store.truth_set(&[x(0)], a).unwrap().id;
        let b = store.connect(Connective::And, 3, 4).unwrap().id;
        let m2 = store.truth_set(&[x(1)], b).unwrap().id;
        let rec = recognize_all(&store, &builtin_catalog(), 2).unwrap();
        let net = derive_edges(&store, &rec);
        let eq: Vec<&Edge> = net.edges_of("set-theoretic")
            .filter(|e| e.kind == EdgeKind::SetTheoretic(SetRelation::ExtensionallyEqual))
            .collect();
        assert_eq!(eq.len(), 1);
        assert_eq!((eq[0].src, eq[0].dst), (m, m2));
    }

    #[test]
    fn exports() {
        let empty = derive_edges(&ObjectStore::new(), &[]);
        assert_eq!(export_net(&empty, NetFormat::Dot), "digraph net {\n  node [shape=box];\n}\n");
        assert_eq!(
            export_net(&empty, NetFormat::Json),
            "{\n  \"vertices\": [],\n  \"edges\": []\n}\n"
        );

        let mut store = small_store();
        store.set_description(7, Some("the \"first\" set".into())).unwrap();
        let net = derive_edges(&store, &[]);
        let dot = export_net(&net, NetFormat::Dot);
        assert!(dot.contains("  n1 [label=\"P0: (x0 ∈ A0)\"];\n"));
        assert!(dot.contains("  n1 -> n6 [label=\"derivation:connect-and\", color=\"black\"];\n"));

        let json = export_net(&net, NetFormat::Json);
        let back = import_net(json.as_bytes()).unwrap();
        assert_eq!(back, net);
        assert_eq!(export_net(&back, NetFormat::Json), json);
        assert_eq!(back.vertices[6].description.as_deref(), Some("the \"first\" set"));
        assert!(import_net(b"{\"vertices\": 3}").is_err());
    }
}
