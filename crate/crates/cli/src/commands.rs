//! Subcommands. Each returns its standard output so it can be tested
//! without spawning a process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use setsig_core::enumerate::{enumerate, table1_rows, verify_table1, EnumConfig, RowStatus};
use setsig_core::formula::parse_formula;
use setsig_core::net::{export_net, render_nl, NetFormat};
use setsig_core::recognition::{apply_symbols, builtin_catalog, recognize, signature_from_results};
use setsig_core::rules::ObjectId;
use setsig_core::semantics::{classify, DEFAULT_MAX_SIZE};
use setsig_core::theory::{identity_suite, negative_control};

use crate::ops::{self, OpError, RuleRequest};
use crate::service::{self, AppState};
use crate::session::{Session, SessionError};

#[derive(Debug, Parser)]
#[command(name = "setsig", version, about = "Build set-theory notions from the membership predicate")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SessionArg {
    /// Session file to read and write.
    #[arg(long, short = 's')]
    pub session: PathBuf,
}

#[derive(Debug, Args)]
pub struct SizeArg {
    /// Largest domain size to sweep; defaults to the session's setting.
    #[arg(long, short = 'k')]
    pub max_size: Option<u32>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Dot,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a session holding only the atomic formulae.
    Init {
        #[command(flatten)]
        session: SessionArg,
        #[arg(long, default_value_t = 2)]
        elem_vars: usize,
        #[arg(long, default_value_t = 2)]
        set_vars: usize,
    },
    /// Generate the bounded closure and write it to the session.
    Enumerate {
        #[command(flatten)]
        session: SessionArg,
        #[arg(long, default_value_t = 2)]
        elem_vars: usize,
        #[arg(long, default_value_t = 2)]
        set_vars: usize,
        #[arg(long, default_value_t = 2)]
        max_atoms: usize,
        #[arg(long, default_value_t = 1)]
        quantifier_depth: usize,
        #[arg(long, short = 'k', default_value_t = DEFAULT_MAX_SIZE)]
        max_size: u32,
    },
    /// Classify a stored object by id, or a formula given as text.
    Classify {
        target: String,
        #[arg(long, short = 's')]
        session: Option<PathBuf>,
        #[arg(long, short = 'k')]
        max_size: Option<u32>,
    },
    /// Match an object against the catalog of known notions.
    Recognize {
        id: ObjectId,
        #[command(flatten)]
        session: SessionArg,
        #[command(flatten)]
        size: SizeArg,
    },
    /// List the signature reached by the session's objects.
    ReportSignature {
        #[command(flatten)]
        session: SessionArg,
        #[command(flatten)]
        size: SizeArg,
    },
    /// Check that every reference table row is present and recognized.
    VerifyTable1 {
        #[command(flatten)]
        session: SessionArg,
        #[command(flatten)]
        size: SizeArg,
    },
    /// Sweep the truth-set identities over the session's predicates.
    CheckIdentities {
        #[command(flatten)]
        session: SessionArg,
        #[command(flatten)]
        size: SizeArg,
    },
    /// Write the semantic net.
    Export {
        #[command(flatten)]
        session: SessionArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write here instead of standard output.
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Read an object in natural language.
    RenderNl {
        id: ObjectId,
        #[command(flatten)]
        session: SessionArg,
        #[arg(long, default_value = "en")]
        lang: String,
    },
    /// Serve the session over HTTP.
    Serve {
        #[command(flatten)]
        session: SessionArg,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Apply one construction rule to the session.
    Apply {
        #[command(subcommand)]
        rule: ApplyRule,
    },
    /// Set an object's description, or a glossary entry with --lang.
    Describe {
        id: ObjectId,
        text: String,
        #[command(flatten)]
        session: SessionArg,
        #[arg(long)]
        lang: Option<String>,
    },
    /// Print the formula table.
    List {
        #[command(flatten)]
        session: SessionArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum ApplyRule {
    Negate {
        #[arg(long)]
        parent: ObjectId,
        #[command(flatten)]
        session: SessionArg,
    },
    Connect {
        /// and, or, implies
        #[arg(long)]
        op: String,
        #[arg(long)]
        left: ObjectId,
        #[arg(long)]
        right: ObjectId,
        #[command(flatten)]
        session: SessionArg,
    },
    Quantify {
        /// forall or exists
        #[arg(long)]
        q: String,
        #[arg(long)]
        var: String,
        #[arg(long)]
        parent: ObjectId,
        #[command(flatten)]
        session: SessionArg,
    },
    TruthSet {
        /// Repeat for a tuple of element variables.
        #[arg(long, required = true)]
        bound: Vec<String>,
        #[arg(long)]
        parent: ObjectId,
        #[command(flatten)]
        session: SessionArg,
    },
    Substitute {
        #[arg(long)]
        target: ObjectId,
        #[arg(long)]
        var: String,
        #[arg(long, conflicts_with = "object", required_unless_present = "object")]
        term: Option<String>,
        #[arg(long)]
        object: Option<ObjectId>,
        #[command(flatten)]
        session: SessionArg,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("{0}")]
    Verification(String),
    #[error("{}: {}", .0.code(), .0)]
    Op(#[from] OpError),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Session(SessionError::Io(_)) => 1,
            CliError::Session(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Op(_) | CliError::Other(_) => 1,
        }
    }
}

fn load(path: &Path) -> Result<Session, CliError> {
    Ok(Session::load(path)?)
}

fn size(session: &Session, arg: &SizeArg) -> u32 {
    arg.max_size.unwrap_or(session.config.model_check_size)
}

pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Init {
            session,
            elem_vars,
            set_vars,
        } => {
            let config = EnumConfig {
                elem_vars,
                set_vars,
                ..EnumConfig::default()
            };
            config.validate().map_err(|e| CliError::Other(e.to_string()))?;
            let s = Session::new(config);
            s.save(&session.session)?;
            Ok(format!("initialized {} objects\n", s.store.len()))
        }
        Command::Enumerate {
            session,
            elem_vars,
            set_vars,
            max_atoms,
            quantifier_depth,
            max_size,
        } => {
            let config = EnumConfig {
                elem_vars,
                set_vars,
                max_atoms,
                quantifier_depth,
                model_check_size: max_size,
                ..EnumConfig::default()
            };
            let store = enumerate(&config).map_err(|e| CliError::Other(format!("{}: {e}", e.code())))?;
            let mut s = Session::with_store(store, config);
            let results = ops::recognitions(&s)?;
            apply_symbols(&mut s.store, &results).map_err(OpError::from)?;
            s.save(&session.session)?;
            let recognized = results.iter().filter(|r| !r.matches.is_empty()).count();
            Ok(format!(
                "enumerated {} objects, {recognized} recognized\n",
                s.store.len()
            ))
        }
        Command::Classify {
            target,
            session,
            max_size,
        } => match (target.parse::<ObjectId>(), session) {
            (Ok(id), Some(path)) => {
                let mut s = load(&path)?;
                if let Some(k) = max_size {
                    s.config.model_check_size = k;
                }
                let c = s
                    .classify_object(id)?
                    .ok_or(OpError::Rule(setsig_core::rules::RuleError::NotAFormula(id)))?;
                if max_size.is_none() {
                    s.save(&path)?;
                }
                Ok(format!("{}\n", c.label()))
            }
            (Ok(_), None) => Err(CliError::Other("classifying an id needs --session".into())),
            (Err(_), _) => {
                let f = parse_formula(&target)
                    .map_err(|e| CliError::Other(format!("{}: {e}", e.code())))?;
                let c = classify(&f, max_size.unwrap_or(DEFAULT_MAX_SIZE)).map_err(OpError::from)?;
                Ok(format!("{}\n", c.label()))
            }
        },
        Command::Recognize { id, session, size: k } => {
            let mut s = load(&session.session)?;
            let k = size(&s, &k);
            let result = recognize(&mut s.store, id, &builtin_catalog(), k).map_err(OpError::from)?;
            s.save(&session.session)?;
            if result.matches.is_empty() {
                return Ok(format!("no match up to size {k}\n"));
            }
            let mut out = String::new();
            for m in &result.matches {
                writeln!(out, "{}\t{}\t{}", m.symbol, m.notation, m.nl).unwrap();
            }
            Ok(out)
        }
        Command::ReportSignature { session, size: k } => {
            let s = load(&session.session)?;
            let k = size(&s, &k);
            let results = setsig_core::recognition::recognize_all(&s.store, &builtin_catalog(), k)
                .map_err(OpError::from)?;
            let sig = signature_from_results(&s.store, &results, k);
            let mut out = format!("{sig}\n");
            for sym in &sig.symbols {
                let names: Vec<String> = sym
                    .objects
                    .iter()
                    .map(|&id| s.store.get(id).map(|o| o.notation()).unwrap_or_default())
                    .collect();
                writeln!(out, "{}\t{}", sym.symbol, names.join(", ")).unwrap();
            }
            Ok(out)
        }
        Command::VerifyTable1 { session, size: k } => {
            let s = load(&session.session)?;
            let k = size(&s, &k);
            let report = verify_table1(&s.store, &table1_rows(), &builtin_catalog(), k)
                .map_err(OpError::from)?;
            let mut out = String::new();
            for row in &report.rows {
                match &row.status {
                    RowStatus::Matched { .. } => {}
                    RowStatus::Missing => writeln!(out, "row {}: MISSING", row.row).unwrap(),
                    RowStatus::Unrecognized { object_id, found } => writeln!(
                        out,
                        "row {}: object {object_id} not recognized as expected (found: {})",
                        row.row,
                        found.join(", ")
                    )
                    .unwrap(),
                }
            }
            writeln!(out, "{report}").unwrap();
            if report.passed() {
                Ok(out)
            } else {
                Err(CliError::Verification(out.trim_end().to_owned()))
            }
        }
        Command::CheckIdentities { session, size: k } => {
            let s = load(&session.session)?;
            let k = size(&s, &k);
            let report = identity_suite(&s.store, k).map_err(OpError::from)?;
            let control = negative_control(k).map_err(OpError::from)?;
            let mut out = String::new();
            for c in report.cases.iter().filter(|c| !c.passed()) {
                writeln!(out, "{c}").unwrap();
            }
            writeln!(out, "{report}").unwrap();
            writeln!(out, "control: {control}").unwrap();
            if report.all_passed() && !control.passed() {
                Ok(out)
            } else {
                Err(CliError::Verification(out.trim_end().to_owned()))
            }
        }
        Command::Export {
            session,
            format,
            output,
        } => {
            let s = load(&session.session)?;
            let graph = ops::net(&s)?;
            let format = match format {
                Format::Dot => NetFormat::Dot,
                Format::Json => NetFormat::Json,
            };
            let text = export_net(&graph, format);
            match output {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| CliError::Other(e.to_string()))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::RenderNl { id, session, lang } => {
            let s = load(&session.session)?;
            let results = ops::recognitions(&s)?;
            let text = render_nl(&s.store, id, &s.glossary, &results, &lang).map_err(OpError::from)?;
            Ok(format!("{text}\n"))
        }
        Command::Serve { session, port } => {
            let s = load(&session.session)?;
            let state = AppState::new(s, Some(session.session));
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Other(e.to_string()))?;
            rt.block_on(service::serve(state, port))
                .map_err(|e| CliError::Other(e.to_string()))?;
            Ok(String::new())
        }
        Command::Apply { rule } => {
            let (request, path) = match rule {
                ApplyRule::Negate { parent, session } => (RuleRequest::Negate { parent }, session.session),
                ApplyRule::Connect {
                    op,
                    left,
                    right,
                    session,
                } => (RuleRequest::Connect { op, left, right }, session.session),
                ApplyRule::Quantify {
                    q,
                    var,
                    parent,
                    session,
                } => (RuleRequest::Quantify { q, var, parent }, session.session),
                ApplyRule::TruthSet {
                    bound,
                    parent,
                    session,
                } => (RuleRequest::TruthSet { bound, parent }, session.session),
                ApplyRule::Substitute {
                    target,
                    var,
                    term,
                    object,
                    session,
                } => (
                    RuleRequest::Substitute {
                        target,
                        var,
                        term,
                        object,
                    },
                    session.session,
                ),
            };
            let mut s = load(&path)?;
            let applied = request.apply(&mut s)?;
            s.save(&path)?;
            let obj = s.store.get(applied.id).map_err(OpError::from)?;
            let note = if applied.already_present {
                " (already present)"
            } else {
                ""
            };
            Ok(format!("{}\t{}\t{}{note}\n", obj.id, obj.name, obj.payload))
        }
        Command::Describe {
            id,
            text,
            session,
            lang,
        } => {
            let mut s = load(&session.session)?;
            s.store.get(id).map_err(OpError::from)?;
            match lang {
                Some(lang) => s.glossary.set(id, &lang, text),
                None => s
                    .store
                    .set_description(id, Some(text))
                    .map_err(OpError::from)?,
            }
            s.save(&session.session)?;
            Ok(String::new())
        }
        Command::List { session } => {
            let mut s = load(&session.session)?;
            let rows = ops::rows(&mut s);
            s.save(&session.session)?;
            let mut out = String::new();
            for r in rows {
                let free = r.free.join(", ");
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.id,
                    r.formula,
                    r.classification.unwrap_or_default(),
                    free,
                    r.description.unwrap_or_default(),
                    r.notation,
                    r.symbol.unwrap_or_default(),
                )
                .unwrap();
            }
            Ok(out)
        }
    }
}
