//! Constraint-based import inference: extract typing constraints from a
//! snippet, filter knowledge-base candidates until each named type variable
//! settles on one FQN, and emit the import statements those types need.

mod extract;
mod solve;

use std::collections::BTreeMap;
use std::fmt;

use crate::fqn::ImportSet;
use crate::kb::KnowledgeBase;
use crate::snippet::Snippet;
use crate::syntax::{parse, ParseError, Primitive};

pub use extract::extract_constraints;
pub use solve::{check, solve, Assignment, Candidates};

/// A type variable: one per distinct simple type name, one per
/// intermediate expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeVar {
    pub id: usize,
    /// The simple name or a short description of the expression it denotes.
    pub origin: String,
}

/// What a literal pins its variable to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LitClass {
    Prim(Primitive),
    Str,
}

impl fmt::Display for LitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LitClass::Prim(p) => f.write_str(p.keyword()),
            LitClass::Str => f.write_str("String"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    SimpleName {
        tv: usize,
        name: String,
    },
    HasMethod {
        recv: usize,
        name: String,
        args: Vec<usize>,
        result: usize,
    },
    HasStaticMethod {
        recv: usize,
        name: String,
        args: Vec<usize>,
        result: usize,
    },
    HasField {
        recv: usize,
        name: String,
        result: usize,
    },
    HasConstructor {
        tv: usize,
        args: Vec<usize>,
    },
    AssignableTo {
        sub: usize,
        sup: usize,
    },
    IsLiteral {
        tv: usize,
        lit: LitClass,
    },
}

fn tv_list(ids: &[usize]) -> String {
    let parts: Vec<String> = ids.iter().map(|id| format!("t{id}")).collect();
    format!("[{}]", parts.join(", "))
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::SimpleName { tv, name } => write!(f, "SimpleName(t{tv}, {name})"),
            Constraint::HasMethod {
                recv,
                name,
                args,
                result,
            } => write!(f, "HasMethod(t{recv}, {name}, {}, t{result})", tv_list(args)),
            Constraint::HasStaticMethod {
                recv,
                name,
                args,
                result,
            } => write!(
                f,
                "HasStaticMethod(t{recv}, {name}, {}, t{result})",
                tv_list(args)
            ),
            Constraint::HasField { recv, name, result } => {
                write!(f, "HasField(t{recv}, {name}, t{result})")
            }
            Constraint::HasConstructor { tv, args } => {
                write!(f, "HasConstructor(t{tv}, {})", tv_list(args))
            }
            Constraint::AssignableTo { sub, sup } => write!(f, "AssignableTo(t{sub}, t{sup})"),
            Constraint::IsLiteral { tv, lit } => write!(f, "IsLiteral(t{tv}, {lit})"),
        }
    }
}

/// Everything extraction learned from one compilation unit.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub tvs: Vec<TypeVar>,
    pub constraints: Vec<Constraint>,
    /// Simple type name → variable, for names the KB should resolve.
    pub named: BTreeMap<String, usize>,
    /// The unit's own package, whose types need no import.
    pub package: Option<String>,
}

/// Renders variables and constraints as stable text, one item per line,
/// for golden-file comparison.
pub fn dump_constraints(extraction: &Extraction) -> String {
    let mut out = String::new();
    for tv in &extraction.tvs {
        out.push_str(&format!("t{}: {}\n", tv.id, tv.origin));
    }
    for constraint in &extraction.constraints {
        out.push_str(&format!("{constraint}\n"));
    }
    out
}

/// The solver's verdict for one snippet: solved imports, the full simple
/// name to FQN map (including types that need no import), and the simple
/// names whose constraints could not all be satisfied.
#[derive(Debug, Clone)]
pub struct Inference {
    pub imports: ImportSet,
    pub solved: BTreeMap<String, String>,
    pub unsatisfied: Vec<String>,
}

/// Strips imports, extracts constraints, solves against the KB, and emits
/// the solved FQN of every named variable outside `java.lang` and outside
/// the snippet's own package.
pub fn infer_imports(snippet: &Snippet, kb: &KnowledgeBase) -> Result<Inference, ParseError> {
    let unit = parse(&snippet.stripped_source())?;
    let extraction = extract_constraints(&unit);
    let assignment = solve(&extraction, kb);
    let mut imports = ImportSet::new();
    let mut solved = BTreeMap::new();
    let mut unsatisfied = Vec::new();
    for (name, &tv) in &extraction.named {
        if assignment.is_unsatisfied(tv) {
            unsatisfied.push(name.clone());
            continue;
        }
        if let Some(fqn) = assignment.solved_class(tv) {
            solved.insert(name.clone(), fqn.as_str().to_string());
            if fqn.is_java_lang() {
                continue;
            }
            if extraction.package.as_deref() == fqn.package() {
                continue;
            }
            imports.insert(fqn.clone());
        }
    }
    Ok(Inference {
        imports,
        solved,
        unsatisfied,
    })
}
