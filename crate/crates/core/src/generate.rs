//! Benchmark snippet generation by typed API chaining: seed a value from a
//! constructor or static method whose arguments are literals, then keep
//! calling knowledge-base members on the values produced so far. Every type
//! referenced on the way is recorded, so the emitted import list is the
//! ground truth by construction, not by later analysis.
//!
//! Each snippet is a `Main` class with a single `test` method, its package
//! and variable names drawn from the word list.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fqn::Fqn;
use crate::kb::{KbEntry, KbType, KnowledgeBase, MemberKind};
use crate::seed::rng_for;
use crate::snippet::{Corpus, CorpusError, Snippet};
use crate::syntax::Primitive;
use crate::words::{word_list, FreshNames};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub libraries: Vec<String>,
    pub snippets_per_library: usize,
    /// Bounds on the number of member calls chained after the seed value.
    pub chain_min: usize,
    pub chain_max: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            libraries: Vec::new(),
            snippets_per_library: 50,
            chain_min: 2,
            chain_max: 5,
            seed: 0,
        }
    }
}

impl GenConfig {
    fn validate(&self) -> Result<(), GenError> {
        if self.snippets_per_library == 0 {
            return Err(GenError::Config("snippets per library must be ≥ 1".into()));
        }
        if self.chain_min > self.chain_max {
            return Err(GenError::Config(format!(
                "chain bounds inverted: {} > {}",
                self.chain_min, self.chain_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("library {0}: no constructible type")]
    NoConstructible(String),
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// One knowledge-base member a generated snippet exercises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvenanceStep {
    pub owner: Fqn,
    pub kind: MemberKind,
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone)]
pub struct GeneratedSnippet {
    pub snippet: Snippet,
    pub provenance: Vec<ProvenanceStep>,
}

/// Whether arguments of this type can be written as a literal.
fn literal_type(ty: &KbType) -> bool {
    match ty {
        KbType::Primitive(p) => !matches!(p, Primitive::Byte | Primitive::Short),
        KbType::Class(fqn) => fqn.as_str() == "java.lang.String",
        KbType::Void => false,
    }
}

struct LocalValue {
    name: String,
    ty: KbType,
}

enum Receiver {
    Instance(usize),
    Static(Fqn),
}

struct StepChoice {
    recv: Receiver,
    owner: Fqn,
    kind: MemberKind,
    name: String,
    params: Vec<KbType>,
    returns: KbType,
}

struct Gen<'a> {
    kb: &'a KnowledgeBase,
    lib_entries: Vec<&'a KbEntry>,
    rng: ChaCha8Rng,
    names: FreshNames,
    locals: Vec<LocalValue>,
    /// Simple name → FQN already standing for it in this snippet.
    used: BTreeMap<String, Fqn>,
    ground_truth: BTreeSet<Fqn>,
    lines: Vec<String>,
    provenance: Vec<ProvenanceStep>,
}

impl<'a> Gen<'a> {
    /// A new simple name may enter the snippet only while no other FQN
    /// already answers to it.
    fn name_ok(&self, ty: &KbType) -> bool {
        match ty {
            KbType::Class(fqn) => self
                .used
                .get(fqn.simple_name())
                .map_or(true, |held| held == fqn),
            _ => true,
        }
    }

    fn record(&mut self, ty: &KbType) {
        if let KbType::Class(fqn) = ty {
            debug_assert!(self.name_ok(ty));
            self.used.insert(fqn.simple_name().to_string(), fqn.clone());
            if !fqn.is_java_lang() {
                self.ground_truth.insert(fqn.clone());
            }
        }
    }

    fn literal(&mut self, ty: &KbType) -> String {
        match ty {
            KbType::Primitive(Primitive::Int) => self.rng.gen_range(1..100).to_string(),
            KbType::Primitive(Primitive::Long) => format!("{}L", self.rng.gen_range(1..1000)),
            KbType::Primitive(Primitive::Double) => format!("{}.5", self.rng.gen_range(0..10)),
            KbType::Primitive(Primitive::Float) => format!("{}.5f", self.rng.gen_range(0..10)),
            KbType::Primitive(Primitive::Boolean) => {
                if self.rng.gen() {
                    "true".to_string()
                } else {
                    "false".to_string()
                }
            }
            KbType::Primitive(Primitive::Char) => {
                format!("'{}'", (b'a' + self.rng.gen_range(0..26u8)) as char)
            }
            _ => format!("\"{}\"", word_list()[self.rng.gen_range(0..word_list().len())]),
        }
    }

    fn compatible(&self, have: &KbType, want: &KbType) -> bool {
        if have == want {
            return true;
        }
        match (have, want) {
            (KbType::Class(sub), KbType::Class(sup)) => {
                sup.as_str() == "java.lang.Object"
                    || self.kb.is_declared_subtype(sub.as_str(), sup.as_str())
            }
            _ => false,
        }
    }

    fn can_fill(&self, want: &KbType) -> bool {
        literal_type(want) || self.locals.iter().any(|l| self.compatible(&l.ty, want))
    }

    fn fill(&mut self, want: &KbType) -> String {
        let mut options: Vec<Option<usize>> = self
            .locals
            .iter()
            .enumerate()
            .filter(|(_, l)| self.compatible(&l.ty, want))
            .map(|(i, _)| Some(i))
            .collect();
        if literal_type(want) {
            options.push(None);
        }
        match options[self.rng.gen_range(0..options.len())] {
            Some(i) => self.locals[i].name.clone(),
            None => self.literal(want),
        }
    }

    /// The type as the snippet writes it: keyword, or simple name.
    fn type_text(&self, ty: &KbType) -> String {
        match ty {
            KbType::Primitive(p) => p.keyword().to_string(),
            KbType::Void => "void".to_string(),
            KbType::Class(fqn) => fqn.simple_name().to_string(),
        }
    }

    fn bind(&mut self, ty: KbType, init: String) {
        let name = self.names.lowercase(&mut self.rng);
        self.lines
            .push(format!("{} {} = {};", self.type_text(&ty), name, init));
        self.locals.push(LocalValue { name, ty });
    }

    /// Opening statement: construct or statically obtain a value using
    /// literal arguments only.
    fn seed(&mut self) -> bool {
        enum SeedChoice {
            Ctor(Fqn, Vec<KbType>),
            Static(Fqn, String, Vec<KbType>, KbType),
        }
        let mut choices = Vec::new();
        for entry in &self.lib_entries {
            if !self.name_ok(&KbType::Class(entry.fqn.clone())) {
                continue;
            }
            for params in entry.constructors() {
                if params.iter().all(literal_type) {
                    choices.push(SeedChoice::Ctor(entry.fqn.clone(), params.to_vec()));
                }
            }
            for member in &entry.members {
                if member.kind == MemberKind::StaticMethod
                    && member.returns != KbType::Void
                    && member.params.iter().all(literal_type)
                    && self.name_ok(&member.returns)
                {
                    choices.push(SeedChoice::Static(
                        entry.fqn.clone(),
                        member.name.clone(),
                        member.params.clone(),
                        member.returns.clone(),
                    ));
                }
            }
        }
        if choices.is_empty() {
            return false;
        }
        match choices.swap_remove(self.rng.gen_range(0..choices.len())) {
            SeedChoice::Ctor(fqn, params) => {
                let args: Vec<String> = params.iter().map(|p| self.literal(p)).collect();
                let ty = KbType::Class(fqn.clone());
                self.record(&ty);
                let init = format!("new {}({})", fqn.simple_name(), args.join(", "));
                self.bind(ty, init);
                self.provenance.push(ProvenanceStep {
                    owner: fqn.clone(),
                    kind: MemberKind::Constructor,
                    name: fqn.simple_name().to_string(),
                    arity: params.len(),
                });
            }
            SeedChoice::Static(owner, name, params, returns) => {
                let args: Vec<String> = params.iter().map(|p| self.literal(p)).collect();
                self.record(&KbType::Class(owner.clone()));
                self.record(&returns);
                let init = format!("{}.{}({})", owner.simple_name(), name, args.join(", "));
                self.bind(returns, init);
                self.provenance.push(ProvenanceStep {
                    owner,
                    kind: MemberKind::StaticMethod,
                    name,
                    arity: params.len(),
                });
            }
        }
        true
    }

    fn step_choices(&self) -> Vec<StepChoice> {
        let mut choices = Vec::new();
        for (i, local) in self.locals.iter().enumerate() {
            let KbType::Class(fqn) = &local.ty else {
                continue;
            };
            for entry in self.kb.chain(fqn.as_str()) {
                for member in &entry.members {
                    if member.kind == MemberKind::Method
                        && member.params.iter().all(|p| self.can_fill(p))
                        && self.name_ok(&member.returns)
                    {
                        choices.push(StepChoice {
                            recv: Receiver::Instance(i),
                            owner: entry.fqn.clone(),
                            kind: MemberKind::Method,
                            name: member.name.clone(),
                            params: member.params.clone(),
                            returns: member.returns.clone(),
                        });
                    }
                }
            }
        }
        for entry in &self.lib_entries {
            for member in &entry.members {
                if member.kind == MemberKind::StaticMethod
                    && member.params.iter().all(|p| self.can_fill(p))
                    && self.name_ok(&KbType::Class(entry.fqn.clone()))
                    && self.name_ok(&member.returns)
                {
                    choices.push(StepChoice {
                        recv: Receiver::Static(entry.fqn.clone()),
                        owner: entry.fqn.clone(),
                        kind: MemberKind::StaticMethod,
                        name: member.name.clone(),
                        params: member.params.clone(),
                        returns: member.returns.clone(),
                    });
                }
            }
        }
        choices
    }

    /// One chained call; returns false when the chain dead-ends.
    fn step(&mut self) -> bool {
        let mut choices = self.step_choices();
        if choices.is_empty() {
            return false;
        }
        let choice = choices.swap_remove(self.rng.gen_range(0..choices.len()));
        let args: Vec<String> = choice.params.iter().map(|p| self.fill(p)).collect();
        let recv = match &choice.recv {
            Receiver::Instance(i) => self.locals[*i].name.clone(),
            Receiver::Static(fqn) => {
                self.record(&KbType::Class(fqn.clone()));
                fqn.simple_name().to_string()
            }
        };
        let call = format!("{}.{}({})", recv, choice.name, args.join(", "));
        if choice.returns == KbType::Void {
            self.lines.push(format!("{call};"));
        } else {
            self.record(&choice.returns);
            self.bind(choice.returns.clone(), call);
        }
        self.provenance.push(ProvenanceStep {
            owner: choice.owner,
            kind: choice.kind,
            name: choice.name,
            arity: choice.params.len(),
        });
        true
    }
}

/// Generates one snippet for a library, using the caller's RNG for every
/// random choice.
pub fn generate_snippet(
    kb: &KnowledgeBase,
    library: &str,
    id: &str,
    config: &GenConfig,
    rng: ChaCha8Rng,
) -> Result<GeneratedSnippet, GenError> {
    let lib_entries: Vec<&KbEntry> = kb
        .iter()
        .filter(|e| e.library.as_deref() == Some(library))
        .collect();
    let mut gen = Gen {
        kb,
        lib_entries,
        rng,
        names: FreshNames::new(BTreeSet::new()),
        locals: Vec::new(),
        used: BTreeMap::new(),
        ground_truth: BTreeSet::new(),
        lines: Vec::new(),
        provenance: Vec::new(),
    };
    let package_word = word_list()[gen.rng.gen_range(0..word_list().len())];
    let package = Fqn::parse(&format!("src.{package_word}.Main")).expect("valid package");
    gen.used.insert("Main".to_string(), package);
    let steps = gen.rng.gen_range(config.chain_min..=config.chain_max);
    if !gen.seed() {
        return Err(GenError::NoConstructible(library.to_string()));
    }
    for _ in 0..steps {
        if !gen.step() {
            break;
        }
    }

    let mut source = format!("package src.{package_word};\n\n");
    for fqn in &gen.ground_truth {
        source.push_str(&format!("import {};\n", fqn.as_str()));
    }
    if !gen.ground_truth.is_empty() {
        source.push('\n');
    }
    source.push_str("class Main {\n    static public final void test() throws Exception {\n");
    for line in &gen.lines {
        source.push_str(&format!("        {line}\n"));
    }
    source.push_str("    }\n}\n");

    let snippet = Snippet::new(id, library, source);
    debug_assert_eq!(
        snippet.ground_truth.iter().cloned().collect::<BTreeSet<_>>(),
        gen.ground_truth
    );
    Ok(GeneratedSnippet {
        snippet,
        provenance: gen.provenance,
    })
}

/// All snippets for one library, ids `<library>01` onward.
pub fn generate_library(
    kb: &KnowledgeBase,
    library: &str,
    config: &GenConfig,
) -> Result<Vec<GeneratedSnippet>, GenError> {
    config.validate()?;
    let mut out = Vec::new();
    for index in 1..=config.snippets_per_library {
        let id = format!("{library}{index:02}");
        let rng = rng_for(config.seed, "gen", &id);
        out.push(generate_snippet(kb, library, &id, config, rng)?);
    }
    Ok(out)
}

/// The full corpus across every configured library.
pub fn generate_corpus(kb: &KnowledgeBase, config: &GenConfig) -> Result<Corpus, GenError> {
    config.validate()?;
    let mut corpus = Corpus::new("generated");
    for library in &config.libraries {
        for generated in generate_library(kb, library, config)? {
            corpus.push(generated.snippet)?;
        }
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infer::infer_imports;
    use crate::kb::parse_kb;
    use crate::syntax::parse;

    fn joda_kb() -> KnowledgeBase {
        parse_kb(concat!(
            r#"{"fqn":"org.joda.time.LocalTime","library":"jodatime","members":[{"kind":"constructor","name":"LocalTime","params":["long"],"returns":"org.joda.time.LocalTime"},{"kind":"method","name":"getChronology","returns":"org.joda.time.Chronology"}]}"#,
            "\n",
            r#"{"fqn":"org.joda.time.Chronology","library":"jodatime","members":[{"kind":"method","name":"hourOfDay","returns":"org.joda.time.DateTimeField"}]}"#,
            "\n",
            r#"{"fqn":"org.joda.time.DateMidnight","library":"jodatime","members":[{"kind":"static_method","name":"now","params":["org.joda.time.Chronology"],"returns":"org.joda.time.DateMidnight"},{"kind":"method","name":"getDayOfYear","returns":"int"}]}"#,
            "\n",
            r#"{"fqn":"org.joda.time.DateTimeField","library":"jodatime","members":[{"kind":"method","name":"getName","returns":"java.lang.String"}]}"#,
            "\n",
        ))
        .unwrap()
    }

    #[test]
    fn zero_member_type_yields_the_minimal_snippet() {
        let kb = parse_kb(r#"{"fqn":"com.acme.Widget","library":"acme"}"#).unwrap();
        let config = GenConfig {
            libraries: vec!["acme".into()],
            snippets_per_library: 1,
            ..GenConfig::default()
        };
        let generated = generate_library(&kb, "acme", &config).unwrap();
        let snippet = &generated[0].snippet;
        assert!(snippet.source.contains("= new Widget();"), "{}", snippet.source);
        let fqns: Vec<&str> = snippet.ground_truth.iter().map(|f| f.as_str()).collect();
        assert_eq!(fqns, ["com.acme.Widget"]);
        parse(&snippet.source).unwrap();
    }

    #[test]
    fn generated_snippets_parse_and_scan_matches_ground_truth() {
        let kb = joda_kb();
        let config = GenConfig {
            libraries: vec!["jodatime".into()],
            snippets_per_library: 50,
            seed: 11,
            ..GenConfig::default()
        };
        for generated in generate_library(&kb, "jodatime", &config).unwrap() {
            let snippet = &generated.snippet;
            parse(&snippet.source).unwrap_or_else(|e| {
                panic!("{} does not parse: {e}\n{}", snippet.id, snippet.source)
            });
            let scanned = crate::snippet::extract_imports(&snippet.source).imports;
            assert_eq!(scanned, snippet.ground_truth, "{}", snippet.source);
        }
    }

    #[test]
    fn provenance_replays_against_the_kb() {
        let kb = joda_kb();
        let config = GenConfig {
            libraries: vec!["jodatime".into()],
            snippets_per_library: 20,
            seed: 3,
            ..GenConfig::default()
        };
        for generated in generate_library(&kb, "jodatime", &config).unwrap() {
            assert!(!generated.provenance.is_empty());
            for step in &generated.provenance {
                let entry = kb.lookup_fqn(step.owner.as_str()).expect("owner in KB");
                let found = match step.kind {
                    MemberKind::Constructor => entry
                        .constructors()
                        .iter()
                        .any(|params| params.len() == step.arity),
                    kind => entry.members.iter().any(|m| {
                        m.kind == kind && m.name == step.name && m.params.len() == step.arity
                    }),
                };
                assert!(found, "{:?} missing from {}", step, entry.fqn.as_str());
            }
        }
    }

    #[test]
    fn inference_with_the_generating_kb_recovers_ground_truth() {
        let kb = joda_kb();
        let config = GenConfig {
            libraries: vec!["jodatime".into()],
            snippets_per_library: 30,
            seed: 8,
            ..GenConfig::default()
        };
        for generated in generate_library(&kb, "jodatime", &config).unwrap() {
            let inference = infer_imports(&generated.snippet, &kb).unwrap();
            for fqn in generated.snippet.ground_truth.iter() {
                assert!(
                    inference.imports.contains(fqn),
                    "{}: lost {}\n{}",
                    generated.snippet.id,
                    fqn.as_str(),
                    generated.snippet.source
                );
            }
        }
    }

    #[test]
    fn same_seed_generates_identical_corpora() {
        let kb = joda_kb();
        let config = GenConfig {
            libraries: vec!["jodatime".into()],
            snippets_per_library: 5,
            seed: 21,
            ..GenConfig::default()
        };
        let a = generate_corpus(&kb, &config).unwrap();
        let b = generate_corpus(&kb, &config).unwrap();
        assert_eq!(a, b);
        let c = generate_corpus(
            &kb,
            &GenConfig {
                seed: 22,
                ..config.clone()
            },
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn ids_number_from_one_per_library() {
        let kb = parse_kb(concat!(
            r#"{"fqn":"a.One","library":"alpha"}"#,
            "\n",
            r#"{"fqn":"b.Two","library":"beta"}"#,
            "\n",
        ))
        .unwrap();
        let config = GenConfig {
            libraries: vec!["alpha".into(), "beta".into()],
            snippets_per_library: 3,
            ..GenConfig::default()
        };
        let corpus = generate_corpus(&kb, &config).unwrap();
        let ids: Vec<&str> = corpus.snippets().iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["alpha01", "alpha02", "alpha03", "beta01", "beta02", "beta03"]);
    }

    #[test]
    fn variable_names_come_from_the_word_list() {
        let kb = joda_kb();
        let config = GenConfig {
            libraries: vec!["jodatime".into()],
            snippets_per_library: 5,
            seed: 4,
            ..GenConfig::default()
        };
        for generated in generate_library(&kb, "jodatime", &config).unwrap() {
            for line in generated.snippet.source.lines() {
                let line = line.trim();
                let Some((before, _)) = line.split_once(" = ") else {
                    continue;
                };
                let name = before.split_whitespace().last().unwrap();
                assert!(word_list().contains(&name), "{name} not a list word");
            }
        }
    }

    #[test]
    fn unconstructible_library_fails_by_name() {
        let kb = parse_kb(
            r#"{"fqn":"a.Opaque","library":"dark","members":[{"kind":"constructor","name":"Opaque","params":["a.Hidden"],"returns":"a.Opaque"}]}"#,
        )
        .unwrap();
        let config = GenConfig {
            libraries: vec!["dark".into()],
            snippets_per_library: 1,
            ..GenConfig::default()
        };
        let err = generate_corpus(&kb, &config).unwrap_err();
        assert!(matches!(err, GenError::NoConstructible(lib) if lib == "dark"));
    }

    #[test]
    fn inverted_chain_bounds_are_rejected() {
        let kb = joda_kb();
        let config = GenConfig {
            libraries: vec!["jodatime".into()],
            chain_min: 6,
            chain_max: 2,
            ..GenConfig::default()
        };
        assert!(matches!(
            generate_corpus(&kb, &config),
            Err(GenError::Config(_))
        ));
    }
}
