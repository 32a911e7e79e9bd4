//! Freezes the constraint set extracted from a method-chaining snippet.
//! The golden file was checked by hand against the statements: a `LocalTime`
//! constructed from a long, `getChronology()` on that value, a static
//! `DateMidnight.now(...)` taking the chronology, and `getDayOfYear()` on
//! the result. Any change to extraction order or shape shows up as a diff.

use std::fs;
use std::path::{Path, PathBuf};

use snipinfer_core::infer::{dump_constraints, extract_constraints};
use snipinfer_core::syntax::parse;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn chained_calls_extract_the_expected_constraints() {
    let source = fs::read_to_string(fixture("chain_snippet.java")).unwrap();
    let unit = parse(&source).unwrap();
    let extraction = extract_constraints(&unit);
    let dump = dump_constraints(&extraction);

    for needle in [
        "SimpleName",
        "LocalTime",
        "HasConstructor",
        "getChronology",
        "Chronology",
        "HasStaticMethod",
        "now",
        "getDayOfYear",
    ] {
        assert!(dump.contains(needle), "dump lacks {needle}:\n{dump}");
    }

    let golden = fs::read_to_string(fixture("chain_constraints.txt")).unwrap();
    assert_eq!(dump, golden, "constraint dump drifted:\n{dump}");
}
