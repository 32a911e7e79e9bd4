//! Keyword comment injection, working directly on source text.
//!
//! Every line gains a ` // <keyword>` suffix, with the keyword drawn
//! uniformly (with replacement) from the fifty reserved Java keywords.
//! Stripping one trailing keyword comment from every line restores the
//! input byte for byte.

use rand::Rng;

use crate::seed::rng_for;
use crate::syntax::KEYWORDS;

/// Appends one random keyword comment to each line.
pub fn add_keyword_comments(source: &str, seed: u64) -> String {
    let mut rng = rng_for(seed, "comment", "");
    let mut out = String::with_capacity(source.len() + source.lines().count() * 12);
    for line in source.split_inclusive('\n') {
        let (content, ending) = match line.strip_suffix('\n') {
            Some(rest) => (rest, "\n"),
            None => (line, ""),
        };
        let keyword = KEYWORDS[rng.gen_range(0..KEYWORDS.len())];
        out.push_str(content);
        out.push_str(" // ");
        out.push_str(keyword);
        out.push_str(ending);
    }
    out
}

/// Removes the rightmost ` // <keyword>` suffix from each line, undoing
/// `add_keyword_comments` exactly.
pub fn strip_keyword_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.split_inclusive('\n') {
        let (content, ending) = match line.strip_suffix('\n') {
            Some(rest) => (rest, "\n"),
            None => (line, ""),
        };
        let stripped = match content.rfind(" // ") {
            Some(idx) if KEYWORDS.binary_search(&&content[idx + 4..]).is_ok() => &content[..idx],
            _ => content,
        };
        out.push_str(stripped);
        out.push_str(ending);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_line_gets_one_keyword() {
        let src = "class C {\n    void m() {\n        return;\n    }\n}";
        let commented = add_keyword_comments(src, 4);
        assert_eq!(commented.lines().count(), src.lines().count());
        for line in commented.lines() {
            let idx = line.rfind(" // ").expect("comment present");
            assert!(KEYWORDS.contains(&&line[idx + 4..]), "{line}");
        }
    }

    #[test]
    fn round_trips_byte_exactly() {
        let cases = [
            "",
            "class C {}\n",
            "int x; // while\nint y;",
            "\n\n",
            "   \n",
            "no trailing newline",
        ];
        for src in cases {
            assert_eq!(strip_keyword_comments(&add_keyword_comments(src, 8)), src);
        }
    }

    #[test]
    fn empty_input_stays_empty() {
        assert_eq!(add_keyword_comments("", 1), "");
    }

    #[test]
    fn keeps_existing_comments() {
        let src = "x(); // if";
        let commented = add_keyword_comments(src, 2);
        assert!(commented.starts_with("x(); // if // "), "{commented}");
        assert_eq!(strip_keyword_comments(&commented), src);
    }

    #[test]
    fn deterministic_for_same_seed() {
        let src = "a\nb\nc\n";
        assert_eq!(add_keyword_comments(src, 3), add_keyword_comments(src, 3));
        assert_ne!(add_keyword_comments(src, 3), add_keyword_comments(src, 4));
    }
}
