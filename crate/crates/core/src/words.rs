//! Bundled word list and fresh-identifier generation.
//!
//! Fresh names replace identifiers during renaming and name generated
//! locals. They are built from a fixed English word list compiled into the
//! binary, so the same seed produces the same names everywhere.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::Rng;

const WORDS_RAW: &str = include_str!("../assets/words.txt");

/// The bundled word list, one lowercase word per entry.
pub fn word_list() -> &'static [&'static str] {
    static WORDS: OnceLock<Vec<&'static str>> = OnceLock::new();
    WORDS.get_or_init(|| WORDS_RAW.lines().filter(|l| !l.is_empty()).collect())
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Draws fresh identifiers that collide neither with a reserved set nor with
/// each other.
///
/// `reserved` should hold every identifier already present in the text being
/// rewritten. Sampling is rejection-based: a candidate already issued or
/// reserved is discarded and a new one drawn.
pub struct FreshNames {
    reserved: BTreeSet<String>,
}

impl FreshNames {
    pub fn new(reserved: BTreeSet<String>) -> FreshNames {
        FreshNames { reserved }
    }

    /// Marks a name as taken without issuing it.
    pub fn reserve(&mut self, name: &str) {
        self.reserved.insert(name.to_string());
    }

    /// A `CamelCase` identifier built from three capitalized words, e.g.
    /// `RowsGarlickyThump`.
    pub fn three_word<R: Rng>(&mut self, rng: &mut R) -> String {
        let words = word_list();
        loop {
            let mut name = String::new();
            for _ in 0..3 {
                name.push_str(&capitalize(words[rng.gen_range(0..words.len())]));
            }
            if self.reserved.insert(name.clone()) {
                return name;
            }
        }
    }

    /// A single lowercase word, e.g. `pantsuits`-style local names.
    pub fn lowercase<R: Rng>(&mut self, rng: &mut R) -> String {
        let words = word_list();
        loop {
            let name = words[rng.gen_range(0..words.len())].to_string();
            if self.reserved.insert(name.clone()) {
                return name;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn list_is_large_and_lowercase() {
        let words = word_list();
        assert!(words.len() >= 1000, "word list has {} entries", words.len());
        assert!(words.iter().all(|w| w.chars().all(|c| c.is_ascii_lowercase())));
        let unique: BTreeSet<_> = words.iter().collect();
        assert_eq!(unique.len(), words.len());
    }

    #[test]
    fn three_word_names_are_shaped_and_unique() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pool = FreshNames::new(BTreeSet::new());
        let mut seen = BTreeSet::new();
        for _ in 0..200 {
            let name = pool.three_word(&mut rng);
            assert!(name.chars().next().unwrap().is_ascii_uppercase());
            assert!(name.chars().filter(|c| c.is_ascii_uppercase()).count() >= 3);
            assert!(seen.insert(name));
        }
    }

    #[test]
    fn rejects_reserved_names() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let reserved: BTreeSet<String> = word_list().iter().map(|w| capitalize(w)).collect();
        // Reserve every single capitalized word; three-word names still work.
        let mut pool = FreshNames::new(reserved);
        let name = pool.three_word(&mut rng);
        assert!(name.len() > 3);
    }

    #[test]
    fn same_seed_same_names() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let mut pool = FreshNames::new(BTreeSet::new());
            (0..10).map(|_| pool.three_word(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }
}
