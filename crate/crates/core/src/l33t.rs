//! Letter to digit/symbol substitution table.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One `letter -> symbol` substitution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct L33tEntry {
    pub letter: char,
    pub symbol: char,
}

/// Ordered list of l33t substitutions.
///
/// Entry order is significant: it is the canonical order used when building
/// the position-free l33t key, and the fallback order for reverse-mapping
/// ambiguous symbols when no model is available.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L33tTable {
    entries: Vec<L33tEntry>,
}

const DEFAULT_ENTRIES: [(char, char); 14] = [
    ('a', '@'),
    ('a', '4'),
    ('e', '3'),
    ('i', '1'),
    ('i', '!'),
    ('i', '|'),
    ('o', '0'),
    ('s', '$'),
    ('s', '5'),
    ('x', '%'),
    ('z', '2'),
    ('t', '+'),
    ('t', '7'),
    ('g', '9'),
];

impl Default for L33tTable {
    fn default() -> Self {
        Self { entries: DEFAULT_ENTRIES.iter().map(|&(letter, symbol)| L33tEntry { letter, symbol }).collect() }
    }
}

impl L33tTable {
    pub fn new(pairs: impl IntoIterator<Item = (char, char)>) -> Result<Self> {
        let mut entries: Vec<L33tEntry> = Vec::new();
        for (i, (letter, symbol)) in pairs.into_iter().enumerate() {
            let entry = L33tEntry { letter, symbol };
            validate_entry(entry).map_err(|reason| Error::L33tTable { line: i + 1, reason })?;
            if entries.contains(&entry) {
                return Err(Error::L33tTable { line: i + 1, reason: format!("duplicate entry {letter}->{symbol}") });
            }
            entries.push(entry);
        }
        if entries.is_empty() {
            return Err(Error::L33tTable { line: 0, reason: "table is empty".into() });
        }
        Ok(Self { entries })
    }

    /// Parses the `letter<TAB>symbol` text format. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(letter), Some(symbol), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::L33tTable { line: i + 1, reason: "expected `letter<TAB>symbol`".into() });
            };
            let letter = single_char(letter).ok_or_else(|| Error::L33tTable {
                line: i + 1,
                reason: format!("letter field {letter:?} is not one character"),
            })?;
            let symbol = single_char(symbol).ok_or_else(|| Error::L33tTable {
                line: i + 1,
                reason: format!("symbol field {symbol:?} is not one character"),
            })?;
            pairs.push((letter, symbol));
        }
        Self::new(pairs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}", e.letter, e.symbol);
        }
        out
    }

    /// Hex SHA-256 of the canonical text form; recorded in model files.
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn entries(&self) -> &[L33tEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Letters that `symbol` may stand for, in table order.
    pub fn letters_for(&self, symbol: char) -> impl Iterator<Item = char> + '_ {
        self.entries.iter().filter(move |e| e.symbol == symbol).map(|e| e.letter)
    }

    /// Substitutions available for `letter`, in table order.
    pub fn symbols_for(&self, letter: char) -> impl Iterator<Item = char> + '_ {
        self.entries.iter().filter(move |e| e.letter == letter).map(|e| e.symbol)
    }

    pub fn index_of(&self, letter: char, symbol: char) -> Option<usize> {
        self.entries.iter().position(|e| e.letter == letter && e.symbol == symbol)
    }

    pub fn contains(&self, letter: char, symbol: char) -> bool {
        self.index_of(letter, symbol).is_some()
    }
}

fn single_char(s: &str) -> Option<char> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}

fn validate_entry(e: L33tEntry) -> std::result::Result<(), String> {
    if !e.letter.is_ascii_lowercase() {
        return Err(format!("{:?} is not a lowercase ASCII letter", e.letter));
    }
    if !(e.symbol.is_ascii_digit() || e.symbol.is_ascii_punctuation()) {
        return Err(format!("{:?} is not a digit or keyboard symbol", e.symbol));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_has_fourteen_entries() {
        let table = L33tTable::default();
        assert_eq!(table.len(), 14);
        for e in table.entries() {
            assert!("aeiosxpztg".contains(e.letter), "{e:?}");
        }
    }

    #[test]
    fn text_format_round_trips() {
        let table = L33tTable::default();
        let text = table.to_text();
        assert_eq!(text.lines().count(), 14);
        assert_eq!(L33tTable::parse(&text).unwrap(), table);
        assert_eq!(table.hash_hex().len(), 64);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(L33tTable::parse("a @"), Err(Error::L33tTable { line: 1, .. })));
        assert!(matches!(L33tTable::parse("a\t@\nA\t4"), Err(Error::L33tTable { line: 2, .. })));
        assert!(matches!(L33tTable::parse("a\tb"), Err(Error::L33tTable { .. })));
        assert!(matches!(L33tTable::parse("a\t@\na\t@"), Err(Error::L33tTable { line: 2, .. })));
        assert!(L33tTable::parse("").is_err());
    }

    #[test]
    fn reverse_lookup_may_be_one_to_many() {
        let table = L33tTable::new([('l', '1'), ('i', '1')]).unwrap();
        assert_eq!(table.letters_for('1').collect::<Vec<_>>(), vec!['l', 'i']);
        assert_eq!(L33tTable::default().symbols_for('a').collect::<Vec<_>>(), vec!['@', '4']);
    }
}
