//! Five-dimension password decomposition and the composition policy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::l33t::L33tTable;
use crate::model::{Dimension, Model};

/// Upper bound on reverse-l33t interpretations scored against the model.
const MAX_INTERPRETATIONS: usize = 4096;

/// A letter of the base word rendered as a digit/symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct L33tSub {
    /// Index into the base word.
    pub position: usize,
    pub symbol: char,
    pub letter: char,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PasswordParts {
    pub prefix: String,
    pub suffix: String,
    /// Lowercased, de-l33ted middle segment.
    pub base_word: String,
    /// Sorted by position.
    pub l33t_subs: Vec<L33tSub>,
    /// Absolute indices into the base word, sorted ascending.
    pub cap_positions: Vec<usize>,
    pub raw: String,
}

impl PasswordParts {
    /// Capitalization pattern in display form: the last letter is `-1`.
    pub fn cap_display(&self) -> Vec<i64> {
        let len = self.base_word.chars().count();
        self.cap_positions.iter().map(|&p| if p > 0 && p + 1 == len { -1 } else { p as i64 }).collect()
    }

    /// Checks every structural invariant except l33t-table membership.
    pub fn check(&self) -> Result<()> {
        if self.prefix.chars().any(|c| c.is_ascii_alphabetic()) || self.suffix.chars().any(|c| c.is_ascii_alphabetic())
        {
            return Err(Error::LetterInAffix);
        }
        let base: Vec<char> = self.base_word.chars().collect();
        let mut seen = vec![false; base.len()];
        for sub in &self.l33t_subs {
            let slot = seen
                .get_mut(sub.position)
                .ok_or_else(|| Error::InvalidParts(format!("l33t position {} out of range", sub.position)))?;
            if *slot {
                return Err(Error::InvalidParts(format!("duplicate position {}", sub.position)));
            }
            *slot = true;
            if base[sub.position] != sub.letter {
                return Err(Error::InvalidParts(format!(
                    "l33t letter {:?} does not match base letter {:?} at {}",
                    sub.letter, base[sub.position], sub.position
                )));
            }
        }
        for &pos in &self.cap_positions {
            let slot =
                seen.get_mut(pos).ok_or_else(|| Error::InvalidParts(format!("capital position {pos} out of range")))?;
            if *slot {
                return Err(Error::InvalidParts(format!("position {pos} is capitalized and substituted")));
            }
            *slot = true;
            if !base[pos].is_ascii_lowercase() {
                return Err(Error::InvalidParts(format!("cannot capitalize {:?} at {pos}", base[pos])));
            }
        }
        Ok(())
    }

    /// Same invariants as [`check`](Self::check) plus table membership.
    pub fn check_with_table(&self, table: &L33tTable) -> Result<()> {
        self.check()?;
        match self.l33t_subs.iter().find(|s| !table.contains(s.letter, s.symbol)) {
            Some(s) => Err(Error::InvalidParts(format!("{}->{} is not in the l33t table", s.letter, s.symbol))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    MinLength,
    NeedsLetter,
    NeedsDigit,
    UnsupportedCharset,
}

impl Violation {
    pub fn as_str(self) -> &'static str {
        match self {
            Violation::MinLength => "min_length",
            Violation::NeedsLetter => "needs_letter",
            Violation::NeedsDigit => "needs_digit",
            Violation::UnsupportedCharset => "unsupported_charset",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyResult {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Composition rules a password must satisfy before it is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PasswordPolicy {
    pub min_length: usize,
    pub require_letter: bool,
    pub require_digit: bool,
}

impl Default for PasswordPolicy {
    fn default() -> Self {
        Self { min_length: 8, require_letter: true, require_digit: true }
    }
}

impl PasswordPolicy {
    /// Accepts everything in the supported charset.
    pub fn permissive() -> Self {
        Self { min_length: 0, require_letter: false, require_digit: false }
    }

    pub fn check(&self, password: &str) -> PolicyResult {
        let mut violations = Vec::new();
        if password.chars().count() < self.min_length {
            violations.push(Violation::MinLength);
        }
        if self.require_letter && !password.chars().any(|c| c.is_ascii_alphabetic()) {
            violations.push(Violation::NeedsLetter);
        }
        if self.require_digit && !password.chars().any(|c| c.is_ascii_digit()) {
            violations.push(Violation::NeedsDigit);
        }
        if !password.chars().all(is_supported_char) {
            violations.push(Violation::UnsupportedCharset);
        }
        PolicyResult { valid: violations.is_empty(), violations }
    }
}

/// Letters, digits and the 32 printable keyboard symbols.
pub fn is_supported_char(c: char) -> bool {
    c.is_ascii_graphic()
}

/// Digit or keyboard symbol: the prefix/suffix alphabet.
pub fn is_digit_or_symbol(c: char) -> bool {
    c.is_ascii_digit() || c.is_ascii_punctuation()
}

/// Checks `password` against the default policy (8 characters, a letter, a digit).
pub fn validate_policy(password: &str) -> PolicyResult {
    PasswordPolicy::default().check(password)
}

/// Splits a password into prefix, suffix, base word, l33t substitutions and
/// capitalization pattern.
///
/// When an interior symbol reverse-maps to several letters, the
/// interpretation whose base word is most frequent in `model` wins; without a
/// model (or on a tie) the first table entry is used.
pub fn decompose(password: &str, table: &L33tTable, model: Option<&Model>) -> PasswordParts {
    let chars: Vec<char> = password.chars().collect();
    let (Some(first), Some(last)) =
        (chars.iter().position(|c| c.is_ascii_alphabetic()), chars.iter().rposition(|c| c.is_ascii_alphabetic()))
    else {
        return PasswordParts {
            prefix: String::new(),
            suffix: String::new(),
            base_word: password.to_owned(),
            l33t_subs: Vec::new(),
            cap_positions: Vec::new(),
            raw: password.to_owned(),
        };
    };

    let mut base = Vec::with_capacity(last + 1 - first);
    let mut cap_positions = Vec::new();
    let mut l33t_subs = Vec::new();
    let mut ambiguous: Vec<(usize, Vec<char>)> = Vec::new();
    for (i, &c) in chars[first..=last].iter().enumerate() {
        if c.is_ascii_uppercase() {
            cap_positions.push(i);
            base.push(c.to_ascii_lowercase());
        } else if c.is_ascii_alphabetic() {
            base.push(c);
        } else {
            let letters: Vec<char> = table.letters_for(c).collect();
            match letters.first() {
                None => base.push(c),
                Some(&letter) => {
                    base.push(letter);
                    l33t_subs.push(L33tSub { position: i, symbol: c, letter });
                    if letters.len() > 1 {
                        ambiguous.push((i, letters));
                    }
                }
            }
        }
    }

    if let (Some(model), false) = (model, ambiguous.is_empty()) {
        resolve_ambiguity(&mut base, &ambiguous, model);
        for sub in &mut l33t_subs {
            sub.letter = base[sub.position];
        }
    }

    PasswordParts {
        prefix: chars[..first].iter().collect(),
        suffix: chars[last + 1..].iter().collect(),
        base_word: base.into_iter().collect(),
        l33t_subs,
        cap_positions,
        raw: password.to_owned(),
    }
}

/// Picks the most frequent base word among the reverse-l33t interpretations.
/// Enumeration is odometer order with the first table choice first, so ties
/// keep the earliest table entries.
fn resolve_ambiguity(base: &mut [char], ambiguous: &[(usize, Vec<char>)], model: &Model) {
    let mut budget = 1usize;
    let mut considered = 0;
    for (_, letters) in ambiguous {
        match budget.checked_mul(letters.len()) {
            Some(b) if b <= MAX_INTERPRETATIONS => {
                budget = b;
                considered += 1;
            }
            _ => break,
        }
    }
    let ambiguous = &ambiguous[..considered];

    let mut choice = vec![0usize; ambiguous.len()];
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut candidate = base.to_vec();
    loop {
        for (&(pos, ref letters), &k) in ambiguous.iter().zip(&choice) {
            candidate[pos] = letters[k];
        }
        let word: String = candidate.iter().collect();
        let count = model.count(Dimension::Base, &word);
        if best.as_ref().is_none_or(|(c, _)| count > *c) {
            best = Some((count, choice.clone()));
        }
        // odometer increment, last position fastest
        let mut idx = choice.len();
        loop {
            if idx == 0 {
                let (_, winner) = best.expect("at least one interpretation");
                for (&(pos, ref letters), &k) in ambiguous.iter().zip(&winner) {
                    base[pos] = letters[k];
                }
                return;
            }
            idx -= 1;
            choice[idx] += 1;
            if choice[idx] < ambiguous[idx].1.len() {
                break;
            }
            choice[idx] = 0;
        }
    }
}

/// Rebuilds the password string from its parts.
pub fn recompose(parts: &PasswordParts) -> Result<String> {
    parts.check()?;
    let mut middle: Vec<char> = parts.base_word.chars().collect();
    for &pos in &parts.cap_positions {
        middle[pos] = middle[pos].to_ascii_uppercase();
    }
    for sub in &parts.l33t_subs {
        middle[sub.position] = sub.symbol;
    }
    let mut out = String::with_capacity(parts.prefix.len() + middle.len() + parts.suffix.len());
    out.push_str(&parts.prefix);
    out.extend(middle);
    out.push_str(&parts.suffix);
    Ok(out)
}
