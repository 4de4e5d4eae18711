//! Candidate generation, scoring by strength and edit distance, and
//! selection of the three recommendation buttons.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::decompose::{recompose, L33tSub, PasswordParts, PasswordPolicy};
use crate::error::{Error, Result};
use crate::l33t::L33tTable;
use crate::model::Dimension;
use crate::strength::{crack_time, Thresholds, DEFAULT_CRACK_RATE};

/// Generator used for every random choice; recorded next to seeded output.
pub type DparRng = ChaCha20Rng;
pub const RNG_ALGORITHM: &str = "chacha20";

pub fn seeded_rng(seed: u64) -> DparRng {
    DparRng::seed_from_u64(seed)
}

/// The 10 digits followed by the 32 keyboard symbols, in ASCII order.
pub const DIGITS_AND_SYMBOLS: &[u8; 42] = b"0123456789!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

/// How a recommendation button is labelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Asterisks,
    NumChanges,
    HackTime,
    FeedbackOnly,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Asterisks, Variant::NumChanges, Variant::HackTime, Variant::FeedbackOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Asterisks => "asterisks",
            Variant::NumChanges => "num_changes",
            Variant::HackTime => "hack_time",
            Variant::FeedbackOnly => "feedback_only",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|v| v.as_str() == s).ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecommenderConfig {
    pub policy: PasswordPolicy,
    /// Rounds of prefix/suffix generation; each round yields three options.
    pub repeat_count: usize,
    /// Candidates below this many bits are discarded.
    pub min_strength: Option<f64>,
    /// Tie-break order among prefix, suffix, l33t and cap.
    pub dimension_priority: Vec<Dimension>,
    pub crack_rate: f64,
    pub thresholds: Thresholds,
    /// `None` draws a fresh seed from OS entropy.
    pub seed: Option<u64>,
}

impl Default for RecommenderConfig {
    fn default() -> Self {
        Self {
            policy: PasswordPolicy::default(),
            repeat_count: 4,
            min_strength: None,
            dimension_priority: vec![Dimension::Prefix, Dimension::Suffix, Dimension::L33t, Dimension::Cap],
            crack_rate: DEFAULT_CRACK_RATE,
            thresholds: Thresholds::default(),
            seed: None,
        }
    }
}

impl RecommenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repeat_count == 0 {
            return Err(Error::Config("repeat_count must be at least 1".into()));
        }
        if !(self.crack_rate.is_finite() && self.crack_rate > 0.0) {
            return Err(Error::Config("crack rate must be positive".into()));
        }
        let mut priority = self.dimension_priority.clone();
        priority.sort();
        if priority != [Dimension::Prefix, Dimension::Suffix, Dimension::L33t, Dimension::Cap] {
            return Err(Error::Config("dimension priority must be a permutation of prefix, suffix, l33t, cap".into()));
        }
        if self.thresholds.weak_max > self.thresholds.fair_max {
            return Err(Error::Config("weak threshold exceeds fair threshold".into()));
        }
        Ok(())
    }

    /// The configured seed, or one drawn from OS entropy.
    pub fn resolve_seed(&self) -> u64 {
        self.seed.unwrap_or_else(rand::random)
    }
}

/// Standard edit distance with unit-cost insert, delete and substitute.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    Keep(char),
    Substitute { from: char, to: char },
    Insert(char),
    Delete(char),
}

/// One minimal edit script from `a` to `b`, built left to right. At each
/// step the first optimal move wins in the order keep, substitute, insert,
/// delete.
pub fn edit_script(a: &str, b: &str) -> Vec<EditOp> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    // dist[i][j] = distance between a[i..] and b[j..]
    let mut dist = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            dist[i][j] = if i == n {
                m - j
            } else if j == m {
                n - i
            } else {
                let sub = dist[i + 1][j + 1] + usize::from(a[i] != b[j]);
                sub.min(dist[i][j + 1] + 1).min(dist[i + 1][j] + 1)
            };
        }
    }
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let here = dist[i][j];
        if i < n && j < m && a[i] == b[j] && dist[i + 1][j + 1] == here {
            ops.push(EditOp::Keep(a[i]));
            i += 1;
            j += 1;
        } else if i < n && j < m && dist[i + 1][j + 1] + 1 == here {
            ops.push(EditOp::Substitute { from: a[i], to: b[j] });
            i += 1;
            j += 1;
        } else if j < m && dist[i][j + 1] + 1 == here {
            ops.push(EditOp::Insert(b[j]));
            j += 1;
        } else {
            ops.push(EditOp::Delete(a[i]));
            i += 1;
        }
    }
    ops
}

/// Renders `recommended` with unchanged characters masked as `*`.
/// `mask_preview("amsterdam", "am5terDam&#") == "**5***D**&#"`.
pub fn mask_preview(original: &str, recommended: &str) -> String {
    edit_script(original, recommended)
        .into_iter()
        .filter_map(|op| match op {
            EditOp::Keep(_) => Some('*'),
            EditOp::Substitute { to, .. } => Some(to),
            EditOp::Insert(c) => Some(c),
            EditOp::Delete(_) => None,
        })
        .collect()
}

fn random_digit_or_symbol(rng: &mut impl Rng) -> char {
    DIGITS_AND_SYMBOLS[rng.gen_range(0..DIGITS_AND_SYMBOLS.len())] as char
}

/// A digit/symbol different from `current`.
fn replacement_for(current: char, rng: &mut impl Rng) -> char {
    let pool: Vec<u8> = DIGITS_AND_SYMBOLS.iter().copied().filter(|&b| b as char != current).collect();
    pool[rng.gen_range(0..pool.len())] as char
}

fn replace_at(chars: &[char], pos: usize, rng: &mut impl Rng) -> String {
    let mut out = chars.to_vec();
    out[pos] = replacement_for(out[pos], rng);
    out.into_iter().collect()
}

fn append(chars: &[char], extra: usize, rng: &mut impl Rng) -> String {
    let mut out: String = chars.iter().collect();
    out.extend((0..extra).map(|_| random_digit_or_symbol(rng)));
    out
}

/// Three modified prefixes (or suffixes) of `affix`.
///
/// * empty: random strings of length 1, 2 and 3
/// * one character: a replacement, plus one and two appended characters
/// * two characters: each character replaced in turn, plus one appended
/// * longer: three single-character replacements at random positions
pub fn generate_prefix_suffix(affix: &str, rng: &mut impl Rng) -> Result<[String; 3]> {
    if affix.chars().any(|c| c.is_ascii_alphabetic()) {
        return Err(Error::LetterInAffix);
    }
    let chars: Vec<char> = affix.chars().collect();
    Ok(match chars.len() {
        0 => [append(&[], 1, rng), append(&[], 2, rng), append(&[], 3, rng)],
        1 => [replace_at(&chars, 0, rng), append(&chars, 1, rng), append(&chars, 2, rng)],
        2 => [replace_at(&chars, 0, rng), replace_at(&chars, 1, rng), append(&chars, 1, rng)],
        n => std::array::from_fn(|_| {
            let pos = rng.gen_range(0..n);
            replace_at(&chars, pos, rng)
        }),
    })
}

fn taken_positions(len: usize, subs: &[L33tSub], caps: &[usize]) -> Vec<bool> {
    let mut taken = vec![false; len];
    for s in subs {
        if let Some(t) = taken.get_mut(s.position) {
            *t = true;
        }
    }
    for &c in caps {
        if let Some(t) = taken.get_mut(c) {
            *t = true;
        }
    }
    taken
}

/// One random l33t substitution not yet applied, or `None` when no table
/// letter is available.
///
/// The substitution is drawn uniformly among applicable table entries, then
/// uniformly among that letter's free occurrences. Only interior positions
/// of the base word are eligible: a symbol at either end would be read back
/// as part of the prefix or suffix.
pub fn generate_l33t(
    base: &str,
    subs: &[L33tSub],
    caps: &[usize],
    table: &L33tTable,
    rng: &mut impl Rng,
) -> Option<L33tSub> {
    let chars: Vec<char> = base.chars().collect();
    if chars.len() < 3 {
        return None;
    }
    let taken = taken_positions(chars.len(), subs, caps);
    let free =
        |letter: char| -> Vec<usize> { (1..chars.len() - 1).filter(|&p| chars[p] == letter && !taken[p]).collect() };
    let options: Vec<_> = table.entries().iter().filter(|e| !free(e.letter).is_empty()).collect();
    if options.is_empty() {
        return None;
    }
    let entry = options[rng.gen_range(0..options.len())];
    let positions = free(entry.letter);
    let position = positions[rng.gen_range(0..positions.len())];
    Some(L33tSub { position, symbol: entry.symbol, letter: entry.letter })
}

/// One random lowercase base-word position to capitalize, excluding
/// positions already capitalized or substituted.
pub fn generate_capitalization(base: &str, caps: &[usize], subs: &[L33tSub], rng: &mut impl Rng) -> Option<usize> {
    let chars: Vec<char> = base.chars().collect();
    let taken = taken_positions(chars.len(), subs, caps);
    let eligible: Vec<usize> = (0..chars.len()).filter(|&p| chars[p].is_ascii_lowercase() && !taken[p]).collect();
    (!eligible.is_empty()).then(|| eligible[rng.gen_range(0..eligible.len())])
}

/// Option lists per non-base dimension; index 0 is always the original.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionOptions {
    pub prefixes: Vec<String>,
    pub suffixes: Vec<String>,
    pub l33t: Vec<Vec<L33tSub>>,
    pub caps: Vec<Vec<usize>>,
}

impl DimensionOptions {
    pub fn generate(parts: &PasswordParts, table: &L33tTable, repeat_count: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut prefixes = vec![parts.prefix.clone()];
        let mut suffixes = vec![parts.suffix.clone()];
        for _ in 0..repeat_count {
            prefixes.extend(generate_prefix_suffix(&parts.prefix, rng)?);
            suffixes.extend(generate_prefix_suffix(&parts.suffix, rng)?);
        }

        let mut l33t = vec![parts.l33t_subs.clone()];
        let extra_sub = generate_l33t(&parts.base_word, &parts.l33t_subs, &parts.cap_positions, table, rng);
        if let Some(sub) = extra_sub {
            let mut with = parts.l33t_subs.clone();
            with.push(sub);
            with.sort_by_key(|s| s.position);
            l33t.push(with);
        }

        // the generated substitution is excluded too, so every combination
        // of the two option lists stays valid
        let mut blocked = parts.l33t_subs.clone();
        blocked.extend(extra_sub);
        let mut caps = vec![parts.cap_positions.clone()];
        if let Some(pos) = generate_capitalization(&parts.base_word, &parts.cap_positions, &blocked, rng) {
            let mut with = parts.cap_positions.clone();
            with.push(pos);
            with.sort_unstable();
            caps.push(with);
        }
        Ok(Self { prefixes, suffixes, l33t, caps })
    }

    pub fn combinations(&self) -> usize {
        self.prefixes.len() * self.suffixes.len() * self.l33t.len() * self.caps.len()
    }
}

/// Every combination of the option lists except the all-original one.
pub fn expand_candidates(parts: &PasswordParts, options: &DimensionOptions) -> Result<Vec<PasswordParts>> {
    let mut out = Vec::with_capacity(options.combinations().saturating_sub(1));
    for (pi, prefix) in options.prefixes.iter().enumerate() {
        for (si, suffix) in options.suffixes.iter().enumerate() {
            for (li, subs) in options.l33t.iter().enumerate() {
                for (ci, caps) in options.caps.iter().enumerate() {
                    if pi == 0 && si == 0 && li == 0 && ci == 0 {
                        continue;
                    }
                    let mut candidate = PasswordParts {
                        prefix: prefix.clone(),
                        suffix: suffix.clone(),
                        base_word: parts.base_word.clone(),
                        l33t_subs: subs.clone(),
                        cap_positions: caps.clone(),
                        raw: String::new(),
                    };
                    candidate.raw = recompose(&candidate)?;
                    out.push(candidate);
                }
            }
        }
    }
    Ok(out)
}

/// Generates the option lists and expands them into candidate parts.
pub fn generate_candidates(
    parts: &PasswordParts,
    table: &L33tTable,
    config: &RecommenderConfig,
    rng: &mut impl Rng,
) -> Result<Vec<PasswordParts>> {
    let options = DimensionOptions::generate(parts, table, config.repeat_count, rng)?;
    expand_candidates(parts, &options)
}

/// A password with its strength and distance from the original.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub parts: PasswordParts,
    pub log2p: f64,
    /// Per-dimension log2-probabilities in [`Dimension::ALL`] order.
    pub dim_log2p: [f64; 5],
    pub strength_bits: f64,
    pub ld: usize,
}

impl ScoredCandidate {
    pub fn password(&self) -> &str {
        &self.parts.raw
    }
}

/// Orders two candidates at the same distance; `Greater` means `a` wins.
///
/// Higher strength wins. Equal strength goes to the candidate whose
/// per-dimension gain over the original is larger in the first dimension
/// of `priority` where they differ, then to the smaller password bytes.
pub fn compare_candidates(
    a: &ScoredCandidate,
    b: &ScoredCandidate,
    original: &ScoredCandidate,
    priority: &[Dimension],
) -> Ordering {
    a.strength_bits
        .total_cmp(&b.strength_bits)
        .then_with(|| {
            priority
                .iter()
                .map(|d| {
                    let i = d.index();
                    let gain_a = original.dim_log2p[i] - a.dim_log2p[i];
                    let gain_b = original.dim_log2p[i] - b.dim_log2p[i];
                    gain_a.total_cmp(&gain_b)
                })
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| b.password().as_bytes().cmp(a.password().as_bytes()))
}

/// Strongest surviving candidate per edit distance.
pub type CandidateTable = BTreeMap<usize, ScoredCandidate>;

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub table: CandidateTable,
    /// At most three, strictly increasing distance.
    pub buttons: Vec<ScoredCandidate>,
}

/// Whether a candidate survives the strength and policy filters.
pub fn keeps_candidate(candidate: &ScoredCandidate, original_bits: f64, config: &RecommenderConfig) -> bool {
    candidate.ld >= 1
        && candidate.strength_bits >= original_bits
        && config.min_strength.is_none_or(|min| candidate.strength_bits >= min)
        && config.policy.check(candidate.password()).valid
}

/// Groups of distance buckets that feed the buttons: the first six buckets
/// pair up as (1st, 2nd), (3rd, 4th), (5th, 6th); with fewer buckets, as
/// many groups as possible (at most three) are formed, pairs first.
pub fn button_groups(distances: &[usize]) -> Vec<Vec<usize>> {
    let avail = &distances[..distances.len().min(6)];
    let groups = avail.len().min(3);
    let mut out = Vec::with_capacity(groups);
    let mut rest = avail;
    for g in 0..groups {
        let remaining_groups = groups - g;
        let take = if rest.len() > remaining_groups { 2 } else { 1 };
        out.push(rest[..take].to_vec());
        rest = &rest[take..];
    }
    out
}

/// Filters scored candidates, keeps the best per distance, and draws one
/// candidate per button group.
pub fn select_recommendations(
    candidates: Vec<ScoredCandidate>,
    original: &ScoredCandidate,
    config: &RecommenderConfig,
    rng: &mut impl Rng,
) -> Selection {
    let mut table = CandidateTable::new();
    for candidate in candidates {
        if !keeps_candidate(&candidate, original.strength_bits, config) {
            continue;
        }
        match table.get(&candidate.ld) {
            Some(best)
                if compare_candidates(&candidate, best, original, &config.dimension_priority) != Ordering::Greater => {}
            _ => {
                table.insert(candidate.ld, candidate);
            }
        }
    }
    let distances: Vec<usize> = table.keys().copied().collect();
    let buttons = button_groups(&distances)
        .into_iter()
        .map(|group| {
            let pick = if group.len() == 1 { 0 } else { rng.gen_range(0..group.len()) };
            table[&group[pick]].clone()
        })
        .collect();
    Selection { table, buttons }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub asterisks: String,
    pub num_changes: String,
    pub hack_time: String,
}

impl Labels {
    pub fn get(&self, variant: Variant) -> Option<&str> {
        match variant {
            Variant::Asterisks => Some(&self.asterisks),
            Variant::NumChanges => Some(&self.num_changes),
            Variant::HackTime => Some(&self.hack_time),
            Variant::FeedbackOnly => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub password: String,
    pub parts: PasswordParts,
    pub strength_bits: f64,
    pub ld: usize,
    pub mask_preview: String,
    pub crack_seconds: f64,
    pub crack_human: String,
    pub labels: Labels,
}

impl Recommendation {
    pub fn from_candidate(original: &str, candidate: ScoredCandidate, crack_rate: f64) -> Self {
        let mask = mask_preview(original, candidate.password());
        let (crack_seconds, crack_human) = crack_time(candidate.strength_bits, crack_rate);
        let num_changes = match candidate.ld {
            1 => "1 change".to_owned(),
            n => format!("{n} changes"),
        };
        Self {
            password: candidate.parts.raw.clone(),
            labels: Labels { asterisks: mask.clone(), num_changes, hack_time: crack_human.clone() },
            parts: candidate.parts,
            strength_bits: candidate.strength_bits,
            ld: candidate.ld,
            mask_preview: mask,
            crack_seconds,
            crack_human,
        }
    }
}
