//! Per-dimension frequency tables, training, and the model file format.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decompose::{decompose, is_supported_char, PasswordParts};
use crate::error::{Error, Result};
use crate::l33t::L33tTable;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "DPAR-MODEL";

/// Default histogram bin width in bits.
pub const DEFAULT_BIN_WIDTH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Prefix,
    Suffix,
    Base,
    L33t,
    Cap,
}

impl Dimension {
    /// File and storage order.
    pub const ALL: [Dimension; 5] =
        [Dimension::Prefix, Dimension::Suffix, Dimension::Base, Dimension::L33t, Dimension::Cap];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Prefix => "prefix",
            Dimension::Suffix => "suffix",
            Dimension::Base => "base",
            Dimension::L33t => "l33t",
            Dimension::Cap => "cap",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == name)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The model-table key of each dimension for one password.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionKeys {
    keys: [String; 5],
}

impl DimensionKeys {
    /// l33t key: distinct substitutions in table order, symbols joined by
    /// `,` (so `P@ssw0rd` gives `@,0`). Cap key: display positions joined
    /// by `,` (`0,-1`).
    pub fn from_parts(parts: &PasswordParts, table: &L33tTable) -> Self {
        let mut subs: Vec<(usize, char)> = parts
            .l33t_subs
            .iter()
            .map(|s| (table.index_of(s.letter, s.symbol).unwrap_or(usize::MAX), s.symbol))
            .collect();
        subs.sort_unstable();
        subs.dedup();
        let l33t = join(subs.iter().map(|(_, s)| s));
        let cap = join(parts.cap_display());
        Self { keys: [parts.prefix.clone(), parts.suffix.clone(), parts.base_word.clone(), l33t, cap] }
    }

    pub fn get(&self, dim: Dimension) -> &str {
        &self.keys[dim.index()]
    }
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionTable {
    pub dimension: Dimension,
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl DimensionTable {
    pub fn new(dimension: Dimension) -> Self {
        Self { dimension, counts: BTreeMap::new(), total: 0 }
    }

    pub fn from_counts(dimension: Dimension, counts: impl IntoIterator<Item = (String, u64)>) -> Self {
        let mut table = Self::new(dimension);
        for (key, count) in counts {
            table.add(&key, count);
        }
        table
    }

    pub fn add(&mut self, key: &str, count: u64) {
        if count == 0 {
            return;
        }
        match self.counts.get_mut(key) {
            Some(c) => *c += count,
            None => {
                self.counts.insert(key.to_owned(), count);
            }
        }
        self.total += count;
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Keys in byte order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &c)| (k.as_str(), c))
    }

    /// Smoothed probability of an unseen key: `1 / (2 * total)`.
    pub fn floor_log2p(&self) -> f64 {
        -((2 * self.total) as f64).log2()
    }

    pub fn log2p(&self, key: &str) -> f64 {
        match self.counts.get(key) {
            Some(&c) => (c as f64).log2() - (self.total as f64).log2(),
            None => self.floor_log2p(),
        }
    }

    fn prune(&mut self, min_count: u64) {
        self.counts.retain(|_, c| *c >= min_count);
        self.total = self.counts.values().sum();
    }
}

/// Keys per bin of `-log2 p`, including one smoothed pseudo-key, together
/// with the sum of `-log2 p` of the keys in each bin.
#[derive(Debug, Clone, PartialEq)]
pub struct LogHistogram {
    pub bin_width: f64,
    pub bins: Vec<f64>,
    pub sums: Vec<f64>,
}

impl LogHistogram {
    pub fn bin_of(bin_width: f64, log2p: f64) -> usize {
        let x = (-log2p).max(0.0) / bin_width;
        x.floor() as usize
    }

    pub fn from_table(table: &DimensionTable, bin_width: f64) -> Self {
        let len = Self::bin_of(bin_width, table.floor_log2p()) + 1;
        let mut hist = Self { bin_width, bins: vec![0.0; len], sums: vec![0.0; len] };
        for (key, _) in table.iter() {
            hist.insert(table.log2p(key));
        }
        hist.insert(table.floor_log2p());
        hist
    }

    fn insert(&mut self, log2p: f64) {
        let bin = Self::bin_of(self.bin_width, log2p);
        self.bins[bin] += 1.0;
        self.sums[bin] += -log2p;
    }

    pub fn mass(&self) -> f64 {
        self.bins.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub corpus_lines: u64,
    pub l33t_hash: String,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    tables: [DimensionTable; 5],
    histograms: [LogHistogram; 5],
    meta: ModelMeta,
}

impl Model {
    pub fn from_tables(tables: [DimensionTable; 5], meta: ModelMeta) -> Result<Self> {
        Self::from_tables_with_bin_width(tables, meta, DEFAULT_BIN_WIDTH)
    }

    pub fn from_tables_with_bin_width(tables: [DimensionTable; 5], meta: ModelMeta, bin_width: f64) -> Result<Self> {
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return Err(Error::Config(format!("bin width must be positive, got {bin_width}")));
        }
        for (dim, table) in Dimension::ALL.iter().zip(&tables) {
            if table.dimension != *dim {
                return Err(Error::Config(format!("table for {} stored in {} slot", table.dimension, dim)));
            }
            if table.total == 0 {
                return Err(Error::Config(format!("{dim} table is empty")));
            }
        }
        let histograms = tables.each_ref().map(|t| LogHistogram::from_table(t, bin_width));
        Ok(Self { tables, histograms, meta })
    }

    /// Same tables, histograms rebuilt at a different bin width.
    pub fn with_bin_width(&self, bin_width: f64) -> Result<Self> {
        Self::from_tables_with_bin_width(self.tables.clone(), self.meta.clone(), bin_width)
    }

    pub fn table(&self, dim: Dimension) -> &DimensionTable {
        &self.tables[dim.index()]
    }

    pub fn tables(&self) -> &[DimensionTable; 5] {
        &self.tables
    }

    pub fn histogram(&self, dim: Dimension) -> &LogHistogram {
        &self.histograms[dim.index()]
    }

    pub fn bin_width(&self) -> f64 {
        self.histograms[0].bin_width
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    pub fn count(&self, dim: Dimension, key: &str) -> u64 {
        self.table(dim).count(key)
    }

    /// Fails unless the model was trained with `table`.
    pub fn check_l33t_table(&self, table: &L33tTable) -> Result<()> {
        let actual = table.hash_hex();
        if actual != self.meta.l33t_hash {
            return Err(Error::L33tMismatch { expected: self.meta.l33t_hash.clone(), actual });
        }
        Ok(())
    }
}

/// log2-probability of `key` in one dimension, with the smoothing floor for
/// unseen keys.
pub fn dim_log2p(model: &Model, dim: Dimension, key: &str) -> f64 {
    model.table(dim).log2p(key)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainOptions {
    /// Base words seen fewer times are dropped.
    pub min_count: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { min_count: 1 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrainStats {
    /// Accepted corpus lines.
    pub lines: u64,
    /// Lines that were unreadable, empty, malformed, or outside the charset.
    pub skipped: u64,
}

/// Trains a model from an iterator of corpus lines. Each line is a password,
/// optionally followed by `<TAB>count`. `Err` items count as skipped lines.
pub fn train<I>(lines: I, table: &L33tTable, options: &TrainOptions) -> Result<Model>
where
    I: IntoIterator<Item = io::Result<String>>,
{
    train_with_stats(lines, table, options).map(|(m, _)| m)
}

pub fn train_with_stats<I>(lines: I, table: &L33tTable, options: &TrainOptions) -> Result<(Model, TrainStats)>
where
    I: IntoIterator<Item = io::Result<String>>,
{
    let mut tables = Dimension::ALL.map(DimensionTable::new);
    let mut stats = TrainStats::default();
    for line in lines {
        let line = line.ok();
        let Some((password, count)) = line.as_deref().and_then(parse_corpus_line) else {
            stats.skipped += 1;
            continue;
        };
        let parts = decompose(password, table, None);
        let keys = DimensionKeys::from_parts(&parts, table);
        for dim in Dimension::ALL {
            tables[dim.index()].add(keys.get(dim), count);
        }
        stats.lines += 1;
    }
    if stats.lines == 0 {
        return Err(Error::EmptyCorpus { skipped: stats.skipped });
    }
    if options.min_count > 1 {
        tables[Dimension::Base.index()].prune(options.min_count);
        if tables[Dimension::Base.index()].total == 0 {
            return Err(Error::Config(format!("min_count {} removed every base word", options.min_count)));
        }
    }
    let meta = ModelMeta { corpus_lines: stats.lines, l33t_hash: table.hash_hex(), format_version: FORMAT_VERSION };
    Ok((Model::from_tables(tables, meta)?, stats))
}

/// Trains from a byte stream, treating invalid UTF-8 lines as skipped.
pub fn train_reader(reader: impl BufRead, table: &L33tTable, options: &TrainOptions) -> Result<(Model, TrainStats)> {
    let mut io_error = None;
    let lines = ByteLines { reader, io_error: &mut io_error };
    let result = train_with_stats(lines, table, options);
    match io_error {
        Some(e) => Err(Error::Io(e)),
        None => result,
    }
}

struct ByteLines<'a, R> {
    reader: R,
    io_error: &'a mut Option<io::Error>,
}

impl<R: BufRead> Iterator for ByteLines<'_, R> {
    type Item = io::Result<String>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut buf = Vec::new();
        match self.reader.read_until(b'\n', &mut buf) {
            Ok(0) => None,
            Ok(_) => {
                if buf.last() == Some(&b'\n') {
                    buf.pop();
                }
                Some(String::from_utf8(buf).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)))
            }
            Err(e) => {
                *self.io_error = Some(e);
                None
            }
        }
    }
}

fn parse_corpus_line(line: &str) -> Option<(&str, u64)> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let (password, count) = match line.rsplit_once('\t') {
        Some((pw, count)) => (pw, count.parse::<u64>().ok().filter(|&c| c > 0)?),
        None => (line, 1),
    };
    (!password.is_empty() && password.chars().all(is_supported_char)).then_some((password, count))
}

fn escape_key(key: &str) -> String {
    if key.is_empty() {
        return "\\e".to_owned();
    }
    let mut out = String::with_capacity(key.len());
    for c in key.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

fn unescape_key(field: &str) -> Option<String> {
    if field == "\\e" {
        return Some(String::new());
    }
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            't' => out.push('\t'),
            'n' => out.push('\n'),
            _ => return None,
        }
    }
    (!out.is_empty()).then_some(out)
}

pub fn write_model(model: &Model, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{MAGIC} {FORMAT_VERSION}")?;
    writeln!(out, "meta\tcorpus_lines={}\tl33t_hash={}", model.meta.corpus_lines, model.meta.l33t_hash)?;
    for table in &model.tables {
        writeln!(out, "[{}] {} {}", table.dimension, table.len(), table.total)?;
        for (key, count) in table.iter() {
            writeln!(out, "{}\t{}", escape_key(key), count)?;
        }
    }
    out.flush()
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_model(model, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    parse_model(&fs::read(path)?)
}

/// Parses the text model format. Any deviation (bad magic, wrong version,
/// count mismatch, unsorted keys, trailing data) is rejected.
pub fn parse_model(bytes: &[u8]) -> Result<Model> {
    let text = std::str::from_utf8(bytes).map_err(|_| format_err(0, "model file is not UTF-8"))?;
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(format_err(0, "model file is truncated (missing final newline)"));
    }
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (n, header) = lines.next().ok_or_else(|| format_err(1, "empty model file"))?;
    match header.split_once(' ') {
        Some((MAGIC, version)) if version == FORMAT_VERSION.to_string() => {}
        Some((MAGIC, version)) => {
            return Err(format_err(n, &format!("unsupported format version {version}, expected {FORMAT_VERSION}")))
        }
        _ => return Err(format_err(n, "missing DPAR-MODEL header")),
    }

    let (n, meta_line) = lines.next().ok_or_else(|| format_err(2, "missing meta line"))?;
    let meta = parse_meta(meta_line).ok_or_else(|| format_err(n, "malformed meta line"))?;

    let mut tables = Vec::with_capacity(5);
    for dim in Dimension::ALL {
        let (n, section) = lines.next().ok_or_else(|| format_err(0, &format!("missing [{dim}] section")))?;
        let (entries, total) = parse_section_header(section, dim)
            .ok_or_else(|| format_err(n, &format!("expected [{dim}] section header")))?;
        let mut counts = BTreeMap::new();
        let mut sum = 0u64;
        let mut previous: Option<String> = None;
        for _ in 0..entries {
            let (n, line) = lines.next().ok_or_else(|| format_err(0, &format!("[{dim}] section ends early")))?;
            let (key, count) = line.split_once('\t').ok_or_else(|| format_err(n, "expected key<TAB>count"))?;
            let key = unescape_key(key).ok_or_else(|| format_err(n, "bad key escape"))?;
            let count: u64 = count
                .parse()
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| format_err(n, "count must be a positive integer"))?;
            if previous.as_ref().is_some_and(|p| p.as_bytes() >= key.as_bytes()) {
                return Err(format_err(n, "keys are not strictly sorted"));
            }
            sum = sum.checked_add(count).ok_or_else(|| format_err(n, "total overflows"))?;
            previous = Some(key.clone());
            counts.insert(key, count);
        }
        if sum != total {
            return Err(format_err(n, &format!("[{dim}] counts sum to {sum}, header says {total}")));
        }
        tables.push(DimensionTable { dimension: dim, counts, total });
    }
    if let Some((n, _)) = lines.next() {
        return Err(format_err(n, "unexpected data after last section"));
    }
    let tables: [DimensionTable; 5] = tables.try_into().expect("five sections parsed");
    Model::from_tables(tables, meta)
}

fn parse_meta(line: &str) -> Option<ModelMeta> {
    let mut fields = line.split('\t');
    if fields.next()? != "meta" {
        return None;
    }
    let corpus_lines = fields.next()?.strip_prefix("corpus_lines=")?.parse().ok()?;
    let l33t_hash = fields.next()?.strip_prefix("l33t_hash=")?;
    if fields.next().is_some() || l33t_hash.is_empty() || !l33t_hash.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    Some(ModelMeta { corpus_lines, l33t_hash: l33t_hash.to_owned(), format_version: FORMAT_VERSION })
}

fn parse_section_header(line: &str, dim: Dimension) -> Option<(usize, u64)> {
    let rest = line.strip_prefix('[')?.strip_prefix(dim.name())?.strip_prefix("] ")?;
    let (entries, total) = rest.split_once(' ')?;
    Some((entries.parse().ok()?, total.parse().ok()?))
}

fn format_err(line: usize, reason: &str) -> Error {
    Error::ModelFormat { line, reason: reason.to_owned() }
}
