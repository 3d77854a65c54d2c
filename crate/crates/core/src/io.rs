//! Line-oriented text formats for datasets, pattern sets, planted truth and
//! run reports.
//!
//! Every file starts with `#format 1` followed by the schema as `#attr` lines:
//!
//! ```text
//! #format 1
//! #attr Tech: Push,Attack,Smash
//! #attr Spin: Topspin,No spin
//! Push,No spin;Attack,Topspin
//! Smash,Topspin
//! ```
//!
//! Dataset bodies hold one sequence per line, events separated by `;` and
//! values by `,` in attribute order. Pattern bodies hold blocks opened by
//! `#pattern <id> [usage=N] [support=N]`, one row per event with `*` for an
//! empty slot, optional `#occurrence` and `#miss` lines, and a closing `#end`.
//! Other lines starting with `#` are comments; blank lines are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::miner::{MiningReport, MiningResult};
use crate::model::{Event, EventDataset, Pattern, Schema, ValueId};
use crate::synth::{PlantedMiss, PlantedOccurrence, PlantedTruth};

pub const FORMAT_VERSION: u32 = 1;

const EMPTY_SLOT: &str = "*";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Position-aware error builder for one input file.
struct Source<'a> {
    path: &'a Path,
}

impl Source<'_> {
    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            column,
            message: message.into(),
        }
    }
}

/// A trimmed piece of a line with its 1-based column.
#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn split<'a>(text: &'a str, column: usize, sep: char) -> Vec<Token<'a>> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in text.split(sep) {
        let lead = piece.len() - piece.trim_start().len();
        out.push(Token {
            text: piece.trim(),
            column: column + text[..start].chars().count() + piece[..lead].chars().count(),
        });
        start += piece.len() + sep.len_utf8();
    }
    out
}

fn check_name(kind: &str, name: &str) -> Result<()> {
    let bad = name.is_empty()
        || name != name.trim()
        || name == EMPTY_SLOT
        || name.starts_with('#')
        || name.contains([',', ';', ':', '=', '\n', '\r', '\t']);
    if bad {
        return Err(Error::InvalidInput(format!(
            "{kind} name `{name}` cannot be written in the text format"
        )));
    }
    Ok(())
}

fn check_schema(schema: &Schema) -> Result<()> {
    for attr in schema.attributes() {
        check_name("attribute", attr.name())?;
        for v in attr.values() {
            check_name("value", v)?;
        }
    }
    Ok(())
}

fn write_header(out: &mut String, schema: &Schema) {
    let _ = writeln!(out, "#format {FORMAT_VERSION}");
    for attr in schema.attributes() {
        let _ = writeln!(out, "#attr {}: {}", attr.name(), attr.values().join(","));
    }
}

/// Numbered non-blank lines after the header, plus the schema.
struct Body<'a> {
    schema: Schema,
    lines: Vec<(usize, &'a str)>,
}

fn parse_header<'a>(src: &Source, text: &'a str) -> Result<Body<'a>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();
    let Some((n, first)) = lines.next() else {
        return Err(src.err(1, 1, "empty file"));
    };
    let version = first
        .strip_prefix("#format")
        .ok_or_else(|| src.err(n, 1, "expected `#format 1` as the first line"))?
        .trim();
    if version != FORMAT_VERSION.to_string() {
        return Err(src.err(n, 9, format!("unsupported format version `{version}`")));
    }

    let mut attrs: Vec<(String, Vec<String>)> = Vec::new();
    while let Some(&(n, line)) = lines.peek() {
        let Some(rest) = line.strip_prefix("#attr") else {
            if line.starts_with('#') && !is_directive(line) {
                lines.next();
                continue;
            }
            break;
        };
        lines.next();
        let Some((name, values)) = rest.split_once(':') else {
            return Err(src.err(n, 1, "attribute line needs `name: v1,v2,...`"));
        };
        let name = name.trim();
        if name.is_empty() {
            return Err(src.err(n, 6, "attribute name is empty"));
        }
        let values_col = 6 + rest[..rest.find(':').unwrap_or(0)].chars().count() + 1;
        let mut list = Vec::new();
        for tok in split(values, values_col, ',') {
            if tok.text.is_empty() {
                return Err(src.err(n, tok.column, "empty value name"));
            }
            if tok.text == EMPTY_SLOT {
                return Err(src.err(n, tok.column, "`*` is reserved for empty slots"));
            }
            list.push(tok.text.to_string());
        }
        attrs.push((name.to_string(), list));
    }
    if attrs.is_empty() {
        let line = lines.peek().map_or(n + 1, |&(l, _)| l);
        return Err(src.err(line, 1, "missing `#attr` schema lines"));
    }
    let schema = Schema::new(attrs).map_err(|e| src.err(n, 1, e.to_string()))?;
    Ok(Body {
        schema,
        lines: lines.collect(),
    })
}

fn is_directive(line: &str) -> bool {
    [
        "#format",
        "#attr",
        "#pattern",
        "#end",
        "#miss",
        "#occurrence",
        "#dl",
    ]
    .iter()
    .any(|d| {
        line.strip_prefix(d)
            .is_some_and(|r| r.is_empty() || r.starts_with(char::is_whitespace))
    })
}

/// Parses one event row. `allow_empty` admits `*` slots (pattern rows).
fn parse_event(
    src: &Source,
    schema: &Schema,
    n: usize,
    tok: Token,
    allow_empty: bool,
) -> Result<Event> {
    let values = split(tok.text, tok.column, ',');
    if values.len() != schema.arity() {
        return Err(src.err(
            n,
            tok.column,
            format!(
                "event has {} values, schema has {} attributes",
                values.len(),
                schema.arity()
            ),
        ));
    }
    let mut slots = Vec::with_capacity(values.len());
    for (k, v) in values.iter().enumerate() {
        if allow_empty && v.text == EMPTY_SLOT {
            slots.push(None);
            continue;
        }
        let id = schema.value_id(k, v.text).ok_or_else(|| {
            src.err(
                n,
                v.column,
                format!(
                    "unknown value `{}` for attribute `{}`",
                    v.text,
                    schema.attribute(k).name()
                ),
            )
        })?;
        slots.push(Some(id));
    }
    Ok(Event::new(slots))
}

fn format_event(schema: &Schema, event: &Event) -> String {
    event
        .slots()
        .iter()
        .enumerate()
        .map(|(k, v)| v.map_or(EMPTY_SLOT, |v| schema.value_name(k, v)))
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses dataset text; `path` only labels diagnostics.
pub fn parse_dataset_str(text: &str, path: &Path) -> Result<EventDataset> {
    let src = Source { path };
    let body = parse_header(&src, text)?;
    let mut sequences = Vec::new();
    for &(n, line) in &body.lines {
        if line.starts_with('#') {
            if is_directive(line) {
                return Err(src.err(n, 1, "unexpected directive in a dataset body"));
            }
            continue;
        }
        let mut seq = Vec::new();
        for tok in split(line, 1, ';') {
            if tok.text.is_empty() {
                return Err(src.err(n, tok.column, "empty event"));
            }
            seq.push(parse_event(&src, &body.schema, n, tok, false)?);
        }
        sequences.push(seq);
    }
    if sequences.is_empty() {
        let line = text.lines().count().max(1);
        return Err(src.err(line, 1, "dataset has no sequences"));
    }
    EventDataset::new(body.schema, sequences)
}

pub fn parse_dataset(path: &Path) -> Result<EventDataset> {
    parse_dataset_str(&read(path)?, path)
}

pub fn format_dataset(data: &EventDataset) -> Result<String> {
    check_schema(data.schema())?;
    let mut out = String::new();
    write_header(&mut out, data.schema());
    for seq in data.sequences() {
        let row: Vec<String> = seq.iter().map(|e| format_event(data.schema(), e)).collect();
        let _ = writeln!(out, "{}", row.join(";"));
    }
    Ok(out)
}

pub fn write_dataset(data: &EventDataset, path: &Path) -> Result<()> {
    write(path, &format_dataset(data)?)
}

/// A miss location, optionally with the value found in the data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissRecord {
    pub sequence: usize,
    pub event: usize,
    pub attribute: usize,
    pub value: Option<ValueId>,
}

/// One pattern block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternRecord {
    pub id: u32,
    pub pattern: Pattern,
    pub usage: Option<u64>,
    pub support: Option<u64>,
    /// `(sequence, events)` of each occurrence, when recorded.
    pub occurrences: Vec<(usize, Vec<usize>)>,
    pub misses: Vec<MissRecord>,
}

impl PatternRecord {
    pub fn new(id: u32, pattern: Pattern) -> Self {
        PatternRecord {
            id,
            pattern,
            usage: None,
            support: None,
            occurrences: Vec::new(),
            misses: Vec::new(),
        }
    }
}

/// A pattern set with its schema and optional description lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternFile {
    pub schema: Schema,
    pub records: Vec<PatternRecord>,
    pub baseline: Option<f64>,
    pub total: Option<f64>,
}

impl PatternFile {
    pub fn new(schema: Schema) -> Self {
        PatternFile {
            schema,
            records: Vec::new(),
            baseline: None,
            total: None,
        }
    }

    /// Mined patterns in table order with usage, support and final-cover misses.
    pub fn from_mining(schema: &Schema, result: &MiningResult) -> Self {
        let mut file = PatternFile::new(schema.clone());
        file.baseline = Some(result.report.baseline);
        file.total = Some(result.report.final_total);
        for entry in result.table.entries() {
            let mut rec = PatternRecord::new(entry.id.0, entry.pattern.clone());
            rec.usage = Some(entry.stats.usage);
            rec.support = Some(entry.support);
            for (seq, cover) in result.covers.iter().enumerate() {
                for (id, (e, k)) in cover.misses() {
                    if id == entry.id {
                        rec.misses.push(MissRecord {
                            sequence: seq,
                            event: e,
                            attribute: k,
                            value: None,
                        });
                    }
                }
            }
            file.records.push(rec);
        }
        file
    }

    pub fn from_truth(schema: &Schema, truth: &PlantedTruth) -> Self {
        let mut file = PatternFile::new(schema.clone());
        for (i, p) in truth.patterns.iter().enumerate() {
            let mut rec = PatternRecord::new(i as u32, p.clone());
            rec.occurrences = truth
                .occurrences
                .iter()
                .filter(|o| o.pattern == i)
                .map(|o| (o.sequence, o.events.clone()))
                .collect();
            rec.misses = truth
                .misses
                .iter()
                .filter(|m| m.pattern == i)
                .map(|m| MissRecord {
                    sequence: m.sequence,
                    event: m.event,
                    attribute: m.attribute,
                    value: Some(m.value),
                })
                .collect();
            file.records.push(rec);
        }
        file
    }

    /// Rebuilds planted truth; every miss must carry its value.
    pub fn to_truth(&self) -> Result<PlantedTruth> {
        let mut truth = PlantedTruth::default();
        for (i, rec) in self.records.iter().enumerate() {
            truth.patterns.push(rec.pattern.clone());
            for (sequence, events) in &rec.occurrences {
                truth.occurrences.push(PlantedOccurrence {
                    pattern: i,
                    sequence: *sequence,
                    events: events.clone(),
                });
            }
            for m in &rec.misses {
                let value = m.value.ok_or_else(|| {
                    Error::InvalidInput(format!("truth miss in pattern {} lacks a value", rec.id))
                })?;
                truth.misses.push(PlantedMiss {
                    pattern: i,
                    sequence: m.sequence,
                    event: m.event,
                    attribute: m.attribute,
                    value,
                });
            }
        }
        Ok(truth)
    }

    pub fn patterns(&self) -> Vec<Pattern> {
        self.records.iter().map(|r| r.pattern.clone()).collect()
    }

    /// `(sequence, event, attribute)` of every recorded miss.
    pub fn miss_cells(&self) -> BTreeSet<(usize, usize, usize)> {
        self.records
            .iter()
            .flat_map(|r| r.misses.iter().map(|m| (m.sequence, m.event, m.attribute)))
            .collect()
    }
}

fn parse_count(src: &Source, n: usize, tok: Token, key: &str, value: &str) -> Result<u64> {
    value.parse().map_err(|_| {
        src.err(
            n,
            tok.column,
            format!("`{key}` needs a non-negative integer"),
        )
    })
}

fn parse_index(src: &Source, n: usize, tok: Token, key: &str, value: &str) -> Result<usize> {
    parse_count(src, n, tok, key, value).map(|v| v as usize)
}

// Whitespace-separated `key=value` fields; a word without `=` continues the
// previous value, so value names may contain spaces.
fn fields<'a>(rest: &'a str, column: usize) -> Vec<Token<'a>> {
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut offset = 0;
    for piece in rest.split_whitespace() {
        let at = rest[offset..].find(piece).map_or(offset, |i| offset + i);
        let end = at + piece.len();
        match spans.last_mut() {
            Some(last) if !piece.contains('=') && rest[last.0..last.1].contains('=') => {
                last.1 = end
            }
            _ => spans.push((at, end)),
        }
        offset = end;
    }
    spans
        .into_iter()
        .map(|(a, b)| Token {
            text: &rest[a..b],
            column: column + rest[..a].chars().count(),
        })
        .collect()
}

fn key_value<'a>(src: &Source, n: usize, tok: Token<'a>) -> Result<(&'a str, &'a str)> {
    tok.text.split_once('=').ok_or_else(|| {
        src.err(
            n,
            tok.column,
            format!("expected key=value, found `{}`", tok.text),
        )
    })
}

fn parse_attr(src: &Source, schema: &Schema, n: usize, tok: Token, name: &str) -> Result<usize> {
    schema
        .attribute_index(name)
        .ok_or_else(|| src.err(n, tok.column, format!("unknown attribute `{name}`")))
}

fn parse_miss(src: &Source, schema: &Schema, n: usize, rest: &str) -> Result<MissRecord> {
    let (mut seq, mut event, mut attr, mut value_tok) = (None, None, None, None);
    for tok in fields(rest, 6) {
        let (key, value) = key_value(src, n, tok)?;
        match key {
            "seq" => seq = Some(parse_index(src, n, tok, key, value)?),
            "event" => event = Some(parse_index(src, n, tok, key, value)?),
            "attr" => attr = Some(parse_attr(src, schema, n, tok, value)?),
            "value" => value_tok = Some((tok, value)),
            _ => return Err(src.err(n, tok.column, format!("unknown miss field `{key}`"))),
        }
    }
    let (Some(sequence), Some(event), Some(attribute)) = (seq, event, attr) else {
        return Err(src.err(n, 1, "miss needs seq=, event= and attr="));
    };
    let value = match value_tok {
        None => None,
        Some((tok, name)) => Some(schema.value_id(attribute, name).ok_or_else(|| {
            src.err(
                n,
                tok.column,
                format!("unknown value `{name}` for the missed attribute"),
            )
        })?),
    };
    Ok(MissRecord {
        sequence,
        event,
        attribute,
        value,
    })
}

fn parse_occurrence(src: &Source, n: usize, rest: &str) -> Result<(usize, Vec<usize>)> {
    let (mut seq, mut events) = (None, None);
    for tok in fields(rest, 12) {
        let (key, value) = key_value(src, n, tok)?;
        match key {
            "seq" => seq = Some(parse_index(src, n, tok, key, value)?),
            "events" => {
                events = Some(
                    value
                        .split(',')
                        .map(|e| parse_index(src, n, tok, key, e))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            _ => return Err(src.err(n, tok.column, format!("unknown occurrence field `{key}`"))),
        }
    }
    match (seq, events) {
        (Some(s), Some(e)) => Ok((s, e)),
        _ => Err(src.err(n, 1, "occurrence needs seq= and events=")),
    }
}

fn parse_float(src: &Source, n: usize, tok: Token, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| src.err(n, tok.column, format!("`{value}` is not a finite number")))
}

pub fn parse_patterns_str(text: &str, path: &Path) -> Result<PatternFile> {
    let src = Source { path };
    let body = parse_header(&src, text)?;
    let schema = body.schema;
    let mut file = PatternFile::new(schema.clone());
    let mut open: Option<(usize, PatternRecord, Vec<Event>)> = None;
    let mut ids = BTreeSet::new();

    for &(n, line) in &body.lines {
        if let Some(rest) = line.strip_prefix("#pattern") {
            if open.is_some() {
                return Err(src.err(n, 1, "previous pattern block lacks `#end`"));
            }
            let toks = fields(rest, 9);
            let Some(&id_tok) = toks.first() else {
                return Err(src.err(n, 1, "pattern block needs an id"));
            };
            let id: u32 = id_tok
                .text
                .parse()
                .map_err(|_| src.err(n, id_tok.column, "pattern id must be an integer"))?;
            if !ids.insert(id) {
                return Err(src.err(n, id_tok.column, format!("duplicate pattern id {id}")));
            }
            let mut rec = PatternRecord::new(id, Pattern::singleton(1, 0, ValueId(0)));
            for &tok in &toks[1..] {
                let (key, value) = key_value(&src, n, tok)?;
                match key {
                    "usage" => rec.usage = Some(parse_count(&src, n, tok, key, value)?),
                    "support" => rec.support = Some(parse_count(&src, n, tok, key, value)?),
                    _ => {
                        return Err(src.err(
                            n,
                            tok.column,
                            format!("unknown pattern field `{key}`"),
                        ))
                    }
                }
            }
            open = Some((n, rec, Vec::new()));
        } else if line
            .strip_prefix("#end")
            .is_some_and(|r| r.trim().is_empty())
        {
            let Some((start, mut rec, events)) = open.take() else {
                return Err(src.err(n, 1, "`#end` without an open pattern"));
            };
            rec.pattern = Pattern::new(events).map_err(|e| src.err(start, 1, e.to_string()))?;
            file.records.push(rec);
        } else if let Some(rest) = line.strip_prefix("#miss") {
            let Some((_, rec, _)) = open.as_mut() else {
                return Err(src.err(n, 1, "`#miss` outside a pattern block"));
            };
            rec.misses.push(parse_miss(&src, &schema, n, rest)?);
        } else if let Some(rest) = line.strip_prefix("#occurrence") {
            let Some((_, rec, _)) = open.as_mut() else {
                return Err(src.err(n, 1, "`#occurrence` outside a pattern block"));
            };
            rec.occurrences.push(parse_occurrence(&src, n, rest)?);
        } else if let Some(rest) = line.strip_prefix("#dl") {
            for tok in fields(rest, 4) {
                let (key, value) = key_value(&src, n, tok)?;
                match key {
                    "baseline" => file.baseline = Some(parse_float(&src, n, tok, value)?),
                    "total" => file.total = Some(parse_float(&src, n, tok, value)?),
                    _ => return Err(src.err(n, tok.column, format!("unknown dl field `{key}`"))),
                }
            }
        } else if line.starts_with('#') {
            if is_directive(line) {
                return Err(src.err(n, 1, "unexpected directive"));
            }
        } else {
            let Some((_, _, events)) = open.as_mut() else {
                return Err(src.err(n, 1, "event row outside a pattern block"));
            };
            let tok = Token {
                text: line,
                column: 1,
            };
            events.push(parse_event(&src, &schema, n, tok, true)?);
        }
    }
    if let Some((start, _, _)) = open {
        return Err(src.err(start, 1, "pattern block lacks `#end`"));
    }
    Ok(file)
}

pub fn parse_patterns(path: &Path) -> Result<PatternFile> {
    parse_patterns_str(&read(path)?, path)
}

pub fn format_patterns(file: &PatternFile) -> Result<String> {
    check_schema(&file.schema)?;
    let schema = &file.schema;
    let mut out = String::new();
    write_header(&mut out, schema);
    if file.baseline.is_some() || file.total.is_some() {
        out.push_str("#dl");
        if let Some(b) = file.baseline {
            let _ = write!(out, " baseline={b}");
        }
        if let Some(t) = file.total {
            let _ = write!(out, " total={t}");
        }
        out.push('\n');
    }
    for rec in &file.records {
        if rec.pattern.arity() != schema.arity() {
            return Err(Error::InvalidInput(format!(
                "pattern {} has arity {}, schema has {}",
                rec.id,
                rec.pattern.arity(),
                schema.arity()
            )));
        }
        let _ = write!(out, "#pattern {}", rec.id);
        if let Some(u) = rec.usage {
            let _ = write!(out, " usage={u}");
        }
        if let Some(s) = rec.support {
            let _ = write!(out, " support={s}");
        }
        out.push('\n');
        for e in rec.pattern.events() {
            let _ = writeln!(out, "{}", format_event(schema, e));
        }
        for (seq, events) in &rec.occurrences {
            let list: Vec<String> = events.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "#occurrence seq={seq} events={}", list.join(","));
        }
        for m in &rec.misses {
            let _ = write!(
                out,
                "#miss seq={} event={} attr={}",
                m.sequence,
                m.event,
                schema.attribute(m.attribute).name()
            );
            if let Some(v) = m.value {
                let _ = write!(out, " value={}", schema.value_name(m.attribute, v));
            }
            out.push('\n');
        }
        out.push_str("#end\n");
    }
    Ok(out)
}

pub fn write_patterns(file: &PatternFile, path: &Path) -> Result<()> {
    write(path, &format_patterns(file)?)
}

/// A header plus rows, printed as tab-separated columns padded to equal width.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, cell) in cells.iter().enumerate().take(cols) {
                s.push_str(cell);
                if i + 1 < cols {
                    s.extend(std::iter::repeat_n(' ', widths[i] - cell.chars().count()));
                    s.push('\t');
                }
            }
            s.push('\n');
            s
        };
        let mut out = line(&self.header);
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }

    /// Reads a rendered table back, trimming the alignment padding.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let cells = |l: &str| {
            l.split('\t')
                .map(|c| c.trim().to_string())
                .collect::<Vec<_>>()
        };
        let header = lines
            .next()
            .map(cells)
            .ok_or_else(|| Error::InvalidInput("report is empty".into()))?;
        let mut rows = Vec::new();
        for l in lines {
            let row = cells(l);
            if row.len() != header.len() {
                return Err(Error::InvalidInput(format!(
                    "report row has {} columns, header has {}",
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write(path, &self.render())
    }
}

pub const REPORT_COLUMNS: [&str; 5] = ["run", "|P|", "ΔL%", "miss", "t(s)"];

/// One row of a run report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub run: String,
    pub patterns: usize,
    pub delta_l_percent: f64,
    /// Absent when miss codes were disabled.
    pub misses: Option<u64>,
    pub runtime_secs: f64,
}

impl ReportRow {
    pub fn from_report(run: &str, report: &MiningReport, miss_codes: bool) -> Self {
        ReportRow {
            run: run.to_string(),
            patterns: report.pattern_count,
            delta_l_percent: report.delta_l_percent,
            misses: miss_codes.then_some(report.miss_count),
            runtime_secs: report.runtime_secs,
        }
    }

    pub fn cells(&self) -> Vec<String> {
        vec![
            self.run.clone(),
            self.patterns.to_string(),
            format!("{:.1}", self.delta_l_percent),
            self.misses.map_or("-".into(), |m| m.to_string()),
            format!("{:.2}", self.runtime_secs),
        ]
    }
}

pub fn report_table(rows: &[ReportRow]) -> Table {
    let mut t = Table::new(&REPORT_COLUMNS);
    for r in rows {
        t.push(r.cells());
    }
    t
}

pub fn write_report(rows: &[ReportRow], path: &Path) -> Result<()> {
    report_table(rows).write(path)
}

/// Parses a run report; numbers come back at their printed precision.
pub fn parse_report(text: &str) -> Result<Vec<ReportRow>> {
    let t = Table::parse(text)?;
    if t.header != REPORT_COLUMNS {
        return Err(Error::InvalidInput(format!(
            "report header {:?} does not match {:?}",
            t.header, REPORT_COLUMNS
        )));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("`{s}` is not a number")))
    };
    t.rows
        .iter()
        .map(|r| {
            Ok(ReportRow {
                run: r[0].clone(),
                patterns: r[1]
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("`{}` is not a count", r[1])))?,
                delta_l_percent: num(&r[2])?,
                misses: match r[3].as_str() {
                    "-" => None,
                    m => Some(
                        m.parse()
                            .map_err(|_| Error::InvalidInput(format!("`{m}` is not a count")))?,
                    ),
                },
                runtime_secs: num(&r[4])?,
            })
        })
        .collect()
}

/// Path used in diagnostics for in-memory text.
pub fn memory_path() -> PathBuf {
    PathBuf::from("<memory>")
}
