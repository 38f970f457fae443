//! The authored chart document and its three-table CSV format.
//!
//! A chart is described by three CSV tables:
//!
//! * `streams.csv` with columns `id,t0,t1,color,size,parent`
//! * `links.csv` with columns `from,t0,to,t1,merge`
//! * `labels.csv` with columns `stream,t,text,type,size`
//!
//! The `size` column of the streams table holds `t/size` pairs separated by
//! `;` (for example `5/10;7/6`). Blank cells mean "absent". Declaration order
//! is preserved everywhere because the initial layout stacks streams in that
//! order.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::Rgb;

pub const STREAM_COLUMNS: [&str; 6] = ["id", "t0", "t1", "color", "size", "parent"];
pub const LINK_COLUMNS: [&str; 5] = ["from", "t0", "to", "t1", "merge"];
pub const LABEL_COLUMNS: [&str; 5] = ["stream", "t", "text", "type", "size"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Table {
    Streams,
    Links,
    Labels,
}

impl Table {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Table::Streams => &STREAM_COLUMNS,
            Table::Links => &LINK_COLUMNS,
            Table::Labels => &LABEL_COLUMNS,
        }
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Table::Streams => "streams",
            Table::Links => "links",
            Table::Labels => "labels",
        })
    }
}

/// One explicit thickness definition of a stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizePoint {
    pub t: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamDef {
    pub id: String,
    pub t0: f64,
    pub t1: f64,
    /// Color token as written: `#rgb`, `#rrggbb` or a CSS color name.
    pub color: String,
    #[serde(default)]
    pub sizes: Vec<SizePoint>,
    #[serde(default)]
    pub parent: Option<String>,
}

impl StreamDef {
    pub fn contains_time(&self, t: f64) -> bool {
        self.t0 <= t && t <= self.t1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkDef {
    pub from: String,
    pub t0: f64,
    pub to: String,
    #[serde(default)]
    pub t1: Option<f64>,
    #[serde(default)]
    pub merge: bool,
}

impl LinkDef {
    /// End time of the link; a missing `t1` means one discretization step later.
    pub fn effective_end(&self, step: f64) -> f64 {
        self.t1.unwrap_or(self.t0 + step)
    }
}

/// Placement class of a label relative to its stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelType {
    /// Boxed text drawn inside (or touching) the stream.
    In,
    /// Boxed text beside the stream, joined to it by a connector line.
    Out,
    /// Unboxed text bending along the stream itself.
    On,
}

impl LabelType {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelType::In => "in",
            LabelType::Out => "out",
            LabelType::On => "on",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token.trim() {
            "in" => Some(LabelType::In),
            "out" => Some(LabelType::Out),
            "on" => Some(LabelType::On),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelDef {
    pub stream: String,
    pub t: f64,
    pub text: String,
    #[serde(rename = "type")]
    pub kind: LabelType,
    /// Font size in em.
    pub size: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    #[serde(default)]
    pub streams: Vec<StreamDef>,
    #[serde(default)]
    pub links: Vec<LinkDef>,
    #[serde(default)]
    pub labels: Vec<LabelDef>,
}

/// The three CSV texts of a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartCsv {
    pub streams: String,
    pub links: String,
    pub labels: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DuplicateId,
    DanglingReference,
    InvalidInterval,
    TimeOutOfRange,
    InvalidSize,
    NonMonotoneSizes,
    ParentCycle,
    ParentInterval,
    SelfLink,
    LinkDirection,
    InvalidColor,
}

/// A single broken invariant, located by table and 1-based data row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub table: Table,
    pub row: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} row {}: {}", self.table, self.row, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{table} line {line}: {message}")]
    Row {
        table: Table,
        line: u64,
        message: String,
    },
    #[error("{table}: missing required column `{column}`")]
    MissingColumn { table: Table, column: String },
    #[error("{table}: {source}")]
    Csv {
        table: Table,
        #[source]
        source: csv::Error,
    },
    #[error("invalid chart: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn violations(&self) -> Option<&[Violation]> {
        match self {
            Error::Invalid(v) => Some(v),
            _ => None,
        }
    }
}

/// A data row: its line in the source text and its cells keyed by column.
struct Row {
    line: u64,
    cells: HashMap<&'static str, String>,
}

impl Row {
    fn cell(&self, column: &str) -> &str {
        self.cells.get(column).map(String::as_str).unwrap_or("")
    }

    fn error(&self, table: Table, message: impl Into<String>) -> Error {
        Error::Row {
            table,
            line: self.line,
            message: message.into(),
        }
    }

    fn text(&self, table: Table, column: &str) -> Result<String, Error> {
        let value = self.cell(column).trim();
        if value.is_empty() {
            return Err(self.error(table, format!("`{column}` must not be blank")));
        }
        Ok(value.to_string())
    }

    fn optional_text(&self, column: &str) -> Option<String> {
        let value = self.cell(column).trim();
        (!value.is_empty()).then(|| value.to_string())
    }

    fn number(&self, table: Table, column: &str) -> Result<f64, Error> {
        parse_number(self.cell(column))
            .map_err(|m| self.error(table, format!("`{column}`: {m}")))
    }

    fn optional_number(&self, table: Table, column: &str) -> Result<Option<f64>, Error> {
        if self.cell(column).trim().is_empty() {
            return Ok(None);
        }
        self.number(table, column).map(Some)
    }
}

fn parse_number(cell: &str) -> Result<f64, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Err("missing number".into());
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{cell}` is not a finite number")),
    }
}

fn read_rows(text: &str, table: Table) -> Result<Vec<Row>, Error> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let csv_err = |source| Error::Csv { table, source };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let mut index: HashMap<&'static str, usize> = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        let name = name.trim();
        match table.columns().iter().find(|c| **c == name) {
            Some(column) => {
                index.insert(column, i);
            }
            None => log::warn!("{table}: ignoring unknown column `{name}`"),
        }
    }
    for column in table.columns() {
        if !index.contains_key(column) {
            return Err(Error::MissingColumn {
                table,
                column: (*column).to_string(),
            });
        }
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                let message = match e.kind() {
                    csv::ErrorKind::UnequalLengths {
                        expected_len, len, ..
                    } => format!("expected {expected_len} fields, found {len}"),
                    _ => e.to_string(),
                };
                return Err(Error::Row {
                    table,
                    line,
                    message,
                });
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let cells = index
            .iter()
            .map(|(column, &i)| (*column, record.get(i).unwrap_or("").to_string()))
            .collect();
        rows.push(Row { line, cells });
    }
    Ok(rows)
}

/// Parses a `t/size` list such as `5/10` or `5/10;7/6`.
pub fn parse_sizes(cell: &str) -> Result<Vec<SizePoint>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(Vec::new());
    }
    cell.split(';')
        .map(|pair| {
            let (t, size) = pair
                .split_once('/')
                .ok_or_else(|| format!("size entry `{}` is not of the form t/size", pair.trim()))?;
            Ok(SizePoint {
                t: parse_number(t)?,
                size: parse_number(size)?,
            })
        })
        .collect()
}

pub fn format_sizes(sizes: &[SizePoint]) -> String {
    sizes
        .iter()
        .map(|p| format!("{}/{}", p.t, p.size))
        .collect::<Vec<_>>()
        .join(";")
}

/// Parses `streams.csv`. Duplicate ids are reported as violations.
pub fn parse_streams(text: &str) -> Result<Vec<StreamDef>, Error> {
    let table = Table::Streams;
    let streams = read_rows(text, table)?
        .iter()
        .map(|row| {
            Ok(StreamDef {
                id: row.text(table, "id")?,
                t0: row.number(table, "t0")?,
                t1: row.number(table, "t1")?,
                color: row.text(table, "color")?,
                sizes: parse_sizes(row.cell("size"))
                    .map_err(|m| row.error(table, format!("`size`: {m}")))?,
                parent: row.optional_text("parent"),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let duplicates = duplicate_ids(&streams);
    if duplicates.is_empty() {
        Ok(streams)
    } else {
        Err(Error::Invalid(duplicates))
    }
}

pub fn parse_links(text: &str) -> Result<Vec<LinkDef>, Error> {
    let table = Table::Links;
    read_rows(text, table)?
        .iter()
        .map(|row| {
            let merge = match row.cell("merge").trim().to_ascii_lowercase().as_str() {
                "" | "false" => false,
                "true" => true,
                other => {
                    return Err(row.error(table, format!("`merge`: expected true or blank, found `{other}`")))
                }
            };
            Ok(LinkDef {
                from: row.text(table, "from")?,
                t0: row.number(table, "t0")?,
                to: row.text(table, "to")?,
                t1: row.optional_number(table, "t1")?,
                merge,
            })
        })
        .collect()
}

pub fn parse_labels(text: &str) -> Result<Vec<LabelDef>, Error> {
    let table = Table::Labels;
    read_rows(text, table)?
        .iter()
        .map(|row| {
            let kind_cell = row.cell("type");
            let kind = LabelType::parse(kind_cell).ok_or_else(|| {
                row.error(
                    table,
                    format!("`type`: unknown label type `{}` (expected in, out or on)", kind_cell.trim()),
                )
            })?;
            Ok(LabelDef {
                stream: row.text(table, "stream")?,
                t: row.number(table, "t")?,
                text: row.cell("text").to_string(),
                kind,
                size: row.number(table, "size")?,
            })
        })
        .collect()
}

impl ChartSpec {
    /// Parses all three tables. Missing link or label tables count as empty.
    pub fn from_csv(streams: &str, links: Option<&str>, labels: Option<&str>) -> Result<Self, Error> {
        Ok(ChartSpec {
            streams: parse_streams(streams)?,
            links: links.map(parse_links).transpose()?.unwrap_or_default(),
            labels: labels.map(parse_labels).transpose()?.unwrap_or_default(),
        })
    }

    pub fn stream(&self, id: &str) -> Option<&StreamDef> {
        self.streams.iter().find(|s| s.id == id)
    }

    pub fn stream_index(&self, id: &str) -> Option<usize> {
        self.streams.iter().position(|s| s.id == id)
    }

    /// `[min t0, max t1]` over all streams, or `None` for an empty chart.
    pub fn time_range(&self) -> Option<(f64, f64)> {
        let t0 = self.streams.iter().map(|s| s.t0).reduce(f64::min)?;
        let t1 = self.streams.iter().map(|s| s.t1).reduce(f64::max)?;
        Some((t0, t1))
    }

    /// Number of ancestors of a stream; 0 for top-level streams.
    /// Cycles are cut off at the number of streams.
    pub fn depth(&self, id: &str) -> u32 {
        let mut depth = 0;
        let mut current = self.stream(id).and_then(|s| s.parent.as_deref());
        while let Some(parent) = current {
            depth += 1;
            if depth as usize > self.streams.len() {
                break;
            }
            current = self.stream(parent).and_then(|s| s.parent.as_deref());
        }
        depth
    }

    /// Writes the three CSV tables. Parsing the result yields an equal spec.
    pub fn to_csv(&self) -> ChartCsv {
        serialize(self)
    }
}

fn duplicate_ids(streams: &[StreamDef]) -> Vec<Violation> {
    let mut seen = HashSet::new();
    streams
        .iter()
        .enumerate()
        .filter(|(_, s)| !seen.insert(s.id.as_str()))
        .map(|(i, s)| Violation {
            kind: ViolationKind::DuplicateId,
            table: Table::Streams,
            row: i + 1,
            message: format!("duplicate stream id `{}`", s.id),
        })
        .collect()
}

/// Checks every invariant that does not depend on the time discretization.
///
/// All violations are collected; this never fails early.
pub fn validate(spec: &ChartSpec) -> Result<(), Vec<Violation>> {
    let violations = collect_violations(spec, None);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Like [`validate`], and additionally checks link end times that default to
/// `t0 + step`.
pub fn validate_for_step(spec: &ChartSpec, step: f64) -> Result<(), Vec<Violation>> {
    let violations = collect_violations(spec, Some(step));
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn collect_violations(spec: &ChartSpec, step: Option<f64>) -> Vec<Violation> {
    let mut out = duplicate_ids(&spec.streams);
    let by_id: HashMap<&str, &StreamDef> =
        spec.streams.iter().map(|s| (s.id.as_str(), s)).collect();

    for (i, s) in spec.streams.iter().enumerate() {
        let mut push = |kind, message: String| {
            out.push(Violation {
                kind,
                table: Table::Streams,
                row: i + 1,
                message: format!("stream `{}`: {message}", s.id),
            })
        };
        if s.t0 > s.t1 {
            push(ViolationKind::InvalidInterval, format!("t0 {} is after t1 {}", s.t0, s.t1));
        }
        if Rgb::parse(&s.color).is_err() {
            push(ViolationKind::InvalidColor, format!("unrecognized color `{}`", s.color));
        }
        for p in &s.sizes {
            if !s.contains_time(p.t) {
                push(
                    ViolationKind::TimeOutOfRange,
                    format!("size time {} outside stream interval", p.t),
                );
            }
            if p.size <= 0.0 {
                push(ViolationKind::InvalidSize, format!("size {} at t={} is not positive", p.size, p.t));
            }
        }
        if s.sizes.windows(2).any(|w| w[0].t >= w[1].t) {
            push(
                ViolationKind::NonMonotoneSizes,
                "size times must be strictly increasing".into(),
            );
        }
        if let Some(parent_id) = &s.parent {
            match by_id.get(parent_id.as_str()) {
                None => push(
                    ViolationKind::DanglingReference,
                    format!("parent `{parent_id}` does not exist"),
                ),
                Some(parent) => {
                    if in_parent_cycle(&by_id, s) {
                        push(ViolationKind::ParentCycle, "parent cycle".into());
                    } else if parent.t0 > s.t0 || parent.t1 < s.t1 {
                        push(
                            ViolationKind::ParentInterval,
                            format!(
                                "parent `{parent_id}` interval [{}, {}] does not contain [{}, {}]",
                                parent.t0, parent.t1, s.t0, s.t1
                            ),
                        );
                    }
                }
            }
        }
    }

    for (i, link) in spec.links.iter().enumerate() {
        let mut push = |kind, message: String| {
            out.push(Violation {
                kind,
                table: Table::Links,
                row: i + 1,
                message: format!("link `{}`->`{}`: {message}", link.from, link.to),
            })
        };
        if link.from == link.to {
            push(ViolationKind::SelfLink, "link connects a stream to itself".into());
        }
        match by_id.get(link.from.as_str()) {
            None => push(
                ViolationKind::DanglingReference,
                format!("stream `{}` does not exist", link.from),
            ),
            Some(from) if !from.contains_time(link.t0) => push(
                ViolationKind::TimeOutOfRange,
                format!("t0 {} outside interval of `{}`", link.t0, link.from),
            ),
            _ => {}
        }
        let end = match (link.t1, step) {
            (Some(t1), _) => Some(t1),
            (None, Some(step)) => Some(link.t0 + step),
            (None, None) => None,
        };
        if let Some(end) = end {
            if end <= link.t0 {
                push(
                    ViolationKind::LinkDirection,
                    format!("end time {end} must be after t0 {}", link.t0),
                );
            }
            match by_id.get(link.to.as_str()) {
                None => push(
                    ViolationKind::DanglingReference,
                    format!("stream `{}` does not exist", link.to),
                ),
                Some(to) if !to.contains_time(end) => push(
                    ViolationKind::TimeOutOfRange,
                    format!("end time {end} outside interval of `{}`", link.to),
                ),
                _ => {}
            }
        } else if !by_id.contains_key(link.to.as_str()) {
            push(
                ViolationKind::DanglingReference,
                format!("stream `{}` does not exist", link.to),
            );
        }
    }

    for (i, label) in spec.labels.iter().enumerate() {
        let mut push = |kind, message: String| {
            out.push(Violation {
                kind,
                table: Table::Labels,
                row: i + 1,
                message,
            })
        };
        match by_id.get(label.stream.as_str()) {
            None => push(
                ViolationKind::DanglingReference,
                format!("stream `{}` does not exist", label.stream),
            ),
            Some(s) if !s.contains_time(label.t) => push(
                ViolationKind::TimeOutOfRange,
                format!(
                    "label time outside stream interval (t={} not in [{}, {}] of `{}`)",
                    label.t, s.t0, s.t1, s.id
                ),
            ),
            _ => {}
        }
        if label.size <= 0.0 {
            push(ViolationKind::InvalidSize, format!("label size {} is not positive", label.size));
        }
    }
    out
}

fn in_parent_cycle(by_id: &HashMap<&str, &StreamDef>, start: &StreamDef) -> bool {
    let mut visited = HashSet::new();
    let mut current = start.parent.as_deref();
    while let Some(id) = current {
        if id == start.id {
            return true;
        }
        if !visited.insert(id) {
            // a cycle further up the chain that does not include `start`
            return false;
        }
        current = by_id.get(id).and_then(|s| s.parent.as_deref());
    }
    false
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_table<I>(table: Table, rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(table.columns())
        .expect("writing to memory");
    for row in rows {
        writer.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("csv output is utf-8")
}

/// Serializes a spec into its three CSV tables.
pub fn serialize(spec: &ChartSpec) -> ChartCsv {
    let streams = write_table(
        Table::Streams,
        spec.streams.iter().map(|s| {
            vec![
                s.id.clone(),
                s.t0.to_string(),
                s.t1.to_string(),
                s.color.clone(),
                format_sizes(&s.sizes),
                s.parent.clone().unwrap_or_default(),
            ]
        }),
    );
    let links = write_table(
        Table::Links,
        spec.links.iter().map(|l| {
            vec![
                l.from.clone(),
                l.t0.to_string(),
                l.to.clone(),
                fmt_opt(l.t1),
                if l.merge { "true".into() } else { String::new() },
            ]
        }),
    );
    let labels = write_table(
        Table::Labels,
        spec.labels.iter().map(|l| {
            vec![
                l.stream.clone(),
                l.t.to_string(),
                l.text.clone(),
                l.kind.as_str().to_string(),
                l.size.to_string(),
            ]
        }),
    );
    ChartCsv {
        streams,
        links,
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STREAMS: &str = "id,t0,t1,color,size,parent\nA,2,6,#D73,,\nB,3,9,blue,5/10,\nC,4,6,purple,,B\n";
    const LINKS: &str = "from,t0,to,t1,merge\nA,3,B,,true\nC,4,A,,\n";
    const LABELS: &str = "stream,t,text,type,size\nA,4,inside label,in,3\nB,6,outside ...,out,5\nB,7,... on top ...,on,3\n";

    fn fig2() -> ChartSpec {
        ChartSpec::from_csv(STREAMS, Some(LINKS), Some(LABELS)).unwrap()
    }

    #[test]
    fn parses_stream_rows() {
        let streams = parse_streams(STREAMS).unwrap();
        assert_eq!(
            streams[0],
            StreamDef {
                id: "A".into(),
                t0: 2.0,
                t1: 6.0,
                color: "#D73".into(),
                sizes: vec![],
                parent: None,
            }
        );
        assert_eq!(streams[1].sizes, vec![SizePoint { t: 5.0, size: 10.0 }]);
        assert_eq!(streams[2].parent.as_deref(), Some("B"));
    }

    #[test]
    fn parses_link_rows() {
        let links = parse_links(LINKS).unwrap();
        assert_eq!(
            links[0],
            LinkDef {
                from: "A".into(),
                t0: 3.0,
                to: "B".into(),
                t1: None,
                merge: true,
            }
        );
        assert!(!links[1].merge);
        assert_eq!(links[1].t1, None);
    }

    #[test]
    fn parses_label_rows() {
        let labels = parse_labels(LABELS).unwrap();
        assert_eq!(
            labels[0],
            LabelDef {
                stream: "A".into(),
                t: 4.0,
                text: "inside label".into(),
                kind: LabelType::In,
                size: 3.0,
            }
        );
        assert_eq!(labels[1].kind, LabelType::Out);
        assert_eq!(labels[1].size, 5.0);
    }

    #[test]
    fn unknown_label_type_is_rejected() {
        let err = parse_labels("stream,t,text,type,size\nA,4,x,x,3\n").unwrap_err();
        assert!(matches!(err, Error::Row { line: 2, .. }), "{err}");
    }

    #[test]
    fn empty_tables() {
        assert!(parse_streams("id,t0,t1,color,size,parent\n").unwrap().is_empty());
        assert!(parse_links("from,t0,to,t1,merge\n").unwrap().is_empty());
        assert!(parse_labels("").unwrap().is_empty());
    }

    #[test]
    fn row_errors_name_the_line() {
        let err = parse_streams("id,t0,t1,color,size,parent\nA,2,6,red,,\nB,x,9,blue,,\n").unwrap_err();
        match err {
            Error::Row { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        let err = parse_streams("id,t0,t1,color,size,parent\nA,2,6\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn duplicate_ids_are_violations() {
        let err = parse_streams("id,t0,t1,color,size,parent\nA,2,6,red,,\nA,3,4,blue,,\n").unwrap_err();
        let v = err.violations().unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::DuplicateId);
        assert_eq!(v[0].row, 2);
    }

    #[test]
    fn extra_columns_are_ignored() {
        let s = parse_streams("id,t0,t1,note,color,size,parent\nA,2,6,hello,red,,\n").unwrap();
        assert_eq!(s[0].color, "red");
    }

    #[test]
    fn missing_column_is_an_error() {
        let err = parse_streams("id,t0,t1,color,size\nA,2,6,red,\n").unwrap_err();
        assert!(matches!(err, Error::MissingColumn { .. }));
    }

    #[test]
    fn multi_pair_sizes() {
        let sizes = parse_sizes("5/10; 7/6").unwrap();
        assert_eq!(sizes.len(), 2);
        assert_eq!(format_sizes(&sizes), "5/10;7/6");
        assert!(parse_sizes("5").is_err());
    }

    #[test]
    fn fig2_is_valid() {
        assert_eq!(validate(&fig2()), Ok(()));
        assert_eq!(validate_for_step(&fig2(), 1.0), Ok(()));
    }

    #[test]
    fn label_outside_interval() {
        let mut spec = fig2();
        spec.labels[0].t = 1.0;
        let v = validate(&spec).unwrap_err();
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("label time outside stream interval"));
    }

    #[test]
    fn self_parent_is_a_cycle() {
        let mut spec = fig2();
        spec.streams[2].parent = Some("C".into());
        let v = validate(&spec).unwrap_err();
        assert!(v.iter().any(|v| v.kind == ViolationKind::ParentCycle && v.message.contains("parent cycle")));
    }

    #[test]
    fn all_violations_are_reported() {
        let mut spec = fig2();
        spec.streams[2].parent = Some("missing".into());
        spec.streams[1].sizes = vec![SizePoint { t: 5.0, size: 1.0 }, SizePoint { t: 4.0, size: -1.0 }];
        spec.labels[2].stream = "nope".into();
        spec.links[0].t1 = Some(20.0);
        let kinds: HashSet<_> = validate(&spec).unwrap_err().into_iter().map(|v| v.kind).collect();
        for k in [
            ViolationKind::DanglingReference,
            ViolationKind::NonMonotoneSizes,
            ViolationKind::InvalidSize,
            ViolationKind::TimeOutOfRange,
        ] {
            assert!(kinds.contains(&k), "{k:?} missing from {kinds:?}");
        }
    }

    #[test]
    fn parent_must_contain_child() {
        let mut spec = fig2();
        spec.streams[2].t1 = 10.0;
        let v = validate(&spec).unwrap_err();
        assert!(v.iter().any(|v| v.kind == ViolationKind::ParentInterval));
    }

    #[test]
    fn default_link_end_checked_against_step() {
        let mut spec = fig2();
        // C ends at 6, A ends at 6: a default end of t0 + 1 = 6 is fine, 7 is not
        spec.links[1].t0 = 5.0;
        assert!(validate_for_step(&spec, 1.0).is_ok());
        spec.links[1].t0 = 6.0;
        assert!(validate(&spec).is_ok());
        assert!(validate_for_step(&spec, 1.0).is_err());
    }

    #[test]
    fn serialize_round_trip() {
        let spec = fig2();
        let csv = serialize(&spec);
        assert!(csv.streams.contains("B,3,9,blue,5/10,"));
        let back = ChartSpec::from_csv(&csv.streams, Some(&csv.links), Some(&csv.labels)).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn empty_spec_serializes_to_headers() {
        let csv = serialize(&ChartSpec::default());
        assert_eq!(csv.streams, "id,t0,t1,color,size,parent\n");
        assert_eq!(csv.links, "from,t0,to,t1,merge\n");
        assert_eq!(csv.labels, "stream,t,text,type,size\n");
    }

    #[test]
    fn quoted_text_survives() {
        let mut spec = fig2();
        spec.labels[0].text = "Beats, \"the\" poets".into();
        let csv = serialize(&spec);
        let back = parse_labels(&csv.labels).unwrap();
        assert_eq!(back[0].text, "Beats, \"the\" poets");
    }
}
