//! Dataset ingestion, fragment extraction, outcome files, and the join of
//! characteristics with outcomes into an [`AnalysisFrame`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::metrics::CharacteristicsTable;

/// Width of generated record ids.
const ID_WIDTH: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Jsonl,
    Csv,
    Tsv,
}

impl DatasetFormat {
    /// Guesses from the file extension; anything unrecognised is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json" | "ndjson") => DatasetFormat::Jsonl,
            Some("tsv" | "tab") => DatasetFormat::Tsv,
            _ => DatasetFormat::Csv,
        }
    }
}

/// How to build one named fragment from a record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FragmentSpec {
    pub name: String,
    /// Field paths; for JSONL, dot-separated keys and array indices (`choices.0`).
    pub fields: Vec<String>,
    #[serde(default = "default_separator")]
    pub separator: String,
}

fn default_separator() -> String {
    " ".to_string()
}

impl FragmentSpec {
    pub fn new(name: &str, fields: &[&str]) -> Self {
        FragmentSpec {
            name: name.to_string(),
            fields: fields.iter().map(|f| f.to_string()).collect(),
            separator: default_separator(),
        }
    }
}

/// Checks names are nonempty and unique and every spec has a source field.
pub fn validate_specs(specs: &[FragmentSpec]) -> Result<()> {
    let mut seen = HashSet::new();
    for spec in specs {
        if spec.name.is_empty() {
            return Err(Error::Config("fragment name must not be empty".into()));
        }
        if !seen.insert(spec.name.as_str()) {
            return Err(Error::Config(format!("fragment `{}` defined twice", spec.name)));
        }
        if spec.fields.is_empty() {
            return Err(Error::Config(format!("fragment `{}` has no source fields", spec.name)));
        }
    }
    Ok(())
}

/// One dataset record with its extracted fragments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub fragments: BTreeMap<String, String>,
    /// Fragments with at least one absent or null source field.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FragmentSet {
    pub fragment_names: Vec<String>,
    pub records: Vec<Record>,
}

impl FragmentSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Builds a set from in-memory records, checking ids are unique and every
    /// record has the same fragment names.
    pub fn from_records(records: Vec<Record>) -> Result<Self> {
        let mut ids = HashSet::new();
        for r in &records {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        let fragment_names: Vec<String> = records
            .first()
            .map(|r| r.fragments.keys().cloned().collect())
            .unwrap_or_default();
        if let Some(bad) = records
            .iter()
            .find(|r| !r.fragments.keys().eq(fragment_names.iter()))
        {
            return Err(Error::InvalidInput(format!(
                "record `{}` has a different fragment set",
                bad.id
            )));
        }
        Ok(FragmentSet {
            fragment_names,
            records,
        })
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.records {
            writeln!(w, "{}", serde_json::to_string(r)?).map_err(|e| Error::io("<jsonl>", e))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<jsonl>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line).map_err(|e| Error::MalformedRow {
                origin: "<fragments>".into(),
                row: i + 1,
                message: e.to_string(),
            })?);
        }
        FragmentSet::from_records(records)
    }
}

/// Reads a whole dataset into memory.
pub fn load_dataset(
    path: &Path,
    format: DatasetFormat,
    specs: &[FragmentSpec],
    id_field: Option<&str>,
) -> Result<FragmentSet> {
    let records = DatasetReader::open(path, format, specs, id_field)?.collect::<Result<Vec<_>>>()?;
    Ok(FragmentSet {
        fragment_names: sorted_names(specs),
        records,
    })
}

fn sorted_names(specs: &[FragmentSpec]) -> Vec<String> {
    let mut names: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    names.sort();
    names
}

enum Rows {
    Jsonl(std::io::Lines<BufReader<File>>),
    Delimited {
        records: csv::StringRecordsIntoIter<BufReader<File>>,
        header: HashMap<String, usize>,
    },
}

/// Streams records from a dataset file, one per input row.
///
/// Record ids come from `id_field` when given (and must be unique), otherwise
/// they are zero-padded row indices. Field paths are validated against the
/// header (CSV/TSV) or the first row (JSONL); later rows that lack a field
/// yield empty text and list the fragment in [`Record::missing`].
pub struct DatasetReader {
    origin: String,
    rows: Rows,
    specs: Vec<FragmentSpec>,
    id_field: Option<String>,
    seen_ids: HashSet<String>,
    index: usize,
    line: usize,
    validated: bool,
}

impl DatasetReader {
    pub fn open(
        path: &Path,
        format: DatasetFormat,
        specs: &[FragmentSpec],
        id_field: Option<&str>,
    ) -> Result<Self> {
        validate_specs(specs)?;
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let origin = path.display().to_string();
        let rows = match format {
            DatasetFormat::Jsonl => Rows::Jsonl(BufReader::new(file).lines()),
            DatasetFormat::Csv | DatasetFormat::Tsv => {
                let mut reader = csv::ReaderBuilder::new()
                    .delimiter(if format == DatasetFormat::Tsv { b'\t' } else { b',' })
                    .from_reader(BufReader::new(file));
                let header: HashMap<String, usize> = reader
                    .headers()?
                    .iter()
                    .enumerate()
                    .map(|(i, h)| (h.to_string(), i))
                    .collect();
                let required = specs
                    .iter()
                    .flat_map(|s| s.fields.iter().map(String::as_str))
                    .chain(id_field);
                for field in required {
                    if !header.contains_key(field) {
                        return Err(Error::UnknownField(field.to_string()));
                    }
                }
                Rows::Delimited {
                    records: reader.into_records(),
                    header,
                }
            }
        };
        Ok(DatasetReader {
            origin,
            rows,
            specs: specs.to_vec(),
            id_field: id_field.map(str::to_string),
            seen_ids: HashSet::new(),
            index: 0,
            line: 0,
            validated: format != DatasetFormat::Jsonl,
        })
    }

    pub fn fragment_names(&self) -> Vec<String> {
        sorted_names(&self.specs)
    }

    fn malformed(&self, message: impl Into<String>) -> Error {
        Error::MalformedRow {
            origin: self.origin.clone(),
            row: self.line,
            message: message.into(),
        }
    }

    fn next_record(&mut self) -> Option<Result<Record>> {
        loop {
            let raw = match &mut self.rows {
                Rows::Jsonl(lines) => match lines.next()? {
                    Ok(l) => Ok(l),
                    Err(e) => Err(Error::io(self.origin.clone(), e)),
                },
                Rows::Delimited { records, header } => {
                    let rec = match records.next()? {
                        Ok(r) => r,
                        Err(e) => {
                            let row = e.position().map_or(self.index + 2, |p| p.line() as usize);
                            return Some(Err(Error::MalformedRow {
                                origin: self.origin.clone(),
                                row,
                                message: e.to_string(),
                            }));
                        }
                    };
                    self.line = rec.position().map_or(self.index + 2, |p| p.line() as usize);
                    let header = header.clone();
                    let get = |f: &str| header.get(f).and_then(|&i| rec.get(i)).map(str::to_string);
                    return Some(self.build(|f| get(f).map(FieldValue::Text)));
                }
            };
            let line = match raw {
                Ok(l) => l,
                Err(e) => return Some(Err(e)),
            };
            self.line += 1;
            if line.trim().is_empty() {
                continue;
            }
            let value: Value = match serde_json::from_str(&line) {
                Ok(v @ Value::Object(_)) => v,
                Ok(_) => return Some(Err(self.malformed("expected a JSON object"))),
                Err(e) => return Some(Err(self.malformed(e.to_string()))),
            };
            return Some(self.build_json(&value));
        }
    }

    fn build_json(&mut self, value: &Value) -> Result<Record> {
        if !self.validated {
            let paths = self
                .specs
                .iter()
                .flat_map(|s| s.fields.iter())
                .chain(self.id_field.as_ref());
            for path in paths {
                if resolve_path(value, path).is_none() {
                    return Err(Error::UnknownField(path.clone()));
                }
            }
            self.validated = true;
        }
        self.build(|f| resolve_path(value, f).map(FieldValue::Json))
    }

    fn build<'v>(&mut self, get: impl Fn(&str) -> Option<FieldValue<'v>>) -> Result<Record> {
        let id = match &self.id_field {
            Some(field) => match get(field) {
                Some(v) => match v.to_text(" ") {
                    Some(t) if !t.is_empty() => t,
                    _ => return Err(self.malformed(format!("empty id field `{field}`"))),
                },
                None => return Err(self.malformed(format!("missing id field `{field}`"))),
            },
            None => format!("{:0width$}", self.index, width = ID_WIDTH),
        };
        if !self.seen_ids.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        let mut fragments = BTreeMap::new();
        let mut missing = Vec::new();
        for spec in &self.specs {
            let mut parts = Vec::with_capacity(spec.fields.len());
            let mut absent = false;
            for field in &spec.fields {
                match get(field).and_then(|v| v.to_text(&spec.separator)) {
                    Some(text) => parts.push(text),
                    None => {
                        absent = true;
                        parts.push(String::new());
                    }
                }
            }
            if absent {
                missing.push(spec.name.clone());
            }
            fragments.insert(spec.name.clone(), parts.join(&spec.separator));
        }
        missing.sort();
        self.index += 1;
        Ok(Record {
            id,
            fragments,
            missing,
        })
    }
}

impl Iterator for DatasetReader {
    type Item = Result<Record>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_record()
    }
}

enum FieldValue<'a> {
    Text(String),
    Json(&'a Value),
}

impl FieldValue<'_> {
    /// Text of a field; arrays are joined with `separator`. `None` for null.
    fn to_text(&self, separator: &str) -> Option<String> {
        match self {
            FieldValue::Text(s) => Some(s.clone()),
            FieldValue::Json(v) => json_text(v, separator),
        }
    }
}

fn json_text(v: &Value, separator: &str) -> Option<String> {
    match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(items) => Some(
            items
                .iter()
                .filter_map(|i| json_text(i, separator))
                .collect::<Vec<_>>()
                .join(separator),
        ),
        Value::Object(_) => Some(v.to_string()),
    }
}

fn resolve_path<'a>(value: &'a Value, path: &str) -> Option<&'a Value> {
    if let Some(v) = value.get(path) {
        return Some(v);
    }
    path.split('.').try_fold(value, |v, key| match v {
        Value::Object(map) => map.get(key),
        Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get(i)),
        _ => None,
    })
}

// ---------- outcomes ----------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeKind {
    Binary,
    Continuous,
}

/// Per-record outcome values, e.g. whether a model answered correctly.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeColumn {
    pub name: String,
    pub kind: OutcomeKind,
    pub values: BTreeMap<String, f64>,
}

impl OutcomeColumn {
    pub fn new(name: &str, kind: OutcomeKind, values: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, v) in values {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("outcome `{name}` for `{id}` is not finite")));
            }
            if kind == OutcomeKind::Binary && v != 0.0 && v != 1.0 {
                return Err(Error::InvalidInput(format!(
                    "binary outcome `{name}` has value {v} for `{id}`"
                )));
            }
            if map.insert(id.clone(), v).is_some() {
                return Err(Error::DuplicateId(id));
            }
        }
        Ok(OutcomeColumn {
            name: name.to_string(),
            kind,
            values: map,
        })
    }

    /// Binary when every value is 0 or 1, continuous otherwise.
    pub fn infer(name: &str, values: Vec<(String, f64)>) -> Result<Self> {
        let kind = if values.iter().all(|(_, v)| *v == 0.0 || *v == 1.0) {
            OutcomeKind::Binary
        } else {
            OutcomeKind::Continuous
        };
        OutcomeColumn::new(name, kind, values)
    }
}

/// Reads outcome columns from CSV (`id,<name>...`) or JSONL (`{"id": .., "<name>": ..}`).
/// Kinds are inferred from the values.
pub fn load_outcomes(path: &Path) -> Result<Vec<OutcomeColumn>> {
    let origin = path.display().to_string();
    let mut columns: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    match DatasetFormat::from_path(path) {
        DatasetFormat::Jsonl => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let bad = |message: String| Error::MalformedRow {
                    origin: origin.clone(),
                    row: i + 1,
                    message,
                };
                let obj: serde_json::Map<String, Value> =
                    serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
                let id = obj
                    .get("id")
                    .and_then(|v| json_text(v, " "))
                    .ok_or_else(|| bad("missing `id`".into()))?;
                for (k, v) in obj.iter().filter(|(k, _)| k.as_str() != "id") {
                    let x = match v {
                        Value::Bool(b) => f64::from(u8::from(*b)),
                        Value::Number(n) => n.as_f64().ok_or_else(|| bad(format!("bad number for `{k}`")))?,
                        _ => return Err(bad(format!("`{k}` is not numeric"))),
                    };
                    columns.entry(k.clone()).or_default().push((id.clone(), x));
                }
            }
        }
        format => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            let mut reader = csv::ReaderBuilder::new()
                .delimiter(if format == DatasetFormat::Tsv { b'\t' } else { b',' })
                .from_reader(file);
            let headers = reader.headers()?.clone();
            if headers.get(0) != Some("id") || headers.len() < 2 {
                return Err(Error::MalformedRow {
                    origin,
                    row: 1,
                    message: "outcome header must be `id,<outcome>...`".into(),
                });
            }
            for (i, rec) in reader.records().enumerate() {
                let rec = rec?;
                for (j, name) in headers.iter().enumerate().skip(1) {
                    let cell = rec.get(j).unwrap_or("").trim();
                    if cell.is_empty() {
                        continue;
                    }
                    let x: f64 = cell.parse().map_err(|_| Error::MalformedRow {
                        origin: origin.clone(),
                        row: i + 2,
                        message: format!("`{name}` is not numeric: `{cell}`"),
                    })?;
                    columns.entry(name.to_string()).or_default().push((rec[0].to_string(), x));
                }
            }
        }
    }
    columns
        .into_iter()
        .map(|(name, values)| OutcomeColumn::infer(&name, values))
        .collect()
}

// ---------- analysis frame ----------

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivedKind {
    /// `a − b`.
    #[default]
    Difference,
    /// `|a − b|`.
    AbsDifference,
}

/// A feature computed from the same metric on two fragments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivedFeatureSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub kind: DerivedKind,
    pub metric: String,
    pub a: String,
    pub b: String,
}

impl DerivedFeatureSpec {
    pub fn difference(metric: &str, a: &str, b: &str) -> Self {
        DerivedFeatureSpec {
            name: None,
            kind: DerivedKind::Difference,
            metric: metric.to_string(),
            a: a.to_string(),
            b: b.to_string(),
        }
    }

    pub fn column_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| match self.kind {
            DerivedKind::Difference => format!("{}-{}.{}", self.a, self.b, self.metric),
            DerivedKind::AbsDifference => format!("|{}-{}|.{}", self.a, self.b, self.metric),
        })
    }
}

/// Per-record outcome values aligned with the frame rows.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeSeries {
    pub kind: OutcomeKind,
    pub values: Vec<f64>,
}

/// Characteristics pivoted to one row per record, joined with outcomes.
///
/// Rows are sorted by record id. Feature columns are named
/// `<fragment>.<METRIC_KEY>` or after a derived feature.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnalysisFrame {
    pub row_ids: Vec<String>,
    pub features: BTreeMap<String, Vec<Option<f64>>>,
    pub outcomes: BTreeMap<String, OutcomeSeries>,
    /// Records in the table without a value for every outcome.
    pub dropped: usize,
    pub warnings: Vec<String>,
}

impl AnalysisFrame {
    pub fn len(&self) -> usize {
        self.row_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_ids.is_empty()
    }

    pub fn feature(&self, name: &str) -> Result<&[Option<f64>]> {
        self.features
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn outcome(&self, name: &str) -> Result<&OutcomeSeries> {
        self.outcomes
            .get(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.features.keys().cloned().collect()
    }

    /// Adds or replaces a feature column.
    pub fn insert_feature(&mut self, name: &str, values: Vec<Option<f64>>) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::InvalidInput(format!(
                "feature `{name}` has {} values for {} rows",
                values.len(),
                self.len()
            )));
        }
        self.features.insert(name.to_string(), values);
        Ok(())
    }
}

/// Joins a characteristics table with outcomes.
///
/// Every outcome id must appear in the table; table records missing any
/// outcome are dropped and counted. Derived features are added last.
pub fn attach_outcomes(
    table: &CharacteristicsTable,
    outcomes: &[OutcomeColumn],
    derived: &[DerivedFeatureSpec],
) -> Result<AnalysisFrame> {
    let table_ids: HashSet<&str> = table.rows.iter().map(|r| r.record_id.as_str()).collect();
    let mut unmatched: Vec<String> = outcomes
        .iter()
        .flat_map(|o| o.values.keys())
        .filter(|id| !table_ids.contains(id.as_str()))
        .cloned()
        .collect();
    unmatched.sort();
    unmatched.dedup();
    if !unmatched.is_empty() {
        unmatched.truncate(10);
        return Err(Error::UnmatchedIds(unmatched));
    }

    let fragments = table.fragment_names();
    for d in derived {
        for frag in [&d.a, &d.b] {
            if !fragments.contains(frag) {
                return Err(Error::InvalidInput(format!(
                    "derived feature `{}` refers to unknown fragment `{frag}`",
                    d.column_name()
                )));
            }
        }
        if table.column_index(&d.metric).is_none() {
            return Err(Error::UnknownMetric(d.metric.clone()));
        }
    }

    let mut all_ids: Vec<String> = table.record_ids();
    all_ids.sort();
    let row_ids: Vec<String> = all_ids
        .iter()
        .filter(|id| outcomes.iter().all(|o| o.values.contains_key(*id)))
        .cloned()
        .collect();
    let dropped = all_ids.len() - row_ids.len();
    let position: HashMap<&str, usize> = row_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();

    let mut features: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
    for frag in &fragments {
        for key in &table.columns {
            features.insert(format!("{frag}.{key}"), vec![None; row_ids.len()]);
        }
    }
    for row in &table.rows {
        let Some(&i) = position.get(row.record_id.as_str()) else {
            continue;
        };
        for (key, cell) in table.columns.iter().zip(&row.cells) {
            if let Some(col) = features.get_mut(&format!("{}.{key}", row.fragment)) {
                col[i] = cell.value;
            }
        }
    }
    for d in derived {
        let a = &features[&format!("{}.{}", d.a, d.metric)];
        let b = &features[&format!("{}.{}", d.b, d.metric)];
        let values = a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let diff = (*x)? - (*y)?;
                Some(match d.kind {
                    DerivedKind::Difference => diff,
                    DerivedKind::AbsDifference => diff.abs(),
                })
            })
            .collect();
        features.insert(d.column_name(), values);
    }

    let outcome_series = outcomes
        .iter()
        .map(|o| {
            let values = row_ids.iter().map(|id| o.values[id]).collect();
            (o.name.clone(), OutcomeSeries { kind: o.kind, values })
        })
        .collect();

    let mut warnings = Vec::new();
    if outcomes.is_empty() || row_ids.is_empty() {
        warnings.push("no records with outcomes; the frame is empty".to_string());
    }
    if dropped > 0 {
        warnings.push(format!("{dropped} records without outcomes were dropped"));
    }
    let row_ids = if outcomes.is_empty() { Vec::new() } else { row_ids };
    let features = if outcomes.is_empty() {
        features.into_keys().map(|k| (k, Vec::new())).collect()
    } else {
        features
    };
    Ok(AnalysisFrame {
        dropped: if outcomes.is_empty() { all_ids.len() } else { dropped },
        row_ids,
        features,
        outcomes: outcome_series,
        warnings,
    })
}
