use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde_json::{Map, Value};

use super::Cell;
use crate::error::{Error, Result};

/// Computed characteristics: one row per (record, fragment), one column per metric key.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CharacteristicsTable {
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub record_id: String,
    pub fragment: String,
    pub cells: Vec<Cell>,
}

/// Shortest round-trip decimal form; empty for a missing value.
pub fn format_value(value: Option<f64>) -> String {
    match value {
        Some(v) if v == 0.0 => "0".to_string(),
        Some(v) if v.is_finite() => format!("{v}"),
        _ => String::new(),
    }
}

impl CharacteristicsTable {
    pub fn column_index(&self, key: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == key)
    }

    /// Fragment names in lexicographic order.
    pub fn fragment_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.rows.iter().map(|r| r.fragment.clone()).collect();
        names.sort();
        names.dedup();
        names
    }

    /// Record ids in first-seen order.
    pub fn record_ids(&self) -> Vec<String> {
        let mut seen = std::collections::HashSet::new();
        self.rows
            .iter()
            .filter(|r| seen.insert(r.record_id.as_str()))
            .map(|r| r.record_id.clone())
            .collect()
    }

    /// Header `id,fragment,<KEY>...`; missing values are empty cells.
    pub fn csv_header(columns: &[String]) -> Vec<String> {
        ["id".to_string(), "fragment".to_string()]
            .into_iter()
            .chain(columns.iter().cloned())
            .collect()
    }

    pub fn csv_record(row: &TableRow) -> Vec<String> {
        [row.record_id.clone(), row.fragment.clone()]
            .into_iter()
            .chain(row.cells.iter().map(|c| format_value(c.value)))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::csv_header(&self.columns))?;
        for row in &self.rows {
            w.write_record(Self::csv_record(row))?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// One JSON object per row: id, fragment, values (null when missing) and,
    /// for word-property metrics, coverage.
    pub fn jsonl_row(columns: &[String], row: &TableRow) -> Value {
        let mut values = Map::new();
        let mut coverage = Map::new();
        for (key, cell) in columns.iter().zip(&row.cells) {
            values.insert(key.clone(), cell.value.filter(|v| v.is_finite()).map_or(Value::Null, Value::from));
            if let Some(c) = cell.coverage {
                coverage.insert(key.clone(), Value::from(c));
            }
        }
        let mut obj = Map::new();
        obj.insert("id".into(), Value::from(row.record_id.clone()));
        obj.insert("fragment".into(), Value::from(row.fragment.clone()));
        obj.insert("values".into(), Value::Object(values));
        if !coverage.is_empty() {
            obj.insert("coverage".into(), Value::Object(coverage));
        }
        Value::Object(obj)
    }

    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> Result<()> {
        for row in &self.rows {
            let line = serde_json::to_string(&Self::jsonl_row(&self.columns, row))?;
            writeln!(writer, "{line}").map_err(|e| Error::io("<jsonl>", e))?;
        }
        Ok(())
    }

    /// Reads a table written by [`write_csv`](Self::write_csv). Coverage is not
    /// part of the CSV form.
    pub fn read_csv<R: Read>(reader: R, origin: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "id" || &headers[1] != "fragment" {
            return Err(Error::MalformedRow {
                origin: origin.to_string(),
                row: 1,
                message: "header must start with `id,fragment`".into(),
            });
        }
        let columns: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row_no = i + 2;
            let cells = rec
                .iter()
                .skip(2)
                .map(|s| {
                    if s.is_empty() {
                        Ok(Cell::default())
                    } else {
                        s.parse::<f64>().map(|v| Cell::from(Some(v))).map_err(|_| Error::MalformedRow {
                            origin: origin.to_string(),
                            row: row_no,
                            message: format!("not a number: `{s}`"),
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(TableRow {
                record_id: rec[0].to_string(),
                fragment: rec[1].to_string(),
                cells,
            });
        }
        Ok(CharacteristicsTable { columns, rows })
    }

    /// Counts of missing cells per column.
    pub fn missing_counts(&self) -> BTreeMap<String, usize> {
        self.columns
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), self.rows.iter().filter(|r| r.cells[i].value.is_none()).count()))
            .collect()
    }
}
