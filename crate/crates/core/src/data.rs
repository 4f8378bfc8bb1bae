//! Table ingestion and the labeled feature matrix.
//!
//! Three CSV tables (ERP averages, EEG trial features, demographics) are
//! parsed, validated against their exact header sets, and merged on the
//! shared subject column into one matrix in the canonical column order.
//! Rows with missing (empty) cells are dropped at ingestion and counted.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{Column, ColumnKind, ColumnSchema, DatasetGroup, Label, TableKind};

/// A parsed, validated input table. Numeric cells only; `gender` is already
/// encoded male -> 0, female -> 1.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub kind: TableKind,
    /// Feature column names in canonical order for this table kind.
    pub feature_names: Vec<String>,
    pub subjects: Vec<String>,
    pub groups: Vec<Label>,
    /// Row-major numeric cells, `subjects.len() x feature_names.len()`.
    values: Vec<f64>,
    /// Rows discarded because one or more cells were empty.
    pub dropped_rows: usize,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.subjects.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.feature_names.len();
        &self.values[i * w..(i + 1) * w]
    }
}

/// Header names each table kind must carry, in canonical order.
pub fn required_headers(kind: TableKind) -> Vec<String> {
    match kind {
        TableKind::Demographics => ["subject", "age", "gender", "education", "group"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        TableKind::ErpAverages => {
            let mut h = vec!["subject".to_string(), "group".to_string()];
            for col in ColumnSchema::canonical().columns() {
                if matches!(col.kind, ColumnKind::Timing | ColumnKind::Erp(..)) {
                    h.push(col.name.clone());
                }
            }
            h
        }
        TableKind::EegTrials => {
            let mut h = vec!["subject".to_string(), "group".to_string()];
            for col in ColumnSchema::canonical().columns() {
                if matches!(col.kind, ColumnKind::RawElectrode(_)) {
                    h.push(col.name.clone());
                }
            }
            h
        }
    }
}

/// Reads and validates one CSV table from disk.
pub fn load_table(path: &Path, kind: TableKind) -> Result<RawTable> {
    if !path.exists() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&text, kind)
}

/// Parses one CSV table from in-memory text.
///
/// Header names are matched as a set; column order in the file may vary.
/// A row with any empty cell is dropped and counted in `dropped_rows`.
pub fn parse_table(text: &str, kind: TableKind) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers: Vec<String> = match reader.headers() {
        Ok(h) if !h.is_empty() && h.iter().any(|f| !f.is_empty()) => {
            h.iter().map(|f| f.to_string()).collect()
        }
        _ => return Err(Error::MissingHeader { table: kind }),
    };

    let required = required_headers(kind);
    let required_set: HashSet<&str> = required.iter().map(|s| s.as_str()).collect();
    let header_set: HashSet<&str> = headers.iter().map(|s| s.as_str()).collect();
    let missing: Vec<String> = required
        .iter()
        .filter(|name| !header_set.contains(name.as_str()))
        .cloned()
        .collect();
    let mut unexpected: Vec<String> = headers
        .iter()
        .filter(|name| !required_set.contains(name.as_str()))
        .cloned()
        .collect();
    // A repeated header would make the column mapping ambiguous.
    for (i, name) in headers.iter().enumerate() {
        if headers[..i].contains(name) {
            unexpected.push(format!("{name} (duplicate)"));
        }
    }
    if !missing.is_empty() || !unexpected.is_empty() {
        return Err(Error::HeaderMismatch {
            table: kind,
            missing,
            unexpected,
        });
    }

    // Position of every required column inside the file.
    let file_pos: HashMap<&str, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), i))
        .collect();
    let subject_pos = file_pos["subject"];
    let group_pos = file_pos["group"];
    let feature_names: Vec<String> = required
        .iter()
        .filter(|n| n.as_str() != "subject" && n.as_str() != "group")
        .cloned()
        .collect();
    let feature_pos: Vec<usize> = feature_names.iter().map(|n| file_pos[n.as_str()]).collect();

    let mut subjects = Vec::new();
    let mut groups = Vec::new();
    let mut values = Vec::new();
    let mut dropped_rows = 0usize;

    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1; // 1-based data row, excluding the header
        let record = record.map_err(|_| Error::NonNumericCell {
            table: kind,
            row,
            column: "<record>".to_string(),
            value: "<unreadable>".to_string(),
        })?;

        if record.iter().any(|cell| cell.is_empty()) {
            dropped_rows += 1;
            continue;
        }

        let subject = record.get(subject_pos).unwrap_or("").to_string();
        let group_cell = record.get(group_pos).unwrap_or("");
        let group = Label::parse(group_cell).ok_or_else(|| Error::InvalidGroup {
            table: kind,
            row,
            value: group_cell.to_string(),
        })?;

        let mut row_values = Vec::with_capacity(feature_names.len());
        for (name, &pos) in feature_names.iter().zip(&feature_pos) {
            let cell = record.get(pos).unwrap_or("");
            let parsed = if name == "gender" {
                parse_gender(cell)
            } else {
                cell.parse::<f64>().ok().filter(|v| v.is_finite())
            };
            match parsed {
                Some(v) => row_values.push(v),
                None => {
                    return Err(Error::NonNumericCell {
                        table: kind,
                        row,
                        column: name.clone(),
                        value: cell.to_string(),
                    })
                }
            }
        }

        subjects.push(subject);
        groups.push(group);
        values.extend(row_values);
    }

    if dropped_rows > 0 {
        log::warn!("{kind}: dropped {dropped_rows} row(s) with missing cells");
    }

    Ok(RawTable {
        kind,
        feature_names,
        subjects,
        groups,
        values,
        dropped_rows,
    })
}

/// Gender encoding: male -> 0, female -> 1. Numeric 0/1 pass through.
fn parse_gender(cell: &str) -> Option<f64> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "male" | "m" | "0" => Some(0.0),
        "female" | "f" | "1" => Some(1.0),
        _ => None,
    }
}

/// Dense labeled feature matrix: one row per observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    schema: ColumnSchema,
    /// Row-major, `n_rows x schema.len()`.
    values: Vec<f64>,
    labels: Vec<Label>,
    subject_ids: Vec<String>,
}

impl FeatureMatrix {
    /// Builds a matrix, checking shape agreement and that every value is finite.
    pub fn new(
        schema: ColumnSchema,
        values: Vec<f64>,
        labels: Vec<Label>,
        subject_ids: Vec<String>,
    ) -> Result<Self> {
        let n_cols = schema.len();
        if labels.len() != subject_ids.len()
            || (n_cols == 0 && !values.is_empty())
            || (n_cols > 0 && values.len() != labels.len() * n_cols)
        {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "matrix shape mismatch: {} values, {} labels, {} subject ids, {} columns",
                    values.len(),
                    labels.len(),
                    subject_ids.len(),
                    n_cols
                ),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                row: bad / n_cols.max(1),
                column: schema
                    .columns()
                    .get(bad % n_cols.max(1))
                    .map(|c| c.name.clone())
                    .unwrap_or_default(),
            });
        }
        Ok(Self {
            schema,
            values,
            labels,
            subject_ids,
        })
    }

    pub fn schema(&self) -> &ColumnSchema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.schema.len();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.schema.len() + col]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    /// Copies one column out of the matrix.
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|r| self.value(r, col)).collect()
    }

    /// Keeps exactly the columns a dataset group selects, order preserved.
    pub fn select_group(&self, group: DatasetGroup) -> Result<FeatureMatrix> {
        let keep = self.schema.group_indices(group);
        if keep.is_empty() {
            return Err(Error::EmptySelection { group });
        }
        if keep.len() == self.schema.len() {
            return Ok(self.clone());
        }
        Ok(self.subset_columns(&keep))
    }

    /// Removes the named columns; relative order of survivors is preserved.
    pub fn drop_columns(&self, names: &HashSet<String>) -> Result<FeatureMatrix> {
        for name in names {
            if self.schema.index_of(name).is_none() {
                return Err(Error::UnknownColumn { name: name.clone() });
            }
        }
        let keep: Vec<usize> = self
            .schema
            .columns()
            .iter()
            .enumerate()
            .filter(|(_, c)| !names.contains(&c.name))
            .map(|(i, _)| i)
            .collect();
        Ok(self.subset_columns(&keep))
    }

    fn subset_columns(&self, keep: &[usize]) -> FeatureMatrix {
        let columns: Vec<Column> = keep
            .iter()
            .map(|&i| self.schema.columns()[i].clone())
            .collect();
        let mut values = Vec::with_capacity(self.n_rows() * keep.len());
        for r in 0..self.n_rows() {
            let row = self.row(r);
            values.extend(keep.iter().map(|&i| row[i]));
        }
        FeatureMatrix {
            schema: ColumnSchema::new(columns).expect("subset of unique names stays unique"),
            values,
            labels: self.labels.clone(),
            subject_ids: self.subject_ids.clone(),
        }
    }

    /// Copies the given rows (in the given order) into a new matrix.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols());
        let mut labels = Vec::with_capacity(rows.len());
        let mut subject_ids = Vec::with_capacity(rows.len());
        for &r in rows {
            values.extend_from_slice(self.row(r));
            labels.push(self.labels[r]);
            subject_ids.push(self.subject_ids[r].clone());
        }
        FeatureMatrix {
            schema: self.schema.clone(),
            values,
            labels,
            subject_ids,
        }
    }

    /// Replaces the cell values, keeping schema/labels/ids. Used by the
    /// standardizer; the replacement must have the same shape.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> FeatureMatrix {
        assert_eq!(values.len(), self.values.len());
        FeatureMatrix {
            schema: self.schema.clone(),
            values,
            labels: self.labels.clone(),
            subject_ids: self.subject_ids.clone(),
        }
    }

    /// The raw row-major cell buffer.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Joins the three tables into one canonical-schema matrix.
///
/// ERP and EEG rows pair within each subject: positionally when the subject
/// has the same count in both tables, otherwise a table holding exactly one
/// row per subject is broadcast across the other table's rows. Demographics
/// must be unique per subject, and the group label must agree everywhere.
pub fn merge(erp: &RawTable, eeg: &RawTable, demo: &RawTable) -> Result<FeatureMatrix> {
    debug_assert_eq!(erp.kind, TableKind::ErpAverages);
    debug_assert_eq!(eeg.kind, TableKind::EegTrials);
    debug_assert_eq!(demo.kind, TableKind::Demographics);

    // Demographics: one row per subject.
    let mut demo_by_subject: HashMap<&str, usize> = HashMap::new();
    for (i, subject) in demo.subjects.iter().enumerate() {
        if demo_by_subject.insert(subject.as_str(), i).is_some() {
            return Err(Error::DuplicateDemographics {
                subject: subject.clone(),
            });
        }
    }

    let eeg_rows_by_subject = rows_by_subject(eeg);
    let erp_rows_by_subject = rows_by_subject(erp);

    // Decide which table drives the observation order.
    let counts_match = erp_rows_by_subject.len() == eeg_rows_by_subject.len()
        && erp_rows_by_subject
            .iter()
            .all(|(s, rows)| eeg_rows_by_subject.get(s).map(Vec::len) == Some(rows.len()));
    let eeg_single = eeg_rows_by_subject.values().all(|rows| rows.len() == 1);
    let erp_single = erp_rows_by_subject.values().all(|rows| rows.len() == 1);

    let (driver, passenger, passenger_rows, driver_is_erp) = if counts_match || eeg_single {
        (erp, eeg, &eeg_rows_by_subject, true)
    } else if erp_single {
        (eeg, erp, &erp_rows_by_subject, false)
    } else {
        let subject = erp
            .subjects
            .iter()
            .find(|s| {
                let e = erp_rows_by_subject.get(s.as_str()).map_or(0, Vec::len);
                let g = eeg_rows_by_subject.get(s.as_str()).map_or(0, Vec::len);
                e != g && e != 1 && g != 1
            })
            .cloned()
            .unwrap_or_default();
        let erp_rows = erp_rows_by_subject
            .get(subject.as_str())
            .map_or(0, Vec::len);
        let eeg_rows = eeg_rows_by_subject
            .get(subject.as_str())
            .map_or(0, Vec::len);
        return Err(Error::MismatchedObservations {
            subject,
            erp_rows,
            eeg_rows,
        });
    };

    let schema = ColumnSchema::canonical();
    let erp_width = erp.feature_names.len(); // ITI, time_ms, then 36 ERP columns
    let eeg_width = eeg.feature_names.len(); // 9 raw-electrode columns
    let mut values = Vec::with_capacity(driver.n_rows() * schema.len());
    let mut labels = Vec::with_capacity(driver.n_rows());
    let mut subject_ids = Vec::with_capacity(driver.n_rows());
    let mut passenger_cursor: HashMap<&str, usize> = HashMap::new();

    for (i, subject) in driver.subjects.iter().enumerate() {
        let &demo_row =
            demo_by_subject
                .get(subject.as_str())
                .ok_or_else(|| Error::UnknownSubject {
                    subject: subject.clone(),
                })?;

        let candidates =
            passenger_rows
                .get(subject.as_str())
                .ok_or_else(|| Error::UnknownSubject {
                    subject: subject.clone(),
                })?;
        let passenger_row = if candidates.len() == 1 {
            candidates[0]
        } else {
            let cursor = passenger_cursor.entry(subject.as_str()).or_insert(0);
            let row = candidates[*cursor];
            *cursor += 1;
            row
        };

        let label = driver.groups[i];
        if passenger.groups[passenger_row] != label || demo.groups[demo_row] != label {
            return Err(Error::GroupMismatch {
                subject: subject.clone(),
            });
        }

        let (erp_vals, eeg_vals) = if driver_is_erp {
            (driver.row(i), passenger.row(passenger_row))
        } else {
            (passenger.row(passenger_row), driver.row(i))
        };
        debug_assert_eq!(erp_vals.len(), erp_width);
        debug_assert_eq!(eeg_vals.len(), eeg_width);

        values.extend_from_slice(erp_vals); // ITI, time_ms, 36 ERP
        values.extend_from_slice(eeg_vals); // 9 raw electrodes
        values.extend_from_slice(&demo.row(demo_row)[..3]); // age, gender, education

        labels.push(label);
        subject_ids.push(subject.clone());
    }

    FeatureMatrix::new(schema, values, labels, subject_ids)
}

fn rows_by_subject(table: &RawTable) -> HashMap<&str, Vec<usize>> {
    let mut map: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, subject) in table.subjects.iter().enumerate() {
        map.entry(subject.as_str()).or_default().push(i);
    }
    map
}
