//! Feature schema: electrode sites, ERP components, column kinds, class labels.
//!
//! The canonical feature layout is 50 columns: 2 timing columns (`ITI`,
//! `time_ms`), 36 ERP-component columns (9 electrodes x 4 components,
//! electrode-major), 9 raw-electrode columns, and 3 demographic columns
//! (`age`, `gender`, `education`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The nine scalp electrode sites carried by the feature set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Electrode {
    Fz,
    FCz,
    Cz,
    FC3,
    FC4,
    C3,
    C4,
    CP3,
    CP4,
}

impl Electrode {
    pub const ALL: [Electrode; 9] = [
        Electrode::Fz,
        Electrode::FCz,
        Electrode::Cz,
        Electrode::FC3,
        Electrode::FC4,
        Electrode::C3,
        Electrode::C4,
        Electrode::CP3,
        Electrode::CP4,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Electrode::Fz => "Fz",
            Electrode::FCz => "FCz",
            Electrode::Cz => "Cz",
            Electrode::FC3 => "FC3",
            Electrode::FC4 => "FC4",
            Electrode::C3 => "C3",
            Electrode::C4 => "C4",
            Electrode::CP3 => "CP3",
            Electrode::CP4 => "CP4",
        }
    }
}

impl fmt::Display for Electrode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The four per-electrode ERP component measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErpComponent {
    B0,
    N100,
    P200,
    B1,
}

impl ErpComponent {
    pub const ALL: [ErpComponent; 4] = [
        ErpComponent::B0,
        ErpComponent::N100,
        ErpComponent::P200,
        ErpComponent::B1,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ErpComponent::B0 => "B0",
            ErpComponent::N100 => "N100",
            ErpComponent::P200 => "P200",
            ErpComponent::B1 => "B1",
        }
    }
}

impl fmt::Display for ErpComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a feature column measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    /// One ERP component at one electrode site, e.g. `FCz_N100`.
    Erp(Electrode, ErpComponent),
    /// Per-trial signal feature from one electrode site.
    RawElectrode(Electrode),
    /// Trial timing (`ITI`, `time_ms`).
    Timing,
    /// Participant attribute (`age`, `gender`, `education`).
    Demographic,
}

/// A named feature column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

/// Ordered, uniquely named feature columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    columns: Vec<Column>,
}

impl ColumnSchema {
    /// Builds a schema from columns, rejecting duplicate names.
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        for (i, col) in columns.iter().enumerate() {
            if columns[..i].iter().any(|c| c.name == col.name) {
                return Err(Error::InvalidConfig {
                    reason: format!("duplicate column name '{}'", col.name),
                });
            }
        }
        Ok(Self { columns })
    }

    /// The canonical 50-column schema: 2 timing + 36 ERP + 9 raw + 3 demographic.
    pub fn canonical() -> Self {
        let mut columns = Vec::with_capacity(50);
        columns.push(Column {
            name: "ITI".to_string(),
            kind: ColumnKind::Timing,
        });
        columns.push(Column {
            name: "time_ms".to_string(),
            kind: ColumnKind::Timing,
        });
        for electrode in Electrode::ALL {
            for component in ErpComponent::ALL {
                columns.push(Column {
                    name: format!("{electrode}_{component}"),
                    kind: ColumnKind::Erp(electrode, component),
                });
            }
        }
        for electrode in Electrode::ALL {
            columns.push(Column {
                name: electrode.to_string(),
                kind: ColumnKind::RawElectrode(electrode),
            });
        }
        for name in ["age", "gender", "education"] {
            columns.push(Column {
                name: name.to_string(),
                kind: ColumnKind::Demographic,
            });
        }
        Self { columns }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Indices of the columns a dataset group selects, in schema order.
    pub fn group_indices(&self, group: DatasetGroup) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| group.selects(c.kind))
            .map(|(i, _)| i)
            .collect()
    }

    /// Short human-readable summary used in mismatch errors.
    pub fn summary(&self) -> String {
        format!(
            "{} columns [{}{}]",
            self.columns.len(),
            self.columns
                .iter()
                .take(4)
                .map(|c| c.name.as_str())
                .collect::<Vec<_>>()
                .join(", "),
            if self.columns.len() > 4 { ", ..." } else { "" }
        )
    }
}

/// Binary diagnosis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    /// Schizophrenia patient.
    Sz,
    /// Healthy control.
    Hc,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Sz => "SZ",
            Label::Hc => "HC",
        }
    }

    /// Parses `SZ`/`HC`, case-insensitive.
    pub fn parse(s: &str) -> Option<Label> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SZ" => Some(Label::Sz),
            "HC" => Some(Label::Hc),
            _ => None,
        }
    }

    /// Signed encoding used by margin classifiers: SZ -> +1, HC -> -1.
    pub fn signed(&self) -> f64 {
        match self {
            Label::Sz => 1.0,
            Label::Hc => -1.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which feature columns an experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetGroup {
    /// ERP-component columns only (36 in the canonical schema).
    ErpOnly,
    /// Raw-electrode + timing + demographic columns (14 in the canonical schema).
    EegDemographic,
    /// Every column.
    All,
}

impl DatasetGroup {
    pub fn selects(&self, kind: ColumnKind) -> bool {
        match self {
            DatasetGroup::ErpOnly => matches!(kind, ColumnKind::Erp(..)),
            DatasetGroup::EegDemographic => matches!(
                kind,
                ColumnKind::RawElectrode(_) | ColumnKind::Timing | ColumnKind::Demographic
            ),
            DatasetGroup::All => true,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DatasetGroup::ErpOnly => "erp",
            DatasetGroup::EegDemographic => "eeg-demo",
            DatasetGroup::All => "all",
        }
    }
}

impl fmt::Display for DatasetGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The three input tables the pipeline ingests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// `subject,group,ITI,time_ms,<36 ERP columns>`
    ErpAverages,
    /// `subject,group,<9 electrode columns>`
    EegTrials,
    /// `subject,age,gender,education,group`
    Demographics,
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableKind::ErpAverages => "erp_averages",
            TableKind::EegTrials => "eeg_trials",
            TableKind::Demographics => "demographics",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_schema_has_fifty_columns() {
        let schema = ColumnSchema::canonical();
        assert_eq!(schema.len(), 50);

        let count =
            |want: fn(ColumnKind) -> bool| schema.columns().iter().filter(|c| want(c.kind)).count();
        assert_eq!(count(|k| matches!(k, ColumnKind::Erp(..))), 36);
        assert_eq!(count(|k| matches!(k, ColumnKind::RawElectrode(_))), 9);
        assert_eq!(count(|k| matches!(k, ColumnKind::Timing)), 2);
        assert_eq!(count(|k| matches!(k, ColumnKind::Demographic)), 3);
    }

    #[test]
    fn canonical_schema_order_is_electrode_major() {
        let schema = ColumnSchema::canonical();
        let names: Vec<&str> = schema.names().collect();
        assert_eq!(names[0], "ITI");
        assert_eq!(names[1], "time_ms");
        assert_eq!(names[2], "Fz_B0");
        assert_eq!(names[3], "Fz_N100");
        assert_eq!(names[4], "Fz_P200");
        assert_eq!(names[5], "Fz_B1");
        assert_eq!(names[6], "FCz_B0");
        assert_eq!(names[37], "CP4_B1");
        assert_eq!(names[38], "Fz");
        assert_eq!(names[46], "CP4");
        assert_eq!(names[47], "age");
        assert_eq!(names[49], "education");
    }

    #[test]
    fn nine_unique_electrodes_four_unique_components() {
        let mut electrode_names: Vec<&str> = Electrode::ALL.iter().map(|e| e.as_str()).collect();
        electrode_names.sort_unstable();
        electrode_names.dedup();
        assert_eq!(electrode_names.len(), 9);

        let mut component_names: Vec<&str> = ErpComponent::ALL.iter().map(|c| c.as_str()).collect();
        component_names.sort_unstable();
        component_names.dedup();
        assert_eq!(component_names.len(), 4);
    }

    #[test]
    fn duplicate_column_names_rejected() {
        let cols = vec![
            Column {
                name: "a".into(),
                kind: ColumnKind::Timing,
            },
            Column {
                name: "a".into(),
                kind: ColumnKind::Demographic,
            },
        ];
        assert!(ColumnSchema::new(cols).is_err());
    }

    #[test]
    fn group_selection_counts() {
        let schema = ColumnSchema::canonical();
        assert_eq!(schema.group_indices(DatasetGroup::ErpOnly).len(), 36);
        assert_eq!(schema.group_indices(DatasetGroup::EegDemographic).len(), 14);
        assert_eq!(schema.group_indices(DatasetGroup::All).len(), 50);
    }

    #[test]
    fn label_parsing_and_encoding() {
        assert_eq!(Label::parse("sz"), Some(Label::Sz));
        assert_eq!(Label::parse(" HC "), Some(Label::Hc));
        assert_eq!(Label::parse("patient"), None);
        assert_eq!(Label::Sz.signed(), 1.0);
        assert_eq!(Label::Hc.signed(), -1.0);
    }
}
