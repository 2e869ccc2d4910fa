//! Per-subject records, dataset validation and CSV ingestion.
//!
//! Gains are always recomputed from the two measurements; a `gain` column in
//! an input file is ignored.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Binary group label. `Zero` is the reference group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Group {
    Zero,
    One,
}

impl Group {
    pub const BOTH: [Group; 2] = [Group::Zero, Group::One];

    pub fn index(self) -> usize {
        match self {
            Group::Zero => 0,
            Group::One => 1,
        }
    }

    /// 0.0 for `Zero`, 1.0 for `One`.
    pub fn indicator(self) -> f64 {
        self.index() as f64
    }

    pub fn from_index(i: usize) -> Option<Group> {
        match i {
            0 => Some(Group::Zero),
            1 => Some(Group::One),
            _ => None,
        }
    }
}

impl From<Group> for u8 {
    fn from(g: Group) -> u8 {
        g.index() as u8
    }
}

impl TryFrom<u8> for Group {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, Self::Error> {
        Group::from_index(v as usize).ok_or_else(|| format!("group label must be 0 or 1, got {v}"))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Measured variables of a subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    WInitial,
    WFinal,
    Gain,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::WInitial => "w_initial",
            Variable::WFinal => "w_final",
            Variable::Gain => "gain",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub subject_id: String,
    pub group: Group,
    pub w_initial: f64,
    pub w_final: f64,
    gain: f64,
}

impl Observation {
    pub fn new(subject_id: impl Into<String>, group: Group, w_initial: f64, w_final: f64) -> Result<Self> {
        let subject_id = subject_id.into();
        if !w_initial.is_finite() || !w_final.is_finite() {
            return Err(Error::Validation(format!(
                "subject `{subject_id}` has a non-finite measurement"
            )));
        }
        Ok(Observation {
            subject_id,
            group,
            w_initial,
            w_final,
            gain: w_final - w_initial,
        })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn value(&self, var: Variable) -> f64 {
        match var {
            Variable::WInitial => self.w_initial,
            Variable::WFinal => self.w_final,
            Variable::Gain => self.gain,
        }
    }
}

/// An ordered, validated collection of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    observations: Vec<Observation>,
    group_counts: [usize; 2],
    fingerprint: String,
}

impl Dataset {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(observations.len());
        let mut group_counts = [0usize; 2];
        for (row, obs) in observations.iter().enumerate() {
            if !seen.insert(obs.subject_id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate subject_id `{}` at row {}",
                    obs.subject_id,
                    row + 1
                )));
            }
            group_counts[obs.group.index()] += 1;
        }
        let fingerprint = fingerprint_of(&observations);
        Ok(Dataset {
            observations,
            group_counts,
            fingerprint,
        })
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn group_counts(&self) -> [usize; 2] {
        self.group_counts
    }

    pub fn count(&self, group: Group) -> usize {
        self.group_counts[group.index()]
    }

    /// SHA-256 over the rows, hex encoded. Ties fits to the data they came from.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn values(&self, var: Variable) -> Vec<f64> {
        self.observations.iter().map(|o| o.value(var)).collect()
    }

    pub fn groups(&self) -> Vec<Group> {
        self.observations.iter().map(|o| o.group).collect()
    }

    /// Fails unless both groups have at least one observation.
    pub fn require_both_groups(&self) -> Result<()> {
        for g in Group::BOTH {
            if self.count(g) == 0 {
                return Err(Error::Validation(format!("group {g} has no observations")));
            }
        }
        Ok(())
    }

    pub fn group_mean(&self, group: Group, var: Variable) -> Option<f64> {
        let n = self.count(group);
        if n == 0 {
            return None;
        }
        let sum: f64 = self
            .observations
            .iter()
            .filter(|o| o.group == group)
            .map(|o| o.value(var))
            .sum();
        Some(sum / n as f64)
    }
}

fn fingerprint_of(observations: &[Observation]) -> String {
    let mut hasher = Sha256::new();
    for o in observations {
        hasher.update((o.subject_id.len() as u64).to_le_bytes());
        hasher.update(o.subject_id.as_bytes());
        hasher.update([o.group.index() as u8]);
        hasher.update(o.w_initial.to_bits().to_le_bytes());
        hasher.update(o.w_final.to_bits().to_le_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Names of the CSV columns holding each field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub id: String,
    pub group: String,
    pub w_initial: String,
    pub w_final: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            id: "id".into(),
            group: "sex".into(),
            w_initial: "w_initial".into(),
            w_final: "w_final".into(),
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, columns: &ColumnMap) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, columns)
}

/// Parses a comma-delimited file with a mandatory header row.
///
/// Row numbers in errors count data rows from 1 (the header is not counted).
pub fn read_csv<R: Read>(reader: R, columns: &ColumnMap) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .delimiter(b',')
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema {
                column: name.to_string(),
            })
    };
    let id_col = find(&columns.id)?;
    let group_col = find(&columns.group)?;
    let initial_col = find(&columns.w_initial)?;
    let final_col = find(&columns.w_final)?;

    let mut observations = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let field = |col: usize| record.get(col).unwrap_or("").trim();
        let group = match field(group_col) {
            "0" => Group::Zero,
            "1" => Group::One,
            other => {
                return Err(Error::Parse {
                    row,
                    message: format!("group value `{other}` is not 0 or 1"),
                })
            }
        };
        let measurement = |col: usize, name: &str| -> Result<f64> {
            let raw = field(col);
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(_) => Err(Error::Parse {
                    row,
                    message: format!("{name} value `{raw}` is not finite"),
                }),
                Err(_) => Err(Error::Parse {
                    row,
                    message: format!("{name} value `{raw}` is not a number"),
                }),
            }
        };
        let w_initial = measurement(initial_col, &columns.w_initial)?;
        let w_final = measurement(final_col, &columns.w_final)?;
        observations.push(Observation::new(field(id_col), group, w_initial, w_final)?);
    }
    Dataset::new(observations)
}

/// Writes the default schema plus a derived `gain` column.
///
/// Floats use the shortest representation that parses back to the same bits.
pub fn write_csv<W: Write>(writer: W, ds: &Dataset) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().from_writer(writer);
    let cols = ColumnMap::default();
    wtr.write_record([
        cols.id.as_str(),
        cols.group.as_str(),
        cols.w_initial.as_str(),
        cols.w_final.as_str(),
        "gain",
    ])?;
    for o in ds.observations() {
        wtr.write_record([
            o.subject_id.clone(),
            o.group.to_string(),
            o.w_initial.to_string(),
            o.w_final.to_string(),
            o.gain().to_string(),
        ])?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}

pub fn save_csv(path: impl AsRef<Path>, ds: &Dataset) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(std::io::BufWriter::new(file), ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset> {
        read_csv(text.as_bytes(), &ColumnMap::default())
    }

    #[test]
    fn well_formed_file_recomputes_gain() {
        let ds = parse(
            "id,sex,w_initial,w_final,gain\n\
             a,0,50,52,999\n\
             b,1,60,59.5,999\n\
             c,0,48.25,48.25,0\n\
             d,1,70,75,0\n",
        )
        .unwrap();
        assert_eq!(ds.len(), 4);
        let gains: Vec<f64> = ds.observations().iter().map(|o| o.gain()).collect();
        assert_eq!(gains, vec![2.0, -0.5, 0.0, 5.0]);
        assert_eq!(ds.group_counts(), [2, 2]);
        assert_eq!(ds.observations()[1].subject_id, "b");
    }

    #[test]
    fn group_value_two_is_rejected_with_row() {
        let err = parse("id,sex,w_initial,w_final\na,0,1,2\nb,2,1,2\n").unwrap_err();
        match err {
            Error::Parse { row, message } => {
                assert_eq!(row, 2);
                assert!(message.contains("`2`"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_named() {
        let err = parse("id,sex,w_initial\na,0,1\n").unwrap_err();
        assert!(matches!(err, Error::Schema { ref column } if column == "w_final"));
    }

    #[test]
    fn non_numeric_and_non_finite_measurements() {
        let err = parse("id,sex,w_initial,w_final\na,0,1,2\nb,1,x,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }));
        let err = parse("id,sex,w_initial,w_final\na,0,1,inf\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
        let err = parse("id,sex,w_initial,w_final\na,0,NaN,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = parse("id,sex,w_initial,w_final\na,0,1,2\na,1,1,2\n").unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("duplicate")));
    }

    #[test]
    fn remapped_columns() {
        let cols = ColumnMap {
            id: "subject".into(),
            group: "arm".into(),
            w_initial: "pre".into(),
            w_final: "post".into(),
        };
        let ds = read_csv("post,pre,arm,subject\n3,1,1,x\n".as_bytes(), &cols).unwrap();
        assert_eq!(ds.observations()[0].gain(), 2.0);
        assert_eq!(ds.observations()[0].group, Group::One);
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = parse("id,sex,w_initial,w_final\na,0,1,2\nb,1,1,2\n").unwrap();
        let b = parse("id,sex,w_initial,w_final\na,0,1,2\nb,1,1,2.0000001\n").unwrap();
        assert_eq!(a.fingerprint().len(), 64);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }

    #[test]
    fn empty_group_detected() {
        let ds = parse("id,sex,w_initial,w_final\na,0,1,2\n").unwrap();
        assert!(ds.require_both_groups().is_err());
    }
}
