//! Feature tables: one row per test, one column per whole feature, with the
//! subject id, routine, cohort and strength truth leading each row.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::recording::{Cohort, Routine};
use crate::whole_features::{feature_origin, FeatureOrigin};

pub const LEADING_COLUMNS: [&str; 4] = ["subject_id", "routine", "cohort", "truth"];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub subject_id: String,
    pub routine: Routine,
    pub cohort: Cohort,
    /// Averaged physician strength; absent for healthy subjects.
    pub truth: Option<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<FeatureRow>,
    pub normalized: bool,
}

/// Feature families compared in the modality ablation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum ModalitySubset {
    #[serde(rename = "imu")]
    Imu,
    #[serde(rename = "pressure")]
    Pressure,
    /// Both single-modality families, without cross-modal fusion features.
    #[serde(rename = "imu+pressure")]
    ImuPressure,
    #[serde(rename = "all")]
    All,
}

impl ModalitySubset {
    pub const ALL: [ModalitySubset; 4] = [
        ModalitySubset::Imu,
        ModalitySubset::Pressure,
        ModalitySubset::ImuPressure,
        ModalitySubset::All,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ModalitySubset::Imu => "imu",
            ModalitySubset::Pressure => "pressure",
            ModalitySubset::ImuPressure => "imu+pressure",
            ModalitySubset::All => "all",
        }
    }

    pub fn admits(self, origin: FeatureOrigin) -> bool {
        use FeatureOrigin::*;
        match self {
            ModalitySubset::Imu => origin == Imu,
            ModalitySubset::Pressure => origin == Pressure,
            ModalitySubset::ImuPressure => origin != CrossModal,
            ModalitySubset::All => true,
        }
    }
}

impl std::fmt::Display for ModalitySubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for ModalitySubset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModalitySubset::ALL
            .into_iter()
            .find(|m| m.token().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Config(format!("unknown modality `{s}` (expected imu, pressure, imu+pressure or all)"))
            })
    }
}

impl FeatureTable {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            rows: Vec::new(),
            normalized: false,
        }
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn push(&mut self, row: FeatureRow) -> Result<()> {
        if row.values.len() != self.names.len() {
            return Err(Error::Schema(format!(
                "row for {} has {} values, table has {} features",
                row.subject_id,
                row.values.len(),
                self.names.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, feature: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.values[feature]).collect()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> FeatureTable {
        FeatureTable {
            names: self.names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            normalized: self.normalized,
        }
    }

    pub fn filter_rows(&self, keep: impl Fn(&FeatureRow) -> bool) -> FeatureTable {
        FeatureTable {
            names: self.names.clone(),
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
            normalized: self.normalized,
        }
    }

    /// Columns at `features`, in that order.
    pub fn select_columns(&self, features: &[usize]) -> FeatureTable {
        FeatureTable {
            names: features.iter().map(|&k| self.names[k].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| FeatureRow {
                    values: features.iter().map(|&k| r.values[k]).collect(),
                    ..r.clone_meta()
                })
                .collect(),
            normalized: self.normalized,
        }
    }

    /// Columns named in `names`; unknown names are a schema error.
    pub fn select_named(&self, names: &[String]) -> Result<FeatureTable> {
        let idx = names
            .iter()
            .map(|n| {
                self.feature_index(n)
                    .ok_or_else(|| Error::Schema(format!("feature `{n}` not in table")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.select_columns(&idx))
    }

    pub fn modality_subset(&self, subset: ModalitySubset) -> Result<FeatureTable> {
        let mut keep = Vec::new();
        for (k, n) in self.names.iter().enumerate() {
            if subset.admits(feature_origin(n)?) {
                keep.push(k);
            }
        }
        if keep.is_empty() {
            return Err(Error::Schema(format!("no features left in the {subset} subset")));
        }
        Ok(self.select_columns(&keep))
    }

    /// Distinct subject ids, sorted.
    pub fn subjects(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| r.subject_id.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(LEADING_COLUMNS.iter().copied().chain(self.names.iter().map(String::as_str)))?;
        let mut rec = Vec::with_capacity(LEADING_COLUMNS.len() + self.names.len());
        for r in &self.rows {
            rec.clear();
            rec.push(r.subject_id.clone());
            rec.push(r.routine.token().to_string());
            rec.push(r.cohort.token().to_string());
            rec.push(r.truth.map(|t| t.to_string()).unwrap_or_default());
            rec.extend(r.values.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<FeatureTable> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = rdr.headers()?.clone();
        if header.len() < LEADING_COLUMNS.len()
            || header.iter().zip(LEADING_COLUMNS).any(|(h, want)| h != want)
        {
            return Err(Error::Schema(format!(
                "feature table must start with columns {}",
                LEADING_COLUMNS.join(",")
            )));
        }
        let names: Vec<String> = header.iter().skip(LEADING_COLUMNS.len()).map(String::from).collect();
        let mut table = FeatureTable::new(names);
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let perr = |msg: String| Error::Parse { line, msg };
            if rec.len() != header.len() {
                return Err(perr(format!("{} fields, header has {}", rec.len(), header.len())));
            }
            let routine: Routine = rec[1].parse().map_err(|e: Error| perr(e.to_string()))?;
            let cohort: Cohort = rec[2].parse().map_err(|e: Error| perr(e.to_string()))?;
            let truth = match rec[3].trim() {
                "" => None,
                t => Some(parse_finite(t).map_err(perr)?),
            };
            let values = rec
                .iter()
                .skip(LEADING_COLUMNS.len())
                .map(parse_finite)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(perr)?;
            table.push(FeatureRow {
                subject_id: rec[0].to_string(),
                routine,
                cohort,
                truth,
                values,
            })?;
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<FeatureTable> {
        let f = std::fs::File::open(path).map_err(|_| Error::MissingInput {
            path: path.to_path_buf(),
            hint: "run `smartgait extract` first to build the feature table".into(),
        })?;
        FeatureTable::read_csv(std::io::BufReader::new(f))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

impl FeatureRow {
    fn clone_meta(&self) -> FeatureRow {
        FeatureRow {
            subject_id: self.subject_id.clone(),
            routine: self.routine,
            cohort: self.cohort,
            truth: self.truth,
            values: Vec::new(),
        }
    }
}

fn parse_finite(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite value `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FeatureTable {
        let mut t = FeatureTable::new(vec![
            "LForeAccX_Max_Mean".into(),
            "RMatForce_SD_Max".into(),
            "LForeAccX_MaxTime_RImageMax_SD".into(),
        ]);
        t.push(FeatureRow {
            subject_id: "P01".into(),
            routine: Routine::RightTurning,
            cohort: Cohort::Patient,
            truth: Some(3.835),
            values: vec![0.1, -2.5e-7, 1e300],
        })
        .unwrap();
        t.push(FeatureRow {
            subject_id: "H01".into(),
            routine: Routine::Straight,
            cohort: Cohort::Healthy,
            truth: None,
            values: vec![0.0, 3.0, -1.0 / 3.0],
        })
        .unwrap();
        t
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = FeatureTable::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        assert!(String::from_utf8(buf).unwrap().starts_with("subject_id,routine,cohort,truth,"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FeatureTable::read_csv("a,b\n1,2\n".as_bytes()).is_err());
        let bad = "subject_id,routine,cohort,truth,F\nS,straight,healthy,,NaN\n";
        assert!(FeatureTable::read_csv(bad.as_bytes()).is_err());
        let short = "subject_id,routine,cohort,truth,F\nS,straight,healthy,\n";
        assert!(FeatureTable::read_csv(short.as_bytes()).is_err());
    }

    #[test]
    fn modality_filters() {
        let t = sample();
        let imu = t.modality_subset(ModalitySubset::Imu).unwrap();
        assert_eq!(imu.names, vec!["LForeAccX_Max_Mean"]);
        let pressure = t.modality_subset(ModalitySubset::Pressure).unwrap();
        assert_eq!(pressure.names, vec!["RMatForce_SD_Max"]);
        assert_eq!(t.modality_subset(ModalitySubset::ImuPressure).unwrap().n_features(), 2);
        assert_eq!(t.modality_subset(ModalitySubset::All).unwrap(), t);
        assert_eq!("IMU+Pressure".parse::<ModalitySubset>().unwrap(), ModalitySubset::ImuPressure);
    }

    #[test]
    fn subjects_sorted_unique() {
        assert_eq!(sample().subjects(), vec!["H01", "P01"]);
    }
}
