use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use tipc::capacity::CapacityReport;

use crate::error::CliError;

/// Writes through a temporary file in the target directory, then renames
/// it into place so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let fail = |e: std::io::Error| CliError::data(format!("writing {}: {e}", path.display()));
    std::fs::create_dir_all(&dir).map_err(fail)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Header row plus one record per entry of `rows`.
pub fn write_csv<R, I>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    R: IntoIterator<Item = String>,
    I: IntoIterator<Item = R>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::data(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    write_atomic(path, &bytes)
}

pub const REPORT_HEADER: [&str; 4] = ["spec", "order", "raw", "thresholded"];

pub fn write_report_csv(path: &Path, rep: &CapacityReport) -> Result<(), CliError> {
    write_csv(
        path,
        &REPORT_HEADER,
        rep.entries.iter().map(|e| {
            [e.spec.clone(), e.order.to_string(), e.raw.to_string(), e.thresholded.to_string()]
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub spec: String,
    pub order: usize,
    pub raw: f64,
    pub thresholded: f64,
}

pub fn read_report_csv(path: &Path) -> Result<Vec<ReportRow>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .collect::<Result<Vec<ReportRow>, _>>()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Floats that may be infinite (Lyapunov exponents, diverged NRMSE). JSON
/// has no infinity, so non-finite values are written as the strings
/// `"inf"`, `"-inf"` and `"nan"`.
pub mod extended_f64 {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn to_repr(v: f64) -> serde_json::Value {
        if v.is_finite() {
            serde_json::json!(v)
        } else {
            serde_json::Value::String(v.to_string().to_lowercase())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => s.parse().map_err(|_| E::custom(format!("not a number: {s}"))),
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|&x| to_repr(x)).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
        }
    }
}
