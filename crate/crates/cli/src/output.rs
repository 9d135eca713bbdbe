use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qwres::config::{fmt_complex, fmt_f64};
use qwres::C64;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::CliError;

/// A JSON number with 17 significant digits; `null` when not finite.
pub(crate) fn num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".to_string()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

/// `[re, im]` with 17 significant digits in each part.
pub(crate) fn cx(z: C64) -> Box<RawValue> {
    if z.re.is_finite() && z.im.is_finite() {
        RawValue::from_string(fmt_complex(z)).expect("formatted pair is valid JSON")
    } else {
        RawValue::from_string("null".to_string()).unwrap()
    }
}

/// CSV field for a float, `nan` when not finite.
pub(crate) fn field(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "nan".to_string()
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("output types serialize");
    out.push(b'\n');
    out
}

pub(crate) fn to_csv<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    w.into_inner().expect("writing to memory")
}

/// Writes `bytes` to `path`, or to `stdout` when there is none.
pub(crate) fn emit(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    bytes: &[u8],
) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => stdout.write_all(bytes).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

/// `runs/evolve.csv` becomes `runs/evolve.<tag>.csv`.
pub(crate) fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.csv"))
}
