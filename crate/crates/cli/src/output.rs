use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use transhyp::verify::PointSample;

use crate::error::{CliError, CliResult};

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header `x_1,...,x_n,W,S_1,...,S_n`, one row per sample in grid order.
pub fn points_csv(samples: &[PointSample], n: usize) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=n)
        .map(|i| format!("x_{i}"))
        .chain(std::iter::once("W".to_string()))
        .chain((1..=n).map(|r| format!("S_{r}")))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for p in samples {
        let row: Vec<String> = p
            .x
            .iter()
            .chain(std::iter::once(&p.w))
            .chain(&p.s[1..])
            .map(|&v| fmt_f64(v))
            .collect();
        writeln!(out, "{}", row.join(",")).expect("writing to a String cannot fail");
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
