use std::fmt::Write as _;

use jcbayes::sweep::{Config, Setup, Table};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One value in scientific notation with 17 significant digits.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    config: &'a Config,
    resolved: &'a Setup,
    result: &'a T,
}

pub fn json<T: Serialize>(config: &Config, resolved: &Setup, result: &T) -> String {
    let mut out = serde_json::to_string_pretty(&Document {
        config,
        resolved,
        result,
    })
    .expect("report types serialize");
    out.push('\n');
    out
}

/// Plain `key,value` table for reports that are not numeric grids.
pub fn key_value_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_locale_free_scientific() {
        assert_eq!(number(0.1), "1.0000000000000001e-1");
        assert_eq!(number(-2.5), "-2.5000000000000000e0");
        assert!(!number(1234.5).contains(' '));
    }

    #[test]
    fn csv_has_header_and_lf_lines() {
        let t = Table {
            columns: vec!["axis".into(), "c_min".into()],
            rows: vec![vec![1.0, 0.5], vec![2.0, 0.25]],
        };
        let s = csv(&t);
        assert!(!s.contains('\r'));
        assert_eq!(s.lines().count(), 3);
        assert_eq!(s.lines().next(), Some("axis,c_min"));
    }
}
