//! CSV output.

use std::fmt::Write as _;

use sdnavail_core::scenarios::{SweepRow, SweepTable};

pub const HEADER: &str = "case,alpha_S,alpha_H,alpha_O,alpha_C,unavailability,method,ci_low,ci_high";

/// Minimum significant digits written for every number.
pub const MIN_SIGNIFICANT: usize = 12;

/// Shortest decimal that round-trips to `v`, zero-padded to at least
/// [`MIN_SIGNIFICANT`] significant digits. Never uses exponent notation.
pub fn format_decimal(v: f64) -> String {
    let mut s = format!("{v}");
    let significant = s.trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).count();
    if significant < MIN_SIGNIFICANT {
        if !s.contains('.') {
            s.push('.');
        }
        let missing = if v == 0.0 { MIN_SIGNIFICANT - 1 } else { MIN_SIGNIFICANT - significant };
        s.extend(std::iter::repeat('0').take(missing));
    }
    s
}

fn write_row(out: &mut String, row: &SweepRow) {
    let a = &row.alphas;
    let _ = write!(
        out,
        "{},{},{},{},{},{},{},",
        row.scenario,
        format_decimal(a.software),
        format_decimal(a.hardware),
        format_decimal(a.om),
        format_decimal(a.coverage),
        format_decimal(row.unavailability),
        row.method.name(),
    );
    if let Some((lo, hi)) = row.ci {
        let _ = write!(out, "{},{}", format_decimal(lo), format_decimal(hi));
    } else {
        out.push(',');
    }
    out.push('\n');
}

/// Header plus one line per row, LF-terminated.
pub fn emit_csv(table: &SweepTable) -> String {
    let mut out = String::with_capacity(64 * (table.rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for row in &table.rows {
        write_row(&mut out, row);
    }
    out
}
