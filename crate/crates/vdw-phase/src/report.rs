//! Formatting helpers shared by the CSV/JSON output surfaces.

/// Full-precision decimal rendering of an `f64` (17 significant digits),
/// so that written tables round-trip bit-exactly.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{:.16e}", x)
}

/// Assemble a CSV document from a header and row-major full-precision data.
pub(crate) fn csv_table(header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for &cell in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt_g17(cell));
            first = false;
        }
        out.push('\n');
    }
    out
}
