//! Plain-text number formatting shared by every CSV writer.

/// Scientific notation with 12 significant digits, e.g. `1.00000000000e0`.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Joins a header and rows into LF-terminated CSV text.
pub fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
