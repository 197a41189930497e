//! Text forms shared by every output: rationals as `p/q`, reals rounded to
//! 15 significant digits, `inf` for infinite Green entries.

use std::io::Write;

use coalspec_core::dynamics::GreenEntry;
use coalspec_core::{BigRat, PartitionLattice, RatMatrix};
use serde_json::{json, Value};

/// `p/q` in lowest terms, with an explicit `/1` for integers.
pub fn rational(r: &BigRat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rounds to 15 significant digits and prints the shortest decimal that
/// reads back to the rounded value.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("exponent form parses");
    // avoid "-0"
    if rounded == 0.0 {
        return "0".into();
    }
    let mag = rounded.abs();
    if (1e-5..1e16).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Green's matrix entry: a rational or `inf`.
pub fn green(g: &GreenEntry) -> String {
    match g {
        GreenEntry::Finite(v) => rational(v),
        GreenEntry::Infinite => "inf".into(),
    }
}

/// Row and column labels of a lattice-indexed matrix.
pub fn lattice_order(lattice: &PartitionLattice) -> Value {
    Value::from(lattice.labels())
}

/// Sparse matrix as `[[row, col, "p/q"], ...]` in row-major order.
pub fn matrix_entries(m: &RatMatrix) -> Value {
    Value::Array(m.iter().map(|(i, j, v)| json!([i, j, rational(v)])).collect())
}

/// Writes `value` as pretty JSON with a trailing newline.
pub fn write_json<W: Write>(out: &mut W, value: &Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

/// Writes a header and rows as RFC 4180 CSV.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}
