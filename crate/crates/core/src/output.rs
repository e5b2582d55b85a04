//! CSV conventions shared by every emitter: `#`-prefixed metadata lines,
//! then a header row, then numbers with 17 significant digits.

use std::io::Write;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, so values survive a text round trip exactly.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "nan".to_string())
}

/// Writes the metadata block: toolkit version, then every line of the
/// resolved configuration.
pub fn write_header<W: Write>(out: &mut W, command: &str, resolved_config: &str) -> std::io::Result<()> {
    writeln!(out, "# shearfront {TOOLKIT_VERSION}")?;
    writeln!(out, "# command: {command}")?;
    for line in resolved_config.lines() {
        if line.is_empty() {
            writeln!(out, "#")?;
        } else {
            writeln!(out, "# {line}")?;
        }
    }
    Ok(())
}
