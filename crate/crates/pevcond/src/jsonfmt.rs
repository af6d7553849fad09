//! Report serialization helpers. All JSON floats are written with 17
//! significant digits so that parsing recovers bit-identical doubles;
//! non-finite values become `null` (total condition numbers of degenerate
//! inputs are +∞ and JSON has no literal for that).

use crate::error::{Error, Result};
use serde::Serialize;
use std::io;

struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes to JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
}

/// One float as a CSV/console field: 17 significant digits, `inf` for +∞,
/// empty for absent.
pub fn fmt_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else if value.is_infinite() {
        if value > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        "nan".into()
    }
}

pub fn fmt_opt_f64(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        x: f64,
        y: f64,
        z: Option<f64>,
    }

    #[test]
    fn floats_round_trip_exactly() {
        let x = std::f64::consts::PI * 1.6;
        let text = to_json_string(&Sample {
            x,
            y: f64::INFINITY,
            z: None,
        })
        .unwrap();
        assert!(text.contains("null"), "{text}");
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["x"].as_f64().unwrap().to_bits(), x.to_bits());
        assert!(parsed["y"].is_null());
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        let parsed: f64 = fmt_f64(1.0 / 3.0).parse().unwrap();
        assert_eq!(parsed.to_bits(), (1.0f64 / 3.0).to_bits());
    }
}
