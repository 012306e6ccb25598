//! Canonical JSON: sorted object keys, compact layout, and every float in
//! C `%.17g` form, which round-trips `f64` exactly.

use std::io;

use num_complex::Complex64;
use posmap_core::ComplexMatrix;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// Formats `x` like C's `printf("%.17g", x)`.
///
/// Negative zero is written as `-0.0` so that it survives a parse as a float.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

struct G17Formatter;

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` canonically. `serde_json::Map` keeps keys sorted.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter);
    value
        .serialize(&mut ser)
        .expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn parse(text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        field: "<document>".into(),
        message: format!("invalid JSON: {e}"),
    })
}

/// Finite floats become JSON numbers; non-finite values become `null`, which
/// the parsers reject.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    let rows = |f: fn(&Complex64) -> f64| -> Value {
        Value::Array(
            (0..m.rows())
                .map(|r| Value::Array(m.row(r).iter().map(|z| num(f(z))).collect()))
                .collect(),
        )
    };
    json!({ "re": rows(|z| z.re), "im": rows(|z| z.im) })
}

pub fn vector_to_value(v: &[Complex64]) -> Value {
    json!({
        "re": v.iter().map(|z| num(z.re)).collect::<Vec<_>>(),
        "im": v.iter().map(|z| num(z.im)).collect::<Vec<_>>(),
    })
}

/// Accessors that report the dotted path of whatever is missing or malformed.
pub struct Obj<'a> {
    pub path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Obj<'a> {
    pub fn new(value: &'a Value, path: &str) -> CliResult<Self> {
        match value.as_object() {
            Some(map) => Ok(Self {
                path: path.to_string(),
                map,
            }),
            None => Err(CliError::parse(path, "expected an object")),
        }
    }

    pub fn field_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    pub fn get(&self, key: &str) -> CliResult<&'a Value> {
        self.map
            .get(key)
            .ok_or_else(|| CliError::parse(&self.field_path(key), "missing"))
    }

    pub fn opt(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key).filter(|v| !v.is_null())
    }

    pub fn obj(&self, key: &str) -> CliResult<Obj<'a>> {
        Obj::new(self.get(key)?, &self.field_path(key))
    }

    pub fn str(&self, key: &str) -> CliResult<&'a str> {
        self.get(key)?
            .as_str()
            .ok_or_else(|| CliError::parse(&self.field_path(key), "expected a string"))
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        as_finite(self.get(key)?, &self.field_path(key))
    }

    pub fn usize(&self, key: &str) -> CliResult<usize> {
        self.get(key)?.as_u64().map(|x| x as usize).ok_or_else(|| {
            CliError::parse(&self.field_path(key), "expected a non-negative integer")
        })
    }

    pub fn u64(&self, key: &str) -> CliResult<u64> {
        self.get(key)?.as_u64().ok_or_else(|| {
            CliError::parse(&self.field_path(key), "expected a non-negative integer")
        })
    }

    pub fn matrix(&self, key: &str, rows: usize, cols: usize) -> CliResult<ComplexMatrix> {
        value_to_matrix(self.get(key)?, &self.field_path(key), rows, cols)
    }

    pub fn vector(&self, key: &str) -> CliResult<Vec<Complex64>> {
        value_to_vector(self.get(key)?, &self.field_path(key))
    }
}

pub fn as_finite(v: &Value, path: &str) -> CliResult<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::parse(path, "expected a finite number")),
    }
}

fn real_rows(v: &Value, path: &str, rows: usize, cols: usize) -> CliResult<Vec<f64>> {
    let outer = v
        .as_array()
        .ok_or_else(|| CliError::parse(path, "expected an array of rows"))?;
    if outer.len() != rows {
        return Err(CliError::parse(
            path,
            &format!("expected {rows} rows, got {}", outer.len()),
        ));
    }
    let mut out = Vec::with_capacity(rows * cols);
    for (r, row) in outer.iter().enumerate() {
        let rp = format!("{path}[{r}]");
        let row = row
            .as_array()
            .ok_or_else(|| CliError::parse(&rp, "expected an array"))?;
        if row.len() != cols {
            return Err(CliError::parse(
                &rp,
                &format!("expected {cols} entries, got {}", row.len()),
            ));
        }
        for (c, x) in row.iter().enumerate() {
            out.push(as_finite(x, &format!("{rp}[{c}]"))?);
        }
    }
    Ok(out)
}

pub fn value_to_matrix(
    v: &Value,
    path: &str,
    rows: usize,
    cols: usize,
) -> CliResult<ComplexMatrix> {
    let o = Obj::new(v, path)?;
    let re = real_rows(o.get("re")?, &o.field_path("re"), rows, cols)?;
    let im = real_rows(o.get("im")?, &o.field_path("im"), rows, cols)?;
    let data = re
        .into_iter()
        .zip(im)
        .map(|(a, b)| Complex64::new(a, b))
        .collect();
    Ok(ComplexMatrix::from_vec(rows, cols, data)?)
}

pub fn value_to_vector(v: &Value, path: &str) -> CliResult<Vec<Complex64>> {
    let o = Obj::new(v, path)?;
    let part = |key: &str| -> CliResult<Vec<f64>> {
        let p = o.field_path(key);
        let arr = o
            .get(key)?
            .as_array()
            .ok_or_else(|| CliError::parse(&p, "expected an array"))?;
        arr.iter()
            .enumerate()
            .map(|(i, x)| as_finite(x, &format!("{p}[{i}]")))
            .collect()
    };
    let (re, im) = (part("re")?, part("im")?);
    if re.len() != im.len() {
        return Err(CliError::parse(
            &o.field_path("im"),
            "length differs from re",
        ));
    }
    Ok(re
        .into_iter()
        .zip(im)
        .map(|(a, b)| Complex64::new(a, b))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_reference() {
        for (x, expected) in [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (1e20, "1e+20"),
            (123456.0, "123456"),
            (0.0001, "0.0001"),
        ] {
            assert_eq!(format_g17(x), expected);
        }
        assert_eq!(format_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_g17(-0.0), "-0.0");
        assert_eq!(format_g17(5e-324), "4.9406564584124654e-324");
        assert_eq!(format_g17(f64::MAX), "1.7976931348623157e+308");
    }

    #[test]
    fn floats_roundtrip_bit_exactly() {
        let mut x = 0.7f64;
        for i in 0..2000 {
            x = (x * 3.9 * (1.0 - x)).abs();
            let y = x * 10f64.powi(i % 40 - 20) * if i % 2 == 0 { 1.0 } else { -1.0 };
            let text = to_canonical_string(&json!([y]));
            let back: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(back[0].as_f64().unwrap().to_bits(), y.to_bits(), "{text}");
        }
        let back: Value = serde_json::from_str(&to_canonical_string(&json!([-0.0]))).unwrap();
        assert!(back[0].as_f64().unwrap().is_sign_negative());
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({"b": 1, "a": {"d": 0.5, "c": 2}});
        assert_eq!(to_canonical_string(&v), r#"{"a":{"c":2,"d":0.5},"b":1}"#);
    }

    #[test]
    fn malformed_matrix_names_the_field() {
        let v = json!({"re": [[1.0, 2.0], [3.0]], "im": [[0.0, 0.0], [0.0, 0.0]]});
        let err = value_to_matrix(&v, "data", 2, 2).unwrap_err();
        assert!(err.to_string().contains("data.re[1]"), "{err}");
        let v = json!({"re": [[1.0, "x"]], "im": [[0.0, 0.0]]});
        let err = value_to_matrix(&v, "data", 1, 2).unwrap_err();
        assert!(err.to_string().contains("data.re[0][1]"), "{err}");
    }
}
