//! `MapDocument`: the JSON exchange format for a single linear map.

use posmap_core::maps::Representation;
use posmap_core::{LinearMapSpec, MapDims};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::json::{matrix_to_value, parse, to_canonical_string, value_to_matrix, Obj};

pub const SCHEMA_VERSION: &str = "posmap/1";

/// A map in whichever representation it was given; serialization preserves it.
#[derive(Debug, Clone, PartialEq)]
pub struct MapDocument {
    pub map: LinearMapSpec,
}

impl MapDocument {
    pub fn new(map: LinearMapSpec) -> Self {
        Self { map }
    }

    pub fn kind(&self) -> &'static str {
        match self.map.representation() {
            Representation::Choi(_) => "choi",
            Representation::Kraus(_) => "kraus",
            Representation::Super(_) => "super",
        }
    }

    pub fn to_value(&self) -> Value {
        let dims = self.map.dims();
        let data = match self.map.representation() {
            Representation::Choi(m) | Representation::Super(m) => matrix_to_value(m),
            Representation::Kraus(ks) => Value::Array(ks.iter().map(matrix_to_value).collect()),
        };
        json!({
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind(),
            "dim_in": dims.dim_in,
            "dim_out": dims.dim_out,
            "data": data,
        })
    }

    pub fn to_canonical_string(&self) -> String {
        to_canonical_string(&self.to_value())
    }

    /// Parses a document found at `path` inside a larger JSON value.
    pub fn from_value(value: &Value, path: &str) -> CliResult<Self> {
        let o = Obj::new(value, path)?;
        let version = o.str("schema_version")?;
        if version != SCHEMA_VERSION {
            return Err(CliError::parse(
                &o.field_path("schema_version"),
                &format!("expected \"{SCHEMA_VERSION}\", got \"{version}\""),
            ));
        }
        let dim_in = o.usize("dim_in")?;
        let dim_out = o.usize("dim_out")?;
        if dim_in == 0 {
            return Err(CliError::parse(&o.field_path("dim_in"), "must be positive"));
        }
        if dim_out == 0 {
            return Err(CliError::parse(
                &o.field_path("dim_out"),
                "must be positive",
            ));
        }
        let dims = MapDims::new(dim_in, dim_out)?;
        let data_path = o.field_path("data");
        let map = match o.str("kind")? {
            "choi" => LinearMapSpec::from_choi(
                dims,
                o.matrix("data", dims.choi_size(), dims.choi_size())?,
            )?,
            "super" => LinearMapSpec::from_super(
                dims,
                o.matrix("data", dim_out * dim_out, dim_in * dim_in)?,
            )?,
            "kraus" => {
                let list = o.get("data")?.as_array().ok_or_else(|| {
                    CliError::parse(&data_path, "expected a list of Kraus operators")
                })?;
                let ks = list
                    .iter()
                    .enumerate()
                    .map(|(i, v)| value_to_matrix(v, &format!("{data_path}[{i}]"), dim_out, dim_in))
                    .collect::<CliResult<Vec<_>>>()?;
                LinearMapSpec::from_kraus(dims, ks)?
            }
            other => {
                return Err(CliError::parse(
                    &o.field_path("kind"),
                    &format!("expected \"choi\", \"kraus\" or \"super\", got \"{other}\""),
                ))
            }
        };
        Ok(Self { map })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        Self::from_value(&parse(text)?, "")
    }
}

/// Re-expresses `map` in the named representation.
pub fn convert(map: &LinearMapSpec, repr: &str) -> CliResult<LinearMapSpec> {
    match repr {
        "choi" => Ok(map.as_choi_spec()),
        "super" => Ok(LinearMapSpec::from_super(map.dims(), map.to_super())?),
        "kraus" => Ok(posmap_core::maps::to_kraus_spec(map)?),
        other => Err(CliError::Usage(format!(
            "unknown representation '{other}' (expected choi, kraus or super)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use posmap_core::maps::zoo;

    #[test]
    fn roundtrip_all_kinds() {
        let base = zoo("depolarizing", &[3.0, 0.3]).unwrap();
        for repr in ["choi", "kraus", "super"] {
            let doc = MapDocument::new(convert(&base, repr).unwrap());
            assert_eq!(doc.kind(), repr);
            let text = doc.to_canonical_string();
            let back = MapDocument::parse(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.to_canonical_string(), text);
        }
    }

    #[test]
    fn errors_name_fields() {
        let good = MapDocument::new(zoo("transpose", &[2.0]).unwrap()).to_value();
        type Mutation = Box<dyn Fn(&mut Value)>;
        let cases: Vec<(Mutation, &str)> = vec![
            (
                Box::new(|v| v["schema_version"] = json!("posmap/0")),
                "schema_version",
            ),
            (Box::new(|v| v["kind"] = json!("matrix")), "kind"),
            (Box::new(|v| v["dim_in"] = json!(-1)), "dim_in"),
            (Box::new(|v| v["dim_out"] = json!(3)), "data.re"),
            (
                Box::new(|v| v["data"]["im"][2][1] = json!("x")),
                "data.im[2][1]",
            ),
            (
                Box::new(|v| {
                    v.as_object_mut()
                        .unwrap()
                        .remove("data")
                        .map(|_| ())
                        .unwrap()
                }),
                "data",
            ),
        ];
        for (mutate, field) in cases {
            let mut v = good.clone();
            mutate(&mut v);
            match MapDocument::from_value(&v, "") {
                Err(CliError::Parse { field: f, .. }) => {
                    assert!(f.starts_with(field), "{f} vs {field}")
                }
                other => panic!("expected parse error for {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn kraus_shapes_are_checked() {
        let mut v = MapDocument::new(convert(&zoo("identity", &[2.0]).unwrap(), "kraus").unwrap())
            .to_value();
        v["dim_in"] = json!(3);
        let err = MapDocument::from_value(&v, "").unwrap_err();
        assert!(err.to_string().contains("data[0].re[0]"), "{err}");
    }
}
