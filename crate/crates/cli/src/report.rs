//! JSON forms of verdicts, certificates and the other run results, and the
//! parsers that read them back for re-verification.

use posmap_core::cones::SeeSawConfig;
use posmap_core::decomp::{Diagnostics, NotCcpReport, PianiMoraReport};
use posmap_core::stinespring::StinespringTriple;
use posmap_core::{
    CertTolerances, CertificateKind, ConeProperty, ConeVerdict, DecompCertificate, Evidence,
    FactorResult, MapDims, Outcome, Status,
};
use serde_json::{json, Map, Value};

use crate::document::{MapDocument, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};
use crate::json::{matrix_to_value, num, opt_num, vector_to_value, Obj};

/// Fields shared by every report.
#[derive(Debug, Clone)]
pub struct RunInfo {
    pub command: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_s: f64,
    pub tag: &'static str,
}

impl RunInfo {
    pub fn fill(&self, report: &mut Map<String, Value>, name: &str) {
        report.insert("schema_version".into(), json!(SCHEMA_VERSION));
        report.insert("report".into(), json!(name));
        report.insert("command".into(), json!(self.command));
        report.insert("seed".into(), json!(self.seed));
        report.insert("threads".into(), json!(self.threads));
        report.insert("wall_time_s".into(), num(self.wall_time_s));
        report.insert("tag".into(), json!(self.tag));
    }
}

pub fn property_name(p: ConeProperty) -> &'static str {
    match p {
        ConeProperty::Cp => "cp",
        ConeProperty::CoCp => "ccp",
        ConeProperty::KPositive(_) => "kpos",
        ConeProperty::Dominates => "dominates",
    }
}

pub fn parse_property(name: &str, k: Option<usize>, field: &str) -> CliResult<ConeProperty> {
    match (name, k) {
        ("cp", _) => Ok(ConeProperty::Cp),
        ("ccp", _) => Ok(ConeProperty::CoCp),
        ("dominates", _) => Ok(ConeProperty::Dominates),
        ("kpos", Some(k)) => Ok(ConeProperty::KPositive(k)),
        ("kpos", None) => Err(CliError::parse(field, "kpos needs k")),
        (other, _) => Err(CliError::parse(
            field,
            &format!("unknown property '{other}'"),
        )),
    }
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Holds => "holds",
        Status::Fails => "fails",
        Status::Undecided => "undecided",
    }
}

fn parse_status(name: &str, field: &str) -> CliResult<Status> {
    match name {
        "holds" => Ok(Status::Holds),
        "fails" => Ok(Status::Fails),
        "undecided" => Ok(Status::Undecided),
        other => Err(CliError::parse(field, &format!("unknown status '{other}'"))),
    }
}

pub fn verdict_to_value(v: &ConeVerdict) -> Value {
    let evidence = match &v.evidence {
        Evidence::Spectral {
            min_eigenvalue,
            vector,
        } => json!({
            "kind": "spectral",
            "min_eigenvalue": num(*min_eigenvalue),
            "vector": vector_to_value(vector),
        }),
        Evidence::Search {
            value,
            vector,
            starts,
        } => json!({
            "kind": "search",
            "value": num(*value),
            "vector": vector_to_value(vector),
            "starts": starts,
        }),
    };
    let k = match v.property {
        ConeProperty::KPositive(k) => json!(k),
        _ => Value::Null,
    };
    json!({
        "property": property_name(v.property),
        "k": k,
        "status": status_name(v.status),
        "tolerance": num(v.tolerance),
        "evidence": evidence,
    })
}

pub fn verdict_from_value(value: &Value, path: &str) -> CliResult<ConeVerdict> {
    let o = Obj::new(value, path)?;
    let k = match o.opt("k") {
        Some(_) => Some(o.usize("k")?),
        None => None,
    };
    let property = parse_property(o.str("property")?, k, &o.field_path("property"))?;
    let status = parse_status(o.str("status")?, &o.field_path("status"))?;
    let tolerance = o.f64("tolerance")?;
    let e = o.obj("evidence")?;
    let vector = e.vector("vector")?;
    let evidence = match e.str("kind")? {
        "spectral" => Evidence::Spectral {
            min_eigenvalue: e.f64("min_eigenvalue")?,
            vector,
        },
        "search" => Evidence::Search {
            value: e.f64("value")?,
            vector,
            starts: e.usize("starts")?,
        },
        other => {
            return Err(CliError::parse(
                &e.field_path("kind"),
                &format!("unknown evidence kind '{other}'"),
            ))
        }
    };
    Ok(ConeVerdict {
        property,
        status,
        evidence,
        tolerance,
    })
}

pub fn search_to_value(cfg: &SeeSawConfig) -> Value {
    json!({"starts": cfg.starts, "iterations": cfg.iterations, "tol": num(cfg.tol)})
}

pub fn kind_name(kind: CertificateKind) -> &'static str {
    match kind {
        CertificateKind::Decomposition => "decomposition",
        CertificateKind::Witness => "witness",
        CertificateKind::Undecided => "undecided",
    }
}

pub fn cert_tolerances_to_value(t: &CertTolerances) -> Value {
    json!({
        "psd": num(t.psd),
        "residual": num(t.residual),
        "trace": num(t.trace),
        "margin": num(t.margin),
    })
}

fn diagnostics_to_value(d: &Diagnostics) -> Value {
    json!({
        "primal_iterations": d.primal_iterations,
        "witness_iterations": d.witness_iterations,
        "initial_residual": opt_num(d.initial_residual),
        "final_residual": opt_num(d.final_residual),
        "best_residual": opt_num(d.best_residual),
        "best_witness_value": opt_num(d.best_witness_value),
    })
}

/// The certificate fields: kind, matrices, residuals, tolerances, diagnostics.
pub fn certificate_fields(cert: &DecompCertificate) -> Map<String, Value> {
    let (matrices, residuals) = match &cert.outcome {
        Outcome::Decomposition { a, b, residual } => (
            json!({"A": matrix_to_value(a), "B": matrix_to_value(b)}),
            json!({"residual": num(*residual)}),
        ),
        Outcome::Witness {
            w,
            value,
            min_eig_w,
            min_eig_pt_w,
            trace,
        } => (
            json!({"W": matrix_to_value(w)}),
            json!({
                "value": num(*value),
                "min_eig_w": num(*min_eig_w),
                "min_eig_pt_w": num(*min_eig_pt_w),
                "trace": num(*trace),
            }),
        ),
        Outcome::Undecided => (json!({}), json!({})),
    };
    let mut m = Map::new();
    m.insert("kind".into(), json!(kind_name(cert.kind())));
    m.insert("matrices".into(), matrices);
    m.insert("residuals".into(), residuals);
    m.insert(
        "tolerances".into(),
        cert_tolerances_to_value(&cert.tolerances),
    );
    m.insert(
        "diagnostics".into(),
        diagnostics_to_value(&cert.diagnostics),
    );
    m
}

/// Reads a certificate for a map with `dims`; diagnostics are not needed to verify it.
pub fn certificate_from_value(
    value: &Value,
    path: &str,
    dims: MapDims,
) -> CliResult<DecompCertificate> {
    let o = Obj::new(value, path)?;
    let t = o.obj("tolerances")?;
    let tolerances = CertTolerances {
        psd: t.f64("psd")?,
        residual: t.f64("residual")?,
        trace: t.f64("trace")?,
        margin: t.f64("margin")?,
    };
    let s = dims.choi_size();
    let outcome = match o.str("kind")? {
        "decomposition" => {
            let m = o.obj("matrices")?;
            Outcome::Decomposition {
                a: m.matrix("A", s, s)?,
                b: m.matrix("B", s, s)?,
                residual: o.obj("residuals")?.f64("residual")?,
            }
        }
        "witness" => {
            let r = o.obj("residuals")?;
            Outcome::Witness {
                w: o.obj("matrices")?.matrix("W", s, s)?,
                value: r.f64("value")?,
                min_eig_w: r.f64("min_eig_w")?,
                min_eig_pt_w: r.f64("min_eig_pt_w")?,
                trace: r.f64("trace")?,
            }
        }
        "undecided" => Outcome::Undecided,
        other => {
            return Err(CliError::parse(
                &o.field_path("kind"),
                &format!("unknown certificate kind '{other}'"),
            ))
        }
    };
    Ok(DecompCertificate {
        dims,
        outcome,
        tolerances,
        diagnostics: Diagnostics::default(),
    })
}

pub fn consistency_name(c: posmap_core::decomp::Consistency) -> &'static str {
    use posmap_core::decomp::Consistency::*;
    match c {
        Consistent => "consistent",
        Contradiction => "contradiction",
        Inconclusive => "inconclusive",
    }
}

pub fn piani_mora_fields(r: &PianiMoraReport) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("k".into(), json!(r.k));
    m.insert("cp".into(), verdict_to_value(&r.cp));
    m.insert(
        "certificate".into(),
        Value::Object(certificate_fields(&r.certificate)),
    );
    m.insert("consistency".into(), json!(consistency_name(r.consistency)));
    m
}

pub fn not_ccp_fields(r: &NotCcpReport) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("k".into(), json!(r.k));
    m.insert("element".into(), matrix_to_value(&r.element));
    m.insert("min_eigenvalue".into(), num(r.min_eigenvalue));
    m.insert("expected".into(), num(r.expected));
    m.insert("unit_image_min".into(), num(r.unit_image_min));
    m
}

pub fn factor_fields(r: &FactorResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert(
        "factor".into(),
        MapDocument::new(r.factor.clone()).to_value(),
    );
    m.insert("reconstruction_error".into(), num(r.reconstruction_error));
    m.insert("positivity".into(), verdict_to_value(&r.positivity));
    m.insert(
        "domination".into(),
        r.domination.as_ref().map_or(Value::Null, verdict_to_value),
    );
    m.insert("h_deviation".into(), opt_num(r.h_deviation));
    m
}

pub fn dilation_fields(t: &StinespringTriple) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("dilation_dim".into(), json!(t.dilation_dim));
    m.insert("v".into(), matrix_to_value(&t.v));
    m.insert(
        "kraus".into(),
        Value::Array(t.kraus.iter().map(matrix_to_value).collect()),
    );
    m.insert("dim_in".into(), json!(t.dims.dim_in));
    m.insert("dim_out".into(), json!(t.dims.dim_out));
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json::{parse, to_canonical_string};
    use posmap_core::cones::{check_cp, refute_k_positivity, SPECTRAL_TOL};
    use posmap_core::decomp::{decide_decomposable, Budgets};
    use posmap_core::maps::{tensor_maps, zoo};

    #[test]
    fn verdicts_roundtrip() {
        let t = zoo("transpose", &[3.0]).unwrap();
        let mu = zoo("mu_family", &[4.0, 2.5]).unwrap();
        let cfg = SeeSawConfig {
            starts: 4,
            ..Default::default()
        };
        for v in [
            check_cp(&t, SPECTRAL_TOL).unwrap(),
            refute_k_positivity(&mu, 3, &cfg).unwrap(),
        ] {
            let text = to_canonical_string(&verdict_to_value(&v));
            assert_eq!(
                verdict_from_value(&parse(&text).unwrap(), "verdict").unwrap(),
                v
            );
        }
    }

    #[test]
    fn certificates_roundtrip() {
        let lifted = tensor_maps(
            &zoo("transpose", &[2.0]).unwrap(),
            &zoo("identity", &[2.0]).unwrap(),
        )
        .unwrap();
        for map in [zoo("identity", &[2.0]).unwrap(), lifted] {
            let cert = decide_decomposable(&map, &Budgets::default()).unwrap();
            let text = to_canonical_string(&Value::Object(certificate_fields(&cert)));
            let back = certificate_from_value(&parse(&text).unwrap(), "", map.dims()).unwrap();
            assert_eq!(back.outcome, cert.outcome);
            assert_eq!(back.tolerances, cert.tolerances);
        }
    }
}
