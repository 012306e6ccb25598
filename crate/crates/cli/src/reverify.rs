//! Re-checks a saved report or certificate using only what it contains.

use posmap_core::cones::{check_cp, check_dominates, reverify_evidence, tested_matrix};
use posmap_core::decomp::not_ccp_demo;
use posmap_core::linalg::eigh;
use posmap_core::maps::{tensor_maps, zoo};
use posmap_core::stinespring::{is_pure, StinespringTriple};
use posmap_core::{
    ComplexMatrix, ConeProperty, ConeVerdict, Error, Evidence, LinearMapSpec, MapDims, Status,
};
use serde_json::{json, Value};

use crate::commands::{factor_status, run_factor, FactorInputs, FactorMode};
use crate::document::MapDocument;
use crate::error::{CliError, CliResult};
use crate::json::{num, value_to_matrix, Obj};
use crate::report::{certificate_from_value, kind_name, status_name, verdict_from_value};

/// Outcome of a re-verification: whether the saved claim stands, plus the recomputed quantities.
#[derive(Debug, Clone)]
pub struct Reverified {
    pub target: String,
    pub agrees: bool,
    pub details: Value,
}

/// Relative slack allowed between a reported number and its recomputation.
const REPORT_SLACK: f64 = 1e-8;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REPORT_SLACK * a.abs().max(b.abs()).max(1.0)
}

pub fn reverify_value(doc: &Value) -> CliResult<Reverified> {
    let o = Obj::new(doc, "")?;
    let target = o.str("report")?.to_string();
    let (agrees, details) = match target.as_str() {
        "check" => check_report(&o)?,
        "decomp" => {
            let map = MapDocument::from_value(o.get("map")?, "map")?.map;
            certificate(doc, "", &map)?
        }
        "piani_mora" => piani_mora_report(&o)?,
        "not_ccp" => not_ccp_report(&o)?,
        "factor" => factor_report(&o)?,
        "dilate" => dilate_report(&o)?,
        other => {
            return Err(CliError::parse(
                &o.field_path("report"),
                &format!("cannot re-verify a '{other}' report"),
            ))
        }
    };
    Ok(Reverified {
        target,
        agrees,
        details,
    })
}

/// Re-evaluates a cone verdict on `map`.
pub fn verdict(map: &LinearMapSpec, v: &ConeVerdict) -> CliResult<(bool, Value)> {
    // HOLDS for k-positivity rests on complete positivity, so its evidence is a Choi eigenvector
    let property = match (v.status, v.property) {
        (Status::Holds, ConeProperty::KPositive(_)) => ConeProperty::Cp,
        (_, p) => p,
    };
    let recomputed = match reverify_evidence(map, property, &v.evidence) {
        Ok(x) => x,
        Err(Error::BadK { reason, .. }) => return Ok((false, json!({"error": reason}))),
        Err(e) => return Err(e.into()),
    };
    let agrees = match (v.status, &v.evidence) {
        (Status::Fails, e) => recomputed < -v.tolerance / 2.0 && close(recomputed, e.value()),
        (Status::Holds, Evidence::Spectral { min_eigenvalue, .. }) => {
            let fresh = eigh(&tested_matrix(map, property)?)?.min();
            fresh >= -v.tolerance
                && close(fresh, *min_eigenvalue)
                && close(recomputed, *min_eigenvalue)
        }
        (Status::Holds, Evidence::Search { .. }) => false,
        (Status::Undecided, e) => recomputed >= -v.tolerance && close(recomputed, e.value()),
    };
    Ok((
        agrees,
        json!({"status": status_name(v.status), "recomputed_value": num(recomputed), "reported_value": num(v.evidence.value())}),
    ))
}

fn check_report(o: &Obj) -> CliResult<(bool, Value)> {
    let map = MapDocument::from_value(o.get("map")?, "map")?.map;
    let v = verdict_from_value(o.get("verdict")?, "verdict")?;
    verdict(&map, &v)
}

/// Verifies the certificate stored at `path` against `map`.
pub fn certificate(doc: &Value, path: &str, map: &LinearMapSpec) -> CliResult<(bool, Value)> {
    let cert = certificate_from_value(doc, path, map.dims())?;
    let valid = cert.verify(&map.hermitian_choi()?, &cert.tolerances)?;
    Ok((
        valid,
        json!({"kind": kind_name(cert.kind()), "valid": valid}),
    ))
}

fn piani_mora_report(o: &Obj) -> CliResult<(bool, Value)> {
    let tau = MapDocument::from_value(o.get("tau")?, "tau")?.map;
    let k = o.usize("k")?;
    let lifted = tensor_maps(&tau, &zoo("identity", &[k as f64])?)?;
    let (cert_ok, cert) =
        certificate(o.get("certificate")?, &o.field_path("certificate"), &lifted)?;
    let cp = verdict_from_value(o.get("cp")?, "cp")?;
    let (cp_ok, cp_details) = verdict(&tau, &cp)?;
    Ok((
        cert_ok && cp_ok,
        json!({"certificate": cert, "cp": cp_details}),
    ))
}

fn not_ccp_report(o: &Obj) -> CliResult<(bool, Value)> {
    let map = MapDocument::from_value(o.get("map")?, "map")?.map;
    let k = o.usize("k")?;
    let fresh = not_ccp_demo(&map, k)?;
    let s = fresh.element.rows();
    let saved = value_to_matrix(o.get("element")?, &o.field_path("element"), s, s)?;
    let element_ok = (&saved - &fresh.element).frobenius_norm()
        <= REPORT_SLACK * fresh.element.frobenius_norm().max(1.0);
    let saved_min = eigh(&saved.symmetrized()?)?.min();
    let agrees = element_ok
        && close(saved_min, o.f64("min_eigenvalue")?)
        && close(fresh.expected, o.f64("expected")?);
    Ok((
        agrees,
        json!({"min_eigenvalue": num(saved_min), "expected": num(fresh.expected)}),
    ))
}

fn factor_report(o: &Obj) -> CliResult<(bool, Value)> {
    let inputs = FactorInputs {
        mode: match o.str("mode")? {
            "id" => FactorMode::Id,
            "pure" => FactorMode::Pure,
            other => {
                return Err(CliError::parse(
                    &o.field_path("mode"),
                    &format!("unknown mode '{other}'"),
                ))
            }
        },
        alpha: MapDocument::from_value(o.get("alpha")?, "alpha")?.map,
        alpha2: match o.opt("alpha2") {
            Some(v) => Some(MapDocument::from_value(v, "alpha2")?.map),
            None => None,
        },
        beta: MapDocument::from_value(o.get("beta")?, "beta")?.map,
        k: match o.opt("k") {
            Some(_) => Some(o.usize("k")?),
            None => None,
        },
        tol: o.f64("tol")?,
        seed: o.u64("seed")?,
        threads: 1,
    };
    let status = o.str("status")?;
    if status != "success" {
        // a negative outcome carries no certificate; recompute it from the embedded inputs
        let fresh = factor_status(&run_factor(&inputs));
        return Ok((
            fresh == status,
            json!({"status": status, "recomputed_status": fresh}),
        ));
    }

    let factor = MapDocument::from_value(o.get("factor")?, "factor")?.map;
    let second = match inputs.mode {
        FactorMode::Id => zoo("identity", &[inputs.resolved_k()? as f64])?,
        FactorMode::Pure => inputs
            .alpha2
            .clone()
            .ok_or_else(|| CliError::parse("alpha2", "missing for mode pure"))?,
    };
    let beta_choi = inputs.beta.to_choi();
    let error = (&tensor_maps(&factor, &second)?.to_choi() - &beta_choi).frobenius_norm();
    let allowed = inputs.tol * beta_choi.frobenius_norm().max(1.0);
    let mut agrees = error <= allowed && close(error, o.f64("reconstruction_error")?);
    let positivity = verdict_from_value(o.get("positivity")?, "positivity")?;
    let (pos_ok, pos) = verdict(&factor, &positivity)?;
    agrees &= pos_ok && positivity.status != Status::Fails;
    if inputs.mode == FactorMode::Pure {
        agrees &= check_cp(&factor, inputs.tol)?.holds();
        agrees &= check_dominates(&inputs.alpha, &factor, inputs.tol)?.holds();
        agrees &= is_pure(&second)?.pure;
    }
    Ok((
        agrees,
        json!({"reconstruction_error": num(error), "allowed": num(allowed), "positivity": pos}),
    ))
}

fn dilate_report(o: &Obj) -> CliResult<(bool, Value)> {
    let map = MapDocument::from_value(o.get("map")?, "map")?.map;
    let dims = MapDims::new(o.usize("dim_in")?, o.usize("dim_out")?)?;
    if dims != map.dims() {
        return Ok((
            false,
            json!({"error": "dimensions differ from the embedded map"}),
        ));
    }
    let r = o.usize("dilation_dim")?;
    let v = o.matrix("v", dims.dim_in * r, dims.dim_out)?;
    let triple = StinespringTriple {
        dims,
        dilation_dim: r,
        v,
        kraus: Vec::new(),
    };
    let m = dims.dim_in;
    let mut worst = 0.0f64;
    for p in 0..m {
        for q in 0..m {
            let e = ComplexMatrix::unit(m, p, q);
            worst = worst.max((&triple.compress(&e, None)? - &map.apply(&e)?).frobenius_norm());
        }
    }
    let allowed = REPORT_SLACK * map.to_choi().frobenius_norm().max(1.0);
    Ok((
        worst <= allowed,
        json!({"max_unit_error": num(worst), "allowed": num(allowed)}),
    ))
}
