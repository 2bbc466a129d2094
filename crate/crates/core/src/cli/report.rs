//! JSON renderings of library values.

use serde_json::{json, Value};

use super::instance::{derivation_maps, print_instance, print_phi};
use crate::expansion::{Expansion, FreeBModule, Kind, SemiFreeDGModule};
use crate::ext::HomologyGroup;
use crate::gmod::AMap;
use crate::ring::Scalar;

pub fn amap_json(space: &FreeBModule, map: &AMap) -> Value {
    let alg = space.adjunction().algebra();
    Value::Array(
        map.entries
            .iter()
            .map(|row| Value::Array(row.iter().map(|c| Value::String(alg.format(c))).collect()))
            .collect(),
    )
}

/// Coefficient matrices over `A`; a derivation lists the values of its constant
/// term on the basis first.
pub fn expansion_json(space: &FreeBModule, f: &Expansion) -> Value {
    let maps = match f.kind() {
        Kind::Derivation => derivation_maps(space, f),
        _ => space.coefficient_maps(f),
    };
    json!({
        "kind": f.kind().to_string(),
        "degree": f.degree(),
        "coefficients": maps.iter().map(|m| amap_json(space, m)).collect::<Vec<_>>(),
    })
}

pub fn scalars_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|s| Value::String(s.to_string())).collect())
}

pub fn group_json(g: &HomologyGroup) -> Value {
    let mut out = json!({
        "description": g.to_string(),
        "trivial": g.is_trivial(),
    });
    match g {
        HomologyGroup::Vector { dim } => out["dim"] = json!(dim),
        HomologyGroup::Modular { modulus, factors } => {
            out["modulus"] = json!(modulus);
            out["factors"] = json!(factors);
        }
    }
    out
}

pub fn instance_summary(n: &SemiFreeDGModule) -> Value {
    let space = n.space();
    json!({
        "ring": space.ring().to_string(),
        "exterior_variables": space.adjunction().algebra().num_vars(),
        "x_degree": space.x_degree(),
        "basis_degrees": space.module().degrees(),
        "differential": expansion_json(space, n.diff()),
    })
}

pub fn instance_text(n: &SemiFreeDGModule) -> Value {
    Value::String(print_instance(n))
}

pub fn phi_text(space: &FreeBModule, phi: &Expansion) -> Value {
    Value::String(print_phi(space, phi))
}
