//! Randomized end-to-end checks on generated instances. The report depends only on
//! the seed and the number of cases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::instance::{parse_instance, print_instance, Instance};
use crate::expansion::{Expansion, FreeBModule, SemiFreeDGModule};
use crate::ext::{class_vanishes, ext_group};
use crate::lift::{lift, obstruction_solve};
use crate::ring::BaseRing;
use crate::sample::{
    random_automorphism, random_derivation, random_linear, random_obstructed_twisted_instance,
};

const RINGS: [BaseRing; 3] = [BaseRing::Rationals, BaseRing::ZMod(4), BaseRing::ZMod(7)];

fn sum(space: &FreeBModule, a: &Expansion, b: &Expansion) -> Option<Expansion> {
    space.add_expansions(a, b).ok()
}

/// The product rules of `j` on random maps of `space`, compared coefficientwise.
pub fn j_rules_hold<R: Rng>(rng: &mut R, space: &FreeBModule) -> bool {
    let mut check = || -> Option<bool> {
        let f = random_linear(rng, space, 0);
        let g = random_linear(rng, space, -1);
        let delta = random_derivation(rng, space);
        let phi = random_automorphism(rng, space);
        let phi_inv = space.invert(&phi).ok()?;
        let c = |a: &Expansion, b: &Expansion| space.compose(a, b).ok();
        let j = |a: &Expansion| space.j(a).ok();
        let same =
            |a: &Expansion, b: &Expansion| a.degree() == b.degree() && a.coeffs() == b.coeffs();

        let lin = same(
            &j(&c(&f, &g)?)?,
            &sum(space, &c(&j(&f)?, &g)?, &c(&f, &j(&g)?)?)?,
        );
        let left = same(
            &space.j_restricted(&c(&f, &delta)?),
            &sum(space, &c(&j(&f)?, &delta)?, &c(&f, &j(&delta)?)?)?,
        );
        let right = same(
            &space.j_restricted(&c(&delta, &f)?),
            &sum(space, &c(&j(&delta)?, &f)?, &c(&delta, &j(&f)?)?)?,
        );
        let inverse = sum(space, &c(&j(&phi)?, &phi_inv)?, &c(&phi, &j(&phi_inv)?)?)?.is_zero();
        Some(lin && left && right && inverse)
    };
    check().unwrap_or(false)
}

fn anticommutes(n: &SemiFreeDGModule) -> bool {
    let space = n.space();
    let Ok(delta) = space.j(n.diff()) else {
        return false;
    };
    match (
        space.compose(&delta, n.diff()),
        space.compose(n.diff(), &delta),
    ) {
        (Ok(a), Ok(b)) => space.add_expansions(&a, &b).is_ok_and(|s| s.is_zero()),
        _ => false,
    }
}

fn run_case(rng: &mut ChaCha8Rng, index: usize) -> Value {
    let ring = RINGS[rng.gen_range(0..RINGS.len())];
    let x = if rng.gen_bool(0.5) { 2 } else { 4 };
    let inst = random_obstructed_twisted_instance(rng, ring, x, 4);
    let n = &inst.twisted;
    let space = n.space();
    let mut checks = Map::new();

    checks.insert("obstruction_anticommutes".into(), json!(anticommutes(n)));
    let lifted = lift(n);
    checks.insert(
        "lift_certified".into(),
        json!(lifted.as_ref().is_ok_and(|r| r.certified)),
    );
    let lifted_is_extended = lifted
        .as_ref()
        .ok()
        .and_then(|r| space.j(&r.extended).ok())
        .is_some_and(|e| e.is_zero());
    checks.insert(
        "lifted_differential_extended".into(),
        json!(lifted_is_extended),
    );
    let ext_consistent = obstruction_solve(n).is_ok_and(|ob| {
        let vanishes = class_vanishes(n, &ob.delta).unwrap_or(false);
        let ext_trivial = ext_group(n, x + 1).is_ok_and(|e| e.group.is_trivial());
        vanishes == ob.gamma.is_some() && (!ext_trivial || ob.gamma.is_some())
    });
    checks.insert("ext_consistent".into(), json!(ext_consistent));
    let round_trip =
        parse_instance(&print_instance(n)).is_ok_and(|p| p == Instance::new(n.clone()));
    checks.insert("round_trip".into(), json!(round_trip));
    checks.insert("j_product_rules".into(), json!(j_rules_hold(rng, space)));

    let passed = checks.values().all(|v| v.as_bool() == Some(true));
    let delta_zero = space.j(n.diff()).is_ok_and(|d| d.is_zero());
    json!({
        "case": index,
        "ring": ring.to_string(),
        "x_degree": x,
        "basis_degrees": space.module().degrees(),
        "delta_zero": delta_zero,
        "checks": checks,
        "passed": passed,
    })
}

/// Runs `cases` random cases from `seed`; returns the report and whether all passed.
pub fn run_selftest(seed: u64, cases: usize) -> (Value, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let results: Vec<Value> = (0..cases).map(|k| run_case(&mut rng, k)).collect();
    let passed = results
        .iter()
        .filter(|r| r["passed"] == json!(true))
        .count();
    let report = json!({
        "seed": seed,
        "cases": cases,
        "passed": passed,
        "failed": cases - passed,
        "results": results,
    });
    (report, passed == cases)
}
