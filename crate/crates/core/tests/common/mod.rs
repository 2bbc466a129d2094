#![allow(dead_code)]

use std::sync::Arc;

use dglift::dga::{BElem, DividedPowerAdjunction};
use dglift::expansion::{Expansion, FreeBModule, Kind, SemiFreeDGModule};
use dglift::gmod::GradedFreeModule;
use dglift::ring::BaseRing;
use dglift::sample::{
    random_adjunction, random_automorphism, random_derivation, random_elem, random_linear,
    random_spread_degrees,
};
use rand::Rng;

pub const RINGS: [BaseRing; 3] = [BaseRing::Rationals, BaseRing::ZMod(4), BaseRing::ZMod(7)];

/// A random `B (x) M` whose basis degrees leave room for higher coefficients.
pub fn spread_space<R: Rng>(rng: &mut R, ring: BaseRing, x_degree: i64) -> Arc<FreeBModule> {
    let adj = random_adjunction(rng, ring, x_degree);
    let degrees = random_spread_degrees(rng, x_degree, 4);
    let module = GradedFreeModule::with_degrees(adj.algebra().clone(), &degrees);
    Arc::new(FreeBModule::new(adj, module).unwrap())
}

/// A random homogeneous element of `B` with divided powers up to `X^(2)`.
pub fn random_belem<R: Rng>(rng: &mut R, adj: &DividedPowerAdjunction, degree: i64) -> BElem {
    let mut out = BElem::zero();
    for i in 0..3usize {
        out.add_component(
            i,
            &random_elem(rng, adj.algebra(), degree - i as i64 * adj.x_degree()),
        );
    }
    out
}

fn same_restriction(what: &str, lhs: &Expansion, rhs: &Expansion) -> Result<(), String> {
    if lhs.degree() != rhs.degree() || lhs.coeffs() != rhs.coeffs() {
        return Err(format!(
            "{what}: coefficients differ (degrees {} and {}, lengths {} and {})",
            lhs.degree(),
            rhs.degree(),
            lhs.len(),
            rhs.len()
        ));
    }
    Ok(())
}

fn sum(space: &FreeBModule, terms: &[Expansion]) -> Expansion {
    let mut acc = terms[0].clone();
    for t in &terms[1..] {
        acc = space.add_expansions(&acc, t).unwrap();
    }
    acc
}

/// The product rules for `j` on one random instance. Returns a description of the
/// first failing identity.
pub fn check_j_identities<R: Rng>(
    rng: &mut R,
    ring: BaseRing,
    x_degree: i64,
) -> Result<(), String> {
    let space = spread_space(rng, ring, x_degree);
    let s = &*space;
    let f = {
        let k = rng.gen_range(-1..=1);
        random_linear(rng, s, k)
    };
    let g = {
        let k = rng.gen_range(-1..=1);
        random_linear(rng, s, k)
    };
    let delta = random_derivation(rng, s);
    let delta2 = random_derivation(rng, s);
    let phi = random_automorphism(rng, s);
    let phi_inv = s.invert(&phi).map_err(|e| e.to_string())?;
    let c = |a: &Expansion, b: &Expansion| s.compose(a, b).unwrap();
    let j = |a: &Expansion| s.j(a).unwrap();

    let fg = c(&f, &g);
    if fg.kind() != Kind::Linear {
        return Err("fg is not B-linear".into());
    }
    same_restriction(
        "j(fg) = j(f)g + fj(g)",
        &j(&fg),
        &sum(s, &[c(&j(&f), &g), c(&f, &j(&g))]),
    )?;
    same_restriction(
        "j(f delta) = j(f) delta + f j(delta)",
        &s.j_restricted(&c(&f, &delta)),
        &sum(s, &[c(&j(&f), &delta), c(&f, &j(&delta))]),
    )?;
    same_restriction(
        "j(delta f) = j(delta) f + delta j(f)",
        &s.j_restricted(&c(&delta, &f)),
        &sum(s, &[c(&j(&delta), &f), c(&delta, &j(&f))]),
    )?;
    same_restriction(
        "j(delta delta') = j(delta) delta' + delta j(delta')",
        &s.j_restricted(&c(&delta, &delta2)),
        &sum(s, &[c(&j(&delta), &delta2), c(&delta, &j(&delta2))]),
    )?;
    let cor1 = sum(s, &[c(&j(&phi), &phi_inv), c(&phi, &j(&phi_inv))]);
    if !cor1.is_zero() {
        return Err("j(phi) phi^-1 + phi j(phi^-1) = 0".into());
    }
    let conj = c(&phi, &c(&delta, &phi_inv));
    same_restriction(
        "j(phi delta phi^-1)",
        &s.j_restricted(&conj),
        &sum(
            s,
            &[
                c(&j(&phi), &c(&delta, &phi_inv)),
                c(&phi, &c(&j(&delta), &phi_inv)),
                c(&phi, &c(&delta, &j(&phi_inv))),
            ],
        ),
    )?;
    Ok(())
}

/// All coefficients of `Delta d + d Delta` vanish.
pub fn anticommutes(n: &SemiFreeDGModule) -> bool {
    let space = n.space();
    let delta = space.j(n.diff()).unwrap();
    let lhs = space.compose(&delta, n.diff()).unwrap();
    let rhs = space.compose(n.diff(), &delta).unwrap();
    space.add_expansions(&lhs, &rhs).unwrap().is_zero()
}
