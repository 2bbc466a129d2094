//! Random instances for property tests and the self-test command.
//!
//! Valid differentials are never sampled directly: a random square-zero
//! `A`-derivation is extended to `B (x) M` and then conjugated by a random
//! `B`-automorphism, which keeps `d o d = 0` and usually produces nonzero higher
//! coefficients.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dga::{build_adjunction, AElem, DividedPowerAdjunction, ExteriorDGAlgebra};
use crate::expansion::{Expansion, FreeBModule, Kind, SemiFreeDGModule};
use crate::gmod::{
    amap_inverse, extract_amap, linearize_derivation, linearize_map, ADerivation, AMap,
    GradedFreeModule,
};
use crate::ring::{BaseRing, Scalar};

pub fn random_scalar<R: Rng>(rng: &mut R, ring: BaseRing) -> Scalar {
    match ring {
        BaseRing::Rationals => ring.from_i64(rng.gen_range(-3..=3)),
        BaseRing::ZMod(m) => ring.from_i64(rng.gen_range(0..m) as i64),
    }
}

pub fn random_unit<R: Rng>(rng: &mut R, ring: BaseRing) -> Scalar {
    loop {
        let s = random_scalar(rng, ring);
        if s.is_unit() {
            return s;
        }
    }
}

/// `k <= 2` odd variables of degree 1 or 3. A degree 1 variable kills a random
/// scalar; a degree 3 variable has `dY = 0` since there is no degree 2 cycle to kill
/// among at most one earlier variable.
pub fn random_algebra<R: Rng>(rng: &mut R, ring: BaseRing) -> Arc<ExteriorDGAlgebra> {
    let k = rng.gen_range(0..=2);
    let mut alg = ExteriorDGAlgebra::new(ring);
    for j in 0..k {
        let degree = if rng.gen_bool(0.5) { 1 } else { 3 };
        let d_value = if degree == 1 {
            AElem::scalar(random_scalar(rng, ring))
        } else {
            AElem::zero()
        };
        alg = alg
            .adjoin(&format!("Y{}", j + 1), degree, d_value)
            .expect("degree 0 values are cycles");
    }
    Arc::new(alg)
}

/// A random homogeneous element; each monomial is present with probability 1/2.
pub fn random_elem<R: Rng>(rng: &mut R, alg: &ExteriorDGAlgebra, degree: i64) -> AElem {
    let mut out = AElem::zero();
    for m in alg.monomials_of_degree(degree) {
        if rng.gen_bool(0.5) {
            out.add_term(m, &random_scalar(rng, alg.ring()));
        }
    }
    out
}

/// A random cycle: rejection sampling first, then a random boundary.
pub fn random_cycle<R: Rng>(rng: &mut R, alg: &ExteriorDGAlgebra, degree: i64) -> AElem {
    for _ in 0..8 {
        let c = random_elem(rng, alg, degree);
        if alg.diff(&c).is_zero() {
            return c;
        }
    }
    alg.diff(&random_elem(rng, alg, degree + 1))
}

pub fn random_adjunction<R: Rng>(
    rng: &mut R,
    ring: BaseRing,
    x_degree: i64,
) -> Arc<DividedPowerAdjunction> {
    let alg = random_algebra(rng, ring);
    let t = random_cycle(rng, &alg, x_degree - 1);
    Arc::new(build_adjunction(alg, "X", x_degree, t).expect("t is a cycle of degree |X| - 1"))
}

/// Between one and `max_rank` basis degrees in `[0, 6]`.
pub fn random_degrees<R: Rng>(rng: &mut R, max_rank: usize) -> Vec<i64> {
    let p = rng.gen_range(1..=max_rank);
    (0..p).map(|_| rng.gen_range(0..=6)).collect()
}

/// Degrees in `[0, 6]` containing a pair at distance `|X|` or `|X| + 1`, so that
/// expansions of degree 0 and -1 can have nonzero higher coefficients.
pub fn random_spread_degrees<R: Rng>(rng: &mut R, x_degree: i64, max_rank: usize) -> Vec<i64> {
    let p = rng.gen_range(2..=max_rank.max(2));
    let low = rng.gen_range(0..=(5 - x_degree).max(0));
    let mut degrees = vec![low, low + x_degree + rng.gen_range(0..=1)];
    degrees.extend((2..p).map(|_| rng.gen_range(0..=6)));
    degrees.shuffle(rng);
    degrees
}

pub fn random_space<R: Rng>(
    rng: &mut R,
    ring: BaseRing,
    x_degree: i64,
    max_rank: usize,
) -> Arc<FreeBModule> {
    let adj = random_adjunction(rng, ring, x_degree);
    let module =
        GradedFreeModule::with_degrees(adj.algebra().clone(), &random_degrees(rng, max_rank));
    Arc::new(FreeBModule::new(adj, module).expect("same algebra"))
}

pub fn random_amap<R: Rng>(rng: &mut R, module: &GradedFreeModule, degree: i64) -> AMap {
    let alg = module.algebra();
    let mut out = AMap::zero(module.rank(), module.rank(), degree);
    for i in 0..module.rank() {
        for j in 0..module.rank() {
            out.entries[i][j] = random_elem(rng, alg, module.degree(j) + degree - module.degree(i));
        }
    }
    out
}

/// A degree 0 `A`-linear automorphism: its reduction modulo the exterior variables
/// is upper triangular with unit diagonal in the basis order.
pub fn random_a_automorphism<R: Rng>(rng: &mut R, module: &GradedFreeModule) -> AMap {
    let ring = module.ring();
    let mut f = random_amap(rng, module, 0);
    for (i, row) in f.entries.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let mut rest = AElem::zero();
            for (m, s) in c.terms().filter(|(m, _)| *m != 0) {
                rest.add_term(m, s);
            }
            let constant = if i == j {
                random_unit(rng, ring)
            } else if i < j && module.degree(i) == module.degree(j) {
                random_scalar(rng, ring)
            } else {
                ring.zero()
            };
            *c = rest.add(&AElem::scalar(constant));
        }
    }
    f
}

pub fn random_linear<R: Rng>(rng: &mut R, space: &FreeBModule, degree: i64) -> Expansion {
    let coeffs: Vec<AMap> = (0..space.coefficient_count(degree))
        .map(|i| random_amap(rng, space.module(), degree - i as i64 * space.x_degree()))
        .collect();
    space
        .linear(degree, &coeffs)
        .expect("random coefficients have the right degrees")
}

/// A random `B`-derivation (not necessarily square-zero).
pub fn random_derivation<R: Rng>(rng: &mut R, space: &FreeBModule) -> Expansion {
    let m = space.module();
    let delta_0 = ADerivation::new(random_amap(rng, m, -1));
    let rest: Vec<AMap> = (1..space.coefficient_count(-1))
        .map(|i| random_amap(rng, m, -1 - i as i64 * space.x_degree()))
        .collect();
    space
        .derivation(&delta_0, &rest)
        .expect("random coefficients have the right degrees")
}

/// A random degree 0 `B`-automorphism.
pub fn random_automorphism<R: Rng>(rng: &mut R, space: &FreeBModule) -> Expansion {
    let m = space.module();
    let mut coeffs = vec![random_a_automorphism(rng, m)];
    for i in 1..space.coefficient_count(0) {
        coeffs.push(random_amap(rng, m, -(i as i64) * space.x_degree()));
    }
    space
        .linear(0, &coeffs)
        .expect("random coefficients have the right degrees")
}

/// A square-zero `A`-derivation: basis elements are split into a bottom layer with
/// `d = 0` and a top layer mapping into the bottom layer with cycle coefficients,
/// then the result is conjugated by a random `A`-automorphism.
pub fn random_dg_module<R: Rng>(rng: &mut R, module: &GradedFreeModule) -> ADerivation {
    let alg = module.algebra();
    let p = module.rank();
    let top: Vec<bool> = (0..p).map(|_| rng.gen_bool(0.5)).collect();
    let mut values = AMap::zero(p, p, -1);
    for j in (0..p).filter(|&j| top[j]) {
        for i in (0..p).filter(|&i| !top[i]) {
            values.entries[i][j] = random_cycle(rng, alg, module.degree(j) - 1 - module.degree(i));
        }
    }
    conjugate_derivation(
        module,
        &ADerivation::new(values),
        &random_a_automorphism(rng, module),
    )
}

/// `a o delta o a^{-1}` for a degree 0 `A`-automorphism `a`.
pub fn conjugate_derivation(
    module: &GradedFreeModule,
    delta: &ADerivation,
    a: &AMap,
) -> ADerivation {
    let alg = module.algebra();
    let a_inv = amap_inverse(alg, a).expect("automorphism");
    let full = linearize_map(module, module, a)
        .mul(&linearize_derivation(module, delta))
        .and_then(|x| x.mul(&linearize_map(module, module, &a_inv)))
        .expect("shape");
    ADerivation::new(extract_amap(module, module, &full, -1))
}

/// `u o d o u^{-1}` as a differential.
pub fn twist(space: &FreeBModule, d: &Expansion, u: &Expansion) -> Expansion {
    let u_inv = space.invert(u).expect("automorphism");
    let c = space
        .compose(u, &space.compose(d, &u_inv).expect("d is a derivation"))
        .expect("u is linear");
    space
        .rekind(c, Kind::Derivation)
        .expect("conjugate of a derivation")
}

/// A liftable instance built from a random DG `A`-module `(M, d^M)`.
#[derive(Clone, Debug)]
pub struct TwistedInstance {
    /// `B (x) (M, d^M)`.
    pub base: SemiFreeDGModule,
    /// The automorphism used for twisting.
    pub u: Expansion,
    /// `(N, u d u^{-1})`.
    pub twisted: SemiFreeDGModule,
}

pub fn random_twisted_instance<R: Rng>(
    rng: &mut R,
    ring: BaseRing,
    x_degree: i64,
    max_rank: usize,
) -> TwistedInstance {
    let adj = random_adjunction(rng, ring, x_degree);
    let degrees = random_spread_degrees(rng, x_degree, max_rank);
    let module = GradedFreeModule::with_degrees(adj.algebra().clone(), &degrees);
    let space = Arc::new(FreeBModule::new(adj, module).expect("same algebra"));
    let dm = random_dg_module(rng, space.module());
    let ext = space.extend_derivation(&dm).expect("valid derivation");
    let base = SemiFreeDGModule::new(space.clone(), ext.clone()).expect("square zero");
    let u = random_automorphism(rng, &space);
    let twisted = SemiFreeDGModule::new(space.clone(), twist(&space, &ext, &u))
        .expect("conjugate is square zero");
    TwistedInstance { base, u, twisted }
}

/// Like [`random_twisted_instance`], but retries (up to 32 times) until the twisted
/// differential has a nonzero obstruction `j(d)`.
pub fn random_obstructed_twisted_instance<R: Rng>(
    rng: &mut R,
    ring: BaseRing,
    x_degree: i64,
    max_rank: usize,
) -> TwistedInstance {
    let mut inst = random_twisted_instance(rng, ring, x_degree, max_rank);
    for _ in 0..32 {
        let space = inst.twisted.space();
        if !space.j(inst.twisted.diff()).expect("derivation").is_zero() {
            break;
        }
        inst = random_twisted_instance(rng, ring, x_degree, max_rank);
    }
    inst
}

/// A DG `A`-module `A e_c (+) cone(1_{A e_d})` conjugated by a random automorphism.
/// Its extension to `B` is homotopy equivalent to a shift of `B`, so
/// `Ext^{|X|}_B(N, N) = 0`.
pub fn random_rigid_dg_module<R: Rng>(
    rng: &mut R,
    adj: &Arc<DividedPowerAdjunction>,
) -> (GradedFreeModule, ADerivation) {
    let alg = adj.algebra();
    let ring = alg.ring();
    let c = rng.gen_range(0..=6);
    let mut degrees = vec![c];
    if rng.gen_bool(0.7) {
        let d = rng.gen_range(0..=5);
        degrees.extend([d, d + 1]);
    }
    let module = GradedFreeModule::with_degrees(alg.clone(), &degrees);
    let mut values = AMap::zero(degrees.len(), degrees.len(), -1);
    if degrees.len() == 3 {
        values.entries[1][2] = AElem::scalar(ring.one());
    }
    let a = random_a_automorphism(rng, &module);
    let delta = conjugate_derivation(&module, &ADerivation::new(values), &a);
    (module, delta)
}

/// `A = Z/2`, `t = 0`, `|X| = 2`, `M = e_0 A + e_3 A` and `d^N = (0, d_1)` with
/// `d_1(e_3) = e_0`. No `gamma` of degree -2 exists, so `N` does not lift.
pub fn unliftable_z2_example() -> SemiFreeDGModule {
    let ring = BaseRing::ZMod(2);
    let alg = Arc::new(ExteriorDGAlgebra::new(ring));
    let adj = Arc::new(build_adjunction(alg.clone(), "X", 2, AElem::zero()).expect("valid"));
    let module = GradedFreeModule::with_degrees(alg, &[0, 3]);
    let space = Arc::new(FreeBModule::new(adj, module).expect("same algebra"));
    let mut d1 = AMap::zero(2, 2, -3);
    d1.entries[0][1] = AElem::scalar(ring.one());
    let d = space
        .derivation(&ADerivation::new(AMap::zero(2, 2, -1)), &[d1])
        .expect("valid");
    SemiFreeDGModule::new(space, d).expect("square zero")
}
