//! The obstruction `Delta_N = j(d^N)`, its vanishing in `Ext^{|X|+1}_B(N, N)`, the
//! construction of a lifting when it vanishes, and the isomorphism between two
//! liftings when `Ext^{|X|}_B(N, N) = 0`.

use thiserror::Error;

use crate::expansion::{Expansion, ExpansionError, FreeBModule, Kind, SemiFreeDGModule};
use crate::ext::{
    bounding_chain, coordinates, from_coordinates, hom_complex_basis, hom_differential_matrix,
};
use crate::gmod::{amap_inverse, extract_amap, linearize_map, ADerivation, AMap};
use crate::ring::{inconsistency_witness, solve_linear_system, RMatrix, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LiftError {
    #[error("N is not liftable: the obstruction class is nonzero")]
    NotLiftable { witness: Vec<Scalar> },
    #[error("phi is not a chain map: coefficient {0} of its Hom differential is nonzero")]
    NotACycle(usize),
    #[error("phi must be a degree 0 B-linear map")]
    NotAnIsomorphismCandidate,
    #[error("the constant term of phi is not invertible")]
    NotInvertible,
    #[error("j(phi) is not a boundary; Ext^|X|(N, N) obstructs the comparison")]
    NoBoundaryWitness,
    #[error("the two modules must share the adjunction and the basis degrees")]
    ModuleMismatch,
    #[error("the differential of {0} has nonzero higher coefficients; it is not a lifted module")]
    NotExtended(&'static str),
    #[error("certificate check failed: {0}")]
    CertificateFailed(&'static str),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
}

/// `Delta_N` together with a coboundary witness when one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub delta: Expansion,
    /// `gamma` of degree `-|X|` with `d gamma - gamma d = Delta_N`.
    pub gamma: Option<Expansion>,
    /// A functional on `E_{-|X|-1}` vanishing on boundaries but not on `Delta_N`.
    pub witness: Option<Vec<Scalar>>,
}

/// `Delta_N = j(d^N)`; checks `Delta d + d Delta = 0`.
pub fn delta_of(n: &SemiFreeDGModule) -> Result<Expansion, LiftError> {
    let space = n.space();
    let d = n.diff();
    let delta = space.j(d)?;
    let anti = space.add_expansions(&space.compose(&delta, d)?, &space.compose(d, &delta)?)?;
    if !anti.is_zero() {
        return Err(LiftError::CertificateFailed("Delta anticommutes with d"));
    }
    Ok(delta)
}

/// Solves `d gamma - gamma d = Delta_N` for a `B`-linear `gamma` of degree `-|X|`.
pub fn obstruction_solve(n: &SemiFreeDGModule) -> Result<Obstruction, LiftError> {
    let space = n.space();
    let d = n.diff();
    let delta = delta_of(n)?;
    let r = -space.x_degree();
    let a = hom_differential_matrix(space, d, d, r)?;
    let b = coordinates(space, &hom_complex_basis(space, r - 1), &delta);
    match solve_linear_system(&a, &b).expect("matching shapes") {
        Some(x) => {
            let gamma = from_coordinates(space, &hom_complex_basis(space, r), &x)?;
            if space.hom_diff(&gamma, d)? != delta {
                return Err(LiftError::CertificateFailed("d gamma - gamma d = Delta"));
            }
            Ok(Obstruction {
                delta,
                gamma: Some(gamma),
                witness: None,
            })
        }
        None => Ok(Obstruction {
            delta,
            gamma: None,
            witness: inconsistency_witness(&a, &b).expect("matching shapes"),
        }),
    }
}

/// The degree 0 automorphism `phi` with `phi_0 = 1` and `j(phi) = phi gamma`, from
/// `phi_{n+1} = sum_i C(n, i) phi_i gamma_{n-i}`.
pub fn build_phi(space: &FreeBModule, gamma: &Expansion) -> Result<Expansion, LiftError> {
    if gamma.kind() != Kind::Linear || gamma.degree() != -space.x_degree() {
        return Err(LiftError::Expansion(ExpansionError::Degree {
            what: "gamma",
            found: gamma.degree(),
            expected: -space.x_degree(),
        }));
    }
    let ring = space.ring();
    let count = space.coefficient_count(0);
    let mut g: Vec<RMatrix> = Vec::with_capacity(count);
    if count > 0 {
        g.push(RMatrix::identity(ring, space.dim()));
    }
    for n in 0..count.saturating_sub(1) {
        let mut acc = RMatrix::zeros(ring, space.dim(), space.dim());
        for i in 0..=n {
            let Some(f) = gamma.coeffs().get(n - i) else {
                continue;
            };
            let c = ring.binomial(n, i);
            if c.is_zero() {
                continue;
            }
            acc = acc
                .add(&g[i].mul(f).expect("shape").scale(&c))
                .expect("shape");
        }
        g.push(acc);
    }
    Ok(space.from_matrices(Kind::Linear, 0, g)?)
}

/// A lifting `(M, d^M)` of `N` with the certifying isomorphism
/// `phi : (N, d^N) -> B (x) (M, d^M)`.
#[derive(Clone, Debug)]
pub struct LiftResult {
    pub lifted_diff: ADerivation,
    /// `B (x) d^M` as an expansion.
    pub extended: Expansion,
    pub gamma: Expansion,
    pub phi: Expansion,
    pub phi_inverse: Expansion,
    /// `B (x) d^M o phi = phi o d^N` was checked coefficientwise.
    pub certified: bool,
}

impl LiftResult {
    pub fn lifted_module(&self, n: &SemiFreeDGModule) -> Result<SemiFreeDGModule, ExpansionError> {
        SemiFreeDGModule::new(n.space().clone(), self.extended.clone())
    }
}

pub fn lift(n: &SemiFreeDGModule) -> Result<LiftResult, LiftError> {
    let space = n.space();
    let d = n.diff();
    let obstruction = obstruction_solve(n)?;
    let Some(gamma) = obstruction.gamma else {
        return Err(LiftError::NotLiftable {
            witness: obstruction.witness.unwrap_or_default(),
        });
    };
    let phi = build_phi(space, &gamma)?;
    let phi_inverse = space.invert(&phi)?;
    let conjugated = space.compose(&phi, &space.compose(d, &phi_inverse)?)?;
    if !space.j_restricted(&conjugated).is_zero() {
        return Err(LiftError::CertificateFailed(
            "j of the conjugated differential vanishes",
        ));
    }
    let extended = space.rekind(conjugated, Kind::Derivation)?;
    let lifted = SemiFreeDGModule::new(space.clone(), extended.clone())?;
    let lhs = space.compose(lifted.diff(), &phi)?;
    let rhs = space.compose(&phi, d)?;
    if lhs.coeffs() != rhs.coeffs() {
        return Err(LiftError::CertificateFailed("B (x) d^M o phi = phi o d^N"));
    }
    Ok(LiftResult {
        lifted_diff: space.constant_derivation(&extended)?,
        extended,
        gamma,
        phi,
        phi_inverse,
        certified: true,
    })
}

/// A DG `A`-isomorphism `psi : (M, d^M) -> (M', d^M')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniqueIsoResult {
    pub psi: AMap,
    pub psi_inverse: AMap,
    /// `gamma` of degree `1 - |X|` with `j(phi) = gamma d^M + d^M' gamma`.
    pub gamma: Expansion,
}

/// From a DG `B`-isomorphism `phi : B (x) M -> B (x) M'` between two liftings,
/// builds `psi = phi_0 - t gamma_0` with inverse `phi_0^{-1} + t phi_0^{-1} gamma_0 phi_0^{-1}`.
pub fn unique_iso(
    m: &SemiFreeDGModule,
    m2: &SemiFreeDGModule,
    phi: &Expansion,
) -> Result<UniqueIsoResult, LiftError> {
    let space = m.space();
    if space.adjunction() != m2.space().adjunction()
        || space.module().degrees() != m2.module().degrees()
    {
        return Err(LiftError::ModuleMismatch);
    }
    for (which, x) in [("the source", m), ("the target", m2)] {
        if x.diff().len() > 1 {
            return Err(LiftError::NotExtended(which));
        }
    }
    if phi.kind() != Kind::Linear || phi.degree() != 0 {
        return Err(LiftError::NotAnIsomorphismCandidate);
    }
    let (src, tgt) = (m.diff(), m2.diff());
    let cycle = space.hom_diff_between(phi, src, tgt)?;
    if let Some(i) = cycle.coeffs().iter().position(|c| !c.is_zero()) {
        return Err(LiftError::NotACycle(i));
    }
    let module = space.module();
    let ring = space.ring();
    let zero = RMatrix::zeros(ring, space.dim(), space.dim());
    let phi0 = phi
        .coeffs()
        .first()
        .cloned()
        .unwrap_or_else(|| zero.clone());
    let phi0_inv = amap_inverse(module.algebra(), &extract_amap(module, module, &phi0, 0))
        .ok_or(LiftError::NotInvertible)?;
    let phi0_inv = linearize_map(module, module, &phi0_inv);

    let jphi = space.j(phi)?;
    let gamma = bounding_chain(space, src, tgt, &jphi)?.ok_or(LiftError::NoBoundaryWitness)?;
    let gamma0 = gamma
        .coeffs()
        .first()
        .cloned()
        .unwrap_or_else(|| zero.clone());
    let t = space.t_matrix();
    let mul = |a: &RMatrix, b: &RMatrix| a.mul(b).expect("shape");
    let psi = phi0.sub(&mul(t, &gamma0)).expect("shape");
    let psi_inv = phi0_inv
        .add(&mul(&mul(&mul(t, &phi0_inv), &gamma0), &phi0_inv))
        .expect("shape");

    let d_src = src
        .coeffs()
        .first()
        .cloned()
        .unwrap_or_else(|| zero.clone());
    let d_tgt = tgt
        .coeffs()
        .first()
        .cloned()
        .unwrap_or_else(|| zero.clone());
    if mul(&psi, &d_src) != mul(&d_tgt, &psi) {
        return Err(LiftError::CertificateFailed("psi d^M = d^M' psi"));
    }
    let id = RMatrix::identity(ring, space.dim());
    if mul(&psi, &psi_inv) != id || mul(&psi_inv, &psi) != id {
        return Err(LiftError::CertificateFailed("psi psi^{-1} = 1"));
    }
    Ok(UniqueIsoResult {
        psi: extract_amap(module, module, &psi, 0),
        psi_inverse: extract_amap(module, module, &psi_inv, 0),
        gamma,
    })
}
