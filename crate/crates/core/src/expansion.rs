//! `B`-linear maps and `B`-derivations on `N = B (x) M` through their expansions
//! `f|_M = sum_i X^(i) f_i`.
//!
//! Each coefficient `f_i : M -> M` is kept as a full `R`-matrix on the `R`-basis of
//! `M`. `A`-linearity of a coefficient is then a property of the matrix that can be
//! checked, and composites that are neither `B`-linear nor derivations still have a
//! well defined restriction to `M`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::dga::DividedPowerAdjunction;
use crate::gmod::{
    amap_inverse, extract_amap, is_a_linear, linearize_derivation, linearize_map, ADerivation,
    AMap, GmodError, GradedFreeModule,
};
use crate::ring::{BaseRing, RMatrix, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("{op} is not defined on an expansion of kind {kind}")]
    Kind { op: &'static str, kind: Kind },
    #[error("{what}: degree {found}, expected {expected}")]
    Degree {
        what: &'static str,
        found: i64,
        expected: i64,
    },
    #[error("module does not match the algebra of the adjunction")]
    ModuleMismatch,
    #[error("coefficient {0} is not A-linear")]
    NotALinear(usize),
    #[error("constant term is not an A-derivation")]
    NotADerivation,
    #[error("constant term is not invertible: its reduction modulo the exterior variables is singular over {0}")]
    NotInvertible(BaseRing),
    #[error("differential does not square to zero: coefficient {0} of d o d is nonzero")]
    NotSquareZero(usize),
    #[error("expected {expected} coefficient matrices of size {dim}, got an incompatible one")]
    Shape { expected: usize, dim: usize },
    #[error(transparent)]
    Gmod(#[from] GmodError),
}

/// What an expansion is known to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// `B`-linear map.
    Linear,
    /// `B`-derivation.
    Derivation,
    /// Only the restriction to `M` is meaningful.
    Plain,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Linear => "linear",
            Kind::Derivation => "derivation",
            Kind::Plain => "plain",
        };
        f.write_str(s)
    }
}

/// The coefficient list of an expansion. Trailing zero coefficients are dropped, so
/// equality of expansions is equality of coefficient lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    kind: Kind,
    degree: i64,
    coeffs: Vec<RMatrix>,
}

impl Expansion {
    fn normalized(kind: Kind, degree: i64, mut coeffs: Vec<RMatrix>) -> Self {
        while coeffs.last().is_some_and(RMatrix::is_zero) {
            coeffs.pop();
        }
        Expansion {
            kind,
            degree,
            coeffs,
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn coeffs(&self) -> &[RMatrix] {
        &self.coeffs
    }

    /// Number of stored coefficients; `f_i = 0` for larger `i`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// An element `sum_n X^(n) m_n` of `N`, with `m_n` in `R`-coordinates.
pub type NElem = BTreeMap<usize, Vec<Scalar>>;

/// The graded `B`-module `N = B (x)_A M` on which expansions act.
#[derive(Clone, Debug)]
pub struct FreeBModule {
    adjunction: Arc<DividedPowerAdjunction>,
    module: GradedFreeModule,
    t_mat: RMatrix,
    dcan: RMatrix,
    bounds: Option<(i64, i64)>,
}

impl FreeBModule {
    pub fn new(
        adjunction: Arc<DividedPowerAdjunction>,
        module: GradedFreeModule,
    ) -> Result<Self, ExpansionError> {
        if **adjunction.algebra() != **module.algebra() {
            return Err(ExpansionError::ModuleMismatch);
        }
        let t_mat = module.left_mult_matrix(adjunction.t());
        let dcan = module.canonical_derivation_matrix();
        let bounds = module.degree_bounds();
        Ok(FreeBModule {
            adjunction,
            module,
            t_mat,
            dcan,
            bounds,
        })
    }

    pub fn adjunction(&self) -> &Arc<DividedPowerAdjunction> {
        &self.adjunction
    }

    pub fn module(&self) -> &GradedFreeModule {
        &self.module
    }

    pub fn ring(&self) -> BaseRing {
        self.module.ring()
    }

    pub fn x_degree(&self) -> i64 {
        self.adjunction.x_degree()
    }

    pub fn dim(&self) -> usize {
        self.module.r_dim()
    }

    /// Matrix of left multiplication by `t` on `M`.
    pub fn t_matrix(&self) -> &RMatrix {
        &self.t_mat
    }

    /// Matrix of the canonical derivation `e_j a -> (-1)^{|e_j|} e_j d(a)`.
    pub fn canonical_derivation(&self) -> &RMatrix {
        &self.dcan
    }

    /// Degree bounds `(lo, hi)` of `M`.
    pub fn bounds(&self) -> Option<(i64, i64)> {
        self.bounds
    }

    /// Number of coefficients a degree `r` expansion can have: `f_i` is a map of
    /// degree `r - i|X|` on `M`, which vanishes once that drops below `lo - hi`.
    pub fn coefficient_count(&self, r: i64) -> usize {
        let Some((lo, hi)) = self.bounds else {
            return 0;
        };
        let floor = lo - hi;
        if r < floor {
            0
        } else {
            ((r - floor) / self.x_degree()) as usize + 1
        }
    }

    fn zero_matrix(&self) -> RMatrix {
        RMatrix::zeros(self.ring(), self.dim(), self.dim())
    }

    fn coeff<'a>(&self, f: &'a Expansion, i: usize) -> Option<&'a RMatrix> {
        f.coeffs.get(i)
    }

    fn mul(a: &RMatrix, b: &RMatrix) -> RMatrix {
        a.mul(b).expect("coefficients share the R-basis of M")
    }

    fn add(a: &RMatrix, b: &RMatrix) -> RMatrix {
        a.add(b).expect("coefficients share the R-basis of M")
    }

    /// Builds an expansion from full coefficient matrices, checking shapes and
    /// truncating to the coefficients that can be nonzero.
    pub fn from_matrices(
        &self,
        kind: Kind,
        degree: i64,
        coeffs: Vec<RMatrix>,
    ) -> Result<Expansion, ExpansionError> {
        let d = self.dim();
        if coeffs
            .iter()
            .any(|m| m.rows() != d || m.cols() != d || m.ring() != self.ring())
        {
            return Err(ExpansionError::Shape {
                expected: coeffs.len(),
                dim: d,
            });
        }
        let mut coeffs = coeffs;
        coeffs.truncate(self.coefficient_count(degree));
        let out = Expansion::normalized(kind, degree, coeffs);
        self.verify_kind(&out)?;
        Ok(out)
    }

    /// The expansion with coefficients `f_i` given as `A`-linear maps.
    pub fn linear(&self, degree: i64, coeffs: &[AMap]) -> Result<Expansion, ExpansionError> {
        let m = &self.module;
        let mut mats = Vec::with_capacity(coeffs.len());
        for (i, f) in coeffs.iter().enumerate() {
            let expected = degree - i as i64 * self.x_degree();
            if f.degree != expected {
                return Err(ExpansionError::Degree {
                    what: "expansion coefficient",
                    found: f.degree,
                    expected,
                });
            }
            f.validate(&format!("coefficient {i}"), m, m)?;
            mats.push(linearize_map(m, m, f));
        }
        self.from_matrices(Kind::Linear, degree, mats)
    }

    /// The derivation with constant term `delta_0` and higher coefficients `rest`
    /// (`rest[0]` is `delta_1`).
    pub fn derivation(
        &self,
        delta_0: &ADerivation,
        rest: &[AMap],
    ) -> Result<Expansion, ExpansionError> {
        let m = &self.module;
        delta_0.values.validate("constant term", m, m)?;
        if delta_0.values.degree != -1 {
            return Err(ExpansionError::Degree {
                what: "derivation",
                found: delta_0.values.degree,
                expected: -1,
            });
        }
        let mut mats = vec![linearize_derivation(m, delta_0)];
        for (i, f) in rest.iter().enumerate() {
            let expected = -1 - (i as i64 + 1) * self.x_degree();
            if f.degree != expected {
                return Err(ExpansionError::Degree {
                    what: "derivation coefficient",
                    found: f.degree,
                    expected,
                });
            }
            f.validate(&format!("coefficient {}", i + 1), m, m)?;
            mats.push(linearize_map(m, m, f));
        }
        self.from_matrices(Kind::Derivation, -1, mats)
    }

    pub fn identity(&self) -> Expansion {
        Expansion::normalized(
            Kind::Linear,
            0,
            vec![RMatrix::identity(self.ring(), self.dim())],
        )
    }

    pub fn zero(&self, kind: Kind, degree: i64) -> Expansion {
        Expansion::normalized(kind, degree, Vec::new())
    }

    /// `B (x) alpha` for an `A`-linear `alpha`.
    pub fn extend_linear(&self, alpha: &AMap) -> Result<Expansion, ExpansionError> {
        self.linear(alpha.degree, std::slice::from_ref(alpha))
    }

    /// `B (x) beta` for an `A`-derivation `beta`.
    pub fn extend_derivation(&self, beta: &ADerivation) -> Result<Expansion, ExpansionError> {
        self.derivation(beta, &[])
    }

    /// Checks that the coefficients are compatible with the declared kind.
    pub fn verify_kind(&self, f: &Expansion) -> Result<(), ExpansionError> {
        let m = &self.module;
        match f.kind {
            Kind::Plain => Ok(()),
            Kind::Linear => {
                for (i, c) in f.coeffs.iter().enumerate() {
                    if !is_a_linear(m, m, c) {
                        return Err(ExpansionError::NotALinear(i));
                    }
                }
                Ok(())
            }
            Kind::Derivation => {
                if f.degree != -1 {
                    return Err(ExpansionError::Degree {
                        what: "derivation",
                        found: f.degree,
                        expected: -1,
                    });
                }
                let c0 = self
                    .coeff(f, 0)
                    .cloned()
                    .unwrap_or_else(|| self.zero_matrix());
                if self.dim() > 0 && !is_a_linear(m, m, &c0.sub(&self.dcan).expect("same shape")) {
                    return Err(ExpansionError::NotADerivation);
                }
                for (i, c) in f.coeffs.iter().enumerate().skip(1) {
                    if !is_a_linear(m, m, c) {
                        return Err(ExpansionError::NotALinear(i));
                    }
                }
                Ok(())
            }
        }
    }

    /// Declares `f` to be of the given kind after checking its coefficients.
    pub fn rekind(&self, f: Expansion, kind: Kind) -> Result<Expansion, ExpansionError> {
        let out = Expansion { kind, ..f };
        self.verify_kind(&out)?;
        Ok(out)
    }

    /// The `A`-linear coefficients of `f`. For a derivation the constant term is
    /// reported through its values on the basis.
    pub fn coefficient_maps(&self, f: &Expansion) -> Vec<AMap> {
        let m = &self.module;
        f.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| extract_amap(m, m, c, f.degree - i as i64 * self.x_degree()))
            .collect()
    }

    /// The constant term of a derivation as an `A`-derivation.
    pub fn constant_derivation(&self, f: &Expansion) -> Result<ADerivation, ExpansionError> {
        if f.kind != Kind::Derivation {
            return Err(ExpansionError::Kind {
                op: "constant derivation",
                kind: f.kind,
            });
        }
        let m = &self.module;
        let c0 = self
            .coeff(f, 0)
            .cloned()
            .unwrap_or_else(|| self.zero_matrix());
        Ok(ADerivation::new(extract_amap(m, m, &c0, -1)))
    }

    /// `f o g` restricted to `M`. `f` must be `B`-linear or a `B`-derivation; only the
    /// restriction of `g` is used. The convolution is
    /// `(fg)_n = sum_i C(n, i) f_i g_{n-i}`, plus `t g_{n+1}` when `f` is a derivation.
    pub fn compose(&self, f: &Expansion, g: &Expansion) -> Result<Expansion, ExpansionError> {
        if f.kind == Kind::Plain {
            return Err(ExpansionError::Kind {
                op: "composition on the left",
                kind: f.kind,
            });
        }
        let ring = self.ring();
        let degree = f.degree + g.degree;
        let count = self.coefficient_count(degree);
        let mut coeffs = Vec::with_capacity(count);
        for n in 0..count {
            let mut acc = self.zero_matrix();
            if f.kind == Kind::Derivation {
                if let Some(g1) = self.coeff(g, n + 1) {
                    acc = Self::add(&acc, &Self::mul(&self.t_mat, g1));
                }
            }
            for i in 0..=n {
                let (Some(fi), Some(gj)) = (self.coeff(f, i), self.coeff(g, n - i)) else {
                    continue;
                };
                let c = ring.binomial(n, i);
                if c.is_zero() {
                    continue;
                }
                acc = Self::add(&acc, &Self::mul(fi, gj).scale(&c));
            }
            coeffs.push(acc);
        }
        let kind = if f.kind == Kind::Linear && g.kind == Kind::Linear {
            Kind::Linear
        } else {
            Kind::Plain
        };
        Ok(Expansion::normalized(kind, degree, coeffs))
    }

    pub fn add_expansions(
        &self,
        f: &Expansion,
        g: &Expansion,
    ) -> Result<Expansion, ExpansionError> {
        if f.degree != g.degree {
            return Err(ExpansionError::Degree {
                what: "sum",
                found: g.degree,
                expected: f.degree,
            });
        }
        let n = f.coeffs.len().max(g.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeff(f, i), self.coeff(g, i)) {
                (Some(a), Some(b)) => Self::add(a, b),
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        let kind = match (f.kind, g.kind) {
            (Kind::Linear, Kind::Linear) => Kind::Linear,
            (Kind::Linear, Kind::Derivation) | (Kind::Derivation, Kind::Linear) => Kind::Derivation,
            _ => Kind::Plain,
        };
        Ok(Expansion::normalized(kind, f.degree, coeffs))
    }

    pub fn scale(&self, f: &Expansion, c: &Scalar) -> Expansion {
        let kind = if f.kind == Kind::Derivation && !c.is_one() {
            Kind::Plain
        } else {
            f.kind
        };
        Expansion::normalized(
            kind,
            f.degree,
            f.coeffs.iter().map(|m| m.scale(c)).collect(),
        )
    }

    pub fn sub_expansions(
        &self,
        f: &Expansion,
        g: &Expansion,
    ) -> Result<Expansion, ExpansionError> {
        let neg = Expansion::normalized(
            if g.kind == Kind::Linear {
                Kind::Linear
            } else {
                Kind::Plain
            },
            g.degree,
            g.coeffs.iter().map(RMatrix::neg).collect(),
        );
        let out = self.add_expansions(f, &neg)?;
        // A difference of two derivations is B-linear.
        let kind = match (f.kind, g.kind) {
            (Kind::Derivation, Kind::Derivation) | (Kind::Linear, Kind::Linear) => Kind::Linear,
            (Kind::Derivation, Kind::Linear) => Kind::Derivation,
            _ => Kind::Plain,
        };
        Ok(Expansion { kind, ..out })
    }

    /// The j-operator: `(f_0, f_1, f_2, ...) -> (f_1, f_2, ...)`, a `B`-linear map of
    /// degree `r - |X|`.
    pub fn j(&self, f: &Expansion) -> Result<Expansion, ExpansionError> {
        if f.kind == Kind::Plain {
            return Err(ExpansionError::Kind {
                op: "j",
                kind: f.kind,
            });
        }
        Ok(Expansion::normalized(
            Kind::Linear,
            f.degree - self.x_degree(),
            f.coeffs.iter().skip(1).cloned().collect(),
        ))
    }

    /// `j(h)|_M` for an arbitrary `h` known only through its restriction to `M`.
    pub fn j_restricted(&self, f: &Expansion) -> Expansion {
        Expansion::normalized(
            Kind::Plain,
            f.degree - self.x_degree(),
            f.coeffs.iter().skip(1).cloned().collect(),
        )
    }

    /// The Hom differential `d'(f) = d' o f - (-1)^r f o d` for a `B`-linear `f` of
    /// degree `r` between `(N, d)` and `(N, d')`. Coefficientwise
    /// `t f_{n+1} + sum_i C(n, i) (d'_i f_{n-i} - (-1)^r f_{n-i} d_i)`.
    pub fn hom_diff_between(
        &self,
        f: &Expansion,
        source: &Expansion,
        target: &Expansion,
    ) -> Result<Expansion, ExpansionError> {
        if f.kind != Kind::Linear {
            return Err(ExpansionError::Kind {
                op: "Hom differential",
                kind: f.kind,
            });
        }
        for d in [source, target] {
            if d.kind != Kind::Derivation {
                return Err(ExpansionError::Kind {
                    op: "Hom differential (differential argument)",
                    kind: d.kind,
                });
            }
        }
        let left = self.compose(target, f)?;
        let right = self.compose(f, source)?;
        let right = self.scale(&right, &self.ring().sign(f.degree));
        let out = self.sub_expansions(&left, &right)?;
        Ok(Expansion {
            kind: Kind::Linear,
            ..out
        })
    }

    pub fn hom_diff(&self, f: &Expansion, d: &Expansion) -> Result<Expansion, ExpansionError> {
        self.hom_diff_between(f, d, d)
    }

    /// Inverse of a degree-0 `B`-linear automorphism: `psi_0 = phi_0^{-1}` and
    /// `psi_n = -phi_0^{-1} sum_{i >= 1} C(n, i) phi_i psi_{n-i}`.
    pub fn invert(&self, phi: &Expansion) -> Result<Expansion, ExpansionError> {
        if phi.kind != Kind::Linear {
            return Err(ExpansionError::Kind {
                op: "inversion",
                kind: phi.kind,
            });
        }
        if phi.degree != 0 {
            return Err(ExpansionError::Degree {
                what: "inversion",
                found: phi.degree,
                expected: 0,
            });
        }
        let m = &self.module;
        let ring = self.ring();
        let phi0 = self
            .coeff(phi, 0)
            .cloned()
            .unwrap_or_else(|| self.zero_matrix());
        let phi0_inv = if self.dim() == 0 {
            phi0
        } else {
            let inv = amap_inverse(m.algebra(), &extract_amap(m, m, &phi0, 0))
                .ok_or(ExpansionError::NotInvertible(ring))?;
            linearize_map(m, m, &inv)
        };
        let count = self.coefficient_count(0);
        let mut psi: Vec<RMatrix> = Vec::with_capacity(count);
        if count > 0 {
            psi.push(phi0_inv.clone());
        }
        for n in 1..count {
            let mut acc = self.zero_matrix();
            for i in 1..=n {
                let Some(pi) = self.coeff(phi, i) else {
                    continue;
                };
                let c = ring.binomial(n, i);
                if c.is_zero() {
                    continue;
                }
                acc = Self::add(&acc, &Self::mul(pi, &psi[n - i]).scale(&c));
            }
            psi.push(Self::mul(&phi0_inv, &acc).neg());
        }
        Ok(Expansion::normalized(Kind::Linear, 0, psi))
    }

    /// Value of `f` on `X^(n) m` for `m` given in `R`-coordinates.
    pub fn apply(&self, f: &Expansion, n: usize, m: &[Scalar]) -> Result<NElem, ExpansionError> {
        if f.kind == Kind::Plain && n > 0 {
            return Err(ExpansionError::Kind {
                op: "application off M",
                kind: f.kind,
            });
        }
        let ring = self.ring();
        let mut out = NElem::new();
        let mut push = |idx: usize, v: Vec<Scalar>| {
            let slot = out.entry(idx).or_insert_with(|| vec![ring.zero(); v.len()]);
            for (s, x) in slot.iter_mut().zip(v) {
                *s = &*s + &x;
            }
        };
        if f.kind == Kind::Derivation && n > 0 {
            push(n - 1, self.t_mat.mul_vec(m).expect("shape"));
        }
        for (i, c) in f.coeffs.iter().enumerate() {
            let b = ring.binomial(n + i, i);
            let v: Vec<Scalar> = c
                .mul_vec(m)
                .expect("shape")
                .iter()
                .map(|x| x * &b)
                .collect();
            push(n + i, v);
        }
        out.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        Ok(out)
    }

    /// Value of `f` on an element of `N`.
    pub fn apply_elem(&self, f: &Expansion, x: &NElem) -> Result<NElem, ExpansionError> {
        let ring = self.ring();
        let mut out = NElem::new();
        for (n, m) in x {
            for (k, v) in self.apply(f, *n, m)? {
                let slot = out.entry(k).or_insert_with(|| vec![ring.zero(); v.len()]);
                for (s, y) in slot.iter_mut().zip(v) {
                    *s = &*s + &y;
                }
            }
        }
        out.retain(|_, v| v.iter().any(|x| !x.is_zero()));
        Ok(out)
    }
}

/// A semi-free DG `B`-module `N = B (x) M` given by the expansion of its differential.
#[derive(Clone, Debug)]
pub struct SemiFreeDGModule {
    space: Arc<FreeBModule>,
    diff: Expansion,
}

impl SemiFreeDGModule {
    /// Checks that `diff` is a derivation with `diff o diff = 0`, i.e.
    /// `t d_{n+1} + sum_i C(n, i) d_i d_{n-i} = 0` for every `n`.
    pub fn new(space: Arc<FreeBModule>, diff: Expansion) -> Result<Self, ExpansionError> {
        space.verify_kind(&diff)?;
        if diff.kind != Kind::Derivation {
            return Err(ExpansionError::Kind {
                op: "differential",
                kind: diff.kind,
            });
        }
        let square = space.compose(&diff, &diff)?;
        if let Some(n) = square.coeffs.iter().position(|c| !c.is_zero()) {
            return Err(ExpansionError::NotSquareZero(n));
        }
        Ok(SemiFreeDGModule { space, diff })
    }

    pub fn space(&self) -> &Arc<FreeBModule> {
        &self.space
    }

    pub fn diff(&self) -> &Expansion {
        &self.diff
    }

    pub fn module(&self) -> &GradedFreeModule {
        self.space.module()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{build_adjunction, AElem, ExteriorDGAlgebra};

    fn q_space(degrees: &[i64]) -> FreeBModule {
        let r = BaseRing::Rationals;
        let alg = Arc::new(ExteriorDGAlgebra::new(r));
        let adj = Arc::new(build_adjunction(alg.clone(), "X", 2, AElem::zero()).unwrap());
        FreeBModule::new(adj, GradedFreeModule::with_degrees(alg, degrees)).unwrap()
    }

    fn scalar_map(space: &FreeBModule, rows: &[&[i64]], degree: i64) -> AMap {
        let r = space.ring();
        AMap {
            degree,
            entries: rows
                .iter()
                .map(|row| row.iter().map(|&v| AElem::scalar(r.from_i64(v))).collect())
                .collect(),
        }
    }

    #[test]
    fn coefficient_count_follows_degree_spread() {
        let s = q_space(&[0, 2, 4]);
        assert_eq!(s.coefficient_count(0), 3);
        assert_eq!(s.coefficient_count(-4), 1);
        assert_eq!(s.coefficient_count(-5), 0);
        assert_eq!(s.coefficient_count(-1), 2);
    }

    #[test]
    fn convolution_of_first_coefficients() {
        // f = (0, f1), g = (0, g1) gives fg = (0, 0, 2 f1 g1)
        let s = q_space(&[0, 2, 4]);
        let zero = AMap::zero(3, 3, 0);
        let f1 = scalar_map(&s, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]], -2);
        let f = s.linear(0, &[zero, f1.clone()]).unwrap();
        let fg = s.compose(&f, &f).unwrap();
        assert_eq!(fg.kind(), Kind::Linear);
        let prod = linearize_map(s.module(), s.module(), &f1);
        let expected = prod.mul(&prod).unwrap().scale(&s.ring().from_i64(2));
        assert_eq!(fg.coeffs().len(), 3);
        assert!(fg.coeffs()[0].is_zero() && fg.coeffs()[1].is_zero());
        assert_eq!(fg.coeffs()[2], expected);
        assert_eq!(s.compose(&s.identity(), &f).unwrap(), f);
    }

    #[test]
    fn j_shifts_and_kills_extensions() {
        let s = q_space(&[0, 2, 4]);
        let f0 = scalar_map(&s, &[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]], 0);
        let f1 = scalar_map(&s, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]], -2);
        let f2 = scalar_map(&s, &[&[0, 0, 5], &[0, 0, 0], &[0, 0, 0]], -4);
        let f = s.linear(0, &[f0.clone(), f1.clone(), f2.clone()]).unwrap();
        assert_eq!(s.j(&f).unwrap(), s.linear(-2, &[f1, f2.clone()]).unwrap());
        assert_eq!(
            s.j(&s.j(&f).unwrap()).unwrap(),
            s.linear(-4, &[f2]).unwrap()
        );
        assert!(s.j(&s.extend_linear(&f0).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn invert_unrolls_recursion() {
        // phi = (1, f1): psi = (1, -f1, 2 f1 f1, ...)
        let s = q_space(&[0, 2, 4]);
        let f1 = scalar_map(&s, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]], -2);
        let id = AMap::identity(s.module().algebra(), 3);
        let phi = s.linear(0, &[id, f1.clone()]).unwrap();
        let psi = s.invert(&phi).unwrap();
        let m = linearize_map(s.module(), s.module(), &f1);
        assert_eq!(psi.coeffs()[1], m.neg());
        assert_eq!(
            psi.coeffs()[2],
            m.mul(&m).unwrap().scale(&s.ring().from_i64(2))
        );
        assert_eq!(s.compose(&phi, &psi).unwrap(), s.identity());
        assert_eq!(s.compose(&psi, &phi).unwrap(), s.identity());
    }

    #[test]
    fn zero_divisor_constant_term_is_not_invertible() {
        let r = BaseRing::ZMod(4);
        let alg = Arc::new(ExteriorDGAlgebra::new(r));
        let adj = Arc::new(build_adjunction(alg.clone(), "X", 2, AElem::zero()).unwrap());
        let s = FreeBModule::new(adj, GradedFreeModule::with_degrees(alg, &[0])).unwrap();
        let two = scalar_map(&s, &[&[2]], 0);
        let phi = s.linear(0, &[two]).unwrap();
        assert_eq!(s.invert(&phi), Err(ExpansionError::NotInvertible(r)));
    }

    #[test]
    fn apply_uses_divided_power_binomials() {
        let s = q_space(&[0, 2]);
        let r = s.ring();
        let f1 = scalar_map(&s, &[&[0, 1], &[0, 0]], -2);
        let f = s.linear(0, &[AMap::zero(2, 2, 0), f1]).unwrap();
        let m = vec![r.zero(), r.one()];
        let out = s.apply(&f, 1, &m).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[&2], vec![r.from_i64(2), r.zero()]);
    }

    #[test]
    fn derivation_applied_off_m() {
        // With t = 2Y over Z/4 and M = A e: d(X^(1) e) = t e + X^(1) d0(e).
        let r = BaseRing::ZMod(4);
        let alg = Arc::new(
            ExteriorDGAlgebra::new(r)
                .adjoin("Y", 1, AElem::scalar(r.from_i64(2)))
                .unwrap(),
        );
        let t = alg.variable(0).scale(&r.from_i64(2));
        let adj = Arc::new(build_adjunction(alg.clone(), "X", 2, t).unwrap());
        let s = FreeBModule::new(adj, GradedFreeModule::with_degrees(alg, &[0])).unwrap();
        let d = s
            .extend_derivation(&ADerivation::new(AMap::zero(1, 1, -1)))
            .unwrap();
        let e = vec![r.one(), r.zero()];
        let out = s.apply(&d, 1, &e).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[&0], vec![r.zero(), r.from_i64(2)]);
    }

    #[test]
    fn square_zero_is_enforced() {
        let s = Arc::new(q_space(&[0, 1, 2]));
        let d0 = ADerivation::new(scalar_map(&s, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]], -1));
        let d = s.extend_derivation(&d0).unwrap();
        assert_eq!(
            SemiFreeDGModule::new(s.clone(), d).err(),
            Some(ExpansionError::NotSquareZero(0))
        );
    }
}
