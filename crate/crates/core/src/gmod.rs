//! Finite graded free `A`-modules, graded `A`-linear maps and `A`-derivations.
//!
//! Elements of `M` are written `sum_j e_j a_j` with coefficients on the right, so an
//! `A`-linear map is a matrix `(c_ij)` with `e_j -> sum_i e_i c_ij` and composition is
//! the plain matrix product. Every `M` also has the `R`-basis `e_j mu` for the
//! square-free monomials `mu`, indexed as `j * 2^k + mu`.

use std::sync::Arc;

use thiserror::Error;

use crate::dga::{AElem, ExteriorDGAlgebra, Monomial};
use crate::ring::{BaseRing, RMatrix, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GmodError {
    #[error("duplicate basis name {0}")]
    DuplicateName(String),
    #[error("coefficient ({row},{col}) of {what} has degree {found}, expected {expected}")]
    EntryDegree {
        what: String,
        row: usize,
        col: usize,
        found: i64,
        expected: i64,
    },
    #[error("coefficient ({row},{col}) of {what} is not homogeneous")]
    Inhomogeneous {
        what: String,
        row: usize,
        col: usize,
    },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
}

/// `M = e_1 A + ... + e_p A` with `|e_j|` arbitrary integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedFreeModule {
    algebra: Arc<ExteriorDGAlgebra>,
    basis: Vec<BasisElement>,
}

/// An element of `M` as its right coefficient vector.
pub type MElem = Vec<AElem>;

impl GradedFreeModule {
    pub fn new(
        algebra: Arc<ExteriorDGAlgebra>,
        basis: Vec<BasisElement>,
    ) -> Result<Self, GmodError> {
        for (i, b) in basis.iter().enumerate() {
            if basis[..i].iter().any(|c| c.name == b.name) {
                return Err(GmodError::DuplicateName(b.name.clone()));
            }
        }
        Ok(GradedFreeModule { algebra, basis })
    }

    /// Basis names `e0, e1, ...` for the given degrees.
    pub fn with_degrees(algebra: Arc<ExteriorDGAlgebra>, degrees: &[i64]) -> Self {
        let basis = degrees
            .iter()
            .enumerate()
            .map(|(i, &degree)| BasisElement {
                name: format!("e{i}"),
                degree,
            })
            .collect();
        GradedFreeModule { algebra, basis }
    }

    pub fn algebra(&self) -> &Arc<ExteriorDGAlgebra> {
        &self.algebra
    }

    pub fn ring(&self) -> BaseRing {
        self.algebra.ring()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, j: usize) -> i64 {
        self.basis[j].degree
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.iter().map(|b| b.degree).collect()
    }

    /// Rank of `M` over `R`.
    pub fn r_dim(&self) -> usize {
        self.rank() * self.algebra.num_monomials()
    }

    pub fn r_index(&self, j: usize, mu: Monomial) -> usize {
        j * self.algebra.num_monomials() + mu as usize
    }

    pub fn r_split(&self, idx: usize) -> (usize, Monomial) {
        let n = self.algebra.num_monomials();
        (idx / n, (idx % n) as Monomial)
    }

    pub fn r_degree(&self, idx: usize) -> i64 {
        let (j, mu) = self.r_split(idx);
        self.degree(j) + self.algebra.monomial_degree(mu)
    }

    /// Indices of the `R`-basis of `M_n`, in increasing order.
    pub fn r_basis_in_degree(&self, n: i64) -> Vec<usize> {
        (0..self.r_dim())
            .filter(|&i| self.r_degree(i) == n)
            .collect()
    }

    /// Lowest and highest degree of a nonzero element, `None` for the zero module.
    pub fn degree_bounds(&self) -> Option<(i64, i64)> {
        let degs = (0..self.r_dim()).map(|i| self.r_degree(i));
        Some((degs.clone().min()?, degs.max()?))
    }

    pub fn zero_elem(&self) -> MElem {
        vec![AElem::zero(); self.rank()]
    }

    /// `R`-coordinates of an element.
    pub fn to_coords(&self, m: &[AElem]) -> Vec<Scalar> {
        let ring = self.ring();
        let mut out = vec![ring.zero(); self.r_dim()];
        for (j, a) in m.iter().enumerate() {
            for (mu, c) in a.terms() {
                out[self.r_index(j, mu)] = c.clone();
            }
        }
        out
    }

    pub fn from_coords(&self, v: &[Scalar]) -> MElem {
        let mut out = self.zero_elem();
        for (idx, c) in v.iter().enumerate() {
            let (j, mu) = self.r_split(idx);
            out[j].add_term(mu, c);
        }
        out
    }

    /// Matrix of left multiplication by `a`: `a (e_j mu) = (-1)^{|a||e_j|} e_j (a mu)`.
    pub fn left_mult_matrix(&self, a: &AElem) -> RMatrix {
        let ring = self.ring();
        let alg = &self.algebra;
        let mut out = RMatrix::zeros(ring, self.r_dim(), self.r_dim());
        for j in 0..self.rank() {
            for mu in 0..alg.num_monomials() as Monomial {
                let col = self.r_index(j, mu);
                let prod = alg.mul(a, &AElem::monomial(mu, ring.one()));
                for (nu, c) in prod.terms() {
                    let deg_a = alg.monomial_degree(nu) - alg.monomial_degree(mu);
                    out.set(
                        self.r_index(j, nu),
                        col,
                        c * &ring.sign(deg_a * self.degree(j)),
                    );
                }
            }
        }
        out
    }

    /// Matrix of the canonical derivation `e_j a -> (-1)^{|e_j|} e_j d(a)`.
    pub fn canonical_derivation_matrix(&self) -> RMatrix {
        let ring = self.ring();
        let alg = &self.algebra;
        let mut out = RMatrix::zeros(ring, self.r_dim(), self.r_dim());
        for j in 0..self.rank() {
            let s = ring.sign(self.degree(j));
            for mu in 0..alg.num_monomials() as Monomial {
                let d = alg.diff(&AElem::monomial(mu, ring.one()));
                for (nu, c) in d.terms() {
                    out.set(self.r_index(j, nu), self.r_index(j, mu), c * &s);
                }
            }
        }
        out
    }
}

/// A graded `A`-linear map of degree `degree` in right coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AMap {
    pub degree: i64,
    pub entries: Vec<Vec<AElem>>,
}

impl AMap {
    pub fn zero(rows: usize, cols: usize, degree: i64) -> Self {
        AMap {
            degree,
            entries: vec![vec![AElem::zero(); cols]; rows],
        }
    }

    pub fn identity(alg: &ExteriorDGAlgebra, n: usize) -> Self {
        let mut out = AMap::zero(n, n, 0);
        for i in 0..n {
            out.entries[i][i] = alg.one();
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(AElem::is_zero)
    }

    /// Checks that entry `(i, j)` is homogeneous of degree `|e_j| + r - |e'_i|`.
    pub fn validate(
        &self,
        what: &str,
        src: &GradedFreeModule,
        tgt: &GradedFreeModule,
    ) -> Result<(), GmodError> {
        if self.rows() != tgt.rank() || (src.rank() > 0 && self.cols() != src.rank()) {
            return Err(GmodError::Shape(format!(
                "{what} is {}x{}, expected {}x{}",
                self.rows(),
                self.cols(),
                tgt.rank(),
                src.rank()
            )));
        }
        let alg = src.algebra();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let expected = src.degree(j) + self.degree - tgt.degree(i);
                match alg.degree_of(c) {
                    Some(found) if found == expected => {}
                    Some(found) => {
                        return Err(GmodError::EntryDegree {
                            what: what.into(),
                            row: i,
                            col: j,
                            found,
                            expected,
                        })
                    }
                    None => {
                        return Err(GmodError::Inhomogeneous {
                            what: what.into(),
                            row: i,
                            col: j,
                        })
                    }
                }
            }
        }
        Ok(())
    }

    /// `f(sum_j e_j a_j) = sum_i e_i sum_j c_ij a_j`.
    pub fn apply(&self, alg: &ExteriorDGAlgebra, m: &[AElem]) -> MElem {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(m)
                    .fold(AElem::zero(), |acc, (c, a)| acc.add(&alg.mul(c, a)))
            })
            .collect()
    }

    pub fn add(&self, other: &AMap) -> AMap {
        AMap {
            degree: self.degree,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.add(b)).collect())
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> AMap {
        AMap {
            degree: self.degree,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|a| a.scale(c)).collect())
                .collect(),
        }
    }
}

/// Composition `f o g` as the product of coefficient matrices.
pub fn amap_compose(alg: &ExteriorDGAlgebra, f: &AMap, g: &AMap) -> Result<AMap, GmodError> {
    if f.cols() != g.rows() && !(g.rows() == 0 && f.cols() == 0) {
        return Err(GmodError::Shape(format!(
            "cannot compose {}x{} with {}x{}",
            f.rows(),
            f.cols(),
            g.rows(),
            g.cols()
        )));
    }
    let mut out = AMap::zero(f.rows(), g.cols(), f.degree + g.degree);
    for (i, frow) in f.entries.iter().enumerate() {
        for (k, o) in out.entries[i].iter_mut().enumerate() {
            for (j, c) in frow.iter().enumerate() {
                *o = o.add(&alg.mul(c, &g.entries[j][k]));
            }
        }
    }
    Ok(out)
}

/// Inverse of a square degree-0 `A`-linear map. The reduction `P` of `f` modulo the
/// ideal `(Y_1, ..., Y_k)` is inverted over `R`; then `f = P (1 + P^{-1} Q)` with
/// `P^{-1} Q` nilpotent of order at most `k + 1`. `None` when `P` is singular.
pub fn amap_inverse(alg: &ExteriorDGAlgebra, f: &AMap) -> Option<AMap> {
    let ring = alg.ring();
    let n = f.rows();
    let mut p = RMatrix::zeros(ring, n, n);
    for (i, row) in f.entries.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if let Some(s) = c.constant() {
                p.set(i, j, s.clone());
            }
        }
    }
    let p_inv = crate::ring::inverse(&p).ok()??;
    let p_inv = AMap {
        degree: 0,
        entries: (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| AElem::scalar(p_inv.get(i, j).clone()))
                    .collect()
            })
            .collect(),
    };
    let q = AMap {
        degree: 0,
        entries: f
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        c.terms()
                            .filter(|(m, _)| *m != 0)
                            .fold(AElem::zero(), |mut acc, (m, s)| {
                                acc.add_term(m, s);
                                acc
                            })
                    })
                    .collect()
            })
            .collect(),
    };
    let nil = amap_compose(alg, &p_inv, &q)
        .ok()?
        .scale(&ring.from_i64(-1));
    let mut power = AMap::identity(alg, n);
    let mut series = AMap::identity(alg, n);
    for _ in 0..alg.num_vars() {
        power = amap_compose(alg, &power, &nil).ok()?;
        series = series.add(&power);
    }
    amap_compose(alg, &series, &p_inv).ok()
}

/// An `A`-derivation of degree `-1` on `M`, determined by its values on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ADerivation {
    /// Column `j` holds `delta(e_j)`.
    pub values: AMap,
}

impl ADerivation {
    pub fn new(values: AMap) -> Self {
        ADerivation { values }
    }
}

/// `delta(sum_j e_j a_j) = sum_j delta(e_j) a_j + (-1)^{|e_j|} e_j d(a_j)`.
pub fn aderiv_apply(module: &GradedFreeModule, delta: &ADerivation, m: &[AElem]) -> MElem {
    let alg = module.algebra();
    let ring = module.ring();
    let mut out = delta.values.apply(alg, m);
    for (j, a) in m.iter().enumerate() {
        let da = alg.diff(a).scale(&ring.sign(module.degree(j)));
        out[j] = out[j].add(&da);
    }
    out
}

/// Full `R`-matrix of an `A`-linear map `src -> tgt` on the `R`-bases.
pub fn linearize_map(src: &GradedFreeModule, tgt: &GradedFreeModule, f: &AMap) -> RMatrix {
    let alg = src.algebra();
    let ring = src.ring();
    let mut out = RMatrix::zeros(ring, tgt.r_dim(), src.r_dim());
    for j in 0..src.rank() {
        for mu in 0..alg.num_monomials() as Monomial {
            let col = src.r_index(j, mu);
            let mono = AElem::monomial(mu, ring.one());
            for i in 0..tgt.rank() {
                for (nu, c) in alg.mul(&f.entries[i][j], &mono).terms() {
                    out.set(tgt.r_index(i, nu), col, c.clone());
                }
            }
        }
    }
    out
}

/// Full `R`-matrix of an `A`-derivation.
pub fn linearize_derivation(module: &GradedFreeModule, delta: &ADerivation) -> RMatrix {
    linearize_map(module, module, &delta.values)
        .add(&module.canonical_derivation_matrix())
        .expect("same shape")
}

/// A map to be linearized degreewise.
#[derive(Clone, Copy, Debug)]
pub enum LinearOp<'a> {
    Map(&'a AMap),
    Derivation(&'a ADerivation),
}

/// Matrix of `M_n -> M_{n + |op|}` in the `R`-bases of the two graded pieces.
pub fn linearize_degree(module: &GradedFreeModule, op: LinearOp<'_>, n: i64) -> RMatrix {
    let (full, degree) = match op {
        LinearOp::Map(f) => (linearize_map(module, module, f), f.degree),
        LinearOp::Derivation(d) => (linearize_derivation(module, d), -1),
    };
    full.select(
        &module.r_basis_in_degree(n + degree),
        &module.r_basis_in_degree(n),
    )
}

/// Reads the coefficient matrix `c_ij = sum_nu m[(i, nu), (j, 1)] nu` off a full
/// `R`-matrix. Exact inverse of [`linearize_map`] on `A`-linear matrices.
pub fn extract_amap(
    src: &GradedFreeModule,
    tgt: &GradedFreeModule,
    m: &RMatrix,
    degree: i64,
) -> AMap {
    let nm = src.algebra().num_monomials() as Monomial;
    let mut out = AMap::zero(tgt.rank(), src.rank(), degree);
    for j in 0..src.rank() {
        let col = src.r_index(j, 0);
        for i in 0..tgt.rank() {
            for nu in 0..nm {
                out.entries[i][j].add_term(nu, m.get(tgt.r_index(i, nu), col));
            }
        }
    }
    out
}

/// True when the full `R`-matrix commutes with the right `A`-action.
pub fn is_a_linear(src: &GradedFreeModule, tgt: &GradedFreeModule, m: &RMatrix) -> bool {
    linearize_map(src, tgt, &extract_amap(src, tgt, m, 0)) == *m
}
