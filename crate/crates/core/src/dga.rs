//! The exterior DG algebra `A = R<Y_1, ..., Y_k | dY_j = y_j>` on odd variables and
//! its divided-power extension `B = A<X | dX = t>` with `|X|` positive and even.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::ring::{BaseRing, Scalar};

/// Square-free monomial in the odd variables; bit `j` stands for `Y_{j+1}`.
pub type Monomial = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DgaError {
    #[error(
        "variable {name} has degree {degree}; adjoined exterior variables need odd positive degree"
    )]
    OddDegreeRequired { name: String, degree: i64 },
    #[error("the divided-power variable needs positive even degree, got {0}")]
    EvenDegreeRequired(i64),
    #[error("{what} has degree {found:?}, expected {expected}")]
    DegreeMismatch {
        what: String,
        found: Option<i64>,
        expected: i64,
    },
    #[error("{0} is not a cycle")]
    NotACycle(String),
    #[error("d-value of {0} may only involve earlier variables")]
    NotEarlier(String),
    #[error("duplicate variable name {0}")]
    DuplicateName(String),
    #[error("at most 16 exterior variables are supported")]
    TooManyVariables,
    #[error("coefficient lives in {found}, algebra is over {expected}")]
    WrongRing { found: BaseRing, expected: BaseRing },
}

/// An element of `A`: a finite sum of monomials with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AElem {
    terms: BTreeMap<Monomial, Scalar>,
}

impl AElem {
    pub fn zero() -> Self {
        AElem::default()
    }

    pub fn scalar(c: Scalar) -> Self {
        AElem::monomial(0, c)
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        AElem { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Scalar)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, m: Monomial) -> Option<&Scalar> {
        self.terms.get(&m)
    }

    /// The constant term, i.e. the image under `A -> R`.
    pub fn constant(&self) -> Option<&Scalar> {
        self.coeff(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e = &*e + c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add(&self, other: &AElem) -> AElem {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn sub(&self, other: &AElem) -> AElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> AElem {
        AElem {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> AElem {
        let mut out = AElem::zero();
        for (m, a) in self.terms() {
            out.add_term(m, &(a * c));
        }
        out
    }
}

/// Sign `(-1)^{#{(i, j) : i in a, j in b, i > j}}` of the product `Y_a * Y_b` of
/// disjoint monomials of odd variables.
fn merge_sign(a: Monomial, b: Monomial) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (a >> (j + 1)).count_ones();
    }
    swaps % 2 == 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddVariable {
    pub name: String,
    pub degree: i64,
    pub d_value: AElem,
}

/// `R<Y_1, ..., Y_k>` built by iterated odd adjunctions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorDGAlgebra {
    ring: BaseRing,
    vars: Vec<OddVariable>,
}

impl ExteriorDGAlgebra {
    /// `A = R` with zero differential.
    pub fn new(ring: BaseRing) -> Self {
        ExteriorDGAlgebra {
            ring,
            vars: Vec::new(),
        }
    }

    /// Adjoins an odd variable killing the cycle `d_value` of the current algebra.
    pub fn adjoin(mut self, name: &str, degree: i64, d_value: AElem) -> Result<Self, DgaError> {
        if degree <= 0 || degree % 2 == 0 {
            return Err(DgaError::OddDegreeRequired {
                name: name.to_string(),
                degree,
            });
        }
        if self.vars.len() >= 16 {
            return Err(DgaError::TooManyVariables);
        }
        if self.vars.iter().any(|v| v.name == name) {
            return Err(DgaError::DuplicateName(name.to_string()));
        }
        self.check_ring(&d_value)?;
        if d_value.terms().any(|(m, _)| m >> self.vars.len() != 0) {
            return Err(DgaError::NotEarlier(name.to_string()));
        }
        if !d_value.is_zero() && self.degree_of(&d_value) != Some(degree - 1) {
            return Err(DgaError::DegreeMismatch {
                what: format!("d({name})"),
                found: self.degree_of(&d_value),
                expected: degree - 1,
            });
        }
        if !self.diff(&d_value).is_zero() {
            return Err(DgaError::NotACycle(format!(
                "d({name}) = {}",
                self.format(&d_value)
            )));
        }
        self.vars.push(OddVariable {
            name: name.to_string(),
            degree,
            d_value,
        });
        Ok(self)
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn variables(&self) -> &[OddVariable] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Number of monomials, i.e. the rank of `A` over `R`.
    pub fn num_monomials(&self) -> usize {
        1 << self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn variable(&self, j: usize) -> AElem {
        AElem::monomial(1 << j, self.ring.one())
    }

    pub fn one(&self) -> AElem {
        AElem::scalar(self.ring.one())
    }

    pub fn monomial_degree(&self, m: Monomial) -> i64 {
        self.vars
            .iter()
            .enumerate()
            .filter(|(j, _)| m >> j & 1 == 1)
            .map(|(_, v)| v.degree)
            .sum()
    }

    /// Monomials of the given degree, in increasing order.
    pub fn monomials_of_degree(&self, degree: i64) -> Vec<Monomial> {
        (0..self.num_monomials() as Monomial)
            .filter(|&m| self.monomial_degree(m) == degree)
            .collect()
    }

    /// Degree of a homogeneous nonzero element; `None` for zero or inhomogeneous input.
    pub fn degree_of(&self, a: &AElem) -> Option<i64> {
        let mut degs = a.terms().map(|(m, _)| self.monomial_degree(m));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// True when every term has the given degree (zero is homogeneous of every degree).
    pub fn is_homogeneous_of(&self, a: &AElem, degree: i64) -> bool {
        a.terms().all(|(m, _)| self.monomial_degree(m) == degree)
    }

    pub fn check_ring(&self, a: &AElem) -> Result<(), DgaError> {
        match a.terms().find(|(_, c)| c.ring() != self.ring) {
            Some((_, c)) => Err(DgaError::WrongRing {
                found: c.ring(),
                expected: self.ring,
            }),
            None => Ok(()),
        }
    }

    /// Graded-commutative product.
    pub fn mul(&self, a: &AElem, b: &AElem) -> AElem {
        let mut out = AElem::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if ma & mb != 0 {
                    continue;
                }
                let c = ca * cb;
                let c = if merge_sign(ma, mb) { -c } else { c };
                out.add_term(ma | mb, &c);
            }
        }
        out
    }

    fn diff_monomial(&self, m: Monomial) -> AElem {
        let mut out = AElem::zero();
        let mut rest = m;
        let mut position = 0;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            // d(Y_S) = sum (-1)^{pos} y_j Y_{S \ j}; y_j is even so it moves freely.
            let others = AElem::monomial(m & !(1 << j), self.ring.sign(position));
            out = out.add(&self.mul(&self.vars[j].d_value, &others));
            position += 1;
        }
        out
    }

    pub fn diff(&self, a: &AElem) -> AElem {
        let mut out = AElem::zero();
        for (m, c) in a.terms() {
            out = out.add(&self.diff_monomial(m).scale(c));
        }
        out
    }

    /// Canonical text form, e.g. `2 + Y1 + 3*Y1*Y2`.
    pub fn format(&self, a: &AElem) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in a.terms().enumerate() {
            let (neg, c) = if c.is_negative() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let names: Vec<&str> = (0..self.vars.len())
                .filter(|j| m >> j & 1 == 1)
                .map(|j| self.vars[j].name.as_str())
                .collect();
            if names.is_empty() {
                let _ = write!(out, "{c}");
            } else {
                if !c.is_one() {
                    let _ = write!(out, "{c}*");
                }
                out.push_str(&names.join("*"));
            }
        }
        out
    }
}

/// `B = A<X | dX = t>` with divided powers `X^(i) X^(j) = C(i+j, i) X^(i+j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DividedPowerAdjunction {
    algebra: Arc<ExteriorDGAlgebra>,
    x_name: String,
    x_degree: i64,
    t: AElem,
}

/// Validates `x_degree` (positive, even), `|t| = x_degree - 1` and `d(t) = 0`.
pub fn build_adjunction(
    algebra: Arc<ExteriorDGAlgebra>,
    x_name: &str,
    x_degree: i64,
    t: AElem,
) -> Result<DividedPowerAdjunction, DgaError> {
    if x_degree <= 0 || x_degree % 2 != 0 {
        return Err(DgaError::EvenDegreeRequired(x_degree));
    }
    algebra.check_ring(&t)?;
    if !algebra.is_homogeneous_of(&t, x_degree - 1) {
        return Err(DgaError::DegreeMismatch {
            what: "t".into(),
            found: algebra.degree_of(&t),
            expected: x_degree - 1,
        });
    }
    if !algebra.diff(&t).is_zero() {
        return Err(DgaError::NotACycle(format!("t = {}", algebra.format(&t))));
    }
    Ok(DividedPowerAdjunction {
        algebra,
        x_name: x_name.to_string(),
        x_degree,
        t,
    })
}

/// An element `sum_i X^(i) a_i` of `B`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BElem {
    comps: BTreeMap<usize, AElem>,
}

impl BElem {
    pub fn zero() -> Self {
        BElem::default()
    }

    pub fn from_a(a: AElem) -> Self {
        BElem::divided_power(0, a)
    }

    /// `X^(i) a`.
    pub fn divided_power(i: usize, a: AElem) -> Self {
        let mut comps = BTreeMap::new();
        if !a.is_zero() {
            comps.insert(i, a);
        }
        BElem { comps }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &AElem)> {
        self.comps.iter().map(|(i, a)| (*i, a))
    }

    pub fn component(&self, i: usize) -> AElem {
        self.comps.get(&i).cloned().unwrap_or_default()
    }

    pub fn add_component(&mut self, i: usize, a: &AElem) {
        let sum = self.component(i).add(a);
        if sum.is_zero() {
            self.comps.remove(&i);
        } else {
            self.comps.insert(i, sum);
        }
    }

    pub fn add(&self, other: &BElem) -> BElem {
        let mut out = self.clone();
        for (i, a) in other.components() {
            out.add_component(i, a);
        }
        out
    }

    pub fn neg(&self) -> BElem {
        BElem {
            comps: self.comps.iter().map(|(i, a)| (*i, a.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &BElem) -> BElem {
        self.add(&other.neg())
    }
}

impl DividedPowerAdjunction {
    pub fn algebra(&self) -> &Arc<ExteriorDGAlgebra> {
        &self.algebra
    }

    pub fn ring(&self) -> BaseRing {
        self.algebra.ring()
    }

    pub fn x_name(&self) -> &str {
        &self.x_name
    }

    pub fn x_degree(&self) -> i64 {
        self.x_degree
    }

    pub fn t(&self) -> &AElem {
        &self.t
    }

    pub fn mul(&self, a: &BElem, b: &BElem) -> BElem {
        let ring = self.ring();
        let mut out = BElem::zero();
        for (i, x) in a.components() {
            for (j, y) in b.components() {
                let c = ring.binomial(i + j, i);
                if c.is_zero() {
                    continue;
                }
                out.add_component(i + j, &self.algebra.mul(x, y).scale(&c));
            }
        }
        out
    }

    /// `d(sum X^(i) a_i) = sum X^(i) (d a_i + t a_{i+1})`.
    pub fn diff(&self, b: &BElem) -> BElem {
        let mut out = BElem::zero();
        for (i, a) in b.components() {
            out.add_component(i, &self.algebra.diff(a));
            if i > 0 {
                out.add_component(i - 1, &self.algebra.mul(&self.t, a));
            }
        }
        out
    }

    /// Degree of a homogeneous nonzero element.
    pub fn degree_of(&self, b: &BElem) -> Option<i64> {
        let mut degs = b.components().flat_map(|(i, a)| {
            a.terms()
                .map(move |(m, _)| i as i64 * self.x_degree + self.algebra.monomial_degree(m))
        });
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn format(&self, b: &BElem) -> String {
        if b.is_zero() {
            return "0".into();
        }
        b.components()
            .map(|(i, a)| match i {
                0 => format!("({})", self.algebra.format(a)),
                _ => format!("{}^({i})*({})", self.x_name, self.algebra.format(a)),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4_example() -> DividedPowerAdjunction {
        let r = BaseRing::ZMod(4);
        let a = ExteriorDGAlgebra::new(r)
            .adjoin("Y", 1, AElem::scalar(r.from_i64(2)))
            .unwrap();
        let t = a.variable(0).scale(&r.from_i64(2));
        build_adjunction(Arc::new(a), "X", 2, t).unwrap()
    }

    fn two_vars(ring: BaseRing) -> ExteriorDGAlgebra {
        ExteriorDGAlgebra::new(ring)
            .adjoin("Y1", 1, AElem::scalar(ring.from_i64(3)))
            .unwrap()
            .adjoin("Y2", 1, AElem::scalar(ring.from_i64(5)))
            .unwrap()
    }

    #[test]
    fn odd_square_vanishes() {
        let a = two_vars(BaseRing::Rationals);
        let y = a.variable(0);
        assert!(a.mul(&y, &y).is_zero());
    }

    #[test]
    fn transposition_sign() {
        let a = two_vars(BaseRing::Rationals);
        let (y1, y2) = (a.variable(0), a.variable(1));
        assert_eq!(a.mul(&y2, &y1), a.mul(&y1, &y2).neg());
        assert_eq!(a.mul(&y1, &y2), AElem::monomial(0b11, a.ring().one()));
    }

    #[test]
    fn distributive_product() {
        let a = two_vars(BaseRing::Rationals);
        let (y1, y2) = (a.variable(0), a.variable(1));
        let lhs = a.mul(&a.one().add(&y1), &a.one().add(&y2));
        let rhs = a
            .one()
            .add(&y1)
            .add(&y2)
            .add(&AElem::monomial(0b11, a.ring().one()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn differential_on_generators_and_products() {
        let r = BaseRing::Rationals;
        let a = two_vars(r);
        assert_eq!(a.diff(&a.variable(0)), AElem::scalar(r.from_i64(3)));
        // d(Y1 Y2) = y1 Y2 - y2 Y1
        let expected = a
            .variable(1)
            .scale(&r.from_i64(3))
            .sub(&a.variable(0).scale(&r.from_i64(5)));
        assert_eq!(a.diff(&AElem::monomial(0b11, r.one())), expected);
        assert!(a.diff(&AElem::scalar(r.from_i64(7))).is_zero());
    }

    #[test]
    fn adjunction_validation() {
        let r = BaseRing::ZMod(4);
        let a = Arc::new(
            ExteriorDGAlgebra::new(r)
                .adjoin("Y", 1, AElem::scalar(r.from_i64(2)))
                .unwrap(),
        );
        assert_eq!(
            build_adjunction(a.clone(), "X", 3, AElem::zero()),
            Err(DgaError::EvenDegreeRequired(3))
        );
        assert!(matches!(
            build_adjunction(a.clone(), "X", 2, a.variable(0)),
            Err(DgaError::NotACycle(_))
        ));
        assert!(build_adjunction(a.clone(), "X", 2, a.variable(0).scale(&r.from_i64(2))).is_ok());
        assert!(matches!(
            build_adjunction(a.clone(), "X", 4, a.variable(0).scale(&r.from_i64(2))),
            Err(DgaError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn even_variable_rejected_in_exterior_algebra() {
        let r = BaseRing::Rationals;
        assert!(matches!(
            ExteriorDGAlgebra::new(r).adjoin("Y", 2, AElem::zero()),
            Err(DgaError::OddDegreeRequired { .. })
        ));
    }

    #[test]
    fn divided_power_products() {
        let b = z4_example();
        let q = BaseRing::Rationals;
        let bq =
            build_adjunction(Arc::new(ExteriorDGAlgebra::new(q)), "X", 2, AElem::zero()).unwrap();
        let x2 = BElem::divided_power(2, AElem::scalar(q.one()));
        let x3 = BElem::divided_power(3, AElem::scalar(q.one()));
        assert_eq!(
            bq.mul(&x2, &x3),
            BElem::divided_power(5, AElem::scalar(q.from_i64(10)))
        );

        let r = b.ring();
        let x2 = BElem::divided_power(2, AElem::scalar(r.one()));
        let x3 = BElem::divided_power(3, AElem::scalar(r.one()));
        assert_eq!(
            b.mul(&x2, &x3),
            BElem::divided_power(5, AElem::scalar(r.from_i64(2)))
        );
        let y = BElem::from_a(b.algebra().variable(0));
        assert_eq!(b.mul(&BElem::from_a(b.algebra().one()), &y), y);
    }

    #[test]
    fn divided_power_differential() {
        let b = z4_example();
        let r = b.ring();
        let x1 = BElem::divided_power(1, AElem::scalar(r.one()));
        assert_eq!(b.diff(&x1), BElem::from_a(b.t().clone()));
        let x3 = BElem::divided_power(3, AElem::scalar(r.one()));
        assert_eq!(b.diff(&x3), BElem::divided_power(2, b.t().clone()));
        assert!(b.diff(&BElem::from_a(b.algebra().one())).is_zero());
        assert_eq!(b.format(&x1), "X^(1)*(1)");
    }
}
