//! Exact arithmetic over the base ring `R`, which is either the rationals or a
//! residue ring `Z/m`, together with dense matrices and linear solving.

mod linsolve;
mod snf;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use linsolve::{inconsistency_witness, inverse, rank, solve_linear_system};
pub(crate) use snf::{diagonalize, Diagonalization, Pir, ZModRing};
pub use snf::{smith_normal_form, SmithForm};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("operands live over different base rings ({0} and {1})")]
    MixedRings(BaseRing, BaseRing),
    #[error("denominator {0} is not invertible in {1}")]
    NotInvertible(String, BaseRing),
}

/// The commutative base ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseRing {
    Rationals,
    ZMod(u64),
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Rationals => write!(f, "Q"),
            BaseRing::ZMod(m) => write!(f, "Z/{m}"),
        }
    }
}

impl BaseRing {
    pub fn zmod(modulus: u64) -> Result<Self, RingError> {
        if modulus < 2 {
            return Err(RingError::BadModulus(modulus));
        }
        Ok(BaseRing::ZMod(modulus))
    }

    pub fn is_field(&self) -> bool {
        match self {
            BaseRing::Rationals => true,
            BaseRing::ZMod(m) => is_prime(*m),
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match *self {
            BaseRing::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            BaseRing::ZMod(m) => Scalar::Residue {
                value: v.rem_euclid(m as i64) as u64,
                modulus: m,
            },
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match *self {
            BaseRing::Rationals => Scalar::Rational(BigRational::from_integer(v.clone())),
            BaseRing::ZMod(m) => {
                let r = v.mod_floor(&BigInt::from(m));
                Scalar::Residue {
                    value: r.to_u64().expect("residue fits"),
                    modulus: m,
                }
            }
        }
    }

    /// `num / den`, or an error when `den` is not a unit.
    pub fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Result<Scalar, RingError> {
        if den.is_zero() {
            return Err(RingError::NotInvertible(den.to_string(), *self));
        }
        match self {
            BaseRing::Rationals => Ok(Scalar::Rational(BigRational::new(num.clone(), den.clone()))),
            BaseRing::ZMod(_) => {
                let d = self.from_bigint(den);
                let inv = d
                    .inverse()
                    .ok_or_else(|| RingError::NotInvertible(den.to_string(), *self))?;
                Ok(&self.from_bigint(num) * &inv)
            }
        }
    }

    /// The binomial coefficient `C(n, k)` computed over the integers and mapped into `R`.
    pub fn binomial(&self, n: usize, k: usize) -> Scalar {
        self.from_bigint(&binomial(n, k))
    }

    /// `(-1)^e`.
    pub fn sign(&self, e: i64) -> Scalar {
        if e.rem_euclid(2) == 0 {
            self.one()
        } else {
            self.from_i64(-1)
        }
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `m` when `gcd(a, m) = 1`.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// An element of the base ring. Residues carry their modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn ring(&self) -> BaseRing {
        match self {
            Scalar::Rational(_) => BaseRing::Rationals,
            Scalar::Residue { modulus, .. } => BaseRing::ZMod(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Residue { value, modulus } => *value == 1 % *modulus,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.inverse().is_some()
    }

    pub fn inverse(&self) -> Option<Scalar> {
        match self {
            Scalar::Rational(q) if q.is_zero() => None,
            Scalar::Rational(q) => Some(Scalar::Rational(q.recip())),
            Scalar::Residue { value, modulus } => {
                inv_mod(*value, *modulus).map(|v| Scalar::Residue {
                    value: v,
                    modulus: *modulus,
                })
            }
        }
    }

    /// The residue representative in `[0, m)`; panics for rationals.
    pub fn residue(&self) -> u64 {
        match self {
            Scalar::Residue { value, .. } => *value,
            Scalar::Rational(_) => panic!("residue() called on a rational scalar"),
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_negative())
    }

    fn check_same(&self, other: &Scalar) {
        let (a, b) = (self.ring(), other.ring());
        assert_eq!(a, b, "{}", RingError::MixedRings(a, b));
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: ((*a as u128 + *b as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: ((*a as u128 * *b as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (*modulus - *value) % *modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

/// A dense row-major matrix over the base ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RMatrix {
    ring: BaseRing,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl RMatrix {
    pub fn zeros(ring: BaseRing, rows: usize, cols: usize) -> Self {
        RMatrix {
            ring,
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: BaseRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: BaseRing, rows: Vec<Vec<Scalar>>) -> Result<Self, RingError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(RingError::Shape("ragged rows".into()));
            }
            for s in row {
                if s.ring() != ring {
                    return Err(RingError::MixedRings(ring, s.ring()));
                }
                data.push(s);
            }
        }
        Ok(RMatrix {
            ring,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_i64_rows(ring: BaseRing, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| ring.from_i64(v)).collect())
            .collect();
        Self::from_rows(ring, rows).expect("rectangular input")
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert_eq!(v.ring(), self.ring);
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Scalar) {
        let idx = i * self.cols + j;
        self.data[idx] = &self.data[idx] + v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> RMatrix {
        let mut t = RMatrix::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RMatrix) -> Result<RMatrix, RingError> {
        if self.cols != other.rows {
            return Err(RingError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.ring != other.ring {
            return Err(RingError::MixedRings(self.ring, other.ring));
        }
        let mut out = RMatrix::zeros(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.add_at(i, j, &(a * b));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, RingError> {
        if v.len() != self.cols {
            return Err(RingError::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let mut out = vec![self.ring.zero(); self.rows];
        for (k, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = self.get(i, k);
                if !a.is_zero() {
                    *o = &*o + &(a * x);
                }
            }
        }
        Ok(out)
    }

    fn zip_with(
        &self,
        other: &RMatrix,
        f: impl Fn(&Scalar, &Scalar) -> Scalar,
    ) -> Result<RMatrix, RingError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(RingError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(RMatrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &RMatrix) -> Result<RMatrix, RingError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RMatrix) -> Result<RMatrix, RingError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> RMatrix {
        RMatrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> RMatrix {
        self.scale(&self.ring.from_i64(-1))
    }

    /// The submatrix with the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RMatrix {
        let mut out = RMatrix::zeros(self.ring, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|s| s.to_string()).collect())
            .collect()
    }
}
