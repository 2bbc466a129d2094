//! Smith normal form over principal ideal rings (the integers and `Z/m`).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{gcd_u64, inv_mod};

/// Bezout data for a pair `(a, b)` with `g = gcd(a, b)`: `s*a + t*b = g`,
/// `a = g*a_div`, `b = g*b_div` and `s*a_div + t*b_div = 1`, so
/// `[[s, t], [-b_div, a_div]]` is unimodular.
pub(crate) struct Bezout<E> {
    pub s: E,
    pub t: E,
    pub a_div: E,
    pub b_div: E,
}

/// The operations the diagonalization needs from a principal ideal ring.
pub(crate) trait Pir {
    type E: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Called with `a != 0`.
    fn xgcd(&self, a: &Self::E, b: &Self::E) -> Bezout<Self::E>;
    /// Some `q` with `q*b = a`.
    fn divide(&self, a: &Self::E, b: &Self::E) -> Option<Self::E>;
    /// Smaller keys make better pivots.
    fn pivot_key(&self, a: &Self::E) -> BigInt;
    /// A unit `u` (and its inverse) such that `u*a` is the canonical associate of `a`.
    fn normalizer(&self, a: &Self::E) -> (Self::E, Self::E);
}

pub(crate) struct IntegerRing;

impl Pir for IntegerRing {
    type E = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn xgcd(&self, a: &BigInt, b: &BigInt) -> Bezout<BigInt> {
        let e = a.extended_gcd(b);
        Bezout {
            a_div: a / &e.gcd,
            b_div: b / &e.gcd,
            s: e.x,
            t: e.y,
        }
    }
    fn divide(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        if b.is_zero() {
            return a.is_zero().then(BigInt::zero);
        }
        let (q, r) = a.div_rem(b);
        r.is_zero().then_some(q)
    }
    fn pivot_key(&self, a: &BigInt) -> BigInt {
        a.abs()
    }
    fn normalizer(&self, a: &BigInt) -> (BigInt, BigInt) {
        if a.is_negative() {
            (-BigInt::one(), -BigInt::one())
        } else {
            (BigInt::one(), BigInt::one())
        }
    }
}

/// `Z/m` with residues stored as `u64` in `[0, m)`.
pub(crate) struct ZModRing(pub u64);

impl ZModRing {
    fn reduce(&self, v: i128) -> u64 {
        v.rem_euclid(self.0 as i128) as u64
    }
}

impl Pir for ZModRing {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.0 as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn xgcd(&self, a: &u64, b: &u64) -> Bezout<u64> {
        // Bezout over the integers on representatives; the identities survive reduction.
        let e = (*a as i128).extended_gcd(&(*b as i128));
        Bezout {
            s: self.reduce(e.x),
            t: self.reduce(e.y),
            a_div: self.reduce(*a as i128 / e.gcd),
            b_div: self.reduce(*b as i128 / e.gcd),
        }
    }
    fn divide(&self, a: &u64, b: &u64) -> Option<u64> {
        let m = self.0;
        let g = gcd_u64(*b, m);
        if a % g != 0 {
            return None;
        }
        let m2 = m / g;
        let inv = inv_mod((b / g) % m2, m2)?;
        Some(((a / g) as u128 * inv as u128 % m2 as u128) as u64)
    }
    fn pivot_key(&self, a: &u64) -> BigInt {
        BigInt::from(gcd_u64(*a, self.0)) * BigInt::from(self.0) + BigInt::from(*a)
    }
    fn normalizer(&self, a: &u64) -> (u64, u64) {
        let m = self.0;
        if *a == 0 {
            return (self.one(), self.one());
        }
        let g = gcd_u64(*a, m);
        let m2 = m / g;
        let base = inv_mod((a / g) % m2, m2).unwrap_or(0);
        let mut u = base % m;
        while gcd_u64(u, m) != 1 {
            u = (u + m2) % m;
        }
        (u, inv_mod(u, m).expect("unit"))
    }
}

/// `u * a * v = d` with `d` diagonal; `v_inv` is the inverse of `v`.
#[derive(Clone, Debug)]
pub(crate) struct Diagonalization<E> {
    pub u: Vec<Vec<E>>,
    pub d: Vec<Vec<E>>,
    pub v: Vec<Vec<E>>,
    pub v_inv: Vec<Vec<E>>,
    pub rank: usize,
}

fn identity<P: Pir>(ring: &P, n: usize) -> Vec<Vec<P::E>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { ring.one() } else { ring.zero() })
                .collect()
        })
        .collect()
}

/// rows (k, i) <- [[s, t], [x, y]] * rows (k, i)
fn row_combine<P: Pir>(ring: &P, m: &mut [Vec<P::E>], k: usize, i: usize, c: [&P::E; 4]) {
    for col in 0..m[k].len() {
        let (a, b) = (m[k][col].clone(), m[i][col].clone());
        m[k][col] = ring.add(&ring.mul(c[0], &a), &ring.mul(c[1], &b));
        m[i][col] = ring.add(&ring.mul(c[2], &a), &ring.mul(c[3], &b));
    }
}

/// cols (k, j) <- cols (k, j) * [[s, x], [t, y]]: new_k = s*k + t*j, new_j = x*k + y*j
fn col_combine<P: Pir>(ring: &P, m: &mut [Vec<P::E>], k: usize, j: usize, c: [&P::E; 4]) {
    for row in m.iter_mut() {
        let (a, b) = (row[k].clone(), row[j].clone());
        row[k] = ring.add(&ring.mul(c[0], &a), &ring.mul(c[1], &b));
        row[j] = ring.add(&ring.mul(c[2], &a), &ring.mul(c[3], &b));
    }
}

pub(crate) fn diagonalize<P: Pir>(
    ring: &P,
    a: Vec<Vec<P::E>>,
    cols: usize,
) -> Diagonalization<P::E> {
    let rows = a.len();
    let mut d = a;
    let mut u = identity(ring, rows);
    let mut v = identity(ring, cols);
    let mut v_inv = identity(ring, cols);
    let one = ring.one();
    let zero = ring.zero();

    let mut k = 0;
    while k < rows.min(cols) {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for (i, row) in d.iter().enumerate().skip(k) {
            for (j, e) in row.iter().enumerate().skip(k) {
                if ring.is_zero(e) {
                    continue;
                }
                let key = ring.pivot_key(e);
                if best.as_ref().is_none_or(|(b, _, _)| key < *b) {
                    best = Some((key, i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        d.swap(k, pi);
        u.swap(k, pi);
        for row in d.iter_mut().chain(v.iter_mut()) {
            row.swap(k, pj);
        }
        v_inv.swap(k, pj);

        loop {
            for i in k + 1..rows {
                if ring.is_zero(&d[i][k]) {
                    continue;
                }
                if let Some(q) = ring.divide(&d[i][k], &d[k][k]) {
                    let nq = ring.neg(&q);
                    row_combine(ring, &mut d, k, i, [&one, &zero, &nq, &one]);
                    row_combine(ring, &mut u, k, i, [&one, &zero, &nq, &one]);
                } else {
                    let bz = ring.xgcd(&d[k][k], &d[i][k]);
                    let nb = ring.neg(&bz.b_div);
                    let c = [&bz.s, &bz.t, &nb, &bz.a_div];
                    row_combine(ring, &mut d, k, i, c);
                    row_combine(ring, &mut u, k, i, c);
                }
            }
            for j in k + 1..cols {
                if ring.is_zero(&d[k][j]) {
                    continue;
                }
                if let Some(q) = ring.divide(&d[k][j], &d[k][k]) {
                    let nq = ring.neg(&q);
                    col_combine(ring, &mut d, k, j, [&one, &zero, &nq, &one]);
                    col_combine(ring, &mut v, k, j, [&one, &zero, &nq, &one]);
                    row_combine(ring, &mut v_inv, k, j, [&one, &q, &zero, &one]);
                } else {
                    let bz = ring.xgcd(&d[k][k], &d[k][j]);
                    let nb = ring.neg(&bz.b_div);
                    let nt = ring.neg(&bz.t);
                    col_combine(ring, &mut d, k, j, [&bz.s, &bz.t, &nb, &bz.a_div]);
                    col_combine(ring, &mut v, k, j, [&bz.s, &bz.t, &nb, &bz.a_div]);
                    row_combine(ring, &mut v_inv, k, j, [&bz.a_div, &bz.b_div, &nt, &bz.s]);
                }
            }
            let col_clear = (k + 1..rows).all(|i| ring.is_zero(&d[i][k]));
            let row_clear = (k + 1..cols).all(|j| ring.is_zero(&d[k][j]));
            if !(col_clear && row_clear) {
                continue;
            }
            let offender = (k + 1..rows)
                .find(|&i| (k + 1..cols).any(|j| ring.divide(&d[i][j], &d[k][k]).is_none()));
            match offender {
                Some(i) => {
                    row_combine(ring, &mut d, k, i, [&one, &one, &zero, &one]);
                    row_combine(ring, &mut u, k, i, [&one, &one, &zero, &one]);
                }
                None => break,
            }
        }
        let (unit, _) = ring.normalizer(&d[k][k]);
        if unit != one {
            for m in [&mut d, &mut u] {
                for e in m[k].iter_mut() {
                    *e = ring.mul(&unit, e);
                }
            }
        }
        k += 1;
    }
    Diagonalization {
        u,
        d,
        v,
        v_inv,
        rank: k,
    }
}

/// Smith normal form of an integer matrix: `u * a * v = d`, `d` diagonal with
/// non-negative entries `d_1 | d_2 | ...`, `u` and `v` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: Vec<Vec<BigInt>>,
    pub d: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub rank: usize,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.len().min(self.d.first().map_or(0, Vec::len)))
            .map(|i| self.d[i][i].clone())
            .collect()
    }
}

pub fn smith_normal_form(a: &[Vec<BigInt>]) -> SmithForm {
    let cols = a.first().map_or(0, Vec::len);
    let dg = diagonalize(&IntegerRing, a.to_vec(), cols);
    SmithForm {
        u: dg.u,
        d: dg.d,
        v: dg.v,
        rank: dg.rank,
    }
}
