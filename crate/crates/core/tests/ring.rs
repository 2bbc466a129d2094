use dglift::ring::{
    inconsistency_witness, inverse, rank, smith_normal_form, solve_linear_system, BaseRing,
    RMatrix, Scalar,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn zm(m: u64, v: &[i64]) -> Vec<Scalar> {
    let r = BaseRing::ZMod(m);
    v.iter().map(|&x| r.from_i64(x)).collect()
}

fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn int_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Determinant by cofactor expansion; only used on tiny matrices.
fn int_det(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        let minor: Vec<Vec<BigInt>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = &a[0][j] * int_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// All vectors in `(Z/m)^n`.
fn all_vectors(m: u64, n: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..m as i64).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn zmod4_two_times_x() {
    let r = BaseRing::ZMod(4);
    let a = RMatrix::from_i64_rows(r, &[&[2]]);
    let x = solve_linear_system(&a, &zm(4, &[2])).unwrap().unwrap();
    assert_eq!(a.mul_vec(&x).unwrap(), zm(4, &[2]));
    assert_eq!(solve_linear_system(&a, &zm(4, &[1])).unwrap(), None);
    let y = inconsistency_witness(&a, &zm(4, &[1])).unwrap().unwrap();
    assert!((&y[0] * &r.from_i64(2)).is_zero());
    assert!(!(&y[0] * &r.one()).is_zero());
}

#[test]
fn identity_system() {
    for ring in [BaseRing::Rationals, BaseRing::ZMod(6)] {
        let a = RMatrix::identity(ring, 3);
        let b: Vec<Scalar> = [1, -2, 5].iter().map(|&v| ring.from_i64(v)).collect();
        assert_eq!(solve_linear_system(&a, &b).unwrap(), Some(b));
    }
}

#[test]
fn rational_inconsistency() {
    let r = BaseRing::Rationals;
    let a = RMatrix::from_i64_rows(r, &[&[1, 2], &[2, 4]]);
    let b = vec![r.from_i64(1), r.from_i64(3)];
    assert_eq!(solve_linear_system(&a, &b).unwrap(), None);
    let y = inconsistency_witness(&a, &b).unwrap().unwrap();
    assert!(a
        .transpose()
        .mul_vec(&y)
        .unwrap()
        .iter()
        .all(Scalar::is_zero));
    let yb = y
        .iter()
        .zip(&b)
        .fold(r.zero(), |acc, (p, q)| &acc + &(p * q));
    assert!(!yb.is_zero());
    assert_eq!(rank(&a), 1);
}

#[test]
fn smith_form_of_small_matrix() {
    let a = big(&[&[2, 4], &[6, 8]]);
    let s = smith_normal_form(&a);
    assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    assert_eq!(int_mul(&int_mul(&s.u, &a), &s.v), s.d);
    // d_1 is the gcd of the entries; d_1 d_2 is |det a|.
    assert_eq!(int_det(&a).abs(), BigInt::from(8));
}

#[test]
fn zmod_inverse_needs_unit_determinant() {
    let r = BaseRing::ZMod(4);
    assert_eq!(
        inverse(&RMatrix::from_i64_rows(r, &[&[2, 1], &[1, 1]]))
            .unwrap()
            .map(|m| m.rows()),
        Some(2)
    );
    assert_eq!(
        inverse(&RMatrix::from_i64_rows(r, &[&[2, 0], &[0, 1]])).unwrap(),
        None
    );
}

fn small_matrix(max: usize) -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1..=max, 1..=max)
        .prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-9i64..=9, r * c)))
}

proptest! {
    #[test]
    fn smith_form_is_certified((r, c, e) in small_matrix(4)) {
        let a: Vec<Vec<BigInt>> = e.chunks(c).map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let s = smith_normal_form(&a);
        prop_assert_eq!(int_mul(&int_mul(&s.u, &a), &s.v), s.d.clone());
        prop_assert_eq!(int_det(&s.u).abs(), BigInt::from(1));
        prop_assert_eq!(int_det(&s.v).abs(), BigInt::from(1));
        let diag = s.diagonal();
        for i in 0..r.min(c) {
            for j in 0..r.min(c) {
                if i != j {
                    prop_assert!(s.d[i][j].is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        prop_assert_eq!(s.rank, diag.iter().filter(|d| !d.is_zero()).count());
        if r == c {
            let prod = diag.iter().fold(BigInt::from(1), |acc, d| acc * d);
            prop_assert_eq!(prod, int_det(&a).abs());
        }
    }

    /// Solvability over `Z/m` agrees with brute-force enumeration, and a
    /// witness exists exactly when the system is unsolvable.
    #[test]
    fn zmod_solver_matches_enumeration(
        m in prop::sample::select(vec![2u64, 4, 6, 8, 9]),
        (r, c, e) in small_matrix(3),
        b in prop::collection::vec(0i64..9, 3),
    ) {
        let ring = BaseRing::ZMod(m);
        let rows: Vec<&[i64]> = e.chunks(c).collect();
        let a = RMatrix::from_i64_rows(ring, &rows);
        let b = zm(m, &b[..r]);
        let solvable = all_vectors(m, c).iter().any(|x| a.mul_vec(&zm(m, x)).unwrap() == b);
        let sol = solve_linear_system(&a, &b).unwrap();
        prop_assert_eq!(sol.is_some(), solvable);
        if let Some(x) = sol {
            prop_assert_eq!(a.mul_vec(&x).unwrap(), b.clone());
        }
        let w = inconsistency_witness(&a, &b).unwrap();
        prop_assert_eq!(w.is_some(), !solvable);
        if let Some(y) = w {
            prop_assert!(a.transpose().mul_vec(&y).unwrap().iter().all(Scalar::is_zero));
            let yb = y.iter().zip(&b).fold(ring.zero(), |acc, (p, q)| &acc + &(p * q));
            prop_assert!(!yb.is_zero());
        }
    }

    /// `a x = b` over `Z/m` is solvable iff `[a | m I] z = b` is solvable over the
    /// integers, which the integer Smith form decides.
    #[test]
    fn zmod_solver_matches_integer_lift(
        m in prop::sample::select(vec![4u64, 12, 25, 27]),
        (r, c, e) in small_matrix(4),
        b in prop::collection::vec(0i64..27, 4),
    ) {
        let ring = BaseRing::ZMod(m);
        let rows: Vec<&[i64]> = e.chunks(c).collect();
        let a = RMatrix::from_i64_rows(ring, &rows);
        let bz = zm(m, &b[..r]);
        let lifted: Vec<Vec<BigInt>> = (0..r)
            .map(|i| {
                let mut row: Vec<BigInt> = e[i * c..(i + 1) * c].iter().map(|&x| BigInt::from(x)).collect();
                row.extend((0..r).map(|k| BigInt::from(if k == i { m as i64 } else { 0 })));
                row
            })
            .collect();
        let s = smith_normal_form(&lifted);
        let ub: Vec<BigInt> = s.u.iter()
            .map(|row| row.iter().zip(&b[..r]).fold(BigInt::zero(), |acc, (p, &q)| acc + p * BigInt::from(q)))
            .collect();
        let diag = s.diagonal();
        let int_solvable = ub.iter().enumerate().all(|(i, v)| {
            let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if d.is_zero() { v.is_zero() } else { v.is_multiple_of(&d) }
        });
        prop_assert_eq!(solve_linear_system(&a, &bz).unwrap().is_some(), int_solvable);
    }

    #[test]
    fn inverse_is_two_sided(m in prop::sample::select(vec![0u64, 4, 7, 12]), e in prop::collection::vec(-5i64..=5, 9)) {
        let ring = if m == 0 { BaseRing::Rationals } else { BaseRing::ZMod(m) };
        let a = RMatrix::from_i64_rows(ring, &[&e[0..3], &e[3..6], &e[6..9]]);
        let det = int_det(&big(&[&e[0..3], &e[3..6], &e[6..9]]));
        let invertible = if m == 0 { !det.is_zero() } else { det.mod_floor(&BigInt::from(m)).gcd(&BigInt::from(m)) == BigInt::from(1) };
        match inverse(&a).unwrap() {
            Some(b) => {
                prop_assert!(invertible);
                prop_assert_eq!(a.mul(&b).unwrap(), RMatrix::identity(ring, 3));
                prop_assert_eq!(b.mul(&a).unwrap(), RMatrix::identity(ring, 3));
            }
            None => prop_assert!(!invertible),
        }
    }
}
