//! Exact linear systems over `Q` (Gaussian elimination) and `Z/m` (diagonalization
//! over the residue ring).

use super::{diagonalize, BaseRing, Diagonalization, Pir, RMatrix, RingError, Scalar, ZModRing};

fn check_system(a: &RMatrix, b: &[Scalar]) -> Result<(), RingError> {
    if a.rows() != b.len() {
        return Err(RingError::Shape(format!(
            "{}x{} system with right-hand side of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    if let Some(s) = b.iter().find(|s| s.ring() != a.ring()) {
        return Err(RingError::MixedRings(a.ring(), s.ring()));
    }
    Ok(())
}

/// Reduced row echelon form of `[a | b]` over a field; returns the pivot columns.
fn rref(m: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inverse().expect("field element");
        for e in m[r].iter_mut() {
            *e = &*e * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (e, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *e = &*e - &(&f * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

fn to_residues(a: &RMatrix) -> Vec<Vec<u64>> {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(Scalar::residue).collect())
        .collect()
}

fn zmod_diag(a: &RMatrix, m: u64) -> Diagonalization<u64> {
    diagonalize(&ZModRing(m), to_residues(a), a.cols())
}

fn apply(ring: &ZModRing, u: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
    u.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(0, |acc, (x, y)| ring.add(&acc, &ring.mul(x, y)))
        })
        .collect()
}

/// Solves `a * x = b` exactly. Returns `None` when no solution exists over `R`.
/// The representative is deterministic: free parameters are set to zero.
pub fn solve_linear_system(a: &RMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, RingError> {
    check_system(a, b)?;
    let ring = a.ring();
    match ring {
        BaseRing::Rationals => {
            let n = a.cols();
            let mut m: Vec<Vec<Scalar>> = (0..a.rows())
                .map(|i| {
                    let mut row = a.row(i).to_vec();
                    row.push(b[i].clone());
                    row
                })
                .collect();
            let pivots = rref(&mut m, n);
            if pivots.len() < m.len() && m[pivots.len()..].iter().any(|row| !row[n].is_zero()) {
                return Ok(None);
            }
            let mut x = vec![ring.zero(); n];
            for (r, &c) in pivots.iter().enumerate() {
                x[c] = m[r][n].clone();
            }
            Ok(Some(x))
        }
        BaseRing::ZMod(modulus) => {
            let zr = ZModRing(modulus);
            let dg = zmod_diag(a, modulus);
            let c = apply(
                &zr,
                &dg.u,
                &b.iter().map(Scalar::residue).collect::<Vec<_>>(),
            );
            let mut z = vec![0u64; a.cols()];
            for (i, ci) in c.iter().enumerate() {
                if i < dg.rank {
                    match zr.divide(ci, &dg.d[i][i]) {
                        Some(q) => z[i] = q,
                        None => return Ok(None),
                    }
                } else if *ci != 0 {
                    return Ok(None);
                }
            }
            let x = apply(&zr, &dg.v, &z);
            Ok(Some(
                x.into_iter().map(|v| ring.from_i64(v as i64)).collect(),
            ))
        }
    }
}

/// A functional `y` with `y^T a = 0` and `y . b != 0`, certifying that `a x = b` has no
/// solution; `None` when the system is solvable.
pub fn inconsistency_witness(a: &RMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, RingError> {
    check_system(a, b)?;
    let ring = a.ring();
    match ring {
        BaseRing::Rationals => {
            // Over a field: y exists iff [a^T; b^T] y = e_last is solvable.
            let mut rows: Vec<Vec<Scalar>> = (0..a.cols()).map(|j| a.column(j)).collect();
            rows.push(b.to_vec());
            let stacked = RMatrix::from_rows(ring, rows)?;
            let stacked = if stacked.cols() == a.rows() {
                stacked
            } else {
                RMatrix::zeros(ring, a.cols() + 1, a.rows())
            };
            let mut rhs = vec![ring.zero(); a.cols() + 1];
            rhs[a.cols()] = ring.one();
            solve_linear_system(&stacked, &rhs)
        }
        BaseRing::ZMod(modulus) => {
            let zr = ZModRing(modulus);
            let dg = zmod_diag(a, modulus);
            let c = apply(
                &zr,
                &dg.u,
                &b.iter().map(Scalar::residue).collect::<Vec<_>>(),
            );
            for (i, ci) in c.iter().enumerate() {
                let scale = if i < dg.rank {
                    if zr.divide(ci, &dg.d[i][i]).is_some() {
                        continue;
                    }
                    modulus / super::gcd_u64(dg.d[i][i], modulus)
                } else if *ci != 0 {
                    1
                } else {
                    continue;
                };
                let y = dg.u[i]
                    .iter()
                    .map(|e| ring.from_i64(zr.mul(e, &(scale % modulus)) as i64))
                    .collect();
                return Ok(Some(y));
            }
            Ok(None)
        }
    }
}

/// Inverse of a square matrix, or `None` when it is not invertible over `R`.
pub fn inverse(a: &RMatrix) -> Result<Option<RMatrix>, RingError> {
    if a.rows() != a.cols() {
        return Err(RingError::Shape(format!(
            "{}x{} is not square",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let ring = a.ring();
    match ring {
        BaseRing::Rationals => {
            let mut m: Vec<Vec<Scalar>> = (0..n)
                .map(|i| {
                    let mut row = a.row(i).to_vec();
                    row.extend((0..n).map(|j| if i == j { ring.one() } else { ring.zero() }));
                    row
                })
                .collect();
            let pivots = rref(&mut m, n);
            if pivots.len() < n {
                return Ok(None);
            }
            let rows = m.into_iter().map(|row| row[n..].to_vec()).collect();
            Ok(Some(RMatrix::from_rows(ring, rows)?))
        }
        BaseRing::ZMod(modulus) => {
            let zr = ZModRing(modulus);
            let dg = zmod_diag(a, modulus);
            if dg.rank < n || (0..n).any(|i| dg.d[i][i] != zr.one()) {
                return Ok(None);
            }
            // u a v = 1  =>  a^{-1} = v u
            let mut out = RMatrix::zeros(ring, n, n);
            for i in 0..n {
                for j in 0..n {
                    let s =
                        (0..n).fold(0, |acc, k| zr.add(&acc, &zr.mul(&dg.v[i][k], &dg.u[k][j])));
                    out.set(i, j, ring.from_i64(s as i64));
                }
            }
            Ok(Some(out))
        }
    }
}

/// Rank over a field. Over a composite `Z/m` this is the number of nonzero
/// diagonal entries of the Smith form.
pub fn rank(a: &RMatrix) -> usize {
    match a.ring() {
        BaseRing::Rationals => {
            let mut m: Vec<Vec<Scalar>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
            rref(&mut m, a.cols()).len()
        }
        BaseRing::ZMod(modulus) => zmod_diag(a, modulus).rank,
    }
}
