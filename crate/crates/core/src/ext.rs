//! Coordinates on the Hom complex `E = Hom_B(N, N)`, its homology
//! `Ext^i_B(N, N) = H_{-i}(E)`, and homology of `N` in a finite range of degrees.

use std::fmt;

use crate::dga::Monomial;
use crate::expansion::{Expansion, ExpansionError, FreeBModule, Kind, SemiFreeDGModule};
use crate::gmod::AMap;
use crate::ring::{
    diagonalize, gcd_u64, rank, solve_linear_system, BaseRing, Pir, RMatrix, Scalar, ZModRing,
};

/// One free `R`-coordinate of a degree `r` expansion: the coefficient of the
/// monomial `mu` in entry `(row, col)` of `f_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub index: usize,
    pub row: usize,
    pub col: usize,
    pub monomial: Monomial,
}

/// The `R`-basis of `E_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomComplexPiece {
    pub degree: i64,
    pub slots: Vec<Slot>,
}

impl HomComplexPiece {
    pub fn dim(&self) -> usize {
        self.slots.len()
    }
}

pub fn hom_complex_basis(space: &FreeBModule, r: i64) -> HomComplexPiece {
    let m = space.module();
    let alg = m.algebra();
    let mut slots = Vec::new();
    for index in 0..space.coefficient_count(r) {
        let s = r - index as i64 * space.x_degree();
        for row in 0..m.rank() {
            for col in 0..m.rank() {
                for monomial in alg.monomials_of_degree(m.degree(col) + s - m.degree(row)) {
                    slots.push(Slot {
                        index,
                        row,
                        col,
                        monomial,
                    });
                }
            }
        }
    }
    HomComplexPiece { degree: r, slots }
}

/// Coordinates of a `B`-linear expansion in the slot basis of its degree.
pub fn coordinates(space: &FreeBModule, piece: &HomComplexPiece, f: &Expansion) -> Vec<Scalar> {
    let m = space.module();
    let ring = space.ring();
    piece
        .slots
        .iter()
        .map(|s| match f.coeffs().get(s.index) {
            Some(c) => c
                .get(m.r_index(s.row, s.monomial), m.r_index(s.col, 0))
                .clone(),
            None => ring.zero(),
        })
        .collect()
}

/// The `B`-linear expansion with the given slot coordinates.
pub fn from_coordinates(
    space: &FreeBModule,
    piece: &HomComplexPiece,
    v: &[Scalar],
) -> Result<Expansion, ExpansionError> {
    let m = space.module();
    let count = space.coefficient_count(piece.degree);
    let mut maps: Vec<AMap> = (0..count)
        .map(|i| {
            AMap::zero(
                m.rank(),
                m.rank(),
                piece.degree - i as i64 * space.x_degree(),
            )
        })
        .collect();
    for (s, c) in piece.slots.iter().zip(v) {
        maps[s.index].entries[s.row][s.col].add_term(s.monomial, c);
    }
    space.linear(piece.degree, &maps)
}

fn slot_expansion(
    space: &FreeBModule,
    piece: &HomComplexPiece,
    k: usize,
) -> Result<Expansion, ExpansionError> {
    let ring = space.ring();
    let mut v = vec![ring.zero(); piece.dim()];
    v[k] = ring.one();
    from_coordinates(space, piece, &v)
}

/// Matrix of `f -> target o f - (-1)^r f o source` from `E_r` to `E_{r-1}`.
pub fn hom_differential_matrix(
    space: &FreeBModule,
    source: &Expansion,
    target: &Expansion,
    r: i64,
) -> Result<RMatrix, ExpansionError> {
    let from = hom_complex_basis(space, r);
    let to = hom_complex_basis(space, r - 1);
    let mut out = RMatrix::zeros(space.ring(), to.dim(), from.dim());
    for k in 0..from.dim() {
        let f = slot_expansion(space, &from, k)?;
        let df = space.hom_diff_between(&f, source, target)?;
        for (row, c) in coordinates(space, &to, &df).into_iter().enumerate() {
            out.set(row, k, c);
        }
    }
    Ok(out)
}

/// A finitely generated `R`-module: a vector space dimension over `Q`, or the
/// invariant factors `d_1 | d_2 | ...` (all `> 1`) of a `Z/m`-module.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HomologyGroup {
    Vector { dim: usize },
    Modular { modulus: u64, factors: Vec<u64> },
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        match self {
            HomologyGroup::Vector { dim } => *dim == 0,
            HomologyGroup::Modular { factors, .. } => factors.is_empty(),
        }
    }

    /// Number of elements of a `Z/m`-module.
    pub fn order(&self) -> Option<u128> {
        match self {
            HomologyGroup::Vector { .. } => None,
            HomologyGroup::Modular { factors, .. } => {
                Some(factors.iter().map(|&d| d as u128).product())
            }
        }
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        match self {
            HomologyGroup::Vector { dim } => write!(f, "Q^{dim}"),
            HomologyGroup::Modular { factors, .. } => {
                let parts: Vec<String> = factors.iter().map(|d| format!("Z/{d}")).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

fn prime_power_parts(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant factors of `Z/o_1 + Z/o_2 + ...`, smallest first.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let mut by_prime: std::collections::BTreeMap<u64, Vec<u32>> = Default::default();
    for &o in orders {
        for (p, e) in prime_power_parts(o) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for (p, mut exps) in by_prime {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        for (slot, e) in out.iter_mut().zip(exps) {
            *slot *= p.pow(e);
        }
    }
    out.reverse();
    out
}

fn residues(a: &RMatrix) -> Vec<Vec<u64>> {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(Scalar::residue).collect())
        .collect()
}

/// Homology `ker(out) / im(inn)` at a spot of dimension `n`, where `out` has `n`
/// columns and `inn` has `n` rows.
pub fn homology(ring: BaseRing, out: &RMatrix, inn: &RMatrix, n: usize) -> HomologyGroup {
    match ring {
        BaseRing::Rationals => HomologyGroup::Vector {
            dim: n - rank(out) - rank(inn),
        },
        BaseRing::ZMod(m) => {
            let zr = ZModRing(m);
            let dg = diagonalize(&zr, residues(out), n);
            // ker(out) = V (sum_c Z/o_c), generated by (m / o_c) V e_c.
            let orders: Vec<u64> = (0..n)
                .map(|c| if c < dg.rank { dg.d[c][c] } else { m })
                .collect();
            let kept: Vec<usize> = (0..n).filter(|&c| orders[c] > 1).collect();
            let cols = inn.cols();
            let mut rel = vec![vec![0u64; cols + kept.len()]; kept.len()];
            for (r, &c) in kept.iter().enumerate() {
                let step = m / orders[c];
                for col in 0..cols {
                    let z = (0..n).fold(0u64, |acc, l| {
                        zr.add(&acc, &zr.mul(&dg.v_inv[c][l], &inn.get(l, col).residue()))
                    });
                    debug_assert_eq!(z % step, 0, "image lies in the kernel");
                    rel[r][col] = (z / step) % orders[c];
                }
                rel[r][cols + r] = orders[c] % m;
            }
            let pres = diagonalize(&zr, rel, cols + kept.len());
            let mut found: Vec<u64> = (0..kept.len())
                .map(|i| {
                    if i < pres.rank {
                        gcd_u64(pres.d[i][i], m)
                    } else {
                        m
                    }
                })
                .filter(|&d| d > 1)
                .collect();
            found.sort_unstable();
            HomologyGroup::Modular {
                modulus: m,
                factors: invariant_factors(&found),
            }
        }
    }
}

/// `Ext^i_B(N, N)` computed as `H_{-i}` of the Hom complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtGroup {
    pub index: i64,
    pub group: HomologyGroup,
    /// Rank over `R` of `E_{-i}`.
    pub chain_dim: usize,
}

pub fn ext_group(n: &SemiFreeDGModule, i: i64) -> Result<ExtGroup, ExpansionError> {
    let space = n.space();
    let d = n.diff();
    let r = -i;
    let dim = hom_complex_basis(space, r).dim();
    let out = hom_differential_matrix(space, d, d, r)?;
    let inn = hom_differential_matrix(space, d, d, r + 1)?;
    Ok(ExtGroup {
        index: i,
        group: homology(space.ring(), &out, &inn, dim),
        chain_dim: dim,
    })
}

/// For a cycle `z` of `E`, a `w` with `d(w) = z`, or `None` when `[z] != 0`.
pub fn bounding_chain(
    space: &FreeBModule,
    source: &Expansion,
    target: &Expansion,
    z: &Expansion,
) -> Result<Option<Expansion>, ExpansionError> {
    if z.kind() != Kind::Linear {
        return Err(ExpansionError::Kind {
            op: "bounding chain",
            kind: z.kind(),
        });
    }
    let r = z.degree();
    let piece = hom_complex_basis(space, r + 1);
    let target_piece = hom_complex_basis(space, r);
    let a = hom_differential_matrix(space, source, target, r + 1)?;
    let b = coordinates(space, &target_piece, z);
    match solve_linear_system(&a, &b).expect("matching shapes") {
        Some(x) => Ok(Some(from_coordinates(space, &piece, &x)?)),
        None => Ok(None),
    }
}

/// Whether the class of the cycle `z` vanishes in the homology of `E`.
pub fn class_vanishes(n: &SemiFreeDGModule, z: &Expansion) -> Result<bool, ExpansionError> {
    Ok(bounding_chain(n.space(), n.diff(), n.diff(), z)?.is_some())
}

/// `H_n(N)` for one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyEntry {
    pub degree: i64,
    pub group: HomologyGroup,
    /// Set for degrees within `|X|` of the requested bound.
    pub near_truncation: bool,
}

/// Basis of `N_n`: pairs `(i, idx)` for `X^(i) b_idx` with `i|X| + |b_idx| = n`.
fn n_basis(space: &FreeBModule, n: i64) -> Vec<(usize, usize)> {
    let m = space.module();
    let x = space.x_degree();
    let mut out = Vec::new();
    for idx in 0..m.r_dim() {
        let rest = n - m.r_degree(idx);
        if rest >= 0 && rest % x == 0 {
            out.push(((rest / x) as usize, idx));
        }
    }
    out.sort_unstable();
    out
}

/// Matrix of `d : N_n -> N_{n-1}`.
pub fn boundary_matrix(n: &SemiFreeDGModule, degree: i64) -> Result<RMatrix, ExpansionError> {
    let space = n.space();
    let ring = space.ring();
    let src = n_basis(space, degree);
    let tgt = n_basis(space, degree - 1);
    let mut out = RMatrix::zeros(ring, tgt.len(), src.len());
    for (col, &(i, idx)) in src.iter().enumerate() {
        let mut e = vec![ring.zero(); space.dim()];
        e[idx] = ring.one();
        for (k, v) in space.apply(n.diff(), i, &e)? {
            for (l, c) in v.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let row = tgt
                    .binary_search(&(k, l))
                    .expect("differential has degree -1");
                out.set(row, col, c);
            }
        }
    }
    Ok(out)
}

/// `H_n(N)` for `min(0, lowest degree) <= n <= up_to`. `N` is unbounded above, so
/// the degrees above `up_to - |X|` are flagged.
pub fn truncated_homology(
    n: &SemiFreeDGModule,
    up_to: i64,
) -> Result<Vec<HomologyEntry>, ExpansionError> {
    let space = n.space();
    let start = space.bounds().map_or(0, |(lo, _)| lo.min(0));
    let mut out = Vec::new();
    for deg in start..=up_to {
        let dim = n_basis(space, deg).len();
        let d_out = boundary_matrix(n, deg)?;
        let d_in = boundary_matrix(n, deg + 1)?;
        out.push(HomologyEntry {
            degree: deg,
            group: homology(space.ring(), &d_out, &d_in, dim),
            near_truncation: deg > up_to - space.x_degree(),
        });
    }
    Ok(out)
}
