//! Small exact linear algebra over `BigInt` / `BigRational`.
//!
//! Everything here runs on matrices of side <= 8 or so (facet counts of
//! low-dimensional polytopes), so the algorithms are the plain textbook
//! ones with no pivot-size control.

use crate::rat::Rat;
use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

pub fn det_int(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    match n {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = BigInt::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * det_int(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

/// Solves `a x = b` exactly; `None` when `a` is singular.
pub fn solve_rat(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..=n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    Some((0..n).map(|r| &m[r][n] / &m[r][r]).collect())
}

pub fn rank_rat(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let nrows = m.len();
    let ncols = if nrows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let p = m[rank][col].clone();
        for r in 0..nrows {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..ncols {
                let t = &f * &m[rank][c];
                m[r][c] -= t;
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Basis of `{x : rows * x = 0}` over the rationals.
pub fn null_space_rat(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let p = m[rank][col].clone();
        for c in col..ncols {
            m[rank][c] = &m[rank][c] / &p;
        }
        for r in 0..nrows {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..ncols {
                let t = &f * &m[rank][c];
                m[r][c] -= t;
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (col, piv) in pivot_of_col.iter().enumerate() {
            if let Some(r) = piv {
                v[col] = -m[*r][free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Clears denominators and divides by the content, giving a primitive
/// integer vector parallel to `v`. `v` must be nonzero.
pub fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    let mut scale = BigInt::one();
    for x in v {
        scale = scale.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&scale / x.denom()))
        .collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    assert!(!g.is_zero(), "primitive_integer of zero vector");
    ints.iter().map(|x| x / &g).collect()
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    g.is_one()
}

/// Basis of the integer kernel `{x in Z^ncols : rows * x = 0}`, via
/// unimodular column reduction. The result spans a saturated sublattice.
pub fn integer_kernel(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..ncols)
        .map(|i| {
            (0..ncols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    // u is stored column-major: u[j] is the j-th column.
    let col_op = |a: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in a.iter_mut() {
            let t = q * &row[src];
            row[dst] -= t;
        }
        for k in 0..ncols {
            let t = q * &u[src][k];
            u[dst][k] -= t;
        }
    };
    let mut npiv = 0;
    for r in 0..a.len() {
        loop {
            let nz: Vec<usize> = (npiv..ncols).filter(|&j| !a[r][j].is_zero()).collect();
            match nz.len() {
                0 => break,
                1 => {
                    let j = nz[0];
                    for row in a.iter_mut() {
                        row.swap(j, npiv);
                    }
                    u.swap(j, npiv);
                    npiv += 1;
                    break;
                }
                _ => {
                    let &jmin = nz
                        .iter()
                        .min_by_key(|&&j| a[r][j].abs())
                        .expect("nonempty");
                    for &j in &nz {
                        if j == jmin {
                            continue;
                        }
                        let q = a[r][j].div_floor(&a[r][jmin]);
                        if !q.is_zero() {
                            col_op(&mut a, &mut u, j, jmin, &q);
                        }
                    }
                }
            }
        }
        if npiv == ncols {
            break;
        }
    }
    (npiv..ncols).map(|j| u[j].clone()).collect()
}

/// Canonical row Hermite normal form of the lattice spanned by `rows`:
/// positive pivots, entries above each pivot reduced into `[0, pivot)`.
/// Zero rows are dropped, so equal lattices give equal outputs.
pub fn hnf_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = m.len();
    let ncols = if nrows == 0 { 0 } else { m[0].len() };
    let mut pr = 0;
    for c in 0..ncols {
        loop {
            let nz: Vec<usize> = (pr..nrows).filter(|&r| !m[r][c].is_zero()).collect();
            match nz.len() {
                0 => break,
                1 => {
                    m.swap(pr, nz[0]);
                    break;
                }
                _ => {
                    let &rmin = nz
                        .iter()
                        .min_by_key(|&&r| m[r][c].abs())
                        .expect("nonempty");
                    for &r in &nz {
                        if r == rmin {
                            continue;
                        }
                        let q = m[r][c].div_floor(&m[rmin][c]);
                        if !q.is_zero() {
                            for k in 0..ncols {
                                let t = &q * &m[rmin][k];
                                m[r][k] -= t;
                            }
                        }
                    }
                }
            }
        }
        if pr < nrows && !m[pr][c].is_zero() {
            if m[pr][c].is_negative() {
                for k in 0..ncols {
                    m[pr][k] = -m[pr][k].clone();
                }
            }
            for r in 0..pr {
                let q = m[r][c].div_floor(&m[pr][c]);
                if !q.is_zero() {
                    for k in 0..ncols {
                        let t = &q * &m[pr][k];
                        m[r][k] -= t;
                    }
                }
            }
            pr += 1;
        }
    }
    m.truncate(pr);
    m
}
