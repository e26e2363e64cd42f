//! Exact dense linear algebra over arbitrary-precision rationals: Gaussian
//! elimination for solving, nullspace extraction for homogeneous fits, and
//! an integer-normalized row representation that makes long exact
//! matrix-power iterations affordable (one shared denominator per vector
//! instead of a gcd reduction per entry).

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratfun::Q;

/// Solve `A x = b` exactly. `A` is consumed as a row-major Vec of rows.
/// Returns `Err(SingularSystem)` when the matrix is singular.
pub fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Result<Vec<Q>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n));
    assert_eq!(b.len(), n);
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] -= t;
            }
            let t = &factor * &b[col];
            b[r] -= t;
        }
    }
    Ok((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// One nontrivial vector from the nullspace of a (possibly rectangular)
/// matrix, or `None` when the kernel is trivial. Free variables beyond the
/// first are set to zero; the first free variable is set to one.
pub fn nullspace_vector(mut a: Vec<Vec<Q>>) -> Option<Vec<Q>> {
    if a.is_empty() {
        return None;
    }
    let cols = a[0].len();
    let rows = a.len();
    let mut pivot_col_of_row = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for c in col..cols {
            a[row][c] = &a[row][c] * &inv;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..cols {
                    let t = &factor * &a[row][c];
                    a[r][c] -= t;
                }
            }
        }
        pivot_col_of_row.push(col);
        row += 1;
    }
    let pivot_cols: std::collections::BTreeSet<usize> = pivot_col_of_row.iter().copied().collect();
    let free_col = (0..cols).find(|c| !pivot_cols.contains(c))?;
    let mut x = vec![Q::zero(); cols];
    x[free_col] = Q::one();
    for (r, &pc) in pivot_col_of_row.iter().enumerate() {
        // pivot row r reads: x[pc] + a[r][free_col] * x[free_col] + ... = 0
        x[pc] = -a[r][free_col].clone();
    }
    Some(x)
}

/// A probability row vector with one shared denominator. Numerators are
/// plain big integers so repeated matrix application avoids per-entry gcd
/// normalization; values are exact throughout.
#[derive(Debug, Clone)]
pub struct SharedDenRow {
    pub nums: Vec<BigInt>,
    pub den: BigInt,
}

impl SharedDenRow {
    /// Point mass at `index` in a vector of length `len`.
    pub fn point_mass(len: usize, index: usize) -> Self {
        let mut nums = vec![BigInt::zero(); len];
        nums[index] = BigInt::one();
        SharedDenRow {
            nums,
            den: BigInt::one(),
        }
    }

    pub fn from_rationals(values: &[Q]) -> Self {
        let den = values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let nums = values
            .iter()
            .map(|v| v.numer() * (&den / v.denom()))
            .collect();
        SharedDenRow { nums, den }
    }

    pub fn entry(&self, i: usize) -> Q {
        Q::new(self.nums[i].clone(), self.den.clone())
    }

    pub fn to_rationals(&self) -> Vec<Q> {
        (0..self.nums.len()).map(|i| self.entry(i)).collect()
    }

    /// Exact total variation distance to `pi`, `(1/2) * sum |self - pi|`.
    pub fn tv_to(&self, pi: &SharedDenRow) -> Q {
        let mut acc = BigInt::zero();
        for (a, b) in self.nums.iter().zip(&pi.nums) {
            acc += (a * &pi.den - b * &self.den).abs();
        }
        Q::new(acc, BigInt::from(2) * &self.den * &pi.den)
    }

    /// Divide out the gcd of all numerators and the denominator. Applied
    /// periodically during long power iterations to keep integer sizes tied
    /// to the true denominator growth.
    pub fn normalize(&mut self) {
        let mut g = self.den.clone();
        for v in &self.nums {
            if g.is_one() {
                return;
            }
            g = g.gcd(v);
        }
        if !g.is_one() {
            for v in &mut self.nums {
                *v /= &g;
            }
            self.den /= &g;
        }
    }
}

/// A square stochastic matrix held sparsely as integer numerators over one
/// shared denominator, for fast exact right-multiplication of
/// `SharedDenRow`s. Zero entries are not stored, so one application costs
/// one big-integer multiply per transition edge.
#[derive(Debug, Clone)]
pub struct StepMatrix {
    rows: Vec<Vec<(usize, BigInt)>>,
    den: BigInt,
    dim: usize,
}

impl StepMatrix {
    /// Build from an iterator of sparse rows of exact rationals.
    pub fn from_sparse_rows<I, R>(dim: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = (usize, Q)>,
    {
        let collected: Vec<Vec<(usize, Q)>> = rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        assert_eq!(collected.len(), dim);
        let den = collected
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
        let rows = collected
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|(j, v)| {
                        let scaled = v.numer() * (&den / v.denom());
                        (j, scaled)
                    })
                    .collect()
            })
            .collect();
        StepMatrix { rows, den, dim }
    }

    pub fn from_dense_rows(rows: &[Vec<Q>]) -> Self {
        let dim = rows.len();
        StepMatrix::from_sparse_rows(
            dim,
            rows.iter()
                .map(|r| r.iter().cloned().enumerate().collect::<Vec<_>>()),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `row <- row * M`, exact.
    pub fn apply_row(&self, row: &SharedDenRow) -> SharedDenRow {
        assert_eq!(row.nums.len(), self.dim);
        let mut out = vec![BigInt::zero(); self.dim];
        for (i, coeff) in row.nums.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for (j, m) in &self.rows[i] {
                out[*j] += coeff * m;
            }
        }
        SharedDenRow {
            nums: out,
            den: &row.den * &self.den,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::{q_int, q_ratio};

    #[test]
    fn solve_small_system() {
        // 2x + y = 5, x - y = 1  ->  x = 2, y = 1
        let a = vec![vec![q_int(2), q_int(1)], vec![q_int(1), q_int(-1)]];
        let b = vec![q_int(5), q_int(1)];
        assert_eq!(solve(a, b).unwrap(), vec![q_int(2), q_int(1)]);
    }

    #[test]
    fn solve_detects_singular() {
        let a = vec![vec![q_int(1), q_int(2)], vec![q_int(2), q_int(4)]];
        let b = vec![q_int(1), q_int(2)];
        assert!(matches!(solve(a, b), Err(Error::SingularSystem)));
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        // x + y + z = 0, x + y + z = 0 -> kernel dim 2
        let a = vec![
            vec![q_int(1), q_int(1), q_int(1)],
            vec![q_int(1), q_int(1), q_int(1)],
        ];
        let v = nullspace_vector(a).unwrap();
        assert_eq!(&v[0] + &v[1] + &v[2], q_int(0));
        assert!(v.iter().any(|c| !c.is_zero()));
    }

    #[test]
    fn shared_den_row_power_matches_rational_arithmetic() {
        // two-state chain ((1/2, 1/2), (1/4, 3/4))
        let p = vec![
            vec![q_ratio(1, 2), q_ratio(1, 2)],
            vec![q_ratio(1, 4), q_ratio(3, 4)],
        ];
        let m = StepMatrix::from_dense_rows(&p);
        let mut row = SharedDenRow::point_mass(2, 0);
        for _ in 0..5 {
            row = m.apply_row(&row);
        }
        // exact fifth power first row, computed by hand with fractions:
        // after 1: (1/2, 1/2); 2: (3/8, 5/8); 3: (11/32, 21/32);
        // 4: (43/128, 85/128); 5: (171/512, 341/512)
        assert_eq!(row.entry(0), q_ratio(171, 512));
        assert_eq!(row.entry(1), q_ratio(341, 512));
        row.normalize();
        assert_eq!(row.entry(0), q_ratio(171, 512));
    }
}
