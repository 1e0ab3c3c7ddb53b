//! Exact rational matrices: row reduction, kernels and determinants.
//!
//! Everything here is carried out over `BigRational`, so results are exact
//! regardless of how large the power sums in the coefficient matrices get.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-size rational, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    actual: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form and the pivot columns, in order.
    ///
    /// Pivots are the first nonzero entry at or below the current row; no
    /// magnitude-based pivoting is needed over the rationals.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut r = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..r.cols {
            if pivot_row == r.rows {
                break;
            }
            let Some(found) = (pivot_row..r.rows).find(|&i| !r[(i, col)].is_zero()) else {
                continue;
            };
            r.swap_rows(found, pivot_row);

            let inv = r[(pivot_row, col)].recip();
            for j in col..r.cols {
                let v = &r[(pivot_row, j)] * &inv;
                r[(pivot_row, j)] = v;
            }
            for i in 0..r.rows {
                if i == pivot_row || r[(i, col)].is_zero() {
                    continue;
                }
                let factor = r[(i, col)].clone();
                for j in col..r.cols {
                    let v = &r[(i, j)] - &factor * &r[(pivot_row, j)];
                    r[(i, j)] = v;
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (r, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Columns that carry no pivot in the RREF, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        let (_, pivots) = self.rref();
        (0..self.cols).filter(|c| !pivots.contains(c)).collect()
    }

    /// Basis of the right kernel, one vector per free column.
    ///
    /// The free variable of each vector is set to -1 and the others to 0; the
    /// vector is then scaled to a primitive integer vector whose first nonzero
    /// entry is positive.
    pub fn right_kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut assignment = vec![Rational::zero(); free.len()];
                let idx = free.iter().position(|&c| c == fc).unwrap();
                assignment[idx] = -Rational::one();
                primitive_normalize(&kernel_vector_from_rref(&r, &pivots, &free, &assignment))
            })
            .collect()
    }

    /// Exact determinant by Gaussian elimination over the rationals.
    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(found) = (col..n).find(|&i| !a[(i, col)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if found != col {
                a.swap_rows(found, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det *= &pivot;
            for i in col + 1..n {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let factor = &a[(i, col)] / &pivot;
                for j in col..n {
                    let v = &a[(i, j)] - &factor * &a[(col, j)];
                    a[(i, j)] = v;
                }
            }
        }
        Ok(det)
    }

    /// `M v`.
    pub fn mat_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `w^T M`.
    pub fn vec_mat(&self, w: &[Rational]) -> Result<Vec<Rational>> {
        if w.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: w.len(),
            });
        }
        let mut out = vec![Rational::zero(); self.cols];
        for (i, wi) in w.iter().enumerate() {
            if wi.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                *o += wi * x;
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Solution of `R x = 0` given values for the free variables.
///
/// `r` must be in RREF with the given pivots; `free` lists the remaining
/// columns in the same order as `assignment`.
pub(crate) fn kernel_vector_from_rref(
    r: &ExactMatrix,
    pivots: &[usize],
    free: &[usize],
    assignment: &[Rational],
) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); r.cols()];
    for (&fc, x) in free.iter().zip(assignment) {
        v[fc] = x.clone();
    }
    for (row, &pc) in pivots.iter().enumerate() {
        let s = free
            .iter()
            .zip(assignment)
            .fold(Rational::zero(), |acc, (&fc, x)| acc + &r[(row, fc)] * x);
        v[pc] = -s;
    }
    v
}

/// Clears denominators, divides by the content and makes the first nonzero
/// entry positive. The zero vector is returned unchanged.
pub fn primitive_normalize(v: &[Rational]) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(first) if first.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd * &sign))
        .collect()
}

/// True when every entry is an integer, the entries have gcd 1 and the first
/// nonzero entry is positive.
pub fn is_primitive(v: &[Rational]) -> bool {
    if !v.iter().all(|x| x.is_integer()) {
        return false;
    }
    let gcd = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x.numer()));
    gcd.is_one()
        && v.iter()
            .find(|x| !x.is_zero())
            .is_some_and(|x| x.is_positive())
}
