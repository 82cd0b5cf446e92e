//! Dense rational matrices and exact linear algebra.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::LinalgError;
use crate::rational::Rational;

/// Dense row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Malformed("ragged rows".into()));
        }
        Ok(RationalMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Rational] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// First entry (row, col) where `self` and `other` differ, if any.
    pub fn first_difference(&self, other: &RationalMatrix) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((self.rows.min(other.rows), self.cols.min(other.cols)));
        }
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != other.get(i, j))
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "mat_mul",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "mat_add",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, factor: &Rational) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    /// Exact inverse by Gauss-Jordan elimination with first-nonzero pivoting.
    pub fn inverse(&self) -> Result<RationalMatrix, LinalgError> {
        let n = self.require_square("mat_inverse")?;
        let mut work = self.clone();
        let mut inv = RationalMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !work.get(r, col).is_zero())
                .ok_or(LinalgError::Singular)?;
            if pivot != col {
                work.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = work.get(col, col).recip().expect("pivot is nonzero");
            work.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = work.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                work.sub_scaled_row(r, col, &factor);
                inv.sub_scaled_row(r, col, &factor);
            }
        }
        Ok(inv)
    }

    pub fn trace(&self) -> Result<Rational, LinalgError> {
        let n = self.require_square("trace")?;
        Ok((0..n).map(|i| self.get(i, i)).sum())
    }

    /// Exact determinant by fraction-carrying Gaussian elimination.
    pub fn determinant(&self) -> Result<Rational, LinalgError> {
        let n = self.require_square("determinant")?;
        let mut work = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !work.get(r, col).is_zero()) else {
                return Ok(Rational::zero());
            };
            if pivot != col {
                work.swap_rows(pivot, col);
                det = -det;
            }
            let p = work.get(col, col).clone();
            det *= &p;
            let p_inv = p.recip().expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = work.get(r, col) * &p_inv;
                if !factor.is_zero() {
                    work.sub_scaled_row(r, col, &factor);
                }
            }
        }
        Ok(det)
    }

    /// Monic characteristic polynomial `det(xI - A)` by the Faddeev-LeVerrier
    /// recurrence. Coefficients are listed from the leading `1` down to the
    /// constant term.
    pub fn char_poly(&self) -> Result<Vec<Rational>, LinalgError> {
        let n = self.require_square("char_poly")?;
        let mut coeffs = vec![Rational::one()];
        let identity = RationalMatrix::identity(n);
        // M_0 = 0, M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k
        let mut m = RationalMatrix::zeros(n, n);
        for k in 1..=n {
            let prev = coeffs.last().expect("nonempty").clone();
            m = self.mul(&m)?.add(&identity.scale(&prev))?;
            let am = self.mul(&m)?;
            let c = -(am.trace()? / Rational::from(k as i64));
            coeffs.push(c);
        }
        Ok(coeffs)
    }

    fn require_square(&self, op: &'static str) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare {
                op,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, row: usize, factor: &Rational) {
        for j in 0..self.cols {
            self.entries[row * self.cols + j] *= factor;
        }
    }

    // row[target] -= factor * row[source]
    fn sub_scaled_row(&mut self, target: usize, source: usize, factor: &Rational) {
        for j in 0..self.cols {
            let s = &self.entries[source * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let delta = factor * s;
            self.entries[target * self.cols + j] -= &delta;
        }
    }
}

/// Multiplies `factors` so that later entries end up on the left:
/// `factors[k-1] * ... * factors[1] * factors[0]`.
pub fn compose_later_left<'a>(
    size: usize,
    factors: impl IntoIterator<Item = &'a RationalMatrix>,
) -> Result<RationalMatrix, LinalgError> {
    factors
        .into_iter()
        .try_fold(RationalMatrix::identity(size), |acc, m| m.mul(&acc))
}

/// Evaluates a polynomial given by monic-first coefficients at a square matrix
/// using Horner's scheme.
pub fn eval_poly_at(coeffs: &[Rational], a: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
    let n = a.rows();
    let identity = RationalMatrix::identity(n);
    let mut acc = RationalMatrix::zeros(n, n);
    for c in coeffs {
        acc = a.mul(&acc)?.add(&identity.scale(c))?;
    }
    Ok(acc)
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "{}", padded.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Rational>>,
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.entries.len() != raw.rows || raw.entries.iter().any(|r| r.len() != raw.cols) {
            return Err(D::Error::custom(format!(
                "entries do not match declared shape {}x{}",
                raw.rows, raw.cols
            )));
        }
        let mut m = RationalMatrix::from_rows(raw.entries).map_err(D::Error::custom)?;
        // from_rows infers zero columns for an empty grid
        m.cols = raw.cols;
        Ok(m)
    }
}
