//! Exact rational linear algebra.
//!
//! Everything here works over arbitrary-precision rationals. Systems are
//! solved by fraction-free (Bareiss) elimination: every row of the augmented
//! system is first scaled by the lcm of its denominators, elimination then
//! runs over `BigInt` with exact divisions, and only the back substitution
//! touches rationals again.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Rational vector indexed in graph vertex order.
pub type RatVector = Vec<Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(
            t.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?,
        ),
    };
    Ok(parsed)
}

/// `"a/b"` in lowest terms, `"a"` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Serde adapter: a rational vector as a JSON array of rational strings.
pub mod ratvec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<RatVector, D::Error> {
        let raw: Vec<RationalRepr> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_rational().map_err(de::Error::custom))
            .collect()
    }
}

/// Accepts either a JSON integer or a rational string.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum RationalRepr {
    Int(i64),
    Str(String),
}

impl RationalRepr {
    pub fn into_rational(self) -> Result<Rational> {
        match self {
            RationalRepr::Int(n) => Ok(rat(n)),
            RationalRepr::Str(s) => parse_rational(&s),
        }
    }
}

/// Parses a JSON array whose entries are integers or rational strings.
pub fn parse_rational_vector(json: &str) -> Result<RatVector> {
    let raw: Vec<RationalRepr> =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    raw.into_iter().map(RationalRepr::into_rational).collect()
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Ok(RatMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
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

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<RatVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Leading `k x k` submatrix.
    pub fn leading(&self, k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for r in 0..k {
            for c in 0..k {
                m.set(r, c, self.get(r, c).clone());
            }
        }
        m
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        self.get(r, c)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(format_rational).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(
            (0..self.rows).map(|r| self.row(r).iter().map(format_rational).collect::<Vec<_>>()),
        )
    }
}

fn lcm_of_denominators<'a>(it: impl Iterator<Item = &'a Rational>) -> BigInt {
    it.fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Integer rows `scale_i * [A_i | B_i]`; returns the rows and the scales.
fn scaled_rows(a: &RatMatrix, rhs: &[&[Rational]]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(a.rows);
    let mut scales = Vec::with_capacity(a.rows);
    for r in 0..a.rows {
        let extra = rhs.iter().map(|col| &col[r]);
        let scale = lcm_of_denominators(a.row(r).iter().chain(extra));
        let row: Vec<BigInt> = a
            .row(r)
            .iter()
            .chain(rhs.iter().map(|col| &col[r]))
            .map(|q| q.numer() * (&scale / q.denom()))
            .collect();
        rows.push(row);
        scales.push(scale);
    }
    (rows, scales)
}

/// In-place fraction-free elimination of the first `n` columns. Returns the
/// permutation parity, or `None` if a column has no nonzero pivot.
fn bareiss(rows: &mut [Vec<BigInt>], n: usize, pivoting: bool) -> Option<bool> {
    let width = rows.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut odd = false;
    for k in 0..n {
        if rows[k][k].is_zero() {
            if !pivoting {
                return None;
            }
            let p = (k + 1..n).find(|&i| !rows[i][k].is_zero())?;
            rows.swap(k, p);
            odd = !odd;
        }
        let (top, bottom) = rows.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..width {
                let v = &row[j] * &pivot_row[k] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = top[k][k].clone();
    }
    Some(odd)
}

pub fn determinant(m: &RatMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Rational::one());
    }
    let (mut rows, scales) = scaled_rows(m, &[]);
    let Some(odd) = bareiss(&mut rows, n, true) else {
        return Ok(Rational::zero());
    };
    let det = if odd { -rows[n - 1][n - 1].clone() } else { rows[n - 1][n - 1].clone() };
    let scale: BigInt = scales.iter().product();
    Ok(Rational::new(det, scale))
}

/// Solves `m * X = B` for several right-hand sides at once.
fn solve_many(m: &RatMatrix, rhs: &[&[Rational]]) -> Result<Vec<RatVector>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("solve with a non-square matrix".into()));
    }
    let n = m.rows;
    if let Some(bad) = rhs.iter().find(|b| b.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}x{n}, right-hand side has {} entries",
            bad.len()
        )));
    }
    let (mut rows, _) = scaled_rows(m, rhs);
    bareiss(&mut rows, n, true).ok_or(Error::SingularMatrix)?;
    if n > 0 && rows[n - 1][n - 1].is_zero() {
        return Err(Error::SingularMatrix);
    }
    let mut out = Vec::with_capacity(rhs.len());
    for c in 0..rhs.len() {
        let mut x = vec![Rational::zero(); n];
        for i in (0..n).rev() {
            let mut acc = Rational::from_integer(rows[i][n + c].clone());
            for j in i + 1..n {
                acc -= Rational::from_integer(rows[i][j].clone()) * &x[j];
            }
            x[i] = acc / Rational::from_integer(rows[i][i].clone());
        }
        out.push(x);
    }
    Ok(out)
}

/// Exact solution of `m * x = b`.
pub fn solve_linear(m: &RatMatrix, b: &[Rational]) -> Result<RatVector> {
    Ok(solve_many(m, &[b])?.pop().unwrap_or_default())
}

pub fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    let n = m.rows;
    let id = RatMatrix::identity(n);
    let cols: Vec<&[Rational]> = (0..n).map(|r| id.row(r)).collect();
    let solved = solve_many(m, &cols)?;
    // solved[c] is column c of the inverse
    Ok(RatMatrix::from_rows(solved)?.transpose())
}

/// Signs of the leading principal minors, in order `1..=n`. Stops at the
/// first vanishing minor (reported as zero).
pub fn leading_minor_signs(m: &RatMatrix) -> Result<Vec<i8>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("minors of a non-square matrix".into()));
    }
    let n = m.rows;
    let (mut rows, _) = scaled_rows(m, &[]);
    let mut signs = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    // Unpivoted Bareiss: after step k-1 the pivot rows[k][k] is the k+1-th
    // leading minor of the row-scaled matrix, whose sign matches the original.
    for k in 0..n {
        let pivot = rows[k][k].clone();
        let sign = if pivot.is_zero() { 0 } else if pivot.is_positive() { 1 } else { -1 };
        signs.push(sign);
        if sign == 0 {
            break;
        }
        let (top, bottom) = rows.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..n {
                let v = &row[j] * &pivot_row[k] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot;
    }
    Ok(signs)
}

/// True iff `(-1)^k det_k > 0` for every leading principal minor.
pub fn is_negative_definite(m: &RatMatrix) -> Result<bool> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let signs = leading_minor_signs(m)?;
    Ok(signs.len() == m.rows
        && signs.iter().enumerate().all(|(i, &s)| {
            let k = i + 1;
            s == if k % 2 == 1 { -1 } else { 1 }
        }))
}
