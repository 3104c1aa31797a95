//! Exact rational matrices and linear solves.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;

pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Dense matrix over ℚ, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, c: Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rational matrix".into()));
        }
        Ok(RationalMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn from_ints(rows: &[Vec<Int>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|x| Rational::from_integer(x.to_bigint())).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// `Some(α)` when the matrix equals `α·I`.
    pub fn as_scalar(&self) -> Option<Rational> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let a = self[(0, 0)].clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { a.clone() } else { Rational::zero() };
                if self[(i, j)] != want {
                    return None;
                }
            }
        }
        Some(a)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("shape mismatch in subtraction".into()));
        }
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension("vector length does not match columns".into()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !a[(i, col)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let piv = a[(col, col)].clone();
            det *= &piv;
            for i in col + 1..n {
                let f = &a[(i, col)] / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let d = &f * &a[(col, j)];
                    a[(i, j)] -= d;
                }
            }
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.det().map(|d| !d.is_zero()).unwrap_or(false)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !a[(i, col)].is_zero()) else {
                return Err(Error::Input("matrix is singular".into()));
            };
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let piv = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] /= &piv;
                inv[(col, j)] /= &piv;
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let da = &f * &a[(col, j)];
                    a[(i, j)] -= da;
                    let di = &f * &inv[(col, j)];
                    inv[(i, j)] -= di;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Least common multiple of all denominators.
    pub fn common_denominator(&self) -> BigInt {
        common_denominator(&self.data)
    }

    /// Integer entries, if every entry is integral.
    pub fn to_integer_rows(&self) -> Option<Vec<Vec<Int>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.is_integer().then(|| Int::from(x.to_integer())))
                    .collect()
            })
            .collect()
    }
}

pub fn common_denominator(xs: &[Rational]) -> BigInt {
    use num_integer::Integer;
    xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

// Entries travel as "p/q" strings.
impl Serialize for RationalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| serde::de::Error::custom("bad rational entry"))?;
        RationalMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing a rational as a `"p/q"` string.
pub mod rational_string {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`")))
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            let n: BigInt = n.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Exact solution set of `A·x = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSolution {
    /// The solution with every free variable set to zero.
    pub particular: Vec<Rational>,
    /// Basis of `{x : A·x = 0}`.
    pub nullspace: Vec<Vec<Rational>>,
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(a: &mut RationalMatrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let piv = a[(r, col)].clone();
        for j in col..a.cols {
            a[(r, j)] /= &piv;
        }
        for i in 0..a.rows {
            if i == r || a[(i, col)].is_zero() {
                continue;
            }
            let f = a[(i, col)].clone();
            for j in col..a.cols {
                let d = &f * &a[(r, j)];
                a[(i, j)] -= d;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Nullspace basis of `a`, one vector per free column.
pub fn nullspace(a: &RationalMatrix) -> Vec<Vec<Rational>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); a.cols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(row, f)].clone();
            }
            v
        })
        .collect()
}

/// Solves `A·x = b` exactly. `Ok(None)` when the system is inconsistent.
pub fn solve_rational(a: &RationalMatrix, b: &[Rational]) -> Result<Option<RationalSolution>> {
    if b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "right-hand side has length {} but the matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    let mut aug = RationalMatrix::zeros(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, a.cols)] = b[i].clone();
    }
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&a.cols) {
        return Ok(None);
    }
    let mut particular = vec![Rational::zero(); a.cols];
    for (row, &pc) in pivots.iter().enumerate() {
        particular[pc] = aug[(row, a.cols)].clone();
    }
    Ok(Some(RationalSolution {
        particular,
        nullspace: nullspace(a),
    }))
}

/// Integer 2×2 matrix given row-major, for the intertwining solver.
pub type IntMat2 = [[Int; 2]; 2];

/// Rational basis of `{X ∈ M₂(ℚ) : Q·X = X·P}` for every `(P, Q)` pair.
pub fn sylvester_nullspace(pairs: &[(IntMat2, IntMat2)]) -> Vec<RationalMatrix> {
    // Unknown X = [[x0, x1], [x2, x3]].
    // (QX)_{ij} = Σ_k Q_ik X_kj,  (XP)_{ij} = Σ_k X_ik P_kj.
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(4 * pairs.len());
    for (p, qm) in pairs {
        let p: Vec<Vec<Rational>> = p
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.to_bigint())).collect())
            .collect();
        let qm: Vec<Vec<Rational>> = qm
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.to_bigint())).collect())
            .collect();
        for i in 0..2 {
            for j in 0..2 {
                let mut eq = vec![Rational::zero(); 4];
                for k in 0..2 {
                    eq[2 * k + j] += &qm[i][k];
                    eq[2 * i + k] -= &p[k][j];
                }
                rows.push(eq);
            }
        }
    }
    if rows.is_empty() {
        return (0..4)
            .map(|i| {
                let mut m = RationalMatrix::zeros(2, 2);
                m[(i / 2, i % 2)] = Rational::one();
                m
            })
            .collect();
    }
    let a = RationalMatrix::from_rows(rows).expect("four columns per row");
    nullspace(&a)
        .into_iter()
        .map(|v| {
            let mut m = RationalMatrix::zeros(2, 2);
            for (i, x) in v.into_iter().enumerate() {
                m[(i / 2, i % 2)] = x;
            }
            normalize_direction(m)
        })
        .collect()
}

/// Scales a nonzero matrix so its entries are coprime integers with a
/// positive leading entry.
pub fn normalize_direction(m: RationalMatrix) -> RationalMatrix {
    use num_integer::Integer;
    let den = m.common_denominator();
    let scaled = m.scale(&Rational::from_integer(den));
    let g = scaled
        .data
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x.to_integer()));
    if g.is_zero() {
        return scaled;
    }
    let lead_negative = scaled
        .data
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative());
    let g = if lead_negative { -g } else { g };
    scaled.scale(&Rational::new(BigInt::one(), g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: i64, b: i64, c: i64, d: i64) -> IntMat2 {
        [[a.into(), b.into()], [c.into(), d.into()]]
    }

    #[test]
    fn identity_solve() {
        let a = RationalMatrix::identity(2);
        let s = solve_rational(&a, &[q(3), q(4)]).unwrap().unwrap();
        assert_eq!(s.particular, vec![q(3), q(4)]);
        assert!(s.nullspace.is_empty());
    }

    #[test]
    fn inconsistent_solve() {
        let a = RationalMatrix::from_i64(&[&[1, 0], &[1, 0]]);
        assert!(solve_rational(&a, &[q(0), q(1)]).unwrap().is_none());
    }

    #[test]
    fn underdetermined_solve_has_nullspace() {
        let a = RationalMatrix::from_i64(&[&[1, 1, 0]]);
        let s = solve_rational(&a, &[q(2)]).unwrap().unwrap();
        assert_eq!(s.particular, vec![q(2), q(0), q(0)]);
        assert_eq!(s.nullspace.len(), 2);
        for v in &s.nullspace {
            assert_eq!(a.apply(v).unwrap(), vec![q(0)]);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let a = RationalMatrix::identity(2);
        assert!(matches!(solve_rational(&a, &[q(1)]), Err(Error::Dimension(_))));
    }

    #[test]
    fn inverse_and_det() {
        let a = RationalMatrix::from_i64(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.det().unwrap(), q(1));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RationalMatrix::identity(2));
        assert!(RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn sylvester_identity_pair_is_everything() {
        let sols = sylvester_nullspace(&[(m2(1, 0, 0, 1), m2(1, 0, 0, 1))]);
        assert_eq!(sols.len(), 4);
    }

    #[test]
    fn sylvester_solutions_satisfy_equations() {
        let pairs = [(m2(1, 2, 0, 1), m2(1, 0, 2, 1))];
        let sols = sylvester_nullspace(&pairs);
        assert_eq!(sols.len(), 2);
        let p = RationalMatrix::from_i64(&[&[1, 2], &[0, 1]]);
        let qm = RationalMatrix::from_i64(&[&[1, 0], &[2, 1]]);
        for x in &sols {
            let lhs = qm.mul(x).unwrap();
            let rhs = x.mul(&p).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rational_matrix_json() {
        let m = RationalMatrix::from_rows(vec![vec![q_frac(1, 2), q(0)], vec![q(-3), q_frac(5, 7)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1/2","0"],["-3","5/7"]]"#);
        let back: RationalMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
