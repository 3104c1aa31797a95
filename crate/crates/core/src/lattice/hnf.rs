//! Row-style Hermite normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;

/// Integer vector; translation parts of affine elements have length `2k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct IntVector(pub Vec<Int>);

impl IntVector {
    pub fn zeros(n: usize) -> Self {
        IntVector(vec![Int::ZERO; n])
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        IntVector(v.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Int::is_zero)
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        self.0.iter().map(Int::to_bigint).collect()
    }

    pub fn from_bigints(v: &[BigInt]) -> Self {
        IntVector(v.iter().map(Int::from).collect())
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> IntVector {
        IntVector(self.0[range].to_vec())
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Int) -> IntVector {
        IntVector(self.0.iter().map(|a| a * c).collect())
    }
}

impl std::fmt::Display for IntVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Result of an HNF reduction together with its certificates.
///
/// `transform` is unimodular with `transform · input = basis ⊕ zero rows`, and
/// `coefficients[i]` expresses input row `i` in terms of `basis`.
#[derive(Clone, Debug)]
pub struct HnfCertificate {
    pub basis: Vec<Vec<BigInt>>,
    pub transform: Vec<Vec<BigInt>>,
    pub coefficients: Vec<Vec<BigInt>>,
}

fn check_rows(rows: &[Vec<BigInt>]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let n = first.len();
    if n == 0 {
        return Err(Error::Input("lattice rows must have length >= 1".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::Input(format!(
            "row {bad} has length {} but row 0 has length {n}",
            rows[bad].len()
        )));
    }
    Ok(n)
}

fn row_combine(a: &[BigInt], ca: &BigInt, b: &[BigInt], cb: &BigInt) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| ca * x + cb * y).collect()
}

/// Core elimination. When `track` is set a unimodular transform is carried
/// alongside the rows.
fn reduce(mut a: Vec<Vec<BigInt>>, n: usize, track: bool) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, usize) {
    let m = a.len();
    let mut u: Vec<Vec<BigInt>> = if track {
        (0..m)
            .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect()
    } else {
        Vec::new()
    };
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        for i in r + 1..m {
            if a[i][col].is_zero() {
                continue;
            }
            let eg = a[r][col].extended_gcd(&a[i][col]);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let p = &a[r][col] / &g;
            let q = &a[i][col] / &g;
            let neg_q = -q;
            let new_r = row_combine(&a[r], &s, &a[i], &t);
            let new_i = row_combine(&a[r], &neg_q, &a[i], &p);
            a[r] = new_r;
            a[i] = new_i;
            if track {
                let ur = row_combine(&u[r], &s, &u[i], &t);
                let ui = row_combine(&u[r], &neg_q, &u[i], &p);
                u[r] = ur;
                u[i] = ui;
            }
        }
        if a[r][col].is_zero() {
            continue;
        }
        if a[r][col].is_negative() {
            a[r].iter_mut().for_each(|x| *x = -&*x);
            if track {
                u[r].iter_mut().for_each(|x| *x = -&*x);
            }
        }
        for i in 0..r {
            let q = a[i][col].div_floor(&a[r][col]);
            if q.is_zero() {
                continue;
            }
            let neg = -q;
            let one = BigInt::one();
            a[i] = row_combine(&a[i], &one, &a[r], &neg);
            if track {
                u[i] = row_combine(&u[i], &one, &u[r], &neg);
            }
        }
        r += 1;
    }
    (a, u, r)
}

/// Row HNF of the lattice spanned by `rows`: positive pivots, entries above
/// each pivot reduced into `[0, pivot)`. Returns `(basis, rank)`.
pub fn hnf(rows: &[IntVector]) -> Result<(Vec<IntVector>, usize)> {
    let big: Vec<Vec<BigInt>> = rows.iter().map(IntVector::to_bigints).collect();
    let (basis, rank) = hnf_big(&big)?;
    Ok((basis.iter().map(|r| IntVector::from_bigints(r)).collect(), rank))
}

pub fn hnf_big(rows: &[Vec<BigInt>]) -> Result<(Vec<Vec<BigInt>>, usize)> {
    let n = check_rows(rows)?;
    if rows.is_empty() {
        return Ok((Vec::new(), 0));
    }
    let (mut a, _, r) = reduce(rows.to_vec(), n, false);
    a.truncate(r);
    Ok((a, r))
}

pub fn lattice_rank(rows: &[IntVector]) -> Result<usize> {
    Ok(hnf(rows)?.1)
}

/// HNF plus the certificates that show the span is unchanged in both
/// directions.
pub fn hnf_with_certificate(rows: &[Vec<BigInt>]) -> Result<HnfCertificate> {
    let n = check_rows(rows)?;
    if rows.is_empty() {
        return Ok(HnfCertificate {
            basis: Vec::new(),
            transform: Vec::new(),
            coefficients: Vec::new(),
        });
    }
    let (mut a, u, r) = reduce(rows.to_vec(), n, true);
    a.truncate(r);
    let coefficients = rows
        .iter()
        .map(|row| {
            express_in_basis(&a, row).expect("input row lies in the lattice it spans")
        })
        .collect();
    Ok(HnfCertificate {
        basis: a,
        transform: u,
        coefficients,
    })
}

/// Coefficients of `v` over an HNF basis, or `None` if `v` is not in the
/// lattice.
pub fn express_in_basis(basis: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut coeffs = Vec::with_capacity(basis.len());
    for row in basis {
        let pivot = row.iter().position(|x| !x.is_zero())?;
        let (q, rem) = rest[pivot].div_mod_floor(&row[pivot]);
        if !rem.is_zero() {
            return None;
        }
        for (x, b) in rest.iter_mut().zip(row) {
            *x -= &q * b;
        }
        coeffs.push(q);
    }
    rest.iter().all(Zero::is_zero).then_some(coeffs)
}

/// Rank over ℚ by fraction-free (Bareiss) elimination. Independent of the
/// HNF route and used to cross-check it.
pub fn rational_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a = rows.to_vec();
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..m {
            for j in col + 1..n {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    #[test]
    fn identity_rows() {
        let (b, r) = hnf(&[iv(&[1, 0]), iv(&[0, 1])]).unwrap();
        assert_eq!(r, 2);
        assert_eq!(b, vec![iv(&[1, 0]), iv(&[0, 1])]);
    }

    #[test]
    fn empty_lattice() {
        let (b, r) = hnf(&[]).unwrap();
        assert!(b.is_empty());
        assert_eq!(r, 0);
    }

    #[test]
    fn index_two_sublattice() {
        // (2,0),(0,2),(1,1) spans {(a,b): a ≡ b mod 2}.
        let (b, r) = hnf(&[iv(&[2, 0]), iv(&[0, 2]), iv(&[1, 1])]).unwrap();
        assert_eq!(r, 2);
        assert_eq!(b, vec![iv(&[1, 1]), iv(&[0, 2])]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(hnf(&[iv(&[1, 0]), iv(&[1])]), Err(Error::Input(_))));
    }

    #[test]
    fn ranks() {
        assert_eq!(lattice_rank(&[]).unwrap(), 0);
        assert_eq!(lattice_rank(&[iv(&[3, 6]), iv(&[1, 2])]).unwrap(), 1);
        let diag = [
            iv(&[1, 0, 0, 0]),
            iv(&[0, 1, 0, 0]),
            iv(&[0, 0, 2, 0]),
            iv(&[0, 0, 0, 5]),
        ];
        assert_eq!(lattice_rank(&diag).unwrap(), 4);
    }

    #[test]
    fn reduced_above_pivots() {
        let (b, _) = hnf(&[iv(&[3, 7, 1]), iv(&[0, 5, 4]), iv(&[0, 0, 6])]).unwrap();
        for (i, row) in b.iter().enumerate() {
            let p = row.0.iter().position(|x| !x.is_zero()).unwrap();
            assert!(!row.0[p].is_negative());
            for above in &b[..i] {
                assert!(!above.0[p].is_negative() && above.0[p] < row.0[p]);
            }
        }
    }

    #[test]
    fn membership() {
        let (b, _) = hnf_big(&[vec![2.into(), 0.into()], vec![0.into(), 3.into()]]).unwrap();
        assert!(express_in_basis(&b, &[4.into(), (-3).into()]).is_some());
        assert!(express_in_basis(&b, &[1.into(), 0.into()]).is_none());
    }
}
