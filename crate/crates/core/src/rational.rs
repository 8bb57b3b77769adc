//! Exact rational scalars and small dense matrices over them.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Matrix = Vec<Vec<Rational>>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    assert!(d != 0, "zero denominator");
    let g = n.gcd(&d) * d.signum();
    Rational::new_raw(BigInt::from(n / g), BigInt::from(d / g))
}

/// Renders `n` for integers and `n/d` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Serialization(format!("bad rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn to_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn lcm_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn from_ints(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| rat(x)).collect())
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Rational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Rational::zero(), |s, (x, y)| s + x * y)
        })
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |s, (x, y)| s + x * y)
}

pub fn neg_matrix(a: &Matrix) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// Row-reduces `m` in place; returns pivot columns.
fn row_reduce(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(k) = (r..rows).find(|&k| !m[k][c].is_zero()) else {
            continue;
        };
        m.swap(r, k);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for k in 0..rows {
            if k != r && !m[k][c].is_zero() {
                let f = m[k][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[k][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &Matrix) -> usize {
    let mut m = a.clone();
    row_reduce(&mut m).len()
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `a x = b`; `None` if inconsistent, error-free but `Err` if not unique.
pub fn solve_unique(a: &Matrix, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, y)| {
            row.iter()
                .cloned()
                .chain(std::iter::once(y.clone()))
                .collect()
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.contains(&cols) {
        return Ok(None);
    }
    if pivots.len() < cols {
        return Err(Error::InvalidParameter(format!(
            "underdetermined system: rank {} < {cols}",
            pivots.len()
        )));
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Ok(Some(x))
}

/// Integer basis of the rational null space of `a` (each vector scaled to integers).
pub fn integer_nullspace(a: &Matrix, cols: usize) -> Vec<Vec<BigInt>> {
    let mut m = a.clone();
    let pivots = row_reduce(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -m[r][f].clone();
            }
            let d = lcm_denominators(v.iter());
            let ints: Vec<BigInt> = v
                .iter()
                .map(|x| (x * Rational::from_integer(d.clone())).to_integer())
                .collect();
            let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            ints.into_iter()
                .map(|x| if g.is_zero() { x } else { x / &g })
                .collect()
        })
        .collect()
}

pub fn is_symmetric(a: &Matrix) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, row)| row.len() == a.len() && (0..a.len()).all(|j| row[j] == a[j][i]))
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_matrix {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m
            .iter()
            .map(|r| r.iter().map(format_rational).collect())
            .collect();
        s.collect_seq(rows)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Matrix, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse_roundtrip() {
        for r in [frac(-5, 9), rat(3), frac(4, 6), rat(0)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        assert_eq!(format_rational(&frac(-5, 9)), "-5/9");
        assert_eq!(format_rational(&frac(6, 3)), "2");
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn inverse_of_small_matrix() {
        let a = from_ints(&[vec![2, 1], vec![1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&from_ints(&[vec![1, 2], vec![2, 4]])).is_none());
    }

    #[test]
    fn solve_detects_inconsistency_and_rank_deficiency() {
        let a = from_ints(&[vec![1, 1], vec![2, 2]]);
        assert!(solve_unique(&a, &[rat(1), rat(3)]).unwrap().is_none());
        assert!(solve_unique(&a, &[rat(1), rat(2)]).is_err());
        let b = from_ints(&[vec![1, 1], vec![1, -1], vec![2, 0]]);
        assert_eq!(
            solve_unique(&b, &[rat(3), rat(1), rat(4)])
                .unwrap()
                .unwrap(),
            vec![rat(2), rat(1)]
        );
    }

    #[test]
    fn nullspace_is_integral_and_annihilated() {
        let a = from_ints(&[vec![1, -4, 0], vec![0, 0, 0]]);
        let ns = integer_nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let q: Vec<Rational> = v
                .iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect();
            assert!(dot(&a[0], &q).is_zero());
        }
    }
}
