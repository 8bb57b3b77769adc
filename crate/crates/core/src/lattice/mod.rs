//! Intersection lattices, homology classes and the plumbing configuration C_p.

mod plumbing;

use std::fmt;
use std::sync::Arc;

use num::{Integer, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, format_rational, rat, Matrix, Rational};

pub use plumbing::{
    basis_convert, boundary, boundary_residue_class, plumbing_inverse, plumbing_inverse_scaled,
    plumbing_matrix, rel_pairing, residue_class, v_basis_gram, Basis, ConfigCp, RelClassCp,
};

/// A free module with named basis and a symmetric rational pairing.
///
/// Lattices are immutable; classes hold an `Arc` to their lattice and two
/// lattices are the same exactly when names and Gram matrix coincide.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LatticeDoc")]
pub struct IntersectionLattice {
    #[serde(rename = "basis")]
    names: Vec<String>,
    #[serde(with = "rational::serde_matrix")]
    gram: Matrix,
    #[serde(skip_serializing)]
    int_gram: Vec<Vec<Option<i64>>>,
}

#[derive(Deserialize)]
struct LatticeDoc {
    basis: Vec<String>,
    #[serde(with = "rational::serde_matrix")]
    gram: Matrix,
}

impl TryFrom<LatticeDoc> for IntersectionLattice {
    type Error = Error;

    fn try_from(doc: LatticeDoc) -> Result<Self> {
        let l = Self::build(doc.basis, doc.gram);
        l.validate()?;
        Ok(l)
    }
}

impl IntersectionLattice {
    fn build(names: Vec<String>, gram: Matrix) -> Self {
        let int_gram = gram
            .iter()
            .map(|row| row.iter().map(rational::to_i64).collect())
            .collect();
        Self {
            names,
            gram,
            int_gram,
        }
    }

    pub fn new(names: Vec<String>, gram: Matrix) -> Result<Arc<Self>> {
        let l = Self::build(names, gram);
        l.validate()?;
        Ok(Arc::new(l))
    }

    pub fn from_ints(names: &[&str], gram: &[Vec<i64>]) -> Result<Arc<Self>> {
        Self::new(
            names.iter().map(|s| s.to_string()).collect(),
            rational::from_ints(gram),
        )
    }

    /// Rank-one lattice `<g>` on a single named generator.
    pub fn rank_one(name: &str, square: Rational) -> Arc<Self> {
        Arc::new(Self::build(vec![name.to_string()], vec![vec![square]]))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.names.len();
        if self.gram.len() != n || self.gram.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLattice(format!("gram is not {n}x{n}")));
        }
        if !rational::is_symmetric(&self.gram) {
            return Err(Error::InvalidLattice("gram is not symmetric".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &self.names {
            if name.is_empty() || !seen.insert(name) {
                return Err(Error::InvalidLattice(format!(
                    "duplicate or empty basis name {name:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn pair_rational(&self, a: &[Rational], b: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() && !self.gram[i][j].is_zero() {
                    s += ai * &self.gram[i][j] * bj;
                }
            }
        }
        s
    }

    /// `b_i · c` for the basis vector `b_i`.
    pub fn row_pairing(&self, i: usize, c: &[i64]) -> Rational {
        let mut whole: i128 = 0;
        let mut s = Rational::zero();
        for (j, &cj) in c.iter().enumerate() {
            if cj == 0 {
                continue;
            }
            match self.int_gram[i][j] {
                Some(gi) => whole += gi as i128 * cj as i128,
                None => s += &self.gram[i][j] * rat(cj),
            }
        }
        s + Rational::from_integer(whole.into())
    }

    pub fn pair_int(&self, a: &[i64], b: &[i64]) -> Rational {
        if let Some(v) = self.pair_exact(a, b) {
            return Rational::from_integer(v.into());
        }
        let mut s = Rational::zero();
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                if ai != 0 && bj != 0 {
                    s += &self.gram[i][j] * rat(ai * bj);
                }
            }
        }
        s
    }

    /// `a·b` in integers, when every Gram entry it touches is integral.
    pub fn pair_exact(&self, a: &[i64], b: &[i64]) -> Option<i128> {
        let nz: Vec<(usize, i64)> = b
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, v)| v != 0)
            .collect();
        let mut whole: i128 = 0;
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let row = &self.int_gram[i];
            for &(j, bj) in &nz {
                whole += row[j]? as i128 * ai as i128 * bj as i128;
            }
        }
        Some(whole)
    }

    /// Orthogonal direct sum with new generators of the given squares.
    pub fn extend(&self, names: &[String], squares: &[Rational]) -> Result<Arc<Self>> {
        let n = self.rank();
        let k = names.len();
        let mut gram = rational::zeros(n + k, n + k);
        for i in 0..n {
            gram[i][..n].clone_from_slice(&self.gram[i]);
        }
        for (j, sq) in squares.iter().enumerate() {
            gram[n + j][n + j] = sq.clone();
        }
        let mut all = self.names.clone();
        all.extend(names.iter().cloned());
        Self::new(all, gram)
    }

    /// Replaces basis vector `index` by `b/divisor`, renaming it.
    pub fn refine(&self, index: usize, divisor: i64, new_name: &str) -> Result<Arc<Self>> {
        if divisor < 1 || index >= self.rank() {
            return Err(Error::InvalidParameter(format!(
                "refine index {index} divisor {divisor}"
            )));
        }
        let d = rat(divisor);
        let mut gram = self.gram.clone();
        for j in 0..self.rank() {
            if j != index {
                gram[index][j] = &gram[index][j] / &d;
                gram[j][index] = &gram[j][index] / &d;
            }
        }
        gram[index][index] = &gram[index][index] / (&d * &d);
        let mut names = self.names.clone();
        names[index] = new_name.to_string();
        Self::new(names, gram)
    }

    /// First name of the form `base`, `base'`, `base''`, ... not already used.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.index_of(&name).is_some() {
            name.push('\'');
        }
        name
    }
}

/// `f` refined by `d` is `f_d`; `f_k` refined by `d` is `f_{kd}`.
pub fn refined_name(name: &str, divisor: i64) -> String {
    if divisor == 1 {
        return name.to_string();
    }
    if let Some((base, k)) = name.rsplit_once('_') {
        if let Ok(k) = k.parse::<i64>() {
            return format!("{base}_{}", k * divisor);
        }
    }
    format!("{name}_{divisor}")
}

pub fn same_lattice(a: &Arc<IntersectionLattice>, b: &Arc<IntersectionLattice>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_same(a: &Arc<IntersectionLattice>, b: &Arc<IntersectionLattice>) -> Result<()> {
    if same_lattice(a, b) {
        Ok(())
    } else {
        Err(Error::LatticeMismatch)
    }
}

/// Integral homology class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HClass {
    lattice: Arc<IntersectionLattice>,
    coeffs: Vec<i64>,
}

/// Rational homology class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QClass {
    lattice: Arc<IntersectionLattice>,
    coeffs: Vec<Rational>,
}

/// Anything with rational coordinates on a lattice.
pub trait Class {
    fn lattice(&self) -> &Arc<IntersectionLattice>;
    fn rational_coeffs(&self) -> Vec<Rational>;
}

impl Class for HClass {
    fn lattice(&self) -> &Arc<IntersectionLattice> {
        &self.lattice
    }
    fn rational_coeffs(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|&c| rat(c)).collect()
    }
}

impl Class for QClass {
    fn lattice(&self) -> &Arc<IntersectionLattice> {
        &self.lattice
    }
    fn rational_coeffs(&self) -> Vec<Rational> {
        self.coeffs.clone()
    }
}

/// `a^T gram b`.
pub fn pairing(a: &impl Class, b: &impl Class) -> Result<Rational> {
    check_same(a.lattice(), b.lattice())?;
    Ok(a.lattice()
        .pair_rational(&a.rational_coeffs(), &b.rational_coeffs()))
}

impl HClass {
    pub fn new(lattice: &Arc<IntersectionLattice>, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != lattice.rank() {
            return Err(Error::InvalidParameter(format!(
                "class has {} coordinates, lattice rank is {}",
                coeffs.len(),
                lattice.rank()
            )));
        }
        Ok(Self {
            lattice: lattice.clone(),
            coeffs,
        })
    }

    pub fn zero(lattice: &Arc<IntersectionLattice>) -> Self {
        Self {
            lattice: lattice.clone(),
            coeffs: vec![0; lattice.rank()],
        }
    }

    pub fn basis(lattice: &Arc<IntersectionLattice>, index: usize) -> Self {
        let mut c = Self::zero(lattice);
        c.coeffs[index] = 1;
        c
    }

    pub fn named(lattice: &Arc<IntersectionLattice>, name: &str) -> Result<Self> {
        let i = lattice
            .index_of(name)
            .ok_or_else(|| Error::InvalidParameter(format!("no basis vector named {name}")))?;
        Ok(Self::basis(lattice, i))
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self {
            lattice: self.lattice.clone(),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(-1)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(&self.lattice, &other.lattice)?;
        Ok(Self {
            lattice: self.lattice.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn square(&self) -> Rational {
        self.lattice.pair_int(&self.coeffs, &self.coeffs)
    }

    pub fn dot(&self, other: &Self) -> Result<Rational> {
        check_same(&self.lattice, &other.lattice)?;
        Ok(self.lattice.pair_int(&self.coeffs, &other.coeffs))
    }

    pub fn to_q(&self) -> QClass {
        QClass {
            lattice: self.lattice.clone(),
            coeffs: self.rational_coeffs(),
        }
    }
}

impl QClass {
    pub fn new(lattice: &Arc<IntersectionLattice>, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != lattice.rank() {
            return Err(Error::InvalidParameter(
                "class length differs from lattice rank".into(),
            ));
        }
        Ok(Self {
            lattice: lattice.clone(),
            coeffs,
        })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn square(&self) -> Rational {
        self.lattice.pair_rational(&self.coeffs, &self.coeffs)
    }

    pub fn add_scaled(&self, other: &impl Class, k: &Rational) -> Result<Self> {
        check_same(&self.lattice, other.lattice())?;
        let o = other.rational_coeffs();
        Ok(Self {
            lattice: self.lattice.clone(),
            coeffs: self.coeffs.iter().zip(&o).map(|(a, b)| a + k * b).collect(),
        })
    }

    /// The integral class, if every coordinate is an integer.
    pub fn to_integral(&self) -> Option<HClass> {
        let coeffs: Option<Vec<i64>> = self.coeffs.iter().map(rational::to_i64).collect();
        coeffs.map(|coeffs| HClass {
            lattice: self.lattice.clone(),
            coeffs,
        })
    }
}

/// Renders integer coordinates with basis names, e.g. `2*f_3 - e1`.
pub fn format_coords(names: &[String], coeffs: &[i64]) -> String {
    let mut out = String::new();
    for (name, &c) in names.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else { "+" };
        let mag = c.abs();
        let term = if mag == 1 {
            name.clone()
        } else {
            format!("{mag}*{name}")
        };
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

pub fn format_qcoords(names: &[String], coeffs: &[Rational]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, c)| format!("{}*{n}", format_rational(c)))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl fmt::Display for HClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_coords(self.lattice.names(), &self.coeffs))
    }
}

impl fmt::Display for QClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_qcoords(self.lattice.names(), &self.coeffs))
    }
}

fn is_even_integer(r: &Rational) -> Option<bool> {
    r.is_integer().then(|| r.numer().is_even())
}

/// `c.b ≡ b.b (mod 2)` for every basis vector `b`.
pub fn is_characteristic(lattice: &IntersectionLattice, c: &HClass) -> bool {
    if c.coeffs.len() != lattice.rank() {
        return false;
    }
    (0..lattice.rank()).all(|i| {
        let row = &lattice.int_gram[i];
        if let Some(gii) = row[i] {
            let exact: Option<i128> = c
                .coeffs
                .iter()
                .zip(row)
                .filter(|(&cj, _)| cj != 0)
                .map(|(&cj, g)| g.map(|g| g as i128 * cj as i128))
                .sum();
            if let Some(v) = exact {
                return (v - gii as i128) % 2 == 0;
            }
        }
        let cb = lattice.row_pairing(i, &c.coeffs);
        match (is_even_integer(&cb), is_even_integer(&lattice.gram[i][i])) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    })
}

/// Integer-valued pairing, or an error naming the classes.
pub fn integral_pairing(a: &HClass, b: &HClass) -> Result<i64> {
    check_same(&a.lattice, &b.lattice)?;
    if let Some(v) = a
        .lattice
        .pair_exact(&a.coeffs, &b.coeffs)
        .and_then(|v| i64::try_from(v).ok())
    {
        return Ok(v);
    }
    let v = a.dot(b)?;
    rational::to_i64(&v)
        .ok_or_else(|| Error::NonIntegral(format!("{a} . {b} = {}", format_rational(&v))))
}

/// An element of `Z/modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zmod {
    pub value: i64,
    pub modulus: i64,
}

impl Zmod {
    pub fn new(value: i64, modulus: i64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        Self {
            value: value.rem_euclid(modulus),
            modulus,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(Self::new(self.value + other.value, self.modulus))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.value, self.modulus)
    }

    pub fn is_multiple_of(&self, k: i64) -> bool {
        self.value % k == 0
    }
}

impl fmt::Display for Zmod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}
