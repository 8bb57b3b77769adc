//! Finite exponential sums `Σ a_s e^{κ_s}` over an intersection lattice.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{format_coords, same_lattice, Class, HClass, IntersectionLattice};
use crate::rational::{format_rational, frac, rat, to_i64, Rational};

/// A kernel: nonzero rational coefficients keyed by integral classes, in
/// lexicographic order of their coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpKernel {
    lattice: Arc<IntersectionLattice>,
    terms: BTreeMap<Vec<i64>, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

impl ExpKernel {
    pub fn zero(lattice: &Arc<IntersectionLattice>) -> Self {
        Self {
            lattice: lattice.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(lattice: &Arc<IntersectionLattice>, c: Rational) -> Self {
        let mut k = Self::zero(lattice);
        k.insert(vec![0; lattice.rank()], c);
        k
    }

    pub fn one(lattice: &Arc<IntersectionLattice>) -> Self {
        Self::constant(lattice, Rational::one())
    }

    pub fn from_terms(
        lattice: &Arc<IntersectionLattice>,
        terms: impl IntoIterator<Item = (Vec<i64>, Rational)>,
    ) -> Result<Self> {
        let mut k = Self::zero(lattice);
        for (class, c) in terms {
            if class.len() != lattice.rank() {
                return Err(Error::InvalidParameter(format!(
                    "term class has {} coordinates, lattice rank is {}",
                    class.len(),
                    lattice.rank()
                )));
            }
            k.insert(class, c);
        }
        Ok(k)
    }

    /// Adds `c e^{class}`, removing the term if it cancels.
    pub(crate) fn insert(&mut self, class: Vec<i64>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(class);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn lattice(&self) -> &Arc<IntersectionLattice> {
        &self.lattice
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, class: &[i64]) -> Rational {
        self.terms
            .get(class)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn classes(&self) -> impl Iterator<Item = HClass> + '_ {
        self.terms
            .keys()
            .map(|k| HClass::new(&self.lattice, k.clone()).expect("validated length"))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_lattice(&self.lattice, &other.lattice) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.lattice);
        for (k, a) in &self.terms {
            out.insert(k.clone(), a * c);
        }
        out
    }

    /// Convolution `e^κ · e^λ = e^{κ+λ}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(&self.lattice);
        for (k1, a1) in &self.terms {
            for (k2, a2) in &other.terms {
                let k: Vec<i64> = k1.iter().zip(k2).map(|(x, y)| x + y).collect();
                out.insert(k, a1 * a2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(&self.lattice);
        for _ in 0..n {
            out = out.mul(self).expect("same lattice");
        }
        out
    }

    /// `Σ a_s`.
    pub fn coeff_sum(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |s, c| s + c)
    }

    pub fn parity(&self) -> Parity {
        let neg = |k: &Vec<i64>| k.iter().map(|x| -x).collect::<Vec<_>>();
        let even = self
            .terms
            .iter()
            .all(|(k, c)| self.coefficient(&neg(k)) == *c);
        let odd = self
            .terms
            .iter()
            .all(|(k, c)| self.coefficient(&neg(k)) == -c);
        match (even, odd) {
            (true, _) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Neither,
        }
    }

    /// `a e^κ ↦ a (κ·u) e^κ`.
    pub fn directional_derivative(&self, u: &HClass) -> Result<Self> {
        if !same_lattice(&self.lattice, u.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        let mut out = Self::zero(&self.lattice);
        for (k, a) in &self.terms {
            out.insert(k.clone(), a * self.lattice.pair_int(k, u.coeffs()));
        }
        Ok(out)
    }

    /// Multiplies each coefficient by `(−1)^{(c² + κ·c)/2}`.
    pub fn twist(&self, c: &HClass) -> Result<Self> {
        if !same_lattice(&self.lattice, c.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        let c2 = c.square();
        let mut out = Self::zero(&self.lattice);
        for (k, a) in &self.terms {
            let e = &c2 + self.lattice.pair_int(k, c.coeffs());
            let half = to_i64(&e)
                .filter(|v| v.is_even())
                .ok_or_else(|| Error::OddTwist(format_coords(self.lattice.names(), k)))?
                / 2;
            let sign = if half.is_even() {
                Rational::one()
            } else {
                -Rational::one()
            };
            out.insert(k.clone(), a * sign);
        }
        Ok(out)
    }

    /// Re-expresses the kernel on the lattice where basis vector `old` is replaced by `old/divisor`.
    pub fn refine_lattice(&self, old: &HClass, divisor: i64, new_name: &str) -> Result<Self> {
        if !same_lattice(&self.lattice, old.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        let index = basis_index(old)
            .ok_or_else(|| Error::InvalidParameter(format!("{old} is not a basis vector")))?;
        let lattice = self.lattice.refine(index, divisor, new_name)?;
        Ok(self.transport(&lattice, |k| {
            let mut k = k.to_vec();
            k[index] *= divisor;
            k
        }))
    }

    /// Moves every term through `f` onto `lattice`.
    pub fn transport(
        &self,
        lattice: &Arc<IntersectionLattice>,
        f: impl Fn(&[i64]) -> Vec<i64>,
    ) -> Self {
        let mut out = Self::zero(lattice);
        for (k, a) in &self.terms {
            out.insert(f(k), a.clone());
        }
        out
    }

    /// Exact quotient `A / B` for exponents on one line through the origin.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        self.check(divisor)?;
        if divisor.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let nonzero = self
            .terms
            .keys()
            .chain(divisor.terms.keys())
            .find(|k| k.iter().any(|&x| x != 0));
        let Some(first) = nonzero else {
            let b = divisor.coefficient(&vec![0; self.lattice.rank()]);
            return Ok(self.scale(&b.recip()));
        };
        let dir = primitive(first);
        let to_laurent = |k: &Self| -> Result<BTreeMap<i64, Rational>> {
            k.terms
                .iter()
                .map(|(c, a)| Ok((multiple_of(c, &dir).ok_or(Error::NotCollinear)?, a.clone())))
                .collect()
        };
        let a = to_laurent(self)?;
        let b = to_laurent(divisor)?;
        let q = laurent_div(&a, &b)?;
        let mut out = Self::zero(&self.lattice);
        for (n, c) in q {
            out.insert(dir.iter().map(|d| d * n).collect(), c);
        }
        Ok(out)
    }

    /// `c·cosh(κ)` or `c·sinh(κ)` when the kernel has that shape.
    pub fn as_hyperbolic(&self) -> Option<(Rational, &'static str, Vec<i64>)> {
        if self.terms.len() != 2 {
            return None;
        }
        let (k, a) = self.terms.iter().next_back()?;
        let neg: Vec<i64> = k.iter().map(|x| -x).collect();
        let b = self.terms.get(&neg)?;
        let c = a * rat(2);
        if b == a {
            Some((c, "cosh", k.clone()))
        } else if *b == -a.clone() {
            Some((c, "sinh", k.clone()))
        } else {
            None
        }
    }

    /// Compact rendering: `2*cosh(k)` when hyperbolic, else the term sum.
    pub fn describe(&self) -> String {
        if let Some((c, f, k)) = self.as_hyperbolic() {
            let arg = format_coords(self.lattice.names(), &k);
            return if c.is_one() {
                format!("{f}({arg})")
            } else {
                format!("{}*{f}({arg})", format_rational(&c))
            };
        }
        self.to_string()
    }

    pub fn to_doc(&self) -> KernelDoc {
        KernelDoc {
            lattice: (*self.lattice).clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermDoc {
                    class: k.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &KernelDoc) -> Result<Self> {
        doc.lattice.validate()?;
        let lattice = Arc::new(doc.lattice.clone());
        Self::from_terms(
            &lattice,
            doc.terms.iter().map(|t| (t.class.clone(), t.coeff.clone())),
        )
    }
}

fn basis_index(c: &HClass) -> Option<usize> {
    let nz: Vec<usize> = (0..c.coeffs().len())
        .filter(|&i| c.coeffs()[i] != 0)
        .collect();
    (nz.len() == 1 && c.coeffs()[nz[0]] == 1).then(|| nz[0])
}

/// `v / gcd(v)`, with first nonzero coordinate positive.
fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, x| g.gcd(x));
    let lead = v.iter().find(|&&x| x != 0).copied().unwrap_or(1);
    let s = if lead < 0 { -g } else { g };
    v.iter().map(|x| x / s).collect()
}

fn multiple_of(v: &[i64], dir: &[i64]) -> Option<i64> {
    let i = dir.iter().position(|&d| d != 0)?;
    if v[i] % dir[i] != 0 {
        return None;
    }
    let n = v[i] / dir[i];
    v.iter().zip(dir).all(|(x, d)| *x == n * d).then_some(n)
}

/// Exact division of Laurent polynomials given as exponent maps.
fn laurent_div(
    a: &BTreeMap<i64, Rational>,
    b: &BTreeMap<i64, Rational>,
) -> Result<BTreeMap<i64, Rational>> {
    let mut q = BTreeMap::new();
    if a.is_empty() {
        return Ok(q);
    }
    let (&b_top, b_lead) = b.iter().next_back().expect("nonzero divisor");
    let b_low = *b.keys().next().expect("nonzero divisor");
    let a_low = *a.keys().next().expect("nonempty");
    let mut rem = a.clone();
    while let Some((&top, lead)) = rem.iter().next_back() {
        if top - b_top < a_low - b_low {
            return Err(Error::InexactDivision);
        }
        let shift = top - b_top;
        let c = lead / b_lead;
        for (e, bc) in b {
            let slot = rem.entry(e + shift).or_insert_with(Rational::zero);
            *slot -= &c * bc;
            if slot.is_zero() {
                rem.remove(&(e + shift));
            }
        }
        q.insert(shift, c);
    }
    Ok(q)
}

pub fn exp_c(k: &HClass) -> ExpKernel {
    let mut out = ExpKernel::zero(k.lattice());
    out.insert(k.coeffs().to_vec(), Rational::one());
    out
}

pub fn cosh_c(k: &HClass) -> ExpKernel {
    let mut out = ExpKernel::zero(k.lattice());
    out.insert(k.coeffs().to_vec(), frac(1, 2));
    out.insert(k.neg().coeffs().to_vec(), frac(1, 2));
    out
}

pub fn sinh_c(k: &HClass) -> ExpKernel {
    let mut out = ExpKernel::zero(k.lattice());
    out.insert(k.coeffs().to_vec(), frac(1, 2));
    out.insert(k.neg().coeffs().to_vec(), frac(-1, 2));
    out
}

impl fmt::Display for ExpKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let mag = format_rational(&c.abs());
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if k.iter().all(|&x| x == 0) {
                f.write_str(&mag)?;
            } else {
                write!(f, "{mag}*e^({})", format_coords(self.lattice.names(), k))?;
            }
        }
        Ok(())
    }
}

/// Serialized kernel: `{ "lattice": {...}, "terms": [{"class": [...], "coeff": "n/d"}] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelDoc {
    pub lattice: IntersectionLattice,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub class: Vec<i64>,
    #[serde(with = "crate::rational::serde_rational")]
    pub coeff: Rational,
}

impl Serialize for ExpKernel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpKernel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = KernelDoc::deserialize(d)?;
        Self::from_doc(&doc).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line() -> Arc<IntersectionLattice> {
        IntersectionLattice::from_ints(&["u"], &[vec![0]]).unwrap()
    }

    fn u(l: &Arc<IntersectionLattice>, k: i64) -> HClass {
        HClass::new(l, vec![k]).unwrap()
    }

    #[test]
    fn sinh_squared() {
        let l = line();
        let s = sinh_c(&u(&l, 1));
        let expected = ExpKernel::from_terms(
            &l,
            [
                (vec![2], frac(1, 4)),
                (vec![0], frac(-1, 2)),
                (vec![-2], frac(1, 4)),
            ],
        )
        .unwrap();
        assert_eq!(s.pow(2), expected);
        assert_eq!(s.mul(&ExpKernel::one(&l)).unwrap(), s);
    }

    #[test]
    fn cosh_product_is_blowup_average() {
        let l = IntersectionLattice::from_ints(&["e1", "e2"], &[vec![-1, 0], vec![0, -1]]).unwrap();
        let prod = cosh_c(&HClass::basis(&l, 0))
            .mul(&cosh_c(&HClass::basis(&l, 1)))
            .unwrap();
        let avg = ExpKernel::from_terms(
            &l,
            [(1, 1), (1, -1), (-1, 1), (-1, -1)].map(|(a, b)| (vec![a, b], frac(1, 4))),
        )
        .unwrap();
        assert_eq!(prod, avg);
    }

    #[test]
    fn constructors_at_zero() {
        let l = line();
        assert!(sinh_c(&u(&l, 0)).is_empty());
        assert_eq!(cosh_c(&u(&l, 0)), ExpKernel::one(&l));
        assert_eq!(exp_c(&u(&l, 3)).coefficient(&[3]), rat(1));
    }

    #[test]
    fn exact_div_examples() {
        let l = line();
        let q = sinh_c(&u(&l, 6)).exact_div(&sinh_c(&u(&l, 3))).unwrap();
        assert_eq!(q, exp_c(&u(&l, 3)).add(&exp_c(&u(&l, -3))).unwrap());
        let q = sinh_c(&u(&l, 3)).exact_div(&sinh_c(&u(&l, 1))).unwrap();
        let expected = ExpKernel::from_terms(&l, [2, 0, -2].map(|k| (vec![k], rat(1)))).unwrap();
        assert_eq!(q, expected);
        let num = sinh_c(&u(&l, 6)).pow(2);
        let den = sinh_c(&u(&l, 2)).mul(&sinh_c(&u(&l, 3))).unwrap();
        let q = num.exact_div(&den).unwrap();
        assert_eq!(q.len(), 6);
        assert_eq!(q.mul(&den).unwrap(), num);
    }

    #[test]
    fn exact_div_errors() {
        let l = line();
        assert_eq!(
            sinh_c(&u(&l, 1)).exact_div(&sinh_c(&u(&l, 2))),
            Err(Error::InexactDivision)
        );
        assert_eq!(
            sinh_c(&u(&l, 1)).exact_div(&ExpKernel::zero(&l)),
            Err(Error::DivisionByZero)
        );
        let plane = IntersectionLattice::from_ints(&["a", "b"], &[vec![0, 0], vec![0, 0]]).unwrap();
        let a = exp_c(&HClass::new(&plane, vec![1, 0]).unwrap());
        let b = exp_c(&HClass::new(&plane, vec![0, 1]).unwrap())
            .add(&ExpKernel::one(&plane))
            .unwrap();
        assert_eq!(a.exact_div(&b), Err(Error::NotCollinear));
        let c = ExpKernel::constant(&l, rat(6));
        assert_eq!(
            c.exact_div(&ExpKernel::constant(&l, rat(3))).unwrap(),
            ExpKernel::constant(&l, rat(2))
        );
    }

    #[test]
    fn twist_examples() {
        let l = IntersectionLattice::from_ints(&["f", "e1"], &[vec![0, 0], vec![0, -1]]).unwrap();
        let f = HClass::basis(&l, 0);
        let e = HClass::basis(&l, 1);
        let c = HClass::new(&l, vec![1, -2]).unwrap();
        for n in 2..=5 {
            let k = sinh_c(&f).pow(n - 2).mul(&cosh_c(&e)).unwrap();
            assert_eq!(k.twist(&HClass::zero(&l)).unwrap(), k);
            assert_eq!(k.twist(&c).unwrap(), k.scale(&rat(-1)));
        }
        let odd = cosh_c(&f).twist(&e);
        assert!(matches!(odd, Err(Error::OddTwist(_))));
    }

    #[test]
    fn sums_parity_and_derivative() {
        let l = line();
        let five = sinh_c(&u(&l, 5)).exact_div(&sinh_c(&u(&l, 1))).unwrap();
        assert_eq!(five.coeff_sum(), rat(5));
        assert_eq!(sinh_c(&u(&l, 2)).coeff_sum(), rat(0));
        assert_eq!(cosh_c(&u(&l, 1)).parity(), Parity::Even);
        assert_eq!(sinh_c(&u(&l, 1)).parity(), Parity::Odd);
        assert_eq!(
            sinh_c(&u(&l, 1)).add(&cosh_c(&u(&l, 1))).unwrap().parity(),
            Parity::Neither
        );
        assert!(cosh_c(&u(&l, 1))
            .directional_derivative(&u(&l, 1))
            .unwrap()
            .is_empty());
        let el = IntersectionLattice::from_ints(&["e1"], &[vec![-1]]).unwrap();
        let e1 = HClass::basis(&el, 0);
        assert_eq!(
            cosh_c(&e1).directional_derivative(&e1).unwrap(),
            sinh_c(&e1).scale(&rat(-1))
        );
    }

    #[test]
    fn refinement_examples() {
        let l = line();
        let f = HClass::basis(&l, 0);
        let r = sinh_c(&f).refine_lattice(&f, 2, "u_2").unwrap();
        assert_eq!(r.coefficient(&[2]), frac(1, 2));
        assert_eq!(r.lattice().gram()[0][0], rat(0));
        let twice = r
            .refine_lattice(&HClass::basis(r.lattice(), 0), 3, "u_6")
            .unwrap();
        let once = sinh_c(&f).refine_lattice(&f, 6, "u_6").unwrap();
        assert_eq!(twice, once);
        assert!(sinh_c(&f).refine_lattice(&f.scaled(2), 2, "x").is_err());
    }

    #[test]
    fn serialization_roundtrip() {
        let l = IntersectionLattice::from_ints(&["f", "e1"], &[vec![0, 0], vec![0, -1]]).unwrap();
        let k = sinh_c(&HClass::basis(&l, 0))
            .mul(&cosh_c(&HClass::basis(&l, 1)))
            .unwrap();
        let json = serde_json::to_string(&k).unwrap();
        assert!(json.contains("\"coeff\":\"-1/4\""));
        let back: ExpKernel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn describe_hyperbolic() {
        let l = IntersectionLattice::from_ints(&["k"], &[vec![2]]).unwrap();
        let k = HClass::basis(&l, 0);
        assert_eq!(cosh_c(&k).scale(&rat(2)).describe(), "2*cosh(k)");
        assert_eq!(sinh_c(&k).describe(), "sinh(k)");
        assert_eq!(ExpKernel::zero(&l).describe(), "0");
    }

    fn kernel_strategy() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
        prop::collection::vec((-3i64..=3, -3i64..=3, -4i64..=4), 0..5)
    }

    fn plane() -> Arc<IntersectionLattice> {
        IntersectionLattice::from_ints(&["a", "b"], &[vec![0, 1], vec![1, -2]]).unwrap()
    }

    fn build(l: &Arc<IntersectionLattice>, t: &[(i64, i64, i64)]) -> ExpKernel {
        ExpKernel::from_terms(l, t.iter().map(|&(a, b, c)| (vec![a, b], frac(c, 3)))).unwrap()
    }

    fn build_line(l: &Arc<IntersectionLattice>, t: &[(i64, i64, i64)]) -> ExpKernel {
        ExpKernel::from_terms(l, t.iter().map(|&(a, _, c)| (vec![2 * a], rat(c)))).unwrap()
    }

    proptest! {
        #[test]
        fn ring_axioms(a in kernel_strategy(), b in kernel_strategy(), c in kernel_strategy()) {
            let l = plane();
            let (a, b, c) = (build(&l, &a), build(&l, &b), build(&l, &c));
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.mul(&b).unwrap().coeff_sum(), a.coeff_sum() * b.coeff_sum());
        }

        #[test]
        fn division_inverts_multiplication(a in kernel_strategy(), b in kernel_strategy()) {
            let l = line();
            let (a, b) = (build_line(&l, &a), build_line(&l, &b));
            prop_assume!(!b.is_empty());
            prop_assert_eq!(a.mul(&b).unwrap().exact_div(&b).unwrap(), a);
        }

        #[test]
        fn twist_is_an_involution(a in kernel_strategy(), x in -2i64..=2, y in -2i64..=2) {
            let l = IntersectionLattice::from_ints(&["a", "b"], &[vec![0, 0], vec![0, -4]]).unwrap();
            let k = build(&l, &a);
            let c = HClass::new(&l, vec![2 * x, y]).unwrap();
            let t = k.twist(&c).unwrap();
            prop_assert_eq!(t.twist(&c).unwrap(), k.clone());
            for (class, coeff) in k.terms() {
                prop_assert_eq!(t.coefficient(class).abs(), coeff.abs());
            }
        }

        #[test]
        fn derivative_is_a_derivation(a in kernel_strategy(), b in kernel_strategy(), x in -2i64..=2, y in -2i64..=2) {
            let l = plane();
            let (a, b) = (build(&l, &a), build(&l, &b));
            let v = HClass::new(&l, vec![x, y]).unwrap();
            let lhs = a.mul(&b).unwrap().directional_derivative(&v).unwrap();
            let rhs = a.directional_derivative(&v).unwrap().mul(&b).unwrap()
                .add(&a.mul(&b.directional_derivative(&v).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn log_factor_is_even() {
        let l = line();
        for p in 1..=9 {
            for q in 1..=4 {
                let factor = sinh_c(&u(&l, p * q)).exact_div(&sinh_c(&u(&l, q))).unwrap();
                assert_eq!(factor.parity(), Parity::Even, "p={p} q={q}");
                assert_eq!(factor.len() as i64, p);
            }
        }
    }
}
