//! Seiberg–Witten basic-class maps and their behaviour under blowup, log
//! transform and taut rational blowdown; comparison with Donaldson kernels.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppoly::ExpKernel;
use crate::lattice::{
    format_coords, integral_pairing, is_characteristic, refined_name, same_lattice, Class,
    ConfigCp, HClass, IntersectionLattice,
};
use crate::rational::{frac, rat, Rational};
use crate::transform::{basis_multiple, blowdown_images, restrict_class, ManifoldSeries};

/// Support of `SW_X` on characteristic classes, with characteristic numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SWDoc", into = "SWDoc")]
pub struct SWMap {
    lattice: Arc<IntersectionLattice>,
    values: BTreeMap<Vec<i64>, i64>,
    euler: i64,
    signature: i64,
    b_plus: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SWDoc {
    lattice: IntersectionLattice,
    classes: Vec<SWEntry>,
    euler: i64,
    signature: i64,
    b_plus: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SWEntry {
    class: Vec<i64>,
    sw: i64,
}

impl TryFrom<SWDoc> for SWMap {
    type Error = Error;

    fn try_from(doc: SWDoc) -> Result<Self> {
        doc.lattice.validate()?;
        let lattice = Arc::new(doc.lattice);
        Self::new(
            &lattice,
            doc.classes.into_iter().map(|e| (e.class, e.sw)),
            doc.euler,
            doc.signature,
            doc.b_plus,
        )
    }
}

impl From<SWMap> for SWDoc {
    fn from(m: SWMap) -> Self {
        Self {
            lattice: (*m.lattice).clone(),
            classes: m
                .values
                .into_iter()
                .map(|(class, sw)| SWEntry { class, sw })
                .collect(),
            euler: m.euler,
            signature: m.signature,
            b_plus: m.b_plus,
        }
    }
}

impl SWMap {
    pub fn new(
        lattice: &Arc<IntersectionLattice>,
        values: impl IntoIterator<Item = (Vec<i64>, i64)>,
        euler: i64,
        signature: i64,
        b_plus: i64,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (class, v) in values {
            let c = HClass::new(lattice, class.clone())?;
            if !is_characteristic(lattice, &c) {
                return Err(Error::NotCharacteristic(c.to_string()));
            }
            if v != 0 {
                map.insert(class, v);
            }
        }
        Ok(Self {
            lattice: lattice.clone(),
            values: map,
            euler,
            signature,
            b_plus,
        })
    }

    pub fn lattice(&self) -> &Arc<IntersectionLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &BTreeMap<Vec<i64>, i64> {
        &self.values
    }

    pub fn value(&self, class: &[i64]) -> i64 {
        self.values.get(class).copied().unwrap_or(0)
    }

    pub fn euler(&self) -> i64 {
        self.euler
    }

    pub fn signature(&self) -> i64 {
        self.signature
    }

    pub fn b_plus(&self) -> i64 {
        self.b_plus
    }

    pub fn classes(&self) -> impl Iterator<Item = HClass> + '_ {
        self.values
            .keys()
            .map(|k| HClass::new(&self.lattice, k.clone()).expect("validated"))
    }

    /// Copy with one value replaced; used for negative controls.
    pub fn with_value(&self, class: &[i64], v: i64) -> Result<Self> {
        let mut values = self.values.clone();
        values.insert(class.to_vec(), v);
        Self::new(
            &self.lattice,
            values,
            self.euler,
            self.signature,
            self.b_plus,
        )
    }
}

impl fmt::Display for SWMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .rev()
            .map(|(k, v)| {
                let c = format_coords(self.lattice.names(), k);
                format!("{}: {v}", if c.is_empty() { "0".to_string() } else { c })
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `¼(L² − (3σ + 2e))`.
pub fn sw_dim(m: &SWMap, l: &HClass) -> Result<Rational> {
    if !same_lattice(&m.lattice, l.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    if !is_characteristic(&m.lattice, l) {
        return Err(Error::NotCharacteristic(l.to_string()));
    }
    Ok((l.square() - rat(3 * m.signature + 2 * m.euler)) / rat(4))
}

pub fn sw_simple_type(m: &SWMap) -> bool {
    m.classes()
        .all(|l| sw_dim(m, &l).map(|d| d.is_zero()).unwrap_or(false))
}

fn binomial(n: i64, k: i64) -> i64 {
    (0..k).fold(1i64, |c, i| c * (n - i) / (i + 1))
}

/// `SW((n−2−2r)f) = (−1)^r C(n−2, r)` with `f` the given fiber class.
pub fn sw_en_on(f: &HClass, n: i64) -> Result<SWMap> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "E({n}): n >= 2 required (b+ >= 3)"
        )));
    }
    let values = (0..=n - 2).map(|r| {
        let sign = if r % 2 == 0 { 1 } else { -1 };
        (
            f.scaled(n - 2 - 2 * r).coeffs().to_vec(),
            sign * binomial(n - 2, r),
        )
    });
    SWMap::new(f.lattice(), values, 12 * n, -8 * n, 2 * n - 1)
}

pub fn sw_en(n: i64) -> Result<SWMap> {
    let l = IntersectionLattice::from_ints(&["f"], &[vec![0]])?;
    sw_en_on(&HClass::basis(&l, 0), n)
}

/// One blowup per entry; entry `k` admits the classes `L ± (2j+1)e` for `j ≤ k` with `dim M_L − j(j+1) ≥ 0`.
pub fn sw_blowup(m: &SWMap, k_levels: &[i64]) -> Result<SWMap> {
    let mut cur = m.clone();
    for &k in k_levels {
        if k < 0 {
            return Err(Error::InvalidParameter(format!("blowup level {k} < 0")));
        }
        let lattice = &cur.lattice;
        let start = lattice
            .names()
            .iter()
            .filter_map(|n| n.strip_prefix('e').and_then(|d| d.parse::<usize>().ok()))
            .max()
            .unwrap_or(0)
            + 1;
        let extended = lattice.extend(&[format!("e{start}")], &[rat(-1)])?;
        let mut values = BTreeMap::new();
        for l in cur.classes() {
            let dim = sw_dim(&cur, &l)?;
            for j in 0..=k {
                if dim < rat(j * (j + 1)) {
                    break;
                }
                for sign in [1, -1] {
                    let mut c = l.coeffs().to_vec();
                    c.push(sign * (2 * j + 1));
                    values.insert(c, cur.value(l.coeffs()));
                }
            }
        }
        cur = SWMap::new(
            &extended,
            values,
            cur.euler + 1,
            cur.signature - 1,
            cur.b_plus,
        )?;
    }
    Ok(cur)
}

/// Keys `L + m·S_p`, `m ∈ {p−1, p−3, …, 1−p}`, each carrying `SW(L)`.
pub fn sw_log_transform(m: &SWMap, s: &HClass, p: i64) -> Result<SWMap> {
    if !same_lattice(&m.lattice, s.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    if p < 1 {
        return Err(Error::InvalidParameter(format!(
            "log transform order {p} < 1"
        )));
    }
    if !s.square().is_zero() {
        return Err(Error::InvalidParameter(format!("{s} has nonzero square")));
    }
    for l in m.classes() {
        if !l.dot(s)?.is_zero() {
            return Err(Error::NonOrthogonal(l.to_string(), s.to_string()));
        }
    }
    let (i, k) = basis_multiple(s).ok_or_else(|| {
        Error::InvalidParameter(format!("{s} is not a multiple of a basis vector"))
    })?;
    let d = p / num::integer::gcd(k, p);
    let refined = m
        .lattice
        .refine(i, d, &refined_name(&m.lattice.names()[i], d))?;
    let step = k * d / p;
    let mut values: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    let mut origin: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
    for (l, v) in &m.values {
        for j in 0..p {
            let shift = p - 1 - 2 * j;
            let mut c = l.clone();
            c[i] = c[i] * d + shift * step;
            if let Some(prev) = origin.get(&c) {
                if prev != l {
                    return Err(Error::Collision(format_coords(refined.names(), &c)));
                }
            }
            origin.insert(c.clone(), l.clone());
            values.insert(c, *v);
        }
    }
    SWMap::new(&refined, values, m.euler, m.signature, m.b_plus)
}

/// Every key orthogonal to `u_1..u_{p−2}` with `|key·u_{p−1}| ≤ p`.
pub fn sw_taut(m: &SWMap, c: &ConfigCp) -> Result<bool> {
    if !same_lattice(&m.lattice, c.ambient()) {
        return Err(Error::LatticeMismatch);
    }
    for l in m.classes() {
        let ints = c.intersections(&l)?;
        let (last, rest) = ints.split_last().expect("p >= 2");
        if rest.iter().any(|&x| x != 0) || last.abs() > c.p() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(m² − 1)(p − 1)/4` for odd `m`.
pub fn sw_dim_shift(p: i64, m: i64) -> Result<Rational> {
    if m % 2 == 0 {
        return Err(Error::InvalidParameter(format!("m = {m} must be odd")));
    }
    Ok(frac((m * m - 1) * (p - 1), 4))
}

/// Keys with `key·u_{p−1} = m·p`, `m` odd, survive with unchanged values.
pub fn sw_taut_blowdown(m: &SWMap, c: &ConfigCp) -> Result<SWMap> {
    if !sw_taut(m, c)? {
        return Err(Error::NotTaut(format!("C_{} is not SW-taut", c.p())));
    }
    let p = c.p();
    let mut kept = Vec::new();
    for l in m.classes().collect::<Vec<_>>().into_iter().rev() {
        let t = integral_pairing(&l, c.last())?;
        if t % p != 0 || (t / p) % 2 == 0 {
            continue;
        }
        let r = restrict_class(c, &l)?;
        if !r.extends() {
            return Err(Error::NonIntegralExtension(r.image.to_string()));
        }
        if !sw_dim_shift(p, t / p)?.is_zero() {
            return Err(Error::Semantic(format!("{l} would leave simple type")));
        }
        kept.push((m.value(l.coeffs()), r.image));
    }
    let images: Vec<_> = kept.iter().map(|(_, im)| im).collect();
    let (lattice, coords) = blowdown_images(c, &images)?;
    let values = kept.iter().zip(coords).map(|((v, _), c)| (c, *v));
    SWMap::new(
        &lattice,
        values,
        m.euler - (p - 1),
        m.signature + (p - 1),
        m.b_plus,
    )
}

/// `c(X) = 2 + (7e + 11σ)/4`.
pub fn witten_exponent(euler: i64, signature: i64) -> Result<i64> {
    let num = 7 * euler + 11 * signature;
    if num % 4 != 0 {
        return Err(Error::NonIntegral(format!(
            "(7e + 11 sign)/4 with e={euler}, sign={signature}"
        )));
    }
    Ok(2 + num / 4)
}

/// The exponent in the form `3σ + 2e − (b⁺ − 3)/2`.
pub fn printed_witten_exponent(euler: i64, signature: i64, b_plus: i64) -> Rational {
    rat(3 * signature + 2 * euler) - frac(b_plus - 3, 2)
}

fn pow2(c: i64) -> Rational {
    let v = Rational::from_integer(BigInt::from(2).pow(c.unsigned_abs() as u32));
    if c < 0 {
        v.recip()
    } else {
        v
    }
}

/// `2^{c(X)} Σ SW(κ) e^κ`.
pub fn witten_kernel(m: &SWMap) -> Result<ExpKernel> {
    let c = witten_exponent(m.euler, m.signature)?;
    let scale = pow2(c);
    ExpKernel::from_terms(
        &m.lattice,
        m.values.iter().map(|(k, v)| (k.clone(), rat(*v) * &scale)),
    )
}

/// Donaldson kernel equals the Witten kernel and the basic classes coincide.
pub fn witten_check(d: &ManifoldSeries, m: &SWMap) -> Result<bool> {
    if !same_lattice(d.lattice(), &m.lattice) {
        return Err(Error::LatticeMismatch);
    }
    if (d.euler(), d.signature(), d.b_plus()) != (m.euler, m.signature, m.b_plus) {
        return Err(Error::InvalidParameter(format!(
            "characteristic numbers differ: ({}, {}, {}) vs ({}, {}, {})",
            d.euler(),
            d.signature(),
            d.b_plus(),
            m.euler,
            m.signature,
            m.b_plus
        )));
    }
    let same_support = d.kernel().terms().keys().eq(m.values.keys());
    Ok(same_support && witten_kernel(m)? == *d.kernel())
}

impl SWMap {
    /// `L²` per key.
    pub fn squares(&self) -> BTreeMap<Vec<i64>, Rational> {
        self.classes()
            .map(|c| (c.coeffs().to_vec(), c.square()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exppoly::sinh_c;
    use crate::transform::{blowup, log_transform};

    fn en_series(n: i64) -> ManifoldSeries {
        let l = IntersectionLattice::from_ints(&["f"], &[vec![0]]).unwrap();
        ManifoldSeries::new(
            sinh_c(&HClass::basis(&l, 0)).pow((n - 2) as u32),
            12 * n,
            -8 * n,
            2 * n - 1,
        )
        .unwrap()
    }

    #[test]
    fn en_values() {
        assert_eq!(sw_en(2).unwrap().values(), &BTreeMap::from([(vec![0], 1)]));
        assert_eq!(
            sw_en(3).unwrap().values(),
            &BTreeMap::from([(vec![1], 1), (vec![-1], -1)])
        );
        assert_eq!(
            sw_en(4).unwrap().values(),
            &BTreeMap::from([(vec![2], 1), (vec![0], -2), (vec![-2], 1)])
        );
        assert!(sw_en(1).is_err());
        for n in 2..=6 {
            assert!(sw_simple_type(&sw_en(n).unwrap()));
        }
    }

    #[test]
    fn dims() {
        let e2 = sw_en(2).unwrap();
        assert_eq!(sw_dim(&e2, &HClass::zero(e2.lattice())).unwrap(), rat(0));
        let e3 = sw_en(3).unwrap();
        assert_eq!(
            sw_dim(&e3, &HClass::basis(e3.lattice(), 0)).unwrap(),
            rat(0)
        );
        let b = sw_blowup(&e2, &[0]).unwrap();
        assert_eq!((b.euler(), b.signature()), (25, -17));
        assert_eq!(
            sw_dim(&b, &HClass::new(b.lattice(), vec![0, 1]).unwrap()).unwrap(),
            rat(0)
        );
        let l = IntersectionLattice::from_ints(&["a"], &[vec![2]]).unwrap();
        let m = SWMap::new(&l, [(vec![0], 1)], 24, -16, 3).unwrap();
        assert!(sw_simple_type(&m));
        let l1 = IntersectionLattice::from_ints(&["a"], &[vec![1]]).unwrap();
        let m = SWMap::new(&l1, [(vec![1], 1)], 24, -16, 3).unwrap();
        assert!(!sw_simple_type(&m));
        let empty = SWMap::new(&l, [], 24, -16, 3).unwrap();
        assert!(sw_simple_type(&empty));
    }

    #[test]
    fn blowups() {
        let b = sw_blowup(&sw_en(2).unwrap(), &[0]).unwrap();
        assert_eq!(
            b.values(),
            &BTreeMap::from([(vec![0, 1], 1), (vec![0, -1], 1)])
        );
        let b = sw_blowup(&sw_en(3).unwrap(), &[1, 1]).unwrap();
        assert_eq!(b.values().len(), 8);
        assert!(sw_simple_type(&b));
        for (k, v) in b.values() {
            assert_eq!(*v, k[0]);
        }
        let d = blowup(&blowup(&en_series(3), 1).unwrap(), 1).unwrap();
        assert!(witten_check(&d, &b).unwrap());
    }

    #[test]
    fn log_transforms() {
        let e2 = sw_en(2).unwrap();
        let f = HClass::basis(e2.lattice(), 0);
        let t = sw_log_transform(&e2, &f, 3).unwrap();
        assert_eq!(
            t.values(),
            &BTreeMap::from([(vec![2], 1), (vec![0], 1), (vec![-2], 1)])
        );
        assert_eq!(t.lattice().names(), &["f_3"]);
        let t = sw_log_transform(&e2, &f, 2).unwrap();
        assert_eq!(t.values(), &BTreeMap::from([(vec![1], 1), (vec![-1], 1)]));
        let e3 = sw_en(3).unwrap();
        let t = sw_log_transform(&e3, &HClass::basis(e3.lattice(), 0), 2).unwrap();
        assert_eq!(
            t.values(),
            &BTreeMap::from([(vec![3], 1), (vec![1], 1), (vec![-1], -1), (vec![-3], -1)])
        );
        assert_eq!(t.values().len(), 2 * e3.values().len());
        assert!(sw_simple_type(&t));
    }

    #[test]
    fn log_collision_detected() {
        let l = IntersectionLattice::from_ints(&["f"], &[vec![0]]).unwrap();
        let m = SWMap::new(&l, [(vec![2], 1), (vec![0], 1)], 48, -32, 7).unwrap();
        assert_eq!(
            sw_log_transform(&m, &HClass::basis(&l, 0), 3)
                .unwrap()
                .values()
                .len(),
            6
        );
        assert!(matches!(
            sw_log_transform(&m, &HClass::basis(&l, 0).scaled(2), 2),
            Err(Error::Collision(_))
        ));
    }

    #[test]
    fn dim_shift() {
        assert_eq!(sw_dim_shift(5, 1).unwrap(), rat(0));
        assert_eq!(sw_dim_shift(5, -1).unwrap(), rat(0));
        assert_eq!(sw_dim_shift(2, 3).unwrap(), rat(2));
        assert!(sw_dim_shift(3, 2).is_err());
    }

    #[test]
    fn e4_section() {
        let l = IntersectionLattice::from_ints(&["f", "s1"], &[vec![0, 1], vec![1, -4]]).unwrap();
        let m = sw_en_on(&HClass::basis(&l, 0), 4).unwrap();
        let c = ConfigCp::new(2, &l, vec![HClass::basis(&l, 1)]).unwrap();
        let out = sw_taut_blowdown(&m, &c).unwrap();
        assert_eq!(out.values(), &BTreeMap::from([(vec![1], 1), (vec![-1], 1)]));
        assert_eq!(out.lattice().gram()[0][0], rat(1));
        assert_eq!((out.euler(), out.signature()), (47, -31));
        for (k, sq) in out.squares() {
            assert_eq!(sq, rat(1), "{k:?}");
        }
        let l = IntersectionLattice::from_ints(&["f", "s"], &[vec![0, 1], vec![1, -4]]).unwrap();
        let m = SWMap::new(&l, [(vec![0, 0], 1)], 48, -32, 7).unwrap();
        let c = ConfigCp::new(2, &l, vec![HClass::basis(&l, 1)]).unwrap();
        assert!(sw_taut_blowdown(&m, &c).unwrap().values().is_empty());
    }

    #[test]
    fn exponent_forms() {
        assert_eq!(witten_exponent(24, -16).unwrap(), 0);
        assert_eq!(witten_exponent(36, -24).unwrap(), -1);
        for n in 2..=10 {
            assert_eq!(witten_exponent(12 * n, -8 * n).unwrap(), 2 - n);
        }
        for (e, s) in [
            (24, -16),
            (48 - 3, -32 + 3),
            (11 * 5 + 3, -7 * 5 - 3),
            (10 * 6 + 6, -6 * 6 - 6),
        ] {
            let b = (e + s - 2) / 2;
            assert_eq!(
                printed_witten_exponent(e, s, b),
                rat(witten_exponent(e, s).unwrap())
            );
        }
        assert!(witten_exponent(1, 0).is_err());
    }

    #[test]
    fn witten_en_and_log() {
        for n in 2..=6 {
            assert!(witten_check(&en_series(n), &sw_en(n).unwrap()).unwrap());
        }
        assert_eq!(
            witten_kernel(&sw_en(3).unwrap()).unwrap(),
            en_series(3).kernel().clone()
        );
        let d = en_series(2);
        let dl = log_transform(&d, &HClass::basis(d.lattice(), 0), 3).unwrap();
        let s = sw_en(2).unwrap();
        let sl = sw_log_transform(&s, &HClass::basis(s.lattice(), 0), 3).unwrap();
        assert!(witten_check(&dl, &sl).unwrap());
        let bad = sl.with_value(&[0], 2).unwrap();
        assert!(!witten_check(&dl, &bad).unwrap());
    }

    #[test]
    fn serialization() {
        let s = sw_en(4).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"classes\":[{\"class\":[-2],\"sw\":1}"));
        let back: SWMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
