//! Surgery transforms on Donaldson kernels: blowup, log transform, rational
//! blowdown of taut, nodal and `-4`-sphere configurations.
//!
//! Every blowdown goes through the same two steps. Each kernel class κ is
//! restricted to the configuration and extended across the rational ball
//! ([`restrict_class`]); the extended classes are then written in a basis of
//! the blown-down lattice built from the surviving images and the ambient
//! directions orthogonal to the configuration.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppoly::{cosh_c, sinh_c, ExpKernel, KernelDoc};
use crate::lattice::{
    format_coords, integral_pairing, is_characteristic, plumbing_inverse, refined_name,
    same_lattice, Class, ConfigCp, HClass, IntersectionLattice, QClass, Zmod,
};
use crate::rational::{self, format_rational, rat, to_i64, Matrix, Rational};

/// A Donaldson series `exp(Q/2)·K` with characteristic numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeriesDoc", into = "SeriesDoc")]
pub struct ManifoldSeries {
    kernel: ExpKernel,
    euler: i64,
    signature: i64,
    b_plus: i64,
    simple_type: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SeriesDoc {
    kernel: KernelDoc,
    euler: i64,
    signature: i64,
    b_plus: i64,
    #[serde(default = "default_true")]
    simple_type: bool,
}

fn default_true() -> bool {
    true
}

impl TryFrom<SeriesDoc> for ManifoldSeries {
    type Error = Error;

    fn try_from(doc: SeriesDoc) -> Result<Self> {
        let kernel = ExpKernel::from_doc(&doc.kernel)?;
        Self::new(kernel, doc.euler, doc.signature, doc.b_plus)
    }
}

impl From<ManifoldSeries> for SeriesDoc {
    fn from(m: ManifoldSeries) -> Self {
        Self {
            kernel: m.kernel.to_doc(),
            euler: m.euler,
            signature: m.signature,
            b_plus: m.b_plus,
            simple_type: m.simple_type,
        }
    }
}

impl ManifoldSeries {
    /// Rejects even or small `b⁺` and non-characteristic kernel classes.
    pub fn new(kernel: ExpKernel, euler: i64, signature: i64, b_plus: i64) -> Result<Self> {
        if b_plus < 3 || b_plus % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "b+ = {b_plus} must be odd and at least 3"
            )));
        }
        for c in kernel.classes() {
            if !is_characteristic(kernel.lattice(), &c) {
                return Err(Error::NotCharacteristic(c.to_string()));
            }
        }
        Ok(Self {
            kernel,
            euler,
            signature,
            b_plus,
            simple_type: true,
        })
    }

    pub fn kernel(&self) -> &ExpKernel {
        &self.kernel
    }

    pub fn lattice(&self) -> &Arc<IntersectionLattice> {
        self.kernel.lattice()
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

    pub fn simple_type(&self) -> bool {
        self.simple_type
    }

    /// Same characteristic numbers, new kernel.
    pub fn with_kernel(&self, kernel: ExpKernel) -> Result<Self> {
        Self::new(kernel, self.euler, self.signature, self.b_plus)
    }

    /// `c_1² = 3σ + 2e`.
    pub fn c1_squared(&self) -> i64 {
        3 * self.signature + 2 * self.euler
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapStatus {
    Kept,
    Dropped,
}

/// One source class of a blowdown and what became of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMapEntry {
    pub source: String,
    pub source_coords: Vec<i64>,
    pub extension: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub square: Rational,
    pub boundary: Zmod,
    pub image: Option<String>,
    pub image_coords: Option<Vec<i64>>,
    pub status: MapStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowdownResult {
    pub series: ManifoldSeries,
    pub class_map: Vec<ClassMapEntry>,
}

/// Re-expresses `c` on a lattice whose leading basis vectors are those of `c`'s lattice.
pub fn embed_class(c: &HClass, lattice: &Arc<IntersectionLattice>) -> Result<HClass> {
    let src = c.lattice();
    let n = src.rank();
    if lattice.rank() < n || lattice.names()[..n] != src.names()[..] {
        return Err(Error::LatticeMismatch);
    }
    if (0..n).any(|i| lattice.gram()[i][..n] != src.gram()[i][..]) {
        return Err(Error::LatticeMismatch);
    }
    let mut coeffs = c.coeffs().to_vec();
    coeffs.resize(lattice.rank(), 0);
    HClass::new(lattice, coeffs)
}

fn next_exceptional_index(lattice: &IntersectionLattice) -> usize {
    lattice
        .names()
        .iter()
        .filter_map(|n| n.strip_prefix('e').and_then(|d| d.parse::<usize>().ok()))
        .max()
        .unwrap_or(0)
        + 1
}

/// `M # k·CP̄²`: new classes `e_i` with `e_i² = -1`, kernel times `Π cosh(e_i)`.
pub fn blowup(m: &ManifoldSeries, k: usize) -> Result<ManifoldSeries> {
    let lattice = m.lattice();
    let start = next_exceptional_index(lattice);
    let names: Vec<String> = (0..k).map(|i| format!("e{}", start + i)).collect();
    let extended = lattice.extend(&names, &vec![rat(-1); k])?;
    let r = lattice.rank();
    let mut kernel = m.kernel.transport(&extended, |c| {
        let mut v = c.to_vec();
        v.resize(r + k, 0);
        v
    });
    for i in 0..k {
        kernel = kernel.mul(&cosh_c(&HClass::basis(&extended, r + i)))?;
    }
    ManifoldSeries::new(kernel, m.euler + k as i64, m.signature - k as i64, m.b_plus)
}

fn check_lattice(m: &ManifoldSeries, c: &HClass) -> Result<()> {
    if same_lattice(m.lattice(), c.lattice()) {
        Ok(())
    } else {
        Err(Error::LatticeMismatch)
    }
}

/// Kernel classes κ with `2·points - 2 < u² + |κ·u|`.
pub fn check_adjunction(
    m: &ManifoldSeries,
    u: &HClass,
    positive_double_points: i64,
) -> Result<Vec<HClass>> {
    check_lattice(m, u)?;
    if u.is_zero() {
        return Err(Error::InvalidParameter(
            "adjunction needs a nonzero class".into(),
        ));
    }
    let bound = rat(2 * positive_double_points - 2);
    let u2 = u.square();
    Ok(m.kernel
        .classes()
        .filter(|k| &u2 + k.dot(u).expect("same lattice").abs() > bound)
        .collect())
}

/// For an embedded sphere `u` without positive double points, checks
/// `Σ a_s e^{κ_s+u} − (−1)^{(1+b⁺)/2} Σ a_s e^{−κ_s−u} = 0` over the violators with `κ_s·u = −u²`.
pub fn check_sphere_relation(m: &ManifoldSeries, u: &HClass) -> Result<bool> {
    let violators = check_adjunction(m, u, 0)?;
    let u2 = u.square();
    let sign = if ((1 + m.b_plus) / 2) % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    };
    let mut relation = ExpKernel::zero(m.lattice());
    for k in &violators {
        let ku = k.dot(u)?;
        if ku.abs() != u2.abs() {
            return Err(Error::SphereRelation(format!(
                "{k} . {u} = {}, expected ±{}",
                format_rational(&ku),
                format_rational(&u2.abs())
            )));
        }
        if ku == -u2.clone() {
            let a = m.kernel.coefficient(k.coeffs());
            let plus = k.add(u)?;
            let minus = plus.neg();
            relation.insert(plus.coeffs().to_vec(), a.clone());
            relation.insert(minus.coeffs().to_vec(), -(&sign * a));
        }
    }
    Ok(relation.is_empty())
}

/// `u_i·κ = 0` for `i ≤ p−2` and `|u_{p−1}·κ| ≤ p` on every kernel class.
pub fn check_taut(m: &ManifoldSeries, c: &ConfigCp) -> Result<bool> {
    if !same_lattice(m.lattice(), c.ambient()) {
        return Err(Error::LatticeMismatch);
    }
    let p = c.p();
    for k in m.kernel.classes() {
        let ints = c.intersections(&k)?;
        let (last, rest) = ints.split_last().expect("p >= 2");
        if rest.iter().any(|&x| x != 0) || last.abs() > p {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The extension `κ̄ = κ + Σ x_i u_i` of κ across the rational ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub p: i64,
    pub image: QClass,
    pub square: Rational,
    pub boundary: Zmod,
    pub x: Vec<Rational>,
}

impl Restriction {
    pub fn extends(&self) -> bool {
        self.boundary.is_multiple_of(self.p)
    }

    /// `p·x_{p−1}`, an integer exactly when the class extends.
    pub fn level(&self) -> Rational {
        rat(self.p) * self.x.last().expect("p >= 2")
    }
}

/// Solves `P x = −(κ·u_j)_j`.
pub fn restrict_class(c: &ConfigCp, kappa: &HClass) -> Result<Restriction> {
    restrict_with(c, &ScaledInverse::new(c.p())?, kappa)
}

/// `p²·P⁻¹` as an integer matrix.
pub(crate) struct ScaledInverse {
    p2: i64,
    m: Vec<Vec<i64>>,
}

impl ScaledInverse {
    pub(crate) fn new(p: i64) -> Result<Self> {
        Ok(Self {
            p2: p * p,
            m: crate::lattice::plumbing_inverse_scaled(p)?,
        })
    }

    /// `p²·x` with `P x = rhs`.
    fn solve_scaled(&self, rhs: &[i64]) -> Vec<i64> {
        self.m
            .iter()
            .map(|row| row.iter().zip(rhs).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// [`restrict_class`] with `P⁻¹` supplied; `image² = κ² + x·(κ·u)`.
pub(crate) fn restrict_with(
    c: &ConfigCp,
    pinv: &ScaledInverse,
    kappa: &HClass,
) -> Result<Restriction> {
    let p = c.p();
    let p2 = pinv.p2;
    let ints = c.intersections(kappa)?;
    let rhs: Vec<i64> = ints.iter().map(|&v| -v).collect();
    let xs = pinv.solve_scaled(&rhs);
    let mut scaled: Vec<i64> = kappa.coeffs().iter().map(|&v| v * p2).collect();
    for (u, &xi) in c.spheres().iter().zip(&xs) {
        if xi == 0 {
            continue;
        }
        for (k, &uk) in u.coeffs().iter().enumerate() {
            scaled[k] += xi * uk;
        }
    }
    let image = QClass::new(
        c.ambient(),
        scaled.iter().map(|&v| rational::frac(v, p2)).collect(),
    )?;
    let xw: i64 = xs.iter().zip(&ints).map(|(x, w)| x * w).sum();
    let square = kappa.square() + rational::frac(xw, p2);
    let x = xs.iter().map(|&v| rational::frac(v, p2)).collect();
    let b: i64 = ints
        .iter()
        .enumerate()
        .map(|(j, v)| (j as i64 + 1) * v)
        .sum();
    Ok(Restriction {
        p,
        image,
        square,
        boundary: Zmod::new(b, p * p),
        x,
    })
}

struct Pending {
    source: HClass,
    restriction: Restriction,
    coeff: Option<Rational>,
}

struct Reduced {
    lattice: Arc<IntersectionLattice>,
    coords: Vec<Vec<i64>>,
}

fn bigint_to_i64(b: &BigInt) -> Result<i64> {
    i64::try_from(b).map_err(|_| Error::InvalidParameter("coordinate overflow".into()))
}

/// Basis and coordinates for the blown-down lattice.
fn blowdown_lattice(config: &ConfigCp, images: &[&QClass]) -> Result<Reduced> {
    let ambient = config.ambient();
    let r = ambient.rank();
    let g = ambient.gram();
    let target = r - config.spheres().len();
    let sphere_rows: Matrix = config
        .spheres()
        .iter()
        .map(|u| {
            (0..r)
                .map(|i| (0..r).fold(Rational::zero(), |s, j| s + &g[i][j] * rat(u.coeffs()[j])))
                .collect()
        })
        .collect();
    let orth: Vec<usize> = (0..r)
        .filter(|&i| sphere_rows.iter().all(|row| row[i].is_zero()))
        .collect();
    let inside = images
        .iter()
        .all(|im| (0..r).all(|i| orth.contains(&i) || im.coeffs()[i].is_zero()));

    if inside && orth.len() == target {
        let d: Vec<i64> = orth
            .iter()
            .map(|&i| {
                bigint_to_i64(&rational::lcm_denominators(
                    images.iter().map(|im| &im.coeffs()[i]),
                ))
            })
            .collect::<Result<_>>()?;
        let names: Vec<String> = orth
            .iter()
            .zip(&d)
            .map(|(&i, &di)| refined_name(&ambient.names()[i], di))
            .collect();
        let gram: Matrix = orth
            .iter()
            .zip(&d)
            .map(|(&i, &di)| {
                orth.iter()
                    .zip(&d)
                    .map(|(&j, &dj)| &g[i][j] / rat(di * dj))
                    .collect()
            })
            .collect();
        let lattice = IntersectionLattice::new(names, gram)?;
        let coords = images
            .iter()
            .map(|im| {
                orth.iter()
                    .zip(&d)
                    .map(|(&i, &di)| {
                        to_i64(&(&im.coeffs()[i] * rat(di)))
                            .ok_or(Error::NonIntegralExtension(im.to_string()))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        return Ok(Reduced { lattice, coords });
    }

    let unit = |i: usize| -> Vec<Rational> {
        (0..r)
            .map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    };
    let mut span: Matrix = orth.iter().map(|&i| unit(i)).collect();
    let mut chosen: Vec<Vec<Rational>> = Vec::new();
    for im in images {
        if span.len() == target {
            break;
        }
        let mut trial = span.clone();
        trial.push(im.coeffs().to_vec());
        if rational::rank(&trial) > span.len() {
            span = trial;
            chosen.push(im.coeffs().to_vec());
        }
    }
    let mut extra: Vec<Vec<Rational>> = Vec::new();
    if span.len() < target {
        for v in rational::integer_nullspace(&sphere_rows, r) {
            let v: Vec<Rational> = v.into_iter().map(Rational::from_integer).collect();
            let mut trial = span.clone();
            trial.push(v.clone());
            if rational::rank(&trial) > span.len() {
                span = trial;
                extra.push(v);
            }
        }
    }

    let orth_names: Vec<String> = orth.iter().map(|&i| ambient.names()[i].clone()).collect();
    let fresh = |base: String, taken: &[String]| {
        let mut n = base;
        while taken.contains(&n) {
            n.push('\'');
        }
        n
    };
    let mut names: Vec<String> = Vec::new();
    for i in 0..chosen.len() {
        let base = if chosen.len() == 1 {
            "k".to_string()
        } else {
            format!("k{}", i + 1)
        };
        let taken: Vec<String> = orth_names.iter().chain(&names).cloned().collect();
        names.push(fresh(base, &taken));
    }
    names.extend(orth_names.iter().cloned());
    for i in 0..extra.len() {
        let taken = names.clone();
        names.push(fresh(format!("w{}", i + 1), &taken));
    }
    let basis: Vec<Vec<Rational>> = chosen
        .into_iter()
        .chain(orth.iter().map(|&i| unit(i)))
        .chain(extra)
        .collect();
    let basis = saturate(&basis, images)?;
    let gram: Matrix = basis
        .iter()
        .map(|a| basis.iter().map(|b| ambient.pair_rational(a, b)).collect())
        .collect();
    let lattice = IntersectionLattice::new(names, gram)?;
    let columns = rational::transpose(&basis);
    let coords = images
        .iter()
        .map(|im| {
            let sol = rational::solve_unique(&columns, im.coeffs())?.ok_or_else(|| {
                Error::NonIntegralExtension(format!("{im} is outside the blown-down lattice"))
            })?;
            sol.iter()
                .map(|c| to_i64(c).ok_or_else(|| Error::NonIntegralExtension(im.to_string())))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(Reduced { lattice, coords })
}

/// A basis of the group generated by `basis` and `images`, equal to `basis` when every image is already integral in it.
fn saturate(basis: &[Vec<Rational>], images: &[&QClass]) -> Result<Vec<Vec<Rational>>> {
    let m = basis.len();
    let columns = rational::transpose(&basis.to_vec());
    let mut gens: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for im in images {
        let c = rational::solve_unique(&columns, im.coeffs())?.ok_or_else(|| {
            Error::NonIntegralExtension(format!("{im} is outside the blown-down lattice"))
        })?;
        gens.push(c);
    }
    let d = Rational::from_integer(rational::lcm_denominators(gens.iter().flatten()));
    let ints: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| g.iter().map(|x| (x * &d).to_integer()).collect())
        .collect();
    let h = hermite_rows(ints, m);
    Ok(h.iter()
        .map(|row| {
            let mut v = vec![Rational::zero(); basis[0].len()];
            for (k, c) in row.iter().enumerate() {
                let c = Rational::from_integer(c.clone()) / &d;
                for (vi, bi) in v.iter_mut().zip(&basis[k]) {
                    *vi += &c * bi;
                }
            }
            v
        })
        .collect())
}

/// Row Hermite normal form of a full-rank integer generating set: `cols` basis rows.
fn hermite_rows(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    use num::Integer;
    let mut out = Vec::with_capacity(cols);
    for c in 0..cols {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz
                .iter()
                .min_by_key(|&&r| rows[r][c].abs())
                .expect("nonempty");
            for &r in &nz {
                if r != piv {
                    let q = rows[r][c].div_floor(&rows[piv][c]);
                    let prow = rows[piv].clone();
                    for (x, y) in rows[r].iter_mut().zip(&prow) {
                        *x -= &q * y;
                    }
                }
            }
        }
        let piv = (0..rows.len())
            .find(|&r| !rows[r][c].is_zero())
            .expect("full rank");
        let mut row = rows.swap_remove(piv);
        if row[c].is_negative() {
            row.iter_mut().for_each(|x| *x = -x.clone());
        }
        for prev in out.iter_mut() {
            let prev: &mut Vec<BigInt> = prev;
            let q = prev[c].div_floor(&row[c]);
            for (x, y) in prev.iter_mut().zip(&row) {
                *x -= &q * y;
            }
        }
        out.push(row);
    }
    out
}

/// Blown-down lattice and integral coordinates for extended classes (shared with the SW side).
pub(crate) fn blowdown_images(
    config: &ConfigCp,
    images: &[&QClass],
) -> Result<(Arc<IntersectionLattice>, Vec<Vec<i64>>)> {
    let r = blowdown_lattice(config, images)?;
    Ok((r.lattice, r.coords))
}

/// Builds the blown-down series from restricted classes; `None` coefficients are dropped.
fn assemble(
    config: &ConfigCp,
    pending: Vec<Pending>,
    m: &ManifoldSeries,
) -> Result<BlowdownResult> {
    let kept: Vec<&QClass> = pending
        .iter()
        .filter(|e| e.coeff.is_some())
        .map(|e| &e.restriction.image)
        .collect();
    let reduced = blowdown_lattice(config, &kept)?;
    let mut kernel = ExpKernel::zero(&reduced.lattice);
    let mut coords = reduced.coords.into_iter();
    let mut class_map = Vec::with_capacity(pending.len());
    for e in pending {
        let image_coords = match &e.coeff {
            Some(c) => {
                let v = coords.next().expect("one coordinate vector per kept class");
                kernel.insert(v.clone(), c.clone());
                Some(v)
            }
            None => None,
        };
        class_map.push(ClassMapEntry {
            source: e.source.to_string(),
            source_coords: e.source.coeffs().to_vec(),
            extension: e.restriction.image.to_string(),
            square: e.restriction.square.clone(),
            boundary: e.restriction.boundary,
            image: image_coords
                .as_ref()
                .map(|v| format_coords(reduced.lattice.names(), v)),
            image_coords,
            status: if e.coeff.is_some() {
                MapStatus::Kept
            } else {
                MapStatus::Dropped
            },
        });
    }
    let q = config.p() - 1;
    let series = ManifoldSeries::new(kernel, m.euler - q, m.signature + q, m.b_plus)?;
    Ok(BlowdownResult { series, class_map })
}

fn pow2(k: i64) -> Rational {
    Rational::from_integer(BigInt::from(2).pow(k as u32))
}

/// Taut blowdown: keeps classes with `|u_{p−1}·κ| = p`, coefficients times `2^{p−1}`.
pub fn taut_blowdown(m: &ManifoldSeries, c: &ConfigCp) -> Result<BlowdownResult> {
    if !check_taut(m, c)? {
        return Err(Error::NotTaut(format!(
            "configuration C_{} is not taut for this kernel",
            c.p()
        )));
    }
    let p = c.p();
    let factor = pow2(p - 1);
    let pinv = ScaledInverse::new(p)?;
    let mut pending = Vec::new();
    for (class, a) in m.kernel.terms().iter().rev() {
        let source = HClass::new(m.lattice(), class.clone())?;
        let restriction = restrict_with(c, &pinv, &source)?;
        let keep = integral_pairing(&source, c.last())?.abs() == p;
        if keep && !restriction.extends() {
            return Err(Error::NonIntegralExtension(restriction.image.to_string()));
        }
        let coeff = keep.then(|| a * &factor);
        pending.push(Pending {
            source,
            restriction,
            coeff,
        });
    }
    assemble(c, pending, m)
}

/// Blowdown of a single `-4`-sphere σ: kernel `K − twist(K, σ)`, then extend.
pub fn p2_blowdown(m: &ManifoldSeries, sigma: &HClass) -> Result<BlowdownResult> {
    check_lattice(m, sigma)?;
    let config = ConfigCp::new(2, m.lattice(), vec![sigma.clone()])?;
    let diff = m.kernel.sub(&m.kernel.twist(sigma)?)?;
    let pinv = ScaledInverse::new(2)?;
    let mut pending = Vec::new();
    for class in m.kernel.terms().keys().rev() {
        let source = HClass::new(m.lattice(), class.clone())?;
        let restriction = restrict_with(&config, &pinv, &source)?;
        let a = diff.coefficient(class);
        let coeff = (!a.is_zero()).then_some(a);
        if coeff.is_some() && !restriction.extends() {
            return Err(Error::NonIntegralExtension(restriction.image.to_string()));
        }
        pending.push(Pending {
            source,
            restriction,
            coeff,
        });
    }
    assemble(&config, pending, m)
}

/// A nonzero multiple `k·b_i` of a basis vector, as `(i, k)`.
pub(crate) fn basis_multiple(s: &HClass) -> Option<(usize, i64)> {
    let nz: Vec<usize> = (0..s.coeffs().len())
        .filter(|&i| s.coeffs()[i] != 0)
        .collect();
    (nz.len() == 1).then(|| (nz[0], s.coeffs()[nz[0]]))
}

fn check_log_hypotheses(m: &ManifoldSeries, s: &HClass, p: i64) -> Result<()> {
    check_lattice(m, s)?;
    if p < 1 {
        return Err(Error::InvalidParameter(format!(
            "log transform order {p} < 1"
        )));
    }
    if !s.square().is_zero() {
        return Err(Error::InvalidParameter(format!("{s} has nonzero square")));
    }
    for k in m.kernel.classes() {
        if !k.dot(s)?.is_zero() {
            return Err(Error::NonOrthogonal(k.to_string(), s.to_string()));
        }
    }
    Ok(())
}

/// Multiplies the kernel by `sinh(S)/sinh(S/p)` on the lattice refined so that `S/p` is integral.
pub fn log_transform(m: &ManifoldSeries, s: &HClass, p: i64) -> Result<ManifoldSeries> {
    check_log_hypotheses(m, s, p)?;
    let (i, k) = basis_multiple(s).ok_or_else(|| {
        Error::InvalidParameter(format!("{s} is not a multiple of a basis vector"))
    })?;
    let d = p / num::integer::gcd(k, p);
    let b = HClass::basis(m.lattice(), i);
    let kernel = m
        .kernel
        .refine_lattice(&b, d, &refined_name(&m.lattice().names()[i], d))?;
    let lattice = kernel.lattice().clone();
    let mut sv = vec![0; lattice.rank()];
    sv[i] = k * d;
    let big = HClass::new(&lattice, sv.clone())?;
    sv[i] = k * d / p;
    let small = HClass::new(&lattice, sv)?;
    let factor = sinh_c(&big).exact_div(&sinh_c(&small))?;
    m.with_kernel(kernel.mul(&factor)?)
}

/// Spheres of `C_p` in `X # (p−1)CP̄²`: `u_i = e_{p−i−1} − e_{p−i}`, `u_{p−1} = S − 2e_1 − e_2 − … − e_{p−1}`.
/// Without `S` this is the configuration whose blowdown is `X # H_p`.
pub fn nodal_config(
    ambient: &Arc<IntersectionLattice>,
    s: Option<&HClass>,
    exceptional: &[HClass],
) -> Result<ConfigCp> {
    let p = exceptional.len() as i64 + 1;
    let e = |j: i64| &exceptional[(j - 1) as usize];
    let mut spheres = Vec::new();
    for i in 1..=p - 2 {
        spheres.push(e(p - i - 1).sub(e(p - i))?);
    }
    let mut last = match s {
        Some(s) => s.clone(),
        None => HClass::zero(ambient),
    };
    for j in 1..p {
        last = last.sub(&e(j).scaled(if j == 1 { 2 } else { 1 }))?;
    }
    spheres.push(last);
    ConfigCp::new(p, ambient, spheres)
}

fn binomial(n: i64, k: i64) -> Rational {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(c)
}

/// Blowdown of a nodal-type configuration in a blown-up manifold, weighting each
/// exceptional combination by the formal log coefficient of its level.
fn nodal_blowdown(blown: &ManifoldSeries, config: &ConfigCp) -> Result<BlowdownResult> {
    let p = config.p();
    let b = formal_log_coefficients(p)?;
    let factor = pow2(p - 1);
    let pinv = ScaledInverse::new(p)?;
    let mut pending = Vec::new();
    for (class, a) in blown.kernel.terms().iter().rev() {
        let source = HClass::new(blown.lattice(), class.clone())?;
        let restriction = restrict_with(config, &pinv, &source)?;
        let level = to_i64(&restriction.level())
            .filter(|l| l.abs() < p && (l + p - 1) % 2 == 0)
            .ok_or_else(|| Error::NonIntegralExtension(restriction.image.to_string()))?;
        let coeff = a * &factor * b.get(&level).cloned().unwrap_or_else(Rational::zero)
            / binomial(p - 1, (p - 1 + level) / 2);
        pending.push(Pending {
            source,
            restriction,
            coeff: (!coeff.is_zero()).then_some(coeff),
        });
    }
    assemble(config, pending, blown)
}

/// Blow up `p−1` times, then blow down the nodal configuration built on `S`.
pub fn nodal_log_blowdown(m: &ManifoldSeries, s: &HClass, p: i64) -> Result<BlowdownResult> {
    check_log_hypotheses(m, s, p)?;
    if p < 2 {
        return Err(Error::InvalidParameter(
            "nodal configuration needs p >= 2".into(),
        ));
    }
    let r = m.lattice().rank();
    let blown = blowup(m, (p - 1) as usize)?;
    let lattice = blown.lattice().clone();
    let exceptional: Vec<HClass> = (0..(p - 1) as usize)
        .map(|i| HClass::basis(&lattice, r + i))
        .collect();
    let config = nodal_config(&lattice, Some(&embed_class(s, &lattice)?), &exceptional)?;
    nodal_blowdown(&blown, &config)
}

/// Log transform realised as blowup followed by rational blowdown.
pub fn nodal_log_pipeline(m: &ManifoldSeries, s: &HClass, p: i64) -> Result<ManifoldSeries> {
    check_log_hypotheses(m, s, p)?;
    if p == 1 {
        return Ok(m.clone());
    }
    Ok(nodal_log_blowdown(m, s, p)?.series)
}

/// `M # H_p`, via the configuration without a fiber component.
pub fn connected_sum_hp(m: &ManifoldSeries, p: i64) -> Result<ManifoldSeries> {
    if p < 1 {
        return Err(Error::InvalidParameter(format!(
            "H_p needs p >= 1, got {p}"
        )));
    }
    if p == 1 {
        return Ok(m.clone());
    }
    let r = m.lattice().rank();
    let blown = blowup(m, (p - 1) as usize)?;
    let lattice = blown.lattice().clone();
    let exceptional: Vec<HClass> = (0..(p - 1) as usize)
        .map(|i| HClass::basis(&lattice, r + i))
        .collect();
    let config = nodal_config(&lattice, None, &exceptional)?;
    Ok(nodal_blowdown(&blown, &config)?.series)
}

/// `b_{p,ℓ}`: coefficient of `e^{ℓ S/p}` in the order-`p` log-transform factor.
///
/// Order 2 comes from the `-4`-sphere blowdown in `E(2) # CP̄²`. Higher orders
/// solve the linear system forced by commuting an order-`p` and an order-`q`
/// transform on the same fiber (`q = 2` for odd `p`, `q = p − 1` for even `p`),
/// together with total weight `p` from `X # H_p`.
pub fn formal_log_coefficients(p: i64) -> Result<BTreeMap<i64, Rational>> {
    match p {
        p if p < 1 => Err(Error::InvalidParameter(format!("log order {p} < 1"))),
        1 => Ok(BTreeMap::from([(0, Rational::one())])),
        2 => order_two_coefficients(),
        _ => {
            let q = if p % 2 == 1 { 2 } else { p - 1 };
            let bq = formal_log_coefficients(q)?;
            solve_log_coefficients(p, q, &bq)
        }
    }
}

fn order_two_coefficients() -> Result<BTreeMap<i64, Rational>> {
    let lattice = IntersectionLattice::from_ints(&["f"], &[vec![0]])?;
    let e2 = ManifoldSeries::new(ExpKernel::one(&lattice), 24, -16, 3)?;
    let blown = blowup(&e2, 1)?;
    let l = blown.lattice().clone();
    let sigma = HClass::new(&l, vec![1, -2])?;
    let out = p2_blowdown(&blown, &sigma)?.series;
    if out.lattice().rank() != 1 {
        return Err(Error::Semantic(
            "order-2 blowdown did not land on a rank-1 fiber lattice".into(),
        ));
    }
    Ok(out
        .kernel
        .terms()
        .iter()
        .map(|(k, c)| (k[0], c.clone()))
        .collect())
}

fn solve_log_coefficients(
    p: i64,
    q: i64,
    bq: &BTreeMap<i64, Rational>,
) -> Result<BTreeMap<i64, Rational>> {
    let levels: Vec<i64> = (0..p).map(|k| 2 * k - (p - 1)).collect();
    let n = levels.len();
    let mut rows: BTreeMap<i64, Vec<Rational>> = BTreeMap::new();
    for (k, &l) in levels.iter().enumerate() {
        for (&lq, c) in bq {
            rows.entry(l * q + lq)
                .or_insert_with(|| vec![Rational::zero(); n])[k] += c;
            rows.entry(lq * p + l)
                .or_insert_with(|| vec![Rational::zero(); n])[k] -= c;
        }
    }
    let mut a: Matrix = rows.into_values().collect();
    let mut rhs = vec![Rational::zero(); a.len()];
    a.push(vec![Rational::one(); n]);
    rhs.push(rat(p));
    let solution = match rational::solve_unique(&a, &rhs) {
        Ok(s) => s,
        Err(_) => {
            for (k, &l) in levels.iter().enumerate() {
                let mut row = vec![Rational::zero(); n];
                row[k] += Rational::one();
                row[levels
                    .iter()
                    .position(|&m| m == -l)
                    .expect("symmetric levels")] -= Rational::one();
                a.push(row);
                rhs.push(Rational::zero());
            }
            rational::solve_unique(&a, &rhs)?
        }
    };
    let x = solution
        .ok_or_else(|| Error::Semantic(format!("order {p} coefficient system is inconsistent")))?;
    Ok(levels.into_iter().zip(x).collect())
}

/// Rows of `A` are the spheres of the nodal configuration in the `e_i` basis.
pub fn nodal_a_matrix(p: i64) -> Matrix {
    let n = (p - 1) as usize;
    let mut a = rational::zeros(n, n);
    for i in 1..=n.saturating_sub(1) {
        a[i - 1][n - i - 1] = Rational::one();
        a[i - 1][n - i] = -Rational::one();
    }
    if n >= 1 {
        for j in 0..n {
            a[n - 1][j] = if j == 0 { rat(-2) } else { rat(-1) };
        }
    }
    a
}

/// `P (Aᵗ)⁻¹ = −A` and `Aᵗ P⁻¹ A = −I`.
pub fn verify_pa_identity(p: i64) -> Result<bool> {
    let pm = crate::lattice::plumbing_matrix(p)?;
    let pinv = plumbing_inverse(p)?;
    let a = nodal_a_matrix(p);
    let at = rational::transpose(&a);
    let Some(at_inv) = rational::inverse(&at) else {
        return Ok(false);
    };
    let n = a.len();
    let first = rational::mat_mul(&pm, &at_inv) == rational::neg_matrix(&a);
    let second = rational::mat_mul(&rational::mat_mul(&at, &pinv), &a)
        == rational::neg_matrix(&rational::identity(n));
    Ok(first && second)
}

/// `x = P⁻¹ A ε` for `ε = (1, …, 1)`.
pub fn nodal_x_all_ones(p: i64) -> Result<Vec<Rational>> {
    let a = nodal_a_matrix(p);
    let ones = vec![Rational::one(); a.len()];
    Ok(rational::mat_vec(
        &plumbing_inverse(p)?,
        &rational::mat_vec(&a, &ones),
    ))
}

/// For odd `p` on `u = f_{2p}`: `2cosh(p·u)·Σ b_{p,j} e^{j·u}` equals `Σ b_{p,j} e^{2j·u}·2cosh(u)`, and is even.
pub fn verify_double_expansion(p: i64) -> Result<bool> {
    if p < 1 || p % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "double expansion needs odd p, got {p}"
        )));
    }
    let l = IntersectionLattice::from_ints(&["u"], &[vec![0]])?;
    let b = formal_log_coefficients(p)?;
    let ex = |k: i64| HClass::new(&l, vec![k]).map(|c| crate::exppoly::exp_c(&c));
    let sum = |scale: i64| -> Result<ExpKernel> {
        b.iter().try_fold(ExpKernel::zero(&l), |acc, (&j, c)| {
            acc.add(&ex(j * scale)?.scale(c))
        })
    };
    let first = ex(p)?.add(&ex(-p)?)?.mul(&sum(1)?)?;
    let second = sum(2)?.mul(&ex(1)?.add(&ex(-1)?)?)?;
    Ok(first == second && first.parity() == crate::exppoly::Parity::Even)
}

/// For every sign vector `ε`, the class `Σ ε_i e_i` on `{f, e_1..e_{p−1}}` restricts to `(Σ ε_i / p)·f`.
pub fn verify_kappa_j(p: i64) -> Result<bool> {
    if !(2..=20).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "kappa_J check needs 2 <= p <= 20, got {p}"
        )));
    }
    let n = (p - 1) as usize;
    let mut names = vec!["f".to_string()];
    names.extend((1..=n).map(|i| format!("e{i}")));
    let gram: Vec<Vec<i64>> = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| if i == j && i > 0 { -1 } else { 0 })
                .collect()
        })
        .collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let lattice = IntersectionLattice::from_ints(&refs, &gram)?;
    let exceptional: Vec<HClass> = (1..=n).map(|i| HClass::basis(&lattice, i)).collect();
    let config = nodal_config(&lattice, Some(&HClass::basis(&lattice, 0)), &exceptional)?;
    for mask in 0u32..(1 << n) {
        let eps: Vec<i64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
            .collect();
        let mut coeffs = vec![0];
        coeffs.extend(&eps);
        let r = restrict_class(&config, &HClass::new(&lattice, coeffs)?)?;
        let mut expected = vec![Rational::zero(); n + 1];
        expected[0] = rational::frac(eps.iter().sum(), p);
        if r.image.coeffs() != expected.as_slice() {
            return Ok(false);
        }
    }
    Ok(true)
}

impl std::fmt::Display for ManifoldSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}  (e={}, sign={}, b+={})",
            self.kernel.describe(),
            self.euler,
            self.signature,
            self.b_plus
        )
    }
}

impl std::fmt::Display for Restriction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}  square={}  boundary={}",
            self.image,
            format_rational(&self.square),
            self.boundary
        )
    }
}
