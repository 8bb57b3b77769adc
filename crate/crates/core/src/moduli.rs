//! Dimensions of reducible moduli on C_p and brute-force checks of the
//! lattice-minimisation lemmas.

use std::collections::BTreeMap;

use num::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    boundary, plumbing_matrix, rel_pairing, residue_class, Basis, RelClassCp, Zmod,
};
use crate::rational::{frac, rat, to_i64, Rational};

/// The class `⟨t, t+1; b⟩`: δ-coordinates `(t, ..., t, t+1, ..., t+1)` with `b` trailing `t+1`'s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalClass {
    pub p: i64,
    pub t: i64,
    pub b: i64,
}

impl CanonicalClass {
    pub fn new(p: i64, t: i64, b: i64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!("p = {p} < 2")));
        }
        if t < 0 {
            return Err(Error::InvalidParameter(format!("t = {t} < 0")));
        }
        if !(1..p).contains(&b) {
            return Err(Error::InvalidParameter(format!(
                "b = {b} outside 1..={}",
                p - 1
            )));
        }
        Ok(Self { p, t, b })
    }

    /// Least `(t, b)` with `(p-1)t + b = m`, for `1 <= m`.
    pub fn from_boundary(p: i64, m: i64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParameter(format!("boundary {m} < 1")));
        }
        let t = (m - 1) / (p - 1);
        Self::new(p, t, m - (p - 1) * t)
    }

    pub fn boundary_value(&self) -> i64 {
        (self.p - 1) * self.t + self.b
    }

    pub fn to_rel(&self) -> RelClassCp {
        let n = (self.p - 1) as usize;
        let b = self.b as usize;
        let delta = (0..n)
            .map(|i| if i + b >= n { self.t + 1 } else { self.t })
            .collect();
        RelClassCp { p: self.p, delta }
    }
}

/// `(b² + b²p − bp² − 2bt + t² − pt²)/p²`.
pub fn e_square(p: i64, t: i64, b: i64) -> Result<Rational> {
    CanonicalClass::new(p, t, b)?;
    Ok(frac(
        b * b + b * b * p - b * p * p - 2 * b * t + t * t - p * t * t,
        p * p,
    ))
}

pub fn general_e_square(e: &RelClassCp) -> Rational {
    rel_pairing(e, e).expect("same p")
}

/// The printed half-rho value `-(1/p²)(−2b²−2b²p−p²+2bp²+4bt−2p²t−2t²+2pt²)`.
pub fn lawson_half_rho_printed(p: i64, t: i64, b: i64) -> Rational {
    frac(
        -(-2 * b * b - 2 * b * b * p - p * p + 2 * b * p * p + 4 * b * t
            - 2 * p * p * t
            - 2 * t * t
            + 2 * p * t * t),
        p * p,
    )
}

/// `−2e² − 2 − sign·(ρ/2)` on `⟨t,t+1;b⟩` with the printed half-rho.
pub fn dim_with_printed_rho(p: i64, t: i64, b: i64, sign: i64) -> Result<Rational> {
    Ok(rat(-2) * e_square(p, t, b)? - rat(2) - rat(sign) * lawson_half_rho_printed(p, t, b))
}

/// Boundary correction `corr(p, m)`: `1` at `m = 0`, otherwise anchored on the
/// least canonical class with boundary `m`.
pub fn boundary_correction(p: i64, m: Zmod) -> Result<Rational> {
    if m.modulus != p * p {
        return Err(Error::ModulusMismatch(m.modulus, p * p));
    }
    if m.value == 0 {
        return Ok(rat(1));
    }
    let c = CanonicalClass::from_boundary(p, m.value)?;
    Ok(rat(-2) * e_square(p, c.t, c.b)? - rat(2) - rat(2 * c.t - 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub e: RelClassCp,
    #[serde(with = "crate::rational::serde_rational")]
    pub e_square: Rational,
    pub boundary: Zmod,
    pub boundary_class: i64,
    pub dim: i64,
}

pub fn dim_report(e: &RelClassCp) -> Result<DimReport> {
    let e2 = general_e_square(e);
    let m = boundary(e);
    let d = rat(-2) * &e2 - rat(2) - boundary_correction(e.p, m)?;
    let dim =
        to_i64(&d).ok_or_else(|| Error::NonIntegral(format!("dimension {d} for {:?}", e.delta)))?;
    Ok(DimReport {
        e: e.clone(),
        e_square: e2,
        boundary: m,
        boundary_class: residue_class(m),
        dim,
    })
}

/// Formal dimension `−2e² − 2 − corr(p, ∂e)`.
pub fn dim_moduli(e: &RelClassCp) -> Result<i64> {
    Ok(dim_report(e)?.dim)
}

/// Integer-only dimension evaluation used by the exhaustive searches.
///
/// With `S = Σx_i`, `Q = Σx_i²`: `p²e² = −p²Q + (p+1)S²`.
#[derive(Clone, Debug)]
pub struct DimTable {
    p: i64,
    corr_scaled: Vec<i64>,
}

impl DimTable {
    pub fn new(p: i64) -> Result<Self> {
        let p2 = p * p;
        let corr_scaled = (0..p2)
            .map(|m| {
                let c = boundary_correction(p, Zmod::new(m, p2))? * rat(p2);
                to_i64(&c).ok_or_else(|| Error::NonIntegral(format!("p^2 corr({p},{m})")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { p, corr_scaled })
    }

    pub fn dim(&self, x: &[i64]) -> i64 {
        let p = self.p;
        let p2 = p * p;
        let s: i64 = x.iter().sum();
        let q: i64 = x.iter().map(|v| v * v).sum();
        let num =
            2 * p2 * q - 2 * (p + 1) * s * s - 2 * p2 - self.corr_scaled[s.rem_euclid(p2) as usize];
        debug_assert_eq!(num % p2, 0);
        num / p2
    }
}

/// All integer vectors in `[-bound, bound]^n`, in lexicographic order.
fn box_points(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let side = (2 * bound + 1) as usize;
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut v = vec![0; n];
            for slot in v.iter_mut().rev() {
                *slot = (k % side) as i64 - bound;
                k /= side;
            }
            v
        })
        .collect()
}

fn parity_mask(x: &[i64]) -> u64 {
    x.iter()
        .enumerate()
        .fold(0, |m, (i, v)| m | ((v.rem_euclid(2) as u64) << i))
}

/// Minimal dimension over the box among classes with boundary `m` and the parity of `parity`.
pub fn min_dim_search(
    p: i64,
    m: Zmod,
    parity: &RelClassCp,
    bound: i64,
) -> Result<(i64, Vec<RelClassCp>)> {
    if bound < 1 {
        return Err(Error::InvalidParameter(format!("box {bound} < 1")));
    }
    if m.modulus != p * p || parity.p != p {
        return Err(Error::InvalidParameter("mismatched p".into()));
    }
    let table = DimTable::new(p)?;
    let target = parity_mask(&parity.delta);
    let mut best: Option<(i64, Vec<RelClassCp>)> = None;
    for x in box_points((p - 1) as usize, bound) {
        let s: i64 = x.iter().sum();
        if s.rem_euclid(p * p) != m.value || parity_mask(&x) != target {
            continue;
        }
        let d = table.dim(&x);
        match &mut best {
            Some((b, list)) if d == *b => list.push(RelClassCp { p, delta: x }),
            Some((b, _)) if d > *b => {}
            _ => best = Some((d, vec![RelClassCp { p, delta: x }])),
        }
    }
    best.ok_or(Error::EmptySearch)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub e: Vec<i64>,
    pub e_prime: Vec<i64>,
    pub detail: String,
}

/// Outcome of one exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub p: i64,
    pub parameters: BTreeMap<String, i64>,
    pub pass: bool,
    pub checked: u64,
    pub counterexamples: Vec<Counterexample>,
}

/// Counterexamples kept per report.
pub const MAX_COUNTEREXAMPLES: usize = 20;

impl LemmaReport {
    fn new(lemma: &str, p: i64, parameters: &[(&str, i64)]) -> Self {
        Self {
            lemma: lemma.into(),
            p,
            parameters: parameters
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            pass: true,
            checked: 0,
            counterexamples: Vec::new(),
        }
    }

    fn fail(&mut self, e: &[i64], e_prime: &[i64], detail: String) {
        self.pass = false;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(Counterexample {
                e: e.to_vec(),
                e_prime: e_prime.to_vec(),
                detail,
            });
        }
    }

    fn merge(&mut self, other: Self) {
        self.pass &= other.pass;
        self.checked += other.checked;
        for c in other.counterexamples {
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(c);
            }
        }
    }
}

/// Names of the four exhaustive checks, in report order.
pub const BV_CHECKS: [&str; 4] = [
    "boundary-shift-raises-dimension",
    "equal-boundary-minimizer-is-permutation",
    "parity-class-boundary-bound",
    "parity-class-dimension-step",
];

/// Runs the four minimisation checks for every canonical `⟨t,t+1;b⟩` with
/// `t <= t_max` and `(p-1)t+b <= p²/2`, against every class in `[-box, box]^{p-1}`.
pub fn verify_bv_lemmas(p: i64, t_max: i64, bound: i64) -> Result<Vec<LemmaReport>> {
    if p < 2 || t_max < 0 || bound < 1 {
        return Err(Error::InvalidParameter(format!(
            "p={p}, t_max={t_max}, box={bound}"
        )));
    }
    let p2 = p * p;
    let table = DimTable::new(p)?;
    let points = box_points((p - 1) as usize, bound);
    let data: Vec<(i64, i64, u64)> = points
        .par_iter()
        .map(|x| (x.iter().sum(), table.dim(x), parity_mask(x)))
        .collect();

    let mut canon = Vec::new();
    for t in 0..=t_max {
        for b in 1..p {
            let c = CanonicalClass::new(p, t, b)?;
            if 2 * c.boundary_value() <= p2 {
                canon.push(c);
            }
        }
    }
    let params = [("t_max", t_max), ("box", bound)];
    let per_class: Vec<Result<[LemmaReport; 4]>> = canon
        .par_iter()
        .map(|c| {
            let e = c.to_rel();
            let de = dim_moduli(&e)?;
            let m = c.boundary_value();
            let pe = parity_mask(&e.delta);
            let mut sorted_e = e.delta.clone();
            sorted_e.sort_unstable();
            let mut reps = BV_CHECKS.map(|name| LemmaReport::new(name, p, &params));
            for (x, &(s, d, par)) in points.iter().zip(&data) {
                if (s - m).rem_euclid(p2) == 0 {
                    let r = (s - m).div_euclid(p2);
                    if r != 0 && r != -1 {
                        reps[0].checked += 1;
                        if d <= de {
                            reps[0].fail(&e.delta, x, format!("r={r}, dim {d} <= {de}"));
                        }
                    }
                }
                if s == m && d <= de {
                    reps[1].checked += 1;
                    let mut sx = x.clone();
                    sx.sort_unstable();
                    if sx != sorted_e {
                        reps[1].fail(
                            &e.delta,
                            x,
                            format!("dim {d} <= {de} but not a permutation"),
                        );
                    }
                }
                if par == pe {
                    let bx = residue_class(Zmod::new(s, p2));
                    if d <= de {
                        reps[2].checked += 1;
                        if bx > m {
                            reps[2].fail(
                                &e.delta,
                                x,
                                format!("dim {d} <= {de} but boundary {bx} > {m}"),
                            );
                        }
                    }
                    if bx == m {
                        reps[3].checked += 1;
                        let diff = d - de;
                        if diff < 0 || diff % 4 != 0 {
                            reps[3].fail(&e.delta, x, format!("dim difference {diff}"));
                        }
                    }
                }
            }
            Ok(reps)
        })
        .collect();
    let mut out = BV_CHECKS.map(|name| LemmaReport::new(name, p, &params));
    for reps in per_class {
        for (acc, r) in out.iter_mut().zip(reps?) {
            acc.merge(r);
        }
    }
    Ok(out.to_vec())
}

/// Checks `dim⟨t,t+1;b⟩ = 2t − 1` over the given ranges.
pub fn verify_lemma_dim(
    p_range: std::ops::RangeInclusive<i64>,
    t_range: std::ops::RangeInclusive<i64>,
) -> Result<LemmaReport> {
    let mut rep = LemmaReport::new(
        "canonical-dimension",
        *p_range.end(),
        &[
            ("p_min", *p_range.start()),
            ("t_min", *t_range.start()),
            ("t_max", *t_range.end()),
        ],
    );
    for p in p_range {
        for t in t_range.clone() {
            for b in 1..p {
                let e = CanonicalClass::new(p, t, b)?.to_rel();
                let d = dim_moduli(&e)?;
                rep.checked += 1;
                if d != 2 * t - 1 {
                    rep.fail(
                        &e.delta,
                        &[p, t, b],
                        format!("p={p} t={t} b={b}: dim {d} != {}", 2 * t - 1),
                    );
                }
            }
        }
    }
    Ok(rep)
}

/// A class `c` in sphere coordinates with `P c ≡ e (mod 2)`, when one exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mod2Lift {
    pub exists: bool,
    pub witness: Option<Vec<i64>>,
}

/// Solves `P c ≡ γ(e) (mod 2)` over the field with two elements.
pub fn mod2_lift_exists(e: &RelClassCp) -> Result<Mod2Lift> {
    let p = e.p;
    let pm = plumbing_matrix(p)?;
    let n = (p - 1) as usize;
    let bit = |r: &Rational| (r.numer() % 2u8 != num::BigInt::zero()) as u8;
    let rhs = e.coords(Basis::Gamma);
    let mut rows: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            pm[i]
                .iter()
                .map(bit)
                .chain(std::iter::once(rhs[i].rem_euclid(2) as u8))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(k) = (r..n).find(|&k| rows[k][c] == 1) else {
            continue;
        };
        rows.swap(r, k);
        for k in 0..n {
            if k != r && rows[k][c] == 1 {
                let pivot_row = rows[r].clone();
                for (a, b) in rows[k].iter_mut().zip(pivot_row) {
                    *a ^= b;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[n] == 1) {
        return Ok(Mod2Lift {
            exists: false,
            witness: None,
        });
    }
    let mut c = vec![0; n];
    for (i, &col) in pivots.iter().enumerate() {
        c[col] = rows[i][n] as i64;
    }
    Ok(Mod2Lift {
        exists: true,
        witness: Some(c),
    })
}
