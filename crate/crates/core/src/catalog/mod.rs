//! Named manifolds, each buildable from a closed formula and from a pipeline
//! of transforms, plus their Seiberg–Witten maps and a characteristic-number audit.

mod spec;

use std::sync::Arc;

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};

pub use spec::{parse_spec, ManifoldSpec};

use crate::error::{Error, Result};
use crate::exppoly::{cosh_c, sinh_c, ExpKernel};
use crate::lattice::{refined_name, Class, ConfigCp, HClass, IntersectionLattice};
use crate::rational::{format_rational, rat, Rational};
use crate::swinv::{sw_blowup, sw_en_on, sw_log_transform, sw_taut_blowdown, SWMap};
use crate::transform::{
    blowup, connected_sum_hp, log_transform, nodal_log_pipeline, taut_blowdown, ManifoldSeries,
};

/// `(e, σ, b⁺)` of `E(n)`.
pub fn elliptic_numbers(n: i64) -> (i64, i64, i64) {
    (12 * n, -8 * n, 2 * n - 1)
}

/// The multiple of the basis vector named `base` or `base_k` that equals the class `base`.
pub fn fiber_class(lattice: &Arc<IntersectionLattice>, base: &str) -> Result<HClass> {
    for (i, name) in lattice.names().iter().enumerate() {
        let k = if name == base {
            Some(1)
        } else {
            name.strip_prefix(base)
                .and_then(|r| r.strip_prefix('_'))
                .and_then(|k| k.parse::<i64>().ok())
        };
        if let Some(k) = k {
            return Ok(HClass::basis(lattice, i).scaled(k));
        }
    }
    Err(Error::Semantic(format!(
        "no fiber class '{base}' on lattice {:?}",
        lattice.names()
    )))
}

fn series(kernel: ExpKernel, numbers: (i64, i64, i64)) -> Result<ManifoldSeries> {
    ManifoldSeries::new(kernel, numbers.0, numbers.1, numbers.2)
}

fn null_lattice(names: &[&str]) -> Result<Arc<IntersectionLattice>> {
    let n = names.len();
    IntersectionLattice::from_ints(names, &vec![vec![0; n]; n])
}

/// `E(4)` with fiber `f` and disjoint sections `s_1..s_n` (`s_i² = -4`, `s_i·f = 1`).
pub fn w_model(n: usize) -> Result<Arc<IntersectionLattice>> {
    let mut names = vec!["f".to_string()];
    names.extend((1..=n).map(|i| format!("s{i}")));
    let mut g = vec![vec![0i64; n + 1]; n + 1];
    for i in 1..=n {
        g[0][i] = 1;
        g[i][0] = 1;
        g[i][i] = -4;
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    IntersectionLattice::from_ints(&refs, &g)
}

/// `E(n)` with fiber `f` and two disjoint `C_{n-2}`: chains `ub_1..ub_{n-4}` of `-2`-spheres
/// ending on a section `sb` (`sb² = -n`, `sb·f = 1`), for blocks `b = 1, 2`.
pub fn yh_model(n: i64) -> Result<Arc<IntersectionLattice>> {
    let chain = (n - 4) as usize;
    let block = chain + 1;
    let r = 1 + 2 * block;
    let mut names = vec!["f".to_string()];
    let mut g = vec![vec![0i64; r]; r];
    for b in 0..2 {
        let s = 1 + b * block;
        names.push(format!("s{}", b + 1));
        names.extend((1..=chain).map(|j| format!("u{}_{j}", b + 1)));
        g[0][s] = 1;
        g[s][0] = 1;
        g[s][s] = -n;
        for j in 0..chain {
            let u = s + 1 + j;
            g[u][u] = -2;
            if j + 1 < chain {
                g[u][u + 1] = 1;
                g[u + 1][u] = 1;
            }
        }
        if chain > 0 {
            g[s][s + chain] = 1;
            g[s + chain][s] = 1;
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    IntersectionLattice::from_ints(&refs, &g)
}

/// Horikawa configuration of block `b` on the current lattice: chain then section.
fn horikawa_config(lattice: &Arc<IntersectionLattice>, n: i64, b: usize) -> Result<ConfigCp> {
    let mut spheres: Vec<HClass> = (1..=n - 4)
        .map(|j| HClass::named(lattice, &format!("u{b}_{j}")))
        .collect::<Result<_>>()?;
    spheres.push(HClass::named(lattice, &format!("s{b}"))?);
    ConfigCp::new(n - 2, lattice, spheres)
}

/// The `K3` control: a fiber and an orthogonal `-4`-sphere class `t`, kernel `1`.
pub fn k3_control() -> Result<(ManifoldSeries, HClass)> {
    let l = IntersectionLattice::from_ints(&["f", "t"], &[vec![0, 0], vec![0, -4]])?;
    Ok((
        series(ExpKernel::one(&l), elliptic_numbers(2))?,
        HClass::basis(&l, 1),
    ))
}

/// `sinh^power(F) / Π sinh(F/p_i)` with `F = big·u`.
fn quotient_kernel(u: &HClass, big: i64, power: i64, orders: &[i64]) -> Result<ExpKernel> {
    let num = sinh_c(&u.scaled(big)).pow(power as u32);
    let den = orders
        .iter()
        .try_fold(ExpKernel::one(u.lattice()), |acc, &p| {
            acc.mul(&sinh_c(&u.scaled(big / p)))
        })?;
    num.exact_div(&den)
}

fn hyperbolic(k: &HClass, odd: bool) -> ExpKernel {
    if odd {
        sinh_c(k)
    } else {
        cosh_c(k)
    }
}

fn pow2(k: i64) -> Rational {
    Rational::from_integer(BigInt::from(2).pow(k as u32))
}

/// Lattice of the Y(n) closed form: `k² = n−3`, `k·s2 = n−2`, then the second block.
fn y_lattice(n: i64) -> Result<Arc<IntersectionLattice>> {
    let chain = (n - 4) as usize;
    let r = 2 + chain;
    let mut names = vec!["k".to_string(), "s2".to_string()];
    names.extend((1..=chain).map(|j| format!("u2_{j}")));
    let mut g = vec![vec![0i64; r]; r];
    g[0][0] = n - 3;
    g[0][1] = n - 2;
    g[1][0] = n - 2;
    g[1][1] = -n;
    for j in 0..chain {
        let u = 2 + j;
        g[u][u] = -2;
        if j + 1 < chain {
            g[u][u + 1] = 1;
            g[u + 1][u] = 1;
        }
    }
    if chain > 0 {
        g[1][1 + chain] = 1;
        g[1 + chain][1] = 1;
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    IntersectionLattice::from_ints(&refs, &g)
}

fn base_numbers(spec: &ManifoldSpec) -> (i64, i64, i64) {
    match spec {
        ManifoldSpec::Elliptic { n, .. } | ManifoldSpec::Noncomplex { n, .. } => {
            elliptic_numbers(*n)
        }
        ManifoldSpec::W { n } => (48 - n, -32 + n, 7),
        ManifoldSpec::Y { n } => (11 * n + 3, -7 * n - 3, 2 * n - 1),
        ManifoldSpec::H { n } => (10 * n + 6, -6 * n - 6, 2 * n - 1),
        ManifoldSpec::Blowup { base, k } => {
            let (e, s, b) = base_numbers(base);
            (e + k, s - k, b)
        }
        ManifoldSpec::LogT { base, .. } | ManifoldSpec::HpSum { base, .. } => base_numbers(base),
    }
}

/// Series from the closed formulas.
pub fn donaldson_closed_form(spec: &ManifoldSpec) -> Result<ManifoldSeries> {
    spec.validate()?;
    let numbers = base_numbers(spec);
    match spec {
        ManifoldSpec::Elliptic { n, orders } => {
            let big = orders.iter().fold(1i64, |l, &p| num::integer::lcm(l, p));
            let l = null_lattice(&[refined_name("f", big).as_str()])?;
            let u = HClass::basis(&l, 0);
            series(
                quotient_kernel(&u, big, n - 2 + orders.len() as i64, orders)?,
                numbers,
            )
        }
        ManifoldSpec::Noncomplex { n, pairs } => {
            let dirs: Vec<(String, i64)> = ["f", "g", "h"]
                .iter()
                .zip(pairs)
                .map(|(b, &(p, q))| {
                    let big = num::integer::lcm(p, q);
                    (refined_name(b, big), big)
                })
                .collect();
            let names: Vec<&str> = dirs.iter().map(|(s, _)| s.as_str()).collect();
            let l = null_lattice(&names)?;
            let mut kernel = ExpKernel::one(&l);
            for (i, ((_, big), &(p, q))) in dirs.iter().zip(pairs).enumerate() {
                let power = if i == 0 { n } else { &2 };
                kernel = kernel.mul(&quotient_kernel(
                    &HClass::basis(&l, i),
                    *big,
                    *power,
                    &[p, q],
                )?)?;
            }
            series(kernel, numbers)
        }
        ManifoldSpec::W { n } => {
            let l = IntersectionLattice::from_ints(&["k"], &[vec![*n]])?;
            series(cosh_c(&HClass::basis(&l, 0)).scale(&pow2(n - 1)), numbers)
        }
        ManifoldSpec::Y { n } => {
            let l = y_lattice(*n)?;
            series(hyperbolic(&HClass::basis(&l, 0), n % 2 == 1), numbers)
        }
        ManifoldSpec::H { n } => {
            let l = IntersectionLattice::from_ints(&["k"], &[vec![2 * n - 6]])?;
            series(
                hyperbolic(&HClass::basis(&l, 0), n % 2 == 1).scale(&pow2(n - 3)),
                numbers,
            )
        }
        ManifoldSpec::Blowup { base, k } => blowup(&donaldson_closed_form(base)?, *k as usize),
        ManifoldSpec::LogT { base, p } => {
            let m = donaldson_closed_form(base)?;
            let s = fiber_class(m.lattice(), "f")?;
            log_transform(&m, &s, *p)
        }
        ManifoldSpec::HpSum { base, p } => {
            let m = donaldson_closed_form(base)?;
            m.with_kernel(m.kernel().scale(&rat(*p)))
        }
    }
}

fn en_on(f: &HClass, n: i64) -> Result<ManifoldSeries> {
    series(sinh_c(f).pow((n - 2) as u32), elliptic_numbers(n))
}

fn log_chain(mut m: ManifoldSeries, base: &str, orders: &[i64]) -> Result<ManifoldSeries> {
    for &p in orders {
        let s = fiber_class(m.lattice(), base)?;
        m = nodal_log_pipeline(&m, &s, p)?;
    }
    Ok(m)
}

fn yh_pipeline(n: i64, blocks: usize) -> Result<ManifoldSeries> {
    let l = yh_model(n)?;
    let mut m = en_on(&HClass::basis(&l, 0), n)?;
    for b in 1..=blocks {
        let c = horikawa_config(m.lattice(), n, b)?;
        m = taut_blowdown(&m, &c)?.series;
    }
    Ok(m)
}

/// Series built from transforms only.
pub fn donaldson_pipeline(spec: &ManifoldSpec) -> Result<ManifoldSeries> {
    spec.validate()?;
    match spec {
        ManifoldSpec::Elliptic { n, orders } => {
            let l = null_lattice(&["f"])?;
            log_chain(en_on(&HClass::basis(&l, 0), *n)?, "f", orders)
        }
        ManifoldSpec::Noncomplex { n, pairs } => {
            let l = null_lattice(&["f", "g", "h"])?;
            let mut m = en_on(&HClass::basis(&l, 0), *n)?;
            for (base, &(p, q)) in ["f", "g", "h"].iter().zip(pairs) {
                m = log_chain(m, base, &[p, q])?;
            }
            Ok(m)
        }
        ManifoldSpec::W { n } => {
            let l = w_model(*n as usize)?;
            let mut m = en_on(&HClass::basis(&l, 0), 4)?;
            for i in 1..=*n {
                let s = HClass::named(m.lattice(), &format!("s{i}"))?;
                let c = ConfigCp::new(2, m.lattice(), vec![s])?;
                m = taut_blowdown(&m, &c)?.series;
            }
            Ok(m)
        }
        ManifoldSpec::Y { n } => yh_pipeline(*n, 1),
        ManifoldSpec::H { n } => yh_pipeline(*n, 2),
        ManifoldSpec::Blowup { base, k } => blowup(&donaldson_pipeline(base)?, *k as usize),
        ManifoldSpec::LogT { base, p } => {
            let m = donaldson_pipeline(base)?;
            let s = fiber_class(m.lattice(), "f")?;
            nodal_log_pipeline(&m, &s, *p)
        }
        ManifoldSpec::HpSum { base, p } => connected_sum_hp(&donaldson_pipeline(base)?, *p),
    }
}

fn sw_log_chain(mut m: SWMap, base: &str, orders: &[i64]) -> Result<SWMap> {
    for &p in orders {
        let s = fiber_class(m.lattice(), base)?;
        m = sw_log_transform(&m, &s, p)?;
    }
    Ok(m)
}

/// Seiberg–Witten map from `SW_{E(n)}` and the SW transforms.
pub fn sw_closed_form(spec: &ManifoldSpec) -> Result<SWMap> {
    spec.validate()?;
    match spec {
        ManifoldSpec::Elliptic { n, orders } => {
            let l = null_lattice(&["f"])?;
            sw_log_chain(sw_en_on(&HClass::basis(&l, 0), *n)?, "f", orders)
        }
        ManifoldSpec::Noncomplex { n, pairs } => {
            let l = null_lattice(&["f", "g", "h"])?;
            let mut m = sw_en_on(&HClass::basis(&l, 0), *n)?;
            for (base, &(p, q)) in ["f", "g", "h"].iter().zip(pairs) {
                m = sw_log_chain(m, base, &[p, q])?;
            }
            Ok(m)
        }
        ManifoldSpec::W { n } => {
            let l = w_model(*n as usize)?;
            let mut m = sw_en_on(&HClass::basis(&l, 0), 4)?;
            for i in 1..=*n {
                let s = HClass::named(m.lattice(), &format!("s{i}"))?;
                m = sw_taut_blowdown(&m, &ConfigCp::new(2, m.lattice(), vec![s])?)?;
            }
            Ok(m)
        }
        ManifoldSpec::Y { n } | ManifoldSpec::H { n } => {
            let blocks = if matches!(spec, ManifoldSpec::Y { .. }) {
                1
            } else {
                2
            };
            let l = yh_model(*n)?;
            let mut m = sw_en_on(&HClass::basis(&l, 0), *n)?;
            for b in 1..=blocks {
                let c = horikawa_config(m.lattice(), *n, b)?;
                m = sw_taut_blowdown(&m, &c)?;
            }
            Ok(m)
        }
        ManifoldSpec::Blowup { base, k } => {
            sw_blowup(&sw_closed_form(base)?, &vec![0; *k as usize])
        }
        ManifoldSpec::LogT { base, p } => {
            let m = sw_closed_form(base)?;
            let s = fiber_class(m.lattice(), "f")?;
            sw_log_transform(&m, &s, *p)
        }
        ManifoldSpec::HpSum { .. } => Err(Error::Semantic(format!(
            "{spec}: Seiberg–Witten invariants of X # H_p are not covered"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCheck {
    pub class: String,
    pub square: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub value: i64,
    pub expected: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub spec: String,
    pub euler: i64,
    pub signature: i64,
    pub b_plus: i64,
    pub c1_squared: i64,
    pub c2: i64,
    pub classes: Vec<ClassCheck>,
    pub identities: Vec<IdentityCheck>,
    pub pass: bool,
}

/// Basic classes have `κ² = c_1² = 3σ + 2e`; Horikawa-type surfaces satisfy their line identities.
pub fn adjunction_audit(spec: &ManifoldSpec) -> Result<AuditReport> {
    let m = donaldson_closed_form(spec)?;
    let c1 = m.c1_squared();
    let classes: Vec<ClassCheck> = m
        .kernel()
        .classes()
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .map(|k| {
            let sq = k.square();
            let label = k.to_string();
            ClassCheck {
                class: if label.is_empty() { "0".into() } else { label },
                square: format_rational(&sq),
                ok: sq == rat(c1),
            }
        })
        .collect();
    let c2 = m.euler();
    let id = |name: &str, value: i64, expected: i64| IdentityCheck {
        name: name.into(),
        value,
        expected,
        ok: value == expected,
    };
    let identities = match spec {
        ManifoldSpec::H { n } => vec![
            id("5c1^2 - c2 + 36", 5 * c1 - c2 + 36, 0),
            id("c1^2", c1, 2 * n - 6),
            id("c2", c2, 10 * n + 6),
        ],
        ManifoldSpec::Y { n } => vec![
            id("11c1^2 - c2 + 36", 11 * c1 - c2 + 36, 0),
            id("c1^2", c1, n - 3),
            id("c2", c2, 11 * n + 3),
        ],
        _ => vec![id(
            "b+ = (e + sign - 2)/2",
            m.b_plus(),
            (m.euler() + m.signature() - 2) / 2,
        )],
    };
    let pass = classes.iter().all(|c| c.ok) && identities.iter().all(|c| c.ok);
    Ok(AuditReport {
        spec: spec.to_string(),
        euler: m.euler(),
        signature: m.signature(),
        b_plus: m.b_plus(),
        c1_squared: c1,
        c2,
        classes,
        identities,
        pass,
    })
}

/// Pairs of orders exercised for `E(n;p,q)`.
pub const ELLIPTIC_PAIRS: [(i64, i64); 6] = [(2, 1), (3, 1), (2, 3), (2, 5), (3, 4), (3, 5)];

/// Every named manifold with both a Donaldson series and an SW map.
pub fn witten_catalog() -> Vec<ManifoldSpec> {
    let mut out: Vec<ManifoldSpec> = (2..=6).map(|n| ManifoldSpec::elliptic(n, &[])).collect();
    for n in 2..=5 {
        for (p, q) in ELLIPTIC_PAIRS {
            out.push(ManifoldSpec::elliptic(n, &[p, q]));
        }
    }
    out.extend((1..=8).map(|n| ManifoldSpec::W { n }));
    for n in 4..=8 {
        out.push(ManifoldSpec::Y { n });
        out.push(ManifoldSpec::H { n });
    }
    out.push(ManifoldSpec::Noncomplex {
        n: 2,
        pairs: [(2, 3), (2, 5), (3, 4)],
    });
    out
}

/// Kernel equality ignoring nothing: lattice, terms and characteristic numbers.
pub fn same_series(a: &ManifoldSeries, b: &ManifoldSeries) -> bool {
    a == b
}

/// Number of nonzero kernel terms.
pub fn term_count(m: &ManifoldSeries) -> usize {
    m.kernel().len()
}

/// True when every coefficient vanishes.
pub fn is_zero_series(m: &ManifoldSeries) -> bool {
    m.kernel().terms().values().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exppoly::Parity;
    use crate::swinv::{sw_dim, witten_check};
    use crate::transform::p2_blowdown;

    fn spec(s: &str) -> ManifoldSpec {
        parse_spec(s).unwrap()
    }

    #[test]
    fn elliptic_closed_forms() {
        let m = donaldson_closed_form(&spec("E(2;2,3)")).unwrap();
        assert_eq!(m.lattice().names(), &["f_6"]);
        assert_eq!(m.kernel().len(), 6);
        let m = donaldson_closed_form(&spec("E(3;2,5)")).unwrap();
        assert_eq!(m.lattice().names(), &["f_10"]);
        assert_eq!(m.kernel().len(), 20);
        assert_eq!((m.euler(), m.signature(), m.b_plus()), (36, -24, 5));
    }

    #[test]
    fn pipelines_match_closed_forms() {
        for s in [
            "E(3;2)",
            "E(4;3,5)",
            "W(3)",
            "Y(5)",
            "H(4)",
            "Y(6)",
            "H(7)",
            "blowup(E(3;2),2)",
            "logt(E(2),3)",
            "hpsum(E(3),2)",
        ] {
            let sp = spec(s);
            assert_eq!(
                donaldson_pipeline(&sp).unwrap(),
                donaldson_closed_form(&sp).unwrap(),
                "{s}"
            );
        }
    }

    #[test]
    fn taut_family_shapes() {
        let w3 = donaldson_pipeline(&spec("W(3)")).unwrap();
        assert_eq!(w3.kernel().describe(), "4*cosh(k)");
        let y5 = donaldson_closed_form(&spec("Y(5)")).unwrap();
        assert_eq!(y5.kernel().describe(), "sinh(k)");
        assert_eq!(y5.lattice().gram()[0][0], rat(2));
        let h4 = donaldson_closed_form(&spec("H(4)")).unwrap();
        assert_eq!(h4, donaldson_closed_form(&spec("W(2)")).unwrap());
        assert_eq!(h4.kernel().describe(), "2*cosh(k)");
    }

    #[test]
    fn noncomplex_pipeline() {
        let sp = spec("E(2;2,3;2,5;3,4)");
        let a = donaldson_pipeline(&sp).unwrap();
        assert_eq!(a, donaldson_closed_form(&sp).unwrap());
        assert_eq!(a.lattice().names(), &["f_6", "g_10", "h_12"]);
    }

    #[test]
    fn parity_of_elliptic_kernels() {
        for n in 2..=5 {
            for (p, q) in ELLIPTIC_PAIRS {
                let m = donaldson_closed_form(&ManifoldSpec::elliptic(n, &[p, q])).unwrap();
                let expected = if n % 2 == 0 {
                    Parity::Even
                } else {
                    Parity::Odd
                };
                assert_eq!(m.kernel().parity(), expected, "n={n} p={p} q={q}");
            }
        }
        for p in 1..=12 {
            let m = donaldson_closed_form(&ManifoldSpec::elliptic(2, &[p])).unwrap();
            assert_eq!(m.kernel().len() as i64, p);
            assert!(m.kernel().terms().values().all(|c| c == &rat(1)));
        }
    }

    #[test]
    fn sw_forms() {
        let e23 = sw_closed_form(&spec("E(2;3)")).unwrap();
        assert_eq!(e23.to_string(), "{2*f_3: 1, 0: 1, -2*f_3: 1}");
        let w2 = sw_closed_form(&spec("W(2)")).unwrap();
        assert_eq!(w2.to_string(), "{k: 1, -k: 1}");
        assert_eq!(w2.lattice().gram()[0][0], rat(2));
        assert_eq!(
            sw_closed_form(&spec("E(4)")).unwrap().to_string(),
            "{2*f: 1, 0: -2, -2*f: 1}"
        );
        assert!(sw_closed_form(&spec("hpsum(E(2),3)")).is_err());
    }

    #[test]
    fn witten_on_catalog() {
        for sp in witten_catalog() {
            let d = donaldson_closed_form(&sp).unwrap();
            let s = sw_closed_form(&sp).unwrap();
            assert!(witten_check(&d, &s).unwrap(), "{sp}");
            for k in s.classes() {
                assert_eq!(sw_dim(&s, &k).unwrap(), rat(0), "{sp} {k}");
            }
        }
        let d = donaldson_closed_form(&spec("blowup(E(3;2),1)")).unwrap();
        let s = sw_closed_form(&spec("blowup(E(3;2),1)")).unwrap();
        assert!(witten_check(&d, &s).unwrap());
    }

    #[test]
    fn audit_examples() {
        let h6 = adjunction_audit(&spec("H(6)")).unwrap();
        assert_eq!((h6.c1_squared, h6.c2), (6, 66));
        assert!(h6.pass);
        let y6 = adjunction_audit(&spec("Y(6)")).unwrap();
        assert_eq!((y6.c1_squared, y6.c2), (3, 69));
        assert!(y6.pass);
        let e3 = adjunction_audit(&spec("E(3)")).unwrap();
        assert_eq!(e3.classes.len(), 2);
        assert!(e3.pass);
    }

    #[test]
    fn k3_blowdown_is_zero() {
        let (m, t) = k3_control().unwrap();
        let out = p2_blowdown(&m, &t).unwrap().series;
        assert!(out.kernel().is_empty());
        assert!(is_zero_series(&out));
    }

    #[test]
    fn models_have_expected_gram() {
        let l = yh_model(6).unwrap();
        assert_eq!(
            l.names(),
            &["f", "s1", "u1_1", "u1_2", "s2", "u2_1", "u2_2"]
        );
        let c = horikawa_config(&l, 6, 1).unwrap();
        assert_eq!(c.p(), 4);
        let l = yh_model(4).unwrap();
        assert_eq!(l.names(), &["f", "s1", "s2"]);
        assert_eq!(w_model(2).unwrap().rank(), 3);
    }
}
